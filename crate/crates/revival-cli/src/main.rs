//! Command-line driver for collapse-and-revival simulations of a weakly
//! anharmonic oscillator.
//!
//! Subcommands:
//!
//! - `spectrum`: tabulate energy levels by one or all methods.
//! - `evolve`: time-evolve a displaced ground state through both dynamics
//!   pipelines, optionally with the analytic envelope bands.
//! - `experiment`: derive model parameters from a cold-atom experiment
//!   description (shipped preset or `key = value` file).
//! - `envelope-report`: print the analytic envelope parameters.
//!
//! Exit codes: 0 on success, 2 for usage or validation errors, 3 for
//! numeric failures, 1 for I/O problems.  Output is byte-deterministic for
//! a fixed configuration regardless of thread count (`--threads` or the
//! `REVIVAL_SIM_THREADS` variable; the flag wins).

mod spec_file;

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use revival_core::dynamics::{
    default_truncation, expectation_exact, expectation_series, CoherentState,
};
use revival_core::envelope::{EnvelopeModel, EnvelopeOrder};
use revival_core::experiments::{
    confinement_shift, cubic_correction_coefficient, lattice_derive, trap_limits, ConfinementShift,
    ConfinementSpec, LatticeDerived, TrapLimits, TrapSpec,
};
use revival_core::spectrum::{
    basis_for_valid_levels, exact_spectrum, perturbation_table, wkb_table, PtOrder, SpectrumTable,
};
use revival_core::units::{ModelParams, BETA_SERIES_GUIDE};
use revival_core::{csv_float, Error as CoreError};

use spec_file::{Confinement, ExperimentSpec};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug)]
enum CliError {
    Usage(String),
    Numeric(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Numeric(m) | CliError::Io(m) => m,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        let text = err.to_string();
        match err {
            CoreError::EigensolverStalled { .. }
            | CoreError::TruncationTooSmall { .. }
            | CoreError::SpectrumTooShort { .. }
            | CoreError::AboveBarrier { .. }
            | CoreError::NonPositiveEnergy { .. } => CliError::Numeric(text),
            _ => CliError::Usage(text),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(err: io::Error) -> Self {
        CliError::Io(err.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "revival-sim",
    version,
    about = "Collapse-and-revival dynamics of a weakly anharmonic oscillator"
)]
struct Cli {
    /// Worker thread count; overrides REVIVAL_SIM_THREADS.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate energy levels by one or all spectrum methods.
    Spectrum(SpectrumArgs),
    /// Evolve a displaced ground state and emit a time-series CSV.
    Evolve(EvolveArgs),
    /// Derive model parameters from a cold-atom experiment description.
    Experiment(ExperimentArgs),
    /// Print the analytic envelope parameters for one configuration.
    EnvelopeReport(EnvelopeReportArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    /// Semiclassical quantized-action levels.
    Wkb,
    /// First-order perturbation theory.
    Pt1,
    /// Second-order perturbation theory.
    Pt2,
    /// Diagonalization in a truncated harmonic basis.
    Exact,
    /// All methods side by side with error columns.
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SeriesMethodArg {
    Wkb,
    Pt1,
    Pt2,
    Exact,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OrderArg {
    /// Keep terms linear in beta.
    Leading,
    /// Keep the full second-order gap expansion.
    Second,
}

impl From<OrderArg> for EnvelopeOrder {
    fn from(order: OrderArg) -> Self {
        match order {
            OrderArg::Leading => EnvelopeOrder::LeadingBeta,
            OrderArg::Second => EnvelopeOrder::SecondOrderBeta,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PresetArg {
    /// beta = 1e-4, displacement = 4.
    Fig1,
    /// beta = 0.0398, displacement = 1.61.
    Fig2a,
    /// beta = 0.0178, displacement = 2.41.
    Fig2b,
    /// beta = 0.0126, displacement = 2.86.
    Fig2c,
}

impl PresetArg {
    fn params(self) -> (f64, f64) {
        match self {
            PresetArg::Fig1 => (1e-4, 4.0),
            PresetArg::Fig2a => (0.0398, 1.61),
            PresetArg::Fig2b => (0.0178, 2.41),
            PresetArg::Fig2c => (0.0126, 2.86),
        }
    }
}

#[derive(Args)]
struct SpectrumArgs {
    /// Dimensionless anharmonicity.
    #[arg(long, allow_negative_numbers = true)]
    beta: f64,

    /// Number of levels to tabulate.
    #[arg(long, visible_alias = "n", default_value_t = 30)]
    levels: usize,

    /// Spectrum method.
    #[arg(long, value_enum, default_value_t = MethodArg::All)]
    method: MethodArg,

    /// Harmonic-basis size for exact diagonalization (defaulted so the
    /// requested levels are trustworthy).
    #[arg(long)]
    basis: Option<usize>,

    /// Output file; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EvolveArgs {
    /// Named parameter set.
    #[arg(long, value_enum, conflicts_with_all = ["beta", "displacement"])]
    preset: Option<PresetArg>,

    /// Dimensionless anharmonicity.
    #[arg(
        long,
        allow_negative_numbers = true,
        required_unless_present = "preset"
    )]
    beta: Option<f64>,

    /// Initial displacement of the ground state.
    #[arg(
        long,
        allow_negative_numbers = true,
        required_unless_present = "preset"
    )]
    displacement: Option<f64>,

    /// Time span in oscillator units; defaults to 2.2 revival times
    /// (ten periods in the harmonic case).
    #[arg(long)]
    span: Option<f64>,

    /// Number of uniformly spaced samples including t = 0; defaults to
    /// about forty per oscillation period.
    #[arg(long)]
    samples: Option<usize>,

    /// Harmonic-basis truncation for the coherent state and evolutions.
    #[arg(long)]
    basis: Option<usize>,

    /// Spectrum source for the analytic spectrum-sum route.
    #[arg(long, value_enum, default_value_t = SeriesMethodArg::Wkb)]
    method: SeriesMethodArg,

    /// Envelope expansion order.
    #[arg(long, value_enum, default_value_t = OrderArg::Second)]
    order: OrderArg,

    /// Skip the envelope model and its columns.
    #[arg(long)]
    no_envelope: bool,

    /// Output file; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Shipped preset: lattice-35Er, lattice-175Er, lattice-350Er,
    /// or crossed-beam-rb.
    #[arg(required_unless_present = "spec", conflicts_with = "spec")]
    preset: Option<String>,

    /// Read the experiment description from a `key = value` file instead.
    #[arg(long)]
    spec: Option<PathBuf>,

    /// Output file; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EnvelopeReportArgs {
    /// Dimensionless anharmonicity.
    #[arg(long, allow_negative_numbers = true)]
    beta: f64,

    /// Initial displacement of the ground state.
    #[arg(long, allow_negative_numbers = true)]
    displacement: f64,

    /// Envelope expansion order.
    #[arg(long, value_enum, default_value_t = OrderArg::Second)]
    order: OrderArg,

    /// Output file; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads(cli.threads)?;
    match cli.command {
        Command::Spectrum(args) => run_spectrum(args),
        Command::Evolve(args) => run_evolve(args),
        Command::Experiment(args) => run_experiment(args),
        Command::EnvelopeReport(args) => run_envelope_report(args),
    }
}

fn configure_threads(flag: Option<usize>) -> Result<(), CliError> {
    let requested = match flag {
        Some(n) => Some(n),
        None => match std::env::var("REVIVAL_SIM_THREADS") {
            Ok(text) => Some(text.parse::<usize>().map_err(|_| {
                CliError::Usage(format!(
                    "REVIVAL_SIM_THREADS: `{text}` is not a thread count"
                ))
            })?),
            Err(std::env::VarError::NotPresent) => None,
            Err(err) => return Err(CliError::Usage(format!("REVIVAL_SIM_THREADS: {err}"))),
        },
    };
    if let Some(n) = requested {
        if n == 0 {
            return Err(CliError::Usage("thread count must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|err| CliError::Usage(format!("thread pool: {err}")))?;
    }
    Ok(())
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => {
            let file = fs::File::create(p)
                .map_err(|err| CliError::Io(format!("{}: {err}", p.display())))?;
            Ok(Box::new(BufWriter::new(file)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout()))),
    }
}

fn run_spectrum(args: SpectrumArgs) -> Result<(), CliError> {
    if args.levels == 0 {
        return Err(CliError::Usage("--levels must be at least 1".into()));
    }
    enum Tables {
        Single(SpectrumTable),
        SideBySide {
            exact: SpectrumTable,
            wkb: SpectrumTable,
            pt2: SpectrumTable,
        },
    }
    // Everything fallible happens before the first byte of output.
    let tables = match args.method {
        MethodArg::Wkb => Tables::Single(wkb_table(args.beta, args.levels)?),
        MethodArg::Pt1 => {
            Tables::Single(perturbation_table(args.beta, args.levels, PtOrder::First)?)
        }
        MethodArg::Pt2 => {
            Tables::Single(perturbation_table(args.beta, args.levels, PtOrder::Second)?)
        }
        MethodArg::Exact => {
            Tables::Single(trimmed_exact_table(args.beta, args.levels, args.basis)?)
        }
        MethodArg::All => Tables::SideBySide {
            exact: trimmed_exact_table(args.beta, args.levels, args.basis)?,
            wkb: wkb_table(args.beta, args.levels)?,
            pt2: perturbation_table(args.beta, args.levels, PtOrder::Second)?,
        },
    };
    let mut out = open_output(&args.output)?;
    writeln!(out, "# tool: revival-sim {VERSION} spectrum")?;
    match tables {
        Tables::Single(table) => table.write_csv(&mut out)?,
        Tables::SideBySide { exact, wkb, pt2 } => {
            writeln!(out, "# beta: {}", csv_float(args.beta))?;
            writeln!(out, "# valid_up_to: {}", exact.valid_up_to)?;
            writeln!(out, "n,E_wkb,E_pt2,E_exact,abs_err_wkb,abs_err_pt2")?;
            for n in 0..args.levels {
                let e_wkb = wkb.levels[n];
                let e_pt2 = pt2.levels[n];
                let e_exact = exact.levels[n];
                writeln!(
                    out,
                    "{n},{},{},{},{},{}",
                    csv_float(e_wkb),
                    csv_float(e_pt2),
                    csv_float(e_exact),
                    csv_float((e_wkb - e_exact).abs()),
                    csv_float((e_pt2 - e_exact).abs())
                )?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

/// Exact spectrum trimmed to the requested level count, erroring when the
/// trustworthy window is too small to cover it.
fn trimmed_exact_table(
    beta: f64,
    levels: usize,
    basis: Option<usize>,
) -> Result<SpectrumTable, CliError> {
    let basis = match basis {
        Some(b) => b,
        None => basis_for_valid_levels(levels)?,
    };
    let mut table = exact_spectrum(beta, basis)?;
    if table.valid_up_to + 1 < levels {
        return Err(CoreError::SpectrumTooShort {
            valid_up_to: table.valid_up_to,
            required: levels - 1,
        }
        .into());
    }
    table.levels.truncate(levels);
    table.valid_up_to = table.valid_up_to.min(levels - 1);
    Ok(table)
}

fn run_evolve(args: EvolveArgs) -> Result<(), CliError> {
    let (beta, displacement) = match args.preset {
        Some(preset) => preset.params(),
        None => (
            args.beta.expect("clap enforces --beta without a preset"),
            args.displacement
                .expect("clap enforces --displacement without a preset"),
        ),
    };
    let params = ModelParams::new(beta, displacement)?;
    if !params.beta_in_series_regime() {
        eprintln!(
            "warning: |beta| = {} exceeds the expansion guide {BETA_SERIES_GUIDE}; \
             series and envelope results degrade",
            beta.abs()
        );
    }

    let magnitude = displacement.abs();
    let envelope = if args.no_envelope {
        None
    } else {
        Some(EnvelopeModel::new(beta, magnitude, args.order.into())?)
    };

    let span = match args.span {
        Some(s) => {
            if !s.is_finite() || s <= 0.0 {
                return Err(CliError::Usage(format!("--span must be positive, got {s}")));
            }
            s
        }
        None => {
            if beta == 0.0 {
                20.0 * std::f64::consts::PI
            } else {
                2.2 * 8.0 * std::f64::consts::PI / (3.0 * beta.abs())
            }
        }
    };
    let samples = match args.samples {
        Some(m) => {
            if m < 2 {
                return Err(CliError::Usage(format!(
                    "--samples must be at least 2, got {m}"
                )));
            }
            m
        }
        None => (span * 40.0 / (2.0 * std::f64::consts::PI)).ceil() as usize + 1,
    };
    let truncation = args.basis.unwrap_or_else(|| default_truncation(magnitude));

    let times: Vec<f64> = (0..samples)
        .map(|i| span * i as f64 / (samples - 1) as f64)
        .collect();

    let exact = expectation_exact(beta, displacement, truncation, &times)?;
    let state = CoherentState::new(magnitude, truncation)?;
    let spectrum = series_spectrum(args.method, beta, truncation)?;
    let mut series = expectation_series(&state, &spectrum, &times)?;
    if displacement < 0.0 {
        series = series.negated();
    }

    let mut out = open_output(&args.output)?;
    writeln!(out, "# tool: revival-sim {VERSION} evolve")?;
    writeln!(out, "# beta: {}", csv_float(beta))?;
    writeln!(out, "# displacement: {}", csv_float(displacement))?;
    writeln!(out, "# truncation: {truncation}")?;
    writeln!(out, "# method: {}", spectrum.method)?;
    if let Some(model) = &envelope {
        writeln!(out, "# order: {}", model.order)?;
    }
    writeln!(out, "# span: {}", csv_float(span))?;
    writeln!(out, "# samples: {samples}")?;
    if let Some(model) = &envelope {
        writeln!(out, "t,x_exact,p_exact,x_series,p_series,x_env_hi,x_env_lo")?;
        for (i, &t) in times.iter().enumerate() {
            let f = model.envelope_value(t);
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                csv_float(t),
                csv_float(exact.x[i]),
                csv_float(exact.p[i]),
                csv_float(series.x[i]),
                csv_float(series.p[i]),
                csv_float(f),
                csv_float(-f)
            )?;
        }
    } else {
        writeln!(out, "t,x_exact,p_exact,x_series,p_series")?;
        for (i, &t) in times.iter().enumerate() {
            writeln!(
                out,
                "{},{},{},{},{}",
                csv_float(t),
                csv_float(exact.x[i]),
                csv_float(exact.p[i]),
                csv_float(series.x[i]),
                csv_float(series.p[i])
            )?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Spectrum table feeding the analytic spectrum-sum route: its first
/// `truncation` levels must all be trustworthy.
fn series_spectrum(
    method: SeriesMethodArg,
    beta: f64,
    truncation: usize,
) -> Result<SpectrumTable, CliError> {
    let table = match method {
        SeriesMethodArg::Wkb => wkb_table(beta, truncation)?,
        SeriesMethodArg::Pt1 => perturbation_table(beta, truncation, PtOrder::First)?,
        SeriesMethodArg::Pt2 => perturbation_table(beta, truncation, PtOrder::Second)?,
        SeriesMethodArg::Exact => {
            let basis = basis_for_valid_levels(truncation)?;
            exact_spectrum(beta, basis)?
        }
    };
    Ok(table)
}

fn run_experiment(args: ExperimentArgs) -> Result<(), CliError> {
    let text = match (&args.preset, &args.spec) {
        (Some(name), None) => preset_text(name)?.to_string(),
        (None, Some(path)) => fs::read_to_string(path)
            .map_err(|err| CliError::Io(format!("{}: {err}", path.display())))?,
        _ => unreachable!("clap enforces exactly one source"),
    };
    let spec = spec_file::parse(&text).map_err(CliError::Usage)?;
    enum Report {
        Lattice {
            derived: LatticeDerived,
            confinement: Option<(Confinement, ConfinementShift, f64)>,
        },
        CrossedBeam {
            trap: TrapSpec,
            limits: TrapLimits,
        },
    }
    // Everything fallible happens before the first byte of output.
    let report = match spec {
        ExperimentSpec::Lattice {
            lattice,
            confinement,
        } => {
            let derived = lattice_derive(&lattice)?;
            let confinement = confinement
                .map(|conf| -> Result<_, CliError> {
                    let spec = ConfinementSpec {
                        omega_ext: conf.omega_ext,
                        omega0: derived.omega0,
                    };
                    let shift = confinement_shift(&spec, conf.site_index, derived.wavelength)?;
                    let cubic = cubic_correction_coefficient(
                        &spec,
                        derived.mass,
                        conf.site_index,
                        derived.wavelength,
                    )?;
                    Ok((conf, shift, cubic))
                })
                .transpose()?;
            Report::Lattice {
                derived,
                confinement,
            }
        }
        ExperimentSpec::CrossedBeam(trap) => {
            let limits = trap_limits(&trap)?;
            Report::CrossedBeam { trap, limits }
        }
    };
    let mut out = open_output(&args.output)?;
    writeln!(out, "# tool: revival-sim {VERSION} experiment")?;
    match report {
        Report::Lattice {
            derived,
            confinement,
        } => {
            write_lattice_report(&mut out, &derived)?;
            if let Some((conf, shift, cubic)) = confinement {
                write_confinement_report(&mut out, &conf, &shift, cubic)?;
            }
        }
        Report::CrossedBeam { trap, limits } => {
            write_trap_report(&mut out, &trap, &limits)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn preset_text(name: &str) -> Result<&'static str, CliError> {
    match name {
        "lattice-35Er" => Ok(include_str!("../presets/lattice-35Er.conf")),
        "lattice-175Er" => Ok(include_str!("../presets/lattice-175Er.conf")),
        "lattice-350Er" => Ok(include_str!("../presets/lattice-350Er.conf")),
        "crossed-beam-rb" => Ok(include_str!("../presets/crossed-beam-rb.conf")),
        other => Err(CliError::Usage(format!(
            "unknown preset `{other}`; expected lattice-35Er, lattice-175Er, \
             lattice-350Er, or crossed-beam-rb (or use --spec FILE)"
        ))),
    }
}

fn write_lattice_report<W: Write>(out: &mut W, d: &LatticeDerived) -> io::Result<()> {
    writeln!(out, "kind = lattice")?;
    writeln!(out, "wavelength_m = {}", csv_float(d.wavelength))?;
    writeln!(out, "mass_kg = {}", csv_float(d.mass))?;
    writeln!(out, "alpha = {}", csv_float(d.alpha))?;
    writeln!(out, "wavenumber_per_m = {}", csv_float(d.wavenumber))?;
    writeln!(out, "recoil_energy_J = {}", csv_float(d.recoil_energy))?;
    writeln!(out, "depth_J = {}", csv_float(d.depth_joules))?;
    writeln!(out, "depth_Er = {}", csv_float(d.depth_recoils))?;
    writeln!(out, "omega0_rad_per_s = {}", csv_float(d.omega0))?;
    writeln!(out, "beta_phys_J_per_m4 = {}", csv_float(d.beta_phys))?;
    writeln!(out, "beta = {}", csv_float(d.beta))?;
    writeln!(out, "displacement = {}", csv_float(d.displacement))?;
    writeln!(out, "displacement_m = {}", csv_float(d.displacement_phys))?;
    writeln!(out, "t_osc = {}", csv_float(d.t_osc))?;
    writeln!(out, "t_r = {}", csv_float(d.t_r))?;
    writeln!(out, "t_c = {}", csv_float(d.t_c))?;
    writeln!(out, "ratio_t_r_t_c = {}", csv_float(d.ratio_t_r_t_c))?;
    writeln!(out, "t_osc_s = {}", csv_float(d.t_osc_phys))?;
    writeln!(out, "t_r_s = {}", csv_float(d.t_r_phys))?;
    writeln!(out, "t_c_s = {}", csv_float(d.t_c_phys))?;
    Ok(())
}

fn write_confinement_report<W: Write>(
    out: &mut W,
    conf: &Confinement,
    shift: &ConfinementShift,
    cubic: f64,
) -> io::Result<()> {
    writeln!(out, "omega_ext_rad_per_s = {}", csv_float(conf.omega_ext))?;
    writeln!(out, "site_index = {}", conf.site_index)?;
    writeln!(out, "delta_exact = {}", csv_float(shift.delta_exact))?;
    writeln!(out, "delta_approx = {}", csv_float(shift.delta_approx))?;
    writeln!(
        out,
        "shifted_minimum_m = {}",
        csv_float(shift.shifted_minimum)
    )?;
    writeln!(out, "cubic_coefficient_J_per_m3 = {}", csv_float(cubic))?;
    Ok(())
}

fn write_trap_report<W: Write>(
    out: &mut W,
    trap: &TrapSpec,
    limits: &TrapLimits,
) -> io::Result<()> {
    writeln!(out, "kind = crossed-beam")?;
    writeln!(out, "omega_z_rad_per_s = {}", csv_float(trap.omega_z))?;
    writeln!(out, "omega_x_rad_per_s = {}", csv_float(trap.omega_x))?;
    writeln!(out, "beta = {}", csv_float(trap.beta))?;
    writeln!(out, "n_max_raw = {}", csv_float(limits.n_max_raw))?;
    writeln!(out, "n_max = {}", limits.n_max)?;
    writeln!(out, "gamma_max = {}", csv_float(limits.gamma_max))?;
    writeln!(out, "d_max = {}", csv_float(limits.d_max))?;
    writeln!(out, "t_r_s = {}", csv_float(limits.t_r_phys))?;
    Ok(())
}

fn run_envelope_report(args: EnvelopeReportArgs) -> Result<(), CliError> {
    let model = EnvelopeModel::new(args.beta, args.displacement, args.order.into())?;
    let mut out = open_output(&args.output)?;
    writeln!(out, "# tool: revival-sim {VERSION} envelope-report")?;
    write!(out, "{}", model.report())?;
    out.flush()?;
    Ok(())
}
