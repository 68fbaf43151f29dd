//! Acceptance gate: one test per criterion.  Each prints a single
//! `[criterion NN] PASS/FAIL — …` line carrying the measured numbers, then
//! asserts, so `cargo test --test acceptance -- --nocapture` reads as a
//! checklist.

use std::process::Command;

use revival_core::dynamics::{
    expectation_exact, expectation_series, CoherentState, ExactEvolution,
};
use revival_core::envelope::{gap, EnvelopeModel, EnvelopeOrder};
use revival_core::experiments::{lattice_derive, trap_limits, LatticeSpec, TrapSpec, RB87_MASS};
use revival_core::spectrum::{
    action_of_energy_quadrature, action_of_energy_series, exact_spectrum, perturbation_level,
    wkb_level, wkb_table, PtOrder,
};

const PI: f64 = std::f64::consts::PI;

fn verdict(criterion: usize, ok: bool, detail: &str) -> bool {
    println!(
        "[criterion {criterion:02}] {} — {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    ok
}

fn rel_err(value: f64, reference: f64) -> f64 {
    (value - reference).abs() / reference.abs()
}

fn rb_lattice(depth_recoils: f64) -> LatticeSpec {
    LatticeSpec {
        depth: depth_recoils,
        depth_in_recoils: true,
        wavelength: 838e-9,
        mass: RB87_MASS,
        alpha: 0.25,
    }
}

#[test]
// The reference table quotes T_osc rounded to 6.28; that literal is a quoted
// figure, not a stand-in for TAU.
#[allow(clippy::approx_constant)]
fn criterion_01_lattice_golden_values() {
    let d = lattice_derive(&rb_lattice(35.0)).unwrap();
    let precise = [
        ("|beta|", d.beta.abs(), 0.0398),
        ("d", d.displacement, 1.61),
        ("omega0", d.omega0, 1.719e5),
        ("K", d.depth_joules, 7.581e-29),
        ("T_r", d.t_r, 210.3),
        ("T_c", d.t_c, 41.67),
        ("T_osc", d.t_osc, 6.28),
        ("d_m", d.displacement_phys, 0.105e-6),
    ];
    let mut ok = true;
    let mut worst = 0.0f64;
    for (name, value, quoted) in precise {
        let err = rel_err(value, quoted);
        worst = worst.max(err);
        if err > 0.01 {
            ok = false;
            println!("  {name}: {value} vs quoted {quoted} ({:.3}%)", err * 100.0);
        }
    }
    // The three laboratory times are quoted to two significant digits, so
    // 1% of the quote is below the quantization step; compare within one
    // unit in the last quoted digit instead.
    let rounded = [
        ("T_r_s", d.t_r_phys, 1.2e-3, 0.1e-3),
        ("T_c_s", d.t_c_phys, 0.24e-3, 0.01e-3),
        ("T_osc_s", d.t_osc_phys, 36e-6, 1e-6),
    ];
    for (name, value, quoted, unit) in rounded {
        if (value - quoted).abs() > unit {
            ok = false;
            println!("  {name}: {value} vs quoted {quoted} (unit {unit})");
        }
    }
    ok &= rel_err(d.t_r_phys * d.omega0, d.t_r) <= 1e-12;
    assert!(verdict(
        1,
        ok,
        &format!(
            "35Er lattice: worst precise rel err {:.2e}; rounded times within one unit \
             of the last quoted digit (T_r'={:.4} ms, T_c'={:.3} ms, T_osc'={:.1} us)",
            worst,
            d.t_r_phys * 1e3,
            d.t_c_phys * 1e3,
            d.t_osc_phys * 1e6
        )
    ));
}

#[test]
fn criterion_02_depth_sweep() {
    let shallow = lattice_derive(&rb_lattice(35.0)).unwrap();
    let medium = lattice_derive(&rb_lattice(175.0)).unwrap();
    let deep = lattice_derive(&rb_lattice(350.0)).unwrap();
    let err_medium = rel_err(medium.beta.abs(), 0.0178);
    let err_deep = rel_err(deep.beta.abs(), 0.0126);
    let identical = shallow.t_r_phys.to_bits() == medium.t_r_phys.to_bits()
        && shallow.t_r_phys.to_bits() == deep.t_r_phys.to_bits();
    let ok = err_medium <= 0.01 && err_deep <= 0.01 && identical;
    assert!(verdict(
        2,
        ok,
        &format!(
            "|beta| = {:.5} (175Er, {:.2}% off quote) and {:.5} (350Er, {:.2}% off); \
             T_r' bit-identical across depths: {identical}",
            medium.beta.abs(),
            err_medium * 100.0,
            deep.beta.abs(),
            err_deep * 100.0
        )
    ));
}

#[test]
fn criterion_03_crossed_beam_limits() {
    let limits = trap_limits(&TrapSpec {
        omega_z: 5.36e4,
        omega_x: 1.04e6,
        beta: 3.47e-5,
    })
    .unwrap();
    let tr_err = rel_err(limits.t_r_phys, 4.37);
    let ok = limits.n_max == 19
        && (limits.gamma_max - 3.11).abs() <= 0.01
        && (limits.d_max - 4.4).abs() <= 0.05
        && tr_err <= 0.05;
    assert!(verdict(
        3,
        ok,
        &format!(
            "n_max = {}, gamma_max = {:.4}, d_max = {:.4}; T_r' = {:.4} s, {:.1}% above \
             the quoted 4.37 s (the quote evaluates the same formula at lower precision)",
            limits.n_max,
            limits.gamma_max,
            limits.d_max,
            limits.t_r_phys,
            tr_err * 100.0
        )
    ));
}

#[test]
fn criterion_04_spectrum_accuracy_crossover() {
    let beta = 1e-4;
    let table = exact_spectrum(beta, 400).unwrap();
    assert!(table.valid_up_to >= 30);
    let mut ok = true;
    let mut wkb_min = f64::MAX;
    let mut wkb_max: f64 = 0.0;
    let mut pt_min = f64::MAX;
    let mut pt_max: f64 = 0.0;
    let mut closer = 0usize;
    for n in 5..=30 {
        let exact = table.levels[n];
        let wkb_err = (wkb_level(n, beta) - exact).abs();
        let pt_err = (perturbation_level(n, beta, PtOrder::Second) - exact).abs();
        wkb_min = wkb_min.min(wkb_err);
        wkb_max = wkb_max.max(wkb_err);
        pt_min = pt_min.min(pt_err);
        pt_max = pt_max.max(pt_err);
        if wkb_err < pt_err {
            closer += 1;
        } else {
            ok = false;
        }
    }
    assert!(verdict(
        4,
        ok,
        &format!(
            "WKB closer than PT2 for {closer}/26 levels in n ∈ [5,30]; measured \
             |E_WKB − E_exact| ∈ [{wkb_min:.2e}, {wkb_max:.2e}] (constant offset 3β/32 = {:.2e}) \
             vs |E_PT2 − E_exact| ∈ [{pt_min:.2e}, {pt_max:.2e}]: the quantized-action series \
             carries a beta-order offset at this order, so it cannot beat second-order \
             perturbation theory at beta = 1e-4 for any n in the window",
            3.0 * beta / 32.0
        )
    ));
}

#[test]
fn criterion_05_displaced_state_collapse_and_revival() {
    let beta = 1e-4;
    let displacement = 4.0;
    let truncation = 64;
    let model = EnvelopeModel::new(beta, displacement, EnvelopeOrder::SecondOrderBeta).unwrap();

    let span = 2.2 * 8.0 * PI / (3.0 * beta);
    let samples = (span * 40.0 / (2.0 * PI)).ceil() as usize + 1;
    let times: Vec<f64> = (0..samples)
        .map(|i| span * i as f64 / (samples - 1) as f64)
        .collect();
    let exact = expectation_exact(beta, displacement, truncation, &times).unwrap();

    let ok_a = (exact.x[0] - displacement).abs() < 1e-6;

    let mut ok_b = true;
    let mut worst_excess = f64::NEG_INFINITY;
    for (i, &t) in times.iter().enumerate().take(samples - 1).skip(1) {
        let v = exact.x[i].abs();
        if v >= exact.x[i - 1].abs() && v >= exact.x[i + 1].abs() {
            let excess = v - model.envelope_value(t) - 0.05 * displacement;
            worst_excess = worst_excess.max(excess);
            if excess > 0.0 {
                ok_b = false;
            }
        }
    }

    let flat_lo = 2.0 * model.t_c;
    let flat_hi = model.t_r - 2.0 * model.t_c;
    let mut flat_max: f64 = 0.0;
    for (i, &t) in times.iter().enumerate().step_by(7) {
        if t >= flat_lo && t <= flat_hi {
            flat_max = flat_max.max(exact.x[i].abs());
        }
    }
    let ok_c = flat_max < 0.1 * displacement;

    let mut revival_max: f64 = 0.0;
    for (i, &t) in times.iter().enumerate() {
        if (t - model.t_r).abs() <= 2.0 * model.t_osc {
            revival_max = revival_max.max(exact.x[i].abs());
        }
    }
    let ok_d = revival_max >= 0.9 * displacement;

    let collapse_end = times.partition_point(|&t| t <= 2.0 * model.t_c);
    let state = CoherentState::new(displacement, truncation).unwrap();
    let spectrum = wkb_table(beta, truncation).unwrap();
    let series = expectation_series(&state, &spectrum, &times[..collapse_end]).unwrap();
    let mut series_dev: f64 = 0.0;
    for i in 0..collapse_end {
        series_dev = series_dev.max((series.x[i] - exact.x[i]).abs());
    }
    let ok_e = series_dev <= 0.05 * displacement;

    let ok = ok_a && ok_b && ok_c && ok_d && ok_e;
    assert!(verdict(
        5,
        ok,
        &format!(
            "(a) x(0) = {:.8} [{}]; (b) local maxima vs envelope, worst excess {:.3} [{}]; \
             (c) flat-window max |x| = {:.4} < 0.4 [{}]; (d) revival max |x| = {:.4} >= 3.6 [{}]; \
             (e) series-vs-exact max dev over first collapse = {:.4} <= 0.2 [{}]",
            exact.x[0],
            ok_a,
            worst_excess,
            ok_b,
            flat_max,
            ok_c,
            revival_max,
            ok_d,
            series_dev,
            ok_e
        )
    ));
}

#[test]
fn criterion_06_harmonic_limit() {
    let evolution = ExactEvolution::new(0.0, 4.0, 57).unwrap();
    let mut worst_x: f64 = 0.0;
    let mut worst_p: f64 = 0.0;
    let mut worst_norm: f64 = 0.0;
    let mut worst_energy: f64 = 0.0;
    let e0 = evolution.energy_at(0.0);
    let samples = 2001;
    for i in 0..samples {
        let t = 20.0 * PI * i as f64 / (samples - 1) as f64;
        let (x, p) = evolution.xp_at(t);
        worst_x = worst_x.max((x - 4.0 * t.cos()).abs());
        worst_p = worst_p.max((p + 4.0 * t.sin()).abs());
        worst_norm = worst_norm.max((evolution.norm_at(t) - 1.0).abs());
        worst_energy = worst_energy.max((evolution.energy_at(t) - e0).abs() / e0);
    }
    let ok = worst_x < 1e-8 && worst_p < 1e-8 && worst_norm < 1e-10 && worst_energy < 1e-9;
    assert!(verdict(
        6,
        ok,
        &format!(
            "over ten periods: max |x − 4cos t| = {worst_x:.2e}, max |p + 4sin t| = {worst_p:.2e}, \
             norm drift {worst_norm:.2e}, energy drift {worst_energy:.2e}"
        )
    ));
}

#[test]
fn criterion_07_poisson_occupation() {
    let state = CoherentState::new(4.0, 60).unwrap();
    let (mean, variance) = state.occupation_stats();
    let ok = (mean - 8.0).abs() < 1e-6 && (variance - 8.0).abs() < 1e-6;
    assert!(verdict(
        7,
        ok,
        &format!("d = 4 at N = 60: occupation mean = {mean:.9}, variance = {variance:.9}")
    ));
}

#[test]
fn criterion_08_algebraic_identities() {
    let mut ok = true;

    let mut worst_ratio: f64 = 0.0;
    for (beta, displacement) in [(1e-4, 4.0), (0.0398, 1.61), (0.0178, 2.41), (-0.01, 3.0)] {
        for order in [EnvelopeOrder::LeadingBeta, EnvelopeOrder::SecondOrderBeta] {
            let model = EnvelopeModel::new(beta, displacement, order).unwrap();
            let err = rel_err(model.t_r / model.t_c, PI * displacement);
            worst_ratio = worst_ratio.max(err);
        }
    }
    ok &= worst_ratio <= 1e-12;

    let mut worst_gap: f64 = 0.0;
    for &beta in &[1e-4, 0.0398, -0.0398, 0.3] {
        for n in 0..60 {
            let difference = wkb_level(n + 1, beta) - wkb_level(n, beta);
            let g = gap(n as f64, beta);
            worst_gap = worst_gap.max((g - difference).abs() / g.abs().max(1.0));
        }
    }
    ok &= worst_gap <= 1e-12;

    let mut worst_shift: f64 = 0.0;
    for (beta, displacement) in [(1e-4, 4.0), (0.0398, 1.61), (-0.01, 3.0)] {
        let lead = EnvelopeModel::new(beta, displacement, EnvelopeOrder::LeadingBeta).unwrap();
        let second =
            EnvelopeModel::new(beta, displacement, EnvelopeOrder::SecondOrderBeta).unwrap();
        let expected = (17.0 * PI / 3.0) * (1.0 + lead.n_bar) * beta.signum();
        worst_shift = worst_shift.max(rel_err(second.t_r - lead.t_r, expected));
    }
    ok &= worst_shift <= 1e-9;

    assert!(verdict(
        8,
        ok,
        &format!(
            "T_r/T_c vs pi*d worst rel err {worst_ratio:.2e}; gap vs WKB difference worst \
             {worst_gap:.2e}; order shift vs (17pi/3)(1+n_bar) worst rel err {worst_shift:.2e}"
        )
    ));
}

#[test]
fn criterion_09_action_scaling_order() {
    let mut ok = true;
    let mut ratio_min = f64::MAX;
    let mut ratio_max: f64 = 0.0;
    for &beta in &[1e-4, 1e-3, 1e-2] {
        for &energy in &[1.0, 5.0, 10.0] {
            let dev = |b: f64| {
                (action_of_energy_quadrature(energy, b).unwrap()
                    - action_of_energy_series(energy, b))
                .abs()
            };
            let ratio = dev(beta) / dev(beta / 2.0);
            ratio_min = ratio_min.min(ratio);
            ratio_max = ratio_max.max(ratio);
            if !(7.0..=9.0).contains(&ratio) {
                ok = false;
                println!("  beta={beta}, E={energy}: ratio {ratio:.3}");
            }
        }
    }
    assert!(verdict(
        9,
        ok,
        &format!(
            "deviation ratio when beta halves ∈ [{ratio_min:.3}, {ratio_max:.3}] over \
             beta ∈ {{1e-4,1e-3,1e-2}} × E ∈ {{1,5,10}} (pure beta^3 gives 8)"
        )
    ));
}

#[test]
fn criterion_10_deterministic_csv() {
    let binary = env!("CARGO_BIN_EXE_revival-sim");
    let run = |threads: &str| {
        let out = Command::new(binary)
            .args([
                "evolve",
                "--preset",
                "fig1",
                "--samples",
                "40001",
                "--threads",
                threads,
            ])
            .env_remove("REVIVAL_SIM_THREADS")
            .output()
            .expect("binary runs");
        assert!(out.status.success(), "exit {:?}", out.status.code());
        out.stdout
    };
    let first = run("1");
    let second = run("1");
    let multi = run("3");
    let ok = first == second && first == multi && !first.is_empty();
    assert!(verdict(
        10,
        ok,
        &format!(
            "fig1 preset, 40001 samples: repeat run identical: {}; 3-thread run identical: {} \
             ({} bytes)",
            first == second,
            first == multi,
            first.len()
        )
    ));
}
