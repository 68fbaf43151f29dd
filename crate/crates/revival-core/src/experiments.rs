//! Parameter pipelines for two cold-atom realizations of the weakly
//! anharmonic oscillator: a single site of a one-dimensional optical
//! lattice, and the axial direction of a crossed-beam dipole trap.
//!
//! The lattice pipeline turns laboratory inputs (depth, wavelength, atomic
//! mass, displacement fraction) into the dimensionless model parameters
//! `beta` and `displacement` together with the oscillation, collapse, and
//! revival times in both dimensionless and SI form.  A sinusoidal potential
//! of depth `K`, expanded about a well minimum, has quartic coefficient
//! `-K q^4 / 24`, i.e. `beta_phys = -K q^4 / 6` in the convention
//! `V = (m w0^2/2) x^2 + (beta_phys/4) x^4`; the dimensionless anharmonicity
//! is always negative and shrinks as the lattice gets deeper.
//!
//! The crossed-beam pipeline bounds the usable displacement from the trap
//! anisotropy: energy levels above `omega_x / omega_z` leak into the
//! transverse direction, which caps the Poisson occupation spread of a
//! coherent state and hence the kick size.
//!
//! A small third group of helpers quantifies how a weak external harmonic
//! confinement superimposed on the lattice shifts well minima off the
//! sinusoidal extrema and thereby seeds odd (cubic) corrections that are
//! absent in the ideal lattice.

use crate::units::{PhysicalScale, HBAR};
use crate::{Error, Result};

/// Mass of rubidium-87 in kilograms.
pub const RB87_MASS: f64 = 1.4432e-25;

/// Laboratory description of a one-dimensional optical lattice site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSpec {
    /// Lattice depth, in joules, or in recoil energies when
    /// `depth_in_recoils` is set.
    pub depth: f64,
    /// Interpret `depth` as a multiple of the recoil energy.
    pub depth_in_recoils: bool,
    /// Lattice laser wavelength in meters.
    pub wavelength: f64,
    /// Atomic mass in kilograms.
    pub mass: f64,
    /// Initial displacement as a fraction of the half lattice period:
    /// the atom starts `alpha * wavelength / 2` from the well minimum.
    /// Must lie strictly between 0 and 1/2 so the starting point stays
    /// on the near side of the neighboring barrier.
    pub alpha: f64,
}

/// Derived single-well model parameters and time scales for a lattice site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeDerived {
    /// Lattice wavenumber `q = 2 pi / wavelength` in 1/m.
    pub wavenumber: f64,
    /// Photon recoil energy `hbar^2 q^2 / (2 m)` in joules.
    pub recoil_energy: f64,
    /// Lattice depth in joules.
    pub depth_joules: f64,
    /// Lattice depth in recoil energies.
    pub depth_recoils: f64,
    /// Small-oscillation angular frequency `sqrt(K/m) q` in rad/s.
    pub omega0: f64,
    /// Quartic coefficient `-K q^4 / 6` in J/m^4.
    pub beta_phys: f64,
    /// Dimensionless anharmonicity (negative for a lattice).
    pub beta: f64,
    /// Dimensionless initial displacement.
    pub displacement: f64,
    /// Initial displacement in meters.
    pub displacement_phys: f64,
    /// Dimensionless oscillation period (2 pi up to rounding).
    pub t_osc: f64,
    /// Dimensionless revival time `8 pi / (3 |beta|)`.
    pub t_r: f64,
    /// Dimensionless collapse time `t_r / (pi d)`.
    pub t_c: f64,
    /// Oscillation period in seconds.
    pub t_osc_phys: f64,
    /// Revival time in seconds; depends only on mass and wavelength.
    pub t_r_phys: f64,
    /// Collapse time in seconds.
    pub t_c_phys: f64,
    /// Ratio of revival to collapse time (equals `pi * displacement`).
    pub ratio_t_r_t_c: f64,
    /// Atomic mass in kilograms, copied from the input.
    pub mass: f64,
    /// Laser wavelength in meters, copied from the input.
    pub wavelength: f64,
    /// Displacement fraction, copied from the input.
    pub alpha: f64,
}

impl LatticeDerived {
    /// Unit system of the derived single-well oscillator.
    pub fn scale(&self) -> PhysicalScale {
        PhysicalScale::new(self.mass, self.omega0)
            .expect("derived lattice frequency is positive and finite")
    }
}

fn check_positive(what: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() || value <= 0.0 {
        return Err(Error::InvalidInput { what, value });
    }
    Ok(())
}

/// Derives single-well model parameters and time scales from a lattice
/// description.
///
/// The closed forms below follow from `K = depth`, `q = 2 pi / wavelength`,
/// `omega0 = sqrt(K/m) q`, and the unit system of `PhysicalScale`:
///
/// - `beta = -q hbar / (6 sqrt(m K))`
/// - `displacement = alpha pi (K m)^(1/4) / sqrt(q hbar)`
/// - `t_r_phys = 16 pi m / (q^2 hbar)`, independent of the depth
/// - `t_c_phys = (16 / (alpha pi)) (m^3 / (hbar^2 K q^6))^(1/4)`
/// - `t_osc_phys = (2 pi / q) sqrt(m / K)`
///
/// # Errors
///
/// Returns [`Error::InvalidInput`] for non-positive or non-finite depth,
/// wavelength, or mass, and [`Error::InvalidAlpha`] unless
/// `0 < alpha < 1/2`.
pub fn lattice_derive(spec: &LatticeSpec) -> Result<LatticeDerived> {
    check_positive("lattice depth", spec.depth)?;
    check_positive("lattice wavelength", spec.wavelength)?;
    check_positive("atomic mass", spec.mass)?;
    if !spec.alpha.is_finite() || spec.alpha <= 0.0 || spec.alpha >= 0.5 {
        return Err(Error::InvalidAlpha { alpha: spec.alpha });
    }

    let q = 2.0 * std::f64::consts::PI / spec.wavelength;
    let m = spec.mass;
    let recoil_energy = HBAR * HBAR * q * q / (2.0 * m);
    let (depth_joules, depth_recoils) = if spec.depth_in_recoils {
        (spec.depth * recoil_energy, spec.depth)
    } else {
        (spec.depth, spec.depth / recoil_energy)
    };
    let k = depth_joules;
    let omega0 = (k / m).sqrt() * q;
    let beta_phys = -k * q.powi(4) / 6.0;
    let beta = -q * HBAR / (6.0 * (m * k).sqrt());
    let displacement = spec.alpha * std::f64::consts::PI * (k * m).powf(0.25) / (q * HBAR).sqrt();
    let displacement_phys = spec.alpha * std::f64::consts::PI / q;
    let t_r_phys = 16.0 * std::f64::consts::PI * m / (q * q * HBAR);
    let t_c_phys = (16.0 / (spec.alpha * std::f64::consts::PI))
        * (m.powi(3) / (HBAR * HBAR * k * q.powi(6))).powf(0.25);
    let t_osc_phys = (2.0 * std::f64::consts::PI / q) * (m / k).sqrt();
    let t_osc = t_osc_phys * omega0;
    let t_r = t_r_phys * omega0;
    let t_c = t_c_phys * omega0;

    Ok(LatticeDerived {
        wavenumber: q,
        recoil_energy,
        depth_joules,
        depth_recoils,
        omega0,
        beta_phys,
        beta,
        displacement,
        displacement_phys,
        t_osc,
        t_r,
        t_c,
        t_osc_phys,
        t_r_phys,
        t_c_phys,
        ratio_t_r_t_c: t_r / t_c,
        mass: m,
        wavelength: spec.wavelength,
        alpha: spec.alpha,
    })
}

/// Crossed-beam dipole trap with a weak axial and a tight transverse
/// direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapSpec {
    /// Axial (weak) angular frequency in rad/s.
    pub omega_z: f64,
    /// Transverse (tight) angular frequency in rad/s.
    pub omega_x: f64,
    /// Dimensionless anharmonicity of the axial direction.
    pub beta: f64,
}

/// Displacement bounds imposed by the finite transverse confinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapLimits {
    /// Frequency ratio `omega_x / omega_z` before truncation.
    pub n_max_raw: f64,
    /// Highest axial level that stays below the first transverse excitation.
    pub n_max: usize,
    /// Largest coherent-state parameter whose mean-plus-spread occupation
    /// `gamma^2 + 3 gamma` still fits below `n_max`.
    pub gamma_max: f64,
    /// Largest usable displacement, `sqrt(2) * gamma_max`.
    pub d_max: f64,
    /// Revival time in seconds, `(8 pi / (3 |beta|)) / omega_z`.
    pub t_r_phys: f64,
}

/// Bounds the usable displacement of a crossed-beam trap.
///
/// Axial levels with `n > omega_x / omega_z` are degenerate with transverse
/// excitations and leak out of the one-dimensional description.  A coherent
/// state with parameter `gamma` occupies levels up to roughly
/// `gamma^2 + 3 gamma`, so the largest safe parameter solves
/// `gamma^2 + 3 gamma = floor(n_max)`.
///
/// # Errors
///
/// Returns [`Error::InvalidTrap`] unless `0 < omega_z < omega_x`, and
/// [`Error::InvalidInput`] for a zero or non-finite `beta`.
pub fn trap_limits(spec: &TrapSpec) -> Result<TrapLimits> {
    if !spec.omega_z.is_finite()
        || !spec.omega_x.is_finite()
        || spec.omega_z <= 0.0
        || spec.omega_x <= spec.omega_z
    {
        return Err(Error::InvalidTrap {
            omega_z: spec.omega_z,
            omega_x: spec.omega_x,
        });
    }
    if !spec.beta.is_finite() || spec.beta == 0.0 {
        return Err(Error::InvalidInput {
            what: "trap anharmonicity",
            value: spec.beta,
        });
    }

    let n_max_raw = spec.omega_x / spec.omega_z;
    let n_max = n_max_raw.floor() as usize;
    let gamma_max = (-3.0 + (9.0 + 4.0 * n_max as f64).sqrt()) / 2.0;
    let d_max = std::f64::consts::SQRT_2 * gamma_max;
    let t_r_phys = 8.0 * std::f64::consts::PI / (3.0 * spec.beta.abs()) / spec.omega_z;

    Ok(TrapLimits {
        n_max_raw,
        n_max,
        gamma_max,
        d_max,
        t_r_phys,
    })
}

/// Weak external harmonic confinement superimposed on a lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfinementSpec {
    /// External confinement angular frequency in rad/s (may be zero).
    pub omega_ext: f64,
    /// On-site angular frequency of the bare lattice in rad/s.
    pub omega0: f64,
}

/// Displacement of a lattice well minimum caused by external confinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfinementShift {
    /// Fractional shift `omega_ext^2 / (omega_ext^2 + omega0^2)` of the
    /// minimum toward the trap center.
    pub delta_exact: f64,
    /// Leading-order approximation `(omega_ext / omega0)^2`.
    pub delta_approx: f64,
    /// Position of the shifted minimum in meters.
    pub shifted_minimum: f64,
}

fn check_confinement(spec: &ConfinementSpec) -> Result<()> {
    if !spec.omega0.is_finite() || spec.omega0 <= 0.0 {
        return Err(Error::InvalidInput {
            what: "lattice site frequency",
            value: spec.omega0,
        });
    }
    if !spec.omega_ext.is_finite() || spec.omega_ext < 0.0 || spec.omega_ext >= spec.omega0 {
        return Err(Error::InvalidInput {
            what: "external confinement frequency",
            value: spec.omega_ext,
        });
    }
    Ok(())
}

/// Computes the confinement-induced shift of the minimum of lattice site
/// `site_index` (0 at the trap center, minima spaced by half a wavelength).
///
/// # Errors
///
/// Returns [`Error::InvalidInput`] for a non-positive `omega0`, an
/// `omega_ext` outside `[0, omega0)`, or a non-positive wavelength.
pub fn confinement_shift(
    spec: &ConfinementSpec,
    site_index: usize,
    wavelength: f64,
) -> Result<ConfinementShift> {
    check_confinement(spec)?;
    check_positive("lattice wavelength", wavelength)?;

    let we2 = spec.omega_ext * spec.omega_ext;
    let w02 = spec.omega0 * spec.omega0;
    let delta_exact = we2 / (we2 + w02);
    let delta_approx = we2 / w02;
    let site_position = site_index as f64 * wavelength / 2.0;

    Ok(ConfinementShift {
        delta_exact,
        delta_approx,
        shifted_minimum: site_position * (1.0 - delta_exact),
    })
}

/// Cubic coefficient, in J/m^3, of the on-site potential expanded about the
/// shifted minimum of lattice site `site_index`.
///
/// At a shifted minimum the odd third derivative of the sinusoidal lattice
/// no longer vanishes; to first order in the shift `s = delta * site
/// position` the expansion acquires a term `(1/6) m omega0^2 q^2 s * u^3`.
///
/// # Errors
///
/// Returns [`Error::InvalidInput`] under the same conditions as
/// [`confinement_shift`], or for a non-positive mass.
pub fn cubic_correction_coefficient(
    spec: &ConfinementSpec,
    mass: f64,
    site_index: usize,
    wavelength: f64,
) -> Result<f64> {
    check_positive("atomic mass", mass)?;
    let shift = confinement_shift(spec, site_index, wavelength)?;
    let q = 2.0 * std::f64::consts::PI / wavelength;
    let site_position = site_index as f64 * wavelength / 2.0;
    let s = shift.delta_exact * site_position;
    Ok(mass * spec.omega0 * spec.omega0 * q * q * s / 6.0)
}
