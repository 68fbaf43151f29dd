//! Conversions between laboratory (SI) quantities and the dimensionless
//! oscillator model.
//!
//! The model Hamiltonian is written in units where the harmonic part is
//! `p^2/2 + x^2/2`: lengths are measured in `sqrt(hbar / (m omega0))`, times
//! in `1/omega0`, momenta in `sqrt(hbar m omega0)`, and energies in
//! `hbar omega0`.  A physical quartic coefficient `beta'` (in J/m^4, from
//! `H' = ... + (beta'/4) x'^4`) maps to the dimensionless
//! `beta = beta' hbar / (m^2 omega0^3)`.

use crate::{Error, Result};

/// Reduced Planck constant in J s (2018 CODATA exact value).
pub const HBAR: f64 = 1.054571817e-34;

/// Hard upper bound on `|beta|`: beyond this the quartic term is not a small
/// correction at the low-lying levels and every series used here is
/// meaningless.
pub const BETA_CAP: f64 = 0.5;

/// Soft guide for `|beta|` below which the second-order level series is
/// comfortably accurate for the moderately excited states the dynamics
/// explores.
pub const BETA_SERIES_GUIDE: f64 = 0.1;

/// Mass and trap frequency fixing the dimensionless unit system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalScale {
    /// Particle mass in kg.
    pub mass: f64,
    /// Harmonic (angular) trap frequency in rad/s.
    pub trap_frequency: f64,
    /// Reduced Planck constant in J s; [`HBAR`] unless overridden.
    pub hbar: f64,
}

impl PhysicalScale {
    /// Scale with the physical [`HBAR`].
    ///
    /// # Errors
    ///
    /// Rejects non-finite or non-positive mass and frequency.
    pub fn new(mass: f64, trap_frequency: f64) -> Result<Self> {
        Self::with_hbar(mass, trap_frequency, HBAR)
    }

    /// Scale with an explicit `hbar`, mainly for unit-free test setups.
    pub fn with_hbar(mass: f64, trap_frequency: f64, hbar: f64) -> Result<Self> {
        if !mass.is_finite() || mass <= 0.0 {
            return Err(Error::InvalidInput {
                what: "mass",
                value: mass,
            });
        }
        if !trap_frequency.is_finite() || trap_frequency <= 0.0 {
            return Err(Error::InvalidInput {
                what: "trap frequency",
                value: trap_frequency,
            });
        }
        if !hbar.is_finite() || hbar <= 0.0 {
            return Err(Error::InvalidInput {
                what: "hbar",
                value: hbar,
            });
        }
        Ok(PhysicalScale {
            mass,
            trap_frequency,
            hbar,
        })
    }

    /// Oscillator length `sqrt(hbar / (m omega0))` in meters.
    pub fn length_unit(&self) -> f64 {
        (self.hbar / (self.mass * self.trap_frequency)).sqrt()
    }

    /// Oscillator momentum `sqrt(hbar m omega0)` in kg m/s.
    pub fn momentum_unit(&self) -> f64 {
        (self.hbar * self.mass * self.trap_frequency).sqrt()
    }

    /// Oscillator energy `hbar omega0` in joules.
    pub fn energy_unit(&self) -> f64 {
        self.hbar * self.trap_frequency
    }

    pub fn length_to_dimensionless(&self, meters: f64) -> f64 {
        meters / self.length_unit()
    }

    pub fn length_to_physical(&self, x: f64) -> f64 {
        x * self.length_unit()
    }

    pub fn time_to_dimensionless(&self, seconds: f64) -> f64 {
        seconds * self.trap_frequency
    }

    pub fn time_to_physical(&self, t: f64) -> f64 {
        t / self.trap_frequency
    }

    pub fn momentum_to_dimensionless(&self, kg_m_per_s: f64) -> f64 {
        kg_m_per_s / self.momentum_unit()
    }

    pub fn momentum_to_physical(&self, p: f64) -> f64 {
        p * self.momentum_unit()
    }

    pub fn energy_to_dimensionless(&self, joules: f64) -> f64 {
        joules / self.energy_unit()
    }

    pub fn energy_to_physical(&self, e: f64) -> f64 {
        e * self.energy_unit()
    }

    /// Dimensionless quartic coefficient from a physical one in J/m^4.
    pub fn beta_to_dimensionless(&self, joules_per_m4: f64) -> f64 {
        joules_per_m4 * self.hbar / (self.mass * self.mass * self.trap_frequency.powi(3))
    }

    /// Physical quartic coefficient in J/m^4 from the dimensionless one.
    pub fn beta_to_physical(&self, beta: f64) -> f64 {
        beta * self.mass * self.mass * self.trap_frequency.powi(3) / self.hbar
    }
}

/// Dimensionless inputs of a simulation run: the quartic strength and the
/// initial displacement of the coherent state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub beta: f64,
    pub displacement: f64,
}

impl ModelParams {
    /// Validates that `beta` is finite and within [`BETA_CAP`], and that the
    /// displacement is finite.
    ///
    /// # Errors
    ///
    /// [`Error::BetaOutOfRange`] if `|beta| > BETA_CAP`;
    /// [`Error::InvalidInput`] on non-finite values.
    pub fn new(beta: f64, displacement: f64) -> Result<Self> {
        if !beta.is_finite() {
            return Err(Error::InvalidInput {
                what: "beta",
                value: beta,
            });
        }
        if beta.abs() > BETA_CAP {
            return Err(Error::BetaOutOfRange { beta });
        }
        if !displacement.is_finite() {
            return Err(Error::InvalidInput {
                what: "displacement",
                value: displacement,
            });
        }
        Ok(ModelParams { beta, displacement })
    }

    /// Whether `|beta|` sits below the soft series-accuracy guide.
    pub fn beta_in_series_regime(&self) -> bool {
        self.beta.abs() <= BETA_SERIES_GUIDE
    }
}
