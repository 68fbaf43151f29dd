//! Spectra, coherent-state dynamics, and analytic revival envelopes for the
//! weakly anharmonic oscillator
//!
//! ```text
//! H = p^2/2 + x^2/2 + (beta/4) x^4,    |beta| << 1,
//! ```
//!
//! in dimensionless oscillator units (unit mass, unit harmonic frequency,
//! hbar = 1).
//!
//! A ground state displaced by `d` evolves as a wave packet whose centre
//! oscillates, collapses as the anharmonic level spacings dephase, and
//! revives when the quadratic part of the accumulated phases realigns.  The
//! crate computes this three independent ways and provides the conversions
//! needed to map the dimensionless model onto cold-atom experiments:
//!
//! * [`spectrum`] — energy levels from a semiclassical action series, from
//!   perturbation theory, and from exact diagonalization in a truncated
//!   number basis.
//! * [`dynamics`] — displaced-state coefficients and `<x>(t)`, `<p>(t)`
//!   either by direct phase evolution in the eigenbasis or by trigonometric
//!   sums over level gaps.
//! * [`envelope`] — closed-form collapse/revival envelope built from the
//!   quadratic expansion of the level gaps around the mean occupation.
//! * [`experiments`] — optical-lattice and crossed-beam trap parameter
//!   pipelines yielding `beta`, the displacement, and the collapse/revival
//!   time scales in laboratory units.
//! * [`units`] — the dimensionless scaling itself.
//! * [`linalg`] — the small dense symmetric eigensolver backing the exact
//!   route.

pub mod dynamics;
pub mod envelope;
pub mod experiments;
pub mod linalg;
pub mod spectrum;
pub mod units;

use std::fmt;

/// Crate-wide error type.
///
/// Variants distinguish rejected inputs (domain violations a caller can fix)
/// from numerical failures (an algorithm did not reach its tolerance).
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An input was NaN, infinite, or outside its physical domain.
    InvalidInput { what: &'static str, value: f64 },
    /// |beta| exceeds the supported range of the weak-anharmonicity model.
    BetaOutOfRange { beta: f64 },
    /// The classical turning point is only defined for positive energy.
    NonPositiveEnergy { energy: f64 },
    /// For beta < 0 the potential has a barrier at 1/(4|beta|); bounded
    /// motion requires E below it.
    AboveBarrier { energy: f64, barrier: f64 },
    /// Requested number-basis size outside the supported 4..=1000.
    BasisOutOfRange { requested: usize },
    /// Displaced-state construction requires a non-negative displacement;
    /// negative displacements are handled by parity at the pipeline level.
    NegativeDisplacement { displacement: f64 },
    /// The basis cannot hold the displaced state to the tail tolerance.
    TruncationTooSmall { given: usize, required: usize },
    /// The spectrum does not provide trustworthy levels for every occupied
    /// basis state.
    SpectrumTooShort { valid_up_to: usize, required: usize },
    /// The Jacobi eigensolver did not reach its tolerance.
    EigensolverStalled {
        sweeps: usize,
        off_norm: f64,
        tolerance: f64,
    },
    /// The collapse/revival envelope is undefined for beta = 0 (the revival
    /// time diverges) or outside the perturbative regime.
    UndefinedEnvelope { reason: &'static str },
    /// Lattice displacement fraction must satisfy 0 < alpha < 1/2.
    InvalidAlpha { alpha: f64 },
    /// Crossed-beam trap requires omega_x > omega_z > 0.
    InvalidTrap { omega_z: f64, omega_x: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Error::InvalidInput { what, value } => {
                write!(f, "invalid {what}: {value}")
            }
            Error::BetaOutOfRange { beta } => {
                write!(
                    f,
                    "beta = {beta} outside supported range |beta| <= {}",
                    units::BETA_CAP
                )
            }
            Error::NonPositiveEnergy { energy } => {
                write!(f, "turning point requires E > 0, got E = {energy}")
            }
            Error::AboveBarrier { energy, barrier } => {
                write!(
                    f,
                    "E = {energy} is at or above the potential barrier {barrier}; \
                     motion is unbounded"
                )
            }
            Error::BasisOutOfRange { requested } => {
                write!(f, "basis size {requested} outside supported 4..=1000")
            }
            Error::NegativeDisplacement { displacement } => {
                write!(
                    f,
                    "displacement {displacement} is negative; evolve |d| and negate \
                     the outputs"
                )
            }
            Error::TruncationTooSmall { given, required } => {
                write!(
                    f,
                    "basis of {given} states cannot hold the displaced state; \
                     need at least {required}"
                )
            }
            Error::SpectrumTooShort {
                valid_up_to,
                required,
            } => {
                write!(
                    f,
                    "spectrum trustworthy up to level {valid_up_to}, but the state \
                     occupies levels up to {required}"
                )
            }
            Error::EigensolverStalled {
                sweeps,
                off_norm,
                tolerance,
            } => {
                write!(
                    f,
                    "Jacobi eigensolver stalled after {sweeps} sweeps: off-diagonal \
                     norm {off_norm:e} above tolerance {tolerance:e}"
                )
            }
            Error::UndefinedEnvelope { reason } => {
                write!(f, "envelope model undefined: {reason}")
            }
            Error::InvalidAlpha { alpha } => {
                write!(f, "alpha = {alpha} outside (0, 0.5)")
            }
            Error::InvalidTrap { omega_z, omega_x } => {
                write!(
                    f,
                    "trap frequencies must satisfy omega_x > omega_z > 0, got \
                     omega_z = {omega_z}, omega_x = {omega_x}"
                )
            }
        }
    }
}

impl std::error::Error for Error {}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Formats a float with 17 significant digits, enough to round-trip any f64.
///
/// All CSV writers use this so that identical inputs produce byte-identical
/// files regardless of platform or thread count.
pub fn csv_float(value: f64) -> String {
    format!("{value:.16e}")
}
