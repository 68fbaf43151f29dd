//! Energy spectrum of `H = p²/2 + x²/2 + (β/4)x⁴` by three routes.
//!
//! * a semiclassical series: the classical action `I(E)` is inverted and
//!   quantized at half-integers ([`wkb_level`]),
//! * Rayleigh–Schrödinger perturbation theory in the quartic term
//!   ([`perturbation_level`]), with the second-order sum built from ladder
//!   matrix elements rather than a quoted coefficient,
//! * dense diagonalization in the truncated harmonic basis
//!   ([`exact_spectrum`]).
//!
//! A Gauss–Legendre quadrature of the action integral
//! ([`action_of_energy_quadrature`]) serves as an independent oracle for the
//! series route.

use std::f64::consts::{FRAC_PI_2, PI};
use std::io;

use crate::linalg::{jacobi_eigen, Eigensystem, Matrix};
use crate::units::BETA_CAP;
use crate::{csv_float, Error, Result};

/// Largest basis the dense eigensolver accepts.
pub const MAX_BASIS: usize = 1000;

/// Gauss–Legendre node count for the action integral; the integrand is
/// analytic after the sine substitution, so this is far into the regime of
/// geometric convergence.
const QUADRATURE_NODES: usize = 128;

/// How a [`SpectrumTable`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Wkb,
    Perturbation,
    Exact,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Wkb => "wkb",
            Method::Perturbation => "perturbation",
            Method::Exact => "exact",
        })
    }
}

/// Perturbation order for [`perturbation_level`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PtOrder {
    First,
    Second,
}

/// Ordered energy levels `E_n` for one method at one `beta`.
///
/// `levels[n]` is the energy of level `n`; indices above `valid_up_to` are
/// reported but not trustworthy (basis truncation, or levels above the
/// barrier of a `beta < 0` metastable well).
#[derive(Debug, Clone)]
pub struct SpectrumTable {
    pub method: Method,
    pub beta: f64,
    pub levels: Vec<f64>,
    pub valid_up_to: usize,
}

impl SpectrumTable {
    /// Writes `n,E` rows with a `#` preamble recording method, `beta`, and
    /// the validity bound.
    pub fn write_csv<W: io::Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "# method: {}", self.method)?;
        writeln!(w, "# beta: {}", csv_float(self.beta))?;
        writeln!(w, "# valid_up_to: {}", self.valid_up_to)?;
        writeln!(w, "n,E")?;
        for (n, e) in self.levels.iter().enumerate() {
            writeln!(w, "{n},{}", csv_float(*e))?;
        }
        Ok(())
    }
}

/// Positive classical turning point `ã` of the quartic oscillator at energy
/// `E`: the root of `E = ã²/2 + (β/4)ã⁴`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurningPoint {
    /// Turning-point position `ã ≥ 0`.
    pub amplitude: f64,
    /// Energy the turning point belongs to.
    pub energy: f64,
}

impl TurningPoint {
    /// Defect `ã²/2 + (β/4)ã⁴ − E`; zero (to rounding) for a valid point.
    pub fn energy_residual(&self, beta: f64) -> f64 {
        let a2 = self.amplitude * self.amplitude;
        0.5 * a2 + 0.25 * beta * a2 * a2 - self.energy
    }
}

fn check_beta_finite(beta: f64) -> Result<()> {
    if !beta.is_finite() {
        return Err(Error::InvalidInput {
            what: "beta",
            value: beta,
        });
    }
    Ok(())
}

fn check_beta_cap(beta: f64) -> Result<()> {
    check_beta_finite(beta)?;
    if beta.abs() > BETA_CAP {
        return Err(Error::BetaOutOfRange { beta });
    }
    Ok(())
}

/// Classical turning point at energy `energy`.
///
/// Uses the root form `ã² = 4E / (1 + √(1 + 4βE))`, which is continuous
/// through `beta = 0` (giving `ã² = 2E`) and avoids cancellation for small
/// `|beta|`.
///
/// # Errors
///
/// `energy ≤ 0` is rejected; for `beta < 0` an energy at or above the
/// potential barrier `1/(4|beta|)` has no turning-point pair and returns
/// [`Error::AboveBarrier`].
pub fn turning_point(energy: f64, beta: f64) -> Result<TurningPoint> {
    if !energy.is_finite() || energy <= 0.0 {
        return Err(Error::NonPositiveEnergy { energy });
    }
    check_beta_finite(beta)?;
    if beta < 0.0 {
        let barrier = -1.0 / (4.0 * beta);
        if energy >= barrier {
            return Err(Error::AboveBarrier { energy, barrier });
        }
    }
    let amplitude_sq = 4.0 * energy / (1.0 + (1.0 + 4.0 * beta * energy).sqrt());
    Ok(TurningPoint {
        amplitude: amplitude_sq.sqrt(),
        energy,
    })
}

/// Classical action `I(E)` as a second-order series in `beta`:
/// `I = E − (3/8)βE² + (35/64)β²E³`.
///
/// The truncation error is `O(β³E⁴)`; the series is only meaningful while
/// `|β|·E` stays well below one (accuracy degrades noticeably beyond
/// `βE ≈ 0.2`).
pub fn action_of_energy_series(energy: f64, beta: f64) -> f64 {
    let be = beta * energy;
    energy * (1.0 - (3.0 / 8.0) * be + (35.0 / 64.0) * be * be)
}

/// Classical action `I(E) = (1/π)∫√(2(E−V(x)))dx` between the turning
/// points, by Gauss–Legendre quadrature.
///
/// The substitution `x = ã·sinθ` removes the square-root endpoint
/// singularity, leaving an analytic integrand; the result is accurate to
/// near machine precision (well below the 1e-10 the caller may rely on).
///
/// # Errors
///
/// Propagates [`turning_point`] failures.
pub fn action_of_energy_quadrature(energy: f64, beta: f64) -> Result<f64> {
    let tp = turning_point(energy, beta)?;
    let a2 = tp.amplitude * tp.amplitude;
    let (nodes, weights) = gauss_legendre(QUADRATURE_NODES);
    let mut sum = 0.0;
    for (u, w) in nodes.iter().zip(&weights) {
        let theta = FRAC_PI_2 * u;
        let (s, c) = theta.sin_cos();
        // 2(E − V(ã sinθ)) = ã²cos²θ·(1 + (βã²/2)(1 + sin²θ)); the max(0)
        // guards rounding right at a β<0 barrier.
        let radicand = (1.0 + 0.5 * beta * a2 * (1.0 + s * s)).max(0.0);
        sum += w * c * c * radicand.sqrt();
    }
    Ok(0.5 * a2 * sum)
}

/// Energy as a function of the action, the series inverse of
/// [`action_of_energy_series`]: `E = I + (3/8)βI² − (17/64)β²I³`.
pub fn energy_of_action(action: f64, beta: f64) -> f64 {
    let bi = beta * action;
    action * (1.0 + (3.0 / 8.0) * bi - (17.0 / 64.0) * bi * bi)
}

/// Semiclassical level `E_n`: the action quantized at `I_n = n + ½`,
/// expanded to second order in `beta`:
///
/// `E_n = (n+½) + (3β/8)(n²+n+¼) − β²((17/64)n³ + (51/128)n² + (51/256)n + 17/512)`.
///
/// Algebraically identical to `energy_of_action(n + ½, beta)`.
pub fn wkb_level(n: usize, beta: f64) -> f64 {
    let nf = n as f64;
    let linear = nf * nf + nf + 0.25;
    let cubic = (17.0 / 64.0) * nf * nf * nf
        + (51.0 / 128.0) * nf * nf
        + (51.0 / 256.0) * nf
        + 17.0 / 512.0;
    (nf + 0.5) + (3.0 / 8.0) * beta * linear - beta * beta * cubic
}

/// Matrix element `⟨m|x⁴|n⟩` in the harmonic eigenbasis, by brute-force
/// enumeration of the sixteen ladder-operator strings of
/// `x⁴ = ((a + a†)/√2)⁴`.
///
/// Non-zero only for `|m − n| ∈ {0, 2, 4}`.
pub fn x4_matrix_element(m: usize, n: usize) -> f64 {
    let mut total = 0.0;
    for mask in 0u32..16 {
        let mut level = n as i64;
        let mut amp = 1.0;
        for bit in 0..4 {
            if mask & (1 << bit) != 0 {
                level += 1;
                amp *= (level as f64 / 2.0).sqrt();
            } else {
                if level == 0 {
                    amp = 0.0;
                    break;
                }
                amp *= (level as f64 / 2.0).sqrt();
                level -= 1;
            }
        }
        if level == m as i64 {
            total += amp;
        }
    }
    total
}

/// Perturbative level `E_n` for the quartic coupling `(β/4)x⁴`.
///
/// First order adds `(β/4)⟨n|x⁴|n⟩`; second order adds the standard sum
/// `(β/4)² Σ_{m≠n} |⟨m|x⁴|n⟩|² / (n − m)` over the four coupled neighbors
/// `m ∈ {n±2, n±4}`, evaluated from the matrix elements directly.
pub fn perturbation_level(n: usize, beta: f64, order: PtOrder) -> f64 {
    let coupling = 0.25 * beta;
    let mut energy = n as f64 + 0.5 + coupling * x4_matrix_element(n, n);
    if order == PtOrder::Second {
        let mut sum = 0.0;
        let neighbors = [
            n.checked_sub(4),
            n.checked_sub(2),
            n.checked_add(2),
            n.checked_add(4),
        ];
        for m in neighbors.into_iter().flatten() {
            let element = x4_matrix_element(m, n);
            sum += element * element / (n as f64 - m as f64);
        }
        energy += coupling * coupling * sum;
    }
    energy
}

/// Table of the first `count` semiclassical levels.
///
/// # Errors
///
/// Rejects `count = 0` and `|beta|` beyond the model cap.
pub fn wkb_table(beta: f64, count: usize) -> Result<SpectrumTable> {
    check_beta_cap(beta)?;
    if count == 0 {
        return Err(Error::InvalidInput {
            what: "level count",
            value: 0.0,
        });
    }
    let levels = (0..count).map(|n| wkb_level(n, beta)).collect();
    Ok(SpectrumTable {
        method: Method::Wkb,
        beta,
        levels,
        valid_up_to: count - 1,
    })
}

/// Table of the first `count` perturbative levels.
///
/// # Errors
///
/// Rejects `count = 0` and `|beta|` beyond the model cap.
pub fn perturbation_table(beta: f64, count: usize, order: PtOrder) -> Result<SpectrumTable> {
    check_beta_cap(beta)?;
    if count == 0 {
        return Err(Error::InvalidInput {
            what: "level count",
            value: 0.0,
        });
    }
    let levels = (0..count)
        .map(|n| perturbation_level(n, beta, order))
        .collect();
    Ok(SpectrumTable {
        method: Method::Perturbation,
        beta,
        levels,
        valid_up_to: count - 1,
    })
}

/// Hamiltonian matrix in the `basis`-dimensional harmonic eigenbasis:
/// `H = diag(n + ½) + (β/4)·(x²)²` with tridiagonal
/// `⟨n|x|n+1⟩ = √((n+1)/2)`.
///
/// `x⁴` is formed by squaring `x²` inside the truncation, so its top rows
/// carry truncation error — the reason for the `valid_up_to` guard.
pub(crate) fn hamiltonian(beta: f64, basis: usize) -> Matrix {
    let mut x = Matrix::zeros(basis);
    for i in 0..basis.saturating_sub(1) {
        let v = ((i as f64 + 1.0) / 2.0).sqrt();
        x.set(i, i + 1, v);
        x.set(i + 1, i, v);
    }
    let x2 = x.mul(&x);
    let x4 = x2.mul(&x2);
    let mut h = Matrix::zeros(basis);
    let coupling = 0.25 * beta;
    for i in 0..basis {
        for j in 0..basis {
            h.set(i, j, coupling * x4.get(i, j));
        }
        h.add_to(i, i, i as f64 + 0.5);
    }
    h
}

fn check_basis(basis: usize) -> Result<()> {
    if !(4..=MAX_BASIS).contains(&basis) {
        return Err(Error::BasisOutOfRange { requested: basis });
    }
    Ok(())
}

/// Full eigendecomposition of the truncated Hamiltonian, ascending.
///
/// # Errors
///
/// Basis outside `[4, MAX_BASIS]`, `|beta|` beyond the cap, or eigensolver
/// non-convergence.
pub fn eigensystem(beta: f64, basis: usize) -> Result<Eigensystem> {
    check_beta_cap(beta)?;
    check_basis(basis)?;
    jacobi_eigen(&hamiltonian(beta, basis))
}

/// Largest level index trusted in a `basis`-dimensional diagonalization:
/// `basis − max(10, 4√basis)`, clamped at zero.  The `x⁴` coupling reaches
/// four places up, so convergence degrades near the basis edge.
pub fn default_valid_up_to(basis: usize) -> usize {
    let b = basis as f64;
    let guard = 10f64.max(4.0 * b.sqrt());
    (b - guard).floor().max(0.0) as usize
}

/// Smallest basis whose [`default_valid_up_to`] covers `count` levels.
///
/// # Errors
///
/// `count = 0`, or no basis within [`MAX_BASIS`] suffices.
pub fn basis_for_valid_levels(count: usize) -> Result<usize> {
    if count == 0 {
        return Err(Error::InvalidInput {
            what: "level count",
            value: 0.0,
        });
    }
    for basis in count.max(4)..=MAX_BASIS {
        if default_valid_up_to(basis) >= count - 1 {
            return Ok(basis);
        }
    }
    Err(Error::BasisOutOfRange { requested: count })
}

/// Spectrum by dense diagonalization in an `basis`-dimensional harmonic
/// basis.
///
/// All `basis` sorted eigenvalues are returned; `valid_up_to` is set by
/// [`default_valid_up_to`] and, for `beta < 0`, additionally capped at the
/// last level below the barrier `1/(4|beta|)` (states above it are not
/// bound).
///
/// Caveat for `beta < 0`: keep the basis modest.  A very large basis starts
/// to resolve the unbounded region beyond the barrier and grows spurious
/// low-lying pseudo-levels that displace the physical ones in the sorted
/// output.
///
/// # Errors
///
/// As [`eigensystem`].
pub fn exact_spectrum(beta: f64, basis: usize) -> Result<SpectrumTable> {
    let eig = eigensystem(beta, basis)?;
    let mut valid_up_to = default_valid_up_to(basis);
    if beta < 0.0 {
        let barrier = -1.0 / (4.0 * beta);
        let below = eig.values.partition_point(|&e| e < barrier);
        valid_up_to = valid_up_to.min(below.saturating_sub(1));
    }
    Ok(SpectrumTable {
        method: Method::Exact,
        beta,
        levels: eig.values,
        valid_up_to,
    })
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// by Newton iteration on the Legendre recurrence.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi-style first guess for the i-th largest root.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut derivative = 0.0;
        for _ in 0..64 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * x * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            derivative = n as f64 * (x * p0 - p1) / (x * x - 1.0);
            let step = p0 / derivative;
            x -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * derivative * derivative);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}
