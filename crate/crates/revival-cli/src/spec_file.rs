//! Flat `key = value` experiment descriptions.
//!
//! Lines are `key = value` pairs; blank lines and lines starting with `#`
//! are ignored.  The `kind` key selects the experiment family:
//!
//! - `kind = lattice`: `depth_recoils` or `depth_joules`, `wavelength_m`,
//!   `alpha`, optional `mass_kg` (rubidium-87 when absent), and optional
//!   `omega_ext_rad_per_s` plus `site_index` to include the confinement
//!   analysis.
//! - `kind = crossed-beam`: `omega_z_rad_per_s`, `omega_x_rad_per_s`,
//!   `beta`.

use std::collections::BTreeMap;

use revival_core::experiments::{LatticeSpec, TrapSpec, RB87_MASS};

/// Parsed experiment description.
#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentSpec {
    Lattice {
        lattice: LatticeSpec,
        confinement: Option<Confinement>,
    },
    CrossedBeam(TrapSpec),
}

/// External-confinement block of a lattice description.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Confinement {
    pub omega_ext: f64,
    pub site_index: usize,
}

fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut pairs = BTreeMap::new();
    for (index, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(format!(
                "line {}: expected `key = value`, got `{line}`",
                index + 1
            ));
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if key.is_empty() || value.is_empty() {
            return Err(format!("line {}: empty key or value", index + 1));
        }
        if pairs.insert(key.clone(), value).is_some() {
            return Err(format!("line {}: duplicate key `{key}`", index + 1));
        }
    }
    Ok(pairs)
}

fn take_number(pairs: &mut BTreeMap<String, String>, key: &str) -> Result<f64, String> {
    let raw = pairs
        .remove(key)
        .ok_or_else(|| format!("missing key `{key}`"))?;
    raw.parse()
        .map_err(|_| format!("key `{key}`: `{raw}` is not a number"))
}

fn take_optional_number(
    pairs: &mut BTreeMap<String, String>,
    key: &str,
) -> Result<Option<f64>, String> {
    match pairs.remove(key) {
        None => Ok(None),
        Some(raw) => raw
            .parse()
            .map(Some)
            .map_err(|_| format!("key `{key}`: `{raw}` is not a number")),
    }
}

/// Parses an experiment description.
///
/// Unknown keys are rejected so typos surface instead of silently using a
/// default.
pub fn parse(text: &str) -> Result<ExperimentSpec, String> {
    let mut pairs = parse_pairs(text)?;
    let kind = pairs.remove("kind").ok_or("missing key `kind`")?;
    let spec = match kind.as_str() {
        "lattice" => {
            let depth_recoils = take_optional_number(&mut pairs, "depth_recoils")?;
            let depth_joules = take_optional_number(&mut pairs, "depth_joules")?;
            let (depth, depth_in_recoils) = match (depth_recoils, depth_joules) {
                (Some(d), None) => (d, true),
                (None, Some(d)) => (d, false),
                (Some(_), Some(_)) => {
                    return Err("give either `depth_recoils` or `depth_joules`, not both".into())
                }
                (None, None) => return Err("missing key `depth_recoils` or `depth_joules`".into()),
            };
            let wavelength = take_number(&mut pairs, "wavelength_m")?;
            let alpha = take_number(&mut pairs, "alpha")?;
            let mass = take_optional_number(&mut pairs, "mass_kg")?.unwrap_or(RB87_MASS);
            let omega_ext = take_optional_number(&mut pairs, "omega_ext_rad_per_s")?;
            let site_index = take_optional_number(&mut pairs, "site_index")?;
            let confinement = match (omega_ext, site_index) {
                (Some(omega_ext), Some(site)) => {
                    if site < 0.0 || site.fract() != 0.0 {
                        return Err(format!("key `site_index`: `{site}` is not a whole number"));
                    }
                    Some(Confinement {
                        omega_ext,
                        site_index: site as usize,
                    })
                }
                (None, None) => None,
                _ => {
                    return Err(
                        "`omega_ext_rad_per_s` and `site_index` must be given together".into(),
                    )
                }
            };
            ExperimentSpec::Lattice {
                lattice: LatticeSpec {
                    depth,
                    depth_in_recoils,
                    wavelength,
                    mass,
                    alpha,
                },
                confinement,
            }
        }
        "crossed-beam" => ExperimentSpec::CrossedBeam(TrapSpec {
            omega_z: take_number(&mut pairs, "omega_z_rad_per_s")?,
            omega_x: take_number(&mut pairs, "omega_x_rad_per_s")?,
            beta: take_number(&mut pairs, "beta")?,
        }),
        other => return Err(format!("unknown kind `{other}`")),
    };
    if let Some(key) = pairs.keys().next() {
        return Err(format!("unknown key `{key}`"));
    }
    Ok(spec)
}
