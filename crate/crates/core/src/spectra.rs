//! Closed-form dual spectra.
//!
//! Oscillator in `d = 2^m` dimensions: `ε = ħω (N + 2^(m−1))`.
//! Atom in `D` dimensions: `E = −2μe⁴ / (ħ² (N + 2^(m−1))²)`.
//! The bridge between them is `½ μ ω² = −4E`, `ε = 4e²`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::{fmt12, ser_round};
use crate::transforms::FamilyDescriptor;

/// Gaussian-convention constants; Coulomb potential is `−e²/r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub mu: f64,
    pub e: f64,
    pub omega: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        PhysicalConstants { hbar: 1.0, mu: 1.0, e: 1.0, omega: 1.0 }
    }
}

impl PhysicalConstants {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("hbar", self.hbar), ("mu", self.mu), ("e", self.e), ("omega", self.omega)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }

    pub fn with_omega(self, omega: f64) -> Self {
        PhysicalConstants { omega, ..self }
    }
}

fn level_shift(n: i64, m: u32) -> Result<f64> {
    let family = FamilyDescriptor::new(m)?;
    if n < 0 {
        return Err(Error::Domain(format!("level N must be nonnegative, got {n}")));
    }
    Ok(n as f64 + family.half_dim() as f64)
}

/// `ħω (N + 2^(m−1))`.
pub fn oscillator_energy(n: i64, m: u32, c: &PhysicalConstants) -> Result<f64> {
    c.validate()?;
    Ok(c.hbar * c.omega * level_shift(n, m)?)
}

/// `−2μe⁴ / (ħ² (N + 2^(m−1))²)`.
pub fn hydrogen_energy(n: i64, m: u32, c: &PhysicalConstants) -> Result<f64> {
    c.validate()?;
    let k = level_shift(n, m)?;
    Ok(-2.0 * c.mu * c.e.powi(4) / (c.hbar * c.hbar * k * k))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualParameters {
    pub omega: f64,
    pub epsilon: f64,
}

/// Solves `½ μ ω² = −4E` and `ε = 4e²` for a bound atom energy `E < 0`.
pub fn dual_parameters(energy: f64, c: &PhysicalConstants) -> Result<DualParameters> {
    c.validate()?;
    if energy.is_nan() || energy >= 0.0 {
        return Err(Error::UnboundState(energy));
    }
    Ok(DualParameters { omega: (-8.0 * energy / c.mu).sqrt(), epsilon: 4.0 * c.e * c.e })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumRow {
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(serialize_with = "ser_round")]
    pub epsilon: f64,
    #[serde(rename = "E", serialize_with = "ser_round")]
    pub energy: f64,
    /// Only even oscillator levels pair with atom states.
    pub physical_dual: bool,
}

/// Rows for `N = 0..=n_max`.
pub fn spectrum_table(m: u32, n_max: i64, c: &PhysicalConstants) -> Result<Vec<SpectrumRow>> {
    if n_max < 0 {
        return Err(Error::Domain(format!("N_max must be nonnegative, got {n_max}")));
    }
    (0..=n_max)
        .map(|n| {
            Ok(SpectrumRow {
                n: n as u32,
                epsilon: oscillator_energy(n, m, c)?,
                energy: hydrogen_energy(n, m, c)?,
                physical_dual: n % 2 == 0,
            })
        })
        .collect()
}

/// CSV with header `N,epsilon,E,physical_dual`.
pub fn table_to_csv(rows: &[SpectrumRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["N", "epsilon", "E", "physical_dual"]).expect("in-memory write");
    for r in rows {
        w.write_record([r.n.to_string(), fmt12(r.epsilon), fmt12(r.energy), r.physical_dual.to_string()])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 csv")
}

pub fn table_to_json(rows: &[SpectrumRow]) -> String {
    serde_json::to_string_pretty(rows).expect("rows serialize")
}

pub fn table_to_text(rows: &[SpectrumRow]) -> String {
    let mut out = format!("{:>4}  {:>20}  {:>20}  {}\n", "N", "epsilon", "E", "physical_dual");
    for r in rows {
        out.push_str(&format!(
            "{:>4}  {:>20}  {:>20}  {}\n",
            r.n,
            fmt12(r.epsilon),
            fmt12(r.energy),
            r.physical_dual
        ));
    }
    out
}
