//! Signed-index matrix templates and their exact (symbolic) axiom checks.
//!
//! An entry `(s, k)` stands for `s · u_k`. Because every entry is a signed
//! coordinate, row products and divergences are integer polynomials in `u`
//! and can be checked as identities without sampling.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// One template entry: `sign · u_{index}` (0-based index). `sign == 0` is an
/// identically zero entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SignedIndex {
    pub sign: i8,
    pub index: usize,
}

impl SignedIndex {
    pub const ZERO: SignedIndex = SignedIndex { sign: 0, index: 0 };

    pub fn new(sign: i8, index: usize) -> Self {
        SignedIndex { sign, index }
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    pub fn eval(self, u: &[f64]) -> f64 {
        match self.sign {
            0 => 0.0,
            s => s as f64 * u[self.index],
        }
    }
}

/// A `dim × dim` template whose entry `(i, j)` is `±u_k` (or 0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedIndexMatrix {
    dim: usize,
    entries: Vec<SignedIndex>,
}

impl SignedIndexMatrix {
    /// Validates that indices are in range and that no row repeats a source
    /// index.
    pub fn new(dim: usize, entries: Vec<SignedIndex>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::Shape { expected: dim * dim, actual: entries.len() });
        }
        for (r, row) in entries.chunks(dim).enumerate() {
            let mut seen = vec![false; dim];
            for e in row.iter().filter(|e| !e.is_zero()) {
                if e.index >= dim {
                    return Err(Error::Template {
                        line: r + 1,
                        reason: format!("source index {} exceeds dimension {dim}", e.index + 1),
                    });
                }
                if seen[e.index] {
                    return Err(Error::Template {
                        line: r + 1,
                        reason: format!("source index {} used twice", e.index + 1),
                    });
                }
                seen[e.index] = true;
            }
        }
        Ok(SignedIndexMatrix { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// 0-based access.
    pub fn entry(&self, i: usize, j: usize) -> SignedIndex {
        self.entries[i * self.dim + j]
    }

    pub fn row(&self, i: usize) -> &[SignedIndex] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[SignedIndex]> {
        self.entries.chunks(self.dim)
    }

    /// Numeric row `T_i(u)`.
    pub fn eval_row(&self, i: usize, u: &[f64]) -> Vec<f64> {
        self.row(i).iter().map(|e| e.eval(u)).collect()
    }

    /// `Σ_j T_ij(u) u_j`.
    pub fn quadratic_form(&self, i: usize, u: &[f64]) -> f64 {
        self.row(i).iter().zip(u).map(|(e, uj)| e.eval(u) * uj).sum()
    }

    /// True when every row is a full signed permutation of `(u_1..u_dim)`.
    pub fn is_signed_permutation(&self) -> bool {
        self.rows().all(|row| row.iter().all(|e| !e.is_zero()))
    }
}

/// Golden-file rendering: one line per row, `+k`/`-k` for `±u_k` (1-based),
/// `0` for zero entries.
impl fmt::Display for SignedIndexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            let line: Vec<String> = row
                .iter()
                .map(|e| match e.sign {
                    0 => "0".to_string(),
                    s if s > 0 => format!("+{}", e.index + 1),
                    _ => format!("-{}", e.index + 1),
                })
                .collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for SignedIndexMatrix {
    type Err = Error;

    /// Blank lines and lines starting with `#` are skipped.
    fn from_str(s: &str) -> Result<Self> {
        let mut rows: Vec<(usize, Vec<SignedIndex>)> = Vec::new();
        for (n, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line
                .split_whitespace()
                .map(|tok| parse_entry(tok).map_err(|reason| Error::Template { line: n + 1, reason }))
                .collect::<Result<Vec<_>>>()?;
            rows.push((n + 1, row));
        }
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::Template { line: 0, reason: "empty template".into() });
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for (line, row) in rows {
            if row.len() != dim {
                return Err(Error::Template {
                    line,
                    reason: format!("expected {dim} entries, found {}", row.len()),
                });
            }
            entries.extend(row);
        }
        SignedIndexMatrix::new(dim, entries)
    }
}

fn parse_entry(tok: &str) -> std::result::Result<SignedIndex, String> {
    let v: i64 = tok.parse().map_err(|_| format!("`{tok}` is not a signed integer"))?;
    if v == 0 {
        return Ok(SignedIndex::ZERO);
    }
    let sign = if v > 0 { 1 } else { -1 };
    Ok(SignedIndex::new(sign, v.unsigned_abs() as usize - 1))
}

/// `coeff · u_a u_b` with `a <= b`, 1-based for display.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Monomial {
    pub coeff: i32,
    pub a: usize,
    pub b: usize,
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.a == self.b {
            write!(f, "{:+}·u{}²", self.coeff, self.a)
        } else {
            write!(f, "{:+}·u{}·u{}", self.coeff, self.a, self.b)
        }
    }
}

/// A row pair whose product is not `u² δ_ik`; `residual` is
/// `Σ_j T_ij T_kj − u² δ_ik` as a polynomial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowPairFailure {
    pub i: usize,
    pub k: usize,
    pub residual: Vec<Monomial>,
}

impl RowPairFailure {
    pub fn residual_string(&self) -> String {
        self.residual.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(" ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrthogonalityReport {
    pub dim: usize,
    pub pairs_checked: usize,
    /// 1-based row indices, `i <= k`.
    pub failures: Vec<RowPairFailure>,
}

impl OrthogonalityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Failures among rows `1..=atom_dim` only: the range over which the
    /// coordinate map itself requires `Σ_j T_ij T_kj = u² δ_ik`.
    pub fn coordinate_block_failures(&self, atom_dim: usize) -> impl Iterator<Item = &RowPairFailure> {
        self.failures.iter().filter(move |f| f.k <= atom_dim)
    }

    /// Failures between a coordinate row and a φ row.
    pub fn mixed_failures(&self, atom_dim: usize) -> impl Iterator<Item = &RowPairFailure> {
        self.failures.iter().filter(move |f| f.i <= atom_dim && f.k > atom_dim)
    }

    /// Failures among φ rows.
    pub fn phi_block_failures(&self, atom_dim: usize) -> impl Iterator<Item = &RowPairFailure> {
        self.failures.iter().filter(move |f| f.i > atom_dim)
    }
}

/// Expands `Σ_j T_ij T_kj − u² δ_ik` exactly for every row pair `i <= k`.
pub fn check_orthogonality(matrix: &SignedIndexMatrix) -> OrthogonalityReport {
    let dim = matrix.dim();
    let mut failures = Vec::new();
    let mut pairs = 0;
    for i in 0..dim {
        for k in i..dim {
            pairs += 1;
            let mut poly: BTreeMap<(usize, usize), i32> = BTreeMap::new();
            for (a, b) in matrix.row(i).iter().zip(matrix.row(k)) {
                if a.is_zero() || b.is_zero() {
                    continue;
                }
                let key = (a.index.min(b.index), a.index.max(b.index));
                *poly.entry(key).or_default() += (a.sign * b.sign) as i32;
            }
            if i == k {
                for c in 0..dim {
                    *poly.entry((c, c)).or_default() -= 1;
                }
            }
            let residual: Vec<Monomial> = poly
                .into_iter()
                .filter(|&(_, c)| c != 0)
                .map(|((a, b), coeff)| Monomial { coeff, a: a + 1, b: b + 1 })
                .collect();
            if !residual.is_empty() {
                failures.push(RowPairFailure { i: i + 1, k: k + 1, residual });
            }
        }
    }
    OrthogonalityReport { dim, pairs_checked: pairs, failures }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DivergenceReport {
    /// `Σ_j ∂T_ij/∂u_j` for each row, in row order.
    pub divergences: Vec<i32>,
}

impl DivergenceReport {
    pub fn passed(&self) -> bool {
        self.divergences.iter().all(|&d| d == 0)
    }

    /// `(row, divergence)` pairs with nonzero divergence, 1-based rows.
    pub fn failures(&self) -> Vec<(usize, i32)> {
        self.divergences
            .iter()
            .enumerate()
            .filter(|(_, &d)| d != 0)
            .map(|(i, &d)| (i + 1, d))
            .collect()
    }
}

/// Entry `(i, j) = s·u_k` contributes `s` to row `i` exactly when `k == j`.
pub fn check_divergence(matrix: &SignedIndexMatrix) -> DivergenceReport {
    let divergences = matrix
        .rows()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(j, e)| !e.is_zero() && e.index == *j)
                .map(|(_, e)| e.sign as i32)
                .sum()
        })
        .collect();
    DivergenceReport { divergences }
}
