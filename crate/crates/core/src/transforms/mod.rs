//! Quadratic maps `R^d → R^D` between oscillator and atom coordinates.
//!
//! The `d × d` template is generated from the Cayley–Dickson algebra `A` of
//! dimension `n = d/2`. Writing `u = (p, q) ∈ A²`, the first `D = n + 1` rows
//! realize the Hopf-type map
//!
//! ```text
//! x_1 = |p|² − |q|²,   (x_2, …, x_D) = 2 p q,
//! ```
//!
//! and the remaining `n − 1` rows are the linearised fibre motions
//! `(p, q) ↦ (−p e_k, e_k q)` for the imaginary units `e_1..e_{n−1}`. The
//! coordinate embedding `p = (u_1, u_{n+2}, …, u_{2n})`, `q = (u_2, …, u_{n+1})`
//! reproduces the planar map for m = 1 and the four-dimensional map
//! `x_1 = u_1² − u_2² − u_3² + u_4²`, `x_2 = 2(u_1u_2 − u_3u_4)`,
//! `x_3 = 2(u_1u_3 + u_2u_4)` for m = 2.
//!
//! For m = 4 the octonion product is not associative, and the fibre rows are
//! not orthogonal to the product rows. No linear completion exists in
//! sixteen dimensions, so [`check_orthogonality`] reports those pairs.

mod algebra;
mod matrix;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

pub use algebra::{BasisProduct, CayleyDickson};
pub use matrix::{
    check_divergence, check_orthogonality, DivergenceReport, Monomial, OrthogonalityReport,
    RowPairFailure, SignedIndex, SignedIndexMatrix,
};

use crate::error::{Error, Result};

/// Transformation family `m ∈ 1..=4`: oscillator dimension `d = 2^m`, atom
/// dimension `D = 2^(m−1) + 1` (`D = 2` for m = 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct FamilyDescriptor {
    m: u32,
    osc_dim: usize,
    atom_dim: usize,
}

impl FamilyDescriptor {
    pub const ALL: [FamilyDescriptor; 4] = [
        FamilyDescriptor { m: 1, osc_dim: 2, atom_dim: 2 },
        FamilyDescriptor { m: 2, osc_dim: 4, atom_dim: 3 },
        FamilyDescriptor { m: 3, osc_dim: 8, atom_dim: 5 },
        FamilyDescriptor { m: 4, osc_dim: 16, atom_dim: 9 },
    ];

    pub fn new(m: u32) -> Result<Self> {
        match m {
            1..=4 => Ok(Self::ALL[m as usize - 1]),
            _ => Err(Error::UnsupportedFamily(m)),
        }
    }

    /// Accepts the command-line names `lc`, `ks`, `hurwitz8`, `hurwitz16`.
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "lc" => Self::new(1),
            "ks" => Self::new(2),
            "hurwitz8" => Self::new(3),
            "hurwitz16" => Self::new(4),
            other => Err(Error::UnknownFamilyName(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        ["lc", "ks", "hurwitz8", "hurwitz16"][self.m as usize - 1]
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// `d`.
    pub fn osc_dim(&self) -> usize {
        self.osc_dim
    }

    /// `D`.
    pub fn atom_dim(&self) -> usize {
        self.atom_dim
    }

    /// `2^(m−1)`, the zero-point shift of both spectra.
    pub fn half_dim(&self) -> usize {
        self.osc_dim / 2
    }

    pub fn phi_count(&self) -> usize {
        self.osc_dim - self.atom_dim
    }

    /// 1-based φ operator indices `D+1..=d`.
    pub fn phi_indices(&self) -> std::ops::RangeInclusive<usize> {
        self.atom_dim + 1..=self.osc_dim
    }
}

impl fmt::Display for FamilyDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (m={}, d={}, D={})", self.name(), self.m, self.osc_dim, self.atom_dim)
    }
}

pub fn family_params(m: u32) -> Result<FamilyDescriptor> {
    FamilyDescriptor::new(m)
}

/// Oscillator-space point `u ∈ R^d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscPoint(pub Vec<f64>);

impl OscPoint {
    pub fn new(coords: Vec<f64>) -> Self {
        OscPoint(coords)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `u² = Σ u_j²`.
    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum()
    }

    pub fn negated(&self) -> OscPoint {
        OscPoint(self.0.iter().map(|v| -v).collect())
    }
}

/// Atom-space point `x ∈ R^D`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomPoint(pub Vec<f64>);

impl AtomPoint {
    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    /// `r = |x|`.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Builds the canonical `d × d` template for `family`.
pub fn build_matrix(family: FamilyDescriptor) -> SignedIndexMatrix {
    let d = family.osc_dim();
    let n = d / 2;
    let alg = CayleyDickson::new(n);
    let p_idx: Vec<usize> = std::iter::once(0).chain(n + 1..2 * n).collect();
    let q_idx: Vec<usize> = (1..=n).collect();

    let mut rows: Vec<Vec<SignedIndex>> = Vec::with_capacity(d);

    // x_1 = |p|² − |q|²
    let mut norm_row = vec![SignedIndex::ZERO; d];
    for a in 0..n {
        norm_row[p_idx[a]] = SignedIndex::new(1, p_idx[a]);
        norm_row[q_idx[a]] = SignedIndex::new(-1, q_idx[a]);
    }
    rows.push(norm_row);

    // x_{k+2} = 2 (pq)_k; row = gradient/2, symmetric in the p and q blocks
    for k in 0..n {
        let mut row = vec![SignedIndex::ZERO; d];
        for a in 0..n {
            for b in 0..n {
                let prod = alg.mul(a, b);
                if prod.index == k {
                    row[p_idx[a]] = SignedIndex::new(prod.sign, q_idx[b]);
                    row[q_idx[b]] = SignedIndex::new(prod.sign, p_idx[a]);
                }
            }
        }
        rows.push(row);
    }

    // φ rows: V_ξ(p, q) = (−p e_ξ, e_ξ q)
    for xi in 1..n {
        let mut row = vec![SignedIndex::ZERO; d];
        for a in 0..n {
            let right = alg.mul(a, xi);
            row[p_idx[right.index]] = SignedIndex::new(-right.sign, p_idx[a]);
            let left = alg.mul(xi, a);
            row[q_idx[left.index]] = SignedIndex::new(left.sign, q_idx[a]);
        }
        rows.push(row);
    }

    SignedIndexMatrix::new(d, rows.into_iter().flatten().collect())
        .expect("Cayley–Dickson rows are signed permutations")
}

/// A family together with the template that realizes it. Cheap to clone and
/// safe to share across threads.
#[derive(Debug, Clone)]
pub struct Transform {
    family: FamilyDescriptor,
    matrix: Arc<SignedIndexMatrix>,
}

impl Transform {
    pub fn canonical(family: FamilyDescriptor) -> Self {
        Transform { family, matrix: Arc::new(build_matrix(family)) }
    }

    /// Wraps an externally supplied template, e.g. one read from a golden file.
    pub fn with_matrix(family: FamilyDescriptor, matrix: SignedIndexMatrix) -> Result<Self> {
        if matrix.dim() != family.osc_dim() {
            return Err(Error::Shape { expected: family.osc_dim(), actual: matrix.dim() });
        }
        Ok(Transform { family, matrix: Arc::new(matrix) })
    }

    pub fn family(&self) -> FamilyDescriptor {
        self.family
    }

    pub fn matrix(&self) -> &SignedIndexMatrix {
        &self.matrix
    }

    fn check_len(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.family.osc_dim() {
            return Err(Error::Shape { expected: self.family.osc_dim(), actual: u.len() });
        }
        Ok(())
    }

    /// `x_i = Σ_j T_ij(u) u_j`, `i = 1..=D`.
    pub fn map(&self, u: &OscPoint) -> Result<AtomPoint> {
        self.check_len(u.coords())?;
        Ok(self.map_unchecked(u.coords()))
    }

    pub(crate) fn map_unchecked(&self, u: &[f64]) -> AtomPoint {
        AtomPoint((0..self.family.atom_dim()).map(|i| self.matrix.quadratic_form(i, u)).collect())
    }

    /// `T(u)` restricted to its first `D` rows, the analytic value of half
    /// the Jacobian `∂x_i/∂u_j`.
    pub fn coordinate_rows(&self, u: &OscPoint) -> Result<Vec<Vec<f64>>> {
        self.check_len(u.coords())?;
        Ok((0..self.family.atom_dim()).map(|i| self.matrix.eval_row(i, u.coords())).collect())
    }
}

/// Maps `u` through the canonical template of `family`.
pub fn map_point(family: FamilyDescriptor, u: &OscPoint) -> Result<AtomPoint> {
    Transform::canonical(family).map(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(m: u32) -> FamilyDescriptor {
        FamilyDescriptor::new(m).unwrap()
    }

    #[test]
    fn family_dimensions() {
        let ks = fam(2);
        assert_eq!((ks.m(), ks.osc_dim(), ks.atom_dim()), (2, 4, 3));
        let h16 = fam(4);
        assert_eq!((h16.m(), h16.osc_dim(), h16.atom_dim()), (4, 16, 9));
        let lc = fam(1);
        assert_eq!((lc.osc_dim(), lc.atom_dim(), lc.phi_count()), (2, 2, 0));
        let counts: Vec<usize> = FamilyDescriptor::ALL.iter().map(|f| f.phi_count()).collect();
        assert_eq!(counts, vec![0, 1, 3, 7]);
    }

    #[test]
    fn family_out_of_range() {
        assert_eq!(family_params(0), Err(Error::UnsupportedFamily(0)));
        assert_eq!(family_params(5), Err(Error::UnsupportedFamily(5)));
    }

    #[test]
    fn family_names_round_trip() {
        for f in FamilyDescriptor::ALL {
            assert_eq!(FamilyDescriptor::from_name(f.name()).unwrap(), f);
        }
        assert!(FamilyDescriptor::from_name("sedenion").is_err());
    }

    #[test]
    fn levi_civita_rows() {
        let m = build_matrix(fam(1));
        assert_eq!(m.to_string(), "+1 -2\n+2 +1\n");
    }

    #[test]
    fn ks_rows_match_published_map_and_phi4() {
        let m = build_matrix(fam(2));
        let text = m.to_string();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "+1 -2 -3 +4");
        assert_eq!(lines[3], "+4 -3 +2 -1");
    }

    #[test]
    fn ks_map_examples() {
        let ks = fam(2);
        let x = map_point(ks, &OscPoint::new(vec![1.0, 0.0, 0.0, 0.0])).unwrap();
        assert_eq!(x.coords(), &[1.0, 0.0, 0.0]);
        let x = map_point(ks, &OscPoint::new(vec![1.0, 1.0, 0.0, 0.0])).unwrap();
        assert_eq!(x.coords(), &[0.0, 2.0, 0.0]);
    }

    #[test]
    fn map_rejects_wrong_length() {
        let err = map_point(fam(2), &OscPoint::new(vec![1.0, 2.0])).unwrap_err();
        assert_eq!(err, Error::Shape { expected: 4, actual: 2 });
    }

    #[test]
    fn axioms_hold_through_m3() {
        for m in 1..=3 {
            let t = build_matrix(fam(m));
            assert!(t.is_signed_permutation());
            assert!(check_orthogonality(&t).passed(), "m={m}");
            assert!(check_divergence(&t).passed(), "m={m}");
        }
    }

    #[test]
    fn hurwitz16_coordinate_block_is_orthogonal() {
        let f = fam(4);
        let t = build_matrix(f);
        let report = check_orthogonality(&t);
        assert_eq!(report.coordinate_block_failures(f.atom_dim()).count(), 0);
        assert_eq!(report.phi_block_failures(f.atom_dim()).count(), 0);
        // Non-associativity: the fibre rows are not orthogonal to the product rows.
        assert!(report.mixed_failures(f.atom_dim()).count() > 0);
        assert!(report.mixed_failures(f.atom_dim()).all(|p| p.i >= 2));
        assert!(check_divergence(&t).passed());
    }

    #[test]
    fn with_matrix_checks_dimension() {
        let t = build_matrix(fam(1));
        assert!(Transform::with_matrix(fam(2), t).is_err());
    }
}
