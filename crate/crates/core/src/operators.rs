//! Differential-operator calculus on the oscillator space.
//!
//! The φ operators are carried as real first-order operators
//! `L_i f = ½ Σ_j T_ij(u) ∂f/∂u_j` (`φ_i = i·L_i`), so that
//! `φ² = −Σ_i L_i²`. Each `L_i` is the derivative along the linear vector
//! field `V_i(u) = T_i(u) = M_i u`, which gives the exact expansion
//!
//! ```text
//! L_i² f = ¼ [ (M_i² u)·∇f + V_iᵀ (∇²f) V_i ],
//! ```
//!
//! evaluated with one first-order and one second-order directional stencil.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::PointSampler;
use crate::transforms::{OscPoint, Transform};

type FieldFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A smooth real function of a coordinate vector of fixed length.
#[derive(Clone)]
pub struct ScalarField {
    name: String,
    arity: usize,
    eval: Arc<FieldFn>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField").field("name", &self.name).field("arity", &self.arity).finish()
    }
}

impl ScalarField {
    pub fn new<F>(name: impl Into<String>, arity: usize, eval: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        ScalarField { name: name.into(), arity, eval: Arc::new(eval) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Evaluates with shape and finiteness checks.
    pub fn eval(&self, p: &[f64]) -> Result<f64> {
        if p.len() != self.arity {
            return Err(Error::Shape { expected: self.arity, actual: p.len() });
        }
        let v = (self.eval)(p);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite(p.to_vec()))
        }
    }

    /// `F ∘ x`, a field on the oscillator space of `transform`.
    pub fn pullback(&self, transform: &Transform) -> Result<ScalarField> {
        let family = transform.family();
        if self.arity != family.atom_dim() {
            return Err(Error::Shape { expected: family.atom_dim(), actual: self.arity });
        }
        let inner = self.eval.clone();
        let t = transform.clone();
        Ok(ScalarField {
            name: format!("{}∘x", self.name),
            arity: family.osc_dim(),
            eval: Arc::new(move |u: &[f64]| inner(t.map_unchecked(u).coords())),
        })
    }

    /// `p_k` (0-based `k`).
    pub fn coordinate(dim: usize, k: usize) -> Self {
        assert!(k < dim);
        ScalarField::new(format!("x{}", k + 1), dim, move |p| p[k])
    }

    /// `|p|²`.
    pub fn norm_sq(dim: usize) -> Self {
        ScalarField::new("|x|^2", dim, |p| p.iter().map(|v| v * v).sum())
    }

    /// `p_a p_b` (0-based).
    pub fn product(dim: usize, a: usize, b: usize) -> Self {
        assert!(a < dim && b < dim);
        ScalarField::new(format!("x{}x{}", a + 1, b + 1), dim, move |p| p[a] * p[b])
    }

    /// `exp(−|p|²)`.
    pub fn gaussian(dim: usize) -> Self {
        ScalarField::new("exp(-|x|^2)", dim, |p| (-p.iter().map(|v| v * v).sum::<f64>()).exp())
    }

    /// The fixed atom-space suite `{x₁, |x|², x₁x₂, exp(−|x|²)}`.
    pub fn atom_suite(atom_dim: usize) -> Vec<ScalarField> {
        vec![
            Self::coordinate(atom_dim, 0),
            Self::norm_sq(atom_dim),
            Self::product(atom_dim, 0, 1),
            Self::gaussian(atom_dim),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DiffKind {
    Central,
    CentralExtrapolated,
}

/// Finite-difference configuration. First-derivative stencils use `step`;
/// second-derivative stencils divide by `h²` and so use the larger
/// `curvature_step`. Both are scaled by `max(1, |p|)` at the evaluation point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiffScheme {
    pub kind: DiffKind,
    pub step: f64,
    pub curvature_step: f64,
    /// Richardson levels for [`DiffKind::CentralExtrapolated`]; ignored otherwise.
    pub extrapolation_levels: u32,
}

impl Default for DiffScheme {
    fn default() -> Self {
        DiffScheme {
            kind: DiffKind::CentralExtrapolated,
            step: 1e-4,
            curvature_step: 1e-2,
            extrapolation_levels: 1,
        }
    }
}

impl DiffScheme {
    /// Plain second-order central differences.
    pub fn central(step: f64, curvature_step: f64) -> Self {
        DiffScheme { kind: DiffKind::Central, step, curvature_step, extrapolation_levels: 1 }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.step > 0.0
            && self.step.is_finite()
            && self.curvature_step > 0.0
            && self.curvature_step.is_finite()
            && self.extrapolation_levels >= 1;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid difference scheme {self:?}")))
        }
    }

    /// Both steps halved.
    pub fn halved(&self) -> Self {
        DiffScheme { step: self.step / 2.0, curvature_step: self.curvature_step / 2.0, ..*self }
    }

    fn levels(&self) -> u32 {
        match self.kind {
            DiffKind::Central => 0,
            DiffKind::CentralExtrapolated => self.extrapolation_levels,
        }
    }
}

fn scale_of(p: &[f64]) -> f64 {
    p.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Eliminates the `h², h⁴, …` terms from estimates taken at `h, h/2, h/4, …`.
fn richardson(mut table: Vec<Vec<f64>>) -> Vec<f64> {
    let mut factor = 4.0;
    while table.len() > 1 {
        table = table
            .windows(2)
            .map(|w| w[1].iter().zip(&w[0]).map(|(fine, coarse)| (factor * fine - coarse) / (factor - 1.0)).collect())
            .collect();
        factor *= 4.0;
    }
    table.pop().expect("at least one estimate")
}

/// Derivative of order 1 or 2 at `t = 0` of a vector-valued curve `g`.
fn curve_derivative<G>(g: G, order: u8, h: f64, levels: u32) -> Result<Vec<f64>>
where
    G: Fn(f64) -> Result<Vec<f64>>,
{
    let centre = if order == 2 { Some(g(0.0)?) } else { None };
    let estimates = (0..=levels)
        .map(|k| {
            let hk = h / f64::powi(2.0, k as i32);
            let plus = g(hk)?;
            let minus = g(-hk)?;
            Ok(match &centre {
                None => plus.iter().zip(&minus).map(|(a, b)| (a - b) / (2.0 * hk)).collect(),
                Some(c) => plus
                    .iter()
                    .zip(&minus)
                    .zip(c)
                    .map(|((a, b), c)| (a - 2.0 * c + b) / (hk * hk))
                    .collect(),
            })
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok(richardson(estimates))
}

fn shifted(p: &[f64], v: &[f64], t: f64) -> Vec<f64> {
    p.iter().zip(v).map(|(a, b)| a + t * b).collect()
}

/// `v·∇f(p)`.
pub fn directional_derivative(f: &ScalarField, p: &[f64], v: &[f64], scheme: &DiffScheme) -> Result<f64> {
    directional(f, p, v, 1, scheme)
}

/// `vᵀ ∇²f(p) v`.
pub fn directional_second_derivative(f: &ScalarField, p: &[f64], v: &[f64], scheme: &DiffScheme) -> Result<f64> {
    directional(f, p, v, 2, scheme)
}

fn directional(f: &ScalarField, p: &[f64], v: &[f64], order: u8, scheme: &DiffScheme) -> Result<f64> {
    scheme.validate()?;
    if p.len() != f.arity() || v.len() != f.arity() {
        return Err(Error::Shape { expected: f.arity(), actual: p.len().max(v.len()) });
    }
    let speed = norm(v);
    if speed == 0.0 {
        return Ok(0.0);
    }
    let base = if order == 1 { scheme.step } else { scheme.curvature_step };
    // step in the curve parameter so that the spatial displacement is base·scale
    let h = base * scale_of(p) / speed;
    let d = curve_derivative(|t| Ok(vec![f.eval(&shifted(p, v, t))?]), order, h, scheme.levels())?;
    Ok(d[0])
}

pub fn gradient(f: &ScalarField, p: &[f64], scheme: &DiffScheme) -> Result<Vec<f64>> {
    let mut e = vec![0.0; p.len()];
    (0..p.len())
        .map(|k| {
            e.iter_mut().for_each(|x| *x = 0.0);
            e[k] = 1.0;
            directional_derivative(f, p, &e, scheme)
        })
        .collect()
}

/// `Σ_k ∂²f/∂p_k²`.
pub fn laplacian(f: &ScalarField, p: &[f64], scheme: &DiffScheme) -> Result<f64> {
    let mut e = vec![0.0; p.len()];
    let mut sum = 0.0;
    for k in 0..p.len() {
        e.iter_mut().for_each(|x| *x = 0.0);
        e[k] = 1.0;
        sum += directional_second_derivative(f, p, &e, scheme)?;
    }
    Ok(sum)
}

/// Numerical `∂x_i/∂u_j` (a `D × d` matrix) of the coordinate map.
pub fn jacobian(transform: &Transform, u: &OscPoint, scheme: &DiffScheme) -> Result<Vec<Vec<f64>>> {
    scheme.validate()?;
    let family = transform.family();
    let d = family.osc_dim();
    if u.len() != d {
        return Err(Error::Shape { expected: d, actual: u.len() });
    }
    let p = u.coords();
    let h = scheme.step * scale_of(p);
    let mut jac = vec![vec![0.0; d]; family.atom_dim()];
    let mut e = vec![0.0; d];
    for j in 0..d {
        e.iter_mut().for_each(|x| *x = 0.0);
        e[j] = 1.0;
        let col = curve_derivative(
            |t| {
                let x = transform.map_unchecked(&shifted(p, &e, t)).0;
                if x.iter().all(|v| v.is_finite()) {
                    Ok(x)
                } else {
                    Err(Error::NonFinite(shifted(p, &e, t)))
                }
            },
            1,
            h,
            scheme.levels(),
        )?;
        for (i, v) in col.into_iter().enumerate() {
            jac[i][j] = v;
        }
    }
    Ok(jac)
}

fn check_phi_index(transform: &Transform, i: usize) -> Result<()> {
    let range = transform.family().phi_indices();
    if range.contains(&i) {
        Ok(())
    } else {
        Err(Error::InvalidOperator { index: i, first: *range.start(), last: *range.end() })
    }
}

fn check_osc_field(transform: &Transform, f: &ScalarField, u: &OscPoint) -> Result<()> {
    let d = transform.family().osc_dim();
    if f.arity() != d {
        return Err(Error::Shape { expected: d, actual: f.arity() });
    }
    if u.len() != d {
        return Err(Error::Shape { expected: d, actual: u.len() });
    }
    Ok(())
}

/// `L_i f(u) = ½ Σ_j T_ij(u) ∂f/∂u_j` for the 1-based φ index `i ∈ D+1..=d`.
pub fn phi_apply(transform: &Transform, i: usize, f: &ScalarField, u: &OscPoint, scheme: &DiffScheme) -> Result<f64> {
    check_phi_index(transform, i)?;
    check_osc_field(transform, f, u)?;
    let v = transform.matrix().eval_row(i - 1, u.coords());
    Ok(0.5 * directional_derivative(f, u.coords(), &v, scheme)?)
}

/// `L_i(L_i f)(u)`.
pub fn phi_twice_apply(transform: &Transform, i: usize, f: &ScalarField, u: &OscPoint, scheme: &DiffScheme) -> Result<f64> {
    check_phi_index(transform, i)?;
    check_osc_field(transform, f, u)?;
    let row = transform.matrix().row(i - 1);
    let v: Vec<f64> = row.iter().map(|e| e.eval(u.coords())).collect();
    let w: Vec<f64> = row.iter().map(|e| e.eval(&v)).collect();
    let first = directional_derivative(f, u.coords(), &w, scheme)?;
    let second = directional_second_derivative(f, u.coords(), &v, scheme)?;
    Ok(0.25 * (first + second))
}

/// `φ² f = −Σ_{i=D+1..d} L_i² f`. Zero for m = 1 (no φ operators).
pub fn phi_squared_apply(transform: &Transform, f: &ScalarField, u: &OscPoint, scheme: &DiffScheme) -> Result<f64> {
    check_osc_field(transform, f, u)?;
    let mut sum = 0.0;
    for i in transform.family().phi_indices() {
        sum += phi_twice_apply(transform, i, f, u, scheme)?;
    }
    Ok(-sum)
}

/// `|u|²` floor below which the Laplacian identity is not evaluated.
pub const DEFAULT_ORIGIN_FLOOR: f64 = 1e-6;

/// One evaluation of `Δ_x F = Δ_u(F∘x)/(4u²) + φ²(F∘x)/u⁴` at `x = x(u)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualRecord {
    pub family: String,
    pub field_name: String,
    pub point: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs − rhs| / max(|lhs|, 1)`.
    pub residual: f64,
    /// The `φ²(F∘x)/u⁴` contribution to `rhs`.
    pub phi_term: f64,
}

impl ResidualRecord {
    /// Residual of the reduced identity `Δ_x F = Δ_u(F∘x)/(4u²)`.
    pub fn reduced_residual(&self) -> f64 {
        (self.lhs - (self.rhs - self.phi_term)).abs() / self.lhs.abs().max(1.0)
    }
}

pub fn verify_laplacian_identity(
    transform: &Transform,
    field: &ScalarField,
    u: &OscPoint,
    scheme: &DiffScheme,
    origin_floor: f64,
) -> Result<ResidualRecord> {
    let family = transform.family();
    let u_sq = u.norm_sq();
    if u_sq < origin_floor {
        return Err(Error::SingularPoint { norm_sq: u_sq, floor: origin_floor });
    }
    let x = transform.map(u)?;
    let lhs = laplacian(field, x.coords(), scheme)?;
    let pulled = field.pullback(transform)?;
    let lap_u = laplacian(&pulled, u.coords(), scheme)?;
    let phi_term = phi_squared_apply(transform, &pulled, u, scheme)? / (u_sq * u_sq);
    let rhs = lap_u / (4.0 * u_sq) + phi_term;
    Ok(ResidualRecord {
        family: family.name().to_string(),
        field_name: field.name().to_string(),
        point: u.coords().to_vec(),
        lhs,
        rhs,
        residual: (lhs - rhs).abs() / lhs.abs().max(1.0),
        phi_term,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParityReport {
    pub field_name: String,
    pub samples: usize,
    pub failures: usize,
    /// First point where `f(u) != f(−u)`.
    pub first_failure: Option<Vec<f64>>,
}

impl ParityReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Checks `f(u) == f(−u)` exactly on `samples` seeded points of `[−2, 2]^n`.
pub fn verify_parity(f: &ScalarField, samples: usize, seed: u64) -> Result<ParityReport> {
    let mut sampler = PointSampler::new(seed);
    let mut failures = 0;
    let mut first_failure = None;
    for _ in 0..samples {
        let u = sampler.cube(f.arity(), 2.0);
        let minus: Vec<f64> = u.iter().map(|v| -v).collect();
        if f.eval(&u)? != f.eval(&minus)? {
            failures += 1;
            first_failure.get_or_insert(u);
        }
    }
    Ok(ParityReport { field_name: f.name().to_string(), samples, failures, first_failure })
}
