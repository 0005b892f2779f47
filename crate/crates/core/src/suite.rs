//! Seeded verification suites over one transform.
//!
//! Every sampled check draws from its own stream (`seed + salt`), so adding
//! or reordering checks never changes the points another check sees.

use serde::Serialize;

use crate::error::Result;
use crate::format::ser_round;
use crate::operators::{
    gradient, jacobian, phi_apply, verify_laplacian_identity, verify_parity, DiffScheme, ScalarField,
    DEFAULT_ORIGIN_FLOOR,
};
use crate::rng::PointSampler;
use crate::transforms::{check_divergence, check_orthogonality, OscPoint, Transform};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Relative deviation of `|x|` from `|u|²`.
    pub euler: f64,
    /// Max-norm deviation of the numerical Jacobian from `2T(u)`.
    pub jacobian: f64,
    /// `|L_i(F∘x)|`.
    pub annihilation: f64,
    /// Relative Laplacian-identity residual.
    pub laplacian: f64,
    /// Minimum residual ratio when the step halves.
    pub convergence_ratio: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { euler: 1e-12, jacobian: 1e-6, annihilation: 1e-8, laplacian: 1e-5, convergence_ratio: 3.0 }
    }
}

impl Tolerances {
    /// Every numeric tolerance set to `tol`; the convergence ratio is kept.
    pub fn uniform(tol: f64) -> Self {
        Tolerances { euler: tol, jacobian: tol, annihilation: tol, laplacian: tol, ..Tolerances::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub samples: usize,
    pub seed: u64,
    pub scheme: DiffScheme,
    pub tolerances: Tolerances,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { samples: 100, seed: 0, scheme: DiffScheme::default(), tolerances: Tolerances::default() }
    }
}

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub samples: usize,
    /// For exact checks, the number of failing items.
    #[serde(serialize_with = "ser_round")]
    pub max_residual: f64,
    #[serde(serialize_with = "ser_round")]
    pub tolerance: f64,
    pub passed: bool,
    pub detail: Option<String>,
}

impl CheckResult {
    fn below(name: &str, samples: usize, max_residual: f64, tolerance: f64, detail: Option<String>) -> Self {
        CheckResult {
            name: name.to_string(),
            samples,
            max_residual,
            tolerance,
            passed: max_residual < tolerance,
            detail,
        }
    }

    fn exact(name: &str, samples: usize, failures: usize, detail: Option<String>) -> Self {
        CheckResult {
            name: name.to_string(),
            samples,
            max_residual: failures as f64,
            tolerance: 0.0,
            passed: failures == 0,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub family: String,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

const SALT_EULER: u64 = 1;
const SALT_JACOBIAN: u64 = 2;
const SALT_CHAIN: u64 = 3;
const SALT_ANNIHILATION: u64 = 4;
const SALT_LAPLACIAN: u64 = 5;
const SALT_CONVERGENCE: u64 = 6;
const SALT_PARITY: u64 = 7;

fn sampler(seed: u64, salt: u64) -> PointSampler {
    PointSampler::new(seed.wrapping_add(salt))
}

/// Max over `samples` points of `[−2, 2]^d` of `| |x| − |u|² | / |u|²`.
pub fn euler_check(t: &Transform, samples: usize, seed: u64, tol: f64) -> Result<CheckResult> {
    let d = t.family().osc_dim();
    let mut s = sampler(seed, SALT_EULER);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let u = OscPoint::new(s.cube(d, 2.0));
        let u_sq = u.norm_sq();
        if u_sq == 0.0 {
            continue;
        }
        let x = t.map(&u)?;
        worst = worst.max((x.norm() - u_sq).abs() / u_sq);
    }
    Ok(CheckResult::below("euler", samples, worst, tol, None))
}

fn failure_detail<I: Iterator<Item = String>>(items: I, total: usize) -> Option<String> {
    let shown: Vec<String> = items.take(4).collect();
    if shown.is_empty() {
        return None;
    }
    let more = if total > shown.len() { format!(" (+{} more)", total - shown.len()) } else { String::new() };
    Some(format!("{}{more}", shown.join("; ")))
}

/// Symbolic `Σ_j T_ij T_kj = u² δ_ik` over all rows.
pub fn orthogonality_check(t: &Transform) -> CheckResult {
    let report = check_orthogonality(t.matrix());
    let atom_dim = t.family().atom_dim();
    let detail = failure_detail(
        report.failures.iter().map(|f| format!("rows ({},{}): {}", f.i, f.k, f.residual_string())),
        report.failures.len(),
    )
    .map(|d| {
        format!(
            "{d} [coordinate block {}, mixed {}, φ block {}]",
            report.coordinate_block_failures(atom_dim).count(),
            report.mixed_failures(atom_dim).count(),
            report.phi_block_failures(atom_dim).count()
        )
    });
    CheckResult::exact("orthogonality", report.pairs_checked, report.failures.len(), detail)
}

/// Symbolic `Σ_j ∂T_ij/∂u_j = 0` for every row.
pub fn divergence_check(t: &Transform) -> CheckResult {
    let report = check_divergence(t.matrix());
    let failures = report.failures();
    let detail = failure_detail(failures.iter().map(|(i, d)| format!("row {i}: {d:+}")), failures.len());
    CheckResult::exact("divergence", report.divergences.len(), failures.len(), detail)
}

/// Max-norm of `jacobian(u) − 2T(u)` over the coordinate rows.
pub fn jacobian_check(t: &Transform, samples: usize, seed: u64, scheme: &DiffScheme, tol: f64) -> Result<CheckResult> {
    let d = t.family().osc_dim();
    let mut s = sampler(seed, SALT_JACOBIAN);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let u = OscPoint::new(s.cube(d, 2.0));
        let jac = jacobian(t, &u, scheme)?;
        for (row, exact) in jac.iter().zip(t.coordinate_rows(&u)?) {
            for (a, b) in row.iter().zip(exact) {
                worst = worst.max((a - 2.0 * b).abs());
            }
        }
    }
    Ok(CheckResult::below("jacobian", samples, worst, tol, None))
}

/// `∂(F∘x)/∂u_j = 2 Σ_k T_kj ∂F/∂x_k` for the atom field suite.
pub fn chain_rule_check(t: &Transform, samples: usize, seed: u64, scheme: &DiffScheme, tol: f64) -> Result<CheckResult> {
    let family = t.family();
    let fields = ScalarField::atom_suite(family.atom_dim());
    let pulled: Vec<ScalarField> = fields.iter().map(|f| f.pullback(t)).collect::<Result<_>>()?;
    let mut s = sampler(seed, SALT_CHAIN);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let u = OscPoint::new(s.cube(family.osc_dim(), 2.0));
        let x = t.map(&u)?;
        let rows = t.coordinate_rows(&u)?;
        for (f, g) in fields.iter().zip(&pulled) {
            let grad_x = gradient(f, x.coords(), scheme)?;
            let grad_u = gradient(g, u.coords(), scheme)?;
            for (j, gu) in grad_u.iter().enumerate() {
                let expected: f64 = rows.iter().zip(&grad_x).map(|(row, gx)| 2.0 * row[j] * gx).sum();
                worst = worst.max((gu - expected).abs() / expected.abs().max(1.0));
            }
        }
    }
    Ok(CheckResult::below("chain_rule", samples, worst, tol, None))
}

/// `|L_i(F∘x)(u)|` for every φ index and the atom field suite.
pub fn annihilation_check(t: &Transform, samples: usize, seed: u64, scheme: &DiffScheme, tol: f64) -> Result<CheckResult> {
    let family = t.family();
    if family.phi_count() == 0 {
        return Ok(CheckResult {
            detail: Some("no φ operators".to_string()),
            ..CheckResult::below("annihilation", 0, 0.0, tol, None)
        });
    }
    let pulled: Vec<ScalarField> =
        ScalarField::atom_suite(family.atom_dim()).iter().map(|f| f.pullback(t)).collect::<Result<_>>()?;
    let mut s = sampler(seed, SALT_ANNIHILATION);
    let mut worst: f64 = 0.0;
    let mut worst_at = None;
    for _ in 0..samples {
        let u = OscPoint::new(s.cube(family.osc_dim(), 2.0));
        for g in &pulled {
            for i in family.phi_indices() {
                let v = phi_apply(t, i, g, &u, scheme)?.abs();
                if v > worst {
                    worst = v;
                    worst_at = Some((i, g.name().to_string()));
                }
            }
        }
    }
    let detail = worst_at.filter(|_| worst >= tol).map(|(i, name)| format!("worst: φ{i} on {name}"));
    Ok(CheckResult::below("annihilation", samples, worst, tol, detail))
}

/// Relative residual of the Laplacian identity, `|u| ∈ [0.5, 2]`.
pub fn laplacian_check(t: &Transform, samples: usize, seed: u64, scheme: &DiffScheme, tol: f64) -> Result<CheckResult> {
    let family = t.family();
    let fields = ScalarField::atom_suite(family.atom_dim());
    let mut s = sampler(seed, SALT_LAPLACIAN);
    let mut worst: f64 = 0.0;
    let mut worst_reduced: f64 = 0.0;
    for _ in 0..samples {
        let u = OscPoint::new(s.shell(family.osc_dim(), 0.5, 2.0));
        for f in &fields {
            let r = verify_laplacian_identity(t, f, &u, scheme, DEFAULT_ORIGIN_FLOOR)?;
            worst = worst.max(r.residual);
            worst_reduced = worst_reduced.max(r.reduced_residual());
        }
    }
    let detail = Some(format!("without φ² term: {}", crate::format::fmt12(worst_reduced)));
    Ok(CheckResult::below("laplacian_identity", samples, worst, tol, detail))
}

/// Coarse plain central step at which truncation error dominates round-off.
pub const CONVERGENCE_STEP: f64 = 2e-2;
/// Residuals below this are round-off and carry no convergence signal.
pub const ROUNDOFF_FLOOR: f64 = 1e-9;

/// Smallest ratio `residual(h) / residual(h/2)` over the polynomial fields
/// whose coarse residual is above the round-off floor.
pub fn convergence_check(t: &Transform, samples: usize, seed: u64, min_ratio: f64) -> Result<CheckResult> {
    let family = t.family();
    let d = family.atom_dim();
    let fields = [ScalarField::coordinate(d, 0), ScalarField::norm_sq(d), ScalarField::product(d, 0, 1)];
    let coarse = DiffScheme::central(CONVERGENCE_STEP, CONVERGENCE_STEP);
    let fine = coarse.halved();
    let mut s = sampler(seed, SALT_CONVERGENCE);
    let points: Vec<OscPoint> = (0..samples).map(|_| OscPoint::new(s.shell(family.osc_dim(), 0.5, 2.0))).collect();
    let mut ratio = f64::INFINITY;
    let mut exact_fields = Vec::new();
    for f in &fields {
        let (mut a, mut b): (f64, f64) = (0.0, 0.0);
        for u in &points {
            a = a.max(verify_laplacian_identity(t, f, u, &coarse, DEFAULT_ORIGIN_FLOOR)?.residual);
            b = b.max(verify_laplacian_identity(t, f, u, &fine, DEFAULT_ORIGIN_FLOOR)?.residual);
        }
        if a > ROUNDOFF_FLOOR {
            ratio = ratio.min(a / b);
        } else {
            exact_fields.push(f.name().to_string());
        }
    }
    let detail = (!exact_fields.is_empty()).then(|| format!("exact to round-off: {}", exact_fields.join(", ")));
    Ok(CheckResult {
        name: "convergence".to_string(),
        samples,
        max_residual: ratio,
        tolerance: min_ratio,
        passed: ratio >= min_ratio,
        detail,
    })
}

/// `F∘x(u) == F∘x(−u)` exactly for the atom field suite.
pub fn parity_check(t: &Transform, samples: usize, seed: u64) -> Result<CheckResult> {
    let family = t.family();
    let mut failures = 0;
    let mut detail = None;
    for f in ScalarField::atom_suite(family.atom_dim()) {
        let report = verify_parity(&f.pullback(t)?, samples, seed.wrapping_add(SALT_PARITY))?;
        failures += report.failures;
        if detail.is_none() && !report.passed() {
            detail = Some(format!("{} is not even", report.field_name));
        }
    }
    Ok(CheckResult::exact("parity", samples, failures, detail))
}

/// Number of points used by the step-halving check.
pub fn convergence_samples(samples: usize) -> usize {
    samples.clamp(1, 10)
}

/// Every transform and operator check, in a fixed order.
pub fn run_verify(t: &Transform, cfg: &SuiteConfig) -> Result<VerifyReport> {
    cfg.scheme.validate()?;
    let (n, seed, tol) = (cfg.samples, cfg.seed, &cfg.tolerances);
    let checks = vec![
        euler_check(t, n, seed, tol.euler)?,
        orthogonality_check(t),
        divergence_check(t),
        jacobian_check(t, n, seed, &cfg.scheme, tol.jacobian)?,
        chain_rule_check(t, n, seed, &cfg.scheme, tol.jacobian)?,
        annihilation_check(t, n, seed, &cfg.scheme, tol.annihilation)?,
        laplacian_check(t, n, seed, &cfg.scheme, tol.laplacian)?,
        convergence_check(t, convergence_samples(n), seed, tol.convergence_ratio)?,
        parity_check(t, n, seed)?,
    ];
    Ok(VerifyReport { family: t.family().name().to_string(), seed, checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::{FamilyDescriptor, SignedIndexMatrix};

    fn canonical(m: u32) -> Transform {
        Transform::canonical(FamilyDescriptor::new(m).unwrap())
    }

    #[test]
    fn ks_suite_passes() {
        let cfg = SuiteConfig { samples: 20, seed: 3, ..SuiteConfig::default() };
        let report = run_verify(&canonical(2), &cfg).unwrap();
        for c in &report.checks {
            assert!(c.passed, "{c:?}");
        }
        assert_eq!(report.checks.len(), 9);
    }

    #[test]
    fn lc_has_no_phi_operators() {
        let c = annihilation_check(&canonical(1), 10, 0, &DiffScheme::default(), 1e-8).unwrap();
        assert!(c.passed);
        assert_eq!(c.samples, 0);
    }

    #[test]
    fn same_seed_same_report() {
        let cfg = SuiteConfig { samples: 5, seed: 11, ..SuiteConfig::default() };
        let a = run_verify(&canonical(3), &cfg).unwrap();
        let b = run_verify(&canonical(3), &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn broken_matrix_is_located() {
        // KS rows with a transposed sign pair
        let m: SignedIndexMatrix = "+1 -2 -3 +4\n+2 +1 -4 +3\n+3 -4 +1 +2\n+4 -3 -2 -1\n".parse().unwrap();
        let t = Transform::with_matrix(FamilyDescriptor::new(2).unwrap(), m).unwrap();
        let c = orthogonality_check(&t);
        assert!(!c.passed);
        assert!(c.detail.unwrap().contains("rows (1,3)"));
        assert!(!euler_check(&t, 50, 1, 1e-12).unwrap().passed);
    }

    #[test]
    fn convergence_ratio_is_second_order() {
        let c = convergence_check(&canonical(2), 3, 1, 3.0).unwrap();
        assert!(c.max_residual > 3.5 && c.max_residual < 4.5, "{c:?}");
        assert!(c.detail.unwrap().contains("x1"));
    }

    #[test]
    fn uniform_tolerance() {
        let t = Tolerances::uniform(1e-3);
        assert_eq!((t.euler, t.laplacian, t.convergence_ratio), (1e-3, 1e-3, 3.0));
    }
}
