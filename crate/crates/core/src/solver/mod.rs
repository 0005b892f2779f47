//! Radial Schrödinger eigensolver in `dim` dimensions.
//!
//! With `R(r) = r^(−(dim−1)/2) χ(r)` the radial equation becomes
//! `−(ħ²/2μ) χ'' + V_eff χ = E χ`, where
//! `V_eff = V + (ħ²/2μ)(ν² − ¼)/r²` and `ν = l + (dim − 2)/2`. The 1-D problem
//! is discretized by three-point differences on `r_i = i·h`,
//! `h = r_max/points`, with `χ = 0` at `r = 0` and `r = r_max`.

mod tridiag;

use serde::Serialize;

pub use tridiag::SymTridiagonal;

use crate::error::{Error, Result};
use crate::format::{ser_round, ser_round_vec};
use crate::spectra::{dual_parameters, hydrogen_energy, PhysicalConstants};
use crate::transforms::FamilyDescriptor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum System {
    /// `V = ½ μ ω² r²`
    Oscillator,
    /// `V = −e²/r`
    Coulomb,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialProblem {
    pub system: System,
    pub dim: usize,
    pub l: usize,
    pub constants: PhysicalConstants,
}

impl RadialProblem {
    pub fn new(system: System, dim: usize, l: usize, constants: PhysicalConstants) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Domain(format!("dimension must be at least 2, got {dim}")));
        }
        constants.validate()?;
        Ok(RadialProblem { system, dim, l, constants })
    }

    /// `ν = l + (dim − 2)/2`.
    pub fn nu(&self) -> f64 {
        self.l as f64 + (self.dim as f64 - 2.0) / 2.0
    }

    /// Characteristic length: oscillator length `√(ħ/μω)` or Bohr radius `ħ²/μe²`.
    pub fn length_scale(&self) -> f64 {
        let c = &self.constants;
        match self.system {
            System::Oscillator => (c.hbar / (c.mu * c.omega)).sqrt(),
            System::Coulomb => c.hbar * c.hbar / (c.mu * c.e * c.e),
        }
    }

    /// Relative tolerance the default grids meet: looser for the `ν = 0` case,
    /// where `χ ~ √r` at the origin.
    pub fn default_tolerance(&self) -> f64 {
        if self.dim == 2 && self.l == 0 {
            1e-2
        } else {
            1e-3
        }
    }
}

fn bare_potential(p: &RadialProblem, r: f64) -> f64 {
    let c = &p.constants;
    match p.system {
        System::Oscillator => 0.5 * c.mu * c.omega * c.omega * r * r,
        System::Coulomb => -c.e * c.e / r,
    }
}

pub fn effective_potential(p: &RadialProblem, r: f64) -> Result<f64> {
    if r.is_nan() || r <= 0.0 {
        return Err(Error::Domain(format!("radius must be positive, got {r}")));
    }
    let c = &p.constants;
    let nu = p.nu();
    Ok(bare_potential(p, r) + c.hbar * c.hbar / (2.0 * c.mu) * (nu * nu - 0.25) / (r * r))
}

/// Minimum accepted number of grid intervals.
pub const MIN_POINTS: usize = 100;
pub const DEFAULT_POINTS: usize = 8000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridConfig {
    #[serde(serialize_with = "ser_round")]
    pub r_max: f64,
    pub points: usize,
}

impl GridConfig {
    pub fn new(r_max: f64, points: usize) -> Result<Self> {
        let g = GridConfig { r_max, points };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < MIN_POINTS {
            return Err(Error::Config(format!("grid needs at least {MIN_POINTS} points, got {}", self.points)));
        }
        if !(self.r_max > 0.0 && self.r_max.is_finite()) {
            return Err(Error::Config(format!("r_max must be positive, got {}", self.r_max)));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        self.r_max / self.points as f64
    }

    /// `r_min`, the first interior node.
    pub fn r_min(&self) -> f64 {
        self.spacing()
    }

    /// Default grid for the lowest `levels` states of `p`: 12 oscillator
    /// lengths, or `max(40, 6κ²)` Bohr radii for Coulomb where `κ` is the
    /// effective principal number of the highest requested level.
    pub fn default_for(p: &RadialProblem, levels: usize) -> Self {
        let a = p.length_scale();
        let r_max = match p.system {
            System::Oscillator => 12.0 * a,
            System::Coulomb => {
                let kappa = levels.saturating_sub(1) as f64 + p.l as f64 + (p.dim as f64 - 1.0) / 2.0;
                (6.0 * kappa * kappa).max(40.0) * a
            }
        };
        GridConfig { r_max, points: DEFAULT_POINTS }
    }
}

/// Discretized radial Hamiltonian together with the grid that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialOperator {
    pub matrix: SymTridiagonal,
    pub grid: GridConfig,
}

/// `points − 1` interior unknowns; diagonal `ħ²/(μh²) + V_eff(r_i)`,
/// off-diagonal `−ħ²/(2μh²)`.
///
/// At `ν = 0` the point-grid scheme converges only like `1/|ln h|`, so that
/// case uses cell centres `r_i = (i − ½)h` and the flux form of
/// `−(ħ²/2μ) r^{-1}(r R')'` on `χ = √r R`, which is second order and keeps
/// the regular solution. Diagonal `ħ²/(μh²) + V(r_i)`, off-diagonal
/// `−ħ²/(2μh²) · r_{i+½}/√(r_i r_{i+1})`.
pub fn discretize(p: &RadialProblem, g: &GridConfig) -> Result<RadialOperator> {
    g.validate()?;
    let h = g.spacing();
    let c = &p.constants;
    let kinetic = c.hbar * c.hbar / (c.mu * h * h);
    let n = g.points - 1;
    let matrix = if p.nu() == 0.0 {
        let diag = (1..=n).map(|i| kinetic + bare_potential(p, (i as f64 - 0.5) * h)).collect();
        let off = (1..n)
            .map(|i| {
                let i = i as f64;
                -0.5 * kinetic * i / ((i - 0.5) * (i + 0.5)).sqrt()
            })
            .collect();
        SymTridiagonal::new(diag, off)?
    } else {
        let diag = (1..=n)
            .map(|i| effective_potential(p, i as f64 * h).map(|v| kinetic + v))
            .collect::<Result<Vec<f64>>>()?;
        SymTridiagonal::new(diag, vec![-0.5 * kinetic; n - 1])?
    };
    Ok(RadialOperator { matrix, grid: *g })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenResult {
    #[serde(serialize_with = "ser_round_vec")]
    pub eigenvalues: Vec<f64>,
    pub grid: GridConfig,
    /// Widest final bisection bracket.
    #[serde(serialize_with = "ser_round")]
    pub residual_estimate: f64,
}

pub fn lowest_eigenvalues(op: &RadialOperator, k: usize) -> Result<EigenResult> {
    let (eigenvalues, width) = op.matrix.lowest_eigenvalues(k)?;
    Ok(EigenResult { eigenvalues, grid: op.grid, residual_estimate: width })
}

/// Textbook energy of radial level `n_r`.
pub fn closed_form(p: &RadialProblem, n_r: usize) -> f64 {
    let c = &p.constants;
    let (n_r, l, dim) = (n_r as f64, p.l as f64, p.dim as f64);
    match p.system {
        System::Oscillator => c.hbar * c.omega * (2.0 * n_r + l + dim / 2.0),
        System::Coulomb => {
            let k = n_r + l + (dim - 1.0) / 2.0;
            -c.mu * c.e.powi(4) / (2.0 * c.hbar * c.hbar * k * k)
        }
    }
}

/// Discretize on `grid` (or the default grid) and return the lowest `levels`.
pub fn solve(p: &RadialProblem, levels: usize, grid: Option<GridConfig>) -> Result<EigenResult> {
    let g = grid.unwrap_or_else(|| GridConfig::default_for(p, levels));
    lowest_eigenvalues(&discretize(p, &g)?, levels)
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Grid overrides for the duality check: `r_max` applies to the atom problem
/// (the oscillator grid follows the dual frequency), `points` to both.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualityGrid {
    pub atom_r_max: Option<f64>,
    pub points: usize,
}

impl Default for DualityGrid {
    fn default() -> Self {
        DualityGrid { atom_r_max: None, points: DEFAULT_POINTS }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualityRecord {
    pub m: u32,
    /// 1-based s-level of the atom.
    pub level: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "E_numeric", serialize_with = "ser_round")]
    pub energy_numeric: f64,
    #[serde(rename = "E_closed_form", serialize_with = "ser_round")]
    pub energy_closed_form: f64,
    #[serde(serialize_with = "ser_round")]
    pub omega_dual: f64,
    #[serde(serialize_with = "ser_round")]
    pub epsilon_numeric: f64,
    #[serde(serialize_with = "ser_round")]
    pub epsilon_closed_form: f64,
    #[serde(serialize_with = "ser_round")]
    pub rel_err_atom: f64,
    #[serde(serialize_with = "ser_round")]
    pub rel_err_osc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualityReport {
    pub records: Vec<DualityRecord>,
    pub tolerance: f64,
    /// Set when a deviation exceeds `tolerance`; typically an under-resolved grid.
    pub diagnostics: Option<String>,
}

impl DualityReport {
    pub fn passed(&self) -> bool {
        self.diagnostics.is_none()
    }
}

/// Solves the `D`-dimensional Coulomb s-states, maps each energy to its dual
/// frequency, solves the `d`-dimensional oscillator at that frequency, and
/// checks that level `N = 2 n_r` sits at `ε = 4e²`.
///
/// `tolerance = None` uses 1e-3 (1e-2 when either dimension is 2).
pub fn duality_check(
    m: u32,
    levels: usize,
    grid: &DualityGrid,
    c: &PhysicalConstants,
    tolerance: Option<f64>,
) -> Result<DualityReport> {
    let family = FamilyDescriptor::new(m)?;
    if levels == 0 {
        return Err(Error::Domain("levels must be at least 1".into()));
    }
    let atom = RadialProblem::new(System::Coulomb, family.atom_dim(), 0, *c)?;
    let atom_grid = GridConfig::new(
        grid.atom_r_max.unwrap_or_else(|| GridConfig::default_for(&atom, levels).r_max),
        grid.points,
    )?;
    let atom_levels = solve(&atom, levels, Some(atom_grid))?;

    let target = 4.0 * c.e * c.e;
    let mut records = Vec::with_capacity(levels);
    for (j, &energy) in atom_levels.eigenvalues.iter().enumerate() {
        let n = 2 * j;
        let closed = hydrogen_energy(n as i64, m, c)?;
        let dual = dual_parameters(energy, c)?;
        let osc = RadialProblem::new(System::Oscillator, family.osc_dim(), 0, c.with_omega(dual.omega))?;
        let osc_grid = GridConfig::new(GridConfig::default_for(&osc, j + 1).r_max, grid.points)?;
        let eps = solve(&osc, j + 1, Some(osc_grid))?.eigenvalues[j];
        let eps_closed = c.hbar * dual.omega * (n + family.half_dim()) as f64;
        records.push(DualityRecord {
            m,
            level: j + 1,
            n,
            energy_numeric: energy,
            energy_closed_form: closed,
            omega_dual: dual.omega,
            epsilon_numeric: eps,
            epsilon_closed_form: eps_closed,
            rel_err_atom: rel_err(energy, closed),
            rel_err_osc: rel_err(eps, target),
        });
    }

    let tolerance = tolerance.unwrap_or(if family.atom_dim() == 2 || family.osc_dim() == 2 { 1e-2 } else { 1e-3 });
    let worst = records.iter().map(|r| r.rel_err_atom.max(r.rel_err_osc)).fold(0.0, f64::max);
    let diagnostics = (worst > tolerance).then(|| {
        format!(
            "max relative deviation {worst:.3e} exceeds tolerance {tolerance:e}; grid under-resolved \
             (points={}, atom r_max={})",
            grid.points, atom_grid.r_max
        )
    });
    Ok(DualityReport { records, tolerance, diagnostics })
}

/// An oscillator level and, if one exists, the Coulomb s-level it maps to.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartnerRecord {
    #[serde(rename = "N")]
    pub n: usize,
    pub l: usize,
    #[serde(serialize_with = "ser_round")]
    pub epsilon_numeric: f64,
    /// `E = −μω²/8` at the frequency that puts this level at `ε = 4e²`.
    #[serde(serialize_with = "ser_round")]
    pub energy_dual: f64,
    /// 1-based Coulomb s-level within tolerance of `energy_dual`.
    pub partner: Option<usize>,
}

/// Labels the lowest `osc_levels` oscillator levels (`N = 2n_r + l`, from the
/// `l = 0` and `l = 1` channels) and looks for a numeric Coulomb partner of
/// each under the `ε = 4e²` bridge.
pub fn duality_partners(
    m: u32,
    osc_levels: usize,
    points: usize,
    c: &PhysicalConstants,
    tolerance: f64,
) -> Result<Vec<PartnerRecord>> {
    let family = FamilyDescriptor::new(m)?;
    if osc_levels == 0 {
        return Err(Error::Domain("osc_levels must be at least 1".into()));
    }
    let per_channel = osc_levels.div_ceil(2);
    let mut levels: Vec<(usize, usize, f64)> = Vec::new();
    for l in 0..=1 {
        let osc = RadialProblem::new(System::Oscillator, family.osc_dim(), l, *c)?;
        let g = GridConfig::new(GridConfig::default_for(&osc, per_channel).r_max, points)?;
        for (n_r, e) in solve(&osc, per_channel, Some(g))?.eigenvalues.into_iter().enumerate() {
            levels.push((2 * n_r + l, l, e));
        }
    }
    levels.sort_by(|a, b| a.2.total_cmp(&b.2));
    levels.truncate(osc_levels);

    let coulomb_levels = osc_levels / 2 + 1;
    let atom = RadialProblem::new(System::Coulomb, family.atom_dim(), 0, *c)?;
    let g = GridConfig::new(GridConfig::default_for(&atom, coulomb_levels).r_max, points)?;
    let atom_levels = solve(&atom, coulomb_levels, Some(g))?.eigenvalues;

    let target = 4.0 * c.e * c.e;
    Ok(levels
        .into_iter()
        .map(|(n, l, eps)| {
            let omega = c.omega * target / eps;
            let energy_dual = -c.mu * omega * omega / 8.0;
            let partner = atom_levels.iter().position(|&e| rel_err(e, energy_dual) < tolerance).map(|j| j + 1);
            PartnerRecord { n, l, epsilon_numeric: eps, energy_dual, partner }
        })
        .collect())
}
