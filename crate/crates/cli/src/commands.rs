use std::fmt::Write as _;

use quadmap::format::fmt12;
use quadmap::solver::{closed_form, duality_check, solve, DualityGrid, GridConfig, RadialProblem, System, DEFAULT_POINTS};
use quadmap::spectra::{spectrum_table, table_to_csv, table_to_json, table_to_text, PhysicalConstants};
use quadmap::suite::{run_verify, SuiteConfig, Tolerances};
use quadmap::{build_matrix, FamilyDescriptor, OscPoint, SignedIndexMatrix, Transform};
use serde_json::json;

use crate::settings::{CliError, CliResult, Format, Settings};

/// Rendered output and whether every check passed.
pub struct Outcome {
    pub stdout: String,
    pub passed: bool,
    /// Printed to stderr when the run fails.
    pub diagnostics: Option<String>,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, passed: true, diagnostics: None }
    }
}

const DEFAULT_SAMPLES: usize = 100;
const DEFAULT_SEED: u64 = 0;
const DEFAULT_NMAX: i64 = 5;
const DEFAULT_LEVELS: usize = 3;
const MAP_TOLERANCE: f64 = 1e-12;

fn csv_string(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 csv")
}

fn pretty(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn load_transform(s: &Settings, family: FamilyDescriptor) -> CliResult<Transform> {
    match &s.matrix_file {
        None => Ok(Transform::canonical(family)),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read matrix file {}: {e}", path.display())))?;
            let m: SignedIndexMatrix = text
                .parse()
                .map_err(|e| CliError::Config(format!("matrix file {}: {e}", path.display())))?;
            Ok(Transform::with_matrix(family, m)?)
        }
    }
}

pub fn verify(s: &Settings) -> CliResult<Outcome> {
    let family = s.require_family()?;
    let t = load_transform(s, family)?;
    let cfg = SuiteConfig {
        samples: s.samples.unwrap_or(DEFAULT_SAMPLES),
        seed: s.seed.unwrap_or(DEFAULT_SEED),
        tolerances: s.tol.map(Tolerances::uniform).unwrap_or_default(),
        ..SuiteConfig::default()
    };
    let report = run_verify(&t, &cfg)?;
    let stdout = match s.format {
        Format::Json => pretty(&report),
        Format::Csv => csv_string(
            &["check", "samples", "max_residual", "tolerance", "passed", "detail"],
            report
                .checks
                .iter()
                .map(|c| {
                    vec![
                        c.name.clone(),
                        c.samples.to_string(),
                        fmt12(c.max_residual),
                        fmt12(c.tolerance),
                        c.passed.to_string(),
                        c.detail.clone().unwrap_or_default(),
                    ]
                })
                .collect(),
        ),
        Format::Text => {
            let matrix = s.matrix_file.as_ref().map_or("built-in".to_string(), |p| p.display().to_string());
            let mut out = format!(
                "verify family={} seed={} samples={} matrix={matrix}\n",
                family.name(),
                cfg.seed,
                cfg.samples
            );
            let _ = writeln!(out, "{:<20} {:>7}  {:>20}  {:>10}  status", "check", "samples", "max_residual", "tolerance");
            for c in &report.checks {
                let _ = writeln!(
                    out,
                    "{:<20} {:>7}  {:>20}  {:>10}  {}",
                    c.name,
                    c.samples,
                    fmt12(c.max_residual),
                    fmt12(c.tolerance),
                    if c.passed { "PASS" } else { "FAIL" }
                );
                if let Some(d) = &c.detail {
                    let _ = writeln!(out, "    {d}");
                }
            }
            let _ = writeln!(out, "overall: {}", if report.passed() { "PASS" } else { "FAIL" });
            out
        }
    };
    let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    Ok(Outcome {
        stdout,
        passed: failed.is_empty(),
        diagnostics: (!failed.is_empty()).then(|| format!("failed checks: {}", failed.join(", "))),
    })
}

pub fn map(s: &Settings, coords: &[f64]) -> CliResult<Outcome> {
    let family = s.require_family()?;
    let t = load_transform(s, family)?;
    let u = OscPoint::new(coords.to_vec());
    let x = t.map(&u)?;
    let (norm_x, u_sq) = (x.norm(), u.norm_sq());
    let tol = s.tol.unwrap_or(MAP_TOLERANCE);
    let deviation = if u_sq > 0.0 { (norm_x - u_sq).abs() / u_sq } else { norm_x };
    let rendered: Vec<String> = x.coords().iter().map(|v| fmt12(*v)).collect();
    let stdout = match s.format {
        Format::Text => format!("x = {}; |x|={} |u|^2={}\n", rendered.join(" "), fmt12(norm_x), fmt12(u_sq)),
        Format::Csv => {
            let mut header: Vec<String> = (1..=x.coords().len()).map(|i| format!("x{i}")).collect();
            header.extend(["norm_x".to_string(), "norm_u_sq".to_string()]);
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            let mut row = rendered.clone();
            row.extend([fmt12(norm_x), fmt12(u_sq)]);
            csv_string(&header, vec![row])
        }
        Format::Json => {
            let r = |v: f64| quadmap::format::round12(v);
            pretty(&json!({
                "family": family.name(),
                "u": u.coords().iter().map(|v| r(*v)).collect::<Vec<_>>(),
                "x": x.coords().iter().map(|v| r(*v)).collect::<Vec<_>>(),
                "norm_x": r(norm_x),
                "norm_u_sq": r(u_sq),
            }))
        }
    };
    let passed = deviation <= tol;
    Ok(Outcome {
        stdout,
        passed,
        diagnostics: (!passed).then(|| format!("|x| deviates from |u|^2 by {} (relative)", fmt12(deviation))),
    })
}

pub fn spectrum(s: &Settings) -> CliResult<Outcome> {
    let family = s.require_family()?;
    let rows = spectrum_table(family.m(), s.nmax.unwrap_or(DEFAULT_NMAX), &PhysicalConstants::default())?;
    Ok(Outcome::ok(match s.format {
        Format::Json => {
            let mut out = table_to_json(&rows);
            out.push('\n');
            out
        }
        Format::Csv => table_to_csv(&rows),
        Format::Text => table_to_text(&rows),
    }))
}

fn parse_system(name: &str) -> CliResult<System> {
    match name {
        "oscillator" | "osc" => Ok(System::Oscillator),
        "coulomb" | "atom" => Ok(System::Coulomb),
        other => Err(CliError::Config(format!("unknown system `{other}`; expected oscillator or coulomb"))),
    }
}

pub fn solve_cmd(s: &Settings) -> CliResult<Outcome> {
    let system = parse_system(s.system.as_deref().unwrap_or("oscillator"))?;
    let dim = match (s.dim, s.family) {
        (Some(d), _) => d,
        (None, Some(f)) => match system {
            System::Oscillator => f.osc_dim(),
            System::Coulomb => f.atom_dim(),
        },
        (None, None) => return Err(CliError::Config("solve needs --dim or --family".into())),
    };
    let l = s.l.unwrap_or(0);
    let levels = s.levels.unwrap_or(DEFAULT_LEVELS);
    let p = RadialProblem::new(system, dim, l, PhysicalConstants::default())?;
    let default = GridConfig::default_for(&p, levels);
    let grid = GridConfig::new(s.rmax.unwrap_or(default.r_max), s.points.unwrap_or(default.points))?;
    let result = solve(&p, levels, Some(grid))?;
    let tol = s.tol.unwrap_or_else(|| p.default_tolerance());
    let rows: Vec<(usize, usize, f64, f64, f64)> = result
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(n_r, &e)| {
            let exact = closed_form(&p, n_r);
            (n_r, 2 * n_r + l, e, exact, (e - exact).abs() / exact.abs())
        })
        .collect();
    let worst = rows.iter().map(|r| r.4).fold(0.0, f64::max);
    let passed = worst < tol;
    let system_name = match system {
        System::Oscillator => "oscillator",
        System::Coulomb => "coulomb",
    };
    let stdout = match s.format {
        Format::Json => pretty(&json!({
            "system": system_name,
            "dim": dim,
            "l": l,
            "result": result,
            "tolerance": tol,
            "levels": rows.iter().map(|r| json!({
                "n_r": r.0,
                "N": r.1,
                "E_numeric": quadmap::format::round12(r.2),
                "E_closed_form": quadmap::format::round12(r.3),
                "rel_err": quadmap::format::round12(r.4),
            })).collect::<Vec<_>>(),
            "passed": passed,
        })),
        Format::Csv => csv_string(
            &["n_r", "N", "E_numeric", "E_closed_form", "rel_err"],
            rows.iter().map(|r| vec![r.0.to_string(), r.1.to_string(), fmt12(r.2), fmt12(r.3), fmt12(r.4)]).collect(),
        ),
        Format::Text => {
            let mut out = format!(
                "solve system={system_name} dim={dim} l={l} r_max={} points={} residual_estimate={}\n",
                fmt12(result.grid.r_max),
                result.grid.points,
                fmt12(result.residual_estimate)
            );
            let _ = writeln!(out, "{:>4} {:>4}  {:>20}  {:>20}  {:>20}", "n_r", "N", "E_numeric", "E_closed_form", "rel_err");
            for r in &rows {
                let _ = writeln!(out, "{:>4} {:>4}  {:>20}  {:>20}  {:>20}", r.0, r.1, fmt12(r.2), fmt12(r.3), fmt12(r.4));
            }
            let _ = writeln!(out, "overall: {} (tolerance {})", if passed { "PASS" } else { "FAIL" }, fmt12(tol));
            out
        }
    };
    Ok(Outcome {
        stdout,
        passed,
        diagnostics: (!passed).then(|| format!("max relative error {} exceeds {}", fmt12(worst), fmt12(tol))),
    })
}

pub fn duality(s: &Settings) -> CliResult<Outcome> {
    let family = s.require_family()?;
    let grid = DualityGrid { atom_r_max: s.rmax, points: s.points.unwrap_or(DEFAULT_POINTS) };
    let report =
        duality_check(family.m(), s.levels.unwrap_or(DEFAULT_LEVELS), &grid, &PhysicalConstants::default(), s.tol)?;
    let stdout = match s.format {
        Format::Json => pretty(&report),
        Format::Csv => csv_string(
            &[
                "m",
                "level",
                "N",
                "E_numeric",
                "E_closed_form",
                "omega_dual",
                "epsilon_numeric",
                "epsilon_closed_form",
                "rel_err_atom",
                "rel_err_osc",
            ],
            report
                .records
                .iter()
                .map(|r| {
                    vec![
                        r.m.to_string(),
                        r.level.to_string(),
                        r.n.to_string(),
                        fmt12(r.energy_numeric),
                        fmt12(r.energy_closed_form),
                        fmt12(r.omega_dual),
                        fmt12(r.epsilon_numeric),
                        fmt12(r.epsilon_closed_form),
                        fmt12(r.rel_err_atom),
                        fmt12(r.rel_err_osc),
                    ]
                })
                .collect(),
        ),
        Format::Text => {
            let mut out = format!(
                "duality family={} atom D={} oscillator d={} points={}\n",
                family.name(),
                family.atom_dim(),
                family.osc_dim(),
                grid.points
            );
            let _ = writeln!(
                out,
                "{:>5} {:>3}  {:>20}  {:>20}  {:>20}  {:>20}  {:>20}  {:>20}",
                "level", "N", "E_numeric", "E_closed_form", "omega_dual", "epsilon_numeric", "rel_err_atom", "rel_err_osc"
            );
            for r in &report.records {
                let _ = writeln!(
                    out,
                    "{:>5} {:>3}  {:>20}  {:>20}  {:>20}  {:>20}  {:>20}  {:>20}",
                    r.level,
                    r.n,
                    fmt12(r.energy_numeric),
                    fmt12(r.energy_closed_form),
                    fmt12(r.omega_dual),
                    fmt12(r.epsilon_numeric),
                    fmt12(r.rel_err_atom),
                    fmt12(r.rel_err_osc)
                );
            }
            if let Some(d) = &report.diagnostics {
                let _ = writeln!(out, "diagnostics: {d}");
            }
            let _ = writeln!(
                out,
                "overall: {} (tolerance {})",
                if report.passed() { "PASS" } else { "FAIL" },
                fmt12(report.tolerance)
            );
            out
        }
    };
    Ok(Outcome { stdout, passed: report.passed(), diagnostics: report.diagnostics.clone() })
}

pub fn emit_matrix(s: &Settings) -> CliResult<Outcome> {
    let family = s.require_family()?;
    let m = match &s.matrix_file {
        Some(_) => load_transform(s, family)?.matrix().clone(),
        None => build_matrix(family),
    };
    Ok(Outcome::ok(match s.format {
        Format::Text => m.to_string(),
        Format::Csv => m.to_string().lines().map(|l| l.split(' ').collect::<Vec<_>>().join(",") + "\n").collect(),
        Format::Json => {
            let rows: Vec<Vec<i64>> = m
                .rows()
                .map(|row| row.iter().map(|e| if e.is_zero() { 0 } else { e.sign as i64 * (e.index as i64 + 1) }).collect())
                .collect();
            pretty(&json!({ "family": family.name(), "rows": rows }))
        }
    }))
}
