//! Flag and config-file merging. The file holds `key=value` lines using the
//! long flag names; a flag given on the command line wins over the file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use quadmap::FamilyDescriptor;

#[derive(Debug)]
pub enum CliError {
    /// Bad input or configuration; exit code 2.
    Config(String),
}

impl From<quadmap::Error> for CliError {
    fn from(e: quadmap::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Format as ValueEnum>::from_str(s, false)
    }
}

const KEYS: [&str; 14] = [
    "family",
    "samples",
    "seed",
    "nmax",
    "levels",
    "rmax",
    "points",
    "tol",
    "format",
    "matrix-file",
    "system",
    "dim",
    "l",
    "config",
];

/// Options shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct GlobalOpts {
    /// Transformation family: lc, ks, hurwitz8 or hurwitz16.
    #[arg(long, global = true)]
    pub family: Option<String>,
    /// Random points per sampled check.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Seed for all sampling.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Highest level N in the spectrum table.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub nmax: Option<i64>,
    /// Number of levels to solve for.
    #[arg(long, global = true)]
    pub levels: Option<usize>,
    /// Outer radius of the radial grid.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub rmax: Option<f64>,
    /// Number of radial grid intervals.
    #[arg(long, global = true)]
    pub points: Option<usize>,
    /// Override every tolerance of the command.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Signed-index template replacing the built-in matrix.
    #[arg(long = "matrix-file", global = true)]
    pub matrix_file: Option<PathBuf>,
    /// File of key=value lines; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

/// Parsed `key=value` lines; `#` starts a comment line.
#[derive(Debug, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
    dir: PathBuf,
}

impl ConfigFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        cfg.dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let mut values = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("config line {}: expected key=value", n + 1)))?;
            let key = key.trim();
            if key == "config" || !KEYS.contains(&key) {
                return Err(CliError::Config(format!("config line {}: unknown key `{key}`", n + 1)));
            }
            if values.insert(key.to_string(), value.trim().to_string()).is_some() {
                return Err(CliError::Config(format!("config line {}: duplicate key `{key}`", n + 1)));
            }
        }
        Ok(ConfigFile { values, dir: PathBuf::new() })
    }

    fn get<T: FromStr>(&self, key: &str) -> CliResult<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.values
            .get(key)
            .map(|v| v.parse::<T>().map_err(|e| CliError::Config(format!("config key `{key}`: `{v}`: {e}"))))
            .transpose()
    }
}

/// Flags merged over the config file; `None` means neither source set it.
#[derive(Debug, Clone)]
pub struct Settings {
    pub family: Option<FamilyDescriptor>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub nmax: Option<i64>,
    pub levels: Option<usize>,
    pub rmax: Option<f64>,
    pub points: Option<usize>,
    pub tol: Option<f64>,
    pub format: Format,
    pub matrix_file: Option<PathBuf>,
    pub system: Option<String>,
    pub dim: Option<usize>,
    pub l: Option<usize>,
}

impl Settings {
    pub fn resolve(opts: &GlobalOpts, extra: &SolveOpts) -> CliResult<Self> {
        let file = match &opts.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let family_name = opts.family.clone().or(file.get::<String>("family")?);
        let family = family_name.map(|n| FamilyDescriptor::from_name(&n)).transpose()?;
        let matrix_file = opts.matrix_file.clone().or(file.get::<PathBuf>("matrix-file")?.map(|p| file.dir.join(p)));
        let s = Settings {
            family,
            samples: opts.samples.or(file.get("samples")?),
            seed: opts.seed.or(file.get("seed")?),
            nmax: opts.nmax.or(file.get("nmax")?),
            levels: opts.levels.or(file.get("levels")?),
            rmax: opts.rmax.or(file.get("rmax")?),
            points: opts.points.or(file.get("points")?),
            tol: opts.tol.or(file.get("tol")?),
            format: opts.format.or(file.get("format")?).unwrap_or(Format::Text),
            matrix_file,
            system: extra.system.clone().or(file.get("system")?),
            dim: extra.dim.or(file.get("dim")?),
            l: extra.l.or(file.get("l")?),
        };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> CliResult<()> {
        if self.samples == Some(0) {
            return Err(CliError::Config("samples must be at least 1".into()));
        }
        if self.levels == Some(0) {
            return Err(CliError::Config("levels must be at least 1".into()));
        }
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(CliError::Config(format!("tol must be positive, got {t}")));
            }
        }
        Ok(())
    }

    pub fn require_family(&self) -> CliResult<FamilyDescriptor> {
        self.family
            .ok_or_else(|| CliError::Config("no family given; use --family or family= in the config file".into()))
    }
}

/// Extra options of `solve`.
#[derive(Debug, Clone, Default, Args)]
pub struct SolveOpts {
    /// oscillator or coulomb.
    #[arg(long)]
    pub system: Option<String>,
    /// Spatial dimension; defaults to the family's oscillator or atom dimension.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Hyperangular momentum.
    #[arg(long)]
    pub l: Option<usize>,
}
