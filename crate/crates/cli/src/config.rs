//! Declarative run configuration: TOML file plus flag overrides.
//!
//! Precedence is defaults < config file (`--config` or `$DIRACSEA_CONFIG`)
//! < command-line flags.

use crate::CliError;
use diracsea::numerics::quadrature::QuadTol;
use diracsea::numerics::{SummationScheme, DEFAULT_SERIES_TOL};
use diracsea::qftvacuum::OccupationSet;
use diracsea::spectral::{LevelIndex, ModelParams, Potential};
use serde::Deserialize;
use std::path::{Path, PathBuf};

pub const CONFIG_ENV: &str = "DIRACSEA_CONFIG";

/// Registered named potential forms.
pub const POTENTIAL_REGISTRY: &[&str] = &["zero", "linear", "constant", "sine", "cosine", "poly", "expr"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Fully resolved run configuration.
pub struct RunConfig {
    pub params: ModelParams,
    pub potential: Potential,
    pub cutoff: u64,
    pub levels: u32,
    pub schemes: Vec<SummationScheme>,
    pub quad_tol: QuadTol,
    pub series_tol: f64,
    pub occupation: Option<OccupationSet>,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

/// Shared command-line flags (overrides).
#[derive(Debug, clap::Args)]
pub struct CommonArgs {
    /// Config file (TOML); defaults to $DIRACSEA_CONFIG when set
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Box half-width a
    #[arg(long)]
    pub a: Option<f64>,
    /// Named potential (zero|linear|constant|sine|cosine) or an inline
    /// expression such as "x + 0.3" or "0.5*sin(1)"
    #[arg(long)]
    pub potential: Option<String>,
    /// Amplitude for named potentials (value of a constant)
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Harmonic index for sine/cosine potentials
    #[arg(long)]
    pub harmonic: Option<u32>,
    /// Truncation level for series and overlap blocks
    #[arg(long)]
    pub cutoff: Option<u64>,
    /// Spectrum table covers |k| <= levels
    #[arg(long)]
    pub levels: Option<u32>,
    /// Summation scheme (repeatable): square:N, rect:RxC, rowiter:OxI,
    /// energy:EMAX, abel:N:t1,t2,...
    #[arg(long = "scheme")]
    pub schemes: Vec<String>,
    /// Output format: csv or json
    #[arg(long)]
    pub format: Option<String>,
    /// Output path (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

// ---------------------------------------------------------------- TOML file

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    model: Option<ModelSection>,
    potential: Option<PotentialSection>,
    run: Option<RunSection>,
    tolerances: Option<TolSection>,
    output: Option<OutputSection>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelSection {
    a: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PotentialSection {
    form: Option<String>,
    lambda: Option<f64>,
    harmonic: Option<u32>,
    coeffs: Option<Vec<f64>>,
    expr: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunSection {
    cutoff: Option<u64>,
    levels: Option<u32>,
    schemes: Option<Vec<String>>,
    occupation_particles: Option<Vec<i32>>,
    occupation_antiparticles: Option<Vec<i32>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TolSection {
    quadrature_abs: Option<f64>,
    quadrature_rel: Option<f64>,
    series: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    format: Option<String>,
    path: Option<PathBuf>,
}

fn config_error(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn load_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_error(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| config_error(format!("config {}: {e}", path.display())))
}

/// Resolve a potential from a name-or-expression string plus parameters.
fn resolve_potential_str(
    spec: &str,
    lambda: f64,
    harmonic: u32,
    params: &ModelParams,
) -> Result<Potential, CliError> {
    match spec {
        "zero" => Ok(Potential::zero(params)),
        "linear" => Ok(Potential::linear(lambda, params)),
        "constant" => Ok(Potential::constant(lambda, params)),
        "sine" => Potential::sine(lambda, harmonic, params).map_err(|e| config_error(e.to_string())),
        "cosine" => {
            Potential::cosine(lambda, harmonic, params).map_err(|e| config_error(e.to_string()))
        }
        expr => Potential::parse(expr, params).map_err(|e| {
            config_error(format!(
                "potential `{expr}` is neither a registered form ({}) nor a valid expression: {e}",
                POTENTIAL_REGISTRY.join("|")
            ))
        }),
    }
}

impl RunConfig {
    /// Merge defaults, the config file, and the flag overrides.
    pub fn resolve(args: &CommonArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => load_file(path)?,
            None => match std::env::var_os(CONFIG_ENV) {
                Some(path) => load_file(Path::new(&path))?,
                None => FileConfig::default(),
            },
        };

        let a = args
            .a
            .or(file.model.as_ref().and_then(|m| m.a))
            .unwrap_or(1.0);
        let params = ModelParams::new(a, 0.0).map_err(|e| config_error(e.to_string()))?;

        let pot_file = file.potential.unwrap_or_default();
        let lambda = args.lambda.or(pot_file.lambda).unwrap_or(1.0);
        let harmonic = args.harmonic.or(pot_file.harmonic).unwrap_or(1);
        let potential = if let Some(spec) = &args.potential {
            resolve_potential_str(spec, lambda, harmonic, &params)?
        } else {
            match pot_file.form.as_deref() {
                None => Potential::linear(lambda, &params),
                Some("poly") => {
                    let coeffs = pot_file.coeffs.as_deref().ok_or_else(|| {
                        config_error("potential form `poly` requires `coeffs`")
                    })?;
                    Potential::polynomial(coeffs, &params)
                        .map_err(|e| config_error(e.to_string()))?
                }
                Some("expr") => {
                    let expr = pot_file
                        .expr
                        .as_deref()
                        .ok_or_else(|| config_error("potential form `expr` requires `expr`"))?;
                    Potential::parse(expr, &params).map_err(|e| config_error(e.to_string()))?
                }
                Some(name) => resolve_potential_str(name, lambda, harmonic, &params)?,
            }
        };

        let run = file.run.unwrap_or_default();
        let cutoff = args.cutoff.or(run.cutoff).unwrap_or(256);
        if cutoff < 1 {
            return Err(config_error("cutoff must be >= 1"));
        }
        let levels = args.levels.or(run.levels).unwrap_or(8);
        if levels < 1 {
            return Err(config_error("levels must be >= 1"));
        }

        let scheme_strings: Vec<String> = if !args.schemes.is_empty() {
            args.schemes.clone()
        } else if let Some(s) = run.schemes {
            s
        } else {
            vec![
                format!("square:{cutoff}"),
                format!("rowiter:{cutoff}x{}", cutoff * 8),
            ]
        };
        let schemes: Vec<SummationScheme> = scheme_strings
            .iter()
            .map(|s| s.parse().map_err(|e: diracsea::Error| config_error(e.to_string())))
            .collect::<Result<_, _>>()?;

        let tols = file.tolerances.unwrap_or_default();
        let quad_abs = tols.quadrature_abs.unwrap_or(1e-12);
        let quad_rel = tols.quadrature_rel.unwrap_or(1e-12);
        let series_tol = tols.series.unwrap_or(DEFAULT_SERIES_TOL);
        if quad_abs <= 0.0 || quad_rel < 0.0 || series_tol <= 0.0 {
            return Err(config_error("tolerances must be positive"));
        }
        let quad_tol = QuadTol {
            abs_tol: quad_abs,
            rel_tol: quad_rel,
            ..QuadTol::default()
        };

        let occupation = match (run.occupation_particles, run.occupation_antiparticles) {
            (None, None) => None,
            (p, ap) => {
                let to_levels = |raw: Vec<i32>| -> Result<Vec<LevelIndex>, CliError> {
                    raw.into_iter()
                        .map(|k| LevelIndex::new(k).map_err(|e| config_error(e.to_string())))
                        .collect()
                };
                Some(
                    OccupationSet::new(
                        to_levels(p.unwrap_or_default())?,
                        to_levels(ap.unwrap_or_default())?,
                    )
                    .map_err(|e| config_error(e.to_string()))?,
                )
            }
        };

        let out_file = file.output.unwrap_or_default();
        let format = match args
            .format
            .as_deref()
            .or(out_file.format.as_deref())
            .unwrap_or("json")
        {
            "csv" => OutputFormat::Csv,
            "json" => OutputFormat::Json,
            other => return Err(config_error(format!("unknown format `{other}` (csv|json)"))),
        };
        let out = args.out.clone().or(out_file.path).filter(|p| !p.as_os_str().is_empty());

        Ok(Self {
            params,
            potential,
            cutoff,
            levels,
            schemes,
            quad_tol,
            series_tol,
            occupation,
            format,
            out,
        })
    }
}
