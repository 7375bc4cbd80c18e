//! Run configuration: a single JSON document with the fixed top-level keys
//! `command`, `model`, `params`, `profile`, `grid`, `output`. Unknown keys
//! anywhere are rejected; `params` holds the command-specific settings and
//! is validated against the schema of the selected command.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use nshwave::{build, InitialProfile, ModelEntry, ModelName};

use crate::expr;
use crate::io::read_csv;
use crate::CliError;

fn default_true() -> bool {
    true
}

fn default_horizon() -> f64 {
    nshwave::hyperbolic::DEFAULT_HORIZON
}

fn default_method() -> String {
    "characteristics".to_string()
}

fn default_safety() -> f64 {
    0.9
}

fn default_rtol() -> f64 {
    1e-8
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    command: String,
    #[serde(default)]
    model: Option<ModelSection>,
    #[serde(default)]
    params: Option<serde_json::Value>,
    #[serde(default)]
    profile: Option<ProfileSection>,
    #[serde(default)]
    grid: Option<GridSection>,
    #[serde(default)]
    output: Option<OutputSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelSection {
    name: String,
    #[serde(default)]
    params: BTreeMap<String, f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileSection {
    /// One expression per component, e.g. `["0.5*sin(x)", "0.3*cos(x)"]`.
    #[serde(default)]
    expressions: Option<Vec<String>>,
    /// Alternatively, a CSV table (columns x, v1, …, vn) to interpolate.
    /// Relative paths resolve against the config file's directory.
    #[serde(default)]
    table: Option<PathBuf>,
    /// Required with `expressions`; tables carry their own extent.
    #[serde(default)]
    domain: Option<(f64, f64)>,
    #[serde(default = "default_true")]
    periodic: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub points: usize,
    /// Evaluation window; defaults to the profile domain.
    #[serde(default)]
    pub domain: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// JSON report destination (stdout when absent).
    #[serde(default)]
    pub report: Option<PathBuf>,
    /// CSV data destination (stdout when absent).
    #[serde(default)]
    pub data: Option<PathBuf>,
    /// Directory for auxiliary per-case CSV files.
    #[serde(default)]
    pub directory: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeParams {
    /// Scan horizon for the gradient blow-up search.
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default)]
    pub scan_step: Option<f64>,
    #[serde(default)]
    pub root_tol: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateParams {
    /// Output times, strictly increasing.
    pub times: Vec<f64>,
    /// "characteristics", "fd", or "cross_check".
    #[serde(default = "default_method")]
    pub method: String,
    /// Grid spacing for the finite-difference paths.
    #[serde(default)]
    pub dx: Option<f64>,
    /// Time step for the finite-difference paths.
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default = "default_safety")]
    pub safety: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TravelingWaveParams {
    /// "viscous" (third-order profile equation), "inviscid" (first-order
    /// wave-frame system), or "blood_flow" (phase-plane orbit).
    pub kind: String,
    pub wave_speed: f64,
    /// Initial data: (value, slope, curvature) for "viscous", the n state
    /// components for "inviscid", (E, V) for "blood_flow".
    pub start: Vec<f64>,
    pub xi_span: (f64, f64),
    #[serde(default = "default_rtol")]
    pub rtol: f64,
    /// Spacing of the resampled orbit output; defaults to span/512.
    #[serde(default)]
    pub output_step: Option<f64>,
    /// Fail (exit 3) if the orbit does not reach the end of xi_span.
    #[serde(default)]
    pub require_full_span: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloParams {
    pub sigma_list: Vec<f64>,
    pub n_particles: usize,
    pub t_end: f64,
    pub dt: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub bandwidth: Option<f64>,
}

#[derive(Debug)]
pub enum Command {
    Analyze(AnalyzeParams),
    Simulate(SimulateParams),
    TravelingWave(TravelingWaveParams),
    MonteCarlo(MonteCarloParams),
    Models,
}

/// A validated run: resolved model, built profile, and typed command params.
pub struct LoadedConfig {
    pub command: Command,
    pub model: Option<ModelEntry>,
    pub profile: Option<InitialProfile>,
    pub grid: Option<GridSection>,
    pub output: OutputSection,
    pub config_hash: u64,
}

impl LoadedConfig {
    pub fn require_model(&self) -> Result<&ModelEntry, CliError> {
        self.model
            .as_ref()
            .ok_or_else(|| CliError::Config("this command needs a \"model\" section".into()))
    }

    pub fn require_profile(&self) -> Result<&InitialProfile, CliError> {
        self.profile
            .as_ref()
            .ok_or_else(|| CliError::Config("this command needs a \"profile\" section".into()))
    }

    pub fn require_grid(&self) -> Result<&GridSection, CliError> {
        self.grid
            .as_ref()
            .ok_or_else(|| CliError::Config("this command needs a \"grid\" section".into()))
    }
}

pub fn load(path: &Path) -> Result<LoadedConfig, CliError> {
    let bytes = fs::read(path)
        .map_err(|e| CliError::Config(format!("reading {}: {e}", path.display())))?;
    let raw: RawConfig = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let config_hash = crate::io::fnv1a64(&bytes);

    let params = match raw.params {
        None | Some(serde_json::Value::Null) => serde_json::Value::Object(Default::default()),
        Some(v) => v,
    };
    let command = match raw.command.as_str() {
        "analyze" => Command::Analyze(parse_params(params)?),
        "simulate" => Command::Simulate(parse_params(params)?),
        "traveling_wave" => Command::TravelingWave(parse_params(params)?),
        "monte_carlo" => Command::MonteCarlo(parse_params(params)?),
        "models" => Command::Models,
        other => {
            return Err(CliError::Config(format!(
                "unknown command {other:?}; expected analyze, simulate, traveling_wave, \
                 monte_carlo, or models"
            )))
        }
    };

    let model = match raw.model {
        Some(section) => Some(build_model(&section)?),
        None => None,
    };
    let profile = match raw.profile {
        Some(section) => Some(build_profile(&section, path)?),
        None => None,
    };

    Ok(LoadedConfig {
        command,
        model,
        profile,
        grid: raw.grid,
        output: raw.output.unwrap_or_default(),
        config_hash,
    })
}

fn parse_params<T: serde::de::DeserializeOwned>(value: serde_json::Value) -> Result<T, CliError> {
    serde_json::from_value(value).map_err(|e| CliError::Config(format!("params: {e}")))
}

fn build_model(section: &ModelSection) -> Result<ModelEntry, CliError> {
    let name: ModelName = section
        .name
        .parse()
        .map_err(|e: nshwave::ModelError| CliError::Config(e.to_string()))?;
    build(name, &section.params).map_err(|e| CliError::Config(e.to_string()))
}

fn build_profile(section: &ProfileSection, config_path: &Path) -> Result<InitialProfile, CliError> {
    match (&section.expressions, &section.table) {
        (Some(_), Some(_)) => Err(CliError::Config(
            "profile: give either \"expressions\" or \"table\", not both".into(),
        )),
        (None, None) => Err(CliError::Config(
            "profile: needs \"expressions\" or a \"table\" path".into(),
        )),
        (Some(exprs), None) => {
            let domain = section.domain.ok_or_else(|| {
                CliError::Config("profile: \"expressions\" needs a \"domain\" [lo, hi]".into())
            })?;
            if exprs.is_empty() {
                return Err(CliError::Config("profile: needs at least one expression".into()));
            }
            let mut values = Vec::with_capacity(exprs.len());
            let mut derivatives = Vec::with_capacity(exprs.len());
            for (i, src) in exprs.iter().enumerate() {
                let e = expr::parse(src).map_err(|err| {
                    CliError::Config(format!("profile expression {}: {err}", i + 1))
                })?;
                derivatives.push(e.diff());
                values.push(e);
            }
            let n = values.len();
            let value_fn = move |x: f64| values.iter().map(|e| e.eval(x)).collect::<Vec<f64>>();
            let deriv_fn =
                move |x: f64| derivatives.iter().map(|e| e.eval(x)).collect::<Vec<f64>>();
            InitialProfile::analytic(n, domain, section.periodic, value_fn, deriv_fn)
                .map_err(|e| CliError::Config(format!("profile: {e}")))
        }
        (None, Some(table)) => {
            let resolved = if table.is_relative() {
                config_path.parent().map(|d| d.join(table)).unwrap_or_else(|| table.clone())
            } else {
                table.clone()
            };
            let (header, rows) = read_csv(&resolved)?;
            if header.len() < 2 {
                return Err(CliError::Config(format!(
                    "{}: profile table needs an x column plus components",
                    resolved.display()
                )));
            }
            if rows.len() < 4 {
                return Err(CliError::Config(format!(
                    "{}: profile table needs at least 4 samples to interpolate",
                    resolved.display()
                )));
            }
            let xs: Vec<f64> = rows.iter().map(|r| r[0]).collect();
            let values: Vec<Vec<f64>> = rows.iter().map(|r| r[1..].to_vec()).collect();
            InitialProfile::sampled(&xs, &values, section.periodic)
                .map_err(|e| CliError::Config(format!("profile table: {e}")))
        }
    }
}

/// Evaluation grid: `points` equally spaced samples across the requested
/// window (default: the whole profile domain), endpoints included.
pub fn evaluation_grid(
    grid: &GridSection,
    prof: &InitialProfile,
) -> Result<Vec<f64>, CliError> {
    if grid.points < 2 {
        return Err(CliError::Config("grid: needs at least 2 points".into()));
    }
    let (lo, hi) = grid.domain.unwrap_or_else(|| prof.domain());
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(CliError::Config(format!("grid: bad window [{lo}, {hi}]")));
    }
    if !prof.contains(lo) || !prof.contains(hi) {
        let (plo, phi) = prof.domain();
        return Err(CliError::Config(format!(
            "grid: window [{lo}, {hi}] leaves the profile domain [{plo}, {phi}]"
        )));
    }
    let n = grid.points;
    // The last point is pinned to `hi`: accumulated rounding in the affine
    // form can land one ulp outside the profile domain.
    Ok((0..n)
        .map(|k| if k == n - 1 { hi } else { lo + (hi - lo) * (k as f64 / (n - 1) as f64) })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_config(dir: &Path, body: &str) -> PathBuf {
        let path = dir.join("config.json");
        let mut f = fs::File::create(&path).unwrap();
        f.write_all(body.as_bytes()).unwrap();
        path
    }

    #[test]
    fn loads_a_complete_analyze_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_config(
            dir.path(),
            r#"{
                "command": "analyze",
                "model": {"name": "cold_plasma"},
                "profile": {
                    "expressions": ["0.5*sin(x)", "0.3*cos(x)"],
                    "domain": [-3.141592653589793, 3.141592653589793]
                },
                "grid": {"points": 16},
                "params": {"horizon": 50.0}
            }"#,
        );
        let cfg = load(&path).unwrap();
        match &cfg.command {
            Command::Analyze(p) => assert_eq!(p.horizon, 50.0),
            other => panic!("wrong command: {other:?}"),
        }
        assert_eq!(cfg.model.as_ref().unwrap().spec.n, 2);
        let prof = cfg.profile.as_ref().unwrap();
        assert_eq!(prof.n(), 2);
        assert!((prof.value(0.5)[0] - 0.5 * 0.5f64.sin()).abs() < 1e-15);
        assert!((prof.derivative(0.5)[0] - 0.5 * 0.5f64.cos()).abs() < 1e-15);
    }

    #[test]
    fn rejects_unknown_keys_everywhere() {
        let dir = tempfile::tempdir().unwrap();
        let top = write_config(dir.path(), r#"{"command": "models", "bogus": 1}"#);
        assert!(matches!(load(&top), Err(CliError::Config(_))));

        let nested = write_config(
            dir.path(),
            r#"{"command": "analyze", "params": {"horizon": 1.0, "wat": 2}}"#,
        );
        assert!(matches!(load(&nested), Err(CliError::Config(_))));
    }

    #[test]
    fn rejects_unknown_command_and_model() {
        let dir = tempfile::tempdir().unwrap();
        let cmd = write_config(dir.path(), r#"{"command": "frobnicate"}"#);
        assert!(matches!(load(&cmd), Err(CliError::Config(_))));
        let model = write_config(
            dir.path(),
            r#"{"command": "analyze", "model": {"name": "warm_plasma"}}"#,
        );
        assert!(matches!(load(&model), Err(CliError::Config(_))));
    }

    #[test]
    fn profile_needs_exactly_one_source() {
        let dir = tempfile::tempdir().unwrap();
        let neither = write_config(
            dir.path(),
            r#"{"command": "analyze", "profile": {"periodic": true}}"#,
        );
        assert!(matches!(load(&neither), Err(CliError::Config(_))));
        let no_domain = write_config(
            dir.path(),
            r#"{"command": "analyze", "profile": {"expressions": ["x"]}}"#,
        );
        assert!(matches!(load(&no_domain), Err(CliError::Config(_))));
    }

    #[test]
    fn sampled_table_profile_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let table = dir.path().join("profile.csv");
        let mut rows = String::from("# test data\nx,v1,v2\n");
        for k in 0..=32 {
            let x = -3.0 + 6.0 * k as f64 / 32.0;
            rows.push_str(&format!("{x:.16e},{:.16e},{:.16e}\n", x.sin(), x.cos()));
        }
        fs::write(&table, rows).unwrap();
        let path = write_config(
            dir.path(),
            r#"{
                "command": "analyze",
                "profile": {"table": "profile.csv", "periodic": false}
            }"#,
        );
        let cfg = load(&path).unwrap();
        let prof = cfg.profile.as_ref().unwrap();
        assert_eq!(prof.n(), 2);
        assert!((prof.value(1.0)[0] - 1.0f64.sin()).abs() < 1e-3);
    }
}
