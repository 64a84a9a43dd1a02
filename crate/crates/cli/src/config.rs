//! Experiment configuration: JSON schema, loading with categorized
//! errors, and conversion into validated core types.

use std::fmt;
use std::path::Path;

use airdrop_core::model::GameConfig;
use airdrop_core::technology::TechnologySpec;
use serde::Deserialize;
use sha2::{Digest, Sha256};

/// CLI-level error with a stable exit code per category:
/// 2 = parse, 3 = schema, 4 = invariant, 5 = unsupported/resource,
/// 6 = I/O.
#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Schema(String),
    Invariant(String),
    Unsupported(String),
    Resource(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Schema(_) => 3,
            CliError::Invariant(_) => 4,
            CliError::Unsupported(_) | CliError::Resource(_) => 5,
            CliError::Io(_) => 6,
        }
    }

    fn category(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "parse",
            CliError::Schema(_) => "schema",
            CliError::Invariant(_) => "invariant",
            CliError::Unsupported(_) => "unsupported",
            CliError::Resource(_) => "resource",
            CliError::Io(_) => "io",
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            CliError::Parse(m)
            | CliError::Schema(m)
            | CliError::Invariant(m)
            | CliError::Unsupported(m)
            | CliError::Resource(m)
            | CliError::Io(m) => m,
        };
        write!(f, "{} error: {}", self.category(), msg)
    }
}

impl std::error::Error for CliError {}

impl From<airdrop_core::Error> for CliError {
    fn from(err: airdrop_core::Error) -> Self {
        use airdrop_core::Error as E;
        match err {
            E::InvalidConfig { .. } => CliError::Invariant(err.to_string()),
            E::Unsupported(_) => CliError::Unsupported(err.to_string()),
            E::ResourceLimit(_) => CliError::Resource(err.to_string()),
            E::PlayerIndex { .. } | E::LevelOutOfRange { .. } | E::InvalidProfile(_) => {
                CliError::Invariant(err.to_string())
            }
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Io(err.to_string())
    }
}

fn default_t_tot() -> f64 {
    1.0
}

/// Default inverse-noise level: the value repeatedly recovered from
/// laboratory estimates of logit play.
fn default_beta() -> f64 {
    1.13
}

fn default_stride() -> u64 {
    1
}

fn default_cap() -> u64 {
    10_000_000
}

/// Uniform scalar or an explicit per-player list.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum CostSpec {
    Uniform(f64),
    PerPlayer(Vec<f64>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameSpec {
    pub n: usize,
    pub costs: CostSpec,
    pub rho: f64,
    #[serde(default = "default_t_tot")]
    pub t_tot: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
    pub technology: TechnologySpec,
    #[serde(default)]
    pub actions: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub d_v: f64,
}

impl GameSpec {
    pub fn build(&self) -> Result<GameConfig, CliError> {
        let costs = match &self.costs {
            CostSpec::Uniform(alpha) => vec![*alpha; self.n],
            CostSpec::PerPlayer(list) => {
                if list.len() != self.n {
                    return Err(CliError::Invariant(format!(
                        "invalid config: costs: expected {} entries, got {}",
                        self.n,
                        list.len()
                    )));
                }
                list.clone()
            }
        };
        Ok(GameConfig::new(
            costs,
            self.rho,
            self.t_tot,
            self.beta,
            self.technology.clone(),
            self.actions.clone(),
            self.d_v,
        )?)
    }
}

/// Either an explicit ascending list or an inclusive linear range.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Explicit(Vec<f64>),
    Linspace { start: f64, end: f64, points: usize },
}

impl GridSpec {
    pub fn materialize(&self, field: &str) -> Result<Vec<f64>, CliError> {
        let grid = match self {
            GridSpec::Explicit(values) => values.clone(),
            GridSpec::Linspace { start, end, points } => {
                if *points == 0 {
                    return Err(CliError::Invariant(format!(
                        "invalid config: {field}.points: grid must be nonempty"
                    )));
                }
                if *points == 1 {
                    vec![*start]
                } else {
                    let step = (end - start) / (*points as f64 - 1.0);
                    (0..*points).map(|k| start + step * k as f64).collect()
                }
            }
        };
        if grid.is_empty() {
            return Err(CliError::Invariant(format!(
                "invalid config: {field}: grid must be nonempty"
            )));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::Invariant(format!(
                "invalid config: {field}: grid must be strictly ascending"
            )));
        }
        Ok(grid)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExperimentSpec {
    Equilibria {
        #[serde(default)]
        epsilon: Option<f64>,
        #[serde(default)]
        max_profiles: Option<usize>,
        #[serde(default)]
        tie_tolerance: Option<f64>,
    },
    Stationary {},
    Simulate {
        steps: u64,
        #[serde(default = "default_stride")]
        stride: u64,
        #[serde(default)]
        seeds: Option<Vec<u64>>,
        #[serde(default)]
        rhos: Option<Vec<f64>>,
    },
    Hitting {
        target: usize,
        trials: usize,
        #[serde(default = "default_cap")]
        cap: u64,
        #[serde(default)]
        seed: Option<u64>,
    },
    Phase {
        rho_grid: GridSpec,
    },
    Profit {
        rho_grid: GridSpec,
        #[serde(default)]
        epsilon: Option<f64>,
    },
    Times {
        #[serde(default)]
        alphas: Option<Vec<f64>>,
        #[serde(default)]
        target: Option<usize>,
        #[serde(default)]
        interval: Option<(usize, usize)>,
        #[serde(default)]
        mc_trials: Option<usize>,
        #[serde(default = "default_cap")]
        mc_cap: u64,
        #[serde(default)]
        seed: Option<u64>,
    },
}

impl ExperimentSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            ExperimentSpec::Equilibria { .. } => "equilibria",
            ExperimentSpec::Stationary {} => "stationary",
            ExperimentSpec::Simulate { .. } => "simulate",
            ExperimentSpec::Hitting { .. } => "hitting",
            ExperimentSpec::Phase { .. } => "phase",
            ExperimentSpec::Profit { .. } => "profit",
            ExperimentSpec::Times { .. } => "times",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfigFile {
    pub game: GameSpec,
    pub experiment: ExperimentSpec,
}

#[derive(Debug)]
pub struct LoadedConfig {
    pub file: ExperimentConfigFile,
    pub game: GameConfig,
    /// SHA-256 of the canonicalized (sorted-key, compact) JSON document.
    pub hash: String,
}

/// Reads, parses, validates, and hashes a config file. Parse, schema,
/// and invariant failures map to distinct exit codes.
pub fn load_config(path: &Path) -> Result<LoadedConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    // serde_json maps are sorted by key, so re-serializing canonicalizes.
    let canonical = value.to_string();
    let hash = hex_digest(canonical.as_bytes());
    let file: ExperimentConfigFile = serde_json::from_value(value)
        .map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))?;
    let game = file.game.build()?;
    Ok(LoadedConfig { file, game, hash })
}

fn hex_digest(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_temp(name: &str, contents: &str) -> std::path::PathBuf {
        let path = std::env::temp_dir().join(format!("airdrop-cfg-{}-{name}", std::process::id()));
        std::fs::write(&path, contents).unwrap();
        path
    }

    const MINIMAL: &str = r#"{
        "game": {
            "n": 10,
            "costs": 1.0,
            "rho": 0.5,
            "t_tot": 10.0,
            "beta": 1.13,
            "technology": {"kind": "threshold", "tau": 5, "v_low": 0.0, "v_high": 100.0}
        },
        "experiment": {"kind": "stationary"}
    }"#;

    #[test]
    fn minimal_threshold_config_loads() {
        let path = write_temp("ok.json", MINIMAL);
        let loaded = load_config(&path).unwrap();
        assert_eq!(loaded.game.n(), 10);
        assert_eq!(loaded.game.beta(), 1.13);
        assert_eq!(loaded.hash.len(), 64);
        std::fs::remove_file(path).unwrap();
    }

    #[test]
    fn hash_is_stable_under_whitespace() {
        let a = load_config(&write_temp("ws-a.json", MINIMAL)).unwrap();
        let b = load_config(&write_temp("ws-b.json", &MINIMAL.replace("\n", " "))).unwrap();
        assert_eq!(a.hash, b.hash);
    }

    #[test]
    fn syntax_error_is_parse_category() {
        let path = write_temp("syntax.json", "{ not json");
        let err = load_config(&path).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        std::fs::remove_file(path).unwrap();
    }

    #[test]
    fn wrong_shape_is_schema_category() {
        let path = write_temp(
            "shape.json",
            r#"{"game": {"n": "ten"}, "experiment": {"kind": "stationary"}}"#,
        );
        let err = load_config(&path).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        std::fs::remove_file(path).unwrap();
    }

    #[test]
    fn zero_tau_is_invariant_category_naming_the_field() {
        let path = write_temp("tau.json", &MINIMAL.replace("\"tau\": 5", "\"tau\": 0"));
        let err = load_config(&path).unwrap_err();
        assert_eq!(err.exit_code(), 4);
        assert!(err.to_string().contains("technology.params.tau"), "{err}");
        std::fs::remove_file(path).unwrap();
    }

    #[test]
    fn out_of_range_rho_is_invariant_category() {
        let path = write_temp("rho.json", &MINIMAL.replace("\"rho\": 0.5", "\"rho\": 1.5"));
        let err = load_config(&path).unwrap_err();
        assert_eq!(err.exit_code(), 4);
        std::fs::remove_file(path).unwrap();
    }
}
