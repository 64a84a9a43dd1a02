//! Technology functions: the map from contribution to system value.
//!
//! All families except `general` are anonymous (the value depends only on
//! the total contribution level), and every family is monotone
//! non-decreasing in contribution. The closed-form families accept a
//! real-valued level so they compose with non-binary action grids; the
//! tabulated family is defined on integer levels only.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Declarative description of a technology function, as found in config
/// files. Validated into a [`Technology`] by [`Technology::new`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TechnologySpec {
    /// Step function: `v_low` below the threshold level `tau`, `v_high`
    /// at or above it.
    Threshold { tau: usize, v_low: f64, v_high: f64 },
    /// `lambda_v * level`.
    Linear { lambda_v: f64 },
    /// `level^2 / tau` (network-effect growth).
    Quadratic { tau: f64 },
    /// `(level/tau)^c / (1 + (level/tau)^c)`.
    Sshaped { tau: f64, c: f64 },
    /// `level^c / tau` with `0 < c < 1` (saturating growth).
    Concave { tau: f64, c: f64 },
    /// Explicit non-decreasing values for levels `0..=n`.
    Table { values: Vec<f64> },
    /// Explicit value for every profile of the action grid, indexed
    /// lexicographically by per-player action indices (player 0 most
    /// significant). Only brute-force analyses accept this kind.
    General { values: Vec<f64> },
}

impl TechnologySpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            TechnologySpec::Threshold { .. } => "threshold",
            TechnologySpec::Linear { .. } => "linear",
            TechnologySpec::Quadratic { .. } => "quadratic",
            TechnologySpec::Sshaped { .. } => "sshaped",
            TechnologySpec::Concave { .. } => "concave",
            TechnologySpec::Table { .. } => "table",
            TechnologySpec::General { .. } => "general",
        }
    }
}

/// A validated technology evaluator for a game with `n` players.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Technology {
    spec: TechnologySpec,
    n: usize,
}

impl Technology {
    /// Validates `spec` against the player count and returns an evaluator.
    pub fn new(spec: TechnologySpec, n: usize) -> Result<Self> {
        match &spec {
            TechnologySpec::Threshold { tau, v_low, v_high } => {
                if *tau < 1 || *tau > n {
                    return Err(Error::invalid_config(
                        "technology.params.tau",
                        format!("threshold level must lie in [1, n={n}], got {tau}"),
                    ));
                }
                if !v_low.is_finite() || *v_low < 0.0 {
                    return Err(Error::invalid_config(
                        "technology.params.v_low",
                        "must be finite and nonnegative",
                    ));
                }
                if !v_high.is_finite() || v_high <= v_low {
                    return Err(Error::invalid_config(
                        "technology.params.v_high",
                        format!("must be finite and greater than v_low={v_low}"),
                    ));
                }
            }
            TechnologySpec::Linear { lambda_v } => {
                if !lambda_v.is_finite() || *lambda_v <= 0.0 {
                    return Err(Error::invalid_config(
                        "technology.params.lambda_v",
                        "must be finite and positive",
                    ));
                }
            }
            TechnologySpec::Quadratic { tau } => {
                if !tau.is_finite() || *tau <= 0.0 {
                    return Err(Error::invalid_config(
                        "technology.params.tau",
                        "must be finite and positive",
                    ));
                }
            }
            TechnologySpec::Sshaped { tau, c } => {
                if !tau.is_finite() || *tau <= 0.0 {
                    return Err(Error::invalid_config(
                        "technology.params.tau",
                        "must be finite and positive",
                    ));
                }
                if !c.is_finite() || *c <= 0.0 {
                    return Err(Error::invalid_config(
                        "technology.params.c",
                        "must be finite and positive",
                    ));
                }
            }
            TechnologySpec::Concave { tau, c } => {
                if !tau.is_finite() || *tau <= 0.0 {
                    return Err(Error::invalid_config(
                        "technology.params.tau",
                        "must be finite and positive",
                    ));
                }
                if !c.is_finite() || *c <= 0.0 || *c >= 1.0 {
                    return Err(Error::invalid_config(
                        "technology.params.c",
                        "must lie strictly inside (0, 1)",
                    ));
                }
            }
            TechnologySpec::Table { values } => {
                if values.len() != n + 1 {
                    return Err(Error::invalid_config(
                        "technology.params.values",
                        format!(
                            "table must have n+1={} entries, got {}",
                            n + 1,
                            values.len()
                        ),
                    ));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::invalid_config(
                        "technology.params.values",
                        "table entries must be finite",
                    ));
                }
                if values.windows(2).any(|w| w[1] < w[0]) {
                    return Err(Error::invalid_config(
                        "technology.params.values",
                        "table must be non-decreasing",
                    ));
                }
            }
            TechnologySpec::General { values } => {
                if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::invalid_config(
                        "technology.params.values",
                        "general table must be nonempty and finite",
                    ));
                }
                // Length against the action grid is checked by GameConfig,
                // which knows the per-player action sets.
            }
        }
        Ok(Technology { spec, n })
    }

    pub fn spec(&self) -> &TechnologySpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// True for every family whose value depends only on the total level.
    pub fn is_anonymous(&self) -> bool {
        !matches!(self.spec, TechnologySpec::General { .. })
    }

    pub fn is_threshold(&self) -> bool {
        matches!(self.spec, TechnologySpec::Threshold { .. })
    }

    /// Value at an integer contribution level `0 <= ell <= n`.
    pub fn eval_level(&self, ell: usize) -> Result<f64> {
        if ell > self.n {
            return Err(Error::LevelOutOfRange { ell, n: self.n });
        }
        self.eval_real(ell as f64)
    }

    /// Value at a real-valued total contribution.
    ///
    /// Closed-form families accept any nonnegative level (non-binary
    /// action grids can sum past `n`); the tabulated family requires an
    /// integer level within `0..=n` and the general family is not
    /// anonymous at all.
    pub fn eval_real(&self, ell: f64) -> Result<f64> {
        if !ell.is_finite() || ell < 0.0 {
            return Err(Error::InvalidProfile(format!(
                "contribution level {ell} must be nonnegative"
            )));
        }
        match &self.spec {
            TechnologySpec::Threshold { tau, v_low, v_high } => {
                Ok(if ell < *tau as f64 { *v_low } else { *v_high })
            }
            TechnologySpec::Linear { lambda_v } => Ok(lambda_v * ell),
            TechnologySpec::Quadratic { tau } => Ok(ell * ell / tau),
            TechnologySpec::Sshaped { tau, c } => {
                let x = (ell / tau).powf(*c);
                Ok(x / (1.0 + x))
            }
            TechnologySpec::Concave { tau, c } => Ok(ell.powf(*c) / tau),
            TechnologySpec::Table { values } => {
                if ell.fract() != 0.0 {
                    Err(Error::Unsupported(format!(
                        "tabulated technology requires an integer level, got {ell}"
                    )))
                } else if ell as usize > self.n {
                    Err(Error::LevelOutOfRange {
                        ell: ell as usize,
                        n: self.n,
                    })
                } else {
                    Ok(values[ell as usize])
                }
            }
            TechnologySpec::General { .. } => Err(Error::Unsupported(
                "general technology has no anonymous evaluation".to_string(),
            )),
        }
    }

    /// Value of a full profile. `actions` are the per-player action sets;
    /// anonymous families ignore them, the general family needs them to
    /// index its table.
    pub fn eval_profile(&self, values: &[f64], actions: &[Vec<f64>]) -> Result<f64> {
        match &self.spec {
            TechnologySpec::General { values: table } => {
                let idx = flat_index(values, actions)?;
                table.get(idx).copied().ok_or_else(|| {
                    Error::InvalidProfile(format!(
                        "profile index {idx} outside general table of length {}",
                        table.len()
                    ))
                })
            }
            _ => self.eval_real(values.iter().sum()),
        }
    }

    /// Smallest `s` such that `V(l+1) - V(l) <= s` for every integer
    /// `l` in `[lo, hi)`: the largest single-step increment on the
    /// interval. Zero means the technology is flat there.
    pub fn max_increment(&self, lo: usize, hi: usize) -> Result<f64> {
        if hi > self.n || lo >= hi {
            return Err(Error::InvalidProfile(format!(
                "increment interval [{lo}, {hi}) invalid for n={}",
                self.n
            )));
        }
        let mut s = f64::NEG_INFINITY;
        for ell in lo..hi {
            let inc = self.eval_level(ell + 1)? - self.eval_level(ell)?;
            if inc > s {
                s = inc;
            }
        }
        Ok(s)
    }
}

/// Lexicographic index of a profile in the action grid (player 0 most
/// significant digit).
pub(crate) fn flat_index(values: &[f64], actions: &[Vec<f64>]) -> Result<usize> {
    if values.len() != actions.len() {
        return Err(Error::InvalidProfile(format!(
            "profile has {} entries for {} players",
            values.len(),
            actions.len()
        )));
    }
    let mut idx = 0usize;
    for (i, (&v, set)) in values.iter().zip(actions).enumerate() {
        let pos = set.iter().position(|&a| a == v).ok_or_else(|| {
            Error::InvalidProfile(format!("player {i} action {v} not in their action set"))
        })?;
        idx = idx * set.len() + pos;
    }
    Ok(idx)
}
