//! Game primitives and the exact algebra tying contributions, token
//! value, rewards, utilities, potential, and the aggregate metrics
//! together.
//!
//! Utilities are always computed through the reward identity
//! `gamma * t(a) = (rho / n) * V(a)`, so the token supply enters only
//! token-denominated reporting and never perturbs utility arithmetic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::technology::{Technology, TechnologySpec};

/// A fully validated game instance.
#[derive(Debug, Clone, Serialize)]
pub struct GameConfig {
    n: usize,
    costs: Vec<f64>,
    rho: f64,
    t_tot: f64,
    beta: f64,
    technology: Technology,
    actions: Vec<Vec<f64>>,
    d_v: f64,
}

impl GameConfig {
    pub fn new(
        costs: Vec<f64>,
        rho: f64,
        t_tot: f64,
        beta: f64,
        technology_spec: TechnologySpec,
        actions: Option<Vec<Vec<f64>>>,
        d_v: f64,
    ) -> Result<Self> {
        let n = costs.len();
        if n == 0 {
            return Err(Error::invalid_config("n", "at least one player required"));
        }
        if costs.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::invalid_config(
                "costs",
                "per-unit costs must be finite and nonnegative",
            ));
        }
        if !(0.0..=1.0).contains(&rho) || !rho.is_finite() {
            return Err(Error::invalid_config("rho", "must lie in [0, 1]"));
        }
        if !t_tot.is_finite() || t_tot <= 0.0 {
            return Err(Error::invalid_config(
                "t_tot",
                "token supply must be positive",
            ));
        }
        if !beta.is_finite() || beta < 0.0 {
            return Err(Error::invalid_config(
                "beta",
                "must be finite and nonnegative",
            ));
        }
        if !d_v.is_finite() || d_v < 0.0 {
            return Err(Error::invalid_config(
                "d_v",
                "must be finite and nonnegative",
            ));
        }
        let actions = actions.unwrap_or_else(|| vec![vec![0.0, 1.0]; n]);
        if actions.len() != n {
            return Err(Error::invalid_config(
                "actions",
                format!("expected {n} action sets, got {}", actions.len()),
            ));
        }
        for (i, set) in actions.iter().enumerate() {
            if set.is_empty() {
                return Err(Error::invalid_config(
                    &format!("actions[{i}]"),
                    "action set must be nonempty",
                ));
            }
            if set.iter().any(|a| !a.is_finite() || *a < 0.0) {
                return Err(Error::invalid_config(
                    &format!("actions[{i}]"),
                    "actions must be finite and nonnegative",
                ));
            }
            if set.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::invalid_config(
                    &format!("actions[{i}]"),
                    "actions must be strictly ascending (sorted, no duplicates)",
                ));
            }
        }
        let technology = Technology::new(technology_spec, n)?;
        if let TechnologySpec::General { values } = technology.spec() {
            let grid: usize = actions.iter().map(|s| s.len()).product();
            if values.len() != grid {
                return Err(Error::invalid_config(
                    "technology.params.values",
                    format!(
                        "general table must cover the action grid: expected {grid} entries, got {}",
                        values.len()
                    ),
                ));
            }
        }
        if matches!(technology.spec(), TechnologySpec::Table { .. })
            && !actions.iter().all(|s| s.as_slice() == [0.0, 1.0])
        {
            return Err(Error::invalid_config(
                "technology",
                "tabulated technology requires binary actions",
            ));
        }
        Ok(GameConfig {
            n,
            costs,
            rho,
            t_tot,
            beta,
            technology,
            actions,
            d_v,
        })
    }

    /// Uniform-cost, binary-action instance: the workhorse configuration.
    pub fn uniform_binary(
        n: usize,
        alpha: f64,
        rho: f64,
        t_tot: f64,
        beta: f64,
        technology_spec: TechnologySpec,
        d_v: f64,
    ) -> Result<Self> {
        GameConfig::new(vec![alpha; n], rho, t_tot, beta, technology_spec, None, d_v)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn t_tot(&self) -> f64 {
        self.t_tot
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn d_v(&self) -> f64 {
        self.d_v
    }

    pub fn technology(&self) -> &Technology {
        &self.technology
    }

    pub fn actions(&self) -> &[Vec<f64>] {
        &self.actions
    }

    pub fn action_set(&self, i: usize) -> Result<&[f64]> {
        self.actions
            .get(i)
            .map(|s| s.as_slice())
            .ok_or(Error::PlayerIndex {
                index: i,
                n: self.n,
            })
    }

    /// Reward fraction per player per unit of system value.
    pub fn reward_share(&self) -> f64 {
        self.rho / self.n as f64
    }

    /// The common cost when all players share one, `None` otherwise.
    pub fn uniform_cost(&self) -> Option<f64> {
        let first = self.costs[0];
        self.costs.iter().all(|&c| c == first).then_some(first)
    }

    pub fn is_binary(&self) -> bool {
        self.actions.iter().all(|s| s.as_slice() == [0.0, 1.0])
    }

    /// Same game with a different airdrop fraction.
    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rho) || !rho.is_finite() {
            return Err(Error::invalid_config("rho", "must lie in [0, 1]"));
        }
        let mut cfg = self.clone();
        cfg.rho = rho;
        Ok(cfg)
    }

    /// Same game with a different uniform cost.
    pub fn with_uniform_cost(&self, alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::invalid_config(
                "costs",
                "must be finite and nonnegative",
            ));
        }
        let mut cfg = self.clone();
        cfg.costs = vec![alpha; self.n];
        Ok(cfg)
    }

    pub fn validate_profile(&self, profile: &Profile) -> Result<()> {
        if profile.values.len() != self.n {
            return Err(Error::InvalidProfile(format!(
                "profile has {} entries for {} players",
                profile.values.len(),
                self.n
            )));
        }
        for (i, (&v, set)) in profile.values.iter().zip(&self.actions).enumerate() {
            if !set.contains(&v) {
                return Err(Error::InvalidProfile(format!(
                    "player {i} action {v} not in their action set"
                )));
            }
        }
        Ok(())
    }

    /// System value `V(a)`.
    pub fn system_value(&self, profile: &Profile) -> Result<f64> {
        self.validate_profile(profile)?;
        self.technology.eval_profile(&profile.values, &self.actions)
    }

    /// Monetary cost aggregate `sum_i c_i * a_i`.
    pub fn social_cost(&self, profile: &Profile) -> f64 {
        profile
            .values
            .iter()
            .zip(&self.costs)
            .map(|(a, c)| c * a)
            .sum()
    }

    /// Player `i`'s payoff: reward share of the system value minus their
    /// contribution cost.
    pub fn utility(&self, profile: &Profile, i: usize) -> Result<f64> {
        if i >= self.n {
            return Err(Error::PlayerIndex {
                index: i,
                n: self.n,
            });
        }
        let v = self.system_value(profile)?;
        Ok(self.reward_share() * v - self.costs[i] * profile.values[i])
    }

    /// Exact potential of the game: `(rho/n) * V(a) - SC(a)`. Single
    /// deviations change this by exactly the deviating player's utility
    /// change.
    pub fn potential(&self, profile: &Profile) -> Result<f64> {
        let v = self.system_value(profile)?;
        Ok(self.reward_share() * v - self.social_cost(profile))
    }

    /// All headline metrics for one profile.
    pub fn metrics(&self, profile: &Profile) -> Result<Metrics> {
        let system_value = self.system_value(profile)?;
        let social_cost = self.social_cost(profile);
        Ok(Metrics {
            system_value,
            token_value: token_value(system_value, self.t_tot)?,
            social_cost,
            users_welfare: self.rho * system_value - social_cost,
            designer_profit: (1.0 - self.rho) * system_value - self.d_v,
        })
    }
}

/// Price of one token: system value spread over the total supply.
pub fn token_value(system_value: f64, t_tot: f64) -> Result<f64> {
    if !t_tot.is_finite() || t_tot <= 0.0 {
        return Err(Error::invalid_config(
            "t_tot",
            "token supply must be positive",
        ));
    }
    Ok(system_value / t_tot)
}

/// Tokens handed to each player: `gamma = rho * t_tot / n`. Fractional
/// amounts are reported as-is, never rounded.
pub fn per_player_tokens(rho: f64, t_tot: f64, n: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&rho) || !rho.is_finite() {
        return Err(Error::invalid_config("rho", "must lie in [0, 1]"));
    }
    if !t_tot.is_finite() || t_tot <= 0.0 {
        return Err(Error::invalid_config(
            "t_tot",
            "token supply must be positive",
        ));
    }
    if n == 0 {
        return Err(Error::invalid_config("n", "at least one player required"));
    }
    Ok(rho * t_tot / n as f64)
}

/// A strategy profile: one chosen action per player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Profile {
    pub values: Vec<f64>,
}

impl Profile {
    pub fn new(values: Vec<f64>) -> Self {
        Profile { values }
    }

    pub fn zeros(n: usize) -> Self {
        Profile {
            values: vec![0.0; n],
        }
    }

    /// Binary profile with the given contributor indices set to 1.
    pub fn from_contributors(n: usize, contributors: &[usize]) -> Self {
        let mut values = vec![0.0; n];
        for &i in contributors {
            values[i] = 1.0;
        }
        Profile { values }
    }

    /// Total contribution `sum_i a_i`.
    pub fn ell(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn with_action(&self, i: usize, value: f64) -> Self {
        let mut values = self.values.clone();
        values[i] = value;
        Profile { values }
    }
}

/// Integer contribution level of a binary game, `0 <= ell <= n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ContributionLevel(pub usize);

impl ContributionLevel {
    pub fn new(ell: usize, n: usize) -> Result<Self> {
        if ell > n {
            Err(Error::LevelOutOfRange { ell, n })
        } else {
            Ok(ContributionLevel(ell))
        }
    }

    pub fn get(&self) -> usize {
        self.0
    }
}

/// Aggregate outcome measures for a single profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub system_value: f64,
    pub token_value: f64,
    pub social_cost: f64,
    pub users_welfare: f64,
    pub designer_profit: f64,
}
