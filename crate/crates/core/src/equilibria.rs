//! Static solution concepts: pure Nash verification and enumeration,
//! potential maximizers with their vanishing-noise limit distribution,
//! and closed-form designer guidance for threshold, linear, and
//! quadratic technologies.
//!
//! Deviation tests use the difference form
//! `(rho/n) * (V(a') - V(a)) - c_i * (a_i' - a_i) <= 0`
//! so the anonymous fast path and the brute-force path perform
//! bit-identical comparisons.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{GameConfig, Profile};
use crate::numeric::log_binomial;

/// Tuning for brute-force enumeration.
#[derive(Debug, Clone, Copy)]
pub struct EnumerationOptions {
    /// Hard cap on the profile-space size the brute force will walk.
    pub max_profiles: usize,
    /// Absolute tolerance for potential ties when collecting maximizers.
    pub tie_tolerance: f64,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions {
            max_profiles: 2_000_000,
            tie_tolerance: 1e-9,
        }
    }
}

/// A profitable single-player deviation, witnessing a non-equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Deviation {
    pub player: usize,
    pub from: f64,
    pub to: f64,
    pub gain: f64,
}

/// Outcome of a pure-Nash check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PneCheck {
    pub is_equilibrium: bool,
    pub violation: Option<Deviation>,
}

/// An equilibrium class on the anonymous-binary fast path: a
/// contribution level together with the number of equilibrium profiles
/// realizing it. Counts are exact up to 2^53 and rounded beyond.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelClass {
    pub ell: usize,
    pub witness_count: f64,
}

/// Either explicit profiles (brute force) or level classes (fast path).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquilibriumSet {
    Profiles(Vec<Profile>),
    Levels(Vec<LevelClass>),
}

/// One class of the vanishing-noise limit distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquilibriumClass {
    Profile { profile: Profile },
    Level { ell: usize, witness_count: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitEntry {
    pub class: EquilibriumClass,
    /// Total probability mass the limit distribution puts on the class.
    pub mass: f64,
}

/// Combined report of static analysis; operations fill the fields they
/// compute.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pne: Option<EquilibriumSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub potmax: Option<EquilibriumSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_potential: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit_distribution: Option<Vec<LimitEntry>>,
}

fn system_value_fast(config: &GameConfig, values: &[f64], sum: f64) -> Result<f64> {
    if config.technology().is_anonymous() {
        config.technology().eval_real(sum)
    } else {
        config.technology().eval_profile(values, config.actions())
    }
}

/// First profitable deviation from `values`, scanning players then
/// actions in ascending order. `None` means the profile is a pure Nash
/// equilibrium.
fn first_violation(config: &GameConfig, values: &mut [f64], sum: f64) -> Result<Option<Deviation>> {
    let share = config.reward_share();
    let v_here = system_value_fast(config, values, sum)?;
    for i in 0..config.n() {
        let current = values[i];
        let cost = config.costs()[i];
        for &candidate in config.action_set(i)? {
            if candidate == current {
                continue;
            }
            values[i] = candidate;
            let v_dev = system_value_fast(config, values, sum - current + candidate)?;
            values[i] = current;
            let gain = share * (v_dev - v_here) - cost * (candidate - current);
            if gain > 0.0 {
                return Ok(Some(Deviation {
                    player: i,
                    from: current,
                    to: candidate,
                    gain,
                }));
            }
        }
    }
    Ok(None)
}

/// Checks whether `profile` is a pure Nash equilibrium, returning the
/// first profitable deviation when it is not.
pub fn is_pure_nash(config: &GameConfig, profile: &Profile) -> Result<PneCheck> {
    config.validate_profile(profile)?;
    let mut values = profile.values.clone();
    let sum = profile.ell();
    let violation = first_violation(config, &mut values, sum)?;
    Ok(PneCheck {
        is_equilibrium: violation.is_none(),
        violation,
    })
}

/// Same check through raw utility comparisons `u_i(a) >= u_i(a') - tol`.
///
/// The difference form used by [`is_pure_nash`] is algebraically equal;
/// this route re-derives it from full utilities and therefore carries
/// cancellation noise, hence the explicit tolerance.
pub fn is_pure_nash_by_utilities(
    config: &GameConfig,
    profile: &Profile,
    tol: f64,
) -> Result<PneCheck> {
    config.validate_profile(profile)?;
    for i in 0..config.n() {
        let u_here = config.utility(profile, i)?;
        let current = profile.values[i];
        for &candidate in config.action_set(i)? {
            if candidate == current {
                continue;
            }
            let u_dev = config.utility(&profile.with_action(i, candidate), i)?;
            let gain = u_dev - u_here;
            if gain > tol {
                return Ok(PneCheck {
                    is_equilibrium: false,
                    violation: Some(Deviation {
                        player: i,
                        from: current,
                        to: candidate,
                        gain,
                    }),
                });
            }
        }
    }
    Ok(PneCheck {
        is_equilibrium: true,
        violation: None,
    })
}

fn profile_space_size(config: &GameConfig, cap: usize) -> Result<usize> {
    let mut total: usize = 1;
    for set in config.actions() {
        total = total.saturating_mul(set.len());
        if total > cap {
            return Err(Error::ResourceLimit(format!(
                "profile space exceeds {cap} profiles; use the anonymous-binary level analysis instead"
            )));
        }
    }
    Ok(total)
}

fn decode_profile(config: &GameConfig, mut idx: usize) -> Vec<f64> {
    let n = config.n();
    let mut values = vec![0.0; n];
    for i in (0..n).rev() {
        let set = &config.actions()[i];
        values[i] = set[idx % set.len()];
        idx /= set.len();
    }
    values
}

/// Brute-force enumeration of all pure Nash equilibria, in lexicographic
/// profile order.
pub fn enumerate_pne_brute(config: &GameConfig, opts: &EnumerationOptions) -> Result<Vec<Profile>> {
    let total = profile_space_size(config, opts.max_profiles)?;
    const CHUNK: usize = 1 << 12;
    let chunks = total.div_ceil(CHUNK);
    let results: Vec<Vec<Profile>> = (0..chunks)
        .into_par_iter()
        .map(|ci| {
            let mut found = Vec::new();
            for idx in ci * CHUNK..((ci + 1) * CHUNK).min(total) {
                let mut values = decode_profile(config, idx);
                let sum: f64 = values.iter().sum();
                if first_violation(config, &mut values, sum)
                    .expect("validated config")
                    .is_none()
                {
                    found.push(Profile::new(values));
                }
            }
            found
        })
        .collect();
    Ok(results.into_iter().flatten().collect())
}

fn binomial_count(n: usize, k: usize) -> f64 {
    let count = log_binomial(n, k).exp();
    if count < 9.0e15 {
        count.round()
    } else {
        count
    }
}

/// Equilibrium contribution levels for anonymous technologies with
/// binary actions, with exact witness counts.
///
/// With heterogeneous costs the marginal conditions at level `ell` are
/// evaluated for the `ell` cheapest players (ties by index): any
/// equilibrium support is cost-downward-closed, so a level admits an
/// equilibrium exactly when that canonical set does.
pub fn equilibrium_levels(config: &GameConfig) -> Result<Vec<LevelClass>> {
    if !config.technology().is_anonymous() || !config.is_binary() {
        return Err(Error::Unsupported(
            "level enumeration requires an anonymous technology and binary actions".to_string(),
        ));
    }
    let n = config.n();
    let share = config.reward_share();
    let values: Vec<f64> = (0..=n)
        .map(|ell| config.technology().eval_level(ell))
        .collect::<Result<_>>()?;

    let mut classes = Vec::new();
    for ell in 0..=n {
        // Threshold rewards for joining (from ell) and for staying (at ell).
        let k_up = (ell < n).then(|| share * (values[ell + 1] - values[ell]));
        let k_down = (ell > 0).then(|| share * (values[ell] - values[ell - 1]));
        let mut must_in = 0usize;
        let mut flexible = 0usize;
        let mut impossible = false;
        for &c in config.costs() {
            let can_out = k_up.is_none_or(|k| k <= c);
            let can_in = k_down.is_none_or(|k| c <= k);
            match (can_in, can_out) {
                (true, true) => flexible += 1,
                (true, false) => must_in += 1,
                (false, true) => {}
                (false, false) => {
                    impossible = true;
                    break;
                }
            }
        }
        if impossible || ell < must_in || ell - must_in > flexible {
            continue;
        }
        classes.push(LevelClass {
            ell,
            witness_count: binomial_count(flexible, ell - must_in),
        });
    }
    Ok(classes)
}

/// Enumerates pure Nash equilibria, preferring the anonymous-binary
/// level analysis and falling back to capped brute force.
pub fn enumerate_pne(config: &GameConfig, opts: &EnumerationOptions) -> Result<EquilibriumReport> {
    let pne = if config.technology().is_anonymous() && config.is_binary() {
        EquilibriumSet::Levels(equilibrium_levels(config)?)
    } else {
        EquilibriumSet::Profiles(enumerate_pne_brute(config, opts)?)
    };
    Ok(EquilibriumReport {
        pne: Some(pne),
        ..Default::default()
    })
}

/// Brute-force potential maximizers: all profiles whose potential is
/// within `tie_tolerance` of the maximum, in lexicographic order.
pub fn potential_maximizers_brute(
    config: &GameConfig,
    opts: &EnumerationOptions,
) -> Result<(Vec<Profile>, f64)> {
    let total = profile_space_size(config, opts.max_profiles)?;
    let tol = opts.tie_tolerance;
    const CHUNK: usize = 1 << 12;
    let chunks = total.div_ceil(CHUNK);
    let partials: Vec<(f64, Vec<(usize, f64)>)> = (0..chunks)
        .into_par_iter()
        .map(|ci| {
            let mut local_max = f64::NEG_INFINITY;
            let mut candidates: Vec<(usize, f64)> = Vec::new();
            for idx in ci * CHUNK..((ci + 1) * CHUNK).min(total) {
                let values = decode_profile(config, idx);
                let profile = Profile::new(values);
                let phi = config.potential(&profile).expect("validated config");
                if phi > local_max {
                    local_max = phi;
                    candidates.retain(|(_, p)| *p >= local_max - tol);
                }
                if phi >= local_max - tol {
                    candidates.push((idx, phi));
                }
            }
            (local_max, candidates)
        })
        .collect();
    let global_max = partials
        .iter()
        .map(|(m, _)| *m)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut profiles = Vec::new();
    for (_, candidates) in partials {
        for (idx, phi) in candidates {
            if phi >= global_max - tol {
                profiles.push(Profile::new(decode_profile(config, idx)));
            }
        }
    }
    Ok((profiles, global_max))
}

/// Potential-maximizing levels for anonymous binary games with uniform
/// costs, with ties kept under the absolute tolerance.
pub fn potmax_levels(config: &GameConfig, tie_tolerance: f64) -> Result<(Vec<LevelClass>, f64)> {
    let alpha = config.uniform_cost().ok_or_else(|| {
        Error::Unsupported("level potential analysis requires uniform costs".to_string())
    })?;
    if !config.technology().is_anonymous() || !config.is_binary() {
        return Err(Error::Unsupported(
            "level potential analysis requires an anonymous technology and binary actions"
                .to_string(),
        ));
    }
    let n = config.n();
    let share = config.reward_share();
    let phis: Vec<f64> = (0..=n)
        .map(|ell| Ok(share * config.technology().eval_level(ell)? - alpha * ell as f64))
        .collect::<Result<_>>()?;
    let max_phi = phis.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let classes = phis
        .iter()
        .enumerate()
        .filter(|(_, phi)| **phi >= max_phi - tie_tolerance)
        .map(|(ell, _)| LevelClass {
            ell,
            witness_count: binomial_count(n, ell),
        })
        .collect();
    Ok((classes, max_phi))
}

/// Potential maximizers and the vanishing-noise limit distribution
/// (uniform over all maximizing profiles).
pub fn potential_maximizers(
    config: &GameConfig,
    opts: &EnumerationOptions,
) -> Result<EquilibriumReport> {
    let fast_applicable =
        config.technology().is_anonymous() && config.is_binary() && config.uniform_cost().is_some();
    let within_cap = profile_space_size(config, opts.max_profiles).is_ok();
    if fast_applicable && !within_cap {
        let (classes, max_phi) = potmax_levels(config, opts.tie_tolerance)?;
        let total: f64 = classes.iter().map(|c| c.witness_count).sum();
        let limit = classes
            .iter()
            .map(|c| LimitEntry {
                class: EquilibriumClass::Level {
                    ell: c.ell,
                    witness_count: c.witness_count,
                },
                mass: c.witness_count / total,
            })
            .collect();
        return Ok(EquilibriumReport {
            potmax: Some(EquilibriumSet::Levels(classes)),
            max_potential: Some(max_phi),
            limit_distribution: Some(limit),
            ..Default::default()
        });
    }
    let (profiles, max_phi) = potential_maximizers_brute(config, opts)?;
    let mass = 1.0 / profiles.len() as f64;
    let limit = profiles
        .iter()
        .map(|p| LimitEntry {
            class: EquilibriumClass::Profile { profile: p.clone() },
            mass,
        })
        .collect();
    Ok(EquilibriumReport {
        potmax: Some(EquilibriumSet::Profiles(profiles)),
        max_potential: Some(max_phi),
        limit_distribution: Some(limit),
        ..Default::default()
    })
}

fn threshold_params(config: &GameConfig) -> Result<(usize, f64, f64, f64)> {
    use crate::technology::TechnologySpec;
    let alpha = config.uniform_cost().ok_or_else(|| {
        Error::Unsupported("threshold analysis requires uniform costs".to_string())
    })?;
    if !config.is_binary() {
        return Err(Error::Unsupported(
            "threshold analysis requires binary actions".to_string(),
        ));
    }
    match config.technology().spec() {
        TechnologySpec::Threshold { tau, v_low, v_high } => Ok((*tau, *v_low, *v_high, alpha)),
        other => Err(Error::Unsupported(format!(
            "threshold analysis requires a threshold technology, got {}",
            other.kind_name()
        ))),
    }
}

/// The critical airdrop fraction `alpha * n * tau / (v_high - v_low)`
/// at which the stochastically stable outcome flips. May exceed 1, in
/// which case the high-value outcome is never stochastically stable.
pub fn threshold_critical_rho(config: &GameConfig) -> Result<f64> {
    let (tau, v_low, v_high, alpha) = threshold_params(config)?;
    Ok(alpha * config.n() as f64 * tau as f64 / (v_high - v_low))
}

/// Designer guidance regimes in the vanishing-noise limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegimeKind {
    /// Costs too high: the good outcome is unreachable for any airdrop.
    NoAirdropForced,
    /// Airdrops could work but do not pay for the designer.
    NoAirdropOptimal,
    /// Rewards slightly above the critical fraction maximize profit.
    AirdropOptimal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignerRegime {
    pub regime: RegimeKind,
    pub rho_c: f64,
    pub recommended_rho: f64,
    pub guaranteed_profit: f64,
    /// True when the classifying quantity sits exactly on a regime
    /// boundary; the reported regime is then the weakly-preferred side.
    pub boundary: bool,
    pub epsilon: f64,
}

/// Classifies the designer's optimal vanishing-noise strategy for a
/// threshold technology with uniform costs.
pub fn threshold_designer_regime(config: &GameConfig, epsilon: f64) -> Result<DesignerRegime> {
    if epsilon <= 0.0 || !epsilon.is_finite() {
        return Err(Error::invalid_config("epsilon", "must be positive"));
    }
    let (tau, v_low, v_high, alpha) = threshold_params(config)?;
    let n = config.n() as f64;
    let delta_v = v_high - v_low;
    let x = alpha * n * tau as f64;
    let rho_c = x / delta_v;
    let intermediate_floor = delta_v * (1.0 - v_low / v_high);
    if x > delta_v {
        Ok(DesignerRegime {
            regime: RegimeKind::NoAirdropForced,
            rho_c,
            recommended_rho: 0.0,
            guaranteed_profit: v_low - config.d_v(),
            boundary: false,
            epsilon,
        })
    } else if x < intermediate_floor {
        let recommended_rho = (rho_c + epsilon).min(1.0);
        Ok(DesignerRegime {
            regime: RegimeKind::AirdropOptimal,
            rho_c,
            recommended_rho,
            guaranteed_profit: (1.0 - recommended_rho) * v_high - config.d_v(),
            boundary: false,
            epsilon,
        })
    } else {
        Ok(DesignerRegime {
            regime: RegimeKind::NoAirdropOptimal,
            rho_c,
            recommended_rho: 0.0,
            guaranteed_profit: v_low - config.d_v(),
            boundary: x == delta_v || x == intermediate_floor,
            epsilon,
        })
    }
}

/// Designer optimum for a linear technology with heterogeneous costs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearOptimum {
    pub rho_star: f64,
    pub ell_star: usize,
    /// `(1 - rho*) * lambda_v * ell* - d_v`.
    pub profit: f64,
    /// Original indices of the incentivized players, cheapest first.
    pub contributors: Vec<usize>,
}

/// Profit-maximizing airdrop for `V = lambda_v * ell`: scans the
/// candidates `rho_ell = n * c_(ell) / lambda_v` over ascending costs
/// and keeps the feasible level maximizing `(lambda_v - n c_(ell)) * ell`,
/// breaking ties toward the smaller airdrop.
pub fn linear_optimal_rho(costs: &[f64], lambda_v: f64, d_v: f64) -> Result<LinearOptimum> {
    if lambda_v <= 0.0 || !lambda_v.is_finite() {
        return Err(Error::invalid_config(
            "technology.params.lambda_v",
            "must be positive",
        ));
    }
    if costs.is_empty() {
        return Err(Error::invalid_config(
            "costs",
            "at least one player required",
        ));
    }
    if costs.iter().any(|c| !c.is_finite() || *c < 0.0) {
        return Err(Error::invalid_config(
            "costs",
            "must be finite and nonnegative",
        ));
    }
    let n = costs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| costs[a].total_cmp(&costs[b]).then(a.cmp(&b)));

    let mut best: Option<(usize, f64, f64)> = None; // (ell, rho, objective)
    for ell in 1..=n {
        let c = costs[order[ell - 1]];
        let rho = n as f64 * c / lambda_v;
        if rho > 1.0 {
            continue;
        }
        let objective = (lambda_v - n as f64 * c) * ell as f64;
        if objective > 0.0 && best.is_none_or(|(_, _, o)| objective > o) {
            best = Some((ell, rho, objective));
        }
    }
    Ok(match best {
        Some((ell, rho, objective)) => LinearOptimum {
            rho_star: rho,
            ell_star: ell,
            profit: objective - d_v,
            contributors: order[..ell].to_vec(),
        },
        None => LinearOptimum {
            rho_star: 0.0,
            ell_star: 0,
            profit: -d_v,
            contributors: Vec::new(),
        },
    })
}

/// Cost regions of the quadratic (network-effect) technology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadraticRegion {
    /// `alpha < 1/(tau n)`: the zero equilibrium exists only for
    /// `rho <= alpha tau n`; above that only the full equilibrium remains.
    LowCost,
    /// `1/(tau n) < alpha < 1/tau`: both equilibria coexist for every
    /// airdrop; vanishing noise selects the full one iff `rho > alpha tau`.
    Intermediate,
    /// `alpha > 1/tau`: the zero equilibrium is selected regardless of
    /// the airdrop.
    HighCost,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticRegimes {
    pub region: QuadraticRegion,
    pub alpha: f64,
    pub lower_threshold: f64,
    pub upper_threshold: f64,
    /// True when `alpha` equals a region boundary exactly; the region
    /// field then reports the closure from above.
    pub boundary: bool,
    /// `alpha * tau * n`: in the low-cost region, the zero equilibrium
    /// survives only for airdrops up to this value.
    pub rho_bad_pne_max: Option<f64>,
    /// `alpha * tau`: in the intermediate region, vanishing noise
    /// selects the full equilibrium above this value.
    pub rho_selects_good: Option<f64>,
}

/// Classifies the cost regime of `V(ell) = ell^2 / tau`.
pub fn quadratic_regimes(alpha: f64, tau: f64, n: usize) -> Result<QuadraticRegimes> {
    if tau <= 0.0 || !tau.is_finite() {
        return Err(Error::invalid_config(
            "technology.params.tau",
            "must be positive",
        ));
    }
    if n == 0 {
        return Err(Error::invalid_config("n", "at least one player required"));
    }
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::invalid_config(
            "costs",
            "must be finite and nonnegative",
        ));
    }
    let lower = 1.0 / (tau * n as f64);
    let upper = 1.0 / tau;
    let (region, boundary) = if alpha < lower {
        (QuadraticRegion::LowCost, false)
    } else if alpha == lower {
        (QuadraticRegion::Intermediate, true)
    } else if alpha < upper {
        (QuadraticRegion::Intermediate, false)
    } else {
        (QuadraticRegion::HighCost, alpha == upper)
    };
    Ok(QuadraticRegimes {
        region,
        alpha,
        lower_threshold: lower,
        upper_threshold: upper,
        boundary,
        rho_bad_pne_max: (region == QuadraticRegion::LowCost).then_some(alpha * tau * n as f64),
        rho_selects_good: (region == QuadraticRegion::Intermediate).then_some(alpha * tau),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::technology::TechnologySpec;

    fn example_one(rho: f64) -> GameConfig {
        GameConfig::uniform_binary(
            10,
            1.0,
            rho,
            10.0,
            1.0,
            TechnologySpec::Threshold {
                tau: 5,
                v_low: 0.0,
                v_high: 100.0,
            },
            0.0,
        )
        .unwrap()
    }

    fn and_game(rho: f64) -> GameConfig {
        GameConfig::uniform_binary(
            2,
            1.0,
            rho,
            1.0,
            1.0,
            TechnologySpec::Table {
                values: vec![0.0, 0.0, 8.0],
            },
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn threshold_example_profiles() {
        let cfg = example_one(1.0);
        let at_threshold = Profile::from_contributors(10, &[0, 1, 2, 3, 4]);
        assert!(is_pure_nash(&cfg, &at_threshold).unwrap().is_equilibrium);

        let below = Profile::from_contributors(10, &[0, 1, 2, 3]);
        let check = is_pure_nash(&cfg, &below).unwrap();
        assert!(!check.is_equilibrium);
        // The cheapest escape is a contributor quitting a worthless system.
        let dev = check.violation.unwrap();
        assert_eq!(dev.to, 0.0);

        assert!(
            is_pure_nash(&cfg, &Profile::zeros(10))
                .unwrap()
                .is_equilibrium
        );
    }

    #[test]
    fn and_game_lone_contributor_deviates() {
        let cfg = and_game(1.0);
        let check = is_pure_nash(&cfg, &Profile::new(vec![1.0, 0.0])).unwrap();
        assert!(!check.is_equilibrium);
        assert_eq!(check.violation.unwrap().player, 0);
    }

    #[test]
    fn example_one_levels_are_zero_and_tau() {
        let classes = equilibrium_levels(&example_one(1.0)).unwrap();
        let levels: Vec<usize> = classes.iter().map(|c| c.ell).collect();
        assert_eq!(levels, vec![0, 5]);
        assert_eq!(classes[0].witness_count, 1.0);
        assert_eq!(classes[1].witness_count, 252.0);
    }

    #[test]
    fn and_game_brute_force_finds_both_equilibria() {
        let cfg = and_game(1.0);
        let pne = enumerate_pne_brute(&cfg, &EnumerationOptions::default()).unwrap();
        assert_eq!(
            pne,
            vec![Profile::new(vec![0.0, 0.0]), Profile::new(vec![1.0, 1.0])]
        );
    }

    #[test]
    fn weak_linear_rewards_leave_only_the_empty_profile() {
        let cfg = GameConfig::uniform_binary(
            6,
            1.0,
            0.9,
            1.0,
            1.0,
            TechnologySpec::Linear { lambda_v: 2.0 },
            0.0,
        )
        .unwrap();
        let pne = enumerate_pne_brute(&cfg, &EnumerationOptions::default()).unwrap();
        assert_eq!(pne, vec![Profile::zeros(6)]);
    }

    #[test]
    fn potmax_and_game() {
        let cfg = and_game(1.0);
        let (profiles, _) =
            potential_maximizers_brute(&cfg, &EnumerationOptions::default()).unwrap();
        assert_eq!(profiles, vec![Profile::new(vec![1.0, 1.0])]);
    }

    #[test]
    fn potmax_at_critical_rho_keeps_both_classes() {
        let cfg = example_one(0.5);
        let (profiles, _) =
            potential_maximizers_brute(&cfg, &EnumerationOptions::default()).unwrap();
        assert_eq!(profiles.len(), 253);
        let zeros = profiles.iter().filter(|p| p.ell() == 0.0).count();
        let fives = profiles.iter().filter(|p| p.ell() == 5.0).count();
        assert_eq!((zeros, fives), (1, 252));

        let (classes, _) = potmax_levels(&cfg, 1e-9).unwrap();
        assert_eq!(classes.len(), 2);
        assert_eq!(classes[0].ell, 0);
        assert_eq!(classes[1].ell, 5);
    }

    #[test]
    fn potmax_zero_rewards_is_empty_profile() {
        let cfg = example_one(0.0);
        let (profiles, max_phi) =
            potential_maximizers_brute(&cfg, &EnumerationOptions::default()).unwrap();
        assert_eq!(profiles, vec![Profile::zeros(10)]);
        assert_eq!(max_phi, 0.0);
    }

    #[test]
    fn critical_rho_values() {
        assert_eq!(threshold_critical_rho(&example_one(1.0)).unwrap(), 0.5);

        let tight = GameConfig::uniform_binary(
            10,
            1.0,
            1.0,
            1.0,
            1.0,
            TechnologySpec::Threshold {
                tau: 5,
                v_low: 0.0,
                v_high: 40.0,
            },
            0.0,
        )
        .unwrap();
        assert_eq!(threshold_critical_rho(&tight).unwrap(), 1.25);

        let huge = GameConfig::uniform_binary(
            10,
            1.0,
            1.0,
            1.0,
            1.0,
            TechnologySpec::Threshold {
                tau: 5,
                v_low: 0.0,
                v_high: 1e12,
            },
            0.0,
        )
        .unwrap();
        assert!(threshold_critical_rho(&huge).unwrap() < 1e-10);

        let heterogeneous = GameConfig::new(
            vec![1.0, 2.0],
            0.5,
            1.0,
            1.0,
            TechnologySpec::Threshold {
                tau: 1,
                v_low: 0.0,
                v_high: 10.0,
            },
            None,
            0.0,
        )
        .unwrap();
        assert!(threshold_critical_rho(&heterogeneous).is_err());
    }

    fn regime_config(n: usize, alpha: f64, tau: usize, v_low: f64, v_high: f64) -> GameConfig {
        GameConfig::uniform_binary(
            n,
            alpha,
            0.5,
            1.0,
            1.0,
            TechnologySpec::Threshold { tau, v_low, v_high },
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn designer_regimes() {
        // alpha*n*tau = 30, deltaV = 50, floor = 25: airdrop feasible but unprofitable.
        let cfg = regime_config(6, 1.0, 5, 50.0, 100.0);
        let r = threshold_designer_regime(&cfg, 1e-3).unwrap();
        assert_eq!(r.regime, RegimeKind::NoAirdropOptimal);
        assert_eq!(r.recommended_rho, 0.0);
        assert_eq!(r.guaranteed_profit, 50.0);
        assert!(!r.boundary);

        // alpha*n*tau = 60 > deltaV = 50: forced out.
        let cfg = regime_config(6, 2.0, 5, 50.0, 100.0);
        let r = threshold_designer_regime(&cfg, 1e-3).unwrap();
        assert_eq!(r.regime, RegimeKind::NoAirdropForced);
        assert_eq!(r.guaranteed_profit, 50.0);

        // alpha*n*tau = 10 < floor = 25: airdrop pays.
        let cfg = regime_config(5, 0.4, 5, 50.0, 100.0);
        let r = threshold_designer_regime(&cfg, 1e-3).unwrap();
        assert_eq!(r.regime, RegimeKind::AirdropOptimal);
        assert_eq!(r.rho_c, 0.2);
        assert_eq!(r.recommended_rho, 0.2 + 1e-3);
        assert!((r.guaranteed_profit - (1.0 - 0.201) * 100.0).abs() < 1e-12);
    }

    #[test]
    fn zero_floor_value_has_single_transition() {
        // With v_low = 0 the unprofitable-but-feasible band collapses to
        // the single point alpha*n*tau = deltaV.
        let below = regime_config(5, 1.0, 4, 0.0, 100.0); // x = 20 < 100
        assert_eq!(
            threshold_designer_regime(&below, 1e-3).unwrap().regime,
            RegimeKind::AirdropOptimal
        );
        let at = regime_config(5, 5.0, 4, 0.0, 100.0); // x = 100 = deltaV
        let r = threshold_designer_regime(&at, 1e-3).unwrap();
        assert_eq!(r.regime, RegimeKind::NoAirdropOptimal);
        assert!(r.boundary);
        let above = regime_config(5, 6.0, 4, 0.0, 100.0); // x = 120 > 100
        assert_eq!(
            threshold_designer_regime(&above, 1e-3).unwrap().regime,
            RegimeKind::NoAirdropForced
        );
    }

    #[test]
    fn linear_optimum_uniform_costs_is_all_or_nothing() {
        // Feasible: objective grows with ell, so everyone is incentivized.
        let r = linear_optimal_rho(&[1.0; 4], 9.0, 2.0).unwrap();
        assert_eq!(r.ell_star, 4);
        assert_eq!(r.rho_star, 4.0 / 9.0);
        assert_eq!(r.profit, 9.0 * 4.0 - 1.0 * 16.0 - 2.0);

        // Infeasible: required airdrop exceeds the whole supply.
        let r = linear_optimal_rho(&[1.0; 4], 3.0, 0.0).unwrap();
        assert_eq!((r.rho_star, r.ell_star), (0.0, 0));
    }

    #[test]
    fn linear_optimum_breaks_ties_toward_smaller_airdrop() {
        let r = linear_optimal_rho(&[1.0, 2.0, 10.0], 9.0, 0.0).unwrap();
        assert_eq!(r.ell_star, 1);
        assert!((r.rho_star - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.profit, 6.0);
        assert_eq!(r.contributors, vec![0]);
    }

    #[test]
    fn quadratic_regions() {
        let r = quadratic_regimes(0.0005, 10.0, 100).unwrap();
        assert_eq!(r.region, QuadraticRegion::LowCost);
        assert_eq!(r.rho_bad_pne_max, Some(0.0005 * 10.0 * 100.0));

        let r = quadratic_regimes(0.01, 10.0, 100).unwrap();
        assert_eq!(r.region, QuadraticRegion::Intermediate);
        assert_eq!(r.rho_selects_good, Some(0.1));

        let r = quadratic_regimes(0.2, 10.0, 100).unwrap();
        assert_eq!(r.region, QuadraticRegion::HighCost);
        assert!(!r.boundary);

        assert!(quadratic_regimes(0.001, 10.0, 100).unwrap().boundary);
    }

    #[test]
    fn quadratic_potmax_cross_checks() {
        // Intermediate region with rho above alpha*tau: full contribution wins.
        let cfg = GameConfig::uniform_binary(
            20,
            0.01,
            0.5,
            1.0,
            1.0,
            TechnologySpec::Quadratic { tau: 10.0 },
            0.0,
        )
        .unwrap();
        let (classes, _) = potmax_levels(&cfg, 1e-9).unwrap();
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].ell, 20);

        // High-cost region: the empty profile dominates for any airdrop.
        let cfg = GameConfig::uniform_binary(
            20,
            0.2,
            1.0,
            1.0,
            1.0,
            TechnologySpec::Quadratic { tau: 10.0 },
            0.0,
        )
        .unwrap();
        let (classes, _) = potmax_levels(&cfg, 1e-9).unwrap();
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].ell, 0);
    }

    #[test]
    fn profile_cap_is_enforced() {
        // 3^14 profiles exceed the default cap.
        let cfg = GameConfig::new(
            vec![1.0; 14],
            0.5,
            1.0,
            1.0,
            TechnologySpec::Linear { lambda_v: 1.0 },
            Some(vec![vec![0.0, 0.5, 1.0]; 14]),
            0.0,
        )
        .unwrap();
        let err = enumerate_pne_brute(&cfg, &EnumerationOptions::default()).unwrap_err();
        assert!(matches!(err, Error::ResourceLimit(_)));
    }
}
