//! Monte Carlo simulation of the logit dynamics over full profiles:
//! one uniformly chosen player per step resamples their action from the
//! logit response to everyone else's current play.
//!
//! Randomness comes from counter-based ChaCha streams: every trajectory
//! derives its stream from `(master seed, trial index)`, so parallel
//! batches reproduce bit-identically regardless of scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain;
use crate::error::{Error, Result};
use crate::model::{GameConfig, Profile};

/// Steps between exact recomputations of the cached contribution sum.
/// Binary sums are exact anyway; real-valued action grids accumulate
/// rounding in the incremental updates.
const SUM_REFRESH_INTERVAL: u64 = 4096;

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Mutable simulation state: the profile plus caches kept in sync.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsState {
    values: Vec<f64>,
    ell: f64,
    system_value: f64,
    step: u64,
}

impl DynamicsState {
    pub fn new(config: &GameConfig, profile: Profile) -> Result<Self> {
        config.validate_profile(&profile)?;
        let ell = profile.ell();
        let system_value = config.system_value(&profile)?;
        Ok(DynamicsState {
            values: profile.values,
            ell,
            system_value,
            step: 0,
        })
    }

    /// The conventional start: nobody contributes.
    pub fn at_zero(config: &GameConfig) -> Result<Self> {
        Self::new(config, Profile::zeros(config.n()))
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    pub fn system_value(&self) -> f64 {
        self.system_value
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn profile(&self) -> Profile {
        Profile::new(self.values.clone())
    }
}

/// Logit response of player `i` to the rest of `profile`: a probability
/// for each action in their action set, proportional to
/// `exp(beta * utility)`. Computed in log space with max subtraction.
pub fn logit_response(config: &GameConfig, profile: &Profile, i: usize) -> Result<Vec<f64>> {
    config.validate_profile(profile)?;
    if i >= config.n() {
        return Err(Error::PlayerIndex {
            index: i,
            n: config.n(),
        });
    }
    let mut values = profile.values.clone();
    let others = profile.ell() - values[i];
    Ok(response_weights(config, &mut values, others, i)?.1)
}

/// Shared inner routine: returns the candidate system values and the
/// logit probabilities for player `i`, temporarily mutating `values`.
fn response_weights(
    config: &GameConfig,
    values: &mut [f64],
    others_sum: f64,
    i: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let share = config.reward_share();
    let beta = config.beta();
    let cost = config.costs()[i];
    let anonymous = config.technology().is_anonymous();
    let current = values[i];
    let set = config.action_set(i)?.to_vec();

    let mut candidate_values = Vec::with_capacity(set.len());
    let mut logits = Vec::with_capacity(set.len());
    let mut max_logit = f64::NEG_INFINITY;
    for &x in &set {
        let v = if anonymous {
            config.technology().eval_real(others_sum + x)?
        } else {
            values[i] = x;
            let v = config.technology().eval_profile(values, config.actions())?;
            values[i] = current;
            v
        };
        let logit = beta * (share * v - cost * x);
        if logit > max_logit {
            max_logit = logit;
        }
        candidate_values.push(v);
        logits.push(logit);
    }
    let mut total = 0.0;
    for l in logits.iter_mut() {
        *l = (*l - max_logit).exp();
        total += *l;
    }
    for l in logits.iter_mut() {
        *l /= total;
    }
    Ok((candidate_values, logits))
}

/// Advances the dynamics by one revision step, mutating `state`.
pub fn step(config: &GameConfig, state: &mut DynamicsState, rng: &mut impl Rng) -> Result<()> {
    let i = rng.random_range(0..config.n());
    let current = state.values[i];
    let others = state.ell - current;
    let set = config.action_set(i)?;

    // Allocation-free path for the common binary anonymous case: the
    // response reduces to one logistic probability of contributing.
    if config.technology().is_anonymous() && set == [0.0, 1.0] {
        let tech = config.technology();
        let v0 = tech.eval_real(others)?;
        let v1 = tech.eval_real(others + 1.0)?;
        let gain = config.reward_share() * (v1 - v0) - config.costs()[i];
        let p_stay_out = crate::numeric::sigmoid(-config.beta() * gain);
        let u: f64 = rng.random();
        let (value, system_value) = if u < p_stay_out { (0.0, v0) } else { (1.0, v1) };
        state.values[i] = value;
        state.ell = others + value;
        state.system_value = system_value;
    } else {
        let (candidate_values, probs) = response_weights(config, &mut state.values, others, i)?;
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut chosen = set.len() - 1;
        for (k, &p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                chosen = k;
                break;
            }
        }
        state.values[i] = set[chosen];
        state.ell = others + set[chosen];
        state.system_value = candidate_values[chosen];
    }

    state.step += 1;
    if state.step.is_multiple_of(SUM_REFRESH_INTERVAL) {
        state.ell = state.values.iter().sum();
    }
    Ok(())
}

/// One recorded point of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub step: u64,
    pub ell: f64,
    pub value: f64,
    pub potential: f64,
}

/// A recorded trajectory: the sampled points plus the seed that made it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub seed: u64,
    pub stride: u64,
    pub points: Vec<TrajectoryPoint>,
}

/// Runs the dynamics for `steps` revisions from the all-zero profile
/// (or `initial`), recording every `stride`-th step including step 0.
pub fn run_trajectory(
    config: &GameConfig,
    steps: u64,
    seed: u64,
    stride: u64,
    initial: Option<Profile>,
) -> Result<TrajectoryRecord> {
    if steps == 0 {
        return Err(Error::invalid_config("steps", "at least one step required"));
    }
    if stride == 0 {
        return Err(Error::invalid_config("stride", "stride must be positive"));
    }
    let mut state = match initial {
        Some(p) => DynamicsState::new(config, p)?,
        None => DynamicsState::at_zero(config)?,
    };
    let mut rng = rng_for(seed, 0);
    let mut points = Vec::with_capacity((steps / stride + 1) as usize);
    let record = |state: &DynamicsState, points: &mut Vec<TrajectoryPoint>| {
        let social_cost: f64 = state
            .values
            .iter()
            .zip(config.costs())
            .map(|(a, c)| c * a)
            .sum();
        points.push(TrajectoryPoint {
            step: state.step,
            ell: state.ell,
            value: state.system_value,
            potential: config.reward_share() * state.system_value - social_cost,
        });
    };
    record(&state, &mut points);
    for _ in 0..steps {
        step(config, &mut state, &mut rng)?;
        if state.step % stride == 0 {
            record(&state, &mut points);
        }
    }
    Ok(TrajectoryRecord {
        seed,
        stride,
        points,
    })
}

/// Empirical first-passage summary over independent trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HittingEstimate {
    pub target: usize,
    pub trials: usize,
    /// Trials that reached the target within the cap.
    pub successes: usize,
    pub censored: usize,
    pub cap: u64,
    /// Mean hitting step among successes; `None` when all censored.
    pub mean: Option<f64>,
    pub std_error: Option<f64>,
    /// Normal-approximation 95% interval around the mean.
    pub ci95: Option<(f64, f64)>,
    /// `(sum of hits + censored * cap) / trials`: a lower bound on the
    /// true expected hitting time that keeps censored trials visible.
    pub censored_lower_bound: f64,
}

/// Per-trial outcome kept for raw exports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HittingTrial {
    pub trial: usize,
    /// First step with total contribution at or above the target, when
    /// reached within the cap.
    pub hit_step: Option<u64>,
}

/// Estimates the expected first time the total contribution reaches
/// `target`, starting every trial from the all-zero profile. Trials run
/// in parallel on independent RNG streams derived from `seed`.
pub fn estimate_hitting_time(
    config: &GameConfig,
    target: usize,
    trials: usize,
    cap: u64,
    seed: u64,
) -> Result<(HittingEstimate, Vec<HittingTrial>)> {
    if target > config.n() {
        return Err(Error::LevelOutOfRange {
            ell: target,
            n: config.n(),
        });
    }
    if trials == 0 {
        return Err(Error::invalid_config(
            "trials",
            "at least one trial required",
        ));
    }
    let outcomes: Vec<Option<u64>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = rng_for(seed, trial as u64 + 1);
            let mut state = DynamicsState::at_zero(config).expect("validated config");
            let target_f = target as f64;
            while state.ell < target_f {
                if state.step >= cap {
                    return Ok(None);
                }
                step(config, &mut state, &mut rng)?;
            }
            Ok(Some(state.step))
        })
        .collect::<Result<_>>()?;

    let raw: Vec<HittingTrial> = outcomes
        .iter()
        .enumerate()
        .map(|(trial, hit)| HittingTrial {
            trial,
            hit_step: *hit,
        })
        .collect();
    let hits: Vec<f64> = outcomes.iter().flatten().map(|&s| s as f64).collect();
    let successes = hits.len();
    let censored = trials - successes;
    let censored_lower_bound =
        (hits.iter().sum::<f64>() + censored as f64 * cap as f64) / trials as f64;
    let (mean, std_error, ci95) = if successes > 0 {
        let mean = hits.iter().sum::<f64>() / successes as f64;
        let se = if successes > 1 {
            let var = hits.iter().map(|h| (h - mean).powi(2)).sum::<f64>() / (successes - 1) as f64;
            Some((var / successes as f64).sqrt())
        } else {
            None
        };
        let ci = se.map(|se| (mean - 1.96 * se, mean + 1.96 * se));
        (Some(mean), se, ci)
    } else {
        (None, None, None)
    };
    Ok((
        HittingEstimate {
            target,
            trials,
            successes,
            censored,
            cap,
            mean,
            std_error,
            ci95,
            censored_lower_bound,
        },
        raw,
    ))
}

/// Occupancy frequencies of the contribution level along one long run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalDistribution {
    pub counts: Vec<u64>,
    pub freqs: Vec<f64>,
    /// Total-variation distance to the analytic stationary law.
    pub tv_to_analytic: f64,
}

/// Samples the level marginal of the dynamics after `burn_in` steps and
/// compares it with the exact stationary law of the lumped chain. Needs
/// the lumpable setting (anonymous, binary, uniform costs).
pub fn empirical_distribution(
    config: &GameConfig,
    steps: u64,
    burn_in: u64,
    seed: u64,
) -> Result<EmpiricalDistribution> {
    if steps == 0 {
        return Err(Error::invalid_config("steps", "at least one step required"));
    }
    let law = chain::stationary(config)?;
    let n = config.n();
    let mut state = DynamicsState::at_zero(config)?;
    let mut rng = rng_for(seed, 0);
    for _ in 0..burn_in {
        step(config, &mut state, &mut rng)?;
    }
    let mut counts = vec![0u64; n + 1];
    for _ in 0..steps {
        step(config, &mut state, &mut rng)?;
        counts[state.ell as usize] += 1;
    }
    let freqs: Vec<f64> = counts.iter().map(|&c| c as f64 / steps as f64).collect();
    let tv_to_analytic = 0.5
        * freqs
            .iter()
            .enumerate()
            .map(|(ell, f)| (f - law.prob(ell)).abs())
            .sum::<f64>();
    Ok(EmpiricalDistribution {
        counts,
        freqs,
        tv_to_analytic,
    })
}
