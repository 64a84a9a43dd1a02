#![allow(dead_code)]

use airdrop_core::model::{GameConfig, Profile};
use airdrop_core::technology::TechnologySpec;
use rand::Rng;

/// Every profile of the action grid, lexicographic by player.
pub fn all_profiles(config: &GameConfig) -> Vec<Profile> {
    let total: usize = config.actions().iter().map(|s| s.len()).product();
    (0..total)
        .map(|mut idx| {
            let n = config.n();
            let mut values = vec![0.0; n];
            for i in (0..n).rev() {
                let set = &config.actions()[i];
                values[i] = set[idx % set.len()];
                idx /= set.len();
            }
            Profile::new(values)
        })
        .collect()
}

/// Exact Gibbs stationary distribution of the full profile chain,
/// aggregated by contribution level. Requires binary actions.
pub fn gibbs_mass_by_level(config: &GameConfig) -> Vec<f64> {
    let n = config.n();
    let profiles = all_profiles(config);
    let log_weights: Vec<f64> = profiles
        .iter()
        .map(|p| config.beta() * config.potential(p).unwrap())
        .collect();
    let m = log_weights
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = log_weights.iter().map(|w| (w - m).exp()).collect();
    let z: f64 = weights.iter().sum();
    let mut mass = vec![0.0; n + 1];
    for (p, w) in profiles.iter().zip(&weights) {
        mass[p.ell() as usize] += w / z;
    }
    mass
}

/// Random anonymous technology spec drawn from all closed-form and
/// tabulated families.
pub fn random_anonymous_spec(rng: &mut impl Rng, n: usize) -> TechnologySpec {
    match rng.random_range(0..6) {
        0 => TechnologySpec::Threshold {
            tau: rng.random_range(1..=n),
            v_low: rng.random_range(0.0..3.0),
            v_high: rng.random_range(3.5..30.0),
        },
        1 => TechnologySpec::Linear {
            lambda_v: rng.random_range(0.2..6.0),
        },
        2 => TechnologySpec::Quadratic {
            tau: rng.random_range(0.3..5.0),
        },
        3 => TechnologySpec::Sshaped {
            tau: rng.random_range(0.5..4.0),
            c: rng.random_range(0.3..3.0),
        },
        4 => TechnologySpec::Concave {
            tau: rng.random_range(0.5..4.0),
            c: rng.random_range(0.1..0.9),
        },
        _ => {
            let mut values = Vec::with_capacity(n + 1);
            let mut acc = 0.0;
            for _ in 0..=n {
                values.push(acc);
                acc += rng.random_range(0.0..4.0);
            }
            TechnologySpec::Table { values }
        }
    }
}

/// Random binary-action game over any anonymous technology; uniform
/// costs with probability one half.
pub fn random_binary_config(rng: &mut impl Rng, max_n: usize) -> GameConfig {
    let n = rng.random_range(1..=max_n);
    let spec = random_anonymous_spec(rng, n);
    let costs = if rng.random_bool(0.5) {
        vec![rng.random_range(0.05..3.0); n]
    } else {
        (0..n).map(|_| rng.random_range(0.05..3.0)).collect()
    };
    GameConfig::new(
        costs,
        rng.random_range(0.0..1.0),
        rng.random_range(0.5..20.0),
        rng.random_range(0.0..4.0),
        spec,
        None,
        rng.random_range(0.0..5.0),
    )
    .unwrap()
}

/// Exact worst-start total-variation mixing time of the lumped level
/// kernel, by stepping every start distribution until TV <= 1/4.
pub fn lumped_kernel_tmix(chain: &airdrop_core::chain::BirthDeathChain, max_steps: usize) -> usize {
    let n = chain.n();
    let states = n + 1;
    let pi: Vec<f64> = (0..states).map(|l| chain.stationary_prob(l)).collect();
    let mut dists: Vec<Vec<f64>> = (0..states)
        .map(|s| {
            let mut d = vec![0.0; states];
            d[s] = 1.0;
            d
        })
        .collect();
    for t in 0..max_steps {
        let worst = dists
            .iter()
            .map(|d| 0.5 * d.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum::<f64>())
            .fold(0.0_f64, f64::max);
        if worst <= 0.25 {
            return t;
        }
        for d in dists.iter_mut() {
            let mut next = vec![0.0; states];
            for (l, &mass) in d.iter().enumerate() {
                if mass == 0.0 {
                    continue;
                }
                let up = chain.up_probability(l);
                let down = chain.down_probability(l);
                next[l] += mass * (1.0 - up - down);
                if l + 1 < states {
                    next[l + 1] += mass * up;
                }
                if l > 0 {
                    next[l - 1] += mass * down;
                }
            }
            *d = next;
        }
    }
    max_steps
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1.0_f64.max(a.abs()).max(b.abs())
}
