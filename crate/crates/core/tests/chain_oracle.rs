//! Independent oracles for the birth-death analytics: the full-profile
//! Gibbs measure, first-step-analysis hitting times, dense-kernel
//! mixing times, and the closed-form bound inventory.

mod common;

use airdrop_core::chain::{
    ell_star, hitting_upper_bound_ell_star, mixing_lower_bound_threshold, success_probability,
    BirthDeathChain,
};
use airdrop_core::model::GameConfig;
use airdrop_core::technology::TechnologySpec;
use common::{gibbs_mass_by_level, lumped_kernel_tmix, random_binary_config, rel_close};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn threshold_config(
    n: usize,
    alpha: f64,
    rho: f64,
    beta: f64,
    tau: usize,
    v_high: f64,
) -> GameConfig {
    GameConfig::uniform_binary(
        n,
        alpha,
        rho,
        1.0,
        beta,
        TechnologySpec::Threshold {
            tau,
            v_low: 0.0,
            v_high,
        },
        0.0,
    )
    .unwrap()
}

/// First-step analysis on the lumped chain, solved by the standard
/// forward recursion: `p(l) d(l) = 1 + q(l) d(l-1)` with
/// `d(l) = h(l) - h(l+1)`, entirely independent of the stationary law.
fn hitting_by_first_step(chain: &BirthDeathChain, from: usize, to: usize) -> f64 {
    let mut d = vec![0.0_f64; to];
    for ell in 0..to {
        let prev = if ell == 0 {
            0.0
        } else {
            chain.down_probability(ell) * d[ell - 1]
        };
        d[ell] = (1.0 + prev) / chain.up_probability(ell);
    }
    d[from..to].iter().sum()
}

#[test]
fn lumping_matches_the_full_profile_gibbs_measure() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacc0);
    let mut checked = 0;
    for _ in 0..200 {
        let config = random_binary_config(&mut rng, 10);
        if config.uniform_cost().is_none() {
            continue;
        }
        checked += 1;
        let chain = BirthDeathChain::build(&config).unwrap();
        let by_level = gibbs_mass_by_level(&config);
        for (ell, mass) in by_level.iter().enumerate() {
            assert!(
                (chain.stationary_prob(ell) - mass).abs() < 1e-10,
                "ell={ell}: {} vs {} for {config:?}",
                chain.stationary_prob(ell),
                mass
            );
        }
    }
    assert!(checked > 50);
}

#[test]
fn detailed_balance_reconstruction_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xba1a);
    for _ in 0..100 {
        let config = random_binary_config(&mut rng, 40);
        if config.uniform_cost().is_none() {
            continue;
        }
        let chain = BirthDeathChain::build(&config).unwrap();
        // pi(l+1) = pi(l) p(l) / q(l+1), then normalize.
        let n = config.n();
        let mut log_w = vec![0.0_f64; n + 1];
        for ell in 0..n {
            log_w[ell + 1] =
                log_w[ell] + chain.up_probability(ell).ln() - chain.down_probability(ell + 1).ln();
        }
        let m = log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = log_w.iter().map(|w| (w - m).exp()).sum();
        for (ell, w) in log_w.iter().enumerate() {
            let reconstructed = (w - m).exp() / z;
            assert!(
                rel_close(reconstructed, chain.stationary_prob(ell), 1e-10),
                "ell={ell}"
            );
        }
    }
}

#[test]
fn logistic_form_matches_direct_tail_summation() {
    for n in [2usize, 10, 100, 200] {
        let tau = (n / 2).max(1);
        for beta in [0.0, 0.7, 1.13] {
            let base = threshold_config(n, 1.0, 0.0, beta, tau, 37.0);
            for k in 0..=100 {
                let rho = k as f64 / 100.0;
                let config = base.with_rho(rho).unwrap();
                let closed = success_probability(&config).unwrap().p_high;
                let chain = BirthDeathChain::build(&config).unwrap();
                let direct = chain.mass_at_or_above(tau);
                assert!(
                    rel_close(closed, direct, 1e-12),
                    "n={n} beta={beta} rho={rho}: {closed} vs {direct}"
                );
            }
        }
    }
}

#[test]
fn exact_hitting_agrees_with_first_step_analysis() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0dd);
    let mut checked = 0;
    for _ in 0..150 {
        let config = random_binary_config(&mut rng, 64);
        if config.uniform_cost().is_none() {
            continue;
        }
        let chain = BirthDeathChain::build(&config).unwrap();
        let n = config.n();
        let to = (n.div_ceil(2) + 1).min(n);
        if to == 0 {
            continue;
        }
        let palacios = chain.expected_hitting(0, to).unwrap();
        let first_step = hitting_by_first_step(&chain, 0, to);
        if !palacios.is_finite() || !first_step.is_finite() {
            continue;
        }
        checked += 1;
        // Interior starting levels agree too.
        let from = to / 2;
        assert!(rel_close(
            chain.expected_hitting(from, to).unwrap(),
            hitting_by_first_step(&chain, from, to),
            1e-8
        ));
        assert!(
            rel_close(palacios, first_step, 1e-8),
            "n={n} to={to}: {palacios} vs {first_step} for {config:?}"
        );
    }
    assert!(checked > 40);
}

#[test]
fn hitting_respects_every_lower_bound_and_the_upper_bound() {
    for (alpha, beta) in [(1.0, 1.0), (0.5, 2.0), (2.0, 1.0)] {
        for n in [20usize, 30] {
            let cfg_for_star = threshold_config(n, alpha, 0.4, beta, n.min(4), 50.0);
            let ls = ell_star(&cfg_for_star).unwrap();
            let tau = ((ls.ceil() as usize) + 6).min(n);
            let config = threshold_config(n, alpha, 0.4, beta, tau, 50.0);
            let chain = BirthDeathChain::build(&config).unwrap();

            let exact_to_tau = chain.expected_hitting(0, tau).unwrap();
            let lo = (ls.floor() as usize).min(tau.saturating_sub(2));
            let bounds = chain
                .hitting_lower_bounds(lo, tau - 1, tau, &config)
                .unwrap();
            assert!(
                exact_to_tau >= bounds.best,
                "exact {exact_to_tau} below bound {:?} (alpha={alpha} beta={beta} n={n})",
                bounds
            );

            let (ls2, ub) = hitting_upper_bound_ell_star(&config).unwrap();
            assert_eq!(ls, ls2);
            let exact_to_star = chain.expected_hitting(0, ls.ceil() as usize).unwrap();
            assert!(
                exact_to_star <= ub,
                "exact {exact_to_star} above upper bound {ub} (alpha={alpha} beta={beta} n={n})"
            );
        }
    }
}

#[test]
fn linear_hitting_lower_bound_form() {
    // For a linear technology the steepness route reduces to
    // (exp(-Gamma beta) (lo+1)/(n-lo))^(hi-lo).
    let config = GameConfig::uniform_binary(
        24,
        0.9,
        0.5,
        1.0,
        1.3,
        TechnologySpec::Linear { lambda_v: 2.0 },
        0.0,
    )
    .unwrap();
    let chain = BirthDeathChain::build(&config).unwrap();
    let gamma: f64 = 0.5 / 24.0 * 2.0 - 0.9;
    let (lo, hi, target) = (2usize, 9usize, 10usize);
    let bounds = chain.hitting_lower_bounds(lo, hi, target, &config).unwrap();
    let expect = ((-gamma * 1.3).exp() * 3.0 / 22.0).powi((hi - lo) as i32);
    assert!(rel_close(bounds.steep_form, expect, 1e-10));
    let exact = chain.expected_hitting(0, target).unwrap();
    assert!(exact >= bounds.best);
}

#[test]
fn cutoff_bracket_contains_dense_kernel_mixing_time() {
    for beta in [0.0, 0.5, 1.0] {
        for (n, tau) in [(8usize, 4usize), (6, 3)] {
            let config = threshold_config(n, 1.0, 0.6, beta, tau, 40.0);
            let chain = BirthDeathChain::build(&config).unwrap();
            let cutoff = chain.t_cutoff();
            let tmix = lumped_kernel_tmix(&chain, 2_000_000) as f64;
            assert!(
                tmix >= cutoff.tmix_lower && tmix <= cutoff.tmix_upper,
                "beta={beta} n={n}: tmix {tmix} outside [{}, {}]",
                cutoff.tmix_lower,
                cutoff.tmix_upper
            );
        }
    }
}

#[test]
fn cutoff_exceeds_threshold_mixing_lower_bound_when_applicable() {
    // Supercritical instance: success mass above one half.
    let config = threshold_config(10, 0.8, 0.9, 2.0, 5, 100.0);
    let mlb = mixing_lower_bound_threshold(&config).unwrap();
    assert!(mlb.applicable, "p_high = {}", mlb.p_high);
    let chain = BirthDeathChain::build(&config).unwrap();
    let cutoff = chain.t_cutoff();
    assert!(
        cutoff.t_cutoff >= mlb.proof_form,
        "cutoff {} below proof-form bound {}",
        cutoff.t_cutoff,
        mlb.proof_form
    );
}

#[test]
fn drift_crosses_one_near_ell_star() {
    let config = threshold_config(40, 1.0, 0.3, 1.2, 39, 100.0);
    let chain = BirthDeathChain::build(&config).unwrap();
    let ls = ell_star(&config).unwrap();
    let below = (ls.floor() as usize).saturating_sub(1);
    let above = ls.ceil() as usize;
    assert!(chain.drift(below).unwrap() >= 1.0);
    assert!(chain.drift(above).unwrap() <= 1.0);
}
