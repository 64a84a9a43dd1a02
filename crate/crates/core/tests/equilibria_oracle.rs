//! Oracle equivalence for the equilibrium machinery: the anonymous
//! level analysis against exhaustive profile enumeration, containment
//! of potential maximizers in the equilibrium set, scale invariance,
//! and the critical-fraction dichotomy.

mod common;

use airdrop_core::equilibria::{
    enumerate_pne_brute, equilibrium_levels, is_pure_nash, potential_maximizers_brute,
    potmax_levels, threshold_critical_rho, EnumerationOptions,
};
use airdrop_core::model::{GameConfig, Profile};
use airdrop_core::technology::TechnologySpec;
use common::random_binary_config;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

fn levels_of(profiles: &[Profile]) -> BTreeMap<usize, usize> {
    let mut map = BTreeMap::new();
    for p in profiles {
        *map.entry(p.ell() as usize).or_insert(0) += 1;
    }
    map
}

#[test]
fn level_analysis_matches_brute_force_on_random_games() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let opts = EnumerationOptions::default();
    for round in 0..300 {
        let config = random_binary_config(&mut rng, 12);
        let brute = levels_of(&enumerate_pne_brute(&config, &opts).unwrap());
        let fast: BTreeMap<usize, usize> = equilibrium_levels(&config)
            .unwrap()
            .into_iter()
            .map(|c| (c.ell, c.witness_count as usize))
            .collect();
        assert_eq!(brute, fast, "round {round}: config {config:?}");
    }
}

#[test]
fn potential_maximizers_are_equilibria() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xbeef);
    let opts = EnumerationOptions::default();
    for _ in 0..200 {
        let config = random_binary_config(&mut rng, 10);
        let (potmax, _) = potential_maximizers_brute(&config, &opts).unwrap();
        for profile in &potmax {
            let check = is_pure_nash(&config, profile).unwrap();
            assert!(
                check.is_equilibrium,
                "potential maximizer {:?} admits deviation {:?} in {config:?}",
                profile.values, check.violation
            );
        }
    }
}

#[test]
fn level_potmax_matches_brute_force_for_uniform_costs() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xcafe);
    let opts = EnumerationOptions::default();
    let mut checked = 0;
    for _ in 0..300 {
        let config = random_binary_config(&mut rng, 10);
        if config.uniform_cost().is_none() {
            continue;
        }
        checked += 1;
        let (brute, _) = potential_maximizers_brute(&config, &opts).unwrap();
        let brute_levels = levels_of(&brute);
        let fast: BTreeMap<usize, usize> = potmax_levels(&config, opts.tie_tolerance)
            .unwrap()
            .0
            .into_iter()
            .map(|c| (c.ell, c.witness_count as usize))
            .collect();
        assert_eq!(brute_levels, fast, "config {config:?}");
    }
    assert!(checked > 50);
}

/// Power-of-two money rescalings commute with every comparison, so the
/// equilibrium structure is bit-for-bit identical.
#[test]
fn rescaling_leaves_equilibrium_structure_unchanged() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xd00d);
    let opts = EnumerationOptions::default();
    for _ in 0..60 {
        let config = random_binary_config(&mut rng, 9);
        for scale in [0.5, 4.0] {
            let scaled_spec = match config.technology().spec().clone() {
                TechnologySpec::Threshold { tau, v_low, v_high } => TechnologySpec::Threshold {
                    tau,
                    v_low: v_low * scale,
                    v_high: v_high * scale,
                },
                TechnologySpec::Linear { lambda_v } => TechnologySpec::Linear {
                    lambda_v: lambda_v * scale,
                },
                TechnologySpec::Quadratic { tau } => TechnologySpec::Quadratic { tau: tau / scale },
                TechnologySpec::Concave { tau, c } => TechnologySpec::Concave {
                    tau: tau / scale,
                    c,
                },
                TechnologySpec::Table { values } => TechnologySpec::Table {
                    values: values.iter().map(|v| v * scale).collect(),
                },
                // The bounded family does not rescale.
                spec @ TechnologySpec::Sshaped { .. } => spec,
                spec @ TechnologySpec::General { .. } => spec,
            };
            if matches!(scaled_spec, TechnologySpec::Sshaped { .. }) {
                continue;
            }
            let scaled = GameConfig::new(
                config.costs().iter().map(|c| c * scale).collect(),
                config.rho(),
                config.t_tot(),
                config.beta(),
                scaled_spec,
                None,
                config.d_v() * scale,
            )
            .unwrap();
            assert_eq!(
                enumerate_pne_brute(&config, &opts).unwrap(),
                enumerate_pne_brute(&scaled, &opts).unwrap()
            );
            let (base_pm, _) = potential_maximizers_brute(&config, &opts).unwrap();
            let (scaled_pm, _) = potential_maximizers_brute(&scaled, &opts).unwrap();
            assert_eq!(base_pm, scaled_pm);
            if config.technology().is_threshold() && config.uniform_cost().is_some() {
                let a = threshold_critical_rho(&config).unwrap();
                let b = threshold_critical_rho(&scaled).unwrap();
                assert_eq!(a, b);
            }
        }
    }
}

/// Above the critical fraction the maximizers sit exactly at the
/// threshold level; below it only the empty profile survives.
#[test]
fn critical_fraction_dichotomy() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xfeed);
    let opts = EnumerationOptions::default();
    let mut above = 0;
    let mut below = 0;
    for _ in 0..400 {
        let config = random_binary_config(&mut rng, 12);
        if !config.technology().is_threshold() || config.uniform_cost().is_none() {
            continue;
        }
        let rho_c = threshold_critical_rho(&config).unwrap();
        if (config.rho() - rho_c).abs() < 1e-6 {
            continue;
        }
        let tau = match config.technology().spec() {
            TechnologySpec::Threshold { tau, .. } => *tau,
            _ => unreachable!(),
        };
        let (potmax, _) = potential_maximizers_brute(&config, &opts).unwrap();
        let levels = levels_of(&potmax);
        if config.rho() > rho_c {
            assert_eq!(levels.keys().copied().collect::<Vec<_>>(), vec![tau]);
            above += 1;
        } else {
            assert_eq!(levels.keys().copied().collect::<Vec<_>>(), vec![0]);
            below += 1;
        }
    }
    assert!(above > 10, "only {above} supercritical draws");
    assert!(below > 10, "only {below} subcritical draws");
}
