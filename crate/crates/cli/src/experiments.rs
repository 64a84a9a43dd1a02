//! One runner per experiment kind: computes through the core library
//! and lays results out as CSV/JSON artifacts plus a stdout summary.

use airdrop_core::chain::{
    hitting_upper_bound_ell_star, mixing_lower_bound_threshold, success_probability,
    BirthDeathChain,
};
use airdrop_core::designer::{optimal_rho, profit_curve, vanishing_noise_profit};
use airdrop_core::dynamics::{estimate_hitting_time, run_trajectory};
use airdrop_core::equilibria::{
    enumerate_pne, linear_optimal_rho, potential_maximizers, quadratic_regimes,
    threshold_critical_rho, threshold_designer_regime, EnumerationOptions,
};
use airdrop_core::model::GameConfig;
use airdrop_core::technology::TechnologySpec;
use serde_json::{json, Value};

use crate::config::{CliError, ExperimentSpec, GridSpec};
use crate::output::{fmt_f64, fmt_opt, json_num, Format, OutputCtx};

const DEFAULT_EPSILON: f64 = 1e-3;

pub fn run(
    game: &GameConfig,
    experiment: &ExperimentSpec,
    seed_override: Option<u64>,
    io: &OutputCtx,
) -> Result<Value, CliError> {
    match experiment {
        ExperimentSpec::Equilibria {
            epsilon,
            max_profiles,
            tie_tolerance,
        } => run_equilibria(game, *epsilon, *max_profiles, *tie_tolerance, io),
        ExperimentSpec::Stationary {} => run_stationary(game, io),
        ExperimentSpec::Simulate {
            steps,
            stride,
            seeds,
            rhos,
        } => {
            let seeds = match (seed_override, seeds) {
                (Some(s), _) => vec![s],
                (None, Some(list)) if !list.is_empty() => list.clone(),
                _ => {
                    return Err(CliError::Invariant(
                        "invalid config: experiment.seeds: stochastic experiments need seeds \
                         (or pass --seed)"
                            .to_string(),
                    ))
                }
            };
            run_simulate(game, *steps, *stride, &seeds, rhos.as_deref(), io)
        }
        ExperimentSpec::Hitting {
            target,
            trials,
            cap,
            seed,
        } => {
            let seed = seed_override.or(*seed).ok_or_else(|| {
                CliError::Invariant(
                    "invalid config: experiment.seed: stochastic experiments need a seed \
                     (or pass --seed)"
                        .to_string(),
                )
            })?;
            run_hitting(game, *target, *trials, *cap, seed, io)
        }
        ExperimentSpec::Phase { rho_grid } => run_phase(game, rho_grid, io),
        ExperimentSpec::Profit { rho_grid, epsilon } => run_profit(game, rho_grid, *epsilon, io),
        ExperimentSpec::Times {
            alphas,
            target,
            interval,
            mc_trials,
            mc_cap,
            seed,
        } => {
            let seed = seed_override.or(*seed);
            if mc_trials.unwrap_or(0) > 0 && seed.is_none() {
                return Err(CliError::Invariant(
                    "invalid config: experiment.seed: Monte Carlo columns need a seed \
                     (or pass --seed)"
                        .to_string(),
                ));
            }
            run_times(
                game,
                alphas.as_deref(),
                *target,
                *interval,
                *mc_trials,
                *mc_cap,
                seed,
                io,
            )
        }
    }
}

fn run_equilibria(
    game: &GameConfig,
    epsilon: Option<f64>,
    max_profiles: Option<usize>,
    tie_tolerance: Option<f64>,
    io: &OutputCtx,
) -> Result<Value, CliError> {
    let mut opts = EnumerationOptions::default();
    if let Some(cap) = max_profiles {
        opts.max_profiles = cap;
    }
    if let Some(tol) = tie_tolerance {
        opts.tie_tolerance = tol;
    }
    let pne_report = enumerate_pne(game, &opts)?;
    let mut warnings: Vec<String> = Vec::new();
    let potmax_report = match potential_maximizers(game, &opts) {
        Ok(report) => Some(report),
        Err(err) => {
            warnings.push(format!("potential maximizers unavailable: {err}"));
            None
        }
    };

    let epsilon = epsilon.unwrap_or(DEFAULT_EPSILON);
    let rho_c = threshold_critical_rho(game).ok();
    let regime = threshold_designer_regime(game, epsilon).ok();
    let quadratic = match game.technology().spec() {
        TechnologySpec::Quadratic { tau } => game
            .uniform_cost()
            .map(|alpha| quadratic_regimes(alpha, *tau, game.n()))
            .transpose()?,
        _ => None,
    };
    let linear = match game.technology().spec() {
        TechnologySpec::Linear { lambda_v } => {
            Some(linear_optimal_rho(game.costs(), *lambda_v, game.d_v())?)
        }
        _ => None,
    };

    let mut doc = json!({
        "n": game.n(),
        "rho": game.rho(),
        "pne": pne_report.pne,
        "rho_c": rho_c,
        "designer_regime": regime,
        "quadratic_regimes": quadratic,
        "linear_optimum": linear,
        "warnings": warnings,
    });
    if let Some(report) = potmax_report {
        let obj = doc.as_object_mut().unwrap();
        obj.insert(
            "potmax".to_string(),
            serde_json::to_value(&report.potmax).unwrap(),
        );
        obj.insert(
            "max_potential".to_string(),
            report.max_potential.map(json_num).unwrap_or(Value::Null),
        );
        obj.insert(
            "limit_distribution".to_string(),
            serde_json::to_value(&report.limit_distribution).unwrap(),
        );
    }
    io.write_json("equilibria.json", doc.clone())?;
    Ok(json!({ "pne": doc["pne"], "rho_c": doc["rho_c"] }))
}

fn run_stationary(game: &GameConfig, io: &OutputCtx) -> Result<Value, CliError> {
    let chain = BirthDeathChain::build(game)?;
    let law = chain.stationary();
    let rows: Vec<String> = (0..=game.n())
        .map(|ell| {
            format!(
                "{ell},{},{}",
                fmt_f64(chain.log_weight(ell)),
                fmt_f64(law.prob(ell))
            )
        })
        .collect();
    io.write_csv("stationary.csv", &[], "ell,log_weight,prob", &rows)?;
    let summary = json!({
        "mean_ell": json_num(law.mean_ell),
        "expected_value": json_num(law.expected_value),
        "p_high": law.p_high.map(json_num).unwrap_or(Value::Null),
    });
    if io.format == Format::Json {
        io.write_json(
            "stationary.json",
            json!({
                "log_probs": law.log_probs,
                "mean_ell": json_num(law.mean_ell),
                "expected_value": json_num(law.expected_value),
                "p_high": law.p_high.map(json_num).unwrap_or(Value::Null),
            }),
        )?;
    }
    Ok(summary)
}

fn run_simulate(
    game: &GameConfig,
    steps: u64,
    stride: u64,
    seeds: &[u64],
    rhos: Option<&[f64]>,
    io: &OutputCtx,
) -> Result<Value, CliError> {
    let default_rhos = [game.rho()];
    let rhos = rhos.unwrap_or(&default_rhos);
    let mut emitted = Vec::new();
    for &rho in rhos {
        let cfg = game.with_rho(rho)?;
        for &seed in seeds {
            let record = run_trajectory(&cfg, steps, seed, stride, None)?;
            let rows: Vec<String> = record
                .points
                .iter()
                .map(|p| {
                    format!(
                        "{},{},{},{}",
                        p.step,
                        fmt_f64(p.ell),
                        fmt_f64(p.value),
                        fmt_f64(p.potential)
                    )
                })
                .collect();
            let name = format!("simulate_rho{rho}_seed{seed}.csv");
            io.write_csv(
                &name,
                &[
                    format!("rho={rho}"),
                    format!("seed={seed}"),
                    format!("stride={stride}"),
                ],
                "step,ell,value,potential",
                &rows,
            )?;
            emitted.push(name);
        }
    }
    Ok(json!({ "trajectories": emitted, "steps": steps }))
}

fn run_hitting(
    game: &GameConfig,
    target: usize,
    trials: usize,
    cap: u64,
    seed: u64,
    io: &OutputCtx,
) -> Result<Value, CliError> {
    let (estimate, raw) = estimate_hitting_time(game, target, trials, cap, seed)?;
    let rows: Vec<String> = raw
        .iter()
        .map(|t| match t.hit_step {
            Some(step) => format!("{},{step},0", t.trial),
            None => format!("{},,1", t.trial),
        })
        .collect();
    io.write_csv(
        "hitting_trials.csv",
        &[
            format!("target={target}"),
            format!("seed={seed}"),
            format!("cap={cap}"),
        ],
        "trial,hit_step,censored",
        &rows,
    )?;
    let doc = serde_json::to_value(&estimate).unwrap();
    io.write_json("hitting.json", json!({ "estimate": doc, "seed": seed }))?;
    Ok(json!({
        "mean": estimate.mean.map(json_num).unwrap_or(Value::Null),
        "successes": estimate.successes,
        "censored": estimate.censored,
    }))
}

fn run_phase(game: &GameConfig, rho_grid: &GridSpec, io: &OutputCtx) -> Result<Value, CliError> {
    let grid = rho_grid.materialize("experiment.rho_grid")?;
    let rho_c = threshold_critical_rho(game)?;
    let mut rows = Vec::with_capacity(grid.len());
    let mut first = None;
    let mut last = None;
    for &rho in &grid {
        let sp = success_probability(&game.with_rho(rho)?)?;
        if first.is_none() {
            first = Some(sp.p_high);
        }
        last = Some(sp.p_high);
        rows.push(format!(
            "{},{},{}",
            fmt_f64(rho),
            fmt_f64(sp.p_high),
            fmt_f64(rho - rho_c)
        ));
    }
    let sp = success_probability(game)?;
    io.write_csv(
        "phase.csv",
        &[
            format!("rho_c={}", fmt_f64(rho_c)),
            format!("b={}", fmt_f64(sp.b)),
            format!("c={}", fmt_f64(sp.c_ratio)),
        ],
        "rho,p_high,rho_minus_rho_c",
        &rows,
    )?;
    if io.format == Format::Json {
        io.write_json(
            "phase.json",
            json!({
                "rho_c": json_num(rho_c),
                "b": json_num(sp.b),
                "c": json_num(sp.c_ratio),
                "rho": grid,
            }),
        )?;
    }
    Ok(json!({
        "rho_c": json_num(rho_c),
        "p_high_first": first.map(json_num).unwrap_or(Value::Null),
        "p_high_last": last.map(json_num).unwrap_or(Value::Null),
    }))
}

fn run_profit(
    game: &GameConfig,
    rho_grid: &GridSpec,
    epsilon: Option<f64>,
    io: &OutputCtx,
) -> Result<Value, CliError> {
    let grid = rho_grid.materialize("experiment.rho_grid")?;
    let curve = profit_curve(game, &grid)?;
    let optimum = optimal_rho(game)?;
    let vanishing = vanishing_noise_profit(game, epsilon.unwrap_or(DEFAULT_EPSILON)).ok();

    let rows: Vec<String> = curve
        .points
        .iter()
        .map(|p| {
            format!(
                "{},{},{},{}",
                fmt_f64(p.rho),
                fmt_opt(p.p_high),
                fmt_f64(p.expected_value),
                fmt_f64(p.profit)
            )
        })
        .collect();
    let mut comments = vec![
        format!("rho_star={}", fmt_f64(optimum.rho_star)),
        format!("profit_star={}", fmt_f64(optimum.profit_star)),
    ];
    if let Some(rho_bar) = optimum.rho_bar {
        comments.push(format!("rho_bar={}", fmt_f64(rho_bar)));
    }
    if let (Some(b), Some(c)) = (curve.b, curve.c_ratio) {
        comments.push(format!("b={}", fmt_f64(b)));
        comments.push(format!("c={}", fmt_f64(c)));
    }
    io.write_csv("profit.csv", &comments, "rho,p_high,value,profit", &rows)?;
    io.write_json(
        "profit.json",
        json!({
            "curve": serde_json::to_value(&curve).unwrap(),
            "optimum": serde_json::to_value(optimum).unwrap(),
            "vanishing_noise": vanishing,
        }),
    )?;
    Ok(json!({
        "rho_star": json_num(optimum.rho_star),
        "profit_star": json_num(optimum.profit_star),
        "regime": serde_json::to_value(optimum.regime).unwrap(),
    }))
}

#[allow(clippy::too_many_arguments)]
fn run_times(
    game: &GameConfig,
    alphas: Option<&[f64]>,
    target: Option<usize>,
    interval: Option<(usize, usize)>,
    mc_trials: Option<usize>,
    mc_cap: u64,
    seed: Option<u64>,
    io: &OutputCtx,
) -> Result<Value, CliError> {
    let base_alpha = game.uniform_cost().ok_or_else(|| {
        CliError::Unsupported("timing analysis requires uniform costs".to_string())
    })?;
    let default_alphas = [base_alpha];
    let alphas = alphas.unwrap_or(&default_alphas);
    let target = match (target, game.technology().spec()) {
        (Some(t), _) => t,
        (None, TechnologySpec::Threshold { tau, .. }) => *tau,
        _ => {
            return Err(CliError::Invariant(
                "invalid config: experiment.target: required for non-threshold technologies"
                    .to_string(),
            ))
        }
    };
    if target > game.n() {
        return Err(CliError::Invariant(format!(
            "invalid config: experiment.target: {target} exceeds n={}",
            game.n()
        )));
    }

    let mut rows = Vec::new();
    let mut summary_rows = Vec::new();
    for (row_idx, &alpha) in alphas.iter().enumerate() {
        let cfg = game.with_uniform_cost(alpha)?;
        let chain = BirthDeathChain::build(&cfg)?;
        let cutoff = chain.t_cutoff();
        let (ls, hit_ub) = hitting_upper_bound_ell_star(&cfg)?;
        let mix_lb = mixing_lower_bound_threshold(&cfg).ok();
        let hit_exact_target = chain.expected_hitting(0, target)?;
        let star_level = (ls.ceil() as usize).min(game.n());
        let hit_exact_star = chain.expected_hitting(0, star_level)?;

        let (lo, hi) = match interval {
            Some((lo, hi)) => (lo, hi),
            None => {
                let hi = target.saturating_sub(1);
                let lo = (ls.ceil() as usize).min(hi.saturating_sub(1));
                (lo, hi)
            }
        };
        let bounds = if lo < hi && hi < target {
            Some(chain.hitting_lower_bounds(lo, hi, target, &cfg)?)
        } else {
            None
        };

        let mc = match mc_trials {
            Some(trials) if trials > 0 => {
                let (est, _) = estimate_hitting_time(
                    &cfg,
                    target,
                    trials,
                    mc_cap,
                    seed.expect("validated above") + row_idx as u64,
                )?;
                Some(est)
            }
            _ => None,
        };

        rows.push(format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            fmt_f64(alpha),
            fmt_f64(ls),
            fmt_f64(cutoff.t_cutoff),
            fmt_f64(cutoff.tmix_lower),
            fmt_f64(cutoff.tmix_upper),
            fmt_opt(
                mix_lb
                    .as_ref()
                    .filter(|m| m.applicable)
                    .map(|m| m.proof_form)
            ),
            fmt_opt(
                mix_lb
                    .as_ref()
                    .filter(|m| m.applicable)
                    .map(|m| m.statement_form)
            ),
            fmt_f64(hit_exact_target),
            fmt_f64(hit_exact_star),
            fmt_f64(hit_ub),
            fmt_opt(bounds.map(|b| b.drift_form)),
            fmt_opt(bounds.map(|b| b.steep_form)),
            fmt_opt(bounds.and_then(|b| b.threshold_form)),
            fmt_opt(bounds.and_then(|b| b.ell_star_form)),
            fmt_opt(mc.as_ref().and_then(|m| m.mean)),
            fmt_opt(mc.as_ref().and_then(|m| m.std_error)),
            mc.as_ref()
                .map(|m| m.censored.to_string())
                .unwrap_or_default(),
        ));
        summary_rows.push(json!({
            "alpha": json_num(alpha),
            "hit_exact_target": json_num(hit_exact_target),
            "t_cutoff": json_num(cutoff.t_cutoff),
            "mc_mean": mc.as_ref().and_then(|m| m.mean).map(json_num).unwrap_or(Value::Null),
        }));
    }
    io.write_csv(
        "times.csv",
        &[format!("target={target}")],
        "alpha,ell_star,t_cutoff,tmix_lower,tmix_upper,mix_lb_proof,mix_lb_statement,\
         hit_exact_target,hit_exact_ellstar,hit_ub_ellstar,lb_drift,lb_steep,lb_threshold,\
         lb_ellstar,mc_mean,mc_se,mc_censored",
        &rows,
    )?;
    if io.format == Format::Json {
        io.write_json(
            "times.json",
            json!({ "target": target, "rows": summary_rows }),
        )?;
    }
    Ok(json!({ "target": target, "rows": summary_rows }))
}
