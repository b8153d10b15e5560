//! Experiment drivers: each one expands a configuration into independent
//! seeded tasks, fans them out over worker threads, and assembles a sorted,
//! reproducible result table.
//!
//! Determinism contract: every task derives its own RNG seed from
//! `(master_seed, experiment tag, coordinates)`, rows are emitted in task
//! order, and no state is shared between tasks — so outputs are
//! byte-identical for any thread count.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use coexist_ia::baseline::{identity_baseline, sssvsp_solution};
use coexist_ia::channel::LinkSet;
use coexist_ia::detect::{
    calibrate_threshold, estimate_pd, exceedance_rate, roc, DetectionInstance, Method,
};
use coexist_ia::scenario::Scenario;
use coexist_ia::solver::{check_feasibility, solve_max_sinr, sum_sinr, Feasibility, Solution};

use crate::config::{Config, MethodChoice, TargetChoice};
use crate::output::{Field, Meta, RunResult};
use crate::seed::{derive, tag};
use crate::RunError;

/// Master seed and worker count for one run.
#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub master_seed: u64,
    pub threads: usize,
}

/// Executes `n` independent tasks over the requested worker count and
/// returns results in task order.
fn run_tasks<T, F>(n: usize, threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    if threads <= 1 || n <= 1 {
        return (0..n).map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let collected: Mutex<Vec<(usize, T)>> = Mutex::new(Vec::with_capacity(n));
    std::thread::scope(|scope| {
        for _ in 0..threads.min(n) {
            scope.spawn(|| {
                let mut local = Vec::new();
                loop {
                    let idx = next.fetch_add(1, Ordering::Relaxed);
                    if idx >= n {
                        break;
                    }
                    local.push((idx, f(idx)));
                }
                collected.lock().expect("worker panicked").extend(local);
            });
        }
    });
    let mut pairs = collected.into_inner().expect("worker panicked");
    pairs.sort_by_key(|(idx, _)| *idx);
    pairs.into_iter().map(|(_, t)| t).collect()
}

fn target_name(t: TargetChoice) -> &'static str {
    match t {
        TargetChoice::Nonfluctuating => "nonfluctuating",
        TargetChoice::Swerling1 => "swerling1",
        TargetChoice::Swerling2 => "swerling2",
        TargetChoice::Swerling3 => "swerling3",
        TargetChoice::Swerling4 => "swerling4",
    }
}

fn solve_method(
    method: Method,
    scenario: &Scenario,
    links: &LinkSet,
    cfg: &Config,
    rng: &mut ChaCha8Rng,
) -> Result<Solution, RunError> {
    let radar_dofs = scenario.radar_index().map(|r| scenario.users[r].dofs).unwrap_or(1);
    let mcfg = cfg.method_config(radar_dofs);
    let solution = match method {
        Method::Proposed => solve_max_sinr(scenario, links, &mcfg.solver, rng)?,
        Method::Sssvsp => {
            let mut sol = sssvsp_solution(scenario, links, &mcfg.sssvsp)?;
            sol.evaluate(scenario, links, mcfg.solver.eps_rank)?;
            sol
        }
        Method::Identity => {
            let dofs: Vec<usize> = scenario.users.iter().map(|u| u.dofs).collect();
            let mut sol = identity_baseline(scenario.n_sc, &dofs)
                .map_err(|e| RunError::Config(e.to_string()))?;
            sol.evaluate(scenario, links, mcfg.solver.eps_rank)?;
            sol
        }
    };
    Ok(solution)
}

/// Refuses to launch a sweep whose `proposed` runs would fail feasibility.
fn precheck_feasibility(cfg: &Config, scenario: &Scenario) -> Result<(), RunError> {
    if cfg.methods.iter().any(|m| *m == MethodChoice::Proposed) {
        if let Feasibility::Infeasible { condition, detail } =
            check_feasibility(scenario.n_sc, &scenario.users)
                .map_err(|e| RunError::Config(e.to_string()))?
        {
            return Err(RunError::Infeasible(format!("{condition}: {detail}")));
        }
    }
    Ok(())
}

/// Sum-SINR sweep over the SNR grid for every configured method.
pub fn run_sinr_sweep(cfg: &Config, opts: RunOptions) -> Result<RunResult, RunError> {
    cfg.validate()?;
    let base = cfg.to_scenario()?;
    precheck_feasibility(cfg, &base)?;
    let target = cfg.target();

    let mut scenarios = Vec::new();
    for &snr in &cfg.snr_grid_db {
        scenarios.push(base.with_snr_db(snr).map_err(|e| RunError::Config(e.to_string()))?);
    }

    let n_methods = cfg.methods.len();
    let n_snr = cfg.snr_grid_db.len();
    let n_tasks = n_methods * n_snr * cfg.trials;
    let rows = run_tasks(n_tasks, opts.threads, |idx| -> Result<Vec<Field>, RunError> {
        let m_idx = idx / (n_snr * cfg.trials);
        let s_idx = (idx / cfg.trials) % n_snr;
        let trial = idx % cfg.trials;
        let method = cfg.methods[m_idx];
        let seed = derive(
            opts.master_seed,
            &[tag::SINR_SWEEP, method.tag(), s_idx as u64, trial as u64],
        );
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scenario = &scenarios[s_idx];
        let links = scenario.draw_links(&target, &mut rng);
        let solution = solve_method(method.method(), scenario, &links, cfg, &mut rng)?;
        let (sum, per_user) = sum_sinr(scenario, &links, &solution)?;
        let mut row = vec![
            Field::Str(method.method().name().to_string()),
            Field::F64(cfg.snr_grid_db[s_idx]),
            Field::U64(trial as u64),
            Field::F64(sum),
            Field::F64(solution.leakage),
            Field::U64(solution.iterations as u64),
            Field::Bool(solution.converged),
        ];
        row.extend(per_user.into_iter().map(Field::F64));
        Ok(row)
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;

    let mut columns: Vec<String> = ["method", "snr_db", "trial", "sum_sinr", "leakage", "iterations", "converged"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for i in 0..base.n_users() {
        columns.push(format!("sinr_user_{i}"));
    }
    Ok(RunResult {
        meta: Meta::new("sinr-sweep", opts.master_seed, cfg.clone()),
        columns,
        rows,
    })
}

/// Sum-SINR of the max-SINR design as a function of the user count.
/// Infeasible counts contribute a marker row instead of trials.
pub fn run_user_sweep(cfg: &Config, opts: RunOptions) -> Result<RunResult, RunError> {
    cfg.validate()?;
    let target = cfg.target();

    struct Point {
        count: usize,
        scenario: Option<Scenario>, // None marks an infeasible count
    }
    let mut points = Vec::new();
    for &count in &cfg.user_counts {
        let scenario = cfg.sweep_scenario(count)?;
        let feasible = matches!(
            check_feasibility(scenario.n_sc, &scenario.users)
                .map_err(|e| RunError::Config(e.to_string()))?,
            Feasibility::Feasible
        );
        points.push(Point { count, scenario: feasible.then_some(scenario) });
    }

    let columns: Vec<String> =
        ["n_users", "snr_db", "trial", "status", "sum_sinr", "leakage", "iterations", "converged"]
            .iter()
            .map(|s| s.to_string())
            .collect();

    let mut rows: Vec<Vec<Field>> = Vec::new();
    for (c_idx, point) in points.iter().enumerate() {
        for (s_idx, &snr) in cfg.snr_grid_db.iter().enumerate() {
            let Some(scenario) = &point.scenario else {
                rows.push(vec![
                    Field::U64(point.count as u64),
                    Field::F64(snr),
                    Field::U64(0),
                    Field::Str("skipped_infeasible".into()),
                    Field::F64(f64::NAN),
                    Field::F64(f64::NAN),
                    Field::U64(0),
                    Field::Bool(false),
                ]);
                continue;
            };
            let scaled =
                scenario.with_snr_db(snr).map_err(|e| RunError::Config(e.to_string()))?;
            let trial_rows =
                run_tasks(cfg.trials, opts.threads, |trial| -> Result<Vec<Field>, RunError> {
                    let seed = derive(
                        opts.master_seed,
                        &[tag::USER_SWEEP, c_idx as u64, s_idx as u64, trial as u64],
                    );
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let links = scaled.draw_links(&target, &mut rng);
                    let solution = solve_method(Method::Proposed, &scaled, &links, cfg, &mut rng)?;
                    let (sum, _) = sum_sinr(&scaled, &links, &solution)?;
                    Ok(vec![
                        Field::U64(point.count as u64),
                        Field::F64(snr),
                        Field::U64(trial as u64),
                        Field::Str("ok".into()),
                        Field::F64(sum),
                        Field::F64(solution.leakage),
                        Field::U64(solution.iterations as u64),
                        Field::Bool(solution.converged),
                    ])
                })
                .into_iter()
                .collect::<Result<Vec<_>, _>>()?;
            rows.extend(trial_rows);
        }
    }
    Ok(RunResult {
        meta: Meta::new("user-sweep", opts.master_seed, cfg.clone()),
        columns,
        rows,
    })
}

/// ROC curves per (method, SNR) with shared calibration inside each curve.
pub fn run_roc(cfg: &Config, opts: RunOptions) -> Result<RunResult, RunError> {
    cfg.validate()?;
    let scenario = cfg.to_scenario()?;
    let radar = scenario
        .radar_index()
        .ok_or_else(|| RunError::Config("roc needs a radar user".into()))?;
    precheck_feasibility(cfg, &scenario)?;
    let model = cfg.target();
    let grid = cfg.detector.pfa_grid.clone();
    if grid.is_empty() {
        return Err(RunError::Config("empty pfa grid".into()));
    }
    let det = cfg.detector_config(grid[0], cfg.detector.roc_pulses_k);
    let mcfg = cfg.method_config(scenario.users[radar].dofs);

    let n_snr = cfg.snr_grid_db.len();
    let n_tasks = cfg.methods.len() * n_snr;
    let curves = run_tasks(n_tasks, opts.threads, |idx| {
        let m_idx = idx / n_snr;
        let s_idx = idx % n_snr;
        let method = cfg.methods[m_idx];
        let seed = derive(opts.master_seed, &[tag::ROC, method.tag(), s_idx as u64]);
        roc(
            &scenario,
            method.method(),
            &mcfg,
            &det,
            cfg.snr_grid_db[s_idx],
            &model,
            cfg.pulses_per_interval,
            &grid,
            seed,
        )
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()
    .map_err(RunError::from)?;

    let columns: Vec<String> =
        ["method", "snr_db", "target_model", "k", "pfa", "pd", "threshold", "saturated"]
            .iter()
            .map(|s| s.to_string())
            .collect();
    let mut rows = Vec::new();
    for curve in curves {
        for p in &curve.points {
            rows.push(vec![
                Field::Str(curve.meta.method.name().to_string()),
                Field::F64(curve.meta.snr_db),
                Field::Str(target_name(cfg.target_model).to_string()),
                Field::U64(curve.meta.pulses_k as u64),
                Field::F64(p.pfa),
                Field::F64(p.pd),
                Field::F64(p.threshold),
                Field::Bool(p.saturated),
            ]);
        }
    }
    Ok(RunResult {
        meta: Meta::new("roc", opts.master_seed, cfg.clone()),
        columns,
        rows,
    })
}

/// Detection-probability difference between the max-SINR design and SSSVSP
/// per (SNR, false-alarm target, pulse count). False-alarm targets below
/// the resolution of the calibration sample are clamped with a warning and
/// marked in the output.
pub fn run_pd_delta(cfg: &Config, opts: RunOptions) -> Result<RunResult, RunError> {
    cfg.validate()?;
    let scenario = cfg.to_scenario()?;
    let radar = scenario
        .radar_index()
        .ok_or_else(|| RunError::Config("pd-delta needs a radar user".into()))?;
    precheck_feasibility(cfg, &scenario)?;
    let model = cfg.target();
    let mcfg = cfg.method_config(scenario.users[radar].dofs);
    let n_h0 = cfg.detector.h0_calibration_trials;
    let achievable_pfa = 50.0 / n_h0 as f64;
    if achievable_pfa >= 1.0 {
        return Err(RunError::Config(format!(
            "h0_calibration_trials = {n_h0} cannot calibrate any false-alarm target"
        )));
    }

    let methods = [Method::Proposed, Method::Sssvsp];
    let n_snr = cfg.snr_grid_db.len();
    let n_k = cfg.detector.pulses_k.len();
    let task_rows = run_tasks(n_snr * n_k, opts.threads, |idx| -> Result<Vec<Vec<Field>>, RunError> {
        let s_idx = idx / n_k;
        let k_idx = idx % n_k;
        let snr = cfg.snr_grid_db[s_idx];
        let k = cfg.detector.pulses_k[k_idx];
        let det = cfg.detector_config(achievable_pfa.min(0.5), k);

        // per method: one solved instance, one H0 sample, one H1 sample
        let mut samples = Vec::new();
        for method in methods {
            let seed = derive(
                opts.master_seed,
                &[tag::PD_DELTA, method as u64, s_idx as u64, k_idx as u64],
            );
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let instance = DetectionInstance::new(
                &scenario,
                method,
                &mcfg,
                &det,
                snr,
                &model,
                cfg.pulses_per_interval,
                &mut rng,
            )?;
            let h0 = instance.draw_statistics(false, det.h0_calibration_trials, &mut rng);
            let h1 = instance.draw_statistics(true, det.h1_trials, &mut rng);
            samples.push((h0, h1));
        }

        let mut rows = Vec::new();
        for &pfa in &cfg.detector.pfa_targets {
            let pfa_used = pfa.max(achievable_pfa);
            let clamped = pfa_used > pfa;
            if clamped {
                eprintln!(
                    "warning: pfa target {pfa:.1e} under-sampled with {n_h0} H0 trials; \
                     clamped to {pfa_used:.3e}"
                );
            }
            let mut pds = Vec::new();
            for (h0, h1) in &samples {
                let cal = calibrate_threshold(h0, pfa_used).map_err(RunError::from)?;
                pds.push(exceedance_rate(h1, cal.threshold));
            }
            rows.push(vec![
                Field::F64(snr),
                Field::U64(k as u64),
                Field::F64(pfa),
                Field::F64(pfa_used),
                Field::Bool(clamped),
                Field::F64(pds[0]),
                Field::F64(pds[1]),
                Field::F64(pds[0] - pds[1]),
            ]);
        }
        Ok(rows)
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;

    let columns: Vec<String> = [
        "snr_db",
        "k",
        "pfa_requested",
        "pfa_used",
        "pfa_clamped",
        "pd_proposed",
        "pd_sssvsp",
        "pd_delta",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    Ok(RunResult {
        meta: Meta::new("pd-delta", opts.master_seed, cfg.clone()),
        columns,
        rows: task_rows.into_iter().flatten().collect(),
    })
}

/// Single Pd estimate helper for tests and ad-hoc probing.
pub fn single_pd(
    cfg: &Config,
    method: Method,
    snr_db: f64,
    pulses_k: usize,
    pfa: f64,
    seed: u64,
) -> Result<f64, RunError> {
    let scenario = cfg.to_scenario()?;
    let radar = scenario
        .radar_index()
        .ok_or_else(|| RunError::Config("needs a radar user".into()))?;
    let det = cfg.detector_config(pfa, pulses_k);
    let mcfg = cfg.method_config(scenario.users[radar].dofs);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let est = estimate_pd(
        &scenario,
        method,
        &mcfg,
        &det,
        snr_db,
        &cfg.target(),
        cfg.pulses_per_interval,
        &mut rng,
    )?;
    Ok(est.pd)
}
