use std::io::Write;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use dca_warmstart::descent::{linf_pm_distance, StepKind};

use crate::generate::{gen_instance, rng_for, GenParams};
use crate::instance::{Instance, ProblemKind};
use crate::run::solve_instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Noise {
    /// Integer offsets uniform in `[−k, k]`.
    #[default]
    Integer,
    /// Real offsets uniform in `[−k, k]`.
    Continuous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub kind: ProblemKind,
    pub n: usize,
    pub ks: Vec<u32>,
    pub trials: usize,
    pub seed: u64,
    pub step: StepKind,
    pub noise: Noise,
    pub max_weight: i64,
    pub labels: i64,
}

impl SweepConfig {
    pub fn new(kind: ProblemKind, n: usize, ks: Vec<u32>, trials: usize, seed: u64) -> Self {
        SweepConfig {
            kind,
            n,
            ks,
            trials,
            seed,
            step: StepKind::Unit,
            noise: Noise::Integer,
            max_weight: 10,
            labels: 5,
        }
    }
}

/// One warm-started solve. Column order is the CSV schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub problem: ProblemKind,
    pub seed: u64,
    pub k: u32,
    pub trial: usize,
    /// `‖p̂ − p*‖∞`.
    pub pred_linf: f64,
    /// `‖p° − p*‖∞±` for the rounded projection `p°`.
    pub start_pm: i64,
    pub iterations: usize,
    pub oracle_calls: u64,
    pub wall_us: u128,
    /// `iterations ≤ start_pm + 1` and `iterations ≤ 4k + 2`.
    pub bound_ok: bool,
    /// `ok`, or `error: …` when the solve failed.
    pub status: String,
}

pub const SWEEP_CSV_HEADER: &str =
    "problem,seed,k,trial,pred_linf,start_pm,iterations,oracle_calls,wall_us,bound_ok,status";

/// Seed of the instance used by `trial`; every magnitude reuses it.
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(trial as u64)
}

fn noise_stream(k: u32, trial: usize) -> u64 {
    ((k as u64) << 32) | trial as u64
}

pub fn noisy_prediction(p_star: &[i64], k: u32, noise: Noise, seed: u64, trial: usize) -> Vec<f64> {
    let mut rng = rng_for(seed, noise_stream(k, trial) + 1);
    let k = k as i64;
    p_star
        .iter()
        .map(|&x| match noise {
            Noise::Integer => (x + rng.gen_range(-k..=k)) as f64,
            Noise::Continuous if k == 0 => x as f64,
            Noise::Continuous => x as f64 + rng.gen_range(-(k as f64)..=k as f64),
        })
        .collect()
}

fn error_record(cfg: &SweepConfig, k: u32, trial: usize, msg: String) -> SweepRecord {
    SweepRecord {
        problem: cfg.kind,
        seed: cfg.seed,
        k,
        trial,
        pred_linf: f64::NAN,
        start_pm: -1,
        iterations: 0,
        oracle_calls: 0,
        wall_us: 0,
        bound_ok: false,
        status: format!("error: {msg}"),
    }
}

fn warm_row(cfg: &SweepConfig, inst: &Instance, p_star: &[i64], k: u32, trial: usize) -> SweepRecord {
    let p_hat = noisy_prediction(p_star, k, cfg.noise, cfg.seed, trial);
    let report = match solve_instance(inst, Some(&p_hat), cfg.step) {
        Ok(r) => r,
        Err(e) => return error_record(cfg, k, trial, e.to_string()),
    };
    let pred_linf = p_hat.iter().zip(p_star).map(|(a, &b)| (a - b as f64).abs()).fold(0.0, f64::max);
    let start_pm = linf_pm_distance(&report.start, p_star);
    let bound_ok = report.iterations as i64 <= start_pm + 1 && report.iterations as u64 <= 4 * k as u64 + 2;
    SweepRecord {
        problem: cfg.kind,
        seed: cfg.seed,
        k,
        trial,
        pred_linf,
        start_pm,
        iterations: report.iterations,
        oracle_calls: report.oracle_calls,
        wall_us: report.wall_us,
        bound_ok,
        status: if report.certificate { "ok".into() } else { format!("error: {}", report.certificate_detail) },
    }
}

/// Solves each trial instance cold for `p*`, then warm-starts from `p* + noise`
/// for every magnitude. Rows come back in `(k, trial)` order.
pub fn run_warmstart_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRecord>> {
    if cfg.trials == 0 || cfg.ks.is_empty() {
        bail!("a sweep needs at least one trial and one magnitude");
    }
    let params = GenParams { max_weight: cfg.max_weight, labels: cfg.labels, ..GenParams::new(cfg.kind, cfg.n, 0) };
    let instances = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| gen_instance(&GenParams { seed: trial_seed(cfg.seed, trial), ..params }))
        .collect::<Result<Vec<_>>>()?;
    let cold: Vec<std::result::Result<(Instance, Vec<i64>), String>> = instances
        .into_par_iter()
        .map(|inst| {
            let p_star = solve_instance(&inst, None, cfg.step).map_err(|e| e.to_string())?.point;
            Ok((inst, p_star))
        })
        .collect();
    let jobs: Vec<(u32, usize)> = cfg.ks.iter().flat_map(|&k| (0..cfg.trials).map(move |t| (k, t))).collect();
    Ok(jobs
        .into_par_iter()
        .map(|(k, trial)| match &cold[trial] {
            Ok((inst, p_star)) => warm_row(cfg, inst, p_star, k, trial),
            Err(e) => error_record(cfg, k, trial, format!("cold solve failed: {e}")),
        })
        .collect())
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(true).from_writer(out);
    for r in rows {
        w.serialize(r).context("writing sweep row")?;
    }
    w.flush()?;
    Ok(())
}

pub fn parse_ks(text: &str) -> Result<Vec<u32>> {
    text.split(',')
        .map(|s| s.trim().parse::<u32>().with_context(|| format!("`{s}` is not a non-negative integer")))
        .collect()
}
