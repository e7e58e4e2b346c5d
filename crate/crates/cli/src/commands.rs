//! The tabulating commands. Each returns a [`Table`]; writing it out is
//! left to the caller.

use dqwalk_core::analytic::{limit_variance, longterm_mean, longterm_variance_for};
use dqwalk_core::decoherent::{moments, path_sum_oracle, superoperator_evolve, ORACLE_MAX_T};
use dqwalk_core::stats::{cf_error, default_k_grid, ks_lattice_vs_gaussian, CF_GRID_POINTS};
use dqwalk_core::trajectory::{sample_ensemble, EnsembleSpec, EnsembleSummary};
use dqwalk_core::{position_distribution, renewal_evolve, InitialState, PositionDistribution, WalkError, WalkParams};

use crate::config::{Method, RunConfig};
use crate::error::Result;
use crate::output::Table;

fn params(cfg: &RunConfig) -> Result<WalkParams> {
    Ok(WalkParams::new(cfg.p, cfg.initial)?)
}

/// Runs the ensemble described by `cfg` and reports the seed on stderr.
pub fn run_ensemble(cfg: &RunConfig) -> Result<EnsembleSummary> {
    let spec = EnsembleSpec {
        params: params(cfg)?,
        t: cfg.t,
        n_samples: cfg.samples_or_default(),
        seed: cfg.seed_or_default(),
    };
    eprintln!("seed = {} (samples = {})", spec.seed, spec.n_samples);
    Ok(sample_ensemble(&spec)?)
}

/// Exact law at `cfg.t` by the requested method.
pub fn exact_distribution(cfg: &RunConfig) -> Result<PositionDistribution> {
    let params = params(cfg)?;
    let t = cfg.t;
    let dist = match cfg.method {
        Method::Renewal => position_distribution(&renewal_evolve(&params, t)?, &params, t)?,
        Method::Superop => position_distribution(&superoperator_evolve(&params, t)?, &params, t)?,
        Method::Oracle => {
            if t > ORACLE_MAX_T {
                return Err(WalkError::OracleTooLarge { t, max: ORACLE_MAX_T }.into());
            }
            path_sum_oracle(&params, t)?
        }
        Method::Mc => run_ensemble(cfg)?.empirical()?,
    };
    Ok(dist)
}

/// `(t, x, probability, method)` over the parity support.
pub fn distribution(cfg: &RunConfig) -> Result<Table> {
    let dist = exact_distribution(cfg)?;
    let mut table = Table::new(vec!["t", "x", "probability", "method"]);
    for (x, prob) in dist.support() {
        table.push(vec![cfg.t.into(), x.into(), prob.into(), cfg.method.name().into()]);
    }
    Ok(table)
}

/// `(t, mean_exact, var_exact, mean_formula, var_formula)` for `t = 1..=T`.
pub fn moments_table(cfg: &RunConfig) -> Result<Table> {
    let params = params(cfg)?;
    let table = renewal_evolve(&params, cfg.t)?;
    let mean_formula = longterm_mean(cfg.p, cfg.initial)?;
    let mut out = Table::new(vec!["t", "mean_exact", "var_exact", "mean_formula", "var_formula"]);
    for t in 1..=cfg.t {
        let (mean, var) = moments(&position_distribution(&table, &params, t)?);
        let var_formula = longterm_variance_for(cfg.p, t as f64, cfg.initial)?;
        out.push(vec![t.into(), mean.into(), var.into(), mean_formula.into(), var_formula.into()]);
    }
    Ok(out)
}

/// Times `T/8, T/4, T/2, T`, dropping zeros and repeats.
pub fn doubling_schedule(t: usize) -> Vec<usize> {
    let mut out: Vec<usize> = [t / 8, t / 4, t / 2, t].into_iter().filter(|&s| s > 0).collect();
    out.dedup();
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergencePoint {
    pub t: usize,
    pub ks: f64,
    pub cf: f64,
}

/// KS distance of `(X_t - mean)/sqrt t` to `N(0, v)` and the CF error
/// over `k in [0, 3]`. The KS statistic is centered by the exact mean;
/// the CF error is not, so a one-coin start keeps its `O(t^{-1/2})`
/// drift term.
pub fn convergence(params: &WalkParams, times: &[usize]) -> Result<Vec<ConvergencePoint>> {
    let t_max = times.iter().copied().max().unwrap_or(0);
    let table = renewal_evolve(params, t_max)?;
    let v = limit_variance(params.p())?;
    let grid = default_k_grid(CF_GRID_POINTS);
    times
        .iter()
        .map(|&t| {
            let dist = position_distribution(&table, params, t)?;
            let ks = ks_lattice_vs_gaussian(&dist, dist.mean(), v * t as f64)?;
            let cf = cf_error(&dist, 0.0, v, &grid);
            Ok(ConvergencePoint { t, ks, cf })
        })
        .collect()
}

/// `(t, ks_distance, cf_error)` along [`doubling_schedule`].
pub fn converge(cfg: &RunConfig) -> Result<Table> {
    let points = convergence(&params(cfg)?, &doubling_schedule(cfg.t))?;
    let mut table = Table::new(vec!["t", "ks_distance", "cf_error"]);
    for pt in points {
        table.push(vec![pt.t.into(), pt.ks.into(), pt.cf.into()]);
    }
    Ok(table)
}

/// `(t, x, frequency, count)` over the parity support.
pub fn mc(cfg: &RunConfig) -> Result<Table> {
    let summary = run_ensemble(cfg)?;
    let t = cfg.t as i64;
    let mut table = Table::new(vec!["t", "x", "frequency", "count"]);
    for (x, freq, count) in summary.rows().filter(|(x, _, _)| (x + t) % 2 == 0) {
        table.push(vec![cfg.t.into(), x.into(), freq.into(), count.into()]);
    }
    Ok(table)
}

/// The starts that the convergence checks cover.
pub const CONVERGENCE_STARTS: [InitialState; 2] = [InitialState::Symmetric, InitialState::CoinRight];
