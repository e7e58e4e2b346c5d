//! Distances between lattice laws and Gaussian limits, plus a pooled
//! chi-square goodness-of-fit test.

use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::error::{Result, WalkError};
use crate::table::PositionDistribution;

/// Number of points in the default wavenumber grid over `[0, 3]`.
pub const CF_GRID_POINTS: usize = 301;

/// Kolmogorov-Smirnov distance between a lattice law and
/// `N(center, variance)`.
///
/// The lattice CDF jumps at the parity support `x_j`, two apart; it is
/// compared with the Gaussian CDF at the midpoints `x_j + 1` (and at
/// `x_0 - 1` below the support).
pub fn ks_lattice_vs_gaussian(dist: &PositionDistribution, center: f64, variance: f64) -> Result<f64> {
    if !(variance > 0.0) {
        return Err(WalkError::InvalidProbability(variance));
    }
    let normal = Normal::new(center, variance.sqrt()).map_err(|_| WalkError::InvalidProbability(variance))?;
    let mut cdf = 0.0;
    let mut first = true;
    let mut worst = 0.0f64;
    for (x, prob) in dist.support() {
        if first {
            worst = worst.max(normal.cdf(x as f64 - 1.0));
            first = false;
        }
        cdf += prob;
        worst = worst.max((cdf - normal.cdf(x as f64 + 1.0)).abs());
    }
    Ok(worst)
}

/// `max_k |E exp(ik (X - center)/sqrt t) - exp(-v k²/2)|` over `k_grid`.
pub fn cf_error(dist: &PositionDistribution, center: f64, v: f64, k_grid: &[f64]) -> f64 {
    let scale = 1.0 / (dist.time().max(1) as f64).sqrt();
    k_grid
        .iter()
        .map(|&k| {
            let kk = k * scale;
            let phase = num_complex::Complex64::from_polar(1.0, -kk * center);
            let cf = dist.char_fn(kk) * phase;
            (cf - (-v * k * k / 2.0).exp()).norm()
        })
        .fold(0.0, f64::max)
}

/// `points` equispaced wavenumbers over `[0, 3]`.
pub fn default_k_grid(points: usize) -> Vec<f64> {
    (0..points).map(|i| 3.0 * i as f64 / (points - 1) as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareOutcome {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson test of observed counts against exact cell probabilities.
/// Cells with expected count below `min_expected` are pooled together.
pub fn chi_square(counts: &[u64], probs: &[f64], min_expected: f64) -> Result<ChiSquareOutcome> {
    if counts.len() != probs.len() {
        return Err(WalkError::InvalidTime(format!(
            "{} counts against {} probabilities",
            counts.len(),
            probs.len()
        )));
    }
    let n: u64 = counts.iter().sum();
    let n = n as f64;
    let mut statistic = 0.0;
    let mut cells = 0usize;
    let (mut pooled_obs, mut pooled_exp) = (0.0, 0.0);
    for (&c, &p) in counts.iter().zip(probs) {
        let expected = n * p;
        if expected >= min_expected {
            statistic += (c as f64 - expected).powi(2) / expected;
            cells += 1;
        } else {
            pooled_obs += c as f64;
            pooled_exp += expected;
        }
    }
    if pooled_exp > 0.0 {
        statistic += (pooled_obs - pooled_exp).powi(2) / pooled_exp;
        cells += 1;
    }
    let dof = cells.saturating_sub(1).max(1);
    let law = ChiSquared::new(dof as f64).map_err(|e| WalkError::InvalidTime(e.to_string()))?;
    Ok(ChiSquareOutcome {
        statistic,
        dof,
        p_value: 1.0 - law.cdf(statistic),
    })
}
