//! Lattice probability tables indexed by time, position and coin.

use num_complex::Complex64;

use crate::error::{Result, WalkError};
use crate::pure_walk::Coin;

/// `P_{m,n}(x, t)` for `0 <= t <= t_max`: the probability that a walk
/// started at `|0, m>` is found at `|x, n>` after `t` steps.
///
/// Row `t` is a dense light-cone slice over `x in [-t, t]` (index `x + t`);
/// sites with `x + t` odd hold exact zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityTable {
    t_max: usize,
    rows: Vec<[[Vec<f64>; 2]; 2]>,
}

impl ProbabilityTable {
    pub(crate) fn from_rows(rows: Vec<[[Vec<f64>; 2]; 2]>) -> Self {
        debug_assert!(!rows.is_empty());
        debug_assert!(rows
            .iter()
            .enumerate()
            .all(|(t, r)| r.iter().flatten().all(|v| v.len() == 2 * t + 1)));
        Self {
            t_max: rows.len() - 1,
            rows,
        }
    }

    pub fn t_max(&self) -> usize {
        self.t_max
    }

    fn check_t(&self, t: usize) -> Result<()> {
        if t > self.t_max {
            return Err(WalkError::BeyondHorizon {
                t,
                t_max: self.t_max,
            });
        }
        Ok(())
    }

    /// Light-cone row for `(m, n)` at time `t`, indexed by `x + t`.
    ///
    /// Panics if `t > t_max`.
    pub fn row(&self, m: Coin, n: Coin, t: usize) -> &[f64] {
        &self.rows[t][m.index()][n.index()]
    }

    pub fn get(&self, m: Coin, n: Coin, x: i64, t: usize) -> f64 {
        if t > self.t_max || x.unsigned_abs() as usize > t {
            return 0.0;
        }
        self.row(m, n, t)[(x + t as i64) as usize]
    }

    /// `sum_n P_{m,n}(x, t)` over the light cone.
    pub fn position_probs(&self, m: Coin, t: usize) -> Result<Vec<f64>> {
        self.check_t(t)?;
        let [a, b] = &self.rows[t][m.index()];
        Ok(a.iter().zip(b).map(|(u, v)| u + v).collect())
    }

    /// `sum_{x,n} P_{m,n}(x, t)`.
    pub fn total(&self, m: Coin, t: usize) -> f64 {
        self.rows[t][m.index()].iter().flatten().sum()
    }

    /// Fourier transform `sum_x P_{m,n}(x, t) e^{ikx}`.
    pub fn char_fn(&self, m: Coin, n: Coin, k: f64, t: usize) -> Result<Complex64> {
        self.check_t(t)?;
        Ok(lattice_char_fn(self.row(m, n, t), t, k))
    }

    /// Largest entrywise difference over the common horizon.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.rows
            .iter()
            .zip(&other.rows)
            .flat_map(|(a, b)| {
                a.iter()
                    .flatten()
                    .zip(b.iter().flatten())
                    .flat_map(|(u, v)| u.iter().zip(v).map(|(x, y)| (x - y).abs()))
            })
            .fold(0.0, f64::max)
    }

    pub fn iter_entries(&self) -> impl Iterator<Item = (usize, Coin, Coin, i64, f64)> + '_ {
        self.rows.iter().enumerate().flat_map(|(t, r)| {
            Coin::ALL.into_iter().flat_map(move |m| {
                Coin::ALL.into_iter().flat_map(move |n| {
                    r[m.index()][n.index()]
                        .iter()
                        .enumerate()
                        .map(move |(i, &v)| (t, m, n, i as i64 - t as i64, v))
                })
            })
        })
    }
}

/// `sum_x row[x + t] e^{ikx}` for a light-cone row of half-width `t`.
pub(crate) fn lattice_char_fn(row: &[f64], t: usize, k: f64) -> Complex64 {
    row.iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .map(|(i, &v)| {
            let x = i as f64 - t as f64;
            Complex64::from_polar(v, k * x)
        })
        .sum()
}

/// Law of the walker's position at a single time, over `x in [-t, t]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionDistribution {
    t: usize,
    probs: Vec<f64>,
}

impl PositionDistribution {
    pub fn new(t: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != 2 * t + 1 {
            return Err(WalkError::InvalidTime(format!(
                "distribution at t = {t} needs {} sites, got {}",
                2 * t + 1,
                probs.len()
            )));
        }
        Ok(Self { t, probs })
    }

    pub fn time(&self) -> usize {
        self.t
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, x: i64) -> f64 {
        if x.unsigned_abs() as usize > self.t {
            0.0
        } else {
            self.probs[(x + self.t as i64) as usize]
        }
    }

    /// `(x, P(x))` in ascending `x`, including zero sites.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let t = self.t as i64;
        self.probs
            .iter()
            .enumerate()
            .map(move |(i, &v)| (i as i64 - t, v))
    }

    /// Sites with the right parity (`x + t` even), ascending.
    pub fn support(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let t = self.t as i64;
        self.iter().filter(move |(x, _)| (x + t) % 2 == 0)
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.iter().map(|(x, p)| x as f64 * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        let second: f64 = self.iter().map(|(x, p)| (x * x) as f64 * p).sum();
        second - mean * mean
    }

    pub fn char_fn(&self, k: f64) -> Complex64 {
        lattice_char_fn(&self.probs, self.t, k)
    }

    /// Half the L1 distance; distributions may have different horizons.
    pub fn tv_distance(&self, other: &Self) -> f64 {
        let reach = self.t.max(other.t) as i64;
        0.5 * (-reach..=reach)
            .map(|x| (self.prob(x) - other.prob(x)).abs())
            .sum::<f64>()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let reach = self.t.max(other.t) as i64;
        (-reach..=reach)
            .map(|x| (self.prob(x) - other.prob(x)).abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|P(x) - P(-x)|`.
    pub fn mirror_defect(&self) -> f64 {
        let n = self.probs.len();
        (0..n)
            .map(|i| (self.probs[i] - self.probs[n - 1 - i]).abs())
            .fold(0.0, f64::max)
    }
}
