//! Monte Carlo unraveling: unitary steps interrupted, with probability `p`
//! per step, by a position-and-coin measurement that collapses the state.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::decoherent::WalkParams;
use crate::error::{Result, WalkError};
use crate::pure_walk::Coin;
use crate::table::PositionDistribution;

/// Random stream of trajectory `index` for a given master seed.
pub fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    Coherent,
    Measured { x: i64, coin: Coin },
}

/// Wave function of one trajectory, stored relative to the site of the
/// last collapse so its width is set by the time since that collapse.
#[derive(Debug, Clone)]
pub struct TrajectoryState {
    p: f64,
    root: i64,
    age: usize,
    amps: Vec<[Complex64; 2]>,
}

impl TrajectoryState {
    pub fn new(params: &WalkParams) -> Self {
        Self {
            p: params.p(),
            root: 0,
            age: 0,
            amps: vec![params.initial().amplitudes()],
        }
    }

    pub fn root(&self) -> i64 {
        self.root
    }

    /// `(x, [Psi(x,1), Psi(x,2)])` over the current window.
    pub fn amplitudes(&self) -> impl Iterator<Item = (i64, [Complex64; 2])> + '_ {
        let base = self.root - self.age as i64;
        self.amps
            .iter()
            .enumerate()
            .map(move |(i, a)| (base + i as i64, *a))
    }

    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> StepOutcome {
        self.evolve();
        if self.p > 0.0 && rng.random::<f64>() < self.p {
            let (x, coin) = self.sample_site(rng);
            self.root = x;
            self.age = 0;
            let mut basis = [Complex64::new(0.0, 0.0); 2];
            basis[coin.index()] = Complex64::new(1.0, 0.0);
            self.amps = vec![basis];
            StepOutcome::Measured { x, coin }
        } else {
            StepOutcome::Coherent
        }
    }

    fn evolve(&mut self) {
        let mut next = vec![[Complex64::new(0.0, 0.0); 2]; self.amps.len() + 2];
        for (i, [a, b]) in self.amps.iter().enumerate() {
            next[i + 2][0] += (a + b) * FRAC_1_SQRT_2;
            next[i][1] += (a - b) * FRAC_1_SQRT_2;
        }
        self.amps = next;
        self.age += 1;
    }

    /// Inverse-CDF draw of `(x, n)` from `|Psi|²`, scanning `x` ascending and
    /// then the coin.
    pub fn sample_site<R: Rng + ?Sized>(&self, rng: &mut R) -> (i64, Coin) {
        let total: f64 = self.amps.iter().flatten().map(|a| a.norm_sqr()).sum();
        let target = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut last = None;
        for (x, a) in self.amplitudes() {
            for coin in Coin::ALL {
                let w = a[coin.index()].norm_sqr();
                if w == 0.0 {
                    continue;
                }
                acc += w;
                last = Some((x, coin));
                if target < acc {
                    return (x, coin);
                }
            }
        }
        last.expect("wave function has positive norm")
    }
}

/// Runs one trajectory for `t` steps and reads out the final position.
pub fn sample_trajectory<R: Rng + ?Sized>(params: &WalkParams, t: usize, rng: &mut R) -> i64 {
    let mut state = TrajectoryState::new(params);
    for _ in 0..t {
        state.step(rng);
    }
    state.sample_site(rng).0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleSpec {
    pub params: WalkParams,
    pub t: usize,
    pub n_samples: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSummary {
    pub t: usize,
    /// Counts over `x in [-t, t]`, index `x + t`.
    pub counts: Vec<u64>,
    pub probs: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
    pub n_samples: u64,
    pub seed: u64,
}

impl EnsembleSummary {
    pub fn empirical(&self) -> Result<PositionDistribution> {
        PositionDistribution::new(self.t, self.probs.clone())
    }

    /// `(x, frequency, count)` in ascending `x`.
    pub fn rows(&self) -> impl Iterator<Item = (i64, f64, u64)> + '_ {
        let t = self.t as i64;
        self.counts
            .iter()
            .zip(&self.probs)
            .enumerate()
            .map(move |(i, (&c, &f))| (i as i64 - t, f, c))
    }
}

/// Trajectory `i` draws from stream `i` of `seed`, and counts are summed
/// as integers, so the result does not depend on scheduling.
pub fn sample_ensemble(spec: &EnsembleSpec) -> Result<EnsembleSummary> {
    if spec.n_samples == 0 {
        return Err(WalkError::InvalidTime("an ensemble needs at least one sample".into()));
    }
    let t = spec.t;
    let width = 2 * t + 1;
    let counts = (0..spec.n_samples)
        .into_par_iter()
        .fold(
            || vec![0u64; width],
            |mut acc, i| {
                let mut rng = trajectory_rng(spec.seed, i);
                let x = sample_trajectory(&spec.params, t, &mut rng);
                acc[(x + t as i64) as usize] += 1;
                acc
            },
        )
        .reduce(
            || vec![0u64; width],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(u, v)| *u += v);
                a
            },
        );
    let n = spec.n_samples as f64;
    let probs: Vec<f64> = counts.iter().map(|&c| c as f64 / n).collect();
    let offset = t as i64;
    let (mut s1, mut s2) = (0i128, 0i128);
    for (i, &c) in counts.iter().enumerate() {
        let x = (i as i64 - offset) as i128;
        s1 += x * c as i128;
        s2 += x * x * c as i128;
    }
    let mean = s1 as f64 / n;
    let variance = s2 as f64 / n - mean * mean;
    Ok(EnsembleSummary {
        t,
        counts,
        probs,
        mean,
        variance,
        n_samples: spec.n_samples,
        seed: spec.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pure_walk::InitialState;

    #[test]
    fn single_sample_ensemble_is_one_trajectory() {
        let params = WalkParams::new(0.3, InitialState::Symmetric).unwrap();
        let spec = EnsembleSpec {
            params,
            t: 25,
            n_samples: 1,
            seed: 99,
        };
        let summary = sample_ensemble(&spec).unwrap();
        let x = sample_trajectory(&params, 25, &mut trajectory_rng(99, 0));
        assert_eq!(summary.counts[(x + 25) as usize], 1);
        assert_eq!(summary.mean, x as f64);
    }

    #[test]
    fn same_seed_same_summary() {
        let params = WalkParams::new(0.5, InitialState::CoinRight).unwrap();
        let spec = EnsembleSpec {
            params,
            t: 40,
            n_samples: 5000,
            seed: 7,
        };
        assert_eq!(sample_ensemble(&spec).unwrap(), sample_ensemble(&spec).unwrap());
        let other = EnsembleSpec { seed: 8, ..spec };
        assert_ne!(sample_ensemble(&spec).unwrap().counts, sample_ensemble(&other).unwrap().counts);
    }

    #[test]
    fn collapse_leaves_a_basis_vector() {
        let params = WalkParams::new(0.6, InitialState::Symmetric).unwrap();
        let mut state = TrajectoryState::new(&params);
        let mut rng = trajectory_rng(3, 0);
        let mut seen = 0;
        for _ in 0..200 {
            if let StepOutcome::Measured { x, coin } = state.step(&mut rng) {
                seen += 1;
                let nonzero: Vec<_> = state
                    .amplitudes()
                    .flat_map(|(y, a)| Coin::ALL.into_iter().map(move |n| (y, n, a[n.index()])))
                    .filter(|(_, _, a)| a.norm() != 0.0)
                    .collect();
                assert_eq!(nonzero, vec![(x, coin, Complex64::new(1.0, 0.0))]);
            }
        }
        assert!(seen > 50);
    }

    #[test]
    fn parity_of_samples() {
        let params = WalkParams::new(0.2, InitialState::Symmetric).unwrap();
        let s = sample_ensemble(&EnsembleSpec {
            params,
            t: 11,
            n_samples: 2000,
            seed: 1,
        })
        .unwrap();
        for (x, f, c) in s.rows() {
            if (x + 11) % 2 != 0 {
                assert_eq!((f, c), (0.0, 0));
            }
        }
        assert!((s.probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_empty_ensemble() {
        let params = WalkParams::new(0.2, InitialState::Symmetric).unwrap();
        assert!(sample_ensemble(&EnsembleSpec {
            params,
            t: 3,
            n_samples: 0,
            seed: 1
        })
        .is_err());
    }
}
