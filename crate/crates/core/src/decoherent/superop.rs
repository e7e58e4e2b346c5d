//! Forward evolution of the density operator,
//! `rho -> q U rho U* + p diag(U rho U*)`, on the light-cone lattice.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::WalkParams;
use crate::error::{Result, WalkError};
use crate::pure_walk::{Coin, InitialState};
use crate::table::{PositionDistribution, ProbabilityTable};

/// Default cap on stored complex entries per density matrix (128 MiB).
pub const DEFAULT_MEMORY_BUDGET: usize = 1 << 23;

/// Density matrix over `|x, n>` with `|x| <= horizon`, basis index
/// `2 (x + horizon) + n`.
#[derive(Debug, Clone)]
pub struct DensityStepper {
    q: f64,
    horizon: usize,
    dim: usize,
    t: usize,
    rho: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl DensityStepper {
    pub fn new(params: &WalkParams, horizon: usize, budget: usize) -> Result<Self> {
        let dim = 2 * (2 * horizon + 1);
        let needed = dim * dim;
        if needed > budget {
            return Err(WalkError::MemoryBudget { needed, budget });
        }
        let mut rho = vec![Complex64::new(0.0, 0.0); needed];
        let amps = params.initial().amplitudes();
        let origin = 2 * horizon;
        for a in 0..2 {
            for b in 0..2 {
                rho[(origin + a) * dim + origin + b] = amps[a] * amps[b].conj();
            }
        }
        Ok(Self {
            q: params.q(),
            horizon,
            dim,
            t: 0,
            rho,
            scratch: vec![Complex64::new(0.0, 0.0); dim],
        })
    }

    pub fn time(&self) -> usize {
        self.t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.rho[row * self.dim + col]
    }

    /// Basis index of `|x, n>`.
    pub fn index(&self, x: i64, n: Coin) -> usize {
        2 * (x + self.horizon as i64) as usize + n.index()
    }

    /// Largest modulus among off-diagonal entries.
    pub fn max_off_diagonal(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.dim {
            for c in 0..self.dim {
                if r != c {
                    worst = worst.max(self.rho[r * self.dim + c].norm());
                }
            }
        }
        worst
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.rho[i * self.dim + i].re).sum()
    }

    /// Diagonal entry `<x, n| rho |x, n>`.
    pub fn prob(&self, x: i64, n: Coin) -> f64 {
        if x.unsigned_abs() as usize > self.horizon {
            return 0.0;
        }
        let i = self.index(x, n);
        self.rho[i * self.dim + i].re
    }

    pub fn position_distribution(&self) -> Result<PositionDistribution> {
        let t = self.t as i64;
        let probs = (-t..=t)
            .map(|x| Coin::ALL.iter().map(|&n| self.prob(x, n)).sum())
            .collect();
        PositionDistribution::new(self.t, probs)
    }

    /// Applies one step; fails once the light cone would leave the lattice.
    pub fn step(&mut self) -> Result<()> {
        if self.t >= self.horizon {
            return Err(WalkError::BeyondHorizon {
                t: self.t + 1,
                t_max: self.horizon,
            });
        }
        // Only sites |x| <= t are occupied now, |x| <= t + 1 afterwards.
        let lo_in = 2 * (self.horizon - self.t);
        let hi_in = 2 * (self.horizon + self.t) + 2;
        let lo_out = lo_in - 2;
        let hi_out = hi_in + 2;
        let dim = self.dim;

        // rho U^T: U acts on every occupied row.
        for r in lo_in..hi_in {
            let row = &mut self.rho[r * dim..(r + 1) * dim];
            apply_u(row, &mut self.scratch, lo_in, hi_in);
        }
        // U (rho U^T): U acts on every column, now over the wider range.
        let mut col = vec![Complex64::new(0.0, 0.0); dim];
        for c in lo_out..hi_out {
            for r in lo_in..hi_in {
                col[r] = self.rho[r * dim + c];
            }
            apply_u(&mut col, &mut self.scratch, lo_in, hi_in);
            for r in lo_out..hi_out {
                self.rho[r * dim + c] = col[r];
            }
        }
        if self.q != 1.0 {
            for r in lo_out..hi_out {
                for c in lo_out..hi_out {
                    if r != c {
                        self.rho[r * dim + c] *= self.q;
                    }
                }
            }
        }
        self.t += 1;
        Ok(())
    }
}

/// In-place Hadamard step on a vector whose support is `[lo, hi)`.
fn apply_u(v: &mut [Complex64], scratch: &mut [Complex64], lo: usize, hi: usize) {
    let lo_out = lo - 2;
    let hi_out = hi + 2;
    for s in &mut scratch[lo_out..hi_out] {
        *s = Complex64::new(0.0, 0.0);
    }
    for site in (lo..hi).step_by(2) {
        let (a, b) = (v[site], v[site + 1]);
        scratch[site + 2] += (a + b) * FRAC_1_SQRT_2;
        scratch[site - 1] += (a - b) * FRAC_1_SQRT_2;
    }
    v[lo_out..hi_out].copy_from_slice(&scratch[lo_out..hi_out]);
}

pub fn superoperator_evolve(params: &WalkParams, t_max: usize) -> Result<ProbabilityTable> {
    superoperator_evolve_with(params, t_max, DEFAULT_MEMORY_BUDGET)
}

/// `P_{m,n}(x,t)` read off the diagonal of the density operator, one
/// evolution per initial coin.
pub fn superoperator_evolve_with(
    params: &WalkParams,
    t_max: usize,
    budget: usize,
) -> Result<ProbabilityTable> {
    let mut rows: Vec<[[Vec<f64>; 2]; 2]> = (0..=t_max)
        .map(|_| Default::default())
        .collect();
    for (m, start) in [(Coin::Right, InitialState::CoinRight), (Coin::Left, InitialState::CoinLeft)] {
        let mut stepper = DensityStepper::new(&params.with_initial(start), t_max, budget)?;
        for t in 0..=t_max {
            if t > 0 {
                stepper.step()?;
            }
            for n in Coin::ALL {
                rows[t][m.index()][n.index()] = (-(t as i64)..=t as i64)
                    .map(|x| stepper.prob(x, n))
                    .collect();
            }
        }
    }
    Ok(ProbabilityTable::from_rows(rows))
}
