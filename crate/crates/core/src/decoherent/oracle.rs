//! Brute-force sum over measurement histories.
//!
//! Every step applies `U` and then one Kraus operator: the coherent branch
//! `sqrt(q) I` or a projection `sqrt(p) |x,n><x,n|`. Projections onto sites
//! where the state vanishes give zero amplitude and are not expanded.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::WalkParams;
use crate::error::{Result, WalkError};
use crate::table::PositionDistribution;

pub const ORACLE_MAX_T: usize = 8;

/// `P(X_t = x, coin = n)` for the start in `params`, as `[x + t][n]`.
pub fn path_sum_coin_probs(params: &WalkParams, t: usize) -> Result<Vec<[f64; 2]>> {
    if t > ORACLE_MAX_T {
        return Err(WalkError::OracleTooLarge {
            t,
            max: ORACLE_MAX_T,
        });
    }
    let width = 2 * t + 1;
    let mut psi = vec![[Complex64::new(0.0, 0.0); 2]; width];
    psi[t] = params.initial().amplitudes();
    let mut out = vec![[0.0; 2]; width];
    let walk = Walk {
        sqrt_p: params.p().sqrt(),
        sqrt_q: params.q().sqrt(),
        t,
    };
    walk.branch(&psi, 0, &mut out);
    Ok(out)
}

pub fn path_sum_oracle(params: &WalkParams, t: usize) -> Result<PositionDistribution> {
    let probs = path_sum_coin_probs(params, t)?
        .into_iter()
        .map(|[a, b]| a + b)
        .collect();
    PositionDistribution::new(t, probs)
}

struct Walk {
    sqrt_p: f64,
    sqrt_q: f64,
    t: usize,
}

impl Walk {
    fn branch(&self, psi: &[[Complex64; 2]], step: usize, out: &mut [[f64; 2]]) {
        if step == self.t {
            for (o, a) in out.iter_mut().zip(psi) {
                o[0] += a[0].norm_sqr();
                o[1] += a[1].norm_sqr();
            }
            return;
        }
        let evolved = self.apply_u(psi);
        if self.sqrt_q != 0.0 {
            let coherent: Vec<_> = evolved.iter().map(|a| a.map(|v| v * self.sqrt_q)).collect();
            self.branch(&coherent, step + 1, out);
        }
        if self.sqrt_p != 0.0 {
            for (i, a) in evolved.iter().enumerate() {
                for n in 0..2 {
                    if a[n] == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    let mut projected = vec![[Complex64::new(0.0, 0.0); 2]; evolved.len()];
                    projected[i][n] = a[n] * self.sqrt_p;
                    self.branch(&projected, step + 1, out);
                }
            }
        }
    }

    fn apply_u(&self, psi: &[[Complex64; 2]]) -> Vec<[Complex64; 2]> {
        let mut next = vec![[Complex64::new(0.0, 0.0); 2]; psi.len()];
        for (i, [a, b]) in psi.iter().enumerate() {
            if *a == Complex64::new(0.0, 0.0) && *b == Complex64::new(0.0, 0.0) {
                continue;
            }
            next[i + 1][0] += (a + b) * FRAC_1_SQRT_2;
            next[i - 1][1] += (a - b) * FRAC_1_SQRT_2;
        }
        next
    }
}
