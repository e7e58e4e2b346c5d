//! Mean and variance sequences in double-double precision.
//!
//! Moments of a convolution are binomial combinations of the moments of
//! its factors, so the renewal recursion closes on the first three
//! moments of each `P_{m,n}(., t)`. Working in roughly 106-bit arithmetic
//! resolves exponentially small corrections that ordinary doubles lose
//! below about 1e-12 of the variance.

use super::WalkParams;
use crate::ddouble::DoubleDouble as Dd;
use crate::pure_walk::Coin;

/// Zeroth, first and second moment for each `(m, n)`.
type MomentBlock = [[[Dd; 3]; 2]; 2];

#[derive(Debug, Clone, PartialEq)]
pub struct DdMoments {
    pub mean: Vec<Dd>,
    pub variance: Vec<Dd>,
}

/// Exact mean and variance of the position for `0 <= t <= t_max`.
pub fn exact_moments_dd(params: &WalkParams, t_max: usize) -> DdMoments {
    let pure = pure_moments_dd(t_max);
    let p = Dd::from(params.p());
    let q = Dd::ONE - p;
    let weights: Vec<Dd> = (0..=t_max)
        .map(|s| if s == 0 { Dd::ZERO } else { p * q.powi(s as u32 - 1) })
        .collect();

    let mut blocks: Vec<MomentBlock> = Vec::with_capacity(t_max + 1);
    blocks.push(pure[0]);
    for t in 1..=t_max {
        let mut next = [[[Dd::ZERO; 3]; 2]; 2];
        if params.p() == 0.0 {
            blocks.push(pure[t]);
            continue;
        }
        for s in 1..t {
            let w = weights[s];
            if w == Dd::ZERO {
                break;
            }
            let earlier = &blocks[t - s];
            for m in 0..2 {
                for l in 0..2 {
                    let a = &earlier[m][l];
                    for n in 0..2 {
                        let b = &pure[s][l][n];
                        let conv = [
                            a[0] * b[0],
                            a[1] * b[0] + a[0] * b[1],
                            a[2] * b[0] + (a[1] * b[1]).scale(2.0) + a[0] * b[2],
                        ];
                        for j in 0..3 {
                            next[m][n][j] += w * conv[j];
                        }
                    }
                }
            }
        }
        let survive = q.powi(t as u32 - 1);
        for m in 0..2 {
            for n in 0..2 {
                for j in 0..3 {
                    next[m][n][j] += survive * pure[t][m][n][j];
                }
            }
        }
        blocks.push(next);
    }

    let weights = params.initial().coin_weights().map(Dd::from);
    let mut mean = Vec::with_capacity(t_max + 1);
    let mut variance = Vec::with_capacity(t_max + 1);
    for block in &blocks {
        let mut m1 = Dd::ZERO;
        let mut m2 = Dd::ZERO;
        for m in Coin::ALL {
            for n in Coin::ALL {
                let mom = &block[m.index()][n.index()];
                m1 += weights[m.index()] * mom[1];
                m2 += weights[m.index()] * mom[2];
            }
        }
        mean.push(m1);
        variance.push(m2 - m1 * m1);
    }
    DdMoments { mean, variance }
}

/// The symmetric-start variance asymptote
/// `v t - 2q²/(p r) - (2/p²)(1 + q² - r)`, `r = sqrt(1 + q²)`, in
/// double-double so it can be set against [`exact_moments_dd`].
pub fn longterm_variance_dd(p: f64, t: usize) -> Dd {
    let p = Dd::from(p);
    let q = Dd::ONE - p;
    let q2 = q * q;
    let r = (Dd::ONE + q2).sqrt();
    let two = Dd::from(2.0);
    let v = (p + two * r - two) / p;
    v * Dd::from(t as i64) - two * q2 / (p * r) - two / (p * p) * (Dd::ONE + q2 - r)
}

/// Moments of `W_{m,n}(., t)` from a dyadic real evolution carried out in
/// double-double, exact far beyond the reach of `f64`.
fn pure_moments_dd(t_max: usize) -> Vec<MomentBlock> {
    let mut out = Vec::with_capacity(t_max + 1);
    let mut amps: [[Vec<Dd>; 2]; 2] = [
        [vec![Dd::ONE], vec![Dd::ZERO]],
        [vec![Dd::ZERO], vec![Dd::ONE]],
    ];
    out.push(block_moments(&amps, 0));
    for t in 0..t_max {
        for coins in amps.iter_mut() {
            let [a, b] = coins;
            let mut right = vec![Dd::ZERO; 2 * t + 3];
            let mut left = vec![Dd::ZERO; 2 * t + 3];
            for i in 0..a.len() {
                right[i + 2] = a[i] + b[i];
                left[i] = a[i] - b[i];
            }
            if (t + 1) % 2 == 0 {
                right.iter_mut().chain(left.iter_mut()).for_each(|v| *v = v.scale(0.5));
            }
            *a = right;
            *b = left;
        }
        out.push(block_moments(&amps, t + 1));
    }
    out
}

fn block_moments(amps: &[[Vec<Dd>; 2]; 2], t: usize) -> MomentBlock {
    let odd = if t % 2 == 1 { 0.5 } else { 1.0 };
    let mut block = [[[Dd::ZERO; 3]; 2]; 2];
    for m in 0..2 {
        for n in 0..2 {
            for (i, a) in amps[m][n].iter().enumerate() {
                if *a == Dd::ZERO {
                    continue;
                }
                let w = (*a * *a).scale(odd);
                let x = Dd::from(i as i64 - t as i64);
                block[m][n][0] += w;
                block[m][n][1] += w * x;
                block[m][n][2] += w * x * x;
            }
        }
    }
    block
}
