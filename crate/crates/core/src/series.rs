//! Taylor-coefficient extraction on a circle, truncated `Q` matrices and
//! the matrix identity `P = -(q/p) I + (1/p)(I - Q)^{-1}`.

use std::f64::consts::TAU;

use nalgebra::Matrix2;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::decoherent::{renewal_evolve, WalkParams};
use crate::error::{Result, WalkError};
use crate::pure_walk::{pure_char, pure_probability_table, Coin};

/// Largest admitted `r^{-t} * eps * N` in [`taylor_coeffs`].
pub const MAX_AMPLIFICATION: f64 = 1e-8;
/// Required accuracy of truncated power series.
pub const TAIL_TOLERANCE: f64 = 1e-12;

/// Circle `|z| = radius` sampled at `nodes` equispaced points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec {
    radius: f64,
    nodes: usize,
}

impl Default for ContourSpec {
    fn default() -> Self {
        Self {
            radius: 0.95,
            nodes: 1 << 14,
        }
    }
}

impl ContourSpec {
    pub fn new(radius: f64, nodes: usize) -> Result<Self> {
        if !(radius > 0.0 && radius < 1.0) {
            return Err(WalkError::InvalidContour(format!("radius {radius} not in (0, 1)")));
        }
        if !nodes.is_power_of_two() {
            return Err(WalkError::InvalidContour(format!("{nodes} nodes is not a power of two")));
        }
        let spec = Self { radius, nodes };
        let alias = spec.aliasing_bound();
        if !(alias < 1e-14) {
            return Err(WalkError::InvalidContour(format!(
                "aliasing bound {alias:e} for radius {radius} and {nodes} nodes exceeds 1e-14"
            )));
        }
        Ok(spec)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    /// `r^N / (1 - r^N)`: worst-case contamination of a coefficient by
    /// coefficients `N` places further out, for series bounded by 1.
    pub fn aliasing_bound(&self) -> f64 {
        let rn = self.radius.powf(self.nodes as f64);
        rn / (1.0 - rn)
    }

    /// Roundoff amplification bound for coefficient `t`.
    pub fn amplification(&self, t: usize) -> f64 {
        self.radius.powf(-(t as f64)) * f64::EPSILON * self.nodes as f64
    }

    /// Largest `t` whose amplification stays within [`MAX_AMPLIFICATION`].
    pub fn max_order(&self) -> usize {
        let mut t = 0;
        while self.amplification(t + 1) <= MAX_AMPLIFICATION {
            t += 1;
        }
        t
    }
}

/// `c_t = (1/N) sum_j f(r w^j) r^{-t} w^{-jt}`, `w = e^{2 pi i / N}`, for
/// `0 <= t <= t_max`.
pub fn taylor_coeffs<F>(f: F, contour: &ContourSpec, t_max: usize) -> Result<Vec<Complex64>>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    let amplification = contour.amplification(t_max);
    if amplification > MAX_AMPLIFICATION {
        return Err(WalkError::Amplification {
            t_max,
            amplification,
        });
    }
    let n = contour.nodes;
    let r = contour.radius;
    let twiddle: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(1.0, -TAU * j as f64 / n as f64))
        .collect();
    let values = (0..n)
        .into_par_iter()
        .map(|j| f(twiddle[(n - j) % n] * r))
        .collect::<Result<Vec<_>>>()?;
    let coeffs = (0..=t_max)
        .map(|t| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, v) in values.iter().enumerate() {
                acc += v * twiddle[(j * t) % n];
            }
            acc * (r.powi(-(t as i32)) / n as f64)
        })
        .collect();
    Ok(coeffs)
}

/// `sum_t c_t z^t` by Horner's rule.
pub fn resum(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

/// `Q(k, z)` summed to `truncation` terms; rows are the initial coin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QhatMatrix {
    pub k: f64,
    pub z: Complex64,
    pub entries: Matrix2<Complex64>,
    pub truncation: usize,
}

impl QhatMatrix {
    /// `max_m sum_n |Q_{m,n}|`.
    pub fn row_sum_norm(&self) -> f64 {
        (0..2)
            .map(|m| (0..2).map(|n| self.entries[(m, n)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `sum_{j=0}^{terms-1} Q^j`.
    pub fn neumann_partial(&self, terms: usize) -> Matrix2<Complex64> {
        let mut acc = Matrix2::zeros();
        let mut power = Matrix2::identity();
        for _ in 0..terms {
            acc += power;
            power *= self.entries;
        }
        acc
    }
}

/// Bound on the omitted tail `sum_{t >= T} p q^{t-1} |z|^t`.
pub fn qhat_tail_bound(params: &WalkParams, z: Complex64, truncation: usize) -> f64 {
    let (p, q, a) = (params.p(), params.q(), z.norm());
    if truncation == 0 {
        return f64::INFINITY;
    }
    p * q.powi(truncation as i32 - 1) * a.powi(truncation as i32) / (1.0 - q * a)
}

/// Smallest truncation meeting [`TAIL_TOLERANCE`] for both `Q` and the
/// probability series `sum_t P(t) z^t` (bounded by `|z|^{T+1}/(1-|z|)`).
pub fn truncation_for(params: &WalkParams, z: Complex64) -> Result<usize> {
    let a = z.norm();
    if params.q() * a >= 1.0 {
        return Err(WalkError::OutsideDisk(params.q() * a));
    }
    let mut t = 1;
    while qhat_tail_bound(params, z, t) >= TAIL_TOLERANCE
        || (a < 1.0 && prob_tail_bound(a, t) >= TAIL_TOLERANCE)
    {
        t += 1;
        if t > 1_000_000 {
            return Err(WalkError::InsufficientTruncation {
                t,
                bound: qhat_tail_bound(params, z, t),
            });
        }
    }
    Ok(t)
}

fn prob_tail_bound(a: f64, truncation: usize) -> f64 {
    a.powi(truncation as i32 + 1) / (1.0 - a)
}

pub fn qhat_truncated(k: f64, z: Complex64, params: &WalkParams, truncation: usize) -> Result<QhatMatrix> {
    if params.q() * z.norm() >= 1.0 {
        return Err(WalkError::OutsideDisk(params.q() * z.norm()));
    }
    let bound = qhat_tail_bound(params, z, truncation);
    if !(bound < TAIL_TOLERANCE) {
        return Err(WalkError::InsufficientTruncation {
            t: truncation,
            bound,
        });
    }
    let pure = pure_probability_table(truncation);
    let mut entries = Matrix2::zeros();
    let mut zt = Complex64::new(1.0, 0.0);
    for t in 1..=truncation {
        zt *= z;
        let w = params.weight(t);
        if w == 0.0 {
            break;
        }
        for m in Coin::ALL {
            for n in Coin::ALL {
                entries[(m.index(), n.index())] += pure_char(&pure, k, t, m, n)? * zt * w;
            }
        }
    }
    Ok(QhatMatrix {
        k,
        z,
        entries,
        truncation,
    })
}

/// `-(q/p) I + (1/p) (I - Q)^{-1}` with the 2x2 inverse written out.
pub fn decoherence_rhs(params: &WalkParams, qhat: &QhatMatrix) -> Result<Matrix2<Complex64>> {
    let a = Matrix2::identity() - qhat.entries;
    let det = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
    if det.norm() < crate::analytic::POLE_TOLERANCE {
        return Err(WalkError::PoleProximity(det.norm()));
    }
    let inv = Matrix2::new(a[(1, 1)], -a[(0, 1)], -a[(1, 0)], a[(0, 0)]) / det;
    let (p, q) = (params.p(), params.q());
    Ok(inv / Complex64::from(p) - Matrix2::identity() * Complex64::from(q / p))
}

/// `sum_{t <= T} hat P_{m,n}(k, t) z^t` from the renewal recursion.
pub fn probability_series(k: f64, z: Complex64, params: &WalkParams, truncation: usize) -> Result<Matrix2<Complex64>> {
    let table = renewal_evolve(params, truncation)?;
    let mut out = Matrix2::zeros();
    let mut zt = Complex64::new(1.0, 0.0);
    for t in 0..=truncation {
        for m in Coin::ALL {
            for n in Coin::ALL {
                out[(m.index(), n.index())] += table.char_fn(m, n, k, t)? * zt;
            }
        }
        zt *= z;
    }
    Ok(out)
}

/// Largest entrywise gap between the probability series and the
/// right-hand side built from the truncated `Q`.
pub fn decoherence_equation_residual(k: f64, z: Complex64, params: &WalkParams, truncation: usize) -> Result<f64> {
    if params.p() == 0.0 {
        return Err(WalkError::RequiresPositiveP {
            what: "decoherence_equation_residual",
            p: 0.0,
        });
    }
    if z.norm() >= 1.0 {
        return Err(WalkError::OutsideDisk(z.norm()));
    }
    let tail = prob_tail_bound(z.norm(), truncation);
    if !(tail < TAIL_TOLERANCE) {
        return Err(WalkError::InsufficientTruncation {
            t: truncation,
            bound: tail,
        });
    }
    let qhat = qhat_truncated(k, z, params, truncation)?;
    let rhs = decoherence_rhs(params, &qhat)?;
    let lhs = probability_series(k, z, params, truncation)?;
    Ok((lhs - rhs).iter().map(|v| v.norm()).fold(0.0, f64::max))
}
