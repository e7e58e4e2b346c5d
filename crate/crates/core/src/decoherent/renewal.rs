//! Renewal recursion: condition on the first step at which the walk is
//! measured, after which it restarts from a basis state.

use super::WalkParams;
use crate::error::Result;
use crate::pure_walk::{pure_probability_table, Coin};
use crate::table::ProbabilityTable;

/// Rows compressed to the parity support, indexed `(x + t) / 2`.
type Rows = Vec<[[Vec<f64>; 2]; 2]>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenewalOptions {
    /// Collapse times whose weight `p q^{s-1}` falls below this are skipped.
    /// Zero keeps every term.
    pub weight_floor: f64,
}

impl Default for RenewalOptions {
    fn default() -> Self {
        Self {
            weight_floor: 1e-20,
        }
    }
}

pub fn renewal_evolve(params: &WalkParams, t_max: usize) -> Result<ProbabilityTable> {
    renewal_evolve_with(params, t_max, RenewalOptions::default())
}

/// `P_{m,n}(x,t)` for `0 <= t <= t_max` by the renewal recursion
///
/// `P(t) = sum_{s=1}^{t-1} p q^{s-1} (W(s) * P(t-s)) + q^{t-1} W(t)`,
///
/// where `*` convolves in position and contracts the intermediate coin.
/// At `p = 0` the pure table is returned.
pub fn renewal_evolve_with(
    params: &WalkParams,
    t_max: usize,
    options: RenewalOptions,
) -> Result<ProbabilityTable> {
    let pure = pure_probability_table(t_max);
    if params.p() == 0.0 {
        return Ok(pure);
    }
    let w = compress(&pure);
    let mut rows: Rows = Vec::with_capacity(t_max + 1);
    rows.push(w[0].clone());
    for t in 1..=t_max {
        let mut next: [[Vec<f64>; 2]; 2] = Default::default();
        for row in next.iter_mut().flatten() {
            *row = vec![0.0; t + 1];
        }
        for s in 1..t {
            let weight = params.weight(s);
            if weight == 0.0 || weight < options.weight_floor {
                // Weights are non-increasing in s.
                break;
            }
            let earlier = &rows[t - s];
            for m in Coin::ALL {
                for l in Coin::ALL {
                    let a = &earlier[m.index()][l.index()];
                    for n in Coin::ALL {
                        let b = &w[s][l.index()][n.index()];
                        convolve_into(&mut next[m.index()][n.index()], a, b, weight);
                    }
                }
            }
        }
        let survive = params.survival(t);
        if survive != 0.0 {
            for (out, src) in next.iter_mut().flatten().zip(w[t].iter().flatten()) {
                for (o, v) in out.iter_mut().zip(src) {
                    *o += survive * v;
                }
            }
        }
        rows.push(next);
    }
    Ok(expand(rows))
}

/// `out[i + j] += weight * a[i] * b[j]`, outer index ascending.
fn convolve_into(out: &mut [f64], a: &[f64], b: &[f64], weight: f64) {
    for (i, &av) in a.iter().enumerate() {
        let c = weight * av;
        if c == 0.0 {
            continue;
        }
        for (o, &bv) in out[i..i + b.len()].iter_mut().zip(b) {
            *o += c * bv;
        }
    }
}

fn compress(table: &ProbabilityTable) -> Rows {
    (0..=table.t_max())
        .map(|t| {
            let mut r: [[Vec<f64>; 2]; 2] = Default::default();
            for m in Coin::ALL {
                for n in Coin::ALL {
                    r[m.index()][n.index()] =
                        table.row(m, n, t).iter().step_by(2).copied().collect();
                }
            }
            r
        })
        .collect()
}

fn expand(rows: Rows) -> ProbabilityTable {
    let dense = rows
        .into_iter()
        .enumerate()
        .map(|(t, r)| {
            r.map(|pair| {
                pair.map(|c| {
                    let mut d = vec![0.0; 2 * t + 1];
                    for (j, v) in c.into_iter().enumerate() {
                        d[2 * j] = v;
                    }
                    d
                })
            })
        })
        .collect();
    ProbabilityTable::from_rows(dense)
}
