//! Exact distributions of the walk under per-step projective measurement.
//!
//! Three independent constructions live here: the renewal recursion over
//! pure-walk segments, forward evolution of the density operator, and a
//! literal enumeration of measurement histories for very small `t`.

mod moments;
mod oracle;
mod renewal;
mod superop;

pub use moments::{exact_moments_dd, longterm_variance_dd, DdMoments};
pub use oracle::{path_sum_coin_probs, path_sum_oracle, ORACLE_MAX_T};
pub use renewal::{renewal_evolve, renewal_evolve_with, RenewalOptions};
pub use superop::{superoperator_evolve, superoperator_evolve_with, DensityStepper, DEFAULT_MEMORY_BUDGET};

use crate::error::Result;
use crate::pure_walk::{check_probability, Coin, InitialState};
use crate::table::{PositionDistribution, ProbabilityTable};

/// Measurement probability and starting state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkParams {
    p: f64,
    q: f64,
    initial: InitialState,
}

impl WalkParams {
    pub fn new(p: f64, initial: InitialState) -> Result<Self> {
        check_probability(p)?;
        Ok(Self {
            p,
            q: 1.0 - p,
            initial,
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn initial(&self) -> InitialState {
        self.initial
    }

    pub fn with_initial(self, initial: InitialState) -> Self {
        Self { initial, ..self }
    }

    /// Renewal weight `p q^{s-1}` of a first collapse after `s` steps.
    pub fn weight(&self, s: usize) -> f64 {
        debug_assert!(s >= 1);
        self.p * self.q.powi(s as i32 - 1)
    }

    /// Probability `q^{t-1}` that none of the first `t - 1` steps measured.
    ///
    /// The last step is excluded: a measurement at the final step does not
    /// change the position law.
    pub fn survival(&self, t: usize) -> f64 {
        if t == 0 {
            1.0
        } else {
            self.q.powi(t as i32 - 1)
        }
    }
}

/// Law of the position at time `t` for the start encoded in `params`.
///
/// The symmetric start is the equal mixture of the two coin starts.
pub fn position_distribution(
    table: &ProbabilityTable,
    params: &WalkParams,
    t: usize,
) -> Result<PositionDistribution> {
    let weights = params.initial.coin_weights();
    let mut probs = vec![0.0; 2 * t + 1];
    for m in Coin::ALL {
        let w = weights[m.index()];
        if w == 0.0 {
            continue;
        }
        for (acc, v) in probs.iter_mut().zip(table.position_probs(m, t)?) {
            *acc += w * v;
        }
    }
    PositionDistribution::new(t, probs)
}

/// `(mean, variance)` of a position law.
pub fn moments(dist: &PositionDistribution) -> (f64, f64) {
    (dist.mean(), dist.variance())
}
