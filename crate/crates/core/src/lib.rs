//! Decoherent Hadamard walks on the integer line: exact distributions,
//! Monte Carlo trajectories, closed-form generating functions and the
//! numerical machinery that ties them together.

pub mod analytic;
pub mod ddouble;
pub mod decoherent;
pub mod error;
pub mod pure_walk;
pub mod series;
pub mod stats;
pub mod table;
pub mod trajectory;

pub use decoherent::{position_distribution, renewal_evolve, WalkParams};
pub use error::{Result, WalkError};
pub use pure_walk::{Coin, InitialState};
pub use table::{PositionDistribution, ProbabilityTable};

pub use num_complex;
