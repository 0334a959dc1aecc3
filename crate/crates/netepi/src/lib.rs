//! Epidemics on configuration-model graphs with weighted transmission.
//!
//! The crate builds random graphs with a prescribed degree distribution,
//! attaches directed transmission weights to the edges, and provides three
//! complementary views of the resulting epidemic:
//!
//! * reproduction-number formulas for degree-dependent infectivity,
//!   including the homogeneous comparison laws ([`thresholds`]);
//! * vaccination analytics for the uniform, acquaintance, and
//!   weight-targeted strategies ([`vax`]), backed by order-statistic
//!   means of edge weights ([`ordstat`]);
//! * Monte Carlo epidemic simulation on generated graphs ([`sim`]).
//!
//! Everything downstream of a seed is deterministic, including parallel
//! ensemble runs.

pub mod config;
pub mod degree;
pub mod error;
pub mod netgen;
pub mod ordstat;
pub mod quad;
pub mod sim;
pub mod thresholds;
pub mod vax;
pub mod weight;

pub use degree::{sample_degrees, DegreeDist, DegreeSampler, SizeBiasedDist};
pub use error::{Error, Result};
pub use netgen::WeightedGraph;
pub use vax::{mix_seed, StrategyFamily, StrategySpec};
pub use weight::{WeightFunctionG, WeightModel};
