//! Subquadratic search for strong pairwise interactions, and an interaction
//! Lasso whose optimality checks are screened by that search.

mod clock;
pub mod error;
pub mod experiments;
pub mod lasso;
pub mod matrix;
pub mod oracle;
pub mod pairs;
pub mod params;
mod par;
pub mod projection;
pub mod rng;
pub mod search;
pub mod synth;

pub use error::{Result, XyzError};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub use matrix::{PackedMatrix, RealMatrix, RealVector, SignVector, Transform, WeightedSampler};
pub use pairs::{CandidatePairSet, InteractionHit, PairBlock, Sign};
pub use search::{xyz_search, Design, Response, SearchConfig, SearchMode, SearchReport};
