//! Lasso over all main effects and pairwise interactions,
//!
//! ```text
//! minimize  ‖Y - X̃β - W̃θ‖² / 2n + λ (‖β‖₁ + c ‖θ‖₁)
//! ```
//!
//! where `X̃` is the column-centred design and `W̃` holds the centred products
//! `X̃_j ∘ X̃_k`, `j ≤ k`. `W̃` is never formed: coordinates enter an active
//! set when they violate the KKT conditions, and violating interactions are
//! located with the interaction search.
//!
//! The search runs on the design with each row divided by its largest
//! absolute entry `ν_i` and the residual multiplied by `ν_i²`, so that under
//! the unbiased transform a pair's match probability is
//! `1/2 + r^T(X̃_j ∘ X̃_k) / (2‖r'‖₁)`. A correlation above `λ` is then a
//! strength above `1/2 + nλ / (2‖r'‖₁)`.

mod design;
mod kkt;
mod path;
mod solver;

pub use design::{interaction_column, CenteredDesign};
pub use kkt::{
    diagonal_correlations, exhaustive_pair_maximum, kkt_check_interactions, main_correlations,
    screening_parameters, strength_for_lambda, KktOutcome, KktScreen,
};
pub use path::{
    auto_lambda_grid, lasso_path, LambdaGrid, LassoPath, LassoPathConfig, MainCoef, PairCoef, SparseFit,
};
pub use solver::{active_set_solve, lasso_objective, RestrictedSolution, SolverParams};
