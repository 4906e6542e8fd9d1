//! Finite-difference discretization of scaled mode operators, eigenvalue
//! extraction and resonance identification.

mod bound;
mod eig;
mod grid;
mod operator;
mod refine;
mod resonances;

pub use bound::{bound_states, BoundState};
pub use eig::{
    eig, eig_dense, eigenvector, refine_eigenvalue, residual, EigenPair, RESIDUAL_BOUND,
};
pub use grid::{Grid1D, NodeLayout, Scheme, MAX_STEP, MIN_POINTS};
pub use operator::{assemble, discretize, discretize_mode, DiscretizedOperator, ModeProblem};
pub use refine::{refine_richardson, RefinedEigenvalue};
pub use resonances::{
    classify, cluster_across_sweep, default_theta_sweep, find_resonances, mode_candidates,
    Candidate, Cluster, Resonance, ResonanceConfig, ResonanceKind, ResonanceSet, DEFAULT_THETA,
};
