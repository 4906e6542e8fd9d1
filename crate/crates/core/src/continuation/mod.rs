//! Continuation of the resolvent across thresholds: end kernels, the glued
//! parametrix and its residual, pole search, and scaled matrix elements.

mod abc;
mod cutoff;
mod kernel;
mod parametrix;
mod poles;
mod weighted;

pub use abc::{
    continue_matrix_element, AnalyticTerm, AnalyticVector, MatrixElement, MatrixElementConfig,
};
pub use cutoff::{cutoff_eval, rho, sample as sample_cutoff, Cutoff, ModelPoint};
pub use kernel::{free_mode_kernel, LatticeKernel};
pub use parametrix::{
    assemble_parametrix, decay_ratio, residual_g, CoreModel, KernelBlock, KernelMatrix,
    ModeParametrix, Parametrix, ParametrixGrid, DOUBLE_GAP,
};
pub use poles::{
    pole_search, Pole, PoleSearchConfig, PoleSearchResult, SearchRect, THRESHOLD_MARGIN,
};
pub use weighted::{weighted_norm_sq, WeightedSpaceParam, TAIL_FRACTION};
