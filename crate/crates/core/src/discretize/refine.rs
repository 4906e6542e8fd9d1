use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::richardson;

use super::eig::refine_eigenvalue;
use super::grid::{NodeLayout, Scheme};
use super::operator::{assemble, ModeProblem};

/// An eigenvalue tracked over nested grids and extrapolated in the step.
#[derive(Debug, Clone, PartialEq)]
pub struct RefinedEigenvalue {
    pub value: Complex64,
    /// Values on the base grid and each refinement.
    pub levels: Vec<Complex64>,
    /// Difference between the final and the next-to-final extrapolant.
    pub error_estimate: f64,
}

/// Follow the eigenvalue near `base_value` (already an eigenvalue on `layout`)
/// through `extra_levels` halvings of every segment and extrapolate.
pub fn refine_richardson(
    problem: &ModeProblem,
    layout: &NodeLayout,
    scheme: Scheme,
    base_value: Complex64,
    extra_levels: usize,
) -> Result<RefinedEigenvalue> {
    let order = match scheme {
        Scheme::Fd2 => 2,
        Scheme::Fd4 => 4,
    };
    let mut levels = vec![base_value];
    let mut lay = layout.clone();
    for k in 0..extra_levels {
        lay = lay.refine();
        let guess = if k == 0 {
            base_value
        } else {
            let n = levels.len();
            levels[n - 1] + (levels[n - 1] - levels[n - 2]) / (2f64.powi(order) - 1.0)
        };
        let op = assemble(problem, &lay, scheme)?;
        let (z, _) = refine_eigenvalue(&op, guess)?;
        let drift = (z - levels[levels.len() - 1]).norm();
        let prev_drift = if levels.len() >= 2 {
            (levels[levels.len() - 1] - levels[levels.len() - 2]).norm()
        } else {
            0.0
        };
        if drift > 0.05 * (1.0 + z.norm())
            || (levels.len() >= 2 && drift > 2.0 * prev_drift + 1e-9 * (1.0 + z.norm()))
        {
            return Err(Error::NoConvergence(format!(
                "eigenvalue near {base_value} is not stable under refinement"
            )));
        }
        levels.push(z);
    }
    let (value, error_estimate) = match (order, levels.len()) {
        (_, 1) => (levels[0], f64::NAN),
        (2, n) => {
            let full = richardson(&levels);
            let partial = richardson(&levels[n - 2..]);
            (full, (full - partial).norm())
        }
        (_, n) => {
            let f = 2f64.powi(order);
            let a = levels[n - 1] + (levels[n - 1] - levels[n - 2]) / (f - 1.0);
            (a, (a - levels[n - 1]).norm())
        }
    };
    Ok(RefinedEigenvalue {
        value,
        levels,
        error_estimate,
    })
}
