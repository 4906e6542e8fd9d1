use crate::error::{invalid, Result};
use crate::modes::ModeOperator;
use crate::numerics::richardson;

use super::grid::{Grid1D, Scheme};
use super::operator::{assemble, ModeProblem};

#[derive(Debug, Clone, PartialEq)]
pub struct BoundState {
    pub index: usize,
    /// Eigenvalue on the base grid.
    pub value: f64,
    /// Extrapolated over nested refinements.
    pub refined: f64,
    pub error_estimate: f64,
}

/// Eigenvalues below the mode threshold of the unscaled truncated operator
/// (θ = 0, real symmetric), refined over `extra_levels` nested grids.
pub fn bound_states(
    op: &ModeOperator,
    grid: &Grid1D,
    extra_levels: usize,
) -> Result<Vec<BoundState>> {
    let p = ModeProblem::plain(op);
    let mut layout = grid.layout(&p.breakpoints());
    let mut per_level: Vec<Vec<f64>> = Vec::new();
    for k in 0..=extra_levels {
        if k > 0 {
            layout = layout.refine();
        }
        let d = assemble(&p, &layout, grid.scheme)?;
        let t = d
            .real_symmetric()
            .ok_or_else(|| invalid("unscaled operator is not real symmetric"))?;
        per_level.push(t.eigenvalues_below(op.mu));
    }
    let count = per_level.iter().map(Vec::len).min().unwrap_or(0);
    Ok((0..count)
        .map(|i| {
            let vals: Vec<f64> = per_level.iter().map(|l| l[i]).collect();
            let (refined, error_estimate) = extrapolate(&vals, grid.scheme);
            BoundState {
                index: i,
                value: vals[0],
                refined,
                error_estimate,
            }
        })
        .collect())
}

fn extrapolate(vals: &[f64], scheme: Scheme) -> (f64, f64) {
    let n = vals.len();
    match (scheme, n) {
        (_, 1) => (vals[0], f64::NAN),
        (Scheme::Fd2, 2) => {
            let r = richardson(vals);
            (r, (r - vals[1]).abs())
        }
        (Scheme::Fd2, _) => {
            let r = richardson(vals);
            (r, (r - richardson(&vals[n - 2..])).abs())
        }
        (Scheme::Fd4, _) => {
            let r = vals[n - 1] + (vals[n - 1] - vals[n - 2]) / 15.0;
            (r, (r - vals[n - 1]).abs())
        }
    }
}
