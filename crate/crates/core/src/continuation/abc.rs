//! Matrix elements ⟨R(λ)f, g⟩ continued through the scaled resolvent.

use num_complex::Complex64;

use crate::discretize::{assemble, Grid1D, ModeProblem};
use crate::error::{invalid, Error, Result};
use crate::modes::ModeOperator;
use crate::numerics::{richardson, TridiagLu};
use crate::scaling::dilate_mode;
use crate::spectral::ScalingParameter;

/// c·z^m·e^{−(z−a)²/2}: entire, so it follows any dilation of the contour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticTerm {
    pub coefficient: Complex64,
    pub power: u32,
    pub center: Complex64,
}

/// A finite sum of Gaussian-tail terms on one transverse mode.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AnalyticVector {
    pub terms: Vec<AnalyticTerm>,
}

impl AnalyticVector {
    pub fn term(coefficient: f64, power: u32, center: f64) -> Self {
        Self {
            terms: vec![AnalyticTerm {
                coefficient: Complex64::new(coefficient, 0.0),
                power,
                center: Complex64::new(center, 0.0),
            }],
        }
    }

    pub fn plus(mut self, other: Self) -> Self {
        self.terms.extend(other.terms);
        self
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|t| {
                t.coefficient * z.powu(t.power) * (-(z - t.center) * (z - t.center) * 0.5).exp()
            })
            .sum()
    }

    /// The entire function z ↦ conj(f(conj z)), which equals conj(f) on the real axis.
    pub fn reflected(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| AnalyticTerm {
                    coefficient: t.coefficient.conj(),
                    power: t.power,
                    center: t.center.conj(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixElementConfig {
    pub grid: Grid1D,
    pub scaling_radius: f64,
    /// Nested refinements for extrapolation in h².
    pub richardson_levels: usize,
}

impl MatrixElementConfig {
    pub fn new(grid: Grid1D, scaling_radius: f64) -> Self {
        Self {
            grid,
            scaling_radius,
            richardson_levels: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixElement {
    pub lambda: Complex64,
    pub value: Complex64,
    pub error_estimate: f64,
}

/// ⟨R(λ,θ)U_θf, U_θ̄g⟩ for each λ on the path: the scaled resolvent applied to
/// the dilated vectors. For λ with Re λ < 0 this is ⟨R(λ)f, g⟩ for every
/// admissible θ; elsewhere it is the continuation.
pub fn continue_matrix_element(
    mode: &ModeOperator,
    f: &AnalyticVector,
    g: &AnalyticVector,
    path: &[Complex64],
    theta: ScalingParameter,
    cfg: &MatrixElementConfig,
) -> Result<Vec<MatrixElement>> {
    if path.is_empty() {
        return Err(Error::Empty("lambda path"));
    }
    if cfg.grid.length <= cfg.scaling_radius {
        return Err(Error::GridTooShort(format!(
            "L = {} must exceed R0 = {}",
            cfg.grid.length, cfg.scaling_radius
        )));
    }
    let scaled = dilate_mode(mode, theta, cfg.scaling_radius)?;
    let problem = ModeProblem::scaled(&scaled);
    let mut layout = cfg.grid.layout(&problem.breakpoints());
    let gr = g.reflected();
    let mut per_level: Vec<Vec<Complex64>> = Vec::new();
    for k in 0..=cfg.richardson_levels {
        if k > 0 {
            layout = layout.refine();
        }
        let op = assemble(&problem, &layout, cfg.grid.scheme)?;
        let t = op
            .tridiagonal()
            .ok_or_else(|| invalid("matrix elements need the second-order scheme"))?;
        let fz: Vec<Complex64> = op.contour.iter().map(|&z| f.eval(z)).collect();
        let gz: Vec<Complex64> = op.contour.iter().map(|&z| gr.eval(z)).collect();
        let x = op.to_symmetric_coords(&fz);
        let y = op.to_symmetric_coords(&gz);
        let scale = op.norm_inf();
        let mut vals = Vec::with_capacity(path.len());
        for &lambda in path {
            let lu = TridiagLu::factor(&t, lambda)?;
            if lu.min_pivot() <= 1e-13 * scale {
                return Err(Error::Singular(lambda));
            }
            let sol = lu.solve(&x);
            vals.push(y.iter().zip(&sol).map(|(a, b)| a * b).sum());
        }
        per_level.push(vals);
    }
    Ok((0..path.len())
        .map(|p| {
            let levels: Vec<Complex64> = per_level.iter().map(|l| l[p]).collect();
            let value = richardson(&levels);
            let error_estimate = if levels.len() >= 2 {
                (value - richardson(&levels[levels.len() - 2..])).norm()
            } else {
                f64::NAN
            };
            MatrixElement {
                lambda: path[p],
                value,
                error_estimate,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflection_conjugates_on_real_axis() {
        let f = AnalyticVector {
            terms: vec![AnalyticTerm {
                coefficient: Complex64::new(1.0, 2.0),
                power: 2,
                center: Complex64::new(0.5, 0.3),
            }],
        };
        let x = Complex64::new(1.3, 0.0);
        assert!((f.reflected().eval(x) - f.eval(x).conj()).norm() < 1e-15);
    }

    #[test]
    fn unitary_scaling_leaves_element_unchanged() {
        let mode = ModeOperator::free(0.0);
        let f = AnalyticVector::term(1.0, 1, 0.0);
        let g = AnalyticVector::term(1.0, 2, 0.5);
        let cfg = MatrixElementConfig::new(Grid1D::fd2(12.0, 299).unwrap(), 2.0);
        let path = [Complex64::new(-2.0, 0.0)];
        let a = continue_matrix_element(
            &mode,
            &f,
            &g,
            &path,
            ScalingParameter::unitary(0.0).unwrap(),
            &cfg,
        )
        .unwrap();
        let b = continue_matrix_element(
            &mode,
            &f,
            &g,
            &path,
            ScalingParameter::unitary(0.3).unwrap(),
            &cfg,
        )
        .unwrap();
        assert!(
            (a[0].value - b[0].value).norm() < 1e-7,
            "{:?} {:?}",
            a[0],
            b[0]
        );
    }
}
