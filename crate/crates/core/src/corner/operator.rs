use ndarray::Array2;
use num_complex::Complex64;

use crate::discretize::{assemble, eig, DiscretizedOperator, Grid1D, ModeProblem};
use crate::error::{invalid, Error, Result};
use crate::modes::{ModeOperator, RadialPotential};
use crate::numerics::{dense, BandMatrix};
use crate::scaling::dilate_mode;
use crate::spectral::ScalingParameter;

use super::CornerModel;

/// Largest dense two-dimensional problem (n per axis ≤ 100).
pub const DENSE_LIMIT: usize = 10_000;

/// Largest band storage (entries) for the shift-and-invert path.
pub const BAND_LIMIT: usize = 20_000_000;

/// The square [0, L]² with the same second-order grid on both axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    pub axis: Grid1D,
}

impl Grid2D {
    pub fn new(length: f64, n_per_axis: usize) -> Result<Self> {
        Ok(Self {
            axis: Grid1D::fd2(length, n_per_axis)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolvePath {
    /// Kronecker sums when the coupling vanishes, dense otherwise.
    #[default]
    Auto,
    Dense,
    Kronecker,
}

/// A₁ ⊗ I + I ⊗ A₂ + μI + diag(W) in symmetrized coordinates, node (i₁, i₂)
/// at index i₁·n₂ + i₂.
#[derive(Debug, Clone, PartialEq)]
pub struct CornerOperator {
    pub mu: f64,
    pub theta: ScalingParameter,
    /// Along u₁, carrying the potential of Z₂.
    pub a1: DiscretizedOperator,
    /// Along u₂, carrying the potential of Z₁.
    pub a2: DiscretizedOperator,
    /// Cell averages of the coupling; None when it vanishes.
    pub coupling: Option<Vec<f64>>,
}

fn axis_operator(
    v: &RadialPotential,
    theta: ScalingParameter,
    radius: f64,
    grid: &Grid1D,
) -> Result<DiscretizedOperator> {
    let scaled = dilate_mode(&ModeOperator::cylindrical(0.0, v.clone()), theta, radius)?;
    let problem = ModeProblem::scaled(&scaled);
    assemble(&problem, &grid.layout(&problem.breakpoints()), grid.scheme)
}

/// Dual cells [x_{j−1/2}, x_{j+1/2}] of the interior nodes.
fn cells(op: &DiscretizedOperator) -> Vec<(f64, f64)> {
    let x = &op.nodes;
    let n = x.len();
    (0..n)
        .map(|j| {
            let left = if j == 0 { 0.0 } else { x[j - 1] };
            let right = if j + 1 == n {
                op.layout.length()
            } else {
                x[j + 1]
            };
            (0.5 * (left + x[j]), 0.5 * (x[j] + right))
        })
        .collect()
}

/// The scaled two-dimensional operator on the transverse mode μ.
pub fn corner_discretize(
    model: &CornerModel,
    mu: f64,
    theta: ScalingParameter,
    grid: &Grid2D,
) -> Result<CornerOperator> {
    if grid.axis.length <= model.radius {
        return Err(Error::GridTooShort(format!(
            "L = {} must exceed R0 = {}",
            grid.axis.length, model.radius
        )));
    }
    let a1 = axis_operator(&model.z2, theta, model.radius, &grid.axis)?;
    let a2 = axis_operator(&model.z1, theta, model.radius, &grid.axis)?;
    let coupling = if model.coupling.is_zero() {
        None
    } else {
        let (c1, c2) = (cells(&a1), cells(&a2));
        Some(
            c1.iter()
                .flat_map(|&p| c2.iter().map(move |&q| (p, q)))
                .map(|(p, q)| model.coupling.cell_value(p, q))
                .collect(),
        )
    };
    Ok(CornerOperator {
        mu,
        theta,
        a1,
        a2,
        coupling,
    })
}

impl CornerOperator {
    pub fn dim(&self) -> usize {
        self.a1.dim() * self.a2.dim()
    }

    pub fn is_separable(&self) -> bool {
        self.coupling.is_none()
    }

    pub fn to_dense(&self) -> Result<Array2<Complex64>> {
        let n = self.dim();
        if n > DENSE_LIMIT {
            return Err(Error::Unsupported(format!(
                "dense corner problem of size {n} exceeds {DENSE_LIMIT}; use the Kronecker path"
            )));
        }
        let (n1, n2) = (self.a1.dim(), self.a2.dim());
        let (d1, d2) = (self.a1.to_dense(), self.a2.to_dense());
        let mut m = Array2::<Complex64>::zeros((n, n));
        for i in 0..n1 {
            for j in 0..n2 {
                let r = i * n2 + j;
                for k in 0..n1 {
                    let v = d1[[i, k]];
                    if v != Complex64::new(0.0, 0.0) {
                        m[[r, k * n2 + j]] += v;
                    }
                }
                for l in 0..n2 {
                    let v = d2[[j, l]];
                    if v != Complex64::new(0.0, 0.0) {
                        m[[r, i * n2 + l]] += v;
                    }
                }
                m[[r, r]] += self.mu + self.coupling.as_ref().map_or(0.0, |w| w[r]);
            }
        }
        Ok(m)
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let (n1, n2) = (self.a1.dim(), self.a2.dim());
        let mut y = vec![Complex64::new(0.0, 0.0); n1 * n2];
        // I ⊗ A₂ on each row block.
        for i in 0..n1 {
            let row = self.a2.matvec(&x[i * n2..(i + 1) * n2]);
            y[i * n2..(i + 1) * n2].copy_from_slice(&row);
        }
        // A₁ ⊗ I on each column.
        let mut col = vec![Complex64::new(0.0, 0.0); n1];
        for j in 0..n2 {
            for i in 0..n1 {
                col[i] = x[i * n2 + j];
            }
            for (i, v) in self.a1.matvec(&col).into_iter().enumerate() {
                y[i * n2 + j] += v;
            }
        }
        for (r, v) in y.iter_mut().enumerate() {
            *v += (self.mu + self.coupling.as_ref().map_or(0.0, |w| w[r])) * x[r];
        }
        y
    }

    /// Row-major band form; the half-bandwidth is n₂ times that of the u₁ axis.
    pub fn band_matrix(&self) -> Result<BandMatrix> {
        let (n1, n2) = (self.a1.dim(), self.a2.dim());
        let k = self.a1.bandwidth().max(1) * n2;
        let n = n1 * n2;
        if n.saturating_mul(3 * k + 1) > BAND_LIMIT {
            return Err(Error::Unsupported(format!(
                "band storage for size {n} with half-bandwidth {k} is too large"
            )));
        }
        let mut m = BandMatrix::zeros(n, k, k);
        for (d, band) in self.a1.bands.iter().enumerate() {
            for (i, &v) in band.iter().enumerate() {
                for j in 0..n2 {
                    let (r, c) = (i * n2 + j, (i + d) * n2 + j);
                    m.add(r, c, v);
                    if d > 0 {
                        m.add(c, r, v);
                    }
                }
            }
        }
        for i in 0..n1 {
            for (d, band) in self.a2.bands.iter().enumerate() {
                for (j, &v) in band.iter().enumerate() {
                    let (r, c) = (i * n2 + j, i * n2 + j + d);
                    m.add(r, c, v);
                    if d > 0 {
                        m.add(c, r, v);
                    }
                }
            }
        }
        for r in 0..n {
            m.add(
                r,
                r,
                Complex64::new(self.mu + self.coupling.as_ref().map_or(0.0, |w| w[r]), 0.0),
            );
        }
        Ok(m)
    }

    /// Eigenvalue nearest `guess` by shifted inverse iteration followed by
    /// Rayleigh-quotient steps (bilinear quotient, the operator being complex
    /// symmetric). Returns the value and its relative residual.
    pub fn eigenvalue_near(&self, guess: Complex64) -> Result<(Complex64, f64)> {
        let m = self.band_matrix()?;
        let scale = m.norm_inf().max(1.0);
        let n = m.dim();
        let normalize = |v: &mut Vec<Complex64>| {
            let s = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if s > 0.0 && s.is_finite() {
                v.iter_mut().for_each(|z| *z /= s);
            }
        };
        let finite = |v: &[Complex64]| v.iter().all(|z| z.re.is_finite() && z.im.is_finite());
        let quotient = |v: &[Complex64]| {
            let av = m.matvec(v);
            let num: Complex64 = v.iter().zip(&av).map(|(a, b)| a * b).sum();
            let den: Complex64 = v.iter().map(|a| a * a).sum();
            num / den
        };
        let lu = m
            .factor(guess)
            .or_else(|_| m.factor(guess + Complex64::new(1e-12 * scale, 1e-12 * scale)))?;
        let mut v: Vec<Complex64> = (0..n)
            .map(|j| {
                Complex64::new(1.0, 0.0) + Complex64::from_polar(0.5, 0.61803398875 * j as f64)
            })
            .collect();
        for _ in 0..4 {
            lu.solve_in_place(&mut v);
            if !finite(&v) {
                return Err(Error::Singular(guess));
            }
            normalize(&mut v);
        }
        let mut z = quotient(&v);
        for _ in 0..6 {
            let Ok(lu) = m.factor(z) else { break };
            let mut w = v.clone();
            lu.solve_in_place(&mut w);
            if !finite(&w) {
                break;
            }
            normalize(&mut w);
            let znew = quotient(&w);
            let done = (znew - z).norm() <= 1e-14 * (1.0 + z.norm());
            v = w;
            z = znew;
            if done {
                break;
            }
        }
        let av = m.matvec(&v);
        let r = av
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - z * b).norm_sqr())
            .sum::<f64>()
            .sqrt()
            / scale;
        Ok((z, r))
    }

    /// Spectra of the two axis operators.
    pub fn axis_eigenvalues(&self) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        let e1 = eig(&self.a1)?.into_iter().map(|p| p.value).collect();
        let e2 = eig(&self.a2)?.into_iter().map(|p| p.value).collect();
        Ok((e1, e2))
    }

    pub fn eigenvalues(&self, path: SolvePath) -> Result<Vec<Complex64>> {
        let kronecker = match path {
            SolvePath::Auto => self.is_separable(),
            SolvePath::Kronecker if !self.is_separable() => {
                return Err(invalid("the Kronecker path needs a vanishing coupling"));
            }
            SolvePath::Kronecker => true,
            SolvePath::Dense => false,
        };
        if kronecker {
            let (e1, e2) = self.axis_eigenvalues()?;
            return Ok(e1
                .iter()
                .flat_map(|a| e2.iter().map(move |b| a + b + self.mu))
                .collect());
        }
        let m = self.to_dense()?;
        if m.iter().all(|z| z.im == 0.0) {
            let w = dense::eigvalsh(&m.mapv(|z| z.re))?;
            return Ok(w.into_iter().map(|x| Complex64::new(x, 0.0)).collect());
        }
        dense::eigvals(&m)
    }
}
