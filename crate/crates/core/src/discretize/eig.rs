use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{dense, BandLu, TridiagLu};

use super::operator::DiscretizedOperator;

/// Certified residual bound for reported eigenpairs.
pub const RESIDUAL_BOUND: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenPair {
    pub value: Complex64,
    /// ‖Av − zv‖ / (‖A‖·‖v‖), evaluated after the fact.
    pub residual: f64,
    pub converged: bool,
}

enum Factor {
    Tri(TridiagLu),
    Band(BandLu),
}

impl Factor {
    fn new(op: &DiscretizedOperator, shift: Complex64) -> Result<Self> {
        match op.tridiagonal() {
            Some(t) => Ok(Factor::Tri(TridiagLu::factor(&t, shift)?)),
            None => Ok(Factor::Band(op.band_matrix().factor(shift)?)),
        }
    }

    fn solve(&self, b: &mut [Complex64]) {
        match self {
            Factor::Tri(f) => f.solve_in_place(b),
            Factor::Band(f) => f.solve_in_place(b),
        }
    }
}

fn start_vector(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|j| Complex64::new(1.0, 0.0) + Complex64::from_polar(0.5, 0.61803398875 * j as f64))
        .collect()
}

fn normalize(v: &mut [Complex64]) {
    let s = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if s > 0.0 && s.is_finite() {
        v.iter_mut().for_each(|z| *z /= s);
    }
}

/// Relative residual of a candidate pair.
pub fn residual(op: &DiscretizedOperator, z: Complex64, v: &[Complex64]) -> f64 {
    let av = op.matvec(v);
    let r = av
        .iter()
        .zip(v)
        .map(|(a, x)| (a - z * x).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let vn = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    r / (op.norm_inf() * vn)
}

/// Eigenvector for an (approximate) eigenvalue by shifted inverse iteration.
pub fn eigenvector(op: &DiscretizedOperator, z: Complex64) -> Result<Vec<Complex64>> {
    let scale = op.norm_inf().max(1.0);
    let mut shift = z;
    let mut factor = Factor::new(op, shift);
    if factor.is_err() {
        shift = z + Complex64::new(1e-14 * scale, 1e-14 * scale);
        factor = Factor::new(op, shift);
    }
    let factor = factor?;
    let mut v = start_vector(op.dim());
    for _ in 0..3 {
        factor.solve(&mut v);
        if v.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
            return Err(Error::Singular(z));
        }
        normalize(&mut v);
    }
    Ok(v)
}

/// All eigenvalues with post-hoc residual certificates, sorted by real then imaginary part.
pub fn eig(op: &DiscretizedOperator) -> Result<Vec<EigenPair>> {
    let vals = dense::eigvals(&op.to_dense())?;
    let mut out: Vec<EigenPair> = vals
        .into_iter()
        .map(|z| match eigenvector(op, z) {
            Ok(v) => {
                let r = residual(op, z, &v);
                EigenPair {
                    value: z,
                    residual: r,
                    converged: r <= RESIDUAL_BOUND,
                }
            }
            Err(_) => EigenPair {
                value: z,
                residual: f64::INFINITY,
                converged: false,
            },
        })
        .collect();
    out.sort_by(|a, b| {
        a.value
            .re
            .total_cmp(&b.value.re)
            .then(a.value.im.total_cmp(&b.value.im))
    });
    Ok(out)
}

/// Eigenvalues and residuals of an arbitrary dense matrix.
pub fn eig_dense(a: &Array2<Complex64>) -> Result<Vec<EigenPair>> {
    let (vals, vecs) = dense::eig(a)?;
    let norm = dense::norm_inf(a).max(f64::MIN_POSITIVE);
    let mut out: Vec<EigenPair> = vals
        .iter()
        .enumerate()
        .map(|(k, &z)| {
            let v = vecs.column(k);
            let av = a.dot(&v);
            let r = av
                .iter()
                .zip(v.iter())
                .map(|(x, y)| (x - z * y).norm_sqr())
                .sum::<f64>()
                .sqrt();
            let vn = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            let res = r / (norm * vn);
            EigenPair {
                value: z,
                residual: res,
                converged: res <= RESIDUAL_BOUND,
            }
        })
        .collect();
    out.sort_by(|a, b| {
        a.value
            .re
            .total_cmp(&b.value.re)
            .then(a.value.im.total_cmp(&b.value.im))
    });
    Ok(out)
}

/// Converge to the eigenvalue nearest `guess` by inverse iteration followed by
/// Rayleigh-quotient iteration with the bilinear (complex symmetric) quotient.
pub fn refine_eigenvalue(
    op: &DiscretizedOperator,
    guess: Complex64,
) -> Result<(Complex64, Vec<Complex64>)> {
    let mut v = eigenvector(op, guess)?;
    let quotient = |v: &[Complex64]| {
        let av = op.matvec(v);
        let num: Complex64 = v.iter().zip(&av).map(|(a, b)| a * b).sum();
        let den: Complex64 = v.iter().map(|a| a * a).sum();
        num / den
    };
    let mut z = quotient(&v);
    for _ in 0..6 {
        let f = match Factor::new(op, z) {
            Ok(f) => f,
            Err(_) => break,
        };
        let mut w = v.clone();
        f.solve(&mut w);
        if w.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
            break;
        }
        normalize(&mut w);
        let znew = quotient(&w);
        let done = (znew - z).norm() <= 1e-15 * (1.0 + z.norm());
        v = w;
        z = znew;
        if done {
            break;
        }
    }
    Ok((z, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_matrix() {
        let a = array![
            [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(0.0, 0.0), c(3.0, 0.0)]
        ];
        let e = eig_dense(&a).unwrap();
        let v: Vec<f64> = e.iter().map(|p| p.value.re).collect();
        assert_eq!(v, vec![1.0, 2.0, 3.0]);
        assert!(e.iter().all(|p| p.residual == 0.0 && p.converged));
    }

    #[test]
    fn rotation_matrix() {
        let a = array![[c(0.0, 0.0), c(1.0, 0.0)], [c(-1.0, 0.0), c(0.0, 0.0)]];
        let e = eig_dense(&a).unwrap();
        for target in [c(0.0, -1.0), c(0.0, 1.0)] {
            assert!(e.iter().any(|p| (p.value - target).norm() < 1e-14));
        }
        assert!(e.iter().all(|p| p.converged));
    }
}
