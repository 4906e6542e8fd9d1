//! Dirichlet half-line Green kernels of −d²/du² − Λ².

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// (i/2Λ)(e^{iΛ|u−v|} − e^{iΛ(u+v)}). Entire in Λ away from the threshold,
/// which carries the kernel across sheets.
pub fn free_mode_kernel(lambda_i: Complex64, u: f64, v: f64) -> Result<Complex64> {
    if lambda_i == Complex64::new(0.0, 0.0) {
        return Err(Error::BranchPoint {
            lambda: lambda_i,
            threshold: 0.0,
        });
    }
    if u < 0.0 || v < 0.0 {
        return Err(invalid("kernel arguments must be non-negative"));
    }
    Ok(I / (2.0 * lambda_i)
        * ((I * lambda_i * (u - v).abs()).exp() - (I * lambda_i * (u + v)).exp()))
}

/// Lattice analogue on nodes s = kh, k ≥ 1: the exact inverse of the
/// three-point Dirichlet Laplacian minus Λ² on the half-lattice.
#[derive(Debug, Clone, Copy)]
pub struct LatticeKernel {
    kappa: Complex64,
    amplitude: Complex64,
    step: f64,
}

impl LatticeKernel {
    /// `lambda_i` is the branch value; its lattice wavenumber κ solves
    /// (2/h)² sin²(κh/2) = Λ² continuously from κ ≈ Λ.
    pub fn new(lambda_i: Complex64, step: f64) -> Result<Self> {
        if lambda_i.norm() == 0.0 {
            return Err(Error::BranchPoint {
                lambda: lambda_i,
                threshold: 0.0,
            });
        }
        let kappa = (lambda_i * step * 0.5).asin() * (2.0 / step);
        let sin = (kappa * step).sin();
        if sin.norm() < 1e-14 {
            return Err(Error::Singular(lambda_i));
        }
        // Matrix entries include the quadrature weight h.
        Ok(Self {
            kappa,
            amplitude: I * step * step / (2.0 * sin),
            step,
        })
    }

    pub fn kappa(&self) -> Complex64 {
        self.kappa
    }

    /// Matrix entry between lattice indices i, j ≥ 0 (index 0 is the Dirichlet node).
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        if i == 0 || j == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let d = i.abs_diff(j) as f64 * self.step;
        let s = (i + j) as f64 * self.step;
        self.amplitude * ((I * self.kappa * d).exp() - (I * self.kappa * s).exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn closed_form_value() {
        let k = free_mode_kernel(c(0.0, 1.0), 1.0, 1.0).unwrap();
        assert!((k - c((1.0 - (-2.0f64).exp()) / 2.0, 0.0)).norm() < 1e-15);
        assert_eq!(
            free_mode_kernel(c(0.7, -0.2), 0.0, 3.0).unwrap(),
            c(0.0, 0.0)
        );
        assert!(free_mode_kernel(c(0.0, 0.0), 1.0, 1.0).is_err());
    }

    #[test]
    fn lattice_kernel_inverts_lattice_operator() {
        let h = 0.05;
        let lam = c(0.8, 0.6);
        let k = LatticeKernel::new(lam, h).unwrap();
        let n = 400;
        let j = 37;
        for i in 1..n {
            let lap = (2.0 * k.entry(i, j) - k.entry(i - 1, j) - k.entry(i + 1, j)) / (h * h);
            let r = lap - lam * lam * k.entry(i, j);
            let expect = if i == j { 1.0 } else { 0.0 };
            assert!((r - expect).norm() < 1e-9, "{i}: {r}");
        }
    }

    #[test]
    fn lattice_kernel_approaches_continuum() {
        let lam = c(0.0, 1.0);
        let mut prev = f64::INFINITY;
        for h in [0.1, 0.05, 0.025] {
            let k = LatticeKernel::new(lam, h).unwrap();
            let i = (1.0 / h).round() as usize;
            let err = (k.entry(i, i) / h - free_mode_kernel(lam, 1.0, 1.0).unwrap()).norm();
            assert!(err < prev / 3.5);
            prev = err;
        }
    }
}
