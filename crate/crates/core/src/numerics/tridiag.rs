//! Tridiagonal kernels: Sturm bisection for real symmetric matrices and a
//! pivoted LU for general complex ones.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Real symmetric tridiagonal matrix (`off[i]` couples rows `i` and `i+1`).
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::Empty("tridiagonal diagonal"));
        }
        if off.len() + 1 != diag.len() {
            return Err(crate::error::invalid("off-diagonal length must be n-1"));
        }
        Ok(Self { diag, off })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let tiny = f64::MIN_POSITIVE.sqrt();
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.diag.len() {
            let denom = if q.abs() < tiny { tiny.copysign(q) } else { q };
            q = self.diag[i] - x - self.off[i - 1] * self.off[i - 1] / denom;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        assert!(k < self.len(), "eigenvalue index out of range");
        let (mut lo, mut hi) = self.gershgorin();
        let pad = 1e-12 * (lo.abs().max(hi.abs()) + 1.0);
        lo -= pad;
        hi += pad;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// The `count` smallest eigenvalues in ascending order.
    pub fn lowest(&self, count: usize) -> Vec<f64> {
        (0..count.min(self.len()))
            .map(|k| self.eigenvalue(k))
            .collect()
    }

    /// All eigenvalues below `upper`, ascending.
    pub fn eigenvalues_below(&self, upper: f64) -> Vec<f64> {
        let m = self.count_below(upper);
        (0..m).map(|k| self.eigenvalue(k)).collect()
    }

    /// Eigenvector for a known eigenvalue by inverse iteration, unit 2-norm.
    pub fn eigenvector(&self, value: f64) -> Result<Vec<f64>> {
        let n = self.len();
        let scale = self
            .gershgorin()
            .1
            .abs()
            .max(self.gershgorin().0.abs())
            .max(1.0);
        let shift = Complex64::new(value + 1e-13 * scale, 0.0);
        let lu = TridiagLu::factor_symmetric_real(self, shift)?;
        let mut v: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new(1.0 + 0.1 * ((i % 7) as f64), 0.0))
            .collect();
        for _ in 0..3 {
            lu.solve_in_place(&mut v);
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            v.iter_mut().for_each(|z| *z /= norm);
        }
        let mut out: Vec<f64> = v.iter().map(|z| z.re).collect();
        let imax = out
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(i, _)| i)
            .unwrap_or(0);
        if out[imax] < 0.0 {
            out.iter_mut().for_each(|x| *x = -*x);
        }
        Ok(out)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * x[i + 1];
                }
                s
            })
            .collect()
    }
}

/// Complex tridiagonal matrix stored by diagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub sub: Vec<Complex64>,
    pub diag: Vec<Complex64>,
    pub sup: Vec<Complex64>,
}

impl Tridiagonal {
    pub fn symmetric(diag: Vec<Complex64>, off: Vec<Complex64>) -> Self {
        Self {
            sub: off.clone(),
            diag,
            sup: off,
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.sub[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.sup[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    /// Infinity norm (maximum absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|i| {
                self.diag[i].norm()
                    + if i > 0 { self.sub[i - 1].norm() } else { 0.0 }
                    + if i + 1 < n { self.sup[i].norm() } else { 0.0 }
            })
            .fold(0.0, f64::max)
    }

    pub fn shifted(&self, shift: Complex64) -> Self {
        let mut t = self.clone();
        t.diag.iter_mut().for_each(|d| *d -= shift);
        t
    }

    pub fn to_dense(&self) -> ndarray::Array2<Complex64> {
        let n = self.len();
        let mut a = ndarray::Array2::zeros((n, n));
        for i in 0..n {
            a[[i, i]] = self.diag[i];
            if i + 1 < n {
                a[[i, i + 1]] = self.sup[i];
                a[[i + 1, i]] = self.sub[i];
            }
        }
        a
    }
}

/// LU factorization with partial pivoting of `T - shift`.
#[derive(Debug, Clone)]
pub struct TridiagLu {
    dl: Vec<Complex64>,
    d: Vec<Complex64>,
    du: Vec<Complex64>,
    du2: Vec<Complex64>,
    swap: Vec<bool>,
}

fn cabs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

impl TridiagLu {
    pub fn factor(t: &Tridiagonal, shift: Complex64) -> Result<Self> {
        Self::factor_raw(
            t.sub.clone(),
            t.diag.iter().map(|d| d - shift).collect(),
            t.sup.clone(),
            shift,
        )
    }

    pub fn factor_symmetric_real(t: &SymTridiagonal, shift: Complex64) -> Result<Self> {
        let off: Vec<Complex64> = t.off.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let d = t
            .diag
            .iter()
            .map(|&x| Complex64::new(x, 0.0) - shift)
            .collect();
        Self::factor_raw(off.clone(), d, off, shift)
    }

    fn factor_raw(
        mut dl: Vec<Complex64>,
        mut d: Vec<Complex64>,
        mut du: Vec<Complex64>,
        shift: Complex64,
    ) -> Result<Self> {
        let n = d.len();
        if n == 0 {
            return Err(Error::Empty("tridiagonal system"));
        }
        let mut du2 = vec![Complex64::new(0.0, 0.0); n.saturating_sub(2)];
        let mut swap = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if cabs1(d[i]) >= cabs1(dl[i]) {
                if cabs1(d[i]) == 0.0 {
                    return Err(Error::Singular(shift));
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swap[i] = true;
            }
        }
        if d.iter()
            .any(|x| cabs1(*x) == 0.0 || !x.re.is_finite() || !x.im.is_finite())
        {
            return Err(Error::Singular(shift));
        }
        Ok(Self {
            dl,
            d,
            du,
            du2,
            swap,
        })
    }

    /// Smallest pivot modulus; a cheap singularity indicator.
    pub fn min_pivot(&self) -> f64 {
        self.d
            .iter()
            .map(|z| z.norm())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if self.swap[i] {
                let temp = b[i] - self.dl[i] * b[i + 1];
                b[i] = b[i + 1];
                b[i + 1] = temp;
            } else {
                let bi = b[i];
                b[i + 1] -= self.dl[i] * bi;
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n >= 2 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}
