//! Numerical kernels shared by the spectral modules.

pub mod banded;
pub mod dense;
pub mod quad;
pub mod spline;
pub mod tridiag;

pub use banded::{BandLu, BandMatrix};
pub use quad::{gauss_composite, gauss_legendre, simpson};
pub use spline::CubicSpline;
pub use tridiag::{SymTridiagonal, TridiagLu, Tridiagonal};

/// Richardson extrapolation for an error expansion in even powers of the
/// step, given values on steps h, h/2, h/4, ...
pub fn richardson<T>(values: &[T]) -> T
where
    T: Copy
        + std::ops::Sub<Output = T>
        + std::ops::Mul<f64, Output = T>
        + std::ops::Add<Output = T>,
{
    assert!(!values.is_empty());
    let mut level: Vec<T> = values.to_vec();
    let mut factor = 4.0;
    while level.len() > 1 {
        level = level
            .windows(2)
            .map(|w| w[1] + (w[1] - w[0]) * (1.0 / (factor - 1.0)))
            .collect();
        factor *= 4.0;
    }
    level[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn richardson_removes_even_powers() {
        let f = |h: f64| 2.0 + 3.0 * h * h - 5.0 * h.powi(4);
        let v = [f(0.1), f(0.05), f(0.025)];
        assert!((richardson(&v) - 2.0).abs() < 1e-14);
    }
}
