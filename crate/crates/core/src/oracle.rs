//! Matching-equation roots for piecewise-constant radial potentials.
//!
//! Inside each constant piece the solution with ψ(0) = 0 is propagated
//! exactly by transfer matrices; beyond the support it must be a multiple of
//! the outgoing (or decaying) wave e^{iκu}, κ² = E − μ.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::modes::{PotentialShape, RadialPotential};

/// Constant pieces covering [0, R], R = support radius.
fn pieces(pot: &RadialPotential) -> Result<Vec<(f64, f64)>> {
    match pot.shape() {
        PotentialShape::Zero => Ok(Vec::new()),
        PotentialShape::PiecewiseConstant { edges, values } => {
            let mut out = Vec::new();
            if edges[0] > 0.0 {
                out.push((edges[0], 0.0));
            }
            for (w, v) in edges.windows(2).zip(values) {
                out.push((w[1] - w[0], *v));
            }
            Ok(out)
        }
        _ => Err(invalid(
            "the matching equation needs a piecewise-constant potential",
        )),
    }
}

/// sin(kℓ)/k and cos(kℓ) as entire functions of k².
fn sinc_cos(k2: Complex64, len: f64) -> (Complex64, Complex64) {
    if (k2 * len * len).norm() < 1e-8 {
        let x = k2 * len * len;
        (len * (1.0 - x / 6.0), 1.0 - x / 2.0)
    } else {
        let k = k2.sqrt();
        ((k * len).sin() / k, (k * len).cos())
    }
}

/// (ψ(R), ψ′(R)) for ψ(0) = 0, ψ′(0) = 1.
pub fn propagate(pot: &RadialPotential, mu: f64, e: Complex64) -> Result<(Complex64, Complex64)> {
    let mut psi = Complex64::new(0.0, 0.0);
    let mut dpsi = Complex64::new(1.0, 0.0);
    for (len, v) in pieces(pot)? {
        let k2 = e - mu - v;
        let (s, c) = sinc_cos(k2, len);
        let p = c * psi + s * dpsi;
        let d = -k2 * s * psi + c * dpsi;
        psi = p;
        dpsi = d;
    }
    Ok((psi, dpsi))
}

/// F(E) = ψ′(R) − iκψ(R) with κ the principal root of E − μ (outgoing for
/// Im κ ≤ 0 continued from the positive real axis).
pub fn matching_function(pot: &RadialPotential, mu: f64, e: Complex64) -> Result<Complex64> {
    let (psi, dpsi) = propagate(pot, mu, e)?;
    let kappa = (e - mu).sqrt();
    Ok(dpsi - Complex64::i() * kappa * psi)
}

/// Scale-free version |F| / (|ψ′| + |κψ|) used to locate candidate roots.
fn normalized_mismatch(pot: &RadialPotential, mu: f64, e: Complex64) -> Result<f64> {
    let (psi, dpsi) = propagate(pot, mu, e)?;
    let kappa = (e - mu).sqrt();
    let f = dpsi - Complex64::i() * kappa * psi;
    Ok(f.norm() / (dpsi.norm() + (kappa * psi).norm()))
}

/// Bound states below μ: roots of ψ′(R) + sqrt(μ − E)ψ(R), by sign scan and bisection.
pub fn bound_states(pot: &RadialPotential, mu: f64) -> Result<Vec<f64>> {
    let ps = pieces(pot)?;
    let vmin = ps.iter().map(|p| p.1).fold(0.0, f64::min);
    if vmin >= 0.0 {
        return Ok(Vec::new());
    }
    let f = |e: f64| -> Result<f64> {
        let (psi, dpsi) = propagate(pot, mu, Complex64::new(e, 0.0))?;
        Ok(dpsi.re + (mu - e).sqrt() * psi.re)
    };
    let lo = mu + vmin;
    let hi = mu - 1e-13 * (1.0 + mu.abs());
    let m = 4000;
    let grid: Vec<f64> = (0..=m)
        .map(|i| lo + (hi - lo) * i as f64 / m as f64)
        .collect();
    let vals: Vec<f64> = grid.iter().map(|&e| f(e)).collect::<Result<_>>()?;
    let mut roots = Vec::new();
    for i in 0..m {
        if vals[i] == 0.0 {
            roots.push(grid[i]);
        } else if vals[i] * vals[i + 1] < 0.0 {
            let (mut a, mut b, mut fa) = (grid[i], grid[i + 1], vals[i]);
            for _ in 0..200 {
                let c = 0.5 * (a + b);
                if c <= a || c >= b {
                    break;
                }
                let fc = f(c)?;
                if fc * fa <= 0.0 {
                    b = c;
                } else {
                    a = c;
                    fa = fc;
                }
            }
            roots.push(0.5 * (a + b));
        }
    }
    Ok(roots)
}

/// Complex root of the matching function by the secant method from `guess`.
pub fn resonance_newton(pot: &RadialPotential, mu: f64, guess: Complex64) -> Result<Complex64> {
    let mut x0 = guess;
    let mut x1 = guess * (1.0 + 1e-6) + Complex64::new(1e-6, -1e-6);
    let mut f0 = matching_function(pot, mu, x0)?;
    let mut f1 = matching_function(pot, mu, x1)?;
    for _ in 0..200 {
        let denom = f1 - f0;
        if denom.norm() == 0.0 {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / denom;
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = matching_function(pot, mu, x1)?;
        if (x1 - x0).norm() <= 1e-15 * (1.0 + x1.norm()) || f1.norm() == 0.0 {
            return Ok(x1);
        }
    }
    if normalized_mismatch(pot, mu, x1)? < 1e-10 {
        Ok(x1)
    } else {
        Err(Error::NoConvergence(format!(
            "matching equation from {guess}"
        )))
    }
}

/// Roots of the matching function in `re × im` (lower half-plane for resonances),
/// seeded from local minima of the normalized mismatch on a scan grid.
pub fn resonances_in_box(
    pot: &RadialPotential,
    mu: f64,
    re: (f64, f64),
    im: (f64, f64),
) -> Result<Vec<Complex64>> {
    if !(re.1 > re.0 && im.1 > im.0) {
        return Err(invalid("empty search box"));
    }
    let (nx, ny) = (160usize, 80usize);
    let at = |i: usize, j: usize| {
        Complex64::new(
            re.0 + (re.1 - re.0) * i as f64 / nx as f64,
            im.0 + (im.1 - im.0) * j as f64 / ny as f64,
        )
    };
    let mut g = vec![vec![0.0; ny + 1]; nx + 1];
    for (i, row) in g.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = normalized_mismatch(pot, mu, at(i, j))?;
        }
    }
    let mut roots: Vec<Complex64> = Vec::new();
    for i in 1..nx {
        for j in 1..ny {
            let v = g[i][j];
            let is_min = (-1i32..=1).all(|a| {
                (-1i32..=1).all(|b| {
                    (a == 0 && b == 0) || v <= g[(i as i32 + a) as usize][(j as i32 + b) as usize]
                })
            });
            if !is_min {
                continue;
            }
            if let Ok(z) = resonance_newton(pot, mu, at(i, j)) {
                let inside = z.re >= re.0 && z.re <= re.1 && z.im >= im.0 && z.im <= im.1;
                if inside
                    && z.im < 0.0
                    && roots
                        .iter()
                        .all(|r| (r - z).norm() > 1e-8 * (1.0 + z.norm()))
                {
                    roots.push(z);
                }
            }
        }
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re));
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_potential_has_no_bound_states() {
        assert!(bound_states(&RadialPotential::zero(), 0.0)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn well_root_satisfies_cotangent_equation() {
        let well = RadialPotential::square_well(5.0, 1.0).unwrap();
        let roots = bound_states(&well, 0.0).unwrap();
        assert_eq!(roots.len(), 1);
        let e = roots[0];
        let k = (e + 5.0).sqrt();
        assert!((k / k.tan() + (-e).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn threshold_shift_moves_roots() {
        let well = RadialPotential::square_well(5.0, 1.0).unwrap();
        let a = bound_states(&well, 0.0).unwrap()[0];
        let b = bound_states(&well, 1.0).unwrap()[0];
        assert!((b - a - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_smooth_potentials() {
        let bump = RadialPotential::smooth_bump(1.0, 1.0, 0.5).unwrap();
        assert!(matching_function(&bump, 0.0, Complex64::new(1.0, 0.0)).is_err());
    }
}
