//! Exterior complex scaling of mode operators and the rotated essential spectrum.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::modes::{ModeKind, ModeOperator};
use crate::numerics::{simpson, CubicSpline};
use crate::spectral::ScalingParameter;

/// −d²/du² + μ + V on [0, R₀]; −θ′d²/du² + μ beyond, joined continuously with
/// the exterior derivative scaled by 1 + θ.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledModeOperator {
    pub base: ModeOperator,
    pub theta: ScalingParameter,
    pub radius: f64,
}

impl ScaledModeOperator {
    /// Complex coordinate of the scaling contour at real parameter u.
    pub fn contour(&self, u: f64) -> Complex64 {
        contour(u, self.radius, self.theta.stretch())
    }

    /// Coefficient of −d²/du² at u.
    pub fn second_order_coefficient(&self, u: f64) -> Complex64 {
        if u > self.radius {
            self.theta.theta_prime()
        } else {
            Complex64::new(1.0, 0.0)
        }
    }

    /// Zeroth-order coefficient μ + V(u); exactly μ beyond R₀.
    pub fn zeroth_order_coefficient(&self, u: f64) -> f64 {
        if u > self.radius {
            self.base.mu
        } else {
            self.base.mu + self.base.potential.eval(u)
        }
    }
}

pub(crate) fn contour(u: f64, radius: f64, stretch: Complex64) -> Complex64 {
    if u <= radius {
        Complex64::new(u, 0.0)
    } else {
        radius + stretch * (u - radius)
    }
}

pub fn dilate_mode(
    op: &ModeOperator,
    theta: ScalingParameter,
    radius: f64,
) -> Result<ScaledModeOperator> {
    if op.kind != ModeKind::Cylindrical {
        return Err(invalid(
            "only cylindrical modes can be scaled; pass cusp modes through their normal form",
        ));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(invalid("scaling radius must be positive"));
    }
    let support = op.potential.support_radius();
    if support > radius {
        return Err(Error::SupportBeyondScalingRadius { support, radius });
    }
    Ok(ScaledModeOperator {
        base: op.clone(),
        theta,
        radius,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ray {
    pub origin: Complex64,
    pub direction: Complex64,
    pub label: String,
}

impl Ray {
    pub fn distance(&self, z: Complex64) -> f64 {
        let w = z - self.origin;
        let t = (w * self.direction.conj()).re.max(0.0);
        (w - self.direction * t).norm()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RaySet {
    pub rays: Vec<Ray>,
}

impl RaySet {
    pub fn len(&self) -> usize {
        self.rays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rays.is_empty()
    }

    pub fn origins(&self) -> Vec<Complex64> {
        self.rays.iter().map(|r| r.origin).collect()
    }
}

/// One ray `origin + θ′[0, ∞)` per threshold.
pub fn essential_rays(
    thresholds: &[(Complex64, String)],
    theta: &ScalingParameter,
) -> Result<RaySet> {
    if thresholds.is_empty() {
        return Err(Error::Empty("threshold list"));
    }
    let direction = theta.ray_direction();
    Ok(RaySet {
        rays: thresholds
            .iter()
            .map(|(o, l)| Ray {
                origin: *o,
                direction,
                label: l.clone(),
            })
            .collect(),
    })
}

/// Euclidean distance to the union of the rays (infinite for an empty set).
pub fn distance_to_rays(z: Complex64, rays: &RaySet) -> f64 {
    rays.rays
        .iter()
        .map(|r| r.distance(z))
        .fold(f64::INFINITY, f64::min)
}

/// Complex samples on the uniform grid u_j = j·step, j = 0..len.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    pub step: f64,
    pub values: Vec<Complex64>,
}

impl SampledFunction {
    pub fn from_fn(step: f64, len: usize, f: impl Fn(f64) -> Complex64) -> Self {
        Self {
            step,
            values: (0..len).map(|j| f(j as f64 * step)).collect(),
        }
    }

    pub fn extent(&self) -> f64 {
        self.step * (self.values.len().saturating_sub(1)) as f64
    }

    /// ∫|f|² by Simpson on [0, split] and [split, end]; `split` must be a node.
    pub fn norm_sq_split(&self, split: f64) -> Result<f64> {
        let k = node_index(split, self.step)?;
        let sq: Vec<f64> = self.values.iter().map(|z| z.norm_sqr()).collect();
        Ok(simpson_any(&sq[..=k], self.step) + simpson_any(&sq[k..], self.step))
    }
}

fn node_index(x: f64, step: f64) -> Result<usize> {
    let k = (x / step).round();
    if (k * step - x).abs() > 1e-9 * step.max(x.abs()) || k < 0.0 {
        return Err(invalid("scaling radius must be a grid node"));
    }
    Ok(k as usize)
}

/// Simpson for any sample count (trapezoid correction on a trailing interval).
pub(crate) fn simpson_any(v: &[f64], h: f64) -> f64 {
    match v.len() {
        0 | 1 => 0.0,
        2 => 0.5 * h * (v[0] + v[1]),
        n if n % 2 == 1 => simpson(v, h),
        n => {
            // Simpson on the first n-3 intervals plus the 3/8 rule on the last three.
            let head = if n - 3 >= 3 {
                simpson(&v[..n - 3], h)
            } else {
                0.0
            };
            let t = &v[n - 4..];
            head + 3.0 * h / 8.0 * (t[0] + 3.0 * t[1] + 3.0 * t[2] + t[3])
        }
    }
}

/// (U_θ f)(u) = f(u) for u ≤ R₀ and (1+θ)^{1/2} f(R₀ + (1+θ)(u − R₀)) beyond,
/// sampled on [0, target] with the input step. Off-grid values come from
/// cubic interpolation of the real and imaginary parts.
pub fn apply_dilation(
    f: &SampledFunction,
    theta: f64,
    radius: f64,
    target: f64,
) -> Result<SampledFunction> {
    if !(theta >= 0.0 && theta.is_finite()) {
        return Err(Error::ThetaOutsideRegion(Complex64::new(theta, 0.0)));
    }
    let r_idx = node_index(radius, f.step)?;
    let reach = radius + (1.0 + theta) * (target - radius).max(0.0);
    if reach > f.extent() * (1.0 + 1e-12) {
        return Err(Error::GridTooShort(format!(
            "dilation needs samples up to {reach}, input ends at {}",
            f.extent()
        )));
    }
    // Only exterior samples enter the interpolant, so a kink at R0 does not ring outward.
    let ext = &f.values[r_idx..];
    let xs: Vec<f64> = (r_idx..f.values.len()).map(|j| j as f64 * f.step).collect();
    let re = CubicSpline::new(xs.clone(), ext.iter().map(|z| z.re).collect())?;
    let im = CubicSpline::new(xs, ext.iter().map(|z| z.im).collect())?;
    let len = (target / f.step).round() as usize + 1;
    let s = (1.0 + theta).sqrt();
    let values = (0..len)
        .map(|j| {
            let u = j as f64 * f.step;
            if u <= radius + 1e-12 * f.step {
                f.values[j]
            } else {
                let w = (radius + (1.0 + theta) * (u - radius)).min(f.extent());
                Complex64::new(re.eval(w), im.eval(w)) * s
            }
        })
        .collect();
    Ok(SampledFunction {
        step: f.step,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::RadialPotential;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn exterior_coefficients() {
        let th = ScalingParameter::new(c(0.3, 0.2)).unwrap();
        let s = dilate_mode(&ModeOperator::free(1.0), th, 2.0).unwrap();
        assert_eq!(s.second_order_coefficient(3.0), th.theta_prime());
        assert_eq!(s.zeroth_order_coefficient(3.0), 1.0);
        assert!((s.second_order_coefficient(3.0) - c(0.5513, -0.1737)).norm() < 1e-4);
        assert_eq!(s.second_order_coefficient(1.0), c(1.0, 0.0));
    }

    #[test]
    fn interior_of_well_unchanged() {
        let well = ModeOperator::cylindrical(0.0, RadialPotential::square_well(5.0, 1.0).unwrap());
        let s = dilate_mode(&well, ScalingParameter::new(c(0.4, 0.3)).unwrap(), 2.0).unwrap();
        for u in [0.1, 0.5, 0.99] {
            assert_eq!(s.zeroth_order_coefficient(u), -5.0);
            assert_eq!(s.contour(u), c(u, 0.0));
        }
        assert!(matches!(
            dilate_mode(&well, ScalingParameter::new(c(0.4, 0.3)).unwrap(), 0.5),
            Err(Error::SupportBeyondScalingRadius { .. })
        ));
    }

    #[test]
    fn ray_examples() {
        let th = ScalingParameter::new(c(0.3, 0.2)).unwrap();
        let rays = essential_rays(&[(c(0.0, 0.0), "Y".into())], &th).unwrap();
        let deg = rays.rays[0].direction.arg().to_degrees();
        assert!((deg + 17.5).abs() < 0.05, "{deg}");
        assert!(essential_rays(&[], &th).is_err());

        let real = ScalingParameter::unitary(0.0).unwrap();
        let rays = essential_rays(&[(c(0.0, 0.0), "a".into())], &real).unwrap();
        assert!((distance_to_rays(c(-1.0, 0.0), &rays) - 1.0).abs() < 1e-15);
        assert_eq!(distance_to_rays(c(3.0, 0.0), &rays), 0.0);
    }

    #[test]
    fn projection_distance() {
        let d = Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4);
        let rays = RaySet {
            rays: vec![Ray {
                origin: c(0.0, 0.0),
                direction: d,
                label: String::new(),
            }],
        };
        let z = c(1.0, -0.5);
        let expected = (z * d.conj()).im.abs();
        assert!((distance_to_rays(z, &rays) - expected).abs() < 1e-15);
    }

    #[test]
    fn dilation_preserves_gaussian_norm() {
        let f = SampledFunction::from_fn(0.005, 4001, |u| c((-(u - 3.0) * (u - 3.0)).exp(), 0.0));
        let g = apply_dilation(&f, 0.5, 1.0, 12.0).unwrap();
        let ratio = g.norm_sq_split(1.0).unwrap() / f.norm_sq_split(1.0).unwrap();
        assert!((ratio - 1.0).abs() < 1e-6, "{ratio}");
    }

    #[test]
    fn dilation_identity_cases() {
        let f = SampledFunction::from_fn(0.01, 1001, |u| c(u.sin(), 0.0));
        let g = apply_dilation(&f, 0.0, 1.0, 10.0).unwrap();
        for (a, b) in f.values.iter().zip(&g.values) {
            assert!((a - b).norm() < 1e-12);
        }
        let h = SampledFunction::from_fn(0.01, 1001, |u| {
            c(if u < 1.0 { u * (1.0 - u) } else { 0.0 }, 0.0)
        });
        let g = apply_dilation(&h, 0.7, 1.0, 5.0).unwrap();
        for (a, b) in h.values.iter().zip(&g.values) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!(matches!(
            apply_dilation(&f, 1.0, 1.0, 9.0),
            Err(Error::GridTooShort(_))
        ));
    }
}
