//! Profiles f(u) of surfaces of revolution du² + f(u)² dφ².

use crate::error::{invalid, Result};
use crate::numerics::CubicSpline;

/// `exp(1 − 1/(1 − y²))` on `(a, b)` with its first two u-derivatives; peak value 1.
pub(crate) fn bump3(u: f64, a: f64, b: f64) -> (f64, f64, f64) {
    if u <= a || u >= b {
        return (0.0, 0.0, 0.0);
    }
    let dy = 2.0 / (b - a);
    let y = (2.0 * u - a - b) / (b - a);
    let q = 1.0 - y * y;
    let s = (1.0 - 1.0 / q).exp();
    let g1 = -2.0 * y / (q * q);
    let g2 = -2.0 / (q * q) - 8.0 * y * y / (q * q * q);
    (s, s * g1 * dy, s * (g1 * g1 + g2) * dy * dy)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    Constant {
        radius: f64,
    },
    /// `radius · (1 + amplitude · bump)` with the bump supported on `[start, end]`.
    Bump {
        radius: f64,
        amplitude: f64,
        start: f64,
        end: f64,
    },
    /// Cubic interpolation; constant beyond the last knot.
    Tabulated(CubicSpline),
}

impl Profile {
    pub fn constant(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(invalid("profile radius must be positive"));
        }
        Ok(Profile::Constant { radius })
    }

    pub fn bump(radius: f64, amplitude: f64, start: f64, end: f64) -> Result<Self> {
        if !(radius > 0.0) || !(end > start) || start < 0.0 {
            return Err(invalid(
                "bump profile needs radius > 0 and 0 <= start < end",
            ));
        }
        if amplitude <= -1.0 || !amplitude.is_finite() {
            return Err(invalid("profile must stay positive (amplitude > -1)"));
        }
        Ok(Profile::Bump {
            radius,
            amplitude,
            start,
            end,
        })
    }

    pub fn tabulated(u: Vec<f64>, f: Vec<f64>) -> Result<Self> {
        if f.iter().any(|&v| v <= 0.0) {
            return Err(invalid("profile must be positive"));
        }
        let s = CubicSpline::new(u, f)?;
        let (_, end) = s.domain();
        let (v, d, dd) = s.eval3(end);
        if d.abs() > 1e-8 * v || dd.abs() > 1e-8 * v {
            return Err(invalid(
                "profile is not eventually constant at its last sample",
            ));
        }
        let (lo, hi) = s.domain();
        for i in 0..=1000 {
            if s.eval(lo + (hi - lo) * i as f64 / 1000.0) <= 0.0 {
                return Err(invalid("interpolated profile is not positive"));
            }
        }
        Ok(Profile::Tabulated(s))
    }

    /// Asymptotic radius r.
    pub fn radius(&self) -> f64 {
        match self {
            Profile::Constant { radius } | Profile::Bump { radius, .. } => *radius,
            Profile::Tabulated(s) => *s.values().last().unwrap(),
        }
    }

    pub fn support_radius(&self) -> f64 {
        match self {
            Profile::Constant { .. } => 0.0,
            Profile::Bump { end, .. } => *end,
            Profile::Tabulated(s) => s.domain().1,
        }
    }

    /// f, f′, f″ at u.
    pub fn eval3(&self, u: f64) -> (f64, f64, f64) {
        match self {
            Profile::Constant { radius } => (*radius, 0.0, 0.0),
            Profile::Bump {
                radius,
                amplitude,
                start,
                end,
            } => {
                let (s, s1, s2) = bump3(u, *start, *end);
                (
                    radius * (1.0 + amplitude * s),
                    radius * amplitude * s1,
                    radius * amplitude * s2,
                )
            }
            Profile::Tabulated(s) => {
                let (lo, hi) = s.domain();
                if u >= hi {
                    (self.radius(), 0.0, 0.0)
                } else {
                    s.eval3(u.max(lo))
                }
            }
        }
    }

    /// V_k = k²/f² − k²/r² + f″/(2f) − f′²/(4f²).
    pub fn mode_potential(&self, u: f64, k: u32) -> f64 {
        if u > self.support_radius() {
            return 0.0;
        }
        let (f, f1, f2) = self.eval3(u);
        let r = self.radius();
        let k2 = (k as f64).powi(2);
        k2 / (f * f) - k2 / (r * r) + f2 / (2.0 * f) - f1 * f1 / (4.0 * f * f)
    }
}
