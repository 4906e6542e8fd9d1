use crate::error::{invalid, Result};
use crate::numerics::CubicSpline;

use super::profile::{bump3, Profile};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothness {
    Continuous,
    PiecewiseConstant,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialShape {
    Zero,
    /// `values[i]` on `[edges[i], edges[i+1])`, zero elsewhere.
    PiecewiseConstant {
        edges: Vec<f64>,
        values: Vec<f64>,
    },
    /// `amplitude · exp(1 − 1/(1 − y²))`, y the rescaled distance from `center`.
    SmoothBump {
        amplitude: f64,
        center: f64,
        half_width: f64,
    },
    /// Cubic interpolation of samples; zero beyond the last knot.
    Tabulated(CubicSpline),
    /// Mode-k potential of a surface of revolution du² + f(u)²dφ².
    Warped {
        profile: Profile,
        k: u32,
    },
}

/// A compactly supported radial potential.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialPotential {
    shape: PotentialShape,
    support_radius: f64,
}

impl RadialPotential {
    pub fn zero() -> Self {
        Self {
            shape: PotentialShape::Zero,
            support_radius: 0.0,
        }
    }

    /// `-depth` on `[0, width]`.
    pub fn square_well(depth: f64, width: f64) -> Result<Self> {
        Self::piecewise_constant(vec![0.0, width], vec![-depth])
    }

    /// `height` on `[start, end]`.
    pub fn barrier(height: f64, start: f64, end: f64) -> Result<Self> {
        Self::piecewise_constant(vec![start, end], vec![height])
    }

    pub fn piecewise_constant(edges: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if edges.len() != values.len() + 1 || values.is_empty() {
            return Err(invalid(
                "piecewise-constant potential needs len(edges) = len(values) + 1",
            ));
        }
        if edges[0] < 0.0 || edges.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid(
                "potential edges must be nonnegative and strictly increasing",
            ));
        }
        if edges.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(invalid(
                "potential has unbounded support or non-finite values",
            ));
        }
        let support_radius = *edges.last().unwrap();
        Ok(Self {
            shape: PotentialShape::PiecewiseConstant { edges, values },
            support_radius,
        })
    }

    pub fn smooth_bump(amplitude: f64, center: f64, half_width: f64) -> Result<Self> {
        if !(half_width > 0.0)
            || center - half_width < 0.0
            || !amplitude.is_finite()
            || !center.is_finite()
        {
            return Err(invalid("bump must have positive width and lie in [0, inf)"));
        }
        Ok(Self {
            shape: PotentialShape::SmoothBump {
                amplitude,
                center,
                half_width,
            },
            support_radius: center + half_width,
        })
    }

    /// Tabulated samples; the last sample must be zero so the potential stays continuous.
    pub fn tabulated(u: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if u.first().is_some_and(|&u0| u0 < 0.0) {
            return Err(invalid("tabulated potential must start at u >= 0"));
        }
        let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        if values.last().is_some_and(|v| v.abs() > 1e-12 * scale) {
            return Err(invalid(
                "tabulated potential must vanish at its last sample",
            ));
        }
        let spline = CubicSpline::new(u, values)?;
        let support_radius = spline.domain().1;
        Ok(Self {
            shape: PotentialShape::Tabulated(spline),
            support_radius,
        })
    }

    pub fn warped(profile: Profile, k: u32) -> Result<Self> {
        let support_radius = profile.support_radius();
        Ok(Self {
            shape: PotentialShape::Warped { profile, k },
            support_radius,
        })
    }

    pub fn shape(&self) -> &PotentialShape {
        &self.shape
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.shape, PotentialShape::Zero)
    }

    pub fn smoothness(&self) -> Smoothness {
        match self.shape {
            PotentialShape::PiecewiseConstant { .. } => Smoothness::PiecewiseConstant,
            _ => Smoothness::Continuous,
        }
    }

    /// Locations where the potential jumps (grid nodes are placed there).
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.shape {
            PotentialShape::PiecewiseConstant { edges, .. } => edges.clone(),
            _ => Vec::new(),
        }
    }

    pub fn eval(&self, u: f64) -> f64 {
        if u > self.support_radius || u < 0.0 {
            return 0.0;
        }
        match &self.shape {
            PotentialShape::Zero => 0.0,
            PotentialShape::PiecewiseConstant { edges, values } => {
                if u < edges[0] || u >= *edges.last().unwrap() {
                    return 0.0;
                }
                let i = edges.partition_point(|&e| e <= u) - 1;
                values[i]
            }
            PotentialShape::SmoothBump {
                amplitude,
                center,
                half_width,
            } => amplitude * bump3(u, center - half_width, center + half_width).0,
            PotentialShape::Tabulated(s) => {
                let (a, _) = s.domain();
                s.eval(u.max(a))
            }
            PotentialShape::Warped { profile, k } => profile.mode_potential(u, *k),
        }
    }

    /// Mean of the potential over `[a, b]`; exact for piecewise-constant shapes.
    pub fn average(&self, a: f64, b: f64) -> f64 {
        match &self.shape {
            PotentialShape::Zero => 0.0,
            PotentialShape::PiecewiseConstant { edges, values } => {
                if b <= a {
                    return self.eval(a);
                }
                let mut s = 0.0;
                for (i, v) in values.iter().enumerate() {
                    let lo = edges[i].max(a);
                    let hi = edges[i + 1].min(b);
                    if hi > lo {
                        s += v * (hi - lo);
                    }
                }
                s / (b - a)
            }
            _ => self.eval(0.5 * (a + b)),
        }
    }

    /// Largest |V| seen on a sampling of the support.
    pub fn max_abs(&self) -> f64 {
        let r = self.support_radius;
        (0..=2000)
            .map(|i| self.eval(r * i as f64 / 2000.0).abs())
            .fold(0.0, f64::max)
    }
}
