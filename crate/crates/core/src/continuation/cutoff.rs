//! Smooth steps and the four cutoffs gluing core and end resolvents.
//!
//! The end coordinate is s = u − R_c, so s ≤ 0 is the core.

use crate::numerics::gauss_legendre;

/// ∫₀¹ exp(−1/(x(1−x))) dx.
const BUMP_MASS: f64 = 0.007_029_858_406_609_657;

fn bump(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        (-1.0 / (x * (1.0 - x))).exp()
    }
}

/// Normalized integral of the bump: 0 for t ≤ 0, 1 for t ≥ 1.
fn smooth_unit_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    // Integrate whichever side is shorter; the integrand is symmetric about 1/2.
    let (upper, flip) = if t <= 0.5 {
        (t, false)
    } else {
        (1.0 - t, true)
    };
    let (x, w) = gauss_legendre(20);
    let panels = 8;
    let step = upper / panels as f64;
    let mut s = 0.0;
    for p in 0..panels {
        let c = (p as f64 + 0.5) * step;
        for (xi, wi) in x.iter().zip(&w) {
            s += wi * bump(c + 0.5 * step * xi);
        }
    }
    let part = 0.5 * step * s / BUMP_MASS;
    if flip {
        1.0 - part
    } else {
        part
    }
}

/// ρ(a, b): 0 on the core and for s ≤ a, 1 for s ≥ b, monotone between.
pub fn rho(a: f64, b: f64, s: f64) -> f64 {
    smooth_unit_step((s - a) / (b - a))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cutoff {
    Phi1,
    Phi2,
    Psi1,
    Psi2,
}

impl Cutoff {
    pub const ALL: [Cutoff; 4] = [Cutoff::Phi1, Cutoff::Phi2, Cutoff::Psi1, Cutoff::Psi2];

    /// Interval in s on which the cutoff varies.
    pub fn transition(self) -> (f64, f64) {
        match self {
            Cutoff::Phi1 => (0.8, 1.0),
            Cutoff::Phi2 => (0.0, 0.2),
            Cutoff::Psi1 | Cutoff::Psi2 => (0.4, 0.6),
        }
    }
}

/// A point of the model: the compact core or the end at distance s ≥ 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelPoint {
    Core,
    End(f64),
}

impl ModelPoint {
    /// End coordinate, with the core mapped to s ≤ 0.
    pub fn from_end_coordinate(s: f64) -> Self {
        if s <= 0.0 {
            ModelPoint::Core
        } else {
            ModelPoint::End(s)
        }
    }
}

pub fn cutoff_eval(which: Cutoff, point: ModelPoint) -> f64 {
    let s = match point {
        ModelPoint::Core => 0.0,
        ModelPoint::End(s) => s,
    };
    match which {
        Cutoff::Phi1 => 1.0 - rho(0.8, 1.0, s),
        Cutoff::Phi2 => rho(0.0, 0.2, s),
        Cutoff::Psi1 => 1.0 - rho(0.4, 0.6, s),
        Cutoff::Psi2 => 1.0 - cutoff_eval(Cutoff::Psi1, point),
    }
}

/// Cutoff values at end coordinates `s`.
pub fn sample(which: Cutoff, s: &[f64]) -> Vec<f64> {
    s.iter()
        .map(|&x| cutoff_eval(which, ModelPoint::from_end_coordinate(x)))
        .collect()
}
