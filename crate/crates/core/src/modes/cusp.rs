//! Log-variable normal form of cusp mode operators.

use crate::error::{invalid, Result};
use crate::numerics::SymTridiagonal;

use super::{ModeKind, ModeOperator};

/// −d²/dt² + (n−1)²/4 + μe^{2t}, optionally restricted to t ≥ `lower` with a
/// Dirichlet condition there.
#[derive(Debug, Clone, PartialEq)]
pub struct LineOperator {
    pub dimension: u32,
    pub mu: f64,
    pub lower: Option<f64>,
}

impl LineOperator {
    /// Constant part (n−1)²/4, the continuum threshold at t → −∞.
    pub fn threshold(&self) -> f64 {
        let a = self.dimension as f64 - 1.0;
        a * a / 4.0
    }

    pub fn potential(&self, t: f64) -> f64 {
        self.threshold() + self.mu * (2.0 * t).exp()
    }

    pub fn with_lower(mut self, t0: f64) -> Self {
        self.lower = Some(t0);
        self
    }

    /// Three-point discretization on `n` interior nodes of `[t_min, t_max]`,
    /// Dirichlet at both ends.
    pub fn discretize(&self, t_min: f64, t_max: f64, n: usize) -> Result<SymTridiagonal> {
        check_window(t_min, t_max, n)?;
        if let Some(t0) = self.lower {
            if t_min < t0 {
                return Err(invalid("window starts below the inner Dirichlet point"));
            }
        }
        let h = (t_max - t_min) / (n + 1) as f64;
        let diag = (1..=n)
            .map(|j| 2.0 / (h * h) + self.potential(t_min + j as f64 * h))
            .collect();
        SymTridiagonal::new(diag, vec![-1.0 / (h * h); n - 1])
    }

    /// Discretization of the original operator −u^n ∂(u^{2−n} ∂) + μu² in
    /// L²(u^{−n}du) on nodes uniform in t = ln u, symmetrized by the weight.
    pub fn discretize_weighted_u(
        &self,
        t_min: f64,
        t_max: f64,
        n: usize,
    ) -> Result<SymTridiagonal> {
        check_window(t_min, t_max, n)?;
        let dim = self.dimension as f64;
        let h = (t_max - t_min) / (n + 1) as f64;
        let u: Vec<f64> = (0..n + 2).map(|j| (t_min + j as f64 * h).exp()).collect();
        let cond: Vec<f64> = u
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                mid.powf(2.0 - dim) / (w[1] - w[0])
            })
            .collect();
        let mass: Vec<f64> = (1..=n)
            .map(|j| u[j].powf(-dim) * 0.5 * (u[j + 1] - u[j - 1]))
            .collect();
        let diag = (0..n)
            .map(|j| (cond[j] + cond[j + 1]) / mass[j] + self.mu * u[j + 1] * u[j + 1])
            .collect();
        let off = (0..n - 1)
            .map(|j| -cond[j + 1] / (mass[j] * mass[j + 1]).sqrt())
            .collect();
        SymTridiagonal::new(diag, off)
    }

    /// Semiclassical eigenvalue count below `e` on `[t_min, t_max]`.
    pub fn weyl_count(&self, e: f64, t_min: f64, t_max: f64) -> f64 {
        let m = 20_000;
        let h = (t_max - t_min) / m as f64;
        let s: f64 = (0..m)
            .map(|i| {
                (e - self.potential(t_min + (i as f64 + 0.5) * h))
                    .max(0.0)
                    .sqrt()
            })
            .sum();
        s * h / std::f64::consts::PI
    }
}

fn check_window(t_min: f64, t_max: f64, n: usize) -> Result<()> {
    if !(t_max > t_min) || !t_min.is_finite() || !t_max.is_finite() {
        return Err(invalid("t-window must be a finite nonempty interval"));
    }
    if n < 50 {
        return Err(invalid("at least 50 grid points are required"));
    }
    Ok(())
}

/// Unitary normal form of a cusp mode operator under u = e^t.
pub fn cusp_to_schrodinger(op: &ModeOperator) -> Result<LineOperator> {
    match op.kind {
        ModeKind::Cusp { dimension } => Ok(LineOperator {
            dimension,
            mu: op.mu,
            lower: None,
        }),
        ModeKind::Cylindrical => Err(invalid("cusp_to_schrodinger needs a cusp mode operator")),
    }
}

/// Continuum edge from the two lowest levels of a box-quantized continuum:
/// λ_k ≈ E + c k² gives E ≈ (4λ₁ − λ₂)/3.
pub fn continuum_edge(levels: &[f64]) -> Result<f64> {
    if levels.len() < 2 {
        return Err(invalid("two levels are required"));
    }
    Ok((4.0 * levels[0] - levels[1]) / 3.0)
}
