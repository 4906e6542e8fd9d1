use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::modes::{ModeKind, ModeOperator, Smoothness};
use crate::numerics::{BandMatrix, SymTridiagonal, Tridiagonal};
use crate::scaling::{contour, ScaledModeOperator};
use crate::spectral::ScalingParameter;

use super::grid::{Grid1D, NodeLayout, Scheme};

/// Dense-equivalent of a discretized mode operator, stored by symmetric bands.
///
/// The three-point scheme on the complex contour is symmetric with respect to
/// the dual-cell weights `w`; the stored matrix is the similarity transform
/// W^{1/2} A W^{-1/2}, which is complex symmetric and real symmetric when θ
/// is zero and the potential is real.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedOperator {
    /// `bands[0]` is the diagonal, `bands[k]` couples nodes j and j+k.
    pub bands: Vec<Vec<Complex64>>,
    /// Interior real nodes.
    pub nodes: Vec<f64>,
    /// Contour points z(x_j).
    pub contour: Vec<Complex64>,
    /// Dual-cell weights on the contour.
    pub weights: Vec<Complex64>,
    pub layout: NodeLayout,
    pub scheme: Scheme,
    pub tag: String,
}

/// What is being discretized: a mode operator with an optional exterior scaling.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeProblem {
    pub mode: ModeOperator,
    pub scaling: Option<(ScalingParameter, f64)>,
}

impl ModeProblem {
    pub fn plain(mode: &ModeOperator) -> Self {
        Self {
            mode: mode.clone(),
            scaling: None,
        }
    }

    pub fn scaled(op: &ScaledModeOperator) -> Self {
        Self {
            mode: op.base.clone(),
            scaling: Some((op.theta, op.radius)),
        }
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b = self.mode.potential.breakpoints();
        if let Some((_, r)) = self.scaling {
            b.push(r);
        }
        b
    }

    pub fn tag(&self) -> String {
        match self.scaling {
            None => format!("{} unscaled", self.mode.label),
            Some((t, r)) => format!("{} theta={} R0={r}", self.mode.label, t.theta()),
        }
    }
}

impl DiscretizedOperator {
    pub fn dim(&self) -> usize {
        self.bands[0].len()
    }

    pub fn bandwidth(&self) -> usize {
        self.bands.len() - 1
    }

    pub fn to_dense(&self) -> Array2<Complex64> {
        let n = self.dim();
        let mut a = Array2::zeros((n, n));
        for (k, band) in self.bands.iter().enumerate() {
            for (j, &v) in band.iter().enumerate() {
                a[[j, j + k]] = v;
                a[[j + k, j]] = v;
            }
        }
        a
    }

    pub fn tridiagonal(&self) -> Option<Tridiagonal> {
        (self.bandwidth() == 1)
            .then(|| Tridiagonal::symmetric(self.bands[0].clone(), self.bands[1].clone()))
    }

    pub fn band_matrix(&self) -> BandMatrix {
        let n = self.dim();
        let k = self.bandwidth();
        let mut m = BandMatrix::zeros(n, k, k);
        for (d, band) in self.bands.iter().enumerate() {
            for (j, &v) in band.iter().enumerate() {
                m.set(j, j + d, v);
                if d > 0 {
                    m.set(j + d, j, v);
                }
            }
        }
        m
    }

    /// Real symmetric tridiagonal form, when every entry is real.
    pub fn real_symmetric(&self) -> Option<SymTridiagonal> {
        if self.bandwidth() != 1 || self.bands.iter().flatten().any(|z| z.im != 0.0) {
            return None;
        }
        SymTridiagonal::new(
            self.bands[0].iter().map(|z| z.re).collect(),
            self.bands[1].iter().map(|z| z.re).collect(),
        )
        .ok()
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        let mut y: Vec<Complex64> = (0..n).map(|j| self.bands[0][j] * x[j]).collect();
        for (k, band) in self.bands.iter().enumerate().skip(1) {
            for (j, &v) in band.iter().enumerate() {
                y[j] += v * x[j + k];
                y[j + k] += v * x[j];
            }
        }
        y
    }

    pub fn norm_inf(&self) -> f64 {
        let n = self.dim();
        let mut rows = vec![0.0; n];
        for (k, band) in self.bands.iter().enumerate() {
            for (j, v) in band.iter().enumerate() {
                rows[j] += v.norm();
                if k > 0 {
                    rows[j + k] += v.norm();
                }
            }
        }
        rows.into_iter().fold(0.0, f64::max)
    }

    /// Map a vector of nodal values into the symmetrized coordinates (multiply by W^{1/2}).
    pub fn to_symmetric_coords(&self, f: &[Complex64]) -> Vec<Complex64> {
        f.iter()
            .zip(&self.weights)
            .map(|(v, w)| v * w.sqrt())
            .collect()
    }

    /// Inverse of [`Self::to_symmetric_coords`].
    pub fn from_symmetric_coords(&self, f: &[Complex64]) -> Vec<Complex64> {
        f.iter()
            .zip(&self.weights)
            .map(|(v, w)| v / w.sqrt())
            .collect()
    }
}

pub fn discretize(op: &ScaledModeOperator, grid: &Grid1D) -> Result<DiscretizedOperator> {
    if grid.length <= op.radius {
        return Err(Error::GridTooShort(format!(
            "L = {} must exceed R0 = {}",
            grid.length, op.radius
        )));
    }
    let p = ModeProblem::scaled(op);
    assemble(&p, &grid.layout(&p.breakpoints()), grid.scheme)
}

pub fn discretize_mode(op: &ModeOperator, grid: &Grid1D) -> Result<DiscretizedOperator> {
    let p = ModeProblem::plain(op);
    if grid.length <= op.potential.support_radius() {
        return Err(Error::GridTooShort(
            "potential support reaches the truncation point".into(),
        ));
    }
    assemble(&p, &grid.layout(&p.breakpoints()), grid.scheme)
}

/// Assemble on an explicit layout (used for nested refinement).
pub fn assemble(
    p: &ModeProblem,
    layout: &NodeLayout,
    scheme: Scheme,
) -> Result<DiscretizedOperator> {
    if p.mode.kind != ModeKind::Cylindrical {
        return Err(Error::Unsupported(
            "cusp modes are discretized through their normal form".into(),
        ));
    }
    match scheme {
        Scheme::Fd2 => Ok(assemble_fd2(p, layout)),
        Scheme::Fd4 => assemble_fd4(p, layout),
    }
}

fn assemble_fd2(p: &ModeProblem, layout: &NodeLayout) -> DiscretizedOperator {
    let x = layout.nodes();
    let m = x.len() - 2;
    let (radius, stretch) = match p.scaling {
        Some((t, r)) => (r, t.stretch()),
        None => (f64::INFINITY, Complex64::new(1.0, 0.0)),
    };
    let z: Vec<Complex64> = x.iter().map(|&u| contour(u, radius, stretch)).collect();
    let dz: Vec<Complex64> = z.windows(2).map(|w| w[1] - w[0]).collect();
    let w: Vec<Complex64> = (1..=m).map(|j| 0.5 * (dz[j - 1] + dz[j])).collect();
    let pot = &p.mode.potential;
    let v: Vec<f64> = (1..=m)
        .map(|j| match pot.smoothness() {
            Smoothness::PiecewiseConstant => pot.average(
                x[j] - 0.5 * (x[j] - x[j - 1]),
                x[j] + 0.5 * (x[j + 1] - x[j]),
            ),
            Smoothness::Continuous => pot.eval(x[j]),
        })
        .collect();
    let diag: Vec<Complex64> = (0..m)
        .map(|i| (dz[i].inv() + dz[i + 1].inv()) / w[i] + p.mode.mu + v[i])
        .collect();
    let off: Vec<Complex64> = (0..m.saturating_sub(1))
        .map(|i| -(dz[i + 1] * (w[i] * w[i + 1]).sqrt()).inv())
        .collect();
    DiscretizedOperator {
        bands: vec![diag, off],
        nodes: x[1..=m].to_vec(),
        contour: z[1..=m].to_vec(),
        weights: w,
        layout: layout.clone(),
        scheme: Scheme::Fd2,
        tag: p.tag(),
    }
}

/// Five-point scheme on a single uniform unscaled segment with odd reflection
/// at both Dirichlet ends (fourth order for continuous potentials).
fn assemble_fd4(p: &ModeProblem, layout: &NodeLayout) -> Result<DiscretizedOperator> {
    if let Some((t, r)) = p.scaling {
        if t.theta() != Complex64::new(0.0, 0.0) && r < layout.length() {
            return Err(Error::Unsupported(
                "the five-point scheme is only available without exterior scaling".into(),
            ));
        }
    }
    if p.mode.potential.smoothness() != Smoothness::Continuous {
        return Err(Error::Unsupported(
            "the five-point scheme needs a continuous potential".into(),
        ));
    }
    let layout = NodeLayout::new(layout.length(), layout.intervals(), &[]);
    let x = layout.nodes();
    let m = x.len() - 2;
    if m < 3 {
        return Err(crate::error::invalid(
            "too few nodes for the five-point scheme",
        ));
    }
    let h = x[1] - x[0];
    let h2 = h * h;
    let c = |v: f64| Complex64::new(v, 0.0);
    let mut diag: Vec<Complex64> = (1..=m)
        .map(|j| c(2.5 / h2 + p.mode.mu + p.mode.potential.eval(x[j])))
        .collect();
    diag[0] -= 1.0 / (12.0 * h2);
    diag[m - 1] -= 1.0 / (12.0 * h2);
    let off1 = vec![c(-4.0 / (3.0 * h2)); m - 1];
    let off2 = vec![c(1.0 / (12.0 * h2)); m - 2];
    Ok(DiscretizedOperator {
        bands: vec![diag, off1, off2],
        nodes: x[1..=m].to_vec(),
        contour: x[1..=m].iter().map(|&u| c(u)).collect(),
        weights: vec![c(h); m],
        layout,
        scheme: Scheme::Fd4,
        tag: p.tag(),
    })
}
