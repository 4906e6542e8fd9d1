//! Poles of the continued resolvent as zeros of det(I + G).

use ndarray::Array1;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::numerics::{dense, richardson};
use crate::spectral::{surface_point, Approach, Sheet, SpectralSurfacePoint};

use super::parametrix::{CoreModel, ModeParametrix, Parametrix, ParametrixGrid};

/// Closed rectangle in the λ-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchRect {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl SearchRect {
    pub fn new(re: (f64, f64), im: (f64, f64)) -> Result<Self> {
        if !(re.0 < re.1 && im.0 < im.1) {
            return Err(invalid("search rectangle is empty"));
        }
        Ok(Self { re, im })
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re.0 && z.re <= self.re.1 && z.im >= self.im.0 && z.im <= self.im.1
    }

    fn distance_to(&self, z: Complex64) -> f64 {
        let dx = (self.re.0 - z.re).max(0.0).max(z.re - self.re.1);
        let dy = (self.im.0 - z.im).max(0.0).max(z.im - self.im.1);
        dx.hypot(dy)
    }
}

/// Margin kept between the rectangle and every threshold.
pub const THRESHOLD_MARGIN: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct PoleSearchConfig {
    /// Lattice steps, coarsest first; extrapolated in h².
    pub steps: Vec<f64>,
    /// Extent of the lattice beyond the core radius.
    pub end_length: f64,
    pub scan: (usize, usize),
    /// Acceptance bound on σ_min/σ_max of I + G at a converged zero.
    pub null_ratio: f64,
    pub tolerance: f64,
}

impl Default for PoleSearchConfig {
    fn default() -> Self {
        Self {
            steps: vec![0.02, 0.01, 0.005],
            end_length: 10.0,
            scan: (40, 20),
            null_ratio: 1e-8,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pole {
    pub z: Complex64,
    pub mode: String,
    pub multiplicity: usize,
    /// Zero on each lattice step.
    pub levels: Vec<Complex64>,
    pub error_estimate: f64,
    /// σ_min/σ_max of I + G at the finest level.
    pub null_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PoleSearchResult {
    pub poles: Vec<Pole>,
    /// Scan minima on the rectangle boundary that did not lead to a pole.
    pub inconclusive: Vec<Complex64>,
    pub warnings: Vec<String>,
}

fn point_for(
    block: &ModeParametrix,
    lambda: Complex64,
    sheets: &[(f64, Sheet)],
) -> Result<SpectralSurfacePoint> {
    let sheet = sheets
        .iter()
        .find(|(mu, _)| (mu - block.mode.mu).abs() <= 1e-12 * (1.0 + mu.abs()))
        .map(|s| s.1)
        .ok_or_else(|| invalid(format!("no sheet given for threshold {}", block.mode.mu)))?;
    surface_point(lambda, &[block.mode.mu], &[sheet], Approach::Exact)
}

fn sigma_ratio(block: &ModeParametrix, lambda: Complex64, sheets: &[(f64, Sheet)]) -> Result<f64> {
    let m = block.compressed(&point_for(block, lambda, sheets)?)?;
    let s = dense::singular_values(&m)?;
    Ok(s[s.len() - 1] / s[0])
}

/// Fixed probe vectors for the scalar reduction 1/(yᵀM⁻¹x).
fn probe(n: usize, phase: f64) -> Array1<Complex64> {
    Array1::from_iter((0..n).map(|j| {
        Complex64::new(
            (phase + 0.754877666 * j as f64).sin(),
            (phase * 1.3 + j as f64).cos(),
        )
    }))
}

/// Secant iteration on 1/(yᵀM(λ)⁻¹x), which vanishes where M is singular.
fn secant(
    block: &ModeParametrix,
    start: Complex64,
    sheets: &[(f64, Sheet)],
    scale: f64,
) -> Result<Complex64> {
    let g = |z: Complex64| -> Result<Complex64> {
        let m = block.compressed(&point_for(block, z, sheets)?)?;
        let n = m.nrows();
        let x = dense::solve(&m, &probe(n, 0.3))?;
        let y = probe(n, 1.7);
        Ok(1.0
            / y.iter()
                .zip(x.iter())
                .map(|(a, b)| a * b)
                .sum::<Complex64>())
    };
    let mut z0 = start;
    let mut z1 = start + Complex64::new(1e-3 * scale, 1e-4 * scale);
    let mut g0 = g(z0)?;
    let mut g1 = g(z1)?;
    for _ in 0..60 {
        let d = g1 - g0;
        if d.norm() == 0.0 || !d.re.is_finite() {
            break;
        }
        let z2 = z1 - g1 * (z1 - z0) / d;
        z0 = z1;
        g0 = g1;
        z1 = z2;
        if (z1 - z0).norm() <= 1e-14 * (1.0 + z1.norm()) {
            return Ok(z1);
        }
        g1 = g(z1)?;
    }
    Err(Error::NoConvergence(format!("pole search from {start}")))
}

/// Local minima of a scanned field, boundary nodes included.
fn local_minima(field: &[Vec<f64>]) -> Vec<(usize, usize)> {
    let nx = field.len();
    let ny = field[0].len();
    let mut out = Vec::new();
    for i in 0..nx {
        for j in 0..ny {
            let v = field[i][j];
            let mut is_min = v.is_finite();
            for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    let (a, b) = (i as i64 + di, j as i64 + dj);
                    if (di, dj) != (0, 0)
                        && a >= 0
                        && b >= 0
                        && (a as usize) < nx
                        && (b as usize) < ny
                    {
                        is_min &= v <= field[a as usize][b as usize];
                    }
                }
            }
            if is_min {
                out.push((i, j));
            }
        }
    }
    out
}

/// Zeros of z ↦ σ_min(I + G(Λ(z))) in `rect`, with each branch Λ_i on the
/// given sheet. Modes decouple, so each distinct mode is searched separately.
pub fn pole_search(
    sheets: &[(f64, Sheet)],
    rect: SearchRect,
    core: &CoreModel,
    cfg: &PoleSearchConfig,
) -> Result<PoleSearchResult> {
    if cfg.steps.is_empty() {
        return Err(Error::Empty("lattice steps"));
    }
    for mu in core.thresholds() {
        let d = rect.distance_to(Complex64::new(mu, 0.0));
        if d < THRESHOLD_MARGIN {
            return Err(invalid(format!(
                "search rectangle comes within {d:e} of threshold {mu}"
            )));
        }
    }
    let length = core.core_radius() + cfg.end_length;
    let levels: Vec<Parametrix> = cfg
        .steps
        .iter()
        .map(|&h| Parametrix::new(core, ParametrixGrid::new(h, length)?))
        .collect::<Result<_>>()?;
    // Zeros of det(I + G) include artefacts of the gluing; true poles do not
    // move when the core is glued one unit further out on the same lattice.
    let finest_step = cfg.steps[cfg.steps.len() - 1];
    let check = Parametrix::new(
        &core.with_core_radius(core.core_radius() + 1.0)?,
        ParametrixGrid::new(finest_step, length)?,
    )?;
    let scale = (rect.re.1 - rect.re.0).max(rect.im.1 - rect.im.0);
    let (nx, ny) = cfg.scan;
    let at = |i: usize, j: usize| {
        Complex64::new(
            rect.re.0 + (rect.re.1 - rect.re.0) * i as f64 / nx as f64,
            rect.im.0 + (rect.im.1 - rect.im.0) * j as f64 / ny as f64,
        )
    };

    let mut result = PoleSearchResult::default();
    for (b, coarse) in levels[0].blocks.iter().enumerate() {
        let field: Vec<Vec<f64>> = (0..=nx)
            .into_par_iter()
            .map(|i| {
                (0..=ny)
                    .map(|j| sigma_ratio(coarse, at(i, j), sheets).unwrap_or(f64::NAN))
                    .collect()
            })
            .collect();
        let mut found: Vec<Pole> = Vec::new();
        for (i, j) in local_minima(&field) {
            let start = at(i, j);
            let on_boundary = i == 0 || j == 0 || i == nx || j == ny;
            let mut zs = Vec::with_capacity(levels.len());
            let mut z = start;
            let mut ok = true;
            for lvl in &levels {
                match secant(&lvl.blocks[b], z, sheets, scale) {
                    Ok(w) => {
                        z = w;
                        zs.push(w);
                    }
                    Err(_) => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok || !rect.contains(zs[0]) {
                if on_boundary {
                    result.inconclusive.push(start);
                }
                continue;
            }
            let finest = levels.last().expect("at least one level");
            let last = zs[zs.len() - 1];
            let ratio = sigma_ratio(&finest.blocks[b], last, sheets)?;
            if ratio > cfg.null_ratio {
                continue;
            }
            let confirmed = secant(&check.blocks[b], last, sheets, scale)
                .map(|w| (w - last).norm() <= 1e-8 * (1.0 + last.norm()))
                .unwrap_or(false);
            if !confirmed {
                result.warnings.push(format!(
                    "zero of det(I + G) near {last} moves with the gluing radius; discarded"
                ));
                continue;
            }
            let value = richardson(&zs);
            let error_estimate = if zs.len() >= 2 {
                (value - richardson(&zs[zs.len() - 2..])).norm()
            } else {
                f64::NAN
            };
            if found
                .iter()
                .any(|p| (p.z - value).norm() <= 1e3 * cfg.tolerance)
            {
                continue;
            }
            if error_estimate > cfg.tolerance {
                result.warnings.push(format!(
                    "pole near {value} refined only to {error_estimate:e}"
                ));
            }
            found.push(Pole {
                z: value,
                mode: coarse.mode.label.clone(),
                multiplicity: coarse.multiplicity,
                levels: zs,
                error_estimate,
                null_ratio: ratio,
            });
        }
        result.poles.extend(found);
    }
    result
        .poles
        .sort_by(|a, b| a.z.re.total_cmp(&b.z.re).then(a.z.im.total_cmp(&b.z.im)));
    Ok(result)
}
