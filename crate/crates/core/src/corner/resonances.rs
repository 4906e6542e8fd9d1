use num_complex::Complex64;
use rayon::prelude::*;

use crate::discretize::{
    classify, cluster_across_sweep, default_theta_sweep, Candidate, Resonance, ResonanceConfig,
    ResonanceSet,
};
use crate::error::{invalid, Error, Result};
use crate::scaling::distance_to_rays;
use crate::spectral::ScalingParameter;

use super::operator::{corner_discretize, Grid2D, SolvePath};
use super::{channel_spectra, mode_rays, CornerModel};

#[derive(Debug, Clone, PartialEq)]
pub struct CornerResonanceConfig {
    pub grid: Grid2D,
    pub thetas: Vec<ScalingParameter>,
    pub rays_tolerance: f64,
    /// Allowed θ-spread; no extrapolation is done in two dimensions.
    pub stability_tolerance: f64,
    pub max_energy: f64,
    pub imag_tolerance: f64,
    /// As in the one-dimensional search.
    pub half_plane_slack: f64,
    pub path: SolvePath,
    /// Settings for the one-dimensional channel problems.
    pub channels: ResonanceConfig,
}

impl CornerResonanceConfig {
    pub fn new(grid: Grid2D) -> Self {
        Self {
            grid,
            thetas: default_theta_sweep(),
            rays_tolerance: 0.02,
            stability_tolerance: 1e-3,
            max_energy: 30.0,
            imag_tolerance: 1e-8,
            half_plane_slack: 1e-4,
            path: SolvePath::Auto,
            channels: ResonanceConfig::new(grid.axis),
        }
    }
}

/// θ-stable eigenvalues of the scaled corner operator off the channel rays.
pub fn corner_resonances(model: &CornerModel, cfg: &CornerResonanceConfig) -> Result<ResonanceSet> {
    if cfg.thetas.is_empty() {
        return Err(Error::Empty("theta sweep"));
    }
    if cfg.thetas.iter().any(|t| t.theta().im < 0.0) {
        return Err(invalid("corner sweeps use Im theta >= 0"));
    }
    let orientation = if cfg.thetas.iter().any(|t| t.theta().im > 0.0) {
        1.0
    } else {
        0.0
    };
    let mut ch_cfg = cfg.channels.clone();
    ch_cfg.thetas = cfg.thetas.clone();
    let channels = channel_spectra(model, &ch_cfg)?;
    let modes: Vec<(f64, u32)> = model
        .cross_section
        .entries()
        .iter()
        .map(|t| (t.mu, t.multiplicity))
        .collect();

    let tasks: Vec<(usize, usize)> = (0..modes.len())
        .flat_map(|m| (0..cfg.thetas.len()).map(move |t| (m, t)))
        .collect();
    let per_task: Vec<Result<Vec<Candidate>>> = tasks
        .par_iter()
        .map(|&(m, t)| {
            let theta = cfg.thetas[t];
            let mu = modes[m].0;
            let rays = mode_rays(&channels, mu, &theta)?;
            let op = corner_discretize(model, mu, theta, &cfg.grid)?;
            Ok(op
                .eigenvalues(cfg.path)?
                .into_iter()
                .filter(|&z| {
                    z.re <= cfg.max_energy
                        && z.im.abs() <= cfg.max_energy
                        && z.im <= cfg.half_plane_slack.max(cfg.imag_tolerance) * (1.0 + z.norm())
                        && distance_to_rays(z, &rays) > cfg.rays_tolerance * (1.0 + z.norm())
                })
                .map(|z| Candidate {
                    z,
                    residual: 0.0,
                    error_estimate: f64::NAN,
                })
                .collect())
        })
        .collect();

    let mut set = ResonanceSet {
        warnings: channels.warnings.clone(),
        provenance: format!(
            "corner complex scaling: L={} n={}/axis R0={} thetas={}",
            cfg.grid.axis.length,
            cfg.grid.axis.n_points,
            model.radius,
            cfg.thetas.len()
        ),
        ..Default::default()
    };
    let mut results = per_task.into_iter();
    for &(mu, multiplicity) in &modes {
        let per_theta: Vec<Vec<Candidate>> = (0..cfg.thetas.len())
            .map(|_| results.next().expect("one result per task"))
            .collect::<Result<_>>()?;
        let link = (10.0 * cfg.stability_tolerance).max(1e-3);
        for c in cluster_across_sweep(&per_theta, link) {
            let spread = c.spread();
            if spread > cfg.stability_tolerance {
                continue;
            }
            let z: Complex64 = c.mean();
            let kind = classify(z, orientation, cfg.imag_tolerance);
            set.items.push(Resonance {
                z,
                // Not evaluated for the two-dimensional solves.
                residual: f64::NAN,
                theta_spread: spread,
                multiplicity: multiplicity as usize,
                mode: format!("mu={mu}"),
                kind,
                error_estimate: spread,
                method: "corner-complex-scaling".into(),
            });
        }
    }
    set.items
        .sort_by(|a, b| a.z.re.total_cmp(&b.z.re).then(a.z.im.total_cmp(&b.z.im)));
    Ok(set)
}
