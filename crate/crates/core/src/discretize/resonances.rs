use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::modes::ModeOperator;
use crate::scaling::{dilate_mode, distance_to_rays, essential_rays, RaySet};
use crate::spectral::ScalingParameter;

use super::eig::{eig, RESIDUAL_BOUND};
use super::grid::Grid1D;
use super::operator::{assemble, ModeProblem};
use super::refine::refine_richardson;

pub const DEFAULT_THETA: Complex64 = Complex64::new(0.4, 0.3);

/// The five-point stability sweep.
pub fn default_theta_sweep() -> Vec<ScalingParameter> {
    [
        (0.35, 0.25),
        (0.4, 0.3),
        (0.45, 0.35),
        (0.5, 0.3),
        (0.4, 0.35),
    ]
    .iter()
    .map(|&(a, b)| {
        ScalingParameter::new(Complex64::new(a, b)).expect("sweep lies in the admissible region")
    })
    .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceConfig {
    pub thetas: Vec<ScalingParameter>,
    pub grid: Grid1D,
    /// Defaults to the largest potential support plus one.
    pub scaling_radius: Option<f64>,
    pub rays_tolerance: f64,
    pub stability_tolerance: f64,
    pub residual_bound: f64,
    /// Only eigenvalues with real part at most this are examined.
    pub max_energy: f64,
    /// Nested refinements used to extrapolate each candidate (0 disables).
    pub richardson_levels: usize,
    /// |Im z| below this (relative to 1 + |z|) counts as real.
    pub imag_tolerance: f64,
    /// Unrefined eigenvalues may sit this far (relative to 1 + |z|) on the
    /// wrong side of the real axis: bound states pick up a small imaginary
    /// part from the discretized exterior.
    pub half_plane_slack: f64,
}

impl ResonanceConfig {
    pub fn new(grid: Grid1D) -> Self {
        Self {
            thetas: default_theta_sweep(),
            grid,
            scaling_radius: None,
            rays_tolerance: 0.02,
            stability_tolerance: 1e-6,
            residual_bound: RESIDUAL_BOUND,
            max_energy: 30.0,
            richardson_levels: 2,
            imag_tolerance: 1e-8,
            half_plane_slack: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResonanceKind {
    BoundState,
    Resonance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Resonance {
    pub z: Complex64,
    pub residual: f64,
    pub theta_spread: f64,
    pub multiplicity: usize,
    pub mode: String,
    pub kind: ResonanceKind,
    pub error_estimate: f64,
    pub method: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResonanceSet {
    pub items: Vec<Resonance>,
    pub warnings: Vec<String>,
    pub provenance: String,
}

impl ResonanceSet {
    pub fn resonances(&self) -> impl Iterator<Item = &Resonance> {
        self.items
            .iter()
            .filter(|r| r.kind == ResonanceKind::Resonance)
    }

    pub fn bound_states(&self) -> impl Iterator<Item = &Resonance> {
        self.items
            .iter()
            .filter(|r| r.kind == ResonanceKind::BoundState)
    }

    /// Item closest to `z`.
    pub fn nearest(&self, z: Complex64) -> Option<&Resonance> {
        self.items
            .iter()
            .min_by(|a, b| (a.z - z).norm().total_cmp(&(b.z - z).norm()))
    }
}

/// A candidate point of one (mode, θ) eigensolve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub z: Complex64,
    pub residual: f64,
    pub error_estimate: f64,
}

/// Which half-plane the sweep reveals.
fn sweep_orientation(thetas: &[ScalingParameter]) -> Result<f64> {
    if thetas.is_empty() {
        return Err(Error::Empty("theta sweep"));
    }
    let mut sign = 0.0;
    for t in thetas {
        let s = t.theta().im.signum() * (t.theta().im != 0.0) as i32 as f64;
        if s != 0.0 {
            if sign != 0.0 && s != sign {
                return Err(invalid(
                    "all sweep parameters must share the sign of Im theta",
                ));
            }
            sign = s;
        }
    }
    Ok(sign)
}

/// Off-ray candidates of one scaled mode, refined on nested grids.
pub fn mode_candidates(
    mode: &ModeOperator,
    theta: ScalingParameter,
    radius: f64,
    cfg: &ResonanceConfig,
    orientation: f64,
) -> Result<Vec<Candidate>> {
    let scaled = dilate_mode(mode, theta, radius)?;
    let problem = ModeProblem::scaled(&scaled);
    let layout = cfg.grid.layout(&problem.breakpoints());
    if cfg.grid.length <= radius {
        return Err(Error::GridTooShort(format!(
            "L = {} must exceed R0 = {radius}",
            cfg.grid.length
        )));
    }
    let op = assemble(&problem, &layout, cfg.grid.scheme)?;
    let rays = essential_rays(
        &[(Complex64::new(mode.mu, 0.0), mode.label.clone())],
        &theta,
    )?;
    let pairs = eig(&op)?;
    let mut out = Vec::new();
    for p in pairs {
        let z = p.value;
        if !keep(z, &rays, cfg, orientation) {
            continue;
        }
        if cfg.richardson_levels == 0 {
            out.push(Candidate {
                z,
                residual: p.residual,
                error_estimate: f64::NAN,
            });
            continue;
        }
        if let Ok(r) =
            refine_richardson(&problem, &layout, cfg.grid.scheme, z, cfg.richardson_levels)
        {
            out.push(Candidate {
                z: r.value,
                residual: p.residual,
                error_estimate: r.error_estimate,
            });
        }
    }
    Ok(out)
}

fn keep(z: Complex64, rays: &RaySet, cfg: &ResonanceConfig, orientation: f64) -> bool {
    if z.re > cfg.max_energy || z.im.abs() > cfg.max_energy {
        return false;
    }
    if distance_to_rays(z, rays) <= cfg.rays_tolerance * (1.0 + z.norm()) {
        return false;
    }
    let tol = cfg.half_plane_slack.max(cfg.imag_tolerance) * (1.0 + z.norm());
    match orientation {
        o if o > 0.0 => z.im <= tol,
        o if o < 0.0 => z.im >= -tol,
        _ => z.im.abs() <= tol,
    }
}

/// Resonance only when strictly inside the half-plane the sweep reveals.
pub fn classify(z: Complex64, orientation: f64, imag_tolerance: f64) -> ResonanceKind {
    if -orientation * z.im > imag_tolerance * (1.0 + z.norm()) {
        ResonanceKind::Resonance
    } else {
        ResonanceKind::BoundState
    }
}

/// A chain of candidates, one per θ.
#[derive(Debug, Clone)]
pub struct Cluster {
    pub members: Vec<Candidate>,
}

impl Cluster {
    pub fn mean(&self) -> Complex64 {
        self.members.iter().map(|c| c.z).sum::<Complex64>() / self.members.len() as f64
    }

    pub fn spread(&self) -> f64 {
        let m = self.mean();
        self.members
            .iter()
            .map(|c| (c.z - m).norm())
            .fold(0.0, f64::max)
    }
}

/// Greedy nearest-neighbour chaining across the sweep, seeded by the first θ
/// and ordered by |Im z| descending. Seeds that cannot be linked in every θ
/// are dropped.
pub fn cluster_across_sweep(per_theta: &[Vec<Candidate>], link_radius: f64) -> Vec<Cluster> {
    let Some(first) = per_theta.first() else {
        return Vec::new();
    };
    let mut seeds = first.clone();
    seeds.sort_by(|a, b| {
        b.z.im
            .abs()
            .total_cmp(&a.z.im.abs())
            .then(a.z.re.total_cmp(&b.z.re))
    });
    let mut used: Vec<Vec<bool>> = per_theta.iter().map(|l| vec![false; l.len()]).collect();
    let mut out = Vec::new();
    'seed: for s in seeds {
        let mut members = vec![s];
        let mut picks = Vec::new();
        let mut current = s.z;
        for (t, list) in per_theta.iter().enumerate().skip(1) {
            let best = list
                .iter()
                .enumerate()
                .filter(|(i, _)| !used[t][*i])
                .min_by(|a, b| {
                    (a.1.z - current)
                        .norm()
                        .total_cmp(&(b.1.z - current).norm())
                });
            match best {
                Some((i, c)) if (c.z - current).norm() <= link_radius * (1.0 + current.norm()) => {
                    picks.push((t, i));
                    members.push(*c);
                    current = c.z;
                }
                _ => continue 'seed,
            }
        }
        for (t, i) in picks {
            used[t][i] = true;
        }
        out.push(Cluster { members });
    }
    out
}

/// Round-trip attenuation of the scaled outgoing wave between R0 and L,
/// worst case over the sweep.
fn truncation_echo(
    z: Complex64,
    mu: f64,
    kind: ResonanceKind,
    radius: f64,
    cfg: &ResonanceConfig,
) -> f64 {
    let kappa = match kind {
        ResonanceKind::BoundState => Complex64::new(0.0, (mu - z.re).max(0.0).sqrt()),
        ResonanceKind::Resonance => (z - mu).sqrt(),
    };
    let span = cfg.grid.length - radius;
    cfg.thetas
        .iter()
        .map(|t| (-2.0 * (kappa * t.stretch()).im * span).exp())
        .fold(0.0, f64::max)
}

/// Resonances and bound states of a list of decoupled mode operators.
pub fn find_resonances(model: &[ModeOperator], cfg: &ResonanceConfig) -> Result<ResonanceSet> {
    let orientation = sweep_orientation(&cfg.thetas)?;
    if model.is_empty() {
        return Err(Error::Empty("model"));
    }
    let support = model
        .iter()
        .map(|m| m.potential.support_radius())
        .fold(0.0, f64::max);
    let radius = cfg.scaling_radius.unwrap_or(support + 1.0);

    // Identical operators are solved once and carried as multiplicity.
    let mut groups: Vec<(ModeOperator, usize)> = Vec::new();
    for m in model {
        match groups.iter_mut().find(|(g, _)| g.same_operator(m)) {
            Some((_, k)) => *k += 1,
            None => groups.push((m.clone(), 1)),
        }
    }

    let tasks: Vec<(usize, usize)> = (0..groups.len())
        .flat_map(|g| (0..cfg.thetas.len()).map(move |t| (g, t)))
        .collect();
    let results: Vec<Result<Vec<Candidate>>> = tasks
        .par_iter()
        .map(|&(g, t)| mode_candidates(&groups[g].0, cfg.thetas[t], radius, cfg, orientation))
        .collect();

    let mut set = ResonanceSet {
        provenance: format!(
            "complex scaling: L={} n={} scheme={:?} R0={radius} thetas={} richardson={}",
            cfg.grid.length,
            cfg.grid.n_points,
            cfg.grid.scheme,
            cfg.thetas.len(),
            cfg.richardson_levels
        ),
        ..Default::default()
    };
    let mut results = results.into_iter();
    for (mode, multiplicity) in &groups {
        let per_theta: Vec<Vec<Candidate>> = (0..cfg.thetas.len())
            .map(|_| results.next().expect("one result per task"))
            .collect::<Result<_>>()?;
        let link = (10.0 * cfg.stability_tolerance).max(1e-3);
        let clusters = cluster_across_sweep(&per_theta, link);
        let mut emitted: Vec<Resonance> = Vec::new();
        for c in clusters {
            let spread = c.spread();
            if spread > cfg.stability_tolerance {
                set.warnings.push(format!(
                    "{}: candidate near {} is not theta-stable (spread {spread:.1e}); a longer box may resolve it",
                    mode.label,
                    c.mean()
                ));
                continue;
            }
            let z = c.mean();
            let residual = c.members.iter().map(|m| m.residual).fold(0.0, f64::max);
            if residual > cfg.residual_bound {
                set.warnings.push(format!(
                    "{}: candidate {z} dropped, residual {residual:e}",
                    mode.label
                ));
                continue;
            }
            let kind = classify(z, orientation, cfg.imag_tolerance);
            let echo = truncation_echo(z, mode.mu, kind, radius, cfg);
            if echo > cfg.stability_tolerance {
                set.warnings.push(format!(
                    "{}: {z} sees a reflection of {echo:.1e} from the box end; increase L",
                    mode.label
                ));
            }
            emitted.push(Resonance {
                z,
                residual,
                theta_spread: spread,
                multiplicity: *multiplicity,
                mode: mode.label.clone(),
                kind,
                error_estimate: c
                    .members
                    .iter()
                    .map(|m| m.error_estimate)
                    .fold(0.0, f64::max),
                method: "complex-scaling".into(),
            });
        }
        for i in 0..emitted.len() {
            for j in i + 1..emitted.len() {
                if (emitted[i].z - emitted[j].z).norm() <= 2.0 * cfg.stability_tolerance {
                    set.warnings.push(format!(
                        "{}: ambiguous clusters at {} and {}",
                        mode.label, emitted[i].z, emitted[j].z
                    ));
                }
            }
        }
        set.items.extend(emitted);
    }
    set.items
        .sort_by(|a, b| a.z.re.total_cmp(&b.z.re).then(a.z.im.total_cmp(&b.z.im)));
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cand(re: f64, im: f64) -> Candidate {
        Candidate {
            z: Complex64::new(re, im),
            residual: 0.0,
            error_estimate: 0.0,
        }
    }

    #[test]
    fn chaining_links_stable_points_only() {
        let per = vec![
            vec![cand(1.0, -0.1), cand(5.0, -2.0)],
            vec![cand(1.0, -0.1 + 1e-8), cand(5.5, -2.3)],
            vec![cand(1.0 + 1e-8, -0.1), cand(6.0, -2.6)],
        ];
        let cl = cluster_across_sweep(&per, 1e-3);
        assert_eq!(cl.len(), 1);
        assert!(cl[0].spread() < 1e-7);
    }

    #[test]
    fn mixed_sweep_rejected() {
        let t = vec![
            ScalingParameter::new(Complex64::new(0.4, 0.3)).unwrap(),
            ScalingParameter::new(Complex64::new(0.4, -0.3)).unwrap(),
        ];
        assert!(sweep_orientation(&t).is_err());
        assert!(sweep_orientation(&[]).is_err());
    }

    #[test]
    fn bound_states_survive_discretization_drift() {
        // Unrefined bound states sit slightly above the axis at complex θ.
        assert_eq!(
            classify(cand(-0.93, 2e-6).z, 1.0, 1e-8),
            ResonanceKind::BoundState
        );
        assert_eq!(
            classify(cand(5.0, -0.08).z, 1.0, 1e-8),
            ResonanceKind::Resonance
        );
        assert_eq!(
            classify(cand(5.0, -0.08).z, 0.0, 1e-8),
            ResonanceKind::BoundState
        );

        let well = crate::modes::RadialPotential::square_well(5.0, 1.0).unwrap();
        let mut cfg = ResonanceConfig::new(Grid1D::fd2(12.0, 299).unwrap());
        cfg.max_energy = 3.0;
        cfg.scaling_radius = Some(3.0);
        for levels in [0, 2] {
            cfg.richardson_levels = levels;
            let set =
                find_resonances(&[ModeOperator::cylindrical(0.0, well.clone())], &cfg).unwrap();
            let b: Vec<_> = set.bound_states().collect();
            assert_eq!(b.len(), 1, "levels {levels}: {:?}", set.items);
            assert!((b[0].z.re + 0.931426).abs() < 1e-3);
        }
    }
}
