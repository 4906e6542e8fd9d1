//! Where the point spectrum of a model family piles up.
//!
//! Allowed accumulation points: ∞, the transverse thresholds and the channel
//! eigenvalues. Births of new eigenvalue branches and tight clusters inside a
//! single member are compared against that set.

use crate::discretize::{bound_states, Grid1D};
use crate::error::{invalid, Error, Result};
use crate::modes::{ModeOperator, RadialPotential};

use super::{Channel, CornerModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PpSource {
    Channel(Channel),
    /// Product eigenfunction of both faces.
    Corner,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PpEntry {
    pub parameter: f64,
    pub value: f64,
    pub source: PpSource,
    pub mu: f64,
    /// Branch label: (k, 0) for channel states, (i, j) for corner products.
    pub index: (usize, usize),
    pub allowed_distance: f64,
    /// Nearest allowed accumulation point.
    pub target: f64,
}

/// First appearance of a branch along the family.
#[derive(Debug, Clone, PartialEq)]
pub struct Birth {
    pub entry: PpEntry,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AccumulationConfig {
    pub grid: Grid1D,
    /// Births and clusters within this distance of the allowed set are accepted.
    pub birth_tolerance: f64,
    /// Bisection steps locating the parameter where a branch appears.
    pub birth_refinement: usize,
    /// Consecutive gap below which eigenvalues count as clustered.
    pub cluster_gap: f64,
    pub cluster_size: usize,
}

impl AccumulationConfig {
    pub fn new(grid: Grid1D) -> Self {
        Self {
            grid,
            birth_tolerance: 1e-3,
            birth_refinement: 30,
            cluster_gap: 1e-3,
            cluster_size: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AccumulationReport {
    pub entries: Vec<PpEntry>,
    pub births: Vec<Birth>,
    /// Distinct nearest allowed points of the births.
    pub targets: Vec<f64>,
    /// Entries farther than the tolerance from the allowed set.
    pub discrete: Vec<PpEntry>,
    /// Apparent accumulation away from the allowed set.
    pub flags: Vec<String>,
}

impl AccumulationReport {
    pub fn is_consistent(&self) -> bool {
        self.flags.is_empty()
    }
}

type Key = (PpSource, u64, (usize, usize));

fn key(e: &PpEntry) -> Key {
    (e.source, e.mu.to_bits(), e.index)
}

fn face_levels(v: &RadialPotential, grid: &Grid1D) -> Result<Vec<f64>> {
    if v.is_zero() {
        return Ok(Vec::new());
    }
    Ok(
        bound_states(&ModeOperator::cylindrical(0.0, v.clone()), grid, 0)?
            .into_iter()
            .map(|b| b.value)
            .collect(),
    )
}

fn nearest(x: f64, set: &[f64]) -> (f64, f64) {
    set.iter()
        .map(|&a| ((x - a).abs(), a))
        .fold(
            (f64::INFINITY, f64::NAN),
            |b, c| if c.0 < b.0 { c } else { b },
        )
}

/// Channel bound states (allowed set: thresholds) and corner products
/// (allowed set: thresholds and channel values) of one member.
fn member_entries(p: f64, model: &CornerModel, grid: &Grid1D) -> Result<Vec<PpEntry>> {
    if !model.coupling.is_zero() {
        return Err(Error::Unsupported(
            "accumulation checks need a separable corner".into(),
        ));
    }
    let e1 = face_levels(&model.z1, grid)?;
    let e2 = face_levels(&model.z2, grid)?;
    let thresholds = model.thresholds();
    let mut out = Vec::new();
    let entry = |value: f64, source, mu, index, allowed: &[f64]| {
        let (allowed_distance, target) = nearest(value, allowed);
        PpEntry {
            parameter: p,
            value,
            source,
            mu,
            index,
            allowed_distance,
            target,
        }
    };
    for &mu in &thresholds {
        let mut channel_values = thresholds.clone();
        channel_values.extend(e1.iter().chain(&e2).map(|e| e + mu));
        for (k, &e) in e1.iter().enumerate() {
            out.push(entry(
                e + mu,
                PpSource::Channel(Channel::One),
                mu,
                (k, 0),
                &thresholds,
            ));
        }
        for (k, &e) in e2.iter().enumerate() {
            out.push(entry(
                e + mu,
                PpSource::Channel(Channel::Two),
                mu,
                (k, 0),
                &thresholds,
            ));
        }
        for (i, &a) in e1.iter().enumerate() {
            for (j, &b) in e2.iter().enumerate() {
                out.push(entry(
                    a + b + mu,
                    PpSource::Corner,
                    mu,
                    (i, j),
                    &channel_values,
                ));
            }
        }
    }
    Ok(out)
}

/// Pp eigenvalues of every member of `family` at `parameters` (ascending),
/// their distance to the allowed set, where new branches are born and any
/// cluster away from the set. A branch absent at one sample and present at
/// the next is traced back by bisection on the parameter, so its birth value
/// is where it leaves the continuum.
pub fn accumulation_check<F>(
    family: F,
    parameters: &[f64],
    cfg: &AccumulationConfig,
) -> Result<AccumulationReport>
where
    F: Fn(f64) -> Result<CornerModel>,
{
    if parameters.is_empty() {
        return Err(Error::Empty("parameter sweep"));
    }
    if parameters.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("parameters must increase"));
    }
    let mut report = AccumulationReport::default();
    let mut previous: Vec<Key> = Vec::new();
    for (step, &p) in parameters.iter().enumerate() {
        let member = member_entries(p, &family(p)?, &cfg.grid)?;
        if step > 0 {
            for e in member.iter().filter(|e| !previous.contains(&key(e))) {
                let k = key(e);
                let (mut lo, mut hi) = (parameters[step - 1], p);
                let mut born = e.clone();
                for _ in 0..cfg.birth_refinement {
                    let mid = 0.5 * (lo + hi);
                    match member_entries(mid, &family(mid)?, &cfg.grid)?
                        .into_iter()
                        .find(|x| key(x) == k)
                    {
                        Some(x) => {
                            hi = mid;
                            born = x;
                        }
                        None => lo = mid,
                    }
                }
                if born.allowed_distance > cfg.birth_tolerance {
                    report.flags.push(format!(
                        "branch {:?} {:?} born at {} (parameter {}) at distance {:.3e} from the allowed set",
                        born.source, born.index, born.value, born.parameter, born.allowed_distance
                    ));
                }
                report.births.push(Birth { entry: born });
            }
        }
        previous = member.iter().map(key).collect();
        report.discrete.extend(
            member
                .iter()
                .filter(|e| e.allowed_distance > cfg.birth_tolerance)
                .cloned(),
        );

        // Tight runs of eigenvalues inside one member.
        let mut values: Vec<&PpEntry> = member.iter().collect();
        values.sort_by(|a, b| a.value.total_cmp(&b.value));
        let mut start = 0;
        for k in 1..=values.len() {
            if k == values.len() || values[k].value - values[k - 1].value >= cfg.cluster_gap {
                let run = &values[start..k];
                if run.len() >= cfg.cluster_size
                    && run.iter().all(|e| e.allowed_distance > cfg.birth_tolerance)
                {
                    let center = run.iter().map(|e| e.value).sum::<f64>() / run.len() as f64;
                    report.flags.push(format!(
                        "{} eigenvalues cluster near {center} (parameter {p}) away from the allowed set",
                        run.len()
                    ));
                }
                start = k;
            }
        }
        report.entries.extend(member);
    }
    for b in &report.births {
        if !report
            .targets
            .iter()
            .any(|t| (t - b.entry.target).abs() <= 1e-9 * (1.0 + t.abs()))
        {
            report.targets.push(b.entry.target);
        }
    }
    report.targets.sort_by(f64::total_cmp);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corner::Coupling;
    use crate::spectral::{make_cross_section, CrossSection};

    fn corner(z1: RadialPotential, z2: RadialPotential) -> CornerModel {
        let y = make_cross_section(&CrossSection::Point, 10.0).unwrap();
        CornerModel::new(z1, z2, y, Coupling::Zero, 1.5).unwrap()
    }

    #[test]
    fn free_family_has_no_point_spectrum() {
        let fam = |_: f64| Ok(corner(RadialPotential::zero(), RadialPotential::zero()));
        let r = accumulation_check(
            fam,
            &[0.0, 1.0, 2.0],
            &AccumulationConfig::new(Grid1D::fd2(20.0, 999).unwrap()),
        )
        .unwrap();
        assert!(r.entries.is_empty() && r.births.is_empty() && r.is_consistent());
    }

    #[test]
    fn off_set_cluster_is_flagged() {
        // A huge gap puts all deep-well states in one run, far from the threshold.
        let mut cfg = AccumulationConfig::new(Grid1D::fd2(20.0, 999).unwrap());
        cfg.cluster_gap = 1e3;
        cfg.birth_tolerance = 1e-6;
        let well = RadialPotential::square_well(200.0, 1.0).unwrap();
        let r = accumulation_check(
            |_| Ok(corner(well.clone(), RadialPotential::zero())),
            &[0.0],
            &cfg,
        )
        .unwrap();
        assert!(!r.is_consistent());
    }
}
