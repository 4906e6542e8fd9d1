//! Reduction of model Laplacians to one-dimensional mode operators.

mod cusp;
mod potential;
mod profile;

use std::collections::BTreeMap;

pub use cusp::{continuum_edge, cusp_to_schrodinger, LineOperator};
pub use potential::{PotentialShape, RadialPotential, Smoothness};
pub use profile::Profile;

use crate::error::{invalid, Result};
use crate::spectral::CrossSectionSpectrum;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeKind {
    /// −d²/du² + μ + V(u) on the half-line, Dirichlet at 0.
    Cylindrical,
    /// −u²d²/du² + (n−2)u d/du + μu² in L²(u^{−n}du), n = dim of the cusp.
    Cusp { dimension: u32 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeOperator {
    pub kind: ModeKind,
    pub mu: f64,
    pub potential: RadialPotential,
    pub label: String,
}

impl ModeOperator {
    pub fn cylindrical(mu: f64, potential: RadialPotential) -> Self {
        Self {
            kind: ModeKind::Cylindrical,
            mu,
            potential,
            label: format!("mu={mu}"),
        }
    }

    pub fn free(mu: f64) -> Self {
        Self::cylindrical(mu, RadialPotential::zero())
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Coefficients (a₂, a₁, a₀) of −a₂u²∂² + a₁u∂ + a₀u² for cusp modes.
    pub fn cusp_coefficients(&self) -> Option<(f64, f64, f64)> {
        match self.kind {
            ModeKind::Cusp { dimension } => Some((1.0, dimension as f64 - 2.0, self.mu)),
            ModeKind::Cylindrical => None,
        }
    }

    /// Same operator up to the label.
    pub fn same_operator(&self, other: &Self) -> bool {
        self.kind == other.kind && self.mu == other.mu && self.potential == other.potential
    }
}

/// One cylindrical mode operator per transverse mode (multiplicities expanded).
/// `potentials` is keyed by the expanded mode index; missing entries are free.
pub fn reduce_cylindrical(
    cross_section: &CrossSectionSpectrum,
    potentials: &BTreeMap<usize, RadialPotential>,
) -> Result<Vec<ModeOperator>> {
    let mus = cross_section.mode_values();
    if let Some((&k, _)) = potentials.range(mus.len()..).next() {
        return Err(invalid(format!(
            "potential given for mode {k} but only {} modes are tracked",
            mus.len()
        )));
    }
    let mut out = Vec::with_capacity(mus.len());
    for (i, &mu) in mus.iter().enumerate() {
        let potential = potentials
            .get(&i)
            .cloned()
            .unwrap_or_else(RadialPotential::zero);
        if !potential.support_radius().is_finite() {
            return Err(invalid(format!("mode {i}: potential support is unbounded")));
        }
        out.push(ModeOperator {
            kind: ModeKind::Cylindrical,
            mu,
            potential,
            label: format!("mode {i} (mu={mu})"),
        });
    }
    Ok(out)
}

/// One cusp operator per tracked mode of a cusp end of dimension `n`.
pub fn reduce_cusp(cross_section: &CrossSectionSpectrum, n: u32) -> Result<Vec<ModeOperator>> {
    if n < 2 {
        return Err(invalid("cusp dimension must be at least 2"));
    }
    Ok(cross_section
        .mode_values()
        .into_iter()
        .enumerate()
        .map(|(i, mu)| ModeOperator {
            kind: ModeKind::Cusp { dimension: n },
            mu,
            potential: RadialPotential::zero(),
            label: format!("cusp mode {i} (mu={mu}, n={n})"),
        })
        .collect())
}

/// Mode-k potential of the warped product du² + f(u)²dφ².
pub fn warped_product_potential(profile: &Profile, k: u32) -> Result<RadialPotential> {
    RadialPotential::warped(profile.clone(), k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{make_cross_section, CrossSection};

    #[test]
    fn circle_free_modes() {
        let cs = make_cross_section(&CrossSection::Circle { radius: 1.0 }, 5.0).unwrap();
        let ops = reduce_cylindrical(&cs, &BTreeMap::new()).unwrap();
        let mus: Vec<f64> = ops.iter().map(|o| o.mu).collect();
        assert_eq!(mus, vec![0.0, 1.0, 1.0, 4.0, 4.0]);
        assert!(ops.iter().all(|o| o.potential.is_zero()));
    }

    #[test]
    fn only_the_mapped_mode_is_perturbed() {
        let cs = make_cross_section(&CrossSection::Circle { radius: 1.0 }, 5.0).unwrap();
        let mut map = BTreeMap::new();
        map.insert(0, RadialPotential::square_well(5.0, 1.0).unwrap());
        let ops = reduce_cylindrical(&cs, &map).unwrap();
        assert!(!ops[0].potential.is_zero());
        assert!(ops[1..].iter().all(|o| o.potential.is_zero()));
        map.insert(9, RadialPotential::zero());
        assert!(reduce_cylindrical(&cs, &map).is_err());
    }

    #[test]
    fn cusp_reduction() {
        let cs = make_cross_section(&CrossSection::Circle { radius: 1.0 }, 1.0).unwrap();
        let ops = reduce_cusp(&cs, 2).unwrap();
        assert_eq!(ops.len(), 3);
        assert_eq!(ops[1].cusp_coefficients(), Some((1.0, 0.0, 1.0)));
        assert!(reduce_cusp(&cs, 1).is_err());
    }

    #[test]
    fn warped_potential_vanishes_beyond_support() {
        let p = Profile::bump(1.0, 0.3, 0.0, 2.0).unwrap();
        let v = warped_product_potential(&p, 1).unwrap();
        assert_eq!(v.support_radius(), 2.0);
        for i in 0..1000 {
            assert_eq!(v.eval(2.0 + 1e-9 + i as f64 * 0.01), 0.0);
        }
        assert!(v.eval(1.0).abs() > 0.0);
    }

    #[test]
    fn warped_k0_has_only_curvature_terms() {
        let p = Profile::bump(1.5, 0.2, 0.5, 2.5).unwrap();
        let v = warped_product_potential(&p, 0).unwrap();
        for u in [0.7, 1.5, 2.2] {
            let (f, f1, f2) = p.eval3(u);
            assert!((v.eval(u) - (f2 / (2.0 * f) - f1 * f1 / (4.0 * f * f))).abs() < 1e-15);
        }
    }
}
