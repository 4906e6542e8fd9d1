//! Codimension-2 corner: R₊² × Y with two cylindrical faces Z₁, Z₂ and a
//! compactly supported coupling in the corner.
//!
//! Coordinates: u₁ runs along the end R₊ × Z₁ and u₂ along R₊ × Z₂. The face
//! Z₁ is itself a half-line in u₂ (times Y), so its potential is a function
//! of u₂, and vice versa. Per transverse mode μ the operator is
//! −∂₁² − ∂₂² + μ + V_{Z₂}(u₁) + V_{Z₁}(u₂) + W(u₁, u₂).

mod accumulation;
mod operator;
mod resonances;

pub use accumulation::{
    accumulation_check, AccumulationConfig, AccumulationReport, Birth, PpEntry, PpSource,
};
pub use operator::{corner_discretize, CornerOperator, Grid2D, SolvePath, BAND_LIMIT, DENSE_LIMIT};
pub use resonances::{corner_resonances, CornerResonanceConfig};

use num_complex::Complex64;

use crate::discretize::{find_resonances, ResonanceConfig, ResonanceKind};
use crate::error::{invalid, Error, Result};
use crate::modes::{ModeOperator, RadialPotential};
use crate::scaling::{essential_rays, RaySet};
use crate::spectral::{CrossSectionSpectrum, ScalingParameter};

/// Bounded coupling supported in the corner square.
#[derive(Debug, Clone, PartialEq)]
pub enum Coupling {
    Zero,
    /// strength · χ_{[a₁,b₁]×[a₂,b₂]}.
    Indicator {
        strength: f64,
        u1: (f64, f64),
        u2: (f64, f64),
    },
    /// strength · β(u₁)β(u₂), β the standard bump on (center ± half_width).
    Bump {
        strength: f64,
        center: (f64, f64),
        half_width: f64,
    },
}

fn bump(y: f64) -> f64 {
    if y.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - y * y)).exp()
    }
}

impl Coupling {
    pub fn is_zero(&self) -> bool {
        match *self {
            Coupling::Zero => true,
            Coupling::Indicator { strength, .. } | Coupling::Bump { strength, .. } => {
                strength == 0.0
            }
        }
    }

    /// Largest coordinate in the support.
    pub fn support_radius(&self) -> f64 {
        match *self {
            Coupling::Zero => 0.0,
            Coupling::Indicator { u1, u2, .. } => u1.1.max(u2.1),
            Coupling::Bump {
                center, half_width, ..
            } => center.0.max(center.1) + half_width,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        match *self {
            Coupling::Zero => Coupling::Zero,
            Coupling::Indicator { strength, u1, u2 } => Coupling::Indicator {
                strength: strength * factor,
                u1,
                u2,
            },
            Coupling::Bump {
                strength,
                center,
                half_width,
            } => Coupling::Bump {
                strength: strength * factor,
                center,
                half_width,
            },
        }
    }

    /// Average over the cell [c₁] × [c₂] (exact for the indicator, midpoint otherwise).
    pub(crate) fn cell_value(&self, c1: (f64, f64), c2: (f64, f64)) -> f64 {
        let overlap =
            |c: (f64, f64), s: (f64, f64)| ((c.1.min(s.1) - c.0.max(s.0)).max(0.0)) / (c.1 - c.0);
        match *self {
            Coupling::Zero => 0.0,
            Coupling::Indicator { strength, u1, u2 } => {
                strength * overlap(c1, u1) * overlap(c2, u2)
            }
            Coupling::Bump {
                strength,
                center,
                half_width,
            } => {
                let m1 = 0.5 * (c1.0 + c1.1);
                let m2 = 0.5 * (c2.0 + c2.1);
                strength * bump((m1 - center.0) / half_width) * bump((m2 - center.1) / half_width)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Coupling::Zero => true,
            Coupling::Indicator { strength, u1, u2 } => {
                strength.is_finite() && u1.0 >= 0.0 && u1.0 < u1.1 && u2.0 >= 0.0 && u2.0 < u2.1
            }
            Coupling::Bump {
                strength,
                center,
                half_width,
            } => {
                strength.is_finite()
                    && half_width > 0.0
                    && center.0 - half_width >= 0.0
                    && center.1 - half_width >= 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(invalid(format!("bad coupling {self:?}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CornerModel {
    /// Potential on the face Z₁ (a function of u₂).
    pub z1: RadialPotential,
    /// Potential on the face Z₂ (a function of u₁).
    pub z2: RadialPotential,
    pub cross_section: CrossSectionSpectrum,
    pub coupling: Coupling,
    pub radius: f64,
}

impl CornerModel {
    pub fn new(
        z1: RadialPotential,
        z2: RadialPotential,
        cross_section: CrossSectionSpectrum,
        coupling: Coupling,
        radius: f64,
    ) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(invalid("scaling radius must be positive"));
        }
        coupling.validate()?;
        for support in [
            z1.support_radius(),
            z2.support_radius(),
            coupling.support_radius(),
        ] {
            if support > radius {
                return Err(Error::SupportBeyondScalingRadius { support, radius });
            }
        }
        Ok(Self {
            z1,
            z2,
            cross_section,
            coupling,
            radius,
        })
    }

    /// The same corner with the two faces exchanged.
    pub fn swapped(&self) -> Self {
        let coupling = match self.coupling {
            Coupling::Indicator { strength, u1, u2 } => Coupling::Indicator {
                strength,
                u1: u2,
                u2: u1,
            },
            Coupling::Bump {
                strength,
                center,
                half_width,
            } => Coupling::Bump {
                strength,
                center: (center.1, center.0),
                half_width,
            },
            Coupling::Zero => Coupling::Zero,
        };
        Self {
            z1: self.z2.clone(),
            z2: self.z1.clone(),
            coupling,
            ..self.clone()
        }
    }

    pub fn thresholds(&self) -> Vec<f64> {
        self.cross_section.thresholds()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    /// b₁ ⊗ Id + Id ⊗ H⁽¹⁾.
    One,
    Two,
    /// The two-dimensional free channel over Δ_Y.
    Three,
}

impl std::fmt::Display for Channel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Channel::One => "H1",
            Channel::Two => "H2",
            Channel::Three => "H3",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelEntry {
    pub value: Complex64,
    pub channel: Channel,
    /// Transverse threshold the entry belongs to.
    pub mu: f64,
    pub multiplicity: u32,
    pub provenance: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChannelSpectrum {
    pub h3: Vec<ChannelEntry>,
    pub h1_pp: Vec<ChannelEntry>,
    pub h2_pp: Vec<ChannelEntry>,
    pub warnings: Vec<String>,
}

impl ChannelSpectrum {
    pub fn all(&self) -> impl Iterator<Item = &ChannelEntry> {
        self.h3.iter().chain(&self.h1_pp).chain(&self.h2_pp)
    }

    /// Entries attached to one transverse threshold.
    pub fn for_mode(&self, mu: f64) -> Vec<&ChannelEntry> {
        self.all().filter(|e| e.mu == mu).collect()
    }
}

/// Bound states and θ-stable resonances of −d²/du² + V at μ = 0.
fn face_pp(
    v: &RadialPotential,
    cfg: &ResonanceConfig,
) -> Result<(Vec<(Complex64, ResonanceKind)>, Vec<String>)> {
    if v.is_zero() {
        return Ok((Vec::new(), Vec::new()));
    }
    let set = find_resonances(&[ModeOperator::cylindrical(0.0, v.clone())], cfg)?;
    Ok((
        set.items.iter().map(|r| (r.z, r.kind)).collect(),
        set.warnings,
    ))
}

/// Channel spectra over every transverse mode. The pp sets of H⁽ⁱ⁾ are the
/// face values shifted by each μ: the face operators differ only by the
/// threshold.
pub fn channel_spectra(model: &CornerModel, cfg: &ResonanceConfig) -> Result<ChannelSpectrum> {
    let mut cfg = cfg.clone();
    cfg.scaling_radius = Some(model.radius);
    let (p1, w1) = face_pp(&model.z1, &cfg)?;
    let (p2, w2) = face_pp(&model.z2, &cfg)?;
    let mut out = ChannelSpectrum {
        warnings: w1.into_iter().chain(w2).collect(),
        ..Default::default()
    };
    for t in model.cross_section.entries() {
        out.h3.push(ChannelEntry {
            value: Complex64::new(t.mu, 0.0),
            channel: Channel::Three,
            mu: t.mu,
            multiplicity: t.multiplicity,
            provenance: format!("cross-section {}", model.cross_section.label()),
        });
        for (list, pp, ch) in [
            (&mut out.h1_pp, &p1, Channel::One),
            (&mut out.h2_pp, &p2, Channel::Two),
        ] {
            for &(z, kind) in pp.iter() {
                list.push(ChannelEntry {
                    value: z + t.mu,
                    channel: ch,
                    mu: t.mu,
                    multiplicity: t.multiplicity,
                    provenance: match kind {
                        ResonanceKind::BoundState => "bound state".into(),
                        ResonanceKind::Resonance => "resonance".into(),
                    },
                });
            }
        }
    }
    Ok(out)
}

/// One ray θ′[0, ∞) from every channel value; resonances uncovered by the
/// sweep count as origins alongside the real bound states.
pub fn corner_essential_spectrum(
    channels: &ChannelSpectrum,
    theta: &ScalingParameter,
) -> Result<RaySet> {
    let origins: Vec<(Complex64, String)> = channels
        .all()
        .map(|e| {
            (
                e.value,
                format!("{} mu={} {}", e.channel, e.mu, e.provenance),
            )
        })
        .collect();
    essential_rays(&origins, theta)
}

/// Rays relevant to the two-dimensional problem on one transverse mode.
pub(crate) fn mode_rays(
    channels: &ChannelSpectrum,
    mu: f64,
    theta: &ScalingParameter,
) -> Result<RaySet> {
    let origins: Vec<(Complex64, String)> = channels
        .for_mode(mu)
        .into_iter()
        .map(|e| (e.value, format!("{} mu={mu}", e.channel)))
        .collect();
    essential_rays(&origins, theta)
}
