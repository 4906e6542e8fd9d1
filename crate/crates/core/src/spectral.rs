//! Thresholds, the admissible scaling region and branch bookkeeping on the
//! spectral surface.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Stock cross-section geometries.
#[derive(Debug, Clone, PartialEq)]
pub enum CrossSection {
    /// Circle of the given radius: μ_k = k²/r², doubly degenerate for k ≥ 1.
    Circle { radius: f64 },
    /// A single point: the only threshold is 0.
    Point,
    /// Interval with Dirichlet ends: μ_k = (kπ/l)², k ≥ 1.
    DirichletInterval { length: f64 },
    /// Explicit `(mu, multiplicity)` list.
    Explicit(Vec<(f64, u32)>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    pub mu: f64,
    pub multiplicity: u32,
}

/// Eigenvalues of the cross-section Laplacian, truncated at an energy cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossSectionSpectrum {
    entries: Vec<Threshold>,
    label: String,
}

impl CrossSectionSpectrum {
    pub fn entries(&self) -> &[Threshold] {
        &self.entries
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Distinct threshold values.
    pub fn thresholds(&self) -> Vec<f64> {
        self.entries.iter().map(|t| t.mu).collect()
    }

    /// Threshold value of every mode, multiplicities expanded.
    pub fn mode_values(&self) -> Vec<f64> {
        self.entries
            .iter()
            .flat_map(|t| std::iter::repeat(t.mu).take(t.multiplicity as usize))
            .collect()
    }

    pub fn mode_count(&self) -> usize {
        self.entries.iter().map(|t| t.multiplicity as usize).sum()
    }
}

/// Build the spectrum of a stock cross-section, keeping all μ ≤ `e_max`.
pub fn make_cross_section(kind: &CrossSection, e_max: f64) -> Result<CrossSectionSpectrum> {
    if !e_max.is_finite() || e_max < 0.0 {
        return Err(invalid("energy cutoff must be finite and nonnegative"));
    }
    let (entries, label) = match kind {
        CrossSection::Point => (
            vec![Threshold {
                mu: 0.0,
                multiplicity: 1,
            }],
            "point".to_string(),
        ),
        CrossSection::Circle { radius } => {
            if !(*radius > 0.0 && radius.is_finite()) {
                return Err(invalid("circle radius must be positive"));
            }
            let mut v = Vec::new();
            for k in 0u32.. {
                let mu = (k as f64 / radius).powi(2);
                if mu > e_max {
                    break;
                }
                v.push(Threshold {
                    mu,
                    multiplicity: if k == 0 { 1 } else { 2 },
                });
            }
            (v, format!("circle radius {radius}"))
        }
        CrossSection::DirichletInterval { length } => {
            if !(*length > 0.0 && length.is_finite()) {
                return Err(invalid("interval length must be positive"));
            }
            let mut v = Vec::new();
            for k in 1u32.. {
                let mu = (k as f64 * std::f64::consts::PI / length).powi(2);
                if mu > e_max {
                    break;
                }
                v.push(Threshold {
                    mu,
                    multiplicity: 1,
                });
            }
            (v, format!("interval length {length} Dirichlet"))
        }
        CrossSection::Explicit(list) => {
            if list
                .iter()
                .any(|&(mu, m)| !(mu >= 0.0 && mu.is_finite()) || m == 0)
            {
                return Err(invalid(
                    "explicit thresholds must be nonnegative with positive multiplicity",
                ));
            }
            if list.windows(2).any(|w| w[1].0 <= w[0].0) {
                return Err(invalid("explicit thresholds must be strictly increasing"));
            }
            let v = list
                .iter()
                .filter(|(mu, _)| *mu <= e_max)
                .map(|&(mu, multiplicity)| Threshold { mu, multiplicity })
                .collect();
            (v, "explicit list".to_string())
        }
    };
    if entries.is_empty() {
        return Err(Error::Empty("no thresholds below the energy cutoff"));
    }
    Ok(CrossSectionSpectrum { entries, label })
}

/// Membership in the admissible region: θ₀ > 0, θ₀ > |θ₁|, θ₁² < 1/2.
pub fn in_gamma(theta: Complex64) -> bool {
    theta.re > 0.0 && theta.re > theta.im.abs() && theta.im * theta.im < 0.5
}

/// θ′ = 1/(θ+1)².
pub fn theta_prime(theta: Complex64) -> Result<Complex64> {
    let s = theta + 1.0;
    if s.norm() == 0.0 {
        return Err(invalid("theta = -1 is a pole of 1/(theta+1)^2"));
    }
    Ok((s * s).inv())
}

/// A validated scaling parameter with cached θ′.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingParameter {
    theta: Complex64,
    theta_prime: Complex64,
}

impl ScalingParameter {
    /// θ in the admissible region.
    pub fn new(theta: Complex64) -> Result<Self> {
        if !in_gamma(theta) {
            return Err(Error::ThetaOutsideRegion(theta));
        }
        Ok(Self {
            theta,
            theta_prime: theta_prime(theta)?,
        })
    }

    /// Real θ ≥ 0 (unitary dilations, including the identity).
    pub fn unitary(theta: f64) -> Result<Self> {
        if !(theta >= 0.0 && theta.is_finite()) {
            return Err(Error::ThetaOutsideRegion(Complex64::new(theta, 0.0)));
        }
        let theta = Complex64::new(theta, 0.0);
        Ok(Self {
            theta,
            theta_prime: theta_prime(theta)?,
        })
    }

    /// Accepts either regime.
    pub fn any(theta: Complex64) -> Result<Self> {
        if theta.im == 0.0 && theta.re >= 0.0 {
            Self::unitary(theta.re)
        } else {
            Self::new(theta)
        }
    }

    pub fn theta(&self) -> Complex64 {
        self.theta
    }

    pub fn theta_prime(&self) -> Complex64 {
        self.theta_prime
    }

    /// Exterior stretch factor 1 + θ.
    pub fn stretch(&self) -> Complex64 {
        self.theta + 1.0
    }

    pub fn is_real(&self) -> bool {
        self.theta.im == 0.0
    }

    /// Unit direction of the rotated essential spectrum.
    pub fn ray_direction(&self) -> Complex64 {
        self.theta_prime / self.theta_prime.norm()
    }

    pub fn conj(&self) -> Self {
        Self {
            theta: self.theta.conj(),
            theta_prime: self.theta_prime.conj(),
        }
    }
}

/// Sheet of the square root `Λ_i = ±sqrt(λ - μ_i)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sheet {
    /// Im Λ > 0: decaying exponentials e^{iΛu}.
    Physical,
    /// Im Λ < 0: the continuation through the cut.
    Second,
}

impl Sheet {
    pub fn sign(self) -> i8 {
        match self {
            Sheet::Physical => 1,
            Sheet::Second => -1,
        }
    }

    pub fn from_sign(s: i8) -> Result<Self> {
        match s {
            1 => Ok(Sheet::Physical),
            -1 => Ok(Sheet::Second),
            _ => Err(invalid("sheet flag must be +1 or -1")),
        }
    }
}

/// How a point on a branch cut is reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Approach {
    /// The point itself; points on a cut are rejected.
    Exact,
    /// Limit from Im λ ↓ 0.
    Above,
    /// Limit from Im λ ↑ 0.
    Below,
}

/// λ together with one branch value per tracked threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSurfacePoint {
    lambda: Complex64,
    thresholds: Vec<f64>,
    branches: Vec<Complex64>,
    sheets: Vec<Sheet>,
}

impl SpectralSurfacePoint {
    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn branches(&self) -> &[Complex64] {
        &self.branches
    }

    pub fn sheets(&self) -> &[Sheet] {
        &self.sheets
    }

    /// Branch value for a given threshold, if tracked.
    pub fn branch_for(&self, mu: f64) -> Option<Complex64> {
        self.thresholds
            .iter()
            .position(|&m| (m - mu).abs() <= 1e-12 * (1.0 + mu.abs()))
            .map(|i| self.branches[i])
    }

    /// max_i |Λ_i² + μ_i − λ|.
    pub fn consistency_defect(&self) -> f64 {
        self.branches
            .iter()
            .zip(&self.thresholds)
            .map(|(l, mu)| (l * l + mu - self.lambda).norm())
            .fold(0.0, f64::max)
    }
}

/// Physical-sheet branch i·sqrt(μ − λ): Im Λ > 0 off the cut.
fn physical_branch(lambda: Complex64, mu: f64) -> Complex64 {
    Complex64::i() * (Complex64::new(mu, 0.0) - lambda).sqrt()
}

pub fn surface_point(
    lambda: Complex64,
    thresholds: &[f64],
    sheets: &[Sheet],
    approach: Approach,
) -> Result<SpectralSurfacePoint> {
    if thresholds.is_empty() {
        return Err(Error::Empty("thresholds"));
    }
    if sheets.len() != thresholds.len() {
        return Err(invalid("one sheet flag per threshold is required"));
    }
    let mut branches = Vec::with_capacity(thresholds.len());
    for (&mu, &sheet) in thresholds.iter().zip(sheets) {
        let d = lambda - mu;
        if d.norm() == 0.0 {
            return Err(Error::BranchPoint {
                lambda,
                threshold: mu,
            });
        }
        let phys = if lambda.im == 0.0 && d.re > 0.0 {
            let k = Complex64::new(d.re.sqrt(), 0.0);
            match approach {
                Approach::Exact => {
                    return Err(Error::OnBranchCut {
                        lambda,
                        threshold: mu,
                    })
                }
                Approach::Above => k,
                Approach::Below => -k,
            }
        } else {
            physical_branch(lambda, mu)
        };
        branches.push(match sheet {
            Sheet::Physical => phys,
            Sheet::Second => -phys,
        });
    }
    Ok(SpectralSurfacePoint {
        lambda,
        thresholds: thresholds.to_vec(),
        branches,
        sheets: sheets.to_vec(),
    })
}

/// Convenience: a point with every branch on the same sheet.
pub fn surface_point_uniform(
    lambda: Complex64,
    cross_section: &CrossSectionSpectrum,
    sheet: Sheet,
    approach: Approach,
) -> Result<SpectralSurfacePoint> {
    let t = cross_section.thresholds();
    let sheets = vec![sheet; t.len()];
    surface_point(lambda, &t, &sheets, approach)
}

/// π_s(Λ) = Λ² + μ.
pub fn project(branch: Complex64, mu: f64) -> Complex64 {
    branch * branch + mu
}
