//! Run configuration: one TOML file with `model`, `numerics`, `task` and
//! `output` sections. Every key has a default; unknown keys are rejected.
//! `config-reference.toml` next to this crate lists them all.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use cornerscale_core::corner::{CornerModel, Coupling, Grid2D, SolvePath};
use cornerscale_core::discretize::{default_theta_sweep, Grid1D, Scheme};
use cornerscale_core::modes::{
    reduce_cusp, reduce_cylindrical, ModeOperator, Profile, RadialPotential,
};
use cornerscale_core::spectral::{
    make_cross_section, CrossSection, CrossSectionSpectrum, ScalingParameter,
};
use cornerscale_core::Complex64;

use crate::error::CliError;

pub const REFERENCE: &str = include_str!("../config-reference.toml");

/// `[re, im]`.
pub type Pair = [f64; 2];

fn c(p: Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    pub numerics: NumericsSection,
    pub task: TaskSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    #[default]
    Cylindrical,
    Cusp,
    Corner,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub geometry: Geometry,
    pub cross_section: CrossSectionSpec,
    /// Cusp ends only.
    pub cusp_dimension: u32,
    /// Radial potentials keyed by expanded mode index; other modes are free.
    pub potentials: Vec<ModePotential>,
    pub corner: CornerSpec,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self {
            geometry: Geometry::Cylindrical,
            cross_section: CrossSectionSpec::default(),
            cusp_dimension: 2,
            potentials: Vec::new(),
            corner: CornerSpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CrossSectionSpec {
    /// point | circle | interval | explicit
    pub kind: String,
    pub radius: f64,
    pub length: f64,
    /// Explicit `[mu, multiplicity]` pairs.
    pub thresholds: Vec<(f64, u32)>,
    /// Thresholds above this are not tracked.
    pub cutoff: f64,
}

impl Default for CrossSectionSpec {
    fn default() -> Self {
        Self {
            kind: "point".into(),
            radius: 1.0,
            length: 1.0,
            thresholds: Vec::new(),
            cutoff: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModePotential {
    pub mode: usize,
    pub potential: PotentialSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    Zero,
    SquareWell {
        depth: f64,
        width: f64,
    },
    Barrier {
        height: f64,
        start: f64,
        end: f64,
    },
    Piecewise {
        edges: Vec<f64>,
        values: Vec<f64>,
    },
    Bump {
        amplitude: f64,
        center: f64,
        half_width: f64,
    },
    Tabulated {
        u: Vec<f64>,
        values: Vec<f64>,
    },
    Warped {
        k: u32,
        profile: ProfileSpec,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    Constant {
        radius: f64,
    },
    Bump {
        radius: f64,
        amplitude: f64,
        start: f64,
        end: f64,
    },
    Tabulated {
        u: Vec<f64>,
        f: Vec<f64>,
    },
}

impl PotentialSpec {
    pub fn build(&self) -> Result<RadialPotential, CliError> {
        let p = match self {
            PotentialSpec::Zero => Ok(RadialPotential::zero()),
            PotentialSpec::SquareWell { depth, width } => {
                RadialPotential::square_well(*depth, *width)
            }
            PotentialSpec::Barrier { height, start, end } => {
                RadialPotential::barrier(*height, *start, *end)
            }
            PotentialSpec::Piecewise { edges, values } => {
                RadialPotential::piecewise_constant(edges.clone(), values.clone())
            }
            PotentialSpec::Bump {
                amplitude,
                center,
                half_width,
            } => RadialPotential::smooth_bump(*amplitude, *center, *half_width),
            PotentialSpec::Tabulated { u, values } => {
                RadialPotential::tabulated(u.clone(), values.clone())
            }
            PotentialSpec::Warped { k, profile } => {
                let prof = match profile {
                    ProfileSpec::Constant { radius } => Profile::constant(*radius),
                    ProfileSpec::Bump {
                        radius,
                        amplitude,
                        start,
                        end,
                    } => Profile::bump(*radius, *amplitude, *start, *end),
                    ProfileSpec::Tabulated { u, f } => Profile::tabulated(u.clone(), f.clone()),
                }
                .map_err(CliError::schema)?;
                RadialPotential::warped(prof, *k)
            }
        };
        p.map_err(CliError::schema)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CouplingSpec {
    Zero,
    Indicator {
        strength: f64,
        u1: (f64, f64),
        u2: (f64, f64),
    },
    Bump {
        strength: f64,
        center: (f64, f64),
        half_width: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CornerSpec {
    /// Potential on the face Z₁, a function of u₂.
    pub z1: PotentialSpec,
    /// Potential on the face Z₂, a function of u₁.
    pub z2: PotentialSpec,
    pub coupling: CouplingSpec,
    /// Scaling radius; must cover every support.
    pub radius: f64,
}

impl Default for CornerSpec {
    fn default() -> Self {
        Self {
            z1: PotentialSpec::Zero,
            z2: PotentialSpec::Zero,
            coupling: CouplingSpec::Zero,
            radius: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumericsSection {
    /// Truncation length L of [0, L].
    pub length: f64,
    /// Interior grid points.
    pub points: usize,
    /// fd2 | fd4
    pub scheme: String,
    /// Scaling parameter used for rays, plots and single-angle solves.
    pub theta: Pair,
    /// Stability sweep; empty means the built-in five-angle sweep.
    pub theta_sweep: Vec<Pair>,
    /// Defaults to the largest potential support plus one.
    pub scaling_radius: Option<f64>,
    pub max_energy: f64,
    pub richardson_levels: usize,
    pub stability_tolerance: Option<f64>,
    pub rays_tolerance: f64,
    pub residual_bound: f64,
    pub imag_tolerance: f64,
    /// Cusp ends: window in t = ln u.
    pub t_window: (f64, f64),
    /// Cusp ends: levels reported per mode.
    pub levels: usize,
}

impl Default for NumericsSection {
    fn default() -> Self {
        Self {
            length: 12.0,
            points: 800,
            scheme: "fd2".into(),
            theta: [0.4, 0.3],
            theta_sweep: Vec::new(),
            scaling_radius: None,
            max_energy: 30.0,
            richardson_levels: 2,
            stability_tolerance: None,
            rays_tolerance: 0.02,
            residual_bound: 1e-10,
            imag_tolerance: 1e-8,
            t_window: (-15.0, 15.0),
            levels: 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Spectrum,
    Resonances,
    EssentialSpectrum,
    Continue,
    ParametrixCheck,
    Lap,
    Corner,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Resonances => "resonances",
            Command::EssentialSpectrum => "essential-spectrum",
            Command::Continue => "continue",
            Command::ParametrixCheck => "parametrix-check",
            Command::Lap => "lap",
            Command::Corner => "corner",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaskSection {
    /// Used by `cornerscale run`.
    pub command: Option<Command>,
    #[serde(rename = "continue")]
    pub continuation: ContinueTask,
    pub parametrix: ParametrixTask,
    pub lap: LapTask,
    pub corner: CornerTask,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub coefficient: f64,
    pub power: u32,
    pub center: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContinueTask {
    pub mode: usize,
    /// λ values, `[re, im]`.
    pub path: Vec<Pair>,
    pub f: Vec<TermSpec>,
    pub g: Vec<TermSpec>,
}

impl Default for ContinueTask {
    fn default() -> Self {
        let t = |power, center| TermSpec {
            coefficient: 1.0,
            power,
            center,
        };
        Self {
            mode: 0,
            path: vec![[-2.0, 0.0], [-1.0, 0.0], [1.0, -0.1], [2.0, -0.2]],
            f: vec![t(1, 0.0)],
            g: vec![t(2, 0.5)],
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SheetSpec {
    #[default]
    Physical,
    Second,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApproachSpec {
    #[default]
    Exact,
    Above,
    Below,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParametrixTask {
    pub lambda: Pair,
    pub sheet: SheetSpec,
    pub approach: ApproachSpec,
    /// Lattice step and extent.
    pub step: f64,
    pub length: f64,
    /// Gluing radius; defaults to the largest potential support, at least 1.
    pub core_radius: Option<f64>,
    /// Singular values below floor·σ₁ are not resolved.
    pub floor: f64,
    /// Decay check σ₂ₖ ≤ ratio·σₖ.
    pub ratio: f64,
}

impl Default for ParametrixTask {
    fn default() -> Self {
        Self {
            lambda: [-1.0, 0.0],
            sheet: SheetSpec::Physical,
            approach: ApproachSpec::Exact,
            step: 0.04,
            length: 12.0,
            core_radius: None,
            floor: 1e-10,
            ratio: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TestProfileSpec {
    SmoothedIndicator { end: f64, ramp: f64 },
    Bump { center: f64, half_width: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestComponent {
    pub mode: usize,
    pub coefficient: f64,
    pub profile: TestProfileSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LapTask {
    pub interval: (f64, f64),
    /// Strictly decreasing, in (0, 1).
    pub epsilons: Vec<f64>,
    pub p: f64,
    pub panels: usize,
    pub flatness: f64,
    pub growth_ratio: f64,
    pub phi: Vec<TestComponent>,
}

impl Default for LapTask {
    fn default() -> Self {
        Self {
            interval: (1.0, 2.0),
            epsilons: vec![1e-1, 3e-2, 1e-2, 3e-3, 1e-3],
            p: 2.0,
            panels: 200,
            flatness: 0.02,
            growth_ratio: 10.0,
            phi: vec![TestComponent {
                mode: 0,
                coefficient: 1.0,
                profile: TestProfileSpec::SmoothedIndicator {
                    end: 2.0,
                    ramp: 0.5,
                },
            }],
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathSpec {
    #[default]
    Auto,
    Kronecker,
    Dense,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Face {
    #[default]
    Z1,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AccumulationTask {
    /// Well depths of the family, increasing.
    pub depths: Vec<f64>,
    pub width: f64,
    #[serde(default)]
    pub face: Face,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CornerTask {
    /// Points per axis of the square [0, L]²; L is `numerics.length`.
    pub points: usize,
    pub path: PathSpec,
    /// Run the two-dimensional resonance sweep.
    pub resonances: bool,
    pub accumulation: Option<AccumulationTask>,
}

impl Default for CornerTask {
    fn default() -> Self {
        Self {
            points: 80,
            path: PathSpec::Auto,
            resonances: true,
            accumulation: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub directory: PathBuf,
    /// Any of csv, svg, matrix.
    pub formats: Vec<String>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("out"),
            formats: vec!["csv".into(), "svg".into()],
        }
    }
}

impl OutputSection {
    pub fn wants(&self, format: &str) -> bool {
        self.formats.iter().any(|f| f == format)
    }
}

const FORMATS: [&str; 3] = ["csv", "svg", "matrix"];

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Schema(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Checks that need more than the types.
    pub fn validate(&self) -> Result<(), CliError> {
        let n = &self.numerics;
        if !["fd2", "fd4"].contains(&n.scheme.as_str()) {
            return Err(CliError::Schema(format!("unknown scheme {:?}", n.scheme)));
        }
        if !["point", "circle", "interval", "explicit"]
            .contains(&self.model.cross_section.kind.as_str())
        {
            return Err(CliError::Schema(format!(
                "unknown cross-section kind {:?}",
                self.model.cross_section.kind
            )));
        }
        if let Some(f) = self
            .output
            .formats
            .iter()
            .find(|f| !FORMATS.contains(&f.as_str()))
        {
            return Err(CliError::Schema(format!("unknown output format {f:?}")));
        }
        self.grid()?;
        self.thetas()?;
        self.cross_section()?;
        self.modes()?;
        if self.model.geometry == Geometry::Corner {
            self.corner_model()?;
        }
        Ok(())
    }

    /// SHA-256 of the canonical serialization: formatting and key order in
    /// the file do not matter.
    pub fn hash(&self) -> String {
        let canon = toml::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(canon.as_bytes()))
    }

    pub fn scheme(&self) -> Scheme {
        if self.numerics.scheme == "fd4" {
            Scheme::Fd4
        } else {
            Scheme::Fd2
        }
    }

    pub fn grid(&self) -> Result<Grid1D, CliError> {
        Grid1D::new(self.numerics.length, self.numerics.points, self.scheme())
            .map_err(CliError::schema)
    }

    pub fn corner_grid(&self) -> Result<Grid2D, CliError> {
        Grid2D::new(self.numerics.length, self.task.corner.points).map_err(CliError::schema)
    }

    pub fn theta(&self) -> Result<ScalingParameter, CliError> {
        ScalingParameter::new(c(self.numerics.theta)).map_err(CliError::schema)
    }

    pub fn thetas(&self) -> Result<Vec<ScalingParameter>, CliError> {
        self.theta()?;
        if self.numerics.theta_sweep.is_empty() {
            return Ok(default_theta_sweep());
        }
        self.numerics
            .theta_sweep
            .iter()
            .map(|&p| ScalingParameter::new(c(p)).map_err(CliError::schema))
            .collect()
    }

    pub fn cross_section(&self) -> Result<CrossSectionSpectrum, CliError> {
        let s = &self.model.cross_section;
        let kind = match s.kind.as_str() {
            "circle" => CrossSection::Circle { radius: s.radius },
            "interval" => CrossSection::DirichletInterval { length: s.length },
            "explicit" => CrossSection::Explicit(s.thresholds.clone()),
            _ => CrossSection::Point,
        };
        make_cross_section(&kind, s.cutoff).map_err(CliError::schema)
    }

    /// Mode operators of the end (cylindrical or cusp geometry).
    pub fn modes(&self) -> Result<Vec<ModeOperator>, CliError> {
        let cs = self.cross_section()?;
        match self.model.geometry {
            Geometry::Cusp => {
                if !self.model.potentials.is_empty() {
                    return Err(CliError::Schema(
                        "cusp ends take no radial potentials".into(),
                    ));
                }
                reduce_cusp(&cs, self.model.cusp_dimension).map_err(CliError::schema)
            }
            _ => {
                let mut pots = BTreeMap::new();
                for p in &self.model.potentials {
                    if pots.insert(p.mode, p.potential.build()?).is_some() {
                        return Err(CliError::Schema(format!(
                            "mode {} has two potentials",
                            p.mode
                        )));
                    }
                }
                reduce_cylindrical(&cs, &pots).map_err(CliError::schema)
            }
        }
    }

    pub fn corner_model(&self) -> Result<CornerModel, CliError> {
        let s = &self.model.corner;
        let coupling = match s.coupling {
            CouplingSpec::Zero => Coupling::Zero,
            CouplingSpec::Indicator { strength, u1, u2 } => {
                Coupling::Indicator { strength, u1, u2 }
            }
            CouplingSpec::Bump {
                strength,
                center,
                half_width,
            } => Coupling::Bump {
                strength,
                center,
                half_width,
            },
        };
        CornerModel::new(
            s.z1.build()?,
            s.z2.build()?,
            self.cross_section()?,
            coupling,
            s.radius,
        )
        .map_err(CliError::schema)
    }

    pub fn solve_path(&self) -> SolvePath {
        match self.task.corner.path {
            PathSpec::Auto => SolvePath::Auto,
            PathSpec::Kronecker => SolvePath::Kronecker,
            PathSpec::Dense => SolvePath::Dense,
        }
    }
}
