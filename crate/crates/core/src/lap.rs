//! Limiting absorption: ε-behaviour of ∫_a^b |Im⟨φ, R(x+iε)φ⟩|^p dx.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::continuation::rho;
use crate::discretize::{assemble, Grid1D, ModeProblem, NodeLayout, Scheme};
use crate::error::{invalid, Error, Result};
use crate::modes::ModeOperator;
use crate::numerics::{gauss_legendre, simpson, TridiagLu};
use crate::scaling::dilate_mode;
use crate::spectral::ScalingParameter;

/// Compactly supported radial profiles for test vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestProfile {
    /// 1 on [0, end − ramp], smoothly down to 0 at `end`.
    SmoothedIndicator { end: f64, ramp: f64 },
    /// exp(1 − 1/(1 − y²)) with y = (u − center)/half_width.
    Bump { center: f64, half_width: f64 },
}

impl TestProfile {
    pub fn eval(&self, u: f64) -> f64 {
        match *self {
            TestProfile::SmoothedIndicator { end, ramp } => 1.0 - rho(end - ramp, end, u),
            TestProfile::Bump { center, half_width } => {
                let y = (u - center) / half_width;
                if y.abs() >= 1.0 {
                    0.0
                } else {
                    (1.0 - 1.0 / (1.0 - y * y)).exp()
                }
            }
        }
    }

    pub fn support_radius(&self) -> f64 {
        match *self {
            TestProfile::SmoothedIndicator { end, .. } => end,
            TestProfile::Bump { center, half_width } => center + half_width,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            TestProfile::SmoothedIndicator { end, ramp } => ramp > 0.0 && end > ramp,
            TestProfile::Bump { center, half_width } => {
                half_width > 0.0 && center - half_width >= 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(invalid(format!("bad test profile {self:?}")))
        }
    }
}

/// φ = Σ c_k · profile_k in mode `mode_k` of the model.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TestVector {
    pub components: Vec<(usize, f64, TestProfile)>,
}

impl TestVector {
    pub fn single(mode: usize, profile: TestProfile) -> Self {
        Self {
            components: vec![(mode, 1.0, profile)],
        }
    }

    pub fn with(mut self, mode: usize, coefficient: f64, profile: TestProfile) -> Self {
        self.components.push((mode, coefficient, profile));
        self
    }

    pub fn support_radius(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.2.support_radius())
            .fold(0.0, f64::max)
    }

    /// Profile sum per model mode.
    fn per_mode(&self, modes: usize) -> Result<Vec<Option<Vec<(f64, TestProfile)>>>> {
        let mut out: Vec<Option<Vec<(f64, TestProfile)>>> = vec![None; modes];
        for &(m, c, p) in &self.components {
            p.validate()?;
            if m >= modes {
                return Err(invalid(format!(
                    "test vector refers to mode {m}, model has {modes}"
                )));
            }
            out[m].get_or_insert_with(Vec::new).push((c, p));
        }
        Ok(out)
    }
}

fn eval_terms(terms: &[(f64, TestProfile)], u: f64) -> f64 {
    terms.iter().map(|(c, p)| c * p.eval(u)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LapVerdict {
    Bounded,
    Growing,
    Inconclusive,
}

impl std::fmt::Display for LapVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LapVerdict::Bounded => "bounded",
            LapVerdict::Growing => "growing",
            LapVerdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LapConfig {
    /// Strictly decreasing, in (0, 1).
    pub epsilons: Vec<f64>,
    /// Simpson panels in x (even).
    pub panels: usize,
    pub p: f64,
    /// Relative spread allowed among the last three values for "bounded".
    pub flatness: f64,
    /// last/first at or above this is "growing".
    pub growth_ratio: f64,
    pub theta: ScalingParameter,
    pub grid: Grid1D,
    /// Defaults to the largest support (potential or test vector) plus 1/2.
    pub scaling_radius: Option<f64>,
}

impl LapConfig {
    pub fn new(grid: Grid1D) -> Self {
        Self {
            epsilons: vec![1e-1, 3e-2, 1e-2, 3e-3, 1e-3],
            panels: 200,
            p: 2.0,
            flatness: 0.02,
            growth_ratio: 10.0,
            theta: ScalingParameter::new(Complex64::new(0.4, 0.3))
                .expect("default angle is admissible"),
            grid,
            scaling_radius: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LapReport {
    pub interval: (f64, f64),
    pub p: f64,
    pub epsilons: Vec<f64>,
    pub values: Vec<f64>,
    pub sup_estimate: f64,
    /// (max − min)/max over the last three values.
    pub tail_spread: f64,
    pub verdict: LapVerdict,
}

/// Per-mode scaled operators and the test vector in symmetrized coordinates.
struct Prepared {
    blocks: Vec<(crate::numerics::Tridiagonal, Vec<Complex64>, Vec<Complex64>)>,
}

fn prepare(model: &[ModeOperator], phi: &TestVector, cfg: &LapConfig) -> Result<Prepared> {
    if model.is_empty() {
        return Err(Error::Empty("model"));
    }
    let per_mode = phi.per_mode(model.len())?;
    if per_mode.iter().all(Option::is_none) {
        return Err(Error::Empty("test vector"));
    }
    let support = model
        .iter()
        .map(|m| m.potential.support_radius())
        .fold(phi.support_radius(), f64::max);
    let radius = cfg.scaling_radius.unwrap_or(support + 0.5);
    if radius < phi.support_radius() {
        return Err(invalid("test vector must vanish beyond the scaling radius"));
    }
    if cfg.grid.scheme != Scheme::Fd2 {
        return Err(Error::Unsupported(
            "resolvent solves use the second-order scheme".into(),
        ));
    }
    let mut blocks = Vec::new();
    for (mode, terms) in model.iter().zip(per_mode) {
        let Some(terms) = terms else { continue };
        let scaled = dilate_mode(mode, cfg.theta, radius)?;
        let problem = ModeProblem::scaled(&scaled);
        let op = assemble(
            &problem,
            &cfg.grid.layout(&problem.breakpoints()),
            Scheme::Fd2,
        )?;
        let t = op
            .tridiagonal()
            .expect("second-order scheme is tridiagonal");
        let f: Vec<Complex64> = op
            .nodes
            .iter()
            .map(|&u| Complex64::new(eval_terms(&terms, u), 0.0))
            .collect();
        let x = op.to_symmetric_coords(&f);
        // φ is real and lives where the contour is real, so the left vector equals the right one.
        blocks.push((t, x.clone(), x));
    }
    Ok(Prepared { blocks })
}

fn im_element(prep: &Prepared, lambda: Complex64) -> Result<f64> {
    let mut s = Complex64::new(0.0, 0.0);
    for (t, x, y) in &prep.blocks {
        let lu = TridiagLu::factor(t, lambda)?;
        let sol = lu.solve(x);
        s += y.iter().zip(&sol).map(|(a, b)| a * b).sum::<Complex64>();
    }
    Ok(s.im)
}

/// Im⟨φ, R(x + iε)φ⟩ through the exterior-scaled resolvent.
pub fn im_matrix_element(
    model: &[ModeOperator],
    phi: &TestVector,
    x: f64,
    eps: f64,
    cfg: &LapConfig,
) -> Result<f64> {
    im_element(&prepare(model, phi, cfg)?, Complex64::new(x, eps))
}

/// (1/π)∫_a^b Im⟨φ, R(x+iε)φ⟩ dx, the Stone-formula approximation of ⟨φ, E_(a,b)φ⟩.
pub fn stone_integral(
    model: &[ModeOperator],
    phi: &TestVector,
    a: f64,
    b: f64,
    eps: f64,
    cfg: &LapConfig,
) -> Result<f64> {
    let prep = prepare(model, phi, cfg)?;
    let n = cfg.panels.max(2) & !1;
    let h = (b - a) / n as f64;
    let vals: Vec<f64> = (0..=n)
        .into_par_iter()
        .map(|i| im_element(&prep, Complex64::new(a + i as f64 * h, eps)))
        .collect::<Result<_>>()?;
    Ok(simpson(&vals, h) / std::f64::consts::PI)
}

pub fn lap_estimate(
    model: &[ModeOperator],
    phi: &TestVector,
    a: f64,
    b: f64,
    cfg: &LapConfig,
) -> Result<LapReport> {
    if !(cfg.p > 1.0) {
        return Err(invalid("p must exceed 1"));
    }
    if !(a < b && a.is_finite() && b.is_finite()) {
        return Err(invalid("interval must be bounded and non-empty"));
    }
    let e = &cfg.epsilons;
    if e.len() < 3 || e.iter().any(|&x| !(x > 0.0 && x < 1.0)) || e.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(invalid(
            "epsilon grid must have at least three strictly decreasing values in (0, 1)",
        ));
    }
    if cfg.panels < 2 || cfg.panels % 2 != 0 {
        return Err(invalid("Simpson needs an even panel count"));
    }
    let prep = prepare(model, phi, cfg)?;
    let h = (b - a) / cfg.panels as f64;
    let jobs: Vec<(usize, usize)> = (0..e.len())
        .flat_map(|k| (0..=cfg.panels).map(move |i| (k, i)))
        .collect();
    let samples: Vec<f64> = jobs
        .par_iter()
        .map(|&(k, i)| {
            im_element(&prep, Complex64::new(a + i as f64 * h, e[k])).map(|v| v.abs().powf(cfg.p))
        })
        .collect::<Result<_>>()?;
    let values: Vec<f64> = samples
        .chunks(cfg.panels + 1)
        .map(|c| simpson(c, h))
        .collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NoConvergence(
            "non-finite limiting-absorption value".into(),
        ));
    }
    let n = values.len();
    let tail = &values[n - 3..];
    let hi = tail.iter().copied().fold(f64::MIN, f64::max);
    let lo = tail.iter().copied().fold(f64::MAX, f64::min);
    let tail_spread = if hi > 0.0 { (hi - lo) / hi } else { 0.0 };
    let decreasing = tail.windows(2).all(|w| w[1] <= w[0]);
    let verdict = if values[0] > 0.0 && values[n - 1] / values[0] >= cfg.growth_ratio {
        LapVerdict::Growing
    } else if tail_spread <= cfg.flatness || decreasing {
        LapVerdict::Bounded
    } else {
        LapVerdict::Inconclusive
    };
    Ok(LapReport {
        interval: (a, b),
        p: cfg.p,
        epsilons: e.clone(),
        sup_estimate: values.iter().copied().fold(0.0, f64::max),
        values,
        tail_spread,
        verdict,
    })
}

/// ⟨φ, E_(a,b)φ⟩ for the unscaled half-lattice operator with step `step`,
/// from its generalized eigenfunctions (continuous part) and a long box
/// (eigenvalues below each threshold). Independent of the scaled solves.
pub fn lattice_spectral_projection(
    model: &[ModeOperator],
    phi: &TestVector,
    a: f64,
    b: f64,
    step: f64,
) -> Result<f64> {
    let per_mode = phi.per_mode(model.len())?;
    let mut total = 0.0;
    for (mode, terms) in model.iter().zip(per_mode) {
        let Some(terms) = terms else { continue };
        let support = mode.potential.support_radius().max(phi.support_radius());
        let length = support + 40.0;
        let count = (length / step).round() as usize;
        let layout = NodeLayout::new(count as f64 * step, count, &[]);
        if !layout.is_uniform() {
            return Err(invalid("projection needs a uniform lattice"));
        }
        let op = assemble(&ModeProblem::plain(mode), &layout, Scheme::Fd2)?;
        let t = op
            .real_symmetric()
            .ok_or_else(|| invalid("unscaled operator must be real symmetric"))?;
        let h = step;
        // μ + V_j on the lattice.
        let shift: Vec<f64> = t.diag.iter().map(|d| d - 2.0 / (h * h)).collect();
        let f: Vec<f64> = op.nodes.iter().map(|&u| eval_terms(&terms, u)).collect();
        let last_support = ((support / h).ceil() as usize + 2).min(f.len() - 2);

        // Point spectrum below the threshold.
        for e in t.eigenvalues_below(mode.mu) {
            if e > a && e < b {
                let v = t.eigenvector(e)?;
                let norm: f64 = v.iter().map(|x| x * x).sum::<f64>() * h;
                let ip: f64 = v.iter().zip(&f).map(|(x, y)| x * y).sum::<f64>() * h;
                total += ip * ip / norm;
            }
        }

        // Continuous part over κ with E = μ + (4/h²) sin²(κh/2).
        let e_lo = a.max(mode.mu);
        let e_hi = b.min(mode.mu + 4.0 / (h * h));
        if e_hi <= e_lo {
            continue;
        }
        let kappa = |e: f64| 2.0 / h * ((e - mode.mu).max(0.0).sqrt() * h / 2.0).asin();
        let (k0, k1) = (kappa(e_lo), kappa(e_hi));
        let (gx, gw) = gauss_legendre(24);
        let panels = 64;
        let dk = (k1 - k0) / panels as f64;
        let mut part = 0.0;
        for pnl in 0..panels {
            let c = k0 + (pnl as f64 + 0.5) * dk;
            for (xi, wi) in gx.iter().zip(&gw) {
                let k = c + 0.5 * dk * xi;
                let e = mode.mu + 4.0 / (h * h) * (k * h / 2.0).sin().powi(2);
                // ψ_0 = 0, ψ_1 = 1, three-term recursion through the potential.
                let mut prev = 0.0;
                let mut cur = 1.0;
                let mut ip = f[0] * cur;
                for j in 1..=last_support {
                    let next = (2.0 + h * h * (shift[j - 1] - e)) * cur - prev;
                    prev = cur;
                    cur = next;
                    ip += f[j] * cur;
                }
                ip *= h;
                // Beyond the support ψ_j = A sin(κjh + δ).
                let ck = (k * h).cos();
                let sk = (k * h).sin();
                let amp_sq = (prev * prev + cur * cur - 2.0 * prev * cur * ck) / (sk * sk);
                // dμ/dκ = (2/π)|⟨φ,ψ⟩|²/A²: the E-density 2/(π A² (2/h) sin κh) times dE/dκ.
                part += 0.5 * dk * wi * 2.0 / std::f64::consts::PI * ip * ip / amp_sq;
            }
        }
        total += part;
    }
    Ok(total)
}
