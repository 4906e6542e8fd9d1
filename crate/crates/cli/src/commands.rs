//! One function per subcommand. Each returns the artifacts to write; nothing
//! here touches the filesystem.

use cornerscale_core::continuation::{
    continue_matrix_element, decay_ratio, residual_g, AnalyticTerm, AnalyticVector, CoreModel,
    MatrixElementConfig, ParametrixGrid,
};
use cornerscale_core::corner::{
    accumulation_check, channel_spectra, corner_essential_spectrum, corner_resonances,
    AccumulationConfig, CornerModel, CornerResonanceConfig, PpSource,
};
use cornerscale_core::discretize::{bound_states, find_resonances, ResonanceConfig, ResonanceSet};
use cornerscale_core::lap::{lap_estimate, LapConfig, LapVerdict, TestProfile, TestVector};
use cornerscale_core::modes::{continuum_edge, cusp_to_schrodinger, ModeOperator, RadialPotential};
use cornerscale_core::oracle;
use cornerscale_core::scaling::{essential_rays, RaySet};
use cornerscale_core::spectral::{surface_point_uniform, Approach, Sheet};
use cornerscale_core::{io, Complex64};

use crate::config::{
    ApproachSpec, Command, Face, Geometry, RunConfig, SheetSpec, TermSpec, TestProfileSpec,
};
use crate::error::CliError;
use crate::report::{fmt_c, num as f, Outcome, Provenance, Table};
use crate::svg::Plot;

pub fn run(cfg: &RunConfig, command: Command) -> Result<Outcome, CliError> {
    let prov = Provenance::for_run(cfg, command.name());
    match command {
        Command::Spectrum => spectrum(cfg, prov),
        Command::Resonances => resonances(cfg, prov),
        Command::EssentialSpectrum => essential_spectrum(cfg, prov),
        Command::Continue => continuation(cfg, prov),
        Command::ParametrixCheck => parametrix_check(cfg, prov),
        Command::Lap => lap(cfg, prov),
        Command::Corner => corner(cfg, prov),
    }
}

fn require(cfg: &RunConfig, allowed: &[Geometry], command: &str) -> Result<(), CliError> {
    if allowed.contains(&cfg.model.geometry) {
        Ok(())
    } else {
        Err(CliError::Schema(format!(
            "`{command}` does not apply to {:?} geometry",
            cfg.model.geometry
        )))
    }
}

fn support(modes: &[ModeOperator]) -> f64 {
    modes
        .iter()
        .map(|m| m.potential.support_radius())
        .fold(0.0, f64::max)
}

pub fn resonance_config(cfg: &RunConfig) -> Result<ResonanceConfig, CliError> {
    let n = &cfg.numerics;
    let mut r = ResonanceConfig::new(cfg.grid()?);
    r.thetas = cfg.thetas()?;
    r.scaling_radius = n.scaling_radius;
    r.rays_tolerance = n.rays_tolerance;
    if let Some(s) = n.stability_tolerance {
        r.stability_tolerance = s;
    }
    r.residual_bound = n.residual_bound;
    r.max_energy = n.max_energy;
    r.richardson_levels = n.richardson_levels;
    r.imag_tolerance = n.imag_tolerance;
    Ok(r)
}

fn threshold_rays(cfg: &RunConfig) -> Result<RaySet, CliError> {
    let origins: Vec<(Complex64, String)> = cfg
        .cross_section()?
        .thresholds()
        .into_iter()
        .map(|mu| (Complex64::new(mu, 0.0), format!("mu={mu}")))
        .collect();
    Ok(essential_rays(&origins, &cfg.theta()?)?)
}

fn spectrum(cfg: &RunConfig, mut prov: Provenance) -> Result<Outcome, CliError> {
    require(cfg, &[Geometry::Cylindrical, Geometry::Cusp], "spectrum")?;
    let modes = cfg.modes()?;
    let mut out = Outcome::default();
    if cfg.model.geometry == Geometry::Cusp {
        let (t0, t1) = cfg.numerics.t_window;
        prov.push(
            "t_window",
            format!("[{}, {}] n={}", f(t0), f(t1), cfg.numerics.points),
        );
        let mut t = Table::new(prov, &["mode", "mu", "index", "value", "continuum_edge"]);
        for m in &modes {
            let line = cusp_to_schrodinger(m)?;
            let levels = line
                .discretize_weighted_u(t0, t1, cfg.numerics.points)?
                .lowest(cfg.numerics.levels.max(2));
            let edge = continuum_edge(&levels)?;
            out.summary
                .push(format!("{}: continuum edge {edge}", m.label));
            for (k, v) in levels.iter().enumerate() {
                t.row(vec![
                    m.label.clone(),
                    f(m.mu),
                    k.to_string(),
                    f(*v),
                    f(edge),
                ]);
            }
        }
        out.table("spectrum.csv", &t)?;
        return Ok(out);
    }
    let grid = cfg.grid()?;
    let mut t = Table::new(
        prov,
        &["mode", "mu", "index", "value", "refined", "error_estimate"],
    );
    for m in &modes {
        for b in bound_states(m, &grid, cfg.numerics.richardson_levels)? {
            out.summary.push(format!(
                "{} bound state {}: {}",
                m.label, b.index, b.refined
            ));
            t.row(vec![
                m.label.clone(),
                f(m.mu),
                b.index.to_string(),
                f(b.value),
                f(b.refined),
                f(b.error_estimate),
            ]);
        }
    }
    out.table("spectrum.csv", &t)?;
    Ok(out)
}

fn resonance_table(prov: Provenance, set: &ResonanceSet) -> Table {
    let mut t = Table::new(
        prov,
        &[
            "re",
            "im",
            "residual",
            "theta_spread",
            "mode",
            "method",
            "kind",
            "multiplicity",
        ],
    );
    for r in &set.items {
        t.row(vec![
            f(r.z.re),
            f(r.z.im),
            f(r.residual),
            f(r.theta_spread),
            r.mode.clone(),
            r.method.clone(),
            format!("{:?}", r.kind).to_lowercase(),
            r.multiplicity.to_string(),
        ]);
    }
    t
}

fn resonance_plot(title: &str, set: &ResonanceSet, rays: &RaySet) -> String {
    Plot::new(title)
        .rays(rays)
        .points(
            "resonances",
            "#c33",
            set.resonances().map(|r| r.z).collect(),
        )
        .points(
            "bound states",
            "#36c",
            set.bound_states().map(|r| r.z).collect(),
        )
        .render()
}

fn resonances(cfg: &RunConfig, prov: Provenance) -> Result<Outcome, CliError> {
    require(cfg, &[Geometry::Cylindrical], "resonances")?;
    let set = find_resonances(&cfg.modes()?, &resonance_config(cfg)?)?;
    let mut out = Outcome::default();
    out.warnings.extend(set.warnings.iter().cloned());
    for r in &set.items {
        out.summary
            .push(format!("{} {:?} {}", r.mode, r.kind, fmt_c(r.z)));
    }
    if cfg.output.wants("csv") {
        out.table("resonances.csv", &resonance_table(prov, &set))?;
    }
    if cfg.output.wants("svg") {
        let rays = threshold_rays(cfg)?;
        out.file(
            "resonances.svg",
            resonance_plot("resonances and threshold rays", &set, &rays).into_bytes(),
        );
    }
    Ok(out)
}

fn ray_table(prov: Provenance, rays: &RaySet) -> Table {
    let mut t = Table::new(
        prov,
        &[
            "origin_re",
            "origin_im",
            "direction_re",
            "direction_im",
            "arg",
            "label",
        ],
    );
    for r in &rays.rays {
        t.row(vec![
            f(r.origin.re),
            f(r.origin.im),
            f(r.direction.re),
            f(r.direction.im),
            f(r.direction.arg()),
            r.label.clone(),
        ]);
    }
    t
}

fn essential_spectrum(cfg: &RunConfig, prov: Provenance) -> Result<Outcome, CliError> {
    require(
        cfg,
        &[Geometry::Cylindrical, Geometry::Corner],
        "essential-spectrum",
    )?;
    let rays = if cfg.model.geometry == Geometry::Corner {
        let ch = channel_spectra(&cfg.corner_model()?, &resonance_config(cfg)?)?;
        corner_essential_spectrum(&ch, &cfg.theta()?)?
    } else {
        threshold_rays(cfg)?
    };
    let mut out = Outcome::default();
    out.summary.push(format!(
        "{} rays, direction arg {}",
        rays.len(),
        cfg.theta()?.ray_direction().arg()
    ));
    if cfg.output.wants("csv") {
        out.table("rays.csv", &ray_table(prov, &rays))?;
    }
    if cfg.output.wants("svg") {
        let plot = Plot::new("essential spectrum").rays(&rays).points(
            "ray origins",
            "#333",
            rays.origins(),
        );
        out.file("rays.svg", plot.render().into_bytes());
    }
    Ok(out)
}

fn analytic(terms: &[TermSpec]) -> Result<AnalyticVector, CliError> {
    if terms.is_empty() {
        return Err(CliError::Schema(
            "analytic vector needs at least one term".into(),
        ));
    }
    Ok(AnalyticVector {
        terms: terms
            .iter()
            .map(|t| AnalyticTerm {
                coefficient: Complex64::new(t.coefficient, 0.0),
                power: t.power,
                center: Complex64::new(t.center, 0.0),
            })
            .collect(),
    })
}

fn continuation(cfg: &RunConfig, mut prov: Provenance) -> Result<Outcome, CliError> {
    require(cfg, &[Geometry::Cylindrical], "continue")?;
    let task = &cfg.task.continuation;
    let modes = cfg.modes()?;
    let mode = modes.get(task.mode).ok_or_else(|| {
        CliError::Schema(format!(
            "mode {} out of range ({} modes)",
            task.mode,
            modes.len()
        ))
    })?;
    let radius = cfg
        .numerics
        .scaling_radius
        .unwrap_or(mode.potential.support_radius() + 1.0);
    let mut me = MatrixElementConfig::new(cfg.grid()?, radius);
    me.richardson_levels = cfg.numerics.richardson_levels;
    let path: Vec<Complex64> = task
        .path
        .iter()
        .map(|p| Complex64::new(p[0], p[1]))
        .collect();
    let values = continue_matrix_element(
        mode,
        &analytic(&task.f)?,
        &analytic(&task.g)?,
        &path,
        cfg.theta()?,
        &me,
    )?;
    prov.push("mode", mode.label.clone());
    prov.push("scaling_radius", f(radius));
    let mut t = Table::new(
        prov,
        &[
            "lambda_re",
            "lambda_im",
            "value_re",
            "value_im",
            "error_estimate",
        ],
    );
    for v in &values {
        t.row(vec![
            f(v.lambda.re),
            f(v.lambda.im),
            f(v.value.re),
            f(v.value.im),
            f(v.error_estimate),
        ]);
    }
    let mut out = Outcome::default();
    out.summary.push(format!("{} path points", values.len()));
    out.table("continue.csv", &t)?;
    Ok(out)
}

fn parametrix_check(cfg: &RunConfig, mut prov: Provenance) -> Result<Outcome, CliError> {
    require(cfg, &[Geometry::Cylindrical], "parametrix-check")?;
    let task = &cfg.task.parametrix;
    let modes = cfg.modes()?;
    let core_radius = task.core_radius.unwrap_or(support(&modes).max(1.0));
    let core = CoreModel::new(&modes, core_radius)?;
    let sheet = match task.sheet {
        SheetSpec::Physical => Sheet::Physical,
        SheetSpec::Second => Sheet::Second,
    };
    let approach = match task.approach {
        ApproachSpec::Exact => Approach::Exact,
        ApproachSpec::Above => Approach::Above,
        ApproachSpec::Below => Approach::Below,
    };
    let lambda = Complex64::new(task.lambda[0], task.lambda[1]);
    let point = surface_point_uniform(lambda, &cfg.cross_section()?, sheet, approach)?;
    let g = residual_g(&point, &core, ParametrixGrid::new(task.step, task.length)?)?;

    prov.push("lambda", fmt_c(lambda));
    prov.push(
        "lattice",
        format!(
            "h={} L={} core_radius={}",
            f(task.step),
            f(task.length),
            f(core_radius)
        ),
    );
    prov.push(
        "decay_check",
        format!(
            "sigma_2k <= {} sigma_k above {} sigma_1",
            f(task.ratio),
            f(task.floor)
        ),
    );
    let mut t = Table::new(prov, &["block", "mode", "multiplicity", "k", "sigma"]);
    let mut out = Outcome::default();
    for (b, block) in g.blocks.iter().enumerate() {
        let sv = cornerscale_core::numerics::dense::singular_values(&block.matrix)?;
        for (k, s) in sv.iter().enumerate() {
            t.row(vec![
                b.to_string(),
                block.mode.clone(),
                block.multiplicity.to_string(),
                (k + 1).to_string(),
                f(*s),
            ]);
        }
        match decay_ratio(&sv, task.floor) {
            Some(r) => {
                out.summary
                    .push(format!("{}: worst sigma_2k/sigma_k {r}", block.mode));
                if r > task.ratio {
                    out.warnings.push(format!(
                        "{}: decay check fails, worst ratio {r} > {}",
                        block.mode, task.ratio
                    ));
                }
            }
            None => out.warnings.push(format!(
                "{}: too few resolved singular values for the decay check",
                block.mode
            )),
        }
        if cfg.output.wants("matrix") {
            let mut buf = Vec::new();
            io::write_complex(&mut buf, &block.matrix)?;
            out.file(&format!("parametrix_g_{b}.csmx"), buf);
        }
    }
    if cfg.output.wants("csv") {
        out.table("parametrix.csv", &t)?;
    }
    Ok(out)
}

fn lap(cfg: &RunConfig, mut prov: Provenance) -> Result<Outcome, CliError> {
    require(cfg, &[Geometry::Cylindrical], "lap")?;
    let task = &cfg.task.lap;
    let mut lc = LapConfig::new(cfg.grid()?);
    lc.epsilons = task.epsilons.clone();
    lc.panels = task.panels;
    lc.p = task.p;
    lc.flatness = task.flatness;
    lc.growth_ratio = task.growth_ratio;
    lc.theta = cfg.theta()?;
    lc.scaling_radius = cfg.numerics.scaling_radius;
    let mut phi = TestVector::default();
    for c in &task.phi {
        let profile = match c.profile {
            TestProfileSpec::SmoothedIndicator { end, ramp } => {
                TestProfile::SmoothedIndicator { end, ramp }
            }
            TestProfileSpec::Bump { center, half_width } => {
                TestProfile::Bump { center, half_width }
            }
        };
        phi = phi.with(c.mode, c.coefficient, profile);
    }
    let (a, b) = task.interval;
    let r = lap_estimate(&cfg.modes()?, &phi, a, b, &lc)?;
    prov.push("interval", format!("({a}, {b})"));
    prov.push("p", f(r.p));
    prov.push("verdict", r.verdict.to_string());
    prov.push("tail_spread", f(r.tail_spread));
    prov.push("sup_estimate", f(r.sup_estimate));
    let mut t = Table::new(prov, &["epsilon", "value"]);
    for (e, v) in r.epsilons.iter().zip(&r.values) {
        t.row(vec![f(*e), f(*v)]);
    }
    let mut out = Outcome::default();
    out.summary
        .push(format!("verdict on ({a}, {b}): {}", r.verdict));
    if r.verdict == LapVerdict::Inconclusive {
        out.warnings.push(format!(
            "limiting absorption on ({a}, {b}) is inconclusive (tail spread {})",
            r.tail_spread
        ));
    }
    out.table("lap.csv", &t)?;
    Ok(out)
}

fn corner(cfg: &RunConfig, prov: Provenance) -> Result<Outcome, CliError> {
    require(cfg, &[Geometry::Corner], "corner")?;
    let model = cfg.corner_model()?;
    let theta = cfg.theta()?;
    let channels_cfg = resonance_config(cfg)?;
    let ch = channel_spectra(&model, &channels_cfg)?;
    let rays = corner_essential_spectrum(&ch, &theta)?;
    let mut out = Outcome::default();
    out.warnings.extend(ch.warnings.iter().cloned());

    let mut ct = Table::new(
        prov.clone(),
        &["channel", "mu", "re", "im", "multiplicity", "provenance"],
    );
    for e in ch.all() {
        ct.row(vec![
            e.channel.to_string(),
            f(e.mu),
            f(e.value.re),
            f(e.value.im),
            e.multiplicity.to_string(),
            e.provenance.clone(),
        ]);
    }
    out.summary.push(format!(
        "channels: {} thresholds, {} H1 and {} H2 values",
        ch.h3.len(),
        ch.h1_pp.len(),
        ch.h2_pp.len()
    ));

    let mut set = ResonanceSet::default();
    if cfg.task.corner.resonances {
        let mut rc = CornerResonanceConfig::new(cfg.corner_grid()?);
        rc.thetas = cfg.thetas()?;
        rc.rays_tolerance = cfg.numerics.rays_tolerance;
        if let Some(s) = cfg.numerics.stability_tolerance {
            rc.stability_tolerance = s;
        }
        rc.max_energy = cfg.numerics.max_energy;
        rc.imag_tolerance = cfg.numerics.imag_tolerance;
        rc.path = cfg.solve_path();
        rc.channels = channels_cfg.clone();
        set = corner_resonances(&model, &rc)?;
        out.warnings.extend(set.warnings.iter().cloned());
        out.summary.push(format!(
            "corner: {} eigenvalues off the rays",
            set.items.len()
        ));
    }

    if cfg.output.wants("csv") {
        out.table("corner_channels.csv", &ct)?;
        out.table("corner_rays.csv", &ray_table(prov.clone(), &rays))?;
        if cfg.task.corner.resonances {
            let mut p = prov.clone();
            p.push(
                "corner_grid",
                format!(
                    "{0}x{0} on [0, {1}]^2",
                    cfg.task.corner.points,
                    f(cfg.numerics.length)
                ),
            );
            out.table("corner_resonances.csv", &resonance_table(p, &set))?;
        }
    }
    if cfg.output.wants("svg") {
        out.file(
            "corner.svg",
            resonance_plot("corner spectrum and channel rays", &set, &rays).into_bytes(),
        );
    }

    if let Some(acc) = &cfg.task.corner.accumulation {
        let base = model.clone();
        let width = acc.width;
        let face = acc.face;
        let family = move |d: f64| -> cornerscale_core::Result<CornerModel> {
            let w = RadialPotential::square_well(d, width)?;
            let z2 = if face == Face::Both {
                w.clone()
            } else {
                base.z2.clone()
            };
            CornerModel::new(
                w,
                z2,
                base.cross_section.clone(),
                base.coupling.clone(),
                base.radius,
            )
        };
        let r = accumulation_check(family, &acc.depths, &AccumulationConfig::new(cfg.grid()?))?;
        out.warnings.extend(r.flags.iter().cloned());
        out.summary.push(format!(
            "accumulation: {} births, targets {:?}, {} flags",
            r.births.len(),
            r.targets,
            r.flags.len()
        ));
        let mut p = prov;
        p.push("targets", format!("{:?}", r.targets));
        let mut t = Table::new(
            p,
            &[
                "parameter",
                "value",
                "source",
                "mu",
                "index",
                "allowed_distance",
                "target",
                "birth",
            ],
        );
        for e in &r.entries {
            let source = match e.source {
                PpSource::Channel(c) => c.to_string(),
                PpSource::Corner => "corner".into(),
            };
            let born = r.births.iter().any(|b| {
                b.entry.source == e.source && b.entry.index == e.index && b.entry.mu == e.mu
            });
            t.row(vec![
                f(e.parameter),
                f(e.value),
                source,
                f(e.mu),
                format!("{}:{}", e.index.0, e.index.1),
                f(e.allowed_distance),
                f(e.target),
                born.to_string(),
            ]);
        }
        if cfg.output.wants("csv") {
            out.table("corner_accumulation.csv", &t)?;
        }
    }
    Ok(out)
}

/// Matching-equation oracles, independent of any grid.
pub enum OracleQuery {
    Well {
        depth: f64,
        width: f64,
        mu: f64,
    },
    Barrier {
        height: f64,
        start: f64,
        end: f64,
        mu: f64,
        re: (f64, f64),
        im: (f64, f64),
    },
}

pub fn oracle_run(q: &OracleQuery) -> Result<Outcome, CliError> {
    let mut prov = Provenance::default();
    prov.push("tool", format!("cornerscale {}", env!("CARGO_PKG_VERSION")));
    prov.push("command", "oracle");
    let mut out = Outcome::default();
    let mut t;
    match *q {
        OracleQuery::Well { depth, width, mu } => {
            let pot = RadialPotential::square_well(depth, width).map_err(CliError::schema)?;
            prov.push("model", format!("well depth={depth} width={width} mu={mu}"));
            t = Table::new(prov, &["index", "re", "im", "kind"]);
            for (k, e) in oracle::bound_states(&pot, mu)?.iter().enumerate() {
                out.summary.push(f(*e));
                t.row(vec![k.to_string(), f(*e), "0".into(), "boundstate".into()]);
            }
        }
        OracleQuery::Barrier {
            height,
            start,
            end,
            mu,
            re,
            im,
        } => {
            let pot = RadialPotential::barrier(height, start, end).map_err(CliError::schema)?;
            prov.push(
                "model",
                format!("barrier height={height} on [{start}, {end}] mu={mu}"),
            );
            prov.push("box", format!("re {re:?} im {im:?}"));
            t = Table::new(prov, &["index", "re", "im", "kind"]);
            for (k, z) in oracle::resonances_in_box(&pot, mu, re, im)?
                .iter()
                .enumerate()
            {
                out.summary.push(fmt_c(*z));
                t.row(vec![k.to_string(), f(z.re), f(z.im), "resonance".into()]);
            }
        }
    }
    out.table("oracle.csv", &t)?;
    Ok(out)
}
