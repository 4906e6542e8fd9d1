use num_complex::Complex64;
use proptest::prelude::*;

use cornerscale_core::corner::{
    accumulation_check, channel_spectra, corner_discretize, corner_essential_spectrum,
    corner_resonances, AccumulationConfig, Channel, CornerModel, CornerResonanceConfig, Coupling,
    Grid2D, SolvePath,
};
use cornerscale_core::discretize::{find_resonances, Grid1D, ResonanceConfig};
use cornerscale_core::modes::{ModeOperator, RadialPotential};
use cornerscale_core::oracle;
use cornerscale_core::spectral::{
    make_cross_section, CrossSection, CrossSectionSpectrum, ScalingParameter,
};

fn point() -> CrossSectionSpectrum {
    make_cross_section(&CrossSection::Point, 10.0).unwrap()
}

fn well() -> RadialPotential {
    RadialPotential::square_well(5.0, 1.0).unwrap()
}

fn theta() -> ScalingParameter {
    ScalingParameter::new(Complex64::new(0.4, 0.3)).unwrap()
}

fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    v
}

#[test]
fn free_channels_and_rays() {
    let circle = make_cross_section(&CrossSection::Circle { radius: 1.0 }, 10.0).unwrap();
    let free = CornerModel::new(
        RadialPotential::zero(),
        RadialPotential::zero(),
        circle,
        Coupling::Zero,
        1.0,
    )
    .unwrap();
    let ch = channel_spectra(&free, &ResonanceConfig::new(Grid1D::fd2(8.0, 199).unwrap())).unwrap();
    let h3: Vec<f64> = ch.h3.iter().map(|e| e.value.re).collect();
    assert_eq!(h3, vec![0.0, 1.0, 4.0, 9.0]);
    assert!(ch.h1_pp.is_empty() && ch.h2_pp.is_empty());
    assert_eq!(corner_essential_spectrum(&ch, &theta()).unwrap().len(), 4);
}

#[test]
fn well_channel_adds_a_ray_per_threshold() {
    let circle = make_cross_section(&CrossSection::Circle { radius: 1.0 }, 5.0).unwrap();
    let m = CornerModel::new(well(), RadialPotential::zero(), circle, Coupling::Zero, 1.5).unwrap();
    let mut cfg = ResonanceConfig::new(Grid1D::fd2(12.0, 599).unwrap());
    cfg.max_energy = 3.0;
    let ch = channel_spectra(&m, &cfg).unwrap();
    let e1 = oracle::bound_states(&well(), 0.0).unwrap()[0];
    assert_eq!(ch.h1_pp.len(), 3);
    for e in &ch.h1_pp {
        assert_eq!(e.channel, Channel::One);
        assert!((e.value.re - e.mu - e1).abs() < 1e-4, "{} {}", e.value, e1);
        assert!(e.value.im <= 0.0);
    }
    let rays = corner_essential_spectrum(&ch, &theta()).unwrap();
    assert_eq!(rays.len(), ch.h3.len() + ch.h1_pp.len() + ch.h2_pp.len());
    let dir = theta().ray_direction();
    assert!(rays.rays.iter().all(|r| (r.direction - dir).norm() < 1e-15));
}

#[test]
fn product_of_wells_sits_at_the_summed_oracle() {
    let m = CornerModel::new(well(), well(), point(), Coupling::Zero, 1.5).unwrap();
    let op = corner_discretize(
        &m,
        0.0,
        ScalingParameter::unitary(0.0).unwrap(),
        &Grid2D::new(10.0, 399).unwrap(),
    )
    .unwrap();
    let e = op.eigenvalues(SolvePath::Kronecker).unwrap();
    let lowest = e.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    let e1 = oracle::bound_states(&well(), 0.0).unwrap()[0];
    assert!((lowest - 2.0 * e1).abs() < 1e-3, "{lowest} vs {}", 2.0 * e1);
}

#[test]
fn swapping_the_faces_leaves_the_spectrum_alone() {
    let c = Coupling::Indicator {
        strength: 0.8,
        u1: (0.0, 0.6),
        u2: (0.2, 1.1),
    };
    let m = CornerModel::new(
        well(),
        RadialPotential::barrier(3.0, 0.5, 1.2).unwrap(),
        point(),
        c,
        1.5,
    )
    .unwrap();
    let g = Grid2D::new(2.5, 50).unwrap();
    let a = sorted(
        corner_discretize(&m, 0.0, theta(), &g)
            .unwrap()
            .eigenvalues(SolvePath::Dense)
            .unwrap(),
    );
    let b = sorted(
        corner_discretize(&m.swapped(), 0.0, theta(), &g)
            .unwrap()
            .eigenvalues(SolvePath::Dense)
            .unwrap(),
    );
    let gap = a
        .iter()
        .zip(&b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    assert!(gap < 1e-9, "{gap}");
}

#[test]
fn separable_resonance_is_a_sum_of_face_values() {
    let bar = RadialPotential::barrier(8.0, 1.0, 2.0).unwrap();
    let m = CornerModel::new(well(), bar.clone(), point(), Coupling::Zero, 3.0).unwrap();
    let g = Grid2D::new(12.0, 299).unwrap();
    let mut cfg = CornerResonanceConfig::new(g);
    cfg.max_energy = 8.0;
    cfg.channels.richardson_levels = 0;
    cfg.channels.max_energy = 8.0;
    let set = corner_resonances(&m, &cfg).unwrap();
    assert_eq!(set.resonances().count(), 1, "{:?}", set.items);
    let z = set.resonances().next().unwrap().z;

    let mut one = ResonanceConfig::new(g.axis);
    one.richardson_levels = 0;
    one.max_energy = 8.0;
    one.scaling_radius = Some(3.0);
    // Unrefined, so the same θ-stability bound as the corner solve.
    one.stability_tolerance = cfg.stability_tolerance;
    let e = find_resonances(&[ModeOperator::cylindrical(0.0, well())], &one).unwrap();
    let r = find_resonances(&[ModeOperator::cylindrical(0.0, bar.clone())], &one).unwrap();
    let sum = e.bound_states().next().unwrap().z + r.resonances().next().unwrap().z;
    assert!((z - sum).norm() < 1e-4, "{z} vs {sum}");

    // And both are close to the continuum values.
    let exact = oracle::bound_states(&well(), 0.0).unwrap()[0]
        + oracle::resonance_newton(&bar, 0.0, Complex64::new(5.0, -0.09)).unwrap();
    assert!((z - exact).norm() < 2e-3, "{z} vs {exact}");
}

#[test]
fn free_corner_has_no_resonances() {
    let m = CornerModel::new(
        RadialPotential::zero(),
        RadialPotential::zero(),
        point(),
        Coupling::Zero,
        1.0,
    )
    .unwrap();
    let set = corner_resonances(
        &m,
        &CornerResonanceConfig::new(Grid2D::new(6.0, 60).unwrap()),
    )
    .unwrap();
    assert!(set.items.is_empty(), "{:?}", set.items);
}

#[test]
fn coupled_resonance_drifts_smoothly() {
    let bar = RadialPotential::barrier(8.0, 1.0, 2.0).unwrap();
    let bump = Coupling::Bump {
        strength: 1.0,
        center: (0.8, 1.5),
        half_width: 0.5,
    };
    let g = Grid2D::new(6.0, 99).unwrap();
    let model =
        |eps: f64| CornerModel::new(well(), bar.clone(), point(), bump.scaled(eps), 3.0).unwrap();
    let start = corner_discretize(&model(0.0), 0.0, theta(), &g).unwrap();
    let sums = start.eigenvalues(SolvePath::Kronecker).unwrap();
    let seed = sums
        .iter()
        .copied()
        .min_by(|a, b| {
            (a - Complex64::new(4.07, -0.086))
                .norm()
                .total_cmp(&(b - Complex64::new(4.07, -0.086)).norm())
        })
        .unwrap();
    let step = 0.02;
    let mut z = seed;
    let mut moves = Vec::new();
    for k in 1..=5 {
        let eps = step * k as f64;
        let (w, res) = corner_discretize(&model(eps), 0.0, theta(), &g)
            .unwrap()
            .eigenvalue_near(z)
            .unwrap();
        assert!(res < 1e-10, "{res}");
        moves.push(w - z);
        z = w;
    }
    for d in &moves {
        assert!(d.norm() <= 10.0 * step, "jump {d}");
    }
    // The bump overlaps the well state, so the real part rises monotonically.
    assert!(moves.iter().all(|d| d.re > 0.0), "{moves:?}");
}

#[test]
fn deep_double_wells_stay_discrete() {
    let g = Grid1D::fd2(40.0, 3999).unwrap();
    let depths: Vec<f64> = (1..=12).map(|k| 5.0 * k as f64).collect();
    let family = |d: f64| {
        CornerModel::new(
            RadialPotential::square_well(d, 1.0)?,
            RadialPotential::square_well(d, 1.0)?,
            point(),
            Coupling::Zero,
            1.5,
        )
    };
    let r = accumulation_check(family, &depths, &AccumulationConfig::new(g)).unwrap();
    assert!(r.is_consistent(), "{:?}", r.flags);
    assert!(!r.discrete.is_empty());
    // Every birth happens at an allowed point: 0 for face states, a channel value for products.
    assert!(r.births.iter().all(|b| b.entry.allowed_distance <= 1e-3));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn kronecker_spectrum_traces_and_swaps(depth in 1.0f64..8.0, height in 0.5f64..6.0, mu in 0.0f64..3.0) {
        let m = CornerModel::new(
            RadialPotential::square_well(depth, 1.0).unwrap(),
            RadialPotential::barrier(height, 0.4, 1.0).unwrap(),
            point(),
            Coupling::Zero,
            1.2,
        ).unwrap();
        let op = corner_discretize(&m, mu, theta(), &Grid2D::new(2.0, 50).unwrap()).unwrap();
        let (e1, e2) = op.axis_eigenvalues().unwrap();
        // Σ eigenvalues equals the trace of the assembled matrix.
        let trace: Complex64 = op.to_dense().unwrap().diag().iter().sum();
        let sum: Complex64 = e1.iter().flat_map(|a| e2.iter().map(move |b| a + b + mu)).sum();
        prop_assert!((trace - sum).norm() <= 1e-8 * trace.norm());
        let swapped = corner_discretize(&m.swapped(), mu, theta(), &Grid2D::new(2.0, 50).unwrap()).unwrap();
        let a = sorted(op.eigenvalues(SolvePath::Kronecker).unwrap());
        let b = sorted(swapped.eigenvalues(SolvePath::Kronecker).unwrap());
        prop_assert!(a.iter().zip(&b).all(|(p, q)| (p - q).norm() <= 1e-9 * (1.0 + p.norm())));
    }
}
