use cornerscale_core::continuation::free_mode_kernel;
use cornerscale_core::discretize::Grid1D;
use cornerscale_core::lap::{
    lap_estimate, lattice_spectral_projection, stone_integral, LapConfig, LapVerdict, TestProfile,
    TestVector,
};
use cornerscale_core::modes::{ModeOperator, RadialPotential};
use cornerscale_core::numerics::gauss_composite;

fn indicator() -> TestProfile {
    TestProfile::SmoothedIndicator {
        end: 1.0,
        ramp: 0.3,
    }
}

fn config() -> LapConfig {
    // Step 0.01, so that 1 and the scaling radius 1.5 are lattice points.
    let mut cfg = LapConfig::new(Grid1D::fd2(24.0, 2399).unwrap());
    cfg.scaling_radius = Some(1.5);
    cfg
}

/// Im⟨φ, R(x + i0)φ⟩ for the free half-line from the continuum kernel.
fn free_boundary_value(x: f64) -> f64 {
    let p = indicator();
    let k = x.sqrt();
    // Im K(u, v) at Λ = √x is sin(Λu) sin(Λv)/Λ; check that against the kernel once.
    let direct = free_mode_kernel(num_complex::Complex64::new(k, 0.0), 0.3, 0.7)
        .unwrap()
        .im;
    assert!((direct - (k * 0.3).sin() * (k * 0.7).sin() / k).abs() < 1e-13);
    let s = gauss_composite(|u| p.eval(u) * (k * u).sin(), 0.0, 1.0, 20, 10);
    s * s / k
}

#[test]
fn free_mode_is_bounded_and_matches_boundary_values() {
    let cfg = config();
    let r = lap_estimate(
        &[ModeOperator::free(0.0)],
        &TestVector::single(0, indicator()),
        1.0,
        2.0,
        &cfg,
    )
    .unwrap();
    assert_eq!(r.verdict, LapVerdict::Bounded, "{r:?}");
    let exact = gauss_composite(|x| free_boundary_value(x).powi(2), 1.0, 2.0, 20, 10);
    let last = r.values[r.values.len() - 1];
    assert!((last - exact).abs() < 0.02 * exact, "{last} vs {exact}");
    assert!((r.sup_estimate - r.values.iter().copied().fold(0.0, f64::max)).abs() == 0.0);
}

#[test]
fn embedded_eigenvalue_grows() {
    // The well in the second mode has an eigenvalue near 0.0686, inside the first mode's continuum.
    let well = RadialPotential::square_well(5.0, 1.0).unwrap();
    let model = [
        ModeOperator::free(0.0),
        ModeOperator::cylindrical(1.0, well),
    ];
    let phi = TestVector::single(0, indicator()).with(1, 1.0, indicator());
    let r = lap_estimate(&model, &phi, 0.02, 0.12, &config()).unwrap();
    assert_eq!(r.verdict, LapVerdict::Growing, "{r:?}");
    // Only the first mode: no eigenvalue, bounded.
    let r0 = lap_estimate(
        &model,
        &TestVector::single(0, indicator()),
        0.02,
        0.12,
        &config(),
    )
    .unwrap();
    assert_eq!(r0.verdict, LapVerdict::Bounded, "{r0:?}");
}

#[test]
fn halving_the_quadrature_step_is_stable() {
    let model = [ModeOperator::free(0.0)];
    let phi = TestVector::single(0, indicator());
    let coarse = lap_estimate(&model, &phi, 1.0, 2.0, &config()).unwrap();
    let mut cfg = config();
    cfg.panels *= 2;
    let fine = lap_estimate(&model, &phi, 1.0, 2.0, &cfg).unwrap();
    for (a, b) in coarse.values.iter().zip(&fine.values) {
        assert!((a - b).abs() <= 0.01 * b, "{a} {b}");
    }
}

#[test]
fn stone_formula_matches_spectral_projection() {
    let well = RadialPotential::square_well(5.0, 1.0).unwrap();
    let cases = [
        (
            vec![ModeOperator::free(0.0)],
            TestVector::single(0, indicator()),
            1.0,
            2.0,
        ),
        (
            vec![ModeOperator::cylindrical(0.0, well.clone())],
            TestVector::single(0, indicator()),
            0.5,
            3.0,
        ),
        (
            vec![
                ModeOperator::free(0.0),
                ModeOperator::cylindrical(1.0, well),
            ],
            TestVector::single(0, indicator()).with(
                1,
                0.5,
                TestProfile::Bump {
                    center: 0.7,
                    half_width: 0.5,
                },
            ),
            0.02,
            0.12,
        ),
    ];
    let cfg = config();
    for (model, phi, a, b) in cases {
        let stone = stone_integral(&model, &phi, a, b, 1e-3, &cfg).unwrap();
        let exact = lattice_spectral_projection(&model, &phi, a, b, 0.01).unwrap();
        eprintln!("({a}, {b}): stone {stone} projection {exact}");
        assert!(
            (stone - exact).abs() <= 0.02 * exact,
            "({a}, {b}): {stone} vs {exact}"
        );
    }
}
