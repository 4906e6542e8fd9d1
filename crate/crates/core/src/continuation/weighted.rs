use crate::error::{invalid, Error, Result};
use crate::scaling::{simpson_any, SampledFunction};

/// Exponential weight e^{δu} of the spaces L²_δ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedSpaceParam {
    delta: f64,
}

impl WeightedSpaceParam {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(invalid("weight exponent must be positive"));
        }
        Ok(Self { delta })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// Share of the total allowed in the last window before the tail counts as divergent.
pub const TAIL_FRACTION: f64 = 1e-6;

/// ∫ e^{2δu}|f(u)|² du times the cross-section factor ‖φ‖²_Y. Negative δ
/// gives the dual weight. Fails if the final unit of the sample range (or
/// its last tenth, if shorter) carries more than [`TAIL_FRACTION`].
pub fn weighted_norm_sq(f: &SampledFunction, delta: f64, cross_section: f64) -> Result<f64> {
    if f.values.len() < 3 {
        return Err(invalid("need at least three samples"));
    }
    if !delta.is_finite() || !(cross_section >= 0.0) {
        return Err(invalid(
            "weight and cross-section factor must be finite, the latter non-negative",
        ));
    }
    let h = f.step;
    let integrand: Vec<f64> = f
        .values
        .iter()
        .enumerate()
        .map(|(j, z)| (2.0 * delta * j as f64 * h).exp() * z.norm_sqr())
        .collect();
    let total = simpson_any(&integrand, h);
    let window = (1.0f64).min(f.extent() / 10.0);
    let k = ((window / h).round() as usize).clamp(1, integrand.len() - 1);
    let tail = simpson_any(&integrand[integrand.len() - 1 - k..], h);
    if !total.is_finite() {
        return Err(Error::DivergentTail {
            fraction: f64::INFINITY,
        });
    }
    if total > 0.0 && tail > TAIL_FRACTION * total {
        return Err(Error::DivergentTail {
            fraction: tail / total,
        });
    }
    Ok(total * cross_section)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn exp_decay(rate: f64) -> SampledFunction {
        SampledFunction::from_fn(1e-3, 40_001, |u| Complex64::new((-rate * u).exp(), 0.0))
    }

    #[test]
    fn indicator_has_unit_norm() {
        let f = SampledFunction::from_fn(1e-3, 5001, |u| {
            Complex64::new(if u <= 1.0 { 1.0 } else { 0.0 }, 0.0)
        });
        assert!((weighted_norm_sq(&f, 0.0, 1.0).unwrap() - 1.0).abs() < 2e-3);
    }

    #[test]
    fn exponential_profiles() {
        let v = weighted_norm_sq(&exp_decay(1.0), 0.5, 1.0).unwrap();
        assert!((v - 1.0).abs() < 1e-9, "{v}");
        assert!(matches!(
            weighted_norm_sq(&exp_decay(1.0), 1.0, 1.0),
            Err(Error::DivergentTail { .. })
        ));
        assert!(WeightedSpaceParam::new(0.0).is_err());
    }

    proptest! {
        #[test]
        fn monotone_in_delta(d1 in -0.5f64..0.4, dd in 0.0f64..0.4) {
            let f = exp_decay(1.5);
            let a = weighted_norm_sq(&f, d1, 1.0).unwrap();
            let b = weighted_norm_sq(&f, d1 + dd, 1.0).unwrap();
            prop_assert!(b >= a);
        }
    }
}
