//! Property tests: positivity, linearity, normalization, and the identity
//! `M_n Φ_v = Φ_{P v}` linking the operator to its coefficient matrix.

use proptest::prelude::*;
use smld_core::operator::{apply_operator, OperatorParams, TestFunction, TruncationPolicy};
use smld_core::spectral::{build_p, lift, PoissonSeries};

fn pol() -> TruncationPolicy {
    TruncationPolicy::default()
}

fn params_strategy() -> impl Strategy<Value = OperatorParams> {
    (2.0f64..60.0, -0.9f64..2.0, 0.0f64..0.9)
        .prop_map(|(n, alpha, frac)| OperatorParams::new(n, alpha, frac * n).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn constants_are_reproduced(p in params_strategy(), x in 0.0f64..6.0, c in -5.0f64..5.0) {
        let got = apply_operator(&TestFunction::constant(c), x, &p, &pol()).unwrap();
        prop_assert!((got - c).abs() <= 1e-12 * c.abs().max(1.0), "{got} vs {c}");
    }

    #[test]
    fn nonnegative_functions_have_nonnegative_images(p in params_strategy(), x in 0.0f64..6.0, shift in 0.0f64..4.0) {
        let got = apply_operator(&TestFunction::abs_shift(shift), x, &p, &pol()).unwrap();
        prop_assert!(got >= 0.0);
        let got = apply_operator(&TestFunction::sqrt(), x, &p, &pol()).unwrap();
        prop_assert!(got >= 0.0);
    }

    #[test]
    fn linear_in_the_function(p in params_strategy(), x in 0.0f64..5.0, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        // b + a·t² as one polynomial against the sum of the separate images.
        let t2 = apply_operator(&TestFunction::monomial(2), x, &p, &pol()).unwrap();
        let e = apply_operator(&TestFunction::exp(-1.0), x, &p, &pol()).unwrap();
        let poly = apply_operator(&TestFunction::polynomial(vec![b, 0.0, a]), x, &p, &pol()).unwrap();
        let one = apply_operator(&TestFunction::constant(b), x, &p, &pol()).unwrap();
        prop_assert!((poly - (a * t2 + one)).abs() <= 1e-11 * (a.abs() * t2 + b.abs()).max(1.0));
        prop_assert!(e > 0.0 && e <= 1.0);
    }

    #[test]
    fn monotone_in_the_function(p in params_strategy(), x in 0.0f64..5.0) {
        // sin(t) <= 1 pointwise, so M_n sin <= 1.
        let s = apply_operator(&TestFunction::sin(1.0), x, &p, &pol()).unwrap();
        prop_assert!(s <= 1.0 + 1e-13);
        prop_assert!(s >= -1.0 - 1e-13);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn operator_acts_on_poisson_series_through_p(
        v in prop::collection::vec(-1.0f64..1.0, 1..40),
        n in 4.0f64..20.0,
        alpha in -0.5f64..1.0,
        frac in 0.0f64..0.6,
        x in 0.0f64..2.0,
    ) {
        let p = OperatorParams::new(n, alpha, frac * n).unwrap();
        let matrix = build_p(&p, 600).unwrap();
        let pv = matrix.mul_vec(&v).unwrap();
        let want = lift(&pv, x, n, &pol()).unwrap();
        let series = PoissonSeries::new(v.clone(), n).unwrap();
        let got = apply_operator(&series, x, &p, &pol()).unwrap();
        prop_assert!((got - want).abs() < 1e-10, "{got} vs {want}");
    }
}
