use num_complex::Complex64;
use proptest::prelude::*;

use scalevar::asymptotics::{default_threshold, dominant_part, fit_on_ladder, EpsilonLadder, DEFAULT_BASIS};
use scalevar::curves::{weierstrass, Curve};
use scalevar::qcalc::{leibniz_check, scale_derivative, scale_of};

fn coeffs() -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0).prop_map(|(a, b)| Complex64::new(a, b)), 5)
}

fn eval(cs: &[Complex64], e: f64) -> Complex64 {
    DEFAULT_BASIS.iter().zip(cs).map(|(p, z)| z * e.powf(*p)).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scale_derivative_is_linear(
        a in -2.0f64..2.0, b in -2.0f64..2.0, w in 0.5f64..5.0,
        t in -1.0f64..1.0, log_eps in -5.0f64..-1.0,
    ) {
        let e = 10f64.powf(log_eps);
        let f = |s: f64| Complex64::new((w * s).sin(), 0.0);
        let g = |s: f64| Complex64::new(s * s * s, 0.0);
        let lhs = scale_of(|s| a * f(s) + b * g(s), t, e);
        let rhs = a * scale_of(f, t, e) + b * scale_of(g, t, e);
        let size = 1.0 + (a.abs() + b.abs()) / e;
        prop_assert!((lhs - rhs).norm() <= 1e-13 * size);
    }

    #[test]
    fn corrected_product_rule_holds(
        alpha in 0.25f64..0.95, beta in 0.25f64..0.95,
        t in -1.0f64..1.0, log_eps in -4.0f64..-1.0,
    ) {
        let e = 10f64.powf(log_eps);
        let f = weierstrass(alpha, 2, 40).unwrap();
        let g = weierstrass(beta, 3, 30).unwrap();
        let r = leibniz_check(&f, &g, t, e).unwrap();
        prop_assert!(r.defect <= 1e-10 * r.lhs.norm().max(1.0), "defect {}", r.defect);
    }

    #[test]
    fn real_curves_have_conjugate_pairs(t in -1.0f64..1.0, log_eps in -4.0f64..-1.0) {
        let e = 10f64.powf(log_eps);
        let f = Curve::smooth(|s| s.exp() * s.cos());
        let v = scale_derivative(&f, t, e).unwrap().value;
        let c = scalevar::qcalc::conjugate_scale_derivative(&f, t, e).unwrap().value;
        prop_assert_eq!(v.conj(), c);
    }

    #[test]
    fn asymptotic_fit_is_linear(ca in coeffs(), cb in coeffs(), k in -2.0f64..2.0) {
        let ladder = EpsilonLadder::geometric(0.1, 0.5, 10).unwrap();
        let fa = fit_on_ladder(&ladder, &DEFAULT_BASIS, |e| eval(&ca, e)).unwrap();
        let fb = fit_on_ladder(&ladder, &DEFAULT_BASIS, |e| eval(&cb, e)).unwrap();
        let fs = fit_on_ladder(&ladder, &DEFAULT_BASIS, |e| eval(&ca, e) + k * eval(&cb, e)).unwrap();
        let scale = fs.coefficients.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for i in 0..DEFAULT_BASIS.len() {
            prop_assert!((fs.coefficients[i] - fa.coefficients[i] - k * fb.coefficients[i]).norm() <= 1e-10 * scale);
        }
    }

    #[test]
    fn dominant_part_is_idempotent(cs in coeffs()) {
        let ladder = EpsilonLadder::geometric(0.1, 0.5, 10).unwrap();
        let fit = fit_on_ladder(&ladder, &DEFAULT_BASIS, |e| eval(&cs, e)).unwrap();
        let d1 = dominant_part(&fit, default_threshold(&fit));
        let refit = fit_on_ladder(&ladder, &DEFAULT_BASIS, |e| d1.eval(e)).unwrap();
        let d2 = dominant_part(&refit, default_threshold(&refit));
        prop_assert_eq!(&d1.kept_exponents, &d2.kept_exponents);
        for p in &d1.kept_exponents {
            prop_assert!((d1.coefficient(*p) - d2.coefficient(*p)).norm() <= 1e-10 * d1.magnitude().max(1.0));
        }
    }

    #[test]
    fn dominant_part_drops_vanishing_terms(c1 in -3.0f64..3.0, c2 in -3.0f64..3.0) {
        let ladder = EpsilonLadder::geometric(0.1, 0.5, 10).unwrap();
        let fit = fit_on_ladder(&ladder, &DEFAULT_BASIS, |e| Complex64::new(c1 * e.sqrt() + c2 * e, 0.0)).unwrap();
        prop_assert!(dominant_part(&fit, default_threshold(&fit)).is_zero());
    }
}
