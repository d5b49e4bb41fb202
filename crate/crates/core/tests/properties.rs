mod common;

use common::c;
use num_complex::Complex64;
use proptest::prelude::*;
use singmap::*;

fn complex(bound: f64) -> impl Strategy<Value = Complex64> {
    (-bound..bound, -bound..bound).prop_map(|(re, im)| c(re, im))
}

fn series(order: usize) -> impl Strategy<Value = TruncatedSeries> {
    prop::collection::vec(complex(2.0), order + 1).prop_map(|v| TruncatedSeries::new(c(0.0, 0.0), v).unwrap())
}

fn close(a: &TruncatedSeries, b: &TruncatedSeries, tol: f64) -> bool {
    a.coeffs()
        .iter()
        .zip(b.coeffs())
        .all(|(x, y)| (x - y).norm() <= tol * (1.0 + x.norm()))
}

/// Taylor coefficients of (a - t)^(-s) about `t0`.
fn pole_series(a: Complex64, s: f64, t0: Complex64, order: usize) -> TruncatedSeries {
    let d = a - t0;
    let mut coeffs = vec![d.powf(-s)];
    for k in 0..order {
        let next = coeffs[k] * (s + k as f64) / ((k + 1) as f64 * d);
        coeffs.push(next);
    }
    TruncatedSeries::new(t0, coeffs).unwrap()
}

fn fit(s: &TruncatedSeries) -> SingularityEstimate {
    fit_primary_singularity(s, DEFAULT_WINDOW, DEFAULT_ACCEPT_THRESHOLD).unwrap()
}

proptest! {
    #[test]
    fn mul_commutes(a in series(12), b in series(12)) {
        prop_assert!(close(&a.mul(&b).unwrap(), &b.mul(&a).unwrap(), 1e-13));
    }

    #[test]
    fn mul_associates(a in series(10), b in series(10), d in series(10)) {
        let left = a.mul(&b).unwrap().mul(&d).unwrap();
        let right = a.mul(&b.mul(&d).unwrap()).unwrap();
        prop_assert!(close(&left, &right, 1e-11));
    }

    #[test]
    fn mul_distributes(a in series(10), b in series(10), d in series(10)) {
        let left = a.mul(&b.add(&d).unwrap()).unwrap();
        let right = a.mul(&b).unwrap().add(&a.mul(&d).unwrap()).unwrap();
        prop_assert!(close(&left, &right, 1e-12));
    }

    #[test]
    fn eval_matches_product_of_evals(a in series(20), b in series(20), h in complex(0.05)) {
        // truncation is negligible for |h| < 0.05 and coefficients below 2
        let prod = a.mul(&b).unwrap().eval(h);
        prop_assert!((prod - a.eval(h) * b.eval(h)).norm() < 1e-10);
    }

    #[test]
    fn locator_recovers_any_exponent(r in 0.1f64..10.0, theta in -3.1f64..3.1, s in 0.5f64..3.5) {
        let a = Complex64::from_polar(r, theta);
        let est = fit(&pole_series(a, s, c(0.0, 0.0), 45));
        prop_assert!(est.accepted);
        prop_assert!((est.location - a).norm() <= 1e-8 * r);
        prop_assert!((est.order_s - s).norm() <= 1e-8 * s);
    }

    #[test]
    fn locator_is_translation_covariant(a in complex(5.0), t0 in complex(5.0), s in 1u32..=3) {
        prop_assume!((a - t0).norm() > 0.1);
        let est = fit(&pole_series(a, s as f64, t0, 45));
        prop_assert!(est.accepted);
        prop_assert!((est.location - a).norm() <= 1e-8 * (1.0 + a.norm()));
        prop_assert_eq!(est.step_point, t0);
    }

    #[test]
    fn locator_is_scale_covariant(a in complex(3.0), k in complex(1e3), s in 1u32..=3) {
        prop_assume!(a.norm() > 0.1 && k.norm() > 1e-3);
        let base = pole_series(a, s as f64, c(0.0, 0.0), 45);
        let plain = fit(&base);
        let scaled = fit(&base.scale(k));
        prop_assert_eq!(plain.accepted, scaled.accepted);
        prop_assert!((plain.location - scaled.location).norm() <= 1e-9 * a.norm());
        prop_assert!((plain.order_s - scaled.order_s).norm() <= 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Small loops in the pole-free disc around the origin return to their
    /// starting values.
    #[test]
    fn small_loops_return(cx in -0.4f64..0.4, cy in -0.4f64..0.4, r in 0.05f64..0.4, chords in 3usize..10) {
        let lp = circle_loop(c(cx, cy), r, chords, 0.0).unwrap();
        let y0 = common::y0();
        let route = excursion(c(0.0, 0.0), &lp).unwrap();
        let check = closed_loop_check(&PainleveI, &y0, &route, &IntegrationOptions::default()).unwrap();
        prop_assert!(check.return_error < 1e-8, "return error {}", check.return_error);
    }
}
