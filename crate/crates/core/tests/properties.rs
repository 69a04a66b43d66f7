use proptest::prelude::*;
use qpcascade::forced::{cocycle_derivative, double_map, map_step, CylinderState, ForcedFamily, ForcingSpec, ParamPoint};
use qpcascade::numerics::richardson::richardson_extrapolate;
use qpcascade::numerics::{parse_real, DoubleDouble, FourierCoeffs, GridSamples, Real, Transform};
use qpcascade::unimodal::feigenbaum_ratios;
use qpcascade::universality::AffineSelfSimMap;

fn golden() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transform_round_trip(exp in 2u32..9, seed in proptest::collection::vec(-1.0f64..1.0, 256)) {
        let n = 1usize << exp;
        let tr = Transform::<f64>::new(n).unwrap();
        let x = GridSamples::new(seed[..n].to_vec()).unwrap();
        let back = tr.inverse(&tr.forward(&x).unwrap()).unwrap();
        let err = x.values().iter().zip(back.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(err <= 8.0 * n as f64 * f64::EPSILON);
    }

    #[test]
    fn coefficients_evaluate_like_samples(c in proptest::collection::vec(-1.0f64..1.0, 16)) {
        let coeffs = FourierCoeffs::from_vec(&c).unwrap();
        let samples = Transform::<f64>::new(16).unwrap().inverse(&coeffs).unwrap();
        for (j, v) in samples.values().iter().enumerate() {
            prop_assert!((coeffs.eval(j as f64 / 16.0) - v).abs() < 1e-13);
        }
    }

    #[test]
    fn doubled_family_is_two_steps(
        alpha in 2.5f64..4.0,
        eps in 0.0f64..0.2,
        theta in 0.0f64..1.0,
        x in 0.0f64..1.0,
        kind in 0usize..3,
    ) {
        let forcing = match kind {
            0 => ForcingSpec::multiplicative(),
            1 => ForcingSpec::additive(),
            _ => ForcingSpec::two_harmonic(0.1),
        };
        let f = ForcedFamily::new(golden(), forcing).unwrap();
        let d = double_map(&f);
        let p = ParamPoint::new(alpha, eps);
        let s = CylinderState::new(theta, x);
        let once = map_step(&f, &p, s);
        prop_assert_eq!(map_step(&d, &p, s), map_step(&f, &p, once));
        prop_assert_eq!(cocycle_derivative(&d, &p, s), cocycle_derivative(&f, &p, s) * cocycle_derivative(&f, &p, once));
        prop_assert!((d.omega() - (2.0 * golden()).fract()).abs() < 1e-15);
    }

    #[test]
    fn affine_map_inverts(s_star in 3.0f64..4.0, d0 in 1.5f64..8.0, d1 in 1.5f64..10.0, a in 2.0f64..4.0, e in 0.0f64..0.2) {
        let m = AffineSelfSimMap { s_star, delta0: d0, delta1: d1 };
        let p = ParamPoint::new(a, e);
        let q = m.invert(&m.apply(&p));
        prop_assert!((q.alpha - a).abs() < 1e-13 && (q.epsilon - e).abs() < 1e-15);
        prop_assert_eq!(m.apply(&ParamPoint::new(s_star, 0.0)), ParamPoint::new(s_star, 0.0));
    }

    #[test]
    fn richardson_removes_polynomial_error(a in -10.0f64..10.0, b in -10.0f64..10.0, c in -10.0f64..10.0, h0 in 1e-3f64..1e-1) {
        let est: Vec<(f64, f64)> = (0..6).map(|k| {
            let h = h0 / (1u64 << k) as f64;
            (h, a + b * h + c * h * h)
        }).collect();
        let r = richardson_extrapolate(&est, 2).unwrap();
        prop_assert!((r.value - a).abs() < 1e-11 * (1.0 + a.abs() + b.abs() + c.abs()));
    }

    #[test]
    fn geometric_gaps_give_constant_ratio(start in 1.0f64..3.0, gap in 0.1f64..1.0, q in 2.0f64..8.0) {
        let mut v = vec![start];
        for k in 0..5 {
            v.push(v[k] + gap / q.powi(k as i32));
        }
        for r in feigenbaum_ratios(&v).unwrap() {
            prop_assert!((r - q).abs() < 1e-9 * q);
        }
    }

    #[test]
    fn double_double_cancels_exactly(a in -1e3f64..1e3, b in -1e3f64..1e3) {
        let x = DoubleDouble::from_f64(a) + DoubleDouble::from_f64(b) * DoubleDouble::from_f64(1e-20);
        let y = x - DoubleDouble::from_f64(a);
        prop_assert!((y.to_f64() - b * 1e-20).abs() <= 1e-30 * (1.0 + b.abs()));
    }
}

#[test]
fn double_double_parses_beyond_f64() {
    let third: DoubleDouble = parse_real("0.33333333333333333333333333333333").unwrap();
    let err = (third * DoubleDouble::from_f64(3.0) - DoubleDouble::one()).abs().to_f64();
    assert!(err < 1e-30, "{err}");
    let plain: f64 = parse_real("0.33333333333333333333333333333333").unwrap();
    assert!(((plain * 3.0) - 1.0).abs() < 1e-15);
}
