use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rzero::counting::*;
use rzero::locator::{isolate_zeros_with, Polynomial};
use rzero::special::{chi_c, eta_c};
use rzero::Error;

fn roots_strategy(max: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 1..=max)
}

fn poly(roots: &[(f64, f64)]) -> Polynomial {
    let r: Vec<Complex64> = roots.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
    Polynomial::from_roots(Complex64::new(1.0, 0.0), &r)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn backlund_inequality_holds(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let trial = backlund_trial(&mut rng, 12, 1e-2).unwrap();
        prop_assert!(trial.holds(), "{trial:?}");
    }

    #[test]
    fn winding_is_near_integer_and_additive(roots in roots_strategy(8), cut in -1.9..1.9f64) {
        let f = poly(&roots);
        let whole = Rect::new(-2.5, 2.5, -2.5, 2.5).unwrap();
        let lower = Rect { t_hi: cut, ..whole };
        let upper = Rect { t_lo: cut, ..whole };
        let w = |r: Rect| winding_detail(&f, &ContourSpec::rectangle(r).unwrap(), ArgOptions::default());
        match (w(lower), w(upper)) {
            (Ok(a), Ok(b)) => {
                let all = w(whole).unwrap();
                prop_assert_eq!(all.winding, roots.len() as i64);
                prop_assert!((all.raw - all.winding as f64).abs() < 0.02);
                prop_assert!((a.raw - a.winding as f64).abs() < 0.02);
                prop_assert_eq!(a.winding + b.winding, all.winding);
                let below = roots.iter().filter(|r| r.1 < cut).count() as i64;
                prop_assert_eq!(a.winding, below);
            }
            // a root sitting on the cut
            (Err(Error::ZeroOnPath(_)), _) | (_, Err(Error::ZeroOnPath(_))) => {}
            (Err(e), _) | (_, Err(e)) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn isolation_partitions_the_box(roots in roots_strategy(6)) {
        let f = poly(&roots);
        let bx = Rect::new(-2.5, 2.5, -2.5, 2.5).unwrap();
        let iso = isolate_zeros_with(&f, bx, 1e-4, ArgOptions::default()).unwrap();
        prop_assert_eq!(iso.total, roots.len() as i64);
        prop_assert_eq!(iso.accounted(), iso.total);
        for r in &iso.isolated {
            let inside = roots.iter().filter(|z| r.contains(Complex64::new(z.0, z.1))).count();
            prop_assert_eq!(inside, 1);
        }
    }

    #[test]
    fn arg_trace_contract(a in -3.0..3.0f64, b in -3.0..3.0f64, len in 0.1..20.0f64, dir in 0.0..TAU) {
        let f = Plain(|z: Complex64| z.exp() * (z * z + 1.0));
        let start = Complex64::new(a, b);
        let seg = PathSegment::straight(start, start + Complex64::from_polar(len, dir)).unwrap();
        if let Ok(tr) = arg_variation(&f, &seg, 1e-10) {
            prop_assert!(tr.phases.windows(2).all(|w| (w[1] - w[0]).abs() < FRAC_PI_2));
            prop_assert_eq!(tr.total_variation, tr.phases.last().unwrap() - tr.phases[0]);
            prop_assert_eq!(tr.nodes.len(), tr.phases.len());
        }
    }

    #[test]
    fn chi_reflection_and_eta_branch(sigma in -20.0..20.0f64, t in 1.0..1000.0f64, neg in any::<bool>()) {
        let s = Complex64::new(sigma, if neg { -t } else { t });
        let prod = chi_c(s).unwrap() * chi_c(1.0 - s).unwrap();
        prop_assert!((prod - 1.0).norm() <= 1e-10);
        let e = eta_c(s).unwrap().value;
        prop_assert!(e.re + e.im > 0.0);
        let target = (s - 1.0) / Complex64::new(0.0, TAU);
        prop_assert!((e * e - target).norm() <= 1e-13 * target.norm());
        let gauss = (Complex64::new(0.0, -std::f64::consts::PI) * e * e).im;
        prop_assert!((gauss + s.im / 2.0).abs() <= 1e-12 * (s.im.abs() / 2.0));
    }

    #[test]
    fn residual_is_count_minus_main(t in 11.0..80.0f64) {
        let r = count_zeros(10.0, t, -6.0, 1e-3).unwrap();
        prop_assert!((r.residual - (r.count as f64 - r.main_value)).abs() < 1e-12);
        prop_assert!((r.smooth_part() - r.sqrt_term - r.main_value).abs() < 1e-12);
    }
}
