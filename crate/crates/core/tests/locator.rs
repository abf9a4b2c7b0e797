use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rzero::counting::{
    circle_winding, count_zeros, winding_number, ArgOptions, AuxiliaryR, Circle, ContourSpec, Rect,
};
use rzero::locator::{isolate_zeros, locate_zeros, refine_zero};

const I: Complex64 = Complex64::new(0.0, 1.0);

// Brute-force R(s) with crossing q: Dirichlet sum plus a dense, unscaled
// trapezoid over the line q + 1/2 + u e^{iπ/4}, u in [-16, 16].
fn brute_r(s: Complex64, q: u32) -> Complex64 {
    let omega = Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2);
    let c = q as f64 + 0.5;
    let h = 1.0 / 512.0;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in -8192..=8192 {
        let x = c + j as f64 * h * omega;
        let e = (I * PI * x).exp();
        acc += (-s * x.ln()).exp() * (I * PI * x * x).exp() / (e - 1.0 / e);
    }
    let d: Complex64 = (1..=q).map(|n| (-s * (n as f64).ln()).exp()).sum();
    d - omega * acc * h
}

#[test]
fn lowest_zero_regression() {
    let (zeros, clusters) = locate_zeros(Rect::new(-4.0, 2.0, 10.0, 60.0).unwrap(), 1e-3).unwrap();
    assert!(clusters.is_empty());
    let z = zeros[0];
    // Independent oracle: Newton on the brute-force evaluator with a
    // central-difference derivative, started from a coarse guess.
    let mut w = Complex64::new(-1.5, 22.5);
    for _ in 0..30 {
        let h = 1e-6;
        let d = (brute_r(w + h, 1) - brute_r(w - h, 1)) / (2.0 * h);
        let step = brute_r(w, 1) / d;
        w -= step;
        if step.norm() < 1e-14 {
            break;
        }
    }
    assert!((z.point() - w).norm() < 1e-9, "{} vs {w}", z.point());
    // frozen: -1.5728670009776071 + 22.422892389329773i
    assert!((z.beta + 1.572_867_000_977_607_1).abs() < 1e-12);
    assert!((z.gamma - 22.422_892_389_329_773).abs() < 1e-12);
}

#[test]
fn count_matches_enumeration() {
    let box_ = Rect::new(-4.0, 2.0, 10.0, 60.0).unwrap();
    let w = winding_number(&AuxiliaryR, &ContourSpec::rectangle(box_).unwrap(), 1e-10).unwrap();
    let iso = isolate_zeros(box_, 1e-3).unwrap();
    assert_eq!(w, iso.isolated.len() as i64);
    assert_eq!(iso.accounted(), iso.total);

    let c = count_zeros(10.0, 100.0, -6.0, 1e-3).unwrap();
    let (zeros, _) = locate_zeros(Rect::new(c.box_left, 2.0, 10.0, 100.0).unwrap(), 1e-3).unwrap();
    assert_eq!(zeros.len() as i64, c.count);

    let narrow = Rect::new(-2.0, 2.0, 10.0, 60.0).unwrap();
    let w = winding_number(&AuxiliaryR, &ContourSpec::rectangle(narrow).unwrap(), 1e-10).unwrap();
    assert_eq!(
        w,
        isolate_zeros(narrow, 1e-3).unwrap().isolated.len() as i64
    );
}

#[test]
fn zeros_are_certified_independently() {
    let (zeros, _) = locate_zeros(Rect::new(-6.0, 2.0, 10.0, 120.0).unwrap(), 1e-3).unwrap();
    assert!(!zeros.is_empty());
    for z in &zeros {
        assert_eq!(z.winding_certificate, 1);
        assert!(z.gamma > 0.0);
        assert!(z.residual_modulus <= 1e-8, "{z:?}");
        // a circle of a different radius than the refinement used
        let circle = Circle {
            centre: z.point(),
            radius: 3.0 * z.enclosure_radius,
        };
        assert_eq!(
            circle_winding(&AuxiliaryR, &circle, ArgOptions::default())
                .unwrap()
                .0,
            1
        );
    }
}

#[test]
fn location_is_deterministic() {
    let bx = Rect::new(-6.0, 2.0, 10.0, 90.0).unwrap();
    let a = locate_zeros(bx, 1e-3).unwrap().0;
    let b = locate_zeros(bx, 1e-3).unwrap().0;
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.beta.to_bits(), y.beta.to_bits());
        assert_eq!(x.gamma.to_bits(), y.gamma.to_bits());
        assert_eq!(x.enclosure_radius.to_bits(), y.enclosure_radius.to_bits());
    }
    assert!(a
        .windows(2)
        .all(|w| (w[0].gamma, w[0].beta) <= (w[1].gamma, w[1].beta)));
}

#[test]
fn refine_from_isolated_seed() {
    let iso = isolate_zeros(Rect::new(-4.0, 2.0, 10.0, 30.0).unwrap(), 1e-3).unwrap();
    assert_eq!(iso.isolated.len(), 1);
    let z = refine_zero(iso.isolated[0]).unwrap();
    assert!(iso.isolated[0].contains(z.point()));
}
