use std::f64::consts::TAU;

use rzero::counting::{main_term, residual_table, top_edge_certificate};
use rzero::report::fit_sqrt_coefficient;

#[test]
fn residual_is_defining_arithmetic() {
    let rows = residual_table(&[50.0, 120.0, 333.0], -6.0).unwrap();
    for r in &rows {
        assert!((r.residual - (r.count as f64 - r.main_value)).abs() < 1e-12);
        assert!((r.r_with_sqrt_added() - r.residual).abs() < 1e-9);
        assert!(r.certificates.iter().all(|c| c.holds));
    }
}

#[test]
fn sqrt_term_singleton() {
    for k in [2u32, 5, 9] {
        let t = TAU * (k * k) as f64;
        assert_eq!(main_term(t).unwrap().1, k as f64 / 2.0);
    }
}

#[test]
fn sqrt_coefficient_over_first_thousand() {
    let ts: Vec<f64> = (1..=10).map(|k| 100.0 * k as f64).collect();
    let rows = residual_table(&ts, -6.0).unwrap();
    let c = fit_sqrt_coefficient(&rows);
    assert!((c + 0.5).abs() <= 0.05, "fitted coefficient {c}");
}

#[test]
fn top_edges_respect_backlund() {
    for t in [250.0, 600.0] {
        let cert = top_edge_certificate(t, -26.0).unwrap();
        assert!(cert.holds, "{cert:?}");
    }
}
