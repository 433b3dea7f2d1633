use airyproc_core::quadrature::{composite, default_grid, gauss_legendre, GridPlan};
use airyproc_core::{Error, GridParams};
use proptest::prelude::*;

#[test]
fn two_point_rule() {
    let g = gauss_legendre(2, -1.0, 1.0).unwrap();
    let r = 1.0 / 3f64.sqrt();
    assert!((g.nodes[0] + r).abs() < 1e-15 && (g.nodes[1] - r).abs() < 1e-15);
    assert!((g.weights[0] - 1.0).abs() < 1e-15 && (g.weights[1] - 1.0).abs() < 1e-15);
}

#[test]
fn constants_and_exponentials() {
    for m in 2..30 {
        let g = gauss_legendre(m, 0.0, 2.0).unwrap();
        assert!((g.integrate(|_| 1.0) - 2.0).abs() < 1e-14);
    }
    let g = gauss_legendre(40, 0.0, 10.0).unwrap();
    let want = 1.0 - (-10f64).exp();
    assert!((g.integrate(|x| (-x).exp()) - want).abs() < 1e-12);
}

#[test]
fn default_grid_rules() {
    let g = default_grid(1.0, 0.0);
    assert_eq!(g.m(), 120);
    assert_eq!((g.lo, g.hi), (-10.0, 10.0));
    assert_eq!(default_grid(1.0, -5.0).lo, -15.0);
}

#[test]
fn composite_is_exact_on_polynomials() {
    let g = composite(&[-3.0, -1.0, 0.5, 4.0], 6).unwrap();
    assert_eq!(g.m(), 18);
    // ∫ x⁵ − 2x² over [−3, 4]
    let want = (4f64.powi(6) - 3f64.powi(6)) / 6.0 - 2.0 * (64.0 + 27.0) / 3.0;
    assert!((g.integrate(|x| x.powi(5) - 2.0 * x * x) - want).abs() < 1e-10);
    let r = g.restrict(-1.0, 0.5);
    assert_eq!(r.m(), 6);
    assert!((r.integrate(|_| 1.0) - 1.5).abs() < 1e-14);
}

#[test]
fn rejects_bad_rules() {
    assert!(matches!(gauss_legendre(1, 0.0, 1.0), Err(Error::InvalidArgument(_))));
    assert!(gauss_legendre(4, 1.0, 1.0).is_err());
    assert!(gauss_legendre(4, 0.0, f64::INFINITY).is_err());
    assert!(composite(&[0.0], 4).is_err());
    assert!(composite(&[0.0, 1.0, 1.0], 4).is_err());
    assert!(GridParams::with_m(8).validate().is_err());
    assert!(GridParams { pad: 0.0, ..GridParams::default() }.validate().is_err());
}

proptest! {
    #[test]
    fn nodes_sorted_inside_and_weights_positive(m in 2usize..80, lo in -50.0f64..50.0, len in 1e-3f64..100.0) {
        let g = gauss_legendre(m, lo, lo + len).unwrap();
        prop_assert_eq!(g.m(), m);
        prop_assert!(g.nodes.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(g.nodes.iter().all(|&x| x > lo && x < lo + len));
        prop_assert!(g.weights.iter().all(|&w| w > 0.0));
        let total: f64 = g.weights.iter().sum();
        prop_assert!((total - len).abs() < 1e-12 * len.max(1.0));
    }

    #[test]
    fn plans_cover_their_interval(lo in -30.0f64..0.0, len in 1.0f64..40.0, base in 0.3f64..3.0, a in 0.0f64..1.0) {
        let hi = lo + len;
        let plan = GridPlan::new(lo, hi, base).anchor(lo + a * len).refine(lo + a * len, 0.2);
        let e = plan.edges();
        prop_assert_eq!(e[0], lo);
        prop_assert_eq!(*e.last().unwrap(), hi);
        prop_assert!(e.windows(2).all(|w| w[0] < w[1]));
        let g = plan.build(8).unwrap();
        prop_assert!((g.integrate(|_| 1.0) - len).abs() < 1e-11 * len);
    }
}
