use airyproc_core::specfun::{airy_ai, airy_ai_scaled, airy_value, gaussian_tail};
use airyproc_core::Error;
use proptest::prelude::*;
use std::f64::consts::PI;

// 30-digit values from an arbitrary-precision library.
const FROZEN: [(f64, f64); 12] = [
    (-10.0, 0.0402412384864431906894303140299),
    (-5.3, 0.182567931068339633442075243203),
    (-2.0, 0.227407428201685575991924436038),
    (-0.7, 0.511000397575010142968647322215),
    (0.0, 0.355028053887817239260063186004),
    (0.4, 0.254742354295676340844845742648),
    (1.0, 0.135292416312881415524147423515),
    (2.5, 0.0157259233804704899952660465408),
    (6.0, 9.94769436025288957023884766883e-6),
    (10.0, 1.1047532552898685933550205658e-10),
    (15.0, 2.16496252073799229898945403881e-18),
    (30.0, 3.20821759155049557107528693318e-49),
];

fn zeta(x: f64) -> f64 {
    2.0 / 3.0 * x * x.sqrt()
}

/// Maclaurin series `Ai(x) = c₁ f(x) − c₂ g(x)`, summed directly.
fn maclaurin(x: f64) -> f64 {
    let c1 = 0.355028053887817239260063186004;
    let c2 = 0.258819403792806798405183560189;
    let x3 = x * x * x;
    let (mut f, mut g) = (1.0, x);
    let (mut tf, mut tg) = (1.0, x);
    for k in 1..200 {
        let k = k as f64;
        tf *= x3 / ((3.0 * k - 1.0) * (3.0 * k));
        tg *= x3 / ((3.0 * k) * (3.0 * k + 1.0));
        f += tf;
        g += tg;
        if tf.abs() + tg.abs() < 1e-20 {
            break;
        }
    }
    c1 * f - c2 * g
}

#[test]
fn matches_frozen_high_precision_values() {
    for (x, v) in FROZEN {
        let a = airy_ai(x).unwrap();
        let rel = ((a - v) / v).abs();
        assert!(rel < 1e-12, "Ai({x}) = {a}, want {v}, rel {rel:e}");
    }
}

#[test]
fn value_at_zero_is_the_closed_form() {
    // 3^{−2/3} / Γ(2/3)
    let want = 3f64.powf(-2.0 / 3.0) / 1.354_117_939_426_400_4;
    assert!((airy_ai(0.0).unwrap() - want).abs() < 1e-15);
    assert_eq!(airy_ai_scaled(0.0).unwrap(), airy_ai(0.0).unwrap());
}

#[test]
fn scaled_value_survives_underflow() {
    assert_eq!(airy_ai(1000.0).unwrap(), 0.0);
    let s = airy_ai_scaled(100.0).unwrap();
    assert!((s - 0.0891969209363304131753866379986).abs() < 1e-15);
    let v = airy_value(100.0).unwrap();
    assert!(v.scaled);
    assert_eq!(v.value, s);
    assert!(!airy_value(-1.0).unwrap().scaled);
}

#[test]
fn scaled_and_plain_agree() {
    for i in 0..=300 {
        let x = i as f64 * 0.1;
        let a = airy_ai(x).unwrap();
        let b = airy_ai_scaled(x).unwrap() * (-zeta(x)).exp();
        assert!(((a - b) / a).abs() < 1e-12, "x = {x}");
    }
}

#[test]
fn satisfies_the_airy_equation() {
    let h = 1e-3;
    for x in [-2.0, 0.0, 2.0] {
        let f = |z: f64| airy_ai(z).unwrap();
        let d2 = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
        assert!((d2 - x * f(x)).abs() < 1e-6, "x = {x}");
    }
}

#[test]
fn decay_bound_for_x_at_least_one() {
    for i in 0..200 {
        let x = 1.0 + i as f64 * 0.25;
        assert!(airy_ai(x).unwrap().abs() <= (-zeta(x)).exp());
    }
}

#[test]
fn gaussian_tail_values() {
    assert!((gaussian_tail(0.0) - PI.sqrt()).abs() < 1e-15);
    assert!((gaussian_tail(f64::NEG_INFINITY) - 2.0 * PI.sqrt()).abs() < 1e-15);
    assert!(gaussian_tail(-40.0) <= 2.0 * PI.sqrt());
    for i in 0..100 {
        let x = 2.0 + 0.2 * i as f64;
        // Φ(x) ≤ (2/x) e^{−x²/4} ≤ e^{−x²/4} for x ≥ 2
        assert!(gaussian_tail(x) <= (-x * x / 4.0).exp());
    }
}

#[test]
fn rejects_bad_arguments() {
    assert!(matches!(airy_ai(f64::NAN), Err(Error::Domain(_))));
    assert!(matches!(airy_ai(f64::INFINITY), Err(Error::Domain(_))));
    assert!(matches!(airy_ai_scaled(-1.0), Err(Error::Domain(_))));
    assert!(matches!(airy_value(f64::NAN), Err(Error::Domain(_))));
}

proptest! {
    #[test]
    fn agrees_with_maclaurin_series(x in -3.0f64..3.0) {
        let a = airy_ai(x).unwrap();
        prop_assert!((a - maclaurin(x)).abs() < 1e-13);
    }

    #[test]
    fn ode_residual_by_differences(x in -8.0f64..8.0) {
        // Ai″ = x Ai, checked with a fourth-order stencil
        let h = 2e-3;
        let f = |z: f64| airy_ai(z).unwrap();
        let d2 = (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2.0 * h)) / (12.0 * h * h);
        prop_assert!((d2 - x * f(x)).abs() < 1e-7);
    }
}
