use airyproc_core::airy1::FddQuery;
use airyproc_core::airy2::{fdd_extended_airy2, fdd_grouped_airy2, marginal_cdf_gue, GROUPED_MAX_POINTS};
use airyproc_core::{Error, GridParams};

fn q(t: &[f64], x: &[f64]) -> FddQuery {
    FddQuery::new(t.to_vec(), x.to_vec()).unwrap()
}

#[test]
fn gue_marginal_tails() {
    let p = GridParams::default();
    assert!((marginal_cdf_gue(8.0, &p).unwrap().value - 1.0).abs() < 1e-8);
    let lo = marginal_cdf_gue(-8.0, &p).unwrap().value;
    assert!(lo.abs() < 1e-4);
    // F_GUE(−M) ≤ c e^{−M³/12}
    assert!(lo <= (-512.0f64 / 12.0).exp() * 1e4);
    assert!(marginal_cdf_gue(f64::NAN, &p).is_err());
}

#[test]
fn one_point_reductions() {
    let p = GridParams::default();
    for x in [-2.5, -1.0, 0.0, 1.3] {
        let f = marginal_cdf_gue(x, &p).unwrap().value;
        let e = fdd_extended_airy2(&q(&[0.7], &[x]), &p).unwrap().value;
        let g = fdd_grouped_airy2(&q(&[0.7], &[x]), &p).unwrap().value;
        assert!((e - f).abs() < 1e-8 && (g - f).abs() < 1e-8);
    }
}

#[test]
fn grouped_and_extended_agree() {
    let p = GridParams::default().without_error();
    for (t, x) in [(vec![0.0, 1.0], vec![0.0, 0.0]), (vec![0.0, 0.3], vec![-1.0, 0.5]), (vec![-0.5, 1.5, 2.0], vec![0.5, -0.5, 1.0])] {
        let a = fdd_extended_airy2(&q(&t, &x), &p).unwrap().value;
        let b = fdd_grouped_airy2(&q(&t, &x), &p).unwrap().value;
        assert!((a - b).abs() < 1e-6, "{t:?} {x:?}: {a} {b}");
    }
}

#[test]
fn stationary_in_time() {
    let p = GridParams::default().without_error();
    let base = q(&[0.0, 0.6], &[-0.3, 0.4]);
    let a = fdd_extended_airy2(&base, &p).unwrap().value;
    let b = fdd_extended_airy2(&base.shifted(0.7), &p).unwrap().value;
    assert!((a - b).abs() < 1e-8);
}

#[test]
fn infinite_level_drops_out() {
    let p = GridParams::default();
    let f = marginal_cdf_gue(0.2, &p).unwrap().value;
    let g = fdd_grouped_airy2(&q(&[0.0, 1.0], &[0.2, f64::INFINITY]), &p).unwrap().value;
    let e = fdd_extended_airy2(&q(&[0.0, 1.0], &[0.2, f64::INFINITY]), &p).unwrap().value;
    assert!((g - f).abs() < 1e-10 && (e - f).abs() < 1e-10);
}

#[test]
fn grouped_form_has_a_cost_guard() {
    let n = GROUPED_MAX_POINTS + 1;
    let t: Vec<f64> = (0..n).map(|i| i as f64).collect();
    let r = fdd_grouped_airy2(&q(&t, &vec![0.0; n]), &GridParams::default());
    assert!(matches!(r, Err(Error::CostGuard(_))));
}
