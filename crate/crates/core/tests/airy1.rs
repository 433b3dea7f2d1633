use airyproc_core::airy1::*;
use airyproc_core::{Error, GridParams};
use proptest::prelude::*;

fn q(t: &[f64], x: &[f64]) -> FddQuery {
    FddQuery::new(t.to_vec(), x.to_vec()).unwrap()
}

fn fast() -> GridParams {
    GridParams::default().without_error()
}

#[test]
fn one_point_law() {
    let p = GridParams::default();
    // F_GOE(0), published to 15 digits
    let f0 = marginal_cdf(0.0, &p).unwrap();
    assert!((f0.value - 0.831908066202944).abs() < 1e-12);
    assert!(f0.error_est < 1e-12);
    assert!((marginal_cdf(8.0, &p).unwrap().value - 1.0).abs() < 1e-6);
    assert!(marginal_cdf(-8.0, &p).unwrap().value.abs() < 1e-4);
    assert!(matches!(marginal_cdf(f64::INFINITY, &p), Err(Error::Domain(_))));
}

#[test]
fn density_matches_difference_quotient() {
    let p = fast();
    let h = 1e-4;
    for x in [-1.0, -0.3, 0.5] {
        let fd = (marginal_cdf(x + h, &p).unwrap().value - marginal_cdf(x - h, &p).unwrap().value) / (2.0 * h);
        assert!((marginal_density(x, &p).unwrap() - fd).abs() < 1e-5, "x = {x}");
    }
}

#[test]
fn one_time_queries_reduce_to_the_marginal() {
    let p = fast();
    for x in [-1.2, 0.0, 0.9] {
        let f = marginal_cdf(x, &p).unwrap().value;
        assert!((fdd_path_integral(&q(&[0.4], &[x]), &p).unwrap().value - f).abs() < 1e-12);
        assert!((fdd_extended(&q(&[0.4], &[x]), &p).unwrap().value - f).abs() < 1e-8);
    }
}

#[test]
fn the_two_formulas_agree() {
    let p = fast();
    for (t, x) in [
        (vec![0.0, 1.0], vec![0.0, 0.0]),
        (vec![0.0, 0.1], vec![-0.5, 1.0]),
        (vec![-1.0, 0.5, 2.0], vec![0.3, -0.4, 0.8]),
    ] {
        let a = fdd_path_integral(&q(&t, &x), &p).unwrap().value;
        let b = fdd_extended(&q(&t, &x), &p).unwrap().value;
        assert!((a - b).abs() < 1e-6, "{t:?}: {a} vs {b}");
    }
}

#[test]
fn stationarity_and_reflection() {
    let p = fast();
    let base = q(&[0.0, 0.4, 1.1], &[-0.2, 0.6, 0.1]);
    let v = fdd_path_integral(&base, &p).unwrap().value;
    assert!((fdd_path_integral(&base.shifted(0.7), &p).unwrap().value - v).abs() < 1e-8);
    let r = fdd_extended(&base.reflected(), &p).unwrap().value;
    assert!((fdd_extended(&base, &p).unwrap().value - r).abs() < 1e-8);
}

#[test]
fn far_apart_times_decorrelate() {
    let p = fast();
    let f = marginal_cdf(0.0, &p).unwrap().value;
    let v = fdd_extended(&q(&[0.0, 50.0], &[0.0, 0.0]), &p).unwrap().value;
    assert!((v - f * f).abs() < 2e-3);
    // the path formula would need an enormous cutoff here
    assert!(matches!(fdd_path_integral(&q(&[0.0, 50.0], &[0.0, 0.0]), &p), Err(Error::CostGuard(_))));
}

#[test]
fn query_validation() {
    assert!(matches!(FddQuery::new(vec![1.0, 0.0], vec![0.0, 0.0]), Err(Error::UnorderedTimes)));
    assert!(matches!(FddQuery::new(vec![0.0, 0.0], vec![0.0, 0.0]), Err(Error::UnorderedTimes)));
    assert!(FddQuery::new(vec![], vec![]).is_err());
    assert!(FddQuery::new(vec![0.0], vec![f64::NAN]).is_err());
    assert!(FddQuery::new(vec![0.0], vec![1.0, 2.0]).is_err());
}

#[test]
fn barrier_validation() {
    assert!(matches!(Barrier::new(vec![(0.0, 1.0)]), Err(Error::InvalidBarrier(_))));
    assert!(Barrier::new(vec![(0.0, 1.0), (0.0, 2.0)]).is_err());
    assert!(Barrier::new(vec![(0.0, 1.0), (1.0, f64::NAN)]).is_err());
    let b = Barrier::new(vec![(-1.0, 0.0), (0.0, 2.0), (2.0, 1.0)]).unwrap();
    assert_eq!(b.eval(-0.5), 1.0);
    assert_eq!(b.eval(1.0), 1.5);
    assert_eq!(b.segments().len(), 2);
}

#[test]
fn hitting_probabilities() {
    let p = fast();
    let high = hitting_continuum(&Barrier::constant(-0.5, 0.5, 8.0).unwrap(), &p).unwrap().value;
    assert!(high >= 0.999);
    // short intervals: the gap to the marginal closes like √δ, with the
    // constant of a Brownian maximum, density · √(8/π)
    let f = marginal_cdf(0.5, &p).unwrap().value;
    let c = marginal_density(0.5, &p).unwrap() * (8.0 / std::f64::consts::PI).sqrt();
    for d in [1e-4, 1e-6] {
        let v = hitting_continuum(&Barrier::constant(-d, d, 0.5).unwrap(), &p).unwrap().value;
        assert!(v < f);
        assert!(((f - v) / d.sqrt() / c - 1.0).abs() < 0.02, "delta {d}");
    }
    // a sloped barrier sits between the constant barriers at its ends
    let slope = hitting_continuum(&Barrier::new(vec![(0.0, 1.0), (1.0, 2.0)]).unwrap(), &p).unwrap().value;
    let lo = hitting_continuum(&Barrier::constant(0.0, 1.0, 1.0).unwrap(), &p).unwrap().value;
    let hi = hitting_continuum(&Barrier::constant(0.0, 1.0, 2.0).unwrap(), &p).unwrap().value;
    assert!(lo < slope && slope < hi);
}

#[test]
fn chain_values_decrease_towards_the_continuum() {
    let p = fast();
    let b = Barrier::constant(0.0, 1.0, 1.0).unwrap();
    let two = hitting_discrete_chain(&b, 2, &p).unwrap().value;
    let direct = fdd_path_integral(&q(&[0.0, 1.0], &[1.0, 1.0]), &p).unwrap().value;
    assert!((two - direct).abs() < 1e-14);
    let cont = hitting_continuum(&b, &p).unwrap().value;
    let mut prev = two;
    for n in [4, 8, 16, 32] {
        let v = hitting_discrete_chain(&b, n, &p).unwrap().value;
        assert!(v <= prev + 1e-12 && v > cont);
        prev = v;
    }
    assert!(hitting_discrete_chain(&b, 1, &p).is_err());
}

#[test]
fn conditional_law() {
    let p = fast();
    let sure = conditional_fdd(0.0, &[0.5, 1.0], &[8.0, 8.0], &p).unwrap();
    assert!((sure - 1.0).abs() < 1e-3);
    let half = conditional_fdd(0.0, &[0.01], &[0.0], &p).unwrap();
    assert!((half - 0.5).abs() < 0.05);
    let ys = [-1.0, 0.0, 1.0];
    let mut last = 0.0;
    for y in ys {
        let v = conditional_fdd(-0.5, &[0.2, 0.3, 0.6], &[y, 0.5, 0.5], &p).unwrap();
        assert!((0.0..=1.0).contains(&v) && v >= last);
        last = v;
    }
    assert!(conditional_fdd(0.0, &[0.0], &[0.0], &p).is_err());
    assert!(matches!(conditional_fdd(-4.0, &[0.5], &[0.0], &p), Err(Error::DegenerateConditioning { .. })));
    assert!(matches!(conditional_fdd(-12.0, &[0.5], &[0.0], &p), Err(Error::Singular { .. })));
}

#[test]
fn conditional_law_is_a_normalized_derivative() {
    // ∂ₐ P(A(0) ≤ a, A(t) ≤ b) / density(a)
    let p = fast();
    let (x, t, y, h) = (-0.4, 0.3, 0.2, 1e-4);
    let joint = |a: f64| fdd_path_integral(&q(&[0.0, t], &[a, x + y]), &p).unwrap().value;
    let fd = (joint(x + h) - joint(x - h)) / (2.0 * h) / marginal_density(x, &p).unwrap();
    assert!((conditional_fdd(x, &[t], &[y], &p).unwrap() - fd).abs() < 1e-5);
}

#[test]
fn conditional_probabilities_on_a_panel() {
    let p = fast();
    for x in [-1.0, 0.0, 1.0] {
        for t in [0.1, 1.0] {
            for y in [-2.0, 0.0, 2.0] {
                let v = conditional_fdd(x, &[t], &[y], &p).unwrap();
                assert!((-1e-9..=1.0 + 1e-9).contains(&v), "({x}, {t}, {y}) -> {v}");
            }
        }
    }
}

#[test]
fn increments() {
    let p = fast();
    let m = increment_moments(0.02, &p).unwrap();
    assert!(m.second > 0.0 && m.fourth > 0.0);
    assert!((m.fourth / (m.second * m.second) / 3.0 - 1.0).abs() < 0.15);
    assert_eq!(m.order(2).unwrap(), m.second);
    assert!(m.order(3).is_err());
    let fwd = increment_moment_between(0.0, 0.1, 2, &p).unwrap();
    let back = increment_moment_between(-0.1, 0.0, 2, &p).unwrap();
    assert!((fwd - back).abs() < 1e-8);
    assert!(increment_moment(0.0, 2, &p).is_err());
}

#[test]
fn local_diagnostics() {
    let p = fast();
    let sure = local_scaling_diagnostics(0.0, 1.0, 8.0, 0.05, &p).unwrap();
    assert!((sure.h_val - 1.0).abs() < 1e-3);
    let d: Vec<ScalingDiagnostics> = [0.2, 0.1, 0.05]
        .iter()
        .map(|&e| local_scaling_diagnostics(0.0, 1.0, 0.5, e, &p).unwrap())
        .collect();
    for w in d.windows(2) {
        assert!((w[1].g_val - 1.0).abs() < (w[0].g_val - 1.0).abs());
        assert!((w[1].h_val - 1.0).abs() < (w[0].h_val - 1.0).abs());
    }
    assert!(local_scaling_diagnostics(0.0, 1.0, 0.0, 0.0, &p).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn marginal_is_a_monotone_cdf(x in -4.0f64..4.0, dx in 0.01f64..1.0) {
        let p = fast();
        let a = marginal_cdf(x, &p).unwrap().value;
        let b = marginal_cdf(x + dx, &p).unwrap().value;
        prop_assert!((0.0..=1.0).contains(&a) && a < b);
    }

    #[test]
    fn joint_cdf_obeys_frechet_bounds(x1 in -2.0f64..2.0, x2 in -2.0f64..2.0, t in 0.05f64..2.0) {
        let p = fast();
        let j = fdd_path_integral(&q(&[0.0, t], &[x1, x2]), &p).unwrap().value;
        let f1 = marginal_cdf(x1, &p).unwrap().value;
        let f2 = marginal_cdf(x2, &p).unwrap().value;
        prop_assert!(j <= f1.min(f2) + 1e-10);
        prop_assert!(j >= f1 + f2 - 1.0 - 1e-10);
    }
}
