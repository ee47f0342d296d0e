mod common;

use approx::assert_abs_diff_eq;
use common::{simpson, valid_params};
use persuasion::model::Party;
use persuasion::{Error, Params, Quality};
use proptest::prelude::*;

fn p0() -> Params {
    Params::baseline()
}

// value at t of experimenting until s, from the breakthrough density
fn value_by_integration(p: &Params, y: f64, z: f64, r: f64, t: f64, s: f64) -> f64 {
    let pt = p.feasible_belief(t);
    let l = p.lambda;
    let hit = simpson(|u| pt * l * (-(l + r) * (u - t)).exp() * y, t, s, 2000);
    let survive = (1.0 - pt + pt * (-l * (s - t)).exp()) * (-r * (s - t)).exp();
    hit + survive * z - z
}

#[test]
fn baseline_reference_values() {
    let p = p0();
    assert_abs_diff_eq!(p.feasible_belief(2f64.ln()), 1.0 / 3.0, epsilon = 1e-14);
    assert_abs_diff_eq!(p.agent_value(Quality::High, 1.0), 0.528576, epsilon = 1e-6);
    assert_abs_diff_eq!(p.agent_value(Quality::Low, 1.0), -0.229526, epsilon = 1e-6);
    assert_abs_diff_eq!(p.principal_value(1.0), 1.225335, epsilon = 1e-6);
    assert_abs_diff_eq!(p.stop_time(1.0), 19f64.ln(), epsilon = 1e-12);
    assert_abs_diff_eq!(p.stop_time(0.5), 6.5f64.ln(), epsilon = 1e-12);
    assert_abs_diff_eq!(p.peak_time(), 9f64.ln(), epsilon = 1e-12);
    assert_eq!(p.stop_time(0.0), 0.0);
    assert_abs_diff_eq!(p.agent_slope(Quality::Low, 0.0), -0.35, epsilon = 1e-14);
    assert_abs_diff_eq!(p.agent_slope(Quality::High, 0.0), 0.9, epsilon = 1e-14);
    assert_abs_diff_eq!(p.alignment_belief().unwrap(), 0.6, epsilon = 1e-10);
    assert_abs_diff_eq!(p.arrow_pratt(Party::Principal, 0.0).unwrap(), 1.225, epsilon = 1e-12);
    assert_abs_diff_eq!(p.arrow_pratt(Party::AgentLow, 0.0).unwrap(), 0.335 / 0.35, epsilon = 1e-12);
    assert_eq!(p.principal_value(0.0), p.big_z);
    assert_eq!(p.agent_value(Quality::High, 0.0), 0.0);
}

#[test]
fn values_match_direct_integration() {
    let p = p0();
    for &(t, s) in &[(0.0, 1.0), (0.3, 2.5), (1.0, 1.7), (2.0, 4.0)] {
        let a = value_by_integration(&p, p.y_h, p.z, p.r_a, t, s);
        assert_abs_diff_eq!(p.agent_value_between(Quality::High, t, s), a, epsilon = 1e-11);
        let b = value_by_integration(&p, p.big_y, p.big_z, p.r_p, t, s) + p.big_z;
        assert_abs_diff_eq!(p.principal_value_between(t, s), b, epsilon = 1e-11);
    }
}

#[test]
fn threshold_and_dissuasion_ratio() {
    let p = p0();
    assert_abs_diff_eq!(p.threshold_belief(0.0).unwrap(), 0.35 / 1.25, epsilon = 1e-14);
    // threshold at tau(mu) is mu
    for mu in [0.3, 0.5, 0.7, 0.9] {
        assert_abs_diff_eq!(p.threshold_belief(p.stop_time(mu)).unwrap(), mu, epsilon = 1e-12);
    }
    assert!(matches!(p.threshold_belief(3.0), Err(Error::Domain(_))));
    let t = 1.5;
    let nu = p.threshold_belief(t).unwrap();
    let phi = p.dissuasion_ratio(t);
    assert_abs_diff_eq!(phi, p.mu0 / (1.0 - p.mu0) * (1.0 - nu) / nu, epsilon = 1e-12);
}

#[test]
fn rejects_bad_parameters() {
    let mut p = p0();
    p.mu0 = 1.2;
    assert!(matches!(p.validate(), Err(Error::InvalidParams(_))));
    let mut p = p0();
    p.big_y = 0.4;
    assert!(matches!(p.validate(), Err(Error::AssumptionViolated(_))));
    let mut p = p0();
    p.lambda = f64::NAN;
    assert!(p.validate().is_err());
    assert!(p0().validate().is_ok());
}

#[test]
fn literal_rate_gap_breaks_the_ordering() {
    for r in [0.01, 0.05, 0.1] {
        let mut p = p0();
        p.r_p = r;
        p.r_a = 10.0 * r;
        assert!(!p.assumption_holds());
    }
}

#[test]
fn generic_over_f32() {
    let p: persuasion::ModelParams<f32> = persuasion::ModelParams {
        p0: 0.5,
        lambda: 1.0,
        r_p: 0.1,
        r_a: 0.1,
        y_l: 0.5,
        y_h: 3.0,
        z: 1.0,
        big_y: 2.0,
        big_z: 1.0,
        mu0: 0.5,
    };
    assert!((p.peak_time() - 9f32.ln()).abs() < 1e-5);
    assert!((p.alignment_belief().unwrap() - 0.6).abs() < 1e-5);
}

#[test]
fn indifference_cdf_boundaries() {
    let p = p0().with_prior(0.4);
    let t0 = p.stop_time(0.4);
    assert_abs_diff_eq!(p.indifference_cdf(0.4, t0), 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(p.indifference_cdf(0.4, p.stop_time(1.0)), 1.0, epsilon = 1e-12);
    for t in [0.5, 1.0, 2.0] {
        let h = 1e-6;
        let fd = (p.indifference_cdf(0.4, t + h) - p.indifference_cdf(0.4, t - h)) / (2.0 * h);
        assert_abs_diff_eq!(p.indifference_density(0.4, t), fd, epsilon = 1e-7);
    }
}

proptest! {
    #![proptest_config(common::config(64))]

    #[test]
    fn decomposition_identity(p in valid_params(), a in 0.0..5.0f64, b in 0.0..5.0f64, c in 0.0..5.0f64) {
        let mut v = [a, b, c];
        v.sort_by(f64::total_cmp);
        let [t1, s, t2] = v;
        for q in [Quality::High, Quality::Low] {
            let lhs = p.agent_value_between(q, t1, t2);
            let rhs = p.agent_value_between(q, t1, s) + p.gamma(t1, s) * p.agent_value_between(q, s, t2);
            prop_assert!((lhs - rhs).abs() < 1e-10);
        }
    }

    #[test]
    fn value_rebases_through_gamma(p in valid_params(), t in 0.0..4.0f64, d in 0.0..3.0f64) {
        let s = t + d;
        let lhs = p.agent_value_between(Quality::Low, t, s);
        let rhs = (p.agent_value(Quality::Low, s) - p.agent_value(Quality::Low, t)) / p.gamma(0.0, t);
        prop_assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn feasibility_belief_decreases(p in valid_params(), t in 0.0..10.0f64) {
        let pt = p.feasible_belief(t);
        prop_assert!(pt > 0.0 && pt <= p.p0);
        prop_assert!(p.feasible_belief(t + 0.1) < pt);
    }

    #[test]
    fn slopes_match_finite_differences(p in valid_params(), t in 0.05..5.0f64) {
        let h = 1e-6;
        for q in [Quality::High, Quality::Low] {
            let fd = (p.agent_value(q, t + h) - p.agent_value(q, t - h)) / (2.0 * h);
            prop_assert!((p.agent_slope(q, t) - fd).abs() < 1e-7);
        }
        let fd = (p.principal_value(t + h) - p.principal_value(t - h)) / (2.0 * h);
        prop_assert!((p.principal_slope(t) - fd).abs() < 1e-7);
    }

    #[test]
    fn stop_times_are_slope_roots(p in valid_params(), mu in 0.0..1.0f64) {
        let t = p.stop_time(mu);
        let y = p.mean_payoff(mu);
        if t > 0.0 {
            prop_assert!(p.agent_slope_y(y, t).abs() < 1e-10);
        } else {
            prop_assert!(p.agent_slope_y(y, 0.0) <= 1e-12);
        }
        let ts = p.peak_time();
        prop_assert!(p.principal_slope(ts).abs() < 1e-10);
        prop_assert!(p.stop_time(0.0) < ts && ts < p.stop_time(1.0));
    }

    #[test]
    fn alignment_belief_aligns(p in valid_params()) {
        let m = p.alignment_belief().unwrap();
        prop_assert!((p.stop_time(m) - p.peak_time()).abs() < 1e-9);
        prop_assert_eq!(p.prefers_longer(m + 1e-6), true);
        prop_assert_eq!(p.prefers_longer(m - 1e-6), false);
    }

    #[test]
    fn ordering_is_the_ratio_condition(
        p0 in 0.1..0.9f64, lambda in 0.2..3.0f64, r in 0.01..0.5f64,
        yl in 0.1..5.0f64, yh in 0.1..5.0f64, big_y in 0.1..5.0f64, big_z in 0.2..3.0f64, z in 0.2..3.0f64,
    ) {
        let p = Params { p0, lambda, r_p: r, r_a: r, y_l: yl, y_h: yh, z, big_y, big_z, mu0: 0.5 };
        let ratio = yl / z < big_y / big_z && big_y / big_z < yh / z;
        prop_assert_eq!(p.assumption_holds(), ratio);
    }

    #[test]
    fn arrow_pratt_matches_curvature(p in valid_params(), t in 0.0..4.0f64) {
        let h = 1e-4;
        let ts = p.peak_time();
        prop_assume!((t - ts).abs() > 0.05);
        let d1 = p.principal_slope(t);
        let d2 = (p.principal_slope(t + h) - p.principal_slope(t - h)) / (2.0 * h);
        let r = p.arrow_pratt(Party::Principal, t).unwrap();
        prop_assert!((r - (-d2 / d1)).abs() < 1e-5 * (1.0 + r.abs()));
        // one-sided bounds on the principal's and the low type's coefficients
        if t < ts {
            prop_assert!(r > p.lambda + p.r_p);
        }
        if t > p.stop_time(0.0) && p.lambda * p.y_l < (p.lambda + p.r_a) * p.z {
            let rl = p.arrow_pratt(Party::AgentLow, t).unwrap();
            prop_assert!(rl > p.r_a && rl < p.lambda + p.r_a);
        }
    }

    #[test]
    fn no_info_value_is_the_best_fixed_stop(p in valid_params(), mu in 0.0..1.0f64, t in 0.0..3.0f64) {
        let best = p.no_info_value(t, mu);
        for k in 0..50 {
            let s = t + 0.1 * k as f64;
            let v = mu * p.agent_value_between(Quality::High, t, s) + (1.0 - mu) * p.agent_value_between(Quality::Low, t, s);
            prop_assert!(v <= best + 1e-12);
        }
    }
}
