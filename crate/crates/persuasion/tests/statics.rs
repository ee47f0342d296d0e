mod common;

use approx::assert_abs_diff_eq;
use common::valid_params;
use persuasion::statics::*;
use persuasion::Params;
use proptest::prelude::*;

fn p0() -> Params {
    Params::baseline()
}

#[test]
fn baseline_thresholds() {
    let p = p0();
    let th = shape_thresholds(&p).unwrap();
    assert_abs_diff_eq!(th.mu_bar0, 0.28, epsilon = 1e-12);
    assert_abs_diff_eq!(th.mu_star, 0.6, epsilon = 1e-10);
    assert_abs_diff_eq!(th.mu2, 51.0 / 55.0, epsilon = 1e-6);
    assert!(!th.degenerate);
    let b = concavify_bounds(&p).unwrap();
    assert_abs_diff_eq!(b.mu_l, 0.366277, epsilon = 1e-6);
    assert_abs_diff_eq!(b.mu_h, 0.894884, epsilon = 1e-6);
    assert!(!b.mu_h_is_one);
    assert!(th.mu_bar0 < b.mu_l && b.mu_l < th.mu_star && th.mu_star < b.mu_h && b.mu_h < th.mu2);
}

#[test]
fn no_info_value_endpoints() {
    let p = p0();
    assert_abs_diff_eq!(no_info_principal(&p, 0.0), p.big_z, epsilon = 1e-14);
    assert_abs_diff_eq!(no_info_principal(&p, 0.2), p.big_z, epsilon = 1e-14);
    assert_abs_diff_eq!(no_info_principal(&p, 0.6), p.principal_value(p.peak_time()), epsilon = 1e-10);
}

#[test]
fn slope_through_the_stopping_time() {
    let p = p0();
    for mu in [0.3, 0.45, 0.6, 0.8, 0.95] {
        let y = p.mean_payoff(mu);
        let dtau = p.lambda * (p.y_h - p.y_l) / (p.lambda * y - (p.lambda + p.r_a) * p.z);
        let chain = p.principal_slope(p.stop_time(mu)) * dtau;
        assert_abs_diff_eq!(no_info_principal_slope(&p, mu), chain, epsilon = 1e-12);
        let h = 1e-6;
        let fd = (no_info_principal(&p, mu + h) - no_info_principal(&p, mu - h)) / (2.0 * h);
        assert_abs_diff_eq!(no_info_principal_slope(&p, mu), fd, epsilon = 1e-7);
    }
    // rising before alignment, falling after
    assert!(no_info_principal_slope(&p, 0.5) > 0.0);
    assert!(no_info_principal_slope(&p, 0.7) < 0.0);
}

#[test]
fn tangency_conditions_hold() {
    let p = p0();
    let b = concavify_bounds(&p).unwrap();
    let w = |m| no_info_principal(&p, m);
    let chord_l = (w(b.mu_l) - w(0.0)) / b.mu_l;
    assert_abs_diff_eq!(chord_l, no_info_principal_slope(&p, b.mu_l), epsilon = 1e-9);
    let chord_h = (w(1.0) - w(b.mu_h)) / (1.0 - b.mu_h);
    assert_abs_diff_eq!(chord_h, no_info_principal_slope(&p, b.mu_h), epsilon = 1e-9);
}

#[test]
fn static_signal_beats_every_binary_split() {
    let p = p0();
    let n = 200;
    let grid: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
    for &mu0 in &[0.1, 0.3, 0.37, 0.5, 0.7, 0.9, 0.95] {
        let best = concavified_value(&p, mu0).unwrap();
        let mut brute = no_info_principal(&p, mu0);
        for &a in grid.iter().filter(|&&a| a <= mu0) {
            for &c in grid.iter().filter(|&&c| c >= mu0) {
                if c > a {
                    let wa = (c - mu0) / (c - a);
                    brute = brute.max(wa * no_info_principal(&p, a) + (1.0 - wa) * no_info_principal(&p, c));
                }
            }
        }
        assert!(brute <= best + 1e-12, "mu0 = {mu0}: {brute} > {best}");
        assert!(best - brute < 1e-4, "mu0 = {mu0}: grid search far below");
    }
}

#[test]
fn gain_vanishes_between_the_bounds() {
    let p = p0();
    let b = concavify_bounds(&p).unwrap();
    for i in 0..=20 {
        let m = b.mu_l + (b.mu_h - b.mu_l) * i as f64 / 20.0;
        assert_abs_diff_eq!(persuasion_gain(&p, m).unwrap(), 0.0, epsilon = 1e-14);
    }
    assert!(persuasion_gain(&p, 0.3).unwrap() > 1e-4);
    assert!(persuasion_gain(&p, 0.95).unwrap() > 0.0);
    assert!(persuasion_gain(&p, 1.2).is_err());
}

#[test]
fn signal_splits_the_prior() {
    let p = p0().with_prior(0.3);
    let s = optimal_static_signal(&p).unwrap();
    assert_eq!(s.posteriors.len(), 2);
    let mean: f64 = s.posteriors.iter().zip(&s.weights).map(|(a, b)| a * b).sum();
    assert_abs_diff_eq!(mean, 0.3, epsilon = 1e-14);
    assert_abs_diff_eq!(s.posteriors[0], 0.0);
    let csv = value_curve_csv(&p, 10).unwrap();
    assert_eq!(csv.lines().count(), 12);
}

#[test]
fn sampled_envelope_agrees_with_tangency() {
    let p = p0();
    let (xs, env) = sampled_envelope(&p, 2000);
    for (x, e) in xs.iter().zip(&env).step_by(50) {
        assert_abs_diff_eq!(*e, concavified_value(&p, *x).unwrap(), epsilon = 1e-6);
    }
}

proptest! {
    #![proptest_config(common::config(48))]

    #[test]
    fn concavified_value_is_a_concave_majorant(p in valid_params(), a in 0.0..1.0f64, b in 0.0..1.0f64) {
        let c = |m: f64| concavified_value(&p, m).unwrap();
        prop_assert!(c(a) >= no_info_principal(&p, a) - 1e-12);
        let mid = 0.5 * (a + b);
        prop_assert!(c(mid) >= 0.5 * (c(a) + c(b)) - 1e-9);
    }

    #[test]
    fn threshold_order(p in valid_params()) {
        let th = shape_thresholds(&p).unwrap();
        let b = concavify_bounds(&p).unwrap();
        prop_assert!(th.mu_bar0 <= b.mu_l + 1e-12);
        prop_assert!(b.mu_l <= th.mu_star + 1e-12);
        prop_assert!(th.mu_star <= b.mu_h + 1e-12);
    }
}
