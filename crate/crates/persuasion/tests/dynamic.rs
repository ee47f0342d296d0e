mod common;

use approx::assert_abs_diff_eq;
use common::valid_params;
use persuasion::dynamic::*;
use persuasion::statics::{concavified_value, no_info_principal};
use persuasion::{Error, Params, Quality};
use proptest::prelude::*;

fn p0(mu0: f64) -> Params {
    Params::baseline().with_prior(mu0)
}

#[test]
fn regimes_across_the_prior() {
    let cases = [
        (0.30, Regime::FullBadNews, Some(1.2635309)),
        (0.32, Regime::Interior, None),
        (0.34, Regime::Interior, None),
        (0.45, Regime::BrakeOnly, Some(1.2735497)),
        (0.50, Regime::BrakeOnly, Some(1.2738760)),
        (0.55, Regime::BrakeOnly, Some(1.2739637)),
        (0.80, Regime::Static, Some(1.2706710)),
    ];
    for (mu0, regime, payoff) in cases {
        let s = solve_dynamic(&p0(mu0)).unwrap();
        assert_eq!(s.regime, regime, "mu0 = {mu0}");
        if let Some(v) = payoff {
            assert_abs_diff_eq!(s.payoff, v, epsilon = 1e-6);
        }
        assert!(s.report.as_ref().unwrap().holds(1e-8, 1e-9));
    }
}

#[test]
fn full_bad_news_at_low_prior() {
    let p = p0(0.3);
    let s = solve_dynamic(&p).unwrap();
    assert_eq!((s.x_a, s.x_b), (0.0, 1.0));
    assert_abs_diff_eq!(s.t_a, p.stop_time(1.0), epsilon = 1e-12);
    assert_abs_diff_eq!(s.t_b, 1.54337, epsilon = 1e-5);
    assert!(s.participation_slack.abs() < 1e-9);
}

#[test]
fn interior_shares_satisfy_both_conditions() {
    let p = p0(0.32);
    let s = solve_dynamic(&p).unwrap();
    assert_abs_diff_eq!(s.x_a, 0.1872, epsilon = 1e-3);
    assert_abs_diff_eq!(s.x_b, 0.9608, epsilon = 1e-3);
    // brake indifference, in the share form
    let xa = -(1.0 - p.mu0) / p.mu0 * p.agent_slope(Quality::Low, s.t_a) / p.agent_slope(Quality::High, s.t_a)
        * (1.0 - s.x_b);
    assert_abs_diff_eq!(s.x_a, xa, epsilon = 1e-10);
    assert!(brake_residual(&p, s.x_a, s.x_b, s.t_a).abs() < 1e-10);
    // participation binds
    let (_, agent) = evaluate(&p, s.x_a, s.x_b, s.t_a, s.t_b);
    assert_abs_diff_eq!(agent, p.reservation_value(), epsilon = 1e-10);
}

#[test]
fn interior_times_do_not_move_with_the_prior() {
    for mu0 in [0.32, 0.33, 0.34] {
        let (ta, tb) = interior_times(&p0(mu0)).unwrap();
        assert_abs_diff_eq!(ta, 2.4246095, epsilon = 1e-6);
        assert_abs_diff_eq!(tb, 1.6640907, epsilon = 1e-6);
    }
}

#[test]
fn regime_cutoffs() {
    let th = regime_thresholds(&p0(0.4)).unwrap();
    assert_abs_diff_eq!(th.mu_l, 0.3155505, epsilon = 1e-6);
    assert_abs_diff_eq!(th.mu_h, 0.3480688, epsilon = 1e-6);
    assert!(0.28 < th.mu_l && th.mu_l < th.mu_h && th.mu_h < 0.6);
    assert_eq!(solve_dynamic(&p0(th.mu_l - 1e-3)).unwrap().regime, Regime::FullBadNews);
    assert_eq!(solve_dynamic(&p0(th.mu_h + 1e-3)).unwrap().regime, Regime::BrakeOnly);
}

#[test]
fn brake_posterior_is_stationary() {
    let p = p0(0.5);
    let s = solve_dynamic(&p).unwrap();
    let mu_b = p.mu0 / (p.mu0 + (1.0 - p.mu0) * (1.0 - s.x_b));
    assert_abs_diff_eq!(s.t_a, p.stop_time(mu_b), epsilon = 1e-9);
    let v = |m| brake_only_value(&p, m).unwrap();
    for d in [1e-3, 1e-2] {
        assert!(v(mu_b) >= v(mu_b + d) - 1e-12);
        assert!(v(mu_b) >= v(mu_b - d) - 1e-12);
    }
}

#[test]
fn dynamic_dominates_static() {
    for mu0 in [0.3, 0.35, 0.45, 0.55, 0.7, 0.9] {
        let p = p0(mu0);
        let s = solve_dynamic(&p).unwrap();
        let stat = concavified_value(&p, mu0).unwrap();
        assert!(s.payoff >= stat - 1e-9, "mu0 = {mu0}");
        if mu0 >= 0.6 {
            assert_abs_diff_eq!(s.payoff, stat, epsilon = 1e-9);
        }
    }
}

#[test]
fn unequal_rates_are_refused() {
    let mut p = p0(0.4);
    p.r_a = 0.2;
    p.y_h = 5.0;
    assert!(matches!(solve_dynamic(&p), Err(Error::UnequalRates { .. })));
    assert!(matches!(regime_thresholds(&p), Err(Error::UnequalRates { .. })));
}

#[test]
fn sweep_is_ordered_and_continuous() {
    let p = p0(0.4);
    let priors: Vec<f64> = (0..=100).map(|i| 0.29 + 0.4 * i as f64 / 100.0).collect();
    let rows = comparative_sweep(&p, &priors);
    assert_eq!(rows.len(), priors.len());
    for (r, m) in rows.iter().zip(&priors) {
        assert_eq!(r.mu0, *m);
        assert!(r.error.is_none(), "{:?}", r.error);
        assert!(r.payoff >= r.no_info - 1e-10);
    }
    for w in rows.windows(2) {
        assert!((w[1].payoff - w[0].payoff).abs() < 5e-3);
    }
    let csv = sweep_csv(&rows);
    assert_eq!(csv.lines().count(), rows.len() + 1);
    // a second run is identical
    assert_eq!(sweep_csv(&comparative_sweep(&p, &priors)), csv);
}

#[test]
fn milestone_commitment() {
    let p = p0(0.5);
    let s = solve_dynamic(&p).unwrap();
    let c = s.commitment(&p);
    assert_eq!(c.pi_high, 1.0);
    assert_abs_diff_eq!(c.pi_low, 1.0 - s.x_b, epsilon = 1e-14);
    let held = p.mu0 + (1.0 - p.mu0) * c.pi_low;
    // released low types are worth nothing at time zero beyond their own value
    let released = (1.0 - p.mu0) * s.x_b * p.agent_value(Quality::Low, s.t_b);
    assert_abs_diff_eq!(c.promised_value * held + released, s.agent_value, epsilon = 1e-10);
}

proptest! {
    #![proptest_config(common::config(24))]

    #[test]
    fn solver_policies_are_obedient_and_beat_silence(p in valid_params()) {
        match solve_dynamic(&p) {
            Ok(s) => {
                prop_assert!(s.report.as_ref().unwrap().holds(1e-8, 1e-9));
                prop_assert!(s.payoff >= no_info_principal(&p, p.mu0) - 1e-10);
                prop_assert!(s.participation_slack >= -1e-8);
                let pol = s.policy(&p).unwrap();
                prop_assert!((pol.principal_value(&p) - s.payoff).abs() < 1e-12);
            }
            Err(e) => prop_assert!(false, "{e}"),
        }
    }
}

#[test]
fn regimes_never_go_backwards() {
    // a brake that fully reveals the high type is the full-bad-news policy
    // and must not be reported as a brake
    let rank = |r: Regime| match r {
        Regime::FullBadNews => 0,
        Regime::Interior => 1,
        Regime::BrakeOnly => 2,
        Regime::Static => 3,
    };
    let mut last = 0;
    for i in 0..200 {
        let mu0 = 0.281 + 0.7 * i as f64 / 199.0;
        let r = rank(solve_dynamic(&p0(mu0)).unwrap().regime);
        assert!(r >= last, "mu0 = {mu0}");
        last = r;
    }
    assert!(solve_brake_only(&p0(0.29)).is_err());
}
