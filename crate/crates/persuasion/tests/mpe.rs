mod common;

use approx::assert_abs_diff_eq;
use common::valid_params;
use persuasion::mpe::*;
use persuasion::statics::no_info_principal;
use persuasion::Params;
use proptest::prelude::*;

#[test]
fn reference_payoffs() {
    for (mu0, v) in [(0.30, 1.25667), (0.32, 1.26321), (0.34, 1.26707), (0.45, 1.27339), (0.50, 1.27384), (0.55, 1.27396)] {
        let s = mpe_policy(&Params::baseline().with_prior(mu0)).unwrap();
        assert!(!s.is_static);
        assert_abs_diff_eq!(s.payoff, v, epsilon = 1e-5);
    }
}

#[test]
fn agent_is_kept_indifferent() {
    let p = Params::baseline().with_prior(0.4);
    let s = mpe_policy(&p).unwrap();
    let (a, b) = (p.stop_time(0.4), p.peak_time());
    for i in 0..100 {
        let t = a + (b - a) * i as f64 / 100.0;
        let k = s.policy.continuation_value(&p, t).unwrap();
        assert!(k.abs() < 1e-10, "t = {t}: {k}");
    }
    assert!(s.policy.check(&p, 512).holds(1e-9, 1e-9));
}

#[test]
fn commitment_has_value_below_alignment() {
    for mu0 in [0.3, 0.4, 0.5, 0.59] {
        let p = Params::baseline().with_prior(mu0);
        let g = commitment_gap(&p).unwrap();
        assert!(g > 0.0, "mu0 = {mu0}: {g}");
        assert!(mpe_policy(&p).unwrap().payoff > no_info_principal(&p, mu0));
    }
    let p = Params::baseline().with_prior(0.7);
    assert!(mpe_policy(&p).unwrap().is_static);
    assert_abs_diff_eq!(commitment_gap(&p).unwrap(), 0.0, epsilon = 1e-12);
}

proptest! {
    #![proptest_config(common::config(32))]

    #[test]
    fn equilibrium_is_obedient(p in valid_params()) {
        let s = mpe_policy(&p).unwrap();
        prop_assert!(s.policy.check(&p, 256).holds(1e-9, 1e-9));
        prop_assert!(s.payoff >= no_info_principal(&p, p.mu0) - 1e-12);
        prop_assert!(commitment_gap(&p).unwrap() >= -1e-9);
    }
}
