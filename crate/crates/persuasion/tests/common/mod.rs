#![allow(dead_code)]

use persuasion::Params;
use proptest::prelude::*;

/// Valid parameter sets with equal discount rates and an interior peak.
pub fn valid_params() -> impl Strategy<Value = Params> {
    (0.2..0.8f64, 0.5..2.0f64, 0.05..0.3f64, 0.5..2.0f64, 0.05..1.0f64, 0.2..0.95f64, 1.05..3.0f64, 0.05..0.95f64)
        .prop_map(|(p0, lambda, r, big_z, u, a, c, mu0)| {
            let b_min = ((lambda + r) + r * (1.0 - p0) / p0) / lambda;
            let b = b_min * (1.0 + u);
            Params {
                p0,
                lambda,
                r_p: r,
                r_a: r,
                y_l: a * b,
                y_h: c * b,
                z: 1.0,
                big_y: b * big_z,
                big_z,
                mu0,
            }
        })
}

/// Baseline with `r_A = k r_P` and `y_H` moved so that the high type's
/// stopping time is unchanged. The literal baseline cannot carry such a
/// rate gap without breaking the stopping-time ordering.
pub fn unequal(k: f64, r_a: f64, mu0: f64) -> Params {
    let mut p = Params::baseline();
    p.r_a = r_a;
    p.r_p = r_a / k;
    p.y_h = 20.0 * r_a + 1.0;
    p.mu0 = mu0;
    p
}

/// Composite Simpson on `n` (even) panels; kept separate from the library
/// quadrature.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let x = a + h * i as f64;
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
    }
    s * h / 3.0
}

pub fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, failure_persistence: None, ..ProptestConfig::default() }
}
