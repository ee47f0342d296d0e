//! Path simulation of a disclosure policy.

use persuasion::policy::{InformationPolicy, StoppingCdf};
use persuasion::{Params, Quality};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

const CHUNK: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    pub principal_mean: f64,
    pub principal_se: f64,
    /// Agent payoff net of the outside option, comparable to the agent's
    /// value functions.
    pub agent_mean: f64,
    pub agent_se: f64,
    /// Paths where the agent would rather continue past the stop message.
    pub obedience_violations: u64,
    pub paths: u64,
    pub seed: u64,
}

enum Piece<'a> {
    Atom(f64, f64),
    Seg(&'a persuasion::policy::Segment, f64),
}

struct Sampler<'a> {
    pieces: Vec<Piece<'a>>,
    params: &'a Params,
}

impl<'a> Sampler<'a> {
    fn new(cdf: &'a StoppingCdf, params: &'a Params) -> Self {
        let mut keyed: Vec<(f64, u8, Piece<'a>)> = cdf.atoms.iter().map(|&(t, m)| (t, 0, Piece::Atom(t, m))).collect();
        keyed.extend(cdf.segments.iter().map(|s| (s.start, 1, Piece::Seg(s, s.mass(params)))));
        keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        Sampler { pieces: keyed.into_iter().map(|k| k.2).collect(), params }
    }

    fn draw(&self, u: f64) -> f64 {
        let mut acc = 0.0;
        let mut last = 0.0;
        for p in &self.pieces {
            match *p {
                Piece::Atom(t, m) => {
                    acc += m;
                    last = t;
                    if u <= acc {
                        return t;
                    }
                }
                Piece::Seg(s, m) => {
                    if u <= acc + m {
                        let target = u - acc;
                        let (mut lo, mut hi) = (s.start, s.end);
                        for _ in 0..64 {
                            let mid = 0.5 * (lo + hi);
                            if s.mass_until(self.params, mid) < target {
                                lo = mid;
                            } else {
                                hi = mid;
                            }
                        }
                        return 0.5 * (lo + hi);
                    }
                    acc += m;
                    last = s.end;
                }
            }
        }
        last
    }
}

#[derive(Default, Clone, Copy)]
struct Acc {
    w: f64,
    w2: f64,
    v: f64,
    v2: f64,
    bad: u64,
}

fn stop_excess(params: &Params, policy: &InformationPolicy, t: f64) -> f64 {
    let mut dh = policy.high.atom_at(t);
    let mut dl = policy.low.atom_at(t);
    if dh == 0.0 && dl == 0.0 {
        dh = policy.high.density_at(params, t);
        dl = policy.low.density_at(params, t);
    }
    let h = params.agent_slope(Quality::High, t);
    let l = params.agent_slope(Quality::Low, t);
    let mu0 = params.mu0;
    let total = mu0 * dh + (1.0 - mu0) * dl;
    if total <= 0.0 {
        return 0.0;
    }
    let nu = mu0 * dh / total;
    (nu * h + (1.0 - nu) * l) / (h - l)
}

/// Simulate `paths` independent histories. Each path owns its own random
/// stream (the path index), and chunk sums are reduced in a fixed order, so
/// the result does not depend on the thread count.
pub fn monte_carlo(policy: &InformationPolicy, params: &Params, paths: u64, seed: u64) -> SimulationResult {
    let paths = paths.max(1);
    let sh = Sampler::new(&policy.high, params);
    let sl = Sampler::new(&policy.low, params);
    let n_chunks = (paths as usize).div_ceil(CHUNK);
    let chunks: Vec<Acc> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = Acc::default();
            let start = (c * CHUNK) as u64;
            let end = (start + CHUNK as u64).min(paths);
            for i in start..end {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i);
                let high = rng.gen::<f64>() < params.mu0;
                let feasible = rng.gen::<f64>() < params.p0;
                let e: f64 = rng.gen();
                let u: f64 = rng.gen();
                let hit = if feasible { -(1.0 - e).ln() / params.lambda } else { f64::INFINITY };
                let s = if high { sh.draw(u) } else { sl.draw(u) };
                let y = params.payoff(if high { Quality::High } else { Quality::Low });
                let (w, v) = if hit < s {
                    (params.big_y * (-params.r_p * hit).exp(), y * (-params.r_a * hit).exp())
                } else {
                    if stop_excess(params, policy, s) > 1e-9 {
                        acc.bad += 1;
                    }
                    (params.big_z * (-params.r_p * s).exp(), params.z * (-params.r_a * s).exp())
                };
                let v = v - params.z;
                acc.w += w;
                acc.w2 += w * w;
                acc.v += v;
                acc.v2 += v * v;
            }
            acc
        })
        .collect();
    let tot = chunks.iter().fold(Acc::default(), |a, b| Acc {
        w: a.w + b.w,
        w2: a.w2 + b.w2,
        v: a.v + b.v,
        v2: a.v2 + b.v2,
        bad: a.bad + b.bad,
    });
    let n = paths as f64;
    let se = |s: f64, s2: f64| {
        if paths < 2 {
            return f64::INFINITY;
        }
        let m = s / n;
        ((s2 / n - m * m).max(0.0) * n / (n - 1.0) / n).sqrt()
    };
    SimulationResult {
        principal_mean: tot.w / n,
        principal_se: se(tot.w, tot.w2),
        agent_mean: tot.v / n,
        agent_se: se(tot.v, tot.v2),
        obedience_violations: tot.bad,
        paths,
        seed,
    }
}
