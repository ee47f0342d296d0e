//! Dense two-phase tableau simplex.
//!
//! Entering column by largest reduced cost, switching to Bland's rule after
//! a run of degenerate pivots so that cycling cannot occur. Ratio-test ties
//! go to the smallest basic index.

use crate::OracleError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub rows: Vec<(Vec<f64>, Relation, f64)>,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
    pub pivots: usize,
}

const EPS: f64 = 1e-11;
const DEGENERATE_RUN: usize = 50;

struct Tableau {
    m: usize,
    width: usize,
    a: Vec<f64>,
    basis: Vec<usize>,
    pivots: usize,
    limit: usize,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.width + j]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.a[r * w + c];
        for j in 0..w {
            self.a[r * w + j] /= p;
        }
        let (before, rest) = self.a.split_at_mut(r * w);
        let (prow, after) = rest.split_at_mut(w);
        for row in before.chunks_mut(w).chain(after.chunks_mut(w)) {
            let f = row[c];
            if f != 0.0 {
                for (x, y) in row.iter_mut().zip(prow.iter()) {
                    *x -= f * y;
                }
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Maximise the objective stored in row `m` (as negated reduced costs)
    /// over columns `0..ncols`.
    fn run(&mut self, ncols: usize) -> Result<(), OracleError> {
        let rhs = self.width - 1;
        let obj = self.m;
        let mut degenerate = 0;
        loop {
            if self.pivots > self.limit {
                return Err(OracleError::PivotLimit(self.limit));
            }
            let bland = degenerate >= DEGENERATE_RUN;
            let mut enter = None;
            let mut best = -EPS;
            for j in 0..ncols {
                let d = self.at(obj, j);
                if d < best {
                    enter = Some(j);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(c) = enter else { return Ok(()) };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let aic = self.at(i, c);
                if aic > EPS {
                    let ratio = self.at(i, rhs) / aic;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((_, r)) if ratio < r - 1e-12 => Some((i, ratio)),
                        Some((k, r)) if ratio <= r + 1e-12 && self.basis[i] < self.basis[k] => Some((i, ratio)),
                        keep => keep,
                    };
                }
            }
            let Some((r, ratio)) = leave else { return Err(OracleError::Unbounded) };
            if ratio.abs() <= 1e-12 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, c);
        }
    }
}

/// Maximise `objective . x` subject to the rows and `x >= 0`.
pub fn maximize(lp: &LinearProgram) -> Result<LpSolution, OracleError> {
    let n = lp.objective.len();
    let m = lp.rows.len();
    // rows with nonnegative rhs; Ge rows with zero rhs become Le rows
    let mut rows: Vec<(Vec<f64>, Relation, f64)> = lp
        .rows
        .iter()
        .map(|(a, rel, b)| {
            let flip = *b < 0.0 || (*b == 0.0 && *rel == Relation::Ge);
            if flip {
                let rel = match rel {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (a.iter().map(|x| -x).collect(), rel, -b)
            } else {
                (a.clone(), *rel, *b)
            }
        })
        .collect();
    let n_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let n_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let width = n + n_slack + n_art + 1;
    let mut t = Tableau {
        m,
        width,
        a: vec![0.0; (m + 1) * width],
        basis: vec![0; m],
        pivots: 0,
        limit: 50 * (m + n + 10),
    };
    let (mut s, mut art) = (n, n + n_slack);
    let mut art_rows = Vec::new();
    for (i, (a, rel, b)) in rows.drain(..).enumerate() {
        let row = &mut t.a[i * width..(i + 1) * width];
        row[..n].copy_from_slice(&a);
        row[width - 1] = b;
        match rel {
            Relation::Le => {
                row[s] = 1.0;
                t.basis[i] = s;
                s += 1;
            }
            Relation::Ge => {
                row[s] = -1.0;
                s += 1;
                row[art] = 1.0;
                t.basis[i] = art;
                art_rows.push(i);
                art += 1;
            }
            Relation::Eq => {
                row[art] = 1.0;
                t.basis[i] = art;
                art_rows.push(i);
                art += 1;
            }
        }
    }
    let art_start = n + n_slack;
    // phase one: maximise minus the sum of artificials
    if !art_rows.is_empty() {
        for j in art_start..width - 1 {
            t.a[m * width + j] = 1.0;
        }
        for &i in &art_rows {
            for j in 0..width {
                t.a[m * width + j] -= t.a[i * width + j];
            }
        }
        t.run(width - 1)?;
        if t.at(m, width - 1) < -1e-9 {
            return Err(OracleError::Infeasible);
        }
        // move any artificial still basic (at zero) out of the basis
        for i in 0..m {
            if t.basis[i] >= art_start {
                if let Some(j) = (0..art_start).find(|&j| t.at(i, j).abs() > 1e-9) {
                    t.pivot(i, j);
                }
            }
        }
    }
    // phase two
    for j in 0..width {
        t.a[m * width + j] = 0.0;
    }
    for (j, c) in lp.objective.iter().enumerate() {
        t.a[m * width + j] = -c;
    }
    for i in 0..m {
        let b = t.basis[i];
        let cb = if b < n { lp.objective[b] } else { 0.0 };
        if cb != 0.0 {
            for j in 0..width {
                t.a[m * width + j] += cb * t.a[i * width + j];
            }
        }
    }
    t.run(art_start)?;
    let mut x = vec![0.0; n];
    for i in 0..m {
        if t.basis[i] < n {
            x[t.basis[i]] = t.at(i, width - 1);
        }
    }
    let value = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpSolution { x, value, pivots: t.pivots })
}
