//! Root finding, 1-D maximisation, quadrature and hulls.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Bisection on a bracketing interval. Returns the midpoint of the final
/// bracket.
pub fn bisect<T: Scalar, F: FnMut(T) -> T>(
    mut f: F,
    mut lo: T,
    mut hi: T,
    tol: T,
    max_iter: usize,
) -> Result<T> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == T::zero() {
        return Ok(lo);
    }
    if fhi == T::zero() {
        return Ok(hi);
    }
    if (flo > T::zero()) == (fhi > T::zero()) {
        return Err(Error::NoBracket {
            lo: lo.to_f64().unwrap_or(f64::NAN),
            hi: hi.to_f64().unwrap_or(f64::NAN),
        });
    }
    let two = T::lit(2.0);
    for _ in 0..max_iter {
        let mid = (lo + hi) / two;
        if hi - lo <= tol {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == T::zero() {
            return Ok(mid);
        }
        if (fm > T::zero()) == (flo > T::zero()) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    if hi - lo <= tol * T::lit(1e3) {
        Ok((lo + hi) / two)
    } else {
        Err(Error::NotConverged("bisection".into()))
    }
}

/// Largest `t` in `[lo, hi]` with `f(t) >= 0`, for `f` decreasing.
/// `None` when `f(lo) < 0`.
pub fn last_nonnegative<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64) -> Option<f64> {
    if f(lo) < 0.0 {
        return None;
    }
    if f(hi) >= 0.0 {
        return Some(hi);
    }
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        if b - a <= 1e-14 * (1.0 + b.abs()) {
            break;
        }
        let m = 0.5 * (a + b);
        if f(m) >= 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    Some(a)
}

/// Golden-section search for a maximum of a unimodal function.
pub fn golden_max<T: Scalar, F: FnMut(T) -> T>(mut f: F, lo: T, hi: T, tol: T) -> (T, T) {
    let g = T::lit(0.618_033_988_749_894_8);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..300 {
        if b - a <= tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = (a + b) / T::lit(2.0);
    let fx = f(x);
    // the endpoints are not probed by the bracket updates
    let (fl, fh) = (f(lo), f(hi));
    if fl > fx && fl >= fh {
        (lo, fl)
    } else if fh > fx {
        (hi, fh)
    } else {
        (x, fx)
    }
}

/// Uniform scan with `n` intervals followed by golden refinement around the
/// best grid point. Safer than plain golden search when unimodality is not
/// guaranteed.
pub fn scan_max<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, n: usize, tol: f64) -> (f64, f64) {
    if hi <= lo {
        return (lo, f(lo));
    }
    let h = (hi - lo) / n as f64;
    let mut best = (lo, f64::NEG_INFINITY);
    for i in 0..=n {
        let x = lo + h * i as f64;
        let v = f(x);
        if v > best.1 {
            best = (x, v);
        }
    }
    let a = (best.0 - h).max(lo);
    let b = (best.0 + h).min(hi);
    let refined = golden_max(&mut f, a, b, tol);
    if refined.1 >= best.1 {
        refined
    } else {
        best
    }
}

/// Adaptive Simpson quadrature.
pub fn adaptive_simpson<T: Scalar, F: FnMut(T) -> T>(mut f: F, a: T, b: T, tol: T) -> T {
    if b <= a {
        return T::zero();
    }
    let two = T::lit(2.0);
    let six = T::lit(6.0);
    let m = (a + b) / two;
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / six * (fa + T::lit(4.0) * fm + fb);
    simpson_rec(&mut f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<T: Scalar, F: FnMut(T) -> T>(
    f: &mut F,
    a: T,
    b: T,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
    tol: T,
    depth: u32,
) -> T {
    let two = T::lit(2.0);
    let six = T::lit(6.0);
    let four = T::lit(4.0);
    let m = (a + b) / two;
    let lm = (a + m) / two;
    let rm = (m + b) / two;
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / six * (fa + four * flm + fm);
    let right = (b - m) / six * (fm + four * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= T::lit(15.0) * tol {
        return left + right + delta / T::lit(15.0);
    }
    simpson_rec(f, a, m, fa, flm, fm, left, tol / two, depth - 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, tol / two, depth - 1)
}

/// Indices of the lower convex hull of points sorted by `x`.
pub fn lower_hull(xs: &[f64], ys: &[f64]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::with_capacity(xs.len());
    for i in 0..xs.len() {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (xs[b] - xs[a]) * (ys[i] - ys[a]) - (ys[b] - ys[a]) * (xs[i] - xs[a]);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

fn interpolate_hull(xs: &[f64], ys: &[f64], hull: &[usize]) -> Vec<f64> {
    let mut out = Vec::with_capacity(xs.len());
    let mut k = 0;
    for &x in xs {
        while k + 1 < hull.len() - 1 && xs[hull[k + 1]] < x {
            k += 1;
        }
        if hull.len() == 1 {
            out.push(ys[hull[0]]);
            continue;
        }
        let (i, j) = (hull[k], hull[k + 1]);
        let w = if xs[j] > xs[i] { (x - xs[i]) / (xs[j] - xs[i]) } else { 0.0 };
        out.push(ys[i] + w * (ys[j] - ys[i]));
    }
    out
}

/// Greatest convex minorant of sampled values, evaluated on the same grid.
pub fn convex_envelope(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    assert_eq!(xs.len(), ys.len());
    assert!(!xs.is_empty());
    let hull = lower_hull(xs, ys);
    interpolate_hull(xs, ys, &hull)
}

/// Least concave majorant of sampled values.
pub fn concave_envelope(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let neg: Vec<f64> = ys.iter().map(|y| -y).collect();
    convex_envelope(xs, &neg).into_iter().map(|y| -y).collect()
}

/// Bounded Nelder-Mead. Points are clamped into the box before every
/// evaluation. Minimises `f`.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    start: &[f64],
    lo: &[f64],
    hi: &[f64],
    step: f64,
    tol: f64,
    max_eval: usize,
) -> (Vec<f64>, f64) {
    let n = start.len();
    let clamp = |x: &mut Vec<f64>| {
        for i in 0..n {
            x[i] = x[i].clamp(lo[i], hi[i]);
        }
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let mut x0 = start.to_vec();
    clamp(&mut x0);
    let f0 = f(&x0);
    simplex.push((x0.clone(), f0));
    for i in 0..n {
        let mut x = x0.clone();
        let width = hi[i] - lo[i];
        let d = step * width.max(1e-12);
        x[i] = if x[i] + d <= hi[i] { x[i] + d } else { x[i] - d };
        clamp(&mut x);
        let fx = f(&x);
        simplex.push((x, fx));
    }
    let mut evals = n + 1;
    while evals < max_eval {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        let spread = simplex[n].1 - simplex[0].1;
        let size = (0..n)
            .map(|i| simplex.iter().map(|p| (p.0[i] - simplex[0].0[i]).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread.abs() <= tol && size <= tol.sqrt() * 1e-2 {
            break;
        }
        let mut centroid = vec![0.0; n];
        for p in &simplex[..n] {
            for i in 0..n {
                centroid[i] += p.0[i] / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let along = |t: f64| -> Vec<f64> {
            let mut x: Vec<f64> = (0..n).map(|i| centroid[i] + t * (worst.0[i] - centroid[i])).collect();
            for i in 0..n {
                x[i] = x[i].clamp(lo[i], hi[i]);
            }
            x
        };
        let xr = along(-1.0);
        let fr = f(&xr);
        evals += 1;
        if fr < simplex[0].1 {
            let xe = along(-2.0);
            let fe = f(&xe);
            evals += 1;
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let xc = if fr < worst.1 { along(-0.5) } else { along(0.5) };
            let fc = f(&xc);
            evals += 1;
            if fc < worst.1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for p in simplex.iter_mut().skip(1) {
                    let mut x: Vec<f64> = (0..n).map(|i| best[i] + 0.5 * (p.0[i] - best[i])).collect();
                    clamp(&mut x);
                    p.1 = f(&x);
                    p.0 = x;
                    evals += 1;
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
    simplex.swap_remove(0)
}
