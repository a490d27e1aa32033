//! Dominant singularities `rho_{t,k}` of the level system.
//!
//! At level `k` the rooted function solves `y = exp(H(x, y))` with
//! `H(x, y) = G_{k+1}^{(k)}` evaluated at `x_1 = x`, `x_k <- x_k y` and all other
//! clique variables equal to 1. The singularity is the branch point where also
//! `1 = exp(H) dH/dy`.

use rayon::prelude::*;
use serde::Serialize;

use super::evaluator::Evaluator;
use super::jet::Jet;
use super::scalar::{DoubleDouble, Scalar};
use super::{Result, SolveError};
use crate::mps::binomial;

/// Largest residual accepted at a reported branch point.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// One solved entry of the singularity table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchPoint {
    pub t: usize,
    pub k: usize,
    pub rho: f64,
    pub y_star: f64,
    /// `(y - exp(H), 1 - exp(H) dH/dy)` at the reported point.
    pub residuals: [f64; 2],
}

/// `H` and its first derivatives at `(x, y)`.
#[derive(Debug, Clone, Copy)]
struct Local<S> {
    h: S,
    hx: S,
    hy: S,
    hyy: S,
    hxy: S,
}

/// Evaluates `H` as a jet in `(u, w)` with `x_1 = x + u` and `x_k <- x_k (y + w)`.
struct Target<S: Scalar> {
    t: usize,
    k: usize,
    ev: Evaluator<S>,
}

impl<S: Scalar> Target<S> {
    /// `valid = 1` gives `h` and its first derivatives; second derivatives need `valid = 2`.
    fn new(t: usize, k: usize, valid: usize) -> Self {
        Target {
            t,
            k,
            ev: Evaluator::new(t, k + 1, 2, valid),
        }
    }

    fn local(&self, x: S, y: S) -> Result<Local<S>> {
        let (t, k, ev) = (self.t, self.k, &self.ev);
        let mut p: Vec<Jet<S>> = (0..=t).map(|_| ev.constant(S::one())).collect();
        p[0] = ev.variable(0, x);
        let mut q = p.clone();
        let w = ev.variable(1, y);
        q[k - 1] = &p[k - 1] * &w;
        let up = match ev.level(k + 1, &q) {
            Ok(v) => v,
            Err(e) => {
                ev.reset();
                return Err(e);
            }
        };
        let fact = (1..=k).fold(S::one(), |a, i| a * S::from_i64(i as i64));
        let mut h = up.dg[k - 1].scale(fact);
        for (j, pj) in p.iter().take(k - 1).enumerate() {
            h = &h * &pj.powi(-(binomial(k as u32, j as u32 + 1) as i32));
        }
        Ok(Local {
            h: h.value(),
            hx: h.coeff(&mono(ev, &[(0, 1)])),
            hy: h.coeff(&mono(ev, &[(1, 1)])),
            hyy: h.coeff(&mono(ev, &[(1, 2)])) * S::from_f64(2.0),
            hxy: h.coeff(&mono(ev, &[(0, 1), (1, 1)])),
        })
    }

    fn residuals(&self, x: S, y: S) -> Result<(S, S, Local<S>)> {
        let l = self.local(x, y)?;
        let e = l.h.exp();
        Ok((y - e, S::one() - e * l.hy, l))
    }
}

fn mono<S: Scalar>(ev: &Evaluator<S>, parts: &[(usize, u8)]) -> Vec<u8> {
    let mut m = vec![0u8; ev.space().vars()];
    for &(v, e) in parts {
        m[v] = e;
    }
    m
}

/// Points `(x, y(x))` on the level-`k` fixpoint curve below the branch point,
/// with the defect `1 - y dH/dy` that vanishes there.
struct Defect<S: Scalar> {
    t: usize,
    k: usize,
    level: Evaluator<S>,
    target: Target<S>,
}

impl<S: Scalar> Defect<S> {
    fn new(t: usize, k: usize) -> Self {
        Defect {
            t,
            k,
            level: Evaluator::new(t, k, 0, 0),
            target: Target::new(t, k, 1),
        }
    }

    /// `(y, defect)`, or `None` past the branch point.
    fn at(&self, x: S) -> Option<(S, S)> {
        let ev = &self.level;
        let mut p: Vec<Jet<S>> = (0..=self.t).map(|_| ev.constant(S::one())).collect();
        p[0] = ev.constant(x);
        let y = match ev.level(self.k, &p) {
            Ok(v) => v.rooted.value(),
            Err(_) => {
                ev.reset();
                return None;
            }
        };
        let l = self.target.local(x, y).ok()?;
        let d = S::one() - y * l.hy;
        if !d.is_finite() || d <= S::zero() {
            return None;
        }
        Some((y, d))
    }
}

/// Brackets the branch point from below. The defect behaves like
/// `sqrt(x* - x)`, so its square is extrapolated linearly from the last two
/// points; after an overshoot it retries just below the failed point.
/// Returns `(x, y, defect)`.
fn bracket<S: Scalar>(t: usize, k: usize, upper: S, prec: f64) -> Result<(S, S, S)> {
    let f = Defect::<S>::new(t, k);
    let half = S::from_f64(0.5);
    let mut lo = upper * S::from_f64(1e-3);
    let (mut y_lo, mut d_lo) = f.at(lo).ok_or(SolveError::NoBranchPoint { t, k })?;
    let mut hi = upper;
    if f.at(hi).is_some() {
        return Err(SolveError::NoBranchPoint { t, k });
    }
    let mut prev: Option<(S, S)> = None;
    // after an overshoot, retry this fraction of the bracket below `hi`
    let mut back: Option<f64> = None;
    let floor = S::from_f64(64.0 * S::EPSILON);
    for _ in 0..400 {
        if d_lo <= S::from_f64(prec) || hi - lo <= floor * hi {
            break;
        }
        let mut x = half * (lo + hi);
        match (back, prev) {
            (Some(b), _) => x = hi - (hi - lo) * S::from_f64(b),
            (None, Some((xp, dp))) => {
                let (a, b) = (dp * dp, d_lo * d_lo);
                if a > b {
                    let c = lo + (lo - xp) * b / (a - b);
                    if c > lo && c < hi {
                        x = c;
                    }
                }
            }
            (None, None) => {}
        }
        match f.at(x) {
            Some((y, d)) => {
                prev = Some((lo, d_lo));
                lo = x;
                y_lo = y;
                d_lo = d;
                back = None;
            }
            None => {
                hi = x;
                back = Some(back.map_or(1e-3, |b: f64| (b * 10.0).min(0.5)));
            }
        }
    }
    Ok((lo, y_lo, d_lo))
}

/// A few Newton steps from the bracketed point, kept only if they reduce the
/// residuals without leaving the domain.
fn polish<S: Scalar>(target: &Target<S>, x: S, y: S, prec: f64) -> (S, S) {
    let norm = |x: S, y: S| {
        target
            .residuals(x, y)
            .map(|(e1, e2, _)| e1.abs() + e2.abs())
            .ok()
    };
    let Some(start) = norm(x, y) else {
        return (x, y);
    };
    match newton(target, x, y, prec) {
        Ok((nx, ny)) if norm(nx, ny).is_some_and(|n| n < start) => (nx, ny),
        _ => (x, y),
    }
}

/// Damped 2D Newton on both residuals. Running out of iterations returns
/// the point with the smallest residuals seen.
fn newton<S: Scalar>(target: &Target<S>, x0: S, y0: S, prec: f64) -> Result<(S, S)> {
    let (mut x, mut y) = (x0, y0);
    let tol = S::from_f64(prec.max(64.0 * S::EPSILON));
    let mut current = target.residuals(x, y)?;
    let mut best = (x, y, current.0.abs() + current.1.abs());
    for _ in 0..20 {
        let (e1, e2, l) = current;
        let size = e1.abs() + e2.abs();
        if size < best.2 {
            best = (x, y, size);
        }
        let e = l.h.exp();
        let a11 = -e * l.hx;
        let a12 = S::one() - e * l.hy;
        let a21 = -e * (l.hx * l.hy + l.hxy);
        let a22 = -e * (l.hy * l.hy + l.hyy);
        let det = a11 * a22 - a12 * a21;
        if det == S::zero() || !det.is_finite() {
            return Err(SolveError::NoConvergence {
                what: "branch point Newton",
                iterations: 0,
            });
        }
        let dx = -(a22 * e1 - a12 * e2) / det;
        let dy = -(a11 * e2 - a21 * e1) / det;
        // halve the step while it leaves the domain of the inner levels
        let mut damp = S::one();
        let mut halvings = 0;
        loop {
            let (nx, ny) = (x + dx * damp, y + dy * damp);
            if nx > S::zero() {
                if let Ok(r) = target.residuals(nx, ny) {
                    x = nx;
                    y = ny;
                    current = r;
                    break;
                }
            }
            halvings += 1;
            if halvings > 40 {
                return Err(SolveError::NoConvergence {
                    what: "branch point Newton",
                    iterations: halvings,
                });
            }
            damp *= S::from_f64(0.5);
        }
        if (dx * damp).abs() <= tol * x.abs() && (dy * damp).abs() <= tol * y.abs() {
            return Ok((x, y));
        }
    }
    Ok((best.0, best.1))
}

fn diagonal(t: usize) -> (DoubleDouble, DoubleDouble) {
    let ts = DoubleDouble::from_i64(t as i64);
    let e = DoubleDouble::one().exp();
    ((e * ts).recip(), ts.recip().exp())
}

fn finish(
    t: usize,
    k: usize,
    target: &Target<DoubleDouble>,
    x: DoubleDouble,
    y: DoubleDouble,
) -> Result<BranchPoint> {
    let (e1, e2, _) = target.residuals(x, y)?;
    let residuals = [e1.to_f64(), e2.to_f64()];
    let worst = residuals[0].abs().max(residuals[1].abs());
    if !(worst < RESIDUAL_TOL) {
        return Err(SolveError::Residual {
            t,
            k,
            residual: worst,
        });
    }
    Ok(BranchPoint {
        t,
        k,
        rho: x.to_f64(),
        y_star: y.to_f64(),
        residuals,
    })
}

/// `rho_{t,k}` for `k = t, t-1, ..., k_min`, each bracketed by the previous one.
fn chain(t: usize, k_min: usize, prec: f64) -> Result<Vec<BranchPoint>> {
    if t == 0 {
        return Err(SolveError::BadArgs("t must be at least 1".into()));
    }
    if !(prec > 0.0) {
        return Err(SolveError::BadArgs(format!(
            "precision {prec} must be positive"
        )));
    }
    let mut row = Vec::with_capacity(t);
    let (x, y) = diagonal(t);
    let top = Target::<DoubleDouble>::new(t, t, 1);
    row.push(finish(t, t, &top, x, y)?);
    for k in (k_min.max(1)..t).rev() {
        let upper = row.last().expect("row starts with the diagonal").rho;
        let (x, y, _) = bracket(t, k, DoubleDouble::from_f64(upper), prec)?;
        let target = Target::<DoubleDouble>::new(t, k, 2);
        let (x, y) = polish(&target, x, y, prec);
        row.push(finish(t, k, &target, x, y)?);
    }
    row.reverse();
    Ok(row)
}

/// `rho_{t,k}` for `k = 1..=t`. The search stops once the defect drops
/// below `prec`; reported residuals are always below [`RESIDUAL_TOL`].
pub fn branch_row(t: usize, prec: f64) -> Result<Vec<BranchPoint>> {
    chain(t, 1, prec)
}

/// `rho_{t,k}`; `k = 0` shares the singularity of `k = 1`.
pub fn branch_point(t: usize, k: usize, prec: f64) -> Result<BranchPoint> {
    if k > t {
        return Err(SolveError::BadArgs(format!("k = {k} exceeds t = {t}")));
    }
    let row = chain(t, k, prec)?;
    let mut bp = row[0];
    bp.k = k;
    Ok(bp)
}

/// Rows `t = 1..=t_max` of the singularity table, computed in parallel.
pub fn table(t_max: usize, prec: f64) -> Result<Vec<Vec<BranchPoint>>> {
    (1..=t_max)
        .into_par_iter()
        .map(|t| branch_row(t, prec))
        .collect()
}
