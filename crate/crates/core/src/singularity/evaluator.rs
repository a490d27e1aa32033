//! Numeric evaluation of the level system as jets, from the closed form at
//! level `t` down to a requested level.
//!
//! Besides `G_m` each level carries the partial derivatives `dG_m/dx_j` for
//! `j < m`. At a fixpoint `Y = exp(F)` the unrooted function is stationary
//! in `Y`, so these are obtained from the level above with `Y` held fixed.
//! This avoids differentiating through the inner solves, which loses all
//! precision next to an inner singularity.

use std::cell::RefCell;
use std::sync::Arc;

use super::jet::{Jet, JetSpace};
use super::scalar::Scalar;
use super::tree::tree_t_jet;
use super::{Result, SolveError};
use crate::mps::binomial;

/// Jets of one level at a point.
#[derive(Clone, Debug)]
pub struct LevelValues<S: Scalar> {
    /// `G_m`
    pub g: Jet<S>,
    /// `G_m^{(m)}`; 1 for the top level.
    pub rooted: Jet<S>,
    /// `G_{m+1}^{(m)}` with `x_m` replaced by `x_m G_m^{(m)}`, so that `rooted = exp(upper)`.
    pub upper: Jet<S>,
    /// `dG_m/dx_j` for `j = 1..m` (index `j - 1`).
    pub dg: Vec<Jet<S>>,
}

const MAX_INNER: usize = 200;

fn factorial_s<S: Scalar>(k: usize) -> S {
    (1..=k).fold(S::one(), |acc, i| acc * S::from_i64(i as i64))
}

/// Evaluates `G_m` for `lowest <= m <= t + 1` at jet-valued points.
///
/// The jet variables are the caller's `user_vars` followed by one auxiliary
/// variable per level in `lowest..t`, used only for the slope of that level's
/// fixpoint iteration. Results are exact up to total degree `valid` in the
/// user variables.
pub struct Evaluator<S: Scalar> {
    t: usize,
    lowest: usize,
    user_vars: usize,
    space: Arc<JetSpace>,
    tol: S,
    loose: S,
    warm: RefCell<Vec<Option<Jet<S>>>>,
}

impl<S: Scalar> Evaluator<S> {
    pub fn new(t: usize, lowest: usize, user_vars: usize, valid: usize) -> Self {
        assert!(t >= 1 && lowest >= 1 && lowest <= t + 1);
        let aux = t.saturating_sub(lowest);
        Evaluator {
            t,
            lowest,
            user_vars,
            space: JetSpace::new(user_vars + aux, valid.max(1)),
            tol: S::from_f64(256.0 * S::EPSILON),
            loose: S::from_f64(S::EPSILON.sqrt()),
            warm: RefCell::new(vec![None; t + 2]),
        }
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// Jet variable of the `i`-th caller variable.
    pub fn user_var(&self, i: usize) -> usize {
        assert!(i < self.user_vars);
        i
    }

    fn aux_var(&self, m: usize) -> usize {
        self.user_vars + (m - self.lowest)
    }

    pub fn constant(&self, v: S) -> Jet<S> {
        Jet::constant(&self.space, v)
    }

    pub fn variable(&self, i: usize, center: S) -> Jet<S> {
        Jet::var(&self.space, self.user_var(i), center)
    }

    /// Forgets warm starts, e.g. after a failed evaluation.
    pub fn reset(&self) {
        self.warm.borrow_mut().iter_mut().for_each(|w| *w = None);
    }

    fn check_point(&self, p: &[Jet<S>]) -> Result<()> {
        if p.len() != self.t + 1 {
            return Err(SolveError::BadArgs(format!(
                "point needs {} coordinates, got {}",
                self.t + 1,
                p.len()
            )));
        }
        Ok(())
    }

    /// `prod_{j <= m} x_j^{C(m,j)} / m!`, and its derivatives in `x_1..x_{m-1}`.
    fn clique_term(&self, m: usize, p: &[Jet<S>]) -> (Jet<S>, Vec<Jet<S>>) {
        let pows: Vec<Jet<S>> = (1..=m)
            .map(|j| p[j - 1].powi(binomial(m as u32, j as u32) as i32 - 1))
            .collect();
        let scale = factorial_s::<S>(m).recip();
        let product = |skip: Option<usize>| {
            let mut acc = self.constant(scale);
            for j in 1..=m {
                acc = &acc * &pows[j - 1];
                if skip != Some(j) {
                    acc = &acc * &p[j - 1];
                }
            }
            acc
        };
        let value = product(None);
        let derivs = (1..m)
            .map(|j| product(Some(j)).scale(S::from_i64(binomial(m as u32, j as u32) as i64)))
            .collect();
        (value, derivs)
    }

    /// `m! prod_{j<m} x_j^{-C(m,j)}`, turning `dG_{m+1}/dx_m` into `G_{m+1}^{(m)}`.
    fn rooting_factor(&self, m: usize, p: &[Jet<S>]) -> Jet<S> {
        let mut f = self.constant(factorial_s::<S>(m));
        for j in 1..m {
            f = &f * &p[j - 1].powi(-(binomial(m as u32, j as u32) as i32));
        }
        f
    }

    /// `G_{t+1} = prod_j x_j^{C(t+1,j)} / (t+1)!`.
    fn top(&self, p: &[Jet<S>]) -> LevelValues<S> {
        let (g, dg) = self.clique_term(self.t + 1, p);
        LevelValues {
            g,
            rooted: self.constant(S::one()),
            upper: self.constant(S::zero()),
            dg,
        }
    }

    /// Assembles level `m` from its fixpoint value and the level above at
    /// `x_m <- x_m Y`: `G_m = G_{m+1} + P_m Y (1 - F)` and likewise for the
    /// derivatives in `x_j`, `j < m`.
    fn unroot(
        &self,
        m: usize,
        p: &[Jet<S>],
        y: Jet<S>,
        f: Jet<S>,
        up: LevelValues<S>,
    ) -> LevelValues<S> {
        let (pm, dpm) = self.clique_term(m, p);
        let tail = &y * &(-&f).add_scalar(S::one());
        let g = &up.g + &(&pm * &tail);
        let dg = (1..m)
            .map(|j| &up.dg[j - 1] + &(&dpm[j - 1] * &tail))
            .collect();
        LevelValues {
            g,
            rooted: y,
            upper: f,
            dg,
        }
    }

    /// Level `t` in closed form: with `X = prod_j x_j^{C(t,j-1)}` and
    /// `T = T(tX)`, `G_t^{(t)} = exp(T/t)`.
    fn level_top(&self, p: &[Jet<S>]) -> Result<LevelValues<S>> {
        let t = self.t;
        let mut x = self.constant(S::one());
        for (j, pj) in p.iter().enumerate() {
            x = &x * &pj.powi(binomial(t as u32, j as u32) as i32);
        }
        let ts = S::from_i64(t as i64);
        let tt = tree_t_jet(&x.scale(ts))?;
        let f = tt.scale(ts.recip());
        let y = f.exp();
        let mut q = p.to_vec();
        q[t - 1] = &p[t - 1] * &y;
        let up = self.top(&q);
        Ok(self.unroot(t, p, y, f, up))
    }

    /// `G_m` alone for `m` in `lowest..=t+1`.
    pub fn g(&self, m: usize, p: &[Jet<S>]) -> Result<Jet<S>> {
        Ok(self.level(m, p)?.g)
    }

    /// Jets of level `m` at `p`; for `m < t` this solves
    /// `Y = exp(G_{m+1}^{(m)}(x_m <- x_m Y))`.
    pub fn level(&self, m: usize, p: &[Jet<S>]) -> Result<LevelValues<S>> {
        self.check_point(p)?;
        if m < self.lowest || m > self.t + 1 {
            return Err(SolveError::BadArgs(format!(
                "level {m} outside {}..={}",
                self.lowest,
                self.t + 1
            )));
        }
        if m == self.t + 1 {
            return Ok(self.top(p));
        }
        if p[0].max_abs() == S::zero() {
            // no vertices: only the empty structure survives
            return Ok(LevelValues {
                g: self.constant(S::zero()),
                rooted: self.constant(S::one()),
                upper: self.constant(S::zero()),
                dg: vec![self.constant(S::zero()); m - 1],
            });
        }
        if p.iter().take(m).any(|pj| pj.value() <= S::zero()) {
            return Err(SolveError::BadArgs(
                "x_1..x_m must be positive below the top level".into(),
            ));
        }
        if m == self.t {
            return self.level_top(p);
        }
        let result = self.solve(m, p);
        if result.is_err() {
            self.warm.borrow_mut()[m] = None;
        }
        result
    }

    fn solve(&self, m: usize, p: &[Jet<S>]) -> Result<LevelValues<S>> {
        let pm = &p[m - 1];
        let eps = self.aux_var(m);
        let factor = self.rooting_factor(m, p);
        let warm = self.warm.borrow()[m].clone();
        let mut from_warm = warm.is_some();
        let mut y = warm.unwrap_or_else(|| self.constant(S::one()));
        let mut iterations = 0;
        let mut prev = S::from_f64(f64::INFINITY);
        loop {
            iterations += 1;
            if iterations > MAX_INNER {
                return Err(SolveError::NoConvergence {
                    what: "level fixpoint",
                    iterations: MAX_INNER,
                });
            }
            let mut q = p.to_vec();
            q[m - 1] = &(pm * &y) + &Jet::var(&self.space, eps, S::zero());
            let (f, fx, up) = match self.level(m + 1, &q) {
                Ok(up) => {
                    let f = &factor * &up.dg[m - 1];
                    (f.coeff_in(eps, 0), f.coeff_in(eps, 1).value(), up)
                }
                Err(_) if from_warm => {
                    from_warm = false;
                    y = self.constant(S::one());
                    iterations = 0;
                    prev = S::from_f64(f64::INFINITY);
                    continue;
                }
                Err(e) => return Err(e),
            };
            let e = f.exp();
            let r = &e - &y;
            let denom = S::one() - e.value() * fx * pm.value();
            if !(denom > S::zero()) || !r.value().is_finite() {
                if from_warm {
                    from_warm = false;
                    y = self.constant(S::one());
                    iterations = 0;
                    prev = S::from_f64(f64::INFINITY);
                    continue;
                }
                return Err(SolveError::BeyondSingularity {
                    what: "level fixpoint",
                    at: p[0].value().to_f64(),
                });
            }
            let size = r.max_abs();
            let scale = S::one().max(y.max_abs());
            // accept once rounding noise dominates the residual
            let stalled =
                iterations > self.space.degree() + 2 && size >= prev && size <= self.loose * scale;
            prev = size;
            if size <= self.tol * scale || stalled {
                self.warm.borrow_mut()[m] = Some(y.clone());
                return Ok(self.unroot(m, p, y, f, strip(up, eps)));
            }
            y = &y + &r.scale(denom.recip());
        }
    }
}

/// Drops the dependence on an auxiliary variable.
fn strip<S: Scalar>(v: LevelValues<S>, eps: usize) -> LevelValues<S> {
    LevelValues {
        g: v.g.coeff_in(eps, 0),
        rooted: v.rooted.coeff_in(eps, 0),
        upper: v.upper.coeff_in(eps, 0),
        dg: v.dg.iter().map(|d| d.coeff_in(eps, 0)).collect(),
    }
}

fn point_jets<S: Scalar>(ev: &Evaluator<S>, point: &[S], order: usize) -> Result<Vec<Jet<S>>> {
    let t = ev.t();
    if point.len() != t + 1 {
        return Err(SolveError::BadArgs(format!(
            "point needs {} coordinates, got {}",
            t + 1,
            point.len()
        )));
    }
    if point[0] == S::zero() && order > 0 {
        return Err(SolveError::BadArgs(
            "derivatives along x_1 need x_1 > 0".into(),
        ));
    }
    Ok(point
        .iter()
        .enumerate()
        .map(|(j, &v)| {
            if j == 0 && order > 0 {
                ev.variable(0, v)
            } else {
                ev.constant(v)
            }
        })
        .collect())
}

/// Jets of level `k` (`1 <= k <= t + 1`) at `point = (x_1, ..., x_{t+1})`
/// in one variable `u` along `x_1`, exact to order `order`.
pub fn eval_level<S: Scalar>(
    t: usize,
    k: usize,
    point: &[S],
    order: usize,
) -> Result<LevelValues<S>> {
    if t == 0 || k == 0 || k > t + 1 {
        return Err(SolveError::BadArgs(format!(
            "level {k} outside 1..={}",
            t + 1
        )));
    }
    let ev = Evaluator::<S>::new(t, k, 1, order);
    let p = point_jets(&ev, point, order)?;
    ev.level(k, &p)
}

/// The closed-form top of the tower at a point.
#[derive(Clone, Debug)]
pub struct TopValues<S: Scalar> {
    /// `G_t`
    pub g: Jet<S>,
    /// `G_t^{(t)}`
    pub rooted: Jet<S>,
    /// `G_{t+1}`
    pub g_up: Jet<S>,
    /// `G_{t+1}^{(t)} = prod_j x_j^{C(t,j-1)}`
    pub upper: Jet<S>,
}

/// `G_t`, `G_t^{(t)}`, `G_{t+1}` and `G_{t+1}^{(t)}` at `point`, along `x_1`.
pub fn eval_top<S: Scalar>(t: usize, point: &[S], order: usize) -> Result<TopValues<S>> {
    if t == 0 {
        return Err(SolveError::BadArgs("t must be at least 1".into()));
    }
    let ev = Evaluator::<S>::new(t, t, 1, order);
    let p = point_jets(&ev, point, order)?;
    let lv = ev.level(t, &p)?;
    let up = ev.level(t + 1, &p)?;
    let upper = ev.rooting_factor(t, &p);
    let upper = &upper * &up.dg[t - 1];
    Ok(TopValues {
        g: lv.g,
        rooted: lv.rooted,
        g_up: up.g,
        upper,
    })
}
