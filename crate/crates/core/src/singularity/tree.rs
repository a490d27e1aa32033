//! The rooted-tree function `T(z) = z exp(T(z))`.

use super::jet::Jet;
use super::scalar::Scalar;
use super::{Result, SolveError};

/// `T(z)` on `z <= 1/e` by Newton's method from a local expansion.
pub fn tree_t<S: Scalar>(z: S) -> Result<S> {
    let one = S::one();
    let ez = z * one.exp();
    let slack = S::from_f64(64.0 * S::EPSILON);
    if ez > one + slack {
        return Err(SolveError::BeyondSingularity {
            what: "tree function",
            at: z.to_f64(),
        });
    }
    if ez >= one - slack {
        return Ok(one);
    }
    let mut t = if ez > S::from_f64(0.5) {
        // T = 1 - p + p^2/3 - 11 p^3/72 + ... with p = sqrt(2(1 - ez))
        let p = (S::from_f64(2.0) * (one - ez)).sqrt();
        one - p + p * p / S::from_f64(3.0) - S::from_f64(11.0 / 72.0) * p * p * p
    } else {
        z
    };
    let tol = S::from_f64(8.0 * S::EPSILON);
    let mut prev = S::from_f64(f64::INFINITY);
    for i in 0..200 {
        let ze = z * t.exp();
        let d = one - ze;
        if d <= S::zero() {
            return Ok(if t > one { one } else { t });
        }
        let step = (t - ze) / d;
        t -= step;
        // near the singularity rounding stalls Newton above `tol`
        if step.abs() <= tol * one.max(t.abs()) || (i > 3 && step.abs() >= prev) {
            return Ok(t);
        }
        prev = step.abs();
    }
    Err(SolveError::NoConvergence {
        what: "tree function",
        iterations: 200,
    })
}

/// `T(Z)` for a jet `Z`; each pass of the frozen-derivative iteration fixes one more order.
pub fn tree_t_jet<S: Scalar>(z: &Jet<S>) -> Result<Jet<S>> {
    let t0 = tree_t(z.value())?;
    let d = S::one() - t0;
    if d <= S::from_f64(S::EPSILON.sqrt()) {
        return Err(SolveError::BeyondSingularity {
            what: "tree function jet",
            at: z.value().to_f64(),
        });
    }
    let inv = d.recip();
    let mut t = Jet::constant(z.space(), t0);
    for _ in 0..=z.space().degree() + 1 {
        let r = &t - &(z * &t.exp());
        t = &t - &r.scale(inv);
    }
    Ok(t)
}
