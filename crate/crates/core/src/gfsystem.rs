//! Exact generating functions `G_k` for k-connected chordal graphs of
//! tree-width at most `t`, assembled level by level from the top clique.
//!
//! Series for tree-width `t` use `t + 1` variables: `x_j` marks `j`-cliques
//! for `j = 1..=t+1`, so `x_1` counts vertices and `x_2` edges.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::mps::{self, binomial, factorial, MpsError, Series};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SystemError {
    #[error(transparent)]
    Mps(#[from] MpsError),
    #[error("level {k} is outside 1..={t}")]
    BadLevel { k: usize, t: usize },
    #[error("no fixpoint at level {k} after {iterations} iterations")]
    NoFixpoint { k: usize, iterations: u32 },
    #[error("integral and dissymmetry unrooting disagree at level {k}")]
    UnrootingMismatch { k: usize },
    #[error("coefficient n!*[x^{n}]G_{k} is not an integer")]
    NotInteger { k: usize, n: u32 },
    #[error("clique size {i} is not tracked in G_{k}")]
    Untracked { i: usize, k: usize },
    #[error("no graphs of size {n} in class k={k}")]
    EmptyClass { k: usize, n: u32 },
    #[error("invalid arguments: {0}")]
    BadArgs(String),
}

pub type Result<T, E = SystemError> = std::result::Result<T, E>;

/// How `G_k` is recovered from the rooted series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Unrooting {
    #[default]
    Dissymmetry,
    Integral,
    /// Compute both and fail on any difference.
    CrossCheck,
}

#[derive(Debug, Clone, Default)]
pub struct AssembleOptions {
    pub unrooting: Unrooting,
    /// `tracked[j - 1]` keeps `x_j` in series below level `j`; `None` keeps all.
    /// Untracked variables are set to 1 as soon as they become passive,
    /// which is all that plain counting needs.
    pub tracked: Option<Vec<bool>>,
}

impl AssembleOptions {
    pub fn counting_only() -> Self {
        AssembleOptions {
            unrooting: Unrooting::Dissymmetry,
            tracked: Some(Vec::new()),
        }
    }
}

/// All series of the system for one `(t, N)`.
#[derive(Debug, Clone)]
pub struct LevelSystem {
    t: usize,
    n: u32,
    tracked: Vec<bool>,
    unrooted: Vec<Series>,
    rooted_upper: Vec<Option<Series>>,
    rooted_self: Vec<Option<Series>>,
}

impl LevelSystem {
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn trunc(&self) -> u32 {
        self.n
    }

    /// `G_k` for `0 <= k <= t + 1`, exact through `x_1^N`.
    pub fn g(&self, k: usize) -> &Series {
        &self.unrooted[k]
    }

    /// `G_{k+1}^{(k)}` for `1 <= k <= t`, exact through `x_1^{N-k}`.
    pub fn rooted_upper(&self, k: usize) -> Option<&Series> {
        self.rooted_upper.get(k).and_then(|s| s.as_ref())
    }

    /// `G_k^{(k)}` for `1 <= k <= t`, exact through `x_1^{N-k}`.
    pub fn rooted_self(&self, k: usize) -> Option<&Series> {
        self.rooted_self.get(k).and_then(|s| s.as_ref())
    }

    /// Whether `x_i` survives in `G_k`.
    pub fn tracks(&self, k: usize, i: usize) -> bool {
        i <= k.max(1) || self.tracked.get(i - 1).copied().unwrap_or(false)
    }
}

fn check_level(k: usize, t: usize) -> Result<()> {
    if k == 0 || k > t {
        return Err(SystemError::BadLevel { k, t });
    }
    Ok(())
}

/// Exponent vector with `C(k, j)` at `x_j` for `j <= upto`.
fn clique_exponents(vars: usize, k: usize, upto: usize) -> Vec<u32> {
    (1..=vars)
        .map(|j| {
            if j <= upto {
                binomial(k as u32, j as u32) as u32
            } else {
                0
            }
        })
        .collect()
}

fn inv_factorial(k: usize) -> BigRational {
    BigRational::new(BigInt::one(), factorial(k as u32))
}

/// `G_{t+1}`: the single `(t+1)`-clique, `prod_j x_j^{C(t+1, j)} / (t+1)!`.
pub fn build_top(t: usize, n: u32) -> Result<Series> {
    if t == 0 || (n as usize) < t + 1 {
        return Err(SystemError::BadArgs("need t >= 1 and N >= t + 1".into()));
    }
    top_monomial(t, n)
}

/// Same as [`build_top`], but empty when the clique is above the truncation.
fn top_monomial(t: usize, n: u32) -> Result<Series> {
    let vars = t + 1;
    let e = clique_exponents(vars, t + 1, t + 1);
    Ok(Series::monomial(vars, n, &e, inv_factorial(t + 1))?)
}

/// `G_{k+1}^{(k)} = k! prod_{j<k} x_j^{-C(k,j)} dG_{k+1}/dx_k`.
///
/// The result keeps the input order but is exact only through `x_1^{N-k}`.
pub fn root_k(g_up: &Series, k: usize) -> Result<Series> {
    check_level(k, g_up.vars() - 1)?;
    let d = mps::diff(g_up, k)?;
    let e = clique_exponents(g_up.vars(), k, k - 1);
    let q = mps::mono_div(&d, &e)?;
    Ok(mps::scale(
        &q,
        &BigRational::from_integer(factorial(k as u32)),
    ))
}

/// Solves `Y = exp(F[x_k <- x_k Y])` for the rooted series `Y = G_k^{(k)}`.
///
/// Slices of `Y` are built one power of `x_1` at a time; the result is then
/// accepted only if one more full iteration reproduces it exactly.
pub fn solve_level(f: &Series, k: usize) -> Result<Series> {
    check_level(k, f.vars() - 1)?;
    let step =
        |y: &Series| -> Result<Series> { Ok(mps::exp_series(&mps::subst_scaled(f, k, y)?)?) };
    let mut y = mps::exp_fixpoint(f, k)?;
    for _ in 0..2 {
        let next = step(&y)?;
        if next == y {
            return Ok(y);
        }
        y = next;
    }
    Err(SystemError::NoFixpoint {
        k,
        iterations: f.trunc() + 2,
    })
}

/// `G_k = (1/k!) prod_{j<k} x_j^{C(k,j)} * integral of G_k^{(k)} dx_k`.
pub fn unroot_integral(gkk: &Series, k: usize) -> Result<Series> {
    check_level(k, gkk.vars() - 1)?;
    let a = mps::anti_diff(gkk, k)?;
    let e = clique_exponents(gkk.vars(), k, k - 1);
    let m = mps::mul_monomial(&a, &e)?;
    Ok(mps::scale(&m, &inv_factorial(k)))
}

/// `G_k = G_{k+1}(x_k Y) + (1/k!) prod_{j<=k} x_j^{C(k,j)} Y (1 - G_{k+1}^{(k)}(x_k Y))`
/// with `Y = G_k^{(k)}`.
pub fn unroot_dissymmetry(g_up: &Series, f_up: &Series, gkk: &Series, k: usize) -> Result<Series> {
    check_level(k, g_up.vars() - 1)?;
    let a = mps::subst_scaled(g_up, k, gkk)?;
    let b = mps::subst_scaled(f_up, k, gkk)?;
    let one_minus_b = mps::sub(&Series::one(b.vars(), b.trunc()), &b)?;
    let c = mps::mul(gkk, &one_minus_b)?;
    let e = clique_exponents(gkk.vars(), k, k);
    let c = mps::scale(&mps::mul_monomial(&c, &e)?, &inv_factorial(k));
    Ok(mps::add(&a, &c)?)
}

fn project(mut s: Series, above: usize, tracked: &[bool]) -> Result<Series> {
    for j in (above + 1)..=s.vars() {
        if j >= 2 && !tracked.get(j - 1).copied().unwrap_or(false) {
            s = mps::eval_at_one(&s, j)?;
        }
    }
    Ok(s)
}

/// Full system with every clique size tracked, dissymmetry unrooting.
pub fn assemble(t: usize, n: u32) -> Result<LevelSystem> {
    assemble_with(t, n, &AssembleOptions::default())
}

pub fn assemble_with(t: usize, n: u32, opts: &AssembleOptions) -> Result<LevelSystem> {
    if t == 0 || n == 0 {
        return Err(SystemError::BadArgs("need t >= 1 and N >= 1".into()));
    }
    let top = top_monomial(t, n)?;
    let vars = t + 1;
    let tracked = match &opts.tracked {
        None => vec![true; vars],
        Some(v) => (0..vars)
            .map(|j| v.get(j).copied().unwrap_or(false))
            .collect(),
    };
    let mut unrooted = vec![Series::zero(vars, n); t + 2];
    let mut rooted_upper = vec![None; t + 1];
    let mut rooted_self = vec![None; t + 1];
    unrooted[t + 1] = top;
    for k in (1..=t).rev() {
        let g_up = project(unrooted[k + 1].clone(), k, &tracked)?;
        let f = root_k(&g_up, k)?;
        let y = solve_level(&f, k)?;
        let gk = match opts.unrooting {
            Unrooting::Dissymmetry => unroot_dissymmetry(&g_up, &f, &y, k)?,
            Unrooting::Integral => unroot_integral(&y, k)?,
            Unrooting::CrossCheck => {
                let a = unroot_dissymmetry(&g_up, &f, &y, k)?;
                let b = unroot_integral(&y, k)?;
                if a != b {
                    return Err(SystemError::UnrootingMismatch { k });
                }
                a
            }
        };
        let exact = n.saturating_sub(k as u32);
        rooted_upper[k] = Some(f.with_trunc(exact));
        rooted_self[k] = Some(y.with_trunc(exact));
        unrooted[k] = gk;
    }
    let g1 = project(unrooted[1].clone(), 1, &tracked)?;
    unrooted[0] = mps::exp_series(&g1)?;
    Ok(LevelSystem {
        t,
        n,
        tracked,
        unrooted,
        rooted_upper,
        rooted_self,
    })
}

/// Number of labelled graphs on `n` vertices in class `k`: `n! [x_1^n] G_k(x_1, 1, ..., 1)`.
pub fn count(sys: &LevelSystem, k: usize, n: u32) -> Result<BigInt> {
    if k > sys.t + 1 || n > sys.n {
        return Err(SystemError::BadArgs(format!(
            "count needs k <= {} and n <= {}",
            sys.t + 1,
            sys.n
        )));
    }
    let v = sys.g(k).coeff_at_ones(n) * BigRational::from_integer(factorial(n));
    if !v.is_integer() {
        return Err(SystemError::NotInteger { k, n });
    }
    Ok(v.to_integer())
}

/// Exact mean and variance of the number of `i`-cliques over graphs of size `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Moments {
    pub mean: BigRational,
    pub variance: BigRational,
}

pub fn clique_moments(sys: &LevelSystem, k: usize, n: u32, i: usize) -> Result<Moments> {
    if k > sys.t + 1 || n > sys.n || i < 2 || i > sys.t + 1 {
        return Err(SystemError::BadArgs(format!(
            "moments need k <= {}, n <= {}, 2 <= i <= {}",
            sys.t + 1,
            sys.n,
            sys.t + 1
        )));
    }
    if !sys.tracks(k, i) {
        return Err(SystemError::Untracked { i, k });
    }
    let g = sys.g(k);
    let (mut s0, mut s1, mut s2) = (
        BigRational::zero(),
        BigRational::zero(),
        BigRational::zero(),
    );
    for (e, c) in g.terms() {
        if e.0[0] != n {
            continue;
        }
        let m = BigRational::from_integer(e.0[i - 1].into());
        s0 += c;
        s1 += c * &m;
        s2 += c * &m * &m;
    }
    if s0.is_zero() {
        return Err(SystemError::EmptyClass { k, n });
    }
    let mean = &s1 / &s0;
    let variance = &s2 / &s0 - &mean * &mean;
    Ok(Moments { mean, variance })
}

/// JSON form of a count table: `{"t", "k", "counts": [{"n", "count"}]}`.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct CountsJson {
    pub t: usize,
    pub k: usize,
    pub counts: Vec<CountEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct CountEntry {
    pub n: u32,
    pub count: String,
}

pub fn counts_json(sys: &LevelSystem, k: usize) -> Result<CountsJson> {
    let counts = (1..=sys.n)
        .map(|n| {
            count(sys, k, n).map(|c| CountEntry {
                n,
                count: c.to_string(),
            })
        })
        .collect::<Result<_>>()?;
    Ok(CountsJson {
        t: sys.t,
        k,
        counts,
    })
}
