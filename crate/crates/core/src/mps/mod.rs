//! Sparse multivariate power series with exact rational coefficients,
//! truncated on the degree of the first variable.
//!
//! A series in `t` variables `x_1..x_t` is stored as one sparse slice per
//! power of `x_1`. Every operation keeps the truncation order `N`: terms
//! with `e_1 > N` are never stored.

mod ops;
mod serial;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rustc_hash::FxHashMap;
use smallvec::SmallVec;
use thiserror::Error;

pub use ops::{
    add, anti_diff, diff, eval_at_one, exp_fixpoint, exp_series, mono_div, mul, mul_monomial, neg,
    scale, sub, subst_scaled,
};
pub use serial::{SeriesJson, TermJson};

/// Exponents `e_2..e_t` of a monomial, i.e. everything but the `x_1` power.
pub(crate) type Tail = SmallVec<[u32; 7]>;
pub(crate) type Slice = FxHashMap<Tail, BigRational>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MpsError {
    #[error("series shapes differ: {left_vars} vars/N={left_n} vs {right_vars} vars/N={right_n}")]
    ShapeMismatch {
        left_vars: usize,
        left_n: u32,
        right_vars: usize,
        right_n: u32,
    },
    #[error("variable index {index} out of range 1..={vars}")]
    VarOutOfRange { index: usize, vars: usize },
    #[error("exponent vector has {got} entries, expected {expected}")]
    BadExponent { got: usize, expected: usize },
    #[error("term {term:?} is not divisible by monomial {divisor:?}")]
    NotDivisible { term: Vec<u32>, divisor: Vec<u32> },
    #[error("exponential argument has a nonzero constant term")]
    NonzeroConstant,
    #[error("exponential argument has a term free of x_1: {0:?}")]
    ZeroDegreeTerm(Vec<u32>),
    #[error("substituted factor must have constant term 1")]
    BadSubstitution,
    #[error("malformed series json: {0}")]
    Json(String),
}

pub type Result<T, E = MpsError> = std::result::Result<T, E>;

/// Exponent vector `(e_1, ..., e_t)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExpVec(pub SmallVec<[u32; 8]>);

impl ExpVec {
    pub fn new(e: &[u32]) -> Self {
        ExpVec(SmallVec::from_slice(e))
    }

    pub fn zeros(vars: usize) -> Self {
        ExpVec(SmallVec::from_elem(0, vars))
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    /// Graded lexicographic order: total degree first, then lexicographic.
    pub fn grlex_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

/// Truncated series in `vars` variables, exact for `e_1 <= trunc`.
#[derive(Clone, PartialEq)]
pub struct Series {
    vars: usize,
    trunc: u32,
    slices: Vec<Slice>,
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<_> = self.terms().collect();
        terms.sort_by(|a, b| a.0.grlex_cmp(&b.0));
        write!(f, "Series[{} vars, N={}](", self.vars, self.trunc)?;
        for (i, (e, c)) in terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}*x^{:?}", c, e.as_slice())?;
        }
        write!(f, ")")
    }
}

impl Series {
    pub fn zero(vars: usize, trunc: u32) -> Self {
        assert!(vars >= 1, "a series needs at least one variable");
        Series {
            vars,
            trunc,
            slices: vec![Slice::default(); trunc as usize + 1],
        }
    }

    pub fn one(vars: usize, trunc: u32) -> Self {
        Self::constant(vars, trunc, BigRational::one())
    }

    pub fn constant(vars: usize, trunc: u32, c: BigRational) -> Self {
        let mut s = Self::zero(vars, trunc);
        s.add_term(&ExpVec::zeros(vars), c);
        s
    }

    /// `c * x^e`, or zero when `e_1 > trunc`.
    pub fn monomial(vars: usize, trunc: u32, e: &[u32], c: BigRational) -> Result<Self> {
        if e.len() != vars {
            return Err(MpsError::BadExponent {
                got: e.len(),
                expected: vars,
            });
        }
        let mut s = Self::zero(vars, trunc);
        s.add_term(&ExpVec::new(e), c);
        Ok(s)
    }

    /// The single variable `x_j` (1-based).
    pub fn var(vars: usize, trunc: u32, j: usize) -> Result<Self> {
        check_var(j, vars)?;
        let mut e = vec![0; vars];
        e[j - 1] = 1;
        Self::monomial(vars, trunc, &e, BigRational::one())
    }

    pub fn from_terms<I>(vars: usize, trunc: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, BigRational)>,
    {
        let mut s = Self::zero(vars, trunc);
        for (e, c) in terms {
            if e.len() != vars {
                return Err(MpsError::BadExponent {
                    got: e.len(),
                    expected: vars,
                });
            }
            s.add_term(&ExpVec::new(&e), c);
        }
        Ok(s)
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.slices.iter().all(|s| s.is_empty())
    }

    pub fn num_terms(&self) -> usize {
        self.slices.iter().map(|s| s.len()).sum()
    }

    /// Adds `c * x^e` in place; terms beyond the truncation are dropped.
    pub fn add_term(&mut self, e: &ExpVec, c: BigRational) {
        debug_assert_eq!(e.len(), self.vars);
        let e1 = e.0[0];
        if e1 > self.trunc || c.is_zero() {
            return;
        }
        add_into(
            &mut self.slices[e1 as usize],
            Tail::from_slice(&e.0[1..]),
            c,
        );
    }

    pub fn coeff(&self, e: &[u32]) -> BigRational {
        if e.len() != self.vars || e[0] > self.trunc {
            return BigRational::zero();
        }
        self.slices[e[0] as usize]
            .get(&e[1..])
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn constant_term(&self) -> BigRational {
        self.coeff(&vec![0; self.vars])
    }

    /// All nonzero terms in unspecified order.
    pub fn terms(&self) -> impl Iterator<Item = (ExpVec, &BigRational)> + '_ {
        self.slices.iter().enumerate().flat_map(|(e1, slice)| {
            slice.iter().map(move |(tail, c)| {
                let mut e = SmallVec::with_capacity(tail.len() + 1);
                e.push(e1 as u32);
                e.extend_from_slice(tail);
                (ExpVec(e), c)
            })
        })
    }

    /// Terms sorted in graded lexicographic order.
    pub fn sorted_terms(&self) -> Vec<(ExpVec, BigRational)> {
        let mut terms: Vec<_> = self.terms().map(|(e, c)| (e, c.clone())).collect();
        terms.sort_by(|a, b| a.0.grlex_cmp(&b.0));
        terms
    }

    /// Sum of the coefficients of `x_1^n`, i.e. the `x_1^n` coefficient at `x_2 = ... = 1`.
    pub fn coeff_at_ones(&self, n: u32) -> BigRational {
        if n > self.trunc {
            return BigRational::zero();
        }
        self.slices[n as usize]
            .values()
            .fold(BigRational::zero(), |acc, c| acc + c)
    }

    /// Smallest `e_1` carrying a nonzero term.
    pub fn min_e1(&self) -> Option<u32> {
        self.slices
            .iter()
            .position(|s| !s.is_empty())
            .map(|p| p as u32)
    }

    /// Drops terms with `e_1 > n`, or pads with zero slices when `n` is larger.
    ///
    /// Raising the order does not make missing terms exact; callers use it
    /// only where the padding is absorbed by later truncation.
    pub fn with_trunc(&self, n: u32) -> Series {
        let mut slices: Vec<Slice> = self.slices.iter().take(n as usize + 1).cloned().collect();
        slices.resize(n as usize + 1, Slice::default());
        Series {
            vars: self.vars,
            trunc: n,
            slices,
        }
    }

    /// Numeric value at a point; coefficients are rounded to `f64` first.
    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.vars);
        let mut total = 0.0;
        for (e, c) in self.terms() {
            let mut m = c.to_f64().unwrap_or(f64::NAN);
            for (xi, &ei) in x.iter().zip(e.0.iter()) {
                m *= xi.powi(ei as i32);
            }
            total += m;
        }
        total
    }

    pub(crate) fn from_slices(vars: usize, trunc: u32, slices: Vec<Slice>) -> Self {
        debug_assert_eq!(slices.len(), trunc as usize + 1);
        Series {
            vars,
            trunc,
            slices,
        }
    }

    pub(crate) fn check_same_shape(&self, other: &Series) -> Result<()> {
        if self.vars != other.vars || self.trunc != other.trunc {
            return Err(MpsError::ShapeMismatch {
                left_vars: self.vars,
                left_n: self.trunc,
                right_vars: other.vars,
                right_n: other.trunc,
            });
        }
        Ok(())
    }
}

pub(crate) fn check_var(j: usize, vars: usize) -> Result<()> {
    if j == 0 || j > vars {
        return Err(MpsError::VarOutOfRange { index: j, vars });
    }
    Ok(())
}

pub(crate) fn add_into(slice: &mut Slice, key: Tail, c: BigRational) {
    use std::collections::hash_map::Entry;
    match slice.entry(key) {
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
        Entry::Vacant(v) => {
            if !c.is_zero() {
                v.insert(c);
            }
        }
    }
}

/// `n!` as a big integer.
pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// Binomial coefficient for small arguments.
pub fn binomial(n: u32, k: u32) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u64 = 1;
    for i in 0..k {
        r = r * (n - i) as u64 / (i + 1) as u64;
    }
    r
}

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}
