use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use rustc_hash::FxHashMap;

use super::{add_into, check_var, ExpVec, MpsError, Result, Series, Slice, Tail};

pub fn add(a: &Series, b: &Series) -> Result<Series> {
    a.check_same_shape(b)?;
    let mut out = a.clone();
    for (slot, sb) in out.slices.iter_mut().zip(&b.slices) {
        for (k, c) in sb {
            add_into(slot, k.clone(), c.clone());
        }
    }
    Ok(out)
}

pub fn neg(a: &Series) -> Series {
    let mut out = a.clone();
    for s in &mut out.slices {
        for c in s.values_mut() {
            *c = -c.clone();
        }
    }
    out
}

pub fn sub(a: &Series, b: &Series) -> Result<Series> {
    add(a, &neg(b))
}

pub fn scale(a: &Series, c: &BigRational) -> Series {
    if c.is_zero() {
        return Series::zero(a.vars, a.trunc);
    }
    let mut out = a.clone();
    for s in &mut out.slices {
        for v in s.values_mut() {
            *v *= c;
        }
    }
    out
}

fn add_tails(a: &Tail, b: &Tail) -> Tail {
    a.iter().zip(b.iter()).map(|(x, y)| x + y).collect()
}

/// A slice over a common denominator, so products accumulate without gcds.
#[derive(Clone, Default)]
pub(crate) struct Scaled {
    den: BigInt,
    terms: Vec<(Tail, BigInt)>,
}

impl Scaled {
    pub(crate) fn new(s: &Slice) -> Scaled {
        let den = s.values().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let terms = s
            .iter()
            .map(|(k, c)| (k.clone(), c.numer() * (&den / c.denom())))
            .collect();
        Scaled { den, terms }
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// `(sum_i a_i * b_i) / divisor` for slices `a_i`, `b_i`.
pub(crate) fn sum_products(pairs: &[(&Scaled, &Scaled)], divisor: &BigInt) -> Slice {
    let pairs: Vec<_> = pairs
        .iter()
        .filter(|(a, b)| !a.is_empty() && !b.is_empty())
        .collect();
    let common = pairs
        .iter()
        .fold(BigInt::one(), |l, (a, b)| l.lcm(&(&a.den * &b.den)));
    let mut acc: FxHashMap<Tail, BigInt> = FxHashMap::default();
    for (a, b) in pairs {
        let f = &common / (&a.den * &b.den);
        for (ka, na) in &a.terms {
            let na = na * &f;
            for (kb, nb) in &b.terms {
                let key = add_tails(ka, kb);
                let prod = &na * nb;
                match acc.get_mut(&key) {
                    Some(v) => *v += prod,
                    None => {
                        acc.insert(key, prod);
                    }
                }
            }
        }
    }
    let den = common * divisor;
    acc.into_iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(k, v)| (k, BigRational::new(v, den.clone())))
        .collect()
}

fn scaled_slices(a: &Series) -> Vec<Scaled> {
    a.slices.iter().map(Scaled::new).collect()
}

/// Product truncated at `limit`; operands may carry different orders and
/// missing slices count as zero.
pub(crate) fn mul_trunc(a: &Series, b: &Series, limit: u32) -> Series {
    debug_assert_eq!(a.vars, b.vars);
    let (sa, sb) = (scaled_slices(a), scaled_slices(b));
    let one = BigInt::one();
    let slices: Vec<Slice> = (0..=limit as usize)
        .into_par_iter()
        .map(|s| {
            let lo = s.saturating_sub(b.trunc as usize);
            let hi = s.min(a.trunc as usize);
            let pairs: Vec<_> = (lo..=hi).map(|m| (&sa[m], &sb[s - m])).collect();
            sum_products(&pairs, &one)
        })
        .collect();
    Series::from_slices(a.vars, limit, slices)
}

pub fn mul(a: &Series, b: &Series) -> Result<Series> {
    a.check_same_shape(b)?;
    Ok(mul_trunc(a, b, a.trunc))
}

/// Multiplies by `x^e`, dropping terms pushed past the truncation.
pub fn mul_monomial(a: &Series, e: &[u32]) -> Result<Series> {
    if e.len() != a.vars {
        return Err(MpsError::BadExponent {
            got: e.len(),
            expected: a.vars,
        });
    }
    let shift = Tail::from_slice(&e[1..]);
    let mut out = Series::zero(a.vars, a.trunc);
    for (e1, slice) in a.slices.iter().enumerate() {
        let t1 = e1 as u64 + e[0] as u64;
        if t1 > a.trunc as u64 {
            break;
        }
        out.slices[t1 as usize] = slice
            .iter()
            .map(|(k, c)| (add_tails(k, &shift), c.clone()))
            .collect();
    }
    Ok(out)
}

/// Divides by `x^e`; every term must be divisible.
pub fn mono_div(a: &Series, e: &[u32]) -> Result<Series> {
    if e.len() != a.vars {
        return Err(MpsError::BadExponent {
            got: e.len(),
            expected: a.vars,
        });
    }
    let mut out = Series::zero(a.vars, a.trunc);
    for (term, c) in a.terms() {
        if term.0.iter().zip(e).any(|(x, y)| x < y) {
            return Err(MpsError::NotDivisible {
                term: term.0.to_vec(),
                divisor: e.to_vec(),
            });
        }
        let q: Vec<u32> = term.0.iter().zip(e).map(|(x, y)| x - y).collect();
        out.add_term(&ExpVec::new(&q), c.clone());
    }
    Ok(out)
}

/// Partial derivative in `x_j`. For `j = 1` the top slice becomes unknown and is left empty.
pub fn diff(a: &Series, j: usize) -> Result<Series> {
    check_var(j, a.vars)?;
    let mut out = Series::zero(a.vars, a.trunc);
    for (term, c) in a.terms() {
        let p = term.0[j - 1];
        if p == 0 {
            continue;
        }
        let mut e = term.0.clone();
        e[j - 1] -= 1;
        out.add_term(&ExpVec(e), c * BigRational::from_integer(p.into()));
    }
    Ok(out)
}

/// Antiderivative in `x_j` with zero constant of integration.
pub fn anti_diff(a: &Series, j: usize) -> Result<Series> {
    check_var(j, a.vars)?;
    let mut out = Series::zero(a.vars, a.trunc);
    for (term, c) in a.terms() {
        let mut e = term.0.clone();
        e[j - 1] += 1;
        let d = BigRational::from_integer(e[j - 1].into());
        out.add_term(&ExpVec(e), c / d);
    }
    Ok(out)
}

fn check_exp_argument(a: &Series) -> Result<()> {
    if !a.constant_term().is_zero() {
        return Err(MpsError::NonzeroConstant);
    }
    if let Some((e, _)) = a.slices[0].iter().next() {
        let mut full = vec![0];
        full.extend_from_slice(e);
        return Err(MpsError::ZeroDegreeTerm(full));
    }
    Ok(())
}

/// `m * A_m` for every slice.
fn weighted(a: &Series) -> Vec<Scaled> {
    a.slices
        .iter()
        .enumerate()
        .map(|(m, s)| {
            let mut sc = Scaled::new(s);
            for (_, v) in &mut sc.terms {
                *v *= m;
            }
            sc
        })
        .collect()
}

/// Next slice of `E = exp(A)` from `n E_n = sum_{m=1}^n m A_m E_{n-m}`.
fn exp_step(weighted: &[Scaled], e: &[Scaled], n: usize) -> Slice {
    let pairs: Vec<_> = (1..=n).map(|m| (&weighted[m], &e[n - m])).collect();
    sum_products(&pairs, &BigInt::from(n))
}

fn unit_slice(vars: usize) -> Slice {
    let mut s = Slice::default();
    s.insert(Tail::from_elem(0, vars - 1), BigRational::one());
    s
}

/// `exp(a)` for a series without constant term whose terms all contain `x_1`.
pub fn exp_series(a: &Series) -> Result<Series> {
    check_exp_argument(a)?;
    let w = weighted(a);
    let first = unit_slice(a.vars);
    let mut scaled = vec![Scaled::new(&first)];
    let mut out = vec![first];
    for n in 1..=a.trunc as usize {
        let next = exp_step(&w, &scaled, n);
        scaled.push(Scaled::new(&next));
        out.push(next);
    }
    Ok(Series::from_slices(a.vars, a.trunc, out))
}

/// Solves `Y = exp(f[x_j <- x_j Y])` one power of `x_1` at a time.
///
/// Every term of `f` must contain `x_1`, so slice `n` of the substituted
/// series only needs slices `< n` of `Y`.
pub fn exp_fixpoint(f: &Series, j: usize) -> Result<Series> {
    check_var(j, f.vars)?;
    check_exp_argument(f)?;
    let n_max = f.trunc as usize;
    // f split by the power p of x_j, as scaled slices per x_1 power
    let mut groups: BTreeMap<u32, Series> = BTreeMap::new();
    for (term, c) in f.terms() {
        groups
            .entry(term.0[j - 1])
            .or_insert_with(|| Series::zero(f.vars, f.trunc))
            .add_term(&term, c.clone());
    }
    let p_max = groups.keys().next_back().copied().unwrap_or(0) as usize;
    let group_slices: Vec<(usize, Vec<Scaled>, usize)> = groups
        .iter()
        .map(|(&p, s)| {
            (
                p as usize,
                scaled_slices(s),
                s.min_e1().unwrap_or(f.trunc) as usize,
            )
        })
        .collect();
    // powers[p] is only needed through N minus the smallest x_1 power of groups >= p
    let mut need = vec![0usize; p_max + 1];
    let mut suffix_min = n_max;
    for (p, _, m) in group_slices.iter().rev() {
        suffix_min = suffix_min.min(*m);
        need[*p] = n_max - suffix_min;
    }
    for p in (0..p_max).rev() {
        need[p] = need[p].max(need[p + 1]);
    }
    let first = unit_slice(f.vars);
    let one = BigInt::one();
    // powers[p][i] is slice i of Y^p
    let mut powers: Vec<Vec<Scaled>> = vec![Vec::new(); p_max + 1];
    powers[0].push(Scaled::new(&first));
    for p in 1..=p_max {
        powers[p].push(Scaled::new(&first));
    }
    let mut h_weighted: Vec<Scaled> = vec![Scaled::default()];
    let mut y_scaled = vec![Scaled::new(&first)];
    let mut y = vec![first];
    for n in 1..=n_max {
        // slice n of H = f[x_j <- x_j Y]
        let mut pairs = Vec::new();
        for (p, slices, lo) in &group_slices {
            for a in (*lo).max(1)..=n {
                if n - a < powers[*p].len() {
                    pairs.push((&slices[a], &powers[*p][n - a]));
                }
            }
        }
        let h = sum_products(&pairs, &one);
        let mut hw = Scaled::new(&h);
        for (_, v) in &mut hw.terms {
            *v *= n;
        }
        h_weighted.push(hw);
        let yn = exp_step(&h_weighted, &y_scaled, n);
        y_scaled.push(Scaled::new(&yn));
        y.push(yn);
        if n < n_max {
            // slice n of Y^p = Y^{p-1} * Y
            for p in 1..=p_max {
                if n > need[p] {
                    break;
                }
                let next = if p == 1 {
                    y_scaled[n].clone()
                } else {
                    let pairs: Vec<_> = (0..=n)
                        .map(|i| (&powers[p - 1][i], &y_scaled[n - i]))
                        .collect();
                    Scaled::new(&sum_products(&pairs, &one))
                };
                powers[p].push(next);
            }
        }
    }
    Ok(Series::from_slices(f.vars, f.trunc, y))
}

/// Substitutes `x_j <- x_j * g(x)`; requires `g(0) = 1`.
pub fn subst_scaled(a: &Series, j: usize, g: &Series) -> Result<Series> {
    a.check_same_shape(g)?;
    check_var(j, a.vars)?;
    if !g.constant_term().is_one() {
        return Err(MpsError::BadSubstitution);
    }
    let n = a.trunc;
    let mut groups: BTreeMap<u32, Series> = BTreeMap::new();
    for (term, c) in a.terms() {
        groups
            .entry(term.0[j - 1])
            .or_insert_with(|| Series::zero(a.vars, n))
            .add_term(&term, c.clone());
    }
    // g^p is only needed up to N minus the smallest x_1 power of any group >= p.
    let mut need: BTreeMap<u32, u32> = BTreeMap::new();
    let mut suffix_min = u32::MAX;
    for (&p, s) in groups.iter().rev() {
        suffix_min = suffix_min.min(s.min_e1().unwrap_or(n));
        need.insert(p, n - suffix_min.min(n));
    }
    let mut out = Series::zero(a.vars, n);
    let mut power = Series::one(a.vars, need.values().next().copied().unwrap_or(0));
    let mut power_exp = 0;
    for (&p, part) in &groups {
        let limit = need[&p];
        while power_exp < p {
            power = mul_trunc(&power, g, limit);
            power_exp += 1;
        }
        let term = mul_trunc(part, &power, n);
        for (slot, s) in out.slices.iter_mut().zip(term.slices) {
            for (k, c) in s {
                add_into(slot, k, c);
            }
        }
    }
    Ok(out)
}

/// Sets `x_j = 1` for some `j >= 2`, merging terms.
pub fn eval_at_one(a: &Series, j: usize) -> Result<Series> {
    if j < 2 || j > a.vars {
        return Err(MpsError::VarOutOfRange {
            index: j,
            vars: a.vars,
        });
    }
    let mut out = Series::zero(a.vars, a.trunc);
    for (slot, s) in out.slices.iter_mut().zip(&a.slices) {
        for (k, c) in s {
            let mut k = k.clone();
            k[j - 2] = 0;
            add_into(slot, k, c.clone());
        }
    }
    Ok(out)
}
