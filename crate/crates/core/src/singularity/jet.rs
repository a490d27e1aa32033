//! Truncated multivariate Taylor expansions ("jets") of total degree `<= d`.

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use super::scalar::Scalar;

type Mono = SmallVec<[u8; 8]>;

/// Monomial basis in graded order plus the multiplication table, shared by
/// all jets of one shape.
#[derive(Debug)]
pub struct JetSpace {
    vars: usize,
    degree: usize,
    monos: Vec<Mono>,
    index: FxHashMap<Mono, usize>,
    /// `(i, j, k)` with `mono_i * mono_j = mono_k`
    table: Vec<(u32, u32, u32)>,
}

impl JetSpace {
    pub fn new(vars: usize, degree: usize) -> Arc<JetSpace> {
        let mut monos: Vec<Mono> = Vec::new();
        for d in 0..=degree {
            let mut cur = Mono::from_elem(0, vars);
            push_degree(&mut monos, &mut cur, 0, d);
        }
        let index: FxHashMap<Mono, usize> = monos
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        let mut table = Vec::new();
        for (i, a) in monos.iter().enumerate() {
            for (j, b) in monos.iter().enumerate() {
                let sum: Mono = a.iter().zip(b).map(|(x, y)| x + y).collect();
                if let Some(&k) = index.get(&sum) {
                    table.push((i as u32, j as u32, k as u32));
                }
            }
        }
        table.sort_by_key(|&(i, j, k)| (k, i, j));
        Arc::new(JetSpace {
            vars,
            degree,
            monos,
            index,
            table,
        })
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.monos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monos.is_empty()
    }

    pub fn index_of(&self, exps: &[u8]) -> Option<usize> {
        self.index.get(exps).copied()
    }

    pub fn monomial(&self, i: usize) -> &[u8] {
        &self.monos[i]
    }
}

fn push_degree(out: &mut Vec<Mono>, cur: &mut Mono, var: usize, left: usize) {
    if var + 1 == cur.len() {
        cur[var] = left as u8;
        out.push(cur.clone());
        cur[var] = 0;
        return;
    }
    for e in (0..=left).rev() {
        cur[var] = e as u8;
        push_degree(out, cur, var + 1, left - e);
    }
    cur[var] = 0;
}

/// Coefficients of a polynomial in the jet variables, truncated at the space degree.
#[derive(Clone, Debug)]
pub struct Jet<S: Scalar> {
    space: Arc<JetSpace>,
    c: Vec<S>,
}

impl<S: Scalar> Jet<S> {
    pub fn constant(space: &Arc<JetSpace>, v: S) -> Self {
        let mut c = vec![S::zero(); space.len()];
        c[0] = v;
        Jet {
            space: space.clone(),
            c,
        }
    }

    pub fn zero(space: &Arc<JetSpace>) -> Self {
        Self::constant(space, S::zero())
    }

    /// `center + z_var`.
    pub fn var(space: &Arc<JetSpace>, var: usize, center: S) -> Self {
        let mut j = Self::constant(space, center);
        let mut e = Mono::from_elem(0, space.vars);
        e[var] = 1;
        if let Some(i) = space.index_of(&e) {
            j.c[i] = S::one();
        }
        j
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    pub fn value(&self) -> S {
        self.c[0]
    }

    pub fn coeffs(&self) -> &[S] {
        &self.c
    }

    pub fn coeff(&self, exps: &[u8]) -> S {
        self.space
            .index_of(exps)
            .map(|i| self.c[i])
            .unwrap_or_else(S::zero)
    }

    pub fn set_value(&mut self, v: S) {
        self.c[0] = v;
    }

    /// Coefficient of `z_var^power`, as a jet in the remaining variables.
    pub fn coeff_in(&self, var: usize, power: u8) -> Jet<S> {
        let mut out = Jet::zero(&self.space);
        for (i, m) in self.space.monos.iter().enumerate() {
            if m[var] == power && self.c[i] != S::zero() {
                let mut r = m.clone();
                r[var] = 0;
                let k = self.space.index[&r];
                out.c[k] = self.c[i];
            }
        }
        out
    }

    /// Partial derivative in `z_var`; the top degree becomes unknown and is zeroed.
    pub fn diff(&self, var: usize) -> Jet<S> {
        let mut out = Jet::zero(&self.space);
        for (i, m) in self.space.monos.iter().enumerate() {
            let p = m[var];
            if p > 0 && self.c[i] != S::zero() {
                let mut r = m.clone();
                r[var] -= 1;
                let k = self.space.index[&r];
                out.c[k] = self.c[i] * S::from_i64(p as i64);
            }
        }
        out
    }

    /// Drops all terms of total degree above `deg`.
    pub fn truncate(&self, deg: usize) -> Jet<S> {
        let mut out = self.clone();
        for (i, m) in self.space.monos.iter().enumerate() {
            if m.iter().map(|&e| e as usize).sum::<usize>() > deg {
                out.c[i] = S::zero();
            }
        }
        out
    }

    pub fn max_abs(&self) -> S {
        self.c.iter().fold(S::zero(), |m, &x| m.max(x.abs()))
    }

    pub fn scale(&self, s: S) -> Jet<S> {
        Jet {
            space: self.space.clone(),
            c: self.c.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn add_scalar(&self, s: S) -> Jet<S> {
        let mut out = self.clone();
        out.c[0] += s;
        out
    }

    /// `sum_n a[n] (self - self(0))^n`, i.e. composition with a function
    /// whose Taylor coefficients at the value are `a`.
    pub fn compose(&self, a: &[S]) -> Jet<S> {
        let mut h = self.clone();
        h.c[0] = S::zero();
        let top = a.len().min(self.space.degree + 1);
        let mut out = Jet::constant(&self.space, a[top - 1]);
        for n in (0..top - 1).rev() {
            out = &out * &h;
            out.c[0] += a[n];
        }
        out
    }

    pub fn exp(&self) -> Jet<S> {
        let e0 = self.value().exp();
        let mut a = Vec::with_capacity(self.space.degree + 1);
        let mut f = e0;
        for n in 0..=self.space.degree {
            if n > 0 {
                f /= S::from_i64(n as i64);
            }
            a.push(f);
        }
        self.compose(&a)
    }

    pub fn ln(&self) -> Jet<S> {
        let v = self.value();
        let mut a = vec![v.ln()];
        let mut p = S::one();
        for n in 1..=self.space.degree {
            p /= v;
            let sign = if n % 2 == 1 { S::one() } else { -S::one() };
            a.push(sign * p / S::from_i64(n as i64));
        }
        self.compose(&a)
    }

    pub fn recip(&self) -> Jet<S> {
        let v = self.value();
        let inv = v.recip();
        let mut a = Vec::with_capacity(self.space.degree + 1);
        let mut p = inv;
        for n in 0..=self.space.degree {
            a.push(if n % 2 == 0 { p } else { -p });
            p *= inv;
        }
        self.compose(&a)
    }

    /// `self^alpha` for a positive value.
    pub fn powf(&self, alpha: S) -> Jet<S> {
        let v = self.value();
        let mut a = Vec::with_capacity(self.space.degree + 1);
        let mut coef = v.powf(alpha);
        for n in 0..=self.space.degree {
            a.push(coef);
            let nn = S::from_i64(n as i64);
            coef = coef * (alpha - nn) / ((nn + S::one()) * v);
        }
        self.compose(&a)
    }

    pub fn powi(&self, n: i32) -> Jet<S> {
        if n < 0 {
            return self.recip().powi(-n);
        }
        let mut base = self.clone();
        let mut e = n as u32;
        let mut acc = Jet::constant(&self.space, S::one());
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn div(&self, other: &Jet<S>) -> Jet<S> {
        self * &other.recip()
    }
}

impl<S: Scalar> Add for &Jet<S> {
    type Output = Jet<S>;
    fn add(self, b: &Jet<S>) -> Jet<S> {
        Jet {
            space: self.space.clone(),
            c: self.c.iter().zip(&b.c).map(|(&x, &y)| x + y).collect(),
        }
    }
}

impl<S: Scalar> Sub for &Jet<S> {
    type Output = Jet<S>;
    fn sub(self, b: &Jet<S>) -> Jet<S> {
        Jet {
            space: self.space.clone(),
            c: self.c.iter().zip(&b.c).map(|(&x, &y)| x - y).collect(),
        }
    }
}

impl<S: Scalar> Neg for &Jet<S> {
    type Output = Jet<S>;
    fn neg(self) -> Jet<S> {
        Jet {
            space: self.space.clone(),
            c: self.c.iter().map(|&x| -x).collect(),
        }
    }
}

impl<S: Scalar> Mul for &Jet<S> {
    type Output = Jet<S>;
    fn mul(self, b: &Jet<S>) -> Jet<S> {
        let zero = S::zero();
        let mut c = vec![zero; self.c.len()];
        for &(i, j, k) in &self.space.table {
            let (x, y) = (self.c[i as usize], b.c[j as usize]);
            if x != zero && y != zero {
                c[k as usize] += x * y;
            }
        }
        Jet {
            space: self.space.clone(),
            c,
        }
    }
}
