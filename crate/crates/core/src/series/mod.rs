//! Sparse multivariate truncated power series over ℚ.
//!
//! An [`MSeries`] with truncation degree `D` stores every term of total
//! degree `<= D` exactly; nothing is known about higher degrees. Operations
//! return the largest truncation degree they can certify from the orders and
//! truncations of their inputs, optionally capped by the caller.

mod laurent;
mod map;
mod matrix;

pub use laurent::{laurent_inv_power, residue, LaurentExpr};
pub(crate) use map::divide_by_coordinates;
pub use map::{MapF, PolyMap};
pub use matrix::SeriesMatrix;

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, One, Signed, Zero};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::rat::Rat;

/// A multi-index of non-negative exponents.
///
/// Ordered graded-lexicographically: lower total degree first, then `z1`
/// before `z2` within a degree.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Exponent(SmallVec<[u32; 4]>);

impl Exponent {
    pub fn new(exps: impl IntoIterator<Item = u32>) -> Self {
        Exponent(exps.into_iter().collect())
    }

    pub fn zero(n: usize) -> Self {
        Exponent(SmallVec::from_elem(0, n))
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = Self::zero(n);
        e.0[i] = 1;
        e
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn add(&self, other: &Exponent) -> Exponent {
        Exponent(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn checked_sub(&self, other: &Exponent) -> Option<Exponent> {
        let mut out = SmallVec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            out.push(a.checked_sub(*b)?);
        }
        Some(Exponent(out))
    }

    pub fn with(&self, i: usize, value: u32) -> Exponent {
        let mut e = self.clone();
        e.0[i] = value;
        e
    }

    /// `m!` for a multi-index: the product of the factorials of the entries.
    pub fn factorial(&self) -> BigInt {
        self.0
            .iter()
            .fold(BigInt::one(), |acc, &k| acc * crate::rat::factorial(k))
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All exponents in `n` variables of total degree exactly `d`, in graded order.
pub fn exponents_of_degree(n: usize, d: u32) -> Vec<Exponent> {
    fn rec(n: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Exponent>) {
        if prefix.len() + 1 == n {
            prefix.push(left);
            out.push(Exponent::new(prefix.iter().copied()));
            prefix.pop();
            return;
        }
        for k in (0..=left).rev() {
            prefix.push(k);
            rec(n, left - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if d == 0 {
            out.push(Exponent::zero(0));
        }
        return out;
    }
    rec(n, d, &mut Vec::with_capacity(n), &mut out);
    out
}

/// A truncated power series in `n` variables with rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MSeries {
    n: usize,
    trunc: u32,
    terms: BTreeMap<Exponent, Rat>,
}

impl MSeries {
    pub fn zero(n: usize, trunc: u32) -> Self {
        MSeries {
            n,
            trunc,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, trunc: u32, c: Rat) -> Self {
        let mut s = Self::zero(n, trunc);
        if !c.is_zero() {
            s.terms.insert(Exponent::zero(n), c);
        }
        s
    }

    pub fn one(n: usize, trunc: u32) -> Self {
        Self::constant(n, trunc, Rat::one())
    }

    /// The coordinate function `z_i` (0-based).
    pub fn var(n: usize, i: usize, trunc: u32) -> Self {
        Self::monomial(n, trunc, Exponent::unit(n, i), Rat::one())
    }

    pub fn monomial(n: usize, trunc: u32, exp: Exponent, c: Rat) -> Self {
        assert_eq!(exp.len(), n, "exponent length must match variable count");
        let mut s = Self::zero(n, trunc);
        if !c.is_zero() && exp.degree() <= trunc {
            s.terms.insert(exp, c);
        }
        s
    }

    /// Builds a normalized series: duplicate exponents are summed and zero
    /// coefficients dropped.
    pub fn from_terms<I>(n: usize, trunc: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i64>, Rat)>,
    {
        let mut s = Self::zero(n, trunc);
        for (exp, c) in terms {
            if exp.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: exp.len(),
                });
            }
            if let Some(&neg) = exp.iter().find(|&&e| e < 0) {
                return Err(Error::NegativeExponent { exp: neg });
            }
            let exp = Exponent::new(exp.iter().map(|&e| e as u32));
            let degree = exp.degree();
            if degree > trunc {
                return Err(Error::DegreeExceedsTrunc { degree, trunc });
            }
            s.add_term(exp, c);
        }
        Ok(s)
    }

    pub(crate) fn add_term(&mut self, exp: Exponent, c: Rat) {
        if exp.degree() > self.trunc || c.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Rat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exp: &Exponent) -> Rat {
        self.terms.get(exp).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn coeff_of(&self, exp: &[u32]) -> Rat {
        self.coeff(&Exponent::new(exp.iter().copied()))
    }

    pub fn constant_term(&self) -> Rat {
        self.coeff(&Exponent::zero(self.n))
    }

    /// Minimal total degree of a nonzero term; `None` stands for `+∞`.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().next().map(Exponent::degree)
    }

    /// A lower bound on the true order: the order if some term is stored,
    /// otherwise `trunc + 1`.
    pub fn certified_order(&self) -> u32 {
        self.order().unwrap_or(self.trunc.saturating_add(1))
    }

    /// Largest total degree of a stored term.
    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Exponent::degree)
    }

    pub fn truncate(&self, d: u32) -> MSeries {
        let d = d.min(self.trunc);
        MSeries {
            n: self.n,
            trunc: d,
            terms: self
                .terms
                .iter()
                .take_while(|(e, _)| e.degree() <= d)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Reinterprets the stored terms as an exact polynomial known through
    /// degree `d` (all terms between the old and new bound are zero).
    pub fn promote_trunc(mut self, d: u32) -> MSeries {
        self.trunc = self.trunc.max(d);
        self
    }

    /// Sets the truncation degree, dropping terms above it. Unlike
    /// [`MSeries::truncate`] this may raise the bound, which asserts the
    /// series is a polynomial of degree `<= d`.
    pub fn with_trunc(&self, d: u32) -> MSeries {
        if d <= self.trunc {
            self.truncate(d)
        } else {
            self.clone().promote_trunc(d)
        }
    }

    pub fn homogeneous_part(&self, k: u32) -> MSeries {
        MSeries {
            n: self.n,
            trunc: self.trunc,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.degree() == k)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// `Some(d)` if every stored term has total degree `d`; `None` for the
    /// zero series or mixed degrees.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let lo = self.order()?;
        (self.max_degree()? == lo).then_some(lo)
    }

    /// Embeds into a series ring with `extra` additional trailing variables.
    pub fn extend_vars(&self, extra: usize) -> MSeries {
        MSeries {
            n: self.n + extra,
            trunc: self.trunc,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut v = e.0.clone();
                    v.extend(std::iter::repeat_n(0, extra));
                    (Exponent(v), c.clone())
                })
                .collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> MSeries {
        if c.is_zero() {
            return MSeries::zero(self.n, self.trunc);
        }
        MSeries {
            n: self.n,
            trunc: self.trunc,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// Multiplies by the monomial `z^exp`; terms pushed past the truncation
    /// degree are dropped and the bound is raised by `deg(exp)`.
    pub fn shift(&self, exp: &Exponent) -> MSeries {
        MSeries {
            n: self.n,
            trunc: self.trunc + exp.degree(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.add(exp), c.clone()))
                .collect(),
        }
    }

    fn check_dims(&self, other: &MSeries) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &MSeries) -> Result<MSeries> {
        self.check_dims(other)?;
        let trunc = self.trunc.min(other.trunc);
        let mut out = self.truncate(trunc);
        for (e, c) in other.terms.iter().take_while(|(e, _)| e.degree() <= trunc) {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &MSeries) -> Result<MSeries> {
        self.try_add(&-other)
    }

    /// Product with the certified truncation degree
    /// `min(a.trunc + o(b), b.trunc + o(a))`.
    pub fn try_mul(&self, other: &MSeries) -> Result<MSeries> {
        self.check_dims(other)?;
        Ok(self.mul_to(other, u32::MAX))
    }

    /// Product computed only through degree `cap` (or the certified degree,
    /// if smaller).
    pub fn mul_to(&self, other: &MSeries, cap: u32) -> MSeries {
        assert_eq!(self.n, other.n, "series dimension mismatch");
        let trunc = (self.trunc.saturating_add(other.certified_order()))
            .min(other.trunc.saturating_add(self.certified_order()))
            .min(cap);
        if self.is_zero() || other.is_zero() {
            return MSeries::zero(self.n, trunc);
        }
        // Iterate the shorter series in the outer loop.
        let (a, b) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let b_terms: Vec<(&Exponent, u32, &Rat)> =
            b.terms.iter().map(|(e, c)| (e, e.degree(), c)).collect();
        let mut acc: HashMap<Exponent, Rat> = HashMap::new();
        for (ea, ca) in &a.terms {
            let da = ea.degree();
            if da > trunc {
                break;
            }
            let limit = trunc - da;
            for (eb, db, cb) in &b_terms {
                if *db > limit {
                    break;
                }
                let prod = ca * *cb;
                match acc.entry(ea.add(eb)) {
                    std::collections::hash_map::Entry::Vacant(v) => {
                        v.insert(prod);
                    }
                    std::collections::hash_map::Entry::Occupied(mut o) => {
                        *o.get_mut() += prod;
                    }
                }
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        MSeries {
            n: self.n,
            trunc,
            terms,
        }
    }

    /// Non-negative integer power, computed through degree `cap`.
    pub fn pow_to(&self, k: u32, cap: u32) -> MSeries {
        let mut acc = MSeries::one(self.n, cap);
        let mut base = self.truncate(cap);
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul_to(&base, cap);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul_to(&base, cap);
            }
        }
        acc
    }

    /// `∂/∂z_i` (0-based `i`); exact through degree `trunc - 1`.
    pub fn partial_diff(&self, i: usize) -> MSeries {
        assert!(i < self.n, "variable index out of range");
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let k = e.0[i];
            if k == 0 {
                continue;
            }
            terms.insert(e.with(i, k - 1), c * Rat::from_integer(BigInt::from(k)));
        }
        MSeries {
            n: self.n,
            trunc: self.trunc.saturating_sub(1),
            terms,
        }
    }

    /// Applies `∂^m` for a multi-index `m`.
    pub fn partial_diff_multi(&self, m: &Exponent) -> MSeries {
        let mut out = self.clone();
        for (i, &k) in m.as_slice().iter().enumerate() {
            for _ in 0..k {
                out = out.partial_diff(i);
            }
        }
        out
    }

    /// `∂/∂z_i` with a checked index.
    pub fn try_partial_diff(&self, i: usize) -> Result<MSeries> {
        if i >= self.n {
            return Err(Error::VariableOutOfRange {
                index: i,
                n: self.n,
            });
        }
        Ok(self.partial_diff(i))
    }

    /// Substitutes `z := g(z)`; see [`MSeries::compose_to`].
    pub fn compose(&self, g: &PolyMap) -> Result<MSeries> {
        self.compose_to(g, u32::MAX)
    }

    /// `f(g_1, ..., g_n)` computed through degree `cap` or the certified
    /// degree, whichever is smaller.
    ///
    /// Monomial products `g^α` are built incrementally from `g^(α - e_j)` and
    /// memoized, so each power of `g` is computed once.
    pub fn compose_to(&self, g: &PolyMap, cap: u32) -> Result<MSeries> {
        let mut memo = ComposeMemo::new(g, cap)?;
        if self.n != g.len() {
            return Err(Error::DimensionMismatch {
                expected: g.len(),
                got: self.n,
            });
        }
        let trunc = memo.certified_trunc(self).min(cap);
        memo.cap = trunc;
        Ok(memo.apply(self))
    }

    /// Multiplicative inverse of a series with nonzero constant term.
    pub fn inverse(&self) -> Result<MSeries> {
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(Error::NotAUnit);
        }
        let d = self.trunc;
        let c0_inv = c0.recip();
        // 1/f = c0^-1 * Σ_k (-u)^k with u = f/c0 - 1, o(u) >= 1.
        let mut u = self.scale(&c0_inv);
        u.add_term(Exponent::zero(self.n), -Rat::one());
        let neg_u = -&u;
        let mut acc = MSeries::one(self.n, d);
        let mut power = MSeries::one(self.n, d);
        for _ in 0..d {
            power = power.mul_to(&neg_u, d);
            if power.is_zero() {
                break;
            }
            acc = &acc + &power;
        }
        Ok(acc.scale(&c0_inv))
    }

    pub fn map_coeffs(&self, f: impl Fn(&Rat) -> Rat) -> MSeries {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e.clone(), f(c)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        MSeries {
            n: self.n,
            trunc: self.trunc,
            terms,
        }
    }

    /// Evaluates the stored terms at a point (meaningful for polynomials).
    pub fn eval_polynomial(&self, point: &[Rat]) -> Rat {
        assert_eq!(point.len(), self.n, "point dimension mismatch");
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            let mut v = c.clone();
            for (x, &k) in point.iter().zip(e.as_slice()) {
                if k > 0 {
                    v *= num::pow::pow(x.clone(), k as usize);
                }
            }
            acc += v;
        }
        acc
    }

    /// Equality of coefficients through degree `d` (truncations ignored).
    pub fn agrees_through(&self, other: &MSeries, d: u32) -> bool {
        self.first_difference(other, d).is_none()
    }

    /// The lowest exponent (graded order) through degree `d` at which the two
    /// series differ, with both coefficients.
    pub fn first_difference(&self, other: &MSeries, d: u32) -> Option<(Exponent, Rat, Rat)> {
        let a = self.terms.iter().take_while(|(e, _)| e.degree() <= d);
        let b = other.terms.iter().take_while(|(e, _)| e.degree() <= d);
        let mut a = a.peekable();
        let mut b = b.peekable();
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => return None,
                (Some((ea, ca)), None) => return Some(((*ea).clone(), (*ca).clone(), Rat::zero())),
                (None, Some((eb, cb))) => return Some(((*eb).clone(), Rat::zero(), (*cb).clone())),
                (Some((ea, ca)), Some((eb, cb))) => match ea.cmp(eb) {
                    Ordering::Less => return Some(((*ea).clone(), (*ca).clone(), Rat::zero())),
                    Ordering::Greater => return Some(((*eb).clone(), Rat::zero(), (*cb).clone())),
                    Ordering::Equal => {
                        if ca != cb {
                            return Some(((*ea).clone(), (*ca).clone(), (*cb).clone()));
                        }
                        a.next();
                        b.next();
                    }
                },
            }
        }
    }

    /// Renders with the given variable names.
    pub fn display_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = monomial_string(e, names);
            if mono.is_empty() {
                out.push_str(&abs.to_string());
            } else if abs.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{abs}*{mono}"));
            }
        }
        out
    }
}

pub fn default_var_names(n: usize) -> Vec<String> {
    if n == 1 {
        vec!["z".to_string()]
    } else {
        (1..=n).map(|i| format!("z{i}")).collect()
    }
}

fn monomial_string(e: &Exponent, names: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, &k) in e.as_slice().iter().enumerate() {
        match k {
            0 => {}
            1 => parts.push(names[i].clone()),
            _ => parts.push(format!("{}^{}", names[i], k)),
        }
    }
    parts.join("*")
}

impl fmt::Display for MSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&default_var_names(self.n)))
    }
}

/// Shared state for substituting into many series with the same map.
pub(crate) struct ComposeMemo<'a> {
    g: &'a PolyMap,
    cap: u32,
    og: u32,
    gt: u32,
    powers: HashMap<Exponent, MSeries>,
}

impl<'a> ComposeMemo<'a> {
    pub(crate) fn new(g: &'a PolyMap, cap: u32) -> Result<Self> {
        let mut og = u32::MAX;
        let mut gt = u32::MAX;
        for (i, gi) in g.components().iter().enumerate() {
            let o = gi.certified_order();
            if o == 0 {
                return Err(Error::NonzeroConstantTerm { index: i });
            }
            og = og.min(o);
            gt = gt.min(gi.trunc());
        }
        Ok(ComposeMemo {
            g,
            cap,
            og,
            gt,
            powers: HashMap::new(),
        })
    }

    pub(crate) fn certified_trunc(&self, f: &MSeries) -> u32 {
        if self.g.is_empty() {
            return f.trunc;
        }
        let k0 = f
            .terms
            .keys()
            .map(Exponent::degree)
            .find(|&d| d > 0)
            .unwrap_or(f.trunc.saturating_add(1));
        let from_f = (f.trunc as u64 + 1) * self.og as u64 - 1;
        let from_g = self.gt as u64 + (k0 as u64 - 1) * self.og as u64;
        from_f.min(from_g).min(u32::MAX as u64) as u32
    }

    fn power(&mut self, alpha: &Exponent) -> MSeries {
        if let Some(p) = self.powers.get(alpha) {
            return p.clone();
        }
        let n = self.g.nvars();
        let p = match alpha.as_slice().iter().rposition(|&k| k > 0) {
            None => MSeries::one(n, self.cap),
            Some(j) => {
                let prev = self.power(&alpha.with(j, alpha.get(j) - 1));
                prev.mul_to(&self.g.components()[j], self.cap)
            }
        };
        self.powers.insert(alpha.clone(), p.clone());
        p
    }

    pub(crate) fn apply(&mut self, f: &MSeries) -> MSeries {
        let n = self.g.nvars();
        let cap = self.cap;
        let mut acc: HashMap<Exponent, Rat> = HashMap::new();
        for (alpha, c) in &f.terms {
            if alpha.degree() as u64 * self.og as u64 > cap as u64 {
                break;
            }
            let p = self.power(alpha);
            for (e, v) in p.terms.iter().take_while(|(e, _)| e.degree() <= cap) {
                *acc.entry(e.clone()).or_insert_with(Rat::zero) += c * v;
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        MSeries {
            n,
            trunc: cap,
            terms,
        }
    }
}

impl Add for &MSeries {
    type Output = MSeries;
    fn add(self, rhs: &MSeries) -> MSeries {
        self.try_add(rhs).expect("series dimension mismatch")
    }
}

impl Sub for &MSeries {
    type Output = MSeries;
    fn sub(self, rhs: &MSeries) -> MSeries {
        self.try_sub(rhs).expect("series dimension mismatch")
    }
}

impl Mul for &MSeries {
    type Output = MSeries;
    fn mul(self, rhs: &MSeries) -> MSeries {
        self.try_mul(rhs).expect("series dimension mismatch")
    }
}

impl Neg for &MSeries {
    type Output = MSeries;
    fn neg(self) -> MSeries {
        MSeries {
            n: self.n,
            trunc: self.trunc,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}
