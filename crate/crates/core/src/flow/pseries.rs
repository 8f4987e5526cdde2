//! Truncated power series in `z` whose coefficients are exact polynomials in
//! a few parameters (`t`, `s`).
//!
//! Truncation is by `z`-degree only: every coefficient of a monomial `z^α`
//! with `|α| <= trunc` is an exact polynomial in the parameters. All objects
//! of the deformation family are of this kind, because the `t`-degree of the
//! `z^α` coefficient is bounded by `|α|`.

use std::collections::{BTreeMap, HashMap};

use num::Zero;

use crate::rat::Rat;
use crate::series::{Exponent, MSeries, PolyMap};
use crate::tpoly::TPoly;

/// A polynomial in the parameters: an [`MSeries`] known exactly.
pub type ParamPoly = MSeries;

fn exact(p: MSeries) -> MSeries {
    p.promote_trunc(u32::MAX)
}

fn poly_const(p: usize, c: Rat) -> ParamPoly {
    MSeries::constant(p, u32::MAX, c)
}

fn same_poly(a: &ParamPoly, b: &ParamPoly) -> bool {
    a.terms().eq(b.terms())
}

/// Restricts a parameter polynomial to monomials with `deg_j <= caps[j]`.
fn clip(p: &ParamPoly, caps: Option<&[u32]>) -> ParamPoly {
    match caps {
        None => p.clone(),
        Some(caps) => {
            let terms = p
                .terms()
                .filter(|(e, _)| e.as_slice().iter().zip(caps).all(|(k, c)| k <= c))
                .map(|(e, c)| (e.as_slice().iter().map(|&k| k as i64).collect(), c.clone()));
            MSeries::from_terms(p.nvars(), u32::MAX, terms).expect("valid exponents")
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PSeries {
    n: usize,
    p: usize,
    trunc: u32,
    terms: BTreeMap<Exponent, ParamPoly>,
}

impl PSeries {
    pub fn zero(n: usize, p: usize, trunc: u32) -> Self {
        PSeries {
            n,
            p,
            trunc,
            terms: BTreeMap::new(),
        }
    }

    /// Embeds a parameter-free series.
    pub fn from_series(s: &MSeries, p: usize) -> Self {
        let mut out = PSeries::zero(s.nvars(), p, s.trunc());
        for (e, c) in s.terms() {
            out.terms.insert(e.clone(), poly_const(p, c.clone()));
        }
        out
    }

    /// The constant series with value the parameter polynomial `c`.
    pub fn constant(n: usize, trunc: u32, c: ParamPoly) -> Self {
        let p = c.nvars();
        let mut out = PSeries::zero(n, p, trunc);
        out.insert(Exponent::zero(n), c);
        out
    }

    /// The parameter `j` as a constant series.
    pub fn param(n: usize, p: usize, j: usize, trunc: u32) -> Self {
        PSeries::constant(n, trunc, MSeries::var(p, j, u32::MAX))
    }

    fn insert(&mut self, e: Exponent, c: ParamPoly) {
        if e.degree() > self.trunc {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                let sum = exact(&*v + &c);
                if sum.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *v = sum;
                }
            }
            None => {
                if !c.is_zero() {
                    self.terms.insert(e, exact(c));
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn nparams(&self) -> usize {
        self.p
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &ParamPoly)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &Exponent) -> ParamPoly {
        self.terms
            .get(e)
            .cloned()
            .unwrap_or_else(|| MSeries::zero(self.p, u32::MAX))
    }

    /// The coefficient of `z^e` as a polynomial in the single parameter.
    pub fn tpoly(&self, e: &Exponent) -> TPoly {
        assert_eq!(self.p, 1, "tpoly needs exactly one parameter");
        let c = self.coeff(e);
        let deg = c.max_degree().unwrap_or(0) as usize;
        TPoly::new((0..=deg).map(|k| c.coeff_of(&[k as u32])).collect())
    }

    pub fn order(&self) -> Option<u32> {
        self.terms.keys().next().map(Exponent::degree)
    }

    pub fn certified_order(&self) -> u32 {
        self.order().unwrap_or(self.trunc.saturating_add(1))
    }

    pub fn truncate(&self, d: u32) -> PSeries {
        let d = d.min(self.trunc);
        PSeries {
            n: self.n,
            p: self.p,
            trunc: d,
            terms: self
                .terms
                .iter()
                .take_while(|(e, _)| e.degree() <= d)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn add(&self, other: &PSeries) -> PSeries {
        assert_eq!((self.n, self.p), (other.n, other.p), "shape mismatch");
        let mut out = self.truncate(other.trunc);
        for (e, c) in &other.terms {
            out.insert(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> PSeries {
        self.map_coeffs(|c| -c)
    }

    pub fn sub(&self, other: &PSeries) -> PSeries {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rat) -> PSeries {
        self.map_coeffs(|p| p.scale(c))
    }

    /// Multiplies every coefficient by the parameter polynomial `c`.
    pub fn mul_poly(&self, c: &ParamPoly) -> PSeries {
        self.map_coeffs(|p| p.mul_to(c, u32::MAX))
    }

    /// Applies `f` to every coefficient; zero results are dropped.
    pub fn map_coeffs(&self, f: impl Fn(&ParamPoly) -> ParamPoly) -> PSeries {
        let mut out = PSeries::zero(
            self.n,
            f(&MSeries::zero(self.p, u32::MAX)).nvars(),
            self.trunc,
        );
        for (e, c) in &self.terms {
            let v = exact(f(c));
            if !v.is_zero() {
                out.p = v.nvars();
                out.terms.insert(e.clone(), v);
            }
        }
        out
    }

    /// Product through `z`-degree `cap` (or the certified degree, if lower).
    pub fn mul_to(&self, other: &PSeries, cap: u32) -> PSeries {
        assert_eq!((self.n, self.p), (other.n, other.p), "shape mismatch");
        let trunc = self
            .trunc
            .saturating_add(other.certified_order())
            .min(other.trunc.saturating_add(self.certified_order()))
            .min(cap);
        let mut acc: HashMap<Exponent, ParamPoly> = HashMap::new();
        for (ea, ca) in &self.terms {
            let da = ea.degree();
            if da > trunc {
                break;
            }
            for (eb, cb) in &other.terms {
                if da + eb.degree() > trunc {
                    break;
                }
                let prod = ca.mul_to(cb, u32::MAX);
                let key = ea.add(eb);
                match acc.get_mut(&key) {
                    Some(v) => *v = &*v + &prod,
                    None => {
                        acc.insert(key, prod);
                    }
                }
            }
        }
        PSeries {
            n: self.n,
            p: self.p,
            trunc,
            terms: acc
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(e, c)| (e, exact(c)))
                .collect(),
        }
    }

    /// `∂/∂z_i`.
    pub fn partial_diff(&self, i: usize) -> PSeries {
        let mut out = PSeries::zero(self.n, self.p, self.trunc.saturating_sub(1));
        for (e, c) in &self.terms {
            let k = e.get(i);
            if k > 0 {
                out.insert(e.with(i, k - 1), c.scale(&Rat::from_integer(k.into())));
            }
        }
        out
    }

    /// `∂/∂(parameter j)`.
    pub fn param_diff(&self, j: usize) -> PSeries {
        self.map_coeffs(|c| c.partial_diff(j))
    }

    /// Specializes the parameters to the given values.
    pub fn eval_params(&self, values: &[Rat]) -> MSeries {
        assert_eq!(values.len(), self.p);
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                (
                    e.as_slice().iter().map(|&k| k as i64).collect::<Vec<_>>(),
                    c.eval_polynomial(values),
                )
            })
            .filter(|(_, c)| !c.is_zero());
        MSeries::from_terms(self.n, self.trunc, terms).expect("valid exponents")
    }

    /// The first `z`-exponent (through degree `d`) at which the coefficients
    /// differ, optionally comparing only parameter monomials within `caps`.
    pub fn first_difference(
        &self,
        other: &PSeries,
        d: u32,
        caps: Option<&[u32]>,
    ) -> Option<(Exponent, ParamPoly, ParamPoly)> {
        let mut keys: Vec<&Exponent> = self
            .terms
            .keys()
            .chain(other.terms.keys())
            .filter(|e| e.degree() <= d)
            .collect();
        keys.sort();
        keys.dedup();
        for e in keys {
            let a = clip(&self.coeff(e), caps);
            let b = clip(&other.coeff(e), caps);
            if !same_poly(&a, &b) {
                return Some((e.clone(), a, b));
            }
        }
        None
    }
}

/// A map `(P_1, ..., P_m)` of parameter series sharing `n` variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PMap {
    n: usize,
    p: usize,
    comps: Vec<PSeries>,
}

impl PMap {
    pub fn new(comps: Vec<PSeries>) -> Self {
        let (n, p) = comps.first().map(|c| (c.n, c.p)).unwrap_or((0, 0));
        assert!(comps.iter().all(|c| c.n == n && c.p == p), "shape mismatch");
        PMap { n, p, comps }
    }

    pub fn from_polymap(m: &PolyMap, p: usize) -> Self {
        PMap {
            n: m.nvars(),
            p,
            comps: m
                .components()
                .iter()
                .map(|c| PSeries::from_series(c, p))
                .collect(),
        }
    }

    pub fn identity(n: usize, p: usize, trunc: u32) -> Self {
        PMap::from_polymap(&PolyMap::identity(n, trunc), p)
    }

    pub fn zero(n: usize, p: usize, trunc: u32) -> Self {
        PMap {
            n,
            p,
            comps: (0..n).map(|_| PSeries::zero(n, p, trunc)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn nparams(&self) -> usize {
        self.p
    }

    pub fn components(&self) -> &[PSeries] {
        &self.comps
    }

    pub fn component(&self, i: usize) -> &PSeries {
        &self.comps[i]
    }

    pub fn trunc(&self) -> u32 {
        self.comps
            .iter()
            .map(PSeries::trunc)
            .min()
            .unwrap_or(u32::MAX)
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(PSeries::is_zero)
    }

    fn zip(&self, other: &PMap, f: impl Fn(&PSeries, &PSeries) -> PSeries) -> PMap {
        assert_eq!(self.len(), other.len(), "length mismatch");
        PMap::new(
            self.comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| f(a, b))
                .collect(),
        )
    }

    pub fn add(&self, other: &PMap) -> PMap {
        self.zip(other, PSeries::add)
    }

    pub fn sub(&self, other: &PMap) -> PMap {
        self.zip(other, PSeries::sub)
    }

    pub fn map(&self, f: impl Fn(&PSeries) -> PSeries) -> PMap {
        PMap::new(self.comps.iter().map(f).collect())
    }

    pub fn scale(&self, c: &Rat) -> PMap {
        self.map(|s| s.scale(c))
    }

    pub fn mul_poly(&self, c: &ParamPoly) -> PMap {
        self.map(|s| s.mul_poly(c))
    }

    pub fn truncate(&self, d: u32) -> PMap {
        self.map(|s| s.truncate(d))
    }

    pub fn map_coeffs(&self, f: impl Fn(&ParamPoly) -> ParamPoly + Copy) -> PMap {
        self.map(|s| s.map_coeffs(f))
    }

    pub fn param_diff(&self, j: usize) -> PMap {
        self.map(|s| s.param_diff(j))
    }

    pub fn eval_params(&self, values: &[Rat]) -> PolyMap {
        PolyMap::new(self.comps.iter().map(|c| c.eval_params(values)).collect())
            .expect("shared variables")
    }

    /// `self ∘ g` through `z`-degree `cap`. Every component of `g` must have
    /// `z`-order at least 1; the parameters pass through unchanged.
    pub fn compose_to(&self, g: &PMap, cap: u32) -> PMap {
        assert_eq!(self.n, g.len(), "composition shape mismatch");
        let og = g
            .comps
            .iter()
            .map(PSeries::certified_order)
            .min()
            .unwrap_or(u32::MAX);
        assert!(og >= 1, "inner map has a constant term");
        let gt = g.trunc();
        let trunc = self
            .comps
            .iter()
            .map(|f| {
                let k0 = f
                    .terms
                    .keys()
                    .map(Exponent::degree)
                    .find(|&d| d > 0)
                    .unwrap_or(f.trunc.saturating_add(1));
                let from_f = (f.trunc as u64 + 1) * og as u64 - 1;
                let from_g = gt as u64 + (k0 as u64 - 1) * og as u64;
                from_f.min(from_g)
            })
            .min()
            .unwrap_or(cap as u64)
            .min(cap as u64) as u32;
        let mut powers: HashMap<Exponent, PSeries> = HashMap::new();
        let comps = self
            .comps
            .iter()
            .map(|f| {
                let mut acc = PSeries::zero(g.n, self.p, trunc);
                for (alpha, c) in &f.terms {
                    if alpha.degree() as u64 * og as u64 > trunc as u64 {
                        break;
                    }
                    let pw = power(g, alpha, trunc, &mut powers);
                    for (e, v) in &pw.terms {
                        acc.insert(e.clone(), c.mul_to(v, u32::MAX));
                    }
                }
                acc
            })
            .collect();
        PMap {
            n: g.n,
            p: self.p,
            comps,
        }
    }

    /// Jacobian in the `z` variables.
    pub fn jacobian(&self) -> PMatrix {
        let mut entries = Vec::with_capacity(self.len() * self.n);
        for c in &self.comps {
            for j in 0..self.n {
                entries.push(c.partial_diff(j));
            }
        }
        PMatrix {
            rows: self.len(),
            cols: self.n,
            entries,
        }
    }

    pub fn first_difference(
        &self,
        other: &PMap,
        d: u32,
        caps: Option<&[u32]>,
    ) -> Option<(usize, Exponent, ParamPoly, ParamPoly)> {
        self.comps
            .iter()
            .zip(&other.comps)
            .enumerate()
            .find_map(|(i, (a, b))| a.first_difference(b, d, caps).map(|(e, x, y)| (i, e, x, y)))
    }
}

fn power(g: &PMap, alpha: &Exponent, cap: u32, memo: &mut HashMap<Exponent, PSeries>) -> PSeries {
    if let Some(p) = memo.get(alpha) {
        return p.clone();
    }
    let p = match alpha.as_slice().iter().rposition(|&k| k > 0) {
        None => PSeries::constant(g.n, cap, poly_const(g.p, Rat::from_integer(1.into()))),
        Some(j) => power(g, &alpha.with(j, alpha.get(j) - 1), cap, memo).mul_to(&g.comps[j], cap),
    };
    memo.insert(alpha.clone(), p.clone());
    p
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<PSeries>,
}

impl PMatrix {
    pub fn identity(k: usize, n: usize, p: usize, trunc: u32) -> Self {
        let one = PSeries::constant(n, trunc, poly_const(p, Rat::from_integer(1.into())));
        let zero = PSeries::zero(n, p, trunc);
        let entries = (0..k * k)
            .map(|idx| {
                if idx / k == idx % k {
                    one.clone()
                } else {
                    zero.clone()
                }
            })
            .collect();
        PMatrix {
            rows: k,
            cols: k,
            entries,
        }
    }

    pub fn get(&self, i: usize, j: usize) -> &PSeries {
        &self.entries[i * self.cols + j]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(PSeries::is_zero)
    }

    pub fn map(&self, f: impl Fn(&PSeries) -> PSeries) -> PMatrix {
        PMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn add(&self, other: &PMatrix) -> PMatrix {
        PMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn mul_to(&self, other: &PMatrix, cap: u32) -> PMatrix {
        assert_eq!(self.cols, other.rows);
        let mut entries = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc: Option<PSeries> = None;
                for k in 0..self.cols {
                    let p = self.get(i, k).mul_to(other.get(k, j), cap);
                    acc = Some(match acc {
                        Some(a) => a.add(&p),
                        None => p,
                    });
                }
                entries.push(acc.expect("non-empty inner dimension"));
            }
        }
        PMatrix {
            rows: self.rows,
            cols: other.cols,
            entries,
        }
    }

    /// `M · v` through `cap`.
    pub fn mul_vec(&self, v: &PMap, cap: u32) -> PMap {
        assert_eq!(self.cols, v.len());
        let comps = (0..self.rows)
            .map(|i| {
                (1..self.cols).fold(self.get(i, 0).mul_to(v.component(0), cap), |acc, k| {
                    acc.add(&self.get(i, k).mul_to(v.component(k), cap))
                })
            })
            .collect();
        PMap::new(comps)
    }

    /// Entry-wise `M(g)`.
    pub fn compose_to(&self, g: &PMap, cap: u32) -> PMatrix {
        let as_map = PMap::new(self.entries.clone()).compose_to(g, cap);
        PMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: as_map.comps,
        }
    }

    /// Smallest `k` in `1..=max_k` with `M^k = 0` through `cap`.
    pub fn nilpotency_index(&self, max_k: u32, cap: u32) -> Option<u32> {
        let mut p = self.map(|e| e.truncate(cap));
        for k in 1..=max_k {
            if p.is_zero() {
                return Some(k);
            }
            p = p.mul_to(self, cap);
        }
        None
    }

    pub fn first_difference(&self, other: &PMatrix, d: u32) -> Option<(usize, usize, Exponent)> {
        self.entries
            .iter()
            .zip(&other.entries)
            .enumerate()
            .find_map(|(idx, (a, b))| {
                a.first_difference(b, d, None)
                    .map(|(e, _, _)| (idx / self.cols + 1, idx % self.cols + 1, e))
            })
    }
}

/// `c · t^k` in parameter `j` of `p`.
pub fn param_monomial(p: usize, j: usize, k: u32, c: Rat) -> ParamPoly {
    MSeries::monomial(p, u32::MAX, Exponent::zero(p).with(j, k), c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn t_series() -> PMap {
        // (z + t z^2) in one variable, one parameter.
        let mut s = PSeries::from_series(&MSeries::var(1, 0, 6), 1);
        s = s.add(
            &PSeries::from_series(&MSeries::from_terms(1, 6, [(vec![2], rat(1))]).unwrap(), 1)
                .mul_poly(&MSeries::var(1, 0, u32::MAX)),
        );
        PMap::new(vec![s])
    }

    #[test]
    fn composition_commutes_with_specialization() {
        let g = t_series();
        let f = g.compose_to(&g, 6);
        for t in [rat(0), rat(1), rat(-2)] {
            let gt = g.eval_params(std::slice::from_ref(&t));
            let want = gt.compose_to(&gt, 6).unwrap();
            assert!(f.eval_params(&[t]).agrees_through(&want, 6));
        }
    }

    #[test]
    fn tpoly_coefficients() {
        let g = t_series();
        let sq = g.component(0).mul_to(g.component(0), 4);
        // (z + t z^2)^2 = z^2 + 2t z^3 + t^2 z^4
        assert_eq!(
            sq.tpoly(&Exponent::new([3])),
            TPoly::new(vec![rat(0), rat(2)])
        );
        assert_eq!(
            sq.tpoly(&Exponent::new([4])),
            TPoly::new(vec![rat(0), rat(0), rat(1)])
        );
        let dt = sq.param_diff(0);
        assert_eq!(
            dt.tpoly(&Exponent::new([4])),
            TPoly::new(vec![rat(0), rat(2)])
        );
    }

    #[test]
    fn box_comparison() {
        let a = t_series();
        let b = a.add(&PMap::new(vec![PSeries::constant(
            1,
            6,
            param_monomial(1, 0, 3, rat(1)),
        )
        .mul_to(&PSeries::from_series(&MSeries::var(1, 0, 6), 1), 6)]));
        assert!(a.first_difference(&b, 6, Some(&[2])).is_none());
        assert!(a.first_difference(&b, 6, None).is_some());
    }
}
