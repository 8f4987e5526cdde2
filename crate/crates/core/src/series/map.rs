use std::fmt;

use num::{One, Zero};

use super::{ComposeMemo, Exponent, MSeries, SeriesMatrix};
use crate::error::{Error, Result};
use crate::rat::Rat;

/// A tuple of series sharing one variable set.
///
/// Self-maps have as many components as variables; maps carrying extra
/// parameter variables (such as `t`) have fewer components than variables.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PolyMap {
    nvars: usize,
    comps: Vec<MSeries>,
}

impl PolyMap {
    pub fn new(comps: Vec<MSeries>) -> Result<Self> {
        let nvars = comps.first().map(MSeries::nvars).unwrap_or(0);
        if let Some(bad) = comps.iter().find(|c| c.nvars() != nvars) {
            return Err(Error::DimensionMismatch {
                expected: nvars,
                got: bad.nvars(),
            });
        }
        Ok(PolyMap { nvars, comps })
    }

    pub fn identity(n: usize, trunc: u32) -> Self {
        PolyMap {
            nvars: n,
            comps: (0..n).map(|i| MSeries::var(n, i, trunc)).collect(),
        }
    }

    pub fn zero(n: usize, trunc: u32) -> Self {
        Self::zero_with_vars(n, n, trunc)
    }

    pub fn zero_with_vars(len: usize, nvars: usize, trunc: u32) -> Self {
        PolyMap {
            nvars,
            comps: (0..len).map(|_| MSeries::zero(nvars, trunc)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn components(&self) -> &[MSeries] {
        &self.comps
    }

    pub fn into_components(self) -> Vec<MSeries> {
        self.comps
    }

    pub fn component(&self, i: usize) -> &MSeries {
        &self.comps[i]
    }

    /// Smallest truncation degree among the components.
    pub fn trunc(&self) -> u32 {
        self.comps
            .iter()
            .map(MSeries::trunc)
            .min()
            .unwrap_or(u32::MAX)
    }

    /// Minimal order over components; `None` when every component is zero.
    pub fn order(&self) -> Option<u32> {
        self.comps.iter().filter_map(MSeries::order).min()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(MSeries::is_zero)
    }

    pub fn term_count(&self) -> usize {
        self.comps.iter().map(MSeries::len).sum()
    }

    pub fn map(&self, f: impl Fn(&MSeries) -> MSeries) -> PolyMap {
        PolyMap {
            nvars: self.nvars,
            comps: self.comps.iter().map(f).collect(),
        }
    }

    pub fn truncate(&self, d: u32) -> PolyMap {
        self.map(|c| c.truncate(d))
    }

    pub fn with_trunc(&self, d: u32) -> PolyMap {
        self.map(|c| c.with_trunc(d))
    }

    pub fn scale(&self, c: &Rat) -> PolyMap {
        self.map(|s| s.scale(c))
    }

    pub fn extend_vars(&self, extra: usize) -> PolyMap {
        PolyMap {
            nvars: self.nvars + extra,
            comps: self.comps.iter().map(|c| c.extend_vars(extra)).collect(),
        }
    }

    fn check_same_shape(&self, other: &PolyMap) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: other.nvars,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &PolyMap) -> Result<PolyMap> {
        self.check_same_shape(other)?;
        Ok(PolyMap {
            nvars: self.nvars,
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn try_sub(&self, other: &PolyMap) -> Result<PolyMap> {
        self.check_same_shape(other)?;
        Ok(PolyMap {
            nvars: self.nvars,
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn add(&self, other: &PolyMap) -> PolyMap {
        self.try_add(other).expect("map shape mismatch")
    }

    pub fn sub(&self, other: &PolyMap) -> PolyMap {
        self.try_sub(other).expect("map shape mismatch")
    }

    /// Multiplies every component by the scalar series `s`, through `cap`.
    pub fn mul_series_to(&self, s: &MSeries, cap: u32) -> PolyMap {
        self.map(|c| c.mul_to(s, cap))
    }

    /// `self ∘ g`.
    pub fn compose(&self, g: &PolyMap) -> Result<PolyMap> {
        self.compose_to(g, u32::MAX)
    }

    /// `self ∘ g` through degree `cap`, sharing monomial powers of `g` across
    /// components.
    pub fn compose_to(&self, g: &PolyMap, cap: u32) -> Result<PolyMap> {
        if self.nvars != g.len() {
            return Err(Error::DimensionMismatch {
                expected: g.len(),
                got: self.nvars,
            });
        }
        let mut memo = ComposeMemo::new(g, cap)?;
        let trunc = self
            .comps
            .iter()
            .map(|c| memo.certified_trunc(c))
            .min()
            .unwrap_or(cap)
            .min(cap);
        memo.cap = trunc;
        let comps = self.comps.iter().map(|c| memo.apply(c)).collect();
        Ok(PolyMap {
            nvars: g.nvars(),
            comps,
        })
    }

    /// Substitutes `z := g` into a map whose trailing `nparams` variables are
    /// parameters left untouched; `g` is given in the full variable set.
    pub fn compose_params(&self, g: &PolyMap, nparams: usize, cap: u32) -> Result<PolyMap> {
        let full = g.with_params(nparams, cap);
        self.compose_to(&full, cap)
    }

    /// Appends the identity on the trailing `nparams` variables.
    pub fn with_params(&self, nparams: usize, trunc: u32) -> PolyMap {
        let mut comps = self.comps.clone();
        let nv = self.nvars;
        for p in 0..nparams {
            comps.push(MSeries::var(nv, nv - nparams + p, trunc));
        }
        PolyMap { nvars: nv, comps }
    }

    /// Jacobian with respect to all variables.
    pub fn jacobian(&self) -> SeriesMatrix {
        self.jacobian_in(self.nvars)
    }

    /// Jacobian with respect to the first `k` variables.
    pub fn jacobian_in(&self, k: usize) -> SeriesMatrix {
        let mut entries = Vec::with_capacity(self.len() * k);
        for c in &self.comps {
            for j in 0..k {
                entries.push(c.partial_diff(j));
            }
        }
        SeriesMatrix::from_entries(self.len(), k, entries)
    }

    pub fn jacobian_det(&self) -> Result<MSeries> {
        if self.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: self.len(),
            });
        }
        Ok(self.jacobian().det())
    }

    pub fn agrees_through(&self, other: &PolyMap, d: u32) -> bool {
        self.first_difference(other, d).is_none()
    }

    /// First differing coefficient through degree `d` as
    /// `(component, exponent, self coefficient, other coefficient)`.
    pub fn first_difference(&self, other: &PolyMap, d: u32) -> Option<(usize, Exponent, Rat, Rat)> {
        if self.len() != other.len() {
            return Some((
                self.len().min(other.len()),
                Exponent::zero(0),
                Rat::one(),
                Rat::zero(),
            ));
        }
        self.comps
            .iter()
            .zip(&other.comps)
            .enumerate()
            .find_map(|(i, (a, b))| a.first_difference(b, d).map(|(e, x, y)| (i, e, x, y)))
    }

    /// `Some(d)` when all nonzero components are homogeneous of the same degree.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut deg = None;
        for c in self.comps.iter().filter(|c| !c.is_zero()) {
            let d = c.homogeneous_degree()?;
            match deg {
                None => deg = Some(d),
                Some(prev) if prev != d => return None,
                _ => {}
            }
        }
        deg
    }

    pub fn display_with(&self, names: &[String]) -> Vec<String> {
        self.comps.iter().map(|c| c.display_with(names)).collect()
    }
}

impl fmt::Display for PolyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = super::default_var_names(self.nvars);
        write!(f, "(")?;
        for (i, c) in self.comps.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", c.display_with(&names))?;
        }
        write!(f, ")")
    }
}

/// A formal self-map in canonical form `F = z - H` with `o(H) >= 2`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MapF {
    f: PolyMap,
    h: PolyMap,
}

impl MapF {
    /// Validates `F`: no constant terms and linear part exactly the identity.
    pub fn new(f: PolyMap) -> Result<Self> {
        let n = f.len();
        if f.nvars() != n {
            return Err(Error::NotCanonical(format!(
                "{} components in {} variables",
                n,
                f.nvars()
            )));
        }
        let id = PolyMap::identity(n, f.trunc());
        let h = id.sub(&f);
        for (i, hi) in h.components().iter().enumerate() {
            if let Some(o) = hi.order() {
                if o == 0 {
                    return Err(Error::NotCanonical(format!(
                        "component {} has a nonzero constant term",
                        i + 1
                    )));
                }
                if o == 1 {
                    return Err(Error::NotCanonical(format!(
                        "linear part of component {} is not z{}",
                        i + 1,
                        i + 1
                    )));
                }
            }
        }
        Ok(MapF { f, h })
    }

    /// Builds `z - H`, requiring `o(H) >= 2`.
    pub fn from_h(h: PolyMap) -> Result<Self> {
        let n = h.len();
        if h.nvars() != n {
            return Err(Error::NotCanonical(format!(
                "{} components in {} variables",
                n,
                h.nvars()
            )));
        }
        if let Some(o) = h.order() {
            if o < 2 {
                return Err(Error::NotCanonical(format!("o(H) = {o} < 2")));
            }
        }
        let f = PolyMap::identity(n, h.trunc()).sub(&h);
        Ok(MapF { f, h })
    }

    pub fn n(&self) -> usize {
        self.f.len()
    }

    pub fn f(&self) -> &PolyMap {
        &self.f
    }

    pub fn h(&self) -> &PolyMap {
        &self.h
    }

    pub fn trunc(&self) -> u32 {
        self.f.trunc()
    }

    /// `H` cut at degree `d` and regarded as an exact polynomial known through
    /// degree `work` (>= `d`). The inverse through degree `d` only depends on
    /// `H` through degree `d`.
    pub fn h_polynomial(&self, d: u32, work: u32) -> Result<PolyMap> {
        if self.h.trunc() < d {
            return Err(Error::InsufficientPrecision {
                needed: d,
                available: self.h.trunc(),
            });
        }
        Ok(self.h.truncate(d).with_trunc(work))
    }

    /// `F` cut at degree `d` and promoted the same way as [`MapF::h_polynomial`].
    pub fn with_precision(&self, d: u32) -> Result<MapF> {
        MapF::from_h(self.h_polynomial(d, d)?)
    }

    /// `Some(d)` if `H` is homogeneous of degree `d`.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        self.h.homogeneous_degree()
    }
}

/// Checks `z_i | H_i` for all `i`, returning `h_i = H_i / z_i`.
pub(crate) fn divide_by_coordinates(h: &PolyMap) -> Result<PolyMap> {
    let n = h.len();
    let mut out = Vec::with_capacity(n);
    for (i, hi) in h.components().iter().enumerate() {
        let mut q = MSeries::zero(n, hi.trunc().saturating_sub(1));
        for (e, c) in hi.terms() {
            if e.get(i) == 0 {
                return Err(Error::NotDivisible { index: i + 1 });
            }
            q.add_term(e.with(i, e.get(i) - 1), c.clone());
        }
        out.push(q);
    }
    PolyMap::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn h2(trunc: u32) -> PolyMap {
        // H = (z2^2, 0)
        PolyMap::new(vec![
            MSeries::from_terms(2, trunc, [(vec![0, 2], rat(1))]).unwrap(),
            MSeries::zero(2, trunc),
        ])
        .unwrap()
    }

    #[test]
    fn canonical_form_checks() {
        let f = MapF::from_h(h2(4)).unwrap();
        assert_eq!(f.h(), &h2(4));
        assert!(MapF::new(f.f().clone()).is_ok());

        let bad =
            PolyMap::new(vec![MSeries::from_terms(1, 3, [(vec![1], rat(2))]).unwrap()]).unwrap();
        assert!(matches!(MapF::new(bad), Err(Error::NotCanonical(_))));

        let constant = PolyMap::new(vec![MSeries::from_terms(
            1,
            3,
            [(vec![0], rat(1)), (vec![1], rat(1))],
        )
        .unwrap()])
        .unwrap();
        assert!(matches!(MapF::new(constant), Err(Error::NotCanonical(_))));

        let linear_h =
            PolyMap::new(vec![MSeries::from_terms(1, 3, [(vec![1], rat(1))]).unwrap()]).unwrap();
        assert!(MapF::from_h(linear_h).is_err());
    }

    #[test]
    fn jacobian_examples() {
        let jh = h2(4).jacobian();
        assert!(jh.get(0, 0).is_zero());
        assert_eq!(
            jh.get(0, 1),
            &MSeries::from_terms(2, 3, [(vec![0, 1], rat(2))]).unwrap()
        );
        assert!(jh.get(1, 0).is_zero() && jh.get(1, 1).is_zero());

        let id = PolyMap::identity(3, 4).jacobian();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { rat(1) } else { rat(0) };
                assert_eq!(id.get(i, j).constant_term(), expect);
                assert!(id.get(i, j).len() <= 1);
            }
        }
    }

    #[test]
    fn jacobian_det_examples() {
        let f = MapF::from_h(
            PolyMap::new(vec![MSeries::from_terms(1, 5, [(vec![2], rat(1))]).unwrap()]).unwrap(),
        )
        .unwrap();
        assert_eq!(
            f.f().jacobian_det().unwrap(),
            MSeries::from_terms(1, 4, [(vec![0], rat(1)), (vec![1], rat(-2))]).unwrap()
        );
        assert_eq!(
            PolyMap::identity(3, 4).jacobian_det().unwrap(),
            MSeries::one(3, 3)
        );
        let tri = MapF::from_h(h2(4)).unwrap();
        assert_eq!(tri.f().jacobian_det().unwrap(), MSeries::one(2, 3));
    }

    #[test]
    fn euler_identity_for_homogeneous() {
        // H = (z1^2 z2 - 3 z2^3, 2 z1 z2^2), degree 3: JH·z = 3H.
        let h = PolyMap::new(vec![
            MSeries::from_terms(2, 6, [(vec![2, 1], rat(1)), (vec![0, 3], rat(-3))]).unwrap(),
            MSeries::from_terms(2, 6, [(vec![1, 2], rat(2))]).unwrap(),
        ])
        .unwrap();
        let jz = h.jacobian().mul_map(&PolyMap::identity(2, 6), 5);
        assert!(jz.agrees_through(&h.scale(&rat(3)), 5));
    }

    #[test]
    fn divisibility() {
        let h = PolyMap::new(vec![
            MSeries::from_terms(2, 4, [(vec![1, 1], rat(1))]).unwrap(),
            MSeries::zero(2, 4),
        ])
        .unwrap();
        let q = divide_by_coordinates(&h).unwrap();
        assert_eq!(
            q.component(0),
            &MSeries::from_terms(2, 3, [(vec![0, 1], rat(1))]).unwrap()
        );
        assert_eq!(
            divide_by_coordinates(&h2(4)),
            Err(Error::NotDivisible { index: 1 })
        );
    }
}
