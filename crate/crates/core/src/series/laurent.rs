//! Just enough Laurent machinery for residue formulas: expansions of
//! `Π F_i^(-k_i-1)` for canonical `F = z - H`, multiplied by ordinary series,
//! inside an explicit total-degree window.

use std::collections::{BTreeMap, HashMap};

use num::{BigInt, Zero};

use super::{Exponent, MSeries, MapF};
use crate::error::{Error, Result};
use crate::rat::{binomial, Rat};

/// A finite Laurent expansion whose coefficients are exact for every
/// exponent of total degree `<= hi`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LaurentExpr {
    n: usize,
    hi: i64,
    lo: i64,
    terms: BTreeMap<Vec<i64>, Rat>,
}

fn total(e: &[i64]) -> i64 {
    e.iter().sum()
}

impl LaurentExpr {
    pub fn new(
        n: usize,
        hi: i64,
        lo: i64,
        terms: impl IntoIterator<Item = (Vec<i64>, Rat)>,
    ) -> Self {
        let mut map = BTreeMap::new();
        for (e, c) in terms {
            assert_eq!(e.len(), n);
            let t = total(&e);
            if t > hi || c.is_zero() {
                continue;
            }
            assert!(t >= lo, "term below the stated lower bound");
            *map.entry(e).or_insert_with(Rat::zero) += c;
        }
        map.retain(|_, c: &mut Rat| !c.is_zero());
        LaurentExpr {
            n,
            hi,
            lo,
            terms: map,
        }
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    /// Upper end of the certified total-degree window.
    pub fn window(&self) -> i64 {
        self.hi
    }

    /// Lower bound on the total degree of every term.
    pub fn min_degree(&self) -> i64 {
        self.lo
    }

    /// Smallest exponent of each variable among the stored terms.
    pub fn lower_bounds(&self) -> Vec<i64> {
        (0..self.n)
            .map(|i| self.terms.keys().map(|e| e[i]).min().unwrap_or(0))
            .collect()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &Rat)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: &[i64]) -> Result<Rat> {
        if exp.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: exp.len(),
            });
        }
        if total(exp) > self.hi {
            return Err(Error::OutsideWindow(exp.to_vec()));
        }
        Ok(self.terms.get(exp).cloned().unwrap_or_else(Rat::zero))
    }

    /// Product with an ordinary series; the window shrinks to what both
    /// factors certify.
    pub fn mul_series(&self, s: &MSeries) -> LaurentExpr {
        assert_eq!(self.n, s.nvars());
        let hi = (self.hi + s.certified_order() as i64).min(s.trunc() as i64 + self.lo);
        let lo = self.lo + s.certified_order().min(s.trunc()) as i64;
        let mut acc: HashMap<Vec<i64>, Rat> = HashMap::new();
        for (e, c) in &self.terms {
            let base = total(e);
            for (f, d) in s.terms() {
                if base + f.degree() as i64 > hi {
                    break;
                }
                let key: Vec<i64> = e
                    .iter()
                    .zip(f.as_slice())
                    .map(|(a, &b)| a + b as i64)
                    .collect();
                *acc.entry(key).or_insert_with(Rat::zero) += c * d;
            }
        }
        LaurentExpr {
            n: self.n,
            hi,
            lo: lo.min(hi + 1),
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }
}

/// Laurent product of two finite expansions, kept through relative degree `cap`.
fn mul_rel(
    a: &BTreeMap<Vec<i64>, Rat>,
    b: &BTreeMap<Vec<i64>, Rat>,
    cap: i64,
) -> BTreeMap<Vec<i64>, Rat> {
    let mut acc: HashMap<Vec<i64>, Rat> = HashMap::new();
    for (ea, ca) in a {
        let da = total(ea);
        for (eb, cb) in b {
            if da + total(eb) > cap {
                continue;
            }
            let key: Vec<i64> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            *acc.entry(key).or_insert_with(Rat::zero) += ca * cb;
        }
    }
    acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

/// Expands `Π_i F_i^(-k_i-1)` keeping all terms of total degree `<= window`.
///
/// Uses `F_i^(-1) = z_i^(-1) Σ_m (H_i/z_i)^m`; every term of `H_i/z_i` has
/// total degree `>= 1`, so each window holds finitely many terms.
pub fn laurent_inv_power(f: &MapF, k: &Exponent, window: i64) -> Result<LaurentExpr> {
    let n = f.n();
    if k.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: k.len(),
        });
    }
    let shift: Vec<i64> = k.as_slice().iter().map(|&ki| -(ki as i64) - 1).collect();
    let lo = total(&shift);
    let rel_cap = window - lo;
    if rel_cap < 0 {
        return Ok(LaurentExpr {
            n,
            hi: window,
            lo,
            terms: BTreeMap::new(),
        });
    }
    let needed = (rel_cap + 1) as u32;
    if f.h().trunc() < needed {
        return Err(Error::InsufficientPrecision {
            needed,
            available: f.h().trunc(),
        });
    }
    let mut product: BTreeMap<Vec<i64>, Rat> = BTreeMap::new();
    product.insert(vec![0; n], Rat::from_integer(BigInt::from(1)));
    for (i, hi) in f.h().components().iter().enumerate() {
        // u = H_i / z_i, relative degree = deg - 1.
        let u: BTreeMap<Vec<i64>, Rat> = hi
            .terms()
            .filter(|(e, _)| e.degree() as i64 - 1 <= rel_cap)
            .map(|(e, c)| {
                let mut v: Vec<i64> = e.as_slice().iter().map(|&x| x as i64).collect();
                v[i] -= 1;
                (v, c.clone())
            })
            .collect();
        let ki = k.get(i) as u64;
        let mut factor: BTreeMap<Vec<i64>, Rat> = BTreeMap::new();
        factor.insert(vec![0; n], Rat::from_integer(BigInt::from(1)));
        let mut power = factor.clone();
        for m in 1..=rel_cap as u64 {
            power = mul_rel(&power, &u, rel_cap);
            if power.is_empty() {
                break;
            }
            let c = Rat::from_integer(binomial(ki + m, m));
            for (e, v) in &power {
                *factor.entry(e.clone()).or_insert_with(Rat::zero) += &c * v;
            }
        }
        factor.retain(|_, c| !c.is_zero());
        product = mul_rel(&product, &factor, rel_cap);
    }
    let terms = product.into_iter().map(|(e, c)| {
        let abs: Vec<i64> = e.iter().zip(&shift).map(|(a, b)| a + b).collect();
        (abs, c)
    });
    Ok(LaurentExpr::new(n, window, lo, terms))
}

/// Coefficient of `z_1^-1 ⋯ z_n^-1`.
pub fn residue(e: &LaurentExpr) -> Result<Rat> {
    e.coeff(&vec![-1; e.n])
}
