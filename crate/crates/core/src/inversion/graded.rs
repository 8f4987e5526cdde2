use std::collections::HashMap;

use num::BigInt;
use rayon::prelude::*;

use crate::error::Result;
use crate::rat::Rat;
use crate::report::IdentityCheck;
use crate::series::{exponents_of_degree, Exponent, MSeries, MapF, PolyMap, SeriesMatrix};
use crate::trees::{trees_up_to, TreeExpansion};

/// The inverse `G = z + Σ_m N_[m]` split into layers, where `N_[m]` is the
/// coefficient of `t^(m-1)` in `N_t` for the deformation `z - tH`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedInverse {
    h: PolyMap,
    layers: Vec<PolyMap>,
    trunc: u32,
}

impl GradedInverse {
    pub(crate) fn new(h: PolyMap, layers: Vec<PolyMap>, trunc: u32) -> Self {
        let layers = layers
            .into_iter()
            .map(|l| l.truncate(trunc).with_trunc(trunc))
            .collect();
        GradedInverse { h, layers, trunc }
    }

    pub fn h(&self) -> &PolyMap {
        &self.h
    }

    /// `N_[1], N_[2], ...`
    pub fn layers(&self) -> &[PolyMap] {
        &self.layers
    }

    /// `N_[m]` for `m >= 1`.
    pub fn layer(&self, m: usize) -> Option<&PolyMap> {
        m.checked_sub(1).and_then(|i| self.layers.get(i))
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    pub fn inverse(&self) -> PolyMap {
        let n = self.h.len();
        self.layers
            .iter()
            .fold(PolyMap::identity(n, self.trunc), |g, l| g.add(l))
    }

    /// Order and degree bounds every layer must satisfy: `o(N_[m]) >= m+1`,
    /// `deg N_[m] <= (deg H - 1)m + 1`, and homogeneity of degree
    /// `(d-1)m + 1` when `H` is homogeneous of degree `d`.
    pub fn layer_bound_checks(&self) -> Vec<IdentityCheck> {
        let deg_h = self
            .h
            .components()
            .iter()
            .filter_map(MSeries::max_degree)
            .max();
        let mut order = IdentityCheck::pass("o(N_[m]) >= m+1");
        let mut degree = IdentityCheck::pass("deg N_[m] <= (deg H - 1)m + 1");
        let hom_deg = self.h.homogeneous_degree();
        let mut homog = match hom_deg {
            Some(_) => IdentityCheck::pass("N_[m] homogeneous of degree (d-1)m+1"),
            None => IdentityCheck::skipped(
                "N_[m] homogeneous of degree (d-1)m+1",
                "H is not homogeneous",
            ),
        };
        for (idx, l) in self.layers.iter().enumerate() {
            let m = idx as u32 + 1;
            if let Some(o) = l.order() {
                if o < m + 1 && order.passed() {
                    order = IdentityCheck::fail(order.identity, format!("layer {m} has order {o}"));
                }
            }
            let max = l.components().iter().filter_map(MSeries::max_degree).max();
            if let (Some(dh), Some(dl)) = (deg_h, max) {
                if dl > (dh - 1) * m + 1 && degree.passed() {
                    degree =
                        IdentityCheck::fail(degree.identity, format!("layer {m} has degree {dl}"));
                }
            }
            if let Some(d) = hom_deg {
                let want = (d - 1) * m + 1;
                let ok = l.is_zero() || want > self.trunc || l.homogeneous_degree() == Some(want);
                if !ok && homog.passed() {
                    homog = IdentityCheck::fail(
                        homog.identity,
                        format!("layer {m} is not homogeneous of degree {want}"),
                    );
                }
            }
        }
        let d = Some(self.trunc);
        order.through_degree = d;
        degree.through_degree = d;
        homog.through_degree = d;
        vec![order, degree, homog]
    }
}

/// Iterates `G <- z + H(G)` until it stops changing; each pass fixes at
/// least one more degree, so at most `D` passes are needed.
pub fn invert_fixed_point(f: &MapF, d: u32) -> Result<PolyMap> {
    let h = f.h_polynomial(d, d)?;
    let z = PolyMap::identity(f.n(), d);
    let mut g = z.clone();
    for _ in 0..d {
        let next = z.add(&h.compose_to(&g, d)?);
        if next == g {
            break;
        }
        g = next;
    }
    Ok(g)
}

/// `N_[1] = H`, `N_[m] = (1/(m-1)) Σ_{k+l=m} JN_[k]·N_[l]` for `m <= D-1`.
/// Higher layers have order `>= D+1` and cannot contribute.
pub fn invert_recurrent(f: &MapF, d: u32) -> Result<GradedInverse> {
    let h = f.h_polynomial(d, d)?;
    let mut layers: Vec<PolyMap> = Vec::new();
    let mut jacs: Vec<SeriesMatrix> = Vec::new();
    if d >= 2 {
        layers.push(h.clone());
        jacs.push(h.jacobian());
    }
    for m in 2..d as usize {
        let parts: Vec<PolyMap> = (1..m)
            .into_par_iter()
            .map(|k| jacs[k - 1].mul_map(&layers[m - k - 1], d))
            .collect();
        let sum = parts
            .iter()
            .fold(PolyMap::zero(f.n(), d), |acc, p| acc.add(p));
        let layer = sum.scale(&Rat::new(BigInt::from(1), BigInt::from(m - 1)));
        jacs.push(layer.jacobian());
        layers.push(layer);
    }
    Ok(GradedInverse::new(h, layers, d))
}

/// `G_i = Σ_{|m| <= D} ∂^m(z_i · j(F) · H^m) / m!`.
///
/// `H^m` has order `>= 2|m|` and `∂^m` lowers degrees by `|m|`, so each
/// product is needed through degree `D + |m|` and `j(F)` only through
/// `D - 1`. The products `H^m · j(F)` are shared by all components.
pub fn invert_abhyankar_gurjar(f: &MapF, d: u32) -> Result<PolyMap> {
    let n = f.n();
    if d == 0 {
        f.h_polynomial(0, 0)?;
        return Ok(PolyMap::identity(n, 0));
    }
    let h = f.h_polynomial(d, 2 * d)?;
    let jf = MapF::from_h(h.truncate(d))?.f().jacobian_det()?;
    let mut g: Vec<MSeries> = (0..n).map(|_| MSeries::zero(n, d)).collect();
    let mut prev: HashMap<Exponent, MSeries> = HashMap::new();
    prev.insert(Exponent::zero(n), MSeries::one(n, 2 * d));
    for s in 0..=d {
        let mut powers: HashMap<Exponent, MSeries> = HashMap::new();
        for m in exponents_of_degree(n, s) {
            let p = if s == 0 {
                prev[&m].clone()
            } else {
                let j = m.as_slice().iter().position(|&k| k > 0).expect("|m| > 0");
                prev[&m.with(j, m.get(j) - 1)].mul_to(h.component(j), d + s)
            };
            if !p.is_zero() {
                let weighted = p.mul_to(&jf, d + s - 1);
                let inv_fact = Rat::from_integer(m.factorial()).recip();
                for (i, gi) in g.iter_mut().enumerate() {
                    let term = weighted
                        .shift(&Exponent::unit(n, i))
                        .partial_diff_multi(&m)
                        .scale(&inv_fact);
                    *gi = &*gi + &term;
                }
            }
            powers.insert(m, p);
        }
        prev = powers;
    }
    PolyMap::new(g)
}

/// `G = z + Σ_{|T| <= D-1} 𝒫_T`, summed in canonical tree order.
pub fn invert_bcw(f: &MapF, d: u32) -> Result<PolyMap> {
    let h = f.h_polynomial(d, d)?;
    let mut g = PolyMap::identity(f.n(), d);
    if d < 2 {
        return Ok(g);
    }
    let mut engine = TreeExpansion::new(&h)?;
    for t in trees_up_to(d as usize - 1) {
        g = g.add(&engine.tree_map(&t));
    }
    Ok(g)
}
