use num::{One, Zero};

use super::pseries::{param_monomial, PMap, ParamPoly};
use crate::error::{Error, Result};
use crate::inversion::{invert_recurrent, GradedInverse};
use crate::rat::Rat;
use crate::series::{Exponent, MSeries, MapF, PolyMap};
use crate::tpoly::TPoly;
use crate::trees::{order_polynomial, trees_up_to, TreeExpansion};

/// `z - t·H` with `t` the parameter `j` of `p`.
pub fn deformed_map(h: &PolyMap, p: usize, j: usize) -> PMap {
    let n = h.len();
    let t = param_monomial(p, j, 1, Rat::one());
    PMap::identity(n, p, h.trunc()).sub(&PMap::from_polymap(h, p).mul_poly(&t))
}

/// `N_t = Σ_m t^(m-1) N_[m]` in a ring with `p` parameters, `t` being
/// parameter `j`.
pub(crate) fn layers_to_pmap(layers: &[PolyMap], n: usize, trunc: u32, p: usize, j: usize) -> PMap {
    layers
        .iter()
        .enumerate()
        .fold(PMap::zero(n, p, trunc), |acc, (idx, l)| {
            let tp = param_monomial(p, j, idx as u32, Rat::one());
            acc.add(&PMap::from_polymap(l, p).mul_poly(&tp))
        })
}

/// The inverse `G_t = z + t·N_t` of `F_t = z - t·H`, with `N_t` carried as a
/// map whose coefficients are polynomials in `t`.
///
/// With `z`-truncation `D` the layers `N_[m]`, `m <= D-1`, are all that
/// contribute, so every stored coefficient is the exact polynomial in `t`
/// (of degree at most `D-2`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeformedInverse {
    graded: GradedInverse,
    n_t: PMap,
}

impl DeformedInverse {
    pub fn from_graded(graded: GradedInverse) -> Self {
        let n = graded.h().len();
        let n_t = layers_to_pmap(graded.layers(), n, graded.trunc(), 1, 0);
        DeformedInverse { graded, n_t }
    }

    pub fn graded(&self) -> &GradedInverse {
        &self.graded
    }

    pub fn h(&self) -> &PolyMap {
        self.graded.h()
    }

    /// `N_t`, one parameter.
    pub fn n_t(&self) -> &PMap {
        &self.n_t
    }

    pub fn trunc(&self) -> u32 {
        self.graded.trunc()
    }

    /// Highest power of `t` that can occur through `z`-degree `D`.
    pub fn t_order(&self) -> u32 {
        self.trunc().saturating_sub(2)
    }

    /// `G_t = z + t N_t`.
    pub fn g_t(&self) -> PMap {
        let n = self.h().len();
        let t = param_monomial(1, 0, 1, Rat::one());
        PMap::identity(n, 1, self.trunc()).add(&self.n_t.mul_poly(&t))
    }

    /// `N_t` specialized at a rational `t`.
    pub fn n_at(&self, t: &Rat) -> PolyMap {
        self.n_t.eval_params(std::slice::from_ref(t))
    }

    /// `G_t` specialized at a rational `t`.
    pub fn g_at(&self, t: &Rat) -> PolyMap {
        self.g_t().eval_params(std::slice::from_ref(t))
    }

    /// A copy with `delta` added to layer `m` (for testing the residual).
    pub fn with_perturbed_layer(&self, m: usize, delta: &PolyMap) -> Result<DeformedInverse> {
        let mut layers = self.graded.layers().to_vec();
        let slot = m
            .checked_sub(1)
            .and_then(|i| layers.get_mut(i))
            .ok_or_else(|| Error::Invalid(format!("no layer {m}")))?;
        *slot = slot.try_add(delta)?;
        let graded = GradedInverse::new(self.h().clone(), layers, self.trunc());
        Ok(DeformedInverse::from_graded(graded))
    }
}

/// Layers from the recurrent formula, regraded by `t`.
pub fn deformation_inverse(f: &MapF, d: u32) -> Result<DeformedInverse> {
    Ok(DeformedInverse::from_graded(invert_recurrent(f, d)?))
}

/// `∂N_t/∂t - JN_t · N_t`, exact in `t` through `z`-degree `D`.
pub fn pde_residual(ninv: &DeformedInverse) -> PMap {
    let d = ninv.trunc();
    let n_t = ninv.n_t();
    let lhs = n_t.param_diff(0).truncate(d);
    let rhs = n_t.jacobian().mul_vec(n_t, d);
    lhs.sub(&rhs)
}

/// The formal flow `F(z; t)`: a map whose coefficients are polynomials in `t`
/// with `F(z; 0) = z`, `F(z; 1) = F` and `F(F(z; a); b) = F(z; a + b)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowSeries {
    map: PMap,
}

impl FlowSeries {
    pub fn map(&self) -> &PMap {
        &self.map
    }

    pub fn trunc(&self) -> u32 {
        self.map.trunc()
    }

    /// Coefficient of `z^e` in component `i` as a polynomial in `t`.
    pub fn coeff(&self, i: usize, e: &Exponent) -> TPoly {
        self.map.component(i).tpoly(e)
    }

    /// `F(z; t)` at a rational `t`.
    pub fn at(&self, t: &Rat) -> PolyMap {
        self.map.eval_params(std::slice::from_ref(t))
    }
}

fn tpoly_to_param(p: &TPoly) -> ParamPoly {
    let terms = p
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| (vec![k as i64], c.clone()));
    MSeries::from_terms(1, u32::MAX, terms).expect("valid exponents")
}

/// `F(z; t) = z + Σ_{|T| <= D-1} (-1)^|T| Ω̄(T, t) 𝒫_T(z)`.
pub fn formal_flow(f: &MapF, d: u32) -> Result<FlowSeries> {
    let h = f.h_polynomial(d, d)?;
    let n = f.n();
    let mut acc = PMap::identity(n, 1, d);
    if d >= 2 {
        let mut engine = TreeExpansion::new(&h)?;
        for t in trees_up_to(d as usize - 1) {
            let mut w = order_polynomial(&t);
            if t.size() % 2 == 1 {
                w = -&w;
            }
            let term = PMap::from_polymap(&engine.tree_map(&t), 1).mul_poly(&tpoly_to_param(&w));
            acc = acc.add(&term);
        }
    }
    Ok(FlowSeries { map: acc })
}

/// `F^[m]`: `m`-fold composition for `m >= 0`, the inverse composed `|m|`
/// times for `m < 0`.
pub fn power_map(f: &MapF, m: i64, d: u32) -> Result<PolyMap> {
    let n = f.n();
    let base = if m >= 0 {
        f.with_precision(d)?.f().clone()
    } else {
        invert_recurrent(f, d)?.inverse()
    };
    let mut acc = PolyMap::identity(n, d);
    for _ in 0..m.unsigned_abs() {
        acc = base.compose_to(&acc, d)?;
    }
    Ok(acc)
}

/// Lifts a `t`-map into a ring with an extra parameter.
pub(crate) fn add_param(m: &PMap) -> PMap {
    m.map_coeffs(|c| c.extend_vars(1))
}

/// Substitutes `t := t + s` in a one-parameter map, giving a two-parameter map.
pub(crate) fn shift_t_by_s(m: &PMap) -> PMap {
    let t_plus_s = PolyMap::new(vec![MSeries::from_terms(
        2,
        u32::MAX,
        [(vec![1, 0], Rat::one()), (vec![0, 1], Rat::one())],
    )
    .expect("valid exponents")])
    .expect("single component");
    m.map_coeffs(|c| c.compose(&t_plus_s).expect("t + s has no constant term"))
}
