use num::{BigInt, One};
use serde::Serialize;

use super::deform::{add_param, deformation_inverse, deformed_map, power_map, shift_t_by_s};
use super::pseries::{param_monomial, PMap, PMatrix};
use crate::error::{Error, Result};
use crate::inversion::{invert_homogeneous, invert_recurrent};
use crate::rat::Rat;
use crate::report::{IdentityCheck, Report};
use crate::series::{MapF, PolyMap, SeriesMatrix};

fn param_names(p: usize) -> Vec<String> {
    ["t", "s"].iter().take(p).map(|s| s.to_string()).collect()
}

/// Compares two parameter maps through `z`-degree `d`, restricted to
/// parameter monomials within `caps` when given.
fn pmaps_equal(
    identity: &str,
    lhs: &PMap,
    rhs: &PMap,
    d: u32,
    caps: Option<&[u32]>,
) -> IdentityCheck {
    let names = param_names(lhs.nparams());
    let mut c = match lhs.first_difference(rhs, d, caps) {
        None => IdentityCheck::pass(identity),
        Some((i, e, a, b)) => IdentityCheck::fail(
            identity,
            format!(
                "component {}, exponent {:?}: {} vs {}",
                i + 1,
                e.as_slice(),
                a.display_with(&names),
                b.display_with(&names)
            ),
        ),
    };
    c.through_degree = Some(d);
    c
}

fn pmatrices_equal(identity: &str, lhs: &PMatrix, rhs: &PMatrix, d: u32) -> IdentityCheck {
    let mut c = match lhs.first_difference(rhs, d) {
        None => IdentityCheck::pass(identity),
        Some((i, j, e)) => IdentityCheck::fail(
            identity,
            format!("entry ({i}, {j}), exponent {:?}", e.as_slice()),
        ),
    };
    c.through_degree = Some(d);
    c
}

fn t_poly(p: usize) -> crate::series::MSeries {
    param_monomial(p, 0, 1, Rat::one())
}

fn homogeneous_degree(h: &PolyMap) -> Result<u32> {
    match h.homogeneous_degree() {
        Some(d) if d >= 2 => Ok(d),
        Some(d) => Err(Error::DegreeTooSmall(d)),
        None => Err(Error::NotHomogeneous(None)),
    }
}

fn index_text(k: Option<u32>) -> String {
    match k {
        Some(k) => k.to_string(),
        None => "none".into(),
    }
}

/// `N_t(F_t) = H`, `H(G_t) = N_t`, `JN_t(F_t) = Σ_k JH^k t^(k-1)`, and
/// matching nilpotency indices of `JH` and `JN_t` (over the ring truncated
/// at degree `D-1`, up to exponent `n`).
pub fn check_lemma31(f: &MapF, d: u32) -> Result<Report> {
    let mut r = Report::new("lemma31");
    let fd = f.with_precision(d)?;
    let h = fd.h();
    let n = f.n();
    let di = deformation_inverse(&fd, d)?;
    let n_t = di.n_t();
    let f_t = deformed_map(h, 1, 0);
    let h1 = PMap::from_polymap(h, 1);

    r.push(pmaps_equal(
        "N_t(F_t) = H",
        &n_t.compose_to(&f_t, d),
        &h1,
        d,
        None,
    ));
    r.push(pmaps_equal(
        "H(G_t) = N_t",
        &h1.compose_to(&di.g_t(), d),
        n_t,
        d,
        None,
    ));

    let e = d.saturating_sub(1);
    let jn = n_t.jacobian();
    let jh = h1.jacobian();
    let t = t_poly(1);
    let mut sum = jh.map(|s| s.truncate(e));
    let mut power = jh.clone();
    let mut tk = t.clone();
    for _ in 2..=e {
        power = power.mul_to(&jh, e);
        if power.is_zero() {
            break;
        }
        sum = sum.add(&power.map(|s| s.mul_poly(&tk)));
        tk = tk.mul_to(&t, u32::MAX);
    }
    r.push(pmatrices_equal(
        "JN_t(F_t) = sum_k JH^k t^(k-1)",
        &jn.compose_to(&f_t, e),
        &sum,
        e,
    ));

    let jh_plain = h.jacobian();
    let k_h = jh_plain.nilpotency_index(n as u32, e);
    let k_n = jn.nilpotency_index(n as u32, e);
    r.push(
        IdentityCheck::from_bool(
            "nilpotency index of JH = nilpotency index of JN_t",
            k_h == k_n,
            || format!("JH: {}, JN_t: {}", index_text(k_h), index_text(k_n)),
        )
        .with_note(format!("index {} through degree {e}", index_text(k_h))),
    );
    Ok(r)
}

/// `G = z + H` and `F^[m] = z - mH` (m = 1..4) when `JH·H = 0`; some
/// `N_[m] != 0` (m >= 2) otherwise.
pub fn check_newp(h: &PolyMap, d: u32) -> Result<Report> {
    let mut r = Report::new("newp");
    let f = MapF::from_h(h.clone())?.with_precision(d)?;
    let hd = f.h();
    let n = f.n();
    let jhh = hd.jacobian().mul_map(hd, d);
    let graded = invert_recurrent(&f, d)?;
    let g = graded.inverse();
    let z_plus_h = PolyMap::identity(n, d).add(hd);
    if jhh.is_zero() {
        r.note(format!("JH·H = 0 through degree {d}"));
        r.push(IdentityCheck::maps_equal("G = z + H", &g, &z_plus_h, d));
        for m in 1..=4i64 {
            let want = PolyMap::identity(n, d).sub(&hd.scale(&Rat::from_integer(BigInt::from(m))));
            r.push(IdentityCheck::maps_equal(
                format!("F^[{m}] = z - {m}H"),
                &power_map(&f, m, d)?,
                &want,
                d,
            ));
        }
    } else {
        r.note(format!("JH·H != 0 through degree {d}"));
        let nonzero = graded
            .layers()
            .iter()
            .enumerate()
            .skip(1)
            .find(|(_, l)| !l.is_zero())
            .map(|(i, _)| i + 1);
        r.push(IdentityCheck::from_bool(
            "some N_[m] != 0 with m >= 2",
            nonzero.is_some(),
            || "all layers beyond the first vanish".into(),
        ));
        if let Some(m) = nonzero {
            r.note(format!("first nonzero layer beyond N_[1]: m = {m}"));
        }
        r.push(IdentityCheck::from_bool(
            "G != z + H",
            !g.agrees_through(&z_plus_h, d),
            || "G equals z + H".into(),
        ));
    }
    Ok(r)
}

/// For homogeneous `H`: the Euler bridge `JH²·z = d·JH·H`, and `G = z + H`
/// whenever `JH² = 0` (decided exactly on the polynomial `H`).
pub fn check_bcw_quadratic_nilpotent(h: &PolyMap, d: u32) -> Result<Report> {
    let deg = homogeneous_degree(h)?;
    let mut r = Report::new("bcw-quadratic-nilpotent");
    let f = MapF::from_h(h.clone())?.with_precision(d)?;
    let hd = f.h();
    let n = f.n();

    let exact_cap = 2 * deg;
    let jh_exact = hd.with_trunc(exact_cap).jacobian();
    let jh2_exact = jh_exact.mul_to(&jh_exact, exact_cap);

    let jh = hd.jacobian();
    let jh2 = jh.mul_to(&jh, d.saturating_sub(1));
    let lhs = jh2.mul_map(&PolyMap::identity(n, d), d);
    let rhs = jh
        .mul_map(hd, d)
        .scale(&Rat::from_integer(BigInt::from(deg)));
    r.push(IdentityCheck::maps_equal("JH^2 z = d JH H", &lhs, &rhs, d));

    if jh2_exact.is_zero() {
        let g = invert_recurrent(&f, d)?.inverse();
        let want = PolyMap::identity(n, d).add(hd);
        r.push(IdentityCheck::maps_equal(
            "JH^2 = 0 implies G = z + H",
            &g,
            &want,
            d,
        ));
    } else {
        r.push(IdentityCheck::skipped(
            "JH^2 = 0 implies G = z + H",
            "JH^2 != 0",
        ));
    }
    Ok(r)
}

/// With `U = z - sN_t` and `V = z + sN_(t+s)`: `U(V) = V(U) = z`,
/// `U = F_(t+s)∘G_t` and `V = F_t∘G_(s+t)`, compared on coefficients
/// `t^a s^b` with `a <= t_order`, `b <= s_order`.
pub fn check_prop310(f: &MapF, d: u32, s_order: u32, t_order: u32) -> Result<Report> {
    let mut r = Report::new("prop310");
    let fd = f.with_precision(d)?;
    let n = f.n();
    let h2 = PMap::from_polymap(fd.h(), 2);
    let di = deformation_inverse(&fd, d)?;
    let n_t = add_param(di.n_t());
    let n_ts = shift_t_by_s(di.n_t());
    let t = param_monomial(2, 0, 1, Rat::one());
    let s = param_monomial(2, 1, 1, Rat::one());
    let t_plus_s = &t + &s;
    let id = PMap::identity(n, 2, d);

    let u = id.sub(&n_t.mul_poly(&s));
    let v = id.add(&n_ts.mul_poly(&s));
    let g_t = id.add(&n_t.mul_poly(&t));
    let g_ts = id.add(&n_ts.mul_poly(&t_plus_s));
    let f_ts = id.sub(&h2.mul_poly(&t_plus_s));
    let f_t = id.sub(&h2.mul_poly(&t));

    let caps = [t_order, s_order];
    let caps = Some(&caps[..]);
    r.push(pmaps_equal("U(V) = z", &u.compose_to(&v, d), &id, d, caps));
    r.push(pmaps_equal("V(U) = z", &v.compose_to(&u, d), &id, d, caps));
    r.push(pmaps_equal(
        "U = F_(t+s)(G_t)",
        &u,
        &f_ts.compose_to(&g_t, d),
        d,
        caps,
    ));
    r.push(pmaps_equal(
        "V = F_t(G_(s+t))",
        &v,
        &f_t.compose_to(&g_ts, d),
        d,
        caps,
    ));
    r.note(format!(
        "coefficients compared for t^a s^b with a <= {t_order}, b <= {s_order}"
    ));
    Ok(r)
}

/// `U_t = U_0(z + tN_t)` solves `∂U_t/∂t = JU_t·N_t` with `U_(t=0) = U_0`.
pub fn check_gpde(u0: &PolyMap, h: &PolyMap, d: u32) -> Result<Report> {
    let mut r = Report::new("gpde");
    if u0.trunc() < d {
        return Err(Error::InsufficientPrecision {
            needed: d,
            available: u0.trunc(),
        });
    }
    let f = MapF::from_h(h.clone())?.with_precision(d)?;
    if u0.nvars() != f.n() {
        return Err(Error::DimensionMismatch {
            expected: f.n(),
            got: u0.nvars(),
        });
    }
    let di = deformation_inverse(&f, d)?;
    let u_t = PMap::from_polymap(&u0.truncate(d), 1).compose_to(&di.g_t(), d);
    let lhs = u_t.param_diff(0);
    let rhs = u_t.jacobian().mul_vec(di.n_t(), d);
    r.push(pmaps_equal("dU_t/dt = JU_t N_t", &lhs, &rhs, d, None));
    r.push(IdentityCheck::maps_equal(
        "U_(t=0) = U_0",
        &u_t.eval_params(&[Rat::from_integer(0.into())]),
        &u0.truncate(d),
        d,
    ));
    Ok(r)
}

/// The Euler-type identities for homogeneous `H` of degree `d >= 2`:
/// `N_t = (1/d) JN_t (z - (d-1)tN_t)`, `JN_t z = d(I + ((d-1)t/d) JN_t) N_t`,
/// and the series forms of `N_t` and `∂N_t/∂t` in `JN_t^k z`.
pub fn check_euler_identities(h: &PolyMap, d: u32) -> Result<Report> {
    let deg = homogeneous_degree(h)?;
    let mut r = Report::new("euler");
    let f = MapF::from_h(h.clone())?.with_precision(d)?;
    let n = f.n();
    let di = deformation_inverse(&f, d)?;
    let n_t = di.n_t();
    let jn = n_t.jacobian();
    let z = PMap::identity(n, 1, d);
    let t = t_poly(1);
    let d_rat = Rat::from_integer(BigInt::from(deg));
    let dm1 = Rat::from_integer(BigInt::from(deg - 1));
    let inv_d = d_rat.recip();

    let w = z.sub(&n_t.mul_poly(&t.scale(&dm1)));
    let rhs1 = jn.mul_vec(&w, d).scale(&inv_d);
    r.push(pmaps_equal(
        "N_t = (1/d) JN_t (z - (d-1) t N_t)",
        n_t,
        &rhs1,
        d,
        None,
    ));

    let jn_z = jn.mul_vec(&z, d);
    let corr = jn.mul_vec(n_t, d).mul_poly(&t.scale(&(&dm1 / &d_rat)));
    let rhs2 = n_t.add(&corr).scale(&d_rat);
    r.push(pmaps_equal(
        "JN_t z = d (I + ((d-1)t/d) JN_t) N_t",
        &jn_z,
        &rhs2,
        d,
        None,
    ));

    // v_k = JN_t^k z has order >= k+1, so k <= D-1 suffices.
    let mut vs = vec![jn_z.clone()];
    while (vs.len() as u32) < d {
        let next = jn.mul_vec(vs.last().expect("non-empty"), d);
        if next.is_zero() {
            break;
        }
        vs.push(next);
    }
    let ratio = t.scale(&(-(&dm1 / &d_rat)));
    let mut sum23 = PMap::zero(n, 1, d);
    let mut sum24 = PMap::zero(n, 1, d);
    let mut c = crate::series::MSeries::one(1, u32::MAX);
    for k in 0..vs.len() {
        sum23 = sum23.add(&vs[k].mul_poly(&c));
        if let Some(v) = vs.get(k + 1) {
            sum24 = sum24.add(&v.mul_poly(&c));
        }
        c = c.mul_to(&ratio, u32::MAX);
    }
    r.push(pmaps_equal(
        "N_t = (1/d) sum_k (-(d-1)t/d)^(k-1) JN_t^k z",
        n_t,
        &sum23.scale(&inv_d),
        d,
        None,
    ));
    r.push(pmaps_equal(
        "dN_t/dt = (1/d) sum_k (-(d-1)t/d)^(k-1) JN_t^(k+1) z",
        &n_t.param_diff(0),
        &sum24.scale(&inv_d),
        d,
        None,
    ));
    r.note(format!(
        "JN_t^k z vanishes through degree {d} for k > {}",
        vs.len()
    ));
    Ok(r)
}

/// Outcome of the polynomiality experiment for one `H` and layer bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PolynomialityProbe {
    pub bound: u32,
    /// Smallest `k` with `JH^k = 0` (exact, on the polynomial `H`).
    pub nilpotency_index: u32,
    /// Largest `m <= bound` with `N_[m] != 0`.
    pub last_nonzero_layer: Option<u32>,
    /// Number of stored terms in each layer `N_[1..=bound]`.
    pub layer_terms: Vec<usize>,
}

impl PolynomialityProbe {
    /// True when the layers vanish from some `m <= bound` on, i.e. the
    /// computed part of `N_t` is polynomial in `t`.
    pub fn vanishes_within_bound(&self) -> bool {
        self.last_nonzero_layer.is_none_or(|m| m < self.bound)
    }

    pub fn report(&self) -> Report {
        let mut r = Report::new("polynomiality probe");
        r.push(
            IdentityCheck::pass("JH nilpotent")
                .with_note(format!("index {}", self.nilpotency_index)),
        );
        let check = IdentityCheck::from_bool(
            format!("N_[m] = 0 beyond some m <= {}", self.bound),
            self.vanishes_within_bound(),
            || format!("N_[{}] != 0", self.bound),
        );
        r.push(check);
        r.note(match self.last_nonzero_layer {
            Some(m) => format!("largest nonzero layer: m = {m}"),
            None => "all layers vanish".into(),
        });
        r.note(format!(
            "experiment only: no claim is made beyond m = {}",
            self.bound
        ));
        r
    }
}

/// Computes `N_[1..=M]` exactly for homogeneous `H` with nilpotent `JH` and
/// reports where the layers stop.
pub fn polynomiality_probe(h: &PolyMap, bound: u32) -> Result<PolynomialityProbe> {
    let n = h.len();
    if h.is_zero() {
        return Ok(PolynomialityProbe {
            bound,
            nilpotency_index: 1,
            last_nonzero_layer: None,
            layer_terms: vec![0; bound as usize],
        });
    }
    let deg = homogeneous_degree(h)?;
    let cap = n as u32 * (deg - 1) + 1;
    let jh: SeriesMatrix = h.truncate(deg).with_trunc(cap + 1).jacobian();
    let k = jh
        .nilpotency_index(n as u32, cap)
        .ok_or(Error::NotNilpotent(cap))?;
    let exact = h.truncate(deg).with_trunc((deg - 1) * (bound + 1));
    let graded = invert_homogeneous(&MapF::from_h(exact)?, bound)?;
    let layer_terms: Vec<usize> = graded.layers().iter().map(PolyMap::term_count).collect();
    let last = layer_terms
        .iter()
        .rposition(|&c| c > 0)
        .map(|i| i as u32 + 1);
    Ok(PolynomialityProbe {
        bound,
        nilpotency_index: k,
        last_nonzero_layer: last,
        layer_terms,
    })
}

/// Whether `JH` is symmetric through the truncation; when it is, the PDE for
/// `N_t` is the inviscid Burgers equation in `n` variables.
pub fn symmetry_detector(h: &PolyMap) -> (bool, String) {
    let jh = h.jacobian();
    let d = jh.trunc();
    let n = h.len();
    for i in 0..n {
        for j in 0..h.nvars() {
            if j >= n || !jh.get(i, j).agrees_through(jh.get(j, i), d) {
                return (
                    false,
                    format!(
                        "JH is not symmetric: entries ({}, {}) and ({}, {}) differ",
                        i + 1,
                        j + 1,
                        j + 1,
                        i + 1
                    ),
                );
            }
        }
    }
    (
        true,
        format!("JH is symmetric through degree {d}: dN_t/dt = JN_t N_t is the {n}-dimensional inviscid Burgers equation"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;
    use crate::series::MSeries;

    fn map(n: usize, trunc: u32, comps: Vec<Vec<(Vec<i64>, i64)>>) -> PolyMap {
        PolyMap::new(
            comps
                .into_iter()
                .map(|c| {
                    MSeries::from_terms(n, trunc, c.into_iter().map(|(e, k)| (e, rat(k)))).unwrap()
                })
                .collect(),
        )
        .unwrap()
    }

    fn catalan(trunc: u32) -> PolyMap {
        map(1, trunc, vec![vec![(vec![2], 1)]])
    }

    /// `(z2^2, z3^2, 0)`: nilpotent of index 3 with `JH·H != 0`.
    fn chain(trunc: u32) -> PolyMap {
        map(
            3,
            trunc,
            vec![vec![(vec![0, 2, 0], 1)], vec![(vec![0, 0, 2], 1)], vec![]],
        )
    }

    /// `(z2^2, 0)`: `JH^2 = 0` and `JH·H = 0`.
    fn square_nil(trunc: u32) -> PolyMap {
        map(2, trunc, vec![vec![(vec![0, 2], 1)], vec![]])
    }

    #[test]
    fn lemma31_on_samples() {
        for h in [catalan(7), chain(7), square_nil(7)] {
            let r = check_lemma31(&MapF::from_h(h).unwrap(), 7).unwrap();
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn newp_both_branches() {
        let r = check_newp(&square_nil(6), 6).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.checks.len(), 5);
        let r = check_newp(&chain(6), 6).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.checks.len(), 2);
    }

    #[test]
    fn quadratic_nilpotent() {
        let r = check_bcw_quadratic_nilpotent(&square_nil(8), 8).unwrap();
        assert!(r.passed());
        assert_eq!(r.checks[1].status, crate::report::CheckStatus::Pass);
        let r = check_bcw_quadratic_nilpotent(&chain(8), 8).unwrap();
        assert!(r.passed());
        assert_eq!(r.checks[1].status, crate::report::CheckStatus::Skipped);
        let mixed = map(1, 8, vec![vec![(vec![2], 1), (vec![3], 1)]]);
        assert!(matches!(
            check_bcw_quadratic_nilpotent(&mixed, 8),
            Err(Error::NotHomogeneous(_))
        ));
    }

    #[test]
    fn group_law_in_t_and_s() {
        for h in [catalan(6), chain(6)] {
            let r = check_prop310(&MapF::from_h(h).unwrap(), 6, 3, 3).unwrap();
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn gpde_for_sample_u0() {
        let u0 = map(1, 6, vec![vec![(vec![1], 2), (vec![3], -1)]]);
        let r = check_gpde(&u0, &catalan(6), 6).unwrap();
        assert!(r.passed(), "{r:?}");
        let u0 = map(
            3,
            6,
            vec![
                vec![(vec![1, 1, 0], 1)],
                vec![(vec![0, 0, 1], 3)],
                vec![(vec![2, 0, 1], 1)],
            ],
        );
        assert!(check_gpde(&u0, &chain(6), 6).unwrap().passed());
    }

    #[test]
    fn euler_identities() {
        for h in [
            catalan(8),
            chain(8),
            map(2, 8, vec![vec![(vec![3, 0], 1)], vec![(vec![1, 2], 2)]]),
        ] {
            let r = check_euler_identities(&h, 8).unwrap();
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn euler_catches_wrong_degree_claim() {
        // Checking the identities with the wrong degree must fail.
        let f = MapF::from_h(catalan(6)).unwrap();
        let di = deformation_inverse(&f, 6).unwrap();
        let n_t = di.n_t();
        let z = PMap::identity(1, 1, 6);
        let wrong = n_t.jacobian().mul_vec(&z, 6).scale(&rat(3).recip());
        assert!(n_t.first_difference(&wrong, 6, None).is_some());
    }

    #[test]
    fn probe_on_chain() {
        let p = polynomiality_probe(&chain(2), 6).unwrap();
        assert_eq!(p.nilpotency_index, 3);
        assert!(p.vanishes_within_bound());
        assert!(p.report().passed());
        assert!(matches!(
            polynomiality_probe(&catalan(2), 4),
            Err(Error::NotNilpotent(_))
        ));
        let zero = PolyMap::zero(2, 3);
        assert_eq!(
            polynomiality_probe(&zero, 3).unwrap().last_nonzero_layer,
            None
        );
    }

    #[test]
    fn symmetric_jacobian() {
        let grad = map(2, 4, vec![vec![(vec![1, 1], 2)], vec![(vec![2, 0], 1)]]);
        assert!(symmetry_detector(&grad).0);
        assert!(!symmetry_detector(&chain(4)).0);
    }
}
