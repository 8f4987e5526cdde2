use num::Zero;

use crate::error::{Error, Result};
use crate::rat::Rat;
use crate::series::{
    divide_by_coordinates, exponents_of_degree, laurent_inv_power, Exponent, MSeries, MapF,
    PolyMap, SeriesMatrix,
};

fn check_len(f: &MapF, k: &Exponent) -> Result<()> {
    if k.len() != f.n() {
        return Err(Error::DimensionMismatch {
            expected: f.n(),
            got: k.len(),
        });
    }
    Ok(())
}

/// `[z^k] G_i` for every `i`, as `Res_z j(F) F^(-k-1) z_i`.
///
/// All components share one Laurent expansion: `[z^k] G_i` is the
/// coefficient of `z^(-1-e_i)` in `j(F) · Π F_j^(-k_j-1)`.
pub fn jacobi_coefficients(f: &MapF, k: &Exponent) -> Result<Vec<Rat>> {
    check_len(f, k)?;
    let n = f.n();
    let s = k.degree();
    if s == 0 {
        return Ok(vec![Rat::zero(); n]);
    }
    let fs = f.with_precision(s)?;
    let window = -(n as i64) - 1;
    let inv = laurent_inv_power(&fs, k, window)?;
    let jf = fs.f().jacobian_det()?;
    let prod = inv.mul_series(&jf);
    (0..n)
        .map(|i| {
            let mut e = vec![-1i64; n];
            e[i] = -2;
            prod.coeff(&e)
        })
        .collect()
}

/// `[z^k] G_i` by the Jacobi residue formula (`i` is 0-based).
pub fn jacobi_coefficient(f: &MapF, i: usize, k: &Exponent) -> Result<Rat> {
    if i >= f.n() {
        return Err(Error::VariableOutOfRange { index: i, n: f.n() });
    }
    Ok(jacobi_coefficients(f, k)?.swap_remove(i))
}

/// `[z^k] G_i` for every `i`, when `H_i = z_i h_i`:
/// `[w^k] det(δ_ij - (w_i/f_i) ∂f_i/∂w_j) · w_i · f^k` with `f_i = 1/(1 - h_i)`.
pub fn lagrange_coefficients(f: &MapF, k: &Exponent) -> Result<Vec<Rat>> {
    check_len(f, k)?;
    divide_by_coordinates(f.h())?;
    let n = f.n();
    let s = k.degree();
    if s == 0 {
        return Ok(vec![Rat::zero(); n]);
    }
    let h = divide_by_coordinates(&f.h_polynomial(s, s + 1)?)?;
    let one = MSeries::one(n, s);
    let one_minus_h: Vec<MSeries> = h.components().iter().map(|hi| &one - hi).collect();
    let fs: Vec<MSeries> = one_minus_h
        .iter()
        .map(MSeries::inverse)
        .collect::<Result<_>>()?;
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        let w_over_f = one_minus_h[i].shift(&Exponent::unit(n, i));
        for j in 0..n {
            let p = w_over_f.mul_to(&fs[i].partial_diff(j), s);
            entries.push(if i == j { &one - &p } else { -&p });
        }
    }
    let det = SeriesMatrix::from_entries(n, n, entries).det();
    let mut acc = det;
    for (i, fi) in fs.iter().enumerate() {
        acc = acc.mul_to(&fi.pow_to(k.get(i), s), s);
    }
    Ok((0..n)
        .map(|i| match k.checked_sub(&Exponent::unit(n, i)) {
            Some(e) => acc.coeff(&e),
            None => Rat::zero(),
        })
        .collect())
}

/// `[z^k] G_i` by the Lagrange formula; fails with [`Error::NotDivisible`]
/// unless every `H_i` is divisible by `z_i`.
pub fn lagrange_coefficient(f: &MapF, i: usize, k: &Exponent) -> Result<Rat> {
    if i >= f.n() {
        return Err(Error::VariableOutOfRange { index: i, n: f.n() });
    }
    Ok(lagrange_coefficients(f, k)?.swap_remove(i))
}

fn assemble(f: &MapF, d: u32, coeffs: impl Fn(&Exponent) -> Result<Vec<Rat>>) -> Result<PolyMap> {
    let n = f.n();
    if f.h().trunc() < d {
        return Err(Error::InsufficientPrecision {
            needed: d,
            available: f.h().trunc(),
        });
    }
    let mut comps: Vec<MSeries> = (0..n).map(|_| MSeries::zero(n, d)).collect();
    for s in 1..=d {
        for k in exponents_of_degree(n, s) {
            for (i, c) in coeffs(&k)?.into_iter().enumerate() {
                if !c.is_zero() {
                    comps[i] = &comps[i] + &MSeries::monomial(n, d, k.clone(), c);
                }
            }
        }
    }
    PolyMap::new(comps)
}

/// The inverse through degree `d`, one Jacobi residue per exponent.
pub fn invert_jacobi(f: &MapF, d: u32) -> Result<PolyMap> {
    assemble(f, d, |k| jacobi_coefficients(f, k))
}

/// The inverse through degree `d`, one Lagrange coefficient per exponent.
pub fn invert_lagrange(f: &MapF, d: u32) -> Result<PolyMap> {
    divide_by_coordinates(f.h())?;
    assemble(f, d, |k| lagrange_coefficients(f, k))
}
