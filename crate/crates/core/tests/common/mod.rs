#![allow(dead_code)]

use formal_inverse::rat::ratio;
use formal_inverse::{MSeries, MapF, PolyMap, Rat};
use proptest::prelude::*;

pub fn coeff() -> impl Strategy<Value = Rat> {
    prop_oneof![
        (-2i64..=2)
            .prop_filter("nonzero", |c| *c != 0)
            .prop_map(|c| ratio(c, 1)),
        Just(ratio(1, 2)),
        Just(ratio(-1, 2)),
    ]
}

fn exponent(n: usize, lo: u32, hi: u32) -> impl Strategy<Value = Vec<i64>> {
    proptest::collection::vec(0i64..=hi as i64, n).prop_filter("degree in range", move |e| {
        let d: i64 = e.iter().sum();
        d >= lo as i64 && d <= hi as i64
    })
}

/// A sparse polynomial in `n` variables with degrees in `lo..=hi`.
pub fn poly(n: usize, lo: u32, hi: u32, trunc: u32) -> impl Strategy<Value = MSeries> {
    proptest::collection::vec((exponent(n, lo, hi), coeff()), 0..5)
        .prop_map(move |terms| MSeries::from_terms(n, trunc, terms).unwrap())
}

pub fn poly_map(n: usize, lo: u32, hi: u32, trunc: u32) -> impl Strategy<Value = PolyMap> {
    proptest::collection::vec(poly(n, lo, hi, trunc), n).prop_map(|c| PolyMap::new(c).unwrap())
}

/// `F = z - H` with `o(H) >= 2`, `deg H <= 3`, in 1 to 3 variables.
pub fn map_f(trunc: u32) -> impl Strategy<Value = MapF> {
    (1usize..=3)
        .prop_flat_map(move |n| poly_map(n, 2, 3, trunc))
        .prop_map(|h| MapF::from_h(h).unwrap())
}

/// Homogeneous `H` of degree 2 or 3.
pub fn homogeneous_h(trunc: u32) -> impl Strategy<Value = PolyMap> {
    (1usize..=3, 2u32..=3)
        .prop_flat_map(move |(n, d)| poly_map(n, d, d, trunc))
        .prop_filter("nonzero", |h| !h.is_zero())
}

pub fn point(n: usize) -> impl Strategy<Value = Vec<Rat>> {
    proptest::collection::vec((-3i64..=3, 1i64..=3).prop_map(|(a, b)| ratio(a, b)), n)
}

pub fn eval_map(m: &PolyMap, x: &[Rat]) -> Vec<Rat> {
    m.components()
        .iter()
        .map(|c| c.eval_polynomial(x))
        .collect()
}
