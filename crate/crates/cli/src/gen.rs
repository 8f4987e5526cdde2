//! Seeded map generators and named presets.

use formal_inverse::rat::{rat, ratio};
use formal_inverse::series::exponents_of_degree;
use formal_inverse::{Exponent, MSeries, MapF, PolyMap, Rat};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::CliError;

fn coefficient(rng: &mut impl Rng) -> Rat {
    let choices = [rat(-2), rat(-1), rat(1), rat(2), ratio(1, 2), ratio(-1, 2)];
    choices.choose(rng).expect("non-empty").clone()
}

fn random_exponent(rng: &mut impl Rng, n: usize, deg: u32) -> Exponent {
    let mut e = vec![0u32; n];
    for _ in 0..deg {
        e[rng.gen_range(0..n)] += 1;
    }
    Exponent::new(e)
}

fn series(n: usize, trunc: u32, terms: Vec<(Exponent, Rat)>) -> MSeries {
    let terms = terms.into_iter().map(|(e, c)| {
        (
            e.as_slice()
                .iter()
                .map(|&k| i64::from(k))
                .collect::<Vec<_>>(),
            c,
        )
    });
    MSeries::from_terms(n, trunc, terms).expect("degrees within truncation")
}

/// `H` in `n` variables with up to three terms per component, each of
/// degree between 2 and `max_deg`.
pub fn random_h(rng: &mut impl Rng, n: usize, max_deg: u32, trunc: u32) -> PolyMap {
    let comps = (0..n)
        .map(|_| {
            let k = rng.gen_range(0..=3);
            let terms = (0..k)
                .map(|_| {
                    let deg = rng.gen_range(2..=max_deg);
                    (random_exponent(rng, n, deg), coefficient(rng))
                })
                .collect();
            series(n, trunc, terms)
        })
        .collect();
    PolyMap::new(comps).expect("n components in n variables")
}

/// Homogeneous `H` of degree `d`, not identically zero.
pub fn random_homogeneous(rng: &mut impl Rng, n: usize, d: u32, trunc: u32) -> PolyMap {
    loop {
        let comps: Vec<MSeries> = (0..n)
            .map(|_| {
                let k = rng.gen_range(0..=3);
                let terms = (0..k)
                    .map(|_| (random_exponent(rng, n, d), coefficient(rng)))
                    .collect();
                series(n, trunc, terms)
            })
            .collect();
        let h = PolyMap::new(comps).expect("n components in n variables");
        if !h.is_zero() {
            return h;
        }
    }
}

/// `count` maps `z - H` with `n` in 1..=3 and `deg H <= 4`.
pub fn corpus(seed: u64, count: usize, trunc: u32) -> Vec<MapF> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=3);
            MapF::from_h(random_h(&mut rng, n, 4.min(trunc.max(2)), trunc)).expect("o(H) >= 2")
        })
        .collect()
}

/// `count` homogeneous `H` with degree in {2, 3} and `n` in 1..=3.
pub fn homogeneous_corpus(seed: u64, count: usize, trunc: u32) -> Vec<PolyMap> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=3);
            let d = rng.gen_range(2..=3);
            random_homogeneous(&mut rng, n, d, trunc)
        })
        .collect()
}

pub const PRESETS: [&str; 4] = [
    "catalan",
    "dense-cubic",
    "nilpotent-square",
    "nilpotent-chain",
];

/// A named map at truncation `trunc`.
pub fn preset(name: &str, trunc: u32) -> Result<MapF, CliError> {
    let min = if name == "dense-cubic" { 3 } else { 2 };
    if trunc < min {
        return Err(CliError::Input(format!("preset {name} needs D >= {min}")));
    }
    let h = match name {
        "catalan" => PolyMap::new(vec![series(1, trunc, vec![(Exponent::new([2]), rat(1))])]),
        "dense-cubic" => {
            // Every cubic monomial in every component, coefficients from a
            // fixed pattern over {-2, -1, -1/2, 1/2, 1, 2}.
            let pattern = [rat(1), rat(-1), ratio(1, 2), rat(2), ratio(-1, 2), rat(-2)];
            let monomials = exponents_of_degree(3, 3);
            let comps = (0..3)
                .map(|i| {
                    let terms = monomials
                        .iter()
                        .enumerate()
                        .map(|(k, e)| (e.clone(), pattern[(2 * i + k) % pattern.len()].clone()))
                        .collect();
                    series(3, trunc, terms)
                })
                .collect();
            PolyMap::new(comps)
        }
        "nilpotent-square" => PolyMap::new(vec![
            series(2, trunc, vec![(Exponent::new([0, 2]), rat(1))]),
            series(2, trunc, vec![]),
        ]),
        "nilpotent-chain" => PolyMap::new(vec![
            series(3, trunc, vec![(Exponent::new([0, 2, 0]), rat(1))]),
            series(3, trunc, vec![(Exponent::new([0, 0, 2]), rat(1))]),
            series(3, trunc, vec![]),
        ]),
        other => {
            return Err(CliError::Input(format!(
                "unknown preset '{other}' (expected one of {})",
                PRESETS.join(", ")
            )))
        }
    };
    MapF::from_h(h.map_err(CliError::Library)?).map_err(CliError::Library)
}
