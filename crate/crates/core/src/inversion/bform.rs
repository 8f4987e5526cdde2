use std::collections::{BTreeMap, HashSet};

use super::GradedInverse;
use crate::error::{Error, Result};
use crate::rat::{factorial, Rat};
use crate::series::{MSeries, MapF, PolyMap};

/// The symmetric `d`-linear form `B` with `B(z, ..., z) = H(z)` for a
/// homogeneous `H` of degree `d`.
///
/// Built by polarization: a monomial `c z^α` contributes `c α!/d!` to every
/// word `(k_1, ..., k_d)` whose letters have multiset `α`, and
/// `B_i(U¹, ..., U^d) = Σ_words coef · Π_j U^j_{k_j}`.
#[derive(Clone, Debug)]
pub struct BForm {
    h: PolyMap,
    d: u32,
    /// word -> (component, coefficient) pairs.
    words: BTreeMap<Vec<usize>, Vec<(usize, Rat)>>,
    prefixes: HashSet<Vec<usize>>,
}

impl BForm {
    pub fn new(h: &PolyMap) -> Result<Self> {
        let d = h.homogeneous_degree().ok_or(Error::NotHomogeneous(None))?;
        if d == 0 {
            return Err(Error::DegreeTooSmall(0));
        }
        let d_fact = Rat::from_integer(factorial(d));
        let mut words: BTreeMap<Vec<usize>, Vec<(usize, Rat)>> = BTreeMap::new();
        for (i, hi) in h.components().iter().enumerate() {
            for (alpha, c) in hi.terms() {
                let coef = c * Rat::from_integer(alpha.factorial()) / &d_fact;
                let letters: Vec<usize> = alpha
                    .as_slice()
                    .iter()
                    .enumerate()
                    .flat_map(|(k, &m)| std::iter::repeat_n(k, m as usize))
                    .collect();
                for w in distinct_permutations(&letters) {
                    words.entry(w).or_default().push((i, coef.clone()));
                }
            }
        }
        let mut prefixes = HashSet::new();
        for w in words.keys() {
            for j in 0..=w.len() {
                prefixes.insert(w[..j].to_vec());
            }
        }
        Ok(BForm {
            h: h.clone(),
            d,
            words,
            prefixes,
        })
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn h(&self) -> &PolyMap {
        &self.h
    }

    /// `B(args)` through degree `cap`.
    pub fn apply_to(&self, args: &[&PolyMap], cap: u32) -> Result<PolyMap> {
        if args.len() != self.d as usize {
            return Err(Error::WrongArgumentCount {
                expected: self.d as usize,
                got: args.len(),
            });
        }
        let n = self.h.len();
        let nv = args[0].nvars();
        for a in args {
            if a.len() != self.h.nvars() || a.nvars() != nv {
                return Err(Error::DimensionMismatch {
                    expected: self.h.nvars(),
                    got: a.len(),
                });
            }
        }
        let trunc_bound = args.iter().map(|a| a.trunc()).min().unwrap_or(cap);
        let mut out: Vec<Option<MSeries>> = vec![None; n];
        let mut word = Vec::with_capacity(self.d as usize);
        self.walk(args, cap, &mut word, MSeries::one(nv, cap), &mut out);
        let comps = out
            .into_iter()
            .map(|c| c.unwrap_or_else(|| MSeries::zero(nv, trunc_bound.min(cap))))
            .collect();
        PolyMap::new(comps)
    }

    fn walk(
        &self,
        args: &[&PolyMap],
        cap: u32,
        word: &mut Vec<usize>,
        prod: MSeries,
        out: &mut [Option<MSeries>],
    ) {
        let j = word.len();
        if j == self.d as usize {
            for (i, c) in &self.words[word.as_slice()] {
                let term = prod.scale(c);
                out[*i] = Some(match out[*i].take() {
                    Some(acc) => &acc + &term,
                    None => term,
                });
            }
            return;
        }
        for k in 0..self.h.nvars() {
            word.push(k);
            if self.prefixes.contains(word.as_slice()) {
                let next = prod.mul_to(args[j].component(k), cap);
                self.walk(args, cap, word, next, out);
            }
            word.pop();
        }
    }
}

/// All distinct orderings of a sorted sequence, in lexicographic order.
fn distinct_permutations(sorted: &[usize]) -> Vec<Vec<usize>> {
    fn rec(
        counts: &mut BTreeMap<usize, usize>,
        len: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        let keys: Vec<usize> = counts
            .iter()
            .filter(|(_, &c)| c > 0)
            .map(|(&k, _)| k)
            .collect();
        for k in keys {
            *counts.get_mut(&k).unwrap() -= 1;
            cur.push(k);
            rec(counts, len, cur, out);
            cur.pop();
            *counts.get_mut(&k).unwrap() += 1;
        }
    }
    let mut counts = BTreeMap::new();
    for &k in sorted {
        *counts.entry(k).or_insert(0) += 1;
    }
    let mut out = Vec::new();
    rec(&mut counts, sorted.len(), &mut Vec::new(), &mut out);
    out
}

/// `B(U¹, ..., U^d)`, exact (no truncation beyond what the arguments carry).
pub fn b_form_apply(b: &BForm, args: &[&PolyMap]) -> Result<PolyMap> {
    b.apply_to(args, u32::MAX)
}

/// Compositions of `m` into `parts` non-negative parts, lexicographic.
fn compositions(m: usize, parts: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, parts: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() + 1 == parts {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(left - k, parts, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, parts, &mut Vec::with_capacity(parts), &mut out);
    out
}

/// Layers `N_[1..=M]` for homogeneous `H` of degree `d >= 2`:
/// `N_[0] = z`, `N_[1] = H`, and
/// `N_[m+1] = Σ_{k_1+...+k_d = m} B(N_[k_1], ..., N_[k_d])`.
///
/// `H` is taken as the exact polynomial it stores. Layer `m` is homogeneous
/// of degree `(d-1)m + 1`, so the sum is exact through degree `(d-1)(M+1)`.
pub fn invert_homogeneous(f: &MapF, layers: u32) -> Result<GradedInverse> {
    let d = match f.homogeneous_degree() {
        Some(d) if d >= 2 => d,
        Some(d) => return Err(Error::DegreeTooSmall(d)),
        None => return Err(Error::NotHomogeneous(None)),
    };
    let n = f.n();
    let trunc = (d - 1) * (layers + 1);
    let h = f.h().with_trunc(trunc);
    let b = BForm::new(&h)?;
    let mut all: Vec<PolyMap> = vec![PolyMap::identity(n, trunc)];
    if layers >= 1 {
        all.push(h.clone());
    }
    for m in 1..layers as usize {
        let mut acc = PolyMap::zero(n, trunc);
        for ks in compositions(m, d as usize) {
            let args: Vec<&PolyMap> = ks.iter().map(|&k| &all[k]).collect();
            acc = acc.add(&b.apply_to(&args, trunc)?);
        }
        all.push(acc);
    }
    all.remove(0);
    Ok(GradedInverse::new(h, all, trunc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inversion::invert_recurrent;
    use crate::rat::rat;
    use crate::series::Exponent;

    fn square() -> PolyMap {
        PolyMap::new(vec![MSeries::from_terms(1, 9, [(vec![2], rat(1))]).unwrap()]).unwrap()
    }

    /// `B_i = (1/d!) Σ_{k_1..k_d} Π_j U^j_{k_j} ∂_{k_1}⋯∂_{k_d} H_i`, read
    /// off literally from the directional-derivative form.
    fn by_derivatives(h: &PolyMap, args: &[&PolyMap]) -> PolyMap {
        let d = args.len();
        let n = h.nvars();
        let nv = args[0].nvars();
        let mut comps = Vec::new();
        for hi in h.components() {
            let mut acc = MSeries::zero(nv, u32::MAX);
            let mut idx = vec![0usize; d];
            loop {
                let mut beta = Exponent::zero(n);
                for &k in &idx {
                    beta = beta.with(k, beta.get(k) + 1);
                }
                let c = hi.partial_diff_multi(&beta).constant_term();
                if c != rat(0) {
                    let mut p = MSeries::constant(nv, u32::MAX, c);
                    for (j, &k) in idx.iter().enumerate() {
                        p = p.mul_to(args[j].component(k), u32::MAX);
                    }
                    acc = &acc + &p;
                }
                let mut pos = 0;
                loop {
                    if pos == d {
                        comps.push(acc.scale(&Rat::from_integer(factorial(d as u32)).recip()));
                        break;
                    }
                    idx[pos] += 1;
                    if idx[pos] < n {
                        break;
                    }
                    idx[pos] = 0;
                    pos += 1;
                }
                if pos == d {
                    break;
                }
            }
        }
        PolyMap::new(comps).unwrap()
    }

    fn cubic2() -> PolyMap {
        PolyMap::new(vec![
            MSeries::from_terms(2, 9, [(vec![2, 1], rat(3)), (vec![0, 3], rat(-1))]).unwrap(),
            MSeries::from_terms(
                2,
                9,
                [(vec![1, 2], crate::rat::ratio(1, 2)), (vec![3, 0], rat(2))],
            )
            .unwrap(),
        ])
        .unwrap()
    }

    fn sample_args() -> Vec<PolyMap> {
        let s = |terms: &[(Vec<i64>, i64)]| {
            MSeries::from_terms(2, 9, terms.iter().map(|(e, c)| (e.clone(), rat(*c)))).unwrap()
        };
        vec![
            PolyMap::new(vec![
                s(&[(vec![1, 0], 1), (vec![0, 2], 2)]),
                s(&[(vec![0, 1], -1)]),
            ])
            .unwrap(),
            PolyMap::new(vec![
                s(&[(vec![1, 1], 1)]),
                s(&[(vec![2, 0], 1), (vec![0, 1], 3)]),
            ])
            .unwrap(),
            PolyMap::new(vec![s(&[(vec![0, 1], 2)]), s(&[(vec![1, 0], 1)])]).unwrap(),
        ]
    }

    #[test]
    fn square_polarizes_to_product() {
        let b = BForm::new(&square()).unwrap();
        let u =
            PolyMap::new(vec![MSeries::from_terms(1, 9, [(vec![3], rat(2))]).unwrap()]).unwrap();
        let z = PolyMap::identity(1, 9);
        let uz = b_form_apply(&b, &[&u, &z]).unwrap();
        assert_eq!(uz.component(0).coeff_of(&[4]), rat(2));
        assert_eq!(uz.component(0).len(), 1);
        assert_eq!(b_form_apply(&b, &[&z, &z]).unwrap().truncate(9), square());
    }

    #[test]
    fn diagonal_recovers_h() {
        let h = cubic2();
        let b = BForm::new(&h).unwrap();
        let z = PolyMap::identity(2, 9);
        assert_eq!(b_form_apply(&b, &[&z, &z, &z]).unwrap().truncate(9), h);
    }

    #[test]
    fn symmetric_and_matches_derivative_form() {
        let h = cubic2();
        let b = BForm::new(&h).unwrap();
        let a = sample_args();
        let base = b_form_apply(&b, &[&a[0], &a[1], &a[2]]).unwrap();
        for p in [[0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            assert_eq!(
                b_form_apply(&b, &[&a[p[0]], &a[p[1]], &a[p[2]]]).unwrap(),
                base
            );
        }
        let lit = by_derivatives(&h, &[&a[0], &a[1], &a[2]]);
        assert!(base.agrees_through(&lit, 9));
    }

    #[test]
    fn argument_count_and_homogeneity_errors() {
        let b = BForm::new(&square()).unwrap();
        let z = PolyMap::identity(1, 9);
        assert!(matches!(
            b_form_apply(&b, &[&z]),
            Err(Error::WrongArgumentCount { .. })
        ));
        let mixed = PolyMap::new(vec![MSeries::from_terms(
            1,
            9,
            [(vec![2], rat(1)), (vec![3], rat(1))],
        )
        .unwrap()])
        .unwrap();
        assert!(BForm::new(&mixed).is_err());
        assert!(invert_homogeneous(&MapF::from_h(mixed).unwrap(), 3).is_err());
    }

    #[test]
    fn square_layers() {
        let f = MapF::from_h(square()).unwrap();
        let g = invert_homogeneous(&f, 3).unwrap();
        let layer = |m: usize| g.layer(m).unwrap().component(0).clone();
        assert_eq!(
            layer(2),
            MSeries::from_terms(1, 4, [(vec![3], rat(2))]).unwrap()
        );
        assert_eq!(
            layer(3),
            MSeries::from_terms(1, 4, [(vec![4], rat(5))]).unwrap()
        );
        assert_eq!(g.trunc(), 4);
    }

    #[test]
    fn matches_recurrent_layers() {
        let f = MapF::from_h(cubic2()).unwrap();
        let hom = invert_homogeneous(&f, 4).unwrap();
        assert_eq!(hom.trunc(), 10);
        let rec = invert_recurrent(&f.with_precision(9).unwrap(), 9).unwrap();
        for m in 1..=4 {
            assert!(
                hom.layer(m)
                    .unwrap()
                    .agrees_through(rec.layer(m).unwrap(), 9),
                "layer {m}"
            );
        }
        assert!(hom.layer_bound_checks().iter().all(|c| c.passed()));
    }

    #[test]
    fn compositions_enumerate() {
        assert_eq!(compositions(2, 2), vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
        assert_eq!(compositions(3, 3).len(), 10);
        assert_eq!(distinct_permutations(&[0, 0, 1]).len(), 3);
    }
}
