use std::collections::HashMap;

use num::BigInt;

use super::RootedTree;
use crate::error::{Error, Result};
use crate::rat::Rat;
use crate::series::{Exponent, MSeries, PolyMap};

/// Evaluates the labeled tree polynomials `𝒫_T` of a map `H`.
///
/// The sum over labelings is factored through the tree: for a subtree `S`
/// with root label `a`,
///
/// `Q_S(a) = Σ_β ∂^β H_a · W_S(β)`,  `W_S(β) = Σ_{child labels b, multiset(b) = β} Π_j Q_{S_j}(b_j)`,
///
/// which equals the sum of `Π_v D_{v⁺} H_v` over all labelings of `S` with
/// root label `a`. Both `Q` and the derivatives `∂^β H_a` are memoized per
/// canonical subtree, so a batch of trees shares work. Child-label branches
/// whose derivative multi-index already kills every `H_a` are pruned.
pub struct TreeExpansion<'a> {
    h: &'a PolyMap,
    cap: u32,
    max_deg: u32,
    derivs: HashMap<(usize, Exponent), MSeries>,
    subtrees: HashMap<RootedTree, Vec<MSeries>>,
}

impl<'a> TreeExpansion<'a> {
    /// `h` must be a self-map with `o(H) >= 2`; results are exact through
    /// `h.trunc()`.
    pub fn new(h: &'a PolyMap) -> Result<Self> {
        if h.len() != h.nvars() {
            return Err(Error::DimensionMismatch {
                expected: h.nvars(),
                got: h.len(),
            });
        }
        if let Some(o) = h.order() {
            if o < 2 {
                return Err(Error::NotCanonical(format!("o(H) = {o} < 2")));
            }
        }
        let max_deg = h
            .components()
            .iter()
            .filter_map(MSeries::max_degree)
            .max()
            .unwrap_or(0);
        Ok(TreeExpansion {
            h,
            cap: h.trunc(),
            max_deg,
            derivs: HashMap::new(),
            subtrees: HashMap::new(),
        })
    }

    fn n(&self) -> usize {
        self.h.len()
    }

    fn deriv(&mut self, a: usize, beta: &Exponent) -> MSeries {
        if let Some(d) = self.derivs.get(&(a, beta.clone())) {
            return d.clone();
        }
        let d = self.h.component(a).partial_diff_multi(beta);
        self.derivs.insert((a, beta.clone()), d.clone());
        d
    }

    /// `Σ_l P_{S,l}` for every root label, without the `1/|Aut|` weight.
    fn labeled_sums(&mut self, s: &RootedTree) -> Vec<MSeries> {
        if let Some(q) = self.subtrees.get(s) {
            return q.clone();
        }
        let n = self.n();
        let child_q: Vec<Vec<MSeries>> =
            s.children().iter().map(|c| self.labeled_sums(c)).collect();
        let mut weights: HashMap<Exponent, MSeries> = HashMap::new();
        let start = MSeries::one(n, self.cap);
        collect_weights(
            &child_q,
            0,
            &Exponent::zero(n),
            start,
            self.max_deg,
            self.cap,
            &mut weights,
        );

        let mut betas: Vec<&Exponent> = weights.keys().collect();
        betas.sort();
        let betas: Vec<Exponent> = betas.into_iter().cloned().collect();
        let mut out = Vec::with_capacity(n);
        for a in 0..n {
            let mut acc = MSeries::zero(n, self.cap);
            for beta in &betas {
                let d = self.deriv(a, beta);
                if d.is_zero() {
                    continue;
                }
                let term = weights[beta].mul_to(&d, self.cap);
                acc = &acc + &term;
            }
            out.push(acc.truncate(self.cap));
        }
        self.subtrees.insert(s.clone(), out.clone());
        out
    }

    /// `𝒫_{T,i} = (1/|Aut T|) Σ_{l(root) = i} P_{T,l}` for every `i`.
    pub fn tree_map(&mut self, t: &RootedTree) -> PolyMap {
        let aut = Rat::from_integer(BigInt::from(t.aut_order().clone())).recip();
        let q = self.labeled_sums(t);
        PolyMap::new(q.iter().map(|s| s.scale(&aut)).collect()).expect("shared variable set")
    }
}

fn collect_weights(
    child_q: &[Vec<MSeries>],
    j: usize,
    beta: &Exponent,
    prefix: MSeries,
    max_deg: u32,
    cap: u32,
    out: &mut HashMap<Exponent, MSeries>,
) {
    if j == child_q.len() {
        match out.get_mut(beta) {
            Some(w) => *w = &*w + &prefix,
            None => {
                out.insert(beta.clone(), prefix);
            }
        }
        return;
    }
    // Differentiating more than max_deg times kills every H_a.
    if beta.degree() + 1 > max_deg {
        return;
    }
    for (b, q) in child_q[j].iter().enumerate() {
        if q.is_zero() {
            continue;
        }
        let next = beta.with(b, beta.get(b) + 1);
        collect_weights(
            child_q,
            j + 1,
            &next,
            prefix.mul_to(q, cap),
            max_deg,
            cap,
            out,
        );
    }
}

/// `𝒫_{T,i}(z)` for a single tree and root label `i` (0-based).
pub fn tree_poly(t: &RootedTree, h: &PolyMap, i: usize) -> Result<MSeries> {
    if i >= h.len() {
        return Err(Error::VariableOutOfRange {
            index: i,
            n: h.len(),
        });
    }
    let mut engine = TreeExpansion::new(h)?;
    Ok(engine.tree_map(t).component(i).clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    /// Literal definition: sum over every labeling of `Π_v D_{v⁺} H_{l(v)}`.
    fn brute_tree_poly(t: &RootedTree, h: &PolyMap, i: usize) -> MSeries {
        let parents = t.parents();
        let k = parents.len();
        let n = h.len();
        let cap = h.trunc();
        let mut labels = vec![0usize; k];
        labels[0] = i;
        let mut acc = MSeries::zero(n, cap);
        loop {
            let mut prod = MSeries::one(n, cap);
            for v in 0..k {
                let mut beta = Exponent::zero(n);
                for (w, p) in parents.iter().enumerate() {
                    if *p == Some(v) {
                        beta = beta.with(labels[w], beta.get(labels[w]) + 1);
                    }
                }
                let f = h.component(labels[v]).partial_diff_multi(&beta);
                prod = prod.mul_to(&f, cap);
            }
            acc = &acc + &prod;
            let mut idx = 1;
            loop {
                if idx == k {
                    let aut = Rat::from_integer(BigInt::from(t.aut_order().clone()));
                    return acc.scale(&aut.recip());
                }
                labels[idx] += 1;
                if labels[idx] < n {
                    break;
                }
                labels[idx] = 0;
                idx += 1;
            }
        }
    }

    fn h1(trunc: u32) -> PolyMap {
        PolyMap::new(vec![
            MSeries::from_terms(1, trunc, [(vec![2], rat(1))]).unwrap()
        ])
        .unwrap()
    }

    #[test]
    fn single_variable_examples() {
        let h = h1(6);
        assert_eq!(
            tree_poly(&RootedTree::leaf(), &h, 0).unwrap(),
            h.component(0).clone()
        );
        assert_eq!(
            tree_poly(&RootedTree::chain(2), &h, 0).unwrap(),
            MSeries::from_terms(1, 6, [(vec![3], rat(2))]).unwrap()
        );
        assert_eq!(
            tree_poly(&RootedTree::star(2), &h, 0).unwrap(),
            MSeries::from_terms(1, 6, [(vec![4], rat(1))]).unwrap()
        );
        assert_eq!(
            tree_poly(&RootedTree::chain(3), &h, 0).unwrap(),
            MSeries::from_terms(1, 6, [(vec![4], rat(4))]).unwrap()
        );
    }

    #[test]
    fn factored_sum_matches_labeling_enumeration() {
        let h = PolyMap::new(vec![
            MSeries::from_terms(2, 7, [(vec![0, 2], rat(1)), (vec![1, 1], rat(-2))]).unwrap(),
            MSeries::from_terms(
                2,
                7,
                [(vec![2, 1], crate::rat::ratio(1, 2)), (vec![0, 3], rat(1))],
            )
            .unwrap(),
        ])
        .unwrap();
        let mut engine = TreeExpansion::new(&h).unwrap();
        for t in crate::trees::trees_up_to(5) {
            let fast = engine.tree_map(&t);
            for i in 0..2 {
                let brute = brute_tree_poly(&t, &h, i);
                assert!(
                    fast.component(i).agrees_through(&brute, 7),
                    "tree {t}, label {i}"
                );
                assert_eq!(fast.component(i).trunc(), 7);
            }
        }
    }

    #[test]
    fn bad_label() {
        assert!(tree_poly(&RootedTree::leaf(), &h1(4), 1).is_err());
    }
}
