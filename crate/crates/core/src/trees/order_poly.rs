use num::{BigInt, BigUint, Zero};

use super::RootedTree;
use crate::rat::Rat;
use crate::tpoly::TPoly;

/// Number of maps `σ: V(T) → {1..m}` with `σ(parent) < σ(child)` along every
/// edge (the root is the minimum of the tree poset).
///
/// Dynamic program over the tree: for each vertex, the vector indexed by
/// `r` counts labelings of its subtree with `σ(v) = r`.
pub fn strict_order_count(t: &RootedTree, m: usize) -> BigUint {
    if m == 0 {
        return BigUint::zero();
    }
    counts_by_value(t, m).into_iter().sum()
}

fn counts_by_value(t: &RootedTree, m: usize) -> Vec<BigUint> {
    let mut out = vec![BigUint::from(1u32); m];
    for child in t.children() {
        let c = counts_by_value(child, m);
        // suffix[r] = Σ_{r' > r} c[r']
        let mut suffix = BigUint::zero();
        for r in (0..m).rev() {
            out[r] *= &suffix;
            suffix += &c[r];
        }
    }
    out
}

/// The strict order polynomial: the unique polynomial of degree `|T|` that
/// agrees with [`strict_order_count`] at `m = 0, 1, ..., |T|`.
pub fn order_polynomial(t: &RootedTree) -> TPoly {
    let values: Vec<Rat> = (0..=t.size())
        .map(|m| Rat::from_integer(BigInt::from(strict_order_count(t, m))))
        .collect();
    TPoly::interpolate_from_zero(&values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, ratio};
    use crate::trees::trees_up_to;

    /// Oracle: enumerate all `m^|T|` maps and keep the strictly increasing
    /// ones along parent→child edges.
    fn brute(t: &RootedTree, m: usize) -> u64 {
        let parents = t.parents();
        let k = parents.len();
        let mut sigma = vec![0usize; k];
        let mut count = 0;
        loop {
            let ok = parents
                .iter()
                .enumerate()
                .all(|(v, p)| p.is_none_or(|p| sigma[p] < sigma[v]));
            if ok {
                count += 1;
            }
            let mut i = 0;
            loop {
                if i == k {
                    return count;
                }
                sigma[i] += 1;
                if sigma[i] < m {
                    break;
                }
                sigma[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn examples() {
        assert_eq!(
            strict_order_count(&RootedTree::leaf(), 5),
            BigUint::from(5u32)
        );
        assert_eq!(
            strict_order_count(&RootedTree::chain(2), 4),
            BigUint::from(6u32)
        );
        assert_eq!(
            strict_order_count(&RootedTree::star(2), 3),
            BigUint::from(5u32)
        );
        assert_eq!(brute(&RootedTree::star(2), 3), 5);
    }

    #[test]
    fn dp_matches_brute_force() {
        for t in trees_up_to(6) {
            for m in 1..=4 {
                assert_eq!(
                    strict_order_count(&t, m),
                    BigUint::from(brute(&t, m)),
                    "{t} m={m}"
                );
            }
        }
    }

    #[test]
    fn small_polynomials() {
        assert_eq!(order_polynomial(&RootedTree::leaf()), TPoly::t());
        assert_eq!(
            order_polynomial(&RootedTree::chain(2)),
            TPoly::new(vec![rat(0), ratio(-1, 2), ratio(1, 2)])
        );
    }

    #[test]
    fn values_at_minus_one_and_one() {
        for t in trees_up_to(7) {
            let p = order_polynomial(&t);
            assert_eq!(p.degree(), Some(t.size()));
            let sign = if t.size() % 2 == 0 { rat(1) } else { rat(-1) };
            assert_eq!(p.eval(&rat(-1)), sign, "{t}");
            if t.size() >= 2 {
                assert_eq!(p.eval(&rat(1)), rat(0));
            }
            for m in 1..=t.size() + 3 {
                assert_eq!(
                    p.eval(&rat(m as i64)),
                    Rat::from_integer(BigInt::from(strict_order_count(&t, m)))
                );
            }
        }
    }
}
