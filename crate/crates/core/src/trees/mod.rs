//! Rooted trees up to root-preserving isomorphism.
//!
//! A [`RootedTree`] is kept in canonical form: every child list is sorted
//! under the tree order (size first, then child lists lexicographically), so
//! structural equality is isomorphism.

mod order_poly;
mod tree_poly;

pub use order_poly::{order_polynomial, strict_order_count};
pub use tree_poly::{tree_poly, TreeExpansion};

use std::cmp::Ordering;
use std::fmt;

use num::{BigUint, One};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RootedTree {
    children: Vec<RootedTree>,
    size: usize,
    aut: BigUint,
}

impl RootedTree {
    pub fn leaf() -> Self {
        RootedTree {
            children: Vec::new(),
            size: 1,
            aut: BigUint::one(),
        }
    }

    /// A root joined to the given subtrees; the result is canonicalized.
    pub fn from_children(mut children: Vec<RootedTree>) -> Self {
        children.sort();
        let size = 1 + children.iter().map(|c| c.size).sum::<usize>();
        let mut aut: BigUint = children.iter().map(|c| c.aut.clone()).product();
        let mut i = 0;
        while i < children.len() {
            let mut j = i;
            while j < children.len() && children[j] == children[i] {
                j += 1;
            }
            for m in 2..=(j - i) {
                aut *= BigUint::from(m);
            }
            i = j;
        }
        RootedTree {
            children,
            size,
            aut,
        }
    }

    /// A path with `k` vertices, rooted at one end.
    pub fn chain(k: usize) -> Self {
        assert!(k >= 1);
        (1..k).fold(RootedTree::leaf(), |t, _| {
            RootedTree::from_children(vec![t])
        })
    }

    /// A root with `k` leaf children.
    pub fn star(k: usize) -> Self {
        RootedTree::from_children(vec![RootedTree::leaf(); k])
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn children(&self) -> &[RootedTree] {
        &self.children
    }

    /// Order of the root-preserving automorphism group.
    pub fn aut_order(&self) -> &BigUint {
        &self.aut
    }

    /// Parenthesis encoding, e.g. `(()())` for a root with two leaves.
    pub fn encoding(&self) -> String {
        let mut s = String::with_capacity(2 * self.size);
        self.encode_into(&mut s);
        s
    }

    fn encode_into(&self, s: &mut String) {
        s.push('(');
        for c in &self.children {
            c.encode_into(s);
        }
        s.push(')');
    }

    /// Parses a parenthesis encoding (any child order) into canonical form.
    pub fn parse(s: &str) -> Result<Self> {
        fn rec(b: &[u8], pos: &mut usize) -> Result<RootedTree> {
            if b.get(*pos) != Some(&b'(') {
                return Err(Error::Invalid(format!("expected '(' at position {}", *pos)));
            }
            *pos += 1;
            let mut children = Vec::new();
            while b.get(*pos) == Some(&b'(') {
                children.push(rec(b, pos)?);
            }
            if b.get(*pos) != Some(&b')') {
                return Err(Error::Invalid(format!("expected ')' at position {}", *pos)));
            }
            *pos += 1;
            Ok(RootedTree::from_children(children))
        }
        let b = s.trim().as_bytes();
        let mut pos = 0;
        let t = rec(b, &mut pos)?;
        if pos != b.len() {
            return Err(Error::Invalid(format!("trailing input at position {pos}")));
        }
        Ok(t)
    }

    /// Parent array in preorder: vertex 0 is the root, `parent[v] < v`.
    pub fn parents(&self) -> Vec<Option<usize>> {
        fn rec(t: &RootedTree, parent: Option<usize>, out: &mut Vec<Option<usize>>) {
            let me = out.len();
            out.push(parent);
            for c in &t.children {
                rec(c, Some(me), out);
            }
        }
        let mut out = Vec::with_capacity(self.size);
        rec(self, None, &mut out);
        out
    }

    /// Builds the canonical tree from a parent array (`parent[0]` is `None`).
    pub fn from_parents(parents: &[Option<usize>]) -> Result<Self> {
        let n = parents.len();
        if n == 0 || parents[0].is_some() {
            return Err(Error::Invalid("vertex 0 must be the root".into()));
        }
        let mut kids: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (v, p) in parents.iter().enumerate().skip(1) {
            match p {
                Some(p) if *p < n && *p != v => kids[*p].push(v),
                _ => return Err(Error::Invalid(format!("bad parent for vertex {v}"))),
            }
        }
        fn build(v: usize, kids: &[Vec<usize>], depth: usize) -> Result<RootedTree> {
            if depth > kids.len() {
                return Err(Error::Invalid("parent array contains a cycle".into()));
            }
            let children = kids[v]
                .iter()
                .map(|&c| build(c, kids, depth + 1))
                .collect::<Result<Vec<_>>>()?;
            Ok(RootedTree::from_children(children))
        }
        let t = build(0, &kids, 0)?;
        if t.size != n {
            return Err(Error::Invalid("parent array is not connected".into()));
        }
        Ok(t)
    }
}

impl Ord for RootedTree {
    fn cmp(&self, other: &Self) -> Ordering {
        self.size
            .cmp(&other.size)
            .then_with(|| self.children.cmp(&other.children))
    }
}

impl PartialOrd for RootedTree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for RootedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encoding())
    }
}

/// One representative per isomorphism class for each size `1..=max_size`;
/// entry `k - 1` holds the trees with `k` vertices in canonical order.
pub fn enumerate_trees(max_size: usize) -> Vec<Vec<RootedTree>> {
    let mut by_size: Vec<Vec<RootedTree>> = Vec::with_capacity(max_size);
    let mut all: Vec<RootedTree> = Vec::new();
    for size in 1..=max_size {
        let mut out = Vec::new();
        let mut chosen = Vec::new();
        child_multisets(&all, 0, size - 1, &mut chosen, &mut out);
        out.sort();
        all.extend(out.iter().cloned());
        by_size.push(out);
    }
    by_size
}

/// All trees with at most `max_size` vertices, flattened in enumeration order.
pub fn trees_up_to(max_size: usize) -> Vec<RootedTree> {
    enumerate_trees(max_size).into_iter().flatten().collect()
}

fn child_multisets(
    pool: &[RootedTree],
    start: usize,
    remaining: usize,
    chosen: &mut Vec<RootedTree>,
    out: &mut Vec<RootedTree>,
) {
    if remaining == 0 {
        out.push(RootedTree::from_children(chosen.clone()));
        return;
    }
    for idx in start..pool.len() {
        let t = &pool[idx];
        if t.size > remaining {
            // The pool is sorted by size first.
            break;
        }
        chosen.push(t.clone());
        child_multisets(pool, idx, remaining - t.size, chosen, out);
        chosen.pop();
    }
}
