use num::Zero;

use super::{MSeries, PolyMap};
use crate::rat::Rat;

/// A dense matrix of truncated series, stored row-major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SeriesMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<MSeries>,
}

impl SeriesMatrix {
    pub fn from_entries(rows: usize, cols: usize, entries: Vec<MSeries>) -> Self {
        assert_eq!(entries.len(), rows * cols);
        SeriesMatrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn identity(n: usize, nvars: usize, trunc: u32) -> Self {
        let entries = (0..n * n)
            .map(|k| {
                if k / n == k % n {
                    MSeries::one(nvars, trunc)
                } else {
                    MSeries::zero(nvars, trunc)
                }
            })
            .collect();
        SeriesMatrix::from_entries(n, n, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &MSeries {
        &self.entries[i * self.cols + j]
    }

    fn nvars(&self) -> usize {
        self.entries.first().map(MSeries::nvars).unwrap_or(0)
    }

    pub fn trunc(&self) -> u32 {
        self.entries
            .iter()
            .map(MSeries::trunc)
            .min()
            .unwrap_or(u32::MAX)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(MSeries::is_zero)
    }

    pub fn map(&self, f: impl Fn(&MSeries) -> MSeries) -> SeriesMatrix {
        SeriesMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn truncate(&self, d: u32) -> SeriesMatrix {
        self.map(|e| e.truncate(d))
    }

    pub fn scale(&self, c: &Rat) -> SeriesMatrix {
        self.map(|e| e.scale(c))
    }

    pub fn transpose(&self) -> SeriesMatrix {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j).clone());
            }
        }
        SeriesMatrix::from_entries(self.cols, self.rows, entries)
    }

    pub fn add(&self, other: &SeriesMatrix) -> SeriesMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        SeriesMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &SeriesMatrix) -> SeriesMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        SeriesMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Matrix product through degree `cap`.
    pub fn mul_to(&self, other: &SeriesMatrix, cap: u32) -> SeriesMatrix {
        assert_eq!(self.cols, other.rows);
        let nv = self.nvars();
        let mut entries = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc: Option<MSeries> = None;
                for k in 0..self.cols {
                    let p = self.get(i, k).mul_to(other.get(k, j), cap);
                    acc = Some(match acc {
                        None => p,
                        Some(a) => &a + &p,
                    });
                }
                entries.push(acc.unwrap_or_else(|| MSeries::zero(nv, cap)));
            }
        }
        SeriesMatrix::from_entries(self.rows, other.cols, entries)
    }

    pub fn pow_to(&self, k: u32, cap: u32) -> SeriesMatrix {
        assert_eq!(self.rows, self.cols);
        let mut acc = SeriesMatrix::identity(self.rows, self.nvars(), cap);
        for _ in 0..k {
            acc = acc.mul_to(self, cap);
        }
        acc
    }

    /// Applies the matrix to a column of series (`M·v`), through `cap`.
    pub fn mul_map(&self, v: &PolyMap, cap: u32) -> PolyMap {
        assert_eq!(self.cols, v.len());
        let nv = v.nvars();
        let comps = (0..self.rows)
            .map(|i| {
                let mut acc = MSeries::zero(nv, cap);
                let mut first = true;
                for k in 0..self.cols {
                    let p = self.get(i, k).mul_to(v.component(k), cap);
                    if first {
                        acc = p;
                        first = false;
                    } else {
                        acc = &acc + &p;
                    }
                }
                acc
            })
            .collect();
        PolyMap::new(comps).expect("rows share a variable set")
    }

    /// Smallest `k` in `1..=max_k` with `M^k = 0` through the truncation, if any.
    pub fn nilpotency_index(&self, max_k: u32, cap: u32) -> Option<u32> {
        let mut p = self.truncate(cap);
        for k in 1..=max_k {
            if p.is_zero() {
                return Some(k);
            }
            p = p.mul_to(self, cap);
        }
        None
    }

    /// Determinant through the smallest entry truncation.
    ///
    /// Gaussian elimination over the truncated series ring, pivoting on an
    /// entry with nonzero constant term (a unit) so that every division is
    /// exact. A column without a unit falls back to cofactor expansion of the
    /// remaining block.
    pub fn det(&self) -> MSeries {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let cap = self.trunc();
        let nv = self.nvars();
        let mut a: Vec<Vec<MSeries>> = (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j).truncate(cap)).collect())
            .collect();
        let mut det = MSeries::one(nv, cap);
        let mut negate = false;
        for k in 0..n {
            let pivot_row = (k..n).find(|&r| !a[r][k].constant_term().is_zero());
            let Some(r) = pivot_row else {
                let block: Vec<Vec<MSeries>> = a[k..].iter().map(|row| row[k..].to_vec()).collect();
                det = det.mul_to(&cofactor_det(&block, nv, cap), cap);
                break;
            };
            if r != k {
                a.swap(r, k);
                negate = !negate;
            }
            let inv = a[k][k].inverse().expect("pivot is a unit");
            det = det.mul_to(&a[k][k], cap);
            for i in k + 1..n {
                if a[i][k].is_zero() {
                    continue;
                }
                let factor = a[i][k].mul_to(&inv, cap);
                let (top, rest) = a.split_at_mut(i);
                let (pivot, row) = (&top[k], &mut rest[0]);
                for (x, p) in row.iter_mut().zip(pivot).skip(k + 1) {
                    *x = &*x - &factor.mul_to(p, cap);
                }
                row[k] = MSeries::zero(nv, cap);
            }
        }
        if negate {
            det = -&det;
        }
        det.truncate(cap)
    }
}

fn cofactor_det(m: &[Vec<MSeries>], nv: usize, cap: u32) -> MSeries {
    let n = m.len();
    match n {
        0 => MSeries::one(nv, cap),
        1 => m[0][0].truncate(cap),
        _ => {
            let mut acc = MSeries::zero(nv, cap);
            for i in 0..n {
                if m[i][0].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<MSeries>> = m
                    .iter()
                    .enumerate()
                    .filter(|&(r, _)| r != i)
                    .map(|(_, row)| row[1..].to_vec())
                    .collect();
                let term = m[i][0].mul_to(&cofactor_det(&minor, nv, cap), cap);
                acc = if i % 2 == 0 {
                    &acc + &term
                } else {
                    &acc - &term
                };
            }
            acc
        }
    }
}
