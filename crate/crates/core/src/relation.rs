//! Dense boolean relations on `0..n`.

use alloc::vec;
use alloc::vec::Vec;

/// A binary relation on `0..n`, stored row-major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Relation {
    n: usize,
    bits: Vec<bool>,
}

impl Relation {
    pub fn empty(n: usize) -> Self {
        Relation {
            n,
            bits: vec![false; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut r = Self::empty(n);
        for i in 0..n {
            r.set(i, i, true);
        }
        r
    }

    /// Builds a relation from its rows. Panics if the rows are not square.
    pub fn from_rows(rows: &[Vec<bool>]) -> Self {
        let n = rows.len();
        let mut r = Self::empty(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "relation rows must be square");
            for (j, &b) in row.iter().enumerate() {
                r.set(i, j, b);
            }
        }
        r
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.bits[i * self.n + j] = value;
    }

    pub fn rows(&self) -> Vec<Vec<bool>> {
        self.bits.chunks(self.n.max(1)).take(self.n).map(|r| r.to_vec()).collect()
    }

    /// Number of related pairs.
    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Pairs `(i, j)` in row-major order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(k, _)| (k / n, k % n))
    }

    pub fn converse(&self) -> Self {
        let mut r = Self::empty(self.n);
        for (i, j) in self.pairs() {
            r.set(j, i, true);
        }
        r
    }

    /// Warshall's algorithm, in place.
    pub fn close_transitively(&mut self) {
        let n = self.n;
        for k in 0..n {
            for i in 0..n {
                if !self.get(i, k) {
                    continue;
                }
                for j in 0..n {
                    if self.get(k, j) {
                        self.set(i, j, true);
                    }
                }
            }
        }
    }

    pub fn reflexive_transitive_closure(&self) -> Self {
        let mut r = self.clone();
        for i in 0..self.n {
            r.set(i, i, true);
        }
        r.close_transitively();
        r
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.n).all(|i| self.get(i, i))
    }

    /// First `(i, j, k)` with `i R j`, `j R k` but not `i R k`.
    pub fn transitivity_witness(&self) -> Option<(usize, usize, usize)> {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                if !self.get(i, j) {
                    continue;
                }
                for k in 0..n {
                    if self.get(j, k) && !self.get(i, k) {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }

    /// Elements `i` with `i R j`.
    pub fn predecessors(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&i| self.get(i, j))
    }

    /// Elements `j` with `i R j`.
    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&j| self.get(i, j))
    }
}
