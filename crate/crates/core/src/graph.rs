//! Circulant graphs on Z_n and their arithmetic invariants.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modular::{gcd, is_prime, mul_mod, sub_mod, SubgroupOfUnits};

/// Largest vertex count accepted by the factorial automorphism search.
pub const BRUTE_FORCE_MAX_VERTICES: u64 = 9;

/// Graph on Z_n with i ~ j iff j - i ∈ S. Vertices are 0..n.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CirculantGraph {
    n: u64,
    connection_set: Vec<u64>,
}

impl CirculantGraph {
    /// Builds the graph from a connection set given as integers mod n.
    /// The set must avoid 0 and be closed under negation; it is never
    /// symmetrized silently.
    pub fn from_connection_set(n: u64, s: impl IntoIterator<Item = i64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroModulus);
        }
        let set: BTreeSet<u64> = s.into_iter().map(|x| (x as i128).rem_euclid(n as i128) as u64).collect();
        if set.contains(&0) {
            return Err(Error::InvalidConnectionSet(format!("0 (mod {n}) is not a valid difference")));
        }
        if let Some(&s) = set.iter().find(|&&s| !set.contains(&(n - s))) {
            return Err(Error::InvalidConnectionSet(format!(
                "S is not symmetric: {s} in S but -{s} = {} is not",
                n - s
            )));
        }
        Ok(CirculantGraph { n, connection_set: set.into_iter().collect() })
    }

    /// X_n, no edges.
    pub fn empty(n: u64) -> Self {
        assert!(n >= 1);
        CirculantGraph { n, connection_set: Vec::new() }
    }

    /// K_n.
    pub fn complete(n: u64) -> Self {
        assert!(n >= 1);
        CirculantGraph { n, connection_set: (1..n).collect() }
    }

    /// C_n with S = {±1}.
    pub fn cycle(n: u64) -> Self {
        assert!(n >= 1);
        Self::from_connection_set(n, if n == 1 { vec![] } else { vec![1, -1] }).unwrap()
    }

    /// Paley graph on a prime p ≡ 1 (mod 4): S is the set of nonzero squares.
    pub fn paley(p: u64) -> Result<Self> {
        if !is_prime(p) || p % 4 != 1 {
            return Err(Error::InvalidConnectionSet(format!("Paley graph needs a prime p ≡ 1 mod 4, got {p}")));
        }
        let squares: BTreeSet<u64> = (1..p).map(|x| mul_mod(x, x, p)).collect();
        Ok(CirculantGraph { n: p, connection_set: squares.into_iter().collect() })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn connection_set(&self) -> &[u64] {
        &self.connection_set
    }

    pub fn degree(&self) -> usize {
        self.connection_set.len()
    }

    pub fn is_empty_graph(&self) -> bool {
        self.connection_set.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.connection_set.len() as u64 == self.n - 1
    }

    pub fn contains_difference(&self, d: u64) -> bool {
        self.connection_set.binary_search(&(d % self.n)).is_ok()
    }

    pub fn is_adjacent(&self, i: u64, j: u64) -> bool {
        self.contains_difference(sub_mod(j, i, self.n))
    }

    /// 0/1 adjacency matrix in natural vertex order.
    pub fn adjacency_matrix(&self) -> Vec<Vec<u8>> {
        let n = self.n;
        (0..n).map(|i| (0..n).map(|j| self.is_adjacent(i, j) as u8).collect()).collect()
    }

    /// Adjacency matrix with row/column `i` labelled by vertex `order[i]`.
    pub fn adjacency_matrix_ordered(&self, order: &[u64]) -> Result<Vec<Vec<u8>>> {
        check_permutation(order, self.n)?;
        Ok(order.iter().map(|&i| order.iter().map(|&j| self.is_adjacent(i, j) as u8).collect()).collect())
    }

    /// S ↦ aS as a sorted set.
    pub fn scaled_connection_set(&self, a: u64) -> Vec<u64> {
        let mut scaled: Vec<u64> = self.connection_set.iter().map(|&s| mul_mod(a, s, self.n)).collect();
        scaled.sort_unstable();
        scaled
    }

    /// E = {a ∈ Z_n^* : aS = S}.
    pub fn multiplier_group(&self) -> SubgroupOfUnits {
        let n = self.n;
        let elements: Vec<u64> =
            (0..n).filter(|&a| gcd(a, n) == 1 && self.scaled_connection_set(a) == self.connection_set).collect();
        SubgroupOfUnits::new(n, elements).expect("stabilizer of S is a subgroup")
    }

    /// The type k = |E|.
    pub fn graph_type(&self) -> u64 {
        self.multiplier_group().order() as u64
    }

    pub fn complement(&self) -> Self {
        let connection_set = (1..self.n).filter(|&d| !self.contains_difference(d)).collect();
        CirculantGraph { n: self.n, connection_set }
    }

    /// Counts the affine maps x ↦ ax + b with a ∈ E, checking each one
    /// against the edge relation. Requires prime n, where the count is n·k.
    pub fn affine_automorphism_count(&self) -> Result<u64> {
        if !is_prime(self.n) {
            return Err(Error::NotPrime(self.n));
        }
        let n = self.n;
        let e = self.multiplier_group();
        let mut count = 0;
        for &a in e.elements() {
            for b in 0..n {
                let map = |x: u64| (mul_mod(a, x, n) + b) % n;
                let preserves =
                    (0..n).all(|i| (0..n).all(|j| self.is_adjacent(i, j) == self.is_adjacent(map(i), map(j))));
                assert!(preserves, "x -> {a}x + {b} is not an automorphism");
                count += 1;
            }
        }
        debug_assert_eq!(count, n * e.order() as u64);
        Ok(count)
    }

    /// Whether the affine group is known to be all of Aut(X): n prime and
    /// the graph neither empty nor complete. Those two have Aut = S_n.
    pub fn affine_is_full_aut(&self) -> bool {
        is_prime(self.n) && !self.is_empty_graph() && !self.is_complete()
    }

    /// |Aut(X)| by testing all n! vertex permutations, with the default
    /// bound of [`BRUTE_FORCE_MAX_VERTICES`].
    pub fn brute_force_automorphism_count(&self) -> Result<u64> {
        self.brute_force_automorphism_count_bounded(BRUTE_FORCE_MAX_VERTICES)
    }

    pub fn brute_force_automorphism_count_bounded(&self, max_vertices: u64) -> Result<u64> {
        if self.n > max_vertices {
            return Err(Error::RangeExceeded { what: "vertex count", value: self.n, bound: max_vertices });
        }
        let n = self.n as usize;
        let adj = self.adjacency_matrix();
        // One work item per image of vertex 0; the sum does not depend on scheduling.
        Ok((0..n)
            .into_par_iter()
            .map(|first| {
                let mut rest: Vec<usize> = (0..n).filter(|&v| v != first).collect();
                let mut perm = Vec::with_capacity(n);
                let mut count = 0u64;
                loop {
                    perm.clear();
                    perm.push(first);
                    perm.extend_from_slice(&rest);
                    if is_automorphism(&adj, &perm) {
                        count += 1;
                    }
                    if !next_permutation(&mut rest) {
                        break;
                    }
                }
                count
            })
            .sum())
    }
}

fn is_automorphism(adj: &[Vec<u8>], perm: &[usize]) -> bool {
    let n = perm.len();
    (0..n).all(|i| (i + 1..n).all(|j| adj[i][j] == adj[perm[i]][perm[j]]))
}

/// Advances to the next lexicographic permutation; false after the last one.
fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let Some(i) = (0..v.len() - 1).rev().find(|&i| v[i] < v[i + 1]) else {
        return false;
    };
    let j = (i + 1..v.len()).rev().find(|&j| v[j] > v[i]).unwrap();
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

pub(crate) fn check_permutation(order: &[u64], n: u64) -> Result<()> {
    let mut seen = vec![false; n as usize];
    if order.len() as u64 != n {
        return Err(Error::InvalidPermutation(n as usize));
    }
    for &v in order {
        if v >= n || std::mem::replace(&mut seen[v as usize], true) {
            return Err(Error::InvalidPermutation(n as usize));
        }
    }
    Ok(())
}
