//! Magic unitaries with exact rational matrix entries.
//!
//! A witness is an n×n array of m×m rational matrices. It is a magic unitary
//! when every entry is an orthogonal projection (e² = e = eᵀ) and every row
//! and column is a partition of unity: entries pairwise orthogonal, summing
//! to the identity. If such a matrix commutes with the adjacency matrix and
//! has two non-commuting entries, the graph has quantum symmetry.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{check_permutation, CirculantGraph};

/// Square matrix over Q.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<String>>", into = "Vec<Vec<String>>")]
pub struct RatMatrix {
    size: usize,
    data: Vec<BigRational>,
}

impl RatMatrix {
    pub fn zeros(size: usize) -> Self {
        RatMatrix { size, data: vec![BigRational::zero(); size * size] }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size);
        for i in 0..size {
            m.data[i * size + i] = BigRational::one();
        }
        m
    }

    /// Builds a matrix from rows of (numerator, denominator) pairs.
    pub fn from_fractions(rows: &[&[(i64, i64)]]) -> Self {
        let size = rows.len();
        let data = rows
            .iter()
            .flat_map(|row| {
                assert_eq!(row.len(), size, "matrix must be square");
                row.iter().map(|&(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
            })
            .collect();
        RatMatrix { size, data }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.size + j]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let s = self.size;
        RatMatrix { size: s, data: (0..s * s).map(|idx| self.data[(idx % s) * s + idx / s].clone()).collect() }
    }

    /// e² = e = eᵀ.
    pub fn is_projection(&self) -> bool {
        &(self * self) == self && self.transpose() == *self
    }

    pub fn commutes_with(&self, other: &RatMatrix) -> bool {
        self * other == other * self
    }
}

impl Add for &RatMatrix {
    type Output = RatMatrix;

    fn add(self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!(self.size, rhs.size);
        RatMatrix { size: self.size, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &RatMatrix {
    type Output = RatMatrix;

    fn sub(self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!(self.size, rhs.size);
        RatMatrix { size: self.size, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl Mul for &RatMatrix {
    type Output = RatMatrix;

    fn mul(self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!(self.size, rhs.size);
        let s = self.size;
        let mut out = RatMatrix::zeros(s);
        for i in 0..s {
            for k in 0..s {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..s {
                    out.data[i * s + j] += a * rhs.get(k, j);
                }
            }
        }
        out
    }
}

impl From<RatMatrix> for Vec<Vec<String>> {
    fn from(m: RatMatrix) -> Self {
        m.data.chunks(m.size.max(1)).take(m.size).map(|row| row.iter().map(ToString::to_string).collect()).collect()
    }
}

impl TryFrom<Vec<Vec<String>>> for RatMatrix {
    type Error = String;

    fn try_from(rows: Vec<Vec<String>>) -> std::result::Result<Self, String> {
        let size = rows.len();
        let mut data = Vec::with_capacity(size * size);
        for row in rows {
            if row.len() != size {
                return Err(format!("expected {size} columns, got {}", row.len()));
            }
            for s in row {
                data.push(s.parse::<BigRational>().map_err(|e| format!("bad rational {s:?}: {e}"))?);
            }
        }
        Ok(RatMatrix { size, data })
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = self.clone().into();
        let rows: Vec<String> = rows.into_iter().map(|r| format!("[{}]", r.join(", "))).collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

/// The rank-one projection onto e_1 in Q².
pub fn projection_p() -> RatMatrix {
    RatMatrix::from_fractions(&[&[(1, 1), (0, 1)], &[(0, 1), (0, 1)]])
}

/// The rank-one projection onto (1, 1)/√2 in Q².
pub fn projection_q() -> RatMatrix {
    RatMatrix::from_fractions(&[&[(1, 2), (1, 2)], &[(1, 2), (1, 2)]])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MagicUnitaryWitness {
    pub label: String,
    pub n: usize,
    pub m: usize,
    pub entries: Vec<Vec<RatMatrix>>,
}

/// First condition that fails in [`verify_magic_unitary`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "defect", rename_all = "snake_case")]
pub enum WitnessDefect {
    Shape { reason: String },
    NotProjection { i: usize, j: usize },
    RowNotOrthogonal { row: usize, j1: usize, j2: usize },
    ColumnNotOrthogonal { col: usize, i1: usize, i2: usize },
    RowSum { row: usize },
    ColumnSum { col: usize },
}

impl fmt::Display for WitnessDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WitnessDefect::Shape { reason } => write!(f, "malformed witness: {reason}"),
            WitnessDefect::NotProjection { i, j } => write!(f, "entry ({i}, {j}) is not a projection"),
            WitnessDefect::RowNotOrthogonal { row, j1, j2 } => {
                write!(f, "row {row}: entries {j1} and {j2} are not orthogonal")
            }
            WitnessDefect::ColumnNotOrthogonal { col, i1, i2 } => {
                write!(f, "column {col}: entries {i1} and {i2} are not orthogonal")
            }
            WitnessDefect::RowSum { row } => write!(f, "row {row} does not sum to the identity"),
            WitnessDefect::ColumnSum { col } => write!(f, "column {col} does not sum to the identity"),
        }
    }
}

impl MagicUnitaryWitness {
    pub fn entry(&self, i: usize, j: usize) -> &RatMatrix {
        &self.entries[i][j]
    }

    pub fn is_magic_unitary(&self) -> bool {
        verify_magic_unitary(self).is_ok()
    }

    /// First pair of entries (in row-major order) that do not commute.
    pub fn noncommuting_pair(&self) -> Option<[(usize, usize); 2]> {
        let cells: Vec<(usize, usize)> = (0..self.n).flat_map(|i| (0..self.n).map(move |j| (i, j))).collect();
        for (x, &(i1, j1)) in cells.iter().enumerate() {
            for &(i2, j2) in &cells[x + 1..] {
                if !self.entry(i1, j1).commutes_with(self.entry(i2, j2)) {
                    return Some([(i1, j1), (i2, j2)]);
                }
            }
        }
        None
    }
}

/// The 2×2 magic unitary (p, 1-p; 1-p, p) for a projection p.
pub fn build_u_p(p: RatMatrix) -> MagicUnitaryWitness {
    let q = &RatMatrix::identity(p.size()) - &p;
    MagicUnitaryWitness {
        label: "u_p".into(),
        n: 2,
        m: p.size(),
        entries: vec![vec![p.clone(), q.clone()], vec![q, p]],
    }
}

/// The 4×4 magic unitary diag(u_p, u_q) with p, q the non-commuting
/// projections [`projection_p`] and [`projection_q`].
pub fn build_u_pq() -> MagicUnitaryWitness {
    let (p, q) = (projection_p(), projection_q());
    let id = RatMatrix::identity(2);
    let (p_c, q_c) = (&id - &p, &id - &q);
    let z = RatMatrix::zeros(2);
    MagicUnitaryWitness {
        label: "u_pq".into(),
        n: 4,
        m: 2,
        entries: vec![
            vec![p.clone(), p_c.clone(), z.clone(), z.clone()],
            vec![p_c, p, z.clone(), z.clone()],
            vec![z.clone(), z.clone(), q.clone(), q_c.clone()],
            vec![z.clone(), z, q_c, q],
        ],
    }
}

/// Block-diagonal extension to n×n with identity entries on the new diagonal.
pub fn extend_with_identity_tail(w: &MagicUnitaryWitness, n: usize) -> Result<MagicUnitaryWitness> {
    if n < w.n {
        return Err(Error::CannotShrink { from: w.n, to: n });
    }
    if n == w.n {
        return Ok(w.clone());
    }
    let z = RatMatrix::zeros(w.m);
    let id = RatMatrix::identity(w.m);
    let entries = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match (i < w.n, j < w.n) {
                    (true, true) => w.entries[i][j].clone(),
                    _ if i == j => id.clone(),
                    _ => z.clone(),
                })
                .collect()
        })
        .collect();
    Ok(MagicUnitaryWitness { label: format!("{}+tail({n})", w.label), n, m: w.m, entries })
}

/// Exact magic-unitary check. Reports the first failing condition.
pub fn verify_magic_unitary(w: &MagicUnitaryWitness) -> std::result::Result<(), WitnessDefect> {
    let shape_ok =
        w.entries.len() == w.n && w.entries.iter().all(|row| row.len() == w.n && row.iter().all(|e| e.size() == w.m));
    if !shape_ok {
        return Err(WitnessDefect::Shape { reason: format!("expected {0}x{0} entries of size {1}", w.n, w.m) });
    }
    let id = RatMatrix::identity(w.m);
    for i in 0..w.n {
        for j in 0..w.n {
            if !w.entry(i, j).is_projection() {
                return Err(WitnessDefect::NotProjection { i, j });
            }
        }
    }
    for r in 0..w.n {
        for a in 0..w.n {
            for b in a + 1..w.n {
                if !(w.entry(r, a) * w.entry(r, b)).is_zero() {
                    return Err(WitnessDefect::RowNotOrthogonal { row: r, j1: a, j2: b });
                }
                if !(w.entry(a, r) * w.entry(b, r)).is_zero() {
                    return Err(WitnessDefect::ColumnNotOrthogonal { col: r, i1: a, i2: b });
                }
            }
        }
        let row_sum = (0..w.n).fold(RatMatrix::zeros(w.m), |acc, j| &acc + w.entry(r, j));
        if row_sum != id {
            return Err(WitnessDefect::RowSum { row: r });
        }
        let col_sum = (0..w.n).fold(RatMatrix::zeros(w.m), |acc, i| &acc + w.entry(i, r));
        if col_sum != id {
            return Err(WitnessDefect::ColumnSum { col: r });
        }
    }
    Ok(())
}

/// Whether (d ⊗ 1)·U = U·(d ⊗ 1) for a 0/1 matrix d.
pub fn commutes_with_adjacency(w: &MagicUnitaryWitness, d: &[Vec<u8>]) -> Result<bool> {
    if d.len() != w.n {
        return Err(Error::SizeMismatch { expected: w.n, found: d.len() });
    }
    let n = w.n;
    for i in 0..n {
        for j in 0..n {
            let left = (0..n).filter(|&k| d[i][k] != 0).fold(RatMatrix::zeros(w.m), |acc, k| &acc + w.entry(k, j));
            let right = (0..n).filter(|&k| d[k][j] != 0).fold(RatMatrix::zeros(w.m), |acc, k| &acc + w.entry(i, k));
            if left != right {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Commutation with the adjacency matrix of `g`, rows and columns labelled
/// by `vertex_order` (0-based vertices).
pub fn verify_commutation(w: &MagicUnitaryWitness, g: &CirculantGraph, vertex_order: &[u64]) -> Result<bool> {
    if g.n() as usize != w.n {
        return Err(Error::SizeMismatch { expected: w.n, found: g.n() as usize });
    }
    check_permutation(vertex_order, g.n())?;
    commutes_with_adjacency(w, &g.adjacency_matrix_ordered(vertex_order)?)
}
