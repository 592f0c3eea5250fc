//! 2-maximality of even unit subgroups.
//!
//! An even subgroup G (one containing -1) is 2-maximal when every solution of
//! a - b = 2(c - d) with a, b, c, d ∈ G has a = ±b. Solutions with a = b,
//! c = d are *trivial*; those with a = -b = c - d are *hexagonal*; anything
//! else is *genuine* and breaks 2-maximality.
//!
//! Two ambient rings are supported: Z_p for an odd prime p, and Z[ζ_k] inside
//! C for the group of k-th roots of unity. Quadruples in reports are written
//! with integer labels: residues for Z_p, exponents j of ζ^j for Z[ζ_k].

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cyclotomic::{roots_of_unity, CyclotomicInt};
use crate::error::{Error, Result};
use crate::modular::{add_mod, inv_mod, is_prime, mul_mod, sub_mod, SubgroupOfUnits};

/// At most this many classified solutions are kept verbatim in a report.
pub const MAX_STORED_SOLUTIONS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "ring", rename_all = "snake_case")]
pub enum Ambient {
    Modular { p: u64 },
    Cyclotomic { k: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionClass {
    Trivial,
    Hexagonal,
    Genuine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Solution {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
    pub class: SolutionClass,
}

impl Solution {
    pub fn quadruple(&self) -> [u64; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionCounts {
    pub total: u64,
    pub trivial: u64,
    pub hexagonal: u64,
    pub genuine: u64,
}

impl SolutionCounts {
    fn record(&mut self, class: SolutionClass) {
        self.total += 1;
        match class {
            SolutionClass::Trivial => self.trivial += 1,
            SolutionClass::Hexagonal => self.hexagonal += 1,
            SolutionClass::Genuine => self.genuine += 1,
        }
    }

    fn merge(&mut self, other: &SolutionCounts) {
        self.total += other.total;
        self.trivial += other.trivial;
        self.hexagonal += other.hexagonal;
        self.genuine += other.genuine;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaximalityReport {
    pub ambient: Ambient,
    pub group_elements: Vec<u64>,
    pub is_2maximal: bool,
    pub counts: SolutionCounts,
    /// The first [`MAX_STORED_SOLUTIONS`] solutions in lexicographic order.
    pub solutions: Vec<Solution>,
    pub truncated: bool,
    pub first_genuine: Option<Solution>,
}

/// A commutative ring in which the solution equation can be tested exactly.
pub trait SolutionRing: Sync {
    type Elem: Clone + Eq + Hash + Debug + Send + Sync;

    fn ambient(&self) -> Ambient;
    fn from_int(&self, n: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn scale(&self, a: &Self::Elem, n: i64) -> Self::Elem;
    fn two_invertible(&self) -> bool;
    fn three_nonzero(&self) -> bool;

    /// x / n when division is available in the ring, for lookup-based search.
    fn divide(&self, _x: &Self::Elem, _n: i64) -> Option<Self::Elem> {
        None
    }
}

/// Z_p.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZMod(pub u64);

impl SolutionRing for ZMod {
    type Elem = u64;

    fn ambient(&self) -> Ambient {
        Ambient::Modular { p: self.0 }
    }

    fn from_int(&self, n: i64) -> u64 {
        (n as i128).rem_euclid(self.0 as i128) as u64
    }

    fn add(&self, a: &u64, b: &u64) -> u64 {
        add_mod(*a, *b, self.0)
    }

    fn sub(&self, a: &u64, b: &u64) -> u64 {
        sub_mod(*a, *b, self.0)
    }

    fn neg(&self, a: &u64) -> u64 {
        sub_mod(0, *a, self.0)
    }

    fn scale(&self, a: &u64, n: i64) -> u64 {
        mul_mod(*a, self.from_int(n), self.0)
    }

    fn two_invertible(&self) -> bool {
        self.0 % 2 == 1
    }

    fn three_nonzero(&self) -> bool {
        !self.0.is_multiple_of(3)
    }

    fn divide(&self, x: &u64, n: i64) -> Option<u64> {
        inv_mod(self.from_int(n), self.0).map(|inv| mul_mod(*x, inv, self.0))
    }
}

/// Z[ζ_k], viewed inside C, where 2 is invertible and 3 ≠ 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CyclotomicRing(pub u64);

impl SolutionRing for CyclotomicRing {
    type Elem = CyclotomicInt;

    fn ambient(&self) -> Ambient {
        Ambient::Cyclotomic { k: self.0 }
    }

    fn from_int(&self, n: i64) -> CyclotomicInt {
        CyclotomicInt::from_int(self.0, n)
    }

    fn add(&self, a: &CyclotomicInt, b: &CyclotomicInt) -> CyclotomicInt {
        a + b
    }

    fn sub(&self, a: &CyclotomicInt, b: &CyclotomicInt) -> CyclotomicInt {
        a - b
    }

    fn neg(&self, a: &CyclotomicInt) -> CyclotomicInt {
        -a
    }

    fn scale(&self, a: &CyclotomicInt, n: i64) -> CyclotomicInt {
        a.scale(n)
    }

    fn two_invertible(&self) -> bool {
        true
    }

    fn three_nonzero(&self) -> bool {
        true
    }
}

/// Classifies a solution of a - b = 2(c - d).
pub fn classify_solution<R: SolutionRing>(
    ring: &R,
    a: &R::Elem,
    b: &R::Elem,
    c: &R::Elem,
    d: &R::Elem,
) -> Result<SolutionClass> {
    let lhs = ring.sub(a, b);
    let rhs = ring.scale(&ring.sub(c, d), 2);
    if lhs != rhs {
        return Err(Error::NotASolution {
            a: format!("{a:?}"),
            b: format!("{b:?}"),
            c: format!("{c:?}"),
            d: format!("{d:?}"),
        });
    }
    Ok(if a == b && c == d {
        SolutionClass::Trivial
    } else if *a == ring.neg(b) && *a == ring.sub(c, d) {
        SolutionClass::Hexagonal
    } else {
        SolutionClass::Genuine
    })
}

#[derive(Default)]
struct Partial {
    counts: SolutionCounts,
    stored: Vec<Solution>,
    first_genuine: Option<Solution>,
}

impl Partial {
    fn push(&mut self, s: Solution) {
        self.counts.record(s.class);
        if s.class == SolutionClass::Genuine && self.first_genuine.is_none() {
            self.first_genuine = Some(s);
        }
        if self.stored.len() < MAX_STORED_SOLUTIONS {
            self.stored.push(s);
        }
    }
}

fn assemble(ambient: Ambient, group_elements: Vec<u64>, parts: Vec<Partial>) -> MaximalityReport {
    let mut counts = SolutionCounts::default();
    let mut solutions = Vec::new();
    let mut first_genuine = None;
    for part in parts {
        counts.merge(&part.counts);
        first_genuine = first_genuine.or(part.first_genuine);
        let room = MAX_STORED_SOLUTIONS - solutions.len();
        solutions.extend(part.stored.into_iter().take(room));
    }
    MaximalityReport {
        ambient,
        group_elements,
        is_2maximal: counts.genuine == 0,
        counts,
        truncated: (solutions.len() as u64) < counts.total,
        solutions,
        first_genuine,
    }
}

/// Decides 2-maximality of `e` inside Z_p. For each (a, b, c) the equation
/// forces d = c - (a - b)/2, so only a membership test is needed.
pub fn check_2maximal_mod_p(e: &SubgroupOfUnits, p: u64) -> Result<MaximalityReport> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p == 2 {
        return Err(Error::TwoNotInvertible(p));
    }
    if e.modulus() != p {
        return Err(Error::NotASubgroup { modulus: p, reason: format!("group lives mod {}", e.modulus()) });
    }
    if !e.is_even() {
        return Err(Error::NotEvenSubgroup(p));
    }
    let ring = ZMod(p);
    let half = inv_mod(2, p).expect("p odd");
    let elems = e.elements();
    let parts: Vec<Partial> = elems
        .par_iter()
        .map(|&a| {
            let mut part = Partial::default();
            for &b in elems {
                let half_diff = mul_mod(sub_mod(a, b, p), half, p);
                for &c in elems {
                    let d = sub_mod(c, half_diff, p);
                    if e.contains(d) {
                        let class = classify_solution(&ring, &a, &b, &c, &d).expect("d solves the equation");
                        part.push(Solution { a, b, c, d, class });
                    }
                }
            }
            part
        })
        .collect();
    Ok(assemble(ring.ambient(), elems.to_vec(), parts))
}

/// Decides 2-maximality of the k-th roots of unity by exhausting all k^4
/// quadruples exactly in Z[ζ_k]: each difference a - b is matched against a
/// table of the values 2(c - d).
pub fn check_2maximal_roots_of_unity(k: u64) -> Result<MaximalityReport> {
    if k < 2 || !k.is_multiple_of(2) {
        return Err(Error::OddOrder(k));
    }
    let ring = CyclotomicRing(k);
    let roots = roots_of_unity(k);
    let mut doubled: HashMap<CyclotomicInt, Vec<(u64, u64)>> = HashMap::new();
    for c in 0..k {
        for d in 0..k {
            let v = (&roots[c as usize] - &roots[d as usize]).scale(2);
            doubled.entry(v).or_default().push((c, d));
        }
    }
    let parts: Vec<Partial> = (0..k)
        .into_par_iter()
        .map(|a| {
            let mut part = Partial::default();
            for b in 0..k {
                let diff = &roots[a as usize] - &roots[b as usize];
                for &(c, d) in doubled.get(&diff).map(Vec::as_slice).unwrap_or_default() {
                    let r = |j: u64| &roots[j as usize];
                    let class = classify_solution(&ring, r(a), r(b), r(c), r(d)).expect("table lookup is exact");
                    part.push(Solution { a, b, c, d, class });
                }
            }
            part
        })
        .collect();
    Ok(assemble(ring.ambient(), (0..k).collect(), parts))
}

/// Outcome of testing the three consequences of 2-maximality:
/// (1) 2, 3 ∉ G; (2) a + b = 2c forces a = b = c; (3) a + 2b = 3c forces
/// a = b = c. The ring hypotheses (2 invertible, 3 ≠ 0) are reported too.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivedPropertiesReport {
    pub ambient: Ambient,
    pub two_invertible: bool,
    pub three_nonzero: bool,
    pub excludes_two_and_three: bool,
    pub midpoint_forces_equal: bool,
    pub weighted_mean_forces_equal: bool,
    /// Label of 2 or 3 when it lies in G.
    pub small_integer_in_group: Option<u64>,
    pub midpoint_violation: Option<[u64; 3]>,
    pub weighted_mean_violation: Option<[u64; 3]>,
}

impl DerivedPropertiesReport {
    pub fn all_hold(&self) -> bool {
        self.excludes_two_and_three && self.midpoint_forces_equal && self.weighted_mean_forces_equal
    }

    pub fn as_triple(&self) -> (bool, bool, bool) {
        (self.excludes_two_and_three, self.midpoint_forces_equal, self.weighted_mean_forces_equal)
    }
}

/// Finds (a, b, c) in G with a + w·b = (1 + w)·c but not a = b = c.
fn find_weighted_violation<R: SolutionRing>(
    ring: &R,
    group: &[(u64, R::Elem)],
    index: &HashMap<R::Elem, u64>,
    w: i64,
) -> Option<[u64; 3]> {
    for (la, a) in group {
        for (lb, b) in group {
            let lhs = ring.add(a, &ring.scale(b, w));
            let check = |lc: u64, c: &R::Elem| (a != b || b != c).then_some([*la, *lb, lc]);
            match ring.divide(&lhs, 1 + w) {
                Some(c) => {
                    if let Some(&lc) = index.get(&c) {
                        if let Some(v) = check(lc, &c) {
                            return Some(v);
                        }
                    }
                }
                None => {
                    for (lc, c) in group {
                        if ring.scale(c, 1 + w) == lhs {
                            if let Some(v) = check(*lc, c) {
                                return Some(v);
                            }
                        }
                    }
                }
            }
        }
    }
    None
}

/// Tests the three consequences directly by enumeration over `group`, given
/// as (label, element) pairs.
pub fn check_derived_properties<R: SolutionRing>(ring: &R, group: &[(u64, R::Elem)]) -> DerivedPropertiesReport {
    let index: HashMap<R::Elem, u64> = group.iter().map(|(l, e)| (e.clone(), *l)).collect();
    let small_integer_in_group = [2i64, 3].iter().find_map(|&n| index.get(&ring.from_int(n)).copied());
    let midpoint_violation = find_weighted_violation(ring, group, &index, 1);
    let weighted_mean_violation = find_weighted_violation(ring, group, &index, 2);
    DerivedPropertiesReport {
        ambient: ring.ambient(),
        two_invertible: ring.two_invertible(),
        three_nonzero: ring.three_nonzero(),
        excludes_two_and_three: small_integer_in_group.is_none(),
        midpoint_forces_equal: midpoint_violation.is_none(),
        weighted_mean_forces_equal: weighted_mean_violation.is_none(),
        small_integer_in_group,
        midpoint_violation,
        weighted_mean_violation,
    }
}

pub fn check_derived_properties_mod_p(e: &SubgroupOfUnits) -> DerivedPropertiesReport {
    let group: Vec<(u64, u64)> = e.elements().iter().map(|&x| (x, x)).collect();
    check_derived_properties(&ZMod(e.modulus()), &group)
}

pub fn check_derived_properties_roots_of_unity(k: u64) -> DerivedPropertiesReport {
    let group: Vec<(u64, CyclotomicInt)> =
        roots_of_unity(k).into_iter().enumerate().map(|(j, z)| (j as u64, z)).collect();
    check_derived_properties(&CyclotomicRing(k), &group)
}

/// Distinct even subgroups of Z_p^*, for an odd prime p.
pub fn even_subgroups_mod_prime(p: u64) -> Result<Vec<SubgroupOfUnits>> {
    Ok(crate::modular::subgroups_mod_prime(p)?.into_iter().filter(SubgroupOfUnits::is_even).collect())
}
