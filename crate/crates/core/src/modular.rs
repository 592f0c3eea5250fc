//! Residue arithmetic and the structure of the unit group mod n.
//!
//! Everything here works on `u64` moduli with `u128` intermediates, which is
//! far beyond the ranges the scans touch.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of Z_n, stored canonically in `[0, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Residue {
    value: u64,
    modulus: u64,
}

impl Residue {
    pub fn new(value: i64, modulus: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::ZeroModulus);
        }
        let value = (value as i128).rem_euclid(modulus as i128) as u64;
        Ok(Residue { value, modulus })
    }

    pub fn from_u64(value: u64, modulus: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::ZeroModulus);
        }
        Ok(Residue { value: value % modulus, modulus })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn pow(self, exp: u64) -> Self {
        Residue { value: pow_mod(self.value, exp, self.modulus), modulus: self.modulus }
    }

    pub fn inverse(self) -> Option<Self> {
        inv_mod(self.value, self.modulus).map(|value| Residue { value, modulus: self.modulus })
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.modulus, other.modulus, "residues with different moduli");
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

impl Add for Residue {
    type Output = Residue;

    fn add(self, rhs: Residue) -> Residue {
        self.check(&rhs);
        Residue { value: add_mod(self.value, rhs.value, self.modulus), modulus: self.modulus }
    }
}

impl Sub for Residue {
    type Output = Residue;

    fn sub(self, rhs: Residue) -> Residue {
        self.check(&rhs);
        Residue { value: sub_mod(self.value, rhs.value, self.modulus), modulus: self.modulus }
    }
}

impl Mul for Residue {
    type Output = Residue;

    fn mul(self, rhs: Residue) -> Residue {
        self.check(&rhs);
        Residue { value: mul_mod(self.value, rhs.value, self.modulus), modulus: self.modulus }
    }
}

impl Neg for Residue {
    type Output = Residue;

    fn neg(self) -> Residue {
        Residue { value: sub_mod(0, self.value, self.modulus), modulus: self.modulus }
    }
}

#[inline]
pub fn add_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 + b as u128) % n as u128) as u64
}

#[inline]
pub fn sub_mod(a: u64, b: u64, n: u64) -> u64 {
    let (a, b) = (a % n, b % n);
    if a >= b {
        a - b
    } else {
        n - (b - a)
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, n: u64) -> u64 {
    if n == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= n;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, n);
        }
        base = mul_mod(base, base, n);
        exp >>= 1;
    }
    acc
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Inverse of `a` mod `n` by the extended Euclidean algorithm.
pub fn inv_mod(a: u64, n: u64) -> Option<u64> {
    if n == 0 {
        return None;
    }
    if n == 1 {
        return Some(0);
    }
    let (mut t, mut t1) = (0i128, 1i128);
    let (mut r, mut r1) = (n as i128, (a % n) as i128);
    while r1 != 0 {
        let q = r / r1;
        (t, t1) = (t1, t - q * t1);
        (r, r1) = (r1, r - q * r1);
    }
    if r != 1 {
        return None;
    }
    Some(t.rem_euclid(n as i128) as u64)
}

/// Deterministic Miller-Rabin. The first twelve prime bases are a proven
/// witness set for every `n < 3.3 * 10^24`, so all of `u64` is covered.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorization by trial division, as `(prime, exponent)` pairs in
/// ascending order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n).into_iter().fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// Positive divisors of `n` in ascending order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut divs = vec![1u64];
    for (p, e) in factorize(n) {
        let len = divs.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    divs
}

/// Multiplicative order of `a` mod `n`, if `a` is a unit.
pub fn multiplicative_order(a: u64, n: u64) -> Option<u64> {
    if n == 1 {
        return Some(1);
    }
    if gcd(a % n, n) != 1 {
        return None;
    }
    let phi = euler_phi(n);
    let mut order = phi;
    for (q, _) in factorize(phi) {
        while order.is_multiple_of(q) && pow_mod(a, order / q, n) == 1 {
            order /= q;
        }
    }
    Some(order)
}

/// Smallest generator of Z_p^*. For p = 2 the group is trivial and 1 is returned.
pub fn primitive_root(p: u64) -> Result<Residue> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p == 2 {
        return Residue::from_u64(1, 2);
    }
    let factors: Vec<u64> = factorize(p - 1).into_iter().map(|(q, _)| q).collect();
    let g = (2..p).find(|&g| factors.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1)).expect("Z_p^* is cyclic");
    Residue::from_u64(g, p)
}

/// A finite subgroup of (Z_n)^*, with its elements sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubgroupOfUnits {
    modulus: u64,
    elements: Vec<u64>,
}

impl SubgroupOfUnits {
    /// Validates closure, identity and inverses. Duplicates and unreduced
    /// values are canonicalized first.
    pub fn new(modulus: u64, elements: impl IntoIterator<Item = u64>) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::ZeroModulus);
        }
        let mut elements: Vec<u64> = elements.into_iter().map(|e| e % modulus).collect();
        elements.sort_unstable();
        elements.dedup();
        let group = SubgroupOfUnits { modulus, elements };
        group.validate()?;
        Ok(group)
    }

    /// The subgroup generated by `generators` (the trivial group if empty).
    pub fn generated_by(modulus: u64, generators: &[u64]) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::ZeroModulus);
        }
        let mut elements = vec![1 % modulus];
        let mut frontier = elements.clone();
        while let Some(x) = frontier.pop() {
            for &g in generators {
                if gcd(g % modulus, modulus) != 1 {
                    return Err(Error::NotASubgroup { modulus, reason: format!("{g} is not a unit") });
                }
                let y = mul_mod(x, g, modulus);
                if !elements.contains(&y) {
                    elements.push(y);
                    frontier.push(y);
                }
            }
        }
        elements.sort_unstable();
        Ok(SubgroupOfUnits { modulus, elements })
    }

    /// The full unit group (Z_n)^*.
    pub fn units(modulus: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::ZeroModulus);
        }
        let elements = (0..modulus).filter(|&a| gcd(a, modulus) == 1).collect();
        Ok(SubgroupOfUnits { modulus, elements })
    }

    fn validate(&self) -> Result<()> {
        let n = self.modulus;
        let fail = |reason: String| Err(Error::NotASubgroup { modulus: n, reason });
        if !self.contains(1 % n) {
            return fail("missing 1".into());
        }
        for &a in &self.elements {
            if gcd(a, n) != 1 {
                return fail(format!("{a} is not a unit"));
            }
            match inv_mod(a, n) {
                Some(inv) if self.contains(inv) => {}
                _ => return fail(format!("inverse of {a} missing")),
            }
            for &b in &self.elements {
                if !self.contains(mul_mod(a, b, n)) {
                    return fail(format!("{a} * {b} not in set"));
                }
            }
        }
        Ok(())
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn residues(&self) -> impl Iterator<Item = Residue> + '_ {
        self.elements.iter().map(move |&value| Residue { value, modulus: self.modulus })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, a: u64) -> bool {
        self.elements.binary_search(&(a % self.modulus)).is_ok()
    }

    /// Whether -1 belongs to the group.
    pub fn is_even(&self) -> bool {
        self.contains(self.modulus - 1)
    }

    /// The coset xG, sorted.
    pub fn coset(&self, x: u64) -> Vec<u64> {
        let mut c: Vec<u64> = self.elements.iter().map(|&a| mul_mod(a, x, self.modulus)).collect();
        c.sort_unstable();
        c
    }

    /// All cosets of this group inside (Z_n)^*, ordered by smallest element.
    pub fn cosets_in_units(&self) -> Vec<Vec<u64>> {
        let n = self.modulus;
        let mut seen = vec![false; n as usize];
        let mut out = Vec::new();
        for x in 0..n {
            if seen[x as usize] || gcd(x, n) != 1 {
                continue;
            }
            let coset = self.coset(x);
            for &y in &coset {
                seen[y as usize] = true;
            }
            out.push(coset);
        }
        out
    }
}

/// The unique subgroup of order `k` in the cyclic group Z_p^*, generated by
/// g^((p-1)/k) for the smallest primitive root g.
pub fn subgroup_of_order(p: u64, k: u64) -> Result<SubgroupOfUnits> {
    let g = primitive_root(p)?;
    if k == 0 || !(p - 1).is_multiple_of(k) {
        return Err(Error::OrderDoesNotDivide { p, k });
    }
    let h = g.pow((p - 1) / k).value();
    let mut elements = Vec::with_capacity(k as usize);
    let mut x = 1 % p;
    for _ in 0..k {
        elements.push(x);
        x = mul_mod(x, h, p);
    }
    elements.sort_unstable();
    Ok(SubgroupOfUnits { modulus: p, elements })
}

/// Every subgroup of Z_p^*, one per divisor of p - 1, in ascending order.
pub fn subgroups_mod_prime(p: u64) -> Result<Vec<SubgroupOfUnits>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    divisors(p - 1).into_iter().map(|k| subgroup_of_order(p, k)).collect()
}
