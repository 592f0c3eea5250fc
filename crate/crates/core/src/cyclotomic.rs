//! Exact arithmetic in the cyclotomic integers Z[ζ_k].
//!
//! An element is an integer polynomial reduced modulo the k-th cyclotomic
//! polynomial Φ_k, so it always has exactly φ(k) coefficients (constant term
//! first). Equality of elements is equality of coefficient vectors, which is
//! exact because {1, ζ, ..., ζ^(φ(k)-1)} is a Z-basis.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::modular::{divisors, euler_phi};

/// Integer polynomial, constant term first, no trailing zeros.
pub type IntPoly = Vec<BigInt>;

fn trim(p: &mut IntPoly) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> IntPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

/// Remainder of `a` modulo a monic polynomial; exact over Z.
fn rem_monic(mut a: IntPoly, m: &[BigInt]) -> IntPoly {
    let deg = m.len() - 1;
    debug_assert!(m[deg].is_one());
    for i in (deg..a.len()).rev() {
        if a[i].is_zero() {
            continue;
        }
        let c = std::mem::take(&mut a[i]);
        for (j, mj) in m[..deg].iter().enumerate() {
            a[i - deg + j] -= &c * mj;
        }
    }
    a.truncate(deg);
    a
}

/// Quotient of `a` by a monic divisor, asserting the division is exact.
fn div_exact_monic(a: &[BigInt], m: &[BigInt]) -> IntPoly {
    let deg = m.len() - 1;
    let mut rem = a.to_vec();
    let mut quot = vec![BigInt::zero(); a.len() - deg];
    for i in (deg..a.len()).rev() {
        let c = rem[i].clone();
        if c.is_zero() {
            continue;
        }
        quot[i - deg] = c.clone();
        for (j, mj) in m.iter().enumerate() {
            rem[i - deg + j] -= &c * mj;
        }
    }
    assert!(rem.iter().all(Zero::is_zero), "inexact cyclotomic division");
    trim(&mut quot);
    quot
}

fn compute_cyclotomic(k: u64, cache: &mut HashMap<u64, IntPoly>) -> IntPoly {
    if let Some(p) = cache.get(&k) {
        return p.clone();
    }
    // X^k - 1 = prod_{d | k} Φ_d
    let mut poly = vec![BigInt::zero(); k as usize + 1];
    poly[0] = -BigInt::one();
    poly[k as usize] = BigInt::one();
    for d in divisors(k) {
        if d < k {
            let phi_d = compute_cyclotomic(d, cache);
            poly = div_exact_monic(&poly, &phi_d);
        }
    }
    cache.insert(k, poly.clone());
    poly
}

/// The k-th cyclotomic polynomial Φ_k, constant term first.
pub fn cyclotomic_polynomial(k: u64) -> IntPoly {
    assert!(k >= 1, "cyclotomic order must be positive");
    (*modulus_for(k)).clone()
}

fn modulus_for(k: u64) -> Arc<IntPoly> {
    static CACHE: OnceLock<RwLock<HashMap<u64, Arc<IntPoly>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(p) = cache.read().unwrap().get(&k) {
        return Arc::clone(p);
    }
    let poly = Arc::new(compute_cyclotomic(k, &mut HashMap::new()));
    cache.write().unwrap().entry(k).or_insert(poly).clone()
}

/// Resultant of two integer polynomials, via the Sylvester matrix and
/// fraction-free (Bareiss) elimination.
pub fn resultant(f: &[BigInt], g: &[BigInt]) -> BigInt {
    let (mut f, mut g) = (f.to_vec(), g.to_vec());
    trim(&mut f);
    trim(&mut g);
    if f.is_empty() || g.is_empty() {
        return BigInt::zero();
    }
    let (m, n) = (f.len() - 1, g.len() - 1);
    if m == 0 {
        return num_traits::pow(f[0].clone(), n);
    }
    if n == 0 {
        return num_traits::pow(g[0].clone(), m);
    }
    let size = m + n;
    let mut rows = vec![vec![BigInt::zero(); size]; size];
    // Coefficients highest degree first along each row.
    for i in 0..n {
        for (j, c) in f.iter().rev().enumerate() {
            rows[i][i + j] = c.clone();
        }
    }
    for i in 0..m {
        for (j, c) in g.iter().rev().enumerate() {
            rows[n + i][i + j] = c.clone();
        }
    }
    bareiss_determinant(rows)
}

fn bareiss_determinant(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    negate = !negate;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

/// An element of Z[ζ_k] in reduced form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CyclotomicInt {
    order: u64,
    coeffs: Vec<BigInt>,
}

impl CyclotomicInt {
    /// Reduces an arbitrary integer polynomial in ζ modulo Φ_k.
    pub fn from_poly(order: u64, poly: IntPoly) -> Self {
        assert!(order >= 1, "cyclotomic order must be positive");
        let m = modulus_for(order);
        let degree = m.len() - 1;
        let mut coeffs = rem_monic(poly, &m);
        coeffs.resize(degree, BigInt::zero());
        CyclotomicInt { order, coeffs }
    }

    pub fn from_i64_coeffs(order: u64, coeffs: &[i64]) -> Self {
        Self::from_poly(order, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn from_int(order: u64, n: impl Into<BigInt>) -> Self {
        Self::from_poly(order, vec![n.into()])
    }

    pub fn zero(order: u64) -> Self {
        Self::from_poly(order, Vec::new())
    }

    pub fn one(order: u64) -> Self {
        Self::from_int(order, 1)
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Integer value, if the element lies in Z.
    pub fn as_integer(&self) -> Option<BigInt> {
        match self.coeffs.split_first() {
            None => Some(BigInt::zero()),
            Some((c0, rest)) if rest.iter().all(Zero::is_zero) => Some(c0.clone()),
            _ => None,
        }
    }

    pub fn scale(&self, c: i64) -> Self {
        CyclotomicInt { order: self.order, coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    fn check_order(&self, other: &Self) -> Result<()> {
        if self.order == other.order {
            Ok(())
        } else {
            Err(Error::OrderMismatch(self.order, other.order))
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(CyclotomicInt {
            order: self.order,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(CyclotomicInt {
            order: self.order,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(Self::from_poly(self.order, poly_mul(&self.coeffs, &other.coeffs)))
    }

    /// Field norm N(z) = |prod of Galois conjugates|, as |Res(z, Φ_k)|.
    pub fn norm(&self) -> BigInt {
        if self.is_zero() {
            return BigInt::zero();
        }
        resultant(&self.coeffs, &modulus_for(self.order)).abs()
    }

    /// Complex value under ζ ↦ e^(2πi/k).
    pub fn to_complex(&self) -> Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let c = c.to_f64().unwrap_or(f64::NAN);
                Complex64::from_polar(c, TAU * j as f64 / self.order as f64)
            })
            .sum()
    }
}

/// ζ_k^(j mod k), reduced.
pub fn root_of_unity(k: u64, j: i64) -> CyclotomicInt {
    let e = j.rem_euclid(k as i64) as usize;
    let mut poly = vec![BigInt::zero(); e + 1];
    poly[e] = BigInt::one();
    CyclotomicInt::from_poly(k, poly)
}

/// All k-th roots of unity ζ^0, ..., ζ^(k-1).
pub fn roots_of_unity(k: u64) -> Vec<CyclotomicInt> {
    (0..k as i64).map(|j| root_of_unity(k, j)).collect()
}

/// φ(k), the rank of Z[ζ_k] over Z.
pub fn degree(k: u64) -> usize {
    euler_phi(k) as usize
}

impl Add for &CyclotomicInt {
    type Output = CyclotomicInt;

    fn add(self, rhs: &CyclotomicInt) -> CyclotomicInt {
        self.try_add(rhs).unwrap()
    }
}

impl Sub for &CyclotomicInt {
    type Output = CyclotomicInt;

    fn sub(self, rhs: &CyclotomicInt) -> CyclotomicInt {
        self.try_sub(rhs).unwrap()
    }
}

impl Mul for &CyclotomicInt {
    type Output = CyclotomicInt;

    fn mul(self, rhs: &CyclotomicInt) -> CyclotomicInt {
        self.try_mul(rhs).unwrap()
    }
}

impl Neg for &CyclotomicInt {
    type Output = CyclotomicInt;

    fn neg(self) -> CyclotomicInt {
        CyclotomicInt { order: self.order, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl fmt::Display for CyclotomicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            match (first, sign) {
                (true, "-") => write!(f, "-")?,
                (true, _) => {}
                (false, s) => write!(f, " {s} ")?,
            }
            first = false;
            match (j, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "z")?,
                (1, false) => write!(f, "{mag}*z")?,
                (_, true) => write!(f, "z^{j}")?,
                (_, false) => write!(f, "{mag}*z^{j}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Serializes a big integer as a JSON number when it fits in i64, otherwise
/// as a decimal string.
pub(crate) fn bigint_json(x: &BigInt) -> serde_json::Value {
    match x.to_i64() {
        Some(v) => v.into(),
        None => x.to_string().into(),
    }
}

impl Serialize for CyclotomicInt {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let coeffs: Vec<serde_json::Value> = self.coeffs.iter().map(bigint_json).collect();
        let mut s = serializer.serialize_struct("CyclotomicInt", 2)?;
        s.serialize_field("order", &self.order)?;
        s.serialize_field("coeffs", &coeffs)?;
        s.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular::gcd;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn ints(p: &[BigInt]) -> Vec<i64> {
        p.iter().map(|c| c.to_i64().unwrap()).collect()
    }

    /// prod_{gcd(j,k)=1} (X - e^(2πij/k)) in floating point, rounded.
    fn cyclotomic_by_roots(k: u64) -> Vec<i64> {
        let mut poly = vec![Complex64::new(1.0, 0.0)];
        for j in (1..=k).filter(|&j| gcd(j, k) == 1) {
            let root = Complex64::from_polar(1.0, TAU * j as f64 / k as f64);
            let mut next = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
            for (i, c) in poly.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * root;
            }
            poly = next;
        }
        poly.iter().map(|c| c.re.round() as i64).collect()
    }

    /// prod over Galois conjugates ζ ↦ ζ^j, gcd(j, k) = 1, in floating point.
    fn norm_by_conjugates(z: &CyclotomicInt) -> f64 {
        let k = z.order();
        (1..=k)
            .filter(|&j| gcd(j, k) == 1)
            .map(|j| {
                z.coeffs()
                    .iter()
                    .enumerate()
                    .map(|(i, c)| Complex64::from_polar(c.to_f64().unwrap(), TAU * (i as u64 * j) as f64 / k as f64))
                    .sum::<Complex64>()
            })
            .product::<Complex64>()
            .norm()
    }

    #[test]
    fn cyclotomic_polynomial_examples() {
        assert_eq!(ints(&cyclotomic_polynomial(1)), vec![-1, 1]);
        assert_eq!(ints(&cyclotomic_polynomial(4)), vec![1, 0, 1]);
        assert_eq!(ints(&cyclotomic_polynomial(12)), vec![1, 0, -1, 0, 1]);
        assert_eq!(cyclotomic_by_roots(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn cyclotomic_polynomial_matches_root_product() {
        for k in 1..=40 {
            let phi = cyclotomic_polynomial(k);
            assert_eq!(phi.len() - 1, degree(k), "k = {k}");
            assert_eq!(ints(&phi), cyclotomic_by_roots(k), "k = {k}");
        }
        // first cyclotomic polynomial with a coefficient outside {-1, 0, 1}
        assert!(cyclotomic_polynomial(105).iter().any(|c| c.abs() == BigInt::from(2)));
    }

    #[test]
    fn ring_examples() {
        let z4 = root_of_unity(4, 1);
        assert_eq!(&z4 * &root_of_unity(4, 3), CyclotomicInt::one(4));
        let z6 = root_of_unity(6, 1);
        assert!((&z6 + &(-&z6)).is_zero());
        let one_plus = &CyclotomicInt::one(6) + &z6;
        assert_eq!(&one_plus * &one_plus, z6.scale(3));
        assert_eq!(CyclotomicInt::one(4).try_add(&CyclotomicInt::one(6)), Err(Error::OrderMismatch(4, 6)));
    }

    #[test]
    fn root_of_unity_examples() {
        for k in 1..10 {
            assert_eq!(root_of_unity(k, 0), CyclotomicInt::one(k));
        }
        assert_eq!(root_of_unity(6, 3), CyclotomicInt::from_int(6, -1));
        assert_eq!(root_of_unity(4, 3), -&root_of_unity(4, 1));
        assert_eq!(root_of_unity(4, -1), root_of_unity(4, 3));
    }

    #[test]
    fn norm_examples() {
        assert_eq!(CyclotomicInt::zero(6).norm(), BigInt::zero());
        let one_minus_i = &CyclotomicInt::one(4) - &root_of_unity(4, 1);
        assert_eq!(one_minus_i.norm(), BigInt::from(2));
        assert_eq!(CyclotomicInt::from_int(6, 2).norm(), BigInt::from(4));
    }

    #[test]
    fn norm_of_roots_is_one() {
        for k in 1..=24 {
            for j in 0..k as i64 {
                assert_eq!(root_of_unity(k, j).norm(), BigInt::one(), "k={k} j={j}");
            }
        }
    }

    #[test]
    fn norm_of_one_minus_root() {
        // N(1 - z) = l^(φ(k)/φ(ord z)) for ord z = l^m, and 1 for other orders > 1.
        for k in 2..=30u64 {
            for j in 1..k {
                let ord = k / gcd(j, k);
                let expected = match crate::modular::factorize(ord).as_slice() {
                    [(l, _)] => BigInt::from(*l).pow((degree(k) / degree(ord)) as u32),
                    _ => BigInt::one(),
                };
                let z = &CyclotomicInt::one(k) - &root_of_unity(k, j as i64);
                assert_eq!(z.norm(), expected, "k={k} j={j}");
            }
        }
    }

    #[test]
    fn norm_matches_conjugate_product() {
        let samples: [(u64, &[i64]); 5] =
            [(5, &[1, 2, 0, -1]), (7, &[3, -1, 4, 1, -5, 9]), (8, &[2, 7, 1, 8]), (9, &[1, 1, 1]), (12, &[0, 5, -2])];
        for (k, c) in samples {
            let z = CyclotomicInt::from_i64_coeffs(k, c);
            let exact = z.norm().to_f64().unwrap();
            assert!((exact - norm_by_conjugates(&z)).abs() < 1e-6 * exact.max(1.0), "k={k}");
        }
    }

    #[test]
    fn resultant_small_cases() {
        let b = |v: &[i64]| v.iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>();
        // Res(x - 2, x - 3) = (2 - 3) up to sign
        assert_eq!(resultant(&b(&[-2, 1]), &b(&[-3, 1])).abs(), BigInt::one());
        // Res(x^2 + 1, x - 1) = 2
        assert_eq!(resultant(&b(&[1, 0, 1]), &b(&[-1, 1])).abs(), BigInt::from(2));
        assert_eq!(resultant(&b(&[5]), &b(&[1, 0, 1])), BigInt::from(25));
        assert_eq!(resultant(&b(&[]), &b(&[1, 1])), BigInt::zero());
    }

    #[test]
    fn display_and_shadow() {
        let z = CyclotomicInt::from_i64_coeffs(5, &[1, 0, -2, 1]);
        assert_eq!(z.to_string(), "1 - 2*z^2 + z^3");
        assert_eq!(CyclotomicInt::zero(5).to_string(), "0");
        let w = &root_of_unity(5, 1) + &root_of_unity(5, 4);
        assert!((w.to_complex() - Complex64::new((TAU / 5.0).cos() * 2.0, 0.0)).norm() < 1e-12);
    }

    fn element(k: u64) -> impl Strategy<Value = CyclotomicInt> {
        prop::collection::vec(-20i64..=20, 0..(2 * degree(k) + 1))
            .prop_map(move |c| CyclotomicInt::from_i64_coeffs(k, &c))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn norm_is_multiplicative((a, b) in prop::sample::select(vec![3u64, 4, 5, 6, 7, 8, 9, 12, 15, 16])
            .prop_flat_map(|k| (element(k), element(k)))) {
            prop_assert_eq!((&a * &b).norm(), a.norm() * b.norm());
        }

        #[test]
        fn ring_axioms(a in element(10), b in element(10), c in element(10)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert!((&(&a - &b) + &b) == a);
        }

        #[test]
        fn complex_shadow_is_a_homomorphism(a in element(7), b in element(7)) {
            let exact = (&a * &b).to_complex();
            let float = a.to_complex() * b.to_complex();
            prop_assert!((exact - float).norm() < 1e-6 * (1.0 + float.norm()));
        }
    }
}
