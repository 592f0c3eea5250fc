//! Whole-family studies: the atlas of circulant graphs on p vertices up to
//! multiplier equivalence, and scans of 2-maximality against the 6^φ(k)
//! bound.

use std::io::Write;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certify::{bound_for_type, certify, Verdict};
use crate::error::{Error, Result};
use crate::graph::CirculantGraph;
use crate::maximality::check_2maximal_mod_p;
use crate::modular::{is_prime, mul_mod, primitive_root, subgroup_of_order};
use crate::spectral::eigenspace_partition;

/// Largest prime accepted by [`enumerate_atlas`].
pub const ATLAS_MAX_PRIME: u64 = 31;

/// Smallest prime included in scans; 2 is not invertible mod 2 and every
/// even subgroup mod 3 is {±1}.
pub const SCAN_MIN_PRIME: u64 = 5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtlasEntry {
    pub p: u64,
    pub representative: Vec<u64>,
    pub orbit_size: u64,
    pub k: u64,
    /// `None` for p = 2, where the question is undefined.
    pub is_2maximal: Option<bool>,
    pub verdict: Verdict,
    pub eigenvalue_classes: usize,
    pub distinct_eigenvalues: usize,
    /// Set when distinct classes share an eigenvalue (the empty graph).
    pub degenerate: bool,
}

/// Number of pairs {s, -s} in Z_p^*.
fn pair_count(p: u64) -> u32 {
    ((p - 1) / 2).max(1) as u32
}

fn mask_to_set(p: u64, mask: u32) -> Vec<u64> {
    let mut s = Vec::new();
    for i in 0..pair_count(p) {
        if mask >> i & 1 == 1 {
            let r = i as u64 + 1;
            s.push(r);
            if p - r != r {
                s.push(p - r);
            }
        }
    }
    s.sort_unstable();
    s
}

/// Image of a pair mask under S -> aS.
fn scale_mask(p: u64, mask: u32, a: u64) -> u32 {
    let mut out = 0;
    for i in 0..pair_count(p) {
        if mask >> i & 1 == 1 {
            let x = mul_mod(i as u64 + 1, a, p);
            let r = x.min(p - x);
            out |= 1 << (r - 1);
        }
    }
    out
}

/// Orbits of symmetric connection sets under the multiplier action, as
/// (minimal mask, orbit size), ordered by mask.
fn multiplier_orbits(p: u64) -> Result<Vec<(u32, u64)>> {
    let g = primitive_root(p)?.value();
    let total = 1usize << pair_count(p);
    let mut seen = vec![false; total];
    let mut orbits = Vec::new();
    for mask in 0..total as u32 {
        if seen[mask as usize] {
            continue;
        }
        let mut size = 0;
        let mut m = mask;
        while !seen[m as usize] {
            seen[m as usize] = true;
            size += 1;
            m = scale_mask(p, m, g);
        }
        orbits.push((mask, size));
    }
    Ok(orbits)
}

fn analyze(p: u64, mask: u32, orbit_size: u64) -> Result<AtlasEntry> {
    let g = CirculantGraph::from_connection_set(p, mask_to_set(p, mask).into_iter().map(|x| x as i64))?;
    let k = g.graph_type();
    let is_2maximal = if p == 2 { None } else { Some(check_2maximal_mod_p(&g.multiplier_group(), p)?.is_2maximal) };
    let profile = eigenspace_partition(&g)?;
    let eigenvalue_classes = profile.class_count();
    let distinct_eigenvalues = profile.distinct_eigenvalue_count();
    Ok(AtlasEntry {
        p,
        representative: g.connection_set().to_vec(),
        orbit_size,
        k,
        is_2maximal,
        verdict: certify(&g).verdict,
        eigenvalue_classes,
        distinct_eigenvalues,
        degenerate: distinct_eigenvalues != eigenvalue_classes,
    })
}

/// One entry per multiplier orbit of symmetric connection sets mod p,
/// ordered by the bitmask of the orbit's minimal representative.
pub fn enumerate_atlas(p: u64) -> Result<Vec<AtlasEntry>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p > ATLAS_MAX_PRIME {
        return Err(Error::RangeExceeded { what: "atlas prime", value: p, bound: ATLAS_MAX_PRIME });
    }
    multiplier_orbits(p)?.into_par_iter().map(|(mask, size)| analyze(p, mask, size)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRow {
    pub k: u64,
    pub p: u64,
    /// 6^φ(k) in decimal.
    pub bound: String,
    pub below_bound: bool,
    pub is_2maximal: bool,
    pub genuine_violation: Option<[u64; 4]>,
}

fn scan_primes(k: u64, p_max: u64) -> Vec<u64> {
    let start = (SCAN_MIN_PRIME - 1).div_ceil(k) * k + 1;
    (start..=p_max).step_by(k as usize).filter(|&p| p >= SCAN_MIN_PRIME && is_prime(p)).collect()
}

fn scan_row(k: u64, p: u64, bound: &BigUint) -> Result<ScanRow> {
    let report = check_2maximal_mod_p(&subgroup_of_order(p, k)?, p)?;
    Ok(ScanRow {
        k,
        p,
        bound: bound.to_string(),
        below_bound: BigUint::from(p) <= *bound,
        is_2maximal: report.is_2maximal,
        genuine_violation: report.first_genuine.map(|s| s.quadruple()),
    })
}

/// Scans every prime 5 ≤ p ≤ p_max with k | p-1, in increasing order.
///
/// Rows are handed to `sink` as soon as their chunk completes. A row above
/// the bound that is not 2-maximal is passed to `sink` and then reported as
/// [`Error::BoundFalsified`].
pub fn scan_bound_tightness_streaming(k: u64, p_max: u64, mut sink: impl FnMut(&ScanRow)) -> Result<Vec<ScanRow>> {
    if k < 2 || k % 2 == 1 {
        return Err(Error::OddOrder(k));
    }
    let bound = bound_for_type(k);
    let primes = scan_primes(k, p_max);
    let chunk = (rayon::current_num_threads() * 4).max(1);
    let mut rows = Vec::with_capacity(primes.len());
    for ps in primes.chunks(chunk) {
        let batch: Vec<ScanRow> = ps.par_iter().map(|&p| scan_row(k, p, &bound)).collect::<Result<_>>()?;
        for row in batch {
            sink(&row);
            if !row.below_bound && !row.is_2maximal {
                return Err(Error::BoundFalsified {
                    k,
                    p: row.p,
                    quadruple: row.genuine_violation.unwrap_or_default(),
                });
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

pub fn scan_bound_tightness(k: u64, p_max: u64) -> Result<Vec<ScanRow>> {
    scan_bound_tightness_streaming(k, p_max, |_| {})
}

/// Smallest scanned prime p₀ such that every scanned prime p ≥ p₀ is
/// 2-maximal. `None` when the last scanned prime fails or nothing is scanned.
pub fn minimal_uniform_prime(k: u64, p_max: u64) -> Result<Option<u64>> {
    let rows = scan_bound_tightness(k, p_max)?;
    Ok(uniform_from_rows(&rows))
}

fn uniform_from_rows(rows: &[ScanRow]) -> Option<u64> {
    let last_failure = rows.iter().rev().find(|r| !r.is_2maximal).map(|r| r.p);
    rows.iter().map(|r| r.p).find(|&p| last_failure.is_none_or(|f| p > f))
}

/// One compact JSON object per line.
pub fn write_json_lines<T: Serialize>(items: &[T], out: &mut impl Write) -> std::io::Result<()> {
    for item in items {
        serde_json::to_writer(&mut *out, item)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

fn join(xs: &[u64]) -> String {
    xs.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
}

pub const SCAN_CSV_HEADER: [&str; 6] = ["k", "p", "bound", "below_bound", "is_2maximal", "violation"];

pub fn scan_csv_record(r: &ScanRow) -> [String; 6] {
    [
        r.k.to_string(),
        r.p.to_string(),
        r.bound.clone(),
        r.below_bound.to_string(),
        r.is_2maximal.to_string(),
        r.genuine_violation.map(|q| join(&q)).unwrap_or_default(),
    ]
}

pub fn write_scan_csv(rows: &[ScanRow], out: impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SCAN_CSV_HEADER)?;
    for r in rows {
        w.write_record(scan_csv_record(r))?;
    }
    w.flush()?;
    Ok(())
}

pub const ATLAS_CSV_HEADER: [&str; 9] = [
    "p",
    "representative",
    "orbit_size",
    "k",
    "is_2maximal",
    "verdict",
    "eigenvalue_classes",
    "distinct_eigenvalues",
    "degenerate",
];

pub fn write_atlas_csv(entries: &[AtlasEntry], out: impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ATLAS_CSV_HEADER)?;
    for e in entries {
        w.write_record([
            e.p.to_string(),
            join(&e.representative),
            e.orbit_size.to_string(),
            e.k.to_string(),
            e.is_2maximal.map(|b| b.to_string()).unwrap_or_default(),
            format!("{:?}", e.verdict),
            e.eigenvalue_classes.to_string(),
            e.distinct_eigenvalues.to_string(),
            e.degenerate.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
