//! Spectral decomposition of circulant adjacency matrices on a prime number
//! of vertices.
//!
//! The vector ξ^x = (1, w^x, w^2x, ...) with w = e^(2πi/p) is an eigenvector
//! of the adjacency matrix with eigenvalue f(x) = Σ_{t∈S} w^(xt). We compute
//! f(x) exactly in Z[ζ_p]; the complex values are only a cross-check.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::cyclotomic::CyclotomicInt;
use crate::error::{Error, Result};
use crate::graph::CirculantGraph;
use crate::modular::{inv_mod, is_prime, mul_mod};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

fn require_prime(g: &CirculantGraph) -> Result<u64> {
    let p = g.n();
    if is_prime(p) {
        Ok(p)
    } else {
        Err(Error::NotPrime(p))
    }
}

/// Exact f(x) = Σ_{t∈S} ζ_p^(xt) in Z[ζ_p].
pub fn eigenvalue_function(g: &CirculantGraph, x: u64) -> Result<CyclotomicInt> {
    let p = require_prime(g)?;
    Ok(eigenvalue_exact(g, p, x))
}

fn eigenvalue_exact(g: &CirculantGraph, p: u64, x: u64) -> CyclotomicInt {
    let mut poly = vec![num_bigint::BigInt::from(0); p as usize];
    for &t in g.connection_set() {
        poly[mul_mod(x, t, p) as usize] += 1;
    }
    CyclotomicInt::from_poly(p, poly)
}

/// f(x) by direct complex summation, independent of the exact route.
pub fn eigenvalue_numeric(g: &CirculantGraph, x: u64) -> Complex64 {
    let n = g.n();
    g.connection_set().iter().map(|&t| Complex64::from_polar(1.0, TAU * mul_mod(x, t, n) as f64 / n as f64)).sum()
}

/// max_i |(d ξ^x)_i - f(x) ξ^x_i| computed in floating point.
pub fn eigenvector_residual(g: &CirculantGraph, x: u64) -> f64 {
    let n = g.n();
    let d = g.adjacency_matrix();
    let xi: Vec<Complex64> =
        (0..n).map(|j| Complex64::from_polar(1.0, TAU * mul_mod(x, j, n) as f64 / n as f64)).collect();
    let f = eigenvalue_numeric(g, x);
    (0..n as usize)
        .map(|i| {
            let dxi: Complex64 = (0..n as usize).filter(|&j| d[i][j] == 1).map(|j| xi[j]).sum();
            (dxi - f * xi[i]).norm()
        })
        .fold(0.0, f64::max)
}

/// One eigenspace index class with its exact eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenClass {
    pub indices: Vec<u64>,
    pub eigenvalue: CyclotomicInt,
    /// (re, im) of the eigenvalue, by direct summation.
    pub numeric: (f64, f64),
}

/// Z_p split into {0} and the cosets xE, each carrying its eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralProfile {
    pub p: u64,
    pub k: u64,
    pub classes: Vec<EigenClass>,
}

impl SpectralProfile {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    /// Number of distinct exact eigenvalues across classes.
    pub fn distinct_eigenvalue_count(&self) -> usize {
        let mut seen: Vec<&CyclotomicInt> = Vec::new();
        for c in &self.classes {
            if !seen.contains(&&c.eigenvalue) {
                seen.push(&c.eigenvalue);
            }
        }
        seen.len()
    }

    pub fn eigenvalue(&self, x: u64) -> &CyclotomicInt {
        let x = x % self.p;
        &self.classes.iter().find(|c| c.indices.contains(&x)).expect("classes partition Z_p").eigenvalue
    }
}

/// Partition of Z_p into {0} and the (p-1)/k cosets of E. The exact
/// eigenvalue is checked to be constant on every class.
pub fn eigenspace_partition(g: &CirculantGraph) -> Result<SpectralProfile> {
    let p = require_prime(g)?;
    let e = g.multiplier_group();
    let mut index_classes = vec![vec![0u64]];
    index_classes.extend(e.cosets_in_units());
    let classes = index_classes
        .into_par_iter()
        .map(|indices| {
            let eigenvalue = eigenvalue_exact(g, p, indices[0]);
            for &x in &indices[1..] {
                assert_eq!(eigenvalue_exact(g, p, x), eigenvalue, "f not constant on the class of {}", indices[0]);
            }
            let z = eigenvalue_numeric(g, indices[0]);
            EigenClass { indices, eigenvalue, numeric: (z.re, z.im) }
        })
        .collect();
    Ok(SpectralProfile { p, k: e.order() as u64, classes })
}

/// A pair (x, y) in Z_p^* where "f(x) = f(y)" and "xE = yE" disagree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CosetLawCounterexample {
    pub x: u64,
    pub y: u64,
    pub values_equal: bool,
    pub same_coset: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CosetLawCheck {
    pub holds: bool,
    pub pairs_checked: u64,
    pub counterexample: Option<CosetLawCounterexample>,
}

/// Checks f(x) = f(y) ⟺ xE = yE exactly over all ordered pairs in Z_p^*.
pub fn verify_coset_eigenvalue_law(g: &CirculantGraph) -> Result<CosetLawCheck> {
    let p = require_prime(g)?;
    let e = g.multiplier_group();
    let values: Vec<CyclotomicInt> = (0..p).into_par_iter().map(|x| eigenvalue_exact(g, p, x)).collect();
    let mut pairs_checked = 0;
    for x in 1..p {
        for y in 1..p {
            pairs_checked += 1;
            let values_equal = values[x as usize] == values[y as usize];
            let same_coset = e.contains(mul_mod(x, inv_mod(y, p).expect("unit"), p));
            if values_equal != same_coset {
                return Ok(CosetLawCheck {
                    holds: false,
                    pairs_checked,
                    counterexample: Some(CosetLawCounterexample { x, y, values_equal, same_coset }),
                });
            }
        }
    }
    Ok(CosetLawCheck { holds: true, pairs_checked, counterexample: None })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterReport {
    pub tolerance: f64,
    pub count: usize,
    /// (re, im) cluster means, sorted by decreasing real part.
    pub centers: Vec<(f64, f64)>,
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Clusters the numeric eigenvalues f(0..p) by single linkage at
/// `tolerance`. Fails if two distinct clusters come within 10x tolerance,
/// since the count would then depend on where the cut falls.
pub fn numeric_eigenvalue_clusters(g: &CirculantGraph, tolerance: f64) -> Result<ClusterReport> {
    if !(tolerance > 0.0 && tolerance.is_finite()) {
        return Err(Error::InvalidTolerance(tolerance));
    }
    let p = require_prime(g)?;
    let values: Vec<Complex64> = (0..p).map(|x| eigenvalue_numeric(g, x)).collect();
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() < tolerance {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    for i in 0..n {
        for j in i + 1..n {
            let distance = (values[i] - values[j]).norm();
            if roots[i] != roots[j] && distance < 10.0 * tolerance {
                return Err(Error::ToleranceAmbiguity { distance, tolerance });
            }
        }
    }
    let mut clusters: Vec<(usize, Complex64, usize)> = Vec::new();
    for (i, &root) in roots.iter().enumerate() {
        match clusters.iter_mut().find(|c| c.0 == root) {
            Some(c) => {
                c.1 += values[i];
                c.2 += 1;
            }
            None => clusters.push((root, values[i], 1)),
        }
    }
    let mut centers: Vec<(f64, f64)> = clusters
        .into_iter()
        .map(|(_, sum, len)| {
            let c = sum / len as f64;
            (c.re, c.im)
        })
        .collect();
    centers.sort_by(|a, b| b.0.total_cmp(&a.0).then(b.1.total_cmp(&a.1)));
    Ok(ClusterReport { tolerance, count: centers.len(), centers })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::root_of_unity;
    use proptest::prelude::*;

    #[test]
    fn eigenvalue_examples() {
        let paley = CirculantGraph::paley(13).unwrap();
        assert_eq!(eigenvalue_function(&paley, 0).unwrap(), CyclotomicInt::from_int(13, 6));
        let c5 = CirculantGraph::cycle(5);
        let f1 = eigenvalue_function(&c5, 1).unwrap();
        assert_eq!(f1, &root_of_unity(5, 1) + &root_of_unity(5, 4));
        assert!((f1.to_complex().re - 0.618_033_988_749_895).abs() < 1e-12);
        for x in 0..7 {
            assert!(eigenvalue_function(&CirculantGraph::empty(7), x).unwrap().is_zero());
        }
        assert_eq!(eigenvalue_function(&CirculantGraph::cycle(6), 1), Err(Error::NotPrime(6)));
    }

    #[test]
    fn partition_examples() {
        let c5 = eigenspace_partition(&CirculantGraph::cycle(5)).unwrap();
        let idx: Vec<Vec<u64>> = c5.classes.iter().map(|c| c.indices.clone()).collect();
        assert_eq!(idx, vec![vec![0], vec![1, 4], vec![2, 3]]);
        assert_eq!(eigenspace_partition(&CirculantGraph::cycle(13)).unwrap().class_count(), 7);
        let x7 = eigenspace_partition(&CirculantGraph::empty(7)).unwrap();
        let idx: Vec<Vec<u64>> = x7.classes.iter().map(|c| c.indices.clone()).collect();
        assert_eq!(idx, vec![vec![0], vec![1, 2, 3, 4, 5, 6]]);
        assert_eq!(x7.distinct_eigenvalue_count(), 1);
    }

    #[test]
    fn empty_graph_keeps_index_classes_but_one_eigenvalue() {
        // E = {1, 10} would need S != ∅; for X_11 E is everything so 2 classes
        let x11 = eigenspace_partition(&CirculantGraph::empty(11)).unwrap();
        assert_eq!(x11.class_count(), 2);
        assert_eq!(x11.distinct_eigenvalue_count(), 1);
        assert_eq!(numeric_eigenvalue_clusters(&CirculantGraph::empty(11), 1e-9).unwrap().count, 1);
    }

    #[test]
    fn coset_law_examples() {
        let c7 = verify_coset_eigenvalue_law(&CirculantGraph::cycle(7)).unwrap();
        assert!(c7.holds);
        assert_eq!(c7.pairs_checked, 36);
        assert!(verify_coset_eigenvalue_law(&CirculantGraph::paley(13).unwrap()).unwrap().holds);
        assert!(verify_coset_eigenvalue_law(&CirculantGraph::empty(11)).unwrap().holds);
    }

    #[test]
    fn cluster_examples() {
        let c5 = numeric_eigenvalue_clusters(&CirculantGraph::cycle(5), 1e-9).unwrap();
        assert_eq!(c5.count, 3);
        let expected = [2.0, (TAU / 5.0).cos() * 2.0, (2.0 * TAU / 5.0).cos() * 2.0];
        for (c, e) in c5.centers.iter().zip(expected) {
            assert!((c.0 - e).abs() < 1e-12 && c.1.abs() < 1e-12);
        }
        let k7 = numeric_eigenvalue_clusters(&CirculantGraph::complete(7), 1e-9).unwrap();
        assert_eq!(k7.count, 2);
        assert!((k7.centers[0].0 - 6.0).abs() < 1e-12 && (k7.centers[1].0 + 1.0).abs() < 1e-12);
        assert_eq!(numeric_eigenvalue_clusters(&CirculantGraph::empty(11), 1e-9).unwrap().count, 1);
    }

    #[test]
    fn cluster_tolerance_errors() {
        let c5 = CirculantGraph::cycle(5);
        assert!(matches!(numeric_eigenvalue_clusters(&c5, 0.0), Err(Error::InvalidTolerance(_))));
        assert!(matches!(numeric_eigenvalue_clusters(&c5, f64::NAN), Err(Error::InvalidTolerance(_))));
        // 0.618 and -1.618 are 2.236 apart, 2 and 0.618 are 1.382 apart
        assert!(matches!(numeric_eigenvalue_clusters(&c5, 0.5), Err(Error::ToleranceAmbiguity { .. })));
        assert!(matches!(numeric_eigenvalue_clusters(&c5, 1.5), Err(Error::ToleranceAmbiguity { .. })));
        assert_eq!(numeric_eigenvalue_clusters(&c5, 2.5).unwrap().count, 1);
    }

    fn prime_graph() -> impl Strategy<Value = CirculantGraph> {
        prop::sample::select(vec![5u64, 7, 11, 13, 17, 19, 23]).prop_flat_map(|p| {
            prop::collection::vec(any::<bool>(), ((p - 1) / 2) as usize).prop_map(move |bits| {
                let s: Vec<i64> = bits
                    .iter()
                    .enumerate()
                    .filter(|(_, &b)| b)
                    .flat_map(|(i, _)| [i as i64 + 1, -(i as i64 + 1)])
                    .collect();
                CirculantGraph::from_connection_set(p, s).unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn exact_and_numeric_agree(graph in prime_graph(), x in 0u64..1000) {
            let x = x % graph.n();
            let exact = eigenvalue_function(&graph, x).unwrap().to_complex();
            prop_assert!((exact - eigenvalue_numeric(&graph, x)).norm() < 1e-9);
            prop_assert!(eigenvector_residual(&graph, x) < 1e-9);
        }

        #[test]
        fn sum_rule_and_degree(graph in prime_graph()) {
            let p = graph.n();
            let total = (0..p).fold(CyclotomicInt::zero(p), |acc, x| &acc + &eigenvalue_function(&graph, x).unwrap());
            prop_assert!(total.is_zero());
            prop_assert_eq!(
                eigenvalue_function(&graph, 0).unwrap().as_integer(),
                Some((graph.degree() as i64).into())
            );
        }

        #[test]
        fn class_count_matches_type(graph in prime_graph()) {
            let p = graph.n();
            let profile = eigenspace_partition(&graph).unwrap();
            let k = graph.graph_type();
            prop_assert_eq!(profile.class_count() as u64, 1 + (p - 1) / k);
            prop_assert!(verify_coset_eigenvalue_law(&graph).unwrap().holds);
            let clusters = numeric_eigenvalue_clusters(&graph, 1e-6).unwrap().count;
            if graph.is_empty_graph() {
                prop_assert_eq!(clusters, 1);
                prop_assert_eq!(profile.distinct_eigenvalue_count(), 1);
            } else {
                prop_assert_eq!(clusters as u64, 1 + (p - 1) / k);
                prop_assert_eq!(profile.distinct_eigenvalue_count(), profile.class_count());
            }
        }
    }
}
