//! Quantum-symmetry certificates for circulant graphs.
//!
//! [`certify`] walks a fixed list of rules and records every step it takes,
//! so the resulting [`Certificate`] can be checked independently with
//! [`Certificate::replay`]. The rules, in order:
//!
//! 1. n ≤ 3: the quantum permutation group of n points is classical, so no
//!    graph on at most three vertices has quantum symmetry.
//! 2. n ≥ 4 and the graph is empty or complete: exhibit a block magic
//!    unitary with non-commuting entries (the complete graph is handled
//!    through its complement, which shares its quantum automorphism group).
//! 3. n prime ≥ 5: if the multiplier group E is 2-maximal in Z_p, there is
//!    no quantum symmetry. We also record whether p > 6^φ(k), which alone
//!    guarantees 2-maximality.
//! 4. n = 4 and the graph or its complement is the 4-cycle: exhibit the
//!    block witness under the vertex order 0, 2, 1, 3.
//! 5. Anything else is undecided. Failure of 2-maximality does not imply
//!    quantum symmetry.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::graph::CirculantGraph;
use crate::maximality::{check_2maximal_mod_p, SolutionCounts};
use crate::modular::{euler_phi, is_prime};
use crate::spectral::verify_coset_eigenvalue_law;
use crate::witness::{
    build_u_pq, extend_with_identity_tail, verify_commutation, verify_magic_unitary, MagicUnitaryWitness,
};

/// 6^φ(k): above this many vertices every order-k subgroup of Z_p^* is
/// 2-maximal.
pub fn bound_for_type(k: u64) -> BigUint {
    assert!(k >= 1, "type must be positive");
    BigUint::from(6u32).pow(euler_phi(k) as u32)
}

/// Vertex order under which the 4-cycle commutes with the block witness.
pub const C4_WITNESS_ORDER: [u64; 4] = [0, 2, 1, 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    NoQuantumSymmetry,
    HasQuantumSymmetry,
    Undecided,
}

/// One step of a certificate. Variants marked "conclusion" end a chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Rule {
    VertexCount {
        n: u64,
        prime: bool,
    },
    /// Conclusion: no quantum symmetry on at most three vertices.
    SmallVertexCount {
        n: u64,
    },
    EmptyOrComplete {
        empty: bool,
        complete: bool,
    },
    ComplementInvariance {
        complement: Vec<u64>,
    },
    CycleOfLengthFour {
        via_complement: bool,
    },
    MultiplierGroup {
        elements: Vec<u64>,
        k: u64,
    },
    TypeBound {
        p: u64,
        k: u64,
        phi_k: u64,
        bound: String,
        exceeded: bool,
    },
    TwoMaximality {
        p: u64,
        is_2maximal: bool,
        counts: SolutionCounts,
        first_genuine: Option<[u64; 4]>,
    },
    /// Conclusion: E is 2-maximal in Z_p with p ≥ 5, hence no quantum symmetry.
    TwoMaximalMultiplierGroup {
        p: u64,
        k: u64,
    },
    /// Conclusion: an exact magic unitary commuting with the adjacency
    /// matrix has non-commuting entries.
    WitnessExhibited {
        label: String,
        vertex_order: Vec<u64>,
        magic_unitary: bool,
        commutes: bool,
        noncommuting_pair: Option<[(usize, usize); 2]>,
    },
    /// Conclusion: none of the rules decide this graph.
    Inconclusive {
        reasons: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantCheck {
    pub name: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub graph: CirculantGraph,
    pub verdict: Verdict,
    pub rules: Vec<Rule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<MagicUnitaryWitness>,
    pub invariant_checks: Vec<InvariantCheck>,
}

fn check(name: &str, passed: bool) -> InvariantCheck {
    InvariantCheck { name: name.to_string(), passed }
}

fn witness_rule(w: &MagicUnitaryWitness, g: &CirculantGraph, order: &[u64]) -> (Rule, Vec<InvariantCheck>) {
    let magic_unitary = verify_magic_unitary(w).is_ok();
    let commutes = verify_commutation(w, g, order).unwrap_or(false);
    let noncommuting_pair = w.noncommuting_pair();
    let checks = vec![
        check("magic_unitary", magic_unitary),
        check("commutes_with_adjacency", commutes),
        check("noncommuting_entries", noncommuting_pair.is_some()),
    ];
    let rule = Rule::WitnessExhibited {
        label: w.label.clone(),
        vertex_order: order.to_vec(),
        magic_unitary,
        commutes,
        noncommuting_pair,
    };
    (rule, checks)
}

fn verdict_of(rules: &[Rule]) -> Verdict {
    match rules.last() {
        Some(Rule::SmallVertexCount { .. }) | Some(Rule::TwoMaximalMultiplierGroup { .. }) => {
            Verdict::NoQuantumSymmetry
        }
        Some(Rule::WitnessExhibited { magic_unitary: true, commutes: true, noncommuting_pair: Some(_), .. }) => {
            Verdict::HasQuantumSymmetry
        }
        _ => Verdict::Undecided,
    }
}

fn finish(
    graph: &CirculantGraph,
    rules: Vec<Rule>,
    witness: Option<MagicUnitaryWitness>,
    invariant_checks: Vec<InvariantCheck>,
) -> Certificate {
    let verdict = verdict_of(&rules);
    // A witness is only attached to a positive verdict.
    let witness = witness.filter(|_| verdict == Verdict::HasQuantumSymmetry);
    Certificate { graph: graph.clone(), verdict, rules, witness, invariant_checks }
}

pub fn certify(g: &CirculantGraph) -> Certificate {
    let n = g.n();
    let prime = is_prime(n);
    let mut rules = vec![Rule::VertexCount { n, prime }];
    let mut checks = Vec::new();

    if n <= 3 {
        rules.push(Rule::SmallVertexCount { n });
        return finish(g, rules, None, checks);
    }

    if g.is_empty_graph() || g.is_complete() {
        rules.push(Rule::EmptyOrComplete { empty: g.is_empty_graph(), complete: g.is_complete() });
        if g.is_complete() {
            rules.push(Rule::ComplementInvariance { complement: g.complement().connection_set().to_vec() });
        }
        let w = extend_with_identity_tail(&build_u_pq(), n as usize).expect("n >= 4");
        let order: Vec<u64> = (0..n).collect();
        let (rule, mut wc) = witness_rule(&w, g, &order);
        if g.is_complete() {
            wc.push(check(
                "commutes_with_complement",
                verify_commutation(&w, &g.complement(), &order).unwrap_or(false),
            ));
        }
        rules.push(rule);
        checks.extend(wc);
        return finish(g, rules, Some(w), checks);
    }

    let mut reasons = Vec::new();
    if prime {
        let p = n;
        let e = g.multiplier_group();
        let k = e.order() as u64;
        rules.push(Rule::MultiplierGroup { elements: e.elements().to_vec(), k });
        checks.push(check("multiplier_group_is_even", e.is_even()));
        let law = verify_coset_eigenvalue_law(g).map(|c| c.holds).unwrap_or(false);
        checks.push(check("coset_eigenvalue_law", law));

        let bound = bound_for_type(k);
        let exceeded = BigUint::from(p) > bound;
        rules.push(Rule::TypeBound { p, k, phi_k: euler_phi(k), bound: bound.to_string(), exceeded });

        let report = check_2maximal_mod_p(&e, p).expect("p odd prime, E even");
        rules.push(Rule::TwoMaximality {
            p,
            is_2maximal: report.is_2maximal,
            counts: report.counts,
            first_genuine: report.first_genuine.map(|s| s.quadruple()),
        });
        if exceeded {
            checks.push(check("bound_implies_2maximal", report.is_2maximal));
        }
        if report.is_2maximal {
            rules.push(Rule::TwoMaximalMultiplierGroup { p, k });
            return finish(g, rules, None, checks);
        }
        let q = report.first_genuine.expect("not 2-maximal").quadruple();
        reasons.push(format!("multiplier group of order {k} is not 2-maximal mod {p}: genuine solution {q:?}"));
    }

    if n == 4 {
        let via_complement = g.connection_set() == [2];
        rules.push(Rule::CycleOfLengthFour { via_complement });
        if via_complement {
            rules.push(Rule::ComplementInvariance { complement: g.complement().connection_set().to_vec() });
        }
        let w = build_u_pq();
        let (rule, wc) = witness_rule(&w, g, &C4_WITNESS_ORDER);
        rules.push(rule);
        checks.extend(wc);
        return finish(g, rules, Some(w), checks);
    }

    if !prime {
        reasons.push(format!("{n} is composite; the 2-maximality criterion needs a prime vertex count"));
    }
    rules.push(Rule::Inconclusive { reasons });
    finish(g, rules, None, checks)
}

/// A rule whose recorded parameters do not match a fresh computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayMismatch {
    pub index: usize,
    pub rule: Rule,
}

impl Certificate {
    /// Re-derives every rule from its recorded parameters and the graph and
    /// returns the verdict the chain supports.
    pub fn replay(&self) -> Result<Verdict, ReplayMismatch> {
        let g = &self.graph;
        for (index, rule) in self.rules.iter().enumerate() {
            let ok = match rule {
                Rule::VertexCount { n, prime } => *n == g.n() && *prime == is_prime(g.n()),
                Rule::SmallVertexCount { n } => *n == g.n() && *n <= 3,
                Rule::EmptyOrComplete { empty, complete } => {
                    *empty == g.is_empty_graph() && *complete == g.is_complete() && (*empty || *complete) && g.n() >= 4
                }
                Rule::ComplementInvariance { complement } => complement == g.complement().connection_set(),
                Rule::CycleOfLengthFour { via_complement } => {
                    let c4 = CirculantGraph::cycle(4);
                    let target = if *via_complement { g.complement() } else { g.clone() };
                    target == c4
                }
                Rule::MultiplierGroup { elements, k } => {
                    let e = g.multiplier_group();
                    e.elements() == elements.as_slice() && e.order() as u64 == *k
                }
                Rule::TypeBound { p, k, phi_k, bound, exceeded } => {
                    let b = bound_for_type(*k);
                    *phi_k == euler_phi(*k) && *bound == b.to_string() && *exceeded == (BigUint::from(*p) > b)
                }
                Rule::TwoMaximality { p, is_2maximal, counts, first_genuine } => {
                    let e = g.multiplier_group();
                    match check_2maximal_mod_p(&e, *p) {
                        Ok(r) => {
                            r.is_2maximal == *is_2maximal
                                && r.counts == *counts
                                && r.first_genuine.map(|s| s.quadruple()) == *first_genuine
                        }
                        Err(_) => false,
                    }
                }
                Rule::TwoMaximalMultiplierGroup { p, k } => {
                    *p >= 5
                        && *p == g.n()
                        && is_prime(*p)
                        && *k == g.graph_type()
                        && check_2maximal_mod_p(&g.multiplier_group(), *p).is_ok_and(|r| r.is_2maximal)
                }
                Rule::WitnessExhibited { vertex_order, magic_unitary, commutes, noncommuting_pair, label } => {
                    match &self.witness {
                        Some(w) => {
                            w.label == *label
                                && verify_magic_unitary(w).is_ok() == *magic_unitary
                                && verify_commutation(w, g, vertex_order).unwrap_or(false) == *commutes
                                && w.noncommuting_pair() == *noncommuting_pair
                        }
                        None => !(*magic_unitary && *commutes && noncommuting_pair.is_some()),
                    }
                }
                Rule::Inconclusive { .. } => index + 1 == self.rules.len(),
            };
            if !ok {
                return Err(ReplayMismatch { index, rule: rule.clone() });
            }
        }
        Ok(verdict_of(&self.rules))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(n: u64, s: &[i64]) -> CirculantGraph {
        CirculantGraph::from_connection_set(n, s.iter().copied()).unwrap()
    }

    #[test]
    fn bound_examples() {
        assert_eq!(bound_for_type(2), BigUint::from(6u32));
        assert_eq!(bound_for_type(4), BigUint::from(36u32));
        assert_eq!(bound_for_type(12), BigUint::from(1296u32));
    }

    #[test]
    fn cycle_seven() {
        let c = certify(&CirculantGraph::cycle(7));
        assert_eq!(c.verdict, Verdict::NoQuantumSymmetry);
        assert!(c
            .rules
            .iter()
            .any(|r| matches!(r, Rule::TypeBound { p: 7, k: 2, bound, exceeded: true, .. } if bound == "6")));
        assert!(matches!(c.rules.last(), Some(Rule::TwoMaximalMultiplierGroup { p: 7, k: 2 })));
        assert!(c.witness.is_none());
        assert!(c.invariant_checks.iter().all(|c| c.passed));
    }

    #[test]
    fn cycle_five_needs_the_direct_check() {
        let c = certify(&CirculantGraph::cycle(5));
        assert_eq!(c.verdict, Verdict::NoQuantumSymmetry);
        assert!(c.rules.iter().any(|r| matches!(r, Rule::TypeBound { p: 5, exceeded: false, .. })));
        assert!(c.rules.iter().any(|r| matches!(r, Rule::TwoMaximality { is_2maximal: true, .. })));
    }

    #[test]
    fn empty_five_has_a_witness() {
        let c = certify(&CirculantGraph::empty(5));
        assert_eq!(c.verdict, Verdict::HasQuantumSymmetry);
        let w = c.witness.as_ref().unwrap();
        assert_eq!(w.n, 5);
        assert!(w.is_magic_unitary());
        assert!(verify_commutation(w, &c.graph, &[0, 1, 2, 3, 4]).unwrap());
    }

    #[test]
    fn small_graphs() {
        for n in 1..=3 {
            assert_eq!(certify(&CirculantGraph::empty(n)).verdict, Verdict::NoQuantumSymmetry);
            assert_eq!(certify(&CirculantGraph::complete(n)).verdict, Verdict::NoQuantumSymmetry);
        }
    }

    #[test]
    fn four_vertices() {
        let c4 = certify(&CirculantGraph::cycle(4));
        assert_eq!(c4.verdict, Verdict::HasQuantumSymmetry);
        assert!(
            matches!(&c4.rules[c4.rules.len() - 1], Rule::WitnessExhibited { vertex_order, .. } if vertex_order == &C4_WITNESS_ORDER)
        );
        let two_k2 = certify(&g(4, &[2]));
        assert_eq!(two_k2.verdict, Verdict::HasQuantumSymmetry);
        assert!(two_k2.rules.contains(&Rule::CycleOfLengthFour { via_complement: true }));
        assert_eq!(certify(&CirculantGraph::complete(4)).verdict, Verdict::HasQuantumSymmetry);
    }

    #[test]
    fn undecided_cases() {
        // composite
        let c6 = certify(&CirculantGraph::cycle(6));
        assert_eq!(c6.verdict, Verdict::Undecided);
        // Paley 13 has type 6, and 13 < 6^2; its multiplier group is not 2-maximal
        let paley = certify(&CirculantGraph::paley(13).unwrap());
        assert_eq!(paley.verdict, Verdict::Undecided);
        match paley.rules.last() {
            Some(Rule::Inconclusive { reasons }) => assert!(reasons[0].contains("not 2-maximal")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn replay_detects_tampering() {
        let mut c = certify(&CirculantGraph::cycle(11));
        assert_eq!(c.replay(), Ok(c.verdict));
        c.rules[1] = Rule::MultiplierGroup { elements: vec![1, 3, 8, 10], k: 4 };
        assert_eq!(c.replay().unwrap_err().index, 1);

        let mut c = certify(&CirculantGraph::empty(6));
        c.witness.as_mut().unwrap().entries[0][0] = crate::witness::RatMatrix::identity(2);
        assert!(c.replay().is_err());
    }

    #[test]
    fn certificate_json_roundtrip() {
        for graph in
            [CirculantGraph::cycle(7), CirculantGraph::empty(5), CirculantGraph::cycle(4), CirculantGraph::cycle(9)]
        {
            let c = certify(&graph);
            let s = serde_json::to_string(&c).unwrap();
            let back: Certificate = serde_json::from_str(&s).unwrap();
            assert_eq!(back, c);
            assert_eq!(back.replay(), Ok(c.verdict));
        }
    }

    fn graph_on(n: u64) -> impl Strategy<Value = CirculantGraph> {
        prop::collection::vec(any::<bool>(), (n / 2) as usize).prop_map(move |bits| {
            let s: Vec<i64> = bits
                .iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .flat_map(|(i, _)| [i as i64 + 1, -(i as i64 + 1)])
                .collect();
            CirculantGraph::from_connection_set(n, s).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn certificates_are_sound_and_complement_consistent(graph in (1u64..24).prop_flat_map(graph_on)) {
            let c = certify(&graph);
            let cc = certify(&graph.complement());
            let contradictory = matches!(
                (c.verdict, cc.verdict),
                (Verdict::NoQuantumSymmetry, Verdict::HasQuantumSymmetry) | (Verdict::HasQuantumSymmetry, Verdict::NoQuantumSymmetry)
            );
            prop_assert!(!contradictory);
            if c.verdict == Verdict::HasQuantumSymmetry {
                let w = c.witness.as_ref().unwrap();
                prop_assert!(w.is_magic_unitary());
                prop_assert!(w.noncommuting_pair().is_some());
            }
            prop_assert!(c.invariant_checks.iter().all(|x| x.passed));
            prop_assert_eq!(c.replay(), Ok(c.verdict));
        }
    }
}
