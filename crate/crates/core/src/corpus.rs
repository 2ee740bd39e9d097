//! Seeded random graphs, instances, and formulas for the regression and
//! acceptance suites. Everything is a pure function of the RNG so test runs
//! are reproducible bit for bit.

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::forge::{CnfFormula, Lit};
use crate::graph::Graph;
use crate::instance::{Instance, ListAssignment};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// G(n, p)-style graph, loopless.
pub fn random_graph(n: usize, edge_prob: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(edge_prob) {
                g.add_edge(u, v);
            }
        }
    }
    g
}

/// Random bipartite graph on `a + b` vertices (class A first).
pub fn random_bipartite(a: usize, b: usize, edge_prob: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut g = Graph::new(a + b);
    for u in 0..a {
        for v in a..a + b {
            if rng.gen_bool(edge_prob) {
                g.add_edge(u, v);
            }
        }
    }
    g
}

/// Random connected bipartite graph: a random spanning tree over an
/// interleaved 2-coloring plus extra cross edges.
pub fn random_connected_bipartite(n: usize, extra_prob: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut g = Graph::new(n);
    if n == 0 {
        return g;
    }
    // Parity classes: even vertices vs odd vertices.
    for v in 1..n {
        // Attach to a random earlier vertex of the other parity, if any;
        // otherwise to v - 1 (which has the other parity).
        let candidates: Vec<usize> = (0..v).filter(|u| (u % 2) != (v % 2)).collect();
        let u = candidates[rng.gen_range(0..candidates.len())];
        g.add_edge(u, v);
    }
    for u in 0..n {
        for v in u + 1..n {
            if (u % 2) != (v % 2) && !g.has_edge(u, v) && rng.gen_bool(extra_prob) {
                g.add_edge(u, v);
            }
        }
    }
    g
}

/// Random subset of `0..k`.
pub fn random_subset(k: usize, keep_prob: f64, rng: &mut ChaCha8Rng) -> BTreeSet<usize> {
    (0..k).filter(|_| rng.gen_bool(keep_prob)).collect()
}

/// Random instance with arbitrary lists over the given target.
pub fn random_instance(target: &Graph, n: usize, edge_prob: f64, rng: &mut ChaCha8Rng) -> Instance {
    let source = random_graph(n, edge_prob, rng);
    let lists = ListAssignment::from_vec(
        (0..n).map(|_| random_subset(target.n(), 0.55, rng)).collect(),
    );
    Instance {
        target: target.clone(),
        source,
        lists,
    }
}

/// Random consistent instance over a connected bipartite target: connected
/// bipartite source, lists drawn within the aligned target class.
pub fn random_consistent_instance(
    target: &Graph,
    n: usize,
    extra_prob: f64,
    rng: &mut ChaCha8Rng,
) -> Instance {
    let tbp = target.bipartition().expect("target must be bipartite");
    let source = random_connected_bipartite(n, extra_prob, rng);
    let sbp = source.bipartition().expect("constructed bipartite");
    let x_class: Vec<usize> = tbp.class_a.iter().copied().collect();
    let y_class: Vec<usize> = tbp.class_b.iter().copied().collect();
    let lists = ListAssignment::from_vec(
        (0..n)
            .map(|v| {
                let pool = if sbp.in_a(v) { &x_class } else { &y_class };
                pool.iter()
                    .copied()
                    .filter(|_| rng.gen_bool(0.7))
                    .collect()
            })
            .collect(),
    );
    Instance {
        target: target.clone(),
        source,
        lists,
    }
}

/// Random 3-CNF formula.
pub fn random_formula(num_vars: usize, num_clauses: usize, rng: &mut ChaCha8Rng) -> CnfFormula {
    let clauses = (0..num_clauses)
        .map(|_| {
            [0; 3].map(|_| Lit {
                var: rng.gen_range(0..num_vars),
                negated: rng.gen_bool(0.5),
            })
        })
        .collect();
    CnfFormula::new(num_vars, clauses)
}

/// Deterministic chain formula over `vars` variables: clause `i` is
/// `(x_i or x_{i+1} or not x_{i+2})`, indices wrapping. NAE-satisfiable by
/// the alternating assignment, and its incidence structure is path-like, so
/// the generated NAE instances have small treewidth at any size.
pub fn chain_formula(vars: usize) -> CnfFormula {
    assert!(vars >= 3);
    let clauses = (0..vars)
        .map(|i| {
            [
                Lit {
                    var: i,
                    negated: false,
                },
                Lit {
                    var: (i + 1) % vars,
                    negated: false,
                },
                Lit {
                    var: (i + 2) % vars,
                    negated: true,
                },
            ]
        })
        .collect();
    CnfFormula::new(vars, clauses)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn connected_bipartite_is_what_it_says() {
        let mut r = rng(7);
        for _ in 0..30 {
            let n = 1 + r.gen_range(0..12);
            let g = random_connected_bipartite(n, 0.2, &mut r);
            assert!(g.is_connected());
            assert!(g.is_bipartite());
        }
    }

    #[test]
    fn chain_formula_is_nae_satisfiable() {
        for vars in [3, 5, 8] {
            assert!(chain_formula(vars).is_nae_satisfiable());
        }
    }

    #[test]
    fn consistent_instances_are_consistent() {
        let mut r = rng(11);
        let target = crate::graph::cycle_graph(4);
        for _ in 0..20 {
            let n = 2 + r.gen_range(0..8);
            let inst = random_consistent_instance(&target, n, 0.3, &mut r);
            assert!(crate::instance::consistent_orientation(&inst).is_some());
        }
    }
}
