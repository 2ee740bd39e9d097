//! Ground truth for every solver in the crate: list-homomorphism checking
//! and happiness (local surjectivity) of candidate mappings.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::instance::Instance;

/// A total mapping `V(G) -> V(H)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homomorphism(pub Vec<usize>);

impl Homomorphism {
    pub fn get(&self, v: usize) -> usize {
        self.0[v]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// First violation found when a mapping fails to be a list homomorphism.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HomViolation {
    /// `h(v)` is not in `L(v)` (or out of target range).
    List { vertex: usize },
    /// Edge `uv` of the source maps to a non-edge of the target.
    Edge { u: usize, v: usize },
}

impl fmt::Display for HomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HomViolation::List { vertex } => write!(f, "vertex {vertex} maps outside its list"),
            HomViolation::Edge { u, v } => {
                write!(f, "edge ({u}, {v}) maps to a target non-edge")
            }
        }
    }
}

/// True iff every edge of the source maps to a target edge (loops allowed)
/// and every vertex maps within its list. Lists are checked in vertex order,
/// then edges in sorted order, and the first violation is reported.
pub fn is_list_homomorphism(inst: &Instance, h: &Homomorphism) -> Result<(), HomViolation> {
    assert_eq!(h.len(), inst.source.n(), "mapping must be total");
    for v in 0..inst.source.n() {
        let img = h.get(v);
        if img >= inst.target.n() || !inst.lists.get(v).contains(&img) {
            return Err(HomViolation::List { vertex: v });
        }
    }
    for (u, v) in inst.source.edges() {
        if !inst.target.has_edge(h.get(u), h.get(v)) {
            return Err(HomViolation::Edge { u, v });
        }
    }
    Ok(())
}

/// The set of happy vertices: `v` with `h(N_G(v)) = N_H(h(v))`. For a
/// homomorphism the image is always a subset, so the check is coverage of
/// `N_H(h(v))`.
pub fn happy_vertices(inst: &Instance, h: &Homomorphism) -> BTreeSet<usize> {
    let mut happy = BTreeSet::new();
    for v in 0..inst.source.n() {
        if missing_neighbor(inst, h, v).is_none() {
            happy.insert(v);
        }
    }
    happy
}

/// Least target neighbor of `h(v)` not seen in the image of `N_G(v)`, if any.
fn missing_neighbor(inst: &Instance, h: &Homomorphism, v: usize) -> Option<usize> {
    let image: BTreeSet<usize> = inst.source.neighbors(v).map(|u| h.get(u)).collect();
    inst.target
        .neighbors(h.get(v))
        .find(|needed| !image.contains(needed))
}

#[derive(Clone, Copy, Debug, Error, PartialEq, Eq)]
pub enum VerifyError {
    #[error("not a list homomorphism: {0}")]
    NotHomomorphism(HomViolation),
    #[error("vertex {vertex} is unhappy: no neighbor maps to target vertex {missing}")]
    Unhappy { vertex: usize, missing: usize },
}

/// Accepts iff `h` is a list homomorphism and every vertex is happy. On
/// rejection the diagnostics name the first unhappy vertex and the missing
/// target neighbor.
pub fn verify_solution(inst: &Instance, h: &Homomorphism) -> Result<(), VerifyError> {
    is_list_homomorphism(inst, h).map_err(VerifyError::NotHomomorphism)?;
    for v in 0..inst.source.n() {
        if let Some(missing) = missing_neighbor(inst, h, v) {
            return Err(VerifyError::Unhappy { vertex: v, missing });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{path_graph, Graph};
    use crate::instance::{Instance, ListAssignment};

    fn k2_to_k2() -> Instance {
        Instance::with_full_lists(path_graph(2), path_graph(2))
    }

    #[test]
    fn identity_on_edge_is_accepted() {
        let inst = k2_to_k2();
        let h = Homomorphism(vec![0, 1]);
        assert!(is_list_homomorphism(&inst, &h).is_ok());
        assert_eq!(happy_vertices(&inst, &h).len(), 2);
        assert!(verify_solution(&inst, &h).is_ok());
    }

    #[test]
    fn collapsing_edge_without_loop_is_rejected() {
        let inst = k2_to_k2();
        let h = Homomorphism(vec![0, 0]);
        assert_eq!(
            is_list_homomorphism(&inst, &h),
            Err(HomViolation::Edge { u: 0, v: 1 })
        );
    }

    #[test]
    fn edge_into_p3_middle_sees_unhappy_endpoint() {
        // G = K2 mapped into P3 as (0, 1): the vertex at the middle misses
        // neighbor 2.
        let inst = Instance::with_full_lists(path_graph(3), path_graph(2));
        let h = Homomorphism(vec![0, 1]);
        assert!(is_list_homomorphism(&inst, &h).is_ok());
        let happy = happy_vertices(&inst, &h);
        assert!(happy.contains(&0));
        assert!(!happy.contains(&1));
        assert_eq!(
            verify_solution(&inst, &h),
            Err(VerifyError::Unhappy {
                vertex: 1,
                missing: 2
            })
        );
    }

    #[test]
    fn alternating_c4_into_p3_is_locally_surjective() {
        let c4 = crate::graph::cycle_graph(4);
        let mut lists = ListAssignment::empty(4);
        for (v, l) in [(0, vec![0, 2]), (1, vec![1]), (2, vec![0, 2]), (3, vec![1])] {
            lists.set(v, l.into_iter().collect());
        }
        let inst = Instance::new(path_graph(3), c4, lists).unwrap();
        let h = Homomorphism(vec![0, 1, 2, 1]);
        assert!(verify_solution(&inst, &h).is_ok());
    }

    #[test]
    fn list_violation_reported_before_edges() {
        let target = path_graph(2);
        let source = path_graph(2);
        let mut lists = ListAssignment::empty(2);
        lists.set(0, [1].into_iter().collect());
        lists.set(1, [1].into_iter().collect());
        let inst = Instance::new(target, source, lists).unwrap();
        let h = Homomorphism(vec![0, 1]);
        assert_eq!(
            is_list_homomorphism(&inst, &h),
            Err(HomViolation::List { vertex: 0 })
        );
    }

    #[test]
    fn matches_definitional_predicate_on_random_maps() {
        // Independent evaluation of the happiness predicate on small random
        // instances and maps.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..200 {
            let n = 2 + (next() % 6) as usize;
            let hn = 1 + (next() % 4) as usize;
            let mut g = Graph::new(n);
            for u in 0..n {
                for v in u + 1..n {
                    if next() % 3 == 0 {
                        g.add_edge(u, v);
                    }
                }
            }
            let mut h_graph = Graph::new(hn);
            for u in 0..hn {
                for v in u..hn {
                    if next() % 3 == 0 {
                        h_graph.add_edge(u, v);
                    }
                }
            }
            let inst = Instance::with_full_lists(h_graph, g);
            let map = Homomorphism((0..n).map(|_| (next() % hn as u64) as usize).collect());
            let is_hom = inst
                .source
                .edges()
                .iter()
                .all(|&(u, v)| inst.target.has_edge(map.get(u), map.get(v)));
            assert_eq!(is_list_homomorphism(&inst, &map).is_ok(), is_hom);
            if is_hom {
                let all_happy = (0..n).all(|v| {
                    let image: BTreeSet<usize> =
                        inst.source.neighbors(v).map(|u| map.get(u)).collect();
                    inst.target.neighbors(map.get(v)).all(|b| image.contains(&b))
                });
                assert_eq!(verify_solution(&inst, &map).is_ok(), all_happy);
            }
        }
    }
}
