//! Problem instances `(G, L)` with a bound target `H`, consistency splitting
//! for bipartite targets, the lift from an associated bipartite graph back to
//! its base, and the C4-to-P3 reduction.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::graph::{associated_bipartite, path_graph, Graph};

/// Per-source-vertex subsets of target vertices (the lists `L`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ListAssignment {
    lists: Vec<BTreeSet<usize>>,
}

impl ListAssignment {
    pub fn empty(n_source: usize) -> Self {
        ListAssignment {
            lists: vec![BTreeSet::new(); n_source],
        }
    }

    pub fn full(n_source: usize, n_target: usize) -> Self {
        ListAssignment {
            lists: vec![(0..n_target).collect(); n_source],
        }
    }

    pub fn from_vec(lists: Vec<BTreeSet<usize>>) -> Self {
        ListAssignment { lists }
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }

    pub fn get(&self, v: usize) -> &BTreeSet<usize> {
        &self.lists[v]
    }

    pub fn set(&mut self, v: usize, list: BTreeSet<usize>) {
        self.lists[v] = list;
    }

    pub fn insert(&mut self, v: usize, value: usize) {
        self.lists[v].insert(value);
    }

    pub fn iter(&self) -> impl Iterator<Item = &BTreeSet<usize>> {
        self.lists.iter()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InstanceError {
    #[error("list count {lists} does not match source vertex count {vertices}")]
    ListCountMismatch { lists: usize, vertices: usize },
    #[error("list of vertex {vertex} mentions target vertex {value} out of range")]
    ListValueOutOfRange { vertex: usize, value: usize },
}

/// An instance of LLSHom(H): target graph, source graph, and lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub target: Graph,
    pub source: Graph,
    pub lists: ListAssignment,
}

impl Instance {
    pub fn new(target: Graph, source: Graph, lists: ListAssignment) -> Result<Self, InstanceError> {
        if lists.len() != source.n() {
            return Err(InstanceError::ListCountMismatch {
                lists: lists.len(),
                vertices: source.n(),
            });
        }
        for v in 0..source.n() {
            if let Some(&value) = lists.get(v).iter().next_back() {
                if value >= target.n() {
                    return Err(InstanceError::ListValueOutOfRange { vertex: v, value });
                }
            }
        }
        Ok(Instance {
            target,
            source,
            lists,
        })
    }

    /// Instance with every list equal to all of `V(H)`.
    pub fn with_full_lists(target: Graph, source: Graph) -> Self {
        let lists = ListAssignment::full(source.n(), target.n());
        Instance {
            target,
            source,
            lists,
        }
    }

    /// Sub-instance induced by the source vertices `verts` (strictly
    /// increasing); the target is unchanged.
    pub fn restrict_source(&self, verts: &[usize]) -> Instance {
        let source = self.source.induced(verts);
        let lists = ListAssignment::from_vec(verts.iter().map(|&v| self.lists.get(v).clone()).collect());
        Instance {
            target: self.target.clone(),
            source,
            lists,
        }
    }

    /// Re-expresses the instance over `new_target`, where `embed[i]` names
    /// the old target vertex that plays the role of new vertex `i`.
    /// `embed` must be a bijection onto the old target's vertices and is
    /// trusted to be an isomorphism.
    pub fn retarget(&self, new_target: Graph, embed: &[usize]) -> Instance {
        assert_eq!(new_target.n(), self.target.n());
        let mut inv = vec![usize::MAX; self.target.n()];
        for (new, &old) in embed.iter().enumerate() {
            inv[old] = new;
        }
        let lists = ListAssignment::from_vec(
            (0..self.source.n())
                .map(|v| self.lists.get(v).iter().map(|&old| inv[old]).collect())
                .collect(),
        );
        Instance {
            target: new_target,
            source: self.source.clone(),
            lists,
        }
    }
}

/// The consistency-split result for one connected component of the source:
/// the component's vertices in the original numbering plus the (at most two)
/// consistent candidate instances on the renumbered component. The original
/// instance is a yes-instance iff every component has a yes candidate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentSplit {
    pub vertices: Vec<usize>,
    pub candidates: Vec<Instance>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SplitError {
    #[error("target is not a connected bipartite graph")]
    TargetNotBipartite,
}

/// Splits an instance over a connected bipartite target into consistent
/// instances, two per connected component of the source (lists intersected
/// with the target classes both ways). Returns an empty vector when the
/// source is not bipartite: a trivial no-instance.
pub fn split_consistent(inst: &Instance) -> Result<Vec<ComponentSplit>, SplitError> {
    let target_bp = inst.target.bipartition().ok_or(SplitError::TargetNotBipartite)?;
    if !inst.target.is_connected() {
        return Err(SplitError::TargetNotBipartite);
    }
    let source_bp = match inst.source.bipartition() {
        Some(bp) => bp,
        None => return Ok(vec![]),
    };
    let x: BTreeSet<usize> = target_bp.class_a;
    let y: BTreeSet<usize> = target_bp.class_b;
    let mut out = Vec::new();
    for comp in inst.source.connected_components() {
        let sub = inst.restrict_source(&comp);
        let cand = |a_side: &BTreeSet<usize>, b_side: &BTreeSet<usize>| -> Instance {
            let lists = ListAssignment::from_vec(
                comp.iter()
                    .enumerate()
                    .map(|(i, &v)| {
                        let side = if source_bp.in_a(v) { a_side } else { b_side };
                        sub.lists.get(i).intersection(side).copied().collect()
                    })
                    .collect(),
            );
            Instance {
                target: sub.target.clone(),
                source: sub.source.clone(),
                lists,
            }
        };
        let l1 = cand(&x, &y);
        let l2 = cand(&y, &x);
        out.push(ComponentSplit {
            vertices: comp,
            candidates: vec![l1, l2],
        });
    }
    Ok(out)
}

/// Checks the consistency conditions for an instance over a connected
/// bipartite target: connected bipartite source whose one class has lists in
/// the target class `X` and the other in `Y`. On success returns the source
/// vertices mapped into the target class containing target vertex 0.
pub fn consistent_orientation(inst: &Instance) -> Option<BTreeSet<usize>> {
    let tbp = inst.target.bipartition()?;
    if !inst.target.is_connected() || !inst.source.is_connected() {
        return None;
    }
    let sbp = inst.source.bipartition()?;
    let fits = |side: &BTreeSet<usize>, class: &BTreeSet<usize>| {
        side.iter().all(|&v| inst.lists.get(v).is_subset(class))
    };
    if fits(&sbp.class_a, &tbp.class_a) && fits(&sbp.class_b, &tbp.class_b) {
        return Some(sbp.class_a);
    }
    if fits(&sbp.class_b, &tbp.class_a) && fits(&sbp.class_a, &tbp.class_b) {
        return Some(sbp.class_b);
    }
    None
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LiftError {
    #[error("base graph must be connected and nonbipartite")]
    BaseNotEligible,
    #[error("instance target is not the associated bipartite graph of the base")]
    TargetMismatch,
    #[error("instance is not consistent")]
    Inconsistent,
}

/// Lifts a consistent instance over `H* = H x K2` (in the standard indexing
/// `v' = v`, `v'' = n + v`) to an instance over the base `H`, preserving the
/// answer exactly: `L(v) = {x : {x', x''} meets L'(v)}`.
pub fn lift_to_base(inst_star: &Instance, base: &Graph) -> Result<Instance, LiftError> {
    if !base.is_connected() || base.is_bipartite() {
        return Err(LiftError::BaseNotEligible);
    }
    let star = associated_bipartite(base);
    if star.graph != inst_star.target {
        return Err(LiftError::TargetMismatch);
    }
    consistent_orientation(inst_star).ok_or(LiftError::Inconsistent)?;
    let n = base.n();
    let lists = ListAssignment::from_vec(
        (0..inst_star.source.n())
            .map(|v| {
                inst_star
                    .lists
                    .get(v)
                    .iter()
                    .map(|&s| if s < n { s } else { s - n })
                    .collect()
            })
            .collect(),
    );
    Ok(Instance {
        target: base.clone(),
        source: inst_star.source.clone(),
        lists,
    })
}

/// Recovers a witness for the starred instance from a witness over the base:
/// vertices of the source class whose lists sit in `V'` go to `x'`, the rest
/// to `x''`.
pub fn lift_witness_back(
    inst_star: &Instance,
    base_n: usize,
    base_witness: &[usize],
) -> Vec<usize> {
    let sbp = inst_star.source.bipartition().expect("consistent instance");
    // Determine which source class maps into the primed class V' = 0..n.
    let a_primed = sbp
        .class_a
        .iter()
        .find_map(|&v| inst_star.lists.get(v).iter().next().map(|&s| s < base_n))
        .or_else(|| {
            sbp.class_b
                .iter()
                .find_map(|&v| inst_star.lists.get(v).iter().next().map(|&s| s >= base_n))
        })
        .unwrap_or(true);
    (0..inst_star.source.n())
        .map(|v| {
            let x = base_witness[v];
            if sbp.in_a(v) == a_primed {
                x
            } else {
                base_n + x
            }
        })
        .collect()
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReduceError {
    #[error("target is not the canonical 4-cycle")]
    TargetNotC4,
    #[error("instance is not consistent for C4 (class of vertex 0 must list only {{1,3}})")]
    Inconsistent,
}

/// Result of reducing a consistent C4 instance to two P3 instances. The
/// original is a yes-instance iff BOTH outputs are. `first` keeps the X-side
/// lists and pins Y to the path 1-2-3; `second` pins X to 1 on the path
/// 4-1-2 and keeps the Y-side lists. Both outputs use the canonical P3
/// target 0-1-2; translate path values back to C4 with
/// [`C4Reduction::c4_value_first`] and [`C4Reduction::c4_value_second`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct C4Reduction {
    pub first: Instance,
    pub second: Instance,
    /// Source vertices of the class mapped into C4's {0, 2} side.
    pub x_class: BTreeSet<usize>,
}

impl C4Reduction {
    /// C4 vertex (0-based; paper name minus one) for a value of `first`.
    pub fn c4_value_first(p3_value: usize) -> usize {
        // path 1-2-3 laid out as P3 vertices 0,1,2
        p3_value
    }

    /// C4 vertex for a value of `second`: the path 4-1-2 is laid out as P3
    /// vertices 0,1,2.
    pub fn c4_value_second(p3_value: usize) -> usize {
        [3, 0, 1][p3_value]
    }
}

/// Reduces a consistent instance over the canonical C4 (cycle 0-1-2-3,
/// paper names 1-4) to two consistent P3 instances per the two displayed
/// list functions. Requires the class containing source vertex 0 to carry
/// lists within {0, 2} (paper {1, 3}).
pub fn reduce_c4_to_p3(inst: &Instance) -> Result<C4Reduction, ReduceError> {
    let c4 = crate::graph::cycle_graph(4);
    if inst.target != c4 {
        return Err(ReduceError::TargetNotC4);
    }
    let x_class = consistent_orientation(inst).ok_or(ReduceError::Inconsistent)?;
    // consistent_orientation keys classes off target vertex 0's class {0,2}.
    let p3 = path_graph(3);
    let n = inst.source.n();
    let first_lists = ListAssignment::from_vec(
        (0..n)
            .map(|v| {
                if x_class.contains(&v) {
                    // X keeps L(v) within {0,2} -> path vertices 0,2
                    inst.lists.get(v).clone()
                } else {
                    BTreeSet::from([1])
                }
            })
            .collect(),
    );
    let second_lists = ListAssignment::from_vec(
        (0..n)
            .map(|v| {
                if x_class.contains(&v) {
                    // X pinned to C4 vertex 0 = middle of the path 4-1-2
                    BTreeSet::from([1])
                } else {
                    // Y keeps lists; C4 vertex 3 -> path 0, C4 vertex 1 -> path 2
                    inst.lists
                        .get(v)
                        .iter()
                        .map(|&c| if c == 3 { 0 } else { 2 })
                        .collect()
                }
            })
            .collect(),
    );
    Ok(C4Reduction {
        first: Instance {
            target: p3.clone(),
            source: inst.source.clone(),
            lists: first_lists,
        },
        second: Instance {
            target: p3,
            source: inst.source.clone(),
            lists: second_lists,
        },
        x_class,
    })
}

/// Auxiliary instance for the P3 engine: a bipartite source with classes X
/// (lists within the path ends {0, 2}) and Y (always mapped to the middle),
/// plus per-Y demand sets sigma within {0, 2}. End 0 is tracked as bit 0 and
/// end 2 as bit 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuxInstance {
    graph: Graph,
    side: Vec<Side>,
    cons: Vec<u8>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    X,
    Y,
}

pub const END_LO: u8 = 0b01; // path vertex 0 (paper color 1)
pub const END_HI: u8 = 0b10; // path vertex 2 (paper color 3)
pub const BOTH_ENDS: u8 = END_LO | END_HI;

pub fn end_mask_to_p3(mask: u8) -> usize {
    match mask {
        END_LO => 0,
        END_HI => 2,
        _ => panic!("not a singleton end mask: {mask:#b}"),
    }
}

impl AuxInstance {
    /// `cons[v]` is the list mask for X vertices and the sigma mask for Y
    /// vertices. Edges must join X to Y.
    pub fn new(graph: Graph, side: Vec<Side>, cons: Vec<u8>) -> Self {
        assert_eq!(side.len(), graph.n());
        assert_eq!(cons.len(), graph.n());
        debug_assert!(cons.iter().all(|&m| m <= BOTH_ENDS));
        debug_assert!(graph
            .edges()
            .iter()
            .all(|&(u, v)| matches!((side[u], side[v]), (Side::X, Side::Y) | (Side::Y, Side::X))));
        AuxInstance { graph, side, cons }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn side(&self, v: usize) -> Side {
        self.side[v]
    }

    pub fn is_x(&self, v: usize) -> bool {
        matches!(self.side[v], Side::X)
    }

    pub fn cons(&self, v: usize) -> u8 {
        self.cons[v]
    }

    pub fn set_cons(&mut self, v: usize, mask: u8) {
        debug_assert!(mask <= BOTH_ENDS);
        self.cons[v] = mask;
    }

    /// The branching measure: total list size over X plus total sigma size
    /// over Y.
    pub fn mu(&self) -> usize {
        self.cons.iter().map(|m| m.count_ones() as usize).sum()
    }
}

/// A connected bipartite graph recognized as `H* = H x K2` for a connected
/// nonbipartite base `H`: the base together with the relabeling of the input
/// graph onto the standard star indexing (`to_std[t]` is the standard H*
/// index of input vertex `t`).
pub struct AssociatedBase {
    pub base: Graph,
    pub to_std: Vec<usize>,
}

/// Recognizes targets of the form `H x K2` for small connected nonbipartite
/// `H` (up to 5 base vertices) by enumerating pairings between the two
/// bipartition classes.
pub fn detect_associated_base(t: &Graph) -> Option<AssociatedBase> {
    if t.n() == 0 || t.n() % 2 != 0 || t.n() > 10 || !t.is_connected() {
        return None;
    }
    let bp = t.bipartition()?;
    if bp.class_a.len() != bp.class_b.len() {
        return None;
    }
    let p: Vec<usize> = bp.class_a.iter().copied().collect();
    let q: Vec<usize> = bp.class_b.iter().copied().collect();
    let k = p.len();
    let mut pi: Vec<usize> = (0..k).collect();
    // Enumerate bijections P -> Q in lexicographic order of (pi(0), ...).
    loop {
        // Edge relation R(i, j) = p[i] adjacent q[pi(j)]. The base exists
        // iff R is symmetric; base edge {i, j} iff R(i, j).
        let mut ok = true;
        'sym: for i in 0..k {
            for j in 0..k {
                if (t.has_edge(p[i], q[pi[j]])) != (t.has_edge(p[j], q[pi[i]])) {
                    ok = false;
                    break 'sym;
                }
            }
        }
        if ok {
            let mut base = Graph::new(k);
            for i in 0..k {
                for j in i..k {
                    if t.has_edge(p[i], q[pi[j]]) {
                        base.add_edge(i, j);
                    }
                }
            }
            if base.is_connected() && !base.is_bipartite() {
                let mut to_std = vec![usize::MAX; t.n()];
                for i in 0..k {
                    to_std[p[i]] = i; // primed
                }
                let mut inv = vec![usize::MAX; k];
                for (j, &pj) in pi.iter().enumerate() {
                    inv[pj] = j;
                }
                for (pos, &qv) in q.iter().enumerate() {
                    to_std[qv] = k + inv[pos]; // double primed
                }
                return Some(AssociatedBase { base, to_std });
            }
        }
        if !next_permutation(&mut pi) {
            return None;
        }
    }
}

fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}
