//! Undirected graphs with loops, structural queries, and graph constructions.
//!
//! Vertices are dense indices `0..n`. A loop is stored as self-membership in
//! the neighbor set, so `N(v)` contains `v` exactly when `v` has a loop and
//! happiness checks downstream need no special case.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

/// Finite undirected graph, loops allowed.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<BTreeSet<usize>>,
    m: usize,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            adj: vec![BTreeSet::new(); n],
            m: 0,
        }
    }

    /// Builds a graph from an edge list. Panics on out-of-range endpoints or
    /// duplicate edges; intended for programmatic constructions whose input
    /// is trusted. File parsers do their own checking.
    pub fn from_edges<I: IntoIterator<Item = (usize, usize)>>(n: usize, edges: I) -> Self {
        let mut g = Graph::new(n);
        for (u, v) in edges {
            assert!(g.add_edge(u, v), "duplicate edge ({u}, {v})");
        }
        g
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    /// Number of edges; a loop counts once.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Inserts the edge `{u, v}` (a loop when `u == v`). Returns `false` if
    /// the edge was already present.
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        assert!(u < self.n() && v < self.n(), "edge ({u}, {v}) out of range");
        if self.adj[u].contains(&v) {
            return false;
        }
        self.adj[u].insert(v);
        self.adj[v].insert(u);
        self.m += 1;
        true
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(&v)
    }

    pub fn has_loop(&self, v: usize) -> bool {
        self.adj[v].contains(&v)
    }

    pub fn has_any_loop(&self) -> bool {
        (0..self.n()).any(|v| self.has_loop(v))
    }

    /// Neighbors of `v` in ascending order, including `v` itself when looped.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].iter().copied()
    }

    pub fn neighbor_set(&self, v: usize) -> &BTreeSet<usize> {
        &self.adj[v]
    }

    /// `|N(v)|`; a looped vertex contributes itself once.
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// All edges as pairs `(u, v)` with `u <= v`, lexicographically sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.m);
        for u in 0..self.n() {
            for &v in &self.adj[u] {
                if u <= v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Connected components, each sorted ascending, ordered by least vertex.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n()];
        let mut comps = Vec::new();
        for s in 0..self.n() {
            if seen[s] {
                continue;
            }
            let mut comp = vec![];
            let mut queue = VecDeque::from([s]);
            seen[s] = true;
            while let Some(v) = queue.pop_front() {
                comp.push(v);
                for &u in &self.adj[v] {
                    if !seen[u] {
                        seen[u] = true;
                        queue.push_back(u);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() <= 1
    }

    /// Subgraph induced by `verts` (strictly increasing); vertex `verts[i]`
    /// becomes vertex `i`.
    pub fn induced(&self, verts: &[usize]) -> Graph {
        debug_assert!(verts.windows(2).all(|w| w[0] < w[1]));
        let mut pos = vec![usize::MAX; self.n()];
        for (i, &v) in verts.iter().enumerate() {
            pos[v] = i;
        }
        let mut g = Graph::new(verts.len());
        for (i, &v) in verts.iter().enumerate() {
            for &u in &self.adj[v] {
                if u >= v && pos[u] != usize::MAX {
                    g.add_edge(i, pos[u]);
                }
            }
        }
        g
    }

    /// 2-coloring witness for loopless bipartite graphs; `None` otherwise.
    /// Per component, the class of the least vertex goes to `class_a`.
    pub fn bipartition(&self) -> Option<Bipartition> {
        if self.has_any_loop() {
            return None;
        }
        let mut side = vec![u8::MAX; self.n()];
        for s in 0..self.n() {
            if side[s] != u8::MAX {
                continue;
            }
            side[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &u in &self.adj[v] {
                    if side[u] == u8::MAX {
                        side[u] = 1 - side[v];
                        queue.push_back(u);
                    } else if side[u] == side[v] {
                        return None;
                    }
                }
            }
        }
        let mut bp = Bipartition {
            class_a: BTreeSet::new(),
            class_b: BTreeSet::new(),
        };
        for v in 0..self.n() {
            if side[v] == 0 {
                bp.class_a.insert(v);
            } else {
                bp.class_b.insert(v);
            }
        }
        Some(bp)
    }

    pub fn is_bipartite(&self) -> bool {
        self.bipartition().is_some()
    }

    /// Length of a shortest cycle; a loop counts as a cycle of length 1.
    /// `None` for forests (girth infinity).
    pub fn girth(&self) -> Option<usize> {
        if self.has_any_loop() {
            return Some(1);
        }
        // Shortest cycle through each edge: delete it, find the distance
        // between its endpoints. Exact, and fast enough for our sizes.
        let mut best: Option<usize> = None;
        for (u, v) in self.edges() {
            if let Some(d) = self.dist_avoiding(u, v, (u, v)) {
                let cyc = d + 1;
                if best.map_or(true, |b| cyc < b) {
                    best = Some(cyc);
                }
            }
        }
        best
    }

    fn dist_avoiding(&self, from: usize, to: usize, skip: (usize, usize)) -> Option<usize> {
        let mut dist = vec![usize::MAX; self.n()];
        dist[from] = 0;
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            if v == to {
                return Some(dist[v]);
            }
            for &u in &self.adj[v] {
                if (v, u) == skip || (u, v) == skip {
                    continue;
                }
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        None
    }

    /// True iff the graph has no cycle shorter than `p` (loops count as
    /// length-1 cycles). Works edge by edge with depth-bounded searches, so
    /// it stays affordable on large sparse graphs where `girth` would not.
    pub fn girth_at_least(&self, p: usize) -> bool {
        if p <= 1 {
            return true;
        }
        if self.has_any_loop() {
            return false;
        }
        if p <= 3 {
            return true; // simple graphs have no 1- or 2-cycles
        }
        // A cycle of length < p through edge (u,v) means dist(u,v) < p - 1
        // in the graph without that edge. The searched ball is small, so the
        // distance array is reset via a touched list instead of reallocated.
        let mut dist = vec![usize::MAX; self.n()];
        let mut touched = Vec::new();
        let mut queue = VecDeque::new();
        for (u, v) in self.edges() {
            dist[u] = 0;
            touched.push(u);
            queue.push_back(u);
            let mut short = false;
            while let Some(x) = queue.pop_front() {
                if dist[x] + 1 > p - 2 {
                    continue;
                }
                for &y in &self.adj[x] {
                    if (x, y) == (u, v) || (y, x) == (u, v) {
                        continue;
                    }
                    if dist[y] == usize::MAX {
                        dist[y] = dist[x] + 1;
                        touched.push(y);
                        queue.push_back(y);
                    }
                }
            }
            if dist[v] != usize::MAX {
                short = dist[v] + 1 < p;
            }
            for &t in &touched {
                dist[t] = usize::MAX;
            }
            touched.clear();
            queue.clear();
            if short {
                return false;
            }
        }
        true
    }

    /// BFS distances from `from`; `usize::MAX` marks unreachable vertices.
    pub fn distances(&self, from: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n()];
        dist[from] = 0;
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            for &u in &self.adj[v] {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        dist
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n(), self.edges())
    }
}

/// Two-coloring of a loopless bipartite graph. Every edge has one endpoint in
/// each class; the classes partition the vertex set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bipartition {
    pub class_a: BTreeSet<usize>,
    pub class_b: BTreeSet<usize>,
}

impl Bipartition {
    pub fn in_a(&self, v: usize) -> bool {
        self.class_a.contains(&v)
    }
}

/// Direct (categorical) product `G x H` together with the index mapping
/// `(u, v) <-> u * |V(H)| + v`.
pub struct Product {
    pub graph: Graph,
    g_n: usize,
    h_n: usize,
}

impl Product {
    pub fn encode(&self, u: usize, v: usize) -> usize {
        debug_assert!(u < self.g_n && v < self.h_n);
        u * self.h_n + v
    }

    pub fn decode(&self, p: usize) -> (usize, usize) {
        (p / self.h_n, p % self.h_n)
    }
}

/// `{(u1,v1),(u2,v2)}` is an edge iff `u1u2 in E(G)` and `v1v2 in E(H)`.
pub fn direct_product(g: &Graph, h: &Graph) -> Product {
    let mut out = Graph::new(g.n() * h.n());
    let enc = |u: usize, v: usize| u * h.n() + v;
    for (a, b) in g.edges() {
        for (c, d) in h.edges() {
            out.add_edge(enc(a, c), enc(b, d));
            out.add_edge(enc(a, d), enc(b, c));
        }
    }
    Product {
        graph: out,
        g_n: g.n(),
        h_n: h.n(),
    }
}

/// Associated bipartite graph `H* = H x K2`: vertices `v' = v` and
/// `v'' = n + v`, edges `u'v''` for each `uv in E(H)` (a loop at `v` yields
/// the edge `v'v''`). The primed and double-primed sets are the bipartition
/// classes.
pub struct AssociatedBipartite {
    pub graph: Graph,
    base_n: usize,
}

impl AssociatedBipartite {
    pub fn prime(&self, v: usize) -> usize {
        debug_assert!(v < self.base_n);
        v
    }

    pub fn double_prime(&self, v: usize) -> usize {
        debug_assert!(v < self.base_n);
        self.base_n + v
    }

    pub fn base_n(&self) -> usize {
        self.base_n
    }

    /// Base vertex of a star vertex, with its class (`true` = primed).
    pub fn base_of(&self, star: usize) -> (usize, bool) {
        if star < self.base_n {
            (star, true)
        } else {
            (star - self.base_n, false)
        }
    }
}

pub fn associated_bipartite(h: &Graph) -> AssociatedBipartite {
    let n = h.n();
    let mut g = Graph::new(2 * n);
    for (u, v) in h.edges() {
        g.add_edge(u, n + v);
        if u != v {
            g.add_edge(v, n + u);
        }
    }
    AssociatedBipartite { graph: g, base_n: n }
}

/// Lexicographically least induced embedding of `f` into `g`: an injective
/// `phi` with `phi(i)phi(j) in E(G)` iff `ij in E(F)` (loops included), least
/// in the order of the sequence `(phi(0), phi(1), ...)`. Uses degree pruning
/// and lexicographic branching.
pub fn find_induced_graph(g: &Graph, f: &Graph) -> Option<Vec<usize>> {
    if f.n() == 0 {
        return Some(vec![]);
    }
    if f.n() > g.n() {
        return None;
    }
    let mut phi: Vec<usize> = Vec::with_capacity(f.n());
    let mut used = vec![false; g.n()];
    if extend(g, f, &mut phi, &mut used) {
        Some(phi)
    } else {
        None
    }
}

fn extend(g: &Graph, f: &Graph, phi: &mut Vec<usize>, used: &mut [bool]) -> bool {
    let i = phi.len();
    if i == f.n() {
        return true;
    }
    'cand: for c in 0..g.n() {
        if used[c] || g.degree(c) < f.degree(i) {
            continue;
        }
        if g.has_loop(c) != f.has_loop(i) {
            continue;
        }
        for j in 0..i {
            if f.has_edge(i, j) != g.has_edge(c, phi[j]) {
                continue 'cand;
            }
        }
        phi.push(c);
        used[c] = true;
        if extend(g, f, phi, used) {
            return true;
        }
        phi.pop();
        used[c] = false;
    }
    false
}

/// Isomorphism `a -> b` by exhaustive permutation; intended for the
/// constant-size target graphs of this crate (callers keep `n` small).
pub fn graph_isomorphism(a: &Graph, b: &Graph) -> Option<Vec<usize>> {
    if a.n() != b.n() || a.m() != b.m() {
        return None;
    }
    let mut da: Vec<usize> = (0..a.n()).map(|v| a.degree(v)).collect();
    let mut db: Vec<usize> = (0..b.n()).map(|v| b.degree(v)).collect();
    da.sort_unstable();
    db.sort_unstable();
    if da != db {
        return None;
    }
    let mut perm: Vec<usize> = Vec::with_capacity(a.n());
    let mut used = vec![false; b.n()];
    fn go(a: &Graph, b: &Graph, perm: &mut Vec<usize>, used: &mut [bool]) -> bool {
        let i = perm.len();
        if i == a.n() {
            return true;
        }
        'cand: for c in 0..b.n() {
            if used[c] || a.degree(i) != b.degree(c) || a.has_loop(i) != b.has_loop(c) {
                continue;
            }
            for j in 0..i {
                if a.has_edge(i, j) != b.has_edge(c, perm[j]) {
                    continue 'cand;
                }
            }
            perm.push(c);
            used[c] = true;
            if go(a, b, perm, used) {
                return true;
            }
            perm.pop();
            used[c] = false;
        }
        false
    }
    if go(a, b, &mut perm, &mut used) {
        Some(perm)
    } else {
        None
    }
}

pub fn is_isomorphic(a: &Graph, b: &Graph) -> bool {
    graph_isomorphism(a, b).is_some()
}

// Named small graphs used throughout as targets and test fixtures.

/// Path on `t` vertices `0 - 1 - ... - t-1`.
pub fn path_graph(t: usize) -> Graph {
    Graph::from_edges(t, (1..t).map(|v| (v - 1, v)))
}

/// Cycle `0 - 1 - ... - k-1 - 0`; requires `k >= 3`.
pub fn cycle_graph(k: usize) -> Graph {
    assert!(k >= 3);
    Graph::from_edges(k, (0..k).map(|v| (v, (v + 1) % k)))
}

pub fn complete_graph(k: usize) -> Graph {
    Graph::from_edges(k, (0..k).flat_map(|u| (u + 1..k).map(move |v| (u, v))))
}

/// Star `K_{1,k}` with center 0 and leaves `1..=k`.
pub fn star_graph(k: usize) -> Graph {
    Graph::from_edges(k + 1, (1..=k).map(|v| (0, v)))
}

/// One vertex with a loop.
pub fn k1_loop() -> Graph {
    Graph::from_edges(1, [(0, 0)])
}

/// Edge with a loop at vertex 0.
pub fn k2_loop() -> Graph {
    Graph::from_edges(2, [(0, 1), (0, 0)])
}

/// Edge with loops at both endpoints.
pub fn k2_loops() -> Graph {
    Graph::from_edges(2, [(0, 1), (0, 0), (1, 1)])
}

/// Triangle with a pendant vertex 3 attached to vertex 0.
pub fn paw_graph() -> Graph {
    Graph::from_edges(4, [(0, 1), (0, 2), (1, 2), (0, 3)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::PatternGraph;

    #[test]
    fn loops_are_self_neighbors() {
        let g = k2_loop();
        assert!(g.neighbor_set(0).contains(&0));
        assert!(!g.neighbor_set(1).contains(&1));
        assert_eq!(g.degree(0), 2);
        assert_eq!(g.degree(1), 1);
        assert_eq!(g.m(), 2);
    }

    #[test]
    fn product_of_two_edges() {
        // K2 x K2 = two disjoint edges (0,0)(1,1) and (0,1)(1,0).
        let k2 = path_graph(2);
        let p = direct_product(&k2, &k2);
        assert_eq!(p.graph.n(), 4);
        assert_eq!(p.graph.m(), 2);
        assert!(p.graph.has_edge(p.encode(0, 0), p.encode(1, 1)));
        assert!(p.graph.has_edge(p.encode(0, 1), p.encode(1, 0)));
    }

    #[test]
    fn product_with_edgeless_factor() {
        let g = cycle_graph(5);
        let k1 = Graph::new(1);
        let p = direct_product(&g, &k1);
        assert_eq!(p.graph.n(), 5);
        assert_eq!(p.graph.m(), 0);
    }

    #[test]
    fn product_matches_definition_bruteforce() {
        // P3 x P3 checked against pairwise enumeration of the definition.
        let p3 = path_graph(3);
        let p = direct_product(&p3, &p3);
        assert_eq!(p.graph.n(), 9);
        let mut expected = 0usize;
        for u1 in 0..3 {
            for v1 in 0..3 {
                for u2 in 0..3 {
                    for v2 in 0..3 {
                        let a = p.encode(u1, v1);
                        let b = p.encode(u2, v2);
                        let should = p3.has_edge(u1, u2) && p3.has_edge(v1, v2);
                        assert_eq!(p.graph.has_edge(a, b), should);
                        if should && a <= b {
                            expected += 1;
                        }
                    }
                }
            }
        }
        assert_eq!(p.graph.m(), expected);
    }

    #[test]
    fn associated_bipartite_of_k3_is_c6() {
        let s = associated_bipartite(&complete_graph(3));
        assert!(is_isomorphic(&s.graph, &cycle_graph(6)));
        assert!(s.graph.is_bipartite());
    }

    #[test]
    fn associated_bipartite_of_k2_loops_is_c4() {
        let s = associated_bipartite(&k2_loops());
        assert!(is_isomorphic(&s.graph, &cycle_graph(4)));
    }

    #[test]
    fn associated_bipartite_of_k2_loop_is_p4() {
        let s = associated_bipartite(&k2_loop());
        assert!(is_isomorphic(&s.graph, &path_graph(4)));
    }

    #[test]
    fn associated_bipartite_of_bipartite_is_two_copies() {
        let h = path_graph(3);
        let s = associated_bipartite(&h);
        let comps = s.graph.connected_components();
        assert_eq!(comps.len(), 2);
        for comp in comps {
            assert!(is_isomorphic(&s.graph.induced(&comp), &h));
        }
    }

    #[test]
    fn bipartition_of_even_cycle() {
        let bp = cycle_graph(4).bipartition().unwrap();
        assert_eq!(bp.class_a, BTreeSet::from([0, 2]));
        assert_eq!(bp.class_b, BTreeSet::from([1, 3]));
    }

    #[test]
    fn bipartition_rejects_odd_cycle_and_loops() {
        assert!(cycle_graph(5).bipartition().is_none());
        assert!(k2_loop().bipartition().is_none());
        assert!(k1_loop().bipartition().is_none());
    }

    #[test]
    fn bipartition_component_class_choice_is_deterministic() {
        // Two components; least vertex of each lands in class_a.
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]);
        let bp = g.bipartition().unwrap();
        assert!(bp.in_a(0) && bp.in_a(2));
    }

    #[test]
    fn girth_examples() {
        assert_eq!(cycle_graph(6).girth(), Some(6));
        assert_eq!(path_graph(5).girth(), None);
        assert_eq!(k1_loop().girth(), Some(1));
        assert_eq!(complete_graph(4).girth(), Some(3));
        assert_eq!(paw_graph().girth(), Some(3));
    }

    #[test]
    fn find_induced_path_in_path() {
        let g = path_graph(5);
        let f = PatternGraph::path(3).to_graph();
        let phi = find_induced_graph(&g, &f).unwrap();
        assert_eq!(phi, vec![0, 1, 2]);
    }

    #[test]
    fn c4_has_no_induced_p4() {
        let g = cycle_graph(4);
        let f = PatternGraph::path(4).to_graph();
        assert!(find_induced_graph(&g, &f).is_none());
    }

    #[test]
    fn find_induced_agrees_with_subset_enumeration() {
        // Random-ish 10-vertex graph vs. brute-force over all 4-subsets.
        let g = Graph::from_edges(
            10,
            [
                (0, 1),
                (0, 4),
                (1, 2),
                (1, 5),
                (2, 3),
                (3, 7),
                (4, 5),
                (5, 6),
                (6, 7),
                (7, 8),
                (8, 9),
                (2, 9),
            ],
        );
        for f in [
            PatternGraph::subdivided_claw(1, 1, 1).to_graph(),
            PatternGraph::path(4).to_graph(),
            PatternGraph::subdivided_claw(1, 1, 2).to_graph(),
        ] {
            let found = find_induced_graph(&g, &f).is_some();
            let k = f.n();
            let mut brute = false;
            for mask in 0u32..1 << 10 {
                if mask.count_ones() as usize != k {
                    continue;
                }
                let subset: Vec<usize> = (0..10).filter(|v| mask >> v & 1 == 1).collect();
                if find_induced_graph(&g.induced(&subset), &f).is_some() {
                    brute = true;
                    break;
                }
            }
            assert_eq!(found, brute);
        }
    }

    #[test]
    fn isomorphism_detects_relabelled_cycles() {
        let a = Graph::from_edges(4, [(0, 2), (2, 1), (1, 3), (3, 0)]);
        assert!(is_isomorphic(&a, &cycle_graph(4)));
        assert!(!is_isomorphic(&a, &path_graph(4)));
    }

    #[test]
    fn induced_subgraph_keeps_loops() {
        let g = Graph::from_edges(3, [(0, 0), (0, 1), (1, 2)]);
        let sub = g.induced(&[0, 1]);
        assert!(sub.has_loop(0));
        assert!(sub.has_edge(0, 1));
        assert_eq!(sub.m(), 2);
    }
}
