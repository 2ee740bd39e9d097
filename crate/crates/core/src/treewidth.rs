//! Heuristic tree decompositions and the dynamic program over them for the
//! auxiliary list/demand problem: states pair a coloring of the bag's X
//! vertices with the colors each bag Y vertex has seen below.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::graph::Graph;
use crate::instance::{AuxInstance, BOTH_ENDS};

/// Bags plus tree structure. Width is the maximum bag size minus one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub bags: Vec<BTreeSet<usize>>,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TdError {
    #[error("vertex {0} is in no bag")]
    VertexUncovered(usize),
    #[error("edge ({0}, {1}) is inside no bag")]
    EdgeUncovered(usize, usize),
    #[error("bags containing vertex {0} do not form a connected subtree")]
    Disconnected(usize),
    #[error("tree structure is not a tree")]
    NotATree,
}

impl TreeDecomposition {
    pub fn width(&self) -> usize {
        self.bags.iter().map(|b| b.len()).max().unwrap_or(0).saturating_sub(1)
    }

    /// Checks the three decomposition conditions against `g`.
    pub fn validate(&self, g: &Graph) -> Result<(), TdError> {
        let nb = self.bags.len();
        // tree: connected with nb - 1 edges
        if nb > 0 {
            if self.edges.len() != nb - 1 {
                return Err(TdError::NotATree);
            }
            let mut adj = vec![vec![]; nb];
            for &(a, b) in &self.edges {
                if a >= nb || b >= nb {
                    return Err(TdError::NotATree);
                }
                adj[a].push(b);
                adj[b].push(a);
            }
            let mut seen = vec![false; nb];
            let mut stack = vec![0usize];
            seen[0] = true;
            while let Some(x) = stack.pop() {
                for &y in &adj[x] {
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
            if seen.iter().any(|&s| !s) {
                return Err(TdError::NotATree);
            }
            // (T3) connectivity of each vertex's bag set
            for v in 0..g.n() {
                let holders: Vec<usize> =
                    (0..nb).filter(|&i| self.bags[i].contains(&v)).collect();
                if holders.is_empty() {
                    continue; // caught by T1 below
                }
                let inset: BTreeSet<usize> = holders.iter().copied().collect();
                let mut seen = vec![false; nb];
                let mut stack = vec![holders[0]];
                seen[holders[0]] = true;
                let mut count = 1;
                while let Some(x) = stack.pop() {
                    for &y in &adj[x] {
                        if !seen[y] && inset.contains(&y) {
                            seen[y] = true;
                            count += 1;
                            stack.push(y);
                        }
                    }
                }
                if count != holders.len() {
                    return Err(TdError::Disconnected(v));
                }
            }
        }
        // (T1)
        for v in 0..g.n() {
            if !self.bags.iter().any(|b| b.contains(&v)) {
                return Err(TdError::VertexUncovered(v));
            }
        }
        // (T2)
        for (u, v) in g.edges() {
            if !self.bags.iter().any(|b| b.contains(&u) && b.contains(&v)) {
                return Err(TdError::EdgeUncovered(u, v));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Heuristic {
    MinFill,
    MinDegree,
}

/// Min-fill elimination with min-degree tie-break (then least index).
pub fn decompose(g: &Graph) -> TreeDecomposition {
    decompose_with(g, Heuristic::MinFill)
}

pub fn decompose_with(g: &Graph, heuristic: Heuristic) -> TreeDecomposition {
    let n = g.n();
    if n == 0 {
        return TreeDecomposition {
            bags: vec![],
            edges: vec![],
        };
    }
    // Working adjacency without loops.
    let mut adj: Vec<BTreeSet<usize>> = (0..n)
        .map(|v| g.neighbors(v).filter(|&u| u != v).collect())
        .collect();
    let fill = |adj: &Vec<BTreeSet<usize>>, v: usize| -> usize {
        let ns: Vec<usize> = adj[v].iter().copied().collect();
        let mut missing = 0;
        for i in 0..ns.len() {
            for j in i + 1..ns.len() {
                if !adj[ns[i]].contains(&ns[j]) {
                    missing += 1;
                }
            }
        }
        missing
    };
    let mut alive: Vec<bool> = vec![true; n];
    let mut order = Vec::with_capacity(n);
    let mut bags: Vec<BTreeSet<usize>> = Vec::with_capacity(n);
    let mut elim_pos = vec![usize::MAX; n];
    for step in 0..n {
        let mut best: Option<(usize, usize, usize)> = None;
        for v in 0..n {
            if !alive[v] {
                continue;
            }
            let key = match heuristic {
                Heuristic::MinFill => (fill(&adj, v), adj[v].len(), v),
                Heuristic::MinDegree => (adj[v].len(), 0, v),
            };
            if best.map_or(true, |b| key < b) {
                best = Some(key);
            }
        }
        let v = best.unwrap().2;
        let mut bag: BTreeSet<usize> = adj[v].iter().copied().collect();
        bag.insert(v);
        bags.push(bag);
        order.push(v);
        elim_pos[v] = step;
        let ns: Vec<usize> = adj[v].iter().copied().collect();
        for i in 0..ns.len() {
            for j in i + 1..ns.len() {
                adj[ns[i]].insert(ns[j]);
                adj[ns[j]].insert(ns[i]);
            }
        }
        for &u in &ns {
            adj[u].remove(&v);
        }
        adj[v].clear();
        alive[v] = false;
    }
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for i in 0..n {
        let rest: Option<usize> = bags[i]
            .iter()
            .filter(|&&u| u != order[i])
            .map(|&u| elim_pos[u])
            .min();
        match rest {
            Some(parent) => edges.push((i, parent)),
            None => {
                if i + 1 < n {
                    edges.push((i, i + 1));
                }
            }
        }
    }
    TreeDecomposition { bags, edges }
}

/// Adds a vertex set to every bag; this is how the high-degree set rejoins
/// the decomposition before the dynamic program runs.
pub fn augment_bags(td: &TreeDecomposition, extra: &BTreeSet<usize>) -> TreeDecomposition {
    if td.bags.is_empty() {
        if extra.is_empty() {
            return td.clone();
        }
        return TreeDecomposition {
            bags: vec![extra.clone()],
            edges: vec![],
        };
    }
    TreeDecomposition {
        bags: td.bags.iter().map(|b| b.union(extra).copied().collect()).collect(),
        edges: td.edges.clone(),
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct DpStats {
    /// Largest per-node state count before pruning.
    pub max_states_raw: usize,
    /// Largest per-node state count after dedup and dominance pruning.
    pub max_states_pruned: usize,
    pub nodes: usize,
    pub width: usize,
}

/// Decides the auxiliary problem on a valid decomposition of the instance
/// graph: is there a coloring of X by the path ends, within the lists, such
/// that every Y vertex sees all of its demand set among its neighbors?
/// Returns the coloring as `(vertex, path value)` pairs on success.
pub fn dp_solve(aux: &AuxInstance, td: &TreeDecomposition) -> Option<Vec<(usize, usize)>> {
    dp_solve_with_stats(aux, td).0
}

enum Kind {
    Leaf,
    Introduce { child: usize, v: usize },
    Forget { child: usize, v: usize },
    Join { left: usize, right: usize },
}

struct Node {
    kind: Kind,
    xs: Vec<usize>,
    ys: Vec<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct State {
    x: u64,
    y: u64,
}

#[derive(Clone, Copy)]
enum Prev {
    Start,
    One { state: u32 },
    AssignX { state: u32, vertex: u32, high: bool },
    Two { left: u32, right: u32 },
}

pub fn dp_solve_with_stats(
    aux: &AuxInstance,
    td: &TreeDecomposition,
) -> (Option<Vec<(usize, usize)>>, DpStats) {
    let mut stats = DpStats {
        width: td.width(),
        ..DpStats::default()
    };
    if aux.n() == 0 {
        return (Some(vec![]), stats);
    }
    debug_assert!(td.validate(aux.graph()).is_ok());
    let (nodes, root) = build_nice(aux, td);
    stats.nodes = nodes.len();
    let mut states: Vec<Vec<State>> = Vec::with_capacity(nodes.len());
    let mut prevs: Vec<Vec<Prev>> = Vec::with_capacity(nodes.len());
    for node in &nodes {
        assert!(node.xs.len() <= 64 && node.ys.len() <= 32, "bag too large for DP encoding");
        let (mut st, mut pv): (Vec<State>, Vec<Prev>) = (vec![], vec![]);
        match node.kind {
            Kind::Leaf => {
                st.push(State { x: 0, y: 0 });
                pv.push(Prev::Start);
            }
            Kind::Introduce { child, v } => {
                let cnode = &nodes[child];
                let xmap = position_map(&cnode.xs, &node.xs);
                let ymap = position_map(&cnode.ys, &node.ys);
                if aux.is_x(v) {
                    let vx = node.xs.binary_search(&v).unwrap();
                    // seen-updates for bag Y neighbors of v
                    let ynbr: Vec<usize> = node
                        .ys
                        .iter()
                        .enumerate()
                        .filter(|(_, y)| aux.graph().has_edge(v, **y))
                        .map(|(j, _)| j)
                        .collect();
                    for (si, cs) in states[child].iter().enumerate() {
                        let base_x = remap_bits(cs.x, &xmap);
                        let base_y = remap_fields(cs.y, &ymap);
                        for (bit, high) in [(crate::instance::END_LO, false), (crate::instance::END_HI, true)]
                        {
                            if aux.cons(v) & bit == 0 {
                                continue;
                            }
                            let mut x = base_x;
                            if high {
                                x |= 1 << vx;
                            }
                            let mut y = base_y;
                            for &j in &ynbr {
                                y |= (bit as u64) << (2 * j);
                            }
                            st.push(State { x, y });
                            pv.push(Prev::AssignX {
                                state: si as u32,
                                vertex: v as u32,
                                high,
                            });
                        }
                    }
                } else {
                    let vy = node.ys.binary_search(&v).unwrap();
                    let xnbr: Vec<usize> = node
                        .xs
                        .iter()
                        .enumerate()
                        .filter(|(_, x)| aux.graph().has_edge(v, **x))
                        .map(|(j, _)| j)
                        .collect();
                    for (si, cs) in states[child].iter().enumerate() {
                        let x = remap_bits(cs.x, &xmap);
                        let mut y = remap_fields(cs.y, &ymap);
                        let mut seen = 0u64;
                        for &j in &xnbr {
                            let high = x >> j & 1 == 1;
                            seen |= if high {
                                crate::instance::END_HI as u64
                            } else {
                                crate::instance::END_LO as u64
                            };
                        }
                        y |= seen << (2 * vy);
                        st.push(State { x, y });
                        pv.push(Prev::One { state: si as u32 });
                    }
                }
            }
            Kind::Forget { child, v } => {
                let cnode = &nodes[child];
                let xmap = position_map(&cnode.xs, &node.xs);
                let ymap = position_map(&cnode.ys, &node.ys);
                if aux.is_x(v) {
                    for (si, cs) in states[child].iter().enumerate() {
                        st.push(State {
                            x: remap_bits(cs.x, &xmap),
                            y: remap_fields(cs.y, &ymap),
                        });
                        pv.push(Prev::One { state: si as u32 });
                    }
                } else {
                    let vy = cnode.ys.binary_search(&v).unwrap();
                    let need = aux.cons(v) as u64;
                    for (si, cs) in states[child].iter().enumerate() {
                        let seen = cs.y >> (2 * vy) & (BOTH_ENDS as u64);
                        if seen & need != need {
                            continue;
                        }
                        st.push(State {
                            x: remap_bits(cs.x, &xmap),
                            y: remap_fields(cs.y, &ymap),
                        });
                        pv.push(Prev::One { state: si as u32 });
                    }
                }
            }
            Kind::Join { left, right } => {
                // Group right states by x-coloring for the merge.
                let mut by_x: Vec<(u64, u32)> = states[right]
                    .iter()
                    .enumerate()
                    .map(|(i, s)| (s.x, i as u32))
                    .collect();
                by_x.sort_unstable();
                for (li, ls) in states[left].iter().enumerate() {
                    let start = by_x.partition_point(|&(x, _)| x < ls.x);
                    for &(x, ri) in &by_x[start..] {
                        if x != ls.x {
                            break;
                        }
                        st.push(State {
                            x: ls.x,
                            y: ls.y | states[right][ri as usize].y,
                        });
                        pv.push(Prev::Two {
                            left: li as u32,
                            right: ri,
                        });
                    }
                }
            }
        }
        stats.max_states_raw = stats.max_states_raw.max(st.len());
        let (st, pv) = prune(st, pv);
        stats.max_states_pruned = stats.max_states_pruned.max(st.len());
        states.push(st);
        prevs.push(pv);
    }
    if states[root].is_empty() {
        return (None, stats);
    }
    // Traceback: collect X assignments along introduce nodes.
    let mut assignment: Vec<(usize, usize)> = Vec::new();
    let mut stack = vec![(root, 0usize)];
    while let Some((node, si)) = stack.pop() {
        match prevs[node][si] {
            Prev::Start => {}
            Prev::One { state } => {
                let child = match nodes[node].kind {
                    Kind::Introduce { child, .. } | Kind::Forget { child, .. } => child,
                    _ => unreachable!(),
                };
                stack.push((child, state as usize));
            }
            Prev::AssignX {
                state,
                vertex,
                high,
            } => {
                let child = match nodes[node].kind {
                    Kind::Introduce { child, .. } => child,
                    _ => unreachable!(),
                };
                assignment.push((vertex as usize, if high { 2 } else { 0 }));
                stack.push((child, state as usize));
            }
            Prev::Two { left, right } => {
                let (l, r) = match nodes[node].kind {
                    Kind::Join { left, right } => (left, right),
                    _ => unreachable!(),
                };
                stack.push((l, left as usize));
                stack.push((r, right as usize));
            }
        }
    }
    assignment.sort_unstable();
    assignment.dedup();
    (Some(assignment), stats)
}

/// Dedup identical states and drop dominated ones: same x-coloring with a
/// pointwise-smaller seen vector can never do better.
fn prune(st: Vec<State>, pv: Vec<Prev>) -> (Vec<State>, Vec<Prev>) {
    if st.is_empty() {
        return (st, pv);
    }
    let mut idx: Vec<usize> = (0..st.len()).collect();
    idx.sort_by_key(|&i| (st[i].x, st[i].y, i));
    let mut kept: Vec<usize> = Vec::with_capacity(idx.len());
    for &i in &idx {
        if let Some(&last) = kept.last() {
            if st[last] == st[i] {
                continue;
            }
        }
        kept.push(i);
    }
    // Dominance within each x group. Since the 2-bit fields are independent
    // bits, pointwise superset is bitwise superset.
    let mut keep_flag = vec![true; kept.len()];
    let mut gstart = 0;
    while gstart < kept.len() {
        let mut gend = gstart;
        while gend < kept.len() && st[kept[gend]].x == st[kept[gstart]].x {
            gend += 1;
        }
        for a in gstart..gend {
            if !keep_flag[a] {
                continue;
            }
            for b in gstart..gend {
                if a == b || !keep_flag[b] {
                    continue;
                }
                let (ya, yb) = (st[kept[a]].y, st[kept[b]].y);
                if ya | yb == ya && ya != yb {
                    keep_flag[b] = false;
                }
            }
        }
        gstart = gend;
    }
    let mut out_s = Vec::new();
    let mut out_p = Vec::new();
    for (k, &i) in kept.iter().enumerate() {
        if keep_flag[k] {
            out_s.push(st[i]);
            out_p.push(pv[i]);
        }
    }
    (out_s, out_p)
}

fn position_map(child: &[usize], parent: &[usize]) -> Vec<Option<usize>> {
    child
        .iter()
        .map(|v| parent.binary_search(v).ok())
        .collect()
}

fn remap_bits(x: u64, map: &[Option<usize>]) -> u64 {
    let mut out = 0u64;
    for (i, m) in map.iter().enumerate() {
        if let Some(j) = m {
            out |= (x >> i & 1) << j;
        }
    }
    out
}

fn remap_fields(y: u64, map: &[Option<usize>]) -> u64 {
    let mut out = 0u64;
    for (i, m) in map.iter().enumerate() {
        if let Some(j) = m {
            out |= (y >> (2 * i) & 0b11) << (2 * j);
        }
    }
    out
}

/// Builds a nice decomposition (leaf / introduce / forget / join) rooted so
/// the final node has an empty bag. Children always precede parents in the
/// returned vector.
fn build_nice(aux: &AuxInstance, td: &TreeDecomposition) -> (Vec<Node>, usize) {
    let nb = td.bags.len();
    let mut nodes: Vec<Node> = Vec::new();
    let mut mk = |kind: Kind, bag: &BTreeSet<usize>, nodes: &mut Vec<Node>| -> usize {
        let xs: Vec<usize> = bag.iter().copied().filter(|&v| aux.is_x(v)).collect();
        let ys: Vec<usize> = bag.iter().copied().filter(|&v| !aux.is_x(v)).collect();
        nodes.push(Node { kind, xs, ys });
        nodes.len() - 1
    };
    // Chain from an existing node with bag `from` to bag `to`.
    let morph = |mut node: usize,
                 from: &BTreeSet<usize>,
                 to: &BTreeSet<usize>,
                 nodes: &mut Vec<Node>,
                 mk: &mut dyn FnMut(Kind, &BTreeSet<usize>, &mut Vec<Node>) -> usize|
     -> usize {
        let mut cur = from.clone();
        for &v in from.difference(to) {
            cur.remove(&v);
            node = mk(Kind::Forget { child: node, v }, &cur, nodes);
        }
        for &v in to.difference(from) {
            cur.insert(v);
            node = mk(Kind::Introduce { child: node, v }, &cur, nodes);
        }
        node
    };
    let intro_chain = |bag: &BTreeSet<usize>,
                       nodes: &mut Vec<Node>,
                       mk: &mut dyn FnMut(Kind, &BTreeSet<usize>, &mut Vec<Node>) -> usize|
     -> usize {
        let empty = BTreeSet::new();
        let mut node = mk(Kind::Leaf, &empty, nodes);
        let mut cur = BTreeSet::new();
        for &v in bag {
            cur.insert(v);
            node = mk(Kind::Introduce { child: node, v }, &cur, nodes);
        }
        node
    };

    if nb == 0 {
        let empty = BTreeSet::new();
        let root = mk(Kind::Leaf, &empty, &mut nodes);
        return (nodes, root);
    }
    let mut adj = vec![vec![]; nb];
    for &(a, b) in &td.edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    for a in adj.iter_mut() {
        a.sort_unstable();
    }
    // Iterative post-order over the raw tree rooted at bag 0.
    let mut parent = vec![usize::MAX; nb];
    let mut post = Vec::with_capacity(nb);
    let mut stack = vec![(0usize, false)];
    let mut visited = vec![false; nb];
    while let Some((b, processed)) = stack.pop() {
        if processed {
            post.push(b);
            continue;
        }
        visited[b] = true;
        stack.push((b, true));
        for &c in &adj[b] {
            if !visited[c] {
                parent[c] = b;
                stack.push((c, false));
            }
        }
    }
    let mut done: Vec<Option<usize>> = vec![None; nb];
    for &b in &post {
        let child_nodes: Vec<(usize, usize)> = adj[b]
            .iter()
            .filter(|&&c| parent[c] == b)
            .map(|&c| (c, done[c].unwrap()))
            .collect();
        let node = if child_nodes.is_empty() {
            intro_chain(&td.bags[b], &mut nodes, &mut mk)
        } else {
            let mut acc: Option<usize> = None;
            for (c, cn) in child_nodes {
                let lifted = morph(cn, &td.bags[c], &td.bags[b], &mut nodes, &mut mk);
                acc = Some(match acc {
                    None => lifted,
                    Some(prev) => mk(
                        Kind::Join {
                            left: prev,
                            right: lifted,
                        },
                        &td.bags[b],
                        &mut nodes,
                    ),
                });
            }
            acc.unwrap()
        };
        done[b] = Some(node);
    }
    // Forget the root bag down to the empty bag.
    let mut node = done[0].unwrap();
    let mut cur = td.bags[0].clone();
    for &v in &td.bags[0].clone() {
        cur.remove(&v);
        node = mk(Kind::Forget { child: node, v }, &cur, &mut nodes);
    }
    (nodes, node)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cycle_graph, path_graph, Graph};
    use crate::instance::{AuxInstance, Side, END_HI, END_LO};

    fn aux_from(
        g: Graph,
        sides: &[Side],
        cons: &[u8],
    ) -> AuxInstance {
        AuxInstance::new(g, sides.to_vec(), cons.to_vec())
    }

    /// Independent oracle: enumerate all X colorings.
    fn enumerate_answer(aux: &AuxInstance) -> bool {
        let xs: Vec<usize> = (0..aux.n()).filter(|&v| aux.is_x(v)).collect();
        let k = xs.len();
        for mask in 0u64..1 << k {
            let color = |v: usize| -> u8 {
                let i = xs.binary_search(&v).unwrap();
                if mask >> i & 1 == 1 {
                    END_HI
                } else {
                    END_LO
                }
            };
            let lists_ok = xs.iter().all(|&x| aux.cons(x) & color(x) != 0);
            if !lists_ok {
                continue;
            }
            let sigma_ok = (0..aux.n()).filter(|&v| !aux.is_x(v)).all(|y| {
                let mut seen = 0u8;
                for u in aux.graph().neighbors(y) {
                    seen |= color(u);
                }
                seen & aux.cons(y) == aux.cons(y)
            });
            if sigma_ok {
                return true;
            }
        }
        false
    }

    #[test]
    fn tree_has_width_one() {
        let g = path_graph(6);
        let td = decompose(&g);
        assert!(td.validate(&g).is_ok());
        assert_eq!(td.width(), 1);
    }

    #[test]
    fn cycle_has_width_two() {
        let g = cycle_graph(6);
        let td = decompose(&g);
        assert!(td.validate(&g).is_ok());
        assert_eq!(td.width(), 2);
    }

    #[test]
    fn random_decompositions_are_valid() {
        let mut state = 0x2545f4914f6cdd1du64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..60 {
            let n = 1 + (next() % 9) as usize;
            let mut g = Graph::new(n);
            for u in 0..n {
                for v in u + 1..n {
                    if next() % 3 == 0 {
                        g.add_edge(u, v);
                    }
                }
            }
            for h in [Heuristic::MinFill, Heuristic::MinDegree] {
                let td = decompose_with(&g, h);
                td.validate(&g).unwrap();
            }
        }
    }

    #[test]
    fn augment_grows_width_by_at_most_extra() {
        let g = path_graph(5);
        let td = decompose(&g);
        let extra: BTreeSet<usize> = [0, 4].into_iter().collect();
        let aug = augment_bags(&td, &extra);
        assert!(aug.width() <= td.width() + 2);
        assert!(aug.validate(&g).is_ok());
        let id = augment_bags(&td, &BTreeSet::new());
        assert_eq!(id, td);
    }

    #[test]
    fn dp_path_with_two_ends() {
        // X - Y - X with sigma(y) = both ends: color the two X differently.
        let g = path_graph(3);
        let aux = aux_from(
            g,
            &[Side::X, Side::Y, Side::X],
            &[END_LO | END_HI, END_LO | END_HI, END_LO | END_HI],
        );
        let td = decompose(aux.graph());
        let sol = dp_solve(&aux, &td).expect("solvable");
        let vals: std::collections::BTreeMap<usize, usize> = sol.into_iter().collect();
        assert_ne!(vals[&0], vals[&2]);
    }

    #[test]
    fn dp_single_edge_cannot_cover_both() {
        let g = path_graph(2);
        let aux = aux_from(
            g,
            &[Side::X, Side::Y],
            &[END_LO | END_HI, END_LO | END_HI],
        );
        let td = decompose(aux.graph());
        assert!(dp_solve(&aux, &td).is_none());
    }

    #[test]
    fn dp_agrees_with_enumeration_on_random_instances() {
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for round in 0..300 {
            let n = 2 + (next() % 9) as usize;
            let sides: Vec<Side> = (0..n)
                .map(|_| if next() % 2 == 0 { Side::X } else { Side::Y })
                .collect();
            let mut g = Graph::new(n);
            for u in 0..n {
                for v in u + 1..n {
                    if sides[u] != sides[v] && next() % 3 != 0 {
                        g.add_edge(u, v);
                    }
                }
            }
            let cons: Vec<u8> = (0..n).map(|_| (next() % 4) as u8).collect();
            let aux = AuxInstance::new(g, sides, cons);
            let heuristic = if round % 2 == 0 {
                Heuristic::MinFill
            } else {
                Heuristic::MinDegree
            };
            let td = decompose_with(aux.graph(), heuristic);
            let aug = augment_bags(&td, &BTreeSet::new());
            let (got, stats) = dp_solve_with_stats(&aux, &aug);
            assert_eq!(got.is_some(), enumerate_answer(&aux), "round {round}");
            assert!(stats.max_states_pruned <= stats.max_states_raw);
            if let Some(sol) = got {
                // Re-evaluate the coverage predicate directly.
                let vals: std::collections::BTreeMap<usize, usize> =
                    sol.into_iter().collect();
                for y in (0..aux.n()).filter(|&v| !aux.is_x(v)) {
                    let mut seen = 0u8;
                    for u in aux.graph().neighbors(y) {
                        seen |= if vals[&u] == 2 { END_HI } else { END_LO };
                    }
                    assert_eq!(seen & aux.cons(y), aux.cons(y));
                }
                for x in (0..aux.n()).filter(|&v| aux.is_x(v)) {
                    let bit = if vals[&x] == 2 { END_HI } else { END_LO };
                    assert_ne!(aux.cons(x) & bit, 0);
                }
            }
        }
    }
}
