//! Instance generators that materialize the hardness reductions as concrete
//! LLSHom instances: the three SAT constructions (targets K_{1,3}, P4, and
//! the doubly looped edge), the NAE-SAT construction for P3 with girth and
//! degree guarantees, the product and BFS-tree gadgets, and the two general
//! target generators built on top of them.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::graph::{
    associated_bipartite, cycle_graph, direct_product, find_induced_graph, is_isomorphic,
    k2_loops, path_graph, star_graph, Graph,
};
use crate::instance::{Instance, ListAssignment};
use crate::verify::{verify_solution, Homomorphism};

/// A signed occurrence of a 0-based variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Lit {
    pub var: usize,
    pub negated: bool,
}

/// 3-CNF formula; repeated variables within a clause are allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<[Lit; 3]>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<[Lit; 3]>) -> Self {
        for clause in &clauses {
            for lit in clause {
                assert!(lit.var < num_vars, "literal references undeclared variable");
            }
        }
        CnfFormula { num_vars, clauses }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[[Lit; 3]] {
        &self.clauses
    }

    /// Exhaustive satisfiability test; fine for the corpus sizes used here.
    pub fn is_satisfiable(&self) -> bool {
        self.assignments_any(|clause, assign| {
            clause
                .iter()
                .any(|lit| assign >> lit.var & 1 == u64::from(!lit.negated))
        })
    }

    /// Exhaustive not-all-equal satisfiability: every clause needs a true
    /// and a false literal.
    pub fn is_nae_satisfiable(&self) -> bool {
        self.assignments_any(|clause, assign| {
            let vals: Vec<bool> = clause
                .iter()
                .map(|lit| (assign >> lit.var & 1 == 1) != lit.negated)
                .collect();
            vals.iter().any(|&b| b) && vals.iter().any(|&b| !b)
        })
    }

    fn assignments_any(&self, clause_ok: impl Fn(&[Lit; 3], u64) -> bool) -> bool {
        assert!(self.num_vars <= 24, "exhaustive check limited to 24 variables");
        (0u64..1 << self.num_vars)
            .any(|assign| self.clauses.iter().all(|c| clause_ok(c, assign)))
    }

    /// Positive and negative occurrence counts per variable.
    pub fn polarity_counts(&self) -> Vec<(usize, usize)> {
        let mut counts = vec![(0usize, 0usize); self.num_vars];
        for clause in &self.clauses {
            for lit in clause {
                if lit.negated {
                    counts[lit.var].1 += 1;
                } else {
                    counts[lit.var].0 += 1;
                }
            }
        }
        counts
    }

    /// Pads every variable that lacks a polarity (or any occurrence) with
    /// the always-satisfied clause (x or not-x or x). Preserves both
    /// satisfiability and NAE-satisfiability.
    pub fn ensure_both_polarities(&self) -> CnfFormula {
        let counts = self.polarity_counts();
        let mut clauses = self.clauses.clone();
        for (var, &(pos, neg)) in counts.iter().enumerate() {
            if pos == 0 || neg == 0 {
                clauses.push([
                    Lit { var, negated: false },
                    Lit { var, negated: true },
                    Lit { var, negated: false },
                ]);
            }
        }
        CnfFormula {
            num_vars: self.num_vars,
            clauses,
        }
    }
}

/// A generated instance plus stable vertex-role annotations for testing and
/// debugging.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetOutput {
    pub instance: Instance,
    pub annotations: BTreeMap<String, usize>,
}

impl GadgetOutput {
    pub fn annotation(&self, name: &str) -> usize {
        *self
            .annotations
            .get(name)
            .unwrap_or_else(|| panic!("missing annotation `{name}`"))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GadgetError {
    #[error("target graph has an isolated vertex")]
    IsolatedVertex,
    #[error("every vertex of the requested list is trivial; no gadget is needed")]
    TrivialRole,
    #[error("designated vertices do not form a 3-vertex path in the target")]
    BadDesignatedP3,
    #[error("p = {p} is too small: vertex {vertex} has no usable copy in the first p levels")]
    PTooSmall { p: usize, vertex: usize },
    #[error("gadget would need about {vertices} vertices; lower p")]
    TooLarge { vertices: usize },
    #[error("target contains none of the base graphs (loops-on-an-edge, P4, K_{{1,3}}) as an induced subgraph; retry on its associated bipartite graph")]
    NoQualifyingBase,
    #[error("target is outside the scope of this generator: {0}")]
    UnsupportedTarget(String),
}

/// Cap on materialized gadget sizes; the BFS-tree gadgets grow exponentially
/// in `p`, so callers asking for large `p` get a clean error instead of an
/// allocation death spiral.
pub const GADGET_VERTEX_CAP: usize = 2_000_000;

struct Builder {
    lists: Vec<BTreeSet<usize>>,
    edges: Vec<(usize, usize)>,
    annotations: BTreeMap<String, usize>,
}

impl Builder {
    fn new() -> Self {
        Builder {
            lists: Vec::new(),
            edges: Vec::new(),
            annotations: BTreeMap::new(),
        }
    }

    fn vertex<I: IntoIterator<Item = usize>>(&mut self, list: I) -> usize {
        self.lists.push(list.into_iter().collect());
        self.lists.len() - 1
    }

    fn edge(&mut self, u: usize, v: usize) {
        self.edges.push((u.min(v), u.max(v)));
    }

    fn name(&mut self, name: String, v: usize) {
        self.annotations.insert(name, v);
    }

    fn build(self, target: Graph) -> GadgetOutput {
        let n = self.lists.len();
        let source = Graph::from_edges(n, self.edges);
        let instance = Instance {
            target,
            source,
            lists: ListAssignment::from_vec(self.lists),
        };
        GadgetOutput {
            instance,
            annotations: self.annotations,
        }
    }
}

/// SAT hardness construction for the star K_{1,3} (center 0, leaves 1-3):
/// per variable a claw with pinned center, per clause a spider with arms of
/// length three, occurrence wiring through the arm midpoints, and every
/// clause center adjacent to all variable leaves. The output is a
/// yes-instance iff the formula is satisfiable, and is P10-free.
pub fn gen_k13(f: &CnfFormula) -> GadgetOutput {
    let f = f.ensure_both_polarities();
    let target = star_graph(3);
    let mut b = Builder::new();
    let mut var_x = Vec::with_capacity(f.num_vars());
    let mut var_xp = Vec::with_capacity(f.num_vars());
    for z in 0..f.num_vars() {
        let x = b.vertex([1, 2]);
        let xp = b.vertex([1, 2]);
        let v0 = b.vertex([0]);
        let w = b.vertex([3]);
        b.edge(v0, x);
        b.edge(v0, xp);
        b.edge(v0, w);
        b.name(format!("var{z}.x"), x);
        b.name(format!("var{z}.xp"), xp);
        b.name(format!("var{z}.v0"), v0);
        b.name(format!("var{z}.w"), w);
        var_x.push(x);
        var_xp.push(xp);
    }
    let mut centers = Vec::new();
    for (j, clause) in f.clauses().iter().enumerate() {
        let y = b.vertex([0]);
        b.name(format!("cls{j}.y"), y);
        centers.push(y);
        for (i, lit) in clause.iter().enumerate() {
            let s1 = b.vertex([1, 3]);
            let s2 = b.vertex([0]);
            let s3 = b.vertex([2, 3]);
            b.edge(y, s1);
            b.edge(s1, s2);
            b.edge(s2, s3);
            b.name(format!("cls{j}.s1_{i}"), s1);
            b.name(format!("cls{j}.s2_{i}"), s2);
            b.name(format!("cls{j}.s3_{i}"), s3);
            let hook = if lit.negated {
                var_xp[lit.var]
            } else {
                var_x[lit.var]
            };
            b.edge(s2, hook);
        }
    }
    for &y in &centers {
        for z in 0..f.num_vars() {
            b.edge(y, var_x[z]);
            b.edge(y, var_xp[z]);
        }
    }
    b.build(target)
}

/// SAT hardness construction for the path P4 (vertices 0-3, paper 1-4):
/// double-sided brooms as variable gadgets with one pinned-middle leaf per
/// occurrence, spiders with arms of length two as clause gadgets, and every
/// clause center adjacent to all broom leaves. Yes iff satisfiable;
/// P14-free.
pub fn gen_p4(f: &CnfFormula) -> GadgetOutput {
    let f = f.ensure_both_polarities();
    let target = path_graph(4);
    let counts = f.polarity_counts();
    let mut b = Builder::new();
    let mut pos_leaves: Vec<Vec<usize>> = Vec::with_capacity(f.num_vars());
    let mut neg_leaves: Vec<Vec<usize>> = Vec::with_capacity(f.num_vars());
    let mut all_leaves = Vec::new();
    for z in 0..f.num_vars() {
        let handle_lists: [&[usize]; 5] = [&[0, 2], &[1, 3], &[2], &[1, 3], &[0, 2]];
        let r: Vec<usize> = handle_lists
            .iter()
            .map(|l| b.vertex(l.iter().copied()))
            .collect();
        for k in 1..5 {
            b.edge(r[k - 1], r[k]);
        }
        for (k, &v) in r.iter().enumerate() {
            b.name(format!("var{z}.r{}", k + 1), v);
        }
        let mut pos = Vec::new();
        for i in 0..counts[z].0 {
            let leaf = b.vertex([1]);
            b.edge(r[0], leaf);
            b.name(format!("var{z}.X{i}"), leaf);
            pos.push(leaf);
            all_leaves.push(leaf);
        }
        let mut neg = Vec::new();
        for i in 0..counts[z].1 {
            let leaf = b.vertex([1]);
            b.edge(r[4], leaf);
            b.name(format!("var{z}.Xp{i}"), leaf);
            neg.push(leaf);
            all_leaves.push(leaf);
        }
        pos_leaves.push(pos);
        neg_leaves.push(neg);
    }
    let mut next_pos = vec![0usize; f.num_vars()];
    let mut next_neg = vec![0usize; f.num_vars()];
    let mut centers = Vec::new();
    for (j, clause) in f.clauses().iter().enumerate() {
        let y = b.vertex([2]);
        b.name(format!("cls{j}.y"), y);
        centers.push(y);
        for (i, lit) in clause.iter().enumerate() {
            let s1 = b.vertex([1, 3]);
            let s2 = b.vertex([0, 2]);
            b.edge(y, s1);
            b.edge(s1, s2);
            b.name(format!("cls{j}.s1_{i}"), s1);
            b.name(format!("cls{j}.s2_{i}"), s2);
            let leaf = if lit.negated {
                let l = neg_leaves[lit.var][next_neg[lit.var]];
                next_neg[lit.var] += 1;
                l
            } else {
                let l = pos_leaves[lit.var][next_pos[lit.var]];
                next_pos[lit.var] += 1;
                l
            };
            b.edge(s2, leaf);
        }
    }
    for &y in &centers {
        for &leaf in &all_leaves {
            b.edge(y, leaf);
        }
    }
    b.build(target)
}

/// SAT hardness construction for the edge with loops at both endpoints
/// (vertices 0, 1 = paper 1, 2): three-vertex handles, leaves per
/// occurrence, spiders with arms of length three wired through their arm
/// tips, and clause centers adjacent to all leaves. Yes iff satisfiable;
/// P12-free.
pub fn gen_k2loops(f: &CnfFormula) -> GadgetOutput {
    let f = f.ensure_both_polarities();
    let target = k2_loops();
    let counts = f.polarity_counts();
    let mut b = Builder::new();
    let mut pos_leaves: Vec<Vec<usize>> = Vec::with_capacity(f.num_vars());
    let mut neg_leaves: Vec<Vec<usize>> = Vec::with_capacity(f.num_vars());
    let mut all_leaves = Vec::new();
    for z in 0..f.num_vars() {
        let r1 = b.vertex([0, 1]);
        let r2 = b.vertex([0]);
        let r3 = b.vertex([0, 1]);
        b.edge(r1, r2);
        b.edge(r2, r3);
        b.name(format!("var{z}.r1"), r1);
        b.name(format!("var{z}.r2"), r2);
        b.name(format!("var{z}.r3"), r3);
        let mut pos = Vec::new();
        for i in 0..counts[z].0 {
            let leaf = b.vertex([1]);
            b.edge(r1, leaf);
            b.name(format!("var{z}.X{i}"), leaf);
            pos.push(leaf);
            all_leaves.push(leaf);
        }
        let mut neg = Vec::new();
        for i in 0..counts[z].1 {
            let leaf = b.vertex([1]);
            b.edge(r3, leaf);
            b.name(format!("var{z}.Xp{i}"), leaf);
            neg.push(leaf);
            all_leaves.push(leaf);
        }
        pos_leaves.push(pos);
        neg_leaves.push(neg);
    }
    let mut next_pos = vec![0usize; f.num_vars()];
    let mut next_neg = vec![0usize; f.num_vars()];
    let mut centers = Vec::new();
    for (j, clause) in f.clauses().iter().enumerate() {
        let y = b.vertex([1]);
        b.name(format!("cls{j}.y"), y);
        centers.push(y);
        for (i, lit) in clause.iter().enumerate() {
            let s1 = b.vertex([0, 1]);
            let s2 = b.vertex([0]);
            let s3 = b.vertex([0, 1]);
            b.edge(y, s1);
            b.edge(s1, s2);
            b.edge(s2, s3);
            b.name(format!("cls{j}.s1_{i}"), s1);
            b.name(format!("cls{j}.s2_{i}"), s2);
            b.name(format!("cls{j}.s3_{i}"), s3);
            let leaf = if lit.negated {
                let l = neg_leaves[lit.var][next_neg[lit.var]];
                next_neg[lit.var] += 1;
                l
            } else {
                let l = pos_leaves[lit.var][next_pos[lit.var]];
                next_pos[lit.var] += 1;
                l
            };
            b.edge(s3, leaf);
        }
    }
    for &y in &centers {
        for &leaf in &all_leaves {
            b.edge(y, leaf);
        }
    }
    b.build(target)
}

/// NAE-SAT construction for P3: per variable a cycle of length `4pr` with
/// `r` heads spaced `4p` apart, per clause a spider whose arm lengths are
/// `4p` for positive and `4p + 2` for negative literals, arm tips joined to
/// heads. Lists follow the bipartition: the heads' side gets the path ends
/// and the other side the middle. The output is a yes-instance iff the
/// formula is NAE-satisfiable, has maximum degree 3, girth at least `p`,
/// and degree-3 vertices pairwise at distance at least `p`.
pub fn gen_nae_p3(f: &CnfFormula, p: usize) -> Result<GadgetOutput, GadgetError> {
    if p < 1 {
        return Err(GadgetError::UnsupportedTarget("p must be >= 1".into()));
    }
    let f = f.ensure_both_polarities();
    let target = path_graph(3);
    let counts = f.polarity_counts();
    let occurrences: Vec<usize> = counts.iter().map(|&(a, b)| a + b).collect();
    let mut b = Builder::new();
    let mut heads: Vec<Vec<usize>> = Vec::with_capacity(f.num_vars());
    for z in 0..f.num_vars() {
        let r = occurrences[z];
        debug_assert!(r >= 1, "padding guarantees occurrences");
        let len = 4 * p * r;
        let start = b.lists.len();
        let mut cycle = Vec::with_capacity(len);
        for _ in 0..len {
            cycle.push(b.vertex([]));
        }
        for i in 0..len {
            b.edge(start + i, start + (i + 1) % len);
        }
        let mut hs = Vec::with_capacity(r);
        for k in 0..r {
            let head = start + k * 4 * p;
            b.name(format!("var{z}.head{k}"), head);
            hs.push(head);
        }
        heads.push(hs);
    }
    let mut next_head = vec![0usize; f.num_vars()];
    for (j, clause) in f.clauses().iter().enumerate() {
        let y = b.vertex([]);
        b.name(format!("cls{j}.y"), y);
        for (i, lit) in clause.iter().enumerate() {
            let len = if lit.negated { 4 * p + 2 } else { 4 * p };
            let mut arm = Vec::with_capacity(len);
            for _ in 0..len {
                arm.push(b.vertex([]));
            }
            for t in 1..len {
                b.edge(arm[t - 1], arm[t]);
            }
            b.edge(arm[len - 1], y);
            b.name(format!("cls{j}.arm{i}.tip"), arm[0]);
            b.name(format!("cls{j}.arm{i}.last"), arm[len - 1]);
            let head = heads[lit.var][next_head[lit.var]];
            next_head[lit.var] += 1;
            b.edge(arm[0], head);
        }
    }
    // Lists by bipartition: the class holding the heads gets the path ends.
    let n = b.lists.len();
    let graph = Graph::from_edges(n, b.edges.iter().copied());
    let bp = graph.bipartition().expect("construction is bipartite");
    let mut head_sides = BTreeMap::new();
    for (comp_id, comp) in graph.connected_components().into_iter().enumerate() {
        let _ = comp_id;
        let head = comp
            .iter()
            .find(|v| heads.iter().flatten().any(|h| h == *v))
            .copied()
            .expect("every component contains a head");
        for v in comp {
            head_sides.insert(v, bp.in_a(v) == bp.in_a(head));
        }
    }
    for v in 0..n {
        b.lists[v] = if head_sides[&v] {
            BTreeSet::from([0, 2])
        } else {
            BTreeSet::from([1])
        };
    }
    let out = b.build(target);
    let g = &out.instance.source;
    if g.n() > 0 {
        assert_eq!(g.max_degree(), 3);
        assert!(g.girth_at_least(p));
        assert!(degree3_spacing_at_least(g, p));
    }
    Ok(out)
}

/// Pairwise distance between degree-3 vertices is at least `p`.
pub fn degree3_spacing_at_least(g: &Graph, p: usize) -> bool {
    let hubs: Vec<usize> = (0..g.n()).filter(|&v| g.degree(v) == 3).collect();
    for &s in &hubs {
        // Depth-bounded BFS suffices: only distances < p matter.
        let mut dist = vec![usize::MAX; g.n()];
        dist[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            if dist[x] + 1 >= p {
                continue;
            }
            for y in g.neighbors(x) {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    if y != s && g.degree(y) == 3 {
                        return false;
                    }
                    queue.push_back(y);
                }
            }
        }
    }
    true
}

/// Product gadget: `Z = H x H` with full lists except the root
/// `z = (u, v)`, whose list is `{u, v}`. Both coordinate projections are
/// locally surjective list homomorphisms sending the root to `u` and `v`
/// respectively; they are verified during construction.
pub fn cross_gadget(h: &Graph, u: usize, v: usize) -> Result<CrossGadget, GadgetError> {
    if (0..h.n()).any(|w| h.degree(w) == 0) {
        return Err(GadgetError::IsolatedVertex);
    }
    let prod = direct_product(h, h);
    let z = prod.encode(u, v);
    let mut lists = ListAssignment::full(prod.graph.n(), h.n());
    lists.set(z, BTreeSet::from([u, v]));
    let instance = Instance {
        target: h.clone(),
        source: prod.graph,
        lists,
    };
    let proj_u = Homomorphism((0..instance.source.n()).map(|p| prod_first(p, h.n())).collect());
    let proj_v = Homomorphism((0..instance.source.n()).map(|p| p % h.n()).collect());
    assert_eq!(proj_u.get(z), u);
    assert_eq!(proj_v.get(z), v);
    assert!(verify_solution(&instance, &proj_u).is_ok());
    assert!(verify_solution(&instance, &proj_v).is_ok());
    let mut annotations = BTreeMap::new();
    annotations.insert("root".to_string(), z);
    Ok(CrossGadget {
        output: GadgetOutput {
            instance,
            annotations,
        },
        projections: [proj_u, proj_v],
    })
}

fn prod_first(p: usize, hn: usize) -> usize {
    p / hn
}

/// A cross gadget with its two verified projection homomorphisms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossGadget {
    pub output: GadgetOutput,
    pub projections: [Homomorphism; 2],
}

/// Which list the happiness-restoring gadget is built for, relative to a
/// designated 3-vertex path in the target.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FunnyList {
    Middle,
    Ends,
}

/// Three target vertices playing the path roles 1, 2, 3 (2 in the middle).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DesignatedP3 {
    pub one: usize,
    pub two: usize,
    pub three: usize,
}

impl DesignatedP3 {
    fn validate(&self, h: &Graph) -> Result<(), GadgetError> {
        let Self { one, two, three } = *self;
        let distinct = one != two && two != three && one != three;
        if !distinct
            || one >= h.n()
            || two >= h.n()
            || three >= h.n()
            || !h.has_edge(one, two)
            || !h.has_edge(two, three)
        {
            return Err(GadgetError::BadDesignatedP3);
        }
        Ok(())
    }

    /// Whether the middle role has neighbors outside the path roles.
    pub fn middle_trivial(&self, h: &Graph) -> bool {
        h.neighbors(self.two)
            .all(|w| w == self.one || w == self.three)
    }

    /// Whether both end roles see only the middle.
    pub fn ends_trivial(&self, h: &Graph) -> bool {
        h.neighbors(self.one).all(|w| w == self.two)
            && h.neighbors(self.three).all(|w| w == self.two)
    }
}

/// Deterministic designated path: least middle vertex, then least ends.
pub fn designated_p3(h: &Graph) -> Option<DesignatedP3> {
    for two in 0..h.n() {
        let nbrs: Vec<usize> = h.neighbors(two).filter(|&w| w != two).collect();
        for (i, &one) in nbrs.iter().enumerate() {
            for &three in &nbrs[i + 1..] {
                return Some(DesignatedP3 { one, two, three });
            }
        }
        let _ = nbrs;
    }
    None
}

/// A happiness-restoring gadget with its canonical homomorphisms: one map
/// for the middle list, the two coordinate maps for the ends list. Each is
/// paired with the value it gives the root.
#[derive(Clone, Debug)]
pub struct FunnyGadget {
    pub output: GadgetOutput,
    pub homs: Vec<(usize, Homomorphism)>,
}

/// Builds the BFS-tree gadget for one of the two list types. For the middle
/// list the tree unrolls the target from the middle role, skipping the end
/// roles at the first level only; for the ends list it unrolls the product
/// `H x H` from the seed (one, three). Leaves sit at depth `2p` and get back
/// edges into the first `p` levels, chosen as the first copy that closes no
/// cycle shorter than `p`. The root is vertex 0.
///
/// Any `p` for which every needed vertex has a usable copy in the first `p`
/// levels is accepted; `p >= |V(H)|^2` always suffices mathematically but is
/// rarely materializable, so small values are the practical choice.
pub fn funny_gadget(
    h: &Graph,
    list: FunnyList,
    roles: DesignatedP3,
    p: usize,
) -> Result<FunnyGadget, GadgetError> {
    roles.validate(h)?;
    if p < 1 {
        return Err(GadgetError::PTooSmall { p, vertex: 0 });
    }
    match list {
        FunnyList::Middle => {
            if roles.middle_trivial(h) {
                return Err(GadgetError::TrivialRole);
            }
            let first_level: Vec<usize> = h
                .neighbors(roles.two)
                .filter(|&w| w != roles.one && w != roles.three)
                .collect();
            let tree = grow_tree(
                &|v| h.neighbors(v).collect(),
                roles.two,
                &first_level,
                p,
            )?;
            let lists: Vec<BTreeSet<usize>> = tree
                .label
                .iter()
                .enumerate()
                .map(|(vid, &hv)| {
                    if vid == 0 {
                        BTreeSet::from([roles.two])
                    } else {
                        BTreeSet::from([hv])
                    }
                })
                .collect();
            let instance = Instance {
                target: h.clone(),
                source: tree.graph,
                lists: ListAssignment::from_vec(lists),
            };
            let h2 = Homomorphism(tree.label.clone());
            // The canonical map keeps every vertex except the root happy,
            // and the root's neighborhood image is exactly the middle
            // role's neighbors outside the path.
            assert!(crate::verify::is_list_homomorphism(&instance, &h2).is_ok());
            let happy = crate::verify::happy_vertices(&instance, &h2);
            for v in 1..instance.source.n() {
                assert!(happy.contains(&v), "non-root vertex {v} unhappy");
            }
            let image: BTreeSet<usize> =
                instance.source.neighbors(0).map(|w| h2.get(w)).collect();
            let expected: BTreeSet<usize> = first_level.iter().copied().collect();
            assert_eq!(image, expected);
            assert!(instance.source.girth_at_least(p));
            let mut annotations = BTreeMap::new();
            annotations.insert("root".to_string(), 0);
            Ok(FunnyGadget {
                output: GadgetOutput {
                    instance,
                    annotations,
                },
                homs: vec![(roles.two, h2)],
            })
        }
        FunnyList::Ends => {
            if roles.ends_trivial(h) {
                return Err(GadgetError::TrivialRole);
            }
            let hn = h.n();
            let seed = roles.one * hn + roles.three;
            let prod_neighbors = |k: usize| -> Vec<usize> {
                let (a, bv) = (k / hn, k % hn);
                let mut out = Vec::new();
                for x in h.neighbors(a) {
                    for y in h.neighbors(bv) {
                        out.push(x * hn + y);
                    }
                }
                out.sort_unstable();
                out.dedup();
                out
            };
            let first_level = prod_neighbors(seed);
            let tree = grow_tree(&prod_neighbors, seed, &first_level, p)?;
            let lists: Vec<BTreeSet<usize>> = tree
                .label
                .iter()
                .map(|&k| BTreeSet::from([k / hn, k % hn]))
                .collect();
            let instance = Instance {
                target: h.clone(),
                source: tree.graph,
                lists: ListAssignment::from_vec(lists),
            };
            let h1 = Homomorphism(tree.label.iter().map(|&k| k / hn).collect());
            let h3 = Homomorphism(tree.label.iter().map(|&k| k % hn).collect());
            assert_eq!(h1.get(0), roles.one);
            assert_eq!(h3.get(0), roles.three);
            assert!(verify_solution(&instance, &h1).is_ok());
            assert!(verify_solution(&instance, &h3).is_ok());
            assert!(instance.source.girth_at_least(p));
            let mut annotations = BTreeMap::new();
            annotations.insert("root".to_string(), 0);
            Ok(FunnyGadget {
                output: GadgetOutput {
                    instance,
                    annotations,
                },
                homs: vec![(roles.one, h1), (roles.three, h3)],
            })
        }
    }
}

struct GrownTree {
    graph: Graph,
    /// `label[vid]` is the copied base vertex.
    label: Vec<usize>,
}

/// BFS-like unrolling: the root copies `seed`, its children copy
/// `first_level`, every later vertex copies the full neighborhood of its
/// label, stopping when all leaves are at depth `2p`; leaf back edges go to
/// the first copy in levels `1..=p` that keeps the girth at least `p`.
fn grow_tree(
    neighbors: &dyn Fn(usize) -> Vec<usize>,
    seed: usize,
    first_level: &[usize],
    p: usize,
) -> Result<GrownTree, GadgetError> {
    let mut label = vec![seed];
    let mut level_of = vec![0usize];
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut frontier: Vec<usize> = Vec::new();
    for &w in first_level {
        label.push(w);
        level_of.push(1);
        let vid = label.len() - 1;
        edges.push((0, vid));
        frontier.push(vid);
    }
    for depth in 2..=2 * p {
        let mut next = Vec::new();
        for &vid in &frontier {
            for w in neighbors(label[vid]) {
                label.push(w);
                level_of.push(depth);
                let cid = label.len() - 1;
                edges.push((vid, cid));
                next.push(cid);
                if label.len() > GADGET_VERTEX_CAP {
                    return Err(GadgetError::TooLarge {
                        vertices: label.len(),
                    });
                }
            }
        }
        frontier = next;
    }
    // First copy of each base vertex within levels 1..=p, by creation order.
    let mut early_copies: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for vid in 1..label.len() {
        if level_of[vid] <= p {
            early_copies.entry(label[vid]).or_default().push(vid);
        }
    }
    let mut g = Graph::new(label.len());
    for &(a, b) in &edges {
        g.add_edge(a, b);
    }
    // Back edges keep leaves happy. For p <= 3 every choice is safe (no
    // simple graph has a cycle shorter than 3); beyond that, reject copies
    // that would close a short cycle.
    for leaf in frontier {
        for w in neighbors(label[leaf]) {
            let candidates = early_copies
                .get(&w)
                .ok_or(GadgetError::PTooSmall { p, vertex: w })?;
            let mut picked = None;
            for &cand in candidates {
                if g.has_edge(leaf, cand) {
                    continue;
                }
                if p <= 3 || far_enough(&g, leaf, cand, p) {
                    picked = Some(cand);
                    break;
                }
            }
            match picked {
                Some(cand) => {
                    g.add_edge(leaf, cand);
                }
                None => return Err(GadgetError::PTooSmall { p, vertex: w }),
            }
        }
    }
    Ok(GrownTree { graph: g, label })
}

/// True iff `a` and `b` are at distance at least `p - 1` in the current
/// graph, so adding the edge `{a, b}` creates no cycle shorter than `p`.
fn far_enough(g: &Graph, a: usize, b: usize, p: usize) -> bool {
    let mut dist = vec![usize::MAX; g.n()];
    dist[a] = 0;
    let mut queue = std::collections::VecDeque::from([a]);
    while let Some(x) = queue.pop_front() {
        if dist[x] + 1 > p - 2 {
            continue;
        }
        for y in g.neighbors(x) {
            if dist[y] == usize::MAX {
                if y == b {
                    return false;
                }
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    true
}

fn is_h_poly(h: &Graph) -> bool {
    (h.n() == 1 && h.m() == 0)
        || (h.n() == 1 && h.has_loop(0))
        || (h.n() == 2 && h.m() == 1 && h.has_edge(0, 1))
}

/// The base graph found inside a general target, in detection priority
/// order: the doubly looped edge first, then P4, then the claw.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaseKind {
    K2Loops,
    P4,
    K13,
}

fn find_base(h: &Graph) -> Option<(BaseKind, Vec<usize>)> {
    if let Some(phi) = find_induced_graph(h, &k2_loops()) {
        return Some((BaseKind::K2Loops, phi));
    }
    if let Some(phi) = find_induced_graph(h, &path_graph(4)) {
        return Some((BaseKind::P4, phi));
    }
    if let Some(phi) = find_induced_graph(h, &star_graph(3)) {
        return Some((BaseKind::K13, phi));
    }
    None
}

/// General hardness generator for connected targets outside the polynomial
/// set and outside {P3, C4}: builds the base construction for an induced
/// copy of one of the three base graphs, then attaches target copies and
/// product gadgets so every base vertex can be made happy with respect to
/// target vertices outside the base. Yes iff the formula is satisfiable.
///
/// Fails with [`GadgetError::NoQualifyingBase`] when the target only
/// contains a looped edge or a triangle from the hard list; per the theory,
/// the caller should rerun on the associated bipartite graph.
pub fn gen_general_h_pathfree(f: &CnfFormula, h: &Graph) -> Result<GadgetOutput, GadgetError> {
    if !h.is_connected() {
        return Err(GadgetError::UnsupportedTarget(
            "target must be connected".into(),
        ));
    }
    if is_h_poly(h) || is_isomorphic(h, &path_graph(3)) || is_isomorphic(h, &cycle_graph(4)) {
        return Err(GadgetError::UnsupportedTarget(
            "target is polynomial or has its own subexponential solver".into(),
        ));
    }
    let (kind, phi) = find_base(h).ok_or(GadgetError::NoQualifyingBase)?;
    let base = match kind {
        BaseKind::K2Loops => gen_k2loops(f),
        BaseKind::P4 => gen_p4(f),
        BaseKind::K13 => gen_k13(f),
    };
    // Re-express the base construction's lists in the host target.
    let base_vertices: BTreeSet<usize> = phi.iter().copied().collect();
    let mut b = Builder::new();
    let base_n = base.instance.source.n();
    for v in 0..base_n {
        let list: Vec<usize> = base.instance.lists.get(v).iter().map(|&r| phi[r]).collect();
        b.vertex(list);
    }
    for (u, v) in base.instance.source.edges() {
        b.edge(u, v);
    }
    b.annotations = base.annotations.clone();
    let outside: Vec<usize> = (0..h.n()).filter(|v| !base_vertices.contains(v)).collect();
    let attach_copy = |b: &mut Builder, w: usize, contact: usize| {
        let start = b.lists.len();
        for y in 0..h.n() {
            b.vertex([y]);
        }
        for (x, y) in h.edges() {
            if x != y {
                b.edge(start + x, start + y);
            } else {
                b.edge(start + x, start + x);
            }
        }
        b.edge(w, start + contact);
        b.name(format!("attach.w{w}.copy{contact}"), start + contact);
    };
    for w in 0..base_n {
        let list = b.lists[w].clone();
        match list.len() {
            1 => {
                let c_w = *list.iter().next().unwrap();
                for &c in &outside {
                    if h.has_edge(c_w, c) {
                        attach_copy(&mut b, w, c);
                    }
                }
            }
            2 => {
                let mut it = list.iter();
                let a = *it.next().unwrap();
                let bb = *it.next().unwrap();
                // The base constructions guarantee a singleton-list
                // neighbor.
                let q = base
                    .instance
                    .source
                    .neighbors(w)
                    .find(|&u| b.lists[u].len() == 1)
                    .expect("base vertex with a 2-list has a singleton neighbor");
                let c_q = *b.lists[q].iter().next().unwrap();
                let x_ab: Vec<usize> = outside
                    .iter()
                    .copied()
                    .filter(|&c| h.has_edge(a, c) && h.has_edge(bb, c))
                    .collect();
                let x_w: Vec<usize> = outside
                    .iter()
                    .copied()
                    .filter(|&c| {
                        (h.has_edge(a, c) || h.has_edge(bb, c)) && !x_ab.contains(&c)
                    })
                    .collect();
                for &c in &x_ab {
                    attach_copy(&mut b, w, c);
                }
                for &c in &x_w {
                    let start = b.lists.len();
                    let prod = direct_product(h, h);
                    for pvert in 0..prod.graph.n() {
                        if pvert == prod.encode(c, c_q) {
                            b.vertex([c, c_q]);
                        } else {
                            b.vertex(0..h.n());
                        }
                    }
                    for (x, y) in prod.graph.edges() {
                        b.edge(start + x, start + y);
                    }
                    let z = start + prod.encode(c, c_q);
                    b.edge(w, z);
                    b.name(format!("cross.w{w}.c{c}"), z);
                }
            }
            other => unreachable!("base lists have size 1 or 2, found {other}"),
        }
    }
    Ok(b.build(h.clone()))
}

/// General bounded-degree high-girth generator: the NAE construction for a
/// designated path inside the target, with happiness-restoring gadgets
/// appended to every vertex whose roles have outside neighbors. Targets on
/// at most two vertices are routed through their associated bipartite graph
/// and the result is lifted back. Yes iff the formula is NAE-satisfiable;
/// girth at least `p`.
pub fn gen_general_h_girth(
    f: &CnfFormula,
    h: &Graph,
    p: usize,
) -> Result<GadgetOutput, GadgetError> {
    if !h.is_connected() {
        return Err(GadgetError::UnsupportedTarget(
            "target must be connected".into(),
        ));
    }
    if is_h_poly(h) {
        return Err(GadgetError::UnsupportedTarget(
            "target is polynomial-time solvable".into(),
        ));
    }
    if h.n() <= 2 {
        // The star of a looped edge is P4 or C4; build there and lift the
        // lists back down (answer preserved componentwise).
        let star = associated_bipartite(h);
        let starred = gen_general_h_girth(f, &star.graph, p)?;
        let n = starred.instance.source.n();
        let lists = ListAssignment::from_vec(
            (0..n)
                .map(|v| {
                    starred
                        .instance
                        .lists
                        .get(v)
                        .iter()
                        .map(|&s| star.base_of(s).0)
                        .collect()
                })
                .collect(),
        );
        let out = GadgetOutput {
            instance: Instance {
                target: h.clone(),
                source: starred.instance.source,
                lists,
            },
            annotations: starred.annotations,
        };
        assert!(out.instance.source.girth_at_least(p));
        return Ok(out);
    }
    let roles = designated_p3(h).ok_or(GadgetError::BadDesignatedP3)?;
    let base = gen_nae_p3(f, p)?;
    let role_of = [roles.one, roles.two, roles.three];
    let mut b = Builder::new();
    let base_n = base.instance.source.n();
    let mut ends_vertices = Vec::new();
    let mut middle_vertices = Vec::new();
    for v in 0..base_n {
        let list: Vec<usize> = base
            .instance
            .lists
            .get(v)
            .iter()
            .map(|&r| role_of[r])
            .collect();
        if base.instance.lists.get(v).contains(&1) {
            middle_vertices.push(v);
        } else {
            ends_vertices.push(v);
        }
        b.vertex(list);
    }
    for (u, v) in base.instance.source.edges() {
        b.edge(u, v);
    }
    b.annotations = base.annotations.clone();
    let append_gadget = |b: &mut Builder, gadget: &FunnyGadget, at: usize| {
        let src = &gadget.output.instance.source;
        let start = b.lists.len();
        // Root (gadget vertex 0) is identified with `at`; the remaining
        // vertices shift down by one.
        let map = |gv: usize| if gv == 0 { at } else { start + gv - 1 };
        for gv in 1..src.n() {
            b.vertex(gadget.output.instance.lists.get(gv).iter().copied());
        }
        for (x, y) in src.edges() {
            b.edge(map(x), map(y));
        }
    };
    if !roles.middle_trivial(h) {
        let gadget = funny_gadget(h, FunnyList::Middle, roles, p)?;
        if middle_vertices.len() * gadget.output.instance.source.n() > GADGET_VERTEX_CAP {
            return Err(GadgetError::TooLarge {
                vertices: middle_vertices.len() * gadget.output.instance.source.n(),
            });
        }
        for &u in &middle_vertices {
            append_gadget(&mut b, &gadget, u);
        }
    }
    if !roles.ends_trivial(h) {
        let gadget = funny_gadget(h, FunnyList::Ends, roles, p)?;
        if ends_vertices.len() * gadget.output.instance.source.n() > GADGET_VERTEX_CAP {
            return Err(GadgetError::TooLarge {
                vertices: ends_vertices.len() * gadget.output.instance.source.n(),
            });
        }
        for &u in &ends_vertices {
            append_gadget(&mut b, &gadget, u);
        }
    }
    let out = b.build(h.clone());
    assert!(out.instance.source.girth_at_least(p));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, paw_graph};
    use crate::solver::{solve_bruteforce, SolveOutcome};

    fn lit(v: i64) -> Lit {
        Lit {
            var: v.unsigned_abs() as usize - 1,
            negated: v < 0,
        }
    }

    fn formula(clauses: &[[i64; 3]]) -> CnfFormula {
        let nv = clauses
            .iter()
            .flatten()
            .map(|l| l.unsigned_abs() as usize)
            .max()
            .unwrap_or(0);
        CnfFormula::new(
            nv,
            clauses
                .iter()
                .map(|c| [lit(c[0]), lit(c[1]), lit(c[2])])
                .collect(),
        )
    }

    fn brute_yes(out: &GadgetOutput) -> bool {
        match solve_bruteforce(&out.instance, Some(20_000_000)) {
            SolveOutcome::Yes(_) => true,
            SolveOutcome::No => false,
            SolveOutcome::BudgetExceeded => panic!("budget exceeded on test instance"),
        }
    }

    #[test]
    fn polarity_padding() {
        let f = formula(&[[1, 2, 3]]);
        let padded = f.ensure_both_polarities();
        assert_eq!(padded.clauses().len(), 4);
        assert_eq!(f.is_satisfiable(), padded.is_satisfiable());
        assert_eq!(f.is_nae_satisfiable(), padded.is_nae_satisfiable());
        for (pos, neg) in padded.polarity_counts() {
            assert!(pos >= 1 && neg >= 1);
        }
    }

    #[test]
    fn k13_single_clause_is_yes() {
        let out = gen_k13(&formula(&[[1, 2, 3]]));
        assert!(brute_yes(&out));
    }

    #[test]
    fn k13_contradiction_is_no() {
        let out = gen_k13(&formula(&[[1, 1, 1], [-1, -1, -1]]));
        assert!(!brute_yes(&out));
    }

    #[test]
    fn k13_variable_gadget_has_exactly_two_happy_homs() {
        // Isolated variable gadget: leaves x, x' with {1,2}, pinned center
        // and pinned third leaf. Exactly the two swaps keep everyone happy.
        let target = star_graph(3);
        let mut b = Builder::new();
        let x = b.vertex([1, 2]);
        let xp = b.vertex([1, 2]);
        let v0 = b.vertex([0]);
        let w = b.vertex([3]);
        b.edge(v0, x);
        b.edge(v0, xp);
        b.edge(v0, w);
        let inst = b.build(target).instance;
        let mut happy_count = 0;
        let mut seen = Vec::new();
        for a in [1, 2] {
            for bb in [1, 2] {
                let h = Homomorphism(vec![a, bb, 0, 3]);
                if verify_solution(&inst, &h).is_ok() {
                    happy_count += 1;
                    seen.push((a, bb));
                }
            }
        }
        assert_eq!(happy_count, 2);
        assert_eq!(seen, vec![(1, 2), (2, 1)]);
    }

    #[test]
    fn p4_generator_matches_satisfiability() {
        for f in [
            formula(&[[1, 2, 3], [-1, -2, 3]]),
            formula(&[[1, 1, 1], [-1, -1, -1]]),
        ] {
            let out = gen_p4(&f);
            assert_eq!(brute_yes(&out), f.is_satisfiable());
        }
    }

    #[test]
    fn p4_handle_has_exactly_two_happy_assignments() {
        // Handle with one leaf on each side; count maps where the handle
        // vertices are happy (leaves are made happy by clause centers in
        // the full construction, so they are exempt here).
        let target = path_graph(4);
        let mut b = Builder::new();
        let lists: [&[usize]; 5] = [&[0, 2], &[1, 3], &[2], &[1, 3], &[0, 2]];
        let r: Vec<usize> = lists.iter().map(|l| b.vertex(l.iter().copied())).collect();
        for k in 1..5 {
            b.edge(r[k - 1], r[k]);
        }
        let leaf_a = b.vertex([1]);
        b.edge(r[0], leaf_a);
        let leaf_b = b.vertex([1]);
        b.edge(r[4], leaf_b);
        let inst = b.build(target).instance;
        let mut happy = Vec::new();
        for m0 in [0usize, 2] {
            for m1 in [1usize, 3] {
                for m3 in [1usize, 3] {
                    for m4 in [0usize, 2] {
                        let h = Homomorphism(vec![m0, m1, 2, m3, m4, 1, 1]);
                        if crate::verify::is_list_homomorphism(&inst, &h).is_ok() {
                            let happy_set = crate::verify::happy_vertices(&inst, &h);
                            if (0..5).all(|v| happy_set.contains(&v)) {
                                happy.push((m0, m1, 2, m3, m4));
                            }
                        }
                    }
                }
            }
        }
        assert_eq!(
            happy,
            vec![(0, 1, 2, 3, 2), (2, 3, 2, 1, 0)],
            "exactly the two handle assignments (paper 1,2,3,4,3 and 3,4,3,2,1)"
        );
    }

    #[test]
    fn k2loops_generator_matches_satisfiability() {
        for f in [
            formula(&[[1, 2, 3]]),
            formula(&[[1, 1, 1], [-1, -1, -1]]),
        ] {
            let out = gen_k2loops(&f);
            assert_eq!(brute_yes(&out), f.is_satisfiable());
        }
    }

    #[test]
    fn k2loops_handle_has_exactly_two_happy_assignments() {
        let target = k2_loops();
        let mut b = Builder::new();
        let r1 = b.vertex([0, 1]);
        let r2 = b.vertex([0]);
        let r3 = b.vertex([0, 1]);
        b.edge(r1, r2);
        b.edge(r2, r3);
        let leaf_a = b.vertex([1]);
        b.edge(r1, leaf_a);
        let leaf_b = b.vertex([1]);
        b.edge(r3, leaf_b);
        let inst = b.build(target).instance;
        let mut happy = Vec::new();
        for m0 in [0usize, 1] {
            for m2 in [0usize, 1] {
                let h = Homomorphism(vec![m0, 0, m2, 1, 1]);
                if crate::verify::is_list_homomorphism(&inst, &h).is_ok() {
                    let happy_set = crate::verify::happy_vertices(&inst, &h);
                    if (0..3).all(|v| happy_set.contains(&v)) {
                        happy.push((m0, 0, m2));
                    }
                }
            }
        }
        assert_eq!(happy, vec![(0, 0, 1), (1, 0, 0)]);
    }

    #[test]
    fn nae_generator_matches_nae_satisfiability() {
        for f in [
            formula(&[[1, 2, -3]]),
            formula(&[[1, 1, 1]]),
            formula(&[[1, 2, 3], [-1, -2, -3]]),
        ] {
            let out = gen_nae_p3(&f, 1).unwrap();
            assert_eq!(brute_yes(&out), f.is_nae_satisfiable());
        }
    }

    #[test]
    fn nae_structure_at_p8() {
        let out = gen_nae_p3(&formula(&[[1, 2, -3]]), 8).unwrap();
        let g = &out.instance.source;
        assert_eq!(g.max_degree(), 3);
        assert!(g.girth_at_least(8));
        assert!(degree3_spacing_at_least(g, 8));
        // Every edge joins an ends-list vertex to a middle-list vertex.
        for (u, v) in g.edges() {
            let lu = out.instance.lists.get(u);
            let lv = out.instance.lists.get(v);
            assert!(lu != lv);
            assert!(
                *lu == BTreeSet::from([0, 2]) || *lu == BTreeSet::from([1])
            );
        }
    }

    #[test]
    fn cross_gadget_k2() {
        let g = cross_gadget(&path_graph(2), 0, 1).unwrap();
        assert_eq!(g.output.instance.source.n(), 4);
        assert_eq!(g.output.instance.source.m(), 2);
    }

    #[test]
    fn cross_gadget_p3_projections_verify() {
        // Construction-time asserts already verify; this exercises them.
        let g = cross_gadget(&path_graph(3), 0, 2).unwrap();
        assert_eq!(g.projections[0].get(g.output.annotation("root")), 0);
        assert_eq!(g.projections[1].get(g.output.annotation("root")), 2);
    }

    #[test]
    fn cross_gadget_rejects_isolated() {
        let mut h = path_graph(2);
        h = Graph::from_edges(3, h.edges());
        assert_eq!(cross_gadget(&h, 0, 1), Err(GadgetError::IsolatedVertex));
    }

    #[test]
    fn funny_gadget_trivial_middle_rejected() {
        // P3 itself: the middle vertex has no outside neighbors.
        let roles = DesignatedP3 {
            one: 0,
            two: 1,
            three: 2,
        };
        assert!(matches!(
            funny_gadget(&path_graph(3), FunnyList::Middle, roles, 3),
            Err(GadgetError::TrivialRole)
        ));
        assert!(matches!(
            funny_gadget(&path_graph(3), FunnyList::Ends, roles, 3),
            Err(GadgetError::TrivialRole)
        ));
    }

    #[test]
    fn funny_gadget_middle_on_paw() {
        // Paw with the degree-3 vertex as the middle role: its outside
        // neighbor is the pendant or the third triangle vertex.
        let h = paw_graph();
        let roles = DesignatedP3 {
            one: 1,
            two: 0,
            three: 2,
        };
        let g = funny_gadget(&h, FunnyList::Middle, roles, 3).unwrap();
        let inst = &g.output.instance;
        let root = g.output.annotation("root");
        assert_eq!(root, 0);
        let (val, h2) = &g.homs[0];
        assert_eq!(*val, 0);
        let image: BTreeSet<usize> = inst.source.neighbors(root).map(|w| h2.get(w)).collect();
        assert_eq!(image, BTreeSet::from([3]));
    }

    #[test]
    fn funny_gadget_ends_on_k13() {
        // Star with designated path leaf-center-leaf; ends are leaves but
        // the product component still feeds both projections.
        let h = star_graph(3);
        let roles = DesignatedP3 {
            one: 1,
            two: 0,
            three: 2,
        };
        let g = funny_gadget(&h, FunnyList::Ends, roles, 3).unwrap();
        assert_eq!(g.homs.len(), 2);
        assert_eq!(g.homs[0].0, 1);
        assert_eq!(g.homs[1].0, 2);
    }

    #[test]
    fn pathfree_on_k13_is_exactly_the_base() {
        let f = formula(&[[1, 2, 3]]);
        let direct = gen_k13(&f);
        let general = gen_general_h_pathfree(&f, &star_graph(3)).unwrap();
        assert_eq!(general.instance, direct.instance);
        assert_eq!(general.annotations, direct.annotations);
    }

    #[test]
    fn pathfree_rejects_paw_and_suggests_star() {
        let f = formula(&[[1, 2, 3]]);
        assert_eq!(
            gen_general_h_pathfree(&f, &paw_graph()),
            Err(GadgetError::NoQualifyingBase)
        );
        // The associated bipartite graph of the paw contains an induced P4.
        let star = associated_bipartite(&paw_graph()).graph;
        assert!(gen_general_h_pathfree(&f, &star).is_ok());
    }

    #[test]
    fn pathfree_rejects_small_targets() {
        let f = formula(&[[1, 2, 3]]);
        assert!(matches!(
            gen_general_h_pathfree(&f, &path_graph(3)),
            Err(GadgetError::UnsupportedTarget(_))
        ));
        assert!(matches!(
            gen_general_h_pathfree(&f, &cycle_graph(4)),
            Err(GadgetError::UnsupportedTarget(_))
        ));
        assert!(matches!(
            gen_general_h_pathfree(&f, &path_graph(2)),
            Err(GadgetError::UnsupportedTarget(_))
        ));
    }

    #[test]
    fn pathfree_on_p5_matches_satisfiability() {
        for f in [
            formula(&[[1, 2, 3]]),
            formula(&[[1, 1, 1], [-1, -1, -1]]),
        ] {
            let out = gen_general_h_pathfree(&f, &path_graph(5)).unwrap();
            assert_eq!(brute_yes(&out), f.is_satisfiable());
        }
    }

    #[test]
    fn girth_general_on_p3_equals_base() {
        let f = formula(&[[1, 2, -3]]);
        let base = gen_nae_p3(&f, 2).unwrap();
        let general = gen_general_h_girth(&f, &path_graph(3), 2).unwrap();
        assert_eq!(general.instance, base.instance);
    }

    #[test]
    fn girth_general_on_k3_structure() {
        let f = formula(&[[1, 1, 1]]);
        let out = gen_general_h_girth(&f, &complete_graph(3), 2).unwrap();
        assert!(out.instance.source.girth_at_least(2));
        // Triangle: the middle role is trivial, the ends are not, so the
        // ends-list vertices grew gadgets and middles kept degree 3.
        assert!(out.instance.source.n() > gen_nae_p3(&f, 2).unwrap().instance.source.n());
    }

    #[test]
    fn girth_general_rejects_poly_targets() {
        let f = formula(&[[1, 2, 3]]);
        assert!(matches!(
            gen_general_h_girth(&f, &path_graph(2), 2),
            Err(GadgetError::UnsupportedTarget(_))
        ));
    }

    #[test]
    fn girth_general_lifts_looped_edge() {
        let f = formula(&[[1, 2, -3]]);
        let out = gen_general_h_girth(&f, &k2_loops(), 2).unwrap();
        assert_eq!(out.instance.target, k2_loops());
        assert!(out.instance.source.girth_at_least(2));
        assert!(out.instance.source.is_bipartite());
    }
}

