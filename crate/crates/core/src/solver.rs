//! Exact solvers: the budgeted backtracking oracle with list propagation,
//! closed-form solvers for the polynomial targets K1, K1 with a loop, and
//! K2, and the top-level dispatcher that routes instances to the structured
//! engines when the target allows it.

use crate::graph::{
    associated_bipartite, cycle_graph, graph_isomorphism, path_graph, Graph,
};
use crate::instance::{
    detect_associated_base, lift_to_base, lift_witness_back, split_consistent, Instance,
};
use crate::pattern::PatternGraph;
use crate::subexp;
use crate::verify::{verify_solution, Homomorphism};

/// Result of a budgeted solve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    Yes(Homomorphism),
    No,
    /// The node limit was hit before the search finished; the caller should
    /// shrink the instance or raise the budget.
    BudgetExceeded,
}

impl SolveOutcome {
    pub fn is_yes(&self) -> bool {
        matches!(self, SolveOutcome::Yes(_))
    }
}

/// Result of an exact (unbudgeted) solve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Answer {
    Yes(Homomorphism),
    No,
}

impl Answer {
    pub fn is_yes(&self) -> bool {
        matches!(self, Answer::Yes(_))
    }

    pub fn into_outcome(self) -> SolveOutcome {
        match self {
            Answer::Yes(h) => SolveOutcome::Yes(h),
            Answer::No => SolveOutcome::No,
        }
    }
}

/// Largest target the mask-based search supports.
pub const MAX_TARGET: usize = 64;

/// Exhaustive backtracking with list propagation. Deterministic: branches on
/// the least-index undecided vertex, values ascending. A `yes` comes with a
/// verified witness; `no` means the search space was exhausted.
pub fn solve_bruteforce(inst: &Instance, budget: Option<u64>) -> SolveOutcome {
    solve_bruteforce_opts(inst, budget, false)
}

/// Same search with an optional extra filtering rule (removing a value whose
/// support in some neighbor list is empty even when that list is not a
/// singleton). Exposed so tests can check the rule never changes answers.
pub fn solve_bruteforce_opts(inst: &Instance, budget: Option<u64>, strong: bool) -> SolveOutcome {
    assert!(
        inst.target.n() <= MAX_TARGET,
        "brute-force search supports targets up to {MAX_TARGET} vertices"
    );
    let n = inst.source.n();
    if n == 0 {
        return SolveOutcome::Yes(Homomorphism(vec![]));
    }
    let nh: Vec<u64> = (0..inst.target.n())
        .map(|a| {
            inst.target
                .neighbors(a)
                .fold(0u64, |acc, b| acc | 1 << b)
        })
        .collect();
    let lists: Vec<u64> = (0..n)
        .map(|v| inst.lists.get(v).iter().fold(0u64, |acc, &a| acc | 1 << a))
        .collect();
    if lists.iter().any(|&m| m == 0) {
        return SolveOutcome::No;
    }
    let mut search = Search {
        source: &inst.source,
        nh,
        lists,
        budget,
        nodes: 0,
        strong,
    };
    // Establish the invariant for lists that are singletons on input.
    let mut trail = Vec::new();
    for v in 0..n {
        if search.lists[v].count_ones() == 1 && !search.propagate(v, &mut trail) {
            return SolveOutcome::No;
        }
    }
    match search.run() {
        Res::Found => {
            let h = Homomorphism(
                search
                    .lists
                    .iter()
                    .map(|m| m.trailing_zeros() as usize)
                    .collect(),
            );
            debug_assert!(verify_solution(inst, &h).is_ok());
            SolveOutcome::Yes(h)
        }
        Res::Exhausted => SolveOutcome::No,
        Res::Budget => SolveOutcome::BudgetExceeded,
    }
}

enum Res {
    Found,
    Exhausted,
    Budget,
}

struct Search<'a> {
    source: &'a Graph,
    nh: Vec<u64>,
    lists: Vec<u64>,
    budget: Option<u64>,
    nodes: u64,
    strong: bool,
}

impl Search<'_> {
    fn run(&mut self) -> Res {
        let branch = (0..self.source.n()).find(|&v| self.lists[v].count_ones() > 1);
        let v = match branch {
            Some(v) => v,
            None => {
                return if self.happy_leaf() {
                    Res::Found
                } else {
                    Res::Exhausted
                }
            }
        };
        let mut avail = self.lists[v];
        while avail != 0 {
            let a = avail.trailing_zeros() as u64;
            avail &= avail - 1;
            self.nodes += 1;
            if self.budget.is_some_and(|b| self.nodes > b) {
                return Res::Budget;
            }
            let mut trail = vec![(v, self.lists[v])];
            self.lists[v] = 1 << a;
            if self.propagate(v, &mut trail) {
                match self.run() {
                    Res::Exhausted => {}
                    res => return res,
                }
            }
            for (w, old) in trail.into_iter().rev() {
                self.lists[w] = old;
            }
        }
        Res::Exhausted
    }

    /// Singleton-list filtering from `seed`, with happiness-infeasibility
    /// pruning on singleton vertices. Returns false on a wipeout.
    fn propagate(&mut self, seed: usize, trail: &mut Vec<(usize, u64)>) -> bool {
        let mut queue = vec![seed];
        while let Some(u) = queue.pop() {
            if self.lists[u].count_ones() != 1 {
                continue;
            }
            let a = self.lists[u].trailing_zeros() as usize;
            if !self.support_ok(u, a) {
                return false;
            }
            let mask = self.nh[a];
            let neigh: Vec<usize> = self.source.neighbors(u).collect();
            for w in neigh {
                let old = self.lists[w];
                let new = old & mask;
                if new == old {
                    continue;
                }
                if new == 0 {
                    return false;
                }
                trail.push((w, old));
                self.lists[w] = new;
                queue.push(w);
                // A shrink at w can remove the last support of an already
                // singleton neighbor of w.
                for z in self.source.neighbors(w) {
                    if z != u && self.lists[z].count_ones() == 1 {
                        queue.push(z);
                    }
                }
            }
            if self.strong {
                // Optional: filter any value of any neighbor whose own
                // neighborhood support vanished.
                let neigh: Vec<usize> = self.source.neighbors(u).collect();
                for w in neigh {
                    let mut keep = 0u64;
                    let mut avail = self.lists[w];
                    while avail != 0 {
                        let b = avail.trailing_zeros() as usize;
                        avail &= avail - 1;
                        let fine = self
                            .source
                            .neighbors(w)
                            .all(|z| self.lists[z] & self.nh[b] != 0);
                        if fine {
                            keep |= 1 << b;
                        }
                    }
                    if keep != self.lists[w] {
                        if keep == 0 {
                            return false;
                        }
                        trail.push((w, self.lists[w]));
                        self.lists[w] = keep;
                        queue.push(w);
                    }
                }
            }
        }
        true
    }

    /// For a vertex pinned to `a`: every target neighbor of `a` must still
    /// appear in some neighbor's list, otherwise the branch is dead.
    fn support_ok(&self, u: usize, a: usize) -> bool {
        let mut needed = self.nh[a];
        for w in self.source.neighbors(u) {
            needed &= !self.lists[w];
            if needed == 0 {
                return true;
            }
        }
        needed == 0
    }

    /// Full-assignment local surjectivity check.
    fn happy_leaf(&self) -> bool {
        for v in 0..self.source.n() {
            let a = self.lists[v].trailing_zeros() as usize;
            let mut needed = self.nh[a];
            for w in self.source.neighbors(v) {
                needed &= !self.lists[w];
            }
            if needed != 0 {
                return false;
            }
        }
        true
    }
}

/// Result of the closed-form solvers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolyOutcome {
    Yes(Homomorphism),
    No,
    /// The target is none of K1, K1 with a loop, K2.
    NotApplicable,
}

/// Closed-form decision for the polynomial targets, detected structurally:
/// K1 (one vertex), K1 with a loop, and K2 (one plain edge).
pub fn solve_poly(inst: &Instance) -> PolyOutcome {
    let t = &inst.target;
    let n = inst.source.n();
    if t.n() == 1 && t.m() == 0 {
        // Positive instances are edgeless graphs with nonempty lists.
        if inst.source.m() == 0 && (0..n).all(|v| !inst.lists.get(v).is_empty()) {
            return PolyOutcome::Yes(Homomorphism(vec![0; n]));
        }
        return PolyOutcome::No;
    }
    if t.n() == 1 && t.has_loop(0) {
        // Positive instances have no isolated vertices and nonempty lists.
        if (0..n).all(|v| inst.source.degree(v) >= 1 && !inst.lists.get(v).is_empty()) {
            return PolyOutcome::Yes(Homomorphism(vec![0; n]));
        }
        return PolyOutcome::No;
    }
    if t.n() == 2 && t.m() == 1 && t.has_edge(0, 1) {
        let bp = match inst.source.bipartition() {
            Some(bp) => bp,
            None => return PolyOutcome::No,
        };
        let mut witness = vec![usize::MAX; n];
        for comp in inst.source.connected_components() {
            if comp.len() < 2 {
                // An isolated vertex can never be happy for K2.
                return PolyOutcome::No;
            }
            // Every homomorphism maps one class to 0 and the other to 1;
            // try both orientations against the lists.
            let mut assigned = false;
            for flip in [false, true] {
                let ok = comp.iter().all(|&v| {
                    let img = usize::from(bp.in_a(v) == flip);
                    inst.lists.get(v).contains(&img)
                });
                if ok {
                    for &v in &comp {
                        witness[v] = usize::from(bp.in_a(v) == flip);
                    }
                    assigned = true;
                    break;
                }
            }
            if !assigned {
                return PolyOutcome::No;
            }
        }
        let h = Homomorphism(witness);
        debug_assert!(verify_solution(inst, &h).is_ok());
        return PolyOutcome::Yes(h);
    }
    PolyOutcome::NotApplicable
}

/// Exact dispatcher. Splits the source into components, then per component:
/// closed-form targets first, the subexponential engines for targets
/// isomorphic to P3 or C4, the associated-bipartite lift when the target is
/// recognized as `H x K2` of a small nonbipartite base, and exhaustive
/// search otherwise.
pub fn solve_auto(inst: &Instance) -> Answer {
    let comps = inst.source.connected_components();
    if comps.len() <= 1 {
        return solve_auto_connected(inst);
    }
    let mut witness = vec![usize::MAX; inst.source.n()];
    for comp in comps {
        let sub = inst.restrict_source(&comp);
        match solve_auto_connected(&sub) {
            Answer::Yes(h) => {
                for (i, &v) in comp.iter().enumerate() {
                    witness[v] = h.get(i);
                }
            }
            Answer::No => return Answer::No,
        }
    }
    Answer::Yes(Homomorphism(witness))
}

fn solve_auto_connected(inst: &Instance) -> Answer {
    if inst.source.n() == 0 {
        return Answer::Yes(Homomorphism(vec![]));
    }
    match solve_poly(inst) {
        PolyOutcome::Yes(h) => return Answer::Yes(h),
        PolyOutcome::No => return Answer::No,
        PolyOutcome::NotApplicable => {}
    }
    let default_pattern = PatternGraph::path(1);
    if let Some(embed) = graph_isomorphism(&path_graph(3), &inst.target) {
        let relabeled = inst.retarget(path_graph(3), &embed);
        return map_answer_back(
            subexp::solve_p3(&relabeled, &default_pattern).expect("canonical P3 target"),
            &embed,
            inst,
        );
    }
    if let Some(embed) = graph_isomorphism(&cycle_graph(4), &inst.target) {
        let relabeled = inst.retarget(cycle_graph(4), &embed);
        return map_answer_back(
            subexp::solve_c4(&relabeled, &default_pattern).expect("canonical C4 target"),
            &embed,
            inst,
        );
    }
    if let Some(found) = detect_associated_base(&inst.target) {
        // The target is H* of a connected nonbipartite H: relabel to the
        // standard star indexing, split into consistent candidates, lift
        // each to H and recurse.
        let std_star = associated_bipartite(&found.base).graph;
        let mut embed = vec![usize::MAX; inst.target.n()];
        for (old, &std) in found.to_std.iter().enumerate() {
            embed[std] = old;
        }
        let std_inst = inst.retarget(std_star, &embed);
        let splits = split_consistent(&std_inst).expect("star target is connected bipartite");
        if splits.is_empty() {
            return Answer::No;
        }
        debug_assert_eq!(splits.len(), 1, "source is connected here");
        for cand in &splits[0].candidates {
            let lifted = match lift_to_base(cand, &found.base) {
                Ok(l) => l,
                Err(_) => continue,
            };
            if let Answer::Yes(h) = solve_auto(&lifted) {
                let star_w = lift_witness_back(cand, found.base.n(), &h.0);
                let mapped = Homomorphism(star_w.iter().map(|&s| embed[s]).collect());
                debug_assert!(verify_solution(inst, &mapped).is_ok());
                return Answer::Yes(mapped);
            }
        }
        return Answer::No;
    }
    match solve_bruteforce(inst, None) {
        SolveOutcome::Yes(h) => Answer::Yes(h),
        SolveOutcome::No => Answer::No,
        SolveOutcome::BudgetExceeded => unreachable!("no budget given"),
    }
}

fn map_answer_back(ans: Answer, embed: &[usize], inst: &Instance) -> Answer {
    match ans {
        Answer::Yes(h) => {
            let mapped = Homomorphism(h.0.iter().map(|&c| embed[c]).collect());
            debug_assert!(verify_solution(inst, &mapped).is_ok());
            Answer::Yes(mapped)
        }
        Answer::No => Answer::No,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, k1_loop, k2_loops, star_graph};
    use crate::instance::ListAssignment;
    use std::collections::BTreeSet;

    fn naive_answer(inst: &Instance) -> bool {
        // Independent definitional enumeration over all |V(H)|^n maps.
        let n = inst.source.n();
        let hn = inst.target.n();
        if n == 0 {
            return true;
        }
        let mut map = vec![0usize; n];
        loop {
            let h = Homomorphism(map.clone());
            if verify_solution(inst, &h).is_ok() {
                return true;
            }
            let mut i = 0;
            loop {
                map[i] += 1;
                if map[i] < hn {
                    break;
                }
                map[i] = 0;
                i += 1;
                if i == n {
                    return false;
                }
            }
        }
    }

    #[test]
    fn edge_into_loopless_k1_is_no() {
        let inst = Instance::with_full_lists(Graph::new(1), path_graph(2));
        assert_eq!(solve_bruteforce(&inst, None), SolveOutcome::No);
        assert_eq!(solve_poly(&inst), PolyOutcome::No);
    }

    #[test]
    fn alternating_c4_into_p3() {
        let mut lists = ListAssignment::empty(4);
        for (v, l) in [(0, vec![0, 2]), (1, vec![1]), (2, vec![0, 2]), (3, vec![1])] {
            lists.set(v, l.into_iter().collect());
        }
        let inst = Instance::new(path_graph(3), cycle_graph(4), lists).unwrap();
        match solve_bruteforce(&inst, None) {
            SolveOutcome::Yes(h) => {
                assert!(verify_solution(&inst, &h).is_ok());
                assert_eq!(h.0, vec![0, 1, 2, 1]);
            }
            other => panic!("expected yes, got {other:?}"),
        }
    }

    #[test]
    fn empty_list_is_no() {
        let mut lists = ListAssignment::full(3, 3);
        lists.set(1, BTreeSet::new());
        let inst = Instance::new(path_graph(3), path_graph(3), lists).unwrap();
        assert_eq!(solve_bruteforce(&inst, None), SolveOutcome::No);
    }

    #[test]
    fn budget_is_respected() {
        let inst = Instance::with_full_lists(path_graph(3), star_graph(6));
        assert_eq!(solve_bruteforce(&inst, Some(1)), SolveOutcome::BudgetExceeded);
    }

    #[test]
    fn poly_k1_loop() {
        let inst = Instance::with_full_lists(k1_loop(), path_graph(2));
        match solve_poly(&inst) {
            PolyOutcome::Yes(h) => assert!(verify_solution(&inst, &h).is_ok()),
            other => panic!("expected yes, got {other:?}"),
        }
        // An isolated vertex kills it.
        let mut g = path_graph(2);
        g = Graph::from_edges(3, g.edges());
        let inst = Instance::with_full_lists(k1_loop(), g);
        assert_eq!(solve_poly(&inst), PolyOutcome::No);
    }

    #[test]
    fn poly_k2_path() {
        let inst = Instance::with_full_lists(path_graph(2), path_graph(3));
        match solve_poly(&inst) {
            PolyOutcome::Yes(h) => {
                assert!(verify_solution(&inst, &h).is_ok());
                assert_eq!(h.0, vec![0, 1, 0]);
            }
            other => panic!("expected yes, got {other:?}"),
        }
    }

    #[test]
    fn poly_k2_forced_conflict_matches_brute() {
        // A list forcing both classes onto the same target vertex.
        let mut lists = ListAssignment::full(3, 2);
        lists.set(0, BTreeSet::from([0]));
        lists.set(1, BTreeSet::from([0]));
        let inst = Instance::new(path_graph(2), path_graph(3), lists).unwrap();
        assert_eq!(solve_poly(&inst), PolyOutcome::No);
        assert_eq!(solve_bruteforce(&inst, None), SolveOutcome::No);
    }

    #[test]
    fn poly_not_applicable_for_other_targets() {
        let inst = Instance::with_full_lists(k2_loops(), path_graph(2));
        assert_eq!(solve_poly(&inst), PolyOutcome::NotApplicable);
        let inst = Instance::with_full_lists(path_graph(3), path_graph(2));
        assert_eq!(solve_poly(&inst), PolyOutcome::NotApplicable);
    }

    #[test]
    fn brute_matches_naive_enumeration() {
        let mut state = 0x243f6a8885a308d3u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let targets = [
            path_graph(2),
            path_graph(3),
            complete_graph(3),
            k2_loops(),
            k1_loop(),
        ];
        for round in 0..150 {
            let t = targets[round % targets.len()].clone();
            let n = 1 + (next() % 5) as usize;
            let mut g = Graph::new(n);
            for u in 0..n {
                for v in u + 1..n {
                    if next() % 3 == 0 {
                        g.add_edge(u, v);
                    }
                }
            }
            let mut lists = ListAssignment::empty(n);
            for v in 0..n {
                let mut set = BTreeSet::new();
                for a in 0..t.n() {
                    if next() % 2 == 0 {
                        set.insert(a);
                    }
                }
                lists.set(v, set);
            }
            let inst = Instance::new(t, g, lists).unwrap();
            let expected = naive_answer(&inst);
            assert_eq!(solve_bruteforce(&inst, None).is_yes(), expected);
            assert_eq!(
                solve_bruteforce_opts(&inst, None, true).is_yes(),
                expected,
                "strong filtering changed the answer"
            );
            assert_eq!(solve_auto(&inst).is_yes(), expected);
        }
    }

    #[test]
    fn auto_routes_c6_through_the_base_triangle() {
        // C6 = K3*: consistent instances lift to K3 and agree with direct
        // brute force.
        let star = associated_bipartite(&complete_graph(3)).graph;
        let mut state = 0xb7e151628aed2a6bu64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..40 {
            let n = 2 + (next() % 5) as usize;
            let mut g = path_graph(n);
            for extra in 0..n {
                let u = (next() % n as u64) as usize;
                let v = (next() % n as u64) as usize;
                let _ = extra;
                if u != v && !g.has_edge(u, v) && (u + v) % 2 == 1 {
                    g.add_edge(u, v);
                }
            }
            let mut lists = ListAssignment::empty(n);
            for v in 0..n {
                let mut set = BTreeSet::new();
                for a in 0..6 {
                    if next() % 2 == 0 {
                        set.insert(a);
                    }
                }
                lists.set(v, set);
            }
            let inst = Instance::new(star.clone(), g, lists).unwrap();
            assert_eq!(
                solve_auto(&inst).is_yes(),
                solve_bruteforce(&inst, None).is_yes()
            );
        }
    }
}
