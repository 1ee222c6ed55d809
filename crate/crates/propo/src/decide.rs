//! Exact Property O decision: a pruned backtracking witness search, a naive
//! all-orders oracle, and the k = 2 acyclicity oracle.
//!
//! The searcher builds a linear order one vertex at a time. A branch dies as
//! soon as some edge fully contained in the placed prefix is consistent with
//! it: every completion of that prefix keeps the consistent edge, so no
//! completion can be a witness. If the whole permutation tree is exhausted
//! without reaching a leaf, the graph has Property O.

use crate::core::{
    is_consistent, DecisionMethod, LinearOrder, OrientedHypergraph, PropertyOStatus, Vertex,
    WitnessCertificate,
};
use std::time::Instant;

#[derive(thiserror::Error, Debug)]
pub enum DecideError {
    #[error("cycle_oracle_k2 requires k = 2, got k = {0}")]
    NotADigraph(usize),
    #[error("naive oracle refused: n = {n} exceeds the n! enumeration guard ({guard})")]
    NaiveGuard { n: usize, guard: usize },
}

/// Resource limits for the witness search. Exhausting a budget yields
/// `Decision::Indeterminate`, never a wrong boolean.
#[derive(Clone, Copy, Debug, Default)]
pub struct SearchBudget {
    pub max_nodes: Option<u64>,
    pub max_seconds: Option<f64>,
}

impl SearchBudget {
    pub fn unlimited() -> Self {
        SearchBudget::default()
    }
}

/// Branch ordering for the DFS. `Ascending` is the deterministic default;
/// `FewestCompletions` tries first the vertex that would complete the fewest
/// edges consistently, delaying pruning when hunting for witnesses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum VertexOrder {
    #[default]
    Ascending,
    FewestCompletions,
}

#[derive(Clone, Debug)]
pub enum Decision {
    Decided(WitnessCertificate),
    Indeterminate { nodes_expanded: u64 },
}

impl Decision {
    pub fn certificate(&self) -> Option<&WitnessCertificate> {
        match self {
            Decision::Decided(c) => Some(c),
            Decision::Indeterminate { .. } => None,
        }
    }
}

struct Dfs<'a> {
    h: &'a OrientedHypergraph,
    incident: Vec<Vec<usize>>,
    // Per edge: number of placed vertices, and whether the placed ones were
    // seen exactly in tuple order so far.
    placed: Vec<usize>,
    in_order: Vec<bool>,
    used: Vec<bool>,
    prefix: Vec<Vertex>,
    heuristic: VertexOrder,
    nodes: u64,
    max_nodes: u64,
    deadline: Option<Instant>,
    out_of_budget: bool,
}

enum DfsOutcome {
    Witness(Vec<Vertex>),
    Exhausted,
    Budget,
}

impl<'a> Dfs<'a> {
    fn new(h: &'a OrientedHypergraph, budget: SearchBudget, heuristic: VertexOrder) -> Self {
        let mut incident = vec![Vec::new(); h.n()];
        for (i, e) in h.edges().iter().enumerate() {
            for &v in e.vertices() {
                incident[v].push(i);
            }
        }
        Dfs {
            h,
            incident,
            placed: vec![0; h.edges().len()],
            in_order: vec![true; h.edges().len()],
            used: vec![false; h.n()],
            prefix: Vec::with_capacity(h.n()),
            heuristic,
            nodes: 0,
            max_nodes: budget.max_nodes.unwrap_or(u64::MAX),
            deadline: budget
                .max_seconds
                .map(|s| Instant::now() + std::time::Duration::from_secs_f64(s)),
            out_of_budget: false,
        }
    }

    fn budget_exceeded(&mut self) -> bool {
        if self.out_of_budget {
            return true;
        }
        if self.nodes >= self.max_nodes {
            self.out_of_budget = true;
        } else if self.nodes % 4096 == 0 {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    self.out_of_budget = true;
                }
            }
        }
        self.out_of_budget
    }

    /// Places v at the next rank. Returns true if some edge became fully
    /// placed in consistent order (so the branch must be pruned), together
    /// with the trail needed to undo.
    fn place(&mut self, v: Vertex) -> (bool, Vec<(usize, bool)>) {
        let mut trail = Vec::with_capacity(self.incident[v].len());
        let mut pruned = false;
        let k = self.h.k();
        for idx in 0..self.incident[v].len() {
            let e = self.incident[v][idx];
            trail.push((e, self.in_order[e]));
            let pos = self.placed[e];
            self.placed[e] = pos + 1;
            if self.in_order[e] && self.h.edges()[e].vertices()[pos] != v {
                self.in_order[e] = false;
            }
            if self.placed[e] == k && self.in_order[e] {
                pruned = true;
            }
        }
        self.used[v] = true;
        self.prefix.push(v);
        (pruned, trail)
    }

    fn unplace(&mut self, v: Vertex, trail: Vec<(usize, bool)>) {
        self.prefix.pop();
        self.used[v] = false;
        for (e, was_in_order) in trail {
            self.placed[e] -= 1;
            self.in_order[e] = was_in_order;
        }
    }

    /// Number of edges that v would complete consistently if placed next.
    fn completions(&self, v: Vertex) -> usize {
        let k = self.h.k();
        self.incident[v]
            .iter()
            .filter(|&&e| {
                self.placed[e] == k - 1
                    && self.in_order[e]
                    && self.h.edges()[e].vertices()[k - 1] == v
            })
            .count()
    }

    fn search(&mut self) -> DfsOutcome {
        if self.prefix.len() == self.h.n() {
            return DfsOutcome::Witness(self.prefix.clone());
        }
        let candidates: Vec<Vertex> = match self.heuristic {
            VertexOrder::Ascending => (0..self.h.n()).filter(|&v| !self.used[v]).collect(),
            VertexOrder::FewestCompletions => {
                let mut cs: Vec<(usize, Vertex)> = (0..self.h.n())
                    .filter(|&v| !self.used[v])
                    .map(|v| (self.completions(v), v))
                    .collect();
                cs.sort_unstable();
                cs.into_iter().map(|(_, v)| v).collect()
            }
        };
        for v in candidates {
            self.nodes += 1;
            if self.budget_exceeded() {
                return DfsOutcome::Budget;
            }
            let (pruned, trail) = self.place(v);
            if !pruned {
                match self.search() {
                    DfsOutcome::Exhausted => {}
                    done => {
                        self.unplace(v, trail);
                        return done;
                    }
                }
            }
            self.unplace(v, trail);
        }
        DfsOutcome::Exhausted
    }
}

/// Searches for a witness order (one with no consistent edge).
///
/// Returns FAILS_O with a re-checkable witness, HAS_O after exhausting the
/// permutation tree, or `Indeterminate` on budget exhaustion.
pub fn find_witness(h: &OrientedHypergraph, budget: SearchBudget) -> Decision {
    find_witness_with(h, budget, VertexOrder::default())
}

pub fn find_witness_with(
    h: &OrientedHypergraph,
    budget: SearchBudget,
    heuristic: VertexOrder,
) -> Decision {
    let mut dfs = Dfs::new(h, budget, heuristic);
    match dfs.search() {
        DfsOutcome::Witness(perm) => {
            debug_assert!({
                let order = LinearOrder::from_perm(perm.clone()).unwrap();
                h.edges().iter().all(|e| !is_consistent(e, &order))
            });
            Decision::Decided(WitnessCertificate {
                status: PropertyOStatus::FailsO,
                witness_order: Some(perm),
                method: DecisionMethod::Dfs,
                nodes_expanded: dfs.nodes,
                orders_examined: 0,
            })
        }
        DfsOutcome::Exhausted => Decision::Decided(WitnessCertificate {
            status: PropertyOStatus::HasO,
            witness_order: None,
            method: DecisionMethod::Dfs,
            nodes_expanded: dfs.nodes,
            orders_examined: 0,
        }),
        DfsOutcome::Budget => Decision::Indeterminate {
            nodes_expanded: dfs.nodes,
        },
    }
}

/// Exhaustive decision with an unlimited budget. Callers are responsible for
/// keeping n within exhaustive reach.
pub fn has_property_o(h: &OrientedHypergraph) -> bool {
    match find_witness(h, SearchBudget::unlimited()) {
        Decision::Decided(c) => c.status == PropertyOStatus::HasO,
        Decision::Indeterminate { .. } => unreachable!("unlimited budget cannot run out"),
    }
}

pub const NAIVE_GUARD: usize = 10;

/// Independent oracle: enumerate all n! orders and test every edge.
/// Refuses above the n! guard; used for cross-validation only.
pub fn naive_property_o(h: &OrientedHypergraph) -> Result<bool, DecideError> {
    naive_property_o_guarded(h, NAIVE_GUARD)
}

pub fn naive_property_o_guarded(
    h: &OrientedHypergraph,
    guard: usize,
) -> Result<bool, DecideError> {
    if h.n() > guard {
        return Err(DecideError::NaiveGuard { n: h.n(), guard });
    }
    let mut perm: Vec<Vertex> = (0..h.n()).collect();
    Ok(every_order_covered(h, &mut perm, h.n()))
}

fn every_order_covered(h: &OrientedHypergraph, perm: &mut Vec<Vertex>, m: usize) -> bool {
    if m == 1 {
        let order = LinearOrder::from_perm(perm.clone()).unwrap();
        return h.edges().iter().any(|e| is_consistent(e, &order));
    }
    for i in 0..m {
        if !every_order_covered(h, perm, m - 1) {
            return false;
        }
        if m % 2 == 0 {
            perm.swap(i, m - 1);
        } else {
            perm.swap(0, m - 1);
        }
    }
    true
}

/// For k = 2 a graph fails Property O exactly when some order reverses every
/// arc, i.e. when the digraph is acyclic. So Property O holds iff a directed
/// cycle exists.
pub fn cycle_oracle_k2(h: &OrientedHypergraph) -> Result<bool, DecideError> {
    if h.k() != 2 {
        return Err(DecideError::NotADigraph(h.k()));
    }
    let n = h.n();
    let mut adj = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    for e in h.edges() {
        let (u, v) = (e.vertices()[0], e.vertices()[1]);
        adj[u].push(v);
        indeg[v] += 1;
    }
    let mut queue: Vec<Vertex> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut drained = 0;
    while let Some(u) = queue.pop() {
        drained += 1;
        for &v in &adj[u] {
            indeg[v] -= 1;
            if indeg[v] == 0 {
                queue.push(v);
            }
        }
    }
    Ok(drained < n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::OrientedEdge;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn graph(n: usize, k: usize, edges: &[&[Vertex]]) -> OrientedHypergraph {
        let es = edges
            .iter()
            .map(|e| OrientedEdge::new(e.to_vec()).unwrap())
            .collect();
        OrientedHypergraph::new(n, k, es).unwrap()
    }

    fn cycle3() -> OrientedHypergraph {
        graph(3, 2, &[&[0, 1], &[1, 2], &[2, 0]])
    }

    #[test]
    fn oriented_3_cycle_has_property_o() {
        assert!(has_property_o(&cycle3()));
        assert!(naive_property_o(&cycle3()).unwrap());
        assert!(cycle_oracle_k2(&cycle3()).unwrap());
    }

    #[test]
    fn single_edge_fails_with_reversed_witness() {
        let h = graph(2, 2, &[&[0, 1]]);
        let d = find_witness(&h, SearchBudget::unlimited());
        let c = d.certificate().unwrap();
        assert_eq!(c.status, PropertyOStatus::FailsO);
        assert_eq!(c.witness_order, Some(vec![1, 0]));
        assert!(c.verify(&h).unwrap());
        assert!(!naive_property_o(&h).unwrap());
    }

    #[test]
    fn transitive_tournament_fails_with_reversed_witness() {
        let h = graph(3, 2, &[&[0, 1], &[0, 2], &[1, 2]]);
        let c = find_witness(&h, SearchBudget::unlimited());
        let c = c.certificate().unwrap();
        assert_eq!(c.status, PropertyOStatus::FailsO);
        assert_eq!(c.witness_order, Some(vec![2, 1, 0]));
        assert!(!cycle_oracle_k2(&h).unwrap());
    }

    #[test]
    fn empty_edge_set_fails() {
        let h = graph(4, 2, &[]);
        assert!(!has_property_o(&h));
    }

    #[test]
    fn transitive_tournament_on_4_is_acyclic() {
        let h = graph(4, 2, &[&[0, 1], &[0, 2], &[0, 3], &[1, 2], &[1, 3], &[2, 3]]);
        assert!(!cycle_oracle_k2(&h).unwrap());
        assert!(!has_property_o(&h));
    }

    #[test]
    fn budget_exhaustion_is_indeterminate() {
        let h = graph(6, 2, &[&[0, 1], &[2, 3], &[4, 5]]);
        match find_witness(&h, SearchBudget { max_nodes: Some(2), max_seconds: None }) {
            Decision::Indeterminate { nodes_expanded } => assert!(nodes_expanded <= 3),
            Decision::Decided(_) => panic!("expected budget exhaustion"),
        }
    }

    #[test]
    fn naive_guard_refuses_large_n() {
        let h = graph(11, 2, &[&[0, 1]]);
        assert!(naive_property_o(&h).is_err());
    }

    #[test]
    fn cycle_oracle_rejects_k3() {
        let h = graph(4, 3, &[&[0, 1, 2]]);
        assert!(cycle_oracle_k2(&h).is_err());
    }

    fn random_graph(rng: &mut ChaCha8Rng, n: usize, k: usize, m: usize) -> OrientedHypergraph {
        let mut edges: Vec<OrientedEdge> = Vec::new();
        let mut sets = std::collections::HashSet::new();
        let mut attempts = 0;
        while edges.len() < m && attempts < 1000 {
            attempts += 1;
            let mut verts: Vec<Vertex> = (0..n).collect();
            verts.shuffle(rng);
            verts.truncate(k);
            let mut key = verts.clone();
            key.sort_unstable();
            if sets.insert(key) {
                edges.push(OrientedEdge::new(verts).unwrap());
            }
        }
        OrientedHypergraph::new(n, k, edges).unwrap()
    }

    #[test]
    fn oracle_equivalence_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..500 {
            let n = rng.random_range(3..=5);
            let k = rng.random_range(2..=3.min(n));
            let m = rng.random_range(0..=(crate::core::binomial_u64(n, k) as usize));
            let h = random_graph(&mut rng, n, k, m);
            let dfs = has_property_o(&h);
            let naive = naive_property_o(&h).unwrap();
            assert_eq!(dfs, naive, "trial {trial}: {h:?}");
            if k == 2 {
                assert_eq!(dfs, cycle_oracle_k2(&h).unwrap(), "trial {trial}");
            }
            // Counting bound: positive instances have at least k! edges.
            if dfs {
                assert!(h.edges().len() as u64 >= crate::core::factorial_u64(k));
            }
        }
    }

    #[test]
    fn oracle_equivalence_500_random_3graphs_n5() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let h = random_graph(&mut rng, 5, 3, 6);
            assert_eq!(has_property_o(&h), naive_property_o(&h).unwrap());
        }
    }

    #[test]
    fn fewest_completions_heuristic_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let h = random_graph(&mut rng, 5, 2, 5);
            let a = find_witness_with(&h, SearchBudget::unlimited(), VertexOrder::Ascending);
            let b =
                find_witness_with(&h, SearchBudget::unlimited(), VertexOrder::FewestCompletions);
            assert_eq!(
                a.certificate().unwrap().status,
                b.certificate().unwrap().status
            );
        }
    }

    #[test]
    fn monotone_under_adding_edges() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let h = random_graph(&mut rng, 5, 2, 7);
            if !has_property_o(&h) {
                continue;
            }
            // Drop edges: property may vanish. Add edges to a positive
            // instance: property must persist.
            let extra = random_graph(&mut rng, 5, 2, 10);
            let mut sets: std::collections::HashSet<Vec<Vertex>> =
                h.edges().iter().map(|e| e.underlying()).collect();
            let mut edges = h.edges().to_vec();
            for e in extra.edges() {
                if sets.insert(e.underlying()) {
                    edges.push(e.clone());
                }
            }
            let bigger = OrientedHypergraph::new(5, 2, edges).unwrap();
            assert!(has_property_o(&bigger));
        }
    }

    #[test]
    fn isomorphism_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..100 {
            let h = random_graph(&mut rng, 5, 3, 7);
            let mut sigma: Vec<Vertex> = (0..5).collect();
            sigma.shuffle(&mut rng);
            let relabeled = h.relabel(&sigma).unwrap();
            assert_eq!(has_property_o(&h), has_property_o(&relabeled));
        }
    }

    #[test]
    fn witness_soundness_recheck() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..200 {
            let h = random_graph(&mut rng, 6, 3, 8);
            if let Decision::Decided(c) = find_witness(&h, SearchBudget::unlimited()) {
                if c.status == PropertyOStatus::FailsO {
                    assert!(c.verify(&h).unwrap());
                }
            }
        }
    }
}
