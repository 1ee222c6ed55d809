//! The recursive family G_k and the proof-guided consistent-edge finder.
//!
//! G_2 is an oriented 3-cycle. G_{k+1} lives on three disjoint copies X, Y, Z
//! of V_k (laid out as consecutive id ranges, X first) and its edges come in
//! four types: (x, y-edge), (z-edge, x), (y-edge, z), (x-edge, y). The finder
//! locates an edge consistent with any given order by replaying the case
//! analysis that proves G_k has Property O, so it works far beyond exhaustive
//! reach.

use crate::core::{is_consistent, LinearOrder, OrientedEdge, OrientedHypergraph, Vertex};
use num_bigint::BigUint;
use serde::Serialize;

#[derive(thiserror::Error, Debug)]
pub enum ConstructError {
    #[error("G_k needs k >= 2, got {0}")]
    KTooSmall(usize),
    #[error("refusing to materialize G_{k}: {edges} edges exceeds the eager guard (k <= {guard}); use the streaming edge visitor")]
    EagerGuard { k: usize, edges: BigUint, guard: usize },
    #[error("edge streaming is supported for k <= {guard}; |E_{k}| = {edges} is beyond enumeration reach")]
    StreamGuard { k: usize, edges: BigUint, guard: usize },
    #[error("order has {got} vertices, G_{k} needs {expected}")]
    OrderLengthMismatch { k: usize, expected: usize, got: usize },
    #[error("internal invariant violated: proof replay produced an inconsistent edge at k = {0}")]
    ProofReplayFailed(usize),
}

/// Edge provenance in the recursive construction. `Base` marks the three
/// cycle edges of G_2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EdgeTag {
    Base,
    T1,
    T2,
    T3,
    T4,
}

/// Recursive block layout of G_k. Blocks are consecutive id ranges
/// [offset, offset+s), [offset+s, offset+2s), [offset+2s, offset+3s) with
/// s = 3^(k-2); each block is itself a G_{k-1} layout.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GkLayout {
    pub k: usize,
    pub offset: usize,
}

impl GkLayout {
    pub fn root(k: usize) -> Self {
        GkLayout { k, offset: 0 }
    }

    pub fn vertex_count(&self) -> usize {
        3usize.pow(self.k as u32 - 1)
    }

    fn block_size(&self) -> usize {
        3usize.pow(self.k as u32 - 2)
    }

    pub fn x(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.block_size()
    }

    pub fn y(&self) -> std::ops::Range<usize> {
        let s = self.block_size();
        self.offset + s..self.offset + 2 * s
    }

    pub fn z(&self) -> std::ops::Range<usize> {
        let s = self.block_size();
        self.offset + 2 * s..self.offset + 3 * s
    }

    fn sub(&self, block: usize) -> GkLayout {
        GkLayout {
            k: self.k - 1,
            offset: self.offset + block * self.block_size(),
        }
    }
}

/// G_k together with per-edge provenance tags.
#[derive(Clone, Debug)]
pub struct GkGraph {
    pub k: usize,
    pub graph: OrientedHypergraph,
    pub tags: Vec<EdgeTag>,
    pub layout: GkLayout,
}

pub fn gk_vertex_count(k: usize) -> BigUint {
    BigUint::from(3u32).pow(k as u32 - 1)
}

/// |E_k| = 2^(2(k-2)) * 3^(C(k-1,2)+1), exactly.
pub fn gk_edge_count(k: usize) -> BigUint {
    let choose2 = ((k - 1) * (k - 2) / 2) as u32;
    BigUint::from(2u32).pow(2 * (k as u32 - 2)) * BigUint::from(3u32).pow(choose2 + 1)
}

pub const EAGER_GUARD: usize = 5;
pub const STREAM_GUARD: usize = 6;

/// Builds G_k eagerly. Refuses above the eager guard (|E_6| is already 45M
/// tuples); use [`for_each_edge`] to stream larger levels.
pub fn build_gk(k: usize) -> Result<GkGraph, ConstructError> {
    build_gk_guarded(k, EAGER_GUARD)
}

pub fn build_gk_guarded(k: usize, guard: usize) -> Result<GkGraph, ConstructError> {
    if k < 2 {
        return Err(ConstructError::KTooSmall(k));
    }
    if k > guard {
        return Err(ConstructError::EagerGuard {
            k,
            edges: gk_edge_count(k),
            guard,
        });
    }
    let mut raw = Vec::new();
    let mut tags = Vec::new();
    collect_edges(k, &mut |tuple, tag| {
        raw.push(OrientedEdge::new(tuple.to_vec()).expect("G_k tuples are valid edges"));
        tags.push(tag);
    })?;
    let n = 3usize.pow(k as u32 - 1);
    let graph = OrientedHypergraph::new(n, k, raw)
        .expect("G_k never places two tuples on one underlying set");
    Ok(GkGraph {
        k,
        graph,
        tags,
        layout: GkLayout::root(k),
    })
}

/// Streams every edge of G_k (with its tag) without materializing the whole
/// edge list. Only the level below is held in memory.
pub fn for_each_edge(
    k: usize,
    f: &mut dyn FnMut(&[Vertex], EdgeTag),
) -> Result<(), ConstructError> {
    if k < 2 {
        return Err(ConstructError::KTooSmall(k));
    }
    if k > STREAM_GUARD {
        return Err(ConstructError::StreamGuard {
            k,
            edges: gk_edge_count(k),
            guard: STREAM_GUARD,
        });
    }
    collect_edges(k, f)
}

fn collect_edges(k: usize, f: &mut dyn FnMut(&[Vertex], EdgeTag)) -> Result<(), ConstructError> {
    if k == 2 {
        f(&[0, 1], EdgeTag::Base);
        f(&[1, 2], EdgeTag::Base);
        f(&[2, 0], EdgeTag::Base);
        return Ok(());
    }
    // Materialize E_{k-1} once; the three block copies are translations.
    let mut sub: Vec<Vec<Vertex>> = Vec::new();
    collect_edges(k - 1, &mut |tuple, _| sub.push(tuple.to_vec()))?;
    let s = 3usize.pow(k as u32 - 2);
    let shift = |e: &[Vertex], by: usize, buf: &mut Vec<Vertex>| {
        buf.clear();
        buf.extend(e.iter().map(|&v| v + by));
    };
    let mut buf = Vec::with_capacity(k);
    let mut tuple = Vec::with_capacity(k);
    // T1 = (x, y-edge)
    for x in 0..s {
        for e in &sub {
            shift(e, s, &mut buf);
            tuple.clear();
            tuple.push(x);
            tuple.extend_from_slice(&buf);
            f(&tuple, EdgeTag::T1);
        }
    }
    // T2 = (z-edge, x)
    for e in &sub {
        shift(e, 2 * s, &mut buf);
        for x in 0..s {
            tuple.clear();
            tuple.extend_from_slice(&buf);
            tuple.push(x);
            f(&tuple, EdgeTag::T2);
        }
    }
    // T3 = (y-edge, z)
    for e in &sub {
        shift(e, s, &mut buf);
        for z in 2 * s..3 * s {
            tuple.clear();
            tuple.extend_from_slice(&buf);
            tuple.push(z);
            f(&tuple, EdgeTag::T3);
        }
    }
    // T4 = (x-edge, y)
    for e in &sub {
        for y in s..2 * s {
            tuple.clear();
            tuple.extend_from_slice(e);
            tuple.push(y);
            f(&tuple, EdgeTag::T4);
        }
    }
    Ok(())
}

/// Finds an edge of G_k consistent with the given order by replaying the
/// induction: an x below all of Y yields a T1 edge, an x above all of Z a T2
/// edge; otherwise x0 = max X has some z above it and either all of Y sits
/// below z_{x0} (T3) or some y tops it (T4).
pub fn find_consistent_edge_gk(
    layout: &GkLayout,
    order: &LinearOrder,
) -> Result<OrientedEdge, ConstructError> {
    if layout.k < 2 {
        return Err(ConstructError::KTooSmall(layout.k));
    }
    let expected = layout.offset + layout.vertex_count();
    let ok = if layout.offset == 0 {
        order.len() == expected
    } else {
        order.len() >= expected
    };
    if !ok {
        return Err(ConstructError::OrderLengthMismatch {
            k: layout.k,
            expected,
            got: order.len(),
        });
    }
    let tuple = find_rec(*layout, order);
    let edge = OrientedEdge::new(tuple).expect("replay tuples are valid edges");
    if !is_consistent(&edge, order) {
        return Err(ConstructError::ProofReplayFailed(layout.k));
    }
    Ok(edge)
}

fn find_rec(layout: GkLayout, order: &LinearOrder) -> Vec<Vertex> {
    if layout.k == 2 {
        // The cycle edge leaving the block's order-least vertex is always
        // consistent: its head is below everything else in the block.
        let o = layout.offset;
        let least = (o..o + 3).min_by_key(|&v| order.rank_of(v)).unwrap();
        let next = o + (least - o + 1) % 3;
        return vec![least, next];
    }
    let rank = |v: Vertex| order.rank_of(v);
    let min_by_rank = |r: std::ops::Range<usize>| r.min_by_key(|&v| rank(v)).unwrap();
    let max_by_rank = |r: std::ops::Range<usize>| r.max_by_key(|&v| rank(v)).unwrap();

    let x_min = min_by_rank(layout.x());
    let y_min = min_by_rank(layout.y());
    // Case 1: some x below all of Y; take the <-least x.
    if rank(x_min) < rank(y_min) {
        let mut e = vec![x_min];
        e.extend(find_rec(layout.sub(1), order));
        return e;
    }
    let x_max = max_by_rank(layout.x());
    let z_max = max_by_rank(layout.z());
    // Case 2: some x above all of Z; take the <-greatest x.
    if rank(x_max) > rank(z_max) {
        let mut e = find_rec(layout.sub(2), order);
        e.push(x_max);
        return e;
    }
    // Now x0 = max X has an element of Z above it; z_{x0} is the <-least such.
    let x0 = x_max;
    let z_x0 = layout
        .z()
        .filter(|&z| rank(z) > rank(x0))
        .min_by_key(|&z| rank(z))
        .expect("case 2 failed, so max Z is above x0");
    let y_max = max_by_rank(layout.y());
    if rank(y_max) < rank(z_x0) {
        // Case 3: all of Y below z_{x0}.
        let mut e = find_rec(layout.sub(1), order);
        e.push(z_x0);
        e
    } else {
        // Case 4: the <-greatest y tops z_{x0}, hence all of X.
        let mut e = find_rec(layout.sub(0), order);
        e.push(y_max);
        e
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decide::has_property_o;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn g2_is_the_oriented_3_cycle() {
        let g = build_gk(2).unwrap();
        assert_eq!(g.graph.n(), 3);
        assert_eq!(g.graph.edges().len(), 3);
        let tuples: Vec<&[Vertex]> = g.graph.edges().iter().map(|e| e.vertices()).collect();
        assert_eq!(tuples, vec![&[0, 1][..], &[1, 2], &[2, 0]]);
    }

    #[test]
    fn g3_and_g4_sizes() {
        let g3 = build_gk(3).unwrap();
        assert_eq!((g3.graph.n(), g3.graph.edges().len()), (9, 36));
        let g4 = build_gk(4).unwrap();
        assert_eq!((g4.graph.n(), g4.graph.edges().len()), (27, 1296));
    }

    #[test]
    fn size_identities_and_recurrence() {
        for k in 2..=6 {
            assert_eq!(gk_vertex_count(k), BigUint::from(3u32).pow(k as u32 - 1));
        }
        assert_eq!(gk_edge_count(2), BigUint::from(3u32));
        assert_eq!(gk_edge_count(3), BigUint::from(36u32));
        assert_eq!(gk_edge_count(4), BigUint::from(1296u32));
        for k in 2..=8 {
            // |E_{k+1}| = 4 |E_k| |V_k|
            assert_eq!(
                gk_edge_count(k + 1),
                BigUint::from(4u32) * gk_edge_count(k) * gk_vertex_count(k)
            );
        }
    }

    #[test]
    fn built_sizes_match_closed_form() {
        for k in 2..=5 {
            let g = build_gk(k).unwrap();
            assert_eq!(BigUint::from(g.graph.n()), gk_vertex_count(k));
            assert_eq!(BigUint::from(g.graph.edges().len()), gk_edge_count(k));
        }
    }

    #[test]
    fn tag_partition_counts() {
        for k in 3..=5 {
            let g = build_gk(k).unwrap();
            let count = |t: EdgeTag| g.tags.iter().filter(|&&x| x == t).count();
            let expected: usize = (gk_edge_count(k - 1) * gk_vertex_count(k - 1))
                .try_into()
                .unwrap();
            for t in [EdgeTag::T1, EdgeTag::T2, EdgeTag::T3, EdgeTag::T4] {
                let c: usize = count(t);
                assert_eq!(c, expected, "k={k} tag={t:?}");
            }
            assert_eq!(count(EdgeTag::Base), 0);
        }
    }

    #[test]
    fn guards() {
        assert!(build_gk(1).is_err());
        assert!(build_gk(6).is_err());
        assert!(for_each_edge(7, &mut |_, _| ()).is_err());
    }

    #[test]
    fn streaming_matches_eager_at_k4() {
        let g = build_gk(4).unwrap();
        let mut streamed = Vec::new();
        for_each_edge(4, &mut |t, tag| streamed.push((t.to_vec(), tag))).unwrap();
        assert_eq!(streamed.len(), g.graph.edges().len());
        for (i, (t, tag)) in streamed.iter().enumerate() {
            assert_eq!(t.as_slice(), g.graph.edges()[i].vertices());
            assert_eq!(*tag, g.tags[i]);
        }
    }

    #[test]
    fn g2_and_g3_have_property_o_exhaustively() {
        assert!(has_property_o(&build_gk(2).unwrap().graph));
        assert!(has_property_o(&build_gk(3).unwrap().graph));
    }

    #[test]
    fn finder_base_case_example() {
        // Order 2 < 0 < 1 on G_2: the consistent cycle edge is (2, 0).
        let order = LinearOrder::from_perm(vec![2, 0, 1]).unwrap();
        let e = find_consistent_edge_gk(&GkLayout::root(2), &order).unwrap();
        assert_eq!(e.vertices(), &[2, 0]);
    }

    #[test]
    fn finder_natural_order_k3() {
        let order = LinearOrder::natural(9);
        let e = find_consistent_edge_gk(&GkLayout::root(3), &order).unwrap();
        assert!(is_consistent(&e, &order));
    }

    #[test]
    fn finder_returns_actual_gk_edges() {
        // The replayed edge must be a member of E_k, not merely consistent.
        let g = build_gk(4).unwrap();
        let edge_set: std::collections::HashSet<Vec<Vertex>> = g
            .graph
            .edges()
            .iter()
            .map(|e| e.vertices().to_vec())
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..200 {
            let mut perm: Vec<Vertex> = (0..27).collect();
            perm.shuffle(&mut rng);
            let order = LinearOrder::from_perm(perm).unwrap();
            let e = find_consistent_edge_gk(&g.layout, &order).unwrap();
            assert!(edge_set.contains(e.vertices()));
        }
    }

    #[test]
    fn finder_randomized_k4() {
        let layout = GkLayout::root(4);
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..1000 {
            let mut perm: Vec<Vertex> = (0..27).collect();
            perm.shuffle(&mut rng);
            let order = LinearOrder::from_perm(perm).unwrap();
            let e = find_consistent_edge_gk(&layout, &order).unwrap();
            assert!(is_consistent(&e, &order));
        }
    }

    #[test]
    fn order_length_mismatch_rejected() {
        let order = LinearOrder::natural(5);
        assert!(find_consistent_edge_gk(&GkLayout::root(3), &order).is_err());
    }
}
