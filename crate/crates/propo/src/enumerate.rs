//! Exhaustive, partitionable enumeration of small k-tournaments and small
//! edge families.
//!
//! Tournament space is totally ordered by a mixed-radix index: the subset
//! with colex position i contributes a digit in base k! with weight (k!)^i.
//! Partitions are index intervals, so censuses are deterministic, resumable
//! and embarrassingly parallel.
//!
//! For n! <= 128 the census decides Property O with a precomputed
//! order-coverage kernel: each oriented k-set is mapped to the bitmask of
//! linear orders it is consistent with, and a tournament has Property O
//! exactly when the union of its C(n,k) masks covers all n! orders. This is
//! the naive all-orders decision in disguise, evaluated with two machine
//! words per tournament; it is cross-validated against the DFS decider in
//! tests. Larger n falls back to a cheap witness battery plus the full DFS.

use crate::core::{
    binomial_u64, colex_unrank, edges_compatible, factorial_u64, is_consistent, LinearOrder,
    OrientedEdge, OrientedHypergraph, Tournament, Vertex,
};
use crate::decide::has_property_o;
use num_bigint::BigUint;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::time::Instant;

#[derive(thiserror::Error, Debug)]
pub enum EnumerateError {
    #[error("census range of {range} tournaments exceeds the per-call guard ({guard}); full space is {space} — supply a partition")]
    RangeTooLarge {
        range: BigUint,
        space: BigUint,
        guard: u128,
    },
    #[error("partition {start}..{end} is not a valid interval inside 0..{space}")]
    BadPartition { start: u128, end: u128, space: BigUint },
    #[error("canonical_form guard: n = {n} exceeds {guard}")]
    CanonicalGuard { n: usize, guard: usize },
    #[error("tight_family_search guard: {candidates} oriented edges exceeds {guard}")]
    TightGuard { candidates: u64, guard: u64 },
    #[error("need 2 <= k <= n, got k = {k}, n = {n}")]
    BadUniformity { k: usize, n: usize },
    #[error("checkpoint config hash mismatch: expected {expected}, found {found}")]
    CheckpointMismatch { expected: String, found: String },
}

// ---------------------------------------------------------------------------
// Order-coverage kernel
// ---------------------------------------------------------------------------

const MASK_WORDS: usize = 2;
type OrderMask = [u64; MASK_WORDS];

fn mask_or(a: OrderMask, b: OrderMask) -> OrderMask {
    [a[0] | b[0], a[1] | b[1]]
}

/// Precomputed consistency masks for all oriented k-sets on [n], n! <= 128.
pub struct OrderMaskKernel {
    n: usize,
    k: usize,
    kf: u64,
    subsets: usize,
    masks: Vec<OrderMask>, // indexed by subset * k! + orientation
    full: OrderMask,
}

impl OrderMaskKernel {
    pub fn supports(n: usize) -> bool {
        factorial_u64(n) <= 128
    }

    pub fn new(n: usize, k: usize) -> Self {
        assert!(Self::supports(n), "kernel needs n! <= 128");
        let orders = all_orders(n);
        let kf = factorial_u64(k);
        let subsets = binomial_u64(n, k) as usize;
        let mut masks = vec![[0u64; MASK_WORDS]; subsets * kf as usize];
        for s in 0..subsets {
            let sorted = colex_unrank(s as u64, n, k);
            for p in 0..kf {
                let perm = crate::core::perm_lex_unrank(p, k);
                let tuple: Vec<Vertex> = perm.iter().map(|&i| sorted[i]).collect();
                let edge = OrientedEdge::new(tuple).unwrap();
                let m = &mut masks[s * kf as usize + p as usize];
                for (oi, o) in orders.iter().enumerate() {
                    if is_consistent(&edge, o) {
                        m[oi / 64] |= 1u64 << (oi % 64);
                    }
                }
            }
        }
        let mut full = [0u64; MASK_WORDS];
        for oi in 0..orders.len() {
            full[oi / 64] |= 1u64 << (oi % 64);
        }
        OrderMaskKernel {
            n,
            k,
            kf,
            subsets,
            masks,
            full,
        }
    }

    fn mask(&self, subset: usize, orientation: u64) -> OrderMask {
        self.masks[subset * self.kf as usize + orientation as usize]
    }

    /// Exact Property O decision for one tournament.
    pub fn decide(&self, t: &Tournament) -> bool {
        assert_eq!((t.n(), t.k()), (self.n, self.k));
        let mut acc = [0u64; MASK_WORDS];
        for (s, &p) in t.orientation().iter().enumerate() {
            acc = mask_or(acc, self.mask(s, p));
        }
        acc == self.full
    }

    /// Counts Property-O tournaments with mixed-radix index in [lo, hi).
    /// Digits are consumed from the most significant subset downward; once
    /// the accumulated mask covers every order, all completions are counted
    /// at once.
    pub fn count_interval(&self, lo: u128, hi: u128) -> u64 {
        if lo >= hi {
            return 0;
        }
        self.count_rec(self.subsets, lo, hi, [0u64; MASK_WORDS])
    }

    fn count_rec(&self, rem: usize, lo: u128, hi: u128, acc: OrderMask) -> u64 {
        if acc == self.full {
            return (hi - lo) as u64;
        }
        if rem == 0 {
            return 0;
        }
        let w = (self.kf as u128).pow(rem as u32 - 1);
        let first = (lo / w) as u64;
        let last = ((hi - 1) / w) as u64;
        let mut total = 0;
        for d in first..=last {
            let base = d as u128 * w;
            let child_lo = lo.max(base) - base;
            let child_hi = hi.min(base + w) - base;
            total += self.count_rec(
                rem - 1,
                child_lo,
                child_hi,
                mask_or(acc, self.mask(rem - 1, d)),
            );
        }
        total
    }

    /// Property O decision for an arbitrary sub-family given as (subset
    /// index, orientation) pairs: does the union of masks cover all orders?
    pub fn family_covers(&self, family: &[(usize, u64)]) -> bool {
        let mut acc = [0u64; MASK_WORDS];
        for &(s, p) in family {
            acc = mask_or(acc, self.mask(s, p));
        }
        acc == self.full
    }
}

fn all_orders(n: usize) -> Vec<LinearOrder> {
    let mut out = Vec::with_capacity(factorial_u64(n) as usize);
    let mut perm: Vec<Vertex> = (0..n).collect();
    heap_rec(&mut perm, n, &mut out);
    out
}

fn heap_rec(perm: &mut Vec<Vertex>, m: usize, out: &mut Vec<LinearOrder>) {
    if m == 1 {
        out.push(LinearOrder::from_perm(perm.clone()).unwrap());
        return;
    }
    for i in 0..m {
        heap_rec(perm, m - 1, out);
        if m % 2 == 0 {
            perm.swap(i, m - 1);
        } else {
            perm.swap(0, m - 1);
        }
    }
}

// ---------------------------------------------------------------------------
// Census
// ---------------------------------------------------------------------------

pub const CENSUS_RANGE_GUARD: u128 = 1 << 33;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CensusReport {
    pub n: usize,
    pub k: usize,
    pub start_index: u128,
    pub end_index: u128,
    pub total_enumerated: u128,
    pub property_o_count: u64,
    pub canonical_filter_used: bool,
    pub wall_time_secs: f64,
}

impl CensusReport {
    /// Merging is associative and commutative over disjoint intervals.
    pub fn merge(mut self, other: &CensusReport) -> CensusReport {
        assert_eq!((self.n, self.k), (other.n, other.k));
        self.start_index = self.start_index.min(other.start_index);
        self.end_index = self.end_index.max(other.end_index);
        self.total_enumerated += other.total_enumerated;
        self.property_o_count += other.property_o_count;
        self.wall_time_secs += other.wall_time_secs;
        self
    }
}

/// Size of the whole tournament space, (k!)^C(n,k).
pub fn tournament_space_size(n: usize, k: usize) -> BigUint {
    BigUint::from(factorial_u64(k)).pow(binomial_u64(n, k) as u32)
}

/// Counts Property-O tournaments over the mixed-radix index interval
/// `partition` (the full space when None).
pub fn tournament_census(
    n: usize,
    k: usize,
    partition: Option<(u128, u128)>,
    canonical_only: bool,
    jobs: usize,
) -> Result<CensusReport, EnumerateError> {
    if k < 2 || k > n {
        return Err(EnumerateError::BadUniformity { k, n });
    }
    let space = tournament_space_size(n, k);
    let (start, end) = match partition {
        Some((a, b)) => {
            if a > b || BigUint::from(b) > space {
                return Err(EnumerateError::BadPartition { start: a, end: b, space });
            }
            (a, b)
        }
        None => {
            let total: u128 = (&space).try_into().map_err(|_| EnumerateError::RangeTooLarge {
                range: space.clone(),
                space: space.clone(),
                guard: CENSUS_RANGE_GUARD,
            })?;
            (0, total)
        }
    };
    let range = end - start;
    if range > CENSUS_RANGE_GUARD {
        return Err(EnumerateError::RangeTooLarge {
            range: BigUint::from(range),
            space,
            guard: CENSUS_RANGE_GUARD,
        });
    }

    let t0 = Instant::now();
    let jobs = jobs.max(1);
    let chunk = range.div_ceil(jobs as u128).max(1);
    let bounds: Vec<(u128, u128)> = (0..jobs as u128)
        .map(|j| (start + (j * chunk).min(range), start + ((j + 1) * chunk).min(range)))
        .filter(|(a, b)| a < b)
        .collect();

    let count: u64 = std::thread::scope(|scope| {
        let handles: Vec<_> = bounds
            .iter()
            .map(|&(lo, hi)| scope.spawn(move || census_chunk(n, k, lo, hi, canonical_only)))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).sum()
    });

    Ok(CensusReport {
        n,
        k,
        start_index: start,
        end_index: end,
        total_enumerated: range,
        property_o_count: count,
        canonical_filter_used: canonical_only,
        wall_time_secs: t0.elapsed().as_secs_f64(),
    })
}

fn census_chunk(n: usize, k: usize, lo: u128, hi: u128, canonical_only: bool) -> u64 {
    if OrderMaskKernel::supports(n) && !canonical_only {
        return OrderMaskKernel::new(n, k).count_interval(lo, hi);
    }
    let kernel = OrderMaskKernel::supports(n).then(|| OrderMaskKernel::new(n, k));
    let battery = witness_battery(n, k);
    let mut count = 0;
    for idx in lo..hi {
        let t = Tournament::from_index(idx, n, k).unwrap();
        if canonical_only && !is_canonical_tournament(&t) {
            continue;
        }
        let has_o = match &kernel {
            Some(kn) => kn.decide(&t),
            None => decide_with_battery(&t, &battery),
        };
        if has_o {
            count += 1;
        }
    }
    count
}

/// Cheap candidate witness orders tried before the full DFS: the reversed
/// natural order and a fixed battery of seeded shuffles. Almost all small
/// tournaments fail Property O, so one of these usually certifies failure.
fn witness_battery(n: usize, k: usize) -> Vec<LinearOrder> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e3779b9 ^ ((n as u64) << 8) ^ k as u64);
    let mut battery = vec![LinearOrder::from_perm((0..n).rev().collect()).unwrap()];
    for _ in 0..8 {
        let mut perm: Vec<Vertex> = (0..n).collect();
        perm.shuffle(&mut rng);
        battery.push(LinearOrder::from_perm(perm).unwrap());
    }
    battery
}

fn decide_with_battery(t: &Tournament, battery: &[LinearOrder]) -> bool {
    let h = t.to_hypergraph();
    for order in battery {
        if h.edges().iter().all(|e| !is_consistent(e, order)) {
            return false;
        }
    }
    has_property_o(&h)
}

/// True iff the tournament's index is minimal over its relabeling orbit.
pub fn is_canonical_tournament(t: &Tournament) -> bool {
    let idx = t.index();
    let mut sigma: Vec<Vertex> = (0..t.n()).collect();
    loop {
        if t.relabel(&sigma).unwrap().index() < idx {
            return false;
        }
        if !next_permutation(&mut sigma) {
            return true;
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

/// Resumable census state. Resuming under a different configuration hash is
/// refused by [`validate_checkpoint`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CensusCheckpoint {
    pub config_hash: String,
    pub next_index: u128,
    pub property_o_count: u64,
}

pub fn validate_checkpoint(
    cp: &CensusCheckpoint,
    expected_hash: &str,
) -> Result<(), EnumerateError> {
    if cp.config_hash != expected_hash {
        return Err(EnumerateError::CheckpointMismatch {
            expected: expected_hash.to_string(),
            found: cp.config_hash.clone(),
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Canonical form
// ---------------------------------------------------------------------------

pub const CANONICAL_GUARD: usize = 8;

/// Lexicographically minimal relabeling of a hypergraph: idempotent and
/// constant on relabeling orbits. Guarded by n! enumeration cost.
pub fn canonical_form(h: &OrientedHypergraph) -> Result<OrientedHypergraph, EnumerateError> {
    if h.n() > CANONICAL_GUARD {
        return Err(EnumerateError::CanonicalGuard {
            n: h.n(),
            guard: CANONICAL_GUARD,
        });
    }
    let mut sigma: Vec<Vertex> = (0..h.n()).collect();
    let mut best: Option<Vec<Vec<Vertex>>> = None;
    loop {
        let mut key: Vec<Vec<Vertex>> = h
            .relabel(&sigma)
            .unwrap()
            .edges()
            .iter()
            .map(|e| e.vertices().to_vec())
            .collect();
        key.sort();
        if best.as_ref().is_none_or(|b| key < *b) {
            best = Some(key);
        }
        if !next_permutation(&mut sigma) {
            break;
        }
    }
    let edges = best
        .unwrap()
        .into_iter()
        .map(|t| OrientedEdge::new(t).unwrap())
        .collect();
    Ok(OrientedHypergraph::new(h.n(), h.k(), edges).unwrap())
}

// ---------------------------------------------------------------------------
// Minimum-edge search
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub enum MinEdgesResult {
    /// Minimum edge count found, with a witnessing family.
    Minimum(usize, OrientedHypergraph),
    /// No family with at most max_edges edges on <= n vertices has Property O.
    None,
    /// Budget exhausted; the checkpoint allows resuming.
    Indeterminate(MinEdgesCheckpoint),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MinEdgesCheckpoint {
    pub config_hash: String,
    pub edge_count: usize,
    pub next_system_rank: u64,
}

/// Finds the minimum edge count of an oriented k-graph on <= n vertices with
/// Property O, trying counts upward from the k! lower bound. Underlying
/// set-systems are enumerated first (deduplicated up to relabeling when n is
/// within the canonical guard), then every orientation of each system.
pub fn min_edges_search(
    n: usize,
    k: usize,
    max_edges: usize,
    budget_seconds: Option<f64>,
    config_hash: &str,
    resume: Option<&MinEdgesCheckpoint>,
) -> Result<MinEdgesResult, EnumerateError> {
    if k < 2 || k > n {
        return Err(EnumerateError::BadUniformity { k, n });
    }
    if let Some(cp) = resume {
        if cp.config_hash != config_hash {
            return Err(EnumerateError::CheckpointMismatch {
                expected: config_hash.to_string(),
                found: cp.config_hash.clone(),
            });
        }
    }
    let deadline = budget_seconds.map(|s| Instant::now() + std::time::Duration::from_secs_f64(s));
    let subsets = binomial_u64(n, k) as usize;
    let kernel = OrderMaskKernel::supports(n).then(|| OrderMaskKernel::new(n, k));

    let start_m = factorial_u64(k) as usize;
    let (resume_m, resume_rank) = match resume {
        Some(cp) => (cp.edge_count, cp.next_system_rank),
        None => (start_m, 0),
    };

    for m in start_m..=max_edges {
        if m < resume_m || m > subsets {
            continue;
        }
        let skip_ranks = if m == resume_m { resume_rank } else { 0 };
        let mut seen = std::collections::HashSet::new();
        let mut rank: u64 = 0;
        let mut combo: Vec<usize> = (0..m).collect();
        loop {
            if rank >= skip_ranks {
                if let Some(d) = deadline {
                    if Instant::now() >= d {
                        return Ok(MinEdgesResult::Indeterminate(MinEdgesCheckpoint {
                            config_hash: config_hash.to_string(),
                            edge_count: m,
                            next_system_rank: rank,
                        }));
                    }
                }
                if system_is_new(&combo, n, k, &mut seen) {
                    if let Some(found) = search_orientations(&combo, n, k, kernel.as_ref()) {
                        return Ok(MinEdgesResult::Minimum(m, found));
                    }
                }
            }
            rank += 1;
            if !next_combination(&mut combo, subsets) {
                break;
            }
        }
    }
    Ok(MinEdgesResult::None)
}

fn next_combination(combo: &mut [usize], universe: usize) -> bool {
    let m = combo.len();
    if m == 0 {
        return false;
    }
    let mut i = m;
    while i > 0 {
        i -= 1;
        if combo[i] < universe - (m - i) {
            combo[i] += 1;
            for j in i + 1..m {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Dedup key for a set-system: canonical form of the ascending-tuple graph
/// when n allows it, the raw system otherwise.
fn system_is_new(
    combo: &[usize],
    n: usize,
    k: usize,
    seen: &mut std::collections::HashSet<String>,
) -> bool {
    let edges: Vec<OrientedEdge> = combo
        .iter()
        .map(|&s| OrientedEdge::new(colex_unrank(s as u64, n, k)).unwrap())
        .collect();
    let h = OrientedHypergraph::new(n, k, edges).unwrap();
    let key = match canonical_form(&h) {
        Ok(c) => crate::core::serialize_hypergraph(&c),
        Err(_) => crate::core::serialize_hypergraph(&h),
    };
    seen.insert(key)
}

/// Enumerates every orientation assignment of the chosen subsets; returns a
/// verified Property-O family if one exists.
fn search_orientations(
    combo: &[usize],
    n: usize,
    k: usize,
    kernel: Option<&OrderMaskKernel>,
) -> Option<OrientedHypergraph> {
    let kf = factorial_u64(k);
    let mut digits = vec![0u64; combo.len()];
    loop {
        let covers = match kernel {
            Some(kn) => {
                let family: Vec<(usize, u64)> = combo
                    .iter()
                    .zip(&digits)
                    .map(|(&s, &p)| (s, p))
                    .collect();
                kn.family_covers(&family)
            }
            None => has_property_o(&family_graph(combo, &digits, n, k)),
        };
        if covers {
            let h = family_graph(combo, &digits, n, k);
            // Independent re-verification before reporting.
            if has_property_o(&h) {
                return Some(h);
            }
        }
        // Increment the mixed-radix digit vector.
        let mut i = 0;
        loop {
            if i == digits.len() {
                return None;
            }
            digits[i] += 1;
            if digits[i] < kf {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

fn family_graph(combo: &[usize], digits: &[u64], n: usize, k: usize) -> OrientedHypergraph {
    let edges: Vec<OrientedEdge> = combo
        .iter()
        .zip(digits)
        .map(|(&s, &p)| {
            let sorted = colex_unrank(s as u64, n, k);
            let perm = crate::core::perm_lex_unrank(p, k);
            OrientedEdge::new(perm.into_iter().map(|i| sorted[i]).collect()).unwrap()
        })
        .collect();
    OrientedHypergraph::new(n, k, edges).unwrap()
}

// ---------------------------------------------------------------------------
// Tight families
// ---------------------------------------------------------------------------

pub const TIGHT_GUARD: u64 = 5000;

/// Searches for a Property-O family with exactly k! edges. The counting
/// argument forces every order to be consistent with exactly one edge, so
/// all edge pairs must be pairwise incompatible; only families passing that
/// filter are decided exactly.
pub fn tight_family_search(
    n: usize,
    k: usize,
) -> Result<Option<OrientedHypergraph>, EnumerateError> {
    if k < 2 || k > n {
        return Err(EnumerateError::BadUniformity { k, n });
    }
    let candidates = binomial_u64(n, k) * factorial_u64(k);
    if candidates > TIGHT_GUARD {
        return Err(EnumerateError::TightGuard {
            candidates,
            guard: TIGHT_GUARD,
        });
    }
    let target = factorial_u64(k) as usize;
    if (binomial_u64(n, k) as usize) < target {
        return Ok(None); // not enough distinct underlying sets
    }
    let kf = factorial_u64(k) as usize;
    let nodes: Vec<OrientedEdge> = (0..binomial_u64(n, k))
        .flat_map(|s| {
            let sorted = colex_unrank(s, n, k);
            (0..kf).map(move |p| {
                let perm = crate::core::perm_lex_unrank(p as u64, k);
                OrientedEdge::new(perm.into_iter().map(|i| sorted[i]).collect()).unwrap()
            })
        })
        .collect();
    let sets: Vec<Vec<Vertex>> = nodes.iter().map(|e| e.underlying()).collect();
    let m = nodes.len();
    // coexist[a][b]: distinct underlying sets and mutually incompatible.
    let mut coexist = vec![vec![false; m]; m];
    for a in 0..m {
        for b in a + 1..m {
            let ok = sets[a] != sets[b] && !edges_compatible(&nodes[a], &nodes[b]);
            coexist[a][b] = ok;
            coexist[b][a] = ok;
        }
    }
    let mut chosen: Vec<usize> = Vec::with_capacity(target);
    if let Some(h) = tight_extend(&nodes, &coexist, &mut chosen, 0, target, n, k) {
        return Ok(Some(h));
    }
    Ok(None)
}

fn tight_extend(
    nodes: &[OrientedEdge],
    coexist: &[Vec<bool>],
    chosen: &mut Vec<usize>,
    from: usize,
    target: usize,
    n: usize,
    k: usize,
) -> Option<OrientedHypergraph> {
    if chosen.len() == target {
        let edges: Vec<OrientedEdge> = chosen.iter().map(|&i| nodes[i].clone()).collect();
        let h = OrientedHypergraph::new(n, k, edges).unwrap();
        // Pairwise incompatibility is necessary, not sufficient: decide exactly.
        if has_property_o(&h) {
            return Some(h);
        }
        return None;
    }
    if nodes.len() - from < target - chosen.len() {
        return None;
    }
    for i in from..nodes.len() {
        if chosen.iter().all(|&j| coexist[j][i]) {
            chosen.push(i);
            if let Some(h) = tight_extend(nodes, coexist, chosen, i + 1, target, n, k) {
                return Some(h);
            }
            chosen.pop();
        }
    }
    None
}
