//! Domain model: oriented k-uniform hypergraphs, linear orders, k-tournaments,
//! the consistency predicate, and the text file format.
//!
//! Vertices are dense 0-based integers. An oriented edge is an ordered tuple of
//! k distinct vertices; a hypergraph carries at most one tuple per underlying
//! k-element set. All types are immutable after construction and every
//! operation here is a pure function.

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt::Write as _;

pub type Vertex = usize;

#[derive(thiserror::Error, Debug)]
pub enum CoreError {
    #[error("edge arity must be at least 2, got {0}")]
    ArityTooSmall(usize),
    #[error("edge {0:?} has a repeated vertex")]
    RepeatedVertex(Vec<Vertex>),
    #[error("edge {edge:?} has arity {got}, expected {expected}")]
    WrongArity {
        edge: Vec<Vertex>,
        expected: usize,
        got: usize,
    },
    #[error("vertex id {id} out of range for n = {n}")]
    VertexOutOfRange { id: Vertex, n: usize },
    #[error("two edges share the underlying set {0:?}")]
    DuplicateUnderlyingSet(Vec<Vertex>),
    #[error("{0:?} is not a permutation of 0..{1}")]
    NotAPermutation(Vec<Vertex>, usize),
    #[error("need 2 <= k <= n, got k = {k}, n = {n}")]
    BadUniformity { k: usize, n: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("tournament needs one orientation per k-subset: expected {expected} entries, got {got}")]
    IncompleteTournament { expected: u64, got: usize },
    #[error("orientation index {index} out of range for k = {k} (must be < k!)")]
    OrientationOutOfRange { index: u64, k: usize },
}

pub type Result<T> = std::result::Result<T, CoreError>;

// ---------------------------------------------------------------------------
// Oriented edges and hypergraphs
// ---------------------------------------------------------------------------

/// An ordered k-tuple of distinct vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrientedEdge(Vec<Vertex>);

impl OrientedEdge {
    pub fn new(tuple: Vec<Vertex>) -> Result<Self> {
        if tuple.len() < 2 {
            return Err(CoreError::ArityTooSmall(tuple.len()));
        }
        let mut seen = tuple.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(CoreError::RepeatedVertex(tuple));
        }
        Ok(OrientedEdge(tuple))
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    /// The underlying unordered set, as a sorted vector.
    pub fn underlying(&self) -> Vec<Vertex> {
        let mut s = self.0.clone();
        s.sort_unstable();
        s
    }
}

/// An oriented k-uniform hypergraph on vertex set {0, ..., n-1}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrientedHypergraph {
    n: usize,
    k: usize,
    edges: Vec<OrientedEdge>,
}

impl OrientedHypergraph {
    /// Validates arity, vertex range and uniqueness of underlying sets.
    pub fn new(n: usize, k: usize, edges: Vec<OrientedEdge>) -> Result<Self> {
        if k < 2 || k > n {
            return Err(CoreError::BadUniformity { k, n });
        }
        let mut sets = HashSet::with_capacity(edges.len());
        for e in &edges {
            if e.arity() != k {
                return Err(CoreError::WrongArity {
                    edge: e.vertices().to_vec(),
                    expected: k,
                    got: e.arity(),
                });
            }
            for &v in e.vertices() {
                if v >= n {
                    return Err(CoreError::VertexOutOfRange { id: v, n });
                }
            }
            if !sets.insert(e.underlying()) {
                return Err(CoreError::DuplicateUnderlyingSet(e.underlying()));
            }
        }
        Ok(OrientedHypergraph { n, k, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> &[OrientedEdge] {
        &self.edges
    }

    /// Applies a relabeling permutation to every tuple entry.
    pub fn relabel(&self, sigma: &[Vertex]) -> Result<Self> {
        if !is_permutation(sigma, self.n) {
            return Err(CoreError::NotAPermutation(sigma.to_vec(), self.n));
        }
        let edges = self
            .edges
            .iter()
            .map(|e| OrientedEdge(e.vertices().iter().map(|&v| sigma[v]).collect()))
            .collect();
        OrientedHypergraph::new(self.n, self.k, edges)
    }
}

fn is_permutation(sigma: &[Vertex], n: usize) -> bool {
    if sigma.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &v in sigma {
        if v >= n || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    true
}

// ---------------------------------------------------------------------------
// Linear orders and consistency
// ---------------------------------------------------------------------------

/// A linear order of {0, ..., n-1}. `perm[i]` is the i-th smallest vertex;
/// the inverse (vertex -> rank) array is precomputed for O(1) consistency checks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinearOrder {
    perm: Vec<Vertex>,
    rank: Vec<usize>,
}

impl LinearOrder {
    pub fn from_perm(perm: Vec<Vertex>) -> Result<Self> {
        let n = perm.len();
        if !is_permutation(&perm, n) {
            return Err(CoreError::NotAPermutation(perm, n));
        }
        let mut rank = vec![0; n];
        for (i, &v) in perm.iter().enumerate() {
            rank[v] = i;
        }
        Ok(LinearOrder { perm, rank })
    }

    /// The identity order 0 < 1 < ... < n-1.
    pub fn natural(n: usize) -> Self {
        let perm: Vec<Vertex> = (0..n).collect();
        let rank = perm.clone();
        LinearOrder { perm, rank }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn perm(&self) -> &[Vertex] {
        &self.perm
    }

    pub fn rank_of(&self, v: Vertex) -> usize {
        self.rank[v]
    }
}

/// True iff the tuple entries have strictly increasing ranks under the order.
///
/// All edge vertices must lie below the order's length.
pub fn is_consistent(edge: &OrientedEdge, order: &LinearOrder) -> bool {
    edge.vertices()
        .windows(2)
        .all(|w| order.rank_of(w[0]) < order.rank_of(w[1]))
}

/// Number of orders on [n] consistent with any fixed oriented k-edge: n!/k!.
pub fn consistent_order_count(n: usize, k: usize) -> Result<BigUint> {
    if k < 2 || k > n {
        return Err(CoreError::BadUniformity { k, n });
    }
    let mut acc = BigUint::one();
    for i in (k + 1)..=n {
        acc *= BigUint::from(i);
    }
    Ok(acc)
}

/// True iff some linear order is consistent with both edges simultaneously,
/// i.e. the union of the two chain relations is acyclic.
pub fn edges_compatible(e1: &OrientedEdge, e2: &OrientedEdge) -> bool {
    // Map the union of the two vertex sets to a dense range.
    let mut verts: Vec<Vertex> = e1.vertices().iter().chain(e2.vertices()).copied().collect();
    verts.sort_unstable();
    verts.dedup();
    let idx = |v: Vertex| verts.binary_search(&v).unwrap();
    let m = verts.len();
    let mut adj = vec![Vec::new(); m];
    for e in [e1, e2] {
        for w in e.vertices().windows(2) {
            adj[idx(w[0])].push(idx(w[1]));
        }
    }
    // Kahn's algorithm: acyclic iff all nodes drain.
    let mut indeg = vec![0usize; m];
    for u in 0..m {
        for &v in &adj[u] {
            indeg[v] += 1;
        }
    }
    let mut queue: Vec<usize> = (0..m).filter(|&u| indeg[u] == 0).collect();
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
    drained == m
}

// ---------------------------------------------------------------------------
// Small combinatorial helpers shared across the crate
// ---------------------------------------------------------------------------

/// C(n, k) as u64; panics on overflow (callers keep n small).
pub fn binomial_u64(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc
            .checked_mul((n - i) as u64)
            .expect("binomial_u64 overflow")
            / (i as u64 + 1);
    }
    acc
}

pub fn factorial_u64(k: usize) -> u64 {
    (1..=k as u64).product()
}

/// The m-th k-subset of [n] in colexicographic order, sorted ascending.
pub fn colex_unrank(mut m: u64, n: usize, k: usize) -> Vec<Vertex> {
    let mut out = vec![0; k];
    let mut top = n;
    for i in (1..=k).rev() {
        // Largest a with C(a, i) <= m.
        let mut a = i - 1;
        while a + 1 < top && binomial_u64(a + 1, i) <= m {
            a += 1;
        }
        m -= binomial_u64(a, i);
        out[i - 1] = a;
        top = a;
    }
    out
}

/// Colexicographic rank of a sorted k-subset.
pub fn colex_rank(subset: &[Vertex]) -> u64 {
    subset
        .iter()
        .enumerate()
        .map(|(i, &a)| binomial_u64(a, i + 1))
        .sum()
}

/// Lexicographic rank of a permutation of {0, ..., k-1}.
pub fn perm_lex_rank(perm: &[usize]) -> u64 {
    let k = perm.len();
    let mut rank = 0u64;
    for i in 0..k {
        let smaller = perm[i + 1..].iter().filter(|&&x| x < perm[i]).count() as u64;
        rank += smaller * factorial_u64(k - 1 - i);
    }
    rank
}

/// The permutation of {0, ..., k-1} with the given lexicographic rank.
pub fn perm_lex_unrank(mut rank: u64, k: usize) -> Vec<usize> {
    let mut avail: Vec<usize> = (0..k).collect();
    let mut out = Vec::with_capacity(k);
    for i in (0..k).rev() {
        let f = factorial_u64(i);
        let d = (rank / f) as usize;
        rank %= f;
        out.push(avail.remove(d));
    }
    out
}

// ---------------------------------------------------------------------------
// Tournaments
// ---------------------------------------------------------------------------

/// A k-tournament on [n]: one orientation for every k-subset.
///
/// Subsets are enumerated in colexicographic order; the orientation of a
/// subset is the lexicographic rank of the permutation applied to its sorted
/// vertices. Rank 0 (the identity) is the tuple consistent with the natural
/// order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tournament {
    n: usize,
    k: usize,
    orientation: Vec<u64>,
}

impl Tournament {
    pub fn new(n: usize, k: usize, orientation: Vec<u64>) -> Result<Self> {
        if k < 2 || k > n {
            return Err(CoreError::BadUniformity { k, n });
        }
        let subsets = binomial_u64(n, k);
        if orientation.len() as u64 != subsets {
            return Err(CoreError::IncompleteTournament {
                expected: subsets,
                got: orientation.len(),
            });
        }
        let kf = factorial_u64(k);
        for &p in &orientation {
            if p >= kf {
                return Err(CoreError::OrientationOutOfRange { index: p, k });
            }
        }
        Ok(Tournament { n, k, orientation })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn orientation(&self) -> &[u64] {
        &self.orientation
    }

    pub fn subset_count(&self) -> u64 {
        self.orientation.len() as u64
    }

    /// The oriented tuple on the subset with the given colex index.
    pub fn edge_for_subset(&self, subset_index: u64) -> OrientedEdge {
        let sorted = colex_unrank(subset_index, self.n, self.k);
        let perm = perm_lex_unrank(self.orientation[subset_index as usize], self.k);
        OrientedEdge(perm.into_iter().map(|i| sorted[i]).collect())
    }

    pub fn to_hypergraph(&self) -> OrientedHypergraph {
        let edges = (0..self.subset_count())
            .map(|s| self.edge_for_subset(s))
            .collect();
        OrientedHypergraph::new(self.n, self.k, edges)
            .expect("tournament always forms a valid hypergraph")
    }

    /// Builds a tournament from a complete hypergraph (one edge per k-subset).
    pub fn from_hypergraph(h: &OrientedHypergraph) -> Result<Self> {
        let subsets = binomial_u64(h.n(), h.k());
        if h.edges().len() as u64 != subsets {
            return Err(CoreError::IncompleteTournament {
                expected: subsets,
                got: h.edges().len(),
            });
        }
        let mut orientation = vec![u64::MAX; subsets as usize];
        for e in h.edges() {
            let sorted = e.underlying();
            let s = colex_rank(&sorted) as usize;
            let perm: Vec<usize> = e
                .vertices()
                .iter()
                .map(|v| sorted.binary_search(v).unwrap())
                .collect();
            orientation[s] = perm_lex_rank(&perm);
        }
        Tournament::new(h.n(), h.k(), orientation)
    }

    /// Relabels vertices by `sigma` and re-normalizes to colex/lex indexing.
    pub fn relabel(&self, sigma: &[Vertex]) -> Result<Self> {
        if !is_permutation(sigma, self.n) {
            return Err(CoreError::NotAPermutation(sigma.to_vec(), self.n));
        }
        let mut orientation = vec![0u64; self.orientation.len()];
        for s in 0..self.subset_count() {
            let edge = self.edge_for_subset(s);
            let image: Vec<Vertex> = edge.vertices().iter().map(|&v| sigma[v]).collect();
            let mut sorted = image.clone();
            sorted.sort_unstable();
            let t = colex_rank(&sorted) as usize;
            let perm: Vec<usize> = image
                .iter()
                .map(|v| sorted.binary_search(v).unwrap())
                .collect();
            orientation[t] = perm_lex_rank(&perm);
        }
        Tournament::new(self.n, self.k, orientation)
    }

    /// Mixed-radix index of this tournament: subset i contributes digit
    /// orientation[i] with weight (k!)^i.
    pub fn index(&self) -> u128 {
        let kf = factorial_u64(self.k) as u128;
        let mut acc: u128 = 0;
        for &d in self.orientation.iter().rev() {
            acc = acc * kf + d as u128;
        }
        acc
    }

    pub fn from_index(mut index: u128, n: usize, k: usize) -> Result<Self> {
        let kf = factorial_u64(k) as u128;
        let subsets = binomial_u64(n, k) as usize;
        let mut orientation = Vec::with_capacity(subsets);
        for _ in 0..subsets {
            orientation.push((index % kf) as u64);
            index /= kf;
        }
        Tournament::new(n, k, orientation)
    }
}

// ---------------------------------------------------------------------------
// Witness certificates
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PropertyOStatus {
    FailsO,
    HasO,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionMethod {
    Dfs,
    Naive,
    ProofGuided,
}

/// Either a witness order proving Property O fails, or an exhaustion record
/// proving it holds. FAILS_O certificates are re-checkable with nothing but
/// the consistency predicate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessCertificate {
    pub status: PropertyOStatus,
    pub witness_order: Option<Vec<Vertex>>,
    pub method: DecisionMethod,
    pub nodes_expanded: u64,
    pub orders_examined: u64,
}

impl WitnessCertificate {
    /// Re-checks a FAILS_O certificate: the witness must render every edge
    /// inconsistent. HAS_O certificates are exhaustion records and are not
    /// independently checkable here.
    pub fn verify(&self, h: &OrientedHypergraph) -> Result<bool> {
        match (&self.status, &self.witness_order) {
            (PropertyOStatus::FailsO, Some(perm)) => {
                let order = LinearOrder::from_perm(perm.clone())?;
                if order.len() != h.n() {
                    return Ok(false);
                }
                Ok(h.edges().iter().all(|e| !is_consistent(e, &order)))
            }
            _ => Ok(false),
        }
    }
}

// ---------------------------------------------------------------------------
// File format
// ---------------------------------------------------------------------------

/// Result of parsing an input file: a plain oriented hypergraph, or a
/// tournament when the header carries the `T` token.
#[derive(Clone, Debug)]
pub enum ParsedFile {
    Graph(OrientedHypergraph),
    Tournament(Tournament),
}

impl ParsedFile {
    pub fn hypergraph(&self) -> OrientedHypergraph {
        match self {
            ParsedFile::Graph(h) => h.clone(),
            ParsedFile::Tournament(t) => t.to_hypergraph(),
        }
    }
}

/// Parses the text format: line 1 is `k n m` (with optional trailing `T` for
/// tournaments), then m lines of k space-separated vertex ids. Lines starting
/// with `#` are comments.
pub fn parse_hypergraph(text: &str) -> Result<ParsedFile> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or(CoreError::Parse {
        line: 0,
        msg: "empty input".into(),
    })?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    let is_tournament = tokens.len() == 4 && tokens[3] == "T";
    if tokens.len() != 3 && !is_tournament {
        return Err(CoreError::Parse {
            line: hline,
            msg: format!("header must be `k n m` or `k n m T`, got {header:?}"),
        });
    }
    let parse_int = |line: usize, s: &str| -> Result<usize> {
        s.parse().map_err(|_| CoreError::Parse {
            line,
            msg: format!("not an integer: {s:?}"),
        })
    };
    let k = parse_int(hline, tokens[0])?;
    let n = parse_int(hline, tokens[1])?;
    let m = parse_int(hline, tokens[2])?;

    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (lno, line) = lines.next().ok_or(CoreError::Parse {
            line: 0,
            msg: format!("expected {m} edge lines, input ended early"),
        })?;
        let ids: Vec<Vertex> = line
            .split_whitespace()
            .map(|s| parse_int(lno, s))
            .collect::<Result<_>>()?;
        if ids.len() != k {
            return Err(CoreError::Parse {
                line: lno,
                msg: format!("expected {k} vertex ids, got {}", ids.len()),
            });
        }
        let edge = OrientedEdge::new(ids).map_err(|e| CoreError::Parse {
            line: lno,
            msg: e.to_string(),
        })?;
        edges.push(edge);
    }
    if let Some((lno, line)) = lines.next() {
        return Err(CoreError::Parse {
            line: lno,
            msg: format!("unexpected trailing content: {line:?}"),
        });
    }

    let h = OrientedHypergraph::new(n, k, edges).map_err(|e| CoreError::Parse {
        line: hline,
        msg: e.to_string(),
    })?;
    if is_tournament {
        let t = Tournament::from_hypergraph(&h).map_err(|e| CoreError::Parse {
            line: hline,
            msg: e.to_string(),
        })?;
        Ok(ParsedFile::Tournament(t))
    } else {
        Ok(ParsedFile::Graph(h))
    }
}

pub fn serialize_hypergraph(h: &OrientedHypergraph) -> String {
    let mut out = String::new();
    writeln!(out, "{} {} {}", h.k(), h.n(), h.edges().len()).unwrap();
    for e in h.edges() {
        let ids: Vec<String> = e.vertices().iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", ids.join(" ")).unwrap();
    }
    out
}

pub fn serialize_tournament(t: &Tournament) -> String {
    let h = t.to_hypergraph();
    let mut out = String::new();
    writeln!(out, "{} {} {} T", h.k(), h.n(), h.edges().len()).unwrap();
    for e in h.edges() {
        let ids: Vec<String> = e.vertices().iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", ids.join(" ")).unwrap();
    }
    out
}
