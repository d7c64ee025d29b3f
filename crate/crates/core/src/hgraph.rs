//! Core representations: 3-uniform hypergraphs, 2-uniform graphs on vertex
//! subsets, and tight paths/cycles with validation.
//!
//! Vertices are dense integers `0..n`. Adjacency, joint neighborhoods and
//! visited sets are all bitsets sized by `n`; the eager pair index costs
//! O(n^3) bits, which is fine at the intended scale (exact solving up to
//! n ~ 128, pipeline runs up to a few hundred vertices).

use fixedbitset::FixedBitSet;
use std::fmt;

/// A 3-uniform hypergraph H = (V, E) with V = {0, .., n-1}.
///
/// Edges are stored as sorted triples, and `pair_index` maps every unordered
/// pair {u, v} to the joint neighborhood N_H(u, v) as a bitset. The index is
/// built eagerly because pair degrees are hot in every module.
#[derive(Clone, PartialEq, Eq)]
pub struct Hypergraph3 {
    n: usize,
    edges: Vec<[usize; 3]>,
    pair_index: Vec<FixedBitSet>,
    deg: Vec<u32>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum BuildError {
    #[error("vertex {0} out of range (n = {1})")]
    VertexOutOfRange(usize, usize),
    #[error("triple {0:?} has repeated vertices")]
    RepeatedVertex([usize; 3]),
    #[error("duplicate triple {0:?}")]
    DuplicateEdge([usize; 3]),
}

fn pair_id(n: usize, u: usize, v: usize) -> usize {
    debug_assert!(u < v && v < n);
    // triangular index of {u, v} with u < v
    u * (2 * n - u - 1) / 2 + (v - u - 1)
}

impl Hypergraph3 {
    /// Builds a hypergraph from triples. Triples may arrive in any vertex
    /// order; they are sorted internally. Rejects out-of-range vertices,
    /// repeated vertices within a triple, and duplicate triples.
    pub fn new(n: usize, triples: impl IntoIterator<Item = [usize; 3]>) -> Result<Self, BuildError> {
        let pairs = n * n.saturating_sub(1) / 2;
        let mut pair_index = vec![FixedBitSet::with_capacity(n); pairs];
        let mut deg = vec![0u32; n];
        let mut edges = Vec::new();
        for t in triples {
            let mut e = t;
            e.sort_unstable();
            let [a, b, c] = e;
            if c >= n {
                return Err(BuildError::VertexOutOfRange(c, n));
            }
            if a == b || b == c {
                return Err(BuildError::RepeatedVertex(t));
            }
            if pair_index[pair_id(n, a, b)].contains(c) {
                return Err(BuildError::DuplicateEdge(e));
            }
            pair_index[pair_id(n, a, b)].insert(c);
            pair_index[pair_id(n, a, c)].insert(b);
            pair_index[pair_id(n, b, c)].insert(a);
            deg[a] += 1;
            deg[b] += 1;
            deg[c] += 1;
            edges.push(e);
        }
        edges.sort_unstable();
        Ok(Self { n, edges, pair_index, deg })
    }

    /// Complete hypergraph K_n^(3).
    pub fn complete(n: usize) -> Self {
        let mut triples = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    triples.push([a, b, c]);
                }
            }
        }
        Self::new(n, triples).expect("complete hypergraph is always valid")
    }

    /// Hypergraph on n vertices with no edges.
    pub fn empty(n: usize) -> Self {
        Self::new(n, []).expect("empty hypergraph is always valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Sorted edge list.
    pub fn edges(&self) -> &[[usize; 3]] {
        &self.edges
    }

    /// d_H(v). Panics if v >= n.
    pub fn degree(&self, v: usize) -> usize {
        assert!(v < self.n, "vertex {v} out of range (n = {})", self.n);
        self.deg[v] as usize
    }

    /// d_H(u, v) = |N_H(u, v)|. Panics if u == v or either is out of range.
    pub fn pair_degree(&self, u: usize, v: usize) -> usize {
        self.pair_neighborhood(u, v).count_ones(..)
    }

    /// The joint neighborhood N_H(u, v) as a bitset.
    pub fn pair_neighborhood(&self, u: usize, v: usize) -> &FixedBitSet {
        assert!(u != v, "pair degree needs two distinct vertices");
        assert!(u < self.n && v < self.n, "vertex out of range (n = {})", self.n);
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        &self.pair_index[pair_id(self.n, a, b)]
    }

    pub fn has_edge(&self, a: usize, b: usize, c: usize) -> bool {
        if a == b || b == c || a == c || a >= self.n || b >= self.n || c >= self.n {
            return false;
        }
        let (x, y) = if a < b { (a, b) } else { (b, a) };
        self.pair_index[pair_id(self.n, x, y)].contains(c)
    }

    /// Minimum vertex degree and minimum pair degree (over all pairs).
    pub fn min_degrees(&self) -> (usize, usize) {
        assert!(self.n >= 2, "min degrees need at least two vertices");
        let d = self.deg.iter().copied().min().unwrap_or(0) as usize;
        let mut d2 = usize::MAX;
        for u in 0..self.n {
            for v in u + 1..self.n {
                d2 = d2.min(self.pair_index[pair_id(self.n, u, v)].count_ones(..));
            }
        }
        (d, d2)
    }

    /// The link graph L_v: a graph on all of V with E(L_v) = {yz : vyz in E}.
    /// v itself is isolated, and e(L_v) = degree(v).
    pub fn link_graph(&self, v: usize) -> Graph {
        assert!(v < self.n, "vertex {v} out of range (n = {})", self.n);
        let mut g = Graph::full_vertex_set(self.n);
        for &[a, b, c] in &self.edges {
            if a == v {
                g.add_edge(b, c);
            } else if b == v {
                g.add_edge(a, c);
            } else if c == v {
                g.add_edge(a, b);
            }
        }
        g
    }

    /// Pairs in the shadow (pair degree >= 1), as (u, v) with u < v.
    pub fn shadow_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in u + 1..self.n {
                if !self.pair_index[pair_id(self.n, u, v)].is_clear() {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Rebuilds the pair index from the edge list and compares. Used by
    /// consistency tests; O(n^3) bits of work.
    pub fn pair_index_consistent(&self) -> bool {
        match Self::new(self.n, self.edges.iter().copied()) {
            Ok(h) => h.pair_index == self.pair_index && h.deg == self.deg,
            Err(_) => false,
        }
    }
}

impl fmt::Debug for Hypergraph3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Hypergraph3(n={}, m={})", self.n, self.edges.len())
    }
}

/// A 2-uniform graph on a subset of {0, .., n-1}.
///
/// `n` is the ambient vertex universe; `verts` is the actual vertex set.
/// Adjacency is symmetric, loop-free, and confined to `verts`.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    verts: FixedBitSet,
    adj: Vec<FixedBitSet>,
    m: usize,
}

impl Graph {
    /// Graph with an empty vertex set over ambient universe 0..n.
    pub fn new(n: usize) -> Self {
        Self {
            n,
            verts: FixedBitSet::with_capacity(n),
            adj: vec![FixedBitSet::with_capacity(n); n],
            m: 0,
        }
    }

    /// Graph whose vertex set is all of 0..n, no edges.
    pub fn full_vertex_set(n: usize) -> Self {
        let mut g = Self::new(n);
        g.verts.insert_range(..);
        g
    }

    pub fn with_vertices(n: usize, verts: impl IntoIterator<Item = usize>) -> Self {
        let mut g = Self::new(n);
        for v in verts {
            assert!(v < n, "vertex {v} out of range (n = {n})");
            g.verts.insert(v);
        }
        g
    }

    /// Complete graph on 0..n.
    pub fn complete(n: usize) -> Self {
        let mut g = Self::full_vertex_set(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn ambient_n(&self) -> usize {
        self.n
    }

    pub fn vertex_set(&self) -> &FixedBitSet {
        &self.verts
    }

    pub fn vertex_count(&self) -> usize {
        self.verts.count_ones(..)
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.verts.ones()
    }

    pub fn contains_vertex(&self, v: usize) -> bool {
        v < self.n && self.verts.contains(v)
    }

    pub fn add_vertex(&mut self, v: usize) {
        assert!(v < self.n);
        self.verts.insert(v);
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v, "no self-loops");
        assert!(self.verts.contains(u) && self.verts.contains(v), "edge endpoints must be vertices");
        if !self.adj[u].contains(v) {
            self.adj[u].insert(v);
            self.adj[v].insert(u);
            self.m += 1;
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.adj[u].contains(v)
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    pub fn neighbors(&self, v: usize) -> &FixedBitSet {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones(..)
    }

    /// Edges as (u, v) with u < v.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.verts
            .ones()
            .flat_map(move |u| self.adj[u].ones().filter(move |&v| v > u).map(move |v| (u, v)))
    }

    /// Minimum degree over the vertex set (isolated vertices count).
    pub fn min_degree(&self) -> usize {
        self.vertices().map(|v| self.degree(v)).min().unwrap_or(0)
    }

    /// Number of edges with both endpoints in `set`.
    pub fn e_within(&self, set: &FixedBitSet) -> usize {
        let mut total = 0;
        for u in set.ones() {
            let mut inter = self.adj[u].clone();
            inter.intersect_with(set);
            total += inter.count_ones(..);
        }
        total / 2
    }

    /// Number of edges with one endpoint in `a` and the other in `b`.
    /// `a` and `b` are assumed disjoint.
    pub fn e_between(&self, a: &FixedBitSet, b: &FixedBitSet) -> usize {
        let mut total = 0;
        for u in a.ones() {
            let mut inter = self.adj[u].clone();
            inter.intersect_with(b);
            total += inter.count_ones(..);
        }
        total
    }

    /// Induced subgraph on `set` (ambient universe unchanged).
    pub fn induced(&self, set: &FixedBitSet) -> Graph {
        let mut g = Graph::new(self.n);
        g.verts = set.clone();
        g.verts.intersect_with(&self.verts);
        let mut m = 0;
        for u in g.verts.ones() {
            let mut row = self.adj[u].clone();
            row.intersect_with(&g.verts);
            m += row.count_ones(..);
            g.adj[u] = row;
        }
        g.m = m / 2;
        g
    }

    /// Number of edges shared with another graph over the same ambient n.
    pub fn intersection_edge_count(&self, other: &Graph) -> usize {
        assert_eq!(self.n, other.n, "ambient universes differ");
        let mut total = 0;
        for u in 0..self.n {
            let mut row = self.adj[u].clone();
            row.intersect_with(&other.adj[u]);
            total += row.count_ones(..);
        }
        total / 2
    }

    /// Checks symmetry, loop-freeness, and containment in the vertex set.
    pub fn invariants_hold(&self) -> bool {
        for u in 0..self.n {
            if self.adj[u].contains(u) {
                return false;
            }
            for v in self.adj[u].ones() {
                if !self.adj[v].contains(u) {
                    return false;
                }
                if !self.verts.contains(u) || !self.verts.contains(v) {
                    return false;
                }
            }
        }
        true
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(|V|={}, e={})", self.vertex_count(), self.m)
    }
}

/// Why a vertex sequence fails to be a tight path or cycle.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TightViolation {
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("vertex {0} repeats in the sequence")]
    RepeatedVertex(usize),
    #[error("sequence of {got} vertices too short ({need} needed)")]
    TooShort { got: usize, need: usize },
    #[error("window at position {pos} is not an edge: {triple:?}")]
    WindowNotEdge { pos: usize, triple: [usize; 3] },
}

/// Accepts exactly the sequences of distinct in-range vertices whose every
/// window of 3 consecutive entries (with wrap-around iff `as_cycle`) is an
/// edge. Reports the first violation found. Cycles need at least 4 vertices;
/// paths need at least 3.
pub fn validate_tight(h: &Hypergraph3, seq: &[usize], as_cycle: bool) -> Result<(), TightViolation> {
    let need = if as_cycle { 4 } else { 3 };
    if seq.len() < need {
        return Err(TightViolation::TooShort { got: seq.len(), need });
    }
    let mut seen = FixedBitSet::with_capacity(h.n());
    for &v in seq {
        if v >= h.n() {
            return Err(TightViolation::VertexOutOfRange(v));
        }
        if seen.contains(v) {
            return Err(TightViolation::RepeatedVertex(v));
        }
        seen.insert(v);
    }
    let windows = if as_cycle { seq.len() } else { seq.len() - 2 };
    for i in 0..windows {
        let a = seq[i];
        let b = seq[(i + 1) % seq.len()];
        let c = seq[(i + 2) % seq.len()];
        if !h.has_edge(a, b, c) {
            return Err(TightViolation::WindowNotEdge { pos: i, triple: [a, b, c] });
        }
    }
    Ok(())
}

/// A validated tight path or tight cycle.
///
/// For a path x_1 .. x_k the length (number of hyperedges) is k - 2 and the
/// end-pairs are (x_1, x_2) and (x_{k-1}, x_k), ordered. A cycle of k
/// vertices has length k.
#[derive(Clone, PartialEq, Eq, serde::Serialize)]
pub struct TightPath {
    seq: Vec<usize>,
    is_cycle: bool,
}

impl TightPath {
    pub fn new_path(h: &Hypergraph3, seq: Vec<usize>) -> Result<Self, TightViolation> {
        validate_tight(h, &seq, false)?;
        Ok(Self { seq, is_cycle: false })
    }

    pub fn new_cycle(h: &Hypergraph3, seq: Vec<usize>) -> Result<Self, TightViolation> {
        validate_tight(h, &seq, true)?;
        Ok(Self { seq, is_cycle: true })
    }

    pub fn seq(&self) -> &[usize] {
        &self.seq
    }

    pub fn is_cycle(&self) -> bool {
        self.is_cycle
    }

    /// Number of hyperedges.
    pub fn len_edges(&self) -> usize {
        if self.is_cycle {
            self.seq.len()
        } else {
            self.seq.len() - 2
        }
    }

    /// Ordered first end-pair (x_1, x_2). Cycles have no end-pairs.
    pub fn start_pair(&self) -> (usize, usize) {
        assert!(!self.is_cycle, "cycles have no end-pairs");
        (self.seq[0], self.seq[1])
    }

    /// Ordered last end-pair (x_{k-1}, x_k).
    pub fn end_pair(&self) -> (usize, usize) {
        assert!(!self.is_cycle, "cycles have no end-pairs");
        let k = self.seq.len();
        (self.seq[k - 2], self.seq[k - 1])
    }

    pub fn vertex_set(&self, n: usize) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(n);
        for &v in &self.seq {
            s.insert(v);
        }
        s
    }
}

impl fmt::Debug for TightPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "TightPath({}, {} vertices: {:?})",
            if self.is_cycle { "cycle" } else { "path" },
            self.seq.len(),
            self.seq
        )
    }
}
