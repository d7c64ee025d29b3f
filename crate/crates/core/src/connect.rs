//! Connectable pairs and constructive connection of two ordered pairs by a
//! tight path of edge-length 3(ell+1).
//!
//! A pair xy is zeta-connectable when xy lies in the robust subgraph R_v of
//! at least zeta * n vertices v (always measured against the original
//! vertex count, even after other vertices have been consumed). Connections
//! are built from the interleaving template
//!
//!   x y u1 r1 r2 u2 .. a b .. v1 s1 s2 v2 z w
//!
//! where the u's come from U_xy, the v's from U_zw, the middle pair ab lies
//! in the robust subgraphs of the chosen u's and v's, and y r1 .. r_{ell-1} a
//! and b s1 .. s_{ell-1} z are paths in the intersections of the chosen
//! robust subgraphs. Every window of the template is then a hyperedge.

use crate::hgraph::{Graph, Hypergraph3, TightPath};
use crate::robust::{ceil_tol, extract_robust_subgraph};
use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// The per-vertex robust subgraphs of a hypergraph, with the inverted index
/// U_xy = {v : xy in E(R_v)}.
pub struct RobustFamily {
    n: usize,
    graphs: Vec<Graph>,
    pair_u: Vec<FixedBitSet>,
}

fn pair_id(n: usize, u: usize, v: usize) -> usize {
    debug_assert!(u < v && v < n);
    u * (2 * n - u - 1) / 2 + (v - u - 1)
}

impl RobustFamily {
    /// Extracts a robust subgraph from every link graph, in parallel.
    pub fn build(h: &Hypergraph3, alpha: f64) -> Self {
        let n = h.n();
        let graphs: Vec<Graph> = (0..n)
            .into_par_iter()
            .map(|v| extract_robust_subgraph(&h.link_graph(v), alpha).r)
            .collect();
        Self::from_graphs(n, graphs)
    }

    /// Wraps pre-extracted robust subgraphs (one per vertex, ambient n).
    pub fn from_graphs(n: usize, graphs: Vec<Graph>) -> Self {
        assert_eq!(graphs.len(), n, "need exactly one graph per vertex");
        let mut pair_u = vec![FixedBitSet::with_capacity(n); n * n.saturating_sub(1) / 2];
        for (v, r) in graphs.iter().enumerate() {
            assert_eq!(r.ambient_n(), n, "graph {v} has the wrong ambient size");
            for (x, y) in r.edges() {
                debug_assert!(v != x && v != y, "a vertex may not index its own link edge");
                pair_u[pair_id(n, x, y)].insert(v);
            }
        }
        Self { n, graphs, pair_u }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self, v: usize) -> &Graph {
        &self.graphs[v]
    }

    /// U_xy as a bitset.
    pub fn u_pair(&self, x: usize, y: usize) -> &FixedBitSet {
        assert!(x != y && x < self.n && y < self.n, "bad pair ({x}, {y})");
        let (a, b) = if x < y { (x, y) } else { (y, x) };
        &self.pair_u[pair_id(self.n, a, b)]
    }

    pub fn u_pair_size(&self, x: usize, y: usize) -> usize {
        self.u_pair(x, y).count_ones(..)
    }

    /// Smallest |U_xy| that counts as zeta-connectable.
    pub fn connectable_threshold(&self, zeta: f64) -> usize {
        ceil_tol(zeta * self.n as f64)
    }

    pub fn is_connectable(&self, zeta: f64, x: usize, y: usize) -> bool {
        self.u_pair_size(x, y) >= self.connectable_threshold(zeta)
    }
}

/// All unordered pairs with |U_xy| >= zeta * n, as (x, y) with x < y.
pub fn connectable_pairs(fam: &RobustFamily, zeta: f64) -> Vec<(usize, usize)> {
    assert!((0.0..=1.0).contains(&zeta), "zeta out of range: {zeta}");
    let need = fam.connectable_threshold(zeta);
    let mut out = Vec::new();
    for x in 0..fam.n {
        for y in x + 1..fam.n {
            if fam.pair_u[pair_id(fam.n, x, y)].count_ones(..) >= need {
                out.push((x, y));
            }
        }
    }
    out
}

/// Per-vertex adjacency view of the connectable pairs: bit y of entry x is
/// set iff xy is zeta-connectable.
pub fn connectable_adjacency(fam: &RobustFamily, zeta: f64) -> Vec<FixedBitSet> {
    let mut adj = vec![FixedBitSet::with_capacity(fam.n); fam.n];
    for (x, y) in connectable_pairs(fam, zeta) {
        adj[x].insert(y);
        adj[y].insert(x);
    }
    adj
}

/// Number of ordered triples (x, y, z) with xy in E(R_z) and xy not
/// zeta-connectable: Sum of 2 |U_xy| over non-connectable pairs.
pub fn count_bad_triples(fam: &RobustFamily, zeta: f64) -> u64 {
    let need = fam.connectable_threshold(zeta);
    let mut count = 0u64;
    for x in 0..fam.n {
        for y in x + 1..fam.n {
            let size = fam.pair_u[pair_id(fam.n, x, y)].count_ones(..);
            if size < need {
                count += 2 * size as u64;
            }
        }
    }
    count
}

/// A request to connect the ordered `start` pair to the ordered `end` pair.
#[derive(Debug, Clone)]
pub struct ConnectRequest {
    pub start: (usize, usize),
    pub end: (usize, usize),
    pub zeta: f64,
    /// Vertices the path interior must not touch.
    pub avoid: FixedBitSet,
    pub ell: usize,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ConnectError {
    #[error("start and end pairs share a vertex")]
    OverlappingPairs,
    #[error("pair ({0}, {1}) is not connectable: |U| = {2} < {3}")]
    NotConnectable(usize, usize, usize, usize),
    #[error("avoid set leaves {usable} usable vertices, interior needs {needed}")]
    AvoidTooLarge { usable: usize, needed: usize },
    #[error("search budget exhausted after {attempts} attempts")]
    ExhaustedBudget { attempts: u64 },
}

/// Searches for a tight path of edge-length exactly 3(ell+1) from the start
/// pair to the end pair whose 3 ell + 1 interior vertices are distinct and
/// outside `avoid`. Middle pairs are ranked by how many sampled (u(i), v(i))
/// index pairs support them; the interior paths are found exhaustively for
/// ell = 3 and by seeded randomized DFS above that.
pub fn find_connecting_path(
    h: &Hypergraph3,
    fam: &RobustFamily,
    req: &ConnectRequest,
    budget: u64,
) -> Result<TightPath, ConnectError> {
    let n = fam.n;
    let (x, y) = req.start;
    let (z, w) = req.end;
    let ell = req.ell;
    assert!(ell >= 3 && ell % 2 == 1, "ell must be odd and at least 3");
    assert!(h.n() == n, "hypergraph and family sizes differ");
    if x == z || x == w || y == z || y == w {
        return Err(ConnectError::OverlappingPairs);
    }
    let need = fam.connectable_threshold(req.zeta);
    for (a, b) in [(x, y), (z, w)] {
        let size = fam.u_pair_size(a, b);
        if size < need {
            return Err(ConnectError::NotConnectable(a, b, size, need));
        }
    }

    let interior_needed = 3 * ell + 1;
    let mut blocked = req.avoid.clone();
    for v in [x, y, z, w] {
        blocked.insert(v);
    }
    let usable = n - blocked.count_ones(..);
    if usable < interior_needed {
        return Err(ConnectError::AvoidTooLarge { usable, needed: interior_needed });
    }

    let t = fam.connectable_threshold(req.zeta).max(1);
    let seed = crate::derive_seed(
        ((x * n + y) as u64) << 32 | ((z * n + w) as u64),
        "connect",
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // sampled, paired candidate lists
    let free = |v: usize| !blocked.contains(v);
    let mut u_list: Vec<usize> = fam.u_pair(x, y).ones().filter(|&v| free(v)).collect();
    let mut v_list: Vec<usize> = fam.u_pair(z, w).ones().filter(|&v| free(v)).collect();
    u_list.shuffle(&mut rng);
    v_list.shuffle(&mut rng);
    u_list.truncate(t);
    v_list.truncate(t);
    let pairs_t = u_list.len().min(v_list.len());
    let k = (ell + 1) / 2;
    let mut attempts = 0u64;
    if pairs_t == 0 {
        return Err(ConnectError::ExhaustedBudget { attempts });
    }

    // rank middle pairs by index support
    let mut middles: Vec<(usize, (usize, usize), Vec<usize>)> = Vec::new();
    for a in 0..n {
        if !free(a) {
            continue;
        }
        for b in a + 1..n {
            if !free(b) {
                continue;
            }
            let idx: Vec<usize> = (0..pairs_t)
                .filter(|&i| {
                    let (ui, vi) = (u_list[i], v_list[i]);
                    ui != a && ui != b && vi != a && vi != b
                        && fam.graphs[ui].has_edge(a, b)
                        && fam.graphs[vi].has_edge(a, b)
                })
                .collect();
            if idx.len() >= k {
                middles.push((idx.len(), (a, b), idx));
            }
        }
    }
    middles.sort_by(|l, r| r.0.cmp(&l.0).then(l.1.cmp(&r.1)));

    for (_, (ma, mb), idx) in &middles {
        for (a, b) in [(*ma, *mb), (*mb, *ma)] {
            // a few index drawings per middle pair
            let mut order = idx.clone();
            for _ in 0..4 {
                attempts += 1;
                if attempts > budget {
                    return Err(ConnectError::ExhaustedBudget { attempts });
                }
                order.shuffle(&mut rng);
                let Some((us, vs)) = pick_distinct(&u_list, &v_list, &order, k, a, b) else {
                    continue;
                };
                if let Some(seq) =
                    realize_template(fam, &blocked, (x, y), (z, w), a, b, &us, &vs, ell, &mut rng)
                {
                    let path = TightPath::new_path(h, seq)
                        .expect("template windows are hyperedges by construction");
                    debug_assert_eq!(path.len_edges(), 3 * (ell + 1));
                    return Ok(path);
                }
            }
        }
    }
    Err(ConnectError::ExhaustedBudget { attempts })
}

/// Searches for the shortest tight connection from the ordered `start`
/// pair to the ordered `end` pair whose interior vertices all come from
/// `allowed`, trying interior sizes 0, 1, .. up to `max_internal`. Exact
/// DFS per size; `budget` caps total nodes across sizes. Returns the
/// interior only.
pub fn find_gap_interior(
    h: &Hypergraph3,
    start: (usize, usize),
    end: (usize, usize),
    allowed: &FixedBitSet,
    max_internal: usize,
    budget: u64,
) -> Option<Vec<usize>> {
    let (x, y) = start;
    let (z, w) = end;
    if x == z || x == w || y == z || y == w || x == y || z == w {
        return None;
    }
    let mut allowed = allowed.clone();
    for v in [x, y, z, w] {
        allowed.remove(v);
    }
    let mut budget = budget;
    for g in 0..=max_internal {
        let mut interior = Vec::with_capacity(g);
        if dfs_gap(h, (x, y), (z, w), &allowed, g, &mut interior, &mut budget) {
            return Some(interior);
        }
        if budget == 0 {
            return None;
        }
    }
    None
}

/// Searches for a tight connection from the ordered `start` pair to the
/// ordered `end` pair whose interior is exactly the set `required`, every
/// member used once. Returns the interior in path order.
pub fn find_exact_interior(
    h: &Hypergraph3,
    start: (usize, usize),
    end: (usize, usize),
    required: &FixedBitSet,
    budget: u64,
) -> Option<Vec<usize>> {
    let (x, y) = start;
    let (z, w) = end;
    if x == z || x == w || y == z || y == w || x == y || z == w {
        return None;
    }
    if [x, y, z, w].iter().any(|&v| required.contains(v)) {
        return None;
    }
    let g = required.count_ones(..);
    let mut interior = Vec::with_capacity(g);
    let mut budget = budget;
    if dfs_gap(h, (x, y), (z, w), required, g, &mut interior, &mut budget) {
        return Some(interior);
    }
    None
}

fn dfs_gap(
    h: &Hypergraph3,
    at: (usize, usize),
    end: (usize, usize),
    allowed: &FixedBitSet,
    remaining: usize,
    interior: &mut Vec<usize>,
    budget: &mut u64,
) -> bool {
    if *budget == 0 {
        return false;
    }
    *budget -= 1;
    let (p, q) = at;
    if remaining == 0 {
        return h.has_edge(p, q, end.0) && h.has_edge(q, end.0, end.1);
    }
    let cands: Vec<usize> = h
        .pair_neighborhood(p, q)
        .ones()
        .filter(|&v| allowed.contains(v) && !interior.contains(&v) && v != end.0 && v != end.1)
        .collect();
    for v in cands {
        interior.push(v);
        if dfs_gap(h, (q, v), end, allowed, remaining - 1, interior, budget) {
            return true;
        }
        interior.pop();
    }
    false
}

/// Picks k u-indices and k v-indices from `order` so that all 2k chosen
/// vertices are pairwise distinct and also avoid a and b.
fn pick_distinct(
    u_list: &[usize],
    v_list: &[usize],
    order: &[usize],
    k: usize,
    a: usize,
    b: usize,
) -> Option<(Vec<usize>, Vec<usize>)> {
    let mut us = Vec::with_capacity(k);
    let mut vs = Vec::with_capacity(k);
    let mut taken = vec![a, b];
    for &i in order {
        if us.len() < k && !taken.contains(&u_list[i]) {
            us.push(u_list[i]);
            taken.push(u_list[i]);
        }
    }
    for &i in order {
        if vs.len() < k && !taken.contains(&v_list[i]) {
            vs.push(v_list[i]);
            taken.push(v_list[i]);
        }
    }
    (us.len() == k && vs.len() == k).then_some((us, vs))
}

/// Materializes the interleaving template once the u's, v's, and middle
/// pair are fixed: finds the two interior paths in the respective robust
/// intersections and stitches the full vertex sequence together.
#[allow(clippy::too_many_arguments)]
fn realize_template(
    fam: &RobustFamily,
    blocked: &FixedBitSet,
    start: (usize, usize),
    end: (usize, usize),
    a: usize,
    b: usize,
    us: &[usize],
    vs: &[usize],
    ell: usize,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<usize>> {
    let (x, y) = start;
    let (z, w) = end;
    let mut used = blocked.clone();
    for &v in us.iter().chain(vs.iter()) {
        used.insert(v);
    }
    used.insert(a);
    used.insert(b);

    let u_graphs: Vec<&Graph> = us.iter().map(|&u| &fam.graphs[u]).collect();
    let r_interior = common_path_interior(&u_graphs, y, a, ell, &used, rng)?;
    let mut used2 = used.clone();
    for &r in &r_interior {
        used2.insert(r);
    }
    let v_graphs: Vec<&Graph> = vs.iter().map(|&v| &fam.graphs[v]).collect();
    let s_interior = common_path_interior(&v_graphs, b, z, ell, &used2, rng)?;

    // x y u1 r1 r2 u2 [r3 r4 u3 ..] a b v1 s1 s2 v2 [s3 s4 v3 ..] z w
    let mut seq = vec![x, y];
    interleave(&mut seq, us, &r_interior);
    seq.push(a);
    seq.push(b);
    interleave(&mut seq, vs, &s_interior);
    seq.push(z);
    seq.push(w);
    debug_assert_eq!(seq.len(), 3 * ell + 5);
    Some(seq)
}

/// Appends u1 i1 i2 u2 i3 i4 u3 .. (each interleaved vertex followed by two
/// interior vertices, ending with the last interleaved vertex).
fn interleave(seq: &mut Vec<usize>, interleaved: &[usize], interior: &[usize]) {
    let mut it = interior.iter();
    for (pos, &g) in interleaved.iter().enumerate() {
        seq.push(g);
        if pos + 1 < interleaved.len() {
            seq.push(*it.next().expect("interior has 2 vertices per gap"));
            seq.push(*it.next().expect("interior has 2 vertices per gap"));
        }
    }
    debug_assert!(it.next().is_none());
}

/// Finds the interior ell - 1 vertices of a path from `from` to `to` of
/// edge-length ell lying in every listed graph, avoiding `used`.
/// Exhaustive for ell = 3, randomized DFS with restarts otherwise.
fn common_path_interior(
    graphs: &[&Graph],
    from: usize,
    to: usize,
    ell: usize,
    used: &FixedBitSet,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<usize>> {
    let common_neighbors = |v: usize| -> FixedBitSet {
        let mut set = graphs[0].neighbors(v).clone();
        for g in &graphs[1..] {
            set.intersect_with(g.neighbors(v));
        }
        set
    };
    if !graphs.iter().all(|g| g.contains_vertex(from) && g.contains_vertex(to)) {
        return None;
    }
    if ell == 3 {
        let n_from = common_neighbors(from);
        let n_to = common_neighbors(to);
        for r1 in n_from.ones() {
            if used.contains(r1) || r1 == to {
                continue;
            }
            let mut second = common_neighbors(r1);
            second.intersect_with(&n_to);
            for r2 in second.ones() {
                if !used.contains(r2) && r2 != r1 && r2 != from {
                    return Some(vec![r1, r2]);
                }
            }
        }
        return None;
    }
    // randomized DFS with restarts
    for _ in 0..32 {
        let mut interior = Vec::with_capacity(ell - 1);
        let mut local_used = used.clone();
        local_used.insert(from);
        local_used.insert(to);
        let mut at = from;
        let mut dead = false;
        for step in 0..ell - 1 {
            let mut cands: Vec<usize> = common_neighbors(at)
                .ones()
                .filter(|&v| !local_used.contains(v))
                .filter(|&v| step != ell - 2 || common_neighbors(v).contains(to))
                .collect();
            if cands.is_empty() {
                dead = true;
                break;
            }
            cands.shuffle(rng);
            at = cands[0];
            local_used.insert(at);
            interior.push(at);
        }
        if !dead {
            return Some(interior);
        }
    }
    None
}
