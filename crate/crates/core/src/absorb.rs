//! Central edges, absorbable vertices, v-absorbers, the absorber family,
//! absorbing-path assembly, and the absorption swap.
//!
//! An absorber tuple (a,b,c,d,z,x,y,y2,x2) packs two path gadgets: the swap
//! subpath a b z c d and the park subpath x y y2 x2. For a vertex v with
//! vab, vbc, vcd all edges, the tuple absorbs v by rewriting the swap
//! subpath to a b v c d and parking z between y and y2, which turns the
//! park subpath into x y z y2 x2. Both rewrites only create windows that
//! are already required tuple edges, so absorption is local surgery that
//! keeps the ambient path tight.

use crate::connect::{
    connectable_adjacency, find_connecting_path, ConnectError, ConnectRequest, RobustFamily,
};
use crate::hgraph::{Hypergraph3, TightPath};
use crate::reservoir::Reservoir;
use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub const CENTRAL_THRESHOLD: f64 = 28.0 / 5.0;
pub const DEFAULT_FRAC: f64 = 1e-3;

#[derive(Debug, thiserror::Error)]
pub enum AbsorbError {
    #[error("triple {0:?} is not an edge")]
    NotAnEdge([usize; 3]),
    #[error("coverage floor unreachable; uncovered vertices: {0:?}")]
    CoverageUnreachable(Vec<usize>),
    #[error("absorber family is empty")]
    EmptyFamily,
    #[error("no connection from {from:?} to {to:?}: {source}")]
    ConnectionStuck {
        from: (usize, usize),
        to: (usize, usize),
        source: ConnectError,
    },
    #[error("absorbing path has {got} vertices, cap is {cap}")]
    PathCapExceeded { got: usize, cap: usize },
    #[error("cannot absorb {xs} vertices, capacity is {cap}")]
    CapacityExceeded { xs: usize, cap: usize },
    #[error("vertex {0} to absorb already lies on the path")]
    XIntersectsPath(usize),
    #[error("no unused absorber tuple left for vertex {0}")]
    NoAbsorberFor(usize),
}

/// f(e) = n/d(x,y) + n/d(x,z) + n/d(y,z) for an edge e = xyz.
pub fn f_value(h: &Hypergraph3, e: [usize; 3]) -> Result<f64, AbsorbError> {
    if !h.has_edge(e[0], e[1], e[2]) {
        return Err(AbsorbError::NotAnEdge(e));
    }
    let n = h.n() as f64;
    Ok(n / h.pair_degree(e[0], e[1]) as f64
        + n / h.pair_degree(e[0], e[2]) as f64
        + n / h.pair_degree(e[1], e[2]) as f64)
}

/// Edges with f(e) <= 28/5, in the hypergraph's edge order.
pub fn central_edges(h: &Hypergraph3) -> Vec<[usize; 3]> {
    h.edges()
        .iter()
        .copied()
        .filter(|&e| f_value(h, e).unwrap() <= CENTRAL_THRESHOLD + 1e-9)
        .collect()
}

/// Assigns the roles (y, y2, z) inside an edge so that
/// d(y, y2) >= d(y, z) >= d(y2, z), breaking degree ties by pair id.
pub fn central_roles(h: &Hypergraph3, e: [usize; 3]) -> (usize, usize, usize) {
    let mut pairs = [(e[0], e[1]), (e[0], e[2]), (e[1], e[2])];
    pairs.sort_by_key(|&(u, v)| (std::cmp::Reverse(h.pair_degree(u, v)), u, v));
    let (p, q) = (pairs[0], pairs[1]);
    let y = if p.0 == q.0 || p.0 == q.1 { p.0 } else { p.1 };
    let y2 = if p.0 == y { p.1 } else { p.0 };
    let z = if q.0 == y { q.1 } else { q.0 };
    debug_assert_eq!(
        {
            let mut s = [y2, z];
            s.sort();
            (s[0], s[1])
        },
        pairs[2]
    );
    (y, y2, z)
}

#[derive(Debug, Clone)]
pub struct QuintupleScan {
    /// (x, y, y2, x2, z) tuples.
    pub quintuples: Vec<[usize; 5]>,
    /// Whether the minimum degree met the guarantee that makes the count
    /// lower bound apply.
    pub degree_guarantee_met: bool,
}

/// Quintuples (x, y, y2, x2, z) with xyz, yy2z, x2y2z, xyy2, yy2x2 all
/// edges and 12 d(y, z) > 5 n, discovered by iterating central edges.
pub fn find_central_quintuples(h: &Hypergraph3, limit: usize) -> QuintupleScan {
    let n = h.n();
    let degree_guarantee_met =
        h.min_degrees().0 as f64 >= (6.0 / 11.0) * (n * n) as f64 / 2.0 - 1e-9;
    let mut quintuples = Vec::new();
    'outer: for e in central_edges(h) {
        let (y, y2, z) = central_roles(h, e);
        if 12 * h.pair_degree(y, z) <= 5 * n {
            continue;
        }
        let mut xs = h.pair_neighborhood(y, z).clone();
        xs.intersect_with(h.pair_neighborhood(y, y2));
        let mut x2s = h.pair_neighborhood(y2, z).clone();
        x2s.intersect_with(h.pair_neighborhood(y, y2));
        for v in [y, y2, z] {
            xs.remove(v);
            x2s.remove(v);
        }
        for x in xs.ones() {
            for x2 in x2s.ones() {
                if x2 == x {
                    continue;
                }
                quintuples.push([x, y, y2, x2, z]);
                if quintuples.len() == limit {
                    break 'outer;
                }
            }
        }
    }
    QuintupleScan { quintuples, degree_guarantee_met }
}

/// Independent recheck of a quintuple against the raw edge set.
pub fn quintuple_valid(h: &Hypergraph3, q: [usize; 5]) -> bool {
    let [x, y, y2, x2, z] = q;
    let mut sorted = q;
    sorted.sort();
    sorted.windows(2).all(|w| w[0] != w[1])
        && h.has_edge(x, y, z)
        && h.has_edge(y, y2, z)
        && h.has_edge(x2, y2, z)
        && h.has_edge(x, y, y2)
        && h.has_edge(y, y2, x2)
        && 12 * h.pair_degree(y, z) > 5 * h.n()
}

#[derive(Debug, Clone)]
pub struct AbsorbableScan {
    pub set: FixedBitSet,
    /// Exact quadruple count per vertex z.
    pub counts: Vec<u64>,
    /// Cached witness quadruples (x, y, y2, x2) per z, capped.
    pub witnesses: Vec<Vec<[usize; 4]>>,
}

/// Counts, for every z, the quadruples (x, y, y2, x2) with xyz, yzy2,
/// zy2x2, xyy2, yy2x2 all edges and xy, y2x2 both zeta*-connectable;
/// z is absorbable when the count reaches frac * n^4.
pub fn absorbable_scan(
    h: &Hypergraph3,
    fam: &RobustFamily,
    zeta_star: f64,
    frac: f64,
    witness_cap: usize,
) -> AbsorbableScan {
    let n = h.n();
    let conn = connectable_adjacency(fam, zeta_star);
    let per_z: Vec<(u64, Vec<[usize; 4]>)> = (0..n)
        .into_par_iter()
        .map(|z| {
            let mut count = 0u64;
            let mut wits = Vec::new();
            for y in 0..n {
                if y == z {
                    continue;
                }
                for y2 in 0..n {
                    if y2 == y || y2 == z || !h.has_edge(y, z, y2) {
                        continue;
                    }
                    let mut a = h.pair_neighborhood(y, z).clone();
                    a.intersect_with(h.pair_neighborhood(y, y2));
                    a.intersect_with(&conn[y]);
                    let mut b = h.pair_neighborhood(y2, z).clone();
                    b.intersect_with(h.pair_neighborhood(y, y2));
                    b.intersect_with(&conn[y2]);
                    for v in [y, y2, z] {
                        a.remove(v);
                        b.remove(v);
                    }
                    let (ca, cb) = (a.count_ones(..) as u64, b.count_ones(..) as u64);
                    if ca == 0 || cb == 0 {
                        continue;
                    }
                    let mut both = a.clone();
                    both.intersect_with(&b);
                    count += ca * cb - both.count_ones(..) as u64;
                    if wits.len() < witness_cap {
                        'pick: for x in a.ones() {
                            for x2 in b.ones() {
                                if x2 != x {
                                    wits.push([x, y, y2, x2]);
                                    break 'pick;
                                }
                            }
                        }
                    }
                }
            }
            (count, wits)
        })
        .collect();
    let threshold = frac * (n as f64).powi(4);
    let mut set = FixedBitSet::with_capacity(n);
    let mut counts = Vec::with_capacity(n);
    let mut witnesses = Vec::with_capacity(n);
    for (z, (count, wits)) in per_z.into_iter().enumerate() {
        if count as f64 >= threshold - 1e-9 && count > 0 {
            set.insert(z);
        }
        counts.push(count);
        witnesses.push(wits);
    }
    AbsorbableScan { set, counts, witnesses }
}

/// The absorbable vertex set alone.
pub fn absorbable_vertices(
    h: &Hypergraph3,
    fam: &RobustFamily,
    zeta_star: f64,
    frac: f64,
) -> FixedBitSet {
    absorbable_scan(h, fam, zeta_star, frac, 0).set
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct AbsorberTuple {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
    pub z: usize,
    pub x: usize,
    pub y: usize,
    pub y2: usize,
    pub x2: usize,
}

impl AbsorberTuple {
    pub fn vertices(&self) -> [usize; 9] {
        [self.a, self.b, self.c, self.d, self.z, self.x, self.y, self.y2, self.x2]
    }

    pub fn distinct(&self) -> bool {
        let mut v = self.vertices();
        v.sort();
        v.windows(2).all(|w| w[0] != w[1])
    }

    /// a b z c d: the subpath whose z gets swapped out during absorption.
    pub fn swap_subpath(&self) -> [usize; 5] {
        [self.a, self.b, self.z, self.c, self.d]
    }

    /// x y y2 x2: the subpath that parks z after the swap.
    pub fn park_subpath(&self) -> [usize; 4] {
        [self.x, self.y, self.y2, self.x2]
    }
}

/// Independent full recheck of the tuple invariants: nine distinct
/// vertices, the eight edges, and the four connectable end-pairs.
pub fn verify_absorber_tuple(
    h: &Hypergraph3,
    fam: &RobustFamily,
    t: &AbsorberTuple,
    zeta_star: f64,
) -> bool {
    let edges = [
        [t.z, t.a, t.b],
        [t.z, t.b, t.c],
        [t.z, t.c, t.d],
        [t.z, t.x, t.y],
        [t.z, t.y, t.y2],
        [t.z, t.y2, t.x2],
        [t.x, t.y, t.y2],
        [t.y, t.y2, t.x2],
    ];
    t.distinct()
        && edges.iter().all(|e| h.has_edge(e[0], e[1], e[2]))
        && [(t.a, t.b), (t.c, t.d), (t.x, t.y), (t.y2, t.x2)]
            .iter()
            .all(|&(p, q)| fam.is_connectable(zeta_star, p, q))
}

/// Recheck that the tuple absorbs v: tuple invariants plus vab, vbc, vcd
/// edges and v outside the tuple.
pub fn verify_absorber(
    h: &Hypergraph3,
    fam: &RobustFamily,
    t: &AbsorberTuple,
    v: usize,
    zeta_star: f64,
) -> bool {
    !t.vertices().contains(&v)
        && verify_absorber_tuple(h, fam, t, zeta_star)
        && h.has_edge(v, t.a, t.b)
        && h.has_edge(v, t.b, t.c)
        && h.has_edge(v, t.c, t.d)
}

struct TupleSearch<'a> {
    h: &'a Hypergraph3,
    fam: &'a RobustFamily,
    conn: &'a [FixedBitSet],
    scan: &'a AbsorbableScan,
    zeta_star: f64,
}

impl TupleSearch<'_> {
    /// Up to `limit` v-absorbers with all nine vertices outside
    /// `forbidden`. Vertex orders are shuffled when an RNG is supplied.
    fn for_vertex(
        &self,
        v: usize,
        forbidden: &FixedBitSet,
        limit: usize,
        mut rng: Option<&mut ChaCha8Rng>,
    ) -> Vec<AbsorberTuple> {
        let n = self.h.n();
        let mut out = Vec::new();
        if limit == 0 {
            return out;
        }
        let rv = self.fam.r(v);
        let mut zs: Vec<usize> = self.scan.set.ones().filter(|&z| z != v).collect();
        if let Some(r) = rng.as_deref_mut() {
            zs.shuffle(r);
        }
        let mut attempts = 0usize;
        let mut blocked_q = forbidden.clone();
        blocked_q.insert(v);
        for z in zs {
            if forbidden.contains(z) {
                continue;
            }
            let rz = self.fam.r(z);
            // the witness cache skews toward low vertex ids, so fall back
            // to (or, when diversifying, go straight to) a fresh scan
            let quads: Vec<[usize; 4]> = match rng.as_deref_mut() {
                Some(r) => self.fresh_quads(z, &blocked_q, 4, Some(r)),
                None => {
                    let cached: Vec<[usize; 4]> = self.scan.witnesses[z]
                        .iter()
                        .copied()
                        .filter(|q| {
                            !q.contains(&v) && q.iter().all(|&u| !forbidden.contains(u))
                        })
                        .collect();
                    if cached.is_empty() {
                        self.fresh_quads(z, &blocked_q, 4, None)
                    } else {
                        cached
                    }
                }
            };
            for quad in quads {
                let mut blocked = blocked_q.clone();
                for &q in quad.iter().chain([z].iter()) {
                    blocked.insert(q);
                }
                if let Some([a, b, c, d]) =
                    self.common_three_path(rv, rz, &blocked, rng.as_deref_mut())
                {
                    let t = AbsorberTuple {
                        a,
                        b,
                        c,
                        d,
                        z,
                        x: quad[0],
                        y: quad[1],
                        y2: quad[2],
                        x2: quad[3],
                    };
                    if verify_absorber(self.h, self.fam, &t, v, self.zeta_star) {
                        out.push(t);
                        if out.len() == limit {
                            return out;
                        }
                    }
                }
                attempts += 1;
                if attempts > 4 * n * limit.max(1) {
                    return out;
                }
            }
        }
        out
    }

    /// Quadruples (x, y, y2, x2) for z computed directly against the edge
    /// set, all four vertices outside `blocked`.
    fn fresh_quads(
        &self,
        z: usize,
        blocked: &FixedBitSet,
        limit: usize,
        mut rng: Option<&mut ChaCha8Rng>,
    ) -> Vec<[usize; 4]> {
        let n = self.h.n();
        let mut out = Vec::new();
        let mut ys: Vec<usize> =
            (0..n).filter(|&y| y != z && !blocked.contains(y)).collect();
        if let Some(r) = rng.as_deref_mut() {
            ys.shuffle(r);
        }
        for y in ys {
            let mut y2s: Vec<usize> = (0..n)
                .filter(|&y2| {
                    y2 != y && y2 != z && !blocked.contains(y2) && self.h.has_edge(y, z, y2)
                })
                .collect();
            if let Some(r) = rng.as_deref_mut() {
                y2s.shuffle(r);
            }
            for y2 in y2s {
                let mut a = self.h.pair_neighborhood(y, z).clone();
                a.intersect_with(self.h.pair_neighborhood(y, y2));
                a.intersect_with(&self.conn[y]);
                a.difference_with(blocked);
                let mut b = self.h.pair_neighborhood(y2, z).clone();
                b.intersect_with(self.h.pair_neighborhood(y, y2));
                b.intersect_with(&self.conn[y2]);
                b.difference_with(blocked);
                for u in [y, y2, z] {
                    a.remove(u);
                    b.remove(u);
                }
                let mut xs: Vec<usize> = a.ones().collect();
                if let Some(r) = rng.as_deref_mut() {
                    xs.shuffle(r);
                }
                'pick: for x in xs {
                    let mut x2s: Vec<usize> = b.ones().filter(|&u| u != x).collect();
                    if let Some(r) = rng.as_deref_mut() {
                        x2s.shuffle(r);
                    }
                    if let Some(&x2) = x2s.first() {
                        out.push([x, y, y2, x2]);
                        break 'pick;
                    }
                }
                if out.len() >= limit {
                    return out;
                }
            }
        }
        out
    }

    /// A three-edge path a b c d in R_v intersect R_z with ab and cd
    /// connectable, avoiding blocked vertices.
    fn common_three_path(
        &self,
        rv: &crate::hgraph::Graph,
        rz: &crate::hgraph::Graph,
        blocked: &FixedBitSet,
        mut rng: Option<&mut ChaCha8Rng>,
    ) -> Option<[usize; 4]> {
        let n = self.h.n();
        let common = |u: usize| -> FixedBitSet {
            let mut s = rv.neighbors(u).clone();
            s.intersect_with(rz.neighbors(u));
            s
        };
        let order = |mut cands: Vec<usize>, rng: &mut Option<&mut ChaCha8Rng>| {
            if let Some(r) = rng.as_deref_mut() {
                cands.shuffle(r);
            }
            cands
        };
        let starts = order(
            (0..n)
                .filter(|&a| {
                    !blocked.contains(a) && rv.contains_vertex(a) && rz.contains_vertex(a)
                })
                .collect(),
            &mut rng,
        );
        for a in starts {
            let bs = order(
                common(a)
                    .ones()
                    .filter(|&b| !blocked.contains(b) && b != a && self.conn[a].contains(b))
                    .collect(),
                &mut rng,
            );
            for b in bs {
                let cs = order(
                    common(b)
                        .ones()
                        .filter(|&c| !blocked.contains(c) && c != a && c != b)
                        .collect(),
                    &mut rng,
                );
                for c in cs {
                    let ds = order(
                        common(c)
                            .ones()
                            .filter(|&d| {
                                !blocked.contains(d)
                                    && d != a
                                    && d != b
                                    && d != c
                                    && self.conn[c].contains(d)
                            })
                            .collect(),
                        &mut rng,
                    );
                    if let Some(&d) = ds.first() {
                        return Some([a, b, c, d]);
                    }
                }
            }
        }
        None
    }
}

/// Up to `limit` v-absorbers, deterministic order, no forbidden set.
pub fn find_v_absorbers(
    h: &Hypergraph3,
    fam: &RobustFamily,
    v: usize,
    zeta_star: f64,
    limit: usize,
) -> Vec<AbsorberTuple> {
    let empty = FixedBitSet::with_capacity(h.n());
    find_v_absorbers_avoiding(h, fam, v, zeta_star, DEFAULT_FRAC, limit, &empty)
}

/// As find_v_absorbers, with an explicit absorbability fraction and a
/// forbidden vertex set (the reservoir, during pipeline runs).
pub fn find_v_absorbers_avoiding(
    h: &Hypergraph3,
    fam: &RobustFamily,
    v: usize,
    zeta_star: f64,
    frac: f64,
    limit: usize,
    forbidden: &FixedBitSet,
) -> Vec<AbsorberTuple> {
    assert!(v < h.n());
    let conn = connectable_adjacency(fam, zeta_star);
    let scan = absorbable_scan(h, fam, zeta_star, frac, 16);
    let search = TupleSearch { h, fam, conn: &conn, scan: &scan, zeta_star };
    search.for_vertex(v, forbidden, limit, None)
}

#[derive(Debug, Clone)]
pub struct AbsorbConfig {
    pub zeta_star: f64,
    pub frac: f64,
    pub cover_min: usize,
    pub max_tuples: usize,
    pub pool_per_vertex: usize,
    pub witness_cap: usize,
    pub ell: usize,
    pub connect_budget: u64,
    pub path_vertex_cap: Option<usize>,
    /// Try short direct gaps (0 .. 3 ell + 1 interior vertices) between
    /// members before the fixed-length connection template. Off by
    /// default; the pipeline turns it on so the absorbing path fits at
    /// small n.
    pub flexible_connections: bool,
    pub seed: u64,
}

impl Default for AbsorbConfig {
    fn default() -> Self {
        AbsorbConfig {
            zeta_star: 0.25,
            frac: DEFAULT_FRAC,
            cover_min: 2,
            max_tuples: 8,
            pool_per_vertex: 6,
            witness_cap: 16,
            ell: 3,
            connect_budget: 200_000,
            path_vertex_cap: None,
            flexible_connections: false,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AbsorberFamily {
    pub tuples: Vec<AbsorberTuple>,
    /// v -> indices of tuples that are v-absorbers.
    pub per_vertex_index: Vec<Vec<usize>>,
    pub theta_star: f64,
}

/// Rebuilds the v -> tuple-indices map from the raw edge set.
pub fn build_per_vertex_index(h: &Hypergraph3, tuples: &[AbsorberTuple]) -> Vec<Vec<usize>> {
    (0..h.n())
        .map(|v| {
            tuples
                .iter()
                .enumerate()
                .filter(|(_, t)| {
                    !t.vertices().contains(&v)
                        && h.has_edge(v, t.a, t.b)
                        && h.has_edge(v, t.b, t.c)
                        && h.has_edge(v, t.c, t.d)
                })
                .map(|(i, _)| i)
                .collect()
        })
        .collect()
}

/// Selects a family of pairwise vertex-disjoint absorber tuples avoiding
/// the reservoir, so that every vertex has at least cover_min absorbers,
/// then pads with further disjoint tuples up to max_tuples.
pub fn choose_absorber_family(
    h: &Hypergraph3,
    fam: &RobustFamily,
    res: &Reservoir,
    cfg: &AbsorbConfig,
) -> Result<AbsorberFamily, AbsorbError> {
    let n = h.n();
    let conn = connectable_adjacency(fam, cfg.zeta_star);
    let scan = absorbable_scan(h, fam, cfg.zeta_star, cfg.frac, cfg.witness_cap);
    let search = TupleSearch { h, fam, conn: &conn, scan: &scan, zeta_star: cfg.zeta_star };

    let pool: Vec<AbsorberTuple> = (0..n)
        .into_par_iter()
        .flat_map_iter(|v| {
            let mut rng = ChaCha8Rng::seed_from_u64(crate::derive_seed(
                cfg.seed.wrapping_add(v as u64),
                "family-pool",
            ));
            search.for_vertex(v, &res.members, cfg.pool_per_vertex, Some(&mut rng))
        })
        .collect();
    let mut pool: Vec<AbsorberTuple> = {
        let mut seen = std::collections::HashSet::new();
        pool.into_iter().filter(|t| seen.insert(*t)).collect()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(crate::derive_seed(cfg.seed, "family-pick"));
    pool.shuffle(&mut rng);

    let absorbs = |t: &AbsorberTuple, v: usize| {
        !t.vertices().contains(&v)
            && h.has_edge(v, t.a, t.b)
            && h.has_edge(v, t.b, t.c)
            && h.has_edge(v, t.c, t.d)
    };
    let mut selected: Vec<AbsorberTuple> = Vec::new();
    // `used` holds the reservoir plus every selected tuple's vertices, so
    // it doubles as the forbidden set for fresh searches
    let mut used = res.members.clone();
    let mut coverage = vec![0usize; n];
    let take = |t: AbsorberTuple,
                selected: &mut Vec<AbsorberTuple>,
                used: &mut FixedBitSet,
                coverage: &mut Vec<usize>| {
        for u in t.vertices() {
            used.insert(u);
        }
        for v in 0..n {
            if absorbs(&t, v) {
                coverage[v] += 1;
            }
        }
        selected.push(t);
    };
    let fresh = |v: usize, round: usize, used: &FixedBitSet| {
        let mut r = ChaCha8Rng::seed_from_u64(crate::derive_seed(
            cfg.seed ^ ((v as u64) << 24 | round as u64),
            "family-fresh",
        ));
        search.for_vertex(v, used, 1, Some(&mut r)).into_iter().next()
    };

    let mut uncovered = Vec::new();
    for v in 0..n {
        while coverage[v] < cfg.cover_min && selected.len() < cfg.max_tuples {
            let pick = pool
                .iter()
                .filter(|t| absorbs(t, v) && t.vertices().iter().all(|&u| !used.contains(u)))
                .max_by_key(|t| {
                    (0..n).filter(|&w| coverage[w] < cfg.cover_min && absorbs(t, w)).count()
                })
                .copied()
                .or_else(|| fresh(v, selected.len(), &used));
            match pick {
                Some(t) => take(t, &mut selected, &mut used, &mut coverage),
                None => break,
            }
        }
        if coverage[v] < cfg.cover_min {
            uncovered.push(v);
        }
    }
    if !uncovered.is_empty() {
        return Err(AbsorbError::CoverageUnreachable(uncovered));
    }
    let mut stalls = 0;
    let mut vi = 0;
    while selected.len() < cfg.max_tuples && stalls < n {
        let v = vi % n;
        vi += 1;
        let pick = pool
            .iter()
            .find(|t| t.vertices().iter().all(|&u| !used.contains(u)))
            .copied()
            .or_else(|| fresh(v, cfg.max_tuples + vi, &used));
        match pick {
            Some(t) => {
                take(t, &mut selected, &mut used, &mut coverage);
                stalls = 0;
            }
            None => stalls += 1,
        }
    }

    debug_assert!(selected
        .iter()
        .all(|t| t.vertices().iter().all(|&u| !res.members.contains(u))));
    let per_vertex_index = build_per_vertex_index(h, &selected);
    Ok(AbsorberFamily { tuples: selected, per_vertex_index, theta_star: res.theta_star })
}

#[derive(Debug, Clone, Serialize)]
pub struct SubpathPos {
    pub swap: usize,
    pub park: usize,
}

#[derive(Debug, Clone)]
pub struct AbsorbingPath {
    pub path: TightPath,
    pub family: AbsorberFamily,
    /// Positions of each tuple's two subpaths inside the path at build
    /// time (before any absorption).
    pub subpath_index: Vec<SubpathPos>,
}

/// Strings all swap and park subpaths of the family together into one
/// tight path, connecting consecutive members while avoiding the
/// reservoir and everything already placed.
pub fn build_absorbing_path(
    h: &Hypergraph3,
    fam: &RobustFamily,
    res: &Reservoir,
    family: AbsorberFamily,
    cfg: &AbsorbConfig,
) -> Result<AbsorbingPath, AbsorbError> {
    if family.tuples.is_empty() {
        return Err(AbsorbError::EmptyFamily);
    }
    let n = h.n();
    let members: Vec<Vec<usize>> = family
        .tuples
        .iter()
        .flat_map(|t| [t.swap_subpath().to_vec(), t.park_subpath().to_vec()])
        .collect();
    let mut reserved = res.members.clone();
    for m in &members {
        for &v in m {
            reserved.insert(v);
        }
    }

    let mut seq = members[0].clone();
    let mut positions = vec![0usize];
    for next in &members[1..] {
        let from = (seq[seq.len() - 2], seq[seq.len() - 1]);
        let to = (next[0], next[1]);
        let mut avoid = reserved.clone();
        for &v in &seq {
            avoid.insert(v);
        }
        let interior = if cfg.flexible_connections {
            let mut allowed = avoid.clone();
            allowed.toggle_range(..);
            crate::connect::find_gap_interior(h, from, to, &allowed, 3 * cfg.ell + 1, cfg.connect_budget)
        } else {
            None
        };
        match interior {
            Some(inner) => seq.extend_from_slice(&inner),
            None => {
                let req = ConnectRequest {
                    start: from,
                    end: to,
                    zeta: cfg.zeta_star,
                    avoid,
                    ell: cfg.ell,
                };
                let conn = find_connecting_path(h, fam, &req, cfg.connect_budget)
                    .map_err(|source| AbsorbError::ConnectionStuck { from, to, source })?;
                let inner = conn.seq();
                seq.extend_from_slice(&inner[2..inner.len() - 2]);
            }
        }
        positions.push(seq.len());
        seq.extend_from_slice(next);
    }

    let cap = cfg.path_vertex_cap.unwrap_or(2 + (3 * cfg.ell + 6) * members.len());
    if seq.len() > cap {
        return Err(AbsorbError::PathCapExceeded { got: seq.len(), cap });
    }
    let path = TightPath::new_path(h, seq).expect("member and connector windows are edges");
    debug_assert!({
        let (p, q) = path.start_pair();
        fam.is_connectable(cfg.zeta_star, p, q)
    });
    let subpath_index = positions
        .chunks(2)
        .map(|c| SubpathPos { swap: c[0], park: c[1] })
        .collect();
    let _ = n;
    Ok(AbsorbingPath { path, family, subpath_index })
}

/// Absorbs every vertex of X into the path: assigns a distinct absorber
/// tuple to each X-vertex by bipartite matching, then performs the two
/// subpath rewrites per assignment. End-pairs are unchanged and the
/// vertex set grows by exactly X.
pub fn absorb_vertices(
    h: &Hypergraph3,
    ap: &AbsorbingPath,
    xs: &[usize],
    cap: usize,
) -> Result<TightPath, AbsorbError> {
    if xs.is_empty() {
        return Ok(ap.path.clone());
    }
    if xs.len() > cap {
        return Err(AbsorbError::CapacityExceeded { xs: xs.len(), cap });
    }
    let on_path = ap.path.vertex_set(h.n());
    for &v in xs {
        if on_path.contains(v) {
            return Err(AbsorbError::XIntersectsPath(v));
        }
    }
    {
        let mut sorted = xs.to_vec();
        sorted.sort();
        assert!(sorted.windows(2).all(|w| w[0] != w[1]), "absorb set has duplicates");
    }

    // maximum bipartite matching X-vertices -> tuples (Kuhn's algorithm)
    let tuples = ap.family.tuples.len();
    let mut owner: Vec<Option<usize>> = vec![None; tuples];
    fn augment(
        xi: usize,
        options: &[Vec<usize>],
        owner: &mut Vec<Option<usize>>,
        visited: &mut Vec<bool>,
    ) -> bool {
        for &ti in &options[xi] {
            if visited[ti] {
                continue;
            }
            visited[ti] = true;
            if owner[ti].is_none()
                || augment(owner[ti].unwrap(), options, owner, visited)
            {
                owner[ti] = Some(xi);
                return true;
            }
        }
        false
    }
    let options: Vec<Vec<usize>> =
        xs.iter().map(|&v| ap.family.per_vertex_index[v].clone()).collect();
    for xi in 0..xs.len() {
        let mut visited = vec![false; tuples];
        if !augment(xi, &options, &mut owner, &mut visited) {
            return Err(AbsorbError::NoAbsorberFor(xs[xi]));
        }
    }

    let mut seq = ap.path.seq().to_vec();
    for (ti, xi) in owner.iter().enumerate() {
        let Some(xi) = *xi else { continue };
        let v = xs[xi];
        let t = &ap.family.tuples[ti];
        let pos_z = seq.iter().position(|&u| u == t.z).expect("z sits on the path");
        seq[pos_z] = v;
        let pos_y2 = seq.iter().position(|&u| u == t.y2).expect("y2 sits on the path");
        seq.insert(pos_y2, t.z);
    }
    let out = TightPath::new_path(h, seq).expect("absorption swaps preserve tightness");
    debug_assert_eq!(out.start_pair(), ap.path.start_pair());
    debug_assert_eq!(out.end_pair(), ap.path.end_pair());
    Ok(out)
}
