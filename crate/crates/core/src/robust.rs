//! Robust subgraph extraction from link graphs, and the checks that
//! qualify the result: inseparability, path-count robustness, and the
//! pairwise edge-intersection bound.
//!
//! The extractor realizes a maximality argument as a terminating exchange
//! procedure: keep a partition of the vertex set subject to
//!   (a) every part has at least mu*n/2 vertices, and
//!   (b) the crossing-edge total is at most 2(t-1) * mu^2 * n^2 for t parts,
//! and refine it whenever a witness shows the current partition is not
//! maximal: either a large low-degree peel set inside the largest part, or
//! a sparse cut of the candidate subgraph. When no refinement applies, the
//! largest part minus its peel set is the robust subgraph.

use crate::hgraph::Graph;
use fixedbitset::FixedBitSet;
use serde::Serialize;

/// Largest vertex count for which inseparability is decided exhaustively.
pub const INSEP_EXHAUSTIVE_CAP: usize = 22;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum RobustError {
    #[error("graph of {size} vertices exceeds the exhaustive cap {cap}")]
    TooLargeForExhaustive { size: usize, cap: usize },
    #[error("candidates live over different ambient sets ({0} vs {1})")]
    MismatchedAmbient(usize, usize),
}

/// Ceiling that forgives float noise just below an integer.
pub(crate) fn ceil_tol(x: f64) -> usize {
    (x - 1e-9).ceil().max(0.0) as usize
}

/// One step of the extraction log.
#[derive(Debug, Clone, Serialize)]
pub enum TraceEvent {
    /// The largest part shed a full-size low-degree peel set as a new part.
    PeelSplit { part_size: usize, peel_size: usize, crossing_total: usize, parts_after: usize },
    /// A sparse cut of the candidate subgraph refined the partition.
    CutSplit { side_a: usize, side_b: usize, cut_crossing: usize, parts_after: usize },
    /// A refinement witness existed but would have broken (a) or (b).
    SplitRejected { reason: String },
    /// Vertex peeled from the final part, with its fresh-neighbor count.
    Peeled { vertex: usize, fresh_neighbors: usize },
    /// Extraction finished.
    Finalized { u_size: usize, crossing_to_rest: usize },
}

/// Result of extracting a robust subgraph from a link graph L.
#[derive(Debug, Clone)]
pub struct RobustCandidate {
    /// The graph the extraction ran on.
    pub base: Graph,
    /// U: the largest final part minus its peel set.
    pub u: FixedBitSet,
    /// R = base[U].
    pub r: Graph,
    /// Final partition V_1, .., V_t (size desc, then smallest vertex asc).
    pub partition: Vec<Vec<usize>>,
    /// W: peel order of the final part.
    pub peeled: Vec<usize>,
    pub mu: f64,
    /// |V_1| = eta * n.
    pub eta: f64,
    pub trace: Vec<TraceEvent>,
}

impl RobustCandidate {
    /// Extraction on a tiny or adversarial graph can peel the whole part.
    pub fn is_degenerate(&self) -> bool {
        self.u.is_clear()
    }

    pub fn u_size(&self) -> usize {
        self.u.count_ones(..)
    }

    /// e_L(U, V(L) \ U), recomputed from the base graph.
    pub fn crossing_edges(&self) -> usize {
        let mut rest = self.base.vertex_set().clone();
        rest.difference_with(&self.u);
        self.base.e_between(&self.u, &rest)
    }
}

fn sort_parts(parts: &mut [Vec<usize>]) {
    for p in parts.iter_mut() {
        p.sort_unstable();
    }
    parts.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
}

fn to_bitset(n: usize, vs: &[usize]) -> FixedBitSet {
    let mut s = FixedBitSet::with_capacity(n);
    for &v in vs {
        s.insert(v);
    }
    s
}

/// Greedy maximal peel: repeatedly remove the smallest-id vertex having
/// fewer than mu*n neighbors among the not-yet-peeled part vertices.
fn greedy_peel(l: &Graph, part: &[usize], mu_n: f64) -> Vec<(usize, usize)> {
    let mut remaining = to_bitset(l.ambient_n(), part);
    let mut order = Vec::new();
    loop {
        let mut pick = None;
        for v in remaining.ones() {
            let mut fresh = l.neighbors(v).clone();
            fresh.intersect_with(&remaining);
            let count = fresh.count_ones(..);
            if (count as f64) < mu_n - 1e-9 {
                pick = Some((v, count));
                break; // ones() ascends, so this is the smallest id
            }
        }
        match pick {
            Some((v, count)) => {
                remaining.remove(v);
                order.push((v, count));
            }
            None => return order,
        }
    }
}

fn total_crossing(l: &Graph, parts: &[Vec<usize>]) -> usize {
    let within: usize = parts
        .iter()
        .map(|p| l.e_within(&to_bitset(l.ambient_n(), p)))
        .sum();
    l.edge_count() - within
}

fn graph_fingerprint(g: &Graph) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut mix = |x: u64| {
        h ^= x;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    };
    mix(g.ambient_n() as u64);
    mix(g.vertex_count() as u64);
    for (u, v) in g.edges() {
        mix((u * g.ambient_n() + v) as u64);
    }
    h
}

/// Extracts a robust subgraph from L with mu = alpha / 72.
///
/// Returns the candidate together with the final partition and the full
/// refinement trace. Small or sparse graphs may come back degenerate
/// (empty U); the caller decides what that means.
pub fn extract_robust_subgraph(l: &Graph, alpha: f64) -> RobustCandidate {
    assert!(l.vertex_count() >= 1, "extraction needs at least one vertex");
    assert!(alpha > 0.0 && alpha <= 4.0 / 9.0, "alpha out of range: {alpha}");
    let n = l.vertex_count();
    let nf = n as f64;
    let mu = alpha / 72.0;
    let mu_n = mu * nf;
    let part_floor = mu_n / 2.0 - 1e-9;
    // splitting off single vertices would preempt the final peel, so a peel
    // set only becomes a part when it has at least two vertices
    let split_size = ceil_tol(mu_n / 2.0).max(2);
    let crossing_budget = |t: usize| 2.0 * (t as f64 - 1.0) * mu * mu * nf * nf + 1e-9;

    let mut parts: Vec<Vec<usize>> = vec![l.vertices().collect()];
    let mut trace = Vec::new();
    loop {
        sort_parts(&mut parts);
        let v1 = parts[0].clone();
        let peel = greedy_peel(l, &v1, mu_n);

        if peel.len() >= split_size {
            let w_prime: Vec<usize> = peel[..split_size].iter().map(|&(v, _)| v).collect();
            let w_set = to_bitset(l.ambient_n(), &w_prime);
            let rest: Vec<usize> = v1.iter().copied().filter(|&v| !w_set.contains(v)).collect();
            if rest.len() as f64 >= part_floor {
                let mut candidate_parts = parts.clone();
                candidate_parts[0] = rest;
                candidate_parts.push(w_prime);
                let crossing = total_crossing(l, &candidate_parts);
                if (crossing as f64) <= crossing_budget(candidate_parts.len()) {
                    trace.push(TraceEvent::PeelSplit {
                        part_size: v1.len(),
                        peel_size: split_size,
                        crossing_total: crossing,
                        parts_after: candidate_parts.len(),
                    });
                    parts = candidate_parts;
                    continue;
                }
                trace.push(TraceEvent::SplitRejected {
                    reason: format!("peel split crossing {crossing} over budget"),
                });
            } else {
                trace.push(TraceEvent::SplitRejected {
                    reason: "peel split leaves the part below the size floor".into(),
                });
            }
        }

        let w_set = to_bitset(l.ambient_n(), &peel.iter().map(|&(v, _)| v).collect::<Vec<_>>());
        let u: Vec<usize> = v1.iter().copied().filter(|&v| !w_set.contains(v)).collect();
        let u_set = to_bitset(l.ambient_n(), &u);
        let r = l.induced(&u_set);

        // a sparse cut of R shows the partition was not maximal: V_1 can be
        // replaced by X ∪ W and Y
        let seed = crate::derive_seed(graph_fingerprint(l), "insep-cut");
        if let Some((x_side, cut_crossing)) = search_refuting_cut(&r, mu, 64, seed) {
            let mut part_a: Vec<usize> = x_side.ones().collect();
            part_a.extend(peel.iter().map(|&(v, _)| v));
            let part_b: Vec<usize> = u.iter().copied().filter(|&v| !x_side.contains(v)).collect();
            if part_a.len() as f64 >= part_floor && part_b.len() as f64 >= part_floor {
                let mut candidate_parts = parts.clone();
                candidate_parts[0] = part_a.clone();
                candidate_parts.push(part_b.clone());
                let crossing = total_crossing(l, &candidate_parts);
                if (crossing as f64) <= crossing_budget(candidate_parts.len()) {
                    trace.push(TraceEvent::CutSplit {
                        side_a: part_a.len(),
                        side_b: part_b.len(),
                        cut_crossing,
                        parts_after: candidate_parts.len(),
                    });
                    parts = candidate_parts;
                    continue;
                }
                trace.push(TraceEvent::SplitRejected {
                    reason: format!("cut split crossing {crossing} over budget"),
                });
            } else {
                trace.push(TraceEvent::SplitRejected {
                    reason: "cut split makes a part below the size floor".into(),
                });
            }
        }

        for &(v, fresh) in &peel {
            trace.push(TraceEvent::Peeled { vertex: v, fresh_neighbors: fresh });
        }
        let eta = v1.len() as f64 / nf;
        let mut cand = RobustCandidate {
            base: l.clone(),
            u: u_set,
            r,
            partition: parts,
            peeled: peel.into_iter().map(|(v, _)| v).collect(),
            mu,
            eta,
            trace,
        };
        let crossing_to_rest = cand.crossing_edges();
        cand.trace.push(TraceEvent::Finalized { u_size: cand.u_size(), crossing_to_rest });
        return cand;
    }
}

/// Verdict of an inseparability check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum InsepVerdict {
    /// Exhaustively certified: minimum degree and every qualifying cut pass.
    Proved,
    /// A vertex falls below mu * |V|.
    RefutedDegree { vertex: usize, degree: usize },
    /// A bipartition with both sides >= mu * |V| crosses fewer than
    /// mu^2 * |V|^2 edges; `side` is the smaller side.
    RefutedCut { side: Vec<usize>, crossing: usize },
    /// All sampled and heuristic cuts pass; nothing is certified.
    SampledOk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsepMode {
    Exhaustive,
    Sampled { cuts: usize, seed: u64 },
}

/// Checks mu-inseparability: minimum degree at least mu * |V|, and every
/// bipartition with both sides at least mu * |V| crossed by at least
/// mu^2 * |V|^2 edges. Exhaustive mode enumerates every bipartition.
pub fn check_inseparable(g: &Graph, mu: f64, mode: InsepMode) -> Result<InsepVerdict, RobustError> {
    let k = g.vertex_count();
    assert!(k >= 1, "inseparability needs at least one vertex");
    let kf = k as f64;
    for v in g.vertices() {
        let d = g.degree(v);
        if (d as f64) < mu * kf - 1e-9 {
            return Ok(InsepVerdict::RefutedDegree { vertex: v, degree: d });
        }
    }
    match mode {
        InsepMode::Exhaustive => {
            if k > INSEP_EXHAUSTIVE_CAP {
                return Err(RobustError::TooLargeForExhaustive { size: k, cap: INSEP_EXHAUSTIVE_CAP });
            }
            match exhaustive_refuting_cut(g, mu) {
                Some((side, crossing)) => Ok(InsepVerdict::RefutedCut {
                    side: side.ones().collect(),
                    crossing,
                }),
                None => Ok(InsepVerdict::Proved),
            }
        }
        InsepMode::Sampled { cuts, seed } => match search_refuting_cut(g, mu, cuts, seed) {
            Some((side, crossing)) => Ok(InsepVerdict::RefutedCut {
                side: side.ones().collect(),
                crossing,
            }),
            None => Ok(InsepVerdict::SampledOk),
        },
    }
}

fn cut_refutes(g: &Graph, side: &FixedBitSet, mu: f64) -> Option<usize> {
    let k = g.vertex_count() as f64;
    let a = side.count_ones(..);
    let b = g.vertex_count() - a;
    if (a as f64) < mu * k - 1e-9 || (b as f64) < mu * k - 1e-9 {
        return None;
    }
    let mut other = g.vertex_set().clone();
    other.difference_with(side);
    let crossing = g.e_between(side, &other);
    if ((crossing as f64) + 1e-9) < mu * mu * k * k {
        Some(crossing)
    } else {
        None
    }
}

fn smaller_side(g: &Graph, side: FixedBitSet) -> FixedBitSet {
    if side.count_ones(..) * 2 <= g.vertex_count() {
        side
    } else {
        let mut other = g.vertex_set().clone();
        other.difference_with(&side);
        other
    }
}

/// Complete enumeration of bipartitions (the first vertex pinned to one
/// side), returning the sparsest refuting cut. Only for graphs within
/// `INSEP_EXHAUSTIVE_CAP`.
fn exhaustive_refuting_cut(g: &Graph, mu: f64) -> Option<(FixedBitSet, usize)> {
    let verts: Vec<usize> = g.vertices().collect();
    let k = verts.len();
    if k < 2 {
        return None;
    }
    let mut best: Option<(FixedBitSet, usize)> = None;
    for mask in 0u64..(1u64 << (k - 1)) {
        let mut side = FixedBitSet::with_capacity(g.ambient_n());
        side.insert(verts[0]);
        for (i, &v) in verts.iter().enumerate().skip(1) {
            if mask & (1 << (i - 1)) != 0 {
                side.insert(v);
            }
        }
        if let Some(crossing) = cut_refutes(g, &side, mu) {
            if best.as_ref().map(|&(_, c)| crossing < c).unwrap_or(true) {
                best = Some((smaller_side(g, side), crossing));
            }
        }
    }
    best
}

/// Heuristic cut search: exhaustive at small scale, otherwise connected
/// components, low-conductance greedy growth, and seeded random cuts.
fn search_refuting_cut(g: &Graph, mu: f64, random_cuts: usize, seed: u64) -> Option<(FixedBitSet, usize)> {
    let verts: Vec<usize> = g.vertices().collect();
    let k = verts.len();
    if k < 2 {
        return None;
    }
    if k <= INSEP_EXHAUSTIVE_CAP {
        return exhaustive_refuting_cut(g, mu);
    }

    // components: a union of whole components crosses zero edges
    let comps = components(g, &verts);
    if comps.len() > 1 {
        let mut side = FixedBitSet::with_capacity(g.ambient_n());
        // pack components greedily toward half the vertices
        let mut sizes: Vec<(usize, usize)> = comps.iter().map(|c| c.count_ones(..)).enumerate().collect();
        sizes.sort_by_key(|&(_, s)| std::cmp::Reverse(s));
        let mut have = 0;
        for (i, s) in sizes {
            if have + s <= k / 2 || have == 0 {
                side.union_with(&comps[i]);
                have += s;
            }
        }
        if let Some(crossing) = cut_refutes(g, &side, mu) {
            return Some((smaller_side(g, side), crossing));
        }
    }

    // greedy growth from each of the lowest-degree vertices: absorb the
    // outside vertex with the most neighbors inside, track the best cut
    let mut by_degree = verts.clone();
    by_degree.sort_by_key(|&v| (g.degree(v), v));
    for &start in by_degree.iter().take(4) {
        let mut side = FixedBitSet::with_capacity(g.ambient_n());
        side.insert(start);
        for _ in 1..k - 1 {
            let mut best: Option<(i64, usize)> = None;
            for v in g.vertices() {
                if side.contains(v) {
                    continue;
                }
                let mut inside = g.neighbors(v).clone();
                inside.intersect_with(&side);
                let gain = inside.count_ones(..) as i64 * 2 - g.degree(v) as i64;
                if best.map(|(b, bv)| (gain, v) > (b, bv)).unwrap_or(true) {
                    best = Some((gain, v));
                }
            }
            let Some((_, v)) = best else { break };
            side.insert(v);
            if let Some(crossing) = cut_refutes(g, &side, mu) {
                return Some((smaller_side(g, side), crossing));
            }
        }
    }

    // seeded random near-balanced cuts
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut pool = verts.clone();
    for _ in 0..random_cuts {
        pool.shuffle(&mut rng);
        let take = rng.gen_range(ceil_tol(mu * k as f64).max(1)..=k / 2);
        let side = to_bitset(g.ambient_n(), &pool[..take]);
        if let Some(crossing) = cut_refutes(g, &side, mu) {
            return Some((smaller_side(g, side), crossing));
        }
    }
    None
}

fn components(g: &Graph, verts: &[usize]) -> Vec<FixedBitSet> {
    let mut seen = FixedBitSet::with_capacity(g.ambient_n());
    let mut out = Vec::new();
    for &s in verts {
        if seen.contains(s) {
            continue;
        }
        let mut comp = FixedBitSet::with_capacity(g.ambient_n());
        let mut stack = vec![s];
        comp.insert(s);
        seen.insert(s);
        while let Some(v) = stack.pop() {
            for w in g.neighbors(v).ones() {
                if !seen.contains(w) {
                    seen.insert(w);
                    comp.insert(w);
                    stack.push(w);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// Path-count robustness measurement.
#[derive(Debug, Clone, Serialize)]
pub struct RobustnessReport {
    pub ell: usize,
    /// min over ordered distinct vertex pairs of count_paths / |V|^(ell-1).
    pub beta_observed: f64,
    /// beta_observed >= the requested beta.
    pub meets_beta: bool,
    pub pairs_checked: usize,
    /// True when the pair budget forced sampling instead of all pairs.
    pub partial: bool,
    /// Filled by callers that ran the companion checks.
    pub inseparable_verdict: Option<InsepVerdict>,
    pub crossing_edges: Option<usize>,
    pub intersection_pairs_checked: Option<usize>,
}

/// Measures the worst pair's count of simple ell-edge paths, normalized by
/// |V|^(ell-1), and compares with beta. With more ordered pairs than
/// `pair_budget` a deterministic stride sample is used and the report is
/// marked partial.
pub fn check_robust(
    g: &Graph,
    beta: f64,
    ell: usize,
    pair_budget: usize,
) -> Result<RobustnessReport, crate::oracle::OracleError> {
    assert!(ell >= 3 && ell % 2 == 1, "ell must be odd and at least 3");
    let verts: Vec<usize> = g.vertices().collect();
    let k = verts.len();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for &x in &verts {
        for &y in &verts {
            if x != y {
                pairs.push((x, y));
            }
        }
    }
    let total = pairs.len();
    let partial = total > pair_budget.max(1);
    let stride = if partial { total.div_ceil(pair_budget.max(1)) } else { 1 };
    let mut min_ratio = f64::INFINITY;
    let mut checked = 0;
    let denom = (k as f64).powi(ell as i32 - 1);
    for (x, y) in pairs.into_iter().step_by(stride) {
        let c = crate::oracle::count_paths(g, x, y, ell)?;
        let ratio = (c as f64) / denom;
        min_ratio = min_ratio.min(ratio);
        checked += 1;
    }
    if !min_ratio.is_finite() {
        min_ratio = 0.0;
    }
    Ok(RobustnessReport {
        ell,
        beta_observed: min_ratio,
        meets_beta: min_ratio >= beta - 1e-12,
        pairs_checked: checked,
        partial,
        inseparable_verdict: None,
        crossing_edges: None,
        intersection_pairs_checked: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IntersectVerdict {
    Pass,
    Fail,
    HypothesesUnmet,
}

/// Exact |E(R_1) ∩ E(R_2)|, judged against alpha * n^2 / 2 whenever both
/// candidates meet the size and edge-count hypotheses
/// |U| >= (2/3 + alpha/2) n and e(R) >= (5/9 + alpha/2) n^2/2 - (n - |U|)^2/2.
pub fn intersection_check(
    r1: &RobustCandidate,
    r2: &RobustCandidate,
    alpha: f64,
    n: usize,
) -> Result<(usize, IntersectVerdict), RobustError> {
    if r1.base.ambient_n() != n || r2.base.ambient_n() != n {
        return Err(RobustError::MismatchedAmbient(r1.base.ambient_n(), r2.base.ambient_n()));
    }
    let count = r1.r.intersection_edge_count(&r2.r);
    let nf = n as f64;
    let hyp = |c: &RobustCandidate| {
        let u = c.u_size() as f64;
        let e = c.r.edge_count() as f64;
        u >= (2.0 / 3.0 + alpha / 2.0) * nf - 1e-9
            && e >= (5.0 / 9.0 + alpha / 2.0) * nf * nf / 2.0 - (nf - u) * (nf - u) / 2.0 - 1e-9
    };
    let verdict = if !(hyp(r1) && hyp(r2)) {
        IntersectVerdict::HypothesesUnmet
    } else if (count as f64) >= alpha * nf * nf / 2.0 - 1e-9 {
        IntersectVerdict::Pass
    } else {
        IntersectVerdict::Fail
    };
    Ok((count, verdict))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::random_hypergraph;

    fn clique_graph(n: usize, vs: &[usize]) -> Graph {
        let mut g = Graph::full_vertex_set(n);
        for (i, &u) in vs.iter().enumerate() {
            for &v in &vs[i + 1..] {
                g.add_edge(u, v);
            }
        }
        g
    }

    #[test]
    fn complete_graph_extracts_whole() {
        let l = Graph::complete(12);
        let c = extract_robust_subgraph(&l, 0.1);
        assert_eq!(c.partition.len(), 1);
        assert!(c.peeled.is_empty());
        assert_eq!(c.u_size(), 12);
        assert!((c.eta - 1.0).abs() < 1e-12);
        assert_eq!(c.crossing_edges(), 0);
    }

    #[test]
    fn disjoint_cliques_split_into_components() {
        let mut l = clique_graph(16, &(0..8).collect::<Vec<_>>());
        let vs: Vec<usize> = (8..16).collect();
        for (i, &u) in vs.iter().enumerate() {
            for &v in &vs[i + 1..] {
                l.add_edge(u, v);
            }
        }
        let c = extract_robust_subgraph(&l, 0.1);
        assert_eq!(c.partition.len(), 2);
        assert!(c.peeled.is_empty());
        assert_eq!(c.u_size(), 8);
        let u: Vec<usize> = c.u.ones().collect();
        assert!(u == (0..8).collect::<Vec<_>>() || u == (8..16).collect::<Vec<_>>());
        assert_eq!(c.crossing_edges(), 0);
        assert!(c.trace.iter().any(|e| matches!(e, TraceEvent::CutSplit { cut_crossing: 0, .. })));
    }

    #[test]
    fn isolated_vertex_is_peeled() {
        let l = clique_graph(11, &(0..10).collect::<Vec<_>>());
        let c = extract_robust_subgraph(&l, 0.1);
        assert_eq!(c.peeled, vec![10]);
        assert_eq!(c.u_size(), 10);
        assert!(!c.u.contains(10));
        assert_eq!(c.partition.len(), 1);
    }

    #[test]
    fn extraction_degree_guarantee() {
        for seed in 0..5u64 {
            let h = random_hypergraph(40, 0.8, seed);
            let l = h.link_graph(seed as usize % 40);
            let alpha = 0.2;
            let c = extract_robust_subgraph(&l, alpha);
            assert!(!c.is_degenerate());
            let mu_n = c.mu * l.vertex_count() as f64;
            for v in c.u.ones() {
                let mut inside = c.r.neighbors(v).clone();
                inside.intersect_with(&c.u);
                assert!(
                    inside.count_ones(..) as f64 >= mu_n - 1e-6,
                    "vertex {v} has degree {} in R, need {mu_n}",
                    inside.count_ones(..)
                );
            }
            // trace-reported crossing agrees with a recount
            let reported = c.trace.iter().find_map(|e| match e {
                TraceEvent::Finalized { crossing_to_rest, .. } => Some(*crossing_to_rest),
                _ => None,
            });
            assert_eq!(reported, Some(c.crossing_edges()));
        }
    }

    /// Dense links: the extractor must deliver the large-U and small-crossing
    /// guarantees that downstream stages assume.
    #[test]
    fn dense_random_links_meet_size_and_crossing_bounds() {
        let n = 60;
        let alpha = 0.2;
        let h = random_hypergraph(n, 0.9, 11);
        for v in [0usize, 17, 59] {
            let l = h.link_graph(v);
            let e_l = l.edge_count() as f64;
            let nf = n as f64;
            assert!(e_l >= (5.0 / 9.0 + alpha) * nf * nf / 2.0, "link {v} unexpectedly sparse");
            let c = extract_robust_subgraph(&l, alpha);
            assert!(c.u_size() as f64 >= (2.0 / 3.0 + alpha / 2.0) * nf, "|U| = {}", c.u_size());
            assert!(
                (c.crossing_edges() as f64) <= alpha * nf * nf / 4.0,
                "crossing = {}",
                c.crossing_edges()
            );
        }
    }

    #[test]
    fn inseparable_k10_proved() {
        let g = Graph::complete(10);
        assert_eq!(check_inseparable(&g, 0.2, InsepMode::Exhaustive).unwrap(), InsepVerdict::Proved);
    }

    #[test]
    fn bridge_between_cliques_is_refuted() {
        let mut g = clique_graph(12, &(0..6).collect::<Vec<_>>());
        let vs: Vec<usize> = (6..12).collect();
        for (i, &u) in vs.iter().enumerate() {
            for &v in &vs[i + 1..] {
                g.add_edge(u, v);
            }
        }
        g.add_edge(5, 6);
        match check_inseparable(&g, 0.3, InsepMode::Exhaustive).unwrap() {
            InsepVerdict::RefutedCut { side, crossing } => {
                assert_eq!(crossing, 1);
                assert_eq!(side.len(), 6);
            }
            other => panic!("expected a refuting cut, got {other:?}"),
        }
    }

    #[test]
    fn isolated_vertex_refutes_degree() {
        let g = clique_graph(8, &(0..7).collect::<Vec<_>>());
        match check_inseparable(&g, 0.1, InsepMode::Exhaustive).unwrap() {
            InsepVerdict::RefutedDegree { vertex: 7, degree: 0 } => {}
            other => panic!("expected degree refutation, got {other:?}"),
        }
    }

    #[test]
    fn exhaustive_cap_is_enforced() {
        let g = Graph::complete(23);
        assert_eq!(
            check_inseparable(&g, 0.1, InsepMode::Exhaustive),
            Err(RobustError::TooLargeForExhaustive { size: 23, cap: 22 })
        );
        // sampled mode has no cap
        let v = check_inseparable(&g, 0.1, InsepMode::Sampled { cuts: 16, seed: 1 }).unwrap();
        assert_eq!(v, InsepVerdict::SampledOk);
    }

    /// Exhaustive mode agrees with a test-local brute force over all
    /// bipartitions.
    #[test]
    fn exhaustive_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        for seed in 0..12u64 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let k = 8 + (seed as usize % 4);
            let mut g = Graph::full_vertex_set(k);
            for u in 0..k {
                for v in u + 1..k {
                    if rng.gen::<f64>() < 0.35 {
                        g.add_edge(u, v);
                    }
                }
            }
            let mu = 0.25;
            let verdict = check_inseparable(&g, mu, InsepMode::Exhaustive).unwrap();
            // brute force: degree clause, then every bipartition
            let kf = k as f64;
            let mut brute_ok = (0..k).all(|v| g.degree(v) as f64 >= mu * kf - 1e-9);
            if brute_ok {
                'outer: for mask in 1u32..(1 << k) - 1 {
                    let a = mask.count_ones() as usize;
                    let b = k - a;
                    if (a as f64) < mu * kf - 1e-9 || (b as f64) < mu * kf - 1e-9 {
                        continue;
                    }
                    let mut crossing = 0;
                    for u in 0..k {
                        for v in u + 1..k {
                            if g.has_edge(u, v) && ((mask >> u) & 1) != ((mask >> v) & 1) {
                                crossing += 1;
                            }
                        }
                    }
                    if (crossing as f64) + 1e-9 < mu * mu * kf * kf {
                        brute_ok = false;
                        break 'outer;
                    }
                }
            }
            assert_eq!(verdict == InsepVerdict::Proved, brute_ok, "seed {seed}");
        }
    }

    #[test]
    fn robustness_k6() {
        let r = check_robust(&Graph::complete(6), 0.3, 3, 10_000).unwrap();
        assert!(r.meets_beta);
        assert!(!r.partial);
        assert_eq!(r.pairs_checked, 30);
        assert!((r.beta_observed - 12.0 / 36.0).abs() < 1e-12);
    }

    #[test]
    fn robustness_star_and_cycle_fail() {
        let mut star = Graph::full_vertex_set(6);
        for leaf in 1..6 {
            star.add_edge(0, leaf);
        }
        let r = check_robust(&star, 1e-6, 3, 10_000).unwrap();
        assert_eq!(r.beta_observed, 0.0);
        assert!(!r.meets_beta);

        let mut c6 = Graph::full_vertex_set(6);
        for i in 0..6 {
            c6.add_edge(i, (i + 1) % 6);
        }
        let r = check_robust(&c6, 1e-6, 3, 10_000).unwrap();
        assert_eq!(r.beta_observed, 0.0);
    }

    /// On K_m every ordered pair has exactly (m-2)(m-3)...(m-ell) simple
    /// ell-edge paths.
    #[test]
    fn robustness_complete_closed_form() {
        for (m, ell) in [(7usize, 3usize), (8, 3), (8, 5)] {
            let g = Graph::complete(m);
            let r = check_robust(&g, 0.0, ell, 100_000).unwrap();
            let expected: usize = (1..ell).map(|i| m - 1 - i).product();
            let denom = (m as f64).powi(ell as i32 - 1);
            assert!((r.beta_observed - expected as f64 / denom).abs() < 1e-12, "m={m} ell={ell}");
        }
    }

    #[test]
    fn robustness_pair_budget_sampling() {
        let r = check_robust(&Graph::complete(10), 0.0, 3, 10).unwrap();
        assert!(r.partial);
        assert!(r.pairs_checked <= 10);
    }

    #[test]
    fn intersection_same_complete() {
        let n = 12;
        let alpha = 0.2;
        let c = extract_robust_subgraph(&Graph::complete(n), alpha);
        let (count, verdict) = intersection_check(&c, &c, alpha, n).unwrap();
        assert_eq!(count, n * (n - 1) / 2);
        assert_eq!(verdict, IntersectVerdict::Pass);
    }

    #[test]
    fn intersection_disjoint_edges() {
        let n = 12;
        let mut a = Graph::full_vertex_set(n);
        let mut b = Graph::full_vertex_set(n);
        a.add_edge(0, 1);
        b.add_edge(2, 3);
        let ca = extract_robust_subgraph(&a, 0.2);
        let cb = extract_robust_subgraph(&b, 0.2);
        let (count, verdict) = intersection_check(&ca, &cb, 0.2, n).unwrap();
        assert_eq!(count, 0);
        assert_ne!(verdict, IntersectVerdict::Pass);
    }

    #[test]
    fn intersection_dense_random_links() {
        let n = 60;
        let alpha = 0.2;
        let h = random_hypergraph(n, 0.9, 1);
        let c0 = extract_robust_subgraph(&h.link_graph(0), alpha);
        let c1 = extract_robust_subgraph(&h.link_graph(1), alpha);
        let (count, verdict) = intersection_check(&c0, &c1, alpha, n).unwrap();
        assert_eq!(verdict, IntersectVerdict::Pass);
        assert!((count as f64) >= alpha * (n * n) as f64 / 2.0);
    }

    #[test]
    fn intersection_rejects_mismatched_ambient() {
        let ca = extract_robust_subgraph(&Graph::complete(10), 0.2);
        let cb = extract_robust_subgraph(&Graph::complete(12), 0.2);
        assert!(matches!(
            intersection_check(&ca, &cb, 0.2, 12),
            Err(RobustError::MismatchedAmbient(10, 12))
        ));
    }
}
