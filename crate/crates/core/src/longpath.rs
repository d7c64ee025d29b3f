//! Almost-spanning path assembly. Fixed-size pieces with connectable
//! end-pairs are chained into one long tight path, either by greedy local
//! growth (default) or by the society augmentation loop, until the set of
//! uncovered vertices fits under a cap.

use crate::connect::{connectable_adjacency, RobustFamily};
use crate::hgraph::{validate_tight, Graph, Hypergraph3, TightPath, TightViolation};
use crate::reservoir::{connect_through_reservoir, Reservoir};
use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;

/// Tuning for the long-path stage. `piece_len` is the piece size M and must
/// be 2 mod 3; `society_size` is the number of blocks per society.
#[derive(Debug, Clone)]
pub struct LongPathConfig {
    pub piece_len: usize,
    pub society_size: usize,
    pub alpha: f64,
    pub zeta2: f64,
    pub ell: usize,
    pub theta_star: f64,
    pub theta_2star: f64,
    /// Society augmentation loop instead of greedy growth.
    pub faithful: bool,
    /// Max uncovered vertices at exit; None means max(theta*^2 n, 6).
    pub leftover_cap: Option<f64>,
    /// Cap on |V(Q) n R|; None means unlimited when greedy, theta**^2 n
    /// when faithful.
    pub usage_cap: Option<f64>,
    /// Fraction of U \ U_bad a society must be useful for; None means
    /// alpha / 18.
    pub society_fraction: Option<f64>,
    pub society_budget: usize,
    pub piece_budget: u64,
    pub connect_budget: u64,
    pub max_rounds: usize,
    pub seed: u64,
}

impl Default for LongPathConfig {
    fn default() -> Self {
        Self {
            piece_len: 8,
            society_size: 3,
            alpha: 0.2,
            zeta2: 0.15,
            ell: 3,
            theta_star: 0.35,
            theta_2star: 0.1,
            faithful: false,
            leftover_cap: None,
            usage_cap: None,
            society_fraction: None,
            society_budget: 200,
            piece_budget: 400_000,
            connect_budget: 200_000,
            max_rounds: 64,
            seed: 0,
        }
    }
}

impl LongPathConfig {
    pub fn validate(&self) -> Result<(), LongPathError> {
        if self.piece_len < 5 || self.piece_len % 3 != 2 {
            return Err(LongPathError::Config(format!(
                "piece_len {} must be at least 5 and 2 mod 3",
                self.piece_len
            )));
        }
        if self.ell < 3 || self.ell % 2 == 0 {
            return Err(LongPathError::Config(format!("ell {} must be odd and >= 3", self.ell)));
        }
        if self.society_size == 0 {
            return Err(LongPathError::Config("society_size must be positive".into()));
        }
        if !(self.zeta2 > 0.0 && self.zeta2 <= 1.0) {
            return Err(LongPathError::Config(format!("zeta2 {} out of (0, 1]", self.zeta2)));
        }
        if self.alpha <= 0.0 {
            return Err(LongPathError::Config("alpha must be positive".into()));
        }
        Ok(())
    }

    fn leftover_cap_for(&self, n: usize) -> f64 {
        self.leftover_cap
            .unwrap_or_else(|| (self.theta_star * self.theta_star * n as f64).max(6.0))
    }

    fn usage_cap_for(&self, n: usize) -> f64 {
        match self.usage_cap {
            Some(c) => c,
            None if self.faithful => self.theta_2star * self.theta_2star * n as f64,
            None => f64::INFINITY,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LongPathError {
    #[error("config invalid: {0}")]
    Config(String),
    #[error("vertex {0} lost too many link edges to be assessed")]
    BadVertex(usize),
    #[error("{nu} blocks cannot host a society of {m}")]
    TooFewBlocks { nu: usize, m: usize },
    #[error("{} vertices stay uncovered, cap is {cap:.2}", uncovered.len())]
    LeftoverExceedsCap { uncovered: Vec<usize>, cap: f64, candidate: Box<Candidate> },
    #[error("path uses {usage} reservoir vertices, cap is {cap:.2}")]
    UsageExceedsCap { usage: usize, cap: f64, candidate: Box<Candidate> },
    #[error("end pairs of the assembled path are not connectable")]
    EndsNotConnectable { candidate: Box<Candidate> },
    #[error("candidacy violation: {0}")]
    Candidacy(#[from] CandidacyViolation),
}

/// Per-vertex robust subgraphs with all non-connectable edges removed.
/// `bad` flags the vertices that lost at least alpha n^2 / 8 edges.
#[derive(Debug, Clone)]
pub struct FilteredLinks {
    pub graphs: Vec<Graph>,
    pub bad: FixedBitSet,
    pub eta: Vec<f64>,
}

/// Keeps, in each robust subgraph, only the edges whose pair is
/// zeta2-connectable. Vertex sets are unchanged.
pub fn filter_connectable_links(fam: &RobustFamily, zeta2: f64, alpha: f64) -> FilteredLinks {
    let n = fam.n();
    let conn = connectable_adjacency(fam, zeta2);
    let loss_floor = alpha * (n * n) as f64 / 8.0 - 1e-9;
    let rows: Vec<(Graph, bool)> = (0..n)
        .into_par_iter()
        .map(|u| {
            let r = fam.r(u);
            let mut filtered = Graph::with_vertices(n, r.vertices());
            for (a, b) in r.edges() {
                if conn[a].contains(b) {
                    filtered.add_edge(a, b);
                }
            }
            let lost = r.edge_count() - filtered.edge_count();
            (filtered, lost as f64 >= loss_floor)
        })
        .collect();
    let mut graphs = Vec::with_capacity(n);
    let mut bad = FixedBitSet::with_capacity(n);
    let mut eta = vec![0.0; n];
    for (u, (g, is_bad)) in rows.into_iter().enumerate() {
        if is_bad {
            bad.insert(u);
        }
        eta[u] = g.vertex_count() as f64 / n as f64;
        graphs.push(g);
    }
    FilteredLinks { graphs, bad, eta }
}

/// Block decomposition for one augmentation round: the candidate's piece
/// vertex sets first (in piece order), then fresh blocks carved from the
/// uncovered set in vertex-id order, remainder dropped.
#[derive(Debug, Clone)]
pub struct SocietyContext<'a> {
    pub filtered: &'a FilteredLinks,
    pub blocks: Vec<Vec<usize>>,
    pub society_size: usize,
    pub uncovered: FixedBitSet,
}

impl<'a> SocietyContext<'a> {
    pub fn new(
        filtered: &'a FilteredLinks,
        pieces: &[Vec<usize>],
        uncovered: &FixedBitSet,
        piece_len: usize,
        society_size: usize,
    ) -> Self {
        let mut blocks: Vec<Vec<usize>> = pieces.iter().map(|p| p.to_vec()).collect();
        debug_assert!(blocks.iter().all(|b| b.len() == piece_len));
        let fresh: Vec<usize> = uncovered.ones().collect();
        for chunk in fresh.chunks_exact(piece_len) {
            blocks.push(chunk.to_vec());
        }
        Self { filtered, blocks, society_size, uncovered: uncovered.clone() }
    }

    pub fn nu(&self) -> usize {
        self.blocks.len()
    }
}

/// A chosen society: block ids, the union of their vertex sets, and the
/// vertices it turned out to be useful for.
#[derive(Debug, Clone)]
pub struct Society {
    pub blocks: Vec<usize>,
    pub union: FixedBitSet,
    pub useful: Vec<usize>,
}

/// Density test: the society union S is useful for u when the filtered
/// subgraph induced on S n V holds at least
/// (5/9 + alpha/9 - (1 - eta)(1 + eta - 2 tau)) |S|^2 / 2 edges, where
/// tau |S| = |S n V|. Vertices flagged bad are not assessable.
pub fn useful_for(
    s_union: &FixedBitSet,
    u: usize,
    ctx: &SocietyContext,
    alpha: f64,
) -> Result<bool, LongPathError> {
    if ctx.filtered.bad.contains(u) {
        return Err(LongPathError::BadVertex(u));
    }
    let g = &ctx.filtered.graphs[u];
    let s_len = s_union.count_ones(..) as f64;
    assert!(s_len > 0.0, "usefulness needs a nonempty society union");
    let mut inside = s_union.clone();
    inside.intersect_with(g.vertex_set());
    let tau = inside.count_ones(..) as f64 / s_len;
    let eta = ctx.filtered.eta[u];
    let lhs = g.e_within(&inside) as f64;
    let rhs = (5.0 / 9.0 + alpha / 9.0 - (1.0 - eta) * (1.0 + eta - 2.0 * tau)) * s_len * s_len
        / 2.0;
    Ok(lhs >= rhs - 1e-9)
}

/// Samples societies (distinct block m-subsets) until one is useful for at
/// least `fraction` of the assessable uncovered vertices. Every vertex of
/// the returned useful set is rechecked before returning.
pub fn find_useful_society(
    ctx: &SocietyContext,
    alpha: f64,
    fraction: f64,
    sample_budget: usize,
    seed: u64,
) -> Result<Option<Society>, LongPathError> {
    let nu = ctx.nu();
    let m = ctx.society_size;
    if nu < m {
        return Err(LongPathError::TooFewBlocks { nu, m });
    }
    let base: Vec<usize> = ctx
        .uncovered
        .ones()
        .filter(|&u| !ctx.filtered.bad.contains(u))
        .collect();
    let target = ((fraction * base.len() as f64) - 1e-9).ceil().max(1.0) as usize;
    let n = ctx.uncovered.len();
    let mut rng = ChaCha8Rng::seed_from_u64(crate::derive_seed(seed, "society"));
    let mut ids: Vec<usize> = (0..nu).collect();
    for _ in 0..sample_budget {
        ids.shuffle(&mut rng);
        let mut blocks: Vec<usize> = ids[..m].to_vec();
        blocks.sort_unstable();
        let mut union = FixedBitSet::with_capacity(n);
        for &b in &blocks {
            for &v in &ctx.blocks[b] {
                union.insert(v);
            }
        }
        let useful: Vec<usize> = base
            .par_iter()
            .copied()
            .filter(|&u| useful_for(&union, u, ctx, alpha).unwrap_or(false))
            .collect();
        if useful.len() >= target {
            for &u in &useful {
                assert!(useful_for(&union, u, ctx, alpha)?, "usefulness recheck failed");
            }
            return Ok(Some(Society { blocks, union, useful }));
        }
    }
    Ok(None)
}

/// Finds a simple graph path with `needed_len` vertices inside the society
/// union, using only edges present in every filtered subgraph of `u2`.
/// Exact subset DP up to 20 vertices, randomized search above.
pub fn common_connectable_path(
    u2: &[usize],
    s_union: &FixedBitSet,
    ctx: &SocietyContext,
    needed_len: usize,
) -> Option<Vec<usize>> {
    assert!(!u2.is_empty(), "common path needs at least one constraining vertex");
    let s_verts: Vec<usize> = s_union.ones().collect();
    let k = s_verts.len();
    if needed_len < 2 || needed_len > k {
        return None;
    }
    let mut adj = vec![FixedBitSet::with_capacity(k); k];
    for i in 0..k {
        for j in i + 1..k {
            let (a, b) = (s_verts[i], s_verts[j]);
            if u2.iter().all(|&u| ctx.filtered.graphs[u].has_edge(a, b)) {
                adj[i].insert(j);
                adj[j].insert(i);
            }
        }
    }
    let local = if k <= 20 {
        exact_fixed_len_path(&adj, k, needed_len)
    } else {
        sampled_fixed_len_path(&adj, k, needed_len)
    }?;
    let w: Vec<usize> = local.iter().map(|&i| s_verts[i]).collect();
    for win in w.windows(2) {
        if !u2.iter().all(|&u| ctx.filtered.graphs[u].has_edge(win[0], win[1])) {
            return None;
        }
    }
    Some(w)
}

/// Subset DP over (visited set, last vertex); returns the first set of
/// `needed` vertices carrying a path.
fn exact_fixed_len_path(adj: &[FixedBitSet], k: usize, needed: usize) -> Option<Vec<usize>> {
    debug_assert!(k <= 20 && needed >= 2);
    let full = 1usize << k;
    let mut dp = vec![0u32; full];
    for i in 0..k {
        dp[1 << i] = 1 << i;
    }
    for mask in 1..full {
        let lasts = dp[mask];
        if lasts == 0 {
            continue;
        }
        if (mask as u32).count_ones() as usize == needed {
            return Some(rebuild_path(adj, &dp, mask, lasts.trailing_zeros() as usize));
        }
        let mut bits = lasts;
        while bits != 0 {
            let last = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            for next in adj[last].ones() {
                if mask & (1 << next) == 0 {
                    dp[mask | (1 << next)] |= 1 << next;
                }
            }
        }
    }
    None
}

fn rebuild_path(adj: &[FixedBitSet], dp: &[u32], mask: usize, last: usize) -> Vec<usize> {
    let mut path = vec![last];
    let mut mask = mask;
    let mut last = last;
    while mask.count_ones() > 1 {
        let prev_mask = mask ^ (1 << last);
        let prev = (0..adj.len())
            .find(|&p| dp[prev_mask] & (1 << p) != 0 && adj[p].contains(last))
            .expect("dp table must contain a predecessor");
        path.push(prev);
        mask = prev_mask;
        last = prev;
    }
    path.reverse();
    path
}

/// Restarted two-ended greedy walks, then budgeted randomized DFS per
/// restart. Deterministic seed derived from the instance shape.
fn sampled_fixed_len_path(adj: &[FixedBitSet], k: usize, needed: usize) -> Option<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(crate::derive_seed(
        (k as u64) << 32 | needed as u64,
        "common-path",
    ));
    for _ in 0..128 {
        let start = rng.gen_range(0..k);
        let mut path = vec![start];
        let mut used = FixedBitSet::with_capacity(k);
        used.insert(start);
        loop {
            if path.len() == needed {
                return Some(path);
            }
            let tail = *path.last().unwrap();
            let mut exts: Vec<usize> = adj[tail].ones().filter(|&v| !used.contains(v)).collect();
            if !exts.is_empty() {
                let v = exts[rng.gen_range(0..exts.len())];
                path.push(v);
                used.insert(v);
                continue;
            }
            let head = path[0];
            exts = adj[head].ones().filter(|&v| !used.contains(v)).collect();
            if exts.is_empty() {
                break;
            }
            let v = exts[rng.gen_range(0..exts.len())];
            path.insert(0, v);
            used.insert(v);
        }
        let mut budget = 100_000u64;
        let mut path = vec![start];
        let mut used = FixedBitSet::with_capacity(k);
        used.insert(start);
        if dfs_fixed_len(adj, &mut path, &mut used, needed, &mut budget, &mut rng) {
            return Some(path);
        }
    }
    None
}

fn dfs_fixed_len(
    adj: &[FixedBitSet],
    path: &mut Vec<usize>,
    used: &mut FixedBitSet,
    needed: usize,
    budget: &mut u64,
    rng: &mut ChaCha8Rng,
) -> bool {
    if path.len() == needed {
        return true;
    }
    if *budget == 0 {
        return false;
    }
    let tail = *path.last().unwrap();
    let mut cands: Vec<usize> = adj[tail].ones().filter(|&v| !used.contains(v)).collect();
    cands.shuffle(rng);
    for v in cands {
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        path.push(v);
        used.insert(v);
        if dfs_fixed_len(adj, path, used, needed, budget, rng) {
            return true;
        }
        path.pop();
        used.remove(v);
    }
    false
}

/// Loop state of the long-path construction: a tight path assembled from
/// fixed-size pieces, plus the exact count of reservoir vertices it uses.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub pieces: Vec<Vec<usize>>,
    pub q: Option<TightPath>,
    pub reservoir_usage: usize,
}

impl Candidate {
    pub fn empty() -> Self {
        Self { pieces: Vec::new(), q: None, reservoir_usage: 0 }
    }

    pub fn covered(&self, n: usize) -> FixedBitSet {
        match &self.q {
            Some(q) => q.vertex_set(n),
            None => FixedBitSet::with_capacity(n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CandidacyViolation {
    #[error("candidate has pieces but no path")]
    PiecesWithoutPath,
    #[error("path invalid: {0}")]
    PathInvalid(#[from] TightViolation),
    #[error("piece has {len} vertices, want {want}")]
    PieceWrongSize { len: usize, want: usize },
    #[error("piece is not a forward subpath of the path")]
    PieceNotSubpath,
    #[error("piece end-pair is not connectable")]
    PieceEndsNotConnectable,
    #[error("gap of {len} vertices is neither a single vertex nor reservoir-only")]
    GapInvalid { len: usize },
    #[error("path does not start and end with pieces")]
    EndsOutsidePieces,
    #[error("stored reservoir usage {stored} but path holds {actual}")]
    UsageMismatch { stored: usize, actual: usize },
    #[error("reservoir usage {usage} exceeds 19 ell |pieces| / alpha = {bound:.2}")]
    UsageExceedsBound { usage: usize, bound: f64 },
}

/// One piece on its own: exactly `piece_len` vertices, tight, both
/// end-pairs zeta2-connectable.
pub fn check_piece(
    h: &Hypergraph3,
    fam: &RobustFamily,
    piece: &[usize],
    piece_len: usize,
    zeta2: f64,
) -> Result<(), CandidacyViolation> {
    if piece.len() != piece_len {
        return Err(CandidacyViolation::PieceWrongSize { len: piece.len(), want: piece_len });
    }
    validate_tight(h, piece, false)?;
    let k = piece.len();
    if !fam.is_connectable(zeta2, piece[0], piece[1])
        || !fam.is_connectable(zeta2, piece[k - 2], piece[k - 1])
    {
        return Err(CandidacyViolation::PieceEndsNotConnectable);
    }
    Ok(())
}

/// Full candidacy check, trusting nothing about how the candidate was made:
/// the path is tight, every piece passes check_piece and appears in order
/// as a forward subpath, consecutive pieces are separated by one vertex or
/// by reservoir vertices only, the path starts and ends with pieces, and
/// reservoir usage is both correctly stored and within 19 ell |pieces| / alpha.
pub fn check_candidate(
    h: &Hypergraph3,
    fam: &RobustFamily,
    res: &Reservoir,
    cand: &Candidate,
    cfg: &LongPathConfig,
) -> Result<(), CandidacyViolation> {
    let q = match &cand.q {
        None => {
            if !cand.pieces.is_empty() {
                return Err(CandidacyViolation::PiecesWithoutPath);
            }
            if cand.reservoir_usage != 0 {
                return Err(CandidacyViolation::UsageMismatch {
                    stored: cand.reservoir_usage,
                    actual: 0,
                });
            }
            return Ok(());
        }
        Some(q) => q,
    };
    validate_tight(h, q.seq(), false)?;
    let qseq = q.seq();
    let m_p = cfg.piece_len;
    let mut offsets = Vec::with_capacity(cand.pieces.len());
    let mut from = 0;
    for piece in &cand.pieces {
        check_piece(h, fam, piece, m_p, cfg.zeta2)?;
        let limit = qseq.len().saturating_sub(m_p);
        let off = (from..=limit).find(|&o| qseq[o..o + m_p] == piece[..]);
        match off {
            Some(o) => {
                offsets.push(o);
                from = o + m_p;
            }
            None => return Err(CandidacyViolation::PieceNotSubpath),
        }
    }
    if !cand.pieces.is_empty() {
        if offsets[0] != 0 || offsets.last().unwrap() + m_p != qseq.len() {
            return Err(CandidacyViolation::EndsOutsidePieces);
        }
        for w in offsets.windows(2) {
            let gap = &qseq[w[0] + m_p..w[1]];
            let fine = gap.len() == 1 || gap.iter().all(|&v| res.members.contains(v));
            if !fine {
                return Err(CandidacyViolation::GapInvalid { len: gap.len() });
            }
        }
    }
    let actual = qseq.iter().filter(|&&v| res.members.contains(v)).count();
    if actual != cand.reservoir_usage {
        return Err(CandidacyViolation::UsageMismatch {
            stored: cand.reservoir_usage,
            actual,
        });
    }
    let bound = 19.0 * cfg.ell as f64 * cand.pieces.len() as f64 / cfg.alpha;
    if actual as f64 > bound + 1e-9 {
        return Err(CandidacyViolation::UsageExceedsBound { usage: actual, bound });
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub enum AugmentOutcome {
    Augmented,
    NoSociety,
    SocietyPrecondition(String),
    NoCommonPath,
    NotEnoughInterleaves { have: usize, need: usize },
    Reconnect(String),
    Soundness(String),
}

#[derive(Debug, Clone, Serialize)]
pub struct AugmentReport {
    pub outcome: AugmentOutcome,
    pub gained: usize,
    pub connections: usize,
    pub t_interleaves: Vec<usize>,
    pub stripped: Vec<usize>,
}

impl AugmentReport {
    fn failed(outcome: AugmentOutcome) -> Self {
        Self { outcome, gained: 0, connections: 0, t_interleaves: Vec::new(), stripped: Vec::new() }
    }

    pub fn augmented(&self) -> bool {
        matches!(self.outcome, AugmentOutcome::Augmented)
    }
}

struct Segment {
    seq: Vec<usize>,
    pieces: Vec<Vec<usize>>,
}

/// One society round: find a useful society, lay a common path W through
/// its union, interleave useful vertices into a new tight path T of
/// society_size + 6 pieces (faithful) or society_size + 1 (greedy scale),
/// swap out the society's own pieces, and reconnect everything through the
/// reservoir. Any failure returns the candidate unchanged with the
/// reservoir rolled back.
pub fn augment_candidate(
    h: &Hypergraph3,
    fam: &RobustFamily,
    res: &mut Reservoir,
    cand: &Candidate,
    ctx: &SocietyContext,
    cfg: &LongPathConfig,
    seed: u64,
) -> (Candidate, AugmentReport) {
    let n = h.n();
    let m_p = cfg.piece_len;
    let m = cfg.society_size;
    let p_target = m + if cfg.faithful { 6 } else { 1 };
    let unit = m_p + 1;
    debug_assert_eq!(unit % 3, 0);
    let t_len = unit * p_target - 1;
    let w_len = 2 * unit * p_target / 3;
    let r_need = unit * p_target / 3 - 1;
    let fail = |outcome| (cand.clone(), AugmentReport::failed(outcome));

    let fraction = cfg.society_fraction.unwrap_or(cfg.alpha / 18.0);
    let society =
        match find_useful_society(ctx, cfg.alpha, fraction, cfg.society_budget, seed) {
            Err(e) => return fail(AugmentOutcome::SocietyPrecondition(e.to_string())),
            Ok(None) => return fail(AugmentOutcome::NoSociety),
            Ok(Some(s)) => s,
        };

    // the common path exhausts the union at this scale, so vertices that
    // exclude themselves from their own subgraph cannot constrain it
    let u2: Vec<usize> =
        society.useful.iter().copied().filter(|&u| !society.union.contains(u)).collect();
    if u2.is_empty() {
        return fail(AugmentOutcome::NoCommonPath);
    }
    let mut u_dd = u2.clone();
    let mut w = common_connectable_path(&u2, &society.union, ctx, w_len);
    if w.is_none() {
        for group in group_by_filtered_view(&u2, &society.union, ctx) {
            if let Some(found) = common_connectable_path(&group, &society.union, ctx, w_len) {
                u_dd = group;
                w = Some(found);
                break;
            }
        }
    }
    let w = match w {
        Some(w) => w,
        None => return fail(AugmentOutcome::NoCommonPath),
    };

    let mut on_w = FixedBitSet::with_capacity(n);
    for &v in &w {
        on_w.insert(v);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(crate::derive_seed(seed, "interleave"));
    let mut inter: Vec<usize> = u_dd.iter().copied().filter(|&v| !on_w.contains(v)).collect();
    if inter.len() < r_need {
        return fail(AugmentOutcome::NotEnoughInterleaves { have: inter.len(), need: r_need });
    }
    inter.shuffle(&mut rng);
    inter.truncate(r_need);

    let mut tseq = Vec::with_capacity(t_len);
    for i in 0..=r_need {
        tseq.push(w[2 * i]);
        tseq.push(w[2 * i + 1]);
        if i < r_need {
            tseq.push(inter[i]);
        }
    }
    debug_assert_eq!(tseq.len(), t_len);
    if let Err(e) = TightPath::new_path(h, tseq.clone()) {
        return fail(AugmentOutcome::Soundness(format!("assembled path invalid: {e}")));
    }
    let t_pieces: Vec<Vec<usize>> =
        (0..p_target).map(|i| tseq[i * unit..i * unit + m_p].to_vec()).collect();
    for piece in &t_pieces {
        if check_piece(h, fam, piece, m_p, cfg.zeta2).is_err() {
            return fail(AugmentOutcome::Soundness("carved piece fails its checks".into()));
        }
    }

    let removed: Vec<usize> =
        society.blocks.iter().copied().filter(|&b| b < cand.pieces.len()).collect();
    for &b in &removed {
        debug_assert_eq!(ctx.blocks[b], cand.pieces[b], "blocks must mirror pieces in order");
    }
    let (segments, mut stripped) = match split_kept_segments(cand, &removed, m_p) {
        Some(parts) => parts,
        None => return fail(AugmentOutcome::Soundness("pieces are not laid out in the path".into())),
    };

    let snapshot = res.used_snapshot();
    let mut parts = segments;
    parts.push(Segment { seq: tseq, pieces: t_pieces });
    let mut acc = parts[0].seq.clone();
    let mut new_pieces = parts[0].pieces.clone();
    let mut connections = 0;
    for part in &parts[1..] {
        let start = (acc[acc.len() - 2], acc[acc.len() - 1]);
        let end = (part.seq[0], part.seq[1]);
        match connect_through_reservoir(
            h,
            fam,
            res,
            start,
            end,
            cfg.zeta2,
            cfg.ell,
            usize::MAX,
            cfg.connect_budget,
        ) {
            Ok(path) => {
                let s = path.seq();
                acc.extend_from_slice(&s[2..s.len() - 2]);
                acc.extend_from_slice(&part.seq);
                new_pieces.extend(part.pieces.iter().cloned());
                connections += 1;
            }
            Err(e) => {
                res.restore_used(snapshot);
                return fail(AugmentOutcome::Reconnect(e.to_string()));
            }
        }
    }
    debug_assert!(connections <= m + 1, "reconnection count exceeds the accounting bound");

    let q = match TightPath::new_path(h, acc) {
        Ok(q) => q,
        Err(e) => {
            res.restore_used(snapshot);
            return fail(AugmentOutcome::Soundness(format!("spliced path invalid: {e}")));
        }
    };
    let mut in_res = q.vertex_set(n);
    in_res.intersect_with(&res.members);
    let next = Candidate {
        pieces: new_pieces,
        q: Some(q),
        reservoir_usage: in_res.count_ones(..),
    };
    if let Err(v) = check_candidate(h, fam, res, &next, cfg) {
        res.restore_used(snapshot);
        return fail(AugmentOutcome::Soundness(v.to_string()));
    }
    let gained = next.pieces.len() - cand.pieces.len();
    debug_assert!(gained >= p_target - m);
    let now_covered = next.covered(n);
    stripped.retain(|&v| !now_covered.contains(v));
    (
        next,
        AugmentReport {
            outcome: AugmentOutcome::Augmented,
            gained,
            connections,
            t_interleaves: inter,
            stripped,
        },
    )
}

/// Groups vertices whose filtered subgraphs agree on the society union;
/// identical views make identical search outcomes. Largest groups first,
/// deterministically ordered.
fn group_by_filtered_view(
    u2: &[usize],
    s_union: &FixedBitSet,
    ctx: &SocietyContext,
) -> Vec<Vec<usize>> {
    let s_verts: Vec<usize> = s_union.ones().collect();
    let k = s_verts.len();
    let mut groups: HashMap<Vec<u64>, Vec<usize>> = HashMap::new();
    for &u in u2 {
        let g = &ctx.filtered.graphs[u];
        let mut sig = vec![0u64; (k * k + 63) / 64];
        for i in 0..k {
            for j in i + 1..k {
                if g.has_edge(s_verts[i], s_verts[j]) {
                    let bit = i * k + j;
                    sig[bit / 64] |= 1 << (bit % 64);
                }
            }
        }
        groups.entry(sig).or_default().push(u);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort_by_key(|g| (std::cmp::Reverse(g.len()), g[0]));
    out
}

/// Splits the candidate's path into maximal runs of kept pieces, each run
/// trimmed to start and end at piece boundaries. Returns the runs plus the
/// vertices dropped with the removed pieces and their bordering gaps.
fn split_kept_segments(
    cand: &Candidate,
    removed: &[usize],
    piece_len: usize,
) -> Option<(Vec<Segment>, Vec<usize>)> {
    let qseq = match &cand.q {
        Some(q) => q.seq(),
        None => return Some((Vec::new(), Vec::new())),
    };
    let mut offsets = Vec::with_capacity(cand.pieces.len());
    let mut from = 0;
    for piece in &cand.pieces {
        let limit = qseq.len().saturating_sub(piece_len);
        let off = (from..=limit).find(|&o| qseq[o..o + piece_len] == piece[..])?;
        offsets.push(off);
        from = off + piece_len;
    }
    let mut segments = Vec::new();
    let mut kept_cover = FixedBitSet::with_capacity(qseq.len());
    let mut i = 0;
    while i < cand.pieces.len() {
        if removed.contains(&i) {
            i += 1;
            continue;
        }
        let mut j = i;
        while j + 1 < cand.pieces.len()
            && !removed.contains(&(j + 1))
        {
            j += 1;
        }
        let lo = offsets[i];
        let hi = offsets[j] + piece_len;
        kept_cover.set_range(lo..hi, true);
        segments.push(Segment {
            seq: qseq[lo..hi].to_vec(),
            pieces: cand.pieces[i..=j].iter().cloned().collect(),
        });
        i = j + 1;
    }
    let stripped: Vec<usize> =
        (0..qseq.len()).filter(|&p| !kept_cover.contains(p)).map(|p| qseq[p]).collect();
    Some((segments, stripped))
}

#[derive(Debug, Clone, Serialize)]
pub struct LongPathReport {
    pub mode: &'static str,
    pub rounds: usize,
    pub pieces: usize,
    pub q_vertices: usize,
    pub uncovered: usize,
    pub reservoir_usage: usize,
    pub leftover_cap: f64,
    pub augments: Vec<AugmentReport>,
}

fn uncovered_set(
    n: usize,
    excluded: &FixedBitSet,
    res: &Reservoir,
    covered: &FixedBitSet,
) -> FixedBitSet {
    let mut u = FixedBitSet::with_capacity(n);
    u.toggle_range(..);
    u.difference_with(excluded);
    u.difference_with(&res.members);
    u.difference_with(covered);
    u
}

/// Builds the almost-spanning path on everything outside `excluded` and the
/// reservoir. Greedy mode grows and chains pieces locally, connecting
/// through the reservoir only when local growth stalls; faithful mode loops
/// society augmentation. Succeeds when the uncovered remainder fits under
/// the leftover cap and the path's reservoir usage fits under the usage cap.
pub fn build_long_path(
    h: &Hypergraph3,
    fam: &RobustFamily,
    res: &mut Reservoir,
    excluded: &FixedBitSet,
    cfg: &LongPathConfig,
) -> Result<(Candidate, LongPathReport), LongPathError> {
    cfg.validate()?;
    let n = h.n();
    let cap = cfg.leftover_cap_for(n);
    let usage_cap = cfg.usage_cap_for(n);
    let mut augments = Vec::new();
    let mut rounds = 0;

    let cand = if cfg.faithful {
        let filtered = filter_connectable_links(fam, cfg.zeta2, cfg.alpha);
        let mut cand = Candidate::empty();
        loop {
            let unc = uncovered_set(n, excluded, res, &cand.covered(n));
            if (unc.count_ones(..) as f64) <= cap + 1e-9 || rounds >= cfg.max_rounds {
                break;
            }
            rounds += 1;
            let ctx =
                SocietyContext::new(&filtered, &cand.pieces, &unc, cfg.piece_len, cfg.society_size);
            let seed = crate::derive_seed(cfg.seed ^ (rounds as u64), "augment");
            let (next, report) = augment_candidate(h, fam, res, &cand, &ctx, cfg, seed);
            let ok = report.augmented();
            augments.push(report);
            if !ok {
                break;
            }
            cand = next;
            if (cand.reservoir_usage as f64) > usage_cap + 1e-9 {
                break;
            }
        }
        cand
    } else {
        desk_grow(h, fam, res, excluded, cfg, cap, usage_cap, &mut rounds)
    };

    let covered = cand.covered(n);
    let unc = uncovered_set(n, excluded, res, &covered);
    let uncovered: Vec<usize> = unc.ones().collect();
    let report = LongPathReport {
        mode: if cfg.faithful { "faithful" } else { "greedy" },
        rounds,
        pieces: cand.pieces.len(),
        q_vertices: covered.count_ones(..),
        uncovered: uncovered.len(),
        reservoir_usage: cand.reservoir_usage,
        leftover_cap: cap,
        augments,
    };
    if uncovered.len() as f64 > cap + 1e-9 {
        return Err(LongPathError::LeftoverExceedsCap {
            uncovered,
            cap,
            candidate: Box::new(cand),
        });
    }
    if cand.reservoir_usage as f64 > usage_cap + 1e-9 {
        return Err(LongPathError::UsageExceedsCap {
            usage: cand.reservoir_usage,
            cap: usage_cap,
            candidate: Box::new(cand),
        });
    }
    if let Some(q) = &cand.q {
        let (a, b) = q.start_pair();
        let (c, d) = q.end_pair();
        if !fam.is_connectable(cfg.zeta2, a, b) || !fam.is_connectable(cfg.zeta2, c, d) {
            return Err(LongPathError::EndsNotConnectable { candidate: Box::new(cand) });
        }
    }
    check_candidate(h, fam, res, &cand, cfg)?;
    Ok((cand, report))
}

/// Greedy growth: repeatedly attach one more piece to the tail, preferring
/// no gap, then a single free gap vertex, then a reservoir connection to a
/// piece grown elsewhere.
#[allow(clippy::too_many_arguments)]
fn desk_grow(
    h: &Hypergraph3,
    fam: &RobustFamily,
    res: &mut Reservoir,
    excluded: &FixedBitSet,
    cfg: &LongPathConfig,
    cap: f64,
    usage_cap: f64,
    rounds: &mut usize,
) -> Candidate {
    let n = h.n();
    let conn = connectable_adjacency(fam, cfg.zeta2);
    let mut rng = ChaCha8Rng::seed_from_u64(crate::derive_seed(cfg.seed, "longpath"));
    let mut qseq: Vec<usize> = Vec::new();
    let mut pieces: Vec<Vec<usize>> = Vec::new();
    let mut usage = 0usize;
    let mut uncovered = FixedBitSet::with_capacity(n);
    uncovered.toggle_range(..);
    uncovered.difference_with(excluded);
    uncovered.difference_with(&res.members);
    let max_rounds = cfg.max_rounds.max(2 * n / cfg.piece_len + 4);

    while (uncovered.count_ones(..) as f64) > cap + 1e-9 && *rounds < max_rounds {
        *rounds += 1;
        let mut budget = cfg.piece_budget;
        let mut attached: Option<(Vec<usize>, Vec<usize>)> = None;

        if qseq.is_empty() {
            if let Some(p) = find_piece(h, &conn, &uncovered, &[], cfg.piece_len, &mut budget, &mut rng)
            {
                attached = Some((p, Vec::new()));
            }
        } else {
            let a = qseq[qseq.len() - 2];
            let b = qseq[qseq.len() - 1];
            if let Some(p) =
                find_piece(h, &conn, &uncovered, &[a, b], cfg.piece_len, &mut budget, &mut rng)
            {
                attached = Some((p, Vec::new()));
            }
            if attached.is_none() {
                let mut gaps: Vec<usize> =
                    h.pair_neighborhood(a, b).ones().filter(|&g| uncovered.contains(g)).collect();
                gaps.shuffle(&mut rng);
                for g in gaps {
                    if budget == 0 {
                        break;
                    }
                    let mut avail = uncovered.clone();
                    avail.remove(g);
                    if let Some(p) = find_piece(
                        h,
                        &conn,
                        &avail,
                        &[a, b, g],
                        cfg.piece_len,
                        &mut budget,
                        &mut rng,
                    ) {
                        attached = Some((p, vec![g]));
                        break;
                    }
                }
            }
            if attached.is_none()
                && (usage + 3 * cfg.ell + 1) as f64 <= usage_cap + 1e-9
                && res.len() - res.used_len() >= 3 * cfg.ell + 1
            {
                let mut fresh_budget = cfg.piece_budget;
                if let Some(p) = find_piece(
                    h,
                    &conn,
                    &uncovered,
                    &[],
                    cfg.piece_len,
                    &mut fresh_budget,
                    &mut rng,
                ) {
                    if let Ok(path) = connect_through_reservoir(
                        h,
                        fam,
                        res,
                        (a, b),
                        (p[0], p[1]),
                        cfg.zeta2,
                        cfg.ell,
                        usize::MAX,
                        cfg.connect_budget,
                    ) {
                        let s = path.seq();
                        attached = Some((p, s[2..s.len() - 2].to_vec()));
                        usage += 3 * cfg.ell + 1;
                    }
                }
            }
        }

        match attached {
            Some((piece, filler)) => {
                qseq.extend_from_slice(&filler);
                qseq.extend_from_slice(&piece);
                for &v in filler.iter().chain(piece.iter()) {
                    uncovered.remove(v);
                }
                pieces.push(piece);
            }
            None => break,
        }
    }

    if qseq.is_empty() {
        return Candidate::empty();
    }
    let q = TightPath::new_path(h, qseq).expect("every window was checked during growth");
    Candidate { pieces, q: Some(q), reservoir_usage: usage }
}

/// Grows one piece of exactly `piece_len` fresh vertices extending `prefix`
/// (the path tail it must continue from, possibly empty), with both piece
/// end-pairs connectable. Depth-first with all candidate orders shuffled.
fn find_piece(
    h: &Hypergraph3,
    conn: &[FixedBitSet],
    avail: &FixedBitSet,
    prefix: &[usize],
    piece_len: usize,
    budget: &mut u64,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<usize>> {
    let mut seq = prefix.to_vec();
    if prefix.len() >= 2 {
        if extend_piece(h, conn, avail, &mut seq, prefix.len(), piece_len, budget, rng) {
            return Some(seq[prefix.len()..].to_vec());
        }
        return None;
    }
    debug_assert!(prefix.is_empty());
    let mut starts: Vec<usize> = avail.ones().collect();
    starts.shuffle(rng);
    for s0 in starts {
        let mut seconds: Vec<usize> =
            conn[s0].ones().filter(|&v| avail.contains(v) && v != s0).collect();
        seconds.shuffle(rng);
        for s1 in seconds {
            if *budget == 0 {
                return None;
            }
            *budget -= 1;
            seq.clear();
            seq.push(s0);
            seq.push(s1);
            if extend_piece(h, conn, avail, &mut seq, 0, piece_len, budget, rng) {
                return Some(seq);
            }
        }
    }
    None
}

#[allow(clippy::too_many_arguments)]
fn extend_piece(
    h: &Hypergraph3,
    conn: &[FixedBitSet],
    avail: &FixedBitSet,
    seq: &mut Vec<usize>,
    piece_start: usize,
    piece_len: usize,
    budget: &mut u64,
    rng: &mut ChaCha8Rng,
) -> bool {
    let grown = seq.len() - piece_start;
    if grown == piece_len {
        let a = seq[seq.len() - 2];
        let b = seq[seq.len() - 1];
        return conn[a].contains(b);
    }
    let x = seq[seq.len() - 2];
    let y = seq[seq.len() - 1];
    let mut cands: Vec<usize> = h
        .pair_neighborhood(x, y)
        .ones()
        .filter(|&v| avail.contains(v) && !seq[piece_start..].contains(&v))
        .collect();
    cands.shuffle(rng);
    for v in cands {
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        if grown == 1 && !conn[seq[piece_start]].contains(v) {
            continue;
        }
        seq.push(v);
        if extend_piece(h, conn, avail, seq, piece_start, piece_len, budget, rng) {
            return true;
        }
        seq.pop();
    }
    false
}
