//! Reservoir sampling and reservoir-internal connections.
//!
//! The reservoir is a random vertex set R whose size lands in the window
//! [theta*^2 n / 2, theta*^2 n]. Connections routed through the reservoir
//! keep all interior vertices inside R minus the already-used part R', so
//! the rest of the graph is never disturbed. Concentration guarantees are
//! replaced by an empirical validation report over sampled pair-pairs.

use crate::connect::{
    connectable_pairs, find_connecting_path, ConnectError, ConnectRequest, RobustFamily,
};
use crate::hgraph::{Hypergraph3, TightPath};
use crate::robust::ceil_tol;
use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

const VALIDATE_CONNECT_BUDGET: u64 = 40_000;

#[derive(Debug, Clone)]
pub struct Reservoir {
    pub members: FixedBitSet,
    used: FixedBitSet,
    pub theta_star: f64,
    pub seed: u64,
    pub validation: Option<ReservoirReport>,
}

impl Reservoir {
    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn used(&self) -> &FixedBitSet {
        &self.used
    }

    pub fn used_len(&self) -> usize {
        self.used.count_ones(..)
    }

    /// R minus R': the vertices still available for interiors.
    pub fn available(&self) -> FixedBitSet {
        let mut avail = self.members.clone();
        avail.difference_with(&self.used);
        avail
    }

    /// Snapshot of R' for callers that chain connections and must roll back
    /// as a unit when a later one fails.
    pub fn used_snapshot(&self) -> FixedBitSet {
        self.used.clone()
    }

    pub fn restore_used(&mut self, snapshot: FixedBitSet) {
        self.used = snapshot;
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ReservoirError {
    #[error("theta*^2 n = {0:.3} is below the minimum of 8")]
    TooSmall(f64),
    #[error("size window [{lo}, {hi}] missed in {retries} attempts")]
    WindowMissed { lo: usize, hi: usize, retries: usize },
    #[error("used set has {used} vertices, cap is {cap}")]
    UsedCapExceeded { used: usize, cap: usize },
    #[error("reservoir has {available} unused vertices, interior needs {needed}")]
    Depleted { available: usize, needed: usize },
    #[error("connection failed: {0}")]
    Connect(#[from] ConnectError),
}

/// Samples R by independent inclusion with probability
/// p = (1 - 1/(10 ell)) theta*^2, resampling until the size window
/// [theta*^2 n / 2, theta*^2 n] holds. Deterministic given the seed.
pub fn sample_reservoir(
    h: &Hypergraph3,
    theta_star: f64,
    ell: usize,
    seed: u64,
    retries: usize,
) -> Result<Reservoir, ReservoirError> {
    let n = h.n();
    let window = theta_star * theta_star * n as f64;
    if window < 8.0 - 1e-9 {
        return Err(ReservoirError::TooSmall(window));
    }
    let lo = ceil_tol(window / 2.0);
    let hi = (window + 1e-9).floor() as usize;
    let p = (1.0 - 1.0 / (10.0 * ell as f64)) * theta_star * theta_star;
    let base = crate::derive_seed(seed, "reservoir");
    for attempt in 0..=retries {
        // golden-ratio stride keeps retry streams from aliasing across seeds
        let mut rng = ChaCha8Rng::seed_from_u64(
            base ^ (attempt as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
        );
        let mut members = FixedBitSet::with_capacity(n);
        for v in 0..n {
            if rng.gen::<f64>() < p {
                members.insert(v);
            }
        }
        let size = members.count_ones(..);
        if size >= lo && size <= hi {
            return Ok(Reservoir {
                members,
                used: FixedBitSet::with_capacity(n),
                theta_star,
                seed,
                validation: None,
            });
        }
    }
    Err(ReservoirError::WindowMissed { lo, hi, retries })
}

#[derive(Debug, Clone, Serialize)]
pub struct ReservoirReport {
    pub attempted: usize,
    pub succeeded: usize,
    pub fraction: f64,
    pub diagnosis: Option<String>,
}

/// Empirically checks that the reservoir supports connections: samples
/// disjoint zeta2-connectable pair-pairs and attempts an R-internal
/// connection for each. Stores and returns the success statistics.
pub fn validate_reservoir(
    h: &Hypergraph3,
    fam: &RobustFamily,
    res: &mut Reservoir,
    zeta2: f64,
    ell: usize,
    sample: usize,
) -> ReservoirReport {
    let n = fam.n();
    let interior = 3 * ell + 1;
    if res.len() < interior {
        let report = ReservoirReport {
            attempted: 0,
            succeeded: 0,
            fraction: 0.0,
            diagnosis: Some(format!(
                "reservoir of size {} cannot hold a {interior}-vertex interior",
                res.len()
            )),
        };
        res.validation = Some(report.clone());
        return report;
    }
    let pairs = connectable_pairs(fam, zeta2);
    if pairs.len() < 2 {
        let report = ReservoirReport {
            attempted: 0,
            succeeded: 0,
            fraction: 0.0,
            diagnosis: Some("fewer than two connectable pairs".into()),
        };
        res.validation = Some(report.clone());
        return report;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(crate::derive_seed(res.seed, "validate"));
    let mut requests = Vec::with_capacity(sample);
    let mut guard = 0;
    while requests.len() < sample && guard < 20 * sample + 100 {
        guard += 1;
        let a = pairs[rng.gen_range(0..pairs.len())];
        let b = pairs[rng.gen_range(0..pairs.len())];
        if a.0 == b.0 || a.0 == b.1 || a.1 == b.0 || a.1 == b.1 {
            continue;
        }
        requests.push((a, b));
    }

    let mut avoid = res.members.clone();
    avoid.toggle_range(..);
    let succeeded = requests
        .par_iter()
        .filter(|&&(start, end)| {
            let req = ConnectRequest { start, end, zeta: zeta2, avoid: avoid.clone(), ell };
            find_connecting_path(h, fam, &req, VALIDATE_CONNECT_BUDGET).is_ok()
        })
        .count();
    let attempted = requests.len();
    let report = ReservoirReport {
        attempted,
        succeeded,
        fraction: if attempted == 0 { 0.0 } else { succeeded as f64 / attempted as f64 },
        diagnosis: None,
    };
    let _ = n;
    res.validation = Some(report.clone());
    report
}

/// Connects the two pairs with all 3 ell + 1 interior vertices drawn from
/// R minus R', then marks those vertices used. `used_cap` is the caller's
/// bound on |R'| at call time.
#[allow(clippy::too_many_arguments)]
pub fn connect_through_reservoir(
    h: &Hypergraph3,
    fam: &RobustFamily,
    res: &mut Reservoir,
    start: (usize, usize),
    end: (usize, usize),
    zeta2: f64,
    ell: usize,
    used_cap: usize,
    budget: u64,
) -> Result<TightPath, ReservoirError> {
    let interior = 3 * ell + 1;
    let used_now = res.used_len();
    if used_now > used_cap {
        return Err(ReservoirError::UsedCapExceeded { used: used_now, cap: used_cap });
    }
    let available = res.len() - used_now;
    if available < interior {
        return Err(ReservoirError::Depleted { available, needed: interior });
    }
    let mut avoid = res.available();
    avoid.toggle_range(..);
    let req = ConnectRequest { start, end, zeta: zeta2, avoid, ell };
    let path = find_connecting_path(h, fam, &req, budget)?;
    let seq = path.seq();
    for &v in &seq[2..seq.len() - 2] {
        debug_assert!(res.members.contains(v) && !res.used.contains(v));
        res.used.insert(v);
    }
    debug_assert_eq!(res.used_len(), used_now + interior);
    Ok(path)
}

/// Draws `count` distinct zeta-connectable pairs with pairwise-disjoint
/// vertex sets, preferring vertices outside `exclude`. Utility for closing
/// stages that need endpoint pairs.
pub fn disjoint_connectable_pairs(
    fam: &RobustFamily,
    zeta: f64,
    exclude: &FixedBitSet,
    count: usize,
    seed: u64,
) -> Vec<(usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(crate::derive_seed(seed, "pair-draw"));
    let mut pool = connectable_pairs(fam, zeta);
    pool.shuffle(&mut rng);
    pool.sort_by_key(|&(x, y)| exclude.contains(x) as u8 + exclude.contains(y) as u8);
    let mut taken = FixedBitSet::with_capacity(fam.n());
    let mut out = Vec::new();
    for (x, y) in pool {
        if out.len() == count {
            break;
        }
        if !taken.contains(x) && !taken.contains(y) {
            taken.insert(x);
            taken.insert(y);
            out.push((x, y));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn sample_respects_window_and_seed() {
        let h = Hypergraph3::empty(1000);
        let r = sample_reservoir(&h, 0.2, 3, 7, 50).unwrap();
        assert!(r.len() >= 20 && r.len() <= 40, "got {}", r.len());
        let r2 = sample_reservoir(&h, 0.2, 3, 7, 50).unwrap();
        assert_eq!(r.members, r2.members);
        assert_eq!(r.used_len(), 0);
    }

    #[test]
    fn sample_rejects_vacuous_window() {
        let h = Hypergraph3::empty(50);
        assert!(matches!(
            sample_reservoir(&h, 0.2, 3, 1, 10),
            Err(ReservoirError::TooSmall(_))
        ));
    }

    #[test]
    fn distinct_seeds_give_distinct_reservoirs() {
        let h = Hypergraph3::empty(400);
        let mut seen = HashSet::new();
        for seed in 0..100u64 {
            let r = sample_reservoir(&h, 0.3, 3, seed, 50).unwrap();
            seen.insert(r.members.ones().collect::<Vec<_>>());
        }
        assert!(seen.len() >= 99, "only {} distinct member sets", seen.len());
    }

    #[test]
    fn validate_complete_hypergraph_fraction_one() {
        let h = Hypergraph3::complete(40);
        let fam = RobustFamily::build(&h, 0.2);
        let mut res = sample_reservoir(&h, 0.9, 3, 3, 100).unwrap();
        assert!(res.len() >= 14, "endpoints may sit inside the reservoir");
        let report = validate_reservoir(&h, &fam, &mut res, 0.15, 3, 30);
        assert_eq!(report.attempted, 30);
        assert_eq!(report.fraction, 1.0);
        assert!(res.validation.is_some());
    }

    #[test]
    fn validate_undersized_reservoir_reports_zero() {
        let h = Hypergraph3::complete(40);
        let fam = RobustFamily::build(&h, 0.2);
        let mut res = sample_reservoir(&h, 0.46, 3, 3, 200).unwrap();
        assert!(res.len() < 10);
        let report = validate_reservoir(&h, &fam, &mut res, 0.15, 3, 10);
        assert_eq!(report.fraction, 0.0);
        assert!(report.diagnosis.is_some());
    }

    #[test]
    fn connect_marks_interior_used() {
        let h = Hypergraph3::complete(60);
        let fam = RobustFamily::build(&h, 0.2);
        let mut res = sample_reservoir(&h, 0.6, 3, 11, 100).unwrap();
        let outside: Vec<usize> = (0..60).filter(|&v| !res.members.contains(v)).collect();
        assert!(outside.len() >= 4);
        let (x, y, z, w) = (outside[0], outside[1], outside[2], outside[3]);
        let p = connect_through_reservoir(&h, &fam, &mut res, (x, y), (z, w), 0.15, 3, 40, 50_000)
            .unwrap();
        assert_eq!(res.used_len(), 10);
        for &v in &p.seq()[2..12] {
            assert!(res.members.contains(v));
            assert!(res.used().contains(v));
        }
    }

    #[test]
    fn successive_connections_use_disjoint_interiors() {
        let h = Hypergraph3::complete(80);
        let fam = RobustFamily::build(&h, 0.2);
        let mut res = sample_reservoir(&h, 0.8, 3, 5, 200).unwrap();
        let outside: Vec<usize> = (0..80).filter(|&v| !res.members.contains(v)).collect();
        let (x, y, z, w) = (outside[0], outside[1], outside[2], outside[3]);
        let size = res.len();
        let capacity = (size - 4) / 10;
        assert!(capacity >= 2);
        let mut seen = HashSet::new();
        for round in 0..capacity {
            let p = connect_through_reservoir(
                &h, &fam, &mut res, (x, y), (z, w), 0.15, 3, size, 100_000,
            )
            .unwrap_or_else(|e| panic!("round {round}: {e}"));
            for &v in &p.seq()[2..12] {
                assert!(seen.insert(v), "vertex {v} reused in round {round}");
            }
            assert_eq!(res.used_len(), (round + 1) * 10);
        }
    }

    #[test]
    fn depleted_reservoir_errors() {
        let h = Hypergraph3::complete(40);
        let fam = RobustFamily::build(&h, 0.2);
        let mut res = (0..50)
            .find_map(|seed| {
                sample_reservoir(&h, 0.55, 3, seed, 200)
                    .ok()
                    .filter(|r| (10..20).contains(&r.len()))
            })
            .expect("some seed lands in [10, 20): room for exactly one connection");
        let outside: Vec<usize> = (0..40).filter(|&v| !res.members.contains(v)).collect();
        let (x, y, z, w) = (outside[0], outside[1], outside[2], outside[3]);
        connect_through_reservoir(&h, &fam, &mut res, (x, y), (z, w), 0.15, 3, 40, 50_000)
            .unwrap();
        assert!(matches!(
            connect_through_reservoir(&h, &fam, &mut res, (x, y), (z, w), 0.15, 3, 40, 50_000),
            Err(ReservoirError::Depleted { .. })
        ));
    }

    #[test]
    fn used_cap_is_enforced() {
        let h = Hypergraph3::complete(60);
        let fam = RobustFamily::build(&h, 0.2);
        let mut res = sample_reservoir(&h, 0.7, 3, 9, 200).unwrap();
        let outside: Vec<usize> = (0..60).filter(|&v| !res.members.contains(v)).collect();
        let (x, y, z, w) = (outside[0], outside[1], outside[2], outside[3]);
        connect_through_reservoir(&h, &fam, &mut res, (x, y), (z, w), 0.15, 3, 5, 50_000)
            .unwrap();
        assert!(matches!(
            connect_through_reservoir(&h, &fam, &mut res, (x, y), (z, w), 0.15, 3, 5, 50_000),
            Err(ReservoirError::UsedCapExceeded { used: 10, cap: 5 })
        ));
    }

    #[test]
    fn pair_draw_is_disjoint_and_prefers_outside() {
        let h = Hypergraph3::complete(30);
        let fam = RobustFamily::build(&h, 0.2);
        let mut exclude = FixedBitSet::with_capacity(30);
        for v in 0..20 {
            exclude.insert(v);
        }
        let pairs = disjoint_connectable_pairs(&fam, 0.15, &exclude, 4, 3);
        assert_eq!(pairs.len(), 4);
        let mut seen = HashSet::new();
        for (x, y) in &pairs {
            assert!(seen.insert(*x) && seen.insert(*y));
            assert!(!exclude.contains(*x) && !exclude.contains(*y));
        }
    }
}
