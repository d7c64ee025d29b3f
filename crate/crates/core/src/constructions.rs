//! Generators: the three extremal families that block tight Hamiltonian
//! cycles at minimum pair degree just below 5n/9, and seeded random
//! instances.
//!
//! Every family is built around a distinguished prefix X = {0, .., X_size-1}
//! of the vertex set. Families (i) and (ii) keep exactly the triples with
//! |e ∩ X| != 2; family (iii) keeps the triples meeting X.

use crate::hgraph::Hypergraph3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremalKind {
    I,
    II,
    III,
}

impl std::str::FromStr for ExtremalKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "i" | "I" => Ok(Self::I),
            "ii" | "II" => Ok(Self::II),
            "iii" | "III" => Ok(Self::III),
            other => Err(format!("unknown extremal kind '{other}' (expected i, ii, or iii)")),
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("n = {0} too small for the extremal construction (need n >= 7)")]
    TooSmall(usize),
}

/// The distinguished-part sizes of the three families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtremalSpec {
    pub kind: ExtremalKind,
    pub n: usize,
    pub x_size: usize,
}

impl ExtremalSpec {
    pub fn new(kind: ExtremalKind, n: usize) -> Result<Self, ConstructionError> {
        if n < 7 {
            return Err(ConstructionError::TooSmall(n));
        }
        let x_size = match kind {
            ExtremalKind::I => (n + 1).div_ceil(3),
            ExtremalKind::II => (2 * n).div_ceil(3),
            ExtremalKind::III => n / 3 - 1,
        };
        debug_assert!(0 < x_size && x_size < n);
        Ok(Self { kind, n, x_size })
    }

    /// True iff the triple belongs to the family.
    pub fn keeps(&self, e: [usize; 3]) -> bool {
        let in_x = e.iter().filter(|&&v| v < self.x_size).count();
        match self.kind {
            ExtremalKind::I | ExtremalKind::II => in_x != 2,
            ExtremalKind::III => in_x >= 1,
        }
    }
}

/// Builds one of the extremal families on vertex set 0..n with
/// X = {0, .., X_size - 1}. Deterministic.
pub fn extremal_example(kind: ExtremalKind, n: usize) -> Result<Hypergraph3, ConstructionError> {
    let spec = ExtremalSpec::new(kind, n)?;
    let mut triples = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                if spec.keeps([a, b, c]) {
                    triples.push([a, b, c]);
                }
            }
        }
    }
    Ok(Hypergraph3::new(n, triples).expect("generated triples are valid"))
}

/// Random 3-uniform hypergraph: every triple is an edge independently with
/// probability p. Reproducible per seed (ChaCha8, one draw per triple in
/// lexicographic order).
pub fn random_hypergraph(n: usize, p: f64, seed: u64) -> Hypergraph3 {
    assert!((0.0..=1.0).contains(&p), "probability out of range: {p}");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut triples = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                if rng.gen::<f64>() < p {
                    triples.push([a, b, c]);
                }
            }
        }
    }
    Hypergraph3::new(n, triples).expect("generated triples are valid")
}

/// (δ, δ₂): minimum vertex degree and minimum pair degree.
pub fn min_degrees(h: &Hypergraph3) -> (usize, usize) {
    h.min_degrees()
}
