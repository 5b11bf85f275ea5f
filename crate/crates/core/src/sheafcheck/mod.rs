//! Finite checks of the atomic-sheaf theory of symbol-indexed sets.
//!
//! A [`TruncatedSite`] is the category of symbol contexts and injective
//! renamings cut off at a fixed context size, and a [`FinitePresheaf`] is an
//! explicit functor out of it. On these, [`FinitePresheaf::supports`],
//! [`FinitePresheaf::least_support`], [`FinitePresheaf::is_sheaf`] and
//! [`FinitePresheaf::preserves_pullbacks`] are decided by exhaustive
//! quantification, and [`pullback_agreement`] compares the last two over an
//! enumeration of presheaves.

mod enumerate;
mod presheaf;
mod site;

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub use presheaf::{FinitePresheaf, PullbackFailure, SheafError, SheafFailure};
pub use site::{Arrow, ArrowId, ObjId, PullbackSquare, TruncatedSite};

use crate::name::Sort;

/// How many presheaves [`pullback_agreement`] looks at.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Budget {
    /// Every functor with fibers of at most this size is checked.
    pub exhaustive_fiber: usize,
    /// Number of random functors, fibers `1..=random_fiber`.
    pub samples: usize,
    pub random_fiber: usize,
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { exhaustive_fiber: 2, samples: 500, random_fiber: 3, seed: 0 }
    }
}

/// One presheaf's verdicts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PresheafRecord {
    /// `"exhaustive"` or `"random"`.
    pub source: &'static str,
    pub index: usize,
    /// Fiber sizes over the canonical contexts, smallest first.
    pub fibers: Vec<usize>,
    pub is_sheaf: bool,
    pub preserves_pullbacks: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sheaf_failure: Option<SheafFailure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pullback_failure: Option<PullbackFailure>,
}

impl PresheafRecord {
    pub fn agrees(&self) -> bool {
        self.is_sheaf == self.preserves_pullbacks
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AgreementReport {
    pub sorts: Vec<String>,
    pub max_size: usize,
    pub pool: usize,
    pub objects: usize,
    pub arrows: usize,
    pub pullback_squares: usize,
    pub budget: Budget,
    pub exhaustive: usize,
    pub sampled: usize,
    pub sheaves: usize,
    pub disagreements: usize,
    #[serde(skip)]
    pub records: Vec<PresheafRecord>,
}

impl AgreementReport {
    pub fn checked(&self) -> usize {
        self.exhaustive + self.sampled
    }

    pub fn first_disagreement(&self) -> Option<&PresheafRecord> {
        self.records.iter().find(|r| !r.agrees())
    }
}

fn record(x: &FinitePresheaf, source: &'static str, index: usize, fibers: Vec<usize>) -> PresheafRecord {
    let sheaf_failure = x.sheaf_failure();
    let pullback_failure = x.pullback_failure();
    PresheafRecord {
        source,
        index,
        fibers,
        is_sheaf: sheaf_failure.is_none(),
        preserves_pullbacks: pullback_failure.is_none(),
        sheaf_failure,
        pullback_failure,
    }
}

/// Checks `is_sheaf == preserves_pullbacks` on every functor with small
/// fibers and on seeded random functors with larger ones.
///
/// Functors are enumerated on the skeleton (one context per shape) and
/// transported to the full site, so each isomorphism class of site data is
/// visited once per choice of action tables.
pub fn pullback_agreement(sorts: &[Sort], max_size: usize, budget: &Budget) -> AgreementReport {
    let full = Arc::new(TruncatedSite::new(sorts.to_vec(), max_size));
    let skel = Arc::new(full.skeleton());
    let interior = skel.interior();
    let tables = enumerate::Tables::new(&interior);
    let plan = presheaf::TransportPlan::new(&skel, &full);
    full.pullback_squares();

    let mut found: Vec<(Vec<usize>, Vec<Vec<u32>>)> = Vec::new();
    for fibers in enumerate::fiber_vectors(interior.object_count(), budget.exhaustive_fiber) {
        enumerate::functors_with_fibers(&interior, &tables, &fibers, &mut |action| {
            found.push((fibers.clone(), action));
            true
        });
    }
    let exhaustive = found.len();
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let mut sampled = 0;
    while sampled < budget.samples {
        if let Some(f) = enumerate::random_functor(&interior, &tables, budget.random_fiber, &mut rng) {
            found.push(f);
            sampled += 1;
        }
    }

    let records: Vec<PresheafRecord> = found
        .into_par_iter()
        .enumerate()
        .map(|(i, (fibers, action))| {
            let x = FinitePresheaf::extend_unchecked(skel.clone(), fibers.clone(), action);
            let x = x.transport_with(&plan, full.clone());
            let (source, index) = if i < exhaustive { ("exhaustive", i) } else { ("random", i - exhaustive) };
            record(&x, source, index, fibers)
        })
        .collect();

    AgreementReport {
        sorts: sorts.iter().map(|s| s.to_string()).collect(),
        max_size,
        pool: full.pool().len(),
        objects: full.object_count(),
        arrows: full.arrow_count(),
        pullback_squares: full.pullback_squares().len(),
        budget: budget.clone(),
        exhaustive,
        sampled,
        sheaves: records.iter().filter(|r| r.is_sheaf).count(),
        disagreements: records.iter().filter(|r| !r.agrees()).count(),
        records,
    }
}
