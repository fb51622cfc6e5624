//! Shared fixtures for the integration suites.
#![allow(dead_code)] // each test binary uses a subset

use std::sync::Arc;

use factorgibbs::{FactorMap, Potential, Subshift, Word};

pub fn full(k: usize) -> Arc<Subshift> {
    Subshift::full(k).unwrap()
}

pub fn golden_mean() -> Arc<Subshift> {
    Subshift::sft(&[vec![1, 1], vec![1, 0]]).unwrap()
}

/// Collapse {a,b} -> A, {c} -> B between full shifts.
pub fn f1_map() -> Arc<FactorMap> {
    Arc::new(FactorMap::new(full(3), full(2), vec![0, 0, 1], 6).unwrap())
}

/// Window-1 weights (1, 2, 3) on the full 3-shift.
pub fn f2_potential() -> Arc<Potential> {
    Potential::single(
        full(3),
        1,
        &[
            (Word::new(vec![0]), 0.0),
            (Word::new(vec![1]), 2f64.ln()),
            (Word::new(vec![2]), 3f64.ln()),
        ],
    )
    .unwrap()
}

/// Window-2 table (1, 2, 1, 3) on the full 2-shift.
pub fn window2_full2() -> Arc<Potential> {
    Potential::single(
        full(2),
        2,
        &[
            (Word::new(vec![0, 0]), 0.0),
            (Word::new(vec![0, 1]), 2f64.ln()),
            (Word::new(vec![1, 0]), 0.0),
            (Word::new(vec![1, 1]), 3f64.ln()),
        ],
    )
    .unwrap()
}

/// Both full-2 symbols collapse to the one-symbol shift.
pub fn collapse_full2_map() -> Arc<FactorMap> {
    Arc::new(FactorMap::new(full(2), full(1), vec![0, 0], 6).unwrap())
}

/// Constant one-block map from the golden mean onto the one-symbol shift.
pub fn golden_collapse_map() -> Arc<FactorMap> {
    Arc::new(FactorMap::new(golden_mean(), full(1), vec![0, 0], 6).unwrap())
}

/// Strictly positive window-2 table on the full 3-shift; positivity keeps
/// the one-step ratios strictly above 1.
pub fn window2_full3() -> Arc<Potential> {
    let values = [0.35, 0.6, 0.2, 0.5, 0.75, 0.4, 0.3, 0.55, 0.65];
    let shift = full(3);
    let entries: Vec<(Word, f64)> = shift
        .words(2)
        .iter()
        .enumerate()
        .map(|(i, w)| (w.clone(), values[i]))
        .collect();
    Potential::single(shift, 2, &entries).unwrap()
}
