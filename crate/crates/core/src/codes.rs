//! One-block factor maps between subshifts: preimage-cylinder enumeration,
//! fiber counting, and the near-multiplicativity check on fiber counts.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::shift::{Subshift, Word};

/// A one-block factor map `π: X → Y` given by a total map on alphabet
/// symbols. Since it acts symbol by symbol it commutes with the shift.
///
/// Fiber counts are cached internally (transparent: same results with or
/// without the cache), since quotient-potential evaluation re-reads them
/// heavily.
#[derive(Debug)]
pub struct FactorMap {
    domain: Arc<Subshift>,
    codomain: Arc<Subshift>,
    symbol_map: Vec<u8>,
    count_cache: RwLock<HashMap<Word, u64>>,
}

impl FactorMap {
    /// Build and validate a factor map. Validation checks, for every word of
    /// the codomain up to `check_len`, that some admissible domain word maps
    /// onto it, and that images of admissible domain words stay admissible.
    /// Deeper surjectivity failures surface lazily as `NotSurjective`.
    pub fn new(
        domain: Arc<Subshift>,
        codomain: Arc<Subshift>,
        symbol_map: Vec<u8>,
        check_len: usize,
    ) -> Result<FactorMap> {
        if symbol_map.len() != domain.alphabet() {
            return Err(Error::SymbolMapSize {
                got: symbol_map.len(),
                expected: domain.alphabet(),
            });
        }
        for (s, &img) in symbol_map.iter().enumerate() {
            if img as usize >= codomain.alphabet() {
                return Err(Error::SymbolMapRange {
                    symbol: s,
                    image: img as usize,
                    alphabet: codomain.alphabet(),
                });
            }
        }
        let map = FactorMap {
            domain,
            codomain,
            symbol_map,
            count_cache: RwLock::new(HashMap::new()),
        };
        for n in 1..=check_len {
            let mut violation: Option<Error> = None;
            map.domain.visit_words(n, &mut |w| {
                if violation.is_some() {
                    return;
                }
                let img: Vec<u8> = w.iter().map(|&s| map.symbol_map[s as usize]).collect();
                if !map.codomain.is_admissible(&img) {
                    violation = Some(Error::ImageLeavesCodomain {
                        word: Word::new(img),
                    });
                }
            });
            if let Some(e) = violation {
                return Err(e);
            }
            for y in map.codomain.words(n).iter() {
                if !map.has_preimage(y.symbols()) {
                    return Err(Error::NotSurjective { word: y.clone() });
                }
            }
        }
        Ok(map)
    }

    pub fn domain(&self) -> &Arc<Subshift> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<Subshift> {
        &self.codomain
    }

    pub fn symbol_map(&self) -> &[u8] {
        &self.symbol_map
    }

    pub fn apply_symbol(&self, s: u8) -> u8 {
        self.symbol_map[s as usize]
    }

    pub fn apply(&self, word: &Word) -> Word {
        word.map_symbols(&self.symbol_map)
    }

    fn has_preimage(&self, y: &[u8]) -> bool {
        let found = std::cell::Cell::new(false);
        self.visit_preimages(y, &mut |_| found.set(true), &mut || found.get());
        found.get()
    }

    /// All admissible domain words whose symbol-wise image is `y_word`, in
    /// lexicographic order.
    pub fn preimage_cylinders(&self, y_word: &Word) -> Result<Vec<Word>> {
        if !self.codomain.is_admissible(y_word.symbols()) {
            return Err(Error::InadmissibleWord {
                word: y_word.clone(),
            });
        }
        let mut out = Vec::new();
        self.visit_preimages(
            y_word.symbols(),
            &mut |w| out.push(Word::new(w.to_vec())),
            &mut || false,
        );
        Ok(out)
    }

    /// Fiber count `|π^{-1}[y_1…y_n]|`: the number of domain cylinders
    /// mapping onto the codomain cylinder.
    pub fn preimage_count(&self, y_word: &Word) -> Result<u64> {
        if let Some(&hit) = self.count_cache.read().unwrap().get(y_word) {
            return Ok(hit);
        }
        if !self.codomain.is_admissible(y_word.symbols()) {
            return Err(Error::InadmissibleWord {
                word: y_word.clone(),
            });
        }
        let mut count = 0u64;
        self.visit_preimages(y_word.symbols(), &mut |_| count += 1, &mut || false);
        if count == 0 {
            return Err(Error::NotSurjective {
                word: y_word.clone(),
            });
        }
        self.count_cache
            .write()
            .unwrap()
            .insert(y_word.clone(), count);
        Ok(count)
    }

    fn visit_preimages(
        &self,
        y: &[u8],
        visit: &mut dyn FnMut(&[u8]),
        stop: &mut dyn FnMut() -> bool,
    ) {
        let mut prefix = Vec::with_capacity(y.len());
        self.preimage_rec(self.domain.initial_state(), y, &mut prefix, visit, stop);
    }

    fn preimage_rec(
        &self,
        state: crate::shift::ReadState,
        y: &[u8],
        prefix: &mut Vec<u8>,
        visit: &mut dyn FnMut(&[u8]),
        stop: &mut dyn FnMut() -> bool,
    ) {
        if stop() {
            return;
        }
        let depth = prefix.len();
        if depth == y.len() {
            visit(prefix);
            return;
        }
        for s in 0..self.domain.alphabet() as u8 {
            if self.symbol_map[s as usize] != y[depth] {
                continue;
            }
            if let Some(next) = self.domain.step(state, s) {
                prefix.push(s);
                self.preimage_rec(next, y, prefix, visit, stop);
                prefix.pop();
            }
        }
    }

    /// Fiber counts for the whole level at once, aligned with
    /// `codomain.words(n)`. One sweep of `B_n(X)` instead of one preimage
    /// enumeration per codomain word.
    pub fn preimage_counts_at_level(&self, n: usize) -> Result<Vec<u64>> {
        let y_words = self.codomain.words(n);
        let index: HashMap<&Word, usize> = y_words
            .iter()
            .enumerate()
            .map(|(i, w)| (w, i))
            .collect();
        let mut counts = vec![0u64; y_words.len()];
        let mut bad: Option<Word> = None;
        self.domain.visit_words(n, &mut |w| {
            let img = Word::new(w.iter().map(|&s| self.symbol_map[s as usize]).collect());
            match index.get(&img) {
                Some(&i) => counts[i] += 1,
                None => bad = Some(img),
            }
        });
        if let Some(word) = bad {
            return Err(Error::ImageLeavesCodomain { word });
        }
        if let Some(i) = counts.iter().position(|&c| c == 0) {
            return Err(Error::NotSurjective {
                word: y_words[i].clone(),
            });
        }
        Ok(counts)
    }

    /// Scan the near-multiplicativity of fiber counts:
    /// `D · count(y_1…y_n) · count(y_{n+1}…y_{n+m}) ≤ count(y_1…y_{n+m})`.
    ///
    /// Counts are always submultiplicative, so each concatenation ratio lies
    /// in (0,1]; `best_d` is the minimum over all admissible words of total
    /// length ≤ `n_max` and all split points. A uniform positive `D` is only
    /// semidecidable by finite checking, so the per-length minima are
    /// reported as a trend alongside the global value.
    pub fn check_condition_a(&self, n_max: usize) -> Result<ConditionAReport> {
        assert!(n_max >= 2, "need n_max >= 2 to split a word");
        let mut counts_by_len: Vec<Vec<u64>> = Vec::with_capacity(n_max + 1);
        counts_by_len.push(Vec::new());
        for n in 1..=n_max {
            counts_by_len.push(self.preimage_counts_at_level(n)?);
        }
        let mut best_d = 1.0f64;
        let mut d_by_len = Vec::with_capacity(n_max - 1);
        for total in 2..=n_max {
            let words = self.codomain.words(total);
            let mut level_min = 1.0f64;
            for (wi, w) in words.iter().enumerate() {
                let whole = counts_by_len[total][wi];
                for split in 1..total {
                    let left = w.prefix(split);
                    let right = w.suffix_from(split);
                    let li = word_index(&self.codomain, &left);
                    let ri = word_index(&self.codomain, &right);
                    let ratio = whole as f64
                        / (counts_by_len[split][li] as f64 * counts_by_len[total - split][ri] as f64);
                    if ratio < level_min {
                        level_min = ratio;
                    }
                }
            }
            best_d = best_d.min(level_min);
            d_by_len.push((total, level_min));
        }
        Ok(ConditionAReport {
            n_max,
            best_d,
            holds_up_to_n_max: best_d > 0.0,
            d_by_len,
        })
    }
}

/// Position of `word` in the lexicographic enumeration of its level.
fn word_index(shift: &Subshift, word: &Word) -> usize {
    shift
        .words(word.len())
        .binary_search(word)
        .expect("admissible word appears in its level enumeration")
}

/// Result of the fiber-count near-multiplicativity scan.
#[derive(Debug, Clone)]
pub struct ConditionAReport {
    pub n_max: usize,
    /// Minimum concatenation ratio seen; a lower bound certificate candidate
    /// for the uniform constant D.
    pub best_d: f64,
    pub holds_up_to_n_max: bool,
    /// (total word length, minimum ratio at that length) — the decay trend.
    pub d_by_len: Vec<(usize, f64)>,
}

impl ConditionAReport {
    /// True when the per-length minima keep dropping towards 0, the symptom
    /// of a uniform D failing to exist.
    pub fn decaying(&self) -> bool {
        match (self.d_by_len.first(), self.d_by_len.last()) {
            (Some(&(_, first)), Some(&(_, last))) => last < first * 0.95,
            _ => false,
        }
    }
}
