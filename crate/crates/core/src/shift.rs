//! One-sided subshifts over a finite alphabet: full shifts, one-step shifts
//! of finite type, and sofic shifts presented by labeled graphs.
//!
//! A subshift owns its admissibility rule and enumerates its language
//! `B_n(X)` in lexicographic order. Enumerations are cached per level since
//! pressure sums re-read them repeatedly; everything else is immutable after
//! construction, so values can be shared freely across threads.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};

const DIGITS: &[u8] = b"0123456789abcdefghijklmnopqrstuvwxyz";

/// A finite word over the alphabet of some subshift. Symbols are alphabet
/// indices; ordering is lexicographic.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(symbols: Vec<u8>) -> Self {
        Word(symbols)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[u8] {
        &self.0
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n].to_vec())
    }

    pub fn suffix_from(&self, start: usize) -> Word {
        Word(self.0[start..].to_vec())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Symbol-wise image under a map on alphabet indices.
    pub fn map_symbols(&self, table: &[u8]) -> Word {
        Word(self.0.iter().map(|&s| table[s as usize]).collect())
    }

    /// Parse a word from a base-36 digit string ("01", "a2f", ...).
    pub fn parse(text: &str) -> Option<Word> {
        let mut out = Vec::with_capacity(text.len());
        for ch in text.bytes() {
            let d = DIGITS.iter().position(|&c| c == ch.to_ascii_lowercase())?;
            out.push(d as u8);
        }
        Some(Word(out))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        for &s in &self.0 {
            let ch = DIGITS.get(s as usize).copied().unwrap_or(b'?');
            write!(f, "{}", ch as char)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A labeled graph presenting a sofic shift. Vertices are `0..num_states`;
/// each edge carries an alphabet symbol. The language is the set of label
/// sequences of finite paths.
#[derive(Clone, Debug)]
pub struct LabeledGraph {
    pub num_states: usize,
    /// (from, symbol, to)
    pub edges: Vec<(usize, u8, usize)>,
}

#[derive(Clone, Debug)]
pub enum ShiftKind {
    Full,
    /// One-step SFT: `transition[i][j]` allows symbol `j` after symbol `i`.
    Sft { transition: Vec<Vec<bool>> },
    Sofic { graph: LabeledGraph },
}

/// Tracks the admissibility state while reading a word left to right.
/// For SFTs this is the last symbol; for sofic shifts the subset of graph
/// vertices reachable by some path with the labels read so far.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum ReadState {
    Full,
    SftStart,
    SftAt(u8),
    Sofic(u64),
}

pub struct Subshift {
    alphabet: usize,
    kind: ShiftKind,
    // per-symbol successor masks for sofic stepping
    sofic_step: Vec<Vec<u64>>, // [symbol][state] -> mask of successors
    word_cache: RwLock<HashMap<usize, Arc<Vec<Word>>>>,
}

impl fmt::Debug for Subshift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subshift(alphabet={}, kind=", self.alphabet)?;
        match &self.kind {
            ShiftKind::Full => write!(f, "full")?,
            ShiftKind::Sft { .. } => write!(f, "sft")?,
            ShiftKind::Sofic { graph } => write!(f, "sofic[{} states]", graph.num_states)?,
        }
        write!(f, ")")
    }
}

impl Subshift {
    /// Full shift on `k` symbols.
    pub fn full(k: usize) -> Result<Arc<Subshift>> {
        if k == 0 {
            return Err(Error::InvalidAlphabet);
        }
        Ok(Arc::new(Subshift {
            alphabet: k,
            kind: ShiftKind::Full,
            sofic_step: Vec::new(),
            word_cache: RwLock::new(HashMap::new()),
        }))
    }

    /// One-step SFT from a 0/1 transition matrix. Every row and every column
    /// must contain a 1, so the language is prolongable and has no dead
    /// symbols.
    pub fn sft(matrix: &[Vec<u8>]) -> Result<Arc<Subshift>> {
        let k = matrix.len();
        if k == 0 {
            return Err(Error::InvalidAlphabet);
        }
        for row in matrix {
            if row.len() != k {
                return Err(Error::NonSquareMatrix {
                    rows: k,
                    width: row.len(),
                });
            }
        }
        let transition: Vec<Vec<bool>> = matrix
            .iter()
            .map(|row| row.iter().map(|&e| e != 0).collect())
            .collect();
        for i in 0..k {
            if !transition[i].iter().any(|&b| b) {
                return Err(Error::DeadSymbol { symbol: i });
            }
            if !(0..k).any(|j| transition[j][i]) {
                return Err(Error::DeadSymbol { symbol: i });
            }
        }
        Ok(Arc::new(Subshift {
            alphabet: k,
            kind: ShiftKind::Sft { transition },
            sofic_step: Vec::new(),
            word_cache: RwLock::new(HashMap::new()),
        }))
    }

    /// Sofic shift presented by a labeled graph. Every vertex needs an
    /// outgoing edge (so every finite path extends to a point) and every
    /// symbol must label some edge.
    pub fn sofic(graph: LabeledGraph, alphabet: usize) -> Result<Arc<Subshift>> {
        if alphabet == 0 {
            return Err(Error::InvalidAlphabet);
        }
        if graph.num_states == 0 || graph.num_states > 64 {
            return Err(Error::BadGraph(format!(
                "need 1..=64 states, got {}",
                graph.num_states
            )));
        }
        let mut out_degree = vec![0usize; graph.num_states];
        let mut symbol_used = vec![false; alphabet];
        for &(from, sym, to) in &graph.edges {
            if from >= graph.num_states || to >= graph.num_states {
                return Err(Error::BadGraph(format!(
                    "edge ({from},{sym},{to}) references a missing state"
                )));
            }
            if sym as usize >= alphabet {
                return Err(Error::BadGraph(format!(
                    "edge label {sym} outside alphabet of size {alphabet}"
                )));
            }
            out_degree[from] += 1;
            symbol_used[sym as usize] = true;
        }
        if let Some(s) = out_degree.iter().position(|&d| d == 0) {
            return Err(Error::BadGraph(format!("state {s} has no outgoing edge")));
        }
        if let Some(s) = symbol_used.iter().position(|&u| !u) {
            return Err(Error::DeadSymbol { symbol: s });
        }
        let mut sofic_step = vec![vec![0u64; graph.num_states]; alphabet];
        for &(from, sym, to) in &graph.edges {
            sofic_step[sym as usize][from] |= 1u64 << to;
        }
        Ok(Arc::new(Subshift {
            alphabet,
            kind: ShiftKind::Sofic { graph },
            sofic_step,
            word_cache: RwLock::new(HashMap::new()),
        }))
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn kind(&self) -> &ShiftKind {
        &self.kind
    }

    pub fn is_full(&self) -> bool {
        matches!(self.kind, ShiftKind::Full)
    }

    /// Transition matrix when this is an SFT.
    pub fn transition_matrix(&self) -> Option<&Vec<Vec<bool>>> {
        match &self.kind {
            ShiftKind::Sft { transition } => Some(transition),
            _ => None,
        }
    }

    pub fn initial_state(&self) -> ReadState {
        match &self.kind {
            ShiftKind::Full => ReadState::Full,
            ShiftKind::Sft { .. } => ReadState::SftStart,
            ShiftKind::Sofic { graph } => {
                let all = if graph.num_states == 64 {
                    u64::MAX
                } else {
                    (1u64 << graph.num_states) - 1
                };
                ReadState::Sofic(all)
            }
        }
    }

    /// Advance the read state by one symbol; `None` means the extended word
    /// is inadmissible.
    pub fn step(&self, state: ReadState, symbol: u8) -> Option<ReadState> {
        if symbol as usize >= self.alphabet {
            return None;
        }
        match (&self.kind, state) {
            (ShiftKind::Full, ReadState::Full) => Some(ReadState::Full),
            (ShiftKind::Sft { .. }, ReadState::SftStart) => Some(ReadState::SftAt(symbol)),
            (ShiftKind::Sft { transition }, ReadState::SftAt(prev)) => {
                if transition[prev as usize][symbol as usize] {
                    Some(ReadState::SftAt(symbol))
                } else {
                    None
                }
            }
            (ShiftKind::Sofic { graph }, ReadState::Sofic(mask)) => {
                let steps = &self.sofic_step[symbol as usize];
                let mut next = 0u64;
                for s in 0..graph.num_states {
                    if mask & (1u64 << s) != 0 {
                        next |= steps[s];
                    }
                }
                if next != 0 {
                    Some(ReadState::Sofic(next))
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Read state after consuming a whole word, if admissible.
    pub fn read(&self, word: &[u8]) -> Option<ReadState> {
        let mut state = self.initial_state();
        for &s in word {
            state = self.step(state, s)?;
        }
        Some(state)
    }

    pub fn is_admissible(&self, word: &[u8]) -> bool {
        self.read(word).is_some()
    }

    /// `B_n(X)` in lexicographic order, cached per level.
    pub fn words(&self, n: usize) -> Arc<Vec<Word>> {
        if let Some(hit) = self.word_cache.read().unwrap().get(&n) {
            return Arc::clone(hit);
        }
        let mut out = Vec::new();
        self.visit_words(n, &mut |w| out.push(Word::new(w.to_vec())));
        let arc = Arc::new(out);
        self.word_cache
            .write()
            .unwrap()
            .entry(n)
            .or_insert_with(|| Arc::clone(&arc));
        arc
    }

    pub fn count_words(&self, n: usize) -> usize {
        if let Some(hit) = self.word_cache.read().unwrap().get(&n) {
            return hit.len();
        }
        let mut count = 0usize;
        self.visit_words(n, &mut |_| count += 1);
        count
    }

    /// Depth-first lexicographic sweep of `B_n(X)` without materializing it.
    pub fn visit_words(&self, n: usize, visit: &mut dyn FnMut(&[u8])) {
        let mut prefix = Vec::with_capacity(n);
        self.visit_rec(self.initial_state(), n, &mut prefix, visit);
    }

    fn visit_rec(
        &self,
        state: ReadState,
        n: usize,
        prefix: &mut Vec<u8>,
        visit: &mut dyn FnMut(&[u8]),
    ) {
        if prefix.len() == n {
            visit(prefix);
            return;
        }
        for s in 0..self.alphabet as u8 {
            if let Some(next) = self.step(state, s) {
                prefix.push(s);
                self.visit_rec(next, n, prefix, visit);
                prefix.pop();
            }
        }
    }

    /// Least `p <= max_gap` such that every ordered pair of admissible words
    /// (up to `pair_len` long) can be bridged by some word of length exactly
    /// `p`. `None` if no such uniform gap exists within the bound.
    pub fn specification_gap(&self, max_gap: usize, pair_len: usize) -> Option<usize> {
        'gaps: for p in 0..=max_gap {
            for lu in 1..=pair_len {
                let us = self.words(lu);
                for lv in 1..=pair_len {
                    let vs = self.words(lv);
                    for u in us.iter() {
                        let from = self.read(u.symbols()).expect("enumerated word");
                        for v in vs.iter() {
                            if !self.bridgeable(from, v.symbols(), p) {
                                continue 'gaps;
                            }
                        }
                    }
                }
            }
            return Some(p);
        }
        None
    }

    /// Is there a bridge word of length exactly `gap` from `state` to `v`?
    fn bridgeable(&self, state: ReadState, v: &[u8], gap: usize) -> bool {
        if gap == 0 {
            return self.read_from(state, v).is_some();
        }
        for s in 0..self.alphabet as u8 {
            if let Some(next) = self.step(state, s) {
                if self.bridgeable(next, v, gap - 1) {
                    return true;
                }
            }
        }
        false
    }

    fn read_from(&self, state: ReadState, word: &[u8]) -> Option<ReadState> {
        let mut st = state;
        for &s in word {
            st = self.step(st, s)?;
        }
        Some(st)
    }

    /// Lexicographically minimal eventually periodic admissible continuation
    /// of `word`. Deterministic, so "one point per cylinder" constructions
    /// are reproducible.
    pub fn canonical_tail(&self, word: &[u8]) -> Result<Tail> {
        let mut state = self
            .read(word)
            .ok_or_else(|| Error::InadmissibleWord {
                word: Word::new(word.to_vec()),
            })?;
        // Greedy least-symbol extension; every admissible word extends, so
        // the minimum exists at each step. The driven state sequence lives
        // in a finite set, hence becomes periodic.
        let mut seen: HashMap<ReadState, usize> = HashMap::new();
        let mut emitted: Vec<u8> = Vec::new();
        loop {
            if let Some(&at) = seen.get(&state) {
                let head = emitted[..at].to_vec();
                let cycle = emitted[at..].to_vec();
                return Ok(Tail { head, cycle });
            }
            seen.insert(state, emitted.len());
            let mut advanced = false;
            for s in 0..self.alphabet as u8 {
                if let Some(next) = self.step(state, s) {
                    emitted.push(s);
                    state = next;
                    advanced = true;
                    break;
                }
            }
            assert!(advanced, "subshift invariant: every word extends");
            assert!(
                emitted.len() <= 1 << 17,
                "canonical tail failed to close into a cycle"
            );
        }
    }

    /// Canonical point of the cylinder `[word]`: the word followed by its
    /// canonical tail.
    pub fn canonical_point(&self, word: &[u8]) -> Result<PeriodicPoint> {
        let tail = self.canonical_tail(word)?;
        let mut head = word.to_vec();
        head.extend_from_slice(&tail.head);
        Ok(PeriodicPoint::new(head, tail.cycle))
    }

    /// Check that `head · cycle^∞` is a point of this subshift.
    pub fn admits_point(&self, point: &PeriodicPoint) -> bool {
        let Some(mut state) = self.read(&point.head) else {
            return false;
        };
        // After each full cycle the read state must stay alive; states
        // repeat within finitely many cycles, at which point the whole
        // periodic continuation is admissible.
        let mut seen: HashMap<ReadState, ()> = HashMap::new();
        loop {
            if seen.contains_key(&state) {
                return true;
            }
            seen.insert(state, ());
            match self.read_from(state, &point.cycle) {
                Some(next) => state = next,
                None => return false,
            }
        }
    }
}

/// Eventually periodic continuation after a word: `head` then `cycle`
/// repeated forever. `cycle` is nonempty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tail {
    pub head: Vec<u8>,
    pub cycle: Vec<u8>,
}

/// An eventually periodic point `head · cycle^∞`: the only kind of point a
/// finite computation can take as input.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PeriodicPoint {
    head: Vec<u8>,
    cycle: Vec<u8>,
}

impl PeriodicPoint {
    pub fn new(head: Vec<u8>, cycle: Vec<u8>) -> Self {
        assert!(!cycle.is_empty(), "cycle must be nonempty");
        PeriodicPoint { head, cycle }
    }

    pub fn periodic(cycle: Vec<u8>) -> Self {
        Self::new(Vec::new(), cycle)
    }

    pub fn head(&self) -> &[u8] {
        &self.head
    }

    pub fn cycle(&self) -> &[u8] {
        &self.cycle
    }

    /// 0-based coordinate.
    pub fn symbol_at(&self, i: usize) -> u8 {
        if i < self.head.len() {
            self.head[i]
        } else {
            self.cycle[(i - self.head.len()) % self.cycle.len()]
        }
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word::new((0..n).map(|i| self.symbol_at(i)).collect())
    }

    /// The shifted point σ^n(x).
    pub fn shifted(&self, n: usize) -> PeriodicPoint {
        if n <= self.head.len() {
            PeriodicPoint::new(self.head[n..].to_vec(), self.cycle.clone())
        } else {
            let into = (n - self.head.len()) % self.cycle.len();
            let mut cycle = self.cycle[into..].to_vec();
            cycle.extend_from_slice(&self.cycle[..into]);
            PeriodicPoint::new(Vec::new(), cycle)
        }
    }

    /// Symbol-wise image under an alphabet map.
    pub fn map_symbols(&self, table: &[u8]) -> PeriodicPoint {
        PeriodicPoint::new(
            self.head.iter().map(|&s| table[s as usize]).collect(),
            self.cycle.iter().map(|&s| table[s as usize]).collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn golden_mean() -> Arc<Subshift> {
        Subshift::sft(&[vec![1, 1], vec![1, 0]]).unwrap()
    }

    /// Independent count oracle: |B_n| of an SFT equals the total of the
    /// (n-1)-th power of its transition matrix.
    fn sft_count_by_matrix_power(matrix: &[Vec<u8>], n: usize) -> u64 {
        let k = matrix.len();
        let mut pow = vec![vec![0u64; k]; k];
        for (i, row) in pow.iter_mut().enumerate() {
            row[i] = 1;
        }
        for _ in 1..n {
            let mut next = vec![vec![0u64; k]; k];
            for i in 0..k {
                for j in 0..k {
                    for (l, row) in matrix.iter().enumerate() {
                        next[i][j] += pow[i][l] * row[j] as u64;
                    }
                }
            }
            pow = next;
        }
        pow.iter().flat_map(|r| r.iter()).sum()
    }

    #[test]
    fn full_shift_counts() {
        let x = Subshift::full(3).unwrap();
        assert_eq!(x.count_words(2), 9);
        let one = Subshift::full(1).unwrap();
        assert_eq!(one.count_words(5), 1);
        let two = Subshift::full(2).unwrap();
        assert_eq!(two.count_words(10), 1024);
        assert!(Subshift::full(0).is_err());
    }

    #[test]
    fn sft_counts_match_matrix_power_oracle() {
        let gm_matrix = vec![vec![1, 1], vec![1, 0]];
        let gm = golden_mean();
        for n in 1..=10 {
            assert_eq!(
                gm.count_words(n) as u64,
                sft_count_by_matrix_power(&gm_matrix, n),
                "level {n}"
            );
        }
        assert_eq!(gm.count_words(4), 8);
        assert_eq!(gm.count_words(3), 5);

        let id = Subshift::sft(&[vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(id.count_words(3), 2);

        let all = Subshift::sft(&[vec![1; 3], vec![1; 3], vec![1; 3]]).unwrap();
        assert_eq!(all.count_words(2), 9);
    }

    #[test]
    fn sft_rejects_dead_rows_and_columns() {
        assert!(matches!(
            Subshift::sft(&[vec![1, 1], vec![0, 0]]),
            Err(Error::DeadSymbol { symbol: 1 })
        ));
        assert!(matches!(
            Subshift::sft(&[vec![1, 0], vec![1, 0]]),
            Err(Error::DeadSymbol { symbol: 1 })
        ));
    }

    #[test]
    fn words_are_sorted_and_duplicate_free() {
        let gm = golden_mean();
        let w2 = gm.words(2);
        let rendered: Vec<String> = w2.iter().map(|w| w.to_string()).collect();
        assert_eq!(rendered, vec!["00", "01", "10"]);
        for n in 1..=8 {
            let ws = gm.words(n);
            for pair in ws.windows(2) {
                assert!(pair[0] < pair[1]);
            }
        }
        let full3 = Subshift::full(3).unwrap();
        let w1: Vec<String> = full3.words(1).iter().map(|w| w.to_string()).collect();
        assert_eq!(w1, vec!["0", "1", "2"]);
    }

    #[test]
    fn language_is_submultiplicative() {
        let shifts = [golden_mean(), Subshift::full(2).unwrap()];
        for x in &shifts {
            for n in 1..=5 {
                for m in 1..=5 {
                    assert!(x.count_words(n + m) <= x.count_words(n) * x.count_words(m));
                }
            }
        }
    }

    #[test]
    fn specification_gaps() {
        assert_eq!(Subshift::full(4).unwrap().specification_gap(3, 3), Some(0));
        assert_eq!(golden_mean().specification_gap(3, 4), Some(1));
        let id = Subshift::sft(&[vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(id.specification_gap(6, 3), None);
    }

    #[test]
    fn canonical_tails_are_minimal_and_deterministic() {
        let full2 = Subshift::full(2).unwrap();
        let t = full2.canonical_tail(&[1]).unwrap();
        assert!(t.head.is_empty());
        assert_eq!(t.cycle, vec![0]);

        let gm = golden_mean();
        let t = gm.canonical_tail(&[0, 1]).unwrap();
        // after symbol 1 the least continuation is 0, then 0 forever
        let point = gm.canonical_point(&[0, 1]).unwrap();
        assert_eq!(point.prefix(6).symbols(), &[0, 1, 0, 0, 0, 0]);
        assert_eq!(t.cycle, vec![0]);

        let t = gm.canonical_tail(&[1]).unwrap();
        let point = gm.canonical_point(&[1]).unwrap();
        assert_eq!(point.prefix(4).symbols(), &[1, 0, 0, 0]);
        assert_eq!(t.cycle, vec![0]);
    }

    #[test]
    fn sofic_even_shift_language() {
        // 1-blocks come in even runs: states track parity of the current run.
        let graph = LabeledGraph {
            num_states: 2,
            edges: vec![(0, 0, 0), (0, 1, 1), (1, 1, 0)],
        };
        let x = Subshift::sofic(graph, 2).unwrap();
        assert!(x.is_admissible(&[1, 1]));
        assert!(x.is_admissible(&[0, 1, 1, 0]));
        assert!(!x.is_admissible(&[0, 1, 0]));
        assert!(x.is_admissible(&[1, 0]));
        assert_eq!(x.count_words(1), 2);
        // paths may start mid-run (at state 1), so 1·0^∞ is admissible and
        // is the lexicographic minimum
        let p = x.canonical_point(&[1]).unwrap();
        assert_eq!(p.prefix(4).symbols(), &[1, 0, 0, 0]);
        // after "01" the run is pinned open (only state 1 survives), so the
        // tail must close it with another 1 before any 0
        let p = x.canonical_point(&[0, 1]).unwrap();
        assert_eq!(p.prefix(5).symbols(), &[0, 1, 1, 0, 0]);
    }

    #[test]
    fn periodic_point_navigation() {
        let p = PeriodicPoint::new(vec![2], vec![0, 1]);
        assert_eq!(p.symbol_at(0), 2);
        assert_eq!(p.symbol_at(1), 0);
        assert_eq!(p.symbol_at(2), 1);
        assert_eq!(p.symbol_at(3), 0);
        assert_eq!(p.prefix(5).symbols(), &[2, 0, 1, 0, 1]);
        let s = p.shifted(2);
        assert_eq!(s.prefix(4).symbols(), &[1, 0, 1, 0]);

        let gm = golden_mean();
        assert!(gm.admits_point(&PeriodicPoint::periodic(vec![0, 1])));
        assert!(!gm.admits_point(&PeriodicPoint::periodic(vec![1, 1])));
        assert!(!gm.admits_point(&PeriodicPoint::periodic(vec![1])));
    }
}
