//! Exact Gibbs/equilibrium oracles on mixing SFTs, finite-level Gibbs
//! approximants, and cylinder-level measure plumbing.
//!
//! The oracle route is classical Ruelle–Perron–Frobenius: for an additive
//! window-k potential on a one-step SFT, the dominant eigendata of the
//! weighted block transition matrix give the pressure and a stationary
//! Markov chain whose cylinder probabilities realize the Gibbs property in
//! closed form. All cylinder masses are log-space matrix-product chains, so
//! they stay finite well past level 40.

use std::sync::Arc;

use crate::codes::FactorMap;
use crate::error::{Error, Result};
use crate::logsum::{logaddexp, LogSumAcc};
use crate::potential::Potential;
use crate::shift::{Subshift, Word};

/// A stationary Markov chain on the length-`block` words of a subshift,
/// together with the machinery to compute cylinder masses of arbitrary
/// words.
#[derive(Debug, Clone)]
pub struct MarkovMeasure {
    shift: Arc<Subshift>,
    block: usize,
    states: Arc<Vec<Word>>,
    /// radix index of a block word -> state index (usize::MAX when absent)
    state_lookup: Vec<usize>,
    initial: Vec<f64>,
    transition: Vec<Vec<f64>>,
    log_transition: Vec<Vec<f64>>,
}

impl MarkovMeasure {
    /// Build from a stationary distribution and a stochastic transition
    /// matrix over the length-`block` words of `shift`. Rows must sum to 1,
    /// `initial` must be a fixed left vector, and forbidden transitions must
    /// carry weight zero.
    pub fn new(
        shift: Arc<Subshift>,
        block: usize,
        initial: Vec<f64>,
        transition: Vec<Vec<f64>>,
    ) -> Result<MarkovMeasure> {
        let states = shift.words(block);
        let n = states.len();
        if initial.len() != n || transition.len() != n {
            return Err(Error::Unsupported {
                op: "MarkovMeasure::new",
                requirement: format!("{n} states for block length {block}"),
            });
        }
        for (u, row) in transition.iter().enumerate() {
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::Unsupported {
                    op: "MarkovMeasure::new",
                    requirement: format!("stochastic rows (row {u} sums to {sum})"),
                });
            }
            for (v, &q) in row.iter().enumerate() {
                if q < 0.0 {
                    return Err(Error::Unsupported {
                        op: "MarkovMeasure::new",
                        requirement: "nonnegative transition weights".into(),
                    });
                }
                if q > 0.0 && !blocks_chain(&shift, &states[u], &states[v]) {
                    return Err(Error::Unsupported {
                        op: "MarkovMeasure::new",
                        requirement: format!(
                            "zero weight on forbidden transition {} -> {}",
                            states[u], states[v]
                        ),
                    });
                }
            }
        }
        for v in 0..n {
            let fixed: f64 = (0..n).map(|u| initial[u] * transition[u][v]).sum();
            if (fixed - initial[v]).abs() > 1e-9 {
                return Err(Error::Unsupported {
                    op: "MarkovMeasure::new",
                    requirement: "initial distribution must be stationary".into(),
                });
            }
        }
        Ok(Self::new_unchecked(shift, block, states, initial, transition))
    }

    fn new_unchecked(
        shift: Arc<Subshift>,
        block: usize,
        states: Arc<Vec<Word>>,
        initial: Vec<f64>,
        transition: Vec<Vec<f64>>,
    ) -> MarkovMeasure {
        let mut state_lookup = vec![usize::MAX; shift.alphabet().pow(block as u32)];
        for (i, w) in states.iter().enumerate() {
            state_lookup[radix_index(w.symbols(), shift.alphabet())] = i;
        }
        let log_transition = transition
            .iter()
            .map(|row| row.iter().map(|&q| q.ln()).collect())
            .collect();
        MarkovMeasure {
            shift,
            block,
            states,
            state_lookup,
            initial,
            transition,
            log_transition,
        }
    }

    /// Product measure on a full shift with the given symbol weights.
    pub fn bernoulli(shift: Arc<Subshift>, weights: &[f64]) -> Result<MarkovMeasure> {
        if !shift.is_full() || weights.len() != shift.alphabet() {
            return Err(Error::Unsupported {
                op: "MarkovMeasure::bernoulli",
                requirement: "a full shift with one weight per symbol".into(),
            });
        }
        let total: f64 = weights.iter().sum();
        let p: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let rows = vec![p.clone(); p.len()];
        MarkovMeasure::new(shift, 1, p, rows)
    }

    pub fn shift(&self) -> &Arc<Subshift> {
        &self.shift
    }

    pub fn block(&self) -> usize {
        self.block
    }

    pub fn states(&self) -> &Arc<Vec<Word>> {
        &self.states
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    pub fn transition(&self) -> &Vec<Vec<f64>> {
        &self.transition
    }

    fn state_of(&self, block_word: &[u8]) -> Option<usize> {
        let i = self.state_lookup[radix_index(block_word, self.shift.alphabet())];
        (i != usize::MAX).then_some(i)
    }

    /// Exact `log μ([word])`.
    pub fn log_mass(&self, word: &Word) -> Result<f64> {
        if !self.shift.is_admissible(word.symbols()) {
            return Err(Error::InadmissibleWord { word: word.clone() });
        }
        let w = word.symbols();
        let b = self.block;
        if w.len() < b {
            // marginal over block states extending the word
            let mut acc = LogSumAcc::new();
            for (i, s) in self.states.iter().enumerate() {
                if s.symbols().starts_with(w) {
                    acc.add(self.initial[i].ln());
                }
            }
            return Ok(acc.total());
        }
        let mut state = match self.state_of(&w[0..b]) {
            Some(s) => s,
            None => return Ok(f64::NEG_INFINITY),
        };
        let mut acc = self.initial[state].ln();
        for t in 1..=(w.len() - b) {
            let next = match self.state_of(&w[t..t + b]) {
                Some(s) => s,
                None => return Ok(f64::NEG_INFINITY),
            };
            acc += self.log_transition[state][next];
            state = next;
        }
        Ok(acc)
    }

    /// `log μ` of the set of points whose symbol at position `i` satisfies
    /// `allow(i, symbol)` for `i < len`. The workhorse behind pushforward
    /// masses and joint cylinder masses with free gaps.
    pub fn masked_log_mass(&self, len: usize, allow: &dyn Fn(usize, u8) -> bool) -> f64 {
        let b = self.block;
        let n_states = self.states.len();
        let sym = |i: usize, s: usize| self.states[s].symbols()[i];
        if len < b {
            let mut acc = LogSumAcc::new();
            for s in 0..n_states {
                if (0..len).all(|i| allow(i, sym(i, s))) {
                    acc.add(self.initial[s].ln());
                }
            }
            return acc.total();
        }
        let steps = len - b + 1;
        let mut w: Vec<f64> = (0..n_states)
            .map(|s| {
                if allow(0, sym(0, s)) {
                    self.initial[s].ln()
                } else {
                    f64::NEG_INFINITY
                }
            })
            .collect();
        for t in 1..steps {
            let mut next = vec![f64::NEG_INFINITY; n_states];
            for (v, slot) in next.iter_mut().enumerate() {
                if !allow(t, sym(0, v)) {
                    continue;
                }
                let mut acc = f64::NEG_INFINITY;
                for u in 0..n_states {
                    let a = w[u] + self.log_transition[u][v];
                    if a != f64::NEG_INFINITY {
                        acc = logaddexp(acc, a);
                    }
                }
                *slot = acc;
            }
            w = next;
        }
        let mut acc = LogSumAcc::new();
        for (s, &val) in w.iter().enumerate() {
            if (1..b).all(|j| allow(steps - 1 + j, sym(j, s))) {
                acc.add(val);
            }
        }
        acc.total()
    }

    /// Materialize the level-n cylinder distribution.
    pub fn distribution(&self, n: usize) -> Result<CylinderDistribution> {
        let words = self.shift.words(n);
        let mut weights = Vec::with_capacity(words.len());
        for w in words.iter() {
            weights.push(self.log_mass(w)?.exp());
        }
        CylinderDistribution::new(Arc::clone(&self.shift), n, weights)
    }

    /// Shannon entropy rate of the chain.
    pub fn entropy(&self) -> f64 {
        let mut h = 0.0;
        for (u, row) in self.transition.iter().enumerate() {
            for &q in row {
                if q > 0.0 {
                    h -= self.initial[u] * q * q.ln();
                }
            }
        }
        h
    }

    /// `lim (1/n) ∫ log f_n dμ` for an additive potential whose window fits
    /// inside one chain step (window ≤ block + 1).
    pub fn energy(&self, p: &Potential) -> Result<f64> {
        let window = p.window().filter(|_| p.is_single()).ok_or_else(|| Error::Unsupported {
            op: "MarkovMeasure::energy",
            requirement: "an additive single-function potential".into(),
        })?;
        if window > self.block + 1 {
            return Err(Error::Unsupported {
                op: "MarkovMeasure::energy",
                requirement: format!("window ≤ block+1 = {}", self.block + 1),
            });
        }
        let mut e = 0.0;
        for (u, row) in self.transition.iter().enumerate() {
            for (v, &q) in row.iter().enumerate() {
                if q > 0.0 {
                    let mut edge: Vec<u8> = self.states[u].symbols().to_vec();
                    edge.push(*self.states[v].symbols().last().expect("nonempty block"));
                    let val = p
                        .single_value(&edge[..window])
                        .expect("window fits in edge word");
                    e += self.initial[u] * q * val;
                }
            }
        }
        Ok(e)
    }
}

fn blocks_chain(shift: &Subshift, u: &Word, v: &Word) -> bool {
    let b = u.len();
    if b >= 1 && u.symbols()[1..] != v.symbols()[..b - 1] {
        return false;
    }
    let mut joined = u.symbols().to_vec();
    joined.push(v.symbols()[b - 1]);
    shift.is_admissible(&joined)
}

fn radix_index(word: &[u8], alphabet: usize) -> usize {
    let mut idx = 0usize;
    for &s in word {
        idx = idx * alphabet + s as usize;
    }
    idx
}

/// Dominant eigendata of the weighted transfer matrix plus the associated
/// Gibbs Markov chain.
#[derive(Debug, Clone)]
pub struct RpfData {
    /// log of the Perron eigenvalue: the topological pressure.
    pub pressure: f64,
    pub eigenvalue: f64,
    pub gibbs: MarkovMeasure,
}

/// Ruelle–Perron–Frobenius oracle for a window-1 potential on an
/// irreducible aperiodic SFT (or full shift): pressure is the log Perron
/// eigenvalue of `L_{ij} = e^{f(i)} T_{ij}` and the Gibbs measure is the
/// associated Markov chain.
pub fn rpf_oracle(shift: &Arc<Subshift>, p: &Potential) -> Result<RpfData> {
    if p.window() != Some(1) || !p.is_single() {
        return Err(Error::Unsupported {
            op: "rpf_oracle",
            requirement: "an additive window-1 potential".into(),
        });
    }
    rpf_oracle_blocked(shift, p)
}

/// The same oracle after block recoding: an additive window-k potential on
/// a one-step SFT is window-1 on the (k−1)-block recoding, so the transfer
/// matrix lives on length-max(k−1,1) words. Internal plumbing for
/// window-2+ comparisons; constants are recomputed downstream rather than
/// transported through the recoding.
pub fn rpf_oracle_blocked(shift: &Arc<Subshift>, p: &Potential) -> Result<RpfData> {
    let window = match (p.is_single(), p.window()) {
        (true, Some(k)) => k,
        _ => {
            return Err(Error::Unsupported {
                op: "rpf_oracle_blocked",
                requirement: "an additive single-function potential".into(),
            })
        }
    };
    if matches!(shift.kind(), crate::shift::ShiftKind::Sofic { .. }) {
        return Err(Error::Unsupported {
            op: "rpf_oracle_blocked",
            requirement: "a full shift or one-step SFT".into(),
        });
    }
    let block = window.max(2) - 1;
    let states = shift.words(block);
    let n = states.len();
    let mut weights = vec![vec![0.0f64; n]; n];
    let mut adjacency = vec![vec![false; n]; n];
    for (u, uw) in states.iter().enumerate() {
        for (v, vw) in states.iter().enumerate() {
            if !blocks_chain(shift, uw, vw) {
                continue;
            }
            let mut edge = uw.symbols().to_vec();
            edge.push(vw.symbols()[block - 1]);
            let val = p.single_value(&edge[..window]).expect("edge covers window");
            weights[u][v] = val.exp();
            adjacency[u][v] = true;
        }
    }
    if !is_primitive(&adjacency) {
        return Err(Error::NotPrimitive);
    }
    let (lambda, right) = power_iterate(&weights, false);
    let (_, left) = power_iterate(&weights, true);
    // Rayleigh quotient sharpens the eigenvalue estimate
    let mut num = 0.0;
    let mut den = 0.0;
    for u in 0..n {
        let mut row = 0.0;
        for v in 0..n {
            row += weights[u][v] * right[v];
        }
        num += left[u] * row;
        den += left[u] * right[u];
    }
    let lambda = if den > 0.0 { num / den } else { lambda };

    let mut initial: Vec<f64> = (0..n).map(|i| left[i] * right[i]).collect();
    let total: f64 = initial.iter().sum();
    for x in &mut initial {
        *x /= total;
    }
    let transition: Vec<Vec<f64>> = (0..n)
        .map(|u| {
            (0..n)
                .map(|v| weights[u][v] * right[v] / (lambda * right[u]))
                .collect()
        })
        .collect();
    let gibbs = MarkovMeasure::new_unchecked(
        Arc::clone(shift),
        block,
        states,
        initial,
        transition,
    );
    Ok(RpfData {
        pressure: lambda.ln(),
        eigenvalue: lambda,
        gibbs,
    })
}

/// Wielandt primitivity test: some boolean power of the adjacency matrix is
/// strictly positive.
fn is_primitive(adjacency: &[Vec<bool>]) -> bool {
    let n = adjacency.len();
    if n == 0 {
        return false;
    }
    let bound = n * n - 2 * n + 2;
    let mut pow = adjacency.to_vec();
    for _ in 0..bound.max(1) {
        if pow.iter().all(|row| row.iter().all(|&b| b)) {
            return true;
        }
        let mut next = vec![vec![false; n]; n];
        for i in 0..n {
            for k in 0..n {
                if pow[i][k] {
                    for (j, slot) in next[i].iter_mut().enumerate() {
                        *slot |= adjacency[k][j];
                    }
                }
            }
        }
        pow = next;
    }
    pow.iter().all(|row| row.iter().all(|&b| b))
}

fn power_iterate(weights: &[Vec<f64>], transpose: bool) -> (f64, Vec<f64>) {
    let n = weights.len();
    let at = |i: usize, j: usize| if transpose { weights[j][i] } else { weights[i][j] };
    let mut v = vec![1.0f64; n];
    let mut lambda = 1.0f64;
    for _ in 0..50_000 {
        let mut next = vec![0.0f64; n];
        for i in 0..n {
            let mut s = 0.0;
            for j in 0..n {
                s += at(i, j) * v[j];
            }
            next[i] = s;
        }
        let norm: f64 = next.iter().sum();
        for x in &mut next {
            *x /= norm;
        }
        let mut max_ratio = f64::NEG_INFINITY;
        let mut min_ratio = f64::INFINITY;
        for i in 0..n {
            if v[i] > 0.0 && next[i] > 0.0 {
                let r = next[i] / v[i];
                max_ratio = max_ratio.max(r);
                min_ratio = min_ratio.min(r);
            }
        }
        lambda = norm;
        v = next;
        if max_ratio - min_ratio <= 1e-15 * max_ratio.abs() {
            break;
        }
    }
    (lambda, v)
}

/// A level-n assignment of weights to `B_n(X)` summing to 1: the
/// finite-level stand-in for a Borel probability measure. Marginal
/// consistency across levels is never assumed; it is a measured diagnostic.
#[derive(Debug, Clone)]
pub struct CylinderDistribution {
    shift: Arc<Subshift>,
    level: usize,
    words: Arc<Vec<Word>>,
    weights: Vec<f64>,
}

impl CylinderDistribution {
    /// Normalizes the given nonnegative weights (aligned with
    /// `shift.words(level)`).
    pub fn new(shift: Arc<Subshift>, level: usize, weights: Vec<f64>) -> Result<Self> {
        let words = shift.words(level);
        if weights.len() != words.len() {
            return Err(Error::Unsupported {
                op: "CylinderDistribution::new",
                requirement: format!("{} weights for level {level}", words.len()),
            });
        }
        if weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
            return Err(Error::Unsupported {
                op: "CylinderDistribution::new",
                requirement: "finite nonnegative weights".into(),
            });
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::Unsupported {
                op: "CylinderDistribution::new",
                requirement: "positive total mass".into(),
            });
        }
        let weights = weights.into_iter().map(|w| w / total).collect();
        Ok(CylinderDistribution {
            shift,
            level,
            words,
            weights,
        })
    }

    pub fn shift(&self) -> &Arc<Subshift> {
        &self.shift
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn words(&self) -> &Arc<Vec<Word>> {
        &self.words
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, word: &Word) -> Option<f64> {
        self.words
            .binary_search(word)
            .ok()
            .map(|i| self.weights[i])
    }

    /// Sum weights down to a coarser level.
    pub fn marginalize(&self, level: usize) -> Result<CylinderDistribution> {
        if level > self.level || level == 0 {
            return Err(Error::InsufficientLevel {
                have: self.level,
                need: level,
            });
        }
        let coarse = self.shift.words(level);
        let mut weights = vec![0.0f64; coarse.len()];
        // lexicographic order makes prefix groups contiguous
        let mut ci = 0usize;
        for (w, &mass) in self.words.iter().zip(&self.weights) {
            let prefix = &w.symbols()[..level];
            while coarse[ci].symbols() != prefix {
                ci += 1;
            }
            weights[ci] += mass;
        }
        CylinderDistribution::new(Arc::clone(&self.shift), level, weights)
    }

    /// The image under one shift step: `(σν)([w]) = Σ_a ν([a·w])`, one level
    /// shorter.
    pub fn shift_forward(&self) -> Result<CylinderDistribution> {
        if self.level < 2 {
            return Err(Error::InsufficientLevel {
                have: self.level,
                need: 2,
            });
        }
        let target = self.shift.words(self.level - 1);
        let mut weights = vec![0.0f64; target.len()];
        for (w, &mass) in self.words.iter().zip(&self.weights) {
            let tail = w.suffix_from(1);
            let i = target
                .binary_search(&tail)
                .expect("suffix of an admissible word is admissible");
            weights[i] += mass;
        }
        CylinderDistribution::new(Arc::clone(&self.shift), self.level - 1, weights)
    }

    /// Push the distribution through a one-block factor map.
    pub fn pushforward(&self, map: &FactorMap) -> Result<CylinderDistribution> {
        let target = map.codomain().words(self.level);
        let mut weights = vec![0.0f64; target.len()];
        for (w, &mass) in self.words.iter().zip(&self.weights) {
            let img = map.apply(w);
            let i = target.binary_search(&img).map_err(|_| Error::ImageLeavesCodomain {
                word: img.clone(),
            })?;
            weights[i] += mass;
        }
        CylinderDistribution::new(Arc::clone(map.codomain()), self.level, weights)
    }

    /// Max absolute weight difference against another distribution at the
    /// same level.
    pub fn max_abs_diff(&self, other: &CylinderDistribution) -> Result<f64> {
        if self.level != other.level {
            return Err(Error::LevelMismatch {
                left: self.level,
                right: other.level,
            });
        }
        Ok(self
            .weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// How far the distribution is from shift invariance:
    /// `max_w |ν(σ^{-1}[w]) − ν([w])|` measured one level down.
    pub fn invariance_defect(&self) -> Result<f64> {
        let shifted = self.shift_forward()?;
        let marginal = self.marginalize(self.level - 1)?;
        marginal.max_abs_diff(&shifted)
    }
}

/// Finite-level Gibbs approximant: weight(w) ∝ exp(sup log f_n over the
/// cylinder of w, minus n·pressure).
pub fn gibbs_approximant(
    shift: &Arc<Subshift>,
    p: &Potential,
    n: usize,
    pressure: f64,
) -> Result<CylinderDistribution> {
    let words = shift.words(n);
    // subtract the max exponent before exponentiating; normalization
    // removes it again
    let mut exponents = Vec::with_capacity(words.len());
    for w in words.iter() {
        exponents.push(p.envelope(w)?.hi - n as f64 * pressure);
    }
    let m = exponents.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = exponents.iter().map(|&e| (e - m).exp()).collect();
    CylinderDistribution::new(Arc::clone(shift), n, weights)
}

/// Average of already-aligned distributions (e.g. the shifted family of one
/// distribution), with the shift-invariance defect of the result.
pub fn cesaro_average(dists: &[CylinderDistribution]) -> Result<CesaroResult> {
    let first = dists.first().ok_or(Error::InsufficientLevel { have: 0, need: 1 })?;
    let level = first.level;
    let mut weights = vec![0.0f64; first.weights.len()];
    for d in dists {
        if d.level != level {
            return Err(Error::LevelMismatch {
                left: level,
                right: d.level,
            });
        }
        for (acc, &w) in weights.iter_mut().zip(&d.weights) {
            *acc += w;
        }
    }
    let count = dists.len() as f64;
    for w in &mut weights {
        *w /= count;
    }
    let average = CylinderDistribution::new(Arc::clone(&first.shift), level, weights)?;
    let invariance_defect = if level >= 2 {
        average.invariance_defect()?
    } else {
        0.0
    };
    Ok(CesaroResult {
        average,
        invariance_defect,
    })
}

/// The shifted family `σ^i ν` for `i < terms`, marginalized to the common
/// level `ν.level() − terms + 1`.
pub fn shifted_family(
    dist: &CylinderDistribution,
    terms: usize,
) -> Result<Vec<CylinderDistribution>> {
    if terms == 0 || dist.level < terms {
        return Err(Error::InsufficientLevel {
            have: dist.level,
            need: terms,
        });
    }
    let common = dist.level - terms + 1;
    let mut family = Vec::with_capacity(terms);
    let mut current = dist.clone();
    for i in 0..terms {
        family.push(current.marginalize(common)?);
        if i + 1 < terms {
            current = current.shift_forward()?;
        }
    }
    Ok(family)
}

#[derive(Debug, Clone)]
pub struct CesaroResult {
    pub average: CylinderDistribution,
    pub invariance_defect: f64,
}

/// Extremes of `ν([w]) / e^{−nP} f_n(w)` over a level, for both envelope
/// ends. A zero weight on an admissible word shows up as a zero minimum:
/// the Gibbs property fails there.
#[derive(Debug, Clone, Copy)]
pub struct RatioEnvelope {
    pub min_hi: f64,
    pub max_hi: f64,
    pub min_lo: f64,
    pub max_lo: f64,
}

impl RatioEnvelope {
    /// Worst two-sided Gibbs constant over both envelope conventions.
    pub fn gibbs_constant(&self) -> f64 {
        let candidates = [
            self.max_hi,
            self.max_lo,
            1.0 / self.min_hi,
            1.0 / self.min_lo,
        ];
        candidates.iter().cloned().fold(1.0, f64::max)
    }

    pub fn spread_hi(&self) -> f64 {
        self.max_hi / self.min_hi
    }
}

/// Compare a level-n distribution against `e^{−nP} f_n` cylinder by
/// cylinder.
pub fn gibbs_ratio_envelope(
    dist: &CylinderDistribution,
    p: &Potential,
    pressure: f64,
) -> Result<RatioEnvelope> {
    let n = dist.level;
    let mut out = RatioEnvelope {
        min_hi: f64::INFINITY,
        max_hi: f64::NEG_INFINITY,
        min_lo: f64::INFINITY,
        max_lo: f64::NEG_INFINITY,
    };
    for (w, &mass) in dist.words.iter().zip(&dist.weights) {
        let env = p.envelope(w)?;
        let ratio_hi = if mass == 0.0 {
            0.0
        } else {
            (mass.ln() - (env.hi - n as f64 * pressure)).exp()
        };
        let ratio_lo = if mass == 0.0 {
            0.0
        } else {
            (mass.ln() - (env.lo - n as f64 * pressure)).exp()
        };
        out.min_hi = out.min_hi.min(ratio_hi);
        out.max_hi = out.max_hi.max(ratio_hi);
        out.min_lo = out.min_lo.min(ratio_lo);
        out.max_lo = out.max_lo.max(ratio_lo);
    }
    Ok(out)
}

/// A cylinder-evaluable measure: an exact Markov chain, the pushforward of
/// one through a factor map (a hidden-Markov measure on the codomain), or a
/// single materialized level.
#[derive(Debug, Clone)]
pub enum Measure {
    Markov(MarkovMeasure),
    Factor { base: MarkovMeasure, map: Arc<FactorMap> },
    Level(CylinderDistribution),
}

impl Measure {
    /// The subshift the measure lives on (the codomain for pushforwards).
    pub fn shift(&self) -> &Arc<Subshift> {
        match self {
            Measure::Markov(m) => m.shift(),
            Measure::Factor { map, .. } => map.codomain(),
            Measure::Level(d) => d.shift(),
        }
    }

    pub fn log_mass(&self, word: &Word) -> Result<f64> {
        match self {
            Measure::Markov(m) => m.log_mass(word),
            Measure::Factor { base, map } => {
                let y = word.symbols();
                Ok(base.masked_log_mass(y.len(), &|i, s| map.apply_symbol(s) == y[i]))
            }
            Measure::Level(d) => {
                if word.len() > d.level() {
                    return Err(Error::InsufficientLevel {
                        have: d.level(),
                        need: word.len(),
                    });
                }
                let mut mass = 0.0;
                for (w, &m) in d.words.iter().zip(&d.weights) {
                    if w.symbols().starts_with(word.symbols()) {
                        mass += m;
                    }
                }
                Ok(mass.ln())
            }
        }
    }

    /// Joint mass `ν([u] ∩ σ^{-t}[v])`.
    pub fn joint_log_mass(&self, u: &Word, t: usize, v: &Word) -> Result<f64> {
        if t < u.len() {
            return Err(Error::Unsupported {
                op: "joint_log_mass",
                requirement: format!("t ≥ |u| (got t={t}, |u|={})", u.len()),
            });
        }
        let len = t + v.len();
        match self {
            Measure::Markov(m) => Ok(m.masked_log_mass(len, &|i, s| {
                pattern_allows(u, t, v, i, s)
            })),
            Measure::Factor { base, map } => Ok(base.masked_log_mass(len, &|i, s| {
                pattern_allows(u, t, v, i, map.apply_symbol(s))
            })),
            Measure::Level(d) => {
                if len > d.level() {
                    return Err(Error::InsufficientLevel {
                        have: d.level(),
                        need: len,
                    });
                }
                let mut mass = 0.0;
                for (w, &m) in d.words.iter().zip(&d.weights) {
                    let s = w.symbols();
                    if (0..len).all(|i| pattern_allows(u, t, v, i, s[i])) {
                        mass += m;
                    }
                }
                Ok(mass.ln())
            }
        }
    }

    pub fn distribution(&self, n: usize) -> Result<CylinderDistribution> {
        match self {
            Measure::Markov(m) => m.distribution(n),
            Measure::Factor { base, map } => {
                let words = map.codomain().words(n);
                let mut weights = Vec::with_capacity(words.len());
                for y in words.iter() {
                    let ln = base
                        .masked_log_mass(n, &|i, s| map.apply_symbol(s) == y.symbols()[i]);
                    weights.push(ln.exp());
                }
                CylinderDistribution::new(Arc::clone(map.codomain()), n, weights)
            }
            Measure::Level(d) => {
                if n > d.level() {
                    return Err(Error::InsufficientLevel {
                        have: d.level(),
                        need: n,
                    });
                }
                d.marginalize(n)
            }
        }
    }
}

fn pattern_allows(u: &Word, t: usize, v: &Word, i: usize, symbol: u8) -> bool {
    if i < u.len() {
        return symbol == u.symbols()[i];
    }
    if i >= t {
        return symbol == v.symbols()[i - t];
    }
    true
}

/// Correlation ratios `ν(u ∩ σ^{-t} v) / (ν(u)·ν(v))` over a range of gaps.
/// A positive minimum certifies a mixing-type lower bound empirically.
#[derive(Debug, Clone)]
pub struct MixingReport {
    pub ratios: Vec<(usize, f64)>,
    pub min_ratio: f64,
}

pub fn mixing_lower_bound_check(
    measure: &Measure,
    u: &Word,
    v: &Word,
    t_range: std::ops::RangeInclusive<usize>,
) -> Result<MixingReport> {
    let mass_u = measure.log_mass(u)?;
    let mass_v = measure.log_mass(v)?;
    let mut ratios = Vec::new();
    let mut min_ratio = f64::INFINITY;
    for t in t_range {
        let joint = measure.joint_log_mass(u, t, v)?;
        let ratio = (joint - mass_u - mass_v).exp();
        min_ratio = min_ratio.min(ratio);
        ratios.push((t, ratio));
    }
    Ok(MixingReport { ratios, min_ratio })
}
