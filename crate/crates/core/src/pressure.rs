//! Topological pressure at finite level: partition-sum estimates, rigorous
//! two-sided brackets, relative (fiberwise) pressure along eventually
//! periodic points, and variational lower bounds from order-k Markov
//! measures.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::codes::FactorMap;
use crate::error::{Error, Result};
use crate::gibbs::MarkovMeasure;
use crate::logsum::LogSumAcc;
use crate::potential::{Flavor, Potential};
use crate::shift::{PeriodicPoint, ReadState, ShiftKind, Subshift, Word};

/// `log S_n` where `S_n = Σ_{w ∈ B_n} exp(sup log f_n over [w])`.
pub fn log_partition_sum(shift: &Subshift, p: &Potential, n: usize) -> Result<f64> {
    let mut acc = LogSumAcc::new();
    let mut err: Option<Error> = None;
    shift.visit_words(n, &mut |w| {
        if err.is_some() {
            return;
        }
        match p.envelope(&Word::new(w.to_vec())) {
            Ok(env) => acc.add(env.hi),
            Err(e) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(acc.total())
}

/// Finite-n pressure estimate `(1/n) log S_n`.
pub fn pressure_estimate(shift: &Subshift, p: &Potential, n: usize) -> Result<f64> {
    assert!(n >= 1);
    Ok(log_partition_sum(shift, p, n)? / n as f64)
}

/// Where a bracketing constant came from; brackets are only as rigorous as
/// their constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Computed exactly from the potential's structure.
    Exact,
    /// Carried through a construction as a proven bound.
    Structural,
    /// Supplied by the caller.
    UserCertified,
    /// Lower bound from a finite scan; may understate the true constant.
    ScanEstimated,
}

#[derive(Debug, Clone)]
pub struct BracketOptions {
    /// Override for the almost-additivity constant C.
    pub c_override: Option<f64>,
    /// Override for log M (bounded variation).
    pub log_m_override: Option<f64>,
    /// Search bound for the specification gap.
    pub max_gap: usize,
    /// Word length bound in the gap search.
    pub gap_pair_len: usize,
}

impl Default for BracketOptions {
    fn default() -> Self {
        BracketOptions {
            c_override: None,
            log_m_override: None,
            max_gap: 4,
            gap_pair_len: 3,
        }
    }
}

/// Interval `[lo, hi]` containing the limiting pressure, valid whenever the
/// constants fed into the corrections are true bounds.
///
/// `hi = (log S_n + C)/n` comes from subadditivity of `log(e^C S_n)`;
/// `lo = (log S_n + log C'')/n` from superadditivity of `log(C'' S_n)`,
/// where `C''` combines the specification gap k, the minimum bridge value
/// `m = min f_k`, M and C:
/// gap 0: `C'' = e^{-C}/M²`; gap k ≥ 1: `C'' = e^{-3C}·m/(M²·S_k)`.
#[derive(Debug, Clone)]
pub struct PressureBracket {
    pub n: usize,
    pub s_n_log: f64,
    pub hi: f64,
    /// Absent when the shift has no specification gap within the search
    /// bound or no almost-additivity constant is available.
    pub lo: Option<f64>,
    pub degraded: Option<String>,
    pub c: f64,
    pub c_source: Provenance,
    pub log_m: f64,
    pub m_source: Provenance,
    pub gap: Option<usize>,
}

impl PressureBracket {
    pub fn width(&self) -> Option<f64> {
        self.lo.map(|lo| self.hi - lo)
    }

    pub fn contains(&self, value: f64) -> bool {
        value <= self.hi && self.lo.is_none_or(|lo| lo <= value)
    }
}

pub fn pressure_bracket(
    shift: &Subshift,
    p: &Potential,
    n: usize,
    options: &BracketOptions,
) -> Result<PressureBracket> {
    assert!(n >= 1);
    let s_n_log = log_partition_sum(shift, p, n)?;

    let (c, c_source) = match options.c_override {
        Some(c) => (c, Provenance::UserCertified),
        None => match p.flavor() {
            Flavor::Additive => (0.0, Provenance::Exact),
            Flavor::AlmostAdditive => (p.almost_additivity(), Provenance::Structural),
            _ => (f64::INFINITY, Provenance::Structural),
        },
    };
    let (log_m, m_source) = match options.log_m_override {
        Some(m) => (m, Provenance::UserCertified),
        None => (
            p.log_bounded_variation(),
            if p.is_single() {
                Provenance::Exact
            } else {
                Provenance::Structural
            },
        ),
    };

    // For the upper side, a plain subadditive potential works with C = 0.
    let c_hi = if c.is_finite() {
        c
    } else if matches!(p.flavor(), Flavor::Subadditive) {
        0.0
    } else {
        return Err(Error::Unsupported {
            op: "pressure_bracket",
            requirement: "a subadditive or almost additive potential, or a C override".into(),
        });
    };
    let hi = (s_n_log + c_hi) / n as f64;

    let mut degraded = None;
    let mut gap = None;
    let lo = if !c.is_finite() {
        degraded = Some("no almost-additivity constant for the lower correction".into());
        None
    } else {
        match shift.specification_gap(options.max_gap, options.gap_pair_len) {
            None => {
                degraded = Some(format!(
                    "no specification gap ≤ {} found; lower bound unavailable",
                    options.max_gap
                ));
                None
            }
            Some(k) => {
                gap = Some(k);
                let log_c2 = if k == 0 {
                    -c - 2.0 * log_m
                } else {
                    // m = min f_k over X, from exact lower envelopes
                    let mut log_min_bridge = f64::INFINITY;
                    for w in shift.words(k).iter() {
                        log_min_bridge = log_min_bridge.min(p.envelope(w)?.lo);
                    }
                    let log_s_gap = log_partition_sum(shift, p, k)?;
                    -3.0 * c + log_min_bridge - 2.0 * log_m - log_s_gap
                };
                Some((s_n_log + log_c2) / n as f64)
            }
        }
    };

    Ok(PressureBracket {
        n,
        s_n_log,
        hi,
        lo,
        degraded,
        c,
        c_source,
        log_m,
        m_source,
        gap,
    })
}

/// Aliveness of fiber states: from an X-state with the y-tail at a given
/// phase of its cycle, does an infinite admissible lift exist?
struct FiberAlive {
    cycle_len: usize,
    /// [phase][unit state]
    alive: Vec<Vec<bool>>,
    unit_states: usize,
}

impl FiberAlive {
    fn build(map: &FactorMap, y: &PeriodicPoint) -> FiberAlive {
        let x = map.domain();
        let unit_states = match x.kind() {
            ShiftKind::Full => 1,
            ShiftKind::Sft { .. } => x.alphabet(),
            ShiftKind::Sofic { graph } => graph.num_states,
        };
        let cycle = y.cycle();
        let cl = cycle.len();
        let mut alive = vec![vec![true; unit_states]; cl];
        // greatest fixed point: prune states with no admissible lifted step
        loop {
            let mut changed = false;
            for ph in 0..cl {
                let next_ph = (ph + 1) % cl;
                for s in 0..unit_states {
                    if !alive[ph][s] {
                        continue;
                    }
                    let mut ok = false;
                    for t in 0..x.alphabet() as u8 {
                        if map.apply_symbol(t) != cycle[ph] {
                            continue;
                        }
                        for s2 in unit_successors(x, s, t) {
                            if alive[next_ph][s2] {
                                ok = true;
                                break;
                            }
                        }
                        if ok {
                            break;
                        }
                    }
                    if !ok {
                        alive[ph][s] = false;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        FiberAlive {
            cycle_len: cl,
            alive,
            unit_states,
        }
    }

    /// Does some point of `[w]` lift the whole tail of `y` beyond position
    /// `n = |w|`?
    fn cylinder_meets_fiber(
        &self,
        map: &FactorMap,
        y: &PeriodicPoint,
        state: ReadState,
        n: usize,
    ) -> bool {
        let x = map.domain();
        let mut mask: Vec<bool> = match state {
            ReadState::Full => vec![true],
            ReadState::SftAt(s) => {
                let mut m = vec![false; self.unit_states];
                m[s as usize] = true;
                m
            }
            ReadState::SftStart => vec![true; self.unit_states],
            ReadState::Sofic(bits) => (0..self.unit_states)
                .map(|i| bits & (1u64 << i) != 0)
                .collect(),
        };
        // walk any remaining head positions explicitly
        let head_len = y.head().len();
        let mut pos = n;
        while pos < head_len {
            let target = y.symbol_at(pos);
            let mut next_mask = vec![false; self.unit_states];
            for (s, &on) in mask.iter().enumerate() {
                if !on {
                    continue;
                }
                for t in 0..x.alphabet() as u8 {
                    if map.apply_symbol(t) != target {
                        continue;
                    }
                    for s2 in unit_successors(x, s, t) {
                        next_mask[s2] = true;
                    }
                }
            }
            if !next_mask.iter().any(|&b| b) {
                return false;
            }
            mask = next_mask;
            pos += 1;
        }
        let phase = (pos - head_len) % self.cycle_len;
        mask.iter()
            .enumerate()
            .any(|(s, &on)| on && self.alive[phase][s])
    }
}

/// Successor unit states of `s` reading symbol `t`.
fn unit_successors(x: &Subshift, s: usize, t: u8) -> Vec<usize> {
    match x.kind() {
        ShiftKind::Full => vec![0],
        ShiftKind::Sft { transition } => {
            if transition[s][t as usize] {
                vec![t as usize]
            } else {
                Vec::new()
            }
        }
        ShiftKind::Sofic { graph } => graph
            .edges
            .iter()
            .filter(|&&(from, sym, _)| from == s && sym == t)
            .map(|&(_, _, to)| to)
            .collect(),
    }
}

/// For SFT states the mask starts from the last symbol read; full shifts
/// carry a single dummy state.
///
/// Finite-n term of the relative pressure over `y`:
/// `(1/n) log Σ exp(sup log f_n over [w])`, summed over the cylinders `[w]`
/// that meet the fiber `π^{-1}(y)`. The sup-envelope convention makes this
/// coincide termwise with `(1/n) log g_n` on full shifts.
pub fn relative_pressure_estimate(
    map: &FactorMap,
    p: &Potential,
    y: &PeriodicPoint,
    n: usize,
) -> Result<f64> {
    assert!(n >= 1);
    if !map.codomain().admits_point(y) {
        return Err(Error::BadPeriodicPoint(format!(
            "head {:?} cycle {:?} is not admissible in the codomain",
            y.head(),
            y.cycle()
        )));
    }
    let alive = FiberAlive::build(map, y);
    let y_prefix = y.prefix(n);
    let x = map.domain();
    let mut acc = LogSumAcc::new();
    let mut err: Option<Error> = None;
    let mut visit = |w: &[u8]| {
        if err.is_some() {
            return;
        }
        let word = Word::new(w.to_vec());
        let state = x.read(w).expect("preimage enumeration yields admissible words");
        if !alive.cylinder_meets_fiber(map, y, state, n) {
            return;
        }
        match p.envelope(&word) {
            Ok(env) => acc.add(env.hi),
            Err(e) => err = Some(e),
        }
    };
    visit_preimage_words(map, y_prefix.symbols(), &mut visit);
    if let Some(e) = err {
        return Err(e);
    }
    if acc.is_empty() {
        return Err(Error::NotSurjective { word: y_prefix });
    }
    Ok(acc.total() / n as f64)
}

fn visit_preimage_words(map: &FactorMap, y: &[u8], visit: &mut dyn FnMut(&[u8])) {
    let x = map.domain();
    let mut prefix = Vec::with_capacity(y.len());
    fn rec(
        map: &FactorMap,
        x: &Subshift,
        state: ReadState,
        y: &[u8],
        prefix: &mut Vec<u8>,
        visit: &mut dyn FnMut(&[u8]),
    ) {
        if prefix.len() == y.len() {
            visit(prefix);
            return;
        }
        let depth = prefix.len();
        for t in 0..x.alphabet() as u8 {
            if map.apply_symbol(t) != y[depth] {
                continue;
            }
            if let Some(next) = x.step(state, t) {
                prefix.push(t);
                rec(map, x, next, y, prefix, visit);
                prefix.pop();
            }
        }
    }
    rec(map, x, x.initial_state(), y, &mut prefix, visit);
}

/// The finite-n terms form a limsup, not a limit, so the running maximum is
/// reported alongside each term.
#[derive(Debug, Clone, Copy)]
pub struct RelativePressureTerm {
    pub n: usize,
    pub term: f64,
    pub running_max: f64,
}

pub fn relative_pressure_series(
    map: &FactorMap,
    p: &Potential,
    y: &PeriodicPoint,
    n_max: usize,
) -> Result<Vec<RelativePressureTerm>> {
    let mut out = Vec::with_capacity(n_max);
    let mut running = f64::NEG_INFINITY;
    for n in 1..=n_max {
        let term = relative_pressure_estimate(map, p, y, n)?;
        running = running.max(term);
        out.push(RelativePressureTerm {
            n,
            term,
            running_max: running,
        });
    }
    Ok(out)
}

/// Result of the order-k Markov variational search: a lower bound for the
/// pressure together with the optimizing chain.
#[derive(Debug, Clone)]
pub struct MarkovBound {
    pub value: f64,
    pub entropy: f64,
    pub energy: f64,
    pub measure: MarkovMeasure,
    pub iterations: usize,
}

/// Maximize `h_μ + ∫ f dμ` over order-k stationary Markov measures by
/// soft policy iteration (entropy-regularized average-reward ascent) with
/// seeded random restarts. The energy integral is exact when the potential
/// window fits inside k+1 symbols, which is required.
///
/// Order 0 needs a full shift (an i.i.d. measure is not supported on a
/// proper SFT); SFTs need order ≥ 1; sofic shifts are not supported, since
/// a finite-order chain on symbols can assign mass outside the language.
pub fn markov_lower_bound(
    shift: &Arc<Subshift>,
    p: &Potential,
    order: usize,
    steps: usize,
    restarts: usize,
    seed: u64,
) -> Result<MarkovBound> {
    if !p.is_single() {
        return Err(Error::Unsupported {
            op: "markov_lower_bound",
            requirement: "an additive single-function potential".into(),
        });
    }
    let window = p.window().expect("single potential has a window");
    if window > order + 1 {
        return Err(Error::Unsupported {
            op: "markov_lower_bound",
            requirement: format!("order ≥ window−1 = {} for an exact energy", window - 1),
        });
    }
    match shift.kind() {
        ShiftKind::Full => {}
        ShiftKind::Sft { .. } if order >= 1 => {}
        ShiftKind::Sft { .. } => {
            return Err(Error::Unsupported {
                op: "markov_lower_bound",
                requirement: "order ≥ 1 on an SFT".into(),
            })
        }
        ShiftKind::Sofic { .. } => {
            return Err(Error::Unsupported {
                op: "markov_lower_bound",
                requirement: "a full shift or SFT (finite-order chains can leave a sofic language)"
                    .into(),
            })
        }
    }

    let block = order.max(1);
    let states = shift.words(block);
    let ns = states.len();
    // edge data: allowed transitions and their energies
    let mut allowed = vec![vec![false; ns]; ns];
    let mut energy = vec![vec![0.0f64; ns]; ns];
    for (u, uw) in states.iter().enumerate() {
        for (v, vw) in states.iter().enumerate() {
            if uw.symbols()[1..] != vw.symbols()[..block - 1] {
                continue;
            }
            let mut edge = uw.symbols().to_vec();
            edge.push(vw.symbols()[block - 1]);
            if !shift.is_admissible(&edge) {
                continue;
            }
            allowed[u][v] = true;
            energy[u][v] = p.single_value(&edge[..window]).expect("edge covers window");
        }
    }
    let tie_rows = order == 0; // Bernoulli ansatz: one shared row

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<MarkovBound> = None;
    for _ in 0..restarts.max(1) {
        let mut q = random_rows(&allowed, tie_rows, &mut rng);
        let mut value = f64::NEG_INFINITY;
        let mut iterations = 0usize;
        for step in 0..steps.max(1) {
            iterations = step + 1;
            let pi = stationary_of(&q);
            let mut g = vec![0.0f64; ns];
            for u in 0..ns {
                for v in 0..ns {
                    let qv = q[u][v];
                    if qv > 0.0 {
                        g[u] += qv * (energy[u][v] - qv.ln());
                    }
                }
            }
            let j: f64 = (0..ns).map(|u| pi[u] * g[u]).sum();
            let bias = solve_poisson(&q, &g, j);
            // soft improvement: rows ∝ exp(E + bias)
            let mut next = vec![vec![0.0f64; ns]; ns];
            if tie_rows {
                // one shared row over symbols
                let mut row = vec![0.0f64; ns];
                let mut sum = 0.0;
                for (v, r) in row.iter_mut().enumerate() {
                    if allowed[0][v] {
                        *r = (energy[0][v] + bias[v]).exp();
                        sum += *r;
                    }
                }
                for r in &mut row {
                    *r /= sum;
                }
                for u in 0..ns {
                    next[u] = row.clone();
                }
            } else {
                for u in 0..ns {
                    let mut sum = 0.0;
                    for v in 0..ns {
                        if allowed[u][v] {
                            next[u][v] = (energy[u][v] + bias[v]).exp();
                            sum += next[u][v];
                        }
                    }
                    for x in &mut next[u] {
                        *x /= sum;
                    }
                }
            }
            q = next;
            let converged = (j - value).abs() <= 1e-15 * j.abs().max(1.0);
            value = j;
            if converged {
                break;
            }
        }
        let pi = stationary_of(&q);
        let measure = MarkovMeasure::new(
            Arc::clone(shift),
            block,
            pi,
            q,
        )?;
        let h = measure.entropy();
        let e = measure.energy(p)?;
        let value = h + e;
        let better = match &best {
            None => true,
            Some(b) => value > b.value + 1e-15,
        };
        if better {
            best = Some(MarkovBound {
                value,
                entropy: h,
                energy: e,
                measure,
                iterations,
            });
        }
    }
    Ok(best.expect("at least one restart"))
}

fn random_rows(
    allowed: &[Vec<bool>],
    tie_rows: bool,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<f64>> {
    let ns = allowed.len();
    let mut rows = vec![vec![0.0f64; ns]; ns];
    if tie_rows {
        let mut row = vec![0.0f64; ns];
        let mut sum = 0.0;
        for (v, r) in row.iter_mut().enumerate() {
            if allowed[0][v] {
                *r = rng.gen_range(0.1..1.0);
                sum += *r;
            }
        }
        for r in &mut row {
            *r /= sum;
        }
        for u in 0..ns {
            rows[u] = row.clone();
        }
    } else {
        for u in 0..ns {
            let mut sum = 0.0;
            for v in 0..ns {
                if allowed[u][v] {
                    rows[u][v] = rng.gen_range(0.1..1.0);
                    sum += rows[u][v];
                }
            }
            for x in &mut rows[u] {
                *x /= sum;
            }
        }
    }
    rows
}

/// Stationary distribution of a stochastic matrix by power iteration.
fn stationary_of(q: &[Vec<f64>]) -> Vec<f64> {
    let ns = q.len();
    let mut pi = vec![1.0 / ns as f64; ns];
    for _ in 0..20_000 {
        let mut next = vec![0.0f64; ns];
        for u in 0..ns {
            if pi[u] == 0.0 {
                continue;
            }
            for v in 0..ns {
                next[v] += pi[u] * q[u][v];
            }
        }
        let total: f64 = next.iter().sum();
        for x in &mut next {
            *x /= total;
        }
        let delta = pi
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        pi = next;
        if delta < 1e-16 {
            break;
        }
    }
    pi
}

/// Solve the Poisson equation `h = g − J·1 + Q h` with `h[0] = 0`.
fn solve_poisson(q: &[Vec<f64>], g: &[f64], j: f64) -> Vec<f64> {
    let ns = q.len();
    // (I − Q) h = g − J·1, pinned at h[0] = 0
    let mut a = vec![vec![0.0f64; ns]; ns];
    let mut rhs = vec![0.0f64; ns];
    for u in 0..ns {
        for v in 0..ns {
            a[u][v] = if u == v { 1.0 } else { 0.0 } - q[u][v];
        }
        rhs[u] = g[u] - j;
    }
    for v in 0..ns {
        a[0][v] = if v == 0 { 1.0 } else { 0.0 };
    }
    rhs[0] = 0.0;
    gauss_solve(a, rhs)
}

fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("nonempty");
        a.swap(col, pivot);
        b.swap(col, pivot);
        let diag = a[col][col];
        assert!(diag.abs() > 1e-300, "singular Poisson system");
        for row in (col + 1)..n {
            let factor = a[row][col] / diag;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0f64; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in (row + 1)..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    x
}
