//! Constructions along a factor map: image potentials `g_n` and their tilted
//! variants, the pressure-equality sandwich, Gibbs verification for image
//! measures, preimage potentials from fiber counts, compensation functions
//! on full shifts, the fiber-ratio criterion for measure equality, the
//! minimal-lift selector, and the one-step ratio iteration `u_{w,n}`.

use std::collections::HashMap;
use std::sync::Arc;

use crate::codes::{ConditionAReport, FactorMap};
use crate::error::{Error, Result};
use crate::gibbs::{
    gibbs_approximant, gibbs_ratio_envelope, rpf_oracle, rpf_oracle_blocked, Measure,
};
use crate::logsum::LogSumAcc;
use crate::potential::Potential;
use crate::pressure::{log_partition_sum, pressure_estimate};
use crate::shift::{PeriodicPoint, Subshift, Word};

/// Level-n image potential values `log g_n(y) = log Σ_{π(w)=y} sup f_n`,
/// with the companion lower-envelope variant, plus an optional per-step tilt
/// recording `g̃_n = g_n e^{n·tilt}`.
#[derive(Debug, Clone)]
pub struct ImagePotentialTable {
    codomain: Arc<Subshift>,
    level: usize,
    words: Arc<Vec<Word>>,
    log_hi: Vec<f64>,
    log_lo: Vec<f64>,
    tilt: f64,
}

impl ImagePotentialTable {
    pub fn codomain(&self) -> &Arc<Subshift> {
        &self.codomain
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn words(&self) -> &Arc<Vec<Word>> {
        &self.words
    }

    pub fn tilt(&self) -> f64 {
        self.tilt
    }

    /// Same table with a per-step log offset (e.g. −P_X(F) for `g̃_n`).
    pub fn with_tilt(&self, tilt: f64) -> ImagePotentialTable {
        ImagePotentialTable {
            tilt,
            ..self.clone()
        }
    }

    pub fn index_of(&self, word: &Word) -> Option<usize> {
        self.words.binary_search(word).ok()
    }

    /// Tilted upper value `log g_n(y) + n·tilt`.
    pub fn log_hi(&self, idx: usize) -> f64 {
        self.log_hi[idx] + self.level as f64 * self.tilt
    }

    pub fn log_lo(&self, idx: usize) -> f64 {
        self.log_lo[idx] + self.level as f64 * self.tilt
    }

    /// `log Σ_y g_n(y)` over the level (upper variant, tilt included).
    pub fn log_total_hi(&self) -> f64 {
        let mut acc = LogSumAcc::new();
        for i in 0..self.log_hi.len() {
            acc.add(self.log_hi(i));
        }
        acc.total()
    }

    pub fn log_total_lo(&self) -> f64 {
        let mut acc = LogSumAcc::new();
        for i in 0..self.log_lo.len() {
            acc.add(self.log_lo(i));
        }
        acc.total()
    }
}

/// Build the level-n image potential of `f` under `map` by sweeping `B_n(X)`
/// and bucketing envelope values by image word.
///
/// For a window-1 potential on a full shift the per-symbol product form
/// `g_n(y) = Π_t (Σ_{π(s)=y_t} e^{f(s)})` is used instead; the enumeration
/// route and the product route agree and are cross-checked in tests.
pub fn image_potential(map: &FactorMap, f: &Potential, n: usize) -> Result<ImagePotentialTable> {
    let codomain = Arc::clone(map.codomain());
    let words = codomain.words(n);

    if map.domain().is_full() && f.is_single() && f.window() == Some(1) {
        let sums = log_image_symbol_sums(map, f)?;
        let mut log_hi = Vec::with_capacity(words.len());
        for y in words.iter() {
            let v: f64 = y.symbols().iter().map(|&a| sums[a as usize]).sum();
            log_hi.push(v);
        }
        let log_lo = log_hi.clone();
        return Ok(ImagePotentialTable {
            codomain,
            level: n,
            words,
            log_hi,
            log_lo,
            tilt: 0.0,
        });
    }

    let index: HashMap<&Word, usize> = words.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut hi_acc: Vec<LogSumAcc> = vec![LogSumAcc::new(); words.len()];
    let mut lo_acc: Vec<LogSumAcc> = vec![LogSumAcc::new(); words.len()];
    let mut err: Option<Error> = None;
    map.domain().visit_words(n, &mut |w| {
        if err.is_some() {
            return;
        }
        let word = Word::new(w.to_vec());
        let img = map.apply(&word);
        let Some(&i) = index.get(&img) else {
            err = Some(Error::ImageLeavesCodomain { word: img });
            return;
        };
        match f.envelope(&word) {
            Ok(env) => {
                hi_acc[i].add(env.hi);
                lo_acc[i].add(env.lo);
            }
            Err(e) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    if let Some(i) = hi_acc.iter().position(|acc| acc.is_empty()) {
        return Err(Error::NotSurjective {
            word: words[i].clone(),
        });
    }
    Ok(ImagePotentialTable {
        codomain,
        level: n,
        words,
        log_hi: hi_acc.iter().map(|a| a.total()).collect(),
        log_lo: lo_acc.iter().map(|a| a.total()).collect(),
        tilt: 0.0,
    })
}

/// `log Σ_{π(s)=a} e^{f(s)}` per codomain symbol, for window-1 `f`.
pub fn log_image_symbol_sums(map: &FactorMap, f: &Potential) -> Result<Vec<f64>> {
    if !f.is_single() || f.window() != Some(1) {
        return Err(Error::Unsupported {
            op: "log_image_symbol_sums",
            requirement: "an additive window-1 potential".into(),
        });
    }
    let mut acc = vec![LogSumAcc::new(); map.codomain().alphabet()];
    for s in 0..map.domain().alphabet() as u8 {
        if map.domain().is_admissible(&[s]) {
            let v = f.single_value(&[s]).expect("window-1 table covers symbols");
            acc[map.apply_symbol(s) as usize].add(v);
        }
    }
    Ok(acc.iter().map(|a| a.total()).collect())
}

/// One row of the pressure-equality sandwich at level n:
/// `N_n / M ≤ G_n ≤ M·N_n`, where `G_n` is the domain partition sum and
/// `N_n` the image-potential total (lower envelope variant; the upper
/// variant coincides with `G_n` by construction).
#[derive(Debug, Clone, Copy)]
pub struct PressureEqualityRow {
    pub n: usize,
    pub p_x_estimate: f64,
    pub p_y_estimate: f64,
    pub log_g_n: f64,
    pub log_n_n_lo: f64,
    pub log_n_n_hi: f64,
    pub sandwich_ok: bool,
}

#[derive(Debug, Clone)]
pub struct PressureEqualityReport {
    pub rows: Vec<PressureEqualityRow>,
    pub log_m: f64,
    pub pass: bool,
    /// Codomain word whose hi/lo gap exceeds log M, if any.
    pub witness: Option<Word>,
}

pub fn verify_pressure_equality(
    map: &FactorMap,
    f: &Potential,
    n_max: usize,
) -> Result<PressureEqualityReport> {
    let log_m = f.log_bounded_variation();
    let mut rows = Vec::with_capacity(n_max);
    let mut pass = true;
    let mut witness = None;
    for n in 1..=n_max {
        let table = image_potential(map, f, n)?;
        let log_g_n = log_partition_sum(map.domain(), f, n)?;
        let log_n_lo = table.log_total_lo();
        let log_n_hi = table.log_total_hi();
        // float slack scales with the magnitude of the sums involved
        let slack = 1e-11 * (1.0 + log_g_n.abs());
        let mut ok = (log_g_n - log_n_hi).abs() <= slack
            && log_n_lo <= log_g_n + slack
            && log_g_n <= log_n_lo + log_m + slack;
        for (i, y) in table.words.iter().enumerate() {
            if table.log_hi(i) - table.log_lo(i) > log_m + slack {
                ok = false;
                if witness.is_none() {
                    witness = Some(y.clone());
                }
            }
        }
        pass &= ok;
        rows.push(PressureEqualityRow {
            n,
            p_x_estimate: log_g_n / n as f64,
            p_y_estimate: log_n_lo / n as f64,
            log_g_n,
            log_n_n_lo: log_n_lo,
            log_n_n_hi: log_n_hi,
            sandwich_ok: ok,
        });
    }
    Ok(PressureEqualityReport {
        rows,
        log_m,
        pass,
        witness,
    })
}

/// Per-level ratio envelope of a pushforward measure against the tilted
/// image potential `g̃_n = g_n e^{−n·pressure}`.
#[derive(Debug, Clone, Copy)]
pub struct ImageGibbsRow {
    pub n: usize,
    pub min_hi: f64,
    pub max_hi: f64,
    pub min_lo: f64,
    pub max_lo: f64,
    /// max/min spread (upper-envelope convention).
    pub spread: f64,
}

#[derive(Debug, Clone)]
pub struct ImageGibbsReport {
    /// Gibbs constant of the input measure against `f` on the domain.
    pub c1: f64,
    pub log_m: f64,
    pub rows: Vec<ImageGibbsRow>,
    /// Certificate: every spread is within C₁²·M².
    pub pass: bool,
}

/// Check that the pushforward of a Gibbs measure for `f` is Gibbs for the
/// tilted image potential, with the spread certified against `C₁²·M²`.
///
/// The measure must satisfy its own Gibbs inequality for `f` first (strictly
/// positive ratios at every level up to `n_max`); `pressure` is `P_X(f)`.
pub fn verify_image_gibbs(
    map: &FactorMap,
    mu: &Measure,
    f: &Potential,
    pressure: f64,
    n_max: usize,
) -> Result<ImageGibbsReport> {
    let log_m = f.log_bounded_variation();
    let mut c1 = 1.0f64;
    for n in 1..=n_max {
        let dist = mu.distribution(n)?;
        let env = gibbs_ratio_envelope(&dist, f, pressure)?;
        if env.min_hi <= 0.0 || env.min_lo <= 0.0 {
            return Err(Error::Unsupported {
                op: "verify_image_gibbs",
                requirement: format!(
                    "a measure satisfying the Gibbs inequality for f (zero mass at level {n})"
                ),
            });
        }
        c1 = c1.max(env.gibbs_constant());
    }

    let bound = c1 * c1 * (2.0 * log_m).exp();
    let mut rows = Vec::with_capacity(n_max);
    let mut pass = true;
    for n in 1..=n_max {
        let table = image_potential(map, f, n)?.with_tilt(-pressure);
        let pushed = mu.distribution(n)?.pushforward(map)?;
        let mut row = ImageGibbsRow {
            n,
            min_hi: f64::INFINITY,
            max_hi: f64::NEG_INFINITY,
            min_lo: f64::INFINITY,
            max_lo: f64::NEG_INFINITY,
            spread: f64::NAN,
        };
        for (i, y) in table.words.iter().enumerate() {
            let mass = pushed.weight(y).expect("same level");
            let r_hi = (mass.ln() - table.log_hi(i)).exp();
            let r_lo = (mass.ln() - table.log_lo(i)).exp();
            row.min_hi = row.min_hi.min(r_hi);
            row.max_hi = row.max_hi.max(r_hi);
            row.min_lo = row.min_lo.min(r_lo);
            row.max_lo = row.max_lo.max(r_lo);
        }
        row.spread = row.max_hi / row.min_hi;
        pass &= row.spread <= bound * (1.0 + 1e-9);
        rows.push(row);
    }
    Ok(ImageGibbsReport {
        c1,
        log_m,
        rows,
        pass,
    })
}

#[derive(Debug, Clone)]
pub struct PreimageGibbsReport {
    pub condition_a: ConditionAReport,
    pub phi1: Arc<Potential>,
    /// Gibbs measure (oracle on one-step structure when available, level
    /// approximants otherwise) for the preimage potential.
    pub mu1: Measure,
    /// The target Gibbs measure for ψ on the codomain.
    pub target: Measure,
    /// (n, max |pushforward(μ₁) − ν_ψ| over level-n cylinders)
    pub pushforward_diffs: Vec<(usize, f64)>,
    pub max_diff: f64,
}

/// Build the preimage potential `Φ₁ = log (ψ_n∘π / count_n∘π)`, its Gibbs
/// measure, and verify that the pushforward reproduces the Gibbs measure of
/// ψ cylinder by cylinder.
pub fn preimage_gibbs(
    map: &Arc<FactorMap>,
    psi: &Arc<Potential>,
    n_max: usize,
) -> Result<PreimageGibbsReport> {
    let condition_a = map.check_condition_a(n_max.max(2))?;
    if !condition_a.holds_up_to_n_max {
        return Err(Error::ConditionA(format!(
            "fiber counts lost near-multiplicativity below {:.3e} by length {}",
            condition_a.best_d, condition_a.n_max
        )));
    }
    let pulled = Potential::pullback(Arc::clone(psi), Arc::clone(map))?;
    let phi1 = Potential::fiber_quotient(pulled, Arc::clone(map), Some(condition_a.best_d))?;

    let x = map.domain();
    let y = map.codomain();

    let target = match rpf_oracle(y, psi) {
        Ok(data) => Measure::Markov(data.gibbs),
        Err(_) => {
            let p_y = pressure_estimate(y, psi, n_max)?;
            Measure::Level(gibbs_approximant(y, psi, n_max, p_y)?)
        }
    };

    // When ψ is window-1 and the fiber counts factor symbol by symbol
    // (count(y) = Π r_{y_i} up to n_max, always true for full-shift
    // collapses), the preimage potential collapses to the explicit window-1
    // function φ₁(s) = ψ(π(s)) − log r_{π(s)} and the exact oracle applies.
    let window1_route = psi.is_single()
        && psi.window() == Some(1)
        && counts_factor_per_symbol(map, n_max)?;
    let mu1 = if window1_route {
        let entries: Vec<(Word, f64)> = (0..x.alphabet() as u8)
            .map(|s| {
                let img = map.apply_symbol(s);
                let r = map
                    .preimage_count(&Word::new(vec![img]))
                    .expect("codomain symbols are admissible");
                let v = psi.single_value(&[img]).expect("window-1 table") - (r as f64).ln();
                (Word::new(vec![s]), v)
            })
            .collect();
        let table = Potential::single(Arc::clone(x), 1, &entries)?;
        match rpf_oracle(x, &table) {
            Ok(data) => Measure::Markov(data.gibbs),
            Err(_) => {
                let p_x = pressure_estimate(x, &phi1, n_max)?;
                Measure::Level(gibbs_approximant(x, &phi1, n_max, p_x)?)
            }
        }
    } else {
        let p_x = pressure_estimate(x, &phi1, n_max)?;
        Measure::Level(gibbs_approximant(x, &phi1, n_max, p_x)?)
    };

    let mut pushforward_diffs = Vec::with_capacity(n_max);
    let mut max_diff = 0.0f64;
    for n in 1..=n_max {
        let pushed = mu1.distribution(n)?.pushforward(map)?;
        let diff = pushed.max_abs_diff(&target.distribution(n)?)?;
        max_diff = max_diff.max(diff);
        pushforward_diffs.push((n, diff));
    }
    Ok(PreimageGibbsReport {
        condition_a,
        phi1,
        mu1,
        target,
        pushforward_diffs,
        max_diff,
    })
}

/// Do the fiber counts factor as `count(y) = Π r_{y_i}` for every word up
/// to `depth`? Exact integer comparison.
fn counts_factor_per_symbol(map: &FactorMap, depth: usize) -> Result<bool> {
    let per_symbol = map.preimage_counts_at_level(1)?;
    for n in 2..=depth {
        let counts = map.preimage_counts_at_level(n)?;
        for (w, &c) in map.codomain().words(n).iter().zip(&counts) {
            let product: u64 = w
                .symbols()
                .iter()
                .map(|&s| {
                    let i = map
                        .codomain()
                        .words(1)
                        .binary_search(&Word::new(vec![s]))
                        .expect("symbol level");
                    per_symbol[i]
                })
                .product();
            if c != product {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Compensation function for a map between full shifts: the window-1
/// potential `g(y) = log |π^{-1}{y_1}|` on the codomain. Its integral
/// against any invariant measure equals the growth rate of log fiber
/// counts, because counts are exactly multiplicative here.
pub fn compensation_function_full_shift(map: &FactorMap) -> Result<Arc<Potential>> {
    if !map.domain().is_full() || !map.codomain().is_full() {
        return Err(Error::Unsupported {
            op: "compensation_function_full_shift",
            requirement: "full shifts on both sides (the closed form needs exact multiplicativity)"
                .into(),
        });
    }
    let mut fiber_size = vec![0u64; map.codomain().alphabet()];
    for s in 0..map.domain().alphabet() as u8 {
        fiber_size[map.apply_symbol(s) as usize] += 1;
    }
    let entries: Vec<(Word, f64)> = fiber_size
        .iter()
        .enumerate()
        .map(|(a, &r)| (Word::new(vec![a as u8]), (r as f64).ln()))
        .collect();
    Potential::single(Arc::clone(map.codomain()), 1, &entries)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    Stable,
    Growing,
}

/// Scan of the fiber ratio `g_n(y) / (count(y)·f_n(x))`: the two-sided bound
/// `1/A ≤ ratio ≤ A` holding uniformly is the criterion for the Gibbs
/// measure of `f` to coincide with the count-quotient preimage measure.
#[derive(Debug, Clone)]
pub struct RatioCriterionReport {
    /// (n, worst two-sided ratio at that level)
    pub a_hat_by_n: Vec<(usize, f64)>,
    pub a_hat: f64,
    pub trend: Trend,
    /// Word attaining the worst ratio at the deepest level.
    pub witness: Option<Word>,
}

impl RatioCriterionReport {
    pub fn growth_factor(&self) -> f64 {
        match (self.a_hat_by_n.first(), self.a_hat_by_n.last()) {
            (Some(&(_, first)), Some(&(_, last))) if first > 0.0 => last / first,
            _ => 1.0,
        }
    }
}

pub fn equality_criterion_ratio(
    map: &FactorMap,
    f: &Potential,
    n_max: usize,
) -> Result<RatioCriterionReport> {
    let mut a_hat_by_n = Vec::with_capacity(n_max);
    let mut a_hat = 1.0f64;
    let mut witness = None;
    for n in 1..=n_max {
        let table = image_potential(map, f, n)?;
        let counts = map.preimage_counts_at_level(n)?;
        let index: HashMap<&Word, usize> = table
            .words
            .iter()
            .enumerate()
            .map(|(i, w)| (w, i))
            .collect();
        let mut level_a = 1.0f64;
        let mut level_witness: Option<Word> = None;
        let mut err: Option<Error> = None;
        map.domain().visit_words(n, &mut |w| {
            if err.is_some() {
                return;
            }
            let word = Word::new(w.to_vec());
            let img = map.apply(&word);
            let i = index[&img];
            let env = match f.envelope(&word) {
                Ok(env) => env,
                Err(e) => {
                    err = Some(e);
                    return;
                }
            };
            let log_count = (counts[i] as f64).ln();
            // extremes over point choices in the cylinder
            let r_min = table.log_hi(i) - log_count - env.hi;
            let r_max = table.log_hi(i) - log_count - env.lo;
            let a = r_max.max(-r_min).exp();
            if a > level_a {
                level_a = a;
                level_witness = Some(word);
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        if level_a > a_hat {
            a_hat = level_a;
            witness = level_witness.clone();
        }
        a_hat_by_n.push((n, level_a));
    }
    let trend = {
        let first = a_hat_by_n.first().map(|&(_, a)| a).unwrap_or(1.0);
        let last = a_hat_by_n.last().map(|&(_, a)| a).unwrap_or(1.0);
        if last > first * 1.05 {
            Trend::Growing
        } else {
            Trend::Stable
        }
    };
    Ok(RatioCriterionReport {
        a_hat_by_n,
        a_hat,
        trend,
        witness,
    })
}

/// Symbol-wise minimal lift of a codomain word (full shifts): each symbol
/// maps to the least preimage symbol. Commutes with truncation and with the
/// shift.
pub fn psi_selector(map: &FactorMap, y_word: &Word) -> Result<Word> {
    if !map.domain().is_full() || !map.codomain().is_full() {
        return Err(Error::Unsupported {
            op: "psi_selector",
            requirement: "full shifts on both sides".into(),
        });
    }
    let mut min_lift = vec![u8::MAX; map.codomain().alphabet()];
    for s in (0..map.domain().alphabet() as u8).rev() {
        min_lift[map.apply_symbol(s) as usize] = s;
    }
    Ok(Word::new(
        y_word
            .symbols()
            .iter()
            .map(|&a| min_lift[a as usize])
            .collect(),
    ))
}

#[derive(Debug, Clone)]
pub struct BowenImageReport {
    /// The window-k potential `g + f∘ψ` on the codomain.
    pub potential: Arc<Potential>,
    pub ratio_report: RatioCriterionReport,
    /// (n, max |pushforward(μ_f) − Gibbs(g + f∘ψ)| over level-n cylinders)
    pub comparison: Vec<(usize, f64)>,
    pub max_diff: f64,
}

/// When the fiber-ratio criterion holds, the image of the Gibbs measure for
/// a window-k `f` is the Gibbs measure of the explicit window-k potential
/// `g(y₁) + f(ψ(y₁…y_k))` on the codomain. Refuses (with the witnessing
/// cylinder) when the ratio scan keeps growing instead.
pub fn bowen_image_potential(
    map: &Arc<FactorMap>,
    f: &Arc<Potential>,
    n_max: usize,
    compare_levels: usize,
) -> Result<BowenImageReport> {
    if !map.domain().is_full() || !map.codomain().is_full() {
        return Err(Error::Unsupported {
            op: "bowen_image_potential",
            requirement: "full shifts on both sides".into(),
        });
    }
    let window = match (f.is_single(), f.window()) {
        (true, Some(k)) => k,
        _ => {
            return Err(Error::Unsupported {
                op: "bowen_image_potential",
                requirement: "an additive single-function potential".into(),
            })
        }
    };
    let ratio_report = equality_criterion_ratio(map, f, n_max)?;
    if ratio_report.trend == Trend::Growing {
        let word = ratio_report.witness.clone().unwrap_or_else(Word::empty);
        let level = word.len();
        return Err(Error::RatioBound {
            word,
            ratio: ratio_report.a_hat,
            level,
        });
    }
    let compensation = compensation_function_full_shift(map)?;
    let y = map.codomain();
    let entries: Vec<(Word, f64)> = y
        .words(window)
        .iter()
        .map(|yw| {
            let lift = psi_selector(map, yw).expect("full shifts");
            let v = compensation
                .single_value(&yw.symbols()[..1])
                .expect("window-1 compensation")
                + f.single_value(lift.symbols()).expect("window-k table");
            (yw.clone(), v)
        })
        .collect();
    let potential = Potential::single(Arc::clone(y), window, &entries)?;

    let mu_f = rpf_oracle_blocked(map.domain(), f)?;
    let image_oracle = rpf_oracle_blocked(y, &potential)?;
    let pushed = Measure::Factor {
        base: mu_f.gibbs,
        map: Arc::clone(map),
    };
    let mut comparison = Vec::with_capacity(compare_levels);
    let mut max_diff = 0.0f64;
    for n in 1..=compare_levels {
        let diff = pushed
            .distribution(n)?
            .max_abs_diff(&image_oracle.gibbs.distribution(n)?)?;
        max_diff = max_diff.max(diff);
        comparison.push((n, diff));
    }
    Ok(BowenImageReport {
        potential,
        ratio_report,
        comparison,
        max_diff,
    })
}

/// Convergence data for the one-step image ratios
/// `u_{w,n}(y) = g_{n+1}(y,w) / g_n(σy, w)`, where `g_n(y,w)` sums
/// `f_n(x·w)` over lifts `x` of `y₁…y_n` with the fixed tail `w` appended.
#[derive(Debug, Clone)]
pub struct KemptonReport {
    /// (n, max_y |u_{w,n}(y) − u_{w,n+1}(y)|), maximized over tails.
    pub sup_diffs: Vec<(usize, f64)>,
    /// (n, max_y max over tail pairs |u_{w,n}(y) − u_{w',n}(y)|)
    pub w_sensitivity: Vec<(usize, f64)>,
    pub min_u: f64,
    pub max_u: f64,
    /// max of u/(M·ḡ₁(y₁)); ≤ 1 when the one-step domination bound holds.
    pub max_u_over_bound: f64,
    pub lower_bound_holds: bool,
    pub upper_bound_holds: bool,
}

/// Evaluate `u_{w,n}` on all codomain prefixes for `n ≤ n_max` and each
/// supplied tail, tracking successive differences, tail sensitivity, and the
/// domination bound `1 < u_{w,n}(y) ≤ M·ḡ₁(y)`.
///
/// The domain must be a full shift. The per-path sums are computed by a
/// transfer recursion over trailing-window contexts, so the cost is linear
/// in the size of the codomain language rather than the domain's.
pub fn kempton_u(
    map: &FactorMap,
    f: &Potential,
    tails: &[PeriodicPoint],
    n_max: usize,
) -> Result<KemptonReport> {
    if !map.domain().is_full() {
        return Err(Error::Unsupported {
            op: "kempton_u",
            requirement: "a full shift domain".into(),
        });
    }
    let window = match (f.is_single(), f.window()) {
        (true, Some(k)) => k,
        _ => {
            return Err(Error::Unsupported {
                op: "kempton_u",
                requirement: "an additive single-function potential".into(),
            })
        }
    };
    if tails.is_empty() || n_max < 2 {
        return Err(Error::Unsupported {
            op: "kempton_u",
            requirement: "at least one tail and n_max ≥ 2".into(),
        });
    }
    for tail in tails {
        if !map.domain().admits_point(tail) {
            return Err(Error::BadPeriodicPoint("tail not admissible in the domain".into()));
        }
    }
    let g1 = image_potential(map, f, 1)?;
    let log_m = f.log_bounded_variation();

    let mut state = KemptonState {
        map,
        f,
        window,
        tails,
        n_max,
        log_m,
        g1,
        sup_diffs: vec![0.0f64; n_max],
        w_sensitivity: vec![0.0f64; n_max + 1],
        min_u: f64::INFINITY,
        max_u: f64::NEG_INFINITY,
        max_u_over_bound: f64::NEG_INFINITY,
    };
    let y_alpha = map.codomain().alphabet() as u8;
    for y1 in 0..y_alpha {
        if !map.codomain().is_admissible(&[y1]) {
            continue;
        }
        let z_full = state.init_z(y1);
        let z_shift = ScaledVec::unit();
        state.recurse(y1, 1, &z_full, &z_shift, None);
    }
    let sup_diffs: Vec<(usize, f64)> = (1..n_max)
        .map(|n| (n, state.sup_diffs[n]))
        .collect();
    let w_sensitivity: Vec<(usize, f64)> = (1..=n_max)
        .map(|n| (n, state.w_sensitivity[n]))
        .collect();
    Ok(KemptonReport {
        sup_diffs,
        w_sensitivity,
        min_u: state.min_u,
        max_u: state.max_u,
        max_u_over_bound: state.max_u_over_bound,
        lower_bound_holds: state.min_u > 1.0,
        upper_bound_holds: state.max_u_over_bound <= 1.0 + 1e-9,
    })
}

/// Positive vector with an explicit log scale, renormalized as it grows.
#[derive(Debug, Clone)]
struct ScaledVec {
    entries: Vec<f64>,
    log_scale: f64,
}

impl ScaledVec {
    fn unit() -> ScaledVec {
        ScaledVec {
            entries: vec![1.0],
            log_scale: 0.0,
        }
    }

    fn renorm(&mut self) {
        let max = self.entries.iter().cloned().fold(0.0f64, f64::max);
        if max > 1e200 || (max > 0.0 && max < 1e-200) {
            for e in &mut self.entries {
                *e /= max;
            }
            self.log_scale += max.ln();
        }
    }
}

struct KemptonState<'a> {
    map: &'a FactorMap,
    f: &'a Potential,
    window: usize,
    tails: &'a [PeriodicPoint],
    n_max: usize,
    log_m: f64,
    g1: ImagePotentialTable,
    sup_diffs: Vec<f64>,
    w_sensitivity: Vec<f64>,
    min_u: f64,
    max_u: f64,
    max_u_over_bound: f64,
}

impl<'a> KemptonState<'a> {
    /// Context length: trailing symbols needed to complete future windows.
    fn ctx_len(&self, word_len: usize) -> usize {
        word_len.min(self.window - 1)
    }

    /// Z for the one-symbol word [y1]: one entry per lift symbol (window ≥ 2)
    /// or the lift count (window 1).
    fn init_z(&self, y1: u8) -> ScaledVec {
        let x_alpha = self.map.domain().alphabet();
        if self.window == 1 {
            // each lift contributes one complete window immediately
            let mut total = 0.0;
            for s in 0..x_alpha as u8 {
                if self.map.apply_symbol(s) == y1 {
                    total += self
                        .f
                        .single_value(&[s])
                        .expect("window-1 table")
                        .exp();
                }
            }
            return ScaledVec {
                entries: vec![total],
                log_scale: 0.0,
            };
        }
        let mut entries = vec![0.0f64; x_alpha];
        for s in 0..x_alpha as u8 {
            if self.map.apply_symbol(s) == y1 {
                entries[s as usize] = 1.0;
            }
        }
        ScaledVec {
            entries,
            log_scale: 0.0,
        }
    }

    /// Extend Z (for a word of length `len`) by one codomain symbol.
    fn step_z(&self, z: &ScaledVec, len: usize, y_sym: u8) -> ScaledVec {
        let x_alpha = self.map.domain().alphabet();
        let old_ctx = self.ctx_len(len);
        let new_ctx = self.ctx_len(len + 1);
        let mut entries = vec![0.0f64; x_alpha.pow(new_ctx as u32)];
        let lift_syms: Vec<u8> = (0..x_alpha as u8)
            .filter(|&s| self.map.apply_symbol(s) == y_sym)
            .collect();
        for (ctx_idx, &weight) in z.entries.iter().enumerate() {
            if weight == 0.0 {
                continue;
            }
            let ctx = unradix(ctx_idx, x_alpha, old_ctx);
            for &s in &lift_syms {
                // completing a window needs len+1 ≥ window symbols
                let factor = if len + 1 >= self.window {
                    let mut win = ctx[old_ctx + 1 - self.window..].to_vec();
                    win.push(s);
                    self.f.single_value(&win).expect("window table").exp()
                } else {
                    1.0
                };
                let mut next_ctx = ctx.clone();
                next_ctx.push(s);
                let start = next_ctx.len() - new_ctx;
                let idx = radix(&next_ctx[start..], x_alpha);
                entries[idx] += weight * factor;
            }
        }
        let mut out = ScaledVec {
            entries,
            log_scale: z.log_scale,
        };
        out.renorm();
        out
    }

    /// log g_len(y, w): close the trailing windows with tail symbols.
    fn finalize(&self, z: &ScaledVec, len: usize, tail: &PeriodicPoint) -> f64 {
        let x_alpha = self.map.domain().alphabet();
        let ctx_len = self.ctx_len(len);
        let crossing = len.min(self.window - 1);
        let mut total = 0.0;
        for (ctx_idx, &weight) in z.entries.iter().enumerate() {
            if weight == 0.0 {
                continue;
            }
            let mut seq = unradix(ctx_idx, x_alpha, ctx_len);
            for j in 0..self.window - 1 {
                seq.push(tail.symbol_at(j));
            }
            let mut sum = 0.0;
            for j in (ctx_len - crossing)..ctx_len {
                sum += self
                    .f
                    .single_value(&seq[j..j + self.window])
                    .expect("window table");
            }
            total += weight * sum.exp();
        }
        total.ln() + z.log_scale
    }

    fn recurse(
        &mut self,
        y1: u8,
        len: usize,
        z_full: &ScaledVec,
        z_shift: &ScaledVec,
        u_prev: Option<&[f64]>,
    ) {
        let mut u_here: Option<Vec<f64>> = None;
        if len >= 2 {
            let n = len - 1;
            let us: Vec<f64> = self
                .tails
                .iter()
                .map(|w| {
                    (self.finalize(z_full, len, w) - self.finalize(z_shift, len - 1, w)).exp()
                })
                .collect();
            let g1_idx = self
                .g1
                .index_of(&Word::new(vec![y1]))
                .expect("level-1 word");
            let bound = (self.log_m + self.g1.log_hi(g1_idx)).exp();
            for &u in &us {
                self.min_u = self.min_u.min(u);
                self.max_u = self.max_u.max(u);
                self.max_u_over_bound = self.max_u_over_bound.max(u / bound);
            }
            let mut sens = 0.0f64;
            for i in 0..us.len() {
                for j in (i + 1)..us.len() {
                    sens = sens.max((us[i] - us[j]).abs());
                }
            }
            self.w_sensitivity[n] = self.w_sensitivity[n].max(sens);
            if let Some(prev) = u_prev {
                let d = prev
                    .iter()
                    .zip(&us)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max);
                self.sup_diffs[n - 1] = self.sup_diffs[n - 1].max(d);
            }
            u_here = Some(us);
        }
        if len > self.n_max {
            return;
        }
        let y_alpha = self.map.codomain().alphabet() as u8;
        for a in 0..y_alpha {
            // full-shift codomain of a full-shift domain; every symbol extends
            let z_full_next = self.step_z(z_full, len, a);
            let z_shift_next = if len == 1 {
                self.init_z(a)
            } else {
                self.step_z(z_shift, len - 1, a)
            };
            self.recurse(
                y1,
                len + 1,
                &z_full_next,
                &z_shift_next,
                u_here.as_deref(),
            );
        }
    }
}

fn radix(word: &[u8], alphabet: usize) -> usize {
    word.iter().fold(0usize, |acc, &s| acc * alphabet + s as usize)
}

fn unradix(mut idx: usize, alphabet: usize, len: usize) -> Vec<u8> {
    let mut out = vec![0u8; len];
    for i in (0..len).rev() {
        out[i] = (idx % alphabet) as u8;
        idx /= alphabet;
    }
    out
}

#[derive(Debug, Clone)]
pub struct MultiplicativityReport {
    pub max_rel_error: f64,
    pub pass: bool,
}

/// For window-1 `f` on full shifts the image potential factorizes exactly:
/// `ḡ_n(y) = ḡ₁(y)·ḡ_{n−1}(σy)`. Checks the identity on the enumerated
/// tables for every word up to `n_max`.
pub fn first_coordinate_multiplicativity_check(
    map: &FactorMap,
    f: &Potential,
    n_max: usize,
) -> Result<MultiplicativityReport> {
    if f.window() != Some(1) || !f.is_single() {
        return Err(Error::Unsupported {
            op: "first_coordinate_multiplicativity_check",
            requirement: "a window-1 potential".into(),
        });
    }
    if !map.domain().is_full() || !map.codomain().is_full() {
        return Err(Error::Unsupported {
            op: "first_coordinate_multiplicativity_check",
            requirement: "full shifts on both sides".into(),
        });
    }
    // enumeration route on purpose: the product fast path would make the
    // check circular
    let mut tables = Vec::with_capacity(n_max + 1);
    tables.push(None);
    for n in 1..=n_max {
        tables.push(Some(image_potential_by_enumeration(map, f, n)?));
    }
    let g1 = tables[1].as_ref().expect("built");
    let mut max_rel_error = 0.0f64;
    for n in 2..=n_max {
        let gn = tables[n].as_ref().expect("built");
        let gprev = tables[n - 1].as_ref().expect("built");
        for (i, y) in gn.words.iter().enumerate() {
            let head = Word::new(vec![y.symbols()[0]]);
            let tail = y.suffix_from(1);
            let lhs = gn.log_hi(i);
            let rhs = g1.log_hi(g1.index_of(&head).expect("level 1"))
                + gprev.log_hi(gprev.index_of(&tail).expect("level n-1"));
            let rel = ((lhs - rhs).exp() - 1.0).abs();
            max_rel_error = max_rel_error.max(rel);
        }
    }
    Ok(MultiplicativityReport {
        max_rel_error,
        pass: max_rel_error <= 1e-12,
    })
}

/// Enumeration-route image potential (no product fast path); used where the
/// fast path would be circular and in cross-checks.
pub fn image_potential_by_enumeration(
    map: &FactorMap,
    f: &Potential,
    n: usize,
) -> Result<ImagePotentialTable> {
    let codomain = Arc::clone(map.codomain());
    let words = codomain.words(n);
    let index: HashMap<&Word, usize> = words.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut hi_acc: Vec<LogSumAcc> = vec![LogSumAcc::new(); words.len()];
    let mut lo_acc: Vec<LogSumAcc> = vec![LogSumAcc::new(); words.len()];
    let mut err: Option<Error> = None;
    map.domain().visit_words(n, &mut |w| {
        if err.is_some() {
            return;
        }
        let word = Word::new(w.to_vec());
        let img = map.apply(&word);
        let Some(&i) = index.get(&img) else {
            err = Some(Error::ImageLeavesCodomain { word: img });
            return;
        };
        match f.envelope(&word) {
            Ok(env) => {
                hi_acc[i].add(env.hi);
                lo_acc[i].add(env.lo);
            }
            Err(e) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(ImagePotentialTable {
        codomain,
        level: n,
        words,
        log_hi: hi_acc.iter().map(|a| a.total()).collect(),
        log_lo: lo_acc.iter().map(|a| a.total()).collect(),
        tilt: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gibbs::{CylinderDistribution, MarkovMeasure};
    use crate::pressure::relative_pressure_estimate;

    fn full(k: usize) -> Arc<Subshift> {
        Subshift::full(k).unwrap()
    }

    fn f1() -> Arc<FactorMap> {
        Arc::new(FactorMap::new(full(3), full(2), vec![0, 0, 1], 6).unwrap())
    }

    fn weights_123() -> Arc<Potential> {
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

    #[test]
    fn image_potential_matches_hand_counts() {
        let map = f1();
        let f = weights_123();
        let g1 = image_potential(&map, &f, 1).unwrap();
        let a = g1.index_of(&Word::new(vec![0])).unwrap();
        let b = g1.index_of(&Word::new(vec![1])).unwrap();
        assert!((g1.log_hi(a) - 3f64.ln()).abs() < 1e-14);
        assert!((g1.log_hi(b) - 3f64.ln()).abs() < 1e-14);

        let g2 = image_potential(&map, &f, 2).unwrap();
        let ab = g2.index_of(&Word::new(vec![0, 1])).unwrap();
        assert!((g2.log_hi(ab) - 9f64.ln()).abs() < 1e-13);

        // with f ≡ 1 the image potential is the fiber count
        let ones = Potential::zero(full(3));
        let g3 = image_potential(&map, &ones, 3).unwrap();
        let counts = map.preimage_counts_at_level(3).unwrap();
        for (i, &c) in counts.iter().enumerate() {
            assert!((g3.log_hi(i) - (c as f64).ln()).abs() < 1e-13);
        }
    }

    #[test]
    fn product_path_agrees_with_enumeration() {
        let map = f1();
        let f = weights_123();
        for n in 1..=6 {
            let fast = image_potential(&map, &f, n).unwrap();
            let slow = image_potential_by_enumeration(&map, &f, n).unwrap();
            for i in 0..fast.words.len() {
                assert!((fast.log_hi(i) - slow.log_hi(i)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tilted_tables() {
        let map = f1();
        let f = weights_123();
        let g1 = image_potential(&map, &f, 1).unwrap().with_tilt(-(6f64.ln()));
        let a = g1.index_of(&Word::new(vec![0])).unwrap();
        // g̃₁(A) = 3/6
        assert!((g1.log_hi(a) - 0.5f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn near_submultiplicativity_of_tilted_tables() {
        // g̃_{n+m}(y) ≤ g̃_n(y)·g̃_m(σⁿy)·e^C with C = 0 for additive f
        let map = f1();
        let f = weights_123();
        let tilt = -(6f64.ln());
        let mut tables = vec![None];
        for n in 1..=8 {
            tables.push(Some(image_potential(&map, &f, n).unwrap().with_tilt(tilt)));
        }
        for total in 2..=8usize {
            let gt = tables[total].as_ref().unwrap();
            for (i, y) in gt.words.iter().enumerate() {
                for split in 1..total {
                    let left = tables[split].as_ref().unwrap();
                    let right = tables[total - split].as_ref().unwrap();
                    let li = left.index_of(&y.prefix(split)).unwrap();
                    let ri = right.index_of(&y.suffix_from(split)).unwrap();
                    assert!(
                        gt.log_hi(i) <= left.log_hi(li) + right.log_hi(ri) + 1e-12,
                        "word {y} split {split}"
                    );
                }
            }
        }
    }

    #[test]
    fn pressure_equality_sandwich() {
        let map = f1();
        let f = weights_123();
        let report = verify_pressure_equality(&map, &f, 8).unwrap();
        assert!(report.pass);
        for row in &report.rows {
            assert!((row.p_x_estimate - 6f64.ln()).abs() < 1e-13);
            assert!((row.p_y_estimate - 6f64.ln()).abs() < 1e-13);
        }

        // f ≡ 1: P_X = log 3 and the image total is Σ_y count(y) = 3ⁿ
        let ones = Potential::zero(full(3));
        let report = verify_pressure_equality(&map, &ones, 8).unwrap();
        assert!(report.pass);
        for row in &report.rows {
            assert!((row.p_x_estimate - 3f64.ln()).abs() < 1e-13);
            assert!((row.p_y_estimate - 3f64.ln()).abs() < 1e-13);
        }
    }

    #[test]
    fn image_gibbs_ratio_is_unity_in_the_multiplicative_case() {
        let map = f1();
        let f = weights_123();
        let oracle = rpf_oracle(map.domain(), &f).unwrap();
        let mu = Measure::Markov(oracle.gibbs);
        let report = verify_image_gibbs(&map, &mu, &f, oracle.pressure, 8).unwrap();
        assert!(report.pass);
        assert!((report.c1 - 1.0).abs() < 1e-9);
        for row in &report.rows {
            assert!((row.min_hi - 1.0).abs() < 1e-9, "n={}", row.n);
            assert!((row.max_hi - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn preimage_gibbs_with_uniform_target() {
        let map = f1();
        let one = Potential::zero(full(2));
        let report = preimage_gibbs(&map, &one, 8).unwrap();
        assert_eq!(report.condition_a.best_d, 1.0);
        // μ₁ = Bernoulli(1/4, 1/4, 1/2)
        let d1 = report.mu1.distribution(1).unwrap();
        assert!((d1.weight(&Word::new(vec![0])).unwrap() - 0.25).abs() < 1e-12);
        assert!((d1.weight(&Word::new(vec![2])).unwrap() - 0.5).abs() < 1e-12);
        assert!(report.max_diff < 1e-12);
    }

    #[test]
    fn preimage_gibbs_weighted_target() {
        let map = f1();
        let psi = Potential::single(
            full(2),
            1,
            &[
                (Word::new(vec![0]), 2f64.ln()),
                (Word::new(vec![1]), 5f64.ln()),
            ],
        )
        .unwrap();
        let report = preimage_gibbs(&map, &psi, 8).unwrap();
        let d1 = report.mu1.distribution(1).unwrap();
        assert!((d1.weight(&Word::new(vec![0])).unwrap() - 1.0 / 7.0).abs() < 1e-12);
        assert!((d1.weight(&Word::new(vec![1])).unwrap() - 1.0 / 7.0).abs() < 1e-12);
        assert!((d1.weight(&Word::new(vec![2])).unwrap() - 5.0 / 7.0).abs() < 1e-12);
        // pushforward equals Bernoulli(2/7, 5/7) at every level
        assert!(report.max_diff < 1e-12);
    }

    #[test]
    fn preimage_gibbs_oracle_route_on_sft_domain() {
        // identity map on the golden mean: counts are identically 1, so the
        // window-1 oracle route applies off the full shift and the
        // pushforward agrees with the target exactly
        let gm = Subshift::sft(&[vec![1, 1], vec![1, 0]]).unwrap();
        let map = Arc::new(FactorMap::new(gm.clone(), gm.clone(), vec![0, 1], 5).unwrap());
        let psi = Potential::single(
            gm,
            1,
            &[
                (Word::new(vec![0]), 2f64.ln()),
                (Word::new(vec![1]), 5f64.ln()),
            ],
        )
        .unwrap();
        let report = preimage_gibbs(&map, &psi, 6).unwrap();
        assert!(matches!(report.mu1, Measure::Markov(_)));
        assert!(report.max_diff < 1e-12);
        let env = report.phi1.envelope(&Word::new(vec![0, 1])).unwrap();
        let expect = psi.envelope(&Word::new(vec![0, 1])).unwrap();
        assert!((env.hi - expect.hi).abs() < 1e-14);
    }

    #[test]
    fn quotient_variation_no_larger_than_source() {
        // M̂(Φ₁) ≤ M̂(Ψ): dividing by the locally constant count cannot
        // widen envelopes
        let map = f1();
        let psi = Potential::single(
            full(2),
            2,
            &[
                (Word::new(vec![0, 0]), 0.0),
                (Word::new(vec![0, 1]), 2f64.ln()),
                (Word::new(vec![1, 0]), 0.0),
                (Word::new(vec![1, 1]), 3f64.ln()),
            ],
        )
        .unwrap();
        let pulled = Potential::pullback(psi.clone(), map.clone()).unwrap();
        let phi1 = Potential::fiber_quotient(pulled, map, Some(1.0)).unwrap();
        for n in 1..=8 {
            let a = phi1.estimate_bounded_variation(n).unwrap();
            let b = psi.estimate_bounded_variation(n).unwrap();
            assert!(a <= b + 1e-12, "n={n}: {a} > {b}");
        }
    }

    #[test]
    fn uniform_measure_is_image_gibbs_for_counts() {
        // f ≡ 1: the image potential is the fiber count and the pushforward
        // of the uniform Bernoulli measure has ratio ≡ 1 against count·3^{-n}
        let map = f1();
        let ones = Potential::zero(full(3));
        let oracle = rpf_oracle(map.domain(), &ones).unwrap();
        assert!((oracle.pressure - 3f64.ln()).abs() < 1e-13);
        let mu = Measure::Markov(oracle.gibbs);
        let report = verify_image_gibbs(&map, &mu, &ones, oracle.pressure, 8).unwrap();
        assert!(report.pass);
        for row in &report.rows {
            assert!((row.min_hi - 1.0).abs() < 1e-10 && (row.max_hi - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn compensation_function_values() {
        let map = f1();
        let g = compensation_function_full_shift(&map).unwrap();
        assert!((g.single_value(&[0]).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(g.single_value(&[1]).unwrap(), 0.0);

        // identity map: g ≡ 0
        let idm = Arc::new(FactorMap::new(full(2), full(2), vec![0, 1], 4).unwrap());
        let g = compensation_function_full_shift(&idm).unwrap();
        assert_eq!(g.single_value(&[0]).unwrap(), 0.0);

        // 4 -> 2 collapse with fibers (3, 1)
        let m42 = Arc::new(FactorMap::new(full(4), full(2), vec![0, 0, 0, 1], 4).unwrap());
        let g = compensation_function_full_shift(&m42).unwrap();
        assert!((g.single_value(&[0]).unwrap() - 3f64.ln()).abs() < 1e-15);
        assert_eq!(g.single_value(&[1]).unwrap(), 0.0);

        assert!(compensation_function_full_shift(&FactorMap::new(
            Subshift::sft(&[vec![1, 1], vec![1, 0]]).unwrap(),
            full(1),
            vec![0, 0],
            4
        )
        .unwrap())
        .is_err());
    }

    #[test]
    fn compensation_integral_matches_count_growth() {
        // lim (1/n) ∫ log count_n dm = ∫ g dm on Bernoulli and Markov test
        // measures (exact at every n here, counts being multiplicative)
        let map = f1();
        let g = compensation_function_full_shift(&map).unwrap();
        let measures = [
            MarkovMeasure::bernoulli(full(2), &[0.3, 0.7]).unwrap(),
            MarkovMeasure::new(
                full(2),
                1,
                vec![0.5, 0.5],
                vec![vec![0.25, 0.75], vec![0.75, 0.25]],
            )
            .unwrap(),
        ];
        for m in &measures {
            let integral_g = m.energy(&g).unwrap();
            for n in [3usize, 6] {
                let counts = map.preimage_counts_at_level(n).unwrap();
                let dist = m.distribution(n).unwrap();
                let mut avg = 0.0;
                for (i, w) in dist.words().iter().enumerate() {
                    avg += dist.weights()[i] * (counts[words_index(&dist, w)] as f64).ln();
                }
                avg /= n as f64;
                assert!((avg - integral_g).abs() < 1e-12);
            }
        }

        fn words_index(dist: &CylinderDistribution, w: &Word) -> usize {
            dist.words().binary_search(w).unwrap()
        }
    }

    #[test]
    fn ratio_criterion_separates_fiber_constant_from_generic() {
        let map = f1();
        // fiber-constant: F = Ψ∘π with window-2 Ψ
        let psi = Potential::single(
            full(2),
            2,
            &[
                (Word::new(vec![0, 0]), 0.0),
                (Word::new(vec![0, 1]), 2f64.ln()),
                (Word::new(vec![1, 0]), 0.0),
                (Word::new(vec![1, 1]), 3f64.ln()),
            ],
        )
        .unwrap();
        let pulled = Potential::pullback(psi.clone(), map.clone()).unwrap();
        let report = equality_criterion_ratio(&map, &pulled, 8).unwrap();
        assert_eq!(report.trend, Trend::Stable);
        let m_hat = pulled.log_bounded_variation().exp();
        assert!((report.a_hat - m_hat).abs() < 1e-10);

        // generic weights: the worst fiber ratio grows like 1.5ⁿ
        let f = weights_123();
        let report = equality_criterion_ratio(&map, &f, 8).unwrap();
        assert_eq!(report.trend, Trend::Growing);
        let (_, a4) = report.a_hat_by_n[3];
        let (_, a8) = report.a_hat_by_n[7];
        assert!((a4 - 1.5f64.powi(4)).abs() < 1e-9);
        assert!(a8 / a4 >= 1.2);

        // f ≡ 1: ratio ≡ 1
        let ones = Potential::zero(full(3));
        let report = equality_criterion_ratio(&map, &ones, 6).unwrap();
        assert!((report.a_hat - 1.0).abs() < 1e-12);
    }

    #[test]
    fn psi_selector_and_equivariance() {
        let map = f1();
        let lifted = psi_selector(&map, &Word::parse("001").unwrap()).unwrap();
        assert_eq!(lifted.to_string(), "002");
        let bn = psi_selector(&map, &Word::new(vec![1, 1, 1])).unwrap();
        assert_eq!(bn.to_string(), "222");
        // shift equivariance at the word level
        let y = Word::parse("01").unwrap();
        let full_lift = psi_selector(&map, &y).unwrap();
        let tail_lift = psi_selector(&map, &y.suffix_from(1)).unwrap();
        assert_eq!(full_lift.suffix_from(1), tail_lift);
    }

    #[test]
    fn bowen_image_for_fiber_constant_potentials() {
        let map = f1();
        // f = h∘π with window-1 h on Y
        let h = Potential::single(
            full(2),
            1,
            &[
                (Word::new(vec![0]), 0.4),
                (Word::new(vec![1]), -0.2),
            ],
        )
        .unwrap();
        let entries: Vec<(Word, f64)> = (0..3u8)
            .map(|s| {
                let img = map.apply_symbol(s);
                (Word::new(vec![s]), h.single_value(&[img]).unwrap())
            })
            .collect();
        let f = Potential::single(full(3), 1, &entries).unwrap();
        let report = bowen_image_potential(&map, &f, 8, 6).unwrap();
        // image potential = g + h
        let val_a = report.potential.single_value(&[0]).unwrap();
        assert!((val_a - (2f64.ln() + 0.4)).abs() < 1e-12);
        assert!(report.max_diff < 1e-11);

        // f ≡ 0: image measure is Bernoulli ∝ fiber sizes
        let zero = Potential::zero(full(3));
        let report = bowen_image_potential(&map, &zero, 8, 5).unwrap();
        assert!(report.max_diff < 1e-11);
        let val_a = report.potential.single_value(&[0]).unwrap();
        assert!((val_a - 2f64.ln()).abs() < 1e-14);

        // generic weights refuse
        let f = weights_123();
        assert!(matches!(
            bowen_image_potential(&map, &f, 8, 4),
            Err(Error::RatioBound { .. })
        ));
    }

    #[test]
    fn kempton_u_is_constant_for_window1() {
        let map = f1();
        let f = weights_123();
        let tails = [
            PeriodicPoint::periodic(vec![0]),
            PeriodicPoint::periodic(vec![2]),
        ];
        let report = kempton_u(&map, &f, &tails, 6).unwrap();
        // u ≡ ḡ₁(y) = 3 for all n, y, w
        assert!((report.min_u - 3.0).abs() < 1e-12);
        assert!((report.max_u - 3.0).abs() < 1e-12);
        for &(_, d) in &report.sup_diffs {
            assert!(d < 1e-12);
        }
        for &(_, s) in &report.w_sensitivity {
            assert!(s < 1e-12);
        }
        assert!(report.lower_bound_holds && report.upper_bound_holds);
    }

    #[test]
    fn kempton_u_counts_fibers_for_zero_potential() {
        let map = f1();
        let zero = Potential::zero(full(3));
        let tails = [PeriodicPoint::periodic(vec![0])];
        let report = kempton_u(&map, &zero, &tails, 5).unwrap();
        // u(y) = r_{y₁} ∈ {1, 2}
        assert!((report.max_u - 2.0).abs() < 1e-12);
        assert!((report.min_u - 1.0).abs() < 1e-12);
        assert!(report.upper_bound_holds);
        // equality r=1 on the singleton fiber: strict lower bound fails
        assert!(!report.lower_bound_holds);
    }

    #[test]
    fn relative_pressure_matches_image_potential_termwise() {
        // on full shifts the fiber sum and the image potential coincide
        let map = f1();
        let f = weights_123();
        for n in 1..=7 {
            let table = image_potential(&map, &f, n).unwrap();
            for y_word in map.codomain().words(n).iter() {
                let y = map.codomain().canonical_point(y_word.symbols()).unwrap();
                let rel = relative_pressure_estimate(&map, &f, &y, n).unwrap();
                let gi = table.index_of(y_word).unwrap();
                assert!(
                    (rel - table.log_hi(gi) / n as f64).abs() < 1e-12,
                    "n={n} y={y_word}"
                );
            }
        }
    }

    #[test]
    fn multiplicativity_check_window1() {
        let map = f1();
        let f = weights_123();
        let report = first_coordinate_multiplicativity_check(&map, &f, 8).unwrap();
        assert!(report.pass, "max rel error {}", report.max_rel_error);

        let zero = Potential::zero(full(3));
        let report = first_coordinate_multiplicativity_check(&map, &zero, 8).unwrap();
        assert!(report.pass);

        // window-2 is a precondition error
        let w2 = Potential::single(
            full(3),
            2,
            &full(3)
                .words(2)
                .iter()
                .map(|w| (w.clone(), 0.1))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        assert!(first_coordinate_multiplicativity_check(&map, &w2, 4).is_err());
    }
}
