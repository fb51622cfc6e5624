//! Potential sequences `{log f_n}` evaluated on cylinders.
//!
//! A potential is evaluated through `[inf, sup]` envelopes of `log f_n` over
//! a cylinder, plus exact point values at eventually periodic points. Values
//! are stored and combined in log-space throughout: `f_n` grows or decays
//! exponentially in `n`.
//!
//! Four constructions are supported:
//!
//! - a single window-k function, summed along the orbit (additive);
//! - the pullback `f_n ∘ π` of a potential through a one-block factor map;
//! - the fiber quotient `(f_n ∘ π) / (count_n ∘ π)` dividing by preimage
//!   cylinder counts, which is almost additive whenever those counts are
//!   nearly multiplicative;
//! - a per-step tilt `log f_n ± n·δ`.

use std::sync::Arc;

use crate::codes::FactorMap;
use crate::error::{Error, Result};
use crate::shift::{PeriodicPoint, ReadState, Subshift, Word};

/// Structural class of a potential sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    Additive,
    AlmostAdditive,
    Subadditive,
    AsymptoticallySubadditive,
}

/// `[inf, sup]` of `log f_n` over a cylinder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogEnvelope {
    pub lo: f64,
    pub hi: f64,
}

impl LogEnvelope {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    fn shifted(self, delta: f64) -> LogEnvelope {
        LogEnvelope {
            lo: self.lo + delta,
            hi: self.hi + delta,
        }
    }
}

#[derive(Debug)]
enum Kind {
    /// Additive potential from one window-k function, given as a log-value
    /// table on `B_k`.
    Single { window: usize, table: Vec<f64> },
    /// `f_n ∘ π` for a potential on the codomain of `map`.
    Pullback { inner: Arc<Potential>, map: Arc<FactorMap> },
    /// `(f_n ∘ π) / (count_n ∘ π)`; `pulled` must be a pullback through the
    /// same map.
    FiberQuotient {
        pulled: Arc<Potential>,
        map: Arc<FactorMap>,
    },
    /// `log f_n + n·per_step_log`.
    Tilt { inner: Arc<Potential>, per_step_log: f64 },
}

#[derive(Debug)]
pub struct Potential {
    shift: Arc<Subshift>,
    kind: Kind,
    flavor: Flavor,
    /// Almost-additivity constant C: |log f_{n+m} − log f_n − log f_m∘σⁿ| ≤ C.
    almost_additivity: f64,
    /// log M where M bounds the variation of f_n over any n-cylinder.
    log_bounded_variation: f64,
}

impl Potential {
    /// Additive potential from a window-k table of log-values.
    ///
    /// The table must cover `B_k` with finite values. The variation constant
    /// M is computed exactly from the trailing-window spreads (an upper
    /// bound, and tight, for full shifts and SFTs).
    pub fn single(
        shift: Arc<Subshift>,
        window: usize,
        entries: &[(Word, f64)],
    ) -> Result<Arc<Potential>> {
        assert!(window >= 1, "window must be at least 1");
        let k = shift.alphabet();
        let size = k.checked_pow(window as u32).expect("tiny window");
        let mut table = vec![f64::NAN; size];
        for (w, v) in entries {
            if !v.is_finite() {
                return Err(Error::NonFiniteTableEntry {
                    word: w.clone(),
                    value: *v,
                });
            }
            if w.len() != window || w.symbols().iter().any(|&s| (s as usize) >= k) {
                return Err(Error::Unsupported {
                    op: "Potential::single",
                    requirement: format!("table keys of window length {window}; got `{w}`"),
                });
            }
            table[radix_index(w.symbols(), k)] = *v;
        }
        for w in shift.words(window).iter() {
            if !table[radix_index(w.symbols(), k)].is_finite() {
                return Err(Error::MissingTableEntry { word: w.clone() });
            }
        }
        let mut p = Potential {
            shift,
            kind: Kind::Single { window, table },
            flavor: Flavor::Additive,
            almost_additivity: 0.0,
            log_bounded_variation: 0.0,
        };
        p.log_bounded_variation = p.exact_single_log_m();
        Ok(Arc::new(p))
    }

    /// The zero potential `f_n ≡ 1`.
    pub fn zero(shift: Arc<Subshift>) -> Arc<Potential> {
        let entries: Vec<(Word, f64)> = shift
            .words(1)
            .iter()
            .map(|w| (w.clone(), 0.0))
            .collect();
        Potential::single(shift, 1, &entries).expect("zero table covers B_1")
    }

    /// Pullback `f_n ∘ π` onto the domain of `map`. The almost-additivity
    /// and variation constants carry over unchanged.
    pub fn pullback(inner: Arc<Potential>, map: Arc<FactorMap>) -> Result<Arc<Potential>> {
        if inner.shift.alphabet() != map.codomain().alphabet() {
            return Err(Error::Unsupported {
                op: "pullback",
                requirement: "potential defined on the codomain of the map".into(),
            });
        }
        Ok(Arc::new(Potential {
            shift: Arc::clone(map.domain()),
            flavor: inner.flavor,
            almost_additivity: inner.almost_additivity,
            log_bounded_variation: inner.log_bounded_variation,
            kind: Kind::Pullback { inner, map },
        }))
    }

    /// Fiber quotient: divide a pulled-back potential by the pulled-back
    /// preimage-cylinder count.
    ///
    /// `d` is a lower bound for the near-multiplicativity constant of the
    /// counts (in (0,1], e.g. `ConditionAReport::best_d`). With a positive
    /// `d` the quotient is almost additive with constant `C + log(1/d)`;
    /// pass `None` for counts with no certified bound, degrading the flavor
    /// to subadditive.
    pub fn fiber_quotient(
        pulled: Arc<Potential>,
        map: Arc<FactorMap>,
        d: Option<f64>,
    ) -> Result<Arc<Potential>> {
        let inner_flavor = match &pulled.kind {
            Kind::Pullback { .. } => pulled.flavor,
            _ => {
                return Err(Error::Unsupported {
                    op: "fiber_quotient",
                    requirement: "a potential pulled back through the same factor map".into(),
                })
            }
        };
        let (flavor, c) = match d {
            Some(d) if d > 0.0 && inner_flavor != Flavor::Subadditive => (
                Flavor::AlmostAdditive,
                pulled.almost_additivity + (1.0 / d).ln(),
            ),
            _ => (Flavor::Subadditive, f64::INFINITY),
        };
        Ok(Arc::new(Potential {
            shift: Arc::clone(map.domain()),
            flavor,
            almost_additivity: c,
            log_bounded_variation: pulled.log_bounded_variation,
            kind: Kind::FiberQuotient { pulled, map },
        }))
    }

    /// Shift `log f_n` by `n · per_step_log`. Constants are unchanged: the
    /// tilt cancels in the additivity defect and in cylinder variation.
    pub fn tilt(self: &Arc<Potential>, per_step_log: f64) -> Arc<Potential> {
        Arc::new(Potential {
            shift: Arc::clone(&self.shift),
            flavor: self.flavor,
            almost_additivity: self.almost_additivity,
            log_bounded_variation: self.log_bounded_variation,
            kind: Kind::Tilt {
                inner: Arc::clone(self),
                per_step_log,
            },
        })
    }

    pub fn shift(&self) -> &Arc<Subshift> {
        &self.shift
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    /// Almost-additivity constant C (0 for additive potentials, ∞ when only
    /// subadditivity is known).
    pub fn almost_additivity(&self) -> f64 {
        self.almost_additivity
    }

    /// log M, the bounded-variation constant in log-space.
    pub fn log_bounded_variation(&self) -> f64 {
        self.log_bounded_variation
    }

    /// Window size when this is additive with local structure: a single
    /// window-k function, possibly pulled back, tilted, or divided by
    /// counts.
    pub fn window(&self) -> Option<usize> {
        match &self.kind {
            Kind::Single { window, .. } => Some(*window),
            Kind::Pullback { inner, .. } => inner.window(),
            Kind::FiberQuotient { pulled, .. } => pulled.window(),
            Kind::Tilt { inner, .. } => inner.window(),
        }
    }

    pub fn is_single(&self) -> bool {
        matches!(self.kind, Kind::Single { .. })
    }

    /// Raw window table lookup for a window-k word (additive single
    /// potentials only).
    pub fn single_value(&self, window_word: &[u8]) -> Option<f64> {
        match &self.kind {
            Kind::Single { window, table } => {
                if window_word.len() == *window {
                    Some(table[radix_index(window_word, self.shift.alphabet())])
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// `[inf, sup]` of `log f_n` over the cylinder `[word]`, `n = word.len()`.
    ///
    /// Single potentials enumerate the admissible (window−1)-symbol
    /// continuations exactly. Pullbacks evaluate on the image cylinder;
    /// quotients subtract the exact log-count; tilts shift by `n·δ`.
    pub fn envelope(&self, word: &Word) -> Result<LogEnvelope> {
        match &self.kind {
            Kind::Single { window, table } => self.single_envelope(word, *window, table),
            Kind::Pullback { inner, map } => inner.envelope(&map.apply(word)),
            Kind::FiberQuotient { pulled, map } => {
                let env = pulled.envelope(word)?;
                let count = map.preimage_count(&map.apply(word))? as f64;
                Ok(env.shifted(-count.ln()))
            }
            Kind::Tilt { inner, per_step_log } => Ok(inner
                .envelope(word)?
                .shifted(*per_step_log * word.len() as f64)),
        }
    }

    fn single_envelope(&self, word: &Word, window: usize, table: &[f64]) -> Result<LogEnvelope> {
        let w = word.symbols();
        let n = w.len();
        let k = self.shift.alphabet();
        let state = self
            .shift
            .read(w)
            .ok_or_else(|| Error::InadmissibleWord { word: word.clone() })?;
        let mut base = 0.0;
        for i in 0..n.saturating_sub(window - 1) {
            base += table[radix_index(&w[i..i + window], k)];
        }
        if window == 1 {
            return Ok(LogEnvelope { lo: base, hi: base });
        }
        // Terms that read past the word: minimize/maximize over admissible
        // continuations of length window−1.
        let first_open = n.saturating_sub(window - 1);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut ext: Vec<u8> = Vec::with_capacity(window - 1);
        self.extend_envelope(
            state,
            w,
            first_open,
            window,
            table,
            &mut ext,
            &mut lo,
            &mut hi,
        );
        assert!(lo.is_finite(), "admissible word must extend");
        Ok(LogEnvelope {
            lo: base + lo,
            hi: base + hi,
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn extend_envelope(
        &self,
        state: ReadState,
        w: &[u8],
        first_open: usize,
        window: usize,
        table: &[f64],
        ext: &mut Vec<u8>,
        lo: &mut f64,
        hi: &mut f64,
    ) {
        if ext.len() == window - 1 {
            let k = self.shift.alphabet();
            let n = w.len();
            let mut sum = 0.0;
            let mut buf = vec![0u8; window];
            for i in first_open..n {
                for (j, slot) in buf.iter_mut().enumerate() {
                    let pos = i + j;
                    *slot = if pos < n { w[pos] } else { ext[pos - n] };
                }
                sum += table[radix_index(&buf, k)];
            }
            if sum < *lo {
                *lo = sum;
            }
            if sum > *hi {
                *hi = sum;
            }
            return;
        }
        for s in 0..self.shift.alphabet() as u8 {
            if let Some(next) = self.shift.step(state, s) {
                ext.push(s);
                self.extend_envelope(next, w, first_open, window, table, ext, lo, hi);
                ext.pop();
            }
        }
    }

    /// Exact `log f_n(x)` at an eventually periodic point.
    pub fn point_log(&self, point: &PeriodicPoint, n: usize) -> Result<f64> {
        match &self.kind {
            Kind::Single { window, table } => {
                let k = self.shift.alphabet();
                let mut sum = 0.0;
                let mut buf = vec![0u8; *window];
                for i in 0..n {
                    for (j, slot) in buf.iter_mut().enumerate() {
                        *slot = point.symbol_at(i + j);
                    }
                    sum += table[radix_index(&buf, k)];
                }
                Ok(sum)
            }
            Kind::Pullback { inner, map } => {
                inner.point_log(&point.map_symbols(map.symbol_map()), n)
            }
            Kind::FiberQuotient { pulled, map } => {
                let v = pulled.point_log(point, n)?;
                let y_word = point.prefix(n).map_symbols(map.symbol_map());
                let count = map.preimage_count(&y_word)? as f64;
                Ok(v - count.ln())
            }
            Kind::Tilt { inner, per_step_log } => {
                Ok(inner.point_log(point, n)? + per_step_log * n as f64)
            }
        }
    }

    /// Scan the almost-additivity defect
    /// `|log f_{n+m}(x) − log f_n(x) − log f_m(σⁿ x)|` over all words of
    /// total length ≤ `n_max` at canonical cylinder points. A lower bound
    /// for the true constant C.
    pub fn estimate_almost_additivity(&self, n_max: usize) -> Result<f64> {
        assert!(n_max >= 2, "need a split");
        let mut worst = 0.0f64;
        for total in 2..=n_max {
            for w in self.shift.words(total).iter() {
                let x = self.shift.canonical_point(w.symbols())?;
                let whole = self.point_log(&x, total)?;
                for split in 1..total {
                    let left = self.point_log(&x, split)?;
                    let right = self.point_log(&x.shifted(split), total - split)?;
                    let defect = (whole - left - right).abs();
                    if defect > worst {
                        worst = defect;
                    }
                }
            }
        }
        Ok(worst)
    }

    /// Scan envelope widths up to `n_max`: `M̂ = exp(max width)`, a lower
    /// bound for the true variation constant M, nondecreasing in `n_max`.
    pub fn estimate_bounded_variation(&self, n_max: usize) -> Result<f64> {
        let mut widest = 0.0f64;
        for n in 1..=n_max {
            for w in self.shift.words(n).iter() {
                let width = self.envelope(w)?.width();
                if width > widest {
                    widest = width;
                }
            }
        }
        Ok(widest.exp())
    }

    /// Exact log M for a single window-k potential.
    ///
    /// For n ≥ window−1 the envelope width depends only on the trailing
    /// window−1 symbols and their continuations, so scanning standalone
    /// words of length ≤ window−1 dominates every level (tightly for full
    /// shifts and SFTs, as an upper bound for sofic shifts).
    fn exact_single_log_m(&self) -> f64 {
        let window = match &self.kind {
            Kind::Single { window, .. } => *window,
            _ => unreachable!("only called on single potentials"),
        };
        if window == 1 {
            return 0.0;
        }
        let mut widest = 0.0f64;
        for n in 1..=(window - 1) {
            for w in self.shift.words(n).iter() {
                let width = self.envelope(w).expect("enumerated word").width();
                if width > widest {
                    widest = width;
                }
            }
        }
        widest
    }
}

fn radix_index(word: &[u8], alphabet: usize) -> usize {
    let mut idx = 0usize;
    for &s in word {
        idx = idx * alphabet + s as usize;
    }
    idx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::FactorMap;

    const LN2: f64 = std::f64::consts::LN_2;

    fn full(k: usize) -> Arc<Subshift> {
        Subshift::full(k).unwrap()
    }

    /// Weighted full-3 potential: f(a)=log 1, f(b)=log 2, f(c)=log 3.
    fn weights_123() -> Arc<Potential> {
        let shift = full(3);
        let entries = vec![
            (Word::new(vec![0]), 0.0),
            (Word::new(vec![1]), 2f64.ln()),
            (Word::new(vec![2]), 3f64.ln()),
        ];
        Potential::single(shift, 1, &entries).unwrap()
    }

    fn window2_on_full2() -> Arc<Potential> {
        let shift = full(2);
        let entries = vec![
            (Word::new(vec![0, 0]), 0.0),
            (Word::new(vec![0, 1]), 2f64.ln()),
            (Word::new(vec![1, 0]), 0.0),
            (Word::new(vec![1, 1]), 3f64.ln()),
        ];
        Potential::single(shift, 2, &entries).unwrap()
    }

    #[test]
    fn window1_envelopes_are_exact_products() {
        let p = weights_123();
        let env = p.envelope(&Word::new(vec![1, 2])).unwrap();
        assert_eq!(env.lo, env.hi);
        assert!((env.hi - 6f64.ln()).abs() < 1e-15);
        let env = p.envelope(&Word::new(vec![0, 1, 2])).unwrap();
        assert!((env.hi - 6f64.ln()).abs() < 1e-15);

        let zero = Potential::zero(full(2));
        let env = zero.envelope(&Word::new(vec![0, 1, 1])).unwrap();
        assert_eq!((env.lo, env.hi), (0.0, 0.0));
    }

    #[test]
    fn window2_envelopes_enumerate_continuations() {
        let p = window2_on_full2();
        let env = p.envelope(&Word::new(vec![0, 1])).unwrap();
        assert!((env.lo - LN2).abs() < 1e-15);
        assert!((env.hi - (LN2 + 3f64.ln())).abs() < 1e-15);

        let env = p.envelope(&Word::new(vec![0])).unwrap();
        assert!((env.lo - 0.0).abs() < 1e-15);
        assert!((env.hi - LN2).abs() < 1e-15);
    }

    #[test]
    fn exact_variation_constant() {
        assert_eq!(weights_123().log_bounded_variation(), 0.0);
        let p = window2_on_full2();
        assert!((p.log_bounded_variation() - 3f64.ln()).abs() < 1e-15);
        assert!((p.estimate_bounded_variation(4).unwrap() - 3.0).abs() < 1e-12);
        assert!((Potential::zero(full(2)).estimate_bounded_variation(3).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn additive_defect_is_zero() {
        assert!(weights_123().estimate_almost_additivity(6).unwrap() <= 1e-12);
        assert!(window2_on_full2().estimate_almost_additivity(6).unwrap() <= 1e-12);
    }

    #[test]
    fn pullback_is_fiber_constant() {
        let map = Arc::new(FactorMap::new(full(3), full(2), vec![0, 0, 1], 4).unwrap());
        let psi = Potential::single(
            full(2),
            1,
            &[(Word::new(vec![0]), 2f64.ln()), (Word::new(vec![1]), 5f64.ln())],
        )
        .unwrap();
        let pulled = Potential::pullback(psi, map).unwrap();
        let a = pulled.envelope(&Word::new(vec![0])).unwrap();
        let b = pulled.envelope(&Word::new(vec![1])).unwrap();
        let c = pulled.envelope(&Word::new(vec![2])).unwrap();
        assert_eq!(a.hi, b.hi);
        assert!((a.hi - 2f64.ln()).abs() < 1e-15);
        assert!((c.hi - 5f64.ln()).abs() < 1e-15);

        let one = Potential::zero(full(2));
        let map = Arc::new(FactorMap::new(full(3), full(2), vec![0, 0, 1], 4).unwrap());
        let pulled_one = Potential::pullback(one, map).unwrap();
        let env = pulled_one.envelope(&Word::new(vec![2, 1, 0])).unwrap();
        assert_eq!((env.lo, env.hi), (0.0, 0.0));
    }

    #[test]
    fn composition_envelope_no_wider_than_source() {
        let map = Arc::new(FactorMap::new(full(3), full(2), vec![0, 0, 1], 4).unwrap());
        let psi = window2_on_full2();
        let pulled = Potential::pullback(psi.clone(), map.clone()).unwrap();
        for n in 1..=8 {
            for w in map.domain().words(n).iter() {
                let comp = pulled.envelope(w).unwrap();
                let src = psi.envelope(&map.apply(w)).unwrap();
                assert!(comp.width() <= src.width() + 1e-15);
            }
        }
    }

    #[test]
    fn fiber_quotient_values() {
        let map = Arc::new(FactorMap::new(full(3), full(2), vec![0, 0, 1], 4).unwrap());
        let one = Potential::zero(full(2));
        let pulled = Potential::pullback(one, map.clone()).unwrap();
        let phi1 = Potential::fiber_quotient(pulled, map, Some(1.0)).unwrap();
        assert_eq!(phi1.flavor(), Flavor::AlmostAdditive);
        assert!((phi1.almost_additivity() - 0.0).abs() < 1e-15);

        let on_a = phi1.envelope(&Word::new(vec![0])).unwrap();
        assert!((on_a.hi + LN2).abs() < 1e-15);
        let on_c = phi1.envelope(&Word::new(vec![2])).unwrap();
        assert!(on_c.hi.abs() < 1e-15);
        let on_ac = phi1.envelope(&Word::new(vec![0, 2])).unwrap();
        assert!((on_ac.hi + LN2).abs() < 1e-15);

        // quotient defect stays within C_Ψ + log(1/D) = 0 here
        assert!(phi1.estimate_almost_additivity(7).unwrap() <= 1e-12);
    }

    #[test]
    fn fiber_quotient_defect_bounded_by_count_ratio() {
        // constant collapse of the golden mean: the quotient defect is the
        // count concatenation defect, bounded by log(1/D) from the scan
        let gm = Subshift::sft(&[vec![1, 1], vec![1, 0]]).unwrap();
        let y = full(1);
        let map = Arc::new(FactorMap::new(gm, y.clone(), vec![0, 0], 5).unwrap());
        let report = map.check_condition_a(8).unwrap();
        let one = Potential::zero(y);
        let pulled = Potential::pullback(one, map.clone()).unwrap();
        let phi1 = Potential::fiber_quotient(pulled, map, Some(report.best_d)).unwrap();
        let c_hat = phi1.estimate_almost_additivity(8).unwrap();
        assert!(c_hat > 0.0);
        assert!(
            c_hat <= (1.0 / report.best_d).ln() + 1e-12,
            "defect {c_hat} exceeds log(1/D) = {}",
            (1.0 / report.best_d).ln()
        );
        assert!((phi1.almost_additivity() - (1.0 / report.best_d).ln()).abs() < 1e-12);
    }

    #[test]
    fn fiber_quotient_requires_pullback() {
        let map = Arc::new(FactorMap::new(full(3), full(2), vec![0, 0, 1], 4).unwrap());
        let not_pulled = weights_123();
        assert!(matches!(
            Potential::fiber_quotient(not_pulled, map, Some(1.0)),
            Err(Error::Unsupported { .. })
        ));
    }

    #[test]
    fn tilt_shifts_by_level_and_preserves_constants() {
        let p = weights_123();
        let tilted = p.tilt(-(6f64.ln()));
        let env = tilted.envelope(&Word::new(vec![2])).unwrap();
        assert!((env.hi - (3f64.ln() - 6f64.ln())).abs() < 1e-15);
        assert_eq!(tilted.log_bounded_variation(), p.log_bounded_variation());
        assert!(tilted.estimate_almost_additivity(5).unwrap() <= 1e-12);

        let zero_tilt = p.tilt(0.0);
        let w = Word::new(vec![1, 0, 2]);
        assert_eq!(zero_tilt.envelope(&w).unwrap(), p.envelope(&w).unwrap());

        let twice = p.tilt(0.25).tilt(0.5);
        let env = twice.envelope(&w).unwrap();
        let base = p.envelope(&w).unwrap();
        assert!((env.hi - (base.hi + 0.75 * 3.0)).abs() < 1e-12);
    }

    #[test]
    fn window2_defect_scan_on_points() {
        // window-2 on the golden mean has exact point values along canonical
        // tails; the additive defect must vanish there too.
        let gm = Subshift::sft(&[vec![1, 1], vec![1, 0]]).unwrap();
        let entries = vec![
            (Word::new(vec![0, 0]), 0.3),
            (Word::new(vec![0, 1]), -0.2),
            (Word::new(vec![1, 0]), 1.1),
        ];
        let p = Potential::single(gm, 2, &entries).unwrap();
        assert!(p.estimate_almost_additivity(7).unwrap() <= 1e-12);
    }

    #[test]
    fn missing_table_entry_is_an_error() {
        let shift = full(2);
        let entries = vec![(Word::new(vec![0]), 0.0)];
        assert!(matches!(
            Potential::single(shift, 1, &entries),
            Err(Error::MissingTableEntry { .. })
        ));
    }

    #[test]
    fn point_values_match_envelopes_at_window1() {
        let p = weights_123();
        let x = PeriodicPoint::new(vec![1, 2], vec![0]);
        let v = p.point_log(&x, 2).unwrap();
        assert!((v - 6f64.ln()).abs() < 1e-15);
        let env = p.envelope(&x.prefix(2)).unwrap();
        assert_eq!(v, env.hi);
    }
}
