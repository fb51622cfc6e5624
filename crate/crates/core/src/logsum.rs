//! Numerically stable accumulation of sums of exponentials.
//!
//! All potential values in this crate live in log-space; partition sums such
//! as `S_n = Σ_w exp(sup log f_n)` grow or decay exponentially in `n`, so they
//! are only ever combined through these helpers.

/// log(exp(a) + exp(b)) without overflow.
#[inline]
pub fn logaddexp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    if a >= b {
        a + (b - a).exp().ln_1p()
    } else {
        b + (a - b).exp().ln_1p()
    }
}

/// log Σ exp(terms), max-shifted. Deterministic left-to-right accumulation.
pub fn logsumexp(terms: &[f64]) -> f64 {
    let mut m = f64::NEG_INFINITY;
    for &t in terms {
        if t > m {
            m = t;
        }
    }
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let mut acc = 0.0;
    for &t in terms {
        acc += (t - m).exp();
    }
    m + acc.ln()
}

/// Streaming log-sum-exp accumulator for sums too large to materialize.
#[derive(Debug, Clone, Copy)]
pub struct LogSumAcc {
    max: f64,
    // Σ exp(t - max) over terms seen so far.
    scaled: f64,
}

impl LogSumAcc {
    pub fn new() -> Self {
        LogSumAcc {
            max: f64::NEG_INFINITY,
            scaled: 0.0,
        }
    }

    pub fn add(&mut self, term: f64) {
        if term == f64::NEG_INFINITY {
            return;
        }
        if term <= self.max {
            self.scaled += (term - self.max).exp();
        } else {
            self.scaled = self.scaled * (self.max - term).exp() + 1.0;
            self.max = term;
        }
    }

    pub fn total(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.scaled.ln()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.max == f64::NEG_INFINITY
    }
}

impl Default for LogSumAcc {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_naive_sum_in_safe_range() {
        let terms = [0.5, -1.3, 2.0, 0.0];
        let naive: f64 = terms.iter().map(|t: &f64| t.exp()).sum::<f64>().ln();
        assert!((logsumexp(&terms) - naive).abs() < 1e-14);
        let mut acc = LogSumAcc::new();
        for &t in &terms {
            acc.add(t);
        }
        assert!((acc.total() - naive).abs() < 1e-14);
    }

    #[test]
    fn survives_large_magnitudes() {
        let terms = [1234.0, 1232.0];
        let expected = 1232.0 + (2f64.exp() + 1.0).ln();
        assert!((logsumexp(&terms) - expected).abs() < 1e-12);
        assert!((logaddexp(1234.0, 1232.0) - expected).abs() < 1e-12);
        assert!((logaddexp(-1234.0, -1232.0) - (-1232.0 + (1.0 + (-2f64).exp()).ln())).abs() < 1e-12);
    }

    #[test]
    fn empty_sum_is_log_zero() {
        assert_eq!(logsumexp(&[]), f64::NEG_INFINITY);
        assert_eq!(LogSumAcc::new().total(), f64::NEG_INFINITY);
        assert_eq!(logaddexp(f64::NEG_INFINITY, 3.0), 3.0);
    }
}
