//! Arithmetic on nonnegative quantities stored as natural logarithms.

use serde::{Deserialize, Serialize};

/// A nonnegative quantity stored as its natural logarithm.
///
/// `f64::NEG_INFINITY` encodes an exact zero. The value itself is never
/// materialized unless the caller asks for it, so quantities far outside
/// the dynamic range of `f64` — the Lebesgue measure of a unit ball in
/// ℝ²⁰⁰⁰ has log ≈ −4767 — stay exactly representable and composable.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct LogMeasure {
    ln: f64,
}

impl LogMeasure {
    pub const ZERO: LogMeasure = LogMeasure {
        ln: f64::NEG_INFINITY,
    };
    pub const ONE: LogMeasure = LogMeasure { ln: 0.0 };

    /// Wraps a natural logarithm. `NaN` is rejected loudly: it only arises
    /// from bugs upstream and would otherwise poison every comparison.
    pub fn from_ln(ln: f64) -> Self {
        assert!(!ln.is_nan(), "LogMeasure from NaN");
        LogMeasure { ln }
    }

    /// Wraps a plain nonnegative value.
    pub fn from_value(v: f64) -> Self {
        assert!(v >= 0.0, "LogMeasure from negative value {v}");
        LogMeasure { ln: v.ln() }
    }

    pub fn ln(self) -> f64 {
        self.ln
    }

    /// Materializes the value. May overflow to `inf` or underflow to `0`;
    /// use only when the magnitude is known to be moderate.
    pub fn value(self) -> f64 {
        self.ln.exp()
    }

    pub fn is_zero(self) -> bool {
        self.ln == f64::NEG_INFINITY
    }

    pub fn is_finite(self) -> bool {
        self.ln < f64::INFINITY
    }

    /// `self / other` as a plain number: `exp(ln self − ln other)`.
    /// Safe whenever the two magnitudes are comparable, which is the only
    /// situation where a ratio is meaningful.
    pub fn ratio_to(self, other: LogMeasure) -> f64 {
        (self.ln - other.ln).exp()
    }

    /// Multiplies by `exp(dl)`.
    pub fn scaled_ln(self, dl: f64) -> Self {
        LogMeasure::from_ln(self.ln + dl)
    }

    /// `self + other` via a stable log-sum-exp.
    #[allow(clippy::should_implement_trait)] // `impl Add` exists; this form chains
    pub fn add(self, other: LogMeasure) -> Self {
        LogMeasure::from_ln(log_add(self.ln, other.ln))
    }

    /// `self − other`, `None` when the difference would be negative.
    /// Exact zero (`other == self`) is representable.
    #[allow(clippy::should_implement_trait)] // fallible: Sub cannot return Option
    pub fn sub(self, other: LogMeasure) -> Option<Self> {
        if other.ln > self.ln {
            return None;
        }
        Some(LogMeasure::from_ln(log_sub(self.ln, other.ln)))
    }
}

impl std::ops::Add for LogMeasure {
    type Output = LogMeasure;
    fn add(self, rhs: LogMeasure) -> LogMeasure {
        LogMeasure::add(self, rhs)
    }
}

impl std::iter::Sum for LogMeasure {
    fn sum<I: Iterator<Item = LogMeasure>>(iter: I) -> LogMeasure {
        iter.fold(LogMeasure::ZERO, LogMeasure::add)
    }
}

/// `ln(e^a + e^b)` without overflow.
pub fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(e^a − e^b)` for `a ≥ b`; returns `NEG_INFINITY` at equality.
pub fn log_sub(a: f64, b: f64) -> f64 {
    debug_assert!(a >= b, "log_sub would be negative: {a} < {b}");
    if b == f64::NEG_INFINITY {
        return a;
    }
    if a == b {
        return f64::NEG_INFINITY;
    }
    // ln(e^a (1 - e^{b-a})) with the inner term computed by expm1 for
    // accuracy when a and b are close.
    a + (-((b - a).exp_m1())).ln()
}

/// Stable `ln Σ e^{x_i}` over a slice; empty input is an exact zero sum.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let s: f64 = xs.iter().map(|&x| (x - m).exp()).sum();
    m + s.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_matches_linear_arithmetic() {
        let a = LogMeasure::from_value(3.5);
        let b = LogMeasure::from_value(0.25);
        assert!((a.add(b).value() - 3.75).abs() < 1e-14);
    }

    #[test]
    fn zero_is_absorbing_for_add() {
        let a = LogMeasure::from_value(2.0);
        assert_eq!(a.add(LogMeasure::ZERO), a);
        assert_eq!(LogMeasure::ZERO.add(a), a);
        assert!(LogMeasure::ZERO.is_zero());
    }

    #[test]
    fn sub_handles_close_values() {
        let a = LogMeasure::from_ln(1000.0);
        let b = LogMeasure::from_ln(1000.0 + (-1e-9f64).ln_1p());
        // b = a*(1-1e-9): a-b = a*1e-9. Storing the 1e-9 increment on top
        // of ln = 1000 already costs ulp(1000)/1e-9 ~ 1e-4 relative, so the
        // tolerance reflects the input representation, not log_sub itself.
        let d = a.sub(b).unwrap();
        assert!((d.ln() - (1000.0 + (1e-9f64).ln())).abs() < 1e-3);
        assert!(b.sub(a).is_none());
        assert!(a.sub(a).unwrap().is_zero());
    }

    #[test]
    fn extreme_magnitudes_survive_round_trips() {
        let tiny = LogMeasure::from_ln(-4759.8);
        let dil = tiny.scaled_ln(2000.0 * (1.0f64 + 1.0 / 2000.0).ln());
        assert!((dil.ratio_to(tiny) - (1.0 + 1.0 / 2000.0f64).powi(2000)).abs() < 1e-10);
    }

    #[test]
    fn log_sum_exp_spread() {
        // Two terms 600 apart in log: the small one is invisible at f64
        // precision, the sum must equal the max.
        assert_eq!(log_sum_exp(&[-1000.0, -400.0]), -400.0 + 0.0f64.ln_1p());
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        let v = log_sum_exp(&[0.0, 0.0, 0.0]);
        assert!((v - 3.0f64.ln()).abs() < 1e-15);
    }
}
