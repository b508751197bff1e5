//! Radial density profiles `w : (0, ∞) → [0, ∞]`.
//!
//! A [`RadialDensity`] is the profile of a rotation-invariant measure
//! `dμ = w(|x|) dx`. Evaluation is primarily through the log profile, and
//! densities with algebraic singularities additionally expose a stable
//! "edge" evaluation parametrized by the log of the distance to the
//! singular point — the only form that stays meaningful when that distance
//! drops below the floating-point resolution of the point itself.

use std::sync::Arc;

type LogProfile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type EdgeProfile = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// Radial density profile with the metadata the estimators need.
#[derive(Clone)]
pub struct RadialDensity {
    name: String,
    log_w: LogProfile,
    /// `(sing, side, ln_d) ↦ ln w(sing + side·e^{ln_d})`, stable for
    /// arbitrarily small distances `e^{ln_d}`.
    edge: EdgeProfile,
    /// Interior or boundary points where `w` blows up or has a fractional
    /// power; radial integrals must treat these by substitution.
    singularities: Vec<f64>,
    /// Nonincreasing on `(0, ∞)`.
    pub is_decreasing: bool,
    /// `Some(γ)` iff `w(ct) = c^γ w(t)` for all `c, t > 0`.
    pub homogeneity: Option<f64>,
    /// Ball measures centered at the origin converge iff the dimension
    /// exceeds this number (`w(t) ~ t^e` near zero ⇒ floor `= −e`).
    pub integrability_floor: f64,
    /// Jumps at every power of two (the alternating dyadic profile).
    dyadic_jumps: bool,
}

impl std::fmt::Debug for RadialDensity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RadialDensity")
            .field("name", &self.name)
            .field("is_decreasing", &self.is_decreasing)
            .field("homogeneity", &self.homogeneity)
            .field("integrability_floor", &self.integrability_floor)
            .field("singularities", &self.singularities)
            .finish()
    }
}

impl RadialDensity {
    /// Full-control constructor used by the expression compiler and the
    /// presets below.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        name: impl Into<String>,
        log_w: LogProfile,
        edge: Option<EdgeProfile>,
        singularities: Vec<f64>,
        is_decreasing: bool,
        homogeneity: Option<f64>,
        integrability_floor: f64,
        dyadic_jumps: bool,
    ) -> Self {
        let fallback = log_w.clone();
        let edge = edge.unwrap_or_else(|| {
            // Smooth fallback: evaluate at the shifted point. Only valid
            // where the density is continuous, which is exactly when no
            // dedicated edge closure was supplied.
            Arc::new(move |sing: f64, side: f64, ln_d: f64| fallback(sing + side * ln_d.exp()))
        });
        RadialDensity {
            name: name.into(),
            log_w,
            edge,
            singularities,
            is_decreasing,
            homogeneity,
            integrability_floor,
            dyadic_jumps,
        }
    }

    /// Display name; matches the expression syntax for parseable profiles.
    pub fn name(&self) -> &str {
        &self.name
    }

    /// `ln w(t)` for `t ≥ 0` (singular points may return `+∞`).
    pub fn log_w(&self, t: f64) -> f64 {
        (self.log_w)(t)
    }

    /// `w(t)`; may overflow at singular points, which is the honest answer.
    pub fn w(&self, t: f64) -> f64 {
        self.log_w(t).exp()
    }

    /// `ln w(sing + side·e^{ln_d})` evaluated stably for tiny distances.
    /// `side` is `±1.0`.
    pub fn log_w_edge(&self, sing: f64, side: f64, ln_d: f64) -> f64 {
        (self.edge)(sing, side, ln_d)
    }

    /// Singular points of the profile within `(lo, hi)`, plus its jump
    /// points if any; radial integrals split at each of these.
    pub fn breakpoints_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut pts: Vec<f64> = self
            .singularities
            .iter()
            .copied()
            .filter(|&p| p > lo && p < hi)
            .collect();
        if self.dyadic_jumps && lo < hi && hi > 0.0 {
            let lo = lo.max(f64::MIN_POSITIVE);
            let k_lo = lo.log2().ceil() as i64;
            let k_hi = hi.log2().floor() as i64;
            for k in k_lo..=k_hi.min(k_lo + 4096) {
                let p = (k as f64).exp2();
                if p > lo && p < hi {
                    pts.push(p);
                }
            }
        }
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();
        pts
    }

    /// Points (including the origin) where the profile needs singular-edge
    /// treatment in radial integrals.
    pub fn singularities(&self) -> &[f64] {
        &self.singularities
    }

    /// Pointwise power `w^q` (used for Muckenhoupt dual weights).
    pub fn pow(&self, q: f64) -> RadialDensity {
        let base = self.log_w.clone();
        let edge = self.edge.clone();
        let name = if (q - 1.0).abs() < 1e-15 {
            self.name.clone()
        } else {
            format!("({})^{}", self.name, fmt_num(q))
        };
        // Monotonicity: raising to a positive power preserves the order,
        // a negative power reverses it; reversal only yields "decreasing"
        // when the base was increasing, which we do not track, so answer
        // conservatively (false) there unless the base is constant.
        let is_dec = if q >= 0.0 {
            self.is_decreasing
        } else {
            self.homogeneity == Some(0.0) && self.singularities.is_empty() && self.is_decreasing
        };
        RadialDensity {
            name,
            log_w: Arc::new(move |t| q * base(t)),
            edge: Arc::new(move |s, side, ln_d| q * edge(s, side, ln_d)),
            singularities: if q == 0.0 {
                vec![]
            } else {
                self.singularities.clone()
            },
            is_decreasing: is_dec,
            homogeneity: self.homogeneity.map(|g| g * q),
            // w ~ t^{-floor} at zero ⇒ w^q ~ t^{-q·floor}.
            integrability_floor: self.integrability_floor * q,
            dyadic_jumps: self.dyadic_jumps,
        }
    }

    // ----- presets ------------------------------------------------------

    /// Constant profile `w ≡ c`, `c > 0` (Lebesgue measure scaled).
    pub fn constant(c: f64) -> crate::Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(crate::Error::Domain(format!(
                "constant density needs c > 0, got {c}"
            )));
        }
        let lc = c.ln();
        Ok(RadialDensity::from_parts(
            fmt_num(c),
            Arc::new(move |_| lc),
            Some(Arc::new(move |_, _, _| lc)),
            vec![],
            true,
            Some(0.0),
            0.0,
            false,
        ))
    }

    /// `w ≡ 1` (Lebesgue measure).
    pub fn lebesgue() -> Self {
        RadialDensity::constant(1.0).expect("1 is a valid constant")
    }

    /// Pure power `w(t) = t^α`.
    pub fn power(alpha: f64) -> crate::Result<Self> {
        if !alpha.is_finite() {
            return Err(crate::Error::Domain(format!(
                "power exponent must be finite, got {alpha}"
            )));
        }
        if alpha == 0.0 {
            return RadialDensity::constant(1.0);
        }
        let name = if alpha == 1.0 {
            "t".to_string()
        } else {
            format!("t^{}", fmt_num(alpha))
        };
        Ok(RadialDensity::from_parts(
            name,
            Arc::new(move |t: f64| alpha * t.ln()),
            Some(Arc::new(move |sing: f64, side: f64, ln_d: f64| {
                if sing == 0.0 {
                    alpha * ln_d
                } else {
                    alpha * (sing + side * ln_d.exp()).ln()
                }
            })),
            vec![0.0],
            alpha < 0.0,
            Some(alpha),
            -alpha,
            false,
        ))
    }

    /// Singular shell `w(t) = |1 − t|^{−α}`, `α ∈ (0, 1)`: blows up on the
    /// unit sphere, integrably so in every dimension.
    pub fn shell(alpha: f64) -> crate::Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(crate::Error::Domain(format!(
                "shell exponent must lie in (0,1), got {alpha}"
            )));
        }
        Ok(RadialDensity::from_parts(
            format!("shell({})", fmt_num(alpha)),
            Arc::new(move |t: f64| -alpha * (1.0 - t).abs().ln()),
            Some(Arc::new(move |sing: f64, side: f64, ln_d: f64| {
                if sing == 1.0 {
                    -alpha * ln_d
                } else {
                    // Distance to 1 from a point near `sing != 1` is smooth.
                    -alpha * (1.0 - sing - side * ln_d.exp()).abs().ln()
                }
            })),
            vec![1.0],
            false,
            None,
            0.0,
            false,
        ))
    }

    /// Dimension-coupled power family `w(t) = t^{−αn}` (the profile is
    /// bound to the ambient dimension at construction). Requires `α < 1`
    /// so that origin balls keep finite measure in ℝⁿ.
    pub fn power_family(alpha: f64, n: u32) -> crate::Result<Self> {
        if alpha >= 1.0 || alpha.is_nan() {
            return Err(crate::Error::Domain(format!(
                "power-family exponent must satisfy alpha < 1 so that balls \
                 around the origin keep finite measure; got alpha = {alpha}"
            )));
        }
        let mut d = RadialDensity::power(-alpha * f64::from(n))?;
        d.name = format!("power_family({})", fmt_num(alpha));
        Ok(d)
    }

    /// `w(t) = e^{−t}`: smooth, strictly decreasing, all moments finite.
    pub fn exp_decay() -> Self {
        RadialDensity::from_parts(
            "exp(0 - t)".to_string(),
            Arc::new(|t: f64| -t),
            Some(Arc::new(|sing: f64, side: f64, ln_d: f64| {
                -(sing + side * ln_d.exp())
            })),
            vec![],
            true,
            None,
            0.0,
            false,
        )
    }

    /// `w(t) = 1/(1 + t²)`: smooth, decreasing, heavy polynomial tail.
    pub fn inverse_quadratic() -> Self {
        RadialDensity::from_parts(
            "1/(1 + t^2)".to_string(),
            Arc::new(|t: f64| -(t * t).ln_1p()),
            Some(Arc::new(|sing: f64, side: f64, ln_d: f64| {
                let t = sing + side * ln_d.exp();
                -(t * t).ln_1p()
            })),
            vec![],
            true,
            None,
            0.0,
            false,
        )
    }

    /// `w(t) = t²` (polynomial growth; ball averages have closed forms).
    pub fn quadratic() -> Self {
        RadialDensity::power(2.0).expect("2 is a valid exponent")
    }

    /// `w(t) = t` (linear growth).
    pub fn linear() -> Self {
        RadialDensity::power(1.0).expect("1 is a valid exponent")
    }

    /// Alternating dyadic profile: `w(t) = 4` when `⌊log₂ t⌋` is odd and
    /// `1` otherwise. Piecewise constant with oscillation exactly 4 on
    /// every annulus `[R, 2R]` that meets a jump.
    pub fn alternating_dyadic() -> Self {
        let val = |t: f64| -> f64 {
            if t <= 0.0 {
                return 0.0;
            }
            let k = t.log2().floor() as i64;
            if k.rem_euclid(2) == 1 {
                4.0f64.ln()
            } else {
                0.0
            }
        };
        RadialDensity::from_parts(
            "alt_dyadic".to_string(),
            Arc::new(val),
            Some(Arc::new(move |sing: f64, side: f64, ln_d: f64| {
                val(sing + side * ln_d.exp())
            })),
            vec![],
            false,
            None,
            0.0,
            true,
        )
    }
}

/// Compact float formatting for names and witnesses: integral values lose
/// the trailing `.0` (`2`, not `2.0`), everything else prints shortest.
pub(crate) fn fmt_num(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_profile_and_metadata() {
        let d = RadialDensity::power(-0.5).unwrap();
        assert!((d.w(4.0) - 0.5).abs() < 1e-15);
        assert_eq!(d.homogeneity, Some(-0.5));
        assert!((d.integrability_floor - 0.5).abs() < 1e-15);
        assert!(d.is_decreasing);
        // Edge form at zero must not care how small the distance is.
        assert!((d.log_w_edge(0.0, 1.0, -5000.0) - 2500.0).abs() < 1e-9);
    }

    #[test]
    fn shell_profile_edges() {
        let d = RadialDensity::shell(0.5).unwrap();
        assert_eq!(d.w(1.0), f64::INFINITY);
        assert!((d.w(0.75) - 2.0) < 1e-14);
        // ln w(1 ± e^{-800}) = 400 on both sides.
        assert!((d.log_w_edge(1.0, 1.0, -800.0) - 400.0).abs() < 1e-12);
        assert!((d.log_w_edge(1.0, -1.0, -800.0) - 400.0).abs() < 1e-12);
        assert_eq!(d.breakpoints_in(0.0, 2.0), vec![1.0]);
        assert!(d.breakpoints_in(1.5, 2.0).is_empty());
    }

    #[test]
    fn power_family_is_bound_to_dimension() {
        let d = RadialDensity::power_family(0.7, 10).unwrap();
        assert!((d.log_w(2.0) + 7.0 * 2.0f64.ln()).abs() < 1e-12);
        assert!((d.integrability_floor - 7.0).abs() < 1e-12);
        assert!(d.is_decreasing);
    }

    #[test]
    fn dual_weight_power() {
        // (t^2)^{1/(1-p)} at p=2 is t^{-2}.
        let dual = RadialDensity::power(2.0).unwrap().pow(-1.0);
        assert_eq!(dual.homogeneity, Some(-2.0));
        assert!((dual.integrability_floor - 2.0).abs() < 1e-12);
        assert!((dual.w(3.0) - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn alternating_dyadic_values_and_breaks() {
        let d = RadialDensity::alternating_dyadic();
        assert_eq!(d.w(3.0), 4.0); // log2 in [1,2) -> odd
        assert_eq!(d.w(1.5), 1.0); // log2 in [0,1) -> even
        assert_eq!(d.w(0.3), 1.0); // log2(0.3) ≈ -1.74, floor -2, even
        assert_eq!(d.w(0.6), 4.0); // log2(0.6) ≈ -0.74, floor -1, odd
        let bp = d.breakpoints_in(0.9, 8.1);
        assert_eq!(bp, vec![1.0, 2.0, 4.0, 8.0]);
    }
}
