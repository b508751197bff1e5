//! Ball measures for rotation-invariant measures `dμ = w(|x|) dx` in ℝⁿ.
//!
//! Everything reduces to one-dimensional radial integrals: the μ-measure of
//! the open ball `B(z, R)` with `|z| = s` is
//!
//! ```text
//!   μ(B(z,R)) = ∫ w(t) · A(t) · dt,
//! ```
//!
//! where `A(t)` is the surface measure of the part of the sphere `{|x|=t}`
//! that lies inside `B(z,R)` — a spherical cap whose half-angle `α(t)`
//! comes from the law of cosines. Cap areas are evaluated through the
//! regularized incomplete beta function, and all arithmetic is carried in
//! log scale so that dimensions in the thousands stay exact to near machine
//! relative precision.

use crate::density::{fmt_num, RadialDensity};
use crate::logspace::{log_sum_exp, LogMeasure};
use crate::quadrature::{integrate_log, integrate_log_edge, LogIntegral, QuadratureConfig};
use crate::special::{log_sine_power_integral, log_sphere_surface};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// A ball `B(z, R) ⊂ ℝⁿ` identified by dimension, center norm `s = |z|`,
/// and radius `R` (rotation invariance makes the center direction moot).
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BallSpec {
    pub n: u32,
    pub s: f64,
    pub r: f64,
}

impl BallSpec {
    pub fn new(n: u32, s: f64, r: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!(
                "dimension must be at least 2, got {n}"
            )));
        }
        if !(s >= 0.0 && s.is_finite()) {
            return Err(Error::Domain(format!(
                "center norm must be finite and nonnegative, got {s}"
            )));
        }
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Domain(format!(
                "radius must be finite and positive, got {r}"
            )));
        }
        Ok(BallSpec { n, s, r })
    }

    /// Smallest radial coordinate the ball reaches.
    pub fn t_lo(&self) -> f64 {
        (self.s - self.r).max(0.0)
    }

    /// Largest radial coordinate the ball reaches.
    pub fn t_hi(&self) -> f64 {
        self.s + self.r
    }

    /// `T = √(s² + R²)`: the radius of the sphere through the points where
    /// the boundary sphere of the ball is tangent to rays from the origin.
    pub fn tangent_radius(&self) -> f64 {
        self.s.hypot(self.r)
    }

    /// Half-angle `α(t) ∈ [0, π]` of the spherical cap cut out of the
    /// sphere `{|x| = t}` by `B(z, R)` (law of cosines, clamped against
    /// rounding at the extremes). Only meaningful for `s > 0`.
    pub fn cap_angle(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return if self.s < self.r { PI } else { 0.0 };
        }
        let c = (self.s * self.s + t * t - self.r * self.r) / (2.0 * self.s * t);
        c.clamp(-1.0, 1.0).acos()
    }

    /// `ln A(t)`: log surface measure of `{|x| = t} ∩ B(z, R)`.
    ///
    /// Piecewise: zero outside `[t_lo, t_hi]`, the full sphere when the
    /// ball swallows the sphere, a cap in between. Internal special-
    /// function failure surfaces as NaN, which the quadrature treats as
    /// "split this interval" and ultimately reports honestly.
    pub fn log_shell_area(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let nm1 = f64::from(self.n - 1);
        if self.s == 0.0 {
            return if t < self.r {
                log_sphere_surface(self.n) + nm1 * t.ln()
            } else {
                f64::NEG_INFINITY
            };
        }
        let alpha = self.cap_angle(t);
        if alpha <= 0.0 {
            f64::NEG_INFINITY
        } else if alpha >= PI {
            log_sphere_surface(self.n) + nm1 * t.ln()
        } else {
            match log_sine_power_integral(self.n, alpha) {
                Ok(lj) => log_sphere_surface(self.n - 1) + lj + nm1 * t.ln(),
                Err(_) => f64::NAN,
            }
        }
    }

    /// `ln φ(t)` of the radial profile of the *normalized* indicator
    /// `χ_{B(z,R)} / |B(z,R)|`: integrating `e^{ln φ}` over `t` gives 1,
    /// and `∫ w(t) e^{ln φ(t)} dt` is the Lebesgue-average of `w` over the
    /// ball. This is the approximate-identity kernel studied by the
    /// dimension-limit experiments.
    pub fn log_kernel(&self, t: f64) -> f64 {
        self.log_shell_area(t) - log_lebesgue_ball(self.n, self.r)
    }
}

/// `ln |B(0, r)|` in ℝⁿ (Lebesgue volume).
pub fn log_lebesgue_ball(n: u32, r: f64) -> f64 {
    log_sphere_surface(n) - f64::from(n).ln() + f64::from(n) * r.ln()
}

// ---------------------------------------------------------------------
// Radial integration plan
// ---------------------------------------------------------------------

enum Piece {
    /// Smooth chain of breakpoints integrated in the `t` variable.
    Chain(Vec<f64>),
    /// Edge integral approaching `p` from the right over `(p, p + cut]`.
    EdgeRight { p: f64, cut: f64 },
    /// Edge integral approaching `p` from the left over `[p − cut, p)`.
    EdgeLeft { p: f64, cut: f64 },
}

fn plan_pieces(density: &RadialDensity, spec: &BallSpec) -> Vec<Piece> {
    let mut extra = Vec::new();
    if spec.s > 0.0 {
        // Branch points of the cap formula: full-sphere cutoff, the
        // hemisphere radius, and the tangency radius T.
        let hemi = (spec.r * spec.r - spec.s * spec.s).max(0.0).sqrt();
        extra.extend([spec.r - spec.s, hemi, spec.tangent_radius()]);
    }
    plan_interval_pieces(density, spec.t_lo(), spec.t_hi(), &extra)
}

fn plan_interval_pieces(
    density: &RadialDensity,
    t_lo: f64,
    t_hi: f64,
    extra: &[f64],
) -> Vec<Piece> {
    let tol = (t_hi - t_lo) * 1e-12;

    let sing: Vec<f64> = density
        .singularities()
        .iter()
        .copied()
        .filter(|&p| p >= t_lo - tol && p <= t_hi + tol)
        .map(|p| p.clamp(t_lo, t_hi))
        .collect();

    let mut knots = vec![t_lo, t_hi];
    for &c in extra {
        if c > t_lo + tol && c < t_hi - tol {
            knots.push(c);
        }
    }
    knots.extend(density.breakpoints_in(t_lo, t_hi));
    knots.extend(sing.iter().copied());
    knots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    knots.dedup_by(|a, b| (*a - *b).abs() <= tol);
    // Snap knots onto singular values so identity checks below are exact.
    for k in knots.iter_mut() {
        if let Some(&p) = sing.iter().find(|&&p| (p - *k).abs() <= tol) {
            *k = p;
        }
    }
    knots.dedup();

    let is_sing = |x: f64| sing.contains(&x);
    let mut pieces = Vec::new();
    let mut chain: Vec<f64> = Vec::new();
    for win in knots.windows(2) {
        let (a, b) = (win[0], win[1]);
        let gap = b - a;
        if gap <= 0.0 {
            continue;
        }
        let ca = if is_sing(a) { 0.35 * gap } else { 0.0 };
        let cb = if is_sing(b) { 0.35 * gap } else { 0.0 };
        if ca > 0.0 {
            pieces.push(Piece::EdgeRight { p: a, cut: ca });
        }
        if chain.is_empty() {
            chain.push(a + ca);
        }
        chain.push(b - cb);
        if cb > 0.0 {
            if chain.len() >= 2 {
                pieces.push(Piece::Chain(std::mem::take(&mut chain)));
            } else {
                chain.clear();
            }
            pieces.push(Piece::EdgeLeft { p: b, cut: cb });
        }
    }
    if chain.len() >= 2 {
        pieces.push(Piece::Chain(chain));
    }
    pieces
}

/// `ln μ(B(z, R))` for `dμ = w(|x|) dx`.
///
/// Singular points of the density are integrated through the
/// log-distance substitution, so shells with algebraic blow-ups are
/// handled at full accuracy in any dimension; non-integrable profiles
/// produce [`Error::Divergent`] carrying the partial mass accumulated
/// before divergence was certified.
pub fn ball_measure(
    density: &RadialDensity,
    spec: &BallSpec,
    cfg: &QuadratureConfig,
) -> Result<LogMeasure> {
    let smooth = |t: f64| density.log_w(t) + spec.log_shell_area(t);
    let mut acc: Vec<LogIntegral> = Vec::new();
    for piece in plan_pieces(density, spec) {
        let res = match piece {
            Piece::Chain(pts) => integrate_log(&smooth, &pts, cfg),
            Piece::EdgeRight { p, cut } => edge_piece(density, spec, p, 1.0, cut, cfg),
            Piece::EdgeLeft { p, cut } => edge_piece(density, spec, p, -1.0, cut, cfg),
        };
        match res {
            Ok(li) => acc.push(li),
            Err(Error::Divergent {
                partial_log,
                context,
            }) => {
                let mut all: Vec<f64> = acc.iter().map(|l| l.ln_value).collect();
                all.push(partial_log);
                return Err(Error::Divergent {
                    partial_log: log_sum_exp(&all),
                    context,
                });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(LogMeasure::from_ln(LogIntegral::combine(&acc).ln_value))
}

fn edge_piece(
    density: &RadialDensity,
    spec: &BallSpec,
    p: f64,
    side: f64,
    cut: f64,
    cfg: &QuadratureConfig,
) -> Result<LogIntegral> {
    // The density is evaluated through its log-distance form (exact at any
    // distance). The geometric factor is evaluated at the shifted point;
    // once e^u drops below the floating-point resolution of p the shift
    // rounds onto p itself, where a one-sided limit is required (the area
    // factor can jump at p, e.g. when p is the outer radius of the ball),
    // so the point is nudged one ulp back toward the approach side.
    let lg_u = |u: f64| {
        let mut t = p + side * u.exp();
        if t == p {
            t = if side > 0.0 {
                p.next_up()
            } else {
                p.next_down()
            };
        }
        density.log_w_edge(p, side, u) + spec.log_shell_area(t)
    };
    let ctx = format!(
        "w = {} near t = {} in dimension {}",
        density.name(),
        fmt_num(p),
        spec.n
    );
    let e = integrate_log_edge(&lg_u, cut.ln(), cfg, &ctx)?;
    Ok(LogIntegral {
        ln_value: e.ln_value,
        ln_err: e.ln_err,
        intervals: e.blocks,
    })
}

/// `ln ( μ(B(z,R)) / |B(z,R)| )`: the Lebesgue-normalized ball average of
/// the density.
pub fn ball_average(
    density: &RadialDensity,
    spec: &BallSpec,
    cfg: &QuadratureConfig,
) -> Result<LogMeasure> {
    let mu = ball_measure(density, spec, cfg)?;
    Ok(LogMeasure::from_ln(
        mu.ln() - log_lebesgue_ball(spec.n, spec.r),
    ))
}

/// `ln ∫_a^b w₀(t) t^{n−1} dt`: the mass of the one-dimensional weight
/// `v(t) = w₀(t) t^{n−1}` on `[a, b]`, without the angular factor (so
/// `μ(B(0, R)) = ω_{n−1} · exp(log_radial_mass(0, R))`).
///
/// Singular points of the profile inside `[a, b]` go through the same
/// log-distance edge treatment as ball measures; non-integrable ones
/// produce [`Error::Divergent`].
pub fn log_radial_mass(
    density: &RadialDensity,
    n: u32,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if !(a >= 0.0 && b > a) || !b.is_finite() {
        return Err(Error::Domain(format!(
            "radial mass needs 0 <= a < b < inf; got a = {a}, b = {b}"
        )));
    }
    if n == 0 {
        return Err(Error::Domain(
            "radial mass needs dimension n >= 1".to_string(),
        ));
    }
    let nm1 = f64::from(n) - 1.0;
    let smooth = |t: f64| density.log_w(t) + nm1 * t.ln();
    let mut acc: Vec<LogIntegral> = Vec::new();
    for piece in plan_interval_pieces(density, a, b, &[]) {
        let res = match piece {
            Piece::Chain(pts) => integrate_log(&smooth, &pts, cfg),
            Piece::EdgeRight { p, cut } => radial_edge_piece(density, nm1, p, 1.0, cut, cfg),
            Piece::EdgeLeft { p, cut } => radial_edge_piece(density, nm1, p, -1.0, cut, cfg),
        };
        match res {
            Ok(li) => acc.push(li),
            Err(Error::Divergent {
                partial_log,
                context,
            }) => {
                let mut all: Vec<f64> = acc.iter().map(|l| l.ln_value).collect();
                all.push(partial_log);
                return Err(Error::Divergent {
                    partial_log: log_sum_exp(&all),
                    context,
                });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(LogIntegral::combine(&acc).ln_value)
}

/// `ln ∫_{[a,b] ∩ support} Aₙ(t) t^{n−1} dt`: the unnormalized mass of
/// the ball's radial profile over a radius window. Dividing by the ball
/// volume gives the window's share of the normalized kernel, which is
/// how tail masses `I_ε` are computed:
/// `∫_{[a,b]} φ dt = exp(log_kernel_mass(spec, a, b) − log_lebesgue_ball)`.
///
/// Windows that miss the support entirely — including empty or inverted
/// ones — return `−∞`.
pub fn log_kernel_mass(spec: &BallSpec, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if a.is_nan() || b.is_nan() {
        return Err(Error::Domain(format!(
            "kernel mass window must not be NaN; got a = {a}, b = {b}"
        )));
    }
    let lo = a.max(spec.t_lo());
    let hi = b.min(spec.t_hi());
    if lo >= hi {
        return Ok(f64::NEG_INFINITY);
    }
    let lebesgue = RadialDensity::lebesgue();
    let mut extra = Vec::new();
    if spec.s > 0.0 {
        let hemi = (spec.r * spec.r - spec.s * spec.s).max(0.0).sqrt();
        extra.extend([spec.r - spec.s, hemi, spec.tangent_radius()]);
    }
    let smooth = |t: f64| spec.log_shell_area(t);
    let mut acc: Vec<LogIntegral> = Vec::new();
    for piece in plan_interval_pieces(&lebesgue, lo, hi, &extra) {
        match piece {
            Piece::Chain(pts) => acc.push(integrate_log(&smooth, &pts, cfg)?),
            // The Lebesgue profile has no singular points.
            Piece::EdgeRight { .. } | Piece::EdgeLeft { .. } => unreachable!(),
        }
    }
    Ok(LogIntegral::combine(&acc).ln_value)
}

fn radial_edge_piece(
    density: &RadialDensity,
    nm1: f64,
    p: f64,
    side: f64,
    cut: f64,
    cfg: &QuadratureConfig,
) -> Result<LogIntegral> {
    // Same shifted-point treatment as `edge_piece`: once e^u rounds onto
    // p the factor t^{n−1} is evaluated one ulp back toward the approach
    // side (relevant only for p = 0, where ln t would be −∞).
    let lg_u = |u: f64| {
        let mut t = p + side * u.exp();
        if t == p {
            t = if side > 0.0 {
                p.next_up()
            } else {
                p.next_down()
            };
        }
        density.log_w_edge(p, side, u) + nm1 * t.ln()
    };
    let ctx = format!(
        "one-dimensional weight of w = {} near t = {}",
        density.name(),
        fmt_num(p)
    );
    let e = integrate_log_edge(&lg_u, cut.ln(), cfg, &ctx)?;
    Ok(LogIntegral {
        ln_value: e.ln_value,
        ln_err: e.ln_err,
        intervals: e.blocks,
    })
}

// ---------------------------------------------------------------------
// Monte Carlo reference (low dimensions only)
// ---------------------------------------------------------------------

/// A plain Monte Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

/// Monte Carlo estimate of `μ(B(z,R))` by uniform sampling in the ball,
/// in linear scale. Restricted to `2 ≤ n ≤ 10`, where linear-scale
/// volumes are well conditioned; higher dimensions must use the exact
/// radial reduction.
pub fn mc_ball_measure(
    density: &RadialDensity,
    spec: &BallSpec,
    cfg: &QuadratureConfig,
) -> Result<McEstimate> {
    if spec.n > 10 {
        return Err(Error::Domain(format!(
            "Monte Carlo reference is restricted to n ≤ 10, got n = {}",
            spec.n
        )));
    }
    let n = spec.n as usize;
    let samples = cfg.mc_samples.max(10_000);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.mc_seed);
    let vol = log_lebesgue_ball(spec.n, spec.r).exp();
    let inv_n = 1.0 / n as f64;
    let mut sum = 0.0f64;
    let mut sumsq = 0.0f64;
    let mut gauss = vec![0.0f64; n + 1];
    for _ in 0..samples {
        // Direction via normalized Gaussians (Box–Muller in pairs); only
        // the first coordinate of the unit vector matters for |z + ρu|.
        for pair in gauss.chunks_mut(2) {
            let u1: f64 = 1.0 - rng.gen::<f64>();
            let u2: f64 = rng.gen();
            let m = (-2.0 * u1.ln()).sqrt();
            pair[0] = m * (2.0 * PI * u2).cos();
            if pair.len() == 2 {
                pair[1] = m * (2.0 * PI * u2).sin();
            }
        }
        let norm = gauss[..n].iter().map(|g| g * g).sum::<f64>().sqrt();
        let u1 = gauss[0] / norm;
        let rho = spec.r * rng.gen::<f64>().powf(inv_n);
        let dist = (spec.s * spec.s + 2.0 * spec.s * rho * u1 + rho * rho)
            .max(0.0)
            .sqrt();
        let w = density.log_w(dist).exp();
        sum += w;
        sumsq += w * w;
    }
    let m = sum / samples as f64;
    let var = ((sumsq / samples as f64 - m * m).max(0.0)) / (samples as f64 - 1.0);
    Ok(McEstimate {
        mean: vol * m,
        stderr: vol * var.sqrt(),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn cap_angle_extremes() {
        let b = BallSpec::new(5, 2.0, 1.0).unwrap();
        assert_eq!(b.cap_angle(3.5), 0.0); // sphere outside the ball
        assert_eq!(b.cap_angle(0.5), 0.0); // sphere inside |x| < s - r
        let inner = BallSpec::new(5, 0.5, 1.0).unwrap();
        assert_eq!(inner.cap_angle(0.25), PI); // swallowed sphere
                                               // Hemisphere at t = sqrt(r² − s²).
        let h = BallSpec::new(5, 0.6, 1.0).unwrap();
        let t = (1.0f64 - 0.36).sqrt();
        assert!((h.cap_angle(t) - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn hemisphere_area_is_half_sphere() {
        // ω_{n−2}·J_n(π/2) = ω_{n−1}/2 exactly.
        for n in [2u32, 3, 5, 50, 500] {
            let s = 0.6;
            let b = BallSpec::new(n, s, 1.0).unwrap();
            let t = (1.0f64 - s * s).sqrt();
            let got = b.log_shell_area(t);
            let want = log_sphere_surface(n) - std::f64::consts::LN_2 + f64::from(n - 1) * t.ln();
            assert!((got - want).abs() < 1e-11, "n={n}: {got} vs {want}");
        }
    }

    #[test]
    fn three_dimensional_cap_closed_form() {
        // In ℝ³ the unit-sphere cap area is 2π(1 − cos α).
        let b = BallSpec::new(3, 1.3, 0.9).unwrap();
        for t in [0.5, 0.9, 1.5, 2.1] {
            let alpha = b.cap_angle(t);
            if alpha <= 0.0 || alpha >= PI {
                continue;
            }
            let got = b.log_shell_area(t) - 2.0 * t.ln();
            let want = (2.0 * PI * (1.0 - alpha.cos())).ln();
            assert!((got - want).abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn lebesgue_measure_closed_form() {
        // w ≡ 1 must reproduce |B(z,R)| = ω_{n−1} Rⁿ / n at machine-level
        // accuracy regardless of where the ball sits.
        let d = RadialDensity::lebesgue();
        for &(n, s, r) in &[
            (2u32, 0.0, 1.0),
            (3, 1.0, 1.0),
            (7, 2.5, 0.4),
            (100, 1.0, 2.0),
            (1000, 3.0, 1.0),
        ] {
            let b = BallSpec::new(n, s, r).unwrap();
            let got = ball_measure(&d, &b, &cfg()).unwrap().ln();
            let want = log_lebesgue_ball(n, r);
            assert!(
                (got - want).abs() < 1e-9,
                "n={n} s={s} r={r}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn kernel_is_a_probability_density() {
        for &(n, s, r) in &[(2u32, 1.0, 1.0), (10, 0.5, 1.0), (200, 3.0, 1.0)] {
            let b = BallSpec::new(n, s, r).unwrap();
            let lg = |t: f64| b.log_kernel(t);
            let total =
                integrate_log(&lg, &[b.t_lo(), b.tangent_radius(), b.t_hi()], &cfg()).unwrap();
            assert!(
                total.ln_value.abs() < 1e-9,
                "n={n}: kernel mass off by {}",
                total.ln_value.exp() - 1.0
            );
        }
    }

    #[test]
    fn divergent_profile_reports_partial_mass() {
        // w = t^{-3} around the origin in ℝ²: non-integrable.
        let d = RadialDensity::power(-3.0).unwrap();
        let b = BallSpec::new(2, 0.0, 1.0).unwrap();
        match ball_measure(&d, &b, &cfg()) {
            Err(Error::Divergent { partial_log, .. }) => {
                assert!(partial_log.is_finite());
            }
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn monte_carlo_refuses_high_dimension() {
        let d = RadialDensity::lebesgue();
        let b = BallSpec::new(11, 0.0, 1.0).unwrap();
        assert!(matches!(
            mc_ball_measure(&d, &b, &cfg()),
            Err(Error::Domain(_))
        ));
    }
}
