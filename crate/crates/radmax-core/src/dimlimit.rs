//! Differentiation through dimensions: certification of the ball kernel
//! as an approximation of the identity, convergence tables for ball
//! averages toward `w₀(T)`, and growth experiments across a dimension
//! schedule.
//!
//! The radial profile `φ` of the normalized ball `B(z, R)` in ℝⁿ
//! concentrates at `T = √(s² + R²)` as `n → ∞`; consequently the ball
//! average of a radial density converges to its value at `T` wherever
//! the profile is continuous. This module certifies the kernel
//! properties (positivity, unit mass, vanishing tails), tabulates the
//! convergence, and fits growth laws (power `n^γ` or exponential `aⁿ`)
//! to quantities that blow up along the schedule.

use crate::density::RadialDensity;
use crate::geometry::{ball_average, log_kernel_mass, log_lebesgue_ball, BallSpec};
use crate::grid1d::delta_lower_bound;
use crate::quadrature::QuadratureConfig;
use crate::report::ExperimentReport;
use crate::special::log_sphere_surface;
use crate::{Error, Result};
use rayon::prelude::*;

/// Default geometric dimension schedule `{10·4^k}` capped at 2000.
/// Convergence statements carry no rate, so experiments sample sparsely
/// but over two decades.
pub fn default_schedule() -> Vec<u32> {
    vec![10, 40, 160, 640, 2000]
}

/// Default radius mesh for point-mass lower-bound scans: log-spaced over
/// [0.02, 20]; singular radii of the density are added automatically by
/// the scan itself.
pub fn default_delta_mesh() -> Vec<f64> {
    (0..33)
        .map(|i| 0.02 * 1000f64.powf(f64::from(i) / 32.0))
        .collect()
}

// ---------------------------------------------------------------------
// Kernel certification
// ---------------------------------------------------------------------

/// Certificate that the ball kernel behaves as an approximation of the
/// identity at one `(n, s, R)`: pointwise nonnegativity on a mesh, unit
/// mass, and small tail mass outside `[T − ε, T + ε]`.
#[derive(Clone, Copy, Debug)]
pub struct KernelCertificate {
    /// Smallest kernel value over the evaluation mesh (≥ 0 unless the
    /// quadrature is broken).
    pub min_kernel: f64,
    /// |∫ φ dt − 1|.
    pub mass_error: f64,
    /// Kernel mass below `T − ε`.
    pub tail_below: f64,
    /// Kernel mass above `T + ε`.
    pub tail_above: f64,
}

impl KernelCertificate {
    /// Total tail mass `I_ε`.
    pub fn tail(&self) -> f64 {
        self.tail_below + self.tail_above
    }
}

/// Certifies the approximation-of-identity properties of the kernel of
/// `spec` with tail window `ε ∈ (0, T)`.
pub fn approx_identity_certificate(spec: &BallSpec, eps: f64) -> Result<KernelCertificate> {
    let t = spec.tangent_radius();
    if !(eps > 0.0 && eps < t) {
        return Err(Error::Domain(format!(
            "tail window must satisfy 0 < eps < T = {t}; got eps = {eps}"
        )));
    }
    let cfg = QuadratureConfig::default();
    let log_vol = log_lebesgue_ball(spec.n, spec.r);

    let mass = (log_kernel_mass(spec, spec.t_lo(), spec.t_hi(), &cfg)? - log_vol).exp();
    let tail_below = (log_kernel_mass(spec, spec.t_lo(), t - eps, &cfg)? - log_vol).exp();
    let tail_above = (log_kernel_mass(spec, t + eps, spec.t_hi(), &cfg)? - log_vol).exp();

    let mesh = 1001;
    let mut min_kernel = f64::INFINITY;
    for i in 0..mesh {
        let x = spec.t_lo()
            + (spec.t_hi() - spec.t_lo()) * f64::from(i) / f64::from(mesh - 1);
        let v = spec.log_kernel(x).exp();
        if v.is_nan() {
            return Err(Error::Quadrature(format!(
                "kernel evaluated to NaN at t = {x}"
            )));
        }
        min_kernel = min_kernel.min(v);
    }

    Ok(KernelCertificate {
        min_kernel,
        mass_error: (mass - 1.0).abs(),
        tail_below,
        tail_above,
    })
}

/// Largest log-increase of the kernel between consecutive mesh points on
/// `[T, s + R]` (where the kernel must be nonincreasing); values ≤ 0
/// certify monotonicity at mesh resolution. Degenerate intervals
/// (`s = 0`, where `T = s + R`) report `−∞`.
pub fn kernel_decrease_defect(spec: &BallSpec, mesh: usize) -> f64 {
    let lo = spec.tangent_radius();
    let hi = spec.t_hi();
    if hi <= lo || hi.is_nan() || mesh < 2 {
        return f64::NEG_INFINITY;
    }
    let ln_phi: Vec<f64> = (0..mesh)
        .map(|i| spec.log_kernel(lo + (hi - lo) * (i as f64) / (mesh as f64 - 1.0)))
        .collect();
    let mut worst = f64::NEG_INFINITY;
    for w in ln_phi.windows(2) {
        // −∞ → −∞ steps (identically zero kernel) are no increase.
        let step = if w[0] == f64::NEG_INFINITY && w[1] == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            w[1] - w[0]
        };
        worst = worst.max(step);
    }
    worst
}

/// Double comparison of the kernel against its explicit envelope:
/// with `y(t) = t sin α(t)` and
/// `φ̃(t) = (n/(n−1)) (ω_{n−2}/ω_{n−1}) y(t)^{n−1} / Rⁿ`,
/// the kernel satisfies `φ̃ ≤ φ ≤ φ̃ / cos α` wherever `α(t) < π/2`.
/// Returns the worst log-scale violations `(lower, upper)` over the mesh
/// (≤ 0 means the inequality held). Requires `s > 0` and `n ≥ 2`.
pub fn kernel_double_estimate_defect(spec: &BallSpec, mesh: usize) -> Result<(f64, f64)> {
    if spec.s <= 0.0 {
        return Err(Error::Domain(
            "the envelope comparison needs an off-center ball (s > 0)".to_string(),
        ));
    }
    let n = f64::from(spec.n);
    let ln_prefactor = n.ln() - (n - 1.0).ln() + log_sphere_surface(spec.n - 1)
        - log_sphere_surface(spec.n)
        - n * spec.r.ln();
    let (lo, hi) = (spec.t_lo(), spec.t_hi());
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::NEG_INFINITY;
    for i in 0..mesh {
        let t = lo + (hi - lo) * (i as f64 + 0.5) / mesh as f64;
        let alpha = spec.cap_angle(t);
        if !(alpha > 1e-12 && alpha < std::f64::consts::FRAC_PI_2 - 1e-12) {
            continue;
        }
        let ln_phi = spec.log_kernel(t);
        let ln_tilde = ln_prefactor + (n - 1.0) * (t.ln() + alpha.sin().ln());
        lower = lower.max(ln_tilde - ln_phi);
        upper = upper.max(ln_phi - (ln_tilde - alpha.cos().ln()));
    }
    Ok((lower, upper))
}

// ---------------------------------------------------------------------
// Convergence tables
// ---------------------------------------------------------------------

/// A convergence experiment: one density, a list of `(s, R)` ball
/// families, a dimension schedule, and a per-dimension error tolerance
/// schedule (the last entry is the one certification enforces).
#[derive(Clone, Debug)]
pub struct LimitExperiment {
    pub density: RadialDensity,
    pub specs: Vec<(f64, f64)>,
    pub schedule: Vec<u32>,
    pub tolerances: Vec<f64>,
}

impl LimitExperiment {
    /// Validates the schedule shape and keeps `T = √(s² + R²)` away from
    /// singular radii of the density, where the limit value `w₀(T)` is
    /// not meaningful.
    pub fn new(
        density: RadialDensity,
        specs: Vec<(f64, f64)>,
        schedule: Vec<u32>,
        tolerances: Vec<f64>,
    ) -> Result<Self> {
        if specs.is_empty() || schedule.is_empty() {
            return Err(Error::Domain(
                "limit experiment needs at least one (s, R) pair and one dimension".to_string(),
            ));
        }
        if tolerances.len() != schedule.len() {
            return Err(Error::Domain(format!(
                "tolerance schedule length {} must match dimension schedule length {}",
                tolerances.len(),
                schedule.len()
            )));
        }
        if schedule.windows(2).any(|w| w[0] >= w[1]) || schedule[0] < 2 {
            return Err(Error::Domain(
                "dimension schedule must be strictly increasing and start at n >= 2".to_string(),
            ));
        }
        for &(s, r) in &specs {
            if s < 0.0 || s.is_nan() || r <= 0.0 || r.is_nan() {
                return Err(Error::Domain(format!(
                    "ball family needs s >= 0 and R > 0; got ({s}, {r})"
                )));
            }
            let t = s.hypot(r);
            for &p in density.singularities() {
                if (t - p).abs() <= 1e-6 * t.max(1.0) {
                    return Err(Error::Domain(format!(
                        "T = {t} for (s, R) = ({s}, {r}) sits on a discontinuity of \
                         w = {}; the limit value is undefined there",
                        density.name()
                    )));
                }
            }
        }
        Ok(LimitExperiment {
            density,
            specs,
            schedule,
            tolerances,
        })
    }
}

/// A computed convergence table plus the list of certificate violations
/// (empty when every ball family converged as required).
#[derive(Clone, Debug)]
pub struct LimitTable {
    pub report: ExperimentReport,
    pub violations: Vec<String>,
}

impl LimitTable {
    /// Enforces the convergence certificate: any violation becomes
    /// [`Error::Certificate`].
    pub fn certified(self) -> Result<ExperimentReport> {
        if self.violations.is_empty() {
            Ok(self.report)
        } else {
            Err(Error::Certificate(self.violations.join("; ")))
        }
    }
}

/// Tabulates ball averages `Φₙ = ⨍_{B(z,R)} w₀(|x|) dx` against the
/// limit `w₀(T)` over the schedule, and checks, per ball family, that
/// the error decreased from the first dimension to the last and that the
/// final error is below the last tolerance.
pub fn limit_table(exp: &LimitExperiment) -> Result<LimitTable> {
    let cfg = QuadratureConfig::default();
    let cells: Vec<(usize, usize)> = (0..exp.specs.len())
        .flat_map(|i| (0..exp.schedule.len()).map(move |j| (i, j)))
        .collect();
    let values: Vec<Result<f64>> = cells
        .par_iter()
        .map(|&(i, j)| {
            let (s, r) = exp.specs[i];
            let spec = BallSpec::new(exp.schedule[j], s, r)?;
            Ok(ball_average(&exp.density, &spec, &cfg)?.ln().exp())
        })
        .collect();

    let mut report = ExperimentReport::new("limit")
        .with_param("density", exp.density.name())
        .with_param(
            "schedule",
            exp.schedule
                .iter()
                .map(|n| n.to_string())
                .collect::<Vec<_>>()
                .join(" "),
        )
        .with_provenance("quadrature_rel_tol", cfg.rel_tol)
        .with_provenance(
            "tolerances",
            exp.tolerances
                .iter()
                .map(|t| t.to_string())
                .collect::<Vec<_>>()
                .join(" "),
        );
    report.set_columns(&["s", "R", "T", "n", "average", "target", "abs_error"]);

    let mut violations = Vec::new();
    for (i, &(s, r)) in exp.specs.iter().enumerate() {
        let t = s.hypot(r);
        let target = exp.density.w(t);
        let mut errors = Vec::new();
        for (j, &n) in exp.schedule.iter().enumerate() {
            let phi = match &values[i * exp.schedule.len() + j] {
                Ok(v) => *v,
                Err(e) => {
                    return Err(Error::Quadrature(format!(
                        "ball average failed at (s, R, n) = ({s}, {r}, {n}): {e}"
                    )))
                }
            };
            let err = (phi - target).abs();
            errors.push(err);
            report.push_row(vec![s, r, t, f64::from(n), phi, target, err]);
        }
        let first = errors[0];
        let last = *errors.last().expect("schedule is nonempty");
        let tol = *exp.tolerances.last().expect("tolerances are nonempty");
        if last > tol {
            violations.push(format!(
                "(s, R) = ({s}, {r}): final error {last:.3e} exceeds tolerance {tol:.3e}"
            ));
        }
        // Demand a strict decrease only when the starting error was above
        // the final tolerance: densities that are exact at every
        // dimension (constants) have nothing to shrink.
        if last >= first && first > tol {
            violations.push(format!(
                "(s, R) = ({s}, {r}): error did not decrease ({first:.3e} -> {last:.3e})"
            ));
        }
    }
    Ok(LimitTable { report, violations })
}

// ---------------------------------------------------------------------
// Growth fitting
// ---------------------------------------------------------------------

/// Growth law fitted to `(n, value)` data.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrowthModel {
    /// `value ≈ C · n^γ` (ordinary least squares on log–log data).
    PowerLaw,
    /// `value ≈ C · aⁿ` (ordinary least squares on lin–log data).
    Exponential,
}

/// Least-squares growth fit over the top half of a dimension schedule
/// (early dimensions are pre-asymptotic transients and are excluded).
#[derive(Clone, Debug)]
pub struct GrowthFit {
    pub model: GrowthModel,
    /// `(n, ln value)` pairs that entered the fit.
    pub used: Vec<(f64, f64)>,
    /// `γ` for power laws, `ln a` for exponentials.
    pub exponent: f64,
    /// Half-width of the exponent's ±2 standard-error band.
    pub band: f64,
    pub r_squared: f64,
    /// Fitted `ln C`.
    pub ln_amplitude: f64,
}

impl GrowthFit {
    /// Fitted base `a` of an exponential law (`exp(exponent)`); for a
    /// power law this is `exp(γ)` and rarely meaningful.
    pub fn growth_base(&self) -> f64 {
        self.exponent.exp()
    }

    /// Whether the exponent may be asserted: the fit explains at least
    /// 98% of the variance.
    pub fn reliable(&self) -> bool {
        self.r_squared >= 0.98
    }
}

/// Fits a growth law to `(n, ln value)` pairs. Keeps the top half of the
/// schedule (at least three points), ordered by `n`.
pub fn fit_growth_log(pairs: &[(f64, f64)], model: GrowthModel) -> Result<GrowthFit> {
    let mut data: Vec<(f64, f64)> = pairs
        .iter()
        .copied()
        .filter(|&(n, ln_v)| n.is_finite() && n > 0.0 && ln_v.is_finite())
        .collect();
    data.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite abscissas"));
    if data.len() < 3 {
        return Err(Error::Domain(format!(
            "growth fit needs at least 3 finite points; got {}",
            data.len()
        )));
    }
    let keep = (data.len().div_ceil(2)).max(3);
    let used: Vec<(f64, f64)> = data.split_off(data.len() - keep);

    let xs: Vec<f64> = used
        .iter()
        .map(|&(n, _)| match model {
            GrowthModel::PowerLaw => n.ln(),
            GrowthModel::Exponential => n,
        })
        .collect();
    let ys: Vec<f64> = used.iter().map(|&(_, ln_v)| ln_v).collect();
    let m = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / m;
    let ybar = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - xbar) * (x - xbar)).sum();
    if sxx <= 0.0 {
        return Err(Error::Domain(
            "growth fit needs at least two distinct dimensions".to_string(),
        ));
    }
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - xbar) * (y - ybar))
        .sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - ybar) * (y - ybar)).sum();
    let r_squared = if ss_tot <= 1e-28 {
        // Flat data: a flat fit explains it perfectly.
        if ss_res <= 1e-24 {
            1.0
        } else {
            0.0
        }
    } else {
        1.0 - ss_res / ss_tot
    };
    let band = if used.len() > 2 {
        2.0 * (ss_res / (m - 2.0) / sxx).sqrt()
    } else {
        f64::INFINITY
    };
    Ok(GrowthFit {
        model,
        used,
        exponent: slope,
        band,
        r_squared,
        ln_amplitude: intercept,
    })
}

/// Convenience wrapper of [`fit_growth_log`] for linear-scale values.
pub fn fit_growth(pairs: &[(f64, f64)], model: GrowthModel) -> Result<GrowthFit> {
    let logged: Vec<(f64, f64)> = pairs
        .iter()
        .filter(|&&(_, v)| v > 0.0)
        .map(|&(n, v)| (n, v.ln()))
        .collect();
    fit_growth_log(&logged, model)
}

// ---------------------------------------------------------------------
// Shell counterexample
// ---------------------------------------------------------------------

/// Growth experiment for the shell profile `w₀(t) = |1 − t|^{−α}`:
/// the unit ball at the origin grows like `n^α` relative to Lebesgue
/// while the unit ball at distance 1 stays bounded, so their ratio (a
/// lower bound for the centered maximal operator's weak norm) grows like
/// `n^α` as well.
#[derive(Clone, Debug)]
pub struct ShellCounterexample {
    pub report: ExperimentReport,
    /// Power fit of `μ(B(0,1)) / |B(0,1)|`.
    pub origin_growth: GrowthFit,
    /// Power fit of `μ(B(0,1)) / μ(B(z,1))`, `|z| = 1`.
    pub lower_growth: GrowthFit,
    /// Limit value `(√2 − 1)^{−α} = w₀(√2)` of the off-center average.
    pub limit_target: f64,
    /// |off-center average at the last dimension − limit_target|.
    pub limit_gap: f64,
}

/// Runs the shell growth experiment over a dimension schedule.
pub fn shell_counterexample(alpha: f64, schedule: &[u32]) -> Result<ShellCounterexample> {
    let density = RadialDensity::shell(alpha)?;
    if schedule.len() < 3 || schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain(
            "shell experiment needs a strictly increasing schedule of >= 3 dimensions"
                .to_string(),
        ));
    }
    let cfg = QuadratureConfig::default();
    let rows: Vec<Result<(f64, f64)>> = schedule
        .par_iter()
        .map(|&n| {
            let origin = ball_average(&density, &BallSpec::new(n, 0.0, 1.0)?, &cfg)?.ln();
            let offset = ball_average(&density, &BallSpec::new(n, 1.0, 1.0)?, &cfg)?.ln();
            Ok((origin, offset))
        })
        .collect();

    let mut report = ExperimentReport::new("counterexample")
        .with_param("alpha", alpha)
        .with_param("density", density.name())
        .with_provenance("quadrature_rel_tol", cfg.rel_tol);
    report.set_columns(&["n", "origin_average", "offset_average", "origin_over_offset"]);

    let mut origin_pairs = Vec::new();
    let mut lower_pairs = Vec::new();
    let mut last_offset = f64::NAN;
    for (&n, row) in schedule.iter().zip(&rows) {
        let (ln_origin, ln_offset) = match row {
            Ok(v) => *v,
            Err(e) => {
                return Err(Error::Quadrature(format!(
                    "shell averages failed at n = {n}: {e}"
                )))
            }
        };
        let nf = f64::from(n);
        origin_pairs.push((nf, ln_origin));
        lower_pairs.push((nf, ln_origin - ln_offset));
        last_offset = ln_offset.exp();
        report.push_row(vec![
            nf,
            ln_origin.exp(),
            ln_offset.exp(),
            (ln_origin - ln_offset).exp(),
        ]);
    }

    let limit_target = (std::f64::consts::SQRT_2 - 1.0).powf(-alpha);
    Ok(ShellCounterexample {
        origin_growth: fit_growth_log(&origin_pairs, GrowthModel::PowerLaw)?,
        lower_growth: fit_growth_log(&lower_pairs, GrowthModel::PowerLaw)?,
        limit_target,
        limit_gap: (last_offset - limit_target).abs(),
        report,
    })
}

// ---------------------------------------------------------------------
// Power-family experiment
// ---------------------------------------------------------------------

/// Growth experiment for the dimension-coupled family `w₀(t) = t^{−αn}`:
/// the point-mass maximal lower bound grows exponentially in `n` for
/// fixed `α ∈ (0, 1)`.
#[derive(Clone, Debug)]
pub struct PowerFamilyExperiment {
    pub report: ExperimentReport,
    /// Exponential fit of the lower bound; `growth_base()` is the fitted
    /// per-dimension factor `a`.
    pub fit: GrowthFit,
}

/// Runs the power-family experiment over a dimension schedule. The
/// profile must satisfy `α < 1` so that `t^{−αn}` stays locally
/// integrable against `t^{n−1}` at every scheduled dimension.
pub fn power_family_experiment(alpha: f64, schedule: &[u32]) -> Result<PowerFamilyExperiment> {
    if schedule.len() < 3 || schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain(
            "power-family experiment needs a strictly increasing schedule of >= 3 dimensions"
                .to_string(),
        ));
    }
    // Validate the exponent up front so an out-of-range α surfaces as a
    // domain error rather than a per-dimension numeric failure.
    RadialDensity::power_family(alpha, schedule[0])?;
    let mesh = default_delta_mesh();
    let rows: Vec<Result<f64>> = schedule
        .par_iter()
        .map(|&n| {
            let density = RadialDensity::power_family(alpha, n)?;
            Ok(delta_lower_bound(&density, n, &mesh)?.estimate.ln_value)
        })
        .collect();

    let mut report = ExperimentReport::new("power-family")
        .with_param("alpha", alpha)
        .with_provenance("delta_mesh", format!("log[0.02,20]x{}", mesh.len()));
    report.set_columns(&["n", "ln_delta_lower_bound"]);
    let mut pairs = Vec::new();
    for (&n, row) in schedule.iter().zip(&rows) {
        let ln_v = match row {
            Ok(v) => *v,
            Err(e) => return Err(Error::Quadrature(format!("lower bound failed at n = {n}: {e}"))),
        };
        pairs.push((f64::from(n), ln_v));
        report.push_row(vec![f64::from(n), ln_v]);
    }
    Ok(PowerFamilyExperiment {
        fit: fit_growth_log(&pairs, GrowthModel::Exponential)?,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn growth_fit_recovers_planted_laws() {
        let power: Vec<(f64, f64)> = [10.0, 40.0, 160.0, 640.0, 2000.0]
            .iter()
            .map(|&n: &f64| (n, 3.0 * n.powf(0.5)))
            .collect();
        let fit = fit_growth(&power, GrowthModel::PowerLaw).unwrap();
        assert!((fit.exponent - 0.5).abs() < 1e-12);
        assert!((fit.ln_amplitude - 3f64.ln()).abs() < 1e-10);
        assert!(fit.r_squared > 1.0 - 1e-12);
        assert!(fit.band < 1e-10);
        assert!(fit.reliable());

        let expo: Vec<(f64, f64)> = (1..=8)
            .map(|k| {
                let n = f64::from(10 * k);
                (n, 2.0 * 1.01f64.powf(n))
            })
            .collect();
        let fit = fit_growth(&expo, GrowthModel::Exponential).unwrap();
        assert!((fit.growth_base() - 1.01).abs() < 1e-10);
    }

    #[test]
    fn growth_fit_ignores_pre_asymptotic_transients() {
        // Garbage in the first half must not contaminate the exponent.
        let mut pairs = vec![(2.0, 17.0), (4.0, 0.01), (8.0, 5.0)];
        for &n in &[100.0f64, 400.0, 1600.0] {
            pairs.push((n, 7.0 * n.powf(1.25)));
        }
        let fit = fit_growth(&pairs, GrowthModel::PowerLaw).unwrap();
        assert_eq!(fit.used.len(), 3);
        assert!((fit.exponent - 1.25).abs() < 1e-12);
    }

    #[test]
    fn growth_fit_rejects_degenerate_input() {
        assert!(matches!(
            fit_growth(&[(10.0, 1.0), (20.0, 2.0)], GrowthModel::PowerLaw),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            fit_growth(
                &[(10.0, 1.0), (10.0, 2.0), (10.0, 3.0)],
                GrowthModel::PowerLaw
            ),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn centered_tail_is_exactly_the_power_law() {
        // s = 0: the kernel is n t^{n−1}/Rⁿ on [0, R], so the lower tail
        // mass below T − ε is ((T − ε)/T)ⁿ on the nose.
        let spec = BallSpec::new(50, 0.0, 1.0).unwrap();
        let cert = approx_identity_certificate(&spec, 0.1).unwrap();
        let exact = 0.9f64.powi(50);
        assert!((cert.tail_below - exact).abs() < 1e-9 * exact);
        assert_eq!(cert.tail_above, 0.0);
        assert!(cert.mass_error < 1e-10);
        assert!(cert.min_kernel >= 0.0);
    }

    #[test]
    fn certificate_rejects_bad_windows() {
        let spec = BallSpec::new(10, 1.0, 1.0).unwrap();
        assert!(approx_identity_certificate(&spec, 0.0).is_err());
        assert!(approx_identity_certificate(&spec, 5.0).is_err());
    }

    #[test]
    fn limit_experiment_validates_shape_and_discontinuities() {
        // T = √2 on the shell singularity at 1? No — T = 1 happens at
        // (s, R) = (0, 1), exactly the singular radius of the shell.
        let shell = RadialDensity::shell(0.5).unwrap();
        assert!(matches!(
            LimitExperiment::new(shell.clone(), vec![(0.0, 1.0)], vec![10, 40], vec![0.5, 0.1]),
            Err(Error::Domain(_))
        ));
        // Away from the singularity the same density is accepted.
        assert!(LimitExperiment::new(
            shell,
            vec![(1.0, 1.0)],
            vec![10, 40],
            vec![0.5, 0.1]
        )
        .is_ok());
        let leb = RadialDensity::lebesgue();
        assert!(matches!(
            LimitExperiment::new(leb.clone(), vec![(1.0, 1.0)], vec![10, 40], vec![0.5]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            LimitExperiment::new(leb, vec![(1.0, 1.0)], vec![40, 10], vec![0.5, 0.1]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn quadratic_profile_has_the_closed_form_average() {
        // w₀ = t²: the ball average is s² + nR²/(n + 2) exactly, so the
        // error against T² = s² + R² is 2R²/(n + 2).
        let exp = LimitExperiment::new(
            RadialDensity::quadratic(),
            vec![(1.0, 1.0)],
            vec![10, 40, 160],
            vec![0.5, 0.1, 0.05],
        )
        .unwrap();
        let table = limit_table(&exp).unwrap();
        assert!(table.violations.is_empty(), "{:?}", table.violations);
        let report = table.certified().unwrap();
        let avg = report.column("average").unwrap();
        let err = report.column("abs_error").unwrap();
        for (k, &n) in [10u32, 40, 160].iter().enumerate() {
            let nf = f64::from(n);
            let closed = 1.0 + nf / (nf + 2.0);
            assert!(
                (avg[k] - closed).abs() < 1e-8,
                "n = {n}: {} vs {closed}",
                avg[k]
            );
            assert!((err[k] - 2.0 / (nf + 2.0)).abs() < 1e-8);
        }
    }

    #[test]
    fn constant_profile_converges_with_zero_error() {
        let exp = LimitExperiment::new(
            RadialDensity::constant(3.5).unwrap(),
            vec![(0.0, 1.0), (3.0, 1.0)],
            vec![10, 40],
            vec![1e-9, 1e-9],
        )
        .unwrap();
        let table = limit_table(&exp).unwrap();
        assert!(table.violations.is_empty(), "{:?}", table.violations);
        for err in table.report.column("abs_error").unwrap() {
            assert!(err < 1e-10);
        }
    }

    #[test]
    fn power_family_rejects_non_integrable_exponents() {
        assert!(matches!(
            power_family_experiment(1.0, &[10, 20, 40]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            power_family_experiment(1.3, &[10, 20, 40]),
            Err(Error::Domain(_))
        ));
    }
}
