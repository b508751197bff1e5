//! Structural constants of rotation-invariant measures, estimated from
//! below: the dyadic oscillation of the radial profile, the
//! micro-doubling / weak-doubling / combined doubling constants, the
//! Muckenhoupt `A_p` and `A_1` characteristics, an origin-ball average
//! control, and a monotone-comparability probe.
//!
//! Every supremum over continuous ball parameters is estimated the same
//! way: a log-spaced lattice of `(s, R)` (or `(s₁, s₂, R)`) combinations
//! is scanned exhaustively, then a golden-section line search refines one
//! coordinate at a time around the lattice argmax. The reported value is
//! therefore always a certified **lower bound** of the true supremum,
//! carrying the witness parameters that attain it; re-evaluating the
//! defining ratio at the witness reproduces the value.

use crate::geometry::{ball_average, ball_measure, log_lebesgue_ball, BallSpec};
use crate::{Error, QuadratureConfig, RadialDensity, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Direction of certification attached to every grid-based estimate.
pub const LOWER_BOUND_OF_SUP: &str = "lower bound of a supremum";

const GOLDEN: f64 = 0.618_033_988_749_894_9;
/// Iterations per golden-section line search; shrinks the bracket by
/// `GOLDEN^32 ≈ 2e-7` relative to the lattice spacing.
const GOLDEN_ITERS: u32 = 32;

// ---------------------------------------------------------------------
// Sweep grid
// ---------------------------------------------------------------------

/// Parameter lattice for the supremum searches: log-spaced ball radii,
/// center distances expressed as multiples of the radius, the number of
/// local-refinement cycles, and the dimensions a table-level sweep should
/// visit.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub r_count: usize,
    /// `s/R` values; each radius is paired with every multiplier.
    pub multipliers: Vec<f64>,
    /// Number of coordinate-descent refinement cycles around the lattice
    /// argmax (each cycle runs one golden-section search per coordinate).
    pub depth: u32,
    /// Dimensions visited by whole-table sweeps (individual estimators
    /// take an explicit dimension instead).
    pub dims: Vec<u32>,
}

impl SweepGrid {
    pub fn new(
        r_min: f64,
        r_max: f64,
        r_count: usize,
        multipliers: Vec<f64>,
        depth: u32,
        dims: Vec<u32>,
    ) -> Result<Self> {
        if !(r_min > 0.0 && r_max > r_min && r_min.is_finite() && r_max.is_finite()) {
            return Err(Error::Domain(format!(
                "radius range must satisfy 0 < R_min < R_max < inf, got [{r_min}, {r_max}]"
            )));
        }
        if r_count < 8 {
            return Err(Error::Domain(format!(
                "radius grid needs at least 8 points, got {r_count}"
            )));
        }
        if multipliers.is_empty() || multipliers.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
            return Err(Error::Domain(
                "center-distance multipliers must be a nonempty list of finite values >= 0"
                    .to_string(),
            ));
        }
        if dims.iter().any(|&n| n < 2) {
            return Err(Error::Domain(
                "sweep dimensions must all be >= 2".to_string(),
            ));
        }
        let mut multipliers = multipliers;
        multipliers.sort_by(f64::total_cmp);
        multipliers.dedup();
        Ok(SweepGrid {
            r_min,
            r_max,
            r_count,
            multipliers,
            depth,
            dims,
        })
    }

    /// The log-spaced radius lattice, inclusive of both endpoints.
    pub fn radii(&self) -> Vec<f64> {
        let step = self.r_step_ln();
        (0..self.r_count)
            .map(|i| (self.r_min.ln() + step * i as f64).exp())
            .collect()
    }

    /// Log-spacing of the radius lattice.
    pub fn r_step_ln(&self) -> f64 {
        (self.r_max / self.r_min).ln() / (self.r_count - 1) as f64
    }

    /// Largest gap between adjacent multipliers (the `s`-lattice spacing
    /// in units of the radius).
    pub fn mult_step(&self) -> f64 {
        self.multipliers
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
            .max(0.25)
    }

    /// Relative parameter resolution of the finest local search:
    /// the lattice spacing shrunk by the golden-section iterations.
    pub fn refined_resolution(&self) -> f64 {
        let base = self.r_step_ln().max(self.mult_step());
        if self.depth == 0 {
            base
        } else {
            base * GOLDEN.powi(GOLDEN_ITERS as i32)
        }
    }

    /// Same grid with every radius scaled by `factor` (used by the
    /// scale-invariance checks for homogeneous profiles).
    pub fn rescale_radii(&self, factor: f64) -> Self {
        let mut g = self.clone();
        g.r_min *= factor;
        g.r_max *= factor;
        g
    }

    pub fn with_depth(mut self, depth: u32) -> Self {
        self.depth = depth;
        self
    }

    /// A deliberately small lattice for smoke tests and quick sweeps.
    pub fn reduced() -> Self {
        SweepGrid::new(
            0.05,
            20.0,
            8,
            vec![0.0, 0.5, 1.0, 1.75, 2.5, 4.0],
            2,
            vec![5, 50],
        )
        .expect("reduced grid parameters are valid")
    }
}

impl Default for SweepGrid {
    /// `R ∈ [1e-2, 1e2]` with 64 log-spaced points, `s/R ∈ {0, 0.25, …, 4}`,
    /// three refinement cycles.
    fn default() -> Self {
        SweepGrid::new(
            1e-2,
            1e2,
            64,
            (0..=16).map(|k| 0.25 * k as f64).collect(),
            3,
            vec![2, 10, 50, 200, 1000],
        )
        .expect("default grid parameters are valid")
    }
}

// ---------------------------------------------------------------------
// Estimates and witnesses
// ---------------------------------------------------------------------

/// Parameters at which an extremal ratio was observed.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Witness {
    /// Dimension of the ambient space; 0 for dimension-free quantities.
    pub n: u32,
    /// Primary parameter: the center distance of the ball whose measure
    /// sits in the numerator (or the sup point for annulus ratios).
    pub s: f64,
    /// Ball radius (for annulus ratios, the annulus start).
    pub r: f64,
    /// Second center distance / inf point, when the quantity needs one.
    pub secondary: Option<f64>,
    pub note: Option<String>,
}

/// A certified lower bound of a supremum, with the witness attaining it.
///
/// For the symmetric ratio families (dyadic oscillation, the doubling
/// constants, `A_p`, `A_1`) the value is ≥ 1, because the search space
/// contains a symmetric configuration of ratio exactly 1. The origin-ball
/// control ratio is not of that kind and may legitimately sit below 1.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstantEstimate {
    pub name: String,
    /// `exp(ln_value)`; `+∞` when the supremum is witnessed to diverge.
    pub value: f64,
    pub ln_value: f64,
    pub witness: Witness,
    /// Always [`LOWER_BOUND_OF_SUP`]: grids certify one side only.
    pub certified_direction: String,
    /// Relative parameter resolution of the finest search grid.
    pub resolution: f64,
}

impl ConstantEstimate {
    fn from_ln(name: &str, ln_value: f64, witness: Witness, resolution: f64) -> Self {
        ConstantEstimate {
            name: name.to_string(),
            value: ln_value.exp(),
            ln_value,
            witness,
            certified_direction: LOWER_BOUND_OF_SUP.to_string(),
            resolution,
        }
    }
}

/// Outcome of the origin-ball average control check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HardyCheck {
    /// Worst ratio `μ(B(0,R)) / (w₀(R)·|B_R|)` over the radius grid.
    pub estimate: ConstantEstimate,
    /// Dyadic oscillation of the profile on the same grid.
    pub beta: f64,
    /// Smallest `N` with `2^N ≥ 2β`; the ratio bound is asserted for
    /// dimensions at or above this threshold.
    pub threshold_n: u32,
    /// `Some(ratio ≤ 2β)` when the queried dimension meets the threshold,
    /// `None` below it.
    pub within_bound: Option<bool>,
}

/// Outcome of the monotone-comparability probe: is there a finite `q`
/// with `w₀(t) ≤ q·w₀(s)` whenever `s ≤ t`?
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComparabilityReport {
    pub comparable: bool,
    /// Best constant observed on the finest mesh (grows without bound
    /// across mesh levels when the profile is not comparable).
    pub q: f64,
    /// The earlier point of the extremal (or violating) pair.
    pub witness_s: f64,
    /// The later point of the extremal (or violating) pair.
    pub witness_t: f64,
    /// Mesh levels evaluated before stabilization or give-up.
    pub levels: u32,
}

// ---------------------------------------------------------------------
// Search primitives
// ---------------------------------------------------------------------

/// Golden-section search for the maximum of `f` on `[a, b]`.
/// Assumes local unimodality; when that fails the result is still a
/// valid lower bound of the supremum over `[a, b]`.
fn golden_max<F>(f: &F, a: f64, b: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let (mut a, mut b) = (a, b);
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..GOLDEN_ITERS {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

/// Mesh sup/inf of the continuous representative of `w₀` on `[lo, hi]`,
/// with nodes stacked geometrically against every singular point and
/// `depth` rounds of local zoom around the running extremum.
///
/// Returns `(ln value, arg)`. For a supremum the singular points
/// themselves are excluded, so a profile blowing up inside the window
/// reports ever larger finite values as `depth` grows (the honest
/// "diverges under refinement" signal); for an infimum exact zeros are
/// kept and a vanishing profile reports `-∞`.
fn mesh_extremum(d: &RadialDensity, lo: f64, hi: f64, maximize: bool, depth: u32) -> (f64, f64) {
    debug_assert!(hi > lo);
    let span = hi - lo;
    let nodes = 64usize;
    let mut pts: Vec<f64> = (0..=nodes)
        .map(|i| lo + span * i as f64 / nodes as f64)
        .collect();
    pts.extend(d.breakpoints_in(lo, hi));
    for &p in d.singularities() {
        if p < lo - 0.1 * span || p > hi + 0.1 * span {
            continue;
        }
        for k in 0..=depth {
            let eps = span * 10f64.powi(-(2 + 2 * k as i32));
            for cand in [p - eps, p + eps] {
                if cand > lo && cand < hi {
                    pts.push(cand);
                }
            }
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();

    let scan = |pts: &[f64]| -> (usize, f64) {
        let mut bi = usize::MAX;
        let mut bv = f64::NAN;
        for (i, &t) in pts.iter().enumerate() {
            let v = d.log_w(t);
            if v.is_nan() || (maximize && v == f64::INFINITY) {
                continue;
            }
            let better = if maximize { v > bv } else { v < bv };
            if bi == usize::MAX || better {
                bi = i;
                bv = v;
            }
        }
        (bi, bv)
    };

    let (mut bi, mut bv) = scan(&pts);
    if bi == usize::MAX {
        // Nothing evaluable: report the neutral element of the extremum.
        let v = if maximize {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        };
        return (v, lo);
    }
    let mut barg = pts[bi];
    if !maximize && bv == f64::NEG_INFINITY {
        return (bv, barg); // an exact zero cannot be undercut
    }
    for _ in 0..depth {
        let a = if bi == 0 { pts[0] } else { pts[bi - 1] };
        let b = if bi + 1 == pts.len() {
            pts[pts.len() - 1]
        } else {
            pts[bi + 1]
        };
        if b <= a {
            break;
        }
        let fine = 16usize;
        pts = (0..=fine)
            .map(|i| a + (b - a) * i as f64 / fine as f64)
            .collect();
        let (i, v) = scan(&pts);
        if i == usize::MAX {
            break;
        }
        let improved = if maximize { v > bv } else { v < bv };
        if improved {
            bv = v;
            barg = pts[i];
        }
        bi = i;
        if !maximize && bv == f64::NEG_INFINITY {
            break;
        }
    }
    (bv, barg)
}

/// Running argmax with deterministic first-wins tie-breaking.
struct ScanBest<P> {
    ln: f64,
    params: Option<P>,
}

impl<P: Copy> ScanBest<P> {
    fn new() -> Self {
        ScanBest {
            ln: f64::NEG_INFINITY,
            params: None,
        }
    }
    fn update(&mut self, ln: f64, params: P) {
        if !ln.is_nan() && (self.params.is_none() || ln > self.ln) {
            self.ln = ln;
            self.params = Some(params);
        }
    }
}

fn ensure_integrable(d: &RadialDensity, n: u32) -> Result<()> {
    if f64::from(n) <= d.integrability_floor {
        return Err(Error::Domain(format!(
            "dimension {n} does not exceed the integrability floor {} of w0 = {}: \
             balls through the origin would have infinite measure",
            d.integrability_floor,
            d.name()
        )));
    }
    Ok(())
}

/// `ln μ(B(mult·R, dilate·R))` over the whole lattice, `[mult][radius]`.
fn measure_table(
    d: &RadialDensity,
    n: u32,
    radii: &[f64],
    mults: &[f64],
    dilate: f64,
    cfg: &QuadratureConfig,
) -> Result<Vec<Vec<f64>>> {
    let tasks: Vec<(usize, usize)> = (0..mults.len())
        .flat_map(|mi| (0..radii.len()).map(move |ri| (mi, ri)))
        .collect();
    let flat = tasks
        .par_iter()
        .map(|&(mi, ri)| {
            let r = radii[ri];
            let spec = BallSpec::new(n, mults[mi] * r, dilate * r)?;
            Ok(ball_measure(d, &spec, cfg)?.ln())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok((0..mults.len())
        .map(|mi| flat[mi * radii.len()..(mi + 1) * radii.len()].to_vec())
        .collect())
}

// ---------------------------------------------------------------------
// Reproduction helpers: one quadrature pass at explicit parameters.
// Estimator values are computed through these same code paths, so a
// witness always reproduces its estimate.
// ---------------------------------------------------------------------

fn micro_ratio_ln(d: &RadialDensity, n: u32, s: f64, r: f64) -> Result<f64> {
    let cfg = QuadratureConfig::default();
    let dilate = 1.0 + 1.0 / f64::from(n);
    let num = ball_measure(d, &BallSpec::new(n, s, dilate * r)?, &cfg)?;
    let den = ball_measure(d, &BallSpec::new(n, s, r)?, &cfg)?;
    Ok(num.ln() - den.ln())
}

/// `μ(B(s, (1+1/n)R)) / μ(B(s, R))`.
pub fn micro_ratio(d: &RadialDensity, n: u32, s: f64, r: f64) -> Result<f64> {
    Ok(micro_ratio_ln(d, n, s, r)?.exp())
}

fn weak_ratio_ln(d: &RadialDensity, n: u32, s_num: f64, s_den: f64, r: f64) -> Result<f64> {
    let cfg = QuadratureConfig::default();
    let num = ball_measure(d, &BallSpec::new(n, s_num, r)?, &cfg)?;
    let den = ball_measure(d, &BallSpec::new(n, s_den, r)?, &cfg)?;
    Ok(num.ln() - den.ln())
}

/// `μ(B(s_num, R)) / μ(B(s_den, R))` for two centers at distances
/// `s_num`, `s_den` from the origin.
pub fn weak_ratio(d: &RadialDensity, n: u32, s_num: f64, s_den: f64, r: f64) -> Result<f64> {
    Ok(weak_ratio_ln(d, n, s_num, s_den, r)?.exp())
}

fn strong_ratio_ln(d: &RadialDensity, n: u32, s_num: f64, s_den: f64, r: f64) -> Result<f64> {
    let cfg = QuadratureConfig::default();
    let dilate = 1.0 + 1.0 / f64::from(n);
    let num = ball_measure(d, &BallSpec::new(n, s_num, dilate * r)?, &cfg)?;
    let den = ball_measure(d, &BallSpec::new(n, s_den, r)?, &cfg)?;
    Ok(num.ln() - den.ln())
}

/// `μ(B(s_num, (1+1/n)R)) / μ(B(s_den, R))`.
pub fn strong_ratio(d: &RadialDensity, n: u32, s_num: f64, s_den: f64, r: f64) -> Result<f64> {
    Ok(strong_ratio_ln(d, n, s_num, s_den, r)?.exp())
}

fn ap_product_ln(
    d: &RadialDensity,
    dual: &RadialDensity,
    n: u32,
    p: f64,
    s: f64,
    r: f64,
) -> Result<f64> {
    let cfg = QuadratureConfig::default();
    let spec = BallSpec::new(n, s, r)?;
    let avg_w = ball_average(d, &spec, &cfg)?.ln();
    let avg_dual = match ball_average(dual, &spec, &cfg) {
        Ok(v) => v.ln(),
        Err(Error::Divergent { .. }) => f64::INFINITY,
        Err(e) => return Err(e),
    };
    Ok(avg_w + (p - 1.0) * avg_dual)
}

/// The Muckenhoupt product `avg_B(w₀) · avg_B(w₀^{1/(1-p)})^{p-1}` on the
/// ball `B(s, R)`; `+∞` when the dual average diverges on that ball.
pub fn ap_product(d: &RadialDensity, n: u32, p: f64, s: f64, r: f64) -> Result<f64> {
    let dual = d.pow(1.0 / (1.0 - p));
    Ok(ap_product_ln(d, &dual, n, p, s, r)?.exp())
}

fn a1_ratio_ln(d: &RadialDensity, n: u32, s: f64, r: f64, t_inf: f64) -> Result<f64> {
    let cfg = QuadratureConfig::default();
    let avg = ball_average(d, &BallSpec::new(n, s, r)?, &cfg)?.ln();
    Ok(avg - d.log_w(t_inf))
}

/// `avg_B(w₀) / w₀(t_inf)` where `t_inf` is the mesh infimum point of the
/// profile over the radial footprint of `B(s, R)`.
pub fn a1_ratio(d: &RadialDensity, n: u32, s: f64, r: f64, t_inf: f64) -> Result<f64> {
    Ok(a1_ratio_ln(d, n, s, r, t_inf)?.exp())
}

/// `w₀(t_sup) / w₀(t_inf)`: the point ratio reproducing an annulus
/// oscillation witness.
pub fn annulus_point_ratio(d: &RadialDensity, t_sup: f64, t_inf: f64) -> f64 {
    (d.log_w(t_sup) - d.log_w(t_inf)).exp()
}

fn hardy_ratio_ln(d: &RadialDensity, n: u32, r: f64) -> Result<f64> {
    let cfg = QuadratureConfig::default();
    let mu = ball_measure(d, &BallSpec::new(n, 0.0, r)?, &cfg)?;
    Ok(mu.ln() - d.log_w(r) - log_lebesgue_ball(n, r))
}

/// `μ(B(0,R)) / (w₀(R) · |B_R|)`: the origin-ball average measured
/// against the profile value at the boundary radius.
pub fn hardy_origin_ratio(d: &RadialDensity, n: u32, r: f64) -> Result<f64> {
    Ok(hardy_ratio_ln(d, n, r)?.exp())
}

// ---------------------------------------------------------------------
// Estimators
// ---------------------------------------------------------------------

/// Dyadic oscillation `β̂`: the largest ratio `sup w₀ / inf w₀` over the
/// annuli `[R, 2R]`, `R` from the grid, with sup/inf taken on a mesh of
/// the continuous representative. Dimension-free. When the infimum
/// vanishes on some annulus the estimate is `+∞` with that annulus as
/// witness.
pub fn dyadic_oscillation(d: &RadialDensity, grid: &SweepGrid) -> ConstantEstimate {
    // Per-annulus record: (R, (ln sup, argsup), (ln inf, arginf)).
    type AnnulusExtrema = (f64, (f64, f64), (f64, f64));
    let radii = grid.radii();
    let per: Vec<AnnulusExtrema> = radii
        .par_iter()
        .map(|&r| {
            let sup = mesh_extremum(d, r, 2.0 * r, true, grid.depth);
            let inf = mesh_extremum(d, r, 2.0 * r, false, grid.depth);
            (r, sup, inf)
        })
        .collect();

    let mut best = ScanBest::<(f64, f64, f64)>::new();
    for &(r, (sup_ln, sup_t), (inf_ln, inf_t)) in &per {
        let ratio = sup_ln - inf_ln; // +inf when inf vanishes
        if ratio.is_nan() {
            continue;
        }
        best.update(ratio, (r, sup_t, inf_t));
    }
    let (mut r, mut sup_t, mut inf_t) = best.params.expect("radius grid is nonempty");
    let mut best_ln = best.ln;

    if best_ln.is_finite() {
        // Refine the annulus start around the argmax.
        let eval = |y: f64| -> Result<f64> {
            let r = y.exp();
            let sup = mesh_extremum(d, r, 2.0 * r, true, grid.depth);
            let inf = mesh_extremum(d, r, 2.0 * r, false, grid.depth);
            Ok(sup.0 - inf.0)
        };
        let step = grid.r_step_ln();
        for _ in 0..grid.depth {
            if let Ok((y, v)) = golden_max(&eval, r.ln() - step, r.ln() + step) {
                if v > best_ln {
                    best_ln = v;
                    r = y.exp();
                    let sup = mesh_extremum(d, r, 2.0 * r, true, grid.depth);
                    let inf = mesh_extremum(d, r, 2.0 * r, false, grid.depth);
                    sup_t = sup.1;
                    inf_t = inf.1;
                }
            }
        }
    }

    let note = if best_ln == f64::INFINITY {
        "profile infimum vanishes on the annulus [R, 2R]; s/secondary are the sup/inf points"
    } else {
        "oscillation over the annulus [R, 2R]; s/secondary are the sup/inf points"
    };
    ConstantEstimate::from_ln(
        "beta_hat",
        best_ln,
        Witness {
            n: 0,
            s: sup_t,
            r,
            secondary: Some(inf_t),
            note: Some(note.to_string()),
        },
        grid.refined_resolution(),
    )
}

/// Micro-doubling constant `K̂₀(n)`: the largest measure ratio under
/// radius dilation by `1 + 1/n` at fixed center.
pub fn micro_doubling_constant(
    d: &RadialDensity,
    n: u32,
    grid: &SweepGrid,
) -> Result<ConstantEstimate> {
    ensure_integrable(d, n)?;
    let cfg = QuadratureConfig::default();
    let radii = grid.radii();
    let mults = &grid.multipliers;
    let dilate = 1.0 + 1.0 / f64::from(n);
    let base = measure_table(d, n, &radii, mults, 1.0, &cfg)?;
    let dilated = measure_table(d, n, &radii, mults, dilate, &cfg)?;

    let mut best = ScanBest::<(f64, f64)>::new();
    for (mi, &m) in mults.iter().enumerate() {
        for (ri, &r) in radii.iter().enumerate() {
            best.update(dilated[mi][ri] - base[mi][ri], (m * r, r));
        }
    }
    let (mut s, mut r) = best.params.expect("lattice is nonempty");
    let mut best_ln = best.ln;

    let eval = |s: f64, r: f64| micro_ratio_ln(d, n, s, r);
    let rstep = grid.r_step_ln();
    for _ in 0..grid.depth {
        let (y, v) = golden_max(&|y: f64| eval(s, y.exp()), r.ln() - rstep, r.ln() + rstep)?;
        if v > best_ln {
            best_ln = v;
            r = y.exp();
        }
        let delta = grid.mult_step() * r;
        let (x, v) = golden_max(&|x: f64| eval(x, r), (s - delta).max(0.0), s + delta)?;
        if v > best_ln {
            best_ln = v;
            s = x;
        }
    }

    Ok(ConstantEstimate::from_ln(
        "K0_hat",
        best_ln,
        Witness {
            n,
            s,
            r,
            secondary: None,
            note: None,
        },
        grid.refined_resolution(),
    ))
}

/// Weak-doubling constant `K̂₁(n)`: the largest ratio of the measures of
/// two balls of equal radius whose centers lie within `2R` of each other
/// (`|s₁ - s₂| < 2R` is exactly the feasibility condition for centers at
/// those distances from the origin).
pub fn weak_doubling_constant(
    d: &RadialDensity,
    n: u32,
    grid: &SweepGrid,
) -> Result<ConstantEstimate> {
    pair_constant(d, n, grid, "K1_hat", 2.0, 1.0)
}

/// Combined constant `K̂(n)`: dilated ball at one center against a plain
/// ball at a center less than `R` away.
pub fn strong_micro_constant(
    d: &RadialDensity,
    n: u32,
    grid: &SweepGrid,
) -> Result<ConstantEstimate> {
    let dilate = 1.0 + 1.0 / f64::from(n);
    pair_constant(d, n, grid, "K_hat", 1.0, dilate)
}

/// Shared engine for the two-center constants. `sep` bounds `|s₁-s₂|/R`,
/// `dilate` scales the numerator radius.
fn pair_constant(
    d: &RadialDensity,
    n: u32,
    grid: &SweepGrid,
    name: &str,
    sep: f64,
    dilate: f64,
) -> Result<ConstantEstimate> {
    ensure_integrable(d, n)?;
    let cfg = QuadratureConfig::default();
    let radii = grid.radii();
    let mults = &grid.multipliers;
    let den = measure_table(d, n, &radii, mults, 1.0, &cfg)?;
    let num = if dilate == 1.0 {
        den.clone()
    } else {
        measure_table(d, n, &radii, mults, dilate, &cfg)?
    };

    let mut best = ScanBest::<(f64, f64, f64)>::new();
    for (mi, &m_num) in mults.iter().enumerate() {
        for (mj, &m_den) in mults.iter().enumerate() {
            if (m_num - m_den).abs() >= sep {
                continue;
            }
            for (ri, &r) in radii.iter().enumerate() {
                best.update(num[mi][ri] - den[mj][ri], (m_num * r, m_den * r, r));
            }
        }
    }
    let (mut s_num, mut s_den, mut r) = best.params.expect("lattice is nonempty");
    let mut best_ln = best.ln;

    let eval = |s1: f64, s2: f64, rr: f64| -> Result<f64> {
        if dilate == 1.0 {
            weak_ratio_ln(d, n, s1, s2, rr)
        } else {
            strong_ratio_ln(d, n, s1, s2, rr)
        }
    };
    let rstep = grid.r_step_ln();
    let margin = 1.0 - 1e-12;
    for _ in 0..grid.depth {
        // Radius line: keep the separation constraint satisfied.
        let gap = (s_num - s_den).abs();
        let lo = if gap > 0.0 {
            (r.ln() - rstep).max((gap / (sep * margin)).ln())
        } else {
            r.ln() - rstep
        };
        let hi = r.ln() + rstep;
        if hi > lo {
            let (y, v) = golden_max(&|y: f64| eval(s_num, s_den, y.exp()), lo, hi)?;
            if v > best_ln {
                best_ln = v;
                r = y.exp();
            }
        }
        // Numerator-center line.
        let delta = grid.mult_step() * r;
        let lo = (s_num - delta).max(0.0).max(s_den - sep * r * margin);
        let hi = (s_num + delta).min(s_den + sep * r * margin);
        if hi > lo {
            let (x, v) = golden_max(&|x: f64| eval(x, s_den, r), lo, hi)?;
            if v > best_ln {
                best_ln = v;
                s_num = x;
            }
        }
        // Denominator-center line.
        let lo = (s_den - delta).max(0.0).max(s_num - sep * r * margin);
        let hi = (s_den + delta).min(s_num + sep * r * margin);
        if hi > lo {
            let (x, v) = golden_max(&|x: f64| eval(s_num, x, r), lo, hi)?;
            if v > best_ln {
                best_ln = v;
                s_den = x;
            }
        }
    }

    Ok(ConstantEstimate::from_ln(
        name,
        best_ln,
        Witness {
            n,
            s: s_num,
            r,
            secondary: Some(s_den),
            note: Some("s is the numerator center, secondary the denominator center".to_string()),
        },
        grid.refined_resolution(),
    ))
}

/// Muckenhoupt `A_p` characteristic over the ball grid:
/// `avg_B(w₀) · avg_B(w₀^{1/(1-p)})^{p-1}`. When the dual weight fails to
/// be integrable the estimate is `+∞` with a witness ball.
pub fn ap_constant(
    d: &RadialDensity,
    n: u32,
    p: f64,
    grid: &SweepGrid,
) -> Result<ConstantEstimate> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Domain(format!("A_p requires finite p > 1, got {p}")));
    }
    ensure_integrable(d, n)?;
    let q = 1.0 / (1.0 - p);
    let dual = d.pow(q);
    let radii = grid.radii();
    if f64::from(n) <= dual.integrability_floor {
        return Ok(ConstantEstimate::from_ln(
            "Ap_hat",
            f64::INFINITY,
            Witness {
                n,
                s: 0.0,
                r: radii[0],
                secondary: None,
                note: Some(format!(
                    "dual weight {} is not integrable near the origin in dimension {n}",
                    dual.name()
                )),
            },
            grid.refined_resolution(),
        ));
    }

    let mults = &grid.multipliers;
    let tasks: Vec<(usize, usize)> = (0..mults.len())
        .flat_map(|mi| (0..radii.len()).map(move |ri| (mi, ri)))
        .collect();
    let flat = tasks
        .par_iter()
        .map(|&(mi, ri)| ap_product_ln(d, &dual, n, p, mults[mi] * radii[ri], radii[ri]))
        .collect::<Result<Vec<f64>>>()?;

    let mut best = ScanBest::<(f64, f64)>::new();
    for (k, &(mi, ri)) in tasks.iter().enumerate() {
        best.update(flat[k], (mults[mi] * radii[ri], radii[ri]));
    }
    let (mut s, mut r) = best.params.expect("lattice is nonempty");
    let mut best_ln = best.ln;

    if best_ln.is_finite() {
        let eval = |s: f64, r: f64| ap_product_ln(d, &dual, n, p, s, r);
        let rstep = grid.r_step_ln();
        for _ in 0..grid.depth {
            let (y, v) = golden_max(&|y: f64| eval(s, y.exp()), r.ln() - rstep, r.ln() + rstep)?;
            if v > best_ln {
                best_ln = v;
                r = y.exp();
            }
            let delta = grid.mult_step() * r;
            let (x, v) = golden_max(&|x: f64| eval(x, r), (s - delta).max(0.0), s + delta)?;
            if v > best_ln {
                best_ln = v;
                s = x;
            }
        }
    }

    let note = if best_ln == f64::INFINITY {
        Some("dual-weight ball average diverges on the witness ball".to_string())
    } else {
        None
    };
    Ok(ConstantEstimate::from_ln(
        "Ap_hat",
        best_ln,
        Witness {
            n,
            s,
            r,
            secondary: None,
            note,
        },
        grid.refined_resolution(),
    ))
}

/// `A₁` characteristic over the ball grid: `avg_B(w₀) / inf_B(w₀)`, the
/// infimum taken on a refined mesh of the radial footprint
/// `[(s-R)₊, s+R]`. A vanishing infimum yields `+∞` with the ball and the
/// vanishing point as witness.
pub fn a1_constant(d: &RadialDensity, n: u32, grid: &SweepGrid) -> Result<ConstantEstimate> {
    ensure_integrable(d, n)?;
    let cfg = QuadratureConfig::default();
    let radii = grid.radii();
    let mults = &grid.multipliers;
    let avg = measure_table(d, n, &radii, mults, 1.0, &cfg)?;

    let mut best = ScanBest::<(f64, f64, f64)>::new();
    for (mi, &m) in mults.iter().enumerate() {
        for (ri, &r) in radii.iter().enumerate() {
            let s = m * r;
            let avg_ln = avg[mi][ri] - log_lebesgue_ball(n, r);
            let (inf_ln, t_inf) = mesh_extremum(d, (s - r).max(0.0), s + r, false, grid.depth);
            best.update(avg_ln - inf_ln, (s, r, t_inf));
        }
    }
    let (mut s, mut r, mut t_inf) = best.params.expect("lattice is nonempty");
    let mut best_ln = best.ln;

    if best_ln.is_finite() {
        let eval = |s: f64, r: f64| -> Result<f64> {
            let spec = BallSpec::new(n, s, r)?;
            let avg_ln = ball_average(d, &spec, &QuadratureConfig::default())?.ln();
            let (inf_ln, _) = mesh_extremum(d, (s - r).max(0.0), s + r, false, grid.depth);
            Ok(avg_ln - inf_ln)
        };
        let rstep = grid.r_step_ln();
        for _ in 0..grid.depth {
            let (y, v) = golden_max(&|y: f64| eval(s, y.exp()), r.ln() - rstep, r.ln() + rstep)?;
            if v > best_ln {
                best_ln = v;
                r = y.exp();
            }
            let delta = grid.mult_step() * r;
            let (x, v) = golden_max(&|x: f64| eval(x, r), (s - delta).max(0.0), s + delta)?;
            if v > best_ln {
                best_ln = v;
                s = x;
            }
        }
        t_inf = mesh_extremum(d, (s - r).max(0.0), s + r, false, grid.depth).1;
    }

    let note = if best_ln == f64::INFINITY {
        Some("profile vanishes at the secondary point inside the witness ball".to_string())
    } else {
        Some("secondary is the profile-infimum point inside the witness ball".to_string())
    };
    Ok(ConstantEstimate::from_ln(
        "A1_hat",
        best_ln,
        Witness {
            n,
            s,
            r,
            secondary: Some(t_inf),
            note,
        },
        grid.refined_resolution(),
    ))
}

/// Origin-ball average control: the worst ratio
/// `μ(B(0,R)) / (w₀(R)·|B_R|)` over the radius grid, reported together
/// with the dyadic oscillation `β̂` and the dimension threshold
/// (smallest `N` with `2^N ≥ 2β̂`) above which the ratio is expected to
/// stay below `2β̂`.
pub fn hardy_upper_check(d: &RadialDensity, n: u32, grid: &SweepGrid) -> Result<HardyCheck> {
    ensure_integrable(d, n)?;
    // The oscillation of a profile that blows up inside some annulus
    // never evaluates to a literal infinity on a mesh — it just keeps
    // growing as the mesh refines. Detect that by comparing two depths.
    let beta_est = dyadic_oscillation(d, grid);
    let beta_deeper = dyadic_oscillation(d, &grid.clone().with_depth(grid.depth + 1));
    if !beta_est.value.is_finite() || beta_deeper.value > 2.0 * beta_est.value {
        return Err(Error::Domain(format!(
            "origin-ball control requires a finite dyadic oscillation; w0 = {} has none \
             (mesh estimate grows from {:.3e} to {:.3e} under refinement; witness annulus \
             starts at R = {})",
            d.name(),
            beta_est.value,
            beta_deeper.value,
            beta_deeper.witness.r
        )));
    }
    let beta = beta_est.value;

    let radii = grid.radii();
    let per = radii
        .par_iter()
        .map(|&r| hardy_ratio_ln(d, n, r))
        .collect::<Result<Vec<f64>>>()?;
    let mut best = ScanBest::<f64>::new();
    for (ri, &r) in radii.iter().enumerate() {
        best.update(per[ri], r);
    }
    let mut r = best.params.expect("radius grid is nonempty");
    let mut best_ln = best.ln;

    let rstep = grid.r_step_ln();
    for _ in 0..grid.depth {
        let (y, v) = golden_max(
            &|y: f64| hardy_ratio_ln(d, n, y.exp()),
            r.ln() - rstep,
            r.ln() + rstep,
        )?;
        if v > best_ln {
            best_ln = v;
            r = y.exp();
        }
    }

    let mut threshold_n: u32 = 0;
    while (1u64 << threshold_n) < (2.0 * beta).ceil() as u64 {
        threshold_n += 1;
    }
    let estimate = ConstantEstimate::from_ln(
        "hardy_origin_ratio",
        best_ln,
        Witness {
            n,
            s: 0.0,
            r,
            secondary: None,
            note: Some(
                "ratio of the origin-ball average to the boundary profile value".to_string(),
            ),
        },
        grid.refined_resolution(),
    );
    let within_bound = if u64::from(n) >= u64::from(threshold_n) {
        Some(estimate.value <= 2.0 * beta * (1.0 + 1e-9))
    } else {
        None
    };
    Ok(HardyCheck {
        estimate,
        beta,
        threshold_n,
        within_bound,
    })
}

/// Monotone-comparability probe: searches meshes of increasing reach and
/// density for the smallest `q` with `w₀(t) ≤ q·w₀(s)` for all mesh
/// points `s ≤ t`. The meshes avoid exact singular points; `q` either
/// stabilizes (comparable, within `tol`) or keeps growing across levels
/// (not comparable; the witness pair localizes the blow-up).
pub fn decreasing_comparability(d: &RadialDensity, tol: f64) -> ComparabilityReport {
    let tol = if tol > 0.0 { tol } else { 1e-9 };
    let mut prev_q = f64::NAN;
    let mut q = f64::NAN;
    let (mut ws, mut wt) = (f64::NAN, f64::NAN);
    let max_level: u32 = 5;
    for level in 0..=max_level {
        let lo = 10f64.powi(-(2 + level as i32));
        let hi = 1e2;
        let count = 512usize << level;
        let step = (hi / lo).ln() / (count - 1) as f64;
        let mut pts: Vec<f64> = (0..count)
            .map(|i| (lo.ln() + step * i as f64).exp())
            .collect();
        pts.extend(d.breakpoints_in(lo, hi));
        for &p in d.singularities() {
            if p <= 0.0 {
                continue;
            }
            let eps = p * 10f64.powi(-(2 + 2 * level as i32));
            for cand in [p - eps, p + eps] {
                if cand > lo && cand < hi {
                    pts.push(cand);
                }
            }
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();

        let mut run_min = f64::INFINITY;
        let mut run_min_arg = f64::NAN;
        let mut best_ln = f64::NEG_INFINITY;
        let (mut bs, mut bt) = (f64::NAN, f64::NAN);
        for &t in &pts {
            let v = d.log_w(t);
            if v.is_nan() {
                continue;
            }
            if v < run_min {
                run_min = v;
                run_min_arg = t;
            }
            if v.is_finite() && run_min_arg.is_finite() {
                let ratio = v - run_min;
                if ratio > best_ln {
                    best_ln = ratio;
                    bs = run_min_arg;
                    bt = t;
                }
            }
        }
        q = best_ln.exp();
        ws = bs;
        wt = bt;
        if q.is_infinite() {
            return ComparabilityReport {
                comparable: false,
                q,
                witness_s: ws,
                witness_t: wt,
                levels: level + 1,
            };
        }
        if level > 0 && (q - prev_q).abs() <= tol * prev_q.max(1.0) {
            return ComparabilityReport {
                comparable: true,
                q,
                witness_s: ws,
                witness_t: wt,
                levels: level + 1,
            };
        }
        prev_q = q;
    }
    ComparabilityReport {
        comparable: false,
        q,
        witness_s: ws,
        witness_t: wt,
        levels: max_level + 1,
    }
}
