//! Level-set localization for finite maximal operators.
//!
//! Given a space, a radius set `T`, a function `f`, and a level `λ`, the
//! pipeline in [`run_selection`] decomposes the level set
//! `F_λ = {λ < M_T f ≤ 2λ}` into per-scale pieces: it collects the balls
//! whose average lies in `(λ, 2λ]`, shrinks each to a concentric ball
//! that still carries mass `> λμ(B)`, splits scales into parity classes,
//! disjointifies the small "core" balls around the centers, and greedily
//! selects scale classes whose cumulative normalized mass stays below 1,
//! producing pairwise disjoint point sets `A_j`, one per selected class.
//!
//! [`certify_localization`] then verifies, in exact discrete arithmetic,
//! every inequality the construction promises — through to the headline
//! bound `μ(F_λ) ≤ C₁(‖f‖₁/λ + Σ_j μ({M_j(f·χ_{A_j}) > C₂λ}))` with
//! `C₂ = 1/(2K₀)` and `C₁ = 16(1+K₀)`. The constants are assembled from
//! the construction itself: a factor 2 from the parity split, `(1+K₀)`
//! from the covering comparison, a factor 2 from absorbing the balls
//! whose restricted mass drops below half the original, and a factor 4
//! from the remaining mass window — multiplied out and rounded up to the
//! stated clean form.

use serde::Serialize;

use crate::finite::{brute_max, brute_max_radii, FiniteMetricMeasureSpace, TimeSet};
use crate::{Error, Result};

/// Additive slack for the running-sum selection constraint `Σ G ≤ 1`.
/// The sums are short combinations of weight ratios; the slack admits
/// only floating-point boundary cases, never genuinely new selections.
pub const SELECTION_SLACK: f64 = 1e-9;

/// Relative slack for measure comparisons inside certificates.
const REL_EPS: f64 = 1e-12;

/// One qualifying ball of the covering stage, with all derived data.
#[derive(Debug, Clone)]
pub struct SelectionBall {
    pub center: usize,
    /// Ball radius `R`, an element of the time set.
    pub radius: f64,
    /// Radius of the concentric heavy ball: the largest realized distance
    /// in `[R·n/(n+1), R)` whose ball still carries `|f|`-mass `> λμ(B)`,
    /// or exactly `R·n/(n+1)` when no realized distance qualifies.
    pub inner_radius: f64,
    /// Radius `R − inner_radius` of the core ball around the center.
    pub core_radius: f64,
    /// Scale block index `k` with `n^k ≤ R < n^{k+1}`.
    pub block: i64,
    /// Ball average of `|f|`, inside `(λ, 2λ]` by construction.
    pub average: f64,
    /// Ball measure `μ(B)`.
    pub mass: f64,
    /// Points of the ball, ascending by index.
    pub points: Vec<usize>,
    /// Points of the concentric heavy ball.
    pub inner_points: Vec<usize>,
    /// Points of the core ball.
    pub core_points: Vec<usize>,
    /// Core points not claimed by earlier balls in the enumeration; these
    /// sets are pairwise disjoint and their union equals the union of the
    /// cores.
    pub peeled_core: Vec<usize>,
    /// Normalized peeled mass `μ(peeled_core)/μ(B)`, the height of this
    /// ball's contribution to its class sum (supported on the heavy ball).
    pub g_height: f64,
    /// Whether the greedy class selection kept this ball.
    pub selected: bool,
}

/// Full output of [`run_selection`], kept verbose on purpose so that
/// [`certify_localization`] can replay and verify every step.
#[derive(Debug, Clone)]
pub struct SelectionState {
    pub lambda: f64,
    /// Micro parameter `n` of the time set the state was built against.
    pub micro: f64,
    /// Kept-parity balls in enumeration order: decreasing radius, ties by
    /// center index.
    pub balls: Vec<SelectionBall>,
    /// Parity (block index mod 2) of the kept scale classes; `None` when
    /// no ball qualified.
    pub kept_parity: Option<i64>,
    /// Measure of the union of cores over the kept parity.
    pub kept_core_mass: f64,
    /// Measure of the union of cores over the discarded parity.
    pub discarded_core_mass: f64,
    /// Processed block indices, decreasing.
    pub classes: Vec<i64>,
    /// Indices into `balls` of the selected members of each class.
    pub class_members: Vec<Vec<usize>>,
    /// Union of the heavy-ball supports of each class's selected balls
    /// (only balls with positive height contribute), ascending indices.
    pub class_supports: Vec<Vec<usize>>,
    /// Disjoint output sets `A_j`, one per class: the class support minus
    /// the supports of all later (smaller-scale) classes.
    pub outputs: Vec<Vec<usize>>,
}

impl SelectionState {
    pub fn selected_count(&self) -> usize {
        self.balls.iter().filter(|b| b.selected).count()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }
}

fn indices_of_cut(space: &FiniteMetricMeasureSpace, center: usize, cut: usize) -> Vec<usize> {
    let mut pts: Vec<usize> =
        space.order_row(center)[..cut].iter().map(|&q| q as usize).collect();
    pts.sort_unstable();
    pts
}

fn mass_of_indices(space: &FiniteMetricMeasureSpace, idx: &[usize]) -> f64 {
    idx.iter().map(|&q| space.weight(q)).sum()
}

/// Runs the covering/selection pipeline for the level `λ`.
///
/// Steps: (1) collect every ball `(x, r ∈ T)` with `|f|`-average in
/// `(λ, 2λ]`; (2) shrink each to its heavy concentric ball and form the
/// core ball of the leftover radius; (3) split scale blocks by parity and
/// keep the side whose cores carry more measure (ties keep odd);
/// (4) enumerate by decreasing radius (ties by center) and peel the cores
/// into disjoint sets; (5) walk scale classes from the largest block
/// downward, keeping a ball when the accumulated class sums of all
/// previously processed classes are ≤ 1 everywhere on it; (6) turn the
/// selected class supports into pairwise disjoint output sets.
///
/// An empty result (no qualifying ball) is valid and certifies an empty
/// level set.
pub fn run_selection(
    space: &FiniteMetricMeasureSpace,
    times: &TimeSet,
    f: &[f64],
    lambda: f64,
) -> Result<SelectionState> {
    space.validate_function(f)?;
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::Domain(format!("level {lambda} must be a positive finite number")));
    }
    let p = space.point_count();
    let micro = times.micro();
    let window = micro / (micro + 1.0);

    // Step 1 + 2: qualifying balls with their heavy and core companions.
    let mut raw: Vec<SelectionBall> = Vec::new();
    let mut fpre: Vec<f64> = Vec::with_capacity(p + 1);
    for x in 0..p {
        space.f_prefix_into(x, f, &mut fpre);
        let row = space.sorted_row(x);
        for &r in times.radii() {
            let cut = row.partition_point(|&v| v < r);
            let mass = space.mass_at_cut(x, cut);
            let average = fpre[cut] / mass;
            if !(average > lambda && average <= 2.0 * lambda) {
                continue;
            }
            let lo = r * window;
            let lo_cut = row.partition_point(|&v| v < lo);
            let mut inner_radius = lo;
            let mut idx = cut;
            // Largest realized distance in [lo, r) whose open ball still
            // carries mass > λμ(B); scan distinct values downward.
            while idx > lo_cut {
                let s = row[idx - 1];
                let first = row[..idx].partition_point(|&v| v < s);
                if fpre[first] > lambda * mass {
                    inner_radius = s;
                    break;
                }
                idx = first;
            }
            let inner_cut = row.partition_point(|&v| v < inner_radius);
            let core_radius = r - inner_radius;
            let core_cut = row.partition_point(|&v| v < core_radius);
            raw.push(SelectionBall {
                center: x,
                radius: r,
                inner_radius,
                core_radius,
                block: times.block_of(r),
                average,
                mass,
                points: indices_of_cut(space, x, cut),
                inner_points: indices_of_cut(space, x, inner_cut),
                core_points: indices_of_cut(space, x, core_cut),
                peeled_core: Vec::new(),
                g_height: 0.0,
                selected: false,
            });
        }
    }

    if raw.is_empty() {
        return Ok(SelectionState {
            lambda,
            micro,
            balls: Vec::new(),
            kept_parity: None,
            kept_core_mass: 0.0,
            discarded_core_mass: 0.0,
            classes: Vec::new(),
            class_members: Vec::new(),
            class_supports: Vec::new(),
            outputs: Vec::new(),
        });
    }

    // Step 3: parity split on block indices; keep the heavier core union.
    let mut mark = [vec![false; p], vec![false; p]];
    for b in &raw {
        let par = b.block.rem_euclid(2) as usize;
        for &q in &b.core_points {
            mark[par][q] = true;
        }
    }
    let union_mass = |m: &[bool]| -> f64 {
        m.iter().enumerate().filter(|&(_, &on)| on).map(|(q, _)| space.weight(q)).sum()
    };
    let even_mass = union_mass(&mark[0]);
    let odd_mass = union_mass(&mark[1]);
    let kept = if odd_mass >= even_mass { 1i64 } else { 0i64 };
    let (kept_core_mass, discarded_core_mass) =
        if kept == 1 { (odd_mass, even_mass) } else { (even_mass, odd_mass) };
    let mut balls: Vec<SelectionBall> =
        raw.into_iter().filter(|b| b.block.rem_euclid(2) == kept).collect();

    // Step 4: fixed enumeration, then disjoint core peeling.
    balls.sort_by(|a, b| {
        b.radius
            .partial_cmp(&a.radius)
            .expect("radii are finite")
            .then(a.center.cmp(&b.center))
    });
    let mut seen = vec![false; p];
    for ball in &mut balls {
        let peeled: Vec<usize> =
            ball.core_points.iter().copied().filter(|&q| !seen[q]).collect();
        for &q in &peeled {
            seen[q] = true;
        }
        ball.g_height = mass_of_indices(space, &peeled) / ball.mass;
        ball.peeled_core = peeled;
    }

    // Step 5: greedy selection over scale classes, largest block first.
    // The constraint for a class only involves the class sums of the
    // previously processed classes, so each class is decided in one batch
    // before its own heights are added.
    let mut classes: Vec<i64> = balls.iter().map(|b| b.block).collect();
    classes.sort_unstable();
    classes.dedup();
    classes.reverse();
    let mut running = vec![0.0f64; p];
    let mut class_members: Vec<Vec<usize>> = Vec::with_capacity(classes.len());
    for &k in &classes {
        let mut sel = Vec::new();
        for (i, ball) in balls.iter().enumerate() {
            if ball.block == k
                && ball.points.iter().all(|&q| running[q] <= 1.0 + SELECTION_SLACK)
            {
                sel.push(i);
            }
        }
        for &i in &sel {
            balls[i].selected = true;
        }
        for &i in &sel {
            let g = balls[i].g_height;
            if g > 0.0 {
                for &q in &balls[i].inner_points {
                    running[q] += g;
                }
            }
        }
        class_members.push(sel);
    }

    // Step 6: class supports, then disjoint outputs. Later classes (the
    // smaller scales) keep contested points.
    let mut class_supports: Vec<Vec<usize>> = Vec::with_capacity(classes.len());
    for members in &class_members {
        let mut on = vec![false; p];
        for &i in members {
            if balls[i].g_height > 0.0 {
                for &q in &balls[i].inner_points {
                    on[q] = true;
                }
            }
        }
        class_supports.push((0..p).filter(|&q| on[q]).collect());
    }
    let mut taken = vec![false; p];
    let mut outputs: Vec<Vec<usize>> = vec![Vec::new(); classes.len()];
    for j in (0..classes.len()).rev() {
        outputs[j] =
            class_supports[j].iter().copied().filter(|&q| !taken[q]).collect();
        for &q in &class_supports[j] {
            taken[q] = true;
        }
    }

    Ok(SelectionState {
        lambda,
        micro,
        balls,
        kept_parity: Some(kept),
        kept_core_mass,
        discarded_core_mass,
        classes,
        class_members,
        class_supports,
        outputs,
    })
}

/// The verified inequality suite for one selection run.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LocalizationCertificate {
    pub selected_count: usize,
    pub rejected_count: usize,
    /// Selected balls whose heavy-ball mass restricted to their class
    /// output drops to ≤ half the original; these are exempt from the
    /// pointwise threshold check.
    pub absorbed_count: usize,
    /// Measure of the disjoint core union over all kept balls.
    pub covering_lhs: f64,
    /// `(1 + K₀) ×` the core mass of the selected balls alone.
    pub covering_rhs: f64,
    /// Smallest ratio of a core point's class-restricted maximal value to
    /// the threshold `λ/(2K₀)`; infinite when no ball needed the check.
    pub threshold_margin: f64,
    /// `μ({λ < M_T f ≤ 2λ})`.
    pub headline_lhs: f64,
    /// `C₁ (‖f‖₁/λ + Σ_j μ({M_j(f·χ_{A_j}) > C₂ λ}))`.
    pub headline_rhs: f64,
    pub c1: f64,
    pub c2: f64,
}

/// Verifies every promise of [`run_selection`] in exact arithmetic:
///
/// (a) the output sets are pairwise disjoint; (b) the disjoint core union
/// of all kept balls is controlled by `(1+K₀) ×` the selected balls'
/// cores; (c) every non-absorbed selected ball's core lies inside
/// `{M_j(f·χ_{A_j}) > λ/(2K₀)}`, where `M_j` ranges over the radii of the
/// ball's own scale block; (d) the headline level-set bound with
/// `C₁ = 16(1+K₀)`, `C₂ = 1/(2K₀)`.
///
/// `k0` must dominate the space's micro-doubling constant at the time
/// set's micro parameter (pass the exact computed constant). The first
/// failed check aborts with a certificate error naming the violating
/// ball or point; measure comparisons carry a relative slack of 1e-12 to
/// absorb floating-point rounding, never a genuine inequality failure.
pub fn certify_localization(
    state: &SelectionState,
    space: &FiniteMetricMeasureSpace,
    times: &TimeSet,
    f: &[f64],
    lambda: f64,
    k0: f64,
) -> Result<LocalizationCertificate> {
    space.validate_function(f)?;
    if !k0.is_finite() || k0 < 1.0 {
        return Err(Error::Domain(format!("doubling constant {k0} must be a finite number >= 1")));
    }
    if state.lambda != lambda || state.micro != times.micro() {
        return Err(Error::Domain(
            "certificate arguments disagree with the recorded selection state".to_string(),
        ));
    }
    let p = space.point_count();

    // Replay guard: the recorded averages and the greedy constraint must
    // be reproducible from (space, f, λ); a mismatch means the state was
    // built against different data.
    for ball in &state.balls {
        let mut num = 0.0;
        for &q in &ball.points {
            num += f[q].abs() * space.weight(q);
        }
        let avg = num / ball.mass;
        let tol = 1e-9 * lambda;
        if !(avg > lambda - tol && avg <= 2.0 * lambda + tol) {
            return Err(Error::Certificate(format!(
                "recorded ball (center {}, radius {}) has average {avg} outside ({lambda}, {}]",
                ball.center,
                ball.radius,
                2.0 * lambda
            )));
        }
    }
    let mut running = vec![0.0f64; p];
    for (ci, members) in state.class_members.iter().enumerate() {
        for (i, ball) in state.balls.iter().enumerate() {
            if ball.block != state.classes[ci] {
                continue;
            }
            let admissible =
                ball.points.iter().all(|&q| running[q] <= 1.0 + SELECTION_SLACK);
            if admissible != ball.selected || (ball.selected != members.contains(&i)) {
                return Err(Error::Certificate(format!(
                    "selection replay disagrees at ball (center {}, radius {})",
                    ball.center, ball.radius
                )));
            }
        }
        for &i in members {
            let g = state.balls[i].g_height;
            if g > 0.0 {
                for &q in &state.balls[i].inner_points {
                    running[q] += g;
                }
            }
        }
    }

    // (a) Output sets pairwise disjoint.
    let mut owner = vec![usize::MAX; p];
    for (j, out) in state.outputs.iter().enumerate() {
        for &q in out {
            if owner[q] != usize::MAX {
                return Err(Error::Certificate(format!(
                    "output sets {} and {j} share point {q}",
                    owner[q]
                )));
            }
            owner[q] = j;
        }
    }

    // (b) Core covering: the peeled cores tile the full core union, and
    // the selected balls' share controls the whole of it.
    let mut seen = vec![false; p];
    let mut covering_lhs = 0.0f64;
    let mut selected_core = 0.0f64;
    for ball in &state.balls {
        for &q in &ball.peeled_core {
            if seen[q] {
                return Err(Error::Certificate(format!(
                    "peeled cores overlap at point {q} (ball center {}, radius {})",
                    ball.center, ball.radius
                )));
            }
            seen[q] = true;
        }
        let m = mass_of_indices(space, &ball.peeled_core);
        covering_lhs += m;
        if ball.selected {
            selected_core += m;
        }
    }
    for ball in &state.balls {
        if let Some(&q) = ball.core_points.iter().find(|&&q| !seen[q]) {
            return Err(Error::Certificate(format!(
                "core point {q} of ball (center {}, radius {}) missing from the peeled union",
                ball.center, ball.radius
            )));
        }
    }
    let covering_rhs = (1.0 + k0) * selected_core;
    if covering_lhs > covering_rhs * (1.0 + REL_EPS) {
        return Err(Error::Certificate(format!(
            "core covering fails: union mass {covering_lhs} exceeds (1+K0) x selected mass {covering_rhs}"
        )));
    }

    // (c) Per-class threshold inclusion for non-absorbed selected balls,
    // collecting the class level-set masses for (d) along the way.
    let threshold = lambda / (2.0 * k0);
    let mut threshold_margin = f64::INFINITY;
    let mut absorbed_count = 0usize;
    let mut level_mass_sum = 0.0f64;
    let mut masked = vec![0.0f64; p];
    for (ci, &k) in state.classes.iter().enumerate() {
        let out = &state.outputs[ci];
        masked.iter_mut().for_each(|v| *v = 0.0);
        for &q in out {
            masked[q] = f[q];
        }
        let block_radii = times.block_radii(k);
        let m_block = brute_max_radii(space, &block_radii, &masked)?;
        level_mass_sum += (0..p)
            .filter(|&q| m_block[q] > threshold)
            .map(|q| space.weight(q))
            .sum::<f64>();
        for &i in &state.class_members[ci] {
            let ball = &state.balls[i];
            let mut restricted = 0.0;
            for &q in &ball.inner_points {
                if owner[q] == ci {
                    restricted += f[q].abs() * space.weight(q);
                }
            }
            if restricted <= 0.5 * lambda * ball.mass {
                absorbed_count += 1;
                continue;
            }
            for &z in &ball.core_points {
                if m_block[z] <= threshold * (1.0 - REL_EPS) {
                    return Err(Error::Certificate(format!(
                        "threshold fails at point {z} of ball (center {}, radius {}): \
                         restricted maximal value {} vs {threshold}",
                        ball.center, ball.radius, m_block[z]
                    )));
                }
                threshold_margin = threshold_margin.min(m_block[z] / threshold);
            }
        }
    }

    // (d) Headline level-set bound over the full time set.
    let c1 = 16.0 * (1.0 + k0);
    let c2 = 1.0 / (2.0 * k0);
    let m_full = brute_max(space, times, f)?;
    let headline_lhs = (0..p)
        .filter(|&q| m_full[q] > lambda && m_full[q] <= 2.0 * lambda)
        .map(|q| space.weight(q))
        .sum::<f64>();
    let l1: f64 = f.iter().zip(space.weights()).map(|(v, w)| v.abs() * w).sum();
    let headline_rhs = c1 * (l1 / lambda + level_mass_sum);
    if headline_lhs > headline_rhs * (1.0 + REL_EPS) {
        return Err(Error::Certificate(format!(
            "headline bound fails: level-set mass {headline_lhs} exceeds {headline_rhs}"
        )));
    }

    let selected_count = state.selected_count();
    Ok(LocalizationCertificate {
        selected_count,
        rejected_count: state.balls.len() - selected_count,
        absorbed_count,
        covering_lhs,
        covering_rhs,
        threshold_margin,
        headline_lhs,
        headline_rhs,
        c1,
        c2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_function_yields_an_empty_state() {
        let space = FiniteMetricMeasureSpace::integer_line(&[1.0, 1.0, 1.0]).unwrap();
        let times = TimeSet::new(vec![1.5, 2.5], 2.0).unwrap();
        let state = run_selection(&space, &times, &[0.0, 0.0, 0.0], 1.0).unwrap();
        assert!(state.is_empty());
        assert_eq!(state.kept_parity, None);
        let cert =
            certify_localization(&state, &space, &times, &[0.0, 0.0, 0.0], 1.0, 2.0).unwrap();
        assert_eq!(cert.selected_count, 0);
        assert_eq!(cert.headline_lhs, 0.0);
        assert!(cert.threshold_margin.is_infinite());
    }

    #[test]
    fn two_point_point_mass_hand_trace() {
        // Points {0, 1} at distance 1, weights (1, 3), one radius 0.5,
        // micro parameter 2, point mass at 0, level 0.6.
        let space =
            FiniteMetricMeasureSpace::new(2, vec![0.0, 1.0, 1.0, 0.0], vec![1.0, 3.0]).unwrap();
        let times = TimeSet::new(vec![0.5], 2.0).unwrap();
        let f = [1.0, 0.0];
        let k0 = crate::finite::discrete_constants(&space, 2.0).unwrap().micro_doubling;
        assert_eq!(k0, 4.0); // B(0, 1.5) has mass 4, B(0, 1) has mass 1.

        let state = run_selection(&space, &times, &f, 0.6).unwrap();
        assert_eq!(state.balls.len(), 1);
        let ball = &state.balls[0];
        assert_eq!(ball.center, 0);
        assert_eq!(ball.average, 1.0);
        assert_eq!(ball.block, -1); // 0.5 lies in [2^-1, 2^0).
        assert_eq!(state.kept_parity, Some(1));
        // No realized distance falls in [1/3, 1/2), so the fallback inner
        // radius R·n/(n+1) applies exactly.
        assert_eq!(ball.inner_radius, 0.5 * (2.0 / 3.0));
        assert_eq!(ball.inner_points, vec![0]);
        assert_eq!(ball.core_points, vec![0]);
        assert_eq!(ball.g_height, 1.0);
        assert!(ball.selected);
        // The single output class is the heavy-ball support.
        assert_eq!(state.outputs, vec![vec![0]]);
        assert_eq!(state.kept_core_mass, 1.0);
        assert_eq!(state.discarded_core_mass, 0.0);

        let cert = certify_localization(&state, &space, &times, &f, 0.6, k0).unwrap();
        assert_eq!(cert.selected_count, 1);
        assert_eq!(cert.rejected_count, 0);
        assert_eq!(cert.absorbed_count, 0);
        assert_eq!(cert.covering_lhs, 1.0);
        assert_eq!(cert.covering_rhs, 5.0);
        // M restricted to the class and output is 1 at point 0; threshold
        // is 0.6/8.
        assert!((cert.threshold_margin - 1.0 / 0.075).abs() < 1e-12);
        assert_eq!(cert.headline_lhs, 1.0);
        assert_eq!(cert.c1, 80.0);
        assert_eq!(cert.c2, 0.125);
    }

    #[test]
    fn certification_rejects_mismatched_data() {
        let space = FiniteMetricMeasureSpace::integer_line(&[1.0; 5]).unwrap();
        let times = TimeSet::new(vec![1.5], 2.0).unwrap();
        let f = [0.0, 0.0, 3.0, 0.0, 0.0];
        let state = run_selection(&space, &times, &f, 0.8).unwrap();
        assert!(!state.is_empty());
        // Same level, different function: the recorded averages no longer
        // reproduce.
        let err =
            certify_localization(&state, &space, &times, &[0.0; 5], 0.8, 2.0).unwrap_err();
        assert!(matches!(err, Error::Certificate(_)));
        // Different level: rejected before any arithmetic.
        let err = certify_localization(&state, &space, &times, &f, 0.9, 2.0).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn parity_split_keeps_the_heavier_side() {
        // Two scales in different parity blocks: radius 1.5 (block 0) and
        // radius 2.5 (block 1) against micro 2.
        let space = FiniteMetricMeasureSpace::integer_line(&[1.0; 9]).unwrap();
        let times = TimeSet::new(vec![1.5, 2.5], 2.0).unwrap();
        let f = [0.0, 0.0, 0.0, 0.0, 5.0, 0.0, 0.0, 0.0, 0.0];
        for lambda in [0.4, 0.7, 1.1] {
            let state = run_selection(&space, &times, &f, lambda).unwrap();
            if state.is_empty() {
                continue;
            }
            assert!(state.kept_core_mass >= state.discarded_core_mass);
            let k0 = crate::finite::discrete_constants(&space, 2.0).unwrap().micro_doubling;
            certify_localization(&state, &space, &times, &f, lambda, k0).unwrap();
        }
    }
}
