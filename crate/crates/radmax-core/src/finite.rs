//! Finite metric measure spaces with exact maximal-operator machinery.
//!
//! Everything in this module is brute force and exact at f64 resolution:
//! balls are read off per-center sorted distance tables, operator values
//! are plain weighted averages, and doubling-type constants are true
//! maxima over the finite set of radii where ball configurations change
//! (open balls `{d < r}` only change as `r` crosses a realized distance,
//! so a finite candidate list exhausts the supremum over all real radii).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::report::ExperimentReport;
use crate::{Error, Result};

/// Hard cap on the point count; every constructor enforces it. All
/// verification loops (triangle inequality, pair scans) are cubic, so the
/// cap keeps construction and the exact constants affordable.
pub const MAX_POINTS: usize = 300;

/// Relative tolerance for the triangle-inequality check, scaled by the
/// largest distance. Distances produced by embedding points in a normed
/// space carry rounding of a few ulps; this absorbs it without accepting
/// genuinely broken metrics.
const TRIANGLE_SLACK: f64 = 1e-9;

/// A finite metric measure space: points `0..P`, a symmetric distance
/// matrix, and strictly positive point weights.
///
/// Balls are open: `B(x, r) = {y : d(x, y) < r}`. Construction verifies
/// symmetry, the zero diagonal, the triangle inequality over all ordered
/// triples, and weight positivity, then freezes per-center distance-sorted
/// index tables with weight prefix sums so ball masses are O(log P).
#[derive(Debug, Clone)]
pub struct FiniteMetricMeasureSpace {
    points: usize,
    dist: Vec<f64>,
    weights: Vec<f64>,
    /// Per-center permutation of `0..P` by ascending distance, ties by index.
    order: Vec<u32>,
    /// Distances in the order above, one row per center.
    sorted_dist: Vec<f64>,
    /// Prefix sums of weights in the order above; row length `P + 1`.
    mass_prefix: Vec<f64>,
    total: f64,
}

impl FiniteMetricMeasureSpace {
    /// Builds a space from a row-major `P×P` distance matrix and a weight
    /// vector, verifying every structural invariant.
    pub fn new(points: usize, dist: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if points == 0 {
            return Err(Error::Space("a space needs at least one point".to_string()));
        }
        if points > MAX_POINTS {
            return Err(Error::Space(format!(
                "{points} points exceed the supported maximum of {MAX_POINTS}"
            )));
        }
        if dist.len() != points * points {
            return Err(Error::Space(format!(
                "distance matrix has {} entries, expected {}",
                dist.len(),
                points * points
            )));
        }
        if weights.len() != points {
            return Err(Error::Space(format!(
                "{} weights for {} points",
                weights.len(),
                points
            )));
        }
        for (i, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::Space(format!("weight {w} at point {i} is not positive")));
            }
        }
        let mut dmax = 0.0f64;
        for i in 0..points {
            for j in 0..points {
                let d = dist[i * points + j];
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::Space(format!("distance {d} at ({i}, {j})")));
                }
                if i == j && d != 0.0 {
                    return Err(Error::Space(format!("nonzero self-distance {d} at point {i}")));
                }
                if dist[j * points + i] != d {
                    return Err(Error::Space(format!(
                        "asymmetric distances at ({i}, {j}): {d} vs {}",
                        dist[j * points + i]
                    )));
                }
                dmax = dmax.max(d);
            }
        }
        let slack = TRIANGLE_SLACK * dmax;
        for i in 0..points {
            for k in (i + 1)..points {
                let direct = dist[i * points + k];
                for j in 0..points {
                    if dist[i * points + j] + dist[j * points + k] + slack < direct {
                        return Err(Error::Space(format!(
                            "triangle inequality fails: d({i},{k}) = {direct} > d({i},{j}) + d({j},{k}) = {}",
                            dist[i * points + j] + dist[j * points + k]
                        )));
                    }
                }
            }
        }

        let mut order = vec![0u32; points * points];
        let mut sorted_dist = vec![0.0; points * points];
        let mut mass_prefix = vec![0.0; points * (points + 1)];
        for x in 0..points {
            let row = &dist[x * points..(x + 1) * points];
            let perm = &mut order[x * points..(x + 1) * points];
            for (k, slot) in perm.iter_mut().enumerate() {
                *slot = k as u32;
            }
            perm.sort_unstable_by(|&a, &b| {
                row[a as usize]
                    .partial_cmp(&row[b as usize])
                    .expect("distances are finite")
                    .then(a.cmp(&b))
            });
            let mut acc = 0.0;
            for (k, &q) in perm.iter().enumerate() {
                sorted_dist[x * points + k] = row[q as usize];
                acc += weights[q as usize];
                mass_prefix[x * (points + 1) + k + 1] = acc;
            }
        }
        let total = mass_prefix[points]; // row 0 ends at the full mass
        Ok(Self { points, dist, weights, order, sorted_dist, mass_prefix, total })
    }

    /// Equally spaced points on a line (`d(i, j) = |i - j|`) with the given
    /// weights.
    pub fn integer_line(weights: &[f64]) -> Result<Self> {
        let p = weights.len();
        let mut dist = vec![0.0; p * p];
        for i in 0..p {
            for j in 0..p {
                dist[i * p + j] = (i as f64 - j as f64).abs();
            }
        }
        Self::new(p, dist, weights.to_vec())
    }

    /// The unit hypercube `{0,1}^dim` with the square-root Hamming metric
    /// and unit weights: a grid-like family whose natural dimension grows
    /// with `dim` while the point count stays `2^dim`.
    pub fn hypercube(dim: u32) -> Result<Self> {
        if dim == 0 || dim > 8 {
            return Err(Error::Space(format!(
                "hypercube dimension {dim} outside 1..=8 (point count is 2^dim)"
            )));
        }
        let p = 1usize << dim;
        let mut dist = vec![0.0; p * p];
        for i in 0..p {
            for j in 0..p {
                dist[i * p + j] = f64::from((i ^ j).count_ones()).sqrt();
            }
        }
        Self::new(p, dist, vec![1.0; p])
    }

    /// Seeded random instance: `points` points drawn uniformly from
    /// `[0, 4)^ambient` with Euclidean distances and weights in `[0.25, 4)`.
    pub fn random_euclidean(seed: u64, points: usize, ambient: usize) -> Result<Self> {
        if !(1..=8).contains(&ambient) {
            return Err(Error::Space(format!("ambient dimension {ambient} outside 1..=8")));
        }
        if points == 0 || points > MAX_POINTS {
            return Err(Error::Space(format!("point count {points} outside 1..={MAX_POINTS}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coords: Vec<f64> = (0..points * ambient).map(|_| rng.gen_range(0.0..4.0)).collect();
        let weights: Vec<f64> = (0..points).map(|_| rng.gen_range(0.25..4.0)).collect();
        let mut dist = vec![0.0; points * points];
        for i in 0..points {
            for j in (i + 1)..points {
                let mut s = 0.0;
                for a in 0..ambient {
                    let dd = coords[i * ambient + a] - coords[j * ambient + a];
                    s += dd * dd;
                }
                let d = s.sqrt();
                dist[i * points + j] = d;
                dist[j * points + i] = d;
            }
        }
        Self::new(points, dist, weights)
    }

    pub fn point_count(&self) -> usize {
        self.points
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.points + j]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_mass(&self) -> f64 {
        self.total
    }

    pub(crate) fn sorted_row(&self, center: usize) -> &[f64] {
        &self.sorted_dist[center * self.points..(center + 1) * self.points]
    }

    pub(crate) fn order_row(&self, center: usize) -> &[u32] {
        &self.order[center * self.points..(center + 1) * self.points]
    }

    /// Number of points strictly inside radius `r` around `center`.
    pub(crate) fn cut(&self, center: usize, r: f64) -> usize {
        self.sorted_row(center).partition_point(|&v| v < r)
    }

    pub(crate) fn mass_at_cut(&self, center: usize, cut: usize) -> f64 {
        self.mass_prefix[center * (self.points + 1) + cut]
    }

    /// Measure of the open ball `B(center, r)`.
    pub fn ball_mass(&self, center: usize, r: f64) -> f64 {
        self.mass_at_cut(center, self.cut(center, r))
    }

    /// Points of the open ball `B(center, r)`, ascending by index.
    pub fn ball_points(&self, center: usize, r: f64) -> Vec<usize> {
        let cut = self.cut(center, r);
        let mut pts: Vec<usize> =
            self.order_row(center)[..cut].iter().map(|&q| q as usize).collect();
        pts.sort_unstable();
        pts
    }

    /// Sorted distinct positive distances realized anywhere in the space.
    pub fn distinct_distances(&self) -> Vec<f64> {
        let mut vals: Vec<f64> = self.dist.iter().copied().filter(|&d| d > 0.0).collect();
        vals.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite"));
        vals.dedup();
        vals
    }

    /// Prefix sums of `|f|·w` along the center's distance-sorted order.
    pub(crate) fn f_prefix_into(&self, center: usize, f: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.push(0.0);
        let mut acc = 0.0;
        for &q in self.order_row(center) {
            let q = q as usize;
            acc += f[q].abs() * self.weights[q];
            out.push(acc);
        }
    }

    pub(crate) fn validate_function(&self, f: &[f64]) -> Result<()> {
        if f.len() != self.points {
            return Err(Error::Domain(format!(
                "function has {} values for {} points",
                f.len(),
                self.points
            )));
        }
        if let Some(bad) = f.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("function value at point {bad} is not finite")));
        }
        Ok(())
    }
}

/// A finite set of radii for a maximal operator, together with the
/// micro-parameter `n > 1` that defines the scale blocks `[n^k, n^{k+1})`
/// and an optional declared lacunarity constant.
#[derive(Debug, Clone)]
pub struct TimeSet {
    radii: Vec<f64>,
    micro: f64,
    lacunarity: Option<f64>,
}

impl TimeSet {
    /// Radii must be finite, positive, and strictly increasing; the micro
    /// parameter must be a finite number `> 1`.
    pub fn new(radii: Vec<f64>, micro: f64) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::Domain("a time set needs at least one radius".to_string()));
        }
        for &r in &radii {
            if !r.is_finite() || r <= 0.0 {
                return Err(Error::Domain(format!("radius {r} is not a positive finite number")));
            }
        }
        if radii.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("radii must be strictly increasing".to_string()));
        }
        if !micro.is_finite() || micro <= 1.0 {
            return Err(Error::Domain(format!(
                "micro parameter {micro} must be a finite number > 1"
            )));
        }
        Ok(Self { radii, micro, lacunarity: None })
    }

    /// Declares a lacunarity constant `a > 1` and re-verifies it: each
    /// radius must exceed `a` times its predecessor.
    pub fn with_lacunarity(mut self, a: f64) -> Result<Self> {
        if !a.is_finite() || a <= 1.0 {
            return Err(Error::Domain(format!("lacunarity constant {a} must be > 1")));
        }
        for (i, w) in self.radii.windows(2).enumerate() {
            if w[1] <= a * w[0] {
                return Err(Error::Domain(format!(
                    "declared lacunarity {a} fails between radii {} and {} (index {i})",
                    w[0], w[1]
                )));
            }
        }
        self.lacunarity = Some(a);
        Ok(self)
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn micro(&self) -> f64 {
        self.micro
    }

    pub fn lacunarity(&self) -> Option<f64> {
        self.lacunarity
    }

    /// Block index `k` with `n^k ≤ r < n^{k+1}`, resolved in log space so
    /// extreme magnitudes stay in range.
    pub fn block_of(&self, r: f64) -> i64 {
        let lnn = self.micro.ln();
        let lnr = r.ln();
        let mut k = (lnr / lnn).floor() as i64;
        while (k as f64) * lnn > lnr {
            k -= 1;
        }
        while ((k + 1) as f64) * lnn <= lnr {
            k += 1;
        }
        k
    }

    /// Radii that fall in block `k`, in increasing order.
    pub fn block_radii(&self, k: i64) -> Vec<f64> {
        self.radii.iter().copied().filter(|&r| self.block_of(r) == k).collect()
    }

    /// Distinct block indices realized by the radii, increasing.
    pub fn blocks(&self) -> Vec<i64> {
        let mut ks: Vec<i64> = self.radii.iter().map(|&r| self.block_of(r)).collect();
        ks.dedup();
        ks
    }

    /// True when no block contains two radii (the lacunary regime where
    /// per-block operators degenerate to single radii).
    pub fn one_radius_per_block(&self) -> bool {
        let ks: Vec<i64> = self.radii.iter().map(|&r| self.block_of(r)).collect();
        ks.windows(2).all(|w| w[0] != w[1])
    }
}

/// Exact maximal function over an explicit radius list: at each point the
/// largest weighted average of `|f|` over the open balls with those radii.
pub fn brute_max_radii(
    space: &FiniteMetricMeasureSpace,
    radii: &[f64],
    f: &[f64],
) -> Result<Vec<f64>> {
    space.validate_function(f)?;
    if radii.is_empty() {
        return Err(Error::Domain("maximal operator needs at least one radius".to_string()));
    }
    for &r in radii {
        if !r.is_finite() || r <= 0.0 {
            return Err(Error::Domain(format!("radius {r} is not a positive finite number")));
        }
    }
    let p = space.point_count();
    let mut out = Vec::with_capacity(p);
    let mut fpre = Vec::with_capacity(p + 1);
    for x in 0..p {
        space.f_prefix_into(x, f, &mut fpre);
        let row = space.sorted_row(x);
        let mut best = 0.0f64;
        for &r in radii {
            let cut = row.partition_point(|&v| v < r);
            // The center itself sits at distance zero, so the ball is never
            // empty and the mass prefix is strictly positive.
            let avg = fpre[cut] / space.mass_at_cut(x, cut);
            if avg > best {
                best = avg;
            }
        }
        out.push(best);
    }
    Ok(out)
}

/// Exact maximal function over the radii of a time set.
pub fn brute_max(
    space: &FiniteMetricMeasureSpace,
    times: &TimeSet,
    f: &[f64],
) -> Result<Vec<f64>> {
    brute_max_radii(space, times.radii(), f)
}

/// The three doubling-type constants of a finite space at micro
/// parameter `n`, each an exact maximum of its defining ratio over all
/// real radii (evaluated on the finite set of radii where the ball pair
/// changes).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteConstants {
    /// Largest `μ(B(x, (1+1/n)r)) / μ(B(x, r))` over centers and radii.
    pub micro_doubling: f64,
    /// Largest `μ(B(y, r)) / μ(B(x, r))` over intersecting equal-radius
    /// pairs.
    pub weak_doubling: f64,
    /// Largest `μ(B(y, (1+1/n)r)) / μ(B(x, r))` over `y ∈ B(x, r)`.
    pub strong: f64,
}

/// Computes [`DiscreteConstants`] for micro parameter `n ≥ 1`.
///
/// Open balls change only as the radius crosses a realized distance, so
/// each supremum is attained on an explicit finite candidate list:
/// per-center distances and their images under division by `1 + 1/n`.
/// Candidates are tracked as (inner radius, outer radius) pairs so that
/// whichever side generated the candidate is evaluated without a lossy
/// round trip through multiplication and division.
pub fn discrete_constants(space: &FiniteMetricMeasureSpace, n: f64) -> Result<DiscreteConstants> {
    if !n.is_finite() || n < 1.0 {
        return Err(Error::Domain(format!("micro parameter {n} must be a finite number >= 1")));
    }
    let dilate = 1.0 + 1.0 / n;
    let p = space.point_count();

    let mut k0 = 1.0f64;
    for x in 0..p {
        let row = space.sorted_row(x);
        let mut prev = f64::NAN;
        for &s in row {
            if s <= 0.0 || s == prev {
                continue;
            }
            prev = s;
            for (inner_r, outer_r) in [(s, s * dilate), (s / dilate, s)] {
                let inner = space.mass_at_cut(x, space.cut(x, inner_r));
                if inner <= 0.0 {
                    continue;
                }
                let outer = space.mass_at_cut(x, space.cut(x, outer_r));
                k0 = k0.max(outer / inner);
            }
        }
    }

    let mut k1 = 1.0f64;
    let mut strong = 1.0f64;
    let mut merged: Vec<f64> = Vec::with_capacity(2 * p);
    let mut cands: Vec<(f64, f64)> = Vec::with_capacity(2 * p);
    for x in 0..p {
        let rx = space.sorted_row(x);
        for y in 0..p {
            let ry = space.sorted_row(y);
            let d = space.distance(x, y);

            // Strong constant: y must lie in the inner ball, i.e. r > d.
            cands.clear();
            for &s in rx {
                if s > d {
                    cands.push((s, s * dilate));
                }
            }
            for &s in ry {
                let q = s / dilate;
                if q > d {
                    cands.push((q, s));
                }
            }
            cands.sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
            let mut cut_x = 0usize;
            for &(inner_r, outer_r) in cands.iter() {
                while cut_x < p && rx[cut_x] < inner_r {
                    cut_x += 1;
                }
                let inner = space.mass_at_cut(x, cut_x);
                if inner <= 0.0 {
                    continue;
                }
                let outer = space.mass_at_cut(y, space.cut(y, outer_r));
                strong = strong.max(outer / inner);
            }

            if y == x {
                continue;
            }

            // Weak constant: the two equal-radius balls must intersect,
            // i.e. r exceeds the smallest max(d(x,w), d(y,w)).
            let mut rstar = f64::INFINITY;
            for w in 0..p {
                let m = space.distance(x, w).max(space.distance(y, w));
                if m < rstar {
                    rstar = m;
                }
            }
            merged.clear();
            merged.extend(rx.iter().copied().filter(|&s| s > rstar));
            merged.extend(ry.iter().copied().filter(|&s| s > rstar));
            merged.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite"));
            merged.dedup();
            let mut cut_x = rx.partition_point(|&v| v <= rstar);
            let mut cut_y = ry.partition_point(|&v| v <= rstar);
            // Positions above start at the first entry > rstar; walking the
            // merged candidates keeps both cuts monotone.
            cut_x = cut_x.min(p);
            cut_y = cut_y.min(p);
            let mut ix = cut_x;
            let mut iy = cut_y;
            for &r in merged.iter() {
                while ix < p && rx[ix] < r {
                    ix += 1;
                }
                while iy < p && ry[iy] < r {
                    iy += 1;
                }
                let inner = space.mass_at_cut(x, ix);
                if inner <= 0.0 {
                    continue;
                }
                k1 = k1.max(space.mass_at_cut(y, iy) / inner);
            }
        }
    }

    Ok(DiscreteConstants { micro_doubling: k0, weak_doubling: k1, strong })
}

/// The exact `L¹(μ) → L¹(μ)` operator norm of the single-radius averaging
/// operator, with the radius-local weak-doubling bound it must respect.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleRadiusNorm {
    /// The operator norm: the largest adjoint column sum
    /// `Σ_{x ∈ B(y,r)} w(x) / μ(B(x,r))` over points `y`.
    pub norm: f64,
    /// Largest `μ(B(y,r)) / μ(B(x,r))` over intersecting pairs at this
    /// radius; the norm never exceeds it.
    pub weak_bound: f64,
    /// A point attaining the norm.
    pub witness: usize,
}

/// Computes the exact `L¹` norm of `f ↦ (1/μ(B(x,r))) ∫_{B(x,r)} |f| dμ`.
///
/// Averaging against a fixed radius is linear on nonnegative functions,
/// so the norm is attained at a point mass and equals the largest adjoint
/// column sum of the averaging kernel.
///
/// # Panics
///
/// Panics if the computed norm exceeds the radius-local weak-doubling
/// bound, which a duality argument rules out for every valid space.
pub fn single_radius_l1(space: &FiniteMetricMeasureSpace, r: f64) -> Result<SingleRadiusNorm> {
    if !r.is_finite() || r <= 0.0 {
        return Err(Error::Domain(format!("radius {r} is not a positive finite number")));
    }
    let p = space.point_count();
    let mut column = vec![0.0f64; p];
    for x in 0..p {
        let cut = space.cut(x, r);
        let share = space.weight(x) / space.mass_at_cut(x, cut);
        for &q in &space.order_row(x)[..cut] {
            column[q as usize] += share;
        }
    }
    let (witness, &norm) = column
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite").then(b.0.cmp(&a.0)))
        .expect("at least one point");

    let mut weak_bound = 1.0f64;
    for x in 0..p {
        let inner = space.ball_mass(x, r);
        for y in 0..p {
            let intersects = (0..p)
                .any(|w| space.distance(x, w) < r && space.distance(y, w) < r);
            if intersects {
                weak_bound = weak_bound.max(space.ball_mass(y, r) / inner);
            }
        }
    }
    assert!(
        norm <= weak_bound * (1.0 + 1e-12),
        "column sum {norm} exceeds the weak-doubling bound {weak_bound}"
    );
    Ok(SingleRadiusNorm { norm, weak_bound, witness })
}

/// `sup_{λ>0} λ·μ({m > λ})` for a nonnegative function given by its
/// values: the best weak-type functional over all levels, attained as
/// `max_v v·μ({m ≥ v})` over the distinct positive values `v`.
fn level_functional(space: &FiniteMetricMeasureSpace, m: &[f64]) -> f64 {
    let p = space.point_count();
    let mut idx: Vec<usize> = (0..p).collect();
    idx.sort_unstable_by(|&a, &b| m[b].partial_cmp(&m[a]).expect("finite").then(a.cmp(&b)));
    let mut best = 0.0f64;
    let mut mass = 0.0f64;
    let mut i = 0usize;
    while i < p {
        let v = m[idx[i]];
        let mut j = i;
        while j < p && m[idx[j]] == v {
            mass += space.weight(idx[j]);
            j += 1;
        }
        if v > 0.0 {
            best = best.max(v * mass);
        }
        i = j;
    }
    best
}

/// Certified lower bound for the weak `L¹` norm of the maximal operator:
/// the exact maximum of `λ·μ({M_T δ_x > λ}) / ‖δ_x‖₁` over all point
/// masses `δ_x` and all levels `λ`.
pub fn weak_norm_probe(space: &FiniteMetricMeasureSpace, times: &TimeSet) -> Result<f64> {
    let p = space.point_count();
    let mut best = 0.0f64;
    let mut f = vec![0.0f64; p];
    for x in 0..p {
        f[x] = 1.0;
        let m = brute_max(space, times, &f)?;
        best = best.max(level_functional(space, &m) / space.weight(x));
        f[x] = 0.0;
    }
    Ok(best)
}

/// Strengthens [`weak_norm_probe`] with seeded random nonnegative inputs;
/// the result is still a certified lower bound.
pub fn weak_norm_probe_randomized(
    space: &FiniteMetricMeasureSpace,
    times: &TimeSet,
    seed: u64,
    trials: usize,
) -> Result<f64> {
    let p = space.point_count();
    let mut best = weak_norm_probe(space, times)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let f: Vec<f64> = (0..p)
            .map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.0..1.0) })
            .collect();
        let l1: f64 = f.iter().zip(space.weights()).map(|(v, w)| v.abs() * w).sum();
        if l1 <= 0.0 {
            continue;
        }
        let m = brute_max(space, times, &f)?;
        best = best.max(level_functional(space, &m) / l1);
    }
    Ok(best)
}

/// Report-only scaling run: weak-norm probes of the full maximal operator
/// on hypercube grids of growing dimension, next to the `n·log n` curve
/// that upper-bound theory predicts for such families.
pub fn weak_norm_scaling(dims: &[u32]) -> Result<ExperimentReport> {
    if dims.is_empty() {
        return Err(Error::Domain("scaling run needs at least one dimension".to_string()));
    }
    let mut report = ExperimentReport::new("weak-norm-scaling")
        .with_param("family", "unit hypercube, sqrt-Hamming metric, unit weights")
        .with_param("time_set", "all realized ball configurations");
    report.set_columns(&["dimension", "probe", "n_log_n"]);
    for &dim in dims {
        let space = FiniteMetricMeasureSpace::hypercube(dim)?;
        // Radii √(k + 1/2) slice strictly between consecutive realized
        // distances √k and √(k+1), so every ball configuration appears.
        let radii: Vec<f64> = (0..=dim).map(|k| (f64::from(k) + 0.5).sqrt()).collect();
        let times = TimeSet::new(radii, f64::from(dim.max(2)))?;
        let probe = weak_norm_probe(&space, &times)?;
        let n = f64::from(dim);
        report.push_row(vec![n, probe, n * n.ln().max(0.0)]);
    }
    Ok(report)
}
