//! Brute-force grid oracle for the full centered maximal operator in
//! dimension 1 and 2.
//!
//! High-dimensional runs replace the centered maximal operator by its
//! one-dimensional reductions; this oracle exists to check those
//! reductions where exhaustive search is still affordable. Cells sit on
//! an offset lattice (no cell center at the origin, where profiles may
//! be singular), ball averages are Riemann sums over cell centers, and
//! the search enumerates **every** distinct grid ball: for each
//! evaluation point, all distance ranks to the other cells. Distances
//! are compared in exact integer lattice coordinates, so cells at equal
//! distance always enter a ball together.

use crate::density::RadialDensity;
use crate::{Error, Result};
use rayon::prelude::*;

/// Exhaustive centered-maximal-function oracle on an offset lattice
/// over `[−half_extent, half_extent]^d`, `d ∈ {1, 2}`.
#[derive(Clone, Debug)]
pub struct GridOracle {
    dim: u32,
    spacing: f64,
    /// Integer lattice coordinates (doubled offsets `2k+1`); the second
    /// coordinate is `0` in dimension 1.
    lattice: Vec<[i64; 2]>,
    /// Physical cell centers.
    centers: Vec<[f64; 2]>,
    /// `w(|center|)` per cell.
    weights: Vec<f64>,
    /// Row-major rank table: `ranks[p·P + r]` is the index of the
    /// `r`-th nearest cell to point `p` (ties broken by index, but ties
    /// are always consumed as one group).
    ranks: Vec<u32>,
}

impl GridOracle {
    /// Builds the oracle. Refuses `d ≥ 3` (the exhaustive search scales
    /// with the square of the cell count, which itself scales like
    /// `(extent/spacing)^d`) and grids beyond 30 000 cells.
    pub fn new(density: &RadialDensity, dim: u32, spacing: f64, half_extent: f64) -> Result<Self> {
        if !(dim == 1 || dim == 2) {
            return Err(Error::Domain(format!(
                "the exhaustive maximal-operator oracle is refused in dimension \
                 {dim}: it is affordable only for d <= 2"
            )));
        }
        if spacing <= 0.0 || spacing.is_nan() || half_extent < spacing || half_extent.is_nan() {
            return Err(Error::Domain(format!(
                "oracle needs 0 < spacing <= half_extent; got {spacing}, {half_extent}"
            )));
        }
        let k = (half_extent / spacing).round().max(1.0) as i64;
        let side: Vec<i64> = (-k..k).map(|i| 2 * i + 1).collect();
        let mut lattice = Vec::new();
        match dim {
            1 => {
                for &x in &side {
                    lattice.push([x, 0]);
                }
            }
            _ => {
                for &x in &side {
                    for &y in &side {
                        lattice.push([x, y]);
                    }
                }
            }
        }
        let p = lattice.len();
        if p > 30_000 {
            return Err(Error::Domain(format!(
                "oracle grid of {p} cells is beyond the exhaustive-search budget"
            )));
        }
        let centers: Vec<[f64; 2]> = lattice
            .iter()
            .map(|c| [c[0] as f64 * spacing / 2.0, c[1] as f64 * spacing / 2.0])
            .collect();
        let weights: Vec<f64> = centers
            .iter()
            .map(|c| density.w((c[0] * c[0] + c[1] * c[1]).sqrt()))
            .collect();
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::Domain(format!(
                "w = {} is not finite at some cell center; shift the lattice \
                 or refine the spacing",
                density.name()
            )));
        }

        let ranks: Vec<u32> = (0..p)
            .into_par_iter()
            .flat_map_iter(|i| {
                let mut order: Vec<u32> = (0..p as u32).collect();
                order.sort_unstable_by_key(|&j| (dist2(&lattice, i, j as usize), j));
                order
            })
            .collect();

        Ok(GridOracle {
            dim,
            spacing,
            lattice,
            centers,
            weights,
            ranks,
        })
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn cell_count(&self) -> usize {
        self.centers.len()
    }

    pub fn centers(&self) -> &[[f64; 2]] {
        &self.centers
    }

    /// `w(|center|)` per cell.
    pub fn cell_weights(&self) -> &[f64] {
        &self.weights
    }

    /// Samples a closed-form function at the cell centers.
    pub fn sample(&self, f: impl Fn(&[f64; 2]) -> f64) -> Vec<f64> {
        self.centers.iter().map(f).collect()
    }

    /// Centered maximal function of `|f|` with respect to the weighted
    /// cell measure: at each cell, the maximum over all distance ranks
    /// of the weighted ball average.
    pub fn weighted_maximal(&self, f: &[f64]) -> Vec<f64> {
        self.maximal_with(f, &self.weights)
    }

    /// Centered maximal function of `|f|` with respect to the counting
    /// (Lebesgue Riemann) measure on the cells.
    pub fn lebesgue_maximal(&self, f: &[f64]) -> Vec<f64> {
        let ones = vec![1.0; self.cell_count()];
        self.maximal_with(f, &ones)
    }

    fn maximal_with(&self, f: &[f64], w: &[f64]) -> Vec<f64> {
        let p = self.cell_count();
        assert_eq!(f.len(), p, "one value per cell required");
        (0..p)
            .into_par_iter()
            .map(|i| {
                let row = &self.ranks[i * p..(i + 1) * p];
                let mut best = f64::NEG_INFINITY;
                let mut num = 0.0;
                let mut den = 0.0;
                let mut r = 0;
                while r < p {
                    let d2 = dist2(&self.lattice, i, row[r] as usize);
                    // Consume the whole equal-distance group: a ball
                    // contains all of it or none of it.
                    while r < p && dist2(&self.lattice, i, row[r] as usize) == d2 {
                        let j = row[r] as usize;
                        num += f[j].abs() * w[j];
                        den += w[j];
                        r += 1;
                    }
                    if den > 0.0 {
                        best = best.max(num / den);
                    }
                }
                if best == f64::NEG_INFINITY {
                    0.0
                } else {
                    best
                }
            })
            .collect()
    }

    /// Origin-ball maximal operator on the same cells: at each cell
    /// `x`, the maximum over grid balls `{|y| ≤ R}` with `R ≥ |x|` of
    /// the weighted ball average. The candidate radii are the distance
    /// ranks from the origin, starting at the cell's own ring.
    pub fn hardy(&self, f: &[f64]) -> Vec<f64> {
        let p = self.cell_count();
        assert_eq!(f.len(), p, "one value per cell required");
        let origin2 = |j: usize| {
            let c = self.lattice[j];
            c[0] * c[0] + c[1] * c[1]
        };
        let mut order: Vec<u32> = (0..p as u32).collect();
        order.sort_unstable_by_key(|&j| (origin2(j as usize), j));

        // Ring groups with their running averages, then suffix maxima.
        let mut ring_d2: Vec<i64> = Vec::new();
        let mut ring_avg: Vec<f64> = Vec::new();
        let mut num = 0.0;
        let mut den = 0.0;
        let mut r = 0;
        while r < p {
            let d2 = origin2(order[r] as usize);
            while r < p && origin2(order[r] as usize) == d2 {
                let j = order[r] as usize;
                num += f[j].abs() * self.weights[j];
                den += self.weights[j];
                r += 1;
            }
            ring_d2.push(d2);
            ring_avg.push(if den > 0.0 { num / den } else { 0.0 });
        }
        let mut suffix = ring_avg.clone();
        for i in (0..suffix.len().saturating_sub(1)).rev() {
            suffix[i] = suffix[i].max(suffix[i + 1]);
        }

        (0..p)
            .map(|i| {
                let own = origin2(i);
                let g = ring_d2.partition_point(|&d2| d2 < own);
                suffix[g]
            })
            .collect()
    }
}

fn dist2(lattice: &[[i64; 2]], i: usize, j: usize) -> i64 {
    let dx = lattice[i][0] - lattice[j][0];
    let dy = lattice[i][1] - lattice[j][1];
    dx * dx + dy * dy
}
