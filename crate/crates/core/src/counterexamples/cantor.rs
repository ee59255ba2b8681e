use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::geometry::disk_arc_fraction;
use super::{modified_maximal, PlaneFunction, Point};
use crate::dilation_set::CantorIfs;
use crate::error::{invalid, Error, Result};
use crate::rng;
use crate::stats::loglog_slope;

/// Extra base-4 digits of `E_0` beyond the finest disk scale.
const E0_EXTRA_DEPTH: u32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: Point,
    pub radius: f64,
    pub weight: f64,
    pub level: u32,
}

/// `f = Σ_{i ≤ N} 4^i Σ_{c ∈ C_i} χ_{B(-c e_1, a 4^{-i})}`, where `C_i` are the
/// sums `Σ_{j ≤ i} c_j 4^{-j}` with `c_j ∈ {0, 1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CantorTestFunction {
    pub n_scales: u32,
    pub a: f64,
}

impl CantorTestFunction {
    pub fn new(n_scales: u32, a: f64) -> Result<Self> {
        if n_scales == 0 || n_scales > 12 {
            return Err(invalid(format!("number of scales must be in 1..=12, got {n_scales}")));
        }
        if !(a > 0.0 && a < 0.25) {
            return Err(invalid(format!("ball-radius factor must lie in (0, 1/4), got {a}")));
        }
        Ok(CantorTestFunction { n_scales, a })
    }

    fn radius(&self, level: u32) -> f64 {
        self.a * 0.25f64.powi(level as i32)
    }

    pub fn disks(&self) -> Vec<Disk> {
        let mut out = Vec::new();
        for i in 1..=self.n_scales {
            for c in cantor_digits(i, &[0.0, 1.0]) {
                out.push(Disk { center: [-c, 0.0], radius: self.radius(i), weight: 4f64.powi(i as i32), level: i });
            }
        }
        out
    }

    /// Smallest disk radius, `a 4^{-N}`.
    pub fn finest_scale(&self) -> f64 {
        self.radius(self.n_scales)
    }

    /// Sum of arc fractions over the prefix tree below `(level, c)`, skipping
    /// subtrees whose bounding disk the circle misses.
    fn arc_sum(&self, cen: Point, r: f64, level: u32, c: f64) -> f64 {
        let mut s = 0.0;
        if level >= 1 {
            s += 4f64.powi(level as i32) * disk_arc_fraction(cen, r, [-c, 0.0], self.radius(level));
        }
        if level == self.n_scales {
            return s;
        }
        let step = 0.25f64.powi(level as i32 + 1);
        for digit in [0.0, 1.0] {
            let child = c + digit * step;
            // descendants lie in -child - [0, step/3] with radius below a step
            let (mid, reach) = (-child - step / 6.0, step / 6.0 + self.radius(level + 1));
            let dist = (cen[0] - mid).hypot(cen[1]);
            if (dist - r).abs() <= reach {
                s += self.arc_sum(cen, r, level + 1, child);
            }
        }
        s
    }

    /// `‖f‖_p` by quadtree refinement down to cells of side `h`: cells where
    /// `f` is constant are integrated exactly, others sampled at the centre.
    pub fn lp_norm(&self, p: f64, h: f64) -> f64 {
        let disks = self.disks();
        let pad = self.radius(1) + h;
        let side = 1.0 / 3.0 + 2.0 * pad;
        let idx: Vec<usize> = (0..disks.len()).collect();
        let cell = ([-1.0 / 3.0 - pad, -side / 2.0], side);
        quad(&disks, &idx, cell, p, h, 0.0).powf(1.0 / p)
    }
}

/// `∫ f^p` over `cell`, where `base` is the weight of disks already known to
/// cover the whole cell and `idx` the disks that may still cut it.
fn quad(disks: &[Disk], idx: &[usize], cell: (Point, f64), p: f64, h: f64, base: f64) -> f64 {
    let ([x0, y0], s) = cell;
    let mut inside = base;
    let mut partial = Vec::new();
    for &i in idx {
        let d = &disks[i];
        let (cx, cy) = (d.center[0], d.center[1]);
        let near = (cx.clamp(x0, x0 + s) - cx).hypot(cy.clamp(y0, y0 + s) - cy);
        if near >= d.radius {
            continue;
        }
        let far = (cx - x0).abs().max((cx - x0 - s).abs()).hypot((cy - y0).abs().max((cy - y0 - s).abs()));
        if far <= d.radius {
            inside += d.weight;
        } else {
            partial.push(i);
        }
    }
    if partial.is_empty() {
        return s * s * inside.powf(p);
    }
    if s <= h {
        let c = [x0 + s / 2.0, y0 + s / 2.0];
        let v = inside
            + partial
                .iter()
                .filter(|&&i| (c[0] - disks[i].center[0]).hypot(c[1] - disks[i].center[1]) < disks[i].radius)
                .map(|&i| disks[i].weight)
                .sum::<f64>();
        return s * s * v.powf(p);
    }
    let hs = s / 2.0;
    [[0.0, 0.0], [hs, 0.0], [0.0, hs], [hs, hs]]
        .iter()
        .map(|o| quad(disks, &partial, ([x0 + o[0], y0 + o[1]], hs), p, h, inside))
        .sum()
}

/// All sums `Σ_{j ≤ depth} d_j 4^{-j}` with digits from `digits`, ascending.
fn cantor_digits(depth: u32, digits: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0];
    for j in 1..=depth {
        let w = 0.25f64.powi(j as i32);
        out = out.iter().flat_map(|&c| digits.iter().map(move |&d| c + d * w)).collect();
    }
    out.sort_by(f64::total_cmp);
    out
}

impl PlaneFunction for CantorTestFunction {
    fn value(&self, x: Point) -> f64 {
        self.disks()
            .iter()
            .filter(|d| (x[0] - d.center[0]).hypot(x[1] - d.center[1]) < d.radius)
            .map(|d| d.weight)
            .sum()
    }

    fn circle_average(&self, center: Point, radius: f64) -> Result<f64> {
        Ok(self.arc_sum(center, radius, 0, 0.0))
    }
}

/// Points `1 + Σ_{j ≤ depth} b_j 4^{-j}`, `b_j ∈ {0, 2}`, of the middle-halves
/// Cantor set `E_0 ⊂ [1, 5/3]`.
pub fn cantor_radii(depth: u32) -> Result<Vec<f64>> {
    let e0 = CantorIfs::middle_halves(1.0, 5.0 / 3.0, depth)?;
    Ok(e0.cells(depth).iter().map(|c| c.lo).collect())
}

/// Largest gap of `E_0 + C` in `[1, 2]` when both are truncated at `depth`
/// digits, counting the gaps to the endpoints.
pub fn sumset_max_gap(depth: u32) -> Result<f64> {
    let c = cantor_digits(depth, &[0.0, 1.0]);
    let mut sums: Vec<f64> = cantor_radii(depth)?.iter().flat_map(|e| c.iter().map(move |x| e + x)).collect();
    sums.sort_by(f64::total_cmp);
    let mut gap = (sums[0] - 1.0).max(2.0 - sums[sums.len() - 1]);
    for w in sums.windows(2) {
        gap = gap.max(w[1] - w[0]);
    }
    Ok(gap)
}

/// Result of one run of the Cantor construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CantorReport {
    pub n_scales: u32,
    pub a: f64,
    pub h: f64,
    pub seed: u64,
    pub samples: usize,
    pub e0_depth: u32,
    pub radii: usize,
    pub disks: usize,
    /// `‖f‖_{3/2}`
    pub f_norm: f64,
    /// Lower estimate of `‖M̃f‖_{3/2,∞}` from the sampled points.
    pub weak_norm: f64,
    pub ratio: f64,
    /// `c N` with `c = a/(2π)`, half the largest possible value.
    pub threshold: f64,
    /// Estimated measure of `{M̃f > c N}`.
    pub level_measure: f64,
    pub max_value: f64,
    /// `[x_lo, x_hi, y_lo, y_hi]`; the mirror image in `y` is included by symmetry.
    pub sample_box: [f64; 4],
}

/// Builds the test function, measures `‖f‖_{3/2}` at resolution `h` and samples
/// `M̃_{E_0} f` uniformly on the region the unit circles about `x + r e_1` can
/// reach from the support of `f`.
pub fn cantor_counterexample(n_scales: u32, a: f64, h: f64, samples: usize, seed: u64) -> Result<CantorReport> {
    let f = CantorTestFunction::new(n_scales, a)?;
    if !(h > 0.0 && h <= f.finest_scale() / 4.0) {
        return Err(Error::Resolution(format!(
            "grid step {h} does not resolve the finest disk radius {} (need h <= radius/4)",
            f.finest_scale()
        )));
    }
    if samples == 0 {
        return Err(invalid("need at least one sample point"));
    }
    let e0_depth = n_scales + E0_EXTRA_DEPTH;
    let radii = cantor_radii(e0_depth)?;
    let f_norm = f.lp_norm(1.5, h);
    let sample_box = [-3.05, 0.05, 0.0, 1.05];
    let cell = 2.0 * (sample_box[1] - sample_box[0]) * (sample_box[3] - sample_box[2]) / samples as f64;
    const CHUNK: usize = 1024;
    let chunks: Vec<Vec<f64>> = (0..samples.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut rng = rng::stream(seed, c as u64);
            (c * CHUNK..samples.min((c + 1) * CHUNK))
                .map(|_| {
                    let x = [rng.random_range(sample_box[0]..sample_box[1]), rng.random_range(sample_box[2]..sample_box[3])];
                    modified_maximal(&f, &radii, x)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let mut vals: Vec<f64> = chunks.concat();
    vals.sort_by(|x, y| y.total_cmp(x));
    let weak_norm = vals.iter().enumerate().map(|(i, v)| v * ((i + 1) as f64 * cell).powf(2.0 / 3.0)).fold(0.0, f64::max);
    let threshold = a / (2.0 * std::f64::consts::PI) * n_scales as f64;
    let level_measure = vals.iter().filter(|&&v| v > threshold).count() as f64 * cell;
    Ok(CantorReport {
        n_scales,
        a,
        h,
        seed,
        samples,
        e0_depth,
        radii: radii.len(),
        disks: f.disks().len(),
        f_norm,
        weak_norm,
        ratio: weak_norm / f_norm,
        threshold,
        level_measure,
        max_value: vals.first().copied().unwrap_or(0.0),
        sample_box,
    })
}

/// Log-log slopes of `‖f‖_{3/2}` and of the weak ratio against `N`.
pub fn cantor_slopes(reports: &[CantorReport]) -> (f64, f64) {
    let ns: Vec<f64> = reports.iter().map(|r| r.n_scales as f64).collect();
    let f: Vec<f64> = reports.iter().map(|r| r.f_norm).collect();
    let q: Vec<f64> = reports.iter().map(|r| r.ratio).collect();
    (loglog_slope(&ns, &f), loglog_slope(&ns, &q))
}
