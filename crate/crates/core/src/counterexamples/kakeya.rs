use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::geometry::{merge_arcs, Rectangle};
use super::{PlaneFunction, Point};
use crate::dilation_set::DilationSet;
use crate::error::{invalid, Result};
use crate::rng;

/// `≍ 2^n` thin rectangles, one per direction `l 2^{-n}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RectangleFamily {
    pub n: u32,
    pub rectangles: Vec<Rectangle>,
}

/// Rectangles of size `2^{-n-3} × 2^{-2n-6}` in directions
/// `e_l = (cos l2^{-n}, sin l2^{-n})`, `0 ≤ l < 2^n`, inside `[-2^{-n}, 2^{-n}]²`.
///
/// In units of the long side, rectangle `l` starts at height
/// `-Σ_j ε_j 2^{-j} j/n`, where `ε_1 ε_2 … ε_n` are the binary digits of `l`, so
/// that directions sharing their first `k` digits bunch together near `x = k/n`.
pub fn besicovitch_family(n: u32) -> Result<RectangleFamily> {
    if !(3..=8).contains(&n) {
        return Err(invalid(format!("Besicovitch scale n must be in 3..=8, got {n}")));
    }
    let len = (-(n as f64) - 3.0).exp2();
    let half_wid = (-2.0 * n as f64 - 7.0).exp2();
    let rectangles = (0..1u32 << n)
        .map(|l| {
            let theta = l as f64 * (-(n as f64)).exp2();
            let start: f64 =
                -(1..=n).map(|j| ((l >> (n - j)) & 1) as f64 * (-(j as f64)).exp2() * j as f64 / n as f64).sum::<f64>();
            let (s, c) = theta.sin_cos();
            Rectangle {
                center: [len * (0.5 * c - 0.5), len * (start + 0.5 * s)],
                angle: theta,
                half_len: len / 2.0,
                half_wid,
            }
        })
        .collect();
    Ok(RectangleFamily { n, rectangles })
}

/// Indicator of the union of a set of rectangles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RectangleUnion {
    pub rectangles: Vec<Rectangle>,
}

impl RectangleUnion {
    pub fn multiplicity(&self, x: Point) -> usize {
        self.rectangles.iter().filter(|r| r.contains(x)).count()
    }
}

impl PlaneFunction for RectangleUnion {
    fn value(&self, x: Point) -> f64 {
        (self.multiplicity(x) > 0) as u8 as f64
    }

    fn circle_average(&self, center: Point, radius: f64) -> Result<f64> {
        let arcs: Vec<(f64, f64)> = self.rectangles.iter().flat_map(|r| r.circle_arcs(center, radius)).collect();
        Ok(merge_arcs(arcs) / (2.0 * PI))
    }
}

/// Monte Carlo area of a union of rectangles.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AreaEstimate {
    pub area: f64,
    pub std_err: f64,
    /// 95% confidence interval.
    pub ci_low: f64,
    pub ci_high: f64,
    /// Sum of the rectangle areas, an upper bound.
    pub total_area: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Samples points uniformly from the disjoint sum of the rectangles and
/// averages `1/multiplicity`, which is unbiased for the union's area.
pub fn union_area_mc(family: &RectangleFamily, samples: usize, seed: u64) -> Result<AreaEstimate> {
    if samples < 2 {
        return Err(invalid("need at least two samples"));
    }
    let union = RectangleUnion { rectangles: family.rectangles.clone() };
    let total_area: f64 = family.rectangles.iter().map(|r| r.area()).sum();
    const CHUNK: usize = 4096;
    let parts: Vec<(f64, f64)> = (0..samples.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut rng = rng::stream(seed, c as u64);
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in c * CHUNK..samples.min((c + 1) * CHUNK) {
                let r = &family.rectangles[rng.random_range(0..family.rectangles.len())];
                let x = r.at(rng.random_range(-r.half_len..r.half_len), rng.random_range(-r.half_wid..r.half_wid));
                let v = 1.0 / union.multiplicity(x).max(1) as f64;
                s += v;
                s2 += v * v;
            }
            (s, s2)
        })
        .collect();
    let (s, s2) = parts.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let m = samples as f64;
    let mean = s / m;
    let var = (s2 / m - mean * mean).max(0.0) * m / (m - 1.0);
    let area = total_area * mean;
    let std_err = total_area * (var / m).sqrt();
    Ok(AreaEstimate {
        area,
        std_err,
        ci_low: area - 1.96 * std_err,
        ci_high: area + 1.96 * std_err,
        total_area,
        samples,
        seed,
    })
}

/// Parameters of the restricted weak type probe.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KakeyaParams {
    pub n: u32,
    /// Every `stride`-th interval and rectangle is used.
    pub stride: usize,
    pub samples_per_rect: usize,
    /// The level is `c 2^{-n}`.
    pub c: f64,
    /// A rectangle counts as hit when this fraction of its samples exceeds the level.
    pub hit_fraction: f64,
    pub area_samples: usize,
    pub seed: u64,
}

impl KakeyaParams {
    pub fn new(n: u32, seed: u64) -> Self {
        KakeyaParams {
            n,
            stride: 10,
            samples_per_rect: 64,
            c: 1.0 / (64.0 * PI),
            hit_fraction: 1.0 / 20.0,
            area_samples: 200_000,
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KakeyaReport {
    pub params: KakeyaParams,
    /// Dyadic intervals of length `2^{-2n}` meeting `E^0`.
    pub intervals: usize,
    /// `N n / 2^{2n}`
    pub b: f64,
    /// False when `B < 1`; nothing below `b` is computed then.
    pub applicable: bool,
    pub area: Option<AreaEstimate>,
    pub translated: usize,
    pub disjoint: Option<bool>,
    pub hits: usize,
    /// Estimated measure of `{M_E χ_A > c 2^{-n}}` inside the translated rectangles.
    pub level_measure: f64,
    /// `c 2^{-n} · level_measure^{1/2}`, a lower bound for `‖M_E χ_A‖_{2,∞}`.
    pub weak_lower: f64,
    /// `‖χ_A‖_{2,1} = |A|^{1/2}`
    pub chi_norm: f64,
    pub ratio: f64,
    pub ratio_over_sqrt_b: f64,
}

/// Covers `E^0` by dyadic intervals of length `2^{-2n}`, places translates of
/// every `stride`-th rectangle at distance `t_ν ∈ E ∩ I_ν` for every
/// `stride`-th interval, and measures where `M_E χ_A` exceeds `c 2^{-n}`.
pub fn restricted_weak_type_probe(set: &DilationSet, params: KakeyaParams) -> Result<KakeyaReport> {
    let n = params.n;
    if params.stride == 0 || params.samples_per_rect == 0 {
        return Err(invalid("stride and samples per rectangle must be positive"));
    }
    let family = besicovitch_family(n)?;
    let scale = (2.0 * n as f64).exp2();
    let block = set.block(0, 1.0 / scale)?;
    // first point of E in each dyadic interval
    let mut reps: Vec<(i64, f64)> = Vec::new();
    for it in block.items() {
        let (lo, hi) = ((it.lo * scale).floor() as i64, ((it.hi * scale).floor() as i64).min(2 * scale as i64 - 1));
        for m in lo..=hi {
            if reps.last().is_none_or(|r| r.0 < m) {
                reps.push((m, it.lo.max(m as f64 / scale)));
            }
        }
    }
    let intervals = reps.len();
    let b = intervals as f64 * n as f64 / scale;
    let mut report = KakeyaReport {
        params,
        intervals,
        b,
        applicable: b >= 1.0,
        area: None,
        translated: 0,
        disjoint: None,
        hits: 0,
        level_measure: 0.0,
        weak_lower: 0.0,
        chi_norm: 0.0,
        ratio: 0.0,
        ratio_over_sqrt_b: 0.0,
    };
    if !report.applicable {
        return Ok(report);
    }
    let area = union_area_mc(&family, params.area_samples, params.seed)?;
    let half_wid = family.rectangles[0].half_wid;
    let ts = block.sample_radii(half_wid / 2.0);
    let union = RectangleUnion { rectangles: family.rectangles.clone() };
    let translated: Vec<(usize, f64, Rectangle)> = reps
        .iter()
        .step_by(params.stride)
        .flat_map(|&(_, t)| {
            family.rectangles.iter().enumerate().step_by(params.stride).map(move |(l, r)| {
                let e = r.normal();
                (l, t, r.translated([t * e[0], t * e[1]]))
            })
        })
        .collect();
    let disjoint = all_disjoint(&translated.iter().map(|x| x.2).collect::<Vec<_>>());
    let level = params.c * (-(n as f64)).exp2();
    let fractions: Vec<f64> = translated
        .par_iter()
        .enumerate()
        .map(|(i, (l, t0, rect))| {
            let target = &family.rectangles[*l];
            let mut rng = rng::stream(params.seed ^ 0x6b61_6b65, i as u64);
            let mut above = 0usize;
            for _ in 0..params.samples_per_rect {
                let x = rect.at(rng.random_range(-rect.half_len..rect.half_len), rng.random_range(-rect.half_wid..rect.half_wid));
                let band = |r: &Rectangle| {
                    let d = (x[0] - r.center[0]).hypot(x[1] - r.center[1]);
                    (d - r.reach(), d + r.reach())
                };
                // radii whose circle can meet the target rectangle
                let (lo, hi) = band(target);
                let a = ts.partition_point(|&t| t < lo);
                let b = ts.partition_point(|&t| t <= hi);
                let near: Vec<(Rectangle, (f64, f64))> = union.rectangles.iter().map(|r| (*r, band(r))).collect();
                // radii nearest the tangent radius t0 first
                let mut order: Vec<usize> = (a..b).collect();
                order.sort_by(|&u, &v| (ts[u] - t0).abs().total_cmp(&(ts[v] - t0).abs()));
                let mut hit = false;
                for k in order {
                    let t = ts[k];
                    let arcs: Vec<(f64, f64)> =
                        near.iter().filter(|(_, (l, h))| *l <= t && t <= *h).flat_map(|(r, _)| r.circle_arcs(x, t)).collect();
                    if merge_arcs(arcs) / (2.0 * PI) > level {
                        hit = true;
                        break;
                    }
                }
                above += hit as usize;
            }
            above as f64 / params.samples_per_rect as f64
        })
        .collect();
    let rect_area = family.rectangles[0].area();
    report.hits = fractions.iter().filter(|&&f| f >= params.hit_fraction).count();
    report.level_measure = fractions.iter().sum::<f64>() * rect_area;
    report.weak_lower = level * report.level_measure.sqrt();
    report.chi_norm = area.area.sqrt();
    report.ratio = report.weak_lower / report.chi_norm;
    report.ratio_over_sqrt_b = report.ratio / b.sqrt();
    report.translated = translated.len();
    report.disjoint = Some(disjoint);
    report.area = Some(area);
    Ok(report)
}

/// Pairwise separating-axis check, bucketed by centre.
fn all_disjoint(rects: &[Rectangle]) -> bool {
    let reach = rects.iter().map(|r| r.reach()).fold(0.0, f64::max);
    if rects.is_empty() || reach == 0.0 {
        return true;
    }
    let cell = 2.0 * reach;
    let key = |p: Point| ((p[0] / cell).floor() as i64, (p[1] / cell).floor() as i64);
    let mut buckets: std::collections::HashMap<(i64, i64), Vec<usize>> = std::collections::HashMap::new();
    for (i, r) in rects.iter().enumerate() {
        buckets.entry(key(r.center)).or_default().push(i);
    }
    rects.iter().enumerate().all(|(i, r)| {
        let (kx, ky) = key(r.center);
        (-1..=1).all(|dx| {
            (-1..=1).all(|dy| {
                buckets.get(&(kx + dx, ky + dy)).is_none_or(|v| v.iter().all(|&j| j <= i || !r.overlaps(&rects[j])))
            })
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dilation_set::{standard_set, StandardSet};

    #[test]
    fn family_shape() {
        let f = besicovitch_family(4).unwrap();
        assert_eq!(f.rectangles.len(), 16);
        let bound = (-4.0f64).exp2();
        for (l, r) in f.rectangles.iter().enumerate() {
            assert_eq!(r.angle, l as f64 / 16.0);
            assert_eq!(2.0 * r.half_len, (-7.0f64).exp2());
            assert_eq!(2.0 * r.half_wid, (-14.0f64).exp2());
            assert!(r.corners().iter().all(|c| c[0].abs() <= bound && c[1].abs() <= bound));
        }
        assert!(besicovitch_family(2).is_err() && besicovitch_family(9).is_err());
    }

    #[test]
    fn area_estimate_brackets_brute_force() {
        let f = besicovitch_family(3).unwrap();
        let est = union_area_mc(&f, 100_000, 3).unwrap();
        // exact cross-sections along vertical lines, midpoint rule in x
        let (lo, hi) = (-0.125, 0.125);
        let m = 20_000;
        let step = (hi - lo) / m as f64;
        let mut brute = 0.0;
        for i in 0..m {
            let x = lo + (i as f64 + 0.5) * step;
            let mut spans: Vec<(f64, f64)> = f
                .rectangles
                .iter()
                .filter_map(|r| {
                    let k = r.corners();
                    let ys: Vec<f64> = (0..4)
                        .filter_map(|e| {
                            let (p, q) = (k[e], k[(e + 1) % 4]);
                            let s = (x - p[0]) / (q[0] - p[0]);
                            (0.0..=1.0).contains(&s).then(|| p[1] + s * (q[1] - p[1]))
                        })
                        .collect();
                    (ys.len() >= 2).then(|| ys.iter().fold((f64::MAX, f64::MIN), |a, &y| (a.0.min(y), a.1.max(y))))
                })
                .collect();
            brute += merge_arcs(std::mem::take(&mut spans)) * step;
        }
        assert!((est.area - brute).abs() < 4.0 * est.std_err + 0.02 * brute, "{est:?} vs {brute}");
        assert!(est.area <= est.total_area * (1.0 + 1e-12));
    }

    #[test]
    fn lacunary_is_inapplicable() {
        let e = standard_set(StandardSet::Lacunary).unwrap();
        let r = restricted_weak_type_probe(&e, KakeyaParams::new(4, 1)).unwrap();
        assert!(!r.applicable && r.area.is_none());
        assert_eq!(r.intervals, 1);
    }

    #[test]
    fn full_interval_probe_is_disjoint_and_detects_level() {
        let e = standard_set(StandardSet::Full).unwrap();
        let r = restricted_weak_type_probe(&e, KakeyaParams::new(3, 1)).unwrap();
        assert!(r.applicable);
        assert_eq!(r.intervals, 64);
        assert_eq!(r.disjoint, Some(true));
        assert!(r.hits > r.translated / 2, "{r:?}");
        let again = restricted_weak_type_probe(&e, KakeyaParams::new(3, 1)).unwrap();
        assert_eq!(r, again);
    }
}
