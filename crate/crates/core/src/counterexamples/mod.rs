//! Planar counterexamples: a Cantor-type test function for the modified
//! maximal function, and a Besicovitch family defeating restricted weak type
//! (2,2).
//!
//! Everything here is two-dimensional. Circle averages are exact (arc length
//! of circle/disk and circle/rectangle intersections) for the analytic test
//! functions, and trapezoidal for rasterized [`GridField2D`] data.

mod cantor;
mod geometry;
mod kakeya;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub use cantor::{cantor_counterexample, cantor_radii, cantor_slopes, sumset_max_gap, CantorReport, CantorTestFunction, Disk};
pub use geometry::{merge_arcs, Rectangle};
pub use kakeya::{
    besicovitch_family, restricted_weak_type_probe, union_area_mc, AreaEstimate, KakeyaParams, KakeyaReport,
    RectangleFamily, RectangleUnion,
};

pub type Point = [f64; 2];

/// A function on the plane with circle averages.
pub trait PlaneFunction: Sync {
    fn value(&self, x: Point) -> f64;

    /// Average over the circle of `radius` about `center`, normalized to mass 1.
    fn circle_average(&self, center: Point, radius: f64) -> Result<f64>;
}

/// Values on a regular grid, sampled bilinearly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridField2D {
    pub origin: Point,
    pub h: f64,
    pub width: usize,
    pub height: usize,
    /// Row-major, `values[j * width + i]` at `origin + (i h, j h)`.
    pub values: Vec<f64>,
}

impl GridField2D {
    pub fn new(origin: Point, h: f64, width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if !(h > 0.0) || width < 2 || height < 2 || values.len() != width * height {
            return Err(invalid("grid needs h > 0, at least 2x2 nodes and matching values"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("grid values must be finite"));
        }
        Ok(GridField2D { origin, h, width, height, values })
    }

    /// Samples `f` at the nodes covering `[lo, hi]`.
    pub fn rasterize(f: &impl PlaneFunction, lo: Point, hi: Point, h: f64) -> Result<Self> {
        let width = ((hi[0] - lo[0]) / h).ceil() as usize + 1;
        let height = ((hi[1] - lo[1]) / h).ceil() as usize + 1;
        let mut values = Vec::with_capacity(width * height);
        for j in 0..height {
            for i in 0..width {
                values.push(f.value([lo[0] + i as f64 * h, lo[1] + j as f64 * h]));
            }
        }
        GridField2D::new(lo, h, width, height, values)
    }

    fn upper(&self) -> Point {
        [self.origin[0] + (self.width - 1) as f64 * self.h, self.origin[1] + (self.height - 1) as f64 * self.h]
    }

    /// Quadrature points used for a circle on this grid.
    pub fn circle_points(&self, radius: f64) -> usize {
        256usize.max((2.0 * PI * radius / self.h).ceil() as usize)
    }
}

impl PlaneFunction for GridField2D {
    fn value(&self, x: Point) -> f64 {
        let u = (x[0] - self.origin[0]) / self.h;
        let v = (x[1] - self.origin[1]) / self.h;
        if u < 0.0 || v < 0.0 || u > (self.width - 1) as f64 || v > (self.height - 1) as f64 {
            return 0.0;
        }
        let i = (u.floor() as usize).min(self.width - 2);
        let j = (v.floor() as usize).min(self.height - 2);
        let (s, t) = (u - i as f64, v - j as f64);
        let at = |i: usize, j: usize| self.values[j * self.width + i];
        (1.0 - s) * (1.0 - t) * at(i, j) + s * (1.0 - t) * at(i + 1, j) + (1.0 - s) * t * at(i, j + 1) + s * t * at(i + 1, j + 1)
    }

    fn circle_average(&self, center: Point, radius: f64) -> Result<f64> {
        let hi = self.upper();
        if center[0] - radius < self.origin[0]
            || center[1] - radius < self.origin[1]
            || center[0] + radius > hi[0]
            || center[1] + radius > hi[1]
        {
            return Err(Error::OutOfDomain { x: center[0], y: center[1], radius });
        }
        let m = self.circle_points(radius);
        let s: f64 = (0..m)
            .map(|i| {
                let (sn, cs) = (2.0 * PI * i as f64 / m as f64).sin_cos();
                self.value([center[0] + radius * cs, center[1] + radius * sn])
            })
            .sum();
        Ok(s / m as f64)
    }
}

/// `sup_{r ∈ radii}` of the unit-circle average of `f` about `x + r e_1`.
pub fn modified_maximal(f: &impl PlaneFunction, radii: &[f64], x: Point) -> Result<f64> {
    radii.iter().try_fold(0.0f64, |m, &r| Ok(m.max(f.circle_average([x[0] + r, x[1]], 1.0)?)))
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Const;
    impl PlaneFunction for Const {
        fn value(&self, _: Point) -> f64 {
            1.0
        }
        fn circle_average(&self, _: Point, _: f64) -> Result<f64> {
            Ok(1.0)
        }
    }

    #[test]
    fn constant_grid_and_domain_errors() {
        let g = GridField2D::rasterize(&Const, [-3.0, -1.5], [1.5, 1.5], 0.05).unwrap();
        assert!((modified_maximal(&g, &[1.0, 1.3], [-1.5, 0.0]).unwrap() - 1.0).abs() < 1e-12);
        let err = modified_maximal(&g, &[1.0], [0.5, 0.0]).unwrap_err();
        assert!(matches!(err, Error::OutOfDomain { .. }));
    }

    #[test]
    fn bilinear_is_exact_on_planes() {
        let vals: Vec<f64> = (0..4).flat_map(|j| (0..5).map(move |i| 2.0 * i as f64 - j as f64)).collect();
        let g = GridField2D::new([0.0, 0.0], 0.5, 5, 4, vals).unwrap();
        let x = [1.3, 0.7];
        assert!((g.value(x) - (2.0 * x[0] / 0.5 - x[1] / 0.5)).abs() < 1e-12);
    }
}
