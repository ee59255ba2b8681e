use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::Point;

/// A rectangle with its long side along `(cos angle, sin angle)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub center: Point,
    pub angle: f64,
    pub half_len: f64,
    pub half_wid: f64,
}

impl Rectangle {
    pub fn direction(&self) -> Point {
        let (s, c) = self.angle.sin_cos();
        [c, s]
    }

    /// `e^⊥ = (-sin, cos)`
    pub fn normal(&self) -> Point {
        let (s, c) = self.angle.sin_cos();
        [-s, c]
    }

    pub fn area(&self) -> f64 {
        4.0 * self.half_len * self.half_wid
    }

    pub fn translated(&self, v: Point) -> Rectangle {
        Rectangle { center: [self.center[0] + v[0], self.center[1] + v[1]], ..*self }
    }

    /// Coordinates of `p` along the long and short axes.
    pub fn local(&self, p: Point) -> (f64, f64) {
        let (e, n) = (self.direction(), self.normal());
        let d = [p[0] - self.center[0], p[1] - self.center[1]];
        (d[0] * e[0] + d[1] * e[1], d[0] * n[0] + d[1] * n[1])
    }

    /// Point with local coordinates `(u, v)`.
    pub fn at(&self, u: f64, v: f64) -> Point {
        let (e, n) = (self.direction(), self.normal());
        [self.center[0] + u * e[0] + v * n[0], self.center[1] + u * e[1] + v * n[1]]
    }

    pub fn contains(&self, p: Point) -> bool {
        let (u, v) = self.local(p);
        u.abs() <= self.half_len && v.abs() <= self.half_wid
    }

    pub fn corners(&self) -> [Point; 4] {
        let (l, w) = (self.half_len, self.half_wid);
        [self.at(-l, -w), self.at(l, -w), self.at(l, w), self.at(-l, w)]
    }

    /// Radius of the smallest disk about the center containing the rectangle.
    pub fn reach(&self) -> f64 {
        self.half_len.hypot(self.half_wid)
    }

    /// Separating-axis test; touching boundaries count as overlap.
    pub fn overlaps(&self, other: &Rectangle) -> bool {
        let axes = [self.direction(), self.normal(), other.direction(), other.normal()];
        let (a, b) = (self.corners(), other.corners());
        axes.iter().all(|ax| {
            let proj = |pts: &[Point; 4]| {
                pts.iter().map(|p| p[0] * ax[0] + p[1] * ax[1]).fold((f64::MAX, f64::MIN), |m, x| (m.0.min(x), m.1.max(x)))
            };
            let (pa, pb) = (proj(&a), proj(&b));
            pa.0 <= pb.1 && pb.0 <= pa.1
        })
    }

    /// Angular intervals of the circle `|y - c| = r` lying inside the rectangle.
    pub fn circle_arcs(&self, c: Point, r: f64) -> Vec<(f64, f64)> {
        let dc = ((c[0] - self.center[0]).powi(2) + (c[1] - self.center[1]).powi(2)).sqrt();
        if dc > r + self.reach() || dc + self.reach() < r {
            return Vec::new();
        }
        let mut cuts = vec![-PI, PI];
        let k = self.corners();
        for i in 0..4 {
            let (p, q) = (k[i], k[(i + 1) % 4]);
            let d = [q[0] - p[0], q[1] - p[1]];
            let f = [p[0] - c[0], p[1] - c[1]];
            let a = d[0] * d[0] + d[1] * d[1];
            let b = 2.0 * (f[0] * d[0] + f[1] * d[1]);
            let cc = f[0] * f[0] + f[1] * f[1] - r * r;
            let disc = b * b - 4.0 * a * cc;
            if disc < 0.0 {
                continue;
            }
            for s in [(-b - disc.sqrt()) / (2.0 * a), (-b + disc.sqrt()) / (2.0 * a)] {
                if (0.0..=1.0).contains(&s) {
                    cuts.push((f[1] + s * d[1]).atan2(f[0] + s * d[0]));
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        let mut out: Vec<(f64, f64)> = Vec::new();
        for w in cuts.windows(2) {
            if w[1] - w[0] <= 0.0 {
                continue;
            }
            let (s, co) = (0.5 * (w[0] + w[1])).sin_cos();
            if self.contains([c[0] + r * co, c[1] + r * s]) {
                match out.last_mut() {
                    Some(last) if last.1 >= w[0] => last.1 = w[1],
                    _ => out.push((w[0], w[1])),
                }
            }
        }
        out
    }
}

/// Total length (radians) of a union of angular intervals in `[-π, π]`.
pub fn merge_arcs(mut arcs: Vec<(f64, f64)>) -> f64 {
    arcs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut total = 0.0;
    let mut cur: Option<(f64, f64)> = None;
    for (a, b) in arcs {
        cur = match cur {
            Some((ca, cb)) if a <= cb => Some((ca, cb.max(b))),
            Some((ca, cb)) => {
                total += cb - ca;
                Some((a, b))
            }
            None => Some((a, b)),
        };
    }
    if let Some((a, b)) = cur {
        total += b - a;
    }
    total
}

/// Fraction of the circle `|y - c| = r` inside the disk `|y - z| < rho`.
pub(crate) fn disk_arc_fraction(c: Point, r: f64, z: Point, rho: f64) -> f64 {
    let dist = (c[0] - z[0]).hypot(c[1] - z[1]);
    if dist + r <= rho {
        return 1.0;
    }
    if dist >= r + rho || r >= dist + rho {
        return 0.0;
    }
    let cos = ((r * r + dist * dist - rho * rho) / (2.0 * r * dist)).clamp(-1.0, 1.0);
    cos.acos() / PI
}
