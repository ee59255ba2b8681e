//! Spherical means of radial functions and the quantities built on them.
//!
//! A radial function is a [`RadialProfile`] `g` with `f(x) = g(|x|)`. Its
//! spherical mean `A_t f` is again radial and reduces to a one-dimensional
//! integral over the polar angle, which is evaluated by composite
//! Gauss-Legendre quadrature split at the profile's breakpoints.

mod quadrature;

use std::f64::consts::PI;
use std::io::Write;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dilation_set::DilationSet;
use crate::error::{invalid, Error, Result};
use crate::rng;
use crate::stats::linear_fit;

use quadrature::{gauss_nodes, integrate};

/// Relative tolerance for panel doubling.
pub const QUAD_TOL: f64 = 1e-8;

/// A radial profile `g : [0, ∞) → ℝ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialProfile {
    Constant { value: f64 },
    /// `χ_{[0, radius]}`
    Ball { radius: f64 },
    /// `χ_{[inner, outer]}`
    Shell { inner: f64, outer: f64 },
    /// `e^{-rate·r}`
    Exponential { rate: f64 },
    /// `e^{-r²/(2σ²)}`
    Gaussian { sigma: f64 },
    /// Piecewise linear through `(r_i, g_i)`, zero beyond the last node.
    Tabulated { r: Vec<f64>, g: Vec<f64> },
}

impl RadialProfile {
    pub fn tabulated(r: Vec<f64>, g: Vec<f64>) -> Result<Self> {
        if r.len() != g.len() || r.len() < 2 {
            return Err(invalid("tabulated profile needs matching grids of length >= 2"));
        }
        if r[0] < 0.0 || r.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("tabulated grid must be nonnegative and strictly increasing"));
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(invalid("tabulated values must be finite"));
        }
        Ok(RadialProfile::Tabulated { r, g })
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            RadialProfile::Constant { value } => *value,
            RadialProfile::Ball { radius } => (r <= *radius) as u8 as f64,
            RadialProfile::Shell { inner, outer } => (r >= *inner && r <= *outer) as u8 as f64,
            RadialProfile::Exponential { rate } => (-rate * r).exp(),
            RadialProfile::Gaussian { sigma } => (-0.5 * (r / sigma).powi(2)).exp(),
            RadialProfile::Tabulated { r: xs, g } => {
                if r < xs[0] || r > xs[xs.len() - 1] {
                    return 0.0;
                }
                let i = xs.partition_point(|&x| x <= r).clamp(1, xs.len() - 1);
                let s = (r - xs[i - 1]) / (xs[i] - xs[i - 1]);
                g[i - 1] + s * (g[i] - g[i - 1])
            }
        }
    }

    /// Radii where `g` or its derivative jumps.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            RadialProfile::Ball { radius } => vec![*radius],
            RadialProfile::Shell { inner, outer } => vec![*inner, *outer],
            RadialProfile::Tabulated { r, .. } => r.clone(),
            _ => Vec::new(),
        }
    }

    /// Radius outside of which `g` vanishes, if any.
    pub fn support_radius(&self) -> Option<f64> {
        match self {
            RadialProfile::Ball { radius } => Some(*radius),
            RadialProfile::Shell { outer, .. } => Some(*outer),
            RadialProfile::Tabulated { r, .. } => Some(r[r.len() - 1]),
            _ => None,
        }
    }
}

/// `Γ(d/2) / (√π Γ((d-1)/2))`, the density of the polar angle on `S^{d-1}`.
pub fn polar_constant(d: u32) -> f64 {
    let d = d as f64;
    (libm::lgamma(d / 2.0) - libm::lgamma((d - 1.0) / 2.0)).exp() / PI.sqrt()
}

/// Surface area of `S^{d-1}`.
pub fn sphere_area(d: u32) -> f64 {
    let h = d as f64 / 2.0;
    2.0 * PI.powf(h) / libm::tgamma(h)
}

/// Volume of the unit ball in `ℝ^d`.
pub fn ball_volume(d: u32) -> f64 {
    sphere_area(d) / d as f64
}

fn check_dim(d: u32) -> Result<()> {
    if d < 2 {
        return Err(invalid(format!("dimension must be at least 2, got {d}")));
    }
    Ok(())
}

/// `c_d ∫_0^θ sin^{d-2}`, the normalized measure of a polar cap of angle `θ`.
pub fn cap_fraction(d: u32, theta: f64) -> f64 {
    // ∫ sin^n = -sin^{n-1} cos / n + (n-1)/n ∫ sin^{n-2}
    let n = d as i32 - 2;
    let (s, c) = theta.sin_cos();
    let mut lo = if n % 2 == 0 { theta } else { 1.0 - c };
    let mut k = if n % 2 == 0 { 2 } else { 3 };
    while k <= n {
        lo = -s.powi(k - 1) * c / k as f64 + (k - 1) as f64 / k as f64 * lo;
        k += 2;
    }
    polar_constant(d) * lo
}

/// `A_t f(x)` for `f = g(|·|)` and `|x| = r`.
///
/// Piecewise constant profiles are integrated exactly through [`cap_fraction`];
/// everything else goes through [`spherical_mean_quadrature`].
pub fn spherical_mean_radial(g: &RadialProfile, d: u32, t: f64, r: f64) -> Result<f64> {
    check_args(d, t, r)?;
    if r == 0.0 {
        return Ok(g.eval(t));
    }
    let cap = |b: f64| -> f64 {
        let c = (r * r + t * t - b * b) / (2.0 * r * t);
        if c >= 1.0 {
            0.0
        } else if c <= -1.0 {
            1.0
        } else {
            cap_fraction(d, c.acos())
        }
    };
    match g {
        RadialProfile::Constant { value } => Ok(*value),
        RadialProfile::Ball { radius } => Ok(cap(*radius)),
        RadialProfile::Shell { inner, outer } => Ok((cap(*outer) - cap(*inner)).max(0.0)),
        _ => spherical_mean_quadrature(g, d, t, r),
    }
}

fn check_args(d: u32, t: f64, r: f64) -> Result<()> {
    check_dim(d)?;
    if !(t > 0.0) || !(r >= 0.0) {
        return Err(invalid(format!("need t > 0 and r >= 0, got t={t}, r={r}")));
    }
    Ok(())
}

/// The polar-angle integral by composite Gauss-Legendre quadrature, split where
/// `|x - t u|` crosses a breakpoint of `g`.
pub fn spherical_mean_quadrature(g: &RadialProfile, d: u32, t: f64, r: f64) -> Result<f64> {
    check_args(d, t, r)?;
    if r == 0.0 {
        return Ok(g.eval(t));
    }
    let (near, far) = ((r - t).abs(), r + t);
    if let Some(s) = g.support_radius() {
        if near > s {
            return Ok(0.0);
        }
    }
    let dist = |theta: f64| (r * r + t * t - 2.0 * r * t * theta.cos()).max(0.0).sqrt();
    let mut breaks = vec![0.0, PI];
    for b in g.breakpoints() {
        if b > near && b < far {
            let c = ((r * r + t * t - b * b) / (2.0 * r * t)).clamp(-1.0, 1.0);
            breaks.push(c.acos());
        }
    }
    breaks.sort_by(f64::total_cmp);
    let power = d as i32 - 2;
    let f = |theta: f64| g.eval(dist(theta)) * theta.sin().powi(power);
    let v = integrate(&f, &breaks, |_, _| 2, QUAD_TOL)?;
    Ok(polar_constant(d) * v)
}

/// Monte Carlo estimate of the same mean from `samples` uniform sphere points,
/// with its standard error.
pub fn spherical_mean_mc(
    g: &RadialProfile,
    d: u32,
    t: f64,
    r: f64,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    check_dim(d)?;
    const CHUNK: usize = 1 << 14;
    let chunks = samples.div_ceil(CHUNK);
    let sums: Vec<(f64, f64, usize)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = rng::stream(seed, c as u64);
            let m = CHUNK.min(samples - c * CHUNK);
            let mut u = vec![0.0; d as usize];
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..m {
                for x in u.iter_mut() {
                    *x = rng.sample(StandardNormal);
                }
                let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
                let first = r + t * u[0] / norm;
                let rest: f64 = u[1..].iter().map(|x| (t * x / norm).powi(2)).sum();
                let v = g.eval((first * first + rest).sqrt());
                s += v;
                s2 += v * v;
            }
            (s, s2, m)
        })
        .collect();
    let (s, s2, m) = sums
        .iter()
        .fold((0.0, 0.0, 0usize), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    let n = m as f64;
    let mean = s / n;
    let var = (s2 / n - mean * mean).max(0.0);
    Ok((mean, (var / n).sqrt()))
}

/// Sample radii with their cell widths.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub r: Vec<f64>,
    pub width: Vec<f64>,
}

impl RadialGrid {
    /// Cell midpoints of `[a, b]` at spacing about `h`.
    pub fn uniform(a: f64, b: f64, h: f64) -> Result<Self> {
        Self::union(&[(a, b)], h)
    }

    /// Cell midpoints over a union of intervals, merging overlaps first.
    pub fn union(intervals: &[(f64, f64)], h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(invalid("grid spacing must be positive"));
        }
        let mut iv: Vec<(f64, f64)> = intervals.iter().map(|&(a, b)| (a.max(0.0), b)).filter(|(a, b)| b > a).collect();
        iv.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (a, b) in iv {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        let (mut r, mut width) = (Vec::new(), Vec::new());
        for (a, b) in merged {
            let m = ((b - a) / h).ceil().max(1.0) as usize;
            let w = (b - a) / m as f64;
            for i in 0..m {
                r.push(a + (i as f64 + 0.5) * w);
                width.push(w);
            }
        }
        Ok(RadialGrid { r, width })
    }

    /// Volume of each cell's shell in `ℝ^d` (midpoint rule).
    pub fn volumes(&self, d: u32) -> Vec<f64> {
        let area = sphere_area(d);
        self.r.iter().zip(&self.width).map(|(r, w)| area * r.powi(d as i32 - 1) * w).collect()
    }
}

/// Values of a radial function on a grid, with shell volumes.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RadialSamples {
    pub r: Vec<f64>,
    pub volume: Vec<f64>,
    pub value: Vec<f64>,
}

impl RadialSamples {
    pub fn from_profile(g: &RadialProfile, grid: &RadialGrid, d: u32) -> Self {
        RadialSamples { r: grid.r.clone(), volume: grid.volumes(d), value: grid.r.iter().map(|&r| g.eval(r)).collect() }
    }

    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "r,value")?;
        for (r, v) in self.r.iter().zip(&self.value) {
            writeln!(w, "{r},{v}")?;
        }
        Ok(())
    }
}

/// `sup_{t ∈ E_trunc} |A_t f(r)|` on a radial grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaximalField {
    pub samples: RadialSamples,
    /// The radii the sup was taken over. The field is a lower bound for `M_E f`.
    pub e_trunc: Vec<f64>,
}

/// Radii of the blocks `k_window` materialized at `t_resolution` and sampled at
/// that spacing.
pub fn truncate(set: &DilationSet, k_window: (i32, i32), t_resolution: f64) -> Result<Vec<f64>> {
    if !(t_resolution > 0.0) {
        return Err(invalid("t_resolution must be positive"));
    }
    let mut ts = Vec::new();
    for k in k_window.0..=k_window.1 {
        if !set.k_range().contains(k) {
            continue;
        }
        ts.extend(set.block(k, t_resolution)?.sample_radii(t_resolution));
    }
    ts.retain(|t| *t > 0.0);
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    Ok(ts)
}

/// Maximal field over an explicit radius list.
pub fn maximal_field_over(g: &RadialProfile, d: u32, ts: &[f64], grid: &RadialGrid) -> Result<MaximalField> {
    check_dim(d)?;
    let mut ts = ts.to_vec();
    ts.sort_by(f64::total_cmp);
    let reach = g.support_radius();
    let value: Vec<f64> = grid
        .r
        .par_iter()
        .map(|&r| {
            // only radii with |r - t| <= support can see the function
            let (lo, hi) = match reach {
                Some(s) => (ts.partition_point(|&t| t < r - s), ts.partition_point(|&t| t <= r + s)),
                None => (0, ts.len()),
            };
            ts[lo..hi].iter().try_fold(0.0f64, |m, &t| Ok(m.max(spherical_mean_radial(g, d, t, r)?.abs())))
        })
        .collect::<Result<_>>()?;
    Ok(MaximalField { samples: RadialSamples { r: grid.r.clone(), volume: grid.volumes(d), value }, e_trunc: ts })
}

/// Maximal field over the blocks `k_window` of `set`.
pub fn maximal_field(
    g: &RadialProfile,
    d: u32,
    set: &DilationSet,
    k_window: (i32, i32),
    t_resolution: f64,
    grid: &RadialGrid,
) -> Result<MaximalField> {
    maximal_field_over(g, d, &truncate(set, k_window, t_resolution)?, grid)
}

/// Lorentz quasinorm of sampled data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LorentzEstimate {
    pub p: f64,
    /// `None` for `q = ∞`.
    pub q: Option<f64>,
    pub value: f64,
    /// `(α, |{|f| > α}|)` on a log-spaced grid of levels.
    pub distribution: Vec<(f64, f64)>,
}

/// `‖f‖_{p,q}` of a step function given by sample values and cell volumes.
///
/// Uses `‖f‖_{p,q}^q = Σ_i v_i^q (S_i^{q/p} - S_{i-1}^{q/p})` over the decreasing
/// rearrangement (`v_i` sorted values, `S_i` cumulative volume), which is exact
/// for step data, equals `‖f‖_p` at `q = p` and `sup α λ(α)^{1/p}` at `q = ∞`.
pub fn lorentz_norm(samples: &RadialSamples, p: f64, q: Option<f64>) -> Result<LorentzEstimate> {
    if !(p >= 1.0) || q.is_some_and(|q| !(q > 0.0)) {
        return Err(invalid(format!("invalid Lorentz exponents p={p}, q={q:?}")));
    }
    let mut vals: Vec<(f64, f64)> =
        samples.value.iter().zip(&samples.volume).map(|(v, w)| (v.abs(), *w)).filter(|(v, _)| *v > 0.0).collect();
    vals.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut value = 0.0;
    let mut s = 0.0;
    for (v, w) in &vals {
        let next = s + w;
        match q {
            None => value = f64::max(value, v * next.powf(1.0 / p)),
            Some(q) => value += v.powf(q) * (next.powf(q / p) - s.powf(q / p)),
        }
        s = next;
    }
    if let Some(q) = q {
        value = value.powf(1.0 / q);
    }
    let distribution = match (vals.first(), vals.last()) {
        (Some(&(top, _)), Some(&(bottom, _))) => {
            let levels = 64;
            let (lt, lb) = (top.ln(), bottom.ln());
            (0..levels)
                .map(|i| {
                    let a = (lb + (lt - lb) * i as f64 / (levels - 1) as f64).exp();
                    (a, vals.iter().filter(|(v, _)| *v > a).map(|x| x.1).sum())
                })
                .collect()
        }
        _ => Vec::new(),
    };
    Ok(LorentzEstimate { p, q, value, distribution })
}

/// Smooth transition used for the frequency cutoff `β_0`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bump {
    /// built from `exp(-1/x)`
    #[default]
    Exp,
    /// built from `exp(-1/x²)`
    ExpSquared,
}

impl Bump {
    fn psi(self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match self {
            Bump::Exp => (-1.0 / x).exp(),
            Bump::ExpSquared => (-1.0 / (x * x)).exp(),
        }
    }

    /// `β_0(s)`: 1 on `[0, 1]`, 0 from 2 on, smooth in between.
    pub fn beta0(self, s: f64) -> f64 {
        let s = s.abs();
        if s <= 1.0 {
            1.0
        } else if s >= 2.0 {
            0.0
        } else {
            let (a, b) = (self.psi(2.0 - s), self.psi(s - 1.0));
            a / (a + b)
        }
    }
}

/// Dyadic frequency cutoff `β_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyCutoff {
    pub j: u32,
    pub bump: Bump,
}

impl FrequencyCutoff {
    pub fn new(j: u32, bump: Bump) -> Self {
        FrequencyCutoff { j, bump }
    }

    /// `β_j(ρ) = β_0(2^{-j}ρ) - β_0(2^{1-j}ρ)` for `j ≥ 1`.
    pub fn eval(&self, rho: f64) -> f64 {
        let b = |s| self.bump.beta0(s);
        if self.j == 0 {
            return b(rho);
        }
        b(rho * (-(self.j as f64)).exp2()) - b(rho * (1.0 - self.j as f64).exp2())
    }
}

/// Fourier transform of normalized surface measure on `S^{d-1}` at `|ξ| = ρ`.
pub fn sphere_hat(d: u32, rho: f64) -> Result<f64> {
    check_dim(d)?;
    if !(rho >= 0.0) {
        return Err(invalid("sphere_hat needs rho >= 0"));
    }
    if rho == 0.0 {
        return Ok(1.0);
    }
    let power = d as i32 - 2;
    let f = |theta: f64| (rho * theta.cos()).cos() * theta.sin().powi(power);
    // about one panel per half period of the phase
    let panels = |_, _| (rho / PI * 2.0).ceil() as usize + 2;
    Ok(polar_constant(d) * integrate(&f, &[0.0, PI], panels, QUAD_TOL)?)
}

/// One row of the multiplier decay table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub j: u32,
    /// `sup_ρ |σ̂(ρ) β_j(ρ)|`
    pub m_j: f64,
    pub rho_at_max: f64,
    /// `M_j 2^{j(d-1)/2}`
    pub normalized: f64,
}

/// `σ̂` on many radii at once: a fixed composite rule on `[0, π/2]` (the
/// integrand is symmetric about `π/2`) with enough panels for `rho_max`.
struct SphereHatRule {
    /// `(cos θ_k, c_d w_k sin^{d-2} θ_k)`, doubled for the reflected half
    nodes: Vec<(f64, f64)>,
}

impl SphereHatRule {
    fn new(d: u32, rho_max: f64) -> Result<Self> {
        let panels = 2 * ((rho_max / PI).ceil() as usize + 1);
        let c = 2.0 * polar_constant(d);
        let nodes = gauss_nodes(0.0, PI / 2.0, panels)
            .into_iter()
            .map(|(t, w)| (t.cos(), c * w * t.sin().powi(d as i32 - 2)))
            .collect();
        let rule = SphereHatRule { nodes };
        let (fixed, adaptive) = (rule.eval(rho_max), sphere_hat(d, rho_max)?);
        if (fixed - adaptive).abs() > 1e-10 {
            return Err(Error::Quadrature { estimate: fixed, residual: (fixed - adaptive).abs() });
        }
        Ok(rule)
    }

    fn eval(&self, rho: f64) -> f64 {
        self.nodes.iter().map(|&(c, w)| w * (rho * c).cos()).sum()
    }

    /// `σ̂(lo + i step)` for `i = 0..n`; phases advance by rotation and are
    /// recomputed every 256 steps.
    fn eval_grid(&self, lo: f64, step: f64, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for &(c, w) in &self.nodes {
            let (rs, rc) = (step * c).sin_cos();
            let (mut zs, mut zc) = (0.0, 0.0);
            for (i, o) in out.iter_mut().enumerate() {
                if i % 256 == 0 {
                    (zs, zc) = ((lo + i as f64 * step) * c).sin_cos();
                }
                *o += w * zc;
                (zc, zs) = (zc * rc - zs * rs, zs * rc + zc * rs);
            }
        }
        out
    }
}

/// `M_j` for each `j`, maximized over a grid of step `π/4` on the support of
/// `β_j` followed by golden-section refinement around the best grid points.
///
/// Grid and refinement use one fixed rule checked against [`sphere_hat`] at
/// the top of the support; the reported maximum is re-evaluated adaptively.
pub fn multiplier_decay(d: u32, js: impl IntoIterator<Item = u32>, bump: Bump) -> Result<Vec<DecayRow>> {
    check_dim(d)?;
    js.into_iter()
        .map(|j| {
            let cut = FrequencyCutoff::new(j, bump);
            let h = |rho: f64| -> Result<f64> { Ok((sphere_hat(d, rho)? * cut.eval(rho)).abs()) };
            let (lo, hi) = ((j as f64 - 1.0).exp2(), (j as f64 + 1.0).exp2());
            let step = PI / 4.0;
            let n = ((hi - lo) / step).ceil() as usize;
            let rule = SphereHatRule::new(d, hi)?;
            let fixed = |rho: f64| Ok((rule.eval(rho) * cut.eval(rho)).abs());
            let coarse: Vec<(f64, f64)> = rule
                .eval_grid(lo, step, n + 1)
                .into_iter()
                .enumerate()
                .map(|(i, v)| {
                    let rho = lo + i as f64 * step;
                    (rho, (v * cut.eval(rho)).abs())
                })
                .filter(|&(rho, _)| rho <= hi)
                .collect();
            let mut order: Vec<usize> = (0..coarse.len()).collect();
            order.sort_by(|&a, &b| coarse[b].1.total_cmp(&coarse[a].1));
            let mut best = coarse[order[0]];
            for &i in order.iter().take(8) {
                let c = coarse[i].0;
                let (rho, v) = golden_max(&fixed, (c - step).max(lo), (c + step).min(hi))?;
                if v > best.1 {
                    best = (rho, v);
                }
            }
            let best = (best.0, h(best.0)?);
            Ok(DecayRow { j, m_j: best.1, rho_at_max: best.0, normalized: best.1 * (j as f64 * (d as f64 - 1.0) / 2.0).exp2() })
        })
        .collect()
}

fn golden_max(f: &impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64) -> Result<(f64, f64)> {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    for _ in 0..60 {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2)?;
        }
        if b - a < 1e-10 {
            break;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

/// One ball radius of the small-ball probe.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmallBallRow {
    pub eps: f64,
    /// `‖M f‖_{p,∞} / ‖f‖_p` for `f = χ_{B(0,ε)}`
    pub ratio: f64,
    pub weak_norm: f64,
    pub f_norm: f64,
    pub radii: usize,
    pub grid_points: usize,
    /// `M_E χ_{B(0,ε)}` on the grid; kept out of JSON, dumped as CSV.
    #[serde(skip)]
    pub field: RadialSamples,
}

/// Small-ball weak-type probe on the block `E^0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmallBallReport {
    pub d: u32,
    pub p: f64,
    pub rows: Vec<SmallBallRow>,
    /// Slope of `log R(ε)` against `log(1/ε)`.
    pub slope: f64,
}

/// Tests `M_E` on `χ_{B(0,ε)}`: the field is evaluated on cells of width `ε/8`
/// around the spheres of radius `t ∈ E^0`, with `E^0` sampled at `ε/64`.
pub fn weak_type_ratio_probe(set: &DilationSet, d: u32, p: f64, eps_list: &[f64]) -> Result<SmallBallReport> {
    check_dim(d)?;
    if eps_list.iter().any(|&e| !(e > 0.0 && e < 0.25)) {
        return Err(invalid("ball radii must lie in (0, 1/4)"));
    }
    let mut rows = Vec::new();
    for &eps in eps_list {
        let h = eps / 8.0;
        let ts = truncate(set, (0, 0), h / 8.0)?;
        let spans: Vec<(f64, f64)> = ts.iter().map(|&t| (t - eps, t + eps)).collect();
        let grid = RadialGrid::union(&spans, h)?;
        let g = RadialProfile::Ball { radius: eps };
        let field = maximal_field_over(&g, d, &ts, &grid)?;
        let weak = lorentz_norm(&field.samples, p, None)?.value;
        let f_norm = (ball_volume(d) * eps.powi(d as i32)).powf(1.0 / p);
        rows.push(SmallBallRow {
            eps,
            ratio: weak / f_norm,
            weak_norm: weak,
            f_norm,
            radii: ts.len(),
            grid_points: grid.r.len(),
            field: field.samples,
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| -r.eps.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.ratio.ln()).collect();
    Ok(SmallBallReport { d, p, slope: linear_fit(&xs, &ys).0, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dilation_set::{standard_set, StandardSet};
    use proptest::prelude::*;

    #[test]
    fn trivial_means() {
        for d in 2..6 {
            let one = RadialProfile::Constant { value: 1.0 };
            assert_eq!(spherical_mean_radial(&one, d, 0.7, 1.3).unwrap(), 1.0);
            // exercise the quadrature path for a constant too
            let wide = RadialProfile::Ball { radius: 100.0 };
            assert!((spherical_mean_quadrature(&wide, d, 0.7, 1.3).unwrap() - 1.0).abs() < 1e-10);
            let ball = RadialProfile::Ball { radius: 1.0 };
            assert_eq!(spherical_mean_radial(&ball, d, 0.9, 0.0).unwrap(), 1.0);
            assert_eq!(spherical_mean_radial(&ball, d, 1.1, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn exact_caps_match_quadrature() {
        for d in 2..9 {
            assert!((cap_fraction(d, PI) - 1.0).abs() < 1e-12, "d={d}");
            for (g, t, r) in [
                (RadialProfile::Ball { radius: 0.3 }, 1.0, 1.1),
                (RadialProfile::Ball { radius: 2.0 }, 1.5, 0.9),
                (RadialProfile::Shell { inner: 0.5, outer: 0.9 }, 0.7, 0.6),
            ] {
                let a = spherical_mean_radial(&g, d, t, r).unwrap();
                let b = spherical_mean_quadrature(&g, d, t, r).unwrap();
                assert!((a - b).abs() < 1e-12, "d={d} {g:?}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn polar_constant_normalizes() {
        for d in 2..8 {
            let p = d as i32 - 2;
            let v = quadrature::gauss_panels(&|t: f64| t.sin().powi(p), 0.0, PI, 64);
            assert!((polar_constant(d) * v - 1.0).abs() < 1e-12, "d={d}");
        }
        assert!((ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn mean_matches_monte_carlo() {
        let g = RadialProfile::Ball { radius: 1.0 };
        let q = spherical_mean_radial(&g, 3, 1.0, 1.5).unwrap();
        // cap where |x - t u| <= 1: cos θ >= (r² + t² - 1)/(2rt)
        let exact = (1.0 - (1.5f64 * 1.5) / 3.0) / 2.0;
        assert!((q - exact).abs() < 1e-12);
        let (mc, se) = spherical_mean_mc(&g, 3, 1.0, 1.5, 1_000_000, 11).unwrap();
        assert!((mc - q).abs() < 3.0 * se, "{mc} ± {se} vs {q}");
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let g = RadialProfile::Gaussian { sigma: 0.5 };
        let a = spherical_mean_mc(&g, 4, 0.8, 0.3, 40_000, 5).unwrap();
        let b = spherical_mean_mc(&g, 4, 0.8, 0.3, 40_000, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn cap_measure_of_small_ball() {
        let eps = 0.05;
        let g = RadialProfile::Ball { radius: eps };
        let e = DilationSet::finite(crate::dilation_set::Representation::ExplicitFinite(
            crate::dilation_set::ExplicitFinite::new(vec![1.0]).unwrap(),
        ))
        .unwrap();
        let grid = RadialGrid::uniform(0.9, 1.1, 0.01).unwrap();
        let field = maximal_field(&g, 3, &e, (0, 0), 1e-3, &grid).unwrap();
        for (r, v) in field.samples.r.iter().zip(&field.samples.value) {
            let c = ((r * r + 1.0 - eps * eps) / (2.0 * r)).clamp(-1.0, 1.0);
            let want = if (r - 1.0).abs() < eps { (1.0 - c) / 2.0 } else { 0.0 };
            assert!((v - want).abs() < 1e-12, "r={r}: {v} vs {want}");
        }
        // cap area ≍ ε^{d-1}
        let peak = field.samples.value.iter().cloned().fold(0.0, f64::max);
        assert!(peak > 0.1 * eps * eps && peak < eps * eps);
    }

    #[test]
    fn field_dominates_and_grows_with_e() {
        let g = RadialProfile::Exponential { rate: 3.0 };
        let grid = RadialGrid::uniform(0.0, 3.0, 0.05).unwrap();
        let small = maximal_field_over(&g, 2, &[1.0], &grid).unwrap();
        let large = maximal_field_over(&g, 2, &[1.0, 1.25, 1.5], &grid).unwrap();
        for i in 0..grid.r.len() {
            let single = spherical_mean_radial(&g, 2, 1.0, grid.r[i]).unwrap().abs();
            assert_eq!(small.samples.value[i], single);
            assert!(large.samples.value[i] >= small.samples.value[i]);
        }
    }

    #[test]
    fn lorentz_of_shell_and_exponential() {
        let grid = RadialGrid::uniform(0.0, 40.0, 1e-3).unwrap();
        let shell = RadialSamples::from_profile(&RadialProfile::Shell { inner: 1.0, outer: 2.0 }, &grid, 2);
        let v: f64 = shell.volume.iter().zip(&shell.value).map(|(w, x)| w * x).sum();
        for p in [1.2, 1.5, 3.0] {
            let weak = lorentz_norm(&shell, p, None).unwrap().value;
            assert!((weak - v.powf(1.0 / p)).abs() < 1e-12);
        }
        let f = RadialSamples::from_profile(&RadialProfile::Exponential { rate: 1.0 }, &grid, 2);
        let p = 1.5;
        let direct = (2.0 * PI / (p * p)).powf(1.0 / p);
        let lp = lorentz_norm(&f, p, Some(p)).unwrap().value;
        assert!((lp / direct - 1.0).abs() < 0.01, "{lp} vs {direct}");
        let mut g = f.clone();
        g.value.iter_mut().for_each(|x| *x *= 3.0);
        let a = lorentz_norm(&g, p, Some(2.5)).unwrap().value;
        let b = lorentz_norm(&f, p, Some(2.5)).unwrap().value;
        assert!((a - 3.0 * b).abs() < 1e-12 * a);
    }

    #[test]
    fn sphere_hat_closed_forms() {
        for d in 2..6 {
            assert_eq!(sphere_hat(d, 0.0).unwrap(), 1.0);
        }
        for rho in [1.0f64, 10.0, 50.0] {
            assert!((sphere_hat(3, rho).unwrap() - rho.sin() / rho).abs() < 1e-8);
        }
        // d = 2 gives J_0; compare against its large-argument envelope
        for rho in [10.0f64, 100.0, 1000.0] {
            let peak = (0..64)
                .map(|i| sphere_hat(2, rho + i as f64 * PI / 64.0).unwrap().abs())
                .fold(0.0, f64::max);
            let envelope = (2.0 / (PI * rho)).sqrt();
            assert!(peak < 2.0 * envelope && peak > envelope / 2.0, "rho={rho}: {peak} vs {envelope}");
        }
    }

    #[test]
    fn multiplier_decay_bands() {
        for d in [2, 3] {
            let rows = multiplier_decay(d, 4..=9, Bump::Exp).unwrap();
            let (lo, hi) = rows.iter().fold((f64::MAX, 0.0f64), |a, r| (a.0.min(r.normalized), a.1.max(r.normalized)));
            assert!(hi / lo < 4.0, "d={d}: {rows:?}");
        }
        let a = multiplier_decay(3, [6], Bump::Exp).unwrap()[0].normalized;
        let b = multiplier_decay(3, [6], Bump::ExpSquared).unwrap()[0].normalized;
        assert!((a / b - 1.0).abs() < 0.5);
    }

    #[test]
    fn small_ball_probe_brackets() {
        let lac = standard_set(StandardSet::Lacunary).unwrap();
        let r = weak_type_ratio_probe(&lac, 2, 1.5, &[1e-2, 1e-3]).unwrap();
        assert!(r.slope < 0.02, "{r:?}");
        let full = standard_set(StandardSet::Full).unwrap();
        let grows = weak_type_ratio_probe(&full, 2, 1.3, &[1e-2, 1e-3]).unwrap();
        let flat = weak_type_ratio_probe(&full, 2, 2.2, &[1e-2, 1e-3]).unwrap();
        assert!(grows.slope > 0.2, "{grows:?}");
        assert!(flat.slope < 0.02, "{flat:?}");
    }

    proptest! {
        #[test]
        fn telescoping(rho in 0.0f64..1e5, big in 0u32..20) {
            for bump in [Bump::Exp, Bump::ExpSquared] {
                let sum: f64 = (0..=big).map(|j| FrequencyCutoff::new(j, bump).eval(rho)).sum();
                prop_assert!((sum - bump.beta0(rho * (-(big as f64)).exp2())).abs() < 1e-12);
            }
        }

        #[test]
        fn lorentz_ordering(vals in proptest::collection::vec(0.0f64..10.0, 1..60), p in 1.1f64..3.0, dq in 0.1f64..5.0) {
            let n = vals.len();
            let s = RadialSamples { r: vec![1.0; n], volume: (0..n).map(|i| 0.5 + (i % 3) as f64).collect(), value: vals };
            let weak = lorentz_norm(&s, p, None).unwrap().value;
            let mid = lorentz_norm(&s, p, Some(p + dq)).unwrap().value;
            let strong = lorentz_norm(&s, p, Some(p)).unwrap().value;
            prop_assert!(weak <= mid * (1.0 + 1e-12) && mid <= strong * (1.0 + 1e-12), "{weak} {mid} {strong}");
        }

        #[test]
        fn quadrature_agrees_with_sampling(d in 2u32..5, t in 0.2f64..2.0, r in 0.05f64..2.0, s in 0.2f64..1.5, seed in 0u64..1000) {
            let g = RadialProfile::Gaussian { sigma: s };
            let q = spherical_mean_radial(&g, d, t, r).unwrap();
            let (mc, se) = spherical_mean_mc(&g, d, t, r, 20_000, seed).unwrap();
            prop_assert!((mc - q).abs() < 5.0 * se + 1e-12);
        }
    }
}
