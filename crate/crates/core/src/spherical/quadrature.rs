//! Composite Gauss-Legendre rules with panel doubling.

use std::sync::OnceLock;

use crate::error::{Error, Result};

const ORDER: usize = 10;
pub(crate) const PANEL_CAP: usize = 1 << 18;

/// Nodes and weights on [-1, 1], by Newton iteration on P_n.
fn rule() -> &'static [(f64, f64); ORDER] {
    static RULE: OnceLock<[(f64, f64); ORDER]> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = ORDER;
        let mut out = [(0.0, 0.0); ORDER];
        for (i, slot) in out.iter_mut().enumerate() {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            *slot = (x, 2.0 / ((1.0 - x * x) * dp * dp));
        }
        out
    })
}

/// Fixed rule on `panels` equal panels of [a, b].
pub(crate) fn gauss_panels(f: &impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let w = (b - a) / panels as f64;
    let half = 0.5 * w;
    let mut total = 0.0;
    for i in 0..panels {
        let mid = a + (i as f64 + 0.5) * w;
        let s: f64 = rule().iter().map(|&(x, wt)| wt * f(mid + half * x)).sum();
        total += half * s;
    }
    total
}

/// Nodes and weights of the fixed rule on `panels` equal panels of [a, b].
pub(crate) fn gauss_nodes(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let w = (b - a) / panels as f64;
    let half = 0.5 * w;
    (0..panels)
        .flat_map(|i| {
            let mid = a + (i as f64 + 0.5) * w;
            rule().iter().map(move |&(x, wt)| (mid + half * x, half * wt))
        })
        .collect()
}

/// Integral of `f` over consecutive pieces of `breaks`, doubling panels on each
/// piece until successive estimates agree to `tol` (relative) or the cap is hit.
pub(crate) fn integrate(
    f: &impl Fn(f64) -> f64,
    breaks: &[f64],
    panels: impl Fn(f64, f64) -> usize,
    tol: f64,
) -> Result<f64> {
    let mut total = 0.0;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let mut n = panels(a, b).max(1);
        let mut prev = gauss_panels(f, a, b, n);
        loop {
            n *= 2;
            let next = gauss_panels(f, a, b, n);
            let diff = (next - prev).abs();
            if diff <= tol * next.abs() || diff <= 1e-15 * (b - a) {
                total += next;
                break;
            }
            if n >= PANEL_CAP {
                return Err(Error::Quadrature { estimate: total + next, residual: diff });
            }
            prev = next;
        }
    }
    Ok(total)
}
