//! Endpoint conditions on entropy profiles.
//!
//! Every check evaluates a sup or a series truncated at a sequence of depths,
//! then classifies the running value with [`TrendPolicy`].

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::entropy::EntropyProfile;
use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    pub d: u32,
    pub p: f64,
    /// `None` is `q = ∞`.
    pub q: Option<f64>,
    pub p_conj: f64,
    pub p_d: f64,
}

impl Exponents {
    pub fn new(d: u32, p: f64, q: Option<f64>) -> Result<Self> {
        if d < 2 {
            return Err(invalid("dimension must be at least 2"));
        }
        if !(p > 1.0 && p <= 2.0) {
            return Err(invalid(format!("p must lie in (1, 2], got {p}")));
        }
        if let Some(q) = q {
            if !(q >= p && q.is_finite()) {
                return Err(invalid(format!("q must satisfy p <= q < inf, got {q}")));
            }
        }
        let dm1 = (d - 1) as f64;
        Ok(Exponents { d, p, q, p_conj: p / (p - 1.0), p_d: (dm1 + 1.0) / dm1 })
    }

    fn dm1(&self) -> f64 {
        (self.d - 1) as f64
    }
}

/// `ζ(s)` for `s > 1` by Euler–Maclaurin summation.
pub fn zeta(s: f64) -> f64 {
    const M: usize = 64;
    let m = M as f64;
    let head: f64 = (1..M).map(|i| (i as f64).powf(-s)).sum();
    head + em_tail(s, m)
}

/// `Σ_{i ≥ m} i^{-s}` by Euler–Maclaurin through the `B_8` term.
fn em_tail(s: f64, m: f64) -> f64 {
    let mut t = m.powf(1.0 - s) / (s - 1.0) + 0.5 * m.powf(-s);
    // B_{2k}/(2k)! times s(s+1)...(s+2k-2)
    let coeffs = [1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1209600.0];
    let mut rising = s;
    for (k, c) in coeffs.iter().enumerate() {
        t += c * rising * m.powf(-s - 2.0 * k as f64 - 1.0);
        rising *= (s + 2.0 * k as f64 + 1.0) * (s + 2.0 * k as f64 + 2.0);
    }
    t
}

/// `ω_j = (Z_ε (1+j)^{1+ε})^{1/p'}`, so that `Σ ω_j^{-p'} = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightSequence {
    pub p: f64,
    pub eps: f64,
    pub z_eps: f64,
}

pub const DEFAULT_EPS: f64 = 0.1;
pub const EPS_SWEEP: [f64; 4] = [0.5, 0.2, 0.1, 0.05];

pub fn make_weights(p: f64, eps: f64) -> Result<WeightSequence> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(invalid(format!("weight margin must be positive, got {eps}")));
    }
    if !(p > 1.0) {
        return Err(invalid("p must exceed 1"));
    }
    Ok(WeightSequence { p, eps, z_eps: zeta(1.0 + eps) })
}

impl WeightSequence {
    pub fn p_conj(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    pub fn omega(&self, j: u32) -> f64 {
        (self.z_eps * (1.0 + j as f64).powf(1.0 + self.eps)).powf(1.0 / self.p_conj())
    }

    /// `Σ_{j<J} ω_j^{-p'}` plus an upper bound on the rest.
    pub fn certified_sum(&self, terms: u32) -> f64 {
        let s = 1.0 + self.eps;
        let partial: f64 = (0..terms).map(|j| self.omega(j).powf(-self.p_conj())).sum();
        // Dropping the negative B_4 term keeps this an upper bound.
        let m = terms as f64 + 1.0;
        let tail = m.powf(1.0 - s) / (s - 1.0) + 0.5 * m.powf(-s) + s / 12.0 * m.powf(-s - 1.0);
        partial + tail / self.z_eps
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionId {
    Cpq,
    Cpinf,
    Prop12,
    Carleson,
    Eq113,
    Eq114,
    RP,
    RTilde,
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ConditionId::Cpq => "cpq",
            ConditionId::Cpinf => "cpinf",
            ConditionId::Prop12 => "prop12",
            ConditionId::Carleson => "carleson",
            ConditionId::Eq113 => "eq113",
            ConditionId::Eq114 => "eq114",
            ConditionId::RP => "r_p",
            ConditionId::RTilde => "r_tilde",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Cell { k: i32, n: u32 },
    Scale { j: i32 },
    Interval { start: i32, len: u32 },
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionVerdict {
    pub condition: ConditionId,
    pub value: f64,
    pub trend: f64,
    pub verdict: Verdict,
    pub witness: Witness,
    /// `(depth, value truncated at depth)`.
    pub running: Vec<(u32, f64)>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub components: BTreeMap<String, f64>,
}

/// Decision rule for truncated evaluations.
///
/// `trend` is the log-log slope of the running value against depth over the
/// last doubling of depth. Fails iff `trend ≥ fail_slope`. Holds iff not
/// failing and each of the last `hold_levels` values moves by less than
/// `hold_rel_change` relative to the next.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrendPolicy {
    pub fail_slope: f64,
    pub hold_rel_change: f64,
    pub hold_levels: usize,
}

impl Default for TrendPolicy {
    fn default() -> Self {
        TrendPolicy { fail_slope: 0.1, hold_rel_change: 1e-3, hold_levels: 3 }
    }
}

impl TrendPolicy {
    pub fn classify(&self, running: &[(u32, f64)]) -> (f64, Verdict) {
        let Some(&(dmax, vmax)) = running.last() else {
            return (0.0, Verdict::Inconclusive);
        };
        let half = running
            .iter()
            .find(|(d, _)| 2 * d >= dmax)
            .copied()
            .unwrap_or(running[0]);
        let trend = if half.0 == dmax || half.0 == 0 {
            0.0
        } else if half.1 <= 0.0 {
            if vmax > 0.0 { f64::INFINITY } else { 0.0 }
        } else {
            (vmax / half.1).ln() / (dmax as f64 / half.0 as f64).ln()
        };
        if trend >= self.fail_slope {
            return (trend, Verdict::Fails);
        }
        if running.len() < self.hold_levels {
            return (trend, Verdict::Inconclusive);
        }
        let tail = &running[running.len() - self.hold_levels..];
        let stable = tail.windows(2).all(|w| {
            let (a, b) = (w[0].1, w[1].1);
            b == a || (b - a).abs() <= self.hold_rel_change * b.abs()
        });
        (trend, if stable { Verdict::Holds } else { Verdict::Inconclusive })
    }

    fn verdict(
        &self,
        condition: ConditionId,
        running: Vec<(u32, f64)>,
        witness: Witness,
    ) -> ConditionVerdict {
        let (trend, verdict) = self.classify(&running);
        ConditionVerdict {
            condition,
            value: running.last().map(|r| r.1).unwrap_or(0.0),
            trend,
            verdict,
            witness,
            running,
            components: BTreeMap::new(),
        }
    }
}

fn inconclusive(condition: ConditionId) -> ConditionVerdict {
    ConditionVerdict {
        condition,
        value: f64::NAN,
        trend: f64::NAN,
        verdict: Verdict::Inconclusive,
        witness: Witness::None,
        running: Vec::new(),
        components: BTreeMap::new(),
    }
}

/// Block indices at which a scale-`j` series can be read.
fn scales(profile: &EntropyProfile) -> Vec<i32> {
    if profile.periodic {
        vec![profile.k_window.0]
    } else {
        (profile.k_window.0..=profile.k_window.1).collect()
    }
}

/// `N(E^{j+n}, 2^j)`, or `None` outside the table.
fn coupled(profile: &EntropyProfile, j: i32, n: u32) -> Option<f64> {
    profile.get(j + n as i32, n).map(|v| v as f64)
}

/// `sup_j (Σ_n N(E^{j+n},2^j)^{q/p} 2^{-n(d-1)q/p'})^{1/q}`.
pub fn check_cpq(profile: &EntropyProfile, e: &Exponents, policy: &TrendPolicy) -> Result<ConditionVerdict> {
    let q = e.q.ok_or_else(|| invalid("check_cpq needs finite q; use check_cp_inf"))?;
    let rate = e.dm1() * q / e.p_conj;
    let mut series: Vec<(i32, Vec<f64>)> = Vec::new();
    for j in scales(profile) {
        let terms: Vec<f64> = (0..=profile.n_max)
            .map_while(|n| coupled(profile, j, n))
            .enumerate()
            .map(|(n, v)| v.powf(q / e.p) * (-(n as f64) * rate).exp2())
            .collect();
        if !terms.is_empty() {
            series.push((j, terms));
        }
    }
    if series.is_empty() {
        return Ok(inconclusive(ConditionId::Cpq));
    }
    let (running, witness, plain) = running_series(&series, q);
    let mut v = policy.verdict(ConditionId::Cpq, running, witness);
    v.components.insert("truncated".into(), plain);
    Ok(v)
}

/// Geometric extrapolation of `Σ_{i>m} t_i` from the decay of the last terms.
/// Zero when the terms are not visibly decaying.
fn geometric_tail(t: &[f64]) -> f64 {
    const SPAN: usize = 4;
    if t.len() <= SPAN {
        return 0.0;
    }
    let last = t[t.len() - 1];
    let rho = (last / t[t.len() - 1 - SPAN]).powf(1.0 / SPAN as f64);
    if rho < 1.0 {
        last * rho / (1.0 - rho)
    } else {
        0.0
    }
}

/// Running sup over series of `(Σ_{i≤m} t_i + tail_m)^{1/r}`, the witness,
/// and the witness's full-depth value without the tail.
fn running_series(series: &[(i32, Vec<f64>)], r: f64) -> (Vec<(u32, f64)>, Witness, f64) {
    let depth = series.iter().map(|(_, t)| t.len()).max().unwrap_or(0);
    let mut running = Vec::with_capacity(depth);
    let mut witness = Witness::None;
    for m in 0..depth {
        let mut best = f64::NEG_INFINITY;
        for (j, t) in series {
            let t = &t[..t.len().min(m + 1)];
            let s = (t.iter().sum::<f64>() + geometric_tail(t)).powf(1.0 / r);
            if s > best {
                best = s;
                witness = Witness::Scale { j: *j };
            }
        }
        running.push((m as u32, best));
    }
    let plain = match witness {
        Witness::Scale { j } => {
            series.iter().find(|s| s.0 == j).map(|s| s.1.iter().sum::<f64>().powf(1.0 / r))
        }
        _ => None,
    };
    (running, witness, plain.unwrap_or(f64::NAN))
}

/// `sup_{k,n} N(E^k, 2^{k-n})^{1/p} 2^{-n(d-1)/p'}`.
pub fn check_cp_inf(profile: &EntropyProfile, e: &Exponents, policy: &TrendPolicy) -> ConditionVerdict {
    let mut running = Vec::new();
    let mut best = f64::NEG_INFINITY;
    let mut witness = Witness::None;
    for n in 0..=profile.n_max {
        for (k, row) in profile.blocks() {
            let v = (row[n as usize] as f64).powf(1.0 / e.p) * (-(n as f64) * e.dm1() / e.p_conj).exp2();
            if v > best {
                best = v;
                witness = Witness::Cell { k, n };
            }
        }
        running.push((n, best));
    }
    policy.verdict(ConditionId::Cpinf, running, witness)
}

/// `A_0 = sup_k (Σ_j ω_j^p N(E^{k+j}, 2^k) 2^{-j(d-1)p/p'})^{1/p}`.
pub fn check_prop12(
    profile: &EntropyProfile,
    e: &Exponents,
    w: &WeightSequence,
    policy: &TrendPolicy,
) -> ConditionVerdict {
    let rate = e.dm1() * e.p / e.p_conj;
    let mut series: Vec<(i32, Vec<f64>)> = Vec::new();
    for k in scales(profile) {
        let terms: Vec<f64> = (0..=profile.n_max)
            .map_while(|j| coupled(profile, k, j))
            .enumerate()
            .map(|(j, v)| w.omega(j as u32).powf(e.p) * v * (-(j as f64) * rate).exp2())
            .collect();
        if !terms.is_empty() {
            series.push((k, terms));
        }
    }
    if series.is_empty() {
        return inconclusive(ConditionId::Prop12);
    }
    let (running, witness, plain) = running_series(&series, e.p);
    let mut v = policy.verdict(ConditionId::Prop12, running, witness);
    v.components.insert("truncated".into(), plain);
    v.components.insert("eps".into(), w.eps);
    v
}

/// Runs [`check_prop12`] for each margin in [`EPS_SWEEP`] and keeps the
/// smallest `A_0` among those that hold (or among all if none hold).
pub fn check_prop12_sweep(profile: &EntropyProfile, e: &Exponents, policy: &TrendPolicy) -> Result<ConditionVerdict> {
    let mut all = Vec::new();
    for eps in EPS_SWEEP {
        all.push(check_prop12(profile, e, &make_weights(e.p, eps)?, policy));
    }
    let holds: Vec<&ConditionVerdict> = all.iter().filter(|v| v.verdict == Verdict::Holds).collect();
    let pool: Vec<&ConditionVerdict> = if holds.is_empty() { all.iter().collect() } else { holds };
    let best = pool.into_iter().min_by(|a, b| a.value.total_cmp(&b.value)).unwrap();
    Ok(best.clone())
}

/// Tent averages `|I|^{-1} Σ_{k∈I} Σ_{1≤n≤|I|} N(E^k,2^{k-n}) 2^{-n} n^{1/(d-1)}`
/// over every integer interval `I` of length `1..=l_max` inside the window.
///
/// Inner sums stop at `n_max`, so `l_max` is clamped to it.
pub fn check_carleson(profile: &EntropyProfile, e: &Exponents, l_max: u32, policy: &TrendPolicy) -> ConditionVerdict {
    let l_max = l_max.clamp(1, profile.n_max.max(1));
    let expo = 1.0 / e.dm1();
    // prefix[k][L] = Σ_{1≤n≤L} N 2^{-n} n^{1/(d-1)}
    let prefix: BTreeMap<i32, Vec<f64>> = profile
        .blocks()
        .map(|(k, row)| {
            let mut acc = vec![0.0];
            for n in 1..=profile.n_max as usize {
                let t = row[n] as f64 * (-(n as f64)).exp2() * (n as f64).powf(expo);
                acc.push(acc[n - 1] + t);
            }
            (k, acc)
        })
        .collect();
    let mut running = Vec::new();
    let mut best = f64::NEG_INFINITY;
    let mut witness = Witness::None;
    for len in 1..=l_max {
        if profile.periodic {
            let v = prefix.values().next().unwrap()[len as usize];
            if v > best {
                best = v;
                witness = Witness::Interval { start: profile.k_window.0, len };
            }
        } else {
            let (lo, hi) = profile.k_window;
            for start in lo..=(hi - len as i32 + 1) {
                let s: f64 = (start..start + len as i32).map(|k| prefix[&k][len as usize]).sum();
                let v = s / len as f64;
                if v > best {
                    best = v;
                    witness = Witness::Interval { start, len };
                }
            }
        }
        if best.is_finite() {
            running.push((len, best));
        }
    }
    policy.verdict(ConditionId::Carleson, running, witness)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogVariant {
    /// `N 2^{-n} (n log 2)^{1/(d-1)}`
    Eq113,
    /// The same times `log(n log 2)`.
    Eq114,
}

pub fn check_logbound(profile: &EntropyProfile, e: &Exponents, variant: LogVariant, policy: &TrendPolicy) -> ConditionVerdict {
    let id = match variant {
        LogVariant::Eq113 => ConditionId::Eq113,
        LogVariant::Eq114 => ConditionId::Eq114,
    };
    let mut running = Vec::new();
    let mut best = f64::NEG_INFINITY;
    let mut witness = Witness::None;
    for n in 4..=profile.n_max {
        let l = n as f64 * std::f64::consts::LN_2;
        let mut factor = (-(n as f64)).exp2() * l.powf(1.0 / e.dm1());
        if variant == LogVariant::Eq114 {
            factor *= l.ln();
        }
        for (k, row) in profile.blocks() {
            let v = row[n as usize] as f64 * factor;
            if v > best {
                best = v;
                witness = Witness::Cell { k, n };
            }
        }
        running.push((n, best));
    }
    if running.is_empty() {
        return inconclusive(id);
    }
    policy.verdict(id, running, witness)
}
