//! Equally spaced sets and the dyadic gap-class decomposition of convex sequences.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::conditions::{ConditionId, ConditionVerdict, Exponents, TrendPolicy, Verdict, WeightSequence, Witness};
use crate::dilation_set::{DilationSet, Item, ResolvedSet};
use crate::entropy::{greedy_cover_count, EntropyProfile};
use crate::error::{invalid, Error, Result};
use crate::stats::linear_fit;

/// Deviation constant used for every family produced here.
pub const UNIFORM_DEVIATION: f64 = 2.0;

/// Every point's nearest-neighbour distance lies in `[width/c, c·width]`.
pub fn is_equally_spaced(points: &[f64], width: f64, c: f64) -> bool {
    nearest_distances(points).all(|nn| nn >= width / c && nn <= c * width)
}

fn nearest_distances(points: &[f64]) -> impl Iterator<Item = f64> + '_ {
    (0..if points.len() > 1 { points.len() } else { 0 }).map(move |i| {
        let left = if i > 0 { points[i] - points[i - 1] } else { f64::INFINITY };
        let right = if i + 1 < points.len() { points[i + 1] - points[i] } else { f64::INFINITY };
        left.min(right)
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquallySpacedSet {
    pub points: Vec<f64>,
    pub width: f64,
    /// Smallest `C` for which the set is equally spaced with this width.
    pub deviation: f64,
}

impl EquallySpacedSet {
    pub fn new(mut points: Vec<f64>, width: f64) -> Self {
        points.sort_by(f64::total_cmp);
        let deviation = nearest_distances(&points)
            .map(|nn| (nn / width).max(width / nn))
            .fold(1.0, f64::max);
        EquallySpacedSet { points, width, deviation }
    }

    pub fn card(&self) -> usize {
        self.points.len()
    }

    pub fn a(&self) -> f64 {
        self.points[0]
    }

    pub fn b(&self) -> f64 {
        *self.points.last().unwrap()
    }
}

/// The unmaterialized tail of a generator block.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailFamily {
    pub lo: f64,
    pub hi: f64,
    pub mu: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquallySpacedDecomposition {
    pub k: i32,
    pub families: BTreeMap<u32, Vec<EquallySpacedSet>>,
    pub tail: Option<TailFamily>,
    pub endpoint_set: Vec<f64>,
    pub uniform_deviation: f64,
}

/// Split a block whose points form a convex sequence into dyadic gap classes.
///
/// Points are enumerated in decreasing order `t_0 > t_1 > ...`; `t_ν` goes to
/// family `μ` when `2^{k-μ} ≤ t_ν - t_{ν+1} < 2^{k-μ+1}`. A single interval item
/// at either end is taken as the tail and becomes the deepest family. Any other
/// interval items are represented by their left endpoints.
pub fn decompose_convex(block: &ResolvedSet, k: i32) -> Result<EquallySpacedDecomposition> {
    let items = block.items();
    let intervals = items.iter().filter(|i| !i.is_point()).count();
    let tail_item: Option<Item> = match (intervals, items.first(), items.last()) {
        (1, Some(f), _) if !f.is_point() => Some(*f),
        (1, _, Some(l)) if !l.is_point() => Some(*l),
        _ => None,
    };
    let mut pts: Vec<f64> = items
        .iter()
        .filter(|i| Some(**i) != tail_item)
        .map(|i| i.lo)
        .collect();
    pts.reverse();

    // Gaps in decreasing enumeration; the tail supplies the neighbour of its
    // adjacent point.
    let mut seq = pts.clone();
    let tail_low = tail_item.map(|t| t.lo < pts.last().copied().unwrap_or(f64::INFINITY));
    match (tail_item, tail_low) {
        (Some(t), Some(true)) => seq.push(t.hi),
        (Some(t), Some(false)) => seq.insert(0, t.lo),
        _ => {}
    }
    let gaps: Vec<f64> = seq.windows(2).map(|w| w[0] - w[1]).collect();
    check_convex(&seq, &gaps)?;

    // Gap of each point in pts.
    let offset = usize::from(tail_low == Some(false));
    let scale = 2f64.powi(k);
    let class = |g: f64| (-(g / scale).log2().floor()) as u32;
    let mut families: BTreeMap<u32, Vec<EquallySpacedSet>> = BTreeMap::new();
    let mut run: Vec<f64> = Vec::new();
    let mut run_mu = 0u32;
    for (i, &t) in pts.iter().enumerate() {
        let g = gaps
            .get(i + offset)
            .or_else(|| gaps.get((i + offset).wrapping_sub(1)))
            .copied();
        let mu = g.map(class).unwrap_or(1).max(1);
        if !run.is_empty() && mu != run_mu {
            let width = scale * 2f64.powi(-(run_mu as i32));
            families.entry(run_mu).or_default().push(EquallySpacedSet::new(std::mem::take(&mut run), width));
        }
        run_mu = mu;
        run.push(t);
    }
    if !run.is_empty() {
        let width = scale * 2f64.powi(-(run_mu as i32));
        families.entry(run_mu).or_default().push(EquallySpacedSet::new(run, width));
    }

    let tail = tail_item.map(|t| {
        let threshold = block.certified_resolution() / 4.0;
        let certified = (k - threshold.log2().floor() as i32) as u32;
        let deepest = families.keys().last().copied().unwrap_or(0);
        TailFamily { lo: t.lo, hi: t.hi, mu: certified.max(deepest + 1) }
    });

    let mut endpoint_set: Vec<f64> = families.values().flatten().flat_map(|j| [j.a(), j.b()]).collect();
    if let Some(t) = tail {
        endpoint_set.extend([t.lo, t.hi]);
    }
    endpoint_set.sort_by(f64::total_cmp);
    endpoint_set.dedup();
    Ok(EquallySpacedDecomposition { k, families, tail, endpoint_set, uniform_deviation: UNIFORM_DEVIATION })
}

fn check_convex(seq: &[f64], gaps: &[f64]) -> Result<()> {
    const TOL: f64 = 1e-9;
    let mut dir = 0i8;
    for (i, w) in gaps.windows(2).enumerate() {
        let diff = w[1] - w[0];
        let s = if diff.abs() <= TOL * w[0].abs().max(w[1].abs()) {
            0
        } else if diff > 0.0 {
            1
        } else {
            -1
        };
        if s != 0 {
            if dir != 0 && s != dir {
                return Err(Error::ConvexityViolation(seq[i], seq[i + 1], seq[i + 2]));
            }
            dir = s;
        }
    }
    Ok(())
}

impl EquallySpacedDecomposition {
    /// All points across families.
    pub fn points(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.families.values().flatten().flat_map(|j| j.points.iter().copied()).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn family_card(&self, mu: u32) -> usize {
        self.families.get(&mu).map(|f| f.iter().map(|j| j.card()).sum()).unwrap_or(0)
    }

    /// `N(𝒟^k, 2^{k-j})`.
    pub fn endpoint_entropy(&self, j: u32) -> u64 {
        let items: Vec<Item> = self.endpoint_set.iter().map(|&x| Item::point(x)).collect();
        greedy_cover_count(&items, 2f64.powi(self.k - j as i32))
    }

    /// Slope of `log2 N(𝒟^k, 2^{k-j})` against `j` over `j ∈ [n_max/2, n_max]`.
    pub fn endpoint_slope(&self, n_max: u32) -> f64 {
        let js: Vec<u32> = (n_max.div_ceil(2)..=n_max).collect();
        let xs: Vec<f64> = js.iter().map(|&j| j as f64).collect();
        let ys: Vec<f64> = js.iter().map(|&j| (self.endpoint_entropy(j) as f64).log2()).collect();
        linear_fit(&xs, &ys).0
    }

    /// Running `max_{μ ≤ m} card(𝒥_μ)/N(E^k, 2^{k-μ})` for `m = 1..=n_max`.
    pub fn c1_cardinality(&self, entropy: &[u64], n_max: u32) -> Vec<(u32, f64)> {
        let mut best: f64 = 0.0;
        (1..=n_max)
            .map(|m| {
                if let Some(&n) = entropy.get(m as usize) {
                    best = best.max(self.family_card(m) as f64 / n as f64);
                }
                (m, best)
            })
            .collect()
    }

    /// Running `max_{n ≤ m}` of `(Σ_{μ≥n} 2^{-μ} card(𝒥_μ) + |tail|/2^k) / (2^{-n} N(E^k,2^{k-n}))`.
    pub fn c1_tail_sum(&self, entropy: &[u64], n_max: u32) -> Vec<(u32, f64)> {
        let scale = 2f64.powi(self.k);
        let tail = self.tail.map(|t| (t.hi - t.lo) / scale).unwrap_or(0.0);
        let mut best: f64 = 0.0;
        (1..=n_max)
            .map(|n| {
                let lhs: f64 = self
                    .families
                    .range(n..)
                    .map(|(mu, f)| (-(*mu as f64)).exp2() * f.iter().map(|j| j.card()).sum::<usize>() as f64)
                    .sum::<f64>()
                    + tail;
                if let Some(&nn) = entropy.get(n as usize) {
                    best = best.max(lhs / ((-(n as f64)).exp2() * nn as f64));
                }
                (n, best)
            })
            .collect()
    }
}

/// Levels resolved beyond `n_max`, so the deepest checked level is not at the
/// materialization edge.
const EXTRA_LEVELS: i32 = 2;

/// Decompositions over a block window, resolved for depth `n_max`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionSet {
    pub periodic: bool,
    pub n_max: u32,
    pub by_k: BTreeMap<i32, EquallySpacedDecomposition>,
}

impl DecompositionSet {
    pub fn build(set: &DilationSet, n_max: u32, k_window: (i32, i32)) -> Result<Self> {
        let periodic = set.is_periodic();
        let ks: Vec<i32> = if periodic { vec![k_window.0] } else { (k_window.0..=k_window.1).collect() };
        let mut by_k = BTreeMap::new();
        for k in ks {
            let block = set.block(k, 2f64.powi(k - n_max as i32 - EXTRA_LEVELS) / 4.0)?;
            by_k.insert(k, decompose_convex(&block, k)?);
        }
        Ok(DecompositionSet { periodic, n_max, by_k })
    }

    /// `N(𝒟^{k+j}, 2^k)`.
    fn coupled_endpoint_entropy(&self, k: i32, j: u32) -> Option<u64> {
        if self.periodic {
            self.by_k.values().next().map(|d| d.endpoint_entropy(j))
        } else {
            self.by_k.get(&(k + j as i32)).map(|d| d.endpoint_entropy(j))
        }
    }
}

fn combine(a: Verdict, b: Verdict) -> Verdict {
    match (a, b) {
        (Verdict::Fails, _) | (_, Verdict::Fails) => Verdict::Fails,
        (Verdict::Holds, Verdict::Holds) => Verdict::Holds,
        _ => Verdict::Inconclusive,
    }
}

fn row(profile: &EntropyProfile, k: i32) -> Option<Vec<u64>> {
    (0..=profile.n_max).map(|n| profile.get(k, n)).collect::<Option<Vec<u64>>>().filter(|r: &Vec<u64>| !r.is_empty())
}

/// Endpoint sparsity `C_0` and cardinality constant `C_1`; holds when both settle.
pub fn check_r_p(
    decs: &DecompositionSet,
    e: &Exponents,
    w: &WeightSequence,
    profile: &EntropyProfile,
    policy: &TrendPolicy,
) -> Result<ConditionVerdict> {
    if decs.by_k.is_empty() {
        return Err(invalid("no decompositions supplied"));
    }
    let rate = ((e.d - 1) as f64) * e.p / e.p_conj;
    let depth = decs.n_max.min(profile.n_max);

    // (b) as a series in j per block, with the same tail treatment as cpq.
    let mut c0_run: Vec<(u32, f64)> = Vec::new();
    let mut witness = Witness::None;
    for m in 0..=depth {
        let mut best = f64::NEG_INFINITY;
        for &k in decs.by_k.keys() {
            let t: Vec<f64> = (0..=m)
                .map_while(|j| decs.coupled_endpoint_entropy(k, j))
                .enumerate()
                .map(|(j, n)| n as f64 * (-(j as f64) * rate).exp2() * w.omega(j as u32).powf(e.p))
                .collect();
            let s = (t.iter().sum::<f64>() + tail_estimate(&t)).powf(1.0 / e.p);
            if s > best {
                best = s;
                witness = Witness::Scale { j: k };
            }
        }
        c0_run.push((m, best));
    }
    let (c0_trend, c0_verdict) = policy.classify(&c0_run);

    // (c)
    let mut c1_run: Vec<(u32, f64)> = vec![(0, 0.0); depth as usize];
    for (&k, dec) in &decs.by_k {
        let r = row(profile, k).ok_or_else(|| invalid(format!("profile lacks block {k}")))?;
        for (slot, (m, v)) in c1_run.iter_mut().zip(dec.c1_cardinality(&r, depth)) {
            *slot = (m, slot.1.max(v));
        }
    }
    let (_, c1_verdict) = policy.classify(&c1_run);

    let c0 = c0_run.last().map(|r| r.1).unwrap_or(f64::NAN);
    let c1 = c1_run.last().map(|r| r.1).unwrap_or(f64::NAN);
    let mut components = BTreeMap::new();
    components.insert("c0".into(), c0);
    components.insert("c1".into(), c1);
    components.insert("eps".into(), w.eps);
    Ok(ConditionVerdict {
        condition: ConditionId::RP,
        value: c0,
        trend: c0_trend,
        verdict: combine(c0_verdict, c1_verdict),
        witness,
        running: c0_run,
        components,
    })
}

fn tail_estimate(t: &[f64]) -> f64 {
    const SPAN: usize = 4;
    if t.len() <= SPAN {
        return 0.0;
    }
    let last = t[t.len() - 1];
    let rho = (last / t[t.len() - 1 - SPAN]).powf(1.0 / SPAN as f64);
    if rho < 1.0 { last * rho / (1.0 - rho) } else { 0.0 }
}

/// Smallest `C_1` in the tail-sum hypothesis, as a running max over depth.
pub fn check_r_tilde(
    decs: &DecompositionSet,
    profile: &EntropyProfile,
    policy: &TrendPolicy,
) -> Result<ConditionVerdict> {
    let depth = decs.n_max.min(profile.n_max);
    let mut run: Vec<(u32, f64)> = vec![(0, 0.0); depth as usize];
    let mut witness = Witness::None;
    let mut best = f64::NEG_INFINITY;
    for (&k, dec) in &decs.by_k {
        let r = row(profile, k).ok_or_else(|| invalid(format!("profile lacks block {k}")))?;
        let rk = dec.c1_tail_sum(&r, depth);
        if let Some(&(_, v)) = rk.last() {
            if v > best {
                best = v;
                witness = Witness::Scale { j: k };
            }
        }
        for (slot, (m, v)) in run.iter_mut().zip(rk) {
            *slot = (m, slot.1.max(v));
        }
    }
    let (trend, verdict) = policy.classify(&run);
    Ok(ConditionVerdict {
        condition: ConditionId::RTilde,
        value: run.last().map(|r| r.1).unwrap_or(f64::NAN),
        trend,
        verdict,
        witness,
        running: run,
        components: BTreeMap::new(),
    })
}
