//! Dilation sets `E ⊂ (0, ∞)` and their dyadic blocks `E^k = E ∩ [2^k, 2^{k+1})`.
//!
//! A set is stored in one of four representations. [`DilationSet::block`]
//! turns a block into a [`ResolvedSet`]: a finite sorted list of points and
//! closed intervals whose union contains the block, fine enough that covering
//! numbers at scales `δ ≥ 4·δ_cert` can be computed by a sweep.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Hard cap on the number of items one block may materialize.
const MAX_ITEMS: usize = 1 << 24;

/// A point (`lo == hi`) or a closed interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Item {
    pub lo: f64,
    pub hi: f64,
}

impl Item {
    pub fn point(x: f64) -> Self {
        Item { lo: x, hi: x }
    }

    pub fn interval(lo: f64, hi: f64) -> Self {
        Item { lo, hi }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    fn scaled(&self, c: f64) -> Self {
        Item { lo: self.lo * c, hi: self.hi * c }
    }
}

/// Finite certified cover of one block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolvedSet {
    items: Vec<Item>,
    certified_resolution: f64,
}

impl ResolvedSet {
    /// Sorts the items and merges any that overlap.
    pub fn new(mut items: Vec<Item>, certified_resolution: f64) -> Result<Self> {
        if !(certified_resolution > 0.0 && certified_resolution.is_finite()) {
            return Err(invalid("certified resolution must be positive"));
        }
        for it in &items {
            if !(it.lo > 0.0 && it.lo <= it.hi && it.hi.is_finite()) {
                return Err(invalid(format!("bad item [{}, {}]", it.lo, it.hi)));
            }
        }
        items.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let mut merged: Vec<Item> = Vec::with_capacity(items.len());
        for it in items {
            match merged.last_mut() {
                Some(last) if it.lo <= last.hi => last.hi = last.hi.max(it.hi),
                _ => merged.push(it),
            }
        }
        Ok(ResolvedSet { items: merged, certified_resolution })
    }

    pub fn empty(certified_resolution: f64) -> Self {
        ResolvedSet { items: Vec::new(), certified_resolution }
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn certified_resolution(&self) -> f64 {
        self.certified_resolution
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    /// The isolated points, ascending.
    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        self.items.iter().filter(|i| i.is_point()).map(|i| i.lo)
    }

    pub fn scaled(&self, c: f64) -> ResolvedSet {
        ResolvedSet {
            items: self.items.iter().map(|i| i.scaled(c)).collect(),
            certified_resolution: self.certified_resolution * c,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        let idx = self.items.partition_point(|i| i.lo <= x);
        idx > 0 && self.items[idx - 1].hi >= x
    }

    /// True if every item of `other` lies inside one item of `self`.
    pub fn covers(&self, other: &ResolvedSet) -> bool {
        other.items.iter().all(|it| {
            let idx = self.items.partition_point(|i| i.lo <= it.lo);
            idx > 0 && self.items[idx - 1].hi >= it.hi
        })
    }

    /// Radii to use when the block stands in for a finite set of dilations:
    /// every point, and every interval sampled at spacing at most `spacing`
    /// including both endpoints.
    pub fn sample_radii(&self, spacing: f64) -> Vec<f64> {
        let mut out = Vec::new();
        for it in &self.items {
            if it.is_point() || spacing <= 0.0 {
                out.push(it.lo);
                if !it.is_point() {
                    out.push(it.hi);
                }
                continue;
            }
            let m = (it.len() / spacing).ceil().max(1.0) as usize;
            for i in 0..=m {
                out.push(it.lo + it.len() * i as f64 / m as f64);
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum DecayLaw {
    /// `ν^{-α}`
    Power { alpha: f64 },
    /// `log(2+ν)^{-β}`
    InverseLog { beta: f64 },
}

impl DecayLaw {
    fn phi(&self, nu: f64) -> f64 {
        match *self {
            DecayLaw::Power { alpha } => nu.powf(-alpha),
            DecayLaw::InverseLog { beta } => (2.0 + nu).ln().powf(-beta),
        }
    }

    // phi(nu) - phi(nu + 1) without cancellation.
    fn drop(&self, nu: f64) -> f64 {
        match *self {
            DecayLaw::Power { alpha } => {
                nu.powf(-alpha) * -(-alpha * (1.0 / nu).ln_1p()).exp_m1()
            }
            DecayLaw::InverseLog { beta } => {
                let a = (2.0 + nu).ln();
                let rel = (1.0 / (2.0 + nu)).ln_1p() / a;
                a.powf(-beta) * -(-beta * rel.ln_1p()).exp_m1()
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let v = match *self {
            DecayLaw::Power { alpha } => alpha,
            DecayLaw::InverseLog { beta } => beta,
        };
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(invalid(format!("decay exponent must be positive, got {v}")))
        }
    }
}

/// Strictly decreasing sequence `t_ν = limit + amplitude·φ(ν)`, `ν ≥ first_index`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotoneGenerator {
    pub law: DecayLaw,
    pub limit: f64,
    pub amplitude: f64,
    pub first_index: u64,
}

impl MonotoneGenerator {
    pub fn new(law: DecayLaw, limit: f64, amplitude: f64, first_index: u64) -> Result<Self> {
        law.validate()?;
        if !(limit > 0.0 && amplitude > 0.0 && first_index >= 1) {
            return Err(invalid("generator needs limit > 0, amplitude > 0, first index >= 1"));
        }
        Ok(MonotoneGenerator { law, limit, amplitude, first_index })
    }

    pub fn point(&self, nu: u64) -> f64 {
        self.limit + self.amplitude * self.law.phi(nu as f64)
    }

    /// `t_ν - t_{ν+1}`.
    pub fn gap(&self, nu: u64) -> f64 {
        self.amplitude * self.law.drop(nu as f64)
    }

    pub fn max_point(&self) -> f64 {
        self.point(self.first_index)
    }

    /// Smallest `ν` with `t_ν - L < δ`.
    pub fn tail_index(&self, delta: f64) -> Result<u64> {
        self.first_where(|nu| self.amplitude * self.law.phi(nu as f64) < delta)
            .ok_or_else(|| {
                Error::NonConvergentGenerator(format!("t_nu - L stays above {delta:e}"))
            })
    }

    /// Smallest `ν` with `t_ν - t_{ν+1} < δ`.
    pub fn gap_index(&self, delta: f64) -> Result<u64> {
        self.first_where(|nu| self.gap(nu) < delta).ok_or_else(|| {
            Error::NonConvergentGenerator(format!("gaps stay above {delta:e}"))
        })
    }

    /// Smallest `ν` with `t_ν < x`.
    fn first_below(&self, x: f64) -> Option<u64> {
        self.first_where(|nu| self.point(nu) < x)
    }

    /// Smallest `ν ≥ first_index` satisfying a predicate that is monotone in `ν`.
    fn first_where(&self, pred: impl Fn(u64) -> bool) -> Option<u64> {
        let mut lo = self.first_index;
        if pred(lo) {
            return Some(lo);
        }
        let mut step = 1u64;
        let mut hi;
        loop {
            hi = lo.checked_add(step)?;
            if hi > (1u64 << 62) {
                return None;
            }
            if pred(hi) {
                break;
            }
            lo = hi;
            step *= 2;
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if pred(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(hi)
    }

    /// Points in `[lo, hi)` with the tail (gaps below `δ_cert/4`) folded into
    /// one interval ending at the limit.
    fn resolve(&self, lo: f64, hi: f64, delta_cert: f64) -> Result<Vec<Item>> {
        if self.limit >= hi {
            return Ok(Vec::new());
        }
        let start = match self.first_below(hi) {
            Some(s) => s,
            None => return Ok(Vec::new()),
        };
        let mut items = Vec::new();
        if self.limit >= lo {
            let stop = self.gap_index(delta_cert / 4.0)?.max(start);
            if (stop - start) as usize > MAX_ITEMS {
                return Err(Error::TooManyItems((stop - start) as usize));
            }
            items.extend((start..stop).map(|nu| Item::point(self.point(nu))));
            items.push(Item::interval(self.limit, self.point(stop)));
        } else {
            let end = self.first_below(lo).ok_or_else(|| {
                Error::NonConvergentGenerator("generator never leaves the window".into())
            })?;
            if (end - start) as usize > MAX_ITEMS {
                return Err(Error::TooManyItems((end - start) as usize));
            }
            items.extend((start..end).map(|nu| Item::point(self.point(nu))));
        }
        items.reverse();
        Ok(items)
    }
}

/// Finite sorted set of radii.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExplicitFinite {
    points: Vec<f64>,
}

impl ExplicitFinite {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(invalid("explicit set needs at least one point"));
        }
        if points.iter().any(|&p| !(p > 0.0 && p.is_finite())) {
            return Err(invalid("explicit points must be positive and finite"));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("explicit points must be strictly increasing"));
        }
        Ok(ExplicitFinite { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    fn resolve(&self, lo: f64, hi: f64) -> Vec<Item> {
        self.points
            .iter()
            .filter(|&&p| p >= lo && p < hi)
            .map(|&p| Item::point(p))
            .collect()
    }
}

/// Self-similar set generated by `x ↦ r·x + o_i` on `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CantorIfs {
    pub lo: f64,
    pub hi: f64,
    pub ratio: f64,
    /// Cell offsets as fractions of `hi - lo`.
    pub offsets: Vec<f64>,
    /// Deepest level ever materialized.
    pub depth: u32,
}

impl CantorIfs {
    pub fn new(lo: f64, hi: f64, ratio: f64, offsets: Vec<f64>, depth: u32) -> Result<Self> {
        if !(lo > 0.0 && hi > lo) {
            return Err(invalid("Cantor base must satisfy 0 < lo < hi"));
        }
        if !(ratio > 0.0 && ratio <= 0.5) {
            return Err(invalid("Cantor ratio must lie in (0, 1/2]"));
        }
        if offsets.is_empty() {
            return Err(invalid("Cantor set needs at least one offset"));
        }
        let tol = 1e-12;
        if offsets.iter().any(|&o| o < -tol || o > 1.0 - ratio + tol) {
            return Err(invalid("offsets must lie in [0, 1 - ratio]"));
        }
        if offsets.windows(2).any(|w| w[1] - w[0] < ratio - tol) {
            return Err(invalid("offsets must be sorted and give disjoint cells"));
        }
        Ok(CantorIfs { lo, hi, ratio, offsets, depth })
    }

    /// Middle-third set on `[lo, hi]`.
    pub fn middle_third(lo: f64, hi: f64, depth: u32) -> Result<Self> {
        CantorIfs::new(lo, hi, 1.0 / 3.0, vec![0.0, 2.0 / 3.0], depth)
    }

    /// Middle-halves set on `[lo, hi]`: keep the outer quarters at each step.
    pub fn middle_halves(lo: f64, hi: f64, depth: u32) -> Result<Self> {
        CantorIfs::new(lo, hi, 0.25, vec![0.0, 0.75], depth)
    }

    /// Level needed so that cells are shorter than `len`, capped by `depth`.
    pub fn level_for(&self, len: f64) -> u32 {
        let mut m = 0;
        let mut w = self.hi - self.lo;
        while w >= len && m < self.depth {
            w *= self.ratio;
            m += 1;
        }
        m
    }

    /// All cells at level `m`, ascending.
    pub fn cells(&self, m: u32) -> Vec<Item> {
        self.cells_in(m, f64::NEG_INFINITY, f64::INFINITY)
    }

    fn cells_in(&self, m: u32, lo: f64, hi: f64) -> Vec<Item> {
        let mut out = Vec::new();
        self.descend(self.lo, self.hi - self.lo, m, lo, hi, &mut out);
        out
    }

    fn descend(&self, a: f64, w: f64, m: u32, lo: f64, hi: f64, out: &mut Vec<Item>) {
        if a + w < lo || a >= hi {
            return;
        }
        if m == 0 {
            out.push(Item::interval(a.max(lo), (a + w).min(hi)));
            return;
        }
        for &o in &self.offsets {
            self.descend(a + o * w, w * self.ratio, m - 1, lo, hi, out);
        }
    }

    fn contains_hi(&self) -> bool {
        (self.offsets.last().unwrap() + self.ratio - 1.0).abs() < 1e-12
    }

    fn resolve(&self, lo: f64, hi: f64, delta_cert: f64) -> Result<Vec<Item>> {
        let m = self.level_for(delta_cert / 4.0);
        let cells = (self.offsets.len() as f64).powi(m as i32);
        if cells > MAX_ITEMS as f64 {
            return Err(Error::TooManyItems(cells as usize));
        }
        Ok(self.cells_in(m, lo, hi))
    }
}

/// The base `E ∩ [1, 2]` of a set invariant under `t ↦ 2t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "base", rename_all = "snake_case")]
pub enum PeriodicBase {
    Explicit(ExplicitFinite),
    Interval { lo: f64, hi: f64 },
    Generator(MonotoneGenerator),
    Cantor(CantorIfs),
}

impl PeriodicBase {
    fn validate(&self) -> Result<()> {
        let (lo, hi) = match self {
            PeriodicBase::Explicit(e) => (e.points[0], *e.points.last().unwrap()),
            PeriodicBase::Interval { lo, hi } => {
                if lo >= hi {
                    return Err(invalid("periodic interval base needs lo < hi"));
                }
                (*lo, *hi)
            }
            PeriodicBase::Generator(g) => (g.limit, g.max_point()),
            PeriodicBase::Cantor(c) => (c.lo, c.hi),
        };
        if lo < 1.0 || hi > 2.0 {
            return Err(invalid("periodic base must lie in [1, 2]"));
        }
        Ok(())
    }

    fn contains_two(&self) -> bool {
        match self {
            PeriodicBase::Explicit(e) => *e.points.last().unwrap() == 2.0,
            PeriodicBase::Interval { hi, .. } => *hi == 2.0,
            PeriodicBase::Generator(g) => g.max_point() == 2.0,
            PeriodicBase::Cantor(c) => c.hi == 2.0 && c.contains_hi(),
        }
    }

    fn resolve(&self, delta_cert: f64) -> Result<Vec<Item>> {
        let mut items = match self {
            PeriodicBase::Explicit(e) => e.resolve(1.0, 2.0),
            PeriodicBase::Interval { lo, hi } => vec![Item::interval(*lo, hi.min(2.0))],
            PeriodicBase::Generator(g) => g.resolve(1.0, 2.0, delta_cert)?,
            PeriodicBase::Cantor(c) => c.resolve(1.0, 2.0, delta_cert)?,
        };
        // 2 in the base means 2^k lies in block k.
        if self.contains_two() {
            items.push(Item::point(1.0));
        }
        Ok(items)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Representation {
    ExplicitFinite(ExplicitFinite),
    MonotoneGenerator(MonotoneGenerator),
    CantorIfs(CantorIfs),
    DyadicPeriodic(PeriodicBase),
}

/// Closed range of block indices, or every block of a periodic set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "KRangeRepr", into = "KRangeRepr")]
pub enum KRange {
    All,
    Bounded(i32, i32),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum KRangeRepr {
    Name(String),
    Bounds([i32; 2]),
}

impl TryFrom<KRangeRepr> for KRange {
    type Error = String;
    fn try_from(r: KRangeRepr) -> std::result::Result<Self, String> {
        match r {
            KRangeRepr::Name(s) if s == "all" => Ok(KRange::All),
            KRangeRepr::Name(s) => Err(format!("unknown k_range {s:?}")),
            KRangeRepr::Bounds([a, b]) if a <= b => Ok(KRange::Bounded(a, b)),
            KRangeRepr::Bounds(_) => Err("k_range bounds must be ordered".into()),
        }
    }
}

impl From<KRange> for KRangeRepr {
    fn from(k: KRange) -> Self {
        match k {
            KRange::All => KRangeRepr::Name("all".into()),
            KRange::Bounded(a, b) => KRangeRepr::Bounds([a, b]),
        }
    }
}

impl KRange {
    pub fn contains(&self, k: i32) -> bool {
        match *self {
            KRange::All => true,
            KRange::Bounded(a, b) => a <= k && k <= b,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DilationSet {
    representation: Representation,
    k_range: KRange,
}

impl DilationSet {
    pub fn new(representation: Representation, k_range: KRange) -> Result<Self> {
        if let Representation::DyadicPeriodic(base) = &representation {
            base.validate()?;
        } else if k_range == KRange::All {
            return Err(invalid("only periodic sets may use k_range \"all\""));
        }
        Ok(DilationSet { representation, k_range })
    }

    /// Non-periodic set with the k-range spanned by its extent.
    pub fn finite(representation: Representation) -> Result<Self> {
        let (lo, hi) = match &representation {
            Representation::ExplicitFinite(e) => (e.points[0], *e.points.last().unwrap()),
            Representation::MonotoneGenerator(g) => (g.limit, g.max_point()),
            Representation::CantorIfs(c) => (c.lo, c.hi),
            Representation::DyadicPeriodic(_) => {
                return DilationSet::new(representation, KRange::All)
            }
        };
        let k = KRange::Bounded(lo.log2().floor() as i32, hi.log2().floor() as i32);
        DilationSet::new(representation, k)
    }

    pub fn representation(&self) -> &Representation {
        &self.representation
    }

    pub fn k_range(&self) -> KRange {
        self.k_range
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.representation, Representation::DyadicPeriodic(_))
    }

    /// `E^k` resolved to `delta_cert`.
    pub fn block(&self, k: i32, delta_cert: f64) -> Result<ResolvedSet> {
        if !(delta_cert > 0.0 && delta_cert.is_finite()) {
            return Err(invalid("certified resolution must be positive"));
        }
        if !self.k_range.contains(k) {
            return Err(Error::BlockOutOfRange { k });
        }
        let scale = 2f64.powi(k);
        let (lo, hi) = (scale, 2.0 * scale);
        let items = match &self.representation {
            Representation::ExplicitFinite(e) => e.resolve(lo, hi),
            Representation::MonotoneGenerator(g) => g.resolve(lo, hi, delta_cert)?,
            Representation::CantorIfs(c) => c.resolve(lo, hi, delta_cert)?,
            Representation::DyadicPeriodic(base) => {
                let unit = ResolvedSet::new(base.resolve(delta_cert / scale)?, delta_cert / scale)?;
                return Ok(unit.scaled(scale));
            }
        };
        ResolvedSet::new(items, delta_cert)
    }

    pub fn from_descriptor(desc: &SetDescriptor) -> Result<Self> {
        desc.build()
    }
}

/// The sets used throughout the literature on these operators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum StandardSet {
    /// `{2^k(1 + ν^{-α})}`
    Power { alpha: f64 },
    /// `{2^k(1 + log^{-β}(2 + ν))}`
    Log { beta: f64 },
    /// Middle-third Cantor set translated to `[1, 2]`, repeated dyadically.
    MiddleThirdCantor { depth: u32 },
    /// Middle-halves Cantor set on `[1, 2]`, repeated dyadically.
    MiddleHalvesCantor { depth: u32 },
    /// `{2^k}`
    Lacunary,
    /// `(0, ∞)`
    Full,
}

impl StandardSet {
    pub fn label(&self) -> String {
        match *self {
            StandardSet::Power { alpha } => format!("E({alpha})"),
            StandardSet::Log { beta } => format!("Ẽ({beta})"),
            StandardSet::MiddleThirdCantor { depth } => format!("middle-third Cantor (depth {depth})"),
            StandardSet::MiddleHalvesCantor { depth } => format!("middle-halves Cantor (depth {depth})"),
            StandardSet::Lacunary => "lacunary".into(),
            StandardSet::Full => "full interval".into(),
        }
    }

    pub fn descriptor(&self) -> SetDescriptor {
        let mut d = SetDescriptor::of(SetKind::Lacunary);
        match *self {
            StandardSet::Power { alpha } => {
                d.kind = SetKind::Power;
                d.alpha = Some(alpha);
            }
            StandardSet::Log { beta } => {
                d.kind = SetKind::Log;
                d.beta = Some(beta);
            }
            StandardSet::MiddleThirdCantor { depth } => {
                d.kind = SetKind::Cantor;
                d.ratio = Some(1.0 / 3.0);
                d.offsets = Some(vec![0.0, 2.0 / 3.0]);
                d.depth = Some(depth);
            }
            StandardSet::MiddleHalvesCantor { depth } => {
                d.kind = SetKind::Cantor;
                d.ratio = Some(0.25);
                d.offsets = Some(vec![0.0, 0.75]);
                d.depth = Some(depth);
            }
            StandardSet::Lacunary => {}
            StandardSet::Full => d.kind = SetKind::Full,
        }
        d
    }
}

pub fn standard_set(which: StandardSet) -> Result<DilationSet> {
    let base = match which {
        StandardSet::Power { alpha } => PeriodicBase::Generator(MonotoneGenerator::new(
            DecayLaw::Power { alpha },
            1.0,
            1.0,
            1,
        )?),
        StandardSet::Log { beta } => PeriodicBase::Generator(MonotoneGenerator::new(
            DecayLaw::InverseLog { beta },
            1.0,
            1.0,
            1,
        )?),
        StandardSet::MiddleThirdCantor { depth } => {
            PeriodicBase::Cantor(CantorIfs::middle_third(1.0, 2.0, depth)?)
        }
        StandardSet::MiddleHalvesCantor { depth } => {
            PeriodicBase::Cantor(CantorIfs::middle_halves(1.0, 2.0, depth)?)
        }
        StandardSet::Lacunary => PeriodicBase::Explicit(ExplicitFinite::new(vec![1.0])?),
        StandardSet::Full => PeriodicBase::Interval { lo: 1.0, hi: 2.0 },
    };
    DilationSet::new(Representation::DyadicPeriodic(base), KRange::All)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetKind {
    Power,
    Log,
    Cantor,
    Lacunary,
    Full,
    Explicit,
}

/// JSON set descriptor as read from `--set` files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetDescriptor {
    #[serde(rename = "type")]
    pub kind: SetKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offsets: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<f64>>,
    /// Cantor base interval; defaults to `[1, 2]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_range: Option<KRange>,
}

impl SetDescriptor {
    pub fn of(kind: SetKind) -> Self {
        SetDescriptor {
            kind,
            alpha: None,
            beta: None,
            ratio: None,
            offsets: None,
            depth: None,
            points: None,
            base: None,
            k_range: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Descriptor(e.to_string()))
    }

    pub fn build(&self) -> Result<DilationSet> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Error::Descriptor(format!("missing field {name:?}")))
        };
        let set = match self.kind {
            SetKind::Power => standard_set(StandardSet::Power { alpha: need(self.alpha, "alpha")? })?,
            SetKind::Log => standard_set(StandardSet::Log { beta: need(self.beta, "beta")? })?,
            SetKind::Lacunary => standard_set(StandardSet::Lacunary)?,
            SetKind::Full => standard_set(StandardSet::Full)?,
            SetKind::Cantor => {
                let [lo, hi] = self.base.unwrap_or([1.0, 2.0]);
                let ifs = CantorIfs::new(
                    lo,
                    hi,
                    self.ratio.unwrap_or(1.0 / 3.0),
                    self.offsets.clone().unwrap_or_else(|| vec![0.0, 2.0 / 3.0]),
                    self.depth.unwrap_or(14),
                )?;
                DilationSet::new(Representation::DyadicPeriodic(PeriodicBase::Cantor(ifs)), KRange::All)?
            }
            SetKind::Explicit => {
                let pts = self
                    .points
                    .clone()
                    .ok_or_else(|| Error::Descriptor("missing field \"points\"".into()))?;
                let rep = Representation::ExplicitFinite(ExplicitFinite::new(pts)?);
                return match self.k_range {
                    Some(k) => DilationSet::new(rep, k),
                    None => DilationSet::finite(rep),
                };
            }
        };
        match self.k_range {
            Some(k) => DilationSet::new(set.representation, k),
            None => Ok(set),
        }
    }
}
