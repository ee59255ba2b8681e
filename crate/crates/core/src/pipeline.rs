//! Experiment configuration, execution and reports.
//!
//! A run is described by an [`ExperimentConfig`] and produces a [`Report`]
//! that echoes the configuration, so rerunning the embedded config reproduces
//! the report exactly apart from the timing field.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::conditions::{
    check_carleson, check_cp_inf, check_cpq, check_logbound, check_prop12, make_weights, ConditionId,
    ConditionVerdict, Exponents, LogVariant, TrendPolicy, Verdict, DEFAULT_EPS,
};
use crate::counterexamples::{
    besicovitch_family, cantor_counterexample, cantor_slopes, restricted_weak_type_probe, union_area_mc,
    AreaEstimate, CantorReport, KakeyaParams, KakeyaReport,
};
use crate::dilation_set::{standard_set, DilationSet, SetDescriptor, StandardSet};
use crate::entropy::{critical_exponent, profile, CriticalExponentEstimate, EntropyProfile, N_MIN};
use crate::error::{invalid, Error, Result};
use crate::regularity::{check_r_p, check_r_tilde, DecompositionSet, TailFamily};
use crate::rng::DEFAULT_SEED;
use crate::spherical::{weak_type_ratio_probe, SmallBallReport};
use crate::stats::loglog_slope;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Depth used whenever the canonical settings are requested.
pub const PAPER_N_MAX: u32 = 20;
pub const PAPER_EPS_LIST: [f64; 3] = [1e-2, 1e-3, 1e-4];
pub const PAPER_CANTOR_A: f64 = 1.0 / 16.0;
pub const PAPER_CANTOR_SAMPLES: usize = 20_000;

fn default_d() -> u32 {
    2
}
fn default_n_max() -> u32 {
    PAPER_N_MAX
}
fn default_seed() -> u64 {
    DEFAULT_SEED
}
fn default_eps() -> f64 {
    DEFAULT_EPS
}
fn default_eps_list() -> Vec<f64> {
    PAPER_EPS_LIST.to_vec()
}
fn default_a() -> f64 {
    PAPER_CANTOR_A
}
fn default_samples() -> usize {
    PAPER_CANTOR_SAMPLES
}

/// What to run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case", deny_unknown_fields)]
pub enum Task {
    /// Entropy profile and critical exponent.
    Analyze,
    /// Condition verdicts for every exponent in `exponents`.
    Check {
        conditions: Vec<ConditionId>,
        exponents: Vec<f64>,
        /// `q` for `cpq`; defaults to `p`. Use `cpinf` for `q = ∞`.
        #[serde(default)]
        q: Option<f64>,
        #[serde(default = "default_eps")]
        eps: f64,
        #[serde(default)]
        l_max: Option<u32>,
    },
    /// Equally spaced decomposition, with regularity verdicts when `p` is given.
    Decompose {
        #[serde(default)]
        p: Option<f64>,
        #[serde(default = "default_eps")]
        eps: f64,
    },
    /// Small-ball weak-type probe.
    Operator {
        p: f64,
        #[serde(default = "default_eps_list")]
        eps_list: Vec<f64>,
    },
    /// Cantor test function against the modified maximal function.
    Cantor {
        scales: Vec<u32>,
        #[serde(default = "default_a")]
        a: f64,
        /// Defaults to a quarter of the finest disk radius per scale.
        #[serde(default)]
        h: Option<f64>,
        #[serde(default = "default_samples")]
        samples: usize,
    },
    /// Besicovitch construction against restricted weak type (2,2).
    Kakeya {
        n: Vec<u32>,
        #[serde(default)]
        params: Option<KakeyaTuning>,
    },
    /// Predicted versus measured endpoint exponents.
    TheoremTable { sets: Vec<StandardSet> },
}

/// Overrides for [`KakeyaParams`]; `n` and `seed` come from the config.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KakeyaTuning {
    pub stride: usize,
    pub samples_per_rect: usize,
    pub c: f64,
    pub hit_fraction: f64,
    pub area_samples: usize,
}

impl KakeyaTuning {
    fn apply(&self, n: u32, seed: u64) -> KakeyaParams {
        KakeyaParams {
            n,
            stride: self.stride,
            samples_per_rect: self.samples_per_rect,
            c: self.c,
            hit_fraction: self.hit_fraction,
            area_samples: self.area_samples,
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set: Option<SetDescriptor>,
    #[serde(default = "default_d")]
    pub d: u32,
    #[serde(default = "default_n_max")]
    pub n_max: u32,
    #[serde(default)]
    pub k_window: (i32, i32),
    #[serde(default)]
    pub policy: TrendPolicy,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Directory for `report.json` and CSV side files.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub task: Task,
}

impl ExperimentConfig {
    /// The task with every truncation and tolerance at its canonical value.
    pub fn paper_defaults(set: Option<SetDescriptor>, d: u32, task: Task) -> Self {
        ExperimentConfig {
            set,
            d,
            n_max: PAPER_N_MAX,
            k_window: (0, 0),
            policy: TrendPolicy::default(),
            seed: DEFAULT_SEED,
            output: None,
            task,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks everything that can be checked without computing.
    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(invalid("d must be at least 2"));
        }
        if !(N_MIN..=40).contains(&self.n_max) {
            return Err(invalid(format!("n_max must lie in {N_MIN}..=40")));
        }
        if self.k_window.0 > self.k_window.1 {
            return Err(invalid("k_window must be ordered"));
        }
        let needs_set = !matches!(self.task, Task::Cantor { .. } | Task::TheoremTable { .. });
        if needs_set && self.set.is_none() {
            return Err(invalid("this command needs a set descriptor"));
        }
        match &self.task {
            Task::Check { conditions, exponents, q, .. } => {
                if conditions.is_empty() || exponents.is_empty() {
                    return Err(invalid("check needs at least one condition and one exponent"));
                }
                if q.is_some_and(|q| !q.is_finite()) {
                    return Err(invalid("q must be finite; use the cpinf condition for q = inf"));
                }
                for &p in exponents {
                    Exponents::new(self.d, p, None)?;
                }
            }
            Task::Decompose { p: Some(p), .. } => {
                Exponents::new(self.d, *p, None)?;
            }
            Task::Operator { p, eps_list } => {
                if !(*p > 1.0) || eps_list.is_empty() {
                    return Err(invalid("operator probe needs p > 1 and at least one radius"));
                }
            }
            Task::Cantor { scales, .. } if scales.is_empty() => return Err(invalid("no Cantor scales given")),
            Task::Kakeya { n, .. } if n.is_empty() => return Err(invalid("no Besicovitch scales given")),
            Task::TheoremTable { sets } if sets.is_empty() => return Err(invalid("no sets given")),
            _ => {}
        }
        Ok(())
    }

    fn dilation_set(&self) -> Result<DilationSet> {
        self.set.as_ref().ok_or_else(|| invalid("missing set descriptor"))?.build()
    }
}

/// A verdict together with the exponent it was computed at.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckedCondition {
    pub p: f64,
    #[serde(flatten)]
    pub verdict: ConditionVerdict,
}

/// One equally spaced family `{a, a + width, …, b}` in gap class `mu`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyRow {
    pub mu: u32,
    pub width: f64,
    pub card: usize,
    pub a: f64,
    pub b: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionRow {
    pub k: i32,
    pub families: Vec<FamilyRow>,
    pub tail: Option<TailFamily>,
    pub endpoints: usize,
    /// `(j, N(endpoints, 2^{k-j}))` for `0 ≤ j ≤ n_max`
    pub endpoint_entropy: Vec<(u32, u64)>,
    pub endpoint_slope: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CantorSummary {
    pub reports: Vec<CantorReport>,
    pub f_norm_slope: Option<f64>,
    pub ratio_slope: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KakeyaSummary {
    pub reports: Vec<KakeyaReport>,
    /// Union area of the family at each `n`, independent of the set.
    pub areas: Vec<(u32, AreaEstimate)>,
    /// Slope of `log ratio` against `log B` over the applicable runs.
    pub ratio_slope: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremRow {
    pub set: String,
    pub d: u32,
    pub predicted: f64,
    pub measured: f64,
    pub p_sup: f64,
    /// `cpinf` at `predicted - 0.1`, if that exponent is admissible.
    pub below: Option<Verdict>,
    /// `cpinf` at `predicted + 0.1`, if that exponent is admissible.
    pub above: Option<Verdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub config: ExperimentConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub critical: Option<CriticalExponentEstimate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<EntropyProfile>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub verdicts: Vec<CheckedCondition>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub decomposition: Vec<DecompositionRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<SmallBallReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cantor: Option<CantorSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kakeya: Option<KakeyaSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub theorem_table: Vec<TheoremRow>,
    /// Wall-clock time; the only field that differs between identical runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl Report {
    fn new(config: &ExperimentConfig) -> Self {
        Report {
            version: VERSION.to_string(),
            config: config.clone(),
            critical: None,
            profile: None,
            verdicts: Vec::new(),
            decomposition: Vec::new(),
            probe: None,
            cantor: None,
            kakeya: None,
            theorem_table: Vec::new(),
            timing: None,
        }
    }

    /// JSON without the timing field.
    pub fn canonical_json(&self) -> Result<String> {
        let mut r = self.clone();
        r.timing = None;
        Ok(serde_json::to_string_pretty(&r)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    fn verdicts(&self) -> impl Iterator<Item = Verdict> + '_ {
        self.verdicts
            .iter()
            .map(|c| c.verdict.verdict)
            .chain(self.theorem_table.iter().flat_map(|r| r.below.into_iter().chain(r.above)))
    }

    /// 2 if any verdict is inconclusive, else 0.
    pub fn exit_code(&self) -> i32 {
        if self.verdicts().any(|v| v == Verdict::Inconclusive) {
            2
        } else {
            0
        }
    }

    /// Writes `report.json` and CSV side files into `dir`.
    pub fn write_files(&self, dir: &std::path::Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), self.to_json()?)?;
        if let Some(p) = &self.profile {
            p.write_csv(fs::File::create(dir.join("profile.csv"))?)?;
        }
        if let Some(probe) = &self.probe {
            let mut w = fs::File::create(dir.join("probe.csv"))?;
            writeln!(w, "eps,ratio,weak_norm,f_norm")?;
            for (i, r) in probe.rows.iter().enumerate() {
                writeln!(w, "{},{},{},{}", r.eps, r.ratio, r.weak_norm, r.f_norm)?;
                r.field.write_csv(fs::File::create(dir.join(format!("field_{i}.csv")))?)?;
            }
        }
        if let Some(c) = &self.cantor {
            let mut w = fs::File::create(dir.join("cantor.csv"))?;
            writeln!(w, "N,f_norm,weak_norm,ratio,level_measure")?;
            for r in &c.reports {
                writeln!(w, "{},{},{},{},{}", r.n_scales, r.f_norm, r.weak_norm, r.ratio, r.level_measure)?;
            }
        }
        Ok(())
    }
}

/// Runs the configured task. Side files are written when `output` is set.
pub fn run(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    let start = Instant::now();
    let mut report = Report::new(config);
    let (d, n_max, kw, policy) = (config.d, config.n_max, config.k_window, &config.policy);
    match &config.task {
        Task::Analyze => {
            let prof = profile(&config.dilation_set()?, d, n_max, kw)?;
            report.critical = Some(critical_exponent(&prof));
            report.profile = Some(prof);
        }
        Task::Check { conditions, exponents, q, eps, l_max } => {
            let set = config.dilation_set()?;
            let prof = profile(&set, d, n_max, kw)?;
            let mut decs = None;
            for &p in exponents {
                for &c in conditions {
                    let plain = Exponents::new(d, p, None)?;
                    let v = match c {
                        ConditionId::Cpq => check_cpq(&prof, &Exponents::new(d, p, Some(q.unwrap_or(p)))?, policy)?,
                        ConditionId::Cpinf => check_cp_inf(&prof, &plain, policy),
                        ConditionId::Prop12 => check_prop12(&prof, &plain, &make_weights(p, *eps)?, policy),
                        ConditionId::Carleson => check_carleson(&prof, &plain, l_max.unwrap_or(n_max), policy),
                        ConditionId::Eq113 => check_logbound(&prof, &plain, LogVariant::Eq113, policy),
                        ConditionId::Eq114 => check_logbound(&prof, &plain, LogVariant::Eq114, policy),
                        ConditionId::RP | ConditionId::RTilde => {
                            if decs.is_none() {
                                decs = Some(DecompositionSet::build(&set, n_max, kw)?);
                            }
                            let decs = decs.as_ref().expect("built above");
                            if c == ConditionId::RP {
                                check_r_p(decs, &plain, &make_weights(p, *eps)?, &prof, policy)?
                            } else {
                                check_r_tilde(decs, &prof, policy)?
                            }
                        }
                    };
                    report.verdicts.push(CheckedCondition { p, verdict: v });
                }
            }
            report.critical = Some(critical_exponent(&prof));
            report.profile = Some(prof);
        }
        Task::Decompose { p, eps } => {
            let set = config.dilation_set()?;
            let decs = DecompositionSet::build(&set, n_max, kw)?;
            report.decomposition = decs
                .by_k
                .values()
                .map(|dec| DecompositionRow {
                    k: dec.k,
                    families: dec
                        .families
                        .iter()
                        .flat_map(|(&mu, f)| {
                            f.iter().map(move |s| FamilyRow { mu, width: s.width, card: s.card(), a: s.a(), b: s.b() })
                        })
                        .collect(),
                    tail: dec.tail,
                    endpoints: dec.endpoint_set.len(),
                    endpoint_entropy: (0..=n_max).map(|j| (j, dec.endpoint_entropy(j))).collect(),
                    endpoint_slope: dec.endpoint_slope(n_max),
                })
                .collect();
            if let Some(p) = p {
                let prof = profile(&set, d, n_max, kw)?;
                let e = Exponents::new(d, *p, None)?;
                let rp = check_r_p(&decs, &e, &make_weights(*p, *eps)?, &prof, policy)?;
                let rt = check_r_tilde(&decs, &prof, policy)?;
                report.verdicts.push(CheckedCondition { p: *p, verdict: rp });
                report.verdicts.push(CheckedCondition { p: *p, verdict: rt });
            }
        }
        Task::Operator { p, eps_list } => {
            report.probe = Some(weak_type_ratio_probe(&config.dilation_set()?, d, *p, eps_list)?);
        }
        Task::Cantor { scales, a, h, samples } => {
            let reports = scales
                .iter()
                .map(|&n| {
                    let h = h.unwrap_or(a * 0.25f64.powi(n as i32) / 4.0);
                    cantor_counterexample(n, *a, h, *samples, config.seed)
                })
                .collect::<Result<Vec<_>>>()?;
            let slopes = (reports.len() >= 2).then(|| cantor_slopes(&reports));
            report.cantor =
                Some(CantorSummary { f_norm_slope: slopes.map(|s| s.0), ratio_slope: slopes.map(|s| s.1), reports });
        }
        Task::Kakeya { n, params } => {
            if d != 2 {
                return Err(invalid("the Besicovitch probe is planar; use d = 2"));
            }
            let set = config.dilation_set()?;
            let mut reports = Vec::new();
            let mut areas = Vec::new();
            for &m in n {
                let p = params.map(|t| t.apply(m, config.seed)).unwrap_or_else(|| KakeyaParams::new(m, config.seed));
                let r = restricted_weak_type_probe(&set, p)?;
                let area = match r.area {
                    Some(a) => a,
                    None => union_area_mc(&besicovitch_family(m)?, p.area_samples, config.seed)?,
                };
                areas.push((m, area));
                reports.push(r);
            }
            let usable: Vec<&KakeyaReport> = reports.iter().filter(|r| r.applicable && r.ratio > 0.0).collect();
            let ratio_slope = (usable.len() >= 2).then(|| {
                let bs: Vec<f64> = usable.iter().map(|r| r.b).collect();
                let rs: Vec<f64> = usable.iter().map(|r| r.ratio).collect();
                loglog_slope(&bs, &rs)
            });
            report.kakeya = Some(KakeyaSummary { reports, areas, ratio_slope });
        }
        Task::TheoremTable { sets } => {
            report.theorem_table = theorem_table(d, sets, n_max, policy)?;
        }
    }
    report.timing = Some(Timing { elapsed_ms: start.elapsed().as_secs_f64() * 1e3 });
    if let Some(dir) = &config.output {
        report.write_files(dir)?;
    }
    Ok(report)
}

/// Endpoint exponent the theory predicts for a standard set, with a caveat
/// where the prediction is only partial.
pub fn predicted_exponent(set: &StandardSet, d: u32) -> (f64, Option<String>) {
    let dm1 = (d - 1) as f64;
    match *set {
        StandardSet::Power { alpha } => (1.0 + 1.0 / (dm1 * (alpha + 1.0)), None),
        StandardSet::Log { beta } => {
            let pd = d as f64 / dm1;
            let note = if beta < 1.0 / dm1 {
                Some(format!("beta < 1/(d-1): weak type fails at p = {pd}"))
            } else if beta == 1.0 / dm1 {
                Some("beta = 1/(d-1): endpoint behaviour unknown".to_string())
            } else {
                None
            };
            (pd, note)
        }
        StandardSet::MiddleThirdCantor { .. } => (1.0 + 2f64.ln() / 3f64.ln() / dm1, None),
        StandardSet::MiddleHalvesCantor { .. } => (1.0 + 0.5 / dm1, None),
        StandardSet::Lacunary => (1.0, Some("bounded for every p > 1".to_string())),
        StandardSet::Full => (d as f64 / dm1, None),
    }
}

/// Predicted endpoint exponents next to measured critical exponents and the
/// `cpinf` verdicts just below and above the prediction.
pub fn theorem_table(d: u32, sets: &[StandardSet], n_max: u32, policy: &TrendPolicy) -> Result<Vec<TheoremRow>> {
    sets.iter()
        .map(|s| {
            let set = standard_set(*s)?;
            let prof = profile(&set, d, n_max, (0, 0))?;
            let est = critical_exponent(&prof);
            let (predicted, note) = predicted_exponent(s, d);
            let at = |p: f64| match Exponents::new(d, p, None) {
                Ok(e) => Some(check_cp_inf(&prof, &e, policy).verdict),
                Err(Error::InvalidParameter(_)) => None,
                Err(_) => None,
            };
            Ok(TheoremRow {
                set: s.label(),
                d,
                predicted,
                measured: est.p_estimate,
                p_sup: est.p_sup,
                below: at(predicted - 0.1),
                above: at(predicted + 0.1),
                note,
            })
        })
        .collect()
}

/// Summary lines for terminal output, keyed by section.
pub fn summary(report: &Report) -> BTreeMap<&'static str, Vec<String>> {
    let mut out: BTreeMap<&'static str, Vec<String>> = BTreeMap::new();
    if let Some(c) = &report.critical {
        out.entry("critical").or_default().push(format!(
            "p_estimate = {:.4} (slope {:.4}, p_sup {:.4}, converged {})",
            c.p_estimate, c.slope_fit, c.p_sup, c.converged
        ));
    }
    for v in &report.verdicts {
        out.entry("verdicts").or_default().push(format!(
            "{} at p = {}: {:?} (value {:.6}, trend {:.4})",
            v.verdict.condition, v.p, v.verdict.verdict, v.verdict.value, v.verdict.trend
        ));
    }
    for r in &report.decomposition {
        out.entry("decomposition").or_default().push(format!(
            "k = {}: {} families, {} endpoints, endpoint slope {:.4}",
            r.k,
            r.families.len(),
            r.endpoints,
            r.endpoint_slope
        ));
    }
    if let Some(p) = &report.probe {
        for r in &p.rows {
            out.entry("probe").or_default().push(format!("eps = {:e}: R = {:.6}", r.eps, r.ratio));
        }
        out.entry("probe").or_default().push(format!("slope = {:.4}", p.slope));
    }
    if let Some(c) = &report.cantor {
        for r in &c.reports {
            out.entry("cantor").or_default().push(format!(
                "N = {}: |f|_3/2 = {:.4}, weak = {:.4}, ratio = {:.4}",
                r.n_scales, r.f_norm, r.weak_norm, r.ratio
            ));
        }
        if let (Some(f), Some(q)) = (c.f_norm_slope, c.ratio_slope) {
            out.entry("cantor").or_default().push(format!("slopes: f_norm {f:.4}, ratio {q:.4}"));
        }
    }
    if let Some(k) = &report.kakeya {
        for r in &k.reports {
            let line = if r.applicable {
                format!(
                    "n = {}: B = {:.3}, ratio = {:.5}, ratio/sqrt(B) = {:.5}, disjoint = {:?}",
                    r.params.n, r.b, r.ratio, r.ratio_over_sqrt_b, r.disjoint
                )
            } else {
                format!("n = {}: B = {:.3e} < 1, construction inapplicable", r.params.n, r.b)
            };
            out.entry("kakeya").or_default().push(line);
        }
        for (n, a) in &k.areas {
            out.entry("kakeya").or_default().push(format!("n = {n}: union area {:.4e} (95% CI up to {:.4e})", a.area, a.ci_high));
        }
    }
    for r in &report.theorem_table {
        out.entry("theorem_table").or_default().push(format!(
            "{} (d={}): predicted {:.4}, measured {:.4}, below {:?}, above {:?}",
            r.set, r.d, r.predicted, r.measured, r.below, r.above
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dilation_set::SetKind;

    #[test]
    fn analyze_lacunary() {
        let cfg = ExperimentConfig::paper_defaults(Some(SetDescriptor::of(SetKind::Lacunary)), 2, Task::Analyze);
        let r = run(&cfg).unwrap();
        let prof = r.profile.as_ref().unwrap();
        assert!((0..=20).all(|n| prof.get(0, n) == Some(1)));
        assert_eq!(r.critical.as_ref().unwrap().p_estimate, 1.0);
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn check_cpinf_power() {
        let mut desc = SetDescriptor::of(SetKind::Power);
        desc.alpha = Some(1.0);
        let task = Task::Check { conditions: vec![ConditionId::Cpinf], exponents: vec![1.5], q: None, eps: DEFAULT_EPS, l_max: None };
        let r = run(&ExperimentConfig::paper_defaults(Some(desc), 2, task)).unwrap();
        assert_eq!(r.verdicts[0].verdict.verdict, Verdict::Holds);
    }

    #[test]
    fn kakeya_lacunary_is_inapplicable() {
        let task = Task::Kakeya { n: vec![4], params: None };
        let r = run(&ExperimentConfig::paper_defaults(Some(SetDescriptor::of(SetKind::Lacunary)), 2, task)).unwrap();
        let k = r.kakeya.as_ref().unwrap();
        assert!(!k.reports[0].applicable);
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn config_round_trip_and_schema() {
        let text = r#"{"set": {"type": "power", "alpha": 2.0}, "d": 3, "task": {"command": "analyze"}}"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(cfg.n_max, PAPER_N_MAX);
        let again = ExperimentConfig::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(cfg, again);
        assert!(ExperimentConfig::from_json(r#"{"task": {"command": "analyze"}, "bogus": 1}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"task": {"command": "analyze"}}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"d": 1, "set": {"type": "full"}, "task": {"command": "analyze"}}"#).is_err());
    }

    #[test]
    fn reports_are_reproducible() {
        let task = Task::Cantor { scales: vec![2, 3], a: PAPER_CANTOR_A, h: None, samples: 500 };
        let cfg = ExperimentConfig::paper_defaults(None, 2, task);
        let (a, b) = (run(&cfg).unwrap(), run(&cfg).unwrap());
        assert_eq!(a.canonical_json().unwrap(), b.canonical_json().unwrap());
        assert!(a.cantor.unwrap().f_norm_slope.is_some());
    }

    #[test]
    fn theorem_table_rows() {
        let rows = theorem_table(2, &[StandardSet::Power { alpha: 1.0 }, StandardSet::Lacunary], 20, &TrendPolicy::default()).unwrap();
        assert!((rows[0].predicted - 1.5).abs() < 1e-12);
        assert!((rows[0].measured - 1.5).abs() < 0.02);
        assert_eq!(rows[1].measured, 1.0);
        assert_eq!(rows[1].below, None);
        let (p, _) = predicted_exponent(&StandardSet::Log { beta: 1.0 }, 3);
        assert_eq!(p, 1.5);
    }
}
