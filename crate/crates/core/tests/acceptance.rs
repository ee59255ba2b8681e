// Acceptance criteria. Each test prints one PASS/FAIL line on stdout,
// outside the harness capture, and then asserts the criterion.
// Criteria run one at a time so the wall-clock limits are meaningful.

use std::io::Write;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use maximal_lab::conditions::{check_cp_inf, check_logbound, ConditionId, Exponents, LogVariant, TrendPolicy, Verdict, DEFAULT_EPS};
use maximal_lab::counterexamples::{besicovitch_family, union_area_mc};
use maximal_lab::dilation_set::{standard_set, Item, ResolvedSet, SetDescriptor, StandardSet};
use maximal_lab::entropy::{critical_exponent, entropy_number, profile};
use maximal_lab::pipeline::{run, ExperimentConfig, Report, Task, PAPER_CANTOR_A, PAPER_EPS_LIST};
use maximal_lab::regularity::{check_r_p, check_r_tilde, decompose_convex, is_equally_spaced, DecompositionSet};
use maximal_lab::conditions::make_weights;
use maximal_lab::spherical::{
    multiplier_decay, sphere_hat, spherical_mean_mc, spherical_mean_radial, Bump, RadialProfile, QUAD_TOL,
};

static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn verdict(id: &str, pass: bool, elapsed: Duration, limit: Duration, detail: &str) {
    let ok = pass && elapsed <= limit;
    let line = format!(
        "{} {id}: {detail} [{:.2}s of {}s]\n",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    std::io::stdout().lock().write_all(line.as_bytes()).unwrap();
    assert!(ok, "{id} failed: {detail}");
}

fn standard(which: StandardSet) -> Option<SetDescriptor> {
    Some(which.descriptor())
}

fn cantor_config() -> ExperimentConfig {
    let task = Task::Cantor { scales: (2..=6).collect(), a: PAPER_CANTOR_A, h: None, samples: 20_000 };
    ExperimentConfig::paper_defaults(None, 2, task)
}

fn kakeya_config(n: Vec<u32>) -> ExperimentConfig {
    ExperimentConfig::paper_defaults(standard(StandardSet::Full), 2, Task::Kakeya { n, params: None })
}

fn operator_config(p: f64) -> ExperimentConfig {
    let task = Task::Operator { p, eps_list: PAPER_EPS_LIST.to_vec() };
    ExperimentConfig::paper_defaults(standard(StandardSet::Power { alpha: 1.0 }), 2, task)
}

// Minimal cover by closed length-δ intervals; some optimal cover starts every
// interval at a point of the set, so subsets of left endpoints suffice.
fn brute_force_cover(points: &[f64], delta: f64) -> u64 {
    let n = points.len();
    if n == 0 {
        return 1;
    }
    let mut best = n as u64;
    for subset in 1u32..(1 << n) {
        if u64::from(subset.count_ones()) >= best {
            continue;
        }
        let covered = points.iter().all(|&x| {
            (0..n).any(|i| subset >> i & 1 == 1 && points[i] <= x && x <= points[i] + delta)
        });
        if covered {
            best = u64::from(subset.count_ones());
        }
    }
    best
}

#[test]
fn ac01_entropy_oracle() {
    let _g = serial();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut mismatches = 0;
    for _ in 0..500 {
        let n = rng.random_range(1..=12);
        let pts: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..2.0)).collect();
        let delta = 10f64.powf(rng.random_range(-3.0..-0.3));
        let set = ResolvedSet::new(pts.iter().map(|&x| Item::point(x)).collect(), delta / 4.0).unwrap();
        let mut sorted: Vec<f64> = set.points().collect();
        sorted.dedup();
        if entropy_number(&set, delta).unwrap() != brute_force_cover(&sorted, delta) {
            mismatches += 1;
        }
    }
    verdict("AC1", mismatches == 0, start.elapsed(), Duration::from_secs(10), &format!("{mismatches} mismatches in 500 sets"));
}

#[test]
fn ac02_critical_exponents() {
    let _g = serial();
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut lines = Vec::new();
    for d in [2u32, 3] {
        let dm1 = (d - 1) as f64;
        let mut cases: Vec<(StandardSet, f64)> = [0.5, 1.0, 2.0]
            .iter()
            .map(|&alpha| (StandardSet::Power { alpha }, 1.0 + 1.0 / (dm1 * (alpha + 1.0))))
            .collect();
        cases.push((StandardSet::Full, d as f64 / dm1));
        for (s, want) in cases {
            let est = critical_exponent(&profile(&standard_set(s).unwrap(), d, 20, (0, 0)).unwrap());
            worst = worst.max((est.p_estimate - want).abs());
            lines.push(format!("{} d={d}: {:.4} vs {:.4}", s.label(), est.p_estimate, want));
        }
    }
    let lac = critical_exponent(&profile(&standard_set(StandardSet::Lacunary).unwrap(), 2, 20, (0, 0)).unwrap());
    let pass = worst <= 0.02 && lac.p_estimate == 1.0;
    verdict(
        "AC2",
        pass,
        start.elapsed(),
        Duration::from_secs(60),
        &format!("max deviation {worst:.4}, lacunary {}; {}", lac.p_estimate, lines.join("; ")),
    );
}

#[test]
fn ac03_cantor_dimension() {
    let _g = serial();
    let start = Instant::now();
    let dim = 2f64.ln() / 3f64.ln();
    let set = standard_set(StandardSet::MiddleThirdCantor { depth: 14 }).unwrap();
    // cells of size 3^-14 certify covering scales down to 2^-20
    let est = critical_exponent(&profile(&set, 2, 20, (0, 0)).unwrap());
    let pass = (est.slope_fit - dim).abs() <= 0.02 && (est.p_estimate - (1.0 + dim)).abs() <= 0.02;
    verdict(
        "AC3",
        pass,
        start.elapsed(),
        Duration::from_secs(30),
        &format!("slope {:.4} vs {dim:.4}, p_estimate {:.4}", est.slope_fit, est.p_estimate),
    );
}

#[test]
fn ac04_phase_boundary() {
    let _g = serial();
    let start = Instant::now();
    let pol = TrendPolicy::default();
    let e1 = profile(&standard_set(StandardSet::Power { alpha: 1.0 }).unwrap(), 2, 20, (0, 0)).unwrap();
    let at = |p| check_cp_inf(&e1, &Exponents::new(2, p, None).unwrap(), &pol).verdict;
    let (h15, f14) = (at(1.5), at(1.4));
    let eq114 = |beta| {
        let prof = profile(&standard_set(StandardSet::Log { beta }).unwrap(), 3, 20, (0, 0)).unwrap();
        check_logbound(&prof, &Exponents::new(3, 1.5, None).unwrap(), LogVariant::Eq114, &pol).verdict
    };
    let (h06, f05) = (eq114(0.6), eq114(0.5));
    let pass = h15 == Verdict::Holds && f14 == Verdict::Fails && h06 == Verdict::Holds && f05 == Verdict::Fails;
    verdict(
        "AC4",
        pass,
        start.elapsed(),
        Duration::from_secs(60),
        &format!("E(1) cpinf p=1.5 {h15:?}, p=1.4 {f14:?}; log set d=3 eq114 beta=0.6 {h06:?}, beta=0.5 {f05:?}"),
    );
}

#[test]
fn ac05_decomposition() {
    let _g = serial();
    let start = Instant::now();
    let pol = TrendPolicy::default();
    let mut pass = true;
    let mut lines = Vec::new();
    for alpha in [0.5, 1.0, 2.0] {
        let set = standard_set(StandardSet::Power { alpha }).unwrap();
        // (i) and (ii)
        let block = set.block(0, 2f64.powi(-22) / 4.0).unwrap();
        let dec = decompose_convex(&block, 0).unwrap();
        let mut want: Vec<f64> = block.points().collect();
        want.sort_by(f64::total_cmp);
        let partition = dec.points() == want;
        let spaced = dec.families.values().flatten().all(|f| is_equally_spaced(&f.points, f.width, 2.0));
        // (iii)
        let mut c1_card = Vec::new();
        let mut c1_tail = Vec::new();
        for n_max in [12, 16, 20] {
            let decs = DecompositionSet::build(&set, n_max, (0, 0)).unwrap();
            let prof = profile(&set, 2, n_max, (0, 0)).unwrap();
            let ex = Exponents::new(2, 2.0, None).unwrap();
            let rp = check_r_p(&decs, &ex, &make_weights(2.0, DEFAULT_EPS).unwrap(), &prof, &pol).unwrap();
            c1_card.push(rp.components["c1"]);
            c1_tail.push(check_r_tilde(&decs, &prof, &pol).unwrap().value);
        }
        let spread = |v: &[f64]| v.iter().cloned().fold(f64::MIN, f64::max) / v.iter().cloned().fold(f64::MAX, f64::min) - 1.0;
        let stable = spread(&c1_card) <= 0.1 && spread(&c1_tail) <= 0.1;
        // (iv) with beta = alpha
        let slope = DecompositionSet::build(&set, 20, (0, 0)).unwrap().by_k[&0].endpoint_slope(20);
        let sparse = slope <= 1.0 / (1.0 + alpha) + 0.05;
        pass &= partition && spaced && stable && sparse;
        lines.push(format!(
            "alpha={alpha}: partition {partition}, C=2 {spaced}, C1 card {c1_card:.3?} tail {c1_tail:.3?}, endpoint slope {slope:.3}"
        ));
    }
    verdict("AC5", pass, start.elapsed(), Duration::from_secs(60), &lines.join("; "));
}

#[test]
fn ac06_multiplier_decay() {
    let _g = serial();
    let start = Instant::now();
    let band = |d| {
        let rows = multiplier_decay(d, 4..=12, Bump::Exp).unwrap();
        let (lo, hi) = rows.iter().fold((f64::MAX, 0.0f64), |a, r| (a.0.min(r.normalized), a.1.max(r.normalized)));
        hi / lo
    };
    let (b3, b2) = (band(3), band(2));
    let sinc = [0.5f64, 1.0, 7.3, 40.0, 300.0, 4096.0]
        .iter()
        .map(|&rho| (sphere_hat(3, rho).unwrap() - rho.sin() / rho).abs())
        .fold(0.0, f64::max);
    let pass = b3 <= 4.0 && b2 <= 4.0 && sinc <= 1e-8;
    verdict(
        "AC6",
        pass,
        start.elapsed(),
        Duration::from_secs(30),
        &format!("d=3 band {b3:.3}, d=2 band {b2:.3}, max |sphere_hat - sin/rho| {sinc:.2e}"),
    );
}

#[test]
fn ac07_quadrature_fidelity() {
    let _g = serial();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let g = match i % 4 {
            0 => RadialProfile::Gaussian { sigma: rng.random_range(0.2..2.0) },
            1 => RadialProfile::Exponential { rate: rng.random_range(0.5..4.0) },
            2 => RadialProfile::Ball { radius: rng.random_range(0.3..2.0) },
            _ => {
                let inner = rng.random_range(0.2..1.0);
                RadialProfile::Shell { inner, outer: inner + rng.random_range(0.1..1.0) }
            }
        };
        let d = rng.random_range(2..=5);
        let t = rng.random_range(0.1..2.0);
        let r = rng.random_range(0.0..2.0);
        let q = spherical_mean_radial(&g, d, t, r).unwrap();
        let (mc, se) = spherical_mean_mc(&g, d, t, r, 200_000, 100 + i).unwrap();
        worst = worst.max((q - mc).abs() / (se + QUAD_TOL));
    }
    let one = spherical_mean_radial(&RadialProfile::Constant { value: 1.0 }, 3, 1.7, 0.4).unwrap();
    let inside = spherical_mean_radial(&RadialProfile::Ball { radius: 1.0 }, 3, 0.6, 0.0).unwrap();
    let outside = spherical_mean_radial(&RadialProfile::Ball { radius: 1.0 }, 2, 1.4, 0.0).unwrap();
    let trivial = (one - 1.0).abs().max((inside - 1.0).abs()).max(outside.abs());
    let pass = worst <= 3.0 && trivial <= 1e-10;
    verdict(
        "AC7",
        pass,
        start.elapsed(),
        Duration::from_secs(60),
        &format!("worst |quadrature - MC| = {worst:.2} combined error bounds, trivial identities off by {trivial:.1e}"),
    );
}

#[test]
fn ac08_small_ball_probe() {
    let _g = serial();
    let start = Instant::now();
    let slope = |p| run(&operator_config(p)).unwrap().probe.unwrap().slope;
    let (below, above) = (slope(1.35), slope(1.65));
    let pass = below > 0.05 && above < 0.02;
    verdict(
        "AC8",
        pass,
        start.elapsed(),
        Duration::from_secs(300),
        &format!("E(1) d=2 log-slope of R: p=1.35 {below:.4}, p=1.65 {above:.4}"),
    );
}

#[test]
fn ac09_cantor_slopes() {
    let _g = serial();
    let start = Instant::now();
    let c = run(&cantor_config()).unwrap().cantor.unwrap();
    let (f, ratio) = (c.f_norm_slope.unwrap(), c.ratio_slope.unwrap());
    let pass = (f - 2.0 / 3.0).abs() <= 0.1 && (ratio - 1.0 / 3.0).abs() <= 0.15;
    verdict(
        "AC9",
        pass,
        start.elapsed(),
        Duration::from_secs(600),
        &format!("N=2..6: norm slope {f:.4} (want 0.667 ± 0.1), weak-ratio slope {ratio:.4} (want 0.333 ± 0.15)"),
    );
}

#[test]
fn ac10_besicovitch() {
    let _g = serial();
    let start = Instant::now();
    let mut area_ok = true;
    let mut lines = Vec::new();
    for n in [4u32, 5, 6] {
        let a = union_area_mc(&besicovitch_family(n).unwrap(), 200_000, 1).unwrap();
        let bound = 8.0 * (-2.0 * n as f64).exp2() / n as f64;
        area_ok &= a.ci_high <= bound;
        lines.push(format!("n={n} area CI high {:.3e} <= {bound:.3e}", a.ci_high));
    }
    let k = run(&kakeya_config(vec![3, 4, 5])).unwrap().kakeya.unwrap();
    let disjoint = k.reports.iter().all(|r| r.disjoint == Some(true));
    let slope = k.ratio_slope.unwrap_or(f64::NAN);
    let pass = area_ok && disjoint && (slope - 0.5).abs() <= 0.2;
    lines.push(format!("disjoint {disjoint}, ratio-vs-B slope {slope:.4} (want 0.5 ± 0.2)"));
    verdict("AC10", pass, start.elapsed(), Duration::from_secs(900), &lines.join("; "));
}

#[test]
fn ac11_determinism() {
    let _g = serial();
    let start = Instant::now();
    let check = |ids: Vec<ConditionId>, exponents: Vec<f64>, set: StandardSet, d| {
        let task = Task::Check { conditions: ids, exponents, q: None, eps: DEFAULT_EPS, l_max: None };
        ExperimentConfig::paper_defaults(standard(set), d, task)
    };
    let configs = vec![
        ExperimentConfig::paper_defaults(standard(StandardSet::Power { alpha: 1.0 }), 2, Task::Analyze),
        ExperimentConfig::paper_defaults(standard(StandardSet::MiddleThirdCantor { depth: 14 }), 2, Task::Analyze),
        check(vec![ConditionId::Cpinf, ConditionId::Cpq], vec![1.4, 1.5], StandardSet::Power { alpha: 1.0 }, 2),
        check(vec![ConditionId::Eq114], vec![1.5], StandardSet::Log { beta: 0.6 }, 3),
        ExperimentConfig::paper_defaults(
            standard(StandardSet::Power { alpha: 2.0 }),
            2,
            Task::Decompose { p: Some(2.0), eps: DEFAULT_EPS },
        ),
        operator_config(1.35),
        cantor_config(),
        kakeya_config(vec![3, 4, 5]),
        ExperimentConfig::paper_defaults(
            None,
            2,
            Task::TheoremTable { sets: vec![StandardSet::Power { alpha: 1.0 }, StandardSet::Lacunary] },
        ),
    ];
    let in_pool = |threads, cfg: &ExperimentConfig| -> String {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let report: Report = pool.install(|| run(cfg)).unwrap();
        report.canonical_json().unwrap()
    };
    let mut differing = Vec::new();
    for cfg in &configs {
        let a = in_pool(1, cfg);
        let b = in_pool(3, cfg);
        let c = in_pool(3, cfg);
        if a != b || b != c {
            differing.push(serde_json::to_string(&cfg.task).unwrap());
        }
    }
    // Monte Carlo oracle used by the quadrature criterion
    let g = RadialProfile::Gaussian { sigma: 0.5 };
    let pool = |n| rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap();
    let mc1 = pool(1).install(|| spherical_mean_mc(&g, 3, 1.0, 0.5, 200_000, 9).unwrap());
    let mc3 = pool(3).install(|| spherical_mean_mc(&g, 3, 1.0, 0.5, 200_000, 9).unwrap());
    if mc1 != mc3 {
        differing.push("spherical_mean_mc".into());
    }
    verdict(
        "AC11",
        differing.is_empty(),
        start.elapsed(),
        Duration::from_secs(1200),
        &format!("{} reports at 1 and 3 threads; differing: {differing:?}", configs.len() + 1),
    );
}
