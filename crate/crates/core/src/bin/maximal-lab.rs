use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use maximal_lab::conditions::{ConditionId, DEFAULT_EPS};
use maximal_lab::counterexamples::KakeyaParams;
use maximal_lab::dilation_set::{SetDescriptor, StandardSet};
use maximal_lab::pipeline::{self, ExperimentConfig, KakeyaTuning, Task, PAPER_CANTOR_A, PAPER_CANTOR_SAMPLES, PAPER_N_MAX};
use maximal_lab::rng::{seed_from_env, DEFAULT_SEED};
use maximal_lab::Error;

#[derive(Parser)]
#[command(name = "maximal-lab", version, about = "Entropy invariants of dilation sets and spherical maximal probes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Set: a shorthand (power:1, log:0.6, cantor3:14, cantor4:14, lacunary, full),
    /// inline JSON, or a path to a JSON descriptor.
    #[arg(long, global = true)]
    set: Option<String>,
    #[arg(long, global = true, default_value_t = 2)]
    d: u32,
    #[arg(long = "nmax", alias = "n-max", global = true, conflicts_with = "paper_defaults")]
    n_max: Option<u32>,
    #[arg(long, global = true, conflicts_with = "paper_defaults")]
    seed: Option<u64>,
    /// Directory for report.json and CSV side files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Pin every truncation and tolerance to its canonical value.
    #[arg(long, global = true)]
    paper_defaults: bool,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Print the full JSON report instead of a summary.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Entropy profile and critical exponent.
    Analyze,
    /// Evaluate conditions at one or more exponents.
    Check {
        #[arg(long = "condition", alias = "conditions", value_delimiter = ',', default_value = "cpinf")]
        conditions: Vec<ConditionArg>,
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<f64>,
        /// A number, or `inf` to turn cpq into cpinf.
        #[arg(long)]
        q: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
        #[arg(long)]
        l_max: Option<u32>,
    },
    /// Equally spaced decomposition of the blocks.
    Decompose {
        /// Block index; ignored for dyadically periodic sets.
        #[arg(long, default_value_t = 0)]
        k: i32,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
    },
    /// Numerical probe of the maximal operator.
    Operator {
        #[arg(long, value_enum, default_value = "smallball")]
        probe: Probe,
        #[arg(long)]
        p: f64,
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
    },
    /// Counterexample constructions.
    Counterexample {
        #[command(subcommand)]
        which: Counterexample,
    },
    /// Predicted against measured endpoint exponents.
    TheoremTable {
        /// Comma-separated shorthands; defaults to the standard list.
        #[arg(long, value_delimiter = ',')]
        sets: Option<Vec<String>>,
    },
}

#[derive(Subcommand)]
enum Counterexample {
    Cantor {
        /// Number of scales N; a list runs each and fits slopes.
        #[arg(long = "N", alias = "scales", value_delimiter = ',', default_value = "2,3,4,5,6")]
        scales: Vec<u32>,
        #[arg(long, default_value_t = PAPER_CANTOR_A)]
        a: f64,
        #[arg(long)]
        h: Option<f64>,
        #[arg(long, default_value_t = PAPER_CANTOR_SAMPLES)]
        samples: usize,
    },
    Kakeya {
        #[arg(long, value_delimiter = ',', default_value = "3,4,5")]
        n: Vec<u32>,
        #[arg(long)]
        stride: Option<usize>,
        #[arg(long)]
        samples_per_rect: Option<usize>,
        #[arg(long)]
        area_samples: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Probe {
    Smallball,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConditionArg {
    Cpq,
    Cpinf,
    Prop12,
    Carleson,
    Eq113,
    Eq114,
    RP,
    RTilde,
}

impl From<ConditionArg> for ConditionId {
    fn from(c: ConditionArg) -> Self {
        match c {
            ConditionArg::Cpq => ConditionId::Cpq,
            ConditionArg::Cpinf => ConditionId::Cpinf,
            ConditionArg::Prop12 => ConditionId::Prop12,
            ConditionArg::Carleson => ConditionId::Carleson,
            ConditionArg::Eq113 => ConditionId::Eq113,
            ConditionArg::Eq114 => ConditionId::Eq114,
            ConditionArg::RP => ConditionId::RP,
            ConditionArg::RTilde => ConditionId::RTilde,
        }
    }
}

fn shorthand(s: &str) -> Option<StandardSet> {
    let (name, arg) = s.split_once(':').map_or((s, None), |(a, b)| (a, Some(b)));
    let num = || arg?.parse::<f64>().ok();
    let depth = || arg.map_or(Some(14), |a| a.parse().ok());
    Some(match name {
        "power" => StandardSet::Power { alpha: num()? },
        "log" => StandardSet::Log { beta: num()? },
        "cantor3" => StandardSet::MiddleThirdCantor { depth: depth()? },
        "cantor4" => StandardSet::MiddleHalvesCantor { depth: depth()? },
        "lacunary" => StandardSet::Lacunary,
        "full" => StandardSet::Full,
        _ => return None,
    })
}

fn parse_set(s: &str) -> Result<SetDescriptor, Error> {
    if let Some(std) = shorthand(s) {
        return Ok(std.descriptor());
    }
    if s.trim_start().starts_with('{') {
        return SetDescriptor::from_json(s);
    }
    SetDescriptor::from_json(&std::fs::read_to_string(s)?)
}

fn default_table() -> Vec<StandardSet> {
    vec![
        StandardSet::Power { alpha: 0.5 },
        StandardSet::Power { alpha: 1.0 },
        StandardSet::Power { alpha: 2.0 },
        StandardSet::Log { beta: 1.0 },
        StandardSet::MiddleThirdCantor { depth: 14 },
        StandardSet::MiddleHalvesCantor { depth: 14 },
        StandardSet::Lacunary,
        StandardSet::Full,
    ]
}

fn config(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let c = &cli.common;
    let task = match &cli.command {
        Command::Analyze => Task::Analyze,
        Command::Check { conditions, p, q, eps, l_max } => Task::Check {
            conditions: conditions
                .iter()
                .map(|&c| match c {
                    ConditionArg::Cpq if q.is_some_and(f64::is_infinite) => ConditionId::Cpinf,
                    c => c.into(),
                })
                .collect(),
            exponents: p.clone(),
            q: q.filter(|q| q.is_finite()),
            eps: *eps,
            l_max: *l_max,
        },
        Command::Decompose { p, eps, .. } => Task::Decompose { p: *p, eps: *eps },
        Command::Operator { probe: Probe::Smallball, p, eps } => {
            Task::Operator { p: *p, eps_list: eps.clone().unwrap_or_else(|| pipeline::PAPER_EPS_LIST.to_vec()) }
        }
        Command::Counterexample { which: Counterexample::Cantor { scales, a, h, samples } } => {
            Task::Cantor { scales: scales.clone(), a: *a, h: *h, samples: *samples }
        }
        Command::Counterexample { which: Counterexample::Kakeya { n, stride, samples_per_rect, area_samples } } => {
            let base = KakeyaParams::new(0, 0);
            let tuned = KakeyaTuning {
                stride: stride.unwrap_or(base.stride),
                samples_per_rect: samples_per_rect.unwrap_or(base.samples_per_rect),
                c: base.c,
                hit_fraction: base.hit_fraction,
                area_samples: area_samples.unwrap_or(base.area_samples),
            };
            let overridden = stride.is_some() || samples_per_rect.is_some() || area_samples.is_some();
            if overridden && c.paper_defaults {
                return Err(Error::InvalidParameter("probe tuning flags conflict with --paper-defaults".into()));
            }
            Task::Kakeya { n: n.clone(), params: overridden.then_some(tuned) }
        }
        Command::TheoremTable { sets } => Task::TheoremTable {
            sets: match sets {
                None => default_table(),
                Some(v) => v
                    .iter()
                    .map(|s| shorthand(s).ok_or_else(|| Error::Descriptor(format!("unknown set shorthand {s:?}"))))
                    .collect::<Result<_, _>>()?,
            },
        },
    };
    let set = c.set.as_deref().map(parse_set).transpose()?;
    // the truncation flags conflict with --paper-defaults, so they are unset there
    let mut cfg = ExperimentConfig::paper_defaults(set, c.d, task);
    cfg.n_max = c.n_max.unwrap_or(PAPER_N_MAX);
    cfg.seed = c.seed.unwrap_or(DEFAULT_SEED);
    if let Some(seed) = seed_from_env() {
        cfg.seed = seed;
    }
    if let Command::Decompose { k, .. } = cli.command {
        cfg.k_window = (k, k);
    }
    cfg.output = c.out.clone();
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error [cli]: {e}");
            return ExitCode::from(1);
        }
    }
    let result = config(&cli).and_then(|cfg| pipeline::run(&cfg));
    match result {
        Ok(report) => {
            let text = if cli.common.json {
                match report.to_json() {
                    Ok(s) => s,
                    Err(e) => {
                        eprintln!("error [{}]: {e}", e.module());
                        return ExitCode::from(1);
                    }
                }
            } else {
                let mut s = String::new();
                for (section, lines) in pipeline::summary(&report) {
                    s += &format!("[{section}]\n");
                    for l in lines {
                        s += &format!("  {l}\n");
                    }
                }
                s
            };
            // a closed pipe is not an error of the run
            let _ = writeln!(std::io::stdout().lock(), "{}", text.trim_end());
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error [{}]: {e}", e.module());
            ExitCode::from(1)
        }
    }
}
