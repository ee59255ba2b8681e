// A JSON experiment config run through the pipeline, as the CLI does it.

use maximal_lab::pipeline::{run, ExperimentConfig};

pub fn run_example() -> maximal_lab::Result<()> {
    let cfg = ExperimentConfig::from_json(
        r#"{
            "set": {"type": "power", "alpha": 1.0},
            "d": 2,
            "task": {"command": "check", "conditions": ["cpinf"], "exponents": [1.45, 1.55]}
        }"#,
    )?;
    let report = run(&cfg)?;
    for v in &report.verdicts {
        println!("{} at p = {}: {:?}", v.verdict.condition, v.p, v.verdict.verdict);
    }
    println!("exit code {}", report.exit_code());
    let again = run(&cfg)?;
    assert_eq!(report.canonical_json()?, again.canonical_json()?);
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
