// Disks along a Cantor set of radii: the L^{3/2} norm grows like N^{2/3}.

use maximal_lab::counterexamples::{cantor_counterexample, cantor_slopes};

pub fn run_example() -> maximal_lab::Result<()> {
    let a = 1.0 / 16.0;
    let reports = (2..=4)
        .map(|n| cantor_counterexample(n, a, a * 0.25f64.powi(n as i32) / 4.0, 2000, 7))
        .collect::<maximal_lab::Result<Vec<_>>>()?;
    for r in &reports {
        println!("N = {}: |f|_3/2 = {:.4}, weak norm >= {:.4}, ratio {:.4}", r.n_scales, r.f_norm, r.weak_norm, r.ratio);
    }
    let (f, ratio) = cantor_slopes(&reports);
    println!("log-log slopes: norm {f:.3}, ratio {ratio:.3}");
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
