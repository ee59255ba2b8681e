// Entropy numbers of a few standard dilation sets and the critical exponent
// read off from their growth.

use maximal_lab::dilation_set::{standard_set, StandardSet};
use maximal_lab::entropy::{critical_exponent, profile};

pub fn run_example() -> maximal_lab::Result<()> {
    for which in [StandardSet::Power { alpha: 1.0 }, StandardSet::MiddleThirdCantor { depth: 10 }, StandardSet::Lacunary] {
        let set = standard_set(which)?;
        let prof = profile(&set, 2, 12, (0, 0))?;
        let row: Vec<u64> = (0..=12).map(|n| prof.get(0, n).unwrap_or(0)).collect();
        let est = critical_exponent(&prof);
        println!("{:<40} N(2^-n) = {:?}", which.label(), row);
        println!("{:<40} p_estimate = {:.4}", "", est.p_estimate);
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
