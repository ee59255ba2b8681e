// Splits the convex block of E(2) into equally spaced families.

use maximal_lab::dilation_set::{standard_set, StandardSet};
use maximal_lab::regularity::decompose_convex;

pub fn run_example() -> maximal_lab::Result<()> {
    let set = standard_set(StandardSet::Power { alpha: 2.0 })?;
    let block = set.block(0, 2f64.powi(-14))?;
    let dec = decompose_convex(&block, 0)?;
    for (mu, fam) in &dec.families {
        let pts: usize = fam.iter().map(|s| s.card()).sum();
        println!("gap class 2^-{mu}: {} sets, {pts} points", fam.len());
    }
    if let Some(t) = dec.tail {
        println!("tail [{:.6}, {:.6}] below 2^-{}", t.lo, t.hi, t.mu);
    }
    println!("endpoint slope {:.4}", dec.endpoint_slope(14));
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
