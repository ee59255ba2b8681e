// Condition verdicts on either side of the critical exponent of E(1) in the plane.

use maximal_lab::conditions::{check_cp_inf, check_cpq, Exponents, TrendPolicy};
use maximal_lab::dilation_set::{standard_set, StandardSet};
use maximal_lab::entropy::profile;

pub fn run_example() -> maximal_lab::Result<()> {
    let set = standard_set(StandardSet::Power { alpha: 1.0 })?;
    let prof = profile(&set, 2, 20, (0, 0))?;
    let policy = TrendPolicy::default();
    for p in [1.4, 1.5, 1.95] {
        let e = Exponents::new(2, p, None)?;
        let cp = check_cp_inf(&prof, &e, &policy);
        let cpq = check_cpq(&prof, &Exponents::new(2, p, Some(2.0))?, &policy)?;
        println!("p = {p}: cpinf {:?} (value {:.3}), cpq with q = 2 {:?}", cp.verdict, cp.value, cpq.verdict);
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
