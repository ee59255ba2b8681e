// Spherical means of radial functions, multiplier decay and the small-ball probe.

use maximal_lab::dilation_set::{standard_set, StandardSet};
use maximal_lab::spherical::{
    multiplier_decay, spherical_mean_mc, spherical_mean_radial, weak_type_ratio_probe, Bump, RadialProfile,
};

pub fn run_example() -> maximal_lab::Result<()> {
    let g = RadialProfile::Gaussian { sigma: 0.7 };
    let exact = spherical_mean_radial(&g, 3, 1.2, 0.5)?;
    let (mc, err) = spherical_mean_mc(&g, 3, 1.2, 0.5, 100_000, 1)?;
    println!("mean over sphere of radius 1.2 at |x| = 0.5: {exact:.8} (Monte Carlo {mc:.5} ± {err:.5})");

    for row in multiplier_decay(3, 4..=7, Bump::Exp)? {
        println!("j = {}: M_j = {:.4e}, M_j 2^j = {:.4}", row.j, row.m_j, row.normalized);
    }

    let set = standard_set(StandardSet::Lacunary)?;
    let rep = weak_type_ratio_probe(&set, 2, 1.5, &[1e-2, 1e-3])?;
    for r in &rep.rows {
        println!("eps = {:e}: R = {:.4}", r.eps, r.ratio);
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
