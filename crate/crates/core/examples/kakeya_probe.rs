// Thin rectangles in many directions, their union area and the
// restricted weak type probe with the full interval of radii.

use maximal_lab::counterexamples::{besicovitch_family, restricted_weak_type_probe, union_area_mc, KakeyaParams};
use maximal_lab::dilation_set::{standard_set, StandardSet};

pub fn run_example() -> maximal_lab::Result<()> {
    let family = besicovitch_family(4)?;
    let area = union_area_mc(&family, 20_000, 1)?;
    println!("{} rectangles, union area {:.3e} of total {:.3e}", family.rectangles.len(), area.area, area.total_area);

    let set = standard_set(StandardSet::Full)?;
    let mut params = KakeyaParams::new(3, 1);
    params.area_samples = 20_000;
    let r = restricted_weak_type_probe(&set, params)?;
    println!("B = {}, hits {}/{}, disjoint {:?}, ratio {:.4e}", r.b, r.hits, r.translated, r.disjoint, r.ratio);
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
