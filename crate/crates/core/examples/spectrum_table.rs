//! Builds the spectrum of a five-symbol pmf and prints it as a step table.

use specsim::spectrum::{build_spectrum, Pmf};

fn main() -> specsim::Result<()> {
    let p = Pmf::from_pairs([("z1", 0.025), ("z2", 0.075), ("z3", 0.2), ("z4", 0.3), ("z5", 0.4)])?;
    let s = build_spectrum(&p)?;
    println!("{:>8} {:>8} {:>10}", "from", "to", "c");
    for seg in s.segments() {
        println!("{:>8.3} {:>8.3} {:>10.4}", seg.lo, seg.hi, seg.value);
    }
    println!("c(0.9) = {:.4}", s.eval(0.9)?);
    Ok(())
}
