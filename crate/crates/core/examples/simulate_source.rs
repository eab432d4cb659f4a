//! Simulates a target pmf from a coin with the interval-alignment map and
//! compares the achieved distance with its guarantee.

use specsim::source::{pushforward, simulate_source};
use specsim::spectrum::Pmf;

fn main() -> specsim::Result<()> {
    let coin = Pmf::uniform(64)?;
    let target = Pmf::from_pairs([("u", 0.5), ("v", 0.3), ("w", 0.2)])?;
    for (eps, gamma) in [(0.3, 1.21), (0.1, 2.5), (0.05, 3.0)] {
        let (map, rep) = simulate_source(&coin, &target, eps, gamma)?;
        println!("eps {eps:<5} gamma {gamma:<5} d = {:.4}  bound = {:.4}  pass = {}", rep.d, rep.bound, rep.pass);
        let out = pushforward(&map, &coin)?;
        for (y, p) in out.iter() {
            print!("  P({y}) = {p:.4}");
        }
        println!();
    }
    Ok(())
}
