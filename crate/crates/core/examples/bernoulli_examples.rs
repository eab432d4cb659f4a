//! Runs the worked i.i.d. and mixture examples at growing block lengths.

use specsim::product::{example_suite, ExampleParams};

fn main() -> specsim::Result<()> {
    for n in [250, 1000, 4000] {
        for (alpha, beta) in [(0.2, 0.4), (0.4, 0.2)] {
            for example in [1, 2] {
                let p = ExampleParams::new(example, n)
                    .with_qp(0.05, 0.11, 0.2, 0.3)
                    .with_weights(alpha, beta);
                let r = example_suite(&p)?;
                println!(
                    "example {example} n {n:<5} alpha {alpha} beta {beta}: {:<28} quantity {:>10.4} threshold {:>10.4}",
                    r.verdict, r.quantity, r.threshold
                );
            }
        }
    }
    let r = example_suite(&ExampleParams::new(4, 256))?;
    println!("example 4 n 256: {} (gap inf {:.4})", r.verdict, r.quantity);
    Ok(())
}
