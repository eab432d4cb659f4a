//! Simulates a ternary-input channel from a coin whose law depends on the
//! input, one interval-alignment map per input symbol.

use specsim::channel::simulate_channel;
use specsim::product::{example3_instance, ExampleParams};

fn main() -> specsim::Result<()> {
    let params = ExampleParams::new(3, 8)
        .with_qp(0.05, 0.11, 0.2, 0.3)
        .with_weights(0.25, 0.4);
    let (input, chan, coupling) = example3_instance(&params)?;
    println!("{} inputs, {} outputs", chan.inputs().len(), chan.outputs().len());
    for eps in [0.05, 0.1, 0.3] {
        let (_, rep) = simulate_channel(&input, &chan, &coupling, eps, -f64::ln(eps))?;
        println!(
            "eps {eps:<5} joint distance {:.4}  E[deficiency] {:.4}  bound {:.4}  pass {}",
            rep.joint_distance, rep.expected_deficiency, rep.bound, rep.pass
        );
    }
    Ok(())
}
