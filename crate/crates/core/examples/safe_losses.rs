//! Values, derivatives and conjugates of the safe losses, and the margins on
//! which each one is exactly flat.

use samplescreen::{LossKind, SafeLoss};

fn main() -> samplescreen::Result<()> {
    let mu = 0.5;
    for kind in LossKind::ALL {
        let loss = SafeLoss::new(kind, mu)?;
        let flat = match loss.flat_interval() {
            Some(i) => format!("{i:?}"),
            None => "none (not safe)".to_string(),
        };
        println!("{:<9} task={:<14} flat={flat}", loss.id(), loss.task().as_str());
        for t in [-2.0, -0.25, 0.0, 0.75, 2.0] {
            println!(
                "    t={t:>5.2}  f={:>9.5}  f'={:>8.4}  f*(f')={:>9.5}",
                loss.value(t),
                loss.derivative(t),
                loss.conjugate(loss.derivative(t)),
            );
        }
    }
    Ok(())
}
