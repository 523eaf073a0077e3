//! Deletes training samples by screening score, by early margin or at random,
//! refits, and reports the held-out R².

use samplescreen::compression::{compression_curve, CompressionConfig, Method};
use samplescreen::synthetic::gen_synthetic_regression;
use samplescreen::{ErmProblem, LossKind, Penalty, SafeLoss};

fn main() -> samplescreen::Result<()> {
    let data = gen_synthetic_regression(100, 10, 5, 0.1, 0)?.data;
    let prob = ErmProblem::new(data, SafeLoss::new(LossKind::SquareDistance, 0.1)?, Penalty::l1(0.01)?)?;
    let curve = compression_curve(&prob, &CompressionConfig::default())?;

    println!("{:>8} {:>10} {:>10} {:>10}", "deleted", "screening", "margin", "random");
    let fractions: Vec<f64> = curve
        .points
        .iter()
        .filter(|p| p.method == Method::Screening)
        .map(|p| p.fraction)
        .collect();
    for f in fractions {
        let mean = |m| curve.point(f, m).map_or(f64::NAN, |p| p.mean);
        println!(
            "{:>7.0}% {:>10.4} {:>10.4} {:>10.4}",
            100.0 * f,
            mean(Method::Screening),
            mean(Method::Margin),
            mean(Method::Random)
        );
    }
    Ok(())
}
