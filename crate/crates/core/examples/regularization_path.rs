//! Warm-started path over a logarithmic grid, with and without screening.
//! Costs are in epoch-equivalents (one pass over the data).

use samplescreen::solver::log_grid;
use samplescreen::synthetic::gen_synthetic_classification;
use samplescreen::{regularization_path, ErmProblem, LossKind, PathOptions, Penalty, SafeLoss, SolverOptions};

fn main() -> samplescreen::Result<()> {
    let data = gen_synthetic_classification(2000, 50, 3.0, 0)?.data;
    let prob = ErmProblem::new(data, SafeLoss::new(LossKind::SquaredHinge, 0.5)?, Penalty::l2(0.1)?)?;
    let grid = log_grid(0.1, 20, 10);
    let mut opts = PathOptions {
        screening: true,
        steps: 5,
        solver: SolverOptions::new(1e-8, 1e4),
    };
    let screened = regularization_path(&prob, &grid, &opts)?;
    opts.screening = false;
    let plain = regularization_path(&prob, &grid, &opts)?;

    println!("{:>10} {:>9} {:>12} {:>12}", "lambda", "screened", "epochs", "plain");
    for (s, p) in screened.points.iter().zip(&plain.points) {
        println!(
            "{:>10.3e} {:>8.1}% {:>12.1} {:>12.1}",
            s.lambda,
            100.0 * s.screened_fraction,
            s.cumulative_epochs,
            p.cumulative_epochs
        );
    }
    Ok(())
}
