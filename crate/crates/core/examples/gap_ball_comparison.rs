//! Screened counts from the duality-gap ball and from the ellipsoid started
//! at that ball, at the same iterate.

use samplescreen::screening::{safe_initial_ball, screen_ellipsoid};
use samplescreen::synthetic::gen_synthetic_classification;
use samplescreen::{screen_with_gap_ball, solve, ErmProblem, GapRadiusRule, LossKind, Penalty, SafeLoss, SolverOptions};

fn main() -> samplescreen::Result<()> {
    let data = gen_synthetic_classification(2000, 50, 3.0, 0)?.data;
    println!("{:>8} {:>10} {:>9} {:>9}", "lambda", "gap", "gap ball", "ellipsoid");
    for lambda in [1e-2, 1e-1, 1.0] {
        let prob = ErmProblem::new(data.clone(), SafeLoss::new(LossKind::SquaredHinge, 0.5)?, Penalty::l2(lambda)?)?;
        let x = solve(&prob, &[0.0; 50], &SolverOptions::new(1e-5, 1e4))?.x;
        let (ball_report, _) = screen_with_gap_ball(&prob, &x, GapRadiusRule::Sqrt)?;
        let (ell_report, _) = screen_ellipsoid(&prob, &safe_initial_ball(&prob, &x)?, 20)?;
        println!(
            "{lambda:>8} {:>10.2e} {:>9} {:>9}",
            prob.duality_gap(&x)?,
            ball_report.screened_count(),
            ell_report.screened_count()
        );
    }
    Ok(())
}
