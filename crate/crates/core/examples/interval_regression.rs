//! Interval regression: each response is only known up to ±μ, which is the
//! square-distance loss with threshold μ. Most samples are certified
//! irrelevant before the final solve.

use samplescreen::screening::safe_initial_ball;
use samplescreen::synthetic::gen_interval_demo;
use samplescreen::{audit_safety, build_region, screen, solve, ErmProblem, LossKind, Penalty, SafeLoss, SolverOptions};

fn main() -> samplescreen::Result<()> {
    let sigma = 0.1;
    let data = gen_interval_demo(20, sigma, 0)?.data;
    let prob = ErmProblem::new(data, SafeLoss::new(LossKind::SquareDistance, 3.0 * sigma)?, Penalty::l2(0.003)?)?;

    let warm = solve(&prob, &[0.0; 2], &SolverOptions::new(1e-8, 20.0))?;
    let ball = safe_initial_ball(&prob, &warm.x)?;
    let region = build_region(&prob, ball.center(), ball.radius(), 20)?.region;
    let report = screen(&prob, &region)?;
    println!("screened {} of {} intervals", report.screened_count(), report.n());

    let opts = SolverOptions::new(1e-12, 1e5);
    let full = solve(&prob, &warm.x, &opts)?;
    let audit = audit_safety(&prob, &report.screened, &full.x, &region, &opts)?;
    println!("x* = {:?}", full.x);
    println!("audit passed: {}", audit.passed());
    println!("  refit: {}", audit.refit_matches.detail);
    Ok(())
}
