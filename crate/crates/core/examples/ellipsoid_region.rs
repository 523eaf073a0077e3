//! Localizes the optimum of a ridge-type problem with the ellipsoid method and
//! checks that the solution lies in every intermediate region.

use samplescreen::synthetic::gen_synthetic_regression;
use samplescreen::{build_region, solve, ErmProblem, LossKind, Penalty, Region, SafeLoss, SolverOptions};

fn main() -> samplescreen::Result<()> {
    let data = gen_synthetic_regression(200, 8, 4, 0.05, 1)?.data;
    let prob = ErmProblem::new(data, SafeLoss::new(LossKind::SquareDistance, 0.1)?, Penalty::l2(0.05)?)?;
    let x_star = solve(&prob, &[0.0; 8], &SolverOptions::new(1e-12, 1e5))?.x;

    let radius = 5.0;
    for k in [1, 5, 10, 20, 40] {
        let built = build_region(&prob, &[0.0; 8], radius, k)?;
        let Region::Ellipsoid(e) = &built.region else {
            println!("k={k}: the center is optimal");
            continue;
        };
        let m = built.region.membership(&x_star)?;
        println!(
            "k={k:>2}  log det E = {:>9.3}  min eig = {:.3e}  x* level = {:.3}  inside = {}",
            e.log_det(),
            e.min_eigenvalue(),
            m.level,
            m.is_inside(1e-9)
        );
    }
    Ok(())
}
