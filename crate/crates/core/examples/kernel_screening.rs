//! Screening in a kernel model: the Gram rows play the role of the features
//! and the ellipsoid lives in the space of expansion coefficients.

use samplescreen::kernels::audit_kernel;
use samplescreen::synthetic::gen_synthetic_classification;
use samplescreen::{build_region, screen_kernel, solve, GramProblem, Kernel, LossKind, SafeLoss, SolverOptions};

fn main() -> samplescreen::Result<()> {
    let data = gen_synthetic_classification(150, 4, 4.0, 3)?.data;
    let loss = SafeLoss::new(LossKind::SquaredHinge, 0.5)?;
    let opts = SolverOptions::new(1e-10, 1e5);

    for kernel in [Kernel::Linear, Kernel::Rbf { gamma: 0.5 }, Kernel::Polynomial { degree: 2, coef: 1.0 }] {
        let prob = GramProblem::from_dataset(&data, kernel, loss, 1e-3)?;
        let n = prob.n();
        let alpha = solve(&prob, &vec![0.0; n], &opts)?.x;
        let warm = solve(&prob, &vec![0.0; n], &SolverOptions::new(1e-10, 20.0))?.x;

        // The coefficient objective is not strongly convex, so there is no
        // gap ball; for illustration the radius is twice the true distance.
        let dist = warm.iter().zip(&alpha).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let region = build_region(&prob, &warm, 2.0 * dist, 20)?.region;
        let report = screen_kernel(&prob, &region)?;
        let audit = audit_kernel(&prob, &report.screened, &alpha, &region, &opts)?;
        println!(
            "{kernel:?}: screened {} of {n}, audit passed: {}",
            report.screened_count(),
            audit.passed()
        );
    }
    Ok(())
}
