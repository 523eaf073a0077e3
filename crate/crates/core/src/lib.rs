//! Safe screening of data points for regularized empirical risk minimization.
//!
//! Losses with a flat region ("safe" losses) have a zero dual variable for
//! every sample whose margin stays inside that region at the optimum. Given a
//! region known to contain the optimum, such samples can be certified and
//! removed before solving. Regions come from a few iterations of the
//! ellipsoid method or from a duality-gap ball.
//!
//! ```
//! use samplescreen::{build_region, screen, Dataset, ErmProblem, LossKind, Penalty, SafeLoss, Task};
//!
//! let ds = Dataset::from_dense(
//!     vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]],
//!     vec![0.1, 0.2, 0.25],
//!     Task::Regression,
//! )?;
//! let prob = ErmProblem::new(ds, SafeLoss::new(LossKind::SquareDistance, 0.5)?, Penalty::l2(1.0)?)?;
//! let built = build_region(&prob, &[0.0, 0.0], 1.0, 20)?;
//! let report = screen(&prob, &built.region)?;
//! assert_eq!(report.scores.len(), 3);
//! # Ok::<(), samplescreen::Error>(())
//! ```

pub mod audit;
pub mod cli;
pub mod compression;
pub mod data;
pub mod erm;
pub mod error;
pub mod flops;
pub mod io;
pub mod kernels;
pub mod losses;
pub mod oracle;
pub mod region;
pub mod report;
pub mod screening;
pub mod solver;
pub mod synthetic;

pub use audit::{audit_safety, AuditReport};
pub use data::{Dataset, Row};
pub use kernels::{gram_matrix, screen_kernel, GramProblem, Kernel};
pub use erm::{DualPoint, ErmProblem};
pub use error::{Error, Result};
pub use losses::{FlatInterval, LossKind, Penalty, PenaltyKind, SafeLoss, Task};
pub use region::{build_region, init_ball, BallRegion, EllipsoidRegion, InitStrategy, Region};
pub use screening::{screen, screen_classification, screen_regression, screen_with_gap_ball, GapRadiusRule, ScreeningReport};
pub use solver::{regularization_path, solve, solve_screened, PathOptions, PathResult, SolveResult, SolverOptions};
