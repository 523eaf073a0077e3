//! A-posteriori safety audit of a screening outcome.

use serde::{Deserialize, Serialize};

use crate::erm::ErmProblem;
use crate::error::{Error, Result};
use crate::losses::FlatInterval;
use crate::region::Region;
use crate::screening::flat_interval_of;
use crate::solver::{solve, SolverOptions};

/// Slack on the region membership test.
pub const MEMBERSHIP_TOL: f64 = 1e-9;
/// Relative primal tolerance for the refit check.
pub const REFIT_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub passed: bool,
    /// The measured quantity behind the verdict.
    pub value: f64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    /// (a) the reference solution lies in the region.
    pub contains_solution: Check,
    /// (b) every screened sample's margin is strictly inside the flat interval.
    pub margins_inside: Check,
    /// (c) refitting without the screened samples gives the same objective.
    pub refit_matches: Check,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.contains_solution.passed && self.margins_inside.passed && self.refit_matches.passed
    }
}

/// Audits `screened` against a high-accuracy full-data solution `x_full`.
/// The refit starts from zero so it cannot inherit `x_full`.
pub fn audit_safety(
    prob: &ErmProblem,
    screened: &[bool],
    x_full: &[f64],
    region: &Region,
    solver: &SolverOptions,
) -> Result<AuditReport> {
    let full = prob.unrestricted();
    if screened.len() != full.n() {
        return Err(Error::DimensionMismatch {
            expected: full.n(),
            got: screened.len(),
        });
    }
    let interval = flat_interval_of(full.loss())?;

    let contains_solution = containment_check(region, x_full)?;
    let margins_inside = margin_check(interval, &full.margins(x_full)?, screened);
    let refit_matches = if screened.iter().any(|&s| s) {
        let sub = full.without(screened)?;
        let res = solve(&sub, &vec![0.0; full.p()], solver)?;
        refit_check(full.primal(&res.x)?, full.primal(x_full)?, solver.tol)
    } else {
        nothing_screened()
    };

    Ok(AuditReport {
        contains_solution,
        margins_inside,
        refit_matches,
    })
}

pub(crate) fn containment_check(region: &Region, x: &[f64]) -> Result<Check> {
    let m = region.membership(x)?;
    Ok(Check {
        passed: m.is_inside(MEMBERSHIP_TOL),
        value: m.level,
        detail: format!("level {:.6e}, cut {:.6e}", m.level, m.cut_value),
    })
}

pub(crate) fn margin_check(interval: FlatInterval, margins: &[f64], screened: &[bool]) -> Check {
    let mut worst = f64::INFINITY;
    let mut failures = 0;
    for (&t, _) in margins.iter().zip(screened).filter(|(_, &s)| s) {
        let d = interval.depth(t);
        worst = worst.min(d);
        if d <= 0.0 {
            failures += 1;
        }
    }
    Check {
        passed: failures == 0,
        value: worst,
        detail: format!("{failures} screened samples outside the flat interval"),
    }
}

/// Relative objective agreement, loosened to the solver tolerance when that
/// is coarser than [`REFIT_TOL`].
pub(crate) fn refit_check(p_fit: f64, p_ref: f64, solver_tol: f64) -> Check {
    let scale = p_ref.abs().max(1e-12);
    let rel = (p_fit - p_ref).abs() / scale;
    Check {
        passed: rel <= REFIT_TOL.max(10.0 * solver_tol / scale),
        value: rel,
        detail: format!("full-data objective {p_fit:.16e} vs {p_ref:.16e}"),
    }
}

pub(crate) fn nothing_screened() -> Check {
    Check {
        passed: true,
        value: 0.0,
        detail: "nothing screened".to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Dataset;
    use crate::losses::{LossKind, Penalty, SafeLoss, Task};
    use crate::region::{BallRegion, EllipsoidRegion};

    fn problem() -> ErmProblem {
        let ds = Dataset::from_dense(
            vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0], vec![0.5, -1.0]],
            vec![1.0, -0.5, 0.3, 2.0],
            Task::Regression,
        )
        .unwrap();
        ErmProblem::new(
            ds,
            SafeLoss::new(LossKind::SquareDistance, 0.2).unwrap(),
            Penalty::l2(0.1).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn empty_screen_is_safe() {
        let prob = problem();
        let x = solve(&prob, &[0.0, 0.0], &SolverOptions::new(1e-14, 1e5)).unwrap().x;
        let region = Region::Ball(BallRegion::new(x.clone(), 0.1).unwrap());
        let r = audit_safety(&prob, &[false; 4], &x, &region, &SolverOptions::default()).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn shrunken_region_fails_containment() {
        let prob = problem();
        let opts = SolverOptions::new(1e-14, 1e5);
        let x = solve(&prob, &[0.0, 0.0], &opts).unwrap().x;
        let off: Vec<f64> = x.iter().map(|v| v + 0.5).collect();
        let region = Region::Ellipsoid(EllipsoidRegion::sphere(off, 1.0).unwrap());
        let ok = audit_safety(&prob, &[false; 4], &x, &region, &opts).unwrap();
        assert!(ok.contains_solution.passed);
        let bad = audit_safety(&prob, &[false; 4], &x, &region.shrunk(0.01).unwrap(), &opts).unwrap();
        assert!(!bad.contains_solution.passed);
    }

    #[test]
    fn wrong_mask_is_caught() {
        let prob = problem();
        let opts = SolverOptions::new(1e-14, 1e5);
        let x = solve(&prob, &[0.0, 0.0], &opts).unwrap().x;
        let margins = prob.margins(&x).unwrap();
        // screen the sample with the largest residual
        let worst = (0..4)
            .max_by(|&i, &j| margins[i].abs().total_cmp(&margins[j].abs()))
            .unwrap();
        let mut mask = [false; 4];
        mask[worst] = true;
        let region = Region::Ball(BallRegion::point(x.clone()));
        let r = audit_safety(&prob, &mask, &x, &region, &opts).unwrap();
        assert!(!r.margins_inside.passed);
        assert!(!r.refit_matches.passed);
    }
}
