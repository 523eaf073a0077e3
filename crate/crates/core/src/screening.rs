//! The SAFE rule for data points.
//!
//! A sample can be discarded when its margin stays strictly inside the loss's
//! flat interval for every point of a region containing the optimum. Each
//! sample gets a score, the depth of the worst-case margin inside the
//! interval; positive scores are screenable for both tasks.

use serde::{Deserialize, Serialize};

use crate::audit::AuditReport;
use crate::data::Row;
use crate::erm::ErmProblem;
use crate::error::{invalid, Error, Result};
use crate::losses::{FlatInterval, SafeLoss, Task};
use crate::region::{build_region, init_ball, BallRegion, InitStrategy, Region, Support};

/// A score must exceed this to count as strictly inside the flat interval.
pub const SCREEN_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionMeta {
    pub kind: String,
    pub steps: usize,
    pub init_radius: f64,
    pub cut_used: bool,
}

impl RegionMeta {
    pub fn of(region: &Region) -> Self {
        let kind = match region {
            Region::Ellipsoid(_) => "ellipsoid",
            Region::Ball(b) if b.is_point() => "point",
            Region::Ball(_) => "ball",
        };
        RegionMeta {
            kind: kind.to_string(),
            steps: region.steps(),
            init_radius: region.init_radius(),
            cut_used: region.has_cut(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScreeningReport {
    pub scores: Vec<f64>,
    pub screened: Vec<bool>,
    /// `μ` for regression, the start of the flat ray for classification.
    pub threshold: f64,
    pub interval: FlatInterval,
    pub region: RegionMeta,
    pub audit: Option<AuditReport>,
    pub warning: Option<String>,
}

impl ScreeningReport {
    fn from_scores(scores: Vec<f64>, interval: FlatInterval, region: &Region) -> Self {
        let degenerate = interval.is_degenerate();
        let screened = scores.iter().map(|&s| !degenerate && s > SCREEN_TOL).collect();
        ScreeningReport {
            scores,
            screened,
            threshold: interval.threshold(),
            interval,
            region: RegionMeta::of(region),
            audit: None,
            warning: degenerate
                .then(|| "flat interval has empty interior; nothing can be screened".to_string()),
        }
    }

    pub fn n(&self) -> usize {
        self.scores.len()
    }

    pub fn screened_count(&self) -> usize {
        self.screened.iter().filter(|&&s| s).count()
    }

    pub fn screened_fraction(&self) -> f64 {
        self.screened_count() as f64 / self.n() as f64
    }

    pub fn screened_indices(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.screened[i]).collect()
    }

    pub fn kept_indices(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| !self.screened[i]).collect()
    }
}

pub(crate) fn flat_interval_of(loss: &SafeLoss) -> Result<FlatInterval> {
    loss.flat_interval().ok_or(Error::NotSafeLoss(loss.id()))
}

/// Scores rows (`aᵢ`, or Gram rows for kernels) against a region.
pub(crate) fn score_rows(
    rows: &[Row],
    labels: &[f64],
    task: Task,
    interval: FlatInterval,
    region: &Region,
) -> Result<Vec<f64>> {
    let support = Support::new(region)?;
    let scores = rows
        .iter()
        .zip(labels)
        .map(|(row, &b)| {
            let s = support.spread(row);
            match task {
                Task::Regression => {
                    let upper = s.at_center + s.up - b;
                    let lower = -s.at_center + s.down + b;
                    interval.threshold() - upper.max(lower)
                }
                Task::Classification => {
                    let min = if b > 0.0 {
                        s.at_center - s.down
                    } else {
                        -s.at_center - s.up
                    };
                    interval.depth(min)
                }
            }
        })
        .collect();
    Ok(scores)
}

fn screen_checked(prob: &ErmProblem, region: &Region, task: Task) -> Result<ScreeningReport> {
    if prob.task() != task {
        return Err(Error::TaskMismatch {
            loss: prob.loss().id(),
            loss_task: prob.task().as_str(),
            data_task: task.as_str(),
        });
    }
    screen(prob, region)
}

/// Regression test: `max |aᵢᵀx − bᵢ| < μ` over the region.
pub fn screen_regression(prob: &ErmProblem, region: &Region) -> Result<ScreeningReport> {
    screen_checked(prob, region, Task::Regression)
}

/// Classification test: `min bᵢaᵢᵀx` above the start of the flat ray.
pub fn screen_classification(prob: &ErmProblem, region: &Region) -> Result<ScreeningReport> {
    screen_checked(prob, region, Task::Classification)
}

/// Screens every sample of the dataset (ignoring any restriction on `prob`).
pub fn screen(prob: &ErmProblem, region: &Region) -> Result<ScreeningReport> {
    let interval = flat_interval_of(prob.loss())?;
    if region.dim() != prob.p() {
        return Err(Error::DimensionMismatch {
            expected: prob.p(),
            got: region.dim(),
        });
    }
    let ds = prob.dataset();
    let scores = score_rows(ds.rows(), ds.labels(), ds.task(), interval, region)?;
    Ok(ScreeningReport::from_scores(scores, interval, region))
}

/// Radius of the duality-gap ball around the current iterate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapRadiusRule {
    /// `2Δ/λ`, linear in the gap.
    Linear,
    /// `sqrt(2Δ/κ)` from strong convexity.
    Sqrt,
}

impl GapRadiusRule {
    pub fn radius(self, gap: f64, lambda: f64, kappa: f64) -> Result<f64> {
        match self {
            GapRadiusRule::Linear => {
                if lambda <= 0.0 {
                    return Err(invalid("lambda", "gap ball needs lambda > 0"));
                }
                Ok(2.0 * gap / lambda)
            }
            GapRadiusRule::Sqrt => {
                if kappa <= 0.0 {
                    return Err(invalid("kappa", "sqrt gap rule needs a strongly convex objective"));
                }
                Ok((2.0 * gap / kappa).sqrt())
            }
        }
    }
}

/// Screens with the ball centered at `x` whose radius comes from the duality
/// gap at `x`. Returns the region as well.
pub fn screen_with_gap_ball(
    prob: &ErmProblem,
    x: &[f64],
    rule: GapRadiusRule,
) -> Result<(ScreeningReport, Region)> {
    let gap = prob.duality_gap(x)?;
    if !gap.is_finite() {
        return Err(Error::InfeasibleDual);
    }
    let r = rule.radius(gap, prob.lambda(), prob.kappa())?;
    let region = Region::Ball(BallRegion::new(x.to_vec(), r)?);
    Ok((screen(prob, &region)?, region))
}

/// A ball around `x0` that provably contains the optimum: from the duality
/// gap when the objective is strongly convex, otherwise from the sublevel
/// set of the penalty (`λR(x*) ≤ P(x0)`). Costs one data pass.
pub fn safe_initial_ball(prob: &ErmProblem, x0: &[f64]) -> Result<BallRegion> {
    let strategy = if prob.kappa() > 0.0 {
        InitStrategy::Gap {
            gap: prob.duality_gap(x0)?,
            kappa: prob.kappa(),
        }
    } else {
        InitStrategy::PenaltyLevelSet {
            objective: prob.primal(x0)?,
            penalty: *prob.penalty(),
        }
    };
    init_ball(x0, strategy)
}

/// Runs `steps` ellipsoid iterations from `ball`; a point stays a point.
pub fn ellipsoid_from_ball(prob: &ErmProblem, ball: &BallRegion, steps: usize) -> Result<Region> {
    if ball.is_point() {
        Ok(Region::Ball(ball.clone()))
    } else {
        Ok(build_region(prob, ball.center(), ball.radius(), steps)?.region)
    }
}

/// [`ellipsoid_from_ball`] followed by [`screen`].
pub fn screen_ellipsoid(prob: &ErmProblem, ball: &BallRegion, steps: usize) -> Result<(ScreeningReport, Region)> {
    let region = ellipsoid_from_ball(prob, ball, steps)?;
    Ok((screen(prob, &region)?, region))
}
