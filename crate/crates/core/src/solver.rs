//! Desk-scale solvers: accelerated proximal gradient with backtracking for
//! smooth losses, a subgradient method for the nonsmooth ones, and the
//! screening-accelerated regularization path.
//!
//! Cost is tracked in epochs: one epoch is one pass over the active samples,
//! charged `s/n` of a full pass when only `s` of `n` samples are active.

use serde::{Deserialize, Serialize};

use crate::erm::ErmProblem;
use crate::error::{invalid, Error, Result};
use crate::region::Region;
use crate::screening::{ellipsoid_from_ball, safe_initial_ball, screen, ScreeningReport};

/// Composite objective `f(x) + h(x)` with `f` smooth and `h` prox-friendly.
pub trait CompositeObjective {
    fn dim(&self) -> usize;
    /// `f(x)` and `∇f(x)` in one data pass.
    fn smooth_value_grad(&self, x: &[f64]) -> (f64, Vec<f64>);
    fn smooth_value(&self, x: &[f64]) -> f64;
    fn nonsmooth_value(&self, x: &[f64]) -> f64;
    fn prox(&self, x: &[f64], step: f64) -> Vec<f64>;
    /// Duality gap at `x`, one data pass. `None` when unavailable.
    fn gap(&self, x: &[f64]) -> Option<f64>;
    /// A subgradient of `f + h`, for the nonsmooth fallback.
    fn subgradient(&self, x: &[f64]) -> Vec<f64>;
    /// Whether `f` has a Lipschitz gradient.
    fn is_smooth(&self) -> bool;
    /// Fraction of a full data pass that one evaluation costs.
    fn pass_cost(&self) -> f64 {
        1.0
    }
}

impl CompositeObjective for ErmProblem {
    fn dim(&self) -> usize {
        self.p()
    }

    fn smooth_value_grad(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let pass = self.pass(x);
        (pass.loss_mean, pass.grad)
    }

    fn smooth_value(&self, x: &[f64]) -> f64 {
        self.loss_mean(x)
    }

    fn nonsmooth_value(&self, x: &[f64]) -> f64 {
        self.lambda() * self.penalty().value(x)
    }

    fn prox(&self, x: &[f64], step: f64) -> Vec<f64> {
        self.penalty().prox(x, step)
    }

    fn gap(&self, x: &[f64]) -> Option<f64> {
        let pass = self.pass(x);
        Some(self.gap_from_pass(x, &pass))
    }

    fn subgradient(&self, x: &[f64]) -> Vec<f64> {
        ErmProblem::subgradient(self, x).expect("dimension checked by the solver")
    }

    fn is_smooth(&self) -> bool {
        self.loss().is_smooth()
    }

    fn pass_cost(&self) -> f64 {
        self.active_count() as f64 / self.n() as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Target duality gap (or relative objective change when no gap exists).
    pub tol: f64,
    pub max_epochs: f64,
    /// Iterations between duality-gap evaluations.
    pub gap_every: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-8,
            max_epochs: 10_000.0,
            gap_every: 10,
        }
    }
}

impl SolverOptions {
    pub fn new(tol: f64, max_epochs: f64) -> Self {
        SolverOptions {
            tol,
            max_epochs,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(invalid("tol", "must be positive"));
        }
        if !(self.max_epochs > 0.0) {
            return Err(invalid("max_epochs", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub x: Vec<f64>,
    pub primal: f64,
    /// NaN when no duality gap is available.
    pub gap: f64,
    pub iterations: usize,
    pub epochs: f64,
    pub converged: bool,
}

struct Budget {
    used: f64,
    cost: f64,
    max: f64,
}

impl Budget {
    fn charge(&mut self) {
        self.used += self.cost;
    }
    fn exhausted(&self) -> bool {
        self.used >= self.max
    }
}

/// Minimizes `f + h` from `x0`.
///
/// Smooth objectives use FISTA with backtracking (trial step 1, halved until
/// the quadratic upper bound holds) and a gradient-based momentum restart,
/// which unlike an objective test keeps working once objective differences
/// drop below rounding. Nonsmooth ones
/// fall back to a normalized subgradient method with decreasing steps.
pub fn solve<O: CompositeObjective + ?Sized>(
    obj: &O,
    x0: &[f64],
    opts: &SolverOptions,
) -> Result<SolveResult> {
    opts.validate()?;
    if x0.len() != obj.dim() {
        return Err(Error::DimensionMismatch {
            expected: obj.dim(),
            got: x0.len(),
        });
    }
    if obj.is_smooth() {
        Ok(accelerated(obj, x0, opts))
    } else {
        Ok(subgradient_method(obj, x0, opts))
    }
}

fn accelerated<O: CompositeObjective + ?Sized>(obj: &O, x0: &[f64], opts: &SolverOptions) -> SolveResult {
    let mut budget = Budget {
        used: 0.0,
        cost: obj.pass_cost(),
        max: opts.max_epochs,
    };
    let mut x = x0.to_vec();
    let mut y = x.clone();
    // objective at x, known after the first gradient pass
    let mut f_x = f64::NAN;
    let mut gap = None;
    // assumed until the objective reports that it has no gap
    let mut gap_available = true;
    let mut theta = 1.0f64;
    let mut step = 1.0f64;
    let mut iterations = 0;
    let mut converged = false;

    while !converged && !budget.exhausted() {
        iterations += 1;
        let (f_y, grad_y) = obj.smooth_value_grad(&y);
        budget.charge();
        if f_x.is_nan() {
            f_x = f_y + obj.nonsmooth_value(&x);
        }
        let (x_new, f_new) = loop {
            let trial: Vec<f64> = y.iter().zip(&grad_y).map(|(a, g)| a - step * g).collect();
            let cand = obj.prox(&trial, step);
            let f_cand = obj.smooth_value(&cand);
            budget.charge();
            let mut lin = 0.0;
            let mut dist = 0.0;
            for ((c, a), g) in cand.iter().zip(&y).zip(&grad_y) {
                lin += g * (c - a);
                dist += (c - a) * (c - a);
            }
            // rounding in f must not be read as a failed bound, or the step
            // collapses near the optimum
            let slack = 8.0 * f64::EPSILON * f_y.abs();
            if f_cand <= f_y + lin + dist / (2.0 * step) + slack || dist == 0.0 {
                break (cand, f_cand);
            }
            step *= 0.5;
            if step < 1e-300 {
                break (cand, f_cand);
            }
        };
        let obj_new = f_new + obj.nonsmooth_value(&x_new);
        let mut dx = 0.0;
        let mut overshoot = 0.0;
        for ((xn, xo), yv) in x_new.iter().zip(&x).zip(&y) {
            dx += (xn - xo) * (xn - xo);
            overshoot += (yv - xn) * (xn - xo);
        }
        // gradient-based restart: the step moved against the momentum
        let theta_next = if overshoot > 0.0 {
            1.0
        } else {
            0.5 * (1.0 + (1.0 + 4.0 * theta * theta).sqrt())
        };
        let beta = if overshoot > 0.0 { 0.0 } else { (theta - 1.0) / theta_next };
        y = x_new
            .iter()
            .zip(&x)
            .map(|(a, b)| a + beta * (a - b))
            .collect();
        let rel_change = (f_x - obj_new).abs() / f_x.abs().max(1e-300);
        x = x_new;
        f_x = obj_new;
        theta = theta_next;

        if gap_available && (iterations % opts.gap_every == 0 || dx == 0.0) {
            gap = obj.gap(&x);
            budget.charge();
            gap_available = gap.is_some();
            match gap {
                Some(g) if g.is_finite() => converged = g <= opts.tol,
                _ => converged = rel_change <= opts.tol,
            }
        } else if !gap_available {
            converged = rel_change <= opts.tol;
        }
        if dx == 0.0 {
            // a fixed point of the prox-gradient map; nothing will change
            break;
        }
    }
    if iterations % opts.gap_every != 0 {
        gap = obj.gap(&x);
    }
    finish(obj, x, gap, iterations, budget.used, converged, opts)
}

fn finish<O: CompositeObjective + ?Sized>(
    obj: &O,
    x: Vec<f64>,
    gap: Option<f64>,
    iterations: usize,
    epochs: f64,
    converged: bool,
    opts: &SolverOptions,
) -> SolveResult {
    let primal = obj.smooth_value(&x) + obj.nonsmooth_value(&x);
    let gap = gap.unwrap_or(f64::NAN);
    SolveResult {
        x,
        primal,
        gap,
        iterations,
        epochs,
        converged: converged || gap <= opts.tol,
    }
}

fn subgradient_method<O: CompositeObjective + ?Sized>(
    obj: &O,
    x0: &[f64],
    opts: &SolverOptions,
) -> SolveResult {
    let mut budget = Budget {
        used: 0.0,
        cost: obj.pass_cost(),
        max: opts.max_epochs,
    };
    let mut x = x0.to_vec();
    let radius = 1.0 + x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut best = x.clone();
    let mut best_val = obj.smooth_value(&x) + obj.nonsmooth_value(&x);
    budget.charge();
    let mut best_gap = obj.gap(&x);
    budget.charge();
    let mut iterations = 0;
    let mut converged = best_gap.is_some_and(|g| g <= opts.tol);
    while !converged && !budget.exhausted() {
        iterations += 1;
        let g = obj.subgradient(&x);
        budget.charge();
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            best = x.clone();
            converged = true;
            break;
        }
        let eta = radius / (norm * (iterations as f64).sqrt());
        for (xi, gi) in x.iter_mut().zip(&g) {
            *xi -= eta * gi;
        }
        let val = obj.smooth_value(&x) + obj.nonsmooth_value(&x);
        budget.charge();
        if val < best_val {
            best_val = val;
            best = x.clone();
        }
        if iterations % opts.gap_every == 0 {
            best_gap = obj.gap(&best);
            budget.charge();
            converged = best_gap.is_some_and(|g| g <= opts.tol);
        }
    }
    let gap = obj.gap(&best);
    finish(obj, best, gap, iterations, budget.used, converged, opts)
}

/// Screens with `region`, then solves on the kept samples. The result's
/// objective and gap are re-evaluated on the full problem; its epoch count
/// includes `k` epoch-equivalents for building and applying the region.
pub fn solve_screened(
    prob: &ErmProblem,
    region: &Region,
    x0: &[f64],
    opts: &SolverOptions,
) -> Result<(SolveResult, ScreeningReport)> {
    let report = screen(prob, region)?;
    let full = prob.unrestricted();
    let sub = full.without(&report.screened)?;
    let mut res = solve(&sub, x0, opts)?;
    res.epochs += region.steps() as f64;
    res.primal = full.primal(&res.x)?;
    res.gap = full.duality_gap(&res.x)?;
    Ok((res, report))
}

/// `points` values descending from `lambda_max`, `per_decade` per decade.
pub fn log_grid(lambda_max: f64, points: usize, per_decade: usize) -> Vec<f64> {
    (0..points)
        .map(|i| lambda_max * 10f64.powf(-(i as f64) / per_decade as f64))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathOptions {
    pub screening: bool,
    /// Ellipsoid steps per grid point.
    pub steps: usize,
    pub solver: SolverOptions,
}

impl Default for PathOptions {
    fn default() -> Self {
        PathOptions {
            screening: true,
            steps: 20,
            solver: SolverOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathPoint {
    pub lambda: f64,
    pub result: SolveResult,
    pub screened: usize,
    pub screened_fraction: f64,
    pub cumulative_epochs: f64,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathResult {
    pub screening: bool,
    pub points: Vec<PathPoint>,
}

impl PathResult {
    pub fn total_epochs(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.cumulative_epochs)
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.lambda).collect()
    }
}

/// Warm-started path over a strictly decreasing grid. With screening, each
/// point builds a region around the previous solution, starting from
/// [`safe_initial_ball`], and solves on the kept samples.
pub fn regularization_path(
    template: &ErmProblem,
    lambdas: &[f64],
    opts: &PathOptions,
) -> Result<PathResult> {
    if lambdas.is_empty() {
        return Err(invalid("lambdas", "empty grid"));
    }
    if lambdas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(invalid("lambdas", "grid must be strictly decreasing"));
    }
    let mut x = vec![0.0; template.p()];
    let mut cumulative = 0.0;
    let mut points = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let prob = template.unrestricted().with_lambda(lambda)?;
        let outcome = if opts.screening {
            screened_point(&prob, &x, opts)
        } else {
            solve(&prob, &x, &opts.solver).map(|r| (r, 0))
        };
        match outcome {
            Ok((result, screened)) => {
                cumulative += result.epochs;
                x = result.x.clone();
                points.push(PathPoint {
                    lambda,
                    screened,
                    screened_fraction: screened as f64 / prob.n() as f64,
                    cumulative_epochs: cumulative,
                    result,
                    error: None,
                });
            }
            Err(e) => points.push(PathPoint {
                lambda,
                result: SolveResult {
                    x: x.clone(),
                    primal: f64::NAN,
                    gap: f64::NAN,
                    iterations: 0,
                    epochs: 0.0,
                    converged: false,
                },
                screened: 0,
                screened_fraction: 0.0,
                cumulative_epochs: cumulative,
                error: Some(e.to_string()),
            }),
        }
    }
    Ok(PathResult {
        screening: opts.screening,
        points,
    })
}

fn screened_point(prob: &ErmProblem, x0: &[f64], opts: &PathOptions) -> Result<(SolveResult, usize)> {
    let ball = safe_initial_ball(prob, x0)?;
    let region = ellipsoid_from_ball(prob, &ball, opts.steps)?;
    let (mut res, report) = solve_screened(prob, &region, x0, &opts.solver)?;
    // one pass sized the ball; each ellipsoid step and the final cut took a
    // subgradient, i.e. another pass
    res.epochs += 1.0;
    if !ball.is_point() {
        res.epochs += (region.steps() + 1) as f64;
    }
    Ok((res, report.screened_count()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Dataset;
    use crate::losses::{LossKind, Penalty, SafeLoss, Task};
    use approx::assert_abs_diff_eq;

    #[test]
    fn ridge_matches_normal_equations() {
        let a = [[1.0, 2.0], [3.0, -1.0]];
        let b = [1.0, -0.5];
        let lambda = 0.1;
        let ds = Dataset::from_dense(a.iter().map(|r| r.to_vec()).collect(), b.to_vec(), Task::Regression).unwrap();
        let prob = ErmProblem::new(
            ds,
            SafeLoss::new(LossKind::PlainSquare, 0.0).unwrap(),
            Penalty::l2(lambda).unwrap(),
        )
        .unwrap();
        let res = solve(&prob, &[0.0, 0.0], &SolverOptions::new(1e-14, 1e5)).unwrap();
        assert!(res.converged);
        // (AᵀA/n + λI) x = Aᵀb/n with n = 2
        let m = [
            [(1.0 + 9.0) / 2.0 + lambda, (2.0 - 3.0) / 2.0],
            [(2.0 - 3.0) / 2.0, (4.0 + 1.0) / 2.0 + lambda],
        ];
        let r = [(1.0 * 1.0 + 3.0 * -0.5) / 2.0, (2.0 * 1.0 - 1.0 * -0.5) / 2.0];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let x = [
            (r[0] * m[1][1] - m[0][1] * r[1]) / det,
            (m[0][0] * r[1] - m[1][0] * r[0]) / det,
        ];
        assert_abs_diff_eq!(res.x[0], x[0], epsilon = 1e-8);
        assert_abs_diff_eq!(res.x[1], x[1], epsilon = 1e-8);
    }

    #[test]
    fn large_l1_gives_zero() {
        let ds = Dataset::from_dense(vec![vec![1.0, 0.5], vec![-0.3, 1.0]], vec![1.0, 2.0], Task::Regression).unwrap();
        let prob = ErmProblem::new(
            ds,
            SafeLoss::new(LossKind::SquareDistance, 0.1).unwrap(),
            Penalty::l1(100.0).unwrap(),
        )
        .unwrap();
        let res = solve(&prob, &[1.0, 1.0], &SolverOptions::new(1e-12, 1e4)).unwrap();
        assert_eq!(res.x, vec![0.0, 0.0]);
        assert!(res.converged);
    }

    #[test]
    fn rejects_bad_options() {
        let ds = Dataset::from_dense(vec![vec![1.0, 0.5]], vec![1.0], Task::Regression).unwrap();
        let prob = ErmProblem::new(
            ds,
            SafeLoss::new(LossKind::PlainSquare, 0.0).unwrap(),
            Penalty::l2(1.0).unwrap(),
        )
        .unwrap();
        assert!(solve(&prob, &[0.0, 0.0], &SolverOptions::new(0.0, 10.0)).is_err());
        assert!(solve(&prob, &[0.0], &SolverOptions::default()).is_err());
    }

    #[test]
    fn grid_is_logarithmic() {
        let g = log_grid(1.0, 11, 10);
        assert_eq!(g.len(), 11);
        assert_abs_diff_eq!(g[10], 0.1, epsilon = 1e-15);
        assert!(g.windows(2).all(|w| w[1] < w[0]));
    }
}
