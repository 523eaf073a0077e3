//! Dataset compression: delete samples in order of a ranking, refit on the
//! rest, and track the held-out metric.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::erm::ErmProblem;
use crate::error::{invalid, Result};
use crate::losses::Task;
use crate::report::fmt_f64;
use crate::screening::{flat_interval_of, safe_initial_ball, screen_ellipsoid, ScreeningReport};
use crate::solver::{solve, SolverOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Highest screening score first.
    Screening,
    /// Deepest margin inside the flat interval at an early iterate first.
    Margin,
    Random,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Screening, Method::Margin, Method::Random];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Screening => "screening",
            Method::Margin => "margin",
            Method::Random => "random",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Accuracy,
    R2,
}

impl Metric {
    pub fn for_task(task: Task) -> Metric {
        match task {
            Task::Regression => Metric::R2,
            Task::Classification => Metric::Accuracy,
        }
    }
}

/// Indices by descending score, ties broken by index.
pub fn rank_by_scores(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&i, &j| scores[j].total_cmp(&scores[i]).then(i.cmp(&j)));
    order
}

/// Most screenable samples first.
pub fn rank_samples(report: &ScreeningReport) -> Vec<usize> {
    rank_by_scores(&report.scores)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompressionConfig {
    pub fractions: Vec<f64>,
    pub methods: Vec<Method>,
    pub seeds: Vec<u64>,
    pub train_fraction: f64,
    /// Ellipsoid steps for the screening scores. `None` means 20 for strongly
    /// convex objectives (the gap ball at the fit is already tight) and
    /// `100·p` otherwise.
    pub steps: Option<usize>,
    /// Solver epochs for the early iterate behind the margin baseline.
    pub early_epochs: f64,
    pub solver: SolverOptions,
}

impl Default for CompressionConfig {
    fn default() -> Self {
        CompressionConfig {
            fractions: (0..=9).map(|i| i as f64 / 10.0).collect(),
            methods: Method::ALL.to_vec(),
            seeds: (0..5).collect(),
            train_fraction: 0.8,
            steps: None,
            early_epochs: 2.0,
            solver: SolverOptions::new(1e-8, 5_000.0),
        }
    }
}

impl CompressionConfig {
    fn validate(&self) -> Result<()> {
        if self.fractions.is_empty() {
            return Err(invalid("fractions", "empty"));
        }
        if self.fractions.iter().any(|f| !(0.0..=0.95).contains(f)) {
            return Err(invalid("fractions", "must lie in [0, 0.95]"));
        }
        if self.fractions.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("fractions", "must be strictly increasing"));
        }
        if self.seeds.len() < 3 {
            return Err(invalid("seeds", "need at least 3 seeds"));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(invalid("train_fraction", "must lie in (0, 1)"));
        }
        if self.methods.is_empty() {
            return Err(invalid("methods", "empty"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub fraction: f64,
    pub method: Method,
    pub mean: f64,
    pub std: f64,
    pub n_train: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompressionCurve {
    pub metric: Metric,
    pub points: Vec<CurvePoint>,
    pub warnings: Vec<String>,
}

impl CompressionCurve {
    pub fn point(&self, fraction: f64, method: Method) -> Option<&CurvePoint> {
        self.points
            .iter()
            .find(|p| p.method == method && p.fraction == fraction)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("fraction,method,mean,std,n_train\n");
        for p in &self.points {
            writeln!(
                out,
                "{},{},{},{},{}",
                fmt_f64(p.fraction),
                p.method.as_str(),
                fmt_f64(p.mean),
                fmt_f64(p.std),
                p.n_train
            )
            .unwrap();
        }
        out
    }
}

/// `Accuracy` counts `sign(aᵀx) = b` with `sign(0) = +1`; `R2` is
/// `1 − SS_res/SS_tot` (and `−∞` for a constant target fit imperfectly).
pub fn evaluate(prob: &ErmProblem, x: &[f64], indices: &[usize], metric: Metric) -> f64 {
    let ds = prob.dataset();
    let pred: Vec<f64> = indices.iter().map(|&i| ds.row(i).dot(x)).collect();
    let truth: Vec<f64> = indices.iter().map(|&i| ds.label(i)).collect();
    match metric {
        Metric::Accuracy => {
            let hits = pred
                .iter()
                .zip(&truth)
                .filter(|(p, b)| (if **p >= 0.0 { 1.0 } else { -1.0 }) == **b)
                .count();
            hits as f64 / indices.len() as f64
        }
        Metric::R2 => {
            let mean = truth.iter().sum::<f64>() / truth.len() as f64;
            let ss_tot: f64 = truth.iter().map(|b| (b - mean) * (b - mean)).sum();
            let ss_res: f64 = pred.iter().zip(&truth).map(|(p, b)| (p - b) * (p - b)).sum();
            if ss_tot > 0.0 {
                1.0 - ss_res / ss_tot
            } else if ss_res == 0.0 {
                1.0
            } else {
                f64::NEG_INFINITY
            }
        }
    }
}

/// Orders of deletion for one train split. Screening scores come from a
/// region around the fitted model; margins from an early iterate.
fn rankings(train: &ErmProblem, cfg: &CompressionConfig, seed: u64) -> Result<Vec<(Method, Vec<usize>)>> {
    let active: Vec<usize> = train.active_indices().collect();
    let zero = vec![0.0; train.p()];
    let mut out = Vec::new();
    for &m in &cfg.methods {
        let local_scores: Vec<f64> = match m {
            Method::Screening => {
                let fitted = solve(train, &zero, &cfg.solver)?;
                let ball = safe_initial_ball(train, &fitted.x)?;
                let (report, _) = screen_ellipsoid(train, &ball, cfg.steps.unwrap_or_else(|| default_steps(train)))?;
                active.iter().map(|&i| report.scores[i]).collect()
            }
            Method::Margin => {
                let interval = flat_interval_of(train.loss())?;
                let early = solve(train, &zero, &SolverOptions::new(cfg.solver.tol, cfg.early_epochs))?;
                let margins = train.margins(&early.x)?;
                active.iter().map(|&i| interval.depth(margins[i])).collect()
            }
            Method::Random => {
                let mut order = active.clone();
                order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ 0x5eed));
                out.push((m, order));
                continue;
            }
        };
        let order = rank_by_scores(&local_scores).into_iter().map(|k| active[k]).collect();
        out.push((m, order));
    }
    Ok(out)
}

/// For each seed: split 80/20 (by default), rank the train samples, delete
/// each fraction in ranking order, refit and score on the held-out split.
/// Refits keep the train-set `1/n` normalization, so deleting provably
/// irrelevant samples leaves the model unchanged.
pub fn compression_curve(prob: &ErmProblem, cfg: &CompressionConfig) -> Result<CompressionCurve> {
    cfg.validate()?;
    let full = prob.unrestricted();
    let n = full.n();
    let n_train = ((n as f64) * cfg.train_fraction).round() as usize;
    if n_train == 0 || n_train == n {
        return Err(invalid("train_fraction", "split leaves an empty side"));
    }
    let metric = Metric::for_task(full.task());
    let mut warnings = Vec::new();
    let kept_fractions: Vec<f64> = cfg
        .fractions
        .iter()
        .copied()
        .filter(|&f| {
            let left = n_train - deletions(n_train, f);
            let ok = 2 * left >= full.p();
            if !ok {
                warnings.push(format!("fraction {f} leaves {left} samples (< p/2); skipped"));
            }
            ok
        })
        .collect();

    // values[method][fraction] over seeds
    let mut values = vec![vec![Vec::new(); kept_fractions.len()]; cfg.methods.len()];
    for &seed in &cfg.seeds {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let (train_idx, test_idx) = perm.split_at(n_train);
        let train = ErmProblem::new(full.dataset().subset(train_idx)?, *full.loss(), *full.penalty())?;
        let test = full.dataset().subset(test_idx)?;
        let test_prob = ErmProblem::new(test, *full.loss(), *full.penalty())?;
        let test_all: Vec<usize> = (0..test_prob.n()).collect();
        for (mi, (_, order)) in rankings(&train, cfg, seed)?.into_iter().enumerate() {
            let mut warm = vec![0.0; train.p()];
            for (fi, &f) in kept_fractions.iter().enumerate() {
                let mut mask = vec![false; train.n()];
                for &i in &order[..deletions(n_train, f)] {
                    mask[i] = true;
                }
                let refit = solve(&train.without(&mask)?, &warm, &cfg.solver)?;
                values[mi][fi].push(evaluate(&test_prob, &refit.x, &test_all, metric));
                warm = refit.x;
            }
        }
    }

    let mut points = Vec::new();
    for (mi, &method) in cfg.methods.iter().enumerate() {
        for (fi, &f) in kept_fractions.iter().enumerate() {
            let (mean, std) = mean_std(&values[mi][fi]);
            points.push(CurvePoint {
                fraction: f,
                method,
                mean,
                std,
                n_train: n_train - deletions(n_train, f),
            });
        }
    }
    Ok(CompressionCurve {
        metric,
        points,
        warnings,
    })
}

fn default_steps(prob: &ErmProblem) -> usize {
    if prob.kappa() > 0.0 {
        20
    } else {
        100 * prob.p()
    }
}

fn deletions(n_train: usize, fraction: f64) -> usize {
    ((n_train as f64) * fraction).floor() as usize
}

/// Mean and sample standard deviation.
fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranking_is_descending_with_index_ties() {
        assert_eq!(rank_by_scores(&[3.0, 1.0, 2.0]), vec![0, 2, 1]);
        assert_eq!(rank_by_scores(&[0.5; 4]), vec![0, 1, 2, 3]);
        assert_eq!(rank_by_scores(&[1.0, 2.0, 1.0, 2.0]), vec![1, 3, 0, 2]);
    }

    #[test]
    fn mean_std_values() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert_eq!(s, 1.0);
    }
}
