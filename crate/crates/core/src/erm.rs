//! Regularized empirical risk minimization
//!
//! ```text
//! P(x) = (1/n) Σᵢ φ(tᵢ(x)) + λ R(x)
//! D(ν) = (1/n) Σᵢ −fᵢ*(νᵢ) − λ R*(−Aᵀν / (λ n))
//! ```
//!
//! with `tᵢ = aᵢᵀx − bᵢ` (regression) or `tᵢ = bᵢ aᵢᵀx` (classification) and
//! `fᵢ(u) = φ(u − bᵢ)` or `φ(bᵢ u)`. The dual candidate at `x` is
//! `νᵢ = fᵢ′(aᵢᵀx)`, so `x* = −Aᵀν*/(λn)` under `R = ½‖·‖²`.
//!
//! A problem can be restricted to a subset of its samples. The restriction
//! keeps the `1/n` normalization of the full dataset, so removing samples whose
//! loss is flat around the optimum leaves the optimum unchanged.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{invalid, Error, Result};
use crate::losses::{Penalty, SafeLoss, Task};

/// Dual variables, one per sample of the full dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualPoint {
    pub nu: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct ErmProblem {
    data: Arc<Dataset>,
    loss: SafeLoss,
    penalty: Penalty,
    active: Option<Arc<Vec<usize>>>,
}

/// Everything one pass over the active samples yields at a point.
#[derive(Clone, Debug)]
pub(crate) struct Pass {
    /// `(1/n) Σ φ(tᵢ)` over active samples.
    pub loss_mean: f64,
    /// Gradient of the loss part, `(1/n) Σ νᵢ aᵢ`.
    pub grad: Vec<f64>,
    /// `(index, νᵢ)` for active samples.
    pub nu: Vec<(usize, f64)>,
}

impl ErmProblem {
    pub fn new(data: impl Into<Arc<Dataset>>, loss: SafeLoss, penalty: Penalty) -> Result<Self> {
        let data = data.into();
        if loss.task() != data.task() {
            return Err(Error::TaskMismatch {
                loss: loss.id(),
                loss_task: loss.task().as_str(),
                data_task: data.task().as_str(),
            });
        }
        Ok(ErmProblem {
            data,
            loss,
            penalty,
            active: None,
        })
    }

    pub fn dataset(&self) -> &Dataset {
        &self.data
    }

    pub fn dataset_arc(&self) -> Arc<Dataset> {
        Arc::clone(&self.data)
    }

    pub fn loss(&self) -> &SafeLoss {
        &self.loss
    }

    pub fn penalty(&self) -> &Penalty {
        &self.penalty
    }

    pub fn lambda(&self) -> f64 {
        self.penalty.lambda()
    }

    pub fn task(&self) -> Task {
        self.data.task()
    }

    /// Strong convexity modulus of `P` (from the penalty only).
    pub fn kappa(&self) -> f64 {
        self.penalty.strong_convexity()
    }

    pub fn n(&self) -> usize {
        self.data.n()
    }

    pub fn p(&self) -> usize {
        self.data.p()
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Ok(ErmProblem {
            penalty: self.penalty.with_lambda(lambda)?,
            ..self.clone()
        })
    }

    /// The same problem restricted to `indices` (still normalized by the full
    /// sample count). Indices must be distinct and in range.
    pub fn restricted_to(&self, mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        if indices.last().is_some_and(|&i| i >= self.n()) {
            return Err(invalid("indices", "sample index out of range"));
        }
        Ok(ErmProblem {
            active: Some(Arc::new(indices)),
            ..self.clone()
        })
    }

    /// Restriction to the samples whose `mask` entry is false.
    pub fn without(&self, mask: &[bool]) -> Result<Self> {
        if mask.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: mask.len(),
            });
        }
        self.restricted_to((0..self.n()).filter(|&i| !mask[i]).collect())
    }

    /// The full-dataset version of a restricted problem.
    pub fn unrestricted(&self) -> Self {
        ErmProblem {
            active: None,
            ..self.clone()
        }
    }

    pub fn active_count(&self) -> usize {
        self.active.as_ref().map_or(self.n(), |a| a.len())
    }

    pub fn active_indices(&self) -> Box<dyn Iterator<Item = usize> + '_> {
        match &self.active {
            Some(a) => Box::new(a.iter().copied()),
            None => Box::new(0..self.n()),
        }
    }

    pub fn is_restricted(&self) -> bool {
        self.active.is_some()
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.p() {
            return Err(Error::DimensionMismatch {
                expected: self.p(),
                got: x.len(),
            });
        }
        Ok(())
    }

    #[inline]
    pub(crate) fn margin_of(&self, i: usize, x: &[f64]) -> f64 {
        let u = self.data.row(i).dot(x);
        match self.task() {
            Task::Regression => u - self.data.label(i),
            Task::Classification => self.data.label(i) * u,
        }
    }

    /// Converts `φ′(tᵢ)` into `fᵢ′(aᵢᵀx)`.
    #[inline]
    fn nu_of(&self, i: usize, dphi: f64) -> f64 {
        match self.task() {
            Task::Regression => dphi,
            Task::Classification => self.data.label(i) * dphi,
        }
    }

    /// `fᵢ*(ν)`.
    #[inline]
    pub(crate) fn sample_conjugate(&self, i: usize, nu: f64) -> f64 {
        let b = self.data.label(i);
        match self.task() {
            Task::Regression => self.loss.conjugate(nu) + nu * b,
            Task::Classification => self.loss.conjugate(b * nu),
        }
    }

    /// Margins of every sample of the dataset (restriction ignored).
    pub fn margins(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        Ok((0..self.n()).map(|i| self.margin_of(i, x)).collect())
    }

    pub(crate) fn pass(&self, x: &[f64]) -> Pass {
        let n = self.n() as f64;
        let mut loss_sum = 0.0;
        let mut grad = vec![0.0; self.p()];
        let mut nu = Vec::with_capacity(self.active_count());
        for i in self.active_indices() {
            let t = self.margin_of(i, x);
            loss_sum += self.loss.value(t);
            let v = self.nu_of(i, self.loss.derivative(t));
            if v != 0.0 {
                self.data.row(i).axpy(v / n, &mut grad);
            }
            nu.push((i, v));
        }
        Pass {
            loss_mean: loss_sum / n,
            grad,
            nu,
        }
    }

    pub(crate) fn loss_mean(&self, x: &[f64]) -> f64 {
        let s: f64 = self
            .active_indices()
            .map(|i| self.loss.value(self.margin_of(i, x)))
            .sum();
        s / self.n() as f64
    }

    pub fn primal(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.loss_mean(x) + self.lambda() * self.penalty.value(x))
    }

    /// A subgradient of `P` at `x`; the gradient wherever the loss is smooth.
    pub fn subgradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        let mut g = self.pass(x).grad;
        self.penalty.add_subgradient(x, &mut g);
        Ok(g)
    }

    /// `D(ν)`; `−∞` when `ν` is outside the dual domain.
    pub fn dual_value(&self, nu: &DualPoint) -> Result<f64> {
        if nu.nu.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: nu.nu.len(),
            });
        }
        let n = self.n() as f64;
        let mut conj = 0.0;
        let mut at_nu = vec![0.0; self.p()];
        for i in self.active_indices() {
            let v = nu.nu[i];
            conj += self.sample_conjugate(i, v);
            if v != 0.0 {
                self.data.row(i).axpy(v, &mut at_nu);
            }
        }
        if nu
            .nu
            .iter()
            .enumerate()
            .any(|(i, &v)| v != 0.0 && !self.is_active(i))
        {
            return Err(invalid("nu", "nonzero dual variable on an inactive sample"));
        }
        at_nu.iter_mut().for_each(|v| *v /= n);
        Ok(self.dual_from_parts(conj / n, &at_nu))
    }

    fn is_active(&self, i: usize) -> bool {
        match &self.active {
            Some(a) => a.binary_search(&i).is_ok(),
            None => true,
        }
    }

    /// `−mean_conj − λ R*(−Aᵀν/(λn))` given `Aᵀν` already scaled by `1/n`.
    fn dual_from_parts(&self, mean_conj: f64, at_nu_over_n: &[f64]) -> f64 {
        let lambda = self.lambda();
        if mean_conj == f64::INFINITY {
            return f64::NEG_INFINITY;
        }
        let reg = if lambda > 0.0 {
            let y: Vec<f64> = at_nu_over_n.iter().map(|v| -v / lambda).collect();
            lambda * self.penalty.conjugate(&y)
        } else if at_nu_over_n.iter().all(|&v| v == 0.0) {
            0.0
        } else {
            f64::INFINITY
        };
        -mean_conj - reg
    }

    /// `νᵢ = fᵢ′(aᵢᵀx)`, rescaled toward zero when the L1 dual constraint
    /// `‖Aᵀν/(λn)‖∞ ≤ 1` would be violated. Inactive samples get `νᵢ = 0`.
    pub fn dual_candidate(&self, x: &[f64]) -> Result<DualPoint> {
        self.check_dim(x)?;
        let pass = self.pass(x);
        let scale = self.feasibility_scale(&pass.grad);
        let mut nu = vec![0.0; self.n()];
        for (i, v) in pass.nu {
            nu[i] = scale * v;
        }
        Ok(DualPoint { nu })
    }

    fn feasibility_scale(&self, grad: &[f64]) -> f64 {
        match self.penalty.kind() {
            crate::losses::PenaltyKind::L1 => {
                let lambda = self.lambda();
                let m = grad.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                // keep clear of the ℓ∞ boundary so that rounding in a
                // recomputed Aᵀν cannot push the point outside
                let limit = lambda * (1.0 - 1e-12);
                if lambda > 0.0 && m > limit {
                    limit / m
                } else {
                    1.0
                }
            }
            crate::losses::PenaltyKind::HalfSquaredL2 => 1.0,
        }
    }

    pub(crate) fn gap_from_pass(&self, x: &[f64], pass: &Pass) -> f64 {
        let n = self.n() as f64;
        let primal = pass.loss_mean + self.lambda() * self.penalty.value(x);
        let scale = self.feasibility_scale(&pass.grad);
        let conj: f64 = pass
            .nu
            .iter()
            .map(|&(i, v)| self.sample_conjugate(i, scale * v))
            .sum();
        let scaled: Vec<f64> = pass.grad.iter().map(|g| scale * g).collect();
        let dual = self.dual_from_parts(conj / n, &scaled);
        clamp_gap(primal - dual, primal)
    }

    /// `P(x) − D(ν(x))`; `+∞` when the candidate is dual-infeasible.
    pub fn duality_gap(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        let pass = self.pass(x);
        Ok(self.gap_from_pass(x, &pass))
    }
}

pub(crate) fn clamp_gap(gap: f64, primal: f64) -> f64 {
    if gap.is_nan() {
        return f64::INFINITY;
    }
    // rounding can push a zero gap slightly negative
    debug_assert!(gap >= -1e-9 * (1.0 + primal.abs()), "negative duality gap {gap}");
    gap.max(0.0)
}
