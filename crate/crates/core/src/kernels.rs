//! Kernelized problems
//!
//! ```text
//! min_α (1/n) Σᵢ φ(tᵢ(Kα)) + λ αᵀKα
//! ```
//!
//! The model lives in `α ∈ ℝⁿ` and every linear form uses a Gram row, so
//! screening is the linear rule with `aᵢ` replaced by `[K]ᵢ`. The dual is
//! `D(ν) = (1/n) Σ −fᵢ*(νᵢ) − νᵀKν / (4λn²)`, attained at `α = −ν/(2λn)`.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::audit::{containment_check, margin_check, nothing_screened, refit_check, AuditReport};
use crate::data::{Dataset, Row};
use crate::erm::ErmProblem;
use crate::error::{invalid, Error, Result};
use crate::flops;
use crate::losses::{Penalty, SafeLoss};
use crate::region::{Region, SubgradientOracle};
use crate::screening::{flat_interval_of, screen, ScreeningReport};
use crate::solver::{solve, CompositeObjective, SolverOptions};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Kernel {
    Linear,
    /// `exp(−γ‖a − a′‖²)`
    Rbf { gamma: f64 },
    /// `(aᵀa′ + coef)^degree`
    Polynomial { degree: u32, coef: f64 },
}

impl Kernel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Kernel::Rbf { gamma } if !(gamma > 0.0 && gamma.is_finite()) => {
                Err(invalid("gamma", "rbf kernel needs gamma > 0"))
            }
            Kernel::Polynomial { coef, .. } if !(coef >= 0.0) => {
                Err(invalid("coef", "polynomial kernel needs coef >= 0"))
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            Kernel::Linear => dot(a, b),
            Kernel::Rbf { gamma } => {
                let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                (-gamma * d2).exp()
            }
            Kernel::Polynomial { degree, coef } => (dot(a, b) + coef).powi(degree as i32),
        }
    }

    fn params(&self) -> String {
        match *self {
            Kernel::Linear => "linear".to_string(),
            Kernel::Rbf { gamma } => format!("rbf:{:016x}", gamma.to_bits()),
            Kernel::Polynomial { degree, coef } => format!("poly:{degree}:{:016x}", coef.to_bits()),
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `K` as row vectors.
pub fn gram_matrix(ds: &Dataset, kernel: Kernel) -> Result<Vec<Vec<f64>>> {
    kernel.validate()?;
    let rows = ds.to_dense_rows();
    let n = rows.len();
    let mut k = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = kernel.eval(&rows[i], &rows[j]);
            k[i][j] = v;
            k[j][i] = v;
        }
    }
    Ok(k)
}

/// Hex SHA-256 of the dataset contents (labels, dimension, dense values).
pub fn dataset_hash(ds: &Dataset) -> String {
    let mut h = Sha256::new();
    h.update((ds.n() as u64).to_le_bytes());
    h.update((ds.p() as u64).to_le_bytes());
    h.update(ds.task().as_str().as_bytes());
    for (row, b) in ds.to_dense_rows().iter().zip(ds.labels()) {
        h.update(b.to_le_bytes());
        for v in row {
            h.update(v.to_le_bytes());
        }
    }
    format!("{:x}", h.finalize())
}

const CACHE_MAGIC: &[u8; 8] = b"SSGRAM01";

/// Path of the cached Gram matrix for `(ds, kernel)` under `dir`.
pub fn gram_cache_path(dir: &Path, ds: &Dataset, kernel: Kernel) -> PathBuf {
    let mut h = Sha256::new();
    h.update(dataset_hash(ds).as_bytes());
    h.update(kernel.params().as_bytes());
    dir.join(format!("gram-{:x}.bin", h.finalize()))
}

/// Gram matrix, read from `dir` when cached and written there otherwise.
/// The file holds a magic tag, `n` as u64 and `n²` little-endian f64 values.
pub fn gram_matrix_cached(ds: &Dataset, kernel: Kernel, dir: &Path) -> Result<Vec<Vec<f64>>> {
    let path = gram_cache_path(dir, ds, kernel);
    if let Ok(bytes) = fs::read(&path) {
        if let Some(k) = decode_gram(&bytes, ds.n()) {
            return Ok(k);
        }
    }
    let k = gram_matrix(ds, kernel)?;
    fs::create_dir_all(dir)?;
    let mut bytes = Vec::with_capacity(16 + 8 * ds.n() * ds.n());
    bytes.extend_from_slice(CACHE_MAGIC);
    bytes.extend_from_slice(&(ds.n() as u64).to_le_bytes());
    for row in &k {
        for v in row {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
    }
    let tmp = path.with_extension("tmp");
    fs::File::create(&tmp)?.write_all(&bytes)?;
    fs::rename(&tmp, &path)?;
    Ok(k)
}

fn decode_gram(bytes: &[u8], n: usize) -> Option<Vec<Vec<f64>>> {
    if bytes.len() != 16 + 8 * n * n || &bytes[..8] != CACHE_MAGIC {
        return None;
    }
    if u64::from_le_bytes(bytes[8..16].try_into().ok()?) != n as u64 {
        return None;
    }
    let vals: Vec<f64> = bytes[16..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Some(vals.chunks(n).map(|c| c.to_vec()).collect())
}

/// Smallest eigenvalue estimate of a symmetric matrix: shifted power
/// iteration on `cI − K` with `c` a Gershgorin bound.
pub fn min_rayleigh_quotient(k: &[Vec<f64>], seed: u64) -> f64 {
    let n = k.len();
    let c = k
        .iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0f64, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut best = f64::INFINITY;
    for _ in 0..200 {
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm == 0.0 {
            break;
        }
        v.iter_mut().for_each(|a| *a /= norm);
        let kv: Vec<f64> = k.iter().map(|r| dot(r, &v)).collect();
        best = best.min(dot(&v, &kv));
        v = v.iter().zip(&kv).map(|(a, b)| c * a - b).collect();
    }
    best
}

#[derive(Clone, Debug)]
pub struct GramProblem {
    /// Loss part with the Gram rows as design.
    rows: ErmProblem,
    lambda: f64,
}

impl GramProblem {
    /// Checks symmetry (1e−10), a nonnegative diagonal and positive
    /// semidefiniteness (smallest Rayleigh quotient ≥ −1e−8 relative to the
    /// largest diagonal entry).
    pub fn new(gram: Vec<Vec<f64>>, labels: Vec<f64>, task: crate::losses::Task, loss: SafeLoss, lambda: f64) -> Result<Self> {
        let n = gram.len();
        if gram.iter().any(|r| r.len() != n) {
            return Err(invalid("gram", "matrix must be square"));
        }
        for i in 0..n {
            if gram[i][i] < 0.0 {
                return Err(invalid("gram", "negative diagonal entry"));
            }
            for j in 0..i {
                if (gram[i][j] - gram[j][i]).abs() > 1e-10 * (1.0 + gram[i][j].abs()) {
                    return Err(invalid("gram", "matrix is not symmetric"));
                }
            }
        }
        let scale = gram.iter().enumerate().map(|(i, r)| r[i]).fold(1.0f64, f64::max);
        let rq = min_rayleigh_quotient(&gram, 0);
        if rq < -1e-8 * scale {
            return Err(Error::NotPsd(rq));
        }
        let ds = Dataset::new(gram.into_iter().map(Row::Dense).collect(), labels, n, task)?;
        let rows = ErmProblem::new(ds, loss, Penalty::l2(lambda)?)?;
        Ok(GramProblem { rows, lambda })
    }

    pub fn from_dataset(ds: &Dataset, kernel: Kernel, loss: SafeLoss, lambda: f64) -> Result<Self> {
        GramProblem::new(gram_matrix(ds, kernel)?, ds.labels().to_vec(), ds.task(), loss, lambda)
    }

    pub fn n(&self) -> usize {
        self.rows.n()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn loss(&self) -> &SafeLoss {
        self.rows.loss()
    }

    /// The loss part as a linear problem on the Gram rows.
    pub fn rows(&self) -> &ErmProblem {
        &self.rows
    }

    pub fn gram_row(&self, i: usize) -> &Row {
        self.rows.dataset().row(i)
    }

    /// Restriction of the loss sum to the samples whose `mask` entry is false.
    pub fn without(&self, mask: &[bool]) -> Result<Self> {
        Ok(GramProblem {
            rows: self.rows.without(mask)?,
            lambda: self.lambda,
        })
    }

    pub fn unrestricted(&self) -> Self {
        GramProblem {
            rows: self.rows.unrestricted(),
            lambda: self.lambda,
        }
    }

    fn check_dim(&self, alpha: &[f64]) -> Result<()> {
        if alpha.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: alpha.len(),
            });
        }
        Ok(())
    }

    fn k_times(&self, alpha: &[f64]) -> Vec<f64> {
        self.rows.dataset().matvec(alpha)
    }

    pub fn margins(&self, alpha: &[f64]) -> Result<Vec<f64>> {
        self.rows.margins(alpha)
    }

    pub fn primal(&self, alpha: &[f64]) -> Result<f64> {
        self.check_dim(alpha)?;
        Ok(self.smooth_value(alpha))
    }

    pub fn duality_gap(&self, alpha: &[f64]) -> Result<f64> {
        self.check_dim(alpha)?;
        Ok(CompositeObjective::gap(self, alpha).unwrap_or(f64::INFINITY))
    }

    fn grad(&self, alpha: &[f64]) -> (f64, Vec<f64>) {
        let pass = self.rows.pass(alpha);
        let ka = self.k_times(alpha);
        let two_lambda = 2.0 * self.lambda;
        let mut g = pass.grad;
        flops::add(g.len());
        for (gi, kai) in g.iter_mut().zip(&ka) {
            *gi += two_lambda * kai;
        }
        (pass.loss_mean + self.lambda * dot(alpha, &ka), g)
    }
}

impl CompositeObjective for GramProblem {
    fn dim(&self) -> usize {
        self.n()
    }

    fn smooth_value_grad(&self, x: &[f64]) -> (f64, Vec<f64>) {
        self.grad(x)
    }

    fn smooth_value(&self, x: &[f64]) -> f64 {
        let ka = self.k_times(x);
        self.rows.loss_mean(x) + self.lambda * dot(x, &ka)
    }

    fn nonsmooth_value(&self, _x: &[f64]) -> f64 {
        0.0
    }

    fn prox(&self, x: &[f64], _step: f64) -> Vec<f64> {
        x.to_vec()
    }

    fn gap(&self, x: &[f64]) -> Option<f64> {
        let pass = self.rows.pass(x);
        let n = self.n() as f64;
        let primal = pass.loss_mean + self.lambda * dot(x, &self.k_times(x));
        let conj: f64 = pass.nu.iter().map(|&(i, v)| self.rows.sample_conjugate(i, v)).sum();
        if conj == f64::INFINITY {
            return Some(f64::INFINITY);
        }
        let nz: Vec<(usize, f64)> = pass.nu.into_iter().filter(|e| e.1 != 0.0).collect();
        let mut quad = 0.0;
        for &(i, vi) in &nz {
            let Row::Dense(ki) = self.gram_row(i) else { unreachable!() };
            quad += vi * nz.iter().map(|&(j, vj)| ki[j] * vj).sum::<f64>();
        }
        let dual = -conj / n - quad / (4.0 * self.lambda * n * n);
        Some(crate::erm::clamp_gap(primal - dual, primal))
    }

    fn subgradient(&self, x: &[f64]) -> Vec<f64> {
        self.grad(x).1
    }

    fn is_smooth(&self) -> bool {
        self.loss().is_smooth()
    }
}

impl SubgradientOracle for GramProblem {
    fn dim(&self) -> usize {
        self.n()
    }

    fn subgradient_at(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        Ok(self.grad(x).1)
    }
}

/// The regression or classification rule with Gram rows as linear forms.
pub fn screen_kernel(prob: &GramProblem, region: &Region) -> Result<ScreeningReport> {
    screen(&prob.rows, region)
}

/// Kernel counterpart of [`crate::audit::audit_safety`].
pub fn audit_kernel(
    prob: &GramProblem,
    screened: &[bool],
    alpha_full: &[f64],
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
    let contains_solution = containment_check(region, alpha_full)?;
    let margins_inside = margin_check(interval, &full.margins(alpha_full)?, screened);
    let refit_matches = if screened.iter().any(|&s| s) {
        let res = solve(&full.without(screened)?, &vec![0.0; full.n()], solver)?;
        refit_check(full.primal(&res.x)?, full.primal(alpha_full)?, solver.tol)
    } else {
        nothing_screened()
    };
    Ok(AuditReport {
        contains_solution,
        margins_inside,
        refit_matches,
    })
}
