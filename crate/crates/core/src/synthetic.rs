//! Seeded synthetic datasets.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::data::Dataset;
use crate::error::{invalid, Result};
use crate::losses::Task;

#[derive(Clone, Debug)]
pub struct Synthetic {
    pub data: Dataset,
    /// Ground-truth coefficients.
    pub truth: Vec<f64>,
}

/// `b = A x̄ + ε` with `A` uniform on `[−1, 1]`, `x̄` carrying `sparsity`
/// nonzero coefficients uniform on `[−1, 1]`, and `ε ~ N(0, σ²)`.
pub fn gen_synthetic_regression(n: usize, p: usize, sparsity: usize, sigma: f64, seed: u64) -> Result<Synthetic> {
    if sparsity > p {
        return Err(invalid("sparsity", format!("{sparsity} exceeds p = {p}")));
    }
    if !(sigma >= 0.0) {
        return Err(invalid("sigma", "must be nonnegative"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut truth = vec![0.0; p];
    for j in sample(&mut rng, p, sparsity) {
        truth[j] = rng.random_range(-1.0..=1.0);
    }
    let rows = uniform_rows(&mut rng, n, p);
    let noise = Normal::new(0.0, sigma).expect("sigma checked");
    let labels = rows
        .iter()
        .map(|a| dot(a, &truth) + if sigma > 0.0 { noise.sample(&mut rng) } else { 0.0 })
        .collect();
    Ok(Synthetic {
        data: Dataset::from_dense(rows, labels, Task::Regression)?,
        truth,
    })
}

/// Two Gaussian classes: balanced random labels `b`, rows
/// `a = b·separation·w̄ + N(0, I)` with `w̄` a random unit vector. The Bayes
/// accuracy is `Φ(separation)`.
pub fn gen_synthetic_classification(n: usize, p: usize, separation: f64, seed: u64) -> Result<Synthetic> {
    if p == 0 {
        return Err(invalid("p", "must be positive"));
    }
    if !(separation >= 0.0 && separation.is_finite()) {
        return Err(invalid("separation", "must be finite and nonnegative"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut truth: Vec<f64> = (0..p).map(|_| rng.sample(StandardNormal)).collect();
    let norm = dot(&truth, &truth).sqrt();
    truth.iter_mut().for_each(|w| *w /= norm);
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let b = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let row: Vec<f64> = truth
            .iter()
            .map(|w| b * separation * w + rng.sample::<f64, _>(StandardNormal))
            .collect();
        rows.push(row);
        labels.push(b);
    }
    Ok(Synthetic {
        data: Dataset::from_dense(rows, labels, Task::Classification)?,
        truth,
    })
}

/// Interval-regression toy: two uniform features, the response driven by the
/// first one only, plus Gaussian noise. Labels are the interval centers.
pub fn gen_interval_demo(n: usize, sigma: f64, seed: u64) -> Result<Synthetic> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let truth = vec![1.0, 0.0];
    let rows = uniform_rows(&mut rng, n, 2);
    let noise = Normal::new(0.0, sigma).map_err(|e| invalid("sigma", e.to_string()))?;
    let labels = rows.iter().map(|a| a[0] + noise.sample(&mut rng)).collect();
    Ok(Synthetic {
        data: Dataset::from_dense(rows, labels, Task::Regression)?,
        truth,
    })
}

fn uniform_rows(rng: &mut ChaCha8Rng, n: usize, p: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..p).map(|_| rng.random_range(-1.0..=1.0)).collect())
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_regression_is_exact() {
        let s = gen_synthetic_regression(100, 10, 3, 0.0, 7).unwrap();
        assert_eq!(s.data.n(), 100);
        assert_eq!(s.truth.iter().filter(|v| **v != 0.0).count(), 3);
        let fit = s.data.matvec(&s.truth);
        assert_eq!(fit, s.data.labels());
    }

    #[test]
    fn seeds_reproduce() {
        let a = gen_synthetic_regression(20, 4, 2, 0.01, 3).unwrap();
        let b = gen_synthetic_regression(20, 4, 2, 0.01, 3).unwrap();
        assert_eq!(a.data, b.data);
        let c = gen_synthetic_regression(20, 4, 2, 0.01, 4).unwrap();
        assert_ne!(a.data, c.data);
        let a = gen_synthetic_classification(30, 5, 0.1, 1).unwrap();
        assert_eq!(a.data, gen_synthetic_classification(30, 5, 0.1, 1).unwrap().data);
        assert!(a.data.labels().iter().all(|&b| b == 1.0 || b == -1.0));
    }

    #[test]
    fn rejects_excess_sparsity() {
        assert!(gen_synthetic_regression(10, 2, 3, 0.0, 0).is_err());
    }
}
