//! Design matrices with dense or sparse rows, and labels.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::flops;
use crate::losses::Task;

/// One sample's feature vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Row {
    Dense(Vec<f64>),
    /// Strictly increasing column indices with their values.
    Sparse { indices: Vec<usize>, values: Vec<f64> },
}

impl Row {
    pub fn dense(values: Vec<f64>) -> Self {
        Row::Dense(values)
    }

    /// Builds a sparse row, sorting the entries and dropping explicit zeros.
    pub fn sparse(mut entries: Vec<(usize, f64)>) -> Result<Self> {
        entries.sort_by_key(|e| e.0);
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(invalid("row", "duplicate column index"));
        }
        let (indices, values) = entries.into_iter().filter(|e| e.1 != 0.0).unzip();
        Ok(Row::Sparse { indices, values })
    }

    pub fn nnz(&self) -> usize {
        match self {
            Row::Dense(v) => v.len(),
            Row::Sparse { indices, .. } => indices.len(),
        }
    }

    /// Smallest dimension this row fits in.
    pub fn min_dim(&self) -> usize {
        match self {
            Row::Dense(v) => v.len(),
            Row::Sparse { indices, .. } => indices.last().map_or(0, |&j| j + 1),
        }
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        match self {
            Row::Dense(v) => flops::dot(v, x),
            Row::Sparse { indices, values } => {
                flops::add(indices.len());
                indices.iter().zip(values).map(|(&j, &v)| v * x[j]).sum()
            }
        }
    }

    /// `out += alpha · row`.
    pub fn axpy(&self, alpha: f64, out: &mut [f64]) {
        match self {
            Row::Dense(v) => flops::axpy(alpha, v, out),
            Row::Sparse { indices, values } => {
                flops::add(indices.len());
                for (&j, &v) in indices.iter().zip(values) {
                    out[j] += alpha * v;
                }
            }
        }
    }

    pub fn norm_sq(&self) -> f64 {
        match self {
            Row::Dense(v) => v.iter().map(|a| a * a).sum(),
            Row::Sparse { values, .. } => values.iter().map(|a| a * a).sum(),
        }
    }

    pub fn to_dense(&self, p: usize) -> Vec<f64> {
        match self {
            Row::Dense(v) => v.clone(),
            Row::Sparse { indices, values } => {
                let mut out = vec![0.0; p];
                for (&j, &v) in indices.iter().zip(values) {
                    out[j] = v;
                }
                out
            }
        }
    }

    /// Iterates over the stored `(column, value)` pairs.
    pub fn entries(&self) -> Box<dyn Iterator<Item = (usize, f64)> + '_> {
        match self {
            Row::Dense(v) => Box::new(v.iter().copied().enumerate()),
            Row::Sparse { indices, values } => {
                Box::new(indices.iter().copied().zip(values.iter().copied()))
            }
        }
    }

    /// `c · row` with the same storage.
    pub fn scaled(&self, c: f64) -> Row {
        match self {
            Row::Dense(v) => Row::Dense(v.iter().map(|a| c * a).collect()),
            Row::Sparse { indices, values } => Row::Sparse {
                indices: indices.clone(),
                values: values.iter().map(|a| c * a).collect(),
            },
        }
    }
}

/// `n` samples of dimension `p` with their labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    rows: Vec<Row>,
    labels: Vec<f64>,
    p: usize,
    task: Task,
}

impl Dataset {
    pub fn new(rows: Vec<Row>, labels: Vec<f64>, p: usize, task: Task) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if rows.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: rows.len(),
                got: labels.len(),
            });
        }
        for row in &rows {
            let ok = match row {
                Row::Dense(v) => v.len() == p,
                Row::Sparse { indices, values } => {
                    indices.len() == values.len()
                        && indices.windows(2).all(|w| w[0] < w[1])
                        && indices.last().is_none_or(|&j| j < p)
                }
            };
            if !ok {
                return Err(Error::DimensionMismatch {
                    expected: p,
                    got: row.min_dim(),
                });
            }
        }
        if labels.iter().any(|b| !b.is_finite()) {
            return Err(invalid("labels", "non-finite label"));
        }
        if task == Task::Classification && labels.iter().any(|&b| b != 1.0 && b != -1.0) {
            return Err(invalid("labels", "classification labels must be -1 or +1"));
        }
        Ok(Dataset {
            rows,
            labels,
            p,
            task,
        })
    }

    /// Dense constructor from row vectors.
    pub fn from_dense(matrix: Vec<Vec<f64>>, labels: Vec<f64>, task: Task) -> Result<Self> {
        let p = matrix.first().map_or(0, |r| r.len());
        Dataset::new(matrix.into_iter().map(Row::Dense).collect(), labels, p, task)
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn task(&self) -> Task {
        self.task
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &Row {
        &self.rows[i]
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> f64 {
        self.labels[i]
    }

    pub fn is_sparse(&self) -> bool {
        self.rows.iter().any(|r| matches!(r, Row::Sparse { .. }))
    }

    /// The samples at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<Dataset> {
        Dataset::new(
            indices.iter().map(|&i| self.rows[i].clone()).collect(),
            indices.iter().map(|&i| self.labels[i]).collect(),
            self.p,
            self.task,
        )
    }

    pub fn to_dense_rows(&self) -> Vec<Vec<f64>> {
        self.rows.iter().map(|r| r.to_dense(self.p)).collect()
    }

    /// Same samples with every row stored sparsely.
    pub fn to_sparse(&self) -> Dataset {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let (indices, values) = r.entries().filter(|e| e.1 != 0.0).unzip();
                Row::Sparse { indices, values }
            })
            .collect();
        Dataset {
            rows,
            labels: self.labels.clone(),
            p: self.p,
            task: self.task,
        }
    }

    /// `A x`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|r| r.dot(x)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_and_dense_dot_agree() {
        let dense = Row::dense(vec![0.5, 0.0, 2.0]);
        let sparse = Row::sparse(vec![(2, 2.0), (0, 0.5)]).unwrap();
        let x = [1.5, -3.0, 0.25];
        assert!((dense.dot(&x) - sparse.dot(&x)).abs() < 1e-12);
        assert_eq!(sparse.to_dense(3), vec![0.5, 0.0, 2.0]);
        assert_eq!(sparse.nnz(), 2);
    }

    #[test]
    fn rejects_bad_shapes() {
        let err = Dataset::from_dense(vec![vec![1.0, 2.0], vec![1.0]], vec![0.0, 1.0], Task::Regression);
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
        let err = Dataset::from_dense(vec![vec![1.0]], vec![0.5], Task::Classification);
        assert!(err.is_err());
        let err = Dataset::from_dense(vec![], vec![], Task::Regression);
        assert!(matches!(err, Err(Error::EmptyDataset)));
        let sparse = Row::sparse(vec![(5, 1.0)]).unwrap();
        assert!(Dataset::new(vec![sparse], vec![1.0], 3, Task::Regression).is_err());
    }

    #[test]
    fn duplicate_sparse_index_rejected() {
        assert!(Row::sparse(vec![(1, 1.0), (1, 2.0)]).is_err());
    }

    #[test]
    fn subset_keeps_order() {
        let ds = Dataset::from_dense(
            vec![vec![1.0], vec![2.0], vec![3.0]],
            vec![10.0, 20.0, 30.0],
            Task::Regression,
        )
        .unwrap();
        let sub = ds.subset(&[2, 0]).unwrap();
        assert_eq!(sub.labels(), &[30.0, 10.0]);
        assert_eq!(sub.row(0), &Row::Dense(vec![3.0]));
    }
}
