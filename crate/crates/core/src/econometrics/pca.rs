use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::EstimationError;

/// Leading principal component of a standardized panel.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstComponent {
    /// Unit-norm eigenvector of the correlation matrix, oriented so that its
    /// entries sum to a positive number.
    pub loadings: Vec<f64>,
    pub scores: Vec<f64>,
    pub eigenvalue: f64,
    /// `eigenvalue / column count`.
    pub explained_variance_ratio: f64,
}

/// First principal component of the correlation matrix of `columns`
/// (each inner vector is one column; all the same length, no missing cells).
pub fn first_pc(columns: &[Vec<f64>]) -> Result<FirstComponent, EstimationError> {
    let k = columns.len();
    if k < 2 {
        return Err(EstimationError::Invalid("principal components need at least two columns".into()));
    }
    let n = columns[0].len();
    if columns.iter().any(|c| c.len() != n) {
        return Err(EstimationError::Invalid("panel columns differ in length".into()));
    }
    if n < 2 {
        return Err(EstimationError::InsufficientData { needed: 2, have: n });
    }

    let mut z = DMatrix::<f64>::zeros(n, k);
    for (j, col) in columns.iter().enumerate() {
        let mean = col.iter().sum::<f64>() / n as f64;
        let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0);
        if !(var > 0.0) || !var.is_finite() {
            return Err(EstimationError::DegenerateCovariance);
        }
        let sd = var.sqrt();
        for (i, v) in col.iter().enumerate() {
            z[(i, j)] = (v - mean) / sd;
        }
    }
    let corr = (z.transpose() * &z) / (n as f64 - 1.0);
    let eig = SymmetricEigen::new(corr);
    let (top, &eigenvalue) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty spectrum");
    let mut v: DVector<f64> = eig.eigenvectors.column(top).into_owned();
    v /= v.norm();
    if v.sum() < 0.0 {
        v = -v;
    }
    let scores = &z * &v;
    Ok(FirstComponent {
        loadings: v.iter().copied().collect(),
        scores: scores.iter().copied().collect(),
        eigenvalue,
        explained_variance_ratio: eigenvalue / k as f64,
    })
}
