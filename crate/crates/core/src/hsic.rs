use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// `H·L·H` by subtracting row and column means and adding back the grand
/// mean. O(n²).
pub fn double_center(l: &Matrix) -> Matrix {
    let n = l.rows();
    let inv = 1.0 / n as f64;
    let col_means: Vec<f64> = (0..n).map(|j| l.col(j).iter().sum::<f64>() * inv).collect();
    let mut row_means = vec![0.0; n];
    for j in 0..n {
        for (r, v) in row_means.iter_mut().zip(l.col(j)) {
            *r += v;
        }
    }
    row_means.iter_mut().for_each(|v| *v *= inv);
    let grand = col_means.iter().sum::<f64>() * inv;
    Matrix::from_fn(n, n, |i, j| l.get(i, j) - row_means[i] - col_means[j] + grand)
}

/// Empirical HSIC, `trace(K·H·L·H)/(n−1)²`.
pub fn hsic_empirical(k: &Matrix, l: &Matrix) -> Result<f64> {
    if !k.is_square() || !l.is_square() || k.rows() != l.rows() {
        return Err(Error::DimensionMismatch(format!(
            "HSIC needs two n×n matrices, got {:?} and {:?}",
            k.shape(),
            l.shape()
        )));
    }
    let n = k.rows();
    if n < 2 {
        return Err(Error::InvalidArgument("HSIC needs at least 2 samples".into()));
    }
    for m in [k, l] {
        let asym = m.max_asymmetry();
        if asym > 1e-8 * m.frobenius_norm().max(1.0) {
            return Err(Error::NotSymmetric(asym));
        }
    }
    let lc = double_center(l);
    let mut tr = 0.0;
    for j in 0..n {
        for i in 0..n {
            tr += k.get(i, j) * lc.get(j, i);
        }
    }
    let denom = (n - 1) as f64;
    Ok(tr / (denom * denom))
}
