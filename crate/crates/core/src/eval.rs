use crate::error::{Error, Result};
use crate::linalg::{sq_dist, Matrix};

/// Index of the nearest training column for every test column. Ties go to
/// the lowest training index.
pub fn nearest_neighbors(z_train: &Matrix, z_test: &Matrix) -> Result<Vec<usize>> {
    if z_train.cols() == 0 {
        return Err(Error::InvalidArgument("1-NN needs at least one training point".into()));
    }
    if z_train.rows() != z_test.rows() {
        return Err(Error::DimensionMismatch(format!(
            "training embedding has {} rows, test embedding {}",
            z_train.rows(),
            z_test.rows()
        )));
    }
    Ok((0..z_test.cols())
        .map(|t| {
            let q = z_test.col(t);
            let mut best = (f64::INFINITY, 0);
            for i in 0..z_train.cols() {
                let d = sq_dist(z_train.col(i), q);
                if d < best.0 {
                    best = (d, i);
                }
            }
            best.1
        })
        .collect())
}

/// Fraction of test points whose nearest training point shares their label.
pub fn one_nn_accuracy(z_train: &Matrix, y_train: &[usize], z_test: &Matrix, y_test: &[usize]) -> Result<f64> {
    if y_train.len() != z_train.cols() || y_test.len() != z_test.cols() {
        return Err(Error::DimensionMismatch("label count differs from sample count".into()));
    }
    let nn = nearest_neighbors(z_train, z_test)?;
    if nn.is_empty() {
        return Ok(0.0);
    }
    let hits = nn.iter().zip(y_test).filter(|(&i, &y)| y_train[i] == y).count();
    Ok(hits as f64 / nn.len() as f64)
}
