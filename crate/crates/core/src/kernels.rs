//! Exact Gram matrices and RBF bandwidth selection.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embeddings::{self, LabelFactor};
use crate::error::{Error, Result};
use crate::eval::one_nn_accuracy;
use crate::linalg::{dot, sq_dist, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum KernelSpec {
    /// `exp(−‖a − b‖² / (2σ²))`
    Rbf { sigma: f64 },
    Linear,
    /// 1 iff the two inputs are identical.
    Delta,
}

impl KernelSpec {
    pub fn rbf(sigma: f64) -> Result<Self> {
        let spec = KernelSpec::Rbf { sigma };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Rbf { sigma } if !(sigma > 0.0) || !sigma.is_finite() => Err(
                Error::InvalidArgument(format!("RBF bandwidth must be positive, got {sigma}")),
            ),
            _ => Ok(()),
        }
    }

    #[inline]
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            KernelSpec::Rbf { sigma } => (-sq_dist(a, b) / (2.0 * sigma * sigma)).exp(),
            KernelSpec::Linear => dot(a, b),
            KernelSpec::Delta => (a == b) as u8 as f64,
        }
    }
}

/// Cross-Gram `K_ij = k(a_i, b_j)` between the columns of `a` (`d × m`) and
/// `b` (`d × n`).
pub fn gram(spec: KernelSpec, a: &Matrix, b: &Matrix) -> Result<Matrix> {
    spec.validate()?;
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "kernel inputs have dimensions {} and {}",
            a.rows(),
            b.rows()
        )));
    }
    Ok(Matrix::from_fn(a.cols(), b.cols(), |i, j| spec.eval(a.col(i), b.col(j))))
}

/// Symmetric Gram of `x` with itself; evaluates each pair once.
pub fn gram_sym(spec: KernelSpec, x: &Matrix) -> Result<Matrix> {
    spec.validate()?;
    let n = x.cols();
    let mut k = Matrix::zeros(n, n);
    for j in 0..n {
        for i in 0..=j {
            let v = spec.eval(x.col(i), x.col(j));
            k.set(i, j, v);
            k.set(j, i, v);
        }
    }
    Ok(k)
}

/// Delta kernel over class labels.
pub fn delta_gram(labels: &[usize]) -> Matrix {
    let n = labels.len();
    Matrix::from_fn(n, n, |i, j| (labels[i] == labels[j]) as u8 as f64)
}

/// `c × n` indicator matrix with a single 1 per column.
pub fn one_hot(labels: &[usize], classes: usize) -> Matrix {
    Matrix::from_fn(classes, labels.len(), |c, j| (labels[j] == c) as u8 as f64)
}

/// Median pairwise Euclidean distance between the columns of `x`.
pub fn median_heuristic(x: &Matrix) -> f64 {
    let n = x.cols();
    let mut d: Vec<f64> = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for j in 0..n {
        for i in 0..j {
            d.push(sq_dist(x.col(i), x.col(j)));
        }
    }
    if d.is_empty() {
        return 1.0;
    }
    let mid = d.len() / 2;
    let (_, m, _) = d.select_nth_unstable_by(mid, f64::total_cmp);
    let m = m.sqrt();
    if m > 0.0 {
        m
    } else {
        1.0
    }
}

/// Median heuristic times `2^-4 ..= 2^4`, ascending.
pub fn default_sigma_grid(x: &Matrix) -> Vec<f64> {
    let m = median_heuristic(x);
    (-4..=4).map(|e| m * 2f64.powi(e)).collect()
}

/// Which embedding scores a candidate bandwidth during cross-validation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CvEmbedding {
    Kspca,
    /// KSRP with an RFF label factor. The data kernel is exact when `kx` is
    /// `None`, otherwise approximated with `kx` random features.
    Ksrp { sigma_y: f64, kx: Option<usize> },
}

const CV_DIM: usize = 2;

/// Picks the grid bandwidth with the best mean held-out 1-NN accuracy of a
/// `k = 2` embedding. Folds whose training part misses a class are
/// skipped. Ties go to the smaller bandwidth.
pub fn select_sigma_cv(
    x: &Matrix,
    labels: &[usize],
    folds: usize,
    grid: &[f64],
    embedding: CvEmbedding,
    seed: u64,
) -> Result<f64> {
    let n = x.cols();
    if labels.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} labels for {n} samples",
            labels.len()
        )));
    }
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty bandwidth grid".into()));
    }
    if folds < 2 || folds > n {
        return Err(Error::InvalidArgument(format!("need 2 <= folds <= n, got {folds} folds for {n} samples")));
    }
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.len() == 1 {
        KernelSpec::rbf(sorted[0])?;
        return Ok(sorted[0]);
    }

    let classes = labels.iter().max().map_or(0, |m| m + 1);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut fold_of = vec![0; n];
    for (pos, &i) in order.iter().enumerate() {
        fold_of[i] = pos % folds;
    }

    struct Fold {
        x_train: Matrix,
        y_train: Vec<usize>,
        x_test: Matrix,
        y_test: Vec<usize>,
        l: Matrix,
    }
    let mut usable = Vec::new();
    for f in 0..folds {
        let train: Vec<usize> = (0..n).filter(|&i| fold_of[i] != f).collect();
        let test: Vec<usize> = (0..n).filter(|&i| fold_of[i] == f).collect();
        let y_train: Vec<usize> = train.iter().map(|&i| labels[i]).collect();
        let present = (0..classes).all(|c| !labels.contains(&c) || y_train.contains(&c));
        if !present || train.len() < CV_DIM || test.is_empty() {
            continue;
        }
        usable.push(Fold {
            x_train: x.select_columns(&train),
            l: delta_gram(&y_train),
            y_train,
            x_test: x.select_columns(&test),
            y_test: test.iter().map(|&i| labels[i]).collect(),
        });
    }
    if usable.is_empty() {
        return Err(Error::AllFoldsSkipped);
    }

    let mut best = (f64::NEG_INFINITY, sorted[0]);
    for &sigma in &sorted {
        let spec = KernelSpec::rbf(sigma)?;
        let mut total = 0.0;
        for (fi, fold) in usable.iter().enumerate() {
            let model = match embedding {
                CvEmbedding::Kspca => embeddings::fit_kspca(&fold.x_train, spec, &fold.l, CV_DIM)?,
                CvEmbedding::Ksrp { sigma_y, kx } => {
                    let fold_seed = seed ^ (fi as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
                    let psi_y = embeddings::label_factor(
                        &fold.y_train,
                        classes,
                        CV_DIM,
                        LabelFactor::Rff {
                            sigma: sigma_y,
                            seed: fold_seed,
                        },
                    )?;
                    let backend = match kx {
                        None => embeddings::DataBackend::Exact(spec),
                        Some(dim) => embeddings::DataBackend::Features(crate::rff::sample_map(
                            sigma,
                            fold.x_train.rows(),
                            dim,
                            fold_seed.rotate_left(17),
                        )?),
                    };
                    embeddings::fit_ksrp(&fold.x_train, backend, &psi_y)?
                }
            };
            let z_test = model.transform(&fold.x_test)?;
            total += one_nn_accuracy(model.training_embedding(), &fold.y_train, &z_test, &fold.y_test)?;
        }
        let mean = total / usable.len() as f64;
        if mean > best.0 {
            best = (mean, sigma);
        }
    }
    Ok(best.1)
}
