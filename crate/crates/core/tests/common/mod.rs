//! Reference arithmetic for the integration tests. Deliberately naive and
//! independent of the library's linear algebra so that it can serve as an
//! oracle.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use suproj::Matrix;

/// Dense row-major matrix as nested vectors.
pub type Dense = Vec<Vec<f64>>;

pub fn dense(m: &Matrix) -> Dense {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j)).collect()).collect()
}

pub fn to_matrix(a: &Dense) -> Matrix {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    Matrix::from_fn(rows, cols, |i, j| a[i][j])
}

pub fn uniform(rows: usize, cols: usize, lo: f64, hi: f64, rng: &mut ChaCha8Rng) -> Dense {
    (0..rows).map(|_| (0..cols).map(|_| rng.random_range(lo..hi)).collect()).collect()
}

pub fn mul(a: &Dense, b: &Dense) -> Dense {
    let (n, m, p) = (a.len(), b.len(), b.first().map_or(0, Vec::len));
    assert!(a.iter().all(|r| r.len() == m));
    let mut out = vec![vec![0.0; p]; n];
    for i in 0..n {
        for k in 0..m {
            let aik = a[i][k];
            for j in 0..p {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn t(a: &Dense) -> Dense {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

pub fn sub(a: &Dense, b: &Dense) -> Dense {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p - q).collect()).collect()
}

pub fn fro(a: &Dense) -> f64 {
    a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn trace(a: &Dense) -> f64 {
    (0..a.len()).map(|i| a[i][i]).sum()
}

pub fn identity(n: usize) -> Dense {
    (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect()
}

/// The literal centering matrix `H = I − 11ᵀ/n`.
pub fn centering(n: usize) -> Dense {
    let inv = 1.0 / n as f64;
    (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j)) - inv).collect()).collect()
}

/// Columns (samples) of a `d × n` matrix minus their mean, via `X·H`.
pub fn center(x: &Dense) -> Dense {
    mul(x, &centering(x[0].len()))
}

pub fn rbf(a: &[f64], b: &[f64], sigma: f64) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-d2 / (2.0 * sigma * sigma)).exp()
}

/// RBF Gram matrix between the columns of `a` and `b`.
pub fn rbf_gram(a: &Dense, b: &Dense, sigma: f64) -> Dense {
    let (ca, cb) = (t(a), t(b));
    ca.iter().map(|x| cb.iter().map(|y| rbf(x, y, sigma)).collect()).collect()
}

/// `c × n` indicator matrix: an exact factor of the delta kernel.
pub fn one_hot(labels: &[usize], classes: usize) -> Dense {
    (0..classes).map(|c| labels.iter().map(|&y| f64::from(u8::from(y == c))).collect()).collect()
}

/// Rows made orthonormal by modified Gram-Schmidt, optionally also
/// orthogonal to the all-ones vector.
pub fn orthonormal_rows(mut rows: Dense, against_ones: bool) -> Dense {
    let n = rows[0].len();
    let mut basis: Dense = Vec::new();
    if against_ones {
        basis.push(vec![1.0 / (n as f64).sqrt(); n]);
    }
    for r in rows.iter_mut() {
        for _ in 0..2 {
            for b in &basis {
                let p: f64 = b.iter().zip(r.iter()).map(|(x, y)| x * y).sum();
                r.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
            }
        }
        let norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        r.iter_mut().for_each(|v| *v /= norm);
        basis.push(r.clone());
    }
    rows
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / lx.len() as f64;
    let my = ly.iter().sum::<f64>() / ly.len() as f64;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}
