//! Dense matrix primitives: column centering, a cyclic Jacobi symmetric
//! eigensolver, Cholesky factorizations and PSD factors.
//!
//! Matrices are stored column-major, so a `d × n` data matrix keeps each
//! sample contiguous.

use std::fmt;

use crate::error::{Error, Result};

/// Dense column-major matrix of `f64`.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(8) {
            write!(f, "  ")?;
            for j in 0..self.cols.min(8) {
                write!(f, "{:>12.5e} ", self.get(i, j))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from a row-major literal. Panics on ragged input.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix::from_fn(r, c, |i, j| rows[i][j])
    }

    /// Wraps column-major data, rejecting wrong lengths and non-finite values.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(v) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite entry {v}")));
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Stacks equal-length columns side by side.
    pub fn from_columns(columns: &[Vec<f64>]) -> Self {
        let rows = columns.first().map_or(0, Vec::len);
        assert!(columns.iter().all(|c| c.len() == rows), "ragged columns");
        Matrix {
            rows,
            cols: columns.len(),
            data: columns.concat(),
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[j * self.rows + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[j * self.rows + i] = v;
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.cols).map(|j| self.get(i, j)).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// `self · b`. Panics on inner-dimension mismatch.
    pub fn matmul(&self, b: &Matrix) -> Matrix {
        assert_eq!(self.cols, b.rows, "matmul inner dimension");
        let mut out = Matrix::zeros(self.rows, b.cols);
        for j in 0..b.cols {
            let dst = &mut out.data[j * self.rows..(j + 1) * self.rows];
            for q in 0..self.cols {
                let s = b.get(q, j);
                if s != 0.0 {
                    axpy(s, self.col(q), dst);
                }
            }
        }
        out
    }

    /// `selfᵀ · b`.
    pub fn t_matmul(&self, b: &Matrix) -> Matrix {
        assert_eq!(self.rows, b.rows, "t_matmul inner dimension");
        Matrix::from_fn(self.cols, b.cols, |i, j| dot(self.col(i), b.col(j)))
    }

    /// `self · bᵀ`.
    pub fn matmul_t(&self, b: &Matrix) -> Matrix {
        assert_eq!(self.cols, b.cols, "matmul_t inner dimension");
        let mut out = Matrix::zeros(self.rows, b.rows);
        for q in 0..self.cols {
            let a_col = self.col(q);
            for j in 0..b.rows {
                let s = b.get(j, q);
                if s != 0.0 {
                    axpy(s, a_col, out.col_mut(j));
                }
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.shape(), other.shape(), "sub shape");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.shape(), other.shape(), "add shape");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn add_diagonal(&mut self, v: f64) {
        for i in 0..self.rows.min(self.cols) {
            self.data[i * self.rows + i] += v;
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).collect()
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..self.cols {
            for i in 0..j {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Replaces the matrix by `(A + Aᵀ)/2`.
    pub fn symmetrize(&mut self) {
        assert!(self.is_square());
        for j in 0..self.cols {
            for i in 0..j {
                let v = 0.5 * (self.get(i, j) + self.get(j, i));
                self.set(i, j, v);
                self.set(j, i, v);
            }
        }
    }

    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(self.rows * idx.len());
        for &j in idx {
            data.extend_from_slice(self.col(j));
        }
        Matrix {
            rows: self.rows,
            cols: idx.len(),
            data,
        }
    }

    /// First `k` columns.
    pub fn leading_columns(&self, k: usize) -> Matrix {
        assert!(k <= self.cols);
        Matrix {
            rows: self.rows,
            cols: k,
            data: self.data[..k * self.rows].to_vec(),
        }
    }

    /// First `k` rows.
    pub fn leading_rows(&self, k: usize) -> Matrix {
        assert!(k <= self.rows);
        Matrix::from_fn(k, self.cols, |i, j| self.get(i, j))
    }

    /// Appends zero rows until the matrix has `rows` rows.
    pub fn pad_rows(&self, rows: usize) -> Matrix {
        assert!(rows >= self.rows);
        Matrix::from_fn(rows, self.cols, |i, j| if i < self.rows { self.get(i, j) } else { 0.0 })
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

#[inline]
pub(crate) fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

#[inline]
pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

#[inline]
pub(crate) fn sq_dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| {
            let d = a - b;
            d * d
        })
        .sum()
}

/// Right-multiplies by the centering matrix `H = I − eeᵀ/n`, i.e. subtracts
/// each row's mean. Costs O(rows·cols); `H` is never formed.
pub fn center_columns(m: &Matrix) -> Matrix {
    let n = m.cols();
    let mut means = vec![0.0; m.rows()];
    for j in 0..n {
        axpy(1.0, m.col(j), &mut means);
    }
    let inv = 1.0 / n.max(1) as f64;
    means.iter_mut().for_each(|v| *v *= inv);
    let mut out = m.clone();
    for j in 0..n {
        axpy(-1.0, &means, out.col_mut(j));
    }
    out
}

/// Eigenpairs of a symmetric matrix, values descending, vectors as columns.
#[derive(Debug, Clone)]
pub struct EigPair {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl EigPair {
    /// `‖A·V − V·Λ‖_F`.
    pub fn residual(&self, a: &Matrix) -> f64 {
        let av = a.matmul(&self.vectors);
        let mut vl = self.vectors.clone();
        for (j, &lambda) in self.values.iter().enumerate() {
            vl.col_mut(j).iter_mut().for_each(|v| *v *= lambda);
        }
        av.sub(&vl).frobenius_norm()
    }
}

const JACOBI_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;
const SYMMETRY_TOL: f64 = 1e-10;

fn offdiag_norm(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                let v = a.get(i, j);
                s += v * v;
            }
        }
    }
    s.sqrt()
}

/// Full cyclic Jacobi diagonalization of a symmetric matrix. Returns the
/// (unsorted) eigenvalues and the accumulated rotation matrix.
fn jacobi(a: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    let n = a.rows();
    let mut a = a.clone();
    let mut v = Matrix::identity(n);
    let norm = a.frobenius_norm();
    if norm == 0.0 {
        return Ok((vec![0.0; n], v));
    }
    let target = JACOBI_TOL * norm;
    let mut off = offdiag_norm(&a);
    let mut sweeps = 0;
    while off > target {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off });
        }
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                a.set(p, p, app - t * apq);
                a.set(q, q, aqq + t * apq);
                a.set(p, q, 0.0);
                a.set(q, p, 0.0);
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = a.get(r, p);
                    let arq = a.get(r, q);
                    let new_rp = c * arp - s * arq;
                    let new_rq = s * arp + c * arq;
                    a.set(r, p, new_rp);
                    a.set(p, r, new_rp);
                    a.set(r, q, new_rq);
                    a.set(q, r, new_rq);
                }
                let (vp, vq) = two_cols_mut(&mut v, p, q);
                for (x, y) in vp.iter_mut().zip(vq.iter_mut()) {
                    let (xp, xq) = (*x, *y);
                    *x = c * xp - s * xq;
                    *y = s * xp + c * xq;
                }
            }
        }
        sweeps += 1;
        off = offdiag_norm(&a);
    }
    Ok((a.diagonal(), v))
}

fn two_cols_mut(m: &mut Matrix, p: usize, q: usize) -> (&mut [f64], &mut [f64]) {
    debug_assert!(p < q);
    let rows = m.rows;
    let (left, right) = m.data.split_at_mut(q * rows);
    (&mut left[p * rows..(p + 1) * rows], &mut right[..rows])
}

fn fix_sign(col: &mut [f64]) {
    let mut best = 0;
    for (i, v) in col.iter().enumerate() {
        if v.abs() > col[best].abs() {
            best = i;
        }
    }
    if col.get(best).is_some_and(|&v| v < 0.0) {
        col.iter_mut().for_each(|v| *v = -*v);
    }
}

fn check_symmetric(a: &Matrix, rel_tol: f64) -> Result<()> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let asym = a.max_asymmetry();
    if asym > rel_tol * a.frobenius_norm().max(f64::MIN_POSITIVE) {
        return Err(Error::NotSymmetric(asym));
    }
    Ok(())
}

/// Top-`k` eigenpairs of a symmetric matrix, eigenvalues descending. Each
/// eigenvector has its largest-magnitude component positive.
pub fn sym_eig_topk(a: &Matrix, k: usize) -> Result<EigPair> {
    check_symmetric(a, SYMMETRY_TOL)?;
    let n = a.rows();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("k = {k} outside 1..={n}")));
    }
    let mut work = a.clone();
    work.symmetrize();
    let (values, vectors) = jacobi(&work)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
    order.truncate(k);

    let mut out = vectors.select_columns(&order);
    for j in 0..k {
        fix_sign(out.col_mut(j));
    }
    Ok(EigPair {
        values: order.iter().map(|&i| values[i]).collect(),
        vectors: out,
    })
}

/// All eigenpairs of a symmetric matrix, descending.
pub fn sym_eig(a: &Matrix) -> Result<EigPair> {
    sym_eig_topk(a, a.rows())
}

/// Lower Cholesky factor `C` with `A = C·Cᵀ`. Fails if a pivot is not
/// strictly positive.
pub fn cholesky(a: &Matrix) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("cholesky of a non-square matrix".into()));
    }
    let n = a.rows();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let (done, rest) = l.data.split_at_mut(j * n);
        let cj = &mut rest[..n];
        cj[j..].copy_from_slice(&a.col(j)[j..]);
        for p in 0..j {
            let ljp = done[p * n + j];
            if ljp != 0.0 {
                axpy(-ljp, &done[p * n + j..(p + 1) * n], &mut cj[j..]);
            }
        }
        let d = cj[j];
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::Singular(format!("non-positive pivot {d:e} at column {j}")));
        }
        let d = d.sqrt();
        cj[j] = d;
        let inv = 1.0 / d;
        cj[j + 1..].iter_mut().for_each(|v| *v *= inv);
    }
    Ok(l)
}

/// Solves `C·X = B` for lower-triangular `C`.
pub fn solve_lower(c: &Matrix, b: &Matrix) -> Matrix {
    let n = c.rows();
    assert_eq!(n, b.rows());
    let mut x = b.clone();
    for j in 0..x.cols() {
        let col = x.col_mut(j);
        for p in 0..n {
            let v = col[p] / c.get(p, p);
            col[p] = v;
            if v != 0.0 {
                axpy(-v, &c.col(p)[p + 1..], &mut col[p + 1..]);
            }
        }
    }
    x
}

/// Solves `Cᵀ·X = B` for lower-triangular `C`.
pub fn solve_lower_transpose(c: &Matrix, b: &Matrix) -> Matrix {
    let n = c.rows();
    assert_eq!(n, b.rows());
    let mut x = b.clone();
    for j in 0..x.cols() {
        let col = x.col_mut(j);
        for p in (0..n).rev() {
            let s = dot(&c.col(p)[p + 1..], &col[p + 1..]);
            col[p] = (col[p] - s) / c.get(p, p);
        }
    }
    x
}

/// Diagonal pivots at or below `PIVOT_TOL · max diag` end the factorization.
const PIVOT_TOL: f64 = 1e-12;
/// Most negative value tolerated on the diagonal or in the residual.
const PSD_TOL: f64 = 1e-8;

/// Exact low-rank factor `F` (`r × n`) with `A = FᵀF`, computed by
/// diagonally pivoted Cholesky. `r` is the numerical rank of `A`.
pub fn low_rank_factor(a: &Matrix) -> Result<Matrix> {
    check_symmetric(a, PSD_TOL)?;
    let n = a.rows();
    let mut diag = a.diagonal();
    if let Some(&neg) = diag.iter().find(|&&v| v < -PSD_TOL) {
        return Err(Error::NotPsd(neg));
    }
    let scale = diag.iter().fold(0.0f64, |m, &v| m.max(v));
    let mut picked = vec![false; n];
    let mut factor_rows: Vec<Vec<f64>> = Vec::new();

    while factor_rows.len() < n {
        let (i, &dmax) = diag
            .iter()
            .enumerate()
            .filter(|(j, _)| !picked[*j])
            .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
            .expect("unpicked index remains");
        if dmax <= PIVOT_TOL * scale || dmax <= 0.0 {
            break;
        }
        let piv = dmax.sqrt();
        let mut row = a.col(i).to_vec();
        for f in &factor_rows {
            let fi = f[i];
            if fi != 0.0 {
                axpy(-fi, f, &mut row);
            }
        }
        let inv = 1.0 / piv;
        for (j, v) in row.iter_mut().enumerate() {
            *v = if picked[j] { 0.0 } else { *v * inv };
        }
        row[i] = piv;
        picked[i] = true;
        for j in 0..n {
            if !picked[j] {
                diag[j] -= row[j] * row[j];
            }
        }
        factor_rows.push(row);
    }

    // The Schur complement on the unpicked indices must vanish for a PSD input.
    let rest: Vec<usize> = (0..n).filter(|&j| !picked[j]).collect();
    let bound = PSD_TOL * scale.max(1.0);
    for (jj, &j) in rest.iter().enumerate() {
        if diag[j] < -PSD_TOL {
            return Err(Error::NotPsd(diag[j]));
        }
        for &i in &rest[..jj] {
            let mut s = a.get(i, j);
            for f in &factor_rows {
                s -= f[i] * f[j];
            }
            if s.abs() > bound {
                return Err(Error::NotPsd(-s.abs()));
            }
        }
    }

    let r = factor_rows.len();
    Ok(Matrix::from_fn(r, n, |i, j| factor_rows[i][j]))
}

/// Rank-`k` factor `Ψ` (`k × n`) minimizing `‖L − ΨᵀΨ‖_F`, i.e.
/// `Ψ = Σ_k^½ U_kᵀ` from the eigendecomposition of `L`.
///
/// The eigenproblem is solved on the `r × r` matrix `F·Fᵀ` where `L = FᵀF`
/// is the pivoted-Cholesky factor, which has the same nonzero spectrum.
/// Rows beyond `rank(L)` are zero.
pub fn psd_factor(l: &Matrix, k: usize) -> Result<Matrix> {
    let n = l.rows();
    if !l.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "psd_factor expects a square matrix, got {}x{}",
            l.rows(),
            l.cols()
        )));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("k = {k} outside 1..={n}")));
    }
    let f = low_rank_factor(l)?;
    let r = f.rows();
    if r == 0 {
        return Ok(Matrix::zeros(k, n));
    }
    let gram = f.matmul_t(&f);
    let keep = k.min(r);
    let eig = sym_eig_topk(&gram, keep)?;
    let psi = eig.vectors.t_matmul(&f);
    Ok(psi.pad_rows(k))
}

/// `‖VᵀV − I‖_F`.
pub fn orthonormality_residual(v: &Matrix) -> f64 {
    let mut g = v.t_matmul(v);
    g.add_diagonal(-1.0);
    g.frobenius_norm()
}

/// Largest principal angle (radians) between the column spaces of two
/// matrices with orthonormal columns. Computed from sines, which stay
/// accurate for nearly coincident subspaces.
pub fn max_principal_angle(a: &Matrix, b: &Matrix) -> Result<f64> {
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch("subspaces live in different spaces".into()));
    }
    // Residual of b after projection onto span(a); its singular values are sin θ.
    let proj = a.matmul(&a.t_matmul(b));
    let resid = b.sub(&proj);
    let g = resid.t_matmul(&resid);
    let eig = sym_eig_topk(&g, 1)?;
    let s = eig.values[0].max(0.0).sqrt().min(1.0);
    Ok(s.asin())
}
