//! Supervised embeddings.
//!
//! Exact methods solve the HSIC trace problem by eigendecomposition:
//!
//! * SPCA: top-`k` eigenvectors of `Q = X H L H Xᵀ`.
//! * KSPCA: `max tr(βᵀ K H L H K β)` subject to `βᵀ K β = I`.
//!
//! Randomized methods skip the eigenproblem entirely and project with a
//! factor `Ψ_Y` of the label kernel (`L ≈ Ψ_Yᵀ Ψ_Y`):
//!
//! * SRP: `Û = X H Ψ_Yᵀ`, training embedding `Ψ_Y H Xᵀ X`.
//! * KSRP: training embedding `Ψ_Y H K`, with `K` exact or `Ψ_Xᵀ Ψ_X`.
//!
//! The SRP embedding equals the SPCA embedding up to a rotation and a
//! `Σ^½` scaling; [`claim1_check`] measures that at the Gram level.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{delta_gram, gram, gram_sym, one_hot, KernelSpec};
use crate::linalg::{
    axpy, center_columns, cholesky, dot, low_rank_factor, orthonormality_residual, psd_factor,
    solve_lower_transpose, sym_eig, sym_eig_topk, Matrix,
};
use crate::rff::{sample_map, FeatureMap};

/// Ridge added to `K` before the Cholesky factorization in KSPCA.
pub const KSPCA_RIDGE: f64 = 1e-8;

/// Eigenvalues at or below this fraction of the largest count as zero.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Pca,
    Spca,
    Kspca,
    Srp,
    /// KSRP with the data kernel approximated by random Fourier features.
    Ksrp,
    /// KSRP with the exact data kernel.
    KsrpExact,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Pca,
        Method::Spca,
        Method::Kspca,
        Method::Srp,
        Method::Ksrp,
        Method::KsrpExact,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Pca => "pca",
            Method::Spca => "spca",
            Method::Kspca => "kspca",
            Method::Srp => "srp",
            Method::Ksrp => "ksrp",
            Method::KsrpExact => "ksrp-exact",
        }
    }

    /// Linear methods project the input space, so `k` is bounded by `d`.
    pub fn is_linear(self) -> bool {
        matches!(self, Method::Pca | Method::Spca | Method::Srp)
    }

    pub fn uses_data_kernel(self) -> bool {
        matches!(self, Method::Kspca | Method::Ksrp | Method::KsrpExact)
    }

    pub fn is_randomized(self) -> bool {
        matches!(self, Method::Srp | Method::Ksrp | Method::KsrpExact)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method {s:?}")))
    }
}

/// Timings and diagnostics recorded while fitting.
#[derive(Debug, Clone, Default, Serialize)]
pub struct FitInfo {
    /// Kernel or feature construction.
    pub kernel_ns: u64,
    /// Everything after kernel construction.
    pub solve_ns: u64,
    /// `‖UᵀU − I‖_F` for SPCA/PCA, `‖βᵀK̃β − I‖_F` for KSPCA.
    pub constraint_residual: Option<f64>,
    /// Number of embedding directions carrying nonzero objective.
    pub informative_rank: Option<usize>,
}

impl FitInfo {
    pub fn fit_ns(&self) -> u64 {
        self.kernel_ns + self.solve_ns
    }
}

fn elapsed_ns(t: Instant) -> u64 {
    (t.elapsed().as_nanos() as u64).max(1)
}

/// Projection `z = Pᵀx` (SPCA, PCA, SRP).
#[derive(Debug, Clone)]
pub struct LinearModel {
    pub method: Method,
    /// `d × k`
    pub projector: Matrix,
    pub train_embedding: Matrix,
    pub info: FitInfo,
}

#[derive(Debug, Clone)]
pub enum KernelModel {
    /// `z = βᵀ k(X_train, x)`
    Kspca {
        beta: Matrix,
        x_train: Matrix,
        spec: KernelSpec,
        train_embedding: Matrix,
        info: FitInfo,
    },
    /// `z = Ψ_Y H k(X_train, x)`
    KsrpExact {
        centered_psi_y: Matrix,
        x_train: Matrix,
        spec: KernelSpec,
        train_embedding: Matrix,
        info: FitInfo,
    },
    /// `z = (Ψ_Y H Ψ_Xᵀ) ψ(x)`
    KsrpFeatures {
        map: FeatureMap,
        /// `k × D`
        projected: Matrix,
        train_embedding: Matrix,
        info: FitInfo,
    },
}

/// A fitted embedding of either family.
#[derive(Debug, Clone)]
pub enum Model {
    Linear(LinearModel),
    Kernel(KernelModel),
}

impl Model {
    pub fn method(&self) -> Method {
        match self {
            Model::Linear(m) => m.method,
            Model::Kernel(KernelModel::Kspca { .. }) => Method::Kspca,
            Model::Kernel(KernelModel::KsrpExact { .. }) => Method::KsrpExact,
            Model::Kernel(KernelModel::KsrpFeatures { .. }) => Method::Ksrp,
        }
    }

    /// Embedding dimension `k`.
    pub fn dim(&self) -> usize {
        self.training_embedding().rows()
    }

    /// `k × n` embedding of the training set, computed during the fit.
    pub fn training_embedding(&self) -> &Matrix {
        match self {
            Model::Linear(m) => &m.train_embedding,
            Model::Kernel(
                KernelModel::Kspca { train_embedding, .. }
                | KernelModel::KsrpExact { train_embedding, .. }
                | KernelModel::KsrpFeatures { train_embedding, .. },
            ) => train_embedding,
        }
    }

    pub fn info(&self) -> &FitInfo {
        match self {
            Model::Linear(m) => &m.info,
            Model::Kernel(
                KernelModel::Kspca { info, .. }
                | KernelModel::KsrpExact { info, .. }
                | KernelModel::KsrpFeatures { info, .. },
            ) => info,
        }
    }

    /// Embeds new samples (`d × m` → `k × m`).
    pub fn transform(&self, x_new: &Matrix) -> Result<Matrix> {
        match self {
            Model::Linear(m) => {
                check_dim(m.projector.rows(), x_new)?;
                Ok(m.projector.t_matmul(x_new))
            }
            Model::Kernel(KernelModel::Kspca { beta, x_train, spec, .. }) => {
                check_dim(x_train.rows(), x_new)?;
                let k = gram(*spec, x_train, x_new)?;
                Ok(beta.t_matmul(&k))
            }
            Model::Kernel(KernelModel::KsrpExact { centered_psi_y, x_train, spec, .. }) => {
                check_dim(x_train.rows(), x_new)?;
                let k = gram(*spec, x_train, x_new)?;
                Ok(centered_psi_y.matmul(&k))
            }
            Model::Kernel(KernelModel::KsrpFeatures { map, projected, .. }) => {
                check_dim(map.input_dim(), x_new)?;
                Ok(projected.matmul(&map.apply(x_new)?))
            }
        }
    }
}

fn check_dim(d: usize, x_new: &Matrix) -> Result<()> {
    if x_new.rows() != d {
        return Err(Error::DimensionMismatch(format!(
            "model was fit on {d}-dimensional data, got {}",
            x_new.rows()
        )));
    }
    Ok(())
}

fn check_label_kernel(x: &Matrix, l: &Matrix) -> Result<()> {
    let n = x.cols();
    if l.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!(
            "label kernel is {}x{}, expected {n}x{n}",
            l.rows(),
            l.cols()
        )));
    }
    if n < 2 {
        return Err(Error::InvalidArgument("need at least 2 samples".into()));
    }
    Ok(())
}

fn check_k(k: usize, bound: usize, what: &str) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if k > bound {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds {what} = {bound}")));
    }
    Ok(())
}

fn linear_from_q(method: Method, x: &Matrix, mut q: Matrix, scatter: Option<&Matrix>, k: usize, start: Instant) -> Result<Model> {
    q.symmetrize();
    let eig = sym_eig_topk(&q, k)?;
    let lambda_max = eig.values[0].max(0.0);
    let informative = eig.values.iter().filter(|&&v| v > RANK_TOL * lambda_max && v > 0.0).count();
    let projector = match scatter {
        Some(s) if informative < k => variance_completion(&eig.vectors.leading_columns(informative), s, k)?,
        _ => eig.vectors,
    };
    let train_embedding = projector.t_matmul(x);
    let info = FitInfo {
        kernel_ns: 0,
        solve_ns: elapsed_ns(start),
        constraint_residual: Some(orthonormality_residual(&projector)),
        informative_rank: Some(informative),
    };
    Ok(Model::Linear(LinearModel {
        method,
        projector,
        train_embedding,
        info,
    }))
}

/// Extends the orthonormal columns of `v` to `k` columns with the top
/// principal directions of `scatter` restricted to their orthogonal
/// complement: the `L + εI`, `ε → 0` limit of SPCA, so that directions the
/// labels leave undetermined are ordered by data variance instead of by
/// eigensolver round-off.
fn variance_completion(v: &Matrix, scatter: &Matrix, k: usize) -> Result<Matrix> {
    let d = scatter.rows();
    let p = Matrix::from_fn(d, d, |i, j| {
        let proj: f64 = (0..v.cols()).map(|c| v.get(i, c) * v.get(j, c)).sum();
        f64::from(u8::from(i == j)) - proj
    });
    let mut reduced = p.matmul(scatter).matmul(&p);
    reduced.symmetrize();
    let extra = sym_eig_topk(&reduced, k - v.cols())?;
    let mut cols: Vec<Vec<f64>> = (0..v.cols()).map(|j| v.col(j).to_vec()).collect();
    for j in 0..extra.vectors.cols() {
        // Re-project to strip round-off leakage into span(v), then renormalize.
        let mut c = p.matmul(&Matrix::from_col_major(d, 1, extra.vectors.col(j).to_vec())?).col(0).to_vec();
        for prev in &cols {
            let dotp: f64 = prev.iter().zip(&c).map(|(a, b)| a * b).sum();
            c.iter_mut().zip(prev).for_each(|(x, y)| *x -= dotp * y);
        }
        let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            c.iter_mut().for_each(|x| *x /= norm);
        }
        cols.push(c);
    }
    Ok(Matrix::from_columns(&cols))
}

/// Supervised PCA: top-`k` eigenvectors of `Q = X H L H Xᵀ`.
pub fn fit_spca(x: &Matrix, l: &Matrix, k: usize) -> Result<Model> {
    check_label_kernel(x, l)?;
    check_k(k, x.rows(), "d")?;
    let start = Instant::now();
    let xc = center_columns(x);
    // H L H Xᵀ = (X H) L (X H)ᵀ because H is symmetric and idempotent.
    let q = xc.matmul(l).matmul_t(&xc);
    let scatter = xc.matmul_t(&xc);
    linear_from_q(Method::Spca, x, q, Some(&scatter), k, start)
}

/// PCA as SPCA with `L = I`: `Q` is the scatter matrix of the centered data.
pub fn fit_pca(x: &Matrix, k: usize) -> Result<Model> {
    if x.cols() < 2 {
        return Err(Error::InvalidArgument("need at least 2 samples".into()));
    }
    check_k(k, x.rows(), "d")?;
    let start = Instant::now();
    let xc = center_columns(x);
    let q = xc.matmul_t(&xc);
    linear_from_q(Method::Pca, x, q, None, k, start)
}

/// `C·y` for lower-triangular `C`. Each column of `C` is read once and
/// applied to every column of `y`.
fn lower_matmul(c: &Matrix, y: &Matrix) -> Matrix {
    let n = c.rows();
    let mut out = Matrix::zeros(n, y.cols());
    for q in 0..n {
        let cq = &c.col(q)[q..];
        for j in 0..y.cols() {
            let s = y.get(q, j);
            if s != 0.0 {
                axpy(s, cq, &mut out.col_mut(j)[q..]);
            }
        }
    }
    out
}

/// `Cᵀ·y` for lower-triangular `C`.
fn lower_t_matmul(c: &Matrix, y: &Matrix) -> Matrix {
    let n = c.rows();
    let mut out = Matrix::zeros(n, y.cols());
    for i in 0..n {
        let ci = &c.col(i)[i..];
        for j in 0..y.cols() {
            out.set(i, j, dot(ci, &y.col(j)[i..]));
        }
    }
    out
}

fn center_vectors(y: &mut Matrix) {
    for j in 0..y.cols() {
        let col = y.col_mut(j);
        let mean = col.iter().sum::<f64>() / col.len() as f64;
        col.iter_mut().for_each(|v| *v -= mean);
    }
}

/// Orthonormalizes the columns of `y` against `basis` and each other
/// (two passes of modified Gram-Schmidt). Columns that collapse are
/// replaced by fresh random vectors.
fn orthonormalize_against(basis: &[Vec<f64>], y: &mut Matrix, rng: &mut ChaCha8Rng) {
    let n = y.rows();
    let mut done: Vec<Vec<f64>> = Vec::with_capacity(y.cols());
    for j in 0..y.cols() {
        let mut v = y.col(j).to_vec();
        for attempt in 0..8 {
            let before = dot(&v, &v).sqrt();
            for _ in 0..2 {
                for b in basis.iter().chain(done.iter()) {
                    let c = dot(b, &v);
                    axpy(-c, b, &mut v);
                }
            }
            let norm = dot(&v, &v).sqrt();
            if norm > 1e-10 * before.max(f64::MIN_POSITIVE) && norm > 0.0 {
                v.iter_mut().for_each(|e| *e /= norm);
                break;
            }
            assert!(attempt < 7, "could not complete an orthonormal basis");
            v = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        }
        y.col_mut(j).copy_from_slice(&v);
        done.push(v);
    }
}

const TIE_BREAK_ITERS: usize = 8;
const TIE_BREAK_OVERSAMPLE: usize = 8;

/// Completes `informative` with `count` orthonormal directions maximizing
/// `vᵀ Cᵀ H C v`, the kernel-variance objective, on the orthogonal
/// complement. This is the limit of KSPCA with `L + εI` as `ε → 0`:
/// directions with zero label objective are ordered as kernel PCA would.
fn kernel_variance_completion(c: &Matrix, informative: &[Vec<f64>], count: usize) -> Vec<Vec<f64>> {
    let n = c.rows();
    let block = (count + TIE_BREAK_OVERSAMPLE).min(n - informative.len());
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut y = Matrix::from_fn(n, block, |_, _| rng.random_range(-1.0..1.0));
    orthonormalize_against(informative, &mut y, &mut rng);
    let apply = |y: &Matrix| {
        let mut z = lower_matmul(c, y);
        center_vectors(&mut z);
        lower_t_matmul(c, &z)
    };
    for _ in 0..TIE_BREAK_ITERS {
        y = apply(&y);
        orthonormalize_against(informative, &mut y, &mut rng);
    }
    // Rayleigh-Ritz on the converged block.
    let ty = apply(&y);
    let mut small = y.t_matmul(&ty);
    small.symmetrize();
    let eig = sym_eig_topk(&small, count).expect("small symmetric eigenproblem");
    let mut out = y.matmul(&eig.vectors);
    orthonormalize_against(informative, &mut out, &mut rng);
    (0..count).map(|j| out.col(j).to_vec()).collect()
}

/// Kernel SPCA.
///
/// With `K̃ = K + ridge·I = C·Cᵀ` (Cholesky) the constrained problem becomes
/// the symmetric eigenproblem `S = Cᵀ H L H C`, and `β = C⁻ᵀ V` satisfies
/// `βᵀK̃β = VᵀV = I`. `L` is first reduced to its exact low-rank factor
/// `L = FᵀF`, so `S = G Gᵀ` with `G = Cᵀ (F H)ᵀ` and only the `r × r`
/// matrix `GᵀG` is diagonalized.
///
/// When `k` exceeds the rank of `H L H`, the remaining directions are the
/// kernel-variance completion (see [`kernel_variance_completion`]).
pub fn fit_kspca(x: &Matrix, spec: KernelSpec, l: &Matrix, k: usize) -> Result<Model> {
    check_label_kernel(x, l)?;
    let n = x.cols();
    check_k(k, n, "n")?;

    let t0 = Instant::now();
    let kernel = gram_sym(spec, x)?;
    let kernel_ns = elapsed_ns(t0);

    let t1 = Instant::now();
    let mut ridged = kernel.clone();
    ridged.add_diagonal(KSPCA_RIDGE);
    let c = cholesky(&ridged).map_err(|e| match e {
        Error::Singular(msg) => Error::Singular(format!("K + {KSPCA_RIDGE:e} I: {msg}")),
        other => other,
    })?;

    let f = low_rank_factor(l)?;
    let fh = center_columns(&f);
    let g = lower_t_matmul(&c, &fh.transpose());

    let mut directions: Vec<Vec<f64>> = Vec::with_capacity(k);
    if g.cols() > 0 {
        let mut gg = g.t_matmul(&g);
        gg.symmetrize();
        let eig = sym_eig(&gg)?;
        let lambda_max = eig.values[0];
        for (i, &lambda) in eig.values.iter().enumerate() {
            if directions.len() == k || !(lambda > RANK_TOL * lambda_max && lambda > 0.0) {
                break;
            }
            let w = eig.vectors.col(i);
            let mut v = vec![0.0; n];
            for (q, &wq) in w.iter().enumerate() {
                axpy(wq / lambda.sqrt(), g.col(q), &mut v);
            }
            directions.push(v);
        }
    }
    let informative = directions.len();
    if informative < k {
        let extra = kernel_variance_completion(&c, &directions, k - informative);
        directions.extend(extra);
    }
    let v = Matrix::from_columns(&directions);
    let beta = solve_lower_transpose(&c, &v);

    let kb = ridged.matmul(&beta);
    let mut constraint = beta.t_matmul(&kb);
    constraint.add_diagonal(-1.0);
    let residual = constraint.frobenius_norm();

    let train_embedding = beta.t_matmul(&kernel);
    let info = FitInfo {
        kernel_ns,
        solve_ns: elapsed_ns(t1),
        constraint_residual: Some(residual),
        informative_rank: Some(informative),
    };
    Ok(Model::Kernel(KernelModel::Kspca {
        beta,
        x_train: x.clone(),
        spec,
        train_embedding,
        info,
    }))
}

fn check_psi(x: &Matrix, psi_y: &Matrix) -> Result<()> {
    if psi_y.cols() != x.cols() {
        return Err(Error::DimensionMismatch(format!(
            "label factor has {} columns for {} samples",
            psi_y.cols(),
            x.cols()
        )));
    }
    if psi_y.rows() == 0 {
        return Err(Error::InvalidArgument("label factor has no rows".into()));
    }
    Ok(())
}

/// Supervised random projection `Û = X H Ψ_Yᵀ`.
pub fn fit_srp(x: &Matrix, psi_y: &Matrix) -> Result<Model> {
    check_psi(x, psi_y)?;
    let start = Instant::now();
    let projector = center_columns(x).matmul_t(psi_y);
    let train_embedding = projector.t_matmul(x);
    Ok(Model::Linear(LinearModel {
        method: Method::Srp,
        projector,
        train_embedding,
        info: FitInfo {
            kernel_ns: 0,
            solve_ns: elapsed_ns(start),
            constraint_residual: None,
            informative_rank: None,
        },
    }))
}

/// Source of the data kernel for KSRP.
#[derive(Debug, Clone)]
pub enum DataBackend {
    Exact(KernelSpec),
    Features(FeatureMap),
}

/// Kernel supervised random projection: training embedding `Ψ_Y H K`.
pub fn fit_ksrp(x: &Matrix, backend: DataBackend, psi_y: &Matrix) -> Result<Model> {
    check_psi(x, psi_y)?;
    let centered_psi_y = center_columns(psi_y);
    match backend {
        DataBackend::Exact(spec) => {
            let t0 = Instant::now();
            let kernel = gram_sym(spec, x)?;
            let kernel_ns = elapsed_ns(t0);
            let t1 = Instant::now();
            let train_embedding = centered_psi_y.matmul(&kernel);
            Ok(Model::Kernel(KernelModel::KsrpExact {
                centered_psi_y,
                x_train: x.clone(),
                spec,
                train_embedding,
                info: FitInfo {
                    kernel_ns,
                    solve_ns: elapsed_ns(t1),
                    ..FitInfo::default()
                },
            }))
        }
        DataBackend::Features(map) => {
            let t0 = Instant::now();
            let psi_x = map.apply(x)?;
            let kernel_ns = elapsed_ns(t0);
            let t1 = Instant::now();
            // (Ψ_Y H Ψ_Xᵀ) Ψ_X keeps the cost linear in n.
            let projected = centered_psi_y.matmul_t(&psi_x);
            let train_embedding = projected.matmul(&psi_x);
            Ok(Model::Kernel(KernelModel::KsrpFeatures {
                map,
                projected,
                train_embedding,
                info: FitInfo {
                    kernel_ns,
                    solve_ns: elapsed_ns(t1),
                    ..FitInfo::default()
                },
            }))
        }
    }
}

/// How to factor the delta label kernel into `Ψ_Y` (`k × n`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LabelFactor {
    /// Random Fourier features of an RBF kernel with tiny bandwidth on the
    /// one-hot label vectors; approaches the delta kernel as `σ → 0`.
    Rff { sigma: f64, seed: u64 },
    /// Optimal rank-`k` factor of the exact delta Gram matrix.
    Exact,
}

pub fn label_factor(labels: &[usize], classes: usize, k: usize, backend: LabelFactor) -> Result<Matrix> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if let Some(&bad) = labels.iter().find(|&&c| c >= classes) {
        return Err(Error::InvalidArgument(format!("label {bad} outside 0..{classes}")));
    }
    match backend {
        LabelFactor::Rff { sigma, seed } => {
            let y = one_hot(labels, classes);
            sample_map(sigma, classes, k, seed)?.apply(&y)
        }
        LabelFactor::Exact => psd_factor(&delta_gram(labels), k),
    }
}

/// Gram-level discrepancy between the SRP embedding `Z₂ = Ψ H Xᵀ X`
/// (`Ψ` an exact factor of `L`) and the SPCA embedding `Z₁ = Uᵀ X`:
/// `‖Z₂ᵀZ₂ − Z₁ᵀ Σ Z₁‖_F / ‖Z₁ᵀ Σ Z₁‖_F`.
///
/// `Z₂ = R Σ^½ Z₁` for an unobservable rotation `R`, so comparing Grams
/// removes `R`. `U`, `Σ` span the full numerical rank of `Q`.
pub fn claim1_check(x: &Matrix, l: &Matrix) -> Result<f64> {
    check_label_kernel(x, l)?;
    let psi = low_rank_factor(l)?;
    let xtx = x.t_matmul(x);
    let z2 = center_columns(&psi).matmul(&xtx);
    let g2 = z2.t_matmul(&z2);

    let xc = center_columns(x);
    let mut q = xc.matmul(l).matmul_t(&xc);
    q.symmetrize();
    let eig = sym_eig(&q)?;
    let lambda_max = eig.values[0];
    let rank = eig.values.iter().filter(|&&v| v > RANK_TOL * lambda_max && v > 0.0).count();
    if rank == 0 {
        return Ok(if g2.max_abs() == 0.0 { 0.0 } else { 1.0 });
    }

    let spca = fit_spca(x, l, rank)?;
    let z1 = spca.training_embedding();
    let mut scaled = z1.clone();
    for j in 0..scaled.cols() {
        for (v, &s) in scaled.col_mut(j).iter_mut().zip(&eig.values) {
            *v *= s;
        }
    }
    let g1 = z1.t_matmul(&scaled);
    Ok(g2.sub(&g1).frobenius_norm() / g1.frobenius_norm())
}
