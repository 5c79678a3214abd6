//! On-demand verification suite: the algebraic identities and numerical
//! contracts the library relies on, evaluated on seeded random instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::embeddings::{claim1_check, fit_kspca, fit_spca, Model};
use crate::error::Result;
use crate::hsic::hsic_empirical;
use crate::kernels::{delta_gram, gram, gram_sym, KernelSpec};
use crate::linalg::{center_columns, max_principal_angle, sym_eig, sym_eig_topk, Matrix};
use crate::rff::sample_map;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckLevel {
    Fast,
    Full,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    /// Worst observed value.
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn at_most(name: &'static str, value: f64, threshold: f64, detail: impl Into<String>) -> Self {
        CheckResult {
            name,
            value,
            threshold,
            passed: value < threshold,
            detail: detail.into(),
        }
    }
}

fn uniform(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

fn random_labels(n: usize, classes: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    // Every class appears at least once.
    let mut y: Vec<usize> = (0..n).map(|i| if i < classes { i } else { rng.random_range(0..classes) }).collect();
    y.rotate_left(rng.random_range(0..n));
    y
}

/// Worst Gram-level SRP/SPCA discrepancy over random `(X, L)` instances
/// with `d ≤ 10`, `n ≤ 50` and exact label-kernel factors.
pub fn claim1_worst(instances: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for i in 0..instances {
        let d = rng.random_range(2..=10);
        let n = rng.random_range(4..=50);
        let x = uniform(d, n, &mut rng);
        let l = if i % 4 == 3 {
            // Generic PSD label kernel of random rank.
            let r = rng.random_range(1..=n);
            let f = uniform(r, n, &mut rng);
            f.t_matmul(&f)
        } else {
            let classes = rng.random_range(2..=4.min(n));
            delta_gram(&random_labels(n, classes, &mut rng))
        };
        worst = worst.max(claim1_check(&x, &l)?);
    }
    Ok(worst)
}

/// Worst principal angle between SPCA with `L = I` and the eigenbasis of
/// the sample covariance matrix.
pub fn pca_special_case_worst(datasets: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..datasets {
        let d = rng.random_range(3..=8);
        let n = rng.random_range(d + 2..=40);
        let k = rng.random_range(1..=d - 1);
        // Anisotropic data so the top-k subspace is well separated.
        let mut x = uniform(d, n, &mut rng);
        for i in 0..d {
            let s = 2f64.powi(-(i as i32));
            for j in 0..n {
                x.set(i, j, x.get(i, j) * s + 3.0);
            }
        }
        let Model::Linear(spca) = fit_spca(&x, &Matrix::identity(n), k)? else {
            unreachable!("SPCA is linear")
        };
        let mut cov = Matrix::zeros(d, d);
        let mean: Vec<f64> = (0..d).map(|i| x.row(i).iter().sum::<f64>() / n as f64).collect();
        for j in 0..n {
            for a in 0..d {
                for b in 0..d {
                    let v = cov.get(a, b) + (x.get(a, j) - mean[a]) * (x.get(b, j) - mean[b]) / (n - 1) as f64;
                    cov.set(a, b, v);
                }
            }
        }
        let basis = sym_eig_topk(&cov, k)?.vectors;
        worst = worst.max(max_principal_angle(&basis, &spca.projector)?);
    }
    Ok(worst)
}

/// Worst relative gap between the O(n²) HSIC and the literal
/// `trace(K H L H)/(n−1)²`.
pub fn hsic_oracle_worst(pairs: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..pairs {
        let n = rng.random_range(2..=20);
        let a = uniform(n + 1, n, &mut rng);
        let b = uniform(n + 1, n, &mut rng);
        let k = a.t_matmul(&a);
        let l = b.t_matmul(&b);
        let h = Matrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 } - 1.0 / n as f64);
        let literal = k.matmul(&h).matmul(&l).matmul(&h).trace() / ((n - 1) as f64).powi(2);
        let fast = hsic_empirical(&k, &l)?;
        worst = worst.max((fast - literal).abs() / literal.abs().max(1e-300));
    }
    Ok(worst)
}

/// Mean |ψ(x)ᵀψ(y) − k(x, y)| over 100 random pairs in `[0, 1]⁵` with
/// `σ = 1`, averaged over `seeds` feature draws, for each feature count.
pub fn rff_convergence(dims: &[usize], seeds: u64) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let xs = Matrix::from_fn(5, 100, |_, _| rng.random_range(0.0..1.0));
    let ys = Matrix::from_fn(5, 100, |_, _| rng.random_range(0.0..1.0));
    let spec = KernelSpec::Rbf { sigma: 1.0 };
    let exact: Vec<f64> = (0..100).map(|j| spec.eval(xs.col(j), ys.col(j))).collect();
    dims.iter()
        .map(|&dim| {
            let mut total = 0.0;
            for s in 0..seeds {
                let map = sample_map(1.0, 5, dim, s)?;
                let px = map.apply(&xs)?;
                let py = map.apply(&ys)?;
                let err: f64 = (0..100)
                    .map(|j| {
                        let approx: f64 = px.col(j).iter().zip(py.col(j)).map(|(a, b)| a * b).sum();
                        (approx - exact[j]).abs()
                    })
                    .sum::<f64>()
                    / 100.0;
                total += err;
            }
            Ok(total / seeds as f64)
        })
        .collect()
}

/// Worst `‖AV − VΛ‖_F / ‖A‖_F` over the matrices the suite generates.
pub fn eigen_residual_worst(count: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for i in 0..count {
        let n = rng.random_range(1..=24);
        let a = uniform(n, n, &mut rng);
        let sym = if i % 2 == 0 {
            a.add(&a.transpose())
        } else {
            // PSD, as produced by Q = X H L H Xᵀ.
            let x = center_columns(&uniform(n, n + 3, &mut rng));
            x.matmul_t(&x)
        };
        let eig = sym_eig(&sym)?;
        let norm = sym.frobenius_norm();
        if norm > 0.0 {
            worst = worst.max(eig.residual(&sym) / norm);
        }
    }
    Ok(worst)
}

/// Worst SPCA orthonormality and KSPCA `βᵀK̃β = I` residuals.
pub fn constraint_worst(fits: usize, seed: u64) -> Result<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut spca_worst, mut kspca_worst) = (0.0f64, 0.0f64);
    for _ in 0..fits {
        let d = rng.random_range(2..=8);
        let n = rng.random_range(6..=40);
        let x = Matrix::from_fn(d, n, |_, _| rng.random_range(0.0..1.0));
        let classes = rng.random_range(2..=3);
        let l = delta_gram(&random_labels(n, classes, &mut rng));
        let k = rng.random_range(1..=d);
        let spca = fit_spca(&x, &l, k)?;
        spca_worst = spca_worst.max(spca.info().constraint_residual.unwrap_or(f64::INFINITY));
        let sigma = rng.random_range(0.2..2.0);
        let kspca = fit_kspca(&x, KernelSpec::Rbf { sigma }, &l, k.min(n))?;
        kspca_worst = kspca_worst.max(kspca.info().constraint_residual.unwrap_or(f64::INFINITY));
    }
    Ok((spca_worst, kspca_worst))
}

/// Most negative Gram eigenvalue over random inputs (returned negated, so
/// smaller is better).
pub fn gram_psd_worst(count: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    for i in 0..count {
        let n = rng.random_range(2..=20);
        let x = Matrix::from_fn(4, n, |_, _| rng.random_range(0.0..1.0));
        let spec = match i % 3 {
            0 => KernelSpec::Rbf { sigma: rng.random_range(0.05..2.0) },
            1 => KernelSpec::Linear,
            _ => KernelSpec::Delta,
        };
        let k = gram_sym(spec, &x)?;
        let min = *sym_eig(&k)?.values.last().expect("n >= 2");
        worst = worst.max(-min);
    }
    Ok(worst)
}

pub fn run_checks(level: CheckLevel) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();

    let c1 = claim1_worst(20, 1)?;
    out.push(CheckResult::at_most("claim1-gram-equivalence", c1, 1e-8, "20 random (X, L), exact factor"));

    let pca = pca_special_case_worst(10, 2)?;
    out.push(CheckResult::at_most("pca-special-case", pca, 1e-8, "max principal angle (rad), 10 datasets"));

    let hs = hsic_oracle_worst(50, 3)?;
    out.push(CheckResult::at_most("hsic-literal-oracle", hs, 1e-12, "relative gap, 50 pairs"));
    let e = Matrix::from_fn(4, 4, |_, _| 1.0);
    let delta = delta_gram(&[0, 1, 0, 1]);
    let closed_a = hsic_empirical(&e, &delta)?.abs();
    let closed_b = (hsic_empirical(&Matrix::identity(3), &Matrix::identity(3))? - 0.5).abs();
    out.push(CheckResult::at_most("hsic-closed-forms", closed_a.max(closed_b), 1e-12, "eeᵀ → 0, (I, I) at n = 3 → 0.5"));

    let eig = eigen_residual_worst(40, 4)?;
    out.push(CheckResult::at_most("eigen-residual", eig, 1e-10, "‖AV − VΛ‖_F / ‖A‖_F, 40 matrices"));

    let (spca_res, kspca_res) = constraint_worst(20, 5)?;
    out.push(CheckResult::at_most("spca-orthonormality", spca_res, 1e-6, "‖UᵀU − I‖_F, 20 fits"));
    out.push(CheckResult::at_most("kspca-constraint", kspca_res, 1e-6, "‖βᵀK̃β − I‖_F, 20 fits"));

    let psd = gram_psd_worst(30, 6)?;
    out.push(CheckResult::at_most("gram-psd", psd, 1e-8, "−λ_min over 30 Gram matrices"));

    let x = Matrix::from_fn(3, 6, |i, j| (i * 6 + j) as f64 * 1e-3);
    let tiny = gram(KernelSpec::Rbf { sigma: 1e-10 }, &x, &x)?;
    let exact = gram(KernelSpec::Delta, &x, &x)?;
    out.push(CheckResult::at_most("tiny-rbf-equals-delta", tiny.sub(&exact).max_abs(), f64::MIN_POSITIVE, "σ = 1e-10"));

    match level {
        CheckLevel::Fast => {
            let err = rff_convergence(&[2000], 5)?[0];
            out.push(CheckResult::at_most("rff-error-d2000", err, 0.05, "5 seeds"));
        }
        CheckLevel::Full => {
            let dims = [50, 200, 800, 2000, 3200];
            let errs = rff_convergence(&dims, 20)?;
            out.push(CheckResult::at_most("rff-error-d2000", errs[3], 0.05, "20 seeds"));
            let sweep = [errs[0], errs[1], errs[2], errs[4]];
            let worst_rise = sweep.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
            out.push(CheckResult {
                name: "rff-monotone-sweep",
                value: worst_rise,
                threshold: 0.0,
                passed: worst_rise <= 0.0,
                detail: format!("D = 50/200/800/3200 → {:.4}/{:.4}/{:.4}/{:.4}", sweep[0], sweep[1], sweep[2], sweep[3]),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_suite_passes() {
        let results = run_checks(CheckLevel::Fast).unwrap();
        for r in &results {
            assert!(r.passed, "{} = {:e} (threshold {:e})", r.name, r.value, r.threshold);
        }
    }
}
