//! Random Fourier features for the RBF kernel.
//!
//! By Bochner's theorem the RBF kernel `exp(−‖x−y‖²/(2σ²))` is the Fourier
//! transform of a Gaussian, so sampling frequencies `w ~ N(0, σ⁻²I)` and
//! phases `b ~ U[0, 2π)` gives `ψ(x) = √(2/D)·cos(Wx + b)` with
//! `E[ψ(x)ᵀψ(y)] = k(x, y)`.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

#[derive(Debug, Clone)]
pub struct FeatureMap {
    frequencies: Matrix,
    phases: Vec<f64>,
    scale: f64,
    sigma: f64,
    seed: u64,
}

/// Draws a `dim`-feature map for inputs of dimension `d`. Fully determined
/// by `(sigma, d, dim, seed)`.
pub fn sample_map(sigma: f64, d: usize, dim: usize, seed: u64) -> Result<FeatureMap> {
    if d == 0 || dim == 0 {
        return Err(Error::InvalidArgument(format!(
            "feature map needs d >= 1 and D >= 1 (got d = {d}, D = {dim})"
        )));
    }
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidArgument(format!("RBF bandwidth must be positive, got {sigma}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0 / sigma)
        .map_err(|e| Error::InvalidArgument(format!("frequency distribution: {e}")))?;
    let frequencies = Matrix::from_fn(dim, d, |_, _| normal.sample(&mut rng));
    if !frequencies.is_finite() {
        return Err(Error::InvalidArgument(format!("bandwidth {sigma} overflows the frequencies")));
    }
    let phases = (0..dim).map(|_| rng.random_range(0.0..TAU)).collect();
    Ok(FeatureMap {
        frequencies,
        phases,
        scale: (2.0 / dim as f64).sqrt(),
        sigma,
        seed,
    })
}

impl FeatureMap {
    /// Number of features `D`.
    pub fn dim(&self) -> usize {
        self.frequencies.rows()
    }

    /// Input dimension `d`.
    pub fn input_dim(&self) -> usize {
        self.frequencies.cols()
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn frequencies(&self) -> &Matrix {
        &self.frequencies
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    /// `Ψ = ψ(X)`, a `D × n` matrix.
    pub fn apply(&self, x: &Matrix) -> Result<Matrix> {
        if x.rows() != self.input_dim() {
            return Err(Error::DimensionMismatch(format!(
                "feature map expects {}-dimensional inputs, got {}",
                self.input_dim(),
                x.rows()
            )));
        }
        let mut z = self.frequencies.matmul(x);
        for j in 0..z.cols() {
            for (v, b) in z.col_mut(j).iter_mut().zip(&self.phases) {
                *v = self.scale * (*v + b).cos();
            }
        }
        Ok(z)
    }
}
