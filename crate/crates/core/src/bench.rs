//! Repeated split/normalize/fit/score runs over methods and embedding
//! dimensions, with wall-clock timings.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::datasets::{normalize01, split, LabeledDataset};
use crate::embeddings::{self, DataBackend, LabelFactor, Method, Model};
use crate::error::{DataError, Error, Result};
use crate::eval::one_nn_accuracy;
use crate::kernels::{default_sigma_grid, delta_gram, select_sigma_cv, CvEmbedding, KernelSpec};
use crate::rff::sample_map;

/// Default number of random features for the data kernel.
pub const DEFAULT_KX: usize = 1000;
/// Default RBF bandwidth standing in for the delta label kernel.
pub const DEFAULT_SIGMA_Y: f64 = 1e-10;
pub const DEFAULT_CV_FOLDS: usize = 10;
pub const DEFAULT_TRAIN_FRACTION: f64 = 0.7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SigmaSetting {
    Fixed(f64),
    /// Cross-validated over the median-heuristic grid.
    Cv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PsiBackend {
    /// RFF of an RBF with bandwidth `sigma_y` on one-hot labels.
    Rff,
    /// Exact eigen-based factor of the delta kernel.
    Exact,
}

#[derive(Debug, Clone, Serialize)]
pub struct EmbedParams {
    pub sigma_x: SigmaSetting,
    pub sigma_y: f64,
    pub kx: usize,
    pub psi_backend: PsiBackend,
    pub cv_folds: usize,
}

impl Default for EmbedParams {
    fn default() -> Self {
        EmbedParams {
            sigma_x: SigmaSetting::Cv,
            sigma_y: DEFAULT_SIGMA_Y,
            kx: DEFAULT_KX,
            psi_backend: PsiBackend::Rff,
            cv_folds: DEFAULT_CV_FOLDS,
        }
    }
}

/// SplitMix64 step, used to derive independent seeds from a master seed.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one benchmark repeat. `embed` uses repeat 0, so a single embedding
/// run reproduces the first repeat of a benchmark with the same master seed.
pub fn repeat_seed(master: u64, repeat: usize) -> u64 {
    derive_seed(master, STREAM_REPEAT + repeat as u64)
}

const STREAM_PSI_Y: u64 = 1;
const STREAM_PSI_X: u64 = 2;
const STREAM_CV: u64 = 3;
const STREAM_REPEAT: u64 = 0x100;

/// Why `method` cannot embed `train` into `k` dimensions, if it cannot.
pub fn infeasibility(method: Method, k: usize, d: usize, n: usize) -> Option<String> {
    if k == 0 {
        Some("k must be at least 1".into())
    } else if method.is_linear() && k > d {
        Some(format!("k = {k} exceeds d = {d}"))
    } else if k > n {
        Some(format!("k = {k} exceeds n = {n}"))
    } else {
        None
    }
}

/// Resolves the data-kernel bandwidth of `method` for a training set.
/// Under cross-validation each kernel method scores candidates with its own
/// embedding, including the same data-kernel backend it will be fitted with.
pub fn resolve_sigma_x(train: &LabeledDataset, params: &EmbedParams, method: Method, seed: u64) -> Result<f64> {
    match params.sigma_x {
        SigmaSetting::Fixed(s) => KernelSpec::rbf(s).map(|_| s),
        SigmaSetting::Cv => {
            let embedding = match method {
                Method::Ksrp => CvEmbedding::Ksrp {
                    sigma_y: params.sigma_y,
                    kx: Some(params.kx),
                },
                Method::KsrpExact => CvEmbedding::Ksrp {
                    sigma_y: params.sigma_y,
                    kx: None,
                },
                _ => CvEmbedding::Kspca,
            };
            let folds = params.cv_folds.min(train.len());
            let grid = default_sigma_grid(&train.x);
            select_sigma_cv(&train.x, &train.labels, folds, &grid, embedding, derive_seed(seed, STREAM_CV))
        }
    }
}

/// Fits one method on a (normalized) training set. Label-kernel and
/// label-factor construction are charged to the kernel phase.
pub fn fit_method(method: Method, train: &LabeledDataset, k: usize, sigma_x: f64, params: &EmbedParams, seed: u64) -> Result<Model> {
    if let Some(reason) = infeasibility(method, k, train.dim(), train.len()) {
        return Err(Error::InvalidArgument(reason));
    }
    let x = &train.x;
    let classes = train.num_classes();
    let label_backend = match params.psi_backend {
        PsiBackend::Rff => LabelFactor::Rff {
            sigma: params.sigma_y,
            seed: derive_seed(seed, STREAM_PSI_Y),
        },
        PsiBackend::Exact => LabelFactor::Exact,
    };

    let t = Instant::now();
    let mut model = match method {
        Method::Pca => embeddings::fit_pca(x, k)?,
        Method::Spca => {
            let l = delta_gram(&train.labels);
            embeddings::fit_spca(x, &l, k)?
        }
        Method::Kspca => {
            let l = delta_gram(&train.labels);
            embeddings::fit_kspca(x, KernelSpec::rbf(sigma_x)?, &l, k)?
        }
        Method::Srp => {
            let psi_y = embeddings::label_factor(&train.labels, classes, k, label_backend)?;
            embeddings::fit_srp(x, &psi_y)?
        }
        Method::Ksrp => {
            let psi_y = embeddings::label_factor(&train.labels, classes, k, label_backend)?;
            let map = sample_map(sigma_x, x.rows(), params.kx, derive_seed(seed, STREAM_PSI_X))?;
            embeddings::fit_ksrp(x, DataBackend::Features(map), &psi_y)?
        }
        Method::KsrpExact => {
            let psi_y = embeddings::label_factor(&train.labels, classes, k, label_backend)?;
            embeddings::fit_ksrp(x, DataBackend::Exact(KernelSpec::rbf(sigma_x)?), &psi_y)?
        }
    };
    let total = t.elapsed().as_nanos() as u64;
    let info = model_info_mut(&mut model);
    // Whatever happened outside the solver (label kernel, Ψ_Y) counts as kernel construction.
    info.kernel_ns = total.saturating_sub(info.solve_ns).max(1);
    Ok(model)
}

fn model_info_mut(model: &mut Model) -> &mut embeddings::FitInfo {
    use embeddings::KernelModel as K;
    match model {
        Model::Linear(m) => &mut m.info,
        Model::Kernel(K::Kspca { info, .. } | K::KsrpExact { info, .. } | K::KsrpFeatures { info, .. }) => info,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchConfig {
    pub methods: Vec<Method>,
    pub ks: Vec<usize>,
    pub repeats: usize,
    pub seed: u64,
    pub train_fraction: f64,
    pub params: EmbedParams,
    /// Run repeats concurrently. Timings are then flagged as contended.
    pub parallel: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            methods: vec![Method::Spca, Method::Srp, Method::Kspca, Method::Ksrp],
            ks: vec![2],
            repeats: 30,
            seed: 0,
            train_fraction: DEFAULT_TRAIN_FRACTION,
            params: EmbedParams::default(),
            parallel: false,
        }
    }
}

/// One (method, k, repeat) measurement.
#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub method: Method,
    pub k: usize,
    pub repeat: usize,
    pub seed: u64,
    pub sigma_x: f64,
    pub accuracy: f64,
    pub fit_ns: u64,
    pub kernel_ns: u64,
    pub solve_ns: u64,
    pub transform_ns: u64,
    pub contended: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Skipped {
    pub method: Method,
    pub k: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Aggregate {
    pub method: Method,
    pub k: usize,
    pub runs: usize,
    pub accuracy_mean: f64,
    pub accuracy_std: f64,
    pub fit_ms_mean: f64,
    pub fit_ms_std: f64,
    pub kernel_ms_mean: f64,
    pub solve_ms_mean: f64,
    pub transform_ms_mean: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub dataset: String,
    pub n: usize,
    pub d: usize,
    pub config: BenchConfig,
    pub rows: Vec<BenchRow>,
    pub skipped: Vec<Skipped>,
    pub aggregates: Vec<Aggregate>,
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.clone().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

fn ms(ns: u64) -> f64 {
    ns as f64 / 1e6
}

fn run_repeat(ds: &LabeledDataset, cfg: &BenchConfig, repeat: usize) -> Result<Vec<BenchRow>> {
    let seed = repeat_seed(cfg.seed, repeat);
    let parts = split(ds, cfg.train_fraction, seed)?;
    let (train, test, _) = normalize01(&parts.train, &parts.test)?;

    // Bandwidth selection is shared preprocessing and stays outside the timed section.
    let mut sigmas = BTreeMap::new();
    for &method in &cfg.methods {
        if method.uses_data_kernel() && cfg.ks.iter().any(|&k| infeasibility(method, k, train.dim(), train.len()).is_none()) {
            sigmas.insert(method.name(), resolve_sigma_x(&train, &cfg.params, method, seed)?);
        }
    }

    let mut rows = Vec::new();
    for &method in &cfg.methods {
        for &k in &cfg.ks {
            if infeasibility(method, k, train.dim(), train.len()).is_some() {
                continue;
            }
            let sigma_x = sigmas.get(method.name()).copied().unwrap_or(f64::NAN);
            let t = Instant::now();
            let model = fit_method(method, &train, k, sigma_x, &cfg.params, seed)?;
            let fit_ns = (t.elapsed().as_nanos() as u64).max(1);
            let t = Instant::now();
            let z_test = model.transform(&test.x)?;
            let transform_ns = (t.elapsed().as_nanos() as u64).max(1);
            let accuracy = one_nn_accuracy(model.training_embedding(), &train.labels, &z_test, &test.labels)?;
            let info = model.info();
            rows.push(BenchRow {
                method,
                k,
                repeat,
                seed,
                sigma_x,
                accuracy,
                fit_ns,
                kernel_ns: info.kernel_ns,
                solve_ns: info.solve_ns,
                transform_ns,
                contended: cfg.parallel,
            });
        }
    }
    Ok(rows)
}

/// Runs every feasible (method, k) pair on `repeats` fresh stratified
/// splits. Accuracies are a deterministic function of the dataset and
/// configuration; timings cover fit and transform only.
pub fn run_benchmark(ds: &LabeledDataset, cfg: &BenchConfig) -> Result<BenchReport> {
    if cfg.repeats == 0 {
        return Err(Error::InvalidArgument("repeats must be at least 1".into()));
    }
    if cfg.methods.is_empty() || cfg.ks.is_empty() {
        return Err(Error::InvalidArgument("need at least one method and one k".into()));
    }
    // Feasibility depends only on the training-set size, which the stratified
    // split fixes independently of the seed.
    let probe = split(ds, cfg.train_fraction, cfg.seed)?;
    let mut skipped = Vec::new();
    for &method in &cfg.methods {
        for &k in &cfg.ks {
            if let Some(reason) = infeasibility(method, k, ds.dim(), probe.train.len()) {
                skipped.push(Skipped { method, k, reason });
            }
        }
    }

    let per_repeat: Vec<Result<Vec<BenchRow>>> = if cfg.parallel {
        (0..cfg.repeats).into_par_iter().map(|r| run_repeat(ds, cfg, r)).collect()
    } else {
        (0..cfg.repeats).map(|r| run_repeat(ds, cfg, r)).collect()
    };
    let mut rows = Vec::new();
    for r in per_repeat {
        rows.extend(r?);
    }

    let mut groups: BTreeMap<(Method, usize), Vec<&BenchRow>> = BTreeMap::new();
    for row in &rows {
        groups.entry((row.method, row.k)).or_default().push(row);
    }
    let aggregates = groups
        .into_iter()
        .map(|((method, k), g)| {
            let (accuracy_mean, accuracy_std) = mean_std(g.iter().map(|r| r.accuracy));
            let (fit_ms_mean, fit_ms_std) = mean_std(g.iter().map(|r| ms(r.fit_ns)));
            Aggregate {
                method,
                k,
                runs: g.len(),
                accuracy_mean,
                accuracy_std,
                fit_ms_mean,
                fit_ms_std,
                kernel_ms_mean: mean_std(g.iter().map(|r| ms(r.kernel_ns))).0,
                solve_ms_mean: mean_std(g.iter().map(|r| ms(r.solve_ns))).0,
                transform_ms_mean: mean_std(g.iter().map(|r| ms(r.transform_ns))).0,
            }
        })
        .collect();

    Ok(BenchReport {
        dataset: ds.provenance.clone(),
        n: ds.len(),
        d: ds.dim(),
        config: cfg.clone(),
        rows,
        skipped,
        aggregates,
    })
}

impl BenchReport {
    pub fn aggregate(&self, method: Method, k: usize) -> Option<&Aggregate> {
        self.aggregates.iter().find(|a| a.method == method && a.k == k)
    }

    /// One row per (method, k, repeat).
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let ser = |e: csv::Error| Error::Data(DataError::Serialize(e.to_string()));
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row).map_err(ser)?;
        }
        w.flush().map_err(|e| Error::Data(DataError::Serialize(e.to_string())))
    }

    /// Aggregates, skipped combinations and the configuration as JSON.
    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        #[derive(Serialize)]
        struct Summary<'a> {
            dataset: &'a str,
            n: usize,
            d: usize,
            config: &'a BenchConfig,
            aggregates: &'a [Aggregate],
            skipped: &'a [Skipped],
        }
        let doc = Summary {
            dataset: &self.dataset,
            n: self.n,
            d: self.d,
            config: &self.config,
            aggregates: &self.aggregates,
            skipped: &self.skipped,
        };
        serde_json::to_writer_pretty(out, &doc).map_err(|e| Error::Data(DataError::Serialize(e.to_string())))
    }
}
