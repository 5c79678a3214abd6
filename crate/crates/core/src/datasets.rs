//! Labeled datasets: synthetic generators, CSV ingestion, `[0, 1]`
//! scaling and stratified train/test splits.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{DataError, Error, Result};
use crate::linalg::Matrix;

/// Standard deviation of each XOR cluster around its corner.
pub const XOR_CLUSTER_STD: f64 = 0.25;
/// Spiral jitter as a fraction of the largest radius.
pub const SPIRAL_JITTER: f64 = 0.05;
/// Spiral angles run over `[0, SPIRAL_TURN]`.
pub const SPIRAL_TURN: f64 = 3.0 * PI;
/// Radius offset: `r = SPIRAL_OFFSET + θ`, which keeps the two inner
/// endpoints apart.
pub const SPIRAL_OFFSET: f64 = PI / 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    /// `d × n`
    pub x: Matrix,
    /// Indices into `class_names`.
    pub labels: Vec<usize>,
    pub class_names: Vec<String>,
    pub feature_names: Option<Vec<String>>,
    pub provenance: String,
}

impl LabeledDataset {
    pub fn new(x: Matrix, labels: Vec<usize>, class_names: Vec<String>, provenance: impl Into<String>) -> Result<Self> {
        if x.cols() != labels.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} samples but {} labels",
                x.cols(),
                labels.len()
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&c| c >= class_names.len()) {
            return Err(Error::InvalidArgument(format!("label {bad} has no class name")));
        }
        Ok(LabeledDataset {
            x,
            labels,
            class_names,
            feature_names: None,
            provenance: provenance.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.x.rows()
    }

    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_classes()];
        for &c in &self.labels {
            counts[c] += 1;
        }
        counts
    }

    pub fn subset(&self, idx: &[usize]) -> LabeledDataset {
        LabeledDataset {
            x: self.x.select_columns(idx),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            class_names: self.class_names.clone(),
            feature_names: self.feature_names.clone(),
            provenance: self.provenance.clone(),
        }
    }

    /// Writes one sample per row, features first and the class name last.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let ser = |e: csv::Error| Error::Data(DataError::Serialize(e.to_string()));
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = match &self.feature_names {
            Some(names) => names.clone(),
            None => (0..self.dim()).map(|i| format!("x{i}")).collect(),
        };
        header.push("label".into());
        w.write_record(&header).map_err(ser)?;
        for j in 0..self.len() {
            let mut rec: Vec<String> = self.x.col(j).iter().map(|v| v.to_string()).collect();
            rec.push(self.class_names[self.labels[j]].clone());
            w.write_record(&rec).map_err(ser)?;
        }
        w.flush().map_err(|e| Error::Data(DataError::Serialize(e.to_string())))?;
        Ok(())
    }
}

fn append_noise(signal: &[Vec<f64>], noise_dims: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let cols: Vec<Vec<f64>> = signal
        .iter()
        .map(|s| {
            let mut c = s.clone();
            c.extend((0..noise_dims).map(|_| rng.random_range(0.0..1.0)));
            c
        })
        .collect();
    Matrix::from_columns(&cols)
}

/// Binary XOR: Gaussian clusters at `(±1, ±1)`, opposite corners sharing a
/// class, plus `noise_dims` uniform `[0, 1)` noise features.
pub fn gen_xor(n: usize, noise_dims: usize, seed: u64) -> Result<LabeledDataset> {
    if n < 4 {
        return Err(Error::InvalidArgument(format!("XOR needs n >= 4, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jitter = Normal::new(0.0, XOR_CLUSTER_STD).expect("valid std");
    // (corner, class): (+,+) and (−,−) are class 0.
    let corners = [((1.0, 1.0), 0), ((-1.0, -1.0), 0), ((1.0, -1.0), 1), ((-1.0, 1.0), 1)];
    let mut signal = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for (c, &((cx, cy), class)) in corners.iter().enumerate() {
        let size = n / 4 + usize::from(c < n % 4);
        for _ in 0..size {
            signal.push(vec![cx + jitter.sample(&mut rng), cy + jitter.sample(&mut rng)]);
            labels.push(class);
        }
    }
    let x = append_noise(&signal, noise_dims, &mut rng);
    LabeledDataset::new(
        x,
        labels,
        vec!["0".into(), "1".into()],
        format!("xor(n={n}, noise_dims={noise_dims}, seed={seed})"),
    )
}

/// Two interleaved Archimedean spiral arms, one per class.
///
/// Arm points sit at evenly spaced angles `θ ∈ [0, 3π]` with radius
/// `π/2 + θ`; the second arm is the first rotated by `π`. Each point gets
/// isotropic Gaussian jitter with std `jitter_frac · r_max`.
pub fn gen_spirals_with_jitter(n: usize, noise_dims: usize, jitter_frac: f64, seed: u64) -> Result<LabeledDataset> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("spirals need n >= 2, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r_max = SPIRAL_OFFSET + SPIRAL_TURN;
    let jitter = Normal::new(0.0, jitter_frac * r_max)
        .map_err(|e| Error::InvalidArgument(format!("jitter: {e}")))?;
    let mut signal = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for arm in 0..2 {
        let size = n / 2 + usize::from(arm < n % 2);
        for i in 0..size {
            let theta = if size > 1 {
                SPIRAL_TURN * i as f64 / (size - 1) as f64
            } else {
                0.0
            };
            let r = SPIRAL_OFFSET + theta;
            let phase = theta + PI * arm as f64;
            signal.push(vec![
                r * phase.cos() + jitter.sample(&mut rng),
                r * phase.sin() + jitter.sample(&mut rng),
            ]);
            labels.push(arm);
        }
    }
    let x = append_noise(&signal, noise_dims, &mut rng);
    LabeledDataset::new(
        x,
        labels,
        vec!["0".into(), "1".into()],
        format!("spirals(n={n}, noise_dims={noise_dims}, jitter={jitter_frac}, seed={seed})"),
    )
}

pub fn gen_spirals(n: usize, noise_dims: usize, seed: u64) -> Result<LabeledDataset> {
    gen_spirals_with_jitter(n, noise_dims, SPIRAL_JITTER, seed)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    Index(usize),
    Name(String),
}

impl std::str::FromStr for LabelColumn {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.trim().parse::<usize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) => LabelColumn::Name(s.trim().to_string()),
        })
    }
}

/// Reads a comma-separated file with one sample per row. The label column
/// may hold arbitrary strings; every other column must be numeric. A first
/// row with a non-numeric feature cell is taken as the header.
pub fn load_csv(path: impl AsRef<Path>, label_column: &LabelColumn) -> Result<LabeledDataset> {
    let path = path.as_ref();
    let pb = || PathBuf::from(path);
    let file = std::fs::File::open(path).map_err(|source| DataError::Io { path: pb(), source })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);

    let mut records = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|source| DataError::Csv { path: pb(), source })?;
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        records.push(rec);
    }
    let Some(first) = records.first() else {
        return Err(DataError::Empty { path: pb() }.into());
    };
    let arity = first.len();

    let is_numeric = |s: &str| s.parse::<f64>().is_ok_and(f64::is_finite);
    let header_candidate: Vec<String> = first.iter().map(str::to_string).collect();

    let label_idx = match label_column {
        LabelColumn::Index(i) if *i < arity => *i,
        LabelColumn::Index(i) => return Err(DataError::LabelColumn(format!("{i} (file has {arity} columns)")).into()),
        LabelColumn::Name(name) => header_candidate
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| DataError::LabelColumn(name.clone()))?,
    };
    let has_header = matches!(label_column, LabelColumn::Name(_))
        || header_candidate
            .iter()
            .enumerate()
            .any(|(j, s)| j != label_idx && !is_numeric(s));

    let data_rows = if has_header { &records[1..] } else { &records[..] };
    if data_rows.is_empty() {
        return Err(DataError::Empty { path: pb() }.into());
    }

    let d = arity - 1;
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(data_rows.len());
    let mut raw_labels = Vec::with_capacity(data_rows.len());
    let line_offset = usize::from(has_header) + 1;
    for (r, rec) in data_rows.iter().enumerate() {
        let row = r + line_offset;
        if rec.len() != arity {
            return Err(DataError::Ragged {
                path: pb(),
                row,
                expected: arity,
                found: rec.len(),
            }
            .into());
        }
        let mut col = Vec::with_capacity(d);
        for (j, cell) in rec.iter().enumerate() {
            if j == label_idx {
                raw_labels.push(cell.to_string());
                continue;
            }
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => col.push(v),
                _ => {
                    return Err(DataError::NonNumeric {
                        path: pb(),
                        row,
                        column: j,
                        value: cell.to_string(),
                    }
                    .into())
                }
            }
        }
        columns.push(col);
    }

    let class_names: Vec<String> = raw_labels.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let labels = raw_labels
        .iter()
        .map(|l| class_names.binary_search(l).expect("collected above"))
        .collect();
    let mut ds = LabeledDataset::new(Matrix::from_columns(&columns), labels, class_names, path.display().to_string())?;
    if d == 0 {
        return Err(Error::InvalidArgument("file has no feature columns".into()));
    }
    if has_header {
        ds.feature_names = Some(
            header_candidate
                .into_iter()
                .enumerate()
                .filter(|(j, _)| *j != label_idx)
                .map(|(_, h)| h)
                .collect(),
        );
    }
    Ok(ds)
}

/// Per-feature affine map onto `[0, 1]` learned from training data.
#[derive(Debug, Clone, PartialEq)]
pub struct MinMaxScaler {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl MinMaxScaler {
    pub fn fit(x: &Matrix) -> Self {
        let d = x.rows();
        let mut min = vec![f64::INFINITY; d];
        let mut max = vec![f64::NEG_INFINITY; d];
        for j in 0..x.cols() {
            for (i, &v) in x.col(j).iter().enumerate() {
                min[i] = min[i].min(v);
                max[i] = max[i].max(v);
            }
        }
        MinMaxScaler { min, max }
    }

    /// Constant features map to 0.5; values outside the fitted range clamp.
    pub fn transform(&self, x: &Matrix) -> Matrix {
        Matrix::from_fn(x.rows(), x.cols(), |i, j| {
            let (lo, hi) = (self.min[i], self.max[i]);
            if hi > lo {
                ((x.get(i, j) - lo) / (hi - lo)).clamp(0.0, 1.0)
            } else {
                0.5
            }
        })
    }
}

pub fn normalize01(train: &LabeledDataset, test: &LabeledDataset) -> Result<(LabeledDataset, LabeledDataset, MinMaxScaler)> {
    if train.is_empty() {
        return Err(Error::InvalidArgument("cannot normalize an empty training set".into()));
    }
    if train.dim() != test.dim() {
        return Err(Error::DimensionMismatch("train and test dimensions differ".into()));
    }
    let scaler = MinMaxScaler::fit(&train.x);
    let mut tr = train.clone();
    tr.x = scaler.transform(&train.x);
    let mut te = test.clone();
    te.x = scaler.transform(&test.x);
    Ok((tr, te, scaler))
}

#[derive(Debug, Clone)]
pub struct Split {
    pub train: LabeledDataset,
    pub test: LabeledDataset,
    pub warnings: Vec<String>,
}

/// Stratified random split: each class contributes
/// `round(fraction · n_c)` samples to training, kept within `1..n_c`.
/// A class with a single sample goes to training with a warning.
pub fn split(ds: &LabeledDataset, train_fraction: f64, seed: u64) -> Result<Split> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!("train fraction {train_fraction} outside (0, 1)")));
    }
    if ds.len() < 2 {
        return Err(Error::InvalidArgument("need at least 2 samples to split".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    let mut warnings = Vec::new();
    for class in 0..ds.num_classes() {
        let mut idx: Vec<usize> = (0..ds.len()).filter(|&i| ds.labels[i] == class).collect();
        if idx.is_empty() {
            continue;
        }
        idx.shuffle(&mut rng);
        let n_c = idx.len();
        let n_train = if n_c == 1 {
            warnings.push(format!("class {:?} has a single sample; kept in training", ds.class_names[class]));
            1
        } else {
            ((train_fraction * n_c as f64).round() as usize).clamp(1, n_c - 1)
        };
        train.extend_from_slice(&idx[..n_train]);
        test.extend_from_slice(&idx[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(Split {
        train: ds.subset(&train),
        test: ds.subset(&test),
        warnings,
    })
}
