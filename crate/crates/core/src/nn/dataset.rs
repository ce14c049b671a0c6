//! Row-major labelled datasets, the IDX reader and the Gaussian-blob
//! generator.

use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{rng_from_seed, NnError};

const IDX_IMAGES_MAGIC: u32 = 0x0000_0803;
const IDX_LABELS_MAGIC: u32 = 0x0000_0801;

/// Per-feature mean and population standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    features: Vec<f64>,
    n_features: usize,
    labels: Vec<usize>,
    n_classes: usize,
    stats: FeatureStats,
}

impl Dataset {
    /// `features` is row-major, `labels.len()` rows of `n_features` each.
    pub fn new(features: Vec<f64>, n_features: usize, labels: Vec<usize>, n_classes: usize) -> Result<Self, NnError> {
        if n_features == 0 || n_classes == 0 {
            return Err(NnError::InvalidDataset("zero features or classes".into()));
        }
        if features.len() != labels.len() * n_features {
            return Err(NnError::DimensionMismatch(format!(
                "{} feature values for {} samples of width {n_features}",
                features.len(),
                labels.len()
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= n_classes) {
            return Err(NnError::InvalidDataset(format!("label {bad} >= {n_classes} classes")));
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(NnError::InvalidDataset("non-finite feature value".into()));
        }
        let stats = compute_stats(&features, n_features);
        Ok(Dataset {
            features,
            n_features,
            labels,
            n_classes,
            stats,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    /// Statistics of the features as stored.
    pub fn stats(&self) -> &FeatureStats {
        &self.stats
    }

    /// Rows `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let mut features = Vec::with_capacity(indices.len() * self.n_features);
        for &i in indices {
            features.extend_from_slice(self.row(i));
        }
        let labels = indices.iter().map(|&i| self.labels[i]).collect();
        Dataset::new(features, self.n_features, labels, self.n_classes).expect("subset of a valid dataset is valid")
    }

    /// Splits each class independently, sending `round(val_fraction * n_c)`
    /// of its samples to the second set. Within-set order is ascending index.
    pub fn split_stratified(&self, val_fraction: f64, seed: u64) -> Result<(Dataset, Dataset), NnError> {
        if !(0.0..1.0).contains(&val_fraction) {
            return Err(NnError::InvalidConfig(format!(
                "validation fraction must be in [0, 1), got {val_fraction}"
            )));
        }
        let mut rng = rng_from_seed(seed);
        let mut train = Vec::new();
        let mut val = Vec::new();
        for class in 0..self.n_classes {
            let mut idx: Vec<usize> = (0..self.n_samples()).filter(|&i| self.labels[i] == class).collect();
            idx.shuffle(&mut rng);
            let k = (val_fraction * idx.len() as f64).round() as usize;
            val.extend_from_slice(&idx[..k]);
            train.extend_from_slice(&idx[k..]);
        }
        train.sort_unstable();
        val.sort_unstable();
        Ok((self.subset(&train), self.subset(&val)))
    }

    /// `(x - mean) / std` per feature; features with zero spread are only
    /// centred.
    pub fn standardized(&self, stats: &FeatureStats) -> Dataset {
        let mut features = self.features.clone();
        for row in features.chunks_exact_mut(self.n_features) {
            for ((v, &m), &s) in row.iter_mut().zip(&stats.mean).zip(&stats.std) {
                *v = if s > 0.0 { (*v - m) / s } else { *v - m };
            }
        }
        Dataset::new(features, self.n_features, self.labels.clone(), self.n_classes).expect("standardizing keeps shape")
    }

    /// Same samples with `features` replaced; used for noise injection.
    pub fn with_features(&self, features: Vec<f64>) -> Result<Dataset, NnError> {
        Dataset::new(features, self.n_features, self.labels.clone(), self.n_classes)
    }
}

fn compute_stats(features: &[f64], n_features: usize) -> FeatureStats {
    let n = features.len() / n_features;
    let mut mean = vec![0.0; n_features];
    let mut std = vec![0.0; n_features];
    if n == 0 {
        return FeatureStats { mean, std };
    }
    for row in features.chunks_exact(n_features) {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    for row in features.chunks_exact(n_features) {
        for ((s, v), m) in std.iter_mut().zip(row).zip(&mean) {
            *s += (v - m).powi(2);
        }
    }
    std.iter_mut().for_each(|s| *s = (*s / n as f64).sqrt());
    FeatureStats { mean, std }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlobConfig {
    pub n_classes: usize,
    pub dim: usize,
    pub per_class: usize,
    pub spread: f64,
}

impl Default for BlobConfig {
    fn default() -> Self {
        BlobConfig {
            n_classes: 10,
            dim: 32,
            per_class: 200,
            spread: 0.35,
        }
    }
}

/// Isotropic Gaussian clusters of standard deviation `spread` around
/// unit-norm random centres. Samples are interleaved by class: row
/// `j * n_classes + c` is the `j`-th sample of class `c`.
pub fn synth_blobs(seed: u64, cfg: BlobConfig) -> Result<Dataset, NnError> {
    if cfg.per_class < 2 {
        return Err(NnError::TooFewSamples(cfg.per_class));
    }
    if cfg.n_classes == 0 || cfg.dim == 0 || !(cfg.spread >= 0.0) {
        return Err(NnError::InvalidConfig(format!("bad blob configuration {cfg:?}")));
    }
    let mut rng = rng_from_seed(seed);
    let mut centres = Vec::with_capacity(cfg.n_classes * cfg.dim);
    for _ in 0..cfg.n_classes {
        let c: Vec<f64> = (0..cfg.dim).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
        centres.extend(c.into_iter().map(|v| v / norm));
    }
    let n = cfg.n_classes * cfg.per_class;
    let mut features = Vec::with_capacity(n * cfg.dim);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..cfg.per_class {
        for class in 0..cfg.n_classes {
            let centre = &centres[class * cfg.dim..(class + 1) * cfg.dim];
            for &c in centre {
                let z: f64 = StandardNormal.sample(&mut rng);
                features.push(c + cfg.spread * z);
            }
            labels.push(class);
        }
    }
    Dataset::new(features, cfg.dim, labels, cfg.n_classes)
}

struct IdxHeader {
    dims: Vec<usize>,
    payload_offset: usize,
}

fn read_idx_header(bytes: &[u8], expected_magic: u32, n_dims: usize) -> Result<IdxHeader, NnError> {
    let header_len = 4 + 4 * n_dims;
    if bytes.len() < 4 {
        return Err(NnError::TruncatedFile {
            expected: header_len,
            found: bytes.len(),
        });
    }
    let magic = u32::from_be_bytes(bytes[0..4].try_into().expect("4 bytes"));
    if magic != expected_magic {
        return Err(NnError::BadMagic {
            expected: expected_magic,
            found: magic,
        });
    }
    if bytes.len() < header_len {
        return Err(NnError::TruncatedFile {
            expected: header_len,
            found: bytes.len(),
        });
    }
    let dims = (0..n_dims)
        .map(|d| u32::from_be_bytes(bytes[4 + 4 * d..8 + 4 * d].try_into().expect("4 bytes")) as usize)
        .collect::<Vec<_>>();
    let payload: usize = dims.iter().product();
    if bytes.len() < header_len + payload {
        return Err(NnError::TruncatedFile {
            expected: header_len + payload,
            found: bytes.len(),
        });
    }
    Ok(IdxHeader {
        dims,
        payload_offset: header_len,
    })
}

/// Parses an IDX image/label pair held in memory. Pixels are scaled by
/// `1/255`; `n_classes` is one more than the largest label.
pub fn parse_idx(images: &[u8], labels: &[u8]) -> Result<Dataset, NnError> {
    let img = read_idx_header(images, IDX_IMAGES_MAGIC, 3)?;
    let lab = read_idx_header(labels, IDX_LABELS_MAGIC, 1)?;
    let (count, rows, cols) = (img.dims[0], img.dims[1], img.dims[2]);
    if count != lab.dims[0] {
        return Err(NnError::DimensionMismatch(format!(
            "{count} images but {} labels",
            lab.dims[0]
        )));
    }
    let n_features = rows * cols;
    let pixels = &images[img.payload_offset..img.payload_offset + count * n_features];
    let features = pixels.iter().map(|&p| f64::from(p) / 255.0).collect();
    let labels: Vec<usize> = labels[lab.payload_offset..lab.payload_offset + count]
        .iter()
        .map(|&l| usize::from(l))
        .collect();
    let n_classes = labels.iter().max().map_or(1, |m| m + 1);
    Dataset::new(features, n_features, labels, n_classes)
}

/// Reads an MNIST-family IDX pair from disk.
pub fn load_idx(images_path: impl AsRef<Path>, labels_path: impl AsRef<Path>) -> Result<Dataset, NnError> {
    let images = fs::read(images_path)?;
    let labels = fs::read(labels_path)?;
    parse_idx(&images, &labels)
}
