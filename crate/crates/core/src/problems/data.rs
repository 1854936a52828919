//! Deterministic synthetic datasets and their CSV interchange format.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Synthetic data generator family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataKind {
    TwoGaussians,
    TwoMoons,
    MulticlassBlobs,
}

impl DataKind {
    fn name(self) -> &'static str {
        match self {
            DataKind::TwoGaussians => "two_gaussians",
            DataKind::TwoMoons => "two_moons",
            DataKind::MulticlassBlobs => "multiclass_blobs",
        }
    }
}

/// An `n x d` feature matrix with one label per row, reproducible from its
/// seed alone.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub n: usize,
    pub d: usize,
    /// Row-major features, length `n * d`.
    pub features: Vec<f64>,
    /// Class indices (or reals), length `n`.
    pub labels: Vec<f64>,
    pub seed: u64,
}

impl Dataset {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.d..(i + 1) * self.d]
    }

    /// Number of distinct integer class labels, assuming labels `0..c`.
    pub fn num_classes(&self) -> usize {
        self.labels.iter().fold(0.0f64, |a, &b| a.max(b)) as usize + 1
    }

    /// `kind_n_d_noise_seed.csv`
    pub fn default_filename(kind: DataKind, n: usize, d: usize, noise: f64, seed: u64) -> String {
        format!("{}_{}_{}_{}_{}.csv", kind.name(), n, d, noise, seed)
    }

    /// Write as CSV with a one-line header: feature columns then label.
    pub fn to_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        for j in 0..self.d {
            out.push_str(&format!("x{j},"));
        }
        out.push_str("label\n");
        for i in 0..self.n {
            for j in 0..self.d {
                out.push_str(&format!("{},", self.features[i * self.d + j]));
            }
            out.push_str(&format!("{}\n", self.labels[i]));
        }
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
    }

    /// Read back a dataset written by [`Dataset::to_csv`]. The seed is not
    /// stored in the file; pass the one from the filename convention.
    pub fn from_csv(path: &Path, seed: u64) -> Result<Dataset> {
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut lines = BufReader::new(f).lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::parse("empty dataset file"))?
            .map_err(|e| Error::io(path, e))?;
        let cols: Vec<&str> = header.split(',').collect();
        if cols.last() != Some(&"label") || cols.len() < 2 {
            return Err(Error::parse(format!("unexpected dataset header: {header}")));
        }
        let d = cols.len() - 1;
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for line in lines {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != d + 1 {
                return Err(Error::parse(format!("row has {} fields, want {}", fields.len(), d + 1)));
            }
            for v in &fields[..d] {
                features.push(
                    v.parse::<f64>()
                        .map_err(|e| Error::parse(format!("bad feature {v:?}: {e}")))?,
                );
            }
            labels.push(
                fields[d]
                    .parse::<f64>()
                    .map_err(|e| Error::parse(format!("bad label {:?}: {e}", fields[d])))?,
            );
        }
        Ok(Dataset {
            n: labels.len(),
            d,
            features,
            labels,
            seed,
        })
    }
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Generate a class-balanced synthetic dataset, a pure function of its
/// arguments.
pub fn make_synthetic_data(
    kind: DataKind,
    n: usize,
    d: usize,
    noise: f64,
    seed: u64,
) -> Result<Dataset> {
    if n < 2 || d < 2 {
        return Err(Error::domain("synthetic data requires n >= 2 and d >= 2"));
    }
    if !noise.is_finite() || noise < 0.0 {
        return Err(Error::domain("noise must be finite and >= 0"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut features = vec![0.0; n * d];
    let mut labels = vec![0.0; n];
    match kind {
        DataKind::TwoGaussians => {
            let mean = 1.5 / (d as f64).sqrt();
            for i in 0..n {
                let class = i % 2;
                labels[i] = class as f64;
                let sign = if class == 0 { -1.0 } else { 1.0 };
                for j in 0..d {
                    features[i * d + j] = sign * mean + noise * standard_normal(&mut rng);
                }
            }
        }
        DataKind::TwoMoons => {
            // Two interleaved half circles centered at the origin; extra
            // dimensions beyond the first two carry noise only.
            for i in 0..n {
                let class = i % 2;
                labels[i] = class as f64;
                let angle = rng.gen_range(0.0..std::f64::consts::PI);
                let (x, y) = (angle.cos() - 0.5, angle.sin() - 0.25);
                let (x, y) = if class == 0 { (x, y) } else { (-x, -y) };
                features[i * d] = x + noise * standard_normal(&mut rng);
                features[i * d + 1] = y + noise * standard_normal(&mut rng);
                for j in 2..d {
                    features[i * d + j] = noise * standard_normal(&mut rng);
                }
            }
        }
        DataKind::MulticlassBlobs => {
            // Three blobs on a circle of radius 2 in the first two dimensions.
            for i in 0..n {
                let class = i % 3;
                labels[i] = class as f64;
                let angle = 2.0 * std::f64::consts::PI * class as f64 / 3.0;
                features[i * d] = 2.0 * angle.cos() + noise * standard_normal(&mut rng);
                features[i * d + 1] = 2.0 * angle.sin() + noise * standard_normal(&mut rng);
                for j in 2..d {
                    features[i * d + j] = noise * standard_normal(&mut rng);
                }
            }
        }
    }
    Ok(Dataset {
        n,
        d,
        features,
        labels,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_is_bitwise_identical() {
        let a = make_synthetic_data(DataKind::TwoMoons, 50, 3, 0.1, 42).unwrap();
        let b = make_synthetic_data(DataKind::TwoMoons, 50, 3, 0.1, 42).unwrap();
        assert_eq!(a, b);
        let c = make_synthetic_data(DataKind::TwoMoons, 50, 3, 0.1, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn two_gaussians_zero_noise_sits_at_means() {
        let ds = make_synthetic_data(DataKind::TwoGaussians, 10, 4, 0.0, 7).unwrap();
        let mean = 1.5 / 4.0f64.sqrt();
        for i in 0..ds.n {
            let sign = if ds.labels[i] == 0.0 { -1.0 } else { 1.0 };
            for j in 0..ds.d {
                assert_eq!(ds.row(i)[j], sign * mean);
            }
        }
    }

    #[test]
    fn classes_balanced_within_one() {
        for kind in [DataKind::TwoGaussians, DataKind::TwoMoons, DataKind::MulticlassBlobs] {
            let ds = make_synthetic_data(kind, 25, 2, 0.05, 1).unwrap();
            let c = ds.num_classes();
            let mut counts = vec![0usize; c];
            for &l in &ds.labels {
                counts[l as usize] += 1;
            }
            let max = counts.iter().max().unwrap();
            let min = counts.iter().min().unwrap();
            assert!(max - min <= 1, "{kind:?}: {counts:?}");
        }
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let ds = make_synthetic_data(DataKind::MulticlassBlobs, 21, 3, 0.3, 99).unwrap();
        let path = dir
            .path()
            .join(Dataset::default_filename(DataKind::MulticlassBlobs, 21, 3, 0.3, 99));
        assert_eq!(
            path.file_name().unwrap().to_str().unwrap(),
            "multiclass_blobs_21_3_0.3_99.csv"
        );
        ds.to_csv(&path).unwrap();
        let back = Dataset::from_csv(&path, 99).unwrap();
        assert_eq!(ds, back);
    }

    #[test]
    fn rejects_degenerate_sizes() {
        assert!(make_synthetic_data(DataKind::TwoMoons, 1, 2, 0.1, 0).is_err());
        assert!(make_synthetic_data(DataKind::TwoMoons, 10, 1, 0.1, 0).is_err());
    }
}
