use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Skipped;
use crate::corpus::Corpus;
use crate::equivalency::Matcher;
use crate::error::{Error, Result};
use crate::filters::FilterInstance;
use crate::metrics::ssim;

/// Symmetric matrix of pairwise distances between filters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    pub ids: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl DistanceMatrix {
    /// Builds a matrix from its strict upper triangle in row order.
    pub fn from_upper(ids: Vec<String>, upper: &[f64]) -> Self {
        let n = ids.len();
        assert_eq!(upper.len(), n * n.saturating_sub(1) / 2, "upper triangle length");
        // Position of (i, j), i < j, in the row-ordered upper triangle.
        let at = |i: usize, j: usize| i * n - i * (i + 1) / 2 + (j - i - 1);
        let values = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| match i.cmp(&j) {
                        std::cmp::Ordering::Less => upper[at(i, j)],
                        std::cmp::Ordering::Greater => upper[at(j, i)],
                        std::cmp::Ordering::Equal => 0.0,
                    })
                    .collect()
            })
            .collect();
        Self { ids, values }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }
}

/// Distances at one smoothing level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelDistances {
    pub level: f64,
    pub matrix: DistanceMatrix,
    /// Images on which every filter settled at this level.
    pub contributing: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterResult {
    /// Levels at which at least one image contributed.
    pub levels: Vec<LevelDistances>,
    /// Levels dropped because no image contributed.
    pub empty_levels: Vec<f64>,
    pub skipped: Vec<Skipped>,
}

impl ClusterResult {
    pub const CSV_HEADER: [&'static str; 5] = ["level", "filter_a", "filter_b", "distance", "contributing"];

    pub fn csv_records(&self) -> Vec<[String; 5]> {
        let mut rows = Vec::new();
        for l in &self.levels {
            let m = &l.matrix;
            for i in 0..m.len() {
                for j in 0..m.len() {
                    rows.push([
                        l.level.to_string(),
                        m.ids[i].clone(),
                        m.ids[j].clone(),
                        m.get(i, j).to_string(),
                        l.contributing.to_string(),
                    ]);
                }
            }
        }
        rows
    }
}

/// Pairwise `1 - SSIM` of the matched outputs of one image, strict upper
/// triangle in row order, per level. `None` where some filter did not
/// settle.
fn image_similarities(filters: &[FilterInstance], image: &crate::raster::ImageF, levels: &[f64]) -> Result<Vec<Option<Vec<f64>>>> {
    let mut matchers: Vec<Matcher> = filters.iter().map(|f| Matcher::new(f, image)).collect();
    let mut per_level = Vec::with_capacity(levels.len());
    for &level in levels {
        let mut outputs = Vec::with_capacity(filters.len());
        let mut settled = true;
        for m in &mut matchers {
            let (result, out) = m.find_with_output(level)?;
            settled &= result.settled();
            outputs.push(out);
        }
        if !settled {
            per_level.push(None);
            continue;
        }
        let mut upper = Vec::new();
        for i in 0..outputs.len() {
            for j in i + 1..outputs.len() {
                upper.push(ssim(&outputs[i], &outputs[j])?);
            }
        }
        per_level.push(Some(upper));
    }
    Ok(per_level)
}

/// SSIM distance matrices between equivalently smoothed outputs:
/// `D[i][j] = 1 - mean SSIM(J_i, J_j)` over the images on which all filters
/// settled at that level.
pub fn ssim_distance_matrix(filters: &[FilterInstance], corpus: &Corpus, levels: &[f64]) -> Result<ClusterResult> {
    if filters.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "clustering needs at least 2 filters, got {}",
            filters.len()
        )));
    }
    let ids: Vec<String> = filters.iter().map(|f| f.id().to_string()).collect();
    let per_image: Vec<Result<Vec<Option<Vec<f64>>>>> = corpus
        .images()
        .par_iter()
        .map(|img| image_similarities(filters, img, levels))
        .collect();

    let mut skipped = Vec::new();
    let mut usable = Vec::new();
    for (name, r) in corpus.names().iter().zip(per_image) {
        match r {
            Ok(v) => usable.push(v),
            Err(e) => skipped.push(Skipped::new(name, &ids.join(","), &e)),
        }
    }

    let pairs = ids.len() * (ids.len() - 1) / 2;
    let mut out = Vec::new();
    let mut empty_levels = Vec::new();
    for (k, &level) in levels.iter().enumerate() {
        let mut sum = vec![0.0; pairs];
        let mut n = 0usize;
        for image in &usable {
            if let Some(s) = &image[k] {
                sum.iter_mut().zip(s).for_each(|(a, v)| *a += v);
                n += 1;
            }
        }
        if n == 0 {
            log::warn!("level {level}: no image where every filter matched; level skipped");
            empty_levels.push(level);
            continue;
        }
        let upper: Vec<f64> = sum.iter().map(|s| (1.0 - s / n as f64).max(0.0)).collect();
        out.push(LevelDistances {
            level,
            matrix: DistanceMatrix::from_upper(ids.clone(), &upper),
            contributing: n,
        });
    }
    Ok(ClusterResult {
        levels: out,
        empty_levels,
        skipped,
    })
}

/// Planar (or `dims`-dimensional) coordinates reproducing a distance
/// matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Embedding {
    pub ids: Vec<String>,
    /// One row of `dims` coordinates per id.
    pub coords: Vec<Vec<f64>>,
    /// Share of the spectrum of the centered Gram matrix that the embedding
    /// cannot represent: clamped negative eigenvalues and dropped positive
    /// ones, relative to the sum of absolute eigenvalues. 0 for exactly
    /// embeddable distances.
    pub distortion: f64,
}

impl Embedding {
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.coords[i]
            .iter()
            .zip(&self.coords[j])
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// Classical (Torgerson) multidimensional scaling.
///
/// Double-centers the squared distances, keeps the top `dims` eigenpairs
/// with eigenvalues clamped at zero and scales eigenvectors by the root of
/// their eigenvalue. Each axis is oriented so that its first nonzero
/// coordinate is positive.
pub fn classical_mds(d: &DistanceMatrix, dims: usize) -> Embedding {
    let n = d.len();
    if n == 0 {
        return Embedding {
            ids: Vec::new(),
            coords: Vec::new(),
            distortion: 0.0,
        };
    }
    let sq = DMatrix::from_fn(n, n, |i, j| d.get(i, j).powi(2));
    let row_means: Vec<f64> = (0..n).map(|i| sq.row(i).sum() / n as f64).collect();
    let grand = row_means.iter().sum::<f64>() / n as f64;
    let b = DMatrix::from_fn(n, n, |i, j| -0.5 * (sq[(i, j)] - row_means[i] - row_means[j] + grand));
    let eig = SymmetricEigen::new(b);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));

    let total: f64 = eig.eigenvalues.iter().map(|v| v.abs()).sum();
    let kept: f64 = order.iter().take(dims).map(|&k| eig.eigenvalues[k].max(0.0)).sum();
    let distortion = if total > 0.0 { (total - kept) / total } else { 0.0 };

    let scale = eig.eigenvalues.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1.0);
    let mut coords = vec![vec![0.0; dims]; n];
    for (axis, &k) in order.iter().take(dims).enumerate() {
        let lambda = eig.eigenvalues[k];
        if lambda <= 1e-14 * scale {
            continue;
        }
        let v = eig.eigenvectors.column(k);
        let sign = v
            .iter()
            .find(|x| x.abs() > 1e-12)
            .map_or(1.0, |x| x.signum());
        let s = sign * lambda.sqrt();
        for (i, row) in coords.iter_mut().enumerate() {
            row[axis] = s * v[i];
        }
    }
    Embedding {
        ids: d.ids.clone(),
        coords,
        distortion,
    }
}
