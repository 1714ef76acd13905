use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{assign_bins, Skipped};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::filters::FilterInstance;
use crate::raster::{gradient_magnitude, GradientField, ImageF};

pub const PROFILE_BINS: usize = 100;
/// Parameter steps; the profile samples `PROFILE_STEPS + 1` values.
pub const PROFILE_STEPS: usize = 10;

/// Per-bin SO over a uniform parameter sweep, averaged over a corpus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileMatrix {
    pub filter_id: String,
    pub params: Vec<f64>,
    /// `values[p][b]`: SO of bin `b` at `params[p]`.
    pub values: Vec<Vec<f64>>,
    pub contributing: usize,
    pub skipped: Vec<Skipped>,
}

impl ProfileMatrix {
    pub const CSV_HEADER: [&'static str; 5] = ["filter_id", "param_index", "param", "bin", "so"];

    pub fn csv_records(&self) -> Vec<[String; 5]> {
        let mut rows = Vec::with_capacity(self.params.len() * PROFILE_BINS);
        for (p, (param, row)) in self.params.iter().zip(&self.values).enumerate() {
            for (b, v) in row.iter().enumerate() {
                rows.push([
                    self.filter_id.clone(),
                    p.to_string(),
                    param.to_string(),
                    b.to_string(),
                    v.to_string(),
                ]);
            }
        }
        rows
    }
}

/// The sampled parameters `0, max/10, ..., max`.
pub fn profile_params(max: f64) -> Vec<f64> {
    (0..=PROFILE_STEPS)
        .map(|i| max * i as f64 / PROFILE_STEPS as f64)
        .collect()
}

/// SO restricted to each bin's pixels. A bin whose original gradients sum
/// to zero counts as untouched (1).
pub fn binned_so(original: &GradientField, smoothed: &GradientField, bins: &[usize], n_bins: usize) -> Vec<f64> {
    let mut num = vec![0.0; n_bins];
    let mut den = vec![0.0; n_bins];
    for ((gi, gj), b) in original.mag().iter().zip(smoothed.mag()).zip(bins) {
        num[*b] += gj;
        den[*b] += gi;
    }
    num.iter()
        .zip(&den)
        .map(|(n, d)| if *d < 1e-12 { 1.0 } else { n / d })
        .collect()
}

/// Profile rows of a single image.
pub fn image_profile(filter: &FilterInstance, image: &ImageF) -> Result<Vec<Vec<f64>>> {
    profile_params(filter.param_max())
        .into_iter()
        .map(|p| profile_row(filter, image, p))
        .collect()
}

fn profile_row(filter: &FilterInstance, image: &ImageF, param: f64) -> Result<Vec<f64>> {
    if param == 0.0 {
        return Ok(vec![1.0; PROFILE_BINS]);
    }
    let original = gradient_magnitude(image);
    let bins = assign_bins(&original, PROFILE_BINS);
    let out = filter.apply(image, param)?;
    Ok(binned_so(&original, &gradient_magnitude(&out), &bins, PROFILE_BINS))
}

/// Elimination profile of `filter` over `corpus`. Bins are assigned per
/// image from its own gradient magnitudes; per-image matrices are averaged
/// in corpus order. Images on which the filter fails are skipped.
pub fn elimination_profile(filter: &FilterInstance, corpus: &Corpus) -> Result<ProfileMatrix> {
    let params = profile_params(filter.param_max());
    let tasks: Vec<(usize, usize)> = (0..corpus.len())
        .flat_map(|i| (0..params.len()).map(move |p| (i, p)))
        .collect();
    let rows: Vec<Result<Vec<f64>>> = tasks
        .par_iter()
        .map(|&(i, p)| profile_row(filter, &corpus.images()[i], params[p]))
        .collect();

    let mut sum = vec![vec![0.0; PROFILE_BINS]; params.len()];
    let mut contributing = 0;
    let mut skipped = Vec::new();
    for (i, chunk) in rows.chunks(params.len()).enumerate() {
        if let Some(e) = chunk.iter().find_map(|r| r.as_ref().err()) {
            skipped.push(Skipped::new(&corpus.names()[i], filter.id(), e));
            continue;
        }
        for (acc, row) in sum.iter_mut().zip(chunk) {
            let row = row.as_ref().expect("checked above");
            acc.iter_mut().zip(row).for_each(|(a, v)| *a += v);
        }
        contributing += 1;
    }
    if contributing == 0 {
        return Err(Error::EmptyCorpus(format!(
            "filter `{}` failed on every image",
            filter.id()
        )));
    }
    let n = contributing as f64;
    let values = sum
        .into_iter()
        .map(|row| row.into_iter().map(|v| v / n).collect())
        .collect();
    Ok(ProfileMatrix {
        filter_id: filter.id().to_string(),
        params,
        values,
        contributing,
        skipped,
    })
}
