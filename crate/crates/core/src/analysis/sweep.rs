use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Skipped;
use crate::corpus::Corpus;
use crate::equivalency::{baseline_levels, Matcher, MatchResult};
use crate::error::Result;
use crate::filters::FilterInstance;

/// One match of the baseline sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepMatch {
    pub image: String,
    #[serde(flatten)]
    pub result: MatchResult,
}

/// Per-level aggregate over the corpus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepLevel {
    pub target: f64,
    pub mean_normalized_param: f64,
    /// Population variance of the normalized parameter.
    pub param_variance: f64,
    pub mean_deviation: f64,
    pub converged: usize,
    pub total: usize,
}

/// Baseline sweep of one filter: all matches plus ten per-level rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub filter_id: String,
    pub matches: Vec<SweepMatch>,
    pub levels: Vec<SweepLevel>,
    pub skipped: Vec<Skipped>,
}

impl SweepTable {
    pub const MATCH_HEADER: [&'static str; 9] = [
        "image",
        "filter_id",
        "target",
        "param",
        "normalized_param",
        "achieved_level",
        "deviation",
        "evaluations",
        "converged",
    ];

    pub const SUMMARY_HEADER: [&'static str; 7] = [
        "filter_id",
        "target",
        "mean_normalized_param",
        "param_variance",
        "mean_deviation",
        "converged",
        "total",
    ];

    pub fn match_records(&self) -> Vec<Vec<String>> {
        self.matches
            .iter()
            .map(|m| {
                let mut row = vec![m.image.clone()];
                row.extend(m.result.csv_record());
                row
            })
            .collect()
    }

    pub fn summary_records(&self) -> Vec<Vec<String>> {
        self.levels
            .iter()
            .map(|l| {
                vec![
                    self.filter_id.clone(),
                    l.target.to_string(),
                    l.mean_normalized_param.to_string(),
                    l.param_variance.to_string(),
                    l.mean_deviation.to_string(),
                    l.converged.to_string(),
                    l.total.to_string(),
                ]
            })
            .collect()
    }

    pub fn converged(&self) -> usize {
        self.matches.iter().filter(|m| m.result.converged).count()
    }
}

/// Matches the ten baseline levels on every image.
pub fn baseline_sweep(filter: &FilterInstance, corpus: &Corpus) -> SweepTable {
    let targets = baseline_levels();
    let per_image: Vec<Result<Vec<MatchResult>>> = corpus
        .images()
        .par_iter()
        .map(|img| {
            let mut matcher = Matcher::new(filter, img);
            targets.iter().map(|t| matcher.find(*t)).collect()
        })
        .collect();

    let mut matches = Vec::new();
    let mut skipped = Vec::new();
    for (name, result) in corpus.names().iter().zip(per_image) {
        match result {
            Ok(results) => matches.extend(results.into_iter().map(|result| SweepMatch {
                image: name.clone(),
                result,
            })),
            Err(e) => skipped.push(Skipped::new(name, filter.id(), &e)),
        }
    }

    let levels = targets
        .iter()
        .enumerate()
        .map(|(k, &target)| {
            // Matches are stored image by image, ten per image.
            let at: Vec<&MatchResult> = matches.iter().skip(k).step_by(targets.len()).map(|m| &m.result).collect();
            let n = at.len() as f64;
            let (mean, var, dev) = if at.is_empty() {
                (f64::NAN, f64::NAN, f64::NAN)
            } else {
                let mean = at.iter().map(|m| m.normalized_param).sum::<f64>() / n;
                let var = at.iter().map(|m| (m.normalized_param - mean).powi(2)).sum::<f64>() / n;
                let dev = at.iter().map(|m| m.deviation).sum::<f64>() / n;
                (mean, var, dev)
            };
            SweepLevel {
                target,
                mean_normalized_param: mean,
                param_variance: var,
                mean_deviation: dev,
                converged: at.iter().filter(|m| m.converged).count(),
                total: at.len(),
            }
        })
        .collect();

    SweepTable {
        filter_id: filter.id().to_string(),
        matches,
        levels,
        skipped,
    }
}
