use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::{cubic_fit, CubicFit};
use super::Skipped;
use crate::corpus::Corpus;
use crate::equivalency::{Matcher, MatchResult};
use crate::error::Result;
use crate::filters::FilterInstance;
use crate::metrics::{smooth_mask, AttributeReport};

/// Match and attribute report of one image at one level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub image: String,
    pub result: MatchResult,
    pub report: AttributeReport,
}

/// Matches every image at every level and reports the attributes of the
/// matched output. The smooth mask comes from each original image.
pub fn level_reports(
    filter: &FilterInstance,
    corpus: &Corpus,
    levels: &[f64],
) -> (Vec<LevelReport>, Vec<Skipped>) {
    let per_image: Vec<Result<Vec<(MatchResult, AttributeReport)>>> = corpus
        .images()
        .par_iter()
        .map(|img| {
            let mask = smooth_mask(img);
            let mut matcher = Matcher::new(filter, img);
            levels
                .iter()
                .map(|&level| {
                    let (m, out) = matcher.find_with_output(level)?;
                    Ok((m, AttributeReport::with_mask(img, &out, &mask)?))
                })
                .collect()
        })
        .collect();

    let mut reports = Vec::new();
    let mut skipped = Vec::new();
    for (name, result) in corpus.names().iter().zip(per_image) {
        match result {
            Ok(rows) => reports.extend(rows.into_iter().map(|(result, report)| LevelReport {
                image: name.clone(),
                result,
                report,
            })),
            Err(e) => skipped.push(Skipped::new(name, filter.id(), &e)),
        }
    }
    (reports, skipped)
}

/// Mean attributes at one level over the settled matches.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttributeLevel {
    pub level: f64,
    /// `None` when no match at this level settled.
    pub mean: Option<AttributeReport>,
    pub included: usize,
    pub total: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttributeCurves {
    pub filter_id: String,
    /// Level 0 first (the identity row), then the requested levels.
    pub levels: Vec<AttributeLevel>,
    pub skipped: Vec<Skipped>,
}

impl AttributeCurves {
    pub const CSV_HEADER: [&'static str; 11] = [
        "filter_id",
        "level",
        "so",
        "so_smooth",
        "so_edge",
        "delta_l",
        "delta_c",
        "contrast_ratio",
        "included",
        "total",
        "has_data",
    ];

    pub fn csv_records(&self) -> Vec<Vec<String>> {
        self.levels
            .iter()
            .map(|l| {
                let mut row = vec![self.filter_id.clone(), l.level.to_string()];
                match &l.mean {
                    Some(m) => row.extend(m.csv_record()),
                    None => row.extend(std::iter::repeat_n(String::new(), 6)),
                }
                row.extend([l.included.to_string(), l.total.to_string(), l.mean.is_some().to_string()]);
                row
            })
            .collect()
    }
}

/// Mean brightness, chroma and contrast change per level, averaged over
/// matches that converged (or reached the integer optimum). Level 0 is
/// prepended as the identity row.
pub fn attribute_curves(filter: &FilterInstance, corpus: &Corpus, levels: &[f64]) -> AttributeCurves {
    let (reports, skipped) = level_reports(filter, corpus, levels);
    curves_from_reports(filter.id(), corpus.len() - skipped.len(), &reports, levels, skipped)
}

pub(crate) fn curves_from_reports(
    filter_id: &str,
    images: usize,
    reports: &[LevelReport],
    levels: &[f64],
    skipped: Vec<Skipped>,
) -> AttributeCurves {
    let mut rows = vec![AttributeLevel {
        level: 0.0,
        mean: Some(AttributeReport::identity()),
        included: images,
        total: images,
    }];
    for (k, &level) in levels.iter().enumerate() {
        let at: Vec<&LevelReport> = reports.iter().skip(k).step_by(levels.len()).collect();
        let settled: Vec<&AttributeReport> = at.iter().filter(|r| r.result.settled()).map(|r| &r.report).collect();
        rows.push(AttributeLevel {
            level,
            mean: mean_report(&settled),
            included: settled.len(),
            total: at.len(),
        });
    }
    AttributeCurves {
        filter_id: filter_id.to_string(),
        levels: rows,
        skipped,
    }
}

fn mean_report(reports: &[&AttributeReport]) -> Option<AttributeReport> {
    if reports.is_empty() {
        return None;
    }
    let n = reports.len() as f64;
    let mean = |f: fn(&AttributeReport) -> f64| reports.iter().map(|r| f(r)).sum::<f64>() / n;
    Some(AttributeReport {
        so: mean(|r| r.so),
        so_smooth: mean(|r| r.so_smooth),
        so_edge: mean(|r| r.so_edge),
        delta_l: mean(|r| r.delta_l),
        delta_c: mean(|r| r.delta_c),
        contrast_ratio: mean(|r| r.contrast_ratio),
    })
}

/// One point of the smooth-versus-edge plot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TradeoffPoint {
    pub image: String,
    pub target: f64,
    /// `1 - SO` over the smooth region.
    pub smooth_loss: f64,
    /// SO over the edge region.
    pub so_edge: f64,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tradeoff {
    pub filter_id: String,
    pub points: Vec<TradeoffPoint>,
    pub fit: Option<CubicFit>,
    /// Why the fit is missing.
    pub fit_error: Option<String>,
    pub skipped: Vec<Skipped>,
}

impl Tradeoff {
    pub const POINT_HEADER: [&'static str; 6] = ["filter_id", "image", "target", "smooth_loss", "so_edge", "converged"];
    pub const FIT_HEADER: [&'static str; 9] = [
        "filter_id",
        "c0",
        "c1",
        "c2",
        "c3",
        "residual_rms",
        "constant_rms",
        "points",
        "error",
    ];

    pub fn point_records(&self) -> Vec<Vec<String>> {
        self.points
            .iter()
            .map(|p| {
                vec![
                    self.filter_id.clone(),
                    p.image.clone(),
                    p.target.to_string(),
                    p.smooth_loss.to_string(),
                    p.so_edge.to_string(),
                    p.converged.to_string(),
                ]
            })
            .collect()
    }

    pub fn fit_record(&self) -> Vec<String> {
        let mut row = vec![self.filter_id.clone()];
        match &self.fit {
            Some(f) => {
                row.extend(f.coefficients.iter().map(|c| c.to_string()));
                row.extend([f.residual_rms.to_string(), f.constant_rms.to_string()]);
            }
            None => row.extend(std::iter::repeat_n(String::new(), 6)),
        }
        row.push(self.points.len().to_string());
        row.push(self.fit_error.clone().unwrap_or_default());
        row
    }
}

/// Smooth-region loss against edge preservation for every match, with a
/// least-squares cubic of `so_edge` in `smooth_loss`.
pub fn smooth_vs_edge(filter: &FilterInstance, corpus: &Corpus, levels: &[f64]) -> Tradeoff {
    let (reports, skipped) = level_reports(filter, corpus, levels);
    tradeoff_from_reports(filter.id(), &reports, skipped)
}

pub(crate) fn tradeoff_from_reports(filter_id: &str, reports: &[LevelReport], skipped: Vec<Skipped>) -> Tradeoff {
    let points: Vec<TradeoffPoint> = reports
        .iter()
        .map(|r| TradeoffPoint {
            image: r.image.clone(),
            target: r.result.target_level,
            smooth_loss: 1.0 - r.report.so_smooth,
            so_edge: r.report.so_edge,
            converged: r.result.converged,
        })
        .collect();
    let xs: Vec<f64> = points.iter().map(|p| p.smooth_loss).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.so_edge).collect();
    let (fit, fit_error) = match cubic_fit(&xs, &ys) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Tradeoff {
        filter_id: filter_id.to_string(),
        points,
        fit,
        fit_error,
        skipped,
    }
}
