//! Corpus-level pipelines built on the metrics and the equivalency search:
//! gradient elimination profiles, baseline sweeps, attribute curves,
//! smooth-versus-edge tradeoffs, SSIM distance matrices with their MDS
//! embeddings, and the abstraction and detail-enhancement demos.
//!
//! Pipelines fan out over rayon's current pool. Results are collected in
//! task order and reduced in corpus order, so outputs are bit-identical for
//! any pool size.

mod attributes;
mod bins;
mod cluster;
mod demos;
mod fit;
pub mod output;
mod profile;
mod sweep;

use serde::{Deserialize, Serialize};

pub use attributes::{
    attribute_curves, level_reports, smooth_vs_edge, AttributeCurves, AttributeLevel, LevelReport, Tradeoff,
    TradeoffPoint,
};
pub use bins::assign_bins;
pub use cluster::{classical_mds, ssim_distance_matrix, ClusterResult, DistanceMatrix, Embedding, LevelDistances};
pub use demos::{
    abstraction_demo, detail_enhance, detail_enhance_demo, detail_enhance_unclamped, DEFAULT_BOOST, DEMO_LEVEL,
};
pub use fit::{cubic_fit, CubicFit};
pub use profile::{
    binned_so, elimination_profile, image_profile, profile_params, ProfileMatrix, PROFILE_BINS, PROFILE_STEPS,
};
pub use sweep::{baseline_sweep, SweepLevel, SweepMatch, SweepTable};

/// Attribute curves and tradeoff from a single matching pass.
pub fn attributes_and_tradeoff(
    filter: &crate::filters::FilterInstance,
    corpus: &crate::corpus::Corpus,
    levels: &[f64],
) -> (AttributeCurves, Tradeoff) {
    let (reports, skipped) = level_reports(filter, corpus, levels);
    let curves = attributes::curves_from_reports(
        filter.id(),
        corpus.len() - skipped.len(),
        &reports,
        levels,
        skipped.clone(),
    );
    (curves, attributes::tradeoff_from_reports(filter.id(), &reports, skipped))
}

/// An image left out of a pipeline, with the reason.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skipped {
    pub image: String,
    pub filter_id: String,
    pub reason: String,
}

impl Skipped {
    pub(crate) fn new(image: &str, filter_id: &str, err: &crate::error::Error) -> Self {
        log::warn!("skipping image {image} for {filter_id}: {err}");
        Self {
            image: image.to_string(),
            filter_id: filter_id.to_string(),
            reason: err.to_string(),
        }
    }
}
