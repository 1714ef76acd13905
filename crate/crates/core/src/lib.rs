//! Edge-preserving smoothing filters behind a uniform one-parameter
//! interface, with the tooling to measure, equate and compare them:
//! gradient-attenuation metrics, per-image parameter equivalency search,
//! elimination profiles, attribute curves and SSIM-based clustering.

pub mod analysis;
pub mod corpus;
pub mod error;
pub mod equivalency;
pub mod filters;
pub mod metrics;
pub mod raster;
pub mod synthetic;

pub use corpus::Corpus;
pub use error::{Error, Result};
pub use equivalency::{baseline_match, find_parameter, MatchResult};
pub use filters::{FilterDescriptor, FilterInstance, NativeFilter, Registry};
pub use raster::{load_image, save_image, ImageF, PixelMask};
