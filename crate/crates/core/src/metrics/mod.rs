//! Image attributes comparing an input `I` with its smoothed version `J`:
//! gradient attenuation (SO) globally and over smooth/edge regions,
//! brightness and chroma change in Lab, contrast change via the global
//! contrast factor, and SSIM.

mod color_shift;
mod edges;
mod gcf;
mod report;
mod so;
mod ssim;

pub use color_shift::{delta_brightness, delta_color, BRIGHTNESS_MIN_L};
pub use edges::{edge_map, smooth_mask, EdgeMap, EDGE_THRESHOLD, EROSION_RADIUS};
pub use gcf::{contrast_ratio, gcf, GCF_LEVELS};
pub use report::{full_report, AttributeReport};
pub use so::{masked_gradient_sum, so_from_fields, so_ratio};
pub use ssim::ssim;
