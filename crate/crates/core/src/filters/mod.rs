//! Edge-preserving smoothing operators behind a single-parameter interface.
//!
//! Every operator is driven by one primary parameter on `[0, param_max]`,
//! where 0 returns the input unchanged and larger values smooth more.
//! Secondary parameters are fixed at the defaults of each method's
//! original publication.

mod bilateral;
mod domain;
pub mod external;
mod fgs;
pub(crate) mod gauss;
mod guided;
pub(crate) mod l0;
pub(crate) mod registry;
pub(crate) mod wls;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use bilateral::bilateral;
pub use domain::domain_transform;
pub use external::ExternalAdapter;
pub use fgs::fast_global_smoother;
pub use gauss::gaussian_blur;
pub use guided::guided_filter;
pub use l0::l0_smooth;
pub use registry::{Registry, RegistryEntry, RegistryFile};
pub use wls::wls_smooth;

use crate::error::{Error, Result};
use crate::raster::ImageF;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterKind {
    Native,
    External,
}

/// Natively implemented operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NativeFilter {
    Gauss,
    Blf,
    Gif,
    Dom,
    Wls,
    L0,
    Fgs,
}

impl NativeFilter {
    pub const ALL: [NativeFilter; 7] = [
        NativeFilter::Gauss,
        NativeFilter::Blf,
        NativeFilter::Gif,
        NativeFilter::Dom,
        NativeFilter::Wls,
        NativeFilter::L0,
        NativeFilter::Fgs,
    ];

    pub fn id(self) -> &'static str {
        match self {
            NativeFilter::Gauss => "gauss",
            NativeFilter::Blf => "blf",
            NativeFilter::Gif => "gif",
            NativeFilter::Dom => "dom",
            NativeFilter::Wls => "wls",
            NativeFilter::L0 => "l0",
            NativeFilter::Fgs => "fgs",
        }
    }

    /// Descriptor with the primary parameter and its maximal value.
    pub fn descriptor(self) -> FilterDescriptor {
        let (param_name, param_max, description) = match self {
            NativeFilter::Gauss => ("sigma", 16.0, "Gaussian blur (non edge-aware baseline)"),
            NativeFilter::Blf => ("sigma_r", 0.5, "bilateral filter, sigma_d = 20 sigma_r"),
            NativeFilter::Gif => ("r", 10.0, "guided filter, self-guided, eps = 0.01"),
            NativeFilter::Dom => ("sigma_r", 5.0, "domain transform, recursive, sigma_s = 60"),
            NativeFilter::Wls => ("lambda", 10.0, "weighted least squares, alpha = 1.2"),
            NativeFilter::L0 => ("lambda", 0.3, "L0 gradient minimization, kappa = 2"),
            NativeFilter::Fgs => ("sigma", 0.1, "fast global smoother, lambda = 900"),
        };
        FilterDescriptor {
            id: self.id().to_string(),
            param_name: param_name.to_string(),
            param_max,
            monotone: true,
            kind: FilterKind::Native,
            integer_param: self == NativeFilter::Gif,
            description: description.to_string(),
        }
    }

    /// Applies the operator. Parameter 0 returns the input unchanged.
    pub fn apply(self, img: &ImageF, param: f64) -> Result<ImageF> {
        if param <= 0.0 {
            return Ok(img.clone());
        }
        match self {
            NativeFilter::Gauss => gaussian_blur(img, param),
            NativeFilter::Blf => bilateral(img, param, 20.0 * param),
            NativeFilter::Gif => guided_filter(img, param.round() as usize, guided::DEFAULT_EPS),
            NativeFilter::Dom => domain_transform(img, domain::DEFAULT_SIGMA_S, param, domain::DEFAULT_ITERATIONS),
            NativeFilter::Wls => wls_smooth(img, param, wls::DEFAULT_ALPHA, wls::DEFAULT_EPS),
            NativeFilter::L0 => l0_smooth(img, param, l0::DEFAULT_KAPPA, l0::DEFAULT_BETA_MAX),
            NativeFilter::Fgs => fast_global_smoother(img, param, fgs::DEFAULT_LAMBDA, fgs::DEFAULT_ITERATIONS),
        }
    }
}

impl fmt::Display for NativeFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for NativeFilter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NativeFilter::ALL
            .into_iter()
            .find(|n| n.id() == s)
            .ok_or_else(|| Error::UnknownFilter(s.to_string()))
    }
}

/// A named operator with its primary parameter range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterDescriptor {
    pub id: String,
    pub param_name: String,
    pub param_max: f64,
    /// Whether SO is expected to be non-increasing in the parameter.
    pub monotone: bool,
    pub kind: FilterKind,
    /// The parameter is rounded to an integer before use.
    #[serde(default)]
    pub integer_param: bool,
    #[serde(default)]
    pub description: String,
}

#[derive(Clone, Debug)]
enum Backend {
    Native(NativeFilter),
    External(ExternalAdapter),
}

/// A descriptor bound to an implementation.
#[derive(Clone, Debug)]
pub struct FilterInstance {
    descriptor: FilterDescriptor,
    backend: Backend,
}

impl FilterInstance {
    pub fn native(filter: NativeFilter) -> Self {
        Self {
            descriptor: filter.descriptor(),
            backend: Backend::Native(filter),
        }
    }

    pub fn external(descriptor: FilterDescriptor, adapter: ExternalAdapter) -> Self {
        Self {
            descriptor: FilterDescriptor {
                kind: FilterKind::External,
                ..descriptor
            },
            backend: Backend::External(adapter),
        }
    }

    /// Same implementation under a different id.
    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.descriptor.id = id.into();
        self
    }

    /// Same implementation with a different upper parameter bound.
    pub fn with_param_max(mut self, param_max: f64) -> Self {
        assert!(param_max > 0.0, "param_max must be positive");
        self.descriptor.param_max = param_max;
        self
    }

    pub fn descriptor(&self) -> &FilterDescriptor {
        &self.descriptor
    }

    pub fn id(&self) -> &str {
        &self.descriptor.id
    }

    pub fn param_max(&self) -> f64 {
        self.descriptor.param_max
    }

    pub fn native_kind(&self) -> Option<NativeFilter> {
        match self.backend {
            Backend::Native(n) => Some(n),
            Backend::External(_) => None,
        }
    }

    /// Smooths `img` at `param`, which must lie in `[0, param_max]`.
    pub fn apply(&self, img: &ImageF, param: f64) -> Result<ImageF> {
        let max = self.descriptor.param_max;
        // A relative slack admits parameters computed as fractions of max.
        if !(param.is_finite() && param >= 0.0 && param <= max * (1.0 + 1e-12)) {
            return Err(Error::ParameterOutOfRange {
                filter: self.descriptor.id.clone(),
                value: param,
                max,
            });
        }
        let param = param.min(max);
        let out = match &self.backend {
            Backend::Native(n) => n.apply(img, param)?,
            Backend::External(adapter) => adapter.apply(&self.descriptor.id, img, param)?,
        };
        debug_assert_eq!(out.dims(), img.dims());
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_maxima() {
        let max = |n: NativeFilter| n.descriptor().param_max;
        assert_eq!(max(NativeFilter::Blf), 0.5);
        assert_eq!(max(NativeFilter::Wls), 10.0);
        assert_eq!(max(NativeFilter::L0), 0.3);
        assert_eq!(max(NativeFilter::Dom), 5.0);
        assert_eq!(max(NativeFilter::Gif), 10.0);
        assert_eq!(max(NativeFilter::Fgs), 0.1);
    }

    #[test]
    fn out_of_range_parameter() {
        let img = ImageF::filled(4, 4, 1, 0.5).unwrap();
        let f = FilterInstance::native(NativeFilter::Blf);
        let err = f.apply(&img, 99.0).unwrap_err();
        assert!(err.to_string().contains("0.5"), "{err}");
        assert!(f.apply(&img, -0.1).is_err());
        assert!(f.apply(&img, f64::NAN).is_err());
    }

    #[test]
    fn parse_ids() {
        for n in NativeFilter::ALL {
            assert_eq!(n.id().parse::<NativeFilter>().unwrap(), n);
        }
        assert!("nope".parse::<NativeFilter>().is_err());
    }
}
