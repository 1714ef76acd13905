use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{external, ExternalAdapter, FilterDescriptor, FilterInstance, FilterKind, NativeFilter};
use crate::error::{Error, Result};

/// One `[[filter]]` table of a registry file.
///
/// An entry either wraps an executable (`exec`) or re-registers a native
/// operator under a new id (`native`), optionally with a different
/// `param_max`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegistryEntry {
    pub id: String,
    #[serde(default)]
    pub exec: Option<PathBuf>,
    #[serde(default)]
    pub native: Option<String>,
    #[serde(default)]
    pub args: Option<Vec<String>>,
    #[serde(default)]
    pub param_name: Option<String>,
    #[serde(default)]
    pub param_max: Option<f64>,
    #[serde(default)]
    pub monotone: Option<bool>,
    #[serde(default)]
    pub timeout_secs: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegistryFile {
    #[serde(default, rename = "filter")]
    pub filters: Vec<RegistryEntry>,
}

impl RegistryFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Registry(e.to_string()))
    }
}

/// The set of available operators: the natives followed by configured
/// entries, in declaration order.
#[derive(Clone, Debug)]
pub struct Registry {
    filters: Vec<FilterInstance>,
}

impl Default for Registry {
    fn default() -> Self {
        Self::builtin()
    }
}

impl Registry {
    pub fn builtin() -> Self {
        Self {
            filters: NativeFilter::ALL.into_iter().map(FilterInstance::native).collect(),
        }
    }

    /// Builtins extended with the entries of a registry file on disk.
    /// Relative executable paths containing a directory component resolve
    /// against the file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let file = RegistryFile::parse(&text)?;
        Self::builtin().extended(&file, path.parent())
    }

    pub fn extended(mut self, file: &RegistryFile, base_dir: Option<&Path>) -> Result<Self> {
        for entry in &file.filters {
            let instance = Self::instantiate(entry, base_dir)?;
            self.push(instance)?;
        }
        Ok(self)
    }

    pub fn push(&mut self, instance: FilterInstance) -> Result<()> {
        if self.filters.iter().any(|f| f.id() == instance.id()) {
            return Err(Error::DuplicateFilter(instance.id().to_string()));
        }
        self.filters.push(instance);
        Ok(())
    }

    fn instantiate(entry: &RegistryEntry, base_dir: Option<&Path>) -> Result<FilterInstance> {
        let bad = |msg: &str| Error::Registry(format!("filter `{}`: {msg}", entry.id));
        if entry.id.trim().is_empty() {
            return Err(Error::Registry("filter with empty id".into()));
        }
        if let Some(max) = entry.param_max {
            if !(max.is_finite() && max > 0.0) {
                return Err(bad("param_max must be a positive number"));
            }
        }
        match (&entry.exec, &entry.native) {
            (Some(_), Some(_)) => Err(bad("set either `exec` or `native`, not both")),
            (None, None) => Err(bad("missing `exec`")),
            (None, Some(native)) => {
                let kind: NativeFilter = native.parse().map_err(|_| bad("unknown native filter"))?;
                let mut f = FilterInstance::native(kind).with_id(entry.id.clone());
                if let Some(max) = entry.param_max {
                    f = f.with_param_max(max);
                }
                Ok(f)
            }
            (Some(exec), None) => {
                let param_max = entry.param_max.ok_or_else(|| bad("missing `param_max`"))?;
                let exec = match base_dir {
                    Some(base) if exec.is_relative() && exec.components().count() > 1 => base.join(exec),
                    _ => exec.clone(),
                };
                let mut adapter = ExternalAdapter::new(exec)
                    .with_args(entry.args.clone().unwrap_or_else(external::default_args));
                if let Some(t) = entry.timeout_secs {
                    if !(t.is_finite() && t > 0.0) {
                        return Err(bad("timeout_secs must be positive"));
                    }
                    adapter = adapter.with_timeout(Duration::from_secs_f64(t));
                }
                let descriptor = FilterDescriptor {
                    id: entry.id.clone(),
                    param_name: entry.param_name.clone().unwrap_or_else(|| "param".into()),
                    param_max,
                    monotone: entry.monotone.unwrap_or(true),
                    kind: FilterKind::External,
                    integer_param: false,
                    description: String::new(),
                };
                Ok(FilterInstance::external(descriptor, adapter))
            }
        }
    }

    pub fn get(&self, id: &str) -> Result<&FilterInstance> {
        self.filters
            .iter()
            .find(|f| f.id() == id)
            .ok_or_else(|| Error::UnknownFilter(id.to_string()))
    }

    /// Instances for the given ids, in the order given.
    pub fn select<S: AsRef<str>>(&self, ids: &[S]) -> Result<Vec<FilterInstance>> {
        ids.iter().map(|id| self.get(id.as_ref()).cloned()).collect()
    }

    pub fn filters(&self) -> &[FilterInstance] {
        &self.filters
    }

    pub fn descriptors(&self) -> Vec<FilterDescriptor> {
        self.filters.iter().map(|f| f.descriptor().clone()).collect()
    }

    /// SHA-256 over the serialized descriptors.
    pub fn content_hash(&self) -> String {
        let json = serde_json::to_vec(&self.descriptors()).expect("descriptors serialize");
        hex(&Sha256::digest(&json))
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
