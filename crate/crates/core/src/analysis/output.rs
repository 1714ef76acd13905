use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

/// Where a set of results came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub corpus_sha256: String,
    pub registry_sha256: String,
}

impl Provenance {
    pub fn new(corpus_sha256: impl Into<String>, registry_sha256: impl Into<String>) -> Self {
        Self {
            tool: "epf".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            corpus_sha256: corpus_sha256.into(),
            registry_sha256: registry_sha256.into(),
        }
    }

    /// The comment line that opens every CSV file.
    pub fn header_line(&self) -> String {
        format!(
            "# {} {} corpus_sha256={} registry_sha256={}",
            self.tool, self.version, self.corpus_sha256, self.registry_sha256
        )
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Renders CSV text: provenance comment, header, records. Fields use '.'
/// decimals, ',' separators and LF line endings.
pub fn csv_string<R, S>(provenance: &Provenance, header: &[&str], records: R) -> Result<String>
where
    R: IntoIterator,
    R::Item: IntoIterator<Item = S>,
    S: AsRef<[u8]>,
{
    let mut out = provenance.header_line().into_bytes();
    out.push(b'\n');
    {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut out);
        let fail = |e: csv::Error| Error::InvalidArgument(format!("CSV encoding failed: {e}"));
        w.write_record(header).map_err(fail)?;
        for r in records {
            w.write_record(r).map_err(fail)?;
        }
        w.flush().map_err(|e| Error::InvalidArgument(format!("CSV encoding failed: {e}")))?;
    }
    Ok(String::from_utf8(out).expect("CSV fields are UTF-8"))
}

pub fn write_csv<R, S>(path: &Path, provenance: &Provenance, header: &[&str], records: R) -> Result<()>
where
    R: IntoIterator,
    R::Item: IntoIterator<Item = S>,
    S: AsRef<[u8]>,
{
    let text = csv_string(provenance, header, records)?;
    std::fs::write(path, text).map_err(io_err(path))
}

/// Adds `section` to the JSON report at `path`. Sections written under a
/// different provenance are discarded. Keys are kept sorted so the file
/// does not depend on command order.
pub fn update_report(path: &Path, provenance: &Provenance, section: &str, value: Value) -> Result<()> {
    let mut root = Map::new();
    if let Ok(text) = std::fs::read_to_string(path) {
        if let Ok(Value::Object(existing)) = serde_json::from_str::<Value>(&text) {
            let same = existing
                .get("provenance")
                .and_then(|p| serde_json::from_value::<Provenance>(p.clone()).ok())
                .is_some_and(|p| &p == provenance);
            if same {
                root = existing;
            }
        }
    }
    root.insert(
        "provenance".into(),
        serde_json::to_value(provenance).expect("provenance serializes"),
    );
    root.insert(section.into(), value);
    let sorted: std::collections::BTreeMap<String, Value> = root.into_iter().collect();
    let mut text = serde_json::to_string_pretty(&sorted).expect("report serializes");
    text.push('\n');
    std::fs::write(path, text).map_err(io_err(path))
}
