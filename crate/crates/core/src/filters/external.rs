//! Adapter for third-party filter executables.
//!
//! Protocol: the input is written as a PNG, the executable is invoked with
//! its argument template where `{in}`, `{out}` and `{param}` are replaced by
//! the input path, output path and decimal parameter, and a zero exit code
//! signals that a PNG of identical dimensions was written to `{out}`.

use std::fs::File;
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::sync::{Condvar, Mutex};
use std::time::Duration;

use wait_timeout::ChildExt;

use crate::error::{Error, Result};
use crate::raster::{decode_image, encode_png, ImageF};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(120);

/// Default argument template: `<in> <out> <param>`.
pub fn default_args() -> Vec<String> {
    vec!["{in}".into(), "{out}".into(), "{param}".into()]
}

struct ProcessSlots {
    cap: Mutex<(usize, usize)>,
    freed: Condvar,
}

static SLOTS: ProcessSlots = ProcessSlots {
    // (in use, cap)
    cap: Mutex::new((0, usize::MAX)),
    freed: Condvar::new(),
};

/// Limits how many external filter processes may run at once.
pub fn set_process_cap(cap: usize) {
    let mut g = SLOTS.cap.lock().unwrap();
    g.1 = cap.max(1);
    SLOTS.freed.notify_all();
}

struct SlotGuard;

impl SlotGuard {
    fn acquire() -> Self {
        let mut g = SLOTS.cap.lock().unwrap();
        while g.0 >= g.1 {
            g = SLOTS.freed.wait(g).unwrap();
        }
        g.0 += 1;
        SlotGuard
    }
}

impl Drop for SlotGuard {
    fn drop(&mut self) {
        let mut g = SLOTS.cap.lock().unwrap();
        g.0 -= 1;
        SLOTS.freed.notify_one();
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExternalAdapter {
    pub exec: PathBuf,
    pub args: Vec<String>,
    pub timeout: Duration,
}

impl ExternalAdapter {
    pub fn new(exec: impl Into<PathBuf>) -> Self {
        Self {
            exec: exec.into(),
            args: default_args(),
            timeout: DEFAULT_TIMEOUT,
        }
    }

    pub fn with_args(mut self, args: Vec<String>) -> Self {
        self.args = args;
        self
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    fn substitute(&self, input: &str, output: &str, param: f64) -> Vec<String> {
        let param = format!("{param}");
        self.args
            .iter()
            .map(|a| {
                a.replace("{in}", input)
                    .replace("{out}", output)
                    .replace("{param}", &param)
            })
            .collect()
    }

    pub fn apply(&self, filter_id: &str, img: &ImageF, param: f64) -> Result<ImageF> {
        let fail = |message: String, stderr: String| Error::External {
            filter: filter_id.to_string(),
            message,
            stderr,
        };
        let dir = tempfile::tempdir().map_err(|e| fail(format!("temp dir: {e}"), String::new()))?;
        let in_path = dir.path().join("in.png");
        let out_path = dir.path().join("out.png");
        let err_path = dir.path().join("stderr.txt");
        std::fs::write(&in_path, encode_png(img)?)
            .map_err(|e| fail(format!("writing input: {e}"), String::new()))?;
        let stderr_file =
            File::create(&err_path).map_err(|e| fail(format!("stderr capture: {e}"), String::new()))?;
        let args = self.substitute(
            &in_path.to_string_lossy(),
            &out_path.to_string_lossy(),
            param,
        );

        let _slot = SlotGuard::acquire();
        let mut child = Command::new(&self.exec)
            .args(&args)
            .stdin(Stdio::null())
            .stdout(Stdio::null())
            .stderr(stderr_file)
            .spawn()
            .map_err(|source| Error::Spawn {
                path: self.exec.clone(),
                source,
            })?;
        let status = child
            .wait_timeout(self.timeout)
            .map_err(|e| fail(format!("waiting for process: {e}"), String::new()))?;
        let stderr = || std::fs::read_to_string(&err_path).unwrap_or_default();
        let status = match status {
            Some(s) => s,
            None => {
                let _ = child.kill();
                let _ = child.wait();
                return Err(fail(
                    format!("timed out after {:?}", self.timeout),
                    stderr(),
                ));
            }
        };
        if !status.success() {
            return Err(fail(format!("exited with {status}"), stderr()));
        }
        let bytes = std::fs::read(&out_path)
            .map_err(|e| fail(format!("reading output image: {e}"), stderr()))?;
        let out = decode_image(&bytes).map_err(|e| fail(format!("malformed output image: {e}"), stderr()))?;
        if out.dims() != img.dims() {
            return Err(fail(
                format!(
                    "dimension mismatch: input {:?}, output {:?}",
                    img.dims(),
                    out.dims()
                ),
                stderr(),
            ));
        }
        Ok(match (img.channels(), out.channels()) {
            (1, 3) => out.to_gray(),
            (3, 1) => {
                let data = out.data().iter().flat_map(|v| [*v; 3]).collect();
                ImageF::new(out.width(), out.height(), 3, data)?
            }
            _ => out,
        })
    }
}
