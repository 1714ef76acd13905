use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};
use std::time::{Duration, Instant};

use epf_core::{load_image, save_image, synthetic, MatchResult};
use serde_json::Value;

fn epf() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_epf"));
    c.env_remove("EPF_REGISTRY").env("RUST_LOG", "warn");
    c
}

fn run(args: &[&str]) -> Output {
    epf().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn natural(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus/natural").join(name)
}

/// Writes synthetic images `indices` at `size` px into a fresh directory.
fn tiny_corpus(dir: &Path, indices: &[usize], size: usize) -> PathBuf {
    let c = dir.join("corpus");
    std::fs::create_dir_all(&c).unwrap();
    for &i in indices {
        save_image(&synthetic::image(i, size, 1), c.join(format!("{i:02}.png"))).unwrap();
    }
    c
}

/// CSV data rows (provenance line and header dropped).
fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# epf "));
    lines.next().unwrap();
    lines.map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn filters_json_lists_table_maxima() {
    let o = run(&["filters", "--json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let list: Vec<Value> = serde_json::from_str(&stdout(&o)).unwrap();
    let blf = list.iter().find(|f| f["id"] == "blf").unwrap();
    assert_eq!(blf["param_max"], 0.5);
    assert_eq!(list.len(), 7);
}

#[test]
fn duplicate_registry_id_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let reg = dir.path().join("registry.toml");
    std::fs::write(
        &reg,
        "[[filter]]\nid = \"twin\"\nnative = \"gauss\"\n\n[[filter]]\nid = \"twin\"\nnative = \"blf\"\n",
    )
    .unwrap();
    let o = run(&["filters", "--registry", reg.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("twin"), "{}", stderr(&o));

    // The environment variable is the fallback.
    let o = epf().env("EPF_REGISTRY", &reg).arg("filters").output().unwrap();
    assert!(!o.status.success());
}

#[test]
fn smooth_at_zero_reproduces_pixels() {
    let dir = tempfile::tempdir().unwrap();
    let input = natural("coffee.png");
    let out = dir.path().join("out.png");
    let o = run(&["smooth", input.to_str().unwrap(), "gauss", "--param", "0", "-o", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(load_image(&out).unwrap(), load_image(&input).unwrap());
}

#[test]
fn out_of_range_param_cites_maximum() {
    let o = run(&["smooth", natural("coffee.png").to_str().unwrap(), "blf", "--param", "99"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("0.5"), "{}", stderr(&o));

    let o = run(&["smooth", "/nonexistent.png", "gauss", "--param", "1"]);
    assert!(!o.status.success());
    let o = run(&["smooth", natural("coffee.png").to_str().unwrap(), "gauss"]);
    assert!(!o.status.success());
}

#[test]
fn smooth_at_level_prints_match() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w.png");
    let o = run(&[
        "smooth",
        natural("astronaut.png").to_str().unwrap(),
        "wls",
        "--level",
        "0.5",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let m: MatchResult = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert!((m.achieved_level - 0.5).abs() <= 1e-3, "{m:?}");
    assert!(out.is_file());
}

#[test]
fn profile_contract_on_tiny_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = tiny_corpus(dir.path(), &[0, 4], 24);
    let out = dir.path().join("out");
    let o = run(&[
        "--corpus",
        corpus.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--filters",
        "gauss",
        "profile",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&out.join("profile.csv"));
    assert_eq!(rows.len(), 11 * 100);
    for r in rows.iter().filter(|r| r[1] == "0") {
        assert_eq!(r[4], "1");
    }
    let report: Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["profile"]["gauss"]["contributing"], 2);
}

#[test]
fn sweep_with_identity_filter_never_converges() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = tiny_corpus(dir.path(), &[0], 24);
    let reg = dir.path().join("registry.toml");
    std::fs::write(
        &reg,
        "[[filter]]\nid = \"copy\"\nexec = \"cp\"\nargs = [\"{in}\", \"{out}\"]\nparam_max = 1\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = run(&[
        "--corpus",
        corpus.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--registry",
        reg.to_str().unwrap(),
        "--filters",
        "copy",
        "sweep",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("converged 0/10"), "{}", stdout(&o));
    let rows = csv_rows(&out.join("sweep.csv"));
    assert_eq!(rows.len(), 10);
    for r in rows {
        let target: f64 = r[2].parse().unwrap();
        let deviation: f64 = r[6].parse().unwrap();
        assert!((deviation - target).abs() < 1e-9, "{r:?}");
        assert_eq!(r[8], "false");
    }
}

#[test]
fn cluster_of_aliases_has_zero_distance() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = tiny_corpus(dir.path(), &[1, 3], 32);
    let reg = dir.path().join("registry.toml");
    std::fs::write(&reg, "[[filter]]\nid = \"gauss-alias\"\nnative = \"gauss\"\n").unwrap();
    let out = dir.path().join("out");
    let o = run(&[
        "--corpus",
        corpus.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--registry",
        reg.to_str().unwrap(),
        "--filters",
        "gauss,gauss-alias",
        "cluster",
        "--levels",
        "0.3,0.6",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&out.join("distances.csv"));
    assert_eq!(rows.len(), 2 * 4);
    for r in rows {
        assert!(r[3].parse::<f64>().unwrap() <= 1e-9, "{r:?}");
    }
    assert_eq!(csv_rows(&out.join("embedding.csv")).len(), 4);
}

#[test]
fn corpus_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run(&["--out", out.to_str().unwrap(), "sweep"]);
    assert!(!o.status.success());
    let empty = dir.path().join("empty");
    std::fs::create_dir(&empty).unwrap();
    let o = run(&["--corpus", empty.to_str().unwrap(), "--out", out.to_str().unwrap(), "sweep"]);
    assert!(!o.status.success());
    let corpus = tiny_corpus(dir.path(), &[0], 16);
    let o = run(&[
        "--corpus",
        corpus.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--filters",
        "nope",
        "sweep",
    ]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("nope"));
}

#[test]
fn self_hosted_external_adapter_matches_native() {
    let dir = tempfile::tempdir().unwrap();
    let reg = dir.path().join("registry.toml");
    std::fs::write(
        &reg,
        format!(
            "[[filter]]\nid = \"ext-gauss\"\nexec = \"{}\"\nargs = [\"smooth\", \"{{in}}\", \"gauss\", \"--param\", \"{{param}}\", \"-o\", \"{{out}}\"]\nparam_max = 16\n",
            env!("CARGO_BIN_EXE_epf")
        ),
    )
    .unwrap();
    let input = natural("coffee.png");
    let (ext, native) = (dir.path().join("ext.png"), dir.path().join("native.png"));
    for (id, out) in [("ext-gauss", &ext), ("gauss", &native)] {
        let o = run(&[
            "--registry",
            reg.to_str().unwrap(),
            "smooth",
            input.to_str().unwrap(),
            id,
            "--param",
            "2",
            "-o",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let diff = load_image(&ext).unwrap().max_abs_diff(&load_image(&native).unwrap());
    assert!(diff <= 1.0 / 255.0 + 1e-12, "{diff}");
}

struct Server(std::process::Child);

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.0.kill();
        let _ = self.0.wait();
    }
}

fn http_get(addr: &str, path: &str) -> String {
    let mut s = TcpStream::connect(addr).unwrap();
    write!(s, "GET {path} HTTP/1.1\r\nHost: {addr}\r\nConnection: close\r\n\r\n").unwrap();
    let mut body = String::new();
    s.read_to_string(&mut body).unwrap();
    body
}

#[test]
fn serve_answers_and_shuts_down_on_sigint() {
    let mut child = epf()
        .args(["serve", "--port", "0"])
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let mut lines = BufReader::new(child.stdout.take().unwrap()).lines();
    let mut server = Server(child);
    let first = lines.next().unwrap().unwrap();
    let addr = first.strip_prefix("listening on http://").unwrap().to_string();

    let response = http_get(&addr, "/api/filters");
    assert!(response.starts_with("HTTP/1.1 200"), "{response}");
    assert!(response.contains("\"l0\""));

    let pid = server.0.id().to_string();
    assert!(Command::new("kill").args(["-INT", &pid]).status().unwrap().success());
    let start = Instant::now();
    let status = loop {
        if let Some(s) = server.0.try_wait().unwrap() {
            break s;
        }
        assert!(start.elapsed() < Duration::from_secs(10), "server did not stop");
        std::thread::sleep(Duration::from_millis(20));
    };
    assert!(status.success());
}

#[test]
fn serve_on_occupied_port_fails() {
    let taken = TcpListener::bind("127.0.0.1:0").unwrap();
    let port = taken.local_addr().unwrap().port().to_string();
    let o = run(&["serve", "--port", &port]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("bind"), "{}", stderr(&o));
}
