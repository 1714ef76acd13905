use std::net::SocketAddr;
use std::path::PathBuf;

use anyhow::{bail, ensure, Context as _, Result};
use epf_core::analysis::output::{update_report, write_csv, Provenance};
use epf_core::analysis::{self, classical_mds, ClusterResult, Tradeoff};
use epf_core::equivalency::{baseline_levels, Matcher};
use epf_core::{load_image, save_image, Corpus, FilterInstance, Registry};
use serde_json::json;

use crate::{Global, LevelArgs, MatchArgs, ServeArgs, SmoothArgs};

fn registry(g: &Global) -> Result<Registry> {
    match &g.registry {
        Some(path) => Registry::load(path).with_context(|| format!("loading registry {}", path.display())),
        None => Ok(Registry::builtin()),
    }
}

fn selected(g: &Global, registry: &Registry) -> Result<Vec<FilterInstance>> {
    if g.filters.is_empty() {
        Ok(registry.filters().to_vec())
    } else {
        Ok(registry.select(&g.filters)?)
    }
}

fn levels(given: &[f64]) -> Result<Vec<f64>> {
    if given.is_empty() {
        return Ok(baseline_levels());
    }
    for &l in given {
        ensure!(l.is_finite() && (0.0..=1.0).contains(&l), "level {l} is outside [0, 1]");
    }
    Ok(given.to_vec())
}

/// Everything a corpus pipeline needs.
struct Run {
    filters: Vec<FilterInstance>,
    corpus: Corpus,
    provenance: Provenance,
    out: PathBuf,
    json: bool,
}

impl Run {
    fn new(g: &Global) -> Result<Self> {
        let registry = registry(g)?;
        let filters = selected(g, &registry)?;
        let dir = g.corpus.as_ref().context("--corpus DIR is required for this command")?;
        let corpus = Corpus::load_dir(dir).with_context(|| format!("loading corpus {}", dir.display()))?;
        std::fs::create_dir_all(&g.out).with_context(|| format!("creating {}", g.out.display()))?;
        log::info!("{} images, {} filters", corpus.len(), filters.len());
        Ok(Self {
            provenance: Provenance::new(corpus.hash(), registry.content_hash()),
            filters,
            corpus,
            out: g.out.clone(),
            json: g.json,
        })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn csv<R, S>(&self, name: &str, header: &[&str], records: R) -> Result<()>
    where
        R: IntoIterator,
        R::Item: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        write_csv(&self.path(name), &self.provenance, header, records)?;
        Ok(())
    }

    fn report(&self, section: &str, value: serde_json::Value) -> Result<()> {
        update_report(&self.path("report.json"), &self.provenance, section, value)?;
        Ok(())
    }

    /// Prints the closing line: `what` counts out of `total` tasks.
    fn summary(&self, command: &str, what: &str, count: usize, total: usize, skipped: usize) {
        if self.json {
            let v = json!({ "command": command, what: count, "total": total, "skipped": skipped, "out": self.out });
            println!("{v}");
        } else {
            println!(
                "{command}: {what} {count}/{total}, {skipped} skipped, results in {}",
                self.out.display()
            );
        }
    }
}

pub fn filters(g: &Global) -> Result<()> {
    let registry = registry(g)?;
    let descriptors = registry.descriptors();
    if g.json {
        println!("{}", serde_json::to_string_pretty(&descriptors)?);
        return Ok(());
    }
    println!("{:<14} {:<10} {:>8}  {:<9} description", "id", "param", "max", "kind");
    for d in descriptors {
        let kind = serde_json::to_value(d.kind)?;
        println!(
            "{:<14} {:<10} {:>8}  {:<9} {}",
            d.id,
            d.param_name,
            d.param_max,
            kind.as_str().unwrap_or_default(),
            d.description
        );
    }
    Ok(())
}

pub fn smooth(g: &Global, args: &SmoothArgs) -> Result<()> {
    let registry = registry(g)?;
    let filter = registry.get(&args.filter)?;
    let image = load_image(&args.image)?;
    let smoothed = match (args.param, args.level) {
        (Some(p), None) => filter.apply(&image, p)?,
        (None, Some(level)) => {
            let (m, out) = Matcher::new(filter, &image).find_with_output(level)?;
            println!("{}", serde_json::to_string(&m)?);
            if !m.converged {
                log::warn!("{} did not reach level {level} (deviation {})", filter.id(), m.deviation);
            }
            out
        }
        _ => bail!("give exactly one of --param and --level"),
    };
    let result = match args.enhance {
        Some(b) => analysis::detail_enhance(&image, &smoothed, b)?,
        None => smoothed,
    };
    let output = match &args.output {
        Some(p) => p.clone(),
        None => {
            std::fs::create_dir_all(&g.out)?;
            let stem = args.image.file_stem().unwrap_or_default().to_string_lossy();
            g.out.join(format!("{stem}-{}.png", filter.id()))
        }
    };
    save_image(&result, &output)?;
    log::info!("wrote {}", output.display());
    Ok(())
}

pub fn match_image(g: &Global, args: &MatchArgs) -> Result<()> {
    let registry = registry(g)?;
    let filters = selected(g, &registry)?;
    let levels = levels(&args.levels)?;
    let image = load_image(&args.image)?;
    let results: Vec<_> = rayon_map(&filters, |f| {
        let mut m = Matcher::new(f, &image);
        levels.iter().map(|&l| m.find(l)).collect::<epf_core::Result<Vec<_>>>()
    })
    .into_iter()
    .collect::<epf_core::Result<Vec<_>>>()?
    .into_iter()
    .flatten()
    .collect();
    if g.json {
        println!("{}", serde_json::to_string_pretty(&results)?);
    } else {
        println!("{:<14} {:>6} {:>12} {:>10} {:>10}  converged", "filter", "target", "param", "achieved", "deviation");
        for r in &results {
            println!(
                "{:<14} {:>6} {:>12.6} {:>10.6} {:>10.2e}  {}",
                r.filter_id, r.target_level, r.param, r.achieved_level, r.deviation, r.converged
            );
        }
    }
    Ok(())
}

/// Maps over filters on the current pool, keeping order.
fn rayon_map<T: Send>(filters: &[FilterInstance], f: impl Fn(&FilterInstance) -> T + Sync + Send) -> Vec<T> {
    use rayon::prelude::*;
    filters.par_iter().map(f).collect()
}

pub fn profile(g: &Global) -> Result<()> {
    let run = Run::new(g)?;
    let mut rows = Vec::new();
    let mut sections = serde_json::Map::new();
    let mut skipped = 0;
    for f in &run.filters {
        let p = analysis::elimination_profile(f, &run.corpus)?;
        skipped += p.skipped.len();
        rows.extend(p.csv_records());
        sections.insert(f.id().to_string(), serde_json::to_value(&p)?);
    }
    run.csv("profile.csv", &analysis::ProfileMatrix::CSV_HEADER, rows)?;
    run.report("profile", sections.into())?;
    let total = run.filters.len() * run.corpus.len();
    run.summary("profile", "completed", total - skipped, total, skipped);
    Ok(())
}

pub fn sweep(g: &Global) -> Result<()> {
    let run = Run::new(g)?;
    let tables: Vec<_> = run.filters.iter().map(|f| analysis::baseline_sweep(f, &run.corpus)).collect();
    run.csv(
        "sweep.csv",
        &analysis::SweepTable::MATCH_HEADER,
        tables.iter().flat_map(|t| t.match_records()),
    )?;
    run.csv(
        "sweep_summary.csv",
        &analysis::SweepTable::SUMMARY_HEADER,
        tables.iter().flat_map(|t| t.summary_records()),
    )?;
    run.report("sweep", serde_json::to_value(&tables)?)?;
    let converged = tables.iter().map(|t| t.converged()).sum();
    let total = tables.iter().map(|t| t.matches.len()).sum();
    run.summary("sweep", "converged", converged, total, tables.iter().map(|t| t.skipped.len()).sum());
    Ok(())
}

pub fn attrs(g: &Global, args: &LevelArgs) -> Result<()> {
    let run = Run::new(g)?;
    let levels = levels(&args.levels)?;
    let curves: Vec<_> = run
        .filters
        .iter()
        .map(|f| analysis::attribute_curves(f, &run.corpus, &levels))
        .collect();
    run.csv(
        "attrs.csv",
        &analysis::AttributeCurves::CSV_HEADER,
        curves.iter().flat_map(|c| c.csv_records()),
    )?;
    run.report("attrs", serde_json::to_value(&curves)?)?;
    // Level 0 is the identity row and not a match.
    let matched = || curves.iter().flat_map(|c| &c.levels).filter(|l| l.level > 0.0);
    let converged = matched().map(|l| l.included).sum();
    let total = matched().map(|l| l.total).sum();
    run.summary("attrs", "settled", converged, total, curves.iter().map(|c| c.skipped.len()).sum());
    Ok(())
}

pub fn tradeoff(g: &Global, args: &LevelArgs) -> Result<()> {
    let run = Run::new(g)?;
    let levels = levels(&args.levels)?;
    let results: Vec<Tradeoff> = run
        .filters
        .iter()
        .map(|f| analysis::smooth_vs_edge(f, &run.corpus, &levels))
        .collect();
    run.csv(
        "tradeoff.csv",
        &Tradeoff::POINT_HEADER,
        results.iter().flat_map(|t| t.point_records()),
    )?;
    run.csv("tradeoff_fit.csv", &Tradeoff::FIT_HEADER, results.iter().map(|t| t.fit_record()))?;
    run.report("tradeoff", serde_json::to_value(&results)?)?;
    let converged = results.iter().flat_map(|t| &t.points).filter(|p| p.converged).count();
    let total = results.iter().map(|t| t.points.len()).sum();
    run.summary("tradeoff", "converged", converged, total, results.iter().map(|t| t.skipped.len()).sum());
    Ok(())
}

pub fn cluster(g: &Global, args: &LevelArgs) -> Result<()> {
    let run = Run::new(g)?;
    let levels = levels(&args.levels)?;
    let result: ClusterResult = analysis::ssim_distance_matrix(&run.filters, &run.corpus, &levels)?;
    run.csv("distances.csv", &ClusterResult::CSV_HEADER, result.csv_records())?;

    let embeddings: Vec<_> = result
        .levels
        .iter()
        .map(|l| (l.level, classical_mds(&l.matrix, 2)))
        .collect();
    let rows = embeddings.iter().flat_map(|(level, e)| {
        e.ids.iter().zip(&e.coords).map(move |(id, c)| {
            [
                level.to_string(),
                id.clone(),
                c[0].to_string(),
                c[1].to_string(),
                e.distortion.to_string(),
            ]
        })
    });
    run.csv("embedding.csv", &["level", "filter_id", "x", "y", "distortion"], rows)?;
    let embedding_json: Vec<_> = embeddings
        .iter()
        .map(|(level, e)| json!({ "level": level, "embedding": e }))
        .collect();
    run.report("cluster", json!({ "distances": result, "embeddings": embedding_json }))?;

    let settled: usize = result.levels.iter().map(|l| l.contributing).sum();
    let total = levels.len() * (run.corpus.len() - result.skipped.len());
    run.summary("cluster", "settled", settled, total, result.skipped.len());
    Ok(())
}

pub fn serve(g: &Global, args: &ServeArgs) -> Result<()> {
    let registry = registry(g)?;
    let mut config = epf_service::ServiceConfig {
        static_dir: args.static_dir.clone(),
        evict_sessions: !args.no_evict,
        ..Default::default()
    };
    if let Some(n) = g.parallel {
        ensure!(n > 0, "--parallel must be at least 1");
        config.compute_workers = n;
        config.queue_capacity = 4 * n;
    }
    if let Some(dir) = &config.static_dir {
        ensure!(dir.join("index.html").is_file(), "{} has no index.html", dir.display());
    }
    let addr: SocketAddr = format!("{}:{}", args.host, args.port)
        .parse()
        .with_context(|| format!("invalid address {}:{}", args.host, args.port))?;
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async move {
        let listener = epf_service::bind(addr)
            .await
            .with_context(|| format!("cannot bind {addr}"))?;
        let local = listener.local_addr()?;
        println!("listening on http://{local}");
        let app = epf_service::router(registry, config);
        epf_service::serve(listener, app, shutdown_signal()).await?;
        println!("shut down");
        Ok(())
    })
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {}
        _ = term => {}
    }
}
