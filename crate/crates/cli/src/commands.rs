use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use textca::ca::{contributions, fit_ca, squared_cosines, CaModel, FocusSpec, PointKind};
use textca::cluster::{cluster_documents, dendrogram_export, Linkage, SvgSize};
use textca::corpus::{build_matrix, chronology_violations, extract_subcorpus, parse_archive, AnalysisConfig};
use textca::json::{to_json, CorpusStore, ModelDocument};
use textca::normality::{distance_distribution_stats, DistanceStats, Normality};
use textca::plot::{factor_plane_svg, PlaneOptions};
use textca::query::{
    family_distances, nearest_words, occurrence_timeline, top_contributors, DistanceFamily, EntityKind,
};
use textca::table::{csv_string, fmt_f64};
use textca::Error;

use crate::manifest::Run;
use crate::{Cli, ClusterArgs, Command, SizeArgs};

struct Ctx {
    config: AnalysisConfig,
    config_path: Option<PathBuf>,
    out: PathBuf,
}

impl Ctx {
    fn start(&self, command: &str) -> Result<Run> {
        let mut run = Run::start(&self.out, command, &self.config)?;
        if let Some(p) = &self.config_path {
            run.read_input(p)?;
        }
        Ok(run)
    }

    fn store_path(&self, given: Option<PathBuf>) -> PathBuf {
        given.unwrap_or_else(|| self.out.join("corpus.json"))
    }

    fn model_path(&self, given: Option<PathBuf>) -> PathBuf {
        given.unwrap_or_else(|| self.out.join("model.json"))
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let mut config = match &cli.config {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            AnalysisConfig::parse(&text).with_context(|| format!("in {}", p.display()))?
        }
        None => AnalysisConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.rng_seed = seed;
    }
    let ctx = Ctx { config, config_path: cli.config, out: cli.out };
    match cli.command {
        Command::Ingest { archive } => ingest(&ctx, &archive),
        Command::Analyze { store, names, size } => analyze(&ctx, store.store, names, size),
        Command::Nearest { name, model, k } => nearest(&ctx, &name, model.model, k),
        Command::Timeline { name, store, model, words } => timeline(&ctx, &name, store.store, model.model, words),
        Command::Cluster { model, clustering } => cluster(&ctx, model.model, &clustering),
        Command::Substudy { name, store, clustering, top } => substudy(&ctx, &name, store.store, &clustering, top),
        Command::Stats { model } => stats(&ctx, model.model),
    }
}

fn load_store(run: &mut Run, path: &Path) -> Result<CorpusStore> {
    let text = run.read_input(path)?;
    CorpusStore::from_json(&text).with_context(|| format!("in {}", path.display()))
}

fn load_model(run: &mut Run, path: &Path) -> Result<ModelDocument> {
    let text = run.read_input(path)?;
    ModelDocument::from_json(&text).with_context(|| format!("in {}", path.display()))
}

fn ingest(ctx: &Ctx, archive: &Path) -> Result<()> {
    let cfg = &ctx.config;
    let mut run = ctx.start("ingest")?;
    run.param("archive", archive.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned()));
    let text = run.read_input(archive)?;
    let docs = parse_archive(&text, &cfg.alias_map).with_context(|| format!("in {}", archive.display()))?;
    for (a, b) in chronology_violations(&docs) {
        eprintln!("warning: {b} is dated before {a}");
    }
    let (matrix, report) = build_matrix(&docs, cfg.min_count)?;

    let vocab_csv = csv_string(
        &["word".into(), "total".into()],
        matrix.vocab().iter().zip(matrix.col_totals()).map(|(w, t)| vec![w.clone(), t.to_string()]),
    )?;
    let mut sorted: Vec<_> = docs.iter().collect();
    sorted.sort_by(|a, b| a.seq_id.cmp(&b.seq_id));
    let docs_csv = csv_string(
        &["seq_id".into(), "prefix".into(), "date".into(), "tokens".into(), "status".into()],
        sorted.iter().map(|d| {
            let status = if report.docs_dropped.contains(&d.seq_id) { "dropped" } else { "kept" };
            vec![d.seq_id.clone(), d.prefix.clone(), d.date.to_string(), d.token_total().to_string(), status.into()]
        }),
    )?;
    run.write("corpus.json", &CorpusStore::new(cfg.clone(), report.clone(), matrix).to_json()?)?;
    run.write("vocabulary.csv", &vocab_csv)?;
    run.write("documents.csv", &docs_csv)?;
    run.write("ingest_report.txt", &format!("{report}\n"))?;
    run.finish()?;
    println!("{report}");
    Ok(())
}

/// Eigenvalues, coordinates, contributions, squared cosines and the factor
/// planes (1,2) and (3,4), all under `prefix`.
fn write_model_tables(run: &mut Run, prefix: &str, model: &CaModel, size: SizeArgs) -> Result<()> {
    let axes = 1..=model.rank;
    run.write(&format!("{prefix}eigenvalues.csv"), &model.eigen_table().to_csv()?)?;
    for (kind, name) in [
        (PointKind::Rows, "documents"),
        (PointKind::ActiveColumns, "active"),
        (PointKind::SupplementaryColumns, "supplementary"),
    ] {
        run.write(&format!("{prefix}coordinates_{name}.csv"), &model.coordinates(kind).to_csv()?)?;
        if kind != PointKind::SupplementaryColumns {
            run.write(&format!("{prefix}contributions_{name}.csv"), &contributions(model, kind, axes.clone())?.to_csv()?)?;
        }
        run.write(&format!("{prefix}cos2_{name}.csv"), &squared_cosines(model, kind, axes.clone())?.to_csv()?)?;
    }
    if !model.dropped_rows.is_empty() {
        run.write(&format!("{prefix}coordinates_dropped.csv"), &model.dropped_table().to_csv()?)?;
    }
    let opts = PlaneOptions { width: size.width, height: size.height, ..PlaneOptions::default() };
    for (a, b) in [(1, 2), (3, 4)] {
        if model.rank >= b {
            run.write(&format!("{prefix}plane_{a}_{b}.svg"), &factor_plane_svg(model, (a, b), opts)?)?;
        } else {
            eprintln!("note: rank {} has no plane ({a},{b})", model.rank);
        }
    }
    Ok(())
}

fn inertia_summary(model: &CaModel) -> String {
    let pct: Vec<String> = model.inertia_pct.iter().map(|p| format!("{p:.1}")).collect();
    format!(
        "rank={} total_inertia={:.6} documents={} dropped={} percentages={}",
        model.rank,
        model.total_inertia,
        model.row_docs.len(),
        model.dropped_rows.len(),
        pct.join(",")
    )
}

fn analyze(ctx: &Ctx, store: Option<PathBuf>, names: Vec<String>, size: SizeArgs) -> Result<()> {
    let mut run = ctx.start("analyze")?;
    let store = load_store(&mut run, &ctx.store_path(store))?;
    let names: Vec<String> = if names.is_empty() {
        ctx.config.active_names.clone()
    } else {
        names.iter().map(|n| n.trim().to_lowercase()).filter(|n| !n.is_empty()).collect()
    };
    if names.is_empty() {
        return Err(Error::InvalidFocus("no active names; pass --names or set active_names in the config".into()).into());
    }
    run.param("names", names.join(","));
    let focus = FocusSpec::with_rest(&store.matrix, &names)?;
    let model = fit_ca(&store.matrix, &focus)?;
    if model.rank == 0 {
        return Err(Error::NoFactorSpace.into());
    }
    write_model_tables(&mut run, "", &model, size)?;
    let summary = inertia_summary(&model);
    let doc = ModelDocument::new(ctx.config.clone(), store.matrix.vocab().to_vec(), model);
    run.write("model.json", &doc.to_json()?)?;
    run.finish()?;
    println!("{summary}");
    Ok(())
}

fn nearest(ctx: &Ctx, name: &str, model: Option<PathBuf>, k: Option<usize>) -> Result<()> {
    let name = name.trim().to_lowercase();
    let k = k.unwrap_or(ctx.config.k_nearest);
    let mut run = ctx.start("nearest")?;
    run.param("name", &name);
    run.param("k", k);
    let doc = load_model(&mut run, &ctx.model_path(model))?;
    let res = nearest_words(&doc.model, &name, k)?;
    run.write(&format!("nearest_{name}.csv"), &res.to_csv()?)?;
    run.finish()?;
    print!("{}", res.to_text());
    if res.tie_expanded {
        println!("({} words: the distance at rank {k} repeats at report precision)", res.entries.len());
    }
    Ok(())
}

fn timeline(ctx: &Ctx, name: &str, store: Option<PathBuf>, model: Option<PathBuf>, words: Vec<String>) -> Result<()> {
    let name = name.trim().to_lowercase();
    let mut run = ctx.start("timeline")?;
    run.param("name", &name);
    let store = load_store(&mut run, &ctx.store_path(store))?;
    let words: Vec<String> = if words.is_empty() {
        let doc = load_model(&mut run, &ctx.model_path(model))?;
        nearest_words(&doc.model, &name, ctx.config.k_nearest)?.words()
    } else {
        words.iter().map(|w| w.trim().to_lowercase()).collect()
    };
    run.param("words", words.join(","));
    let table = occurrence_timeline(&store.matrix, &name, &words)?;
    let text = table.to_text();
    run.write(&format!("timeline_{name}.csv"), &table.to_csv()?)?;
    run.write(&format!("timeline_{name}.txt"), &text)?;
    run.finish()?;
    print!("{text}");
    Ok(())
}

fn write_dendrograms(run: &mut Run, prefix: &str, model: &CaModel, args: &ClusterArgs) -> Result<String> {
    let linkage = Linkage::parse(&args.linkage)?;
    let d = cluster_documents(model, linkage)?;
    let size = SvgSize { width: args.size.width, height: args.size.height };
    for format in &args.format {
        let format = format.trim();
        let text = dendrogram_export(&d, format, size)?;
        run.write(&format!("{prefix}dendrogram.{format}"), &text)?;
    }
    let heights = d.heights();
    let mut ranked: Vec<usize> = (0..heights.len()).collect();
    ranked.sort_by(|&a, &b| heights[b].total_cmp(&heights[a]).then(a.cmp(&b)));
    let intervals = d.intervals().expect("constrained clustering yields intervals");
    let mut summary = format!(
        "leaves={} merges={} inversions={}\n",
        d.leaves.len(),
        d.merges.len(),
        d.merges.iter().filter(|m| m.inversion).count()
    );
    for &s in ranked.iter().take(3) {
        let m = &d.merges[s];
        let side = |id: i64| {
            let (lo, hi) = if id < 0 { let i = (-id - 1) as usize; (i, i) } else { intervals[(id - 1) as usize] };
            if lo == hi { d.leaves[lo].clone() } else { format!("{}..{}", d.leaves[lo], d.leaves[hi]) }
        };
        let _ = writeln!(summary, "merge {} height={:.6} joins [{}] + [{}]", s + 1, m.height, side(m.left), side(m.right));
    }
    Ok(summary)
}

fn cluster(ctx: &Ctx, model: Option<PathBuf>, args: &ClusterArgs) -> Result<()> {
    let mut run = ctx.start("cluster")?;
    run.param("linkage", &args.linkage);
    run.param("format", args.format.join(","));
    let doc = load_model(&mut run, &ctx.model_path(model))?;
    let summary = write_dendrograms(&mut run, "", &doc.model, args)?;
    run.finish()?;
    print!("{summary}");
    Ok(())
}

fn ranking_csv(rows: &[(String, f64)], score: &str) -> Result<String> {
    Ok(csv_string(
        &["rank".into(), "label".into(), score.into()],
        rows.iter().enumerate().map(|(i, (l, v))| vec![(i + 1).to_string(), l.clone(), fmt_f64(*v)]),
    )?)
}

fn substudy(ctx: &Ctx, name: &str, store: Option<PathBuf>, args: &ClusterArgs, top: usize) -> Result<()> {
    let name = name.trim().to_lowercase();
    let mut run = ctx.start("substudy")?;
    run.param("name", &name);
    run.param("linkage", &args.linkage);
    run.param("top", top);
    let store = load_store(&mut run, &ctx.store_path(store))?;
    let docs = store.matrix.to_documents();
    let (sub, report) = extract_subcorpus(&docs, &name, ctx.config.min_count)?;
    let model = fit_ca(&sub, &FocusSpec::all_active(&sub))?;
    if model.rank == 0 {
        return Err(Error::NoFactorSpace.into());
    }
    let prefix = format!("substudy_{name}/");
    write_model_tables(&mut run, &prefix, &model, args.size)?;
    if model.rank >= 2 {
        let words = top_contributors(&model, (1, 2), top, EntityKind::ActiveWords)?;
        run.write(&format!("{prefix}top_words_1_2.csv"), &ranking_csv(&words, "contribution")?)?;
        let documents = top_contributors(&model, (1, 2), top, EntityKind::Documents)?;
        run.write(&format!("{prefix}top_documents_1_2.csv"), &ranking_csv(&documents, "contribution")?)?;
    }
    let clusters = write_dendrograms(&mut run, &prefix, &model, args)?;
    let summary = format!("{report}\n{}\n{clusters}", inertia_summary(&model));
    run.write(&format!("{prefix}report.txt"), &summary)?;
    let doc = ModelDocument::new(ctx.config.clone(), sub.vocab().to_vec(), model);
    run.write(&format!("{prefix}model.json"), &doc.to_json()?)?;
    run.finish()?;
    print!("{summary}");
    Ok(())
}

fn stats(ctx: &Ctx, model: Option<PathBuf>) -> Result<()> {
    let seed = ctx.config.rng_seed;
    let mut run = ctx.start("stats")?;
    run.param("seed", seed);
    let doc = load_model(&mut run, &ctx.model_path(model))?;
    let mut results: Vec<(DistanceFamily, Option<DistanceStats>)> = Vec::new();
    for family in DistanceFamily::ALL {
        let d = family_distances(&doc.model, family);
        let stats = match distance_distribution_stats(&d, seed) {
            Ok(s) => Some(s),
            Err(Error::TooFewValues { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        results.push((family, stats));
    }
    let csv = csv_string(
        &["family", "n_total", "n_tested", "mean", "w", "p_value", "subsampled", "seed"].map(String::from),
        results.iter().map(|(family, s)| match s {
            Some(s) => {
                let (w, p) = match s.normality {
                    Normality::Tested { w, p_value } => (fmt_f64(w), fmt_f64(p_value)),
                    Normality::Degenerate => ("NA".into(), "NA".into()),
                };
                vec![
                    family.as_str().into(),
                    s.n_total.to_string(),
                    s.n_tested.to_string(),
                    fmt_f64(s.mean),
                    w,
                    p,
                    s.subsampled.to_string(),
                    s.seed.to_string(),
                ]
            }
            None => vec![family.as_str().into(), "NA".into(), "0".into(), "NA".into(), "NA".into(), "NA".into(), "false".into(), seed.to_string()],
        }),
    )?;
    run.write("distance_stats.csv", &csv)?;
    let json: Vec<(&str, &Option<DistanceStats>)> = results.iter().map(|(f, s)| (f.as_str(), s)).collect();
    run.write("distance_stats.json", &to_json(&json)?)?;
    run.finish()?;
    for (family, s) in &results {
        match s {
            Some(s) => {
                let normality = match s.normality {
                    Normality::Tested { w, p_value } => format!("W={w:.4} p={p_value:.3e}"),
                    Normality::Degenerate => "degenerate".into(),
                };
                println!(
                    "{:<13} pairs={} mean={:.2} {normality} tested={}{}",
                    family.as_str(),
                    s.n_total,
                    s.mean,
                    s.n_tested,
                    if s.subsampled { " (subsampled)" } else { "" }
                );
            }
            None => println!("{:<13} fewer than 3 pairs", family.as_str()),
        }
    }
    Ok(())
}
