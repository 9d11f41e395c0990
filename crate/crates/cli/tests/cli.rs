use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;
use textca::ca::{contributions, fit_ca, squared_cosines, FocusSpec, PointKind};
use textca::cluster::{cluster_documents, Linkage};
use textca::corpus::{build_matrix, extract_subcorpus, parse_archive, AnalysisConfig, TermDocMatrix};
use textca::json::{CorpusStore, ModelDocument};
use textca::query::{nearest_words, occurrence_timeline};

const BIN: &str = env!("CARGO_BIN_EXE_textca");

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

fn textca(out: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .arg("--config")
        .arg(fixture("mini.conf"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .output()
        .unwrap()
}

fn ok(out: &Path, args: &[&str]) -> String {
    let o = textca(out, args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn library() -> (AnalysisConfig, TermDocMatrix, textca::corpus::BuildReport) {
    let cfg = AnalysisConfig::parse(&fs::read_to_string(fixture("mini.conf")).unwrap()).unwrap();
    let docs = parse_archive(&fs::read_to_string(fixture("mini_archive.txt")).unwrap(), &cfg.alias_map).unwrap();
    let (m, report) = build_matrix(&docs, cfg.min_count).unwrap();
    (cfg, m, report)
}

fn ingested() -> TempDir {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["ingest", fixture("mini_archive.txt").to_str().unwrap()]);
    dir
}

fn analyzed() -> TempDir {
    let dir = ingested();
    ok(dir.path(), &["analyze"]);
    dir
}

fn read(dir: &Path, rel: &str) -> String {
    fs::read_to_string(dir.join(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

#[test]
fn ingest_report_matches_library() {
    let dir = TempDir::new().unwrap();
    let stdout = ok(dir.path(), &["ingest", fixture("mini_archive.txt").to_str().unwrap()]);
    let (cfg, m, report) = library();
    assert_eq!(stdout.trim_end(), report.to_string());
    assert_eq!(read(dir.path(), "ingest_report.txt"), format!("{report}\n"));
    let store = CorpusStore::from_json(&read(dir.path(), "corpus.json")).unwrap();
    assert_eq!(store.matrix, m);
    assert_eq!(store.config, cfg);
    assert_eq!(read(dir.path(), "corpus.json"), CorpusStore::new(cfg, report, m).to_json().unwrap());
}

#[test]
fn single_record_archive_gives_a_store() {
    let dir = TempDir::new().unwrap();
    let archive = dir.path().join("one.txt");
    fs::write(&archive, "#BS0001 02_05_80\nThe cat sat on the mat with the other cat.\n").unwrap();
    ok(dir.path(), &["ingest", archive.to_str().unwrap()]);
    let store = CorpusStore::from_json(&read(dir.path(), "corpus.json")).unwrap();
    assert_eq!(store.matrix.n_docs(), 1);
    assert_eq!(store.report.docs_in, 1);
    assert_eq!(store.matrix.vocab(), ["cat", "the"]);
}

#[test]
fn analyze_outputs_match_library_serialization() {
    let dir = ingested();
    ok(dir.path(), &["analyze", "--names", "Mother, father"]);
    let (cfg, m, _) = library();
    let names = ["mother".to_string(), "father".to_string()];
    let model = fit_ca(&m, &FocusSpec::with_rest(&m, &names).unwrap()).unwrap();
    let axes = 1..=model.rank;
    assert_eq!(read(dir.path(), "eigenvalues.csv"), model.eigen_table().to_csv().unwrap());
    assert_eq!(
        read(dir.path(), "coordinates_documents.csv"),
        model.coordinates(PointKind::Rows).to_csv().unwrap()
    );
    assert_eq!(
        read(dir.path(), "coordinates_supplementary.csv"),
        model.coordinates(PointKind::SupplementaryColumns).to_csv().unwrap()
    );
    assert_eq!(
        read(dir.path(), "contributions_active.csv"),
        contributions(&model, PointKind::ActiveColumns, axes.clone()).unwrap().to_csv().unwrap()
    );
    assert_eq!(
        read(dir.path(), "cos2_documents.csv"),
        squared_cosines(&model, PointKind::Rows, axes).unwrap().to_csv().unwrap()
    );
    // documents without either name are projected afterwards
    assert!(!model.dropped_rows.is_empty());
    assert_eq!(read(dir.path(), "coordinates_dropped.csv"), model.dropped_table().to_csv().unwrap());
    let doc = ModelDocument::new(cfg, m.vocab().to_vec(), model);
    assert_eq!(read(dir.path(), "model.json"), doc.to_json().unwrap());
}

#[test]
fn plane_plot_labels_every_active_name() {
    let dir = analyzed();
    let svg = read(dir.path(), "plane_1_2.svg");
    for name in ["mother", "father", "lucy", "howard"] {
        assert!(svg.contains(&format!(r#"data-label="{name}""#)), "{name}");
        assert!(svg.contains(&format!(">{name}</text>")), "{name}");
    }
    // rank 3 has no (3,4) plane
    assert!(!dir.path().join("plane_3_4.svg").exists());
}

#[test]
fn nearest_and_timeline_match_library() {
    let dir = analyzed();
    let (cfg, m, _) = library();
    let model = fit_ca(&m, &FocusSpec::with_rest(&m, &cfg.active_names).unwrap()).unwrap();

    let stdout = ok(dir.path(), &["nearest", "Mother", "-k", "3"]);
    let res = nearest_words(&model, "mother", 3).unwrap();
    assert!(stdout.starts_with(&res.to_text()));
    assert_eq!(read(dir.path(), "nearest_mother.csv"), res.to_csv().unwrap());

    // default words come from the configured k
    ok(dir.path(), &["timeline", "mother"]);
    let words = nearest_words(&model, "mother", cfg.k_nearest).unwrap().words();
    let table = occurrence_timeline(&m, "mother", &words).unwrap();
    assert_eq!(read(dir.path(), "timeline_mother.csv"), table.to_csv().unwrap());
    assert_eq!(read(dir.path(), "timeline_mother.txt"), table.to_text());
}

#[test]
fn cluster_matches_library_dendrogram() {
    let dir = analyzed();
    ok(dir.path(), &["cluster", "--linkage", "complete"]);
    let (cfg, m, _) = library();
    let model = fit_ca(&m, &FocusSpec::with_rest(&m, &cfg.active_names).unwrap()).unwrap();
    let d = cluster_documents(&model, Linkage::Complete).unwrap();
    assert_eq!(read(dir.path(), "dendrogram.json"), d.to_json().unwrap());
    let svg = read(dir.path(), "dendrogram.svg");
    assert_eq!(svg.matches(r#"class="join""#).count(), d.leaves.len() - 1);
}

#[test]
fn substudy_rank_is_bounded_by_its_documents() {
    let dir = ingested();
    ok(dir.path(), &["substudy", "mother", "--format", "json"]);
    let doc = ModelDocument::from_json(&read(dir.path(), "substudy_mother/model.json")).unwrap();
    let (cfg, m, _) = library();
    let (sub, _) = extract_subcorpus(&m.to_documents(), "mother", cfg.min_count).unwrap();
    assert_eq!(doc.model.row_docs.len(), sub.n_docs());
    assert!(doc.model.rank < sub.n_docs());
    assert!(doc.model.rank < sub.n_words());
    assert!(dir.path().join("substudy_mother/dendrogram.json").exists());
    assert!(!dir.path().join("substudy_mother/dendrogram.svg").exists());
    assert!(read(dir.path(), "substudy_mother/report.txt").starts_with("name=mother docs="));
}

#[test]
fn stats_reports_every_family() {
    let dir = analyzed();
    ok(dir.path(), &["stats"]);
    let csv = read(dir.path(), "distance_stats.csv");
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "family,n_total,n_tested,mean,w,p_value,subsampled,seed");
    assert_eq!(lines.len(), 5);
    // four active names give six pairs
    assert!(lines.iter().any(|l| l.starts_with("names,6,6,")));
    assert!(lines[1..].iter().all(|l| l.ends_with(",7")));
}

#[test]
fn exit_codes_follow_error_kinds() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "no header here\n").unwrap();
    assert_eq!(code(&textca(dir.path(), &["ingest", bad.to_str().unwrap()])), 2);
    assert_eq!(code(&textca(dir.path(), &["ingest", "/nonexistent/archive.txt"])), 2);

    let dir = analyzed();
    assert_eq!(code(&textca(dir.path(), &["nearest", "kitchen"])), 4);
    assert_eq!(code(&textca(dir.path(), &["cluster", "--format", "png"])), 4);
    assert_eq!(code(&textca(dir.path(), &["cluster", "--linkage", "single"])), 4);
}

#[test]
fn independent_names_have_no_factor_space() {
    let dir = TempDir::new().unwrap();
    let archive = dir.path().join("flat.txt");
    fs::write(&archive, "#BS0001 01_01_80\nalice bob\n#BS0002 02_01_80\nalice alice bob bob\n").unwrap();
    ok(dir.path(), &["ingest", archive.to_str().unwrap()]);
    let o = textca(dir.path(), &["analyze", "--names", "alice,bob"]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn manifests_are_reproducible() {
    let run = || {
        let dir = analyzed();
        ok(dir.path(), &["cluster"]);
        ok(dir.path(), &["stats", "--seed", "11"]);
        read(dir.path(), "manifest.json")
    };
    let (a, b) = (run(), run());
    assert_eq!(a, b);
    let manifest: serde_json::Value = serde_json::from_str(&a).unwrap();
    let runs = manifest["runs"].as_array().unwrap();
    let commands: Vec<&str> = runs.iter().map(|r| r["command"].as_str().unwrap()).collect();
    assert_eq!(commands, ["ingest", "analyze", "cluster", "stats"]);
    assert_eq!(runs[0]["started"], "2023-11-14T22:13:20Z");
}
