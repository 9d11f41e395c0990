//! Acceptance suite. Prints one PASS/FAIL/SKIP line per criterion and exits
//! nonzero if any criterion fails.
//!
//! Run with `cargo test -p textca-cli --test acceptance`. The published-figures
//! criterion needs the archive: set `TEXTCA_ARCHIVE` to its path. Optional:
//! `TEXTCA_CONFIG` (defaults to min_count 5 and the eleven names) and
//! `TEXTCA_REFERENCE_VOCAB` (one word per line) for the divergence report.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::Rng;
use textca::ca::{fit_ca, project_supplementary_columns, CaModel, FocusSpec};
use textca::cluster::{cluster_documents, constrained_hclust, Linkage};
use textca::corpus::{build_matrix, extract_subcorpus, parse_archive, AnalysisConfig, TermDocMatrix};
use textca::normality::shapiro_wilk;
use textca::query::{family_distances, nearest_words, reports_containing, DistanceFamily};
use textca_oracles::{
    adjacent_ward_greedy, chi2_column_distance_sq, max_diff, max_diff_up_to_sign, random_table, seeded, BruteCa,
    SplitMix64,
};

const SHAPIRO_REFERENCE: &str = include_str!("../../core/tests/fixtures/shapiro_reference.json");
const TABLES: usize = 200;

enum Verdict {
    Pass(String),
    Fail(String),
    Skip(String),
}

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, Box<dyn FnOnce() -> Verdict>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn matrix(counts: &[Vec<u32>]) -> TermDocMatrix {
    let rows: Vec<String> = (1..=counts.len()).map(|i| format!("{i:04}")).collect();
    let vocab: Vec<String> = (0..counts[0].len()).map(|j| format!("w{j:02}")).collect();
    TermDocMatrix::from_dense(&rows, &vocab, counts).unwrap()
}

fn fit_all(m: &TermDocMatrix) -> CaModel {
    fit_ca(m, &FocusSpec::all_active(m)).unwrap()
}

/// The random tables shared by the numerical criteria: 3x3 up to 30x12,
/// entries 0 to 20, no empty margins.
fn tables(seed: u64) -> Vec<Vec<Vec<u32>>> {
    let mut rng = seeded(seed);
    (0..TABLES)
        .map(|_| {
            let (r, c) = (rng.random_range(3..=30), rng.random_range(3..=12));
            random_table(&mut rng, r, c, 20)
        })
        .collect()
}

fn unwrap_cos2(v: &[Vec<Option<f64>>]) -> Vec<Vec<f64>> {
    v.iter().map(|r| r.iter().map(|x| x.unwrap_or(f64::NAN)).collect()).collect()
}

fn oracle_equivalence() -> Check {
    let tables = tables(1001);
    let start = Instant::now();
    let mut worst = 0.0f64;
    for (case, t) in tables.iter().enumerate() {
        let model = fit_all(&matrix(t));
        let oracle = BruteCa::fit(t);
        ensure(model.rank == oracle.eigenvalues.len(), || format!("table {case}: rank {} vs {}", model.rank, oracle.eigenvalues.len()))?;
        let diffs = [
            max_diff(std::slice::from_ref(&model.eigenvalues), std::slice::from_ref(&oracle.eigenvalues)),
            max_diff_up_to_sign(&model.rows.principal, &oracle.row_principal),
            max_diff_up_to_sign(&model.active_cols.principal, &oracle.col_principal),
            max_diff(&model.rows.contributions, &oracle.row_ctr),
            max_diff(&model.active_cols.contributions, &oracle.col_ctr),
            max_diff(&unwrap_cos2(&model.rows.cos2), &oracle.row_cos2),
            max_diff(&unwrap_cos2(&model.active_cols.cos2), &oracle.col_cos2),
        ];
        for (what, d) in ["eigenvalues", "row coords", "col coords", "row ctr", "col ctr", "row cos2", "col cos2"].iter().zip(diffs) {
            ensure(d < 1e-8, || format!("table {case}: {what} differ by {d:e}"))?;
            worst = worst.max(d);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 30.0, || format!("took {secs:.1} s"))?;
    Ok(format!("{TABLES} tables, max deviation {worst:.1e}, {secs:.2} s"))
}

fn distance_equivalence() -> Check {
    let mut worst = 0.0f64;
    let mut pairs = 0usize;
    for (case, t) in tables(1001).iter().enumerate() {
        let model = fit_all(&matrix(t));
        let g = &model.active_cols.principal;
        for a in 0..g.len() {
            for b in a + 1..g.len() {
                let d2: f64 = g[a].iter().zip(&g[b]).map(|(x, y)| (x - y).powi(2)).sum();
                let d = (d2.sqrt() - chi2_column_distance_sq(t, a, b).sqrt()).abs();
                ensure(d < 1e-8, || format!("table {case}: columns {a},{b} differ by {d:e}"))?;
                worst = worst.max(d);
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} column pairs, max deviation {worst:.1e}"))
}

fn weighted_mean(masses: &[f64], coords: &[Vec<f64>], k: usize) -> f64 {
    masses.iter().zip(coords).map(|(m, c)| m * c[k]).sum()
}

fn identities() -> Check {
    let mut rng = seeded(1003);
    for (case, t) in tables(1001).iter().enumerate() {
        let model = fit_all(&matrix(t));
        let oracle = BruteCa::fit(t);
        let sum: f64 = model.eigenvalues.iter().sum();
        ensure((sum - oracle.chi2_over_n).abs() <= 1e-10 * oracle.chi2_over_n, || {
            format!("table {case}: sum of eigenvalues {sum} vs chi2/n {}", oracle.chi2_over_n)
        })?;
        for set in [&model.rows, &model.active_cols] {
            for k in 0..model.rank {
                let ctr: f64 = set.contributions.iter().map(|r| r[k]).sum();
                ensure((ctr - 100.0).abs() <= 1e-8, || format!("table {case}: contributions on axis {} sum to {ctr}", k + 1))?;
                let mean = weighted_mean(&set.masses, &set.principal, k);
                ensure(mean.abs() <= 1e-10, || format!("table {case}: weighted mean {mean:e} on axis {}", k + 1))?;
            }
            for (i, row) in set.cos2.iter().enumerate() {
                if row.iter().all(Option::is_some) {
                    let s: f64 = row.iter().flatten().sum();
                    ensure((s - 1.0).abs() <= 1e-8, || format!("table {case}: point {i} cos2 sums to {s}"))?;
                }
            }
        }
        let factor = rng.random_range(2..=7);
        let scaled: Vec<Vec<u32>> = t.iter().map(|r| r.iter().map(|x| x * factor).collect()).collect();
        let other = fit_all(&matrix(&scaled));
        let d = max_diff(std::slice::from_ref(&model.eigenvalues), std::slice::from_ref(&other.eigenvalues))
            .max(max_diff_up_to_sign(&model.rows.principal, &other.rows.principal))
            .max(max_diff_up_to_sign(&model.active_cols.principal, &other.active_cols.principal));
        ensure(d <= 1e-10, || format!("table {case}: scaling by {factor} moved the solution by {d:e}"))?;
    }
    Ok(format!("{TABLES} tables: inertia, contributions, cos2, centring, scale invariance"))
}

fn supplementary_consistency() -> Check {
    let mut worst = 0.0f64;
    for (case, t) in tables(1001).iter().enumerate() {
        let m = matrix(t);
        let model = fit_all(&m);
        let (table, skipped) = project_supplementary_columns(&model, &m, m.vocab()).unwrap();
        ensure(skipped.is_empty(), || format!("table {case}: {skipped:?} skipped"))?;
        let projected: Vec<Vec<f64>> = table.values.iter().map(|r| r.iter().map(|v| v.unwrap()).collect()).collect();
        let d = max_diff(&projected, &model.active_cols.principal);
        ensure(d < 1e-10, || format!("table {case}: reprojection off by {d:e}"))?;
        worst = worst.max(d);
    }
    Ok(format!("{TABLES} tables, max deviation {worst:.1e}"))
}

fn span(intervals: &[(usize, usize)], id: i64) -> (usize, usize) {
    if id < 0 {
        let i = (-id - 1) as usize;
        (i, i)
    } else {
        intervals[(id - 1) as usize]
    }
}

fn clustering_oracle() -> Check {
    let mut rng = seeded(1005);
    let mut cases = 0;
    let mut check = |pts: &[Vec<f64>], w: &[f64], label: &str| -> std::result::Result<(), String> {
        let n = pts.len();
        let leaves: Vec<String> = (1..=n).map(|i| format!("{i:04}")).collect();
        let d = constrained_hclust(&leaves, pts, w, Linkage::Ward).map_err(|e| e.to_string())?;
        let iv = d.intervals().ok_or_else(|| format!("{label}: a cluster is not an interval"))?;
        for (s, m) in d.merges.iter().enumerate() {
            ensure(span(&iv, m.left).1 + 1 == span(&iv, m.right).0, || format!("{label}: merge {s} joins non-adjacent blocks"))?;
        }
        if n <= 10 {
            let oracle = adjacent_ward_greedy(pts, w);
            for (s, (m, o)) in d.merges.iter().zip(&oracle).enumerate() {
                ensure(span(&iv, m.left) == o.left && span(&iv, m.right) == o.right, || format!("{label}: step {s} merges a different pair"))?;
                ensure((m.height - o.height).abs() < 1e-10 * (1.0 + o.height), || format!("{label}: step {s} height {} vs {}", m.height, o.height))?;
            }
        }
        cases += 1;
        Ok(())
    };
    for case in 0..300 {
        let n = rng.random_range(2..=10);
        let k = rng.random_range(1..=4);
        let pts: Vec<Vec<f64>> = (0..n).map(|_| (0..k).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
        let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
        check(&pts, &w, &format!("random case {case}"))?;
    }
    for (case, t) in tables(1001).iter().enumerate().filter(|(_, t)| t.len() <= 10) {
        let model = fit_all(&matrix(t));
        check(&model.rows.principal, &model.rows.masses, &format!("table {case}"))?;
    }
    // the bundled fixture corpus, contiguity only above ten documents
    let (cfg, m) = fixture_matrix();
    let model = fit_ca(&m, &FocusSpec::with_rest(&m, &cfg.active_names).unwrap()).unwrap();
    let d = cluster_documents(&model, Linkage::Ward).map_err(|e| e.to_string())?;
    ensure(d.is_contiguous(), || "fixture corpus: non-contiguous cluster".into())?;
    check(&model.rows.principal, &model.rows.masses, "fixture corpus")?;
    Ok(format!("{cases} merge sequences, every merge contiguous"))
}

fn shapiro_cross_check() -> Check {
    let doc: serde_json::Value = serde_json::from_str(SHAPIRO_REFERENCE).unwrap();
    let cases = doc["cases"].as_array().unwrap();
    let mut worst = 0.0f64;
    let mut sizes = BTreeSet::new();
    for case in cases {
        let seed = case["seed"].as_u64().unwrap();
        let n = case["n"].as_u64().unwrap() as usize;
        let x = SplitMix64::new(seed).sample(case["family"].as_str().unwrap(), n);
        let head: Vec<f64> = case["head"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
        ensure(x[..3] == head[..], || format!("seed {seed}: sample generator drifted"))?;
        let sw = shapiro_wilk(&x).map_err(|e| e.to_string())?.ok_or_else(|| format!("seed {seed}: degenerate"))?;
        let dw = (sw.w - case["w"].as_f64().unwrap()).abs();
        let dp = (sw.p_value - case["p"].as_f64().unwrap()).abs();
        ensure(dw < 1e-6 && dp < 1e-6, || format!("seed {seed} n {n}: W off by {dw:e}, p off by {dp:e}"))?;
        worst = worst.max(dw).max(dp);
        sizes.insert(n);
    }
    ensure(cases.len() == 50, || format!("{} reference cases", cases.len()))?;
    let affine = shapiro_wilk(&[0.0, 1.0, 2.0]).map_err(|e| e.to_string())?.ok_or("affine sample is degenerate")?;
    ensure(affine.w == 1.0, || format!("W = {} for an affine sample", affine.w))?;
    Ok(format!("50 samples, n in {sizes:?}, max deviation {worst:.1e}; affine sample W = 1"))
}

const PUBLISHED_NAMES: [&str; 11] =
    ["mother", "father", "ellie", "howard", "dwight", "paulina", "ginny", "dovre", "darryl", "lucy", "jake"];

const PUBLISHED_PCT: [f64; 10] = [11.8, 11.6, 11.3, 11.0, 10.7, 9.8, 9.6, 8.6, 8.1, 7.7];

const PUBLISHED_CTR: [[f64; 10]; 11] = [
    [0.4, 0.3, 1.7, 7.0, 2.7, 0.0, 0.0, 0.1, 18.6, 50.9],
    [0.5, 0.1, 1.8, 16.2, 23.3, 0.0, 16.7, 0.6, 15.2, 8.5],
    [0.0, 2.3, 19.9, 15.3, 0.1, 13.5, 7.3, 28.7, 0.2, 1.0],
    [61.7, 1.3, 21.6, 0.0, 0.3, 2.0, 2.3, 0.0, 0.1, 0.1],
    [2.3, 0.2, 0.1, 1.7, 0.0, 6.8, 8.5, 1.6, 32.7, 36.2],
    [0.1, 0.1, 9.7, 3.6, 2.3, 2.9, 1.6, 64.5, 6.8, 0.0],
    [16.7, 27.6, 37.5, 2.9, 1.5, 3.3, 1.5, 0.0, 1.4, 0.1],
    [2.8, 0.1, 1.0, 27.4, 1.1, 34.8, 26.4, 0.2, 0.6, 0.1],
    [0.2, 0.9, 0.5, 19.3, 68.2, 0.0, 2.1, 2.8, 1.5, 0.0],
    [12.2, 65.0, 4.9, 6.6, 0.1, 5.7, 1.2, 0.0, 0.7, 0.0],
    [3.3, 2.0, 1.2, 0.0, 0.2, 31.0, 32.3, 1.5, 22.4, 3.0],
];

const PUBLISHED_COORDS: [[f64; 5]; 11] = [
    [0.1, -0.1, -0.3, -0.6, -0.3],
    [0.2, 0.1, -0.3, -0.9, -1.0],
    [0.0, -0.4, -1.2, 1.0, 0.1],
    [-2.3, 0.3, 1.3, 0.1, -0.2],
    [0.4, -0.1, 0.1, -0.4, 0.0],
    [-0.1, -0.1, -1.0, 0.6, 0.5],
    [1.4, -1.8, 2.0, 0.6, 0.4],
    [-0.7, -0.1, -0.4, 2.0, 0.4],
    [-0.2, 0.4, -0.3, -1.9, 3.5],
    [1.7, 3.9, 1.1, 1.2, 0.1],
    [1.0, 0.8, 0.6, 0.0, -0.2],
];

const PUBLISHED_MOTHER_WORDS: [&str; 10] =
    ["doors", "sleepy", "stood", "nose", "nurse", "invisible", "clearly", "engagement", "king", "mid"];

const PUBLISHED_REPORTS: [usize; 11] = [108, 85, 55, 61, 53, 49, 35, 37, 21, 22, 15];

const PUBLISHED_MEANS: [(DistanceFamily, f64); 4] = [
    (DistanceFamily::Documents, 3.91),
    (DistanceFamily::Names, 4.67),
    (DistanceFamily::Supplementary, 1.70),
    (DistanceFamily::All, 0.56),
];

/// Compares one figure, collecting a message on mismatch.
fn tally(failures: &mut Vec<String>, what: String, got: f64, want: f64, tol: f64) {
    if (got - want).abs() > tol || got.is_nan() {
        failures.push(format!("{what}: {got:.3} vs {want}"));
    }
}

/// Tokens most likely to explain a vocabulary mismatch: the symmetric
/// difference with a reference vocabulary when one is supplied, otherwise
/// the words sitting exactly on the frequency threshold.
fn divergence_report(m: &TermDocMatrix, min_count: u32) -> String {
    let ours: BTreeSet<&str> = m.vocab().iter().map(String::as_str).collect();
    if let Ok(path) = std::env::var("TEXTCA_REFERENCE_VOCAB") {
        if let Ok(text) = fs::read_to_string(&path) {
            let reference: BTreeSet<String> = text.lines().map(|l| l.trim().to_lowercase()).filter(|l| !l.is_empty()).collect();
            let reference: BTreeSet<&str> = reference.iter().map(String::as_str).collect();
            let diff: Vec<String> = ours
                .symmetric_difference(&reference)
                .take(20)
                .map(|w| format!("{}{w}", if ours.contains(w) { "+" } else { "-" }))
                .collect();
            return format!("first differing tokens (+ only here, - only in reference): {}", diff.join(" "));
        }
    }
    let boundary: Vec<&str> = m
        .vocab()
        .iter()
        .zip(m.col_totals())
        .filter(|(_, &t)| t == u64::from(min_count))
        .map(|(w, _)| w.as_str())
        .take(20)
        .collect();
    format!("no reference vocabulary; first words at the threshold: {}", boundary.join(" "))
}

fn published_figures() -> Verdict {
    let Ok(path) = std::env::var("TEXTCA_ARCHIVE") else {
        return Verdict::Skip("archive not bundled; set TEXTCA_ARCHIVE to run".into());
    };
    let cfg = match std::env::var("TEXTCA_CONFIG") {
        Ok(p) => AnalysisConfig::parse(&fs::read_to_string(p).unwrap()).unwrap(),
        Err(_) => AnalysisConfig {
            min_count: 5,
            active_names: PUBLISHED_NAMES.iter().map(|s| s.to_string()).collect(),
            ..AnalysisConfig::default()
        },
    };
    let text = match fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) => return Verdict::Fail(format!("reading {path}: {e}")),
    };
    let docs = match parse_archive(&text, &cfg.alias_map) {
        Ok(d) => d,
        Err(e) => return Verdict::Fail(format!("parsing {path}: {e}")),
    };
    let (m, report) = build_matrix(&docs, cfg.min_count).unwrap();
    let mut failures = Vec::new();

    let counts = [
        ("documents", report.docs_in, 421),
        ("raw vocabulary", report.vocab_raw, 6376),
        ("kept vocabulary", report.vocab_kept, 1568),
        ("nonzeros", report.nonzero, 37344),
        ("dropped documents", report.docs_dropped.len(), 16),
        ("documents kept", m.n_docs(), 405),
    ];
    for (what, got, want) in counts {
        if got != want {
            failures.push(format!("{what}: {got} vs {want}"));
        }
    }
    if format!("{:.2}", 100.0 * report.density) != "5.66" {
        failures.push(format!("density: {:.2}% vs 5.66%", 100.0 * report.density));
    }
    if report.vocab_raw != 6376 || report.vocab_kept != 1568 {
        println!("  divergence: {}", divergence_report(&m, cfg.min_count));
    }

    match extract_subcorpus(&m.to_documents(), "mother", cfg.min_count) {
        Ok((_, sub)) => {
            for (what, got, want) in [("mother documents", sub.docs, 108), ("mother nonzero words", sub.vocab_nonzero, 1433), ("mother words", sub.vocab_kept, 662)] {
                if got != want {
                    failures.push(format!("{what}: {got} vs {want}"));
                }
            }
            if format!("{:.2}", 100.0 * sub.density_initial) != "6.27" {
                failures.push(format!("mother density: {:.2}% vs 6.27%", 100.0 * sub.density_initial));
            }
        }
        Err(e) => failures.push(format!("mother subcorpus: {e}")),
    }

    let names: Vec<String> = PUBLISHED_NAMES.iter().map(|s| s.to_string()).collect();
    let model = match FocusSpec::with_rest(&m, &names).and_then(|f| fit_ca(&m, &f)) {
        Ok(model) => model,
        Err(e) => {
            failures.push(format!("focused fit: {e}"));
            return Verdict::Fail(failures.join("; "));
        }
    };
    for (k, &want) in PUBLISHED_PCT.iter().enumerate() {
        let got = model.inertia_pct.get(k).copied().unwrap_or(f64::NAN);
        tally(&mut failures, format!("inertia axis {}", k + 1), got, want, 0.1);
    }
    let index: BTreeMap<&str, usize> = model.active_cols.labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    for (n, name) in PUBLISHED_NAMES.iter().enumerate() {
        let Some(&i) = index.get(name) else {
            failures.push(format!("{name} is not an active column"));
            continue;
        };
        for (k, &want) in PUBLISHED_CTR[n].iter().enumerate() {
            let got = model.active_cols.contributions[i].get(k).copied().unwrap_or(f64::NAN);
            tally(&mut failures, format!("ctr {name} axis {}", k + 1), got, want, 0.5);
        }
    }
    // each axis may come out reflected; pick the closer orientation
    for k in 0..5 {
        let col = |sign: f64| -> Vec<f64> {
            PUBLISHED_NAMES
                .iter()
                .map(|n| index.get(n).and_then(|&i| model.active_cols.principal[i].get(k)).map_or(f64::NAN, |x| sign * x))
                .collect()
        };
        let dev = |v: &[f64]| v.iter().zip(&PUBLISHED_COORDS).map(|(x, p)| (x - p[k]).abs()).fold(0.0, f64::max);
        let (plus, minus) = (col(1.0), col(-1.0));
        let aligned = if dev(&minus) < dev(&plus) { minus } else { plus };
        for (n, name) in PUBLISHED_NAMES.iter().enumerate() {
            tally(&mut failures, format!("coordinate {name} axis {}", k + 1), aligned[n], PUBLISHED_COORDS[n][k], 0.05);
        }
    }

    match nearest_words(&model, "mother", 10) {
        Ok(res) => {
            let got: BTreeSet<String> = res.words().into_iter().collect();
            let want: BTreeSet<String> = PUBLISHED_MOTHER_WORDS.iter().map(|s| s.to_string()).collect();
            if got != want {
                failures.push(format!("mother's nearest words: {got:?}"));
            }
        }
        Err(e) => failures.push(format!("nearest words: {e}")),
    }
    for (name, &want) in PUBLISHED_NAMES.iter().zip(&PUBLISHED_REPORTS) {
        match reports_containing(&m, name) {
            Ok((got, _)) if got == want => {}
            Ok((got, _)) => failures.push(format!("reports with {name}: {got} vs {want}")),
            Err(e) => failures.push(format!("reports with {name}: {e}")),
        }
    }
    for (family, want) in PUBLISHED_MEANS {
        let d = family_distances(&model, family);
        let mean = d.iter().sum::<f64>() / d.len() as f64;
        tally(&mut failures, format!("mean {} distance", family.as_str()), mean, want, 0.01);
    }

    if failures.is_empty() {
        Verdict::Pass("bookkeeping, inertia, contributions, coordinates, neighbours, counts and means".into())
    } else {
        let shown: Vec<&str> = failures.iter().take(12).map(String::as_str).collect();
        Verdict::Fail(format!("{} mismatches: {}", failures.len(), shown.join("; ")))
    }
}

fn fixture_matrix() -> (AnalysisConfig, TermDocMatrix) {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures");
    let cfg = AnalysisConfig::parse(&fs::read_to_string(dir.join("mini.conf")).unwrap()).unwrap();
    let docs = parse_archive(&fs::read_to_string(dir.join("mini_archive.txt")).unwrap(), &cfg.alias_map).unwrap();
    (cfg.clone(), build_matrix(&docs, cfg.min_count).unwrap().0)
}

/// Runs the whole command sequence on the fixture corpus into `out` and
/// returns every file written, keyed by relative path.
fn end_to_end(out: &Path) -> std::result::Result<BTreeMap<String, Vec<u8>>, String> {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures");
    let archive = fixtures.join("mini_archive.txt");
    let steps: [&[&str]; 7] = [
        &["ingest", archive.to_str().unwrap()],
        &["analyze"],
        &["nearest", "mother"],
        &["timeline", "mother"],
        &["cluster"],
        &["substudy", "mother"],
        &["stats"],
    ];
    for args in steps {
        let o = Command::new(env!("CARGO_BIN_EXE_textca"))
            .arg("--config")
            .arg(fixtures.join("mini.conf"))
            .args(["--seed", "20240101", "--out"])
            .arg(out)
            .args(args)
            .env("SOURCE_DATE_EPOCH", "1700000000")
            .output()
            .map_err(|e| e.to_string())?;
        ensure(o.status.success(), || format!("{args:?}: {}", String::from_utf8_lossy(&o.stderr)))?;
    }
    let mut files = BTreeMap::new();
    let mut stack = vec![out.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).map_err(|e| e.to_string())? {
            let p = entry.map_err(|e| e.to_string())?.path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(out).unwrap().to_string_lossy().into_owned();
                files.insert(rel, fs::read(&p).map_err(|e| e.to_string())?);
            }
        }
    }
    Ok(files)
}

fn determinism() -> Check {
    let (a, b) = (tempfile::TempDir::new().unwrap(), tempfile::TempDir::new().unwrap());
    let first = end_to_end(a.path())?;
    let second = end_to_end(b.path())?;
    let manifest = |f: &BTreeMap<String, Vec<u8>>| f.get("manifest.json").cloned().ok_or("no manifest written".to_string());
    ensure(manifest(&first)? == manifest(&second)?, || "manifests differ".into())?;
    ensure(first.keys().eq(second.keys()), || "different file sets".into())?;
    for (path, bytes) in &first {
        ensure(second[path] == *bytes, || format!("{path} differs"))?;
    }
    Ok(format!("two runs, {} files byte-identical including manifest.json", first.len()))
}

fn run(f: impl FnOnce() -> Verdict) -> Verdict {
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(v) => v,
        Err(e) => {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into());
            Verdict::Fail(msg)
        }
    }
}

fn checked(f: fn() -> Check) -> impl FnOnce() -> Verdict {
    move || match f() {
        Ok(detail) => Verdict::Pass(detail),
        Err(detail) => Verdict::Fail(detail),
    }
}

fn main() -> ExitCode {
    // silence the default hook; failures are reported on the criterion line
    panic::set_hook(Box::new(|_| {}));
    let criteria: Vec<Criterion> = vec![
        ("CA matches the brute-force eigen oracle", Box::new(checked(oracle_equivalence))),
        ("factor distances equal chi-squared distances", Box::new(checked(distance_equivalence))),
        ("CA identities", Box::new(checked(identities))),
        ("supplementary reprojection", Box::new(checked(supplementary_consistency))),
        ("constrained clustering oracle", Box::new(checked(clustering_oracle))),
        ("Shapiro-Wilk reference", Box::new(checked(shapiro_cross_check))),
        ("published figures on the archive", Box::new(published_figures)),
        ("deterministic manifests", Box::new(checked(determinism))),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.into_iter().enumerate() {
        let (tag, detail) = match run(f) {
            Verdict::Pass(d) => ("PASS", d),
            Verdict::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Verdict::Skip(d) => ("SKIP", d),
        };
        println!("{tag} {}. {name}: {detail}", i + 1);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
