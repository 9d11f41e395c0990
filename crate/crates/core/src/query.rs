//! "What and when" queries on a fitted model: nearest words to a name,
//! documents mentioning it, occurrence timelines and axis-wise rankings.

use std::cmp::Ordering;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::ca::CaModel;
use crate::corpus::{PartialDate, TermDocMatrix};
use crate::error::{Error, Result};
use crate::table::{csv_string, fmt_f64};

/// Decimal places used when printing distances and detecting printed ties.
pub const REPORT_DECIMALS: i32 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NearestWordsResult {
    pub name: String,
    /// `(word, distance)`, ascending by distance then word.
    pub entries: Vec<(String, f64)>,
    pub k_requested: usize,
    pub tie_expanded: bool,
}

fn report_key(d: f64) -> i64 {
    (d * 10f64.powi(REPORT_DECIMALS)).round() as i64
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// The `k` supplementary words closest to the active word `name` over all
/// axes of the factor space.
///
/// When the printed (2-decimal) distance at rank `k + 1` equals the one at
/// rank `k`, every such word is included as well.
pub fn nearest_words(model: &CaModel, name: &str, k: usize) -> Result<NearestWordsResult> {
    let j = model
        .active_cols
        .labels
        .iter()
        .position(|w| w == name)
        .ok_or_else(|| Error::NotActive(name.to_string()))?;
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    let origin = &model.active_cols.principal[j];
    let mut all: Vec<(String, f64)> = model
        .sup_cols
        .labels
        .iter()
        .zip(&model.sup_cols.principal)
        .map(|(w, coords)| (w.clone(), euclidean(origin, coords)))
        .collect();
    all.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));

    let mut take = k.min(all.len());
    if take == k && take < all.len() {
        let cut = all[k - 1].1;
        while take < all.len() && (all[take].1 == cut || report_key(all[take].1) == report_key(cut)) {
            take += 1;
        }
    }
    let tie_expanded = take > k;
    all.truncate(take);
    Ok(NearestWordsResult { name: name.to_string(), entries: all, k_requested: k, tie_expanded })
}

impl NearestWordsResult {
    pub fn words(&self) -> Vec<String> {
        self.entries.iter().map(|(w, _)| w.clone()).collect()
    }

    /// `rank,word,distance` at full precision.
    pub fn to_csv(&self) -> Result<String> {
        csv_string(
            &["rank".into(), "word".into(), "distance".into()],
            self.entries
                .iter()
                .enumerate()
                .map(|(i, (w, d))| vec![(i + 1).to_string(), w.clone(), fmt_f64(*d)]),
        )
    }

    /// Two aligned lines: words, then distances to two decimals.
    pub fn to_text(&self) -> String {
        let widths: Vec<usize> = self.entries.iter().map(|(w, _)| w.chars().count().max(4)).collect();
        let mut words = String::new();
        let mut dists = String::new();
        for ((w, d), width) in self.entries.iter().zip(&widths) {
            let _ = write!(words, "{w:>width$} ");
            let _ = write!(dists, "{d:>width$.prec$} ", prec = REPORT_DECIMALS as usize);
        }
        format!("{}\n{}\n", words.trim_end(), dists.trim_end())
    }
}

/// Documents in which `name` occurs at least once.
pub fn reports_containing(matrix: &TermDocMatrix, name: &str) -> Result<(usize, Vec<String>)> {
    let j = matrix.word_index(name).ok_or_else(|| Error::UnknownWord(name.to_string()))?;
    let ids: Vec<String> = (0..matrix.n_docs())
        .filter(|&i| matrix.get(i, j) > 0)
        .map(|i| matrix.docs()[i].seq_id.clone())
        .collect();
    Ok((ids.len(), ids))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimelineRow {
    pub seq_id: String,
    pub date: PartialDate,
    pub counts: Vec<u32>,
}

/// Occurrences of `words` in the documents that also mention `name`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimelineTable {
    pub name: String,
    pub words: Vec<String>,
    pub rows: Vec<TimelineRow>,
}

/// Rows are documents containing `name` and at least one of `words`, in
/// sequence order; the counts are the matrix entries.
pub fn occurrence_timeline(matrix: &TermDocMatrix, name: &str, words: &[String]) -> Result<TimelineTable> {
    let jn = matrix.word_index(name).ok_or_else(|| Error::UnknownWord(name.to_string()))?;
    let cols: Vec<usize> = words
        .iter()
        .map(|w| matrix.word_index(w).ok_or_else(|| Error::UnknownWord(w.clone())))
        .collect::<Result<_>>()?;
    let rows = (0..matrix.n_docs())
        .filter(|&i| matrix.get(i, jn) > 0)
        .filter_map(|i| {
            let counts: Vec<u32> = cols.iter().map(|&j| matrix.get(i, j)).collect();
            counts.iter().any(|&c| c > 0).then(|| TimelineRow {
                seq_id: matrix.docs()[i].seq_id.clone(),
                date: matrix.docs()[i].date,
                counts,
            })
        })
        .collect();
    Ok(TimelineTable { name: name.to_string(), words: words.to_vec(), rows })
}

impl TimelineTable {
    pub fn n_documents(&self) -> usize {
        self.rows.len()
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut header = vec!["seq_id".to_string(), "date".to_string()];
        header.extend(self.words.iter().cloned());
        csv_string(
            &header,
            self.rows.iter().map(|r| {
                let mut rec = vec![r.seq_id.clone(), r.date.to_string()];
                rec.extend(r.counts.iter().map(u32::to_string));
                rec
            }),
        )
    }

    /// Fixed-width listing: sequence number, `dd_mm_yy` date, then one
    /// right-aligned count column per word.
    pub fn to_text(&self) -> String {
        let widths: Vec<usize> = self.words.iter().map(|w| w.chars().count().max(1)).collect();
        let mut out = String::new();
        let _ = writeln!(out, "Seq. Day-month-   Words closest to {:?}", self.name);
        let _ = writeln!(out, "no.  year");
        let mut head = String::from("             ");
        for (w, width) in self.words.iter().zip(&widths) {
            let _ = write!(head, " {w:>width$}");
        }
        let _ = writeln!(out, "{head}");
        for r in &self.rows {
            let mut line = format!("{:<4} {:<8}", r.seq_id, r.date.to_string());
            for (c, width) in r.counts.iter().zip(&widths) {
                let _ = write!(line, " {c:>width$}");
            }
            let _ = writeln!(out, "{line}");
        }
        let _ = writeln!(out, "documents: {}", self.rows.len());
        out
    }
}

/// Entities ranked by [`top_contributors`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntityKind {
    /// Fitted documents, by summed contribution.
    Documents,
    /// Active words, by summed contribution.
    ActiveWords,
    /// Supplementary words, by summed squared cosine.
    SupplementaryWords,
}

/// The `n` entities with the largest summed contribution (or squared cosine,
/// for supplementary words) over the two axes, ties by label.
pub fn top_contributors(model: &CaModel, axes: (usize, usize), n: usize, kind: EntityKind) -> Result<Vec<(String, f64)>> {
    for axis in [axes.0, axes.1] {
        if axis == 0 || axis > model.rank {
            return Err(Error::AxisOutOfRange { axis, rank: model.rank });
        }
    }
    let (a, b) = (axes.0 - 1, axes.1 - 1);
    let mut scored: Vec<(String, f64)> = match kind {
        EntityKind::Documents => sum_pairs(&model.rows.labels, &model.rows.contributions, a, b),
        EntityKind::ActiveWords => sum_pairs(&model.active_cols.labels, &model.active_cols.contributions, a, b),
        EntityKind::SupplementaryWords => model
            .sup_cols
            .labels
            .iter()
            .zip(&model.sup_cols.cos2)
            .map(|(l, c)| (l.clone(), c[a].unwrap_or(0.0) + if a == b { 0.0 } else { c[b].unwrap_or(0.0) }))
            .collect(),
    };
    scored.sort_by(|x, y| match y.1.total_cmp(&x.1) {
        Ordering::Equal => x.0.cmp(&y.0),
        o => o,
    });
    scored.truncate(n);
    Ok(scored)
}

fn sum_pairs(labels: &[String], values: &[Vec<f64>], a: usize, b: usize) -> Vec<(String, f64)> {
    labels
        .iter()
        .zip(values)
        .map(|(l, v)| (l.clone(), v[a] + if a == b { 0.0 } else { v[b] }))
        .collect()
}

/// Point families whose pairwise distances are summarized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceFamily {
    Documents,
    Names,
    Supplementary,
    All,
}

impl DistanceFamily {
    pub const ALL: [DistanceFamily; 4] =
        [DistanceFamily::Documents, DistanceFamily::Names, DistanceFamily::Supplementary, DistanceFamily::All];

    pub fn as_str(&self) -> &'static str {
        match self {
            DistanceFamily::Documents => "documents",
            DistanceFamily::Names => "names",
            DistanceFamily::Supplementary => "supplementary",
            DistanceFamily::All => "all",
        }
    }
}

/// Euclidean distances over all axes between every unordered pair of
/// points in the family. `All` pools fitted documents, active words and
/// supplementary words.
pub fn family_distances(model: &CaModel, family: DistanceFamily) -> Vec<f64> {
    let points: Vec<&Vec<f64>> = match family {
        DistanceFamily::Documents => model.rows.principal.iter().collect(),
        DistanceFamily::Names => model.active_cols.principal.iter().collect(),
        DistanceFamily::Supplementary => model.sup_cols.principal.iter().collect(),
        DistanceFamily::All => model
            .rows
            .principal
            .iter()
            .chain(&model.active_cols.principal)
            .chain(&model.sup_cols.principal)
            .collect(),
    };
    pairwise_distances(&points)
}

/// Upper-triangle Euclidean distances, row by row.
pub fn pairwise_distances<P: AsRef<[f64]>>(points: &[P]) -> Vec<f64> {
    let n = points.len();
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push(euclidean(points[i].as_ref(), points[j].as_ref()));
        }
    }
    out
}
