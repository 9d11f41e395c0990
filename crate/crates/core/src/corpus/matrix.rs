use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::archive::Document;
use super::date::PartialDate;
use super::tokenize::TokenCounts;
use crate::error::{Error, Result};
use crate::table::csv_string;

/// Row identity carried alongside the counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocMeta {
    pub seq_id: String,
    #[serde(default)]
    pub prefix: String,
    pub date: PartialDate,
}

impl DocMeta {
    pub fn label(&self) -> String {
        format!("{}{} {}", self.prefix, self.seq_id, self.date)
    }
}

/// Sparse documents x words count matrix.
///
/// Rows are in sequence-id order, columns in lexicographic word order. No
/// row or column is entirely zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct TermDocMatrix {
    docs: Vec<DocMeta>,
    vocab: Vec<String>,
    rows: Vec<Vec<(u32, u32)>>,
    row_totals: Vec<u64>,
    col_totals: Vec<u64>,
    grand_total: u64,
    row_masses: Vec<f64>,
    col_masses: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    docs: Vec<DocMeta>,
    vocab: Vec<String>,
    rows: Vec<Vec<(u32, u32)>>,
}

impl From<TermDocMatrix> for MatrixRepr {
    fn from(m: TermDocMatrix) -> Self {
        MatrixRepr { docs: m.docs, vocab: m.vocab, rows: m.rows }
    }
}

impl TryFrom<MatrixRepr> for TermDocMatrix {
    type Error = Error;

    fn try_from(r: MatrixRepr) -> Result<Self> {
        TermDocMatrix::from_sparse(r.docs, r.vocab, r.rows)
    }
}

impl TermDocMatrix {
    /// Builds a matrix from sparse rows of `(column, count)` pairs.
    pub fn from_sparse(docs: Vec<DocMeta>, vocab: Vec<String>, mut rows: Vec<Vec<(u32, u32)>>) -> Result<Self> {
        let malformed = |message: String| Error::Malformed { what: "term/document matrix", message };
        if docs.len() != rows.len() {
            return Err(malformed(format!("{} documents but {} rows", docs.len(), rows.len())));
        }
        if docs.is_empty() || vocab.is_empty() {
            return Err(Error::EmptyCorpus("matrix has no rows or no columns".into()));
        }
        let mut col_totals = vec![0u64; vocab.len()];
        let mut row_totals = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter_mut().enumerate() {
            row.retain(|&(_, c)| c > 0);
            row.sort_unstable_by_key(|&(j, _)| j);
            if row.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(malformed(format!("row {} repeats a column", docs[i].seq_id)));
            }
            let mut total = 0u64;
            for &(j, c) in row.iter() {
                let j = j as usize;
                if j >= vocab.len() {
                    return Err(malformed(format!("column index {j} out of range")));
                }
                col_totals[j] += u64::from(c);
                total += u64::from(c);
            }
            if total == 0 {
                return Err(malformed(format!("row {} is empty", docs[i].seq_id)));
            }
            row_totals.push(total);
        }
        if let Some(j) = col_totals.iter().position(|&t| t == 0) {
            return Err(malformed(format!("column {:?} is empty", vocab[j])));
        }
        let grand_total: u64 = row_totals.iter().sum();
        let n = grand_total as f64;
        let row_masses = row_totals.iter().map(|&t| t as f64 / n).collect();
        let col_masses = col_totals.iter().map(|&t| t as f64 / n).collect();
        Ok(TermDocMatrix { docs, vocab, rows, row_totals, col_totals, grand_total, row_masses, col_masses })
    }

    /// Builds a matrix from a dense table. Row ids become sequence ids with
    /// unknown dates.
    pub fn from_dense(row_ids: &[String], vocab: &[String], counts: &[Vec<u32>]) -> Result<Self> {
        let docs = row_ids
            .iter()
            .map(|id| DocMeta { seq_id: id.clone(), prefix: String::new(), date: PartialDate::unknown() })
            .collect();
        let rows = counts
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|&(_, &c)| c > 0)
                    .map(|(j, &c)| (j as u32, c))
                    .collect()
            })
            .collect();
        Self::from_sparse(docs, vocab.to_vec(), rows)
    }

    pub fn n_docs(&self) -> usize {
        self.docs.len()
    }

    pub fn n_words(&self) -> usize {
        self.vocab.len()
    }

    pub fn docs(&self) -> &[DocMeta] {
        &self.docs
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    /// Sparse `(column, count)` entries of row `i`, sorted by column.
    pub fn row(&self, i: usize) -> &[(u32, u32)] {
        &self.rows[i]
    }

    pub fn row_totals(&self) -> &[u64] {
        &self.row_totals
    }

    pub fn col_totals(&self) -> &[u64] {
        &self.col_totals
    }

    pub fn grand_total(&self) -> u64 {
        self.grand_total
    }

    pub fn row_masses(&self) -> &[f64] {
        &self.row_masses
    }

    pub fn col_masses(&self) -> &[f64] {
        &self.col_masses
    }

    pub fn nonzero(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn density(&self) -> f64 {
        self.nonzero() as f64 / (self.n_docs() as f64 * self.n_words() as f64)
    }

    pub fn word_index(&self, word: &str) -> Option<usize> {
        self.vocab.binary_search_by(|w| w.as_str().cmp(word)).ok()
    }

    pub fn doc_index(&self, seq_id: &str) -> Option<usize> {
        self.docs.iter().position(|d| d.seq_id == seq_id)
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        let row = &self.rows[i];
        row.binary_search_by_key(&(j as u32), |&(c, _)| c)
            .map_or(0, |k| row[k].1)
    }

    /// Dense copy of column `j`.
    pub fn column(&self, j: usize) -> Vec<u32> {
        (0..self.n_docs()).map(|i| self.get(i, j)).collect()
    }

    /// Dense copy of all columns, indexed `[column][row]`.
    pub fn columns_dense(&self) -> Vec<Vec<u32>> {
        let mut cols = vec![vec![0u32; self.n_docs()]; self.n_words()];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, c) in row {
                cols[j as usize][i] = c;
            }
        }
        cols
    }

    /// Re-expands the rows into documents whose token multisets are the row
    /// counts. Raw text is not retained by the matrix and comes back empty.
    pub fn to_documents(&self) -> Vec<Document> {
        self.docs
            .iter()
            .zip(&self.rows)
            .map(|(meta, row)| Document {
                seq_id: meta.seq_id.clone(),
                prefix: meta.prefix.clone(),
                date: meta.date,
                raw_text: String::new(),
                tokens: row.iter().map(|&(j, c)| (self.vocab[j as usize].clone(), c)).collect(),
            })
            .collect()
    }

    /// Dense CSV: header row is the vocabulary, first column the sequence id.
    pub fn to_csv(&self) -> Result<String> {
        let mut header = vec!["seq_id".to_string()];
        header.extend(self.vocab.iter().cloned());
        let rows = (0..self.n_docs()).map(|i| {
            let mut rec = Vec::with_capacity(self.n_words() + 1);
            rec.push(self.docs[i].seq_id.clone());
            let mut dense = vec![0u32; self.n_words()];
            for &(j, c) in &self.rows[i] {
                dense[j as usize] = c;
            }
            rec.extend(dense.iter().map(u32::to_string));
            rec
        });
        csv_string(&header, rows)
    }
}

/// Bookkeeping from [`build_matrix`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildReport {
    pub docs_in: usize,
    /// Sequence ids of documents left with no counted word.
    pub docs_dropped: Vec<String>,
    /// Distinct words before thresholding.
    pub vocab_raw: usize,
    pub vocab_kept: usize,
    pub nonzero: usize,
    /// `nonzero / (docs_in * vocab_kept)`.
    pub density: f64,
}

impl fmt::Display for BuildReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "docs={} dropped={} vocab_raw={} vocab={} nonzero={} density={:.2}%",
            self.docs_in,
            self.docs_dropped.len(),
            self.vocab_raw,
            self.vocab_kept,
            self.nonzero,
            100.0 * self.density
        )
    }
}

/// Builds the thresholded term/document matrix.
///
/// Keeps words whose corpus-wide count is at least `min_count`, then drops
/// documents with no remaining word. Rows come out in sequence-id order.
pub fn build_matrix(docs: &[Document], min_count: u32) -> Result<(TermDocMatrix, BuildReport)> {
    if min_count == 0 {
        return Err(Error::InvalidArgument("min_count must be positive".into()));
    }
    if docs.is_empty() {
        return Err(Error::EmptyCorpus("no documents".into()));
    }
    let mut sorted: Vec<&Document> = docs.iter().collect();
    sorted.sort_by(|a, b| a.seq_id.cmp(&b.seq_id));

    let mut totals: BTreeMap<&str, u64> = BTreeMap::new();
    for d in &sorted {
        for (w, &c) in &d.tokens {
            *totals.entry(w.as_str()).or_insert(0) += u64::from(c);
        }
    }
    let vocab_raw = totals.len();
    let vocab: Vec<String> = totals
        .iter()
        .filter(|&(_, &t)| t >= u64::from(min_count))
        .map(|(w, _)| w.to_string())
        .collect();

    let (metas, rows, dropped) = select_rows(&sorted, &vocab);
    if rows.is_empty() || vocab.is_empty() {
        return Err(Error::EmptyCorpus(format!(
            "every document is empty once words used fewer than {min_count} times are removed"
        )));
    }
    let matrix = TermDocMatrix::from_sparse(metas, vocab, rows)?;
    let nonzero = matrix.nonzero();
    let report = BuildReport {
        docs_in: docs.len(),
        docs_dropped: dropped,
        vocab_raw,
        vocab_kept: matrix.n_words(),
        nonzero,
        density: nonzero as f64 / (docs.len() as f64 * matrix.n_words() as f64),
    };
    Ok((matrix, report))
}

type Rows = (Vec<DocMeta>, Vec<Vec<(u32, u32)>>, Vec<String>);

fn select_rows(docs: &[&Document], vocab: &[String]) -> Rows {
    let index: BTreeMap<&str, u32> = vocab.iter().enumerate().map(|(j, w)| (w.as_str(), j as u32)).collect();
    let mut metas = Vec::new();
    let mut rows = Vec::new();
    let mut dropped = Vec::new();
    for d in docs {
        let row: Vec<(u32, u32)> = d
            .tokens
            .iter()
            .filter_map(|(w, &c)| index.get(w.as_str()).map(|&j| (j, c)))
            .filter(|&(_, c)| c > 0)
            .collect();
        if row.is_empty() {
            dropped.push(d.seq_id.clone());
        } else {
            metas.push(DocMeta { seq_id: d.seq_id.clone(), prefix: d.prefix.clone(), date: d.date });
            rows.push(row);
        }
    }
    (metas, rows, dropped)
}

/// Bookkeeping from [`extract_subcorpus`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubcorpusReport {
    pub name: String,
    /// Documents of the parent matrix that contain the name.
    pub docs: usize,
    /// Vocabulary of the parent matrix.
    pub parent_vocab: usize,
    /// Parent words occurring at least once in the selected documents.
    pub vocab_nonzero: usize,
    /// Words reaching the threshold within the selection.
    pub vocab_kept: usize,
    /// Nonzero share of the selected rows over the parent vocabulary.
    pub density_initial: f64,
    /// Nonzero share of the final matrix.
    pub density: f64,
    pub docs_dropped: Vec<String>,
}

impl fmt::Display for SubcorpusReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "name={} docs={} vocab_parent={} vocab_nonzero={} vocab={} density_initial={:.2}% density={:.2}% dropped={}",
            self.name,
            self.docs,
            self.parent_vocab,
            self.vocab_nonzero,
            self.vocab_kept,
            100.0 * self.density_initial,
            100.0 * self.density,
            self.docs_dropped.len()
        )
    }
}

/// Restricts the corpus to documents mentioning `name` and rebuilds the
/// vocabulary within that selection.
///
/// The parent matrix is built with `min_count` first; its rows containing the
/// name are kept, parent words absent from the selection are dropped, and
/// `min_count` is applied again to totals within the selection.
pub fn extract_subcorpus(docs: &[Document], name: &str, min_count: u32) -> Result<(TermDocMatrix, SubcorpusReport)> {
    let name = name.trim().to_lowercase();
    let (parent, _) = build_matrix(docs, min_count)?;
    let Some(name_col) = parent.word_index(&name) else {
        if docs.iter().any(|d| d.tokens.contains_key(&name)) {
            return Err(Error::UnknownWord(name));
        }
        let near_misses = near_misses(&name, docs.iter().map(|d| &d.tokens), 5);
        return Err(Error::NameNotFound { name, near_misses });
    };
    let selected: Vec<usize> = (0..parent.n_docs()).filter(|&i| parent.get(i, name_col) > 0).collect();

    let mut totals = vec![0u64; parent.n_words()];
    let mut nnz = 0usize;
    for &i in &selected {
        for &(j, c) in parent.row(i) {
            totals[j as usize] += u64::from(c);
            nnz += 1;
        }
    }
    let vocab_nonzero = totals.iter().filter(|&&t| t > 0).count();
    let keep: Vec<usize> = (0..parent.n_words()).filter(|&j| totals[j] >= u64::from(min_count)).collect();
    let mut remap = vec![u32::MAX; parent.n_words()];
    for (new, &old) in keep.iter().enumerate() {
        remap[old] = new as u32;
    }
    let vocab: Vec<String> = keep.iter().map(|&j| parent.vocab()[j].clone()).collect();

    let mut metas = Vec::new();
    let mut rows = Vec::new();
    let mut dropped = Vec::new();
    for &i in &selected {
        let row: Vec<(u32, u32)> = parent
            .row(i)
            .iter()
            .filter(|&&(j, _)| remap[j as usize] != u32::MAX)
            .map(|&(j, c)| (remap[j as usize], c))
            .collect();
        if row.is_empty() {
            dropped.push(parent.docs()[i].seq_id.clone());
        } else {
            metas.push(parent.docs()[i].clone());
            rows.push(row);
        }
    }
    if rows.is_empty() || vocab.is_empty() {
        return Err(Error::EmptyCorpus(format!(
            "no word reaches {min_count} occurrences within the documents containing {name:?}"
        )));
    }
    let matrix = TermDocMatrix::from_sparse(metas, vocab, rows)?;
    let report = SubcorpusReport {
        name,
        docs: selected.len(),
        parent_vocab: parent.n_words(),
        vocab_nonzero,
        vocab_kept: matrix.n_words(),
        density_initial: nnz as f64 / (selected.len() as f64 * parent.n_words() as f64),
        density: matrix.density(),
        docs_dropped: dropped,
    };
    Ok((matrix, report))
}

/// Up to `limit` corpus tokens closest to `word` by edit distance (at most 2).
pub fn near_misses<'a, I>(word: &str, token_sets: I, limit: usize) -> Vec<String>
where
    I: IntoIterator<Item = &'a TokenCounts>,
{
    let all: BTreeSet<&str> = token_sets.into_iter().flat_map(|t| t.keys().map(String::as_str)).collect();
    let mut scored: Vec<(usize, &str)> = all
        .into_iter()
        .map(|w| (levenshtein(word, w), w))
        .filter(|&(d, _)| d <= 2)
        .collect();
    scored.sort();
    scored.into_iter().take(limit).map(|(_, w)| w.to_string()).collect()
}

fn levenshtein(a: &str, b: &str) -> usize {
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.chars().enumerate() {
        let mut cur = vec![i + 1; b.len() + 1];
        for (j, &cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        prev = cur;
    }
    prev[b.len()]
}
