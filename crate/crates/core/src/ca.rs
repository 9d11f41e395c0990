//! Correspondence analysis with active and supplementary columns.
//!
//! The active columns of a [`TermDocMatrix`] define the factor space: the
//! standardized residual matrix
//!
//! ```text
//! S = D_r^-1/2 (P - r c') D_c^-1/2
//! ```
//!
//! is decomposed by a dense SVD (one-sided Jacobi), and the squared singular values are the
//! principal inertias. Remaining words are placed afterwards with the
//! transition formula and do not influence the axes.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::corpus::{DocMeta, TermDocMatrix};
use crate::error::{Error, Result};
use crate::linalg::svd;
use crate::table::{csv_string, fmt_opt};

/// Singular values at or below this (times `max(sigma_max, 1)`) are zero.
pub const RANK_TOLERANCE: f64 = 1e-12;

/// Squared profile distances at or below this have no defined direction.
const ZERO_DISTANCE: f64 = 1e-24;

/// Relative gap under which two absolute coordinates count as tied when
/// orienting an axis.
const SIGN_TIE: f64 = 1e-9;

/// Which words define the axes and which are only projected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FocusSpec {
    pub active: Vec<String>,
    pub supplementary: Vec<String>,
}

impl FocusSpec {
    pub fn new(active: Vec<String>, supplementary: Vec<String>) -> Result<Self> {
        if active.is_empty() {
            return Err(Error::InvalidFocus("no active columns".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for w in active.iter().chain(&supplementary) {
            if !seen.insert(w.as_str()) {
                return Err(Error::InvalidFocus(format!("{w:?} listed twice")));
            }
        }
        Ok(FocusSpec { active, supplementary })
    }

    /// `active` words, with every other vocabulary word supplementary.
    pub fn with_rest(matrix: &TermDocMatrix, active: &[String]) -> Result<Self> {
        let supplementary = matrix
            .vocab()
            .iter()
            .filter(|w| !active.contains(w))
            .cloned()
            .collect();
        Self::new(active.to_vec(), supplementary)
    }

    /// Every vocabulary word active.
    pub fn all_active(matrix: &TermDocMatrix) -> Self {
        FocusSpec { active: matrix.vocab().to_vec(), supplementary: Vec::new() }
    }

    fn describe(&self) -> String {
        format!("[{}]", self.active.join(", "))
    }
}

/// Coordinates and diagnostics of one set of points, row-major (`points x K`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    pub labels: Vec<String>,
    pub masses: Vec<f64>,
    pub principal: Vec<Vec<f64>>,
    pub standard: Vec<Vec<f64>>,
    pub contributions: Vec<Vec<f64>>,
    /// `None` where the point coincides with the centroid.
    pub cos2: Vec<Vec<Option<f64>>>,
    /// Full-space squared chi-squared distance to the centroid.
    pub sq_dist: Vec<f64>,
}

/// Projected words: coordinates and quality, no contributions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupplementarySet {
    pub labels: Vec<String>,
    /// Occurrences over the rows of the active fit.
    pub totals: Vec<u64>,
    pub principal: Vec<Vec<f64>>,
    pub cos2: Vec<Vec<Option<f64>>>,
    pub sq_dist: Vec<f64>,
}

/// A document left out of the active fit because none of its words is active.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectedRow {
    pub doc: DocMeta,
    pub principal: Vec<f64>,
}

/// Fitted factor space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaModel {
    pub focus: FocusSpec,
    /// Number of nontrivial axes kept.
    pub rank: usize,
    /// Principal inertias, decreasing.
    pub eigenvalues: Vec<f64>,
    pub singular_values: Vec<f64>,
    /// Pearson chi-squared of the active table over its grand total.
    pub total_inertia: f64,
    pub inertia_pct: Vec<f64>,
    pub cumulative_pct: Vec<f64>,
    /// Grand total of the active table.
    pub active_total: u64,
    pub row_docs: Vec<DocMeta>,
    pub rows: PointSet,
    pub active_cols: PointSet,
    pub sup_cols: SupplementarySet,
    pub dropped_rows: Vec<ProjectedRow>,
    /// Supplementary words with no occurrence in the fitted rows.
    pub skipped_supplementary: Vec<String>,
}

/// Point family addressed by the diagnostic accessors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointKind {
    Rows,
    ActiveColumns,
    SupplementaryColumns,
}

/// Labelled numeric table with optional cells, exported as CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub corner: String,
    pub row_labels: Vec<String>,
    pub columns: Vec<String>,
    pub values: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn to_csv(&self) -> Result<String> {
        let mut header = vec![self.corner.clone()];
        header.extend(self.columns.iter().cloned());
        csv_string(
            &header,
            self.row_labels.iter().zip(&self.values).map(|(label, vals)| {
                std::iter::once(label.clone()).chain(vals.iter().map(|&v| fmt_opt(v)))
            }),
        )
    }

    /// Value at `(row label, column index)`.
    pub fn get(&self, label: &str, col: usize) -> Option<f64> {
        let i = self.row_labels.iter().position(|l| l == label)?;
        self.values[i][col]
    }
}

/// Fits correspondence analysis on the active columns of `matrix`.
///
/// Rows with no active occurrence are left out of the fit and placed
/// afterwards from their supplementary words (see [`CaModel::dropped_rows`]).
pub fn fit_ca(matrix: &TermDocMatrix, focus: &FocusSpec) -> Result<CaModel> {
    let lookup = |w: &String| matrix.word_index(w).ok_or_else(|| Error::UnknownWord(w.clone()));
    let active_idx: Vec<usize> = focus.active.iter().map(lookup).collect::<Result<_>>()?;
    let sup_idx: Vec<usize> = focus.supplementary.iter().map(lookup).collect::<Result<_>>()?;
    if active_idx.len() < 2 {
        return Err(Error::DegenerateFocus {
            focus: focus.describe(),
            reason: "at least two active columns are needed for any inertia".into(),
        });
    }

    let columns = matrix.columns_dense();
    let mut row_active = vec![0u64; matrix.n_docs()];
    for &j in &active_idx {
        for (i, &c) in columns[j].iter().enumerate() {
            row_active[i] += u64::from(c);
        }
    }
    let kept: Vec<usize> = (0..matrix.n_docs()).filter(|&i| row_active[i] > 0).collect();
    let dropped: Vec<usize> = (0..matrix.n_docs()).filter(|&i| row_active[i] == 0).collect();
    if kept.len() < 2 {
        return Err(Error::DegenerateFocus {
            focus: focus.describe(),
            reason: format!("only {} document(s) contain an active word", kept.len()),
        });
    }

    let n_rows = kept.len();
    let n_cols = active_idx.len();
    let total: u64 = kept.iter().map(|&i| row_active[i]).sum();
    let n = total as f64;
    let p: Vec<Vec<f64>> = kept
        .iter()
        .map(|&i| active_idx.iter().map(|&j| f64::from(columns[j][i]) / n).collect())
        .collect();
    let r: Vec<f64> = p.iter().map(|row| row.iter().sum()).collect();
    let c: Vec<f64> = (0..n_cols).map(|b| p.iter().map(|row| row[b]).sum()).collect();
    let s: Vec<Vec<f64>> = (0..n_rows)
        .map(|a| (0..n_cols).map(|b| (p[a][b] - r[a] * c[b]) / (r[a] * c[b]).sqrt()).collect())
        .collect();
    let total_inertia: f64 = s.iter().flatten().map(|x| x * x).sum();

    let dec = svd(&s).ok_or_else(|| Error::Numeric("singular value decomposition did not converge".into()))?;
    let sigma_max = dec.sigma.first().copied().unwrap_or(0.0);
    let cutoff = RANK_TOLERANCE * sigma_max.max(1.0);
    let axes: Vec<usize> = (0..dec.sigma.len()).filter(|&k| dec.sigma[k] > cutoff).collect();
    let rank = axes.len();

    let sigma: Vec<f64> = axes.iter().map(|&k| dec.sigma[k]).collect();
    let mut row_std = vec![vec![0.0; rank]; n_rows];
    let mut col_std = vec![vec![0.0; rank]; n_cols];
    for (k, &ax) in axes.iter().enumerate() {
        for a in 0..n_rows {
            row_std[a][k] = dec.u[a][ax] / r[a].sqrt();
        }
        for b in 0..n_cols {
            col_std[b][k] = dec.v[b][ax] / c[b].sqrt();
        }
        if axis_needs_flip(&col_std, k, &focus.active) {
            row_std.iter_mut().for_each(|row| row[k] = -row[k]);
            col_std.iter_mut().for_each(|col| col[k] = -col[k]);
        }
    }
    let scale = |std: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
        std.iter().map(|v| v.iter().zip(&sigma).map(|(x, s)| x * s).collect()).collect()
    };
    let row_pc = scale(&row_std);
    let col_pc = scale(&col_std);
    let eigenvalues: Vec<f64> = sigma.iter().map(|s| s * s).collect();

    // full-space squared distances from the profiles
    let row_d2: Vec<f64> = (0..n_rows)
        .map(|a| (0..n_cols).map(|b| (p[a][b] / r[a] - c[b]).powi(2) / c[b]).sum())
        .collect();
    let col_d2: Vec<f64> = (0..n_cols)
        .map(|b| (0..n_rows).map(|a| (p[a][b] / c[b] - r[a]).powi(2) / r[a]).sum())
        .collect();

    let row_docs: Vec<DocMeta> = kept.iter().map(|&i| matrix.docs()[i].clone()).collect();
    let rows = point_set(
        row_docs.iter().map(|d| d.seq_id.clone()).collect(),
        r.clone(),
        row_pc,
        row_std,
        row_d2,
        &eigenvalues,
    );
    let active_cols = point_set(focus.active.clone(), c.clone(), col_pc, col_std, col_d2, &eigenvalues);

    // supplementary columns by the transition formula
    let mut sup = SupplementarySet {
        labels: Vec::new(),
        totals: Vec::new(),
        principal: Vec::new(),
        cos2: Vec::new(),
        sq_dist: Vec::new(),
    };
    let mut skipped = Vec::new();
    for (word, &j) in focus.supplementary.iter().zip(&sup_idx) {
        let col: Vec<f64> = kept.iter().map(|&i| f64::from(columns[j][i])).collect();
        let t: f64 = col.iter().sum();
        if t == 0.0 {
            skipped.push(word.clone());
            continue;
        }
        let profile: Vec<f64> = col.iter().map(|x| x / t).collect();
        let coords = barycenter(&profile, &rows.standard, rank);
        let d2: f64 = profile.iter().zip(&r).map(|(q, ri)| (q - ri).powi(2) / ri).sum();
        sup.cos2.push(cos2_of(&coords, d2));
        sup.labels.push(word.clone());
        sup.totals.push(t as u64);
        sup.principal.push(coords);
        sup.sq_dist.push(d2);
    }

    // documents with no active word: placed from their supplementary words
    let sup_std: Vec<Vec<f64>> = sup
        .principal
        .iter()
        .map(|g| g.iter().zip(&sigma).map(|(x, s)| x / s).collect())
        .collect();
    let sup_pos: Vec<usize> = sup
        .labels
        .iter()
        .map(|w| matrix.word_index(w).expect("validated above"))
        .collect();
    let dropped_rows = dropped
        .iter()
        .map(|&i| {
            let weights: Vec<f64> = sup_pos.iter().map(|&j| f64::from(columns[j][i])).collect();
            let t: f64 = weights.iter().sum();
            let principal = if t > 0.0 {
                let profile: Vec<f64> = weights.iter().map(|w| w / t).collect();
                barycenter(&profile, &sup_std, rank)
            } else {
                vec![0.0; rank]
            };
            ProjectedRow { doc: matrix.docs()[i].clone(), principal }
        })
        .collect();

    let (inertia_pct, cumulative_pct) = percentages(&eigenvalues);
    Ok(CaModel {
        focus: focus.clone(),
        rank,
        singular_values: sigma,
        eigenvalues,
        total_inertia,
        inertia_pct,
        cumulative_pct,
        active_total: total,
        row_docs,
        rows,
        active_cols,
        sup_cols: sup,
        dropped_rows,
        skipped_supplementary: skipped,
    })
}

// Orientation: the active column with the largest |coordinate| on the axis is
// positive; near-ties go to the lexicographically smallest word.
fn axis_needs_flip(col_std: &[Vec<f64>], k: usize, words: &[String]) -> bool {
    let max_abs = col_std.iter().map(|v| v[k].abs()).fold(0.0, f64::max);
    let pick = col_std
        .iter()
        .enumerate()
        .filter(|(_, v)| v[k].abs() >= max_abs * (1.0 - SIGN_TIE))
        .min_by(|(a, _), (b, _)| words[*a].cmp(&words[*b]))
        .map(|(j, _)| j);
    pick.is_some_and(|j| col_std[j][k] < 0.0)
}

fn barycenter(profile: &[f64], std_coords: &[Vec<f64>], rank: usize) -> Vec<f64> {
    let mut out = vec![0.0; rank];
    for (q, coords) in profile.iter().zip(std_coords) {
        if *q != 0.0 {
            for (o, x) in out.iter_mut().zip(coords) {
                *o += q * x;
            }
        }
    }
    out
}

fn cos2_of(coords: &[f64], d2: f64) -> Vec<Option<f64>> {
    coords
        .iter()
        .map(|x| (d2 > ZERO_DISTANCE).then(|| (x * x / d2).min(1.0)))
        .collect()
}

fn point_set(
    labels: Vec<String>,
    masses: Vec<f64>,
    principal: Vec<Vec<f64>>,
    standard: Vec<Vec<f64>>,
    sq_dist: Vec<f64>,
    eigenvalues: &[f64],
) -> PointSet {
    let contributions = principal
        .iter()
        .zip(&masses)
        .map(|(coords, m)| {
            coords
                .iter()
                .zip(eigenvalues)
                .map(|(x, l)| 100.0 * m * x * x / l)
                .collect()
        })
        .collect();
    let cos2 = principal.iter().zip(&sq_dist).map(|(coords, &d2)| cos2_of(coords, d2)).collect();
    PointSet { labels, masses, principal, standard, contributions, cos2, sq_dist }
}

fn percentages(eigenvalues: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let sum: f64 = eigenvalues.iter().sum();
    if sum <= 0.0 {
        return (vec![0.0; eigenvalues.len()], vec![0.0; eigenvalues.len()]);
    }
    let pct: Vec<f64> = eigenvalues.iter().map(|l| 100.0 * l / sum).collect();
    let cum = pct
        .iter()
        .scan(0.0, |acc, x| {
            *acc += x;
            Some(*acc)
        })
        .collect();
    (pct, cum)
}

/// Eigenvalues with their percentage and cumulative percentage of inertia.
pub fn inertia_decomposition(model: &CaModel) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    (model.eigenvalues.clone(), model.inertia_pct.clone(), model.cumulative_pct.clone())
}

/// Percentage contributions to the axes in `axes` (1-based, inclusive).
///
/// Supplementary columns carry no inertia and have no contributions.
pub fn contributions(model: &CaModel, kind: PointKind, axes: RangeInclusive<usize>) -> Result<Table> {
    let axes = model.check_axes(axes)?;
    let set = match kind {
        PointKind::Rows => &model.rows,
        PointKind::ActiveColumns => &model.active_cols,
        PointKind::SupplementaryColumns => {
            return Err(Error::InvalidArgument(
                "supplementary columns have no contributions; use squared cosines".into(),
            ))
        }
    };
    Ok(model.table("ctr", &set.labels, &set.contributions, axes, |&v| Some(v)))
}

/// Squared cosines on the axes in `axes` (1-based, inclusive). Points at
/// the centroid are reported as undefined (`None`).
pub fn squared_cosines(model: &CaModel, kind: PointKind, axes: RangeInclusive<usize>) -> Result<Table> {
    let axes = model.check_axes(axes)?;
    let (labels, values) = match kind {
        PointKind::Rows => (&model.rows.labels, &model.rows.cos2),
        PointKind::ActiveColumns => (&model.active_cols.labels, &model.active_cols.cos2),
        PointKind::SupplementaryColumns => (&model.sup_cols.labels, &model.sup_cols.cos2),
    };
    Ok(model.table("cos2", labels, values, axes, |v| *v))
}

/// Projects arbitrary vocabulary columns into a fitted space by the
/// transition formula. Words with no occurrence in the fitted rows are
/// returned in the second list instead.
pub fn project_supplementary_columns(
    model: &CaModel,
    matrix: &TermDocMatrix,
    words: &[String],
) -> Result<(Table, Vec<String>)> {
    let rows: Vec<usize> = model
        .row_docs
        .iter()
        .map(|d| {
            matrix
                .doc_index(&d.seq_id)
                .ok_or_else(|| Error::InvalidArgument(format!("document {} is not in the matrix", d.seq_id)))
        })
        .collect::<Result<_>>()?;
    let mut labels = Vec::new();
    let mut values = Vec::new();
    let mut skipped = Vec::new();
    for w in words {
        let j = matrix.word_index(w).ok_or_else(|| Error::UnknownWord(w.clone()))?;
        let col: Vec<f64> = rows.iter().map(|&i| f64::from(matrix.get(i, j))).collect();
        let t: f64 = col.iter().sum();
        if t == 0.0 {
            skipped.push(w.clone());
            continue;
        }
        let profile: Vec<f64> = col.iter().map(|x| x / t).collect();
        labels.push(w.clone());
        values.push(barycenter(&profile, &model.rows.standard, model.rank).into_iter().map(Some).collect());
    }
    Ok((
        Table { corner: "word".into(), row_labels: labels, columns: dim_names(1..=model.rank), values },
        skipped,
    ))
}

/// Squared chi-squared distance between the column profiles of `a` and `b`,
/// weighted by the inverse row masses of `matrix`.
pub fn chi2_profile_distance(matrix: &TermDocMatrix, a: &str, b: &str) -> Result<f64> {
    let ja = matrix.word_index(a).ok_or_else(|| Error::UnknownWord(a.into()))?;
    let jb = matrix.word_index(b).ok_or_else(|| Error::UnknownWord(b.into()))?;
    let (ta, tb) = (matrix.col_totals()[ja] as f64, matrix.col_totals()[jb] as f64);
    if ta == 0.0 {
        return Err(Error::ZeroColumn(a.into()));
    }
    if tb == 0.0 {
        return Err(Error::ZeroColumn(b.into()));
    }
    Ok((0..matrix.n_docs())
        .map(|i| {
            let d = f64::from(matrix.get(i, ja)) / ta - f64::from(matrix.get(i, jb)) / tb;
            d * d / matrix.row_masses()[i]
        })
        .sum())
}

pub(crate) fn dim_names(axes: RangeInclusive<usize>) -> Vec<String> {
    axes.map(|k| format!("Dim {k}")).collect()
}

impl CaModel {
    fn check_axes(&self, axes: RangeInclusive<usize>) -> Result<RangeInclusive<usize>> {
        for axis in [*axes.start(), *axes.end()] {
            if axis == 0 || axis > self.rank {
                return Err(Error::AxisOutOfRange { axis, rank: self.rank });
            }
        }
        Ok(axes)
    }

    fn table<T>(
        &self,
        corner: &str,
        labels: &[String],
        values: &[Vec<T>],
        axes: RangeInclusive<usize>,
        get: impl Fn(&T) -> Option<f64>,
    ) -> Table {
        let values = values
            .iter()
            .map(|row| axes.clone().map(|k| get(&row[k - 1])).collect())
            .collect();
        Table {
            corner: corner.into(),
            row_labels: labels.to_vec(),
            columns: dim_names(axes),
            values,
        }
    }

    /// Principal coordinates of a word, active or supplementary.
    pub fn word_coords(&self, word: &str) -> Option<&[f64]> {
        if let Some(j) = self.active_cols.labels.iter().position(|w| w == word) {
            return Some(&self.active_cols.principal[j]);
        }
        self.sup_cols
            .labels
            .iter()
            .position(|w| w == word)
            .map(|j| self.sup_cols.principal[j].as_slice())
    }

    /// Principal coordinates of a document, fitted or projected.
    pub fn doc_coords(&self, seq_id: &str) -> Option<&[f64]> {
        if let Some(i) = self.row_docs.iter().position(|d| d.seq_id == seq_id) {
            return Some(&self.rows.principal[i]);
        }
        self.dropped_rows
            .iter()
            .find(|r| r.doc.seq_id == seq_id)
            .map(|r| r.principal.as_slice())
    }

    pub fn is_active(&self, word: &str) -> bool {
        self.focus.active.iter().any(|w| w == word)
    }

    /// Principal coordinates of `kind` as a table over all axes.
    pub fn coordinates(&self, kind: PointKind) -> Table {
        let (corner, labels, values) = match kind {
            PointKind::Rows => ("seq_id", &self.rows.labels, &self.rows.principal),
            PointKind::ActiveColumns => ("word", &self.active_cols.labels, &self.active_cols.principal),
            PointKind::SupplementaryColumns => ("word", &self.sup_cols.labels, &self.sup_cols.principal),
        };
        let mut t = self.table(corner, labels, values, 1..=self.rank, |&v| Some(v));
        if self.rank == 0 {
            t.columns.clear();
            t.values.iter_mut().for_each(Vec::clear);
        }
        t
    }

    /// Eigenvalue, percentage and cumulative percentage per axis.
    pub fn eigen_table(&self) -> Table {
        Table {
            corner: "axis".into(),
            row_labels: dim_names(1..=self.rank),
            columns: vec!["eigenvalue".into(), "percent".into(), "cumulative".into()],
            values: (0..self.rank)
                .map(|k| {
                    vec![
                        Some(self.eigenvalues[k]),
                        Some(self.inertia_pct[k]),
                        Some(self.cumulative_pct[k]),
                    ]
                })
                .collect(),
        }
    }

    /// Projected coordinates of the documents left out of the fit.
    pub fn dropped_table(&self) -> Table {
        Table {
            corner: "seq_id".into(),
            row_labels: self.dropped_rows.iter().map(|r| r.doc.seq_id.clone()).collect(),
            columns: dim_names(1..=self.rank),
            values: self.dropped_rows.iter().map(|r| r.principal.iter().map(|&v| Some(v)).collect()).collect(),
        }
    }

    /// Number of documents left out of the active fit.
    pub fn n_dropped_rows(&self) -> usize {
        self.dropped_rows.len()
    }
}
