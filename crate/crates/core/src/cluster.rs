//! Agglomerative clustering of documents under a sequence-contiguity
//! constraint, with JSON and SVG dendrogram export.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::ca::CaModel;
use crate::error::{Error, Result};
use crate::json::{from_json, to_json};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    /// Increase in mass-weighted within-cluster inertia.
    #[default]
    Ward,
    /// Largest Euclidean distance between members.
    Complete,
    /// Mean Euclidean distance between members (unweighted by mass).
    Average,
}

impl Linkage {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "ward" => Ok(Linkage::Ward),
            "complete" => Ok(Linkage::Complete),
            "average" => Ok(Linkage::Average),
            other => Err(Error::UnsupportedFormat { given: other.into(), supported: "ward, complete, average".into() }),
        }
    }
}

/// One agglomeration step. Cluster ids follow the R `hclust` convention:
/// leaf `i` (0-based) is `-(i + 1)`, the cluster formed at step `s`
/// (0-based) is `s + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Merge {
    pub left: i64,
    pub right: i64,
    pub height: f64,
    /// Height is below the larger of the children's heights.
    pub inversion: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    pub leaves: Vec<String>,
    pub merges: Vec<Merge>,
    pub linkage: Linkage,
    pub constrained: bool,
}

fn leaf_id(i: usize) -> i64 {
    -(i as i64 + 1)
}

/// Runs the agglomeration on `coords` (one row per item, in sequence order).
///
/// With `constrained`, only clusters adjacent in the sequence may merge.
/// Among equal criteria the leftmost pair wins (for the unconstrained mode,
/// the lexicographically smallest pair of positions).
pub fn hclust(coords: &[Vec<f64>], weights: &[f64], linkage: Linkage, constrained: bool) -> Result<Vec<Merge>> {
    let n = coords.len();
    if n < 2 {
        return Err(Error::TooFewValues { needed: 2, got: n });
    }
    if weights.len() != n {
        return Err(Error::InvalidArgument(format!("{} weights for {} points", weights.len(), n)));
    }
    if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(Error::InvalidValue(i));
    }
    if coords.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Numeric("non-finite coordinate".into()));
    }

    let mut d = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let sq: f64 = coords[i].iter().zip(&coords[j]).map(|(a, b)| (a - b).powi(2)).sum();
            let v = match linkage {
                Linkage::Ward => weights[i] * weights[j] / (weights[i] + weights[j]) * sq,
                Linkage::Complete | Linkage::Average => sq.sqrt(),
            };
            d[i][j] = v;
            d[j][i] = v;
        }
    }

    // `order` holds the slots of live clusters in sequence order.
    let mut order: Vec<usize> = (0..n).collect();
    let mut mass = weights.to_vec();
    let mut size = vec![1usize; n];
    let mut id: Vec<i64> = (0..n).map(leaf_id).collect();
    let mut height_of = vec![0.0f64; n];
    let mut merges = Vec::with_capacity(n - 1);

    for step in 0..n - 1 {
        let (pa, pb) = if constrained {
            let mut best = 0;
            for p in 1..order.len() - 1 {
                if d[order[p]][order[p + 1]] < d[order[best]][order[best + 1]] {
                    best = p;
                }
            }
            (best, best + 1)
        } else {
            let mut best = (0, 1);
            for p in 0..order.len() {
                for q in p + 1..order.len() {
                    if d[order[p]][order[q]] < d[order[best.0]][order[best.1]] {
                        best = (p, q);
                    }
                }
            }
            best
        };
        let (a, b) = (order[pa], order[pb]);
        let h = d[a][b].max(0.0);
        let inversion = h < height_of[a].max(height_of[b]);
        merges.push(Merge { left: id[a], right: id[b], height: h, inversion });

        for &k in &order {
            if k == a || k == b {
                continue;
            }
            let v = match linkage {
                Linkage::Ward => {
                    let (ma, mb, mk) = (mass[a], mass[b], mass[k]);
                    ((ma + mk) * d[k][a] + (mb + mk) * d[k][b] - mk * d[a][b]) / (ma + mb + mk)
                }
                Linkage::Complete => d[k][a].max(d[k][b]),
                Linkage::Average => {
                    let (sa, sb) = (size[a] as f64, size[b] as f64);
                    (sa * d[k][a] + sb * d[k][b]) / (sa + sb)
                }
            };
            d[k][a] = v;
            d[a][k] = v;
        }
        mass[a] += mass[b];
        size[a] += size[b];
        id[a] = step as i64 + 1;
        height_of[a] = h;
        order.remove(pb);
    }
    Ok(merges)
}

/// Chronologically constrained clustering of `labels` at `coords`.
pub fn constrained_hclust(labels: &[String], coords: &[Vec<f64>], weights: &[f64], linkage: Linkage) -> Result<Dendrogram> {
    if labels.len() != coords.len() {
        return Err(Error::InvalidArgument(format!("{} labels for {} points", labels.len(), coords.len())));
    }
    let merges = hclust(coords, weights, linkage, true)?;
    Ok(Dendrogram { leaves: labels.to_vec(), merges, linkage, constrained: true })
}

/// Clusters the fitted documents of `model` in sequence order, using all
/// axes and the row masses as weights.
pub fn cluster_documents(model: &CaModel, linkage: Linkage) -> Result<Dendrogram> {
    if model.rank == 0 {
        return Err(Error::NoFactorSpace);
    }
    let labels: Vec<String> = model.row_docs.iter().map(|d| d.seq_id.clone()).collect();
    constrained_hclust(&labels, &model.rows.principal, &model.rows.masses, linkage)
}

impl Dendrogram {
    /// Leaf index interval `(first, last)` covered by each merged cluster,
    /// or `None` if some cluster is not an interval.
    pub fn intervals(&self) -> Option<Vec<(usize, usize)>> {
        let mut members: Vec<Vec<usize>> = Vec::with_capacity(self.merges.len());
        let mut out = Vec::with_capacity(self.merges.len());
        for m in &self.merges {
            let mut set = self.members_of(m.left, &members)?;
            set.extend(self.members_of(m.right, &members)?);
            set.sort_unstable();
            let (lo, hi) = (set[0], *set.last()?);
            if hi - lo + 1 != set.len() {
                return None;
            }
            out.push((lo, hi));
            members.push(set);
        }
        Some(out)
    }

    fn members_of(&self, id: i64, done: &[Vec<usize>]) -> Option<Vec<usize>> {
        if id < 0 {
            let i = (-id - 1) as usize;
            (i < self.leaves.len()).then(|| vec![i])
        } else {
            done.get((id - 1) as usize).cloned()
        }
    }

    /// True when every merge joins two adjacent intervals, left before right.
    pub fn is_contiguous(&self) -> bool {
        let Some(iv) = self.intervals() else { return false };
        self.merges.iter().all(|m| {
            let span = |id: i64| if id < 0 { let i = (-id - 1) as usize; (i, i) } else { iv[(id - 1) as usize] };
            span(m.left).1 + 1 == span(m.right).0
        })
    }

    pub fn heights(&self) -> Vec<f64> {
        self.merges.iter().map(|m| m.height).collect()
    }

    /// Leaves in drawing order (left subtree first).
    pub fn leaf_order(&self) -> Vec<usize> {
        if self.merges.is_empty() {
            return (0..self.leaves.len()).collect();
        }
        let mut out = Vec::with_capacity(self.leaves.len());
        let mut stack = vec![self.merges.len() as i64];
        while let Some(id) = stack.pop() {
            if id < 0 {
                out.push((-id - 1) as usize);
            } else {
                let m = &self.merges[(id - 1) as usize];
                stack.push(m.right);
                stack.push(m.left);
            }
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        to_json(&DendrogramRepr {
            linkage: self.linkage,
            constrained: self.constrained,
            leaves: self.leaves.clone(),
            merges: self.merges.iter().map(|m| (m.left, m.right, m.height)).collect(),
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let repr: DendrogramRepr = from_json(text)?;
        let n = repr.leaves.len();
        if n == 0 || repr.merges.len() != n - 1 {
            return Err(Error::Malformed {
                what: "dendrogram",
                message: format!("{} merges for {} leaves", repr.merges.len(), n),
            });
        }
        let mut heights: Vec<f64> = Vec::with_capacity(repr.merges.len());
        let mut merges = Vec::with_capacity(repr.merges.len());
        for (s, &(left, right, height)) in repr.merges.iter().enumerate() {
            let child = |id: i64| -> Result<f64> {
                if id < 0 && ((-id) as usize) <= n {
                    Ok(0.0)
                } else if id > 0 && (id as usize) <= s {
                    Ok(heights[(id - 1) as usize])
                } else {
                    Err(Error::Malformed { what: "dendrogram", message: format!("bad cluster id {id} at merge {}", s + 1) })
                }
            };
            let inversion = height < child(left)?.max(child(right)?);
            heights.push(height);
            merges.push(Merge { left, right, height, inversion });
        }
        Ok(Dendrogram { leaves: repr.leaves, merges, linkage: repr.linkage, constrained: repr.constrained })
    }

    /// Tree drawing: one `class="join"` path per merge (two legs and a
    /// horizontal bar), leaf labels along the bottom.
    pub fn to_svg(&self, size: SvgSize) -> String {
        let n = self.leaves.len();
        let (w, h) = (size.width as f64, size.height as f64);
        let (ml, mr, mt, mb) = (50.0, 20.0, 20.0, 70.0);
        let pw = (w - ml - mr).max(1.0);
        let ph = (h - mt - mb).max(1.0);
        let top = self.merges.iter().map(|m| m.height).fold(0.0f64, f64::max);
        let scale_y = |v: f64| if top > 0.0 { mt + ph * (1.0 - v / top) } else { mt + ph };
        let step = if n > 1 { pw / (n - 1) as f64 } else { 0.0 };

        let mut leaf_x = vec![0.0; n];
        for (pos, &leaf) in self.leaf_order().iter().enumerate() {
            leaf_x[leaf] = ml + step * pos as f64;
        }
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
            size.width, size.height, size.width, size.height
        );
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<line class="axis" x1="{ml:.2}" y1="{:.2}" x2="{ml:.2}" y2="{:.2}" stroke="black"/>"#,
            scale_y(0.0),
            scale_y(top)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">{}</text>"#,
            ml - 4.0,
            scale_y(top) + 4.0,
            fmt_tick(top)
        );
        let mut node: Vec<(f64, f64)> = Vec::with_capacity(self.merges.len());
        let pos = |id: i64, node: &[(f64, f64)]| -> (f64, f64) {
            if id < 0 {
                (leaf_x[(-id - 1) as usize], scale_y(0.0))
            } else {
                node[(id - 1) as usize]
            }
        };
        for (s, m) in self.merges.iter().enumerate() {
            let (xl, yl) = pos(m.left, &node);
            let (xr, yr) = pos(m.right, &node);
            let y = scale_y(m.height);
            let stroke = if m.inversion { "firebrick" } else { "black" };
            let _ = writeln!(
                out,
                r#"<path class="join" data-merge="{}" d="M{xl:.2},{yl:.2} V{y:.2} H{xr:.2} V{yr:.2}" fill="none" stroke="{stroke}"/>"#,
                s + 1
            );
            node.push(((xl + xr) / 2.0, y));
        }
        let font = if n > 60 { 6 } else { 9 };
        for (i, label) in self.leaves.iter().enumerate() {
            let (x, y) = (leaf_x[i], scale_y(0.0) + 6.0);
            let _ = writeln!(
                out,
                r#"<text class="leaf" x="{x:.2}" y="{y:.2}" font-size="{font}" transform="rotate(90 {x:.2} {y:.2})">{}</text>"#,
                escape(label)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

#[derive(Serialize, Deserialize)]
struct DendrogramRepr {
    linkage: Linkage,
    constrained: bool,
    leaves: Vec<String>,
    merges: Vec<(i64, i64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SvgSize {
    pub width: u32,
    pub height: u32,
}

impl Default for SvgSize {
    fn default() -> Self {
        SvgSize { width: 900, height: 500 }
    }
}

pub const EXPORT_FORMATS: &str = "json, svg";

/// Serializes `d` as `json` or `svg`.
pub fn dendrogram_export(d: &Dendrogram, format: &str, size: SvgSize) -> Result<String> {
    match format {
        "json" => d.to_json(),
        "svg" => Ok(d.to_svg(size)),
        other => Err(Error::UnsupportedFormat { given: other.to_string(), supported: EXPORT_FORMATS.into() }),
    }
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 || (1e-3..1e4).contains(&v.abs()) {
        format!("{v:.3}")
    } else {
        format!("{v:.2e}")
    }
}

pub(crate) fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}
