//! Static SVG scatter plots of factor planes.

use std::fmt::Write as _;

use crate::ca::CaModel;
use crate::cluster::escape;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlaneOptions {
    pub width: u32,
    pub height: u32,
    pub documents: bool,
    pub supplementary: bool,
}

impl Default for PlaneOptions {
    fn default() -> Self {
        PlaneOptions { width: 700, height: 700, documents: true, supplementary: false }
    }
}

struct Point<'a> {
    class: &'static str,
    label: &'a str,
    x: f64,
    y: f64,
}

/// Scatter of the plane spanned by `axes` (1-based) in principal
/// coordinates, equal scale on both axes. Active words are always drawn and
/// labelled; documents are labelled by sequence id; supplementary words are
/// drawn unlabelled.
pub fn factor_plane_svg(model: &CaModel, axes: (usize, usize), opts: PlaneOptions) -> Result<String> {
    for axis in [axes.0, axes.1] {
        if axis == 0 || axis > model.rank {
            return Err(Error::AxisOutOfRange { axis, rank: model.rank });
        }
    }
    let (a, b) = (axes.0 - 1, axes.1 - 1);
    let mut points: Vec<Point> = Vec::new();
    if opts.supplementary {
        for (l, c) in model.sup_cols.labels.iter().zip(&model.sup_cols.principal) {
            points.push(Point { class: "supplementary", label: l, x: c[a], y: c[b] });
        }
    }
    if opts.documents {
        for (d, c) in model.row_docs.iter().zip(&model.rows.principal) {
            points.push(Point { class: "document", label: &d.seq_id, x: c[a], y: c[b] });
        }
    }
    for (l, c) in model.active_cols.labels.iter().zip(&model.active_cols.principal) {
        points.push(Point { class: "active", label: l, x: c[a], y: c[b] });
    }

    let reach = points.iter().map(|p| p.x.abs().max(p.y.abs())).fold(0.0f64, f64::max);
    let reach = if reach > 0.0 { reach * 1.1 } else { 1.0 };
    let (w, h) = (opts.width as f64, opts.height as f64);
    let margin = 40.0;
    let half = ((w.min(h) - 2.0 * margin) / 2.0).max(1.0);
    let (cx, cy) = (w / 2.0, h / 2.0);
    let sx = |x: f64| cx + x / reach * half;
    let sy = |y: f64| cy - y / reach * half;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{0}" height="{1}" viewBox="0 0 {0} {1}">"#,
        opts.width, opts.height
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r##"<line class="axis" x1="{:.2}" y1="{cy:.2}" x2="{:.2}" y2="{cy:.2}" stroke="#888"/>"##,
        cx - half,
        cx + half
    );
    let _ = writeln!(
        out,
        r##"<line class="axis" x1="{cx:.2}" y1="{:.2}" x2="{cx:.2}" y2="{:.2}" stroke="#888"/>"##,
        cy - half,
        cy + half
    );
    let pct = |k: usize| model.inertia_pct[k];
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">Factor {} ({:.1}%)</text>"#,
        cx + half,
        cy - 6.0,
        axes.0,
        pct(a)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="11">Factor {} ({:.1}%)</text>"#,
        cx + 6.0,
        cy - half + 10.0,
        axes.1,
        pct(b)
    );
    for p in &points {
        let (x, y) = (sx(p.x), sy(p.y));
        let (r, fill) = match p.class {
            "active" => (3.5, "crimson"),
            "document" => (2.0, "steelblue"),
            _ => (1.2, "#aaa"),
        };
        let label = escape(p.label);
        let _ = writeln!(
            out,
            r#"<circle class="{}" cx="{x:.2}" cy="{y:.2}" r="{r}" fill="{fill}" data-label="{label}" data-x="{}" data-y="{}"/>"#,
            p.class, p.x, p.y
        );
        if p.class != "supplementary" {
            let size = if p.class == "active" { 12 } else { 8 };
            let _ = writeln!(
                out,
                r#"<text class="{}" x="{:.2}" y="{:.2}" font-size="{size}" fill="{fill}">{label}</text>"#,
                p.class,
                x + 4.0,
                y - 3.0
            );
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}
