//! PNG overlays and SVG figures.

use std::fmt::Write;

use image::{Rgba, RgbaImage};

use crate::apply::{CharacterMask, Completion, Mask};
use crate::generalize::{Grts, MergeTree};
use crate::harness::RetrievalReport;
use crate::raster::BinaryShape;
use crate::rts::Rts;

const PALETTE: [&str; 8] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#17becf", "#bcbd22"];

fn color(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

/// Shape in light gray with `mask` alpha-blended on top in `tint`.
pub fn overlay_png(shape: &BinaryShape, mask: &Mask, tint: [u8; 3], alpha: f64) -> RgbaImage {
    let (w, h) = (shape.width(), shape.height());
    let mut img = RgbaImage::from_pixel(w as u32, h as u32, Rgba([255, 255, 255, 255]));
    for y in 0..h {
        for x in 0..w {
            let base: [u8; 3] = if shape.get(x as i64, y as i64) { [190, 190, 190] } else { [255, 255, 255] };
            let px = if x < mask.width && y < mask.height && mask.get(x, y) {
                let mix = |b: u8, t: u8| (b as f64 * (1.0 - alpha) + t as f64 * alpha).round() as u8;
                [mix(base[0], tint[0]), mix(base[1], tint[1]), mix(base[2], tint[2])]
            } else {
                base
            };
            img.put_pixel(x as u32, y as u32, Rgba([px[0], px[1], px[2], 255]));
        }
    }
    img
}

fn polyline(out: &mut String, pts: &[[f64; 2]], stroke: &str, width: f64, extra: &str) {
    let mut d = String::new();
    for p in pts {
        let _ = write!(d, "{:.2},{:.2} ", p[0], p[1]);
    }
    let _ = writeln!(
        out,
        r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="{width}" {extra}/>"#,
        d.trim_end()
    );
}

fn header(out: &mut String, w: usize, h: usize) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {w} {h}">"#,
        w * 4,
        h * 4
    );
    let _ = writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
}

fn contour(out: &mut String, shape: &BinaryShape) {
    let mut pts: Vec<[f64; 2]> = shape.contour().iter().map(|p| p.xy()).collect();
    if let Some(&first) = pts.first() {
        pts.push(first);
    }
    polyline(out, &pts, "#444", 0.6, "");
}

fn disks(out: &mut String, path: &[[f64; 2]], radii: impl Iterator<Item = f64>, stroke: &str) {
    for (k, (p, r)) in path.iter().zip(radii).enumerate() {
        if k % 6 == 0 {
            let _ = writeln!(
                out,
                r#"<circle cx="{:.2}" cy="{:.2}" r="{:.2}" fill="none" stroke="{stroke}" stroke-width="0.3" opacity="0.6"/>"#,
                p[0], p[1], r
            );
        }
    }
}

fn dot(out: &mut String, p: [f64; 2], r: f64, fill: &str) {
    let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="{r}" fill="{fill}"/>"#, p[0], p[1]);
}

/// Contour, end paths with sampled disks and the spine axis of one shape.
pub fn rts_svg(shape: &BinaryShape, rts: &Rts) -> String {
    let mut out = String::new();
    header(&mut out, shape.width(), shape.height());
    contour(&mut out, shape);
    for (i, f) in rts.features.iter().enumerate() {
        disks(&mut out, &f.path, f.lhat.iter().map(|r| r * rts.r_star), color(i));
        polyline(&mut out, &f.path, color(i), 1.0, "");
        dot(&mut out, f.endpoint, 1.2, color(i));
    }
    let s = &rts.spine;
    let _ = writeln!(
        out,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="red" stroke-width="1.2"/>"#,
        s.x1, s.y1, s.x2, s.y2
    );
    dot(&mut out, rts.root(), 1.8, "red");
    out.push_str("</svg>\n");
    out
}

/// Instance paths, the prototype mapped into the instance frame, lines
/// between corresponding endpoints and unmatched parts dashed in red.
pub fn apply_svg(shape: &BinaryShape, g: &Grts, x: &Rts, cm: &CharacterMask) -> String {
    let mut out = String::new();
    header(&mut out, shape.width(), shape.height());
    contour(&mut out, shape);
    let t = cm.transform;
    for (k, gf) in g.features().iter().enumerate() {
        let Some(t) = t else { break };
        let mapped: Vec<[f64; 2]> = gf.path.iter().map(|&p| t.apply(p)).collect();
        let matched = cm.parts[k].instance_index.is_some();
        let stroke = if matched { "#999" } else { "red" };
        polyline(&mut out, &mapped, stroke, 0.8, r#"stroke-dasharray="2,1""#);
    }
    for (j, f) in x.features.iter().enumerate() {
        let matched = !cm.unmatched_instance.contains(&j);
        let stroke = if matched { color(j) } else { "red" };
        if let Some(k) = cm.correspondence.iter().find(|p| p.1 == j).map(|p| p.0) {
            disks(&mut out, &f.path, g.features()[k].lhat.iter().map(|r| r * x.r_star), stroke);
        }
        polyline(&mut out, &f.path, stroke, 1.2, "");
        dot(&mut out, f.endpoint, 1.2, stroke);
    }
    if let Some(t) = t {
        for &(k, j) in &cm.correspondence {
            let a = t.apply(g.features()[k].endpoint);
            let b = x.features[j].endpoint;
            let _ = writeln!(
                out,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="green" stroke-width="0.5"/>"#,
                a[0], a[1], b[0], b[1]
            );
        }
    }
    dot(&mut out, x.root(), 1.8, "red");
    out.push_str("</svg>\n");
    out
}

/// Input contour with every mapped prototype path; added parts in red.
pub fn completion_svg(shape: &BinaryShape, c: &Completion) -> String {
    let mut out = String::new();
    header(&mut out, shape.width(), shape.height());
    contour(&mut out, shape);
    for (k, path) in c.mapped_paths.iter().enumerate() {
        let added = c.added_parts.contains(&k);
        polyline(&mut out, path, if added { "red" } else { color(k) }, if added { 1.4 } else { 0.8 }, "");
    }
    out.push_str("</svg>\n");
    out
}

/// Dendrogram of a merge tree with leaves along the bottom.
pub fn merge_tree_svg(tree: &MergeTree) -> String {
    struct Layout {
        lines: String,
        labels: String,
        next_leaf: usize,
    }
    const DX: f64 = 90.0;
    const DY: f64 = 40.0;
    let depth = height(tree);
    fn height(t: &MergeTree) -> usize {
        match t {
            MergeTree::Leaf { .. } => 0,
            MergeTree::Merge { left, right, .. } => 1 + height(left).max(height(right)),
        }
    }
    fn place(t: &MergeTree, l: &mut Layout, base: f64) -> (f64, f64) {
        match t {
            MergeTree::Leaf { id } => {
                let x = 20.0 + l.next_leaf as f64 * DX;
                l.next_leaf += 1;
                let _ = writeln!(
                    l.labels,
                    r#"<text x="{x:.1}" y="{:.1}" font-size="11" text-anchor="middle">{}</text>"#,
                    base + 16.0,
                    esc(id)
                );
                (x, base)
            }
            MergeTree::Merge { cost, left, right, .. } => {
                let (ax, ay) = place(left, l, base);
                let (bx, by) = place(right, l, base);
                let y = base - height(t) as f64 * DY;
                let _ = writeln!(
                    l.lines,
                    r#"<polyline points="{ax:.1},{ay:.1} {ax:.1},{y:.1} {bx:.1},{y:.1} {bx:.1},{by:.1}" fill="none" stroke="black"/>"#
                );
                if let Some(c) = cost {
                    let _ = writeln!(
                        l.labels,
                        r#"<text x="{:.1}" y="{:.1}" font-size="9" text-anchor="middle">{c:.3}</text>"#,
                        (ax + bx) / 2.0,
                        y - 3.0
                    );
                }
                ((ax + bx) / 2.0, y)
            }
        }
    }
    let leaves = tree.leaves().len();
    let (w, h) = (40.0 + leaves as f64 * DX, 60.0 + depth as f64 * DY);
    let mut l = Layout { lines: String::new(), labels: String::new(), next_leaf: 0 };
    place(tree, &mut l, h - 30.0);
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\">\n<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n{}{}</svg>\n",
        l.lines, l.labels
    )
}

/// One row per query: the top `k` results, green when the class agrees.
pub fn retrieval_grid_svg(report: &RetrievalReport, k: usize) -> String {
    const CW: f64 = 110.0;
    const RH: f64 = 18.0;
    let w = CW * (k + 1) as f64;
    let h = RH * report.queries.len() as f64 + 4.0;
    let mut out = format!("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\">\n<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n");
    for (row, q) in report.queries.iter().enumerate() {
        let y = row as f64 * RH + 2.0;
        let _ =
            writeln!(out, r#"<text x="4" y="{:.1}" font-size="11" font-weight="bold">{}</text>"#, y + 13.0, esc(&q.id));
        for (col, r) in q.ranked.iter().take(k).enumerate() {
            let x = CW * (col + 1) as f64;
            let fill = if r.label == q.label { "#cfeccf" } else { "#f6c6c6" };
            let _ = writeln!(
                out,
                r#"<rect x="{x:.1}" y="{y:.1}" width="{:.1}" height="{:.1}" fill="{fill}"/>"#,
                CW - 2.0,
                RH - 2.0
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{:.1}" font-size="10">{} {:.3}</text>"#,
                x + 3.0,
                y + 12.0,
                esc(&r.id),
                r.cost
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apply::apply_character;
    use crate::metric::MatchParams;
    use crate::rts::{build_rts, RtsConfig};

    fn blob() -> BinaryShape {
        BinaryShape::from_fn(60, 50, "blob", |x, y| {
            let body = (x as i64 - 30).pow(2) + (y as i64 - 25).pow(2) <= 100;
            let arm = (10..50).contains(&x) && (23..28).contains(&y);
            let leg = (27..33).contains(&x) && (25..46).contains(&y);
            body || arm || leg
        })
        .unwrap()
    }

    #[test]
    fn overlay_blends_only_masked_pixels() {
        let s = blob();
        let mut m = Mask::new(s.width(), s.height());
        m.paint_disk([30.0, 25.0], 3.0);
        let img = overlay_png(&s, &m, [255, 0, 0], 0.5);
        assert_eq!(img.get_pixel(30, 25).0, [223, 95, 95, 255]);
        assert_eq!(img.get_pixel(0, 0).0, [255, 255, 255, 255]);
        assert_eq!(img.get_pixel(30, 40).0, [190, 190, 190, 255]);
    }

    #[test]
    fn figures_are_well_formed() {
        let s = blob();
        let rts = build_rts(&s, &RtsConfig::default()).unwrap();
        let g = Grts::leaf("blob", rts.clone());
        let cm = apply_character(&g, &rts, s.width(), s.height(), &MatchParams::default()).unwrap();
        for svg in [rts_svg(&s, &rts), apply_svg(&s, &g, &rts, &cm), merge_tree_svg(&g.merge_tree)] {
            assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        }
        assert_eq!(rts_svg(&s, &rts).matches("<polyline").count(), rts.n + 1);
        assert_eq!(apply_svg(&s, &g, &rts, &cm).matches("stroke=\"green\"").count(), rts.n);
    }

    #[test]
    fn labels_are_escaped() {
        let t = MergeTree::Merge {
            cost: Some(0.5),
            matched: 1,
            dropped: [0, 0],
            left: Box::new(MergeTree::Leaf { id: "a<b".into() }),
            right: Box::new(MergeTree::Leaf { id: "c&d".into() }),
        };
        let svg = merge_tree_svg(&t);
        assert!(svg.contains("a&lt;b") && svg.contains("c&amp;d"));
        assert!(svg.contains("0.500"));
    }
}
