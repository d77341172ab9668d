//! Flat SVG drawing of a framework. 3D frameworks are drawn by their first two coordinates.

use std::fmt::Write;

use facered::rigidity::{EdgeKind, Framework};

const SIZE: f64 = 400.0;
const MARGIN: f64 = 30.0;
const STRESS_TOL: f64 = 1e-9;

/// Bars solid, cables dashed, struts as a doubled line; red for ω > 0, blue for ω < 0,
/// grey for unstressed edges.
pub fn render(f: &Framework, stress: Option<&[f64]>) -> String {
    let pts = f.points();
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in &pts {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
    let s = (SIZE - 2.0 * MARGIN) / span;
    // flip y so the picture has the usual orientation
    let at = |p: &[f64]| (MARGIN + (p[0] - lo[0]) * s, SIZE - MARGIN - (p[1] - lo[1]) * s);

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (e, (&(i, j), kind)) in f.graph.edges.iter().zip(&f.graph.kinds).enumerate() {
        let w = stress.and_then(|s| s.get(e)).copied().unwrap_or(0.0);
        let color = if w > STRESS_TOL {
            "#c0392b"
        } else if w < -STRESS_TOL {
            "#2e6fbd"
        } else {
            "#777777"
        };
        let (a, b) = (at(&pts[i]), at(&pts[j]));
        match kind {
            EdgeKind::Bar => line(&mut out, a, b, color, ""),
            EdgeKind::Cable => line(&mut out, a, b, color, r#" stroke-dasharray="8 5""#),
            EdgeKind::Strut => {
                let (dx, dy) = (b.0 - a.0, b.1 - a.1);
                let len = (dx * dx + dy * dy).sqrt().max(1e-12);
                let (ox, oy) = (-dy / len * 2.5, dx / len * 2.5);
                line(&mut out, (a.0 + ox, a.1 + oy), (b.0 + ox, b.1 + oy), color, "");
                line(&mut out, (a.0 - ox, a.1 - oy), (b.0 - ox, b.1 - oy), color, "");
            }
        }
    }
    for (v, p) in pts.iter().enumerate() {
        let (x, y) = at(p);
        let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="5" fill="black"/>"#);
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" font-size="12" font-family="sans-serif">{v}</text>"#, x + 7.0, y - 7.0);
    }
    out.push_str("</svg>\n");
    out
}

fn line(out: &mut String, a: (f64, f64), b: (f64, f64), color: &str, extra: &str) {
    let _ = writeln!(
        out,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="2"{extra}/>"#,
        a.0, a.1, b.0, b.1
    );
}

#[cfg(test)]
mod tests {
    use super::*;
    use facered::rigidity::Graph;

    #[test]
    fn edge_styles() {
        let g = Graph::with_kinds(3, &[(0, 1, EdgeKind::Bar), (1, 2, EdgeKind::Cable), (0, 2, EdgeKind::Strut)]).unwrap();
        let f = Framework::from_f64(g, 2, &[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let svg = render(&f, Some(&[0.0, 1.0, -1.0]));
        assert!(svg.starts_with("<?xml") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<line").count(), 4);
        assert_eq!(svg.matches("stroke-dasharray").count(), 1);
        assert_eq!(svg.matches("#2e6fbd").count(), 2);
        assert_eq!(svg.matches("#c0392b").count(), 1);
        assert_eq!(svg.matches("<circle").count(), 3);
    }
}
