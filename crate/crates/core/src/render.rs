//! SVG drawings of geometric complexes.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::model::{format_rational, Complex, Rational};

const PALETTE: [&str; 6] = ["#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3", "#937860"];

/// Atoms as circles filled by detuning, blockade edges as lines, the
/// blockade disk of every atom dashed, ports labelled.
pub fn render_svg(c: &Complex) -> Result<String> {
    let pos = c
        .positions()
        .ok_or_else(|| Error::invalid("rendering needs atom positions"))?;
    let r = c.radius();
    let half = r / 2.0;
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in pos {
        x0 = x0.min(p.x - half);
        y0 = y0.min(p.y - half);
        x1 = x1.max(p.x + half);
        y1 = y1.max(p.y + half);
    }
    let pad = 0.4 * r;
    let (w, h) = (x1 - x0 + 2.0 * pad, y1 - y0 + 2.0 * pad);
    let scale = 600.0 / w.max(h);
    // flip y so the drawing has the usual orientation
    let sx = |x: f64| (x - x0 + pad) * scale;
    let sy = |y: f64| (y1 - y + pad) * scale;

    let mut levels: Vec<Rational> = c.detunings().to_vec();
    levels.sort();
    levels.dedup();
    let color = |d: &Rational| PALETTE[levels.binary_search(d).unwrap_or(0) % PALETTE.len()];

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.1}" height="{:.1}" viewBox="0 0 {:.1} {:.1}">"#,
        w * scale,
        h * scale,
        w * scale,
        h * scale
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<g fill="none" stroke="gray" stroke-dasharray="4 3" stroke-width="0.8">"#);
    for p in pos {
        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="{:.2}"/>"#, sx(p.x), sy(p.y), half * scale);
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g stroke="black" stroke-width="2">"#);
    for (i, j) in c.graph().edges() {
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#,
            sx(pos[i].x),
            sy(pos[i].y),
            sx(pos[j].x),
            sy(pos[j].y)
        );
    }
    let _ = writeln!(s, "</g>");
    let dot = 0.12 * r * scale;
    for (i, p) in pos.iter().enumerate() {
        let d = &c.detunings()[i];
        let is_port = c.ports().iter().any(|q| q.index == i);
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="{:.2}" fill="{}" stroke="black" stroke-width="{}"><title>atom {i}, detuning {}</title></circle>"#,
            sx(p.x),
            sy(p.y),
            dot,
            color(d),
            if is_port { 2.5 } else { 1.0 },
            format_rational(d)
        );
    }
    let _ = writeln!(s, r#"<g font-family="sans-serif" font-size="{:.1}" fill="black">"#, 1.6 * dot);
    for port in c.ports() {
        let p = pos[port.index];
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            sx(p.x) + 1.2 * dot,
            sy(p.y) - 1.2 * dot,
            escape(&port.label)
        );
    }
    let _ = writeln!(s, "</g>");
    // legend
    let _ = writeln!(s, r#"<g font-family="sans-serif" font-size="12">"#);
    for (k, d) in levels.iter().enumerate() {
        let y = 16.0 + 16.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<circle cx="12" cy="{:.1}" r="5" fill="{}"/><text x="22" y="{:.1}">Δ = {}</text>"#,
            y,
            color(d),
            y + 4.0,
            format_rational(d)
        );
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    Ok(s)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{rational, Point, Port};

    #[test]
    fn draws_every_piece() {
        let c = Complex::geometric(
            vec![Point::new(0.0, 0.0), Point::new(0.5, 0.0), Point::new(1.0, 0.0)],
            vec![rational(1), rational(2), rational(1)],
            vec![Port::new("A", 0), Port::new("Q<", 2)],
            0.7,
        )
        .unwrap();
        let s = render_svg(&c).unwrap();
        assert_eq!(s.matches("<line").count(), 2);
        assert_eq!(s.matches("stroke-dasharray").count(), 1);
        assert!(s.contains(">A</text>") && s.contains("Q&lt;"));
        assert!(s.contains("Δ = 2"));
    }

    #[test]
    fn abstract_complex_is_refused() {
        let c = Complex::geometric(vec![Point::new(0.0, 0.0)], vec![rational(1)], vec![], 1.0)
            .unwrap()
            .without_geometry();
        assert!(render_svg(&c).is_err());
    }
}
