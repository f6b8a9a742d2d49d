use std::f64::consts::TAU;
use std::io::{self, Write};

use num_traits::ToPrimitive;

use super::{polygons, Lamination, Leaf};
use crate::circle::Angle;

/// How chords are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChordStyle {
    #[default]
    Straight,
    /// Circular arcs orthogonal to the unit circle.
    Geodesic,
}

fn point(t: &Angle) -> (f64, f64) {
    let x = TAU * t.to_f64();
    (x.cos(), -x.sin())
}

fn num(v: f64) -> String {
    let v = if v.abs() < 5e-7 { 0.0 } else { v };
    format!("{v:.6}")
}

fn chord_path(l: &Leaf, style: ChordStyle) -> String {
    let (x1, y1) = point(l.a());
    let (x2, y2) = point(l.b());
    let straight = format!("M {} {} L {} {}", num(x1), num(y1), num(x2), num(y2));
    if style == ChordStyle::Straight || l.is_diameter() {
        return straight;
    }
    let half = TAU * l.length().to_f64().unwrap_or(0.0) / 2.0;
    let r = half.tan();
    let dist = 1.0 / half.cos();
    let (mx, my) = ((x1 + x2) / 2.0, (y1 + y2) / 2.0);
    let norm = mx.hypot(my);
    let (cx, cy) = (mx / norm * dist, my / norm * dist);
    let cross = (x1 - cx) * (y2 - cy) - (y1 - cy) * (x2 - cx);
    let sweep = u8::from(cross > 0.0);
    format!("M {} {} A {} {} 0 0 {} {} {}", num(x1), num(y1), num(r), num(r), sweep, num(x2), num(y2))
}

/// Draw the unit circle, shaded polygons, and one `<path>` per leaf.
pub fn render_svg<W: Write>(lam: &Lamination, out: &mut W, style: ChordStyle) -> io::Result<()> {
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="-1.1 -1.1 2.2 2.2" width="800" height="800">"#)?;
    writeln!(out, r#"<circle cx="0" cy="0" r="1" fill="none" stroke="black" stroke-width="0.004"/>"#)?;
    for poly in polygons(lam) {
        let pts: Vec<String> = poly
            .iter()
            .map(|t| {
                let (x, y) = point(t);
                format!("{},{}", num(x), num(y))
            })
            .collect();
        writeln!(out, r##"<polygon points="{}" fill="#9ab" fill-opacity="0.5" stroke="none"/>"##, pts.join(" "))?;
    }
    let mut leaves: Vec<_> = lam.records().iter().collect();
    leaves.sort_by(|x, y| (x.generation, &x.leaf).cmp(&(y.generation, &y.leaf)));
    for r in leaves {
        let width = 0.004 / (1.0 + r.generation as f64).sqrt();
        writeln!(
            out,
            r#"<path d="{}" fill="none" stroke="navy" stroke-width="{}"/>"#,
            chord_path(&r.leaf, style),
            num(width)
        )?;
    }
    writeln!(out, "</svg>")
}
