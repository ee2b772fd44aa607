//! Straight-line SVG drawings of layouts.

use std::fmt::Write as _;
use std::path::Path;

use stresslayout::{Error, Graph, Layout, Point, Result};

/// Width and height of the drawing in user units.
pub const VIEWPORT: f64 = 800.0;
/// Blank border on every side.
pub const MARGIN: f64 = 0.05 * VIEWPORT;

const RADIUS: f64 = 3.0;

/// Maps layout coordinates into the viewport: uniform scale, centered,
/// y axis pointing up.
#[derive(Debug, Clone, Copy)]
struct Fit {
    min: Point,
    max: Point,
    scale: f64,
    pad: Point,
}

impl Fit {
    fn new(x: &Layout) -> Fit {
        let (min, max) = x.bounds().unwrap_or((Point::ORIGIN, Point::ORIGIN));
        let (w, h) = (max.x - min.x, max.y - min.y);
        let avail = VIEWPORT - 2.0 * MARGIN;
        let span = w.max(h);
        let scale = if span > 0.0 { avail / span } else { 0.0 };
        let pad = Point::new((avail - w * scale) / 2.0, (avail - h * scale) / 2.0);
        Fit {
            min,
            max,
            scale,
            pad,
        }
    }

    fn apply(&self, p: Point) -> Point {
        Point::new(
            MARGIN + self.pad.x + (p.x - self.min.x) * self.scale,
            MARGIN + self.pad.y + (self.max.y - p.y) * self.scale,
        )
    }
}

/// SVG 1.1 document with one `line` per edge followed by one `circle` per
/// vertex. Identical inputs give identical bytes.
pub fn render_svg(x: &Layout, g: &Graph) -> Result<String> {
    if x.len() != g.vertex_count() {
        return Err(Error::DimensionMismatch {
            expected: g.vertex_count(),
            found: x.len(),
        });
    }
    let fit = Fit::new(x);
    let pts: Vec<Point> = x.points().iter().map(|&p| fit.apply(p)).collect();
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{v}" height="{v}" viewBox="0 0 {v} {v}">"#,
        v = VIEWPORT
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r##"<g stroke="#555555" stroke-width="1" stroke-opacity="0.8">"##);
    for &(a, b) in g.edges() {
        let (p, q) = (pts[a], pts[b]);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#,
            p.x, p.y, q.x, q.y
        );
    }
    s.push_str("</g>\n");
    let _ = writeln!(s, r##"<g fill="#1f4e9c">"##);
    for p in &pts {
        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="{RADIUS}"/>"#, p.x, p.y);
    }
    s.push_str("</g>\n</svg>\n");
    Ok(s)
}

pub fn write_svg(x: &Layout, g: &Graph, path: &Path) -> Result<()> {
    std::fs::write(path, render_svg(x, g)?)?;
    Ok(())
}
