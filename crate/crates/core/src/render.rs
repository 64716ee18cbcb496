//! Deterministic SVG output for polygons and maps.

use std::fmt::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::exec::map_indexed;
use crate::geometry::{LabelledPolygon, PlanePoint};
use crate::scmap::ScMap;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RenderStyle {
    /// Canvas width in pixels; height follows the aspect ratio.
    pub width: f64,
    /// Stroke width as a fraction of the polygon's bounding-box diagonal.
    pub stroke: f64,
    pub stroke_color: String,
    pub fill: Option<String>,
    pub label_vertices: bool,
    pub witness: Option<PlanePoint>,
    /// Number of horizontal and vertical half-plane lines to map, 0 for none.
    pub grid_lines: usize,
    pub grid_samples: usize,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            width: 600.0,
            stroke: 0.004,
            stroke_color: "#1f3b73".into(),
            fill: Some("#1f3b7322".into()),
            label_vertices: false,
            witness: None,
            grid_lines: 0,
            grid_samples: 64,
        }
    }
}

/// Points of the half-plane grid: horizontal lines at geometrically spaced
/// heights and vertical lines over and around the finite prevertices.
pub fn grid_preimages(map: &ScMap, lines: usize, samples: usize) -> Vec<Vec<Complex64>> {
    if lines == 0 || samples < 2 {
        return Vec::new();
    }
    let z = map.prevertices().points();
    let (lo, hi) = (z[0], z[z.len() - 1]);
    let span = hi - lo;
    let (xmin, xmax) = (lo - 2.0 * span, hi + 2.0 * span);
    let ymax = 3.0 * span;
    let ymin = 0.02 * span;
    let lerp = |a: f64, b: f64, t: f64| a + (b - a) * t;
    let mut curves = Vec::with_capacity(2 * lines);
    for k in 0..lines {
        let t = (k as f64 + 0.5) / lines as f64;
        let y = ymin * (ymax / ymin).powf(t);
        curves.push(
            (0..samples)
                .map(|s| Complex64::new(lerp(xmin, xmax, s as f64 / (samples - 1) as f64), y))
                .collect(),
        );
        let x = lerp(lo - 0.5 * span, hi + 0.5 * span, t);
        curves.push(
            (0..samples)
                .map(|s| Complex64::new(x, ymin * (ymax / ymin).powf(s as f64 / (samples - 1) as f64)))
                .collect(),
        );
    }
    curves
}

/// Images of [`grid_preimages`] under the map.
pub fn grid_images(map: &ScMap, lines: usize, samples: usize, tol: f64) -> Result<Vec<Vec<PlanePoint>>> {
    let pre = grid_preimages(map, lines, samples);
    let integ = map.integrator();
    let flat: Vec<Complex64> = pre.iter().flatten().copied().collect();
    let images = map_indexed(flat.len(), |i| map.evaluate_with(&integ, flat[i], tol));
    let mut images = images.into_iter();
    pre.iter().map(|c| c.iter().map(|_| images.next().expect("one image per point")).collect()).collect()
}

fn fmt(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" { "0.000000".into() } else { s }
}

fn push_point(out: &mut String, cmd: &str, p: PlanePoint) {
    // SVG's y axis points down.
    let _ = write!(out, "{cmd}{} {}", fmt(p.re), fmt(-p.im));
}

/// SVG of a polygon with optional map grid; byte-identical for equal inputs.
pub fn render_svg(poly: &LabelledPolygon, grid: &[Vec<PlanePoint>], style: &RenderStyle) -> String {
    let (mut lo, mut hi) = poly.bounding_box();
    if let Some(w) = style.witness {
        lo = Complex64::new(lo.re.min(w.re), lo.im.min(w.im));
        hi = Complex64::new(hi.re.max(w.re), hi.im.max(w.im));
    }
    let span = hi - lo;
    let diag = span.norm().max(f64::MIN_POSITIVE);
    let margin_x = 0.05 * span.re.max(1e-3 * diag);
    let margin_y = 0.05 * span.im.max(1e-3 * diag);
    let (vx, vy) = (lo.re - margin_x, -hi.im - margin_y);
    let (vw, vh) = (span.re + 2.0 * margin_x, span.im + 2.0 * margin_y);
    let height = style.width * vh / vw;
    let stroke = style.stroke * diag;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="{} {} {} {}">"#,
        fmt(style.width),
        fmt(height),
        fmt(vx),
        fmt(vy),
        fmt(vw),
        fmt(vh)
    );
    for curve in grid {
        let mut d = String::new();
        for (k, p) in curve.iter().enumerate() {
            push_point(&mut d, if k == 0 { "M" } else { " L" }, *p);
        }
        let _ = writeln!(
            out,
            r##"  <path class="grid" d="{d}" fill="none" stroke="#999999" stroke-width="{}"/>"##,
            fmt(0.5 * stroke)
        );
    }
    let mut d = String::new();
    for (k, p) in poly.vertices().iter().enumerate() {
        push_point(&mut d, if k == 0 { "M" } else { " L" }, *p);
    }
    d.push_str(" Z");
    let fill = style.fill.as_deref().unwrap_or("none");
    let _ = writeln!(
        out,
        r#"  <path class="polygon" d="{d}" fill="{fill}" fill-rule="nonzero" stroke="{}" stroke-width="{}" stroke-linejoin="round"/>"#,
        style.stroke_color,
        fmt(stroke)
    );
    if style.label_vertices {
        for (k, p) in poly.vertices().iter().enumerate() {
            let _ = writeln!(
                out,
                r#"  <text x="{}" y="{}" font-size="{}">{}</text>"#,
                fmt(p.re),
                fmt(-p.im),
                fmt(0.03 * diag),
                k + 1
            );
        }
    }
    if let Some(w) = style.witness {
        let _ = writeln!(
            out,
            r##"  <circle class="witness" cx="{}" cy="{}" r="{}" fill="#c0392b"/>"##,
            fmt(w.re),
            fmt(-w.im),
            fmt(3.0 * stroke)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Renders the polygon of `map`, with its grid when `style.grid_lines > 0`.
pub fn render_map(map: &ScMap, style: &RenderStyle, tol: f64) -> Result<String> {
    let poly = map.polygon(tol)?;
    let grid = grid_images(map, style.grid_lines, style.grid_samples, tol)?;
    Ok(render_svg(&poly, &grid, style))
}
