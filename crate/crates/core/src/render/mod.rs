//! Deterministic SVG output: tilings, barcodes, digit point clouds,
//! decoration curves and digit paths.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::engine::{DigitExpansion, DigitPath, PlacedTile, Tiling};
use crate::error::{Error, Result};
use crate::geometry::{BBox, Planar, Similarity};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Style {
    /// Fill colors indexed by tile type, cycling.
    pub palette: Vec<String>,
    /// Disk colors indexed by digit count, cycling.
    pub depth_palette: Vec<String>,
    /// Disk radii indexed by digit count; the last one repeats.
    pub radii: Vec<f64>,
    pub stroke: String,
    pub stroke_width: f64,
    pub width: f64,
    pub height: f64,
    /// Fraction of the canvas left free on each side.
    pub margin: f64,
}

impl Default for Style {
    fn default() -> Style {
        let s = |v: &[&str]| v.iter().map(|c| c.to_string()).collect();
        Style {
            palette: s(&[
                "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7", "#9c755f",
                "#bab0ac",
            ]),
            depth_palette: s(&[
                "#d62728", "#ff7f0e", "#e6b800", "#2ca02c", "#17becf", "#1f77b4", "#6a3d9a", "#9467bd", "#8c564b",
                "#7f7f7f",
            ]),
            radii: vec![9.0, 7.0, 5.5, 4.3, 3.4, 2.7, 2.1, 1.7, 1.4, 1.2],
            stroke: "#222222".into(),
            stroke_width: 0.5,
            width: 800.0,
            height: 800.0,
            margin: 0.05,
        }
    }
}

impl Style {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::invalid(format!("style: {m}")));
        if self.palette.is_empty() || self.depth_palette.is_empty() {
            return bad("palettes must be non-empty");
        }
        if self.radii.is_empty() || self.radii.iter().any(|r| r.is_nan() || *r <= 0.0) {
            return bad("radii must be positive");
        }
        if self.radii.windows(2).any(|w| w[1] >= w[0]) {
            return bad("radii must be strictly decreasing");
        }
        if !(self.width > 0.0 && self.height > 0.0) {
            return bad("canvas size must be positive");
        }
        if !(0.0..0.5).contains(&self.margin) {
            return bad("margin must lie in [0, 0.5)");
        }
        if self.stroke_width.is_nan() || self.stroke_width < 0.0 {
            return bad("stroke width must be non-negative");
        }
        Ok(())
    }

    fn fill(&self, type_id: usize) -> &str {
        &self.palette[type_id % self.palette.len()]
    }

    fn radius(&self, depth: usize) -> f64 {
        let k = depth.saturating_sub(1).min(self.radii.len() - 1);
        self.radii[k]
    }

    fn depth_color(&self, depth: usize) -> &str {
        &self.depth_palette[depth.saturating_sub(1) % self.depth_palette.len()]
    }
}

/// Formats with 9 significant digits and no exponent.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (8 - mag).clamp(0, 20) as usize;
    let s = format!("{x:.decimals$}");
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

/// World-to-canvas map: uniform scale, centered, y flipped.
struct Fit {
    scale: f64,
    cx: f64,
    cy: f64,
    w: f64,
    h: f64,
}

impl Fit {
    fn new(bb: &BBox, style: &Style) -> Fit {
        let (w, h) = (style.width, style.height);
        let inner_w = w * (1.0 - 2.0 * style.margin);
        let inner_h = h * (1.0 - 2.0 * style.margin);
        let (bw, bh) = (bb.width(), bb.height());
        let scale = match (bw > 0.0, bh > 0.0) {
            (true, true) => (inner_w / bw).min(inner_h / bh),
            (true, false) => inner_w / bw,
            (false, true) => inner_h / bh,
            (false, false) => 1.0,
        };
        Fit {
            scale,
            cx: (bb.min.re + bb.max.re) / 2.0,
            cy: (bb.min.im + bb.max.im) / 2.0,
            w,
            h,
        }
    }

    fn x(&self, p: Planar) -> f64 {
        self.w / 2.0 + self.scale * (p.re - self.cx)
    }

    fn y(&self, p: Planar) -> f64 {
        self.h / 2.0 - self.scale * (p.im - self.cy)
    }

    fn point(&self, p: Planar) -> String {
        format!("{} {}", fmt_num(self.x(p)), fmt_num(self.y(p)))
    }

    fn path(&self, pts: &[Planar], closed: bool) -> String {
        let mut d = String::new();
        for (k, &p) in pts.iter().enumerate() {
            d.push_str(if k == 0 { "M" } else { " L" });
            d.push_str(&self.point(p));
        }
        if closed {
            d.push_str(" Z");
        }
        d
    }
}

fn header(style: &Style) -> String {
    let (w, h) = (fmt_num(style.width), fmt_num(style.height));
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n<rect width=\"{w}\" height=\"{h}\" fill=\"#ffffff\"/>\n"
    )
}

fn bbox_of(points: impl IntoIterator<Item = Planar>) -> Option<BBox> {
    let pts: Vec<Planar> = points.into_iter().collect();
    (!pts.is_empty()).then(|| BBox::of(&pts))
}

fn tile_outlines(t: &Tiling) -> Result<Vec<Vec<Planar>>> {
    if t.rule.dimension != 2 {
        return Err(Error::invalid("1-D tilings are drawn with render_barcode"));
    }
    t.polygons()
        .map(|ps| ps.iter().map(|p| p.vertices().to_vec()).collect())
        .ok_or_else(|| Error::invalid(format!("rule '{}' has types without polygons", t.rule.name)))
}

/// One filled path per tile, colored by type, in tile order.
pub fn render_tiling(t: &Tiling, style: &Style) -> Result<String> {
    style.validate()?;
    let outlines = tile_outlines(t)?;
    let fit = Fit::new(
        &bbox_of(outlines.iter().flatten().copied()).expect("tilings are non-empty"),
        style,
    );
    let mut out = header(style);
    let sw = fmt_num(style.stroke_width);
    for (tile, pts) in t.tiles.iter().zip(&outlines) {
        let _ = writeln!(
            out,
            "<path d=\"{}\" fill=\"{}\" stroke=\"{}\" stroke-width=\"{sw}\"/>",
            fit.path(pts, true),
            style.fill(tile.type_id),
            style.stroke
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Vertical bands, one per interval, colored by type.
pub fn render_barcode(t: &Tiling, style: &Style) -> Result<String> {
    style.validate()?;
    let intervals = t
        .intervals()
        .ok_or_else(|| Error::invalid("render_barcode needs a 1-D tiling"))?;
    let lo = intervals.iter().map(|i| i.0).fold(f64::INFINITY, f64::min);
    let hi = intervals.iter().map(|i| i.1).fold(f64::NEG_INFINITY, f64::max);
    let inner_w = style.width * (1.0 - 2.0 * style.margin);
    let scale = inner_w / (hi - lo);
    let x0 = style.width * style.margin;
    let y0 = style.height * style.margin;
    let h = fmt_num(style.height * (1.0 - 2.0 * style.margin));
    let mut out = header(style);
    for (tile, (a, b)) in t.tiles.iter().zip(&intervals) {
        let _ = writeln!(
            out,
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{h}\" fill=\"{}\"/>",
            fmt_num(x0 + scale * (a - lo)),
            fmt_num(y0),
            fmt_num(scale * (b - a)),
            style.fill(tile.type_id)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// One disk per expansion, radius and color by digit count, deepest first.
pub fn render_points(es: &[DigitExpansion], style: &Style) -> Result<String> {
    style.validate()?;
    if es.is_empty() {
        return Err(Error::invalid("render_points needs at least one expansion"));
    }
    let fit = Fit::new(&bbox_of(es.iter().map(DigitExpansion::value)).unwrap(), style);
    let mut order: Vec<&DigitExpansion> = es.iter().collect();
    order.sort_by_key(|e| std::cmp::Reverse(e.len()));
    let mut out = header(style);
    for e in order {
        let v = e.value();
        let _ = writeln!(
            out,
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\"/>",
            fmt_num(fit.x(v)),
            fmt_num(fit.y(v)),
            fmt_num(style.radius(e.len())),
            style.depth_color(e.len())
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Decoration polylines of every tile. Unless `curves_only`, the tiles are
/// drawn underneath as a faint background. Returns the document and any
/// warnings.
pub fn render_decorations(t: &Tiling, style: &Style, curves_only: bool) -> Result<(String, Vec<String>)> {
    style.validate()?;
    let outlines = tile_outlines(t)?;
    let curves = t.decorations();
    let mut warnings = Vec::new();
    if curves.is_empty() {
        warnings.push(format!("rule '{}' declares no decorations", t.rule.name));
    }
    let fit = Fit::new(
        &bbox_of(outlines.iter().flatten().copied()).expect("tilings are non-empty"),
        style,
    );
    let mut out = header(style);
    let sw = fmt_num(style.stroke_width);
    if !curves_only {
        out.push_str("<g fill-opacity=\"0.25\" stroke-opacity=\"0.4\">\n");
        for (tile, pts) in t.tiles.iter().zip(&outlines) {
            let _ = writeln!(
                out,
                "<path d=\"{}\" fill=\"{}\" stroke=\"{}\" stroke-width=\"{sw}\"/>",
                fit.path(pts, true),
                style.fill(tile.type_id),
                style.stroke
            );
        }
        out.push_str("</g>\n");
    }
    let cw = fmt_num(2.0 * style.stroke_width.max(0.5));
    out.push_str(&format!(
        "<g fill=\"none\" stroke=\"{}\" stroke-width=\"{cw}\" stroke-linecap=\"round\">\n",
        style.stroke
    ));
    for c in &curves {
        let _ = writeln!(out, "<path d=\"{}\"/>", fit.path(c.vertices(), false));
    }
    out.push_str("</g>\n</svg>\n");
    Ok((out, warnings))
}

/// A digit path over a faint drawing of the decomposition it lives in.
pub fn render_path(p: &DigitPath, context: &Tiling, style: &Style) -> Result<String> {
    style.validate()?;
    let outlines = tile_outlines(context)?;
    let pts = p.polyline.vertices();
    let fit = Fit::new(
        &bbox_of(outlines.iter().flatten().copied().chain(pts.iter().copied())).unwrap(),
        style,
    );
    let mut out = header(style);
    let sw = fmt_num(style.stroke_width);
    out.push_str("<g fill-opacity=\"0.2\" stroke-opacity=\"0.3\">\n");
    for (tile, poly) in context.tiles.iter().zip(&outlines) {
        let _ = writeln!(
            out,
            "<path d=\"{}\" fill=\"{}\" stroke=\"{}\" stroke-width=\"{sw}\"/>",
            fit.path(poly, true),
            style.fill(tile.type_id),
            style.stroke
        );
    }
    out.push_str("</g>\n");
    let color = style.depth_color(1);
    let r = fmt_num(style.radius(pts.len()).max(1.5));
    if p.degenerate {
        let _ = writeln!(
            out,
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"/>",
            fmt_num(fit.x(pts[0])),
            fmt_num(fit.y(pts[0])),
            fmt_num(style.radii[0])
        );
    } else {
        let _ = writeln!(
            out,
            "<path d=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" stroke-linejoin=\"round\"/>",
            fit.path(pts, false)
        );
        for &v in pts {
            let _ = writeln!(
                out,
                "<circle cx=\"{}\" cy=\"{}\" r=\"{r}\" fill=\"{color}\"/>",
                fmt_num(fit.x(v)),
                fmt_num(fit.y(v))
            );
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// `copies` rotated copies of a tiling about the origin, by powers of
/// `u^{2m/copies}`; `copies` must divide the order `2m` of `u`.
pub fn pinwheel(t: &Tiling, copies: u32) -> Result<Tiling> {
    let frame = t.frame();
    let order = frame.order() as u32;
    if copies == 0 || !order.is_multiple_of(copies) {
        return Err(Error::invalid(format!(
            "pinwheel copies must divide the rotation order {order}, got {copies}"
        )));
    }
    let step = (order / copies) as i32;
    let mut tiles = Vec::with_capacity(t.tiles.len() * copies as usize);
    for k in 0..copies as i32 {
        let g = Similarity {
            rot: k * step,
            translation: Complex64::new(0.0, 0.0),
            ..Similarity::IDENTITY
        };
        tiles.extend(t.tiles.iter().map(|p| PlacedTile {
            type_id: p.type_id,
            transform: frame.compose(&g, &p.transform),
        }));
    }
    Ok(Tiling { tiles, ..t.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{decompose, expansions, inflate_outward, DEFAULT_TILE_CAP};
    use crate::rules::catalog;

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(400.0), "400");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333");
        assert_eq!(fmt_num(123.456789012), "123.456789");
        assert_eq!(fmt_num(-2.5e-7), "-0.00000025");
        assert!(!fmt_num(1e-12).contains('e'));
    }

    #[test]
    fn one_path_per_tile() {
        let r = catalog("penrose").unwrap();
        let svg = render_tiling(&decompose(&r, 1, 1, DEFAULT_TILE_CAP).unwrap(), &Style::default()).unwrap();
        assert_eq!(svg.matches("<path").count(), 3);
        let s = catalog("square2").unwrap();
        let svg = render_tiling(&inflate_outward(&s, 0, 2, DEFAULT_TILE_CAP).unwrap(), &Style::default()).unwrap();
        assert_eq!(svg.matches("<path").count(), 16);
    }

    #[test]
    fn barcode_and_points() {
        let g = catalog("silver-1d:11").unwrap();
        let t = decompose(&g, 1, 0, DEFAULT_TILE_CAP).unwrap();
        assert_eq!(
            render_barcode(&t, &Style::default()).unwrap().matches("<rect").count(),
            2
        );
        assert!(render_tiling(&t, &Style::default()).is_err());
        let es = expansions(&g, 0, 1, DEFAULT_TILE_CAP).unwrap();
        assert_eq!(
            render_points(&es, &Style::default())
                .unwrap()
                .matches("<circle")
                .count(),
            2
        );
    }

    #[test]
    fn coordinates_stay_on_canvas() {
        let r = catalog("ammann-chair").unwrap();
        let svg = render_tiling(&decompose(&r, 0, 4, DEFAULT_TILE_CAP).unwrap(), &Style::default()).unwrap();
        for d in svg.split("d=\"").skip(1) {
            let d = d.split('"').next().unwrap();
            for tok in d.split([' ', 'M', 'L', 'Z']).filter(|s| !s.is_empty()) {
                let v: f64 = tok.parse().unwrap();
                assert!((0.0..=800.0).contains(&v), "{v}");
            }
        }
    }

    #[test]
    fn pinwheel_needs_divisor() {
        let r = catalog("penrose").unwrap();
        let t = decompose(&r, 1, 2, DEFAULT_TILE_CAP).unwrap();
        assert_eq!(pinwheel(&t, 10).unwrap().tiles.len(), 10 * t.tiles.len());
        assert!(pinwheel(&t, 3).is_err());
    }

    #[test]
    fn bad_styles() {
        let s = Style {
            radii: vec![1.0, 2.0],
            ..Style::default()
        };
        assert!(s.validate().is_err());
        let mut s = Style::default();
        s.palette.clear();
        assert!(s.validate().is_err());
    }
}
