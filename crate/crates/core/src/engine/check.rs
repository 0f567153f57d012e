use num_complex::Complex64;
use serde::Serialize;

use super::{Mode, Tiling};
use crate::error::{Error, Result};
use crate::geometry::{convex_hull, intersection_area, Planar, Polygon, Similarity, EPS_GEO};
use crate::rules::{RuleSystem, Shape};

/// Area and disjointness summary of a finite patch.
#[derive(Clone, Debug, Serialize)]
pub struct GeometryReport {
    pub tile_count: usize,
    pub area_total: f64,
    /// Area of the root shape in tile coordinates.
    pub area_expected: f64,
    /// `|area_total − area_expected| / area_expected`.
    pub area_deficit: f64,
    /// Largest pairwise intersection, relative to the largest tile.
    pub max_overlap: f64,
    /// Tiles with a vertex outside the root shape.
    pub outside: usize,
}

/// Checks that the tiles of a patch cover the root shape without overlaps.
pub fn verify_geometry(tiling: &Tiling) -> Result<GeometryReport> {
    if let Some(intervals) = tiling.intervals() {
        return Ok(verify_intervals(tiling, intervals));
    }
    let Some(polys) = tiling.polygons() else {
        return Err(Error::invalid(format!(
            "rule '{}' has types without polygons; nothing to verify",
            tiling.rule.name
        )));
    };
    let frame = tiling.frame();
    let root = tiling.rule.types[tiling.root_type]
        .polygon()
        .expect("polygonal rule")
        .transform(&frame, &tiling.root_transform());
    let area_total: f64 = polys.iter().map(Polygon::area).sum();
    let area_expected = root.area();
    let largest = polys.iter().map(Polygon::area).fold(0.0, f64::max);
    let size = root.bbox().width().max(root.bbox().height());
    let outside = polys
        .iter()
        .filter(|p| p.vertices().iter().any(|&v| !root.contains(v, EPS_GEO * size)))
        .count();
    Ok(GeometryReport {
        tile_count: polys.len(),
        area_total,
        area_expected,
        area_deficit: (area_total - area_expected).abs() / area_expected,
        max_overlap: max_overlap(&polys) / largest,
        outside,
    })
}

fn verify_intervals(tiling: &Tiling, mut iv: Vec<(f64, f64)>) -> GeometryReport {
    let Shape::Interval(len) = &tiling.rule.types[tiling.root_type].shape else {
        unreachable!("intervals come from interval shapes")
    };
    let scale = match tiling.mode {
        Mode::DecomposeInPlace => 1.0,
        Mode::InflateOutward => tiling.frame().radix.re.powi(tiling.depth as i32),
    };
    let hi = len.to_f64() * scale;
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let area_total: f64 = iv.iter().map(|(a, b)| b - a).sum();
    let largest = iv.iter().map(|(a, b)| b - a).fold(0.0, f64::max);
    let overlap = iv.windows(2).map(|w| (w[0].1 - w[1].0).max(0.0)).fold(0.0, f64::max);
    let tol = EPS_GEO * hi;
    GeometryReport {
        tile_count: iv.len(),
        area_total,
        area_expected: hi,
        area_deficit: (area_total - hi).abs() / hi,
        max_overlap: overlap / largest,
        outside: iv.iter().filter(|(a, b)| *a < -tol || *b > hi + tol).count(),
    }
}

/// Sweep over bounding boxes sorted by their left edge.
fn max_overlap(polys: &[Polygon]) -> f64 {
    let mut order: Vec<usize> = (0..polys.len()).collect();
    order.sort_by(|&a, &b| polys[a].bbox().min.re.total_cmp(&polys[b].bbox().min.re));
    let mut worst = 0.0f64;
    let mut active: Vec<usize> = Vec::new();
    for &i in &order {
        let bi = polys[i].bbox();
        active.retain(|&j| polys[j].bbox().max.re > bi.min.re);
        for &j in &active {
            if polys[j].bbox().overlaps(&bi) {
                worst = worst.max(intersection_area(&polys[i], &polys[j]));
            }
        }
        active.push(i);
    }
    worst
}

/// Convex hulls of the remainder sets, by iterating
/// `H_i ← hull(⋃_p T_p(H_child))` from `H_i = {0}`.
pub fn attractor_hulls(rule: &RuleSystem, iterations: u32) -> Vec<Vec<Planar>> {
    let frame = rule.frame();
    let maps: Vec<Vec<(usize, Similarity)>> = rule
        .pieces
        .iter()
        .map(|row| row.iter().map(|p| (p.child, p.similarity(&frame))).collect())
        .collect();
    let mut hulls: Vec<Vec<Planar>> = vec![vec![Complex64::new(0.0, 0.0)]; rule.types.len()];
    for _ in 0..iterations {
        hulls = maps
            .iter()
            .map(|row| {
                let pts: Vec<Planar> = row
                    .iter()
                    .flat_map(|(c, s)| hulls[*c].iter().map(|&p| frame.apply(s, p)).collect::<Vec<_>>())
                    .collect();
                let h = convex_hull(&pts);
                if h.is_empty() {
                    pts[..1].to_vec()
                } else {
                    h
                }
            })
            .collect();
    }
    hulls
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{decompose, inflate_outward, DEFAULT_TILE_CAP};
    use crate::geometry::polygon_area;
    use crate::rules::catalog;

    #[test]
    fn square2_inflates_to_a_4x4_square() {
        let r = catalog("square2").unwrap();
        let t = inflate_outward(&r, 0, 2, DEFAULT_TILE_CAP).unwrap();
        let g = verify_geometry(&t).unwrap();
        assert_eq!(g.tile_count, 16);
        assert!((g.area_total - 16.0).abs() < 1e-12);
        assert!(g.area_deficit < 1e-12 && g.max_overlap < 1e-12 && g.outside == 0);
    }

    #[test]
    fn golden_barcode_covers_root() {
        let r = catalog("silver-1d:11").unwrap();
        let t = decompose(&r, 1, 10, DEFAULT_TILE_CAP).unwrap();
        let g = verify_geometry(&t).unwrap();
        assert_eq!(g.tile_count, 89);
        assert!(g.area_deficit < 1e-12 && g.max_overlap < 1e-12 && g.outside == 0);
    }

    #[test]
    fn taylor_hull_is_the_trapezoid() {
        let r = catalog("taylor-trapezoid").unwrap();
        let hull = attractor_hulls(&r, 30).remove(0);
        let poly = Polygon::new(hull).unwrap();
        let reference = r.types[0].polygon().unwrap();
        let inter = intersection_area(&poly, reference);
        assert!((polygon_area(&poly) - reference.area()).abs() < 1e-6);
        assert!((inter - reference.area()).abs() < 1e-6);
    }
}
