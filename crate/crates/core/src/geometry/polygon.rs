use num_complex::Complex64;

use super::{Frame, Planar, Similarity};
use crate::error::{Error, Result};

const VERTEX_TOL: f64 = 1e-12;

/// Axis-aligned bounding box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BBox {
    pub min: Planar,
    pub max: Planar,
}

impl BBox {
    pub fn of(points: &[Planar]) -> BBox {
        let mut b = BBox {
            min: Complex64::new(f64::INFINITY, f64::INFINITY),
            max: Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        };
        for p in points {
            b.include(*p);
        }
        b
    }

    pub fn include(&mut self, p: Planar) {
        self.min.re = self.min.re.min(p.re);
        self.min.im = self.min.im.min(p.im);
        self.max.re = self.max.re.max(p.re);
        self.max.im = self.max.im.max(p.im);
    }

    pub fn union(&self, other: &BBox) -> BBox {
        let mut b = *self;
        b.include(other.min);
        b.include(other.max);
        b
    }

    pub fn width(&self) -> f64 {
        self.max.re - self.min.re
    }

    pub fn height(&self) -> f64 {
        self.max.im - self.min.im
    }

    /// True when the interiors may meet; boxes touching along an edge do not.
    pub fn overlaps(&self, other: &BBox) -> bool {
        self.min.re < other.max.re
            && other.min.re < self.max.re
            && self.min.im < other.max.im
            && other.min.im < self.max.im
    }
}

/// Simple polygon with counter-clockwise vertices, stored together with a
/// decomposition into convex counter-clockwise parts.
#[derive(Clone, Debug, PartialEq)]
pub struct Polygon {
    vertices: Vec<Planar>,
    parts: Vec<Vec<Planar>>,
    area: f64,
    bbox: BBox,
}

fn cross(a: Planar, b: Planar) -> f64 {
    a.re * b.im - a.im * b.re
}

fn signed_area(v: &[Planar]) -> f64 {
    let n = v.len();
    (0..n).map(|i| cross(v[i], v[(i + 1) % n])).sum::<f64>() / 2.0
}

fn is_convex(v: &[Planar]) -> bool {
    let n = v.len();
    (0..n).all(|i| {
        let (a, b, c) = (v[i], v[(i + 1) % n], v[(i + 2) % n]);
        cross(b - a, c - b) >= -VERTEX_TOL * (b - a).norm() * (c - b).norm()
    })
}

fn segments_cross(a: Planar, b: Planar, c: Planar, d: Planar) -> bool {
    let d1 = cross(b - a, c - a);
    let d2 = cross(b - a, d - a);
    let d3 = cross(d - c, a - c);
    let d4 = cross(d - c, b - c);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

impl Polygon {
    /// Builds a polygon from its vertices in either orientation. A closing
    /// vertex equal to the first is dropped.
    pub fn new(mut vertices: Vec<Planar>) -> Result<Polygon> {
        if vertices.len() > 1 && (vertices[0] - vertices[vertices.len() - 1]).norm() <= VERTEX_TOL {
            vertices.pop();
        }
        if vertices.len() < 3 {
            return Err(Error::invalid("polygon needs at least 3 vertices"));
        }
        if let Some(p) = vertices.iter().find(|p| !p.re.is_finite() || !p.im.is_finite()) {
            return Err(Error::invalid(format!("non-finite polygon vertex {p}")));
        }
        let n = vertices.len();
        for i in 0..n {
            if (vertices[i] - vertices[(i + 1) % n]).norm() <= VERTEX_TOL {
                return Err(Error::invalid(format!("repeated polygon vertex at index {i}")));
            }
        }
        for i in 0..n {
            for j in i + 2..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let (a, b) = (vertices[i], vertices[(i + 1) % n]);
                let (c, d) = (vertices[j], vertices[(j + 1) % n]);
                if segments_cross(a, b, c, d) {
                    return Err(Error::invalid("polygon is self-intersecting"));
                }
            }
        }
        let mut area = signed_area(&vertices);
        let bbox = BBox::of(&vertices);
        let scale = bbox.width().max(bbox.height());
        if area.abs() <= VERTEX_TOL * scale * scale {
            return Err(Error::invalid("degenerate polygon with zero area"));
        }
        if area < 0.0 {
            vertices.reverse();
            area = -area;
        }
        let parts = if is_convex(&vertices) {
            vec![vertices.clone()]
        } else {
            triangulate(&vertices)
        };
        Ok(Polygon {
            vertices,
            parts,
            area,
            bbox,
        })
    }

    pub fn vertices(&self) -> &[Planar] {
        &self.vertices
    }

    /// Convex counter-clockwise pieces whose union is the polygon.
    pub fn convex_parts(&self) -> &[Vec<Planar>] {
        &self.parts
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn bbox(&self) -> BBox {
        self.bbox
    }

    pub fn is_convex(&self) -> bool {
        self.parts.len() == 1
    }

    pub fn transform(&self, frame: &Frame, s: &Similarity) -> Polygon {
        let map = |v: &[Planar]| -> Vec<Planar> {
            let mut out: Vec<Planar> = v.iter().map(|p| frame.apply(s, *p)).collect();
            if s.conj {
                out.reverse();
            }
            out
        };
        let vertices = map(&self.vertices);
        let bbox = BBox::of(&vertices);
        Polygon {
            parts: self.parts.iter().map(|p| map(p)).collect(),
            area: self.area * frame.radix_pow(s.scale).norm_sqr(),
            vertices,
            bbox,
        }
    }

    /// Whether `p` lies in the polygon or within `eps` of it.
    pub fn contains(&self, p: Planar, eps: f64) -> bool {
        self.parts.iter().any(|part| {
            let n = part.len();
            (0..n).all(|i| {
                let (a, b) = (part[i], part[(i + 1) % n]);
                cross(b - a, p - a) / (b - a).norm() >= -eps
            })
        })
    }
}

/// Shoelace area of a polygon; always positive.
pub fn polygon_area(p: &Polygon) -> f64 {
    p.area()
}

/// Area of `P ∩ Q`, summing exact convex clips over the convex parts.
pub fn intersection_area(p: &Polygon, q: &Polygon) -> f64 {
    if !p.bbox.overlaps(&q.bbox) {
        return 0.0;
    }
    let mut total = 0.0;
    for a in &p.parts {
        let ba = BBox::of(a);
        for b in &q.parts {
            if ba.overlaps(&BBox::of(b)) {
                total += convex_intersection_area(a, b);
            }
        }
    }
    total
}

fn convex_intersection_area(subject: &[Planar], clip: &[Planar]) -> f64 {
    let mut out = subject.to_vec();
    let n = clip.len();
    for i in 0..n {
        if out.is_empty() {
            return 0.0;
        }
        let (a, b) = (clip[i], clip[(i + 1) % n]);
        let edge = b - a;
        let side = |p: Planar| cross(edge, p - a);
        let input = std::mem::take(&mut out);
        let m = input.len();
        for j in 0..m {
            let (cur, nxt) = (input[j], input[(j + 1) % m]);
            let (sc, sn) = (side(cur), side(nxt));
            if sc >= 0.0 {
                out.push(cur);
            }
            if (sc >= 0.0) != (sn >= 0.0) {
                let t = sc / (sc - sn);
                out.push(cur + (nxt - cur) * t);
            }
        }
    }
    if out.len() < 3 {
        0.0
    } else {
        signed_area(&out).max(0.0)
    }
}

/// Ear-clipping triangulation of a counter-clockwise simple polygon.
fn triangulate(v: &[Planar]) -> Vec<Vec<Planar>> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    let mut tris = Vec::with_capacity(v.len() - 2);
    while idx.len() > 3 {
        let n = idx.len();
        let ear = (0..n).find(|&i| {
            let (a, b, c) = (v[idx[(i + n - 1) % n]], v[idx[i]], v[idx[(i + 1) % n]]);
            if cross(b - a, c - b) <= 0.0 {
                return false;
            }
            idx.iter().all(|&k| {
                let p = v[k];
                if p == a || p == b || p == c {
                    return true;
                }
                !(cross(b - a, p - a) >= 0.0 && cross(c - b, p - b) >= 0.0 && cross(a - c, p - c) >= 0.0)
            })
        });
        // collinear runs can leave no strict ear; drop a flat vertex instead
        let i = ear.unwrap_or_else(|| {
            (0..n)
                .min_by(|&i, &j| {
                    let f = |i: usize| {
                        let (a, b, c) = (v[idx[(i + n - 1) % n]], v[idx[i]], v[idx[(i + 1) % n]]);
                        cross(b - a, c - b).abs()
                    };
                    f(i).total_cmp(&f(j))
                })
                .unwrap()
        });
        let (a, b, c) = (idx[(i + n - 1) % n], idx[i], idx[(i + 1) % n]);
        if ear.is_some() {
            tris.push(vec![v[a], v[b], v[c]]);
        }
        idx.remove(i);
    }
    tris.push(idx.iter().map(|&k| v[k]).collect());
    tris
}

/// Convex hull by the monotone chain, counter-clockwise, without collinear
/// points.
pub fn convex_hull(points: &[Planar]) -> Vec<Planar> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Planar> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Planar>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 {
                let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
                if cross(b - a, p - b) <= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Open polygonal curve.
#[derive(Clone, Debug, PartialEq)]
pub struct Polyline {
    vertices: Vec<Planar>,
}

impl Polyline {
    pub fn new(vertices: Vec<Planar>) -> Result<Polyline> {
        if vertices.len() < 2 {
            return Err(Error::invalid("polyline needs at least 2 vertices"));
        }
        Ok(Polyline { vertices })
    }

    pub fn vertices(&self) -> &[Planar] {
        &self.vertices
    }

    pub fn transform(&self, frame: &Frame, s: &Similarity) -> Polyline {
        Polyline {
            vertices: self.vertices.iter().map(|p| frame.apply(s, *p)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64, y: f64) -> Planar {
        Complex64::new(x, y)
    }

    fn square(x: f64, y: f64) -> Polygon {
        Polygon::new(vec![c(x, y), c(x + 1.0, y), c(x + 1.0, y + 1.0), c(x, y + 1.0)]).unwrap()
    }

    #[test]
    fn areas() {
        assert_eq!(polygon_area(&square(0.0, 0.0)), 1.0);
        let t = Polygon::new(vec![c(0.0, 0.0), c(0.0, 1.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(polygon_area(&t), 0.5);
        assert!(signed_area(t.vertices()) > 0.0);
    }

    #[test]
    fn rejects_bad_polygons() {
        assert!(Polygon::new(vec![c(0.0, 0.0), c(1.0, 0.0)]).is_err());
        assert!(Polygon::new(vec![c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]).is_err());
        assert!(Polygon::new(vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)]).is_err());
        let bowtie = vec![c(0.0, 0.0), c(1.0, 1.0), c(1.0, 0.0), c(0.0, 1.0)];
        assert!(Polygon::new(bowtie).is_err());
    }

    #[test]
    fn square_overlaps() {
        assert_eq!(intersection_area(&square(0.0, 0.0), &square(5.0, 5.0)), 0.0);
        assert!((intersection_area(&square(0.0, 0.0), &square(0.0, 0.0)) - 1.0).abs() < 1e-15);
        assert!((intersection_area(&square(0.0, 0.0), &square(0.5, 0.0)) - 0.5).abs() < 1e-15);
        assert!(intersection_area(&square(0.0, 0.0), &square(1.0, 0.0)).abs() < 1e-15);
    }

    #[test]
    fn nonconvex_chair() {
        let l = Polygon::new(vec![
            c(0.0, 0.0),
            c(2.0, 0.0),
            c(2.0, 1.0),
            c(1.0, 1.0),
            c(1.0, 2.0),
            c(0.0, 2.0),
        ])
        .unwrap();
        assert!(!l.is_convex());
        assert_eq!(l.convex_parts().len(), 4);
        let parts: f64 = l.convex_parts().iter().map(|p| signed_area(p)).sum();
        assert!((parts - 3.0).abs() < 1e-14);
        assert!((intersection_area(&l, &l) - 3.0).abs() < 1e-12);
        assert!(intersection_area(&l, &square(1.0, 1.0)).abs() < 1e-15);
        assert!((intersection_area(&l, &square(0.5, 0.5)) - 0.75).abs() < 1e-12);
        assert!(l.contains(c(0.5, 1.5), 0.0));
        assert!(!l.contains(c(1.5, 1.5), 1e-9));
    }

    #[test]
    fn hull_of_square_with_interior_points() {
        let pts = vec![
            c(0.0, 0.0),
            c(0.5, 0.5),
            c(1.0, 0.0),
            c(1.0, 1.0),
            c(0.0, 1.0),
            c(0.5, 0.0),
        ];
        let h = convex_hull(&pts);
        assert_eq!(h, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(0.0, 1.0)]);
    }

    #[test]
    fn transform_under_reflection() {
        let f = Frame::real(2.0, 2);
        let s = Similarity {
            scale: 1,
            rot: 1,
            conj: true,
            translation: c(3.0, 0.0),
        };
        let t = Polygon::new(vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        let img = t.transform(&f, &s);
        assert!((img.area() - 2.0).abs() < 1e-15);
        assert!((signed_area(img.vertices()) - 2.0).abs() < 1e-14);
        assert!((signed_area(&img.convex_parts()[0]) - 2.0).abs() < 1e-14);
    }
}
