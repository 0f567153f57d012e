//! Points of the plane as complex numbers, similarity maps built from radix
//! powers and roots of unity, and polygons with area and overlap queries.

mod polygon;

pub use polygon::{convex_hull, intersection_area, polygon_area, BBox, Polygon, Polyline};

use num_complex::Complex64;
use std::f64::consts::PI;

/// A point of `R²` read as `x + iy`.
pub type Planar = Complex64;

/// Relative tolerance on geometric comparisons, applied to areas normalized
/// so the largest reference tile has area 1.
pub const EPS_GEO: f64 = 1e-9;

/// `p ↦ t + ρ^scale · u^rot · (conj ? p̄ : p)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Similarity {
    pub scale: i32,
    pub rot: i32,
    pub conj: bool,
    pub translation: Planar,
}

impl Similarity {
    pub const IDENTITY: Similarity = Similarity {
        scale: 0,
        rot: 0,
        conj: false,
        translation: Complex64::new(0.0, 0.0),
    };

    pub fn translation(t: Planar) -> Similarity {
        Similarity {
            translation: t,
            ..Self::IDENTITY
        }
    }
}

/// The numeric context a similarity is read in: the radix and the rotation
/// order `m`, with `u = e^{iπ/m}` of order `2m`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frame {
    pub radix: Complex64,
    pub m: u32,
}

impl Frame {
    pub fn new(radix: Complex64, m: u32) -> Frame {
        assert!(m >= 1, "rotation order must be positive");
        Frame { radix, m }
    }

    pub fn real(radix: f64, m: u32) -> Frame {
        Self::new(Complex64::new(radix, 0.0), m)
    }

    /// Order of `u`.
    pub fn order(&self) -> i32 {
        2 * self.m as i32
    }

    pub fn reduce_rot(&self, rot: i32) -> i32 {
        rot.rem_euclid(self.order())
    }

    pub fn u(&self, k: i32) -> Complex64 {
        let k = self.reduce_rot(k);
        let m = self.m as i32;
        // exact values at the quarter turns
        match 2 * k {
            0 => Complex64::new(1.0, 0.0),
            x if x == m => Complex64::new(0.0, 1.0),
            x if x == 2 * m => Complex64::new(-1.0, 0.0),
            x if x == 3 * m => Complex64::new(0.0, -1.0),
            _ => Complex64::from_polar(1.0, PI * k as f64 / self.m as f64),
        }
    }

    pub fn radix_pow(&self, e: i32) -> Complex64 {
        if self.radix.im == 0.0 {
            Complex64::new(self.radix.re.powi(e), 0.0)
        } else {
            self.radix.powi(e)
        }
    }

    /// Multiplier of the linear part.
    pub fn linear(&self, s: &Similarity) -> Complex64 {
        self.radix_pow(s.scale) * self.u(s.rot)
    }

    pub fn normalize(&self, s: Similarity) -> Similarity {
        Similarity {
            rot: self.reduce_rot(s.rot),
            ..s
        }
    }

    pub fn apply(&self, s: &Similarity, p: Planar) -> Planar {
        let q = if s.conj { p.conj() } else { p };
        s.translation + self.linear(s) * q
    }

    /// The map `p ↦ a(b(p))`. Conjugation commutes with real scaling only,
    /// so a conjugating `a` requires a real radix.
    pub fn compose(&self, a: &Similarity, b: &Similarity) -> Similarity {
        debug_assert!(!a.conj || self.radix.im == 0.0);
        let rot = if a.conj { a.rot - b.rot } else { a.rot + b.rot };
        Similarity {
            scale: a.scale + b.scale,
            rot: self.reduce_rot(rot),
            conj: a.conj ^ b.conj,
            translation: self.apply(a, b.translation),
        }
    }

    pub fn inverse(&self, s: &Similarity) -> Similarity {
        let rot = if s.conj { s.rot } else { -s.rot };
        let lin = self.radix_pow(-s.scale) * self.u(rot);
        let t = if s.conj { s.translation.conj() } else { s.translation };
        Similarity {
            scale: -s.scale,
            rot: self.reduce_rot(rot),
            conj: s.conj,
            translation: -(lin * t),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PHI: f64 = 1.618_033_988_749_895;

    fn close(a: Planar, b: Planar) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn apply_examples() {
        let f = Frame::real(PHI, 5);
        let id = Similarity::IDENTITY;
        assert_eq!(f.apply(&id, Complex64::new(0.3, 0.7)), Complex64::new(0.3, 0.7));
        let s = Similarity {
            scale: -1,
            translation: Complex64::new(1.0, 0.0),
            ..id
        };
        assert!(close(f.apply(&s, Complex64::new(0.0, 0.0)), Complex64::new(1.0, 0.0)));
        assert!(close(f.apply(&s, Complex64::new(1.0, 0.0)), Complex64::new(PHI, 0.0)));
        let c = Similarity { conj: true, ..id };
        assert_eq!(f.apply(&c, Complex64::new(0.0, 1.0)), Complex64::new(0.0, -1.0));
    }

    #[test]
    fn compose_examples() {
        let f = Frame::real(2.0, 2);
        let s = Similarity {
            scale: -1,
            translation: Complex64::new(1.0, 0.0),
            ..Similarity::IDENTITY
        };
        let ss = f.compose(&s, &s);
        assert_eq!(ss.scale, -2);
        assert!(close(ss.translation, Complex64::new(1.5, 0.0)));
        assert_eq!(f.compose(&Similarity::IDENTITY, &s), s);
        let c = Similarity {
            conj: true,
            ..Similarity::IDENTITY
        };
        assert!(!f.compose(&c, &c).conj);
    }

    #[test]
    fn quarter_turns_are_exact() {
        let f = Frame::real(2.0, 2);
        assert_eq!(f.u(1), Complex64::new(0.0, 1.0));
        assert_eq!(f.u(2), Complex64::new(-1.0, 0.0));
        assert_eq!(f.u(-1), Complex64::new(0.0, -1.0));
        let g = Frame::real(2.0, 3);
        assert_eq!(g.u(3), Complex64::new(-1.0, 0.0));
        assert!((g.u(1) - Complex64::from_polar(1.0, PI / 3.0)).norm() < 1e-15);
    }

    #[test]
    fn inverse_roundtrip() {
        let f = Frame::real(PHI, 5);
        let s = Similarity {
            scale: 2,
            rot: 3,
            conj: true,
            translation: Complex64::new(0.25, -1.5),
        };
        let p = Complex64::new(0.7, 0.2);
        assert!(close(f.apply(&f.inverse(&s), f.apply(&s, p)), p));
        let id = f.compose(&s, &f.inverse(&s));
        assert_eq!((id.scale, id.rot, id.conj), (0, 0, false));
        assert!(id.translation.norm() < 1e-12);
    }
}
