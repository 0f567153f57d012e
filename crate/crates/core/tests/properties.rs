use std::sync::Arc;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;
use tessera::engine::{decompose, DEFAULT_TILE_CAP};
use tessera::geometry::{Frame, Polygon, Similarity};
use tessera::numberfield::{silver_root, Field, FieldElement, SilverIndex, DEFAULT_PRECISION_BITS};
use tessera::rules::catalog;

fn golden() -> Field {
    Arc::new(silver_root(&SilverIndex::parse("11").unwrap(), DEFAULT_PRECISION_BITS).unwrap())
}

fn tribonacci() -> Field {
    Arc::new(silver_root(&SilverIndex::parse("111").unwrap(), DEFAULT_PRECISION_BITS).unwrap())
}

fn element(f: &Field, c: &[(i64, i64)]) -> FieldElement {
    let coeffs = c.iter().map(|&(n, d)| BigRational::new(n.into(), d.into())).collect();
    FieldElement::from_coeffs(f, coeffs)
}

fn coeffs() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-50i64..50, 1i64..12), 3)
}

fn similarity() -> impl Strategy<Value = Similarity> {
    (-3i32..4, 0i32..10, any::<bool>(), -5.0f64..5.0, -5.0f64..5.0).prop_map(|(scale, rot, conj, x, y)| Similarity {
        scale,
        rot,
        conj,
        translation: Complex64::new(x, y),
    })
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() < 1e-9 * (1.0 + a.norm() + b.norm())
}

proptest! {
    #[test]
    fn field_ring_laws(a in coeffs(), b in coeffs(), c in coeffs()) {
        for f in [golden(), tribonacci()] {
            let (a, b, c) = (element(&f, &a), element(&f, &b), element(&f, &c));
            prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a - &b) + &b, a.clone());
            let s = (&a * &b).to_f64();
            prop_assert!((s - a.to_f64() * b.to_f64()).abs() < 1e-9 * (1.0 + s.abs()));
        }
    }

    #[test]
    fn field_inverse(a in coeffs()) {
        let f = golden();
        let a = element(&f, &a);
        prop_assume!(!a.is_zero());
        prop_assert!((&a * &a.inv().unwrap()).is_one());
        let p = a.minimal_polynomial();
        // a is a root of its own minimal polynomial
        let mut acc = FieldElement::zero(&f);
        for c in p.iter().rev() {
            acc = &(&acc * &a) + &FieldElement::from_rational(&f, c.clone());
        }
        prop_assert!(acc.is_zero());
    }

    #[test]
    fn similarity_compose_and_inverse(a in similarity(), b in similarity(), x in -3.0f64..3.0, y in -3.0f64..3.0) {
        let frame = Frame::real((1.0 + 5f64.sqrt()) / 2.0, 5);
        let p = Complex64::new(x, y);
        let ab = frame.compose(&a, &b);
        prop_assert!(close(frame.apply(&ab, p), frame.apply(&a, frame.apply(&b, p))));
        let back = frame.apply(&frame.inverse(&a), frame.apply(&a, p));
        prop_assert!(close(back, p));
    }

    #[test]
    fn area_scales_with_the_linear_part(s in similarity(), w in 0.1f64..3.0, h in 0.1f64..3.0) {
        let frame = Frame::real(2f64.sqrt(), 4);
        let poly = Polygon::new(vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(w, 0.0),
            Complex64::new(w, h),
            Complex64::new(0.0, h),
        ]).unwrap();
        let moved = poly.transform(&frame, &s);
        let k = frame.linear(&s).norm_sqr();
        prop_assert!((moved.area() - k * poly.area()).abs() < 1e-9 * (1.0 + moved.area()));
    }

    #[test]
    fn patch_sizes_follow_matrix_powers(bits in 1u32..16, depth in 1u32..7) {
        let b: String = format!("{bits:b}1");
        let r = catalog(&format!("silver-1d:{b}")).unwrap();
        let t = decompose(&r, 0, depth, DEFAULT_TILE_CAP).unwrap();
        let want: BigUint = r.partition_matrix().pow(depth)[0].iter().sum();
        prop_assert_eq!(BigUint::from(t.tiles.len()), want);
    }
}
