use num_bigint::BigUint;
use num_complex::Complex64;
use tessera::engine::{
    decompose, expansion_from_pieces, expansions, inflate_outward, path, project_to_1d, tile_counts, verify_geometry,
    DEFAULT_TILE_CAP,
};
use tessera::rules::{catalog, list, PartitionMatrix};

fn big(v: &[u64]) -> Vec<BigUint> {
    v.iter().map(|&x| BigUint::from(x)).collect()
}

#[test]
fn counts_follow_matrix_powers() {
    let golden = PartitionMatrix::new(vec![vec![1, 1], vec![1, 0]]).unwrap();
    assert_eq!(tile_counts(&golden, 0, 6), big(&[1, 2, 3, 5, 8, 13, 21]));
    assert_eq!(tile_counts(&golden, 1, 5), big(&[1, 1, 2, 3, 5, 8]));
    let four = PartitionMatrix::new(vec![vec![4]]).unwrap();
    assert_eq!(tile_counts(&four, 0, 3), big(&[1, 4, 16, 64]));
}

#[test]
fn penrose_one_step_counts() {
    let r = catalog("penrose").unwrap();
    let u = r.partition_matrix();
    // R113 (smaller) yields one of each; R122 yields two larger, one smaller
    assert_eq!(u.rows(), &[vec![1, 1], vec![1, 2]]);
    let t = inflate_outward(&r, 1, 5, DEFAULT_TILE_CAP).unwrap();
    let sum: BigUint = u.pow(5)[1].iter().sum();
    assert_eq!(BigUint::from(t.tiles.len()), sum);
}

#[test]
fn checkerboard_one_step() {
    let r = catalog("checkerboard").unwrap();
    let t = inflate_outward(&r, 0, 1, DEFAULT_TILE_CAP).unwrap();
    assert_eq!(t.tiles.len(), 4);
    assert_eq!(t.tiles.iter().filter(|p| p.type_id == 0).count(), 2);
}

#[test]
fn catalog_patches_are_sound() {
    let mut names: Vec<String> = list().into_iter().map(|e| e.name).collect();
    names.extend(
        [
            "cartesian:11:translation-only",
            "cartesian:111:isometry",
            "penrose-derotated",
        ]
        .map(String::from),
    );
    for name in names {
        let Ok(r) = catalog(&name) else { continue };
        if r.dimension != 2 || !r.has_geometry() {
            continue;
        }
        let (depth, tol) = if name == "taylor-trapezoid" {
            (8, 1e-6)
        } else {
            (6, 1e-9)
        };
        let u = r.partition_matrix();
        for root in 0..r.type_count() {
            let t = decompose(&r, root, depth, DEFAULT_TILE_CAP).unwrap();
            let expected: BigUint = u.pow(depth)[root].iter().sum();
            assert_eq!(BigUint::from(t.tiles.len()), expected, "{}", name);
            let g = verify_geometry(&t).unwrap();
            assert!(g.area_deficit < tol, "{} root {root}: {g:?}", name);
            assert!(g.max_overlap < tol, "{} root {root}: {g:?}", name);
            assert_eq!(g.outside, 0, "{} root {root}", name);
        }
    }
}

#[test]
fn fig3_path_endpoint() {
    let r = catalog("penrose").unwrap();
    let e = expansion_from_pieces(&r, 0, &[1; 8]).unwrap();
    let s5 = 5f64.sqrt();
    let want = Complex64::new(-35.0 / 2.0 + 8.0 * s5, 0.5 * (85.0 - 38.0 * s5).sqrt());
    assert!((e.value() - want).norm() < 1e-9, "{} vs {want}", e.value());
    let p = path(&e).unwrap();
    assert!(!p.degenerate);
    assert_eq!(p.polyline.vertices().len(), 9);
    assert!((p.polyline.vertices()[8] - e.value()).norm() < 1e-12);
    let rots: Vec<i32> = e.steps.iter().map(|s| s.rot).collect();
    assert_eq!(rots, vec![4; 8]);
}

#[test]
fn golden_expansions_depth_one() {
    let r = catalog("silver-1d:11").unwrap();
    let es = expansions(&r, 0, 1, DEFAULT_TILE_CAP).unwrap();
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let vals: Vec<f64> = es.iter().map(|e| e.value().re).collect();
    assert_eq!(vals.len(), 2);
    assert!(vals[0].abs() < 1e-15 && (vals[1] - 1.0 / phi).abs() < 1e-12);
    let single = path(&expansion_from_pieces(&r, 0, &[1]).unwrap()).unwrap();
    assert!((single.polyline.vertices()[1].re - 1.0 / phi).abs() < 1e-12);
    let zero = path(&expansion_from_pieces(&r, 0, &[0, 0, 0]).unwrap()).unwrap();
    assert!(zero.degenerate);
    assert_eq!(zero.polyline.vertices(), &[Complex64::new(0.0, 0.0); 2]);
}

#[test]
fn expansions_stay_in_root_shape() {
    let r = catalog("penrose").unwrap();
    let tri = r.types[0].polygon().unwrap();
    let es = expansions(&r, 0, 8, DEFAULT_TILE_CAP).unwrap();
    let sum: BigUint = r.partition_matrix().pow(8)[0].iter().sum();
    assert_eq!(BigUint::from(es.len()), sum);
    for e in &es {
        assert!(tri.contains(e.value(), 1e-9), "{}", e.value());
    }
}

#[test]
fn penrose_projection() {
    let r = catalog("penrose").unwrap();
    let p = project_to_1d(&r).unwrap().rule;
    assert_eq!(p.partition_matrix(), r.partition_matrix());
    let rho = tessera::numberfield::FieldElement::generator(&r.field);
    let inv = rho.inv().unwrap();
    let lens: Vec<_> = p
        .types
        .iter()
        .map(|t| match &t.shape {
            tessera::rules::Shape::Interval(l) => l.clone(),
            _ => unreachable!(),
        })
        .collect();
    assert_eq!(lens, vec![&inv * &inv, inv.clone()]);
    let digits: Vec<_> = p
        .pieces
        .iter()
        .flatten()
        .map(|q| q.digit.as_real(&p.field).unwrap())
        .collect();
    for want in [
        tessera::numberfield::FieldElement::zero(&r.field),
        inv,
        tessera::numberfield::FieldElement::one(&r.field),
    ] {
        assert!(digits.contains(&want), "{want}");
    }
}
