use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use super::{
    build_1d_silver_rule, cartesian_square, derotate, Digit, DigitTerm, Equivalence, Piece, Radix, RuleSystem, Shape,
    TileType,
};
use crate::error::{Error, Result};
use crate::geometry::{Frame, Polygon, Polyline};
use crate::numberfield::{
    silver_root, AlgebraicNumber, Field, FieldElement, IntPolynomial, SilverIndex, DEFAULT_PRECISION_BITS,
};

/// One line of the catalog listing.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub name: String,
    pub dimension: u8,
    pub radix: String,
    /// `None` for parametric families.
    pub types: Option<usize>,
    pub summary: String,
}

const STATIC: &[(&str, &str)] = &[
    ("ammann-chair", "Ammann chair, radix sqrt(phi)"),
    ("ammann-phi", "Ammann chair taken two steps at a time, radix phi"),
    ("checkerboard", "black and white unit squares, radix 2"),
    ("complex-base:1+i", "binary digits {0,1} with radix 1+i (twindragon)"),
    (
        "complex-base:1+i-sqrt7-over-2",
        "binary digits {0,1} with radix (1+i*sqrt(7))/2",
    ),
    ("complex-base:i-sqrt2", "binary digits {0,1} with radix i*sqrt(2)"),
    ("penrose", "Penrose triangles with reflections, radix phi"),
    (
        "penrose-derotated",
        "Penrose triangles, one type per orientation up to reflection in the real axis",
    ),
    ("penrose-rot", "Penrose triangles under rotations only, radix phi"),
    ("square2", "unit square, radix 2, digits {0,1,1+i,i}"),
    ("taylor-trapezoid", "Taylor trapezoid monotile, radix 2"),
];

/// All catalog names, including the parametric families, sorted by name.
pub fn list() -> Vec<CatalogEntry> {
    let mut out: Vec<CatalogEntry> = STATIC
        .iter()
        .map(|(name, summary)| {
            let rule = catalog(name).expect("static catalog entries build");
            CatalogEntry {
                name: name.to_string(),
                dimension: rule.dimension,
                radix: rule.radix.describe(),
                types: Some(rule.types.len()),
                summary: summary.to_string(),
            }
        })
        .collect();
    out.push(CatalogEntry {
        name: "silver-1d:<bits>".into(),
        dimension: 1,
        radix: "s_b".into(),
        types: None,
        summary: "1-D silver-number tiling, bits b_1..b_N with b_N = 1, e.g. silver-1d:111".into(),
    });
    out.push(CatalogEntry {
        name: "cartesian:<bits>:<equivalence>".into(),
        dimension: 2,
        radix: "s_b".into(),
        types: None,
        summary: "rectangles R_i x R_j of a silver tiling; equivalence translation-only, \
                  rotation-only or isometry"
            .into(),
    });
    out.sort_by(|a, b| a.name.cmp(&b.name));
    out
}

/// Builds a named rule: a static entry or `silver-1d:<bits>` /
/// `cartesian:<bits>:<equivalence>`.
pub fn catalog(name: &str) -> Result<RuleSystem> {
    let unknown = || Error::UnknownRule {
        name: name.to_string(),
        available: list_names(),
    };
    if let Some(bits) = name.strip_prefix("silver-1d:") {
        return build_1d_silver_rule(&SilverIndex::parse(bits)?);
    }
    if let Some(rest) = name.strip_prefix("cartesian:") {
        let (bits, mode) = rest.split_once(':').unwrap_or((rest, "isometry"));
        let base = build_1d_silver_rule(&SilverIndex::parse(bits)?)?;
        return cartesian_square(&base, Equivalence::parse(mode)?);
    }
    match name {
        "square2" => square2(),
        "checkerboard" => checkerboard(),
        "penrose" => penrose(),
        "penrose-rot" => penrose_rot(),
        "penrose-derotated" => {
            let mut r = derotate(&penrose()?)?;
            r.name = name.into();
            Ok(r)
        }
        "ammann-chair" => ammann_chair(),
        "ammann-phi" => ammann_chair()?.squared("ammann-phi"),
        "taylor-trapezoid" => taylor_trapezoid(),
        "complex-base:i-sqrt2" => complex_base(name, &[2, 0, 1], Complex64::new(0.0, 2f64.sqrt()), "i*sqrt(2)"),
        "complex-base:1+i-sqrt7-over-2" => complex_base(
            name,
            &[2, -1, 1],
            Complex64::new(0.5, 7f64.sqrt() / 2.0),
            "(1+i*sqrt(7))/2",
        ),
        "complex-base:1+i" => complex_base(name, &[2, -2, 1], Complex64::new(1.0, 1.0), "1+i"),
        _ => Err(unknown()),
    }
}

fn list_names() -> String {
    list().iter().map(|e| e.name.as_str()).collect::<Vec<_>>().join(", ")
}

fn c(x: f64, y: f64) -> Complex64 {
    Complex64::new(x, y)
}

fn rational_field(n: i64) -> Field {
    Arc::new(AlgebraicNumber::integer(n))
}

fn silver_field(bits: &str) -> Result<Field> {
    Ok(Arc::new(silver_root(
        &SilverIndex::parse(bits)?,
        DEFAULT_PRECISION_BITS,
    )?))
}

fn term(coeff: FieldElement, rot: i32) -> DigitTerm {
    DigitTerm { coeff, rot }
}

fn piece(child: usize, digit: Digit, rot: i32, conj: bool) -> Piece {
    Piece {
        child,
        digit,
        rot,
        conj,
    }
}

fn polygon_type(
    id: usize,
    name: &str,
    vertices: Vec<Complex64>,
    measure: FieldElement,
    decorations: Vec<Vec<Complex64>>,
) -> Result<TileType> {
    let poly = Polygon::new(vertices)?;
    Ok(TileType {
        id,
        name: name.into(),
        area: poly.area(),
        shape: Shape::Polygon(poly),
        measure: Some(measure),
        decorations: decorations.into_iter().map(Polyline::new).collect::<Result<_>>()?,
    })
}

fn unit_square() -> Vec<Complex64> {
    vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(0.0, 1.0)]
}

/// `2R = R ∪ (1 + R) ∪ (1 + i + R) ∪ (i + R)`.
fn square2() -> Result<RuleSystem> {
    let field = rational_field(2);
    let frame = Frame::real(2.0, 2);
    let one = FieldElement::one(&field);
    let digits = [
        Digit::zero(),
        Digit::exact(vec![term(one.clone(), 0)], &frame),
        Digit::exact(vec![term(one.clone(), 0), term(one.clone(), 1)], &frame),
        Digit::exact(vec![term(one.clone(), 1)], &frame),
    ];
    Ok(RuleSystem {
        name: "square2".into(),
        dimension: 2,
        radix: Radix::Real(FieldElement::from_int(&field, 2)),
        rotation_order_m: 2,
        equivalence: Equivalence::TranslationOnly,
        types: vec![polygon_type(
            0,
            "R",
            unit_square(),
            one,
            vec![vec![c(0.0, 0.0), c(1.0, 1.0)]],
        )?],
        pieces: vec![digits.into_iter().map(|d| piece(0, d, 0, false)).collect()],
        field,
    })
}

/// `2B = B ∪ (1 + i + B) ∪ (1 + W) ∪ (i + W)`, and the same for `2W`.
fn checkerboard() -> Result<RuleSystem> {
    let field = rational_field(2);
    let frame = Frame::real(2.0, 2);
    let one = FieldElement::one(&field);
    let row = || {
        vec![
            piece(0, Digit::zero(), 0, false),
            piece(
                0,
                Digit::exact(vec![term(one.clone(), 0), term(one.clone(), 1)], &frame),
                0,
                false,
            ),
            piece(1, Digit::exact(vec![term(one.clone(), 0)], &frame), 0, false),
            piece(1, Digit::exact(vec![term(one.clone(), 1)], &frame), 0, false),
        ]
    };
    Ok(RuleSystem {
        name: "checkerboard".into(),
        dimension: 2,
        radix: Radix::Real(FieldElement::from_int(&field, 2)),
        rotation_order_m: 2,
        equivalence: Equivalence::TranslationOnly,
        types: vec![
            polygon_type(0, "B", unit_square(), one.clone(), vec![])?,
            polygon_type(1, "W", unit_square(), one.clone(), vec![])?,
        ],
        pieces: vec![row(), row()],
        field,
    })
}

/// The two Penrose triangles with angles `(1,1,3)π/5` and `(1,2,2)π/5`,
/// both with a side `[0, 1/φ]` on the real axis, and their decorations.
fn penrose_types(field: &Field) -> Result<Vec<TileType>> {
    let phi = FieldElement::generator(field).to_f64();
    let base = 1.0 / phi;
    let apex113 = c(base / 2.0, base / 2.0 * (PI / 5.0).tan());
    let apex122 = Complex64::from_polar(base, PI / 5.0);
    let mid = |a: Complex64, b: Complex64| (a + b) / 2.0;
    let rho = FieldElement::generator(field);
    let one = FieldElement::one(field);
    // m(R_122) = ρ m(R_113); normalized to (1/ρ², 1/ρ)
    let m113 = (&rho * &rho).inv()?;
    let m122 = &rho - &one;
    Ok(vec![
        polygon_type(
            0,
            "R113",
            vec![c(0.0, 0.0), c(base, 0.0), apex113],
            m113,
            vec![vec![mid(c(0.0, 0.0), apex113), mid(c(base, 0.0), apex113)]],
        )?,
        polygon_type(
            1,
            "R122",
            vec![c(0.0, 0.0), c(base, 0.0), apex122],
            m122,
            vec![vec![mid(c(base, 0.0), apex122), c(0.0, 0.0)]],
        )?,
    ])
}

/// `φR_113 = R_122 ∪ (1 + u⁴R_113)`,
/// `φR_122 = R_122' ∪ uR̄_113 ∪ (1 + u⁵R̄_122)` with `R_122' = 1 + u³R_122`.
fn penrose() -> Result<RuleSystem> {
    let field = silver_field("11")?;
    let frame = Frame::real(FieldElement::generator(&field).to_f64(), 5);
    let one = || Digit::real(FieldElement::one(&field), &frame);
    let zero = Digit::zero;
    Ok(RuleSystem {
        name: "penrose".into(),
        dimension: 2,
        radix: Radix::Real(FieldElement::generator(&field)),
        rotation_order_m: 5,
        equivalence: Equivalence::Isometry,
        types: penrose_types(&field)?,
        pieces: vec![
            vec![piece(1, zero(), 0, false), piece(0, one(), 4, false)],
            vec![
                piece(1, one(), 3, false),
                piece(0, zero(), 1, true),
                piece(1, one(), 5, true),
            ],
        ],
        field,
    })
}

/// Penrose triangles without reflections:
/// `ρR_113 = R_122 ∪ (1 + u⁴R_113)`,
/// `ρR_122 = (u/ρ + u⁶R_113) ∪ (1 + u³R_122) ∪ (1 + u⁴R_122)`.
fn penrose_rot() -> Result<RuleSystem> {
    let field = silver_field("11")?;
    let rho = FieldElement::generator(&field);
    let frame = Frame::real(rho.to_f64(), 5);
    let one = || Digit::real(FieldElement::one(&field), &frame);
    let u_over_rho = Digit::exact(vec![term(rho.inv()?, 1)], &frame);
    Ok(RuleSystem {
        name: "penrose-rot".into(),
        dimension: 2,
        radix: Radix::Real(rho),
        rotation_order_m: 5,
        equivalence: Equivalence::RotationOnly,
        types: penrose_types(&field)?,
        pieces: vec![
            vec![piece(1, Digit::zero(), 0, false), piece(0, one(), 4, false)],
            vec![
                piece(0, u_over_rho, 6, false),
                piece(1, one(), 3, false),
                piece(1, one(), 4, false),
            ],
        ],
        field,
    })
}

/// Ammann's chair with `r = √φ`, `r⁴ = r² + 1`: the large chair `L` and
/// `S = L/r`, `r L = (iφ + u³L) ∪ (r³ + u²S̄)` and `r S = L`, with `u = i`.
fn ammann_chair() -> Result<RuleSystem> {
    let field = silver_field("0101")?;
    let r = FieldElement::generator(&field);
    let rf = r.to_f64();
    let phi = rf * rf;
    let frame = Frame::real(rf, 2);
    let large = vec![
        c(0.0, 0.0),
        c(phi, 0.0),
        c(phi, 1.0 / rf),
        c(1.0, 1.0 / rf),
        c(1.0, rf),
        c(0.0, rf),
    ];
    let small: Vec<Complex64> = large.iter().map(|p| p / rf).collect();
    // m(L) = r + r⁻³ is the exact area; m(S) = m(L)/r²
    let m_large = &r + &r.pow(-3)?;
    let m_small = &m_large * &r.pow(-2)?;
    let r2 = &r * &r;
    let r3 = &r2 * &r;
    Ok(RuleSystem {
        name: "ammann-chair".into(),
        dimension: 2,
        radix: Radix::Real(r),
        rotation_order_m: 2,
        equivalence: Equivalence::Isometry,
        types: vec![
            polygon_type(0, "L", large, m_large, vec![])?,
            polygon_type(1, "S", small, m_small, vec![])?,
        ],
        pieces: vec![
            vec![
                piece(0, Digit::exact(vec![term(r2, 1)], &frame), 3, false),
                piece(1, Digit::real(r3, &frame), 2, true),
            ],
            vec![piece(0, Digit::zero(), 0, false)],
        ],
        field,
    })
}

/// Taylor's trapezoid with `ρ = 2`, `ω = u = e^{iπ/3}`:
/// `2R = R ∪ (ω + ω̄²R) ∪ (ω̄ + ω²R̄) ∪ (1 + ω³R̄)`.
///
/// The reference trapezoid is the right half of the regular hexagon with
/// vertices `±i/√3` and `(1 ± i/√3)/2`; the decoration runs from a vertex of
/// the short parallel edge perpendicular to the long one.
fn taylor_trapezoid() -> Result<RuleSystem> {
    let field = rational_field(2);
    let frame = Frame::real(2.0, 3);
    let one = FieldElement::one(&field);
    let h = 1.0 / 3f64.sqrt();
    let trapezoid = vec![c(0.0, -h), c(0.5, -h / 2.0), c(0.5, h / 2.0), c(0.0, h)];
    Ok(RuleSystem {
        name: "taylor-trapezoid".into(),
        dimension: 2,
        radix: Radix::Real(FieldElement::from_int(&field, 2)),
        rotation_order_m: 3,
        equivalence: Equivalence::Isometry,
        types: vec![polygon_type(
            0,
            "T",
            trapezoid,
            one.clone(),
            vec![vec![c(0.5, h / 2.0), c(0.0, h / 2.0)]],
        )?],
        pieces: vec![vec![
            piece(0, Digit::zero(), 0, false),
            piece(0, Digit::exact(vec![term(one.clone(), 1)], &frame), 4, false),
            piece(0, Digit::exact(vec![term(one.clone(), 5)], &frame), 2, true),
            piece(0, Digit::real(one.clone(), &frame), 3, true),
        ]],
        field,
    })
}

/// `ρR = R ∪ (1 + R)` for an imaginary quadratic radix with `|ρ|² = 2`.
/// The remainder set has a fractal boundary, so the type carries a measure
/// but no polygon.
fn complex_base(name: &str, min_poly: &[i64], value: Complex64, form: &str) -> Result<RuleSystem> {
    let field = rational_field(2);
    let frame = Frame::new(value, 2);
    let one = FieldElement::one(&field);
    Ok(RuleSystem {
        name: name.into(),
        dimension: 2,
        radix: Radix::Complex {
            min_poly: IntPolynomial::from_i64(min_poly)?,
            value,
            form: form.into(),
        },
        rotation_order_m: 2,
        equivalence: Equivalence::TranslationOnly,
        types: vec![TileType {
            id: 0,
            name: "R".into(),
            shape: Shape::Fractal,
            measure: Some(one.clone()),
            area: 1.0,
            decorations: vec![],
        }],
        pieces: vec![vec![
            piece(0, Digit::zero(), 0, false),
            piece(0, Digit::real(one, &frame), 0, false),
        ]],
        field,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    /// Element `Σ q_k θ^k` from little-endian `(num, den)` pairs.
    fn fe(field: &Field, coeffs: &[(i64, i64)]) -> FieldElement {
        FieldElement::from_coeffs(
            field,
            coeffs
                .iter()
                .map(|&(n, d)| BigRational::new(n.into(), d.into()))
                .collect(),
        )
    }

    #[test]
    fn every_entry_builds_and_validates() {
        for e in list().iter().filter(|e| e.types.is_some()) {
            let r = catalog(&e.name).unwrap();
            r.validate().unwrap_or_else(|err| panic!("{}: {err}", e.name));
            assert_eq!(r.name, e.name);
        }
    }

    #[test]
    fn unknown_name_lists_alternatives() {
        let err = catalog("pentagon").unwrap_err().to_string();
        assert!(err.contains("penrose") && err.contains("square2"), "{err}");
    }

    #[test]
    fn listing_is_sorted() {
        let names: Vec<String> = list().into_iter().map(|e| e.name).collect();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
        assert!(names.contains(&"silver-1d:<bits>".to_string()));
    }

    #[test]
    fn fe_builds_little_endian() {
        let f = silver_field("11").unwrap();
        assert_eq!(fe(&f, &[(-1, 1), (1, 1)]), FieldElement::generator(&f).inv().unwrap());
    }
}
