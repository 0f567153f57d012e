//! JSON rule files.
//!
//! Rationals are integer fraction strings (`"3/4"`), polynomials are
//! little-endian integer arrays, field elements are little-endian arrays of
//! rational strings in powers of the field generator, and floats are
//! shortest round-trip decimal strings. Unknown fields are rejected.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::{Digit, DigitTerm, Equivalence, Piece, Radix, RuleSystem, Shape, TileType};
use crate::error::{Error, Result};
use crate::geometry::{Frame, Polygon, Polyline};
use crate::numberfield::{parse_rational, AlgebraicNumber, Field, FieldElement, IntPolynomial, DEFAULT_PRECISION_BITS};

pub const RULE_FORMAT: &str = "tessera-rule/1";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RuleFile {
    format: String,
    name: String,
    dimension: u8,
    field: FieldSpec,
    radix: RadixSpec,
    rotation_order_m: u32,
    equivalence: String,
    types: Vec<TypeSpec>,
    pieces: BTreeMap<String, Vec<PieceSpec>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldSpec {
    min_poly: Vec<i64>,
    isolating: [String; 2],
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
enum RadixSpec {
    Real(Vec<String>),
    Complex(ComplexSpec),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComplexSpec {
    min_poly: Vec<i64>,
    re: String,
    im: String,
    form: String,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
enum ShapeSpec {
    Interval(Vec<String>),
    Polygon(Vec<[String; 2]>),
    Fractal,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TypeSpec {
    id: usize,
    name: String,
    shape: ShapeSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    measure: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    area: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    decorations: Vec<Vec<[String; 2]>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PieceSpec {
    child: usize,
    digit: DigitSpec,
    rot: i32,
    conj: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DigitSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    terms: Option<Vec<TermSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    value: Option<[String; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermSpec {
    coeff: Vec<String>,
    rot: i32,
}

fn float_str(x: f64) -> String {
    format!("{x}")
}

fn point_str(p: Complex64) -> [String; 2] {
    [float_str(p.re), float_str(p.im)]
}

fn poly_ints(p: &IntPolynomial) -> Result<Vec<i64>> {
    p.coeffs()
        .iter()
        .map(|c| {
            c.to_i64()
                .ok_or_else(|| Error::invalid("polynomial coefficient exceeds 64 bits"))
        })
        .collect()
}

pub fn rule_to_json(rule: &RuleSystem) -> Result<String> {
    let (lo, hi) = rule.field.interval();
    let types = rule
        .types
        .iter()
        .map(|t| TypeSpec {
            id: t.id,
            name: t.name.clone(),
            shape: match &t.shape {
                Shape::Interval(len) => ShapeSpec::Interval(len.to_coeff_strings()),
                Shape::Polygon(p) => ShapeSpec::Polygon(p.vertices().iter().map(|v| point_str(*v)).collect()),
                Shape::Fractal => ShapeSpec::Fractal,
            },
            measure: t.measure.as_ref().map(|m| m.to_coeff_strings()),
            area: Some(float_str(t.area)),
            decorations: t
                .decorations
                .iter()
                .map(|d| d.vertices().iter().map(|v| point_str(*v)).collect())
                .collect(),
        })
        .collect();
    let pieces = rule
        .pieces
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let specs = row
                .iter()
                .map(|p| PieceSpec {
                    child: p.child,
                    digit: match p.digit.terms() {
                        Some(terms) => DigitSpec {
                            terms: Some(
                                terms
                                    .iter()
                                    .map(|t| TermSpec {
                                        coeff: t.coeff.to_coeff_strings(),
                                        rot: t.rot,
                                    })
                                    .collect(),
                            ),
                            value: None,
                        },
                        None => DigitSpec {
                            terms: None,
                            value: Some(point_str(p.digit.value())),
                        },
                    },
                    rot: p.rot,
                    conj: p.conj,
                })
                .collect();
            (i.to_string(), specs)
        })
        .collect();
    let file = RuleFile {
        format: RULE_FORMAT.into(),
        name: rule.name.clone(),
        dimension: rule.dimension,
        field: FieldSpec {
            min_poly: poly_ints(rule.field.min_poly())?,
            isolating: [lo.to_string(), hi.to_string()],
        },
        radix: match &rule.radix {
            Radix::Real(r) => RadixSpec::Real(r.to_coeff_strings()),
            Radix::Complex { min_poly, value, form } => RadixSpec::Complex(ComplexSpec {
                min_poly: poly_ints(min_poly)?,
                re: float_str(value.re),
                im: float_str(value.im),
                form: form.clone(),
            }),
        },
        rotation_order_m: rule.rotation_order_m,
        equivalence: rule.equivalence.as_str().into(),
        types,
        pieces,
    };
    let mut text = serde_json::to_string_pretty(&file).map_err(|e| Error::invalid(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

fn parse_float(s: &str, what: &str) -> Result<f64> {
    let x: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::invalid(format!("{what}: '{s}' is not a number")))?;
    if !x.is_finite() {
        return Err(Error::invalid(format!("{what}: '{s}' is not finite")));
    }
    Ok(x)
}

fn parse_point(p: &[String; 2], what: &str) -> Result<Complex64> {
    Ok(Complex64::new(parse_float(&p[0], what)?, parse_float(&p[1], what)?))
}

fn int_poly(coeffs: &[i64]) -> Result<IntPolynomial> {
    IntPolynomial::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
}

fn build_field(spec: &FieldSpec) -> Result<Field> {
    let poly = int_poly(&spec.min_poly)?;
    let lo = parse_rational(&spec.isolating[0])?;
    let hi = parse_rational(&spec.isolating[1])?;
    Ok(Arc::new(AlgebraicNumber::from_isolating_interval(
        poly,
        lo,
        hi,
        DEFAULT_PRECISION_BITS,
    )?))
}

/// Parses a rule file and validates the resulting rule.
pub fn rule_from_json(text: &str) -> Result<RuleSystem> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: RuleFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        Error::Parse {
            line: inner.line(),
            column: inner.column(),
            path,
            message: inner.to_string(),
        }
    })?;
    if file.format != RULE_FORMAT {
        return Err(Error::invalid(format!(
            "unsupported rule format '{}', expected '{RULE_FORMAT}'",
            file.format
        )));
    }
    let field = build_field(&file.field)?;
    let radix = match &file.radix {
        RadixSpec::Real(c) => Radix::Real(FieldElement::from_coeff_strings(&field, c)?),
        RadixSpec::Complex(c) => Radix::Complex {
            min_poly: int_poly(&c.min_poly)?,
            value: Complex64::new(parse_float(&c.re, "radix")?, parse_float(&c.im, "radix")?),
            form: c.form.clone(),
        },
    };
    if file.rotation_order_m == 0 {
        return Err(Error::invalid("rotation_order_m must be positive"));
    }
    let frame = Frame::new(radix.value(), file.rotation_order_m);

    let n = file.types.len();
    let mut types = Vec::with_capacity(n);
    for (i, t) in file.types.iter().enumerate() {
        if t.id != i {
            return Err(Error::Validation(format!(
                "type '{}' has id {} but is listed at position {i}",
                t.name, t.id
            )));
        }
        let measure = match &t.measure {
            Some(m) => Some(FieldElement::from_coeff_strings(&field, m)?),
            None => None,
        };
        let shape = match &t.shape {
            ShapeSpec::Interval(len) => Shape::Interval(FieldElement::from_coeff_strings(&field, len)?),
            ShapeSpec::Polygon(vs) => Shape::Polygon(Polygon::new(
                vs.iter()
                    .map(|p| parse_point(p, "polygon vertex"))
                    .collect::<Result<_>>()?,
            )?),
            ShapeSpec::Fractal => Shape::Fractal,
        };
        let area = match (&t.area, &shape, &measure) {
            (Some(a), _, _) => parse_float(a, "area")?,
            (None, Shape::Interval(len), _) => len.to_f64(),
            (None, Shape::Polygon(p), _) => p.area(),
            (None, Shape::Fractal, Some(m)) => m.to_f64(),
            (None, Shape::Fractal, None) => {
                return Err(Error::invalid(format!(
                    "fractal type '{}' needs a measure or area",
                    t.name
                )))
            }
        };
        let decorations = t
            .decorations
            .iter()
            .map(|d| {
                Polyline::new(
                    d.iter()
                        .map(|p| parse_point(p, "decoration vertex"))
                        .collect::<Result<_>>()?,
                )
            })
            .collect::<Result<_>>()?;
        types.push(TileType {
            id: i,
            name: t.name.clone(),
            shape,
            measure,
            area,
            decorations,
        });
    }

    let mut pieces: Vec<Option<Vec<Piece>>> = vec![None; n];
    for (key, specs) in &file.pieces {
        let id: usize = key
            .parse()
            .ok()
            .filter(|&id| id < n)
            .ok_or_else(|| Error::Validation(format!("pieces given for unknown type id '{key}'")))?;
        let mut row = Vec::with_capacity(specs.len());
        for p in specs {
            if p.child >= n {
                return Err(Error::Validation(format!(
                    "type {id} has a piece with unknown child type id {}",
                    p.child
                )));
            }
            let digit = match (&p.digit.terms, &p.digit.value) {
                (Some(terms), None) => Digit::exact(
                    terms
                        .iter()
                        .map(|t| {
                            Ok(DigitTerm {
                                coeff: FieldElement::from_coeff_strings(&field, &t.coeff)?,
                                rot: t.rot,
                            })
                        })
                        .collect::<Result<_>>()?,
                    &frame,
                ),
                (None, Some(v)) => Digit::approximate(parse_point(v, "digit value")?),
                _ => {
                    return Err(Error::invalid(format!(
                        "digit of a piece of type {id} needs exactly one of 'terms' or 'value'"
                    )))
                }
            };
            row.push(Piece {
                child: p.child,
                digit,
                rot: p.rot,
                conj: p.conj,
            });
        }
        pieces[id] = Some(row);
    }
    let pieces = pieces
        .into_iter()
        .enumerate()
        .map(|(i, row)| row.ok_or_else(|| Error::Validation(format!("type {i} has no pieces"))))
        .collect::<Result<Vec<_>>>()?;

    let rule = RuleSystem {
        name: file.name,
        dimension: file.dimension,
        field,
        radix,
        rotation_order_m: file.rotation_order_m,
        equivalence: Equivalence::parse(&file.equivalence)?,
        types,
        pieces,
    };
    rule.validate()?;
    Ok(rule)
}

pub fn save_rule(rule: &RuleSystem, path: &Path) -> Result<()> {
    std::fs::write(path, rule_to_json(rule)?)
        .map_err(|e| Error::invalid(format!("cannot write {}: {e}", path.display())))
}

pub fn load_rule(path: &Path) -> Result<RuleSystem> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
    rule_from_json(&text)
}
