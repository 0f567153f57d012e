use std::sync::Arc;

use num_complex::Complex64;

use super::{Digit, DigitTerm, Equivalence, Piece, Radix, RuleSystem, Shape, TileType};
use crate::error::{Error, Result};
use crate::geometry::{Frame, Polygon};
use crate::numberfield::{silver_root, FieldElement, SilverIndex, DEFAULT_PRECISION_BITS};

/// The 1-D tiling of the silver number `ρ = s_b`.
///
/// Type `R_k` is the interval `[0, ρ^{1−k}]`, so `R_1` has unit length. Row 1
/// reads `ρ R_1 = ⋃_{b_k = 1} (ρ c_k + R_k)` with `c_k = Σ_{j<k} b_j ρ^{-j}`,
/// and row `k > 1` reads `ρ R_k = R_{k−1}`.
pub fn build_1d_silver_rule(b: &SilverIndex) -> Result<RuleSystem> {
    let field = Arc::new(silver_root(b, DEFAULT_PRECISION_BITS)?);
    let rho = FieldElement::generator(&field);
    let rho_inv = rho.inv()?;
    let frame = Frame::real(rho.to_f64(), 1);
    let n = b.len();

    let types = (0..n)
        .map(|k| {
            let len = rho.pow(-(k as i64)).expect("ρ is invertible");
            TileType {
                id: k,
                name: format!("R{}", k + 1),
                area: len.to_f64(),
                measure: Some(len.clone()),
                shape: Shape::Interval(len),
                decorations: vec![],
            }
        })
        .collect();

    let mut pieces = Vec::with_capacity(n);
    let mut first = Vec::new();
    let mut c = FieldElement::zero(&field);
    let mut power = rho_inv.clone();
    for (k, &bit) in b.bits().iter().enumerate() {
        if bit == 1 {
            first.push(Piece {
                child: k,
                digit: Digit::real(&rho * &c, &frame),
                rot: 0,
                conj: false,
            });
            c = &c + &power;
        }
        power = &power * &rho_inv;
    }
    pieces.push(first);
    for k in 1..n {
        pieces.push(vec![Piece {
            child: k - 1,
            digit: Digit::zero(),
            rot: 0,
            conj: false,
        }]);
    }

    Ok(RuleSystem {
        name: format!("silver-1d:{b}"),
        dimension: 1,
        field,
        radix: Radix::Real(rho),
        rotation_order_m: 1,
        equivalence: Equivalence::TranslationOnly,
        types,
        pieces,
    })
}

/// Cartesian square of a 1-D rule: rectangles `R_ij = R_i × R_j`.
///
/// Under translation-only equivalence every ordered pair is a type. Under
/// isometry or rotation-only equivalence `R_ji` is `R_ij` turned by a
/// quarter turn, so only pairs `i ≤ j` remain, in lexicographic order.
pub fn cartesian_square(rule1d: &RuleSystem, equivalence: Equivalence) -> Result<RuleSystem> {
    if rule1d.dimension != 1 {
        return Err(Error::invalid("cartesian_square needs a 1-D rule"));
    }
    let Radix::Real(rho) = &rule1d.radix else {
        return Err(Error::invalid("cartesian_square needs a real radix"));
    };
    let lengths = rule1d
        .types
        .iter()
        .map(|t| match &t.shape {
            Shape::Interval(len) => Ok(len.clone()),
            _ => Err(Error::invalid("1-D rule types must be intervals")),
        })
        .collect::<Result<Vec<_>>>()?;
    let offsets = rule1d
        .pieces
        .iter()
        .map(|row| {
            row.iter()
                .map(|p| {
                    p.digit
                        .as_real(&rule1d.field)
                        .map(|x| (p.child, x))
                        .ok_or_else(|| Error::invalid("1-D digits must be exact"))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let n = lengths.len();
    let symmetric = match equivalence {
        Equivalence::TranslationOnly => false,
        Equivalence::Isometry | Equivalence::RotationOnly => true,
        Equivalence::MeasureOnly => {
            return Err(Error::invalid(
                "cartesian_square supports translation-only, rotation-only and isometry equivalence",
            ))
        }
    };
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| !symmetric || i <= j)
        .collect();
    let index = |i: usize, j: usize| pairs.iter().position(|&p| p == (i, j)).unwrap();
    let label = |i: usize, j: usize| {
        if n < 10 {
            format!("R{}{}", i + 1, j + 1)
        } else {
            format!("R{},{}", i + 1, j + 1)
        }
    };

    let frame = Frame::real(rho.to_f64(), 2);
    let mut types = Vec::with_capacity(pairs.len());
    for (id, &(i, j)) in pairs.iter().enumerate() {
        let (w, h) = (lengths[i].to_f64(), lengths[j].to_f64());
        let poly = Polygon::new(vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(w, 0.0),
            Complex64::new(w, h),
            Complex64::new(0.0, h),
        ])?;
        let measure = &lengths[i] * &lengths[j];
        types.push(TileType {
            id,
            name: label(i, j),
            area: poly.area(),
            measure: Some(measure),
            shape: Shape::Polygon(poly),
            decorations: vec![],
        });
    }

    let term = |coeff: FieldElement, rot: i32| DigitTerm { coeff, rot };
    let mut pieces = Vec::with_capacity(pairs.len());
    for &(i, j) in &pairs {
        let mut row = Vec::new();
        for (a, x) in &offsets[i] {
            for (b, y) in &offsets[j] {
                let piece = if !symmetric || a <= b {
                    Piece {
                        child: index(*a, *b),
                        digit: Digit::exact(vec![term(x.clone(), 0), term(y.clone(), 1)], &frame),
                        rot: 0,
                        conj: false,
                    }
                } else {
                    // R_ba turned a quarter: [-L_a, 0] × [0, L_b], shifted into place
                    let shift = x + &lengths[*a];
                    Piece {
                        child: index(*b, *a),
                        digit: Digit::exact(vec![term(shift, 0), term(y.clone(), 1)], &frame),
                        rot: 1,
                        conj: false,
                    }
                };
                row.push(piece);
            }
        }
        pieces.push(row);
    }

    let name = match rule1d.name.strip_prefix("silver-1d:") {
        Some(bits) => format!("cartesian:{bits}:{equivalence}"),
        None => format!("{}-square:{equivalence}", rule1d.name),
    };
    Ok(RuleSystem {
        name,
        dimension: 2,
        field: rule1d.field.clone(),
        radix: Radix::Real(rho.clone()),
        rotation_order_m: 2,
        equivalence,
        types,
        pieces,
    })
}
