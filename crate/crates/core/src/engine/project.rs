use num_rational::BigRational;

use crate::error::Result;
use crate::geometry::Frame;
use crate::numberfield::FieldElement;
use crate::rules::{Digit, Equivalence, Piece, Radix, RuleSystem, Shape, TileType};

#[derive(Clone, Debug)]
pub struct Projection {
    pub rule: RuleSystem,
    pub warnings: Vec<String>,
}

/// The 1-D rule on intervals `I_j = [0, m(R_j)]` with the same partition
/// matrix and multiplier `|ρ|^d` as radix. Sub-intervals are packed from the
/// left in declared piece order; the digits are their left endpoints.
pub fn project_to_1d(rule: &RuleSystem) -> Result<Projection> {
    if rule.dimension == 1 {
        return Ok(Projection {
            rule: rule.clone(),
            warnings: vec![],
        });
    }
    let mut warnings = Vec::new();
    let exact = rule.types.iter().all(|t| t.measure.is_some());
    let lengths: Vec<FieldElement> = if exact {
        rule.types.iter().map(|t| t.measure.clone().unwrap()).collect()
    } else {
        warnings.push(format!(
            "rule '{}' lacks exact measures; projection uses floating-point areas",
            rule.name
        ));
        let scale = rule.largest_area();
        rule.types
            .iter()
            .map(|t| {
                let q = BigRational::from_float(t.area / scale).expect("areas are finite");
                FieldElement::from_rational(&rule.field, q)
            })
            .collect()
    };
    let mult = rule.multiplier();
    let frame = Frame::real(mult.to_f64(), 1);

    let types = rule
        .types
        .iter()
        .zip(&lengths)
        .map(|(t, len)| TileType {
            id: t.id,
            name: t.name.clone(),
            shape: Shape::Interval(len.clone()),
            measure: exact.then(|| len.clone()),
            area: len.to_f64(),
            decorations: vec![],
        })
        .collect();
    let pieces = rule
        .pieces
        .iter()
        .map(|row| {
            let mut left = FieldElement::zero(&rule.field);
            row.iter()
                .map(|p| {
                    let digit = if exact {
                        Digit::real(left.clone(), &frame)
                    } else {
                        Digit::approximate(num_complex::Complex64::new(left.to_f64(), 0.0))
                    };
                    left = &left + &lengths[p.child];
                    Piece {
                        child: p.child,
                        digit,
                        rot: 0,
                        conj: false,
                    }
                })
                .collect()
        })
        .collect();

    let out = RuleSystem {
        name: format!("{}-projected", rule.name),
        dimension: 1,
        field: rule.field.clone(),
        radix: Radix::Real(mult),
        rotation_order_m: 1,
        equivalence: Equivalence::TranslationOnly,
        types,
        pieces,
    };
    out.validate()?;
    Ok(Projection { rule: out, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::{catalog, validate_measure};

    #[test]
    fn square2_gives_quarters() {
        let p = project_to_1d(&catalog("square2").unwrap()).unwrap();
        assert!(p.warnings.is_empty());
        let d: Vec<f64> = p.rule.digit_set().iter().map(|z| z.re).collect();
        assert_eq!(d, vec![0.0, 1.0, 2.0, 3.0]);
        assert_eq!(p.rule.multiplier_f64(), 4.0);
        validate_measure(&p.rule, 1e-12).unwrap();
    }

    #[test]
    fn one_dimensional_is_unchanged() {
        let r = catalog("silver-1d:111").unwrap();
        assert_eq!(project_to_1d(&r).unwrap().rule, r);
    }
}
