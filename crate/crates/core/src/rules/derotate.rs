use super::{Equivalence, Piece, RuleSystem, Shape, TileType};
use crate::error::Result;
use crate::geometry::{Frame, Similarity};

/// How orientations that differ by a reflection in the real axis are treated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reflections {
    /// `u^r ∘ conj` and `u^r` give one type; pieces keep the reflection.
    Identify,
    /// Every reachable `(type, rotation, conjugation)` is its own type and
    /// every piece is a pure translation.
    Separate,
}

/// Orientation classes with reflections in the real axis identified: one
/// new type per original type and rotation reached from the identity.
pub fn derotate(rule: &RuleSystem) -> Result<RuleSystem> {
    derotate_with(rule, Reflections::Identify)
}

pub fn derotate_with(rule: &RuleSystem, mode: Reflections) -> Result<RuleSystem> {
    let trivial = rule.pieces.iter().flatten().all(|p| p.rot == 0 && !p.conj);
    if rule.dimension != 2 || trivial {
        return Ok(rule.clone());
    }
    let frame = rule.frame();
    // (source type, rotation, conjugation); conjugation is always false
    // when reflections are identified
    let mut classes: Vec<(usize, i32, bool)> = (0..rule.types.len()).map(|t| (t, 0, false)).collect();
    let mut pieces: Vec<Vec<Piece>> = Vec::new();
    let mut k = 0;
    while k < classes.len() {
        let (t, rot, conj) = classes[k];
        let mut row = Vec::new();
        for p in &rule.pieces[t] {
            let child_rot = frame.reduce_rot(if conj { rot - p.rot } else { rot + p.rot });
            let child_conj = conj ^ p.conj;
            let key = match mode {
                Reflections::Separate => (p.child, child_rot, child_conj),
                Reflections::Identify => (p.child, child_rot, false),
            };
            let child = match classes.iter().position(|c| *c == key) {
                Some(i) => i,
                None => {
                    classes.push(key);
                    classes.len() - 1
                }
            };
            // the child's region is u^r' conj(R); from the class shape u^r' R
            // that is z ↦ u^{2r'} z̄
            let reflected = mode == Reflections::Identify && child_conj;
            row.push(Piece {
                child,
                digit: p.digit.rotated(rot, conj, &frame),
                rot: if reflected { frame.reduce_rot(2 * child_rot) } else { 0 },
                conj: reflected,
            });
        }
        pieces.push(row);
        k += 1;
    }

    let types = classes
        .iter()
        .enumerate()
        .map(|(id, &(t, rot, conj))| class_type(rule, &frame, id, t, rot, conj))
        .collect();
    let any_conj = pieces.iter().flatten().any(|p| p.conj);
    Ok(RuleSystem {
        name: format!("{}-derotated", rule.name),
        equivalence: if any_conj {
            Equivalence::Isometry
        } else {
            Equivalence::TranslationOnly
        },
        types,
        pieces,
        ..rule.clone()
    })
}

fn class_type(rule: &RuleSystem, frame: &Frame, id: usize, t: usize, rot: i32, conj: bool) -> TileType {
    let base = &rule.types[t];
    let g = Similarity {
        rot,
        conj,
        ..Similarity::IDENTITY
    };
    let shape = match &base.shape {
        Shape::Polygon(p) => Shape::Polygon(p.transform(frame, &g)),
        other => other.clone(),
    };
    TileType {
        id,
        name: format!("{}@{}{}", base.name, rot, if conj { "*" } else { "" }),
        shape,
        measure: base.measure.clone(),
        area: base.area,
        decorations: base.decorations.iter().map(|d| d.transform(frame, &g)).collect(),
    }
}
