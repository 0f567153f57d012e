//! Substitution rule systems `ρ R_i = ⋃_j (δ_ij + u_ij(R_j))`, read both as
//! tilings and as digit systems with radix `ρ` and digits `δ_ij`.

mod catalog;
mod derotate;
mod io;
mod silver;

pub use catalog::{catalog, list, CatalogEntry};
pub use derotate::{derotate, derotate_with, Reflections};
pub use io::{load_rule, rule_from_json, rule_to_json, save_rule, RULE_FORMAT};
pub use silver::{build_1d_silver_rule, cartesian_square};

use std::fmt;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Frame, Polygon, Polyline, Similarity};
use crate::numberfield::{Field, FieldElement, IntPolynomial};

/// The inflation factor.
#[derive(Clone, Debug, PartialEq)]
pub enum Radix {
    /// A real radix, exact in the rule's field.
    Real(FieldElement),
    /// A non-real radix given by its minimal polynomial and value.
    Complex {
        min_poly: IntPolynomial,
        value: Complex64,
        form: String,
    },
}

impl Radix {
    pub fn value(&self) -> Complex64 {
        match self {
            Radix::Real(r) => Complex64::new(r.to_f64(), 0.0),
            Radix::Complex { value, .. } => *value,
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self, Radix::Real(_))
    }

    pub fn describe(&self) -> String {
        match self {
            Radix::Real(r) => format!("{:.9}", r.to_f64()),
            Radix::Complex { form, .. } => form.clone(),
        }
    }
}

/// Which placements of a tile count as the same type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Equivalence {
    Isometry,
    RotationOnly,
    TranslationOnly,
    MeasureOnly,
}

impl Equivalence {
    pub fn as_str(&self) -> &'static str {
        match self {
            Equivalence::Isometry => "isometry",
            Equivalence::RotationOnly => "rotation-only",
            Equivalence::TranslationOnly => "translation-only",
            Equivalence::MeasureOnly => "measure-only",
        }
    }

    pub fn parse(s: &str) -> Result<Equivalence> {
        Ok(match s {
            "isometry" => Equivalence::Isometry,
            "rotation-only" | "rotation" => Equivalence::RotationOnly,
            "translation-only" | "translation" => Equivalence::TranslationOnly,
            "measure-only" | "measure" => Equivalence::MeasureOnly,
            _ => {
                return Err(Error::invalid(format!(
                    "unknown equivalence '{s}', expected isometry, rotation-only, \
                     translation-only or measure-only"
                )))
            }
        })
    }
}

impl fmt::Display for Equivalence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One summand `coeff · u^rot` of an exact digit.
#[derive(Clone, Debug, PartialEq)]
pub struct DigitTerm {
    pub coeff: FieldElement,
    pub rot: i32,
}

/// A digit `δ`: exact as a sum of field elements times powers of `u` when
/// known, always with its evaluated value.
#[derive(Clone, Debug, PartialEq)]
pub struct Digit {
    terms: Option<Vec<DigitTerm>>,
    value: Complex64,
}

impl Digit {
    /// Exact digit `Σ coeff·u^rot`, normalized to `0 ≤ rot < m` using
    /// `u^m = −1`, with like powers merged.
    pub fn exact(terms: Vec<DigitTerm>, frame: &Frame) -> Digit {
        let m = frame.m as i32;
        let mut merged: Vec<DigitTerm> = Vec::new();
        for t in terms {
            let r = frame.reduce_rot(t.rot);
            let (coeff, rot) = if r >= m { (-&t.coeff, r - m) } else { (t.coeff, r) };
            match merged.iter_mut().find(|x| x.rot == rot) {
                Some(x) => x.coeff = &x.coeff + &coeff,
                None => merged.push(DigitTerm { coeff, rot }),
            }
        }
        merged.retain(|t| !t.coeff.is_zero());
        merged.sort_by_key(|t| t.rot);
        let value = merged.iter().map(|t| frame.u(t.rot) * t.coeff.to_f64()).sum();
        Digit {
            terms: Some(merged),
            value,
        }
    }

    pub fn real(c: FieldElement, frame: &Frame) -> Digit {
        Self::exact(vec![DigitTerm { coeff: c, rot: 0 }], frame)
    }

    pub fn zero() -> Digit {
        Digit {
            terms: Some(vec![]),
            value: Complex64::new(0.0, 0.0),
        }
    }

    /// A digit known only numerically.
    pub fn approximate(value: Complex64) -> Digit {
        Digit { terms: None, value }
    }

    pub fn terms(&self) -> Option<&[DigitTerm]> {
        self.terms.as_deref()
    }

    pub fn value(&self) -> Complex64 {
        self.value
    }

    pub fn is_exact(&self) -> bool {
        self.terms.is_some()
    }

    /// The exact real value, when the digit has no rotated terms.
    pub fn as_real(&self, field: &Field) -> Option<FieldElement> {
        let terms = self.terms.as_ref()?;
        match terms.as_slice() {
            [] => Some(FieldElement::zero(field)),
            [t] if t.rot == 0 => Some(t.coeff.clone()),
            _ => None,
        }
    }

    /// Image under the linear map `z ↦ u^rot · (conj ? z̄ : z)`.
    pub fn rotated(&self, rot: i32, conj: bool, frame: &Frame) -> Digit {
        let lin = |z: Complex64| frame.u(rot) * if conj { z.conj() } else { z };
        match &self.terms {
            Some(terms) => {
                let mapped = terms
                    .iter()
                    .map(|t| DigitTerm {
                        coeff: t.coeff.clone(),
                        rot: if conj { rot - t.rot } else { rot + t.rot },
                    })
                    .collect();
                Self::exact(mapped, frame)
            }
            None => Self::approximate(lin(self.value)),
        }
    }

    pub fn scaled(&self, c: &FieldElement, frame: &Frame) -> Digit {
        match &self.terms {
            Some(terms) => Self::exact(
                terms
                    .iter()
                    .map(|t| DigitTerm {
                        coeff: &t.coeff * c,
                        rot: t.rot,
                    })
                    .collect(),
                frame,
            ),
            None => Self::approximate(self.value * c.to_f64()),
        }
    }

    pub fn plus(&self, other: &Digit, frame: &Frame) -> Digit {
        match (&self.terms, &other.terms) {
            (Some(a), Some(b)) => Self::exact(a.iter().chain(b).cloned().collect(), frame),
            _ => Self::approximate(self.value + other.value),
        }
    }

    /// Exact expression such as `1 + (r - 1)*u^1`, or the numeric value.
    pub fn expression(&self) -> String {
        match &self.terms {
            Some(t) if t.is_empty() => "0".into(),
            Some(terms) => terms
                .iter()
                .map(|t| {
                    let c = t.coeff.to_string();
                    let c = if c.contains(' ') && (terms.len() > 1 || t.rot != 0) {
                        format!("({c})")
                    } else {
                        c
                    };
                    match t.rot {
                        0 => c,
                        k => format!("{c}*u^{k}"),
                    }
                })
                .collect::<Vec<_>>()
                .join(" + "),
            None => format!("{} + {}i", self.value.re, self.value.im),
        }
    }
}

/// One term `δ + u^rot (conj ? R̄_child : R_child)` of an inflation equation.
#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub child: usize,
    pub digit: Digit,
    pub rot: i32,
    pub conj: bool,
}

impl Piece {
    /// The decompose-in-place map `z ↦ (δ + u^rot c(z)) / ρ` placing the
    /// child reference shape inside the parent reference shape.
    pub fn similarity(&self, frame: &Frame) -> Similarity {
        Similarity {
            scale: -1,
            rot: frame.reduce_rot(self.rot),
            conj: self.conj,
            translation: self.digit.value() / frame.radix,
        }
    }
}

/// Reference region of a tile type.
#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    /// `[0, len]` on the line.
    Interval(FieldElement),
    Polygon(Polygon),
    /// A region known only as an attractor; carries no geometry.
    Fractal,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TileType {
    pub id: usize,
    pub name: String,
    pub shape: Shape,
    /// Exact measure up to a factor shared by all types of the rule.
    pub measure: Option<FieldElement>,
    /// Lebesgue measure of the reference shape.
    pub area: f64,
    pub decorations: Vec<Polyline>,
}

impl TileType {
    pub fn polygon(&self) -> Option<&Polygon> {
        match &self.shape {
            Shape::Polygon(p) => Some(p),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RuleSystem {
    pub name: String,
    pub dimension: u8,
    /// The coefficient field of exact digits and measures.
    pub field: Field,
    pub radix: Radix,
    /// `u = e^{iπ/m}`.
    pub rotation_order_m: u32,
    pub equivalence: Equivalence,
    pub types: Vec<TileType>,
    pub pieces: Vec<Vec<Piece>>,
}

impl RuleSystem {
    pub fn frame(&self) -> Frame {
        Frame::new(self.radix.value(), self.rotation_order_m)
    }

    pub fn type_count(&self) -> usize {
        self.types.len()
    }

    /// A type by name, or by 1-based position.
    pub fn type_index(&self, name: &str) -> Option<usize> {
        self.types.iter().position(|t| t.name == name).or_else(|| {
            name.parse::<usize>()
                .ok()
                .filter(|&k| (1..=self.types.len()).contains(&k))
                .map(|k| k - 1)
        })
    }

    /// `ρ^d` for a real radix, `|ρ|²` for a complex one, exactly.
    pub fn multiplier(&self) -> FieldElement {
        match &self.radix {
            Radix::Real(r) => r.pow(self.dimension as i64).expect("radix is nonzero"),
            Radix::Complex { min_poly, .. } => {
                // monic quadratic with non-real roots: constant term = |ρ|²
                let c = min_poly.coeffs()[0].clone();
                FieldElement::from_rational(&self.field, num_rational::BigRational::from_integer(c))
            }
        }
    }

    pub fn multiplier_f64(&self) -> f64 {
        self.radix.value().norm().powi(self.dimension as i32)
    }

    /// Distinct digit values in first-appearance order.
    pub fn digit_set(&self) -> Vec<Complex64> {
        let mut out: Vec<Complex64> = Vec::new();
        for p in self.pieces.iter().flatten() {
            let v = p.digit.value();
            if !out.iter().any(|d| (d - v).norm() < 1e-12) {
                out.push(v);
            }
        }
        out
    }

    /// `⌈|ρ|^d⌉`, the least digit count a tiling with this radix needs.
    pub fn digit_bound(&self) -> u64 {
        (self.multiplier_f64() - 1e-9).ceil() as u64
    }

    pub fn partition_matrix(&self) -> PartitionMatrix {
        partition_matrix(self)
    }

    pub fn largest_area(&self) -> f64 {
        self.types.iter().map(|t| t.area).fold(0.0, f64::max)
    }

    pub fn has_geometry(&self) -> bool {
        self.types.iter().all(|t| !matches!(t.shape, Shape::Fractal))
    }

    /// Checks structural invariants.
    pub fn validate(&self) -> Result<()> {
        let n = self.types.len();
        let bad = |msg: String| Err(Error::Validation(format!("rule '{}': {msg}", self.name)));
        if n == 0 {
            return bad("no tile types".into());
        }
        if !(1..=2).contains(&self.dimension) {
            return bad(format!("dimension {} is not 1 or 2", self.dimension));
        }
        if self.pieces.len() != n {
            return bad(format!("{} piece lists for {} types", self.pieces.len(), n));
        }
        if self.rotation_order_m == 0 {
            return bad("rotation order must be positive".into());
        }
        if let Radix::Real(r) = &self.radix {
            if r.to_f64().abs() <= 1.0 {
                return bad("radix must exceed 1 in absolute value".into());
            }
        } else if self.radix.value().norm() <= 1.0 {
            return bad("radix must exceed 1 in absolute value".into());
        }
        let frame = self.frame();
        for (i, t) in self.types.iter().enumerate() {
            if t.id != i {
                return bad(format!("type '{}' has id {} at position {i}", t.name, t.id));
            }
            if t.area.is_nan() || t.area <= 0.0 {
                return bad(format!("type '{}' has non-positive measure", t.name));
            }
            if let Some(m) = &t.measure {
                if m.to_f64() <= 0.0 {
                    return bad(format!("type '{}' has non-positive measure", t.name));
                }
            }
            let shape_ok = matches!(
                (&t.shape, self.dimension),
                (Shape::Interval(_), 1) | (Shape::Polygon(_) | Shape::Fractal, 2)
            );
            if !shape_ok {
                return bad(format!("type '{}' has a shape of the wrong dimension", t.name));
            }
            if self.pieces[i].is_empty() {
                return bad(format!("type '{}' has no pieces", t.name));
            }
            for p in &self.pieces[i] {
                if p.child >= n {
                    return bad(format!(
                        "type '{}' has a piece with unknown child type {}",
                        t.name, p.child
                    ));
                }
                if p.rot != frame.reduce_rot(p.rot) {
                    return bad(format!("rotation power {} not reduced mod {}", p.rot, frame.order()));
                }
                if p.conj && !self.radix.is_real() {
                    return bad("conjugated pieces need a real radix".into());
                }
                if self.dimension == 1 && (p.rot != 0 || p.conj || p.digit.value().im != 0.0) {
                    return bad("1-D pieces must be pure real translations".into());
                }
                let v = p.digit.value();
                if !v.re.is_finite() || !v.im.is_finite() {
                    return bad("digit is not finite".into());
                }
            }
        }
        // float areas must be proportional to exact measures
        if self.types.iter().all(|t| t.measure.is_some()) {
            let ratio = |t: &TileType| t.area / t.measure.as_ref().unwrap().to_f64();
            let r0 = ratio(&self.types[0]);
            for t in &self.types {
                if (ratio(t) / r0 - 1.0).abs() > 1e-9 {
                    return bad(format!("area of '{}' is not proportional to its exact measure", t.name));
                }
            }
        }
        Ok(())
    }

    /// The rule for two inflation steps at once: radix `ρ²`, pieces the
    /// composites of a piece with each piece of its child.
    pub fn squared(&self, name: &str) -> Result<RuleSystem> {
        let Radix::Real(rho) = &self.radix else {
            return Err(Error::invalid("squaring needs a real radix"));
        };
        let frame = self.frame();
        let mut pieces = Vec::with_capacity(self.types.len());
        for row in &self.pieces {
            let mut out = Vec::new();
            for p in row {
                for q in &self.pieces[p.child] {
                    let digit = p
                        .digit
                        .scaled(rho, &frame)
                        .plus(&q.digit.rotated(p.rot, p.conj, &frame), &frame);
                    let rot = if p.conj { p.rot - q.rot } else { p.rot + q.rot };
                    out.push(Piece {
                        child: q.child,
                        digit,
                        rot: frame.reduce_rot(rot),
                        conj: p.conj ^ q.conj,
                    });
                }
            }
            pieces.push(out);
        }
        Ok(RuleSystem {
            name: name.to_string(),
            radix: Radix::Real(rho * rho),
            pieces,
            ..self.clone()
        })
    }
}

/// `U[i][j]` = number of pieces of child type `j` in row `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct PartitionMatrix {
    entries: Vec<Vec<u64>>,
}

impl PartitionMatrix {
    pub fn new(entries: Vec<Vec<u64>>) -> Result<PartitionMatrix> {
        let n = entries.len();
        if n == 0 || entries.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("partition matrix must be square and non-empty"));
        }
        Ok(PartitionMatrix { entries })
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.entries
    }

    pub fn row_sum(&self, i: usize) -> u64 {
        self.entries[i].iter().sum()
    }

    pub fn to_big(&self) -> Vec<Vec<BigUint>> {
        self.entries
            .iter()
            .map(|r| r.iter().map(|&x| BigUint::from(x)).collect())
            .collect()
    }

    /// Exact `U^n`.
    pub fn pow(&self, n: u32) -> Vec<Vec<BigUint>> {
        let size = self.size();
        let mut acc: Vec<Vec<BigUint>> = (0..size)
            .map(|i| {
                (0..size)
                    .map(|j| if i == j { BigUint::one() } else { BigUint::zero() })
                    .collect()
            })
            .collect();
        let base = self.to_big();
        for _ in 0..n {
            acc = big_mul(&acc, &base);
        }
        acc
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.entries
            .iter()
            .map(|r| r.iter().map(|&x| x as f64).collect())
            .collect()
    }
}

pub(crate) fn big_mul(a: &[Vec<BigUint>], b: &[Vec<BigUint>]) -> Vec<Vec<BigUint>> {
    let cols = b.first().map_or(0, Vec::len);
    (0..a.len())
        .map(|i| {
            (0..cols)
                .map(|j| (0..b.len()).map(|k| &a[i][k] * &b[k][j]).sum())
                .collect()
        })
        .collect()
}

impl fmt::Display for PartitionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.entries {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

pub fn partition_matrix(rule: &RuleSystem) -> PartitionMatrix {
    let n = rule.types.len();
    let mut entries = vec![vec![0u64; n]; n];
    for (i, row) in rule.pieces.iter().enumerate() {
        for p in row {
            entries[i][p.child] += 1;
        }
    }
    PartitionMatrix { entries }
}

#[derive(Clone, Debug, Serialize)]
pub struct MeasureRow {
    pub row: usize,
    pub type_name: String,
    /// `Σ_j U_ij m_j`
    pub lhs: f64,
    /// `ρ^d m_i`
    pub rhs: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MeasureReport {
    /// Whether the check was carried out exactly in the field.
    pub exact: bool,
    pub rows: Vec<MeasureRow>,
    pub digit_count: usize,
    pub digit_bound: u64,
}

/// Checks `Σ_j U_ij m(R_j) = ρ^d m(R_i)` for every row: exactly when all
/// measures are field elements, otherwise on float areas normalized by the
/// largest one, within `tol`.
pub fn validate_measure(rule: &RuleSystem, tol: f64) -> Result<MeasureReport> {
    let u = partition_matrix(rule);
    let n = rule.types.len();
    let exact = rule.types.iter().all(|t| t.measure.is_some());
    let mut rows = Vec::with_capacity(n);
    let scale = rule.largest_area();
    let mult = rule.multiplier();
    let mult_f = rule.multiplier_f64();
    for i in 0..n {
        let name = rule.types[i].name.clone();
        let (lhs, rhs, ok) = if exact {
            let m = |j: usize| rule.types[j].measure.clone().unwrap();
            let mut lhs = FieldElement::zero(&rule.field);
            for j in 0..n {
                let c = FieldElement::from_int(&rule.field, u.get(i, j) as i64);
                lhs = &lhs + &(&c * &m(j));
            }
            let rhs = &mult * &m(i);
            let ok = lhs == rhs;
            (lhs.to_f64(), rhs.to_f64(), ok)
        } else {
            let lhs: f64 = (0..n).map(|j| u.get(i, j) as f64 * rule.types[j].area).sum();
            let rhs = mult_f * rule.types[i].area;
            let ok = ((lhs - rhs) / scale).abs() <= tol;
            (lhs, rhs, ok)
        };
        if !ok {
            return Err(Error::MeasureViolation {
                row: i,
                type_name: name,
                detail: format!("sum of child measures {lhs} != multiplier times measure {rhs}"),
            });
        }
        rows.push(MeasureRow {
            row: i,
            type_name: name,
            lhs,
            rhs,
        });
    }
    Ok(MeasureReport {
        exact,
        rows,
        digit_count: rule.digit_set().len(),
        digit_bound: rule.digit_bound(),
    })
}
