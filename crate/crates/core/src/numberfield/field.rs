use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::algebraic::AlgebraicNumber;
use super::poly::{eval_rat, rat_div_rem};
use crate::error::{Error, Result};

/// Shared handle on the generator of a number field `Q(θ)`.
pub type Field = Arc<AlgebraicNumber>;

/// Exact element `Σ coeffs[k]·θ^k` of `Q(θ)`, always reduced modulo the
/// minimal polynomial of `θ`, so equality is coefficient-wise.
#[derive(Clone, Debug)]
pub struct FieldElement {
    coeffs: Vec<BigRational>,
    field: Field,
}

fn same_field(a: &Field, b: &Field) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl FieldElement {
    pub fn from_coeffs(field: &Field, coeffs: Vec<BigRational>) -> FieldElement {
        let mut el = FieldElement {
            coeffs,
            field: field.clone(),
        };
        el.reduce();
        el
    }

    pub fn zero(field: &Field) -> FieldElement {
        Self::from_coeffs(field, vec![])
    }

    pub fn one(field: &Field) -> FieldElement {
        Self::from_rational(field, BigRational::one())
    }

    pub fn from_rational(field: &Field, q: BigRational) -> FieldElement {
        Self::from_coeffs(field, vec![q])
    }

    pub fn from_int(field: &Field, n: i64) -> FieldElement {
        Self::from_rational(field, BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_fraction(field: &Field, num: i64, den: i64) -> FieldElement {
        Self::from_rational(field, BigRational::new(num.into(), den.into()))
    }

    /// The generator `θ` itself.
    pub fn generator(field: &Field) -> FieldElement {
        Self::from_coeffs(field, vec![BigRational::zero(), BigRational::one()])
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Coefficients padded to the field degree.
    pub fn coeffs(&self) -> Vec<BigRational> {
        let mut c = self.coeffs.clone();
        c.resize(self.field.degree(), BigRational::zero());
        c
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// The rational value, when the element lies in `Q`.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self.coeffs.len() {
            0 => Some(BigRational::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    fn reduce(&mut self) {
        let modulus = self.field.min_poly().to_rational();
        let (_, rem) = rat_div_rem(&self.coeffs, &modulus);
        self.coeffs = rem;
    }

    fn check(&self, other: &FieldElement) -> Result<()> {
        if same_field(&self.field, &other.field) {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn checked_add(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|k| {
                let a = self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero);
                let b = other.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero);
                a + b
            })
            .collect();
        Ok(Self::from_coeffs(&self.field, coeffs))
    }

    pub fn checked_sub(&self, other: &FieldElement) -> Result<FieldElement> {
        self.checked_add(&other.neg_ref())
    }

    pub fn checked_mul(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(&self.field));
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Ok(Self::from_coeffs(&self.field, out))
    }

    pub fn checked_eq(&self, other: &FieldElement) -> Result<bool> {
        self.check(other)?;
        Ok(self.coeffs == other.coeffs)
    }

    fn neg_ref(&self) -> FieldElement {
        FieldElement {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            field: self.field.clone(),
        }
    }

    pub fn scale(&self, q: &BigRational) -> FieldElement {
        Self::from_coeffs(&self.field, self.coeffs.iter().map(|c| c * q).collect())
    }

    /// Multiplicative inverse by the extended Euclidean algorithm in `Q[x]`.
    pub fn inv(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::NotInvertible("0".into()));
        }
        let modulus = self.field.min_poly().to_rational();
        // invariant: s·a ≡ r (mod modulus)
        let (mut r0, mut r1) = (modulus, self.coeffs.clone());
        let (mut s0, mut s1) = (Vec::<BigRational>::new(), vec![BigRational::one()]);
        while !r1.is_empty() {
            let (q, r) = rat_div_rem(&r0, &r1);
            let qs1 = poly_mul(&q, &s1);
            let s2 = poly_sub(&s0, &qs1);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
        }
        if r0.len() != 1 {
            return Err(Error::NotInvertible(self.to_string()));
        }
        let lead = r0[0].clone();
        Ok(Self::from_coeffs(
            &self.field,
            s0.into_iter().map(|c| c / &lead).collect(),
        ))
    }

    pub fn checked_div(&self, other: &FieldElement) -> Result<FieldElement> {
        self.checked_mul(&other.inv()?)
    }

    pub fn pow(&self, exp: i64) -> Result<FieldElement> {
        let base = if exp < 0 { self.inv()? } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = Self::one(&self.field);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            sq = &sq * &sq;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Rational approximation within `2^-bits` of the exact value, by
    /// interval evaluation over a refining isolating interval of `θ`.
    pub fn evaluate(&self, bits: u32) -> BigRational {
        let target = BigRational::new(BigInt::one(), BigInt::one() << bits as usize);
        let mut gen = (*self.field).clone();
        let mut gen_bits = gen.precision_bits().clamp(16, 4096);
        loop {
            let (lo, hi) = gen.interval();
            let (a, b) = interval_eval(&self.coeffs, lo, hi);
            if &b - &a < target || gen.is_rational() {
                return (a + b) / BigRational::from_integer(BigInt::from(2));
            }
            gen_bits = gen_bits.saturating_mul(2).max(bits + 8);
            gen = gen.refined(gen_bits);
        }
    }

    /// Double-precision value from the cached generator interval.
    pub fn to_f64(&self) -> f64 {
        let (lo, hi) = self.field.interval();
        let mid = (lo + hi) / BigRational::from_integer(BigInt::from(2));
        let v = eval_rat(&self.coeffs, &mid).to_f64().unwrap_or(f64::NAN);
        if self.field.precision_bits() >= 64 {
            v
        } else {
            self.evaluate(64).to_f64().unwrap_or(f64::NAN)
        }
    }

    /// Monic minimal polynomial over `Q`, little-endian, found as the first
    /// linear dependence among the powers `1, x, x², …` in `Q(θ)`.
    pub fn minimal_polynomial(&self) -> Vec<BigRational> {
        let n = self.field.degree();
        let mut powers = vec![Self::one(&self.field).coeffs()];
        let mut p = Self::one(&self.field);
        for k in 1..=n {
            p = &p * self;
            let target = p.coeffs();
            if let Some(c) = solve_combination(&powers, &target) {
                let mut out: Vec<BigRational> = c.into_iter().map(|x| -x).collect();
                out.push(BigRational::one());
                debug_assert_eq!(out.len(), k + 1);
                return out;
            }
            powers.push(target);
        }
        unreachable!("n + 1 vectors in an n-dimensional space are dependent")
    }

    /// Decimal expansion with as many places as `bits` binary digits of
    /// accuracy justify.
    pub fn to_decimal_string(&self, bits: u32) -> String {
        let q = self.evaluate(bits + 4);
        let places = (bits as f64 * std::f64::consts::LOG10_2).floor() as usize;
        let neg = q.is_negative();
        let scale = BigInt::from(10u32).pow(places as u32);
        let n = (q.abs() * BigRational::from_integer(scale.clone()))
            .round()
            .to_integer();
        let int = &n / &scale;
        let frac = (&n % &scale).to_string();
        if places == 0 {
            return format!("{}{int}", if neg { "-" } else { "" });
        }
        format!("{}{int}.{frac:0>places$}", if neg { "-" } else { "" })
    }

    /// Canonical text form: little-endian coefficient strings such as
    /// `["1/2", "0", "-3"]`, padded to the field degree.
    pub fn to_coeff_strings(&self) -> Vec<String> {
        self.coeffs().iter().map(|c| c.to_string()).collect()
    }

    pub fn from_coeff_strings(field: &Field, parts: &[String]) -> Result<FieldElement> {
        if parts.len() > field.degree() {
            return Err(Error::invalid(format!(
                "expected at most {} coefficients, got {}",
                field.degree(),
                parts.len()
            )));
        }
        let coeffs = parts.iter().map(|p| parse_rational(p)).collect::<Result<Vec<_>>>()?;
        Ok(Self::from_coeffs(field, coeffs))
    }
}

/// Coefficients `c` with `Σ c_j basis[j] = target`, if any, by exact
/// Gaussian elimination.
fn solve_combination(basis: &[Vec<BigRational>], target: &[BigRational]) -> Option<Vec<BigRational>> {
    let rows = target.len();
    let cols = basis.len();
    // augmented matrix, one row per coordinate
    let mut m: Vec<Vec<BigRational>> = (0..rows)
        .map(|r| {
            let mut row: Vec<BigRational> = basis.iter().map(|b| b[r].clone()).collect();
            row.push(target[r].clone());
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let lead = m[r][c].clone();
        for x in m[r].iter_mut() {
            *x = &*x / &lead;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x = &*x - &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut out = vec![BigRational::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        out[c] = m[i][cols].clone();
    }
    Some(out)
}

/// Parses `"n"` or `"n/d"` with integer `n`, `d`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::invalid(format!("bad rational '{s}', expected \"n\" or \"n/d\""));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let mut out: Vec<BigRational> = (0..n)
        .map(|k| {
            a.get(k).cloned().unwrap_or_else(BigRational::zero) - b.get(k).cloned().unwrap_or_else(BigRational::zero)
        })
        .collect();
    while out.last().is_some_and(|c| c.is_zero()) {
        out.pop();
    }
    out
}

/// Horner evaluation with interval arithmetic; returns an enclosure.
fn interval_eval(coeffs: &[BigRational], lo: &BigRational, hi: &BigRational) -> (BigRational, BigRational) {
    let mut a = BigRational::zero();
    let mut b = BigRational::zero();
    for c in coeffs.iter().rev() {
        let prods = [&a * lo, &a * hi, &b * lo, &b * hi];
        let min = prods.iter().min().unwrap().clone();
        let max = prods.iter().max().unwrap().clone();
        a = min + c;
        b = max + c;
    }
    (a, b)
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        same_field(&self.field, &other.field) && self.coeffs == other.coeffs
    }
}

impl Eq for FieldElement {}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            }
            first = false;
            let coef = if mag.is_one() && k > 0 {
                String::new()
            } else if k > 0 {
                format!("{mag}*")
            } else {
                mag.to_string()
            };
            match k {
                0 => write!(f, "{coef}")?,
                1 => write!(f, "{coef}r")?,
                _ => write!(f, "{coef}r^{k}")?,
            }
        }
        Ok(())
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&FieldElement> for &FieldElement {
            type Output = FieldElement;
            /// Panics if the operands live in different fields; use the
            /// `checked_*` form for fallible arithmetic.
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                self.$checked(rhs).expect("field element operands share a field")
            }
        }
        impl $trait<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.neg_ref()
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.neg_ref()
    }
}
