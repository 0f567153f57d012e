use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Monic polynomial with integer coefficients, stored little-endian
/// (`coeffs[k]` multiplies `x^k`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(coeffs: Vec<BigInt>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::invalid("radix polynomial must have degree at least 1"));
        }
        if !coeffs.last().is_some_and(|c| c.is_one()) {
            return Err(Error::invalid("radix polynomial must be monic"));
        }
        Ok(IntPolynomial { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// `x - n`.
    pub fn linear(n: &BigInt) -> Self {
        IntPolynomial {
            coeffs: vec![-n.clone(), BigInt::one()],
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| {
            acc * z + c.to_f64().unwrap_or(f64::NAN)
        })
    }

    /// True iff the polynomial has a rational root. Monic with integer
    /// coefficients, so any rational root is an integer dividing the
    /// constant term.
    pub fn has_rational_root(&self) -> bool {
        !self.integer_roots().is_empty()
    }

    pub fn integer_roots(&self) -> Vec<BigInt> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            let mut roots = vec![BigInt::zero()];
            // strip the factor x and look again
            let mut rest = self.coeffs[1..].to_vec();
            while rest.len() > 1 && rest[0].is_zero() {
                rest.remove(0);
            }
            if rest.len() >= 2 {
                let p = IntPolynomial { coeffs: rest };
                roots.extend(p.integer_roots().into_iter().filter(|r| !r.is_zero()));
            }
            return roots;
        }
        let mut roots = Vec::new();
        for d in divisors(&c0.magnitude().clone()) {
            for cand in [BigInt::from(d.clone()), -BigInt::from(d)] {
                if self.eval_rational(&BigRational::from_integer(cand.clone())).is_zero() {
                    roots.push(cand);
                }
            }
        }
        roots.sort();
        roots
    }

    pub fn mul(&self, other: &IntPolynomial) -> IntPolynomial {
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolynomial { coeffs: out }
    }

    /// Division by a monic divisor; stays in `Z[x]`. Returns the remainder
    /// coefficients (trimmed, possibly empty for zero).
    pub fn div_rem(&self, divisor: &IntPolynomial) -> (Vec<BigInt>, Vec<BigInt>) {
        let mut rem = self.coeffs.clone();
        let dd = divisor.degree();
        if rem.len() <= dd {
            return (vec![], trim_int(rem));
        }
        let mut quot = vec![BigInt::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let lead = rem[k + dd].clone();
            if lead.is_zero() {
                continue;
            }
            for (j, c) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= &lead * c;
            }
            quot[k] = lead;
        }
        rem.truncate(dd);
        (quot, trim_int(rem))
    }

    pub fn divides(&self, other: &IntPolynomial) -> bool {
        other.div_rem(self).1.is_empty()
    }

    /// Monic polynomial whose roots are the squares of the roots of `self`:
    /// the resultant `Res_x(P(x), y - x^2)`, computed as `±P(x)·P(-x)`
    /// read in `y = x^2`.
    pub fn squared_roots(&self) -> IntPolynomial {
        let n = self.degree();
        let neg: Vec<BigInt> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| if k % 2 == 1 { -c } else { c.clone() })
            .collect();
        let prod = self.mul(&IntPolynomial { coeffs: neg });
        let sign = if n % 2 == 1 { -BigInt::one() } else { BigInt::one() };
        let coeffs = prod.coeffs.iter().step_by(2).map(|c| c * &sign).collect();
        IntPolynomial { coeffs }
    }

    /// Number of distinct real roots in the half-open interval `(lo, hi]`,
    /// by Sturm's theorem.
    pub fn real_roots_in(&self, lo: &BigRational, hi: &BigRational) -> usize {
        let chain = sturm_chain(&self.to_rational());
        let changes = |x: &BigRational| -> usize {
            let signs: Vec<i8> = chain
                .iter()
                .map(|p| sign_of(&eval_rat(p, x)))
                .filter(|s| *s != 0)
                .collect();
            signs.windows(2).filter(|w| w[0] != w[1]).count()
        };
        changes(lo).saturating_sub(changes(hi))
    }

    /// All complex roots in double precision (Aberth iteration).
    pub fn complex_roots(&self) -> Vec<Complex64> {
        let n = self.degree();
        let coeffs: Vec<f64> = self.coeffs.iter().map(|c| c.to_f64().unwrap_or(0.0)).collect();
        let bound = 1.0 + coeffs[..n].iter().map(|c| c.abs()).fold(0.0_f64, f64::max);
        let mut roots: Vec<Complex64> = (0..n)
            .map(|k| {
                let angle = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4;
                Complex64::from_polar(0.5 * bound, angle)
            })
            .collect();
        let deriv: Vec<f64> = (1..=n).map(|k| k as f64 * coeffs[k]).collect();
        let horner = |cs: &[f64], z: Complex64| cs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c);
        for _ in 0..500 {
            let mut moved = 0.0_f64;
            for i in 0..n {
                let z = roots[i];
                let p = horner(&coeffs, z);
                if p.norm() == 0.0 {
                    continue;
                }
                let ratio = p / horner(&deriv, z);
                let repulsion: Complex64 = (0..n)
                    .filter(|&j| j != i)
                    .map(|j| Complex64::new(1.0, 0.0) / (z - roots[j]))
                    .sum();
                let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
                roots[i] = z - step;
                moved = moved.max(step.norm());
            }
            if moved < 1e-15 {
                break;
            }
        }
        roots
    }

    pub(crate) fn to_rational(&self) -> Vec<BigRational> {
        self.coeffs
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect()
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let coef = if mag.is_one() && k > 0 {
                String::new()
            } else {
                mag.to_string()
            };
            match k {
                0 => write!(f, "{mag}")?,
                1 => write!(f, "{coef}x")?,
                _ => write!(f, "{coef}x^{k}")?,
            }
        }
        Ok(())
    }
}

fn trim_int(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

fn divisors(n: &BigUint) -> Vec<BigUint> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigUint::one();
    while &d * &d <= *n {
        if (n % &d).is_zero() {
            let q = n / &d;
            if q != d {
                large.push(q);
            }
            small.push(d.clone());
        }
        d += 1u32;
    }
    small.extend(large.into_iter().rev());
    small
}

fn sign_of(x: &BigRational) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

pub(crate) fn eval_rat(p: &[BigRational], x: &BigRational) -> BigRational {
    p.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}

fn trim_rat(mut v: Vec<BigRational>) -> Vec<BigRational> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

/// Remainder of `a` modulo `b` in `Q[x]`; `b` must be non-zero.
pub(crate) fn rat_rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    rat_div_rem(a, b).1
}

pub(crate) fn rat_div_rem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let b = trim_rat(b.to_vec());
    let mut rem = trim_rat(a.to_vec());
    let db = b.len() - 1;
    if rem.len() <= db {
        return (vec![], rem);
    }
    let lead = b[db].clone();
    let mut quot = vec![BigRational::zero(); rem.len() - db];
    for k in (0..quot.len()).rev() {
        let q = &rem[k + db] / &lead;
        if q.is_zero() {
            continue;
        }
        for (j, c) in b.iter().enumerate() {
            rem[k + j] -= &q * c;
        }
        quot[k] = q;
    }
    rem.truncate(db);
    (quot, trim_rat(rem))
}

fn sturm_chain(p: &[BigRational]) -> Vec<Vec<BigRational>> {
    let deriv: Vec<BigRational> = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * BigRational::from_integer(BigInt::from(k)))
        .collect();
    let mut chain = vec![p.to_vec(), trim_rat(deriv)];
    loop {
        let n = chain.len();
        if chain[n - 1].is_empty() {
            chain.pop();
            break;
        }
        let r: Vec<BigRational> = rat_rem(&chain[n - 2], &chain[n - 1]).into_iter().map(|c| -c).collect();
        if r.is_empty() {
            break;
        }
        chain.push(r);
    }
    chain
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c).unwrap()
    }

    #[test]
    fn rejects_non_monic_and_constant() {
        let err = IntPolynomial::from_i64(&[1, 2]).unwrap_err();
        assert!(err.to_string().contains("radix polynomial must be monic"));
        assert!(IntPolynomial::from_i64(&[1]).is_err());
    }

    #[test]
    fn rational_roots() {
        assert!(!p(&[-1, -1, 1]).has_rational_root());
        assert!(p(&[2, -3, 1]).has_rational_root());
        assert!(!p(&[-1, -1, -1, 1]).has_rational_root());
        assert_eq!(p(&[2, -3, 1]).integer_roots(), vec![BigInt::from(1), BigInt::from(2)]);
        assert!(p(&[0, 0, 1]).has_rational_root());
    }

    #[test]
    fn sturm_counts_roots() {
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        // (x-1)(x-2)(x-3)
        let cubic = p(&[-6, 11, -6, 1]);
        assert_eq!(cubic.real_roots_in(&q(0, 1), &q(4, 1)), 3);
        assert_eq!(cubic.real_roots_in(&q(3, 2), &q(5, 2)), 1);
        assert_eq!(p(&[-1, -1, 1]).real_roots_in(&q(1, 1), &q(2, 1)), 1);
        assert_eq!(p(&[1, 0, 1]).real_roots_in(&q(-9, 1), &q(9, 1)), 0);
    }

    #[test]
    fn squared_roots_of_golden_and_chair() {
        // roots of x^4 - x^2 - 1 squared are the roots of y^2 - y - 1 (each twice)
        let chair = p(&[-1, 0, -1, 0, 1]);
        assert_eq!(chair.squared_roots(), p(&[1, 2, -1, -2, 1]));
        // x^2 - x - 1 -> y^2 - 3y + 1
        assert_eq!(p(&[-1, -1, 1]).squared_roots(), p(&[1, -3, 1]));
    }

    #[test]
    fn division_and_roots() {
        let f = p(&[-1, -1, 1]).mul(&p(&[1, 0, 1]));
        assert!(p(&[1, 0, 1]).divides(&f));
        assert!(!p(&[1, 1]).divides(&f));
        let roots = p(&[-1, -1, 1]).complex_roots();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!(roots.iter().any(|r| (r.re - phi).abs() < 1e-12 && r.im.abs() < 1e-12));
    }

    #[test]
    fn display() {
        assert_eq!(p(&[-1, -1, -1, 1]).to_string(), "x^3 - x^2 - x - 1");
        assert_eq!(p(&[2, -3, 1]).to_string(), "x^2 - 3x + 2");
    }
}
