use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::IntPolynomial;
use crate::error::{Error, Result};

/// Default precision for cached radix values.
pub const DEFAULT_PRECISION_BITS: u32 = 80;

/// Bits `b_1 … b_N` of the binary fraction `b = (0·b_1…b_N)_2` indexing a
/// silver number.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SilverIndex {
    bits: Vec<u8>,
}

impl SilverIndex {
    /// Requires `N ≥ 2`, `b_N = 1` and at least two set bits.
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.len() < 2 {
            return Err(Error::invalid("silver index needs at least two bits"));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::invalid("silver index bits must be 0 or 1"));
        }
        if bits.last() != Some(&1) {
            return Err(Error::invalid("silver index must end in a 1 bit (b_N = 1)"));
        }
        if bits.iter().filter(|&&b| b == 1).count() < 2 {
            return Err(Error::invalid("silver index needs at least two set bits"));
        }
        Ok(SilverIndex { bits })
    }

    /// Parses a bit string such as `"1011"`.
    pub fn parse(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::invalid(format!("bad silver index bit '{c}' in \"{s}\""))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::new(bits)
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn set_bits(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    /// Every valid index with `2 ≤ N ≤ max_len`.
    pub fn enumerate(max_len: usize) -> Vec<SilverIndex> {
        let mut out = Vec::new();
        for n in 2..=max_len {
            for mask in 0u32..(1 << (n - 1)) {
                let mut bits: Vec<u8> = (0..n - 1).map(|k| ((mask >> (n - 2 - k)) & 1) as u8).collect();
                bits.push(1);
                if let Ok(b) = SilverIndex::new(bits) {
                    out.push(b);
                }
            }
        }
        out
    }
}

impl fmt::Display for SilverIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// `x^N − Σ_j b_j x^(N−j)`.
pub fn silver_polynomial(b: &SilverIndex) -> IntPolynomial {
    let n = b.len();
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::one();
    for (j, &bit) in b.bits().iter().enumerate() {
        if bit == 1 {
            coeffs[n - (j + 1)] = -BigInt::one();
        }
    }
    IntPolynomial::new(coeffs).expect("silver polynomial is monic")
}

/// A real algebraic number: its minimal polynomial plus a rational isolating
/// interval that shrinks under refinement.
///
/// Integers are represented with a degenerate interval `[n, n]`.
#[derive(Clone, Debug)]
pub struct AlgebraicNumber {
    min_poly: IntPolynomial,
    lo: BigRational,
    hi: BigRational,
    precision_bits: u32,
    /// False when the polynomial could not be certified minimal (large
    /// degree, or a user-supplied polynomial).
    certified_minimal: bool,
}

impl AlgebraicNumber {
    pub fn integer(n: i64) -> Self {
        let v = BigRational::from_integer(BigInt::from(n));
        AlgebraicNumber {
            min_poly: IntPolynomial::linear(&BigInt::from(n)),
            lo: v.clone(),
            hi: v,
            precision_bits: u32::MAX,
            certified_minimal: true,
        }
    }

    /// Wraps a root of `poly` isolated by `[lo, hi]` and refines it to
    /// `precision_bits`. The interval must contain exactly one root.
    pub fn from_isolating_interval(
        poly: IntPolynomial,
        lo: BigRational,
        hi: BigRational,
        precision_bits: u32,
    ) -> Result<Self> {
        if lo > hi {
            return Err(Error::invalid("isolating interval has lo > hi"));
        }
        if lo == hi {
            if !poly.eval_rational(&lo).is_zero() {
                return Err(Error::invalid("degenerate isolating interval is not a root"));
            }
        } else {
            // closed interval: count roots in (lo, hi] plus a root at lo
            let at_lo = usize::from(poly.eval_rational(&lo).is_zero());
            let count = poly.real_roots_in(&lo, &hi) + at_lo;
            if count != 1 {
                return Err(Error::invalid(format!(
                    "isolating interval [{lo}, {hi}] contains {count} roots of {poly}, expected 1"
                )));
            }
        }
        let certified = if lo == hi {
            true
        } else {
            let (factor, certified) = minimal_factor(&poly, &lo, &hi);
            if factor != poly {
                return Err(Error::invalid(format!(
                    "polynomial {poly} is reducible; the root's minimal polynomial is {factor}"
                )));
            }
            certified
        };
        let mut num = AlgebraicNumber {
            min_poly: poly,
            lo,
            hi,
            precision_bits: 0,
            certified_minimal: certified,
        };
        num.bisect_to(precision_bits);
        Ok(num)
    }

    pub fn min_poly(&self) -> &IntPolynomial {
        &self.min_poly
    }

    pub fn degree(&self) -> usize {
        self.min_poly.degree()
    }

    pub fn interval(&self) -> (&BigRational, &BigRational) {
        (&self.lo, &self.hi)
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn is_certified_minimal(&self) -> bool {
        self.certified_minimal
    }

    pub fn is_rational(&self) -> bool {
        self.lo == self.hi
    }

    /// Midpoint of the isolating interval.
    pub fn value(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))
    }

    pub fn to_f64(&self) -> f64 {
        self.value().to_f64().unwrap_or(f64::NAN)
    }

    /// A copy refined so that the interval width is below `2^-bits`.
    pub fn refined(&self, bits: u32) -> AlgebraicNumber {
        let mut out = self.clone();
        out.bisect_to(bits);
        out
    }

    fn bisect_to(&mut self, bits: u32) {
        if self.lo == self.hi {
            self.precision_bits = u32::MAX;
            return;
        }
        let target = BigRational::new(BigInt::one(), BigInt::one() << bits as usize);
        let two = BigRational::from_integer(BigInt::from(2));
        let sign = |x: &BigRational| {
            let v = self.min_poly.eval_rational(x);
            if v.is_zero() {
                0
            } else if v.is_positive() {
                1
            } else {
                -1
            }
        };
        let mut lo = self.lo.clone();
        let mut hi = self.hi.clone();
        let s_lo = sign(&lo);
        if s_lo == 0 {
            self.hi = lo.clone();
            self.lo = lo;
            self.precision_bits = u32::MAX;
            return;
        }
        if sign(&hi) == 0 {
            self.lo = hi.clone();
            self.hi = hi;
            self.precision_bits = u32::MAX;
            return;
        }
        while &hi - &lo >= target {
            let mid = (&lo + &hi) / &two;
            match sign(&mid) {
                0 => {
                    lo = mid.clone();
                    hi = mid;
                    break;
                }
                s if s == s_lo => lo = mid,
                _ => hi = mid,
            }
        }
        self.precision_bits = if lo == hi {
            u32::MAX
        } else {
            self.precision_bits.max(bits)
        };
        self.lo = lo;
        self.hi = hi;
    }
}

impl PartialEq for AlgebraicNumber {
    /// Same minimal polynomial and overlapping isolating intervals.
    fn eq(&self, other: &Self) -> bool {
        self.min_poly == other.min_poly && self.lo <= other.hi && other.lo <= self.hi
    }
}

/// The silver number `s_b`: the largest real root of the silver polynomial,
/// isolated in `(1, 2)` by exact bisection.
///
/// The stored polynomial is the irreducible factor of the silver polynomial
/// that vanishes at `s_b`; some silver polynomials factor, for instance
/// `x^4 − x^3 − x − 1 = (x^2 − x − 1)(x^2 + 1)`.
pub fn silver_root(b: &SilverIndex, precision_bits: u32) -> Result<AlgebraicNumber> {
    if precision_bits < 16 {
        return Err(Error::invalid("silver_root needs at least 16 bits of precision"));
    }
    let poly = silver_polynomial(b);
    // P(1) = 1 - Σ b_j < 0 and P(2) > 0; x^-N P(x) is increasing on x > 0,
    // so [1, 2] isolates the unique positive root.
    let lo = BigRational::one();
    let hi = BigRational::from_integer(BigInt::from(2));
    let mut num = AlgebraicNumber {
        min_poly: poly.clone(),
        lo,
        hi,
        precision_bits: 0,
        certified_minimal: false,
    };
    num.bisect_to(precision_bits.max(40));
    let (factor, certified) = minimal_factor(&poly, &num.lo, &num.hi);
    num.min_poly = factor;
    num.certified_minimal = certified;
    num.bisect_to(precision_bits);
    Ok(num)
}

/// Largest degree for which the root-subset factor search is attempted.
const FACTOR_SEARCH_MAX_DEGREE: usize = 18;

/// Finds the monic integer factor of `poly` of least degree that vanishes
/// inside `[lo, hi]`. Candidate factors are products over subsets of the
/// numerically computed roots (conjugate pairs kept together); each
/// candidate is confirmed by exact division and an exact sign change.
pub(crate) fn minimal_factor(poly: &IntPolynomial, lo: &BigRational, hi: &BigRational) -> (IntPolynomial, bool) {
    let n = poly.degree();
    if n <= 3 {
        return (poly.clone(), !poly.has_rational_root() || n == 1);
    }
    if n > FACTOR_SEARCH_MAX_DEGREE {
        return (poly.clone(), false);
    }
    let target = ((lo + hi) / BigRational::from_integer(BigInt::from(2)))
        .to_f64()
        .unwrap_or(f64::NAN);
    let roots = poly.complex_roots();
    let (idx, _) = roots
        .iter()
        .enumerate()
        .map(|(i, r)| (i, (r - Complex64::new(target, 0.0)).norm()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("polynomial has roots");

    // group the remaining roots into real singletons and conjugate pairs
    let mut used = vec![false; n];
    used[idx] = true;
    let mut units: Vec<Vec<Complex64>> = Vec::new();
    for i in 0..n {
        if used[i] {
            continue;
        }
        used[i] = true;
        if roots[i].im.abs() < 1e-9 {
            units.push(vec![Complex64::new(roots[i].re, 0.0)]);
        } else {
            let partner = (0..n).filter(|&j| !used[j]).min_by(|&a, &b| {
                (roots[a] - roots[i].conj())
                    .norm()
                    .total_cmp(&(roots[b] - roots[i].conj()).norm())
            });
            match partner {
                Some(j) => {
                    used[j] = true;
                    units.push(vec![roots[i], roots[i].conj()]);
                }
                None => return (poly.clone(), false),
            }
        }
    }

    let mut subsets: Vec<u32> = (0..(1u32 << units.len())).collect();
    let size = |mask: u32| -> usize {
        (0..units.len())
            .filter(|&k| mask & (1 << k) != 0)
            .map(|k| units[k].len())
            .sum()
    };
    subsets.sort_by_key(|&m| size(m));
    for mask in subsets {
        if size(mask) + 1 >= n {
            break;
        }
        let mut prod = vec![Complex64::new(1.0, 0.0)];
        let mut chosen = vec![Complex64::new(target, 0.0)];
        for (k, unit) in units.iter().enumerate() {
            if mask & (1 << k) != 0 {
                chosen.extend(unit.iter().copied());
            }
        }
        for r in chosen {
            let mut next = vec![Complex64::new(0.0, 0.0); prod.len() + 1];
            for (i, c) in prod.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * r;
            }
            prod = next;
        }
        if prod
            .iter()
            .any(|c| (c.re - c.re.round()).abs() > 1e-6 || c.im.abs() > 1e-6)
        {
            continue;
        }
        let coeffs: Vec<BigInt> = prod.iter().map(|c| BigInt::from(c.re.round() as i64)).collect();
        let Ok(candidate) = IntPolynomial::new(coeffs) else {
            continue;
        };
        let at_lo = candidate.eval_rational(lo);
        let at_hi = candidate.eval_rational(hi);
        let brackets = at_lo.is_zero() || at_hi.is_zero() || at_lo.is_negative() != at_hi.is_negative();
        if brackets && candidate.divides(poly) {
            return (candidate, true);
        }
    }
    (poly.clone(), true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(s: &str) -> SilverIndex {
        SilverIndex::parse(s).unwrap()
    }

    #[test]
    fn index_validation() {
        assert!(SilverIndex::parse("10").is_err());
        assert!(SilverIndex::parse("01").is_err());
        assert!(SilverIndex::parse("1").is_err());
        assert!(SilverIndex::parse("110").is_err());
        assert!(SilverIndex::parse("12").is_err());
        assert!(SilverIndex::parse("0101").is_ok());
    }

    #[test]
    fn silver_polynomials() {
        assert_eq!(silver_polynomial(&idx("11")).to_string(), "x^2 - x - 1");
        assert_eq!(silver_polynomial(&idx("111")).to_string(), "x^3 - x^2 - x - 1");
        assert_eq!(silver_polynomial(&idx("0101")).to_string(), "x^4 - x^2 - 1");
    }

    #[test]
    fn golden_and_tribonacci_roots() {
        let phi = silver_root(&idx("11"), 80).unwrap();
        assert!((phi.to_f64() - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-15);
        let (lo, hi) = phi.interval();
        let width = (hi - lo).to_f64().unwrap();
        assert!(width < 2f64.powi(-80));
        let trib = silver_root(&idx("111"), 80).unwrap();
        assert!((trib.to_f64() - 1.839).abs() < 1e-3);
    }

    #[test]
    fn enumeration_counts() {
        // N=2: 11; N=3: 011, 101, 111
        assert_eq!(SilverIndex::enumerate(3).len(), 4);
        assert!(SilverIndex::enumerate(6).iter().all(|b| b.set_bits() >= 2));
    }

    #[test]
    fn reducible_silver_polynomial_uses_minimal_factor() {
        let r = silver_root(&idx("1011"), 80).unwrap();
        assert_eq!(r.min_poly().to_string(), "x^2 - x - 1");
        assert!(r.is_certified_minimal());
        let r = silver_root(&idx("0111"), 80).unwrap();
        assert_eq!(r.min_poly().to_string(), "x^3 - x^2 - 1");
        let chair = silver_root(&idx("0101"), 80).unwrap();
        assert_eq!(chair.min_poly().to_string(), "x^4 - x^2 - 1");
    }

    #[test]
    fn interval_must_isolate() {
        let p = IntPolynomial::from_i64(&[-6, 11, -6, 1]).unwrap();
        let q = |n: i64| BigRational::from_integer(n.into());
        assert!(AlgebraicNumber::from_isolating_interval(p.clone(), q(0), q(4), 40).is_err());
        let two = AlgebraicNumber::from_isolating_interval(p, q(2), q(2), 40).unwrap();
        assert!(two.is_rational());
    }
}
