use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numberfield::{silver_root, FieldElement, SilverIndex, DEFAULT_PRECISION_BITS};
use crate::rules::{big_mul, PartitionMatrix};

pub const DEFAULT_Z_RHO_DEGREE: u32 = 20;
const MAX_Z_RHO_DEGREE: u32 = 64;

/// `±Σ z_k ρ^k` with digits `z_k ∈ {0, 1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZRhoWitness {
    pub negative: bool,
    /// Most significant digit first, without leading zeros.
    pub digits: String,
}

impl fmt::Display for ZRhoWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", if self.negative { "-" } else { "" }, self.digits)
    }
}

impl ZRhoWitness {
    /// Exact value in the field of `rho`.
    pub fn evaluate(&self, rho: &FieldElement) -> FieldElement {
        let mut acc = FieldElement::zero(rho.field());
        for c in self.digits.chars() {
            acc = &acc * rho;
            if c == '1' {
                acc = &acc + &FieldElement::one(rho.field());
            }
        }
        if self.negative {
            -acc
        } else {
            acc
        }
    }
}

/// Searches for `x = ±Σ_{k ≤ max_degree} z_k ρ^k` with binary digits, where
/// `ρ` is the generator of the field of `x`. Branches are cut in the real
/// embedding of `ρ`; candidates are confirmed exactly. `None` means no
/// witness up to the bound.
pub fn z_rho_member(x: &FieldElement, max_degree: u32) -> Result<Option<ZRhoWitness>> {
    if max_degree > MAX_Z_RHO_DEGREE {
        return Err(Error::invalid(format!(
            "max_degree {max_degree} exceeds {MAX_Z_RHO_DEGREE}"
        )));
    }
    let rho = FieldElement::generator(x.field());
    let r = rho.to_f64();
    if r <= 1.0 {
        return Err(Error::invalid("Z[ρ] search needs a real generator ρ > 1"));
    }
    if x.is_zero() {
        return Ok(Some(ZRhoWitness {
            negative: false,
            digits: "0".into(),
        }));
    }
    let d = max_degree as usize;
    let powers: Vec<f64> = (0..=d).map(|k| r.powi(k as i32)).collect();
    // tail[k] = Σ_{j ≤ k} ρ^j
    let tail: Vec<f64> = powers
        .iter()
        .scan(0.0, |s, p| {
            *s += p;
            Some(*s)
        })
        .collect();
    let exact: Vec<FieldElement> = (0..=d).map(|k| rho.pow(k as i64).expect("ρ ≠ 0")).collect();

    for negative in [false, true] {
        let target = if negative { -x.clone() } else { x.clone() };
        let t = target.to_f64();
        let tol = 1e-7 * (1.0 + t.abs());
        let mut digits = vec![0u8; d + 1];
        if search(d as isize, 0.0, t, tol, &powers, &tail, &exact, &target, &mut digits) {
            let s: String = digits.iter().rev().map(|b| if *b == 1 { '1' } else { '0' }).collect();
            let trimmed = s.trim_start_matches('0');
            return Ok(Some(ZRhoWitness {
                negative,
                digits: trimmed.to_string(),
            }));
        }
    }
    Ok(None)
}

#[allow(clippy::too_many_arguments)]
fn search(
    k: isize,
    s: f64,
    t: f64,
    tol: f64,
    powers: &[f64],
    tail: &[f64],
    exact: &[FieldElement],
    target: &FieldElement,
    digits: &mut [u8],
) -> bool {
    if s > t + tol {
        return false;
    }
    if k < 0 {
        if (s - t).abs() > tol {
            return false;
        }
        let mut acc = FieldElement::zero(target.field());
        for (j, &b) in digits.iter().enumerate() {
            if b == 1 {
                acc = &acc + &exact[j];
            }
        }
        return acc == *target;
    }
    let k_u = k as usize;
    if s + tail[k_u] < t - tol {
        return false;
    }
    for b in [1u8, 0] {
        digits[k_u] = b;
        let next = if b == 1 { s + powers[k_u] } else { s };
        if search(k - 1, next, t, tol, powers, tail, exact, target, digits) {
            return true;
        }
    }
    digits[k_u] = 0;
    false
}

/// The least `n ≤ bound` with `ρ^n = x` exactly.
pub fn single_power_exponent(x: &FieldElement, bound: u32) -> Option<u32> {
    let rho = FieldElement::generator(x.field());
    let mut p = FieldElement::one(x.field());
    for n in 0..=bound {
        if p == *x {
            return Some(n);
        }
        p = &p * &rho;
    }
    None
}

#[derive(Clone, Debug, Serialize)]
pub struct SilverIdentityReport {
    pub index: String,
    /// `Σ b_k ρ^{-k} = 1`.
    pub identity: bool,
    /// Fractional digit strings, each obtained from the previous one by
    /// expanding its last 1 with the identity; all must equal `(0·1)_ρ`.
    pub chain: Vec<(String, bool)>,
}

impl SilverIdentityReport {
    pub fn holds(&self) -> bool {
        self.identity && self.chain.iter().all(|(_, ok)| *ok)
    }
}

fn fractional_value(digits: &[u8], rho_inv: &FieldElement) -> FieldElement {
    let mut acc = FieldElement::zero(rho_inv.field());
    let mut p = rho_inv.clone();
    for &d in digits {
        if d == 1 {
            acc = &acc + &p;
        }
        p = &p * rho_inv;
    }
    acc
}

/// Checks `(0·b_1…b_N)_ρ = 1` exactly in `Q(ρ)`, and the chain
/// `0·1 = 0·0b = …` for three rounds of substitution.
pub fn silver_identity_check(b: &SilverIndex) -> Result<SilverIdentityReport> {
    let field = Arc::new(silver_root(b, DEFAULT_PRECISION_BITS)?);
    let rho_inv = FieldElement::generator(&field).inv()?;
    let identity = fractional_value(b.bits(), &rho_inv).is_one();
    let mut digits = vec![1u8];
    let base = fractional_value(&digits, &rho_inv);
    let mut chain = Vec::new();
    for round in 0..=3 {
        if round > 0 {
            let last = digits.iter().rposition(|&d| d == 1).expect("a 1 digit remains");
            digits[last] = 0;
            digits.truncate(last + 1);
            digits.extend_from_slice(b.bits());
        }
        let s: String = digits.iter().map(|d| char::from(b'0' + d)).collect();
        chain.push((format!("0·{s}"), fractional_value(&digits, &rho_inv) == base));
    }
    Ok(SilverIdentityReport {
        index: b.to_string(),
        identity,
        chain,
    })
}

/// An integer matrix `A = [[a, b], [c, d]]` with `ρ = cτ + d` and
/// `ρτ = aτ + b`, so that `ρ` maps the lattice `Z + τZ` into itself.
pub fn lattice_multiplier(tau: Complex64, rho: Complex64, bound: i64) -> Result<Option<[[i64; 2]; 2]>> {
    if tau.im <= 0.0 {
        return Err(Error::invalid("τ must lie in the upper half plane"));
    }
    if !(0..=1000).contains(&bound) {
        return Err(Error::invalid("bound must lie in 0..=1000"));
    }
    let solve = |z: Complex64| -> Option<(i64, i64)> {
        let c = z.im / tau.im;
        let d = z.re - c * tau.re;
        let (ci, di) = (c.round(), d.round());
        let ok = (c - ci).abs() < 1e-9 && (d - di).abs() < 1e-9 && ci.abs() <= bound as f64 && di.abs() <= bound as f64;
        ok.then_some((ci as i64, di as i64))
    };
    let Some((c, d)) = solve(rho) else { return Ok(None) };
    let Some((a, b)) = solve(rho * tau) else {
        return Ok(None);
    };
    let (tr, det) = ((a + d) as f64, (a * d - b * c) as f64);
    let q = rho * rho - tr * rho + det;
    if q.norm() > 1e-9 * (1.0 + rho.norm_sqr()) {
        return Ok(None);
    }
    Ok(Some([[a, b], [c, d]]))
}

/// `a_n = (Uⁿ 1)_N` for the companion partition matrix of `b`, `n = 0..len`;
/// satisfies `a_n = Σ_j b_j a_{n−j}`.
pub fn recurrence_sequence(b: &SilverIndex, len: usize) -> Vec<BigUint> {
    let n = b.len();
    let mut rows = vec![vec![0u64; n]; n];
    for (k, &bit) in b.bits().iter().enumerate() {
        rows[0][k] = bit as u64;
    }
    for k in 1..n {
        rows[k][k - 1] = 1;
    }
    let u = PartitionMatrix::new(rows)
        .expect("companion rows are non-empty")
        .to_big();
    let mut v: Vec<Vec<BigUint>> = vec![vec![BigUint::one()]; n];
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(v[n - 1][0].clone());
        v = big_mul(&u, &v);
    }
    debug_assert!(out.iter().all(|a| !a.is_zero()));
    out
}
