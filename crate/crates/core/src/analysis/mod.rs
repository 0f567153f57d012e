//! Spectral and number-theoretic analysis of rule systems.

mod numeration;

pub use numeration::{
    lattice_multiplier, recurrence_sequence, silver_identity_check, single_power_exponent, z_rho_member,
    SilverIdentityReport, ZRhoWitness, DEFAULT_Z_RHO_DEGREE,
};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numberfield::{FieldElement, IntPolynomial};
use crate::rules::{big_mul, PartitionMatrix, Radix, RuleSystem};

const EIGEN_TOL: f64 = 1e-12;
const EIGEN_MAX_ITER: u32 = 100_000;

#[derive(Clone, Debug, Serialize)]
pub struct EigenResult {
    pub eigenvalue: f64,
    /// Right eigenvector, normalized to `Σ v_k = 1`.
    pub eigenvector: Vec<f64>,
    pub iterations: u32,
    /// `‖Uv − λv‖∞`.
    pub residual: f64,
    pub converged: bool,
}

fn power_iteration(a: &[Vec<f64>], shift: f64) -> (f64, Vec<f64>, u32, bool) {
    let n = a.len();
    let mut v = vec![1.0 / n as f64; n];
    let mut lambda = 0.0;
    for it in 1..=EIGEN_MAX_ITER {
        let w: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| a[i][j] * v[j]).sum::<f64>() + shift * v[i])
            .collect();
        lambda = w.iter().sum();
        v = w.iter().map(|x| x / lambda).collect();
        // iterate past the acceptance threshold down to rounding level
        if residual(a, lambda - shift, &v) < EIGEN_TOL * 1e-2 * lambda.max(1.0) {
            return (lambda - shift, v, it, true);
        }
    }
    let ok = residual(a, lambda - shift, &v) < EIGEN_TOL;
    (lambda - shift, v, EIGEN_MAX_ITER, ok)
}

fn residual(a: &[Vec<f64>], lambda: f64, v: &[f64]) -> f64 {
    (0..a.len())
        .map(|i| ((0..a.len()).map(|j| a[i][j] * v[j]).sum::<f64>() - lambda * v[i]).abs())
        .fold(0.0, f64::max)
}

/// Perron eigenpair by power iteration from the uniform vector. Matrices
/// whose iteration does not settle (periodic ones) are retried as `U + I`.
pub fn dominant_eigen(u: &PartitionMatrix) -> Result<EigenResult> {
    let n = u.size();
    if n == 0 || (0..n).any(|i| u.row_sum(i) == 0) {
        return Err(Error::invalid("partition matrix must have positive row sums"));
    }
    let a = u.to_f64();
    let (mut lambda, mut v, mut iterations, mut converged) = power_iteration(&a, 0.0);
    if !converged || residual(&a, lambda, &v) >= EIGEN_TOL {
        let (l2, v2, it2, c2) = power_iteration(&a, 1.0);
        iterations += it2;
        if c2 {
            (lambda, v, converged) = (l2, v2, true);
        }
    }
    let res = residual(&a, lambda, &v);
    Ok(EigenResult {
        eigenvalue: lambda,
        eigenvector: v,
        iterations,
        residual: res,
        converged: converged && res < EIGEN_TOL,
    })
}

/// `(Uⁿ)[i][j] / Σ_k (Uⁿ)[i][k]` for `n = 1..=n_max`, from exact powers.
/// Indices are 0-based.
pub fn ratio_trace(u: &PartitionMatrix, i: usize, j: usize, n_max: u32) -> Result<Vec<f64>> {
    let n = u.size();
    if i >= n || j >= n {
        return Err(Error::invalid(format!(
            "indices ({i}, {j}) out of range for a {n}×{n} matrix"
        )));
    }
    let base = u.to_big();
    let mut p = base.clone();
    let mut out = Vec::with_capacity(n_max as usize);
    for k in 1..=n_max {
        out.push(ratio(&p, i, j));
        if k < n_max {
            p = big_mul(&p, &base);
        }
    }
    Ok(out)
}

fn ratio(p: &[Vec<num_bigint::BigUint>], i: usize, j: usize) -> f64 {
    let sum: num_bigint::BigUint = p[i].iter().sum();
    if sum.is_zero() {
        return 0.0;
    }
    BigRational::new(BigInt::from(p[i][j].clone()), BigInt::from(sum))
        .to_f64()
        .unwrap_or(f64::NAN)
}

/// Period of an irreducible matrix, `None` if the matrix is reducible.
pub fn period(u: &PartitionMatrix) -> Option<u32> {
    let n = u.size();
    let reach = |forward: bool| {
        let mut level = vec![None; n];
        level[0] = Some(0i64);
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(a) = queue.pop_front() {
            for b in 0..n {
                let edge = if forward { u.get(a, b) } else { u.get(b, a) };
                if edge > 0 && level[b].is_none() {
                    level[b] = Some(level[a].unwrap() + 1);
                    queue.push_back(b);
                }
            }
        }
        level
    };
    let level = reach(true);
    if level.iter().any(Option::is_none) || reach(false).iter().any(Option::is_none) {
        return None;
    }
    let mut g = 0i64;
    for a in 0..n {
        for b in 0..n {
            if u.get(a, b) > 0 {
                let d = (level[a].unwrap() + 1 - level[b].unwrap()).abs();
                g = num_integer::gcd(g, d);
            }
        }
    }
    Some(g.max(1) as u32)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Irrationality,
    IntegerGap,
    Inapplicable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Aperiodic,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Aperiodic => "aperiodic",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RatioEvidence {
    pub i: usize,
    pub j: usize,
    /// Power at which agreement was reached.
    pub n: u32,
    pub value: f64,
    /// Limit predicted by the left Perron vector, or the value at `n + period`
    /// for periodic matrices.
    pub reference: f64,
    pub period: u32,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Evidence {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigenvalue: Option<f64>,
    /// Minimal polynomial of the multiplier `ρ^d`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_poly: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_poly_degree: Option<usize>,
    /// `Res_x(P(x), y − x²)`, which the minimal polynomial must divide.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resultant: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio_trace: Option<RatioEvidence>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub digit_search_bound: Option<u32>,
    pub note: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct AperiodicityVerdict {
    pub method: Method,
    pub verdict: Verdict,
    pub evidence: Evidence,
}

const RATIO_TOL: f64 = 1e-6;
const RATIO_START: u32 = 40;
const RATIO_LIMIT: u32 = 4000;

fn int_poly(q: &[BigRational]) -> Option<IntPolynomial> {
    let c: Option<Vec<BigInt>> = q.iter().map(|x| x.is_integer().then(|| x.to_integer())).collect();
    IntPolynomial::new(c?).ok()
}

fn poly_string(q: &[BigRational]) -> String {
    match int_poly(q) {
        Some(p) => p.to_string(),
        None => q
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| format!("({c})*x^{k}"))
            .collect::<Vec<_>>()
            .join(" + "),
    }
}

/// Follows the ratio trace of entry `(i, i)` along powers that are
/// multiples of the period until it agrees with its reference.
fn corroborate(u: &PartitionMatrix, period: u32) -> Result<Option<RatioEvidence>> {
    let i = 0;
    let limit = if period == 1 {
        let n = u.size();
        let t = PartitionMatrix::new((0..n).map(|a| (0..n).map(|b| u.get(b, a)).collect()).collect())?;
        let left = dominant_eigen(&t)?;
        left.converged.then(|| left.eigenvector[i])
    } else {
        None
    };
    let step = u.to_big();
    let mut step_p = step.clone();
    for _ in 1..period {
        step_p = big_mul(&step_p, &step);
    }
    let mut n = RATIO_START.div_ceil(period) * period;
    let mut p = u.pow(n);
    while n <= RATIO_LIMIT {
        let value = ratio(&p, i, i);
        let next = big_mul(&p, &step_p);
        let reference = limit.unwrap_or_else(|| ratio(&next, i, i));
        if (value - reference).abs() < RATIO_TOL {
            return Ok(Some(RatioEvidence {
                i,
                j: i,
                n,
                value,
                reference,
                period,
            }));
        }
        p = next;
        n += period;
    }
    Ok(None)
}

/// The irrational-limit argument: if `ρ^d` has a minimal polynomial of
/// degree above 1, the limiting frequencies of tile types are irrational and
/// no periodic tiling exists. The ratio trace corroborates numerically.
pub fn aperiodicity_by_irrationality(rule: &RuleSystem) -> Result<AperiodicityVerdict> {
    let mut ev = Evidence::default();
    if rule.type_count() < 2 {
        ev.note = "the irrationality argument cannot be used with only one type of tile".into();
        return Ok(AperiodicityVerdict {
            method: Method::Inapplicable,
            verdict: Verdict::Inconclusive,
            evidence: ev,
        });
    }
    let u = rule.partition_matrix();
    let eig = dominant_eigen(&u)?;
    ev.eigenvalue = Some(eig.eigenvalue);
    let mult = rule.multiplier();
    let mp = mult.minimal_polynomial();
    ev.min_poly = Some(poly_string(&mp));
    ev.min_poly_degree = Some(mp.len() - 1);
    if let (Radix::Real(rho), 2) = (&rule.radix, rule.dimension) {
        if let Some(p) = int_poly(&rho.minimal_polynomial()) {
            let res = p.squared_roots();
            if let Some(m) = int_poly(&mp) {
                if !m.divides(&res) {
                    return Err(Error::Validation(format!(
                        "minimal polynomial {m} of ρ² does not divide the resultant {res}"
                    )));
                }
            }
            ev.resultant = Some(res.to_string());
        }
    }
    if (eig.eigenvalue - rule.multiplier_f64()).abs() > 1e-9 * eig.eigenvalue.max(1.0) {
        ev.note = format!(
            "dominant eigenvalue {} differs from the multiplier {}",
            eig.eigenvalue,
            rule.multiplier_f64()
        );
        return Ok(inconclusive(ev));
    }
    if mp.len() == 2 {
        ev.note = "the multiplier is rational; the irrationality argument does not apply".into();
        return Ok(inconclusive(ev));
    }
    let Some(per) = period(&u) else {
        ev.note = "the partition matrix is reducible; limiting ratios need not exist".into();
        return Ok(inconclusive(ev));
    };
    match corroborate(&u, per)? {
        Some(r) => {
            ev.ratio_trace = Some(r);
            ev.note = "the multiplier is irrational, so tile-type frequencies are irrational".into();
            Ok(AperiodicityVerdict {
                method: Method::Irrationality,
                verdict: Verdict::Aperiodic,
                evidence: ev,
            })
        }
        None => {
            ev.note = format!("ratio trace did not settle within {RATIO_TOL} by n = {RATIO_LIMIT}");
            Ok(inconclusive(ev))
        }
    }
}

fn inconclusive(evidence: Evidence) -> AperiodicityVerdict {
    AperiodicityVerdict {
        method: Method::Irrationality,
        verdict: Verdict::Inconclusive,
        evidence,
    }
}

/// The integer-gap argument for 1-D rules whose radix generates its field:
/// a period would put 2 in `Z[ρ]`. The search gives bounded evidence only.
pub fn aperiodicity_by_integer_gap(rule: &RuleSystem, max_degree: u32) -> Result<AperiodicityVerdict> {
    let mut ev = Evidence::default();
    let generator = FieldElement::generator(&rule.field);
    let applicable = rule.dimension == 1
        && matches!(&rule.radix, Radix::Real(r) if *r == generator)
        && rule.field.degree() > 1
        && (1.0..2.0).contains(&generator.to_f64());
    if !applicable {
        ev.note = "the integer-gap argument needs a 1-D rule whose radix is an irrational silver number".into();
        return Ok(AperiodicityVerdict {
            method: Method::Inapplicable,
            verdict: Verdict::Inconclusive,
            evidence: ev,
        });
    }
    let two = FieldElement::from_int(&rule.field, 2);
    ev.digit_search_bound = Some(max_degree);
    let witness = z_rho_member(&two, max_degree)?;
    let power = single_power_exponent(&two, max_degree);
    let verdict = if witness.is_none() && power.is_none() {
        ev.note = format!("no digit polynomial of degree ≤ {max_degree} equals 2, and 2 is no power of ρ");
        Verdict::Aperiodic
    } else {
        ev.note = "2 has a finite representation".into();
        Verdict::Inconclusive
    };
    Ok(AperiodicityVerdict {
        method: Method::IntegerGap,
        verdict,
        evidence: ev,
    })
}
