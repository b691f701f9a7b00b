//! Frobenius data of CM curves over small prime fields.
//!
//! A division field that equals a cyclotomic field, or has a known small
//! Galois group, forces congruence conditions on how the 2- and 3-torsion
//! splits modulo p. Sampling primes can refute such a prediction but never
//! prove it, and the verdict types say so.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Roots;
use serde::Serialize;
use thiserror::Error;

use crate::classifier::{is_perfect_cube, is_perfect_square, CurveInput};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("p = {0} must be a prime greater than 3")]
    SmallPrime(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("the curve has bad reduction at p = {0}")]
    BadReduction(u64),
    #[error("only explicit j = 0 and j = 1728 models can be reduced")]
    NoModel,
    #[error("torsion level must be 2 or 3, got {0}")]
    UnsupportedLevel(u64),
}

/// Factorization pattern of a separable cubic over F_p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CubicPattern {
    /// Three linear factors.
    OneOneOne,
    /// A linear and an irreducible quadratic factor.
    OneTwo,
    /// Irreducible.
    Three,
}

impl fmt::Display for CubicPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CubicPattern::OneOneOne => "1+1+1",
            CubicPattern::OneTwo => "1+2",
            CubicPattern::Three => "3",
        })
    }
}

/// y² = x³ + a·x + b reduced modulo a prime of good reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReducedCurve {
    a: i64,
    b: i64,
    p: u64,
}

impl ReducedCurve {
    pub fn new(a: i64, b: i64, p: u64) -> Result<Self, OracleError> {
        if p <= 3 {
            return Err(OracleError::SmallPrime(p));
        }
        if !primal::is_prime(p) {
            return Err(OracleError::NotPrime(p));
        }
        let c = ReducedCurve { a, b, p };
        let (a, b) = (c.a_mod(), c.b_mod());
        let disc = (4 * c.mul(c.mul(a, a), a) + 27 * c.mul(b, b)) % p;
        if disc == 0 {
            return Err(OracleError::BadReduction(p));
        }
        Ok(c)
    }

    pub fn from_curve(curve: &CurveInput, p: u64) -> Result<Self, OracleError> {
        let (a, b) = curve.weierstrass().ok_or(OracleError::NoModel)?;
        Self::new(a, b, p)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    fn a_mod(&self) -> u64 {
        self.a.rem_euclid(self.p as i64) as u64
    }

    fn b_mod(&self) -> u64 {
        self.b.rem_euclid(self.p as i64) as u64
    }

    fn mul(&self, x: u64, y: u64) -> u64 {
        x * y % self.p
    }

    /// x³ + a·x + b at x.
    pub fn cubic_at(&self, x: u64) -> u64 {
        let x2 = self.mul(x, x);
        (self.mul(x2, x) + self.mul(self.a_mod(), x) + self.b_mod()) % self.p
    }

    /// ψ₃(x) = 3x⁴ + 6a·x² + 12b·x − a², the 3-division polynomial.
    pub fn psi3_at(&self, x: u64) -> u64 {
        let p = self.p;
        let (a, b) = (self.a_mod(), self.b_mod());
        let x2 = self.mul(x, x);
        let x4 = self.mul(x2, x2);
        let pos = (3 * x4 + self.mul(6 * a % p, x2) + self.mul(12 * b % p, x)) % p;
        (pos + p - self.mul(a, a)) % p
    }

    fn cubic_roots(&self) -> usize {
        (0..self.p).filter(|&x| self.cubic_at(x) == 0).count()
    }

    pub fn cubic_pattern(&self) -> CubicPattern {
        // Good reduction makes the cubic separable, so 2 roots is impossible.
        match self.cubic_roots() {
            3 => CubicPattern::OneOneOne,
            1 => CubicPattern::OneTwo,
            _ => CubicPattern::Three,
        }
    }

    /// Number of points of E(F_p) of order dividing 3, the origin included.
    pub fn three_torsion_points(&self) -> usize {
        let mut count = 1;
        for x in 0..self.p {
            if self.psi3_at(x) != 0 {
                continue;
            }
            let v = self.cubic_at(x);
            if v == 0 {
                count += 1;
            } else if legendre(v, self.p) == 1 {
                count += 2;
            }
        }
        count
    }

    pub fn profile(&self) -> TorsionProfile {
        let pattern = self.cubic_pattern();
        let points = self.three_torsion_points();
        TorsionProfile {
            p: self.p,
            full_two_torsion: pattern == CubicPattern::OneOneOne,
            full_three_torsion: points == 9,
            three_torsion_points: points,
            cubic_pattern: pattern,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TorsionProfile {
    pub p: u64,
    pub full_two_torsion: bool,
    pub full_three_torsion: bool,
    pub three_torsion_points: usize,
    pub cubic_pattern: CubicPattern,
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// Legendre symbol by Euler's criterion: 1, -1, or 0 when p | v.
pub fn legendre(v: u64, p: u64) -> i32 {
    match pow_mod(v, (p - 1) / 2, p) {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

pub fn reduce_and_profile(curve: &CurveInput, p: u64) -> Result<TorsionProfile, OracleError> {
    Ok(ReducedCurve::from_curve(curve, p)?.profile())
}

/// Outcome of a sampling test against a prediction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum OracleVerdict {
    /// No prime up to the bound contradicts the prediction. Evidence only.
    Consistent {
        primes_tested: usize,
        skipped: Vec<u64>,
    },
    /// The prediction is false; `witness` is the first prime contradicting
    /// it, absent when the contradiction is a missing pattern overall.
    Refuted {
        witness: Option<u64>,
        reason: String,
    },
}

impl OracleVerdict {
    pub fn is_consistent(&self) -> bool {
        matches!(self, OracleVerdict::Consistent { .. })
    }
}

/// Good primes 3 < p ≤ p_max in increasing order, with the bad ones listed.
fn good_reductions(
    curve: &CurveInput,
    p_max: u64,
) -> Result<(Vec<ReducedCurve>, Vec<u64>), OracleError> {
    curve.weierstrass().ok_or(OracleError::NoModel)?;
    let mut good = Vec::new();
    let mut bad = Vec::new();
    for p in primal::Primes::all().take_while(|&p| p as u64 <= p_max) {
        let p = p as u64;
        if p <= 3 {
            continue;
        }
        match ReducedCurve::from_curve(curve, p) {
            Ok(c) => good.push(c),
            Err(OracleError::BadReduction(p)) => bad.push(p),
            Err(e) => return Err(e),
        }
    }
    Ok((good, bad))
}

/// Tests the hypothesis Q(E[ℓ]) = Q(ζ_ℓ) for ℓ ∈ {2, 3}.
///
/// For ℓ = 2 the hypothesis means every 2-torsion point is rational, so the
/// cubic must split completely modulo every good prime. For ℓ = 3 a prime
/// splits completely in Q(ζ₃) exactly when p ≡ 1 mod 3, so full 3-torsion
/// must occur for exactly those primes.
pub fn cyclotomic_consistency_test(
    curve: &CurveInput,
    ell: u64,
    p_max: u64,
) -> Result<OracleVerdict, OracleError> {
    if ell != 2 && ell != 3 {
        return Err(OracleError::UnsupportedLevel(ell));
    }
    let (good, skipped) = good_reductions(curve, p_max)?;
    for c in &good {
        let p = c.p();
        let refuted = if ell == 2 {
            (c.cubic_pattern() != CubicPattern::OneOneOne)
                .then(|| format!("2-torsion not rational mod {p}"))
        } else {
            let full = c.three_torsion_points() == 9;
            let split = p % 3 == 1;
            (full != split).then(|| {
                format!(
                    "p = {p} is {} mod 3 but 3-torsion is {}",
                    p % 3,
                    if full { "full" } else { "not full" }
                )
            })
        };
        if let Some(reason) = refuted {
            return Ok(OracleVerdict::Refuted {
                witness: Some(p),
                reason,
            });
        }
    }
    Ok(OracleVerdict::Consistent {
        primes_tested: good.len(),
        skipped,
    })
}

/// The 2-torsion Galois group a model predicts: trivial, order 2 or S3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TwoTorsionPrediction {
    Trivial,
    /// One rational root r; the quadratic cofactor has discriminant
    /// -3r² - 4a, which decides the split primes.
    Quadratic {
        root: i64,
    },
    S3,
}

/// Rational root of x³ + a·x + b for the two explicit models.
pub fn two_torsion_prediction(curve: &CurveInput) -> Option<TwoTorsionPrediction> {
    match *curve {
        CurveInput::J1728 { a } => {
            let splits = a.checked_neg().is_some_and(is_perfect_square);
            Some(if splits {
                TwoTorsionPrediction::Trivial
            } else {
                TwoTorsionPrediction::Quadratic { root: 0 }
            })
        }
        CurveInput::JZero { d } => Some(if is_perfect_cube(d) {
            TwoTorsionPrediction::Quadratic { root: -d.cbrt() }
        } else {
            TwoTorsionPrediction::S3
        }),
        CurveInput::GeneralCm(_) => None,
    }
}

/// Checks the splitting patterns mod p against a predicted 2-torsion group:
/// trivial allows only 1+1+1; order 2 never gives an irreducible cubic and
/// splits completely exactly when the quadratic cofactor does; S3 must show
/// every pattern.
pub fn two_torsion_structure_test(
    curve: &CurveInput,
    prediction: TwoTorsionPrediction,
    p_max: u64,
) -> Result<OracleVerdict, OracleError> {
    let (good, skipped) = good_reductions(curve, p_max)?;
    let (a, _) = curve.weierstrass().ok_or(OracleError::NoModel)?;
    let mut seen = BTreeMap::new();
    for c in &good {
        let p = c.p();
        let pattern = c.cubic_pattern();
        *seen.entry(pattern).or_insert(0usize) += 1;
        let fail = match prediction {
            TwoTorsionPrediction::Trivial => pattern != CubicPattern::OneOneOne,
            TwoTorsionPrediction::Quadratic { root } => {
                let disc = (-3 * (root as i128) * (root as i128) - 4 * a as i128)
                    .rem_euclid(p as i128) as u64;
                let expect = if legendre(disc, p) == 1 {
                    CubicPattern::OneOneOne
                } else {
                    CubicPattern::OneTwo
                };
                pattern != expect
            }
            TwoTorsionPrediction::S3 => false,
        };
        if fail {
            return Ok(OracleVerdict::Refuted {
                witness: Some(p),
                reason: format!("pattern {pattern} mod {p} contradicts {prediction:?}"),
            });
        }
    }
    if prediction == TwoTorsionPrediction::S3 {
        let missing: Vec<String> = [
            CubicPattern::OneOneOne,
            CubicPattern::OneTwo,
            CubicPattern::Three,
        ]
        .iter()
        .filter(|pat| !seen.contains_key(pat))
        .map(|pat| pat.to_string())
        .collect();
        if !missing.is_empty() {
            return Ok(OracleVerdict::Refuted {
                witness: None,
                reason: format!("patterns never observed: {}", missing.join(", ")),
            });
        }
    }
    Ok(OracleVerdict::Consistent {
        primes_tested: good.len(),
        skipped,
    })
}

/// Observed factorization patterns of x³ + d over good primes 3 < p ≤ p_max.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SplittingStatistics {
    pub d: i64,
    pub primes: usize,
    pub counts: BTreeMap<CubicPattern, usize>,
}

impl SplittingStatistics {
    pub fn count(&self, pattern: CubicPattern) -> usize {
        self.counts.get(&pattern).copied().unwrap_or(0)
    }

    pub fn frequency(&self, pattern: CubicPattern) -> f64 {
        if self.primes == 0 {
            return 0.0;
        }
        self.count(pattern) as f64 / self.primes as f64
    }
}

pub fn splitting_statistics(d: i64, p_max: u64) -> Result<SplittingStatistics, OracleError> {
    let curve = CurveInput::jzero(d).map_err(|_| OracleError::NoModel)?;
    let (good, _) = good_reductions(&curve, p_max)?;
    let mut counts = BTreeMap::new();
    for c in &good {
        *counts.entry(c.cubic_pattern()).or_insert(0) += 1;
    }
    Ok(SplittingStatistics {
        d,
        primes: good.len(),
        counts,
    })
}
