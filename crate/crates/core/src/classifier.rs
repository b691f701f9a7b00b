//! Closed-form decision of when the N-division field of a CM curve is abelian.
//!
//! Curves with j = 1728 are taken in the model y² = x³ + A·x and curves with
//! j = 0 in the model y² = x³ + d. Every other CM curve is described only by
//! its order, since the answer depends on nothing else.

use std::fmt;

use num_integer::Roots;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::cartan::{CartanError, CmOrder};
use crate::modmat::AbelianType;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ClassifierError {
    #[error("coefficient must be nonzero (the curve would be singular)")]
    SingularCurve,
    #[error("order ({disc}, {conductor}) has j = 0 or 1728; use the explicit model")]
    SpecialJInvariant { disc: i64, conductor: u64 },
    #[error("level must be at least 1")]
    ZeroLevel,
    #[error("argument must be nonzero")]
    ZeroArgument,
    #[error(transparent)]
    Order(#[from] CartanError),
}

/// A CM elliptic curve defined over Q(j).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CurveInput {
    /// y² = x³ + d
    JZero { d: i64 },
    /// y² = x³ + A·x
    J1728 { a: i64 },
    /// Any curve with CM by the given order, j ∉ {0, 1728}.
    GeneralCm(CmOrder),
}

impl CurveInput {
    pub fn jzero(d: i64) -> Result<Self, ClassifierError> {
        if d == 0 {
            return Err(ClassifierError::SingularCurve);
        }
        Ok(CurveInput::JZero { d })
    }

    pub fn j1728(a: i64) -> Result<Self, ClassifierError> {
        if a == 0 {
            return Err(ClassifierError::SingularCurve);
        }
        Ok(CurveInput::J1728 { a })
    }

    pub fn general_cm(disc: i64, conductor: u64) -> Result<Self, ClassifierError> {
        let order = CmOrder::new(disc, conductor)?;
        if conductor == 1 && (disc == -3 || disc == -4) {
            return Err(ClassifierError::SpecialJInvariant { disc, conductor });
        }
        Ok(CurveInput::GeneralCm(order))
    }

    /// Short Weierstrass coefficients (a, b) of y² = x³ + a·x + b, if the
    /// input is an explicit model.
    pub fn weierstrass(&self) -> Option<(i64, i64)> {
        match *self {
            CurveInput::JZero { d } => Some((0, d)),
            CurveInput::J1728 { a } => Some((a, 0)),
            CurveInput::GeneralCm(_) => None,
        }
    }
}

impl fmt::Display for CurveInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveInput::JZero { d } => write!(f, "y^2 = x^3 + {d}"),
            CurveInput::J1728 { a } => write!(f, "y^2 = x^3 + {a}x"),
            CurveInput::GeneralCm(o) => {
                write!(
                    f,
                    "CM by order (disc {}, conductor {})",
                    o.field_discriminant(),
                    o.conductor()
                )
            }
        }
    }
}

/// Isomorphism type of Gal(Q(j, E[N]) / Q(j)) as far as it is determined.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupStructure {
    Abelian(AbelianType),
    S3,
    D4,
    D4TimesC2,
    /// Non-abelian of a type the classification does not pin down.
    NonAbelian,
}

impl GroupStructure {
    pub fn is_abelian(&self) -> bool {
        matches!(self, GroupStructure::Abelian(_))
    }

    /// Short machine-readable name, also used by the fixture table.
    pub fn code(&self) -> String {
        match self {
            GroupStructure::Abelian(t) if t.is_trivial() => "trivial".to_string(),
            GroupStructure::Abelian(t) => t
                .factors()
                .iter()
                .map(u64::to_string)
                .collect::<Vec<_>>()
                .join(","),
            GroupStructure::S3 => "S3".to_string(),
            GroupStructure::D4 => "D4".to_string(),
            GroupStructure::D4TimesC2 => "D4xC2".to_string(),
            GroupStructure::NonAbelian => "nonabelian".to_string(),
        }
    }
}

impl fmt::Display for GroupStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupStructure::Abelian(t) => write!(f, "{t}"),
            GroupStructure::S3 => write!(f, "S3"),
            GroupStructure::D4 => write!(f, "D4"),
            GroupStructure::D4TimesC2 => write!(f, "D4 x Z/2Z"),
            GroupStructure::NonAbelian => write!(f, "non-abelian (unspecified)"),
        }
    }
}

/// Abelian structures serialize as their invariant factors, the rest as a
/// descriptive string.
impl Serialize for GroupStructure {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            GroupStructure::Abelian(t) => t.serialize(s),
            other => s.serialize_str(&other.code()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassificationResult {
    pub n: u64,
    pub abelian: bool,
    pub structure: GroupStructure,
    pub cyclotomic: bool,
}

pub fn is_perfect_square(m: i64) -> bool {
    m >= 0 && m.sqrt().pow(2) == m
}

pub fn is_perfect_cube(m: i64) -> bool {
    let r = m.cbrt();
    r.checked_pow(3) == Some(m)
}

/// Removes every fourth-power factor: the representative of the quartic
/// twist class of y² = x³ + s·x.
pub fn fourth_power_free(s: i64) -> Result<i64, ClassifierError> {
    if s == 0 {
        return Err(ClassifierError::ZeroArgument);
    }
    Ok(strip_powers(s, 4))
}

/// Removes every square factor, keeping the sign.
pub fn squarefree_part(t: i64) -> Result<i64, ClassifierError> {
    if t == 0 {
        return Err(ClassifierError::ZeroArgument);
    }
    Ok(strip_powers(t, 2))
}

fn strip_powers(m: i64, k: u32) -> i64 {
    let sign = m.signum();
    let mut rest = m.unsigned_abs();
    let mut out: u64 = 1;
    let mut p: u64 = 2;
    while p.checked_pow(k).is_some_and(|q| q <= rest) {
        let mut e = 0;
        while rest.is_multiple_of(p) {
            rest /= p;
            e += 1;
        }
        out *= p.pow(e % k);
        p += 1;
    }
    out *= rest;
    sign * out as i64
}

fn two(k: usize) -> GroupStructure {
    GroupStructure::Abelian(AbelianType::elementary_two(k))
}

fn level_two(curve: &CurveInput) -> GroupStructure {
    match *curve {
        CurveInput::GeneralCm(order) => {
            let disc = order.field_discriminant();
            let f = order.conductor();
            let abelian =
                order.discriminant().rem_euclid(4) == 0 || (disc.rem_euclid(8) == 1 && f % 2 == 1);
            if abelian {
                two(1)
            } else {
                GroupStructure::S3
            }
        }
        CurveInput::J1728 { a } => {
            if a.checked_neg().is_some_and(is_perfect_square) {
                two(0)
            } else {
                two(1)
            }
        }
        CurveInput::JZero { d } => {
            if is_perfect_cube(d) {
                two(1)
            } else {
                GroupStructure::S3
            }
        }
    }
}

fn level_three(curve: &CurveInput) -> GroupStructure {
    match *curve {
        CurveInput::JZero { d } if d.checked_mul(-4).is_some_and(is_perfect_cube) => {
            if is_perfect_square(d) || d.checked_mul(-3).is_some_and(is_perfect_square) {
                two(1)
            } else {
                two(2)
            }
        }
        _ => GroupStructure::NonAbelian,
    }
}

fn level_four(curve: &CurveInput) -> GroupStructure {
    let CurveInput::J1728 { a } = *curve else {
        return GroupStructure::NonAbelian;
    };
    let s = strip_powers(a, 4).unsigned_abs() as i64;
    if is_perfect_square(s) {
        if s == 1 || s == 4 {
            two(2)
        } else {
            two(3)
        }
    } else if s % 2 == 0 && is_perfect_square(s / 2) {
        GroupStructure::D4
    } else {
        GroupStructure::D4TimesC2
    }
}

/// Gal(Q(j, E[n]) / Q(j)) for a CM curve: abelian verdict, structure and
/// whether the division field is Q(j, ζ_n).
pub fn classify(curve: &CurveInput, n: u64) -> Result<ClassificationResult, ClassifierError> {
    let structure = match n {
        0 => return Err(ClassifierError::ZeroLevel),
        1 => two(0),
        2 => level_two(curve),
        3 => level_three(curve),
        4 => level_four(curve),
        _ => GroupStructure::NonAbelian,
    };
    Ok(ClassificationResult {
        n,
        abelian: structure.is_abelian(),
        structure,
        cyclotomic: is_cyclotomic(curve, n)?,
    })
}

/// Whether Q(j, E[n]) = Q(j, ζ_n).
pub fn is_cyclotomic(curve: &CurveInput, n: u64) -> Result<bool, ClassifierError> {
    Ok(match (n, *curve) {
        (0, _) => return Err(ClassifierError::ZeroLevel),
        (1, _) => true,
        (2, CurveInput::J1728 { a }) => a.checked_neg().is_some_and(is_perfect_square),
        (3, CurveInput::JZero { d }) => {
            (is_perfect_square(d) || d.checked_mul(-3).is_some_and(is_perfect_square))
                && d.checked_mul(-4).is_some_and(is_perfect_cube)
        }
        _ => false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn structure(curve: CurveInput, n: u64) -> GroupStructure {
        classify(&curve, n).unwrap().structure
    }

    #[test]
    fn squares_and_cubes() {
        assert!(is_perfect_square(16));
        assert!(is_perfect_square(0));
        assert!(!is_perfect_square(-4));
        assert!(is_perfect_square(-3 * -27));
        assert!(is_perfect_cube(-8));
        assert!(is_perfect_cube(-64));
        assert!(!is_perfect_cube(4));
        assert!(is_perfect_cube(0));
        assert!(!is_perfect_cube(i64::MAX));
    }

    #[test]
    fn power_free_parts() {
        assert_eq!(fourth_power_free(16).unwrap(), 1);
        assert_eq!(fourth_power_free(9).unwrap(), 9);
        assert_eq!(fourth_power_free(48).unwrap(), 3);
        assert_eq!(fourth_power_free(-32).unwrap(), -2);
        assert_eq!(squarefree_part(12).unwrap(), 3);
        assert_eq!(squarefree_part(-9).unwrap(), -1);
        assert_eq!(squarefree_part(1).unwrap(), 1);
        assert!(fourth_power_free(0).is_err());
        assert!(squarefree_part(0).is_err());
    }

    #[test]
    fn singular_and_special_inputs_rejected() {
        assert_eq!(CurveInput::jzero(0), Err(ClassifierError::SingularCurve));
        assert_eq!(CurveInput::j1728(0), Err(ClassifierError::SingularCurve));
        assert!(matches!(
            CurveInput::general_cm(-3, 1),
            Err(ClassifierError::SpecialJInvariant { .. })
        ));
        assert!(matches!(
            CurveInput::general_cm(-12, 1),
            Err(ClassifierError::Order(_))
        ));
        assert!(CurveInput::general_cm(-3, 2).is_ok());
        assert!(classify(&CurveInput::jzero(1).unwrap(), 0).is_err());
    }

    #[test]
    fn worked_examples() {
        let j1728 = |a| CurveInput::j1728(a).unwrap();
        let jzero = |d| CurveInput::jzero(d).unwrap();
        let cm = |d, f| CurveInput::general_cm(d, f).unwrap();

        assert_eq!(structure(j1728(-1), 2), two(0));
        assert_eq!(structure(jzero(2), 3), two(2));
        assert_eq!(structure(j1728(9), 4), two(3));
        assert_eq!(structure(cm(-7, 1), 2), two(1));
        assert_eq!(structure(cm(-4, 4), 2), two(1));
        assert_eq!(structure(cm(-3, 2), 2), two(1));
        assert_eq!(structure(cm(-11, 1), 2), GroupStructure::S3);
        assert_eq!(structure(jzero(2), 2), GroupStructure::S3);
        assert!(!classify(&jzero(1), 6).unwrap().abelian);
    }

    #[test]
    fn level_four_descriptors() {
        let j1728 = |a| CurveInput::j1728(a).unwrap();
        assert_eq!(structure(j1728(-4), 4), two(2));
        assert_eq!(structure(j1728(64), 4), two(2));
        assert_eq!(structure(j1728(-36), 4), two(3));
        assert_eq!(structure(j1728(2), 4), GroupStructure::D4);
        assert_eq!(structure(j1728(-18), 4), GroupStructure::D4);
        assert_eq!(structure(j1728(3), 4), GroupStructure::D4TimesC2);
        assert_eq!(structure(j1728(-12), 4), GroupStructure::D4TimesC2);
    }

    #[test]
    fn cyclotomic_cases() {
        assert!(is_cyclotomic(&CurveInput::jzero(16).unwrap(), 3).unwrap());
        assert!(is_cyclotomic(&CurveInput::j1728(-1).unwrap(), 2).unwrap());
        assert!(is_cyclotomic(&CurveInput::j1728(-49).unwrap(), 2).unwrap());
        assert!(!is_cyclotomic(&CurveInput::jzero(2).unwrap(), 3).unwrap());
        assert!(!is_cyclotomic(&CurveInput::j1728(-1).unwrap(), 4).unwrap());
    }

    #[test]
    fn structure_serialization() {
        let json = |s: GroupStructure| serde_json::to_string(&s).unwrap();
        assert_eq!(json(two(1)), "[2]");
        assert_eq!(json(two(0)), "[]");
        assert_eq!(json(GroupStructure::S3), "\"S3\"");
        assert_eq!(two(3).code(), "2,2,2");
        assert_eq!(two(0).code(), "trivial");
    }
}
