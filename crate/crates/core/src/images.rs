//! Finite-level reductions of the candidate ℓ-adic Galois images of CM curves.
//!
//! Every group is built either from an explicit generator list or, for the
//! set-builder subgroups, by enumerating members and validating closure.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::cartan::{
    c_eps, c_matrix, cartan_elements, normalizer_with, resolve_fraction, CartanError, CartanParams,
    Sign,
};
use crate::modmat::{
    group_closure, AbelianType, FiniteMatrixGroup, Mat2, ModMatError, Modulus, DEFAULT_CLOSURE_CAP,
};

/// Largest 3-power level accepted for the 3-adic families.
pub const MAX_THREE_LEVEL: u64 = 81;
/// Largest 2-power level accepted for the 2-adic families.
pub const MAX_TWO_LEVEL: u64 = 64;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ImageError {
    #[error("level {level} is not valid for {label}")]
    IncompatibleLevel { label: String, level: u64 },
    #[error("{label} needs {expected}")]
    MissingAdjoin {
        label: String,
        expected: &'static str,
    },
    #[error("{label} does not accept the adjoined element {adjoin}")]
    UnexpectedAdjoin { label: String, adjoin: String },
    #[error("listed lift {0} does not reduce to its class mod 4")]
    BadLift(String),
    #[error(transparent)]
    Cartan(#[from] CartanError),
    #[error(transparent)]
    Matrix(#[from] ModMatError),
}

/// The four elements of Γ′, named by their shape as integer matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum GammaPrime {
    /// diag(1, -1)
    DiagPosNeg,
    /// diag(-1, 1)
    DiagNegPos,
    /// [[0, 1], [1, 0]]
    SwapPos,
    /// [[0, -1], [-1, 0]]
    SwapNeg,
}

impl GammaPrime {
    pub const ALL: [GammaPrime; 4] = [
        GammaPrime::DiagPosNeg,
        GammaPrime::DiagNegPos,
        GammaPrime::SwapPos,
        GammaPrime::SwapNeg,
    ];
    /// The two anti-diagonal choices, the only ones available when j = 0.
    pub const SWAPS: [GammaPrime; 2] = [GammaPrime::SwapPos, GammaPrime::SwapNeg];

    pub fn entries(self) -> [i64; 4] {
        match self {
            GammaPrime::DiagPosNeg => [1, 0, 0, -1],
            GammaPrime::DiagNegPos => [-1, 0, 0, 1],
            GammaPrime::SwapPos => [0, 1, 1, 0],
            GammaPrime::SwapNeg => [0, -1, -1, 0],
        }
    }

    pub fn matrix(self, n: Modulus) -> Mat2 {
        Mat2::new(n, self.entries())
    }

    pub fn is_swap(self) -> bool {
        matches!(self, GammaPrime::SwapPos | GammaPrime::SwapNeg)
    }
}

impl fmt::Display for GammaPrime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.entries();
        write!(f, "[[{a},{b}],[{c},{d}]]")
    }
}

/// One of the sixteen listed mod-8 lifts of an element of Γ′.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GammaLift {
    pub base: GammaPrime,
    pub entries: [i64; 4],
}

impl GammaLift {
    pub fn matrix(&self, n: Modulus) -> Mat2 {
        Mat2::new(n, self.entries)
    }
}

impl fmt::Display for GammaLift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.entries;
        write!(f, "[[{a},{b}],[{c},{d}]] mod 8")
    }
}

const LIFTS_MOD8: [(GammaPrime, [i64; 4]); 16] = [
    (GammaPrime::DiagPosNeg, [5, 4, 4, 3]),
    (GammaPrime::DiagPosNeg, [1, 4, 4, 7]),
    (GammaPrime::DiagPosNeg, [5, 0, 0, 3]),
    (GammaPrime::DiagPosNeg, [1, 0, 0, 7]),
    (GammaPrime::DiagNegPos, [7, 4, 4, 1]),
    (GammaPrime::DiagNegPos, [7, 0, 0, 1]),
    (GammaPrime::DiagNegPos, [3, 0, 0, 5]),
    (GammaPrime::DiagNegPos, [3, 4, 4, 5]),
    (GammaPrime::SwapPos, [4, 1, 1, 4]),
    (GammaPrime::SwapPos, [0, 1, 1, 0]),
    (GammaPrime::SwapPos, [4, 5, 5, 4]),
    (GammaPrime::SwapPos, [0, 5, 5, 0]),
    (GammaPrime::SwapNeg, [4, 7, 7, 4]),
    (GammaPrime::SwapNeg, [0, 7, 7, 0]),
    (GammaPrime::SwapNeg, [0, 3, 3, 0]),
    (GammaPrime::SwapNeg, [4, 3, 3, 4]),
];

/// Γ′ together with the listed preimages Γ″ under reduction mod 8 → mod 4.
#[derive(Clone, Debug)]
pub struct GammaSet {
    pub gamma_prime: Vec<GammaPrime>,
    pub gamma_double_prime: Vec<GammaLift>,
}

pub fn gamma_lifts_mod8() -> Result<GammaSet, ImageError> {
    let four = Modulus::new(4)?;
    let eight = Modulus::new(8)?;
    let mut lifts = Vec::with_capacity(LIFTS_MOD8.len());
    for (base, entries) in LIFTS_MOD8 {
        let lift = GammaLift { base, entries };
        if lift.matrix(eight).reduce_to(four)? != base.matrix(four) {
            return Err(ImageError::BadLift(lift.to_string()));
        }
        lifts.push(lift);
    }
    Ok(GammaSet {
        gamma_prime: GammaPrime::ALL.to_vec(),
        gamma_double_prime: lifts,
    })
}

/// The extra generator adjoined to a family: c_ε, an element of Γ′, or one of
/// the listed mod-8 lifts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Adjoin {
    CEps(Sign),
    Gamma(GammaPrime),
    Lift(GammaLift),
}

impl Adjoin {
    fn gamma_base(&self) -> Option<GammaPrime> {
        match self {
            Adjoin::CEps(_) => None,
            Adjoin::Gamma(g) => Some(*g),
            Adjoin::Lift(l) => Some(l.base),
        }
    }
}

impl fmt::Display for Adjoin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Adjoin::CEps(s) => write!(f, "c_eps(eps={s})"),
            Adjoin::Gamma(g) => write!(f, "gamma' {g}"),
            Adjoin::Lift(l) => write!(f, "gamma'' {l}"),
        }
    }
}

/// The named candidate images.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ImageLabel {
    /// N_{δ′,0}(p), δ′ = -3/4, j = 0 and p > 3.
    P42Full {
        p: u64,
    },
    /// ⟨C_{δ′,0}(p)³, c₁⟩.
    P42Cubes {
        p: u64,
    },
    /// ⟨diag(a, b) with a/b a cube, [[0,1],[1,0]]⟩.
    P42Split {
        p: u64,
    },
    P43H1,
    P43H2,
    P43H3,
    P43H1P,
    P43H2P,
    P43H3P,
    P45H1 {
        eps: Sign,
        alpha: i64,
        delta: i64,
    },
    P45H2 {
        eps: Sign,
        alpha: i64,
        delta: i64,
    },
    P46G1,
    P46G2A,
    P46G2B,
    P46G4A,
    P46G4B,
    P46G4C,
    P46G4D,
    P48Index3,
    P48Full,
}

impl fmt::Display for ImageLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ImageLabel::P42Full { p } => write!(f, "P42_FULL({p})"),
            ImageLabel::P42Cubes { p } => write!(f, "P42_CUBES({p})"),
            ImageLabel::P42Split { p } => write!(f, "P42_SPLIT({p})"),
            ImageLabel::P43H1 => write!(f, "P43_H1"),
            ImageLabel::P43H2 => write!(f, "P43_H2"),
            ImageLabel::P43H3 => write!(f, "P43_H3"),
            ImageLabel::P43H1P => write!(f, "P43_H1P"),
            ImageLabel::P43H2P => write!(f, "P43_H2P"),
            ImageLabel::P43H3P => write!(f, "P43_H3P"),
            ImageLabel::P45H1 { eps, alpha, delta } => {
                write!(f, "P45_H1(eps={eps}, alpha={alpha}, delta={delta})")
            }
            ImageLabel::P45H2 { eps, alpha, delta } => {
                write!(f, "P45_H2(eps={eps}, alpha={alpha}, delta={delta})")
            }
            ImageLabel::P46G1 => write!(f, "P46_G1"),
            ImageLabel::P46G2A => write!(f, "P46_G2A"),
            ImageLabel::P46G2B => write!(f, "P46_G2B"),
            ImageLabel::P46G4A => write!(f, "P46_G4A"),
            ImageLabel::P46G4B => write!(f, "P46_G4B"),
            ImageLabel::P46G4C => write!(f, "P46_G4C"),
            ImageLabel::P46G4D => write!(f, "P46_G4D"),
            ImageLabel::P48Index3 => write!(f, "P48_INDEX3"),
            ImageLabel::P48Full => write!(f, "P48_FULL"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Family {
    GoodPrime,
    ThreeAdic,
    TwoAdicGeneral,
    TwoAdicJ1728,
    TwoAdicJ0,
}

impl ImageLabel {
    fn family(&self) -> Family {
        use ImageLabel::*;
        match self {
            P42Full { .. } | P42Cubes { .. } | P42Split { .. } => Family::GoodPrime,
            P43H1 | P43H2 | P43H3 | P43H1P | P43H2P | P43H3P => Family::ThreeAdic,
            P45H1 { .. } | P45H2 { .. } => Family::TwoAdicGeneral,
            P46G1 | P46G2A | P46G2B | P46G4A | P46G4B | P46G4C | P46G4D => Family::TwoAdicJ1728,
            P48Index3 | P48Full => Family::TwoAdicJ0,
        }
    }
}

/// A named image at a finite level with its adjoined generator, if any.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct NamedImage {
    pub label: ImageLabel,
    pub level: u64,
    pub adjoin: Option<Adjoin>,
}

impl NamedImage {
    pub fn new(label: ImageLabel, level: u64, adjoin: Option<Adjoin>) -> Self {
        NamedImage {
            label,
            level,
            adjoin,
        }
    }
}

impl fmt::Display for NamedImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at level {}", self.label, self.level)?;
        if let Some(a) = &self.adjoin {
            write!(f, " with {a}")?;
        }
        Ok(())
    }
}

fn is_power_of(level: u64, prime: u64, max: u64) -> bool {
    let mut x = level;
    if x < prime || x > max {
        return false;
    }
    while x.is_multiple_of(prime) {
        x /= prime;
    }
    x == 1
}

fn validate(image: &NamedImage) -> Result<Modulus, ImageError> {
    let label = image.label.to_string();
    let level_ok = match image.label {
        ImageLabel::P42Full { p } | ImageLabel::P42Cubes { p } | ImageLabel::P42Split { p } => {
            p > 3 && primal::is_prime(p) && image.level == p
        }
        _ => match image.label.family() {
            Family::ThreeAdic => is_power_of(image.level, 3, MAX_THREE_LEVEL),
            _ => is_power_of(image.level, 2, MAX_TWO_LEVEL),
        },
    };
    if !level_ok {
        return Err(ImageError::IncompatibleLevel {
            label,
            level: image.level,
        });
    }
    if let Some(Adjoin::Lift(_)) = image.adjoin {
        if 8 % image.level != 0 {
            return Err(ImageError::IncompatibleLevel {
                label,
                level: image.level,
            });
        }
    }
    let unexpected = |a: &Adjoin| ImageError::UnexpectedAdjoin {
        label: label.clone(),
        adjoin: a.to_string(),
    };
    match (image.label.family(), &image.adjoin) {
        (Family::GoodPrime, None) | (Family::TwoAdicGeneral, None) => {}
        (Family::GoodPrime, Some(a @ Adjoin::CEps(_))) => {
            if matches!(image.label, ImageLabel::P42Split { .. }) {
                return Err(unexpected(a));
            }
        }
        (Family::ThreeAdic, Some(Adjoin::CEps(_))) => {}
        (Family::ThreeAdic, None) => {
            return Err(ImageError::MissingAdjoin {
                label,
                expected: "c_eps",
            })
        }
        (Family::TwoAdicJ1728, Some(a)) if a.gamma_base().is_some() => {}
        (Family::TwoAdicJ0, Some(a)) if a.gamma_base().is_some_and(GammaPrime::is_swap) => {}
        (Family::TwoAdicJ1728 | Family::TwoAdicJ0, None) => {
            return Err(ImageError::MissingAdjoin {
                label,
                expected: "a gamma' or gamma'' choice",
            })
        }
        (_, Some(a)) => return Err(unexpected(a)),
    }
    Ok(Modulus::new(image.level)?)
}

fn rat_matrix(n: Modulus, entries: [(i64, i64); 4]) -> Result<Mat2, ImageError> {
    let mut out = [0i64; 4];
    for (slot, (num, den)) in out.iter_mut().zip(entries) {
        *slot = resolve_fraction(num, den, n)? as i64;
    }
    Ok(Mat2::new(n, out))
}

fn generated(n: Modulus, gens: &[Mat2]) -> Result<FiniteMatrixGroup, ImageError> {
    Ok(group_closure(n, gens, DEFAULT_CLOSURE_CAP)?)
}

fn with_extra(
    n: Modulus,
    base: &FiniteMatrixGroup,
    extra: Option<Mat2>,
) -> Result<FiniteMatrixGroup, ImageError> {
    let mut gens = base.generators().to_vec();
    gens.extend(extra);
    generated(n, &gens)
}

/// δ′ = -3/4, the parameter used for j = 0 at odd primes.
pub fn delta_prime_jzero() -> CartanParams {
    CartanParams::with_fraction(-3, 4, 0).expect("positive denominator")
}

fn adjoined_matrix(adjoin: Option<Adjoin>, p: &CartanParams, n: Modulus) -> Option<Mat2> {
    adjoin.map(|a| match a {
        Adjoin::CEps(s) => c_eps(s, p, n),
        Adjoin::Gamma(g) => g.matrix(n),
        Adjoin::Lift(l) => l.matrix(n),
    })
}

/// Builds the named image as a finite matrix group at its level.
pub fn build_named(image: &NamedImage) -> Result<FiniteMatrixGroup, ImageError> {
    use ImageLabel::*;
    let n = validate(image)?;
    let jzero = delta_prime_jzero();
    let gaussian = CartanParams::new(-1, 0);
    let eisenstein = CartanParams::new(-1, 1);

    match image.label {
        P42Full { .. } => {
            let extra = adjoined_matrix(image.adjoin, &jzero, n)
                .unwrap_or_else(|| c_eps(Sign::Plus, &jzero, n));
            Ok(normalizer_with(&jzero, n, extra)?)
        }
        P42Cubes { .. } => {
            let cubes = FiniteMatrixGroup::from_elements(
                n,
                cartan_elements(&jzero, n)?.iter().map(|x| x.pow(3)),
            )?;
            let extra = adjoined_matrix(image.adjoin, &jzero, n)
                .unwrap_or_else(|| c_eps(Sign::Plus, &jzero, n));
            with_extra(n, &cubes, Some(extra))
        }
        P42Split { .. } => {
            let units: Vec<i64> = (1..n.get() as i64).filter(|&u| n.is_unit(u)).collect();
            let cubes: Vec<u64> = units.iter().map(|&u| n.reduce(u * u * u)).collect();
            let mut diag = Vec::new();
            for &a in &units {
                for &b in &units {
                    let ratio = n.reduce(a * n.inverse(b).expect("unit") as i64);
                    if cubes.contains(&ratio) {
                        diag.push(Mat2::new(n, [a, 0, 0, b]));
                    }
                }
            }
            let split = FiniteMatrixGroup::from_elements(n, diag)?;
            with_extra(n, &split, Some(GammaPrime::SwapPos.matrix(n)))
        }
        P43H1 | P43H1P => {
            let strict = matches!(image.label, P43H1P);
            let mut members = Vec::new();
            for a in 0..n.get() as i64 {
                let a_ok = if strict { a % 3 == 1 } else { a % 3 != 0 };
                if !a_ok {
                    continue;
                }
                for b in (0..n.get() as i64).step_by(3) {
                    members.push(c_matrix(a, b, &jzero, n)?);
                }
            }
            let h = FiniteMatrixGroup::from_elements(n, members)?;
            with_extra(n, &h, adjoined_matrix(image.adjoin, &jzero, n))
        }
        P43H2 | P43H2P | P43H3 | P43H3P => {
            let scalar = if matches!(image.label, P43H2 | P43H3) {
                2
            } else {
                4
            };
            let second = if matches!(image.label, P43H2 | P43H2P) {
                rat_matrix(n, [(1, 1), (1, 1), (-3, 4), (1, 1)])?
            } else {
                rat_matrix(n, [(-5, 4), (1, 2), (-3, 8), (-5, 4)])?
            };
            let mut gens = vec![Mat2::scalar(n, scalar), second];
            gens.extend(adjoined_matrix(image.adjoin, &jzero, n));
            generated(n, &gens)
        }
        P45H1 { eps, alpha, delta } | P45H2 { eps, alpha, delta } => {
            let e = eps.value();
            let cartan_gen = if matches!(image.label, P45H1 { .. }) {
                Mat2::new(n, [1, 1, delta, 1])
            } else {
                Mat2::new(n, [-1, -1, -delta, -1])
            };
            generated(
                n,
                &[
                    Mat2::new(n, [e, 0, 0, -e]),
                    Mat2::scalar(n, alpha),
                    cartan_gen,
                ],
            )
        }
        P46G1 => {
            let c = FiniteMatrixGroup::from_elements(n, cartan_elements(&gaussian, n)?)?;
            with_extra(n, &c, adjoined_matrix(image.adjoin, &gaussian, n))
        }
        P46G2A | P46G2B | P46G4A | P46G4B | P46G4C | P46G4D => {
            let mut gens = match image.label {
                P46G2A => vec![
                    Mat2::scalar(n, -1),
                    Mat2::scalar(n, 3),
                    Mat2::new(n, [1, 2, -2, 1]),
                ],
                P46G2B => vec![
                    Mat2::scalar(n, -1),
                    Mat2::scalar(n, 3),
                    Mat2::new(n, [2, 1, -1, 2]),
                ],
                P46G4A => vec![Mat2::scalar(n, 5), Mat2::new(n, [1, 2, -2, 1])],
                P46G4B => vec![Mat2::scalar(n, 5), Mat2::new(n, [-1, -2, 2, -1])],
                P46G4C => vec![Mat2::scalar(n, -3), Mat2::new(n, [2, -1, 1, 2])],
                _ => vec![Mat2::scalar(n, -3), Mat2::new(n, [-2, 1, -1, -2])],
            };
            gens.extend(adjoined_matrix(image.adjoin, &gaussian, n));
            generated(n, &gens)
        }
        P48Index3 | P48Full => {
            let last = if matches!(image.label, P48Index3) {
                Mat2::new(n, [3, 6, -6, -3])
            } else {
                Mat2::new(n, [2, 1, -1, 1])
            };
            let mut gens = vec![Mat2::scalar(n, -1), Mat2::new(n, [7, 4, -4, 3]), last];
            gens.extend(adjoined_matrix(image.adjoin, &eisenstein, n));
            generated(n, &gens)
        }
    }
}

/// Abelian verdict of one image at one level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelVerdict {
    pub level: u64,
    pub order: usize,
    pub abelian: bool,
    pub invariants: Option<AbelianType>,
}

pub fn verdict_of(level: u64, g: &FiniteMatrixGroup) -> LevelVerdict {
    let invariants = g.abelian_invariants().ok();
    LevelVerdict {
        level,
        order: g.order(),
        abelian: invariants.is_some(),
        invariants,
    }
}

pub fn enumerate_verdicts(
    label: ImageLabel,
    adjoin: Option<Adjoin>,
    levels: &[u64],
) -> Result<Vec<LevelVerdict>, ImageError> {
    levels
        .iter()
        .map(|&level| {
            let g = build_named(&NamedImage::new(label, level, adjoin))?;
            Ok(verdict_of(level, &g))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::normalizer_group;

    fn build(label: ImageLabel, level: u64, adjoin: Option<Adjoin>) -> FiniteMatrixGroup {
        build_named(&NamedImage::new(label, level, adjoin)).unwrap()
    }

    #[test]
    fn lifts_are_listed_and_reduce_correctly() {
        let set = gamma_lifts_mod8().unwrap();
        assert_eq!(set.gamma_double_prime.len(), 16);
        assert_eq!(set.gamma_prime.len(), 4);
        assert!(set
            .gamma_double_prime
            .iter()
            .any(|l| l.base == GammaPrime::DiagPosNeg && l.entries == [5, 4, 4, 3]));
        for g in GammaPrime::ALL {
            assert_eq!(
                set.gamma_double_prime
                    .iter()
                    .filter(|l| l.base == g)
                    .count(),
                4
            );
        }
    }

    #[test]
    fn lifts_are_exactly_the_preimages_inside_the_normalizer() {
        // Independent derivation: filter N_{-1,0}(8) by reduction mod 4.
        let eight = Modulus::new(8).unwrap();
        let four = Modulus::new(4).unwrap();
        let normalizer = normalizer_group(&CartanParams::new(-1, 0), eight).unwrap();
        let set = gamma_lifts_mod8().unwrap();
        for g in GammaPrime::ALL {
            let mut brute: Vec<u64> = normalizer
                .elements()
                .filter(|m| m.reduce_to(four).unwrap() == g.matrix(four))
                .map(|m| m.code())
                .collect();
            let mut listed: Vec<u64> = set
                .gamma_double_prime
                .iter()
                .filter(|l| l.base == g)
                .map(|l| l.matrix(eight).code())
                .collect();
            brute.sort_unstable();
            listed.sort_unstable();
            assert_eq!(brute, listed, "preimages of {g}");
        }
    }

    #[test]
    fn level_validation() {
        let bad = [
            NamedImage::new(ImageLabel::P43H1, 4, Some(Adjoin::CEps(Sign::Plus))),
            NamedImage::new(ImageLabel::P43H1, 243, Some(Adjoin::CEps(Sign::Plus))),
            NamedImage::new(
                ImageLabel::P46G1,
                6,
                Some(Adjoin::Gamma(GammaPrime::SwapPos)),
            ),
            NamedImage::new(ImageLabel::P42Full { p: 7 }, 5, None),
            NamedImage::new(ImageLabel::P42Full { p: 9 }, 9, None),
            NamedImage::new(ImageLabel::P42Full { p: 3 }, 3, None),
        ];
        for img in bad {
            assert!(
                matches!(build_named(&img), Err(ImageError::IncompatibleLevel { .. })),
                "{img}"
            );
        }
        let lift = gamma_lifts_mod8().unwrap().gamma_double_prime[0];
        let at16 = NamedImage::new(ImageLabel::P46G2A, 16, Some(Adjoin::Lift(lift)));
        assert!(matches!(
            build_named(&at16),
            Err(ImageError::IncompatibleLevel { .. })
        ));
    }

    #[test]
    fn adjoin_validation() {
        let missing = NamedImage::new(ImageLabel::P46G2A, 4, None);
        assert!(matches!(
            build_named(&missing),
            Err(ImageError::MissingAdjoin { .. })
        ));
        let missing = NamedImage::new(ImageLabel::P43H2, 3, None);
        assert!(matches!(
            build_named(&missing),
            Err(ImageError::MissingAdjoin { .. })
        ));
        let diag_for_j0 = NamedImage::new(
            ImageLabel::P48Index3,
            4,
            Some(Adjoin::Gamma(GammaPrime::DiagPosNeg)),
        );
        assert!(matches!(
            build_named(&diag_for_j0),
            Err(ImageError::UnexpectedAdjoin { .. })
        ));
        let ceps_for_split = NamedImage::new(
            ImageLabel::P42Split { p: 7 },
            7,
            Some(Adjoin::CEps(Sign::Plus)),
        );
        assert!(matches!(
            build_named(&ceps_for_split),
            Err(ImageError::UnexpectedAdjoin { .. })
        ));
    }

    #[test]
    fn h1_at_levels_three_and_nine() {
        for e in Sign::BOTH {
            let g3 = build(ImageLabel::P43H1, 3, Some(Adjoin::CEps(e)));
            assert_eq!(g3.abelian_invariants().unwrap().factors(), &[2, 2]);
            let g9 = build(ImageLabel::P43H1, 9, Some(Adjoin::CEps(e)));
            assert!(!g9.is_abelian());
        }
    }

    #[test]
    fn g2a_mod_4_is_elementary_abelian_of_rank_three() {
        for g in GammaPrime::ALL {
            let grp = build(ImageLabel::P46G2A, 4, Some(Adjoin::Gamma(g)));
            assert_eq!(
                grp.abelian_invariants().unwrap(),
                AbelianType::elementary_two(3)
            );
            let low = build(ImageLabel::P46G2A, 8, Some(Adjoin::Gamma(g)))
                .project(2)
                .unwrap();
            assert!(low.order() <= 2);
        }
    }

    #[test]
    fn index3_and_g4c_verdicts() {
        for g in GammaPrime::SWAPS {
            let v =
                enumerate_verdicts(ImageLabel::P48Index3, Some(Adjoin::Gamma(g)), &[2, 4]).unwrap();
            assert_eq!(v[0].invariants, Some(AbelianType::elementary_two(1)));
            assert!(!v[1].abelian);
        }
        for g in GammaPrime::ALL {
            let v =
                enumerate_verdicts(ImageLabel::P46G4C, Some(Adjoin::Gamma(g)), &[2, 4]).unwrap();
            assert_eq!(v[0].invariants, Some(AbelianType::elementary_two(1)));
            assert!(!v[1].abelian);
        }
    }

    #[test]
    fn split_family_at_seven_is_non_abelian() {
        let v = enumerate_verdicts(ImageLabel::P42Split { p: 7 }, None, &[7]).unwrap();
        assert!(!v[0].abelian);
    }

    #[test]
    fn cube_of_the_basic_cartan_element() {
        // c(0,1)³ = c(0,δ′), since c(0,1)² = δ′·Id.
        let p = delta_prime_jzero();
        for q in [5u64, 7, 11, 13, 17] {
            let n = Modulus::new(q).unwrap();
            let x = c_matrix(0, 1, &p, n).unwrap();
            let delta = p.delta_mod(n).unwrap() as i64;
            assert_eq!(x.pow(3), c_matrix(0, delta, &p, n).unwrap());
            let cubes = build(ImageLabel::P42Cubes { p: q }, q, None);
            assert!(cubes.contains(&x.pow(3)));
        }
    }

    #[test]
    fn p45_reduces_to_upper_unipotent_mod_2() {
        let two = Modulus::new(2).unwrap();
        let expected =
            crate::modmat::group_closure(two, &[Mat2::new(two, [1, 1, 0, 1])], 10).unwrap();
        for eps in Sign::BOTH {
            for alpha in [3, 5] {
                for delta in [-4, -16] {
                    for label in [
                        ImageLabel::P45H1 { eps, alpha, delta },
                        ImageLabel::P45H2 { eps, alpha, delta },
                    ] {
                        assert_eq!(
                            build(label, 8, None).project(2).unwrap(),
                            expected,
                            "{label}"
                        );
                        assert_eq!(build(label, 2, None), expected);
                    }
                }
            }
        }
    }

    #[test]
    fn full_j0_image_is_the_normalizer() {
        for level in [2, 4, 8, 16] {
            let n = Modulus::new(level).unwrap();
            let normalizer = normalizer_group(&CartanParams::new(-1, 1), n).unwrap();
            for g in GammaPrime::SWAPS {
                assert_eq!(
                    build(ImageLabel::P48Full, level, Some(Adjoin::Gamma(g))),
                    normalizer
                );
            }
        }
    }

    #[test]
    fn index3_matches_its_set_builder_description() {
        // ⟨γ′, c_{-1,1}(a,b) with a odd and b even⟩.
        let p = CartanParams::new(-1, 1);
        for level in [2u64, 4, 8, 16] {
            let n = Modulus::new(level).unwrap();
            let members: Vec<Mat2> = (0..level as i64)
                .filter(|a| a % 2 == 1)
                .flat_map(|a| (0..level as i64).step_by(2).map(move |b| (a, b)))
                .map(|(a, b)| c_matrix(a, b, &p, n).unwrap())
                .collect();
            let h = FiniteMatrixGroup::from_elements(n, members).unwrap();
            for g in GammaPrime::SWAPS {
                let mut gens = h.generators().to_vec();
                gens.push(g.matrix(n));
                let expected = group_closure(n, &gens, DEFAULT_CLOSURE_CAP).unwrap();
                assert_eq!(
                    build(ImageLabel::P48Index3, level, Some(Adjoin::Gamma(g))),
                    expected
                );
            }
        }
    }
}
