//! CM orders, their Cartan parameters (δ, φ), and the groups C_{δ,φ}(N) and
//! N_{δ,φ}(N) inside GL(2, Z/NZ).

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::modmat::{
    group_closure, FiniteMatrixGroup, Mat2, ModMatError, Modulus, DEFAULT_CLOSURE_CAP,
};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum CartanError {
    #[error("{0} is not a negative fundamental discriminant")]
    NotFundamental(i64),
    #[error("conductor must be at least 1")]
    ZeroConductor,
    #[error("denominator {den} is not invertible mod {n}")]
    DenominatorNotInvertible { den: i64, n: u64 },
    #[error("denominator must be positive, got {0}")]
    BadDenominator(i64),
    #[error(transparent)]
    Matrix(#[from] ModMatError),
}

/// ε ∈ {±1}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

pub fn is_squarefree(m: u64) -> bool {
    if m == 0 {
        return false;
    }
    let mut m = m;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            m /= p;
            if m.is_multiple_of(p) {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// Negative fundamental discriminant test: squarefree and ≡ 1 mod 4, or
/// 4m with m squarefree and m ≡ 2, 3 mod 4.
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d >= 0 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => is_squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

/// The order of conductor `f` in the imaginary quadratic field of
/// discriminant `disc`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CmOrder {
    disc: i64,
    conductor: u64,
}

impl CmOrder {
    pub fn new(disc: i64, conductor: u64) -> Result<Self, CartanError> {
        if !is_fundamental_discriminant(disc) {
            return Err(CartanError::NotFundamental(disc));
        }
        if conductor == 0 {
            return Err(CartanError::ZeroConductor);
        }
        Ok(CmOrder { disc, conductor })
    }

    pub fn field_discriminant(&self) -> i64 {
        self.disc
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// Δ_K f².
    pub fn discriminant(&self) -> i64 {
        self.disc * (self.conductor as i64).pow(2)
    }

    /// True for the two orders with extra automorphisms, j = 0 and j = 1728.
    pub fn has_extra_units(&self) -> bool {
        self.conductor == 1 && (self.disc == -3 || self.disc == -4)
    }

    pub fn params(&self) -> CartanParams {
        cartan_params(self)
    }
}

impl fmt::Display for CmOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(disc {}, conductor {})", self.disc, self.conductor)
    }
}

/// The pair (δ, φ). δ may carry a denominator for the named 3-adic groups,
/// in which case it is resolved through a modular inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CartanParams {
    delta_num: i64,
    delta_den: i64,
    phi: i64,
}

impl CartanParams {
    pub fn new(delta: i64, phi: i64) -> Self {
        CartanParams {
            delta_num: delta,
            delta_den: 1,
            phi,
        }
    }

    pub fn with_fraction(delta_num: i64, delta_den: i64, phi: i64) -> Result<Self, CartanError> {
        if delta_den <= 0 {
            return Err(CartanError::BadDenominator(delta_den));
        }
        Ok(CartanParams {
            delta_num,
            delta_den,
            phi,
        })
    }

    pub fn delta_num(&self) -> i64 {
        self.delta_num
    }

    pub fn delta_den(&self) -> i64 {
        self.delta_den
    }

    pub fn phi(&self) -> i64 {
        self.phi
    }

    /// δ as a residue mod `n`.
    pub fn delta_mod(&self, n: Modulus) -> Result<u64, CartanError> {
        resolve_fraction(self.delta_num, self.delta_den, n)
    }

    pub fn phi_mod(&self, n: Modulus) -> u64 {
        n.reduce(self.phi)
    }
}

impl fmt::Display for CartanParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.delta_den == 1 {
            write!(f, "(delta {}, phi {})", self.delta_num, self.phi)
        } else {
            write!(
                f,
                "(delta {}/{}, phi {})",
                self.delta_num, self.delta_den, self.phi
            )
        }
    }
}

/// `num / den` as a residue mod `n`.
pub fn resolve_fraction(num: i64, den: i64, n: Modulus) -> Result<u64, CartanError> {
    let inv = n
        .inverse(den)
        .ok_or(CartanError::DenominatorNotInvertible { den, n: n.get() })?;
    Ok(n.reduce(n.reduce(num) as i64 * inv as i64))
}

pub fn cartan_params(order: &CmOrder) -> CartanParams {
    let disc = order.discriminant();
    let f = order.conductor as i64;
    if disc.rem_euclid(4) == 0 {
        CartanParams::new(disc / 4, 0)
    } else {
        CartanParams::new((order.disc - 1) / 4 * f * f, f)
    }
}

/// c_{δ,φ}(a, b) = [[a + bφ, b], [δb, a]].
pub fn c_matrix(a: i64, b: i64, p: &CartanParams, n: Modulus) -> Result<Mat2, CartanError> {
    let delta = p.delta_mod(n)? as i64;
    let (a, b) = (n.reduce(a) as i64, n.reduce(b) as i64);
    let phi = p.phi_mod(n) as i64;
    Ok(Mat2::new(n, [a + b * phi, b, delta * b, a]))
}

/// c_ε = [[-ε, 0], [φ, ε]].
pub fn c_eps(eps: Sign, p: &CartanParams, n: Modulus) -> Mat2 {
    let e = eps.value();
    Mat2::new(n, [-e, 0, p.phi_mod(n) as i64, e])
}

/// c'_ε = [[0, ε], [ε, 0]].
pub fn c_eps_prime(eps: Sign, n: Modulus) -> Mat2 {
    let e = eps.value();
    Mat2::new(n, [0, e, e, 0])
}

/// All c_{δ,φ}(a, b) with unit determinant.
pub fn cartan_subgroup(p: &CartanParams, n: Modulus) -> Result<FiniteMatrixGroup, CartanError> {
    let elements = cartan_elements(p, n)?;
    Ok(FiniteMatrixGroup::from_elements(n, elements)?)
}

pub(crate) fn cartan_elements(p: &CartanParams, n: Modulus) -> Result<Vec<Mat2>, CartanError> {
    let delta = p.delta_mod(n)?;
    let phi = p.phi_mod(n);
    let nn = n.get();
    let mut out = Vec::new();
    for a in 0..nn {
        for b in 0..nn {
            let m = Mat2::new(
                n,
                [(a + b * phi) as i64, b as i64, (delta * b) as i64, a as i64],
            );
            if m.is_invertible() {
                out.push(m);
            }
        }
    }
    Ok(out)
}

/// N_{δ,φ}(N) = ⟨C_{δ,φ}(N), c₁⟩.
pub fn normalizer_group(p: &CartanParams, n: Modulus) -> Result<FiniteMatrixGroup, CartanError> {
    normalizer_with(p, n, c_eps(Sign::Plus, p, n))
}

/// The Cartan subgroup with an arbitrary extra generator adjoined.
pub fn normalizer_with(
    p: &CartanParams,
    n: Modulus,
    extra: Mat2,
) -> Result<FiniteMatrixGroup, CartanError> {
    let cartan = cartan_subgroup(p, n)?;
    let mut gens = cartan.generators().to_vec();
    gens.push(extra);
    Ok(group_closure(n, &gens, DEFAULT_CLOSURE_CAP)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(n: u64) -> Modulus {
        Modulus::new(n).unwrap()
    }

    #[test]
    fn fundamental_discriminants() {
        for d in [-3, -4, -7, -8, -11, -15, -19, -20, -24, -163] {
            assert!(is_fundamental_discriminant(d), "{d}");
        }
        for d in [-1, -2, -12, -16, -27, -28, -5, 5, 0] {
            assert!(!is_fundamental_discriminant(d), "{d}");
        }
        assert_eq!(CmOrder::new(-12, 1), Err(CartanError::NotFundamental(-12)));
        assert_eq!(CmOrder::new(-3, 0), Err(CartanError::ZeroConductor));
    }

    #[test]
    fn params_of_small_orders() {
        assert_eq!(
            CmOrder::new(-4, 1).unwrap().params(),
            CartanParams::new(-1, 0)
        );
        assert_eq!(
            CmOrder::new(-3, 1).unwrap().params(),
            CartanParams::new(-1, 1)
        );
        // -4·16 = -64 ≡ 0 mod 4, δ = -16.
        assert_eq!(
            CmOrder::new(-4, 4).unwrap().params(),
            CartanParams::new(-16, 0)
        );
        // -3·4 = -12 ≡ 0 mod 4.
        assert_eq!(
            CmOrder::new(-3, 2).unwrap().params(),
            CartanParams::new(-3, 0)
        );
        // -7·9 ≡ 1 mod 4: δ = (-8/4)·9 = -18, φ = 3.
        assert_eq!(
            CmOrder::new(-7, 3).unwrap().params(),
            CartanParams::new(-18, 3)
        );
    }

    #[test]
    fn c_matrix_basics() {
        let p = CartanParams::new(5, 2);
        assert!(c_matrix(1, 0, &p, m(7)).unwrap().is_identity());
        let q = CartanParams::new(1, 1);
        let x = c_matrix(0, 1, &q, m(2)).unwrap();
        assert_eq!(x, Mat2::new(m(2), [1, 1, 1, 0]));
        assert_eq!(x.order(), Some(3));
    }

    #[test]
    fn fractional_delta_mod_9() {
        // -3 · 4⁻¹ mod 9, with 4⁻¹ = 7.
        let p = CartanParams::with_fraction(-3, 4, 0).unwrap();
        let expected = (-3i64 * 7).rem_euclid(9) as u64;
        assert_eq!(p.delta_mod(m(9)).unwrap(), expected);
        assert_eq!(expected, 6);
        let x = c_matrix(1, 6, &p, m(9)).unwrap();
        assert_eq!(x, Mat2::new(m(9), [1, 6, (6 * 6) % 9, 1]));
        assert!(matches!(
            p.delta_mod(m(8)),
            Err(CartanError::DenominatorNotInvertible { den: 4, n: 8 })
        ));
    }

    #[test]
    fn c_eps_and_prime() {
        let p0 = CartanParams::new(-1, 0);
        assert_eq!(c_eps(Sign::Plus, &p0, m(4)), Mat2::new(m(4), [3, 0, 0, 1]));
        let p1 = CartanParams::new(1, 1);
        assert_eq!(c_eps(Sign::Plus, &p1, m(2)), Mat2::new(m(2), [1, 0, 1, 1]));
        assert_eq!(c_eps_prime(Sign::Plus, m(4)), Mat2::new(m(4), [0, 1, 1, 0]));
        assert_eq!(
            c_eps_prime(Sign::Minus, m(4)),
            Mat2::new(m(4), [0, 3, 3, 0])
        );
        for n in 2..12 {
            for e in Sign::BOTH {
                let x = c_eps(e, &p0, m(n));
                assert!(x.mul(&x).unwrap().is_identity());
                assert_eq!(x.inverse().unwrap(), x);
                let y = c_eps_prime(e, m(n));
                assert!(y.mul(&y).unwrap().is_identity());
            }
        }
    }

    #[test]
    fn cartan_orders() {
        // Brute count of (a, b) mod 3 with a² + b² ≢ 0.
        let brute = (0..3)
            .flat_map(|a| (0..3).map(move |b| (a, b)))
            .filter(|(a, b)| (a * a + b * b) % 3 != 0)
            .count();
        assert_eq!(brute, 8);
        let c = cartan_subgroup(&CartanParams::new(-1, 0), m(3)).unwrap();
        assert_eq!(c.order(), 8);
        assert!(c.is_abelian());
        let c2 = cartan_subgroup(&CartanParams::new(1, 1), m(2)).unwrap();
        assert_eq!(c2.order(), 3);
    }

    #[test]
    fn normalizers_at_level_two() {
        let s3 = normalizer_group(&CartanParams::new(1, 1), m(2)).unwrap();
        assert!(s3.is_isomorphic_s3());
        let z2 = normalizer_group(&CartanParams::new(-1, 0), m(2)).unwrap();
        assert_eq!(z2.order(), 2);
        assert!(z2.is_abelian());
    }

    #[test]
    fn normalizer_index_two_over_cartan() {
        for n in 3..10 {
            for (d, f) in [(-1, 0), (-1, 1), (2, 0), (-5, 3)] {
                let p = CartanParams::new(d, f);
                let c = cartan_subgroup(&p, m(n)).unwrap();
                let nm = normalizer_group(&p, m(n)).unwrap();
                if !c.contains(&c_eps(Sign::Plus, &p, m(n))) {
                    assert_eq!(nm.order(), 2 * c.order(), "n={n} p={p}");
                }
            }
        }
    }
}
