//! 2×2 matrices over Z/NZ and the finite groups they generate.
//!
//! Matrices are stored with entries reduced into `[0, n)` and a shared
//! [`Modulus`]. Groups are stored as a sorted list of packed matrix codes,
//! which makes equality and membership tests cheap and deterministic.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported modulus. Entries must fit in 16 bits for the packed
/// encoding used by [`Mat2::code`].
pub const MAX_MODULUS: u64 = 1 << 16;

/// Default element cap for [`group_closure`].
pub const DEFAULT_CLOSURE_CAP: usize = 10_000_000;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ModMatError {
    #[error("modulus {0} outside supported range [1, {MAX_MODULUS}]")]
    InvalidModulus(u64),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("matrix {0} is not invertible")]
    NotInvertible(Mat2),
    #[error("generator {0} is not invertible")]
    NonInvertibleGenerator(Mat2),
    #[error("group exceeds the closure cap of {cap} elements")]
    GroupTooLarge { cap: usize },
    #[error("element set is not closed under multiplication")]
    NotClosed,
    #[error("group of order {0} is not abelian")]
    NotAbelian(usize),
    #[error("{d} does not divide the modulus {n}")]
    NotDivisor { d: u64, n: u64 },
}

/// The level N of a matrix group. `n = 1` is allowed and yields the zero ring,
/// where every group is trivial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Modulus(u64);

impl Modulus {
    pub fn new(n: u64) -> Result<Self, ModMatError> {
        if n == 0 || n > MAX_MODULUS {
            return Err(ModMatError::InvalidModulus(n));
        }
        Ok(Modulus(n))
    }

    pub fn get(self) -> u64 {
        self.0
    }

    /// Reduces a signed integer into `[0, n)`.
    pub fn reduce(self, x: i64) -> u64 {
        x.rem_euclid(self.0 as i64) as u64
    }

    /// Multiplicative inverse of `x` modulo `n`, if it exists.
    pub fn inverse(self, x: i64) -> Option<u64> {
        let n = self.0 as i64;
        let ext = x.rem_euclid(n).extended_gcd(&n);
        if ext.gcd != 1 {
            return None;
        }
        Some(self.reduce(ext.x))
    }

    pub fn is_unit(self, x: i64) -> bool {
        (x.rem_euclid(self.0 as i64) as u64).gcd(&self.0) == 1
    }

    pub fn divides(self, d: u64) -> bool {
        d != 0 && self.0.is_multiple_of(d)
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A 2×2 matrix `[[a11, a12], [a21, a22]]` over Z/nZ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Mat2 {
    n: Modulus,
    e: [u64; 4],
}

impl Mat2 {
    /// Builds a matrix from row-major signed entries, reducing mod `n`.
    pub fn new(n: Modulus, entries: [i64; 4]) -> Self {
        Mat2 {
            n,
            e: entries.map(|x| n.reduce(x)),
        }
    }

    pub fn identity(n: Modulus) -> Self {
        Self::scalar(n, 1)
    }

    pub fn scalar(n: Modulus, k: i64) -> Self {
        Self::new(n, [k, 0, 0, k])
    }

    pub fn modulus(&self) -> Modulus {
        self.n
    }

    pub fn entries(&self) -> [u64; 4] {
        self.e
    }

    pub fn a11(&self) -> u64 {
        self.e[0]
    }
    pub fn a12(&self) -> u64 {
        self.e[1]
    }
    pub fn a21(&self) -> u64 {
        self.e[2]
    }
    pub fn a22(&self) -> u64 {
        self.e[3]
    }

    /// Row-major packing of the four entries, 16 bits each.
    pub fn code(&self) -> u64 {
        (self.e[0] << 48) | (self.e[1] << 32) | (self.e[2] << 16) | self.e[3]
    }

    pub fn from_code(n: Modulus, code: u64) -> Self {
        let m = 0xffff;
        Mat2 {
            n,
            e: [code >> 48, (code >> 32) & m, (code >> 16) & m, code & m],
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    pub fn mul(&self, other: &Mat2) -> Result<Mat2, ModMatError> {
        if self.n != other.n {
            return Err(ModMatError::ModulusMismatch(self.n.get(), other.n.get()));
        }
        Ok(self.mul_same(other))
    }

    // Caller guarantees equal moduli. Entries are < 2^16 so nothing overflows.
    pub(crate) fn mul_same(&self, o: &Mat2) -> Mat2 {
        let n = self.n.get();
        let [a, b, c, d] = self.e;
        let [w, x, y, z] = o.e;
        Mat2 {
            n: self.n,
            e: [
                (a * w + b * y) % n,
                (a * x + b * z) % n,
                (c * w + d * y) % n,
                (c * x + d * z) % n,
            ],
        }
    }

    pub fn det(&self) -> u64 {
        let n = self.n.get();
        let [a, b, c, d] = self.e;
        (a * d % n + n - b * c % n) % n
    }

    pub fn is_invertible(&self) -> bool {
        self.det().gcd(&self.n.get()) == 1
    }

    pub fn inverse(&self) -> Result<Mat2, ModMatError> {
        let inv = self
            .n
            .inverse(self.det() as i64)
            .ok_or(ModMatError::NotInvertible(*self))?;
        let [a, b, c, d] = self.e.map(|x| x as i64);
        let k = inv as i64;
        Ok(Mat2::new(self.n, [d * k, -b * k, -c * k, a * k]))
    }

    pub fn pow(&self, mut k: u64) -> Mat2 {
        let mut acc = Mat2::identity(self.n);
        let mut base = *self;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul_same(&base);
            }
            base = base.mul_same(&base);
            k >>= 1;
        }
        acc
    }

    /// Multiplicative order. Only meaningful for invertible matrices; returns
    /// `None` if the matrix is singular.
    pub fn order(&self) -> Option<u64> {
        if !self.is_invertible() {
            return None;
        }
        let id = Mat2::identity(self.n);
        let mut x = *self;
        let mut k = 1;
        while x != id {
            x = x.mul_same(self);
            k += 1;
        }
        Some(k)
    }

    pub fn commutes_with(&self, other: &Mat2) -> bool {
        self.mul_same(other) == other.mul_same(self)
    }

    /// Entrywise reduction to a divisor `d` of the modulus.
    pub fn reduce_to(&self, d: Modulus) -> Result<Mat2, ModMatError> {
        if !self.n.divides(d.get()) {
            return Err(ModMatError::NotDivisor {
                d: d.get(),
                n: self.n.get(),
            });
        }
        Ok(Mat2 {
            n: d,
            e: self.e.map(|x| x % d.get()),
        })
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.e;
        write!(f, "[[{a},{b}],[{c},{d}]] mod {}", self.n)
    }
}

/// Invariant factors `d1 | d2 | ... | dk` of a finite abelian group, each at
/// least 2. The empty list is the trivial group.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AbelianType(Vec<u64>);

impl AbelianType {
    pub fn trivial() -> Self {
        AbelianType(Vec::new())
    }

    /// Validates the divisibility chain. Returns `None` for factors below 2 or
    /// a broken chain.
    pub fn new(factors: Vec<u64>) -> Option<Self> {
        if factors.iter().any(|&d| d < 2) || factors.windows(2).any(|w| w[1] % w[0] != 0) {
            return None;
        }
        Some(AbelianType(factors))
    }

    /// `(Z/2Z)^k`.
    pub fn elementary_two(k: usize) -> Self {
        AbelianType(vec![2; k])
    }

    pub fn factors(&self) -> &[u64] {
        &self.0
    }

    pub fn order(&self) -> u64 {
        self.0.iter().product()
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for AbelianType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "trivial");
        }
        if self.0.iter().all(|&d| d == self.0[0]) && self.0.len() > 1 {
            return write!(f, "(Z/{}Z)^{}", self.0[0], self.0.len());
        }
        let parts: Vec<String> = self.0.iter().map(|d| format!("Z/{d}Z")).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

// Membership set for closure. Small levels use a dense bitmap over all n^4
// matrices, larger ones fall back to hashing the packed code.
enum Seen {
    Dense { n: u64, bits: Vec<u64> },
    Sparse(HashSet<u64>),
}

const DENSE_LIMIT: u64 = 1 << 24;

impl Seen {
    fn new(n: Modulus) -> Self {
        let n = n.get();
        let total = n.checked_pow(4).unwrap_or(u64::MAX);
        if total <= DENSE_LIMIT {
            Seen::Dense {
                n,
                bits: vec![0; total.div_ceil(64) as usize],
            }
        } else {
            Seen::Sparse(HashSet::new())
        }
    }

    /// Returns true if `m` was not yet present.
    fn insert(&mut self, m: &Mat2) -> bool {
        match self {
            Seen::Dense { n, bits } => {
                let [a, b, c, d] = m.e;
                let idx = ((a * *n + b) * *n + c) * *n + d;
                let (w, bit) = ((idx / 64) as usize, idx % 64);
                let fresh = bits[w] & (1 << bit) == 0;
                bits[w] |= 1 << bit;
                fresh
            }
            Seen::Sparse(set) => set.insert(m.code()),
        }
    }
}

/// Breadth-first closure of `gens` starting from the identity. When `within`
/// is given, every produced element must belong to it.
fn closure_codes(
    n: Modulus,
    gens: &[Mat2],
    cap: usize,
    within: Option<&[u64]>,
) -> Result<Vec<u64>, ModMatError> {
    let id = Mat2::identity(n);
    let mut seen = Seen::new(n);
    seen.insert(&id);
    let mut out = vec![id.code()];
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x.mul_same(g);
            if seen.insert(&y) {
                if let Some(target) = within {
                    if target.binary_search(&y.code()).is_err() {
                        return Err(ModMatError::NotClosed);
                    }
                }
                out.push(y.code());
                if out.len() > cap {
                    return Err(ModMatError::GroupTooLarge { cap });
                }
                queue.push_back(y);
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// A finite subgroup of GL(2, Z/nZ): its modulus, a generating list, and the
/// full sorted element set.
#[derive(Clone, Debug)]
pub struct FiniteMatrixGroup {
    modulus: Modulus,
    generators: Vec<Mat2>,
    elements: Vec<u64>,
}

impl PartialEq for FiniteMatrixGroup {
    fn eq(&self, other: &Self) -> bool {
        self.modulus == other.modulus && self.elements == other.elements
    }
}

impl Eq for FiniteMatrixGroup {}

/// The subgroup generated by `generators`, computed by breadth-first
/// multiplication. Fails rather than truncating once `cap` is exceeded.
pub fn group_closure(
    modulus: Modulus,
    generators: &[Mat2],
    cap: usize,
) -> Result<FiniteMatrixGroup, ModMatError> {
    let mut gens = Vec::with_capacity(generators.len());
    for g in generators {
        if g.n != modulus {
            return Err(ModMatError::ModulusMismatch(modulus.get(), g.n.get()));
        }
        if !g.is_invertible() {
            return Err(ModMatError::NonInvertibleGenerator(*g));
        }
        if !g.is_identity() && !gens.contains(g) {
            gens.push(*g);
        }
    }
    let elements = closure_codes(modulus, &gens, cap, None)?;
    Ok(FiniteMatrixGroup {
        modulus,
        generators: gens,
        elements,
    })
}

impl FiniteMatrixGroup {
    pub fn trivial(modulus: Modulus) -> Self {
        FiniteMatrixGroup {
            modulus,
            generators: Vec::new(),
            elements: vec![Mat2::identity(modulus).code()],
        }
    }

    /// Builds a group from an explicit element set and checks that it really
    /// is one. A small generating set is extracted greedily and its closure
    /// must reproduce the input exactly.
    pub fn from_elements<I>(modulus: Modulus, elements: I) -> Result<Self, ModMatError>
    where
        I: IntoIterator<Item = Mat2>,
    {
        let mut target = Vec::new();
        for m in elements {
            if m.n != modulus {
                return Err(ModMatError::ModulusMismatch(modulus.get(), m.n.get()));
            }
            if !m.is_invertible() {
                return Err(ModMatError::NonInvertibleGenerator(m));
            }
            target.push(m.code());
        }
        target.sort_unstable();
        target.dedup();
        if target
            .binary_search(&Mat2::identity(modulus).code())
            .is_err()
        {
            return Err(ModMatError::NotClosed);
        }

        let mut gens: Vec<Mat2> = Vec::new();
        let mut current = vec![Mat2::identity(modulus).code()];
        for &code in &target {
            if current.binary_search(&code).is_ok() {
                continue;
            }
            gens.push(Mat2::from_code(modulus, code));
            current = closure_codes(modulus, &gens, target.len(), Some(&target))?;
            if current.len() == target.len() {
                break;
            }
        }
        if current != target {
            return Err(ModMatError::NotClosed);
        }
        Ok(FiniteMatrixGroup {
            modulus,
            generators: gens,
            elements: target,
        })
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn generators(&self) -> &[Mat2] {
        &self.generators
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> impl Iterator<Item = Mat2> + '_ {
        self.elements
            .iter()
            .map(move |&c| Mat2::from_code(self.modulus, c))
    }

    pub fn contains(&self, m: &Mat2) -> bool {
        m.n == self.modulus && self.elements.binary_search(&m.code()).is_ok()
    }

    pub fn is_subgroup_of(&self, other: &FiniteMatrixGroup) -> bool {
        self.modulus == other.modulus && self.elements().all(|m| other.contains(&m))
    }

    /// Abelian iff every pair of generators commutes.
    pub fn is_abelian(&self) -> bool {
        let g = &self.generators;
        (0..g.len()).all(|i| (i + 1..g.len()).all(|j| g[i].commutes_with(&g[j])))
    }

    /// Invariant factors of an abelian group. Repeatedly takes an element of
    /// maximal order in the quotient by the part already split off; such an
    /// element generates a direct summand, so the orders found form the
    /// invariant factors in descending order.
    pub fn abelian_invariants(&self) -> Result<AbelianType, ModMatError> {
        if !self.is_abelian() {
            return Err(ModMatError::NotAbelian(self.order()));
        }
        let elems: Vec<Mat2> = self.elements().collect();
        let mut split: HashSet<u64> = HashSet::from([Mat2::identity(self.modulus).code()]);
        let mut factors = Vec::new();
        while split.len() < elems.len() {
            let (best, ord) = elems
                .iter()
                .map(|x| (x, relative_order(x, &split)))
                .max_by_key(|&(_, k)| k)
                .expect("non-empty group");
            let powers: Vec<Mat2> = (0..ord).map(|i| best.pow(i)).collect();
            let old: Vec<Mat2> = split
                .iter()
                .map(|&c| Mat2::from_code(self.modulus, c))
                .collect();
            split = old
                .iter()
                .flat_map(|k| powers.iter().map(move |p| k.mul_same(p).code()))
                .collect();
            factors.push(ord);
        }
        factors.reverse();
        Ok(AbelianType::new(factors).expect("split orders form a divisibility chain"))
    }

    /// Reduction of every element mod `d`. The image of a group under the
    /// reduction homomorphism is again a group.
    pub fn project(&self, d: u64) -> Result<FiniteMatrixGroup, ModMatError> {
        if !self.modulus.divides(d) {
            return Err(ModMatError::NotDivisor {
                d,
                n: self.modulus.get(),
            });
        }
        let dm = Modulus::new(d)?;
        let mut elements: Vec<u64> = self
            .elements()
            .map(|m| m.reduce_to(dm).map(|r| r.code()))
            .collect::<Result<_, _>>()?;
        elements.sort_unstable();
        elements.dedup();
        let mut generators = Vec::new();
        for g in &self.generators {
            let r = g.reduce_to(dm)?;
            if !r.is_identity() && !generators.contains(&r) {
                generators.push(r);
            }
        }
        Ok(FiniteMatrixGroup {
            modulus: dm,
            generators,
            elements,
        })
    }

    pub fn is_isomorphic_s3(&self) -> bool {
        self.order() == 6 && !self.is_abelian()
    }

    /// Number of elements of each order.
    pub fn order_statistics(&self) -> BTreeMap<u64, usize> {
        let mut counts = BTreeMap::new();
        for m in self.elements() {
            let k = m.order().expect("group elements are invertible");
            *counts.entry(k).or_insert(0) += 1;
        }
        counts
    }

    pub fn exponent(&self) -> u64 {
        self.order_statistics()
            .keys()
            .fold(1, |acc, &k| acc.lcm(&k))
    }
}

// Smallest k >= 1 with x^k in `sub`.
fn relative_order(x: &Mat2, sub: &HashSet<u64>) -> u64 {
    let mut y = *x;
    let mut k = 1;
    while !sub.contains(&y.code()) {
        y = y.mul_same(x);
        k += 1;
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(n: u64) -> Modulus {
        Modulus::new(n).unwrap()
    }

    #[test]
    fn identity_is_neutral() {
        let n = m(7);
        let x = Mat2::new(n, [3, 5, 2, 6]);
        assert_eq!(Mat2::identity(n).mul(&x).unwrap(), x);
        assert_eq!(x.mul(&Mat2::identity(n)).unwrap(), x);
    }

    #[test]
    fn product_mod_5() {
        let n = m(5);
        let x = Mat2::new(n, [1, 1, 0, 1]);
        let y = Mat2::new(n, [1, 0, 1, 1]);
        assert_eq!(x.mul(&y).unwrap(), Mat2::new(n, [2, 1, 1, 1]));
    }

    #[test]
    fn modulus_mismatch_is_an_error() {
        let x = Mat2::identity(m(4));
        let y = Mat2::identity(m(8));
        assert_eq!(x.mul(&y), Err(ModMatError::ModulusMismatch(4, 8)));
    }

    #[test]
    fn inverse_of_diagonal_mod_5() {
        let x = Mat2::new(m(5), [2, 0, 0, 3]);
        assert_eq!(x.inverse().unwrap(), Mat2::new(m(5), [3, 0, 0, 2]));
        assert!(Mat2::identity(m(5)).inverse().unwrap().is_identity());
    }

    #[test]
    fn singular_matrix_has_no_inverse() {
        let x = Mat2::new(m(6), [2, 0, 0, 1]);
        assert!(matches!(x.inverse(), Err(ModMatError::NotInvertible(_))));
        assert_eq!(x.order(), None);
    }

    #[test]
    fn code_round_trips() {
        let x = Mat2::new(m(65536), [65535, 1, 40000, 7]);
        assert_eq!(Mat2::from_code(x.modulus(), x.code()), x);
    }

    #[test]
    fn invalid_moduli_rejected() {
        assert!(Modulus::new(0).is_err());
        assert!(Modulus::new(MAX_MODULUS + 1).is_err());
        assert!(Modulus::new(MAX_MODULUS).is_ok());
    }

    #[test]
    fn empty_generators_give_trivial_group() {
        let g = group_closure(m(9), &[], DEFAULT_CLOSURE_CAP).unwrap();
        assert_eq!(g.order(), 1);
        assert!(g.is_abelian());
        assert!(g.abelian_invariants().unwrap().is_trivial());
        assert!(!g.is_isomorphic_s3());
        assert_eq!(g, FiniteMatrixGroup::trivial(m(9)));
    }

    #[test]
    fn closure_cap_is_an_error() {
        let n = m(5);
        let gens = [Mat2::new(n, [1, 1, 0, 1]), Mat2::new(n, [1, 0, 1, 1])];
        // SL(2, F_5) has 120 elements.
        assert_eq!(group_closure(n, &gens, 120).unwrap().order(), 120);
        assert_eq!(
            group_closure(n, &gens, 119),
            Err(ModMatError::GroupTooLarge { cap: 119 })
        );
    }

    #[test]
    fn non_invertible_generator_rejected() {
        let n = m(4);
        let err = group_closure(n, &[Mat2::new(n, [2, 0, 0, 1])], 100).unwrap_err();
        assert!(matches!(err, ModMatError::NonInvertibleGenerator(_)));
    }

    #[test]
    fn from_elements_rejects_non_groups() {
        let n = m(5);
        let x = Mat2::scalar(n, 2);
        let err = FiniteMatrixGroup::from_elements(n, [Mat2::identity(n), x]).unwrap_err();
        assert_eq!(err, ModMatError::NotClosed);
        let ok = FiniteMatrixGroup::from_elements(n, (1..5).map(|k| Mat2::scalar(n, k))).unwrap();
        assert_eq!(ok.order(), 4);
        assert_eq!(ok.abelian_invariants().unwrap().factors(), &[4]);
    }

    #[test]
    fn invariants_of_mixed_group() {
        // Scalars mod 15: (Z/15Z)^x = Z/2 x Z/4.
        let n = m(15);
        let gens: Vec<Mat2> = [2, 7, 11, 14].iter().map(|&k| Mat2::scalar(n, k)).collect();
        let g = group_closure(n, &gens, 1000).unwrap();
        assert_eq!(g.order(), 8);
        assert_eq!(g.abelian_invariants().unwrap().factors(), &[2, 4]);
        assert_eq!(g.exponent(), 4);
    }

    #[test]
    fn invariants_refused_for_non_abelian() {
        let n = m(2);
        let g = group_closure(
            n,
            &[Mat2::new(n, [1, 1, 0, 1]), Mat2::new(n, [1, 0, 1, 1])],
            10,
        )
        .unwrap();
        assert!(g.is_isomorphic_s3());
        assert_eq!(g.abelian_invariants(), Err(ModMatError::NotAbelian(6)));
    }

    #[test]
    fn projection_requires_divisor() {
        let g = FiniteMatrixGroup::trivial(m(12));
        assert!(g.project(5).is_err());
        assert_eq!(g.project(12).unwrap(), g);
        assert_eq!(g.project(1).unwrap().order(), 1);
    }

    #[test]
    fn abelian_type_validation() {
        assert!(AbelianType::new(vec![2, 4, 8]).is_some());
        assert!(AbelianType::new(vec![2, 3]).is_none());
        assert!(AbelianType::new(vec![1]).is_none());
        assert_eq!(AbelianType::elementary_two(3).to_string(), "(Z/2Z)^3");
        assert_eq!(
            AbelianType::new(vec![2, 4]).unwrap().to_string(),
            "Z/2Z x Z/4Z"
        );
    }
}
