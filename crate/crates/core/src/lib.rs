//! Abelian division fields of CM elliptic curves.
//!
//! Exact group computations on 2×2 matrices over Z/NZ, the Cartan subgroups
//! and normalizers attached to imaginary quadratic orders, the named finite
//! images of CM Galois representations, a closed-form classifier for when
//! Q(E[n])/Q is abelian, a finite-field oracle that cross-checks the
//! classifier against Frobenius data, and a harness that re-derives the
//! supporting lemmas by exhaustive computation.

pub mod cartan;
pub mod classifier;
pub mod fixtures;
pub mod images;
pub mod modmat;
pub mod oracle;
pub mod verifier;

pub use cartan::{CartanParams, CmOrder, Sign};
pub use classifier::{classify, is_cyclotomic, ClassificationResult, CurveInput, GroupStructure};
pub use modmat::{AbelianType, FiniteMatrixGroup, Mat2, Modulus};
pub use verifier::{run_suite, Suite, VerificationReport, VerifyConfig};
