//! Exact computational toolkit for product-of-sumset expansion over a prime
//! field F_p.
//!
//! The central object is the set A(A+A) = {a(b+c) : a, b, c ∈ A} for subsets
//! A ⊆ F_p, together with the quantities that control how close it comes to
//! covering all of F_p∖{0}: sumsets and product sets, representation counts,
//! additive/multiplicative energies, additive and multiplicative Fourier
//! spectra, Kloosterman sums, and the extremal quantity
//!
//!   m_p = max{ |A| : A ⊆ F_p∖{0}, A(A+A) ⊉ F_p∖{0} }.
//!
//! Everything here is exact: set operations are bit-set computations over
//! residues, counts are integers, and every asserted inequality is either an
//! exact integer comparison or carries an explicit documented float slack.
//! Floating point only enters through Fourier coefficients and reported
//! ratios.
//!
//! Module map:
//! - [`field`]: validated prime-field contexts (inverse tables, primitive
//!   roots, discrete logs, square testing).
//! - [`set`]: residue subsets as bit sets, sumset/product-set algebra,
//!   representation counts and energies.
//! - [`spectra`]: additive DFT, multiplicative character sums, Kloosterman
//!   sums, rectification profiles.
//! - [`constructions`]: explicit families with prescribed missing products
//!   (interval-based avoiders, sum-free sets) and closed-form density
//!   thresholds.
//! - [`extremal`]: exhaustive and branch-and-bound search for m_p with
//!   re-verifiable certificates.
//! - [`harness`]: seeded random sampling, verification suites with recorded
//!   checks, prime sweeps with CSV output.

pub mod bits;
pub mod constructions;
pub mod extremal;
pub mod field;
pub mod harness;
pub mod set;
pub mod spectra;

pub use field::{FieldCtx, FieldError};
pub use set::{FpSet, SetError};
