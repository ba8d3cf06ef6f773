//! Exact computation of Ramanujan's tau function and mechanical audits of
//! the congruence, factorization, discrete-log and residue-histogram claims
//! surrounding its non-vanishing (Lehmer's question).
//!
//! The crate is organized around six concerns:
//!
//! * [`arith`] - big-integer, rational and modular arithmetic: primality,
//!   partial factorization, primitive roots, discrete logarithms, Bernoulli
//!   numbers.
//! * [`sieves`] - bulk divisor-sum tables sigma_k(1..N), exact or mod m.
//! * [`tau`] - three independent tau engines and the A/B decomposition
//!   3 tau(n) = A(n) - B(n).
//! * [`claims`] - auditors for prime-indexed claims: the mod-691
//!   equivalence, base-p digit structure, discrete-log towers, large prime
//!   factors, periodicity.
//! * [`matrix`] - the sparse residue-histogram matrix, its census and
//!   weighted sums, group-structure classification, and gcd(A, B) analysis,
//!   including reproduction of two reference tables.
//! * [`cli`] - the `tau-audit` command-line surface, report serialization
//!   and sieve caching.
//!
//! Audits never assume the claims they check: a false claim produces a
//! `fails` verdict with a concrete witness, not a panic. Every run is
//! deterministic; reports are pure functions of inputs and configuration.

pub mod arith;
pub mod cache;
pub mod claims;
pub mod cli;
pub mod config;
pub mod error;
pub mod matrix;
pub mod report;
pub mod sieves;
pub mod tau;

pub use error::{Error, Result};
pub use report::{ClaimId, ClaimReport, Verdict};
pub use tau::CONGRUENCE_PRIME;
