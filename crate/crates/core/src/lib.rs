//! Exact arithmetic for the forms `x^2 + N y^2` of discriminant `-4N`.
//!
//! The crate is organised bottom-up:
//!
//! - [`arith`]: primes, factorization, divisors and the Kronecker symbol.
//! - [`cyclo`]: exact elements of cyclotomic fields, used for character values
//!   and Hecke coefficients.
//! - [`dirichlet`]: exact Dirichlet-series coefficient calculus.
//! - [`quadforms`]: reduction, composition, class groups and genus data.
//! - [`characters`]: the character group of a class group and genus characters.
//! - [`coeffs`]: representation counts, partial zeta coefficients and Hecke
//!   coefficients tied together by the class-character decomposition.
//! - [`analytic`]: floating-point constants (`L(1, chi)`, `zeta'(2)`, ...).
//! - [`experiments`]: partial-sum scans and two-term asymptotic fits.

pub mod analytic;
pub mod arith;
pub mod characters;
pub mod coeffs;
pub mod cyclo;
pub mod dirichlet;
mod error;
pub mod experiments;
pub mod quadforms;

pub use error::{Error, Result};
