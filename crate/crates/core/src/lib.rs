//! Exact arithmetic for Goldbach-type convolution sums of the Liouville
//! function, together with the harmonic-analysis and character-sum machinery
//! needed to probe the extremal case `|L(N)| = N-1`.
//!
//! The crate is organized around five subsystems:
//!
//! - [`arith`] — parity-of-Omega sieve, primality, Jacobi symbols, primitive
//!   roots, and the [`arith::SignFunction`] evaluation contract;
//! - [`conv`] — the convolution sum `L_f(N) = sum_{n<N} f(n) f(N-n)`, singly
//!   and in bulk via an exact number-theoretic transform;
//! - [`spectrum`] — spectra over `Z/pZ`, twisted Gauss sums, and dilation
//!   residuals;
//! - [`signature`] — the combinatorial descent on pairs `(m, j)` and its
//!   conditional-identity checkers;
//! - [`analytic`] — `L(1, chi_p)` evaluation and smoothed divisor sums.

pub mod analytic;
pub mod arith;
pub mod conv;
pub mod ntt;
pub mod signature;
pub mod spectrum;
