//! Shifted convolution sums of Hecke eigenvalues, and the machinery needed
//! to study them numerically: exact eigenvalue generation for the
//! discriminant form, smooth/rough counting, upper-bound sieve weights,
//! partial symmetric-power Euler products, progression sums twisted by
//! Dirichlet characters, and K-Bessel quadrature for the archimedean
//! weights.
//!
//! All floating-point reductions are deterministic: identical inputs give
//! bit-identical results for any thread count.

pub mod bessel;
pub mod crt;
pub mod detsum;
pub mod dirichlet;
pub mod error;
pub mod eulerprod;
pub mod gamma;
pub mod hecke;
pub mod ntt;
pub mod primes;
pub mod sieveweights;
pub mod shiftsums;
pub mod smoothnum;
pub mod tau;

pub use error::{Error, Result};
pub use hecke::EigenvalueTable;
