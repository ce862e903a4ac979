//! Desk-scale verification laboratory for GCD sums, generalized GCD
//! matrices, and dilated sawtooth systems.
//!
//! The crate evaluates the sums
//! `(1/N) sum gcd(n_k, n_l)^{2 alpha} / (n_k n_l)^alpha` both directly over
//! the integers and abstractly as `S(t, B)` over multi-index sets, runs the
//! canonical combinatorial reduction, computes extreme eigenvalues of the
//! associated positive-definite matrices with certified residuals, verifies
//! the Poisson-integral identity behind all of it by quadrature and Monte
//! Carlo, and exercises the Franel-Landau / Carleson-Hunt circle of
//! inequalities on exact piecewise-linear integrals.
//!
//! Everything is deterministic: random paths are seeded, parallel
//! reductions happen in fixed order, and pair sums are compensated.

pub mod bounds;
pub mod canonical;
pub mod dilated;
pub mod envelope;
pub mod error;
pub mod gcdcore;
pub mod kahan;
pub mod multiindex;
pub mod poisson;
pub mod primes;
pub mod spectral;
pub mod weights;

pub use error::{Error, Result};
pub use gcdcore::{IndexSet, IntegerSequence};
pub use multiindex::MultiIndex;
pub use weights::WeightSequence;
