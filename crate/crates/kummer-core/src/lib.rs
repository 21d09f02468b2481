//! Exact L-functions, analytic ranks and Mordell-Weil ranks for the Kummer
//! family of elliptic curves
//!
//! ```text
//!     E_d :  y^2 = x (x^2 + t^(2d) x - 4 t^(2d))      over  K = F_q(t),
//! ```
//!
//! q an odd prime power. All arithmetic is exact: finite fields are realised
//! through full discrete-log tables, character sums take values in rings of
//! cyclotomic integers Z[zeta_N] with unbounded integer coefficients, and the
//! L-polynomial is certified to have rational integer coefficients before it
//! is returned.
//!
//! The L-function is assembled as
//!
//! ```text
//!     L(E_d/K, T) = (1 - qT) * prod over orbits n of  (1 - beta(n) T^|n|),
//! ```
//!
//! the product running over the orbits of multiplication by q on the residue
//! set Z_2d, with beta(n) a product of two Jacobi sums over F_{q^|n|}. The
//! analytic rank is the order of vanishing at T = 1/q, which BSD (known for
//! this family) identifies with the Mordell-Weil rank. An independent
//! brute-force point-counting oracle over P^1(F_{q^m}) verifies the low
//! log-coefficients of every assembled polynomial.
//!
//! Module map:
//! - [`gfq`]: finite field tables F_{p^k}, discrete logs, subfield norms;
//! - [`cyclo`]: exact cyclotomic integer arithmetic and Phi_N reduction;
//! - [`chars`]: multiplicative characters, Jacobi sums, the double character
//!   sum and its closed form, orbit roots beta(n);
//! - [`orbits`]: the action of q on Z/2dZ, stratification, divisor sums
//!   I_q(D), supersingularity tests;
//! - [`curve`]: curve invariants, reduction types, fiber traces and the
//!   point-counting oracle, torsion certificates, division polynomials;
//! - [`lfun`]: L-polynomial assembly, rank extraction, supersingular fast
//!   path, rank sequences, prime tables and batch scans;
//! - [`engine`]: shared budgets and the field-table cache.

pub mod chars;
pub mod curve;
pub mod cyclo;
pub mod engine;
pub mod error;
pub mod gfq;
mod intpoly;
pub mod lfun;
pub mod orbits;

pub use chars::Character;
pub use curve::CurveDescriptor;
pub use cyclo::Cyclotomic;
pub use engine::Engine;
pub use error::{Error, Result};
pub use gfq::{FieldTable, GeneratorChoice};
pub use lfun::LPolynomial;
pub use orbits::OrbitSet;
