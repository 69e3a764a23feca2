//! Exact symbolic engine for the Hamiltonian normal-form construction of
//! counter-propagating long water waves.
//!
//! The crate provides:
//!
//! * a differential-polynomial algebra over the jet variables of the two
//!   characteristic fields, with exact rational coefficients ([`poly`],
//!   [`coeff`], [`jet`]);
//! * total derivatives, Euler operators, exact jet antiderivatives and the
//!   `(r, s)` Poisson bracket ([`calculus`], [`bracket`]);
//! * the model Hamiltonians, the order-two Birkhoff normalization pipeline
//!   with homological-equation solver and the order-three obstruction scan
//!   ([`hamiltonians`], [`normalform`]);
//! * the non-Hamiltonian Kodama reduction of the order-two normal form onto
//!   the first three KdV-hierarchy flows ([`kodama`]);
//! * a compiler from symbolic vector fields and near-identity maps to
//!   evaluation plans executable on grid data ([`evalplan`]).
//!
//! Everything symbolic is exact rational arithmetic; the only conversion to
//! floating point happens inside the evaluation-plan compiler.

pub mod bracket;
pub mod calculus;
pub mod coeff;
pub mod display;
pub mod evalplan;
pub mod field;
pub mod functional;
pub mod gradient;
pub mod hamiltonians;
pub mod jet;
pub mod kodama;
pub mod nonlocal;
pub mod normalform;
pub mod poly;

pub use bracket::{poisson_bracket, poisson_bracket_nl, BracketError};
pub use calculus::{antiderivative_exact, euler, is_total_derivative, AntiderivativeError};
pub use coeff::Coeff;
pub use functional::{functional_equal, Functional};
pub use gradient::{variational_gradient, ExtendedExpr};
pub use jet::{jv, Field, JetVar, OrderUnderflow};
pub use poly::{poly, DiffMono, DiffPoly};

/// Default cap on jet orders accepted at module boundaries (plan compilation,
/// command-line inputs). Intermediate Euler computations legitimately exceed
/// it and are not capped.
pub const DEFAULT_MAX_JET_ORDER: i32 = 8;
