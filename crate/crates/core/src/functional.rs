//! Functionals: densities understood modulo total derivatives.
//!
//! A `Functional` is an integral over the line of a differential-polynomial
//! density. Two functionals are equal exactly when the Euler operator
//! annihilates the difference of their densities, which the potential-jet
//! representation makes a decidable, exact test.

use crate::calculus::is_total_derivative;
use crate::poly::DiffPoly;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FunctionalError {
    #[error("constant monomials are not integrable densities on the line")]
    ConstantTerm,
}

/// An integral `∫ density dy` with a text label.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Functional {
    pub density: DiffPoly,
    pub name: String,
}

impl Functional {
    pub fn new(name: impl Into<String>, density: DiffPoly) -> Result<Self, FunctionalError> {
        if density.has_constant_term() {
            return Err(FunctionalError::ConstantTerm);
        }
        Ok(Functional {
            density,
            name: name.into(),
        })
    }

    /// Zero functional.
    pub fn zero(name: impl Into<String>) -> Self {
        Functional {
            density: DiffPoly::zero(),
            name: name.into(),
        }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// True iff the functional is zero, i.e. the density is a total
    /// derivative.
    pub fn is_null(&self) -> bool {
        is_total_derivative(&self.density)
    }
}

/// Equality modulo total derivatives: Euler operator annihilates the
/// difference, tested for both field potentials.
pub fn functional_equal(f: &Functional, g: &Functional) -> bool {
    is_total_derivative(&f.density.sub(&g.density))
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = ∫({}) dy", self.name, self.density)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Field::{R, S};
    use crate::poly::poly;

    fn func(name: &str, p: DiffPoly) -> Functional {
        Functional::new(name, p).unwrap()
    }

    #[test]
    fn integration_by_parts_equality() {
        // ∫ r*s1 = ∫ -r1*s
        let a = func("a", poly(&[("1", &[(R, 0, 1), (S, 1, 1)])]));
        let b = func("b", poly(&[("-1", &[(R, 1, 1), (S, 0, 1)])]));
        assert!(functional_equal(&a, &b));

        // ∫ r1^2 = ∫ -r*r2
        let a = func("a", poly(&[("1", &[(R, 1, 2)])]));
        let b = func("b", poly(&[("-1", &[(R, 0, 1), (R, 2, 1)])]));
        assert!(functional_equal(&a, &b));
    }

    #[test]
    fn distinct_functionals_differ() {
        let a = func("a", poly(&[("1", &[(R, 0, 3)])]));
        let b = func("b", poly(&[("1", &[(R, 0, 2)])]));
        assert!(!functional_equal(&a, &b));
    }

    #[test]
    fn constants_rejected() {
        assert!(Functional::new("bad", DiffPoly::one()).is_err());
    }
}
