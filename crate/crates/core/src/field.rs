//! Evolutionary vector fields on the two characteristic fields.
//!
//! The Hamiltonian field of a functional is `(-∂∇_r H, +∂∇_s H)`. For plain
//! jet-polynomial densities both components are local jet polynomials
//! (`EvoField`); the order-two generating function yields components with
//! multiplicative `∂⁻¹` terms (`ExtEvoField`), which the plan compiler
//! evaluates through its antiderivative node.

use crate::functional::Functional;
use crate::gradient::{grad, GradientError};
use crate::jet::Field;
use crate::nonlocal::{NonlocalDensity, NonlocalExpr};
use crate::poly::DiffPoly;
use serde::{Deserialize, Serialize};

/// A local evolutionary field or map displacement: one jet polynomial per
/// component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvoField {
    pub r: DiffPoly,
    pub s: DiffPoly,
}

impl EvoField {
    pub fn zero() -> Self {
        EvoField {
            r: DiffPoly::zero(),
            s: DiffPoly::zero(),
        }
    }
}

/// Field with possible multiplicative `∂⁻¹` terms per component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtEvoField {
    pub r: NonlocalExpr,
    pub s: NonlocalExpr,
}

impl From<&EvoField> for ExtEvoField {
    fn from(f: &EvoField) -> Self {
        ExtEvoField {
            r: NonlocalExpr::local(f.r.clone()),
            s: NonlocalExpr::local(f.s.clone()),
        }
    }
}

impl ExtEvoField {
    pub fn zero() -> Self {
        ExtEvoField {
            r: NonlocalExpr::zero(),
            s: NonlocalExpr::zero(),
        }
    }

    pub fn is_local(&self) -> bool {
        self.r.is_local() && self.s.is_local()
    }

    /// Downgrade to a plain `EvoField`; panics if nonlocal terms survive.
    pub fn expect_local(&self) -> EvoField {
        assert!(self.is_local(), "field has irreducible ∂⁻¹ terms");
        EvoField {
            r: self.r.local.clone(),
            s: self.s.local.clone(),
        }
    }
}

/// Hamiltonian vector field of a plain functional: `(-∂∇_r H, +∂∇_s H)`.
/// Both components are always local (the outer ∂ collapses every additive
/// antiderivative in the gradient).
pub fn hamiltonian_field(h: &Functional) -> EvoField {
    let e = hamiltonian_field_nl(&NonlocalDensity::local(h.name.clone(), h.density.clone()))
        .expect("local density gradients cannot fail");
    e.expect_local()
}

/// Hamiltonian vector field allowing nonlocal density terms.
pub fn hamiltonian_field_nl(h: &NonlocalDensity) -> Result<ExtEvoField, GradientError> {
    let gr = grad(&h.expr, Field::R)?;
    let gs = grad(&h.expr, Field::S)?;
    Ok(ExtEvoField {
        r: gr.total_derivative().neg(),
        s: gs.total_derivative(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Field::{R, S};
    use crate::poly::poly;

    #[test]
    fn h0_field_is_transport() {
        let h0 = Functional::new(
            "H0",
            poly(&[("1/2", &[(R, 0, 2)]), ("1/2", &[(S, 0, 2)])]),
        )
        .unwrap();
        let x = hamiltonian_field(&h0);
        assert_eq!(x.r, poly(&[("-1", &[(R, 1, 1)])]));
        assert_eq!(x.s, poly(&[("1", &[(S, 1, 1)])]));
    }

    #[test]
    fn g1_field_matches_paper() {
        // vector field of G1:
        //   r-component = (r1 s_{-1} + r s)/4 + s^2/8 + s2/12
        //   s-component = (s1 r_{-1} + r s)/4 + r^2/8 + r2/12
        let g1 = Functional::new(
            "G1",
            poly(&[
                ("1/12", &[(R, 1, 1), (S, 0, 1)]),
                ("-1/8", &[(R, 0, 2), (S, -1, 1)]),
                ("1/8", &[(R, -1, 1), (S, 0, 2)]),
            ]),
        )
        .unwrap();
        let x = hamiltonian_field(&g1);
        assert_eq!(
            x.r,
            poly(&[
                ("1/4", &[(R, 1, 1), (S, -1, 1)]),
                ("1/4", &[(R, 0, 1), (S, 0, 1)]),
                ("1/8", &[(S, 0, 2)]),
                ("1/12", &[(S, 2, 1)]),
            ])
        );
        assert_eq!(
            x.s,
            poly(&[
                ("1/4", &[(R, -1, 1), (S, 1, 1)]),
                ("1/4", &[(R, 0, 1), (S, 0, 1)]),
                ("1/8", &[(R, 0, 2)]),
                ("1/12", &[(R, 2, 1)]),
            ])
        );
    }
}
