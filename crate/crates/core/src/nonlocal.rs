//! Nonlocal extensions of the jet algebra.
//!
//! Two shapes of nonlocality occur in the construction and nowhere else:
//!
//! * **Additive** terms `c · ∂⁻¹(q)` appearing in variational gradients when
//!   `∂w/∂u_{-1}` has no exact jet antiderivative (`ExtendedExpr`).
//! * **Multiplicative** terms `m · ∂⁻¹(q)` with a jet-polynomial cofactor `m`,
//!   appearing in the order-two generating function (densities of the shape
//!   `[∂⁻¹P₁(r)]·P₂(s)` where neither factor integrates exactly) and in the
//!   vector fields and gradients derived from it.
//!
//! `NonlocalExpr` covers both: a local part plus a list of `mult · ∂⁻¹(arg)`
//! terms. The invariant maintained everywhere: `arg` never has an exact jet
//! antiderivative (those collapse into the local part on normalization).

use crate::calculus::antiderivative_exact;
use crate::poly::DiffPoly;
use serde::{Deserialize, Serialize};
use std::fmt;

/// One nonlocal term `mult · ∂⁻¹(arg)`; the scalar coefficient lives in
/// `mult`. `mult` may be the constant 1 (additive antiderivative term).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NlTerm {
    pub mult: DiffPoly,
    pub arg: DiffPoly,
}

/// Local jet polynomial plus nonlocal terms.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonlocalExpr {
    pub local: DiffPoly,
    pub terms: Vec<NlTerm>,
}

impl NonlocalExpr {
    pub fn zero() -> Self {
        NonlocalExpr::default()
    }

    pub fn local(p: DiffPoly) -> Self {
        NonlocalExpr {
            local: p,
            terms: Vec::new(),
        }
    }

    pub fn is_local(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.local.is_zero() && self.terms.is_empty()
    }

    /// Adds `mult · ∂⁻¹(arg)`, collapsing into the local part when `arg` has
    /// an exact antiderivative. Arguments are normalized to leading
    /// coefficient one so that equal arguments merge.
    pub fn push_term(&mut self, mult: DiffPoly, arg: DiffPoly) {
        if mult.is_zero() || arg.is_zero() {
            return;
        }
        match antiderivative_exact(&arg) {
            Ok(q) => self.local = self.local.add(&mult.mul(&q)),
            Err(_) => {
                let lead = arg.monomials()[0].coeff.clone();
                self.terms.push(NlTerm {
                    mult: mult.scale(&lead),
                    arg: arg.scale(&lead.recip()),
                });
            }
        }
    }

    pub fn add(&self, other: &NonlocalExpr) -> NonlocalExpr {
        let mut out = NonlocalExpr {
            local: self.local.add(&other.local),
            terms: self.terms.clone(),
        };
        for t in &other.terms {
            out.terms.push(t.clone());
        }
        out.normalize();
        out
    }

    pub fn neg(&self) -> NonlocalExpr {
        NonlocalExpr {
            local: self.local.neg(),
            terms: self
                .terms
                .iter()
                .map(|t| NlTerm {
                    mult: t.mult.neg(),
                    arg: t.arg.clone(),
                })
                .collect(),
        }
    }

    pub fn scale(&self, c: &crate::coeff::Coeff) -> NonlocalExpr {
        NonlocalExpr {
            local: self.local.scale(c),
            terms: self
                .terms
                .iter()
                .map(|t| NlTerm {
                    mult: t.mult.scale(c),
                    arg: t.arg.clone(),
                })
                .collect(),
        }
    }

    /// Total derivative: `∂(m·∂⁻¹q) = (∂m)·∂⁻¹q + m·q`.
    pub fn total_derivative(&self) -> NonlocalExpr {
        let mut out = NonlocalExpr::local(self.local.total_derivative());
        for t in &self.terms {
            out.local = out.local.add(&t.mult.mul(&t.arg));
            out.push_term(t.mult.total_derivative(), t.arg.clone());
        }
        out.normalize();
        out
    }

    /// Combines terms with identical arguments and drops zero terms.
    pub fn normalize(&mut self) {
        let mut merged: Vec<NlTerm> = Vec::new();
        for t in self.terms.drain(..) {
            if t.mult.is_zero() || t.arg.is_zero() {
                continue;
            }
            match merged.iter_mut().find(|u| u.arg == t.arg) {
                Some(u) => u.mult = u.mult.add(&t.mult),
                None => merged.push(t),
            }
        }
        merged.retain(|t| !t.mult.is_zero());
        self.terms = merged;
    }
}

impl fmt::Display for NonlocalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.local)?;
        for t in &self.terms {
            write!(f, " + ({})·∂⁻¹({})", t.mult, t.arg)?;
        }
        Ok(())
    }
}

/// A density with possible multiplicative-nonlocal terms. `Functional`
/// embeds via `local`; the order-two generating function needs the terms.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NonlocalDensity {
    pub expr: NonlocalExpr,
    pub name: String,
}

impl NonlocalDensity {
    pub fn local(name: impl Into<String>, p: DiffPoly) -> Self {
        NonlocalDensity {
            expr: NonlocalExpr::local(p),
            name: name.into(),
        }
    }
}
