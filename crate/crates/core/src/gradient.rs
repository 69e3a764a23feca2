//! Variational gradients.
//!
//! For a functional `W = ∫ w dy` the L² gradient is
//!
//!   ∇_u W = Σ_{k ≥ -1} (-∂)^k ∂w/∂u_k ,
//!
//! where the k = -1 term produces `-∂⁻¹(∂w/∂u_{-1})`. That antiderivative is
//! collapsed into the local part whenever it exists exactly in the jet
//! algebra; otherwise it is kept as an additive `∂⁻¹` term. Densities carrying
//! multiplicative `∂⁻¹` factors (the order-two generating function) get the
//! corresponding product rules, with the skew-adjointness of `∂⁻¹` shifting
//! the operator onto the cofactor.

use crate::coeff::Coeff;
use crate::functional::Functional;
use crate::jet::{Field, JetVar};
use crate::nonlocal::NonlocalExpr;
use crate::poly::DiffPoly;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GradientError {
    /// A gradient would require ∂⁻¹ applied to an expression that already
    /// contains ∂⁻¹ of a non-exact density (jet order -2 territory).
    #[error("gradient requires a nested antiderivative (order -2)")]
    NestedAntiderivative,
}

/// Gradient output for plain (local-density) functionals: local part plus
/// additive `c · ∂⁻¹(arg)` terms, `arg` never exactly integrable.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExtendedExpr {
    pub local: DiffPoly,
    pub nonlocal: Vec<(Coeff, DiffPoly)>,
}

impl ExtendedExpr {
    pub fn is_local(&self) -> bool {
        self.nonlocal.is_empty()
    }

    pub fn to_nonlocal(&self) -> NonlocalExpr {
        let mut e = NonlocalExpr::local(self.local.clone());
        for (c, arg) in &self.nonlocal {
            e.push_term(DiffPoly::constant(c.clone()), arg.clone());
        }
        e
    }
}

/// Gradient of a local density with respect to one field.
pub fn grad_local(w: &DiffPoly, field: Field) -> NonlocalExpr {
    let mut out = NonlocalExpr::zero();
    for v in w.variables_of(field) {
        let partial = w.partial(v);
        if v.order >= 0 {
            out.local = out.local.add(&partial.neg_dn(v.order as u32));
        } else {
            // (-∂)^{-1} = -∂⁻¹
            out.push_term(DiffPoly::constant(Coeff::from_int(-1)), partial);
        }
    }
    out.normalize();
    out
}

/// Gradient of a general (possibly multiplicative-nonlocal) density.
pub fn grad(expr: &NonlocalExpr, field: Field) -> Result<NonlocalExpr, GradientError> {
    let mut out = grad_local(&expr.local, field);
    for t in &expr.terms {
        out = out.add(&grad_term(t, field)?);
    }
    Ok(out)
}

/// Gradient of one term `m · ∂⁻¹(q)`.
fn grad_term(t: &NlTerm, field: Field) -> Result<NonlocalExpr, GradientError> {
    let mut out = NonlocalExpr::zero();

    // cofactor side: Σ_k (-∂)^k [∂m/∂u_k · ∂⁻¹(q)]
    for v in t.mult.variables_of(field) {
        if v.order < 0 {
            return Err(GradientError::NestedAntiderivative);
        }
        let partial = t.mult.partial(v);
        let mut base = NonlocalExpr::zero();
        base.push_term(partial, t.arg.clone());
        out = out.add(&neg_dn_expr(&base, v.order as u32));
    }

    // antiderivative side: -Σ_k (-∂)^k [∂q/∂u_k · ∂⁻¹(m)]
    for v in t.arg.variables_of(field) {
        if v.order < 0 {
            return Err(GradientError::NestedAntiderivative);
        }
        let partial = t.arg.partial(v);
        let mut base = NonlocalExpr::zero();
        base.push_term(partial.neg(), t.mult.clone());
        out = out.add(&neg_dn_expr(&base, v.order as u32));
    }

    Ok(out)
}

fn neg_dn_expr(e: &NonlocalExpr, n: u32) -> NonlocalExpr {
    let mut out = e.clone();
    for _ in 0..n {
        out = out.total_derivative().neg();
    }
    out
}

/// The spec-level operation: gradients of a plain functional with respect to
/// both fields, additive `∂⁻¹` terms absorbing every nonlocality.
pub fn variational_gradient(f: &Functional) -> (ExtendedExpr, ExtendedExpr) {
    (
        to_extended(grad_local(&f.density, Field::R)),
        to_extended(grad_local(&f.density, Field::S)),
    )
}

fn to_extended(e: NonlocalExpr) -> ExtendedExpr {
    let mut nonlocal = Vec::new();
    for t in e.terms {
        // gradients of local densities only produce constant cofactors
        let monos = t.mult.monomials();
        assert!(
            monos.len() == 1 && monos[0].is_constant(),
            "additive gradient term with non-constant cofactor"
        );
        let mut c = monos[0].coeff.clone();
        // normalize: leading coefficient of the argument pulled into c
        let lead = t.arg.monomials()[0].coeff.clone();
        c = &c * &lead;
        let arg = t.arg.scale(&lead.recip());
        nonlocal.push((c, arg));
    }
    nonlocal.sort_by(|a, b| format!("{}", a.1).cmp(&format!("{}", b.1)));
    ExtendedExpr {
        local: e.local,
        nonlocal,
    }
}

/// Partial derivative of an extended expression with respect to a jet
/// variable, for plan-level linearization: d/dε [expr(z + εδ_v)]. Returned as
/// the pair (∂expr/∂v as coefficients). Used by the evaluation-plan builder,
/// which wires the `∂⁻¹` chain itself.
pub fn partials_of(p: &DiffPoly) -> Vec<(JetVar, DiffPoly)> {
    p.variables()
        .into_iter()
        .map(|v| (v, p.partial(v)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Field::{R, S};
    use crate::poly::poly;

    #[test]
    fn kdv_gradient() {
        // ∇_r ∫(-1/12 r1^2 + r^3/4) = 1/6 r2 + 3/4 r^2
        let w = poly(&[("-1/12", &[(R, 1, 2)]), ("1/4", &[(R, 0, 3)])]);
        let g = grad_local(&w, R);
        assert!(g.is_local());
        assert_eq!(g.local, poly(&[("1/6", &[(R, 2, 1)]), ("3/4", &[(R, 0, 2)])]));
    }

    #[test]
    fn w1_gradient_matches_paper() {
        // w1 = r1 s1/6 - (r^2 s + r s^2)/4
        let w1 = poly(&[
            ("1/6", &[(R, 1, 1), (S, 1, 1)]),
            ("-1/4", &[(R, 0, 2), (S, 0, 1)]),
            ("-1/4", &[(R, 0, 1), (S, 0, 2)]),
        ]);
        // ∇_r W1 = -1/6 s2 - r s/2 - s^2/4
        let g = grad_local(&w1, R);
        assert!(g.is_local());
        assert_eq!(
            g.local,
            poly(&[
                ("-1/6", &[(S, 2, 1)]),
                ("-1/2", &[(R, 0, 1), (S, 0, 1)]),
                ("-1/4", &[(S, 0, 2)]),
            ])
        );
    }

    #[test]
    fn g1_gradient_keeps_the_nonlocal_term() {
        // g1 = r1 s /12 - (r^2 s_{-1} - r_{-1} s^2)/8
        let g1 = poly(&[
            ("1/12", &[(R, 1, 1), (S, 0, 1)]),
            ("-1/8", &[(R, 0, 2), (S, -1, 1)]),
            ("1/8", &[(R, -1, 1), (S, 0, 2)]),
        ]);
        // ∇_r G1 = -r s_{-1}/4 - ∂⁻¹(s^2)/8 - s1/12
        let f = Functional::new("G1", g1).unwrap();
        let (gr, gs) = variational_gradient(&f);
        assert_eq!(
            gr.local,
            poly(&[
                ("-1/4", &[(R, 0, 1), (S, -1, 1)]),
                ("-1/12", &[(S, 1, 1)]),
            ])
        );
        assert_eq!(gr.nonlocal.len(), 1);
        assert_eq!(gr.nonlocal[0].0, Coeff::frac(-1, 8));
        assert_eq!(gr.nonlocal[0].1, poly(&[("1", &[(S, 0, 2)])]));

        // ∇_s G1 = s r_{-1}/4 + ∂⁻¹(r^2)/8 + r1/12
        assert_eq!(
            gs.local,
            poly(&[
                ("1/4", &[(R, -1, 1), (S, 0, 1)]),
                ("1/12", &[(R, 1, 1)]),
            ])
        );
        assert_eq!(gs.nonlocal, vec![(Coeff::frac(1, 8), poly(&[("1", &[(R, 0, 2)])]))]);
    }

    #[test]
    fn gradient_of_multiplicative_nonlocal_term() {
        // t = γ ∂⁻¹(r^2) s^2, γ = -1/32:
        //   ∇_r t = -2γ r ∂⁻¹(s^2),  ∇_s t = 2γ ∂⁻¹(r^2) s
        let gamma = Coeff::frac(-1, 32);
        let mut e = NonlocalExpr::zero();
        e.push_term(
            poly(&[("-1/32", &[(S, 0, 2)])]),
            poly(&[("1", &[(R, 0, 2)])]),
        );
        let gr = grad(&e, R).unwrap();
        assert!(gr.local.is_zero());
        assert_eq!(gr.terms.len(), 1);
        assert_eq!(
            gr.terms[0].mult,
            poly(&[("1/16", &[(R, 0, 1)])]) // -2γ r = 1/16 r
        );
        assert_eq!(gr.terms[0].arg, poly(&[("1", &[(S, 0, 2)])]));

        let gs = grad(&e, S).unwrap();
        assert!(gs.local.is_zero());
        assert_eq!(gs.terms.len(), 1);
        assert_eq!(gs.terms[0].mult, poly(&[("-1/16", &[(S, 0, 1)])])); // 2γ·2s
        assert_eq!(gs.terms[0].arg, poly(&[("1", &[(R, 0, 2)])]));
        let _ = gamma;
    }
}
