//! The (r, s) Poisson bracket.
//!
//! With the Poisson tensor of the characteristic variables the Hamilton
//! equations read `ṙ = -∂∇_r H`, `ṡ = +∂∇_s H`, and the bracket of two
//! functionals is
//!
//!   {F, G} = ∫ ( ∇_s F · ∂∇_s G  -  ∇_r F · ∂∇_r G ) dy .
//!
//! Gradients may carry `∂⁻¹` terms. Every product involving them is reduced
//! back into the jet algebra using two exact rules:
//!
//!   * `∂ ∘ ∂⁻¹ = id` on densities,
//!   * skew-adjointness  `∫ (∂⁻¹u) v = -∫ u (∂⁻¹v)`,
//!
//! plus pairing cancellation between irreducible `∫ (∂⁻¹u) v` residues, keyed
//! by the Euler images of `u` and `v` (a complete invariant of a density
//! modulo total derivatives). A surviving residue is a hard error — it cannot
//! occur for the inputs arising in this construction — never a silent drop.

use crate::calculus::{antiderivative_exact, euler_pair};
use crate::coeff::Coeff;
use crate::functional::Functional;
use crate::gradient::grad;
use crate::jet::Field;
use crate::nonlocal::{NonlocalDensity, NonlocalExpr};
use crate::poly::DiffPoly;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum BracketError {
    #[error("nonlocal residue failed to reduce: ∫(∂⁻¹ of [{u}])·[{v}] with coefficient {coeff}")]
    ReductionFailure { u: String, v: String, coeff: Coeff },
    #[error("product of two antiderivative factors is outside the algebra")]
    DoubleAntiderivative,
    #[error("gradient error: {0}")]
    Gradient(#[from] crate::gradient::GradientError),
}

/// Poisson bracket of two plain functionals.
pub fn poisson_bracket(f: &Functional, g: &Functional) -> Result<Functional, BracketError> {
    let fe = NonlocalExpr::local(f.density.clone());
    let ge = NonlocalExpr::local(g.density.clone());
    let density = bracket_exprs(&fe, &ge)?;
    Ok(Functional {
        density,
        name: format!("{{{},{}}}", f.name, g.name),
    })
}

/// Poisson bracket where either slot may carry multiplicative `∂⁻¹` terms
/// (the order-two generating function).
pub fn poisson_bracket_nl(
    f: &NonlocalDensity,
    g: &NonlocalDensity,
) -> Result<Functional, BracketError> {
    let density = bracket_exprs(&f.expr, &g.expr)?;
    Ok(Functional {
        density,
        name: format!("{{{},{}}}", f.name, g.name),
    })
}

fn bracket_exprs(f: &NonlocalExpr, g: &NonlocalExpr) -> Result<DiffPoly, BracketError> {
    let gf_r = grad(f, Field::R)?;
    let gf_s = grad(f, Field::S)?;
    let gg_r = grad(g, Field::R)?.total_derivative();
    let gg_s = grad(g, Field::S)?.total_derivative();

    let mut acc = Accumulator::default();
    mul_into(&mut acc, &gf_s, &gg_s, false);
    mul_into(&mut acc, &gf_r, &gg_r, true);
    acc.reduce()
}

/// Collects local density contributions and irreducible `∫(∂⁻¹u)·v` pairings.
#[derive(Default)]
struct Accumulator {
    local: DiffPoly,
    pairings: Vec<(Coeff, DiffPoly, DiffPoly)>, // c · ∫ (∂⁻¹u) v
}

fn mul_into(acc: &mut Accumulator, a: &NonlocalExpr, b: &NonlocalExpr, negate: bool) {
    let sign = if negate {
        Coeff::from_int(-1)
    } else {
        Coeff::one()
    };
    acc.local = acc.local.add(&a.local.mul(&b.local).scale(&sign));
    for t in &a.terms {
        // (mult · ∂⁻¹(arg)) · b.local  =  ∫ (∂⁻¹ arg) · (mult b.local)
        acc.pairings
            .push((sign.clone(), t.arg.clone(), t.mult.mul(&b.local)));
    }
    for t in &b.terms {
        acc.pairings
            .push((sign.clone(), t.arg.clone(), t.mult.mul(&a.local)));
    }
    for ta in &a.terms {
        for tb in &b.terms {
            // ∫ mult_a mult_b (∂⁻¹ arg_a)(∂⁻¹ arg_b): genuinely outside the
            // algebra; must cancel pairwise if it ever appears.
            acc.pairings.push((
                sign.clone(),
                ta.arg.clone(),
                DiffPoly::zero(), // marker, resolved below
            ));
            let _ = tb;
        }
    }
}

impl Accumulator {
    fn reduce(mut self) -> Result<DiffPoly, BracketError> {
        // double-∂⁻¹ markers must cancel before anything else
        let doubles: Vec<_> = self
            .pairings
            .iter()
            .filter(|(_, _, v)| v.is_zero())
            .collect();
        if !doubles.is_empty() {
            return Err(BracketError::DoubleAntiderivative);
        }

        let mut residues: Vec<(Coeff, DiffPoly, DiffPoly)> = Vec::new();
        for (c, u, v) in std::mem::take(&mut self.pairings) {
            if c.is_zero() || u.is_zero() || v.is_zero() {
                continue;
            }
            match reduce_pairing(&c, &u, &v) {
                Reduced::Local(p) => self.local = self.local.add(&p),
                Reduced::Residue(c, u, v) => residues.push((c, u, v)),
            }
        }

        // group residues by the Euler-image classes of both arguments,
        // orientation fixed by a canonical key with a sign flip on swap
        while let Some((c0, u0, v0)) = residues.pop() {
            let key_u = euler_pair(&u0);
            let key_v = euler_pair(&v0);
            let mut coeff = c0;
            let mut locals = DiffPoly::zero();
            let mut rest = Vec::new();
            for (c, u, v) in residues.drain(..) {
                let ku = euler_pair(&u);
                let kv = euler_pair(&v);
                if ku == key_u && kv == key_v {
                    // same classes: N(u,v) = N(u0,v0) + ∫αv0 - ∫u0β + ∫α∂β
                    let alpha = antiderivative_exact(&u.sub(&u0))
                        .expect("equal Euler classes differ by a total derivative");
                    let beta = antiderivative_exact(&v.sub(&v0))
                        .expect("equal Euler classes differ by a total derivative");
                    let corr = alpha
                        .mul(&v0)
                        .sub(&u0.mul(&beta))
                        .add(&alpha.mul(&beta.total_derivative()));
                    locals = locals.add(&corr.scale(&c));
                    coeff += c;
                } else if ku == key_v && kv == key_u {
                    // swapped orientation: N(u,v) = -N(v,u)
                    let alpha = antiderivative_exact(&v.sub(&u0))
                        .expect("equal Euler classes differ by a total derivative");
                    let beta = antiderivative_exact(&u.sub(&v0))
                        .expect("equal Euler classes differ by a total derivative");
                    let corr = alpha
                        .mul(&v0)
                        .sub(&u0.mul(&beta))
                        .add(&alpha.mul(&beta.total_derivative()));
                    locals = locals.add(&corr.scale(&-&c));
                    coeff += -c;
                } else {
                    rest.push((c, u, v));
                }
            }
            residues = rest;
            self.local = self.local.add(&locals);
            if !coeff.is_zero() {
                return Err(BracketError::ReductionFailure {
                    u: u0.to_string(),
                    v: v0.to_string(),
                    coeff,
                });
            }
        }
        Ok(self.local)
    }
}

enum Reduced {
    Local(DiffPoly),
    Residue(Coeff, DiffPoly, DiffPoly),
}

/// Reduces `c · ∫ (∂⁻¹u) v`.
fn reduce_pairing(c: &Coeff, u: &DiffPoly, v: &DiffPoly) -> Reduced {
    // u exact: ∂⁻¹u is local
    if let Ok(q) = antiderivative_exact(u) {
        return Reduced::Local(q.mul(v).scale(c));
    }
    // v exact: skew-adjointness, ∫(∂⁻¹u)(∂ṽ) = -∫ u ṽ
    if let Ok(q) = antiderivative_exact(v) {
        return Reduced::Local(u.mul(&q).scale(&-c));
    }
    // v ≡ λu mod exact: ∫(∂⁻¹u)u = 0 exactly, so only the shift contributes
    let (eu_r, eu_s) = euler_pair(u);
    let (ev_r, ev_s) = euler_pair(v);
    if let Some(lambda) = proportion(&eu_r, &eu_s, &ev_r, &ev_s) {
        let shift = v.sub(&u.scale(&lambda));
        let beta = antiderivative_exact(&shift).expect("proportional classes differ by ∂");
        // N(u, λu + ∂β) = λN(u,u) + N(u,∂β) = 0 - ∫ u β
        return Reduced::Local(u.mul(&beta).scale(&-c));
    }
    Reduced::Residue(c.clone(), u.clone(), v.clone())
}

/// If (ev_r, ev_s) = λ (eu_r, eu_s) with both nonzero, returns λ.
fn proportion(
    eu_r: &DiffPoly,
    eu_s: &DiffPoly,
    ev_r: &DiffPoly,
    ev_s: &DiffPoly,
) -> Option<Coeff> {
    let lead_u = eu_r
        .monomials()
        .first()
        .or_else(|| eu_s.monomials().first())?;
    let lead_v = ev_r
        .monomials()
        .first()
        .or_else(|| ev_s.monomials().first())?;
    if lead_u.factors != lead_v.factors {
        return None;
    }
    let lambda = &lead_v.coeff / &lead_u.coeff;
    if ev_r == &eu_r.scale(&lambda) && ev_s == &eu_s.scale(&lambda) {
        Some(lambda)
    } else {
        None
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

    fn h0() -> Functional {
        func("H0", poly(&[("1/2", &[(R, 0, 2)]), ("1/2", &[(S, 0, 2)])]))
    }

    #[test]
    fn h0_commutes_with_single_field_functionals() {
        let f = func("r3", poly(&[("1", &[(R, 0, 3)])]));
        let b = poisson_bracket(&h0(), &f).unwrap();
        assert!(b.is_null());
        let g = func(
            "s-stuff",
            poly(&[("2", &[(S, 1, 2), (S, 0, 1)]), ("-1/3", &[(S, -1, 1), (S, 2, 1)])]),
        );
        let b = poisson_bracket(&h0(), &g).unwrap();
        assert!(b.is_null());
    }

    #[test]
    fn transport_rule_on_mixed_functionals() {
        // {H0, ∫ r s} = -2 ∫ r1 s (mod ∂): d/dt ∫ r(y-t)s(y+t) at t=0
        let f = func("rs", poly(&[("1", &[(R, 0, 1), (S, 0, 1)])]));
        let b = poisson_bracket(&h0(), &f).unwrap();
        let expect = func("e", poly(&[("-2", &[(R, 1, 1), (S, 0, 1)])]));
        assert!(crate::functional::functional_equal(&b, &expect));
    }

    #[test]
    fn homological_identity_for_int_rs() {
        // G = -1/2 ∫ r_{-1} s solves {H0,G} + ∫ r s = 0
        let g = func("G", poly(&[("-1/2", &[(R, -1, 1), (S, 0, 1)])]));
        let w = func("W", poly(&[("1", &[(R, 0, 1), (S, 0, 1)])]));
        let b = poisson_bracket(&h0(), &g).unwrap();
        let sum = Functional::new("sum", b.density.add(&w.density)).unwrap();
        assert!(sum.is_null());
    }

    #[test]
    fn skew_symmetry_modulo_derivatives() {
        let f = func(
            "F",
            poly(&[("1", &[(R, 1, 1), (S, 0, 2)]), ("1/3", &[(R, 0, 2)])]),
        );
        let g = func(
            "G",
            poly(&[("-2", &[(R, 0, 1), (S, 1, 1)]), ("1", &[(S, 0, 3)])]),
        );
        let fg = poisson_bracket(&f, &g).unwrap();
        let gf = poisson_bracket(&g, &f).unwrap();
        let sum = Functional::new("sum", fg.density.add(&gf.density)).unwrap();
        assert!(sum.is_null());
    }

    #[test]
    fn bilinearity() {
        let f1 = func("F1", poly(&[("1", &[(R, 0, 2), (S, 0, 1)])]));
        let f2 = func("F2", poly(&[("1", &[(R, 1, 1), (S, 1, 1)])]));
        let g = func("G", poly(&[("1", &[(R, 0, 1), (S, 0, 2)])]));
        let lhs = poisson_bracket(
            &func("F", f1.density.scale(&Coeff::from_int(3)).add(&f2.density)),
            &g,
        )
        .unwrap();
        let rhs = poisson_bracket(&f1, &g)
            .unwrap()
            .density
            .scale(&Coeff::from_int(3))
            .add(&poisson_bracket(&f2, &g).unwrap().density);
        assert!(crate::calculus::is_total_derivative(&lhs.density.sub(&rhs)));
    }

    #[test]
    fn bracket_with_nonlocal_generating_term() {
        // g = -1/32 ∂⁻¹(r^2) s^2 ; {H0, G} ≡ -1/16 r^2 s^2
        let mut expr = NonlocalExpr::zero();
        expr.push_term(
            poly(&[("-1/32", &[(S, 0, 2)])]),
            poly(&[("1", &[(R, 0, 2)])]),
        );
        let g = NonlocalDensity {
            expr,
            name: "G".into(),
        };
        let f = NonlocalDensity::local("H0", h0().density);
        let b = poisson_bracket_nl(&f, &g).unwrap();
        let expect = func("e", poly(&[("-1/16", &[(R, 0, 2), (S, 0, 2)])]));
        assert!(crate::functional::functional_equal(&b, &expect));
    }

    #[test]
    fn jacobi_identity_on_low_degree_triples() {
        let triples = [
            (
                poly(&[("1", &[(R, 0, 1), (S, 0, 1)])]),
                poly(&[("1", &[(R, 0, 2)]), ("1", &[(S, 0, 2)])]),
                poly(&[("1", &[(R, 1, 1), (S, 1, 1)])]),
            ),
            (
                poly(&[("1/2", &[(R, 0, 2)])]),
                poly(&[("1", &[(R, 0, 1), (S, 0, 2)])]),
                poly(&[("1", &[(S, 0, 3)])]),
            ),
            (
                poly(&[("1", &[(R, 1, 2)])]),
                poly(&[("1", &[(R, 0, 1), (S, 0, 1)])]),
                poly(&[("1", &[(R, 0, 1), (S, 1, 1)])]),
            ),
        ];
        for (fp, gp, hp) in triples {
            let f = func("F", fp);
            let g = func("G", gp);
            let h = func("H", hp);
            let a = poisson_bracket(&f, &poisson_bracket(&g, &h).unwrap()).unwrap();
            let b = poisson_bracket(&g, &poisson_bracket(&h, &f).unwrap()).unwrap();
            let c = poisson_bracket(&h, &poisson_bracket(&f, &g).unwrap()).unwrap();
            let total = a.density.add(&b.density).add(&c.density);
            assert!(
                crate::calculus::is_total_derivative(&total),
                "Jacobi identity failed"
            );
        }
    }
}
