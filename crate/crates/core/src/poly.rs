//! Differential polynomials in the jet variables of the two fields.
//!
//! `DiffPoly` is the canonical-form workhorse of the whole engine: a sum of
//! monomials with exact rational coefficients, each monomial a finite multiset
//! of jet variables. Canonical form means factors sorted by (field, order),
//! monomials sorted by a fixed term order, no duplicate factor multisets and no
//! zero coefficients; equality is structural equality of canonical forms.
//!
//! Constant (degree-0) monomials are representable here because intermediate
//! computations (Euler operators, partial derivatives) need them; `Functional`
//! forbids them in densities, where they would not be integrable over the line.

use crate::coeff::Coeff;
use crate::jet::{jv, Field, JetVar};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// A single monomial: coefficient times a multiset of jet variables.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DiffMono {
    pub coeff: Coeff,
    /// Sorted by (field, order); exponents ≥ 1.
    pub factors: Vec<(JetVar, u32)>,
}

impl DiffMono {
    pub fn constant(c: Coeff) -> Self {
        DiffMono {
            coeff: c,
            factors: Vec::new(),
        }
    }

    pub fn new(coeff: Coeff, mut factors: Vec<(JetVar, u32)>) -> Self {
        factors.retain(|&(_, e)| e > 0);
        factors.sort_by_key(|&(v, _)| v.sort_key());
        // merge repeated variables
        let mut merged: Vec<(JetVar, u32)> = Vec::with_capacity(factors.len());
        for (v, e) in factors {
            match merged.last_mut() {
                Some((lv, le)) if *lv == v => *le += e,
                _ => merged.push((v, e)),
            }
        }
        DiffMono {
            coeff,
            factors: merged,
        }
    }

    /// Total degree (sum of exponents).
    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e).sum()
    }

    pub fn is_constant(&self) -> bool {
        self.factors.is_empty()
    }

    /// Highest jet order present, `None` for constants.
    pub fn max_order(&self) -> Option<i32> {
        self.factors.iter().map(|&(v, _)| v.order).max()
    }

    pub fn exponent_of(&self, v: JetVar) -> u32 {
        self.factors
            .iter()
            .find(|&&(w, _)| w == v)
            .map_or(0, |&(_, e)| e)
    }

    /// True when every factor belongs to `field`.
    pub fn is_pure(&self, field: Field) -> bool {
        self.factors.iter().all(|&(v, _)| v.field == field)
    }

    /// True when factors from both fields appear.
    pub fn is_mixed(&self) -> bool {
        !self.is_pure(Field::R) && !self.is_pure(Field::S)
    }

    pub fn uses_field(&self, field: Field) -> bool {
        self.factors.iter().any(|&(v, _)| v.field == field)
    }

    /// The factor multiset, ignoring the coefficient.
    pub fn key(&self) -> Vec<(JetVar, u32)> {
        self.factors.clone()
    }

    fn mul(&self, other: &DiffMono) -> DiffMono {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        DiffMono::new(&self.coeff * &other.coeff, factors)
    }

    /// Splits the factors by field: (pure-R part, pure-S part), coefficient on
    /// the R part. Used by the homological solver (Lemma-style P₁·P₂ split).
    pub fn split_fields(&self) -> (DiffMono, DiffMono) {
        let r: Vec<_> = self
            .factors
            .iter()
            .copied()
            .filter(|&(v, _)| v.field == Field::R)
            .collect();
        let s: Vec<_> = self
            .factors
            .iter()
            .copied()
            .filter(|&(v, _)| v.field == Field::S)
            .collect();
        (
            DiffMono::new(self.coeff.clone(), r),
            DiffMono::new(Coeff::one(), s),
        )
    }
}

/// Canonical differential polynomial.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct DiffPoly {
    monos: Vec<DiffMono>,
}

impl DiffPoly {
    pub fn zero() -> Self {
        DiffPoly { monos: Vec::new() }
    }

    pub fn constant(c: Coeff) -> Self {
        DiffPoly::from_monomials(vec![DiffMono::constant(c)])
    }

    pub fn one() -> Self {
        DiffPoly::constant(Coeff::one())
    }

    /// Single jet variable with coefficient 1.
    pub fn var(v: JetVar) -> Self {
        DiffPoly::from_monomials(vec![DiffMono::new(Coeff::one(), vec![(v, 1)])])
    }

    pub fn from_monomials(monos: Vec<DiffMono>) -> Self {
        let mut map: BTreeMap<Vec<(u8, i32, u32)>, (DiffMono, Coeff)> = BTreeMap::new();
        for m in monos {
            let key: Vec<(u8, i32, u32)> = m
                .factors
                .iter()
                .map(|&(v, e)| {
                    let (f, o) = v.sort_key();
                    (f, o, e)
                })
                .collect();
            match map.get_mut(&key) {
                Some((_, c)) => *c += m.coeff.clone(),
                None => {
                    let c = m.coeff.clone();
                    map.insert(key, (m, c));
                }
            }
        }
        let monos = map
            .into_values()
            .filter(|(_, c)| !c.is_zero())
            .map(|(mut m, c)| {
                m.coeff = c;
                m
            })
            .collect();
        DiffPoly { monos }
    }

    pub fn monomials(&self) -> &[DiffMono] {
        &self.monos
    }

    pub fn is_zero(&self) -> bool {
        self.monos.is_empty()
    }

    pub fn len(&self) -> usize {
        self.monos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monos.is_empty()
    }

    pub fn add(&self, other: &DiffPoly) -> DiffPoly {
        let mut m = self.monos.clone();
        m.extend(other.monos.iter().cloned());
        DiffPoly::from_monomials(m)
    }

    pub fn sub(&self, other: &DiffPoly) -> DiffPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> DiffPoly {
        self.scale(&Coeff::from_int(-1))
    }

    pub fn scale(&self, c: &Coeff) -> DiffPoly {
        if c.is_zero() {
            return DiffPoly::zero();
        }
        DiffPoly {
            monos: self
                .monos
                .iter()
                .map(|m| DiffMono {
                    coeff: &m.coeff * c,
                    factors: m.factors.clone(),
                })
                .collect(),
        }
    }

    pub fn mul(&self, other: &DiffPoly) -> DiffPoly {
        let mut out = Vec::with_capacity(self.monos.len() * other.monos.len());
        for a in &self.monos {
            for b in &other.monos {
                out.push(a.mul(b));
            }
        }
        DiffPoly::from_monomials(out)
    }

    pub fn mul_mono(&self, m: &DiffMono) -> DiffPoly {
        DiffPoly::from_monomials(self.monos.iter().map(|a| a.mul(m)).collect())
    }

    pub fn pow(&self, e: u32) -> DiffPoly {
        let mut out = DiffPoly::one();
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Total spatial derivative: Leibniz rule, each `u_k ↦ u_{k+1}`.
    pub fn total_derivative(&self) -> DiffPoly {
        let mut out = Vec::new();
        for m in &self.monos {
            for i in 0..m.factors.len() {
                let (v, e) = m.factors[i];
                let mut factors = m.factors.clone();
                if e == 1 {
                    factors.remove(i);
                } else {
                    factors[i].1 = e - 1;
                }
                factors.push((v.raised(), 1));
                out.push(DiffMono::new(
                    &m.coeff * &Coeff::from_int(e as i64),
                    factors,
                ));
            }
        }
        DiffPoly::from_monomials(out)
    }

    /// Iterated total derivative.
    pub fn dn(&self, n: u32) -> DiffPoly {
        let mut p = self.clone();
        for _ in 0..n {
            p = p.total_derivative();
        }
        p
    }

    /// `(-∂)^n`.
    pub fn neg_dn(&self, n: u32) -> DiffPoly {
        let p = self.dn(n);
        if n % 2 == 0 {
            p
        } else {
            p.neg()
        }
    }

    /// Partial derivative with respect to one jet variable.
    pub fn partial(&self, v: JetVar) -> DiffPoly {
        let mut out = Vec::new();
        for m in &self.monos {
            if let Some(pos) = m.factors.iter().position(|&(w, _)| w == v) {
                let (_, e) = m.factors[pos];
                let mut factors = m.factors.clone();
                if e == 1 {
                    factors.remove(pos);
                } else {
                    factors[pos].1 = e - 1;
                }
                out.push(DiffMono::new(
                    &m.coeff * &Coeff::from_int(e as i64),
                    factors,
                ));
            }
        }
        DiffPoly::from_monomials(out)
    }

    /// All distinct jet variables appearing in the polynomial.
    pub fn variables(&self) -> Vec<JetVar> {
        let mut vars: Vec<JetVar> = Vec::new();
        for m in &self.monos {
            for &(v, _) in &m.factors {
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
        }
        vars.sort();
        vars
    }

    /// Variables of one field, sorted.
    pub fn variables_of(&self, field: Field) -> Vec<JetVar> {
        self.variables()
            .into_iter()
            .filter(|v| v.field == field)
            .collect()
    }

    pub fn max_order(&self) -> Option<i32> {
        self.monos.iter().filter_map(|m| m.max_order()).max()
    }

    pub fn min_order(&self) -> Option<i32> {
        self.monos
            .iter()
            .flat_map(|m| m.factors.iter().map(|&(v, _)| v.order))
            .min()
    }

    pub fn max_degree(&self) -> u32 {
        self.monos.iter().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn uses_field(&self, field: Field) -> bool {
        self.monos.iter().any(|m| m.uses_field(field))
    }

    pub fn is_pure(&self, field: Field) -> bool {
        self.monos.iter().all(|m| m.is_pure(field))
    }

    pub fn has_constant_term(&self) -> bool {
        self.monos.iter().any(|m| m.is_constant())
    }

    /// Mirror map `r ↔ s` (exchange the two fields at equal orders).
    pub fn swap_fields(&self) -> DiffPoly {
        DiffPoly::from_monomials(
            self.monos
                .iter()
                .map(|m| {
                    DiffMono::new(
                        m.coeff.clone(),
                        m.factors
                            .iter()
                            .map(|&(v, e)| (jv(v.field.other(), v.order), e))
                            .collect(),
                    )
                })
                .collect(),
        )
    }

    /// Spatial reflection `y → -y`: each jet variable of order k picks up
    /// `(-1)^(k+1)` relative to the potential (order -1) variable, i.e.
    /// `u_k ↦ (-1)^k u_k` with `u_{-1} ↦ -u_{-1}`.
    pub fn reflect(&self) -> DiffPoly {
        DiffPoly::from_monomials(
            self.monos
                .iter()
                .map(|m| {
                    let mut sign = 1i64;
                    for &(v, e) in &m.factors {
                        let k = v.order.rem_euclid(2);
                        if k == 1 && e % 2 == 1 {
                            sign = -sign;
                        }
                    }
                    DiffMono {
                        coeff: &m.coeff * &Coeff::from_int(sign),
                        factors: m.factors.clone(),
                    }
                })
                .collect(),
        )
    }
}

impl fmt::Display for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.monos.is_empty() {
            return write!(f, "0");
        }
        for (i, m) in self.monos.iter().enumerate() {
            let c = &m.coeff;
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if m.is_constant() {
                write!(f, "{}", mag)?;
                continue;
            }
            let mut wrote = false;
            if !mag.is_one() {
                write!(f, "{}", mag)?;
                wrote = true;
            }
            for &(v, e) in &m.factors {
                if wrote {
                    write!(f, "*")?;
                }
                write!(f, "{}", v)?;
                if e > 1 {
                    write!(f, "^{}", e)?;
                }
                wrote = true;
            }
        }
        Ok(())
    }
}

// --- JSON schema -----------------------------------------------------------
//
// {"monomials":[{"coeff":{"num":"-1","den":"12"},
//                "vars":[{"field":"r","order":1,"power":2}]}]}

#[derive(Serialize, Deserialize)]
struct VarRepr {
    field: Field,
    order: i32,
    power: u32,
}

#[derive(Serialize, Deserialize)]
struct MonoRepr {
    coeff: Coeff,
    vars: Vec<VarRepr>,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    monomials: Vec<MonoRepr>,
}

impl Serialize for DiffPoly {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let repr = PolyRepr {
            monomials: self
                .monos
                .iter()
                .map(|m| MonoRepr {
                    coeff: m.coeff.clone(),
                    vars: m
                        .factors
                        .iter()
                        .map(|&(v, e)| VarRepr {
                            field: v.field,
                            order: v.order,
                            power: e,
                        })
                        .collect(),
                })
                .collect(),
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DiffPoly {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = PolyRepr::deserialize(deserializer)?;
        let mut monos = Vec::new();
        for m in repr.monomials {
            let mut factors = Vec::new();
            for v in m.vars {
                let var = JetVar::new(v.field, v.order).map_err(serde::de::Error::custom)?;
                factors.push((var, v.power));
            }
            monos.push(DiffMono::new(m.coeff, factors));
        }
        Ok(DiffPoly::from_monomials(monos))
    }
}

/// Convenience builder: `poly(&[("-1/12", &[(R,1,2)]), ...])` with triples
/// (field, order, power).
pub fn poly(terms: &[(&str, &[(Field, i32, u32)])]) -> DiffPoly {
    let monos = terms
        .iter()
        .map(|(c, vars)| {
            DiffMono::new(
                c.parse().expect("bad coefficient literal"),
                vars.iter().map(|&(f, o, e)| (jv(f, o), e)).collect(),
            )
        })
        .collect();
    DiffPoly::from_monomials(monos)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Field::{R, S};

    #[test]
    fn distributivity() {
        // (r + s) * r1 = r*r1 + s*r1
        let sum = poly(&[("1", &[(R, 0, 1)]), ("1", &[(S, 0, 1)])]);
        let r1 = poly(&[("1", &[(R, 1, 1)])]);
        let expect = poly(&[("1", &[(R, 0, 1), (R, 1, 1)]), ("1", &[(R, 1, 1), (S, 0, 1)])]);
        assert_eq!(sum.mul(&r1), expect);
    }

    #[test]
    fn cancellation_gives_empty_polynomial() {
        let a = poly(&[("-1/12", &[(R, 1, 2)])]);
        let b = poly(&[("1/12", &[(R, 1, 2)])]);
        assert!(a.add(&b).is_zero());
    }

    #[test]
    fn exponent_addition() {
        let r2 = poly(&[("1", &[(R, 0, 2)])]);
        assert_eq!(r2.mul(&r2), poly(&[("1", &[(R, 0, 4)])]));
    }

    #[test]
    fn scale_by_zero_is_empty() {
        let p = poly(&[("3", &[(R, 1, 1)])]);
        assert!(p.scale(&Coeff::zero()).is_zero());
    }

    #[test]
    fn total_derivative_basics() {
        // r -> r1
        let r = poly(&[("1", &[(R, 0, 1)])]);
        assert_eq!(r.total_derivative(), poly(&[("1", &[(R, 1, 1)])]));
        // r*r1 -> r1^2 + r*r2
        let p = poly(&[("1", &[(R, 0, 1), (R, 1, 1)])]);
        let expect = poly(&[("1", &[(R, 1, 2)]), ("1", &[(R, 0, 1), (R, 2, 1)])]);
        assert_eq!(p.total_derivative(), expect);
        // r_{-1}*s^2 -> r*s^2 + 2 r_{-1}*s*s1
        let p = poly(&[("1", &[(R, -1, 1), (S, 0, 2)])]);
        let expect = poly(&[
            ("1", &[(R, 0, 1), (S, 0, 2)]),
            ("2", &[(R, -1, 1), (S, 0, 1), (S, 1, 1)]),
        ]);
        assert_eq!(p.total_derivative(), expect);
    }

    #[test]
    fn leibniz_on_products() {
        let a = poly(&[("1", &[(R, 0, 1), (S, 1, 1)])]);
        let b = poly(&[("1/3", &[(R, 2, 2)]), ("-2", &[(S, 0, 1)])]);
        let lhs = a.mul(&b).total_derivative();
        let rhs = a
            .total_derivative()
            .mul(&b)
            .add(&a.mul(&b.total_derivative()));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn json_schema_shape() {
        let p = poly(&[("-1/12", &[(R, 1, 2)])]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(
            s,
            r#"{"monomials":[{"coeff":{"num":"-1","den":"12"},"vars":[{"field":"r","order":1,"power":2}]}]}"#
        );
        let back: DiffPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn reflect_is_an_involution_and_flips_odd_orders() {
        let p = poly(&[
            ("1", &[(R, 1, 1), (S, 0, 1)]),
            ("2", &[(R, -1, 1), (S, 2, 1)]),
        ]);
        let q = p.reflect();
        assert_eq!(q.reflect(), p);
        // r1*s flips sign (one odd-order factor), r_{-1}*s2 flips (order -1 odd)
        let expect = poly(&[
            ("-1", &[(R, 1, 1), (S, 0, 1)]),
            ("-2", &[(R, -1, 1), (S, 2, 1)]),
        ]);
        assert_eq!(q, expect);
    }
}
