//! Display-form reduction and exact projections modulo total derivatives.
//!
//! Printed densities in the reference material are integrated by parts into
//! particular shapes. `ibp_reduce` reproduces that cosmetic form: it
//! repeatedly eliminates the highest derivative of a monomial when it appears
//! linearly and strictly dominates the other factors, under a fixed term
//! order, stopping at a fixed point (a seen-set guards against oscillation on
//! tied mixed monomials). Equality and coefficient extraction never rely on
//! it: `project_onto_basis` answers those questions exactly through the Euler
//! operator, which is a complete invariant modulo total derivatives.

use crate::calculus::euler_pair;
use crate::coeff::Coeff;
use crate::poly::{DiffMono, DiffPoly};
use std::collections::BTreeSet;

/// Integration-by-parts display reduction (cosmetic, equality-safe: the
/// result always equals the input modulo total derivatives).
pub fn ibp_reduce(p: &DiffPoly) -> DiffPoly {
    let mut cur = p.clone();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for _ in 0..256 {
        if !seen.insert(cur.to_string()) {
            break;
        }
        let Some(next) = ibp_step(&cur) else { break };
        cur = next;
    }
    cur
}

/// One reduction step, or None at a fixed point.
fn ibp_step(p: &DiffPoly) -> Option<DiffPoly> {
    // candidate monomials: top variable v (order ≥ 1, by order-then-field)
    // with exponent 1, every other factor of strictly smaller order
    let mut best: Option<(&DiffMono, crate::jet::JetVar)> = None;
    for m in p.monomials() {
        let Some(&(v, e)) = m.factors.iter().max_by_key(|&&(w, _)| w.peel_key()) else {
            continue;
        };
        if v.order < 1 || e != 1 {
            continue;
        }
        let strictly_dominates = m
            .factors
            .iter()
            .filter(|&&(w, _)| w != v)
            .all(|&(w, _)| w.order < v.order);
        if !strictly_dominates {
            continue;
        }
        match best {
            Some((_, bv)) => {
                if v.peel_key() > bv.peel_key() {
                    best = Some((m, v));
                }
            }
            None => best = Some((m, v)),
        }
    }
    let (m, v) = best?;
    let m = m.clone();
    let below = v.lowered().ok()?;
    // m = c · C · w^e · v  with w = v lowered, C free of w and v:
    //   ≡ -∂(cC) · w^(e+1)/(e+1)  (mod ∂)
    let e = m.exponent_of(below);
    let c_factors: Vec<_> = m
        .factors
        .iter()
        .copied()
        .filter(|&(w, _)| w != v && w != below)
        .collect();
    let c_mono = DiffMono::new(m.coeff.clone(), c_factors);
    let c_poly = DiffPoly::from_monomials(vec![c_mono]);
    let repl = c_poly
        .total_derivative()
        .neg()
        .mul(&DiffPoly::from_monomials(vec![DiffMono::new(
            Coeff::frac(1, (e + 1) as i64),
            vec![(below, e + 1)],
        )]));
    let without = p.sub(&DiffPoly::from_monomials(vec![m]));
    Some(without.add(&repl))
}

/// Exact projection of a density onto the span of given basis densities,
/// modulo total derivatives: solves `p ≡ Σ c_i b_i (mod ∂)` through the Euler
/// images. Returns the coefficients or None when p is not in the span.
pub fn project_onto_basis(p: &DiffPoly, basis: &[DiffPoly]) -> Option<Vec<Coeff>> {
    use std::collections::BTreeMap;
    let keys = |q: &DiffPoly| -> Vec<(u8, Vec<(u8, i32, u32)>, Coeff)> {
        let (er, es) = euler_pair(q);
        let mut out = Vec::new();
        for (tag, e) in [(0u8, er), (1u8, es)] {
            for m in e.monomials() {
                let key: Vec<(u8, i32, u32)> = m
                    .factors
                    .iter()
                    .map(|&(v, ex)| {
                        let (f, o) = v.sort_key();
                        (f, o, ex)
                    })
                    .collect();
                out.push((tag, key, m.coeff.clone()));
            }
        }
        out
    };
    let mut row_index: BTreeMap<(u8, Vec<(u8, i32, u32)>), usize> = BTreeMap::new();
    let mut cols: Vec<Vec<(usize, Coeff)>> = Vec::new();
    for b in basis {
        let mut col = Vec::new();
        for (tag, key, c) in keys(b) {
            let next = row_index.len();
            let idx = *row_index.entry((tag, key)).or_insert(next);
            col.push((idx, c));
        }
        cols.push(col);
    }
    let mut rhs_entries = Vec::new();
    for (tag, key, c) in keys(p) {
        let next = row_index.len();
        let idx = *row_index.entry((tag, key)).or_insert(next);
        rhs_entries.push((idx, c));
    }
    let nrows = row_index.len();
    let ncols = basis.len();
    let mut a = vec![vec![Coeff::zero(); ncols + 1]; nrows.max(1)];
    for (j, col) in cols.iter().enumerate() {
        for (i, c) in col {
            a[*i][j] = &a[*i][j] + c;
        }
    }
    for (i, c) in &rhs_entries {
        a[*i][ncols] = &a[*i][ncols] + c;
    }
    // Gaussian elimination
    let mut row = 0;
    let mut pivots = Vec::new();
    for col in 0..ncols {
        let Some(piv) = (row..nrows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(row, piv);
        let inv = a[row][col].recip();
        for x in a[row].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..nrows {
            if i != row && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in 0..=ncols {
                    let sub = &a[row][j] * &f;
                    a[i][j] = &a[i][j] - &sub;
                }
            }
        }
        pivots.push((row, col));
        row += 1;
    }
    for i in row..nrows {
        if !a[i][ncols].is_zero() {
            return None; // not in the span
        }
    }
    let mut coeffs = vec![Coeff::zero(); ncols];
    for (r, c) in pivots {
        coeffs[c] = a[r][ncols].clone();
    }
    Some(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::is_total_derivative;
    use crate::jet::Field::{R, S};
    use crate::poly::poly;

    #[test]
    fn reduce_eliminates_linear_top_derivative() {
        // ∫ r^2 r2 ≡ ∫ -2 r r1^2
        let p = poly(&[("1", &[(R, 0, 2), (R, 2, 1)])]);
        let red = ibp_reduce(&p);
        assert_eq!(red, poly(&[("-2", &[(R, 0, 1), (R, 1, 2)])]));
        assert!(is_total_derivative(&p.sub(&red)));
    }

    #[test]
    fn reduce_is_class_preserving_on_mixed_densities() {
        let p = poly(&[
            ("1", &[(R, 2, 1), (R, 0, 1), (S, 0, 1)]),
            ("1/3", &[(R, 1, 1), (S, 1, 1)]),
        ]);
        let red = ibp_reduce(&p);
        assert!(is_total_derivative(&p.sub(&red)));
    }

    #[test]
    fn projection_extracts_z2_style_coefficients() {
        // p ≡ a u u1^2 + b u2^2 + c u^4 with an exact-derivative pollution
        let basis = [
            poly(&[("1", &[(R, 0, 1), (R, 1, 2)])]),
            poly(&[("1", &[(R, 2, 2)])]),
            poly(&[("1", &[(R, 0, 4)])]),
        ];
        let clean = basis[0]
            .scale(&Coeff::frac(-5, 24))
            .add(&basis[1].scale(&Coeff::frac(19, 720)))
            .add(&basis[2].scale(&Coeff::frac(-1, 64)));
        // pollute with ∂(r r1 r2)
        let p = clean.add(&poly(&[("1", &[(R, 0, 1), (R, 1, 1), (R, 2, 1)])]).total_derivative());
        let c = project_onto_basis(&p, &basis).unwrap();
        assert_eq!(c[0], Coeff::frac(-5, 24));
        assert_eq!(c[1], Coeff::frac(19, 720));
        assert_eq!(c[2], Coeff::frac(-1, 64));
        // and something outside the span projects to None
        assert!(project_onto_basis(&poly(&[("1", &[(R, 0, 1), (S, 0, 1)])]), &basis).is_none());
    }
}
