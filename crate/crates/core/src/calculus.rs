//! Euler operators, exactness tests and exact jet antiderivatives.
//!
//! The representation of jet variables as potential jets (`u_k` is the
//! (k+1)-th jet of the field potential) makes "is a total derivative" a
//! decidable property: a density is a total derivative of a jet-algebra
//! expression with orders ≥ -1 exactly when the Euler operator with respect to
//! both potentials annihilates it,
//!
//!   E_u(p) = Σ_{k ≥ -1} (-∂)^{k+1} ∂p/∂u_k .
//!
//! The antiderivative itself is produced by greedily integrating the highest
//! jet variable (inverse Leibniz peel) and validated by re-differentiation; a
//! dense linear solve over the finite monomial basis backs the peel up, so
//! correctness never depends on the peeling heuristic.

use crate::coeff::Coeff;
use crate::jet::{Field, JetVar};
use crate::poly::{DiffMono, DiffPoly};
use thiserror::Error;

/// Euler (variational) operator with respect to the potential of `field`.
///
/// Annihilates exactly the total derivatives of the jet algebra.
pub fn euler(p: &DiffPoly, field: Field) -> DiffPoly {
    let mut acc = DiffPoly::zero();
    for v in p.variables_of(field) {
        let partial = p.partial(v);
        // (-∂)^(k+1), k ≥ -1 so the exponent is ≥ 0
        acc = acc.add(&partial.neg_dn((v.order + 1) as u32));
    }
    acc
}

/// Both Euler images at once (R then S).
pub fn euler_pair(p: &DiffPoly) -> (DiffPoly, DiffPoly) {
    (euler(p, Field::R), euler(p, Field::S))
}

/// A density is a total derivative iff both Euler images vanish.
pub fn is_total_derivative(p: &DiffPoly) -> bool {
    euler(p, Field::R).is_zero() && euler(p, Field::S).is_zero()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AntiderivativeError {
    /// The Euler test fails: no jet-algebra antiderivative exists at any
    /// order floor.
    #[error("not a total derivative (Euler image nonzero)")]
    NotTotalDerivative,
    /// An antiderivative would exist one potential level down, i.e. it
    /// requires jet order -2. This is the obstruction signal.
    #[error("antiderivative requires jet order -2")]
    OrderUnderflow,
}

/// Exact antiderivative within the jet algebra (orders ≥ -1).
///
/// On success `total_derivative(q) == p` holds structurally.
pub fn antiderivative_exact(p: &DiffPoly) -> Result<DiffPoly, AntiderivativeError> {
    if p.is_zero() {
        return Ok(DiffPoly::zero());
    }
    if p.has_constant_term() {
        // a nonzero constant is never a total derivative of a decaying density
        return Err(AntiderivativeError::NotTotalDerivative);
    }
    let (er, es) = euler_pair(p);
    if !er.is_zero() || !es.is_zero() {
        // Exact one potential level down iff both Euler images are constants,
        // since E at the lower level is (-∂) ∘ E at this level.
        let const_r = er.total_derivative().is_zero();
        let const_s = es.total_derivative().is_zero();
        return if const_r && const_s {
            Err(AntiderivativeError::OrderUnderflow)
        } else {
            Err(AntiderivativeError::NotTotalDerivative)
        };
    }

    let q = match peel(p) {
        Some(q) => q,
        None => solve_linear(p).expect("Euler-exact density must integrate"),
    };
    debug_assert_eq!(q.total_derivative(), *p, "antiderivative re-differentiation");
    Ok(q)
}

/// Greedy inverse-Leibniz peel. Integrates the top-ranked variable of the
/// remainder until it vanishes. Returns None if it fails to make progress
/// (the exact linear solve then takes over).
fn peel(p: &DiffPoly) -> Option<DiffPoly> {
    let mut rem = p.clone();
    let mut q = DiffPoly::zero();
    let cap = 64 + 16 * p.len();
    for _ in 0..cap {
        if rem.is_zero() {
            return Some(q);
        }
        let top = rem.variables().into_iter().max_by_key(|v| v.peel_key())?;
        if top.order <= -1 {
            // would need order -2; ruled out by the Euler test, defensive stop
            return None;
        }
        let coeff = rem.partial(top);
        if coeff.is_zero() || coeff.uses_top(top) {
            return None;
        }
        let lower = top.lowered().ok()?;
        let q_step = integrate_in(&coeff, lower);
        q = q.add(&q_step);
        rem = rem.sub(&q_step.total_derivative());
    }
    None
}

trait UsesTop {
    fn uses_top(&self, v: JetVar) -> bool;
}

impl UsesTop for DiffPoly {
    /// True if the polynomial still contains `v` or anything ranked above it.
    fn uses_top(&self, v: JetVar) -> bool {
        self.variables().iter().any(|w| w.peel_key() >= v.peel_key())
    }
}

/// Polynomial antiderivative in the single variable `w`:
/// Σ B_i w^i ↦ Σ B_i w^(i+1)/(i+1).
fn integrate_in(b: &DiffPoly, w: JetVar) -> DiffPoly {
    let monos = b
        .monomials()
        .iter()
        .map(|m| {
            let e = m.exponent_of(w);
            let mut factors: Vec<(JetVar, u32)> = m
                .factors
                .iter()
                .copied()
                .filter(|&(v, _)| v != w)
                .collect();
            factors.push((w, e + 1));
            DiffMono::new(
                &m.coeff * &Coeff::frac(1, (e + 1) as i64),
                factors,
            )
        })
        .collect();
    DiffPoly::from_monomials(monos)
}

/// Exact fallback: solve ∂q = p by Gaussian elimination over the monomial
/// basis of candidates (degree preserved by ∂; orders in [-1, n-1]).
fn solve_linear(p: &DiffPoly) -> Option<DiffPoly> {
    let n = p.max_order()?;
    // candidate variables per field: orders -1 ..= n-1
    let mut vars: Vec<JetVar> = Vec::new();
    for f in [Field::R, Field::S] {
        for k in -1..n {
            vars.push(JetVar::new(f, k).ok()?);
        }
    }
    // group target by degree; ∂ preserves total degree
    let mut degrees: Vec<u32> = p.monomials().iter().map(|m| m.degree()).collect();
    degrees.sort_unstable();
    degrees.dedup();

    let mut q = DiffPoly::zero();
    for d in degrees {
        let target = DiffPoly::from_monomials(
            p.monomials()
                .iter()
                .filter(|m| m.degree() == d)
                .cloned()
                .collect(),
        );
        let basis = monomials_of_degree(&vars, d);
        q = q.add(&solve_degree(&target, &basis)?);
    }
    Some(q)
}

fn monomials_of_degree(vars: &[JetVar], d: u32) -> Vec<Vec<(JetVar, u32)>> {
    fn rec(
        vars: &[JetVar],
        idx: usize,
        left: u32,
        cur: &mut Vec<(JetVar, u32)>,
        out: &mut Vec<Vec<(JetVar, u32)>>,
    ) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        if idx == vars.len() {
            return;
        }
        for e in (0..=left).rev() {
            if e > 0 {
                cur.push((vars[idx], e));
            }
            rec(vars, idx + 1, left - e, cur, out);
            if e > 0 {
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(vars, 0, d, &mut Vec::new(), &mut out);
    out
}

fn solve_degree(target: &DiffPoly, basis: &[Vec<(JetVar, u32)>]) -> Option<DiffPoly> {
    use std::collections::BTreeMap;
    // rows: monomial keys of ∂(basis) and target; columns: basis entries
    let mut row_index: BTreeMap<Vec<(u8, i32, u32)>, usize> = BTreeMap::new();
    let mut columns: Vec<Vec<(usize, Coeff)>> = Vec::with_capacity(basis.len());
    let key_of = |m: &DiffMono| -> Vec<(u8, i32, u32)> {
        m.factors
            .iter()
            .map(|&(v, e)| {
                let (f, o) = v.sort_key();
                (f, o, e)
            })
            .collect()
    };
    for b in basis {
        let db = DiffPoly::from_monomials(vec![DiffMono::new(Coeff::one(), b.clone())])
            .total_derivative();
        let mut col = Vec::new();
        for m in db.monomials() {
            let k = key_of(m);
            let next = row_index.len();
            let idx = *row_index.entry(k).or_insert(next);
            col.push((idx, m.coeff.clone()));
        }
        columns.push(col);
    }
    let mut rhs: Vec<(usize, Coeff)> = Vec::new();
    for m in target.monomials() {
        let k = key_of(m);
        let next = row_index.len();
        let idx = *row_index.entry(k).or_insert(next);
        rhs.push((idx, m.coeff.clone()));
    }
    let nrows = row_index.len();
    let ncols = columns.len();
    let mut a = vec![vec![Coeff::zero(); ncols + 1]; nrows];
    for (j, col) in columns.iter().enumerate() {
        for (i, c) in col {
            a[*i][j] = &a[*i][j] + c;
        }
    }
    for (i, c) in &rhs {
        a[*i][ncols] = &a[*i][ncols] + c;
    }
    // Gaussian elimination
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        let piv = (row..nrows).find(|&i| !a[i][col].is_zero());
        let Some(piv) = piv else { continue };
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
        pivot_cols.push((row, col));
        row += 1;
        if row == nrows {
            break;
        }
    }
    // consistency: no pivot in rhs column
    for i in row..nrows {
        if !a[i][ncols].is_zero() {
            return None;
        }
    }
    let mut monos = Vec::new();
    for (r, c) in pivot_cols {
        if !a[r][ncols].is_zero() {
            monos.push(DiffMono::new(a[r][ncols].clone(), basis[c].clone()));
        }
    }
    Some(DiffPoly::from_monomials(monos))
}
