//! Jet variables for the two characteristic fields.
//!
//! A jet variable `r_k` (resp. `s_k`) stands for the k-th spatial derivative of
//! the field, with `k = -1` denoting the antiderivative `∂⁻¹r`. Internally a
//! variable of order `k` is the (k+1)-th jet of the field potential, so
//! `∂ r_{-1} = r` holds structurally. Order `-2` does not exist in the algebra:
//! requesting it is the obstruction signal, reported as an error and never
//! represented.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// The two characteristic fields `r` (right-moving) and `s` (left-moving).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum Field {
    #[serde(rename = "r")]
    R,
    #[serde(rename = "s")]
    S,
}

impl Field {
    pub fn other(self) -> Field {
        match self {
            Field::R => Field::S,
            Field::S => Field::R,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Field::R => "r",
            Field::S => "s",
        }
    }
}

/// Raised when a construction would need jet order ≤ -2 (the operator ∂⁻² is
/// not defined on the function spaces in play).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("jet order underflow: {field:?} at order {order} (order -2 is not representable)")]
pub struct OrderUnderflow {
    pub field: Field,
    pub order: i32,
}

/// One jet variable: a field together with a derivative order ≥ -1.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct JetVar {
    pub field: Field,
    pub order: i32,
}

impl JetVar {
    pub fn new(field: Field, order: i32) -> Result<JetVar, OrderUnderflow> {
        if order < -1 {
            Err(OrderUnderflow { field, order })
        } else {
            Ok(JetVar { field, order })
        }
    }

    /// Derivative raises the order; always valid.
    pub fn raised(self) -> JetVar {
        JetVar {
            field: self.field,
            order: self.order + 1,
        }
    }

    /// Antiderivative lowers the order; fails at the -1 floor.
    pub fn lowered(self) -> Result<JetVar, OrderUnderflow> {
        JetVar::new(self.field, self.order - 1)
    }

    /// Deterministic key used for canonical factor ordering: field, then order.
    pub fn sort_key(self) -> (u8, i32) {
        let f = match self.field {
            Field::R => 0,
            Field::S => 1,
        };
        (f, self.order)
    }

    /// Ranking used by the antiderivative peel and display reduction:
    /// order first (higher derivatives dominate), field breaks ties.
    pub fn peel_key(self) -> (i32, u8) {
        let f = match self.field {
            Field::R => 0,
            Field::S => 1,
        };
        (self.order, f)
    }
}

impl PartialOrd for JetVar {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for JetVar {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl fmt::Display for JetVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.order {
            0 => write!(f, "{}", self.field.name()),
            k => write!(f, "{}{}", self.field.name(), k),
        }
    }
}

/// Shorthand constructor for orders known to be ≥ -1.
pub fn jv(field: Field, order: i32) -> JetVar {
    JetVar::new(field, order).expect("jet order below -1")
}
