//! Exact rational coefficients.
//!
//! Every coefficient in the symbolic layer is a `Coeff`: an arbitrary-precision
//! rational kept in lowest terms with a positive denominator. No floating point
//! enters the algebra; the single conversion to `f64` happens in the evaluation
//! plan compiler.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

/// Arbitrary-precision rational, always reduced, denominator > 0.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coeff(BigRational);

impl Coeff {
    pub fn zero() -> Self {
        Coeff(BigRational::zero())
    }

    pub fn one() -> Self {
        Coeff(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Coeff(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num/den` with `den != 0`.
    pub fn frac(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Coeff(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "division by zero coefficient");
        Coeff(self.0.recip())
    }

    pub fn abs(&self) -> Self {
        Coeff(self.0.abs())
    }

    /// The one controlled exact→floating conversion point.
    pub fn to_f64(&self) -> f64 {
        // BigRational::to_f64 handles large numerators/denominators by scaling.
        self.0.to_f64().expect("rational not representable as f64")
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn pow_u(&self, e: u32) -> Self {
        let mut out = Coeff::one();
        for _ in 0..e {
            out *= self.clone();
        }
        out
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Parses `"-5/24"`, `"19/720"`, `"3"`.
impl FromStr for Coeff {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        let num = BigInt::from_str(n.trim()).map_err(|e| e.to_string())?;
        let den = BigInt::from_str(d.trim()).map_err(|e| e.to_string())?;
        if den.is_zero() {
            return Err("zero denominator".to_string());
        }
        Ok(Coeff(BigRational::new(num, den)))
    }
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for Coeff {
            type Output = Coeff;
            fn $method(self, rhs: Coeff) -> Coeff {
                Coeff(self.0 $op rhs.0)
            }
        }
        impl<'a> $trait<&'a Coeff> for &'a Coeff {
            type Output = Coeff;
            fn $method(self, rhs: &'a Coeff) -> Coeff {
                Coeff(&self.0 $op &rhs.0)
            }
        }
    };
}

impl_binop!(Add, add, +);
impl_binop!(Sub, sub, -);
impl_binop!(Mul, mul, *);
impl_binop!(Div, div, /);

impl Neg for Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        Coeff(-self.0)
    }
}

impl Neg for &Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        Coeff(-&self.0)
    }
}

impl AddAssign for Coeff {
    fn add_assign(&mut self, rhs: Coeff) {
        self.0 += rhs.0;
    }
}

impl SubAssign for Coeff {
    fn sub_assign(&mut self, rhs: Coeff) {
        self.0 -= rhs.0;
    }
}

impl MulAssign for Coeff {
    fn mul_assign(&mut self, rhs: Coeff) {
        self.0 *= rhs.0;
    }
}

#[derive(Serialize, Deserialize)]
struct CoeffRepr {
    num: String,
    den: String,
}

/// JSON form: `{"num":"-1","den":"12"}` — integers as decimal strings.
impl Serialize for Coeff {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        CoeffRepr {
            num: self.0.numer().to_string(),
            den: self.0.denom().to_string(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Coeff {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = CoeffRepr::deserialize(deserializer)?;
        let num = BigInt::from_str(&repr.num).map_err(DeError::custom)?;
        let den = BigInt::from_str(&repr.den).map_err(DeError::custom)?;
        if den.is_zero() {
            return Err(DeError::custom("zero denominator"));
        }
        Ok(Coeff(BigRational::new(num, den)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_and_positive_denominator() {
        let c = Coeff::frac(2, -4);
        assert_eq!(c.to_string(), "-1/2");
        assert_eq!(c, "-1/2".parse().unwrap());
    }

    #[test]
    fn json_roundtrip_is_bit_exact() {
        let c = Coeff::frac(-299, 389);
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(s, r#"{"num":"-299","den":"389"}"#);
        let back: Coeff = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn paper_coefficients_parse() {
        for s in ["-1/12", "1/4", "-5/24", "19/720", "-1/64", "299/389"] {
            let c: Coeff = s.parse().unwrap();
            assert_eq!(c.to_string(), s);
        }
    }
}
