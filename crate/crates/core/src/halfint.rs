use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_rational::Rational64;
use serde::{Serialize, Serializer};

/// An exact half-integer, stored as twice its value.
///
/// Gromov products and four-point constants of integer metrics are always
/// multiples of one half; keeping the doubled value avoids any rounding.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt(i64);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);

    pub const fn from_doubled(doubled: i64) -> Self {
        HalfInt(doubled)
    }

    pub const fn from_int(v: i64) -> Self {
        HalfInt(2 * v)
    }

    pub const fn doubled(self) -> i64 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn to_rational(self) -> Rational64 {
        Rational64::new(self.0, 2)
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn abs(self) -> Self {
        HalfInt(self.0.abs())
    }

    /// Multiply by an integer.
    pub fn scale(self, k: i64) -> Self {
        HalfInt(self.0 * k)
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 - rhs.0)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            let sign = if self.0 < 0 { "-" } else { "" };
            write!(f, "{}{}.5", sign, self.0.abs() / 2)
        }
    }
}

// Serialized as a decimal string so consumers never see a float.
impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_is_exact_decimal() {
        assert_eq!(HalfInt::from_doubled(3).to_string(), "1.5");
        assert_eq!(HalfInt::from_doubled(-3).to_string(), "-1.5");
        assert_eq!(HalfInt::from_doubled(-1).to_string(), "-0.5");
        assert_eq!(HalfInt::from_int(4).to_string(), "4");
    }

    #[test]
    fn arithmetic() {
        let a = HalfInt::from_doubled(3);
        let b = HalfInt::from_int(1);
        assert_eq!(a + b, HalfInt::from_doubled(5));
        assert_eq!(a - b, HalfInt::from_doubled(1));
        assert_eq!(a.scale(16), HalfInt::from_int(24));
        assert_eq!(a.to_rational(), Rational64::new(3, 2));
    }
}
