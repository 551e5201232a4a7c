//! Exact rational edge weights.
//!
//! Every capacity and length in this crate is an arbitrary-precision rational.
//! All reductions halve, add and compare weights without rounding, so graph
//! equality and table equality are always decidable exactly.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact non-negative rational weight. Invariant: value >= 0.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Weight(BigRational);

impl Weight {
    pub fn zero() -> Self {
        Weight(BigRational::zero())
    }

    pub fn one() -> Self {
        Weight(BigRational::one())
    }

    pub fn from_int(n: u64) -> Self {
        Weight(BigRational::from_integer(BigInt::from(n)))
    }

    /// Builds num/den. Panics on den == 0 or a negative value.
    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "weight denominator must be nonzero");
        let r = BigRational::new(BigInt::from(num), BigInt::from(den));
        assert!(!r.is_negative(), "weights are non-negative");
        Weight(r)
    }

    /// Wraps an exact rational. Panics on a negative value.
    pub fn from_rational(r: BigRational) -> Self {
        assert!(!r.is_negative(), "weights are non-negative");
        Weight(r)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn halve(&self) -> Self {
        Weight(&self.0 / BigRational::from_integer(BigInt::from(2)))
    }

    /// Exact difference; panics if `other` exceeds `self`.
    pub fn checked_sub(&self, other: &Weight) -> Weight {
        let r = &self.0 - &other.0;
        assert!(!r.is_negative(), "weight subtraction went negative");
        Weight(r)
    }

    pub fn min_of(a: &Weight, b: &Weight) -> Weight {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    /// Least common multiple of the denominators of `ws` (1 for empty input).
    pub fn denominator_lcm(ws: &[&Weight]) -> BigInt {
        let mut l = BigInt::one();
        for w in ws {
            l = num_integer::lcm(l, w.0.denom().clone());
        }
        l
    }

    /// self * lcm, which must clear the denominator; returns the integer.
    pub fn scaled_int(&self, lcm: &BigInt) -> BigInt {
        let scaled = &self.0 * BigRational::from_integer(lcm.clone());
        assert!(scaled.is_integer(), "lcm does not clear the denominator");
        scaled.to_integer()
    }
}

impl Add for Weight {
    type Output = Weight;
    fn add(self, rhs: Weight) -> Weight {
        Weight(self.0 + rhs.0)
    }
}

impl<'a> Add<&'a Weight> for &Weight {
    type Output = Weight;
    fn add(self, rhs: &'a Weight) -> Weight {
        Weight(&self.0 + &rhs.0)
    }
}

impl AddAssign<&Weight> for Weight {
    fn add_assign(&mut self, rhs: &Weight) {
        self.0 += &rhs.0;
    }
}

impl Sub for Weight {
    type Output = Weight;
    fn sub(self, rhs: Weight) -> Weight {
        self.checked_sub(&rhs)
    }
}

impl Mul for Weight {
    type Output = Weight;
    fn mul(self, rhs: Weight) -> Weight {
        Weight(self.0 * rhs.0)
    }
}

impl Div for Weight {
    type Output = Weight;
    fn div(self, rhs: Weight) -> Weight {
        assert!(!rhs.is_zero(), "division by zero weight");
        Weight(self.0 / rhs.0)
    }
}

impl fmt::Display for Weight {
    /// Prints `num` for integers, `num/den` otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Debug, thiserror::Error)]
#[error("bad weight literal {0:?}")]
pub struct ParseWeightError(pub String);

impl FromStr for Weight {
    type Err = ParseWeightError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ParseWeightError(s.to_string());
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        let num: BigInt = num.parse().map_err(|_| bad())?;
        let den: BigInt = den.parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        let r = BigRational::new(num, den);
        if r.is_negative() {
            return Err(bad());
        }
        Ok(Weight(r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halving_is_exact() {
        let w = Weight::ratio(1, 3);
        let h = w.halve();
        assert_eq!(&h + &h, w);
    }

    #[test]
    fn display_round_trips() {
        for s in ["0", "7", "5/2", "1/3"] {
            let w: Weight = s.parse().unwrap();
            assert_eq!(w.to_string(), s);
        }
        // Non-canonical input normalizes.
        let w: Weight = "4/2".parse().unwrap();
        assert_eq!(w.to_string(), "2");
    }

    #[test]
    fn rejects_negative_and_zero_den() {
        assert!("-1".parse::<Weight>().is_err());
        assert!("1/0".parse::<Weight>().is_err());
        assert!("1/-2".parse::<Weight>().is_err());
    }

    #[test]
    fn lcm_scaling_clears_denominators() {
        let a = Weight::ratio(1, 6);
        let b = Weight::ratio(3, 4);
        let l = Weight::denominator_lcm(&[&a, &b]);
        assert_eq!(l, BigInt::from(12));
        assert_eq!(a.scaled_int(&l), BigInt::from(2));
        assert_eq!(b.scaled_int(&l), BigInt::from(9));
    }
}
