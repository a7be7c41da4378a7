//! Exact rational scalars on a 128-bit signed range.
//!
//! Every value is kept in lowest terms with a positive denominator. The
//! `checked_*` methods report overflow and division by zero as errors; the
//! operator impls (`+`, `-`, `*`, `/`) panic with an explicit message
//! instead of wrapping, which keeps simulation code readable.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ArithError;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i128,
    den: i128,
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

impl Rational {
    pub const ZERO: Rational = Rational { num: 0, den: 1 };
    pub const ONE: Rational = Rational { num: 1, den: 1 };

    /// Builds `num / den` in lowest terms.
    pub fn new(num: i128, den: i128) -> Result<Self, ArithError> {
        if den == 0 {
            return Err(ArithError::DivisionByZero);
        }
        let g = gcd(num, den);
        let (mut num, mut den) = (num / g, den / g);
        if den < 0 {
            num = num.checked_neg().ok_or(ArithError::Overflow)?;
            den = den.checked_neg().ok_or(ArithError::Overflow)?;
        }
        Ok(Rational { num, den })
    }

    /// Panicking shorthand for literals in code and tests.
    pub fn frac(num: i128, den: i128) -> Self {
        Self::new(num, den).expect("invalid rational literal")
    }

    pub const fn int(n: i128) -> Self {
        Rational { num: n, den: 1 }
    }

    pub fn numer(&self) -> i128 {
        self.num
    }

    pub fn denom(&self) -> i128 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_positive(&self) -> bool {
        self.num > 0
    }

    pub fn is_negative(&self) -> bool {
        self.num < 0
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    pub fn abs(self) -> Self {
        Rational {
            num: self.num.abs(),
            den: self.den,
        }
    }

    /// `max(self, 0)`.
    pub fn pos_part(self) -> Self {
        if self.num > 0 {
            self
        } else {
            Self::ZERO
        }
    }

    pub fn floor(self) -> i128 {
        self.num.div_euclid(self.den)
    }

    pub fn ceil(self) -> i128 {
        -(-self).floor()
    }

    pub fn recip(self) -> Result<Self, ArithError> {
        Self::new(self.den, self.num)
    }

    pub fn checked_add(self, rhs: Self) -> Result<Self, ArithError> {
        // a/b + c/d with g = gcd(b, d): (a*(d/g) + c*(b/g)) / (b/g*d)
        let g = gcd(self.den, rhs.den);
        let lhs_scale = rhs.den / g;
        let rhs_scale = self.den / g;
        let a = self.num.checked_mul(lhs_scale).ok_or(ArithError::Overflow)?;
        let c = rhs.num.checked_mul(rhs_scale).ok_or(ArithError::Overflow)?;
        let num = a.checked_add(c).ok_or(ArithError::Overflow)?;
        let den = self.den.checked_mul(lhs_scale).ok_or(ArithError::Overflow)?;
        Self::new(num, den)
    }

    pub fn checked_sub(self, rhs: Self) -> Result<Self, ArithError> {
        self.checked_add(rhs.checked_neg()?)
    }

    pub fn checked_neg(self) -> Result<Self, ArithError> {
        Ok(Rational {
            num: self.num.checked_neg().ok_or(ArithError::Overflow)?,
            den: self.den,
        })
    }

    pub fn checked_mul(self, rhs: Self) -> Result<Self, ArithError> {
        if self.num == 0 || rhs.num == 0 {
            return Ok(Self::ZERO);
        }
        let g1 = gcd(self.num, rhs.den);
        let g2 = gcd(rhs.num, self.den);
        let num = (self.num / g1)
            .checked_mul(rhs.num / g2)
            .ok_or(ArithError::Overflow)?;
        let den = (self.den / g2)
            .checked_mul(rhs.den / g1)
            .ok_or(ArithError::Overflow)?;
        Self::new(num, den)
    }

    pub fn checked_div(self, rhs: Self) -> Result<Self, ArithError> {
        if rhs.num == 0 {
            return Err(ArithError::DivisionByZero);
        }
        self.checked_mul(rhs.recip()?)
    }

    /// Integer power; negative exponents invert.
    pub fn checked_pow(self, exp: i32) -> Result<Self, ArithError> {
        let mut base = if exp < 0 { self.recip()? } else { self };
        let mut e = exp.unsigned_abs();
        let mut acc = Self::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.checked_mul(base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.checked_mul(base)?;
            }
        }
        Ok(acc)
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Smallest rational with denominator `den` that is `>= x`.
    pub fn from_f64_ceil(x: f64, den: i128) -> Result<Self, ArithError> {
        if !x.is_finite() {
            return Err(ArithError::Overflow);
        }
        let scaled = (x * den as f64).ceil();
        if scaled.abs() >= i128::MAX as f64 {
            return Err(ArithError::Overflow);
        }
        Self::new(scaled as i128, den)
    }
}

/// Compares `a/b` and `c/d` (positive denominators) without overflow by
/// expanding both as continued fractions.
fn cmp_fractions(mut a: i128, mut b: i128, mut c: i128, mut d: i128) -> Ordering {
    let mut flipped = false;
    loop {
        let qa = a.div_euclid(b);
        let qc = c.div_euclid(d);
        if qa != qc {
            let ord = qa.cmp(&qc);
            return if flipped { ord.reverse() } else { ord };
        }
        let ra = a.rem_euclid(b);
        let rc = c.rem_euclid(d);
        match (ra == 0, rc == 0) {
            (true, true) => return Ordering::Equal,
            (true, false) => {
                return if flipped {
                    Ordering::Greater
                } else {
                    Ordering::Less
                }
            }
            (false, true) => {
                return if flipped {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
            (false, false) => {
                // a/b = q + ra/b, compare b/ra vs d/rc with order reversed
                (a, b, c, d) = (b, ra, d, rc);
                flipped = !flipped;
            }
        }
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.den == other.den {
            return self.num.cmp(&other.num);
        }
        match (
            self.num.checked_mul(other.den),
            other.num.checked_mul(self.den),
        ) {
            (Some(l), Some(r)) => l.cmp(&r),
            _ => cmp_fractions(self.num, self.den, other.num, other.den),
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Default for Rational {
    fn default() -> Self {
        Self::ZERO
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::int(n as i128)
    }
}

impl From<u64> for Rational {
    fn from(n: u64) -> Self {
        Rational::int(n as i128)
    }
}

impl From<usize> for Rational {
    fn from(n: usize) -> Self {
        Rational::int(n as i128)
    }
}

impl From<i32> for Rational {
    fn from(n: i32) -> Self {
        Rational::int(n as i128)
    }
}

macro_rules! panicking_op {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                match self.$checked(rhs) {
                    Ok(v) => v,
                    Err(e) => panic!("rational {}: {} {} {}", e, self, stringify!($method), rhs),
                }
            }
        }
    };
}

panicking_op!(Add, add, checked_add);
panicking_op!(Sub, sub, checked_sub);
panicking_op!(Mul, mul, checked_mul);
panicking_op!(Div, div, checked_div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        self.checked_neg().expect("rational overflow in negation")
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        *self = *self + rhs;
    }
}

impl SubAssign for Rational {
    fn sub_assign(&mut self, rhs: Rational) {
        *self = *self - rhs;
    }
}

impl MulAssign for Rational {
    fn mul_assign(&mut self, rhs: Rational) {
        *self = *self * rhs;
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::ZERO, |a, b| a + b)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::ZERO, |a, b| a + *b)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Accepts `"3/10"`, `"-2"` and finite decimals such as `"0.25"`.
impl FromStr for Rational {
    type Err = ArithError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || ArithError::Parse(s.to_string());
        if let Some((n, d)) = s.split_once('/') {
            let n: i128 = n.trim().parse().map_err(|_| bad())?;
            let d: i128 = d.trim().parse().map_err(|_| bad())?;
            return Rational::new(n, d);
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 30 {
                return Err(bad());
            }
            let neg = int.starts_with('-');
            let int_val: i128 = if int.is_empty() || int == "-" {
                0
            } else {
                int.parse().map_err(|_| bad())?
            };
            let den = 10i128.checked_pow(frac.len() as u32).ok_or(ArithError::Overflow)?;
            let frac_val: i128 = frac.parse().map_err(|_| bad())?;
            let whole = Rational::int(int_val.abs()).checked_add(Rational::new(frac_val, den)?)?;
            return if neg { whole.checked_neg() } else { Ok(whole) };
        }
        let n: i128 = s.parse().map_err(|_| bad())?;
        Ok(Rational::int(n))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Str(String),
            Int(i64),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Str(s) => s.parse().map_err(serde::de::Error::custom),
            Repr::Int(n) => Ok(Rational::from(n)),
        }
    }
}

/// Operation selector for [`rational_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Min,
    Max,
    Cmp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithResult {
    Value(Rational),
    Ordering(Ordering),
}

/// Single entry point over the binary operations.
pub fn rational_arith(a: Rational, b: Rational, op: ArithOp) -> Result<ArithResult, ArithError> {
    Ok(match op {
        ArithOp::Add => ArithResult::Value(a.checked_add(b)?),
        ArithOp::Sub => ArithResult::Value(a.checked_sub(b)?),
        ArithOp::Mul => ArithResult::Value(a.checked_mul(b)?),
        ArithOp::Div => ArithResult::Value(a.checked_div(b)?),
        ArithOp::Min => ArithResult::Value(a.min(b)),
        ArithOp::Max => ArithResult::Value(a.max(b)),
        ArithOp::Cmp => ArithResult::Ordering(a.cmp(&b)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i128, d: i128) -> Rational {
        Rational::frac(n, d)
    }

    #[test]
    fn add_reduces() {
        assert_eq!(r(1, 3) + r(1, 6), r(1, 2));
        assert_eq!((r(1, 3) + r(1, 6)).denom(), 2);
    }

    #[test]
    fn mul_by_zero() {
        assert_eq!(r(3, 4) * Rational::ZERO, Rational::ZERO);
        assert_eq!((r(3, 4) * Rational::ZERO).denom(), 1);
    }

    #[test]
    fn cmp_cross_multiplication() {
        assert_eq!(r(2, 7).cmp(&r(3, 10)), Ordering::Less);
        assert_eq!(
            rational_arith(r(2, 7), r(3, 10), ArithOp::Cmp).unwrap(),
            ArithResult::Ordering(Ordering::Less)
        );
    }

    #[test]
    fn division_by_zero_is_error() {
        assert_eq!(r(1, 2).checked_div(Rational::ZERO), Err(ArithError::DivisionByZero));
        assert_eq!(Rational::new(1, 0), Err(ArithError::DivisionByZero));
    }

    #[test]
    fn overflow_is_error() {
        let big = Rational::int(i128::MAX / 2 + 1);
        assert_eq!(big.checked_add(big), Err(ArithError::Overflow));
        assert_eq!(big.checked_mul(Rational::int(3)), Err(ArithError::Overflow));
        let tiny = Rational::new(1, i128::MAX).unwrap();
        assert_eq!(tiny.checked_mul(r(1, 3)), Err(ArithError::Overflow));
    }

    #[test]
    #[should_panic(expected = "overflow")]
    fn operator_overflow_panics() {
        let big = Rational::int(i128::MAX);
        let _ = big + Rational::ONE;
    }

    #[test]
    fn cmp_survives_large_terms() {
        let a = Rational::new(i128::MAX - 1, i128::MAX).unwrap();
        let b = Rational::new(i128::MAX - 2, i128::MAX - 1).unwrap();
        assert!(a > b);
        assert_eq!(a.cmp(&a), Ordering::Equal);
    }

    #[test]
    fn parse_forms() {
        assert_eq!("3/10".parse::<Rational>().unwrap(), r(3, 10));
        assert_eq!("-4/8".parse::<Rational>().unwrap(), r(-1, 2));
        assert_eq!("0.25".parse::<Rational>().unwrap(), r(1, 4));
        assert_eq!("-1.5".parse::<Rational>().unwrap(), r(-3, 2));
        assert_eq!("7".parse::<Rational>().unwrap(), Rational::int(7));
        assert!("x".parse::<Rational>().is_err());
    }

    #[test]
    fn serde_as_string() {
        let v = r(3, 10);
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, "\"3/10\"");
        let back: Rational = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
        let from_int: Rational = serde_json::from_str("4").unwrap();
        assert_eq!(from_int, Rational::int(4));
    }

    #[test]
    fn floor_ceil_pow() {
        assert_eq!(r(-3, 2).floor(), -2);
        assert_eq!(r(-3, 2).ceil(), -1);
        assert_eq!(r(7, 2).ceil(), 4);
        assert_eq!(r(3, 4).checked_pow(2).unwrap(), r(9, 16));
        assert_eq!(r(3, 4).checked_pow(-1).unwrap(), r(4, 3));
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (-10_000i128..10_000, 1i128..10_000).prop_map(|(n, d)| Rational::frac(n, d))
    }

    proptest! {
        #[test]
        fn add_commutes_and_inverts(a in arb_rational(), b in arb_rational()) {
            prop_assert_eq!(a + b, b + a);
            prop_assert_eq!(a + (-a), Rational::ZERO);
            let s = a + b;
            prop_assert_eq!(gcd(s.numer(), s.denom()), 1);
            prop_assert!(s.denom() > 0);
        }

        #[test]
        fn cmp_matches_fallback(a in arb_rational(), b in arb_rational()) {
            let fast = a.cmp(&b);
            let slow = cmp_fractions(a.numer(), a.denom(), b.numer(), b.denom());
            prop_assert_eq!(fast, slow);
        }

        #[test]
        fn mul_div_roundtrip(a in arb_rational(), b in arb_rational()) {
            prop_assume!(!b.is_zero());
            prop_assert_eq!((a * b) / b, a);
        }
    }
}
