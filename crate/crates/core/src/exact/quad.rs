//! Exact elements a + b*sqrt(d) of a real quadratic field.
//!
//! This is the scalar type for every geometric quantity in the crate.
//! Rationals are the special case b = 0 and carry no radicand, so a value
//! from one field can only meet a value from another through arithmetic,
//! which rejects the mix instead of coercing. Comparisons, signs and
//! floors are decided by exact integer case analysis; there is no
//! floating point on any path that decides a verdict.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Errors from exact scalar arithmetic, lattice decomposition and
/// continued fractions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("mixed radicands: sqrt({0}) and sqrt({1}) cannot be combined")]
    MismatchedField(u64, u64),
    #[error("invalid radicand {0}: must be squarefree and at least 2")]
    InvalidRadicand(u64),
    #[error("cannot parse exact number from `{0}`")]
    Parse(String),
    #[error("segment direction has an irrational slope")]
    IrrationalDirection,
    #[error("zero-length segment")]
    DegenerateSegment,
    #[error("vector is not primitive")]
    NonPrimitive,
    #[error("matrix determinant {0} is not +1 or -1")]
    NotUnimodular(i64),
    #[error("no repetition found within {0} continued-fraction terms")]
    PeriodNotFoundWithin(usize),
    #[error("argument out of range: {0}")]
    OutOfRange(&'static str),
    #[error("lattice coordinate does not fit a machine integer")]
    LatticeOverflow,
}

/// True if `d` has no repeated prime factor and is at least 2.
pub fn is_valid_radicand(d: u64) -> bool {
    if d < 2 {
        return false;
    }
    let mut f = 2u64;
    while f * f <= d {
        if d.is_multiple_of(f * f) {
            return false;
        }
        f += 1;
    }
    true
}

/// An exact number a + b*sqrt(d) with rational a, b and squarefree d >= 2.
///
/// Canonical form: `d` is present exactly when b != 0, so rational values
/// compare equal regardless of which field produced them.
#[derive(Clone, PartialEq, Eq)]
pub struct QuadraticNumber {
    a: BigRational,
    b: BigRational,
    d: Option<u64>,
}

impl QuadraticNumber {
    fn canonical(a: BigRational, b: BigRational, d: Option<u64>) -> Self {
        if b.is_zero() {
            QuadraticNumber { a, b, d: None }
        } else {
            debug_assert!(d.is_some());
            QuadraticNumber { a, b, d }
        }
    }

    /// a + b*sqrt(d); fails if d is not squarefree or below 2.
    pub fn new(a: BigRational, b: BigRational, d: u64) -> Result<Self, ExactError> {
        if !is_valid_radicand(d) {
            return Err(ExactError::InvalidRadicand(d));
        }
        Ok(Self::canonical(a, b, Some(d)))
    }

    pub fn from_rational(a: BigRational) -> Self {
        Self::canonical(a, BigRational::zero(), None)
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::from_rational(BigRational::from_integer(n))
    }

    /// p/q with q > 0. Panics on q = 0 (programmer error in literals).
    pub fn ratio(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        Self::from_rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    /// sqrt(d) itself.
    pub fn sqrt(d: u64) -> Result<Self, ExactError> {
        Self::new(BigRational::zero(), BigRational::one(), d)
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn radical_coeff(&self) -> &BigRational {
        &self.b
    }

    /// Some(d) exactly when the value is irrational.
    pub fn radicand(&self) -> Option<u64> {
        self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.is_rational() {
            Some(&self.a)
        } else {
            None
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    fn join_radicand(&self, other: &Self) -> Result<Option<u64>, ExactError> {
        match (self.d, other.d) {
            (None, d) | (d, None) => Ok(d),
            (Some(x), Some(y)) if x == y => Ok(Some(x)),
            (Some(x), Some(y)) => Err(ExactError::MismatchedField(x, y)),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ExactError> {
        let d = self.join_radicand(other)?;
        Ok(Self::canonical(&self.a + &other.a, &self.b + &other.b, d))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, ExactError> {
        let d = self.join_radicand(other)?;
        Ok(Self::canonical(&self.a - &other.a, &self.b - &other.b, d))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, ExactError> {
        let d = self.join_radicand(other)?;
        match d {
            None => Ok(Self::canonical(&self.a * &other.a, BigRational::zero(), None)),
            Some(rad) => {
                let r = BigRational::from_integer(BigInt::from(rad));
                let a = &self.a * &other.a + &self.b * &other.b * &r;
                let b = &self.a * &other.b + &self.b * &other.a;
                Ok(Self::canonical(a, b, Some(rad)))
            }
        }
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, ExactError> {
        if other.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        let d = self.join_radicand(other)?;
        if other.b.is_zero() {
            return Ok(Self::canonical(&self.a / &other.a, &self.b / &other.a, d));
        }
        let rad = other.d.expect("irrational divisor carries a radicand");
        let r = BigRational::from_integer(BigInt::from(rad));
        // multiply by the conjugate; the norm a^2 - b^2 d is nonzero because
        // sqrt(d) is irrational
        let norm = &other.a * &other.a - &other.b * &other.b * &r;
        debug_assert!(!norm.is_zero());
        let a = (&self.a * &other.a - &self.b * &other.b * &r) / &norm;
        let b = (&self.b * &other.a - &self.a * &other.b) / &norm;
        Ok(Self::canonical(a, b, d))
    }

    pub fn mul_int(&self, k: i64) -> Self {
        self.mul_bigint(&BigInt::from(k))
    }

    pub fn mul_bigint(&self, k: &BigInt) -> Self {
        let kr = BigRational::from_integer(k.clone());
        Self::canonical(&self.a * &kr, &self.b * &kr, self.d)
    }

    pub fn div_int(&self, k: i64) -> Self {
        assert!(k != 0, "division by zero");
        let kr = BigRational::from_integer(BigInt::from(k));
        Self::canonical(&self.a / &kr, &self.b / &kr, self.d)
    }

    pub fn div_bigint(&self, k: &BigInt) -> Self {
        assert!(!k.is_zero(), "division by zero");
        let kr = BigRational::from_integer(k.clone());
        Self::canonical(&self.a / &kr, &self.b / &kr, self.d)
    }

    /// Exact sign, by case analysis on the signs of a and b; the tie
    /// a^2 = b^2 d is impossible for a squarefree radicand.
    pub fn sign(&self) -> Ordering {
        if self.b.is_zero() {
            return self.a.cmp(&BigRational::zero());
        }
        let d = BigInt::from(self.d.expect("irrational value carries a radicand"));
        let r = BigRational::from_integer(d);
        let sa = self.a.cmp(&BigRational::zero());
        let sb = self.b.cmp(&BigRational::zero());
        match (sa, sb) {
            (Ordering::Equal, s) => s,
            (s, Ordering::Equal) => s,
            (Ordering::Greater, Ordering::Greater) => Ordering::Greater,
            (Ordering::Less, Ordering::Less) => Ordering::Less,
            (Ordering::Greater, Ordering::Less) => {
                // positive iff a^2 > b^2 d
                (&self.a * &self.a).cmp(&(&self.b * &self.b * &r))
            }
            (Ordering::Less, Ordering::Greater) => {
                // positive iff b^2 d > a^2
                (&self.b * &self.b * &r).cmp(&(&self.a * &self.a))
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.sign() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.sign() == Ordering::Less
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Largest integer <= self, exactly.
    pub fn floor_int(&self) -> BigInt {
        match self.d {
            None => self.a.floor().to_integer(),
            Some(d) => {
                // write the value as (p + q*sqrt(d)) / r with r > 0
                let r = self.a.denom() * self.b.denom();
                let p = self.a.numer() * self.b.denom();
                let q = self.b.numer() * self.a.denom();
                floor_scaled(&p, &q, d, &r)
            }
        }
    }

    pub fn ceil_int(&self) -> BigInt {
        -(-self).floor_int()
    }

    /// self mod modulus, in [0, modulus); modulus must be positive.
    pub fn rem_euclid(&self, modulus: &Self) -> Result<Self, ExactError> {
        if modulus.sign() != Ordering::Greater {
            return Err(ExactError::OutOfRange("modulus must be positive"));
        }
        let k = self.checked_div(modulus)?.floor_int();
        self.checked_sub(&modulus.mul_bigint(&k))
    }
}

/// Exact floor of (p + q*sqrt(d)) / r for integers p, q and r > 0.
///
/// Uses the integer square root of q^2 d: since sqrt(d) is irrational the
/// value q*sqrt(d) sits strictly between consecutive integers, which pins
/// the floored division.
pub fn floor_scaled(p: &BigInt, q: &BigInt, d: u64, r: &BigInt) -> BigInt {
    debug_assert!(r.is_positive());
    if q.is_zero() {
        return p.div_floor(r);
    }
    let sq = (BigInt::from(d) * q * q).sqrt();
    if q.is_negative() {
        // p - |q|sqrt(d) lies in the open interval (p - sq - 1, p - sq)
        (p - &sq - BigInt::one()).div_floor(r)
    } else {
        (p + &sq).div_floor(r)
    }
}

impl PartialOrd for QuadraticNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadraticNumber {
    /// Total order of the real embedding. Panics when comparing values
    /// from different quadratic fields (rejected, never coerced).
    fn cmp(&self, other: &Self) -> Ordering {
        self.checked_sub(other)
            .expect("comparison across quadratic fields")
            .sign()
    }
}

impl fmt::Debug for QuadraticNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuadraticNumber({})", self)
    }
}

impl fmt::Display for QuadraticNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.d {
            None => write!(f, "{}", self.a),
            Some(d) => {
                if self.a.is_zero() {
                    if self.b.is_negative() {
                        write!(f, "-{}*sqrt({})", self.b.abs(), d)
                    } else {
                        write!(f, "{}*sqrt({})", self.b, d)
                    }
                } else if self.b.is_negative() {
                    write!(f, "{} - {}*sqrt({})", self.a, self.b.abs(), d)
                } else {
                    write!(f, "{} + {}*sqrt({})", self.a, self.b, d)
                }
            }
        }
    }
}

fn parse_rational(s: &str) -> Result<BigRational, ExactError> {
    let err = || ExactError::Parse(s.to_string());
    let (num_str, den_str) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let ok_num = |t: &str| {
        let body = t.strip_prefix(['+', '-']).unwrap_or(t);
        !body.is_empty() && body.bytes().all(|c| c.is_ascii_digit())
    };
    if !ok_num(num_str) || den_str.is_empty() || !den_str.bytes().all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let n: BigInt = num_str.parse().map_err(|_| err())?;
    let d: BigInt = den_str.parse().map_err(|_| err())?;
    if d.is_zero() {
        return Err(err());
    }
    Ok(BigRational::new(n, d))
}

/// Split "R1+R2" / "R1-R2" at the binary sign (a sign preceded by a digit);
/// returns (left, signed right). A missing left term is zero.
fn split_binary_sign(s: &str) -> (Option<&str>, bool, &str) {
    let bytes = s.as_bytes();
    for i in (1..bytes.len()).rev() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1].is_ascii_digit() {
            return (Some(&s[..i]), bytes[i] == b'-', &s[i + 1..]);
        }
    }
    (None, false, s)
}

impl FromStr for QuadraticNumber {
    type Err = ExactError;

    /// Literal grammar: `"p/q"` or `"p/q + r/s*sqrt(d)"`, whitespace
    /// insensitive, with `q`, `s` positive. A bare `sqrt(d)` coefficient of
    /// +-1 is also accepted.
    fn from_str(raw: &str) -> Result<Self, ExactError> {
        let s: String = raw.chars().filter(|c| !c.is_whitespace()).collect();
        let err = || ExactError::Parse(raw.to_string());
        if s.is_empty() {
            return Err(err());
        }
        let Some(pos) = s.find("sqrt(") else {
            return Ok(Self::from_rational(parse_rational(&s)?));
        };
        if !s.ends_with(')') {
            return Err(err());
        }
        let d: u64 = s[pos + 5..s.len() - 1].parse().map_err(|_| err())?;
        let head = &s[..pos];
        let (rat_str, neg, coeff_str) = match head.strip_suffix('*') {
            Some(h) => {
                let (left, neg, right) = split_binary_sign(h);
                if right.is_empty() {
                    return Err(err());
                }
                (left, neg, right.to_string())
            }
            None => {
                // bare sqrt(d) with coefficient +-1
                let (left, neg, right) = split_binary_sign(head);
                if !right.is_empty() && right != "+" && right != "-" {
                    return Err(err());
                }
                let neg = neg || right == "-";
                (left, neg, "1".to_string())
            }
        };
        let a = match rat_str {
            Some(t) => parse_rational(t)?,
            None => BigRational::zero(),
        };
        let mut b = parse_rational(&coeff_str)?;
        if neg {
            b = -b;
        }
        Self::new(a, b, d)
    }
}

impl Serialize for QuadraticNumber {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for QuadraticNumber {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident, $msg:expr) => {
        impl $trait for &QuadraticNumber {
            type Output = QuadraticNumber;
            fn $method(self, rhs: &QuadraticNumber) -> QuadraticNumber {
                self.$checked(rhs).expect($msg)
            }
        }
        impl $trait for QuadraticNumber {
            type Output = QuadraticNumber;
            fn $method(self, rhs: QuadraticNumber) -> QuadraticNumber {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&QuadraticNumber> for QuadraticNumber {
            type Output = QuadraticNumber;
            fn $method(self, rhs: &QuadraticNumber) -> QuadraticNumber {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add, "mixed quadratic fields");
forward_binop!(Sub, sub, checked_sub, "mixed quadratic fields");
forward_binop!(Mul, mul, checked_mul, "mixed quadratic fields");
forward_binop!(Div, div, checked_div, "exact division failed");

impl Neg for &QuadraticNumber {
    type Output = QuadraticNumber;
    fn neg(self) -> QuadraticNumber {
        QuadraticNumber::canonical(-&self.a, -&self.b, self.d)
    }
}

impl Neg for QuadraticNumber {
    type Output = QuadraticNumber;
    fn neg(self) -> QuadraticNumber {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(s: &str) -> QuadraticNumber {
        s.parse().unwrap()
    }

    #[test]
    fn conjugate_product_is_minus_one() {
        let x = q("1 + 1*sqrt(2)");
        let y = q("1 - 1*sqrt(2)");
        assert_eq!(&x * &y, QuadraticNumber::from_int(-1));
    }

    #[test]
    fn rational_detection_is_canonical() {
        let x = QuadraticNumber::new(
            BigRational::new(BigInt::from(3), BigInt::from(2)),
            BigRational::zero(),
            2,
        )
        .unwrap();
        assert!(x.is_rational());
        assert_eq!(x.radicand(), None);
        // product of conjugates is rational even though both factors are not
        assert!((q("1+1*sqrt(2)") * q("1-1*sqrt(2)")).is_rational());
    }

    #[test]
    fn exact_comparison_against_rational() {
        // 1 + sqrt(2) < 5/2 since sqrt(2) < 3/2, i.e. 2 < 9/4
        assert!(q("1 + 1*sqrt(2)") < q("5/2"));
        assert!(q("1 + 1*sqrt(2)") > q("12/5"));
    }

    #[test]
    fn sign_case_analysis() {
        assert_eq!(q("3 - 2*sqrt(2)").sign(), Ordering::Greater); // 9 > 8
        assert_eq!(q("-3 + 2*sqrt(2)").sign(), Ordering::Less);
        assert_eq!(q("2 - 2*sqrt(2)").sign(), Ordering::Less); // 4 < 8
        assert_eq!(q("0").sign(), Ordering::Equal);
        assert_eq!(q("-1*sqrt(5)").sign(), Ordering::Less);
    }

    #[test]
    fn floor_of_irrational_values() {
        assert_eq!(q("1*sqrt(2)").floor_int(), BigInt::from(1));
        assert_eq!(q("-1*sqrt(2)").floor_int(), BigInt::from(-2));
        assert_eq!(q("7/2").floor_int(), BigInt::from(3));
        assert_eq!(q("-7/2").floor_int(), BigInt::from(-4));
        assert_eq!(q("10 - 1*sqrt(2)").floor_int(), BigInt::from(8));
        assert_eq!(q("1/2 + 3*sqrt(3)").floor_int(), BigInt::from(5)); // 5.696
    }

    #[test]
    fn rem_euclid_reduces_into_range() {
        let m = q("2 + 1*sqrt(2)");
        let x = q("-1/2");
        let r = x.rem_euclid(&m).unwrap();
        assert!(r.sign() != Ordering::Less && r < m);
        assert_eq!(r, q("-1/2") + q("2 + 1*sqrt(2)"));
    }

    #[test]
    fn mixed_fields_are_rejected() {
        let x = q("1*sqrt(2)");
        let y = q("1*sqrt(3)");
        assert_eq!(
            x.checked_add(&y).unwrap_err(),
            ExactError::MismatchedField(2, 3)
        );
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let x = q("1");
        assert_eq!(
            x.checked_div(&QuadraticNumber::zero()).unwrap_err(),
            ExactError::DivisionByZero
        );
        // dividing by an irrational unit works
        assert_eq!(q("2").checked_div(&q("1*sqrt(2)")).unwrap(), q("1*sqrt(2)"));
    }

    #[test]
    fn radicand_validation() {
        assert!(is_valid_radicand(2));
        assert!(is_valid_radicand(3));
        assert!(is_valid_radicand(6));
        assert!(!is_valid_radicand(1));
        assert!(!is_valid_radicand(4));
        assert!(!is_valid_radicand(12));
        assert!(QuadraticNumber::sqrt(9).is_err());
    }

    #[test]
    fn display_reparses_to_equal_value() {
        for s in [
            "0",
            "5",
            "-3/4",
            "1 + 1*sqrt(2)",
            "1/2 - 3/4*sqrt(5)",
            "2*sqrt(3)",
            "-1*sqrt(7)",
        ] {
            let x = q(s);
            let y: QuadraticNumber = x.to_string().parse().unwrap();
            assert_eq!(x, y, "round trip failed for {s}");
        }
    }

    #[test]
    fn whitespace_is_ignored() {
        assert_eq!(q(" 1/2 +  3/4 * sqrt( 2 ) "), q("1/2+3/4*sqrt(2)"));
    }

    #[test]
    fn malformed_literals_are_rejected() {
        for s in ["", "1/0", "sqrt()", "1+*sqrt(2)", "2*sqrt(4)", "a/b", "1//2"] {
            assert!(s.parse::<QuadraticNumber>().is_err(), "accepted {s:?}");
        }
    }

    fn arb_rational() -> impl Strategy<Value = BigRational> {
        (-40i64..=40, 1i64..=12)
            .prop_map(|(p, q)| BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    fn arb_quad() -> impl Strategy<Value = QuadraticNumber> {
        (arb_rational(), arb_rational())
            .prop_map(|(a, b)| QuadraticNumber::new(a, b, 2).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn field_axioms_hold_exactly(x in arb_quad(), y in arb_quad(), z in arb_quad()) {
            prop_assert_eq!((&x + &y) + &z, &x + &(&y + &z));
            prop_assert_eq!((&x * &y) * &z, &x * &(&y * &z));
            prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
            prop_assert_eq!(&x + &(-&x), QuadraticNumber::zero());
            if !x.is_zero() {
                let inv = QuadraticNumber::one().checked_div(&x).unwrap();
                prop_assert_eq!(&x * &inv, QuadraticNumber::one());
            }
        }

        #[test]
        fn floor_brackets_the_value(x in arb_quad()) {
            let f = x.floor_int();
            let lo = QuadraticNumber::from_bigint(f.clone());
            let hi = QuadraticNumber::from_bigint(f + 1);
            prop_assert!(lo <= x && x < hi);
        }
    }
}
