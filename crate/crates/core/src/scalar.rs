//! Numeric back ends.
//!
//! Vector entries and model coordinates are written against [`Scalar`].
//! Floats are fast and approximate; [`BigRational`] and [`Quadratic`] are
//! exact, so identities can be checked with `==`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Field element used for vector entries and model coordinates.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True when arithmetic is exact and comparisons need no tolerance.
    const EXACT: bool;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_rational(q: &BigRational) -> Self;

    fn from_biguint(n: &BigUint) -> Self;

    fn to_f64(&self) -> f64;

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Equality for exact types; relative closeness (floor 1) for floats.
    fn close_to(&self, other: &Self, tol: f64) -> bool {
        if Self::EXACT {
            self == other
        } else {
            let (a, b) = (self.to_f64(), other.to_f64());
            (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
        }
    }

    /// Rendering used in CSV cells: decimal for floats, `num/den` for rationals.
    fn cell(&self) -> String;
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn from_ratio(num: i64, den: i64) -> Self {
                (num as f64 / den as f64) as $t
            }

            fn from_rational(q: &BigRational) -> Self {
                ToPrimitive::to_f64(q).unwrap_or(f64::NAN) as $t
            }

            fn from_biguint(n: &BigUint) -> Self {
                ToPrimitive::to_f64(n).unwrap_or(f64::INFINITY) as $t
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn cell(&self) -> String {
                format!("{}", self)
            }
        }
    };
}

float_scalar!(f32);
float_scalar!(f64);

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }

    fn from_biguint(n: &BigUint) -> Self {
        BigRational::from_integer(BigInt::from_biguint(Sign::Plus, n.clone()))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn cell(&self) -> String {
        rational_cell(self)
    }
}

pub(crate) fn rational_cell(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Element `a + b·√d` of a real quadratic field, with rational `a`, `b`.
///
/// `d` is kept square-free. Rational values carry `d = 0` and combine with
/// any field; mixing two different irrational radicands panics.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Quadratic {
    a: BigRational,
    b: BigRational,
    d: u64,
}

impl Quadratic {
    pub fn new(a: BigRational, b: BigRational, d: u64) -> Self {
        let (k, d) = split_square(d);
        let (a, b) = if d == 1 {
            (a + b * BigRational::from_integer(BigInt::from(k)), BigRational::zero())
        } else {
            (a, b * BigRational::from_integer(BigInt::from(k)))
        };
        if b.is_zero() || d == 0 {
            Quadratic { a, b: BigRational::zero(), d: 0 }
        } else {
            Quadratic { a, b, d }
        }
    }

    pub fn rational(a: BigRational) -> Self {
        Quadratic { a, b: BigRational::zero(), d: 0 }
    }

    /// `√d` itself.
    pub fn sqrt_of(d: u64) -> Self {
        Quadratic::new(BigRational::zero(), BigRational::one(), d)
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn surd_part(&self) -> &BigRational {
        &self.b
    }

    pub fn radicand(&self) -> u64 {
        self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn conjugate(&self) -> Self {
        Quadratic { a: self.a.clone(), b: -self.b.clone(), d: self.d }
    }

    /// `a² − b²d`, the field norm.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.b * &self.b * radicand_q(self.d)
    }

    fn sign(&self) -> Ordering {
        let sa = rational_sign(&self.a);
        let sb = rational_sign(&self.b);
        match (sa, sb) {
            (s, Ordering::Equal) | (Ordering::Equal, s) => s,
            (x, y) if x == y => x,
            _ => {
                // opposite signs: the larger magnitude wins
                let lhs = &self.a * &self.a;
                let rhs = &self.b * &self.b * radicand_q(self.d);
                if lhs > rhs {
                    sa
                } else {
                    sb
                }
            }
        }
    }
}

fn rational_sign(q: &BigRational) -> Ordering {
    if q.is_positive() {
        Ordering::Greater
    } else if q.is_negative() {
        Ordering::Less
    } else {
        Ordering::Equal
    }
}

fn radicand_q(d: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(d))
}

/// Writes `d = k²·r` with `r` square-free.
fn split_square(d: u64) -> (u64, u64) {
    if d == 0 {
        return (1, 0);
    }
    let mut k = 1u64;
    let mut r = d;
    let mut p = 2u64;
    while p * p <= r {
        while r.is_multiple_of(p * p) {
            r /= p * p;
            k *= p;
        }
        p += 1;
    }
    (k, r)
}

fn common_radicand(x: u64, y: u64) -> u64 {
    match (x, y) {
        (0, d) | (d, 0) => d,
        (p, q) if p == q => p,
        (p, q) => panic!("mixing quadratic fields Q(sqrt {p}) and Q(sqrt {q})"),
    }
}

impl Add for Quadratic {
    type Output = Quadratic;
    fn add(self, rhs: Quadratic) -> Quadratic {
        let d = common_radicand(self.d, rhs.d);
        Quadratic::new(self.a + rhs.a, self.b + rhs.b, d)
    }
}

impl Sub for Quadratic {
    type Output = Quadratic;
    fn sub(self, rhs: Quadratic) -> Quadratic {
        let d = common_radicand(self.d, rhs.d);
        Quadratic::new(self.a - rhs.a, self.b - rhs.b, d)
    }
}

impl Mul for Quadratic {
    type Output = Quadratic;
    fn mul(self, rhs: Quadratic) -> Quadratic {
        let d = common_radicand(self.d, rhs.d);
        let a = &self.a * &rhs.a + &self.b * &rhs.b * radicand_q(d);
        let b = &self.a * &rhs.b + &self.b * &rhs.a;
        Quadratic::new(a, b, d)
    }
}

impl Div for Quadratic {
    type Output = Quadratic;
    fn div(self, rhs: Quadratic) -> Quadratic {
        let norm = rhs.norm();
        assert!(!norm.is_zero(), "division by zero in quadratic field");
        let num = self * rhs.conjugate();
        Quadratic::new(num.a / &norm, num.b / &norm, num.d)
    }
}

impl Neg for Quadratic {
    type Output = Quadratic;
    fn neg(self) -> Quadratic {
        Quadratic { a: -self.a, b: -self.b, d: self.d }
    }
}

impl Zero for Quadratic {
    fn zero() -> Self {
        Quadratic::rational(BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl One for Quadratic {
    fn one() -> Self {
        Quadratic::rational(BigRational::one())
    }
}

impl PartialOrd for Quadratic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some((self.clone() - other.clone()).sign())
    }
}

impl fmt::Display for Quadratic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "{}", rational_cell(&self.a))
        } else {
            let sign = if self.b.is_negative() { '-' } else { '+' };
            write!(f, "{}{sign}{}*sqrt({})", rational_cell(&self.a), rational_cell(&Signed::abs(&self.b)), self.d)
        }
    }
}

impl Scalar for Quadratic {
    const EXACT: bool = true;

    fn from_ratio(num: i64, den: i64) -> Self {
        Quadratic::rational(BigRational::from_ratio(num, den))
    }

    fn from_rational(q: &BigRational) -> Self {
        Quadratic::rational(q.clone())
    }

    fn from_biguint(n: &BigUint) -> Self {
        Quadratic::rational(BigRational::from_biguint(n))
    }

    fn to_f64(&self) -> f64 {
        let a = Scalar::to_f64(&self.a);
        if self.is_rational() {
            a
        } else {
            a + Scalar::to_f64(&self.b) * (self.d as f64).sqrt()
        }
    }

    fn cell(&self) -> String {
        self.to_string()
    }
}

/// Parses `"p"`, `"p/q"` or a decimal literal such as `"0.25"` into an exact rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Some((int, frac)) = text.split_once('.') {
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        let n: BigInt = digits.parse().ok()?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let q = BigRational::new(n, d);
        return Some(if neg { -q } else { q });
    }
    text.parse::<BigInt>().ok().map(BigRational::from_integer)
}
