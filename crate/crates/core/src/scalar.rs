//! Numeric backends.
//!
//! Every geometric routine in the crate is generic over [`Scalar`]. Two
//! implementations exist:
//!
//! * [`Exact`] (an alias for `BigRational`): closed under the four arithmetic
//!   operations, comparisons are decided without tolerance. Oracle
//!   equivalence is checked on this backend.
//! * [`F64`]: binary64 with a single relative tolerance of `1e-9`. All
//!   semantic comparisons go through [`Scalar::approx_cmp`].
//!
//! The `Ord` impl of a scalar is a *raw* total order used for keying maps and
//! queues. Geometry code must use `approx_cmp` and friends instead.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational backend.
pub type Exact = BigRational;

/// Relative tolerance of the float backend.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + Ord
    + Hash
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Whether comparisons are exact.
    const EXACT: bool;
    /// Backend name as used in instance files and on the command line.
    const NAME: &'static str;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_rational(r: &BigRational) -> Self;
    /// Exact rational value of this scalar (floats convert losslessly).
    fn to_rational(&self) -> BigRational;
    fn to_f64(&self) -> f64;

    /// The tolerance predicate. Exact backends compare exactly.
    fn approx_cmp(&self, other: &Self) -> Ordering;

    /// Interval of raw keys that `approx_cmp` may consider equal to `self`.
    fn key_window(&self) -> (Self, Self);

    /// Exact square root if one exists in the backend.
    fn sqrt(&self) -> Option<Self>;

    /// Number of bits needed for numerator and denominator, if meaningful.
    fn bit_width(&self) -> Option<u64>;

    fn approx_eq(&self, other: &Self) -> bool {
        self.approx_cmp(other) == Ordering::Equal
    }

    /// Sign under the tolerance predicate.
    fn sign(&self) -> Ordering {
        self.approx_cmp(&Self::zero())
    }

    fn is_approx_zero(&self) -> bool {
        self.sign() == Ordering::Equal
    }

    fn abs(&self) -> Self {
        if self.clone() < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn half(&self) -> Self {
        self.clone() / Self::from_i64(2)
    }

    /// `2^exp`.
    fn pow2(exp: i32) -> Self {
        let two = BigInt::from(2u8);
        let r = if exp >= 0 {
            BigRational::from_integer(two.pow(exp as u32))
        } else {
            BigRational::new(BigInt::one(), two.pow(exp.unsigned_abs()))
        };
        Self::from_rational(&r)
    }

    fn min_approx(a: Self, b: Self) -> Self {
        if b.approx_cmp(&a) == Ordering::Less {
            b
        } else {
            a
        }
    }

    fn max_approx(a: Self, b: Self) -> Self {
        if b.approx_cmp(&a) == Ordering::Greater {
            b
        } else {
            a
        }
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;
    const NAME: &'static str = "exact";

    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        One::one()
    }

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn to_rational(&self) -> BigRational {
        self.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn approx_cmp(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }

    fn key_window(&self) -> (Self, Self) {
        (self.clone(), self.clone())
    }

    fn sqrt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let (n, d) = (self.numer(), self.denom());
        let (rn, rd) = (n.sqrt(), d.sqrt());
        (&rn * &rn == *n && &rd * &rd == *d).then(|| BigRational::new(rn, rd))
    }

    fn bit_width(&self) -> Option<u64> {
        Some(self.numer().bits().max(self.denom().bits()) + 1)
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }
}

/// Binary64 scalar with tolerance-based semantic comparison.
///
/// `Eq`/`Ord`/`Hash` follow `f64::total_cmp` so the type can key ordered
/// collections; they are not the geometric equality.
#[derive(Clone, Copy, Debug, Default)]
pub struct F64(pub f64);

impl F64 {
    pub fn get(self) -> f64 {
        self.0
    }
}

impl PartialEq for F64 {
    fn eq(&self, other: &Self) -> bool {
        self.0.total_cmp(&other.0) == Ordering::Equal
    }
}

impl Eq for F64 {}

impl PartialOrd for F64 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for F64 {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl Hash for F64 {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.to_bits().hash(state)
    }
}

impl fmt::Display for F64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

macro_rules! f64_binop {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr for F64 {
            type Output = F64;
            fn $m(self, rhs: F64) -> F64 {
                F64(self.0 $op rhs.0)
            }
        }
    };
}

f64_binop!(Add, add, +);
f64_binop!(Sub, sub, -);
f64_binop!(Mul, mul, *);
f64_binop!(Div, div, /);

impl Neg for F64 {
    type Output = F64;
    fn neg(self) -> F64 {
        F64(-self.0)
    }
}

fn tolerance_for(a: f64, b: f64) -> f64 {
    FLOAT_TOLERANCE * 1f64.max(a.abs()).max(b.abs())
}

impl Scalar for F64 {
    const EXACT: bool = false;
    const NAME: &'static str = "float";

    fn zero() -> Self {
        F64(0.0)
    }

    fn one() -> Self {
        F64(1.0)
    }

    fn from_i64(v: i64) -> Self {
        F64(v as f64)
    }

    fn from_rational(r: &BigRational) -> Self {
        F64(ToPrimitive::to_f64(r).unwrap_or(f64::NAN))
    }

    fn to_rational(&self) -> BigRational {
        BigRational::from_float(self.0).unwrap_or_else(<BigRational as Zero>::zero)
    }

    fn to_f64(&self) -> f64 {
        self.0
    }

    fn approx_cmp(&self, other: &Self) -> Ordering {
        if (self.0 - other.0).abs() <= tolerance_for(self.0, other.0) {
            Ordering::Equal
        } else {
            self.0.total_cmp(&other.0)
        }
    }

    fn key_window(&self) -> (Self, Self) {
        // Slightly wider than the predicate so range scans never miss.
        let t = 2.0 * tolerance_for(self.0, self.0);
        (F64(self.0 - t), F64(self.0 + t))
    }

    fn sqrt(&self) -> Option<Self> {
        (self.0 >= 0.0).then(|| F64(self.0.sqrt()))
    }

    fn bit_width(&self) -> Option<u64> {
        None
    }

    fn abs(&self) -> Self {
        F64(self.0.abs())
    }

    fn half(&self) -> Self {
        F64(self.0 * 0.5)
    }
}

/// Parse a decimal (`-1.25`, `3e-2`) or rational (`7/3`) literal exactly.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let t = text.trim();
    if t.is_empty() {
        return None;
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(pos) => (&t[..pos], t[pos + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: BigInt = format!("{int_part}{frac_part}0").parse().ok()?;
    let all = all / BigInt::from(10u8);
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10u8);
    let mut r = if scale >= 0 {
        BigRational::from_integer(all * ten.pow(scale as u32))
    } else {
        BigRational::new(all, ten.pow(scale.unsigned_abs()))
    };
    if neg {
        r = -r;
    }
    Some(r)
}

/// Render a rational as a literal accepted by [`parse_rational`].
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
