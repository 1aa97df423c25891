//! Exact elements `a + b·√D` of a real quadratic field over the rationals.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::AlgebraError;

/// An exact element `a + b·√d` of `Q(√d)`.
///
/// `d` is zero or a square-free integer `>= 2`. A scalar with `b == 0` is a
/// plain rational and is stored with `d == 0`, so it combines freely with
/// elements of any field. Two irrational scalars with different `d` cannot be
/// combined: the checked operations report [`AlgebraError::MixedField`] and
/// the operator impls panic.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    a: BigRational,
    b: BigRational,
    d: u32,
}

/// Arithmetic selector for [`Scalar::arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn is_square_free(d: u32) -> bool {
    if d < 2 {
        return false;
    }
    let mut k = 2u64;
    while k * k <= d as u64 {
        if (d as u64).is_multiple_of(k * k) {
            return false;
        }
        k += 1;
    }
    true
}

/// Validates a field parameter: 0 (rationals) or a square-free integer >= 2.
pub fn check_field(d: u32) -> Result<(), AlgebraError> {
    if d == 0 || is_square_free(d) {
        Ok(())
    } else {
        Err(AlgebraError::InvalidField(d))
    }
}

fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let m = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&m * &m) == r.denom() {
        Some(BigRational::new(n, m))
    } else {
        None
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { a: BigRational::zero(), b: BigRational::zero(), d: 0 }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_rational(BigRational::new(num.into(), den.into()))
    }

    pub fn from_rational(a: BigRational) -> Self {
        Scalar { a, b: BigRational::zero(), d: 0 }
    }

    /// `√d` itself.
    pub fn sqrt_of(d: u32) -> Result<Self, AlgebraError> {
        if d == 0 {
            return Err(AlgebraError::InvalidField(0));
        }
        Self::new(BigRational::zero(), BigRational::one(), d)
    }

    /// Builds `a + b·√d`, validating `d` and normalizing.
    pub fn new(a: BigRational, b: BigRational, d: u32) -> Result<Self, AlgebraError> {
        check_field(d)?;
        if d == 0 && !b.is_zero() {
            return Err(AlgebraError::InvalidField(0));
        }
        Ok(Self::raw(a, b, d))
    }

    fn raw(a: BigRational, b: BigRational, d: u32) -> Self {
        if b.is_zero() {
            Scalar { a, b, d: 0 }
        } else {
            Scalar { a, b, d }
        }
    }

    /// Exact conversion of a finite double.
    pub fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x).map(Self::from_rational)
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn radical_part(&self) -> &BigRational {
        &self.b
    }

    /// The field parameter, 0 when the value is rational.
    pub fn field(&self) -> u32 {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.b.is_zero() && self.a.is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Re-applies the normal form; a no-op on any value built through the API.
    pub fn normalized(&self) -> Self {
        Self::raw(self.a.clone(), self.b.clone(), self.d)
    }

    pub fn conj(&self) -> Self {
        Self::raw(self.a.clone(), -self.b.clone(), self.d)
    }

    /// Field norm `a² − d·b²`.
    pub fn norm(&self) -> BigRational {
        let d = BigRational::from_integer(BigInt::from(self.d));
        &self.a * &self.a - d * &self.b * &self.b
    }

    fn join(&self, other: &Self) -> Result<u32, AlgebraError> {
        match (self.d, other.d) {
            (0, e) | (e, 0) => Ok(e),
            (d, e) if d == e => Ok(d),
            (d, e) => Err(AlgebraError::MixedField(d, e)),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, AlgebraError> {
        let d = self.join(other)?;
        Ok(Self::raw(&self.a + &other.a, &self.b + &other.b, d))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        let d = self.join(other)?;
        Ok(Self::raw(&self.a - &other.a, &self.b - &other.b, d))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        let d = self.join(other)?;
        let dd = BigRational::from_integer(BigInt::from(d));
        let a = &self.a * &other.a + dd * &self.b * &other.b;
        let b = &self.a * &other.b + &self.b * &other.a;
        Ok(Self::raw(a, b, d))
    }

    /// `(a + b√d)⁻¹ = (a − b√d) / (a² − d b²)`.
    pub fn inv(&self) -> Result<Self, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        // d square-free and not a square, so the norm of a nonzero element is nonzero.
        let n = self.norm();
        Ok(Self::raw(&self.a / &n, -(&self.b / &n), self.d))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.join(other)?;
        self.checked_mul(&other.inv()?)
    }

    pub fn arith(op: ScalarOp, x: &Self, y: &Self) -> Result<Self, AlgebraError> {
        match op {
            ScalarOp::Add => x.checked_add(y),
            ScalarOp::Sub => x.checked_sub(y),
            ScalarOp::Mul => x.checked_mul(y),
            ScalarOp::Div => x.checked_div(y),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Scalar::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Exact sign of the real number `a + b√d`.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&BigRational::zero());
        let sb = self.b.cmp(&BigRational::zero());
        if sb == Ordering::Equal {
            return sa;
        }
        if sa == Ordering::Equal || sa == sb {
            return sb;
        }
        // Opposite signs: compare a² with d b².
        let d = BigRational::from_integer(BigInt::from(self.d));
        let lhs = &self.a * &self.a;
        let rhs = d * &self.b * &self.b;
        match lhs.cmp(&rhs) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => Ordering::Equal,
        }
    }

    /// Square root inside the same field, if it exists.
    pub fn sqrt_in_field(&self, d: u32) -> Option<Self> {
        if self.is_zero() {
            return Some(Scalar::zero());
        }
        if self.signum() == Ordering::Less {
            return None;
        }
        if self.b.is_zero() {
            if let Some(r) = rational_sqrt(&self.a) {
                return Some(Self::from_rational(r));
            }
            if d == 0 {
                return None;
            }
            let dd = BigRational::from_integer(BigInt::from(d));
            return rational_sqrt(&(&self.a / dd))
                .map(|b| Self::raw(BigRational::zero(), b, d));
        }
        // (x + y√d)² = x² + d y² + 2xy√d.  With c = a, e = b:
        // x² = (c ± √(c² − d e²)) / 2, y = e / (2x).
        let dd = BigRational::from_integer(BigInt::from(self.d));
        let disc = &self.a * &self.a - dd * &self.b * &self.b;
        let r = rational_sqrt(&disc)?;
        let two = BigRational::from_integer(2.into());
        for cand in [(&self.a + &r) / &two, (&self.a - &r) / &two] {
            if cand.is_zero() {
                continue;
            }
            if let Some(x) = rational_sqrt(&cand) {
                let y = &self.b / (&two * &x);
                let s = Self::raw(x, y, self.d);
                if &(&s * &s) == self {
                    return Some(s);
                }
            }
        }
        None
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        if self.b.is_zero() {
            return a;
        }
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        a + b * (self.d as f64).sqrt()
    }

    /// Structural total order (rational part, then radical part), used only
    /// for deterministic sorting; it is not the numeric order.
    pub fn cmp_structural(&self, other: &Self) -> Ordering {
        self.a
            .cmp(&other.a)
            .then_with(|| self.b.cmp(&other.b))
            .then_with(|| self.d.cmp(&other.d))
    }

    /// Least common multiple of the denominators of both parts.
    pub fn denominator_lcm(&self) -> BigInt {
        self.a.denom().lcm(self.b.denom())
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Renders `a`, `a/b`, `b*rt` or `(a + b*rt)` where `rt` stands for `√d`.
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", fmt_rational(&self.a));
        }
        let rad = if self.b.is_one() {
            "rt".to_string()
        } else if (-&self.b).is_one() {
            "-rt".to_string()
        } else {
            format!("{}*rt", fmt_rational(&self.b))
        };
        if self.a.is_zero() {
            return write!(f, "{}", rad);
        }
        let (sign, mag) = if self.b.is_negative() {
            ("-", -&self.b)
        } else {
            ("+", self.b.clone())
        };
        let mag = if mag.is_one() {
            "rt".to_string()
        } else {
            format!("{}*rt", fmt_rational(&mag))
        };
        write!(f, "({} {} {})", fmt_rational(&self.a), sign, mag)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.$checked(rhs).unwrap_or_else(|e| panic!("scalar arithmetic: {e}"))
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);
forward_binop!(Div, div, checked_div);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::raw(-self.a.clone(), -self.b.clone(), self.d)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::raw(-self.a, -self.b, self.d)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}
