//! Exact arithmetic in the quadratic field Q(sqrt 3), plus a toleranced
//! floating path for generic numeric input.
//!
//! Values come in two kinds. [`Real::Exact`] wraps a [`QSqrt3`], whose
//! rational parts are arbitrary precision. [`Real::Approx`] wraps an `f64`
//! that is compared under a [`Tolerance`]. Arithmetic never mixes the two:
//! aggregates (experiments, spaces) reject mixed input at construction, and
//! converting an exact value to the floating path goes through
//! [`Real::to_approx`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("mixed exact and approximate operands; cast explicitly with Real::to_approx")]
    MixedKinds,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid scalar literal `{literal}`: {reason}")]
pub struct ParseScalarError {
    pub literal: String,
    pub reason: String,
}

fn parse_err(literal: &str, reason: impl Into<String>) -> ParseScalarError {
    ParseScalarError {
        literal: literal.to_string(),
        reason: reason.into(),
    }
}

/// Absolute tolerance for the floating path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance(pub f64);

impl Tolerance {
    pub const DEFAULT: Tolerance = Tolerance(1e-9);

    pub fn new(eps: f64) -> Option<Tolerance> {
        (eps.is_finite() && eps > 0.0).then_some(Tolerance(eps))
    }

    pub fn eps(self) -> f64 {
        self.0
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::DEFAULT
    }
}

pub fn rational(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// An element `a + b*sqrt(3)` of Q(sqrt 3).
///
/// Both parts are reduced rationals, so structural equality is value equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QSqrt3 {
    a: Rational,
    b: Rational,
}

impl QSqrt3 {
    pub fn new(a: Rational, b: Rational) -> Self {
        QSqrt3 { a, b }
    }

    pub fn from_rational(a: Rational) -> Self {
        QSqrt3 { a, b: Rational::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    /// `n/d` as a field element.
    pub fn ratio(n: i64, d: i64) -> Self {
        Self::from_rational(rational(n, d))
    }

    pub fn sqrt3() -> Self {
        QSqrt3 {
            a: Rational::zero(),
            b: Rational::one(),
        }
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn conj(&self) -> Self {
        QSqrt3 {
            a: self.a.clone(),
            b: -self.b.clone(),
        }
    }

    /// Field norm `a^2 - 3 b^2`; zero only for zero.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - Rational::from_integer(BigInt::from(3)) * &self.b * &self.b
    }

    /// Sign of `a + b*sqrt(3)`, decided without leaving the rationals.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&Rational::zero());
        let sb = self.b.cmp(&Rational::zero());
        match (sa, sb) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (x, y) if x == y => x,
            // opposite signs: |a| vs |b| sqrt 3, compare squares
            (sa, _) => {
                let a2 = &self.a * &self.a;
                let b2 = Rational::from_integer(BigInt::from(3)) * &self.b * &self.b;
                match a2.cmp(&b2) {
                    Ordering::Greater => sa,
                    Ordering::Less => sa.reverse(),
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() == Ordering::Less {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn inv(&self) -> Result<Self, ArithError> {
        if self.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        // 1/(a + b r) = (a - b r)/(a^2 - 3 b^2)
        let n = self.norm();
        Ok(QSqrt3 {
            a: &self.a / &n,
            b: -(&self.b / &n),
        })
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, ArithError> {
        Ok(self * &rhs.inv()?)
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.a) + rational_to_f64(&self.b) * 3f64.sqrt()
    }
}

impl Default for QSqrt3 {
    fn default() -> Self {
        QSqrt3::zero()
    }
}

impl PartialOrd for QSqrt3 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QSqrt3 {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, |$l:ident, $r:ident| $body:expr) => {
        impl<'a> $tr<&'a QSqrt3> for &'a QSqrt3 {
            type Output = QSqrt3;
            fn $method(self, rhs: &'a QSqrt3) -> QSqrt3 {
                let $l = self;
                let $r = rhs;
                $body
            }
        }
        impl $tr<QSqrt3> for QSqrt3 {
            type Output = QSqrt3;
            fn $method(self, rhs: QSqrt3) -> QSqrt3 {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, |x, y| QSqrt3 {
    a: &x.a + &y.a,
    b: &x.b + &y.b
});
forward_binop!(Sub, sub, |x, y| QSqrt3 {
    a: &x.a - &y.a,
    b: &x.b - &y.b
});
forward_binop!(Mul, mul, |x, y| {
    let three = Rational::from_integer(BigInt::from(3));
    QSqrt3 {
        a: &x.a * &y.a + three * &x.b * &y.b,
        b: &x.a * &y.b + &x.b * &y.a,
    }
});
forward_binop!(Div, div, |x, y| x.checked_div(y).expect("QSqrt3 division by zero"));

impl Neg for QSqrt3 {
    type Output = QSqrt3;
    fn neg(self) -> QSqrt3 {
        QSqrt3 { a: -self.a, b: -self.b }
    }
}

impl fmt::Display for QSqrt3 {
    /// Renders in the literal grammar: `p/q`, `p/q + r/s*sqrt3`, `p/q - r/s*sqrt3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return f.write_str(&fmt_rational(&self.a));
        }
        let sign = if self.b.is_negative() { '-' } else { '+' };
        write!(
            f,
            "{} {} {}*sqrt3",
            fmt_rational(&self.a),
            sign,
            fmt_rational(&self.b.abs())
        )
    }
}

fn parse_rational(s: &str, whole: &str) -> Result<Rational, ParseScalarError> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n
        .parse()
        .map_err(|_| parse_err(whole, format!("bad numerator `{n}`")))?;
    let d: BigInt = d
        .parse()
        .map_err(|_| parse_err(whole, format!("bad denominator `{d}`")))?;
    if d.is_zero() {
        return Err(parse_err(whole, "zero denominator"));
    }
    Ok(Rational::new(n, d))
}

impl FromStr for QSqrt3 {
    type Err = ParseScalarError;

    /// Accepts `p`, `p/q`, `p/q + r/s*sqrt3`, `p/q - r/s*sqrt3` and
    /// `r/s*sqrt3`; whitespace is optional.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(parse_err(s, "empty literal"));
        }
        // split at the last +/- that is not a leading sign
        let split = t
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(i, _)| i)
            .last();
        let (head, tail) = match split {
            Some(i) => (&t[..i], Some(&t[i..])),
            None => (&t[..], None),
        };
        let surd = |part: &str| -> Result<Rational, ParseScalarError> {
            let coeff = part
                .strip_suffix("*sqrt3")
                .ok_or_else(|| parse_err(s, "expected `*sqrt3` term"))?;
            let coeff = coeff.strip_prefix('+').unwrap_or(coeff);
            parse_rational(coeff, s)
        };
        match tail {
            None if head.ends_with("sqrt3") => Ok(QSqrt3::new(Rational::zero(), surd(head)?)),
            None => Ok(QSqrt3::from_rational(parse_rational(head, s)?)),
            Some(tail) => Ok(QSqrt3::new(parse_rational(head, s)?, surd(tail)?)),
        }
    }
}

/// The four field operations, for callers that pick the operation at runtime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn qsqrt3_arith(x: &QSqrt3, y: &QSqrt3, op: ArithOp) -> Result<QSqrt3, ArithError> {
    Ok(match op {
        ArithOp::Add => x + y,
        ArithOp::Sub => x - y,
        ArithOp::Mul => x * y,
        ArithOp::Div => x.checked_div(y)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Exact,
    Approx,
}

/// A real number on either the exact or the toleranced path.
#[derive(Debug, Clone, PartialEq)]
pub enum Real {
    Exact(QSqrt3),
    Approx(f64),
}

impl Real {
    pub fn zero(kind: Kind) -> Real {
        match kind {
            Kind::Exact => Real::Exact(QSqrt3::zero()),
            Kind::Approx => Real::Approx(0.0),
        }
    }

    pub fn one(kind: Kind) -> Real {
        match kind {
            Kind::Exact => Real::Exact(QSqrt3::one()),
            Kind::Approx => Real::Approx(1.0),
        }
    }

    pub fn from_int(kind: Kind, n: i64) -> Real {
        match kind {
            Kind::Exact => Real::Exact(QSqrt3::from_int(n)),
            Kind::Approx => Real::Approx(n as f64),
        }
    }

    pub fn kind(&self) -> Kind {
        match self {
            Real::Exact(_) => Kind::Exact,
            Real::Approx(_) => Kind::Approx,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Exact(q) => q.to_f64(),
            Real::Approx(v) => *v,
        }
    }

    /// The explicit cast from the exact to the floating path.
    pub fn to_approx(&self) -> Real {
        Real::Approx(self.to_f64())
    }

    pub fn as_exact(&self) -> Option<&QSqrt3> {
        match self {
            Real::Exact(q) => Some(q),
            Real::Approx(_) => None,
        }
    }

    /// Exact zero on the exact path, `|x| <= eps` otherwise.
    pub fn is_zero(&self, tol: Tolerance) -> bool {
        match self {
            Real::Exact(q) => q.is_zero(),
            Real::Approx(v) => v.abs() <= tol.eps(),
        }
    }

    pub fn cmp_tol(&self, other: &Real, tol: Tolerance) -> Ordering {
        match (self, other) {
            (Real::Exact(x), Real::Exact(y)) => x.cmp(y),
            _ => {
                let d = self.to_f64() - other.to_f64();
                if d.abs() <= tol.eps() {
                    Ordering::Equal
                } else if d < 0.0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
        }
    }

    pub fn eq_tol(&self, other: &Real, tol: Tolerance) -> bool {
        self.cmp_tol(other, tol) == Ordering::Equal
    }

    pub fn abs(&self) -> Real {
        match self {
            Real::Exact(q) => Real::Exact(q.abs()),
            Real::Approx(v) => Real::Approx(v.abs()),
        }
    }

    pub fn try_op(&self, rhs: &Real, op: ArithOp) -> Result<Real, ArithError> {
        match (self, rhs) {
            (Real::Exact(x), Real::Exact(y)) => Ok(Real::Exact(qsqrt3_arith(x, y, op)?)),
            (Real::Approx(x), Real::Approx(y)) => Ok(Real::Approx(match op {
                ArithOp::Add => x + y,
                ArithOp::Sub => x - y,
                ArithOp::Mul => x * y,
                ArithOp::Div => {
                    if *y == 0.0 {
                        return Err(ArithError::DivisionByZero);
                    }
                    x / y
                }
            })),
            _ => Err(ArithError::MixedKinds),
        }
    }

    pub fn checked_div(&self, rhs: &Real) -> Result<Real, ArithError> {
        self.try_op(rhs, ArithOp::Div)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Exact(q) => q.fmt(f),
            // Debug keeps a '.' or exponent, so the literal reads back as approximate
            Real::Approx(v) => write!(f, "{v:?}"),
        }
    }
}

impl FromStr for Real {
    type Err = ParseScalarError;

    /// Exact literals follow the Q(sqrt 3) grammar; anything containing a
    /// decimal point or exponent is read as an approximate `f64`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let looks_float = t.contains('.')
            || (t.contains(['e', 'E']) && !t.contains("sqrt"))
            || t.eq_ignore_ascii_case("inf")
            || t.eq_ignore_ascii_case("nan");
        if looks_float {
            let v: f64 = t.parse().map_err(|_| parse_err(s, "not a valid floating literal"))?;
            if !v.is_finite() {
                return Err(parse_err(s, "non-finite value"));
            }
            Ok(Real::Approx(v))
        } else {
            Ok(Real::Exact(t.parse()?))
        }
    }
}

// Operator impls panic on mixed kinds. Aggregates validate homogeneity on
// construction, so reaching the panic means an invariant was broken.
macro_rules! real_binop {
    ($tr:ident, $method:ident, $op:expr) => {
        impl<'a> $tr<&'a Real> for &'a Real {
            type Output = Real;
            fn $method(self, rhs: &'a Real) -> Real {
                self.try_op(rhs, $op)
                    .unwrap_or_else(|e| panic!("Real::{}: {e}", stringify!($method)))
            }
        }
        impl $tr<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
    };
}

real_binop!(Add, add, ArithOp::Add);
real_binop!(Sub, sub, ArithOp::Sub);
real_binop!(Mul, mul, ArithOp::Mul);
real_binop!(Div, div, ArithOp::Div);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        match self {
            Real::Exact(q) => Real::Exact(-q),
            Real::Approx(v) => Real::Approx(-v),
        }
    }
}

/// A complex number whose parts share one [`Kind`]. Real values have a zero
/// imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct Scalar {
    re: Real,
    im: Real,
}

impl Scalar {
    pub fn new(re: Real, im: Real) -> Result<Scalar, ArithError> {
        if re.kind() != im.kind() {
            return Err(ArithError::MixedKinds);
        }
        Ok(Scalar { re, im })
    }

    pub fn real(re: Real) -> Scalar {
        let im = Real::zero(re.kind());
        Scalar { re, im }
    }

    pub fn exact(q: QSqrt3) -> Scalar {
        Scalar::real(Real::Exact(q))
    }

    pub fn approx(v: f64) -> Scalar {
        Scalar::real(Real::Approx(v))
    }

    pub fn zero(kind: Kind) -> Scalar {
        Scalar::real(Real::zero(kind))
    }

    pub fn one(kind: Kind) -> Scalar {
        Scalar::real(Real::one(kind))
    }

    pub fn i(kind: Kind) -> Scalar {
        Scalar {
            re: Real::zero(kind),
            im: Real::one(kind),
        }
    }

    pub fn re(&self) -> &Real {
        &self.re
    }

    pub fn im(&self) -> &Real {
        &self.im
    }

    pub fn kind(&self) -> Kind {
        self.re.kind()
    }

    pub fn to_approx(&self) -> Scalar {
        Scalar {
            re: self.re.to_approx(),
            im: self.im.to_approx(),
        }
    }

    pub fn conj(&self) -> Scalar {
        Scalar {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// Real within tolerance (exactly real on the exact path).
    pub fn is_real(&self, tol: Tolerance) -> bool {
        self.im.is_zero(tol)
    }

    /// The real part, provided the imaginary part vanishes.
    pub fn as_real(&self, tol: Tolerance) -> Option<&Real> {
        self.is_real(tol).then_some(&self.re)
    }

    pub fn is_zero(&self, tol: Tolerance) -> bool {
        match self.kind() {
            Kind::Exact => self.re.is_zero(tol) && self.im.is_zero(tol),
            Kind::Approx => self.re.to_f64().hypot(self.im.to_f64()) <= tol.eps(),
        }
    }

    pub fn eq_tol(&self, other: &Scalar, tol: Tolerance) -> bool {
        match (self.kind(), other.kind()) {
            (Kind::Exact, Kind::Exact) => self == other,
            _ => {
                let dr = self.re.to_f64() - other.re.to_f64();
                let di = self.im.to_f64() - other.im.to_f64();
                dr.hypot(di) <= tol.eps()
            }
        }
    }

    pub fn try_op(&self, rhs: &Scalar, op: ArithOp) -> Result<Scalar, ArithError> {
        if self.kind() != rhs.kind() {
            return Err(ArithError::MixedKinds);
        }
        let (a, b, c, d) = (&self.re, &self.im, &rhs.re, &rhs.im);
        Ok(match op {
            ArithOp::Add => Scalar { re: a + c, im: b + d },
            ArithOp::Sub => Scalar { re: a - c, im: b - d },
            ArithOp::Mul => Scalar {
                re: &(a * c) - &(b * d),
                im: &(a * d) + &(b * c),
            },
            ArithOp::Div => {
                let den = &(c * c) + &(d * d);
                let num = self.try_op(&rhs.conj(), ArithOp::Mul)?;
                Scalar {
                    re: num.re.checked_div(&den)?,
                    im: num.im.checked_div(&den)?,
                }
            }
        })
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero(Tolerance(0.0)) {
            self.re.fmt(f)
        } else {
            write!(f, "({}) + ({})i", self.re, self.im)
        }
    }
}

macro_rules! scalar_binop {
    ($tr:ident, $method:ident, $op:expr) => {
        impl<'a> $tr<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                self.try_op(rhs, $op)
                    .unwrap_or_else(|e| panic!("Scalar::{}: {e}", stringify!($method)))
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
    };
}

scalar_binop!(Add, add, ArithOp::Add);
scalar_binop!(Sub, sub, ArithOp::Sub);
scalar_binop!(Mul, mul, ArithOp::Mul);
scalar_binop!(Div, div, ArithOp::Div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl serde::Serialize for Real {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A real scalar serializes as its literal; a complex one as `[re, im]`.
impl serde::Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.im.is_zero(Tolerance(0.0)) {
            self.re.serialize(s)
        } else {
            (&self.re, &self.im).serialize(s)
        }
    }
}

/// Compares two scalars. Exact operands are ordered algebraically; any
/// approximate operand switches to a toleranced comparison. Complex values
/// (nonzero imaginary part) are incomparable and yield `None`.
pub fn scalar_cmp(x: &Scalar, y: &Scalar, tol: Tolerance) -> Option<Ordering> {
    let xr = x.as_real(tol)?;
    let yr = y.as_real(tol)?;
    Some(xr.cmp_tol(yr, tol))
}

/// `gcd(numer, denom) == 1` and `denom > 0`.
pub fn is_canonical(r: &Rational) -> bool {
    r.denom().is_positive() && r.numer().gcd(r.denom()).is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> QSqrt3 {
        s.parse().unwrap()
    }

    #[test]
    fn conjugate_sum_is_rational() {
        let x = q("1/8 + 1/8*sqrt3");
        let y = q("1/8 - 1/8*sqrt3");
        assert_eq!(&x + &y, QSqrt3::ratio(1, 4));
    }

    #[test]
    fn sqrt3_squared_is_three() {
        assert_eq!(QSqrt3::sqrt3() * QSqrt3::sqrt3(), QSqrt3::from_int(3));
    }

    #[test]
    fn epr_chain_is_one() {
        let v = QSqrt3::one() + QSqrt3::ratio(3, 8) - q("1/8 + 1/8*sqrt3") - QSqrt3::ratio(1, 8) - q("1/8 - 1/8*sqrt3");
        assert_eq!(v, QSqrt3::one());
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(
            qsqrt3_arith(&QSqrt3::one(), &QSqrt3::zero(), ArithOp::Div),
            Err(ArithError::DivisionByZero)
        );
        let x = q("2 - 1*sqrt3");
        assert_eq!(x.checked_div(&x).unwrap(), QSqrt3::one());
    }

    #[test]
    fn literal_grammar_round_trips() {
        for lit in ["0", "-3", "1/16", "1/8 + 1/8*sqrt3", "1/4 - 3/8*sqrt3", "0 + 1*sqrt3"] {
            let v = q(lit);
            assert_eq!(v.to_string(), lit);
            assert_eq!(q(&v.to_string()), v);
        }
        assert_eq!(q("1*sqrt3"), QSqrt3::sqrt3());
        assert_eq!(q("-1/2*sqrt3"), -QSqrt3::new(Rational::zero(), rational(1, 2)));
        assert_eq!(q("2/4"), QSqrt3::ratio(1, 2));
        assert!("1/0".parse::<QSqrt3>().is_err());
        assert!("1 + 2".parse::<QSqrt3>().is_err());
        assert!("".parse::<QSqrt3>().is_err());
    }

    #[test]
    fn cmp_examples() {
        let tol = Tolerance::DEFAULT;
        let a = Scalar::exact(q("1/8 + 1/8*sqrt3"));
        let b = Scalar::exact(QSqrt3::ratio(1, 8));
        assert_eq!(scalar_cmp(&a, &b, tol), Some(Ordering::Greater));
        let c = Scalar::approx(0.1 + 1e-12);
        let d = Scalar::approx(0.1);
        assert_eq!(scalar_cmp(&c, &d, tol), Some(Ordering::Equal));
        let e = Scalar::exact(q("1/8 - 1/8*sqrt3"));
        assert_eq!(scalar_cmp(&e, &Scalar::zero(Kind::Exact), tol), Some(Ordering::Less));
        assert_eq!(scalar_cmp(&Scalar::i(Kind::Exact), &b, tol), None);
    }

    #[test]
    fn real_literals_pick_their_kind() {
        assert_eq!("0.25".parse::<Real>().unwrap(), Real::Approx(0.25));
        assert_eq!("1e-3".parse::<Real>().unwrap(), Real::Approx(1e-3));
        assert_eq!("1/4".parse::<Real>().unwrap(), Real::Exact(QSqrt3::ratio(1, 4)));
        assert_eq!(Real::Approx(1.0).to_string(), "1.0");
        assert!("nan".parse::<Real>().is_err());
    }

    #[test]
    fn mixing_kinds_is_refused() {
        let x = Real::Exact(QSqrt3::one());
        let y = Real::Approx(1.0);
        assert_eq!(x.try_op(&y, ArithOp::Add), Err(ArithError::MixedKinds));
        assert_eq!(x.to_approx().try_op(&y, ArithOp::Add), Ok(Real::Approx(2.0)));
        assert!(Scalar::new(x, y).is_err());
    }

    #[test]
    fn complex_division() {
        let k = Kind::Exact;
        let one_plus_i = Scalar::one(k) + Scalar::i(k);
        let back = &(&one_plus_i * &one_plus_i) / &one_plus_i;
        assert_eq!(back, one_plus_i);
    }
}
