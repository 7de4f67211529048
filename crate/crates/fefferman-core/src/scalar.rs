//! Exact scalars over Q, Q(i) and the rational quaternions.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Common interface for the three scalar fields used by [`crate::matrix::Matrix`].
pub trait Scalar: Clone + PartialEq + fmt::Debug {
    fn zero_el() -> Self;
    fn one_el() -> Self;
    fn from_q(x: Q) -> Self;
    fn is_zero_el(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn conj(&self) -> Self;
    fn scale(&self, s: &Q) -> Self;
}

impl Scalar for Q {
    fn zero_el() -> Self {
        Zero::zero()
    }
    fn one_el() -> Self {
        One::one()
    }
    fn from_q(x: Q) -> Self {
        x
    }
    fn is_zero_el(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        self.clone()
    }
    fn scale(&self, s: &Q) -> Self {
        self * s
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Complex {
    pub re: Q,
    pub im: Q,
}

impl Complex {
    pub fn new(re: Q, im: Q) -> Self {
        Complex { re, im }
    }
    pub fn i() -> Self {
        Complex::new(q(0), q(1))
    }
    pub fn norm2(&self) -> Q {
        &self.re * &self.re + &self.im * &self.im
    }
}

impl fmt::Debug for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i)", self.re, self.im)
    }
}

impl Scalar for Complex {
    fn zero_el() -> Self {
        Complex::new(q(0), q(0))
    }
    fn one_el() -> Self {
        Complex::new(q(1), q(0))
    }
    fn from_q(x: Q) -> Self {
        Complex::new(x, q(0))
    }
    fn is_zero_el(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        Complex::new(&self.re + &o.re, &self.im + &o.im)
    }
    fn sub(&self, o: &Self) -> Self {
        Complex::new(&self.re - &o.re, &self.im - &o.im)
    }
    fn mul(&self, o: &Self) -> Self {
        Complex::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
    fn neg(&self) -> Self {
        Complex::new(-&self.re, -&self.im)
    }
    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -&self.im)
    }
    fn scale(&self, s: &Q) -> Self {
        Complex::new(&self.re * s, &self.im * s)
    }
}

/// a + bi + cj + dk.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Quaternion {
    pub a: Q,
    pub b: Q,
    pub c: Q,
    pub d: Q,
}

impl Quaternion {
    pub fn new(a: Q, b: Q, c: Q, d: Q) -> Self {
        Quaternion { a, b, c, d }
    }
    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Self {
        Quaternion::new(q(a), q(b), q(c), q(d))
    }
    /// The unit 1, i, j, k for `s` = 0, 1, 2, 3.
    pub fn unit(s: usize) -> Self {
        let mut v = [0i64; 4];
        v[s] = 1;
        Quaternion::from_ints(v[0], v[1], v[2], v[3])
    }
    pub fn components(&self) -> [Q; 4] {
        [self.a.clone(), self.b.clone(), self.c.clone(), self.d.clone()]
    }
    pub fn norm2(&self) -> Q {
        &self.a * &self.a + &self.b * &self.b + &self.c * &self.c + &self.d * &self.d
    }
    /// Split q = u + j v with u, v complex: u = a + bi, v = c - di.
    pub fn split_uv(&self) -> (Complex, Complex) {
        (
            Complex::new(self.a.clone(), self.b.clone()),
            Complex::new(self.c.clone(), -&self.d),
        )
    }
    pub fn from_uv(u: &Complex, v: &Complex) -> Self {
        Quaternion::new(u.re.clone(), u.im.clone(), v.re.clone(), -&v.im)
    }
}

impl fmt::Debug for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i + {}j + {}k)", self.a, self.b, self.c, self.d)
    }
}

impl Scalar for Quaternion {
    fn zero_el() -> Self {
        Quaternion::from_ints(0, 0, 0, 0)
    }
    fn one_el() -> Self {
        Quaternion::from_ints(1, 0, 0, 0)
    }
    fn from_q(x: Q) -> Self {
        Quaternion::new(x, q(0), q(0), q(0))
    }
    fn is_zero_el(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        Quaternion::new(&self.a + &o.a, &self.b + &o.b, &self.c + &o.c, &self.d + &o.d)
    }
    fn sub(&self, o: &Self) -> Self {
        Quaternion::new(&self.a - &o.a, &self.b - &o.b, &self.c - &o.c, &self.d - &o.d)
    }
    fn mul(&self, o: &Self) -> Self {
        let (a1, b1, c1, d1) = (&self.a, &self.b, &self.c, &self.d);
        let (a2, b2, c2, d2) = (&o.a, &o.b, &o.c, &o.d);
        Quaternion::new(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )
    }
    fn neg(&self) -> Self {
        Quaternion::new(-&self.a, -&self.b, -&self.c, -&self.d)
    }
    fn conj(&self) -> Self {
        Quaternion::new(self.a.clone(), -&self.b, -&self.c, -&self.d)
    }
    fn scale(&self, s: &Q) -> Self {
        Quaternion::new(&self.a * s, &self.b * s, &self.c * s, &self.d * s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ScalarKind {
    Rational,
    Complex,
    Quaternion,
}

/// A scalar tagged with its field. Mixed arithmetic promotes to the larger field.
#[derive(Clone, Debug, PartialEq)]
pub enum ExactScalar {
    Rational(Q),
    Complex(Complex),
    Quaternion(Quaternion),
}

impl ExactScalar {
    pub fn kind(&self) -> ScalarKind {
        match self {
            ExactScalar::Rational(_) => ScalarKind::Rational,
            ExactScalar::Complex(_) => ScalarKind::Complex,
            ExactScalar::Quaternion(_) => ScalarKind::Quaternion,
        }
    }

    pub fn components(&self) -> Vec<Q> {
        match self {
            ExactScalar::Rational(x) => alloc::vec![x.clone()],
            ExactScalar::Complex(z) => alloc::vec![z.re.clone(), z.im.clone()],
            ExactScalar::Quaternion(h) => h.components().to_vec(),
        }
    }

    fn as_quaternion(&self) -> Quaternion {
        match self {
            ExactScalar::Rational(x) => Quaternion::from_q(x.clone()),
            ExactScalar::Complex(z) => Quaternion::new(z.re.clone(), z.im.clone(), q(0), q(0)),
            ExactScalar::Quaternion(h) => h.clone(),
        }
    }

    fn demote(h: Quaternion, kind: ScalarKind) -> ExactScalar {
        match kind {
            ScalarKind::Rational => ExactScalar::Rational(h.a),
            ScalarKind::Complex => ExactScalar::Complex(Complex::new(h.a, h.b)),
            ScalarKind::Quaternion => ExactScalar::Quaternion(h),
        }
    }

    fn lift(&self, o: &Self, f: impl Fn(&Quaternion, &Quaternion) -> Quaternion) -> Self {
        let kind = self.kind().max(o.kind());
        Self::demote(f(&self.as_quaternion(), &o.as_quaternion()), kind)
    }

    pub fn add(&self, o: &Self) -> Self {
        self.lift(o, |a, b| a.add(b))
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.lift(o, |a, b| a.sub(b))
    }
    pub fn mul(&self, o: &Self) -> Self {
        self.lift(o, |a, b| a.mul(b))
    }
    pub fn conj(&self) -> Self {
        Self::demote(self.as_quaternion().conj(), self.kind())
    }
    pub fn norm2(&self) -> Q {
        self.as_quaternion().norm2()
    }
    pub fn is_zero(&self) -> bool {
        self.as_quaternion().is_zero_el()
    }
}

/// Reduced fraction string, e.g. "-3/2" or "4".
pub fn fmt_q(x: &Q) -> alloc::string::String {
    use alloc::string::ToString;
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        alloc::format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn q_abs(x: &Q) -> Q {
    x.abs()
}

pub fn q_to_f64(x: &Q) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}
