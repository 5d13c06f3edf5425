//! Scalar backends.
//!
//! Four fields are supported: exact rationals [`Q`], exact Gaussian rationals
//! [`QI`], and their floating counterparts `f64` and [`C64`]. Every matrix
//! routine is generic over [`Field`]; exact fields never round and compare
//! by equality, float fields compare through an explicit tolerance.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt::Debug;

pub type Q = BigRational;
pub type QI = Complex<BigRational>;
pub type C64 = Complex<f64>;

/// Which scalar backend a value lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Rational,
    Gaussian,
    Float,
    Complex,
}

pub trait Field: Clone + Debug + PartialEq + Send + Sync + 'static {
    const EXACT: bool;
    const BACKEND: Backend;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_ratio(p: i64, q: i64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    /// Panics on division by exact zero.
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn conj(&self) -> Self;
    /// Magnitude used for pivot selection and tolerance tests.
    fn magnitude(&self) -> f64;
    fn to_c64(&self) -> C64;
    /// Sign of the real part; `tol` decides zero on float backends.
    fn re_sign(&self, tol: f64) -> i8;
    /// Embed an exact rational.
    fn from_q(x: &Q) -> Self;

    /// Zero test: exact on exact fields, `|x| <= tol` otherwise.
    fn is_zero_tol(&self, tol: f64) -> bool {
        if Self::EXACT {
            *self == Self::zero()
        } else {
            self.magnitude() <= tol
        }
    }
}

/// Real fields (ℚ and f64), each paired with its complexification.
pub trait RealField: Field + PartialOrd {
    type Cx: ComplexField<Real = Self>;
    fn to_f64(&self) -> f64;
    /// Square root when it exists in the field (perfect squares on ℚ).
    fn sqrt_opt(&self) -> Option<Self>;
}

/// Complex fields (ℚ(i) and C64).
pub trait ComplexField: Field {
    type Real: RealField<Cx = Self>;
    fn from_parts(re: Self::Real, im: Self::Real) -> Self;
    fn re(&self) -> Self::Real;
    fn im(&self) -> Self::Real;
    fn i() -> Self {
        Self::from_parts(Self::Real::zero(), Self::Real::one())
    }
    fn from_real(r: Self::Real) -> Self {
        Self::from_parts(r, Self::Real::zero())
    }
}

pub fn q(p: i64, d: i64) -> Q {
    BigRational::new(BigInt::from(p), BigInt::from(d))
}

pub fn qi(re: Q, im: Q) -> QI {
    Complex::new(re, im)
}

fn rat_to_f64(r: &Q) -> f64 {
    ToPrimitive::to_f64(r).unwrap_or_else(|| {
        // huge numerators/denominators: fall back to a scaled quotient
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

impl Field for Q {
    const EXACT: bool = true;
    const BACKEND: Backend = Backend::Rational;
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_ratio(p: i64, d: i64) -> Self {
        q(p, d)
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
    fn div(&self, o: &Self) -> Self {
        assert!(!o.is_zero(), "exact division by zero");
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        self.clone()
    }
    fn magnitude(&self) -> f64 {
        rat_to_f64(&self.abs())
    }
    fn to_c64(&self) -> C64 {
        C64::new(rat_to_f64(self), 0.0)
    }
    fn from_q(x: &Q) -> Self {
        x.clone()
    }
    fn re_sign(&self, _tol: f64) -> i8 {
        if self.is_zero() {
            0
        } else if self.is_positive() {
            1
        } else {
            -1
        }
    }
}

impl RealField for Q {
    type Cx = QI;
    fn to_f64(&self) -> f64 {
        rat_to_f64(self)
    }
    fn sqrt_opt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let (n, d) = (self.numer().sqrt(), self.denom().sqrt());
        (&n * &n == *self.numer() && &d * &d == *self.denom()).then(|| BigRational::new(n, d))
    }
}

impl Field for QI {
    const EXACT: bool = true;
    const BACKEND: Backend = Backend::Gaussian;
    fn zero() -> Self {
        Complex::new(<Q as Zero>::zero(), <Q as Zero>::zero())
    }
    fn one() -> Self {
        Complex::new(<Q as One>::one(), <Q as Zero>::zero())
    }
    fn from_i64(v: i64) -> Self {
        Complex::new(Q::from_i64(v), <Q as Zero>::zero())
    }
    fn from_ratio(p: i64, d: i64) -> Self {
        Complex::new(q(p, d), <Q as Zero>::zero())
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
    fn div(&self, o: &Self) -> Self {
        let n = &o.re * &o.re + &o.im * &o.im;
        assert!(!n.is_zero(), "exact division by zero");
        let num = self * o.conj();
        Complex::new(num.re / &n, num.im / &n)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
    fn magnitude(&self) -> f64 {
        rat_to_f64(&self.re).hypot(rat_to_f64(&self.im))
    }
    fn to_c64(&self) -> C64 {
        C64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
    fn from_q(x: &Q) -> Self {
        Complex::new(x.clone(), <Q as Zero>::zero())
    }
    fn re_sign(&self, tol: f64) -> i8 {
        self.re.re_sign(tol)
    }
}

impl ComplexField for QI {
    type Real = Q;
    fn from_parts(re: Q, im: Q) -> Self {
        Complex::new(re, im)
    }
    fn re(&self) -> Q {
        self.re.clone()
    }
    fn im(&self) -> Q {
        self.im.clone()
    }
}

impl Field for f64 {
    const EXACT: bool = false;
    const BACKEND: Backend = Backend::Float;
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_ratio(p: i64, d: i64) -> Self {
        p as f64 / d as f64
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
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        *self
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn to_c64(&self) -> C64 {
        C64::new(*self, 0.0)
    }
    fn from_q(x: &Q) -> Self {
        rat_to_f64(x)
    }
    fn re_sign(&self, tol: f64) -> i8 {
        if self.abs() <= tol {
            0
        } else if *self > 0.0 {
            1
        } else {
            -1
        }
    }
}

impl RealField for f64 {
    type Cx = C64;
    fn to_f64(&self) -> f64 {
        *self
    }
    fn sqrt_opt(&self) -> Option<Self> {
        (*self >= 0.0).then(|| self.sqrt())
    }
}

impl Field for C64 {
    const EXACT: bool = false;
    const BACKEND: Backend = Backend::Complex;
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn one() -> Self {
        C64::new(1.0, 0.0)
    }
    fn from_i64(v: i64) -> Self {
        C64::new(v as f64, 0.0)
    }
    fn from_ratio(p: i64, d: i64) -> Self {
        C64::new(p as f64 / d as f64, 0.0)
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
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn to_c64(&self) -> C64 {
        *self
    }
    fn from_q(x: &Q) -> Self {
        C64::new(rat_to_f64(x), 0.0)
    }
    fn re_sign(&self, tol: f64) -> i8 {
        self.re.re_sign(tol)
    }
}

impl ComplexField for C64 {
    type Real = f64;
    fn from_parts(re: f64, im: f64) -> Self {
        C64::new(re, im)
    }
    fn re(&self) -> f64 {
        self.re
    }
    fn im(&self) -> f64 {
        self.im
    }
}

/// Nearest rational with denominator at most `max_den` (continued fractions).
pub fn rationalize(x: f64, max_den: i64) -> Q {
    if !x.is_finite() {
        return <Q as Zero>::zero();
    }
    let neg = x < 0.0;
    let mut v = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    for _ in 0..64 {
        let a = v.floor();
        if a > 1e18 {
            break;
        }
        let ai = a as i128;
        let p2 = ai * p1 + p0;
        let q2 = ai * q1 + q0;
        if q2 > max_den as i128 {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = v - a;
        if frac < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    if q1 == 0 {
        return <Q as Zero>::zero();
    }
    let r = BigRational::new(BigInt::from(p1), BigInt::from(q1));
    if neg {
        -r
    } else {
        r
    }
}
