//! Backend-tagged matrices and their JSON encoding.
//!
//! `{"rows":r,"cols":c,"backend":"rational"|"gaussian"|"float"|"complex","data":[[...]]}`
//! with rationals written as `"p/q"` strings and complex entries as `[re, im]`.

use super::mat::Mat;
use super::scalar::{Backend, Field, RealField, Q, QI, C64};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

#[derive(Clone, Debug, PartialEq)]
pub enum Matrix {
    Rational(Mat<Q>),
    Gaussian(Mat<QI>),
    Float(Mat<f64>),
    Complex(Mat<C64>),
}

macro_rules! dispatch {
    ($m:expr, $x:ident => $body:expr) => {
        match $m {
            Matrix::Rational($x) => $body,
            Matrix::Gaussian($x) => $body,
            Matrix::Float($x) => $body,
            Matrix::Complex($x) => $body,
        }
    };
}

impl Matrix {
    pub fn backend(&self) -> Backend {
        match self {
            Matrix::Rational(_) => Backend::Rational,
            Matrix::Gaussian(_) => Backend::Gaussian,
            Matrix::Float(_) => Backend::Float,
            Matrix::Complex(_) => Backend::Complex,
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        dispatch!(self, m => m.shape())
    }

    fn mismatch(&self, o: &Matrix) -> Error {
        Error::BackendMismatch(self.backend(), o.backend())
    }

    /// Product; mixed backends are rejected.
    pub fn mul(&self, o: &Matrix) -> Result<Matrix> {
        let check = |a: (usize, usize), b: (usize, usize)| {
            if a.1 != b.0 {
                Err(Error::Shape(format!("{a:?} * {b:?}")))
            } else {
                Ok(())
            }
        };
        check(self.shape(), o.shape())?;
        Ok(match (self, o) {
            (Matrix::Rational(a), Matrix::Rational(b)) => Matrix::Rational(a.mul(b)),
            (Matrix::Gaussian(a), Matrix::Gaussian(b)) => Matrix::Gaussian(a.mul(b)),
            (Matrix::Float(a), Matrix::Float(b)) => Matrix::Float(a.mul(b)),
            (Matrix::Complex(a), Matrix::Complex(b)) => Matrix::Complex(a.mul(b)),
            _ => return Err(self.mismatch(o)),
        })
    }

    /// Sum; mixed backends are rejected.
    pub fn add(&self, o: &Matrix) -> Result<Matrix> {
        if self.shape() != o.shape() {
            return Err(Error::Shape(format!("{:?} + {:?}", self.shape(), o.shape())));
        }
        Ok(match (self, o) {
            (Matrix::Rational(a), Matrix::Rational(b)) => Matrix::Rational(a.add(b)),
            (Matrix::Gaussian(a), Matrix::Gaussian(b)) => Matrix::Gaussian(a.add(b)),
            (Matrix::Float(a), Matrix::Float(b)) => Matrix::Float(a.add(b)),
            (Matrix::Complex(a), Matrix::Complex(b)) => Matrix::Complex(a.add(b)),
            _ => return Err(self.mismatch(o)),
        })
    }

    /// Any backend as a float complex matrix (lossy for exact inputs).
    pub fn to_c64(&self) -> Mat<C64> {
        dispatch!(self, m => m.to_c64())
    }

    pub fn is_real(&self) -> bool {
        matches!(self, Matrix::Rational(_) | Matrix::Float(_))
    }

    pub fn to_json(&self) -> Value {
        let (r, c) = self.shape();
        let data: Vec<Vec<Value>> = match self {
            Matrix::Rational(m) => rows(m, |x| Value::String(fmt_q(x))),
            Matrix::Gaussian(m) => rows(m, |z| json!([fmt_q(&z.re), fmt_q(&z.im)])),
            Matrix::Float(m) => rows(m, |x| json!(x)),
            Matrix::Complex(m) => rows(m, |z| json!([z.re, z.im])),
        };
        json!({"rows": r, "cols": c, "backend": self.backend(), "data": data})
    }

    pub fn from_json(v: &Value) -> Result<Matrix> {
        let obj = v.as_object().ok_or_else(|| perr("matrix must be an object"))?;
        let dim = |k: &str| obj.get(k).and_then(Value::as_u64).map(|x| x as usize).ok_or_else(|| perr(format!("missing integer field '{k}'")));
        let (r, c) = (dim("rows")?, dim("cols")?);
        let backend: Backend = serde_json::from_value(obj.get("backend").cloned().ok_or_else(|| perr("missing field 'backend'"))?)
            .map_err(|e| perr(format!("bad backend: {e}")))?;
        let data = obj.get("data").and_then(Value::as_array).ok_or_else(|| perr("missing array field 'data'"))?;
        if data.len() != r {
            return Err(perr(format!("expected {r} rows, found {}", data.len())));
        }
        let mut cells = Vec::with_capacity(r * c);
        for row in data {
            let row = row.as_array().ok_or_else(|| perr("row must be an array"))?;
            if row.len() != c {
                return Err(perr(format!("expected {c} columns, found {}", row.len())));
            }
            cells.extend(row.iter().cloned());
        }
        Ok(match backend {
            Backend::Rational => Matrix::Rational(Mat::from_vec(r, c, cells.iter().map(parse_q).collect::<Result<_>>()?)),
            Backend::Float => Matrix::Float(Mat::from_vec(r, c, cells.iter().map(parse_f).collect::<Result<_>>()?)),
            Backend::Gaussian => Matrix::Gaussian(Mat::from_vec(
                r,
                c,
                cells.iter().map(|v| pair(v, parse_q).map(|(a, b)| QI::new(a, b))).collect::<Result<_>>()?,
            )),
            Backend::Complex => Matrix::Complex(Mat::from_vec(
                r,
                c,
                cells.iter().map(|v| pair(v, parse_f).map(|(a, b)| C64::new(a, b))).collect::<Result<_>>()?,
            )),
        })
    }
}

/// Real backends that can carry a basis through JSON. Exact ℚ only accepts
/// rational matrices; `f64` accepts rational or float ones.
pub trait RealBackend: RealField {
    fn wrap(m: Mat<Self>) -> Matrix;
    fn unwrap(m: &Matrix) -> Option<Mat<Self>>;
}

impl RealBackend for Q {
    fn wrap(m: Mat<Q>) -> Matrix {
        Matrix::Rational(m)
    }
    fn unwrap(m: &Matrix) -> Option<Mat<Q>> {
        match m {
            Matrix::Rational(x) => Some(x.clone()),
            _ => None,
        }
    }
}

impl RealBackend for f64 {
    fn wrap(m: Mat<f64>) -> Matrix {
        Matrix::Float(m)
    }
    fn unwrap(m: &Matrix) -> Option<Mat<f64>> {
        match m {
            Matrix::Rational(x) => Some(x.to_f64()),
            Matrix::Float(x) => Some(x.clone()),
            _ => None,
        }
    }
}

fn rows<T: Field>(m: &Mat<T>, f: impl Fn(&T) -> Value) -> Vec<Vec<Value>> {
    m.row_vecs().iter().map(|r| r.iter().map(&f).collect()).collect()
}

fn perr<S: Into<String>>(s: S) -> Error {
    Error::Parse(s.into())
}

pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Accepts `"p/q"`, `"p"`, or a JSON integer.
pub fn parse_q(v: &Value) -> Result<Q> {
    match v {
        Value::String(s) => {
            let s = s.trim();
            let (n, d) = match s.split_once('/') {
                Some((n, d)) => (n.trim(), d.trim()),
                None => (s, "1"),
            };
            let n: BigInt = n.parse().map_err(|_| perr(format!("bad rational '{s}'")))?;
            let d: BigInt = d.parse().map_err(|_| perr(format!("bad rational '{s}'")))?;
            if d == BigInt::from(0) {
                return Err(perr(format!("zero denominator in '{s}'")));
            }
            Ok(BigRational::new(n, d))
        }
        Value::Number(n) if n.is_i64() => Ok(BigRational::from_integer(BigInt::from(n.as_i64().unwrap()))),
        _ => Err(perr(format!("expected rational string, found {v}"))),
    }
}

fn parse_f(v: &Value) -> Result<f64> {
    v.as_f64().ok_or_else(|| perr(format!("expected number, found {v}")))
}

fn pair<T>(v: &Value, f: impl Fn(&Value) -> Result<T>) -> Result<(T, T)> {
    match v.as_array() {
        Some(a) if a.len() == 2 => Ok((f(&a[0])?, f(&a[1])?)),
        _ => Err(perr(format!("expected [re, im], found {v}"))),
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        Matrix::from_json(&v).map_err(D::Error::custom)
    }
}

impl From<Mat<Q>> for Matrix {
    fn from(m: Mat<Q>) -> Self {
        Matrix::Rational(m)
    }
}
impl From<Mat<QI>> for Matrix {
    fn from(m: Mat<QI>) -> Self {
        Matrix::Gaussian(m)
    }
}
impl From<Mat<f64>> for Matrix {
    fn from(m: Mat<f64>) -> Self {
        Matrix::Float(m)
    }
}
impl From<Mat<C64>> for Matrix {
    fn from(m: Mat<C64>) -> Self {
        Matrix::Complex(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::scalar::{q, qi};

    #[test]
    fn json_round_trip_all_backends() {
        let r = Matrix::Rational(Mat::from_rows(vec![vec![q(1, 2), q(-3, 1)]]));
        let g = Matrix::Gaussian(Mat::from_rows(vec![vec![qi(q(1, 3), q(-1, 1))]]));
        let f = Matrix::Float(Mat::from_rows(vec![vec![0.25], vec![-1.5]]));
        let c = Matrix::Complex(Mat::from_rows(vec![vec![C64::new(1.0, -2.0)]]));
        for m in [r, g, f, c] {
            let s = serde_json::to_string(&m).unwrap();
            let back: Matrix = serde_json::from_str(&s).unwrap();
            assert_eq!(back, m);
        }
    }

    #[test]
    fn mixed_backends_are_rejected() {
        let r = Matrix::Rational(Mat::identity(2));
        let f = Matrix::Float(Mat::identity(2));
        assert_eq!(r.mul(&f), Err(Error::BackendMismatch(Backend::Rational, Backend::Float)));
        assert!(r.add(&f).is_err());
    }

    #[test]
    fn malformed_json_is_a_parse_error() {
        let v: Value = serde_json::from_str(r#"{"rows":1,"cols":2,"backend":"rational","data":[["1"]]}"#).unwrap();
        assert!(matches!(Matrix::from_json(&v), Err(Error::Parse(_))));
        let v: Value = serde_json::from_str(r#"{"rows":1,"cols":1,"backend":"rational","data":[["1/0"]]}"#).unwrap();
        assert!(matches!(Matrix::from_json(&v), Err(Error::Parse(_))));
    }
}
