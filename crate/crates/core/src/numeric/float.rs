//! Float-only routines: Jacobi eigendecomposition, symmetric exp/log, polar
//! decomposition, orthonormal bases and projector distances.

use super::linalg::TolerancePolicy;
use super::mat::Mat;
use super::scalar::{Field, C64};
use crate::error::{Error, Result};

/// Eigen-decomposition of a hermitian matrix by cyclic Jacobi rotations.
/// Returns ascending eigenvalues and unitary eigenvectors (as columns).
pub fn hermitian_eigh(a: &Mat<C64>) -> (Vec<f64>, Mat<C64>) {
    let n = a.rows();
    assert!(a.is_square(), "eigh of a non-square matrix");
    let mut a = a.add(&a.adjoint()).scale(&C64::new(0.5, 0.0));
    let mut v = Mat::<C64>::identity(n);
    let scale = a.frobenius().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|p| (0..n).map(move |q| (p, q)))
            .filter(|(p, q)| p != q)
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let b = a[(p, q)];
                let babs = b.norm();
                if babs <= 1e-300 {
                    continue;
                }
                let phase = b / babs;
                let (app, aqq) = (a[(p, p)].re, a[(q, q)].re);
                let tau = (aqq - app) / (2.0 * babs);
                let t = if tau == 0.0 { 1.0 } else { tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt()) };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // U = diag(1, conj(phase)) · [[c, s], [−s, c]] on the (p, q) plane
                let upp = C64::new(c, 0.0);
                let upq = C64::new(s, 0.0);
                let uqp = phase.conj() * (-s);
                let uqq = phase.conj() * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = akp * upp + akq * uqp;
                    a[(k, q)] = akp * upq + akq * uqq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = upp.conj() * apk + uqp.conj() * aqk;
                    a[(q, k)] = upq.conj() * apk + uqq.conj() * aqk;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vkp * upp + vkq * uqp;
                    v[(k, q)] = vkp * upq + vkq * uqq;
                }
            }
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&x, &y| a[(x, x)].re.total_cmp(&a[(y, y)].re));
    let vals = idx.iter().map(|&i| a[(i, i)].re).collect();
    (vals, v.select_cols(&idx))
}

/// Real symmetric eigen-decomposition (ascending).
pub fn jacobi_eigh(a: &Mat<f64>) -> (Vec<f64>, Mat<f64>) {
    let (vals, v) = hermitian_eigh(&a.to_c64());
    (vals, v.re_f64())
}

fn check_symmetric(p: &Mat<f64>, pol: &TolerancePolicy) -> Result<()> {
    if !p.is_square() || !p.approx_eq(&p.transpose(), pol.residual_threshold(p)) {
        return Err(Error::Precondition("matrix is not symmetric".into()));
    }
    Ok(())
}

/// `f` applied to the spectrum of a symmetric matrix.
pub fn sym_fn(p: &Mat<f64>, f: impl Fn(f64) -> f64) -> Mat<f64> {
    let (vals, v) = jacobi_eigh(p);
    let d = Mat::diag(&vals.iter().map(|&x| f(x)).collect::<Vec<_>>());
    v.mul(&d).mul(&v.transpose())
}

pub fn sym_exp(p: &Mat<f64>, pol: &TolerancePolicy) -> Result<Mat<f64>> {
    check_symmetric(p, pol)?;
    Ok(sym_fn(p, f64::exp))
}

pub fn sym_log(p: &Mat<f64>, pol: &TolerancePolicy) -> Result<Mat<f64>> {
    check_symmetric(p, pol)?;
    let (vals, _) = jacobi_eigh(p);
    if vals.iter().any(|&x| x <= 0.0) {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(sym_fn(p, f64::ln))
}

/// `g = u·exp(p)` with `u` orthogonal and `p` symmetric.
pub fn polar_decompose(g: &Mat<f64>, pol: &TolerancePolicy) -> Result<(Mat<f64>, Mat<f64>)> {
    if !g.is_square() {
        return Err(Error::Shape("polar decomposition of a non-square matrix".into()));
    }
    let gtg = g.transpose().mul(g);
    let (vals, v) = jacobi_eigh(&gtg);
    let top = vals.iter().cloned().fold(0.0, f64::max);
    if vals.iter().any(|&x| x <= pol.rank_tol * top.max(1.0) * 1e-6) {
        return Err(Error::Singular);
    }
    let half_log = Mat::diag(&vals.iter().map(|&x| 0.5 * x.ln()).collect::<Vec<_>>());
    let inv_sqrt = Mat::diag(&vals.iter().map(|&x| 1.0 / x.sqrt()).collect::<Vec<_>>());
    let vt = v.transpose();
    let p = v.mul(&half_log).mul(&vt);
    let u = g.mul(&v.mul(&inv_sqrt).mul(&vt));
    Ok((u, p))
}

/// `g = u·h` with `u` orthogonal and `h` symmetric positive definite, by
/// scaled Newton iteration. Works on `g` itself rather than `gᵗg`, so the
/// conditioning is not squared.
pub fn polar_newton(g: &Mat<f64>, pol: &TolerancePolicy) -> Result<(Mat<f64>, Mat<f64>)> {
    if !g.is_square() {
        return Err(Error::Shape("polar decomposition of a non-square matrix".into()));
    }
    let n = g.rows();
    let mut x = g.clone();
    for _ in 0..100 {
        let xi = super::linalg::inverse(&x, pol)?;
        let gamma = ((xi.frobenius() / x.frobenius()).sqrt()).clamp(1e-8, 1e8);
        let next = x.scale(&(0.5 * gamma)).add(&xi.transpose().scale(&(0.5 / gamma)));
        let step = next.sub(&x).frobenius();
        x = next;
        if step <= 1e-12 * (n as f64).sqrt() {
            break;
        }
    }
    // one unscaled step polishes the last few bits
    let xi = super::linalg::inverse(&x, pol)?;
    let u = x.add(&xi.transpose()).scale(&0.5);
    let ut = u.transpose();
    let h = ut.mul(g);
    let h = h.add(&h.transpose()).scale(&0.5);
    Ok((u, h))
}

/// `log h` for `h` symmetric positive definite and symplectic. Works through
/// `(h − h⁻¹)/2 = sinh(log h)` with the exact inverse `−ΩhΩ`, which keeps the
/// small eigenvalues from losing relative accuracy.
pub fn sym_log_symplectic(h: &Mat<f64>, pol: &TolerancePolicy) -> Result<Mat<f64>> {
    check_symmetric(h, pol)?;
    let n = h.rows() / 2;
    let om = crate::space::standard_omega::<f64>(n);
    let hi = om.mul(h).mul(&om).neg();
    let s = h.sub(&hi).scale(&0.5);
    Ok(sym_fn(&s.add(&s.transpose()).scale(&0.5), f64::asinh))
}

/// General matrix exponential by scaling and squaring of a Taylor series.
pub fn expm<T: Field>(a: &Mat<T>) -> Mat<T> {
    let norm = a.max_abs() * a.rows() as f64;
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scaled = a.scale(&T::from_ratio(1, 1i64 << s.max(0)));
    let n = a.rows();
    let mut term = Mat::<T>::identity(n);
    let mut sum = Mat::<T>::identity(n);
    for k in 1..=20 {
        term = term.mul(&scaled).scale(&T::from_ratio(1, k));
        sum = sum.add(&term);
    }
    for _ in 0..s {
        sum = sum.mul(&sum);
    }
    sum
}

/// Orthonormal basis of the column span (modified Gram–Schmidt, twice).
pub fn orthonormal_basis(m: &Mat<C64>, tol: f64) -> Mat<C64> {
    let scale = m.max_abs().max(1.0);
    let mut out: Vec<Vec<C64>> = Vec::new();
    for j in 0..m.cols() {
        let mut v: Vec<C64> = (0..m.rows()).map(|r| m[(r, j)]).collect();
        for _ in 0..2 {
            for u in &out {
                let d: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= d * y;
                }
            }
        }
        let nrm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if nrm > tol * scale {
            out.push(v.into_iter().map(|x| x / nrm).collect());
        }
    }
    Mat::from_fn(m.rows(), out.len(), |r, c| out[c][r])
}

/// Orthogonal projector onto the column span.
pub fn projector(m: &Mat<C64>, tol: f64) -> Mat<C64> {
    let q = orthonormal_basis(m, tol);
    q.mul(&q.adjoint())
}

/// Frobenius distance between the orthogonal projectors of two spans.
pub fn projector_distance<T: Field>(a: &Mat<T>, b: &Mat<T>, tol: f64) -> f64 {
    projector(&a.to_c64(), tol).sub(&projector(&b.to_c64(), tol)).frobenius()
}

/// Hermitian positive-definite square root inverse `H^{-1/2}`.
pub fn hermitian_inv_sqrt(h: &Mat<C64>) -> Result<Mat<C64>> {
    let (vals, v) = hermitian_eigh(h);
    if vals.iter().any(|&x| x <= 0.0) {
        return Err(Error::NotPositiveDefinite);
    }
    let d = Mat::diag(&vals.iter().map(|&x| C64::new(1.0 / x.sqrt(), 0.0)).collect::<Vec<_>>());
    Ok(v.mul(&d).mul(&v.adjoint()))
}
