//! Elimination-based linear algebra shared by every backend.
//!
//! On exact fields pivots are the first nonzero entry in a column, so results
//! are bit-reproducible. On float fields the pivot is the largest entry in
//! the column and anything at or below `rank_tol · max(1, max|M|)` counts as
//! zero.

use super::float;
use super::mat::Mat;
use super::scalar::Field;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Thresholds for every float decision.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TolerancePolicy {
    pub rank_tol: f64,
    pub residual_tol: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        TolerancePolicy { rank_tol: 1e-9, residual_tol: 1e-10 }
    }
}

impl TolerancePolicy {
    pub fn new(rank_tol: f64, residual_tol: f64) -> Result<Self> {
        if !(rank_tol > 0.0 && residual_tol > 0.0) {
            return Err(Error::Precondition("tolerances must be strictly positive".into()));
        }
        Ok(TolerancePolicy { rank_tol, residual_tol })
    }

    /// Defaults, with `SYMPLECTA_TOL` overriding `residual_tol` when set.
    pub fn from_env() -> Self {
        let mut pol = Self::default();
        if let Some(v) = std::env::var("SYMPLECTA_TOL").ok().and_then(|s| s.trim().parse::<f64>().ok()) {
            if v > 0.0 {
                pol.residual_tol = v;
            }
        }
        pol
    }

    /// Absolute pivot threshold for `m`.
    pub fn pivot_threshold<T: Field>(&self, m: &Mat<T>) -> f64 {
        if T::EXACT {
            0.0
        } else {
            self.rank_tol * m.max_abs().max(1.0)
        }
    }

    pub fn residual_threshold<T: Field>(&self, m: &Mat<T>) -> f64 {
        if T::EXACT {
            0.0
        } else {
            self.residual_tol * m.max_abs().max(1.0)
        }
    }
}

/// Reduced row echelon form and its pivot columns.
#[derive(Clone)]
pub struct Rref<T: Field> {
    pub r: Mat<T>,
    pub pivots: Vec<usize>,
}

pub fn rref<T: Field>(m: &Mat<T>, pol: &TolerancePolicy) -> Rref<T> {
    let thr = pol.pivot_threshold(m);
    let mut a = m.clone();
    let (rows, cols) = a.shape();
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..cols {
        if row == rows {
            break;
        }
        let pick = if T::EXACT {
            (row..rows).find(|&r| !a[(r, c)].is_zero_tol(0.0))
        } else {
            (row..rows)
                .max_by(|&x, &y| a[(x, c)].magnitude().total_cmp(&a[(y, c)].magnitude()))
                .filter(|&r| a[(r, c)].magnitude() > thr)
        };
        let Some(p) = pick else {
            if !T::EXACT {
                for r in row..rows {
                    a[(r, c)] = T::zero();
                }
            }
            continue;
        };
        if p != row {
            for k in 0..cols {
                let tmp = a[(p, k)].clone();
                a[(p, k)] = a[(row, k)].clone();
                a[(row, k)] = tmp;
            }
        }
        let inv = T::one().div(&a[(row, c)]);
        for k in c..cols {
            a[(row, k)] = a[(row, k)].mul(&inv);
        }
        for r in 0..rows {
            if r == row {
                continue;
            }
            let f = a[(r, c)].clone();
            if f.is_zero_tol(0.0) {
                continue;
            }
            for k in c..cols {
                let v = a[(r, k)].sub(&f.mul(&a[(row, k)]));
                a[(r, k)] = v;
            }
        }
        pivots.push(c);
        row += 1;
    }
    Rref { r: a, pivots }
}

pub fn rank<T: Field>(m: &Mat<T>, pol: &TolerancePolicy) -> usize {
    rref(m, pol).pivots.len()
}

/// Rank and a basis of the right nullspace (independent columns).
pub fn rank_and_nullspace<T: Field>(m: &Mat<T>, pol: &TolerancePolicy) -> (usize, Mat<T>) {
    let Rref { r, pivots } = rref(m, pol);
    let cols = m.cols();
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut ns = Mat::zeros(cols, free.len());
    for (j, &f) in free.iter().enumerate() {
        ns[(f, j)] = T::one();
        for (i, &p) in pivots.iter().enumerate() {
            ns[(p, j)] = r[(i, f)].neg();
        }
    }
    (pivots.len(), ns)
}

pub fn nullspace<T: Field>(m: &Mat<T>, pol: &TolerancePolicy) -> Mat<T> {
    rank_and_nullspace(m, pol).1
}

/// The independent columns of `m` chosen greedily from the left.
pub fn column_basis<T: Field>(m: &Mat<T>, pol: &TolerancePolicy) -> Mat<T> {
    let piv = rref(m, pol).pivots;
    m.select_cols(&piv)
}

/// Canonical basis of the column span: reduced column echelon form.
pub fn column_echelon<T: Field>(m: &Mat<T>, pol: &TolerancePolicy) -> Mat<T> {
    let Rref { r, pivots } = rref(&m.transpose(), pol);
    r.block(0, 0, pivots.len(), r.cols()).transpose()
}

/// Rows spanning the left annihilator: `N · m = 0`.
pub fn left_annihilator<T: Field>(m: &Mat<T>, pol: &TolerancePolicy) -> Mat<T> {
    nullspace(&m.transpose(), pol).transpose()
}

/// Columns spanning col(A) ∩ col(B), via the nullspace of `[A | −B]`.
pub fn intersect_columns<T: Field>(a: &Mat<T>, b: &Mat<T>, pol: &TolerancePolicy) -> Result<Mat<T>> {
    if a.rows() != b.rows() {
        return Err(Error::Shape(format!("row counts {} and {} differ", a.rows(), b.rows())));
    }
    let ns = nullspace(&a.hstack(&b.neg()), pol);
    let x = ns.block(0, 0, a.cols(), ns.cols());
    Ok(column_basis(&a.mul(&x), pol))
}

/// Solves `A X = B`; `None` when inconsistent. Free variables are set to zero.
pub fn solve<T: Field>(a: &Mat<T>, b: &Mat<T>, pol: &TolerancePolicy) -> Option<Mat<T>> {
    assert_eq!(a.rows(), b.rows(), "solve: row mismatch");
    let aug = a.hstack(b);
    let thr = pol.pivot_threshold(&aug);
    let Rref { r, pivots } = rref(&aug, pol);
    if pivots.iter().any(|&p| p >= a.cols()) {
        return None;
    }
    let k = pivots.len();
    for row in k..r.rows() {
        for c in a.cols()..aug.cols() {
            if !r[(row, c)].is_zero_tol(thr) {
                return None;
            }
        }
    }
    let mut x = Mat::zeros(a.cols(), b.cols());
    for (i, &p) in pivots.iter().enumerate() {
        for c in 0..b.cols() {
            x[(p, c)] = r[(i, a.cols() + c)].clone();
        }
    }
    Some(x)
}

pub fn inverse<T: Field>(a: &Mat<T>, pol: &TolerancePolicy) -> Result<Mat<T>> {
    if !a.is_square() {
        return Err(Error::Shape("inverse of a non-square matrix".into()));
    }
    if rank(a, pol) < a.rows() {
        return Err(Error::Singular);
    }
    solve(a, &Mat::identity(a.rows()), pol).ok_or(Error::Singular)
}

/// col(b) ⊆ col(a)
pub fn span_contains<T: Field>(a: &Mat<T>, b: &Mat<T>, pol: &TolerancePolicy) -> bool {
    if b.cols() == 0 {
        return true;
    }
    rank(a, pol) == rank(&a.hstack(b), pol)
}

pub fn span_eq<T: Field>(a: &Mat<T>, b: &Mat<T>, pol: &TolerancePolicy) -> bool {
    let ra = rank(a, pol);
    ra == rank(b, pol) && ra == rank(&a.hstack(b), pol)
}

/// Columns of `pool`, taken in order, that extend the independent columns of
/// `a` to a basis of `col(a) + col(pool)`.
pub fn extend_basis<T: Field>(a: &Mat<T>, pool: &Mat<T>, pol: &TolerancePolicy) -> Mat<T> {
    let piv = rref(&a.hstack(pool), pol).pivots;
    let picked: Vec<usize> = piv.into_iter().filter(|&p| p >= a.cols()).map(|p| p - a.cols()).collect();
    pool.select_cols(&picked)
}

/// Inertia `(n₀, n₊, n₋)` of a hermitian matrix.
///
/// Exact fields use congruence elimination (Sylvester's law); float fields
/// count eigenvalue signs against the pivot threshold.
pub fn signature_by_congruence<T: Field>(h: &Mat<T>, pol: &TolerancePolicy) -> Result<(usize, usize, usize)> {
    if !h.is_square() {
        return Err(Error::Shape("signature of a non-square matrix".into()));
    }
    if !h.approx_eq(&h.adjoint(), pol.residual_threshold(h)) {
        return Err(Error::NotHermitian);
    }
    if !T::EXACT {
        let thr = pol.pivot_threshold(h);
        let (vals, _) = float::hermitian_eigh(&h.to_c64());
        let mut out = (0, 0, 0);
        for v in vals {
            match v.re_sign(thr) {
                0 => out.0 += 1,
                1 => out.1 += 1,
                _ => out.2 += 1,
            }
        }
        return Ok(out);
    }
    let (mut zero, mut pos, mut neg) = (0, 0, 0);
    let mut h = h.clone();
    loop {
        let k = h.rows();
        if k == 0 {
            break;
        }
        if let Some(i) = (0..k).find(|&i| h[(i, i)].re_sign(0.0) != 0) {
            if h[(i, i)].re_sign(0.0) > 0 {
                pos += 1;
            } else {
                neg += 1;
            }
            let piv = h[(i, i)].clone();
            let rest: Vec<usize> = (0..k).filter(|&a| a != i).collect();
            h = Mat::from_fn(k - 1, k - 1, |a, b| {
                let (ra, rb) = (rest[a], rest[b]);
                h[(ra, rb)].sub(&h[(ra, i)].mul(&h[(i, rb)]).div(&piv))
            });
            continue;
        }
        let off = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).find(|&(i, j)| i != j && !h[(i, j)].is_zero_tol(0.0));
        match off {
            None => {
                zero += k;
                break;
            }
            Some((i, j)) => {
                // v_i ← v_i + conj(h_ij)·v_j turns the (i,i) entry into 2|h_ij|²
                let mut t = Mat::identity(k);
                t[(j, i)] = h[(i, j)].conj();
                h = t.adjoint().mul(&h).mul(&t);
            }
        }
    }
    Ok((zero, pos, neg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::scalar::{q, qi, Q, QI};

    fn pol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    #[test]
    fn identity_has_full_rank_and_empty_nullspace() {
        let (r, ns) = rank_and_nullspace(&Mat::<Q>::identity(3), &pol());
        assert_eq!(r, 3);
        assert_eq!(ns.cols(), 0);
    }

    #[test]
    fn zero_matrix_nullspace_is_everything() {
        let (r, ns) = rank_and_nullspace(&Mat::<Q>::zeros(2, 3), &pol());
        assert_eq!(r, 0);
        assert_eq!(ns.cols(), 3);
    }

    #[test]
    fn intersect_coordinate_spans() {
        let i = Mat::<Q>::identity(4);
        let a = i.select_cols(&[0, 1]);
        let b = i.select_cols(&[2, 3]);
        assert_eq!(intersect_columns(&a, &b, &pol()).unwrap().cols(), 0);
        assert!(span_eq(&intersect_columns(&i, &i, &pol()).unwrap(), &i, &pol()));
    }

    #[test]
    fn signature_small_cases() {
        let d = Mat::<Q>::diag(&[q(1, 1), q(-1, 1), q(0, 1)]);
        assert_eq!(signature_by_congruence(&d, &pol()).unwrap(), (1, 1, 1));
        assert_eq!(signature_by_congruence(&Mat::<Q>::zeros(3, 3), &pol()).unwrap(), (3, 0, 0));
        // hyperbolic plane with zero diagonal
        let h = Mat::<Q>::from_i64_rows(&[&[0, 1], &[1, 0]]);
        assert_eq!(signature_by_congruence(&h, &pol()).unwrap(), (0, 1, 1));
        // [[0, i], [−i, 0]] over ℚ(i)
        let z = QI::zero();
        let h = Mat::from_rows(vec![vec![z.clone(), qi(q(0, 1), q(1, 1))], vec![qi(q(0, 1), q(-1, 1)), z]]);
        assert_eq!(signature_by_congruence(&h, &pol()).unwrap(), (0, 1, 1));
    }

    #[test]
    fn signature_rejects_non_hermitian() {
        let h = Mat::<Q>::from_i64_rows(&[&[0, 1], &[0, 0]]);
        assert_eq!(signature_by_congruence(&h, &pol()), Err(Error::NotHermitian));
    }

    #[test]
    fn solve_and_inverse() {
        let a = Mat::<Q>::from_i64_rows(&[&[2, 1], &[1, 1]]);
        let inv = inverse(&a, &pol()).unwrap();
        assert_eq!(a.mul(&inv), Mat::identity(2));
        let sing = Mat::<Q>::from_i64_rows(&[&[1, 2], &[2, 4]]);
        assert_eq!(inverse(&sing, &pol()), Err(Error::Singular));
    }

    #[test]
    fn float_rank_respects_threshold() {
        let mut m = Mat::<f64>::from_i64_rows(&[&[1, 2], &[2, 4]]);
        m[(1, 1)] += 1e-12;
        assert_eq!(rank(&m, &pol()), 1);
        m[(1, 1)] += 1e-6;
        assert_eq!(rank(&m, &pol()), 2);
    }

    #[test]
    fn column_echelon_is_canonical() {
        let a = Mat::<Q>::from_i64_rows(&[&[1, 1], &[0, 1], &[2, 3]]);
        let b = a.mul(&Mat::from_i64_rows(&[&[3, 1], &[-1, 2]]));
        assert_eq!(column_echelon(&a, &pol()), column_echelon(&b, &pol()));
    }
}
