//! Seeded generators for test fixtures, demos and benches.

use crate::numeric::{expm, q, Field, Mat, C64, Q, QI};
use crate::space::{OrbitType, Subspace, SymplecticSpace};
use rand::Rng;

pub fn small_q<G: Rng + ?Sized>(rng: &mut G, bound: i64) -> Q {
    let den = rng.random_range(1..=3);
    q(rng.random_range(-bound..=bound), den)
}

pub fn int_matrix<T: Field, G: Rng + ?Sized>(rng: &mut G, rows: usize, cols: usize, bound: i64) -> Mat<T> {
    Mat::from_fn(rows, cols, |_, _| T::from_i64(rng.random_range(-bound..=bound)))
}

pub fn rational_matrix<G: Rng + ?Sized>(rng: &mut G, rows: usize, cols: usize, bound: i64) -> Mat<Q> {
    Mat::from_fn(rows, cols, |_, _| small_q(rng, bound))
}

pub fn gaussian_matrix<G: Rng + ?Sized>(rng: &mut G, rows: usize, cols: usize, bound: i64) -> Mat<QI> {
    Mat::from_fn(rows, cols, |_, _| QI::new(small_q(rng, bound), small_q(rng, bound)))
}

pub fn float_matrix<G: Rng + ?Sized>(rng: &mut G, rows: usize, cols: usize, scale: f64) -> Mat<f64> {
    Mat::from_fn(rows, cols, |_, _| rng.random_range(-scale..=scale))
}

pub fn symmetric_int<T: Field, G: Rng + ?Sized>(rng: &mut G, n: usize, bound: i64) -> Mat<T> {
    let a: Mat<T> = int_matrix(rng, n, n, bound);
    Mat::from_fn(n, n, |r, c| if r <= c { a[(r, c)].clone() } else { a[(c, r)].clone() })
}

/// Symplectic matrix as a product of shears `[[1,S],[0,1]]`, `[[1,0],[S,1]]`
/// and a unipotent Levi block; entries stay small integers.
pub fn symplectic_int<T: Field, G: Rng + ?Sized>(rng: &mut G, n: usize) -> Mat<T> {
    let id = Mat::<T>::identity(n);
    let z = Mat::<T>::zeros(n, n);
    let mut g = Mat::<T>::identity(2 * n);
    for _ in 0..2 {
        let s = symmetric_int::<T, _>(rng, n, 1);
        let upper = Mat::from_blocks(&[vec![id.clone(), s], vec![z.clone(), id.clone()]]);
        let s = symmetric_int::<T, _>(rng, n, 1);
        let lower = Mat::from_blocks(&[vec![id.clone(), z.clone()], vec![s, id.clone()]]);
        g = g.mul(&upper).mul(&lower);
    }
    // A = 1 + strictly upper integer part, A⁻ᵗ integral as well
    let mut a = Mat::<T>::identity(n);
    for r in 0..n {
        for c in r + 1..n {
            a[(r, c)] = T::from_i64(rng.random_range(-1..=1));
        }
    }
    let ainv_t = crate::numeric::inverse(&a, &Default::default()).expect("unipotent").transpose();
    let levi = Mat::block_diag(&[&a, &ainv_t]);
    g.mul(&levi)
}

/// Symplectic float matrix `exp(X)` for a random `X ∈ sp(2n)` of size `scale`.
pub fn symplectic_f64<G: Rng + ?Sized>(rng: &mut G, n: usize, scale: f64) -> Mat<f64> {
    expm(&sp_element_f64(rng, n, scale))
}

/// Random `[[a, b], [c, −aᵗ]]` with `b, c` symmetric.
pub fn sp_element_f64<G: Rng + ?Sized>(rng: &mut G, n: usize, scale: f64) -> Mat<f64> {
    let a = float_matrix(rng, n, n, scale);
    let b = float_matrix(rng, n, n, scale);
    let c = float_matrix(rng, n, n, scale);
    let b = b.add(&b.transpose()).scale(&0.5);
    let c = c.add(&c.transpose()).scale(&0.5);
    Mat::from_blocks(&[vec![a.clone(), b], vec![c, a.transpose().neg()]])
}

/// Random `[[a, b], [c, −aᵗ]]` over a field with small integer entries.
pub fn sp_element_int<T: Field, G: Rng + ?Sized>(rng: &mut G, n: usize, bound: i64) -> Mat<T> {
    let a: Mat<T> = int_matrix(rng, n, n, bound);
    let b = symmetric_int::<T, _>(rng, n, bound);
    let c = symmetric_int::<T, _>(rng, n, bound);
    Mat::from_blocks(&[vec![a.clone(), b], vec![c, a.transpose().neg()]])
}

/// Random unitary `n×n` as `exp(iH)`.
pub fn unitary<G: Rng + ?Sized>(rng: &mut G, n: usize, scale: f64) -> Mat<C64> {
    let re = float_matrix(rng, n, n, scale);
    let im = float_matrix(rng, n, n, scale);
    let h = Mat::from_fn(n, n, |r, c| C64::new(re[(r, c)], im[(r, c)]));
    let h = h.add(&h.adjoint()).scale(&C64::new(0.5, 0.0));
    expm(&h.scale(&C64::new(0.0, 1.0)))
}

/// `u = x + iy ∈ U(n)` as the real matrix `[[x, −y], [y, x]]`, an element of
/// the maximal compact subgroup fixed by the standard `J`.
pub fn unitary_to_real(u: &Mat<C64>) -> Mat<f64> {
    let x = u.map(|z| z.re);
    let y = u.map(|z| z.im);
    Mat::from_blocks(&[vec![x.clone(), y.neg()], vec![y, x]])
}

pub fn compact_element<G: Rng + ?Sized>(rng: &mut G, n: usize) -> Mat<f64> {
    unitary_to_real(&unitary(rng, n, 1.5))
}

/// Coordinate subspace of type `t`: `span{e_1..e_{n₀}} ⊕ span{e_j, f_j : n₀ < j ≤ n₀+n₊}`.
pub fn basepoint_subspace<T: crate::numeric::RealField>(t: OrbitType) -> Subspace<T> {
    let n = t.n();
    let space = SymplecticSpace::standard(n);
    let mut idx: Vec<usize> = (0..t.n0 + t.nplus).collect();
    idx.extend(n + t.n0..n + t.n0 + t.nplus);
    Subspace::coordinate(&space, &idx)
}

/// Rational subspace of prescribed type, moved by a random integer
/// symplectic matrix and re-mixed by a random invertible column change.
pub fn subspace_of_type<G: Rng + ?Sized>(rng: &mut G, t: OrbitType) -> Subspace<Q> {
    let base = basepoint_subspace::<Q>(t);
    let g = symplectic_int::<Q, _>(rng, t.n());
    let k = base.dim();
    let pol = Default::default();
    let mix = loop {
        let m = rational_matrix(rng, k, k, 2);
        if crate::numeric::rank(&m, &pol) == k {
            break m;
        }
    };
    Subspace::new(base.space(), g.mul(base.basis()).mul(&mix), &pol).expect("independent")
}

/// Uniform random type at half-dimension `n`.
pub fn orbit_type<G: Rng + ?Sized>(rng: &mut G, n: usize) -> OrbitType {
    let all = OrbitType::all(n);
    all[rng.random_range(0..all.len())]
}

/// Random rational subspace of random dimension: half from random spans,
/// half from random types so that degenerate cases are well represented.
pub fn random_subspace<G: Rng + ?Sized>(rng: &mut G, n: usize) -> Subspace<Q> {
    if rng.random_bool(0.5) {
        let t = orbit_type(rng, n);
        subspace_of_type(rng, t)
    } else {
        let k = rng.random_range(0..=2 * n);
        let space = SymplecticSpace::standard(n);
        let m = int_matrix::<Q, _>(rng, 2 * n, k, 2);
        Subspace::span(&space, &m, &Default::default()).expect("shape")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::TolerancePolicy;
    use rand::SeedableRng;

    #[test]
    fn generators_are_symplectic() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let pol = TolerancePolicy::default();
        for n in 1..4 {
            let v = SymplecticSpace::standard(n);
            assert!(v.is_symplectic(&symplectic_int::<Q, _>(&mut rng, n), &pol));
            assert!(v.is_symplectic(&symplectic_f64(&mut rng, n, 0.5), &pol));
            assert!(v.is_symplectic(&compact_element(&mut rng, n), &pol));
        }
    }

    #[test]
    fn typed_subspaces_have_their_type() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(8);
        let pol = TolerancePolicy::default();
        for t in OrbitType::all(3) {
            assert_eq!(subspace_of_type(&mut rng, t).subspace_type(&pol), t);
        }
    }
}
