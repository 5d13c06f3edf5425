//! The Heisenberg group `H(n⃗)` of a subspace in its three matrix forms, the
//! Levi splitting, stabilizer factorization, and the transporter between
//! associated splittings.

use crate::darboux::{darboux_extend, AssociatedSplitting, DarbouxBasis};
use crate::error::{Error, Result};
use crate::numeric::{inverse, ComplexField, Field, Mat, Matrix, RealField, TolerancePolicy, Q};
use crate::space::{standard_omega, OrbitType, Subspace, SymplecticSpace};
use serde_json::{json, Value};

/// Basis orderings for the matrix form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeisenbergForm {
    /// `e⁰ e⁺ e⁻ f⁰ f⁺ f⁻`
    Darboux,
    /// `e⁰ e⁺ f⁺ e⁻ f⁻ f⁰`
    Triangular,
    /// `e⁺ e⁻ e⁰ f⁺ f⁻ f⁰`
    Ziegler,
}

impl std::str::FromStr for HeisenbergForm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "darboux" => Ok(Self::Darboux),
            "triangular" => Ok(Self::Triangular),
            "ziegler" => Ok(Self::Ziegler),
            _ => Err(Error::Parse(format!("unknown form '{s}' (darboux|triangular|ziegler)"))),
        }
    }
}

struct Blocks {
    e0: std::ops::Range<usize>,
    ep: std::ops::Range<usize>,
    em: std::ops::Range<usize>,
    f0: std::ops::Range<usize>,
    fp: std::ops::Range<usize>,
    fm: std::ops::Range<usize>,
}

fn blocks(t: OrbitType) -> Blocks {
    let n = t.n();
    let (a, b) = (t.n0, t.n0 + t.nplus);
    Blocks { e0: 0..a, ep: a..b, em: b..n, f0: n..n + a, fp: n + a..n + b, fm: n + b..2 * n }
}

/// Permutation `P` with `P e_k = e_{σ(k)}`, where `σ` lists the Darboux-order
/// index of the `k`-th vector of `form`. The form's matrix is `Pᵗ g P`.
pub fn form_permutation<T: Field>(t: OrbitType, form: HeisenbergForm) -> Mat<T> {
    let b = blocks(t);
    let order: Vec<std::ops::Range<usize>> = match form {
        HeisenbergForm::Darboux => vec![b.e0, b.ep, b.em, b.f0, b.fp, b.fm],
        HeisenbergForm::Triangular => vec![b.e0, b.ep, b.fp, b.em, b.fm, b.f0],
        HeisenbergForm::Ziegler => vec![b.ep, b.em, b.e0, b.fp, b.fm, b.f0],
    };
    let idx: Vec<usize> = order.into_iter().flatten().collect();
    Mat::<T>::identity(idx.len()).select_cols(&idx)
}

/// Matrix of `ω` in the basis ordering of `form`.
pub fn form_omega<T: Field>(t: OrbitType, form: HeisenbergForm) -> Mat<T> {
    let p = form_permutation::<T>(t, form);
    p.transpose().mul(&standard_omega(t.n())).mul(&p)
}

/// An element of `H(n⃗)` stored by its five blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct HeisenbergElement<T: Field> {
    pub t: OrbitType,
    pub eplus: Mat<T>,
    pub eminus: Mat<T>,
    pub fplus: Mat<T>,
    pub fminus: Mat<T>,
    pub y: Mat<T>,
}

fn sub<T: Field>(m: &Mat<T>, r: &std::ops::Range<usize>, c: &std::ops::Range<usize>) -> Mat<T> {
    m.block(r.start, c.start, r.len(), c.len())
}

impl<T: Field> HeisenbergElement<T> {
    pub fn new(t: OrbitType, eplus: Mat<T>, eminus: Mat<T>, fplus: Mat<T>, fminus: Mat<T>, y: Mat<T>, pol: &TolerancePolicy) -> Result<Self> {
        let want = [(t.n0, t.nplus), (t.n0, t.nminus), (t.n0, t.nplus), (t.n0, t.nminus), (t.n0, t.n0)];
        let got = [eplus.shape(), eminus.shape(), fplus.shape(), fminus.shape(), y.shape()];
        if want != got {
            return Err(Error::Shape(format!("blocks {got:?} do not fit type {t}")));
        }
        let h = HeisenbergElement { t, eplus, eminus, fplus, fminus, y };
        let c = h.condition();
        if !c.approx_eq(&c.transpose(), pol.residual_threshold(&h.to_matrix(HeisenbergForm::Darboux))) {
            return Err(Error::Invariant("Y − E₊F₊ᵗ − E₋F₋ᵗ is not symmetric".into()));
        }
        Ok(h)
    }

    pub fn identity(t: OrbitType) -> Self {
        HeisenbergElement {
            t,
            eplus: Mat::zeros(t.n0, t.nplus),
            eminus: Mat::zeros(t.n0, t.nminus),
            fplus: Mat::zeros(t.n0, t.nplus),
            fminus: Mat::zeros(t.n0, t.nminus),
            y: Mat::zeros(t.n0, t.n0),
        }
    }

    /// Central element with `E± = F± = 0` and symmetric `Y`.
    pub fn central(t: OrbitType, y: Mat<T>, pol: &TolerancePolicy) -> Result<Self> {
        let z = Self::identity(t);
        Self::new(t, z.eplus, z.eminus, z.fplus, z.fminus, y, pol)
    }

    /// `Y − E₊F₊ᵗ − E₋F₋ᵗ`, which must be symmetric.
    pub fn condition(&self) -> Mat<T> {
        self.y.sub(&self.eplus.mul(&self.fplus.transpose())).sub(&self.eminus.mul(&self.fminus.transpose()))
    }

    pub fn is_central(&self) -> bool {
        [&self.eplus, &self.eminus, &self.fplus, &self.fminus].iter().all(|m| m.is_zero(0.0))
    }

    pub fn to_matrix(&self, form: HeisenbergForm) -> Mat<T> {
        let t = self.t;
        let b = blocks(t);
        let mut g = Mat::<T>::identity(2 * t.n());
        g.set_block(0, b.ep.start, &self.eplus);
        g.set_block(0, b.em.start, &self.eminus);
        g.set_block(0, b.f0.start, &self.y);
        g.set_block(0, b.fp.start, &self.fplus);
        g.set_block(0, b.fm.start, &self.fminus);
        g.set_block(b.ep.start, b.f0.start, &self.fplus.transpose());
        g.set_block(b.em.start, b.f0.start, &self.fminus.transpose());
        g.set_block(b.fp.start, b.f0.start, &self.eplus.transpose().neg());
        g.set_block(b.fm.start, b.f0.start, &self.eminus.transpose().neg());
        match form {
            HeisenbergForm::Darboux => g,
            _ => {
                let p = form_permutation::<T>(t, form);
                p.transpose().mul(&g).mul(&p)
            }
        }
    }

    /// Reads an element back from its matrix, checking every block.
    pub fn from_matrix(t: OrbitType, g: &Mat<T>, form: HeisenbergForm, pol: &TolerancePolicy) -> Result<Self> {
        if g.shape() != (2 * t.n(), 2 * t.n()) {
            return Err(Error::Shape(format!("{}×{} matrix for type {t}", g.rows(), g.cols())));
        }
        let g = match form {
            HeisenbergForm::Darboux => g.clone(),
            _ => {
                let p = form_permutation::<T>(t, form);
                p.mul(g).mul(&p.transpose())
            }
        };
        let b = blocks(t);
        let h = HeisenbergElement {
            t,
            eplus: sub(&g, &b.e0, &b.ep),
            eminus: sub(&g, &b.e0, &b.em),
            fplus: sub(&g, &b.e0, &b.fp),
            fminus: sub(&g, &b.e0, &b.fm),
            y: sub(&g, &b.e0, &b.f0),
        };
        let tol = pol.residual_threshold(&g) * g.max_abs().max(1.0);
        if !h.to_matrix(HeisenbergForm::Darboux).approx_eq(&g, tol) {
            return Err(Error::Invariant("matrix is not in the Heisenberg group".into()));
        }
        Self::new(t, h.eplus, h.eminus, h.fplus, h.fminus, h.y, pol)
    }

    fn check_same(&self, o: &Self) -> Result<()> {
        if self.t != o.t {
            return Err(Error::Shape(format!("types {} and {} differ", self.t, o.t)));
        }
        Ok(())
    }

    /// Group law read off from the product of matrices.
    pub fn compose(&self, o: &Self, pol: &TolerancePolicy) -> Result<Self> {
        self.check_same(o)?;
        let f = HeisenbergForm::Darboux;
        Self::from_matrix(self.t, &self.to_matrix(f).mul(&o.to_matrix(f)), f, pol)
    }

    pub fn inverse(&self, pol: &TolerancePolicy) -> Result<Self> {
        let f = HeisenbergForm::Darboux;
        Self::from_matrix(self.t, &inverse(&self.to_matrix(f), pol)?, f, pol)
    }

    /// `(λ, μ, x) = ((E₊ E₋), (F₊ F₋), −Y)`.
    pub fn ziegler(&self) -> (Mat<T>, Mat<T>, Mat<T>) {
        (self.eplus.hstack(&self.eminus), self.fplus.hstack(&self.fminus), self.y.neg())
    }

    pub fn from_ziegler(t: OrbitType, lambda: &Mat<T>, mu: &Mat<T>, x: &Mat<T>, pol: &TolerancePolicy) -> Result<Self> {
        if lambda.shape() != (t.n0, t.nplus + t.nminus) || mu.shape() != lambda.shape() || x.shape() != (t.n0, t.n0) {
            return Err(Error::Shape(format!("Ziegler coordinates do not fit type {t}")));
        }
        let split = |m: &Mat<T>| (m.block(0, 0, t.n0, t.nplus), m.block(0, t.nplus, t.n0, t.nminus));
        let (ep, em) = split(lambda);
        let (fp, fm) = split(mu);
        Self::new(t, ep, em, fp, fm, x.neg(), pol)
    }

    /// Free parameters: `E±`, `F±` and the symmetric part of the condition.
    pub fn parameters(&self) -> Vec<T> {
        let mut out = Vec::new();
        for m in [&self.eplus, &self.eminus, &self.fplus, &self.fminus] {
            out.extend(m.data().iter().cloned());
        }
        let c = self.condition();
        for r in 0..self.t.n0 {
            for k in r..self.t.n0 {
                out.push(c[(r, k)].clone());
            }
        }
        out
    }
}

impl HeisenbergElement<Q> {
    pub fn to_json(&self) -> Value {
        let m = |x: &Mat<Q>| Matrix::Rational(x.clone()).to_json();
        json!({
            "type": self.t,
            "Eplus": m(&self.eplus),
            "Eminus": m(&self.eminus),
            "Fplus": m(&self.fplus),
            "Fminus": m(&self.fminus),
            "Y": m(&self.y),
        })
    }

    pub fn from_json(v: &Value, pol: &TolerancePolicy) -> Result<Self> {
        let t: OrbitType = serde_json::from_value(v.get("type").cloned().ok_or_else(|| Error::Parse("missing field 'type'".into()))?)
            .map_err(|e| Error::Parse(e.to_string()))?;
        let get = |k: &str| -> Result<Mat<Q>> {
            match Matrix::from_json(v.get(k).ok_or_else(|| Error::Parse(format!("missing field '{k}'")))?)? {
                Matrix::Rational(m) => Ok(m),
                other => Err(Error::Parse(format!("field '{k}' must be rational, got {:?}", other.backend()))),
            }
        };
        Self::new(t, get("Eplus")?, get("Eminus")?, get("Fplus")?, get("Fminus")?, get("Y")?, pol)
    }
}

/// `dim H(n⃗) = 2n₀n₊ + 2n₀n₋ + n₀(n₀+1)/2`.
pub fn heisenberg_dim(t: OrbitType) -> usize {
    2 * t.n0 * t.nplus + 2 * t.n0 * t.nminus + t.n0 * (t.n0 + 1) / 2
}

/// `(X, g₊, g₋) ∈ GL(n₀) × Sp(2n₊) × Sp(2n₋)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LeviElement<T: Field> {
    pub x: Mat<T>,
    pub gplus: Mat<T>,
    pub gminus: Mat<T>,
}

impl<T: Field> LeviElement<T> {
    pub fn new(x: Mat<T>, gplus: Mat<T>, gminus: Mat<T>, pol: &TolerancePolicy) -> Result<Self> {
        if !x.is_square() || !gplus.is_square() || !gminus.is_square() || !gplus.rows().is_multiple_of(2) || !gminus.rows().is_multiple_of(2) {
            return Err(Error::Shape("Levi blocks must be square, symplectic blocks even".into()));
        }
        inverse(&x, pol).map_err(|_| Error::Invariant("X is singular".into()))?;
        for (g, name) in [(&gplus, "g₊"), (&gminus, "g₋")] {
            if !SymplecticSpace::standard(g.rows() / 2).is_symplectic(g, pol) {
                return Err(Error::Invariant(format!("{name} is not symplectic")));
            }
        }
        Ok(LeviElement { x, gplus, gminus })
    }

    pub fn identity(t: OrbitType) -> Self {
        LeviElement { x: Mat::identity(t.n0), gplus: Mat::identity(2 * t.nplus), gminus: Mat::identity(2 * t.nminus) }
    }

    pub fn orbit_type(&self) -> OrbitType {
        OrbitType::new(self.x.rows(), self.gplus.rows() / 2, self.gminus.rows() / 2)
    }

    pub fn compose(&self, o: &Self) -> Self {
        LeviElement { x: self.x.mul(&o.x), gplus: self.gplus.mul(&o.gplus), gminus: self.gminus.mul(&o.gminus) }
    }
}

/// The splitting homomorphism `GL(n₀) × Sp(2n₊) × Sp(2n₋) → Sp_W` in the
/// Darboux ordering.
pub fn levi_embed<T: Field>(l: &LeviElement<T>, pol: &TolerancePolicy) -> Result<Mat<T>> {
    let t = l.orbit_type();
    let b = blocks(t);
    let mut g = Mat::<T>::zeros(2 * t.n(), 2 * t.n());
    g.set_block(0, 0, &l.x);
    g.set_block(b.f0.start, b.f0.start, &inverse(&l.x, pol)?.transpose());
    for (gs, e, f) in [(&l.gplus, &b.ep, &b.fp), (&l.gminus, &b.em, &b.fm)] {
        let k = e.len();
        g.set_block(e.start, e.start, &gs.block(0, 0, k, k));
        g.set_block(e.start, f.start, &gs.block(0, k, k, k));
        g.set_block(f.start, e.start, &gs.block(k, 0, k, k));
        g.set_block(f.start, f.start, &gs.block(k, k, k, k));
    }
    Ok(g)
}

/// `GL(n₀, ℝ) × U(n₊, n₋) → Sp_F` for the basepoint `F` of type `n⃗`.
/// `u` preserves `diag(1_{n₊}, −1_{n₋})`.
pub fn unitary_embed<C: ComplexField>(t: OrbitType, x: &Mat<C::Real>, u: &Mat<C>, pol: &TolerancePolicy) -> Result<Mat<C::Real>> {
    let k = t.nplus + t.nminus;
    if x.shape() != (t.n0, t.n0) || u.shape() != (k, k) {
        return Err(Error::Shape(format!("blocks do not fit type {t}")));
    }
    let mut d = Mat::<C>::identity(k);
    for i in t.nplus..k {
        d[(i, i)] = C::one().neg();
    }
    let tol = pol.residual_threshold(u) * u.max_abs().max(1.0).powi(2);
    if !u.adjoint().mul(&d).mul(u).approx_eq(&d, tol) {
        return Err(Error::Invariant("u does not preserve the form of signature (n₊, n₋)".into()));
    }
    // signs: rows/cols of the minus block flip the imaginary part and the f-side
    let (re, im) = (u.re(), u.im());
    let sgn = |i: usize| if i < t.nplus { C::Real::one() } else { C::Real::one().neg() };
    let b = blocks(t);
    let n = t.n();
    let mut g = Mat::<C::Real>::zeros(2 * n, 2 * n);
    g.set_block(0, 0, x);
    g.set_block(b.f0.start, b.f0.start, &inverse(x, pol)?.transpose());
    let off = t.n0;
    for r in 0..k {
        for c in 0..k {
            let (sr, sc) = (sgn(r), sgn(c));
            let (a, i) = (re[(r, c)].clone(), im[(r, c)].clone());
            // e-row, e-col: R;  e-row, f-col: −I·s_c;  f-row, e-col: I·s_r;  f-row, f-col: R·s_r·s_c
            g[(off + r, off + c)] = a.clone();
            g[(off + r, n + off + c)] = i.mul(&sc).neg();
            g[(n + off + r, off + c)] = i.mul(&sr);
            g[(n + off + r, n + off + c)] = a.mul(&sr).mul(&sc);
        }
    }
    Ok(g)
}

/// `g = B · levi_embed(L) · H · B⁻¹` for `g` in the stabilizer of `W`, with
/// `B` an adapted Darboux basis.
pub fn factor_stabilizer<R: RealField>(
    g: &Mat<R>,
    w: &Subspace<R>,
    basis: &DarbouxBasis<R>,
    pol: &TolerancePolicy,
) -> Result<(LeviElement<R>, HeisenbergElement<R>)> {
    let space = w.space();
    if !space.is_symplectic(g, pol) {
        return Err(Error::Precondition("g is not symplectic".into()));
    }
    if !w.transform(g).same_span(w, pol) {
        return Err(Error::Precondition("g does not stabilize W".into()));
    }
    let bv = basis.vectors();
    let big = inverse(bv, pol)?.mul(g).mul(bv);
    let t = basis.labels();
    let b = blocks(t);
    let sym_block = |e: &std::ops::Range<usize>, f: &std::ops::Range<usize>| {
        Mat::from_blocks(&[vec![sub(&big, e, e), sub(&big, e, f)], vec![sub(&big, f, e), sub(&big, f, f)]])
    };
    let levi = LeviElement::new(sub(&big, &b.e0, &b.e0), sym_block(&b.ep, &b.fp), sym_block(&b.em, &b.fm), pol)?;
    let lm = levi_embed(&levi, pol)?;
    let hm = inverse(&lm, pol)?.mul(&big);
    let h = HeisenbergElement::from_matrix(t, &hm, HeisenbergForm::Darboux, pol)?;
    Ok((levi, h))
}

/// The unique `h ∈ H(W)` with `h·s₁ = s₂`, written in the adapted basis of
/// `(W, s₁)` which is returned alongside.
pub fn splitting_transporter<R: RealField>(
    w: &Subspace<R>,
    s1: &AssociatedSplitting<R>,
    s2: &AssociatedSplitting<R>,
    pol: &TolerancePolicy,
) -> Result<(HeisenbergElement<R>, DarbouxBasis<R>)> {
    let b1 = darboux_extend(w, Some(s1), pol)?;
    let b2 = darboux_extend(w, Some(s2), pol)?;
    let g = b2.vectors().mul(&inverse(b1.vectors(), pol)?);
    let (levi, h) = factor_stabilizer(&g, w, &b1, pol)?;
    // G = L·H, so G·L⁻¹ = L H L⁻¹ lies in H and still carries s₁ to s₂
    let lm = levi_embed(&levi, pol)?;
    let hm = lm.mul(&h.to_matrix(HeisenbergForm::Darboux)).mul(&inverse(&lm, pol)?);
    let out = HeisenbergElement::from_matrix(b1.labels(), &hm, HeisenbergForm::Darboux, pol)?;
    let moved = s1.transform(&b1.vectors().mul(&hm).mul(&inverse(b1.vectors(), pol)?));
    if !moved.same_as(s2, pol) {
        return Err(Error::Invariant("transporter does not carry s₁ to s₂".into()));
    }
    Ok((out, b1))
}

/// `h` written in `V` through the adapted basis `B`: `B H B⁻¹`.
pub fn heisenberg_in_basis<R: RealField>(h: &HeisenbergElement<R>, b: &DarbouxBasis<R>, pol: &TolerancePolicy) -> Result<Mat<R>> {
    Ok(b.vectors().mul(&h.to_matrix(HeisenbergForm::Darboux)).mul(&inverse(b.vectors(), pol)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{q, C64};
    use crate::darboux::darboux_extend;

    fn pol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    fn qm(rows: &[&[i64]]) -> Mat<Q> {
        Mat::from_i64_rows(rows)
    }

    #[test]
    fn zero_is_identity() {
        let t = OrbitType::new(2, 1, 1);
        for f in [HeisenbergForm::Darboux, HeisenbergForm::Triangular, HeisenbergForm::Ziegler] {
            assert_eq!(HeisenbergElement::<Q>::identity(t).to_matrix(f), Mat::identity(8));
        }
    }

    #[test]
    fn substitution_example() {
        let t = OrbitType::new(1, 1, 0);
        let h = HeisenbergElement::new(t, qm(&[&[1]]), Mat::zeros(1, 0), qm(&[&[0]]), Mat::zeros(1, 0), qm(&[&[0]]), &pol()).unwrap();
        // e⁰ e⁺ f⁰ f⁺
        let want = qm(&[&[1, 1, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, -1, 1]]);
        assert_eq!(h.to_matrix(HeisenbergForm::Darboux), want);
        assert!(SymplecticSpace::standard(2).is_symplectic(&want, &pol()));
    }

    #[test]
    fn condition_is_enforced() {
        let t = OrbitType::new(2, 0, 0);
        let y = qm(&[&[0, 1], &[0, 0]]);
        assert!(HeisenbergElement::central(t, y, &pol()).is_err());
    }

    #[test]
    fn dims() {
        assert_eq!(heisenberg_dim(OrbitType::new(0, 2, 1)), 0);
        assert_eq!(heisenberg_dim(OrbitType::new(3, 0, 0)), 6);
        assert_eq!(heisenberg_dim(OrbitType::new(1, 1, 1)), 5);
    }

    #[test]
    fn unitary_embed_of_diagonal_phase() {
        let t = OrbitType::new(0, 1, 1);
        let (c, s) = (0.6, 0.8);
        let u = Mat::diag(&[C64::new(c, s), C64::new(c, -s)]);
        let g = unitary_embed(t, &Mat::<f64>::zeros(0, 0), &u, &pol()).unwrap();
        assert!(SymplecticSpace::standard(2).is_symplectic(&g, &pol()));
    }

    #[test]
    fn factor_recovers_both_parts() {
        let t = OrbitType::new(1, 1, 1);
        let h = HeisenbergElement::new(t, qm(&[&[2]]), qm(&[&[-1]]), qm(&[&[1]]), qm(&[&[3]]), Mat::from_rows(vec![vec![q(1, 2)]]), &pol()).unwrap();
        let shear = qm(&[&[1, 1], &[0, 1]]);
        let l = LeviElement::new(qm(&[&[3]]), shear.clone(), shear.transpose(), &pol()).unwrap();
        let g = levi_embed(&l, &pol()).unwrap().mul(&h.to_matrix(HeisenbergForm::Darboux));
        let space = SymplecticSpace::standard(3);
        let w = Subspace::coordinate(&space, &[0, 1, 4]);
        let b = darboux_extend(&w, None, &pol()).unwrap();
        assert_eq!(b.vectors(), &Mat::identity(6));
        let (l2, h2) = factor_stabilizer(&g, &w, &b, &pol()).unwrap();
        assert_eq!(l2, l);
        assert_eq!(h2, h);
    }
}
