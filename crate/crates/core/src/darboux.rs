//! Adapted Darboux bases, `J`-unitary Darboux bases, `J`-invariant
//! complements, and symplectomorphisms between subspaces of equal type.

use crate::error::{Error, Result};
use crate::numeric::{extend_basis, inverse, nullspace, rank, span_contains, Mat, RealBackend, RealField, TolerancePolicy};
use serde_json::{json, Value};
use crate::space::{standard_omega, symplectic_gram_schmidt, unitary_gram_schmidt, CompatibleJ, OrbitType, Subspace, SymplecticSpace};

/// Columns ordered `e⁰ e⁺ e⁻ f⁰ f⁺ f⁻` with block sizes `(n₀, n₊, n₋)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DarbouxBasis<R: RealField> {
    vectors: Mat<R>,
    labels: OrbitType,
}

impl<R: RealField> DarbouxBasis<R> {
    pub fn from_blocks(e0: &Mat<R>, ep: &Mat<R>, em: &Mat<R>, f0: &Mat<R>, fp: &Mat<R>, fm: &Mat<R>) -> Self {
        let labels = OrbitType::new(e0.cols(), ep.cols(), em.cols());
        let rows = e0.rows();
        let vectors = Mat::hstack_all(&[e0, ep, em, f0, fp, fm], rows);
        DarbouxBasis { vectors, labels }
    }

    pub fn vectors(&self) -> &Mat<R> {
        &self.vectors
    }

    pub fn labels(&self) -> OrbitType {
        self.labels
    }

    fn n(&self) -> usize {
        self.labels.n()
    }

    pub fn to_json(&self) -> Value
    where
        R: RealBackend,
    {
        json!({ "type": self.labels, "vectors": R::wrap(self.vectors.clone()).to_json() })
    }

    fn cols(&self, start: usize, len: usize) -> Mat<R> {
        self.vectors.block(0, start, self.vectors.rows(), len)
    }

    pub fn e0(&self) -> Mat<R> {
        self.cols(0, self.labels.n0)
    }
    pub fn eplus(&self) -> Mat<R> {
        self.cols(self.labels.n0, self.labels.nplus)
    }
    pub fn eminus(&self) -> Mat<R> {
        self.cols(self.labels.n0 + self.labels.nplus, self.labels.nminus)
    }
    pub fn f0(&self) -> Mat<R> {
        self.cols(self.n(), self.labels.n0)
    }
    pub fn fplus(&self) -> Mat<R> {
        self.cols(self.n() + self.labels.n0, self.labels.nplus)
    }
    pub fn fminus(&self) -> Mat<R> {
        self.cols(self.n() + self.labels.n0 + self.labels.nplus, self.labels.nminus)
    }

    /// `Bᵗ Ω B = Ω` (exact on ℚ).
    pub fn is_darboux(&self, space: &SymplecticSpace, pol: &TolerancePolicy) -> bool {
        let g = self.vectors.transpose().mul(&space.omega::<R>()).mul(&self.vectors);
        g.approx_eq(&standard_omega(self.n()), pol.residual_threshold(&self.vectors) * self.vectors.max_abs().max(1.0))
    }

    /// The subspaces `(W₊, W₋, W⁰)` read off the basis.
    pub fn splitting(&self, space: &SymplecticSpace) -> AssociatedSplitting<R> {
        let sp = |m: Mat<R>| Subspace::span(space, &m, &TolerancePolicy::default()).expect("same dimension");
        AssociatedSplitting {
            wplus: sp(self.eplus().hstack(&self.fplus())),
            wminus: sp(self.eminus().hstack(&self.fminus())),
            w0comp: sp(self.f0()),
        }
    }

    pub fn to_f64(&self) -> DarbouxBasis<f64> {
        DarbouxBasis { vectors: self.vectors.to_f64(), labels: self.labels }
    }
}

/// `(W₊, W₋, W⁰)`: complements of `W₀` in `W` and in `W^ω`, and an isotropic
/// complement of `W₀` in `(W₊ ⊕ W₋)^ω`.
#[derive(Clone, Debug, PartialEq)]
pub struct AssociatedSplitting<R: RealField> {
    pub wplus: Subspace<R>,
    pub wminus: Subspace<R>,
    pub w0comp: Subspace<R>,
}

fn complementary<R: RealField>(a: &Subspace<R>, b: &Subspace<R>, whole: &Subspace<R>, pol: &TolerancePolicy) -> bool {
    whole.contains_subspace(a, pol)
        && whole.contains_subspace(b, pol)
        && a.dim() + b.dim() == whole.dim()
        && rank(&a.basis().hstack(b.basis()), pol) == whole.dim()
}

impl<R: RealField> AssociatedSplitting<R> {
    /// Checks the three defining conditions relative to `W`.
    pub fn validate(&self, w: &Subspace<R>, pol: &TolerancePolicy) -> Result<()> {
        let w0 = w.radical(pol);
        let wom = w.symplectic_complement(pol);
        if !complementary(&self.wplus, &w0, w, pol) {
            return Err(Error::Precondition("W₊ is not a complement of W₀ in W".into()));
        }
        if !complementary(&self.wminus, &w0, &wom, pol) {
            return Err(Error::Precondition("W₋ is not a complement of W₀ in W^ω".into()));
        }
        let s = self.wplus.sum(&self.wminus, pol).symplectic_complement(pol);
        if !self.w0comp.is_isotropic(pol) || !complementary(&self.w0comp, &w0, &s, pol) {
            return Err(Error::Precondition("W⁰ is not an isotropic complement of W₀ in (W₊ ⊕ W₋)^ω".into()));
        }
        Ok(())
    }

    pub fn same_as(&self, o: &Self, pol: &TolerancePolicy) -> bool {
        self.wplus.same_span(&o.wplus, pol) && self.wminus.same_span(&o.wminus, pol) && self.w0comp.same_span(&o.w0comp, pol)
    }

    pub fn transform(&self, g: &Mat<R>) -> Self {
        AssociatedSplitting { wplus: self.wplus.transform(g), wminus: self.wminus.transform(g), w0comp: self.w0comp.transform(g) }
    }
}

/// Dual isotropic partner of `e0` inside the span of `pool`:
/// returns `f` with `ω(e_i, f_j) = δ_ij` and `ω(f_i, f_j) = 0`.
pub(crate) fn lagrangian_partner<R: RealField>(space: &SymplecticSpace, e0: &Mat<R>, pool: &Mat<R>, pol: &TolerancePolicy) -> Result<Mat<R>> {
    let m = space.pairing(e0, pool);
    let minv = inverse(&m, pol).map_err(|_| Error::Invariant("W₀ pairs degenerately with its complement".into()))?;
    let f = pool.mul(&minv);
    // f_i ← f_i − ½ Σ_k ω(f_i, f_k) e_k
    let a = space.pairing(&f, &f).scale(&R::from_ratio(-1, 2));
    Ok(f.add(&e0.mul(&a.transpose())))
}

/// Splitting built by coordinate-ordered elimination (deterministic).
pub fn default_splitting<R: RealField>(w: &Subspace<R>, pol: &TolerancePolicy) -> Result<AssociatedSplitting<R>> {
    let space = w.space();
    let w0 = w.radical(pol);
    let wom = w.symplectic_complement(pol);
    let wplus = Subspace::span(space, &extend_basis(w0.basis(), w.basis(), pol), pol)?;
    let wminus = Subspace::span(space, &extend_basis(w0.basis(), wom.basis(), pol), pol)?;
    let s = wplus.sum(&wminus, pol).symplectic_complement(pol);
    let pool = extend_basis(w0.basis(), s.basis(), pol);
    let f0 = lagrangian_partner(space, w0.basis(), &pool, pol)?;
    Ok(AssociatedSplitting { wplus, wminus, w0comp: Subspace::span(space, &f0, pol)? })
}

/// Darboux basis adapted to `W` and to an associated splitting:
/// `W₀ = span e⁰`, `W⁰ = span f⁰`, `W₊ = span{e⁺, f⁺}`, `W₋ = span{e⁻, f⁻}`.
pub fn darboux_extend<R: RealField>(
    w: &Subspace<R>,
    split: Option<&AssociatedSplitting<R>>,
    pol: &TolerancePolicy,
) -> Result<DarbouxBasis<R>> {
    let space = w.space();
    let owned;
    let split = match split {
        Some(s) => {
            s.validate(w, pol)?;
            s
        }
        None => {
            owned = default_splitting(w, pol)?;
            &owned
        }
    };
    let e0 = w.radical(pol).basis().clone();
    let (ep, fp) = symplectic_gram_schmidt(space, split.wplus.basis(), pol)?;
    let (em, fm) = symplectic_gram_schmidt(space, split.wminus.basis(), pol)?;
    let f0 = lagrangian_partner(space, &e0, split.w0comp.basis(), pol)?;
    let b = DarbouxBasis::from_blocks(&e0, &ep, &em, &f0, &fp, &fm);
    if !b.is_darboux(space, pol) {
        return Err(Error::Invariant("constructed basis is not Darboux".into()));
    }
    Ok(b)
}

/// Every condition that `darboux_extend` promises, as one predicate.
pub fn verify_adapted<R: RealField>(w: &Subspace<R>, b: &DarbouxBasis<R>, split: Option<&AssociatedSplitting<R>>, pol: &TolerancePolicy) -> bool {
    let space = w.space();
    let sp = |m: Mat<R>| Subspace::span(space, &m, pol).expect("dimension");
    let w0 = w.radical(pol);
    let wom = w.symplectic_complement(pol);
    let ok = b.is_darboux(space, pol)
        && b.labels() == w.subspace_type(pol)
        && sp(b.e0()).same_span(&w0, pol)
        && sp(b.e0().hstack(&b.eplus()).hstack(&b.fplus())).same_span(w, pol)
        && sp(b.e0().hstack(&b.eminus()).hstack(&b.fminus())).same_span(&wom, pol);
    match split {
        None => ok,
        Some(s) => ok && b.splitting(space).same_as(s, pol),
    }
}

/// `J`-metric orthonormal basis of a span (needs square roots).
fn metric_orthonormal<R: RealField>(cols: &Mat<R>, g: &Mat<R>, pol: &TolerancePolicy) -> Result<Mat<R>> {
    let ip = |a: &Mat<R>, b: &Mat<R>| a.transpose().mul(g).mul(b)[(0, 0)].clone();
    let thr = pol.pivot_threshold(cols);
    let mut out: Vec<Mat<R>> = Vec::new();
    for k in 0..cols.cols() {
        let mut v = cols.col(k);
        for _ in 0..2 {
            for u in &out {
                v = v.sub(&u.scale(&ip(u, &v)));
            }
        }
        let nn = ip(&v, &v);
        if nn.magnitude() <= thr * thr {
            continue;
        }
        let s = nn.sqrt_opt().ok_or_else(|| Error::Precondition("normalization needs the float backend".into()))?;
        out.push(v.scale(&R::one().div(&s)));
    }
    Ok(out.iter().fold(Mat::zeros(cols.rows(), 0), |acc, v| acc.hstack(v)))
}

/// `W ∈ Gr_J`: `W ⊕ JW₀` is `J`-invariant.
pub fn is_gr_j_member<R: RealField>(w: &Subspace<R>, j: &CompatibleJ<R>, pol: &TolerancePolicy) -> bool {
    let w0 = w.radical(pol);
    let s = w.basis().hstack(&j.matrix().mul(w0.basis()));
    span_contains(&s, &j.matrix().mul(&s), pol)
}

/// The `ω(·, J·)`-orthogonal complement of `W₀` in `W`, which is the unique
/// `J`-invariant complement of `W₀` in `W` when `W ∈ Gr_J`.
pub fn j_invariant_complement<R: RealField>(w: &Subspace<R>, j: &CompatibleJ<R>, pol: &TolerancePolicy) -> Result<Subspace<R>> {
    if !is_gr_j_member(w, j, pol) {
        return Err(Error::Precondition("W ⊕ JW₀ is not J-invariant".into()));
    }
    let space = w.space();
    let w0 = w.radical(pol);
    let g = j.metric(space);
    let coeff = nullspace(&w0.basis().transpose().mul(&g).mul(w.basis()), pol);
    let c = Subspace::span(space, &w.basis().mul(&coeff), pol)?;
    if !c.contains(&j.matrix().mul(c.basis()), pol) {
        return Err(Error::Invariant("complement is not J-invariant".into()));
    }
    if c.dim() + w0.dim() != w.dim() {
        return Err(Error::Invariant("complement has the wrong dimension".into()));
    }
    Ok(c)
}

/// `V = (W₀ ⊕ JW₀) ⊕ W₊^J ⊕ W₋^J` with the adapted unitary Darboux basis
/// `{e⁰, e⁺, e⁻, Je⁰, Je⁺, Je⁻}`.
#[derive(Clone, Debug)]
pub struct JSplitting<R: RealField> {
    pub w0_jw0: Subspace<R>,
    pub wplus_j: Subspace<R>,
    pub wminus_j: Subspace<R>,
    pub basis: DarbouxBasis<R>,
}

fn unitary_block<R: RealField>(space: &SymplecticSpace, j: &CompatibleJ<R>, s: &Subspace<R>, pol: &TolerancePolicy) -> Result<(Mat<R>, Mat<R>)> {
    let (e, f, cs) = unitary_gram_schmidt(space, j, s.basis(), pol)?;
    if cs.iter().any(|c| *c != R::one()) {
        return Err(Error::Precondition("normalization needs the float backend".into()));
    }
    Ok((e, f))
}

pub fn j_splitting<R: RealField>(w: &Subspace<R>, j: &CompatibleJ<R>, pol: &TolerancePolicy) -> Result<JSplitting<R>> {
    let space = w.space();
    let wplus_j = j_invariant_complement(w, j, pol)?;
    let wminus_j = j_invariant_complement(&w.symplectic_complement(pol), j, pol)?;
    let w0 = w.radical(pol);
    let e0 = metric_orthonormal(w0.basis(), &j.metric(space), pol)?;
    let je0 = j.matrix().mul(&e0);
    let w0_jw0 = Subspace::span(space, &e0.hstack(&je0), pol)?;
    let (ep, fp) = unitary_block(space, j, &wplus_j, pol)?;
    let (em, fm) = unitary_block(space, j, &wminus_j, pol)?;
    let basis = DarbouxBasis::from_blocks(&e0, &ep, &em, &je0, &fp, &fm);
    if !basis.is_darboux(space, pol) {
        return Err(Error::Invariant("J-adapted basis is not Darboux".into()));
    }
    Ok(JSplitting { w0_jw0, wplus_j, wminus_j, basis })
}

/// Unitary Darboux basis `{e, Je}` for coisotropic `W` with
/// `W^ω = span{e_j}_{j≤n₀}` and `W = span{e_j, Je_ℓ}_{ℓ>n₀}`.
pub fn coisotropic_unitary_darboux<R: RealField>(w: &Subspace<R>, j: &CompatibleJ<R>, pol: &TolerancePolicy) -> Result<DarbouxBasis<R>> {
    let t = w.subspace_type(pol);
    if t.nminus != 0 {
        return Err(Error::Precondition(format!("W is not coisotropic (type {t})")));
    }
    let s = j_splitting(w, j, pol)?;
    Ok(s.basis)
}

/// Symplectic `g` with `g·W = W₂`, mapping adapted basis to adapted basis.
pub fn transporter<R: RealField>(w: &Subspace<R>, w2: &Subspace<R>, pol: &TolerancePolicy) -> Result<Mat<R>> {
    let (t1, t2) = (w.subspace_type(pol), w2.subspace_type(pol));
    if t1 != t2 {
        return Err(Error::Precondition(format!("types differ: {t1} vs {t2}")));
    }
    let b1 = darboux_extend(w, None, pol)?;
    let b2 = darboux_extend(w2, None, pol)?;
    let g = b2.vectors().mul(&inverse(b1.vectors(), pol)?);
    if !w.space().is_symplectic(&g, pol) || !w.transform(&g).same_span(w2, pol) {
        return Err(Error::Invariant("transporter postcondition failed".into()));
    }
    Ok(g)
}
