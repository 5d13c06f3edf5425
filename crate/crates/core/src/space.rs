//! The ambient space `(V, ω)`, subspaces, symplectic complements, orbit
//! types, compatible complex structures and reduction at an isotropic
//! subspace.
//!
//! Convention: `ω(v, w) = wᵗ Ω v` with `Ω = [[0, −1ₙ], [1ₙ, 0]]`, so that
//! `ω(e_j, f_j) = 1` in the basis ordering `{e₁..eₙ, f₁..fₙ}`.

use crate::error::{Error, Result};
use crate::numeric::{
    column_basis, intersect_columns, nullspace, rank, signature_by_congruence, solve, span_eq, Field, Mat, Matrix,
    RealBackend, RealField, TolerancePolicy, Q,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::fmt;

/// `(V, ω)` with `V = ℝ^{2n}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticSpace {
    n: usize,
    omega: Mat<Q>,
}

impl SymplecticSpace {
    pub fn standard(n: usize) -> Self {
        SymplecticSpace { n, omega: standard_omega(n) }
    }

    /// A space with a custom form; checked antisymmetric and invertible.
    pub fn with_form(omega: Mat<Q>) -> Result<Self> {
        let pol = TolerancePolicy::default();
        if !omega.is_square() || !omega.rows().is_multiple_of(2) {
            return Err(Error::Shape("symplectic form must be 2n×2n".into()));
        }
        if omega.transpose() != omega.neg() {
            return Err(Error::Invariant("form is not antisymmetric".into()));
        }
        if rank(&omega, &pol) != omega.rows() {
            return Err(Error::Invariant("form is degenerate".into()));
        }
        Ok(SymplecticSpace { n: omega.rows() / 2, omega })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn omega_q(&self) -> &Mat<Q> {
        &self.omega
    }

    pub fn omega<T: Field>(&self) -> Mat<T> {
        self.omega.map(T::from_q)
    }

    pub fn is_standard(&self) -> bool {
        self.omega == standard_omega(self.n)
    }

    /// `ω(v, w)` for column vectors.
    pub fn form<T: Field>(&self, v: &Mat<T>, w: &Mat<T>) -> T {
        w.transpose().mul(&self.omega::<T>()).mul(v)[(0, 0)].clone()
    }

    /// Matrix of pairings `(i, j) ↦ ω(a_i, b_j)`.
    pub fn pairing<T: Field>(&self, a: &Mat<T>, b: &Mat<T>) -> Mat<T> {
        a.transpose().mul(&self.omega::<T>().transpose()).mul(b)
    }

    /// `gᵗ Ω g = Ω`
    pub fn is_symplectic<T: Field>(&self, g: &Mat<T>, pol: &TolerancePolicy) -> bool {
        let om = self.omega::<T>();
        g.shape() == om.shape() && g.transpose().mul(&om).mul(g).approx_eq(&om, pol.residual_threshold(g).max(pol.residual_tol * g.max_abs().powi(2)))
    }

    /// Whether `X ∈ sp(V)`: `Ω X + Xᵗ Ω = 0`.
    pub fn in_algebra<T: Field>(&self, x: &Mat<T>, pol: &TolerancePolicy) -> bool {
        let om = self.omega::<T>();
        om.mul(x).add(&x.transpose().mul(&om)).is_zero(pol.residual_threshold(x))
    }
}

pub fn standard_omega<T: Field>(n: usize) -> Mat<T> {
    let mut m = Mat::zeros(2 * n, 2 * n);
    for j in 0..n {
        m[(j, n + j)] = T::one().neg();
        m[(n + j, j)] = T::one();
    }
    m
}

/// The standard compatible complex structure `e_j ↦ f_j, f_j ↦ −e_j`.
pub fn standard_j<T: Field>(n: usize) -> Mat<T> {
    standard_omega(n)
}

/// Orbit type `(n₀, n₊, n₋)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrbitType {
    pub n0: usize,
    pub nplus: usize,
    pub nminus: usize,
}

impl OrbitType {
    pub const fn new(n0: usize, nplus: usize, nminus: usize) -> Self {
        OrbitType { n0, nplus, nminus }
    }

    pub fn n(&self) -> usize {
        self.n0 + self.nplus + self.nminus
    }

    /// Dimension of a real subspace of this type: `n₀ + 2n₊`.
    pub fn subspace_dim(&self) -> usize {
        self.n0 + 2 * self.nplus
    }

    pub fn is_isotropic(&self) -> bool {
        self.nplus == 0
    }

    pub fn is_coisotropic(&self) -> bool {
        self.nminus == 0
    }

    pub fn is_lagrangian(&self) -> bool {
        self.n0 == self.n()
    }

    pub fn is_symplectic(&self) -> bool {
        self.n0 == 0
    }

    /// Type of the symplectic complement (swaps `n₊ ↔ n₋`).
    pub fn complement(&self) -> Self {
        OrbitType::new(self.n0, self.nminus, self.nplus)
    }

    /// Every type with `n₀ + n₊ + n₋ = n`, lexicographic.
    pub fn all(n: usize) -> Vec<OrbitType> {
        let mut out = Vec::new();
        for n0 in 0..=n {
            for nplus in 0..=n - n0 {
                out.push(OrbitType::new(n0, nplus, n - n0 - nplus));
            }
        }
        out
    }
}

impl fmt::Display for OrbitType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.n0, self.nplus, self.nminus)
    }
}

impl Serialize for OrbitType {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.n0, self.nplus, self.nminus].serialize(s)
    }
}

impl<'de> Deserialize<'de> for OrbitType {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [a, b, c] = <[usize; 3]>::deserialize(d)?;
        Ok(OrbitType::new(a, b, c))
    }
}

/// Type with the derived flags and the radical dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TypeReport {
    pub orbit_type: OrbitType,
    pub dim: usize,
    pub dim_radical: usize,
    pub isotropic: bool,
    pub coisotropic: bool,
    pub lagrangian: bool,
    pub symplectic: bool,
}

/// A column span in `V`.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace<R: RealField> {
    space: SymplecticSpace,
    basis: Mat<R>,
}

impl<R: RealField> Subspace<R> {
    /// `basis` must have independent columns.
    pub fn new(space: &SymplecticSpace, basis: Mat<R>, pol: &TolerancePolicy) -> Result<Self> {
        if basis.rows() != space.dim() {
            return Err(Error::Shape(format!("basis has {} rows, space has dimension {}", basis.rows(), space.dim())));
        }
        if rank(&basis, pol) != basis.cols() {
            return Err(Error::Invariant("basis columns are dependent".into()));
        }
        Ok(Subspace { space: space.clone(), basis })
    }

    /// Span of arbitrary columns; dependent columns are dropped.
    pub fn span(space: &SymplecticSpace, cols: &Mat<R>, pol: &TolerancePolicy) -> Result<Self> {
        if cols.rows() != space.dim() {
            return Err(Error::Shape(format!("columns have {} rows, space has dimension {}", cols.rows(), space.dim())));
        }
        Ok(Subspace { space: space.clone(), basis: column_basis(cols, pol) })
    }

    pub fn zero(space: &SymplecticSpace) -> Self {
        Subspace { space: space.clone(), basis: Mat::zeros(space.dim(), 0) }
    }

    pub fn whole(space: &SymplecticSpace) -> Self {
        Subspace { space: space.clone(), basis: Mat::identity(space.dim()) }
    }

    /// Span of the standard basis vectors with the given indices
    /// (`0..n` are `e`, `n..2n` are `f`).
    pub fn coordinate(space: &SymplecticSpace, idx: &[usize]) -> Self {
        Subspace { space: space.clone(), basis: Mat::<R>::identity(space.dim()).select_cols(idx) }
    }

    pub fn space(&self) -> &SymplecticSpace {
        &self.space
    }

    pub fn basis(&self) -> &Mat<R> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    /// Span equality (exact on ℚ, pivot-threshold rank on f64).
    pub fn same_span(&self, o: &Self, pol: &TolerancePolicy) -> bool {
        self.space == o.space && span_eq(&self.basis, &o.basis, pol)
    }

    pub fn contains(&self, v: &Mat<R>, pol: &TolerancePolicy) -> bool {
        crate::numeric::span_contains(&self.basis, v, pol)
    }

    pub fn contains_subspace(&self, o: &Self, pol: &TolerancePolicy) -> bool {
        self.contains(&o.basis, pol)
    }

    /// Reduced column echelon basis (canonical on exact backends).
    pub fn canonical(&self, pol: &TolerancePolicy) -> Self {
        Subspace { space: self.space.clone(), basis: crate::numeric::column_echelon(&self.basis, pol) }
    }

    /// `g · W`
    pub fn transform(&self, g: &Mat<R>) -> Self {
        Subspace { space: self.space.clone(), basis: g.mul(&self.basis) }
    }

    pub fn intersect(&self, o: &Self, pol: &TolerancePolicy) -> Self {
        let b = intersect_columns(&self.basis, &o.basis, pol).expect("same ambient space");
        Subspace { space: self.space.clone(), basis: b }
    }

    pub fn sum(&self, o: &Self, pol: &TolerancePolicy) -> Self {
        Subspace { space: self.space.clone(), basis: column_basis(&self.basis.hstack(&o.basis), pol) }
    }

    /// Matrix of `ω|_W` in the basis: `Bᵗ Ω B`.
    pub fn gram(&self) -> Mat<R> {
        self.basis.transpose().mul(&self.space.omega::<R>()).mul(&self.basis)
    }

    /// `W^ω`: the nullspace of `(Ω W)ᵗ`.
    pub fn symplectic_complement(&self, pol: &TolerancePolicy) -> Self {
        let om = self.space.omega::<R>();
        let ns = nullspace(&om.mul(&self.basis).transpose(), pol);
        Subspace { space: self.space.clone(), basis: ns }
    }

    /// `W ∩ W^ω`
    pub fn radical(&self, pol: &TolerancePolicy) -> Self {
        self.intersect(&self.symplectic_complement(pol), pol)
    }

    pub fn subspace_type(&self, pol: &TolerancePolicy) -> OrbitType {
        self.type_report(pol).orbit_type
    }

    pub fn type_report(&self, pol: &TolerancePolicy) -> TypeReport {
        let n = self.space.n();
        let n0 = self.radical(pol).dim();
        let nplus = (self.dim() - n0) / 2;
        let t = OrbitType::new(n0, nplus, n - n0 - nplus);
        TypeReport {
            orbit_type: t,
            dim: self.dim(),
            dim_radical: n0,
            isotropic: t.is_isotropic(),
            coisotropic: t.is_coisotropic(),
            lagrangian: t.is_lagrangian(),
            symplectic: t.is_symplectic(),
        }
    }

    pub fn is_isotropic(&self, pol: &TolerancePolicy) -> bool {
        self.gram().is_zero(pol.residual_threshold(&self.basis))
    }

    pub fn to_f64(&self) -> Subspace<f64> {
        Subspace { space: self.space.clone(), basis: self.basis.to_f64() }
    }
}

impl<R: RealBackend> Subspace<R> {
    /// `{"space": {"n": n}, "basis": <matrix>}`; only the standard form is
    /// representable.
    pub fn to_json(&self) -> Value {
        json!({ "space": { "n": self.space.n() }, "basis": R::wrap(self.basis.clone()).to_json() })
    }

    /// Dependent basis columns are dropped. `space` may be omitted, in which
    /// case `n` is read off the row count.
    pub fn from_json(v: &Value, pol: &TolerancePolicy) -> Result<Self> {
        let m = v.get("basis").ok_or_else(|| Error::Parse("missing field 'basis'".into()))?;
        let m = Matrix::from_json(m)?;
        let basis = R::unwrap(&m).ok_or_else(|| Error::Parse(format!("basis backend {:?} not accepted here", m.backend())))?;
        let n = match v.get("space") {
            Some(sp) => sp
                .get("n")
                .and_then(Value::as_u64)
                .ok_or_else(|| Error::Parse("space.n must be a non-negative integer".into()))? as usize,
            None => {
                if basis.rows() % 2 != 0 {
                    return Err(Error::Shape(format!("basis has {} rows, expected an even number", basis.rows())));
                }
                basis.rows() / 2
            }
        };
        Subspace::span(&SymplecticSpace::standard(n), &basis, pol)
    }
}

/// An `ω`-compatible complex structure.
#[derive(Clone, Debug, PartialEq)]
pub struct CompatibleJ<R: RealField> {
    j: Mat<R>,
}

impl<R: RealField> CompatibleJ<R> {
    /// Validates `J² = −1`, `Jᵗ Ω J = Ω`, and positivity of `ω(·, J·)`.
    pub fn check(j: Mat<R>, space: &SymplecticSpace, pol: &TolerancePolicy) -> Result<Self> {
        let d = space.dim();
        if j.shape() != (d, d) {
            return Err(Error::Shape(format!("J must be {d}×{d}")));
        }
        let tol = pol.residual_threshold(&j).max(pol.residual_tol * j.max_abs().powi(2));
        if !j.mul(&j).approx_eq(&Mat::<R>::identity(d).neg(), tol) {
            return Err(Error::Invariant("J² ≠ −1".into()));
        }
        if !space.is_symplectic(&j, pol) {
            return Err(Error::Invariant("J is not symplectic (JᵗΩJ ≠ Ω)".into()));
        }
        let g = metric_of(&j, space);
        let sym = g.add(&g.transpose()).scale(&R::from_ratio(1, 2));
        let sig = signature_by_congruence(&sym, pol)?;
        if sig != (0, d, 0) {
            return Err(Error::Invariant("ω(v, Jv) is not positive definite".into()));
        }
        Ok(CompatibleJ { j })
    }

    pub fn standard(n: usize) -> Self {
        CompatibleJ { j: standard_j(n) }
    }

    pub fn matrix(&self) -> &Mat<R> {
        &self.j
    }

    /// Gram matrix `G = JᵗΩ` of the inner product `g(u, v) = ω(u, Jv) = uᵗ G v`.
    pub fn metric(&self, space: &SymplecticSpace) -> Mat<R> {
        metric_of(&self.j, space)
    }

    /// `g J g⁻¹`
    pub fn conjugate(&self, g: &Mat<R>, pol: &TolerancePolicy) -> Result<Self> {
        let gi = crate::numeric::inverse(g, pol)?;
        Ok(CompatibleJ { j: g.mul(&self.j).mul(&gi) })
    }

    pub fn to_f64(&self) -> CompatibleJ<f64> {
        CompatibleJ { j: self.j.to_f64() }
    }
}

fn metric_of<R: Field>(j: &Mat<R>, space: &SymplecticSpace) -> Mat<R> {
    j.transpose().mul(&space.omega::<R>())
}

/// `Jᵗ Ω`-orthogonal complement of `cols` inside `V`.
pub fn metric_complement<R: RealField>(cols: &Mat<R>, j: &CompatibleJ<R>, space: &SymplecticSpace, pol: &TolerancePolicy) -> Mat<R> {
    let g = j.metric(space);
    nullspace(&cols.transpose().mul(&g), pol)
}

/// Symplectic Gram–Schmidt on a spanning set of a symplectic subspace.
/// Returns `(e, f)` with `ω(e_i, f_j) = δ_ij` and all other pairings zero.
/// No square roots are taken, so this is exact on ℚ.
pub fn symplectic_gram_schmidt<R: RealField>(space: &SymplecticSpace, cols: &Mat<R>, pol: &TolerancePolicy) -> Result<(Mat<R>, Mat<R>)> {
    let d = space.dim();
    let mut pool: Vec<Mat<R>> = (0..cols.cols()).map(|j| cols.col(j)).collect();
    let (mut es, mut fs) = (Mat::zeros(d, 0), Mat::zeros(d, 0));
    let thr = pol.pivot_threshold(cols);
    loop {
        pool.retain(|v| !v.is_zero(thr));
        let Some(u) = pool.first().cloned() else { break };
        let partner = pool.iter().skip(1).map(|v| (space.form(&u, v), v)).max_by(|a, b| a.0.magnitude().total_cmp(&b.0.magnitude()));
        let Some((c, v)) = partner.filter(|(c, _)| !c.is_zero_tol(thr)) else {
            return Err(Error::Invariant("span is not symplectic".into()));
        };
        let e = u.clone();
        let f = v.scale(&R::one().div(&c));
        pool = pool
            .iter()
            .skip(1)
            .map(|x| {
                // x ← x − ω(x, f)e + ω(x, e)f
                x.sub(&e.scale(&space.form(x, &f))).add(&f.scale(&space.form(x, &e)))
            })
            .collect();
        es = es.hstack(&e);
        fs = fs.hstack(&f);
    }
    Ok((es, fs))
}

/// Gram–Schmidt adapted to `J` on a spanning set of a `J`-invariant
/// symplectic subspace. Returns `(e, f)` with `f_i = J e_i / c_i`,
/// `c_i = ω(e_i, J e_i)`, and the scales `c`. Each `e_i` is normalized to
/// `c_i = 1` when the field has the square root.
pub fn unitary_gram_schmidt<R: RealField>(
    space: &SymplecticSpace,
    j: &CompatibleJ<R>,
    cols: &Mat<R>,
    pol: &TolerancePolicy,
) -> Result<(Mat<R>, Mat<R>, Vec<R>)> {
    let d = space.dim();
    let g = j.metric(space);
    let jm = j.matrix();
    let ip = |a: &Mat<R>, b: &Mat<R>| a.transpose().mul(&g).mul(b)[(0, 0)].clone();
    let thr = pol.pivot_threshold(cols);
    let mut pool: Vec<Mat<R>> = (0..cols.cols()).map(|k| cols.col(k)).collect();
    let (mut es, mut fs, mut cs) = (Mat::zeros(d, 0), Mat::zeros(d, 0), Vec::new());
    loop {
        pool.retain(|v| ip(v, v).magnitude() > thr * thr);
        if pool.is_empty() {
            break;
        }
        let mut e = pool.remove(0);
        let mut c = ip(&e, &e);
        if let Some(s) = c.sqrt_opt() {
            e = e.scale(&R::one().div(&s));
            c = R::one();
        }
        let je = jm.mul(&e);
        pool = pool.iter().map(|x| x.sub(&e.scale(&ip(x, &e).div(&c))).sub(&je.scale(&ip(x, &je).div(&c)))).collect();
        es = es.hstack(&e);
        fs = fs.hstack(&je.scale(&R::one().div(&c)));
        cs.push(c);
    }
    Ok((es, fs, cs))
}

/// `W₀^ω / W₀` realized by a concrete Darboux complement of `W₀` in `W₀^ω`.
#[derive(Clone, Debug)]
pub struct ReducedSpace<R: RealField> {
    parent: SymplecticSpace,
    w0: Subspace<R>,
    complement: Mat<R>,
    j_tilde: Option<Mat<R>>,
}

impl<R: RealField> ReducedSpace<R> {
    pub fn parent(&self) -> &SymplecticSpace {
        &self.parent
    }

    pub fn w0(&self) -> &Subspace<R> {
        &self.w0
    }

    /// Columns `{ẽ, f̃}` in `V`; `Cᵗ Ω C` is the standard `Ω`.
    pub fn complement_basis(&self) -> &Mat<R> {
        &self.complement
    }

    /// Half-dimension `n − n₀` of the reduced space.
    pub fn m(&self) -> usize {
        self.complement.cols() / 2
    }

    /// The reduced space in its Darboux coordinates.
    pub fn space(&self) -> SymplecticSpace {
        SymplecticSpace::standard(self.m())
    }

    /// Matrix of the induced form, `Cᵗ Ω C`.
    pub fn omega_tilde(&self) -> Mat<R> {
        self.complement.transpose().mul(&self.parent.omega::<R>()).mul(&self.complement)
    }

    /// Induced complex structure in reduced coordinates (when reduced with `J`).
    pub fn j_tilde(&self) -> Option<&Mat<R>> {
        self.j_tilde.as_ref()
    }

    /// Reduced coordinates of vectors in `W₀^ω`.
    pub fn project(&self, v: &Mat<R>, pol: &TolerancePolicy) -> Result<Mat<R>> {
        let a = self.complement.hstack(self.w0.basis());
        let x = solve(&a, v, pol).ok_or_else(|| Error::Precondition("vector does not lie in W₀^ω".into()))?;
        Ok(x.block(0, 0, self.complement.cols(), v.cols()))
    }

    pub fn lift(&self, u: &Mat<R>) -> Mat<R> {
        self.complement.mul(u)
    }

    /// Image of a subspace `W₀ ⊆ W ⊆ W₀^ω` in the reduced space.
    pub fn project_subspace(&self, w: &Subspace<R>, pol: &TolerancePolicy) -> Result<Subspace<R>> {
        let p = self.project(w.basis(), pol)?;
        Subspace::span(&self.space(), &p, pol)
    }

    /// `W₀ ⊕ lift(W̃)`
    pub fn lift_subspace(&self, w: &Subspace<R>, pol: &TolerancePolicy) -> Subspace<R> {
        Subspace::span(&self.parent, &self.w0.basis().hstack(&self.lift(w.basis())), pol).expect("same ambient dimension")
    }
}

/// Reduction at an isotropic `W₀`. With `J`, the complement is the
/// `ω(·, J·)`-orthogonal complement of `W₀ ⊕ JW₀`; otherwise the first
/// coordinate-ordered complement of `W₀` inside `W₀^ω`.
pub fn reduce_at<R: RealField>(w0: &Subspace<R>, j: Option<&CompatibleJ<R>>, pol: &TolerancePolicy) -> Result<ReducedSpace<R>> {
    let space = w0.space().clone();
    if !w0.is_isotropic(pol) {
        return Err(Error::Precondition("W₀ is not isotropic".into()));
    }
    let (complement, j_tilde) = match j {
        None => {
            let perp = w0.symplectic_complement(pol);
            let extra = crate::numeric::extend_basis(w0.basis(), perp.basis(), pol);
            let (e, f) = symplectic_gram_schmidt(&space, &extra, pol)?;
            (e.hstack(&f), None)
        }
        Some(j) => {
            let both = w0.basis().hstack(&j.matrix().mul(w0.basis()));
            let c = metric_complement(&both, j, &space, pol);
            let (e, f, cs) = unitary_gram_schmidt(&space, j, &c, pol)?;
            let m = e.cols();
            let mut jt = Mat::zeros(2 * m, 2 * m);
            for (i, c) in cs.iter().enumerate() {
                jt[(m + i, i)] = c.clone();
                jt[(i, m + i)] = R::one().div(c).neg();
            }
            (e.hstack(&f), Some(jt))
        }
    };
    if complement.cols() != 2 * (space.n() - w0.dim()) {
        return Err(Error::Invariant("reduced complement has the wrong dimension".into()));
    }
    Ok(ReducedSpace { parent: space, w0: w0.clone(), complement, j_tilde })
}
