//! Complex Lagrangian subspaces of `V^ℂ`: frames, the hermitian form
//! `κ(v, w) = −i ω(v, w̄)`, orbit types, splittings, real projections, the
//! `±i` eigenspaces of a compatible `J`, and the twistor correspondence.

use crate::darboux::{lagrangian_partner, DarbouxBasis};
use crate::error::{Error, Result};
use crate::numeric::float::hermitian_inv_sqrt;
use crate::numeric::{
    column_basis, column_echelon, extend_basis, hermitian_eigh, intersect_columns, inverse, nullspace, rank,
    signature_by_congruence, span_eq, ComplexField, Field, Mat, Matrix, RealField, TolerancePolicy, C64, QI,
};
use crate::space::{standard_omega, CompatibleJ, OrbitType, Subspace, SymplecticSpace};
use serde_json::{json, Value};

/// Backends that can carry a complex frame through JSON.
pub trait ComplexBackend: ComplexField {
    fn wrap(m: Mat<Self>) -> Matrix;
    fn unwrap(m: &Matrix) -> Option<Mat<Self>>;
}

impl ComplexBackend for QI {
    fn wrap(m: Mat<QI>) -> Matrix {
        Matrix::Gaussian(m)
    }
    fn unwrap(m: &Matrix) -> Option<Mat<QI>> {
        match m {
            Matrix::Gaussian(x) => Some(x.clone()),
            Matrix::Rational(x) => Some(x.complexify()),
            _ => None,
        }
    }
}

impl ComplexBackend for C64 {
    fn wrap(m: Mat<C64>) -> Matrix {
        Matrix::Complex(m)
    }
    fn unwrap(m: &Matrix) -> Option<Mat<C64>> {
        Some(m.to_c64())
    }
}

/// `−i F₁* Ω F₂`: entry `(a, b)` is `κ(F₂ᵇ, F₁ᵃ)`.
pub fn kappa_pairing<C: ComplexField>(f1: &Mat<C>, f2: &Mat<C>) -> Mat<C> {
    let om = standard_omega::<C>(f1.rows() / 2);
    f1.adjoint().mul(&om).mul(f2).scale(&C::i().neg())
}

fn omega_pairing<C: ComplexField>(f1: &Mat<C>, f2: &Mat<C>) -> Mat<C> {
    let om = standard_omega::<C>(f1.rows() / 2);
    f1.transpose().mul(&om).mul(f2)
}

fn gram_tol<C: Field>(pol: &TolerancePolicy, f: &Mat<C>) -> f64 {
    pol.residual_threshold(f) * f.max_abs().max(1.0)
}

/// A Lagrangian subspace of `ℂ^{2n}` held as a `2n×n` frame `[Q; P]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexLagrangian<C: ComplexField> {
    frame: Mat<C>,
}

impl<C: ComplexField> ComplexLagrangian<C> {
    /// Validates rank and `QᵗP = PᵗQ`, then canonicalizes by column reduction.
    pub fn new(frame: Mat<C>, pol: &TolerancePolicy) -> Result<Self> {
        let (r, c) = frame.shape();
        if r % 2 != 0 || r != 2 * c {
            return Err(Error::Shape(format!("a Lagrangian frame must be 2n×n, got {r}×{c}")));
        }
        let rk = rank(&frame, pol);
        if rk < c {
            return Err(Error::Invariant(format!("frame has rank {rk} < {c}")));
        }
        if !omega_pairing(&frame, &frame).is_zero(gram_tol(pol, &frame)) {
            return Err(Error::Invariant("frame is not Lagrangian: QᵗP ≠ PᵗQ".into()));
        }
        Ok(ComplexLagrangian { frame: column_echelon(&frame, pol) })
    }

    pub fn from_qp(q: &Mat<C>, p: &Mat<C>, pol: &TolerancePolicy) -> Result<Self> {
        if q.shape() != p.shape() {
            return Err(Error::Shape("Q and P differ in shape".into()));
        }
        Self::new(q.vstack(p), pol)
    }

    /// Siegel frame `[Z; 1]`; Lagrangian iff `Z` is symmetric.
    pub fn siegel(z: &Mat<C>, pol: &TolerancePolicy) -> Result<Self> {
        Self::from_qp(z, &Mat::identity(z.rows()), pol)
    }

    /// `L^ℂ` for a real Lagrangian `L`.
    pub fn complexify(l: &Subspace<C::Real>, pol: &TolerancePolicy) -> Result<Self> {
        Self::new(l.basis().complexify(), pol)
    }

    /// Basepoint of type `t`: `F₀ = ⟨e⁰⟩`, `F₊ = ⟨e⁺ − if⁺⟩`, `F₋ = ⟨e⁻ + if⁻⟩`.
    pub fn basepoint(t: OrbitType) -> Self {
        SplitLagrangian::<C>::basepoint(t).lagrangian()
    }

    pub fn n(&self) -> usize {
        self.frame.cols()
    }

    pub fn frame(&self) -> &Mat<C> {
        &self.frame
    }

    pub fn q(&self) -> Mat<C> {
        self.frame.block(0, 0, self.n(), self.n())
    }

    pub fn p(&self) -> Mat<C> {
        self.frame.block(self.n(), 0, self.n(), self.n())
    }

    /// Gram matrix of `κ` on the frame, `−i(P̄ᵗQ − Q̄ᵗP)`.
    pub fn kappa_gram(&self) -> Mat<C> {
        kappa_pairing(&self.frame, &self.frame)
    }

    pub fn lag_type(&self, pol: &TolerancePolicy) -> OrbitType {
        let (z, p, m) = signature_by_congruence(&self.kappa_gram(), pol).expect("κ Gram is hermitian");
        OrbitType::new(z, p, m)
    }

    /// `F₀ = ker κ|_F`.
    pub fn kernel(&self, pol: &TolerancePolicy) -> Mat<C> {
        self.frame.mul(&nullspace(&self.kappa_gram(), pol))
    }

    pub fn same_span(&self, o: &Self, pol: &TolerancePolicy) -> bool {
        span_eq(&self.frame, &o.frame, pol)
    }

    /// Generalized Möbius action `g.F = {gv : v ∈ F}` of a real symplectic `g`.
    pub fn act(&self, g: &Mat<C::Real>, pol: &TolerancePolicy) -> Self {
        ComplexLagrangian { frame: column_echelon(&g.complexify().mul(&self.frame), pol) }
    }

    pub fn conj(&self, pol: &TolerancePolicy) -> Self {
        ComplexLagrangian { frame: column_echelon(&self.frame.conj(), pol) }
    }

    /// `Z = QP⁻¹` when `P` is invertible.
    pub fn siegel_coordinate(&self, pol: &TolerancePolicy) -> Result<Mat<C>> {
        Ok(self.q().mul(&inverse(&self.p(), pol)?))
    }

    /// `(Re F, Re F₀)` as real subspaces of `V`.
    pub fn real_projection(&self, pol: &TolerancePolicy) -> (Subspace<C::Real>, Subspace<C::Real>) {
        let space = SymplecticSpace::standard(self.n());
        let re = Subspace::span(&space, &self.frame.re().hstack(&self.frame.im()), pol).expect("shape");
        let k = self.kernel(pol);
        let re0 = Subspace::span(&space, &k.re().hstack(&k.im()), pol).expect("shape");
        (re, re0)
    }
}

impl<C: ComplexBackend> ComplexLagrangian<C> {
    pub fn to_json(&self) -> Value {
        json!({ "frame": C::wrap(self.frame.clone()).to_json() })
    }

    pub fn from_json(v: &Value, pol: &TolerancePolicy) -> Result<Self> {
        let m = v.get("frame").ok_or_else(|| Error::Parse("missing field 'frame'".into()))?;
        let m = Matrix::from_json(m)?;
        let frame = C::unwrap(&m).ok_or_else(|| Error::Parse(format!("frame backend {:?} not accepted here", m.backend())))?;
        Self::new(frame, pol)
    }
}

impl<C: ComplexBackend> SplitLagrangian<C> {
    pub fn to_json(&self) -> Value {
        json!({
            "geq0": C::wrap(self.geq0.clone()).to_json(),
            "leq0": C::wrap(self.leq0.clone()).to_json(),
        })
    }

    pub fn from_json(v: &Value, pol: &TolerancePolicy) -> Result<Self> {
        let half = |k: &str| -> Result<Mat<C>> {
            let m = v.get(k).ok_or_else(|| Error::Parse(format!("missing field '{k}'")))?;
            let m = Matrix::from_json(m)?;
            C::unwrap(&m).ok_or_else(|| Error::Parse(format!("{k} backend {:?} not accepted here", m.backend())))
        };
        Self::new(half("geq0")?, half("leq0")?, pol)
    }
}

/// `F_{±J} = (1 ∓ iJ)V`, the `±i` eigenspaces of `J`.
pub fn f_pm_j<R: RealField>(j: &CompatibleJ<R>, pol: &TolerancePolicy) -> (ComplexLagrangian<R::Cx>, ComplexLagrangian<R::Cx>) {
    let jc = j.matrix().complexify().scale(&R::Cx::i());
    let id = Mat::<R::Cx>::identity(jc.rows());
    let plus = ComplexLagrangian::new(column_basis(&id.sub(&jc), pol), pol).expect("+i eigenspace of a compatible J");
    let minus = ComplexLagrangian::new(column_basis(&id.add(&jc), pol), pol).expect("−i eigenspace of a compatible J");
    (plus, minus)
}

/// `pr_{±J} = (1 ∓ iJ)/√2`.
pub fn pr_pm_j(j: &CompatibleJ<f64>) -> (Mat<C64>, Mat<C64>) {
    let jc = j.matrix().complexify().scale(&C64::new(0.0, 1.0));
    let id = Mat::<C64>::identity(jc.rows());
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    (id.sub(&jc).scale(&s), id.add(&jc).scale(&s))
}

/// A complex Lagrangian with a splitting, stored as the pair
/// `(F₀ ⊕ F₊, F₀ ⊕ F₋)`. The two halves are required to be `κ`-orthogonal.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitLagrangian<C: ComplexField> {
    geq0: Mat<C>,
    leq0: Mat<C>,
}

impl<C: ComplexField> SplitLagrangian<C> {
    pub fn new(geq0: Mat<C>, leq0: Mat<C>, pol: &TolerancePolicy) -> Result<Self> {
        if geq0.rows() != leq0.rows() || !geq0.rows().is_multiple_of(2) {
            return Err(Error::Shape("halves must live in the same ℂ^{2n}".into()));
        }
        let geq0 = column_basis(&geq0, pol);
        let leq0 = column_basis(&leq0, pol);
        let f = ComplexLagrangian::new(column_basis(&geq0.hstack(&leq0), pol), pol)?;
        let t = f.lag_type(pol);
        let (z, p, m) = signature_by_congruence(&kappa_pairing(&geq0, &geq0), pol)?;
        if (z, p, m) != (t.n0, t.nplus, 0) {
            return Err(Error::Invariant(format!("κ on F≥0 has inertia ({z},{p},{m}), expected ({},{},0)", t.n0, t.nplus)));
        }
        let (z, p, m) = signature_by_congruence(&kappa_pairing(&leq0, &leq0), pol)?;
        if (z, p, m) != (t.n0, 0, t.nminus) {
            return Err(Error::Invariant(format!("κ on F≤0 has inertia ({z},{p},{m}), expected ({},0,{})", t.n0, t.nminus)));
        }
        let cross = kappa_pairing(&geq0, &leq0);
        if !cross.is_zero(gram_tol(pol, &geq0.hstack(&leq0))) {
            return Err(Error::Invariant("F≥0 and F≤0 are not κ-orthogonal".into()));
        }
        Ok(SplitLagrangian { geq0, leq0 })
    }

    pub fn basepoint(t: OrbitType) -> Self {
        let n = t.n();
        let mut geq0 = Mat::<C>::zeros(2 * n, t.n0 + t.nplus);
        let mut leq0 = Mat::<C>::zeros(2 * n, t.n0 + t.nminus);
        for k in 0..t.n0 {
            geq0[(k, k)] = C::one();
            leq0[(k, k)] = C::one();
        }
        for k in 0..t.nplus {
            let i = t.n0 + k;
            geq0[(i, t.n0 + k)] = C::one();
            geq0[(n + i, t.n0 + k)] = C::i().neg();
        }
        for k in 0..t.nminus {
            let i = t.n0 + t.nplus + k;
            leq0[(i, t.n0 + k)] = C::one();
            leq0[(n + i, t.n0 + k)] = C::i();
        }
        SplitLagrangian { geq0, leq0 }
    }

    pub fn geq0(&self) -> &Mat<C> {
        &self.geq0
    }

    pub fn leq0(&self) -> &Mat<C> {
        &self.leq0
    }

    pub fn n(&self) -> usize {
        self.geq0.rows() / 2
    }

    pub fn lagrangian(&self) -> ComplexLagrangian<C> {
        let pol = TolerancePolicy::default();
        ComplexLagrangian { frame: column_echelon(&self.geq0.hstack(&self.leq0), &pol) }
    }

    pub fn lag_type(&self, pol: &TolerancePolicy) -> OrbitType {
        let k = self.kernel(pol).cols();
        OrbitType::new(k, rank(&self.geq0, pol) - k, rank(&self.leq0, pol) - k)
    }

    /// `F₀ = F≥0 ∩ F≤0`.
    pub fn kernel(&self, pol: &TolerancePolicy) -> Mat<C> {
        intersect_columns(&self.geq0, &self.leq0, pol).expect("same ambient space")
    }

    pub fn same_as(&self, o: &Self, pol: &TolerancePolicy) -> bool {
        span_eq(&self.geq0, &o.geq0, pol) && span_eq(&self.leq0, &o.leq0, pol)
    }

    pub fn act(&self, g: &Mat<C::Real>) -> Self {
        let gc = g.complexify();
        SplitLagrangian { geq0: gc.mul(&self.geq0), leq0: gc.mul(&self.leq0) }
    }

    pub fn to_c64(&self) -> SplitLagrangian<C64> {
        SplitLagrangian { geq0: self.geq0.to_c64(), leq0: self.leq0.to_c64() }
    }
}

fn eig_threshold(pol: &TolerancePolicy, m: &Mat<C64>) -> f64 {
    pol.rank_tol.sqrt().min(1e-6) * m.max_abs().max(1.0)
}

/// `ι_J(F)`: the zero, positive and negative eigenspaces of `κ|_F` measured
/// against the inner product `ω^ℂ(·, J·̄)` on `F`.
pub fn j_split(f: &ComplexLagrangian<C64>, j: &CompatibleJ<f64>, pol: &TolerancePolicy) -> Result<SplitLagrangian<C64>> {
    let b = f.frame();
    let n = f.n();
    let g = j.matrix().transpose().mul(&standard_omega::<f64>(n)).complexify();
    let h = b.adjoint().mul(&g).mul(b);
    let hs = hermitian_inv_sqrt(&h)?;
    let k = hs.mul(&f.kappa_gram()).mul(&hs);
    let (vals, v) = hermitian_eigh(&k);
    let x = hs.mul(&v);
    let thr = eig_threshold(pol, &k);
    let pick = |keep: &dyn Fn(f64) -> bool| {
        let idx: Vec<usize> = (0..vals.len()).filter(|&i| keep(vals[i])).collect();
        b.mul(&x.select_cols(&idx))
    };
    let geq0 = pick(&|l| l > -thr);
    let leq0 = pick(&|l| l < thr);
    SplitLagrangian::new(geq0, leq0, pol)
}

/// Real span of a conjugation-invariant complex frame.
fn real_span(m: &Mat<C64>, pol: &TolerancePolicy) -> Mat<f64> {
    column_basis(&m.re_f64().hstack(&m.im().map(|x| *x)), pol)
}

/// Adapted basis: a Darboux basis with `F₀ = ⟨e⁰⟩`,
/// `F₊ = ⟨e⁺ − if⁺⟩` and `F₋ = ⟨e⁻ + if⁻⟩`. Built by `κ`-orthonormalizing each
/// definite block inside a complement of `Re F₀` in `(Re F₀)^ω`, then pairing
/// `Re F₀` with an isotropic partner.
pub fn adapted_basis_split(s: &SplitLagrangian<C64>, pol: &TolerancePolicy) -> Result<DarbouxBasis<f64>> {
    let n = s.n();
    let space = SymplecticSpace::standard(n);
    let t = s.lag_type(pol);
    let e0 = real_span(&s.kernel(pol), pol);
    if e0.cols() != t.n0 {
        return Err(Error::Invariant("F₀ is not the complexification of a real subspace".into()));
    }
    let w0 = Subspace::new(&space, e0.clone(), pol)?;
    let perp = w0.symplectic_complement(pol);
    let c = extend_basis(&e0, perp.basis(), pol).complexify();
    let definite = |half: &Mat<C64>, sign: f64| -> Result<(Mat<f64>, Mat<f64>)> {
        let p = intersect_columns(half, &c, pol)?;
        let (vals, v) = hermitian_eigh(&kappa_pairing(&p, &p));
        let thr = eig_threshold(pol, &p);
        if vals.iter().any(|&l| l * sign <= thr) {
            return Err(Error::Invariant("κ is not definite on a splitting block".into()));
        }
        let d: Vec<C64> = vals.iter().map(|&l| C64::new((2.0 / l.abs()).sqrt(), 0.0)).collect();
        let u = p.mul(&v).mul(&Mat::diag(&d));
        // u = e ∓ i f
        Ok((u.re_f64(), u.im().map(|x| -sign * *x)))
    };
    let (ep, fp) = definite(s.geq0(), 1.0)?;
    let (em, fm) = definite(s.leq0(), -1.0)?;
    if ep.cols() != t.nplus || em.cols() != t.nminus {
        return Err(Error::Invariant("splitting blocks have the wrong dimension".into()));
    }
    let sympl = Subspace::new(&space, Mat::hstack_all(&[&ep, &fp, &em, &fm], 2 * n), pol)?;
    let pool = extend_basis(&e0, sympl.symplectic_complement(pol).basis(), pol);
    let f0 = lagrangian_partner(&space, &e0, &pool, pol)?;
    let b = DarbouxBasis::from_blocks(&e0, &ep, &em, &f0, &fp, &fm);
    if !b.is_darboux(&space, &TolerancePolicy { residual_tol: pol.residual_tol.max(1e-8), ..*pol }) {
        return Err(Error::Invariant("adapted basis failed the Darboux check".into()));
    }
    Ok(b)
}

/// Adapted basis of `F` through the splitting `ι_J(F)` of the standard `J`.
pub fn adapted_basis_lagrangian(f: &ComplexLagrangian<C64>, pol: &TolerancePolicy) -> Result<DarbouxBasis<f64>> {
    adapted_basis_split(&j_split(f, &CompatibleJ::standard(f.n()), pol)?, pol)
}

/// Symplectic `g` with `g.F = F′` for two complex Lagrangians of equal type.
pub fn lagrangian_transporter(f: &ComplexLagrangian<C64>, f2: &ComplexLagrangian<C64>, pol: &TolerancePolicy) -> Result<Mat<f64>> {
    if f.lag_type(pol) != f2.lag_type(pol) {
        return Err(Error::Precondition(format!("types {} and {} differ", f.lag_type(pol), f2.lag_type(pol))));
    }
    let b1 = adapted_basis_lagrangian(f, pol)?;
    let b2 = adapted_basis_lagrangian(f2, pol)?;
    Ok(b2.vectors().mul(&inverse(b1.vectors(), pol)?))
}

/// A symplectic `W` of dimension `2n₊` with compatible complex structures on
/// `W` and `W^ω`, each written in the coordinates of the stored basis.
#[derive(Clone, Debug)]
pub struct TwistorPoint {
    pub w: Subspace<f64>,
    pub j_w: Mat<f64>,
    pub w_omega: Subspace<f64>,
    pub j_w_omega: Mat<f64>,
}

fn check_compatible(basis: &Subspace<f64>, j: &Mat<f64>, pol: &TolerancePolicy) -> Result<()> {
    let g = basis.gram();
    let k = j.rows();
    let tol = pol.residual_tol.max(1e-9) * g.max_abs().max(1.0) * j.max_abs().max(1.0).powi(2);
    if j.cols() != k || k != basis.dim() {
        return Err(Error::Shape("complex structure does not match the subspace".into()));
    }
    if !j.mul(j).approx_eq(&Mat::identity(k).neg(), tol) {
        return Err(Error::Invariant("J² ≠ −1".into()));
    }
    if !j.transpose().mul(&g).mul(j).approx_eq(&g, tol) {
        return Err(Error::Invariant("J does not preserve ω".into()));
    }
    let m = j.transpose().mul(&g);
    let m = m.add(&m.transpose()).scale(&0.5);
    if crate::numeric::jacobi_eigh(&m).0.iter().any(|&l| l <= 0.0) {
        return Err(Error::Invariant("ω(·, J·) is not positive definite".into()));
    }
    Ok(())
}

impl TwistorPoint {
    pub fn validate(&self, pol: &TolerancePolicy) -> Result<()> {
        check_compatible(&self.w, &self.j_w, pol)?;
        check_compatible(&self.w_omega, &self.j_w_omega, pol)?;
        if !self.w.symplectic_complement(pol).same_span(&self.w_omega, pol) {
            return Err(Error::Invariant("second subspace is not W^ω".into()));
        }
        Ok(())
    }

    /// `J_W ⊕ J_{W^ω}` as a compatible complex structure on `V`.
    pub fn ambient_j(&self, pol: &TolerancePolicy) -> Result<Mat<f64>> {
        let a = self.w.basis().hstack(self.w_omega.basis());
        let j = Mat::block_diag(&[&self.j_w, &self.j_w_omega]);
        Ok(a.mul(&j).mul(&inverse(&a, pol)?))
    }
}

/// `[[0, −1], [1, 0]]` on `ℝ^{2k}`.
fn block_j(k: usize) -> Mat<f64> {
    standard_omega(k)
}

/// `J_{Re F±} v = Re(±i Re|⁻¹_{F±}(v))`. With `u` running over a frame of
/// `F₊`, `W` is written in the basis `[Re u, Re(iu)]`; for `F₋` the basis is
/// `[Re u, Re(−iu)]`. Both structures are then `[[0, −1], [1, 0]]`.
pub fn twistor_forward(s: &SplitLagrangian<C64>, pol: &TolerancePolicy) -> Result<TwistorPoint> {
    let t = s.lag_type(pol);
    if t.n0 != 0 {
        return Err(Error::Precondition(format!("twistor correspondence needs n₀ = 0, got type {t}")));
    }
    let space = SymplecticSpace::standard(s.n());
    let (u, u2) = (s.geq0(), s.leq0());
    let a = u.re_f64().hstack(&u.im().neg());
    let a2 = u2.re_f64().hstack(&u2.im());
    let tp = TwistorPoint {
        w: Subspace::new(&space, a, pol)?,
        j_w: block_j(t.nplus),
        w_omega: Subspace::new(&space, a2, pol)?,
        j_w_omega: block_j(t.nminus),
    };
    tp.validate(pol)?;
    Ok(tp)
}

/// `F₊` as the `+i` eigenspace of `J_W` in `W^ℂ`, `F₋` as the `−i`
/// eigenspace of `J_{W^ω}` in `(W^ω)^ℂ`.
pub fn twistor_backward(tp: &TwistorPoint, pol: &TolerancePolicy) -> Result<SplitLagrangian<C64>> {
    tp.validate(pol)?;
    let i = C64::new(0.0, 1.0);
    let eig = |basis: &Mat<f64>, j: &Mat<f64>, sign: f64| {
        let id = Mat::<C64>::identity(j.rows());
        let p = id.sub(&j.complexify().scale(&(i * sign)));
        basis.complexify().mul(&column_basis(&p, pol))
    };
    let fplus = eig(tp.w.basis(), &tp.j_w, 1.0);
    let fminus = eig(tp.w_omega.basis(), &tp.j_w_omega, -1.0);
    SplitLagrangian::new(fplus, fminus, pol)
}
