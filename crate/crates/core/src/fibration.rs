//! The radical maps between the orbit families, the compact `J`-suborbits
//! `Gr_J`, `Lag_J`, `Lag_{J,⊕}` with their sections, compatible involutions,
//! the factorization `g = k·exp(p∥)·exp(p×)` and the retractions `γ_J`,
//! `β_J`, `η_J` together with the correction `χ`.
//!
//! All retractions work in the reduced space `W₀^ω/W₀` written in a unitary
//! Darboux basis, where the induced complex structure is the standard one
//! and the maximal compact subgroup is `Sp ∩ O`.

use crate::darboux::{is_gr_j_member, j_invariant_complement, transporter};
use crate::error::{Error, Result};
use crate::lagrangian::{adapted_basis_split, f_pm_j, lagrangian_transporter, ComplexLagrangian, SplitLagrangian};
use crate::numeric::{
    column_basis, inverse, nullspace, solve, span_contains, span_eq, sym_exp, polar_newton, sym_log_symplectic, ComplexField, Field, Mat, RealField,
    TolerancePolicy, C64,
};
use crate::orbit::{sp_basis, Subject};
use crate::sample::basepoint_subspace;
use crate::space::{reduce_at, standard_j, CompatibleJ, OrbitType, ReducedSpace, Subspace, SymplecticSpace};
use std::fmt;
use std::str::FromStr;

fn real_span<C: ComplexField>(m: &Mat<C>, pol: &TolerancePolicy) -> Subspace<C::Real> {
    let space = SymplecticSpace::standard(m.rows() / 2);
    Subspace::span(&space, &m.re().hstack(&m.im()), pol).expect("same ambient dimension")
}

/// `Re F₀` for a complex Lagrangian.
pub fn re0<C: ComplexField>(f: &ComplexLagrangian<C>, pol: &TolerancePolicy) -> Subspace<C::Real> {
    real_span(&f.kernel(pol), pol)
}

/// `α(F⊕) = Re F₀`.
pub fn alpha<C: ComplexField>(s: &SplitLagrangian<C>, pol: &TolerancePolicy) -> Subspace<C::Real> {
    real_span(&s.kernel(pol), pol)
}

/// `Re F≥0`, a real subspace of the same type as the splitting.
pub fn re_geq0<C: ComplexField>(s: &SplitLagrangian<C>, pol: &TolerancePolicy) -> Subspace<C::Real> {
    real_span(s.geq0(), pol)
}

/// Forget the splitting.
pub fn phi<C: ComplexField>(s: &SplitLagrangian<C>) -> ComplexLagrangian<C> {
    s.lagrangian()
}

/// The isotropic subspace under any of the three objects: `W ∩ W^ω`,
/// `Re F₀` or `α(F⊕)`.
pub fn radical_maps<R: RealField>(x: Subject<'_, R>, pol: &TolerancePolicy) -> Subspace<R> {
    match x {
        Subject::Subspace(w) => w.radical(pol),
        Subject::Lagrangian(f) => re0(f, pol),
        Subject::Split(s) => alpha(s, pol),
    }
}

/// `(F ∩ F_J, F ∩ F_{−J})`
fn eigen_parts<R: RealField>(frame: &Mat<R::Cx>, j: &CompatibleJ<R>, pol: &TolerancePolicy) -> (Mat<R::Cx>, Mat<R::Cx>) {
    let (fj, fmj) = f_pm_j(j, pol);
    let p = crate::numeric::intersect_columns(frame, fj.frame(), pol).expect("same ambient dimension");
    let m = crate::numeric::intersect_columns(frame, fmj.frame(), pol).expect("same ambient dimension");
    (p, m)
}

pub fn is_gr_j<R: RealField>(w: &Subspace<R>, j: &CompatibleJ<R>, pol: &TolerancePolicy) -> bool {
    is_gr_j_member(w, j, pol)
}

/// `F = F₀ ⊕ (F ∩ F_J) ⊕ (F ∩ F_{−J})`
pub fn is_lag_j<R: RealField>(f: &ComplexLagrangian<R::Cx>, j: &CompatibleJ<R>, pol: &TolerancePolicy) -> bool {
    let (p, m) = eigen_parts(f.frame(), j, pol);
    f.kernel(pol).cols() + p.cols() + m.cols() == f.n()
}

/// `F≥0 = F₀ ⊕ (F ∩ F_J)` and `F≤0 = F₀ ⊕ (F ∩ F_{−J})`.
pub fn is_lag_j_split<R: RealField>(s: &SplitLagrangian<R::Cx>, j: &CompatibleJ<R>, pol: &TolerancePolicy) -> bool {
    let f = s.lagrangian();
    let k = f.kernel(pol);
    let (p, m) = eigen_parts(f.frame(), j, pol);
    k.cols() + p.cols() + m.cols() == f.n() && span_eq(s.geq0(), &k.hstack(&p), pol) && span_eq(s.leq0(), &k.hstack(&m), pol)
}

pub fn membership_j<R: RealField>(x: Subject<'_, R>, j: &CompatibleJ<R>, pol: &TolerancePolicy) -> bool {
    match x {
        Subject::Subspace(w) => is_gr_j(w, j, pol),
        Subject::Lagrangian(f) => is_lag_j(f, j, pol),
        Subject::Split(s) => is_lag_j_split(s, j, pol),
    }
}

/// `ψ_J(W) = [W₀ ⊕ (1 − iJ)W₊ ⊕ (1 + iJ)W₋]` where `W₊`, `W₋` are the
/// `J`-invariant complements of `W₀` in `W` and in `W^ω`.
pub fn psi_j<R: RealField>(w: &Subspace<R>, j: &CompatibleJ<R>, pol: &TolerancePolicy) -> Result<SplitLagrangian<R::Cx>> {
    if !is_gr_j(w, j, pol) {
        return Err(Error::Precondition("W is not in Gr_J".into()));
    }
    let wp = j_invariant_complement(w, j, pol)?;
    let wm = j_invariant_complement(&w.symplectic_complement(pol), j, pol)?;
    let w0 = w.radical(pol).basis().complexify();
    let ij = j.matrix().complexify().scale(&R::Cx::i());
    let id = Mat::<R::Cx>::identity(ij.rows());
    let plus = id.sub(&ij).mul(&wp.basis().complexify());
    let minus = id.add(&ij).mul(&wm.basis().complexify());
    SplitLagrangian::new(w0.hstack(&plus), w0.hstack(&minus), pol)
}

/// `ι_J` on `Lag_J`: `F ↦ [F₀ ⊕ (F ∩ F_J) ⊕ (F ∩ F_{−J})]`. Its inverse is [`phi`].
pub fn iota_j<R: RealField>(f: &ComplexLagrangian<R::Cx>, j: &CompatibleJ<R>, pol: &TolerancePolicy) -> Result<SplitLagrangian<R::Cx>> {
    let k = f.kernel(pol);
    let (p, m) = eigen_parts(f.frame(), j, pol);
    if k.cols() + p.cols() + m.cols() != f.n() {
        return Err(Error::Precondition("F is not in Lag_J".into()));
    }
    SplitLagrangian::new(k.hstack(&p), k.hstack(&m), pol)
}

/// `p = {X ∈ sp : JXJ⁻¹ = −X}`
pub fn in_p<T: Field>(x: &Mat<T>, j: &Mat<T>, tol: f64) -> bool {
    let om = crate::space::standard_omega::<T>(x.rows() / 2);
    let sp = x.transpose().mul(&om).add(&om.mul(x));
    sp.is_zero(tol) && x.mul(j).add(&j.mul(x)).is_zero(tol)
}

/// `p∥ = p ∩ {[X, I] = 0}`
pub fn in_p_par<T: Field>(x: &Mat<T>, i: &Mat<T>, j: &Mat<T>, tol: f64) -> bool {
    in_p(x, j, tol) && x.commutator(i).is_zero(tol)
}

/// `p× = p ∩ {XI + IX = 0}`
pub fn in_p_perp<T: Field>(x: &Mat<T>, i: &Mat<T>, j: &Mat<T>, tol: f64) -> bool {
    in_p(x, j, tol) && x.mul(i).add(&i.mul(x)).is_zero(tol)
}

/// `K = Sp ∩ {[k, J] = 0}`
pub fn in_k<T: Field>(k: &Mat<T>, j: &Mat<T>, tol: f64) -> bool {
    let om = crate::space::standard_omega::<T>(k.rows() / 2);
    k.transpose().mul(&om).mul(k).sub(&om).is_zero(tol) && k.commutator(j).is_zero(tol)
}

/// A point of a compact suborbit of the reduced space.
#[derive(Clone, Debug)]
pub enum Basepoint {
    Gr(Subspace<f64>),
    Lag(ComplexLagrangian<C64>),
    Split(SplitLagrangian<C64>),
}

impl Basepoint {
    /// Standard basepoint of type `(0, n₊, n₋)` for the standard `J`.
    pub fn standard(kind: crate::orbit::OrbitKind, nplus: usize, nminus: usize) -> Self {
        use crate::orbit::OrbitKind;
        let t = OrbitType::new(0, nplus, nminus);
        match kind {
            OrbitKind::Gr => Basepoint::Gr(basepoint_subspace(t)),
            OrbitKind::Lag => Basepoint::Lag(ComplexLagrangian::basepoint(t)),
            OrbitKind::LagSplit => Basepoint::Split(SplitLagrangian::basepoint(t)),
        }
    }

    fn frames(&self) -> Vec<Mat<C64>> {
        match self {
            Basepoint::Gr(w) => vec![w.basis().complexify()],
            Basepoint::Lag(f) => vec![f.frame().clone()],
            Basepoint::Split(s) => vec![s.geq0().clone(), s.leq0().clone()],
        }
    }

    fn transform(&self, g: &Mat<f64>, pol: &TolerancePolicy) -> Self {
        match self {
            Basepoint::Gr(w) => Basepoint::Gr(w.transform(g)),
            Basepoint::Lag(f) => Basepoint::Lag(f.act(g, pol)),
            Basepoint::Split(s) => Basepoint::Split(s.act(g)),
        }
    }
}

/// `(Ĩ, J̃, b)` on the reduced space `ℝ^{2m}` with its standard `ω`.
#[derive(Clone, Debug)]
pub struct CompatibleTriple {
    pub i: Mat<f64>,
    pub jt: Mat<f64>,
    pub basepoint: Basepoint,
}

impl CompatibleTriple {
    pub fn m(&self) -> usize {
        self.jt.rows() / 2
    }

    /// `(n₊, n₋)` read off the eigenspaces of `Ĩ`.
    pub fn split_dims(&self) -> (usize, usize) {
        let tr = self.i.trace();
        let m = self.m() as f64;
        let nplus = ((m + tr / 2.0) / 2.0).round() as usize;
        (nplus, self.m() - nplus)
    }
}

fn loose(pol: &TolerancePolicy) -> TolerancePolicy {
    TolerancePolicy { rank_tol: pol.rank_tol.max(1e-8), residual_tol: pol.residual_tol.max(1e-8) }
}

fn defect_tol(pol: &TolerancePolicy, m: &Mat<f64>) -> f64 {
    pol.rank_tol.max(pol.residual_tol) * m.max_abs().max(1.0) * m.rows().max(1) as f64
}

/// Real matrix acting as `+1` on `col(plus)` and `−1` on `col(minus)`.
fn involution(plus: &Mat<f64>, minus: &Mat<f64>, pol: &TolerancePolicy) -> Result<Mat<f64>> {
    let a = plus.hstack(minus);
    let mut d = vec![1.0; plus.cols()];
    d.extend(vec![-1.0; minus.cols()]);
    Ok(a.mul(&Mat::diag(&d)).mul(&inverse(&a, pol)?))
}

/// Basis of `{X ∈ sp : [X, A] = 0 for all A in mats}`.
fn joint_commutant(m: usize, mats: &[&Mat<f64>], pol: &TolerancePolicy) -> Vec<Mat<f64>> {
    let basis = sp_basis::<f64>(m);
    let d = 2 * m;
    let mut eq = Mat::<f64>::zeros(mats.len() * d * d, basis.len());
    for (k, x) in basis.iter().enumerate() {
        for (a_idx, a) in mats.iter().enumerate() {
            let c = x.commutator(a);
            for (e, v) in c.data().iter().enumerate() {
                eq[(a_idx * d * d + e, k)] = *v;
            }
        }
    }
    let ns = nullspace(&eq, pol);
    (0..ns.cols())
        .map(|c| basis.iter().enumerate().fold(Mat::zeros(d, d), |acc, (k, x)| acc.add(&x.scale(&ns[(k, c)]))))
        .collect()
}

/// The unique involution `Ĩ(b)` commuting with `J̃` whose `+1` eigenspace is
/// the positive part of `b`: `W′` itself, `Re(F ∩ F_J̃)`, or `Re F≥0`.
/// The joint commutant of `Ĩ` and `J̃` is checked to be `u(n₊) ⊕ u(n₋)` and to
/// stabilize `b`.
pub fn compatible_involution(b: Basepoint, jt: &Mat<f64>, pol: &TolerancePolicy) -> Result<CompatibleTriple> {
    let m = jt.rows() / 2;
    let space = SymplecticSpace::standard(m);
    let jc = CompatibleJ::check(jt.clone(), &space, pol)?;
    let (plus, minus) = match &b {
        Basepoint::Gr(w) => {
            if w.space().dim() != 2 * m {
                return Err(Error::Shape("basepoint and J̃ live in different dimensions".into()));
            }
            if w.subspace_type(pol).n0 != 0 || !is_gr_j(w, &jc, pol) {
                return Err(Error::Precondition("basepoint is not a J̃-invariant symplectic subspace".into()));
            }
            (w.basis().clone(), w.symplectic_complement(pol).basis().clone())
        }
        Basepoint::Lag(f) => {
            if f.n() != m {
                return Err(Error::Shape("basepoint and J̃ live in different dimensions".into()));
            }
            let (p, mm) = eigen_parts(f.frame(), &jc, pol);
            if p.cols() + mm.cols() != m {
                return Err(Error::Precondition("basepoint is not in Lag_J̃ with F₀ = 0".into()));
            }
            (real_span(&p, pol).basis().clone(), real_span(&mm, pol).basis().clone())
        }
        Basepoint::Split(s) => {
            if s.n() != m {
                return Err(Error::Shape("basepoint and J̃ live in different dimensions".into()));
            }
            if s.kernel(pol).cols() != 0 || !is_lag_j_split(s, &jc, pol) {
                return Err(Error::Precondition("basepoint is not in Lag_{J̃,⊕} with F₀ = 0".into()));
            }
            (re_geq0(s, pol).basis().clone(), real_span(s.leq0(), pol).basis().clone())
        }
    };
    let i = involution(&plus, &minus, pol)?;
    let tol = defect_tol(pol, &i);
    if !i.mul(&i).approx_eq(&Mat::identity(2 * m), tol) || !space.is_symplectic(&i, &loose(pol)) || !i.commutator(jt).is_zero(tol) {
        return Err(Error::Invariant("Ĩ is not a symplectic involution commuting with J̃".into()));
    }
    let (np, nm) = (plus.cols() / 2, minus.cols() / 2);
    let comm = joint_commutant(m, &[&i, jt], &loose(pol));
    if comm.len() != np * np + nm * nm {
        return Err(Error::Invariant(format!("joint commutant has dimension {}, expected {}", comm.len(), np * np + nm * nm)));
    }
    for x in &comm {
        for f in b.frames() {
            if !span_contains(&f, &x.complexify().mul(&f), &loose(pol)) {
                return Err(Error::Invariant("joint commutant does not stabilize the basepoint".into()));
            }
        }
    }
    Ok(CompatibleTriple { i, jt: jt.clone(), basepoint: b })
}

/// Order of the two exponentials.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorOrder {
    /// `k·exp(p∥)·exp(p×)`
    ParPerp,
    /// `k·exp(p×)·exp(p∥)`
    PerpPar,
    /// `k·exp(p∥ + p×)`
    Cartan,
}

#[derive(Clone, Debug)]
pub struct MostowFactors {
    pub k: Mat<f64>,
    pub p_par: Mat<f64>,
    pub p_perp: Mat<f64>,
    pub order: FactorOrder,
    pub residual: f64,
}

impl MostowFactors {
    pub fn product(&self) -> Mat<f64> {
        let e = |x: &Mat<f64>| crate::numeric::expm(x);
        match self.order {
            FactorOrder::ParPerp => self.k.mul(&e(&self.p_par)).mul(&e(&self.p_perp)),
            FactorOrder::PerpPar => self.k.mul(&e(&self.p_perp)).mul(&e(&self.p_par)),
            FactorOrder::Cartan => self.k.mul(&e(&self.p_par.add(&self.p_perp))),
        }
    }
}

fn sym(m: &Mat<f64>) -> Mat<f64> {
    m.add(&m.transpose()).scale(&0.5)
}

/// Darboux basis `U` with `U⁻¹ J̃ U` standard; the identity when `J̃` already is.
fn unitary_frame(jt: &Mat<f64>, pol: &TolerancePolicy) -> Result<Mat<f64>> {
    let m = jt.rows() / 2;
    if jt.approx_eq(&standard_j(m), 1e-14) {
        return Ok(Mat::identity(2 * m));
    }
    let space = SymplecticSpace::standard(m);
    let jc = CompatibleJ::check(jt.clone(), &space, pol)?;
    Ok(reduce_at(&Subspace::zero(&space), Some(&jc), pol)?.complement_basis().clone())
}

fn symplectic_inverse(g: &Mat<f64>) -> Mat<f64> {
    let om = crate::space::standard_omega::<f64>(g.rows() / 2);
    om.mul(&g.transpose()).mul(&om).neg()
}

/// `g = k·exp(p∥)·exp(p×)` with `k ∈ K̃`, `p∥ ∈ p∥(Ĩ)`, `p× ∈ p×(Ĩ)`.
pub fn mostow_decompose(g: &Mat<f64>, triple: &CompatibleTriple, pol: &TolerancePolicy) -> Result<MostowFactors> {
    mostow_decompose_ordered(g, triple, FactorOrder::ParPerp, pol)
}

/// Closed-form factorization in either order.
///
/// In unitary coordinates every factor is orthogonal or symmetric. With
/// `S = ĨJ̃` (resp. `Ĩ`, `J̃`) the last exponential commutes with `S` and the
/// first anticommutes, so `T = gSg⁻¹ = k e^{2x} S kᵗ`. The symmetric polar
/// factor of `Tᵗ` is `e^{2A}` with `A = k x kᵗ`, and `e^{−A} g = k e^{y}` is
/// a second polar decomposition. Both go through Newton iteration rather than
/// eigenvectors of `TTᵗ`, which would square the condition number.
pub fn mostow_decompose_ordered(g: &Mat<f64>, triple: &CompatibleTriple, order: FactorOrder, pol: &TolerancePolicy) -> Result<MostowFactors> {
    let m = triple.m();
    if g.shape() != (2 * m, 2 * m) {
        return Err(Error::Shape(format!("g must be {}×{}", 2 * m, 2 * m)));
    }
    let space = SymplecticSpace::standard(m);
    if !space.is_symplectic(g, &loose(pol)) {
        return Err(Error::Precondition("g is not symplectic".into()));
    }
    let u = unitary_frame(&triple.jt, pol)?;
    let ui = symplectic_inverse(&u);
    let gs = ui.mul(g).mul(&u);
    let is = ui.mul(&triple.i).mul(&u);
    let js = standard_j::<f64>(m);
    let s = match order {
        FactorOrder::ParPerp => is.mul(&js),
        FactorOrder::PerpPar => is.clone(),
        FactorOrder::Cartan => js.clone(),
    };
    let lp = loose(pol);
    let t = gs.mul(&s).mul(&symplectic_inverse(&gs));
    // T = e^{2A}·(orthogonal), read off from the polar form of Tᵗ
    let (_, h) = polar_newton(&t.transpose(), &lp)?;
    let a = sym_log_symplectic(&h, &lp)?.scale(&0.5);
    let mm = sym_exp(&a.neg(), &lp)?.mul(&gs);
    let (k, h2) = polar_newton(&mm, &lp)?;
    let y = sym_log_symplectic(&h2, &lp)?;
    let x = sym(&k.transpose().mul(&a).mul(&k));
    // clean into p and split by Ad(Ĩ)
    let to_p = |z: &Mat<f64>| sym(&z.add(&js.mul(z).mul(&js)).scale(&0.5));
    let par = |z: &Mat<f64>| z.add(&is.mul(z).mul(&is)).scale(&0.5);
    let perp = |z: &Mat<f64>| z.sub(&is.mul(z).mul(&is)).scale(&0.5);
    let (x, y) = (to_p(&x), to_p(&y));
    let (p_par, p_perp) = match order {
        FactorOrder::ParPerp => (par(&x), perp(&y)),
        FactorOrder::PerpPar => (par(&y), perp(&x)),
        FactorOrder::Cartan => (par(&x), perp(&x)),
    };
    let back = |z: &Mat<f64>| u.mul(z).mul(&ui);
    let out = MostowFactors { k: back(&k), p_par: back(&p_par), p_perp: back(&p_perp), order, residual: 0.0 };
    let residual = out.product().sub(g).frobenius();
    let kdef = k.transpose().mul(&k).sub(&Mat::identity(2 * m)).frobenius() + k.commutator(&js).frobenius();
    let thr = pol.residual_tol * g.frobenius().max(1.0);
    if !residual.is_finite() || residual > thr || kdef > thr {
        return Err(Error::NoConvergence { iterations: 1, residual: residual.max(kdef) });
    }
    Ok(MostowFactors { residual, ..out })
}

/// How a retraction computes its answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Route {
    /// Transport a basepoint, factor, keep the compact factor.
    #[default]
    Mostow,
    /// `P^{−1/2}` applied to the input, where `P = (TTᵗ)^{1/2}` for the
    /// conjugated structure `T` that the input determines.
    Projection,
}

impl FromStr for Route {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mostow" => Ok(Route::Mostow),
            "projection" => Ok(Route::Projection),
            _ => Err(Error::Parse(format!("unknown route '{s}' (expected mostow|projection)"))),
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Mostow => "mostow",
            Route::Projection => "projection",
        })
    }
}

/// A retraction result with the factorization that produced it.
#[derive(Clone, Debug)]
pub struct Retracted<T> {
    pub value: T,
    pub residual: f64,
    pub factors: Option<MostowFactors>,
}

impl<T> Retracted<T> {
    fn exact(value: T) -> Self {
        Retracted { value, residual: 0.0, factors: None }
    }
}

/// `P^{−1/2}` for `P = (TTᵗ)^{1/2}`.
fn projection_factor(t: &Mat<f64>, pol: &TolerancePolicy) -> Result<Mat<f64>> {
    let (_, h) = polar_newton(&t.transpose(), &loose(pol))?;
    let a = sym_log_symplectic(&h, &loose(pol))?.scale(&0.5);
    sym_exp(&a.neg(), &loose(pol))
}

fn project_frame(red: &ReducedSpace<f64>, f: &Mat<C64>, pol: &TolerancePolicy) -> Result<Mat<C64>> {
    let a = red.complement_basis().hstack(red.w0().basis()).complexify();
    let x = solve(&a, f, pol).ok_or_else(|| Error::Precondition("frame does not lie in (W₀^ω)^ℂ".into()))?;
    Ok(column_basis(&x.block(0, 0, 2 * red.m(), f.cols()), pol))
}

fn lift_frame(red: &ReducedSpace<f64>, u: &Mat<C64>) -> Mat<C64> {
    red.w0().basis().complexify().hstack(&red.complement_basis().complexify().mul(u))
}

fn membership_failure(what: &str) -> Error {
    Error::Invariant(format!("retraction output is not in {what}"))
}

/// `γ_J : Gr(n⃗) → Gr_J(n⃗)`.
pub fn gamma_j(w: &Subspace<f64>, j: &CompatibleJ<f64>, route: Route, pol: &TolerancePolicy) -> Result<Retracted<Subspace<f64>>> {
    let t = w.subspace_type(pol);
    if t.nplus == 0 || t.nminus == 0 {
        // isotropic and coisotropic subspaces are all in Gr_J
        return Ok(Retracted::exact(w.clone()));
    }
    let w0 = w.radical(pol);
    let red = reduce_at(&w0, Some(j), pol)?;
    let wt = red.project_subspace(w, pol)?;
    let m = red.m();
    let (value, residual, factors) = match route {
        Route::Mostow => {
            let star: Subspace<f64> = basepoint_subspace(OrbitType::new(0, t.nplus, t.nminus));
            let triple = compatible_involution(Basepoint::Gr(star.clone()), &standard_j(m), pol)?;
            let g = transporter(&star, &wt, &loose(pol))?;
            let fac = mostow_decompose_ordered(&g, &triple, FactorOrder::PerpPar, pol)?;
            (star.transform(&fac.k), fac.residual, Some(fac))
        }
        Route::Projection => {
            let i = involution(wt.basis(), wt.symplectic_complement(pol).basis(), pol)?;
            (wt.transform(&projection_factor(&i, pol)?), 0.0, None)
        }
    };
    let out = red.lift_subspace(&value, pol);
    if out.subspace_type(pol) != t || !is_gr_j(&out, j, pol) || !out.radical(pol).same_span(&w0, &loose(pol)) {
        return Err(membership_failure("Gr_J"));
    }
    Ok(Retracted { value: out, residual, factors })
}

/// Reduced picture of a complex Lagrangian: `(F/F₀)` in `W₀^ω/W₀`.
fn reduce_lagrangian(f: &ComplexLagrangian<C64>, j: &CompatibleJ<f64>, pol: &TolerancePolicy) -> Result<(ReducedSpace<f64>, ComplexLagrangian<C64>)> {
    let red = reduce_at(&re0(f, pol), Some(j), pol)?;
    let ft = ComplexLagrangian::new(project_frame(&red, f.frame(), pol)?, pol)?;
    Ok((red, ft))
}

/// `β_J : Lag^ℂ(n⃗) → Lag_J^ℂ(n⃗)`.
pub fn beta_j(f: &ComplexLagrangian<C64>, j: &CompatibleJ<f64>, route: Route, pol: &TolerancePolicy) -> Result<Retracted<ComplexLagrangian<C64>>> {
    let t = f.lag_type(pol);
    if t.n0 == t.n() {
        return Ok(Retracted::exact(f.clone()));
    }
    let (red, ft) = reduce_lagrangian(f, j, pol)?;
    let m = red.m();
    let (value, residual, factors) = match route {
        Route::Mostow => {
            let star = ComplexLagrangian::<C64>::basepoint(OrbitType::new(0, t.nplus, t.nminus));
            let triple = compatible_involution(Basepoint::Lag(star.clone()), &standard_j(m), pol)?;
            let g = lagrangian_transporter(&star, &ft, pol)?;
            let fac = mostow_decompose_ordered(&g, &triple, FactorOrder::ParPerp, pol)?;
            (star.act(&fac.k, pol), fac.residual, Some(fac))
        }
        Route::Projection => {
            // T = i on F, −i on F̄
            let b = ft.frame();
            let i = C64::new(0.0, 1.0);
            let a = b.hstack(&b.conj());
            let d: Vec<C64> = (0..2 * m).map(|k| if k < m { i } else { -i }).collect();
            let t = a.mul(&Mat::diag(&d)).mul(&inverse(&a, pol)?).re_f64();
            (ft.act(&projection_factor(&t, pol)?, pol), 0.0, None)
        }
    };
    let out = ComplexLagrangian::new(lift_frame(&red, value.frame()), pol)?;
    if out.lag_type(pol) != t || !is_lag_j(&out, j, pol) || !re0(&out, pol).same_span(red.w0(), &loose(pol)) {
        return Err(membership_failure("Lag_J"));
    }
    Ok(Retracted { value: out, residual, factors })
}

fn reduce_split(s: &SplitLagrangian<C64>, j: &CompatibleJ<f64>, pol: &TolerancePolicy) -> Result<(ReducedSpace<f64>, SplitLagrangian<C64>)> {
    let red = reduce_at(&alpha(s, pol), Some(j), pol)?;
    let st = SplitLagrangian::new(project_frame(&red, s.geq0(), pol)?, project_frame(&red, s.leq0(), pol)?, pol)?;
    Ok((red, st))
}

fn lift_split(red: &ReducedSpace<f64>, s: &SplitLagrangian<C64>, pol: &TolerancePolicy) -> Result<SplitLagrangian<C64>> {
    SplitLagrangian::new(lift_frame(red, s.geq0()), lift_frame(red, s.leq0()), pol)
}

/// Symplectic `g` with `g·a = b` for two splittings of the same type.
fn split_transporter(a: &SplitLagrangian<C64>, b: &SplitLagrangian<C64>, pol: &TolerancePolicy) -> Result<Mat<f64>> {
    let ba = adapted_basis_split(a, pol)?;
    let bb = adapted_basis_split(b, pol)?;
    Ok(bb.vectors().mul(&inverse(ba.vectors(), pol)?))
}

/// `η_J : Lag^ℂ_⊕(n⃗) → Lag^ℂ_{J,⊕}(n⃗)`.
pub fn eta_j(s: &SplitLagrangian<C64>, j: &CompatibleJ<f64>, route: Route, pol: &TolerancePolicy) -> Result<Retracted<SplitLagrangian<C64>>> {
    let t = s.lag_type(pol);
    if t.n0 == t.n() {
        return Ok(Retracted::exact(s.clone()));
    }
    let (red, st) = reduce_split(s, j, pol)?;
    let m = red.m();
    let (value, residual, factors) = match route {
        Route::Mostow => {
            let star = SplitLagrangian::<C64>::basepoint(OrbitType::new(0, t.nplus, t.nminus));
            let triple = compatible_involution(Basepoint::Split(star.clone()), &standard_j(m), pol)?;
            let g = split_transporter(&star, &st, pol)?;
            let fac = mostow_decompose_ordered(&g, &triple, FactorOrder::Cartan, pol)?;
            (star.act(&fac.k), fac.residual, Some(fac))
        }
        Route::Projection => {
            // J_F = i on F₊ ⊕ F̄₋, −i on F̄₊ ⊕ F₋
            let i = C64::new(0.0, 1.0);
            let hol = st.geq0().hstack(&st.leq0().conj());
            let a = hol.hstack(&hol.conj());
            let d: Vec<C64> = (0..2 * m).map(|k| if k < m { i } else { -i }).collect();
            let t = a.mul(&Mat::diag(&d)).mul(&inverse(&a, pol)?).re_f64();
            (st.act(&projection_factor(&t, pol)?), 0.0, None)
        }
    };
    let out = lift_split(&red, &value, pol)?;
    if out.lag_type(pol) != t || !is_lag_j_split(&out, j, pol) || !alpha(&out, pol).same_span(red.w0(), &loose(pol)) {
        return Err(membership_failure("Lag_{J,⊕}"));
    }
    Ok(Retracted { value: out, residual, factors })
}

/// `χ(k e^{p∥} e^{p×}·F*) = k e^{p×} e^{p∥}·F*`. The basepoint `F*` defaults
/// to the standard one in the unitary reduced coordinates; a supplied one
/// must lie in `Lag_{J,⊕}` over the same radical.
pub fn chi_correction(
    s: &SplitLagrangian<C64>,
    j: &CompatibleJ<f64>,
    basepoint: Option<&SplitLagrangian<C64>>,
    pol: &TolerancePolicy,
) -> Result<Retracted<SplitLagrangian<C64>>> {
    let t = s.lag_type(pol);
    if t.nplus * t.nminus == 0 {
        return Ok(Retracted::exact(s.clone()));
    }
    let (red, st) = reduce_split(s, j, pol)?;
    let m = red.m();
    let star = match basepoint {
        None => SplitLagrangian::<C64>::basepoint(OrbitType::new(0, t.nplus, t.nminus)),
        Some(b) => {
            if b.lag_type(pol) != t || !is_lag_j_split(b, j, pol) || !alpha(b, pol).same_span(red.w0(), &loose(pol)) {
                return Err(Error::Precondition("basepoint is not in Lag_{J,⊕} over the same radical".into()));
            }
            SplitLagrangian::new(project_frame(&red, b.geq0(), pol)?, project_frame(&red, b.leq0(), pol)?, pol)?
        }
    };
    let triple = compatible_involution(Basepoint::Split(star.clone()), &standard_j(m), pol)?;
    let g = split_transporter(&star, &st, pol)?;
    let fac = mostow_decompose_ordered(&g, &triple, FactorOrder::ParPerp, pol)?;
    let swapped = MostowFactors { order: FactorOrder::PerpPar, ..fac.clone() };
    let out = lift_split(&red, &star.act(&swapped.product()), pol)?;
    Ok(Retracted { value: out, residual: fac.residual, factors: Some(fac) })
}

/// Apply `k ∈ K` (or any symplectic matrix) to a basepoint of the reduced space.
pub fn move_basepoint(b: &Basepoint, g: &Mat<f64>, pol: &TolerancePolicy) -> Basepoint {
    b.transform(g, pol)
}
