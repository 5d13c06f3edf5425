//! Orbit dimensions, stabilizer subalgebras, incidence of orbit closures and
//! explicit degenerations between orbits of complex Lagrangians.

use crate::error::{Error, Result};
use crate::lagrangian::{adapted_basis_lagrangian, ComplexLagrangian, SplitLagrangian};
use crate::numeric::{left_annihilator, nullspace, projector_distance, ComplexField, Field, Mat, RealField, TolerancePolicy, C64};
use crate::space::{standard_omega, OrbitType, Subspace};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Which family of orbits a type refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrbitKind {
    /// `Gr(n⃗)`: real subspaces.
    Gr,
    /// `Lag^ℂ(n⃗)`: complex Lagrangians.
    Lag,
    /// `Lag^ℂ_⊕(n⃗)`: complex Lagrangians with a splitting.
    LagSplit,
}

impl std::str::FromStr for OrbitKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gr" => Ok(Self::Gr),
            "lag" => Ok(Self::Lag),
            "lagsplit" | "lag-split" => Ok(Self::LagSplit),
            _ => Err(Error::Parse(format!("unknown orbit kind '{s}' (gr|lag|lagsplit)"))),
        }
    }
}

pub fn sp_dim(n: usize) -> usize {
    n * (2 * n + 1)
}

fn tri(k: usize) -> usize {
    k * (k + 1) / 2
}

/// Real dimension of the orbit of type `t`.
pub fn orbit_dim(kind: OrbitKind, t: OrbitType) -> usize {
    let n = t.n();
    let lag = n * n + n - tri(t.n0);
    match kind {
        OrbitKind::Lag => lag,
        OrbitKind::LagSplit => lag + 2 * t.nplus * t.nminus,
        OrbitKind::Gr => {
            let d = t.nplus.abs_diff(t.nminus);
            lag - d * d - t.nplus - t.nminus
        }
    }
}

/// Real dimension of the stabilizer in `Sp(2n, ℝ)`.
pub fn stabilizer_dim(kind: OrbitKind, t: OrbitType) -> usize {
    sp_dim(t.n()) - orbit_dim(kind, t)
}

/// Whether the orbit of `t2` lies in the closure of the orbit of `t`.
pub fn incidence(kind: OrbitKind, t: OrbitType, t2: OrbitType) -> Result<bool> {
    if t.n() != t2.n() {
        return Err(Error::Precondition(format!("types {t} and {t2} live in different dimensions")));
    }
    match kind {
        OrbitKind::Lag => Ok(t2.nminus <= t.nminus && t2.nplus <= t.nplus),
        OrbitKind::Gr => {
            if t.subspace_dim() != t2.subspace_dim() {
                return Err(Error::Precondition(format!("types {t} and {t2} have different subspace dimensions")));
            }
            Ok(t2.nplus <= t.nplus)
        }
        OrbitKind::LagSplit => Err(Error::Precondition("incidence is defined for gr and lag only".into())),
    }
}

/// Basis of `sp(2n)`: `X = −ΩS` for `S` running over the symmetric matrix units.
pub fn sp_basis<T: Field>(n: usize) -> Vec<Mat<T>> {
    let om = standard_omega::<T>(n);
    let mut out = Vec::with_capacity(sp_dim(n));
    for i in 0..2 * n {
        for j in i..2 * n {
            let mut s = Mat::<T>::zeros(2 * n, 2 * n);
            s[(i, j)] = T::one();
            s[(j, i)] = T::one();
            out.push(om.mul(&s).neg());
        }
    }
    out
}

/// `{X ∈ sp(2n, ℝ) : X·(span) ⊆ span}` for the spans in the subject.
#[derive(Clone, Debug)]
pub struct StabilizerAlgebra<R: RealField> {
    pub basis: Vec<Mat<R>>,
}

impl<R: RealField> StabilizerAlgebra<R> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Stabilized object.
pub enum Subject<'a, R: RealField> {
    Subspace(&'a Subspace<R>),
    Lagrangian(&'a ComplexLagrangian<R::Cx>),
    Split(&'a SplitLagrangian<R::Cx>),
}

/// Rows of `N · X_k · F` flattened into real equations.
fn equations<C: ComplexField>(frame: &Mat<C>, basis: &[Mat<C::Real>], pol: &TolerancePolicy) -> Mat<C::Real> {
    let ann = left_annihilator(frame, pol);
    let per = ann.rows() * frame.cols();
    let mut eq = Mat::<C::Real>::zeros(2 * per, basis.len());
    for (k, x) in basis.iter().enumerate() {
        let v = ann.mul(&x.complexify()).mul(frame);
        for (i, z) in v.data().iter().enumerate() {
            eq[(i, k)] = z.re();
            eq[(per + i, k)] = z.im();
        }
    }
    eq
}

pub fn stabilizer_algebra<R: RealField>(subject: Subject<'_, R>, pol: &TolerancePolicy) -> StabilizerAlgebra<R> {
    let frames: Vec<Mat<R::Cx>> = match subject {
        Subject::Subspace(w) => vec![w.basis().complexify()],
        Subject::Lagrangian(f) => vec![f.frame().clone()],
        Subject::Split(s) => vec![s.geq0().clone(), s.leq0().clone()],
    };
    let n = frames[0].rows() / 2;
    let basis = sp_basis::<R>(n);
    let eq = frames.iter().map(|f| equations(f, &basis, pol)).reduce(|a, b| a.vstack(&b)).expect("one frame");
    let ns = nullspace(&eq, pol);
    let out = (0..ns.cols())
        .map(|c| {
            basis.iter().enumerate().fold(Mat::zeros(2 * n, 2 * n), |acc, (k, x)| acc.add(&x.scale(&ns[(k, c)])))
        })
        .collect();
    StabilizerAlgebra { basis: out }
}

/// A point of type `t` at distance `O(eps)` from `target`, which must lie in
/// the closure of the orbit of `t`. Null columns `e⁰_j` of an adapted frame
/// become `e⁰_j − i·eps·f⁰_j` (positive) and then `e⁰_j + i·eps·f⁰_j`
/// (negative), in block order.
pub fn degeneration_path(target: &ComplexLagrangian<C64>, t: OrbitType, eps: f64, pol: &TolerancePolicy) -> Result<ComplexLagrangian<C64>> {
    let t2 = target.lag_type(pol);
    if !incidence(OrbitKind::Lag, t, t2)? {
        return Err(Error::Precondition(format!("{t2} is not in the closure of the orbit of {t}")));
    }
    if t == t2 {
        return Ok(target.clone());
    }
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::Precondition("eps must be positive".into()));
    }
    let b = adapted_basis_lagrangian(target, pol)?;
    let n = t.n();
    let up = t.nplus - t2.nplus;
    let down = t.nminus - t2.nminus;
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let mut coords = Mat::<C64>::zeros(2 * n, n);
    for j in 0..n {
        coords[(j, j)] = one;
    }
    for j in 0..t2.n0 {
        let s = if j < up {
            -eps
        } else if j < up + down {
            eps
        } else {
            0.0
        };
        coords[(n + j, j)] = i * s;
    }
    for j in t2.n0..t2.n0 + t2.nplus {
        coords[(n + j, j)] = -i;
    }
    for j in t2.n0 + t2.nplus..n {
        coords[(n + j, j)] = i;
    }
    let f = ComplexLagrangian::new(b.vectors().complexify().mul(&coords), pol)?;
    let got = f.lag_type(pol);
    if got != t {
        return Err(Error::Invariant(format!("degeneration produced type {got}, expected {t}")));
    }
    Ok(f)
}

/// Frame distance: Frobenius distance between orthogonal projectors.
pub fn frame_distance(a: &ComplexLagrangian<C64>, b: &ComplexLagrangian<C64>) -> f64 {
    projector_distance(a.frame(), b.frame(), 1e-12)
}

/// Outcome of a semicontinuity sweep.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub samples: usize,
    /// Points within the distance bound whose `n₊` or `n₋` dropped below the limit's.
    pub semicontinuity_violations: usize,
    /// Points within the distance bound that realized the forbidden type.
    pub forbidden_hits: usize,
}

/// Random analytic paths `s ↦ exp(sX)·target` with `X ∈ sp(2n, ℂ)`, sampled
/// at `s = 10⁻⁷, 10⁻⁸, …` until within `radius` of the target.
pub fn semicontinuity_sweep<G: Rng + ?Sized>(
    target: &ComplexLagrangian<C64>,
    forbidden: OrbitType,
    paths: usize,
    radius: f64,
    rng: &mut G,
    pol: &TolerancePolicy,
) -> SweepReport {
    let n = target.n();
    let t2 = target.lag_type(pol);
    let mut rep = SweepReport::default();
    for _ in 0..paths {
        let re = crate::sample::sp_element_f64(rng, n, 1.0);
        let im = crate::sample::sp_element_f64(rng, n, 1.0);
        let x = Mat::from_re_im(&re, &im);
        let mut s = 1e-7;
        for _ in 0..4 {
            let g = crate::numeric::expm(&x.scale(&C64::new(s, 0.0)));
            let f = match ComplexLagrangian::new(g.mul(target.frame()), pol) {
                Ok(f) => f,
                Err(_) => break,
            };
            if frame_distance(&f, target) < radius {
                rep.samples += 1;
                let t = f.lag_type(pol);
                if t.nplus < t2.nplus || t.nminus < t2.nminus {
                    rep.semicontinuity_violations += 1;
                }
                if t == forbidden {
                    rep.forbidden_hits += 1;
                }
                break;
            }
            s *= 0.1;
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{Q, QI};
    use crate::sample::basepoint_subspace;

    fn pol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    #[test]
    fn closed_forms() {
        assert_eq!(orbit_dim(OrbitKind::Lag, OrbitType::new(0, 1, 0)), 2);
        assert_eq!(orbit_dim(OrbitKind::Gr, OrbitType::new(1, 0, 0)), 1);
        assert_eq!(orbit_dim(OrbitKind::Gr, OrbitType::new(0, 1, 1)), 4);
    }

    #[test]
    fn dims_match_stabilizers() {
        for n in 1..=2 {
            for t in OrbitType::all(n) {
                let w = basepoint_subspace::<Q>(t);
                assert_eq!(stabilizer_algebra(Subject::Subspace(&w), &pol()).dim(), stabilizer_dim(OrbitKind::Gr, t), "{t}");
                let f = ComplexLagrangian::<QI>::basepoint(t);
                assert_eq!(stabilizer_algebra::<Q>(Subject::Lagrangian(&f), &pol()).dim(), stabilizer_dim(OrbitKind::Lag, t), "{t}");
                let s = SplitLagrangian::<QI>::basepoint(t);
                assert_eq!(stabilizer_algebra::<Q>(Subject::Split(&s), &pol()).dim(), stabilizer_dim(OrbitKind::LagSplit, t), "{t}");
            }
        }
    }

    #[test]
    fn incidence_examples() {
        let t = |a, b, c| OrbitType::new(a, b, c);
        assert!(incidence(OrbitKind::Lag, t(0, 3, 1), t(2, 1, 1)).unwrap());
        assert!(!incidence(OrbitKind::Lag, t(0, 1, 0), t(0, 0, 1)).unwrap());
        assert!(incidence(OrbitKind::Lag, t(1, 1, 0), t(1, 2, 0)).is_err());
    }

    #[test]
    fn equator_to_hemisphere() {
        let eq = ComplexLagrangian::<C64>::basepoint(OrbitType::new(1, 0, 0));
        let up = degeneration_path(&eq, OrbitType::new(0, 1, 0), 1e-3, &pol()).unwrap();
        assert!(up.kappa_gram()[(0, 0)].re > 0.0);
        assert!(frame_distance(&up, &eq) < 1e-2);
    }
}
