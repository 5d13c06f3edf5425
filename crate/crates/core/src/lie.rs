//! Structure theory of `sp(2n, ℝ)` in a fixed Darboux basis: Cartan
//! decomposition, Killing form, vectorial Cartan subalgebras, root data for
//! the Cartan subalgebras `a`, `h`, `t`, partial Cayley transforms, the
//! binary octahedral group, the Harish-Chandra coordinate and the
//! eigen-splittings of `sp` under a commuting pair `(Ĩ, J̃)`.
//!
//! Everything structural is exact over ℚ or ℚ(i). Entries involving `√2`
//! are kept exact by carrying a `1/√2` flag beside a ℚ(i) matrix.

use crate::error::{Error, Result};
use crate::lagrangian::ComplexLagrangian;
use crate::numeric::{inverse, nullspace, qi, rank, span_contains, Field, Mat, Matrix, RealField, TolerancePolicy, C64, Q, QI};
use crate::orbit::sp_dim;
use crate::space::{standard_j, standard_omega, OrbitType, SymplecticSpace};
use serde_json::{json, Value};
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

fn unit<T: Field>(n: usize, j: usize, l: usize) -> Mat<T> {
    let mut m = Mat::zeros(n, n);
    m[(j, l)] = T::one();
    m
}

fn blocks<T: Field>(a: &Mat<T>, b: &Mat<T>, c: &Mat<T>, d: &Mat<T>) -> Mat<T> {
    Mat::from_blocks(&[vec![a.clone(), b.clone()], vec![c.clone(), d.clone()]])
}

fn flatten<T: Field>(ms: &[Mat<T>]) -> Mat<T> {
    let r = ms.first().map(|m| m.rows() * m.cols()).unwrap_or(0);
    Mat::from_fn(r, ms.len(), |i, k| ms[k].data()[i].clone())
}

fn is_sp<T: Field>(x: &Mat<T>) -> bool {
    let n = x.rows() / 2;
    if x.shape() != (2 * n, 2 * n) {
        return false;
    }
    let om = standard_omega::<T>(n);
    x.transpose().mul(&om).add(&om.mul(x)).is_zero(1e-12)
}

/// `sp(2n)` with its Cartan decomposition for the standard `J`.
#[derive(Clone, Debug)]
pub struct LieContext<T: Field> {
    pub n: usize,
    pub basis_g: Vec<Mat<T>>,
    pub basis_k: Vec<Mat<T>>,
    pub basis_p: Vec<Mat<T>>,
    pub j: Mat<T>,
    /// Left inverse of the flattened `basis_g`, for coordinates.
    coord: Mat<T>,
}

/// `k = {[[a, −b], [b, a]]}` with `a` antisymmetric, `b` symmetric.
pub fn k_basis<T: Field>(n: usize) -> Vec<Mat<T>> {
    let z = Mat::<T>::zeros(n, n);
    let mut out = Vec::new();
    for j in 0..n {
        for l in j + 1..n {
            let a = unit::<T>(n, j, l).sub(&unit(n, l, j));
            out.push(blocks(&a, &z, &z, &a));
        }
    }
    for j in 0..n {
        for l in j..n {
            let b = sym_unit::<T>(n, j, l);
            out.push(blocks(&z, &b.neg(), &b, &z));
        }
    }
    out
}

/// `p = {[[a, b], [b, −a]]}` with `a`, `b` symmetric.
pub fn p_basis<T: Field>(n: usize) -> Vec<Mat<T>> {
    let z = Mat::<T>::zeros(n, n);
    let mut out = Vec::new();
    for j in 0..n {
        for l in j..n {
            let a = sym_unit::<T>(n, j, l);
            out.push(blocks(&a, &z, &z, &a.neg()));
            out.push(blocks(&z, &a, &a, &z));
        }
    }
    out
}

fn sym_unit<T: Field>(n: usize, j: usize, l: usize) -> Mat<T> {
    if j == l {
        unit(n, j, j)
    } else {
        unit::<T>(n, j, l).add(&unit(n, l, j))
    }
}

/// Builds `g = k ⊕ p` and checks the dimensions and `Ad(J) = θ`.
pub fn cartan_context<T: Field>(n: usize) -> Result<LieContext<T>> {
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    let basis_k = k_basis::<T>(n);
    let basis_p = p_basis::<T>(n);
    let j = standard_j::<T>(n);
    let jinv = j.neg();
    for (x, sign) in basis_k.iter().map(|x| (x, 1)).chain(basis_p.iter().map(|x| (x, -1))) {
        let ad = j.mul(x).mul(&jinv);
        if !ad.approx_eq(&x.transpose().neg(), 1e-12) || !ad.approx_eq(&x.scale(&T::from_i64(sign)), 1e-12) || !is_sp(x) {
            return Err(Error::Invariant("Ad(J) does not act as the Cartan involution".into()));
        }
    }
    if basis_k.len() != n * n || basis_p.len() != n * n + n {
        return Err(Error::Invariant("Cartan decomposition has the wrong dimensions".into()));
    }
    let basis_g: Vec<Mat<T>> = basis_k.iter().chain(basis_p.iter()).cloned().collect();
    let b = flatten(&basis_g);
    let pol = TolerancePolicy::default();
    if rank(&b, &pol) != sp_dim(n) {
        return Err(Error::Invariant("k ⊕ p does not span sp(2n)".into()));
    }
    let bt = b.transpose();
    let coord = inverse(&bt.mul(&b), &pol)?.mul(&bt);
    Ok(LieContext { n, basis_g, basis_k, basis_p, j, coord })
}

impl<T: Field> LieContext<T> {
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.basis_g.len(), self.basis_k.len(), self.basis_p.len())
    }

    /// Coordinates of `x` in `basis_g`.
    pub fn coords(&self, x: &Mat<T>) -> Result<Vec<T>> {
        if !is_sp(x) || x.rows() != 2 * self.n {
            return Err(Error::Precondition("matrix is not in sp(2n)".into()));
        }
        let v = Mat::from_vec(x.rows() * x.cols(), 1, x.data().to_vec());
        Ok(self.coord.mul(&v).data().to_vec())
    }

    /// Matrix of `ad x` on `basis_g`.
    pub fn ad(&self, x: &Mat<T>) -> Result<Mat<T>> {
        let cols: Vec<Mat<T>> = self.basis_g.iter().map(|b| x.commutator(b)).collect();
        if !is_sp(x) {
            return Err(Error::Precondition("matrix is not in sp(2n)".into()));
        }
        Ok(self.coord.mul(&flatten(&cols)))
    }

    /// `Tr(ad x ∘ ad y)`.
    pub fn killing_ad_trace(&self, x: &Mat<T>, y: &Mat<T>) -> Result<T> {
        Ok(self.ad(x)?.mul(&self.ad(y)?).trace())
    }

    /// `½ ad(J) x = J x` for `x ∈ p`.
    pub fn half_ad_j_is_j(&self, x: &Mat<T>) -> bool {
        let half = T::from_ratio(1, 2);
        self.j.commutator(x).scale(&half).approx_eq(&self.j.mul(x), 1e-12)
    }
}

/// `2(n+1)·Tr(aa′ + a′a + bc′ + b′c)` for `X = [[a, b], [c, −aᵗ]]`.
pub fn killing_form<T: Field>(x: &Mat<T>, y: &Mat<T>) -> Result<T> {
    if x.shape() != y.shape() || !is_sp(x) || !is_sp(y) {
        return Err(Error::Precondition("killing form needs two elements of the same sp(2n)".into()));
    }
    let n = x.rows() / 2;
    let (a, b, c) = (x.block(0, 0, n, n), x.block(0, n, n, n), x.block(n, 0, n, n));
    let (a2, b2, c2) = (y.block(0, 0, n, n), y.block(0, n, n, n), y.block(n, 0, n, n));
    let t = a.mul(&a2).add(&a2.mul(&a)).add(&b.mul(&c2)).add(&b2.mul(&c)).trace();
    Ok(t.mul(&T::from_i64(2 * (n as i64 + 1))))
}

/// `a_{e,f}`: the endomorphisms acting by `+1` on `e_j`, `−1` on `f_j` and
/// `0` on the other basis vectors, for a Darboux matrix `[e | f]`.
pub fn cartan_from_darboux<R: RealField>(basis: &Mat<R>, pol: &TolerancePolicy) -> Result<Vec<Mat<R>>> {
    let n = basis.rows() / 2;
    if basis.shape() != (2 * n, 2 * n) {
        return Err(Error::Shape("Darboux basis must be square of even size".into()));
    }
    let gram = basis.transpose().mul(&standard_omega::<R>(n)).mul(basis);
    if !gram.approx_eq(&standard_omega(n), pol.residual_threshold(basis) * basis.max_abs().max(1.0)) {
        return Err(Error::Precondition("columns do not form a Darboux basis".into()));
    }
    let binv = inverse(basis, pol)?;
    Ok((0..n)
        .map(|j| {
            let mut d = Mat::<R>::zeros(2 * n, 2 * n);
            d[(j, j)] = R::one();
            d[(n + j, n + j)] = R::one().neg();
            basis.mul(&d).mul(&binv)
        })
        .collect())
}

/// Inverse of [`cartan_from_darboux`]: `e_j` spans `ker(H_j − 1)`, `f_j`
/// spans `ker(H_j + 1)`, rescaled so that `ω(e_j, f_j) = 1`. The input must be
/// the weight-dual basis `H_1, …, H_n`.
pub fn darboux_from_cartan<R: RealField>(cartan: &[Mat<R>], pol: &TolerancePolicy) -> Result<Mat<R>> {
    let n = cartan.len();
    if n == 0 || cartan.iter().any(|h| h.shape() != (2 * n, 2 * n)) {
        return Err(Error::Shape(format!("expected {n} matrices of size {0}×{0}", 2 * n)));
    }
    let bad = || Error::Precondition("not a vectorial Cartan subalgebra with weight-dual basis".into());
    for (k, h) in cartan.iter().enumerate() {
        if !is_sp(h) {
            return Err(Error::Precondition("Cartan element is not in sp(2n)".into()));
        }
        for h2 in &cartan[k + 1..] {
            if !h.commutator(h2).is_zero(pol.residual_threshold(h)) {
                return Err(bad());
            }
        }
    }
    let id = Mat::<R>::identity(2 * n);
    let space = SymplecticSpace::standard(n);
    let mut es = Vec::with_capacity(n);
    let mut fs = Vec::with_capacity(n);
    for h in cartan {
        let e = nullspace(&h.sub(&id), pol);
        let f = nullspace(&h.add(&id), pol);
        let z = nullspace(h, pol);
        if e.cols() != 1 || f.cols() != 1 || z.cols() != 2 * n - 2 {
            return Err(bad());
        }
        let w = space.form(&e, &f);
        if w.is_zero_tol(pol.rank_tol) {
            return Err(bad());
        }
        fs.push(f.scale(&R::one().div(&w)));
        es.push(e);
    }
    let b = Mat::hstack_all(&es.iter().chain(fs.iter()).collect::<Vec<_>>(), 2 * n);
    let gram = b.transpose().mul(&standard_omega::<R>(n)).mul(&b);
    if !gram.approx_eq(&standard_omega(n), pol.residual_threshold(&b) * b.max_abs().max(1.0)) {
        return Err(bad());
    }
    Ok(b)
}

/// Which maximal abelian subalgebra the roots are taken against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CartanKind {
    /// Diagonal, inside `p`.
    A,
    /// `[[0, d], [d, 0]]`, inside `p`.
    H,
    /// `[[0, −d], [d, 0]]`, inside `k`; roots live on `t^ℂ`.
    T,
}

impl FromStr for CartanKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" => Ok(CartanKind::A),
            "h" => Ok(CartanKind::H),
            "t" => Ok(CartanKind::T),
            _ => Err(Error::Parse(format!("unknown Cartan subalgebra '{s}' (expected a|h|t)"))),
        }
    }
}

impl fmt::Display for CartanKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CartanKind::A => "a",
            CartanKind::H => "h",
            CartanKind::T => "t",
        })
    }
}

/// One root: `sign_j·w_j + sign_l·w_l` in the fundamental weights `w`.
#[derive(Clone, Debug)]
pub struct Root {
    pub j: usize,
    pub l: usize,
    pub sign_j: i8,
    pub sign_l: i8,
    /// `φ(H_k)` for the stored Cartan basis.
    pub coords: Vec<QI>,
    pub vector: Mat<QI>,
    /// `[e_φ, e_{−φ}]`.
    pub coroot: Mat<QI>,
    pub positive: bool,
    /// Only meaningful on `t`.
    pub compact: bool,
    /// Member of `Ψ = {2iε₁, …, 2iεₙ}` (on `t`), or the analogous long roots.
    pub strongly_orthogonal: bool,
}

impl Root {
    pub fn label(&self, kind: CartanKind) -> String {
        let w = match kind {
            CartanKind::A => "μ",
            CartanKind::H => "δ",
            CartanKind::T => "iε",
        };
        let s = |x: i8| if x < 0 { "-" } else { "+" };
        if self.j == self.l {
            format!("{}2{w}{}", if self.sign_j < 0 { "-" } else { "" }, self.j + 1)
        } else {
            format!("{}{w}{}{}{w}{}", if self.sign_j < 0 { "-" } else { "" }, self.j + 1, s(self.sign_l), self.l + 1)
        }
    }

    fn key(&self) -> (usize, usize, i8, i8) {
        (self.j, self.l, self.sign_j, self.sign_l)
    }

    fn negative_key(&self) -> (usize, usize, i8, i8) {
        (self.j, self.l, -self.sign_j, -self.sign_l)
    }
}

#[derive(Clone, Debug)]
pub struct RootDatum {
    pub kind: CartanKind,
    pub n: usize,
    pub cartan: Vec<Mat<QI>>,
    pub roots: Vec<Root>,
}

fn root_vector(kind: CartanKind, n: usize, j: usize, l: usize, sj: i8, sl: i8) -> Mat<QI> {
    let e = |a, b| unit::<QI>(n, a, b);
    let z = Mat::<QI>::zeros(n, n);
    let s = if j == l { e(j, j).scale(&QI::from_i64(2)) } else { e(j, l).add(&e(l, j)) };
    let i = QI::i();
    let half = QI::from_ratio(1, 2);
    if sj != sl {
        // difference roots: w_a − w_b with a the positive index
        let (a, b) = if sj > 0 { (j, l) } else { (l, j) };
        let anti = e(a, b).sub(&e(b, a));
        let sab = e(a, b).add(&e(b, a));
        return match kind {
            CartanKind::A => blocks(&e(a, b), &z, &z, &e(b, a).neg()),
            CartanKind::H => blocks(&anti, &sab, &sab, &anti),
            CartanKind::T => blocks(&anti, &sab.scale(&i), &sab.scale(&i.neg()), &anti).scale(&half),
        };
    }
    let pos = sj > 0;
    match (kind, pos) {
        (CartanKind::A, true) => blocks(&z, &s, &z, &z),
        (CartanKind::A, false) => blocks(&z, &z, &s, &z),
        (CartanKind::H, true) => blocks(&s.neg(), &s, &s.neg(), &s),
        (CartanKind::H, false) => blocks(&s.neg(), &s.neg(), &s, &s),
        (CartanKind::T, true) => blocks(&s.neg(), &s.scale(&i), &s.scale(&i), &s).scale(&half),
        (CartanKind::T, false) => blocks(&s.neg(), &s.scale(&i.neg()), &s.scale(&i.neg()), &s).scale(&half),
    }
}

fn cartan_element<T: Field>(kind: CartanKind, n: usize, k: usize) -> Mat<T> {
    let d = unit::<T>(n, k, k);
    let z = Mat::<T>::zeros(n, n);
    match kind {
        CartanKind::A => blocks(&d, &z, &z, &d.neg()),
        CartanKind::H => blocks(&z, &d, &d, &z),
        CartanKind::T => blocks(&z, &d.neg(), &d, &z),
    }
}

/// Root data for `a`, `h` or `t` with the root vectors in the standard
/// normalization. All `2n²` roots are listed; coroots are `[e_φ, e_{−φ}]`.
pub fn root_data(kind: CartanKind, n: usize) -> Result<RootDatum> {
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    let cartan: Vec<Mat<QI>> = (0..n).map(|k| cartan_element(kind, n, k)).collect();
    let unit_value = if kind == CartanKind::T { QI::i() } else { QI::one() };
    let mut roots = Vec::with_capacity(2 * n * n);
    let mut push = |j: usize, l: usize, sj: i8, sl: i8, positive: bool| {
        let mut coords = vec![QI::zero(); n];
        coords[j] = coords[j].add(&unit_value.mul(&QI::from_i64(sj as i64)));
        coords[l] = coords[l].add(&unit_value.mul(&QI::from_i64(sl as i64)));
        roots.push(Root {
            j,
            l,
            sign_j: sj,
            sign_l: sl,
            coords,
            vector: root_vector(kind, n, j, l, sj, sl),
            coroot: Mat::zeros(2 * n, 2 * n),
            positive,
            compact: kind == CartanKind::T && sj != sl,
            strongly_orthogonal: j == l && sj > 0,
        });
    };
    for j in 0..n {
        for l in j + 1..n {
            push(j, l, 1, -1, true);
            push(j, l, -1, 1, false);
        }
    }
    for j in 0..n {
        for l in j..n {
            push(j, l, 1, 1, true);
            push(j, l, -1, -1, false);
        }
    }
    let index: HashMap<_, usize> = roots.iter().enumerate().map(|(k, r)| (r.key(), k)).collect();
    let coroots: Vec<Mat<QI>> = roots.iter().map(|r| r.vector.commutator(&roots[index[&r.negative_key()]].vector)).collect();
    for (r, h) in roots.iter_mut().zip(coroots) {
        r.coroot = h;
    }
    Ok(RootDatum { kind, n, cartan, roots })
}

impl RootDatum {
    /// `φ(x)` for `x` in the (complexified) Cartan subalgebra.
    pub fn evaluate(&self, root: &Root, x: &Mat<QI>) -> Result<QI> {
        let c = self.cartan_coords(x)?;
        Ok(c.iter().zip(&root.coords).fold(QI::zero(), |acc, (a, b)| acc.add(&a.mul(b))))
    }

    fn cartan_coords(&self, x: &Mat<QI>) -> Result<Vec<QI>> {
        let b = flatten(&self.cartan);
        let v = Mat::from_vec(x.rows() * x.cols(), 1, x.data().to_vec());
        let pol = TolerancePolicy::default();
        let sol = crate::numeric::solve(&b, &v, &pol).ok_or_else(|| Error::Precondition("element is not in the Cartan subalgebra".into()))?;
        Ok(sol.data().to_vec())
    }

    /// `[H, e_φ] = φ(H)e_φ` on the Cartan basis, and `h_φ ∈ Cartan`.
    pub fn verify(&self) -> Result<()> {
        for r in &self.roots {
            for (h, c) in self.cartan.iter().zip(&r.coords) {
                if h.commutator(&r.vector) != r.vector.scale(c) {
                    return Err(Error::Invariant(format!("{} is not a weight vector", r.label(self.kind))));
                }
            }
            let v = self.evaluate(r, &r.coroot)?;
            if v == QI::zero() || r.coroot.commutator(&r.vector) != r.vector.scale(&v) {
                return Err(Error::Invariant(format!("coroot of {} does not act on its root vector", r.label(self.kind))));
            }
        }
        if self.roots.len() != 2 * self.n * self.n {
            return Err(Error::Invariant("wrong number of roots".into()));
        }
        Ok(())
    }

    pub fn negative_of(&self, r: &Root) -> &Root {
        self.roots.iter().find(|s| s.key() == r.negative_key()).expect("roots come in ± pairs")
    }

    /// `Ψ`: the long positive roots `2w_j`.
    pub fn strongly_orthogonal_set(&self) -> Vec<&Root> {
        self.roots.iter().filter(|r| r.strongly_orthogonal).collect()
    }

    pub fn is_root(&self, coords: &[QI]) -> bool {
        self.roots.iter().any(|r| r.coords == coords)
    }

    /// Neither `φ + ψ` nor `φ − ψ` is a root.
    pub fn strongly_orthogonal(&self, a: &Root, b: &Root) -> bool {
        let sum: Vec<QI> = a.coords.iter().zip(&b.coords).map(|(x, y)| x.add(y)).collect();
        let diff: Vec<QI> = a.coords.iter().zip(&b.coords).map(|(x, y)| x.sub(y)).collect();
        !self.is_root(&sum) && !self.is_root(&diff)
    }

    pub fn to_json(&self) -> Value {
        let roots: Vec<Value> = self
            .roots
            .iter()
            .map(|r| {
                json!({
                    "label": r.label(self.kind),
                    "coords": r.coords.iter().map(|z| json!([z.re.to_string(), z.im.to_string()])).collect::<Vec<_>>(),
                    "positive": r.positive,
                    "compact": r.compact,
                    "strongly_orthogonal": r.strongly_orthogonal,
                    "vector": Matrix::Gaussian(r.vector.clone()).to_json(),
                    "coroot": Matrix::Gaussian(r.coroot.clone()).to_json(),
                })
            })
            .collect();
        json!({
            "cartan_kind": self.kind.to_string(),
            "n": self.n,
            "cartan": self.cartan.iter().map(|h| Matrix::Gaussian(h.clone()).to_json()).collect::<Vec<_>>(),
            "roots": roots,
        })
    }
}

/// A 2×2 matrix over ℚ(i) times `(1/√2)^k` with `k ∈ {0, 1}`: exact for every
/// element of `BO₄₈`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Su2Element {
    pub matrix: [[(Q, Q); 2]; 2],
    pub root2: bool,
}

fn to_mat(m: &[[(Q, Q); 2]; 2]) -> Mat<QI> {
    Mat::from_fn(2, 2, |r, c| qi(m[r][c].0.clone(), m[r][c].1.clone()))
}

fn from_mat(m: &Mat<QI>) -> [[(Q, Q); 2]; 2] {
    let e = |r, c| {
        let z: &QI = &m[(r, c)];
        (z.re.clone(), z.im.clone())
    };
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

impl Su2Element {
    pub fn exact(m: &Mat<QI>) -> Self {
        Su2Element { matrix: from_mat(m), root2: false }
    }

    /// `m / √2`.
    pub fn over_root2(m: &Mat<QI>) -> Self {
        Su2Element { matrix: from_mat(m), root2: true }
    }

    pub fn gaussian(&self) -> Mat<QI> {
        to_mat(&self.matrix)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let p = self.gaussian().mul(&o.gaussian());
        if self.root2 && o.root2 {
            Su2Element::exact(&p.scale(&QI::from_ratio(1, 2)))
        } else {
            Su2Element { matrix: from_mat(&p), root2: self.root2 || o.root2 }
        }
    }

    /// Conjugate transpose, the inverse in `SU(2)`.
    pub fn inverse(&self) -> Self {
        Su2Element { matrix: from_mat(&self.gaussian().adjoint()), root2: self.root2 }
    }

    pub fn neg(&self) -> Self {
        Su2Element { matrix: from_mat(&self.gaussian().neg()), root2: self.root2 }
    }

    pub fn to_c64(&self) -> Mat<C64> {
        let m = self.gaussian().to_c64();
        if self.root2 {
            m.scale(&C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0))
        } else {
            m
        }
    }

    /// `g·x·g⁻¹` for a ℚ(i) matrix `x`.
    pub fn conjugate(&self, x: &Mat<QI>) -> Mat<QI> {
        let g = self.gaussian();
        let y = g.mul(x).mul(&g.adjoint());
        if self.root2 {
            y.scale(&QI::from_ratio(1, 2))
        } else {
            y
        }
    }

    /// Unit determinant and `g†g = 1`.
    pub fn is_special_unitary(&self) -> bool {
        let g = self.gaussian();
        let (gg, det) = (g.adjoint().mul(&g), g[(0, 0)].mul(&g[(1, 1)]).sub(&g[(0, 1)].mul(&g[(1, 0)])));
        let want = if self.root2 { QI::from_i64(2) } else { QI::one() };
        gg == Mat::identity(2).scale(&want) && det == want
    }

    pub fn is_identity(&self) -> bool {
        !self.root2 && self.gaussian() == Mat::identity(2)
    }
}

fn gi(re: i64, im: i64) -> QI {
    qi(Q::from_i64(re), Q::from_i64(im))
}

fn gmat(e: [[(i64, i64); 2]; 2]) -> Mat<QI> {
    Mat::from_fn(2, 2, |r, c| gi(e[r][c].0, e[r][c].1))
}

/// The Pauli matrices `σ₁, σ₂, σ₃`.
pub fn pauli() -> [Mat<QI>; 3] {
    [
        gmat([[(0, 0), (1, 0)], [(1, 0), (0, 0)]]),
        gmat([[(0, 0), (0, -1)], [(0, 1), (0, 0)]]),
        gmat([[(1, 0), (0, 0)], [(0, 0), (-1, 0)]]),
    ]
}

/// Named elements of `SU(2)` used throughout.
pub mod quaternion {
    use super::*;

    pub fn one() -> Su2Element {
        Su2Element::exact(&Mat::identity(2))
    }
    /// `𝐢 = −iσ₁`.
    pub fn i() -> Su2Element {
        Su2Element::exact(&pauli()[0].scale(&gi(0, -1)))
    }
    /// `𝐣 = −iσ₂`.
    pub fn j() -> Su2Element {
        Su2Element::exact(&pauli()[1].scale(&gi(0, -1)))
    }
    /// `𝐤 = −iσ₃`.
    pub fn k() -> Su2Element {
        Su2Element::exact(&pauli()[2].scale(&gi(0, -1)))
    }
    fn sqrt(q: Su2Element) -> Su2Element {
        Su2Element::over_root2(&Mat::identity(2).add(&q.gaussian()))
    }
    /// `(1 + 𝐢)/√2`, the Cayley transform.
    pub fn sqrt_i() -> Su2Element {
        sqrt(i())
    }
    pub fn sqrt_j() -> Su2Element {
        sqrt(j())
    }
    pub fn sqrt_k() -> Su2Element {
        sqrt(k())
    }
}

/// Closure of a generating set under multiplication.
pub fn generated_group(gens: &[Su2Element], limit: usize) -> Result<Vec<Su2Element>> {
    let mut seen: Vec<Su2Element> = vec![quaternion::one()];
    let mut frontier = seen.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for x in &frontier {
            for g in gens {
                let y = x.mul(g);
                if !seen.contains(&y) {
                    seen.push(y.clone());
                    next.push(y);
                    if seen.len() > limit {
                        return Err(Error::Invariant(format!("group exceeds {limit} elements")));
                    }
                }
            }
        }
        frontier = next;
    }
    Ok(seen)
}

/// `BO₄₈ = ⟨√𝐢, √𝐣⟩`, the lift of the rotation group of the octahedron.
///
/// `⟨√𝐢, 𝐣⟩` is smaller: `𝐣` conjugates `√𝐢` to its inverse, so those two
/// generate the generalized quaternion group of order 16.
pub fn binary_octahedral() -> Result<Vec<Su2Element>> {
    generated_group(&[quaternion::sqrt_i(), quaternion::sqrt_j()], 1000)
}

/// `Q₈ = {±1, ±𝐢, ±𝐣, ±𝐤}`.
pub fn quaternion_group() -> Vec<Su2Element> {
    use quaternion::*;
    [one(), i(), j(), k()].into_iter().flat_map(|x| [x.neg(), x]).collect()
}

/// Results of the finite-group checks.
#[derive(Clone, Debug, serde::Serialize)]
pub struct FiniteGroupReport {
    pub order_bo48: usize,
    pub order_q8: usize,
    pub q8_closed: bool,
    pub q8_in_bo48: bool,
    pub order_sqrt_i: usize,
    /// `|⟨√𝐢, 𝐣⟩|`.
    pub order_sqrt_i_and_j: usize,
    /// `⟨√𝐢, 𝐣⟩ ⊆ BO₄₈`.
    pub sqrt_i_and_j_in_bo48: bool,
    pub quaternion_relations: bool,
    pub real_form_conjugations: bool,
    pub all_special_unitary: bool,
}

pub fn finite_group_report() -> Result<FiniteGroupReport> {
    use quaternion::*;
    let bo = binary_octahedral()?;
    let q8 = quaternion_group();
    let sij = generated_group(&[sqrt_i(), j()], 1000)?;
    let q8_closed = q8.iter().all(|a| q8.iter().all(|b| q8.contains(&a.mul(b))));
    let minus_one = one().neg();
    let quaternion_relations = i().mul(&j()) == k()
        && j().mul(&k()) == i()
        && k().mul(&i()) == j()
        && i().mul(&i()) == minus_one
        && j().mul(&j()) == minus_one
        && k().mul(&k()) == minus_one;
    let [s1, s2, s3] = pauli();
    let real_form_conjugations = sqrt_i().conjugate(&s2) == s3 && sqrt_j().conjugate(&s3) == s1 && sqrt_k().conjugate(&s1) == s2;
    Ok(FiniteGroupReport {
        order_bo48: bo.len(),
        order_q8: q8.len(),
        q8_closed,
        q8_in_bo48: q8.iter().all(|x| bo.contains(x)),
        order_sqrt_i: generated_group(&[sqrt_i()], 100)?.len(),
        order_sqrt_i_and_j: sij.len(),
        sqrt_i_and_j_in_bo48: sij.iter().all(|x| bo.contains(x)),
        quaternion_relations,
        real_form_conjugations,
        all_special_unitary: bo.iter().all(Su2Element::is_special_unitary),
    })
}

/// `g` acting on the `j`-th factor `(e_j, f_j)` of `(ℝ²)ⁿ ⊗ ℂ`.
pub fn embed_factor(g: &Mat<C64>, j: usize, n: usize) -> Mat<C64> {
    let mut m = Mat::<C64>::identity(2 * n);
    let idx = [j, n + j];
    for (r, &a) in idx.iter().enumerate() {
        for (c, &b) in idx.iter().enumerate() {
            m[(a, b)] = g[(r, c)];
        }
    }
    m
}

/// Partial Cayley transforms and the basepoint they produce.
#[derive(Clone, Debug)]
pub struct CayleyData {
    pub c_gamma: Mat<C64>,
    pub c_sigma: Mat<C64>,
    pub basepoint: ComplexLagrangian<C64>,
    pub basepoint_type: OrbitType,
}

/// `c_Γ`, `c_Σ` with `Γ = {2iε₁..2iε_{n₀}}`, `Σ = {2iε_{n₀+1}..2iε_{n₀+n₊}}`,
/// and `F_n⃗ = c_Γ c_Σ² · span{e_j + i f_j}`. Each factor is `√𝐢` on its plane.
pub fn cayley_transforms(n0: usize, nplus: usize, n: usize, pol: &TolerancePolicy) -> Result<CayleyData> {
    if n0 + nplus > n {
        return Err(Error::Precondition(format!("n₀ + n₊ = {} exceeds n = {n}", n0 + nplus)));
    }
    let root = quaternion::sqrt_i().to_c64();
    let prod = |range: std::ops::Range<usize>| range.fold(Mat::<C64>::identity(2 * n), |acc, j| acc.mul(&embed_factor(&root, j, n)));
    let c_gamma = prod(0..n0);
    let c_sigma = prod(n0..n0 + nplus);
    let id = Mat::<C64>::identity(n);
    let start = id.vstack(&id.scale(&C64::i()));
    let frame = c_gamma.mul(&c_sigma).mul(&c_sigma).mul(&start);
    let basepoint = ComplexLagrangian::new(frame, pol)?;
    let basepoint_type = basepoint.lag_type(pol);
    let want = OrbitType::new(n0, nplus, n - n0 - nplus);
    if basepoint_type != want {
        return Err(Error::Invariant(format!("Cayley basepoint has type {basepoint_type}, expected {want}")));
    }
    Ok(CayleyData { c_gamma, c_sigma, basepoint, basepoint_type })
}

/// The exact frame `[[1,0,0],[0,1,0],[0,0,1],[0,0,0],[0,−i,0],[0,0,i]]` of `F_n⃗`.
pub fn cayley_basepoint_frame(n0: usize, nplus: usize, n: usize) -> Result<Mat<QI>> {
    if n0 + nplus > n {
        return Err(Error::Precondition(format!("n₀ + n₊ = {} exceeds n = {n}", n0 + nplus)));
    }
    let mut f = Mat::<QI>::zeros(2 * n, n);
    for j in 0..n {
        f[(j, j)] = QI::one();
        if j >= n0 + nplus {
            f[(n + j, j)] = QI::i();
        } else if j >= n0 {
            f[(n + j, j)] = QI::i().neg();
        }
    }
    Ok(f)
}

/// Complex lines in `ℂ²` visited by repeated `√𝐢`: `ℝe → ℝ(e − if) → iℝf →
/// ℝ(e + if) → ℝe`. Returns the visited lines as ℚ(i) vectors and whether the
/// cycle closes after exactly four steps.
pub fn cayley_line_orbit() -> (Vec<Mat<QI>>, bool) {
    let g = quaternion::sqrt_i().gaussian();
    let expected = [
        gmat([[(1, 0), (0, 0)], [(0, 0), (0, 0)]]).col(0),
        Mat::from_vec(2, 1, vec![gi(1, 0), gi(0, -1)]),
        Mat::from_vec(2, 1, vec![gi(0, 0), gi(0, 1)]),
        Mat::from_vec(2, 1, vec![gi(1, 0), gi(0, 1)]),
    ];
    let parallel = |a: &Mat<QI>, b: &Mat<QI>| a[(0, 0)].mul(&b[(1, 0)]) == a[(1, 0)].mul(&b[(0, 0)]);
    let mut v = expected[0].clone();
    let mut ok = true;
    let mut seen = vec![v.clone()];
    for step in 1..=4 {
        v = g.mul(&v);
        ok &= parallel(&v, &expected[step % 4]);
        if step < 4 {
            ok &= !parallel(&v, &expected[0]);
        }
        seen.push(v.clone());
    }
    (seen, ok)
}

/// `(e, h, f) = ((i𝐢 − 𝐣)/2, i𝐤, (i𝐢 + 𝐣)/2)`.
pub fn sl2_triple() -> (Mat<QI>, Mat<QI>, Mat<QI>) {
    use quaternion::*;
    let (qi_, qj, qk) = (i().gaussian(), j().gaussian(), k().gaussian());
    let half = QI::from_ratio(1, 2);
    let ii = qi_.scale(&QI::i());
    (ii.sub(&qj).scale(&half), qk.scale(&QI::i()), ii.add(&qj).scale(&half))
}

/// `[h, e] = 2e`, `[h, f] = −2f`, `[e, f] = h`.
pub fn sl2_relations_hold() -> bool {
    let (e, h, f) = sl2_triple();
    let two = QI::from_i64(2);
    h.commutator(&e) == e.scale(&two) && h.commutator(&f) == f.scale(&two).neg() && e.commutator(&f) == h
}

/// `Ad_{√𝐢}²` fixes the triple up to the Weyl reflection `e ↔ f`, `h ↦ −h`.
pub fn sqrt_i_square_is_weyl_reflection() -> bool {
    let (e, h, f) = sl2_triple();
    let s = quaternion::sqrt_i();
    let ad2 = |x: &Mat<QI>| s.conjugate(&s.conjugate(x));
    ad2(&e) == f && ad2(&f) == e && ad2(&h) == h.neg() && ad2(&ad2(&e)) == e
}

/// Harish-Chandra coordinate of `[[1, x], [0, 1]]·diag(y, y⁻¹)·K`:
/// `z = ½(1 − iw)(1 + iw)⁻¹` with `w = x − iy²`.
#[derive(Clone, Debug)]
pub struct HarishChandra {
    pub z: Mat<C64>,
    /// `g·F_{−J}`, spanned by `[w; 1]`.
    pub group_frame: Mat<C64>,
    /// `exp(p⁺)·F_{−J}`, spanned by `[−i(1 − 2z); 1 + 2z]`.
    pub algebra_frame: Mat<C64>,
}

pub fn harish_chandra(x: &Mat<f64>, y: &Mat<f64>, pol: &TolerancePolicy) -> Result<HarishChandra> {
    let n = x.rows();
    if x.shape() != (n, n) || y.shape() != (n, n) {
        return Err(Error::Shape("x and y must be square of the same size".into()));
    }
    let tol = pol.residual_threshold(x).max(pol.residual_threshold(y));
    if !x.approx_eq(&x.transpose(), tol) || !y.approx_eq(&y.transpose(), tol) {
        return Err(Error::Precondition("x and y must be symmetric".into()));
    }
    let (vals, _) = crate::numeric::jacobi_eigh(y);
    if vals.iter().any(|&v| v <= pol.rank_tol) {
        return Err(Error::NotPositiveDefinite);
    }
    let i = C64::i();
    let w = x.to_c64().sub(&y.mul(y).to_c64().scale(&i));
    let id = Mat::<C64>::identity(n);
    let iw = w.scale(&i);
    let z = id.sub(&iw).mul(&inverse(&id.add(&iw), pol)?).scale(&C64::new(0.5, 0.0));
    let two_z = z.scale(&C64::new(2.0, 0.0));
    let group_frame = w.vstack(&id);
    let algebra_frame = id.sub(&two_z).scale(&i.neg()).vstack(&id.add(&two_z));
    Ok(HarishChandra { z, group_frame, algebra_frame })
}

impl HarishChandra {
    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.z.approx_eq(&self.z.transpose(), tol)
    }

    /// Smallest eigenvalue of `4·1 − zz†`.
    pub fn domain_margin(&self) -> f64 {
        let n = self.z.rows();
        let m = Mat::<C64>::identity(n).scale(&C64::new(4.0, 0.0)).sub(&self.z.mul(&self.z.adjoint()));
        let (vals, _) = crate::numeric::hermitian_eigh(&m);
        vals.into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Projector distance between the two frames' spans.
    pub fn frame_gap(&self) -> f64 {
        crate::numeric::projector_distance(&self.group_frame, &self.algebra_frame, 1e-12)
    }
}

/// One of `k∥, k×, p∥, p×`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Piece {
    KPar,
    KPerp,
    PPar,
    PPerp,
}

impl fmt::Display for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Piece::KPar => "k∥",
            Piece::KPerp => "k×",
            Piece::PPar => "p∥",
            Piece::PPerp => "p×",
        })
    }
}

/// `(Ad Ĩ, Ad J̃)`-eigenspaces of `sp(2m)` for
/// `Ĩ = diag(1_{n₊}, −1_{n₋}, 1_{n₊}, −1_{n₋})` and the standard `J̃`.
#[derive(Clone, Debug)]
pub struct EigenSplitting<T: Field> {
    pub nplus: usize,
    pub nminus: usize,
    pub involution: Mat<T>,
    pub k_par: Vec<Mat<T>>,
    pub k_perp: Vec<Mat<T>>,
    pub p_par: Vec<Mat<T>>,
    pub p_perp: Vec<Mat<T>>,
}

/// The seven inclusions `[A, B] ⊆ C`.
pub const BRACKET_TABLE: [(Piece, Piece, Piece); 7] = [
    (Piece::KPar, Piece::KPar, Piece::KPar),
    (Piece::KPerp, Piece::KPerp, Piece::KPar),
    (Piece::PPar, Piece::PPar, Piece::KPar),
    (Piece::PPerp, Piece::PPerp, Piece::KPar),
    (Piece::KPar, Piece::KPerp, Piece::KPerp),
    (Piece::KPar, Piece::PPar, Piece::PPar),
    (Piece::KPar, Piece::PPerp, Piece::PPerp),
];

fn signs(nplus: usize, nminus: usize) -> Vec<i64> {
    let half: Vec<i64> = std::iter::repeat_n(1, nplus).chain(std::iter::repeat_n(-1, nminus)).collect();
    half.iter().chain(half.iter()).copied().collect()
}

pub fn eigen_splitting<T: Field>(nplus: usize, nminus: usize) -> EigenSplitting<T> {
    let m = nplus + nminus;
    let d = signs(nplus, nminus);
    let involution = Mat::diag(&d.iter().map(|&s| T::from_i64(s)).collect::<Vec<_>>());
    // basis elements are unit-like, so Ad(Ĩ) acts on each by a sign
    let parity = |x: &Mat<T>| {
        let y = involution.mul(x).mul(&involution);
        y == *x
    };
    let split = |v: Vec<Mat<T>>| -> (Vec<Mat<T>>, Vec<Mat<T>>) { v.into_iter().partition(|x| parity(x)) };
    let (k_par, k_perp) = split(k_basis::<T>(m));
    let (p_par, p_perp) = split(p_basis::<T>(m));
    EigenSplitting { nplus, nminus, involution, k_par, k_perp, p_par, p_perp }
}

impl<T: Field> EigenSplitting<T> {
    pub fn piece(&self, p: Piece) -> &[Mat<T>] {
        match p {
            Piece::KPar => &self.k_par,
            Piece::KPerp => &self.k_perp,
            Piece::PPar => &self.p_par,
            Piece::PPerp => &self.p_perp,
        }
    }

    pub fn contains(&self, p: Piece, x: &Mat<T>, pol: &TolerancePolicy) -> bool {
        let b = flatten(self.piece(p));
        let v = Mat::from_vec(x.rows() * x.cols(), 1, x.data().to_vec());
        if b.cols() == 0 {
            return v.is_zero(pol.rank_tol);
        }
        span_contains(&b, &v, pol)
    }

    /// `Σ c_k b_k` with the given coefficients.
    pub fn combine(&self, p: Piece, coeffs: &[T]) -> Mat<T> {
        let m = 2 * (self.nplus + self.nminus);
        self.piece(p).iter().zip(coeffs).fold(Mat::zeros(m, m), |acc, (b, c)| acc.add(&b.scale(c)))
    }

    /// `(dim(k∥ ⊕ p∥), dim(k∥ ⊕ k×), dim(k∥ ⊕ p×))`.
    pub fn sum_dims(&self) -> (usize, usize, usize) {
        (self.k_par.len() + self.p_par.len(), self.k_par.len() + self.k_perp.len(), self.k_par.len() + self.p_perp.len())
    }
}

/// Bases of `g_{Ψ∖Γ}` and its four pieces `k^Σ, p^Σ, q, r` inside `sp(2n)`.
#[derive(Clone, Debug)]
pub struct RestrictedSubalgebra<T: Field> {
    pub g: Vec<Mat<T>>,
    pub k_sigma: Vec<Mat<T>>,
    pub p_sigma: Vec<Mat<T>>,
    pub q: Vec<Mat<T>>,
    pub r: Vec<Mat<T>>,
}

impl<T: Field> RestrictedSubalgebra<T> {
    pub fn dims(&self) -> [usize; 5] {
        [self.g.len(), self.k_sigma.len(), self.p_sigma.len(), self.q.len(), self.r.len()]
    }
}

/// Embeds `sp(2(n − n₀))` on the coordinates `n₀..n` and splits it by
/// `Ad(c_Σ⁴) = Ad(diag(1_{n₀}, −1_{n₊}, 1_{n₋}, 1_{n₀}, −1_{n₊}, 1_{n₋}))`
/// and the Cartan involution.
pub fn restricted_subalgebra<T: Field>(n: usize, n0: usize, nplus: usize) -> Result<RestrictedSubalgebra<T>> {
    if n0 + nplus > n {
        return Err(Error::Precondition(format!("n₀ + n₊ = {} exceeds n = {n}", n0 + nplus)));
    }
    let m = n - n0;
    let split = eigen_splitting::<T>(nplus, m - nplus);
    let embed = |x: &Mat<T>| {
        let mut out = Mat::<T>::zeros(2 * n, 2 * n);
        for r in 0..2 * m {
            for c in 0..2 * m {
                let (a, b) = (lift_index(r, m, n0, n), lift_index(c, m, n0, n));
                out[(a, b)] = x[(r, c)].clone();
            }
        }
        out
    };
    let e = |v: &[Mat<T>]| v.iter().map(embed).collect::<Vec<_>>();
    let k_sigma = e(&split.k_par);
    let p_sigma = e(&split.p_par);
    let q = e(&split.k_perp);
    let r = e(&split.p_perp);
    let g = k_sigma.iter().chain(&p_sigma).chain(&q).chain(&r).cloned().collect();
    Ok(RestrictedSubalgebra { g, k_sigma, p_sigma, q, r })
}

fn lift_index(i: usize, m: usize, n0: usize, n: usize) -> usize {
    if i < m {
        n0 + i
    } else {
        n + n0 + (i - m)
    }
}

/// `c_Σ⁴` as a real diagonal matrix.
pub fn c_sigma_fourth<T: Field>(n: usize, n0: usize, nplus: usize) -> Mat<T> {
    let half: Vec<T> = (0..n).map(|j| if j >= n0 && j < n0 + nplus { T::one().neg() } else { T::one() }).collect();
    Mat::diag(&half.iter().chain(half.iter()).cloned().collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    #[test]
    fn context_dimensions() {
        assert_eq!(cartan_context::<Q>(1).unwrap().dims(), (3, 1, 2));
        assert_eq!(cartan_context::<Q>(2).unwrap().dims(), (10, 4, 6));
        assert!(cartan_context::<Q>(0).is_err());
    }

    #[test]
    fn killing_zero_and_diagonal() {
        let z = Mat::<Q>::zeros(2, 2);
        assert_eq!(killing_form(&z, &z).unwrap(), Q::zero());
        let h = cartan_element::<Q>(CartanKind::A, 1, 0);
        let ctx = cartan_context::<Q>(1).unwrap();
        assert_eq!(killing_form(&h, &h).unwrap(), ctx.killing_ad_trace(&h, &h).unwrap());
        assert_eq!(killing_form(&h, &h).unwrap(), Q::from_i64(8));
    }

    #[test]
    fn root_counts() {
        for kind in [CartanKind::A, CartanKind::H, CartanKind::T] {
            assert_eq!(root_data(kind, 1).unwrap().roots.len(), 2);
            let rd = root_data(kind, 2).unwrap();
            assert_eq!(rd.roots.len(), 8);
            rd.verify().unwrap();
            assert_eq!(rd.strongly_orthogonal_set().len(), 2);
        }
    }

    #[test]
    fn cayley_at_n1_is_sqrt_i() {
        let c = cayley_transforms(1, 0, 1, &pol()).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let want = Mat::from_rows(vec![vec![C64::new(s, 0.0), C64::new(0.0, -s)], vec![C64::new(0.0, -s), C64::new(s, 0.0)]]);
        assert!(c.c_gamma.approx_eq(&want, 1e-15));
    }

    #[test]
    fn group_orders() {
        let r = finite_group_report().unwrap();
        assert_eq!((r.order_bo48, r.order_q8, r.order_sqrt_i, r.order_sqrt_i_and_j), (48, 8, 8, 16));
        assert!(r.sqrt_i_and_j_in_bo48 && r.q8_in_bo48);
        assert!(r.quaternion_relations && r.real_form_conjugations && r.q8_closed && r.all_special_unitary);
    }

    #[test]
    fn hc_basepoint_goes_to_origin() {
        let hc = harish_chandra(&Mat::zeros(2, 2), &Mat::identity(2), &pol()).unwrap();
        assert!(hc.z.is_zero(1e-15));
        assert!(harish_chandra(&Mat::zeros(1, 1), &Mat::from_rows(vec![vec![-1.0]]), &pol()).is_err());
    }
}
