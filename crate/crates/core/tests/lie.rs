use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symplecta::lie::*;
use symplecta::numeric::{expm, projector_distance, solve, Field};
use symplecta::orbit::sp_basis;
use symplecta::sample;
use symplecta::space::{standard_j, standard_omega, OrbitType};
use symplecta::{Mat, TolerancePolicy, C64, Q, QI};

fn pol() -> TolerancePolicy {
    TolerancePolicy::default()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn flat<T: Field>(x: &Mat<T>) -> Mat<T> {
    Mat::from_vec(x.rows() * x.cols(), 1, x.data().to_vec())
}

/// ad matrix in the basis returned by `orbit::sp_basis`, independent of the
/// Lie module's own bases.
fn ad_oracle(x: &Mat<Q>, basis: &[Mat<Q>]) -> Mat<Q> {
    let d = basis.len();
    let cols: Vec<Mat<Q>> = basis.iter().map(flat).collect();
    let b = Mat::hstack_all(&cols.iter().collect::<Vec<_>>(), x.rows() * x.cols());
    let mut out = Mat::<Q>::zeros(d, d);
    for (c, e) in basis.iter().enumerate() {
        let coords = solve(&b, &flat(&x.commutator(e)), &pol()).expect("sp is closed under brackets");
        for r in 0..d {
            out[(r, c)] = coords[(r, 0)].clone();
        }
    }
    out
}

fn trace_of_product(a: &Mat<Q>, b: &Mat<Q>) -> Q {
    let mut t = Q::zero();
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            t = Field::add(&t, &Field::mul(&a[(i, j)], &b[(j, i)]));
        }
    }
    t
}

#[test]
fn cartan_context_dimensions() {
    for n in 1..=3 {
        let ctx = cartan_context::<Q>(n).unwrap();
        assert_eq!(ctx.dims(), (n * (2 * n + 1), n * n, n * (n + 1)));
    }
}

#[test]
fn killing_matches_ad_trace_on_basis_sweep() {
    for n in 1..=3 {
        let ctx = cartan_context::<Q>(n).unwrap();
        let ob = sp_basis::<Q>(n);
        let ads: Vec<Mat<Q>> = ctx.basis_g.iter().map(|x| ad_oracle(x, &ob)).collect();
        for (x, ax) in ctx.basis_g.iter().zip(&ads) {
            for (y, ay) in ctx.basis_g.iter().zip(&ads) {
                assert_eq!(killing_form(x, y).unwrap(), trace_of_product(ax, ay), "n = {n}");
            }
        }
    }
}

#[test]
fn half_ad_j_squares_to_minus_one_on_p() {
    let mut r = rng(3);
    for n in 1..=3 {
        let ctx = cartan_context::<Q>(n).unwrap();
        let j = standard_j::<Q>(n);
        let half = Q::from_ratio(1, 2);
        for _ in 0..20 {
            let x = ctx.basis_p.iter().fold(Mat::zeros(2 * n, 2 * n), |acc, b| acc.add(&b.scale(&sample::small_q(&mut r, 4))));
            let ad = |m: &Mat<Q>| j.commutator(m).scale(&half);
            assert_eq!(ad(&ad(&x)), x.neg());
            assert!(ctx.half_ad_j_is_j(&x));
        }
    }
}

/// Killing dual `t_φ` with `B(t_φ, H) = φ(H)` on the Cartan basis.
fn killing_dual(rd: &RootDatum, root: &Root) -> Mat<QI> {
    let n = rd.n;
    let gram = Mat::from_fn(n, n, |a, b| killing_form(&rd.cartan[a], &rd.cartan[b]).unwrap());
    let rhs = Mat::from_vec(n, 1, root.coords.clone());
    let c = solve(&gram, &rhs, &pol()).unwrap();
    rd.cartan.iter().enumerate().fold(Mat::zeros(2 * n, 2 * n), |acc, (k, h)| acc.add(&h.scale(&c[(k, 0)])))
}

#[test]
fn coroots_are_killing_duals() {
    // [e_φ, e_{−φ}] = B(e_φ, e_{−φ})·t_φ for every root
    for kind in [CartanKind::A, CartanKind::H, CartanKind::T] {
        for n in 1..=3 {
            let rd = root_data(kind, n).unwrap();
            rd.verify().unwrap();
            assert_eq!(rd.roots.len(), 2 * n * n);
            for r in &rd.roots {
                let neg = rd.negative_of(r);
                assert_eq!(r.vector.commutator(&neg.vector), r.coroot);
                let b = killing_form(&r.vector, &neg.vector).unwrap();
                assert!(b != QI::zero());
                assert_eq!(r.coroot, killing_dual(&rd, r).scale(&b), "{kind} {}", r.label(kind));
            }
        }
    }
}

#[test]
fn coroots_for_short_roots_follow_the_display() {
    // j ≠ l on a: h = ±(H_j ∓ H_l) with H_k = diag(E_kk, −E_kk)
    let rd = root_data(CartanKind::A, 3).unwrap();
    for r in rd.roots.iter().filter(|r| r.j != r.l) {
        let want = rd.cartan[r.j].scale(&QI::from_i64(r.sign_j as i64)).add(&rd.cartan[r.l].scale(&QI::from_i64(r.sign_l as i64)));
        assert_eq!(r.coroot, want, "{}", r.label(CartanKind::A));
    }
}

#[test]
fn psi_is_strongly_orthogonal() {
    for kind in [CartanKind::A, CartanKind::H, CartanKind::T] {
        for n in 1..=3 {
            let rd = root_data(kind, n).unwrap();
            let psi = rd.strongly_orthogonal_set();
            assert_eq!(psi.len(), n);
            for (a, x) in psi.iter().enumerate() {
                for y in &psi[a + 1..] {
                    assert!(rd.strongly_orthogonal(x, y));
                }
            }
            // short roots are never strongly orthogonal to a long one sharing an index
            if n >= 2 {
                let short = rd.roots.iter().find(|r| r.j == 0 && r.l == 1 && r.sign_j > 0 && r.sign_l > 0).unwrap();
                assert!(!rd.strongly_orthogonal(short, psi[0]));
            }
        }
    }
}

#[test]
fn compact_roots_on_t_are_differences() {
    let rd = root_data(CartanKind::T, 3).unwrap();
    let j = standard_j::<QI>(3);
    for r in &rd.roots {
        // compact root vectors commute with J
        assert_eq!(r.compact, j.commutator(&r.vector) == Mat::zeros(6, 6), "{}", r.label(CartanKind::T));
    }
}

fn same_line(a: &Mat<Q>, b: &Mat<Q>) -> bool {
    let m = a.hstack(b);
    symplecta::numeric::rank(&m, &pol()) == 1
}

fn assert_round_trip(b: &Mat<Q>) {
    let n = b.rows() / 2;
    let cartan = cartan_from_darboux(b, &pol()).unwrap();
    for (k, h) in cartan.iter().enumerate() {
        assert_eq!(h.mul(&b.col(k)), b.col(k));
        assert_eq!(h.mul(&b.col(n + k)), b.col(n + k).neg());
        for h2 in &cartan {
            assert_eq!(h.commutator(h2), Mat::zeros(2 * n, 2 * n));
        }
    }
    let back = darboux_from_cartan(&cartan, &pol()).unwrap();
    assert_eq!(back.transpose().mul(&standard_omega(n)).mul(&back), standard_omega(n));
    for c in 0..2 * n {
        assert!(same_line(&back.col(c), &b.col(c)), "column {c}");
    }
}

#[test]
fn cartan_darboux_round_trip() {
    for n in 1..=3 {
        assert_round_trip(&Mat::identity(2 * n));
    }
    // permute the factors
    let perm = [2usize, 0, 1];
    let p = Mat::<Q>::from_fn(6, 6, |r, c| if (c < 3 && r == perm[c]) || (c >= 3 && r == 3 + perm[c - 3]) { Q::one() } else { Q::zero() });
    assert_round_trip(&p);
    let mut r = rng(9);
    for n in 1..=3 {
        for _ in 0..10 {
            assert_round_trip(&sample::symplectic_int::<Q, _>(&mut r, n));
        }
    }
}

#[test]
fn darboux_from_cartan_rejects_compact_cartan() {
    let d = Mat::<Q>::identity(1);
    let z = Mat::<Q>::zeros(1, 1);
    let t = Mat::from_blocks(&[vec![z.clone(), d.neg()], vec![d, z]]);
    assert!(darboux_from_cartan(&[t], &pol()).is_err());
    assert!(cartan_from_darboux(&Mat::<Q>::from_i64_rows(&[&[1, 0], &[0, 2]]), &pol()).is_err());
}

#[test]
fn cayley_matches_its_exponential() {
    // c_Γ c_Σ = exp(−iπ/4 Σ_j (E_{j,n+j} + E_{n+j,j})) over Γ ∪ Σ
    for n in 1..=3 {
        for n0 in 0..=n {
            for np in 0..=n - n0 {
                let c = cayley_transforms(n0, np, n, &pol()).unwrap();
                let gen = |range: std::ops::Range<usize>| {
                    let mut y = Mat::<C64>::zeros(2 * n, 2 * n);
                    for j in range {
                        y[(j, n + j)] = C64::new(0.0, -std::f64::consts::FRAC_PI_4);
                        y[(n + j, j)] = C64::new(0.0, -std::f64::consts::FRAC_PI_4);
                    }
                    expm(&y)
                };
                assert!(c.c_gamma.approx_eq(&gen(0..n0), 1e-13));
                assert!(c.c_sigma.approx_eq(&gen(n0..n0 + np), 1e-13));
                assert_eq!(c.basepoint_type, OrbitType::new(n0, np, n - n0 - np));
                let exact = cayley_basepoint_frame(n0, np, n).unwrap().to_c64();
                assert!(projector_distance(c.basepoint.frame(), &exact, 1e-12) < 1e-12);
            }
        }
    }
    assert!(cayley_transforms(2, 2, 3, &pol()).is_err());
}

#[test]
fn cayley_trivial_when_no_factors() {
    let c = cayley_transforms(0, 0, 2, &pol()).unwrap();
    assert!(c.c_gamma.approx_eq(&Mat::identity(4), 0.0));
    assert!(c.c_sigma.approx_eq(&Mat::identity(4), 0.0));
    assert_eq!(c.basepoint_type, OrbitType::new(0, 0, 2));
}

#[test]
fn cayley_n1_is_sqrt_i_entrywise() {
    let c = cayley_transforms(1, 0, 1, &pol()).unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    assert!(c.c_gamma.approx_eq(&quaternion::sqrt_i().to_c64(), 1e-15));
    assert!((c.c_gamma[(0, 0)] - C64::new(s, 0.0)).norm() < 1e-15);
    assert!((c.c_gamma[(0, 1)] - C64::new(0.0, -s)).norm() < 1e-15);
}

#[test]
fn finite_groups() {
    let r = finite_group_report().unwrap();
    assert_eq!(r.order_bo48, 48);
    assert_eq!(r.order_q8, 8);
    assert_eq!(r.order_sqrt_i, 8);
    assert_eq!(r.order_sqrt_i_and_j, 16);
    assert!(r.quaternion_relations && r.real_form_conjugations && r.all_special_unitary);
    let bo = binary_octahedral().unwrap();
    // closed under products and inverses, −1 central
    let minus = quaternion::one().neg();
    for a in bo.iter().step_by(5) {
        assert!(bo.contains(&a.inverse()));
        assert_eq!(a.mul(&minus), minus.mul(a));
        for b in bo.iter().step_by(7) {
            assert!(bo.contains(&a.mul(b)));
        }
    }
}

#[test]
fn pauli_relations() {
    let [s1, s2, s3] = pauli();
    for s in [&s1, &s2, &s3] {
        assert_eq!(s.mul(s), Mat::identity(2));
    }
    assert_eq!(s1.mul(&s2), s3.scale(&QI::i()));
}

#[test]
fn line_orbit_and_sl2() {
    let (lines, closes) = cayley_line_orbit();
    assert!(closes);
    assert_eq!(lines.len(), 5);
    assert!(sl2_relations_hold());
    assert!(sqrt_i_square_is_weyl_reflection());
}

fn random_spd(r: &mut ChaCha8Rng, n: usize) -> Mat<f64> {
    let a = sample::float_matrix(r, n, n, 1.0);
    a.mul(&a.transpose()).add(&Mat::identity(n).scale(&0.2))
}

fn random_sym(r: &mut ChaCha8Rng, n: usize) -> Mat<f64> {
    let a = sample::float_matrix(r, n, n, 2.0);
    a.add(&a.transpose()).scale(&0.5)
}

#[test]
fn harish_chandra_bounded_and_consistent() {
    let mut r = rng(11);
    for k in 0..200 {
        let n = 1 + k % 3;
        let (x, y) = (random_sym(&mut r, n), random_spd(&mut r, n));
        let hc = harish_chandra(&x, &y, &pol()).unwrap();
        assert!(hc.is_symmetric(1e-12));
        assert!(hc.domain_margin() > 0.0);
        assert!(hc.frame_gap() < 1e-9, "gap {}", hc.frame_gap());
    }
}

#[test]
fn harish_chandra_basepoint_and_errors() {
    for n in 1..=3 {
        let hc = harish_chandra(&Mat::zeros(n, n), &Mat::identity(n), &pol()).unwrap();
        assert!(hc.z.is_zero(1e-15));
    }
    let bad = Mat::from_rows(vec![vec![1.0, 2.0], vec![0.0, 1.0]]);
    assert!(harish_chandra(&bad, &Mat::identity(2), &pol()).is_err());
    assert!(harish_chandra(&Mat::zeros(2, 2), &Mat::diag(&[1.0, 0.0]), &pol()).is_err());
}

#[test]
fn harish_chandra_is_a_disk_coordinate_at_n1() {
    // n = 1: scalar Möbius map, lands in the disk of radius 1/2
    let mut r = rng(12);
    for _ in 0..50 {
        let x: f64 = r.random_range(-3.0..3.0);
        let y: f64 = r.random_range(0.2..3.0);
        let hc = harish_chandra(&Mat::from_rows(vec![vec![x]]), &Mat::from_rows(vec![vec![y]]), &pol()).unwrap();
        let w = C64::new(x, -y * y);
        let iw = C64::i() * w;
        let z = 0.5 * (C64::new(1.0, 0.0) - iw) / (C64::new(1.0, 0.0) + iw);
        assert!((hc.z[(0, 0)] - z).norm() < 1e-12);
        assert!(z.norm() < 0.5);
    }
}

fn dim_sp(m: usize) -> usize {
    m * (2 * m + 1)
}

#[test]
fn eigen_splitting_dimensions() {
    for np in 0..=3 {
        for nm in 0..=3 - np {
            let s = eigen_splitting::<Q>(np, nm);
            let m = np + nm;
            assert_eq!(s.k_par.len() + s.k_perp.len() + s.p_par.len() + s.p_perp.len(), dim_sp(m));
            let (a, b, c) = s.sum_dims();
            assert_eq!(a, dim_sp(np) + dim_sp(nm));
            assert_eq!(b, m * m);
            assert_eq!(c, m * m);
        }
    }
}

fn random_in(s: &EigenSplitting<Q>, p: Piece, r: &mut ChaCha8Rng) -> Mat<Q> {
    let coeffs: Vec<Q> = (0..s.piece(p).len()).map(|_| sample::small_q(r, 3)).collect();
    s.combine(p, &coeffs)
}

#[test]
fn bracket_table_holds_on_random_samples() {
    let mut r = rng(21);
    for (np, nm) in [(1, 2), (2, 1), (3, 0), (1, 1)] {
        let s = eigen_splitting::<Q>(np, nm);
        let j = standard_j::<Q>(np + nm);
        for &(a, b, c) in BRACKET_TABLE.iter() {
            for _ in 0..100 {
                let (x, y) = (random_in(&s, a, &mut r), random_in(&s, b, &mut r));
                assert!(s.contains(c, &x.commutator(&y), &pol()), "[{a}, {b}] ⊄ {c}");
            }
        }
        // the pieces are the joint eigenspaces of Ad Ĩ and Ad J
        let i = &s.involution;
        for (p, si, sj) in [(Piece::KPar, 1, 1), (Piece::KPerp, -1, 1), (Piece::PPar, 1, -1), (Piece::PPerp, -1, -1)] {
            for x in s.piece(p) {
                assert_eq!(i.mul(x).mul(i), x.scale(&Q::from_i64(si)));
                assert_eq!(j.mul(x).mul(&j).neg(), x.scale(&Q::from_i64(sj)));
            }
        }
    }
}

#[test]
fn restricted_subalgebra_dimensions() {
    let g = restricted_subalgebra::<Q>(2, 0, 1).unwrap();
    assert_eq!(g.dims().iter().skip(1).sum::<usize>(), 10);
    assert_eq!(g.dims()[0], 10);
    let g = restricted_subalgebra::<Q>(3, 3, 0).unwrap();
    assert_eq!(g.dims(), [0; 5]);
    assert!(restricted_subalgebra::<Q>(2, 2, 1).is_err());
}

#[test]
fn restricted_subalgebra_structure() {
    let mut r = rng(22);
    for (n, n0, np) in [(3, 1, 1), (3, 0, 2), (2, 1, 0), (3, 2, 1)] {
        let g = restricted_subalgebra::<Q>(n, n0, np).unwrap();
        let m = n - n0;
        assert_eq!(g.g.len(), dim_sp(m));
        let c4 = c_sigma_fourth::<Q>(n, n0, np);
        let j = standard_j::<Q>(n);
        let ad = |x: &Mat<Q>| c4.mul(x).mul(&c4);
        for x in g.k_sigma.iter().chain(&g.p_sigma) {
            assert_eq!(ad(x), *x);
        }
        for x in g.q.iter().chain(&g.r) {
            assert_eq!(ad(x), x.neg());
        }
        for x in g.k_sigma.iter().chain(&g.q) {
            assert_eq!(j.commutator(x), Mat::zeros(2 * n, 2 * n));
        }
        // supported away from the first n₀ factors, closed under brackets
        let b = Mat::hstack_all(&g.g.iter().map(flat).collect::<Vec<_>>().iter().collect::<Vec<_>>(), 4 * n * n);
        for _ in 0..20 {
            let x = g.g.iter().fold(Mat::zeros(2 * n, 2 * n), |acc, e| acc.add(&e.scale(&sample::small_q(&mut r, 2))));
            let y = g.g.iter().fold(Mat::zeros(2 * n, 2 * n), |acc, e| acc.add(&e.scale(&sample::small_q(&mut r, 2))));
            assert!(symplecta::numeric::span_contains(&b, &flat(&x.commutator(&y)), &pol()));
            for k in 0..n0 {
                assert_eq!(x.mul(&Mat::<Q>::identity(2 * n).col(k)), Mat::zeros(2 * n, 1));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn killing_is_invariant(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let x = sample::sp_element_int::<Q, _>(&mut r, n, 3);
        let y = sample::sp_element_int::<Q, _>(&mut r, n, 3);
        let z = sample::sp_element_int::<Q, _>(&mut r, n, 3);
        prop_assert_eq!(killing_form(&x, &y).unwrap(), killing_form(&y, &x).unwrap());
        prop_assert_eq!(killing_form(&x.commutator(&y), &z).unwrap(), killing_form(&x, &y.commutator(&z)).unwrap());
        let g = sample::symplectic_int::<Q, _>(&mut r, n);
        let gi = symplecta::numeric::inverse(&g, &pol()).unwrap();
        let adg = |m: &Mat<Q>| g.mul(m).mul(&gi);
        prop_assert_eq!(killing_form(&adg(&x), &adg(&y)).unwrap(), killing_form(&x, &y).unwrap());
    }

    #[test]
    fn killing_is_negative_on_k_positive_on_p(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let ctx = cartan_context::<Q>(n).unwrap();
        let comb = |b: &[Mat<Q>], r: &mut ChaCha8Rng| b.iter().fold(Mat::zeros(2 * n, 2 * n), |acc, e| acc.add(&e.scale(&sample::small_q(r, 3))));
        let k = comb(&ctx.basis_k, &mut r);
        let p = comb(&ctx.basis_p, &mut r);
        let zero = Q::zero();
        let bk = killing_form(&k, &k).unwrap();
        let bp = killing_form(&p, &p).unwrap();
        prop_assert!(bk < zero || k == Mat::zeros(2 * n, 2 * n));
        prop_assert!(bp > zero || p == Mat::zeros(2 * n, 2 * n));
        prop_assert_eq!(killing_form(&k, &p).unwrap(), zero);
    }

    #[test]
    fn harish_chandra_stays_in_the_domain(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let (x, y) = (random_sym(&mut r, n), random_spd(&mut r, n));
        let hc = harish_chandra(&x, &y, &pol()).unwrap();
        prop_assert!(hc.domain_margin() > 0.0);
        prop_assert!(hc.frame_gap() < 1e-9);
    }
}

#[test]
fn root_json_lists_every_root() {
    let rd = root_data(CartanKind::H, 2).unwrap();
    let v = rd.to_json();
    assert_eq!(v["roots"].as_array().unwrap().len(), 8);
    assert_eq!("t".parse::<CartanKind>().unwrap(), CartanKind::T);
    assert!("x".parse::<CartanKind>().is_err());
}
