use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symplecta::darboux::{darboux_extend, transporter, verify_adapted, DarbouxBasis};
use symplecta::heisenberg::{heisenberg_dim, HeisenbergElement, HeisenbergForm};
use symplecta::lagrangian::{adapted_basis_lagrangian, ComplexLagrangian, SplitLagrangian};
use symplecta::numeric::{polar_decompose, rank, span_eq};
use symplecta::orbit::{incidence, OrbitKind};
use symplecta::sample;
use symplecta::{Mat, OrbitType, Subspace, SymplecticSpace, TolerancePolicy, C64, Q, QI};

fn pol() -> TolerancePolicy {
    TolerancePolicy::default()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn q(x: i64) -> Q {
    Q::from_integer(x.into())
}

fn invertible_gaussian(r: &mut ChaCha8Rng, n: usize) -> Mat<QI> {
    loop {
        let m = sample::gaussian_matrix(r, n, n, 2);
        if rank(&m, &pol()) == n {
            return m;
        }
    }
}

fn random_heisenberg(r: &mut ChaCha8Rng, t: OrbitType) -> HeisenbergElement<Q> {
    let k = t.nplus + t.nminus;
    let lambda = sample::int_matrix::<Q, _>(r, t.n0, k, 3);
    let mu = sample::int_matrix::<Q, _>(r, t.n0, k, 3);
    let s = sample::symmetric_int::<Q, _>(r, t.n0, 3);
    let x = s.add(&lambda.mul(&mu.transpose())).neg();
    HeisenbergElement::from_ziegler(t, &lambda, &mu, &x, &pol()).unwrap()
}

fn commutator(a: &HeisenbergElement<Q>, b: &HeisenbergElement<Q>) -> HeisenbergElement<Q> {
    let p = pol();
    a.compose(b, &p).unwrap().compose(&a.inverse(&p).unwrap(), &p).unwrap().compose(&b.inverse(&p).unwrap(), &p).unwrap()
}

/// Elements with a single unit entry in λ or μ.
fn unit_generators(t: OrbitType) -> Vec<HeisenbergElement<Q>> {
    let k = t.nplus + t.nminus;
    let mut out = Vec::new();
    for a in 0..t.n0 {
        for b in 0..k {
            let mut e = Mat::<Q>::zeros(t.n0, k);
            e[(a, b)] = q(1);
            let z = Mat::<Q>::zeros(t.n0, k);
            let x0 = Mat::<Q>::zeros(t.n0, t.n0);
            out.push(HeisenbergElement::from_ziegler(t, &e, &z, &x0, &pol()).unwrap());
            out.push(HeisenbergElement::from_ziegler(t, &z, &e, &x0, &pol()).unwrap());
        }
    }
    out
}

#[test]
fn coordinate_subspaces_realize_every_type() {
    for n in 1..=4 {
        let space = SymplecticSpace::standard(n);
        for l in 0..=2 * n {
            let mut seen = std::collections::BTreeSet::new();
            // every subset of {e_1..e_n, f_1..f_n} of size l
            for mask in 0u32..(1 << (2 * n)) {
                if mask.count_ones() as usize != l {
                    continue;
                }
                let idx: Vec<usize> = (0..2 * n).filter(|&i| mask & (1 << i) != 0).collect();
                let t = Subspace::<Q>::coordinate(&space, &idx).subspace_type(&pol());
                seen.insert((t.n0, t.nplus, t.nminus));
            }
            let want: std::collections::BTreeSet<_> =
                OrbitType::all(n).into_iter().filter(|t| t.subspace_dim() == l).map(|t| (t.n0, t.nplus, t.nminus)).collect();
            assert_eq!(seen, want, "n = {n}, l = {l}");
        }
    }
}

#[test]
fn incidence_is_a_partial_order() {
    for n in 1..=3 {
        for kind in [OrbitKind::Gr, OrbitKind::Lag] {
            let ts: Vec<OrbitType> = OrbitType::all(n);
            let rel = |a: OrbitType, b: OrbitType| incidence(kind, a, b).ok() == Some(true);
            for &a in &ts {
                assert!(rel(a, a));
                for &b in &ts {
                    if a != b && rel(a, b) {
                        assert!(!rel(b, a), "{a} and {b} contain each other");
                    }
                    for &c in &ts {
                        if rel(a, b) && rel(b, c) {
                            assert!(rel(a, c), "{a} ≥ {b} ≥ {c} but not {a} ≥ {c}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn heisenberg_dim_is_parameter_count() {
    for n in 1..=5 {
        for t in OrbitType::all(n) {
            assert_eq!(heisenberg_dim(t), HeisenbergElement::<Q>::identity(t).parameters().len(), "type {t}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn complement_swaps_plus_and_minus(seed in any::<u64>(), n in 1usize..=4) {
        let w = sample::random_subspace(&mut rng(seed), n);
        let t = w.subspace_type(&pol());
        let c = w.symplectic_complement(&pol());
        let tc = c.subspace_type(&pol());
        prop_assert_eq!(tc, OrbitType::new(t.n0, t.nminus, t.nplus));
        prop_assert_eq!(c.dim(), 2 * n - w.dim());
        prop_assert!(c.symplectic_complement(&pol()).same_span(&w, &pol()));
    }

    #[test]
    fn type_is_symplectic_invariant(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = rng(seed);
        let w = sample::random_subspace(&mut r, n);
        let g = sample::symplectic_int::<Q, _>(&mut r, n);
        prop_assert_eq!(w.transform(&g).subspace_type(&pol()), w.subspace_type(&pol()));
    }

    #[test]
    fn float_rank_is_stable_under_small_noise(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let w = sample::random_subspace(&mut r, n);
        let wf = w.to_f64();
        let eps = pol().rank_tol / 10.0;
        let b0 = wf.basis();
        let b = Mat::from_vec(b0.rows(), b0.cols(), b0.data().iter().map(|v| v + r.random_range(-eps..eps)).collect());
        let noisy = Subspace::new(wf.space(), b, &pol()).unwrap();
        prop_assert_eq!(noisy.subspace_type(&pol()), w.subspace_type(&pol()));
    }

    #[test]
    fn exact_results_are_reproducible(seed in any::<u64>(), n in 1usize..=3) {
        let w = sample::random_subspace(&mut rng(seed), n);
        let w2 = sample::random_subspace(&mut rng(seed), n);
        prop_assert_eq!(&w, &w2);
        prop_assert_eq!(darboux_extend(&w, None, &pol()).unwrap(), darboux_extend(&w2, None, &pol()).unwrap());
        prop_assert_eq!(w.canonical(&pol()), w2.canonical(&pol()));
    }

    #[test]
    fn polar_factors_of_symplectic_stay_symplectic(seed in any::<u64>(), n in 1usize..=3) {
        let space = SymplecticSpace::standard(n);
        let g = sample::symplectic_f64(&mut rng(seed), n, 0.6);
        let (u, p) = polar_decompose(&g, &pol()).unwrap();
        prop_assert!(space.is_symplectic(&u, &pol()));
        prop_assert!(space.in_algebra(&p, &pol()));
    }

    #[test]
    fn darboux_basis_is_exact_and_adapted(seed in any::<u64>(), n in 1usize..=4) {
        let w = sample::random_subspace(&mut rng(seed), n);
        let b = darboux_extend(&w, None, &pol()).unwrap();
        let omega = w.space().omega_q().clone();
        prop_assert_eq!(b.vectors().transpose().mul(&omega).mul(b.vectors()), omega);
        prop_assert_eq!(b.labels(), w.subspace_type(&pol()));
        prop_assert!(verify_adapted(&w, &b, None, &pol()));
    }

    #[test]
    fn transporters_compose(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let t = sample::orbit_type(&mut r, n);
        let (w1, w2, w3) = (sample::subspace_of_type(&mut r, t), sample::subspace_of_type(&mut r, t), sample::subspace_of_type(&mut r, t));
        let g12 = transporter(&w1, &w2, &pol()).unwrap();
        let g23 = transporter(&w2, &w3, &pol()).unwrap();
        prop_assert!(w1.transform(&g12).same_span(&w2, &pol()));
        prop_assert!(w1.transform(&g23.mul(&g12)).same_span(&w3, &pol()));
        prop_assert!(w1.space().is_symplectic(&g23.mul(&g12), &pol()));
    }

    #[test]
    fn lag_type_ignores_frame_choice_and_symplectic_moves(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let t = sample::orbit_type(&mut r, n);
        let g = sample::symplectic_int::<Q, _>(&mut r, n);
        let f = ComplexLagrangian::<QI>::basepoint(t).act(&g, &pol());
        prop_assert_eq!(f.lag_type(&pol()), t);
        let a = invertible_gaussian(&mut r, n);
        let f2 = ComplexLagrangian::new(f.frame().mul(&a), &pol()).unwrap();
        prop_assert_eq!(f2.lag_type(&pol()), t);
        prop_assert!(f2.same_span(&f, &pol()));
        prop_assert_eq!(f.conj(&pol()).lag_type(&pol()), OrbitType::new(t.n0, t.nminus, t.nplus));
    }

    #[test]
    fn complexified_real_lagrangians_are_real_type(seed in any::<u64>(), n in 1usize..=4) {
        let l = sample::subspace_of_type(&mut rng(seed), OrbitType::new(n, 0, 0));
        let f = ComplexLagrangian::<QI>::complexify(&l, &pol()).unwrap();
        prop_assert_eq!(f.lag_type(&pol()), OrbitType::new(n, 0, 0));
    }

    #[test]
    fn adapted_basis_reconstructs_the_lagrangian(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let t = sample::orbit_type(&mut r, n);
        let g = sample::symplectic_f64(&mut r, n, 0.5);
        let f = ComplexLagrangian::<C64>::basepoint(t).act(&g, &pol());
        let b = adapted_basis_lagrangian(&f, &pol()).unwrap();
        prop_assert!(b.is_darboux(&SymplecticSpace::standard(n), &pol()));
        prop_assert_eq!(b.labels(), t);
        let i = C64::new(0.0, 1.0);
        let f0 = b.e0().complexify();
        let fp = b.eplus().complexify().sub(&b.fplus().complexify().scale(&i));
        let fm = b.eminus().complexify().add(&b.fminus().complexify().scale(&i));
        let rebuilt = Mat::hstack_all(&[&f0, &fp, &fm], 2 * n);
        prop_assert!(span_eq(&rebuilt, f.frame(), &pol()));
    }

    #[test]
    fn json_round_trips(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let w = sample::random_subspace(&mut r, n);
        prop_assert_eq!(Subspace::<Q>::from_json(&w.to_json(), &pol()).unwrap(), w.clone());
        let wf = w.to_f64();
        prop_assert!(Subspace::<f64>::from_json(&wf.to_json(), &pol()).unwrap().same_span(&wf, &pol()));

        let t = sample::orbit_type(&mut r, n);
        let g = sample::symplectic_int::<Q, _>(&mut r, n);
        let f = ComplexLagrangian::<QI>::basepoint(t).act(&g, &pol());
        prop_assert_eq!(ComplexLagrangian::<QI>::from_json(&f.to_json(), &pol()).unwrap(), f);
        let s = SplitLagrangian::<QI>::basepoint(t).act(&g);
        prop_assert!(SplitLagrangian::<QI>::from_json(&s.to_json(), &pol()).unwrap().same_as(&s, &pol()));

        let b: DarbouxBasis<Q> = darboux_extend(&w, None, &pol()).unwrap();
        let v = b.to_json();
        prop_assert_eq!(serde_json::from_value::<OrbitType>(v["type"].clone()).unwrap(), b.labels());
        prop_assert_eq!(symplecta::Matrix::from_json(&v["vectors"]).unwrap(), symplecta::Matrix::Rational(b.vectors().clone()));

        let h = random_heisenberg(&mut r, t);
        prop_assert_eq!(HeisenbergElement::<Q>::from_json(&h.to_json(), &pol()).unwrap(), h);
    }

    #[test]
    fn heisenberg_group_law(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = rng(seed);
        let t = sample::orbit_type(&mut r, n);
        let (a, b) = (random_heisenberg(&mut r, t), random_heisenberg(&mut r, t));
        let f = HeisenbergForm::Darboux;
        let ab = a.compose(&b, &pol()).unwrap();
        prop_assert_eq!(ab.to_matrix(f), a.to_matrix(f).mul(&b.to_matrix(f)));
        prop_assert_eq!(a.compose(&a.inverse(&pol()).unwrap(), &pol()).unwrap(), HeisenbergElement::identity(t));
        let omega = SymplecticSpace::standard(n).omega_q().clone();
        let m = ab.to_matrix(f);
        prop_assert_eq!(m.transpose().mul(&omega).mul(&m), omega);
        for form in [HeisenbergForm::Triangular, HeisenbergForm::Ziegler] {
            prop_assert_eq!(HeisenbergElement::from_matrix(t, &ab.to_matrix(form), form, &pol()).unwrap(), ab.clone());
        }
    }

    #[test]
    fn heisenberg_is_two_step_nilpotent(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = rng(seed);
        let t = sample::orbit_type(&mut r, n);
        let hs: Vec<_> = (0..4).map(|_| random_heisenberg(&mut r, t)).collect();
        let c = commutator(&hs[0], &hs[1]);
        prop_assert!(c.is_central());
        let id = HeisenbergElement::identity(t);
        prop_assert_eq!(commutator(&commutator(&c, &hs[2]), &hs[3]), id.clone());
        prop_assert_eq!(commutator(&c, &hs[2]), id);
    }

    #[test]
    fn center_is_the_y_part(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = rng(seed);
        let t = sample::orbit_type(&mut r, n);
        let id = HeisenbergElement::identity(t);
        let gens = unit_generators(t);
        let z = HeisenbergElement::central(t, sample::symmetric_int::<Q, _>(&mut r, t.n0, 3), &pol()).unwrap();
        prop_assert!(gens.iter().all(|g| commutator(&z, g) == id));
        let h = random_heisenberg(&mut r, t);
        let commutes = gens.iter().all(|g| commutator(&h, g) == id);
        let ef_zero = [&h.eplus, &h.eminus, &h.fplus, &h.fminus].iter().all(|m| m.data().iter().all(|x| *x == q(0)));
        prop_assert_eq!(commutes, ef_zero);
    }
}
