//! Seeded fixtures shared by the criterion benches.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use symplecta::lagrangian::ComplexLagrangian;
use symplecta::{sample, OrbitType, Subspace, TolerancePolicy, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Exact subspaces of mixed type in `ℝ^{2n}`.
pub fn subspaces(n: usize, count: usize, seed: u64) -> Vec<Subspace<symplecta::Q>> {
    let mut r = rng(seed);
    (0..count).map(|_| sample::random_subspace(&mut r, n)).collect()
}

/// Generic float subspaces of type `t`.
pub fn float_subspaces(t: OrbitType, count: usize, seed: u64) -> Vec<Subspace<f64>> {
    let mut r = rng(seed);
    (0..count).map(|_| sample::subspace_of_type(&mut r, t).to_f64()).collect()
}

/// `g · F_t` for random symplectic `g`.
pub fn lagrangians(t: OrbitType, count: usize, seed: u64) -> Vec<ComplexLagrangian<C64>> {
    let mut r = rng(seed);
    let pol = TolerancePolicy::default();
    (0..count)
        .map(|_| ComplexLagrangian::<C64>::basepoint(t).act(&sample::symplectic_f64(&mut r, t.n(), 0.5), &pol))
        .collect()
}
