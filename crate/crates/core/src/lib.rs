//! Computational linear symplectic geometry.
//!
//! The crate classifies subspaces of a symplectic vector space and complex
//! Lagrangian subspaces of its complexification by orbit type, builds adapted
//! Darboux bases, performs linear symplectic reduction, factors stabilizers
//! through Heisenberg groups, computes the retractions of noncompact orbits
//! onto their compact suborbits, and exposes the root data of `sp(2n, ℝ)`.
//!
//! Structural decisions (rank, signature, types) run on exact rationals or
//! Gaussian rationals. Anything needing square roots, exponentials or
//! iteration runs on `f64`/`C64` against a [`TolerancePolicy`].

pub mod error;
pub mod numeric;
pub mod sample;
pub mod space;
pub mod darboux;
pub mod lagrangian;
pub mod heisenberg;
pub mod orbit;
pub mod fibration;
pub mod lie;
pub mod demo;

pub use error::{Error, Result};
pub use numeric::{Backend, Mat, Matrix, TolerancePolicy, C64, Q, QI};
pub use space::{CompatibleJ, OrbitType, ReducedSpace, Subspace, SymplecticSpace};
