//! Points of `ℙ¹(ℂ)` classified as complex Lagrangians of `ℂ²`: the upper
//! hemisphere is `(0,1,0)`, the real equator `(1,0,0)`, the lower hemisphere
//! `(0,0,1)`.

use crate::error::{Error, Result};
use crate::lagrangian::ComplexLagrangian;
use crate::numeric::{Mat, TolerancePolicy, C64};
use crate::space::OrbitType;
use rand::Rng;
use rand_distr::StandardNormal;

#[derive(Clone, Debug, PartialEq)]
pub struct SpherePoint {
    pub q: C64,
    pub p: C64,
    /// `κ = 2·Im(q p̄)`.
    pub kappa: f64,
    pub lag_type: OrbitType,
}

impl SpherePoint {
    pub fn classify(q: C64, p: C64, pol: &TolerancePolicy) -> Result<Self> {
        let f = ComplexLagrangian::new(Mat::from_vec(2, 1, vec![q, p]), pol)?;
        Ok(SpherePoint { q, p, kappa: 2.0 * (q * p.conj()).im, lag_type: f.lag_type(pol) })
    }

    pub const CSV_HEADER: &'static str = "q_re,q_im,p_re,p_im,type";

    /// The type field is quoted since it contains commas.
    pub fn csv_row(&self) -> String {
        let t = self.lag_type;
        format!("{},{},{},{},\"({},{},{})\"", self.q.re, self.q.im, self.p.re, self.p.im, t.n0, t.nplus, t.nminus)
    }

    /// Inverse of [`csv_row`](Self::csv_row). The point is reclassified and
    /// must agree with the recorded type.
    pub fn from_csv_row(line: &str, pol: &TolerancePolicy) -> Result<Self> {
        let bad = || Error::Parse(format!("malformed sphere row '{line}'"));
        let (nums, ty) = line.trim().split_once(",\"").ok_or_else(bad)?;
        let x: Vec<f64> = nums.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?;
        let t: Vec<usize> = ty
            .trim_end_matches('"')
            .trim_start_matches('(')
            .trim_end_matches(')')
            .split(',')
            .map(|s| s.trim().parse().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        if x.len() != 4 || t.len() != 3 {
            return Err(bad());
        }
        let pt = SpherePoint::classify(C64::new(x[0], x[1]), C64::new(x[2], x[3]), pol)?;
        if pt.lag_type != OrbitType::new(t[0], t[1], t[2]) {
            return Err(Error::Invariant(format!("row records type {:?}, point has type {}", t, pt.lag_type)));
        }
        Ok(pt)
    }
}

/// `samples` points uniform on `ℙ¹` (normalized complex Gaussian pairs).
pub fn sphere_demo<G: Rng + ?Sized>(rng: &mut G, samples: usize, pol: &TolerancePolicy) -> Result<Vec<SpherePoint>> {
    if samples == 0 {
        return Err(Error::Precondition("samples must be positive".into()));
    }
    (0..samples)
        .map(|_| {
            let mut g = || C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            let (q, p) = (g(), g());
            let r = (q.norm_sqr() + p.norm_sqr()).sqrt();
            SpherePoint::classify(q / r, p / r, pol)
        })
        .collect()
}

/// `k` equally spaced real lines `[cos θ : sin θ]`, `θ ∈ [0, π)`.
pub fn equator_sweep(k: usize, pol: &TolerancePolicy) -> Result<Vec<SpherePoint>> {
    (0..k)
        .map(|j| {
            let th = std::f64::consts::PI * j as f64 / k as f64;
            SpherePoint::classify(C64::new(th.cos(), 0.0), C64::new(th.sin(), 0.0), pol)
        })
        .collect()
}

/// Counts of `(upper, equator, lower)`.
pub fn hemisphere_counts(points: &[SpherePoint]) -> (usize, usize, usize) {
    points.iter().fold((0, 0, 0), |(u, e, l), s| match (s.lag_type.nplus, s.lag_type.nminus) {
        (1, 0) => (u + 1, e, l),
        (0, 1) => (u, e, l + 1),
        _ => (u, e + 1, l),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn sign_of_kappa_decides() {
        let pol = TolerancePolicy::default();
        let pts = sphere_demo(&mut rand::rngs::StdRng::seed_from_u64(1), 200, &pol).unwrap();
        for s in &pts {
            assert_eq!(s.lag_type.nplus == 1, s.kappa > 0.0);
        }
        assert!(sphere_demo(&mut rand::rngs::StdRng::seed_from_u64(1), 0, &pol).is_err());
        let eq = equator_sweep(8, &pol).unwrap();
        assert!(eq.iter().all(|s| s.lag_type == OrbitType::new(1, 0, 0)));
        for s in pts.iter().chain(&eq) {
            assert_eq!(SpherePoint::from_csv_row(&s.csv_row(), &pol).unwrap(), *s);
        }
    }
}
