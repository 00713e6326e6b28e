//! Parallel orbit sweeps. Results come back in input order, so the output
//! does not depend on the number of workers.

use billiard_core::orbits::{minimize_action, spectrum_rotations, OrbitOptions, SpectrumEntry};
use billiard_core::BoundaryCurve;
use rayon::prelude::*;

pub fn pool(jobs: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(jobs).build().expect("thread pool")
}

/// Minimizing orbits for every listed rotation number.
pub fn orbits(pool: &rayon::ThreadPool, curve: &BoundaryCurve, rotations: &[(i64, i64)], options: &OrbitOptions) -> Vec<SpectrumEntry> {
    pool.install(|| {
        rotations
            .par_iter()
            .map(|&(p, q)| SpectrumEntry { p, q, result: minimize_action(curve, p, q, None, options) })
            .collect()
    })
}

/// The marked length spectrum up to `q_max`.
pub fn spectrum(pool: &rayon::ThreadPool, curve: &BoundaryCurve, q_max: i64) -> Vec<SpectrumEntry> {
    orbits(pool, curve, &spectrum_rotations(q_max), &OrbitOptions::default())
}

/// Rotations `1/q` for `q = 3..=q_max`, the samples of the β fit.
pub fn fit_rotations(q_max: i64) -> Vec<(i64, i64)> {
    (3..=q_max).map(|q| (1, q)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use billiard_core::orbits::marked_length_spectrum;
    use billiard_core::CurvatureProfile;

    #[test]
    fn parallel_matches_sequential() {
        let c = BoundaryCurve::build(&CurvatureProfile::ellipse(0.6).unwrap(), 256).unwrap();
        let seq = marked_length_spectrum(&c, 8, &OrbitOptions::default());
        for jobs in [1, 3] {
            assert_eq!(spectrum(&pool(jobs), &c, 8), seq);
        }
    }
}
