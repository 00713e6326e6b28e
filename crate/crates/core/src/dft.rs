use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;
use num_traits::Float;

/// Harmonics `k = -K..=K` of uniformly spaced periodic samples,
/// `ĉₖ = (1/M) Σⱼ fⱼ e^{-2πikj/M}`, returned in index order `k + K`.
pub(crate) fn harmonics_of_samples(samples: &[Complex64], harmonics: usize) -> Vec<Complex64> {
    let m = samples.len();
    let twiddle: Vec<Complex64> = (0..m)
        .map(|j| {
            let (s, c) = (TAU * j as f64 / m as f64).sin_cos();
            Complex64::new(c, -s)
        })
        .collect();
    let kk = harmonics as i64;
    (-kk..=kk)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, f) in samples.iter().enumerate() {
                let idx = (k * j as i64).rem_euclid(m as i64) as usize;
                acc += f * twiddle[idx];
            }
            acc / m as f64
        })
        .collect()
}

/// Cosine and sine coefficients `(a₀, a₁…, b₁…)` of real periodic samples on
/// `[0, 2π)` so that `f(φ) ≈ a₀ + Σ aₖ cos kφ + bₖ sin kφ`.
pub(crate) fn trig_coefficients(samples: &[f64], harmonics: usize) -> (Vec<f64>, Vec<f64>) {
    let as_complex: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let c = harmonics_of_samples(&as_complex, harmonics);
    let mid = harmonics;
    let mut cos = Vec::with_capacity(harmonics + 1);
    let mut sin = Vec::with_capacity(harmonics);
    cos.push(c[mid].re);
    for k in 1..=harmonics {
        let ck = c[mid + k];
        cos.push(2.0 * ck.re);
        sin.push(-2.0 * ck.im);
    }
    (cos, sin)
}
