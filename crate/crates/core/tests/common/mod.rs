#![allow(dead_code)]

use cvwitness::numerics::{matrix_exponential, omega, C64};
use cvwitness::states::{Mat4, MixtureState, Vec4};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    linspace(a.ln(), b.ln(), n)
        .into_iter()
        .map(f64::exp)
        .collect()
}

/// Least-squares slope of `ln|y|` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.abs().ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// `exp(Ω H)` for a random symmetric `H` with entries in `[-scale, scale]`.
pub fn random_symplectic(rng: &mut ChaCha8Rng, scale: f64) -> Mat4 {
    let mut h = Mat4::zeros();
    for i in 0..4 {
        for j in i..4 {
            let v = rng.random_range(-scale..scale);
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    matrix_exponential(&(omega() * h)).unwrap()
}

/// Mean in `[-1, 1]⁴` and a thermal-squeezed covariance `ν S Sᵀ`, `ν ≥ 1`.
pub fn random_gaussian(rng: &mut ChaCha8Rng) -> (Vec4, Mat4) {
    let s = random_symplectic(rng, 0.4);
    let nu = rng.random_range(1.0..1.5);
    let mean = Vec4::from_fn(|_, _| rng.random_range(-1.0..1.0));
    (mean, s * s.transpose() * nu)
}

pub fn random_mixture(rng: &mut ChaCha8Rng, n: usize) -> MixtureState {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let comps: Vec<(f64, Vec4, Mat4)> = raw
        .iter()
        .map(|w| {
            let (m, s) = random_gaussian(rng);
            (w / total, m, s)
        })
        .collect();
    MixtureState::gaussian_mixture(&comps).unwrap()
}

pub fn real_alpha(a: f64) -> C64 {
    C64::new(a, 0.0)
}
