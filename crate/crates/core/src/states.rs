//! Two-mode states as complex-weighted sums of exponential-quadratic terms in
//! the characteristic-function picture,
//!
//! ```text
//! chi(r) = sum_k w_k exp(-1/2 rᵀ Q_k r + L_kᵀ r),   chi(r) = Tr[rho exp(i rᵀ Ω r̂)].
//! ```
//!
//! Gaussian states and mixtures of them have real positive weights and purely
//! imaginary `L`; interference terms of superpositions (the cat-like state)
//! carry real `L` and negative weights. One representation covers both, so
//! the moment engine below is written once.

use nalgebra::{Matrix4, SymmetricEigen, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::numerics::{omega, C64};
use crate::tensor::{Tensor3, Tensor4};

pub type Vec4 = Vector4<f64>;
pub type Mat4 = Matrix4<f64>;
pub type CVec4 = Vector4<C64>;

/// Imaginary residue above which a moment signals an invalid state.
pub const MOMENT_IMAG_TOL: f64 = 1e-10;

const WEIGHT_SUM_TOL: f64 = 1e-12;
const HERMITICITY_TOL: f64 = 1e-10;

/// One term `weight * exp(-1/2 rᵀ Q r + Lᵀ r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpQuadTerm {
    weight: C64,
    quad: Mat4,
    lin: CVec4,
}

impl ExpQuadTerm {
    /// Validates that `quad` is symmetric and positive semidefinite.
    pub fn new(weight: C64, quad: Mat4, lin: CVec4) -> Result<Self> {
        if !weight.re.is_finite()
            || !weight.im.is_finite()
            || quad.iter().any(|v| !v.is_finite())
            || lin.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidArgument("term has non-finite entries".into()));
        }
        let asym = (quad - quad.transpose()).abs().max();
        if asym > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "quadratic form is not symmetric (deviation {asym:e})"
            )));
        }
        let quad = (quad + quad.transpose()) * 0.5;
        let min_eig = SymmetricEigen::new(quad).eigenvalues.min();
        if min_eig < -1e-12 {
            return Err(Error::InvalidArgument(format!(
                "quadratic form is not positive semidefinite (eigenvalue {min_eig:e})"
            )));
        }
        Ok(Self { weight, quad, lin })
    }

    pub fn weight(&self) -> C64 {
        self.weight
    }

    pub fn quad(&self) -> &Mat4 {
        &self.quad
    }

    pub fn lin(&self) -> &CVec4 {
        &self.lin
    }

    pub fn value(&self, r: &Vec4) -> C64 {
        self.weight * self.exponent(r).exp()
    }

    /// `-1/2 rᵀ Q r + Lᵀ r`.
    pub fn exponent(&self, r: &Vec4) -> C64 {
        let quad = -0.5 * (r.transpose() * self.quad * r)[0];
        let lin: C64 = (0..4).map(|i| self.lin[i] * r[i]).sum();
        lin + quad
    }

    /// Phase-space mean `iΩL` of this term (complex for interference terms).
    pub fn phase_space_mean(&self) -> CVec4 {
        let om = omega().map(|v| C64::new(0.0, v));
        om * self.lin
    }

    /// Phase-space covariance `Ω Q Ωᵀ` (symmetrised moments, `κ₂` convention).
    pub fn phase_space_covariance(&self) -> Mat4 {
        let om = omega();
        om * self.quad * om.transpose()
    }
}

/// A Gaussian component of a probability mixture in phase space.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianComponent {
    pub weight: f64,
    pub mean: Vec4,
    /// Covariance of the Wigner distribution, i.e. `σ / 2`.
    pub covariance: Mat4,
}

/// A two-mode state as an ordered list of exponential-quadratic terms.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureState {
    terms: Vec<ExpQuadTerm>,
}

impl MixtureState {
    /// Checks unit trace, `chi(-r) = conj(chi(r))` and `|chi| <= 1` on a fixed
    /// set of probe points.
    pub fn new(terms: Vec<ExpQuadTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidState("state has no terms".into()));
        }
        let state = Self { terms };
        let total: C64 = state.terms.iter().map(|t| t.weight).sum();
        if (total - 1.0).norm() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidState(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        for r in probe_points() {
            let plus = state.characteristic(&r);
            let minus = state.characteristic(&(-r));
            if (minus - plus.conj()).norm() > HERMITICITY_TOL {
                return Err(Error::InvalidState(format!(
                    "chi(-r) != conj(chi(r)) at r = {:?}",
                    r.as_slice()
                )));
            }
            if plus.norm() > 1.0 + HERMITICITY_TOL {
                return Err(Error::InvalidState(format!(
                    "|chi(r)| = {} exceeds 1 at r = {:?}",
                    plus.norm(),
                    r.as_slice()
                )));
            }
        }
        Ok(state)
    }

    /// A single Gaussian with phase-space `mean` and covariance matrix `sigma`
    /// in the anticommutator convention (vacuum: `sigma = I`).
    pub fn gaussian(mean: Vec4, sigma: Mat4) -> Result<Self> {
        Self::gaussian_mixture(&[(1.0, mean, sigma)])
    }

    /// Probability mixture of Gaussians, each given as `(weight, mean, sigma)`.
    pub fn gaussian_mixture(components: &[(f64, Vec4, Mat4)]) -> Result<Self> {
        let om = omega();
        let terms = components
            .iter()
            .map(|(w, mean, sigma)| {
                // C = Ω Q Ωᵀ = σ/2  =>  Q = Ωᵀ (σ/2) Ω;  iΩL = mean  =>  L = iΩ mean.
                let quad = om.transpose() * (sigma * 0.5) * om;
                let lin = (om * mean).map(|v| C64::new(0.0, v));
                ExpQuadTerm::new(C64::new(*w, 0.0), quad, lin)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(terms)
    }

    pub fn vacuum() -> Self {
        Self::gaussian(Vec4::zeros(), Mat4::identity()).expect("vacuum is valid")
    }

    pub fn terms(&self) -> &[ExpQuadTerm] {
        &self.terms
    }

    pub fn characteristic(&self, r: &Vec4) -> C64 {
        self.terms.iter().map(|t| t.value(r)).sum()
    }

    /// `ln chi(r)` without the cancellation of `ln(1 + x)` near the origin.
    ///
    /// With term exponents `e_k` and the weighted mean exponent `ē`,
    /// `chi = e^{ē} (W + Σ w_k expm1(e_k - ē))` where `W = Σ w_k = 1`, so the
    /// logarithm is `ē + ln1p(...)`. The phase is continuous in `r` rather than
    /// folded into `(-π, π]`. Returns `None` where `chi` vanishes.
    pub fn log_characteristic(&self, r: &Vec4) -> Option<C64> {
        let exps: Vec<C64> = self.terms.iter().map(|t| t.exponent(r)).collect();
        let total: C64 = self.terms.iter().map(|t| t.weight).sum();
        let e0 = self
            .terms
            .iter()
            .zip(&exps)
            .map(|(t, e)| t.weight * e)
            .sum::<C64>()
            / total;
        let mut z = total - 1.0;
        for (t, e) in self.terms.iter().zip(&exps) {
            z += t.weight * expm1(e - e0);
        }
        let one_plus = z + 1.0;
        if !(one_plus.norm() > 1e-300) || !z.re.is_finite() || !z.im.is_finite() {
            return None;
        }
        let re = 0.5 * (2.0 * z.re + z.norm_sqr()).ln_1p();
        let im = z.im.atan2(1.0 + z.re);
        Some(e0 + C64::new(re, im))
    }

    /// Probability-normalised Wigner function `(2π)^-4 ∫ chi(r) exp(i Xᵀ Ω r) d⁴r`,
    /// evaluated in closed form per term.
    pub fn wigner(&self, x: &Vec4) -> Result<f64> {
        let om = omega();
        let shift = (om.transpose() * x).map(|v| C64::new(0.0, v));
        let mut total = C64::new(0.0, 0.0);
        for t in &self.terms {
            let chol = t.quad.cholesky().ok_or_else(|| {
                Error::InvalidState(
                    "Wigner transform needs a positive-definite quadratic form".into(),
                )
            })?;
            let det = chol.determinant();
            let inv = chol.inverse().map(|v| C64::new(v, 0.0));
            let b = t.lin + shift;
            let expo = (b.transpose() * inv * b)[0] * 0.5;
            total += t.weight * expo.exp() / (4.0 * std::f64::consts::PI.powi(2) * det.sqrt());
        }
        if total.im.abs() > MOMENT_IMAG_TOL * total.re.abs().max(1.0) {
            return Err(Error::InvalidState(format!(
                "Wigner function has imaginary residue {:e}",
                total.im
            )));
        }
        Ok(total.re)
    }

    /// The state as real Gaussian components when it is a genuine probability
    /// mixture (positive weights, purely imaginary `L`).
    pub fn gaussian_components(&self) -> Result<Vec<GaussianComponent>> {
        self.terms
            .iter()
            .enumerate()
            .map(|(k, t)| {
                if t.weight.im.abs() > 1e-12 || t.weight.re <= 0.0 {
                    return Err(Error::NotProbabilityMixture(format!(
                        "term {k} has weight {}",
                        t.weight
                    )));
                }
                let scale = t.lin.iter().map(|z| z.norm()).fold(1.0, f64::max);
                if t.lin.iter().any(|z| z.re.abs() > 1e-12 * scale) {
                    return Err(Error::NotProbabilityMixture(format!(
                        "term {k} has a real linear coefficient"
                    )));
                }
                Ok(GaussianComponent {
                    weight: t.weight.re,
                    mean: t.phase_space_mean().map(|z| z.re),
                    covariance: t.phase_space_covariance(),
                })
            })
            .collect()
    }
}

/// `e^z - 1` accurate for small `|z|`.
fn expm1(z: C64) -> C64 {
    let half_sin = (0.5 * z.im).sin();
    let re = z.re.exp_m1() * z.im.cos() - 2.0 * half_sin * half_sin;
    C64::new(re, z.re.exp() * z.im.sin())
}

/// Deterministic probe points used for construction-time checks.
fn probe_points() -> Vec<Vec4> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    (0..16)
        .map(|_| Vec4::from_fn(|_, _| rng.random_range(-1.5..1.5)))
        .collect()
}

/// The two-mode cat-like state `(|α,α⟩ - |-α,-α⟩) / sqrt(2 - 2 exp(-4|α|²))`.
pub fn cat_state(alpha: C64) -> Result<MixtureState> {
    let a2 = alpha.norm_sqr();
    if !(a2 > 0.0) || !a2.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "cat state needs 0 < |alpha| < inf, got {alpha}"
        )));
    }
    let overlap = (-4.0 * a2).exp();
    let norm = -2.0 * (-4.0 * a2).exp_m1();
    let s2 = std::f64::consts::SQRT_2;
    let xi = Vec4::new(s2 * alpha.re, s2 * alpha.im, s2 * alpha.re, s2 * alpha.im);
    let om = omega();
    let quad = Mat4::identity() * 0.5;
    let rot = (om.transpose() * xi).map(|v| C64::new(0.0, v));
    let real = xi.map(|v| C64::new(v, 0.0));
    let coherent = C64::new(1.0 / norm, 0.0);
    let interference = C64::new(-overlap / norm, 0.0);
    MixtureState::new(vec![
        ExpQuadTerm::new(coherent, quad, rot)?,
        ExpQuadTerm::new(coherent, quad, -rot)?,
        ExpQuadTerm::new(interference, quad, real)?,
        ExpQuadTerm::new(interference, quad, -real)?,
    ])
}

/// Central Weyl-ordered moments up to fourth order.
///
/// `m2` uses the anticommutator convention `Tr[ρ{Δr_i, Δr_j}]`, so the vacuum
/// has `m2 = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSet {
    pub m1: Vec4,
    pub m2: Mat4,
    pub m3: Tensor3<f64>,
    pub m4: Tensor4<f64>,
}

impl MomentSet {
    /// Largest absolute entry-wise difference over all four orders.
    pub fn max_abs_diff(&self, other: &MomentSet) -> f64 {
        let d1 = (self.m1 - other.m1).abs().max();
        let d2 = (self.m2 - other.m2).abs().max();
        let d3 = (self.m3 - other.m3).max_abs();
        let d4 = (self.m4 - other.m4).max_abs();
        d1.max(d2).max(d3).max(d4)
    }
}

fn real_part(z: C64, what: &str) -> Result<f64> {
    if z.im.abs() > MOMENT_IMAG_TOL {
        return Err(Error::InvalidState(format!(
            "{what} has imaginary part {:e}",
            z.im
        )));
    }
    Ok(z.re)
}

/// Weyl-ordered central moments of `state` from the closed-form derivatives
/// of every exponential-quadratic term at the origin.
///
/// Each term behaves like a (possibly complex) Gaussian with mean `iΩL` and
/// covariance `ΩQΩᵀ`; its moments are summed with the term weights. The
/// shift to central moments is applied to the per-term means.
pub fn weyl_central_moments(state: &MixtureState) -> Result<MomentSet> {
    let parts: Vec<(C64, CVec4, Mat4)> = state
        .terms
        .iter()
        .map(|t| (t.weight, t.phase_space_mean(), t.phase_space_covariance()))
        .collect();

    let mean_c: CVec4 = parts.iter().map(|(w, mu, _)| mu * *w).sum();
    let mut m1 = Vec4::zeros();
    for i in 0..4 {
        m1[i] = real_part(mean_c[i], "first moment")?;
    }
    let shifted: Vec<(C64, CVec4, Mat4)> = parts
        .into_iter()
        .map(|(w, mu, c)| (w, mu - m1.map(|v| C64::new(v, 0.0)), c))
        .collect();

    let mut err: Option<Error> = None;
    let mut take = |z: C64, what: &str| match real_part(z, what) {
        Ok(v) => v,
        Err(e) => {
            err.get_or_insert(e);
            f64::NAN
        }
    };

    let mut m2 = Mat4::zeros();
    for a in 0..4 {
        for b in a..4 {
            let z: C64 = shifted
                .iter()
                .map(|(w, n, c)| *w * (n[a] * n[b] + c[(a, b)]))
                .sum();
            let v = 2.0 * take(z, "second moment");
            m2[(a, b)] = v;
            m2[(b, a)] = v;
        }
    }

    let m3 = Tensor3::symmetric(|a, b, c| {
        let z: C64 = shifted
            .iter()
            .map(|(w, n, cv)| {
                *w * (n[a] * n[b] * n[c]
                    + n[a] * cv[(b, c)]
                    + n[b] * cv[(a, c)]
                    + n[c] * cv[(a, b)])
            })
            .sum();
        take(z, "third moment")
    });

    let m4 = Tensor4::symmetric(|a, b, c, d| {
        let z: C64 = shifted
            .iter()
            .map(|(w, n, cv)| {
                let quartic = n[a] * n[b] * n[c] * n[d];
                let mixed = n[a] * n[b] * cv[(c, d)]
                    + n[a] * n[c] * cv[(b, d)]
                    + n[a] * n[d] * cv[(b, c)]
                    + n[b] * n[c] * cv[(a, d)]
                    + n[b] * n[d] * cv[(a, c)]
                    + n[c] * n[d] * cv[(a, b)];
                let pairs =
                    cv[(a, b)] * cv[(c, d)] + cv[(a, c)] * cv[(b, d)] + cv[(a, d)] * cv[(b, c)];
                *w * (quartic + mixed + pairs)
            })
            .sum();
        take(z, "fourth moment")
    });

    if let Some(e) = err {
        return Err(e);
    }
    Ok(MomentSet { m1, m2, m3, m4 })
}

/// Draws `n` phase-space points from the Wigner function of a genuine
/// Gaussian probability mixture. Deterministic in `seed`.
pub fn sample_wigner(state: &MixtureState, n: usize, seed: u64) -> Result<Vec<Vec4>> {
    let comps = state.gaussian_components()?;
    let chols = comps
        .iter()
        .map(|c| {
            c.covariance.cholesky().map(|ch| ch.l()).ok_or_else(|| {
                Error::InvalidState("component covariance is not positive definite".into())
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let total: f64 = comps.iter().map(|c| c.weight).sum();
    let mut cumulative = Vec::with_capacity(comps.len());
    let mut acc = 0.0;
    for c in &comps {
        acc += c.weight / total;
        cumulative.push(acc);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let u: f64 = rng.random();
        let k = cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(comps.len() - 1);
        let z = Vec4::from_fn(|_, _| rng.sample(StandardNormal));
        out.push(comps[k].mean + chols[k] * z);
    }
    Ok(out)
}
