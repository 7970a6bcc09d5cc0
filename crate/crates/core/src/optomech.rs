//! Two gravitating mirrors, each pushed by the photon number of its own
//! cavity prepared in a single-photon superposition.
//!
//! Conditioned on the photon numbers `(k, l) ∈ {0,1}²`, the mirrors evolve as
//! a displaced Gaussian; tracing out the photons leaves an equal-weight
//! mixture of four Gaussians. Working units are dimensionless: `H` carries
//! `Ω_m`, and times enter only through `Ω_m t`.

use nalgebra::Vector4;

use crate::criterion::BoundComponent;
use crate::cumulants::PartialTransposeMap;
use crate::error::{Error, Result};
use crate::numerics::{matrix_exponential, omega, symplectic_defect, C64};
use crate::states::{ExpQuadTerm, Mat4, MixtureState, Vec4};

const SYMPLECTIC_DEFECT_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptomechParams {
    /// Gravitational coupling `G m / (Ω_m² h³)`.
    pub g: f64,
    /// Mirror-photon coupling.
    pub lambda: f64,
    pub omega_m: f64,
    /// Initial coherent displacement `r'` in `exp(i r'ᵀ Ω r̂) |0,0⟩`.
    pub rprime: Vec4,
}

impl OptomechParams {
    pub fn new(g: f64, lambda: f64) -> Self {
        Self {
            g,
            lambda,
            omega_m: 1.0,
            rprime: Vec4::zeros(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.g.is_finite()
            && self.lambda.is_finite()
            && self.omega_m.is_finite()
            && self.rprime.iter().all(|v| v.is_finite());
        if !finite || self.g < 0.0 || self.lambda < 0.0 || self.omega_m <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "need finite g >= 0, lambda >= 0, omega_m > 0; got g = {}, lambda = {}, omega_m = {}",
                self.g, self.lambda, self.omega_m
            )));
        }
        Ok(())
    }
}

/// Physical inputs for [`couplings_from_physical`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalSetup {
    pub mass: f64,
    pub separation: f64,
    pub omega_m: f64,
    pub omega_p: f64,
    pub cavity_length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    pub gravitational: f64,
    pub hbar: f64,
}

impl Constants {
    pub const SI: Constants = Constants {
        gravitational: 6.674_30e-11,
        hbar: 1.054_571_817e-34,
    };
}

/// Dimensionless `(g, Λ)`:
/// `g = G m / (Ω_m² h³)`, `Λ = ω_p / (Ω_m l) · sqrt(ħ / (2 m Ω_m))`.
pub fn couplings_from_physical(p: &PhysicalSetup, c: &Constants) -> Result<(f64, f64)> {
    let inputs = [
        p.mass,
        p.separation,
        p.omega_m,
        p.omega_p,
        p.cavity_length,
        c.gravitational,
        c.hbar,
    ];
    if inputs.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::InvalidArgument(
            "all physical inputs must be finite and strictly positive".into(),
        ));
    }
    let g = c.gravitational * p.mass / (p.omega_m.powi(2) * p.separation.powi(3));
    let lambda =
        p.omega_p / (p.omega_m * p.cavity_length) * (c.hbar / (2.0 * p.mass * p.omega_m)).sqrt();
    Ok((g, lambda))
}

/// Quadratic mirror Hamiltonian matrix, `Ĥ = ½ r̂ᵀ H r̂` in units of ħ.
pub fn hamiltonian_matrix(g: f64, omega_m: f64) -> Result<Mat4> {
    if !(g > -1.0) || !g.is_finite() || !omega_m.is_finite() {
        return Err(Error::InvalidArgument(format!("need g > -1, got {g}")));
    }
    let s = (1.0 + g).sqrt();
    let c = -g / s;
    #[rustfmt::skip]
    let h = Mat4::new(
        s,   0.0, c,   0.0,
        0.0, s,   0.0, 0.0,
        c,   0.0, s,   0.0,
        0.0, 0.0, 0.0, s,
    );
    Ok(h * omega_m)
}

/// Photon-number drive on the mirror positions for photon numbers `(k, l)`.
pub fn drive(p: &OptomechParams, k: usize, l: usize) -> Vec4 {
    let amp = p.lambda * p.omega_m * (1.0 + p.g).powf(-0.25);
    Vector4::new(k as f64 * amp, 0.0, l as f64 * amp, 0.0)
}

/// Per-branch data for the mirror state at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct MirrorComponents {
    /// Photon-number labels in the order `00, 01, 10, 11`.
    pub labels: [(usize, usize); 4],
    pub drives: [Vec4; 4],
    /// `H⁻¹ (1 - e^{-tHΩ}) j`.
    pub displaced_drives: [Vec4; 4],
    /// Wigner centres `-S (j' + r')`.
    pub means: [Vec4; 4],
    /// Shared quadratic form `½ S⁻ᵀ S⁻¹` of every branch.
    pub quad: Mat4,
    /// `S = e^{ΩHt}`.
    pub s_matrix: Mat4,
}

impl MirrorComponents {
    /// Shared covariance matrix `S Sᵀ` (anticommutator convention).
    pub fn sigma(&self) -> Mat4 {
        self.s_matrix * self.s_matrix.transpose()
    }

    pub fn global_mean(&self) -> Vec4 {
        self.means.iter().sum::<Vec4>() / 4.0
    }

    /// Partially transposed components for the component-wise lower bound.
    /// The covariance is taken from the shared quadratic form.
    pub fn bound_components(&self) -> (Vec<BoundComponent>, Vec4) {
        let pt = PartialTransposeMap::new();
        let om = omega();
        // σ = 2 Ω Q Ωᵀ.
        let sigma = om * self.quad * om.transpose() * 2.0;
        let sigma_pt = pt.t * sigma * pt.t;
        let comps = self
            .means
            .iter()
            .map(|m| BoundComponent {
                weight: 0.25,
                mean: pt.t * m,
                sigma: sigma_pt,
            })
            .collect();
        (comps, pt.t * self.global_mean())
    }
}

/// The reduced mirror state at time `t` and its Gaussian branches.
pub fn evolve_mirrors(p: &OptomechParams, t: f64) -> Result<(MixtureState, MirrorComponents)> {
    p.validate()?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "time must be finite and >= 0, got {t}"
        )));
    }
    let h = hamiltonian_matrix(p.g, p.omega_m)?;
    let om = omega();
    let s = matrix_exponential(&(om * h * t))?;
    let defect = symplectic_defect(&s)?;
    if defect > SYMPLECTIC_DEFECT_LIMIT {
        return Err(Error::Numeric(format!(
            "evolution matrix is not symplectic (defect {defect:e})"
        )));
    }
    let back = matrix_exponential(&(-(h * om) * t))?;
    let h_inv = h
        .try_inverse()
        .ok_or_else(|| Error::Numeric("Hamiltonian matrix is singular".into()))?;
    let s_inv = s
        .try_inverse()
        .ok_or_else(|| Error::Numeric("evolution matrix is singular".into()))?;
    let quad = s_inv.transpose() * s_inv * 0.5;
    let quad = (quad + quad.transpose()) * 0.5;

    let labels = [(0, 0), (0, 1), (1, 0), (1, 1)];
    let drives = labels.map(|(k, l)| drive(p, k, l));
    let displaced_drives = drives.map(|j| h_inv * (Mat4::identity() - back) * j);
    let shifted = displaced_drives.map(|jp| s * (jp + p.rprime));
    let means = shifted.map(|v| -v);

    let terms = shifted
        .iter()
        .map(|v| {
            let lin = (om * v).map(|x| C64::new(0.0, -x));
            ExpQuadTerm::new(C64::new(0.25, 0.0), quad, lin)
        })
        .collect::<Result<Vec<_>>>()?;
    let state = MixtureState::new(terms)?;
    Ok((
        state,
        MirrorComponents {
            labels,
            drives,
            displaced_drives,
            means,
            quad,
            s_matrix: s,
        },
    ))
}

/// Pair order of [`center_distances`].
pub const DISTANCE_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// `|X_a - X_b| / sqrt(tr(S⁻ᵀ S⁻¹))` for all six pairs of Wigner centres,
/// in the order `00-01, 00-10, 00-11, 01-10, 01-11, 10-11`.
pub fn center_distances(p: &OptomechParams, t: f64) -> Result<[f64; 6]> {
    let (_, comps) = evolve_mirrors(p, t)?;
    Ok(distances_of(&comps))
}

pub fn distances_of(comps: &MirrorComponents) -> [f64; 6] {
    let spread = (comps.quad * 2.0).trace().sqrt();
    DISTANCE_PAIRS.map(|(a, b)| (comps.means[a] - comps.means[b]).norm() / spread)
}
