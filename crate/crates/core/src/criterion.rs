//! Witness matrices for the test operator
//! `f = z_i Δr_i + ζ_ij Δr_i Δr_j` and their minimum eigenvalues.
//!
//! `Tr[ρ^{T_B} f†f] = (z, ζ)† M (z, ζ)` with `M = [[A, B], [B†, D]]`; a
//! negative eigenvalue of `M` certifies entanglement. `ζ` runs over all 16
//! ordered pairs `(i, j)` in row-major order, because `Δr_i Δr_j` and
//! `Δr_j Δr_i` are different operators.

use nalgebra::{DMatrix, Matrix4};

use crate::cumulants::cumulants_from_moments;
use crate::cumulants::{partial_transpose, CumulantSet};
use crate::error::{Error, Result};
use crate::numerics::{omega, HermMat, C64};
use crate::states::{weyl_central_moments, Mat4, MixtureState, Vec4};
use crate::tensor::{Tensor3, Tensor4};

/// Default threshold below which an eigenvalue counts as a violation.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Position of `ζ_ij` inside the 16-dimensional quadratic block.
#[inline]
pub fn pair_index(i: usize, j: usize) -> usize {
    4 * i + j
}

#[derive(Debug, Clone)]
pub struct CriterionMatrices {
    /// 4x4 second-order block, `A_ij = (σ^{T_B}_ij + iΩ_ij) / 2`.
    pub a: HermMat,
    /// 4x16 block `B_{i,jk} = κ₃^{T_B}_{ijk}`.
    pub b: DMatrix<C64>,
    /// 16x16 block `D_{ij,kl} = κ₄^{T_B}_{ijkl} + A*_ij A_kl + A_ik A_jl + A_il A_jk`.
    pub d: HermMat,
    /// The assembled 20x20 matrix.
    pub m: HermMat,
}

/// `A = (σ + iΩ) / 2` for a (partially transposed) covariance matrix `σ`.
pub fn second_order_block(sigma: &Mat4) -> Matrix4<C64> {
    let om = omega();
    Matrix4::from_fn(|i, j| C64::new(0.5 * sigma[(i, j)], 0.5 * om[(i, j)]))
}

fn wick_block(a: &Matrix4<C64>, k4: Option<&Tensor4<f64>>) -> DMatrix<C64> {
    let mut d = DMatrix::<C64>::zeros(16, 16);
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    let kappa = k4.map_or(0.0, |t| t.get(i, j, k, l));
                    d[(pair_index(i, j), pair_index(k, l))] = C64::new(kappa, 0.0)
                        + a[(i, j)].conj() * a[(k, l)]
                        + a[(i, k)] * a[(j, l)]
                        + a[(i, l)] * a[(j, k)];
                }
            }
        }
    }
    d
}

fn assemble(
    a: Matrix4<C64>,
    k3: Option<&Tensor3<f64>>,
    k4: Option<&Tensor4<f64>>,
) -> Result<CriterionMatrices> {
    let mut b = DMatrix::<C64>::zeros(4, 16);
    if let Some(k3) = k3 {
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    b[(i, pair_index(j, k))] = C64::new(k3.get(i, j, k), 0.0);
                }
            }
        }
    }
    let d = wick_block(&a, k4);
    let mut m = DMatrix::<C64>::zeros(20, 20);
    m.view_mut((0, 0), (4, 4)).copy_from(&a);
    m.view_mut((0, 4), (4, 16)).copy_from(&b);
    m.view_mut((4, 0), (16, 4)).copy_from(&b.adjoint());
    m.view_mut((4, 4), (16, 16)).copy_from(&d);
    Ok(CriterionMatrices {
        a: HermMat::new(DMatrix::from_iterator(4, 4, a.iter().copied()))?,
        b,
        d: HermMat::new(d)?,
        m: HermMat::new(m)?,
    })
}

/// Full witness matrices from partially transposed cumulants.
pub fn build_criterion(c_pt: &CumulantSet) -> Result<CriterionMatrices> {
    assemble(
        second_order_block(&c_pt.sigma()),
        Some(&c_pt.k3),
        Some(&c_pt.k4),
    )
}

/// Ablated matrices with third- and fourth-order cumulants set to zero, so
/// `M` depends on the covariance matrix alone.
pub fn covariance_only_matrices(c_pt: &CumulantSet) -> Result<CriterionMatrices> {
    assemble(second_order_block(&c_pt.sigma()), None, None)
}

/// Per-channel detection flags: `eigenvalue < -tol`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Detection {
    pub e2: bool,
    pub e4: bool,
    pub e4_cov_only: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessResult {
    /// Minimum eigenvalue of `A`.
    pub e2: f64,
    /// Minimum eigenvalue of `M`.
    pub e4: f64,
    /// Minimum eigenvalue of the covariance-only `M`.
    pub e4_cov_only: f64,
    pub entangled: Detection,
}

/// Witness eigenvalues for cumulants of the state itself (not yet transposed).
pub fn witness_from_cumulants(c: &CumulantSet, tol: f64) -> Result<WitnessResult> {
    let c_pt = partial_transpose(c);
    let full = build_criterion(&c_pt)?;
    let ablated = covariance_only_matrices(&c_pt)?;
    let e2 = full.a.min_eigen()?.value;
    let e4 = full.m.min_eigen()?.value;
    let e4_cov_only = ablated.m.min_eigen()?.value;
    Ok(WitnessResult {
        e2,
        e4,
        e4_cov_only,
        entangled: Detection {
            e2: e2 < -tol,
            e4: e4 < -tol,
            e4_cov_only: e4_cov_only < -tol,
        },
    })
}

/// Moments, cumulants, partial transpose, matrices, eigenvalues.
pub fn evaluate_witness(state: &MixtureState) -> Result<WitnessResult> {
    evaluate_witness_with_tol(state, DEFAULT_TOL)
}

pub fn evaluate_witness_with_tol(state: &MixtureState, tol: f64) -> Result<WitnessResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let moments = weyl_central_moments(state)?;
    witness_from_cumulants(&cumulants_from_moments(&moments), tol)
}

/// Gaussian component of a mixture after partial transposition.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundComponent {
    pub weight: f64,
    /// `⟨r⟩^{T_B}` of the component.
    pub mean: Vec4,
    /// `σ^{T_B}` of the component (anticommutator convention).
    pub sigma: Mat4,
}

const COVARIANCE_AGREEMENT_TOL: f64 = 1e-10;

/// `Σ_k w_k M^k`, where `M^k` is the witness matrix of component `k` with
/// the squared-magnitude contribution of its mean offset removed.
///
/// The discarded part is positive semidefinite, so the minimum eigenvalue of
/// the returned matrix bounds the full `E4` from below.
pub fn component_bound_matrix(
    components: &[BoundComponent],
    global_mean: &Vec4,
) -> Result<HermMat> {
    let first = components
        .first()
        .ok_or_else(|| Error::InvalidArgument("no components given".into()))?;
    for (k, c) in components.iter().enumerate() {
        let dev = (c.sigma - first.sigma).abs().max();
        if dev > COVARIANCE_AGREEMENT_TOL {
            return Err(Error::Model(format!(
                "component {k} covariance differs from component 0 by {dev:e}"
            )));
        }
    }

    let mut total = DMatrix::<C64>::zeros(20, 20);
    for c in components {
        let a = second_order_block(&c.sigma);
        let dl = c.mean - global_mean;
        let d = |i: usize| C64::new(dl[i], 0.0);
        let mut mk = DMatrix::<C64>::zeros(20, 20);
        for i in 0..4 {
            for j in 0..4 {
                mk[(i, j)] = a[(i, j)];
            }
        }
        for i1 in 0..4 {
            for i2 in 0..4 {
                for i3 in 0..4 {
                    let b = a[(i1, i2)] * d(i3) + a[(i1, i3)] * d(i2) + a[(i2, i3)] * d(i1);
                    mk[(i1, 4 + pair_index(i2, i3))] = b;
                    mk[(4 + pair_index(i2, i3), i1)] = b.conj();
                }
            }
        }
        for i1 in 0..4 {
            for i2 in 0..4 {
                for i3 in 0..4 {
                    for i4 in 0..4 {
                        let v = a[(i1, i2)].conj() * d(i3) * d(i4)
                            + a[(i1, i3)] * d(i2) * d(i4)
                            + a[(i1, i4)] * d(i2) * d(i3)
                            + a[(i2, i3)] * d(i1) * d(i4)
                            + a[(i2, i4)] * d(i1) * d(i3)
                            + a[(i3, i4)] * d(i1) * d(i2)
                            + a[(i1, i2)].conj() * a[(i3, i4)]
                            + a[(i1, i3)] * a[(i2, i4)]
                            + a[(i1, i4)] * a[(i2, i3)];
                        mk[(4 + pair_index(i1, i2), 4 + pair_index(i3, i4))] = v;
                    }
                }
            }
        }
        total += mk * C64::new(c.weight, 0.0);
    }
    let scale = total.iter().fold(1.0_f64, |m, z| m.max(z.norm()));
    HermMat::with_tolerance(total, crate::numerics::HERMITIAN_TOL * scale)
}

/// Minimum eigenvalue of [`component_bound_matrix`].
pub fn component_lower_bound(components: &[BoundComponent], global_mean: &Vec4) -> Result<f64> {
    Ok(component_bound_matrix(components, global_mean)?
        .min_eigen()?
        .value)
}
