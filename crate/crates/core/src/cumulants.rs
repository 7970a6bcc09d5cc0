//! Cumulants from central moments, their partial transposition, and an
//! independent finite-difference route through `ln chi`.

use nalgebra::Matrix4;

use crate::error::{Error, Result};
use crate::numerics::{omega, C64};
use crate::states::{Mat4, MixtureState, MomentSet, Vec4};
use crate::tensor::{Tensor3, Tensor4};

/// Cumulants up to fourth order; `k2` is the symmetrised covariance (`σ/2`).
#[derive(Debug, Clone, PartialEq)]
pub struct CumulantSet {
    pub k1: Vec4,
    pub k2: Mat4,
    pub k3: Tensor3<f64>,
    pub k4: Tensor4<f64>,
}

impl CumulantSet {
    pub fn max_abs_diff(&self, other: &CumulantSet) -> f64 {
        let d1 = (self.k1 - other.k1).abs().max();
        let d2 = (self.k2 - other.k2).abs().max();
        let d3 = (self.k3 - other.k3).max_abs();
        let d4 = (self.k4 - other.k4).max_abs();
        d1.max(d2).max(d3).max(d4)
    }

    /// Covariance matrix in the anticommutator convention.
    pub fn sigma(&self) -> Mat4 {
        self.k2 * 2.0
    }
}

/// `κ₁ = m₁`, `κ₂ = m₂/2`, `κ₃ = m₃`, `κ₄ = m₄ - (κ₂κ₂ + κ₂κ₂ + κ₂κ₂)`.
///
/// The fourth-order relation subtracts products of `κ₂`, not of `m₂`; only
/// that form vanishes on Gaussian states.
pub fn cumulants_from_moments(m: &MomentSet) -> CumulantSet {
    let k2 = m.m2 * 0.5;
    let k4 = Tensor4::symmetric(|i, j, k, l| {
        m.m4.get(i, j, k, l)
            - (k2[(i, j)] * k2[(k, l)] + k2[(i, k)] * k2[(j, l)] + k2[(i, l)] * k2[(j, k)])
    });
    CumulantSet {
        k1: m.m1,
        k2,
        k3: m.m3,
        k4,
    }
}

/// Phase-space image of transposing subsystem B: `p_b -> -p_b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialTransposeMap {
    pub t: Matrix4<f64>,
}

impl PartialTransposeMap {
    pub fn new() -> Self {
        Self {
            t: Matrix4::from_diagonal(&Vec4::new(1.0, 1.0, 1.0, -1.0)),
        }
    }

    #[inline]
    pub fn sign(&self, i: usize) -> f64 {
        self.t[(i, i)]
    }

    pub fn apply(&self, c: &CumulantSet) -> CumulantSet {
        let s = |i: usize| self.sign(i);
        CumulantSet {
            k1: self.t * c.k1,
            k2: self.t * c.k2 * self.t,
            k3: Tensor3::from_fn(|i, j, k| s(i) * s(j) * s(k) * c.k3.get(i, j, k)),
            k4: Tensor4::from_fn(|i, j, k, l| s(i) * s(j) * s(k) * s(l) * c.k4.get(i, j, k, l)),
        }
    }
}

impl Default for PartialTransposeMap {
    fn default() -> Self {
        Self::new()
    }
}

pub fn partial_transpose(c: &CumulantSet) -> CumulantSet {
    PartialTransposeMap::new().apply(c)
}

/// Default step for [`finite_difference_cumulants`].
pub const DEFAULT_FD_STEP: f64 = 1e-2;

const FD_IMAG_TOL: f64 = 1e-8;
/// `ln 1e-12`; smaller `|chi|` on the stencil counts as vanishing.
const MIN_LOG_MODULUS: f64 = -27.631021115928547;

/// Five-point central stencils on offsets `-2..=2` for derivative orders 0..=4,
/// without the `h^-n` factor.
const STENCILS: [[f64; 5]; 5] = [
    [0.0, 0.0, 1.0, 0.0, 0.0],
    [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0],
    [
        -1.0 / 12.0,
        16.0 / 12.0,
        -30.0 / 12.0,
        16.0 / 12.0,
        -1.0 / 12.0,
    ],
    [-0.5, 1.0, 0.0, -1.0, 0.5],
    [1.0, -4.0, 6.0, -4.0, 1.0],
];

/// `ln chi` sampled on the 5⁴ grid of offsets `h * {-2..=2}⁴`.
struct LogGrid {
    h: f64,
    values: Vec<C64>,
}

impl LogGrid {
    fn sample(state: &MixtureState, h: f64) -> Result<Self> {
        let mut values = Vec::with_capacity(625);
        for a in 0..5 {
            for b in 0..5 {
                for c in 0..5 {
                    for d in 0..5 {
                        let r = Vec4::new(
                            (a as f64 - 2.0) * h,
                            (b as f64 - 2.0) * h,
                            (c as f64 - 2.0) * h,
                            (d as f64 - 2.0) * h,
                        );
                        let ln = state
                            .log_characteristic(&r)
                            .filter(|ln| ln.re > MIN_LOG_MODULUS)
                            .ok_or_else(|| Error::BranchCut(state.characteristic(&r).norm()))?;
                        values.push(ln);
                    }
                }
            }
        }
        Ok(Self { h, values })
    }

    /// Mixed partial derivative with `counts[axis]` derivatives per axis.
    fn derivative(&self, counts: [usize; 4]) -> C64 {
        let order: usize = counts.iter().sum();
        let st: [&[f64; 5]; 4] = [
            &STENCILS[counts[0]],
            &STENCILS[counts[1]],
            &STENCILS[counts[2]],
            &STENCILS[counts[3]],
        ];
        let mut acc = C64::new(0.0, 0.0);
        for a in 0..5 {
            if st[0][a] == 0.0 {
                continue;
            }
            for b in 0..5 {
                if st[1][b] == 0.0 {
                    continue;
                }
                for c in 0..5 {
                    if st[2][c] == 0.0 {
                        continue;
                    }
                    for d in 0..5 {
                        if st[3][d] == 0.0 {
                            continue;
                        }
                        let w = st[0][a] * st[1][b] * st[2][c] * st[3][d];
                        acc += self.values[((a * 5 + b) * 5 + c) * 5 + d] * w;
                    }
                }
            }
        }
        acc / self.h.powi(order as i32)
    }
}

/// Cumulants by numerically differentiating `ln chi` at the origin, each index
/// contracted with `iΩ`. One Richardson level combines steps `h` and `h/2`.
pub fn finite_difference_cumulants(state: &MixtureState, step: f64) -> Result<CumulantSet> {
    if !(1e-4..=1e-1).contains(&step) {
        return Err(Error::InvalidArgument(format!(
            "finite-difference step {step} outside [1e-4, 1e-1]"
        )));
    }
    let coarse = LogGrid::sample(state, step)?;
    let fine = LogGrid::sample(state, step / 2.0)?;
    let om = omega();
    // iΩ maps index j to a single partner index with a sign.
    let partner = |j: usize| -> (usize, f64) {
        let k = (0..4)
            .find(|&k| om[(j, k)] != 0.0)
            .expect("Ω has one entry per row");
        (k, om[(j, k)])
    };

    let mut worst_imag: f64 = 0.0;
    let mut cumulant = |ix: &[usize]| -> f64 {
        let mut counts = [0usize; 4];
        let mut factor = C64::new(1.0, 0.0);
        for &j in ix {
            let (k, s) = partner(j);
            counts[k] += 1;
            factor *= C64::new(0.0, s);
        }
        let d = (fine.derivative(counts) * 4.0 - coarse.derivative(counts)) / 3.0;
        let z = factor * d;
        worst_imag = worst_imag.max(z.im.abs());
        z.re
    };

    let k1 = Vec4::from_fn(|i, _| cumulant(&[i]));
    let mut k2 = Mat4::zeros();
    for i in 0..4 {
        for j in i..4 {
            let v = cumulant(&[i, j]);
            k2[(i, j)] = v;
            k2[(j, i)] = v;
        }
    }
    let k3 = Tensor3::symmetric(|i, j, k| cumulant(&[i, j, k]));
    let k4 = Tensor4::symmetric(|i, j, k, l| cumulant(&[i, j, k, l]));

    if worst_imag > FD_IMAG_TOL {
        return Err(Error::StepSize(worst_imag));
    }
    Ok(CumulantSet { k1, k2, k3, k4 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{cat_state, weyl_central_moments};

    fn sample_set() -> CumulantSet {
        CumulantSet {
            k1: Vec4::new(1.0, 2.0, 3.0, 4.0),
            k2: Mat4::from_fn(|i, j| (i + j) as f64),
            k3: Tensor3::symmetric(|i, j, k| (i * 7 + j * 3 + k) as f64 + 0.5),
            k4: Tensor4::symmetric(|i, j, k, l| (i + 2 * j + 3 * k + 5 * l) as f64 - 4.0),
        }
    }

    #[test]
    fn vacuum_cumulants_are_gaussian() {
        let c = cumulants_from_moments(&weyl_central_moments(&MixtureState::vacuum()).unwrap());
        assert!((c.k2 - Mat4::identity() * 0.5).abs().max() < 1e-15);
        assert!(c.k3.max_abs() < 1e-15);
        assert!(c.k4.max_abs() < 1e-15);
    }

    #[test]
    fn partial_transpose_is_involution() {
        let c = sample_set();
        let back = partial_transpose(&partial_transpose(&c));
        assert_eq!(back, c);
    }

    #[test]
    fn partial_transpose_flips_odd_pb_counts() {
        let c = sample_set();
        let pt = partial_transpose(&c);
        assert_eq!(pt.k1, Vec4::new(1.0, 2.0, 3.0, -4.0));
        // Indices (1,4,4,4) and (1,4,4,2) in one-based notation.
        assert_eq!(pt.k4.get(0, 3, 3, 3), -c.k4.get(0, 3, 3, 3));
        assert_eq!(pt.k4.get(0, 3, 3, 1), c.k4.get(0, 3, 3, 1));
        assert_eq!(pt.k2[(2, 3)], -c.k2[(2, 3)]);
        assert_eq!(pt.k3.get(3, 0, 1), -c.k3.get(3, 0, 1));
    }

    #[test]
    fn cat_third_cumulant_vanishes() {
        let cat = cat_state(C64::new(1.0, 0.0)).unwrap();
        let c = cumulants_from_moments(&weyl_central_moments(&cat).unwrap());
        assert!(c.k3.max_abs() < 1e-12);
    }

    #[test]
    fn finite_difference_vacuum() {
        let c = finite_difference_cumulants(&MixtureState::vacuum(), DEFAULT_FD_STEP).unwrap();
        assert!((c.k2 - Mat4::identity() * 0.5).abs().max() < 1e-8);
        assert!(c.k1.abs().max() < 1e-10);
        assert!(c.k3.max_abs() < 1e-6);
        assert!(c.k4.max_abs() < 1e-6);
    }

    #[test]
    fn finite_difference_rejects_bad_step() {
        let v = MixtureState::vacuum();
        assert!(matches!(
            finite_difference_cumulants(&v, 0.5),
            Err(Error::InvalidArgument(_))
        ));
        assert!(finite_difference_cumulants(&v, 1e-5).is_err());
    }
}
