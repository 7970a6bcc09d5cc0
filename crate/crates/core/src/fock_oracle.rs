//! Brute-force cross-check in a truncated two-mode Fock space.
//!
//! Densities are `N² x N²` matrices indexed by `n_a * N + n_b`. Moments are
//! traces of explicitly symmetrised operator products, so nothing here shares
//! code with the characteristic-function engine in [`crate::states`] beyond
//! the final assembly of the witness matrices.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::criterion::{witness_from_cumulants, WitnessResult, DEFAULT_TOL};
use crate::cumulants::cumulants_from_moments;
use crate::error::{Error, Result};
use crate::numerics::{HermMat, C64};
use crate::states::{Mat4, MomentSet, Vec4};
use crate::tensor::{permutations3, permutations4, Tensor3, Tensor4};

const MIN_CUTOFF: usize = 4;
const TRACE_TOL: f64 = 1e-10;
const DENSITY_HERMITIAN_TOL: f64 = 1e-12;
const EIGEN_FLOOR: f64 = -1e-10;
const LEAKAGE_TOL: f64 = 1e-8;
/// Largest `N²` accepted by the dense partial-transpose eigensolve.
pub const MAX_PPT_DIM: usize = 900;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Single-mode ladder, position and momentum matrices at cutoff `N`.
#[derive(Debug, Clone)]
pub struct FockOperators {
    pub cutoff: usize,
    pub annihilation: DMatrix<C64>,
    /// `q = (a + a†)/√2`
    pub q: DMatrix<C64>,
    /// `p = (a - a†)/(i√2)`
    pub p: DMatrix<C64>,
}

impl FockOperators {
    /// Quadrature `r̂_i` of the two-mode ordering `(q_a, p_a, q_b, p_b)`,
    /// embedded as a dense `N² x N²` matrix.
    pub fn two_mode(&self, i: usize) -> DMatrix<C64> {
        let single = if i % 2 == 0 { &self.q } else { &self.p };
        let id = DMatrix::<C64>::identity(self.cutoff, self.cutoff);
        if i < 2 {
            single.kronecker(&id)
        } else {
            id.kronecker(single)
        }
    }

    fn quadratures(&self) -> [ModeOp; 4] {
        std::array::from_fn(|i| {
            ModeOp::from_dense(i / 2, if i % 2 == 0 { &self.q } else { &self.p })
        })
    }
}

pub fn ladder_operators(cutoff: usize) -> Result<FockOperators> {
    if cutoff < MIN_CUTOFF {
        return Err(Error::InvalidArgument(format!(
            "Fock cutoff must be at least {MIN_CUTOFF}, got {cutoff}"
        )));
    }
    let mut a = DMatrix::<C64>::zeros(cutoff, cutoff);
    for n in 1..cutoff {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    let ad = a.adjoint();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let q = (&a + &ad) * C64::new(s, 0.0);
    let p = (&a - &ad) * C64::new(0.0, -s);
    Ok(FockOperators {
        cutoff,
        annihilation: a,
        q,
        p,
    })
}

/// Sparse single-mode operator acting on one factor of the two-mode space.
struct ModeOp {
    mode: usize,
    entries: Vec<(usize, usize, C64)>,
}

impl ModeOp {
    fn from_dense(mode: usize, m: &DMatrix<C64>) -> Self {
        let mut entries = Vec::new();
        for c in 0..m.ncols() {
            for r in 0..m.nrows() {
                if m[(r, c)] != ZERO {
                    entries.push((r, c, m[(r, c)]));
                }
            }
        }
        Self { mode, entries }
    }

    #[inline]
    fn two_mode_index(&self, n: usize, own: usize, other: usize) -> usize {
        if self.mode == 0 {
            own * n + other
        } else {
            other * n + own
        }
    }

    /// `(O - shift) · y` for a dense `N² x N²` matrix `y`.
    fn apply(&self, n: usize, y: &DMatrix<C64>, shift: f64) -> DMatrix<C64> {
        let dim = n * n;
        let src = y.as_slice();
        let mut out: Vec<C64> = src.iter().map(|v| *v * (-shift)).collect();
        for c in 0..dim {
            let base = c * dim;
            for &(r, s, v) in &self.entries {
                for k in 0..n {
                    let to = self.two_mode_index(n, r, k);
                    let from = self.two_mode_index(n, s, k);
                    out[base + to] += v * src[base + from];
                }
            }
        }
        DMatrix::from_vec(dim, dim, out)
    }

    /// `Tr[(O - shift) · y]`.
    fn trace_apply(&self, n: usize, y: &DMatrix<C64>, shift: f64) -> C64 {
        let mut acc = y.trace() * (-shift);
        for &(r, s, v) in &self.entries {
            for k in 0..n {
                acc += v * y[(self.two_mode_index(n, s, k), self.two_mode_index(n, r, k))];
            }
        }
        acc
    }
}

/// Two-mode density matrix in the truncated Fock basis.
#[derive(Debug, Clone)]
pub struct FockDensity {
    cutoff: usize,
    rho: DMatrix<C64>,
}

impl FockDensity {
    /// Validates shape, unit trace, Hermiticity and positivity.
    pub fn new(cutoff: usize, rho: DMatrix<C64>) -> Result<Self> {
        let d = Self::checked(cutoff, rho)?;
        let min = HermMat::new(d.rho.clone())?.min_eigen()?.value;
        if min < EIGEN_FLOOR {
            return Err(Error::InvalidState(format!(
                "density has eigenvalue {min:e}"
            )));
        }
        Ok(d)
    }

    fn checked(cutoff: usize, rho: DMatrix<C64>) -> Result<Self> {
        if cutoff < MIN_CUTOFF {
            return Err(Error::InvalidArgument(format!(
                "Fock cutoff must be at least {MIN_CUTOFF}, got {cutoff}"
            )));
        }
        let dim = cutoff * cutoff;
        if rho.nrows() != dim || rho.ncols() != dim {
            return Err(Error::InvalidArgument(format!(
                "density must be {dim}x{dim}, got {}x{}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        let tr = rho.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("density trace is {tr}")));
        }
        let dev = (&rho - rho.adjoint())
            .iter()
            .fold(0.0_f64, |m, z| m.max(z.norm()));
        if dev > DENSITY_HERMITIAN_TOL {
            return Err(Error::NotHermitian {
                deviation: dev,
                tolerance: DENSITY_HERMITIAN_TOL,
            });
        }
        Ok(Self { cutoff, rho })
    }

    /// `|ψ⟩⟨ψ|` for amplitudes `ψ[n_a * N + n_b]`, normalised on the way in.
    pub fn from_pure(cutoff: usize, psi: &DVector<C64>) -> Result<Self> {
        let norm = psi.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidArgument(
                "state vector has zero or non-finite norm".into(),
            ));
        }
        let psi = psi / C64::new(norm, 0.0);
        Self::checked(cutoff, &psi * psi.adjoint())
    }

    pub fn product_vacuum(cutoff: usize) -> Result<Self> {
        let mut psi = DVector::<C64>::zeros(cutoff * cutoff);
        if !psi.is_empty() {
            psi[0] = C64::new(1.0, 0.0);
        }
        Self::from_pure(cutoff, &psi)
    }

    /// `(|0,1⟩ + |1,0⟩)/√2`.
    pub fn bell_01_10(cutoff: usize) -> Result<Self> {
        let mut psi = DVector::<C64>::zeros(cutoff * cutoff);
        if cutoff >= MIN_CUTOFF {
            psi[1] = C64::new(1.0, 0.0);
            psi[cutoff] = C64::new(1.0, 0.0);
        }
        Self::from_pure(cutoff, &psi)
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.rho
    }

    pub fn trace(&self) -> C64 {
        self.rho.trace()
    }

    pub fn purity(&self) -> f64 {
        (&self.rho * &self.rho).trace().re
    }

    /// `⟨φ|ρ|φ⟩` for a normalised pure state `φ`.
    pub fn fidelity_with_pure(&self, phi: &DVector<C64>) -> f64 {
        (phi.adjoint() * &self.rho * phi)[(0, 0)].re
    }

    /// `ρ^{T_B}` with elements `ρ_{(n_a m_b),(m_a n_b)}` at `((n_a n_b),(m_a m_b))`.
    pub fn partial_transpose(&self) -> DMatrix<C64> {
        let n = self.cutoff;
        let dim = n * n;
        DMatrix::from_fn(dim, dim, |row, col| {
            let (na, nb) = (row / n, row % n);
            let (ma, mb) = (col / n, col % n);
            self.rho[(na * n + mb, ma * n + nb)]
        })
    }
}

/// `(|α,α⟩ - |-α,-α⟩)/sqrt(2 - 2e^{-4|α|²})` truncated at `cutoff` per mode.
pub fn cat_density(alpha: C64, cutoff: usize) -> Result<FockDensity> {
    let a2 = alpha.norm_sqr();
    if !(a2 > 0.0) || !a2.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "cat state needs 0 < |alpha| < inf, got {alpha}"
        )));
    }
    let required = (10.0 * a2.max(1.0)).ceil() as usize;
    if cutoff < required {
        return Err(Error::CutoffTooSmall {
            cutoff,
            reason: format!("|alpha|^2 = {a2} needs cutoff >= {required}"),
        });
    }
    let mut coherent = Vec::with_capacity(cutoff);
    let mut c = C64::new((-0.5 * a2).exp(), 0.0);
    for n in 0..cutoff {
        coherent.push(c);
        c = c * alpha / ((n + 1) as f64).sqrt();
    }
    let kept: f64 = coherent.iter().map(|z| z.norm_sqr()).sum();
    // Both modes lose the same tail.
    let leaked = (1.0 - kept * kept).max(0.0);
    if leaked > LEAKAGE_TOL {
        return Err(Error::CutoffTooSmall {
            cutoff,
            reason: format!("truncated norm loss {leaked:e} exceeds {LEAKAGE_TOL:e}"),
        });
    }
    let mut psi = DVector::<C64>::zeros(cutoff * cutoff);
    for na in 0..cutoff {
        for nb in 0..cutoff {
            if (na + nb) % 2 == 1 {
                psi[na * cutoff + nb] = coherent[na] * coherent[nb] * 2.0;
            }
        }
    }
    FockDensity::from_pure(cutoff, &psi)
}

/// Expectations of ordered products `Tr[ρ Δr_i Δr_j ...]` up to length four,
/// with `Δr = r̂ - shift`. Row-major over the operator indices.
struct OrderedExpectations {
    e2: [C64; 16],
    e3: [C64; 64],
    e4: [C64; 256],
}

fn first_moments(ops: &[ModeOp; 4], n: usize, rho: &DMatrix<C64>) -> [C64; 4] {
    std::array::from_fn(|i| ops[i].trace_apply(n, rho, 0.0))
}

fn ordered_expectations(
    ops: &[ModeOp; 4],
    n: usize,
    rho: &DMatrix<C64>,
    shift: &Vec4,
) -> OrderedExpectations {
    let mut out = OrderedExpectations {
        e2: [ZERO; 16],
        e3: [ZERO; 64],
        e4: [ZERO; 256],
    };
    for l in 0..4 {
        let yl = ops[l].apply(n, rho, shift[l]);
        for i in 0..4 {
            out.e2[i * 4 + l] = ops[i].trace_apply(n, &yl, shift[i]);
        }
        for k in 0..4 {
            let ykl = ops[k].apply(n, &yl, shift[k]);
            for i in 0..4 {
                out.e3[(i * 4 + k) * 4 + l] = ops[i].trace_apply(n, &ykl, shift[i]);
            }
            for j in 0..4 {
                let yjkl = ops[j].apply(n, &ykl, shift[j]);
                for i in 0..4 {
                    out.e4[((i * 4 + j) * 4 + k) * 4 + l] = ops[i].trace_apply(n, &yjkl, shift[i]);
                }
            }
        }
    }
    out
}

/// Central Weyl moments by symmetrising all ordered operator products.
pub fn oracle_moments(rho: &FockDensity) -> MomentSet {
    let n = rho.cutoff;
    let ops = ladder_operators(n)
        .expect("FockDensity guarantees a valid cutoff")
        .quadratures();
    let m1 = Vec4::from_iterator(first_moments(&ops, n, &rho.rho).iter().map(|z| z.re));
    let e = ordered_expectations(&ops, n, &rho.rho, &m1);

    let m2 = Mat4::from_fn(|i, j| (e.e2[i * 4 + j] + e.e2[j * 4 + i]).re);
    let m3 = Tensor3::symmetric(|i, j, k| {
        let s: C64 = permutations3([i, j, k])
            .iter()
            .map(|p| e.e3[(p[0] * 4 + p[1]) * 4 + p[2]])
            .sum();
        s.re / 6.0
    });
    let m4 = Tensor4::symmetric(|i, j, k, l| {
        let s: C64 = permutations4([i, j, k, l])
            .iter()
            .map(|p| e.e4[((p[0] * 4 + p[1]) * 4 + p[2]) * 4 + p[3]])
            .sum();
        s.re / 24.0
    });
    MomentSet { m1, m2, m3, m4 }
}

/// Witness eigenvalues from [`oracle_moments`] through the shared assembly.
pub fn oracle_witness(rho: &FockDensity) -> Result<WitnessResult> {
    witness_from_cumulants(&cumulants_from_moments(&oracle_moments(rho)), DEFAULT_TOL)
}

/// `Tr[ρ^{T_B} f†f]` as a 20x20 matrix built directly from ordered products
/// on the partially transposed density, without going through cumulants.
pub fn direct_witness_matrix(rho: &FockDensity) -> Result<HermMat> {
    let n = rho.cutoff;
    let ops = ladder_operators(n)?.quadratures();
    let pt = rho.partial_transpose();
    let mean = Vec4::from_iterator(first_moments(&ops, n, &pt).iter().map(|z| z.re));
    let e = ordered_expectations(&ops, n, &pt, &mean);

    let mut m = DMatrix::<C64>::zeros(20, 20);
    for i in 0..4 {
        for j in 0..4 {
            m[(i, j)] = e.e2[i * 4 + j];
            for k in 0..4 {
                m[(i, 4 + j * 4 + k)] = e.e3[(i * 4 + j) * 4 + k];
                m[(4 + i * 4 + j, k)] = e.e3[(j * 4 + i) * 4 + k];
                for l in 0..4 {
                    m[(4 + i * 4 + j, 4 + k * 4 + l)] = e.e4[((j * 4 + i) * 4 + k) * 4 + l];
                }
            }
        }
    }
    let scale = m.iter().fold(1.0_f64, |s, z| s.max(z.norm()));
    HermMat::with_tolerance(m, 1e-9 * scale)
}

/// Minimum eigenvalue of the full partial transpose; negative means NPT.
pub fn exact_ppt_min_eigenvalue(rho: &FockDensity) -> Result<f64> {
    let dim = rho.cutoff * rho.cutoff;
    if dim > MAX_PPT_DIM {
        return Err(Error::InvalidArgument(format!(
            "partial-transpose eigensolve limited to dimension {MAX_PPT_DIM}, got {dim}"
        )));
    }
    Ok(HermMat::new(rho.partial_transpose())?.min_eigen()?.value)
}

/// `Tr[ρ exp(i rᵀ Ω r̂)]`. Each single-mode displacement is exponentiated at
/// an enlarged cutoff and then truncated.
pub fn oracle_characteristic(rho: &FockDensity, r: &Vec4) -> Result<C64> {
    let n = rho.cutoff;
    let big = ladder_operators(2 * n + 20)?;
    let displacement = |x: f64, y: f64| -> DMatrix<C64> {
        // rᵀΩr̂ restricted to one mode is x p - y q.
        let g = &big.p * C64::new(x, 0.0) - &big.q * C64::new(y, 0.0);
        let eig = SymmetricEigen::new(g);
        let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| C64::new(0.0, l).exp()));
        let u = &eig.eigenvectors;
        let full = u * phases * u.adjoint();
        full.view((0, 0), (n, n)).into_owned()
    };
    let da = displacement(r[0], r[1]);
    let db = displacement(r[2], r[3]);
    let mut acc = ZERO;
    for ma in 0..n {
        for mb in 0..n {
            for na in 0..n {
                for nb in 0..n {
                    acc += rho.rho[(ma * n + mb, na * n + nb)] * da[(na, ma)] * db[(nb, mb)];
                }
            }
        }
    }
    Ok(acc)
}
