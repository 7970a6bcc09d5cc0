//! Small dense kernels: the symplectic form, 4x4 real matrix exponentials,
//! and minimum eigenpairs of Hermitian matrices.

use nalgebra::{DMatrix, DVector, Matrix4, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Absolute tolerance used when accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Eigenvector condition number above which the eigendecomposition route of
/// [`matrix_exponential`] hands over to scaling-and-squaring.
pub const EIGEN_COND_LIMIT: f64 = 1e8;

/// The two-mode symplectic form for the ordering `(q_a, p_a, q_b, p_b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticForm {
    pub omega: Matrix4<f64>,
}

impl SymplecticForm {
    pub fn new() -> Self {
        #[rustfmt::skip]
        let omega = Matrix4::new(
             0.0, 1.0, 0.0, 0.0,
            -1.0, 0.0, 0.0, 0.0,
             0.0, 0.0, 0.0, 1.0,
             0.0, 0.0, -1.0, 0.0,
        );
        Self { omega }
    }
}

impl Default for SymplecticForm {
    fn default() -> Self {
        Self::new()
    }
}

/// Shorthand for `SymplecticForm::new().omega`.
pub fn omega() -> Matrix4<f64> {
    SymplecticForm::new().omega
}

fn check_finite(m: &Matrix4<f64>, what: &str) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{what} has non-finite entries"
        )))
    }
}

/// `exp(m)` for a real 4x4 matrix.
///
/// Uses the complex eigendecomposition of `m` and falls back to Padé(13)
/// scaling-and-squaring when the eigenvector basis is ill-conditioned or the
/// decomposition fails.
pub fn matrix_exponential(m: &Matrix4<f64>) -> Result<Matrix4<f64>> {
    check_finite(m, "matrix exponential input")?;
    match expm_eigen(m) {
        Ok(e) if e.condition <= EIGEN_COND_LIMIT => Ok(e.value),
        _ => Ok(expm_pade(m)),
    }
}

/// Result of the eigendecomposition route of the matrix exponential.
#[derive(Debug, Clone, Copy)]
pub struct EigenExp {
    pub value: Matrix4<f64>,
    /// Condition number of the eigenvector matrix.
    pub condition: f64,
}

/// Matrix exponential through `V exp(J) V^-1`.
///
/// Eigenvalues closer than `1e-6 * max(1, |m|)` are clustered; each cluster is
/// exponentiated as a small block via a shifted Taylor series, so exact and
/// near degeneracies are both handled. Fails when the computed basis does not
/// block-diagonalise `m`.
pub fn expm_eigen(m: &Matrix4<f64>) -> Result<EigenExp> {
    check_finite(m, "matrix exponential input")?;
    let a: Matrix4<C64> = m.map(|v| C64::new(v, 0.0));
    let scale = m.norm().max(1.0);

    let mut eig: Vec<C64> = m.complex_eigenvalues().iter().copied().collect();
    eig.sort_by(|x, y| {
        x.im.partial_cmp(&y.im)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(x.re.partial_cmp(&y.re).unwrap_or(std::cmp::Ordering::Equal))
    });

    // Greedy clustering of nearly equal eigenvalues.
    let cluster_tol = 1e-6 * scale;
    let mut clusters: Vec<Vec<C64>> = Vec::new();
    for &lam in &eig {
        match clusters
            .iter_mut()
            .find(|c| c.iter().any(|&mu| (mu - lam).norm() < cluster_tol))
        {
            Some(c) => c.push(lam),
            None => clusters.push(vec![lam]),
        }
    }

    let mut basis = Matrix4::<C64>::zeros();
    let mut blocks: Vec<(usize, usize, C64)> = Vec::new();
    let mut col = 0;
    for c in &clusters {
        let k = c.len();
        let centre = c.iter().sum::<C64>() / k as f64;
        let shifted = a - Matrix4::<C64>::identity() * centre;
        let svd = shifted.svd(false, true);
        let v_t = svd
            .v_t
            .ok_or_else(|| Error::Numeric("SVD did not return right singular vectors".into()))?;
        let mut order: Vec<usize> = (0..4).collect();
        order.sort_by(|&x, &y| {
            svd.singular_values[x]
                .partial_cmp(&svd.singular_values[y])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        for &r in order.iter().take(k) {
            for i in 0..4 {
                basis[(i, col)] = v_t[(r, i)].conj();
            }
            col += 1;
        }
        blocks.push((col - k, k, centre));
    }

    let sv = basis.svd(false, false).singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    let condition = if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    };
    let inv = basis
        .try_inverse()
        .ok_or_else(|| Error::Numeric("eigenvector basis is singular".into()))?;

    let projected = inv * a * basis;
    let mut off_block: f64 = 0.0;
    for &(start, k, _) in &blocks {
        for i in start..start + k {
            for j in 0..4 {
                if j < start || j >= start + k {
                    off_block = off_block.max(projected[(i, j)].norm());
                }
            }
        }
    }
    if off_block > 1e-9 * scale {
        return Err(Error::Numeric(format!(
            "eigenbasis fails to block-diagonalise the generator (residual {off_block:e})"
        )));
    }

    let mut exp_blocks = Matrix4::<C64>::zeros();
    for &(start, k, centre) in &blocks {
        let mut nil = DMatrix::<C64>::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                nil[(i, j)] = projected[(start + i, start + j)];
            }
            nil[(i, i)] -= centre;
        }
        let block = shifted_taylor_exp(&nil) * centre.exp();
        for i in 0..k {
            for j in 0..k {
                exp_blocks[(start + i, start + j)] = block[(i, j)];
            }
        }
    }

    let full = basis * exp_blocks * inv;
    let value = full.map(|z| z.re);
    Ok(EigenExp { value, condition })
}

/// Taylor series of `exp(n)` for a matrix with small norm.
fn shifted_taylor_exp(n: &DMatrix<C64>) -> DMatrix<C64> {
    let k = n.nrows();
    let mut sum = DMatrix::<C64>::identity(k, k);
    let mut term = DMatrix::<C64>::identity(k, k);
    for order in 1..60 {
        term = &term * n / C64::new(order as f64, 0.0);
        sum += &term;
        if term.norm() < 1e-18 {
            break;
        }
    }
    sum
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

const THETA13: f64 = 5.371920351148152;

/// Scaling-and-squaring with a degree-13 Padé approximant.
pub fn expm_pade(m: &Matrix4<f64>) -> Matrix4<f64> {
    let norm1 = (0..4)
        .map(|j| m.column(j).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm1 > THETA13 {
        (norm1 / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = m / 2f64.powi(squarings);
    let b = &PADE13;
    let id = Matrix4::<f64>::identity();
    let a2 = a * a;
    let a4 = a2 * a2;
    let a6 = a4 * a2;
    let u = a
        * (a6 * (a6 * b[13] + a4 * b[11] + a2 * b[9])
            + a6 * b[7]
            + a4 * b[5]
            + a2 * b[3]
            + id * b[1]);
    let v =
        a6 * (a6 * b[12] + a4 * b[10] + a2 * b[8]) + a6 * b[6] + a4 * b[4] + a2 * b[2] + id * b[0];
    let denom = v - u;
    // The Padé denominator is nonsingular for ||a||_1 <= THETA13.
    let mut r = denom
        .lu()
        .solve(&(v + u))
        .expect("Padé denominator is singular");
    for _ in 0..squarings {
        r = r * r;
    }
    r
}

/// Frobenius norm of `s Ω sᵀ - Ω`.
pub fn symplectic_defect(s: &Matrix4<f64>) -> Result<f64> {
    check_finite(s, "symplectic candidate")?;
    let om = omega();
    Ok((s * om * s.transpose() - om).norm())
}

/// A validated dense Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermMat {
    entries: DMatrix<C64>,
}

/// Smallest eigenvalue together with a unit eigenvector.
#[derive(Debug, Clone)]
pub struct MinEigen {
    pub value: f64,
    pub vector: DVector<C64>,
}

impl HermMat {
    /// Accepts `m` if `|m_ij - conj(m_ji)| <= 1e-12` everywhere.
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        Self::with_tolerance(m, HERMITIAN_TOL)
    }

    pub fn with_tolerance(m: DMatrix<C64>, tolerance: f64) -> Result<Self> {
        if m.nrows() == 0 || m.nrows() != m.ncols() {
            return Err(Error::InvalidArgument(format!(
                "Hermitian matrix must be square and non-empty, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument(
                "matrix has non-finite entries".into(),
            ));
        }
        let n = m.nrows();
        let mut deviation: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                deviation = deviation.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        if deviation > tolerance {
            return Err(Error::NotHermitian {
                deviation,
                tolerance,
            });
        }
        let entries = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        Ok(Self { entries })
    }

    pub fn from_real(m: DMatrix<f64>) -> Result<Self> {
        Self::new(m.map(|v| C64::new(v, 0.0)))
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: DMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<C64> {
        self.entries
    }

    /// Principal submatrix on the leading `k` rows and columns.
    pub fn leading(&self, k: usize) -> HermMat {
        HermMat {
            entries: self.entries.view((0, 0), (k, k)).into_owned(),
        }
    }

    /// All eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let eig = self.decompose()?;
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        Ok(vals)
    }

    pub fn min_eigen(&self) -> Result<MinEigen> {
        let eig = self.decompose()?;
        let (idx, &value) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(std::cmp::Ordering::Equal))
            .expect("non-empty matrix");
        let mut vector = eig.eigenvectors.column(idx).into_owned();
        let nrm = vector.norm();
        vector /= C64::new(nrm, 0.0);
        // Fix the global phase so the output is reproducible.
        if let Some(pivot) = vector.iter().copied().max_by(|a, b| {
            a.norm()
                .partial_cmp(&b.norm())
                .unwrap_or(std::cmp::Ordering::Equal)
        }) {
            let phase = pivot / pivot.norm();
            vector /= phase;
        }

        let norm = self.entries.norm();
        let residual = (&self.entries * &vector - &vector * C64::new(value, 0.0)).norm();
        if residual > 1e-10 * norm.max(f64::MIN_POSITIVE) {
            return Err(Error::Numeric(format!(
                "minimum eigenpair residual {residual:e} exceeds 1e-10 * |h| = {:e} (dim {})",
                1e-10 * norm,
                self.dim()
            )));
        }
        Ok(MinEigen { value, vector })
    }

    fn decompose(&self) -> Result<SymmetricEigen<C64, nalgebra::Dyn>> {
        SymmetricEigen::try_new(self.entries.clone(), f64::EPSILON, 10_000).ok_or(
            Error::EigenNonConvergence {
                dim: self.dim(),
                norm: self.entries.norm(),
            },
        )
    }
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(h: &HermMat) -> Result<f64> {
    Ok(h.min_eigen()?.value)
}
