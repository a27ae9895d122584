//! The weight structure: a positive semidefinite weight `A` with its cached
//! square root, pseudoinverses and range decomposition, the membership
//! predicate for the algebra of operators that leave the kernel of `A`
//! invariant, canonical adjoints and the weighted operator seminorm.
//!
//! Membership in `M^A` (operators admitting an `A^{1/2}`-adjoint) is decided
//! by the block criterion `||(I - P) T* P|| <= residual_tol * (1 + ||T||)`:
//! in finite dimension a weight is automatically well-supported, so admitting
//! an adjoint is the same as leaving the numeric null space invariant, and
//! the two membership algebras in the literature coincide. This module
//! exposes the single predicate.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::tolerance::ToleranceConfig;

/// A nonzero positive semidefinite weight with every derived object cached
/// at construction: the PSD square root, the rank-truncated pseudoinverses,
/// the range projector `P = U U*` and orthonormal bases of the numeric range
/// and kernel. Immutable afterwards; safe to share across threads.
#[derive(Debug, Clone)]
pub struct PositiveWeight {
    a: CMatrix,
    sqrt_a: CMatrix,
    sqrt_a_pinv: CMatrix,
    a_pinv: CMatrix,
    projector: CMatrix,
    range: CMatrix,
    kernel: CMatrix,
    rank: usize,
    min_pos_eig: f64,
    tol: ToleranceConfig,
}

impl PositiveWeight {
    /// Builds the weight structure from a Hermitian PSD matrix.
    ///
    /// The numeric rank is decided by the relative cutoff
    /// `rank_rel_tol * lambda_max`; eigenvalues in the clamp window
    /// `[-psd_clamp_tol * lambda_max, 0)` are clamped to zero.
    pub fn new(a: CMatrix, tol: ToleranceConfig) -> Result<Self> {
        tol.validate()?;
        linalg::require_square(&a)?;
        linalg::require_finite(&a)?;

        let es = linalg::hermitian_eig(&a, &tol)?;
        let n = a.nrows();
        let lambda_max = es.values.iter().map(|z| z.re).fold(0.0f64, f64::max);
        let clamp = tol.psd_clamp_tol * lambda_max.abs().max(linalg::op_norm(&a));
        for z in &es.values {
            if z.re < -clamp {
                return Err(Error::NotPsd {
                    eigenvalue: z.re,
                    bound: -clamp,
                });
            }
        }
        let cutoff = tol.rank_rel_tol * lambda_max;
        let vectors = es.right_vectors.expect("hermitian_eig returns vectors");

        // Split eigenpairs at the rank cutoff; range basis ordered by
        // descending eigenvalue for determinism.
        let mut retained: Vec<(f64, usize)> = Vec::new();
        let mut dropped: Vec<usize> = Vec::new();
        for (i, z) in es.values.iter().enumerate() {
            if z.re > cutoff {
                retained.push((z.re, i));
            } else {
                dropped.push(i);
            }
        }
        retained.sort_by(|x, y| y.0.total_cmp(&x.0));
        let rank = retained.len();
        if rank == 0 {
            return Err(Error::ZeroWeight);
        }
        let min_pos_eig = retained.last().expect("rank >= 1").0;

        let mut range = CMatrix::zeros(n, rank);
        for (dst, (_, src)) in retained.iter().enumerate() {
            range.set_column(dst, &vectors.column(*src));
        }
        let mut kernel = CMatrix::zeros(n, n - rank);
        for (dst, src) in dropped.iter().enumerate() {
            kernel.set_column(dst, &vectors.column(*src));
        }
        let projector = &range * range.adjoint();

        // Square root and pseudoinverses all truncated at the numeric rank:
        // sub-cutoff eigenvalues are noise, and their square roots (of order
        // sqrt(eps)) would otherwise leak above the membership tolerance.
        // The truncation error of sqrt_a^2 against A stays below the rank
        // cutoff, well inside residual_tol * ||A||.
        let mut sqrt_a = CMatrix::zeros(n, n);
        let mut sqrt_a_pinv = CMatrix::zeros(n, n);
        let mut a_pinv = CMatrix::zeros(n, n);
        for (lam, src) in &retained {
            let v = vectors.column(*src);
            let outer = &v * v.adjoint();
            sqrt_a += outer.map(|z| z * Complex64::new(lam.sqrt(), 0.0));
            sqrt_a_pinv += outer.map(|z| z / Complex64::new(lam.sqrt(), 0.0));
            a_pinv += outer.map(|z| z / Complex64::new(*lam, 0.0));
        }
        let sqrt_a = (&sqrt_a + sqrt_a.adjoint()).scale(0.5);

        Ok(Self {
            a,
            sqrt_a,
            sqrt_a_pinv,
            a_pinv,
            projector,
            range,
            kernel,
            rank,
            min_pos_eig,
            tol,
        })
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn min_pos_eig(&self) -> f64 {
        self.min_pos_eig
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.a
    }

    pub fn sqrt(&self) -> &CMatrix {
        &self.sqrt_a
    }

    pub fn sqrt_pinv(&self) -> &CMatrix {
        &self.sqrt_a_pinv
    }

    pub fn pinv(&self) -> &CMatrix {
        &self.a_pinv
    }

    /// Orthogonal projector onto the numeric range of `A`.
    pub fn projector(&self) -> &CMatrix {
        &self.projector
    }

    /// `n x r` orthonormal basis of the numeric range.
    pub fn range_basis(&self) -> &CMatrix {
        &self.range
    }

    /// `n x (n - r)` orthonormal basis of the numeric kernel.
    pub fn kernel_basis(&self) -> &CMatrix {
        &self.kernel
    }

    pub fn tolerances(&self) -> &ToleranceConfig {
        &self.tol
    }

    fn require_dim(&self, t: &CMatrix) -> Result<()> {
        if t.nrows() != self.dim() || t.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: format!("{0}x{0}", self.dim()),
                got: format!("{}x{}", t.nrows(), t.ncols()),
            });
        }
        Ok(())
    }

    /// The weighted vector seminorm `sqrt(<A h, h>)`.
    pub fn vector_a_norm(&self, h: &CVector) -> Result<f64> {
        if h.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: format!("{}", self.dim()),
                got: format!("{}", h.len()),
            });
        }
        let q = (h.adjoint() * &self.a * h)[(0, 0)].re;
        Ok(q.max(0.0).sqrt())
    }

    /// `||(I - P) T* P||`, the defect of the membership criterion. Zero (up
    /// to rounding) exactly when `T` leaves the numeric kernel of `A`
    /// invariant.
    pub fn member_defect(&self, t: &CMatrix) -> Result<f64> {
        self.require_dim(t)?;
        // (I - P) T* P = V (V* T* U) U* with isometries V, U.
        Ok(linalg::op_norm(
            &(self.kernel.adjoint() * t.adjoint() * &self.range),
        ))
    }

    /// Membership in `M^A`: `||(I - P) T* P|| <= residual_tol * (1 + ||T||)`.
    pub fn is_member(&self, t: &CMatrix) -> Result<bool> {
        let defect = self.member_defect(t)?;
        Ok(defect <= self.tol.residual_tol * (1.0 + linalg::op_norm(t)))
    }

    fn require_member(&self, t: &CMatrix) -> Result<()> {
        let defect = self.member_defect(t)?;
        let bound = self.tol.residual_tol * (1.0 + linalg::op_norm(t));
        if defect > bound {
            return Err(Error::NotInMemberAlgebra { defect, bound });
        }
        Ok(())
    }

    /// The canonical A-adjoint `S = A^dag T* A`, the unique solution of
    /// `A S = T* A` that vanishes off the range block.
    pub fn a_adjoint(&self, t: &CMatrix) -> Result<CMatrix> {
        self.require_member(t)?;
        Ok(&self.a_pinv * t.adjoint() * &self.a)
    }

    /// The canonical `A^{1/2}`-adjoint `L = (A^{1/2} T (A^{1/2})^dag)*`,
    /// satisfying `A^{1/2} T = L* A^{1/2}` on the range block.
    pub fn half_adjoint(&self, t: &CMatrix) -> Result<CMatrix> {
        self.require_member(t)?;
        Ok((&self.sqrt_a * t * &self.sqrt_a_pinv).adjoint())
    }

    /// The weighted operator seminorm `||T||_A = ||A^{1/2} T (A^{1/2})^dag||`.
    ///
    /// Non-members do not raise: they report `+inf`, the honest value of the
    /// supremum definition.
    pub fn seminorm(&self, t: &CMatrix) -> Result<f64> {
        self.require_dim(t)?;
        if !self.is_member(t)? {
            return Ok(f64::INFINITY);
        }
        Ok(linalg::op_norm(&(&self.sqrt_a * t * &self.sqrt_a_pinv)))
    }

    /// Assembles a member from its blocks in the (range, kernel)
    /// decomposition: `T = W [[B, 0], [M, K]] W*` with `W = [U V]`.
    /// Such operators are members by construction.
    pub fn member_from_blocks(
        &self,
        range_block: &CMatrix,
        mixing_block: &CMatrix,
        kernel_block: &CMatrix,
    ) -> Result<CMatrix> {
        let r = self.rank;
        let k = self.dim() - self.rank;
        if range_block.shape() != (r, r)
            || mixing_block.shape() != (k, r)
            || kernel_block.shape() != (k, k)
        {
            return Err(Error::DimensionMismatch {
                expected: format!("blocks ({r}x{r}, {k}x{r}, {k}x{k})"),
                got: format!(
                    "({}x{}, {}x{}, {}x{})",
                    range_block.nrows(),
                    range_block.ncols(),
                    mixing_block.nrows(),
                    mixing_block.ncols(),
                    kernel_block.nrows(),
                    kernel_block.ncols()
                ),
            });
        }
        let u = &self.range;
        let v = &self.kernel;
        Ok(u * range_block * u.adjoint()
            + v * mixing_block * u.adjoint()
            + v * kernel_block * v.adjoint())
    }
}

/// An operator together with its membership verdict and, for members, the
/// canonical adjoints and the cached seminorm. All caches are filled at
/// construction.
#[derive(Debug, Clone)]
pub struct AOperator {
    matrix: CMatrix,
    in_member_algebra: bool,
    sharp: Option<CMatrix>,
    half_adjoint: Option<CMatrix>,
    seminorm: Option<f64>,
}

impl AOperator {
    pub fn new(weight: &PositiveWeight, matrix: CMatrix) -> Result<Self> {
        linalg::require_finite(&matrix)?;
        let in_member_algebra = weight.is_member(&matrix)?;
        let (sharp, half_adjoint, seminorm) = if in_member_algebra {
            (
                Some(weight.a_adjoint(&matrix)?),
                Some(weight.half_adjoint(&matrix)?),
                Some(weight.seminorm(&matrix)?),
            )
        } else {
            (None, None, None)
        };
        Ok(Self {
            matrix,
            in_member_algebra,
            sharp,
            half_adjoint,
            seminorm,
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn is_member(&self) -> bool {
        self.in_member_algebra
    }

    pub fn sharp(&self) -> Option<&CMatrix> {
        self.sharp.as_ref()
    }

    pub fn half_adjoint(&self) -> Option<&CMatrix> {
        self.half_adjoint.as_ref()
    }

    /// Cached seminorm; `+inf` for non-members.
    pub fn seminorm(&self) -> f64 {
        self.seminorm.unwrap_or(f64::INFINITY)
    }
}

/// One standard-normal draw (Box-Muller).
fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn complex_gaussian(rng: &mut ChaCha8Rng, scale: f64) -> Complex64 {
    Complex64::new(standard_normal(rng) * scale, standard_normal(rng) * scale)
}

pub(crate) fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> CMatrix {
    // from_fn visits column-major; draw row-major for a stable layout-independent stream.
    let mut m = CMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = complex_gaussian(rng, scale);
        }
    }
    m
}

pub(crate) fn gaussian_vector(rng: &mut ChaCha8Rng, len: usize, scale: f64) -> CVector {
    CVector::from_fn(len, |_, _| complex_gaussian(rng, scale))
}

/// Haar-like random unitary: Q factor of a complex Gaussian matrix.
pub fn haar_like_unitary(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    gaussian_matrix(rng, n, n, 1.0).qr().q()
}

/// Seeded random weight `A = Q diag(d_1 .. d_rank, 0 .. 0) Q*` with `Q`
/// Haar-like and `d_i` log-uniform in `[1/spread, spread]`. Deterministic
/// per seed.
pub fn random_weight(
    seed: u64,
    n: usize,
    rank: usize,
    spread: f64,
    tol: ToleranceConfig,
) -> Result<PositiveWeight> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_weight_with(&mut rng, n, rank, spread, tol)
}

/// Same construction driven by an already-running generator.
pub(crate) fn random_weight_with(
    rng: &mut ChaCha8Rng,
    n: usize,
    rank: usize,
    spread: f64,
    tol: ToleranceConfig,
) -> Result<PositiveWeight> {
    if rank == 0 || rank > n {
        return Err(Error::InvalidRank { rank, dim: n });
    }
    if !(spread >= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "spread must be >= 1, got {spread}"
        )));
    }
    let q = haar_like_unitary(rng, n);
    let ln_spread = spread.ln();
    let mut d = CVector::zeros(n);
    for i in 0..rank {
        let u: f64 = rng.gen::<f64>() * 2.0 - 1.0;
        d[i] = Complex64::new((u * ln_spread).exp(), 0.0);
    }
    let a = &q * CMatrix::from_diagonal(&d) * q.adjoint();
    let a = (&a + a.adjoint()).scale(0.5);
    PositiveWeight::new(a, tol)
}

/// Seeded random member of `M^A`: block-lower in the (range, kernel)
/// decomposition with complex Gaussian blocks scaled by `scale`.
/// Deterministic per seed.
pub fn random_member(seed: u64, weight: &PositiveWeight, scale: f64) -> Result<AOperator> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = random_member_with(&mut rng, weight, scale)?;
    AOperator::new(weight, t)
}

/// Draws a member using an already-running generator (for fuzz trials that
/// consume several members per seed).
pub(crate) fn random_member_with(
    rng: &mut ChaCha8Rng,
    weight: &PositiveWeight,
    scale: f64,
) -> Result<CMatrix> {
    let r = weight.rank();
    let k = weight.dim() - r;
    let t11 = gaussian_matrix(rng, r, r, scale);
    let t21 = gaussian_matrix(rng, k, r, scale);
    let t22 = gaussian_matrix(rng, k, k, scale);
    weight.member_from_blocks(&t11, &t21, &t22)
}
