//! Dense complex linear algebra: eigendecompositions, SVD-based
//! pseudoinverse, PSD square root, range bases and operator norms.
//!
//! The decompositions are backed by nalgebra; this module pins the
//! tolerance policy (relative rank cutoffs, iteration budgets, residual
//! certification) on top of them.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance::ToleranceConfig;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// QR-iteration budget, in sweeps, for an `n`-dimensional problem. Once the
/// budget is exhausted we raise `ConvergenceFailure` rather than return
/// unvetted values.
pub fn sweep_budget(n: usize) -> usize {
    30 * n.max(1)
}

pub fn require_square(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(())
}

pub fn require_finite(m: &CMatrix) -> Result<()> {
    for col in 0..m.ncols() {
        for row in 0..m.nrows() {
            let z = m[(row, col)];
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFiniteEntry { row, col });
            }
        }
    }
    Ok(())
}

/// Largest singular value. Returns `+inf` when the matrix holds an
/// infinite entry and NaN when it holds a NaN.
pub fn op_norm(m: &CMatrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    let mut has_nan = false;
    let mut has_inf = false;
    for z in m.iter() {
        if z.re.is_nan() || z.im.is_nan() {
            has_nan = true;
        } else if !z.re.is_finite() || !z.im.is_finite() {
            has_inf = true;
        }
    }
    if has_nan {
        return f64::NAN;
    }
    if has_inf {
        return f64::INFINITY;
    }
    let budget = 1000 + 100 * m.nrows().max(m.ncols());
    match nalgebra::linalg::SVD::try_new(m.clone(), false, false, f64::EPSILON, budget) {
        Some(svd) => svd.singular_values.iter().copied().fold(0.0, f64::max),
        // Frobenius norm is an upper bound; unreachable for finite input in practice.
        None => m.norm(),
    }
}

/// `||M - M*||` in operator norm, the defect used by Hermitian preconditions.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    op_norm(&(m - m.adjoint()))
}

/// Eigenvalue/eigenvector bundle with residual diagnostics.
///
/// `values` always carries dimension-many entries counted with algebraic
/// multiplicity. Vector matrices hold one eigenvector per column, aligned
/// with `values`. Left vectors `w` satisfy `w* M = lambda w*`.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: Vec<Complex64>,
    pub right_vectors: Option<CMatrix>,
    pub left_vectors: Option<CMatrix>,
    /// Largest certified residual `||M v - lambda v||` (absolute).
    pub max_residual: f64,
    /// Eigenvalues inside a cluster (nearest-neighbor gap below
    /// `ToleranceConfig::cluster_gap`) skip the per-vector residual check;
    /// this counts how many were skipped. Diagnostic, not an error.
    pub skipped_vector_checks: usize,
}

/// Hermitian eigendecomposition with eigenvalues in ascending order and a
/// unitary column basis.
pub fn hermitian_eig(m: &CMatrix, tol: &ToleranceConfig) -> Result<EigenSystem> {
    require_square(m)?;
    require_finite(m)?;
    let n = m.nrows();
    let scale = op_norm(m);
    let defect = hermitian_defect(m);
    if defect > tol.residual_tol * scale {
        return Err(Error::NotHermitian {
            asymmetry: defect,
            bound: tol.residual_tol * scale,
        });
    }
    // Exactly diagonal input (shift-lab weights, diagonal fuzz weights) is
    // decomposed trivially: QR-iteration noise is absolute in ||M|| and would
    // destroy the relative accuracy of eigenvalues many orders below it.
    let exactly_diagonal = (0..n).all(|i| {
        m[(i, i)].im == 0.0
            && (0..n).all(|j| j == i || m[(i, j)] == Complex64::new(0.0, 0.0))
    });
    if exactly_diagonal {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
        let values: Vec<Complex64> = order.iter().map(|&i| m[(i, i)]).collect();
        let mut vectors = CMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            vectors[(src, dst)] = Complex64::new(1.0, 0.0);
        }
        return Ok(EigenSystem {
            values,
            right_vectors: Some(vectors),
            left_vectors: None,
            max_residual: 0.0,
            skipped_vector_checks: 0,
        });
    }

    // Symmetrize before decomposing so the result is exactly Hermitian-consistent.
    let h = (m + m.adjoint()).scale(0.5);
    let budget = sweep_budget(n);
    let se = nalgebra::linalg::SymmetricEigen::try_new(h, f64::EPSILON, budget)
        .ok_or(Error::ConvergenceFailure { sweeps: budget })?;

    // nalgebra returns the pairs unordered; sort ascending.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].total_cmp(&se.eigenvalues[j]));
    let values: Vec<Complex64> = order
        .iter()
        .map(|&i| Complex64::new(se.eigenvalues[i], 0.0))
        .collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &se.eigenvectors.column(src));
    }

    let recon = &vectors
        * CMatrix::from_diagonal(&CVector::from_iterator(n, values.iter().copied()))
        * vectors.adjoint();
    let max_residual = op_norm(&(recon - m));

    Ok(EigenSystem {
        values,
        right_vectors: Some(vectors),
        left_vectors: None,
        max_residual,
        skipped_vector_checks: 0,
    })
}

/// General (non-Hermitian) eigendecomposition via Hessenberg reduction and
/// shifted QR iteration, with an iteration budget of `30 n` sweeps.
pub fn general_eig(m: &CMatrix, want_vectors: bool, tol: &ToleranceConfig) -> Result<EigenSystem> {
    require_square(m)?;
    require_finite(m)?;
    let n = m.nrows();
    if n == 0 {
        return Ok(EigenSystem {
            values: Vec::new(),
            right_vectors: None,
            left_vectors: None,
            max_residual: 0.0,
            skipped_vector_checks: 0,
        });
    }
    let scale = op_norm(m);

    // Already-triangular inputs (the zero matrix included) bypass the QR
    // iteration: its deflation test never fires when the active block is
    // exactly zero.
    let mut max_lower = 0.0f64;
    for col in 0..n {
        for row in (col + 1)..n {
            max_lower = max_lower.max(m[(row, col)].norm());
        }
    }
    let (q, t) = if max_lower <= f64::EPSILON * scale {
        let mut t = m.clone();
        for col in 0..n {
            for row in (col + 1)..n {
                t[(row, col)] = Complex64::new(0.0, 0.0);
            }
        }
        (CMatrix::identity(n, n), t)
    } else {
        complex_schur(m)?
    };

    let values: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();

    if !want_vectors {
        let recon_residual = op_norm(&(&q * &t * q.adjoint() - m));
        return Ok(EigenSystem {
            values,
            right_vectors: None,
            left_vectors: None,
            max_residual: recon_residual,
            skipped_vector_checks: 0,
        });
    }

    // Eigenvectors of the triangular factor by back/forward substitution,
    // lifted through the Schur basis.
    let smin = f64::EPSILON * scale.max(f64::MIN_POSITIVE);
    let mut right = CMatrix::zeros(n, n);
    let mut left = CMatrix::zeros(n, n);
    for k in 0..n {
        let y = triangular_right_eigvec(&t, k, smin);
        let v = (&q * y).normalize();
        right.set_column(k, &v);
        let u = triangular_left_eigvec(&t, k, smin);
        let w = (&q * u).normalize();
        left.set_column(k, &w);
    }

    // Residual certification only for well-separated eigenvalues.
    let gap_floor = tol.cluster_gap();
    let mut max_residual = 0.0f64;
    let mut skipped = 0usize;
    for k in 0..n {
        let gap = (0..n)
            .filter(|&j| j != k)
            .map(|j| (values[k] - values[j]).norm())
            .fold(f64::INFINITY, f64::min);
        if gap <= gap_floor {
            skipped += 1;
            continue;
        }
        let v = right.column(k);
        let r_res = (m * v - v.scale_complex(values[k])).norm();
        let w = left.column(k);
        let l_res = (m.adjoint() * w - w.scale_complex(values[k].conj())).norm();
        max_residual = max_residual.max(r_res).max(l_res);
    }

    Ok(EigenSystem {
        values,
        right_vectors: Some(right),
        left_vectors: Some(left),
        max_residual,
        skipped_vector_checks: skipped,
    })
}

/// Complex Schur decomposition `M = Q T Q*` with `Q` unitary and `T` upper
/// triangular: Householder reduction to Hessenberg form followed by
/// Wilkinson-shifted QR iteration with deflation, within the sweep budget.
pub fn complex_schur(m: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let n = m.nrows();
    let budget = sweep_budget(n);
    let (mut q, mut h) = hessenberg(m);
    let hnorm = h.norm().max(f64::MIN_POSITIVE);

    // Deflation test: a subdiagonal entry is negligible against its
    // neighboring diagonal entries (with the matrix norm as a fallback scale
    // when those vanish).
    let negligible = |h: &CMatrix, i: usize| -> bool {
        let mut tst = h[(i, i)].norm() + h[(i + 1, i + 1)].norm();
        if tst == 0.0 {
            tst = hnorm;
        }
        h[(i + 1, i)].norm() <= f64::EPSILON * tst
    };

    let mut hi = n - 1;
    let mut sweeps = 0usize;
    let mut stagnation = 0usize;
    'deflate: loop {
        // clear converged subdiagonals
        for i in 0..hi {
            if negligible(&h, i) {
                h[(i + 1, i)] = Complex64::new(0.0, 0.0);
            }
        }
        // shrink the active window from the bottom
        while hi > 0 && h[(hi, hi - 1)] == Complex64::new(0.0, 0.0) {
            hi -= 1;
            stagnation = 0;
        }
        if hi == 0 {
            break 'deflate;
        }
        // top of the active block
        let mut lo = hi;
        while lo > 0 && h[(lo, lo - 1)] != Complex64::new(0.0, 0.0) {
            lo -= 1;
        }

        if sweeps >= budget {
            return Err(Error::ConvergenceFailure { sweeps });
        }
        sweeps += 1;
        stagnation += 1;

        // Wilkinson shift: the eigenvalue of the trailing 2x2 block closest
        // to the bottom corner; an exceptional shift breaks stagnation.
        let shift = if stagnation % 12 == 0 {
            h[(hi, hi)] + Complex64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            let a = h[(hi - 1, hi - 1)];
            let b = h[(hi - 1, hi)];
            let c = h[(hi, hi - 1)];
            let d = h[(hi, hi)];
            let tr = a + d;
            let det = a * d - b * c;
            let disc = (tr * tr - det.scale(4.0)).sqrt();
            let r1 = (tr + disc).scale(0.5);
            let r2 = (tr - disc).scale(0.5);
            if (r1 - d).norm() <= (r2 - d).norm() {
                r1
            } else {
                r2
            }
        };

        // implicit single-shift QR sweep on [lo, hi]
        let mut x = h[(lo, lo)] - shift;
        let mut z = h[(lo + 1, lo)];
        for k in lo..hi {
            let (c, s) = givens(x, z);
            // left rotation on rows (k, k+1)
            let col_start = k.saturating_sub(1);
            for col in col_start..n {
                let a = h[(k, col)];
                let b = h[(k + 1, col)];
                h[(k, col)] = a.scale(c) + s * b;
                h[(k + 1, col)] = -s.conj() * a + b.scale(c);
            }
            // right rotation on columns (k, k+1)
            let row_end = (k + 3).min(hi + 1);
            for row in 0..row_end {
                let a = h[(row, k)];
                let b = h[(row, k + 1)];
                h[(row, k)] = a.scale(c) + s.conj() * b;
                h[(row, k + 1)] = -s * a + b.scale(c);
            }
            for row in 0..n {
                let a = q[(row, k)];
                let b = q[(row, k + 1)];
                q[(row, k)] = a.scale(c) + s.conj() * b;
                q[(row, k + 1)] = -s * a + b.scale(c);
            }
            if k + 1 < hi {
                x = h[(k + 1, k)];
                z = h[(k + 2, k)];
            }
        }
        // the sweep only touches the Hessenberg pattern; scrub rounding junk
        // below the subdiagonal
        for col in 0..n {
            for row in (col + 2)..n {
                h[(row, col)] = Complex64::new(0.0, 0.0);
            }
        }
    }

    // exact upper-triangular form
    for col in 0..n {
        for row in (col + 1)..n {
            h[(row, col)] = Complex64::new(0.0, 0.0);
        }
    }
    Ok((q, h))
}

/// Unitary Givens rotation `G = [[c, s], [-conj(s), c]]` with real `c >= 0`
/// such that `G [a, b]^T = [r, 0]^T`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    if b == Complex64::new(0.0, 0.0) {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if a == Complex64::new(0.0, 0.0) {
        // r = |b|, s = b-phase conjugated
        let babs = b.norm();
        return (0.0, (b / Complex64::new(babs, 0.0)).conj());
    }
    let aabs = a.norm();
    let scale = aabs.max(b.norm());
    let norm = scale * ((a / Complex64::new(scale, 0.0)).norm_sqr()
        + (b / Complex64::new(scale, 0.0)).norm_sqr())
    .sqrt();
    let c = aabs / norm;
    let s = (a / Complex64::new(aabs, 0.0)) * b.conj() / Complex64::new(norm, 0.0);
    (c, s)
}

/// Householder reduction to upper Hessenberg form: returns `(Q, H)` with
/// `M = Q H Q*`.
fn hessenberg(m: &CMatrix) -> (CMatrix, CMatrix) {
    let n = m.nrows();
    let mut h = m.clone();
    let mut q = CMatrix::identity(n, n);
    if n < 3 {
        return (q, h);
    }
    for k in 0..(n - 2) {
        // reflect column k below the subdiagonal onto e_{k+1}
        let mut v = CVector::zeros(n - k - 1);
        for i in 0..v.len() {
            v[i] = h[(k + 1 + i, k)];
        }
        let xnorm = v.norm();
        if xnorm == 0.0 {
            continue;
        }
        let phase = if v[0] == Complex64::new(0.0, 0.0) {
            Complex64::new(1.0, 0.0)
        } else {
            v[0] / Complex64::new(v[0].norm(), 0.0)
        };
        v[0] += phase * Complex64::new(xnorm, 0.0);
        let vnorm_sq = v.norm_squared();
        if vnorm_sq == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm_sq;

        // H <- P H with P = I - beta v v* acting on rows k+1..n
        for col in 0..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for i in 0..v.len() {
                dot += v[i].conj() * h[(k + 1 + i, col)];
            }
            dot = dot.scale(beta);
            for i in 0..v.len() {
                let update = v[i] * dot;
                h[(k + 1 + i, col)] -= update;
            }
        }
        // H <- H P on columns k+1..n
        for row in 0..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for i in 0..v.len() {
                dot += h[(row, k + 1 + i)] * v[i];
            }
            dot = dot.scale(beta);
            for i in 0..v.len() {
                let update = dot * v[i].conj();
                h[(row, k + 1 + i)] -= update;
            }
        }
        // Q <- Q P
        for row in 0..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for i in 0..v.len() {
                dot += q[(row, k + 1 + i)] * v[i];
            }
            dot = dot.scale(beta);
            for i in 0..v.len() {
                let update = dot * v[i].conj();
                q[(row, k + 1 + i)] -= update;
            }
        }
        // exact zeros below the new subdiagonal entry
        for i in (k + 2)..n {
            h[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
    (q, h)
}

trait ScaleComplex {
    type Output;
    fn scale_complex(&self, z: Complex64) -> Self::Output;
}

impl ScaleComplex for nalgebra::DVectorView<'_, Complex64> {
    type Output = CVector;
    fn scale_complex(&self, z: Complex64) -> CVector {
        self.map(|x| x * z)
    }
}

fn triangular_right_eigvec(t: &CMatrix, k: usize, smin: f64) -> CVector {
    let n = t.nrows();
    let lambda = t[(k, k)];
    let mut y = CVector::zeros(n);
    y[k] = Complex64::new(1.0, 0.0);
    for i in (0..k).rev() {
        let mut s = Complex64::new(0.0, 0.0);
        for j in (i + 1)..=k {
            s += t[(i, j)] * y[j];
        }
        let mut den = t[(i, i)] - lambda;
        if den.norm() < smin {
            den = Complex64::new(smin, 0.0);
        }
        y[i] = -s / den;
    }
    y
}

fn triangular_left_eigvec(t: &CMatrix, k: usize, smin: f64) -> CVector {
    let n = t.nrows();
    let lambda = t[(k, k)];
    // u solves sum_i u_i t[i, j] = lambda u_j for j > k with u_k = 1;
    // conj(u) is then a left eigenvector of t.
    let mut u = CVector::zeros(n);
    u[k] = Complex64::new(1.0, 0.0);
    for j in (k + 1)..n {
        let mut s = Complex64::new(0.0, 0.0);
        for i in k..j {
            s += u[i] * t[(i, j)];
        }
        let mut den = lambda - t[(j, j)];
        if den.norm() < smin {
            den = Complex64::new(smin, 0.0);
        }
        u[j] = s / den;
    }
    u.map(|z| z.conj())
}

/// Moore-Penrose pseudoinverse by SVD. Singular values at or below
/// `rank_rel_tol * sigma_max` are treated as zero; returns the retained count.
pub fn pinv(m: &CMatrix, tol: &ToleranceConfig) -> Result<(CMatrix, usize)> {
    require_finite(m)?;
    let (rows, cols) = (m.nrows(), m.ncols());
    if rows == 0 || cols == 0 {
        return Ok((CMatrix::zeros(cols, rows), 0));
    }
    let budget = 1000 + 100 * rows.max(cols);
    let svd = nalgebra::linalg::SVD::try_new(m.clone(), true, true, f64::EPSILON, budget)
        .ok_or(Error::ConvergenceFailure { sweeps: budget })?;
    let u = svd.u.as_ref().expect("svd requested u");
    let v_t = svd.v_t.as_ref().expect("svd requested v_t");
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cutoff = tol.rank_rel_tol * sigma_max;
    let mut rank = 0usize;
    let k = svd.singular_values.len();
    let mut inv_sigma = CMatrix::zeros(k, k);
    for i in 0..k {
        let s = svd.singular_values[i];
        if s > cutoff {
            inv_sigma[(i, i)] = Complex64::new(1.0 / s, 0.0);
            rank += 1;
        }
    }
    let pinv = v_t.adjoint() * inv_sigma * u.adjoint();
    Ok((pinv, rank))
}

/// Hermitian PSD square root. Eigenvalues in `[-psd_clamp_tol * ||M||, 0)`
/// are clamped to zero; anything below that bound is rejected.
pub fn psd_sqrt(m: &CMatrix, tol: &ToleranceConfig) -> Result<CMatrix> {
    let es = hermitian_eig(m, tol)?;
    let scale = es
        .values
        .iter()
        .map(|z| z.re.abs())
        .fold(0.0f64, f64::max);
    let clamp = tol.psd_clamp_tol * scale;
    let n = m.nrows();
    let mut roots = CVector::zeros(n);
    for (i, z) in es.values.iter().enumerate() {
        let lam = z.re;
        if lam < -clamp {
            return Err(Error::NotPsd {
                eigenvalue: lam,
                bound: -clamp,
            });
        }
        roots[i] = Complex64::new(lam.max(0.0).sqrt(), 0.0);
    }
    let v = es.right_vectors.expect("hermitian_eig returns vectors");
    let s = &v * CMatrix::from_diagonal(&roots) * v.adjoint();
    Ok((&s + s.adjoint()).scale(0.5))
}

/// Orthonormal basis of the numeric range together with the orthogonal
/// projector onto it.
#[derive(Debug, Clone)]
pub struct RangeBasis {
    /// `P = U U*`, the orthogonal projector onto the numeric range.
    pub projector: CMatrix,
    /// `n x r` with orthonormal columns.
    pub basis: CMatrix,
    pub rank: usize,
}

pub fn range_basis(m: &CMatrix, tol: &ToleranceConfig) -> Result<RangeBasis> {
    require_square(m)?;
    require_finite(m)?;
    let n = m.nrows();
    if n == 0 {
        return Ok(RangeBasis {
            projector: CMatrix::zeros(0, 0),
            basis: CMatrix::zeros(0, 0),
            rank: 0,
        });
    }
    let budget = 1000 + 100 * n;
    let svd = nalgebra::linalg::SVD::try_new(m.clone(), true, false, f64::EPSILON, budget)
        .ok_or(Error::ConvergenceFailure { sweeps: budget })?;
    let u = svd.u.as_ref().expect("svd requested u");
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cutoff = tol.rank_rel_tol * sigma_max;
    let rank = svd.singular_values.iter().filter(|&&s| s > cutoff).count();
    let basis = u.columns(0, rank).into_owned();
    let projector = &basis * basis.adjoint();
    Ok(RangeBasis {
        projector,
        basis,
        rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiset;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    pub(crate) fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
        CMatrix::from_fn(n, n, |_, _| {
            c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        })
    }

    #[test]
    fn hermitian_eig_diagonal() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![c(3., 0.), c(1., 0.), c(2., 0.)]));
        let es = hermitian_eig(&m, &tol()).unwrap();
        let got: Vec<f64> = es.values.iter().map(|z| z.re).collect();
        assert_eq!(got, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn hermitian_eig_analytic_2x2() {
        let m = CMatrix::from_row_slice(2, 2, &[c(2., 0.), c(1., 0.), c(1., 0.), c(2., 0.)]);
        let es = hermitian_eig(&m, &tol()).unwrap();
        assert!((es.values[0].re - 1.0).abs() < 1e-12);
        assert!((es.values[1].re - 3.0).abs() < 1e-12);
    }

    #[test]
    fn hermitian_eig_reconstruction_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = random_matrix(&mut rng, 6);
        let m = (&g + g.adjoint()).scale(0.5);
        let es = hermitian_eig(&m, &tol()).unwrap();
        let scale = op_norm(&m);
        assert!(es.max_residual <= tol().residual_tol * scale);
        let v = es.right_vectors.unwrap();
        // unitary basis
        assert!(op_norm(&(&v * v.adjoint() - CMatrix::identity(6, 6))) < 1e-12);
    }

    #[test]
    fn hermitian_eig_rejects_asymmetric() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(1., 0.), c(0., 0.), c(1., 0.)]);
        assert!(matches!(
            hermitian_eig(&m, &tol()),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn general_eig_nilpotent() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)]);
        let es = general_eig(&m, false, &tol()).unwrap();
        assert!(es.values.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn general_eig_rotation() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(-1., 0.), c(1., 0.), c(0., 0.)]);
        let es = general_eig(&m, false, &tol()).unwrap();
        let dist = multiset::match_distance(&es.values, &[c(0., 1.), c(0., -1.)]);
        assert!(dist < 1e-12);
    }

    /// Newton refinement of integer guesses, the independent root oracle for
    /// the companion-matrix case.
    fn newton_root(coeffs: &[f64], guess: f64) -> f64 {
        let eval = |x: f64| {
            let mut p = 0.0;
            let mut dp = 0.0;
            for &a in coeffs {
                dp = dp * x + p;
                p = p * x + a;
            }
            (p, dp)
        };
        let mut x = guess;
        for _ in 0..60 {
            let (p, dp) = eval(x);
            if dp == 0.0 {
                break;
            }
            let step = p / dp;
            x -= step;
            if step.abs() < 1e-14 {
                break;
            }
        }
        x
    }

    #[test]
    fn general_eig_companion_matrix() {
        // z^3 - 6 z^2 + 11 z - 6
        let coeffs = [1.0, -6.0, 11.0, -6.0];
        let expected: Vec<Complex64> = [1.0, 2.0, 3.0]
            .iter()
            .map(|&g| c(newton_root(&coeffs, g), 0.0))
            .collect();
        let m = CMatrix::from_row_slice(
            3,
            3,
            &[
                c(0., 0.),
                c(0., 0.),
                c(6., 0.),
                c(1., 0.),
                c(0., 0.),
                c(-11., 0.),
                c(0., 0.),
                c(1., 0.),
                c(6., 0.),
            ],
        );
        let es = general_eig(&m, false, &tol()).unwrap();
        assert!(multiset::match_distance(&es.values, &expected) < 1e-9);
    }

    #[test]
    fn general_eig_zero_matrix() {
        let es = general_eig(&CMatrix::zeros(3, 3), true, &tol()).unwrap();
        assert!(es.values.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn general_eig_vector_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for n in [2usize, 5, 8] {
            let m = random_matrix(&mut rng, n);
            let es = general_eig(&m, true, &tol()).unwrap();
            let scale = op_norm(&m);
            assert!(
                es.max_residual <= tol().residual_tol * scale,
                "residual {} at n={n}",
                es.max_residual
            );
        }
    }

    #[test]
    fn general_eig_agrees_with_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let g = random_matrix(&mut rng, 5);
        let m = (&g + g.adjoint()).scale(0.5);
        let he = hermitian_eig(&m, &tol()).unwrap();
        let ge = general_eig(&m, false, &tol()).unwrap();
        let dist = multiset::match_distance(&he.values, &ge.values);
        assert!(dist <= tol().set_match_tol * (1.0 + op_norm(&m)));
    }

    #[test]
    fn pinv_diagonal() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![c(2., 0.), c(0., 0.)]));
        let (p, rank) = pinv(&m, &tol()).unwrap();
        assert_eq!(rank, 1);
        assert!((p[(0, 0)] - c(0.5, 0.)).norm() < 1e-14);
        assert!(p[(1, 1)].norm() < 1e-14);
    }

    #[test]
    fn pinv_unitary_is_adjoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = random_matrix(&mut rng, 4);
        let q = g.qr().q();
        let (p, rank) = pinv(&q, &tol()).unwrap();
        assert_eq!(rank, 4);
        assert!(op_norm(&(&p - q.adjoint())) < 1e-12);
    }

    #[test]
    fn pinv_penrose_identities_rank_deficient() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let a = CMatrix::from_fn(5, 3, |_, _| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        let b = CMatrix::from_fn(3, 5, |_, _| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        let m = &a * &b; // 5x5, rank 3
        let (p, rank) = pinv(&m, &tol()).unwrap();
        assert_eq!(rank, 3);
        let t = tol().residual_tol * (1.0 + op_norm(&m));
        assert!(op_norm(&(&m * &p * &m - &m)) < t);
        assert!(op_norm(&(&p * &m * &p - &p)) < t * (1.0 + op_norm(&p)));
        let mp = &m * &p;
        let pm = &p * &m;
        assert!(op_norm(&(&mp - mp.adjoint())) < t);
        assert!(op_norm(&(&pm - pm.adjoint())) < t);
    }

    #[test]
    fn pinv_zero_matrix() {
        let (p, rank) = pinv(&CMatrix::zeros(3, 3), &tol()).unwrap();
        assert_eq!(rank, 0);
        assert_eq!(op_norm(&p), 0.0);
    }

    #[test]
    fn pinv_involution_on_full_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let m = random_matrix(&mut rng, 5);
        let (p, _) = pinv(&m, &tol()).unwrap();
        let (pp, _) = pinv(&p, &tol()).unwrap();
        assert!(op_norm(&(&pp - &m)) < tol().residual_tol * (1.0 + op_norm(&m)));
    }

    #[test]
    fn psd_sqrt_diagonal() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![c(4., 0.), c(0., 0.)]));
        let s = psd_sqrt(&m, &tol()).unwrap();
        assert!((s[(0, 0)] - c(2., 0.)).norm() < 1e-14);
        assert!(s[(1, 1)].norm() < 1e-14);
    }

    #[test]
    fn psd_sqrt_identity() {
        let s = psd_sqrt(&CMatrix::identity(3, 3), &tol()).unwrap();
        assert!(op_norm(&(&s - CMatrix::identity(3, 3))) < 1e-13);
    }

    #[test]
    fn psd_sqrt_reconstruction_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let b = random_matrix(&mut rng, 6);
        let m = b.adjoint() * &b;
        let s = psd_sqrt(&m, &tol()).unwrap();
        assert!(op_norm(&(&s * &s - &m)) <= tol().residual_tol * op_norm(&m));
    }

    #[test]
    fn psd_sqrt_rejects_indefinite() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1., 0.), c(-0.5, 0.)]));
        assert!(matches!(psd_sqrt(&m, &tol()), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn range_basis_diagonal() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1., 0.), c(0., 0.)]));
        let rb = range_basis(&m, &tol()).unwrap();
        assert_eq!(rb.rank, 1);
        assert!(op_norm(&(&rb.projector - &m)) < 1e-13);
    }

    #[test]
    fn range_basis_invertible_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let m = random_matrix(&mut rng, 4) + CMatrix::identity(4, 4).scale(3.0);
        let rb = range_basis(&m, &tol()).unwrap();
        assert_eq!(rb.rank, 4);
        assert!(op_norm(&(&rb.projector - CMatrix::identity(4, 4))) < 1e-12);
    }

    #[test]
    fn range_basis_outer_product_rank_two() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let x = CVector::from_fn(5, |_, _| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        let y = CVector::from_fn(5, |_, _| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        let m = &x * x.adjoint() + &y * y.adjoint();
        let rb = range_basis(&m, &tol()).unwrap();
        assert_eq!(rb.rank, 2);
        assert!(op_norm(&(&rb.projector * &m - &m)) <= tol().residual_tol * op_norm(&m));
        // projector is idempotent and self-adjoint
        assert!(op_norm(&(&rb.projector * &rb.projector - &rb.projector)) < 1e-12);
        assert!(op_norm(&(&rb.projector - rb.projector.adjoint())) < 1e-12);
    }

    #[test]
    fn range_basis_of_projector_is_projector() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let g = random_matrix(&mut rng, 5);
        let rb = range_basis(&(&g * g.adjoint()), &tol()).unwrap();
        let again = range_basis(&rb.projector, &tol()).unwrap();
        assert_eq!(again.rank, rb.rank);
        assert!(op_norm(&(&again.projector - &rb.projector)) < 1e-12);
    }

    #[test]
    fn schur_handles_clustered_spectra() {
        // near-multiples of projections at several noise amplitudes and
        // scales; these are the compressions of projectors and idempotents
        // this library produces constantly
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in [2usize, 3, 4, 6, 8, 12] {
            for noise_exp in [-17i32, -14, -12, -10, -8, -6] {
                for scale_exp in [-6i32, 0, 6] {
                    for kind in 0..3 {
                        let noise = 10f64.powi(noise_exp);
                        let scale = 10f64.powi(scale_exp);
                        let m = CMatrix::from_fn(n, n, |i, j| {
                            let base = match kind {
                                0 => (i == j) as usize as f64,
                                1 => (i == j && i < n / 2 + 1) as usize as f64,
                                _ => ((i == j) as usize * (i % 2)) as f64,
                            };
                            (c(base, 0.0)
                                + c(
                                    (rng.gen::<f64>() - 0.5) * noise,
                                    (rng.gen::<f64>() - 0.5) * noise,
                                ))
                            .scale(scale)
                        });
                        let (q, t) = complex_schur(&m).unwrap();
                        let recon = &q * &t * q.adjoint();
                        let err = op_norm(&(recon - &m));
                        let bound = 1e-13 * op_norm(&m).max(f64::MIN_POSITIVE);
                        assert!(
                            err <= bound,
                            "n={n} noise=1e{noise_exp} scale=1e{scale_exp} kind={kind}: {err}"
                        );
                        assert!(op_norm(&(&q * q.adjoint() - CMatrix::identity(n, n))) < 1e-13);
                    }
                }
            }
        }
    }

    #[test]
    fn schur_random_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for trial in 0..200 {
            let n = 2 + trial % 11;
            let m = random_matrix(&mut rng, n);
            let (q, t) = complex_schur(&m).unwrap();
            for col in 0..n {
                for row in (col + 1)..n {
                    assert_eq!(t[(row, col)], c(0.0, 0.0));
                }
            }
            let err = op_norm(&(&q * &t * q.adjoint() - &m));
            assert!(err <= 1e-13 * op_norm(&m), "trial {trial}: {err}");
        }
    }

    #[test]
    fn schur_eigenvalues_match_hermitian_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in [3usize, 6, 9] {
            let g = random_matrix(&mut rng, n);
            let m = (&g + g.adjoint()).scale(0.5);
            let he = hermitian_eig(&m, &tol()).unwrap();
            let ge = general_eig(&m, false, &tol()).unwrap();
            assert!(multiset::match_distance(&he.values, &ge.values) < 1e-11);
        }
    }

    #[test]
    fn schur_jordan_block() {
        let mut j = CMatrix::zeros(4, 4);
        for i in 0..4 {
            j[(i, i)] = c(2.0, 1.0);
            if i < 3 {
                j[(i, i + 1)] = c(1.0, 0.0);
            }
        }
        // triangular fast path
        let es = general_eig(&j, false, &tol()).unwrap();
        assert!(es.values.iter().all(|z| (z - c(2.0, 1.0)).norm() < 1e-12));
        // lower Jordan block goes through the iteration
        let es = general_eig(&j.transpose(), false, &tol()).unwrap();
        assert!(es
            .values
            .iter()
            .all(|z| (z - c(2.0, 1.0)).norm() < 1e-3 * (1.0 + j.norm())));
    }

    #[test]
    fn op_norm_examples() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![c(3., 0.), c(-1., 0.)]));
        assert!((op_norm(&m) - 3.0).abs() < 1e-14);
        assert_eq!(op_norm(&CMatrix::zeros(3, 3)), 0.0);
    }

    #[test]
    fn op_norm_gram_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        let m = random_matrix(&mut rng, 6);
        let gram = m.adjoint() * &m;
        let es = hermitian_eig(&gram, &tol()).unwrap();
        let top = es.values.last().unwrap().re.max(0.0).sqrt();
        assert!((op_norm(&m) - top).abs() < 1e-10 * (1.0 + top));
    }
}
