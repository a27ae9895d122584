//! The weighted spectrum, spectral radius and invertibility, computed along
//! mutually checking routes.
//!
//! In finite dimension every nonzero PSD weight is well-supported, so the
//! weighted spectrum of a member `T` is the ordinary spectrum of the
//! range-space compression `B = U* T U`. That compression is the working
//! definition here; the pure-state route (rank-one projections `Q` with
//! `tr(QP) = 1` evaluated at `tr(Q P T)`) and the Hermitian-pencil
//! invertibility conditions re-derive the same answers independently and are
//! cross-checked in the law suite.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::multiset;
use crate::weight::PositiveWeight;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumMethod {
    Compression,
    PureState,
    GelfandRadiusOnly,
}

/// Residual diagnostics attached to a spectrum computation.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpectrumDiagnostics {
    /// Largest certified eigen-residual (absolute).
    pub max_residual: f64,
    /// Defect of the membership criterion for the operator.
    pub membership_defect: f64,
    /// Points whose eigenvector could not be certified (clustered
    /// eigenvalues); they fall back to the compression eigenvalue.
    pub uncertified_points: usize,
    /// Worst `|tr(Q P) - 1|` over the pure-state projections (pure-state
    /// route only; zero otherwise).
    pub state_normalization_defect: f64,
}

/// A computed weighted spectrum: `weight_rank` points counted with
/// multiplicity, never empty, and the radius `max |lambda|`.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub points: Vec<Complex64>,
    pub radius: f64,
    pub method: SpectrumMethod,
    pub diagnostics: SpectrumDiagnostics,
    pub weight_rank: usize,
}

/// Range-space compression `B = U* T U` (size `r x r`); its spectrum is the
/// weighted spectrum of `T`.
pub fn compress(weight: &PositiveWeight, t: &CMatrix) -> Result<CMatrix> {
    require_member(weight, t)?;
    let u = weight.range_basis();
    Ok(u.adjoint() * t * u)
}

fn require_member(weight: &PositiveWeight, t: &CMatrix) -> Result<f64> {
    let defect = weight.member_defect(t)?;
    let bound = weight.tolerances().residual_tol * (1.0 + linalg::op_norm(t));
    if defect > bound {
        return Err(Error::NotInMemberAlgebra { defect, bound });
    }
    Ok(defect)
}

/// Weighted spectrum through the compression route.
pub fn a_spectrum(weight: &PositiveWeight, t: &CMatrix) -> Result<SpectrumReport> {
    let membership_defect = require_member(weight, t)?;
    let u = weight.range_basis();
    let b = u.adjoint() * t * u;
    let es = linalg::general_eig(&b, false, weight.tolerances())?;
    let radius = multiset::max_modulus(&es.values);
    Ok(SpectrumReport {
        points: es.values,
        radius,
        method: SpectrumMethod::Compression,
        diagnostics: SpectrumDiagnostics {
            max_residual: es.max_residual,
            membership_defect,
            uncertified_points: 0,
            state_normalization_defect: 0.0,
        },
        weight_rank: weight.rank(),
    })
}

/// Weighted spectral radius via the compression eigenvalues.
pub fn a_radius_eig(weight: &PositiveWeight, t: &CMatrix) -> Result<f64> {
    Ok(a_spectrum(weight, t)?.radius)
}

/// Result of the Gelfand-limit radius `lim ||T^n||_A^{1/n}` evaluated by
/// repeated squaring of `S_0 = A^{1/2} T (A^{1/2})^dag`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GelfandRadius {
    pub value: f64,
    /// Set when the normalized iterates collapsed below 1e-300; the radius is
    /// reported as zero (nilpotent compression).
    pub underflow: bool,
    /// Doublings actually performed.
    pub doublings: u32,
}

/// Gelfand radius with `doublings` squarings. Each squaring is normalized by
/// its norm and the exponents accumulate in log space, so the iteration
/// survives `2^k` powers of badly scaled operators.
///
/// The route is valid for members because `S_0^n = A^{1/2} T^n (A^{1/2})^dag`
/// (membership makes `A^{1/2} T (I - P) = 0`).
pub fn a_radius_gelfand(
    weight: &PositiveWeight,
    t: &CMatrix,
    doublings: u32,
) -> Result<GelfandRadius> {
    require_member(weight, t)?;
    let mut s = weight.sqrt() * t * weight.sqrt_pinv();
    let mut acc = 0.0f64;
    for j in 0..doublings {
        let norm = linalg::op_norm(&s);
        if norm < 1e-300 {
            return Ok(GelfandRadius {
                value: 0.0,
                underflow: true,
                doublings: j,
            });
        }
        acc += norm.ln() / f64::powi(2.0, j as i32);
        let normalized = s.map(|z| z / Complex64::new(norm, 0.0));
        s = &normalized * &normalized;
    }
    let norm = linalg::op_norm(&s);
    if norm < 1e-300 {
        return Ok(GelfandRadius {
            value: 0.0,
            underflow: true,
            doublings,
        });
    }
    acc += norm.ln() / f64::powi(2.0, doublings as i32);
    Ok(GelfandRadius {
        value: acc.exp(),
        underflow: false,
        doublings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InvertRoute {
    /// Smallest singular value of the compression.
    Compression,
    /// The two Hermitian-pencil conditions (state inequality and the
    /// Douglas-range condition).
    Douglas,
}

/// Which invertibility condition failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailedCondition {
    /// The state inequality has no uniform lower bound: the pencil
    /// `(U* T* A T U, U* A U)` has a generalized eigenvalue at zero.
    CondILower,
    /// Upper state bound; cannot fail in finite dimension, kept for
    /// interface completeness.
    CondIUpper,
    /// `U* A T T* A U` is not positive definite.
    CondII,
}

#[derive(Debug, Clone)]
pub enum Certificate {
    /// An A-inverse `S` with `A T S = A S T = A`.
    Inverse(CMatrix),
    Failed(FailedCondition),
}

#[derive(Debug, Clone)]
pub struct InvertibilityVerdict {
    pub invertible: bool,
    pub route: InvertRoute,
    pub certificate: Certificate,
    /// Compression route: smallest singular value of `B`. Douglas route:
    /// smallest generalized eigenvalue of the condition-(i) pencil (the
    /// theorem's `1/c`), or the smallest eigenvalue of the condition-(ii)
    /// Gram block when that is the failing condition.
    pub margin: f64,
}

/// Decides A-invertibility of a member along the requested route.
pub fn a_invertible(
    weight: &PositiveWeight,
    t: &CMatrix,
    route: InvertRoute,
) -> Result<InvertibilityVerdict> {
    let tol = *weight.tolerances();
    let b = compress(weight, t)?;
    let n = weight.dim();
    // Absolute noise floor: the compression inherits rounding of order
    // eps * ||T||, so anything below that is indistinguishable from zero
    // even when sigma_max(B) itself is noise (an annihilated range block).
    let noise_floor = 32.0 * n as f64 * f64::EPSILON * linalg::op_norm(t);
    match route {
        InvertRoute::Compression => {
            let budget = 1000 + 100 * b.nrows();
            let svd =
                nalgebra::linalg::SVD::try_new(b.clone(), false, false, f64::EPSILON, budget)
                    .ok_or(Error::ConvergenceFailure { sweeps: budget })?;
            let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
            let smin = svd
                .singular_values
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min);
            let invertible = smin > (tol.rank_rel_tol * smax).max(noise_floor);
            let certificate = if invertible {
                Certificate::Inverse(inverse_from_compression(weight, &b)?)
            } else {
                Certificate::Failed(FailedCondition::CondILower)
            };
            Ok(InvertibilityVerdict {
                invertible,
                route,
                certificate,
                margin: smin,
            })
        }
        InvertRoute::Douglas => {
            let u = weight.range_basis();
            let a = weight.matrix();

            // condition (i): the Hermitian pencil (U* T* A T U, U* A U) must
            // be uniformly positive. Whiten by (U* A U)^{-1/2}.
            let m1 = hermitize(&(u.adjoint() * t.adjoint() * a * t * u));
            let n1 = hermitize(&(u.adjoint() * a * u));
            let n1_es = linalg::hermitian_eig(&n1, &tol)?;
            let vecs = n1_es.right_vectors.expect("vectors");
            let mut inv_half = CMatrix::zeros(b.nrows(), b.ncols());
            for (i, lam) in n1_es.values.iter().enumerate() {
                // n1 is PD by construction of the range basis
                let col = vecs.column(i);
                let outer = &col * col.adjoint();
                inv_half += outer.map(|z| z / Complex64::new(lam.re.max(f64::MIN_POSITIVE).sqrt(), 0.0));
            }
            let pencil = hermitize(&(&inv_half * m1 * &inv_half));
            let pencil_es = linalg::hermitian_eig(&pencil, &tol)?;
            let p_min = pencil_es.values.first().map(|z| z.re).unwrap_or(0.0);
            let p_max = pencil_es
                .values
                .iter()
                .map(|z| z.re.abs())
                .fold(0.0f64, f64::max);
            // pencil entries inherit noise_floor^2 amplified by the whitening
            let pencil_floor = noise_floor * noise_floor / weight.min_pos_eig()
                * linalg::op_norm(a);
            let cond_i = p_min > (tol.rank_rel_tol * p_max).max(pencil_floor);

            // condition (ii): U* A T T* A U positive definite.
            let m2 = hermitize(&(u.adjoint() * a * t * t.adjoint() * a * u));
            let m2_es = linalg::hermitian_eig(&m2, &tol)?;
            let g_min = m2_es.values.first().map(|z| z.re).unwrap_or(0.0);
            let g_max = m2_es
                .values
                .iter()
                .map(|z| z.re.abs())
                .fold(0.0f64, f64::max);
            let gram_floor = noise_floor * noise_floor * linalg::op_norm(a).powi(2);
            let cond_ii = g_min > (tol.rank_rel_tol * g_max).max(gram_floor);

            let invertible = cond_i && cond_ii;
            let (certificate, margin) = if invertible {
                (
                    Certificate::Inverse(inverse_from_compression(weight, &b)?),
                    p_min,
                )
            } else if !cond_i {
                (Certificate::Failed(FailedCondition::CondILower), p_min)
            } else {
                (Certificate::Failed(FailedCondition::CondII), g_min)
            };
            Ok(InvertibilityVerdict {
                invertible,
                route,
                certificate,
                margin,
            })
        }
    }
}

fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

fn inverse_from_compression(weight: &PositiveWeight, b: &CMatrix) -> Result<CMatrix> {
    let (b_inv, rank) = linalg::pinv(b, weight.tolerances())?;
    if rank < b.nrows() {
        return Err(Error::NotAInvertible {
            reason: format!(
                "compression rank {rank} below weight rank {}",
                weight.rank()
            ),
        });
    }
    let u = weight.range_basis();
    Ok(u * b_inv * u.adjoint())
}

/// The canonical A-inverse `S = U B^{-1} U*` of an A-invertible member, with
/// `A T S = A S T = A` up to `residual_tol * ||A|| * cond(B)`.
pub fn a_inverse(weight: &PositiveWeight, t: &CMatrix) -> Result<CMatrix> {
    let verdict = a_invertible(weight, t, InvertRoute::Compression)?;
    if !verdict.invertible {
        return Err(Error::NotAInvertible {
            reason: format!("compression margin {:.3e}", verdict.margin),
        });
    }
    match verdict.certificate {
        Certificate::Inverse(s) => Ok(s),
        Certificate::Failed(_) => unreachable!("invertible verdict carries an inverse"),
    }
}

/// Weighted spectrum through pure states.
///
/// Each left eigenvector `q` of `P T` lying in the range of `P` yields a
/// rank-one projection `Q = q q* / ||q||^2` with `tr(Q P) = 1`, and the
/// spectrum point is recovered as the functional value `tr(Q P T)`. Left
/// eigenvectors are obtained as right eigenvectors of `B*` lifted through
/// the range basis (that includes the kernel vectors of `B*`, which lift to
/// the eigenvalue-zero states). Clustered eigenvalues that prevent
/// per-vector certification fall back to the compression eigenvalue and are
/// counted in the diagnostics.
pub fn pure_state_spectrum(weight: &PositiveWeight, t: &CMatrix) -> Result<SpectrumReport> {
    let membership_defect = require_member(weight, t)?;
    let tol = *weight.tolerances();
    let u = weight.range_basis();
    let b = u.adjoint() * t * u;
    let r = weight.rank();

    let es = linalg::general_eig(&b.adjoint(), true, &tol)?;
    let vectors = es.right_vectors.as_ref().expect("vectors requested");
    let pt = weight.projector() * t;
    let norm_b = linalg::op_norm(&b);

    let gap_floor = tol.cluster_gap();
    let mut points = Vec::with_capacity(r);
    let mut uncertified = 0usize;
    let mut worst_state_defect = 0.0f64;
    let mut max_residual = es.max_residual;
    for k in 0..r {
        let mu = es.values[k];
        let gap = (0..r)
            .filter(|&j| j != k)
            .map(|j| (es.values[j] - mu).norm())
            .fold(f64::INFINITY, f64::min);
        let vec_residual = {
            let wv = vectors.column(k);
            (b.adjoint() * wv - wv.map(|z| z * mu)).norm()
        };
        let certified = gap > gap_floor && vec_residual <= tol.residual_tol * (1.0 + norm_b);
        if certified {
            let q = u * vectors.column(k); // unit: U is an isometry
            let tr_qp = (q.adjoint() * weight.projector() * &q)[(0, 0)].re;
            worst_state_defect = worst_state_defect.max((tr_qp - 1.0).abs());
            let value = (q.adjoint() * &pt * &q)[(0, 0)];
            points.push(value);
            max_residual = max_residual.max(vec_residual);
        } else {
            points.push(mu.conj());
            uncertified += 1;
        }
    }

    let radius = multiset::max_modulus(&points);
    Ok(SpectrumReport {
        points,
        radius,
        method: SpectrumMethod::PureState,
        diagnostics: SpectrumDiagnostics {
            max_residual,
            membership_defect,
            uncertified_points: uncertified,
            state_normalization_defect: worst_state_defect,
        },
        weight_rank: r,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CVector;
    use crate::tolerance::ToleranceConfig;
    use crate::weight::{random_member, random_weight, PositiveWeight};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn diag(entries: &[f64]) -> CMatrix {
        CMatrix::from_diagonal(&CVector::from_iterator(
            entries.len(),
            entries.iter().map(|&x| c(x, 0.0)),
        ))
    }

    #[test]
    fn compress_identity_weight_is_identity_map() {
        let w = PositiveWeight::new(CMatrix::identity(3, 3), tol()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = crate::weight::gaussian_matrix(&mut rng, 3, 3, 1.0);
        let b = compress(&w, &t).unwrap();
        // agreement up to the unitary change of basis chosen for U
        let u = w.range_basis();
        assert!(linalg::op_norm(&(u * &b * u.adjoint() - &t)) < 1e-12);
    }

    #[test]
    fn compress_block_oracle() {
        let w = PositiveWeight::new(diag(&[1.0, 0.0]), tol()).unwrap();
        let t = CMatrix::from_row_slice(2, 2, &[c(5., 2.), c(0., 0.), c(3., 0.), c(4., 0.)]);
        let b = compress(&w, &t).unwrap();
        assert_eq!(b.shape(), (1, 1));
        assert!((b[(0, 0)] - c(5., 2.)).norm() < 1e-13);
    }

    #[test]
    fn compress_projector_is_identity() {
        let w = random_weight(4, 5, 3, 10.0, tol()).unwrap();
        let b = compress(&w, w.projector()).unwrap();
        assert!(linalg::op_norm(&(&b - CMatrix::identity(3, 3))) < 1e-12);
    }

    #[test]
    fn compress_rejects_nonmembers() {
        let w = PositiveWeight::new(diag(&[1.0, 0.0]), tol()).unwrap();
        let t = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)]);
        assert!(matches!(
            compress(&w, &t),
            Err(Error::NotInMemberAlgebra { .. })
        ));
    }

    #[test]
    fn spectrum_of_projector_is_all_ones() {
        let w = random_weight(12, 6, 4, 10.0, tol()).unwrap();
        let rep = a_spectrum(&w, w.projector()).unwrap();
        assert_eq!(rep.points.len(), 4);
        assert!(rep
            .points
            .iter()
            .all(|z| (z - c(1., 0.)).norm() < 1e-10));
        assert!((rep.radius - 1.0).abs() < 1e-10);
    }

    #[test]
    fn spectrum_of_weight_drops_kernel() {
        let a = diag(&[2.0, 1.0, 0.0]);
        let w = PositiveWeight::new(a.clone(), tol()).unwrap();
        let rep = a_spectrum(&w, &a).unwrap();
        let expect = [c(2., 0.), c(1., 0.)];
        assert!(multiset::match_distance(&rep.points, &expect) < 1e-12);
    }

    #[test]
    fn spectrum_block_oracle() {
        let w = PositiveWeight::new(diag(&[1.0, 0.0]), tol()).unwrap();
        let t = CMatrix::from_row_slice(2, 2, &[c(7., -1.), c(0., 0.), c(2., 0.), c(9., 0.)]);
        let rep = a_spectrum(&w, &t).unwrap();
        assert_eq!(rep.points.len(), 1);
        assert!((rep.points[0] - c(7., -1.)).norm() < 1e-12);
    }

    #[test]
    fn radius_examples() {
        let a = diag(&[2.0, 1.0, 0.0]);
        let w = PositiveWeight::new(a.clone(), tol()).unwrap();
        // r_A(A) = ||A||
        assert!((a_radius_eig(&w, &a).unwrap() - 2.0).abs() < 1e-12);
        // T = P
        assert!((a_radius_eig(&w, w.projector()).unwrap() - 1.0).abs() < 1e-10);
        // nilpotent range block
        let mut b = CMatrix::zeros(2, 2);
        b[(1, 0)] = c(3., 0.);
        let t = w
            .member_from_blocks(&b, &CMatrix::zeros(1, 2), &CMatrix::zeros(1, 1))
            .unwrap();
        assert!(a_radius_eig(&w, &t).unwrap() < 1e-10);
    }

    #[test]
    fn gelfand_on_projector_is_one() {
        let w = random_weight(8, 5, 3, 10.0, tol()).unwrap();
        for k in [0u32, 1, 4, 12] {
            let g = a_radius_gelfand(&w, w.projector(), k).unwrap();
            assert!(!g.underflow);
            assert!((g.value - 1.0).abs() < 1e-10, "k={k} value={}", g.value);
        }
    }

    #[test]
    fn gelfand_matches_eig_route() {
        for seed in 0..20u64 {
            let n = 3 + (seed % 5) as usize;
            let r = 1 + (seed % n as u64) as usize;
            let w = random_weight(seed.wrapping_add(60), n, r, 10.0, tol()).unwrap();
            let t = random_member(seed.wrapping_add(61), &w, 1.0).unwrap();
            let radius = a_radius_eig(&w, t.matrix()).unwrap();
            if radius < 0.1 {
                continue;
            }
            let g = a_radius_gelfand(&w, t.matrix(), 12).unwrap();
            assert!(
                (g.value - radius).abs() <= 2e-2 * (1.0 + radius),
                "seed {seed}: gelfand {} vs eig {radius}",
                g.value
            );
        }
    }

    #[test]
    fn gelfand_underflow_on_nilpotent_block() {
        let w = PositiveWeight::new(diag(&[1.0, 1.0, 0.0]), tol()).unwrap();
        let mut b = CMatrix::zeros(2, 2);
        b[(1, 0)] = c(1., 0.);
        let t = w
            .member_from_blocks(&b, &CMatrix::zeros(1, 2), &CMatrix::zeros(1, 1))
            .unwrap();
        let g = a_radius_gelfand(&w, &t, 12).unwrap();
        assert!(g.underflow);
        assert_eq!(g.value, 0.0);
    }

    #[test]
    fn projector_is_a_invertible_with_projector_inverse() {
        let w = random_weight(30, 5, 3, 10.0, tol()).unwrap();
        let verdict = a_invertible(&w, w.projector(), InvertRoute::Compression).unwrap();
        assert!(verdict.invertible);
        let s = a_inverse(&w, w.projector()).unwrap();
        let p = w.projector();
        assert!(linalg::op_norm(&(p * &s * p - p)) < 1e-10);
    }

    #[test]
    fn noninvertible_block_fails_lower_condition() {
        let w = PositiveWeight::new(diag(&[1.0, 0.0]), tol()).unwrap();
        let t = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., 0.), c(1., 0.), c(0., 0.)]);
        for route in [InvertRoute::Compression, InvertRoute::Douglas] {
            let verdict = a_invertible(&w, &t, route).unwrap();
            assert!(!verdict.invertible);
            assert!(matches!(
                verdict.certificate,
                Certificate::Failed(FailedCondition::CondILower)
            ));
        }
        assert!(matches!(
            a_inverse(&w, &t),
            Err(Error::NotAInvertible { .. })
        ));
    }

    #[test]
    fn invertible_weight_reduces_to_ordinary_invertibility() {
        let w = random_weight(31, 4, 4, 5.0, tol()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let t = crate::weight::gaussian_matrix(&mut rng, 4, 4, 1.0);
        let ordinary = t.clone().lu().is_invertible();
        let verdict = a_invertible(&w, &t, InvertRoute::Compression).unwrap();
        assert_eq!(verdict.invertible, ordinary);

        let singular = diag(&[1.0, 2.0, 3.0, 0.0]);
        let verdict = a_invertible(&w, &singular, InvertRoute::Douglas).unwrap();
        assert!(!verdict.invertible);
    }

    #[test]
    fn a_inverse_of_weight_is_pinv() {
        let a = diag(&[2.0, 1.0, 0.0]);
        let w = PositiveWeight::new(a.clone(), tol()).unwrap();
        let s = a_inverse(&w, &a).unwrap();
        let expect = diag(&[0.5, 1.0, 0.0]);
        assert!(linalg::op_norm(&(&s - &expect)) < 1e-12);
    }

    #[test]
    fn a_inverse_residual_contract() {
        for seed in 0..20u64 {
            let n = 3 + (seed % 5) as usize;
            let r = 1 + (seed % n as u64) as usize;
            let w = random_weight(seed.wrapping_add(700), n, r, 10.0, tol()).unwrap();
            let t = random_member(seed.wrapping_add(701), &w, 1.0).unwrap();
            let verdict = a_invertible(&w, t.matrix(), InvertRoute::Compression).unwrap();
            if !verdict.invertible {
                continue;
            }
            let b = compress(&w, t.matrix()).unwrap();
            let cond = linalg::op_norm(&b) / verdict.margin;
            let s = a_inverse(&w, t.matrix()).unwrap();
            let a = w.matrix();
            let bound = tol().residual_tol * linalg::op_norm(a) * cond;
            assert!(linalg::op_norm(&(a * t.matrix() * &s - a)) <= bound, "seed {seed}");
            assert!(linalg::op_norm(&(a * &s * t.matrix() - a)) <= bound, "seed {seed}");
        }
    }

    #[test]
    fn pure_state_rank_one_weight() {
        let mut rng = ChaCha8Rng::seed_from_u64(90);
        let q = crate::weight::gaussian_vector(&mut rng, 4, 1.0);
        let a = (&q * q.adjoint()).scale(2.5);
        let a = (&a + a.adjoint()).scale(0.5);
        let w = PositiveWeight::new(a, tol()).unwrap();
        assert_eq!(w.rank(), 1);
        let t = random_member(91, &w, 1.0).unwrap();
        let rep = pure_state_spectrum(&w, t.matrix()).unwrap();
        assert_eq!(rep.points.len(), 1);
        let qn = (q.adjoint() * &q)[(0, 0)].re;
        let expect = (q.adjoint() * t.matrix() * &q)[(0, 0)] / c(qn, 0.0);
        assert!((rep.points[0] - expect).norm() < 1e-10);
    }

    #[test]
    fn pure_state_on_projector() {
        let w = random_weight(33, 5, 3, 10.0, tol()).unwrap();
        let rep = pure_state_spectrum(&w, w.projector()).unwrap();
        assert_eq!(rep.points.len(), 3);
        // all ones; every certified state had tr(QP) = 1
        for z in &rep.points {
            assert!((z - c(1., 0.)).norm() < 1e-9);
        }
        assert!(rep.diagnostics.state_normalization_defect < 1e-9);
    }

    #[test]
    fn pure_state_matches_compression_route() {
        let w = random_weight(35, 5, 3, 10.0, tol()).unwrap();
        let t = random_member(36, &w, 1.0).unwrap();
        let comp = a_spectrum(&w, t.matrix()).unwrap();
        let pure = pure_state_spectrum(&w, t.matrix()).unwrap();
        let scale = 1.0 + linalg::op_norm(t.matrix());
        let dist = multiset::match_distance(&comp.points, &pure.points);
        assert!(dist <= tol().set_match_tol * scale, "dist {dist}");
    }

    #[test]
    fn conjugate_adjoint_symmetry() {
        for seed in 0..20u64 {
            let n = 2 + (seed % 6) as usize;
            let r = 1 + (seed % n as u64) as usize;
            let w = random_weight(seed.wrapping_add(40), n, r, 10.0, tol()).unwrap();
            let t = random_member(seed.wrapping_add(41), &w, 1.0).unwrap();
            let l = t.half_adjoint().unwrap();
            let st = a_spectrum(&w, t.matrix()).unwrap();
            let sl = a_spectrum(&w, l).unwrap();
            let conj_sl: Vec<Complex64> = sl.points.iter().map(|z| z.conj()).collect();
            let scale = 1.0 + linalg::op_norm(t.matrix()) + linalg::op_norm(l);
            assert!(
                multiset::match_distance(&st.points, &conj_sl) <= tol().set_match_tol * scale,
                "seed {seed}"
            );
        }
    }

    #[test]
    fn radius_bounds_against_norms_and_classical_radius() {
        for seed in 0..20u64 {
            let n = 2 + (seed % 6) as usize;
            let r = 1 + (seed % n as u64) as usize;
            let w = random_weight(seed.wrapping_add(50), n, r, 10.0, tol()).unwrap();
            let t = random_member(seed.wrapping_add(51), &w, 1.0).unwrap();
            let radius = a_radius_eig(&w, t.matrix()).unwrap();
            let seminorm = t.seminorm();
            assert!(radius <= seminorm * (1.0 + 1e-9) + 1e-9, "seed {seed}");
            let l = t.half_adjoint().unwrap();
            let alpha = seminorm.max(w.seminorm(l).unwrap());
            assert!(radius <= alpha * (1.0 + 1e-9) + 1e-9, "seed {seed}");
            let classical = linalg::general_eig(t.matrix(), false, &tol())
                .unwrap()
                .values
                .iter()
                .map(|z| z.norm())
                .fold(0.0f64, f64::max);
            assert!(
                radius <= classical + 1e-6 * (1.0 + classical),
                "seed {seed}: r_A {radius} vs r {classical}"
            );
        }
    }

    #[test]
    fn zero_in_spectrum_iff_not_invertible() {
        for seed in 0..25u64 {
            let n = 2 + (seed % 6) as usize;
            let r = 1 + (seed % n as u64) as usize;
            let w = random_weight(seed.wrapping_add(80), n, r, 10.0, tol()).unwrap();
            let t = random_member(seed.wrapping_add(81), &w, 1.0).unwrap();
            let rep = a_spectrum(&w, t.matrix()).unwrap();
            let zero_in = rep
                .points
                .iter()
                .any(|z| z.norm() <= tol().rank_rel_tol * (1.0 + rep.radius));
            let comp = a_invertible(&w, t.matrix(), InvertRoute::Compression).unwrap();
            let doug = a_invertible(&w, t.matrix(), InvertRoute::Douglas).unwrap();
            assert_eq!(comp.invertible, doug.invertible, "seed {seed}");
            assert_eq!(comp.invertible, !zero_in, "seed {seed}");
        }
    }

    #[test]
    fn hermitian_product_spectrum_inside_classical() {
        // if A T is Hermitian, every weighted spectrum point sits near sigma(T)
        let w = PositiveWeight::new(diag(&[2.0, 1.0, 0.0]), tol()).unwrap();
        // T = A^dag H with H Hermitian supported on the range makes A T = H Hermitian
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let g = crate::weight::gaussian_matrix(&mut rng, 3, 3, 1.0);
        let h = {
            let p = w.projector();
            let inner = (&g + g.adjoint()).scale(0.5);
            p * inner * p
        };
        let t = w.pinv() * &h;
        assert!(w.is_member(&t).unwrap());
        let rep = a_spectrum(&w, &t).unwrap();
        let classical = linalg::general_eig(&t, false, &tol()).unwrap().values;
        for z in &rep.points {
            let d = classical
                .iter()
                .map(|c| (z - c).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(d <= tol().set_match_tol * (1.0 + rep.radius), "point {z}");
        }
    }

    #[test]
    fn commutant_spectrum_is_subset_of_classical() {
        // T commuting with A: block-diagonal in the eigenbasis of A
        let w = PositiveWeight::new(diag(&[3.0, 1.0, 1.0, 0.0]), tol()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        // diagonal blocks per eigenvalue: 1x1 on {3}, 2x2 on {1}, 1x1 on {0}
        let mut t = CMatrix::zeros(4, 4);
        t[(0, 0)] = c(2.0, 1.0);
        let blk = crate::weight::gaussian_matrix(&mut rng, 2, 2, 1.0);
        for i in 0..2 {
            for j in 0..2 {
                t[(1 + i, 1 + j)] = blk[(i, j)];
            }
        }
        t[(3, 3)] = c(-5.0, 0.0);
        assert!(linalg::op_norm(&(w.matrix() * &t - &t * w.matrix())) < 1e-12);
        let rep = a_spectrum(&w, &t).unwrap();
        let classical = linalg::general_eig(&t, false, &tol()).unwrap().values;
        for z in &rep.points {
            let d = classical
                .iter()
                .map(|c| (z - c).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(d <= tol().set_match_tol * (1.0 + rep.radius));
        }
    }
}
