//! Truncated weighted-shift models and resolvent-growth diagnostics.
//!
//! Two models are built by hard truncation (no periodic wrap, so the
//! operators stay genuine shifts):
//!
//! * `UnilateralHalved`: weights `a_n = 2^-n` on indices `0..N`, the右
//!   shift scaled by 2/5 and its left-shift partner scaled by 1/5. The
//!   weighted seminorms of the pair are exactly 1/5 and 2/5 at every
//!   truncation size.
//! * `BilateralFactorial`: indices `-floor(N/2)..ceil(N/2)`, weights 1 on
//!   the negative side and `1/n!` on the nonnegative side, with the plain
//!   right shift. The weighted resolvent seminorm grows without bound in
//!   the truncation size everywhere inside the unit disc and stays bounded
//!   outside, which is the finite-size shadow of the spectrum filling the
//!   closed disc.
//!
//! Factorial weights live both as linear values and as log-magnitudes; the
//! ratio probes run entirely in the log domain so they survive truncations
//! far past the linear underflow boundary (1/n! underflows near n = 170,
//! so full-matrix builds stop at N = 160).

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::spectrum;
use crate::tolerance::ToleranceConfig;
use crate::weight::PositiveWeight;

/// Largest bilateral truncation whose weights are representable linearly.
pub const LINEAR_MODE_LIMIT: usize = 160;

const MIN_TRUNCATION: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftKind {
    UnilateralHalved,
    BilateralFactorial,
}

impl ShiftKind {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "unilateral_halved" => Ok(Self::UnilateralHalved),
            "bilateral_factorial" => Ok(Self::BilateralFactorial),
            other => Err(Error::InvalidConfig(format!("unknown shift model `{other}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::UnilateralHalved => "unilateral_halved",
            Self::BilateralFactorial => "bilateral_factorial",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightScaleMode {
    Linear,
    LogDomain,
}

/// Probe flavor for the vector ratios (only the adjoint-shift ratio
/// `||A^{1/2} T* e_n|| / ||A^{1/2} e_n||` is defined).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeMode {
    AdjointShift,
}

#[derive(Debug, Clone, Serialize)]
pub struct ShiftModel {
    pub kind: ShiftKind,
    pub n: usize,
    /// Sequence index of array position 0 (bilateral truncations start at
    /// `-floor(N/2)`).
    pub index_offset: i64,
    pub mode: WeightScaleMode,
    /// `ln a_i` per array position.
    #[serde(skip)]
    log_sqrt_weights: Vec<f64>,
    /// Linear `a_i` per array position (exact divisions, not exp(log)).
    #[serde(skip)]
    sqrt_weights: Vec<f64>,
}

impl ShiftModel {
    pub fn new(kind: ShiftKind, n: usize, mode: WeightScaleMode) -> Result<Self> {
        if n < MIN_TRUNCATION {
            return Err(Error::TruncationTooSmall {
                n,
                min: MIN_TRUNCATION,
            });
        }
        if kind == ShiftKind::BilateralFactorial
            && mode == WeightScaleMode::Linear
            && n > LINEAR_MODE_LIMIT
        {
            return Err(Error::UnderflowRisk {
                n,
                limit: LINEAR_MODE_LIMIT,
            });
        }
        let index_offset = match kind {
            ShiftKind::UnilateralHalved => 0,
            ShiftKind::BilateralFactorial => -((n / 2) as i64),
        };
        let mut log_sqrt_weights = Vec::with_capacity(n);
        let mut sqrt_weights = Vec::with_capacity(n);
        match kind {
            ShiftKind::UnilateralHalved => {
                for i in 0..n {
                    log_sqrt_weights.push(-(i as f64) * std::f64::consts::LN_2);
                    sqrt_weights.push(0.5f64.powi(i as i32));
                }
            }
            ShiftKind::BilateralFactorial => {
                let mut log_acc = 0.0f64;
                let mut lin_acc = 1.0f64;
                for i in 0..n {
                    let index = i as i64 + index_offset;
                    if index <= 0 {
                        log_sqrt_weights.push(0.0);
                        sqrt_weights.push(1.0);
                    } else {
                        log_acc -= (index as f64).ln();
                        lin_acc /= index as f64;
                        log_sqrt_weights.push(log_acc);
                        sqrt_weights.push(lin_acc);
                    }
                }
            }
        }
        Ok(Self {
            kind,
            n,
            index_offset,
            mode,
            log_sqrt_weights,
            sqrt_weights,
        })
    }

    /// Inclusive range of sequence indices covered by the truncation.
    pub fn index_range(&self) -> (i64, i64) {
        (self.index_offset, self.index_offset + self.n as i64 - 1)
    }

    fn position(&self, index: i64) -> Option<usize> {
        let (lo, hi) = self.index_range();
        if index < lo || index > hi {
            return None;
        }
        Some((index - lo) as usize)
    }

    /// Weighted adjoint-shift ratio `a_{n-1} / a_n`, computed in the log
    /// domain. Equals `n` in the factorial regime (`n >= 1`) and 1 on the
    /// constant side. Probe indices must stay one position away from both
    /// truncation edges.
    pub fn ratio_probe(&self, _mode: ProbeMode, n_values: &[i64]) -> Result<Vec<f64>> {
        let (lo, hi) = self.index_range();
        let mut out = Vec::with_capacity(n_values.len());
        for &idx in n_values {
            if idx - 1 < lo + 1 || idx > hi - 1 {
                return Err(Error::IndexOutOfTruncation {
                    index: idx,
                    lo: lo + 2,
                    hi: hi - 1,
                });
            }
            let p_prev = self.position(idx - 1).expect("checked above");
            let p = self.position(idx).expect("checked above");
            out.push((self.log_sqrt_weights[p_prev] - self.log_sqrt_weights[p]).exp());
        }
        Ok(out)
    }

    /// Linear-domain ratio `a_{n-1} / a_n` from the stored linear weights;
    /// available wherever the linear representation is (used to cross-check
    /// the log-domain probe).
    pub fn ratio_probe_linear(&self, n_values: &[i64]) -> Result<Vec<f64>> {
        let (lo, hi) = self.index_range();
        let mut out = Vec::with_capacity(n_values.len());
        for &idx in n_values {
            if idx - 1 < lo + 1 || idx > hi - 1 {
                return Err(Error::IndexOutOfTruncation {
                    index: idx,
                    lo: lo + 2,
                    hi: hi - 1,
                });
            }
            let p_prev = self.position(idx - 1).expect("checked above");
            let p = self.position(idx).expect("checked above");
            out.push(self.sqrt_weights[p_prev] / self.sqrt_weights[p]);
        }
        Ok(out)
    }

    /// Realizes the truncated model as matrices: the weight structure, the
    /// shift, and (for the unilateral model) its half-adjoint partner.
    ///
    /// The unilateral weight is built with the numeric-rank cutoff pushed
    /// below the representable range: its entries are exact powers of two,
    /// the pair's seminorms are evaluated through exact sparse products, and
    /// the shift pair must stay inside the membership algebra at every
    /// truncation size. The bilateral weight keeps the caller's relative
    /// cutoff: its resolvent comes out of an SVD whose rounding junk gets
    /// amplified by the inverse weights (up to n!), and the numeric-rank
    /// gate caps that amplification at `1 / rank_rel_tol`.
    pub fn build(&self, tol: ToleranceConfig) -> Result<BuiltModel> {
        if self.kind == ShiftKind::BilateralFactorial && self.n > LINEAR_MODE_LIMIT {
            return Err(Error::UnderflowRisk {
                n: self.n,
                limit: LINEAR_MODE_LIMIT,
            });
        }
        let tol = match self.kind {
            ShiftKind::UnilateralHalved => ToleranceConfig {
                rank_rel_tol: 1e-300,
                ..tol
            },
            ShiftKind::BilateralFactorial => tol,
        };
        let n = self.n;
        let zero = Complex64::new(0.0, 0.0);
        let a = CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                let w = self.sqrt_weights[i];
                Complex64::new(w * w, 0.0)
            } else {
                zero
            }
        });
        let weight = PositiveWeight::new(a, tol)?;
        let (shift, left_partner) = match self.kind {
            ShiftKind::UnilateralHalved => {
                let mut t = CMatrix::zeros(n, n);
                let mut l = CMatrix::zeros(n, n);
                for i in 0..(n - 1) {
                    t[(i + 1, i)] = Complex64::new(0.4, 0.0);
                    l[(i, i + 1)] = Complex64::new(0.2, 0.0);
                }
                (t, Some(l))
            }
            ShiftKind::BilateralFactorial => {
                let mut t = CMatrix::zeros(n, n);
                for i in 0..(n - 1) {
                    t[(i + 1, i)] = Complex64::new(1.0, 0.0);
                }
                (t, None)
            }
        };
        Ok(BuiltModel {
            weight,
            shift,
            left_partner,
        })
    }
}

#[derive(Debug, Clone)]
pub struct BuiltModel {
    pub weight: PositiveWeight,
    pub shift: CMatrix,
    /// The paper pair's left shift `L` with `T* A^{1/2} = A^{1/2} L`
    /// (unilateral model only).
    pub left_partner: Option<CMatrix>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanStatus {
    Finite,
    Singular,
}

/// One resolvent-growth sample: the weighted seminorm of `(T_N - lambda)^+`,
/// or `+inf` when the range-space compression of `T_N - lambda` is
/// numerically singular.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScanResult {
    pub lambda: Complex64,
    pub n: usize,
    pub growth: f64,
    pub status: ScanStatus,
}

/// Scans the weighted resolvent seminorm over `lambdas x n_list`. Results
/// are ordered by (lambda index, N index).
pub fn resolvent_scan(
    kind: ShiftKind,
    lambdas: &[Complex64],
    n_list: &[usize],
    tol: ToleranceConfig,
) -> Result<Vec<ScanResult>> {
    let mut built = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let model = ShiftModel::new(kind, n, WeightScaleMode::Linear)?;
        built.push((n, model.build(tol)?));
    }
    let mut out = Vec::with_capacity(lambdas.len() * n_list.len());
    for &lambda in lambdas {
        for (n, parts) in &built {
            out.push(scan_point(parts, lambda, *n, &tol)?);
        }
    }
    Ok(out)
}

fn scan_point(
    parts: &BuiltModel,
    lambda: Complex64,
    n: usize,
    tol: &ToleranceConfig,
) -> Result<ScanResult> {
    let dim = parts.shift.nrows();
    let shifted = &parts.shift - CMatrix::identity(dim, dim).map(|z| z * lambda);
    let b = spectrum::compress(&parts.weight, &shifted)?;
    let budget = 1000 + 100 * b.nrows();
    let svd = nalgebra::linalg::SVD::try_new(b.clone(), false, false, f64::EPSILON, budget)
        .ok_or(Error::ConvergenceFailure { sweeps: budget })?;
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let smin = svd
        .singular_values
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let noise_floor = 32.0 * dim as f64 * f64::EPSILON * linalg::op_norm(&shifted);
    if smin <= (tol.rank_rel_tol * smax).max(noise_floor) {
        return Ok(ScanResult {
            lambda,
            n,
            growth: f64::INFINITY,
            status: ScanStatus::Singular,
        });
    }
    let (resolvent, rank) = linalg::pinv(&shifted, tol)?;
    // rank deficiency at pinv tolerance means the resolvent does not exist
    // at working precision: the pseudoinverse would be a regularized proxy
    if rank < dim {
        return Ok(ScanResult {
            lambda,
            n,
            growth: f64::INFINITY,
            status: ScanStatus::Singular,
        });
    }
    let growth = parts.weight.seminorm(&resolvent)?;
    // a membership sentinel from rounding junk is still a singular verdict
    if growth.is_infinite() {
        return Ok(ScanResult {
            lambda,
            n,
            growth: f64::INFINITY,
            status: ScanStatus::Singular,
        });
    }
    Ok(ScanResult {
        lambda,
        n,
        growth,
        status: ScanStatus::Finite,
    })
}

/// Divergence verdict for one grid point: the least-squares slope of
/// `ln growth` against `N`, and the threshold flag (growth ratio at least
/// 10x across the scanned span, or a singular hit at the largest N). The
/// flag is a numerical diagnostic for membership of `lambda` in the
/// spectrum of the untruncated operator, not a proof.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DiscScore {
    pub lambda: Complex64,
    pub score: f64,
    pub divergent: bool,
}

/// Divergence threshold: growth must multiply by this across the N span.
pub const DIVERGENCE_RATIO: f64 = 10.0;

/// Scores a list of sample points; `n_list` must be strictly increasing.
pub fn divergence_scores(
    kind: ShiftKind,
    lambdas: &[Complex64],
    n_list: &[usize],
    tol: ToleranceConfig,
) -> Result<(Vec<ScanResult>, Vec<DiscScore>)> {
    if n_list.len() < 2 || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig(
            "n_list must be strictly increasing with at least two entries".into(),
        ));
    }
    let results = resolvent_scan(kind, lambdas, n_list, tol)?;
    let mut scores = Vec::with_capacity(lambdas.len());
    for (li, &lambda) in lambdas.iter().enumerate() {
        let rows = &results[li * n_list.len()..(li + 1) * n_list.len()];
        let finite: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.status == ScanStatus::Finite && r.growth > 0.0)
            .map(|r| (r.n as f64, r.growth.ln()))
            .collect();
        let score = if finite.len() < rows.len() {
            f64::INFINITY
        } else {
            least_squares_slope(&finite)
        };
        let last = rows.last().expect("n_list nonempty");
        let first = rows.first().expect("n_list nonempty");
        let divergent = last.status == ScanStatus::Singular
            || (first.growth > 0.0 && last.growth / first.growth >= DIVERGENCE_RATIO);
        scores.push(DiscScore {
            lambda,
            score,
            divergent,
        });
    }
    Ok((results, scores))
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return 0.0;
    }
    let sxy: f64 = points
        .iter()
        .map(|p| (p.0 - mean_x) * (p.1 - mean_y))
        .sum();
    sxy / sxx
}

/// Full grid report over `[-1.5, 1.5]^2` with the given spacing.
pub fn disc_report(
    kind: ShiftKind,
    grid_density: f64,
    n_list: &[usize],
    tol: ToleranceConfig,
) -> Result<(Vec<ScanResult>, Vec<DiscScore>)> {
    if !(grid_density > 0.0) || grid_density > 3.0 {
        return Err(Error::InvalidConfig(format!(
            "grid density must be in (0, 3], got {grid_density}"
        )));
    }
    let steps = (3.0 / grid_density).round() as usize;
    let mut lambdas = Vec::with_capacity((steps + 1) * (steps + 1));
    for i in 0..=steps {
        for j in 0..=steps {
            lambdas.push(Complex64::new(
                -1.5 + grid_density * i as f64,
                -1.5 + grid_density * j as f64,
            ));
        }
    }
    divergence_scores(kind, &lambdas, n_list, tol)
}
