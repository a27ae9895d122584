//! Multiset comparison of complex spectra.
//!
//! Spectra come back from different routes in different orders and with
//! multiplicities split by rounding, so equality checks use greedy
//! minimal-distance matching rather than sorting.

use num_complex::Complex64;

/// Greedy minimal-distance matching between two equally sized multisets:
/// repeatedly pairs the globally closest remaining points and returns the
/// largest pair distance. Returns `+inf` when the lengths differ.
pub fn match_distance(xs: &[Complex64], ys: &[Complex64]) -> f64 {
    if xs.len() != ys.len() {
        return f64::INFINITY;
    }
    let n = xs.len();
    let mut used_x = vec![false; n];
    let mut used_y = vec![false; n];
    let mut worst = 0.0f64;
    for _ in 0..n {
        let mut best = f64::INFINITY;
        let mut pair = (usize::MAX, usize::MAX);
        for i in 0..n {
            if used_x[i] {
                continue;
            }
            for j in 0..n {
                if used_y[j] {
                    continue;
                }
                let d = (xs[i] - ys[j]).norm();
                if d < best {
                    best = d;
                    pair = (i, j);
                }
            }
        }
        used_x[pair.0] = true;
        used_y[pair.1] = true;
        worst = worst.max(best);
    }
    worst
}

/// Matching distance after deleting every point within `exclusion_tol` of one
/// of the `excluded` values from both sides. This is how set identities
/// stated "modulo {0}" or "modulo {0, 1}" are compared.
pub fn match_distance_modulo(
    xs: &[Complex64],
    ys: &[Complex64],
    excluded: &[Complex64],
    exclusion_tol: f64,
) -> f64 {
    let keep = |zs: &[Complex64]| -> Vec<Complex64> {
        zs.iter()
            .filter(|z| excluded.iter().all(|e| (*z - e).norm() > exclusion_tol))
            .copied()
            .collect()
    };
    match_distance(&keep(xs), &keep(ys))
}

/// Hausdorff distance between two nonempty point sets (max over either side
/// of the distance to the nearest point on the other side).
pub fn hausdorff(xs: &[Complex64], ys: &[Complex64]) -> f64 {
    if xs.is_empty() || ys.is_empty() {
        return if xs.len() == ys.len() {
            0.0
        } else {
            f64::INFINITY
        };
    }
    let one_sided = |from: &[Complex64], to: &[Complex64]| -> f64 {
        from.iter()
            .map(|x| {
                to.iter()
                    .map(|y| (x - y).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0f64, f64::max)
    };
    one_sided(xs, ys).max(one_sided(ys, xs))
}

/// Number of distinct points at the given resolution (greedy clustering:
/// a point joins the first representative within `tol`).
pub fn count_distinct(zs: &[Complex64], tol: f64) -> usize {
    let mut reps: Vec<Complex64> = Vec::new();
    for z in zs {
        if reps.iter().all(|r| (z - r).norm() > tol) {
            reps.push(*z);
        }
    }
    reps.len()
}

/// Largest modulus in a point set; 0 for an empty set.
pub fn max_modulus(zs: &[Complex64]) -> f64 {
    zs.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
