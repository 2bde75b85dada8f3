//! Small dense linear algebra on row-major `f64` slices.
//!
//! Sizes here are tiny (metric inverses up to 6x6, least-squares systems with
//! at most a few dozen unknowns), so everything is plain loops.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;

/// Inverse by Gauss-Jordan elimination with partial pivoting. Returns `None`
/// when a pivot falls below `1e-300` or below `1e-14` times the largest entry.
pub fn inverse(a: &[f64], n: usize) -> Option<Vec<f64>> {
    assert_eq!(a.len(), n * n);
    let scale = a.iter().fold(0.0f64, |m, x| m.max(math::abs(*x)));
    if scale == 0.0 {
        return None;
    }
    let mut m = a.to_vec();
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| {
                math::abs(m[r * n + col])
                    .partial_cmp(&math::abs(m[s * n + col]))
                    .unwrap_or(core::cmp::Ordering::Equal)
            })
            .unwrap();
        let pv = m[pivot * n + col];
        if math::abs(pv) < 1e-14 * scale || math::abs(pv) < 1e-300 {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                m.swap(pivot * n + k, col * n + k);
                inv.swap(pivot * n + k, col * n + k);
            }
        }
        for k in 0..n {
            m[col * n + k] /= pv;
            inv[col * n + k] /= pv;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = m[r * n + col];
            if f == 0.0 {
                continue;
            }
            for k in 0..n {
                m[r * n + k] -= f * m[col * n + k];
                inv[r * n + k] -= f * inv[col * n + k];
            }
        }
    }
    Some(inv)
}

/// Matrix product of an `r x k` and a `k x c` matrix.
pub fn matmul(a: &[f64], b: &[f64], r: usize, k: usize, c: usize) -> Vec<f64> {
    let mut out = vec![0.0; r * c];
    for i in 0..r {
        for p in 0..k {
            let aip = a[i * k + p];
            if aip == 0.0 {
                continue;
            }
            for j in 0..c {
                out[i * c + j] += aip * b[p * c + j];
            }
        }
    }
    out
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues(a: &[f64], n: usize) -> Vec<f64> {
    assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j] * m[i * n + j])
            .sum();
        let total: f64 = m.iter().map(|x| x * x).sum();
        if off <= 1e-30 * total || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (math::abs(theta) + math::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / math::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    ev
}

/// Minimal-norm least-squares solution of `A x ≈ b`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares {
    pub solution: Vec<f64>,
    /// Singular values of `A`, descending.
    pub singular_values: Vec<f64>,
    /// Number of singular values kept above the cutoff.
    pub rank: usize,
    /// `‖A x - b‖₂`.
    pub residual_norm: f64,
}

/// Solves `min ‖A x - b‖` with minimal `‖x‖` for a row-major `rows x cols`
/// matrix.
///
/// Householder QR reduces the system to a `cols x cols` triangle; a one-sided
/// Jacobi SVD of that triangle gives the pseudo-inverse. Singular values below
/// `rcond * σ_max` are treated as zero.
pub fn lstsq(a: &[f64], rows: usize, cols: usize, b: &[f64], rcond: f64) -> LeastSquares {
    assert_eq!(a.len(), rows * cols);
    assert_eq!(b.len(), rows);
    let m = rows.max(cols);
    let mut r = vec![0.0; m * cols];
    r[..rows * cols].copy_from_slice(a);
    let mut qtb = vec![0.0; m];
    qtb[..rows].copy_from_slice(b);

    for k in 0..cols.min(m) {
        let norm = math::sqrt((k..m).map(|i| r[i * cols + k] * r[i * cols + k]).sum());
        if norm == 0.0 {
            continue;
        }
        let alpha = if r[k * cols + k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..m).map(|i| r[i * cols + k]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for j in k..cols {
            let dot: f64 = (k..m).map(|i| v[i - k] * r[i * cols + j]).sum();
            let f = 2.0 * dot / vnorm2;
            for i in k..m {
                r[i * cols + j] -= f * v[i - k];
            }
        }
        let dot: f64 = (k..m).map(|i| v[i - k] * qtb[i]).sum();
        let f = 2.0 * dot / vnorm2;
        for i in k..m {
            qtb[i] -= f * v[i - k];
        }
    }

    // Square upper triangle; one-sided Jacobi: W = R V with orthogonal columns.
    let n = cols;
    let mut w: Vec<f64> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| if j >= i { r[i * cols + j] } else { 0.0 })
        .collect();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for i in 0..n {
                    let wp = w[i * n + p];
                    let wq = w[i * n + q];
                    alpha += wp * wp;
                    beta += wq * wq;
                    gamma += wp * wq;
                }
                if gamma == 0.0 || math::abs(gamma) <= 1e-15 * math::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (math::abs(zeta) + math::sqrt(1.0 + zeta * zeta));
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / math::sqrt(1.0 + t * t);
                let s = c * t;
                for i in 0..n {
                    let wp = w[i * n + p];
                    let wq = w[i * n + q];
                    w[i * n + p] = c * wp - s * wq;
                    w[i * n + q] = s * wp + c * wq;
                    let vp = v[i * n + p];
                    let vq = v[i * n + q];
                    v[i * n + p] = c * vp - s * vq;
                    v[i * n + q] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let sigma: Vec<f64> = (0..n)
        .map(|j| math::sqrt((0..n).map(|i| w[i * n + j] * w[i * n + j]).sum()))
        .collect();
    let sigma_max = sigma.iter().cloned().fold(0.0, f64::max);
    let cutoff = rcond * sigma_max;
    let mut x = vec![0.0; n];
    let mut rank = 0;
    for j in 0..n {
        if sigma[j] <= cutoff || sigma[j] == 0.0 {
            continue;
        }
        rank += 1;
        // u_j = w_j / σ_j ;  x += v_j (u_j · c) / σ_j
        let uc: f64 = (0..n).map(|i| w[i * n + j] * qtb[i]).sum::<f64>() / sigma[j];
        let coef = uc / sigma[j];
        for i in 0..n {
            x[i] += v[i * n + j] * coef;
        }
    }

    let residual_norm = math::sqrt(
        (0..rows)
            .map(|i| {
                let ax: f64 = (0..cols).map(|j| a[i * cols + j] * x[j]).sum();
                (ax - b[i]) * (ax - b[i])
            })
            .sum(),
    );
    let mut singular_values = sigma;
    singular_values.sort_by(|a, b| b.partial_cmp(a).unwrap_or(core::cmp::Ordering::Equal));
    LeastSquares {
        solution: x,
        singular_values,
        rank,
        residual_norm,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_known_matrix() {
        let a = [4.0, 7.0, 2.0, 6.0];
        let inv = inverse(&a, 2).unwrap();
        let expected = [0.6, -0.7, -0.2, 0.4];
        for (x, e) in inv.iter().zip(expected) {
            assert!((x - e).abs() < 1e-14);
        }
        assert!(inverse(&[1.0, 2.0, 2.0, 4.0], 2).is_none());
    }

    #[test]
    fn eigenvalues_of_symmetric() {
        let a = [2.0, 1.0, 0.0, 1.0, 2.0, 0.0, 0.0, 0.0, -3.0];
        let ev = symmetric_eigenvalues(&a, 3);
        for (x, e) in ev.iter().zip([-3.0, 1.0, 3.0]) {
            assert!((x - e).abs() < 1e-12, "{ev:?}");
        }
    }

    #[test]
    fn overdetermined_consistent_system() {
        // x + y = 3, x - y = 1, 2x = 4
        let a = [1.0, 1.0, 1.0, -1.0, 2.0, 0.0];
        let b = [3.0, 1.0, 4.0];
        let ls = lstsq(&a, 3, 2, &b, 1e-12);
        assert!((ls.solution[0] - 2.0).abs() < 1e-13);
        assert!((ls.solution[1] - 1.0).abs() < 1e-13);
        assert_eq!(ls.rank, 2);
        assert!(ls.residual_norm < 1e-13);
    }

    #[test]
    fn rank_deficient_gives_minimal_norm() {
        // x + y = 2 twice: minimal norm solution (1, 1)
        let a = [1.0, 1.0, 1.0, 1.0];
        let b = [2.0, 2.0];
        let ls = lstsq(&a, 2, 2, &b, 1e-12);
        assert_eq!(ls.rank, 1);
        assert!((ls.solution[0] - 1.0).abs() < 1e-13);
        assert!((ls.solution[1] - 1.0).abs() < 1e-13);
    }

    #[test]
    fn zero_system_gives_zero() {
        let ls = lstsq(&[0.0; 6], 3, 2, &[0.0; 3], 1e-12);
        assert_eq!(ls.rank, 0);
        assert_eq!(ls.solution, vec![0.0, 0.0]);
    }

    #[test]
    fn least_squares_line_fit() {
        // fit y = a + b t through (0,1), (1,2), (2,2): normal equations give a=7/6, b=1/2
        let a = [1.0, 0.0, 1.0, 1.0, 1.0, 2.0];
        let b = [1.0, 2.0, 2.0];
        let ls = lstsq(&a, 3, 2, &b, 1e-12);
        assert!((ls.solution[0] - 7.0 / 6.0).abs() < 1e-13);
        assert!((ls.solution[1] - 0.5).abs() < 1e-13);
    }
}
