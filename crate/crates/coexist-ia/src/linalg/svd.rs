//! One-sided Jacobi SVD. Only singular values and right singular vectors are
//! kept; that is all the projection baselines and rank checks need.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::CMat;

const MAX_SWEEPS: usize = 60;

/// Singular values in descending order with matching right singular vectors
/// as columns of a unitary matrix.
#[derive(Debug, Clone)]
pub struct SvdRight {
    pub singular_values: Vec<f64>,
    pub right_vectors: CMat,
}

impl SvdRight {
    /// Numerical rank: singular values above `rel_tol * sigma_max`.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let smax = self.singular_values.first().copied().unwrap_or(0.0);
        if smax == 0.0 {
            return 0;
        }
        self.singular_values.iter().filter(|&&s| s > rel_tol * smax).count()
    }
}

/// Computes the SVD of `a` by orthogonalizing its columns with Jacobi
/// rotations; the accumulated rotations form the right singular vectors.
/// Handles zero and rank-deficient input (zero singular values, still
/// unitary `right_vectors`).
pub fn svd_right(a: &CMat) -> SvdRight {
    let n = a.cols();
    let mut b = a.clone();
    let mut v = CMat::identity(n);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = Complex64::new(0.0, 0.0);
                for k in 0..b.rows() {
                    let bi = b.get(k, i);
                    let bj = b.get(k, j);
                    alpha += bi.norm_sqr();
                    beta += bj.norm_sqr();
                    gamma += bi.conj() * bj;
                }
                let g = gamma.norm();
                if g <= 1e-300 || g * g <= 1e-30 * alpha * beta {
                    continue;
                }
                rotated = true;
                // Same 2x2 Hermitian rotation as the eigensolver, applied to
                // the Gram matrix [[alpha, gamma], [conj(gamma), beta]].
                let tau = (beta - alpha) / (2.0 * g);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = gamma / g * (t * c);
                for k in 0..b.rows() {
                    let bi = b.get(k, i);
                    let bj = b.get(k, j);
                    b.set(k, i, bi * c - bj * s.conj());
                    b.set(k, j, bi * s + bj * c);
                }
                for k in 0..n {
                    let vi = v.get(k, i);
                    let vj = v.get(k, j);
                    v.set(k, i, vi * c - vj * s.conj());
                    v.set(k, j, vi * s + vj * c);
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n).map(|j| b.col_norm(j)).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    SvdRight {
        singular_values: order.iter().map(|&j| norms[j]).collect(),
        right_vectors: CMat::from_fn(n, n, |i, j| v.get(i, order[j])),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::complex_normal;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn right_vectors_diagonalize_gram_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let a = CMat::from_fn(7, 4, |_, _| complex_normal(&mut rng, 1.0));
        let svd = svd_right(&a);
        let g = a.adjoint().mul(&a);
        let d = svd.right_vectors.adjoint().mul(&g).mul(&svd.right_vectors);
        for i in 0..4 {
            for j in 0..4 {
                if i == j {
                    let s2 = svd.singular_values[i] * svd.singular_values[i];
                    assert!((d.get(i, i).re - s2).abs() < 1e-10 * (1.0 + s2));
                } else {
                    assert!(d.get(i, j).norm() < 1e-10);
                }
            }
        }
        let unit = svd.right_vectors.adjoint().mul(&svd.right_vectors);
        assert!(unit.sub(&CMat::identity(4)).frob_norm() < 1e-12);
    }

    #[test]
    fn zero_matrix_yields_orthonormal_basis() {
        let svd = svd_right(&CMat::zeros(5, 3));
        assert!(svd.singular_values.iter().all(|&s| s == 0.0));
        let unit = svd.right_vectors.adjoint().mul(&svd.right_vectors);
        assert!(unit.sub(&CMat::identity(3)).frob_norm() < 1e-14);
    }

    #[test]
    fn rank_counts_dominant_directions() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let u = CMat::from_fn(6, 2, |_, _| complex_normal(&mut rng, 1.0));
        let w = CMat::from_fn(2, 4, |_, _| complex_normal(&mut rng, 1.0));
        let a = u.mul(&w); // rank 2 by construction
        let svd = svd_right(&a);
        assert_eq!(svd.rank(1e-9), 2);
    }
}
