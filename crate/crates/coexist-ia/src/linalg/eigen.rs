//! Hermitian eigendecomposition by cyclic complex Jacobi rotations, plus the
//! generalized problem `M x = λ D x` reduced through a Cholesky factor of `D`.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::{cholesky, solve_lower, solve_lower_adjoint, CMat, LinalgError};

const MAX_SWEEPS: usize = 60;

/// Eigenvalues in ascending order with the matching eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

/// Diagonalizes a Hermitian matrix; eigenvalues ascend.
///
/// The input is read as Hermitian: only `a[p][q]` for `p < q` and the real
/// part of the diagonal are consulted, so small Hermitian defects from
/// accumulated rounding are harmless.
pub fn hermitian_eigen(a: &CMat) -> Result<HermitianEigen, LinalgError> {
    if a.rows() != a.cols() {
        return Err(LinalgError::ShapeMismatch(format!("eigen of {}", a.shape_str())));
    }
    let n = a.rows();
    let mut w = a.clone();
    let mut v = CMat::identity(n);
    if n > 1 {
        let scale = w.frob_norm().max(1e-300);
        let tol = 1e-30 * scale * scale;
        let mut converged = false;
        for _ in 0..MAX_SWEEPS {
            let mut off = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += w.get(p, q).norm_sqr();
                }
            }
            if off <= tol {
                converged = true;
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut w, &mut v, p, q);
                }
            }
        }
        if !converged {
            // One last check: cyclic Jacobi converges quadratically, so this
            // only trips on pathological (non-Hermitian) input.
            let mut off = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += w.get(p, q).norm_sqr();
                }
            }
            if off > 1e-18 * scale * scale {
                return Err(LinalgError::NoConvergence {
                    condition_estimate: off.sqrt() / scale,
                });
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w.get(i, i).re.total_cmp(&w.get(j, j).re));
    let values: Vec<f64> = order.iter().map(|&i| w.get(i, i).re).collect();
    let vectors = CMat::from_fn(n, n, |i, j| v.get(i, order[j]));
    Ok(HermitianEigen { values, vectors })
}

/// One Jacobi rotation zeroing `w[p][q]`, accumulated into `v`.
fn rotate(w: &mut CMat, v: &mut CMat, p: usize, q: usize) {
    let apq = w.get(p, q);
    let abs = apq.norm();
    if abs == 0.0 {
        return;
    }
    let app = w.get(p, p).re;
    let aqq = w.get(q, q).re;
    let tau = (aqq - app) / (2.0 * abs);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = apq / abs * (t * c);

    let n = w.rows();
    // Right multiplication by the rotation: columns p and q.
    for k in 0..n {
        let wp = w.get(k, p);
        let wq = w.get(k, q);
        w.set(k, p, wp * c - wq * s.conj());
        w.set(k, q, wp * s + wq * c);
    }
    // Left multiplication by its adjoint: rows p and q.
    for k in 0..n {
        let wp = w.get(p, k);
        let wq = w.get(q, k);
        w.set(p, k, wp * c - wq * s);
        w.set(q, k, wp * s.conj() + wq * c);
    }
    // The transformed (p,q) entry is zero and the diagonal real by
    // construction; pin both to keep rounding debris from accumulating.
    w.set(p, q, Complex64::new(0.0, 0.0));
    w.set(q, p, Complex64::new(0.0, 0.0));
    let dp = w.get(p, p).re;
    let dq = w.get(q, q).re;
    w.set(p, p, Complex64::new(dp, 0.0));
    w.set(q, q, Complex64::new(dq, 0.0));
    for k in 0..n {
        let vp = v.get(k, p);
        let vq = v.get(k, q);
        v.set(k, p, vp * c - vq * s.conj());
        v.set(k, q, vp * s + vq * c);
    }
}

/// Solves the generalized Hermitian problem `M x = λ D x` with `M` Hermitian
/// PSD and `D` Hermitian positive definite.
///
/// The columns of `vectors` are the generalized eigenvectors (equivalently
/// the eigenvectors of `D^{-1} M`), `D`-orthonormal rather than unit-norm;
/// eigenvalues ascend and are real.
pub fn generalized_hermitian_eigen(m: &CMat, d: &CMat) -> Result<HermitianEigen, LinalgError> {
    if m.rows() != m.cols() || d.rows() != d.cols() || m.rows() != d.rows() {
        return Err(LinalgError::ShapeMismatch(format!(
            "generalized eigen of {} against {}",
            m.shape_str(),
            d.shape_str()
        )));
    }
    let l = cholesky(d)?;
    // W = L^{-1} M L^{-H} is Hermitian with the same eigenvalues.
    let li_m = solve_lower(&l, m);
    let w = solve_lower(&l, &li_m.adjoint()).adjoint();
    let eig = hermitian_eigen(&w)?;
    let vectors = solve_lower_adjoint(&l, &eig.vectors);
    Ok(HermitianEigen { values: eig.values, vectors })
}
