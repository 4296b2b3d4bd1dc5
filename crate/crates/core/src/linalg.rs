//! Dense linear-algebra helpers over complex matrices.
//!
//! Everything is stored as `Complex64`. Real data is routed through real
//! factorizations so that bases of real subspaces stay real (complex SVDs
//! would attach arbitrary phases to singular vectors).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type Mat = DMatrix<C64>;
pub type Vector = DVector<C64>;

pub const DEFAULT_RANK_TOL: f64 = 1e-9;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn is_real_mat(a: &Mat) -> bool {
    a.iter().all(|z| z.im == 0.0)
}

pub fn is_real_vec(a: &Vector) -> bool {
    a.iter().all(|z| z.im == 0.0)
}

pub fn to_real(a: &Mat) -> DMatrix<f64> {
    a.map(|z| z.re)
}

pub fn from_real(a: &DMatrix<f64>) -> Mat {
    a.map(c)
}

/// Thin SVD with singular values sorted in decreasing order.
///
/// `u` is `m x r`, `v` is `n x r` (right singular vectors as columns),
/// `r = min(m, n)`.
pub struct Svd {
    pub u: Mat,
    pub s: Vec<f64>,
    pub v: Mat,
}

pub fn svd(a: &Mat) -> Svd {
    let (m, n) = a.shape();
    let r = m.min(n);
    if r == 0 {
        return Svd { u: Mat::zeros(m, 0), s: vec![], v: Mat::zeros(n, 0) };
    }
    // faer's divide-and-conquer SVD stays accurate on rank-deficient input,
    // where nalgebra's bidiagonal iteration can return a wrong U.
    if is_real_mat(a) {
        let f = faer::Mat::<f64>::from_fn(m, n, |i, j| a[(i, j)].re);
        let d = f.thin_svd().expect("svd converges");
        let (u, v, s) = (d.U(), d.V(), d.S().column_vector());
        Svd {
            u: Mat::from_fn(m, r, |i, j| c(u[(i, j)])),
            s: (0..r).map(|i| s[i]).collect(),
            v: Mat::from_fn(n, r, |i, j| c(v[(i, j)])),
        }
    } else {
        let f = faer::Mat::<C64>::from_fn(m, n, |i, j| a[(i, j)]);
        let d = f.thin_svd().expect("svd converges");
        let (u, v, s) = (d.U(), d.V(), d.S().column_vector());
        Svd {
            u: Mat::from_fn(m, r, |i, j| u[(i, j)]),
            s: (0..r).map(|i| s[i].re).collect(),
            v: Mat::from_fn(n, r, |i, j| v[(i, j)]),
        }
    }
}

/// Number of singular values above `tol * s_max`.
pub fn numerical_rank(s: &[f64], tol: f64) -> usize {
    let smax = s.first().cloned().unwrap_or(0.0);
    if !(smax > f64::MIN_POSITIVE * 1e10) {
        return 0;
    }
    s.iter().filter(|&&x| x > tol * smax).count()
}

pub fn rank(a: &Mat, tol: f64) -> usize {
    numerical_rank(&svd(a).s, tol)
}

/// Orthonormal basis of the column space.
pub fn orth(a: &Mat, tol: f64) -> Mat {
    let d = svd(a);
    let r = numerical_rank(&d.s, tol);
    d.u.columns(0, r).into_owned()
}

/// Orthonormal basis of the null space.
/// Null space keeping singular values `≤ thresh`, an absolute bound.
pub fn null_space_abs(a: &Mat, thresh: f64) -> Mat {
    let n = a.ncols();
    if a.nrows() == 0 {
        return identity(n);
    }
    let mut padded = Mat::zeros(a.nrows().max(n), n);
    padded.view_mut((0, 0), a.shape()).copy_from(a);
    let d = svd(&padded);
    let r = d.s.iter().filter(|&&s| s > thresh).count();
    d.v.columns(r, n - r).into_owned()
}

pub fn null_space(a: &Mat, tol: f64) -> Mat {
    let (m, n) = a.shape();
    if n == 0 {
        return Mat::zeros(0, 0);
    }
    if m == 0 {
        return identity(n);
    }
    // Pad to at least square so the SVD returns a full right basis.
    let padded = if m < n {
        let mut p = Mat::zeros(n, n);
        p.view_mut((0, 0), (m, n)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let d = svd(&padded);
    let r = numerical_rank(&d.s, tol);
    d.v.columns(r, n - r).into_owned()
}

pub fn identity(n: usize) -> Mat {
    Mat::identity(n, n)
}

/// Orthonormal basis for the part of `span(big)` orthogonal to `span(small)`.
/// Both inputs are assumed orthonormal with `span(small) ⊆ span(big)`.
pub fn complement_within(big: &Mat, small: &Mat, tol: f64) -> Mat {
    if small.ncols() == 0 {
        return big.clone();
    }
    let coupling = small.adjoint() * big;
    let ns = null_space(&coupling, tol);
    let out = big * ns;
    orth(&out, tol)
}

/// Orthogonal projection of the columns of `a` onto the complement of the
/// orthonormal basis `q`.
pub fn reject(q: &Mat, a: &Mat) -> Mat {
    if q.ncols() == 0 {
        return a.clone();
    }
    a - q * (q.adjoint() * a)
}

pub fn reject_vec(q: &Mat, a: &Vector) -> Vector {
    if q.ncols() == 0 {
        return a.clone();
    }
    a - q * (q.adjoint() * a)
}

pub fn spectral_norm(a: &Mat) -> f64 {
    svd(a).s.first().cloned().unwrap_or(0.0)
}

/// Eigen-decomposition of a Hermitian matrix; eigenvalues ascending.
pub fn herm_eig(a: &Mat) -> (Vec<f64>, Mat) {
    let n = a.nrows();
    if n == 0 {
        return (vec![], Mat::zeros(0, 0));
    }
    let h = (a + a.adjoint()) * c(0.5);
    let side = faer::Side::Lower;
    if is_real_mat(&h) {
        let f = faer::Mat::<f64>::from_fn(n, n, |i, j| h[(i, j)].re);
        let e = f.self_adjoint_eigen(side).expect("eigen-decomposition converges");
        let (u, s) = (e.U(), e.S().column_vector());
        ((0..n).map(|i| s[i]).collect(), Mat::from_fn(n, n, |i, j| c(u[(i, j)])))
    } else {
        let f = faer::Mat::<C64>::from_fn(n, n, |i, j| h[(i, j)]);
        let e = f.self_adjoint_eigen(side).expect("eigen-decomposition converges");
        let (u, s) = (e.U(), e.S().column_vector());
        ((0..n).map(|i| s[i].re).collect(), Mat::from_fn(n, n, |i, j| u[(i, j)]))
    }
}

/// Moore–Penrose pseudo-inverse, dropping singular values below
/// `tol·σ_max`.
pub fn pinv(a: &Mat, tol: f64) -> Mat {
    lstsq(a, &identity(a.nrows()), tol)
}

/// Least-squares solve `min ||a x - b||` through the SVD pseudo-inverse.
pub fn lstsq(a: &Mat, b: &Mat, tol: f64) -> Mat {
    let d = svd(a);
    let r = numerical_rank(&d.s, tol);
    let mut x = Mat::zeros(a.ncols(), b.ncols());
    for i in 0..r {
        let ui = d.u.column(i);
        let vi = d.v.column(i);
        let coef = ui.adjoint() * b / c(d.s[i]);
        x += vi * coef;
    }
    x
}

pub fn hstack(mats: &[&Mat], rows: usize) -> Mat {
    let cols: usize = mats.iter().map(|m| m.ncols()).sum();
    let mut out = Mat::zeros(rows, cols);
    let mut at = 0;
    for m in mats {
        if m.ncols() > 0 {
            out.view_mut((0, at), (rows, m.ncols())).copy_from(*m);
        }
        at += m.ncols();
    }
    out
}
