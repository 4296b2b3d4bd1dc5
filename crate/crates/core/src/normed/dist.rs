//! Certified distance from a vector to a subspace.
//!
//! Every solver returns an enclosure `[lo, hi]`: `hi` is the norm of an
//! explicit residual `u - v` with `v` in the subspace, and `lo` is the value
//! `|f(u)| / ||f||_*` of an explicit functional `f` annihilating the
//! subspace. Both sides are rigorous up to floating-point rounding, which is
//! padded outward.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::lp::{self, LpNorm};
use super::space::{Exponent, NormedSpace};
use super::subspace::Subspace;
use crate::error::{GapError, Result};
use crate::interval::{ext_f64, Interval};
use crate::linalg::{c, is_real_mat, is_real_vec, lstsq, reject_vec, to_real, Mat, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DistMethod {
    #[serde(rename = "exact-l2")]
    ExactL2,
    #[serde(rename = "lp-linear-program")]
    LpLinearProgram,
    #[serde(rename = "subgradient")]
    Subgradient,
    #[serde(rename = "sampled")]
    Sampled,
}

/// A certified enclosure of a non-negative quantity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistInterval {
    #[serde(with = "ext_f64")]
    pub lo: f64,
    #[serde(with = "ext_f64")]
    pub hi: f64,
    pub method: DistMethod,
}

impl DistInterval {
    pub fn new(lo: f64, hi: f64, method: DistMethod) -> Self {
        let lo = lo.max(0.0);
        DistInterval { lo: lo.min(hi), hi, method }
    }

    pub fn exact(x: f64, method: DistMethod) -> Self {
        DistInterval { lo: x, hi: x, method }
    }

    pub fn interval(&self) -> Interval {
        Interval::new(self.lo, self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Enclosure of the maximum of two quantities.
    pub fn max(self, o: DistInterval) -> DistInterval {
        DistInterval { lo: self.lo.max(o.lo), hi: self.hi.max(o.hi), method: weaker(self.method, o.method) }
    }

    pub fn min(self, o: DistInterval) -> DistInterval {
        DistInterval { lo: self.lo.min(o.lo), hi: self.hi.min(o.hi), method: weaker(self.method, o.method) }
    }
}

impl From<DistInterval> for Interval {
    fn from(d: DistInterval) -> Interval {
        d.interval()
    }
}

fn weaker(a: DistMethod, b: DistMethod) -> DistMethod {
    fn rank(m: DistMethod) -> u8 {
        match m {
            DistMethod::ExactL2 => 0,
            DistMethod::LpLinearProgram => 1,
            DistMethod::Subgradient => 2,
            DistMethod::Sampled => 3,
        }
    }
    if rank(a) >= rank(b) {
        a
    } else {
        b
    }
}

/// Solver output in reference coordinates.
#[derive(Clone, Debug)]
pub(crate) struct RefDist {
    pub lo: f64,
    pub hi: f64,
    pub method: DistMethod,
    /// Nearest point found (reference coordinates).
    pub nearest: Vector,
}

impl RefDist {
    pub fn interval(&self) -> Interval {
        Interval::new(self.lo, self.hi)
    }
}

const EPS: f64 = f64::EPSILON;

fn default_method(space: &NormedSpace) -> DistMethod {
    match space.exponent() {
        Exponent::Two => DistMethod::ExactL2,
        Exponent::One | Exponent::Inf if space.is_real() => DistMethod::LpLinearProgram,
        _ => DistMethod::Subgradient,
    }
}

/// Distance from the reference vector `y` to the span of the orthonormal
/// reference basis `q`.
pub(crate) fn dist_ref(space: &NormedSpace, q: &Mat, y: &Vector) -> RefDist {
    let n = y.len();
    let k = q.ncols();
    let ynorm = space.ref_norm(y);
    if k == 0 || ynorm == 0.0 {
        let pad = 4.0 * n as f64 * EPS * ynorm;
        let nearest = Vector::zeros(n);
        return RefDist { lo: (ynorm - pad).max(0.0), hi: ynorm + pad, method: default_method(space), nearest };
    }
    match space.exponent() {
        Exponent::Two => {
            let cf = q.adjoint() * y;
            let nearest = q * cf;
            let d = (y - &nearest).norm();
            let pad = 16.0 * (n + k) as f64 * EPS * y.norm();
            RefDist { lo: (d - pad).max(0.0), hi: d + pad, method: DistMethod::ExactL2, nearest }
        }
        Exponent::One | Exponent::Inf if space.is_real() && is_real_mat(q) && is_real_vec(y) => {
            let which = if space.exponent() == Exponent::One { LpNorm::L1 } else { LpNorm::LInf };
            let qr = to_real(q);
            let yr = DVector::from_iterator(n, y.iter().map(|z| z.re));
            match lp::solve(&yr, &qr, which) {
                Some(out) => {
                    let nearest = Vector::from_iterator(n, (&qr * &out.coeffs).iter().map(|&x| c(x)));
                    let hi = space.ref_norm(&(y - &nearest)) * (1.0 + 8.0 * n as f64 * EPS);
                    let f = Vector::from_iterator(n, out.dual.iter().map(|&x| c(x)));
                    let lo = certify_dual(space, q, y, f);
                    RefDist { lo: lo.min(hi), hi, method: DistMethod::LpLinearProgram, nearest }
                }
                None => descent(space, q, y),
            }
        }
        _ => descent(space, q, y),
    }
}

/// Lower bound `|f(y)| / ||f||_*` after projecting `f` onto the annihilator.
/// Rounding in `f(y)` scales with `f` before projection, which can be much
/// larger than what is left after it.
fn certify_dual(space: &NormedSpace, q: &Mat, y: &Vector, f: Vector) -> f64 {
    let f0 = f.norm();
    let f = reject_vec(q, &f);
    let fn_ = space.ref_dual_norm(&f);
    if !(fn_ > 0.0) {
        return 0.0;
    }
    let n = y.len() as f64;
    let err = 16.0 * n * EPS * f0 * y.norm();
    ((f.dotc(y).norm() - err).max(0.0) / fn_ * (1.0 - 8.0 * n * EPS)).max(0.0)
}

fn weighted_ls(q: &Mat, y: &Vector, w: &[f64]) -> Vector {
    let n = y.len();
    let sw: Vec<f64> = w.iter().map(|x| x.sqrt()).collect();
    let mut a = q.clone();
    for i in 0..n {
        a.row_mut(i).scale_mut(sw[i]);
    }
    let b = Mat::from_iterator(n, 1, y.iter().zip(&sw).map(|(z, s)| z * s));
    let x = lstsq(&a, &b, 1e-14);
    Vector::from_iterator(q.ncols(), x.iter().cloned())
}

/// Convex descent: iteratively reweighted least squares for finite `p`,
/// Lawson's reweighting for `p = ∞`. The weighted normal equations make
/// `w ∘ r` annihilate the subspace at every step, which supplies the dual
/// certificate.
fn descent(space: &NormedSpace, q: &Mat, y: &Vector) -> RefDist {
    let n = y.len();
    let p = space.exponent();
    let c0 = q.adjoint() * y;
    let mut cur = c0.clone();
    let mut r = y - q * &cur;
    let mut best_hi = space.ref_norm(&r);
    let mut best_c = cur.clone();
    let mut best_lo = certify_dual(space, q, y, r.clone());
    let scale = r.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    let close = |lo: f64, hi: f64| hi - lo <= 1e-13 * (1.0 + hi);

    if p == Exponent::Inf {
        let mut w = vec![1.0 / n as f64; n];
        for _ in 0..2000 {
            let cl = weighted_ls(q, y, &w);
            let rl = y - q * &cl;
            let hi = space.ref_norm(&rl);
            if hi < best_hi {
                best_hi = hi;
                best_c = cl.clone();
            }
            let f = Vector::from_iterator(n, rl.iter().zip(&w).map(|(z, wi)| z * *wi));
            best_lo = best_lo.max(certify_dual(space, q, y, f));
            if close(best_lo, best_hi) {
                break;
            }
            let s: f64 = rl.iter().zip(&w).map(|(z, wi)| z.norm() * wi).sum();
            if !(s > 0.0) {
                break;
            }
            for (wi, z) in w.iter_mut().zip(rl.iter()) {
                *wi = *wi * z.norm() / s;
            }
        }
    } else {
        let pv = p.p();
        let mut eps = 0.1 * scale;
        for _ in 0..400 {
            let w: Vec<f64> = r
                .iter()
                .map(|z| {
                    let a = z.norm();
                    if pv < 2.0 {
                        a.max(eps).powf(pv - 2.0)
                    } else {
                        a.max(1e-12 * scale).powf(pv - 2.0)
                    }
                })
                .collect();
            let wmax = w.iter().cloned().fold(0.0, f64::max);
            let w: Vec<f64> = w.iter().map(|x| x / wmax).collect();
            let cl = weighted_ls(q, y, &w);
            let rl = y - q * &cl;
            let f = Vector::from_iterator(n, rl.iter().zip(&w).map(|(z, wi)| z * *wi));
            best_lo = best_lo.max(certify_dual(space, q, y, f));
            // Damped step on the primal objective.
            let cur_val = space.ref_norm(&r);
            let mut theta = 1.0;
            let mut moved = false;
            for _ in 0..30 {
                let trial = &cur + (&cl - &cur) * c(theta);
                let rt = y - q * &trial;
                let v = space.ref_norm(&rt);
                if v <= cur_val || pv <= 2.0 {
                    cur = trial;
                    r = rt;
                    moved = true;
                    break;
                }
                theta *= 0.5;
            }
            let val = space.ref_norm(&r);
            if val < best_hi {
                best_hi = val;
                best_c = cur.clone();
            }
            if pv < 2.0 {
                eps = (eps * 0.6).max(1e-15 * scale);
            }
            if close(best_lo, best_hi) || !moved {
                break;
            }
        }
    }
    let nearest = q * &best_c;
    let hi = space.ref_norm(&(y - &nearest)) * (1.0 + 8.0 * n as f64 * EPS);
    RefDist { lo: best_lo.min(hi), hi, method: DistMethod::Subgradient, nearest }
}

fn check_vector(u: &Vector, n: &Subspace) -> Result<()> {
    if u.len() != n.ambient_dim() {
        return Err(GapError::DimensionMismatch(format!(
            "vector of length {} in a space of dimension {}",
            u.len(),
            n.ambient_dim()
        )));
    }
    if n.space().is_real() && !is_real_vec(u) {
        return Err(GapError::Input("complex vector in a real space".into()));
    }
    Ok(())
}

/// Certified enclosure of `dist(u, N) = inf_{v ∈ N} ||u - v||`.
pub fn dist_to_subspace(u: &Vector, n: &Subspace) -> Result<DistInterval> {
    Ok(nearest_point(u, n)?.0)
}

/// Distance enclosure together with the nearest point found (ambient
/// coordinates). The norm of `u - nearest` is at most `hi`.
pub fn nearest_point(u: &Vector, n: &Subspace) -> Result<(DistInterval, Vector)> {
    check_vector(u, n)?;
    let space = n.space();
    let y = space.to_ref(u);
    let d = dist_ref(space, n.ref_basis(), &y);
    Ok((DistInterval::new(d.lo, d.hi, d.method), space.from_ref(&d.nearest)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normed::space::{Field, Norm};
    use std::sync::Arc;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_iterator(xs.len(), xs.iter().map(|&x| c(x)))
    }

    fn span(space: &Arc<NormedSpace>, cols: &[&[f64]]) -> Subspace {
        let n = space.dim();
        Subspace::new(space, Mat::from_fn(n, cols.len(), |i, j| c(cols[j][i]))).unwrap()
    }

    #[test]
    fn l2_distance_is_exact() {
        let s = Arc::new(NormedSpace::euclidean(2));
        let n = span(&s, &[&[1.0, 0.0]]);
        let d = dist_to_subspace(&v(&[1.0, 1.0]), &n).unwrap();
        assert!(d.contains(1.0));
        assert!(d.width() <= 1e-12 * (1.0 + d.hi));
        assert_eq!(d.method, DistMethod::ExactL2);
    }

    #[test]
    fn l1_distance_via_lp() {
        let s = Arc::new(NormedSpace::real_lp(2, 1.0).unwrap());
        let n = span(&s, &[&[1.0, 0.0]]);
        let d = dist_to_subspace(&v(&[1.0, 1.0]), &n).unwrap();
        assert_eq!(d.method, DistMethod::LpLinearProgram);
        assert!(d.contains(1.0) && d.width() < 1e-9, "{d:?}");
    }

    #[test]
    fn linf_distance_via_lp() {
        // dist((1,1), span{(1,-1)}) in ℓ∞ is 1, attained at t = 0.
        let s = Arc::new(NormedSpace::real_lp(2, f64::INFINITY).unwrap());
        let n = span(&s, &[&[1.0, -1.0]]);
        let d = dist_to_subspace(&v(&[1.0, 1.0]), &n).unwrap();
        assert!(d.contains(1.0) && d.width() < 1e-9, "{d:?}");
    }

    #[test]
    fn zero_subspace_distance_is_norm() {
        let s = Arc::new(NormedSpace::real_lp(3, 1.0).unwrap());
        let z = Subspace::zero(&s);
        let d = dist_to_subspace(&v(&[1.0, -2.0, 0.5]), &z).unwrap();
        assert!(d.contains(3.5));
    }

    #[test]
    fn lp_descent_for_p3() {
        // dist((1,0), span{(1,1)}) in ℓ³: minimize |1-t|^3 + |t|^3, t = 1/2.
        let s = Arc::new(NormedSpace::real_lp(2, 3.0).unwrap());
        let n = span(&s, &[&[1.0, 1.0]]);
        let d = dist_to_subspace(&v(&[1.0, 0.0]), &n).unwrap();
        let exact = (2.0 * 0.125f64).powf(1.0 / 3.0);
        assert!(d.contains(exact), "{d:?} vs {exact}");
        assert!(d.width() < 1e-6, "{d:?}");
    }

    #[test]
    fn complex_l1_descent_encloses() {
        let s = Arc::new(NormedSpace::new(2, Field::Complex, Norm::lp(1.0).unwrap()).unwrap());
        let n = span(&s, &[&[1.0, 0.0]]);
        let d = dist_to_subspace(&v(&[1.0, 1.0]), &n).unwrap();
        assert_eq!(d.method, DistMethod::Subgradient);
        assert!(d.contains(1.0) && d.width() < 1e-6, "{d:?}");
    }

    #[test]
    fn complex_linf_lawson() {
        let s = Arc::new(NormedSpace::new(2, Field::Complex, Norm::lp(f64::INFINITY).unwrap()).unwrap());
        let n = span(&s, &[&[1.0, -1.0]]);
        let d = dist_to_subspace(&v(&[1.0, 1.0]), &n).unwrap();
        assert!(d.contains(1.0) && d.width() < 1e-6, "{d:?}");
    }

    #[test]
    fn weighted_l2() {
        let s = Arc::new(
            NormedSpace::new(2, Field::Real, Norm { p: Exponent::Two, weights: Some(vec![1.0, 4.0]) }).unwrap(),
        );
        let n = span(&s, &[&[1.0, 0.0]]);
        let d = dist_to_subspace(&v(&[3.0, 1.0]), &n).unwrap();
        assert!(d.contains(2.0));
    }

    #[test]
    fn rejects_wrong_length() {
        let s = Arc::new(NormedSpace::euclidean(2));
        let n = span(&s, &[&[1.0, 0.0]]);
        assert!(dist_to_subspace(&v(&[1.0]), &n).is_err());
    }
}
