//! Sampling search over the unit sphere of a subspace.
//!
//! Candidates are warm starts plus seeded low-discrepancy samples. The best
//! few are refined by a pattern search in coefficient space. Objectives
//! return certified enclosures, so a maximizer's `lo` is a rigorous lower
//! bound for the supremum and a minimizer's `hi` a rigorous upper bound for
//! the infimum.

use crate::interval::Interval;
use crate::linalg::{c, reject, Mat, Vector, C64};
use crate::normed::dist::dist_ref;
use crate::normed::sample::SphereSampler;
use crate::normed::NormedSpace;

#[derive(Clone, Copy, Debug)]
pub(crate) struct SearchOpts {
    pub budget: usize,
    pub seed: u64,
    pub refine_steps: usize,
}

pub(crate) trait Objective {
    /// Certified values at the columns of `xs` (reference coordinates).
    fn eval(&self, xs: &Mat) -> Vec<Interval>;
}

pub(crate) struct Found {
    pub value: Interval,
    /// Best point, reference coordinates.
    pub x: Vector,
    pub evaluations: usize,
}

const EPS: f64 = f64::EPSILON;
const BATCH: usize = 256;
const KEEP: usize = 3;

fn score(v: &Interval, maximize: bool) -> f64 {
    if maximize {
        v.lo
    } else {
        -v.hi
    }
}

pub(crate) fn search(
    space: &NormedSpace,
    basis: &Mat,
    obj: &dyn Objective,
    warm: &[Vector],
    opts: SearchOpts,
    maximize: bool,
) -> Option<Found> {
    let k = basis.ncols();
    if k == 0 {
        return None;
    }
    let complex = !space.is_real();
    let mut sampler = SphereSampler::new(k, complex, opts.seed);
    let mut coeffs: Vec<Vector> = warm.iter().filter(|w| w.norm() > 0.0).map(|w| w / c(w.norm())).collect();
    // Coordinate directions are cheap and often extremal for ℓ¹/ℓ∞.
    for j in 0..k {
        let mut e = Vector::zeros(k);
        e[j] = c(1.0);
        coeffs.push(e);
    }
    for _ in 0..opts.budget {
        coeffs.push(sampler.next_unit());
    }
    let mut evaluations = 0;
    let mut top: Vec<(f64, Interval, Vector)> = Vec::new();
    for chunk in coeffs.chunks(BATCH) {
        let cm = Mat::from_columns(chunk);
        let xs = basis * &cm;
        let vals = obj.eval(&xs);
        evaluations += chunk.len();
        for (v, cf) in vals.into_iter().zip(chunk) {
            let s = score(&v, maximize);
            if s.is_nan() {
                continue;
            }
            if top.len() < KEEP || s > top[top.len() - 1].0 {
                top.push((s, v, cf.clone()));
                top.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
                top.truncate(KEEP);
            }
        }
    }
    if top.is_empty() {
        return None;
    }
    let dof = space.dof(k);
    let mut best = top[0].clone();
    for (s0, v0, c0) in top {
        let (mut s, mut v, mut cf) = (s0, v0, c0);
        let mut h = 0.25;
        for _ in 0..opts.refine_steps {
            let mut trials = Vec::with_capacity(2 * dof);
            for j in 0..k {
                let units: &[C64] = if complex { &[C64::new(1.0, 0.0), C64::new(0.0, 1.0)] } else { &[C64::new(1.0, 0.0)] };
                for &unit in units {
                    for sign in [1.0, -1.0] {
                        let mut t = cf.clone();
                        t[j] += unit * sign * h;
                        let nt = t.norm();
                        if nt > 0.0 {
                            trials.push(t / c(nt));
                        }
                    }
                }
            }
            let xs = basis * Mat::from_columns(&trials);
            let vals = obj.eval(&xs);
            evaluations += trials.len();
            let mut improved = false;
            for (tv, t) in vals.into_iter().zip(trials) {
                let ts = score(&tv, maximize);
                if ts > s {
                    s = ts;
                    v = tv;
                    cf = t;
                    improved = true;
                }
            }
            if !improved {
                h *= 0.5;
                if h < 1e-9 {
                    break;
                }
            }
        }
        if s > best.0 {
            best = (s, v, cf);
        }
    }
    let x = basis * &best.2;
    Some(Found { value: best.1, x, evaluations })
}

/// `dist(x, N) / den(x)` where `den` is either `||x||` or `dist(x, L)`.
pub(crate) struct DistRatio<'a> {
    pub space: &'a NormedSpace,
    pub qn: &'a Mat,
    /// `None`: divide by the norm; `Some(L)`: divide by `dist(x, L)`.
    pub den: Option<&'a Mat>,
}

fn ratio(num: Interval, den: Interval) -> Interval {
    if den.hi <= 0.0 {
        return Interval::new(f64::NAN, f64::NAN);
    }
    let lo = num.lo / den.hi;
    let hi = if den.lo > 0.0 { num.hi / den.lo } else { f64::INFINITY };
    Interval::new((lo * (1.0 - 4.0 * EPS)).max(0.0), hi * (1.0 + 4.0 * EPS))
}

impl DistRatio<'_> {
    fn norm_interval(&self, x: &Vector) -> Interval {
        let v = self.space.ref_norm(x);
        let e = 4.0 * x.len() as f64 * EPS;
        Interval::new(v * (1.0 - e), v * (1.0 + e))
    }
}

impl Objective for DistRatio<'_> {
    fn eval(&self, xs: &Mat) -> Vec<Interval> {
        let n = xs.nrows();
        if self.space.is_l2() {
            // Batched exact projections.
            let rn = reject(self.qn, xs);
            let rd = self.den.map(|ql| reject(ql, xs));
            let pad_n = 16.0 * (n + self.qn.ncols()) as f64 * EPS;
            (0..xs.ncols())
                .map(|j| {
                    let xn = xs.column(j).norm();
                    let dn = rn.column(j).norm();
                    let num = Interval::new((dn - pad_n * xn).max(0.0), dn + pad_n * xn);
                    let den = match &rd {
                        None => Interval::new(xn * (1.0 - 4.0 * EPS), xn * (1.0 + 4.0 * EPS)),
                        Some(r) => {
                            let d = r.column(j).norm();
                            Interval::new((d - pad_n * xn).max(0.0), d + pad_n * xn)
                        }
                    };
                    ratio(num, den)
                })
                .collect()
        } else {
            (0..xs.ncols())
                .map(|j| {
                    let x = xs.column(j).into_owned();
                    let num = dist_ref(self.space, self.qn, &x).interval();
                    let den = match self.den {
                        None => self.norm_interval(&x),
                        Some(ql) => dist_ref(self.space, ql, &x).interval(),
                    };
                    ratio(num, den)
                })
                .collect()
        }
    }
}
