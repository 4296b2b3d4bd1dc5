//! Gap metrics between subspaces: the one-sided gap `δ`, its symmetrization
//! `δ̂`, the minimum gap `γ`, and the Hausdorff distance of unit spheres.
//!
//! ```text
//! δ(M,N) = sup_{u ∈ S_M} dist(u, N)              (0 if M = {0})
//! γ(M,N) = inf_{u ∈ M∖N} dist(u,N) / dist(u, M∩N) (1 if M ⊆ N)
//! ```
//!
//! Enclosures: for the supremum, `lo` is the best certified sample and `hi`
//! comes from the exact Euclidean value transferred through the norm
//! equivalence constant `n^{|1/2-1/p|}`. For the infimum the roles swap.
//! In ℓ² both sides are tight.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::interval::Interval;
use crate::linalg::{reject, svd, Mat, Vector};
use crate::normed::dist::{dist_ref, DistInterval, DistMethod};
use crate::normed::Subspace;
use crate::search::{search, DistRatio, SearchOpts};

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct GapOptions {
    /// Number of sampled unit vectors per extremal problem.
    pub budget: usize,
    pub seed: u64,
    /// Pattern-search steps applied to the best samples.
    pub refine_steps: usize,
    /// Include the Euclidean extremal direction among the candidates.
    pub warm_start: bool,
    /// Also compute the Hausdorff distance of unit spheres.
    pub hausdorff: bool,
}

impl Default for GapOptions {
    fn default() -> Self {
        GapOptions { budget: 2000, seed: 0, refine_steps: 20, warm_start: true, hausdorff: false }
    }
}

impl GapOptions {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    fn search(&self, salt: u64) -> SearchOpts {
        SearchOpts {
            budget: self.budget,
            seed: self.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(salt),
            refine_steps: self.refine_steps,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GapReport {
    pub delta_mn: DistInterval,
    pub delta_nm: DistInterval,
    pub delta_hat: DistInterval,
    pub gamma_mn: DistInterval,
    pub gamma_nm: DistInterval,
    pub gamma_hat: DistInterval,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hausdorff: Option<DistInterval>,
    pub samples_used: usize,
    pub seed: u64,
}

/// A certified extremal value with the unit vector that realizes its
/// certified side (ambient coordinates), when one exists.
#[derive(Clone, Debug)]
pub struct Extremal {
    pub value: DistInterval,
    pub witness: Option<Vector>,
    pub evaluations: usize,
}

const EPS: f64 = f64::EPSILON;

/// `δ(M,N)` in the reference Euclidean structure: `σ_max((I - P_N) Q_M)`.
pub(crate) fn ref_delta2(qm: &Mat, qn: &Mat) -> f64 {
    if qm.ncols() == 0 {
        return 0.0;
    }
    if qn.ncols() == 0 {
        return 1.0;
    }
    svd(&reject(qn, qm)).s[0].min(1.0)
}

/// Exact Euclidean gap `δ(M,N) = ||(I - P_N) Q_M||_2`. Requires an ℓ² space.
pub fn gap_l2_exact(m: &Subspace, n: &Subspace) -> Result<f64> {
    m.same_space(n)?;
    if !m.space().is_l2() {
        return Err(crate::GapError::InvalidNorm("exact gap needs an l2 norm".into()));
    }
    if m.is_within(n)? {
        // Otherwise the residual of the projector is rounding noise.
        return Ok(0.0);
    }
    Ok(ref_delta2(m.ref_basis(), n.ref_basis()))
}

/// Certified `δ(M,N)` together with a unit witness attaining the lower end.
pub fn delta_extremal(m: &Subspace, n: &Subspace, opts: &GapOptions) -> Result<Extremal> {
    m.same_space(n)?;
    let space = m.space();
    let (qm, qn) = (m.ref_basis(), n.ref_basis());
    if m.dim() == 0 || m.is_within(n)? {
        // Containment is decided by the rank tolerance, and then δ is 0.
        return Ok(Extremal { value: DistInterval::exact(0.0, DistMethod::ExactL2), witness: None, evaluations: 0 });
    }
    let a = reject(qn, qm);
    let d = svd(&a);
    let d2 = d.s[0].min(1.0);
    let warm = if opts.warm_start { vec![d.v.column(0).into_owned()] } else { vec![] };
    let pad = 16.0 * (space.dim() + qm.ncols() + qn.ncols()) as f64 * EPS;
    let (mut hi, method) = if space.is_l2() {
        ((d2 + pad).min(1.0), DistMethod::ExactL2)
    } else {
        ((space.kappa() * d2 * (1.0 + pad) + pad).min(1.0), DistMethod::Sampled)
    };
    if n.dim() == 0 {
        hi = 1.0;
    }
    let obj = DistRatio { space, qn, den: None };
    let found = search(space, qm, &obj, &warm, opts.search(0x11), true).expect("nonzero subspace");
    let mut lo = found.value.lo;
    if m.dim() == 1 {
        // The sphere is a single direction up to phase.
        let x = qm.column(0).into_owned();
        let r = dist_ref(space, qn, &x);
        let nx = space.ref_norm(&x);
        hi = hi.min(r.hi / nx * (1.0 + 4.0 * EPS));
        lo = lo.max(r.lo / nx * (1.0 - 4.0 * EPS));
    }
    if n.dim() == 0 {
        lo = lo.max(1.0 - pad);
    }
    let lo = lo.min(hi);
    let xn = space.ref_norm(&found.x);
    let witness = space.from_ref(&(&found.x / crate::linalg::c(xn)));
    Ok(Extremal { value: DistInterval::new(lo, hi, method), witness: Some(witness), evaluations: found.evaluations })
}

pub fn delta(m: &Subspace, n: &Subspace, opts: &GapOptions) -> Result<DistInterval> {
    Ok(delta_extremal(m, n, opts)?.value)
}

pub fn delta_hat(m: &Subspace, n: &Subspace, opts: &GapOptions) -> Result<DistInterval> {
    Ok(delta(m, n, opts)?.max(delta(n, m, opts)?))
}

/// Certified `γ(M,N)`; the witness attains the upper end.
pub fn gamma_extremal(m: &Subspace, n: &Subspace, opts: &GapOptions) -> Result<Extremal> {
    m.same_space(n)?;
    let space = m.space();
    let l = m.intersect(n)?;
    if m.is_within(n)? {
        return Ok(Extremal { value: DistInterval::exact(1.0, DistMethod::ExactL2), witness: None, evaluations: 0 });
    }
    let mc = l.complement_in(m)?;
    let qmc = mc.ref_basis();
    let qn = n.ref_basis();
    let a = reject(qn, qmc);
    let d = svd(&a);
    let g2 = d.s[d.s.len() - 1];
    let warm = if opts.warm_start { vec![d.v.column(d.s.len() - 1).into_owned()] } else { vec![] };
    let pad = 16.0 * (space.dim() + m.dim() + n.dim()) as f64 * EPS;
    let (lo, method) = if space.is_l2() {
        ((g2 - pad).max(0.0), DistMethod::ExactL2)
    } else {
        (((g2 - pad) / space.kappa()).max(0.0), DistMethod::Sampled)
    };
    let ql = l.ref_basis();
    let obj = DistRatio { space, qn, den: Some(ql) };
    let found = search(space, qmc, &obj, &warm, opts.search(0x22), false).expect("nonzero complement");
    let hi = found.value.hi.min(1.0).max(lo);
    let xn = space.ref_norm(&found.x);
    let witness = space.from_ref(&(&found.x / crate::linalg::c(xn)));
    Ok(Extremal { value: DistInterval::new(lo, hi, method), witness: Some(witness), evaluations: found.evaluations })
}

pub fn gamma(m: &Subspace, n: &Subspace, opts: &GapOptions) -> Result<DistInterval> {
    Ok(gamma_extremal(m, n, opts)?.value)
}

pub fn gamma_hat(m: &Subspace, n: &Subspace, opts: &GapOptions) -> Result<DistInterval> {
    Ok(gamma(m, n, opts)?.min(gamma(n, m, opts)?))
}

/// Hausdorff distance between the unit spheres of `M` and `N`.
///
/// Conventions: `0` if both are zero, `2` if exactly one is. In ℓ² the value
/// is `max 2 sin(θ/2)` over the two largest principal angles; otherwise it is
/// enclosed by `δ̂ <= d̂ <= 2 δ̂`.
pub fn hausdorff(m: &Subspace, n: &Subspace, opts: &GapOptions) -> Result<DistInterval> {
    m.same_space(n)?;
    match (m.dim(), n.dim()) {
        (0, 0) => return Ok(DistInterval::exact(0.0, DistMethod::ExactL2)),
        (0, _) | (_, 0) => return Ok(DistInterval::exact(2.0, DistMethod::ExactL2)),
        _ => {}
    }
    let space = m.space();
    if space.is_l2() {
        let one_sided = |a: &Subspace, b: &Subspace| {
            let s = ref_delta2(a.ref_basis(), b.ref_basis());
            2.0 * (s.asin() / 2.0).sin()
        };
        let v = one_sided(m, n).max(one_sided(n, m));
        let pad = 64.0 * space.dim() as f64 * EPS;
        return Ok(DistInterval::new(v - pad, (v + pad).min(2.0), DistMethod::ExactL2));
    }
    let dh = delta_hat(m, n, opts)?;
    Ok(DistInterval::new(dh.lo, (2.0 * dh.hi).min(2.0), DistMethod::Sampled))
}

/// All gap quantities for a pair of subspaces.
pub fn gap_report(m: &Subspace, n: &Subspace, opts: &GapOptions) -> Result<GapReport> {
    let dmn = delta_extremal(m, n, opts)?;
    let dnm = delta_extremal(n, m, &opts.with_seed(opts.seed.wrapping_add(1)))?;
    let gmn = gamma_extremal(m, n, opts)?;
    let gnm = gamma_extremal(n, m, &opts.with_seed(opts.seed.wrapping_add(1)))?;
    let hausdorff = if opts.hausdorff { Some(hausdorff(m, n, opts)?) } else { None };
    Ok(GapReport {
        delta_hat: dmn.value.max(dnm.value),
        gamma_hat: gmn.value.min(gnm.value),
        delta_mn: dmn.value,
        delta_nm: dnm.value,
        gamma_mn: gmn.value,
        gamma_nm: gnm.value,
        hausdorff,
        samples_used: dmn.evaluations + dnm.evaluations + gmn.evaluations + gnm.evaluations,
        seed: opts.seed,
    })
}

/// Evaluates gaps for verdicts, varying the seed per call so repeated
/// quantities draw independent samples while staying reproducible.
pub(crate) struct GapMeter {
    opts: GapOptions,
    calls: u64,
}

impl GapMeter {
    pub fn new(opts: &GapOptions) -> Self {
        GapMeter { opts: *opts, calls: 0 }
    }

    fn next(&mut self) -> GapOptions {
        self.calls += 1;
        self.opts.with_seed(self.opts.seed.wrapping_add(self.calls))
    }

    pub fn delta(&mut self, m: &Subspace, n: &Subspace) -> Result<Interval> {
        let o = self.next();
        Ok(delta(m, n, &o)?.into())
    }

    pub fn delta_extremal(&mut self, m: &Subspace, n: &Subspace) -> Result<Extremal> {
        let o = self.next();
        delta_extremal(m, n, &o)
    }

    pub fn gamma(&mut self, m: &Subspace, n: &Subspace) -> Result<Interval> {
        let o = self.next();
        Ok(gamma(m, n, &o)?.into())
    }

}
