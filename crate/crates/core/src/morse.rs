//! Bounded symmetric pairs `(Q, V)`, their Morse indices and annihilators,
//! the c-gap between two pairs, and certificates for the perturbation
//! inequalities of Morse indices.
//!
//! A pair stores a basis of `V` and the Gram matrix of `Q` in it, with the
//! convention `Q(x, y) = ξᴴ G η` for coefficient vectors `ξ`, `η`. Most
//! computations run in orthonormal coordinates `z` of `V` (reference
//! Euclidean structure), where the Gram matrix is `G_o`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{GapError, Result};
use crate::gap::{ref_delta2, GapMeter, GapOptions};
use crate::interval::{Check, Interval, NamedCheck};
use crate::linalg::{c, herm_eig, lstsq, null_space_abs, svd, Mat, Vector, C64, DEFAULT_RANK_TOL};
use crate::normed::{dist_to_subspace, DistInterval, DistMethod, Norm, NormedSpace, Subspace};
use crate::search::{search, Objective, SearchOpts};
use crate::splitting::transport_subspace;
use crate::verdict::{StabilityVerdict, VerdictBuilder};

/// Eigenvalues with `|λ| ≤ FORM_TOL · max|λ|` count as zero. For a restriction
/// the parent's `max|λ|` is used when larger.
pub const FORM_TOL: f64 = DEFAULT_RANK_TOL;
const EPS: f64 = f64::EPSILON;

#[derive(Clone, Debug)]
pub struct SymmetricPair {
    v: Subspace,
    basis: Mat,
    gram: Mat,
    /// Orthonormal reference basis of `V`, `n × k`.
    u: Mat,
    /// Gram matrix in the coordinates of `u`.
    go: Mat,
    /// Spectral scale inherited from a parent form; rounding in a restricted
    /// Gram is relative to it, not to the restriction's own spectrum.
    floor: f64,
}

fn hermitian_part(g: &Mat) -> Result<Mat> {
    if !g.is_square() {
        return Err(GapError::DimensionMismatch("gram must be square".into()));
    }
    let scale = g.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let skew = (g - g.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if skew > 1e-12 * scale {
        return Err(GapError::Input(format!("gram is not Hermitian (max |G - G^H| = {skew:.3e})")));
    }
    Ok((g + g.adjoint()) * c(0.5))
}

impl SymmetricPair {
    /// A form on `span(basis)` with Gram matrix `gram` in that basis.
    pub fn new(space: &Arc<NormedSpace>, basis: Mat, gram: Mat) -> Result<Self> {
        let gram = hermitian_part(&gram)?;
        if gram.nrows() != basis.ncols() {
            return Err(GapError::DimensionMismatch(format!(
                "gram is {}x{} but the basis has {} vectors",
                gram.nrows(),
                gram.ncols(),
                basis.ncols()
            )));
        }
        // Validates shape and linear independence.
        let v = Subspace::new(space, basis.clone())?;
        let y = space.mat_to_ref(&basis);
        let d = svd(&y);
        let k = basis.ncols();
        let u = d.u.columns(0, k).into_owned();
        let mut xi_from_z = d.v.clone();
        for j in 0..k {
            xi_from_z.column_mut(j).scale_mut(1.0 / d.s[j]);
        }
        let go = xi_from_z.adjoint() * &gram * &xi_from_z;
        let go = (&go + go.adjoint()) * c(0.5);
        let v = Subspace::from_orthonormal(space, u.clone(), v.rank_tol());
        Ok(SymmetricPair { v, basis, gram, u, go, floor: 0.0 })
    }

    /// A form on `v` given in the basis `v.basis()`.
    pub fn on(v: &Subspace, gram: Mat) -> Result<Self> {
        Self::new(v.space(), v.basis(), gram)
    }

    /// Restriction of an ambient form `x ↦ xᴴ G y` to `v`.
    pub fn from_ambient(v: &Subspace, g: &Mat) -> Result<Self> {
        let b = v.basis();
        let g = hermitian_part(g)?;
        Self::new(v.space(), b.clone(), b.adjoint() * g * &b)
    }

    pub fn subspace(&self) -> &Subspace {
        &self.v
    }

    pub fn space(&self) -> &Arc<NormedSpace> {
        self.v.space()
    }

    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    pub fn gram(&self) -> &Mat {
        &self.gram
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// `Q(x, y)` for coefficient vectors in the pair's basis.
    pub fn eval(&self, xi: &Vector, eta: &Vector) -> C64 {
        (xi.adjoint() * &self.gram * eta)[(0, 0)]
    }

    /// Orthonormal coordinates of ambient vectors lying in `V`.
    fn z_of(&self, x: &Mat) -> Mat {
        self.u.adjoint() * self.space().mat_to_ref(x)
    }

    /// Ambient vectors from orthonormal coordinates.
    fn ambient_of(&self, z: &Mat) -> Mat {
        self.space().mat_from_ref(&(&self.u * z))
    }

    fn span_z(&self, z: &Mat) -> Result<Subspace> {
        if z.ncols() == 0 {
            return Ok(Subspace::zero(self.space()));
        }
        Subspace::span(self.space(), &self.ambient_of(z))
    }

    pub fn scaled(&self, h: f64) -> SymmetricPair {
        SymmetricPair { gram: &self.gram * c(h), go: &self.go * c(h), floor: self.floor * h.abs(), ..self.clone() }
    }

    /// `Q|_λ` for `λ ⊆ V`, in an orthonormal basis of `λ`.
    pub fn restrict(&self, l: &Subspace) -> Result<SymmetricPair> {
        l.require_within(&self.v, "restriction needs the subspace inside V")?;
        let space = self.space();
        let basis = space.mat_from_ref(l.ref_basis());
        let zl = self.u.adjoint() * l.ref_basis();
        let gram = zl.adjoint() * &self.go * &zl;
        let mut r = Self::new(space, basis, (&gram + gram.adjoint()) * c(0.5))?;
        r.floor = self.scale();
        Ok(r)
    }

    /// `max|λ|`, or the inherited parent scale if larger.
    fn scale(&self) -> f64 {
        let (vals, _) = self.spectrum();
        self.scale_of(&vals)
    }

    fn scale_of(&self, vals: &[f64]) -> f64 {
        vals.iter().fold(self.floor, |m, v| m.max(v.abs()))
    }

    /// Eigenvalues (ascending) and orthonormal eigenvectors of `G_o`.
    fn spectrum(&self) -> (Vec<f64>, Mat) {
        herm_eig(&self.go)
    }

    fn zero_threshold(&self, vals: &[f64]) -> f64 {
        FORM_TOL * self.scale_of(vals)
    }

    /// Span of the eigenvectors with eigenvalues of the given sign
    /// (`+1`, `−1`, or `0` for the radical), in orthonormal coordinates.
    fn eigenspace_z(&self, sign: i8) -> Mat {
        let (vals, vecs) = self.spectrum();
        let t = self.zero_threshold(&vals);
        let cols: Vec<usize> = (0..vals.len())
            .filter(|&i| match sign {
                1 => vals[i] > t,
                -1 => vals[i] < -t,
                _ => vals[i].abs() <= t,
            })
            .collect();
        Mat::from_fn(self.dim(), cols.len(), |i, j| vecs[(i, cols[j])])
    }

    /// Positive, negative or null eigenspace of `Q` as a subspace.
    pub fn eigenspace(&self, sign: i8) -> Result<Subspace> {
        self.span_z(&self.eigenspace_z(sign))
    }

    /// `V^Q`, the radical.
    pub fn radical(&self) -> Result<Subspace> {
        form_annihilator(self, &self.v)
    }

    pub fn summary(&self) -> Result<PairSummary> {
        let idx = morse_indices(self);
        let m = form_metrics(self)?;
        Ok(PairSummary { dim: self.dim(), indices: idx, norm_q: m.norm_q, gamma_q: m.gamma_q })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorseIndices {
    pub m_plus: usize,
    pub m_minus: usize,
    pub m_zero: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairSummary {
    pub dim: usize,
    pub indices: MorseIndices,
    pub norm_q: DistInterval,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_q: Option<DistInterval>,
}

/// Sylvester signature of the form.
pub fn morse_indices(q: &SymmetricPair) -> MorseIndices {
    let (vals, _) = q.spectrum();
    let t = q.zero_threshold(&vals);
    MorseIndices {
        m_plus: vals.iter().filter(|&&v| v > t).count(),
        m_minus: vals.iter().filter(|&&v| v < -t).count(),
        m_zero: vals.iter().filter(|&&v| v.abs() <= t).count(),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FormMetrics {
    pub norm_q: DistInterval,
    /// Present when `Q` is semi-definite.
    pub gamma_q: Option<DistInterval>,
}

fn eig_pad(go: &Mat) -> f64 {
    32.0 * (go.nrows() as f64 + 1.0) * EPS * go.norm()
}

fn form_norm(q: &SymmetricPair) -> DistInterval {
    let space = q.space();
    let (vals, vecs) = q.spectrum();
    let top = vals.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let pad = eig_pad(&q.go);
    if space.is_l2() {
        return DistInterval::new(top - pad, top + pad, DistMethod::ExactL2);
    }
    // ‖·‖ between c1‖·‖₂ and c2‖·‖₂ in reference coordinates.
    let (c1, c2) = space.equivalence();
    let hi = (top + pad) / (c1 * c1);
    let mut lo = (top - pad) / (c2 * c2);
    let k = q.dim();
    let ratio = |zx: &Vector, zy: &Vector| {
        let x = &q.u * zx;
        let y = &q.u * zy;
        let (nx, ny) = (space.ref_norm(&x), space.ref_norm(&y));
        if nx == 0.0 || ny == 0.0 {
            return 0.0;
        }
        let val = (zx.adjoint() * &q.go * zy)[(0, 0)].norm();
        (val - pad * zx.norm() * zy.norm()) / (nx * ny) * (1.0 - 8.0 * EPS)
    };
    for j in 0..k {
        let e = vecs.column(j).into_owned();
        lo = lo.max(ratio(&e, &e));
    }
    let mut sampler = crate::normed::sample::SphereSampler::new(k, !space.is_real(), 0x00f0_4e5a);
    for _ in 0..64 * k {
        let a = sampler.next_unit();
        let b = sampler.next_unit();
        lo = lo.max(ratio(&a, &a)).max(ratio(&a, &b));
    }
    DistInterval::new(lo, hi, DistMethod::Sampled)
}

/// `γ(Q)`; requires `Q` semi-definite.
pub fn gamma_q(q: &SymmetricPair) -> Result<DistInterval> {
    let idx = morse_indices(q);
    if idx.m_plus > 0 && idx.m_minus > 0 {
        return Err(GapError::Precondition(format!(
            "signature error: gamma(Q) needs a semi-definite form, got m+ = {}, m- = {}",
            idx.m_plus, idx.m_minus
        )));
    }
    let space = q.space();
    if q.dim() == 0 {
        return Ok(DistInterval::exact(0.0, DistMethod::ExactL2));
    }
    if idx.m_zero == q.dim() {
        return Ok(DistInterval::exact(f64::INFINITY, DistMethod::ExactL2));
    }
    let (vals, vecs) = q.spectrum();
    let t = q.zero_threshold(&vals);
    let pad = eig_pad(&q.go);
    let (jmin, lmin) = vals
        .iter()
        .enumerate()
        .filter(|(_, v)| v.abs() > t)
        .map(|(i, v)| (i, v.abs()))
        .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    if space.is_l2() {
        return Ok(DistInterval::new(lmin - pad, lmin + pad, DistMethod::ExactL2));
    }
    let (c1, c2) = space.equivalence();
    let lo = (lmin - pad) / (c2 * c2);
    let mut hi = (lmin + pad) / (c1 * c1);
    // A sample: the eigenvector itself.
    let rad = q.span_z(&q.eigenspace_z(0))?;
    let z = vecs.column(jmin).into_owned();
    let x = q.ambient_of(&Mat::from_columns(std::slice::from_ref(&z))).column(0).into_owned();
    let d = dist_to_subspace(&x, &rad)?;
    if d.lo > 0.0 {
        let val = (z.adjoint() * &q.go * &z)[(0, 0)].norm() + pad;
        hi = hi.min(val / (d.lo * d.lo) * (1.0 + 8.0 * EPS));
    }
    Ok(DistInterval::new(lo, hi, DistMethod::Sampled))
}

/// `‖Q‖`, and `γ(Q)` when `Q` is semi-definite. `V = {0}` gives `‖Q‖ = 0`
/// and `γ(Q) = 0`; `Q = 0` on `V ≠ {0}` gives `γ(Q) = ∞`.
pub fn form_metrics(q: &SymmetricPair) -> Result<FormMetrics> {
    let norm_q = if q.dim() == 0 { DistInterval::exact(0.0, DistMethod::ExactL2) } else { form_norm(q) };
    let idx = morse_indices(q);
    let gamma = if idx.m_plus == 0 || idx.m_minus == 0 { Some(gamma_q(q)?) } else { None };
    Ok(FormMetrics { norm_q, gamma_q: gamma })
}

/// `λ^Q = {u ∈ V : Q(u, v) = 0 for all v ∈ λ}`.
pub fn form_annihilator(q: &SymmetricPair, l: &Subspace) -> Result<Subspace> {
    l.require_within(&q.v, "annihilator needs the subspace inside V")?;
    if l.dim() == 0 {
        return Ok(q.v.clone());
    }
    let zl = q.z_of(&q.space().mat_from_ref(l.ref_basis()));
    let m = (&q.go * &zl).adjoint();
    let scale = q.scale();
    let ns = null_space_abs(&m, FORM_TOL * scale);
    q.span_z(&ns)
}

#[derive(Clone, Debug)]
pub struct ReducedForm {
    /// `Q̃` on a complement of `ε` in `ε^Q`.
    pub form: SymmetricPair,
    pub eps_q: Subspace,
    /// Signature agrees for a second, randomly perturbed complement.
    pub well_defined: bool,
}

/// The reduced form on `ε^Q/ε` for an isotropic `ε`.
pub fn reduced_form(q: &SymmetricPair, eps: &Subspace) -> Result<ReducedForm> {
    eps.require_within(&q.v, "reduction needs the subspace inside V")?;
    let scale = q.scale();
    if eps.dim() > 0 {
        let ze = q.z_of(&q.space().mat_from_ref(eps.ref_basis()));
        let ge = ze.adjoint() * &q.go * &ze;
        let d = svd(&ge);
        if d.s[0] > FORM_TOL * scale.max(f64::MIN_POSITIVE) {
            let w = q.space().mat_from_ref(&(eps.ref_basis() * d.v.columns(0, 1)));
            let w: Vec<[f64; 2]> = w.iter().map(|z| [z.re, z.im]).collect();
            return Err(GapError::Precondition(format!("isotropy error: epsilon is not isotropic; witness {w:?}")));
        }
    }
    let eps_q = form_annihilator(q, eps)?;
    let comp = eps.complement_in(&eps_q)?;
    let form = q.restrict(&comp)?;
    // A second complement: shift each basis vector by a fixed combination of ε.
    let well_defined = if eps.dim() > 0 && comp.dim() > 0 {
        let e = eps.basis();
        let shift = Mat::from_fn(eps.dim(), comp.dim(), |i, j| c(((i * 7 + j * 3) % 5) as f64 * 0.37 - 0.6));
        let other = comp.basis() + e * shift;
        let second = q.restrict(&Subspace::new(q.space(), other)?)?;
        morse_indices(&second) == morse_indices(&form)
    } else {
        true
    };
    Ok(ReducedForm { form, eps_q, well_defined })
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub alpha: Subspace,
    pub alpha_q: Subspace,
    /// `V = α ⊕ α^Q`.
    pub direct: bool,
}

/// `V = α ⊕ α^Q` for a definite `α`.
pub fn decompose(q: &SymmetricPair, alpha: &Subspace) -> Result<Decomposition> {
    let qa = q.restrict(alpha)?;
    let idx = morse_indices(&qa);
    if idx.m_plus != alpha.dim() && idx.m_minus != alpha.dim() {
        return Err(GapError::Precondition(format!(
            "signature error: alpha is not definite (m+ = {}, m- = {}, m0 = {})",
            idx.m_plus, idx.m_minus, idx.m_zero
        )));
    }
    let alpha_q = form_annihilator(q, alpha)?;
    let direct = alpha.intersect(&alpha_q)?.dim() == 0 && alpha.sum(&alpha_q)?.equals(&q.v)?;
    Ok(Decomposition { alpha: alpha.clone(), alpha_q, direct })
}

#[derive(Clone, Debug)]
pub struct Maximal {
    pub alpha: Subspace,
    pub alpha_q: Subspace,
    /// `Q|_{α^Q}` is `(−h)`-semi-definite.
    pub complement_semidefinite: bool,
}

/// A maximal `hQ`-positive-definite subspace, from the eigenvectors with
/// positive eigenvalues.
pub fn maximal_definite(q: &SymmetricPair, h: f64) -> Result<Maximal> {
    let hq = q.scaled(h);
    let alpha = hq.eigenspace(1)?;
    let alpha_q = form_annihilator(q, &alpha)?;
    let rest = hq.restrict(&alpha_q)?;
    let complement_semidefinite = morse_indices(&rest).m_plus == 0;
    Ok(Maximal { alpha, alpha_q, complement_semidefinite })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CGapReport {
    pub value: DistInterval,
    pub c: f64,
    pub samples: usize,
    pub seed: u64,
    /// Homogeneity lets the search fix `‖x‖+‖u‖ = ‖y‖+‖v‖ = 1`.
    pub normalization: String,
    /// Which algebraic bound gave `value.hi`.
    pub upper_source: String,
    /// `value.hi − value.lo ≤ 1e-9 · max(1, value.hi)`.
    pub tight: bool,
}

/// Sampling objective over `(x, y, u, v)` in orthonormal coordinates.
struct CGapObjective<'a> {
    q: &'a SymmetricPair,
    r: &'a SymmetricPair,
    c: f64,
}

impl CGapObjective<'_> {
    fn value(&self, col: &Vector) -> Interval {
        let (kv, kw) = (self.q.dim(), self.r.dim());
        let zx = col.rows(0, kv).into_owned();
        let zy = col.rows(kv, kv).into_owned();
        let zu = col.rows(2 * kv, kw).into_owned();
        let zv = col.rows(2 * kv + kw, kw).into_owned();
        let space = self.q.space();
        let (x, y) = (&self.q.u * &zx, &self.q.u * &zy);
        let (u, v) = (&self.r.u * &zu, &self.r.u * &zv);
        let xn = space.ref_norm(&x) + space.ref_norm(&u);
        let yn = space.ref_norm(&y) + space.ref_norm(&v);
        if xn == 0.0 || yn == 0.0 {
            return Interval::new(f64::NAN, f64::NAN);
        }
        let qxy = (zx.adjoint() * &self.q.go * &zy)[(0, 0)];
        let ruv = (zu.adjoint() * &self.r.go * &zv)[(0, 0)];
        let cross = xn * space.ref_norm(&(&v - &y)) + space.ref_norm(&(&u - &x)) * yn;
        let num = (qxy - ruv).norm() - self.c * cross;
        let n = x.len() as f64 + (kv + kw) as f64;
        let scale = self.q.go.norm() * zx.norm() * zy.norm() + self.r.go.norm() * zu.norm() * zv.norm() + self.c * (cross + 2.0 * xn * yn);
        let pad = 64.0 * n * EPS * scale / (xn * yn);
        let r = num / (xn * yn);
        Interval::new(r - pad, r + pad)
    }
}

impl Objective for CGapObjective<'_> {
    fn eval(&self, xs: &Mat) -> Vec<Interval> {
        (0..xs.ncols()).map(|j| self.value(&xs.column(j).into_owned())).collect()
    }
}

/// Upper bound for `δ_c(Q,R)` by pulling `Q` back to `W` along the
/// reference-orthogonal projection `T: W → V`:
/// `‖D‖ + ‖Q‖τ(1+τ) + 2(‖Q‖(1+τ)/2 − c)₊` with `D(u,v) = Q(Tu,Tv) − R(u,v)`
/// and `‖Tu − u‖ ≤ τ‖u‖`.
fn pullback_bound(q: &SymmetricPair, r: &SymmetricPair, norm_q: f64, c: f64) -> f64 {
    let space = q.space();
    let t = q.u.adjoint() * &r.u;
    let d = t.adjoint() * &q.go * &t - &r.go;
    let (vals, _) = herm_eig(&d);
    let dn = vals.iter().fold(0.0_f64, |a, v| a.max(v.abs())) + eig_pad(&d) + 8.0 * EPS * (q.go.norm() + r.go.norm());
    let (c1, _) = space.equivalence();
    let dn = dn / (c1 * c1);
    let tau = space.kappa() * ref_delta2(&r.u, &q.u) * (1.0 + 16.0 * EPS) + 16.0 * space.dim() as f64 * EPS;
    let b = dn + norm_q * tau * (1.0 + tau) + 2.0 * (0.5 * norm_q * (1.0 + tau) - c).max(0.0);
    b * (1.0 + 16.0 * EPS)
}

/// The c-gap `δ_c(Q,R)`: smallest `δ` with
/// `|Q(x,y) − R(u,v)| ≤ δ(‖u‖+‖x‖)(‖v‖+‖y‖) + c((‖u‖+‖x‖)‖v−y‖ + ‖u−x‖(‖v‖+‖y‖))`
/// for all `x, y ∈ V`, `u, v ∈ W`.
pub fn c_gap(q: &SymmetricPair, r: &SymmetricPair, c_: f64, opts: &GapOptions) -> Result<CGapReport> {
    q.v.same_space(&r.v)?;
    if !(c_ >= 0.0) || !c_.is_finite() {
        return Err(GapError::Input(format!("c must be a nonnegative real, got {c_}")));
    }
    let normalization = "||x||+||u|| = ||y||+||v|| = 1".to_string();
    let (kv, kw) = (q.dim(), r.dim());
    if kv + kw == 0 {
        return Ok(CGapReport {
            value: DistInterval::exact(0.0, DistMethod::ExactL2),
            c: c_,
            samples: 0,
            seed: opts.seed,
            normalization,
            upper_source: "zero spaces".into(),
            tight: true,
        });
    }
    let nq = form_norm_or_zero(q).hi;
    let nr = form_norm_or_zero(r).hi;
    let candidates = [
        (pullback_bound(q, r, nq, c_), "pullback of Q to W"),
        (pullback_bound(r, q, nr, c_), "pullback of R to V"),
        (nq.max(nr) * (1.0 + 4.0 * EPS), "max(||Q||, ||R||)"),
    ];
    let (hi, src) = candidates.iter().fold((f64::INFINITY, ""), |a, b| if b.0 < a.0 { (b.0, b.1) } else { a });

    let k = 2 * kv + 2 * kw;
    let field = q.space().field();
    let coeff_space = NormedSpace::new(k, field, Norm::l2())?;
    let basis = Mat::identity(k, k);
    let obj = CGapObjective { q, r, c: c_ };
    let warm = cgap_warm_starts(q, r);
    let found = search(
        &coeff_space,
        &basis,
        &obj,
        &warm,
        SearchOpts { budget: opts.budget, seed: opts.seed, refine_steps: opts.refine_steps },
        true,
    );
    let (lo, samples) = match found {
        Some(f) => (f.value.lo.max(0.0), f.evaluations),
        None => (0.0, 0),
    };
    let value = DistInterval::new(lo.min(hi), hi, DistMethod::Sampled);
    let tight = value.hi - value.lo <= 1e-9 * value.hi.max(1.0);
    Ok(CGapReport { value, c: c_, samples, seed: opts.seed, normalization, upper_source: src.into(), tight })
}

fn form_norm_or_zero(q: &SymmetricPair) -> DistInterval {
    if q.dim() == 0 {
        DistInterval::exact(0.0, DistMethod::ExactL2)
    } else {
        form_norm(q)
    }
}

/// Structured starting points: top eigenvectors of each form alone, and of
/// the pulled-back differences paired with their projections.
fn cgap_warm_starts(q: &SymmetricPair, r: &SymmetricPair) -> Vec<Vector> {
    let (kv, kw) = (q.dim(), r.dim());
    let k = 2 * kv + 2 * kw;
    let pack = |x: &Vector, y: &Vector, u: &Vector, v: &Vector| {
        let mut out = Vector::zeros(k);
        out.rows_mut(0, kv).copy_from(x);
        out.rows_mut(kv, kv).copy_from(y);
        out.rows_mut(2 * kv, kw).copy_from(u);
        out.rows_mut(2 * kv + kw, kw).copy_from(v);
        out
    };
    let top = |g: &Mat, count: usize| -> Vec<Vector> {
        let (vals, vecs) = herm_eig(g);
        let mut idx: Vec<usize> = (0..vals.len()).collect();
        idx.sort_by(|&a, &b| vals[b].abs().partial_cmp(&vals[a].abs()).unwrap_or(std::cmp::Ordering::Equal));
        idx.into_iter().take(count).map(|i| vecs.column(i).into_owned()).collect()
    };
    let (zv, zw) = (Vector::zeros(kv), Vector::zeros(kw));
    let mut out = Vec::new();
    for e in top(&q.go, 2) {
        out.push(pack(&e, &e, &zw, &zw));
    }
    for f in top(&r.go, 2) {
        out.push(pack(&zv, &zv, &f, &f));
    }
    let t = q.u.adjoint() * &r.u; // W-coordinates → V-coordinates
    let dw = t.adjoint() * &q.go * &t - &r.go;
    for f in top(&dw, 2) {
        let tf = &t * &f;
        out.push(pack(&tf, &tf, &f, &f));
    }
    let s = t.adjoint();
    let dv = &q.go - s.adjoint() * &r.go * &s;
    for e in top(&dv, 2) {
        let se = &s * &e;
        out.push(pack(&e, &e, &se, &se));
    }
    out
}

/// Exact integer check recorded as a conclusion or gate.
fn exact(name: &str, lhs: f64, rel: &str, rhs: f64) -> NamedCheck {
    NamedCheck::exact(name, lhs, rel, rhs)
}

/// Printed and proof-level constants of the annihilator estimate.
struct RhoInputs {
    n: f64,
    gamma: Interval,
    dc: Interval,
    dc_full: Interval,
    c: f64,
    d_ab: Interval,
    d_vw: Interval,
}

fn rho_printed(k: &RhoInputs, eta: Interval) -> Interval {
    let ne = k.n * eta;
    if !(ne.hi < 1.0) {
        return Interval::point(f64::INFINITY);
    }
    let inv = (1.0 - ne).recip();
    let s = inv.sqrt();
    let t = 1.0 + k.d_ab;
    k.n * k.gamma * k.dc * (2.0 + k.d_vw) * inv * (t * t + t) + k.n * k.c * k.gamma * (2.0 + 2.0 * k.d_vw) * inv * t * t
        - 2.0 * k.n * k.c * k.gamma * s * t
        + k.d_vw
}

/// `η′ = γ⁻¹(δ_c(2+δ)² + 2cδ(2+δ))`, the entrywise bound on `A − I` that the
/// argument actually produces.
fn eta_proof(k: &RhoInputs) -> Interval {
    let t = 2.0 + k.d_ab;
    (k.dc * t * t + 2.0 * k.c * k.d_ab * t) / k.gamma
}

/// `δ(V,W) + n s t γ⁻¹(δ_c(2+δ(V,W))(st+1) + c((2+2δ(V,W))st − 2))` with
/// `s = (1−nη′)^{−1/2}` and `t = 1+δ(α,β)`; the `δ_c` here is the c-gap of
/// the full pairs, which the argument needs because it pairs `α^Q` with `β`.
fn rho_proof(k: &RhoInputs) -> Interval {
    let ep = eta_proof(k);
    let ne = k.n * ep;
    if !(ne.hi < 1.0) || !k.gamma.is_finite() || !(k.gamma.lo > 0.0) {
        return Interval::point(f64::INFINITY);
    }
    let s = (1.0 - ne).recip().sqrt();
    let t = 1.0 + k.d_ab;
    let st = s * t;
    // Every term is nonnegative since s, t ≥ 1.
    let r = k.d_vw + k.n * st / k.gamma * (k.dc_full * (2.0 + k.d_vw) * (st + 1.0) + k.c * ((2.0 + 2.0 * k.d_vw) * st - 2.0));
    r.max(Interval::zero())
}

/// Certificate for the annihilator estimate: with `hQ` positive definite on
/// `α ⊆ V`, `dim α = dim β = n`, and
/// `η = 4γ(Q|_α)⁻¹(δ_c(Q|_α,R|_β) + cδ(α,β)) < 1/n`,
/// `hR` is positive definite on `β` and `α^Q`, `β^R` are close.
///
/// The asserted bounds are the proof-level constants (see [`rho_proof`]).
/// The printed `ρ₁`, `ρ₂` are evaluated and compared too, and any failure of
/// those is reported in the notes and in the value
/// `"printed bound violations"`.
#[allow(clippy::too_many_arguments)]
pub fn annihilator_gap_certificate(
    q: &SymmetricPair,
    alpha: &Subspace,
    r: &SymmetricPair,
    beta: &Subspace,
    c_: f64,
    h: f64,
    opts: &GapOptions,
) -> Result<StabilityVerdict> {
    alpha.require_within(&q.v, "alpha must lie in V")?;
    beta.require_within(&r.v, "beta must lie in W")?;
    let n = alpha.dim();
    let qa = q.restrict(alpha)?.scaled(h);
    if morse_indices(&qa).m_plus != n {
        return Err(GapError::Precondition("signature error: hQ is not positive definite on alpha".into()));
    }
    let rb = r.restrict(beta)?.scaled(h);
    let mut b = VerdictBuilder::new("annihilator-close");
    let mut g = GapMeter::new(opts);
    b.gate(exact("dim alpha == dim beta", n as f64, "==", beta.dim() as f64));
    b.gate(exact("dim alpha >= 1", n as f64, ">=", 1.0));
    let ga = b.value("gamma(Q|alpha)", gamma_q(&qa)?.into());
    let dc = b.value("delta_c(Q|alpha,R|beta)", c_gap(&qa, &rb, c_, opts)?.value.into());
    let d_ab = b.value("delta(alpha,beta)", g.delta(alpha, beta)?);
    let d_ba = b.value("delta(beta,alpha)", g.delta(beta, alpha)?);
    let d_vw = b.value("delta(V,W)", g.delta(&q.v, &r.v)?);
    let d_wv = b.value("delta(W,V)", g.delta(&r.v, &q.v)?);
    let eta = b.value("eta", 4.0 * (dc + c_ * d_ab) / ga);
    let nf = n.max(1) as f64;
    b.gate(NamedCheck::new("eta < 1/n", eta, "<", Interval::point(1.0 / nf)));

    let rb_idx = morse_indices(&rb);
    b.conclude(exact("hR positive definite on beta (m+ == n)", rb_idx.m_plus as f64, "==", n as f64));

    let aq = form_annihilator(q, alpha)?;
    let br = form_annihilator(r, beta)?;
    let d1 = b.value("delta(alpha^Q,beta^R)", g.delta(&aq, &br)?);
    let d2 = b.value("delta(beta^R,alpha^Q)", g.delta(&br, &aq)?);

    let hq = q.scaled(h);
    let hr = r.scaled(h);
    let dc_full = b.value("delta_c(Q,R)", c_gap(&hq, &hr, c_, opts)?.value.into());
    let k1 = RhoInputs { n: nf, gamma: ga, dc, dc_full, c: c_, d_ab, d_vw };
    let rho1_printed = b.value("rho_1 (printed)", rho_printed(&k1, eta));
    let rho2_printed = b.value("rho_2 (printed)", rho_printed(&RhoInputs { d_vw: d_wv, ..k1 }, eta));
    b.value("eta' (proof)", eta_proof(&k1));
    let rho1 = b.value("rho_1 (proof)", rho_proof(&k1));
    // Step 5 swaps the roles of (Q, α) and (R, β).
    let gb = if rb_idx.m_plus == n { Interval::from(gamma_q(&rb)?) } else { Interval::zero() };
    b.value("gamma(R|beta)", gb);
    let k2 = RhoInputs { n: nf, gamma: gb, dc, dc_full, c: c_, d_ab: d_ba, d_vw: d_wv };
    let rho2 = b.value("rho_2 (proof)", rho_proof(&k2));
    b.conclude(NamedCheck::new("delta(alpha^Q,beta^R) <= rho_1 (proof)", d1, "<=", rho1));
    b.conclude(NamedCheck::new("delta(beta^R,alpha^Q) <= rho_2 (proof)", d2, "<=", rho2));

    let mut printed_fail = 0.0;
    for (name, d, rp, rf) in [("rho_1", d1, rho1_printed, rho1), ("rho_2", d2, rho2_printed, rho2)] {
        if Check::le(d, rp).violated() {
            printed_fail += 1.0;
            let proof = if Check::le(d, rf).violated() { "fails" } else { "holds" };
            b.note(format!("printed {name} bound fails ({d} > {rp}); proof-level bound {proof}"));
        }
    }
    b.value("printed bound violations", Interval::point(printed_fail));
    Ok(b.finish())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MorseVariant {
    /// `m⁺(hR) + dim W^R/W₀ ≤ dim α`.
    Thm16,
    /// `m⁺(hR) ≥ dim α`.
    Prop17,
    /// `m⁻(hR) + dim W^R/W₀ ≤ dim V^Q/V₀` for semi-definite `hQ`.
    PropDefinite,
}

impl std::fmt::Display for MorseVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MorseVariant::Thm16 => "thm1.6",
            MorseVariant::Prop17 => "prop1.7",
            MorseVariant::PropDefinite => "prop-definite",
        })
    }
}

impl std::str::FromStr for MorseVariant {
    type Err = GapError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "thm1.6" => Ok(MorseVariant::Thm16),
            "prop1.7" => Ok(MorseVariant::Prop17),
            "prop-definite" => Ok(MorseVariant::PropDefinite),
            other => Err(GapError::Input(format!("unknown variant '{other}'"))),
        }
    }
}

/// Inputs to [`verify_morse_stability`].
#[derive(Clone, Debug)]
pub struct MorseProblem {
    pub q: SymmetricPair,
    pub r: SymmetricPair,
    /// Defaults to `{0}`.
    pub v0: Option<Subspace>,
    pub w0: Option<Subspace>,
    pub h: f64,
    pub c: f64,
    /// `α` of the decomposition (`thm1.6`) or the definite subspace
    /// (`prop1.7`). Synthesized from the spectrum of `hQ` when absent.
    pub alpha: Option<Subspace>,
}

#[allow(clippy::too_many_arguments)]
fn prop_definite_into(
    b: &mut VerdictBuilder,
    q: &SymmetricPair,
    r: &SymmetricPair,
    v0: &Subspace,
    w0: &Subspace,
    h: f64,
    c_: f64,
    opts: &GapOptions,
) -> Result<()> {
    let mut g = GapMeter::new(opts);
    let hq = q.scaled(h);
    let hr = r.scaled(h);
    let iq = morse_indices(&hq);
    b.gate(exact("hQ positive semi-definite (m- == 0)", iq.m_minus as f64, "==", 0.0));
    let vq = q.radical()?;
    let wr = r.radical()?;
    b.gate(exact("V0 ⊆ V^Q", v0.is_within(&vq)? as u8 as f64, "==", 1.0));
    b.gate(exact("W0 ⊆ W^R", w0.is_within(&wr)? as u8 as f64, "==", 1.0));
    let gam: Interval = if iq.m_minus == 0 { gamma_q(&hq)?.into() } else { Interval::zero() };
    b.value("gamma(Q)", gam);
    b.gate(NamedCheck::new("gamma(Q) > 0", gam, ">", Interval::zero()));
    let n = vq.dim().saturating_sub(v0.dim());
    b.value("n = dim V^Q/V0", Interval::point(n as f64));
    let s = 2f64.powi(n as i32 + 1) * (n as f64 + 1.0);
    let dwv = b.value("delta(W,V)", g.delta(&r.v, &q.v)?);
    let d00 = b.value("delta(V0,W0)", g.delta(v0, w0)?);
    b.gate(NamedCheck::new("delta(W,V) + delta(V0,W0) < 1/(2^(n+1)(n+1))", dwv + d00, "<", Interval::point(1.0 / s)));
    let dc = b.value("delta_c(Q,R)", c_gap(&hq, &hr, c_, opts)?.value.into());
    let sd = s * dwv;
    let delta = b.value("delta", if sd.hi < 1.0 { sd / (1.0 - sd) } else { Interval::point(f64::INFINITY) });
    let d = b.value("d", if gam.lo > 0.0 { gam.recip() } else { Interval::point(f64::INFINITY) });
    let e = b.value("e", 2.0 * dc);
    let f = b.value("f", 2.0 * dc + 2.0 * c_);
    let lhs = b.value("(d(2+delta)(e+f delta))^(1/2)", (d * (2.0 + delta) * (e + f * delta)).max(Interval::zero()).sqrt());
    let rhs = b.value("rhs", (1.0 - s * (dwv + d00)) / (s * (1.0 + d00)));
    b.gate(NamedCheck::new("(d(2+delta)(e+f delta))^(1/2) < (1-s(delta(W,V)+delta(V0,W0)))/(s(1+delta(V0,W0)))", lhs, "<", rhs));
    let ir = morse_indices(&hr);
    let lhs_c = ir.m_minus + wr.dim().saturating_sub(w0.dim());
    b.value("m-(hR)", Interval::point(ir.m_minus as f64));
    b.value("dim W^R/W0", Interval::point(wr.dim().saturating_sub(w0.dim()) as f64));
    b.conclude(exact("m-(hR) + dim W^R/W0 <= n", lhs_c as f64, "<=", n as f64));
    Ok(())
}

/// Transport `a ⊆ V` into `W`, recording the gate; `None` when it fails.
fn transport_gate(b: &mut VerdictBuilder, a: &Subspace, v: &Subspace, w: &Subspace, opts: &GapOptions) -> Result<Option<Subspace>> {
    let k = a.dim();
    if k == 0 {
        return Ok(Some(Subspace::zero(a.space())));
    }
    match transport_subspace(a, v, w, opts) {
        Ok(t) => {
            let vp = t.vp.clone();
            b.absorb_all("transport: ", t.verdict);
            Ok(Some(vp))
        }
        Err(GapError::Gate(msg)) => {
            let dvw = GapMeter::new(opts).delta(v, w)?;
            let scale = 2f64.powi(k as i32 - 1) * k as f64;
            b.gate(NamedCheck::new("transport: delta(V,W) < 1/(2^(k-1)k)", dvw, "<", Interval::point(1.0 / scale)));
            b.note(msg);
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

/// Checks one of the Morse-index perturbation inequalities, following the
/// chain of the argument:
///
/// * `thm1.6`: split `α = α₁ ⊕ α₀` (definite part, radical), transport `α₁`
///   to `β₁ ⊆ W`, certify `hR > 0` on `β₁` and the closeness of
///   annihilators, then apply the semi-definite case to `(Q|_{α₁^Q}, −h)`
///   and `(R|_{β₁^R}, −h)`.
/// * `prop1.7`: transport `α` to `β ⊆ W` and certify `hR > 0` on `β`.
/// * `prop-definite`: the displayed gates on `δ(W,V)`, `δ(V₀,W₀)` and
///   `d, e, f`.
pub fn verify_morse_stability(p: &MorseProblem, variant: MorseVariant, opts: &GapOptions) -> Result<StabilityVerdict> {
    let (q, r) = (&p.q, &p.r);
    q.v.same_space(&r.v)?;
    if p.h != 1.0 && p.h != -1.0 {
        return Err(GapError::Input(format!("h must be 1 or -1, got {}", p.h)));
    }
    if !(p.c >= 0.0) {
        return Err(GapError::Input(format!("c must be nonnegative, got {}", p.c)));
    }
    let space = q.space();
    let v0 = p.v0.clone().unwrap_or_else(|| Subspace::zero(space));
    let w0 = p.w0.clone().unwrap_or_else(|| Subspace::zero(space));
    let h = p.h;
    let mut b = VerdictBuilder::new(variant.to_string());
    let hr_idx = morse_indices(&r.scaled(h));
    let wr = r.radical()?;
    match variant {
        MorseVariant::PropDefinite => prop_definite_into(&mut b, q, r, &v0, &w0, h, p.c, opts)?,
        MorseVariant::Prop17 => {
            let alpha = match &p.alpha {
                Some(a) => a.clone(),
                None => q.scaled(h).eigenspace(1)?,
            };
            let k = alpha.dim();
            if k == 0 {
                return Err(GapError::Precondition("alpha must have dimension at least 1".into()));
            }
            let qa = q.restrict(&alpha)?.scaled(h);
            b.gate(exact("hQ positive definite on alpha", morse_indices(&qa).m_plus as f64, "==", k as f64));
            if let Some(beta) = transport_gate(&mut b, &alpha, &q.v, &r.v, opts)? {
                if beta.dim() == k && morse_indices(&qa).m_plus == k {
                    let cert = annihilator_gap_certificate(q, &alpha, r, &beta, p.c, h, opts)?;
                    b.absorb_all("annihilator: ", cert);
                } else {
                    b.gate(exact("dim beta == dim alpha", beta.dim() as f64, "==", k as f64));
                }
            }
            b.conclude(exact("m+(hR) >= dim alpha", hr_idx.m_plus as f64, ">=", k as f64));
        }
        MorseVariant::Thm16 => {
            let hq = q.scaled(h);
            let alpha = match &p.alpha {
                Some(a) => a.clone(),
                None => {
                    let pos = hq.eigenspace(1)?;
                    pos.sum(&hq.eigenspace(0)?)?
                }
            };
            let beta = form_annihilator(q, &alpha)?;
            let qa = hq.restrict(&alpha)?;
            let qb = hq.restrict(&beta)?;
            let (ia, ib) = (morse_indices(&qa), morse_indices(&qb));
            let direct = alpha.intersect(&beta)?.dim() == 0 && alpha.sum(&beta)?.equals(&q.v)?;
            b.gate(exact("V = alpha ⊕ beta with beta = alpha^Q", direct as u8 as f64, "==", 1.0));
            b.gate(exact("hQ positive semi-definite on alpha (m- == 0)", ia.m_minus as f64, "==", 0.0));
            b.gate(exact("hQ negative definite on beta", ib.m_minus as f64, "==", beta.dim() as f64));
            let gb: Interval = if ib.m_plus == 0 { gamma_q(&qb)?.into() } else { Interval::zero() };
            b.value("gamma(Q|beta)", gb);
            if beta.dim() > 0 {
                b.gate(NamedCheck::new("gamma(Q|beta) > 0", gb, ">", Interval::zero()));
            }
            let alpha1 = qa.eigenspace(1)?;
            let alpha0 = qa.eigenspace(0)?;
            let k = alpha1.dim();
            b.value("k = dim alpha_1", Interval::point(k as f64));
            b.value("dim alpha_0", Interval::point(alpha0.dim() as f64));
            if let Some(beta1) = transport_gate(&mut b, &alpha1, &q.v, &r.v, opts)? {
                if beta1.dim() == k {
                    if k > 0 {
                        let cert = annihilator_gap_certificate(q, &alpha1, r, &beta1, p.c, h, opts)?;
                        b.absorb_all("annihilator: ", cert);
                    }
                    let a1q = form_annihilator(q, &alpha1)?;
                    let b1r = form_annihilator(r, &beta1)?;
                    let q1 = q.restrict(&a1q)?;
                    let r1 = r.restrict(&b1r)?;
                    let mut sub = VerdictBuilder::new("prop-definite");
                    prop_definite_into(&mut sub, &q1, &r1, &v0, &w0, -h, p.c, opts)?;
                    b.absorb_all("definite part: ", sub.finish());
                    let m1 = morse_indices(&r1.scaled(h)).m_plus;
                    b.conclude(exact("m+(hR) == k + m+(hR|beta_1^R)", hr_idx.m_plus as f64, "==", (k + m1) as f64));
                } else {
                    b.gate(exact("dim beta_1 == dim alpha_1", beta1.dim() as f64, "==", k as f64));
                }
            }
            b.gate(exact("V0 ⊆ V^Q", v0.is_within(&q.radical()?)? as u8 as f64, "==", 1.0));
            let rad_b = qb.radical()?;
            let v0_ok = v0.is_within(&rad_b)? && rad_b.is_within(&v0)?;
            b.gate(exact("V0 == radical of Q|beta", v0_ok as u8 as f64, "==", 1.0));
            b.gate(exact("W0 ⊆ W^R", w0.is_within(&wr)? as u8 as f64, "==", 1.0));
            let lhs = hr_idx.m_plus + wr.dim().saturating_sub(w0.dim());
            b.value("m+(hR)", Interval::point(hr_idx.m_plus as f64));
            b.value("dim W^R/W0", Interval::point(wr.dim().saturating_sub(w0.dim()) as f64));
            b.conclude(exact("m+(hR) + dim W^R/W0 <= dim alpha", lhs as f64, "<=", alpha.dim() as f64));
        }
    }
    Ok(b.finish())
}

/// Coefficients of ambient vectors in the pair's basis.
pub fn coefficients(q: &SymmetricPair, x: &Mat) -> Mat {
    lstsq(&q.basis, x, DEFAULT_RANK_TOL)
}
