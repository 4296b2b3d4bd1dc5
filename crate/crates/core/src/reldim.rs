//! Semi-compact perturbations modeled by matrices, relative dimensions and
//! the stability certificate for them.
//!
//! For `(I+K)M ⊆ N` the relative dimension `[M−N]` is the index of
//! `I+K: M → N`. Every linear map on a finite-dimensional space is
//! compact, so every pair is a semi-compact perturbation of every other
//! and `[M−N] = dim M − dim N`. The computations below never use that
//! shortcut; they go through kernels and images so the identity is a
//! genuine cross-check.

use serde::{Deserialize, Serialize};

use crate::error::{GapError, Result};
use crate::gap::{GapMeter, GapOptions};
use crate::interval::{Interval, NamedCheck};
use crate::linalg::{c, identity, lstsq, null_space_abs, spectral_norm, svd, Mat, Vector, DEFAULT_RANK_TOL};
use crate::normed::{Exponent, NormedSpace, Subspace};
use crate::normed::sample::SphereSampler;
use crate::tetrad::ExtInt;
use crate::verdict::{StabilityVerdict, VerdictBuilder};

const EPS: f64 = f64::EPSILON;

/// Enclosure of the operator norm of an ambient matrix.
///
/// `p ∈ {1, 2, ∞}` are computed directly. Other exponents take the
/// Riesz–Thorin interpolation of the `1` and `∞` norms (and the Euclidean
/// norm times the equivalence constants) as upper bound and sampled ratios
/// as lower bound.
pub fn operator_norm(space: &NormedSpace, a: &Mat) -> Interval {
    let b = space.op_to_ref(a);
    let n = b.nrows();
    let pad = 8.0 * (n as f64 + 1.0) * EPS;
    let col1 = (0..n).map(|j| b.column(j).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max);
    let rowinf = (0..n).map(|i| b.row(i).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max);
    let two = svd(&b);
    let s2 = two.s.first().copied().unwrap_or(0.0);
    let widen = |x: f64| Interval::new((x * (1.0 - pad)).max(0.0), x * (1.0 + pad));
    match space.exponent() {
        Exponent::One => widen(col1),
        Exponent::Inf => widen(rowinf),
        Exponent::Two => widen(s2),
        e => {
            let p = e.p();
            let (c1, c2) = space.equivalence();
            let hi = (col1.powf(1.0 / p) * rowinf.powf(1.0 - 1.0 / p)).min(s2 * c2 / c1);
            let ratio = |x: &Vector| {
                let d = space.ref_norm(x);
                if d > 0.0 {
                    space.ref_norm(&(&b * x)) / d
                } else {
                    0.0
                }
            };
            let mut lo: f64 = 0.0;
            for j in 0..n {
                let mut e = Vector::zeros(n);
                e[j] = c(1.0);
                lo = lo.max(ratio(&e));
            }
            if n > 0 {
                lo = lo.max(ratio(&two.v.column(0).into_owned()));
            }
            let mut sampler = SphereSampler::new(n, !space.is_real(), 0x5eed);
            for _ in 0..64 * n {
                lo = lo.max(ratio(&sampler.next_unit()));
            }
            Interval::new((lo * (1.0 - pad)).max(0.0), (hi * (1.0 + pad)).max(lo))
        }
    }
}

/// A finite-rank model of a compact operator `K`, with the data the
/// certificates need about `I+K`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PerturbationOperator {
    /// Ambient matrix, rows of `[re, im]` pairs when serialized by the I/O
    /// layer.
    #[serde(skip)]
    pub k: Mat,
    pub norm_k: Interval,
    pub invertible_i_plus_k: bool,
    /// `‖I+K‖‖(I+K)⁻¹‖` when `I+K` is invertible.
    pub cond_a: Option<Interval>,
    pub smallest_singular_value: f64,
}

impl PerturbationOperator {
    pub fn new(space: &NormedSpace, k: Mat) -> Result<Self> {
        let n = space.dim();
        if k.shape() != (n, n) {
            return Err(GapError::DimensionMismatch(format!("K must be {n}x{n}, got {}x{}", k.nrows(), k.ncols())));
        }
        let norm_k = operator_norm(space, &k);
        let t = identity(n) + &k;
        let d = svd(&space.op_to_ref(&t));
        let smax = d.s.first().copied().unwrap_or(0.0);
        let smin = d.s.last().copied().unwrap_or(0.0);
        let invertible = smin > DEFAULT_RANK_TOL * smax.max(1.0);
        let cond_a = if invertible {
            let inv = t.clone().try_inverse().ok_or_else(|| GapError::Solver("I+K inversion failed".into()))?;
            let nt = operator_norm(space, &t);
            // The computed inverse carries a relative error of order cond·ε.
            let ni = operator_norm(space, &inv);
            let rel = 16.0 * n as f64 * EPS * smax / smin;
            let ni = Interval::new(ni.lo * (1.0 - rel), ni.hi * (1.0 + rel));
            Some((nt * ni).max(Interval::one()))
        } else {
            None
        };
        Ok(PerturbationOperator { k, norm_k, invertible_i_plus_k: invertible, cond_a, smallest_singular_value: smin })
    }

    pub fn zero(space: &NormedSpace) -> Self {
        Self::new(space, Mat::zeros(space.dim(), space.dim())).expect("zero operator")
    }

    pub fn i_plus_k(&self) -> Mat {
        identity(self.k.nrows()) + &self.k
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RelDimReport {
    pub value: ExtInt,
    pub kernel_dim: usize,
    pub cokernel_dim: usize,
    /// `value == dim M − dim N`, which rank–nullity forces in finite
    /// dimension.
    pub matches_dimension_difference: bool,
    pub k_used: PerturbationOperator,
}

/// `[M−N]` as the index of `I+K: M → N`.
pub fn relative_dim(m: &Subspace, n: &Subspace, k: &PerturbationOperator) -> Result<RelDimReport> {
    m.same_space(n)?;
    let t = k.i_plus_k();
    let space = m.space();
    // I+K is formed by adding I, so its entries carry rounding of order
    // ε(1+‖K‖) even when the product itself is tiny.
    let scale = 1.0 + spectral_norm(&space.op_to_ref(&k.k));
    let image = m.image_ref(&space.op_to_ref(&t), scale);
    if !image.is_within(n)? {
        let dir = image
            .violating_direction(n)
            .map(|v| format!("{:?}", v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>()))
            .unwrap_or_default();
        return Err(GapError::NotContained(format!("(I+K)M ⊄ N; witness column {dir}")));
    }
    let kernel_dim = m.dim() - image.dim();
    let cokernel_dim = n.dim() - image.dim();
    let value = kernel_dim as i64 - cokernel_dim as i64;
    Ok(RelDimReport {
        value: ExtInt::Finite(value),
        kernel_dim,
        cokernel_dim,
        matches_dimension_difference: value == m.dim() as i64 - n.dim() as i64,
        k_used: k.clone(),
    })
}

/// `dim λ/(λ∩μ) − dim μ/(λ∩μ)`.
pub fn finite_change_dim(l: &Subspace, mu: &Subspace) -> Result<i64> {
    let cap = l.intersect(mu)?;
    Ok((l.dim() - cap.dim()) as i64 - (mu.dim() - cap.dim()) as i64)
}

/// Some `K` with `(I+K)M ⊆ N`: a partial isometry, in reference
/// coordinates, from the basis of `M` onto the leading basis vectors of
/// `N`, vanishing on the complement of `M`.
pub fn synthesize_perturbation(m: &Subspace, n: &Subspace) -> Result<PerturbationOperator> {
    m.same_space(n)?;
    let space = m.space();
    let r = m.dim().min(n.dim());
    let qm = m.ref_basis();
    let qn = n.ref_basis();
    let t_ref = qn.columns(0, r) * qm.columns(0, r).adjoint();
    let t = space.op_from_ref(&t_ref);
    PerturbationOperator::new(space, t - identity(space.dim()))
}

/// Checks `[α−γ] = [α−β] + [β−γ]` with the composite `(I+L)(I+K) − I`.
pub fn additivity_check(
    alpha: &Subspace,
    beta: &Subspace,
    gamma: &Subspace,
    k: &PerturbationOperator,
    l: &PerturbationOperator,
) -> Result<StabilityVerdict> {
    let ab = relative_dim(alpha, beta, k)?;
    let bg = relative_dim(beta, gamma, l)?;
    let n = alpha.ambient_dim();
    let comp = l.i_plus_k() * k.i_plus_k() - identity(n);
    let kc = PerturbationOperator::new(alpha.space(), comp)?;
    let ag = relative_dim(alpha, gamma, &kc)?;
    let mut b = VerdictBuilder::new("additivity");
    b.gate(NamedCheck::exact("(I+K)alpha ⊆ beta", 1.0, "==", 1.0));
    b.gate(NamedCheck::exact("(I+L)beta ⊆ gamma", 1.0, "==", 1.0));
    let (x, y, z) = (ab.value.as_f64(), bg.value.as_f64(), ag.value.as_f64());
    b.value("[alpha-beta]", Interval::point(x));
    b.value("[beta-gamma]", Interval::point(y));
    b.value("[alpha-gamma]", Interval::point(z));
    b.conclude(NamedCheck::exact("[alpha-gamma] == [alpha-beta] + [beta-gamma]", z, "==", x + y));
    Ok(b.finish())
}

#[derive(Clone, Debug)]
pub struct GraphOperator {
    /// `A P`, where `P` projects onto α along β; on α it is `A`.
    pub a: Mat,
    /// `I_α + A: α → γ` is an isomorphism.
    pub f_iso: bool,
    /// `γ = Graph(A)` decided by rank.
    pub graph_matches: bool,
    /// `[α−γ]` computed with the perturbation `AP`.
    pub reldim: i64,
}

fn direct_sum_is_whole(a: &Subspace, b: &Subspace) -> Result<bool> {
    Ok(a.dim() + b.dim() == a.ambient_dim() && a.intersect(b)?.dim() == 0)
}

/// Coefficients of `x` in the concatenated bases `[A | B]`, both ambient.
fn split_coeffs(ab: &Mat, x: &Mat) -> Mat {
    lstsq(ab, x, DEFAULT_RANK_TOL)
}

/// The operator `A: α → β` whose graph is `γ`, when `α ⊕ β = β ⊕ γ = X`.
pub fn graph_operator(alpha: &Subspace, beta: &Subspace, gamma: &Subspace) -> Result<GraphOperator> {
    alpha.same_space(beta)?;
    alpha.same_space(gamma)?;
    if !direct_sum_is_whole(alpha, beta)? {
        return Err(GapError::Precondition("alpha ⊕ beta must be the whole space".into()));
    }
    if !direct_sum_is_whole(beta, gamma)? {
        return Err(GapError::Precondition("beta ⊕ gamma must be the whole space (gamma ∩ beta ≠ {0}?)".into()));
    }
    let space = alpha.space();
    let n = space.dim();
    let (ba, bb, bg) = (alpha.basis(), beta.basis(), gamma.basis());
    let (ka, kb) = (ba.ncols(), bb.ncols());
    // a = u + v with u ∈ β, v ∈ γ, so v = a + Aa with Aa = −u.
    let bbg = crate::linalg::hstack(&[&bb, &bg], n);
    let co = split_coeffs(&bbg, &ba);
    let u = &bb * co.rows(0, kb);
    let minus_u = -u;
    // Projection coefficients onto α along β.
    let bab = crate::linalg::hstack(&[&ba, &bb], n);
    let inv = bab.clone().try_inverse().ok_or_else(|| GapError::Solver("alpha ⊕ beta basis is singular".into()))?;
    let p_alpha = inv.rows(0, ka).into_owned();
    let a = &minus_u * &p_alpha;
    let f = &ba + &minus_u;
    let graph = Subspace::span(space, &f)?;
    let f_iso = graph.dim() == ka;
    let graph_matches = graph.equals(gamma)?;
    let ap = PerturbationOperator::new(space, a.clone())?;
    let reldim = match relative_dim(alpha, gamma, &ap)?.value {
        ExtInt::Finite(v) => v,
        _ => unreachable!("finite model"),
    };
    Ok(GraphOperator { a, f_iso, graph_matches, reldim })
}

#[derive(Clone, Debug)]
pub struct Normalized {
    pub m1: Subspace,
    pub n1: Subspace,
    pub k1: PerturbationOperator,
    /// `dim ker(I+K) ∩ M`, which equals `dim M/M₁`.
    pub kernel_dim: usize,
    /// `(I+K₁)M₁ = N₁` decided by rank.
    pub image_matches: bool,
}

/// An invertible `I+K₁` agreeing with `I+K` on a finite-codimension part
/// `M₁` of `M`, with `(I+K₁)M₁ = N₁ ⊆ N`.
///
/// With `T = I+K`, `M = (ker T ∩ M) ⊕ M₁` and a splitting
/// `X = ker T ⊕ X₁` with `M₁ ⊆ X₁`, the operator is
/// `K₁ = (A − I)P_ker + K P_{X₁}`, where `A` maps `ker T` isomorphically
/// onto a complement of `ran T`.
pub fn normalize_perturbation(m: &Subspace, n: &Subspace, k: &PerturbationOperator) -> Result<Normalized> {
    relative_dim(m, n, k)?;
    let space = m.space();
    let dim = space.dim();
    let t = k.i_plus_k();
    let whole = Subspace::whole(space);
    // T = I + K carries rounding of size ε(1 + ‖K‖); rank is judged against that.
    let tr = space.op_to_ref(&t);
    let scale = 1.0 + spectral_norm(&space.op_to_ref(&k.k));
    let ker_t = Subspace::from_ref(space, &null_space_abs(&tr, DEFAULT_RANK_TOL * scale), DEFAULT_RANK_TOL);
    let z = ker_t.intersect(m)?;
    let m1 = z.complement_in(m)?;
    let n1 = m1.image_ref(&tr, scale);
    if ker_t.dim() == 0 {
        let image_matches = n1.dim() == m1.dim();
        return Ok(Normalized { m1, n1, k1: k.clone(), kernel_dim: 0, image_matches });
    }
    let km = ker_t.sum(&m1)?;
    let rest = km.complement_in(&whole)?;
    let x1 = m1.sum(&rest)?;
    let ran = whole.image_ref(&tr, scale);
    let coran = ran.complement_in(&whole)?;
    if coran.dim() != ker_t.dim() || x1.dim() + ker_t.dim() != dim {
        return Err(GapError::Solver("kernel and cokernel dimensions disagree".into()));
    }
    // Projections along X = ker T ⊕ X₁.
    let (bk, bx) = (ker_t.basis(), x1.basis());
    let basis = crate::linalg::hstack(&[&bk, &bx], dim);
    let inv = basis.clone().try_inverse().ok_or_else(|| GapError::Solver("splitting basis is singular".into()))?;
    let r = bk.ncols();
    let p_ker = &bk * inv.rows(0, r);
    let p_x1 = &bx * inv.rows(r, dim - r);
    let a_ker = coran.basis() * inv.rows(0, r);
    let k1 = (&a_ker - &p_ker) + &k.k * p_x1;
    let k1 = PerturbationOperator::new(space, k1)?;
    let image_matches = m1.image(&k1.i_plus_k())?.equals(&n1)?;
    Ok(Normalized { m1, n1, k1, kernel_dim: z.dim(), image_matches })
}

/// Restriction of `K` to a finite-codimension subspace on which its norm is
/// below `eps`: `K` with its largest singular directions removed (reference
/// coordinates). Returns the modified operator and the codimension used.
pub fn restrict_small(space: &NormedSpace, k: &Mat, eps: f64) -> (Mat, usize) {
    let b = space.op_to_ref(k);
    let d = svd(&b);
    let n = b.ncols();
    for codim in 0..=n {
        let mut kept = Mat::zeros(b.nrows(), n);
        for j in codim..d.s.len() {
            let uj = d.u.column(j);
            let vj = d.v.column(j);
            kept += uj * vj.adjoint() * c(d.s[j]);
        }
        let out = space.op_from_ref(&kept);
        if operator_norm(space, &out).hi < eps {
            return (out, codim);
        }
    }
    (Mat::zeros(b.nrows(), n), n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RelVariant {
    /// `[M′−N′] ≤ [M−N]`; `m` only matters on the `[M−N] = −∞` branch.
    C(i64),
    D,
    E,
}

impl std::fmt::Display for RelVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RelVariant::C(m) => write!(f, "1.4c({m})"),
            RelVariant::D => write!(f, "1.4d"),
            RelVariant::E => write!(f, "1.4e"),
        }
    }
}

impl std::str::FromStr for RelVariant {
    type Err = GapError;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "1.4d" => Ok(RelVariant::D),
            "1.4e" => Ok(RelVariant::E),
            "1.4c" => Ok(RelVariant::C(1)),
            _ => {
                let inner = s
                    .strip_prefix("1.4c(")
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| GapError::Input(format!("unknown variant '{s}'")))?;
                let m: i64 = inner.parse().map_err(|_| GapError::Input(format!("bad m in '{s}'")))?;
                if m < 1 {
                    return Err(GapError::Input("m must be a positive integer".into()));
                }
                Ok(RelVariant::C(m))
            }
        }
    }
}

/// `U`, `V` with `(I+K₁)M ⊕ U = N ⊕ V`: complements of `(I+K₁)M ∩ N` in
/// `N` and in `(I+K₁)M`.
pub fn finite_change_spaces(tm: &Subspace, n: &Subspace) -> Result<(Subspace, Subspace)> {
    let cap = tm.intersect(n)?;
    Ok((cap.complement_in(n)?, cap.complement_in(tm)?))
}

fn reldim_value(m: &Subspace, n: &Subspace) -> Result<i64> {
    // Either direction is a semi-compact perturbation here; use M → N.
    let k = synthesize_perturbation(m, n)?;
    match relative_dim(m, n, &k)?.value {
        ExtInt::Finite(v) => Ok(v),
        _ => unreachable!("finite model"),
    }
}

/// Checks the stability of `[M−N]` under a gap perturbation `(M′, N′)`.
///
/// With `T = I+K₁` invertible and `a = ‖T‖‖T⁻¹‖`:
///
/// ```text
/// θ₁ = a(1+γ(U,TM))δ(M′,M) / (γ(U,TM) − aδ(M′,M))
/// η₁ = (1+δ(N,N′)/γ(N,V))(1+θ₁)
/// gate: δ(M′,M) < γ(U,TM)/a,  η₁ < 2       ⇒ [M′−N′] ≤ [M−N]
///
/// θ₂ = a(1+γ(U,TN))δ(N′,N) / (γ(U,TN) − aδ(N′,N))
/// η₂ = (1+δ(M,M′)/γ(M,V))(1+θ₂)
/// gate: δ(N′,N) < γ(U,TM)/a,  η₂ < 2       ⇒ [M′−N′] ≥ [M−N]
/// ```
#[allow(clippy::too_many_arguments)]
pub fn verify_reldim_stability(
    m: &Subspace,
    n: &Subspace,
    mp: &Subspace,
    np: &Subspace,
    k1: &PerturbationOperator,
    uv: Option<(&Subspace, &Subspace)>,
    variant: RelVariant,
    opts: &GapOptions,
) -> Result<StabilityVerdict> {
    for s in [n, mp, np] {
        m.same_space(s)?;
    }
    let a = k1
        .cond_a
        .ok_or_else(|| GapError::Precondition("I+K1 must be invertible (cond_a absent)".into()))?;
    let t = k1.i_plus_k();
    let tm = m.image(&t)?;
    let tn = n.image(&t)?;
    let (u, v) = match uv {
        Some((u, v)) => (u.clone(), v.clone()),
        None => finite_change_spaces(&tm, n)?,
    };
    let mut b = VerdictBuilder::new(variant.to_string());
    let mut g = GapMeter::new(opts);
    // Setup: TM ⊕ U = N ⊕ V with V ⊆ TM, U ⊆ N.
    let lhs = tm.sum(&u)?;
    let rhs = n.sum(&v)?;
    let setup = v.is_within(&tm)?
        && u.is_within(n)?
        && tm.intersect(&u)?.dim() == 0
        && n.intersect(&v)?.dim() == 0
        && lhs.equals(&rhs)?;
    b.gate(NamedCheck::exact("(I+K1)M ⊕ U == N ⊕ V", setup as u8 as f64, "==", 1.0));
    b.value("a", a);
    let rel = reldim_value(m, n)?;
    let relp = reldim_value(mp, np)?;
    b.value("[M-N]", Interval::point(rel as f64));
    b.value("[M'-N']", Interval::point(relp as f64));
    b.value("dim U - dim V", Interval::point(u.dim() as f64 - v.dim() as f64));

    let small = matches!(variant, RelVariant::C(_) | RelVariant::E);
    let large = matches!(variant, RelVariant::D | RelVariant::E);
    let gu_tm = b.value("gamma(U,(I+K1)M)", g.gamma(&u, &tm)?);
    if small {
        let dmm = b.value("delta(M',M)", g.delta(mp, m)?);
        let dnn = b.value("delta(N,N')", g.delta(n, np)?);
        let gnv = b.value("gamma(N,V)", g.gamma(n, &v)?);
        let theta1 = b.value("theta_1", a * (1.0 + gu_tm) * dmm / (gu_tm - a * dmm));
        let eta1 = b.value("eta_1", (1.0 + dnn / gnv) * (1.0 + theta1));
        b.gate(NamedCheck::new("delta(M',M) < gamma(U,(I+K1)M)/a", dmm, "<", gu_tm / a));
        b.gate(NamedCheck::new("eta_1 < 2", eta1, "<", 2.0.into()));
        // An intermediate bound of the argument, tested as a consequence.
        let tmp = mp.image(&t)?.sum(&u)?;
        let npv = np.sum(&v)?;
        let d = b.value("delta((I+K1)M'+U,N'+V)", g.delta(&tmp, &npv)?);
        b.conclude(NamedCheck::new("delta((I+K1)M'+U,N'+V) <= eta_1 - 1", d, "<=", eta1 - 1.0));
        b.conclude(NamedCheck::exact("[M'-N'] <= [M-N]", relp as f64, "<=", rel as f64));
        if let RelVariant::C(mm) = variant {
            b.note(format!("the [M-N] = -inf branch (bound -{mm}) cannot occur in finite dimension"));
        }
    }
    if large {
        let dnn = b.value("delta(N',N)", g.delta(np, n)?);
        let dmm = b.value("delta(M,M')", g.delta(m, mp)?);
        let gmv = b.value("gamma(M,V)", g.gamma(m, &v)?);
        let gu_tn = b.value("gamma(U,(I+K1)N)", g.gamma(&u, &tn)?);
        let theta2 = b.value("theta_2", a * (1.0 + gu_tn) * dnn / (gu_tn - a * dnn));
        let eta2 = b.value("eta_2", (1.0 + dmm / gmv) * (1.0 + theta2));
        b.gate(NamedCheck::new("delta(N',N) < gamma(U,(I+K1)M)/a", dnn, "<", gu_tm / a));
        b.gate(NamedCheck::new("eta_2 < 2", eta2, "<", 2.0.into()));
        b.conclude(NamedCheck::exact("[M'-N'] >= [M-N]", relp as f64, ">=", rel as f64));
    }
    b.conclude(NamedCheck::exact("[M-N] == dim V - dim U", rel as f64, "==", v.dim() as f64 - u.dim() as f64));
    Ok(b.finish())
}
