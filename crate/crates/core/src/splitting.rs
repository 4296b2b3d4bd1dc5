//! Constructive splitting of a finite extension near a perturbed subspace.
//!
//! Three tools: lower bounds for distances of combinations of vectors that
//! stay away from a subspace (`ball_distance_certificate`), transport of a
//! finite-dimensional subspace into a nearby subspace (`transport_subspace`),
//! and the greedy construction `M = L ⊕ V_k ⊕ U_{n−k}` of [`split`].
//!
//! Constants, for `a ∈ (0, √2−1)` and `b = √2−1`:
//!
//! ```text
//! a_i = a^i / (i (1+a)^{i−1})          a_0 = 1
//! δ_i = min(δ(N,M)(1+a_i)/a_i, 1)      δ_0 = δ(N,M)
//! c_k = (n−k)(a+1)^{n−k−1}(1+δ_k)δ_k / ((a−δ_k)^{n−k}(1−δ_k))
//! ```

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{GapError, Result};
use crate::gap::{GapMeter, GapOptions};
use crate::interval::{Check, Interval, NamedCheck};
use crate::linalg::{c, Mat, Vector, C64};
use crate::normed::{dist_to_subspace, nearest_point, NormedSpace, Subspace};
use crate::verdict::{vector_pairs, StabilityVerdict, VerdictBuilder};

const B: f64 = std::f64::consts::SQRT_2 - 1.0;

/// Subspace spanned by linearly independent ambient vectors.
pub(crate) fn span_of(space: &Arc<NormedSpace>, vs: &[Vector]) -> Result<Subspace> {
    if vs.is_empty() {
        return Ok(Subspace::zero(space));
    }
    Subspace::new(space, Mat::from_columns(vs))
}

fn unit(space: &NormedSpace, v: &Vector) -> Vector {
    v / c(space.norm_of(v))
}

/// `Δ_k = ∏_{i≥k} δ_i / ∏_{i>k} (1+δ_i)` for `k = 1..n`, via the
/// recursion `Δ_n = δ_n`, `Δ_k = δ_k Δ_{k+1} / (1+δ_{k+1})`.
pub fn ball_deltas(deltas: &[f64]) -> Vec<f64> {
    let n = deltas.len();
    let mut out = vec![0.0; n];
    for k in (0..n).rev() {
        out[k] = if k + 1 == n { deltas[k] } else { deltas[k] * out[k + 1] / (1.0 + deltas[k + 1]) };
    }
    out
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BallDistanceCertificate {
    pub vectors: Vec<Vec<[f64; 2]>>,
    pub deltas: Vec<f64>,
    /// Certified `dist(u_k, M+V_{k−1})`.
    pub distances: Vec<Interval>,
    #[serde(rename = "Delta")]
    pub big_delta: Vec<f64>,
    pub gamma_bound: f64,
    pub checks: Vec<NamedCheck>,
    pub samples: usize,
}

/// Certifies the distance bounds for combinations of `u_1..u_n` from `M`,
/// given `dist(u_k, M+V_{k−1}) ≥ δ_k`.
pub fn ball_distance_certificate(
    m: &Subspace,
    u: &[Vector],
    deltas: &[f64],
    opts: &GapOptions,
) -> Result<BallDistanceCertificate> {
    let space = m.space().clone();
    if u.len() != deltas.len() || u.is_empty() {
        return Err(GapError::DimensionMismatch("need one delta per vector".into()));
    }
    if deltas.iter().any(|&d| !(d > 0.0 && d <= 1.0)) {
        return Err(GapError::Precondition("each delta must lie in (0, 1]".into()));
    }
    for (k, x) in u.iter().enumerate() {
        if x.len() != space.dim() {
            return Err(GapError::DimensionMismatch(format!("vector {} has the wrong length", k + 1)));
        }
        if (space.norm_of(x) - 1.0).abs() > 1e-9 {
            return Err(GapError::Precondition(format!("vector {} is not a unit vector", k + 1)));
        }
    }
    let n = u.len();
    let mut checks = Vec::new();
    let mut distances = Vec::new();
    let mut effective = Vec::new();
    let mut mv = m.clone();
    for k in 0..n {
        let d = dist_to_subspace(&u[k], &mv)?;
        // Rounding-level slack so that exact hypotheses such as δ = 1 for
        // an orthogonal vector are accepted; the bounds below use the
        // certified value instead.
        if d.lo < deltas[k] * (1.0 - 1e-12) {
            return Err(GapError::Gate(format!("dist(u_{0}, M+V_{1}) >= delta_{0} is not certified ({2:.6e} < {3:.6e})", k + 1, k, d.lo, deltas[k])));
        }
        effective.push(deltas[k].min(d.lo));
        distances.push(d.into());
        mv = mv.sum(&span_of(&space, &u[k..=k])?)?;
        checks.push(NamedCheck::exact(format!("dim (M+V_{})/M == {}", k + 1, k + 1), mv.quotient_dim(m)? as f64, "==", (k + 1) as f64));
    }
    let big = ball_deltas(deltas);
    let bound = big[0] / n as f64;
    let safe = ball_deltas(&effective)[0] / n as f64;
    // Random combinations against the coefficient-sum bound.
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xba11);
    let samples = opts.budget.clamp(1, 256);
    let mut worst = Interval::point(f64::INFINITY);
    let mut status = Check::Holds;
    let complex = !space.is_real();
    for _ in 0..samples {
        let a: Vec<C64> = (0..n)
            .map(|_| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = if complex { StandardNormal.sample(&mut rng) } else { 0.0 };
                C64::new(re, im)
            })
            .collect();
        let x = u.iter().zip(&a).fold(Vector::zeros(space.dim()), |acc, (v, &ak)| acc + v * ak);
        let s: f64 = a.iter().map(|z| z.norm()).sum();
        let d: Interval = dist_to_subspace(&x, m)?.into();
        status = status.and(Check::ge(d, Interval::point(safe) * s));
        worst = worst.min(d / s);
    }
    let mut sampled = NamedCheck::new("min over samples of dist(sum a_k u_k, M) / sum |a_k| >= Delta_1/n", worst, ">=", Interval::point(safe));
    sampled.status = status;
    checks.push(sampled);
    let g = GapMeter::new(opts).gamma(&span_of(&space, u)?, m)?;
    checks.push(NamedCheck::new("gamma(V_n, M) >= Delta_1/n", g, ">=", Interval::point(safe)));
    Ok(BallDistanceCertificate {
        vectors: u.iter().map(vector_pairs).collect(),
        deltas: deltas.to_vec(),
        distances,
        big_delta: big,
        gamma_bound: bound,
        checks,
        samples,
    })
}

/// Transport of a spanning set: with `dist(v_k, M+V_{k−1}) ≥ δ_k`
/// and `||v_k − v′_k|| ≤ δ < Δ − δ(M′,M)`, the spans have equal dimension and
/// `γ(V′,M′) ≥ (Δ−δ−δ(M′,M))/(1+δ(M′,M))`, `δ̂(V,V′) ≤ δ/(Δ−δ)`.
pub fn gap_finite_dimension_check(
    m: &Subspace,
    mp: &Subspace,
    v: &[Vector],
    vp: &[Vector],
    opts: &GapOptions,
) -> Result<StabilityVerdict> {
    m.same_space(mp)?;
    if v.len() != vp.len() || v.is_empty() {
        return Err(GapError::DimensionMismatch("v and v' must pair up".into()));
    }
    let space = m.space().clone();
    let n = v.len();
    let mut b = VerdictBuilder::new("gap-finite-dimension");
    let mut g = GapMeter::new(opts);
    let mut mv = m.clone();
    let mut ds = Vec::with_capacity(n);
    for k in 0..n {
        let d = dist_to_subspace(&v[k], &mv)?;
        let dk = d.lo.min(1.0);
        b.value(format!("dist(v_{}, M+V_{})", k + 1, k), d.into());
        b.gate(NamedCheck::new(format!("dist(v_{}, M+V_{}) > 0", k + 1, k), Interval::point(dk), ">", Interval::zero()));
        if dk <= 0.0 {
            return Ok(b.finish());
        }
        ds.push(dk);
        mv = mv.sum(&span_of(&space, &v[k..=k])?)?;
    }
    let prod_num: f64 = ds.iter().product();
    let prod_den: f64 = ds.iter().skip(1).map(|d| 1.0 + d).product();
    let big = Interval::point(prod_num) / (Interval::point(prod_den) * n as f64);
    b.value("Delta", big);
    let delta = v.iter().zip(vp).map(|(x, y)| space.norm_of(&(x - y))).fold(0.0, f64::max);
    let delta = b.value("delta", Interval::new(delta, delta * (1.0 + 1e-14) + 1e-300));
    let dmm = b.value("delta(M',M)", g.delta(mp, m)?);
    b.gate(NamedCheck::new("delta < Delta - delta(M',M)", delta, "<", big - dmm));
    let vs = Subspace::span(&space, &Mat::from_columns(v))?;
    let vps = Subspace::span(&space, &Mat::from_columns(vp))?;
    b.conclude(NamedCheck::exact("dim V_n == n", vs.dim() as f64, "==", n as f64));
    b.conclude(NamedCheck::exact("dim V'_n == n", vps.dim() as f64, "==", n as f64));
    if vps.dim() == n {
        let gam = b.value("gamma(V'_n,M')", g.gamma(&vps, mp)?);
        b.conclude(NamedCheck::new("gamma(V'_n,M') >= (Delta-delta-delta(M',M))/(1+delta(M',M))", gam, ">=", (big - delta - dmm) / (1.0 + dmm)));
        let dh = b.value("delta_hat(V_n,V'_n)", g.delta(&vs, &vps)?.max(g.delta(&vps, &vs)?));
        b.conclude(NamedCheck::new("delta_hat(V_n,V'_n) <= delta/(Delta-delta)", dh, "<=", delta / (big - delta)));
    }
    Ok(b.finish())
}

#[derive(Clone, Debug)]
pub struct Transport {
    pub vp: Subspace,
    /// `2^{n−1}n(δ(N,N′)+ε)/(1−2^{n−1}n(δ(N,N′)+ε))`.
    pub bound: f64,
    pub eps: f64,
    /// Unit chain in `V` with `dist(v_k, V_{k−1}) = 1` up to certification.
    pub chain: Vec<Vector>,
    /// Nearest points of the chain in `N′`.
    pub image: Vec<Vector>,
    pub verdict: StabilityVerdict,
}

/// Moves `V ⊆ N` to a subspace `V′ ⊆ N′` of the same dimension.
pub fn transport_subspace(v: &Subspace, n: &Subspace, np: &Subspace, opts: &GapOptions) -> Result<Transport> {
    v.same_space(np)?;
    v.require_within(n, "V must lie in N")?;
    let space = v.space().clone();
    let k = v.dim();
    if k == 0 {
        let mut b = VerdictBuilder::new("transport");
        b.conclude(NamedCheck::exact("dim V' == dim V", 0.0, "==", 0.0));
        return Ok(Transport { vp: Subspace::zero(&space), bound: 0.0, eps: 0.0, chain: vec![], image: vec![], verdict: b.finish() });
    }
    let mut g = GapMeter::new(opts);
    let dnn = g.delta(n, np)?;
    let scale = 2f64.powi(k as i32 - 1) * k as f64;
    if !(dnn.hi < 1.0 / scale) {
        return Err(GapError::Gate(format!("delta(N,N') = {dnn} is not certified below 1/(2^(n-1) n) = {:.6e}", 1.0 / scale)));
    }
    let eps = (1e-6 * dnn.hi.max(1e-12)).min(0.5 * (1.0 / scale - dnn.hi));
    let t = scale * (dnn.hi + eps);
    let bound = t / (1.0 - t);
    // Chain by best-approximation residuals: dist(r, V_{j−1}) = ||r|| when r
    // is the residual of a best approximation.
    let basis = v.basis();
    let mut chain: Vec<Vector> = Vec::with_capacity(k);
    let mut prev = Subspace::zero(&space);
    for j in 0..k {
        let x = basis.column(j).into_owned();
        let (_, near) = nearest_point(&x, &prev)?;
        let r = unit(&space, &(x - near));
        chain.push(r);
        prev = span_of(&space, &chain)?;
    }
    let image: Vec<Vector> = chain.iter().map(|x| nearest_point(x, np).map(|p| p.1)).collect::<Result<_>>()?;
    let vp = Subspace::span(&space, &Mat::from_columns(&image))?;
    let zero = Subspace::zero(&space);
    let inner = gap_finite_dimension_check(&zero, &zero, &chain, &image, opts)?;
    let mut b = VerdictBuilder::new("transport");
    b.value("delta(N,N')", dnn);
    b.value("eps", Interval::point(eps));
    b.value("bound", Interval::point(bound));
    b.gate(NamedCheck::new("delta(N,N') < 1/(2^(n-1) n)", dnn, "<", Interval::point(1.0 / scale)));
    b.conclude(NamedCheck::exact("dim V' == dim V", vp.dim() as f64, "==", k as f64));
    b.conclude(NamedCheck::exact("V' ⊆ N'", vp.is_within(np)? as u8 as f64, "==", 1.0));
    if vp.dim() == k {
        let dh = b.value("delta_hat(V,V')", g.delta(v, &vp)?.max(g.delta(&vp, v)?));
        b.conclude(NamedCheck::new("delta_hat(V,V') <= bound", dh, "<=", Interval::point(bound)));
    }
    b.absorb("spanning: ", inner);
    Ok(Transport { vp, bound, eps, chain, image, verdict: b.finish() })
}

/// Constants `a_i`, `i = 0..=n+1`.
pub fn a_constants(a: f64, n: usize) -> Vec<f64> {
    (0..=n + 1).map(|i| if i == 0 { 1.0 } else { a.powi(i as i32) / (i as f64 * (1.0 + a).powi(i as i32 - 1)) }).collect()
}

fn delta_i(dnm: Interval, ai: f64, i: usize) -> Interval {
    if i == 0 {
        dnm
    } else {
        (dnm * (1.0 + ai) / ai).min(Interval::one())
    }
}

fn c_k(a: f64, dk: Interval, n: usize, k: usize) -> Interval {
    if k >= n {
        return Interval::zero();
    }
    let r = (n - k) as i32;
    let gap = a - dk;
    if gap.hi <= 0.0 || dk.lo >= 1.0 {
        return Interval::point(f64::INFINITY);
    }
    if gap.lo <= 0.0 || dk.hi >= 1.0 {
        return Interval::new(0.0, f64::INFINITY);
    }
    (n - k) as f64 * (a + 1.0).powi(r - 1) * (1.0 + dk) * dk / (gap.powi(r) * (1.0 - dk))
}

#[derive(Clone, Debug)]
pub struct SplittingResult {
    pub m: Subspace,
    pub v_k: Subspace,
    pub u: Subspace,
    pub w: Subspace,
    pub k: usize,
    pub n: usize,
    /// `v_1..v_k`, `u_1..`, `w_1..` as constructed.
    pub v_vectors: Vec<Vector>,
    pub u_vectors: Vec<Vector>,
    pub w_vectors: Vec<Vector>,
    pub constants: BTreeMap<String, Interval>,
    /// Verdicts for parts (a), (b), (c).
    pub checks: Vec<StabilityVerdict>,
    pub notes: Vec<String>,
}

/// Serializable form of a [`SplittingResult`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SplittingReport {
    pub k: usize,
    pub k_kind: String,
    pub n: usize,
    pub dims: BTreeMap<String, usize>,
    pub v: Vec<Vec<[f64; 2]>>,
    pub u: Vec<Vec<[f64; 2]>>,
    pub w: Vec<Vec<[f64; 2]>>,
    pub constants: BTreeMap<String, Interval>,
    pub checks: Vec<StabilityVerdict>,
    pub notes: Vec<String>,
}

impl SplittingResult {
    pub fn report(&self) -> SplittingReport {
        let dims = [("M", self.m.dim()), ("V_k", self.v_k.dim()), ("U", self.u.dim()), ("W", self.w.dim())]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        SplittingReport {
            k: self.k,
            k_kind: "greedy".into(),
            n: self.n,
            dims,
            v: self.v_vectors.iter().map(vector_pairs).collect(),
            u: self.u_vectors.iter().map(vector_pairs).collect(),
            w: self.w_vectors.iter().map(vector_pairs).collect(),
            constants: self.constants.clone(),
            checks: self.checks.clone(),
            notes: self.notes.clone(),
        }
    }

    /// Any part whose hypothesis was certified but whose conclusion failed.
    pub fn contradiction(&self) -> bool {
        self.checks.iter().any(|c| c.contradiction())
    }
}

/// Greedy construction for `M = L ⊕ S`, `dim S = n`, near `N`.
pub fn split(l: &Subspace, s: &Subspace, n: &Subspace, a: f64, opts: &GapOptions) -> Result<SplittingResult> {
    l.same_space(s)?;
    l.same_space(n)?;
    if !(a > 0.0 && a < B) {
        return Err(GapError::Precondition(format!("a = {a} must lie in (0, sqrt(2)-1)")));
    }
    let (m, ls) = l.sum_and_intersection(s)?;
    if ls.dim() != 0 {
        return Err(GapError::Precondition("L and S must intersect trivially".into()));
    }
    let space = m.space().clone();
    let dim_s = s.dim();
    let mut g = GapMeter::new(opts);
    let mut notes = Vec::new();
    let mut constants = BTreeMap::new();

    let dnm = g.delta(n, &m)?;
    let dln = g.delta(l, n)?;
    let gls = g.gamma(l, s)?;
    let ai = a_constants(a, dim_s);
    constants.insert("a".to_string(), Interval::point(a));
    constants.insert("b".to_string(), Interval::point(B));
    for (i, &x) in ai.iter().enumerate() {
        constants.insert(format!("a_{i}"), Interval::point(x));
        constants.insert(format!("delta_{i}"), delta_i(dnm, x, i));
    }

    // Step 1: greedy chain with dist(v_i, N+V_{i−1}) > a.
    let mut vs: Vec<Vector> = Vec::new();
    let mut nv = n.clone();
    let mut dist_v = Vec::new();
    loop {
        if vs.len() >= m.dim() {
            break;
        }
        let ex = g.delta_extremal(&m, &nv)?;
        let cand = ex.witness.filter(|_| ex.value.lo > a);
        match cand {
            Some(x) => {
                let d = dist_to_subspace(&x, &nv)?;
                if d.lo <= a {
                    notes.push("witness search exhausted at budget".into());
                    break;
                }
                dist_v.push(d);
                vs.push(x);
                nv = n.sum(&span_of(&space, &vs)?)?;
            }
            None => {
                if ex.value.hi <= a {
                    notes.push("greedy chain is certified maximal".into());
                } else {
                    notes.push("witness search exhausted at budget; maximality not certified".into());
                }
                break;
            }
        }
    }
    let k = vs.len();
    let v_k = span_of(&space, &vs)?;
    let ak = if k < ai.len() { ai[k] } else { a_constants(a, k)[k] };
    let dk = delta_i(dnm, ak, k);
    constants.insert("k".to_string(), Interval::point(k as f64));
    let ck = c_k(a, dk, dim_s, k);
    constants.insert("c_k".to_string(), ck);

    // Part (a).
    let mut pa = VerdictBuilder::new("split-a");
    pa.value("delta(N,M)", dnm);
    pa.value("delta(L,N)", dln);
    pa.value("gamma(L,S)", gls);
    let d_n1 = delta_i(dnm, ai[dim_s + 1], dim_s + 1);
    pa.value("delta_{n+1}", d_n1);
    let lhs = pa.value("(1+delta_{n+1})(1+delta(L,N)/gamma(L,S))", (1.0 + d_n1) * (1.0 + dln / gls));
    pa.gate(NamedCheck::new("(1+delta_{n+1})(1+delta(L,N)/gamma(L,S)) < 2", lhs, "<", 2.0.into()));
    for (i, d) in dist_v.iter().enumerate() {
        pa.value(format!("dist(v_{}, N+V_{})", i + 1, i), (*d).into());
    }
    pa.conclude(NamedCheck::exact("dim V_k == k", v_k.dim() as f64, "==", k as f64));
    pa.conclude(NamedCheck::exact("k <= n", k as f64, "<=", dim_s as f64));
    let nvk = n.intersect(&v_k)?;
    pa.conclude(NamedCheck::exact("dim (N ∩ V_k) == 0", nvk.dim() as f64, "==", 0.0));
    let gvn = pa.value("gamma(V_k,N)", g.gamma(&v_k, n)?);
    pa.conclude(NamedCheck::new("gamma(V_k,N) >= a_k", gvn, ">=", Interval::point(ak)));
    let dm_nv = pa.value("delta(M,N+V_k)", g.delta(&m, &nv)?);
    pa.conclude(NamedCheck::new("delta(M,N+V_k) <= a", dm_nv, "<=", Interval::point(a)));
    let dnv_m = pa.value("delta(N+V_k,M)", g.delta(&nv, &m)?);
    let mut top = NamedCheck::new("delta(N+V_k,M) <= delta_k", dnv_m, "<=", dk);
    if k == 0 {
        // N+V_0 = N and delta_0 = delta(N,M): both sides are one quantity.
        top.status = Check::Holds;
    }
    pa.conclude(top);
    let part_a = pa.finish();

    // Part (b).
    let mut pb = VerdictBuilder::new("split-b");
    pb.value("delta(L,N)", dln);
    pb.gate(NamedCheck::new("part (a) hypothesis", Interval::point(part_a.hypothesis_ok as u8 as f64), ">=", Interval::one()));
    pb.gate(NamedCheck::new("delta(L,N) < a_k", dln, "<", Interval::point(ak)));
    let lv = l.intersect(&v_k)?;
    pb.conclude(NamedCheck::exact("dim (L ∩ V_k) == 0", lv.dim() as f64, "==", 0.0));
    let gvl = pb.value("gamma(V_k,L)", g.gamma(&v_k, l)?);
    pb.conclude(NamedCheck::new("gamma(V_k,L) >= (a_k-delta(L,N))/(1+delta(L,N))", gvl, ">=", (ak - dln) / (1.0 + dln)));
    let lpv = l.sum(&v_k)?;
    let dlv = pb.value("delta(L+V_k,N+V_k)", g.delta(&lpv, &nv)?);
    pb.conclude(NamedCheck::new("delta(L+V_k,N+V_k) <= a_k delta(L,N)/(a_k-delta(L,N))", dlv, "<=", ak * dln / (ak - dln)));
    let part_b = pb.finish();

    // Part (c): U/W chains with the b = √2−1 threshold.
    let mut pc = VerdictBuilder::new("split-c");
    pc.gate(NamedCheck::new("parts (a),(b) hypotheses", Interval::point(part_b.hypothesis_ok as u8 as f64), ">=", Interval::one()));
    pc.value("c_k", ck);
    pc.gate(NamedCheck::new("c_k >= 0", ck, ">=", Interval::zero()));
    pc.gate(NamedCheck::new("c_k < 1", ck, "<", Interval::one()));
    let mut us: Vec<Vector> = Vec::new();
    let mut ws: Vec<Vector> = Vec::new();
    if k <= dim_s {
        // The absolute floor keeps ε above the rounding level of unit vectors.
        let eps = (1e-6 * dnv_m.hi).max(1e-12);
        let d_eps = dnv_m.hi + eps;
        pc.value("eps", Interval::point(eps));
        pc.value("delta_eps", Interval::point(d_eps));
        for j in 0..dim_s - k {
            let base = lpv.sum(&span_of(&space, &us)?)?;
            let ex = g.delta_extremal(&nv, &base)?;
            let w = match ex.witness {
                Some(w) if ex.value.lo > B => w,
                _ => {
                    notes.push(format!("witness search for w_{} exhausted at budget", j + 1));
                    break;
                }
            };
            let dw = dist_to_subspace(&w, &base)?;
            pc.conclude(NamedCheck::new(format!("dist(w_{}, L+V_k+U_{}) > b", j + 1, j), dw.into(), ">", Interval::point(B)));
            let (gap_uw, u) = nearest_point(&w, &m)?;
            pc.conclude(NamedCheck::new(format!("||u_{0} - w_{0}|| < delta_eps", j + 1), gap_uw.into(), "<", Interval::point(d_eps)));
            us.push(u);
            ws.push(w);
        }
    } else {
        notes.push(format!("k = {k} exceeds n = {dim_s}; U and W are not constructed"));
    }
    let u_sub = Subspace::span(&space, &if us.is_empty() { Mat::zeros(space.dim(), 0) } else { Mat::from_columns(&us) })?;
    let w_sub = Subspace::span(&space, &if ws.is_empty() { Mat::zeros(space.dim(), 0) } else { Mat::from_columns(&ws) })?;
    let r = dim_s.saturating_sub(k);
    pc.conclude(NamedCheck::exact("dim U == n-k", u_sub.dim() as f64, "==", r as f64));
    pc.conclude(NamedCheck::exact("dim W == n-k", w_sub.dim() as f64, "==", r as f64));
    pc.conclude(NamedCheck::exact("W ⊆ N+V_k", w_sub.is_within(&nv)? as u8 as f64, "==", 1.0));
    let lvw = lpv.intersect(&w_sub)?;
    pc.conclude(NamedCheck::exact("dim ((L+V_k) ∩ W) == 0", lvw.dim() as f64, "==", 0.0));
    let total = lpv.sum(&u_sub)?;
    let direct = l.dim() + v_k.dim() + u_sub.dim() == m.dim() && total.dim() == m.dim() && total.is_within(&m)?;
    pc.conclude(NamedCheck::exact("M == L ⊕ V_k ⊕ U", direct as u8 as f64, "==", 1.0));
    let gu = pc.value("gamma(U,L+V_k)", g.gamma(&u_sub, &lpv)?);
    if k < dim_s {
        let rr = r as i32;
        let gap = a - dk;
        let rhs = if gap.lo > 0.0 { gap.powi(rr) / ((r as f64) * (a + 1.0).powi(rr - 1) * (1.0 + dk)) } else { Interval::new(f64::NEG_INFINITY, f64::INFINITY) };
        pc.conclude(NamedCheck::new("gamma(U,L+V_k) > (a-delta_k)^(n-k)/((n-k)(a+1)^(n-k-1)(1+delta_k))", gu, ">", rhs));
    } else {
        pc.conclude(NamedCheck::new("gamma(U,L+V_k) == 1", gu, ">=", Interval::one()));
    }
    let duw = pc.value("delta_hat(U,W)", g.delta(&u_sub, &w_sub)?.max(g.delta(&w_sub, &u_sub)?));
    pc.conclude(NamedCheck::new("delta_hat(U,W) <= c_k/(1-c_k)", duw, "<=", ck / (1.0 - ck)));
    let part_c = pc.finish();

    Ok(SplittingResult {
        m,
        v_k,
        u: u_sub,
        w: w_sub,
        k,
        n: dim_s,
        v_vectors: vs,
        u_vectors: us,
        w_vectors: ws,
        constants,
        checks: vec![part_a, part_b, part_c],
        notes,
    })
}
