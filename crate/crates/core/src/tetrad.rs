//! Fredholm pairs and tetrads: indices, and certificate checks for the
//! stability of those indices under small gap perturbations.
//!
//! A tetrad `(Y₁; M, N; Y₂)` is a nested configuration
//! `Y₁ ⊆ M∩N ⊆ M+N ⊆ Y₂` with index `dim (M∩N)/Y₁ − dim Y₂/(M+N)`.
//!
//! "Sufficiently small" perturbations are made concrete through explicit
//! sufficient conditions. Each side of an index comparison reduces to a
//! finite extension `M ⊆ N` with complement `V`:
//!
//! ```text
//! (a) (1+δ(N′,N))(1+δ(M,M′)/γ(M,V)) < 2              ⇒ dim N′/M′ ≤ dim N/M
//! (b) δ(M′,M) < γ(V,M) and
//!     (1+(1+γ(V,M))δ(M′,M)/(γ(V,M)−δ(M′,M)))(1+δ(N,N′)) < 2 ⇒ dim N′/M′ ≥ dim V
//! ```
//!
//! The gaps between sums and intersections are bounded from the gaps of
//! the members:
//!
//! ```text
//! δ(M′∩N′, M∩N) ≤ 2(δ(M′,M)+δ(N′,N))/γ(M,N)
//! δ(M+N, M′+N′) ≤ δ(N,N′) + (δ(M,M′)+δ(N,N′))/γ(M,N)
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{GapError, Result};
use crate::gap::{GapMeter, GapOptions};
use crate::interval::{Interval, NamedCheck};
use crate::linalg::{Mat, Vector};
use crate::normed::{DistInterval, Subspace};
use crate::verdict::{StabilityVerdict, VerdictBuilder};

/// An integer or `±∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtInt {
    NegInf,
    Finite(i64),
    PosInf,
}

impl ExtInt {
    pub fn finite(self) -> Option<i64> {
        match self {
            ExtInt::Finite(k) => Some(k),
            _ => None,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            ExtInt::NegInf => f64::NEG_INFINITY,
            ExtInt::Finite(k) => k as f64,
            ExtInt::PosInf => f64::INFINITY,
        }
    }

    /// `a − b`; `None` for `∞ − ∞`.
    pub fn minus(self, b: ExtInt) -> Option<ExtInt> {
        use ExtInt::*;
        match (self, b) {
            (Finite(x), Finite(y)) => Some(Finite(x - y)),
            (PosInf, PosInf) | (NegInf, NegInf) => None,
            (PosInf, _) | (_, NegInf) => Some(PosInf),
            (NegInf, _) | (_, PosInf) => Some(NegInf),
        }
    }
}

impl From<usize> for ExtInt {
    fn from(k: usize) -> Self {
        ExtInt::Finite(k as i64)
    }
}

impl fmt::Display for ExtInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtInt::NegInf => write!(f, "-inf"),
            ExtInt::Finite(k) => write!(f, "{k}"),
            ExtInt::PosInf => write!(f, "inf"),
        }
    }
}

impl Serialize for ExtInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtInt::Finite(k) => s.serialize_i64(*k),
            ExtInt::PosInf => s.serialize_str("inf"),
            ExtInt::NegInf => s.serialize_str("-inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            I(i64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::I(k) => Ok(ExtInt::Finite(k)),
            Raw::S(s) if s == "inf" || s == "+inf" => Ok(ExtInt::PosInf),
            Raw::S(s) if s == "-inf" => Ok(ExtInt::NegInf),
            Raw::S(s) => Err(serde::de::Error::custom(format!("not an extended integer: {s}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TetradKind {
    Fredholm,
    /// Finite cap excess, infinite sum deficit.
    LeftSemi,
    /// Infinite cap excess, finite sum deficit.
    RightSemi,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairIndex {
    pub dim_cap: usize,
    pub codim_sum: usize,
    pub index: i64,
}

/// `dim(M∩N) − dim X/(M+N)`. Every pair is Fredholm in finite dimensions.
pub fn pair_index(m: &Subspace, n: &Subspace) -> Result<PairIndex> {
    let (sum, cap) = m.sum_and_intersection(n)?;
    let codim = m.ambient_dim() - sum.dim();
    Ok(PairIndex { dim_cap: cap.dim(), codim_sum: codim, index: cap.dim() as i64 - codim as i64 })
}

#[derive(Clone, Debug)]
pub struct Tetrad {
    y1: Subspace,
    m: Subspace,
    n: Subspace,
    y2: Subspace,
    sum: Subspace,
    cap: Subspace,
}

/// Serializable description of a tetrad.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TetradSummary {
    /// `dim Y₁, dim M, dim N, dim Y₂`.
    pub dims: [usize; 4],
    pub dim_cap: usize,
    pub dim_sum: usize,
    pub cap_excess: ExtInt,
    pub sum_deficit: ExtInt,
    pub index: ExtInt,
    pub kind: TetradKind,
}

impl Tetrad {
    /// Checks `Y₁ ⊆ M∩N` and `M+N ⊆ Y₂`.
    pub fn new(y1: Subspace, m: Subspace, n: Subspace, y2: Subspace) -> Result<Tetrad> {
        for s in [&m, &n, &y2] {
            y1.same_space(s)?;
        }
        let (sum, cap) = m.sum_and_intersection(&n)?;
        y1.require_within(&cap, "tetrad needs Y1 inside M∩N")?;
        sum.require_within(&y2, "tetrad needs M+N inside Y2")?;
        Ok(Tetrad { y1, m, n, y2, sum, cap })
    }

    /// `({0}; M, N; X)`, whose index is the pair index.
    pub fn from_pair(m: Subspace, n: Subspace) -> Result<Tetrad> {
        let s = m.space().clone();
        Tetrad::new(Subspace::zero(&s), m, n, Subspace::whole(&s))
    }

    /// Image of all four members under an invertible ambient map.
    pub fn map(&self, g: &Mat) -> Result<Tetrad> {
        Tetrad::new(self.y1.image(g)?, self.m.image(g)?, self.n.image(g)?, self.y2.image(g)?)
    }

    pub fn y1(&self) -> &Subspace {
        &self.y1
    }
    pub fn m(&self) -> &Subspace {
        &self.m
    }
    pub fn n(&self) -> &Subspace {
        &self.n
    }
    pub fn y2(&self) -> &Subspace {
        &self.y2
    }
    pub fn sum(&self) -> &Subspace {
        &self.sum
    }
    pub fn cap(&self) -> &Subspace {
        &self.cap
    }

    /// `dim (M∩N)/Y₁`.
    pub fn cap_excess(&self) -> ExtInt {
        (self.cap.dim() - self.y1.dim()).into()
    }

    /// `dim Y₂/(M+N)`.
    pub fn sum_deficit(&self) -> ExtInt {
        (self.y2.dim() - self.sum.dim()).into()
    }

    pub fn index(&self) -> ExtInt {
        self.cap_excess().minus(self.sum_deficit()).expect("finite dimensions")
    }

    pub fn kind(&self) -> TetradKind {
        match (self.cap_excess(), self.sum_deficit()) {
            (ExtInt::Finite(_), ExtInt::Finite(_)) => TetradKind::Fredholm,
            (ExtInt::Finite(_), _) => TetradKind::LeftSemi,
            (_, ExtInt::Finite(_)) => TetradKind::RightSemi,
            _ => TetradKind::None,
        }
    }

    pub fn summary(&self) -> TetradSummary {
        TetradSummary {
            dims: [self.y1.dim(), self.m.dim(), self.n.dim(), self.y2.dim()],
            dim_cap: self.cap.dim(),
            dim_sum: self.sum.dim(),
            cap_excess: self.cap_excess(),
            sum_deficit: self.sum_deficit(),
            index: self.index(),
            kind: self.kind(),
        }
    }
}

pub fn tetrad_index(t: &Tetrad) -> ExtInt {
    t.index()
}

fn idx(t: &Tetrad) -> f64 {
    t.index().as_f64()
}

/// `Index(M′,N) = Index(M,N) + dim M′/M` for `M ⊆ M′`.
pub fn finite_diff_index_check(m: &Subspace, mp: &Subspace, n: &Subspace) -> Result<StabilityVerdict> {
    let k = mp.quotient_dim(m)?;
    let mut b = VerdictBuilder::new("finite-diff-index");
    b.gate(NamedCheck::exact("M ⊆ M'", 1.0, "==", 1.0));
    b.value("dim M'/M", Interval::point(k as f64));
    let before = pair_index(m, n)?.index;
    let after = pair_index(mp, n)?.index;
    b.conclude(NamedCheck::exact("Index(M',N) == Index(M,N) + dim M'/M", after as f64, "==", (before + k as i64) as f64));
    Ok(b.finish())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// Sum deficit cannot grow.
    T11a,
    /// Cap excess cannot grow.
    T11b,
    /// Index cannot drop.
    T12a,
    /// Index cannot rise.
    T12b,
    /// Index is preserved.
    T12c,
    /// Index at least `m` persists.
    T12d(i64),
    /// Index at most `m` persists.
    T12e(i64),
    FiniteExtA,
    FiniteExtB,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::T11a => write!(f, "1.1a"),
            Variant::T11b => write!(f, "1.1b"),
            Variant::T12a => write!(f, "1.2a"),
            Variant::T12b => write!(f, "1.2b"),
            Variant::T12c => write!(f, "1.2c"),
            Variant::T12d(m) => write!(f, "1.2d({m})"),
            Variant::T12e(m) => write!(f, "1.2e({m})"),
            Variant::FiniteExtA => write!(f, "finite-ext-a"),
            Variant::FiniteExtB => write!(f, "finite-ext-b"),
        }
    }
}

impl FromStr for Variant {
    type Err = GapError;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let param = |rest: &str| -> Result<i64> {
            let inner = rest.trim_start_matches(['(', ':', '=']).trim_end_matches(')');
            inner.trim().parse().map_err(|_| GapError::Input(format!("variant {s} needs an integer parameter")))
        };
        Ok(match s {
            "1.1a" => Variant::T11a,
            "1.1b" => Variant::T11b,
            "1.2a" => Variant::T12a,
            "1.2b" => Variant::T12b,
            "1.2c" => Variant::T12c,
            "finite-ext-a" => Variant::FiniteExtA,
            "finite-ext-b" => Variant::FiniteExtB,
            _ if s.starts_with("1.2d") => Variant::T12d(param(&s[4..])?),
            _ if s.starts_with("1.2e") => Variant::T12e(param(&s[4..])?),
            _ => return Err(GapError::Input(format!("unknown variant {s}"))),
        })
    }
}

/// Shared evaluation state for one verdict.
struct Gates<'a> {
    b: VerdictBuilder,
    g: GapMeter,
    t: &'a Tetrad,
    tp: &'a Tetrad,
}

impl Gates<'_> {
    fn delta(&mut self, name: &str, a: &Subspace, b: &Subspace) -> Result<Interval> {
        if let Some(v) = self.b_value(name) {
            return Ok(v);
        }
        let v = self.g.delta(a, b)?;
        Ok(self.b.value(name, v))
    }

    fn gamma(&mut self, name: &str, a: &Subspace, b: &Subspace) -> Result<Interval> {
        if let Some(v) = self.b_value(name) {
            return Ok(v);
        }
        let v = self.g.gamma(a, b)?;
        Ok(self.b.value(name, v))
    }

    fn b_value(&self, name: &str) -> Option<Interval> {
        self.b.get(name)
    }

    /// `dim Y₂′/(M′+N′) ≤ dim Y₂/(M+N)` through part (a) on `M+N ⊆ Y₂`.
    fn sum_not_larger(&mut self) -> Result<()> {
        let (t, tp) = (self.t, self.tp);
        let dm = self.delta("delta(M,M')", t.m(), tp.m())?;
        let dn = self.delta("delta(N,N')", t.n(), tp.n())?;
        let gmn = self.gamma("gamma(M,N)", t.m(), t.n())?;
        let dy = self.delta("delta(Y2',Y2)", tp.y2(), t.y2())?;
        let dsum = self.b.value("bound delta(M+N,M'+N')", dn + (dm + dn) / gmn);
        let v = t.sum().complement_in(t.y2())?;
        let gv = self.gamma("gamma(M+N,V_sum)", t.sum(), &v)?;
        let lhs = self.b.value("sum gate a", (1.0 + dy) * (1.0 + dsum / gv));
        self.b.gate(NamedCheck::new("(1+delta(Y2',Y2))(1+delta(M+N,M'+N')/gamma(M+N,V)) < 2", lhs, "<", 2.0.into()));
        Ok(())
    }

    /// `dim Y₂′/(M′+N′) ≥ dim Y₂/(M+N)` through part (b) on `M+N ⊆ Y₂`.
    fn sum_not_smaller(&mut self) -> Result<()> {
        let (t, tp) = (self.t, self.tp);
        let dm = self.delta("delta(M',M)", tp.m(), t.m())?;
        let dn = self.delta("delta(N',N)", tp.n(), t.n())?;
        let gmn = self.gamma("gamma(M',N')", tp.m(), tp.n())?;
        let dy = self.delta("delta(Y2,Y2')", t.y2(), tp.y2())?;
        let dsum = self.b.value("bound delta(M'+N',M+N)", dn + (dm + dn) / gmn);
        let v = t.sum().complement_in(t.y2())?;
        let gv = self.gamma("gamma(V_sum,M+N)", &v, t.sum())?;
        ext_b_gates(&mut self.b, "sum", dsum, gv, dy);
        Ok(())
    }

    /// `dim (M′∩N′)/Y₁′ ≤ dim (M∩N)/Y₁` through part (a) on `Y₁ ⊆ M∩N`.
    fn cap_not_larger(&mut self) -> Result<()> {
        let (t, tp) = (self.t, self.tp);
        let dm = self.delta("delta(M',M)", tp.m(), t.m())?;
        let dn = self.delta("delta(N',N)", tp.n(), t.n())?;
        let gmn = self.gamma("gamma(M,N)", t.m(), t.n())?;
        let dy = self.delta("delta(Y1,Y1')", t.y1(), tp.y1())?;
        let dcap = self.b.value("bound delta(M'∩N',M∩N)", 2.0 * (dm + dn) / gmn);
        let v = t.y1().complement_in(t.cap())?;
        let gv = self.gamma("gamma(Y1,V_cap)", t.y1(), &v)?;
        let lhs = self.b.value("cap gate a", (1.0 + dcap) * (1.0 + dy / gv));
        self.b.gate(NamedCheck::new("(1+delta(M'∩N',M∩N))(1+delta(Y1,Y1')/gamma(Y1,V)) < 2", lhs, "<", 2.0.into()));
        Ok(())
    }

    /// `dim (M′∩N′)/Y₁′ ≥ dim (M∩N)/Y₁` through part (b) on `Y₁ ⊆ M∩N`.
    fn cap_not_smaller(&mut self) -> Result<()> {
        let (t, tp) = (self.t, self.tp);
        let dm = self.delta("delta(M,M')", t.m(), tp.m())?;
        let dn = self.delta("delta(N,N')", t.n(), tp.n())?;
        let gmn = self.gamma("gamma(M',N')", tp.m(), tp.n())?;
        let dy = self.delta("delta(Y1',Y1)", tp.y1(), t.y1())?;
        let dcap = self.b.value("bound delta(M∩N,M'∩N')", 2.0 * (dm + dn) / gmn);
        let v = t.y1().complement_in(t.cap())?;
        let gv = self.gamma("gamma(V_cap,Y1)", &v, t.y1())?;
        ext_b_gates(&mut self.b, "cap", dy, gv, dcap);
        Ok(())
    }
}

/// Gates of part (b): `d < γ` and `(1+(1+γ)d/(γ−d))(1+e) < 2`, where `d`
/// bounds `δ(M′,M)`, `γ` bounds `γ(V,M)` and `e` bounds `δ(N,N′)`.
fn ext_b_gates(b: &mut VerdictBuilder, tag: &str, d: Interval, g: Interval, e: Interval) {
    b.gate(NamedCheck::new(format!("{tag}: delta(M',M) < gamma(V,M)"), d, "<", g));
    let lhs = b.value(format!("{tag} gate b"), (1.0 + (1.0 + g) * d / (g - d)) * (1.0 + e));
    b.gate(NamedCheck::new(format!("{tag}: (1+(1+gamma)delta/(gamma-delta))(1+delta(N,N')) < 2"), lhs, "<", 2.0.into()));
}

/// Checks a stability statement for the perturbation `t → tp`.
pub fn verify_tetrad_stability(t: &Tetrad, tp: &Tetrad, variant: Variant, opts: &GapOptions) -> Result<StabilityVerdict> {
    t.m().same_space(tp.m())?;
    if matches!(variant, Variant::FiniteExtA | Variant::FiniteExtB) {
        return verify_finite_extension(t.m(), t.n(), tp.m(), tp.n(), None, variant == Variant::FiniteExtA, opts);
    }
    let mut s = Gates { b: VerdictBuilder::new(variant.to_string()), g: GapMeter::new(opts), t, tp };
    let (sd, sdp) = (t.sum_deficit().as_f64(), tp.sum_deficit().as_f64());
    let (ce, cep) = (t.cap_excess().as_f64(), tp.cap_excess().as_f64());
    match variant {
        Variant::T11a => {
            s.sum_not_larger()?;
            s.b.conclude(NamedCheck::exact("dim Y2'/(M'+N') <= dim Y2/(M+N)", sdp, "<=", sd));
        }
        Variant::T11b => {
            s.cap_not_larger()?;
            s.b.conclude(NamedCheck::exact("dim (M'∩N')/Y1' <= dim (M∩N)/Y1", cep, "<=", ce));
        }
        Variant::T12a | Variant::T12d(_) => {
            if let Variant::T12d(m) = variant {
                s.b.gate(NamedCheck::exact("Index(Y1;M,N;Y2) >= m", idx(t), ">=", m as f64));
            }
            s.sum_not_larger()?;
            s.cap_not_smaller()?;
            match variant {
                Variant::T12d(m) => s.b.conclude(NamedCheck::exact("Index(Y1';M',N';Y2') >= m", idx(tp), ">=", m as f64)),
                _ => s.b.conclude(NamedCheck::exact("Index(Y1';M',N';Y2') >= Index(Y1;M,N;Y2)", idx(tp), ">=", idx(t))),
            };
        }
        Variant::T12b | Variant::T12e(_) => {
            if let Variant::T12e(m) = variant {
                s.b.gate(NamedCheck::exact("Index(Y1;M,N;Y2) <= m", idx(t), "<=", m as f64));
            }
            s.cap_not_larger()?;
            s.sum_not_smaller()?;
            match variant {
                Variant::T12e(m) => s.b.conclude(NamedCheck::exact("Index(Y1';M',N';Y2') <= m", idx(tp), "<=", m as f64)),
                _ => s.b.conclude(NamedCheck::exact("Index(Y1';M',N';Y2') <= Index(Y1;M,N;Y2)", idx(tp), "<=", idx(t))),
            };
        }
        Variant::T12c => {
            s.sum_not_larger()?;
            s.cap_not_smaller()?;
            s.cap_not_larger()?;
            s.sum_not_smaller()?;
            s.b.conclude(NamedCheck::exact("Index(Y1';M',N';Y2') == Index(Y1;M,N;Y2)", idx(tp), "==", idx(t)));
        }
        Variant::FiniteExtA | Variant::FiniteExtB => unreachable!(),
    }
    Ok(s.b.finish())
}

/// Finite extension `M ⊆ N` perturbed to `M′ ⊆ N′`; `v` is a complement of
/// `M` in `N` (the reference-orthogonal one when omitted). Part (a) bounds
/// `dim N′/M′` from above, part (b) from below.
pub fn verify_finite_extension(
    m: &Subspace,
    n: &Subspace,
    mp: &Subspace,
    np: &Subspace,
    v: Option<&Subspace>,
    part_a: bool,
    opts: &GapOptions,
) -> Result<StabilityVerdict> {
    m.same_space(mp)?;
    let mut b = VerdictBuilder::new(if part_a { "finite-ext-a" } else { "finite-ext-b" });
    let inner = m.is_within(n)?;
    let inner_p = mp.is_within(np)?;
    b.gate(NamedCheck::exact("M ⊆ N", inner as u8 as f64, "==", 1.0));
    b.gate(NamedCheck::exact("M' ⊆ N'", inner_p as u8 as f64, "==", 1.0));
    if !(inner && inner_p) {
        return Ok(b.finish());
    }
    let v = match v {
        Some(v) => {
            let (sum, cap) = m.sum_and_intersection(v)?;
            b.gate(NamedCheck::exact("M ∩ V == {0}", cap.dim() as f64, "==", 0.0));
            b.gate(NamedCheck::exact("M + V == N", sum.equals(n)? as u8 as f64, "==", 1.0));
            v.clone()
        }
        None => m.complement_in(n)?,
    };
    let mut g = GapMeter::new(opts);
    let (k, kp) = (n.dim() - m.dim(), np.dim() - mp.dim());
    if part_a {
        let dn = b.value("delta(N',N)", g.delta(np, n)?);
        let dm = b.value("delta(M,M')", g.delta(m, mp)?);
        let gv = b.value("gamma(M,V)", g.gamma(m, &v)?);
        let lhs = b.value("gate a", (1.0 + dn) * (1.0 + dm / gv));
        b.gate(NamedCheck::new("(1+delta(N',N))(1+delta(M,M')/gamma(M,V)) < 2", lhs, "<", 2.0.into()));
        b.conclude(NamedCheck::exact("dim N'/M' <= dim N/M", kp as f64, "<=", k as f64));
    } else {
        let d = b.value("delta(M',M)", g.delta(mp, m)?);
        let gv = b.value("gamma(V,M)", g.gamma(&v, m)?);
        let e = b.value("delta(N,N')", g.delta(n, np)?);
        ext_b_gates(&mut b, "ext", d, gv, e);
        b.conclude(NamedCheck::exact("dim N'/M' >= dim V", kp as f64, ">=", v.dim() as f64));
    }
    Ok(b.finish())
}

/// Outcome of the two-alternative search: a unit `u ∈ M` far from `N`, or
/// a unit `v ∈ N` far from `L`. Either or both may be found.
#[derive(Clone, Debug)]
pub struct TwoPointWitness {
    pub u: Option<(Vector, DistInterval)>,
    pub v: Option<(Vector, DistInterval)>,
    /// Set when neither alternative was certified at this budget. This is
    /// a budget failure, not a disproof.
    pub note: Option<String>,
}

impl TwoPointWitness {
    pub fn found(&self) -> bool {
        self.u.is_some() || self.v.is_some()
    }
}

/// For `L ⊊ M` and `(a+1)(b+1) < 2`, find `u ∈ S_M` with
/// `dist(u,N) > a` or `v ∈ S_N` with `dist(v,L) > b`.
pub fn two_point_witness(m: &Subspace, n: &Subspace, l: &Subspace, a: f64, b: f64, opts: &GapOptions) -> Result<TwoPointWitness> {
    m.same_space(n)?;
    m.same_space(l)?;
    if !(a > 0.0 && b > 0.0) {
        return Err(GapError::Precondition("a and b must be positive".into()));
    }
    if (a + 1.0) * (b + 1.0) >= 2.0 {
        return Err(GapError::Precondition("(a+1)(b+1) must be below 2".into()));
    }
    l.require_within(m, "L must lie in M")?;
    if l.dim() == m.dim() {
        return Err(GapError::Precondition("L must be a proper subspace of M".into()));
    }
    let mut g = GapMeter::new(opts);
    let eu = g.delta_extremal(m, n)?;
    let u = match eu.witness {
        Some(x) if eu.value.lo > a => Some((x.clone(), crate::normed::dist_to_subspace(&x, n)?)),
        _ => None,
    };
    let v = if n.dim() > 0 {
        let ev = g.delta_extremal(n, l)?;
        match ev.witness {
            Some(x) if ev.value.lo > b => Some((x.clone(), crate::normed::dist_to_subspace(&x, l)?)),
            _ => None,
        }
    } else {
        None
    };
    let note = if u.is_none() && v.is_none() { Some("witness not found at budget".to_string()) } else { None };
    Ok(TwoPointWitness { u, v, note })
}
