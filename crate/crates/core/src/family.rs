//! One-parameter families: a base tetrad or perturbation triple moved by a
//! continuous path of invertible maps `G(t)`, with the index tracked along
//! a grid on `[t₀, t₁]`.
//!
//! The tetrad index and the relative dimension are constant along
//! continuous families, so the trace must be constant. A change between two
//! grid points is bisected down to `1e-6` and re-evaluated under several
//! rank tolerances before it is reported.

use serde::{Deserialize, Serialize};

use crate::error::{GapError, Result};
use crate::gap::ref_delta2;
use crate::linalg::{c, identity, Mat, DEFAULT_RANK_TOL};
use crate::normed::Subspace;
use crate::reldim::{relative_dim, PerturbationOperator};
use crate::tetrad::{ExtInt, Tetrad};

/// Generator of the path `t ↦ G(t)`, with `G(0) = I`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Generator {
    /// Rotation by angle `rate·t` in the coordinate plane `(i, j)`.
    Rotation { plane: [usize; 2], rate: f64 },
    /// `I + rate·t·e_to e_fromᵀ`.
    Shear { from: usize, to: usize, rate: f64 },
    /// Product `G₁(t) G₂(t) ⋯`.
    Composite { parts: Vec<Generator> },
}

impl Generator {
    pub fn matrix(&self, n: usize, t: f64) -> Result<Mat> {
        match self {
            Generator::Rotation { plane: [i, j], rate } => {
                if i == j || *i >= n || *j >= n {
                    return Err(GapError::Input(format!("rotation plane ({i}, {j}) invalid in dimension {n}")));
                }
                let (s, co) = (rate * t).sin_cos();
                let mut g = identity(n);
                g[(*i, *i)] = c(co);
                g[(*j, *j)] = c(co);
                g[(*i, *j)] = c(-s);
                g[(*j, *i)] = c(s);
                Ok(g)
            }
            Generator::Shear { from, to, rate } => {
                if from == to || *from >= n || *to >= n {
                    return Err(GapError::Input(format!("shear ({from} -> {to}) invalid in dimension {n}")));
                }
                let mut g = identity(n);
                g[(*to, *from)] = c(rate * t);
                Ok(g)
            }
            Generator::Composite { parts } => {
                let mut g = identity(n);
                for p in parts {
                    g *= p.matrix(n, t)?;
                }
                Ok(g)
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PathPlan {
    pub generator: Generator,
    pub steps: usize,
    #[serde(default = "unit_range")]
    pub t_range: [f64; 2],
}

fn unit_range() -> [f64; 2] {
    [0.0, 1.0]
}

/// What moves along the path.
#[derive(Clone, Debug)]
pub enum FamilyBase {
    Tetrad(Tetrad),
    /// `(M, N, K)` with `(I+K)M ⊆ N`; `K(t) = G(I+K)G⁻¹ − I`.
    Triple { m: Subspace, n: Subspace, k: Mat },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceKind {
    TetradIndex,
    RelativeDim,
}

impl std::fmt::Display for TraceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TraceKind::TetradIndex => "tetrad-index",
            TraceKind::RelativeDim => "relative-dim",
        })
    }
}

impl std::str::FromStr for TraceKind {
    type Err = GapError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tetrad-index" => Ok(TraceKind::TetradIndex),
            "relative-dim" => Ok(TraceKind::RelativeDim),
            o => Err(GapError::Input(format!("unknown trace kind '{o}'"))),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TracePoint {
    pub t: f64,
    pub value: ExtInt,
    /// Upper bound for `δ̂` between the moving subspaces at this and the
    /// next grid point (max over the members); absent at the last point.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub increment: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Jump {
    /// Bracket `[t_lo, t_hi]` of width at most `1e-6`.
    pub t_lo: f64,
    pub t_hi: f64,
    pub before: ExtInt,
    pub after: ExtInt,
    /// Some rank tolerance gives equal values at both ends.
    pub tolerance_incident: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Continuity {
    pub max_increment: f64,
    pub max_increment_half_step: f64,
    /// `max_increment / max_increment_half_step`, near 2 for a Lipschitz path.
    pub ratio: Option<f64>,
    /// The ratio lies in `[2/2.5, 2·2.5]`, or both increments are at
    /// rounding level.
    pub passes: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Trace {
    pub kind: TraceKind,
    pub points: Vec<TracePoint>,
    pub constant: bool,
    pub jumps: Vec<Jump>,
    pub continuity: Continuity,
}

const BISECT_TOL: f64 = 1e-6;
const NOISE: f64 = 1e-10;

struct Walker<'a> {
    gen: &'a Generator,
    base: &'a FamilyBase,
    kind: TraceKind,
    n: usize,
}

impl Walker<'_> {
    fn members(&self, t: f64, tol: f64) -> Result<Vec<Subspace>> {
        let g = self.gen.matrix(self.n, t)?;
        let img = |s: &Subspace| s.clone().with_rank_tol(tol).image(&g);
        match self.base {
            FamilyBase::Tetrad(tt) => Ok(vec![img(tt.y1())?, img(tt.m())?, img(tt.n())?, img(tt.y2())?]),
            FamilyBase::Triple { m, n, .. } => Ok(vec![img(m)?, img(n)?]),
        }
    }

    fn value_with_tol(&self, t: f64, tol: f64) -> Result<ExtInt> {
        let path_err = |e: GapError| GapError::Path { t, msg: e.to_string() };
        let ms = self.members(t, tol)?;
        match (self.kind, self.base) {
            (TraceKind::TetradIndex, FamilyBase::Tetrad(_)) => {
                let mut it = ms.into_iter();
                let (y1, m, n, y2) = (it.next().unwrap(), it.next().unwrap(), it.next().unwrap(), it.next().unwrap());
                Ok(Tetrad::new(y1, m, n, y2).map_err(path_err)?.index())
            }
            (TraceKind::TetradIndex, FamilyBase::Triple { .. }) => {
                let t = Tetrad::from_pair(ms[0].clone(), ms[1].clone()).map_err(path_err)?;
                Ok(t.index())
            }
            (TraceKind::RelativeDim, FamilyBase::Triple { k, .. }) => {
                let g = self.gen.matrix(self.n, t)?;
                let gi = g.clone().try_inverse().ok_or_else(|| GapError::Path { t, msg: "G(t) is singular".into() })?;
                let kt = &g * (identity(self.n) + k) * gi - identity(self.n);
                let op = PerturbationOperator::new(ms[0].space(), kt).map_err(path_err)?;
                Ok(relative_dim(&ms[0], &ms[1], &op).map_err(path_err)?.value)
            }
            (TraceKind::RelativeDim, FamilyBase::Tetrad(_)) => {
                Err(GapError::Input("relative-dim traces need an (M, N, K) base".into()))
            }
        }
    }

    fn value(&self, t: f64) -> Result<ExtInt> {
        self.value_with_tol(t, DEFAULT_RANK_TOL)
    }

    /// Upper bound for the largest `δ̂` between corresponding members.
    fn increment(&self, a: &[Subspace], b: &[Subspace]) -> f64 {
        let kappa = a.first().map(|s| s.space().kappa()).unwrap_or(1.0);
        a.iter()
            .zip(b)
            .map(|(x, y)| ref_delta2(x.ref_basis(), y.ref_basis()).max(ref_delta2(y.ref_basis(), x.ref_basis())))
            .fold(0.0, f64::max)
            * kappa
    }

    fn grid(&self, range: [f64; 2], steps: usize) -> Vec<f64> {
        (0..=steps).map(|i| range[0] + (range[1] - range[0]) * i as f64 / steps as f64).collect()
    }

    fn max_increment(&self, range: [f64; 2], steps: usize) -> Result<f64> {
        let ts = self.grid(range, steps);
        let mut prev = self.members(ts[0], DEFAULT_RANK_TOL)?;
        let mut m = 0.0_f64;
        for &t in &ts[1..] {
            let cur = self.members(t, DEFAULT_RANK_TOL)?;
            m = m.max(self.increment(&prev, &cur));
            prev = cur;
        }
        Ok(m)
    }

    fn bisect(&self, mut lo: f64, mut hi: f64, before: ExtInt, mut after: ExtInt) -> Result<Jump> {
        while hi - lo > BISECT_TOL {
            let mid = 0.5 * (lo + hi);
            let v = self.value(mid)?;
            if v == before {
                lo = mid;
            } else {
                hi = mid;
                after = v;
            }
        }
        let mut tolerance_incident = false;
        for tol in [1e-12, 1e-10, 1e-8, 1e-6] {
            if self.value_with_tol(lo, tol)? == self.value_with_tol(hi, tol)? {
                tolerance_incident = true;
                break;
            }
        }
        Ok(Jump { t_lo: lo, t_hi: hi, before, after, tolerance_incident })
    }
}

/// Evaluates the trace over `steps + 1` grid points and checks constancy
/// and step-halving continuity.
pub fn walk_family(plan: &PathPlan, base: &FamilyBase, kind: TraceKind) -> Result<Trace> {
    if plan.steps < 2 {
        return Err(GapError::Input(format!("steps must be at least 2, got {}", plan.steps)));
    }
    let [t0, t1] = plan.t_range;
    if !(t0.is_finite() && t1.is_finite() && t0 < t1) {
        return Err(GapError::Input(format!("invalid t_range [{t0}, {t1}]")));
    }
    let n = match base {
        FamilyBase::Tetrad(t) => t.m().ambient_dim(),
        FamilyBase::Triple { m, n, k } => {
            m.same_space(n)?;
            if k.shape() != (m.ambient_dim(), m.ambient_dim()) {
                return Err(GapError::DimensionMismatch("K must be a square ambient operator".into()));
            }
            m.ambient_dim()
        }
    };
    let w = Walker { gen: &plan.generator, base, kind, n };
    let ts = w.grid(plan.t_range, plan.steps);
    let mut points = Vec::with_capacity(ts.len());
    let mut prev_members = w.members(ts[0], DEFAULT_RANK_TOL)?;
    let mut jumps = Vec::new();
    let mut prev_value = w.value(ts[0])?;
    points.push(TracePoint { t: ts[0], value: prev_value, increment: None });
    for i in 1..ts.len() {
        let t = ts[i];
        let members = w.members(t, DEFAULT_RANK_TOL)?;
        points[i - 1].increment = Some(w.increment(&prev_members, &members));
        let v = w.value(t)?;
        if v != prev_value {
            jumps.push(w.bisect(ts[i - 1], t, prev_value, v)?);
        }
        points.push(TracePoint { t, value: v, increment: None });
        prev_members = members;
        prev_value = v;
    }
    let constant = points.iter().all(|p| p.value == points[0].value);
    let max_inc = points.iter().filter_map(|p| p.increment).fold(0.0, f64::max);
    let half = w.max_increment(plan.t_range, 2 * plan.steps)?;
    let ratio = if half > 0.0 { Some(max_inc / half) } else { None };
    let passes = (max_inc <= NOISE && half <= NOISE) || ratio.is_some_and(|r| (2.0 / 2.5..=2.0 * 2.5).contains(&r));
    Ok(Trace {
        kind,
        points,
        constant,
        jumps,
        continuity: Continuity { max_increment: max_inc, max_increment_half_step: half, ratio, passes },
    })
}
