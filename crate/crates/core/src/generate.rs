//! Seeded random instances whose hypotheses hold by construction, with a
//! manifest of their ground-truth integers.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{GapError, Result};
use crate::family::Generator;
use crate::io::{cols_of, rows_of, BaseFile, FormFile, PathFile, Rows, SpaceFile};
use crate::linalg::{c, identity, Mat, C64};
use crate::normed::{Field, Norm};

pub const MAX_SIZE: usize = 64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, r: usize, cols: usize, complex: bool) -> Mat {
    Mat::from_fn(r, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = if complex { StandardNormal.sample(rng) } else { 0.0 };
        C64::new(re, im)
    })
}

/// Haar-distributed orthogonal (or unitary) matrix.
pub fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize, complex: bool) -> Mat {
    let qr = gaussian(rng, n, n, complex).qr();
    let (mut q, r) = (qr.q(), qr.r());
    // Fix the phases so the distribution is Haar.
    for j in 0..n {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let ph = d / c(d.norm());
            for i in 0..n {
                q[(i, j)] *= ph;
            }
        }
    }
    q
}

/// Invertible matrix with singular values in `[1, cond]`.
pub fn random_invertible(rng: &mut ChaCha8Rng, n: usize, cond: f64, complex: bool) -> Mat {
    let u = random_orthogonal(rng, n, complex);
    let v = random_orthogonal(rng, n, complex);
    let s = Mat::from_fn(n, n, |i, j| if i == j { c(1.0 + (cond - 1.0) * rng.random::<f64>()) } else { c(0.0) });
    u * s * v.adjoint()
}

/// `exp(S)` for a random skew-Hermitian `S` with `‖S‖₂ = angle`, so that
/// `‖R − I‖₂ ≤ angle`.
pub fn random_rotation(rng: &mut ChaCha8Rng, n: usize, angle: f64, complex: bool) -> Mat {
    let a = gaussian(rng, n, n, complex);
    let s = &a - a.adjoint();
    let norm = crate::linalg::spectral_norm(&s);
    if norm == 0.0 || angle == 0.0 {
        return identity(n);
    }
    (s * c(angle / norm)).exp()
}

/// Random Hermitian matrix with unit spectral norm.
pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize, complex: bool) -> Mat {
    let a = gaussian(rng, n, n, complex);
    let h = (&a + a.adjoint()) * c(0.5);
    let norm = crate::linalg::spectral_norm(&h);
    if norm == 0.0 {
        h
    } else {
        h * c(1.0 / norm)
    }
}

/// Dimensions of a nested tetrad `Y₁ ⊆ M∩N ⊆ M+N ⊆ Y₂` in `ℝⁿ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TetradDims {
    pub n: usize,
    pub y1: usize,
    pub cap: usize,
    /// `dim M − dim M∩N`.
    pub m_extra: usize,
    /// `dim N − dim M∩N`.
    pub n_extra: usize,
    pub y2: usize,
}

impl TetradDims {
    pub fn random(rng: &mut ChaCha8Rng, n: usize) -> TetradDims {
        // Skewed towards large members so most instances are not trivial.
        let y2 = rng.random_range(n / 2..=n);
        let sum = rng.random_range(y2 / 2..=y2);
        let cap = rng.random_range(0..=sum);
        let m_extra = rng.random_range(0..=sum - cap);
        let n_extra = sum - cap - m_extra;
        let y1 = rng.random_range(0..=cap);
        TetradDims { n, y1, cap, m_extra, n_extra, y2 }
    }

    pub fn sum(&self) -> usize {
        self.cap + self.m_extra + self.n_extra
    }

    pub fn index(&self) -> i64 {
        (self.cap - self.y1) as i64 - (self.y2 - self.sum()) as i64
    }
}

/// Bases `[Y₁, M, N, Y₂]` realizing `d`, as column blocks of a random
/// invertible matrix.
pub fn tetrad_bases(rng: &mut ChaCha8Rng, d: &TetradDims, complex: bool) -> [Mat; 4] {
    let w = random_invertible(rng, d.n, 4.0, complex);
    let block = |from: usize, len: usize| w.columns(from, len).into_owned();
    let cap = block(0, d.cap);
    let me = block(d.cap, d.m_extra);
    let ne = block(d.cap + d.m_extra, d.n_extra);
    let y2 = block(0, d.y2);
    let mix = random_invertible(rng, d.cap, 2.0, complex);
    let y1 = (&cap * mix).columns(0, d.y1).into_owned();
    let hcat = |a: &Mat, b: &Mat| {
        let mut m = Mat::zeros(d.n, a.ncols() + b.ncols());
        m.columns_mut(0, a.ncols()).copy_from(a);
        m.columns_mut(a.ncols(), b.ncols()).copy_from(b);
        m
    };
    [y1, hcat(&cap, &me), hcat(&cap, &ne), y2]
}

/// `(M, N, K)` with `(I+K)M ⊆ N`: `I+K = B_N G B_M⁺ + Z(I − B_M B_M⁺)`.
pub fn reldim_parts(rng: &mut ChaCha8Rng, n: usize, dm: usize, dn: usize, complex: bool) -> (Mat, Mat, Mat) {
    let bm = gaussian(rng, n, dm, complex);
    let bn = gaussian(rng, n, dn, complex);
    let g = gaussian(rng, dn, dm, complex);
    let z = gaussian(rng, n, n, complex);
    let pinv = crate::linalg::pinv(&bm, 1e-12);
    let proj = &bm * &pinv;
    let t = &bn * g * &pinv + z * (identity(n) - proj);
    (bm, bn, t - identity(n))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Pair,
    Tetrad,
    Reldim,
    Morse,
    Path,
}

impl std::str::FromStr for Kind {
    type Err = GapError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pair" => Ok(Kind::Pair),
            "tetrad" => Ok(Kind::Tetrad),
            "reldim" => Ok(Kind::Reldim),
            "morse" => Ok(Kind::Morse),
            "path" => Ok(Kind::Path),
            o => Err(GapError::Input(format!("unknown instance kind '{o}'"))),
        }
    }
}

/// A generated instance: the problem files and the manifest.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Instance {
    pub kind: Kind,
    pub seed: u64,
    pub size: usize,
    pub space: SpaceFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<Rows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<FormFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<FormFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathFile>,
    pub manifest: BTreeMap<String, Value>,
}

impl Instance {
    /// File names and contents, in a fixed order.
    pub fn files(&self) -> Result<Vec<(String, String)>> {
        let mut out = vec![("space.json".to_string(), crate::io::to_json(&self.space)?)];
        if let Some(k) = &self.k {
            out.push(("k.json".into(), crate::io::to_json(k)?));
        }
        if let Some(q) = &self.q {
            out.push(("q.json".into(), crate::io::to_json(q)?));
        }
        if let Some(r) = &self.r {
            out.push(("r.json".into(), crate::io::to_json(r)?));
        }
        if let Some(p) = &self.path {
            out.push(("path.json".into(), crate::io::to_json(p)?));
        }
        let manifest = json!({ "kind": self.kind, "seed": self.seed, "size": self.size, "truth": self.manifest });
        out.push(("manifest.json".into(), crate::io::to_json(&manifest)?));
        Ok(out)
    }
}

fn real_space(n: usize, subspaces: BTreeMap<String, Rows>) -> SpaceFile {
    SpaceFile { dim: n, field: Field::Real, norm: Norm::l2(), subspaces }
}

fn tetrad_space(rng: &mut ChaCha8Rng, d: &TetradDims) -> SpaceFile {
    let [y1, m, n, y2] = tetrad_bases(rng, d, false);
    let subspaces = [("Y1", y1), ("M", m), ("N", n), ("Y2", y2)].into_iter().map(|(k, v)| (k.to_string(), cols_of(&v))).collect();
    real_space(d.n, subspaces)
}

fn tetrad_manifest(d: &TetradDims) -> BTreeMap<String, Value> {
    BTreeMap::from([
        ("dims".to_string(), json!(d)),
        ("dim_cap".to_string(), json!(d.cap)),
        ("dim_sum".to_string(), json!(d.sum())),
        ("index".to_string(), json!(d.index())),
    ])
}

/// Random generator for a path in dimension `n ≥ 2`.
pub fn random_generator(rng: &mut ChaCha8Rng, n: usize) -> Generator {
    let pick_pair = |rng: &mut ChaCha8Rng| {
        let i = rng.random_range(0..n);
        let j = (i + rng.random_range(1..n)) % n;
        (i, j)
    };
    let one = |rng: &mut ChaCha8Rng| {
        let (i, j) = pick_pair(rng);
        if rng.random::<bool>() {
            Generator::Rotation { plane: [i, j], rate: rng.random_range(-3.0..3.0) }
        } else {
            Generator::Shear { from: i, to: j, rate: rng.random_range(-2.0..2.0) }
        }
    };
    match rng.random_range(0..3) {
        0 | 1 => one(rng),
        _ => {
            let k = rng.random_range(2..=3);
            Generator::Composite { parts: (0..k).map(|_| one(rng)).collect() }
        }
    }
}

/// Instance of `kind` in dimension `size`.
pub fn generate(kind: Kind, seed: u64, size: usize) -> Result<Instance> {
    if size == 0 || size > MAX_SIZE {
        return Err(GapError::Input(format!("unsupported size {size}: must lie in 1..={MAX_SIZE}")));
    }
    if kind == Kind::Path && size < 2 {
        return Err(GapError::Input("unsupported size 1 for a path: need at least 2".into()));
    }
    let mut rng = rng(seed ^ (kind as u64).wrapping_mul(0x9e37_79b9));
    let n = size;
    let mut inst = Instance {
        kind,
        seed,
        size,
        space: real_space(n, BTreeMap::new()),
        k: None,
        q: None,
        r: None,
        path: None,
        manifest: BTreeMap::new(),
    };
    match kind {
        Kind::Pair | Kind::Tetrad => {
            let mut d = TetradDims::random(&mut rng, n);
            if kind == Kind::Pair {
                d.y1 = 0;
                d.y2 = n;
            }
            let mut space = tetrad_space(&mut rng, &d);
            if kind == Kind::Pair {
                space.subspaces.retain(|k, _| k == "M" || k == "N");
            }
            inst.space = space;
            inst.manifest = tetrad_manifest(&d);
        }
        Kind::Reldim => {
            let dm = rng.random_range(0..=n);
            let dn = rng.random_range(0..=n);
            let (bm, bn, k) = reldim_parts(&mut rng, n, dm, dn, false);
            inst.space = real_space(n, BTreeMap::from([("M".to_string(), cols_of(&bm)), ("N".to_string(), cols_of(&bn))]));
            inst.k = Some(rows_of(&k));
            inst.manifest = BTreeMap::from([("relative_dim".to_string(), json!(dm as i64 - dn as i64))]);
        }
        Kind::Morse => {
            let k = rng.random_range(1..=n);
            let p = rng.random_range(0..=k);
            let m = rng.random_range(0..=k - p);
            let z = k - p - m;
            let diag: Vec<f64> = (0..k)
                .map(|i| {
                    let mag = rng.random_range(0.5..2.0);
                    if i < p {
                        mag
                    } else if i < p + m {
                        -mag
                    } else {
                        0.0
                    }
                })
                .collect();
            let t = random_invertible(&mut rng, k, 3.0, false);
            let d = DMatrix::from_fn(k, k, |i, j| if i == j { c(diag[i]) } else { c(0.0) });
            let g = t.adjoint() * d * &t;
            let g = (&g + g.adjoint()) * c(0.5);
            let bv = gaussian(&mut rng, n, k, false);
            let rot = random_rotation(&mut rng, n, 1e-4, false);
            let bw = &rot * &bv;
            let gr = &g + random_hermitian(&mut rng, k, false) * c(1e-4);
            inst.space = real_space(n, BTreeMap::from([("V".to_string(), cols_of(&bv)), ("W".to_string(), cols_of(&bw))]));
            inst.q = Some(FormFile { subspace: "V".into(), gram: rows_of(&g) });
            inst.r = Some(FormFile { subspace: "W".into(), gram: rows_of(&gr) });
            inst.manifest = BTreeMap::from([
                ("m_plus".to_string(), json!(p)),
                ("m_minus".to_string(), json!(m)),
                ("m_zero".to_string(), json!(z)),
                ("dim_v".to_string(), json!(k)),
            ]);
        }
        Kind::Path => {
            let d = TetradDims::random(&mut rng, n);
            let space = tetrad_space(&mut rng, &d);
            let generator = random_generator(&mut rng, n);
            let steps = rng.random_range(20..=60);
            inst.path = Some(PathFile {
                space: space.clone(),
                generator,
                steps,
                t_range: [0.0, 1.0],
                base: BaseFile::Tetrad { tetrad: ["Y1".into(), "M".into(), "N".into(), "Y2".into()] },
            });
            inst.space = space;
            inst.manifest = tetrad_manifest(&d);
        }
    }
    Ok(inst)
}
