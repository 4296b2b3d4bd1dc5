//! JSON problem files.
//!
//! A space file is
//! `{"dim": n, "field": "real"|"complex", "norm": {"p": p, "weights": [...]}, "subspaces": {"NAME": [[col], ...]}}`
//! with each subspace given by its spanning columns. Scalars are numbers or
//! `[re, im]` pairs. Operators and Gram matrices are lists of rows.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{GapError, Result};
use crate::family::{FamilyBase, Generator, PathPlan};
use crate::linalg::{Mat, C64};
use crate::morse::SymmetricPair;
use crate::normed::{Field, Norm, NormedSpace, Subspace};
use crate::tetrad::Tetrad;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Real(f64),
    Complex([f64; 2]),
}

impl From<Scalar> for C64 {
    fn from(s: Scalar) -> C64 {
        match s {
            Scalar::Real(x) => C64::new(x, 0.0),
            Scalar::Complex([re, im]) => C64::new(re, im),
        }
    }
}

impl Scalar {
    /// Plain number when the imaginary part is zero.
    pub fn of(z: C64) -> Scalar {
        if z.im == 0.0 {
            Scalar::Real(z.re)
        } else {
            Scalar::Complex([z.re, z.im])
        }
    }
}

pub type Rows = Vec<Vec<Scalar>>;

/// Matrix from a list of rows.
pub fn mat_from_rows(rows: &Rows) -> Result<Mat> {
    let r = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != cols) {
        return Err(GapError::Input("ragged matrix rows".into()));
    }
    Ok(Mat::from_fn(r, cols, |i, j| rows[i][j].into()))
}

/// Matrix whose columns are the given lists.
pub fn mat_from_cols(n: usize, cols: &Rows) -> Result<Mat> {
    if cols.iter().any(|c| c.len() != n) {
        return Err(GapError::DimensionMismatch(format!("subspace columns must have length {n}")));
    }
    Ok(Mat::from_fn(n, cols.len(), |i, j| cols[j][i].into()))
}

pub fn rows_of(m: &Mat) -> Rows {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| Scalar::of(m[(i, j)])).collect()).collect()
}

pub fn cols_of(m: &Mat) -> Rows {
    (0..m.ncols()).map(|j| (0..m.nrows()).map(|i| Scalar::of(m[(i, j)])).collect()).collect()
}

fn default_field() -> Field {
    Field::Real
}

fn default_norm() -> Norm {
    Norm::l2()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpaceFile {
    pub dim: usize,
    #[serde(default = "default_field")]
    pub field: Field,
    #[serde(default = "default_norm")]
    pub norm: Norm,
    #[serde(default)]
    pub subspaces: BTreeMap<String, Rows>,
}

/// A parsed space file.
#[derive(Clone, Debug)]
pub struct Workspace {
    pub space: Arc<NormedSpace>,
    pub subspaces: BTreeMap<String, Subspace>,
}

impl Workspace {
    pub fn from_file(f: &SpaceFile) -> Result<Workspace> {
        let space = Arc::new(NormedSpace::new(f.dim, f.field, f.norm.clone())?);
        let mut subspaces = BTreeMap::new();
        for (name, cols) in &f.subspaces {
            let b = mat_from_cols(f.dim, cols)?;
            if f.field == Field::Real && b.iter().any(|z| z.im != 0.0) {
                return Err(GapError::Input(format!("subspace '{name}' has complex entries in a real space")));
            }
            let s = if b.ncols() == 0 { Subspace::zero(&space) } else { Subspace::span(&space, &b)? };
            subspaces.insert(name.clone(), s);
        }
        Ok(Workspace { space, subspaces })
    }

    pub fn load(path: &Path) -> Result<Workspace> {
        Self::from_file(&read_json(path)?)
    }

    /// A named subspace. `"0"` and `"X"` denote `{0}` and the whole space
    /// unless the file defines them.
    pub fn get(&self, name: &str) -> Result<Subspace> {
        if let Some(s) = self.subspaces.get(name) {
            return Ok(s.clone());
        }
        match name {
            "0" => Ok(Subspace::zero(&self.space)),
            "X" => Ok(Subspace::whole(&self.space)),
            _ => Err(GapError::Input(format!("unknown subspace '{name}'"))),
        }
    }

    /// Comma-separated names.
    pub fn get_list(&self, names: &str) -> Result<Vec<Subspace>> {
        names.split(',').map(|n| self.get(n.trim())).collect()
    }

    pub fn tetrad(&self, names: &str) -> Result<Tetrad> {
        let v = self.get_list(names)?;
        match <[Subspace; 4]>::try_from(v) {
            Ok([y1, m, n, y2]) => Tetrad::new(y1, m, n, y2),
            Err(v) => Err(GapError::Input(format!("a tetrad needs 4 names Y1,M,N,Y2, got {}", v.len()))),
        }
    }

    /// Square ambient operator.
    pub fn operator(&self, rows: &Rows) -> Result<Mat> {
        let k = mat_from_rows(rows)?;
        let n = self.space.dim();
        if k.shape() != (n, n) {
            return Err(GapError::DimensionMismatch(format!("operator must be {n}x{n}, got {}x{}", k.nrows(), k.ncols())));
        }
        Ok(k)
    }
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

/// A form file: `{"subspace": NAME, "gram": [[...]]}`, Gram matrix in the
/// basis of the named subspace as written in the space file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FormFile {
    pub subspace: String,
    pub gram: Rows,
}

/// An operator file: either a bare list of rows or `{"k": rows}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OperatorFile {
    Wrapped { k: Rows },
    Bare(Rows),
}

impl OperatorFile {
    pub fn rows(&self) -> &Rows {
        match self {
            OperatorFile::Wrapped { k } | OperatorFile::Bare(k) => k,
        }
    }
}

/// The pair `(Q, V)` of a form file. The Gram matrix refers to the columns
/// listed for `V` in the space file.
pub fn load_form(ws: &Workspace, file: &SpaceFile, form: &FormFile) -> Result<SymmetricPair> {
    let cols = match file.subspaces.get(&form.subspace) {
        Some(c) => c,
        None if form.subspace == "X" => {
            let g = mat_from_rows(&form.gram)?;
            return SymmetricPair::on(&Subspace::whole(&ws.space), g);
        }
        None => return Err(GapError::Input(format!("unknown subspace '{}'", form.subspace))),
    };
    let basis = mat_from_cols(file.dim, cols)?;
    SymmetricPair::new(&ws.space, basis, mat_from_rows(&form.gram)?)
}

/// Base of a family walk.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BaseFile {
    /// Names `[Y1, M, N, Y2]`.
    Tetrad { tetrad: [String; 4] },
    /// `K` defaults to a synthesized perturbation with `(I+K)M ⊆ N`.
    Triple {
        m: String,
        n: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k: Option<Rows>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PathFile {
    pub space: SpaceFile,
    pub generator: Generator,
    pub steps: usize,
    #[serde(default = "unit_range")]
    pub t_range: [f64; 2],
    pub base: BaseFile,
}

fn unit_range() -> [f64; 2] {
    [0.0, 1.0]
}

impl PathFile {
    pub fn resolve(&self) -> Result<(PathPlan, FamilyBase)> {
        let ws = Workspace::from_file(&self.space)?;
        let base = match &self.base {
            BaseFile::Tetrad { tetrad } => FamilyBase::Tetrad(ws.tetrad(&tetrad.join(","))?),
            BaseFile::Triple { m, n, k } => {
                let (m, n) = (ws.get(m)?, ws.get(n)?);
                let k = match k {
                    Some(rows) => ws.operator(rows)?,
                    None => crate::reldim::synthesize_perturbation(&m, &n)?.k,
                };
                FamilyBase::Triple { m, n, k }
            }
        };
        let plan = PathPlan { generator: self.generator.clone(), steps: self.steps, t_range: self.t_range };
        Ok((plan, base))
    }
}
