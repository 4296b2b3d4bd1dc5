use serde::{Deserialize, Serialize};

use crate::error::{GapError, Result};
use crate::linalg::{c, Mat, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

/// Exponent of an ℓᵖ norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    One,
    Two,
    Inf,
    /// Finite `p > 1`, `p != 2`.
    P(f64),
}

impl Exponent {
    pub fn from_p(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(GapError::InvalidNorm(format!("exponent p = {p} must be >= 1")));
        }
        Ok(if p == 1.0 {
            Exponent::One
        } else if p == 2.0 {
            Exponent::Two
        } else if p.is_infinite() {
            Exponent::Inf
        } else {
            Exponent::P(p)
        })
    }

    pub fn p(&self) -> f64 {
        match *self {
            Exponent::One => 1.0,
            Exponent::Two => 2.0,
            Exponent::Inf => f64::INFINITY,
            Exponent::P(p) => p,
        }
    }

    /// Conjugate exponent `q` with `1/p + 1/q = 1`.
    pub fn dual(&self) -> Exponent {
        match *self {
            Exponent::One => Exponent::Inf,
            Exponent::Inf => Exponent::One,
            Exponent::Two => Exponent::Two,
            Exponent::P(p) => Exponent::from_p(p / (p - 1.0)).expect("conjugate exponent"),
        }
    }

    /// ℓᵖ norm of a coefficient-free vector of moduli.
    pub fn norm_abs(&self, a: impl Iterator<Item = f64>) -> f64 {
        match *self {
            Exponent::One => a.sum(),
            Exponent::Two => a.map(|x| x * x).sum::<f64>().sqrt(),
            Exponent::Inf => a.fold(0.0, f64::max),
            Exponent::P(p) => {
                let v: Vec<f64> = a.collect();
                let m = v.iter().cloned().fold(0.0, f64::max);
                if m == 0.0 {
                    return 0.0;
                }
                m * v.iter().map(|x| (x / m).powf(p)).sum::<f64>().powf(1.0 / p)
            }
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Inf => s.serialize_str("inf"),
            other => s.serialize_f64(other.p()),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let p = crate::interval::ext_f64::deserialize(d)?;
        Exponent::from_p(p).map_err(serde::de::Error::custom)
    }
}

/// Weighted ℓᵖ norm `(Σ wᵢ |xᵢ|ᵖ)^{1/p}`, or `max wᵢ |xᵢ|` for `p = ∞`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Norm {
    pub p: Exponent,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

impl Norm {
    pub fn lp(p: f64) -> Result<Self> {
        Ok(Norm { p: Exponent::from_p(p)?, weights: None })
    }

    pub fn l2() -> Self {
        Norm { p: Exponent::Two, weights: None }
    }
}

/// A finite-dimensional real or complex space with a weighted ℓᵖ norm.
///
/// Internally every vector is mapped to reference coordinates `y = D x`,
/// where `D` is diagonal and `||x|| = ||y||_p` is an unweighted ℓᵖ norm. The
/// Euclidean structure of reference coordinates is what "orthonormal" and
/// "orthogonal complement" refer to throughout the crate.
#[derive(Clone, Debug, PartialEq)]
pub struct NormedSpace {
    dim: usize,
    field: Field,
    norm: Norm,
    scale: Vec<f64>,
}

impl NormedSpace {
    pub fn new(dim: usize, field: Field, norm: Norm) -> Result<Self> {
        if dim == 0 {
            return Err(GapError::Input("space dimension must be positive".into()));
        }
        let scale = match &norm.weights {
            None => vec![1.0; dim],
            Some(w) => {
                if w.len() != dim {
                    return Err(GapError::InvalidNorm(format!(
                        "{} weights given for dimension {dim}",
                        w.len()
                    )));
                }
                if w.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
                    return Err(GapError::InvalidNorm("weights must be positive and finite".into()));
                }
                match norm.p {
                    Exponent::Inf => w.clone(),
                    e => w.iter().map(|x| x.powf(1.0 / e.p())).collect(),
                }
            }
        };
        Ok(NormedSpace { dim, field, norm, scale })
    }

    pub fn euclidean(dim: usize) -> Self {
        Self::new(dim, Field::Real, Norm::l2()).expect("valid euclidean space")
    }

    pub fn real_lp(dim: usize, p: f64) -> Result<Self> {
        Self::new(dim, Field::Real, Norm::lp(p)?)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn norm(&self) -> &Norm {
        &self.norm
    }

    pub fn exponent(&self) -> Exponent {
        self.norm.p
    }

    pub fn is_l2(&self) -> bool {
        self.norm.p == Exponent::Two
    }

    pub fn is_real(&self) -> bool {
        self.field == Field::Real
    }

    /// Real degrees of freedom of a `k`-dimensional coefficient vector.
    pub fn dof(&self, k: usize) -> usize {
        match self.field {
            Field::Real => k,
            Field::Complex => 2 * k,
        }
    }

    pub fn norm_of(&self, x: &Vector) -> f64 {
        self.ref_norm(&self.to_ref(x))
    }

    /// Unweighted ℓᵖ norm in reference coordinates.
    pub fn ref_norm(&self, y: &Vector) -> f64 {
        self.norm.p.norm_abs(y.iter().map(|z| z.norm()))
    }

    /// Dual norm in reference coordinates.
    pub fn ref_dual_norm(&self, f: &Vector) -> f64 {
        self.norm.p.dual().norm_abs(f.iter().map(|z| z.norm()))
    }

    pub fn to_ref(&self, x: &Vector) -> Vector {
        Vector::from_iterator(self.dim, x.iter().zip(&self.scale).map(|(z, s)| z * s))
    }

    pub fn from_ref(&self, y: &Vector) -> Vector {
        Vector::from_iterator(self.dim, y.iter().zip(&self.scale).map(|(z, s)| z / s))
    }

    pub fn mat_to_ref(&self, a: &Mat) -> Mat {
        let mut out = a.clone();
        for (i, s) in self.scale.iter().enumerate() {
            out.row_mut(i).scale_mut(*s);
        }
        out
    }

    pub fn mat_from_ref(&self, a: &Mat) -> Mat {
        let mut out = a.clone();
        for (i, s) in self.scale.iter().enumerate() {
            out.row_mut(i).scale_mut(1.0 / s);
        }
        out
    }

    /// Conjugate an ambient operator into reference coordinates: `D A D⁻¹`.
    pub fn op_to_ref(&self, a: &Mat) -> Mat {
        Mat::from_fn(self.dim, self.dim, |i, j| a[(i, j)] * c(self.scale[i] / self.scale[j]))
    }

    pub fn op_from_ref(&self, a: &Mat) -> Mat {
        Mat::from_fn(self.dim, self.dim, |i, j| a[(i, j)] * c(self.scale[j] / self.scale[i]))
    }

    /// Constants with `c1 ||y||_2 <= ||y||_p <= c2 ||y||_2` in reference
    /// coordinates.
    pub fn equivalence(&self) -> (f64, f64) {
        let n = self.dim as f64;
        let p = self.norm.p.p();
        let e = if p.is_infinite() { -0.5 } else { 1.0 / p - 0.5 };
        if e >= 0.0 {
            (1.0, n.powf(e))
        } else {
            (n.powf(e), 1.0)
        }
    }

    /// `n^{|1/2 - 1/p|}`, the ratio `c2 / c1`.
    pub fn kappa(&self) -> f64 {
        let (c1, c2) = self.equivalence();
        c2 / c1
    }

    /// The dual space: conjugate exponent, reciprocal reference scaling, so
    /// that the annihilator of a subspace is its reference-orthogonal
    /// complement.
    pub fn dual(&self) -> NormedSpace {
        let q = self.norm.p.dual();
        let weights = if self.scale.iter().all(|&s| s == 1.0) {
            None
        } else {
            Some(match q {
                Exponent::Inf => self.scale.iter().map(|s| 1.0 / s).collect(),
                e => self.scale.iter().map(|s| s.powf(-e.p())).collect(),
            })
        };
        NormedSpace::new(self.dim, self.field, Norm { p: q, weights }).expect("dual space")
    }
}
