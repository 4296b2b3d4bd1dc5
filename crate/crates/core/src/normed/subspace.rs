use std::sync::Arc;

use super::space::{Field, NormedSpace};
use crate::error::{GapError, Result};
use crate::linalg::{self, hstack, is_real_mat, numerical_rank, orth, svd, Mat, Vector, DEFAULT_RANK_TOL};

/// A linear subspace of a [`NormedSpace`].
///
/// Stored as an orthonormal basis in reference coordinates. All dimension
/// counts involving a subspace are decided by its `rank_tol`, a relative
/// singular-value threshold.
#[derive(Clone, Debug)]
pub struct Subspace {
    space: Arc<NormedSpace>,
    q: Mat,
    rank_tol: f64,
}

impl Subspace {
    /// Subspace spanned by the columns of `basis` (ambient coordinates).
    /// The columns must be linearly independent.
    pub fn new(space: &Arc<NormedSpace>, basis: Mat) -> Result<Self> {
        Self::new_with_tol(space, basis, DEFAULT_RANK_TOL)
    }

    pub fn new_with_tol(space: &Arc<NormedSpace>, basis: Mat, rank_tol: f64) -> Result<Self> {
        check_shape(space, &basis)?;
        let y = space.mat_to_ref(&basis);
        let d = svd(&y);
        let r = numerical_rank(&d.s, rank_tol);
        if r < basis.ncols() {
            return Err(GapError::RankDeficient { rank: r, cols: basis.ncols() });
        }
        Ok(Subspace { space: space.clone(), q: d.u.columns(0, r).into_owned(), rank_tol })
    }

    /// Span of an arbitrary generating set.
    pub fn span(space: &Arc<NormedSpace>, gens: &Mat) -> Result<Self> {
        check_shape(space, gens)?;
        Ok(Self::from_ref(space, &space.mat_to_ref(gens), DEFAULT_RANK_TOL))
    }

    /// Span of reference-coordinate generators.
    pub(crate) fn from_ref(space: &Arc<NormedSpace>, gens: &Mat, rank_tol: f64) -> Self {
        let q = if gens.ncols() == 0 { Mat::zeros(space.dim(), 0) } else { orth(gens, rank_tol) };
        Subspace { space: space.clone(), q, rank_tol }
    }

    /// Wrap a reference basis that is already orthonormal.
    pub(crate) fn from_orthonormal(space: &Arc<NormedSpace>, q: Mat, rank_tol: f64) -> Self {
        Subspace { space: space.clone(), q, rank_tol }
    }

    pub fn zero(space: &Arc<NormedSpace>) -> Self {
        Subspace { space: space.clone(), q: Mat::zeros(space.dim(), 0), rank_tol: DEFAULT_RANK_TOL }
    }

    pub fn whole(space: &Arc<NormedSpace>) -> Self {
        Subspace { space: space.clone(), q: linalg::identity(space.dim()), rank_tol: DEFAULT_RANK_TOL }
    }

    pub fn with_rank_tol(mut self, tol: f64) -> Self {
        self.rank_tol = tol;
        self
    }

    pub fn dim(&self) -> usize {
        self.q.ncols()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn space(&self) -> &Arc<NormedSpace> {
        &self.space
    }

    pub fn ambient_dim(&self) -> usize {
        self.space.dim()
    }

    pub fn rank_tol(&self) -> f64 {
        self.rank_tol
    }

    /// Orthonormal basis in reference coordinates.
    pub fn ref_basis(&self) -> &Mat {
        &self.q
    }

    /// Basis in ambient coordinates.
    pub fn basis(&self) -> Mat {
        self.space.mat_from_ref(&self.q)
    }

    pub(crate) fn tol_with(&self, o: &Subspace) -> f64 {
        self.rank_tol.max(o.rank_tol)
    }

    pub(crate) fn same_space(&self, o: &Subspace) -> Result<()> {
        if Arc::ptr_eq(&self.space, &o.space) || *self.space == *o.space {
            Ok(())
        } else {
            Err(GapError::SpaceMismatch)
        }
    }

    /// `self + o` and `self ∩ o` from one factorization, so that
    /// `dim(A+B) + dim(A∩B) = dim A + dim B` holds exactly.
    pub fn sum_and_intersection(&self, o: &Subspace) -> Result<(Subspace, Subspace)> {
        self.same_space(o)?;
        let tol = self.tol_with(o);
        let n = self.ambient_dim();
        let (ka, kb) = (self.dim(), o.dim());
        if ka == 0 || kb == 0 {
            let s = if ka == 0 { o.clone() } else { self.clone() };
            return Ok((s.with_rank_tol(tol), Subspace::zero(&self.space).with_rank_tol(tol)));
        }
        let stacked = hstack(&[&self.q, &o.q], n);
        let cols = ka + kb;
        let padded = if n < cols {
            let mut p = Mat::zeros(cols, cols);
            p.view_mut((0, 0), (n, cols)).copy_from(&stacked);
            p
        } else {
            stacked
        };
        let d = svd(&padded);
        let r = numerical_rank(&d.s, tol);
        let sum_q = d.u.view((0, 0), (n, r)).into_owned();
        let null = d.v.columns(r, cols - r).into_owned();
        let x = null.rows(0, ka).into_owned();
        let inter_gen = &self.q * x;
        let inter_q = if inter_gen.ncols() == 0 {
            Mat::zeros(n, 0)
        } else {
            let di = svd(&inter_gen);
            di.u.columns(0, inter_gen.ncols()).into_owned()
        };
        Ok((
            Subspace::from_orthonormal(&self.space, sum_q, tol),
            Subspace::from_orthonormal(&self.space, inter_q, tol),
        ))
    }

    pub fn sum(&self, o: &Subspace) -> Result<Subspace> {
        Ok(self.sum_and_intersection(o)?.0)
    }

    pub fn intersect(&self, o: &Subspace) -> Result<Subspace> {
        Ok(self.sum_and_intersection(o)?.1)
    }

    /// `self ⊆ o`, decided as `dim(self + o) == dim o`.
    pub fn is_within(&self, o: &Subspace) -> Result<bool> {
        self.same_space(o)?;
        if self.dim() == 0 {
            return Ok(true);
        }
        if self.dim() > o.dim() {
            return Ok(false);
        }
        let stacked = hstack(&[&o.q, &self.q], self.ambient_dim());
        Ok(linalg::rank(&stacked, self.tol_with(o)) == o.dim())
    }

    pub fn equals(&self, o: &Subspace) -> Result<bool> {
        Ok(self.dim() == o.dim() && self.is_within(o)?)
    }

    /// Unit direction of `self` (ambient) farthest from `o` in the reference
    /// inner product; used to report containment failures.
    pub fn violating_direction(&self, o: &Subspace) -> Option<Vector> {
        if self.dim() == 0 {
            return None;
        }
        let r = linalg::reject(&o.q, &self.q);
        let d = svd(&r);
        let coef = d.v.column(0).into_owned();
        Some(self.space.from_ref(&(&self.q * coef)))
    }

    pub fn require_within(&self, o: &Subspace, what: &str) -> Result<()> {
        if self.is_within(o)? {
            Ok(())
        } else {
            let dir = self
                .violating_direction(o)
                .map(|v| format!("{:?}", v.iter().map(|z| (z.re, z.im)).collect::<Vec<_>>()))
                .unwrap_or_default();
            Err(GapError::NotContained(format!("{what}; violating direction {dir}")))
        }
    }

    /// `dim self / sub`, requiring `sub ⊆ self`.
    pub fn quotient_dim(&self, sub: &Subspace) -> Result<usize> {
        sub.require_within(self, "quotient needs the second subspace inside the first")?;
        Ok(self.dim() - sub.dim())
    }

    /// Annihilator `{f : f(x) = 0 for x in self}` as a subspace of the dual
    /// space, pairing `f(x) = Σ conj(fᵢ) xᵢ` in ambient coordinates.
    pub fn annihilator(&self) -> Subspace {
        let dual = Arc::new(self.space.dual());
        let q = self.ref_complement_q();
        Subspace { space: dual, q, rank_tol: self.rank_tol }
    }

    fn ref_complement_q(&self) -> Mat {
        let n = self.ambient_dim();
        if self.dim() == 0 {
            return linalg::identity(n);
        }
        linalg::null_space(&self.q.adjoint(), self.rank_tol)
    }

    /// Reference-orthogonal complement of `self` in the whole space.
    pub fn complement(&self) -> Subspace {
        Subspace { space: self.space.clone(), q: self.ref_complement_q(), rank_tol: self.rank_tol }
    }

    /// Reference-orthogonal complement of `self` inside `big`; requires
    /// `self ⊆ big`. The result `V` satisfies `big = self ⊕ V`.
    pub fn complement_in(&self, big: &Subspace) -> Result<Subspace> {
        self.require_within(big, "complement needs containment")?;
        let tol = self.tol_with(big);
        let q = linalg::complement_within(&big.q, &self.q, tol);
        let want = big.dim() - self.dim();
        let q = if q.ncols() > want { q.columns(0, want).into_owned() } else { q };
        Ok(Subspace { space: self.space.clone(), q, rank_tol: tol })
    }

    /// Image under an ambient linear map.
    pub fn image(&self, g: &Mat) -> Result<Subspace> {
        let n = self.ambient_dim();
        if g.shape() != (n, n) {
            return Err(GapError::DimensionMismatch(format!("operator must be {n}x{n}")));
        }
        let gr = self.space.op_to_ref(g);
        let scale = linalg::spectral_norm(&gr);
        Ok(self.image_ref(&gr, scale))
    }

    /// Image under a reference-coordinate map whose entries are accurate to
    /// `ε·scale`. Rank is measured against `scale`, not against the image
    /// itself, so a map that kills the subspace up to rounding gives {0}.
    pub(crate) fn image_ref(&self, gr: &Mat, scale: f64) -> Subspace {
        let d = svd(&(gr * &self.q));
        let floor = self.rank_tol * scale;
        let r = d.s.iter().filter(|&&x| x > floor).count();
        Subspace::from_orthonormal(&self.space, d.u.columns(0, r).into_owned(), self.rank_tol)
    }

    pub fn contains_vector(&self, x: &Vector) -> Result<bool> {
        if x.len() != self.ambient_dim() {
            return Err(GapError::DimensionMismatch("vector length".into()));
        }
        let y = self.space.to_ref(x);
        let yn = y.norm();
        if yn == 0.0 {
            return Ok(true);
        }
        let r = linalg::reject_vec(&self.q, &y);
        Ok(r.norm() <= self.rank_tol * yn)
    }

}

fn check_shape(space: &NormedSpace, basis: &Mat) -> Result<()> {
    if basis.nrows() != space.dim() {
        return Err(GapError::DimensionMismatch(format!(
            "basis vectors have length {}, space has dimension {}",
            basis.nrows(),
            space.dim()
        )));
    }
    if space.field() == Field::Real && !is_real_mat(basis) {
        return Err(GapError::Input("complex entries in a real space".into()));
    }
    if basis.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(GapError::Input("non-finite basis entry".into()));
    }
    Ok(())
}

/// Operation selector for [`subspace_algebra`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgebraOp {
    Sum,
    Intersect,
    /// `A ⊆ B`, i.e. `δ(A, B) = 0` numerically.
    Contains,
    /// `dim A / B` with `B ⊆ A`.
    QuotientDim,
    /// `A^⊥` in the dual space (ignores `B`).
    Annihilator,
}

#[derive(Clone, Debug)]
pub enum AlgebraResult {
    Subspace(Subspace),
    Bool(bool),
    Dim(usize),
}

pub fn subspace_algebra(a: &Subspace, b: &Subspace, op: AlgebraOp) -> Result<AlgebraResult> {
    Ok(match op {
        AlgebraOp::Sum => AlgebraResult::Subspace(a.sum(b)?),
        AlgebraOp::Intersect => AlgebraResult::Subspace(a.intersect(b)?),
        AlgebraOp::Contains => AlgebraResult::Bool(a.is_within(b)?),
        AlgebraOp::QuotientDim => AlgebraResult::Dim(a.quotient_dim(b)?),
        AlgebraOp::Annihilator => AlgebraResult::Subspace(a.annihilator()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn sp(n: usize) -> Arc<NormedSpace> {
        Arc::new(NormedSpace::euclidean(n))
    }

    fn sub(space: &Arc<NormedSpace>, cols: &[&[f64]]) -> Subspace {
        let n = space.dim();
        let m = Mat::from_fn(n, cols.len(), |i, j| c(cols[j][i]));
        Subspace::new(space, m).unwrap()
    }

    #[test]
    fn sum_and_intersection_of_coordinate_planes() {
        let s = sp(3);
        let a = sub(&s, &[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        let b = sub(&s, &[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        let (sum, inter) = a.sum_and_intersection(&b).unwrap();
        assert_eq!(sum.dim(), 3);
        assert_eq!(inter.dim(), 1);
        let e2 = Vector::from_vec(vec![c(0.0), c(1.0), c(0.0)]);
        assert!(inter.contains_vector(&e2).unwrap());
    }

    #[test]
    fn containment_and_quotient() {
        let s = sp(3);
        let a = sub(&s, &[&[1.0, 1.0, 0.0]]);
        let b = sub(&s, &[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        assert!(a.is_within(&b).unwrap());
        assert!(!b.is_within(&a).unwrap());
        assert_eq!(b.quotient_dim(&a).unwrap(), 1);
        assert!(a.quotient_dim(&b).is_err());
    }

    #[test]
    fn rank_deficient_basis_rejected() {
        let s = sp(2);
        let m = Mat::from_fn(2, 2, |i, _| c(if i == 0 { 1.0 } else { 0.0 }));
        assert!(matches!(Subspace::new(&s, m), Err(GapError::RankDeficient { rank: 1, cols: 2 })));
    }

    #[test]
    fn annihilator_dimension_and_involution() {
        let s = sp(4);
        let a = sub(&s, &[&[1.0, 2.0, 0.0, 1.0]]);
        let ann = a.annihilator();
        assert_eq!(ann.dim(), 3);
        let back = ann.annihilator();
        assert!(back.equals(&Subspace::from_orthonormal(back.space(), a.ref_basis().clone(), 1e-9)).unwrap());
    }

    #[test]
    fn weighted_annihilator_kills_basis() {
        let space = Arc::new(
            NormedSpace::new(
                3,
                Field::Real,
                super::super::space::Norm { p: super::super::space::Exponent::One, weights: Some(vec![1.0, 4.0, 9.0]) },
            )
            .unwrap(),
        );
        let a = sub(&space, &[&[1.0, 1.0, 1.0]]);
        let ann = a.annihilator();
        let f = ann.basis();
        let x = a.basis();
        assert!((f.adjoint() * x).norm() < 1e-12);
    }

    #[test]
    fn complement_in_splits() {
        let s = sp(4);
        let small = sub(&s, &[&[1.0, 1.0, 0.0, 0.0]]);
        let big = sub(&s, &[&[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0], &[0.0, 0.0, 1.0, 0.0]]);
        let v = small.complement_in(&big).unwrap();
        assert_eq!(v.dim(), 2);
        let (sum, inter) = small.sum_and_intersection(&v).unwrap();
        assert!(sum.equals(&big).unwrap());
        assert_eq!(inter.dim(), 0);
    }
}
