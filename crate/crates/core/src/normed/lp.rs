//! Linear programs for real ℓ¹ and ℓ∞ distances to a subspace.
//!
//! Both the primal (epigraph form) and the dual (a bounded functional in the
//! annihilator) are solved. The primal point gives the upper bound by direct
//! evaluation; the dual point, after being projected back onto the
//! annihilator and rescaled into the dual ball, gives the lower bound.

use minilp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem};
use nalgebra::{DMatrix, DVector};

pub(crate) struct LpOutcome {
    /// Coefficients of the nearest point in the columns of `q`.
    pub coeffs: DVector<f64>,
    /// Dual functional, feasible after repair.
    pub dual: DVector<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum LpNorm {
    L1,
    LInf,
}

pub(crate) fn solve(y: &DVector<f64>, q: &DMatrix<f64>, norm: LpNorm) -> Option<LpOutcome> {
    let coeffs = primal(y, q, norm)?;
    let dual = dual(y, q, norm)?;
    Some(LpOutcome { coeffs, dual })
}

fn primal(y: &DVector<f64>, q: &DMatrix<f64>, norm: LpNorm) -> Option<DVector<f64>> {
    let (n, k) = q.shape();
    let mut pb = Problem::new(OptimizationDirection::Minimize);
    let cs: Vec<_> = (0..k).map(|_| pb.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY))).collect();
    let ts: Vec<_> = match norm {
        LpNorm::L1 => (0..n).map(|_| pb.add_var(1.0, (0.0, f64::INFINITY))).collect(),
        LpNorm::LInf => vec![pb.add_var(1.0, (0.0, f64::INFINITY))],
    };
    for i in 0..n {
        let t = if norm == LpNorm::L1 { ts[i] } else { ts[0] };
        // y_i - (Qc)_i <= t  and  (Qc)_i - y_i <= t
        let mut up = LinearExpr::empty();
        let mut lo = LinearExpr::empty();
        for j in 0..k {
            up.add(cs[j], -q[(i, j)]);
            lo.add(cs[j], q[(i, j)]);
        }
        up.add(t, -1.0);
        lo.add(t, -1.0);
        pb.add_constraint(up, ComparisonOp::Le, -y[i]);
        pb.add_constraint(lo, ComparisonOp::Le, y[i]);
    }
    let sol = pb.solve().ok()?;
    Some(DVector::from_iterator(k, cs.iter().map(|&v| sol[v])))
}

fn dual(y: &DVector<f64>, q: &DMatrix<f64>, norm: LpNorm) -> Option<DVector<f64>> {
    let (n, k) = q.shape();
    let mut pb = Problem::new(OptimizationDirection::Maximize);
    let f = match norm {
        LpNorm::L1 => {
            let fs: Vec<_> = (0..n).map(|i| pb.add_var(y[i], (-1.0, 1.0))).collect();
            for j in 0..k {
                let mut e = LinearExpr::empty();
                for i in 0..n {
                    e.add(fs[i], q[(i, j)]);
                }
                pb.add_constraint(e, ComparisonOp::Eq, 0.0);
            }
            let sol = pb.solve().ok()?;
            DVector::from_iterator(n, fs.iter().map(|&v| sol[v]))
        }
        LpNorm::LInf => {
            let gp: Vec<_> = (0..n).map(|i| pb.add_var(y[i], (0.0, f64::INFINITY))).collect();
            let gm: Vec<_> = (0..n).map(|i| pb.add_var(-y[i], (0.0, f64::INFINITY))).collect();
            let mut total = LinearExpr::empty();
            for i in 0..n {
                total.add(gp[i], 1.0);
                total.add(gm[i], 1.0);
            }
            pb.add_constraint(total, ComparisonOp::Le, 1.0);
            for j in 0..k {
                let mut e = LinearExpr::empty();
                for i in 0..n {
                    e.add(gp[i], q[(i, j)]);
                    e.add(gm[i], -q[(i, j)]);
                }
                pb.add_constraint(e, ComparisonOp::Eq, 0.0);
            }
            let sol = pb.solve().ok()?;
            DVector::from_iterator(n, (0..n).map(|i| sol[gp[i]] - sol[gm[i]]))
        }
    };
    Some(f)
}
