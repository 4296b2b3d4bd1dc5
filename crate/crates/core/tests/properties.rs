//! Property tests for the invariants each module promises. Instances are
//! drawn from a proptest-chosen seed so that failures shrink to a seed and
//! a handful of dimensions.

use std::sync::Arc;

use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use subgap::family::{walk_family, FamilyBase, PathPlan, TraceKind};
use subgap::gap::{delta, delta_hat, gap_l2_exact, GapOptions};
use subgap::generate::{
    gaussian, random_generator, random_hermitian, random_invertible, reldim_parts, rng, tetrad_bases, TetradDims,
};
use subgap::linalg::{c, identity, pinv, spectral_norm, svd, Mat, Vector};
use subgap::morse::{c_gap, form_metrics, maximal_definite, morse_indices, reduced_form, SymmetricPair};
use subgap::normed::{dist_to_subspace, Field, Norm, NormedSpace, Subspace};
use subgap::reldim::{finite_change_dim, normalize_perturbation, operator_norm, relative_dim, PerturbationOperator};
use subgap::splitting::{a_constants, transport_subspace};
use subgap::tetrad::{pair_index, Tetrad};

const PS: [f64; 4] = [2.0, 1.0, f64::INFINITY, 3.0];

fn space(n: usize, p: f64, complex: bool) -> Arc<NormedSpace> {
    let field = if complex { Field::Complex } else { Field::Real };
    Arc::new(NormedSpace::new(n, field, Norm::lp(p).unwrap()).unwrap())
}

fn sub(s: &Arc<NormedSpace>, b: Mat) -> Subspace {
    Subspace::new(s, b).unwrap()
}

fn rand_sub(r: &mut ChaCha8Rng, s: &Arc<NormedSpace>, k: usize) -> Subspace {
    sub(s, gaussian(r, s.dim(), k, !s.is_real()))
}

fn opts(seed: u64) -> GapOptions {
    GapOptions::default().with_seed(seed).with_budget(300)
}

/// `(I+K)M ⊆ N` with `K` freshly drawn.
fn fresh_k(r: &mut ChaCha8Rng, bm: &Mat, bn: &Mat) -> Mat {
    let n = bm.nrows();
    let g = gaussian(r, bn.ncols(), bm.ncols(), false);
    let z = gaussian(r, n, n, false);
    let p = pinv(bm, 1e-12);
    bn * g * &p + z * (identity(n) - bm * &p) - identity(n)
}

fn diag(v: &[f64]) -> Mat {
    Mat::from_fn(v.len(), v.len(), |i, j| if i == j { c(v[i]) } else { c(0.0) })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn sum_and_intersection_dimensions_add_up(seed in any::<u64>(), n in 1usize..8, p in 0usize..4) {
        let mut r = rng(seed);
        let s = space(n, PS[p], seed % 2 == 0);
        let (ka, kb) = (r.random_range(0..=n), r.random_range(0..=n));
        // Share a few directions so intersections are not always trivial.
        let shared = r.random_range(0..=ka.min(kb));
        let common = gaussian(&mut r, n, shared, !s.is_real());
        let mut ba = gaussian(&mut r, n, ka, !s.is_real());
        let mut bb = gaussian(&mut r, n, kb, !s.is_real());
        ba.columns_mut(0, shared).copy_from(&common);
        bb.columns_mut(0, shared).copy_from(&common);
        let (a, b) = (sub(&s, ba), sub(&s, bb));
        let (sum, cap) = a.sum_and_intersection(&b).unwrap();
        prop_assert_eq!(sum.dim() + cap.dim(), a.dim() + b.dim());
        prop_assert_eq!(sum.dim(), (ka + kb - shared).min(n));
    }

    #[test]
    fn annihilator_is_an_involution(seed in any::<u64>(), n in 1usize..7, p in 0usize..4) {
        let mut r = rng(seed);
        let s = space(n, PS[p], false);
        let k = r.random_range(0..=n);
        let m = rand_sub(&mut r, &s, k);
        let back = m.annihilator().annihilator();
        prop_assert_eq!(back.dim(), m.dim());
        // Compared as subspaces of the Euclidean coordinates.
        let e = space(n, 2.0, false);
        let (m2, b2) = (sub(&e, m.basis()), sub(&e, back.basis()));
        prop_assert!(delta_hat(&m2, &b2, &opts(seed)).unwrap().hi < 1e-8);
    }

    #[test]
    fn l2_distance_matches_orthogonal_projection(seed in any::<u64>(), n in 1usize..8) {
        let mut r = rng(seed);
        let complex = seed % 2 == 1;
        let s = space(n, 2.0, complex);
        let k = r.random_range(0..=n);
        let m = rand_sub(&mut r, &s, k);
        let u: Vector = gaussian(&mut r, n, 1, complex).column(0).into_owned();
        let q = m.basis();
        let q = if k == 0 { q } else { svd(&q).u };
        let resid = (&u - &q * (q.adjoint() * &u)).norm();
        let d = dist_to_subspace(&u, &m).unwrap();
        prop_assert!((d.lo - resid).abs() <= 1e-10 * (1.0 + resid), "{:?} vs {}", d, resid);
        prop_assert!((d.hi - resid).abs() <= 1e-10 * (1.0 + resid), "{:?} vs {}", d, resid);
    }

    #[test]
    fn distance_vanishes_exactly_on_the_subspace(seed in any::<u64>(), n in 2usize..7, p in 0usize..4) {
        let mut r = rng(seed);
        let s = space(n, PS[p], false);
        let k = r.random_range(1..n);
        let m = rand_sub(&mut r, &s, k);
        let inside: Vector = m.basis() * gaussian(&mut r, k, 1, false).column(0);
        prop_assert_eq!(dist_to_subspace(&inside, &m).unwrap().lo, 0.0);
        let outside: Vector = gaussian(&mut r, n, 1, false).column(0).into_owned();
        prop_assume!(!m.contains_vector(&outside).unwrap());
        prop_assert!(dist_to_subspace(&outside, &m).unwrap().lo > 0.0);
    }

    #[test]
    fn gap_is_zero_exactly_on_containment(seed in any::<u64>(), n in 2usize..7, p in 0usize..4) {
        let mut r = rng(seed);
        let s = space(n, PS[p], false);
        let kn = r.random_range(1..=n);
        let bn = gaussian(&mut r, n, kn, false);
        let km = r.random_range(1..=kn);
        let bm = &bn * gaussian(&mut r, kn, km, false);
        let (m, nn) = (sub(&s, bm), sub(&s, bn));
        let o = opts(seed);
        let d = delta(&m, &nn, &o).unwrap();
        prop_assert_eq!((d.lo, d.hi), (0.0, 0.0));
        let other = rand_sub(&mut r, &s, km);
        prop_assume!(!other.is_within(&nn).unwrap());
        prop_assert!(delta(&other, &nn, &o).unwrap().hi > 0.0);
    }

    #[test]
    fn delta_hat_is_symmetric(seed in any::<u64>(), n in 1usize..6, p in 0usize..4) {
        let mut r = rng(seed);
        let s = space(n, PS[p], false);
        let (ka, kb) = (r.random_range(0..=n), r.random_range(0..=n));
        let (a, b) = (rand_sub(&mut r, &s, ka), rand_sub(&mut r, &s, kb));
        let o = opts(seed);
        prop_assert_eq!(delta_hat(&a, &b, &o).unwrap(), delta_hat(&b, &a, &o).unwrap());
    }

    #[test]
    fn invertible_maps_distort_the_gap_by_at_most_their_condition(seed in any::<u64>(), n in 2usize..7) {
        let mut r = rng(seed);
        let s = space(n, 2.0, false);
        let (ka, kb) = (r.random_range(1..=n), r.random_range(1..=n));
        let (m, nn) = (rand_sub(&mut r, &s, ka), rand_sub(&mut r, &s, kb));
        let a = random_invertible(&mut r, n, 5.0, false);
        let sv = svd(&a).s;
        let cond = sv[0] / sv[n - 1] * (1.0 + 1e-12);
        let o = opts(seed);
        let lhs = delta(&m.image(&a).unwrap(), &nn.image(&a).unwrap(), &o).unwrap().lo / cond;
        prop_assert!(lhs <= delta(&m, &nn, &o).unwrap().hi);
    }

    #[test]
    fn small_perturbations_move_the_subspace_little(seed in any::<u64>(), n in 2usize..7, p in 0usize..4) {
        let mut r = rng(seed);
        let s = space(n, PS[p], false);
        let k = r.random_range(1..=n);
        let m = rand_sub(&mut r, &s, k);
        let a0 = gaussian(&mut r, n, n, false);
        let target = r.random_range(0.01..0.6);
        let a = &a0 * c(target / operator_norm(&s, &a0).hi);
        let na = operator_norm(&s, &a).hi;
        prop_assume!(na < 1.0);
        let moved = m.image(&(identity(n) + &a)).unwrap();
        let d = delta(&moved, &m, &opts(seed)).unwrap();
        prop_assert!(d.lo <= na / (1.0 - na) * (1.0 + 1e-12));
    }

    #[test]
    fn pair_index_agrees_with_a_null_space_count(seed in any::<u64>(), n in 1usize..9) {
        let mut r = rng(seed);
        let s = space(n, 2.0, false);
        let d = TetradDims::random(&mut r, n);
        let [_, bm, bn, _] = tetrad_bases(&mut r, &d, false);
        let (m, nn) = (sub(&s, bm.clone()), sub(&s, bn.clone()));
        let pi = pair_index(&m, &nn).unwrap();
        // dim(M∩N) is the nullity of [B_M, −B_N]; dim(M+N) its rank.
        let stacked = {
            let mut x = Mat::zeros(n, bm.ncols() + bn.ncols());
            x.columns_mut(0, bm.ncols()).copy_from(&bm);
            x.columns_mut(bm.ncols(), bn.ncols()).copy_from(&(-&bn));
            x
        };
        let rank = if stacked.ncols() == 0 { 0 } else { subgap::linalg::rank(&stacked, 1e-9) };
        let nullity = stacked.ncols() - rank;
        prop_assert_eq!(pi.dim_cap, nullity);
        prop_assert_eq!(pi.index, nullity as i64 - (n - rank) as i64);
        prop_assert_eq!(pi.index, d.cap as i64 - (n - d.sum()) as i64);
    }

    #[test]
    fn annihilators_negate_the_pair_index(seed in any::<u64>(), n in 1usize..8, p in 0usize..3) {
        let mut r = rng(seed);
        let s = space(n, PS[p], false);
        let d = TetradDims::random(&mut r, n);
        let [_, bm, bn, _] = tetrad_bases(&mut r, &d, false);
        let (m, nn) = (sub(&s, bm), sub(&s, bn));
        let a = pair_index(&m, &nn).unwrap().index;
        let b = pair_index(&m.annihilator(), &nn.annihilator()).unwrap().index;
        prop_assert_eq!(a, -b);
    }

    #[test]
    fn tetrad_index_is_cap_excess_minus_sum_deficit(seed in any::<u64>(), n in 1usize..9) {
        let mut r = rng(seed);
        let s = space(n, 2.0, seed % 2 == 0);
        let d = TetradDims::random(&mut r, n);
        let [y1, m, nn, y2] = tetrad_bases(&mut r, &d, !s.is_real());
        let t = Tetrad::new(sub(&s, y1), sub(&s, m), sub(&s, nn), sub(&s, y2)).unwrap();
        let excess = t.cap_excess().finite().unwrap();
        let deficit = t.sum_deficit().finite().unwrap();
        prop_assert_eq!(t.index().finite().unwrap(), excess - deficit);
        prop_assert_eq!(t.index().finite().unwrap(), d.index());
    }

    #[test]
    fn a_constants_follow_their_recursion(a in 0.01f64..0.414, n in 0usize..12) {
        let ai = a_constants(a, n);
        prop_assert_eq!(ai.len(), n + 2);
        prop_assert_eq!(ai[0], 1.0);
        for i in 1..ai.len() {
            let want = if i == 1 { a } else { ai[i - 1] * a * (i - 1) as f64 / (i as f64 * (1.0 + a)) };
            prop_assert!((ai[i] - want).abs() <= 1e-14 * want);
            prop_assert!(ai[i] > 0.0 && ai[i] <= 1.0);
        }
    }

    #[test]
    fn transport_keeps_the_dimension(seed in any::<u64>(), n in 3usize..7) {
        let mut r = rng(seed);
        let s = space(n, 2.0, false);
        let kn = r.random_range(1..n);
        let bn = gaussian(&mut r, n, kn, false);
        let kv = r.random_range(1..=kn.min(2));
        let v = sub(&s, &bn * gaussian(&mut r, kn, kv, false));
        let nn = sub(&s, bn.clone());
        let rot = subgap::generate::random_rotation(&mut r, n, 1e-4, false);
        let np = sub(&s, rot * bn);
        let t = transport_subspace(&v, &nn, &np, &opts(seed)).unwrap();
        prop_assert!(t.verdict.hypothesis_ok);
        prop_assert!(!t.verdict.contradiction());
        prop_assert_eq!(t.vp.dim(), v.dim());
        prop_assert!(t.vp.is_within(&np).unwrap());
    }

    #[test]
    fn relative_dimension_ignores_the_choice_of_k(seed in any::<u64>(), n in 1usize..7, p in 0usize..3) {
        let mut r = rng(seed);
        let s = space(n, PS[p], false);
        let (dm, dn) = (r.random_range(0..=n), r.random_range(0..=n));
        let (bm, bn, k1) = reldim_parts(&mut r, n, dm, dn, false);
        let k2 = fresh_k(&mut r, &bm, &bn);
        let (m, nn) = (sub(&s, bm.clone()), sub(&s, bn.clone()));
        let v1 = relative_dim(&m, &nn, &PerturbationOperator::new(&s, k1).unwrap()).unwrap();
        let v2 = relative_dim(&m, &nn, &PerturbationOperator::new(&s, k2).unwrap()).unwrap();
        prop_assert_eq!(v1.value, v2.value);
        let back = relative_dim(&nn, &m, &PerturbationOperator::new(&s, fresh_k(&mut r, &bn, &bm)).unwrap()).unwrap();
        prop_assert_eq!(v1.value.finite().unwrap(), -back.value.finite().unwrap());
        prop_assert_eq!(v1.value.finite().unwrap(), finite_change_dim(&m, &nn).unwrap());
        prop_assert_eq!(v1.value.finite().unwrap(), v1.kernel_dim as i64 - v1.cokernel_dim as i64);
    }

    #[test]
    fn normalized_perturbation_is_invertible_and_matches(seed in any::<u64>(), n in 1usize..7) {
        let mut r = rng(seed);
        let s = space(n, 2.0, false);
        let (dm, dn) = (r.random_range(0..=n), r.random_range(0..=n));
        let (bm, bn, k) = reldim_parts(&mut r, n, dm, dn, false);
        let (m, nn) = (sub(&s, bm), sub(&s, bn));
        let op = PerturbationOperator::new(&s, k).unwrap();
        let norm = normalize_perturbation(&m, &nn, &op).unwrap();
        prop_assert!(norm.k1.invertible_i_plus_k);
        prop_assert!(norm.image_matches);
        let img = norm.m1.image(&norm.k1.i_plus_k()).unwrap();
        prop_assert!(delta_hat(&img, &norm.n1, &opts(seed)).unwrap().hi < 1e-8);
        prop_assert_eq!(m.dim() - norm.m1.dim(), norm.kernel_dim);
        prop_assert!(norm.n1.is_within(&nn).unwrap());
    }
}

fn signed_diag(r: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    (0..k).map(|_| [-1.0, 0.0, 1.0][r.random_range(0..3)] * r.random_range(0.5..2.0)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, ..ProptestConfig::default() })]

    #[test]
    fn morse_indices_survive_congruence(seed in any::<u64>(), k in 1usize..6) {
        let mut r = rng(seed);
        let complex = seed % 2 == 0;
        let n = k + r.random_range(0..3);
        let s = space(n, 2.0, complex);
        let d = signed_diag(&mut r, k);
        let b = gaussian(&mut r, n, k, complex);
        let q = SymmetricPair::new(&s, b.clone(), diag(&d)).unwrap();
        let t = random_invertible(&mut r, k, 4.0, complex);
        let g2 = t.adjoint() * diag(&d) * &t;
        let q2 = SymmetricPair::new(&s, &b * &t, (&g2 + g2.adjoint()) * c(0.5)).unwrap();
        let want = (d.iter().filter(|&&x| x > 0.0).count(), d.iter().filter(|&&x| x < 0.0).count());
        let (i1, i2) = (morse_indices(&q), morse_indices(&q2));
        prop_assert_eq!(i1, i2);
        prop_assert_eq!((i1.m_plus, i1.m_minus), want);
        prop_assert_eq!(i1.m_plus + i1.m_minus + i1.m_zero, k);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 50, ..ProptestConfig::default() })]

    #[test]
    fn reduced_form_signature_ignores_the_complement(seed in any::<u64>(), k in 2usize..6) {
        let mut r = rng(seed);
        let s = space(k, 2.0, false);
        let mut d = signed_diag(&mut r, k);
        // A radical direction and an isotropic plane direction e_1 + e_2.
        d[0] = 0.0;
        d[1] = 1.0;
        if k > 2 {
            d[2] = -1.0;
        }
        let b = random_invertible(&mut r, k, 3.0, false);
        let q = SymmetricPair::new(&s, b.clone(), diag(&d)).unwrap();
        let mut e = b.columns(0, 1).into_owned();
        if k > 2 && seed % 2 == 0 {
            e = Mat::from_fn(k, 2, |i, j| if j == 0 { b[(i, 0)] } else { b[(i, 1)] + b[(i, 2)] });
        }
        let eps = sub(&s, e.clone());
        let red = reduced_form(&q, &eps).unwrap();
        prop_assert!(red.well_defined);
        // Independent complement: shift the chosen one by random multiples of ε.
        let comp = red.form.basis().clone();
        let shift = gaussian(&mut r, e.ncols(), comp.ncols(), false);
        let other = &comp + &e * shift;
        let q2 = q.restrict(&sub(&s, other)).unwrap();
        prop_assert_eq!(morse_indices(&red.form), morse_indices(&q2));
    }

    #[test]
    fn maximal_definite_has_dimension_m_plus(seed in any::<u64>(), k in 1usize..6, h in prop_oneof![Just(1.0), Just(-1.0)]) {
        let mut r = rng(seed);
        let s = space(k + 1, 2.0, false);
        let d = signed_diag(&mut r, k);
        let q = SymmetricPair::new(&s, gaussian(&mut r, k + 1, k, false), diag(&d)).unwrap();
        let mx = maximal_definite(&q, h).unwrap();
        prop_assert_eq!(mx.alpha.dim(), morse_indices(&q.scaled(h)).m_plus);
        prop_assert!(mx.complement_semidefinite);
        let rest = q.scaled(h).restrict(&mx.alpha_q).unwrap();
        prop_assert_eq!(morse_indices(&rest).m_plus, 0);
    }

    #[test]
    fn c_gap_is_ordered_and_nonincreasing_in_c(seed in any::<u64>(), k in 1usize..4) {
        let mut r = rng(seed);
        let n = k + 1;
        let s = space(n, 2.0, false);
        let b = gaussian(&mut r, n, k, false);
        let g = random_hermitian(&mut r, k, false);
        let q = SymmetricPair::new(&s, b.clone(), g.clone()).unwrap();
        let rot = subgap::generate::random_rotation(&mut r, n, 1e-2, false);
        let rr = SymmetricPair::new(&s, rot * b, &g + random_hermitian(&mut r, k, false) * c(1e-2)).unwrap();
        let o = opts(seed);
        let (c1, c2) = (r.random_range(0.0..1.0), r.random_range(1.0..3.0));
        let v1 = c_gap(&q, &rr, c1, &o).unwrap().value;
        let v2 = c_gap(&q, &rr, c2, &o).unwrap().value;
        prop_assert!(v1.lo >= 0.0 && v1.lo <= v1.hi);
        prop_assert!(v2.lo >= 0.0 && v2.lo <= v2.hi);
        prop_assert!(v2.lo <= v1.hi);
        // A form is at c-gap max(0, ‖Q‖ − 2c) from itself.
        let norm_q = form_metrics(&q).unwrap().norm_q;
        let same = c_gap(&q, &q, c1, &o).unwrap().value;
        prop_assert!(same.lo <= (norm_q.hi - 2.0 * c1).max(0.0) + 1e-9);
        let wide = c_gap(&q, &q, norm_q.hi, &o).unwrap().value;
        prop_assert!(wide.lo == 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn relative_dimension_is_constant_along_paths(seed in any::<u64>(), n in 2usize..6) {
        let mut r = rng(seed);
        let s = space(n, 2.0, false);
        let (dm, dn) = (r.random_range(0..=n), r.random_range(0..=n));
        let (bm, bn, k) = reldim_parts(&mut r, n, dm, dn, false);
        let plan = PathPlan { generator: random_generator(&mut r, n), steps: 16, t_range: [0.0, 1.0] };
        let base = FamilyBase::Triple { m: sub(&s, bm), n: sub(&s, bn), k };
        let t = walk_family(&plan, &base, TraceKind::RelativeDim).unwrap();
        prop_assert!(t.constant);
        prop_assert!(t.points.iter().all(|p| p.value.finite() == Some(dm as i64 - dn as i64)));
    }

    #[test]
    fn tetrad_index_is_constant_along_paths(seed in any::<u64>(), n in 2usize..7) {
        let mut r = rng(seed);
        let s = space(n, 2.0, false);
        let d = TetradDims::random(&mut r, n);
        let [y1, m, nn, y2] = tetrad_bases(&mut r, &d, false);
        let t = Tetrad::new(sub(&s, y1), sub(&s, m), sub(&s, nn), sub(&s, y2)).unwrap();
        let plan = PathPlan { generator: random_generator(&mut r, n), steps: 16, t_range: [0.0, 1.0] };
        let tr = walk_family(&plan, &FamilyBase::Tetrad(t), TraceKind::TetradIndex).unwrap();
        prop_assert!(tr.constant);
        prop_assert!(tr.continuity.passes);
        prop_assert_eq!(tr.points[0].value.finite(), Some(d.index()));
    }
}

#[test]
fn l2_gap_oracle_is_symmetric_for_equal_dimensions() {
    // sin of the largest principal angle is symmetric when dimensions agree.
    let mut r = rng(5);
    let s = space(6, 2.0, false);
    for _ in 0..50 {
        let k = r.random_range(1..6);
        let (a, b) = (rand_sub(&mut r, &s, k), rand_sub(&mut r, &s, k));
        let (x, y) = (gap_l2_exact(&a, &b).unwrap(), gap_l2_exact(&b, &a).unwrap());
        assert!((x - y).abs() < 1e-12, "{x} vs {y}");
        assert!(spectral_norm(&a.basis()) > 0.0);
    }
}
