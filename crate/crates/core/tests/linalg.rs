use nalgebra::DMatrix;
use proptest::prelude::*;

use sparsenet::linalg::{
    gram_inverse, gram_remove_row, largest_eigvec, smallest_singular_value, symmetric_eigen, truncated_svd,
    DenseMatrix, GramUpdate, InverseGram, DEFAULT_TAU_SING,
};

fn to_na(m: &DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = DenseMatrix> {
    prop::collection::vec(-1.0f64..1.0, rows * cols).prop_map(move |d| DenseMatrix::from_vec(rows, cols, d).unwrap())
}

fn sized_matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = DenseMatrix> {
    (2..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| matrix(r, c))
}

fn max_dev_from_identity(m: &DenseMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((m[(i, j)] - target).abs());
        }
    }
    worst
}

#[test]
fn svd_of_random_6x5_matches_full_decomposition() {
    let g = DenseMatrix::from_fn(6, 5, |i, j| ((i * 31 + j * 17) % 23) as f64 / 23.0 - 0.5);
    let oracle = to_na(&g).svd(false, false).singular_values;
    let svd = truncated_svd(&g, 2).unwrap();
    for k in 0..2 {
        assert!((svd.s[k] - oracle[k]).abs() < 1e-8, "s[{k}] = {} vs {}", svd.s[k], oracle[k]);
    }
}

#[test]
fn rank_one_singular_value() {
    let g = DenseMatrix::from_fn(2, 3, |i, j| [1.0, 2.0][i] * [3.0, 0.0, 4.0][j]);
    let svd = truncated_svd(&g, 1).unwrap();
    assert!((svd.s[0] - 5.0f64.sqrt() * 5.0).abs() < 1e-12);
    assert!(g.sub(&svd.reconstruct()).unwrap().frobenius_norm() < 1e-12);
}

#[test]
fn gram_downdate_matches_direct_inverse() {
    let k = InverseGram::new(DenseMatrix::from_fn(3, 3, |i, j| if i == j { 0.5 } else { 0.0 })).unwrap();
    let row = [0.5, 0.0, 0.0];
    let GramUpdate::Updated(k2) = gram_remove_row(&k, &row, DEFAULT_TAU_SING) else { panic!("unexpected singularity") };
    let a = DMatrix::from_fn(3, 3, |i, j| if i == j { 2.0 } else { 0.0 }) - DMatrix::from_row_slice(3, 1, &row) * DMatrix::from_row_slice(1, 3, &row);
    let direct = a.try_inverse().unwrap();
    for i in 0..3 {
        for j in 0..3 {
            assert!((k2.matrix()[(i, j)] - direct[(i, j)]).abs() < 1e-10);
        }
    }
}

#[test]
fn removing_only_mass_is_singular() {
    let k = InverseGram::identity(2);
    assert!(matches!(gram_remove_row(&k, &[1.0, 0.0], DEFAULT_TAU_SING), GramUpdate::Singular(_)));
    match gram_remove_row(&k, &[0.0, 0.0], DEFAULT_TAU_SING) {
        GramUpdate::Updated(k2) => assert_eq!(k2.matrix(), k.matrix()),
        GramUpdate::Singular(_) => panic!("zero row made the Gram singular"),
    }
}

#[test]
fn analytic_eigenpairs() {
    let k = InverseGram::new(DenseMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap()).unwrap();
    let (lambda, v) = largest_eigvec(&k, None).unwrap();
    let h = 0.5f64.sqrt();
    assert!((lambda - 3.0).abs() < 1e-12);
    assert!((v[0] - h).abs() < 1e-9 && (v[1] - h).abs() < 1e-9);

    let iso = InverseGram::identity(3);
    let w = [0.0, 0.6, 0.8];
    let (lambda, v) = largest_eigvec(&iso, Some(&w)).unwrap();
    assert!((lambda - 1.0).abs() < 1e-12);
    assert!(v.iter().zip(&w).all(|(a, b)| (a - b).abs() < 1e-12));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn svd_factors_are_orthonormal(g in sized_matrix(9, 7), frac in 0.0f64..1.0) {
        let max_p = g.rows().min(g.cols());
        let p = 1 + ((max_p - 1) as f64 * frac) as usize;
        let svd = truncated_svd(&g, p).unwrap();
        prop_assert!(svd.s.windows(2).all(|w| w[0] >= w[1]) && svd.s.iter().all(|&x| x >= 0.0));
        prop_assert!(max_dev_from_identity(&svd.v.transpose().matmul(&svd.v).unwrap()) < 1e-10);
        let live: Vec<usize> = (0..p).filter(|&k| svd.s[k] > 1e-8 * svd.s[0].max(1e-300)).collect();
        let u = svd.u.select_columns(&live);
        prop_assert!(max_dev_from_identity(&u.transpose().matmul(&u).unwrap()) < 1e-10);
    }

    #[test]
    fn svd_is_the_best_low_rank_fit(g in sized_matrix(8, 6), frac in 0.0f64..1.0) {
        let max_p = g.rows().min(g.cols());
        let p = 1 + ((max_p - 1) as f64 * frac) as usize;
        let full = to_na(&g).svd(false, false).singular_values;
        let optimal = full.iter().skip(p).map(|s| s * s).sum::<f64>().sqrt();
        let got = g.sub(&truncated_svd(&g, p).unwrap().reconstruct()).unwrap().frobenius_norm();
        prop_assert!((got - optimal).abs() <= 1e-8 * (1.0 + g.frobenius_norm()));
    }

    #[test]
    fn reconstruction_error_shrinks_with_rank(g in sized_matrix(7, 6)) {
        let max_p = g.rows().min(g.cols());
        let errs: Vec<f64> = (1..=max_p)
            .map(|p| g.sub(&truncated_svd(&g, p).unwrap().reconstruct()).unwrap().frobenius_norm())
            .collect();
        prop_assert!(errs.windows(2).all(|w| w[1] <= w[0] + 1e-10));
    }

    #[test]
    fn eigen_matches_nalgebra(a in (1usize..7).prop_flat_map(|n| matrix(n + 2, n))) {
        let gram = a.gram();
        let (vals, vecs) = symmetric_eigen(&gram).unwrap();
        let mut oracle: Vec<f64> = to_na(&gram).symmetric_eigen().eigenvalues.iter().copied().collect();
        oracle.sort_by(|x, y| y.total_cmp(x));
        let scale = oracle[0].abs().max(1.0);
        for (x, y) in vals.iter().zip(&oracle) {
            prop_assert!((x - y).abs() < 1e-10 * scale);
        }
        for k in 0..vals.len() {
            let v = vecs.column(k);
            let r = gram.matvec(&v);
            let resid = r.iter().zip(&v).map(|(a, b)| (a - vals[k] * b).powi(2)).sum::<f64>().sqrt();
            prop_assert!(resid < 1e-9 * scale);
        }
    }

    #[test]
    fn smallest_singular_value_matches_nalgebra(a in (1usize..6).prop_flat_map(|n| matrix(n + 3, n))) {
        let oracle = to_na(&a).svd(false, false).singular_values.iter().copied().fold(f64::INFINITY, f64::min);
        prop_assert!((smallest_singular_value(&a).unwrap() - oracle).abs() < 1e-7);
    }

    #[test]
    fn gram_inverse_multiplies_back(a in (1usize..6).prop_flat_map(|n| matrix(n + 4, n))) {
        let cond = {
            let s = to_na(&a).svd(false, false).singular_values;
            let (hi, lo) = s.iter().fold((0.0f64, f64::INFINITY), |(h, l), &x| (h.max(x), l.min(x)));
            (hi / lo).powi(2)
        };
        prop_assume!(cond < 1e6);
        let k = gram_inverse(&a, DEFAULT_TAU_SING).unwrap();
        let prod = k.matrix().matmul(&a.gram()).unwrap();
        prop_assert!(max_dev_from_identity(&prod) < 1e-10 * cond.max(1.0));
    }

    /// Chained downdates agree with a direct inverse of the retained rows,
    /// relative to the condition number of each retained Gram.
    #[test]
    fn chained_downdates_track_direct_inverse(
        a in (2usize..5).prop_flat_map(|p| matrix(p + 8, p)),
        order in Just((0..64).collect::<Vec<usize>>()).prop_shuffle(),
    ) {
        let n = a.rows();
        let order: Vec<usize> = order.into_iter().filter(|&i| i < n).collect();
        let mut k = gram_inverse(&a, DEFAULT_TAU_SING).unwrap();
        let mut kept: Vec<usize> = (0..n).collect();
        for &i in &order {
            let GramUpdate::Updated(next) = gram_remove_row(&k, a.row(i), DEFAULT_TAU_SING) else { break };
            kept.retain(|&r| r != i);
            let sub = a.select_rows(&kept);
            let s = to_na(&sub).svd(false, false).singular_values;
            let (hi, lo) = s.iter().fold((0.0f64, f64::INFINITY), |(h, l), &x| (h.max(x), l.min(x)));
            let cond = (hi / lo).powi(2);
            if cond >= 1e6 {
                break;
            }
            let direct = gram_inverse(&sub, DEFAULT_TAU_SING).unwrap();
            let gap = next.matrix().sub(direct.matrix()).unwrap().frobenius_norm() / direct.matrix().frobenius_norm();
            prop_assert!(gap <= 1e-8 * cond, "gap {gap:e} at cond {cond:e}");
            k = next;
        }
    }

    #[test]
    fn eigvec_is_permutation_equivariant(a in (2usize..6).prop_flat_map(|p| matrix(p + 3, p)), seed in any::<u64>()) {
        let p = a.cols();
        let k = match gram_inverse(&a, DEFAULT_TAU_SING) { Ok(k) => k, Err(_) => return Ok(()) };
        let (vals, _) = symmetric_eigen(k.matrix()).unwrap();
        prop_assume!(vals[0] - vals[1] > 1e-6 * vals[0]);
        let mut perm: Vec<usize> = (0..p).collect();
        let mut s = seed;
        for i in (1..p).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let permuted = InverseGram::new(DenseMatrix::from_fn(p, p, |i, j| k.matrix()[(perm[i], perm[j])])).unwrap();
        let (l1, v1) = largest_eigvec(&k, None).unwrap();
        let (l2, v2) = largest_eigvec(&permuted, None).unwrap();
        prop_assert!((l1 - l2).abs() <= 1e-10 * l1);
        let mut back = vec![0.0; p];
        for i in 0..p {
            back[perm[i]] = v2[i];
        }
        let agree = v1.iter().zip(&back).map(|(x, y)| x * y).sum::<f64>().abs();
        prop_assert!(agree > 1.0 - 1e-9);
    }

    #[test]
    fn eigvec_residual_bound(a in (1usize..6).prop_flat_map(|p| matrix(p + 3, p)), warm in prop::collection::vec(-1.0f64..1.0, 6)) {
        let k = match gram_inverse(&a, DEFAULT_TAU_SING) { Ok(k) => k, Err(_) => return Ok(()) };
        let p = k.dim();
        let w = &warm[..p];
        let start = if w.iter().any(|x| x.abs() > 1e-3) { Some(w) } else { None };
        let (lambda, v) = largest_eigvec(&k, start).unwrap();
        let kv = k.matrix().matvec(&v);
        let resid = kv.iter().zip(&v).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt();
        prop_assert!(resid <= 1e-9 * lambda.abs());
        let (imax, _) = v.iter().enumerate().fold((0, 0.0f64), |(bi, bv), (i, x)| if x.abs() > bv + 1e-12 { (i, x.abs()) } else { (bi, bv) });
        prop_assert!(v[imax] > 0.0);
    }
}
