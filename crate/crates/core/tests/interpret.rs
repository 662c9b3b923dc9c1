use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use sparsenet::interpret::{
    hypergeom_log_tail, match_factor, match_factors, set_overlap_report, FactorMeasurement,
};
use sparsenet::linalg::DenseMatrix;

fn choose(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 900;
    (x >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// Exact `ln Pr(X >= k)` from integer binomial sums.
fn exact_log_tail(n: u64, a: u64, b: u64, k: u64) -> f64 {
    let num: BigUint = (k..=a.min(b)).map(|j| choose(a, j) * choose(n - a, b - j)).sum();
    ln_big(&num) - ln_big(&choose(n, b))
}

fn meas(label: &str, idx: &[usize], values: &[f64]) -> FactorMeasurement {
    FactorMeasurement { values: values.to_vec(), config_indices: idx.to_vec(), label: label.into() }
}

#[test]
fn tail_matches_exact_arithmetic_at_scale() {
    for &(n, a, b, k) in &[
        (10, 5, 4, 4),
        (200, 40, 60, 25),
        (5000, 300, 200, 60),
        (20000, 5000, 5000, 4000),
        (20000, 5000, 5000, 1260),
        (3000, 1500, 1500, 700),
        (100000, 50, 40, 3),
    ] {
        let got = hypergeom_log_tail(n, a, b, k).unwrap();
        let want = exact_log_tail(n, a, b, k);
        assert!((got - want).abs() <= 1e-9 * want.abs().max(1.0), "({n},{a},{b},{k}): {got} vs {want}");
    }
}

#[test]
fn best_column_is_found() {
    let r = DenseMatrix::from_rows(&[
        vec![1.0, 0.3, 5.0],
        vec![2.0, 0.1, 4.0],
        vec![3.0, 0.4, 2.0],
        vec![4.0, 0.2, 1.0],
    ])
    .unwrap();
    let m = match_factor(&r, &meas("f", &[0, 1, 2, 3], &[10.0, 20.0, 30.0, 40.0])).unwrap();
    assert_eq!(m.column, 0);
    assert!((m.rho - 1.0).abs() < 1e-12 && (m.scale - 10.0).abs() < 1e-12);
    // Negative correlation counts as well, and only measured rows matter.
    let m = match_factor(&r, &meas("g", &[0, 2], &[1.0, -1.0])).unwrap();
    assert!((m.rho - 1.0).abs() < 1e-12);
    assert!(match_factor(&r, &meas("c", &[0, 1], &[3.0, 3.0])).is_err());
    assert!(match_factor(&r, &meas("d", &[0, 0], &[1.0, 2.0])).is_err());
    assert!(match_factor(&r, &meas("o", &[0, 9], &[1.0, 2.0])).is_err());
}

#[test]
fn planted_factors_are_recovered() {
    let (m, p, trials) = (40, 5, 100);
    let mut hits = 0;
    for seed in 0..trials {
        let mut rng = StdRng::seed_from_u64(seed);
        let r = DenseMatrix::from_fn(m, p, |_, _| rng.random::<f64>());
        let target = rng.random_range(0..p);
        let mut rows: Vec<usize> = (0..m).collect();
        rows.shuffle(&mut rng);
        rows.truncate(12);
        let a = rng.random_range(0.5..3.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let values: Vec<f64> = rows.iter().map(|&i| a * r[(i, target)] + 2.0 + 0.05 * rng.random::<f64>()).collect();
        if match_factor(&r, &meas("x", &rows, &values)).unwrap().column == target {
            hits += 1;
        }
    }
    assert!(hits * 100 >= 95 * trials, "{hits} of {trials}");
}

#[test]
fn assignment_beats_greedy_on_a_conflict() {
    let r = DenseMatrix::from_rows(&[
        vec![1.0, 1.0],
        vec![2.0, 2.5],
        vec![3.0, 2.0],
        vec![4.0, 4.2],
    ])
    .unwrap();
    let cfgs = [0, 1, 2, 3];
    let ms = vec![meas("a", &cfgs, &[1.0, 2.2, 2.8, 4.1]), meas("b", &cfgs, &[1.0, 2.0, 3.0, 4.0])];
    let out = match_factors(&r, &ms).unwrap();
    let cols: Vec<usize> = out.iter().map(|x| x.column).collect();
    assert_eq!(cols.len(), 2);
    assert_ne!(cols[0], cols[1]);
    assert!(match_factors(&r, &[]).is_err());
}

#[test]
fn overlap_report_is_sorted_and_checked() {
    let supports = vec![vec![0, 1, 2, 3], vec![10, 11, 12], vec![4, 5]];
    let prior = vec![("A".to_string(), vec![0, 1, 2, 3, 4]), ("B".to_string(), vec![10, 11, 12, 13])];
    let rep = set_overlap_report(&supports, &prior, 100).unwrap();
    assert_eq!(rep.rows.len(), 6);
    assert!(rep.rows.windows(2).all(|w| w[0].test.log_pval <= w[1].test.log_pval));
    assert_eq!(rep.assignment, vec![(0, 0), (1, 1)]);
    let tsv = rep.to_tsv();
    assert!(tsv.starts_with("regulator\tset_name\toverlap\tlog_pval\n"));
    assert_eq!(tsv.lines().nth(1).unwrap().split('\t').next(), Some("1"));
    assert!(set_overlap_report(&supports, &prior, 12).is_err());
}

fn brute_force_total(w: &[Vec<f64>]) -> f64 {
    fn rec(w: &[Vec<f64>], i: usize, used: &mut [bool]) -> f64 {
        if i == w.len() {
            return 0.0;
        }
        let mut best = rec(w, i + 1, used);
        for j in 0..used.len() {
            if !used[j] {
                used[j] = true;
                best = best.max(w[i][j] + rec(w, i + 1, used));
                used[j] = false;
            }
        }
        best
    }
    rec(w, 0, &mut vec![false; w[0].len()])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn tail_matches_exact_arithmetic(n in 1u64..400, fa in 0.0f64..1.0, fb in 0.0f64..1.0, fk in 0.0f64..1.0) {
        let a = (fa * n as f64) as u64;
        let b = (fb * n as f64) as u64;
        let k = (fk * a.min(b) as f64).round() as u64;
        let got = hypergeom_log_tail(n, a, b, k).unwrap();
        let want = exact_log_tail(n, a, b, k);
        prop_assert!(got <= 0.0);
        prop_assert!((got - want).abs() <= 1e-9 * want.abs().max(1.0), "{} vs {}", got, want);
    }

    #[test]
    fn tail_is_monotone(n in 2u64..3000, fa in 0.0f64..1.0, fb in 0.0f64..1.0) {
        let a = (fa * n as f64) as u64;
        let b = (fb * n as f64) as u64;
        let mut last = 0.0;
        for k in 0..=a.min(b) {
            let lp = hypergeom_log_tail(n, a, b, k).unwrap();
            prop_assert!(lp <= last + 1e-12, "k={}: {} > {}", k, lp, last);
            last = lp;
        }
    }

    #[test]
    fn match_is_affine_invariant(
        data in prop::collection::vec(-1.0f64..1.0, 8 * 4),
        idx in Just((0..8).collect::<Vec<usize>>()).prop_shuffle(),
        values in prop::collection::vec(-1.0f64..1.0, 5),
        alpha in prop_oneof![-4.0f64..-0.25, 0.25f64..4.0],
        beta in -3.0f64..3.0,
    ) {
        let r = DenseMatrix::from_vec(8, 4, data).unwrap();
        let idx = &idx[..5];
        let base = match match_factor(&r, &meas("m", idx, &values)) { Ok(m) => m, Err(_) => return Ok(()) };
        let moved: Vec<f64> = values.iter().map(|v| alpha * v + beta).collect();
        let other = match_factor(&r, &meas("m", idx, &moved)).unwrap();
        prop_assert!((base.rho - other.rho).abs() < 1e-9);
        // Columns may tie; the correlation is what must agree.
        prop_assert!((0.0..=1.0 + 1e-12).contains(&base.rho));
        let col_scaled = DenseMatrix::from_fn(8, 4, |i, j| (j as f64 + 1.5) * r[(i, j)] - 0.7);
        let third = match_factor(&col_scaled, &meas("m", idx, &values)).unwrap();
        prop_assert!((base.rho - third.rho).abs() < 1e-9);
    }

    #[test]
    fn assignment_is_optimal(
        data in prop::collection::vec(-1.0f64..1.0, 10 * 4),
        raw in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 6), 1..5),
    ) {
        let r = DenseMatrix::from_vec(10, 4, data).unwrap();
        let cfgs = [0, 2, 3, 5, 7, 9];
        let ms: Vec<FactorMeasurement> = raw.iter().enumerate().map(|(k, v)| meas(&k.to_string(), &cfgs, v)).collect();
        let out = match match_factors(&r, &ms) { Ok(o) => o, Err(_) => return Ok(()) };
        let w: Vec<Vec<f64>> = ms.iter().map(|m| {
            (0..4).map(|j| {
                let x: Vec<f64> = cfgs.iter().map(|&i| r[(i, j)]).collect();
                let n = x.len() as f64;
                let (mx, my) = (x.iter().sum::<f64>() / n, m.values.iter().sum::<f64>() / n);
                let sxy: f64 = x.iter().zip(&m.values).map(|(a, b)| (a - mx) * (b - my)).sum();
                let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
                let syy: f64 = m.values.iter().map(|b| (b - my).powi(2)).sum();
                (sxy / (sxx * syy).sqrt()).abs()
            }).collect()
        }).collect();
        let total: f64 = out.iter().map(|x| x.rho).sum();
        prop_assert!((total - brute_force_total(&w)).abs() < 1e-9);
        // Greedy in input order never beats the assignment.
        let mut used = [false; 4];
        let mut greedy = 0.0;
        for row in &w {
            if let Some((j, v)) = row.iter().enumerate().filter(|(j, _)| !used[*j]).max_by(|a, b| a.1.total_cmp(b.1)) {
                used[j] = true;
                greedy += v;
            }
        }
        prop_assert!(total + 1e-12 >= greedy);
        for x in &out {
            prop_assert!((x.rho - w[x.factor][x.column]).abs() < 1e-9);
        }
    }
}
