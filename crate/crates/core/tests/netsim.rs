use proptest::prelude::*;
use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, DiscreteCDF};

use sparsenet::netsim::{gen_poisson_network, gen_powerlaw_network, simulate_data, NetworkModel};

fn population_std(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt()
}

fn check_invariants(net: &NetworkModel) {
    let n = net.n_observed;
    let mut covered = vec![false; n];
    let mut out = vec![0usize; net.n_hidden];
    for e in &net.edges {
        assert!(e.weight.abs() >= 0.2 && e.weight.abs() <= 1.0, "weight {}", e.weight);
        covered[e.target] = true;
        out[e.regulator] += 1;
    }
    assert!(covered.iter().all(|&c| c), "uncovered target");
    assert!(out.iter().all(|&d| d >= 1), "regulator without targets");
    let c = net.adjacency();
    assert_eq!(c.shape(), (net.n_hidden, n));
    assert_eq!(c.as_slice().iter().filter(|&&x| x != 0.0).count(), net.edges.len());
}

#[test]
fn poisson_out_degrees_are_binomial() {
    let (n, p, mean) = (1000, 30, 200.0);
    let degrees: Vec<usize> = (0..50u64)
        .flat_map(|seed| gen_poisson_network(n, p, mean, seed).unwrap().out_degrees())
        .collect();
    let law = Binomial::new(0.2, n as u64).unwrap();
    // Bins of roughly equal mass over the bulk, with open tails.
    let edges = [0u64, 180, 188, 194, 198, 202, 206, 212, 220, 1000];
    let mut stat = 0.0;
    for w in edges.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let prob = law.cdf(hi) - if lo == 0 { 0.0 } else { law.cdf(lo) };
        let observed = degrees.iter().filter(|&&d| (d as u64) > lo && (d as u64) <= hi || lo == 0 && d == 0).count();
        let expected = prob * degrees.len() as f64;
        stat += (observed as f64 - expected).powi(2) / expected;
    }
    let dof = (edges.len() - 2) as f64;
    let pval = 1.0 - ChiSquared::new(dof).unwrap().cdf(stat);
    assert!(pval > 0.01, "chi-square {stat:.2} on {dof} dof, p = {pval:.4}");
}

#[test]
fn power_law_ccdf_slope() {
    let gamma = 2.5;
    // Enough regulators that the mean-degree resampling almost never fires;
    // with few of them it preferentially rejects heavy draws and thins the tail.
    let mut degrees: Vec<usize> = (0..20u64)
        .flat_map(|seed| gen_powerlaw_network(2000, 1000, 30.0, gamma, seed).unwrap().out_degrees())
        .collect();
    degrees.sort_unstable();
    let total = degrees.len() as f64;
    // Least squares of log Pr(D >= d) against log d on the well-populated range.
    let pts: Vec<(f64, f64)> = (12..=300)
        .map(|d| {
            let tail = degrees.len() - degrees.partition_point(|&x| x < d);
            ((d as f64).ln(), (tail as f64 / total).ln())
        })
        .collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!((slope - (1.0 - gamma)).abs() <= 0.3, "slope {slope:.3}");
}

#[test]
fn power_law_mean_degree_within_tolerance() {
    for seed in 0..20 {
        let net = gen_powerlaw_network(500, 30, 200.0, 2.5, seed).unwrap();
        let got = net.realized_mean_out_degree();
        assert!((got - 200.0).abs() <= 0.15 * 200.0, "seed {seed}: {got}");
        check_invariants(&net);
    }
}

#[test]
fn complete_graph() {
    let net = gen_poisson_network(40, 5, 40.0, 3).unwrap();
    assert_eq!(net.edges.len(), 200);
    assert!(net.out_degrees().iter().all(|&d| d == 40));
}

#[test]
fn simulated_shape_and_exact_product() {
    let net = gen_poisson_network(500, 20, 100.0, 11).unwrap();
    let data = simulate_data(&net, 280, 0.0, 11).unwrap();
    assert_eq!(data.g.shape(), (280, 500));
    assert_eq!(data.r_gold.shape(), (280, 20));
    assert!(data.r_gold.as_slice().iter().all(|&r| (0.0..1.0).contains(&r)));
    let gap = data.g.sub(&data.r_gold.matmul(&net.adjacency()).unwrap()).unwrap().frobenius_norm();
    assert_eq!(gap, 0.0);
}

#[test]
fn noise_has_the_requested_scale() {
    let net = gen_poisson_network(400, 20, 40.0, 5).unwrap();
    let data = simulate_data(&net, 300, 0.1, 5).unwrap();
    let clean = data.r_gold.matmul(&net.adjacency()).unwrap();
    let noise = data.g.sub(&clean).unwrap();
    let ratio = population_std(noise.as_slice()) / (0.1 * population_std(clean.as_slice()));
    assert!((ratio - 1.0).abs() < 0.02, "ratio {ratio:.4}");
}

#[test]
fn noise_grows_with_level() {
    let net = gen_poisson_network(100, 8, 10.0, 9).unwrap();
    let clean = simulate_data(&net, 50, 0.0, 9).unwrap().g;
    let mut last = 0.0;
    for eta in [0.05, 0.1, 0.3, 0.6, 0.9] {
        let g = simulate_data(&net, 50, eta, 9).unwrap().g;
        let norm = g.sub(&clean).unwrap().frobenius_norm();
        assert!(norm > last, "eta {eta}: {norm} <= {last}");
        last = norm;
    }
}

#[test]
fn bad_parameters_are_rejected() {
    assert!(gen_poisson_network(0, 3, 1.0, 0).is_err());
    assert!(gen_poisson_network(10, 3, 11.0, 0).is_err());
    assert!(gen_poisson_network(10, 3, 0.5, 0).is_err());
    assert!(gen_powerlaw_network(10, 3, 2.0, 1.0, 0).is_err());
    assert!(gen_powerlaw_network(100, 3, 1.0, 2.0, 0).is_err());
    let net = gen_poisson_network(10, 2, 3.0, 0).unwrap();
    assert!(simulate_data(&net, 0, 0.0, 0).is_err());
    assert!(simulate_data(&net, 5, 1.0, 0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn poisson_networks_are_valid_and_reproducible(n in 5usize..80, p in 1usize..12, frac in 0.05f64..1.0, seed in any::<u64>()) {
        let mean = (frac * n as f64).max(1.0);
        let a = gen_poisson_network(n, p, mean, seed);
        if let Ok(a) = a {
            check_invariants(&a);
            prop_assert_eq!(&a, &gen_poisson_network(n, p, mean, seed).unwrap());
        }
    }

    #[test]
    fn powerlaw_networks_are_valid_and_reproducible(n in 10usize..80, p in 1usize..12, frac in 0.1f64..0.9, seed in any::<u64>()) {
        let mean = (frac * n as f64).max(2.0);
        if let Ok(a) = gen_powerlaw_network(n, p, mean, 2.5, seed) {
            check_invariants(&a);
            prop_assert_eq!(&a, &gen_powerlaw_network(n, p, mean, 2.5, seed).unwrap());
            let data = simulate_data(&a, 7, 0.2, seed).unwrap();
            prop_assert_eq!(&data.g, &simulate_data(&a, 7, 0.2, seed).unwrap().g);
        }
    }
}
