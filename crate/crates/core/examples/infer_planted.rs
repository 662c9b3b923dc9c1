//! Full inference on simulated data, scored against the gold network.
//!
//! cargo run --release --example infer_planted [seed]

use sparsenet::decomposition::infer_network;
use sparsenet::evaluation::{edge_metrics, evaluate_recovery};
use sparsenet::netsim::{gen_poisson_network, simulate_data};
use sparsenet::sparse_basis::PursuitConfig;

fn main() -> sparsenet::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let net = gen_poisson_network(150, 8, 20.0, seed)?;
    let ds = simulate_data(&net, 200, 0.0, seed)?;

    let f = infer_network(&ds.g, 8, &PursuitConfig::default())?;
    let score = evaluate_recovery(&f.c_hat, &net.adjacency())?;
    let edges = edge_metrics(&score, &f.support, &net.supports());
    println!("regulators inferred {} of {}", f.p(), net.n_hidden);
    println!("rho_bar {:.4}", score.rho_bar);
    println!("edges: precision {:.3} recall {:.3} F1 {:.3}", edges.precision, edges.recall, edges.f1);
    println!("pursuits {} (longest {} cycles)", f.stats.pursuits, f.stats.max_cycles);
    Ok(())
}
