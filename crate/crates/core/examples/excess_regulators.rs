//! Asking for more regulators than exist: the extra basis vectors either
//! duplicate an earlier column or carry no activity and get pruned.
//!
//! The surplus directions of the SVD are dense, and they can also pull a
//! pursuit away from a real sparse column, so an overshooting basis sometimes
//! loses a regulator that an exact-size basis finds. Try other seeds to see
//! both outcomes.
//!
//! cargo run --release --example excess_regulators [seed]

use sparsenet::decomposition::{default_p_star, infer_network};
use sparsenet::evaluation::evaluate_recovery;
use sparsenet::netsim::{gen_poisson_network, simulate_data};
use sparsenet::sparse_basis::PursuitConfig;

fn main() -> sparsenet::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let net = gen_poisson_network(100, 6, 15.0, seed)?;
    let ds = simulate_data(&net, 150, 0.0, seed)?;

    for p_star in [6, default_p_star(6)] {
        let f = infer_network(&ds.g, p_star, &PursuitConfig::default())?;
        let score = evaluate_recovery(&f.c_hat, &net.adjacency())?;
        let exact = score.rho.iter().filter(|&&r| r > 1.0 - 1e-9).count();
        println!(
            "p_star {p_star:>2}: kept {}, pruned {}, dropped {}; {exact} of {} gold regulators matched exactly",
            f.p(),
            f.pruned,
            f.dropped,
            net.n_hidden
        );
        if p_star > 6 {
            let s: Vec<String> = f.singular_values.iter().map(|s| format!("{s:.1e}")).collect();
            println!("singular values {}", s.join(" "));
        }
    }
    Ok(())
}
