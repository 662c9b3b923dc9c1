//! Draws a Poisson and a power-law network and simulates noisy observations.
//!
//! cargo run --release --example simulate_network

use sparsenet::netsim::{gen_poisson_network, gen_powerlaw_network, simulate_data};

fn main() -> sparsenet::Result<()> {
    let poisson = gen_poisson_network(200, 10, 20.0, 7)?;
    let powerlaw = gen_powerlaw_network(200, 10, 80.0, 2.5, 7)?;

    for (name, net) in [("poisson", &poisson), ("power-law", &powerlaw)] {
        let mut deg = net.out_degrees();
        deg.sort_unstable();
        println!(
            "{name:>9}: {} edges, mean out-degree {:.1}, min {} max {}",
            net.edges.len(),
            net.realized_mean_out_degree(),
            deg[0],
            deg[deg.len() - 1]
        );
    }

    let ds = simulate_data(&poisson, 100, 0.1, 7)?;
    let signal = ds.r_gold.matmul(&poisson.adjacency())?;
    let noise = ds.g.sub(&signal)?;
    println!(
        "data {}x{}, noise/signal Frobenius ratio {:.3}",
        ds.g.rows(),
        ds.g.cols(),
        noise.frobenius_norm() / signal.frobenius_norm()
    );
    Ok(())
}
