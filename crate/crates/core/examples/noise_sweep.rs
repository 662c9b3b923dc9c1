//! A small benchmark sweep over the noise level, run with two stagnation
//! tolerances.
//!
//! With noisy data the retained rows never become exactly singular, so the
//! pursuit stops on eigenvector stagnation. A tight tolerance suits clean or
//! mildly noisy data; under heavy noise it can run every pursuit until the
//! rows are exhausted, and a looser one does better.
//!
//! cargo run --release --example noise_sweep

use sparsenet::evaluation::{benchmark_sweep, Degree, SimParams, SweepAxis, SweepSpec};
use sparsenet::netsim::Topology;
use sparsenet::sparse_basis::PursuitConfig;

fn main() -> sparsenet::Result<()> {
    let grid = vec![0.0, 0.1, 0.3, 0.6];
    let mut columns = Vec::new();
    for tau_conv in [1e-8, 1e-6] {
        let spec = SweepSpec {
            axis: SweepAxis::Noise,
            grid: grid.clone(),
            base: SimParams {
                n: 120,
                p: 6,
                m: 150,
                topology: Topology::Poisson,
                degree: Degree::FractionOfN(0.1),
                noise: 0.0,
            },
            seeds: vec![1, 2, 3],
            overshoot: false,
            cfg: PursuitConfig { tau_conv, ..PursuitConfig::default() },
            jobs: 2,
            timing: false,
        };
        columns.push(benchmark_sweep(&spec)?);
    }

    println!("noise   tau_conv=1e-8      tau_conv=1e-6");
    for (k, x) in grid.iter().enumerate() {
        let cell = |t: &sparsenet::evaluation::SweepTable| {
            let a = &t.aggregate[k];
            format!("{:.3} ({} of 3 ok)", a.mean_rho, a.n_seeds)
        };
        println!("{x:<7} {:<18} {}", cell(&columns[0]), cell(&columns[1]));
    }
    Ok(())
}
