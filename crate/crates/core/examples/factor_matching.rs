//! Matching partial measurements of physical factors to inferred activities.
//!
//! cargo run --release --example factor_matching

use sparsenet::decomposition::infer_network;
use sparsenet::interpret::{match_factors, FactorMeasurement};
use sparsenet::netsim::{gen_poisson_network, simulate_data};
use sparsenet::sparse_basis::PursuitConfig;

fn main() -> sparsenet::Result<()> {
    let net = gen_poisson_network(80, 4, 10.0, 5)?;
    let ds = simulate_data(&net, 60, 0.0, 5)?;
    let f = infer_network(&ds.g, 4, &PursuitConfig::default())?;

    // Regulators 2 and 0 measured in a dozen configurations each, in some unit.
    let measure = |reg: usize, label: &str, first: usize| {
        let config_indices: Vec<usize> = (first..first + 12).collect();
        let values = config_indices.iter().map(|&i| 40.0 * ds.r_gold[(i, reg)] + 3.0).collect();
        FactorMeasurement { values, config_indices, label: label.into() }
    };
    let meas = [measure(2, "kinase-a", 0), measure(0, "tf-b", 30)];

    for m in match_factors(&f.r_hat, &meas)? {
        println!("{:>8} -> column {} (|rho| {:.4}, scale {:+.3})", m.label, m.column, m.rho, m.scale);
    }
    Ok(())
}
