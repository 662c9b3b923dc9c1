//! Scoring is blind to row order and row scale: a shuffled, rescaled copy of
//! the gold matrix scores a perfect match.
//!
//! cargo run --release --example evaluate_recovery

use sparsenet::evaluation::evaluate_recovery;
use sparsenet::netsim::gen_poisson_network;
use sparsenet::DenseMatrix;

fn main() -> sparsenet::Result<()> {
    let gold = gen_poisson_network(60, 5, 12.0, 1)?.adjacency();
    let order = [3, 0, 4, 1, 2];
    let scale = [2.0, -0.5, 10.0, -3.0, 0.1];
    let shuffled = DenseMatrix::from_fn(5, 60, |i, j| scale[i] * gold[(order[i], j)]);

    let res = evaluate_recovery(&shuffled, &gold)?;
    println!("pairs {:?}", res.pairs);
    println!("rho_bar {:.12}", res.rho_bar);
    println!("scale back to gold {:?}", res.scale.iter().map(|s| format!("{s:.3}")).collect::<Vec<_>>());

    // Dropping one row costs it a zero in the mean.
    let partial = shuffled.select_rows(&[0, 1, 2, 3]);
    println!("four of five rows: rho_bar {:.3}", evaluate_recovery(&partial, &gold)?.rho_bar);
    Ok(())
}
