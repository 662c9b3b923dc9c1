//! One greedy pursuit on a small planted instance, showing the partition it
//! ends with and the sparse row vector it finds.
//!
//! cargo run --release --example pursue_single_column

use sparsenet::linalg::truncated_svd;
use sparsenet::sparse_basis::{pursue_column, PursuitConfig};
use sparsenet::DenseMatrix;

fn main() -> sparsenet::Result<()> {
    // Two hidden variables over eight observed ones; the first touches three.
    let c = DenseMatrix::from_rows(&[
        vec![0.9, -0.4, 0.0, 0.0, 0.7, 0.0, 0.0, 0.0],
        vec![0.3, 0.5, -0.8, 0.6, 0.0, 0.4, -0.5, 0.9],
    ])?;
    let r = DenseMatrix::from_fn(30, 2, |i, j| ((i * 7 + j * 3) % 11) as f64 / 11.0 + 0.05 * j as f64);
    let g = r.matmul(&c)?;
    let v = truncated_svd(&g, 2)?.v;

    let sol = pursue_column(&v, &v, &PursuitConfig::default())?;
    let x = v.matvec(&sol.b);
    println!("termination {:?} after {} cycles (bound {})", sol.termination, sol.cycles, v.rows() - v.cols() + 1);
    println!("removed rows {:?}", sol.partition.omega_minus());
    println!("support {:?}, exact {}", sol.support, sol.is_exact());
    println!("V b = {:?}", x.iter().map(|y| format!("{y:+.3}")).collect::<Vec<_>>());
    Ok(())
}
