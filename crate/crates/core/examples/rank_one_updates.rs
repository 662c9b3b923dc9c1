//! Removing rows one at a time with Sherman-Morrison downdates and comparing
//! against direct inversion of the retained rows.
//!
//! cargo run --release --example rank_one_updates

use sparsenet::linalg::{gram_inverse, gram_remove_row, GramUpdate, InverseGram, DEFAULT_TAU_SING};
use sparsenet::DenseMatrix;

fn main() -> sparsenet::Result<()> {
    let v = DenseMatrix::from_fn(12, 3, |i, j| ((i * 5 + j * 7 + 1) % 13) as f64 / 13.0 - 0.4);
    let mut k = gram_inverse(&v, DEFAULT_TAU_SING)?;
    let mut kept: Vec<usize> = (0..12).collect();

    for i in 0..12 {
        match gram_remove_row(&k, v.row(i), DEFAULT_TAU_SING) {
            GramUpdate::Singular(dir) => {
                let d: Vec<String> = dir.iter().map(|x| format!("{x:+.3}")).collect();
                println!("removing row {i} makes the Gram singular; null direction [{}]", d.join(", "));
                break;
            }
            GramUpdate::Updated(next) => {
                k = next;
                kept.retain(|&r| r != i);
                let direct: InverseGram = gram_inverse(&v.select_rows(&kept), DEFAULT_TAU_SING)?;
                let gap = k.matrix().sub(direct.matrix())?.frobenius_norm() / direct.matrix().frobenius_norm();
                println!("removed row {i:>2}, {} rows left, relative gap {gap:.1e}", kept.len());
            }
        }
    }
    Ok(())
}
