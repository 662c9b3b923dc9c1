//! Hypergeometric enrichment of inferred target sets against prior sets.
//!
//! cargo run --release --example overlap_enrichment

use sparsenet::interpret::{hypergeom_log_tail, set_overlap_report};

fn main() -> sparsenet::Result<()> {
    // 10 items, sets of 5 and 4 sharing all 4: Pr = 5/210.
    let lp = hypergeom_log_tail(10, 5, 4, 4)?;
    println!("Pr(overlap >= 4) = {:.6} (5/210 = {:.6})", lp.exp(), 5.0 / 210.0);

    let targets = vec![(0..12).collect::<Vec<usize>>(), (40..55).collect()];
    let prior = vec![
        ("stress".to_string(), (2..14).collect::<Vec<usize>>()),
        ("ribosome".to_string(), (45..70).collect()),
        ("random".to_string(), vec![3, 17, 29, 41, 66, 90]),
    ];
    let rep = set_overlap_report(&targets, &prior, 100)?;
    print!("{}", rep.to_tsv());
    println!("best assignment {:?}", rep.assignment);
    Ok(())
}
