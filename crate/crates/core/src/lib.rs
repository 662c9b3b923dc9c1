//! Sparse bipartite network inference with hidden variables.
//!
//! A data matrix `G` (configurations by observed variables) is modelled as
//! `R C + noise` with a sparse loading matrix `C`. The truncated SVD of `G`
//! fixes `R C` up to an invertible rotation `B`; [`sparse_basis`] finds the
//! rotation column by column with a greedy null-space pursuit so that
//! `C = (V B)^T` is as sparse as possible.
//!
//! ```
//! use sparsenet::{netsim, decomposition, evaluation, sparse_basis::PursuitConfig};
//!
//! let net = netsim::gen_poisson_network(40, 3, 8.0, 7).unwrap();
//! let data = netsim::simulate_data(&net, 60, 0.0, 7).unwrap();
//! let fit = decomposition::infer_network(&data.g, 3, &PursuitConfig::default()).unwrap();
//! let score = evaluation::evaluate_recovery(&fit.c_hat, &net.adjacency()).unwrap();
//! assert!(score.rho_bar > 0.99);
//! ```

pub mod cli;
pub mod decomposition;
pub mod error;
pub mod evaluation;
pub mod interpret;
pub mod io;
pub mod linalg;
pub mod netsim;
pub mod sparse_basis;

pub use error::{Error, Result};
pub use linalg::DenseMatrix;
