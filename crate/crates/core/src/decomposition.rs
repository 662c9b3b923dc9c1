//! End-to-end inference `G -> (R̂, Ĉ)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{gram_inverse, truncated_svd, DenseMatrix, TruncatedSvd};
use crate::sparse_basis::{solve_basis_with_stats, BasisMatrix, PursuitConfig, PursuitStats};

/// Columns whose scaled activity weights all fall below this are discarded.
pub const PRUNE_THRESHOLD: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct Factorization {
    /// `M × p` hidden-variable activities.
    pub r_hat: DenseMatrix,
    /// `p × N` thresholded loadings.
    pub c_hat: DenseMatrix,
    /// Nonzero columns of each row of `c_hat`.
    pub support: Vec<Vec<usize>>,
    /// `‖G − R̂ Ĉ‖_F` for the thresholded `Ĉ`.
    pub residual_fro: f64,
    /// Regulators removed by [`prune_regulators`].
    pub pruned: usize,
    /// Basis columns the pursuit could not fill.
    pub dropped: usize,
    pub p_star: usize,
    /// Surviving basis columns, aligned with the rows of `c_hat`.
    pub basis: BasisMatrix,
    pub singular_values: Vec<f64>,
    /// `sqrt` of the summed squares of the discarded singular values.
    pub svd_tail: f64,
    pub stats: PursuitStats,
}

impl Factorization {
    pub fn p(&self) -> usize {
        self.c_hat.rows()
    }

    pub fn nonzeros(&self) -> usize {
        self.c_hat.count_nonzero()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveParams {
    pub lambda: f64,
    /// Entries with `|c| <= zero_tol * max|c|` do not count as nonzero.
    pub zero_tol: f64,
}

impl Default for ObjectiveParams {
    fn default() -> Self {
        ObjectiveParams { lambda: 0.0, zero_tol: 0.0 }
    }
}

/// `ceil(1.25 p) + 2`, the basis size used when only a guess of `P` is known.
pub fn default_p_star(p_guess: usize) -> usize {
    (5 * p_guess).div_ceil(4) + 2
}

/// Factors `g` with a rank-`p_star` SVD rotated by the pursued basis.
pub fn infer_network(g: &DenseMatrix, p_star: usize, cfg: &PursuitConfig) -> Result<Factorization> {
    let (m, n) = g.shape();
    if m < 2 {
        return Err(Error::Dimension(format!("need at least two observations, got {m}")));
    }
    if p_star == 0 || n <= p_star || p_star > m {
        return Err(Error::Dimension(format!("p_star={p_star} invalid for a {m}x{n} data matrix")));
    }
    cfg.validate()?;
    let svd = truncated_svd(g, p_star)?;
    let (basis, stats) = solve_basis_with_stats(&svd.v, p_star, cfg)?;
    if basis.p() == 0 {
        return Err(Error::EmptyModel);
    }
    let weights = activity_weights(&svd.s, &basis.matrix(), cfg.tau_sing)?;
    let c_raw = basis.matrix().transpose().matmul(&svd.v.transpose())?;
    let scale = svd.s[0].max(f64::MIN_POSITIVE);
    let keep = prune_regulators(&weights.scale(1.0 / scale), &threshold_loadings(&c_raw, &basis), PRUNE_THRESHOLD)?;
    let pruned = basis.p() - keep.len();

    let mut kept = basis.clone();
    kept.columns = keep.iter().map(|&j| basis.columns[j].clone()).collect();
    let weights = activity_weights(&svd.s, &kept.matrix(), cfg.tau_sing)?;
    let r_hat = svd.u.matmul(&weights)?;
    let c_hat = threshold_loadings(&c_raw.select_rows(&keep), &kept);
    let support = (0..c_hat.rows())
        .map(|j| (0..n).filter(|&i| c_hat[(j, i)] != 0.0).collect())
        .collect();
    let residual_fro = g.sub(&r_hat.matmul(&c_hat)?)?.frobenius_norm();
    Ok(Factorization {
        r_hat,
        c_hat,
        support,
        residual_fro,
        pruned,
        dropped: basis.dropped,
        p_star,
        basis: kept,
        singular_values: svd.s.clone(),
        svd_tail: svd.tail_norm,
        stats,
    })
}

/// `diag(s) B (BᵀB)⁻¹`, so that `R̂ = U · weights`. For square invertible
/// `B` this is `diag(s) B⁻ᵀ`; for fewer columns it is the least-squares fit
/// of `U diag(s) Vᵀ` by `R̂ Ĉ` with `Ĉ = (V B)ᵀ`.
pub fn activity_weights(s: &[f64], b: &DenseMatrix, tau_sing: f64) -> Result<DenseMatrix> {
    if b.rows() != s.len() {
        return Err(Error::Dimension(format!("{} singular values for a {:?} basis", s.len(), b.shape())));
    }
    let inv = gram_inverse(b, tau_sing).map_err(|_| Error::Singular("basis matrix is not of full column rank".into()))?;
    let sb = DenseMatrix::from_fn(b.rows(), b.cols(), |i, j| s[i] * b[(i, j)]);
    sb.matmul(inv.matrix())
}

/// Keeps, for each row, only the entries on the column's support.
fn threshold_loadings(c_raw: &DenseMatrix, basis: &BasisMatrix) -> DenseMatrix {
    let mut c = DenseMatrix::zeros(c_raw.rows(), c_raw.cols());
    for (j, col) in basis.columns.iter().enumerate() {
        for &i in &col.support {
            c[(j, i)] = c_raw[(j, i)];
        }
    }
    c
}

/// Indices of the regulators to keep: column `j` goes if every entry of
/// `weights[.., j]` is at most `threshold` in magnitude, or if row `j` of
/// `c_hat` is entirely zero.
pub fn prune_regulators(weights: &DenseMatrix, c_hat: &DenseMatrix, threshold: f64) -> Result<Vec<usize>> {
    if weights.cols() != c_hat.rows() {
        return Err(Error::Dimension(format!(
            "{} weight columns for {} loading rows",
            weights.cols(),
            c_hat.rows()
        )));
    }
    let keep: Vec<usize> = (0..weights.cols())
        .filter(|&j| {
            let wmax = (0..weights.rows()).fold(0.0f64, |m, i| m.max(weights[(i, j)].abs()));
            wmax > threshold && c_hat.row(j).iter().any(|x| *x != 0.0)
        })
        .collect();
    if keep.is_empty() {
        return Err(Error::EmptyModel);
    }
    Ok(keep)
}

/// `‖g − r c‖_F² + λ · nnz(c)`.
pub fn objective_value(g: &DenseMatrix, r: &DenseMatrix, c: &DenseMatrix, params: ObjectiveParams) -> Result<f64> {
    if !(params.lambda >= 0.0 && params.lambda.is_finite()) {
        return Err(Error::Parameter(format!("lambda must be finite and non-negative, got {}", params.lambda)));
    }
    let fit = g.sub(&r.matmul(c)?)?.frobenius_norm().powi(2);
    let thresh = params.zero_tol * c.max_abs();
    let nnz = c.as_slice().iter().filter(|x| x.abs() > thresh).count();
    Ok(fit + params.lambda * nnz as f64)
}

/// Reconstruction `R̂ Ĉ` of the unthresholded factors, used to check that the
/// rotation leaves the truncated SVD intact.
pub fn rotated_reconstruction(svd: &TruncatedSvd, basis: &BasisMatrix, tau_sing: f64) -> Result<DenseMatrix> {
    let b = basis.matrix();
    let r = svd.u.matmul(&activity_weights(&svd.s, &b, tau_sing)?)?;
    let c = b.transpose().matmul(&svd.v.transpose())?;
    r.matmul(&c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_star_default() {
        assert_eq!(default_p_star(10), 15);
        assert_eq!(default_p_star(4), 7);
        assert_eq!(default_p_star(1), 4);
    }

    #[test]
    fn objective_examples() {
        let i2 = DenseMatrix::identity(2);
        let half = ObjectiveParams { lambda: 0.5, zero_tol: 0.0 };
        assert_eq!(objective_value(&i2, &i2, &i2, half).unwrap(), 1.0);
        assert_eq!(objective_value(&i2, &i2, &i2, ObjectiveParams::default()).unwrap(), 0.0);
        let g = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let z = DenseMatrix::zeros(2, 2);
        assert_eq!(objective_value(&g, &i2, &z, half).unwrap(), 30.0);
        let bad = ObjectiveParams { lambda: -1.0, zero_tol: 0.0 };
        assert!(objective_value(&g, &i2, &z, bad).is_err());
    }

    #[test]
    fn prune_drops_tiny_column() {
        let w = DenseMatrix::from_rows(&[vec![0.7, 1e-12], vec![0.2, -1e-13]]).unwrap();
        let c = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(prune_regulators(&w, &c, PRUNE_THRESHOLD).unwrap(), vec![0]);
        let w = DenseMatrix::identity(2);
        assert_eq!(prune_regulators(&w, &c, PRUNE_THRESHOLD).unwrap(), vec![0, 1]);
        let empty = DenseMatrix::zeros(2, 2);
        assert!(matches!(prune_regulators(&empty, &c, PRUNE_THRESHOLD), Err(Error::EmptyModel)));
    }

    #[test]
    fn rank_one_factorization() {
        let a = [1.0, 2.0, 0.5];
        let c = [0.0, 3.0, 0.0, -1.0, 2.0];
        let g = DenseMatrix::from_fn(3, 5, |i, j| a[i] * c[j]);
        let fit = infer_network(&g, 1, &PursuitConfig::default()).unwrap();
        assert_eq!(fit.p(), 1);
        assert!(fit.residual_fro < 1e-12);
        let row = fit.c_hat.row(0);
        let ratio = row[1] / c[1];
        for j in 0..5 {
            assert!((row[j] - ratio * c[j]).abs() < 1e-12);
        }
    }
}
