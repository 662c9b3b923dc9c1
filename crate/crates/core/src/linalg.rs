//! Dense kernels used by the pursuit: truncated SVD, symmetric eigensolvers and
//! rank-one maintenance of an inverse Gram matrix.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Default threshold below which a Gram matrix (or a Sherman-Morrison
/// denominator) is treated as singular.
pub const DEFAULT_TAU_SING: f64 = 1e-10;

/// Iteration cap for [`largest_eigvec`].
pub const POWER_MAX_ITER: usize = 10_000;

const JACOBI_MAX_SWEEPS: usize = 100;

/// Row-major dense matrix of finite `f64` values.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(12) {
            writeln!(f, "  {:?}", &self.row(i)[..self.cols.min(12)])?;
        }
        write!(f, "]")
    }
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from row-major data, rejecting wrong lengths and non-finite values.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        let m = DenseMatrix { rows, cols, data };
        m.check_finite()?;
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != cols) {
            return Err(Error::Dimension(format!(
                "row {i} has {} entries, expected {cols}",
                rows[i].len()
            )));
        }
        Self::from_vec(rows.len(), cols, rows.concat())
    }

    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::Dimension("columns of unequal length".into()));
        }
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            for (i, &x) in c.iter().enumerate() {
                m[(i, j)] = x;
            }
        }
        m.check_finite()?;
        Ok(m)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn check_finite(&self) -> Result<()> {
        match self.data.iter().position(|x| !x.is_finite()) {
            Some(k) => Err(Error::NonFinite { row: k / self.cols.max(1), col: k % self.cols.max(1) }),
            None => Ok(()),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (o, &b) in orow.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self * x`. Panics if `x.len() != self.cols()`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "matvec length mismatch");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `self^T * x`. Panics if `x.len() != self.rows()`.
    pub fn tr_matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows, "tr_matvec length mismatch");
        let mut out = vec![0.0; self.cols];
        for (i, &xi) in x.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += a * xi;
            }
        }
        out
    }

    /// `self^T * self`.
    pub fn gram(&self) -> Self {
        let mut g = Self::zeros(self.cols, self.cols);
        for i in 0..self.rows {
            let r = self.row(i);
            for a in 0..self.cols {
                let ra = r[a];
                if ra == 0.0 {
                    continue;
                }
                for b in a..self.cols {
                    g.data[a * self.cols + b] += ra * r[b];
                }
            }
        }
        for a in 0..self.cols {
            for b in 0..a {
                g.data[a * self.cols + b] = g.data[b * self.cols + a];
            }
        }
        g
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        DenseMatrix { rows: idx.len(), cols: self.cols, data }
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows, idx.len(), |i, j| self[(i, idx[j])])
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm2(&self.data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn sub(&self, other: &DenseMatrix) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::Dimension(format!(
                "cannot subtract {:?} from {:?}",
                other.shape(),
                self.shape()
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(DenseMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, alpha: f64) -> Self {
        DenseMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * alpha).collect() }
    }

    pub fn count_nonzero(&self) -> usize {
        self.data.iter().filter(|x| **x != 0.0).count()
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Pearson correlation of two equal-length vectors; `None` when either is constant.
pub fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return None;
    }
    Some((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

/// Flips `x` so that its largest-magnitude entry (lowest index on ties) is positive.
pub fn fix_sign(x: &mut [f64]) {
    let mut best = 0;
    for (i, v) in x.iter().enumerate() {
        if v.abs() > x[best].abs() {
            best = i;
        }
    }
    if x.get(best).is_some_and(|v| *v < 0.0) {
        x.iter_mut().for_each(|v| *v = -*v);
    }
}

fn normalize(x: &mut [f64]) -> f64 {
    let n = norm2(x);
    if n > 0.0 {
        x.iter_mut().for_each(|v| *v /= n);
    }
    n
}

/// Rank-`p` factors of a data matrix: `G ≈ u diag(s) v^T`.
#[derive(Clone, Debug)]
pub struct TruncatedSvd {
    pub u: DenseMatrix,
    pub s: Vec<f64>,
    pub v: DenseMatrix,
    /// Frobenius norm of the discarded part, `sqrt(sum of discarded s^2)`.
    pub tail_norm: f64,
}

impl TruncatedSvd {
    pub fn rank(&self) -> usize {
        self.s.len()
    }

    pub fn reconstruct(&self) -> DenseMatrix {
        let us = DenseMatrix::from_fn(self.u.rows(), self.s.len(), |i, j| self.u[(i, j)] * self.s[j]);
        us.matmul(&self.v.transpose()).expect("conforming factors")
    }
}

/// Truncated SVD by one-sided (Hestenes) Jacobi on the smaller dimension.
pub fn truncated_svd(g: &DenseMatrix, p_star: usize) -> Result<TruncatedSvd> {
    let (m, n) = g.shape();
    if p_star == 0 || p_star > m.min(n) {
        return Err(Error::Dimension(format!("rank {p_star} out of range for a {m}x{n} matrix")));
    }
    g.check_finite()?;
    // Orthogonalise the columns of G (n <= m) or of G^T.
    let transposed = n > m;
    let (len, k) = if transposed { (n, m) } else { (m, n) };
    let mut cols: Vec<Vec<f64>> = if transposed {
        (0..m).map(|i| g.row(i).to_vec()).collect()
    } else {
        (0..n).map(|j| g.column(j)).collect()
    };
    let mut rot: Vec<Vec<f64>> = (0..k)
        .map(|j| {
            let mut e = vec![0.0; k];
            e[j] = 1.0;
            e
        })
        .collect();
    hestenes(&mut cols, &mut rot)?;

    let sigma: Vec<f64> = cols.iter().map(|c| norm2(c)).collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]).then(a.cmp(&b)));
    let s: Vec<f64> = order[..p_star].iter().map(|&j| sigma[j]).collect();
    let tail_norm = order[p_star..].iter().map(|&j| sigma[j] * sigma[j]).sum::<f64>().sqrt();

    let mut left: Vec<Vec<f64>> = Vec::with_capacity(p_star);
    for &j in &order[..p_star] {
        let mut c = cols[j].clone();
        normalize(&mut c);
        left.push(c);
    }
    orthonormalize(&mut left, &s);
    let right: Vec<Vec<f64>> = order[..p_star].iter().map(|&j| rot[j].clone()).collect();
    let left = DenseMatrix::from_columns(&left)?;
    let right = DenseMatrix::from_columns(&right)?;
    debug_assert_eq!(left.rows(), len);
    let (u, v) = if transposed { (right, left) } else { (left, right) };
    Ok(TruncatedSvd { u, s, v, tail_norm })
}

/// Cyclic one-sided Jacobi: rotates `cols` until pairwise orthogonal,
/// accumulating the rotations in `rot` (stored by column).
fn hestenes(cols: &mut [Vec<f64>], rot: &mut [Vec<f64>]) -> Result<()> {
    let k = cols.len();
    let scale = cols.iter().map(|c| dot(c, c)).sum::<f64>();
    let floor = scale * 1e-300;
    let tol = 1e-15;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..k {
            for j in i + 1..k {
                let (lo, hi) = cols.split_at_mut(j);
                let (a, b) = (&mut lo[i], &mut hi[0]);
                let alpha = dot(a, a);
                let beta = dot(b, b);
                let gamma = dot(a, b);
                if alpha <= floor || beta <= floor || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(a, b, c, s);
                let (lo, hi) = rot.split_at_mut(j);
                rotate(&mut lo[i], &mut hi[0], c, s);
            }
        }
        if !rotated {
            return Ok(());
        }
    }
    Err(Error::Convergence { what: "one-sided Jacobi SVD", iterations: JACOBI_MAX_SWEEPS })
}

fn rotate(a: &mut [f64], b: &mut [f64], c: f64, s: f64) {
    for (x, y) in a.iter_mut().zip(b.iter_mut()) {
        let (xa, yb) = (*x, *y);
        *x = c * xa - s * yb;
        *y = s * xa + c * yb;
    }
}

/// Two-pass modified Gram-Schmidt. Columns whose singular value vanishes (or
/// that collapse under orthogonalisation) are replaced by completing unit
/// vectors so the result is always orthonormal.
fn orthonormalize(q: &mut [Vec<f64>], s: &[f64]) {
    let smax = s.first().copied().unwrap_or(0.0);
    let len = q.first().map_or(0, Vec::len);
    let mut next_unit = 0;
    for j in 0..q.len() {
        let (done, rest) = q.split_at_mut(j);
        let col = &mut rest[0];
        let mut ok = s[j] > smax * 1e-300 && s[j] > 0.0;
        if ok {
            for _ in 0..2 {
                for prev in done.iter() {
                    let d = dot(prev, col);
                    col.iter_mut().zip(prev).for_each(|(c, p)| *c -= d * p);
                }
            }
            ok = normalize(col) > 0.5;
        }
        while !ok && next_unit < len {
            col.iter_mut().for_each(|c| *c = 0.0);
            col[next_unit] = 1.0;
            next_unit += 1;
            for _ in 0..2 {
                for prev in done.iter() {
                    let d = dot(prev, col);
                    col.iter_mut().zip(prev).for_each(|(c, p)| *c -= d * p);
                }
            }
            ok = normalize(col) > 0.5;
        }
    }
}

/// Full eigendecomposition of a symmetric matrix by cyclic Jacobi.
/// Eigenvalues are returned in descending order with eigenvectors as columns,
/// each sign-fixed by [`fix_sign`].
pub fn symmetric_eigen(a: &DenseMatrix) -> Result<(Vec<f64>, DenseMatrix)> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::Dimension(format!("eigendecomposition of a {:?} matrix", a.shape())));
    }
    a.check_finite()?;
    let mut w = a.data.clone();
    let mut v = DenseMatrix::identity(n).data;
    let total = a.frobenius_norm();
    let mut converged = n < 2;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += 2.0 * w[i * n + j] * w[i * n + j];
            }
        }
        if off.sqrt() <= 1e-16 * total || off == 0.0 {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = w[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let (app, aqq) = (w[p * n + p], w[q * n + q]);
                // Below rounding level of the diagonal: drop instead of rotating.
                if apq.abs() <= 1e-18 * (app.abs() + aqq.abs()) {
                    w[p * n + q] = 0.0;
                    w[q * n + p] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (kp, kq) = (w[k * n + p], w[k * n + q]);
                    w[k * n + p] = c * kp - s * kq;
                    w[k * n + q] = s * kp + c * kq;
                }
                for k in 0..n {
                    let (pk, qk) = (w[p * n + k], w[q * n + k]);
                    w[p * n + k] = c * pk - s * qk;
                    w[q * n + k] = s * pk + c * qk;
                }
                w[p * n + q] = 0.0;
                w[q * n + p] = 0.0;
                for k in 0..n {
                    let (kp, kq) = (v[k * n + p], v[k * n + q]);
                    v[k * n + p] = c * kp - s * kq;
                    v[k * n + q] = s * kp + c * kq;
                }
            }
        }
    }
    if !converged {
        return Err(Error::Convergence { what: "Jacobi eigendecomposition", iterations: JACOBI_MAX_SWEEPS });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w[j * n + j].total_cmp(&w[i * n + i]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| w[i * n + i]).collect();
    let mut vectors = DenseMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col: Vec<f64> = (0..n).map(|k| v[k * n + src]).collect();
        fix_sign(&mut col);
        for (k, x) in col.into_iter().enumerate() {
            vectors[(k, dst)] = x;
        }
    }
    Ok((values, vectors))
}

/// Inverse Gram matrix `(V0^T V0)^{-1}` of the retained rows of a pursuit.
#[derive(Clone, Debug, PartialEq)]
pub struct InverseGram {
    k_inv: DenseMatrix,
}

impl InverseGram {
    /// Wraps a symmetric matrix; asymmetry beyond 1e-10 (relative) is rejected.
    pub fn new(k_inv: DenseMatrix) -> Result<Self> {
        let n = k_inv.rows();
        if k_inv.cols() != n {
            return Err(Error::Dimension("inverse Gram must be square".into()));
        }
        let scale = k_inv.max_abs().max(1.0);
        for i in 0..n {
            for j in 0..i {
                if (k_inv[(i, j)] - k_inv[(j, i)]).abs() > 1e-10 * scale {
                    return Err(Error::Parameter(format!("inverse Gram not symmetric at ({i}, {j})")));
                }
            }
        }
        k_inv.check_finite()?;
        Ok(InverseGram { k_inv })
    }

    pub fn identity(p: usize) -> Self {
        InverseGram { k_inv: DenseMatrix::identity(p) }
    }

    pub fn dim(&self) -> usize {
        self.k_inv.rows()
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.k_inv
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.k_inv
    }
}

/// Result of removing one row from the retained submatrix.
#[derive(Clone, Debug, PartialEq)]
pub enum GramUpdate {
    Updated(InverseGram),
    /// The reduced Gram matrix is singular. Carries `K r`, which spans the
    /// null space of `A - r r^T` when `A^{-1} = K`.
    Singular(Vec<f64>),
}

/// Sherman-Morrison downdate: `(A - r r^T)^{-1}` from `K = A^{-1}`.
pub fn gram_remove_row(k: &InverseGram, row: &[f64], tau_sing: f64) -> GramUpdate {
    let p = k.dim();
    assert_eq!(row.len(), p, "row length must match the Gram dimension");
    let kr = k.k_inv.matvec(row);
    let denom = 1.0 - dot(row, &kr);
    if denom <= tau_sing {
        return GramUpdate::Singular(kr);
    }
    let mut out = k.k_inv.clone();
    for i in 0..p {
        for j in i..p {
            let x = out[(i, j)] + kr[i] * kr[j] / denom;
            out[(i, j)] = x;
            out[(j, i)] = x;
        }
    }
    GramUpdate::Updated(InverseGram { k_inv: out })
}

/// `(v_sub^T v_sub)^{-1}` via a symmetric eigendecomposition. Fails when the
/// smallest Gram eigenvalue is at most `tau_sing` times the largest.
pub fn gram_inverse(v_sub: &DenseMatrix, tau_sing: f64) -> Result<InverseGram> {
    gram_inverse_cond(v_sub, tau_sing).map(|(k, _)| k)
}

/// [`gram_inverse`] together with the condition number of the Gram matrix.
pub(crate) fn gram_inverse_cond(v_sub: &DenseMatrix, tau_sing: f64) -> Result<(InverseGram, f64)> {
    let gram = v_sub.gram();
    let (vals, vecs) = symmetric_eigen(&gram)?;
    let p = vals.len();
    let lmax = vals.first().copied().unwrap_or(0.0);
    let lmin = vals.last().copied().unwrap_or(0.0);
    if p == 0 || lmin <= tau_sing * lmax.max(f64::MIN_POSITIVE) {
        return Err(Error::Singular(format!(
            "Gram eigenvalues span [{lmin:e}, {lmax:e}] at threshold {tau_sing:e}"
        )));
    }
    let k_inv = DenseMatrix::from_fn(p, p, |i, j| (0..p).map(|l| vecs[(i, l)] * vecs[(j, l)] / vals[l]).sum());
    let sym = DenseMatrix::from_fn(p, p, |i, j| 0.5 * (k_inv[(i, j)] + k_inv[(j, i)]));
    Ok((InverseGram { k_inv: sym }, lmax / lmin))
}

/// Dominant eigenpair of `k`. With a warm start this is power iteration
/// (capped at [`POWER_MAX_ITER`]); without one it is a full decomposition.
pub fn largest_eigvec(k: &InverseGram, warm_start: Option<&[f64]>) -> Result<(f64, Vec<f64>)> {
    largest_eigvec_capped(k, warm_start, POWER_MAX_ITER)
}

/// [`largest_eigvec`] with an explicit power-iteration cap.
pub fn largest_eigvec_capped(
    k: &InverseGram,
    warm_start: Option<&[f64]>,
    max_iter: usize,
) -> Result<(f64, Vec<f64>)> {
    let m = &k.k_inv;
    let Some(w) = warm_start else {
        let (vals, vecs) = symmetric_eigen(m)?;
        return Ok((vals[0], vecs.column(0)));
    };
    assert_eq!(w.len(), k.dim(), "warm start length mismatch");
    let mut x = w.to_vec();
    if normalize(&mut x) == 0.0 {
        return largest_eigvec_capped(k, None, max_iter);
    }
    // Plain iterations first; if the spectral gap is small, continue with a
    // repeatedly squared (and rescaled) copy of `m` to widen it.
    let mut op: Option<DenseMatrix> = None;
    for it in 0..max_iter {
        let y = m.matvec(&x);
        let lambda = dot(&x, &y);
        let resid = y.iter().zip(&x).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt();
        if resid <= 1e-9 * lambda.abs() {
            fix_sign(&mut x);
            return Ok((lambda, x));
        }
        if it == 8 {
            let mut q = m.clone();
            for _ in 0..6 {
                q = q.matmul(&q)?;
                let f = q.max_abs();
                if f == 0.0 || !f.is_finite() {
                    break;
                }
                q = q.scale(1.0 / f);
            }
            op = Some(q);
        }
        let mut next = match &op {
            Some(q) => q.matvec(&x),
            None => y,
        };
        if normalize(&mut next) == 0.0 {
            break;
        }
        x = next;
    }
    Err(Error::Convergence { what: "power iteration", iterations: max_iter })
}

/// Smallest singular value of `a` (square root of the smallest Gram eigenvalue).
pub fn smallest_singular_value(a: &DenseMatrix) -> Result<f64> {
    if a.rows() < a.cols() {
        return Ok(0.0);
    }
    let (vals, _) = symmetric_eigen(&a.gram())?;
    Ok(vals.last().copied().unwrap_or(0.0).max(0.0).sqrt())
}
