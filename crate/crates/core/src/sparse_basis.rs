//! Greedy null-space pursuit for the columns of the sparsifying rotation `B`.
//!
//! One column is found by moving rows of `V` from the retained set `ω₀` to
//! the removed set `ω₋` until the retained submatrix loses column rank; its
//! null vector `b` then makes `V b` vanish on `ω₀`. The inverse Gram matrix of
//! the retained rows is maintained by Sherman-Morrison downdates, and its
//! dominant eigenvector is the next guess for `b`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    dot, fix_sign, gram_inverse, gram_inverse_cond, gram_remove_row, largest_eigvec_capped, norm2, pearson,
    smallest_singular_value, symmetric_eigen, DenseMatrix, GramUpdate, InverseGram,
    DEFAULT_TAU_SING,
};

/// How a pursuit on an inflated matrix decides to switch back to `V`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SwitchMode {
    /// Switch after `k_switch` removals.
    FixedCycles,
    /// Switch once the largest |Pearson| between the current guess and the
    /// previous columns drops below `1 - epsilon_dup` and is decreasing.
    CorrelationMonitor,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PursuitConfig {
    pub tau_sing: f64,
    pub tau_conv: f64,
    pub k_switch: usize,
    pub epsilon_dup: f64,
    pub zero_tol: f64,
    /// Extra seeds tried per column after the first attempt.
    pub max_restarts: usize,
    pub switch_mode: SwitchMode,
    /// Passes that try to sparsify exact columns with the others inflated.
    pub refine_passes: usize,
    /// Compare the downdated inverse Gram with a direct inverse every this
    /// many removals (0 disables the audit).
    pub audit_every: usize,
    /// Warm-started power iterations before falling back to a full
    /// eigendecomposition of the P×P inverse Gram.
    pub power_max_iter: usize,
}

impl Default for PursuitConfig {
    fn default() -> Self {
        PursuitConfig {
            tau_sing: DEFAULT_TAU_SING,
            tau_conv: 1e-8,
            k_switch: 10,
            epsilon_dup: 0.01,
            zero_tol: 1e-8,
            max_restarts: 256,
            switch_mode: SwitchMode::FixedCycles,
            refine_passes: 1,
            audit_every: 0,
            power_max_iter: 256,
        }
    }
}

impl PursuitConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tau_sing", self.tau_sing),
            ("tau_conv", self.tau_conv),
            ("zero_tol", self.zero_tol),
        ];
        for (name, x) in positive {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::Parameter(format!("{name} must be positive, got {x}")));
            }
        }
        if self.k_switch == 0 {
            return Err(Error::Parameter("k_switch must be at least 1".into()));
        }
        if !(self.epsilon_dup > 0.0 && self.epsilon_dup < 1.0) {
            return Err(Error::Parameter(format!("epsilon_dup must lie in (0, 1), got {}", self.epsilon_dup)));
        }
        if self.power_max_iter == 0 {
            return Err(Error::Parameter("power_max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

/// Removed (`ω₋`, in removal order) and retained (`ω₀`) row indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportPartition {
    omega_minus: Vec<usize>,
    retained: Vec<bool>,
}

impl SupportPartition {
    pub fn new(n: usize) -> Self {
        SupportPartition { omega_minus: Vec::new(), retained: vec![true; n] }
    }

    /// Moves `i` from `ω₀` to `ω₋`; returns false if it was already removed.
    pub fn remove(&mut self, i: usize) -> bool {
        if !self.retained[i] {
            return false;
        }
        self.retained[i] = false;
        self.omega_minus.push(i);
        true
    }

    pub fn omega_minus(&self) -> &[usize] {
        &self.omega_minus
    }

    pub fn omega_zero(&self) -> Vec<usize> {
        (0..self.retained.len()).filter(|&i| self.retained[i]).collect()
    }

    pub fn is_retained(&self, i: usize) -> bool {
        self.retained[i]
    }

    pub fn retained_count(&self) -> usize {
        self.retained.len() - self.omega_minus.len()
    }

    pub fn len(&self) -> usize {
        self.retained.len()
    }

    pub fn is_empty(&self) -> bool {
        self.retained.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    /// The retained submatrix became rank deficient.
    Singular,
    /// The eigenvector guess stopped changing.
    Converged,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColumnSolution {
    /// Unit-norm column of `B`.
    pub b: Vec<f64>,
    /// Rows of `ω₋` where `|V b|` exceeds `zero_tol * max |V b|`.
    pub support: Vec<usize>,
    /// `‖V₀ b‖₂` on the final retained rows; an upper bound on the smallest
    /// singular value of `V₀` and zero at an exact singularity.
    pub smallest_singular: f64,
    /// Number of index moves `J`.
    pub cycles: usize,
    pub termination: Termination,
    /// Whether every entry of `V b` on `ω₀` is below the zero tolerance.
    pub verified: bool,
    pub partition: SupportPartition,
    /// Row that seeded `ω₋`.
    pub seed: usize,
    /// Audit of the downdated inverse Gram, if `audit_every > 0`.
    pub gram_drift: Option<GramAudit>,
}

impl ColumnSolution {
    /// A verified singular solution that did not need to exhaust the rows.
    pub fn is_exact(&self) -> bool {
        self.termination == Termination::Singular && self.verified && !self.is_exhausted()
    }

    /// Singular only because fewer than `P` rows remain, or the claimed null
    /// vector does not vanish on `ω₀`.
    pub fn is_trivial(&self) -> bool {
        self.termination == Termination::Singular && (self.is_exhausted() || !self.verified)
    }

    fn is_exhausted(&self) -> bool {
        self.partition.retained_count() < self.b.len()
    }
}

/// Options for a single pursuit beyond the shared configuration.
#[derive(Clone, Debug)]
pub struct PursuitStart<'a> {
    /// First row moved to `ω₋`; defaults to the row of largest ℓ1 norm in `working`.
    pub seed: Option<usize>,
    pub k_switch: usize,
    /// Columns found so far, used by [`SwitchMode::CorrelationMonitor`].
    pub previous: &'a [Vec<f64>],
}

/// Rows ordered by descending ℓ1 norm (ties to the lowest index), zero rows omitted.
pub fn seed_order(working: &DenseMatrix) -> Vec<usize> {
    let l1: Vec<f64> = (0..working.rows()).map(|i| working.row(i).iter().map(|x| x.abs()).sum()).collect();
    let mut order: Vec<usize> = (0..working.rows()).filter(|&i| l1[i] > 0.0).collect();
    order.sort_by(|&a, &b| l1[b].total_cmp(&l1[a]).then(a.cmp(&b)));
    order
}

/// Pursues one column from the default seed with the configured `k_switch`.
pub fn pursue_column(v: &DenseMatrix, working: &DenseMatrix, cfg: &PursuitConfig) -> Result<ColumnSolution> {
    let start = PursuitStart { seed: None, k_switch: cfg.k_switch, previous: &[] };
    pursue_column_from(v, working, &start, cfg)
}

pub fn pursue_column_from(
    v: &DenseMatrix,
    working: &DenseMatrix,
    start: &PursuitStart<'_>,
    cfg: &PursuitConfig,
) -> Result<ColumnSolution> {
    cfg.validate()?;
    let (n, p) = v.shape();
    if working.shape() != (n, p) {
        return Err(Error::Dimension(format!(
            "working matrix {:?} does not match {:?}",
            working.shape(),
            (n, p)
        )));
    }
    if n <= p || p == 0 {
        return Err(Error::Dimension(format!("pursuit needs N > P >= 1, got N={n}, P={p}")));
    }
    let inflated = working != v;
    // working = V M with orthonormal V, so M = V^T working.
    let m_inf = if inflated { Some(v.transpose().matmul(working)?) } else { None };
    let prior_x: Vec<Vec<f64>> = start.previous.iter().map(|b| v.matvec(b)).collect();

    let seed = match start.seed {
        Some(s) if s < n => s,
        Some(s) => return Err(Error::Parameter(format!("seed row {s} out of range"))),
        None => *seed_order(working).first().unwrap_or(&0),
    };

    let mut work = working;
    let mut in_inflated = inflated;
    let mut part = SupportPartition::new(n);
    let mut k = gram_inverse(work, cfg.tau_sing)?;
    let mut pending = Some(seed);
    let mut prev_vec: Option<Vec<f64>> = None;
    let mut prev_corr = f64::INFINITY;
    let mut drift: Option<GramAudit> = None;
    let mut along_guess = false;
    let mut audit_due = false;
    let bound = n - p + 1;

    let (raw, termination, raw_inflated) = loop {
        if let Some(i) = pending.take() {
            part.remove(i);
            assert!(part.omega_minus().len() <= bound, "pursuit exceeded N - P + 1 removals");
            // A removal whose update direction K r is the current guess leaves
            // the guess fixed while still shrinking the smallest singular value.
            along_guess = prev_vec.as_ref().is_some_and(|pv| {
                let kr = k.matrix().matvec(work.row(i));
                let nk = norm2(&kr);
                nk > 0.0 && dot(pv, &kr).abs() >= (1.0 - cfg.tau_conv) * nk
            });
            match gram_remove_row(&k, work.row(i), cfg.tau_sing) {
                GramUpdate::Singular(dir) => break (dir, Termination::Singular, in_inflated),
                GramUpdate::Updated(k2) => k = k2,
            }
            audit_due = cfg.audit_every > 0 && part.omega_minus().len() % cfg.audit_every == 0;
        }

        if in_inflated {
            let due = match cfg.switch_mode {
                SwitchMode::FixedCycles => part.omega_minus().len() >= start.k_switch,
                SwitchMode::CorrelationMonitor => match (&prev_vec, &m_inf) {
                    (Some(x), Some(m)) if !prior_x.is_empty() => {
                        let guess = v.matvec(&m.matvec(x));
                        let corr = prior_x
                            .iter()
                            .filter_map(|px| pearson(&guess, px))
                            .fold(0.0f64, |a, c| a.max(c.abs()));
                        let due = corr < 1.0 - cfg.epsilon_dup && corr < prev_corr;
                        prev_corr = corr;
                        due
                    }
                    (Some(_), _) => part.omega_minus().len() >= start.k_switch,
                    _ => false,
                },
            };
            if due {
                in_inflated = false;
                work = v;
                prev_vec = None;
                match gram_inverse(&v.select_rows(&part.omega_zero()), cfg.tau_sing) {
                    Ok(k2) => k = k2,
                    Err(Error::Singular(_)) => {
                        let (_, vecs) = symmetric_eigen(&v.select_rows(&part.omega_zero()).gram())?;
                        break (vecs.column(p - 1), Termination::Singular, false);
                    }
                    Err(e) => return Err(e),
                }
            }
        }

        let (lambda, vec) = match largest_eigvec_capped(&k, prev_vec.as_deref(), cfg.power_max_iter) {
            Ok(r) => r,
            Err(Error::Convergence { .. }) => largest_eigvec_capped(&k, None, cfg.power_max_iter)?,
            Err(e) => return Err(e),
        };
        if 1.0 / lambda <= cfg.tau_sing {
            break (vec, Termination::Singular, in_inflated);
        }
        if std::mem::take(&mut audit_due) {
            if let Some(a) = audit_gap(&k, &work.select_rows(&part.omega_zero()), cfg.tau_sing)? {
                drift.get_or_insert_with(GramAudit::default).merge(&a);
            }
        }
        // With a single basis vector the guess cannot move, so only the
        // singularity can end the pursuit.
        if let (Some(pv), true) = (&prev_vec, p > 1 && !along_guess) {
            if dot(pv, &vec).abs() >= 1.0 - cfg.tau_conv {
                break (vec, Termination::Converged, in_inflated);
            }
        }
        if part.retained_count() < p {
            return Err(Error::Exhausted);
        }
        // u = V₀ v / s; the scale does not affect the argmax.
        let mut best: Option<(usize, f64)> = None;
        for i in 0..n {
            if !part.is_retained(i) {
                continue;
            }
            let u = dot(work.row(i), &vec).abs();
            if best.is_none_or(|(_, b)| u > b) {
                best = Some((i, u));
            }
        }
        pending = best.map(|(i, _)| i);
        prev_vec = Some(vec);
    };

    let mut b = match (&m_inf, raw_inflated) {
        (Some(m), true) => m.matvec(&raw),
        _ => raw,
    };
    let nb = norm2(&b);
    if nb == 0.0 || !nb.is_finite() {
        return Err(Error::Singular("pursuit produced a zero null vector".into()));
    }
    b.iter_mut().for_each(|x| *x /= nb);
    fix_sign(&mut b);
    Ok(finish(v, b, part, termination, seed, drift, cfg.zero_tol))
}

/// Agreement between the downdated inverse Gram and a direct inversion.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GramAudit {
    pub samples: usize,
    /// Largest `‖K − K_direct‖_F / ‖K_direct‖_F`.
    pub max_gap: f64,
    /// Largest relative gap divided by the condition number of `K_direct`.
    pub max_gap_per_cond: f64,
}

impl GramAudit {
    pub fn merge(&mut self, other: &GramAudit) {
        self.samples += other.samples;
        self.max_gap = self.max_gap.max(other.max_gap);
        self.max_gap_per_cond = self.max_gap_per_cond.max(other.max_gap_per_cond);
    }
}

/// Compares `k` with [`gram_inverse`] of the retained rows; `None` when the
/// direct inversion refuses the rows as singular.
fn audit_gap(k: &InverseGram, v0: &DenseMatrix, tau_sing: f64) -> Result<Option<GramAudit>> {
    let (direct, cond) = match gram_inverse_cond(v0, tau_sing) {
        Ok(d) => d,
        Err(Error::Singular(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let gap = k.matrix().sub(direct.matrix())?.frobenius_norm() / direct.matrix().frobenius_norm();
    Ok(Some(GramAudit { samples: 1, max_gap: gap, max_gap_per_cond: gap / cond }))
}

fn finish(
    v: &DenseMatrix,
    b: Vec<f64>,
    partition: SupportPartition,
    termination: Termination,
    seed: usize,
    gram_drift: Option<GramAudit>,
    zero_tol: f64,
) -> ColumnSolution {
    let x = v.matvec(&b);
    let xmax = x.iter().fold(0.0f64, |m, y| m.max(y.abs()));
    let thresh = zero_tol * xmax;
    let mut residual = 0.0;
    let mut verified = true;
    for (i, xi) in x.iter().enumerate() {
        if partition.is_retained(i) {
            residual += xi * xi;
            if xi.abs() > thresh {
                verified = false;
            }
        }
    }
    let mut support: Vec<usize> = partition.omega_minus().iter().copied().filter(|&i| x[i].abs() > thresh).collect();
    support.sort_unstable();
    ColumnSolution {
        b,
        support,
        smallest_singular: residual.sqrt(),
        cycles: partition.omega_minus().len(),
        termination,
        verified,
        partition,
        seed,
        gram_drift,
    }
}

/// `V (I + Σ b bᵀ)` over the given unit columns.
pub fn inflate_with(v: &DenseMatrix, previous: &[Vec<f64>]) -> DenseMatrix {
    let mut w = v.clone();
    for b in previous {
        let vb = v.matvec(b);
        for (i, s) in vb.iter().enumerate() {
            if *s == 0.0 {
                continue;
            }
            for (wij, bj) in w.row_mut(i).iter_mut().zip(b) {
                *wij += s * bj;
            }
        }
    }
    w
}

/// Inflates `v` by every column of `previous`.
pub fn inflate(v: &DenseMatrix, previous: &BasisMatrix) -> Result<DenseMatrix> {
    if previous.columns.is_empty() {
        return Err(Error::Parameter("inflation needs at least one previous column".into()));
    }
    if let Some(c) = previous.columns.iter().find(|c| c.b.len() != v.cols()) {
        return Err(Error::Dimension(format!("column of length {} for {} basis vectors", c.b.len(), v.cols())));
    }
    let bs: Vec<Vec<f64>> = previous.columns.iter().map(|c| c.b.clone()).collect();
    Ok(inflate_with(v, &bs))
}

/// The inferred rotation, one [`ColumnSolution`] per hidden variable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisMatrix {
    pub columns: Vec<ColumnSolution>,
    pub p_star: usize,
    /// Columns that could not be filled (`p_star - p`).
    pub dropped: usize,
    /// Candidates rejected as duplicates of an existing column.
    pub duplicate_rejections: usize,
    /// Total number of pursuits run.
    pub pursuits: usize,
}

impl BasisMatrix {
    pub fn p(&self) -> usize {
        self.columns.len()
    }

    /// `B̂` as a `p_star × p` matrix.
    pub fn matrix(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.p_star, self.columns.len(), |i, j| self.columns[j].b[i])
    }

    pub fn max_cycles(&self) -> usize {
        self.columns.iter().map(|c| c.cycles).max().unwrap_or(0)
    }
}

/// Statistics gathered across all pursuits of one [`solve_basis`] call.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PursuitStats {
    pub pursuits: usize,
    pub duplicate_rejections: usize,
    pub max_cycles: usize,
    pub max_cycle_bound_ratio: f64,
    /// Pooled [`GramAudit`] of all audited pursuits.
    pub gram_audit: Option<GramAudit>,
}

impl PursuitStats {
    fn record(&mut self, sol: &ColumnSolution, n: usize, p: usize) {
        self.pursuits += 1;
        self.max_cycles = self.max_cycles.max(sol.cycles);
        self.max_cycle_bound_ratio = self.max_cycle_bound_ratio.max(sol.cycles as f64 / (n - p + 1) as f64);
        if let Some(a) = &sol.gram_drift {
            self.gram_audit.get_or_insert_with(GramAudit::default).merge(a);
        }
    }
}

/// Finds up to `p_star` columns of `B`. See [`solve_basis_with_stats`].
pub fn solve_basis(v: &DenseMatrix, p_star: usize, cfg: &PursuitConfig) -> Result<BasisMatrix> {
    solve_basis_with_stats(v, p_star, cfg).map(|(b, _)| b)
}

/// Column `i` is pursued on `v` inflated by columns `1..i-1`, trying seeds in
/// descending ℓ1 order of the inflated matrix. Duplicates of earlier columns
/// double `k_switch` and move on to the next seed. Once any exact (verified
/// singular) column exists only exact candidates are accepted; without exact
/// columns, the first converged candidate is taken. Columns that find no
/// acceptable candidate are dropped. Refinement passes then re-pursue each
/// exact column against the others and keep a sparser exact replacement.
pub fn solve_basis_with_stats(
    v: &DenseMatrix,
    p_star: usize,
    cfg: &PursuitConfig,
) -> Result<(BasisMatrix, PursuitStats)> {
    cfg.validate()?;
    let (n, p) = v.shape();
    if p != p_star {
        return Err(Error::Dimension(format!("v has {p} columns, expected {p_star}")));
    }
    if n <= p_star || p_star == 0 {
        return Err(Error::Dimension(format!("basis solve needs N > p_star >= 1, got N={n}, p_star={p_star}")));
    }
    let mut stats = PursuitStats::default();
    let mut columns: Vec<ColumnSolution> = Vec::new();
    for _ in 0..p_star {
        if let Some(c) = search_column(v, &columns, false, cfg, &mut stats)? {
            columns.push(c);
        }
    }

    for _ in 0..cfg.refine_passes {
        if !columns.iter().any(ColumnSolution::is_exact) {
            break;
        }
        let mut changed = false;
        for j in 0..columns.len() {
            if !columns[j].is_exact() {
                continue;
            }
            let others: Vec<ColumnSolution> =
                columns.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, c)| c.clone()).collect();
            if let Some(c) = search_column(v, &others, true, cfg, &mut stats)? {
                if c.is_exact() && c.support.len() < columns[j].support.len() {
                    columns[j] = c;
                    changed = true;
                }
            }
        }
        if changed {
            while columns.len() < p_star {
                match search_column(v, &columns, true, cfg, &mut stats)? {
                    Some(c) => columns.push(c),
                    None => break,
                }
            }
        } else {
            break;
        }
    }

    let basis = BasisMatrix {
        dropped: p_star - columns.len(),
        columns,
        p_star,
        duplicate_rejections: stats.duplicate_rejections,
        pursuits: stats.pursuits,
    };
    Ok((basis, stats))
}

fn search_column(
    v: &DenseMatrix,
    accepted: &[ColumnSolution],
    full_scan: bool,
    cfg: &PursuitConfig,
    stats: &mut PursuitStats,
) -> Result<Option<ColumnSolution>> {
    let (n, p) = v.shape();
    let previous: Vec<Vec<f64>> = accepted.iter().map(|c| c.b.clone()).collect();
    let working = if previous.is_empty() { v.clone() } else { inflate_with(v, &previous) };
    let prior_x: Vec<Vec<f64>> = previous.iter().map(|b| v.matvec(b)).collect();
    let any_exact = accepted.iter().any(ColumnSolution::is_exact);
    let noisy = !accepted.is_empty() && !any_exact;

    let mut k_switch = cfg.k_switch;
    let mut best: Option<ColumnSolution> = None;
    let mut fallback: Option<ColumnSolution> = None;
    let attempts = cfg.max_restarts.saturating_add(1);
    for seed in seed_order(&working).into_iter().take(attempts) {
        let start = PursuitStart { seed: Some(seed), k_switch, previous: &previous };
        let sol = pursue_column_from(v, &working, &start, cfg)?;
        stats.record(&sol, n, p);
        if sol.is_trivial() {
            if p == 1 && fallback.is_none() && !any_exact {
                fallback = Some(sol);
            }
            continue;
        }
        let x = v.matvec(&sol.b);
        let duplicate =
            prior_x.iter().any(|px| pearson(&x, px).is_some_and(|r| r.abs() >= 1.0 - cfg.epsilon_dup));
        if duplicate || !extends_rank(&previous, &sol.b, cfg.tau_sing)? {
            stats.duplicate_rejections += 1;
            k_switch = k_switch.saturating_mul(2).min(n - p + 1);
            continue;
        }
        if sol.is_exact() {
            if !full_scan {
                return Ok(Some(sol));
            }
            if best.as_ref().is_none_or(|b| sol.support.len() < b.support.len()) {
                best = Some(sol);
            }
        } else if !any_exact {
            if noisy {
                return Ok(Some(sol));
            }
            if fallback.is_none() {
                fallback = Some(sol);
            }
        }
    }
    Ok(best.or(fallback))
}

fn extends_rank(previous: &[Vec<f64>], b: &[f64], tau_sing: f64) -> Result<bool> {
    if previous.is_empty() {
        return Ok(true);
    }
    let mut cols = previous.to_vec();
    cols.push(b.to_vec());
    let m = DenseMatrix::from_columns(&cols)?;
    Ok(smallest_singular_value(&m)? > tau_sing)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_row_forces_one_sparse_solution() {
        let v = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let sol = pursue_column(&v, &v, &PursuitConfig::default()).unwrap();
        assert_eq!(sol.b, vec![1.0, 0.0]);
        assert_eq!(sol.support, vec![0]);
        assert!(sol.smallest_singular <= 1e-10);
        assert_eq!(sol.cycles, 1);
        assert!(sol.is_exact());
    }

    #[test]
    fn single_column_case() {
        let v = DenseMatrix::from_rows(&[vec![1.0], vec![0.0]]).unwrap();
        let sol = pursue_column(&v, &v, &PursuitConfig::default()).unwrap();
        assert_eq!(sol.b, vec![1.0]);
        assert_eq!(sol.support, vec![0]);
        assert_eq!(sol.cycles, 1);
    }

    #[test]
    fn inflate_unit_vector() {
        let v = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
        let w = inflate_with(&v, &[vec![1.0, 0.0]]);
        for i in 0..3 {
            assert_eq!(w[(i, 0)], 2.0 * v[(i, 0)]);
            assert_eq!(w[(i, 1)], v[(i, 1)]);
        }
    }

    #[test]
    fn inflate_needs_previous() {
        let v = DenseMatrix::identity(3);
        let empty = BasisMatrix { columns: vec![], p_star: 3, dropped: 0, duplicate_rejections: 0, pursuits: 0 };
        assert!(inflate(&v, &empty).is_err());
    }

    #[test]
    fn partition_bookkeeping() {
        let mut part = SupportPartition::new(4);
        assert!(part.remove(2));
        assert!(!part.remove(2));
        assert_eq!(part.omega_minus(), &[2]);
        assert_eq!(part.omega_zero(), vec![0, 1, 3]);
        assert_eq!(part.retained_count(), 3);
    }

    #[test]
    fn config_validation() {
        assert!(PursuitConfig::default().validate().is_ok());
        let bad = PursuitConfig { epsilon_dup: 1.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = PursuitConfig { k_switch: 0, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
