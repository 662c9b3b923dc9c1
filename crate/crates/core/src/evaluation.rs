//! Scoring inferred loadings against a gold network modulo row permutation
//! and scaling, and parameter sweeps over simulated instances.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::decomposition::{default_p_star, infer_network};
use crate::error::{Error, Result};
use crate::linalg::{dot, DenseMatrix};
use crate::netsim::{gen_poisson_network, gen_powerlaw_network, simulate_data, NetworkModel, Topology};
use crate::sparse_basis::PursuitConfig;

/// Rows shifted to mean zero and scaled to unit population variance.
pub fn row_normalize(c: &DenseMatrix) -> Result<DenseMatrix> {
    let n = c.cols() as f64;
    let mut out = c.clone();
    for i in 0..c.rows() {
        let row = out.row_mut(i);
        let mean = row.iter().sum::<f64>() / n;
        row.iter_mut().for_each(|x| *x -= mean);
        let sd = (row.iter().map(|x| x * x).sum::<f64>() / n).sqrt();
        if !(sd > 0.0) || sd <= 1e-14 * mean.abs() {
            return Err(Error::DegenerateRow { row: i });
        }
        row.iter_mut().for_each(|x| *x /= sd);
    }
    Ok(out)
}

/// `Σ = A Bᵀ / N` for row-normalised `A` (p×N) and `B` (P×N): the Pearson
/// correlation of every inferred row with every gold row.
pub fn correlation_matrix(c_inf_nor: &DenseMatrix, c_gold_nor: &DenseMatrix) -> Result<DenseMatrix> {
    if c_inf_nor.cols() != c_gold_nor.cols() {
        return Err(Error::Dimension(format!(
            "inferred rows have {} entries, gold rows {}",
            c_inf_nor.cols(),
            c_gold_nor.cols()
        )));
    }
    let n = c_inf_nor.cols() as f64;
    Ok(DenseMatrix::from_fn(c_inf_nor.rows(), c_gold_nor.rows(), |i, k| {
        (dot(c_inf_nor.row(i), c_gold_nor.row(k)) / n).clamp(-1.0, 1.0)
    }))
}

/// Maximum-weight one-to-one assignment between rows and columns of `w`,
/// matching `min(rows, cols)` pairs. Pairs are returned sorted by row.
pub fn max_weight_assignment(w: &DenseMatrix) -> Vec<(usize, usize)> {
    let (r, c) = w.shape();
    if r == 0 || c == 0 {
        return Vec::new();
    }
    let mut pairs = if r <= c {
        hungarian_min(r, c, |i, j| -w[(i, j)])
    } else {
        hungarian_min(c, r, |i, j| -w[(j, i)]).into_iter().map(|(j, i)| (i, j)).collect()
    };
    pairs.sort_unstable();
    pairs
}

/// Shortest-augmenting-path Hungarian algorithm for an `n × m` cost matrix
/// with `n <= m`; returns (row, column) pairs covering every row.
fn hungarian_min(n: usize, m: usize, cost: impl Fn(usize, usize) -> f64) -> Vec<(usize, usize)> {
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut owner = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    (1..=m).filter(|&j| owner[j] != 0).map(|j| (owner[j] - 1, j - 1)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    /// (inferred row, gold row), sorted by inferred row.
    pub pairs: Vec<(usize, usize)>,
    /// `|Σ|` at each matched pair.
    pub rho: Vec<f64>,
    /// Mean of `rho`, with every constant inferred row counted as a zero.
    pub rho_bar: f64,
    /// Least-squares factor taking each matched inferred row onto its gold row.
    pub scale: Vec<f64>,
    pub p_inferred: usize,
    /// Constant inferred rows left out of the matching.
    pub degenerate: Vec<usize>,
}

/// Optimal one-to-one matching of inferred rows (rows of `sigma`) to gold rows.
pub fn match_rows(sigma: &DenseMatrix) -> MatchResult {
    let abs = DenseMatrix::from_fn(sigma.rows(), sigma.cols(), |i, j| sigma[(i, j)].abs());
    let pairs = max_weight_assignment(&abs);
    let rho: Vec<f64> = pairs.iter().map(|&(i, k)| abs[(i, k)]).collect();
    let rho_bar = if rho.is_empty() { 0.0 } else { rho.iter().sum::<f64>() / rho.len() as f64 };
    MatchResult { pairs, rho, rho_bar, scale: Vec::new(), p_inferred: sigma.rows(), degenerate: Vec::new() }
}

/// Normalises both matrices, matches rows and fills in the scale factors.
pub fn evaluate_recovery(c_hat: &DenseMatrix, c_gold: &DenseMatrix) -> Result<MatchResult> {
    let gold_nor = row_normalize(c_gold)?;
    let mut live = Vec::new();
    let mut degenerate = Vec::new();
    for i in 0..c_hat.rows() {
        match row_normalize(&c_hat.select_rows(&[i])) {
            Ok(_) => live.push(i),
            Err(_) => degenerate.push(i),
        }
    }
    let inf_nor = row_normalize(&c_hat.select_rows(&live))?;
    let sigma = correlation_matrix(&inf_nor, &gold_nor)?;
    let mut res = match_rows(&sigma);
    res.pairs.iter_mut().for_each(|(i, _)| *i = live[*i]);
    res.scale = res
        .pairs
        .iter()
        .map(|&(i, k)| {
            let (a, g) = (c_hat.row(i), c_gold.row(k));
            dot(a, g) / dot(a, a)
        })
        .collect();
    let counted = res.rho.len() + degenerate.len();
    res.rho_bar = if counted == 0 { 0.0 } else { res.rho.iter().sum::<f64>() / counted as f64 };
    res.p_inferred = c_hat.rows();
    res.degenerate = degenerate;
    Ok(res)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Precision and recall of inferred target sets against gold target sets,
/// pooled over matched rows.
pub fn edge_metrics(result: &MatchResult, support_inf: &[Vec<usize>], support_gold: &[Vec<usize>]) -> EdgeMetrics {
    let (mut tp, mut n_inf, mut n_gold) = (0usize, 0usize, 0usize);
    for &(i, k) in &result.pairs {
        let (a, g) = (&support_inf[i], &support_gold[k]);
        tp += a.iter().filter(|x| g.contains(x)).count();
        n_inf += a.len();
        n_gold += g.len();
    }
    let precision = if n_inf == 0 { 0.0 } else { tp as f64 / n_inf as f64 };
    let recall = if n_gold == 0 { 0.0 } else { tp as f64 / n_gold as f64 };
    let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
    EdgeMetrics { precision, recall, f1 }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepAxis {
    P,
    M,
    N,
    Noise,
    Degree,
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepAxis::P => "P",
            SweepAxis::M => "M",
            SweepAxis::N => "N",
            SweepAxis::Noise => "noise",
            SweepAxis::Degree => "degree",
        })
    }
}

impl FromStr for SweepAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "P" | "p" => Ok(SweepAxis::P),
            "M" | "m" => Ok(SweepAxis::M),
            "N" | "n" => Ok(SweepAxis::N),
            "noise" => Ok(SweepAxis::Noise),
            "degree" => Ok(SweepAxis::Degree),
            _ => Err(Error::Parameter(format!("unknown sweep axis '{s}'"))),
        }
    }
}

/// Mean out-degree, either absolute or as a fraction of `N`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Degree {
    Absolute(f64),
    FractionOfN(f64),
}

impl Degree {
    pub fn resolve(self, n: usize) -> f64 {
        match self {
            Degree::Absolute(d) => d,
            Degree::FractionOfN(f) => f * n as f64,
        }
    }

    fn with_value(self, x: f64) -> Self {
        match self {
            Degree::Absolute(_) => Degree::Absolute(x),
            Degree::FractionOfN(_) => Degree::FractionOfN(x),
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::Absolute(d) => write!(f, "{d}"),
            Degree::FractionOfN(x) => write!(f, "{x}N"),
        }
    }
}

impl FromStr for Degree {
    type Err = Error;
    /// `50` is absolute, `0.1N` is a fraction of `N`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parameter(format!("cannot parse degree '{s}'"));
        match s.strip_suffix(['N', 'n']) {
            Some(f) => f.parse().map(Degree::FractionOfN).map_err(|_| bad()),
            None => s.parse().map(Degree::Absolute).map_err(|_| bad()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    pub n: usize,
    pub p: usize,
    pub m: usize,
    pub topology: Topology,
    pub degree: Degree,
    pub noise: f64,
}

impl SimParams {
    fn with_axis(&self, axis: SweepAxis, x: f64) -> Result<SimParams> {
        let count = || {
            if x >= 1.0 && x.fract() == 0.0 {
                Ok(x as usize)
            } else {
                Err(Error::Parameter(format!("{axis} grid value {x} is not a positive integer")))
            }
        };
        let mut s = self.clone();
        match axis {
            SweepAxis::P => s.p = count()?,
            SweepAxis::M => s.m = count()?,
            SweepAxis::N => s.n = count()?,
            SweepAxis::Noise => s.noise = x,
            SweepAxis::Degree => s.degree = s.degree.with_value(x),
        }
        Ok(s)
    }

    pub fn generate(&self, seed: u64) -> Result<NetworkModel> {
        let d = self.degree.resolve(self.n);
        match self.topology {
            Topology::Poisson => gen_poisson_network(self.n, self.p, d, seed),
            Topology::PowerLaw { gamma } => gen_powerlaw_network(self.n, self.p, d, gamma, seed),
            Topology::Inferred => Err(Error::Parameter("cannot simulate an inferred topology".into())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub grid: Vec<f64>,
    pub base: SimParams,
    pub seeds: Vec<u64>,
    /// Use `ceil(1.25 P) + 2` basis vectors instead of the true `P`.
    pub overshoot: bool,
    pub cfg: PursuitConfig,
    pub jobs: usize,
    /// Record wall time per cell; off by default so that tables are reproducible.
    pub timing: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis: SweepAxis,
    pub value: f64,
    pub seed: u64,
    pub rho_bar: f64,
    pub f1: f64,
    pub p_inferred: usize,
    pub seconds: f64,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub axis: SweepAxis,
    pub value: f64,
    pub mean_rho: f64,
    pub std_rho: f64,
    pub n_seeds: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub aggregate: Vec<AggregateRow>,
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("axis,value,seed,rho_bar,f1,p_inferred,seconds\n");
        for r in &self.rows {
            s += &format!("{},{},{},{},{},{},{}\n", r.axis, r.value, r.seed, r.rho_bar, r.f1, r.p_inferred, r.seconds);
        }
        s
    }

    pub fn aggregate_csv(&self) -> String {
        let mut s = String::from("axis,value,mean_rho,std_rho,n_seeds\n");
        for a in &self.aggregate {
            s += &format!("{},{},{},{},{}\n", a.axis, a.value, a.mean_rho, a.std_rho, a.n_seeds);
        }
        s
    }
}

/// Generates, infers and scores one simulated instance.
pub fn run_instance(
    params: &SimParams,
    seed: u64,
    overshoot: bool,
    cfg: &PursuitConfig,
) -> Result<(MatchResult, EdgeMetrics)> {
    let net = params.generate(seed)?;
    let data = simulate_data(&net, params.m, params.noise, seed)?;
    let p_star = if overshoot { default_p_star(params.p) } else { params.p };
    let fit = infer_network(&data.g, p_star, cfg)?;
    let score = evaluate_recovery(&fit.c_hat, &net.adjacency())?;
    let edges = edge_metrics(&score, &fit.support, &net.supports());
    Ok((score, edges))
}

/// Runs every (grid value, seed) cell, in parallel when `jobs > 1`. Failed
/// cells are kept with `NaN` scores and the error text.
pub fn benchmark_sweep(spec: &SweepSpec) -> Result<SweepTable> {
    if spec.grid.is_empty() || spec.seeds.is_empty() {
        return Err(Error::Parameter("sweep needs at least one grid value and one seed".into()));
    }
    spec.cfg.validate()?;
    let cells: Vec<(f64, u64)> =
        spec.grid.iter().flat_map(|&x| spec.seeds.iter().map(move |&s| (x, s))).collect();
    let results: Mutex<Vec<Option<SweepRow>>> = Mutex::new(vec![None; cells.len()]);
    let next = AtomicUsize::new(0);
    let worker = || loop {
        let k = next.fetch_add(1, Ordering::Relaxed);
        let Some(&(x, seed)) = cells.get(k) else { break };
        let t0 = Instant::now();
        let outcome = spec.base.with_axis(spec.axis, x).and_then(|p| run_instance(&p, seed, spec.overshoot, &spec.cfg));
        let seconds = if spec.timing { t0.elapsed().as_secs_f64() } else { 0.0 };
        let row = match outcome {
            Ok((m, e)) => SweepRow {
                axis: spec.axis,
                value: x,
                seed,
                rho_bar: m.rho_bar,
                f1: e.f1,
                p_inferred: m.p_inferred,
                seconds,
                error: None,
            },
            Err(err) => SweepRow {
                axis: spec.axis,
                value: x,
                seed,
                rho_bar: f64::NAN,
                f1: f64::NAN,
                p_inferred: 0,
                seconds,
                error: Some(err.to_string()),
            },
        };
        results.lock().expect("sweep worker panicked")[k] = Some(row);
    };
    let jobs = spec.jobs.clamp(1, cells.len());
    std::thread::scope(|s| {
        for _ in 1..jobs {
            s.spawn(worker);
        }
        worker();
    });
    let rows: Vec<SweepRow> =
        results.into_inner().expect("sweep worker panicked").into_iter().map(|r| r.expect("cell ran")).collect();

    let aggregate = spec
        .grid
        .iter()
        .map(|&x| {
            let rhos: Vec<f64> =
                rows.iter().filter(|r| r.value == x && r.error.is_none()).map(|r| r.rho_bar).collect();
            let k = rhos.len();
            let mean = if k == 0 { f64::NAN } else { rhos.iter().sum::<f64>() / k as f64 };
            let std = if k < 2 {
                0.0
            } else {
                (rhos.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (k - 1) as f64).sqrt()
            };
            AggregateRow { axis: spec.axis, value: x, mean_rho: mean, std_rho: std, n_seeds: k }
        })
        .collect();
    Ok(SweepTable { rows, aggregate })
}
