//! Synthetic bipartite networks and observation matrices.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

const MAX_RESAMPLES: usize = 1000;
const DEGREE_TOLERANCE: f64 = 0.15;
const WEIGHT_FLOOR: f64 = 0.2;

const STREAM_NETWORK: u64 = 0;
const STREAM_ACTIVITY: u64 = 1;
const STREAM_NOISE: u64 = 2;

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Topology {
    Poisson,
    PowerLaw { gamma: f64 },
    /// A network read back from an inference run.
    Inferred,
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Topology::Poisson => write!(f, "poisson"),
            Topology::PowerLaw { gamma } => write!(f, "powerlaw({gamma})"),
            Topology::Inferred => write!(f, "inferred"),
        }
    }
}

impl FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "poisson" => Ok(Topology::Poisson),
            "inferred" => Ok(Topology::Inferred),
            _ => {
                let gamma = s
                    .strip_prefix("powerlaw(")
                    .and_then(|r| r.strip_suffix(')'))
                    .and_then(|g| g.parse::<f64>().ok())
                    .ok_or_else(|| Error::Parameter(format!("unknown topology '{s}'")))?;
                Ok(Topology::PowerLaw { gamma })
            }
        }
    }
}

/// One weighted regulator-to-target edge (0-based indices).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub regulator: usize,
    pub target: usize,
    pub weight: f64,
}

/// Weighted bipartite graph from `n_hidden` regulators to `n_observed` targets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkModel {
    pub n_observed: usize,
    pub n_hidden: usize,
    /// Sorted by (regulator, target).
    pub edges: Vec<Edge>,
    pub topology: Topology,
    /// Requested mean out-degree.
    pub mean_out_degree: f64,
    pub seed: u64,
}

impl NetworkModel {
    /// `C` as a dense `P × N` matrix.
    pub fn adjacency(&self) -> DenseMatrix {
        let mut c = DenseMatrix::zeros(self.n_hidden, self.n_observed);
        for e in &self.edges {
            c[(e.regulator, e.target)] = e.weight;
        }
        c
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n_hidden];
        for e in &self.edges {
            d[e.regulator] += 1;
        }
        d
    }

    pub fn realized_mean_out_degree(&self) -> f64 {
        self.edges.len() as f64 / self.n_hidden as f64
    }

    /// Targets of each regulator, ascending.
    pub fn supports(&self) -> Vec<Vec<usize>> {
        let mut s = vec![Vec::new(); self.n_hidden];
        for e in &self.edges {
            s[e.regulator].push(e.target);
        }
        s
    }

    /// Builds a network from the nonzero entries of a `P × N` loading matrix.
    pub fn from_adjacency(c: &DenseMatrix, topology: Topology, seed: u64) -> Self {
        let mut edges = Vec::new();
        for r in 0..c.rows() {
            for (t, &w) in c.row(r).iter().enumerate() {
                if w != 0.0 {
                    edges.push(Edge { regulator: r, target: t, weight: w });
                }
            }
        }
        let mean = if c.rows() == 0 { 0.0 } else { edges.len() as f64 / c.rows() as f64 };
        NetworkModel { n_observed: c.cols(), n_hidden: c.rows(), edges, topology, mean_out_degree: mean, seed }
    }
}

/// Observations generated from a [`NetworkModel`].
#[derive(Clone, Debug, PartialEq)]
pub struct SimulatedDataset {
    pub g: DenseMatrix,
    pub r_gold: DenseMatrix,
    pub noise_level: f64,
    pub seed: u64,
}

fn check_degree(n: usize, p: usize, mean_out_degree: f64) -> Result<()> {
    if n == 0 || p == 0 {
        return Err(Error::Parameter(format!("network needs n >= 1 and p >= 1, got n={n}, p={p}")));
    }
    if !(mean_out_degree >= 1.0 && mean_out_degree <= n as f64) {
        return Err(Error::Parameter(format!("mean out-degree {mean_out_degree} outside [1, {n}]")));
    }
    Ok(())
}

fn within_tolerance(targets: &[BTreeSet<usize>], requested: f64) -> bool {
    let mean = targets.iter().map(BTreeSet::len).sum::<usize>() as f64 / targets.len() as f64;
    (mean - requested).abs() <= DEGREE_TOLERANCE * requested
}

/// Regulators left without targets get one uniformly chosen target, then
/// targets left without regulators get one uniformly chosen regulator.
fn repair_empty(targets: &mut [BTreeSet<usize>], n: usize, rng: &mut ChaCha8Rng) {
    for t in targets.iter_mut() {
        if t.is_empty() {
            t.insert(rng.random_range(0..n));
        }
    }
    let mut covered = vec![false; n];
    targets.iter().flatten().for_each(|&j| covered[j] = true);
    for (j, _) in covered.iter().enumerate().filter(|(_, c)| !**c) {
        let r = rng.random_range(0..targets.len());
        targets[r].insert(j);
    }
}

fn weigh(targets: Vec<BTreeSet<usize>>, rng: &mut ChaCha8Rng) -> Vec<Edge> {
    let mut edges = Vec::new();
    for (r, ts) in targets.into_iter().enumerate() {
        for t in ts {
            let magnitude = rng.random_range(WEIGHT_FLOOR..=1.0);
            let weight = if rng.random::<bool>() { magnitude } else { -magnitude };
            edges.push(Edge { regulator: r, target: t, weight });
        }
    }
    edges
}

/// Erdős–Rényi bipartite graph: each edge present with probability `mean_out_degree / n`.
pub fn gen_poisson_network(n: usize, p: usize, mean_out_degree: f64, seed: u64) -> Result<NetworkModel> {
    check_degree(n, p, mean_out_degree)?;
    let q = mean_out_degree / n as f64;
    let mut rng = rng_for(seed, STREAM_NETWORK);
    for _ in 0..MAX_RESAMPLES {
        let mut targets: Vec<BTreeSet<usize>> =
            (0..p).map(|_| (0..n).filter(|_| rng.random::<f64>() < q).collect()).collect();
        // The tolerance applies to the draw itself: with few regulators about
        // n·(1 - q)^p targets start uncovered and the repair alone can push
        // the mean far past it.
        if within_tolerance(&targets, mean_out_degree) {
            repair_empty(&mut targets, n, &mut rng);
            return Ok(NetworkModel {
                n_observed: n,
                n_hidden: p,
                edges: weigh(targets, &mut rng),
                topology: Topology::Poisson,
                mean_out_degree,
                seed,
            });
        }
    }
    Err(Error::Parameter(format!(
        "no Poisson network with mean out-degree within 15% of {mean_out_degree} after {MAX_RESAMPLES} draws"
    )))
}

/// Truncated discrete power law `Pr(d) ∝ d^-gamma` on `[lo, n]`.
struct PowerLaw {
    lo: usize,
    cdf: Vec<f64>,
}

impl PowerLaw {
    fn new(lo: usize, n: usize, gamma: f64) -> Self {
        let mut cdf = Vec::with_capacity(n - lo + 1);
        let mut acc = 0.0;
        for d in lo..=n {
            acc += (d as f64).powf(-gamma);
            cdf.push(acc);
        }
        cdf.iter_mut().for_each(|c| *c /= acc);
        PowerLaw { lo, cdf }
    }

    fn mean(lo: usize, n: usize, gamma: f64) -> f64 {
        let (mut num, mut den) = (0.0, 0.0);
        for d in lo..=n {
            let w = (d as f64).powf(-gamma);
            num += d as f64 * w;
            den += w;
        }
        num / den
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        let u: f64 = rng.random();
        let k = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
        self.lo + k
    }
}

/// Independent power-law out-degrees with uniformly chosen targets. The
/// lower cut-off is the smallest integer whose expected degree reaches the
/// request; when it overshoots, degrees are drawn from a two-component
/// mixture of adjacent cut-offs whose expectation matches exactly.
pub fn gen_powerlaw_network(n: usize, p: usize, mean_out_degree: f64, gamma: f64, seed: u64) -> Result<NetworkModel> {
    check_degree(n, p, mean_out_degree)?;
    if !(gamma > 1.0 && gamma.is_finite()) {
        return Err(Error::Parameter(format!("power-law exponent must exceed 1, got {gamma}")));
    }
    let e1 = PowerLaw::mean(1, n, gamma);
    if e1 > mean_out_degree * (1.0 + 1e-12) {
        return Err(Error::Parameter(format!(
            "mean out-degree {mean_out_degree} is below the smallest achievable mean {e1:.4} for gamma={gamma}"
        )));
    }
    // Expected degree increases with the cut-off; find the first one that reaches the target.
    let (mut lo, mut hi) = (1usize, n);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if PowerLaw::mean(mid, n, gamma) >= mean_out_degree {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let upper = PowerLaw::new(lo, n, gamma);
    let e_hi = PowerLaw::mean(lo, n, gamma);
    let mixture = if lo > 1 && e_hi > mean_out_degree {
        let e_lo = PowerLaw::mean(lo - 1, n, gamma);
        Some(((mean_out_degree - e_lo) / (e_hi - e_lo), PowerLaw::new(lo - 1, n, gamma)))
    } else {
        None
    };

    let mut rng = rng_for(seed, STREAM_NETWORK);
    for _ in 0..MAX_RESAMPLES {
        let mut targets = Vec::with_capacity(p);
        for _ in 0..p {
            let d = match &mixture {
                Some((w_upper, lower)) if rng.random::<f64>() >= *w_upper => lower.sample(&mut rng),
                _ => upper.sample(&mut rng),
            };
            targets.push(sample(&mut rng, n, d).into_iter().collect::<BTreeSet<usize>>());
        }
        // The tolerance applies to the draw itself: with few regulators about
        // n·(1 - q)^p targets start uncovered and the repair alone can push
        // the mean far past it.
        if within_tolerance(&targets, mean_out_degree) {
            repair_empty(&mut targets, n, &mut rng);
            return Ok(NetworkModel {
                n_observed: n,
                n_hidden: p,
                edges: weigh(targets, &mut rng),
                topology: Topology::PowerLaw { gamma },
                mean_out_degree,
                seed,
            });
        }
    }
    Err(Error::Parameter(format!(
        "no power-law network with mean out-degree within 15% of {mean_out_degree} after {MAX_RESAMPLES} draws"
    )))
}

/// `G = R C + noise` with `R` uniform on `[0, 1)` and Gaussian noise whose
/// standard deviation is `noise_level` times the population standard
/// deviation of the entries of `R C`.
pub fn simulate_data(net: &NetworkModel, m: usize, noise_level: f64, seed: u64) -> Result<SimulatedDataset> {
    if m == 0 {
        return Err(Error::Parameter("need at least one observation".into()));
    }
    if !(0.0..1.0).contains(&noise_level) {
        return Err(Error::Parameter(format!("noise level {noise_level} outside [0, 1)")));
    }
    let c = net.adjacency();
    let mut rng = rng_for(seed, STREAM_ACTIVITY);
    let r_gold = DenseMatrix::from_fn(m, net.n_hidden, |_, _| rng.random::<f64>());
    let mut g = r_gold.matmul(&c)?;
    if noise_level > 0.0 {
        let sd = noise_level * population_std(g.as_slice());
        let mut rng = rng_for(seed, STREAM_NOISE);
        let (rows, cols) = g.shape();
        for i in 0..rows {
            for j in 0..cols {
                let z: f64 = rng.sample(StandardNormal);
                g[(i, j)] += sd * z;
            }
        }
    }
    Ok(SimulatedDataset { g, r_gold, noise_level, seed })
}

pub(crate) fn population_std(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt()
}
