//! Linking inferred hidden variables to measured factors and to prior
//! knowledge about target sets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::max_weight_assignment;
use crate::linalg::{dot, pearson, DenseMatrix};

/// Values of one physical factor measured in a subset of configurations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorMeasurement {
    pub values: Vec<f64>,
    /// 0-based configuration (row) indices, aligned with `values`.
    pub config_indices: Vec<usize>,
    pub label: String,
}

impl FactorMeasurement {
    fn validate(&self, m: usize) -> Result<()> {
        if self.values.len() != self.config_indices.len() {
            return Err(Error::Parameter(format!(
                "factor '{}': {} values for {} configurations",
                self.label,
                self.values.len(),
                self.config_indices.len()
            )));
        }
        if self.values.len() < 2 {
            return Err(Error::Parameter(format!(
                "factor '{}' needs at least 2 measurements, has {}",
                self.label,
                self.values.len()
            )));
        }
        let mut seen = self.config_indices.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Parameter(format!("factor '{}' repeats a configuration", self.label)));
        }
        if let Some(&bad) = seen.last().filter(|&&i| i >= m) {
            return Err(Error::Parameter(format!(
                "factor '{}' refers to configuration {} of {m}",
                self.label,
                bad + 1
            )));
        }
        if self.values.iter().any(|x| !x.is_finite()) {
            return Err(Error::Parameter(format!("factor '{}' has non-finite values", self.label)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorMatch {
    /// Index of the measurement in the input list.
    pub factor: usize,
    pub label: String,
    /// Matched column of `R̂`.
    pub column: usize,
    /// `|Pearson|` between the measurement and the matched column.
    pub rho: f64,
    /// Least-squares coefficient taking the column onto the measurement.
    pub scale: f64,
}

/// `|Pearson|` of the measurement against every column of `r_hat` on the
/// measured configurations; constant columns score `None`.
fn factor_correlations(r_hat: &DenseMatrix, meas: &FactorMeasurement) -> Result<Vec<Option<f64>>> {
    meas.validate(r_hat.rows())?;
    if pearson(&meas.values, &meas.values).is_none() {
        return Err(Error::DegenerateRow { row: 0 });
    }
    let sub = r_hat.select_rows(&meas.config_indices);
    Ok((0..sub.cols()).map(|j| pearson(&meas.values, &sub.column(j)).map(f64::abs)).collect())
}

fn scale_for(r_hat: &DenseMatrix, meas: &FactorMeasurement, column: usize) -> f64 {
    let x: Vec<f64> = meas.config_indices.iter().map(|&i| r_hat[(i, column)]).collect();
    dot(&x, &meas.values) / dot(&x, &x)
}

/// Column of `r_hat` best correlated with the measurement (lowest index on ties).
pub fn match_factor(r_hat: &DenseMatrix, meas: &FactorMeasurement) -> Result<FactorMatch> {
    let rho = factor_correlations(r_hat, meas)?;
    let mut best: Option<(usize, f64)> = None;
    for (j, r) in rho.iter().enumerate() {
        if let Some(r) = *r {
            if best.is_none_or(|(_, b)| r > b) {
                best = Some((j, r));
            }
        }
    }
    let (column, rho) = best.ok_or_else(|| {
        Error::Singular(format!("every column of R̂ is constant on the configurations of '{}'", meas.label))
    })?;
    Ok(FactorMatch { factor: 0, label: meas.label.clone(), column, rho, scale: scale_for(r_hat, meas, column) })
}

/// One-to-one assignment of measurements to columns maximising the total `|ρ|`.
pub fn match_factors(r_hat: &DenseMatrix, measurements: &[FactorMeasurement]) -> Result<Vec<FactorMatch>> {
    if measurements.is_empty() {
        return Err(Error::Parameter("no factor measurements given".into()));
    }
    let mut w = DenseMatrix::zeros(measurements.len(), r_hat.cols());
    for (k, meas) in measurements.iter().enumerate() {
        for (j, r) in factor_correlations(r_hat, meas)?.into_iter().enumerate() {
            w[(k, j)] = r.unwrap_or(0.0);
        }
    }
    Ok(max_weight_assignment(&w)
        .into_iter()
        .map(|(k, j)| FactorMatch {
            factor: k,
            label: measurements[k].label.clone(),
            column: j,
            rho: w[(k, j)],
            scale: scale_for(r_hat, &measurements[k], j),
        })
        .collect())
}

/// A floating value `mant * 2^exp` that neither overflows nor underflows
/// across long products.
#[derive(Clone, Copy)]
struct Scaled {
    mant: f64,
    exp: i64,
}

impl Scaled {
    const STEP: i64 = 512;

    fn one() -> Self {
        Scaled { mant: 1.0, exp: 0 }
    }

    fn mul(&mut self, x: f64) {
        self.mant *= x;
        let big = 2f64.powi(Self::STEP as i32);
        while self.mant > big {
            self.mant /= big;
            self.exp += Self::STEP;
        }
        while self.mant < 1.0 / big {
            self.mant *= big;
            self.exp -= Self::STEP;
        }
    }

    fn value(self) -> f64 {
        if self.exp < -1100 {
            0.0
        } else {
            self.mant * 2f64.powi(self.exp as i32)
        }
    }

    fn ln(self) -> f64 {
        self.mant.ln() + self.exp as f64 * std::f64::consts::LN_2
    }
}

/// Multiplies `acc` by `C(a, b)` (or its reciprocal), one ratio at a time.
fn mul_choose(acc: &mut Scaled, a: u64, b: u64, invert: bool) {
    let b = b.min(a - b);
    for i in 1..=b {
        let f = (a - b + i) as f64 / i as f64;
        acc.mul(if invert { 1.0 / f } else { f });
    }
}

/// Hypergeometric probability `Pr(X = k)` as a scaled value.
fn pmf_scaled(population: u64, a: u64, b: u64, k: u64) -> Scaled {
    let mut acc = Scaled::one();
    mul_choose(&mut acc, a, k, false);
    mul_choose(&mut acc, population - a, b - k, false);
    mul_choose(&mut acc, population, b, true);
    acc
}

/// One hypergeometric overlap test with its natural-log tail probability.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapTest {
    pub population: u64,
    pub set_a_size: u64,
    pub set_b_size: u64,
    pub overlap: u64,
    pub log_pval: f64,
}

impl OverlapTest {
    pub fn new(population: u64, set_a_size: u64, set_b_size: u64, overlap: u64) -> Result<Self> {
        let log_pval = hypergeom_log_tail(population, set_a_size, set_b_size, overlap)?;
        Ok(OverlapTest { population, set_a_size, set_b_size, overlap, log_pval })
    }
}

/// `ln Pr(X >= overlap)` for `X ~ Hypergeometric(population, set_a, set_b)`.
///
/// The probability mass at the start of the shorter tail is built as an
/// exponent-tracked product of binomial ratios; the tail is then summed with
/// the mass-function recurrence. Above the mode the upper tail is summed
/// directly, otherwise the result is `ln(1 - lower tail)`.
pub fn hypergeom_log_tail(population: u64, set_a: u64, set_b: u64, overlap: u64) -> Result<f64> {
    if set_a > population || set_b > population {
        return Err(Error::Parameter(format!(
            "set sizes {set_a} and {set_b} exceed the population {population}"
        )));
    }
    if overlap > set_a.min(set_b) {
        return Err(Error::Parameter(format!("overlap {overlap} exceeds min({set_a}, {set_b})")));
    }
    let (n, ka, nb) = (population, set_a, set_b);
    let lo = (ka + nb).saturating_sub(n);
    let hi = ka.min(nb);
    if overlap <= lo {
        return Ok(0.0);
    }
    // ratio Pr(X = k + 1) / Pr(X = k)
    let up = |k: u64| ((ka - k) as f64 * (nb - k) as f64) / ((k + 1) as f64 * (n + k + 1 - ka - nb) as f64);
    let mode = ((nb + 1) as u128 * (ka + 1) as u128 / (n + 2) as u128) as u64;
    if overlap > mode {
        let start = pmf_scaled(n, ka, nb, overlap);
        let (mut sum, mut term) = (1.0f64, 1.0f64);
        for k in overlap..hi {
            let r = up(k);
            term *= r;
            sum += term;
            if term <= 1e-20 * sum && r < 0.5 {
                break;
            }
        }
        let mut acc = start;
        acc.mul(sum);
        Ok(acc.ln().min(0.0))
    } else {
        let start = pmf_scaled(n, ka, nb, overlap - 1);
        let (mut sum, mut term) = (1.0f64, 1.0f64);
        let mut k = overlap - 1;
        while k > lo {
            let r = 1.0 / up(k - 1);
            term *= r;
            sum += term;
            if term <= 1e-20 * sum && r < 0.5 {
                break;
            }
            k -= 1;
        }
        let mut acc = start;
        acc.mul(sum);
        let lower = acc.value();
        Ok((-lower.min(1.0)).ln_1p().min(0.0))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapRow {
    /// 0-based regulator (row of `Ĉ`).
    pub regulator: usize,
    pub set_name: String,
    pub test: OverlapTest,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapReport {
    /// Every (regulator, set) pair ordered by ascending `log_pval`, then
    /// descending overlap, then regulator and set order.
    pub rows: Vec<OverlapRow>,
    /// One-to-one (regulator, set index) assignment maximising `Σ -log_pval`.
    pub assignment: Vec<(usize, usize)>,
}

impl OverlapReport {
    pub fn to_tsv(&self) -> String {
        let mut s = String::from("regulator\tset_name\toverlap\tlog_pval\n");
        for r in &self.rows {
            s += &format!("{}\t{}\t{}\t{}\n", r.regulator + 1, r.set_name, r.test.overlap, r.test.log_pval);
        }
        s
    }
}

/// Hypergeometric overlap of each inferred target set with each prior set.
pub fn set_overlap_report(
    supports: &[Vec<usize>],
    prior_sets: &[(String, Vec<usize>)],
    population: usize,
) -> Result<OverlapReport> {
    let max_index = supports.iter().chain(prior_sets.iter().map(|(_, s)| s)).flatten().max().copied();
    if let Some(mx) = max_index.filter(|&mx| mx >= population) {
        return Err(Error::Parameter(format!("index {} exceeds the population {population}", mx + 1)));
    }
    let mut rows = Vec::with_capacity(supports.len() * prior_sets.len());
    let mut weights = DenseMatrix::zeros(supports.len(), prior_sets.len());
    for (r, sup) in supports.iter().enumerate() {
        for (s, (name, set)) in prior_sets.iter().enumerate() {
            let overlap = sup.iter().filter(|x| set.contains(x)).count() as u64;
            let test = OverlapTest::new(population as u64, sup.len() as u64, set.len() as u64, overlap)?;
            weights[(r, s)] = -test.log_pval;
            rows.push((s, OverlapRow { regulator: r, set_name: name.clone(), test }));
        }
    }
    rows.sort_by(|(sa, a), (sb, b)| {
        a.test
            .log_pval
            .total_cmp(&b.test.log_pval)
            .then(b.test.overlap.cmp(&a.test.overlap))
            .then(a.regulator.cmp(&b.regulator))
            .then(sa.cmp(sb))
    });
    Ok(OverlapReport {
        rows: rows.into_iter().map(|(_, r)| r).collect(),
        assignment: max_weight_assignment(&weights),
    })
}
