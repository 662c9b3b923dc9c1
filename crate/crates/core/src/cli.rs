//! The `sparsenet` command line.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::decomposition::{default_p_star, infer_network, objective_value, ObjectiveParams};
use crate::error::{Error, Result};
use crate::evaluation::{benchmark_sweep, edge_metrics, evaluate_recovery, Degree, SimParams, SweepAxis, SweepSpec};
use crate::interpret::{match_factors, set_overlap_report};
use crate::io;
use crate::netsim::{gen_poisson_network, gen_powerlaw_network, simulate_data, NetworkModel, Topology};
use crate::sparse_basis::{PursuitConfig, SwitchMode};

const SEED_ENV: &str = "SPARSENET_SEED";

#[derive(Debug, Parser)]
#[command(name = "sparsenet", version, about = "Sparse bipartite network inference with hidden variables")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a gold network and a data matrix.
    Simulate(SimulateArgs),
    /// Infer loadings and activities from a data matrix.
    Infer(InferArgs),
    /// Score an inferred network against a gold network.
    Evaluate(EvaluateArgs),
    /// Run a parameter sweep over simulated instances.
    Benchmark(BenchmarkArgs),
    /// Match measured factors to inferred activities.
    MatchFactors(MatchFactorsArgs),
    /// Hypergeometric overlap of inferred target sets with prior sets.
    Overlap(OverlapArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TopologyArg {
    Poisson,
    Powerlaw,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SwitchArg {
    Fixed,
    Monitor,
}

#[derive(Debug, Args, Serialize)]
pub struct PursuitArgs {
    /// Singularity threshold for Gram downdates and eigenvalues.
    #[arg(long, default_value_t = 1e-10)]
    pub tau_sing: f64,
    /// Eigenvector stagnation threshold.
    #[arg(long, default_value_t = 1e-8)]
    pub tau_conv: f64,
    /// Removals on the inflated matrix before switching back.
    #[arg(long, default_value_t = 10)]
    pub k_switch: usize,
    /// Duplicate-column tolerance on |Pearson|.
    #[arg(long, default_value_t = 0.01)]
    pub epsilon_dup: f64,
    /// Relative threshold below which loadings count as zero.
    #[arg(long, default_value_t = 1e-8)]
    pub zero_tol: f64,
    /// Extra seeds tried per basis column.
    #[arg(long, default_value_t = 256)]
    pub max_restarts: usize,
    /// Switch-back rule for inflated pursuits.
    #[arg(long, value_enum, default_value_t = SwitchArg::Fixed)]
    pub switch_mode: SwitchArg,
    /// Sparsification passes over exact columns.
    #[arg(long, default_value_t = 1)]
    pub refine_passes: usize,
    /// Power iterations before a full eigendecomposition.
    #[arg(long, default_value_t = 256)]
    pub power_max_iter: usize,
}

impl PursuitArgs {
    pub fn config(&self) -> PursuitConfig {
        PursuitConfig {
            tau_sing: self.tau_sing,
            tau_conv: self.tau_conv,
            k_switch: self.k_switch,
            epsilon_dup: self.epsilon_dup,
            zero_tol: self.zero_tol,
            max_restarts: self.max_restarts,
            switch_mode: match self.switch_mode {
                SwitchArg::Fixed => SwitchMode::FixedCycles,
                SwitchArg::Monitor => SwitchMode::CorrelationMonitor,
            },
            refine_passes: self.refine_passes,
            audit_every: 0,
            power_max_iter: self.power_max_iter,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value_t = TopologyArg::Poisson)]
    pub topology: TopologyArg,
    /// Power-law exponent.
    #[arg(long, default_value_t = 2.5)]
    pub gamma: f64,
    /// Observed variables.
    #[arg(long)]
    pub n: usize,
    /// Hidden regulators.
    #[arg(long)]
    pub p: usize,
    /// Mean out-degree, absolute (`50`) or relative to N (`0.1N`).
    #[arg(long)]
    pub degree: String,
    /// Observations.
    #[arg(long)]
    pub m: usize,
    /// Noise level as a fraction of the signal standard deviation.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, env = SEED_ENV)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Output files are `<prefix>.network.tsv`, `<prefix>.data.tsv` and `<prefix>.regulators.tsv`.
    #[arg(long, default_value = "sim")]
    pub prefix: String,
}

#[derive(Debug, Args, Serialize)]
pub struct InferArgs {
    /// Data matrix TSV (observations by variables).
    #[arg(long)]
    pub data: PathBuf,
    /// Number of basis vectors.
    #[arg(long, conflicts_with = "p_guess")]
    pub p_star: Option<usize>,
    /// Guess of the number of regulators; uses ceil(1.25 P) + 2 basis vectors.
    #[arg(long)]
    pub p_guess: Option<usize>,
    /// Gold network to score the result against in the report.
    #[arg(long)]
    pub gold: Option<PathBuf>,
    #[command(flatten)]
    pub pursuit: PursuitArgs,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Output files are `<prefix>.network.tsv`, `<prefix>.activities.tsv` and `<prefix>.report.json`.
    #[arg(long, default_value = "inferred")]
    pub prefix: String,
    /// Recorded in the report; inference itself is deterministic.
    #[arg(long, env = SEED_ENV)]
    pub seed: Option<u64>,
    /// Record wall time in the report.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub inferred: PathBuf,
    #[arg(long)]
    pub gold: PathBuf,
    /// Also write the JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct BenchmarkArgs {
    #[arg(long, value_parser = parse_axis)]
    #[serde(serialize_with = "display")]
    pub axis: SweepAxis,
    /// Comma-separated grid values.
    #[arg(long, value_delimiter = ',', required = true)]
    pub grid: Vec<f64>,
    /// Comma-separated seeds; defaults to `replicates` seeds starting at `--seed`.
    #[arg(long, value_delimiter = ',')]
    pub seeds: Vec<u64>,
    #[arg(long, env = SEED_ENV, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 5)]
    pub replicates: u64,
    #[arg(long, value_enum, default_value_t = TopologyArg::Poisson)]
    pub topology: TopologyArg,
    #[arg(long, default_value_t = 2.5)]
    pub gamma: f64,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub degree: String,
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    /// Infer with ceil(1.25 P) + 2 basis vectors instead of P.
    #[arg(long)]
    pub overshoot: bool,
    #[command(flatten)]
    pub pursuit: PursuitArgs,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Record wall time per cell (makes the table non-reproducible).
    #[arg(long)]
    pub timing: bool,
    /// Per-cell CSV.
    #[arg(long)]
    pub out: PathBuf,
    /// Per-grid-point CSV.
    #[arg(long)]
    pub aggregate: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct MatchFactorsArgs {
    /// Activities TSV written by `infer`.
    #[arg(long)]
    pub activities: PathBuf,
    /// `label<TAB>config_index<TAB>value` lines, 1-based configuration indices.
    #[arg(long)]
    pub measurements: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct OverlapArgs {
    /// Inferred network TSV.
    #[arg(long)]
    pub network: PathBuf,
    /// `set_name<TAB>member_id` lines, 1-based member ids.
    #[arg(long)]
    pub prior_sets: PathBuf,
    /// Population size; defaults to N from the network header.
    #[arg(long)]
    pub population: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the one-to-one best assignment as `regulator<TAB>set_name<TAB>log_pval`.
    #[arg(long)]
    pub assignment: Option<PathBuf>,
}

fn parse_axis(s: &str) -> std::result::Result<SweepAxis, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn display<S: serde::Serializer, T: std::fmt::Display>(x: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn topology(arg: TopologyArg, gamma: f64) -> Topology {
    match arg {
        TopologyArg::Poisson => Topology::Poisson,
        TopologyArg::Powerlaw => Topology::PowerLaw { gamma },
    }
}

fn out_path(dir: &Path, prefix: &str, suffix: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.display().to_string(), source })?;
    Ok(dir.join(format!("{prefix}.{suffix}")))
}

fn to_json(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serialises");
    s.push('\n');
    s
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => io::atomic_write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let degree: Degree = args.degree.parse()?;
    let d = degree.resolve(args.n);
    let net = match topology(args.topology, args.gamma) {
        Topology::PowerLaw { gamma } => gen_powerlaw_network(args.n, args.p, d, gamma, args.seed)?,
        _ => gen_poisson_network(args.n, args.p, d, args.seed)?,
    };
    let ds = simulate_data(&net, args.m, args.noise, args.seed)?;
    io::write_network(&out_path(&args.out_dir, &args.prefix, "network.tsv")?, &net)?;
    io::atomic_write(&out_path(&args.out_dir, &args.prefix, "data.tsv")?, &io::format_matrix(&io::data_header(&ds), &ds.g))?;
    io::atomic_write(
        &out_path(&args.out_dir, &args.prefix, "regulators.tsv")?,
        &io::format_matrix(&io::regulators_header(&ds), &ds.r_gold),
    )?;
    eprintln!(
        "simulated {} edges over {} regulators and {} targets; data {}x{}",
        net.edges.len(),
        net.n_hidden,
        net.n_observed,
        ds.g.rows(),
        ds.g.cols()
    );
    Ok(())
}

pub fn cmd_infer(args: &InferArgs) -> Result<()> {
    let t0 = Instant::now();
    let (_, g) = io::read_matrix(&args.data)?;
    let gold = args.gold.as_deref().map(io::read_network).transpose()?;
    let p_star = match (args.p_star, args.p_guess) {
        (Some(p), _) => p,
        (None, Some(guess)) => default_p_star(guess),
        (None, None) => return Err(Error::Parameter("one of --p-star or --p-guess is required".into())),
    };
    let cfg = args.pursuit.config();
    let fit = infer_network(&g, p_star, &cfg)?;
    let inferred = NetworkModel::from_adjacency(&fit.c_hat, Topology::Inferred, args.seed.unwrap_or(0));
    let score = match &gold {
        Some(net) => {
            let m = evaluate_recovery(&fit.c_hat, &net.adjacency())?;
            let e = edge_metrics(&m, &fit.support, &net.supports());
            Some((m, e))
        }
        None => None,
    };
    let objective = objective_value(&g, &fit.r_hat, &fit.c_hat, ObjectiveParams::default())?;
    let seconds = args.timing.then(|| t0.elapsed().as_secs_f64());
    let columns: Vec<_> = fit
        .basis
        .columns
        .iter()
        .map(|c| {
            json!({
                "support_size": c.support.len(),
                "cycles": c.cycles,
                "termination": c.termination,
                "exact": c.is_exact(),
                "seed_row": c.seed + 1,
            })
        })
        .collect();
    let report = json!({
        "tool": "sparsenet",
        "version": env!("CARGO_PKG_VERSION"),
        "command": "infer",
        "config": args,
        "effective_pursuit": cfg,
        "seed": args.seed,
        "m": g.rows(),
        "n": g.cols(),
        "p_star": p_star,
        "p_inferred": fit.p(),
        "pruned": fit.pruned,
        "dropped": fit.dropped,
        "duplicate_rejections": fit.basis.duplicate_rejections,
        "pursuits": fit.stats.pursuits,
        "residual_fro": fit.residual_fro,
        "svd_tail": fit.svd_tail,
        "objective_lambda0": objective,
        "nonzeros": fit.nonzeros(),
        "singular_values": fit.singular_values,
        "columns": columns,
        "rho_bar": score.as_ref().map(|(m, _)| m.rho_bar),
        "rho": score.as_ref().map(|(m, _)| &m.rho),
        "edges": score.as_ref().map(|(_, e)| e),
        "seconds": seconds,
    });
    io::write_network(&out_path(&args.out_dir, &args.prefix, "network.tsv")?, &inferred)?;
    io::atomic_write(
        &out_path(&args.out_dir, &args.prefix, "activities.tsv")?,
        &io::format_matrix(&format!("# activities m={} p={}", fit.r_hat.rows(), fit.r_hat.cols()), &fit.r_hat),
    )?;
    io::atomic_write(&out_path(&args.out_dir, &args.prefix, "report.json")?, &to_json(&report))?;
    eprintln!("inferred {} regulators ({} pruned, {} dropped), {} edges", fit.p(), fit.pruned, fit.dropped, fit.nonzeros());
    Ok(())
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> Result<()> {
    let inferred = io::read_network(&args.inferred)?;
    let gold = io::read_network(&args.gold)?;
    if inferred.n_observed != gold.n_observed {
        return Err(Error::Dimension(format!(
            "inferred network has {} targets, gold {}",
            inferred.n_observed, gold.n_observed
        )));
    }
    let m = evaluate_recovery(&inferred.adjacency(), &gold.adjacency())?;
    let e = edge_metrics(&m, &inferred.supports(), &gold.supports());
    let report = json!({
        "tool": "sparsenet",
        "version": env!("CARGO_PKG_VERSION"),
        "command": "evaluate",
        "config": args,
        "rho_bar": m.rho_bar,
        "pairs": m.pairs.iter().map(|(i, k)| [i + 1, k + 1]).collect::<Vec<_>>(),
        "rho": m.rho,
        "scale": m.scale,
        "p_inferred": m.p_inferred,
        "p_gold": gold.n_hidden,
        "degenerate": m.degenerate.iter().map(|i| i + 1).collect::<Vec<_>>(),
        "edges": e,
    });
    emit(&to_json(&report), args.out.as_deref())
}

pub fn cmd_benchmark(args: &BenchmarkArgs) -> Result<()> {
    let seeds = if args.seeds.is_empty() {
        (0..args.replicates).map(|k| args.seed + k).collect()
    } else {
        args.seeds.clone()
    };
    let spec = SweepSpec {
        axis: args.axis,
        grid: args.grid.clone(),
        base: SimParams {
            n: args.n,
            p: args.p,
            m: args.m,
            topology: topology(args.topology, args.gamma),
            degree: args.degree.parse()?,
            noise: args.noise,
        },
        seeds,
        overshoot: args.overshoot,
        cfg: args.pursuit.config(),
        jobs: args.jobs,
        timing: args.timing,
    };
    let table = benchmark_sweep(&spec)?;
    io::atomic_write(&args.out, &table.to_csv())?;
    io::atomic_write(&args.aggregate, &table.aggregate_csv())?;
    for r in table.rows.iter().filter(|r| r.error.is_some()) {
        eprintln!("{}={} seed {}: {}", r.axis, r.value, r.seed, r.error.as_deref().unwrap_or(""));
    }
    for a in &table.aggregate {
        eprintln!("{}={}: mean rho {:.4} (sd {:.4}, {} seeds)", a.axis, a.value, a.mean_rho, a.std_rho, a.n_seeds);
    }
    Ok(())
}

pub fn cmd_match_factors(args: &MatchFactorsArgs) -> Result<()> {
    let (_, r_hat) = io::read_matrix(&args.activities)?;
    let text = io::read_text(&args.measurements)?;
    let meas = io::parse_measurements(&text, &args.measurements.display().to_string())?;
    let matches = match_factors(&r_hat, &meas)?;
    let mut out = String::from("label\tregulator\trho\tscale\n");
    for m in &matches {
        out += &format!("{}\t{}\t{}\t{}\n", m.label, m.column + 1, m.rho, m.scale);
    }
    emit(&out, args.out.as_deref())
}

pub fn cmd_overlap(args: &OverlapArgs) -> Result<()> {
    let net = io::read_network(&args.network)?;
    let text = io::read_text(&args.prior_sets)?;
    let sets = io::parse_prior_sets(&text, &args.prior_sets.display().to_string())?;
    let population = args.population.unwrap_or(net.n_observed);
    let report = set_overlap_report(&net.supports(), &sets, population)?;
    emit(&report.to_tsv(), args.out.as_deref())?;
    if let Some(path) = &args.assignment {
        let mut s = String::from("regulator\tset_name\tlog_pval\n");
        for &(r, k) in &report.assignment {
            let row = report.rows.iter().find(|x| x.regulator == r && x.set_name == sets[k].0).expect("pair present");
            s += &format!("{}\t{}\t{}\n", r + 1, sets[k].0, row.test.log_pval);
        }
        io::atomic_write(path, &s)?;
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Infer(a) => cmd_infer(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Benchmark(a) => cmd_benchmark(a),
        Command::MatchFactors(a) => cmd_match_factors(a),
        Command::Overlap(a) => cmd_overlap(a),
    }
}

/// Parses arguments, runs the command and maps failures to exit codes:
/// 1 for numerical failures, 2 for usage and I/O errors.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 1 } else { 2 })
        }
    }
}
