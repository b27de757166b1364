//! Batch command-line surface for the rank-aggregation toolkit: instance
//! generation, distance and slack queries, aggregation runs, simulated-MPC
//! runs with cost traces, and the verification suites.
//!
//! Exit codes: 0 on success, 1 on input errors (bad flags, unreadable or
//! malformed files, incompatible parameters), 2 when a simulated MPC run
//! violates its per-machine word cap.

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use rankmedian::mpc::{self, MpcConfig, MpcTrace};
use rankmedian::oracles::{self, OracleBudget};
use rankmedian::reconstruct::{self, ReconstructParams};
use rankmedian::slack::{self, FrameworkConfig};
use rankmedian::verify::{self, CriterionReport};
use rankmedian::{dist, gen, io, solvers};
use rankmedian::{Error, Instance, Metric, Permutation, Result};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "rankmedian",
    version,
    about = "Approximate 1-medians of permutation sets under Hamming, footrule, Kendall, and move distances"
)]
struct Cli {
    /// Seed for every randomized step; omitted, a seed is drawn from entropy
    /// and printed to stderr.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Emit machine-readable JSON on stdout instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Distance to work in (hamming, weighted-hamming, footrule, kendall,
    /// weighted-kendall, ulam, weighted-ulam).
    #[arg(long, global = true, value_parser = parse_metric)]
    metric: Option<Metric>,

    /// Memory/block exponent for MPC simulation and reconstruction.
    #[arg(long, global = true)]
    epsilon: Option<f64>,

    /// Grid density of the reconstruction window enumeration.
    #[arg(long, global = true)]
    rho: Option<f64>,

    /// Accuracy parameter of the sampling framework (in (0, 1)).
    #[arg(long, global = true)]
    delta: Option<f64>,

    /// Override the local-subset size of the sampling framework.
    #[arg(long, global = true)]
    r: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a random instance file (and, for the planted model, a sidecar
    /// with the hidden center).
    Gen {
        /// Permutation length.
        #[arg(long)]
        n: usize,
        /// Number of members.
        #[arg(long)]
        m: usize,
        /// Generation model.
        #[arg(long, value_enum, default_value_t = Model::Uniform)]
        model: Model,
        /// Noise moves per member (planted model only).
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Output path.
        out: PathBuf,
    },
    /// Distance between two members of an instance file.
    Dist {
        file: PathBuf,
        /// First member index (0-based).
        #[arg(long, default_value_t = 0)]
        i: usize,
        /// Second member index (0-based).
        #[arg(long, default_value_t = 1)]
        j: usize,
    },
    /// Total triangle-inequality slack of candidate medians against an
    /// instance.
    Slack {
        file: PathBuf,
        /// Report only this member as the candidate (default: all members).
        #[arg(long)]
        member: Option<usize>,
    },
    /// Run the sampling consensus pipeline and print a run report.
    Aggregate {
        file: PathBuf,
        /// Pipeline to run.
        #[arg(long, value_enum, default_value_t = Algorithm::Slack)]
        algorithm: Algorithm,
        /// Score candidates against the whole instance and, when the
        /// enumeration budget permits, report OPT and the ratio.
        #[arg(long)]
        verify: bool,
        /// Enumeration budget per block (reconstruct algorithm only).
        #[arg(long, default_value_t = 1_000_000)]
        tuple_cap: usize,
    },
    /// Simulated massively-parallel runs with cost traces.
    #[command(subcommand)]
    Mpc(MpcCmd),
    /// Run a verification suite and print one line per criterion.
    Verify {
        /// Suite name: all, distances, slack-identity, lemma-bounds, ratios,
        /// reconstruction, mpc-fidelity, mpc-accounting, sampling.
        #[arg(default_value = "all")]
        suite: String,
    },
}

#[derive(Subcommand)]
enum MpcCmd {
    /// Distributed distance between two members of an instance file.
    Dist {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        i: usize,
        #[arg(long, default_value_t = 1)]
        j: usize,
    },
    /// Distributed positional/pairwise median (hamming, footrule, kendall).
    Median { file: PathBuf },
    /// Distributed sampling consensus pipeline.
    Aggregate {
        file: PathBuf,
        #[arg(long)]
        verify: bool,
        #[arg(long, default_value_t = 1_000_000)]
        tuple_cap: usize,
    },
    /// Distributed move-distance reconstruction (exactly five members).
    Reconstruct {
        file: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        tuple_cap: usize,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Model {
    Uniform,
    Planted,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    /// Subset sampling with the metric's local consensus rule.
    Slack,
    /// Block reconstruction for the move distance (m = 5).
    Reconstruct,
}

fn parse_metric(s: &str) -> std::result::Result<Metric, String> {
    Metric::ALL
        .iter()
        .copied()
        .find(|m| m.name() == s)
        .ok_or_else(|| {
            let names: Vec<&str> = Metric::ALL.iter().map(|m| m.name()).collect();
            format!("unknown metric {s:?}; choose one of: {}", names.join(", "))
        })
}

/// Summary of one run, emitted as JSON with `--json`.  Reports round-trip:
/// parsing an emitted report yields an equal value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct RunReport {
    instance: InstanceSummary,
    algorithm: String,
    params: serde_json::Value,
    output: Permutation,
    /// Mean distance of the output to the instance.
    cost: f64,
    /// Exact optimum, present only when the enumeration budget permitted it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    opt: Option<f64>,
    /// cost / opt; present exactly when `opt` is.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    trace: Option<MpcTrace>,
    seed: u64,
    wall_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct InstanceSummary {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    path: Option<PathBuf>,
    n: usize,
    m: usize,
    weighted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct DistReport {
    metric: Metric,
    i: usize,
    j: usize,
    value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    trace: Option<MpcTrace>,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match run(&cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::CapExceeded { .. } => 2,
                _ => 1,
            };
            std::process::exit(code);
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.cmd {
        Cmd::Gen { n, m, model, k, out } => cmd_gen(cli, *n, *m, *model, *k, out),
        Cmd::Dist { file, i, j } => cmd_dist(cli, file, *i, *j, false),
        Cmd::Slack { file, member } => cmd_slack(cli, file, *member),
        Cmd::Aggregate {
            file,
            algorithm,
            verify,
            tuple_cap,
        } => cmd_aggregate(cli, file, *algorithm, *verify, *tuple_cap),
        Cmd::Mpc(MpcCmd::Dist { file, i, j }) => cmd_dist(cli, file, *i, *j, true),
        Cmd::Mpc(MpcCmd::Median { file }) => cmd_mpc_median(cli, file),
        Cmd::Mpc(MpcCmd::Aggregate {
            file,
            verify,
            tuple_cap,
        }) => cmd_mpc_aggregate(cli, file, *verify, *tuple_cap),
        Cmd::Mpc(MpcCmd::Reconstruct { file, tuple_cap }) => {
            cmd_mpc_reconstruct(cli, file, *tuple_cap)
        }
        Cmd::Verify { suite } => cmd_verify(cli, suite),
    }
}

/// The seed actually used this run; drawn from entropy (and announced on
/// stderr) when the flag is absent.
fn resolve_seed(cli: &Cli) -> u64 {
    match cli.seed {
        Some(s) => s,
        None => {
            let s = rand::random::<u64>();
            eprintln!("seed {s}");
            s
        }
    }
}

fn require_metric(cli: &Cli) -> Result<Metric> {
    cli.metric.ok_or_else(|| {
        let names: Vec<&str> = Metric::ALL.iter().map(|m| m.name()).collect();
        Error::InvalidInput(format!(
            "this command needs --metric (one of: {})",
            names.join(", ")
        ))
    })
}

fn mpc_config(cli: &Cli) -> MpcConfig {
    MpcConfig {
        epsilon: cli.epsilon.unwrap_or(0.5),
        ..MpcConfig::default()
    }
}

fn recon_params(cli: &Cli, tuple_cap: usize) -> ReconstructParams {
    ReconstructParams {
        epsilon: cli.epsilon.unwrap_or(0.5),
        rho: cli.rho.unwrap_or(0.25),
        tuple_cap,
    }
}

fn framework(cli: &Cli, metric: Metric, q: &Instance, seed: u64) -> Result<FrameworkConfig> {
    let mut fw =
        FrameworkConfig::for_instance(metric, q.n(), q.m(), cli.delta.unwrap_or(0.25), seed)?;
    if let Some(r) = cli.r {
        fw.r = r;
    }
    Ok(fw)
}

fn summary(path: &Path, q: &Instance) -> InstanceSummary {
    InstanceSummary {
        path: Some(path.to_path_buf()),
        n: q.n(),
        m: q.m(),
        weighted: q.weights.is_some(),
    }
}

fn member<'q>(q: &'q Instance, idx: usize) -> Result<&'q Permutation> {
    q.perms.get(idx).ok_or(Error::IndexOutOfRange {
        index: idx,
        len: q.m(),
    })
}

fn one_line(p: &Permutation) -> String {
    let digits: Vec<String> = p.to_one_based().iter().map(usize::to_string).collect();
    digits.join(" ")
}

fn emit_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

/// cost / opt with a guard for degenerate zero-cost instances; errors if the
/// claimed optimum beats the reported cost by more than float noise.
fn ratio_of(cost: f64, opt: f64) -> Result<f64> {
    let ratio = if opt <= 1e-12 {
        if cost <= 1e-12 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        cost / opt
    };
    if ratio < 1.0 - 1e-9 {
        return Err(Error::Invariant(format!(
            "approximation ratio {ratio} fell below 1 (cost {cost}, opt {opt})"
        )));
    }
    Ok(ratio)
}

/// Exact optimum and ratio when the factorial-enumeration budget permits,
/// `(None, None)` otherwise.
fn opt_and_ratio(q: &Instance, metric: Metric, cost: f64) -> Result<(Option<f64>, Option<f64>)> {
    match oracles::exact_median(q, metric, &OracleBudget::default()) {
        Ok((_, opt)) => {
            let ratio = ratio_of(cost, opt)?;
            Ok((Some(opt), Some(ratio)))
        }
        Err(Error::BudgetExceeded { .. }) => Ok((None, None)),
        Err(e) => Err(e),
    }
}

fn print_trace(t: &MpcTrace) {
    println!(
        "mpc: rounds {}, machines {}, peak words/machine {}, total words {}, messages {}, oracle calls {}",
        t.rounds,
        t.machines_used,
        t.peak_words_per_machine,
        t.total_words,
        t.total_messages,
        t.oracle_calls.len()
    );
}

fn print_report(cli: &Cli, rep: &RunReport) -> Result<()> {
    if cli.json {
        return emit_json(rep);
    }
    println!("algorithm: {}", rep.algorithm);
    println!("median: {}", one_line(&rep.output));
    println!("cost: {:.6}", rep.cost);
    if let (Some(opt), Some(ratio)) = (rep.opt, rep.ratio) {
        println!("opt: {opt:.6}  ratio: {ratio:.6}");
    }
    if let Some(t) = &rep.trace {
        print_trace(t);
    }
    println!("seed: {}", rep.seed);
    println!("wall: {:.1} ms", rep.wall_ms);
    Ok(())
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".center");
    PathBuf::from(s)
}

fn cmd_gen(cli: &Cli, n: usize, m: usize, model: Model, k: usize, out: &Path) -> Result<()> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidInput(format!(
            "n and m must be positive, got n = {n}, m = {m}"
        )));
    }
    let seed = resolve_seed(cli);
    let (inst, center) = match model {
        Model::Uniform => (gen::uniform_instance(n, m, seed), None),
        Model::Planted => {
            let (q, center) = gen::planted_instance(n, m, k, seed);
            (q, Some(center))
        }
    };
    io::write_instance(out, &inst)?;
    let center_path = match &center {
        Some(c) => {
            let path = sidecar_path(out);
            std::fs::write(&path, format!("{}\n", one_line(c)))?;
            Some(path)
        }
        None => None,
    };
    if cli.json {
        emit_json(&serde_json::json!({
            "path": out,
            "n": n,
            "m": m,
            "model": match model { Model::Uniform => "uniform", Model::Planted => "planted" },
            "noiseMoves": match model { Model::Uniform => None, Model::Planted => Some(k) },
            "center": center_path,
            "seed": seed,
        }))?;
    } else {
        println!("wrote n = {n}, m = {m} to {}", out.display());
        if let Some(p) = center_path {
            println!("hidden center in {}", p.display());
        }
    }
    Ok(())
}

fn cmd_dist(cli: &Cli, file: &Path, i: usize, j: usize, distributed: bool) -> Result<()> {
    let q = io::read_instance(file)?;
    let metric = require_metric(cli)?;
    let x = member(&q, i)?;
    let y = member(&q, j)?;
    let (value, trace) = if distributed {
        let (value, trace) = mpc::mpc_distance(metric, x, y, q.weights.as_ref(), &mpc_config(cli))?;
        (value, Some(trace))
    } else {
        (dist::distance(metric, x, y, q.weights.as_ref())?, None)
    };
    let rep = DistReport {
        metric,
        i,
        j,
        value,
        trace,
    };
    if cli.json {
        emit_json(&rep)
    } else {
        println!("{} distance between members {i} and {j}: {value}", metric);
        if let Some(t) = &rep.trace {
            print_trace(t);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct SlackLine {
    member: usize,
    total: f64,
    pairs: usize,
}

fn cmd_slack(cli: &Cli, file: &Path, only: Option<usize>) -> Result<()> {
    let q = io::read_instance(file)?;
    let metric = require_metric(cli)?;
    let members: Vec<usize> = match only {
        Some(i) => {
            member(&q, i)?;
            vec![i]
        }
        None => (0..q.m()).collect(),
    };
    let mut lines = Vec::with_capacity(members.len());
    for i in members {
        let report = slack::total_slack(&q, &q.perms[i], metric)?;
        lines.push(SlackLine {
            member: i,
            total: report.total,
            pairs: report.pairwise.len(),
        });
    }
    if cli.json {
        emit_json(&lines)
    } else {
        for l in &lines {
            println!(
                "member {}: total slack {:.6} over {} pairs",
                l.member, l.total, l.pairs
            );
        }
        Ok(())
    }
}

fn cmd_aggregate(
    cli: &Cli,
    file: &Path,
    algorithm: Algorithm,
    verify_flag: bool,
    tuple_cap: usize,
) -> Result<()> {
    let q = io::read_instance(file)?;
    let metric = require_metric(cli)?;
    let seed = resolve_seed(cli);
    let start = Instant::now();
    let (name, params, output, cost) = match algorithm {
        Algorithm::Slack => {
            let mut fw = framework(cli, metric, &q, seed)?;
            if verify_flag {
                fw.test_mode = true;
            }
            let solver = solvers::default_solver(metric);
            let res = slack::aggregate(&q, metric, &fw, solver.as_ref())?;
            let cost = res.exact_cost.unwrap_or(res.estimated_cost);
            ("slack".to_string(), serde_json::to_value(&fw)?, res.median, cost)
        }
        Algorithm::Reconstruct => {
            if metric.base() != Metric::Ulam {
                return Err(Error::InvalidInput(format!(
                    "the reconstruct pipeline is specific to the move distance, not {metric}"
                )));
            }
            let params = recon_params(cli, tuple_cap);
            let rep = reconstruct::scalable_median_reconstruct(&q, &params)?;
            let cost = dist::cost(metric, &rep.median, &q)?;
            (
                "reconstruct".to_string(),
                serde_json::to_value(params)?,
                rep.median,
                cost,
            )
        }
    };
    let (opt, ratio) = if verify_flag {
        opt_and_ratio(&q, metric, cost)?
    } else {
        (None, None)
    };
    let rep = RunReport {
        instance: summary(file, &q),
        algorithm: name,
        params,
        output,
        cost,
        opt,
        ratio,
        trace: None,
        seed,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    print_report(cli, &rep)
}

fn cmd_mpc_median(cli: &Cli, file: &Path) -> Result<()> {
    let q = io::read_instance(file)?;
    let metric = require_metric(cli)?;
    let seed = resolve_seed(cli);
    let cfg = mpc_config(cli);
    let start = Instant::now();
    let (output, trace) = match metric {
        Metric::Hamming => mpc::mpc_hamming_median(&q, &cfg)?,
        Metric::Footrule => mpc::mpc_footrule_median(&q, &cfg)?,
        Metric::Kendall => mpc::mpc_kendall_median(&q, seed, &cfg)?,
        other => {
            return Err(Error::InvalidInput(format!(
                "mpc median supports hamming, footrule, and kendall; \
                 use `mpc reconstruct` for {other}"
            )))
        }
    };
    let cost = dist::cost(metric, &output, &q)?;
    let rep = RunReport {
        instance: summary(file, &q),
        algorithm: format!("mpc-{}-median", metric.name()),
        params: serde_json::to_value(cfg)?,
        output,
        cost,
        opt: None,
        ratio: None,
        trace: Some(trace),
        seed,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    print_report(cli, &rep)
}

fn cmd_mpc_aggregate(cli: &Cli, file: &Path, verify_flag: bool, tuple_cap: usize) -> Result<()> {
    let q = io::read_instance(file)?;
    let metric = require_metric(cli)?;
    let seed = resolve_seed(cli);
    let cfg = mpc_config(cli);
    let recon = recon_params(cli, tuple_cap);
    let mut fw = framework(cli, metric, &q, seed)?;
    if verify_flag {
        fw.test_mode = true;
    }
    let start = Instant::now();
    let (res, trace) = mpc::mpc_aggregate(&q, metric, &fw, &cfg, &recon)?;
    let cost = res.exact_cost.unwrap_or(res.estimated_cost);
    let (opt, ratio) = if verify_flag {
        opt_and_ratio(&q, metric, cost)?
    } else {
        (None, None)
    };
    let rep = RunReport {
        instance: summary(file, &q),
        algorithm: "mpc-slack".to_string(),
        params: serde_json::json!({ "framework": fw, "mpc": cfg, "reconstruct": recon }),
        output: res.median,
        cost,
        opt,
        ratio,
        trace: Some(trace),
        seed,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    print_report(cli, &rep)
}

fn cmd_mpc_reconstruct(cli: &Cli, file: &Path, tuple_cap: usize) -> Result<()> {
    let q = io::read_instance(file)?;
    let seed = resolve_seed(cli);
    let cfg = mpc_config(cli);
    let params = recon_params(cli, tuple_cap);
    let start = Instant::now();
    let (rep, trace) = mpc::mpc_ulam_reconstruct(&q, &params, &cfg)?;
    let cost = dist::cost(Metric::Ulam, &rep.median, &q)?;
    let report = RunReport {
        instance: summary(file, &q),
        algorithm: "mpc-reconstruct".to_string(),
        params: serde_json::json!({ "reconstruct": params, "mpc": cfg }),
        output: rep.median,
        cost,
        opt: None,
        ratio: None,
        trace: Some(trace),
        seed,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    print_report(cli, &report)
}

fn cmd_verify(cli: &Cli, suite: &str) -> Result<()> {
    let reports: Vec<CriterionReport> = match suite {
        "all" => verify::run_all(),
        "distances" => vec![verify::check_distance_kernels()],
        "slack-identity" => vec![verify::check_slack_identity()],
        "lemma-bounds" => vec![
            verify::check_proximity_bounds(),
            verify::check_sampling_bound(),
        ],
        "ratios" => vec![verify::check_approximation_ratios()],
        "reconstruction" => vec![verify::check_reconstruction()],
        "mpc-fidelity" => vec![verify::check_mpc_fidelity()],
        "mpc-accounting" => vec![verify::check_mpc_accounting()],
        "sampling" => vec![verify::check_sampling_bound()],
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown suite {other:?}; known suites: all, distances, slack-identity, \
                 lemma-bounds, ratios, reconstruction, mpc-fidelity, mpc-accounting, sampling"
            )))
        }
    };
    if cli.json {
        emit_json(&reports)?;
    } else {
        for r in &reports {
            println!("{}", verify::format_line(r));
        }
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        return Err(Error::Invariant(format!(
            "{failed} of {} criteria failed",
            reports.len()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_report() -> RunReport {
        RunReport {
            instance: InstanceSummary {
                path: Some(PathBuf::from("q.txt")),
                n: 6,
                m: 10,
                weighted: false,
            },
            algorithm: "slack".to_string(),
            params: serde_json::json!({ "delta": 0.25 }),
            output: Permutation::from_one_based(&[2, 1, 3, 4, 6, 5]).unwrap(),
            cost: 7.25,
            opt: Some(7.0),
            ratio: Some(7.25 / 7.0),
            trace: None,
            seed: 99,
            wall_ms: 1.5,
        }
    }

    #[test]
    fn run_reports_round_trip_through_json() {
        let rep = sample_report();
        let text = serde_json::to_string(&rep).unwrap();
        let back: RunReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, rep);

        let mut bare = sample_report();
        bare.opt = None;
        bare.ratio = None;
        let text = serde_json::to_string(&bare).unwrap();
        assert!(!text.contains("\"opt\""));
        let back: RunReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, bare);
    }

    #[test]
    fn dist_reports_round_trip_through_json() {
        let rep = DistReport {
            metric: Metric::WeightedKendall,
            i: 0,
            j: 3,
            value: 4.5,
            trace: None,
        };
        let text = serde_json::to_string(&rep).unwrap();
        assert!(text.contains("weighted-kendall"));
        let back: DistReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, rep);
    }

    #[test]
    fn metric_parser_accepts_every_name_and_rejects_garbage() {
        for m in Metric::ALL {
            assert_eq!(parse_metric(m.name()).unwrap(), m);
        }
        assert!(parse_metric("cayley").is_err());
    }

    #[test]
    fn ratio_guard() {
        assert_eq!(ratio_of(0.0, 0.0).unwrap(), 1.0);
        assert!(ratio_of(7.25, 7.0).unwrap() > 1.03);
        assert!(ratio_of(6.0, 7.0).is_err());
    }

    #[test]
    fn sidecar_path_appends_suffix() {
        assert_eq!(
            sidecar_path(Path::new("inst.txt")),
            PathBuf::from("inst.txt.center")
        );
    }
}
