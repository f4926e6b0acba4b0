//! `distortion`: experiment harness for the metric-distortion voting
//! laboratory.
//!
//! Verbs: `gen` (emit instance files), `run` (config-driven sweeps with
//! bound assertions), `certify` (worst-case LP for one candidate),
//! `doubling` (doubling constant of a metric), `report` (summarize a JSON
//! report). Exit codes: 0 = all assertions pass, 2 = a bound assertion
//! failed, 1 = operational error.

mod experiment;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use distortion_core::{
    build_lp, doubling_constant, gen_random_euclidean, gen_random_graph, gen_rho_lb,
    gen_sq_euclid_lb, gen_stv_tree_lb, gen_ultrametric_lb,
    io::{election_to_json, metric_from_json, metric_to_json},
    worst_case_distortion, CoverMode, Election,
};

use experiment::{parse_p_norm, report_to_csv, run_experiment, ExperimentConfig, Report};

#[derive(Parser)]
#[command(name = "distortion", version, about = "Metric-distortion voting laboratory")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate an instance and write it in the election file format.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Run a config-driven sweep and write CSV/JSON reports.
    Run {
        /// Experiment config (JSON with a schema_version field).
        config: PathBuf,
        /// Override the config's CSV output path.
        #[arg(long)]
        csv_out: Option<PathBuf>,
        /// Override the config's JSON output path.
        #[arg(long)]
        json_out: Option<PathBuf>,
    },
    /// Worst-case distortion of a candidate over consistent pseudometrics.
    Certify {
        /// Election file.
        election: PathBuf,
        /// Candidate to certify.
        #[arg(long)]
        candidate: usize,
        /// Metric relaxation factor (1 = standard metrics).
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        /// Also write the maximizing linear program in LP exchange format.
        #[arg(long)]
        lp_out: Option<PathBuf>,
    },
    /// Doubling constant and dimension of a metric file.
    Doubling {
        /// Metric file, or an election file with --from-election.
        metric: PathBuf,
        /// exact | greedy
        #[arg(long, default_value = "exact")]
        mode: String,
        /// Read the metric from an election file's embedding instead.
        #[arg(long)]
        from_election: bool,
    },
    /// Summarize a JSON report; exits 2 if any row failed.
    Report {
        report: PathBuf,
    },
}

#[derive(Subcommand)]
enum GenKind {
    /// Layered-tree STV lower bound.
    Tree {
        #[arg(long)]
        height: usize,
        /// Number of candidates collocated at the hub (at least 1).
        #[arg(long, default_value_t = 1)]
        extra: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write {witness, root, hub} as JSON.
        #[arg(long)]
        witness_out: Option<PathBuf>,
    },
    /// Minimax-path ultra-metric lower bound (distortion 2).
    Ultra {
        /// Even voter count.
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// 4-point rho-approximate lower bound.
    Rho {
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 1)]
        n_half: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Squared-Euclidean line lower bound.
    SqEuclid {
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 1)]
        n_half: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Uniform random points in [0,1]^dim.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        /// "2", "inf", "squared", or any float p >= 1.
        #[arg(long, default_value = "2")]
        p_norm: String,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random connected weighted graph under shortest-path distances.
    Graph {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.cmd {
        Cmd::Gen { kind } => {
            cmd_gen(kind)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Run { config, csv_out, json_out } => cmd_run(&config, csv_out, json_out),
        Cmd::Certify { election, candidate, rho, lp_out } => {
            cmd_certify(&election, candidate, rho, lp_out)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Doubling { metric, mode, from_election } => {
            cmd_doubling(&metric, &mode, from_election)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Report { report } => cmd_report(&report),
    }
}

fn emit(text: &str, out: Option<PathBuf>) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(&path, text)
            .map_err(|err| anyhow::anyhow!("writing {}: {err}", path.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn cmd_gen(kind: GenKind) -> anyhow::Result<()> {
    let (election, out): (Election, Option<PathBuf>) = match kind {
        GenKind::Tree { height, extra, out, witness_out } => {
            let tree = gen_stv_tree_lb(height, extra)?;
            if let Some(path) = witness_out {
                #[derive(Serialize)]
                struct WitnessFile<'a> {
                    witness: &'a [usize],
                    root: usize,
                    hub: usize,
                }
                let text = serde_json::to_string_pretty(&WitnessFile {
                    witness: &tree.witness,
                    root: tree.root,
                    hub: tree.hub,
                })?;
                emit(&text, Some(path))?;
            }
            (tree.election, out)
        }
        GenKind::Ultra { n, out } => (gen_ultrametric_lb(n)?, out),
        GenKind::Rho { rho, eps, n_half, out } => (gen_rho_lb(rho, eps, n_half)?, out),
        GenKind::SqEuclid { delta, n_half, out } => (gen_sq_euclid_lb(delta, n_half)?, out),
        GenKind::Random { n, m, dim, p_norm, seed, out } => {
            (gen_random_euclidean(n, m, dim, parse_p_norm(&p_norm)?, seed)?, out)
        }
        GenKind::Graph { n, m, seed, out } => (gen_random_graph(n, m, seed)?, out),
    };
    emit(&election_to_json(&election), out)
}

fn cmd_run(
    config_path: &Path,
    csv_out: Option<PathBuf>,
    json_out: Option<PathBuf>,
) -> anyhow::Result<ExitCode> {
    let text = std::fs::read_to_string(config_path)
        .map_err(|err| anyhow::anyhow!("reading {}: {err}", config_path.display()))?;
    let cfg: ExperimentConfig = serde_json::from_str(&text)
        .map_err(|err| anyhow::anyhow!("parsing {}: {err}", config_path.display()))?;
    let base = config_path.parent().unwrap_or(Path::new("."));
    let report = run_experiment(&cfg, base)?;

    let csv_path = csv_out.or_else(|| cfg.csv_out.as_ref().map(|p| base.join(p)));
    let json_path = json_out.or_else(|| cfg.json_out.as_ref().map(|p| base.join(p)));
    let csv_text = report_to_csv(&report)?;
    match csv_path {
        Some(path) => std::fs::write(path, &csv_text)?,
        None => print!("{csv_text}"),
    }
    if let Some(path) = json_path {
        std::fs::write(path, serde_json::to_string_pretty(&report)?)?;
    }
    for err in &report.errors {
        eprintln!("error: {err}");
    }
    eprintln!("{} rows: {} pass, {} fail", report.rows.len(), report.n_pass, report.n_fail);
    if report.n_fail > 0 {
        Ok(ExitCode::from(2))
    } else if !report.errors.is_empty() {
        Ok(ExitCode::from(1))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

fn cmd_certify(
    election_path: &Path,
    candidate: usize,
    rho: f64,
    lp_out: Option<PathBuf>,
) -> anyhow::Result<()> {
    let text = std::fs::read_to_string(election_path)
        .map_err(|err| anyhow::anyhow!("reading {}: {err}", election_path.display()))?;
    let e = distortion_core::io::election_from_json(&text)?;
    anyhow::ensure!(candidate < e.m_candidates(), "candidate {candidate} out of range");
    let result = worst_case_distortion(&e, candidate, rho)?;

    if let Some(path) = lp_out {
        let model = build_lp(&e, candidate, result.reference_optimum, rho)?;
        std::fs::write(&path, model.to_lp_format())?;
    }

    // JSON has no +inf literal; unbounded certificates report value: null.
    #[derive(Serialize)]
    struct CertifyOut {
        candidate: usize,
        rho: f64,
        value: Option<f64>,
        unbounded: bool,
        reference_optimum: usize,
        has_collapsed_points: bool,
        witness: serde_json::Value,
    }
    let out = CertifyOut {
        candidate,
        rho,
        value: result.value.is_finite().then_some(result.value),
        unbounded: result.value.is_infinite(),
        reference_optimum: result.reference_optimum,
        has_collapsed_points: result.has_collapsed_points,
        witness: serde_json::from_str(&metric_to_json(&result.witness))?,
    };
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(())
}

fn cmd_doubling(path: &Path, mode: &str, from_election: bool) -> anyhow::Result<()> {
    let mode = match mode {
        "exact" => CoverMode::Exact,
        "greedy" => CoverMode::Greedy,
        other => anyhow::bail!("unknown mode {other:?} (expected exact|greedy)"),
    };
    let text = std::fs::read_to_string(path)
        .map_err(|err| anyhow::anyhow!("reading {}: {err}", path.display()))?;
    let metric = if from_election {
        let e = distortion_core::io::election_from_json(&text)?;
        e.embedding()
            .ok_or_else(|| anyhow::anyhow!("election has no embedding"))?
            .metric
            .clone()
    } else {
        metric_from_json(&text)?
    };
    let (lambda, dimension) = doubling_constant(&metric, mode)?;
    println!(
        "{}",
        serde_json::json!({ "lambda": lambda, "dimension": dimension })
    );
    Ok(())
}

fn cmd_report(path: &Path) -> anyhow::Result<ExitCode> {
    let text = std::fs::read_to_string(path)
        .map_err(|err| anyhow::anyhow!("reading {}: {err}", path.display()))?;
    let report: Report = serde_json::from_str(&text)?;
    let mut by_rule: Vec<(String, usize, usize)> = Vec::new();
    for row in &report.rows {
        match by_rule.iter_mut().find(|(r, _, _)| *r == row.rule) {
            Some((_, pass, fail)) => {
                if row.pass {
                    *pass += 1;
                } else {
                    *fail += 1;
                }
            }
            None => by_rule.push((row.rule.clone(), row.pass as usize, !row.pass as usize)),
        }
    }
    by_rule.sort();
    println!("rule,rows,pass,fail");
    for (rule, pass, fail) in &by_rule {
        println!("{rule},{},{pass},{fail}", pass + fail);
    }
    println!("total,{},{},{}", report.rows.len(), report.n_pass, report.n_fail);
    Ok(if report.n_fail > 0 { ExitCode::from(2) } else { ExitCode::SUCCESS })
}
