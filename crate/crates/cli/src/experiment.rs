//! Experiment harness: expands an [`ExperimentConfig`] into elections, runs
//! the requested rules, checks bound assertions, and emits report rows.

use std::path::Path;

use serde::{Deserialize, Serialize};

use distortion_core::{
    bound_value, coordination_dynamics, doubling_constant, gen_random_euclidean,
    gen_random_graph, gen_rho_lb, gen_sq_euclid_lb, gen_stv_tree_lb, gen_ultrametric_lb,
    greedy_dynamics, io::election_from_json, plurality_matching_winner, realized_distortion,
    score_winners, social_cost, stv_trace, stv_winners, BinaryOperator, BoundTheorem, CoverMode,
    Election, MetricClass, PNorm, ScoreRule,
};

pub const SCHEMA_VERSION: u32 = 1;
/// Relative tolerance for pass/fail bound comparisons.
pub const PASS_TOL: f64 = 1e-6;

/// One instance source: an election file, a named generator with
/// parameters, or a family of random instances over a seed range.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random: Option<RandomSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    Tree { height: usize, #[serde(default = "one")] extra: usize },
    Ultra { n: usize },
    Rho { rho: f64, eps: f64, n_half: usize },
    SqEuclid { delta: f64, n_half: usize },
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RandomSpec {
    pub n: usize,
    pub m: usize,
    #[serde(default = "one")]
    pub dim: usize,
    /// "2", "inf", "squared", or any float p >= 1.
    #[serde(default = "default_p")]
    pub p_norm: String,
    /// "euclidean" (default) or "graph" (random weighted graph metric; dim
    /// and p_norm are ignored).
    #[serde(default = "default_space")]
    pub space: String,
    pub seed_start: u64,
    pub seed_count: u64,
}

fn default_p() -> String {
    "2".to_string()
}

fn default_space() -> String {
    "euclidean".to_string()
}

/// A bound assertion: rows of `rule` must have distortion at most the bound
/// named by `bound` (see [`resolve_bound`] for the recognized ids).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundAssertion {
    pub rule: String,
    pub bound: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub instances: Vec<InstanceSpec>,
    pub rules: Vec<String>,
    #[serde(default = "default_operator")]
    pub operator: String,
    #[serde(default)]
    pub assertions: Vec<BoundAssertion>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv_out: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub json_out: Option<String>,
}

fn default_operator() -> String {
    "sum".to_string()
}

/// One report row; CSV columns match the field order. Empty cost columns
/// mean the instance carries no embedding.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportRow {
    pub instance: String,
    pub rule: String,
    pub winner: usize,
    pub social_cost: Option<f64>,
    pub distortion: Option<f64>,
    pub bound: Option<f64>,
    pub margin: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub rows: Vec<ReportRow>,
    pub n_pass: usize,
    pub n_fail: usize,
    /// Instances that could not be loaded or evaluated, with the error.
    pub errors: Vec<String>,
}

pub fn parse_p_norm(s: &str) -> anyhow::Result<PNorm> {
    match s {
        "inf" => Ok(PNorm::P(f64::INFINITY)),
        "squared" => Ok(PNorm::Squared),
        other => {
            let p: f64 = other.parse().map_err(|_| anyhow::anyhow!("bad p-norm {other:?}"))?;
            anyhow::ensure!(p >= 1.0, "p-norm must be >= 1, got {p}");
            Ok(PNorm::P(p))
        }
    }
}

pub fn parse_operator(s: &str) -> anyhow::Result<BinaryOperator> {
    match s {
        "sum" => Ok(BinaryOperator::Sum),
        "max" => Ok(BinaryOperator::Max),
        other => anyhow::bail!("unknown operator {other:?} (expected sum|max)"),
    }
}

fn load_instance(spec: &InstanceSpec, base: &Path) -> anyhow::Result<Vec<(String, Election)>> {
    let sources =
        spec.file.is_some() as u8 + spec.generator.is_some() as u8 + spec.random.is_some() as u8;
    anyhow::ensure!(
        sources == 1,
        "instance {:?} must have exactly one of file/generator/random",
        spec.id
    );
    if let Some(file) = &spec.file {
        let path = base.join(file);
        let text = std::fs::read_to_string(&path)
            .map_err(|err| anyhow::anyhow!("reading {}: {err}", path.display()))?;
        return Ok(vec![(spec.id.clone(), election_from_json(&text)?)]);
    }
    if let Some(gen) = &spec.generator {
        let e = match *gen {
            GeneratorSpec::Tree { height, extra } => gen_stv_tree_lb(height, extra)?.election,
            GeneratorSpec::Ultra { n } => gen_ultrametric_lb(n)?,
            GeneratorSpec::Rho { rho, eps, n_half } => gen_rho_lb(rho, eps, n_half)?,
            GeneratorSpec::SqEuclid { delta, n_half } => gen_sq_euclid_lb(delta, n_half)?,
        };
        return Ok(vec![(spec.id.clone(), e)]);
    }
    let random = spec.random.as_ref().unwrap();
    let mut out = Vec::new();
    for seed in random.seed_start..random.seed_start + random.seed_count {
        let e = match random.space.as_str() {
            "euclidean" => gen_random_euclidean(
                random.n,
                random.m,
                random.dim,
                parse_p_norm(&random.p_norm)?,
                seed,
            )?,
            "graph" => gen_random_graph(random.n, random.m, seed)?,
            other => anyhow::bail!("unknown random space {other:?}"),
        };
        out.push((format!("{}-{seed}", spec.id), e));
    }
    Ok(out)
}

/// Winners of a named rule; parallel-universe STV may return several.
pub fn rule_winners(e: &Election, rule: &str) -> anyhow::Result<Vec<usize>> {
    let identity: Vec<usize> = (0..e.m_candidates()).collect();
    let score = |r: ScoreRule| vec![score_winners(e, r).first()];
    Ok(match rule {
        "plurality" => score(ScoreRule::Plurality),
        "borda" => score(ScoreRule::Borda),
        "veto" => score(ScoreRule::Veto),
        "copeland" => score(ScoreRule::Copeland),
        "approval" => score(ScoreRule::Approval(None)),
        "stv" => vec![stv_trace(e, &identity)?.0],
        "stv_pu" => stv_winners(e)?.winners,
        "plurality_matching" => vec![plurality_matching_winner(e)?.0],
        "greedy" => vec![greedy_dynamics(e, &identity)?.0],
        "coordination" => vec![coordination_dynamics(e)?.0],
        other => {
            if let Some(k) = other.strip_prefix("ktop:") {
                score(ScoreRule::KTop(k.parse()?))
            } else if let Some(t) = other.strip_prefix("approval:") {
                score(ScoreRule::Approval(Some(t.parse()?)))
            } else {
                anyhow::bail!("unknown rule {other:?}");
            }
        }
    })
}

/// Resolves a bound id against an instance. Parameterless forms take their
/// parameters from the instance: `general` uses its candidate count,
/// `doubling` additionally computes the exact doubling constant of the
/// embedding metric, `pm_rho` reads rho off the metric class tag. Explicit
/// forms (`general:m`, `doubling:lambda:m`, `pm_rho:rho`, `line`, ...) are
/// passed through.
pub fn resolve_bound(id: &str, e: &Election) -> anyhow::Result<f64> {
    let m = e.m_candidates();
    let theorem = match id {
        "general" => BoundTheorem::General { m },
        "doubling" => {
            let emb = e
                .embedding()
                .ok_or_else(|| anyhow::anyhow!("doubling bound needs an embedding"))?;
            let (lambda, _) = doubling_constant(&emb.metric, CoverMode::Exact)?;
            BoundTheorem::Doubling { lambda: lambda as f64, m }
        }
        "pm_rho" => {
            let emb = e
                .embedding()
                .ok_or_else(|| anyhow::anyhow!("pm_rho bound needs an embedding"))?;
            match emb.metric.class_tag() {
                MetricClass::RhoApprox(rho) => BoundTheorem::PmRho { rho },
                other => anyhow::bail!("pm_rho bound needs a rho-approximate metric, got {other:?}"),
            }
        }
        other => BoundTheorem::parse(other)?,
    };
    Ok(bound_value(theorem)?)
}

/// Runs the whole sweep. Per-instance failures are isolated into
/// `Report::errors`; rows are sorted by (instance, rule, winner).
pub fn run_experiment(cfg: &ExperimentConfig, base: &Path) -> anyhow::Result<Report> {
    anyhow::ensure!(
        cfg.schema_version == SCHEMA_VERSION,
        "unsupported schema_version {} (expected {SCHEMA_VERSION})",
        cfg.schema_version
    );
    anyhow::ensure!(!cfg.instances.is_empty(), "config lists no instances");
    anyhow::ensure!(!cfg.rules.is_empty(), "config lists no rules");
    let op = parse_operator(&cfg.operator)?;

    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for spec in &cfg.instances {
        let instances = match load_instance(spec, base) {
            Ok(list) => list,
            Err(err) => {
                errors.push(format!("instance {}: {err}", spec.id));
                continue;
            }
        };
        for (id, e) in instances {
            for rule in &cfg.rules {
                match evaluate_rule(&id, &e, rule, op, &cfg.assertions) {
                    Ok(mut rule_rows) => rows.append(&mut rule_rows),
                    Err(err) => errors.push(format!("instance {id}, rule {rule}: {err}")),
                }
            }
        }
    }
    rows.sort_by(|a, b| {
        (&a.instance, &a.rule, a.winner).cmp(&(&b.instance, &b.rule, b.winner))
    });
    let n_pass = rows.iter().filter(|r| r.pass).count();
    let n_fail = rows.len() - n_pass;
    Ok(Report { schema_version: SCHEMA_VERSION, rows, n_pass, n_fail, errors })
}

fn evaluate_rule(
    id: &str,
    e: &Election,
    rule: &str,
    op: BinaryOperator,
    assertions: &[BoundAssertion],
) -> anyhow::Result<Vec<ReportRow>> {
    let winners = rule_winners(e, rule)?;
    let bound_id = assertions.iter().find(|a| a.rule == rule).map(|a| a.bound.as_str());
    let mut rows = Vec::new();
    for w in winners {
        let (cost, distortion) = if e.embedding().is_some() {
            (Some(social_cost(e, w, op)?), Some(realized_distortion(e, w, op)?))
        } else {
            (None, None)
        };
        let bound = match (bound_id, distortion) {
            (Some(bid), Some(_)) => Some(resolve_bound(bid, e)?),
            _ => None,
        };
        let margin = match (bound, distortion) {
            (Some(b), Some(d)) => Some(b - d),
            _ => None,
        };
        let pass = match (bound, distortion) {
            (Some(b), Some(d)) => d <= b + PASS_TOL * b.abs().max(1.0),
            _ => true,
        };
        rows.push(ReportRow {
            instance: id.to_string(),
            rule: rule.to_string(),
            winner: w,
            social_cost: cost,
            distortion,
            bound,
            margin,
            pass,
        });
    }
    Ok(rows)
}

pub fn report_to_csv(report: &Report) -> anyhow::Result<String> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    for row in &report.rows {
        wtr.serialize(row)?;
    }
    Ok(String::from_utf8(wtr.into_inner()?)?)
}
