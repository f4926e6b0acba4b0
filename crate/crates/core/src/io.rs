//! JSON file formats for metrics and elections.
//!
//! Metric files carry either an explicit distance matrix
//! `{ "labels": [...], "class": "general|ultra|rho:<r>", "d": [[...]] }`
//! or a graph to induce one from
//! `{ "graph": { "n": ..., "edges": [[u, v, w], ...] }, "mode":
//! "shortest_path|minimax" }`. Election files carry
//! `{ "n", "m", "profile", "embedding"? }` with the embedding's metric
//! inlined.

use serde::{Deserialize, Serialize};

use crate::election::{Election, Embedding};
use crate::error::{Error, Result};
use crate::metric::{DistanceMatrix, GraphSpec, MetricClass};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

/// On-disk metric: an explicit matrix or a graph plus induction mode.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricFile {
    Matrix {
        labels: Vec<String>,
        class: String,
        d: Vec<Vec<f64>>,
    },
    Graph {
        graph: GraphFile,
        mode: String,
    },
}

fn class_to_string(class: MetricClass) -> String {
    match class {
        MetricClass::General | MetricClass::Operator(crate::metric::BinaryOperator::Sum) => {
            "general".to_string()
        }
        MetricClass::Ultra | MetricClass::Operator(crate::metric::BinaryOperator::Max) => {
            "ultra".to_string()
        }
        MetricClass::RhoApprox(rho) => format!("rho:{rho}"),
    }
}

fn parse_class(s: &str) -> Result<MetricClass> {
    if s == "general" {
        return Ok(MetricClass::General);
    }
    if s == "ultra" {
        return Ok(MetricClass::Ultra);
    }
    if let Some(rho) = s.strip_prefix("rho:") {
        let rho: f64 = rho
            .parse()
            .map_err(|_| Error::InvalidFile(format!("bad rho in class {s:?}")))?;
        if rho < 1.0 {
            return Err(Error::RhoOutOfRange(rho));
        }
        return Ok(MetricClass::RhoApprox(rho));
    }
    Err(Error::InvalidFile(format!("unknown metric class {s:?}")))
}

impl MetricFile {
    pub fn from_metric(d: &DistanceMatrix) -> Self {
        MetricFile::Matrix {
            labels: d.labels().to_vec(),
            class: class_to_string(d.class_tag()),
            d: d.rows().to_vec(),
        }
    }

    pub fn to_metric(&self) -> Result<DistanceMatrix> {
        match self {
            MetricFile::Matrix { labels, class, d } => {
                DistanceMatrix::new(labels.clone(), d.clone(), parse_class(class)?)
            }
            MetricFile::Graph { graph, mode } => {
                let g = GraphSpec::new(graph.n, graph.edges.clone())?;
                match mode.as_str() {
                    "shortest_path" => crate::metric::shortest_path_metric(&g),
                    "minimax" => crate::metric::minimax_metric(&g),
                    other => Err(Error::InvalidFile(format!("unknown graph mode {other:?}"))),
                }
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbeddingFile {
    pub metric: MetricFile,
    pub voter_points: Vec<usize>,
    pub candidate_points: Vec<usize>,
}

/// On-disk election.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ElectionFile {
    pub n: usize,
    pub m: usize,
    pub profile: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding: Option<EmbeddingFile>,
}

impl ElectionFile {
    pub fn from_election(e: &Election) -> Self {
        ElectionFile {
            n: e.n_voters(),
            m: e.m_candidates(),
            profile: e.profile().to_vec(),
            embedding: e.embedding().map(|emb| EmbeddingFile {
                metric: MetricFile::from_metric(&emb.metric),
                voter_points: emb.voter_points.clone(),
                candidate_points: emb.candidate_points.clone(),
            }),
        }
    }

    pub fn to_election(&self) -> Result<Election> {
        if self.profile.len() != self.n {
            return Err(Error::InvalidFile(format!(
                "profile has {} rankings but n = {}",
                self.profile.len(),
                self.n
            )));
        }
        let mut e = Election::new(self.m, self.profile.clone())?;
        if let Some(emb) = &self.embedding {
            let metric = emb.metric.to_metric()?;
            if emb.voter_points.len() != self.n || emb.candidate_points.len() != self.m {
                return Err(Error::InvalidFile(
                    "embedding point counts do not match n/m".into(),
                ));
            }
            for &p in emb.voter_points.iter().chain(&emb.candidate_points) {
                if p >= metric.n_points() {
                    return Err(Error::UnknownPoint(p));
                }
            }
            e.set_embedding(Embedding {
                metric,
                voter_points: emb.voter_points.clone(),
                candidate_points: emb.candidate_points.clone(),
            });
        }
        Ok(e)
    }
}

pub fn election_to_json(e: &Election) -> String {
    serde_json::to_string_pretty(&ElectionFile::from_election(e)).expect("serializable")
}

pub fn election_from_json(text: &str) -> Result<Election> {
    let file: ElectionFile =
        serde_json::from_str(text).map_err(|err| Error::InvalidFile(err.to_string()))?;
    file.to_election()
}

pub fn metric_to_json(d: &DistanceMatrix) -> String {
    serde_json::to_string_pretty(&MetricFile::from_metric(d)).expect("serializable")
}

pub fn metric_from_json(text: &str) -> Result<DistanceMatrix> {
    let file: MetricFile =
        serde_json::from_str(text).map_err(|err| Error::InvalidFile(err.to_string()))?;
    file.to_metric()
}
