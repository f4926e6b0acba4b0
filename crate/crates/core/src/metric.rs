//! Finite metric spaces: construction from graphs and embeddings, axiom
//! validation for every metric class used in the crate, and aspect ratio.

use crate::error::{Error, Result};

/// Binary aggregation operator for generalized social cost and the
/// operator-parametric metric inequality. Both variants are commutative,
/// associative and monotone in each argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOperator {
    Sum,
    Max,
}

impl BinaryOperator {
    pub fn apply(self, x: f64, y: f64) -> f64 {
        match self {
            BinaryOperator::Sum => x + y,
            BinaryOperator::Max => x.max(y),
        }
    }

    /// Folds a sequence of nonnegative values; the empty fold is 0.
    pub fn fold(self, values: impl IntoIterator<Item = f64>) -> f64 {
        values.into_iter().fold(0.0, |acc, v| self.apply(acc, v))
    }

    pub fn is_idempotent(self) -> bool {
        matches!(self, BinaryOperator::Max)
    }
}

/// Which triangle-style inequality a distance matrix claims to satisfy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricClass {
    /// Standard triangle inequality.
    General,
    /// d(x,z) <= max{d(x,y), d(y,z)}.
    Ultra,
    /// d(x,z) <= rho * (d(x,y) + d(y,z)), rho >= 1.
    RhoApprox(f64),
    /// d(x,z) <= d(x,y) (+) d(y,z) for a commutative/associative/monotone (+).
    Operator(BinaryOperator),
}

impl MetricClass {
    /// Upper bound the class imposes on d(x,z) given d(x,y) and d(y,z).
    pub fn bound(self, a: f64, b: f64) -> f64 {
        match self {
            MetricClass::General => a + b,
            MetricClass::Ultra => a.max(b),
            MetricClass::RhoApprox(rho) => rho * (a + b),
            MetricClass::Operator(op) => op.apply(a, b),
        }
    }
}

/// A single violated constraint found by a validation pass.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// d(x,z) exceeds the class bound through intermediate y by `slack`.
    Triple { x: usize, y: usize, z: usize, lhs: f64, bound: f64, slack: f64 },
    /// Voter ranks `preferred` above `other` but sits closer to `other`.
    Order { voter: usize, preferred: usize, other: usize, slack: f64 },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ViolationReport {
    pub violations: Vec<Violation>,
}

impl ViolationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Symmetric nonnegative distance matrix over labeled points, tagged with a
/// claimed metric class. Zero distance between distinct points is permitted
/// (pseudometric closure).
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    labels: Vec<String>,
    d: Vec<Vec<f64>>,
    class_tag: MetricClass,
}

impl DistanceMatrix {
    /// Builds a matrix after validating shape, symmetry, nonnegativity and
    /// the zero diagonal. The class tag is a claim; see [`check_metric`].
    pub fn new(labels: Vec<String>, d: Vec<Vec<f64>>, class_tag: MetricClass) -> Result<Self> {
        let n = d.len();
        if labels.len() != n {
            return Err(Error::InvalidSize(format!(
                "{} labels for {} rows",
                labels.len(),
                n
            )));
        }
        for (i, row) in d.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NonSquare { rows: n, row: i, cols: row.len() });
            }
        }
        for p in 0..n {
            if d[p][p] != 0.0 {
                return Err(Error::NonzeroDiagonal { p, value: d[p][p] });
            }
            for q in 0..n {
                if d[p][q] < 0.0 {
                    return Err(Error::NegativeDistance { p, q, value: d[p][q] });
                }
                if d[p][q] != d[q][p] {
                    return Err(Error::AsymmetricInput {
                        p,
                        q,
                        forward: d[p][q],
                        backward: d[q][p],
                    });
                }
            }
        }
        Ok(DistanceMatrix { labels, d, class_tag })
    }

    /// Convenience constructor with labels "p0", "p1", ...
    pub fn from_rows(d: Vec<Vec<f64>>, class_tag: MetricClass) -> Result<Self> {
        let labels = (0..d.len()).map(|i| format!("p{i}")).collect();
        Self::new(labels, d, class_tag)
    }

    pub fn n_points(&self) -> usize {
        self.d.len()
    }

    pub fn dist(&self, p: usize, q: usize) -> f64 {
        self.d[p][q]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.d
    }

    pub fn class_tag(&self) -> MetricClass {
        self.class_tag
    }

    pub fn with_class(mut self, class_tag: MetricClass) -> Self {
        self.class_tag = class_tag;
        self
    }

    /// Indices of points inside the open ball B(center, r).
    pub fn open_ball(&self, center: usize, r: f64) -> Vec<usize> {
        (0..self.n_points()).filter(|&z| self.d[center][z] < r).collect()
    }

    /// Submetric over the given points, which keep their class tag. Point
    /// `k` of the result is point `points[k]` of `self`.
    pub fn restrict(&self, points: &[usize]) -> Result<Self> {
        for &p in points {
            if p >= self.n_points() {
                return Err(Error::UnknownPoint(p));
            }
        }
        let labels = points.iter().map(|&p| self.labels[p].clone()).collect();
        let d = points
            .iter()
            .map(|&p| points.iter().map(|&q| self.d[p][q]).collect())
            .collect();
        Self::new(labels, d, self.class_tag)
    }
}

/// Checks every ordered triple against the class inequality within `tol`.
/// The report is empty iff the matrix satisfies the class.
pub fn check_metric(d: &DistanceMatrix, cls: MetricClass, tol: f64) -> ViolationReport {
    let n = d.n_points();
    let mut report = ViolationReport::default();
    for x in 0..n {
        for z in 0..n {
            if x == z {
                continue;
            }
            for y in 0..n {
                if y == x || y == z {
                    continue;
                }
                let lhs = d.dist(x, z);
                let bound = cls.bound(d.dist(x, y), d.dist(y, z));
                if lhs > bound + tol {
                    report.violations.push(Violation::Triple {
                        x,
                        y,
                        z,
                        lhs,
                        bound,
                        slack: lhs - bound,
                    });
                }
            }
        }
    }
    report
}

/// Weighted undirected graph from which a metric is induced.
#[derive(Debug, Clone)]
pub struct GraphSpec {
    pub n_nodes: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

impl GraphSpec {
    pub fn new(n_nodes: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        for &(u, v, w) in &edges {
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            if u >= n_nodes || v >= n_nodes {
                return Err(Error::UnknownPoint(u.max(v)));
            }
            if w < 0.0 {
                return Err(Error::NegativeDistance { p: u, q: v, value: w });
            }
        }
        Ok(GraphSpec { n_nodes, edges })
    }

    fn is_connected(&self) -> bool {
        if self.n_nodes == 0 {
            return false;
        }
        let mut adj = vec![Vec::new(); self.n_nodes];
        for &(u, v, _) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut seen = vec![false; self.n_nodes];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.iter().all(|&s| s)
    }
}

/// All-pairs shortest-path distances; class tag GENERAL.
pub fn shortest_path_metric(g: &GraphSpec) -> Result<DistanceMatrix> {
    floyd_warshall(g, |a, b| a + b)
}

/// Minimax (bottleneck) path distances: the cost of a path is its maximum
/// edge weight, and d(u,v) minimizes that cost over all u-v paths. The
/// result satisfies the ultra-metric inequality, hence class tag ULTRA.
pub fn minimax_metric(g: &GraphSpec) -> Result<DistanceMatrix> {
    let d = floyd_warshall(g, |a, b| a.max(b))?;
    Ok(d.with_class(MetricClass::Ultra))
}

fn floyd_warshall(g: &GraphSpec, combine: impl Fn(f64, f64) -> f64) -> Result<DistanceMatrix> {
    if !g.is_connected() {
        return Err(Error::DisconnectedGraph);
    }
    let n = g.n_nodes;
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for p in 0..n {
        d[p][p] = 0.0;
    }
    for &(u, v, w) in &g.edges {
        if w < d[u][v] {
            d[u][v] = w;
            d[v][u] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = combine(d[i][k], d[k][j]);
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    DistanceMatrix::from_rows(d, MetricClass::General)
}

/// Norm selector for [`euclidean_metric`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PNorm {
    P(f64),
    /// Squared Euclidean distance; a 2-approximate metric.
    Squared,
}

/// Pairwise lp distances between the given vectors. `Squared` yields class
/// tag RHO_APPROX(2), everything else GENERAL.
pub fn euclidean_metric(points: &[Vec<f64>], p_norm: PNorm) -> Result<DistanceMatrix> {
    let n = points.len();
    if n == 0 {
        return Err(Error::InvalidSize("no points".into()));
    }
    let dim = points[0].len();
    for p in points {
        if p.len() != dim {
            return Err(Error::DimensionMismatch(dim, p.len()));
        }
    }
    let dist = |a: &[f64], b: &[f64]| -> f64 {
        match p_norm {
            PNorm::Squared => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum(),
            PNorm::P(p) => {
                if p.is_infinite() {
                    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
                } else {
                    a.iter()
                        .zip(b)
                        .map(|(x, y)| (x - y).abs().powf(p))
                        .sum::<f64>()
                        .powf(1.0 / p)
                }
            }
        }
    };
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = dist(&points[i], &points[j]);
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    let class = match p_norm {
        PNorm::Squared => MetricClass::RhoApprox(2.0),
        PNorm::P(_) => MetricClass::General,
    };
    DistanceMatrix::from_rows(d, class)
}

/// Ratio of the largest pairwise distance to the smallest positive pairwise
/// distance over `subset` (all points when `None`).
pub fn aspect_ratio(d: &DistanceMatrix, subset: Option<&[usize]>) -> Result<f64> {
    let points: Vec<usize> = match subset {
        Some(s) => s.to_vec(),
        None => (0..d.n_points()).collect(),
    };
    if points.len() < 2 {
        return Err(Error::InvalidSize("aspect ratio needs at least 2 points".into()));
    }
    for &p in &points {
        if p >= d.n_points() {
            return Err(Error::UnknownPoint(p));
        }
    }
    let mut max = 0.0_f64;
    let mut min_pos = f64::INFINITY;
    for (k, &p) in points.iter().enumerate() {
        for &q in &points[k + 1..] {
            let v = d.dist(p, q);
            max = max.max(v);
            if v > 0.0 {
                min_pos = min_pos.min(v);
            }
        }
    }
    if !min_pos.is_finite() {
        return Err(Error::DegenerateSubset);
    }
    Ok(max / min_pos)
}
