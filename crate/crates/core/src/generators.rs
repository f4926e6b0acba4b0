//! Instance factories: the explicit lower-bound constructions, random
//! Euclidean instances, and the closed-form distortion bounds they are
//! compared against.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::election::{derive_profile, Election};
use crate::error::{Error, Result};
use crate::metric::{euclidean_metric, DistanceMatrix, GraphSpec, MetricClass, PNorm};
use crate::rules::EliminationSequence;

const MAX_TREE_HEIGHT: usize = 4;

/// Sizing data of the layered-tree STV lower bound.
///
/// The tree has layers 0 (leaves) through `height` (root); a layer-i node
/// has `branching[i-1]` children, each leaf count divides evenly, and layer
/// i hosts `multiplicities[i]` voters per node. An extra hub point sits
/// adjacent to every leaf.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeLBSpec {
    pub height: usize,
    /// b_1..b_h with b_1 = 2 and b_{i+1} = 2(b_i + 1).
    pub branching: Vec<usize>,
    /// Leaf count: the product of the branching factors.
    pub leaves: usize,
    /// Nodes per layer, leaves first.
    pub layer_sizes: Vec<usize>,
    /// Voters per node of each layer: nu_0 = 1, nu_{i+1} = (b_i + 1) nu_i
    /// (with b_0 = 0).
    pub multiplicities: Vec<usize>,
    /// Total voters per layer; halves at every step up.
    pub layer_voters: Vec<usize>,
}

impl TreeLBSpec {
    pub fn new(height: usize) -> Result<Self> {
        if height < 1 {
            return Err(Error::InvalidSize("tree height must be at least 1".into()));
        }
        if height > MAX_TREE_HEIGHT {
            return Err(Error::HeightTooLarge(height));
        }
        let mut branching = vec![2usize];
        for _ in 1..height {
            let prev = *branching.last().unwrap();
            branching.push(2 * (prev + 1));
        }
        let leaves: usize = branching.iter().product();
        let mut layer_sizes = vec![leaves];
        for &b in &branching {
            let prev = *layer_sizes.last().unwrap();
            debug_assert_eq!(prev % b, 0);
            layer_sizes.push(prev / b);
        }
        let mut multiplicities = vec![1usize, 1];
        for i in 1..height {
            let nu = multiplicities[i] * (branching[i - 1] + 1);
            multiplicities.push(nu);
        }
        let layer_voters = layer_sizes
            .iter()
            .zip(&multiplicities)
            .map(|(&m_i, &nu_i)| m_i * nu_i)
            .collect();
        Ok(TreeLBSpec {
            height,
            branching,
            leaves,
            layer_sizes,
            multiplicities,
            layer_voters,
        })
    }

    pub fn n_tree_nodes(&self) -> usize {
        self.layer_sizes.iter().sum()
    }

    pub fn n_voters(&self) -> usize {
        self.layer_voters.iter().sum()
    }
}

/// The layered-tree instance on which STV admits a high-distortion
/// parallel-universe winner.
#[derive(Debug, Clone)]
pub struct TreeLB {
    pub spec: TreeLBSpec,
    pub election: Election,
    /// A legal elimination order leaving the root as the winner: hub
    /// candidates first, then layers 0, 1, ..., height-1.
    pub witness: EliminationSequence,
    /// Candidate index of the root, the adversarial winner w.
    pub root: usize,
    /// Candidate index of the (first) hub candidate x, the social optimum.
    pub hub: usize,
}

impl TreeLB {
    /// The metric restricted to the candidate points; its doubling constant
    /// is at least the leaf count, exhibited by the hub's unit ball.
    pub fn candidate_submetric(&self) -> DistanceMatrix {
        let emb = self.election.embedding().expect("generated with embedding");
        emb.metric
            .restrict(&emb.candidate_points)
            .expect("candidate points are valid")
    }
}

/// Layered tree with a hub adjacent to every leaf, unit edges, one candidate
/// per node plus `extra_candidates` collocated at the hub, and a voter
/// population that halves from each layer to the next. The witness
/// eliminates hub candidates first (tally 0), then the layers bottom-up;
/// every transfer feeds the parent, so tallies stay minimal and the root
/// survives.
pub fn gen_stv_tree_lb(height: usize, extra_candidates: usize) -> Result<TreeLB> {
    if extra_candidates < 1 {
        return Err(Error::InvalidSize("need at least 1 hub candidate".into()));
    }
    let spec = TreeLBSpec::new(height)?;
    let t = spec.n_tree_nodes();
    let hub_node = t; // node ids: per-layer blocks bottom-up, hub last

    let mut layer_offset = vec![0usize];
    for &m_i in &spec.layer_sizes {
        layer_offset.push(layer_offset.last().unwrap() + m_i);
    }

    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    for i in 0..height {
        let b = spec.branching[i];
        for k in 0..spec.layer_sizes[i] {
            let child = layer_offset[i] + k;
            let parent = layer_offset[i + 1] + k / b;
            edges.push((child, parent, 1.0));
        }
    }
    for leaf in 0..spec.leaves {
        edges.push((leaf, hub_node, 1.0));
    }
    let metric = unit_bfs_metric(&GraphSpec::new(t + 1, edges)?)?;

    // Tree-node candidates keep their node index; hub candidates follow.
    let mut candidate_points: Vec<usize> = (0..t).collect();
    candidate_points.extend(std::iter::repeat(hub_node).take(extra_candidates));
    let mut voter_points = Vec::with_capacity(spec.n_voters());
    for i in 0..=height {
        for k in 0..spec.layer_sizes[i] {
            for _ in 0..spec.multiplicities[i] {
                voter_points.push(layer_offset[i] + k);
            }
        }
    }
    let election = derive_profile(&metric, &voter_points, &candidate_points)?;

    let root = t - 1;
    let hub = t;
    let mut witness: EliminationSequence = (t..t + extra_candidates).collect();
    witness.extend(0..root);

    Ok(TreeLB { spec, election, witness, root, hub })
}

/// All-pairs distances of an unweighted graph via BFS from every node;
/// avoids the cubic all-pairs pass for the larger tree instances.
fn unit_bfs_metric(g: &GraphSpec) -> Result<DistanceMatrix> {
    let n = g.n_nodes;
    let mut adj = vec![Vec::new(); n];
    for &(u, v, _) in &g.edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut d = vec![vec![0.0f64; n]; n];
    let mut queue = std::collections::VecDeque::new();
    for start in 0..n {
        let mut dist = vec![usize::MAX; n];
        dist[start] = 0;
        queue.clear();
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        if dist.iter().any(|&x| x == usize::MAX) {
            return Err(Error::DisconnectedGraph);
        }
        for (v, &x) in dist.iter().enumerate() {
            d[start][v] = x as f64;
        }
    }
    DistanceMatrix::from_rows(d, MetricClass::General)
}

/// Unweighted 3-node path under the minimax distance: every pair of nodes
/// is at distance 1. Candidate a sits on the left node, b on the right;
/// half the voters share a's node and half sit in the middle supporting b.
/// Candidate b's distortion is exactly 2.
pub fn gen_ultrametric_lb(n: usize) -> Result<Election> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::OddN(n));
    }
    let g = GraphSpec::new(3, vec![(0, 1, 1.0), (1, 2, 1.0)])?;
    let metric = crate::metric::minimax_metric(&g)?;
    let half = n / 2;
    let mut voter_points = vec![0usize; half];
    voter_points.extend(vec![1usize; half]);
    let mut e = derive_profile(&metric, &voter_points, &[0, 2])?;
    // Middle voters are equidistant from both candidates; the construction
    // has them support b, overriding the index tie-break.
    for i in half..n {
        e.override_ranking(i, vec![1, 0])?;
    }
    Ok(e)
}

/// The 4-point rho-approximate matrix over {x, y, z, w} realizing the
/// rho-approximate lower bound.
pub fn rho_lb_matrix(rho: f64, eps: f64) -> DistanceMatrix {
    let labels = ["x", "y", "z", "w"].map(String::from).to_vec();
    let d = vec![
        vec![0.0, 1.0, 2.0 * rho, eps],
        vec![1.0, 0.0, 1.0, rho + rho * eps],
        vec![2.0 * rho, 1.0, 0.0, rho * rho + rho + rho * eps],
        vec![eps, rho + rho * eps, rho * rho + rho + rho * eps, 0.0],
    ];
    DistanceMatrix::new(labels, d, MetricClass::RhoApprox(rho)).expect("valid by construction")
}

/// Split profile over the 4-point rho-approximate matrix: candidate a at x,
/// b at z, `n_half` supporters of a at w and `n_half` of b at y. Candidate
/// b's distortion is (rho^2 + rho + rho*eps + 1)/(eps + 1), approaching
/// rho^2 + rho + 1 as eps -> 0.
pub fn gen_rho_lb(rho: f64, eps: f64, n_half: usize) -> Result<Election> {
    if rho < 1.0 {
        return Err(Error::RhoOutOfRange(rho));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::EpsOutOfRange(eps));
    }
    if n_half == 0 {
        return Err(Error::InvalidSize("need at least 1 voter per side".into()));
    }
    let metric = rho_lb_matrix(rho, eps);
    let mut voter_points = vec![3usize; n_half]; // supporters of a at w
    voter_points.extend(vec![1usize; n_half]); // supporters of b at y
    let mut e = derive_profile(&metric, &voter_points, &[0, 2])?;
    // Voters at y are equidistant from a and b (both at distance 1); the
    // construction has them support b.
    for i in n_half..2 * n_half {
        e.override_ranking(i, vec![1, 0])?;
    }
    Ok(e)
}

/// One-dimensional split instance under squared Euclidean distances:
/// candidates a = 0 and b = 2, `n_half` voters at -delta supporting a and
/// `n_half` at the midpoint 1 supporting b. Candidate b's distortion is
/// (delta^2 + 4*delta + 5)/(delta^2 + 1), peaking at delta = sqrt(2) - 1.
pub fn gen_sq_euclid_lb(delta: f64, n_half: usize) -> Result<Election> {
    if !(delta > 0.0) {
        return Err(Error::NonpositiveDelta(delta));
    }
    if n_half == 0 {
        return Err(Error::InvalidSize("need at least 1 voter per side".into()));
    }
    let points = vec![vec![0.0], vec![2.0], vec![-delta], vec![1.0]];
    let metric = euclidean_metric(&points, PNorm::Squared)?;
    let mut voter_points = vec![2usize; n_half];
    voter_points.extend(vec![3usize; n_half]);
    let mut e = derive_profile(&metric, &voter_points, &[0, 1])?;
    // Midpoint voters are equidistant from both candidates and support b.
    for i in n_half..2 * n_half {
        e.override_ranking(i, vec![1, 0])?;
    }
    Ok(e)
}

/// Voters and candidates drawn i.i.d. uniform on [0,1]^dim with the profile
/// derived from the induced distances. Deterministic per seed.
pub fn gen_random_euclidean(
    n: usize,
    m: usize,
    dim: usize,
    p_norm: PNorm,
    seed: u64,
) -> Result<Election> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidSize("need at least 1 voter and 1 candidate".into()));
    }
    if dim == 0 {
        return Err(Error::InvalidSize("dimension must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec<f64>> = (0..n + m)
        .map(|_| (0..dim).map(|_| rng.gen::<f64>()).collect())
        .collect();
    let metric = euclidean_metric(&points, p_norm)?;
    let voters: Vec<usize> = (0..n).collect();
    let candidates: Vec<usize> = (n..n + m).collect();
    derive_profile(&metric, &voters, &candidates)
}

/// Random connected graph with integer edge weights; the profile is derived
/// from the shortest-path metric with the first `n` nodes as voters and the
/// next `m` as candidates. Deterministic per seed.
pub fn gen_random_graph(n: usize, m: usize, seed: u64) -> Result<Election> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidSize("need at least 1 voter and 1 candidate".into()));
    }
    let total = n + m;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Random spanning tree first for connectivity, then extra chords.
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    for v in 1..total {
        let u = rng.gen_range(0..v);
        edges.push((u, v, rng.gen_range(1..=4) as f64));
    }
    for _ in 0..total {
        let u = rng.gen_range(0..total);
        let v = rng.gen_range(0..total);
        if u != v {
            edges.push((u.min(v), u.max(v), rng.gen_range(1..=4) as f64));
        }
    }
    let metric = crate::metric::shortest_path_metric(&GraphSpec::new(total, edges)?)?;
    let voters: Vec<usize> = (0..n).collect();
    let candidates: Vec<usize> = (n..total).collect();
    derive_profile(&metric, &voters, &candidates)
}

/// Closed-form distortion bounds, one per analyzed rule/setting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundTheorem {
    /// STV on the real line.
    Line,
    /// STV on general metrics with m candidates.
    General { m: usize },
    /// STV on doubling metrics with constant lambda and m candidates.
    Doubling { lambda: f64, m: usize },
    /// Coordination dynamics winner.
    Coordination,
    /// PluralityMatching on metrics / ultra-metrics / rho-approximate
    /// metrics.
    PmMetric,
    PmUltra,
    PmRho { rho: f64 },
}

impl BoundTheorem {
    /// Parses CLI-style ids: `line`, `general:m`, `doubling:lambda:m`,
    /// `coordination`, `pm_metric`, `pm_ultra`, `pm_rho:rho`.
    pub fn parse(id: &str) -> Result<Self> {
        let parts: Vec<&str> = id.split(':').collect();
        let unknown = || Error::UnknownTheorem(id.to_string());
        match parts.as_slice() {
            ["line"] => Ok(BoundTheorem::Line),
            ["general", m] => Ok(BoundTheorem::General { m: m.parse().map_err(|_| unknown())? }),
            ["doubling", lambda, m] => Ok(BoundTheorem::Doubling {
                lambda: lambda.parse().map_err(|_| unknown())?,
                m: m.parse().map_err(|_| unknown())?,
            }),
            ["coordination"] => Ok(BoundTheorem::Coordination),
            ["pm_metric"] => Ok(BoundTheorem::PmMetric),
            ["pm_ultra"] => Ok(BoundTheorem::PmUltra),
            ["pm_rho", rho] => Ok(BoundTheorem::PmRho { rho: rho.parse().map_err(|_| unknown())? }),
            _ => Err(unknown()),
        }
    }
}

/// The m-th harmonic number.
pub fn harmonic(m: usize) -> f64 {
    (1..=m).map(|k| 1.0 / k as f64).sum()
}

/// Evaluates a closed-form distortion bound.
pub fn bound_value(theorem: BoundTheorem) -> Result<f64> {
    match theorem {
        BoundTheorem::Line => Ok(15.0),
        BoundTheorem::General { m } => {
            if m < 1 {
                return Err(Error::InvalidSize("m must be at least 1".into()));
            }
            Ok(8.0 * harmonic(m) + 5.0)
        }
        BoundTheorem::Doubling { lambda, m } => {
            if m < 1 || lambda < 1.0 {
                return Err(Error::InvalidSize(
                    "doubling bound needs m >= 1 and lambda >= 1".into(),
                ));
            }
            let hm = harmonic(m);
            let h = 1.0 + (6.0 * lambda.powf(hm.log2() + 1.0)).log2().ceil();
            Ok(1.0 + 3.0 * (4.0 * h + 7.0))
        }
        BoundTheorem::Coordination => Ok(11.0),
        BoundTheorem::PmMetric => Ok(3.0),
        BoundTheorem::PmUltra => Ok(2.0),
        BoundTheorem::PmRho { rho } => {
            if rho < 1.0 {
                return Err(Error::RhoOutOfRange(rho));
            }
            Ok(2.0 * rho * rho + rho)
        }
    }
}
