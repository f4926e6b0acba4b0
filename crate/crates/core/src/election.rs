//! Elections: ranking profiles, optional metric embeddings, social cost
//! (standard and operator-generalized), realized distortion, and the
//! wave-lemma bound used by the iterative-rule analyses.

use crate::error::{Error, Result};
use crate::metric::{BinaryOperator, DistanceMatrix, Violation, ViolationReport};

/// Assignment of voters and candidates to points of a distance matrix.
#[derive(Debug, Clone)]
pub struct Embedding {
    pub metric: DistanceMatrix,
    pub voter_points: Vec<usize>,
    pub candidate_points: Vec<usize>,
}

impl Embedding {
    /// Distance from voter `i` to candidate `a`.
    pub fn dist(&self, i: usize, a: usize) -> f64 {
        self.metric.dist(self.voter_points[i], self.candidate_points[a])
    }

    pub fn candidate_dist(&self, a: usize, b: usize) -> f64 {
        self.metric.dist(self.candidate_points[a], self.candidate_points[b])
    }
}

/// An election: n voters, m candidates, a full strict ranking per voter,
/// and an optional embedding the profile was derived from.
#[derive(Debug, Clone)]
pub struct Election {
    n_voters: usize,
    m_candidates: usize,
    profile: Vec<Vec<usize>>,
    /// rank_of[i][a] = position of candidate a in voter i's ranking.
    rank_of: Vec<Vec<usize>>,
    embedding: Option<Embedding>,
}

impl Election {
    pub fn new(m_candidates: usize, profile: Vec<Vec<usize>>) -> Result<Self> {
        if m_candidates == 0 || profile.is_empty() {
            return Err(Error::InvalidSize("need at least 1 voter and 1 candidate".into()));
        }
        let rank_of = profile
            .iter()
            .map(|ranking| rank_positions(m_candidates, ranking))
            .collect::<Result<Vec<_>>>()?;
        Ok(Election {
            n_voters: profile.len(),
            m_candidates,
            profile,
            rank_of,
            embedding: None,
        })
    }

    pub fn n_voters(&self) -> usize {
        self.n_voters
    }

    pub fn m_candidates(&self) -> usize {
        self.m_candidates
    }

    pub fn ranking(&self, voter: usize) -> &[usize] {
        &self.profile[voter]
    }

    pub fn profile(&self) -> &[Vec<usize>] {
        &self.profile
    }

    /// Voter `i`'s most preferred candidate.
    pub fn top(&self, i: usize) -> usize {
        self.profile[i][0]
    }

    /// True iff voter `i` ranks `a` at or above `b` (weak preference;
    /// reflexive by construction since rankings are strict).
    pub fn prefers(&self, i: usize, a: usize, b: usize) -> bool {
        self.rank_of[i][a] <= self.rank_of[i][b]
    }

    pub fn rank(&self, i: usize, a: usize) -> usize {
        self.rank_of[i][a]
    }

    pub fn embedding(&self) -> Option<&Embedding> {
        self.embedding.as_ref()
    }

    pub fn set_embedding(&mut self, embedding: Embedding) {
        self.embedding = Some(embedding);
    }

    fn require_embedding(&self) -> Result<&Embedding> {
        self.embedding.as_ref().ok_or(Error::NoEmbedding)
    }

    /// Replaces one voter's ranking. Used to realize constructions whose
    /// stated preferences break distance ties differently than the default
    /// index rule; the result should still pass [`check_consistency`].
    pub fn override_ranking(&mut self, voter: usize, ranking: Vec<usize>) -> Result<()> {
        if voter >= self.n_voters {
            return Err(Error::UnknownPoint(voter));
        }
        self.rank_of[voter] = rank_positions(self.m_candidates, &ranking)?;
        self.profile[voter] = ranking;
        Ok(())
    }
}

fn rank_positions(m: usize, ranking: &[usize]) -> Result<Vec<usize>> {
    if ranking.len() != m {
        return Err(Error::InvalidRanking(format!(
            "ranking has {} entries for {} candidates",
            ranking.len(),
            m
        )));
    }
    let mut rank_of = vec![usize::MAX; m];
    for (pos, &c) in ranking.iter().enumerate() {
        if c >= m {
            return Err(Error::InvalidRanking(format!("unknown candidate {c}")));
        }
        if rank_of[c] != usize::MAX {
            return Err(Error::InvalidRanking(format!("duplicate candidate {c}")));
        }
        rank_of[c] = pos;
    }
    Ok(rank_of)
}

/// Builds an election from point assignments: each voter ranks candidates by
/// ascending distance, ties broken by ascending candidate index.
pub fn derive_profile(
    metric: &DistanceMatrix,
    voter_points: &[usize],
    candidate_points: &[usize],
) -> Result<Election> {
    for &p in voter_points.iter().chain(candidate_points) {
        if p >= metric.n_points() {
            return Err(Error::UnknownPoint(p));
        }
    }
    if voter_points.is_empty() || candidate_points.is_empty() {
        return Err(Error::InvalidSize("need at least 1 voter and 1 candidate".into()));
    }
    let m = candidate_points.len();
    let profile = voter_points
        .iter()
        .map(|&vp| {
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&a, &b| {
                metric
                    .dist(vp, candidate_points[a])
                    .partial_cmp(&metric.dist(vp, candidate_points[b]))
                    .unwrap()
                    .then(a.cmp(&b))
            });
            order
        })
        .collect();
    let mut e = Election::new(m, profile)?;
    e.set_embedding(Embedding {
        metric: metric.clone(),
        voter_points: voter_points.to_vec(),
        candidate_points: candidate_points.to_vec(),
    });
    Ok(e)
}

/// Empty iff each voter's distances are weakly increasing along its ranking.
pub fn check_consistency(e: &Election, tol: f64) -> Result<ViolationReport> {
    let emb = e.require_embedding()?;
    let mut report = ViolationReport::default();
    for i in 0..e.n_voters() {
        for pair in e.ranking(i).windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let (da, db) = (emb.dist(i, a), emb.dist(i, b));
            if da > db + tol {
                report.violations.push(Violation::Order {
                    voter: i,
                    preferred: a,
                    other: b,
                    slack: da - db,
                });
            }
        }
    }
    Ok(report)
}

/// Fold of voter-candidate distances under `op`; `Sum` is the standard
/// social cost.
pub fn social_cost(e: &Election, a: usize, op: BinaryOperator) -> Result<f64> {
    let emb = e.require_embedding()?;
    Ok(op.fold((0..e.n_voters()).map(|i| emb.dist(i, a))))
}

/// The candidate minimizing social cost under `op`, lowest index on ties.
pub fn optimum_candidate(e: &Election, op: BinaryOperator) -> Result<usize> {
    let mut best = 0;
    let mut best_cost = social_cost(e, 0, op)?;
    for a in 1..e.m_candidates() {
        let cost = social_cost(e, a, op)?;
        if cost < best_cost {
            best = a;
            best_cost = cost;
        }
    }
    Ok(best)
}

/// SC(a) / min_x SC(x) at the known embedding. Returns 1 when `a` attains
/// the minimum and +inf when the minimum is 0 but SC(a) is not.
pub fn realized_distortion(e: &Election, a: usize, op: BinaryOperator) -> Result<f64> {
    let cost_a = social_cost(e, a, op)?;
    let opt = optimum_candidate(e, op)?;
    let min_cost = social_cost(e, opt, op)?;
    if min_cost == 0.0 {
        Ok(if cost_a == 0.0 { 1.0 } else { f64::INFINITY })
    } else {
        Ok(cost_a / min_cost)
    }
}

/// The wave-lemma bound 1 + h / (1 - gamma).
pub fn wave_bound(h: f64, gamma: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::GammaOutOfRange(gamma));
    }
    if h <= 0.0 {
        return Err(Error::InvalidSize(format!("h = {h} must be positive")));
    }
    Ok(1.0 + h / (1.0 - gamma))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavePremise {
    /// Fraction of voters in the open ball B(a, dist(a,b)/h).
    pub gamma: f64,
    /// 1 + h/(1-gamma); +inf when gamma = 1.
    pub bound: f64,
    /// SC(b)/SC(a) at the embedding.
    pub ratio: f64,
    pub holds: bool,
}

/// Evaluates the wave lemma premise and conclusion for a candidate pair at
/// the known embedding.
pub fn check_wave_premise(e: &Election, a: usize, b: usize, h: f64) -> Result<WavePremise> {
    let emb = e.require_embedding()?;
    let dist_ab = emb.candidate_dist(a, b);
    if a == b || dist_ab == 0.0 {
        return Err(Error::CoincidentCandidates(a, b));
    }
    let r = dist_ab / h;
    let inside = (0..e.n_voters()).filter(|&i| emb.dist(i, a) < r).count();
    let gamma = inside as f64 / e.n_voters() as f64;
    let bound = if gamma >= 1.0 { f64::INFINITY } else { wave_bound(h, gamma)? };
    let sc_a = social_cost(e, a, BinaryOperator::Sum)?;
    let sc_b = social_cost(e, b, BinaryOperator::Sum)?;
    let ratio = if sc_a == 0.0 { f64::INFINITY } else { sc_b / sc_a };
    Ok(WavePremise { gamma, bound, ratio, holds: ratio <= bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{euclidean_metric, minimax_metric, GraphSpec, PNorm};

    fn line_metric(points: &[f64]) -> DistanceMatrix {
        euclidean_metric(
            &points.iter().map(|&x| vec![x]).collect::<Vec<_>>(),
            PNorm::P(2.0),
        )
        .unwrap()
    }

    /// Path graph a - mid - b under minimax distances, one voter at a's node
    /// and one at the middle node preferring b.
    fn ultrametric_pair() -> Election {
        let g = GraphSpec::new(3, vec![(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let d = minimax_metric(&g).unwrap();
        let mut e = derive_profile(&d, &[0, 1], &[0, 2]).unwrap();
        // The middle voter is equidistant from both candidates; the stated
        // support is for b, so override the index tie-break.
        e.override_ranking(1, vec![1, 0]).unwrap();
        e
    }

    #[test]
    fn derive_profile_orders_by_distance() {
        let d = line_metric(&[0.0, 1.0, 2.0]);
        let e = derive_profile(&d, &[0], &[1, 2]).unwrap();
        assert_eq!(e.ranking(0), &[0, 1]);
    }

    #[test]
    fn derive_profile_breaks_ties_by_index() {
        let d = line_metric(&[0.0, -1.0, 1.0]);
        let e = derive_profile(&d, &[0], &[1, 2]).unwrap();
        assert_eq!(e.ranking(0), &[0, 1]);
    }

    #[test]
    fn derived_profiles_are_consistent() {
        let d = line_metric(&[0.3, 0.9, 0.1, 0.5]);
        let e = derive_profile(&d, &[0, 1], &[2, 3]).unwrap();
        assert!(check_consistency(&e, 1e-9).unwrap().is_clean());
    }

    #[test]
    fn swapped_ranks_violate_consistency() {
        let d = line_metric(&[0.0, 1.0, 2.0]);
        let mut e = derive_profile(&d, &[0], &[1, 2]).unwrap();
        e.override_ranking(0, vec![1, 0]).unwrap();
        let report = check_consistency(&e, 1e-9).unwrap();
        assert_eq!(report.violations.len(), 1);
    }

    #[test]
    fn coincident_points_are_always_consistent() {
        let d = line_metric(&[0.5, 0.5, 0.5]);
        let mut e = derive_profile(&d, &[0], &[1, 2]).unwrap();
        e.override_ranking(0, vec![1, 0]).unwrap();
        assert!(check_consistency(&e, 1e-9).unwrap().is_clean());
    }

    #[test]
    fn ultrametric_pair_costs() {
        let e = ultrametric_pair();
        assert_eq!(social_cost(&e, 0, BinaryOperator::Sum).unwrap(), 1.0);
        assert_eq!(social_cost(&e, 1, BinaryOperator::Sum).unwrap(), 2.0);
        assert_eq!(social_cost(&e, 0, BinaryOperator::Max).unwrap(), 1.0);
        assert_eq!(realized_distortion(&e, 1, BinaryOperator::Sum).unwrap(), 2.0);
        assert_eq!(realized_distortion(&e, 0, BinaryOperator::Sum).unwrap(), 1.0);
    }

    #[test]
    fn zero_cost_for_collocated_single_voter() {
        let d = line_metric(&[0.0, 0.0, 1.0]);
        let e = derive_profile(&d, &[0], &[1, 2]).unwrap();
        assert_eq!(social_cost(&e, 0, BinaryOperator::Sum).unwrap(), 0.0);
        assert_eq!(
            realized_distortion(&e, 1, BinaryOperator::Sum).unwrap(),
            f64::INFINITY
        );
    }

    #[test]
    fn wave_bound_values() {
        assert_eq!(wave_bound(7.0, 0.5).unwrap(), 15.0);
        assert_eq!(wave_bound(3.0, 0.0).unwrap(), 4.0);
        // 4*H_1 + 2 = 6 at gamma = 1/2.
        assert_eq!(wave_bound(6.0, 0.5).unwrap(), 13.0);
        assert!(wave_bound(1.0, 1.0).is_err());
    }

    #[test]
    fn wave_premise_saturates_at_gamma_one() {
        let d = line_metric(&[0.0, 0.0, 5.0]);
        let e = derive_profile(&d, &[0, 1], &[0, 2]).unwrap();
        let w = check_wave_premise(&e, 0, 1, 1.0).unwrap();
        assert_eq!(w.gamma, 1.0);
        assert_eq!(w.bound, f64::INFINITY);
        assert!(w.holds);
    }

    #[test]
    fn wave_premise_on_ultrametric_pair() {
        let e = ultrametric_pair();
        let w = check_wave_premise(&e, 0, 1, 1.0).unwrap();
        assert!(w.holds, "{w:?}");
    }

    #[test]
    fn wave_premise_rejects_coincident_candidates() {
        let d = line_metric(&[0.0, 1.0, 1.0]);
        let e = derive_profile(&d, &[0], &[1, 2]).unwrap();
        assert!(matches!(
            check_wave_premise(&e, 0, 1, 2.0),
            Err(Error::CoincidentCandidates(0, 1))
        ));
    }

    #[test]
    fn distortion_is_at_least_one_for_sum() {
        let d = line_metric(&[0.1, 0.4, 0.8, 0.2, 0.9]);
        let e = derive_profile(&d, &[0, 1, 2], &[3, 4]).unwrap();
        for a in 0..2 {
            assert!(realized_distortion(&e, a, BinaryOperator::Sum).unwrap() >= 1.0);
        }
    }
}
