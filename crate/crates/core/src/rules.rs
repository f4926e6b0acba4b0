//! Voting rules: score-based baselines, STV under the parallel-universe
//! model, and PluralityMatching via the integral domination graph.

use std::collections::HashMap;

use crate::dynamics::{Phase, Round, RoundLog};
use crate::election::Election;
use crate::error::{Error, Result};

/// Ordered list of the m-1 candidates eliminated before the winner.
pub type EliminationSequence = Vec<usize>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreRule {
    Plurality,
    Borda,
    Veto,
    /// Voters approve their top `threshold` candidates; `None` means the
    /// default ceil(m/2).
    Approval(Option<usize>),
    /// Score is the number of voters ranking the candidate in their top k.
    KTop(usize),
    /// Pairwise-majority wins, ties in a pairwise contest award 1/2 each.
    Copeland,
}

/// Outcome of a rule. For parallel-universe STV each winner carries a
/// witness elimination sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct WinnerSet {
    pub winners: Vec<usize>,
    pub witnesses: Vec<Option<EliminationSequence>>,
}

impl WinnerSet {
    fn from_winners(winners: Vec<usize>) -> Self {
        let witnesses = vec![None; winners.len()];
        WinnerSet { winners, witnesses }
    }

    pub fn contains(&self, a: usize) -> bool {
        self.winners.contains(&a)
    }

    /// Lowest-index winner.
    pub fn first(&self) -> usize {
        self.winners[0]
    }
}

/// All candidates attaining the rule's maximal score.
pub fn score_winners(e: &Election, rule: ScoreRule) -> WinnerSet {
    let m = e.m_candidates();
    let n = e.n_voters();
    let mut scores = vec![0.0f64; m];
    match rule {
        ScoreRule::Plurality => {
            for i in 0..n {
                scores[e.top(i)] += 1.0;
            }
        }
        ScoreRule::Borda => {
            for i in 0..n {
                for a in 0..m {
                    scores[a] += (m - 1 - e.rank(i, a)) as f64;
                }
            }
        }
        ScoreRule::Veto => {
            for i in 0..n {
                let last = *e.ranking(i).last().unwrap();
                scores[last] -= 1.0;
            }
        }
        ScoreRule::Approval(threshold) => {
            let t = threshold.unwrap_or(m.div_ceil(2)).min(m);
            for i in 0..n {
                for &a in &e.ranking(i)[..t] {
                    scores[a] += 1.0;
                }
            }
        }
        ScoreRule::KTop(k) => {
            let k = k.clamp(1, m);
            for i in 0..n {
                for &a in &e.ranking(i)[..k] {
                    scores[a] += 1.0;
                }
            }
        }
        ScoreRule::Copeland => {
            for a in 0..m {
                for b in (a + 1)..m {
                    let pro = (0..n).filter(|&i| e.prefers(i, a, b)).count();
                    let con = n - pro;
                    if pro > con {
                        scores[a] += 1.0;
                    } else if con > pro {
                        scores[b] += 1.0;
                    } else {
                        scores[a] += 0.5;
                        scores[b] += 0.5;
                    }
                }
            }
        }
    }
    let best = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let winners = (0..m).filter(|&a| scores[a] == best).collect();
    WinnerSet::from_winners(winners)
}

/// Plurality tallies over the active candidate set: each voter supports its
/// most preferred active candidate.
pub fn plurality_tallies(e: &Election, active: &[bool]) -> Vec<usize> {
    let m = e.m_candidates();
    let mut tallies = vec![0usize; m];
    for i in 0..e.n_voters() {
        let top = e
            .ranking(i)
            .iter()
            .copied()
            .find(|&a| active[a])
            .expect("active set is nonempty");
        tallies[top] += 1;
    }
    tallies
}

fn min_active_tally(tallies: &[usize], active: &[bool]) -> usize {
    (0..tallies.len())
        .filter(|&a| active[a])
        .map(|a| tallies[a])
        .min()
        .expect("active set is nonempty")
}

fn mask_to_bools(m: usize, mask: u32) -> Vec<bool> {
    (0..m).map(|a| mask & (1 << a) != 0).collect()
}

/// Exact parallel-universe STV winner set with a witness elimination
/// sequence per winner. A candidate wins iff it survives under some legal
/// sequence of minimal-tally eliminations. Memoized over active subsets.
pub fn stv_winners(e: &Election) -> Result<WinnerSet> {
    let m = e.m_candidates();
    if m > 20 {
        return Err(Error::TooManyCandidates(m));
    }
    let full: u32 = (1 << m) - 1;
    let mut memo: HashMap<u32, u32> = HashMap::new();
    let winner_mask = winners_rec(e, full, &mut memo);
    let winners: Vec<usize> = (0..m).filter(|&a| winner_mask & (1 << a) != 0).collect();
    let witnesses = winners
        .iter()
        .map(|&w| Some(extract_witness(e, full, w, &memo)))
        .collect();
    Ok(WinnerSet { winners, witnesses })
}

fn winners_rec(e: &Election, active: u32, memo: &mut HashMap<u32, u32>) -> u32 {
    if active.count_ones() == 1 {
        return active;
    }
    if let Some(&w) = memo.get(&active) {
        return w;
    }
    let flags = mask_to_bools(e.m_candidates(), active);
    let tallies = plurality_tallies(e, &flags);
    let min = min_active_tally(&tallies, &flags);
    let mut winner_mask = 0u32;
    for a in 0..e.m_candidates() {
        if active & (1 << a) != 0 && tallies[a] == min {
            winner_mask |= winners_rec(e, active & !(1 << a), memo);
        }
    }
    memo.insert(active, winner_mask);
    winner_mask
}

/// Walks the memo table to recover one legal elimination order ending at
/// `winner`.
fn extract_witness(e: &Election, full: u32, winner: usize, memo: &HashMap<u32, u32>) -> Vec<usize> {
    let mut active = full;
    let mut seq = Vec::new();
    while active != 1 << winner {
        let flags = mask_to_bools(e.m_candidates(), active);
        let tallies = plurality_tallies(e, &flags);
        let min = min_active_tally(&tallies, &flags);
        let step = (0..e.m_candidates())
            .find(|&a| {
                if a == winner || active & (1 << a) == 0 || tallies[a] != min {
                    return false;
                }
                let next = active & !(1 << a);
                let reach = if next == 1 << winner {
                    next
                } else {
                    *memo.get(&next).expect("memoized during the forward pass")
                };
                reach & (1 << winner) != 0
            })
            .expect("winner is reachable by construction");
        seq.push(step);
        active &= !(1 << step);
    }
    seq
}

/// Deterministic single STV run. Each round eliminates one minimal-tally
/// candidate; among tied candidates the one earliest in `tie_break` goes
/// first.
pub fn stv_trace(
    e: &Election,
    tie_break: &[usize],
) -> Result<(usize, EliminationSequence, RoundLog)> {
    let m = e.m_candidates();
    let priority = rank_in_priority(m, tie_break)?;
    let mut active = vec![true; m];
    let mut n_active = m;
    let mut seq = Vec::new();
    let mut log = RoundLog::default();
    while n_active > 1 {
        let tallies = plurality_tallies(e, &active);
        let min = min_active_tally(&tallies, &active);
        let eliminated = (0..m)
            .filter(|&a| active[a] && tallies[a] == min)
            .min_by_key(|&a| priority[a])
            .unwrap();
        log.rounds.push(Round {
            phase: Phase::Stv,
            tallies: tallies.clone(),
            votes: votes_over(e, &active),
            eliminated: Some(eliminated),
        });
        seq.push(eliminated);
        active[eliminated] = false;
        n_active -= 1;
    }
    let winner = (0..m).find(|&a| active[a]).unwrap();
    Ok((winner, seq, log))
}

fn votes_over(e: &Election, active: &[bool]) -> Vec<usize> {
    (0..e.n_voters())
        .map(|i| e.ranking(i).iter().copied().find(|&a| active[a]).unwrap())
        .collect()
}

fn rank_in_priority(m: usize, tie_break: &[usize]) -> Result<Vec<usize>> {
    let mut priority = vec![usize::MAX; m];
    for (pos, &a) in tie_break.iter().enumerate() {
        if a >= m || priority[a] != usize::MAX {
            return Err(Error::MalformedSequence(format!(
                "bad tie-break entry {a}"
            )));
        }
        priority[a] = pos;
    }
    if priority.iter().any(|&p| p == usize::MAX) {
        return Err(Error::MalformedSequence(
            "tie-break must cover every candidate".into(),
        ));
    }
    Ok(priority)
}

/// True iff at every round the eliminated candidate's tally over the active
/// set is minimal. Replays in O(m*n), so witnesses can be checked at sizes
/// where subset enumeration is infeasible.
pub fn validate_elimination_sequence(e: &Election, seq: &[usize]) -> Result<bool> {
    let m = e.m_candidates();
    if seq.len() != m - 1 {
        return Err(Error::MalformedSequence(format!(
            "sequence of length {} for {} candidates",
            seq.len(),
            m
        )));
    }
    let mut seen = vec![false; m];
    for &c in seq {
        if c >= m || seen[c] {
            return Err(Error::MalformedSequence(format!("bad entry {c}")));
        }
        seen[c] = true;
    }
    let mut active = vec![true; m];
    for &c in seq {
        let tallies = plurality_tallies(e, &active);
        if tallies[c] != min_active_tally(&tallies, &active) {
            return Ok(false);
        }
        active[c] = false;
    }
    Ok(true)
}

/// Bipartite graph on (V, V) for candidate `owner`: edge (i, j) iff the
/// owner is weakly preferred by voter i to voter j's top choice.
#[derive(Debug, Clone)]
pub struct DominationGraph {
    pub owner: usize,
    /// adjacency[i] lists the right-side voters j with (i, j) in E.
    pub adjacency: Vec<Vec<usize>>,
}

pub fn integral_domination_graph(e: &Election, owner: usize) -> DominationGraph {
    let n = e.n_voters();
    let adjacency = (0..n)
        .map(|i| (0..n).filter(|&j| e.prefers(i, owner, e.top(j))).collect())
        .collect();
    DominationGraph { owner, adjacency }
}

/// Maximum bipartite matching via augmenting paths (Kuhn's algorithm).
/// Returns `matched_right[j] = Some(i)` assignments.
fn max_matching(adjacency: &[Vec<usize>], n_right: usize) -> Vec<Option<usize>> {
    let mut matched_right: Vec<Option<usize>> = vec![None; n_right];

    fn try_augment(
        i: usize,
        adjacency: &[Vec<usize>],
        visited: &mut [bool],
        matched_right: &mut [Option<usize>],
    ) -> bool {
        for &j in &adjacency[i] {
            if !visited[j] {
                visited[j] = true;
                if matched_right[j].is_none()
                    || try_augment(matched_right[j].unwrap(), adjacency, visited, matched_right)
                {
                    matched_right[j] = Some(i);
                    return true;
                }
            }
        }
        false
    }

    for i in 0..adjacency.len() {
        let mut visited = vec![false; n_right];
        try_augment(i, adjacency, &mut visited, &mut matched_right);
    }
    matched_right
}

/// The lowest-index candidate whose integral domination graph admits a
/// perfect matching, plus the matching (`matching[i] = j`). Existence is
/// guaranteed for every profile, so total failure signals a bug.
pub fn plurality_matching_winner(e: &Election) -> Result<(usize, Vec<usize>)> {
    let n = e.n_voters();
    for a in 0..e.m_candidates() {
        let graph = integral_domination_graph(e, a);
        let matched_right = max_matching(&graph.adjacency, n);
        if matched_right.iter().all(|m| m.is_some()) {
            let mut matching = vec![0usize; n];
            for (j, &i) in matched_right.iter().enumerate() {
                matching[i.unwrap()] = j;
            }
            return Ok((a, matching));
        }
    }
    Err(Error::InternalInvariantBroken)
}
