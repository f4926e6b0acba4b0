//! Round-based plurality voting with public tallies: greedy temperature
//! dynamics, exploration/exploitation coordination dynamics, and
//! coalition/core diagnostics.

use crate::election::Election;
use crate::error::{Error, Result};
use crate::rules::plurality_tallies;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Greedy,
    Exploration,
    Exploitation,
    Stv,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Greedy => "greedy",
            Phase::Exploration => "exploration",
            Phase::Exploitation => "exploitation",
            Phase::Stv => "stv",
        }
    }
}

/// One round of an iterative process: per-candidate tallies and per-agent
/// votes. Tallies always sum to n.
#[derive(Debug, Clone)]
pub struct Round {
    pub phase: Phase,
    pub tallies: Vec<usize>,
    pub votes: Vec<usize>,
    pub eliminated: Option<usize>,
}

#[derive(Debug, Clone, Default)]
pub struct RoundLog {
    pub rounds: Vec<Round>,
}

impl RoundLog {
    /// CSV with columns round, phase, candidate, tally.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("round,phase,candidate,tally\n");
        for (t, round) in self.rounds.iter().enumerate() {
            for (a, &tally) in round.tallies.iter().enumerate() {
                out.push_str(&format!("{t},{},{a},{tally}\n", round.phase.as_str()));
            }
        }
        out
    }
}

/// Greedy temperature dynamics. Each round every agent votes for its most
/// preferred candidate above the temperature threshold; the threshold is
/// raised to the minimal active tally, with the drop set truncated by
/// `tie_break` so at most one candidate leaves per round. Converges to a
/// parallel-universe STV winner.
pub fn greedy_dynamics(e: &Election, tie_break: &[usize]) -> Result<(usize, RoundLog)> {
    let m = e.m_candidates();
    let mut priority = vec![usize::MAX; m];
    for (pos, &a) in tie_break.iter().enumerate() {
        if a >= m || priority[a] != usize::MAX {
            return Err(Error::MalformedSequence(format!("bad tie-break entry {a}")));
        }
        priority[a] = pos;
    }
    if priority.iter().any(|&p| p == usize::MAX) {
        return Err(Error::MalformedSequence(
            "tie-break must cover every candidate".into(),
        ));
    }
    let mut active = vec![true; m];
    let mut n_active = m;
    let mut log = RoundLog::default();
    while n_active > 1 {
        let tallies = plurality_tallies(e, &active);
        let votes = (0..e.n_voters())
            .map(|i| e.ranking(i).iter().copied().find(|&a| active[a]).unwrap())
            .collect();
        let min = (0..m).filter(|&a| active[a]).map(|a| tallies[a]).min().unwrap();
        // Raising theta to min would drop every minimal-tally candidate;
        // the one-per-round constraint keeps all but the tie-break loser.
        let dropped = (0..m)
            .filter(|&a| active[a] && tallies[a] == min)
            .min_by_key(|&a| priority[a])
            .unwrap();
        log.rounds.push(Round {
            phase: Phase::Greedy,
            tallies,
            votes,
            eliminated: Some(dropped),
        });
        active[dropped] = false;
        n_active -= 1;
    }
    Ok(((0..m).find(|&a| active[a]).unwrap(), log))
}

/// Exploration/exploitation coordination dynamics.
///
/// Exploration runs for m rounds; in round t agent i votes for its most
/// preferred candidate not yet in its list, then appends it. A candidate's
/// cumulative count is the number of agents whose lists contain it. In the
/// exploitation round each agent supports the earliest entry of its own
/// list whose cumulative count reached at least n/2; the winner is the
/// plurality winner of that round, final ties by candidate index.
pub fn coordination_dynamics(e: &Election) -> Result<(usize, RoundLog)> {
    let n = e.n_voters();
    let m = e.m_candidates();
    let mut log = RoundLog::default();
    let mut counts = vec![0usize; m];
    // Agent i's list after t exploration rounds is the first t entries of
    // its ranking, so exploration round t votes are ranking[t].
    for t in 0..m {
        let votes: Vec<usize> = (0..n).map(|i| e.ranking(i)[t]).collect();
        let mut tallies = vec![0usize; m];
        for &v in &votes {
            tallies[v] += 1;
            counts[v] += 1;
        }
        log.rounds.push(Round {
            phase: Phase::Exploration,
            tallies,
            votes,
            eliminated: None,
        });
    }
    // Qualification threshold: count >= n/2, i.e. exactly n/2 for even n
    // and ceil(n/2) for odd n.
    let mut qualified: Vec<bool> = counts.iter().map(|&c| 2 * c >= n).collect();
    if !qualified.iter().any(|&q| q) {
        // Guard for truncated exploration runs; impossible after a full run
        // since every candidate ends with count n.
        let best = (0..m).max_by_key(|&a| counts[a]).unwrap();
        qualified[best] = true;
    }
    let votes: Vec<usize> = (0..n)
        .map(|i| {
            e.ranking(i)
                .iter()
                .copied()
                .find(|&a| qualified[a])
                // Common global tie-break: lowest qualified index.
                .unwrap_or_else(|| (0..m).find(|&a| qualified[a]).unwrap())
        })
        .collect();
    let mut tallies = vec![0usize; m];
    for &v in &votes {
        tallies[v] += 1;
    }
    let winner = (0..m).max_by_key(|&a| tallies[a]).unwrap();
    let winner = (0..m).find(|&a| tallies[a] == tallies[winner]).unwrap();
    log.rounds.push(Round {
        phase: Phase::Exploitation,
        tallies,
        votes,
        eliminated: None,
    });
    Ok((winner, log))
}

/// Over all x != a, the candidate maximizing the number of voters strictly
/// preferring x to a, with that voter set. Ties by candidate index.
pub fn max_coalition_against(e: &Election, a: usize) -> Result<(usize, Vec<usize>)> {
    let m = e.m_candidates();
    if m < 2 {
        return Err(Error::InvalidSize("coalitions need at least 2 candidates".into()));
    }
    let mut best: Option<(usize, Vec<usize>)> = None;
    for x in 0..m {
        if x == a {
            continue;
        }
        let coalition: Vec<usize> = (0..e.n_voters())
            .filter(|&i| e.rank(i, x) < e.rank(i, a))
            .collect();
        match &best {
            Some((_, w)) if w.len() >= coalition.len() => {}
            _ => best = Some((x, coalition)),
        }
    }
    Ok(best.unwrap())
}

/// True iff no coalition of at least alpha*n voters unanimously strictly
/// prefers some other candidate to `a`.
pub fn core_membership(e: &Election, a: usize, alpha: f64) -> Result<bool> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    if e.m_candidates() < 2 {
        return Ok(true);
    }
    let (_, coalition) = max_coalition_against(e, a)?;
    Ok((coalition.len() as f64) < alpha * e.n_voters() as f64)
}
