//! Doubling constant/dimension of a finite metric and ball coverings.
//!
//! The doubling constant is the least lambda such that every ball B(x, 2r)
//! can be covered by at most lambda balls B(s, r) with s in the space. Balls
//! are open. Both ball families are piecewise constant in r with breakpoints
//! at D union D/2 (D = the set of pairwise distances), so evaluating at all
//! breakpoints and at midpoints of consecutive breakpoints enumerates every
//! distinct configuration.

use crate::error::{Error, Result};
use crate::metric::DistanceMatrix;

/// Exact minimum set cover (capped at 24 points) or greedy upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverMode {
    Exact,
    Greedy,
}

const EXACT_POINT_CAP: usize = 24;

/// Computes the doubling constant lambda and dimension log2(lambda).
///
/// `Exact` solves a minimum set cover per (center, radius) configuration and
/// requires at most 24 points; `Greedy` returns an upper bound on lambda.
pub fn doubling_constant(d: &DistanceMatrix, mode: CoverMode) -> Result<(usize, f64)> {
    let n = d.n_points();
    if n < 2 {
        return Err(Error::InvalidSize("doubling constant needs >= 2 points".into()));
    }
    if mode == CoverMode::Exact && n > EXACT_POINT_CAP {
        return Err(Error::TooLargeForExact(n));
    }
    let radii = breakpoint_radii(d);
    let mut lambda = 1usize;
    for x in 0..n {
        for &r in &radii {
            let universe = d.open_ball(x, 2.0 * r);
            if universe.len() <= lambda {
                continue; // cover size is at most the universe size
            }
            let sets = ball_sets(d, &universe, r);
            let greedy = greedy_cover(universe.len(), &sets);
            match mode {
                CoverMode::Greedy => lambda = lambda.max(greedy.len()),
                CoverMode::Exact => {
                    if greedy.len() > lambda {
                        let exact = exact_cover(universe.len(), &sets, greedy);
                        lambda = lambda.max(exact.len());
                    }
                }
            }
        }
    }
    Ok((lambda, (lambda as f64).log2()))
}

/// A packing-based lower bound on the minimum number of radius-r balls
/// needed to cover B(x, 2r), hence on the doubling constant. Any set of
/// points in B(x, 2r) that are pairwise at distance >= 2r apart cannot share
/// an open radius-r ball (triangle inequality), so its size bounds the cover
/// from below. Scales to spaces too large for the exact computation.
pub fn doubling_packing_lower_bound(d: &DistanceMatrix, x: usize, r: f64) -> usize {
    let mut in_ball = d.open_ball(x, 2.0 * r);
    // Far points first: starting from the center tends to block everything.
    in_ball.sort_by(|&a, &b| d.dist(x, b).partial_cmp(&d.dist(x, a)).unwrap());
    let mut packed: Vec<usize> = Vec::new();
    for p in in_ball {
        if packed.iter().all(|&q| d.dist(p, q) >= 2.0 * r) {
            packed.push(p);
        }
    }
    packed.len()
}

/// Covers B(x, r) by balls of radius at most `eps` via repeated halving.
/// Returns (center, radius) pairs; with exact per-ball covers the count is
/// at most lambda^ceil(log2(r/eps)).
pub fn cover_ball(
    d: &DistanceMatrix,
    x: usize,
    r: f64,
    eps: f64,
) -> Result<Vec<(usize, f64)>> {
    if !(eps > 0.0) || eps > r {
        return Err(Error::InvalidRadii { r, eps });
    }
    if x >= d.n_points() {
        return Err(Error::UnknownPoint(x));
    }
    let halvings = if r <= eps {
        0
    } else {
        ((r / eps).log2() - 1e-12).ceil().max(0.0) as usize
    };
    let exact = d.n_points() <= EXACT_POINT_CAP;
    let mut balls: Vec<(usize, f64)> = vec![(x, r)];
    for _ in 0..halvings {
        let mut next: Vec<(usize, f64)> = Vec::new();
        for &(c, rad) in &balls {
            let half = rad / 2.0;
            let universe = d.open_ball(c, rad);
            if universe.is_empty() {
                continue;
            }
            let sets = ball_sets(d, &universe, half);
            let greedy = greedy_cover(universe.len(), &sets);
            let centers = if exact {
                exact_cover(universe.len(), &sets, greedy)
            } else {
                greedy
            };
            for s in centers {
                if !next.contains(&(s, half)) {
                    next.push((s, half));
                }
            }
        }
        balls = next;
    }
    Ok(balls)
}

/// All candidate radii at which a ball configuration can change, plus the
/// midpoints of consecutive candidate intervals.
fn breakpoint_radii(d: &DistanceMatrix) -> Vec<f64> {
    let n = d.n_points();
    let mut points: Vec<f64> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = d.dist(i, j);
            if v > 0.0 {
                points.push(v);
                points.push(v / 2.0);
            }
        }
    }
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());
    points.dedup();
    let mut radii = points.clone();
    for w in points.windows(2) {
        radii.push((w[0] + w[1]) / 2.0);
    }
    radii
}

/// For each potential center s, the subset of `universe` inside B(s, r),
/// as a bitmask over universe positions. Centers with empty coverage are
/// dropped; duplicate masks keep one representative.
fn ball_sets(d: &DistanceMatrix, universe: &[usize], r: f64) -> Vec<(usize, u64)> {
    debug_assert!(universe.len() <= 64);
    let mut sets: Vec<(usize, u64)> = Vec::new();
    for s in 0..d.n_points() {
        let mut mask = 0u64;
        for (pos, &p) in universe.iter().enumerate() {
            if d.dist(s, p) < r {
                mask |= 1 << pos;
            }
        }
        if mask != 0 && !sets.iter().any(|&(_, m)| m == mask) {
            sets.push((s, mask));
        }
    }
    sets
}

fn greedy_cover(universe_size: usize, sets: &[(usize, u64)]) -> Vec<usize> {
    let full: u64 = if universe_size == 64 { !0 } else { (1 << universe_size) - 1 };
    let mut covered = 0u64;
    let mut chosen = Vec::new();
    while covered != full {
        let (center, mask) = sets
            .iter()
            .max_by_key(|&&(_, m)| (m & !covered).count_ones())
            .copied()
            .expect("every point covers itself");
        if (mask & !covered) == 0 {
            unreachable!("uncoverable point in universe");
        }
        covered |= mask;
        chosen.push(center);
    }
    chosen
}

/// Branch-and-bound minimum set cover. `incumbent` must be a valid cover and
/// seeds the upper bound.
fn exact_cover(universe_size: usize, sets: &[(usize, u64)], incumbent: Vec<usize>) -> Vec<usize> {
    let full: u64 = if universe_size == 64 { !0 } else { (1 << universe_size) - 1 };
    let max_set = sets.iter().map(|&(_, m)| m.count_ones()).max().unwrap_or(1) as usize;
    let mut best = incumbent;

    fn recurse(
        sets: &[(usize, u64)],
        full: u64,
        covered: u64,
        chosen: &mut Vec<usize>,
        best: &mut Vec<usize>,
        max_set: usize,
    ) {
        if covered == full {
            if chosen.len() < best.len() {
                *best = chosen.clone();
            }
            return;
        }
        let remaining = (full & !covered).count_ones() as usize;
        if chosen.len() + remaining.div_ceil(max_set) >= best.len() {
            return;
        }
        // Branch on the uncovered element with the fewest covering sets.
        let mut branch_elem = 0;
        let mut branch_count = usize::MAX;
        for pos in 0..64 {
            let bit = 1u64 << pos;
            if full & !covered & bit != 0 {
                let count = sets.iter().filter(|&&(_, m)| m & bit != 0).count();
                if count < branch_count {
                    branch_count = count;
                    branch_elem = pos;
                }
            }
        }
        let bit = 1u64 << branch_elem;
        let mut options: Vec<&(usize, u64)> = sets.iter().filter(|&&(_, m)| m & bit != 0).collect();
        options.sort_by_key(|&&(_, m)| std::cmp::Reverse((m & !covered).count_ones()));
        for &(center, mask) in options {
            chosen.push(center);
            recurse(sets, full, covered | mask, chosen, best, max_set);
            chosen.pop();
        }
    }

    let mut chosen = Vec::new();
    recurse(sets, full, 0, &mut chosen, &mut best, max_set);
    best
}
