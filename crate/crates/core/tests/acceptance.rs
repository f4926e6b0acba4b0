//! Acceptance suite: one test per criterion, each printing a single
//! pass/fail line. Theoretical guarantees are checked as explicit-constant
//! inequalities on seeded corpora; combinatorial algorithms are checked
//! against independent brute-force oracles.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use distortion_core::{
    bound_value, check_consistency, check_metric, check_wave_premise, coordination_dynamics,
    cover_ball, derive_profile, doubling_constant, doubling_packing_lower_bound, gen_random_graph,
    gen_rho_lb, gen_sq_euclid_lb, gen_stv_tree_lb, gen_ultrametric_lb, greedy_dynamics, harmonic,
    max_coalition_against, minimax_metric, plurality_matching_winner, realized_distortion,
    social_cost, stv_trace, stv_winners, validate_elimination_sequence, worst_case_distortion,
    BinaryOperator, BoundTheorem, CoverMode, DistanceMatrix, Election, Embedding, GraphSpec,
    MetricClass, PNorm,
};

const TOL: f64 = 1e-9;

fn verdict(id: usize, name: &str, failures: &[String]) {
    let status = if failures.is_empty() { "pass" } else { "FAIL" };
    println!("criterion {id:2} ({name}): {status}");
    assert!(
        failures.is_empty(),
        "criterion {id} ({name}) failed:\n{}",
        failures.join("\n")
    );
}

/// Random 1-D Euclidean corpus for criteria 1/9/10 (n <= 15, m <= 8).
fn line_corpus(count: u64) -> Vec<Election> {
    (0..count)
        .map(|seed| {
            let n = 3 + (seed % 13) as usize;
            let m = 2 + (seed % 7) as usize;
            distortion_core::gen_random_euclidean(n, m, 1, PNorm::P(2.0), seed).unwrap()
        })
        .collect()
}

/// Random 2-D Euclidean corpus small enough for the exact doubling constant
/// (n + m <= 16 points).
fn plane_corpus(count: u64) -> Vec<Election> {
    (0..count)
        .map(|seed| {
            let n = 4 + (seed % 7) as usize;
            let m = 2 + (seed % 5) as usize;
            distortion_core::gen_random_euclidean(n, m, 2, PNorm::P(2.0), 1000 + seed).unwrap()
        })
        .collect()
}

fn random_profile(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Election {
    let profile = (0..n)
        .map(|_| {
            let mut r: Vec<usize> = (0..m).collect();
            r.shuffle(rng);
            r
        })
        .collect();
    Election::new(m, profile).unwrap()
}

/// Random connected graph under minimax (bottleneck) distances: an
/// ultra-metric instance.
fn random_ultra_election(seed: u64) -> Election {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 3 + (seed % 8) as usize;
    let m = 2 + (seed % 4) as usize;
    let total = n + m;
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    for v in 1..total {
        let u = rng.gen_range(0..v);
        edges.push((u, v, rng.gen_range(1..=5) as f64));
    }
    for _ in 0..total {
        let (u, v) = (rng.gen_range(0..total), rng.gen_range(0..total));
        if u != v {
            edges.push((u, v, rng.gen_range(1..=5) as f64));
        }
    }
    let d = minimax_metric(&GraphSpec::new(total, edges).unwrap()).unwrap();
    let voters: Vec<usize> = (0..n).collect();
    let candidates: Vec<usize> = (n..total).collect();
    derive_profile(&d, &voters, &candidates).unwrap()
}

#[test]
fn acceptance_01_stv_line_bound() {
    let mut failures = Vec::new();
    for (i, e) in line_corpus(500).iter().enumerate() {
        for &w in &stv_winners(e).unwrap().winners {
            let d = realized_distortion(e, w, BinaryOperator::Sum).unwrap();
            if d > 15.0 + TOL {
                failures.push(format!("instance {i}: winner {w} distortion {d}"));
            }
        }
    }
    verdict(1, "STV on the line <= 15", &failures);
}

#[test]
fn acceptance_02_stv_general_metric_bound() {
    let mut failures = Vec::new();
    for seed in 0..500u64 {
        let n = 3 + (seed % 10) as usize;
        let m = 2 + (seed % 7) as usize;
        let e = gen_random_graph(n, m, seed).unwrap();
        let bound = 8.0 * harmonic(m) + 5.0;
        for &w in &stv_winners(&e).unwrap().winners {
            let d = realized_distortion(&e, w, BinaryOperator::Sum).unwrap();
            if d > bound + TOL {
                failures.push(format!("seed {seed}: winner {w} distortion {d} > {bound}"));
            }
        }
    }
    verdict(2, "STV on general metrics <= 8H_m + 5", &failures);
}

#[test]
fn acceptance_03_stv_doubling_bound() {
    let mut failures = Vec::new();
    for (i, e) in plane_corpus(200).iter().enumerate() {
        let metric = &e.embedding().unwrap().metric;
        let (lambda, _) = doubling_constant(metric, CoverMode::Exact).unwrap();
        let m = e.m_candidates();
        let bound =
            bound_value(BoundTheorem::Doubling { lambda: lambda as f64, m }).unwrap();
        for &w in &stv_winners(e).unwrap().winners {
            let d = realized_distortion(e, w, BinaryOperator::Sum).unwrap();
            if d > bound + TOL {
                failures.push(format!("instance {i}: winner {w} distortion {d} > {bound}"));
            }
        }
    }
    verdict(3, "STV on doubling metrics <= 1 + 3(4h+7)", &failures);
}

/// Independent oracle: a candidate wins iff some permutation of the others
/// is a legal elimination order.
fn stv_brute(e: &Election) -> Vec<usize> {
    fn permute(items: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
        if k == items.len() {
            visit(items);
            return;
        }
        for i in k..items.len() {
            items.swap(k, i);
            permute(items, k + 1, visit);
            items.swap(k, i);
        }
    }
    let m = e.m_candidates();
    let mut winners = Vec::new();
    let mut order: Vec<usize> = (0..m).collect();
    permute(&mut order, 0, &mut |perm| {
        if validate_elimination_sequence(e, &perm[..m - 1]).unwrap() {
            let w = perm[m - 1];
            if !winners.contains(&w) {
                winners.push(w);
            }
        }
    });
    winners.sort_unstable();
    winners
}

#[test]
fn acceptance_04_parallel_universe_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    let mut failures = Vec::new();
    for i in 0..200 {
        let m = rng.gen_range(2..=6);
        let n = rng.gen_range(2..=9);
        let e = random_profile(&mut rng, n, m);
        let fast = stv_winners(&e).unwrap().winners;
        let brute = stv_brute(&e);
        if fast != brute {
            failures.push(format!("profile {i}: fast {fast:?} != brute {brute:?}"));
        }
    }
    verdict(4, "stv_winners equals (m-1)! enumeration", &failures);
}

#[test]
fn acceptance_05_tree_lower_bound() {
    let mut failures = Vec::new();
    let tree = gen_stv_tree_lb(3, 1).unwrap();
    let e = &tree.election;

    if !validate_elimination_sequence(e, &tree.witness).unwrap() {
        failures.push("witness is not a legal elimination sequence".into());
    }
    for i in 0..tree.spec.height {
        if tree.spec.layer_voters[i + 1] * 2 != tree.spec.layer_voters[i] {
            failures.push(format!("layer {i}: voters do not halve"));
        }
    }
    let n0 = tree.spec.layer_voters[0] as f64;
    let h = tree.spec.height as f64;
    let sc_w = social_cost(e, tree.root, BinaryOperator::Sum).unwrap();
    let sc_x = social_cost(e, tree.hub, BinaryOperator::Sum).unwrap();
    if sc_w < n0 * h {
        failures.push(format!("SC(w) = {sc_w} < n0*h = {}", n0 * h));
    }
    if sc_x > 4.0 * n0 {
        failures.push(format!("SC(x) = {sc_x} > 4n0 = {}", 4.0 * n0));
    }

    // Claim-level doubling bound: the hub's radius-2 ball holds all leaves,
    // pairwise 2 apart, so no 2r-separated packing argument lets fewer than
    // lambda unit balls cover it.
    let sub = tree.candidate_submetric();
    let hub_point = tree.spec.n_tree_nodes();
    let packing = doubling_packing_lower_bound(&sub, hub_point, 1.0);
    if packing < tree.spec.leaves {
        failures.push(format!("packing {packing} < lambda = {}", tree.spec.leaves));
    }

    // The witness replays as a deterministic trace when used as priority.
    let mut priority = tree.witness.clone();
    priority.push(tree.root);
    let (winner, seq, _) = stv_trace(e, &priority).unwrap();
    if winner != tree.root || seq != tree.witness {
        failures.push(format!("trace winner {winner} != root {}", tree.root));
    }

    verdict(5, "tree lower bound (h = 3)", &failures);
}

#[test]
fn acceptance_06_plurality_matching() {
    let mut failures = Vec::new();

    // General embeddings: winner exists, distortion <= 3.
    for (i, e) in line_corpus(200).iter().enumerate() {
        match plurality_matching_winner(e) {
            Ok((w, _)) => {
                let d = realized_distortion(e, w, BinaryOperator::Sum).unwrap();
                if d > 3.0 + TOL {
                    failures.push(format!("line {i}: distortion {d} > 3"));
                }
            }
            Err(err) => failures.push(format!("line {i}: no winner ({err})")),
        }
    }

    // Ultra embeddings: distortion <= 2, and with the MAX operator the
    // winner attains the minimum max-cost.
    for seed in 0..200u64 {
        let e = random_ultra_election(seed);
        let (w, _) = plurality_matching_winner(&e).unwrap();
        let d = realized_distortion(&e, w, BinaryOperator::Sum).unwrap();
        if d > 2.0 + TOL {
            failures.push(format!("ultra {seed}: distortion {d} > 2"));
        }
        let max_cost = social_cost(&e, w, BinaryOperator::Max).unwrap();
        let best_max = (0..e.m_candidates())
            .map(|a| social_cost(&e, a, BinaryOperator::Max).unwrap())
            .fold(f64::INFINITY, f64::min);
        if max_cost > best_max + TOL {
            failures.push(format!("ultra {seed}: max-cost {max_cost} > optimum {best_max}"));
        }
    }
    // Including the explicit construction, where the loser's ratio is 2.
    let e = gen_ultrametric_lb(10).unwrap();
    let (w, _) = plurality_matching_winner(&e).unwrap();
    if realized_distortion(&e, w, BinaryOperator::Sum).unwrap() > 2.0 + TOL {
        failures.push("ultrametric_lb: winner above 2".into());
    }
    if (realized_distortion(&e, 1, BinaryOperator::Sum).unwrap() - 2.0).abs() > TOL {
        failures.push("ultrametric_lb: loser ratio is not exactly 2".into());
    }

    // Rho-approximate embeddings (squared Euclidean: rho = 2, bound 10).
    for seed in 0..200u64 {
        let n = 3 + (seed % 9) as usize;
        let m = 2 + (seed % 5) as usize;
        let e =
            distortion_core::gen_random_euclidean(n, m, 2, PNorm::Squared, 2000 + seed).unwrap();
        let (w, _) = plurality_matching_winner(&e).unwrap();
        let d = realized_distortion(&e, w, BinaryOperator::Sum).unwrap();
        if d > 10.0 + TOL {
            failures.push(format!("squared {seed}: distortion {d} > 10"));
        }
    }
    for (rho, eps) in [(1.5, 0.25), (2.0, 0.01), (3.0, 0.5)] {
        let e = gen_rho_lb(rho, eps, 4).unwrap();
        let (w, _) = plurality_matching_winner(&e).unwrap();
        let d = realized_distortion(&e, w, BinaryOperator::Sum).unwrap();
        let bound = 2.0 * rho * rho + rho;
        if d > bound + TOL {
            failures.push(format!("rho_lb({rho}): distortion {d} > {bound}"));
        }
    }

    verdict(6, "PluralityMatching bounds", &failures);
}

#[test]
fn acceptance_07_rho_approximate_lower_bound() {
    let mut failures = Vec::new();

    let e = gen_rho_lb(2.0, 0.01, 3).unwrap();
    let d = realized_distortion(&e, 1, BinaryOperator::Sum).unwrap();
    if (d - 6.9505).abs() > 1e-4 {
        failures.push(format!("gen_rho_lb(2, 0.01) distortion {d} != 6.9505"));
    }

    let split = Election::new(2, vec![vec![0, 1], vec![1, 0]]).unwrap();
    let certified = worst_case_distortion(&split, 1, 2.0).unwrap();
    if certified.value < 7.0 - 1e-3 {
        failures.push(format!("certify(rho=2) = {} < 7 - 1e-3", certified.value));
    }
    let certified = worst_case_distortion(&split, 1, 1.0).unwrap();
    if (certified.value - 3.0).abs() > 1e-4 {
        failures.push(format!("certify(rho=1) = {} != 3", certified.value));
    }

    verdict(7, "rho-approximate lower bound and certificates", &failures);
}

#[test]
fn acceptance_08_squared_euclidean_lower_bound() {
    let mut failures = Vec::new();
    let delta = 2.0_f64.sqrt() - 1.0;
    let e = gen_sq_euclid_lb(delta, 1).unwrap();
    let d = realized_distortion(&e, 1, BinaryOperator::Sum).unwrap();
    let expected = (4.0 + 2.0 * 2.0_f64.sqrt()) / (4.0 - 2.0 * 2.0_f64.sqrt());
    if (d - expected).abs() > 1e-6 {
        failures.push(format!("distortion {d} != {expected}"));
    }
    verdict(8, "squared-Euclidean lower bound 5.8284", &failures);
}

#[test]
fn acceptance_09_dynamics() {
    let mut failures = Vec::new();

    // Greedy dynamics converges to a parallel-universe STV winner.
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    for i in 0..200 {
        let m = rng.gen_range(2..=6);
        let n = rng.gen_range(2..=9);
        let e = random_profile(&mut rng, n, m);
        let identity: Vec<usize> = (0..m).collect();
        let (w, _) = greedy_dynamics(&e, &identity).unwrap();
        if !stv_winners(&e).unwrap().contains(w) {
            failures.push(format!("profile {i}: greedy winner {w} not a PU winner"));
        }
    }

    let corpus = line_corpus(500);
    for (i, e) in corpus.iter().enumerate() {
        // Coordination dynamics stays under the theorem's constant.
        let (w, _) = coordination_dynamics(e).unwrap();
        let d = realized_distortion(e, w, BinaryOperator::Sum).unwrap();
        if d > 11.0 + TOL {
            failures.push(format!("instance {i}: coordination distortion {d} > 11"));
        }
        // Coalition inequality: a candidate with distortion D leaves at
        // least a (1 - 2/(D+1)) fraction preferring someone else.
        for a in 0..e.m_candidates() {
            let d = realized_distortion(e, a, BinaryOperator::Sum).unwrap();
            if d > 1.0 && d.is_finite() {
                let (_, coalition) = max_coalition_against(e, a).unwrap();
                let frac = coalition.len() as f64 / e.n_voters() as f64;
                if frac < 1.0 - 2.0 / (d + 1.0) - TOL {
                    failures.push(format!(
                        "instance {i}, candidate {a}: coalition {frac} below bound"
                    ));
                }
            }
        }
    }

    verdict(9, "dynamics (greedy, coordination, coalitions)", &failures);
}

#[test]
fn acceptance_10_lp_sanity() {
    let mut failures = Vec::new();
    // A dedicated corpus with modest point counts: the LP has O((n+m)^3)
    // constraints and is solved (m-1) times per rho level per instance.
    let mut corpus: Vec<Election> = (0..150u64)
        .map(|seed| {
            let n = 3 + (seed % 6) as usize;
            let m = 2 + (seed % 4) as usize;
            distortion_core::gen_random_euclidean(n, m, 1, PNorm::P(2.0), seed).unwrap()
        })
        .collect();
    corpus.extend((0..60u64).map(|seed| {
        let n = 3 + (seed % 4) as usize;
        let m = 2 + (seed % 3) as usize;
        distortion_core::gen_random_euclidean(n, m, 2, PNorm::P(2.0), 1000 + seed).unwrap()
    }));

    for (i, e) in corpus.iter().enumerate() {
        let identity: Vec<usize> = (0..e.m_candidates()).collect();
        let (w, _, _) = stv_trace(e, &identity).unwrap();
        let realized = realized_distortion(e, w, BinaryOperator::Sum).unwrap();

        let mut previous = 0.0;
        for rho in [1.0, 1.5, 2.0] {
            let result = match worst_case_distortion(e, w, rho) {
                Ok(r) => r,
                Err(err) => {
                    failures.push(format!("instance {i} rho {rho}: {err}"));
                    continue;
                }
            };
            if rho == 1.0 && result.value < realized - 1e-6 {
                failures.push(format!(
                    "instance {i}: LP {} < realized {realized}",
                    result.value
                ));
            }
            if result.value < previous - 1e-6 {
                failures.push(format!(
                    "instance {i}: value {} decreased from {previous} at rho {rho}",
                    result.value
                ));
            }
            previous = result.value;

            // Witness re-validation with an independent pass: metric class
            // and profile consistency at the witness embedding.
            if !check_metric(&result.witness, MetricClass::RhoApprox(rho), 1e-6).is_clean() {
                failures.push(format!("instance {i} rho {rho}: witness class violation"));
            }
            let mut on_witness = Election::new(e.m_candidates(), e.profile().to_vec()).unwrap();
            let n = e.n_voters();
            on_witness.set_embedding(Embedding {
                metric: result.witness.clone(),
                voter_points: (0..n).collect(),
                candidate_points: (n..n + e.m_candidates()).collect(),
            });
            if !check_consistency(&on_witness, 1e-6).unwrap().is_clean() {
                failures.push(format!("instance {i} rho {rho}: witness inconsistent"));
            }
        }
    }

    verdict(10, "LP sanity (dominance, witnesses, monotone in rho)", &failures);
}

#[test]
fn acceptance_11_lemma_suite() {
    let mut failures = Vec::new();

    // Wave lemma: SC(b)/SC(a) <= 1 + h/(1-gamma) for every candidate pair
    // and several wave resolutions.
    for (i, e) in line_corpus(100).iter().enumerate() {
        let emb = e.embedding().unwrap();
        for a in 0..e.m_candidates() {
            for b in 0..e.m_candidates() {
                if a == b || emb.candidate_dist(a, b) == 0.0 {
                    continue;
                }
                if social_cost(e, a, BinaryOperator::Sum).unwrap() == 0.0 {
                    continue;
                }
                for h in [1.0, 2.0, 7.0] {
                    let premise = check_wave_premise(e, a, b, h).unwrap();
                    if !premise.holds {
                        failures.push(format!("instance {i}: wave({a},{b},{h}) violated"));
                    }
                }
            }
        }
    }

    // Covering bound: B(x, r) splits into at most lambda^ceil(log2(r/eps))
    // balls of radius <= eps, and they actually cover.
    for (i, e) in plane_corpus(30).iter().enumerate() {
        let d = &e.embedding().unwrap().metric;
        let (lambda, _) = doubling_constant(d, CoverMode::Exact).unwrap();
        let r = (0..d.n_points())
            .map(|p| d.dist(0, p))
            .fold(0.0f64, f64::max)
            .max(1e-6);
        for eps_div in [2.0, 4.0] {
            let eps = r / eps_div;
            let balls = cover_ball(d, 0, r, eps).unwrap();
            let budget = (lambda as f64).powf((r / eps).log2().ceil());
            if (balls.len() as f64) > budget + 1e-9 {
                failures.push(format!("instance {i}: {} balls > budget {budget}", balls.len()));
            }
            for p in d.open_ball(0, r) {
                if !balls.iter().any(|&(c, rad)| d.dist(c, p) < rad) {
                    failures.push(format!("instance {i}: point {p} uncovered"));
                }
            }
            if balls.iter().any(|&(_, rad)| rad > eps) {
                failures.push(format!("instance {i}: oversized ball in cover"));
            }
        }
    }

    // Exact doubling constant of the k-point uniform metric is k.
    for k in 2..=10 {
        let rows = (0..k)
            .map(|i| (0..k).map(|j| if i == j { 0.0 } else { 1.0 }).collect())
            .collect();
        let d = DistanceMatrix::from_rows(rows, MetricClass::Ultra).unwrap();
        let (lambda, _) = doubling_constant(&d, CoverMode::Exact).unwrap();
        if lambda != k {
            failures.push(format!("uniform({k}): lambda = {lambda}"));
        }
    }

    verdict(11, "lemma suite (wave, covering, uniform doubling)", &failures);
}
