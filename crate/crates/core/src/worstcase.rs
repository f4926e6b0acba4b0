//! Worst-case distortion certification: maximize a candidate's social cost
//! over all rho-approximate pseudometrics consistent with the profile.
//!
//! For a fixed reference candidate x the program normalizes SC(x) = 1 and
//! maximizes SC(w); the max over x of these optima equals the supremum of
//! SC(w)/min_x SC(x) because the minimizer is itself some candidate (and
//! conversely each per-x optimum is attained by a feasible metric whose
//! minimum cost is at most SC(x)). The supremum ranges over pseudometrics:
//! zero distance between distinct points is allowed, since limiting metrics
//! collapse points.

use minilp::{ComparisonOp, OptimizationDirection, Problem};

use crate::election::Election;
use crate::error::{Error, Result};
use crate::metric::{check_metric, DistanceMatrix, MetricClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
}

/// A sparse linear constraint: sum of terms `sense` rhs.
#[derive(Debug, Clone)]
pub struct LinearConstraint {
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// Linear program over distance variables for unordered point pairs of
/// V u C. Diagonal entries are fixed to 0 and never materialize; symmetric
/// pairs share one variable. All variables are nonnegative.
#[derive(Debug, Clone)]
pub struct LPModel {
    pub n_points: usize,
    pub n_vars: usize,
    /// Objective coefficients, maximized.
    pub objective: Vec<f64>,
    pub constraints: Vec<LinearConstraint>,
}

impl LPModel {
    /// Variable index of the unordered pair {p, q}, p != q.
    pub fn var(&self, p: usize, q: usize) -> usize {
        pair_index(self.n_points, p, q)
    }

    /// Renders the model in CPLEX LP exchange format for cross-checking
    /// against external solvers.
    pub fn to_lp_format(&self) -> String {
        let mut out = String::from("Maximize\n obj:");
        for (j, &c) in self.objective.iter().enumerate() {
            if c != 0.0 {
                out.push_str(&format!(" {:+} x{j}", c));
            }
        }
        out.push_str("\nSubject To\n");
        for (k, c) in self.constraints.iter().enumerate() {
            out.push_str(&format!(" c{k}:"));
            for &(j, coeff) in &c.terms {
                out.push_str(&format!(" {coeff:+} x{j}"));
            }
            let op = match c.sense {
                Sense::Le => "<=",
                Sense::Eq => "=",
            };
            out.push_str(&format!(" {op} {}\n", c.rhs));
        }
        out.push_str("End\n");
        out
    }
}

fn pair_index(n_points: usize, p: usize, q: usize) -> usize {
    debug_assert!(p != q && p < n_points && q < n_points);
    let (lo, hi) = if p < q { (p, q) } else { (q, p) };
    // Row-major upper triangle.
    lo * n_points - lo * (lo + 1) / 2 + (hi - lo - 1)
}

/// Builds the worst-case program for winner `w` against reference optimum
/// `x`: rho-relaxed triangle inequalities over all ordered triples,
/// profile-consistency inequalities, and the normalization SC(x) = 1.
pub fn build_lp(e: &Election, w: usize, x: usize, rho: f64) -> Result<LPModel> {
    if w == x {
        return Err(Error::SameCandidate);
    }
    if rho < 1.0 {
        return Err(Error::RhoOutOfRange(rho));
    }
    let n = e.n_voters();
    let m = e.m_candidates();
    let n_points = n + m;
    let n_vars = n_points * (n_points - 1) / 2;
    // Points 0..n are voters, n..n+m are candidates.
    let cand = |a: usize| n + a;

    let mut objective = vec![0.0; n_vars];
    for i in 0..n {
        objective[pair_index(n_points, i, cand(w))] += 1.0;
    }

    let mut constraints = Vec::new();
    // rho-relaxed triangle inequality for every ordered triple (p, q, r):
    // d(p,r) - rho*d(p,q) - rho*d(q,r) <= 0.
    for p in 0..n_points {
        for q in 0..n_points {
            for r in 0..n_points {
                if p == q || q == r || p == r {
                    continue;
                }
                constraints.push(LinearConstraint {
                    terms: vec![
                        (pair_index(n_points, p, r), 1.0),
                        (pair_index(n_points, p, q), -rho),
                        (pair_index(n_points, q, r), -rho),
                    ],
                    sense: Sense::Le,
                    rhs: 0.0,
                });
            }
        }
    }
    // Consistency: d(i, a) <= d(i, b) for consecutive a > b in sigma_i.
    for i in 0..n {
        for pair in e.ranking(i).windows(2) {
            constraints.push(LinearConstraint {
                terms: vec![
                    (pair_index(n_points, i, cand(pair[0])), 1.0),
                    (pair_index(n_points, i, cand(pair[1])), -1.0),
                ],
                sense: Sense::Le,
                rhs: 0.0,
            });
        }
    }
    // Normalization: SC(x) = 1.
    constraints.push(LinearConstraint {
        terms: (0..n).map(|i| (pair_index(n_points, i, cand(x)), 1.0)).collect(),
        sense: Sense::Eq,
        rhs: 1.0,
    });

    Ok(LPModel { n_points, n_vars, objective, constraints })
}

/// Solves an [`LPModel`]; returns the optimum and the variable values.
pub fn solve_lp(model: &LPModel) -> Result<(f64, Vec<f64>)> {
    let mut problem = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> = model
        .objective
        .iter()
        .map(|&c| problem.add_var(c, (0.0, f64::INFINITY)))
        .collect();
    for c in &model.constraints {
        let expr: Vec<_> = c.terms.iter().map(|&(j, coeff)| (vars[j], coeff)).collect();
        let op = match c.sense {
            Sense::Le => ComparisonOp::Le,
            Sense::Eq => ComparisonOp::Eq,
        };
        problem.add_constraint(&expr, op, c.rhs);
    }
    match problem.solve() {
        Ok(solution) => {
            let values: Vec<f64> = vars.iter().map(|&v| solution[v].max(0.0)).collect();
            // The solver reports some unbounded models as "solved" with
            // non-finite entries; normalize both shapes to one error.
            if !solution.objective().is_finite() || values.iter().any(|v| !v.is_finite()) {
                return Err(Error::UnboundedModel);
            }
            Ok((solution.objective(), values))
        }
        Err(minilp::Error::Unbounded) => Err(Error::UnboundedModel),
        Err(err) => Err(Error::SolverFailure(err.to_string())),
    }
}

/// Worst-case distortion of candidate `w` over rho-approximate
/// pseudometrics consistent with the profile, with the witness metric.
#[derive(Debug, Clone)]
pub struct WorstCaseResult {
    /// The supremum; +inf when some reference candidate leaves the
    /// distances to `w` uncapped (e.g. it Pareto-dominates `w`). The
    /// witness is then a feasible metric attaining a large finite ratio.
    pub value: f64,
    pub witness: DistanceMatrix,
    /// The reference candidate whose unit-cost normalization attained the
    /// maximum.
    pub reference_optimum: usize,
    /// True when the witness collapses two distinct points to distance 0,
    /// i.e. it is a proper pseudometric rather than a metric.
    pub has_collapsed_points: bool,
}

const WITNESS_TOL: f64 = 1e-6;
const MAX_LP_POINTS: usize = 32;
/// Distance cap used to extract a finite witness when the supremum is
/// infinite; the reported value is +inf either way.
const UNBOUNDED_WITNESS_CAP: f64 = 1e6;

pub fn worst_case_distortion(e: &Election, w: usize, rho: f64) -> Result<WorstCaseResult> {
    let n = e.n_voters();
    let m = e.m_candidates();
    if n + m > MAX_LP_POINTS {
        return Err(Error::InvalidSize(format!(
            "worst-case LP limited to {MAX_LP_POINTS} points, got {}",
            n + m
        )));
    }
    if m < 2 {
        return Err(Error::InvalidSize("need at least 2 candidates".into()));
    }
    let mut best: Option<(f64, Vec<f64>, usize)> = None;
    let mut unbounded_at: Option<usize> = None;
    for x in 0..m {
        if x == w {
            continue;
        }
        let model = build_lp(e, w, x, rho)?;
        match solve_lp(&model) {
            Ok((value, values)) => {
                if best.as_ref().map_or(true, |(v, _, _)| value > *v) {
                    best = Some((value, values, x));
                }
            }
            // The supremum is infinite: nothing caps the distances to w
            // when, e.g., every voter ranks x above w. Remember the
            // reference and keep a finite witness from a capped re-solve.
            Err(Error::UnboundedModel) => {
                if unbounded_at.is_none() {
                    unbounded_at = Some(x);
                }
            }
            Err(err) => return Err(err),
        }
    }
    let (value, values, reference_optimum) = match unbounded_at {
        Some(x) => {
            let mut model = build_lp(e, w, x, rho)?;
            for j in 0..model.n_vars {
                model.constraints.push(LinearConstraint {
                    terms: vec![(j, 1.0)],
                    sense: Sense::Le,
                    rhs: UNBOUNDED_WITNESS_CAP,
                });
            }
            let (_, values) = solve_lp(&model)?;
            (f64::INFINITY, values, x)
        }
        None => best.ok_or(Error::InternalInvariantBroken)?,
    };

    let n_points = n + m;
    let mut rows = vec![vec![0.0; n_points]; n_points];
    let mut collapsed = false;
    for p in 0..n_points {
        for q in (p + 1)..n_points {
            let v = values[pair_index(n_points, p, q)];
            rows[p][q] = v;
            rows[q][p] = v;
            if v == 0.0 {
                collapsed = true;
            }
        }
    }
    let labels = (0..n)
        .map(|i| format!("v{i}"))
        .chain((0..m).map(|a| format!("c{a}")))
        .collect();
    let witness = DistanceMatrix::new(labels, rows, MetricClass::RhoApprox(rho))?;

    // Re-validate the extracted witness independently of the solver.
    if !check_metric(&witness, MetricClass::RhoApprox(rho), WITNESS_TOL).is_clean() {
        return Err(Error::SolverFailure("witness violates the metric class".into()));
    }
    for i in 0..n {
        for pair in e.ranking(i).windows(2) {
            if witness.dist(i, n + pair[0]) > witness.dist(i, n + pair[1]) + WITNESS_TOL {
                return Err(Error::SolverFailure(
                    "witness is inconsistent with the profile".into(),
                ));
            }
        }
    }

    Ok(WorstCaseResult { value, witness, reference_optimum, has_collapsed_points: collapsed })
}
