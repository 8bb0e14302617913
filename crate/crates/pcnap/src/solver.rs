//! Top-level pipeline: augmentation rounds, LP rounding, greedy cover, and
//! objective accounting.
//!
//! Round `k'` restricts to the surviving demands that still require
//! connectivity `k'`, enumerates the deficient bisets against the current
//! base graph, solves the lifted LP, drops demands whose `y` reaches the
//! rounding threshold, covers the pruned family with spiders, and moves the
//! newly activated edges into the base graph. Dropped demands never
//! re-enter later rounds. Weights accumulate by pointwise maximum while the
//! audit trail keeps the per-round sums.

use crate::biset::{build_family, BisetFamily};
use crate::error::{Error, Result};
use crate::greedy::{greedy_cover, IterationReport};
use crate::instance::{ConnectivityKind, Instance, WeightAssignment};
use crate::lp::{self, LpStatus};
use crate::oracle::OracleResult;
use crate::rational::{q_ratio, q_to_json, Cost, Q};
use num::traits::{One, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

#[derive(Debug, Clone)]
pub struct SolveConfig {
    /// Demands with `y` at or above this value are dropped (default 1/2).
    pub rounding_threshold: Q,
    /// Approximate LP mode with the given epsilon; exact when `None`.
    pub float_eps: Option<f64>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig { rounding_threshold: q_ratio(1, 2), float_eps: None }
    }
}

#[derive(Debug, Clone)]
pub struct RoundReport {
    pub round: u32,
    pub active: Vec<usize>,
    pub lp_value: Q,
    pub y_values: BTreeMap<usize, Q>,
    pub dropped: Vec<usize>,
    pub weight_added: Q,
    pub family: BisetFamily,
    pub pruned_family: BisetFamily,
    pub iterations: Vec<IterationReport>,
    /// The restricted instance the round ran on: the accumulated base graph
    /// plus the candidates not yet moved into it.
    pub view: Instance,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub weights: WeightAssignment,
    pub satisfied: BTreeSet<usize>,
    pub objective: Cost,
    pub rounds: Vec<RoundReport>,
}

impl Solution {
    pub fn to_json(&self, inst: &Instance) -> serde_json::Value {
        serde_json::json!({
            "objective": self.objective.to_json(),
            "weights": self.weights.to_json(inst),
            "satisfied": self.satisfied.iter().collect::<Vec<_>>(),
            "rounds": self.rounds.iter().map(|r| serde_json::json!({
                "round": r.round,
                "active": r.active,
                "lp_value": q_to_json(&r.lp_value),
                "y": r.y_values.iter()
                    .map(|(i, y)| (i.to_string(), q_to_json(y)))
                    .collect::<serde_json::Map<String, serde_json::Value>>(),
                "dropped": r.dropped,
                "weight_added": q_to_json(&r.weight_added),
                "iterations": r.iterations.iter()
                    .map(|it| it.to_json_line(inst))
                    .collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

fn solve_lp(p: &lp::LPProblem, cfg: &SolveConfig) -> Result<lp::LPSolution> {
    match cfg.float_eps {
        None => lp::solve(p),
        Some(eps) => lp::solve_float(p, eps),
    }
}

/// Run the full pipeline. Node-kind instances are rejected: their deficient
/// families need not be uncrossable and would require a requirement
/// decomposition this solver does not implement.
pub fn solve_pcnap(
    inst: &Instance,
    cfg: &SolveConfig,
    mut trace: Option<&mut (dyn Write + 'static)>,
    mut dump_lp: Option<&mut (dyn Write + 'static)>,
) -> Result<Solution> {
    if inst.kind == ConnectivityKind::Node {
        return Err(Error::validation(
            "node connectivity is not supported; use the edge or element kind",
        ));
    }
    let k = inst.max_requirement();
    let mut e0 = inst.base_edges.clone();
    let mut available: BTreeSet<usize> = (0..inst.candidates.len()).collect();
    let mut eligible: BTreeSet<usize> = (0..inst.demands.len()).collect();
    let mut weights = WeightAssignment::zero(inst.n());
    let mut rounds = Vec::new();

    for round in 1..=k {
        let active: BTreeSet<usize> = eligible
            .iter()
            .copied()
            .filter(|&i| inst.demands[i].requirement >= round)
            .collect();
        if active.is_empty() {
            continue;
        }
        // The round's view: accumulated base graph plus the candidates not
        // yet moved into it. Activated edges leave the pool, so later
        // rounds must raise connectivity with genuinely new edges.
        let avail_idx: Vec<usize> = available.iter().copied().collect();
        let view = Instance {
            node_names: inst.node_names.clone(),
            base_edges: e0.clone(),
            candidates: avail_idx.iter().map(|&i| inst.candidates[i].clone()).collect(),
            weights: inst.weights.clone(),
            demands: inst.demands.clone(),
            kind: inst.kind,
        };
        let family = build_family(&view, &view.base_edges, &active, round)?;
        let labeled = family.demand_indices();
        let mut report = RoundReport {
            round,
            active: active.iter().copied().collect(),
            lp_value: <Q as Zero>::zero(),
            y_values: BTreeMap::new(),
            dropped: Vec::new(),
            weight_added: <Q as Zero>::zero(),
            family: family.clone(),
            pruned_family: BisetFamily::synthetic(inst.n(), vec![]),
            iterations: Vec::new(),
            view: view.clone(),
        };
        let mut survivors: BTreeSet<usize> = active.clone();
        if !labeled.is_empty() {
            let penalties: BTreeMap<usize, Cost> = active
                .iter()
                .map(|&i| (i, inst.demands[i].penalty.clone()))
                .collect();
            let pclp = lp::build_pclp(&view, &family, &penalties)?;
            if let Some(sink) = dump_lp.as_deref_mut() {
                sink.write_all(pclp.dump().as_bytes())?;
            }
            let sol = solve_lp(&pclp, cfg)?;
            if sol.status == LpStatus::Infeasible {
                return Err(Error::infeasible(format!(
                    "round {round}: a demand with unbounded penalty cannot be covered"
                )));
            }
            let sol = sol.expect_optimal("round relaxation")?;
            report.lp_value = sol.objective.clone();
            for &i in &labeled {
                report.y_values.insert(i, sol.value(&lp::y_var(i)));
            }
            let dropped: BTreeSet<usize> = labeled
                .iter()
                .copied()
                .filter(|&i| sol.value(&lp::y_var(i)) >= cfg.rounding_threshold)
                .collect();
            report.dropped = dropped.iter().copied().collect();
            for i in &dropped {
                survivors.remove(i);
            }
            let kept: BTreeSet<usize> =
                labeled.iter().copied().filter(|i| !dropped.contains(i)).collect();
            let pruned = family.restrict_demands(&kept);
            report.pruned_family = pruned.clone();
            if !pruned.is_empty() {
                let cover = greedy_cover(&view, &pruned, trace.as_deref_mut())?;
                report.weight_added = cover.weights.total(&inst.weights);
                report.iterations = cover.iterations;
                weights.max_with(&cover.weights);
                // Move every edge the round's assignment activates into the
                // base graph.
                for vi in view.activated_edges(&cover.weights) {
                    let orig = avail_idx[vi];
                    let e = &inst.candidates[orig];
                    e0.push((e.u, e.v));
                    available.remove(&orig);
                }
            }
            // Round soundness: every surviving demand reaches the target.
            let terminals = inst.terminals();
            for &i in &survivors {
                let d = &inst.demands[i];
                let c = crate::connectivity::connectivity(
                    inst.kind,
                    inst.n(),
                    &e0,
                    &terminals,
                    d.s,
                    d.t,
                )?;
                if c < round {
                    return Err(Error::invariant(format!(
                        "demand {i} still below connectivity {round} after its round"
                    )));
                }
            }
        }
        eligible = survivors;
        rounds.push(report);
    }

    let graph = inst.graph_with(&inst.activated_edges(&weights));
    let satisfied = inst.satisfied_demands(&graph)?;
    for &i in &eligible {
        if !satisfied.contains(&i) {
            return Err(Error::invariant("surviving demand missing from the satisfied set"));
        }
    }
    let mut objective = Cost::Finite(weights.total(&inst.weights));
    for (i, d) in inst.demands.iter().enumerate() {
        if !satisfied.contains(&i) {
            objective = objective + &d.penalty;
        }
    }
    Ok(Solution { weights, satisfied, objective, rounds })
}

#[derive(Debug, Clone)]
pub struct RoundAudit {
    pub round: u32,
    pub weight_added: Q,
    pub npclp_value: Option<Q>,
}

#[derive(Debug, Clone)]
pub struct AuditReport {
    /// objective / oracle optimum; `None` when the oracle optimum is zero
    /// or unbounded.
    pub ratio: Option<Q>,
    pub ratio_ok: bool,
    pub penalty_paid: Q,
    pub penalty_bound: Q,
    pub penalty_ok: bool,
    pub lp_sum: Q,
    pub lp_bound: Option<Q>,
    pub lp_bound_ok: bool,
    pub per_round: Vec<RoundAudit>,
}

impl AuditReport {
    pub fn all_ok(&self) -> bool {
        self.ratio_ok && self.penalty_ok && self.lp_bound_ok
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "ratio": self.ratio.as_ref().map(q_to_json),
            "ratio_ok": self.ratio_ok,
            "penalty_paid": q_to_json(&self.penalty_paid),
            "penalty_bound": q_to_json(&self.penalty_bound),
            "penalty_ok": self.penalty_ok,
            "lp_sum": q_to_json(&self.lp_sum),
            "lp_bound": self.lp_bound.as_ref().map(q_to_json),
            "lp_bound_ok": self.lp_bound_ok,
            "per_round": self.per_round.iter().map(|r| serde_json::json!({
                "round": r.round,
                "weight_added": q_to_json(&r.weight_added),
                "npclp": r.npclp_value.as_ref().map(q_to_json),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Compare a solution against the exact optimum: approximation ratio, the
/// penalty bound (paid at most twice the dropped pi-weighted y values), the
/// per-round LP totals against `k` times the optimum, and the per-round
/// weight against the penalty-free relaxation of the pruned family.
pub fn audit(inst: &Instance, sol: &Solution, oracle: &OracleResult) -> Result<AuditReport> {
    let zero = <Q as Zero>::zero();
    let objective = sol
        .objective
        .as_finite()
        .ok_or_else(|| Error::invariant("audited solution has unbounded objective"))?;
    let (ratio, ratio_ok) = match oracle.optimum.as_finite() {
        Some(opt) if !opt.is_zero() => {
            let r = objective / opt;
            let ok = r >= Q::one();
            (Some(r), ok)
        }
        Some(_) => (None, objective.is_zero()),
        None => (None, true),
    };

    let mut penalty_paid = zero.clone();
    for (i, d) in inst.demands.iter().enumerate() {
        if !sol.satisfied.contains(&i) {
            match &d.penalty {
                Cost::Finite(p) => penalty_paid += p,
                Cost::Infinite => {
                    return Err(Error::invariant("unsatisfied demand with unbounded penalty"))
                }
            }
        }
    }
    let mut penalty_bound = zero.clone();
    for r in &sol.rounds {
        for &i in &r.dropped {
            if let Cost::Finite(p) = &inst.demands[i].penalty {
                let y = r.y_values.get(&i).cloned().unwrap_or_else(|| zero.clone());
                penalty_bound += Q::from_integer(2.into()) * p * y;
            }
        }
    }
    let penalty_ok = penalty_paid <= penalty_bound;

    let lp_sum: Q = sol.rounds.iter().map(|r| r.lp_value.clone()).sum();
    let k = inst.max_requirement();
    let (lp_bound, lp_bound_ok) = match oracle.optimum.as_finite() {
        Some(opt) => {
            let bound = Q::from_integer((k as i64).into()) * opt;
            let ok = lp_sum <= bound;
            (Some(bound), ok)
        }
        None => (None, true),
    };

    let mut per_round = Vec::new();
    for r in &sol.rounds {
        let npclp_value = if r.pruned_family.is_empty() {
            None
        } else {
            let p = lp::build_npclp(inst, &r.pruned_family)?;
            let s = lp::solve(&p)?.expect_optimal("round npclp")?;
            Some(s.objective)
        };
        per_round.push(RoundAudit {
            round: r.round,
            weight_added: r.weight_added.clone(),
            npclp_value,
        });
    }

    Ok(AuditReport {
        ratio,
        ratio_ok,
        penalty_paid,
        penalty_bound,
        penalty_ok,
        lp_sum,
        lp_bound,
        lp_bound_ok,
        per_round,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{brute_force_pcnap, DEFAULT_ORACLE_CAP};
    use crate::rational::q_int;

    fn parse(doc: &str) -> Instance {
        Instance::parse(doc).unwrap()
    }

    #[test]
    fn no_demands_is_trivial() {
        let (inst, _) = crate::corpus::potential_demo(2);
        let sol = solve_pcnap(&inst, &SolveConfig::default(), None, None).unwrap();
        assert_eq!(sol.objective, Cost::Finite(q_int(0)));
        assert!(sol.rounds.is_empty());
    }

    #[test]
    fn zero_penalties_drop_everything() {
        let inst = parse(
            r#"{
            "connectivity": "edge",
            "nodes": ["a", "b", "c"],
            "weights": [0, 1],
            "base_edges": [],
            "candidate_edges": [
                {"ends": ["a", "b"], "activation": [[1, 1]]},
                {"ends": ["b", "c"], "activation": [[1, 1]]}
            ],
            "demands": [
                {"s": "a", "t": "b", "r": 1, "penalty": 0},
                {"s": "a", "t": "c", "r": 1, "penalty": 0}
            ]
        }"#,
        );
        let sol = solve_pcnap(&inst, &SolveConfig::default(), None, None).unwrap();
        assert_eq!(sol.objective, Cost::Finite(q_int(0)));
        assert_eq!(sol.weights.total(&inst.weights), q_int(0));
    }

    #[test]
    fn forced_path_demand_is_satisfied() {
        let inst = parse(
            r#"{
            "connectivity": "edge",
            "nodes": ["a", "b", "c"],
            "weights": [0, 1],
            "base_edges": [["b", "c"]],
            "candidate_edges": [
                {"ends": ["a", "b"], "activation": [[1, 1]]}
            ],
            "demands": [{"s": "a", "t": "c", "r": 1, "penalty": "inf"}]
        }"#,
        );
        let sol = solve_pcnap(&inst, &SolveConfig::default(), None, None).unwrap();
        assert!(sol.satisfied.contains(&0));
        assert_eq!(sol.objective, Cost::Finite(q_int(2)));
        let oracle = brute_force_pcnap(&inst, DEFAULT_ORACLE_CAP).unwrap();
        let report = audit(&inst, &sol, &oracle).unwrap();
        assert!(report.all_ok());
        assert_eq!(report.ratio, Some(q_int(1)));
    }

    #[test]
    fn gap_instance_solved_at_optimum() {
        let inst = crate::corpus::gap_instance(5).unwrap();
        let sol = solve_pcnap(&inst, &SolveConfig::default(), None, None).unwrap();
        assert_eq!(sol.objective, Cost::Finite(q_int(1)));
        assert_eq!(sol.rounds[0].lp_value, q_int(1));
    }

    #[test]
    fn two_round_edge_instance() {
        // One demand wanting two edge-disjoint paths; both candidate paths
        // activate at weight 1 on their middle nodes.
        let inst = parse(
            r#"{
            "connectivity": "edge",
            "nodes": ["s", "x", "y", "t"],
            "weights": [0, 1],
            "base_edges": [],
            "candidate_edges": [
                {"ends": ["s", "x"], "activation": [[0, 1]]},
                {"ends": ["x", "t"], "activation": [[1, 0]]},
                {"ends": ["s", "y"], "activation": [[0, 1]]},
                {"ends": ["y", "t"], "activation": [[1, 0]]}
            ],
            "demands": [{"s": "s", "t": "t", "r": 2, "penalty": "inf"}]
        }"#,
        );
        let sol = solve_pcnap(&inst, &SolveConfig::default(), None, None).unwrap();
        assert!(sol.satisfied.contains(&0));
        assert_eq!(sol.rounds.len(), 2);
        assert_eq!(sol.objective, Cost::Finite(q_int(2)));
        let oracle = brute_force_pcnap(&inst, DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(oracle.optimum, Cost::Finite(q_int(2)));
    }

    #[test]
    fn node_kind_rejected() {
        let inst = parse(
            r#"{
            "connectivity": "node",
            "nodes": ["a", "b"],
            "weights": [0],
            "base_edges": [],
            "candidate_edges": [],
            "demands": [{"s": "a", "t": "b", "r": 1, "penalty": 1}]
        }"#,
        );
        assert!(matches!(
            solve_pcnap(&inst, &SolveConfig::default(), None, None),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn float_mode_agrees_on_small_instance() {
        let inst = crate::corpus::gap_instance(3).unwrap();
        let exact = solve_pcnap(&inst, &SolveConfig::default(), None, None).unwrap();
        let float = solve_pcnap(
            &inst,
            &SolveConfig { float_eps: Some(1e-9), ..Default::default() },
            None,
            None,
        )
        .unwrap();
        assert_eq!(exact.objective, float.objective);
    }
}
