//! Exponential-time exact solvers used as ground truth.
//!
//! Enumeration is pruned by dominance: monotone activation means a node
//! weight is only ever useful when it matches a coordinate of some minimal
//! activation pair of an incident edge, so only those values (plus zero)
//! are candidates. The search space is partitioned by the first node's
//! candidate and reduced by an order-total minimum, so the parallel and
//! sequential paths return identical results.

use crate::biset::BisetFamily;
use crate::error::{Error, Result};
use crate::instance::{Instance, WeightAssignment};
use crate::rational::Cost;
use std::collections::BTreeSet;

pub const DEFAULT_ORACLE_CAP: u64 = 10_000_000;

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub optimum: Cost,
    pub witness: WeightAssignment,
    pub satisfied: BTreeSet<usize>,
}

impl OracleResult {
    pub fn to_json(&self, inst: &Instance) -> serde_json::Value {
        serde_json::json!({
            "optimum": self.optimum.to_json(),
            "witness": self.witness.to_json(inst),
            "satisfied": self.satisfied.iter().collect::<Vec<_>>(),
        })
    }
}

/// Weight indices worth trying per node: 0 plus the coordinates of minimal
/// activation pairs of incident candidate edges.
fn candidate_weights(inst: &Instance) -> Vec<Vec<usize>> {
    let mut cands: Vec<BTreeSet<usize>> = vec![[0].into_iter().collect(); inst.n()];
    for e in &inst.candidates {
        for (i, j) in e.table.minimal_pairs() {
            cands[e.u].insert(i);
            cands[e.v].insert(j);
        }
    }
    cands.into_iter().map(|s| s.into_iter().collect()).collect()
}

fn search_size(cands: &[Vec<usize>]) -> u64 {
    cands.iter().fold(1u64, |acc, c| acc.saturating_mul(c.len() as u64))
}

/// Enumerate all assignments with the first node's weight fixed, calling
/// `eval` on each; returns the minimum of `(score, assignment)`.
fn enumerate_with_first<F>(
    inst: &Instance,
    cands: &[Vec<usize>],
    first: usize,
    eval: &F,
) -> Result<Option<(Cost, WeightAssignment)>>
where
    F: Fn(&Instance, &WeightAssignment) -> Result<Option<Cost>>,
{
    let n = inst.n();
    let mut pick = vec![0usize; n];
    pick[0] = first;
    let mut best: Option<(Cost, WeightAssignment)> = None;
    loop {
        let w = WeightAssignment { idx: (0..n).map(|v| cands[v][pick[v]]).collect() };
        if let Some(score) = eval(inst, &w)? {
            let entry = (score, w);
            if best.as_ref().map(|b| entry < *b).unwrap_or(true) {
                best = Some(entry);
            }
        }
        // Odometer over nodes 1..n.
        let mut v = 1;
        loop {
            if v >= n {
                return Ok(best);
            }
            pick[v] += 1;
            if pick[v] < cands[v].len() {
                break;
            }
            pick[v] = 0;
            v += 1;
        }
    }
}

fn enumerate<F>(
    inst: &Instance,
    cap: u64,
    eval: F,
) -> Result<Option<(Cost, WeightAssignment)>>
where
    F: Fn(&Instance, &WeightAssignment) -> Result<Option<Cost>> + Sync + Send,
{
    let cands = candidate_weights(inst);
    let size = search_size(&cands);
    if size > cap {
        return Err(Error::cap(format!(
            "oracle search space {size} exceeds the cap of {cap}"
        )));
    }
    let firsts: Vec<usize> = (0..cands[0].len()).collect();
    let parts: Vec<Result<Option<(Cost, WeightAssignment)>>> =
        crate::par::map_vec(firsts, |first| enumerate_with_first(inst, &cands, first, &eval));
    let mut best: Option<(Cost, WeightAssignment)> = None;
    for part in parts {
        if let Some(found) = part? {
            if best.as_ref().map(|b| found < *b).unwrap_or(true) {
                best = Some(found);
            }
        }
    }
    Ok(best)
}

fn enumerate_serial<F>(
    inst: &Instance,
    cap: u64,
    eval: F,
) -> Result<Option<(Cost, WeightAssignment)>>
where
    F: Fn(&Instance, &WeightAssignment) -> Result<Option<Cost>>,
{
    let cands = candidate_weights(inst);
    let size = search_size(&cands);
    if size > cap {
        return Err(Error::cap(format!(
            "oracle search space {size} exceeds the cap of {cap}"
        )));
    }
    let mut best: Option<(Cost, WeightAssignment)> = None;
    for first in 0..cands[0].len() {
        if let Some(found) = enumerate_with_first(inst, &cands, first, &eval)? {
            if best.as_ref().map(|b| found < *b).unwrap_or(true) {
                best = Some(found);
            }
        }
    }
    Ok(best)
}

fn pcnap_eval(inst: &Instance, w: &WeightAssignment) -> Result<Option<Cost>> {
    Ok(Some(inst.objective_value(w)?))
}

fn finish_pcnap(inst: &Instance, best: Option<(Cost, WeightAssignment)>) -> Result<OracleResult> {
    let (optimum, witness) = best.ok_or_else(|| Error::invariant("empty search space"))?;
    // The witness must reproduce the reported optimum.
    let check = inst.objective_value(&witness)?;
    if check != optimum {
        return Err(Error::invariant("oracle witness does not reproduce its optimum"));
    }
    let graph = inst.graph_with(&inst.activated_edges(&witness));
    let satisfied = inst.satisfied_demands(&graph)?;
    Ok(OracleResult { optimum, witness, satisfied })
}

/// Exact minimum of the objective over all assignments.
pub fn brute_force_pcnap(inst: &Instance, cap: u64) -> Result<OracleResult> {
    finish_pcnap(inst, enumerate(inst, cap, pcnap_eval)?)
}

/// Sequential reference path for [`brute_force_pcnap`].
pub fn brute_force_pcnap_serial(inst: &Instance, cap: u64) -> Result<OracleResult> {
    finish_pcnap(inst, enumerate_serial(inst, cap, pcnap_eval)?)
}

fn cover_eval(f: &BisetFamily) -> impl Fn(&Instance, &WeightAssignment) -> Result<Option<Cost>> + Sync + Send + '_ {
    move |inst, w| {
        let endpoints = inst.candidate_endpoints(&inst.activated_edges(w));
        if f.residual(&endpoints).is_empty() {
            Ok(Some(Cost::Finite(w.total(&inst.weights))))
        } else {
            Ok(None)
        }
    }
}

fn finish_cover(
    inst: &Instance,
    best: Option<(Cost, WeightAssignment)>,
) -> Result<OracleResult> {
    match best {
        Some((optimum, witness)) => {
            Ok(OracleResult { optimum, witness, satisfied: BTreeSet::new() })
        }
        None => Ok(OracleResult {
            optimum: Cost::Infinite,
            witness: WeightAssignment::zero(inst.n()),
            satisfied: BTreeSet::new(),
        }),
    }
}

/// Exact minimum total weight whose activated edges cover every family
/// member; infinite when no assignment covers the family.
pub fn brute_force_cover(inst: &Instance, f: &BisetFamily, cap: u64) -> Result<OracleResult> {
    finish_cover(inst, enumerate(inst, cap, cover_eval(f))?)
}

pub fn brute_force_cover_serial(
    inst: &Instance,
    f: &BisetFamily,
    cap: u64,
) -> Result<OracleResult> {
    finish_cover(inst, enumerate_serial(inst, cap, cover_eval(f))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biset::Biset;
    use crate::corpus::gap_instance;
    use crate::rational::q_int;

    #[test]
    fn gap_instance_optimum_is_one() {
        let inst = gap_instance(5).unwrap();
        let r = brute_force_pcnap(&inst, DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(r.optimum, Cost::Finite(q_int(1)));
        assert_eq!(r.satisfied.len(), 1);
        let s = brute_force_pcnap_serial(&inst, DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(s.optimum, r.optimum);
        assert_eq!(s.witness, r.witness);
    }

    #[test]
    fn no_demands_means_zero() {
        let (inst, _) = crate::corpus::potential_demo(2);
        let r = brute_force_pcnap(&inst, DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(r.optimum, Cost::Finite(q_int(0)));
    }

    #[test]
    fn zero_penalties_mean_zero() {
        let doc = r#"{
            "connectivity": "edge",
            "nodes": ["a", "b"],
            "weights": [0, 1],
            "base_edges": [],
            "candidate_edges": [{"ends": ["a", "b"], "activation": [[1, 1]]}],
            "demands": [{"s": "a", "t": "b", "r": 1, "penalty": 0}]
        }"#;
        let inst = Instance::parse(doc).unwrap();
        let r = brute_force_pcnap(&inst, DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(r.optimum, Cost::Finite(q_int(0)));
    }

    #[test]
    fn cover_oracle_forced_pair() {
        let doc = r#"{
            "connectivity": "edge",
            "nodes": ["a", "b"],
            "weights": [0, 1],
            "base_edges": [],
            "candidate_edges": [{"ends": ["a", "b"], "activation": [[1, 1]]}],
            "demands": []
        }"#;
        let inst = Instance::parse(doc).unwrap();
        let f = BisetFamily::synthetic(2, vec![Biset::plain(0b10)]);
        let r = brute_force_cover(&inst, &f, DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(r.optimum, Cost::Finite(q_int(2)));
        // Empty family costs nothing.
        let empty = BisetFamily::synthetic(2, vec![]);
        let r = brute_force_cover(&inst, &empty, DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(r.optimum, Cost::Finite(q_int(0)));
        // An uncoverable member reports an unbounded optimum.
        let bad = BisetFamily::synthetic(2, vec![Biset::new(0b01, 0b11).unwrap()]);
        let r = brute_force_cover(&inst, &bad, DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(r.optimum, Cost::Infinite);
    }

    #[test]
    fn cap_is_enforced() {
        let inst = gap_instance(5).unwrap();
        assert!(matches!(
            brute_force_pcnap(&inst, 1),
            Err(Error::CapExceeded(_))
        ));
    }
}
