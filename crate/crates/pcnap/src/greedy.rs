//! Greedy spider cover driven by a potential function.
//!
//! Counting min-cores alone can stall: a spider may retire `n` min-cores
//! while `n` new ones appear above them, all sharing the spider's head in
//! their boundaries. The potential `(gamma+1)|M| + sum over M of
//! (gamma - |shared boundary nodes|)` strictly decreases instead, because
//! newly created min-cores pay for the head they now share.

use crate::biset::{mask_nodes, Biset, BisetFamily};
use crate::error::{Error, Result};
use crate::instance::{Instance, WeightAssignment};
use crate::rational::Q;
use crate::spider::{compute_spider, DualState, Spider};
use std::collections::BTreeSet;
use std::io::Write;

/// Boundary nodes of `b` shared with another member of `mincores`.
fn shared_boundary(mincores: &[Biset], b: &Biset) -> u32 {
    mask_nodes(b.boundary())
        .filter(|&v| {
            mincores
                .iter()
                .any(|o| o != b && o.boundary() & (1 << v) != 0)
        })
        .count() as u32
}

/// The potential of a min-core family with boundary bound `gamma`.
pub fn potential(mincores: &BisetFamily, gamma: u32) -> Result<u64> {
    let members = mincores.members();
    if members.iter().any(|b| b.boundary_size() > gamma) {
        return Err(Error::validation("gamma smaller than a member boundary"));
    }
    let mut phi = (gamma as u64 + 1) * members.len() as u64;
    for b in members {
        phi += (gamma - shared_boundary(members, b)) as u64;
    }
    Ok(phi)
}

#[derive(Debug, Clone)]
pub struct PotentialReport {
    pub gamma: u32,
    pub phi_before: u64,
    pub phi_after: u64,
    pub spider_feet: usize,
}

/// Everything observed in one greedy iteration, kept for audits.
#[derive(Debug, Clone)]
pub struct IterationReport {
    pub potential: PotentialReport,
    pub weight_added: Q,
    pub spider: Spider,
    pub laminar: Vec<Biset>,
    pub dual: DualState,
    pub family_before: BisetFamily,
}

impl IterationReport {
    pub fn to_json_line(&self, inst: &Instance) -> serde_json::Value {
        serde_json::json!({
            "phi_before": self.potential.phi_before,
            "phi_after": self.potential.phi_after,
            "feet": self.potential.spider_feet,
            "gamma": self.potential.gamma,
            "weight_added": crate::rational::q_to_json(&self.weight_added),
            "head": inst.node_names[self.spider.head],
        })
    }
}

#[derive(Debug, Clone)]
pub struct CoverResult {
    pub weights: WeightAssignment,
    pub edges: BTreeSet<usize>,
    pub iterations: Vec<IterationReport>,
}

/// Cover every member of an uncrossable family by repeatedly taking the
/// primal-dual spider of the residual family. Weights accumulate by
/// pointwise maximum, which activates the union of all chosen spiders.
pub fn greedy_cover(
    inst: &Instance,
    f: &BisetFamily,
    mut trace: Option<&mut (dyn Write + 'static)>,
) -> Result<CoverResult> {
    let gamma = f.gamma();
    let mut weights = WeightAssignment::zero(inst.n());
    let mut edges: BTreeSet<usize> = BTreeSet::new();
    let mut iterations = Vec::new();
    let mut residual = f.clone();
    while !residual.is_empty() {
        let phi_before = potential(&residual.min_cores(), gamma)?;
        let outcome = compute_spider(inst, &residual, trace.as_deref_mut())?;
        let endpoints = outcome.spider.edge_endpoints();
        let next = residual.residual(&endpoints);
        let phi_after = potential(&next.min_cores(), gamma)?;
        let feet = outcome.spider.feet_count();
        // Integer potentials make the decrease bound at least one per
        // round; a zero drop would mean non-termination, so fail loudly.
        let lemma_bound_twice = if feet == 1 { 2 } else { feet as u64 - 1 };
        if phi_before <= phi_after || 2 * (phi_before - phi_after) < lemma_bound_twice {
            return Err(Error::invariant(format!(
                "potential did not decrease as required: {phi_before} -> {phi_after} with {feet} feet"
            )));
        }
        weights.max_with(&outcome.spider.weights);
        edges.extend(outcome.spider.candidate_indices());
        iterations.push(IterationReport {
            potential: PotentialReport { gamma, phi_before, phi_after, spider_feet: feet },
            weight_added: outcome.spider.weights.total(&inst.weights),
            spider: outcome.spider,
            laminar: outcome.laminar,
            dual: outcome.dual,
            family_before: residual,
        });
        residual = next;
    }
    // The accumulated edge set must cover the whole family.
    let endpoints = inst.candidate_endpoints(&edges.iter().copied().collect::<Vec<_>>());
    if !f.residual(&endpoints).is_empty() {
        return Err(Error::invariant("cover loop ended with uncovered members"));
    }
    // Monotonicity: the max-accumulated weights activate every chosen edge.
    let active = inst.activated_edges(&weights);
    if !edges.iter().all(|e| active.contains(e)) {
        return Err(Error::invariant("accumulated weights fail to activate a chosen edge"));
    }
    Ok(CoverResult { weights, edges, iterations })
}
