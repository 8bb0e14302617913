//! Linear programs of the solver pipeline.
//!
//! Four builders transcribe the covering relaxations over an explicit biset
//! family: the lifted prize-collecting LP (per-min-core edge variables), its
//! penalty-free restriction, the natural relaxation (kept to demonstrate its
//! integrality gap), and the simple per-family LP together with its formal
//! dual. Constraint rows whose edge sum is empty reduce to variable bounds
//! and are not emitted.

mod simplex;

use crate::biset::{mask_nodes, Biset, BisetFamily};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::rational::{q_to_string, Cost, Q};
use num::traits::{One, Signed, Zero};
use std::collections::BTreeMap;

pub use simplex::{solve, solve_float};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Ge,
    Le,
}

#[derive(Debug, Clone)]
pub struct LpRow {
    pub name: String,
    pub coeffs: Vec<(usize, Q)>,
    pub rel: Rel,
    pub rhs: Q,
}

#[derive(Debug, Clone)]
pub struct LPProblem {
    pub name: String,
    pub objective_sense: Objective,
    pub var_names: Vec<String>,
    pub objective: Vec<(usize, Q)>,
    pub rows: Vec<LpRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LPSolution {
    pub status: LpStatus,
    pub objective: Q,
    pub values: BTreeMap<String, Q>,
}

impl LPSolution {
    pub fn value(&self, name: &str) -> Q {
        self.values.get(name).cloned().unwrap_or_else(<Q as Zero>::zero)
    }

    pub fn expect_optimal(self, what: &str) -> Result<LPSolution> {
        match self.status {
            LpStatus::Optimal => Ok(self),
            LpStatus::Infeasible => Err(Error::infeasible(format!("{what} is infeasible"))),
            LpStatus::Unbounded => Err(Error::invariant(format!("{what} is unbounded"))),
        }
    }
}

impl LPProblem {
    pub fn n_vars(&self) -> usize {
        self.var_names.len()
    }

    /// Sparse text dump: NAME/SENSE/VARS/OBJECTIVE/ROWS/MATRIX sections.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("NAME {}\n", self.name));
        out.push_str(match self.objective_sense {
            Objective::Minimize => "SENSE MIN\n",
            Objective::Maximize => "SENSE MAX\n",
        });
        out.push_str(&format!("VARS {}\n", self.var_names.len()));
        for (i, v) in self.var_names.iter().enumerate() {
            out.push_str(&format!("v{i} {v}\n"));
        }
        out.push_str("OBJECTIVE\n");
        for (v, c) in &self.objective {
            out.push_str(&format!("v{v} {}\n", q_to_string(c)));
        }
        out.push_str(&format!("ROWS {}\n", self.rows.len()));
        for (i, r) in self.rows.iter().enumerate() {
            let rel = match r.rel {
                Rel::Ge => "GE",
                Rel::Le => "LE",
            };
            out.push_str(&format!("r{i} {} {rel} {}\n", r.name, q_to_string(&r.rhs)));
        }
        out.push_str("MATRIX\n");
        for (i, r) in self.rows.iter().enumerate() {
            for (v, c) in &r.coeffs {
                out.push_str(&format!("r{i} v{v} {}\n", q_to_string(c)));
            }
        }
        out
    }

    /// Mechanical LP dual of a (minimize, >=, x >= 0) problem.
    pub fn dual(&self) -> Result<LPProblem> {
        if self.objective_sense != Objective::Minimize
            || self.rows.iter().any(|r| r.rel != Rel::Ge)
        {
            return Err(Error::validation(
                "dual construction expects a minimize problem with >= rows",
            ));
        }
        let mut obj_dense = vec![<Q as Zero>::zero(); self.var_names.len()];
        for (v, c) in &self.objective {
            obj_dense[*v] = c.clone();
        }
        let mut cols: Vec<Vec<(usize, Q)>> = vec![Vec::new(); self.var_names.len()];
        for (i, r) in self.rows.iter().enumerate() {
            for (v, c) in &r.coeffs {
                cols[*v].push((i, c.clone()));
            }
        }
        Ok(LPProblem {
            name: format!("dual({})", self.name),
            objective_sense: Objective::Maximize,
            var_names: self.rows.iter().map(|r| r.name.clone()).collect(),
            objective: self
                .rows
                .iter()
                .enumerate()
                .filter(|(_, r)| !r.rhs.is_zero())
                .map(|(i, r)| (i, r.rhs.clone()))
                .collect(),
            rows: self
                .var_names
                .iter()
                .enumerate()
                .map(|(j, name)| LpRow {
                    name: name.clone(),
                    coeffs: cols[j].clone(),
                    rel: Rel::Le,
                    rhs: obj_dense[j].clone(),
                })
                .collect(),
        })
    }
}

struct VarTable {
    names: Vec<String>,
    map: BTreeMap<String, usize>,
}

impl VarTable {
    fn new() -> Self {
        VarTable { names: Vec::new(), map: BTreeMap::new() }
    }

    fn id(&mut self, name: String) -> usize {
        if let Some(&i) = self.map.get(&name) {
            return i;
        }
        let i = self.names.len();
        self.map.insert(name.clone(), i);
        self.names.push(name);
        i
    }
}

pub fn x_var(inst: &Instance, v: usize, widx: usize) -> String {
    format!("x[{},{}]", inst.node_names[v], q_to_string(inst.weights.value(widx)))
}

pub fn y_var(i: usize) -> String {
    format!("y[{i}]")
}

fn xe_var(
    inst: &Instance,
    tail: usize,
    head: usize,
    j: usize,
    jp: usize,
    core: Option<&Biset>,
) -> String {
    let base = format!(
        "xe[{}>{},{},{}",
        inst.node_names[tail],
        inst.node_names[head],
        q_to_string(inst.weights.value(j)),
        q_to_string(inst.weights.value(jp))
    );
    match core {
        Some(c) => format!("{base},{}]", c.format(&inst.node_names)),
        None => format!("{base}]"),
    }
}

fn z_var(inst: &Instance, b: &Biset) -> String {
    format!("z[{}]", b.format(&inst.node_names))
}

fn za_var(inst: &Instance, b: &Biset, v: usize, widx: usize) -> String {
    format!(
        "za[{},{},{}]",
        b.format(&inst.node_names),
        inst.node_names[v],
        q_to_string(inst.weights.value(widx))
    )
}

/// Directed candidate views `(cand, tail, head, true pairs)`.
fn directed_views(inst: &Instance) -> Vec<(usize, usize, usize, Vec<(usize, usize)>)> {
    let mut out = Vec::new();
    for (ci, e) in inst.candidates.iter().enumerate() {
        for (t, h) in [(e.u, e.v), (e.v, e.u)] {
            out.push((ci, t, h, e.directed_pairs(t, h)));
        }
    }
    out
}

fn node_weight_objective(inst: &Instance, vars: &mut VarTable) -> Vec<(usize, Q)> {
    let mut obj = Vec::new();
    for v in 0..inst.n() {
        for j in 0..inst.weights.len() {
            let id = vars.id(x_var(inst, v, j));
            let w = inst.weights.value(j);
            if !w.is_zero() {
                obj.push((id, w.clone()));
            }
        }
    }
    obj
}

fn finite_penalty(penalties: &BTreeMap<usize, Cost>, i: usize) -> Option<Q> {
    match penalties.get(&i) {
        Some(Cost::Finite(p)) => Some(p.clone()),
        // An unbounded penalty pins y(i) to zero, which omits the variable.
        Some(Cost::Infinite) | None => None,
    }
}

/// The lifted prize-collecting LP over an uncrossable family: edge variables
/// are replicated per min-core, and node variables dominate the per-member
/// edge sums on both sides.
pub fn build_pclp(
    inst: &Instance,
    f: &BisetFamily,
    penalties: &BTreeMap<usize, Cost>,
) -> Result<LPProblem> {
    build_lifted(inst, f, Some(penalties), "pclp")
}

/// The lifted LP with every `y` fixed to zero.
pub fn build_npclp(inst: &Instance, f: &BisetFamily) -> Result<LPProblem> {
    build_lifted(inst, f, None, "npclp")
}

fn build_lifted(
    inst: &Instance,
    f: &BisetFamily,
    penalties: Option<&BTreeMap<usize, Cost>>,
    name: &str,
) -> Result<LPProblem> {
    if f.is_empty() {
        return Err(Error::validation("family is empty"));
    }
    let min_cores = f.min_cores();
    let views = directed_views(inst);
    let mut vars = VarTable::new();
    let mut objective = node_weight_objective(inst, &mut vars);
    let mut rows: Vec<LpRow> = Vec::new();

    let mut y_ids: BTreeMap<usize, usize> = BTreeMap::new();
    if let Some(pen) = penalties {
        for i in f.demand_indices() {
            if let Some(p) = finite_penalty(pen, i) {
                let id = vars.id(y_var(i));
                if !p.is_zero() {
                    objective.push((id, p));
                }
                y_ids.insert(i, id);
            }
        }
    }

    for core in min_cores.members() {
        for (b, labels) in f.members().iter().zip(f.labels()) {
            if !core.is_subset(b) {
                continue;
            }
            // Covering rows per labeled demand.
            let mut edge_terms: Vec<(usize, Q)> = Vec::new();
            for (_, t, h, pairs) in &views {
                if !b.covers_directed(*t, *h) {
                    continue;
                }
                for &(j, jp) in pairs {
                    let id = vars.id(xe_var(inst, *t, *h, j, jp, Some(core)));
                    edge_terms.push((id, Q::one()));
                }
            }
            for &i in labels {
                let mut coeffs = edge_terms.clone();
                if let Some(&yid) = y_ids.get(&i) {
                    coeffs.push((yid, Q::one()));
                }
                rows.push(LpRow {
                    name: format!(
                        "c1[{},{},{}]",
                        core.format(&inst.node_names),
                        i,
                        b.format(&inst.node_names)
                    ),
                    coeffs,
                    rel: Rel::Ge,
                    rhs: Q::one(),
                });
            }
            // Tail-side bounds: x(u,j) dominates the member's out-sum.
            for u in mask_nodes(!b.outer() & crate::biset::full_mask(inst.n())) {
                for j in 0..inst.weights.len() {
                    let mut coeffs: Vec<(usize, Q)> = Vec::new();
                    for (_, t, h, pairs) in &views {
                        if *t != u || !b.covers_directed(*t, *h) {
                            continue;
                        }
                        for &(pj, pjp) in pairs {
                            if pj != j {
                                continue;
                            }
                            let id = vars.id(xe_var(inst, *t, *h, pj, pjp, Some(core)));
                            coeffs.push((id, -<Q as One>::one()));
                        }
                    }
                    if coeffs.is_empty() {
                        continue;
                    }
                    coeffs.push((vars.id(x_var(inst, u, j)), Q::one()));
                    rows.push(LpRow {
                        name: format!(
                            "c2[{},{},{},{}]",
                            core.format(&inst.node_names),
                            b.format(&inst.node_names),
                            inst.node_names[u],
                            q_to_string(inst.weights.value(j))
                        ),
                        coeffs,
                        rel: Rel::Ge,
                        rhs: <Q as Zero>::zero(),
                    });
                }
            }
            // Head-side bounds.
            for v in mask_nodes(b.inner()) {
                for jp in 0..inst.weights.len() {
                    let mut coeffs: Vec<(usize, Q)> = Vec::new();
                    for (_, t, h, pairs) in &views {
                        if *h != v || !b.covers_directed(*t, *h) {
                            continue;
                        }
                        for &(pj, pjp) in pairs {
                            if pjp != jp {
                                continue;
                            }
                            let id = vars.id(xe_var(inst, *t, *h, pj, pjp, Some(core)));
                            coeffs.push((id, -<Q as One>::one()));
                        }
                    }
                    if coeffs.is_empty() {
                        continue;
                    }
                    coeffs.push((vars.id(x_var(inst, v, jp)), Q::one()));
                    rows.push(LpRow {
                        name: format!(
                            "c3[{},{},{},{}]",
                            core.format(&inst.node_names),
                            b.format(&inst.node_names),
                            inst.node_names[v],
                            q_to_string(inst.weights.value(jp))
                        ),
                        coeffs,
                        rel: Rel::Ge,
                        rhs: <Q as Zero>::zero(),
                    });
                }
            }
        }
    }

    Ok(LPProblem {
        name: name.to_string(),
        objective_sense: Objective::Minimize,
        var_names: vars.names,
        objective,
        rows,
    })
}

/// The natural relaxation with plain edge variables; kept to demonstrate the
/// integrality gap the lifted LP closes.
pub fn build_natural_lp(
    inst: &Instance,
    f: &BisetFamily,
    penalties: &BTreeMap<usize, Cost>,
) -> Result<LPProblem> {
    if f.is_empty() {
        return Err(Error::validation("family is empty"));
    }
    let views = directed_views(inst);
    let mut vars = VarTable::new();
    let mut objective = node_weight_objective(inst, &mut vars);
    let mut rows: Vec<LpRow> = Vec::new();

    let mut y_ids: BTreeMap<usize, usize> = BTreeMap::new();
    for i in f.demand_indices() {
        if let Some(p) = finite_penalty(penalties, i) {
            let id = vars.id(y_var(i));
            if !p.is_zero() {
                objective.push((id, p));
            }
            y_ids.insert(i, id);
        }
    }

    for (b, labels) in f.members().iter().zip(f.labels()) {
        let mut edge_terms: Vec<(usize, Q)> = Vec::new();
        for (_, t, h, pairs) in &views {
            if !b.covers_directed(*t, *h) {
                continue;
            }
            for &(j, jp) in pairs {
                edge_terms.push((vars.id(xe_var(inst, *t, *h, j, jp, None)), Q::one()));
            }
        }
        for &i in labels {
            let mut coeffs = edge_terms.clone();
            if let Some(&yid) = y_ids.get(&i) {
                coeffs.push((yid, Q::one()));
            }
            rows.push(LpRow {
                name: format!("c1[{},{}]", i, b.format(&inst.node_names)),
                coeffs,
                rel: Rel::Ge,
                rhs: Q::one(),
            });
        }
    }
    for (_, t, h, pairs) in &views {
        for &(j, jp) in pairs {
            let xe = vars.id(xe_var(inst, *t, *h, j, jp, None));
            let xt = vars.id(x_var(inst, *t, j));
            let xh = vars.id(x_var(inst, *h, jp));
            let en = format!(
                "{}>{},{},{}",
                inst.node_names[*t],
                inst.node_names[*h],
                q_to_string(inst.weights.value(j)),
                q_to_string(inst.weights.value(jp))
            );
            rows.push(LpRow {
                name: format!("c2[{en}]"),
                coeffs: vec![(xt, Q::one()), (xe, -<Q as One>::one())],
                rel: Rel::Ge,
                rhs: <Q as Zero>::zero(),
            });
            rows.push(LpRow {
                name: format!("c3[{en}]"),
                coeffs: vec![(xh, Q::one()), (xe, -<Q as One>::one())],
                rel: Rel::Ge,
                rhs: <Q as Zero>::zero(),
            });
        }
    }

    Ok(LPProblem {
        name: "natural".to_string(),
        objective_sense: Objective::Minimize,
        var_names: vars.names,
        objective,
        rows,
    })
}

/// The simple covering LP over a family, with split in/out node variables.
pub fn build_simplelp(inst: &Instance, f: &BisetFamily) -> Result<LPProblem> {
    if f.is_empty() {
        return Err(Error::validation("family is empty"));
    }
    let views = directed_views(inst);
    let mut vars = VarTable::new();
    let mut objective: Vec<(usize, Q)> = Vec::new();
    let xin = |inst: &Instance, v: usize, j: usize| {
        format!("xin[{},{}]", inst.node_names[v], q_to_string(inst.weights.value(j)))
    };
    let xout = |inst: &Instance, v: usize, j: usize| {
        format!("xout[{},{}]", inst.node_names[v], q_to_string(inst.weights.value(j)))
    };
    for v in 0..inst.n() {
        for j in 0..inst.weights.len() {
            let win = vars.id(xin(inst, v, j));
            let wout = vars.id(xout(inst, v, j));
            let w = inst.weights.value(j);
            if !w.is_zero() {
                objective.push((win, w.clone()));
                objective.push((wout, w.clone()));
            }
        }
    }
    let mut rows: Vec<LpRow> = Vec::new();
    for b in f.members() {
        let mut coeffs: Vec<(usize, Q)> = Vec::new();
        for (_, t, h, pairs) in &views {
            if !b.covers_directed(*t, *h) {
                continue;
            }
            for &(j, jp) in pairs {
                coeffs.push((vars.id(xe_var(inst, *t, *h, j, jp, None)), Q::one()));
            }
        }
        rows.push(LpRow {
            name: format!("c1[{}]", b.format(&inst.node_names)),
            coeffs,
            rel: Rel::Ge,
            rhs: Q::one(),
        });
        for u in mask_nodes(!b.outer() & crate::biset::full_mask(inst.n())) {
            for j in 0..inst.weights.len() {
                let mut coeffs: Vec<(usize, Q)> = Vec::new();
                for (_, t, h, pairs) in &views {
                    if *t != u || !b.covers_directed(*t, *h) {
                        continue;
                    }
                    for &(pj, pjp) in pairs {
                        if pj == j {
                            coeffs.push((
                                vars.id(xe_var(inst, *t, *h, pj, pjp, None)),
                                -<Q as One>::one(),
                            ));
                        }
                    }
                }
                if coeffs.is_empty() {
                    continue;
                }
                coeffs.push((vars.id(xout(inst, u, j)), Q::one()));
                rows.push(LpRow {
                    name: format!(
                        "c2[{},{},{}]",
                        b.format(&inst.node_names),
                        inst.node_names[u],
                        q_to_string(inst.weights.value(j))
                    ),
                    coeffs,
                    rel: Rel::Ge,
                    rhs: <Q as Zero>::zero(),
                });
            }
        }
        for v in mask_nodes(b.inner()) {
            for jp in 0..inst.weights.len() {
                let mut coeffs: Vec<(usize, Q)> = Vec::new();
                for (_, t, h, pairs) in &views {
                    if *h != v || !b.covers_directed(*t, *h) {
                        continue;
                    }
                    for &(pj, pjp) in pairs {
                        if pjp == jp {
                            coeffs.push((
                                vars.id(xe_var(inst, *t, *h, pj, pjp, None)),
                                -<Q as One>::one(),
                            ));
                        }
                    }
                }
                if coeffs.is_empty() {
                    continue;
                }
                coeffs.push((vars.id(xin(inst, v, jp)), Q::one()));
                rows.push(LpRow {
                    name: format!(
                        "c3[{},{},{}]",
                        b.format(&inst.node_names),
                        inst.node_names[v],
                        q_to_string(inst.weights.value(jp))
                    ),
                    coeffs,
                    rel: Rel::Ge,
                    rhs: <Q as Zero>::zero(),
                });
            }
        }
    }

    Ok(LPProblem {
        name: "simplelp".to_string(),
        objective_sense: Objective::Minimize,
        var_names: vars.names,
        objective,
        rows,
    })
}

/// The formal dual of [`build_simplelp`], transcribed directly: maximize the
/// per-member totals subject to per-tuple balance and per-node weight caps.
pub fn build_simpledual(inst: &Instance, f: &BisetFamily) -> Result<LPProblem> {
    if f.is_empty() {
        return Err(Error::validation("family is empty"));
    }
    let views = directed_views(inst);
    let mut vars = VarTable::new();
    let mut objective: Vec<(usize, Q)> = Vec::new();
    for b in f.members() {
        let id = vars.id(z_var(inst, b));
        objective.push((id, Q::one()));
    }
    let mut rows: Vec<LpRow> = Vec::new();
    for (_, t, h, pairs) in &views {
        let covering: Vec<&Biset> =
            f.members().iter().filter(|b| b.covers_directed(*t, *h)).collect();
        if covering.is_empty() {
            continue;
        }
        for &(j, jp) in pairs {
            let mut coeffs: Vec<(usize, Q)> = Vec::new();
            for b in &covering {
                coeffs.push((vars.id(z_var(inst, b)), Q::one()));
                coeffs.push((vars.id(za_var(inst, b, *t, j)), -<Q as One>::one()));
                coeffs.push((vars.id(za_var(inst, b, *h, jp)), -<Q as One>::one()));
            }
            rows.push(LpRow {
                name: format!(
                    "c1[{}>{},{},{}]",
                    inst.node_names[*t],
                    inst.node_names[*h],
                    q_to_string(inst.weights.value(j)),
                    q_to_string(inst.weights.value(jp))
                ),
                coeffs,
                rel: Rel::Le,
                rhs: <Q as Zero>::zero(),
            });
        }
    }
    // Weight caps: head-side over members with v inside, tail-side over
    // members with v strictly outside.
    for v in 0..inst.n() {
        for j in 0..inst.weights.len() {
            let mut in_terms: Vec<(usize, Q)> = Vec::new();
            let mut out_terms: Vec<(usize, Q)> = Vec::new();
            for b in f.members() {
                let name = za_var(inst, b, v, j);
                if !vars.map.contains_key(&name) {
                    continue;
                }
                let id = vars.id(name);
                if b.inner() & (1 << v) != 0 {
                    in_terms.push((id, Q::one()));
                } else if b.outer() & (1 << v) == 0 {
                    out_terms.push((id, Q::one()));
                }
            }
            for (tag, terms) in [("c3", in_terms), ("c3'", out_terms)] {
                if terms.is_empty() {
                    continue;
                }
                rows.push(LpRow {
                    name: format!(
                        "{tag}[{},{}]",
                        inst.node_names[v],
                        q_to_string(inst.weights.value(j))
                    ),
                    coeffs: terms,
                    rel: Rel::Le,
                    rhs: inst.weights.value(j).clone(),
                });
            }
        }
    }

    Ok(LPProblem {
        name: "simpledual".to_string(),
        objective_sense: Objective::Maximize,
        var_names: vars.names,
        objective,
        rows,
    })
}

/// Direct feasibility check of a dual state against a laminar core family:
/// per-tuple balance, per-node weight caps, and non-negativity.
pub fn check_dual_feasible(
    inst: &Instance,
    laminar: &[Biset],
    z_core: &BTreeMap<Biset, Q>,
    z_aux: &BTreeMap<(Biset, usize, usize), Q>,
) -> bool {
    let zero = <Q as Zero>::zero();
    if z_core.values().any(|q| q.is_negative()) || z_aux.values().any(|q| q.is_negative()) {
        return false;
    }
    for e in &inst.candidates {
        for (t, h) in [(e.u, e.v), (e.v, e.u)] {
            let covering: Vec<&Biset> =
                laminar.iter().filter(|b| b.covers_directed(t, h)).collect();
            if covering.is_empty() {
                continue;
            }
            for (j, jp) in e.directed_pairs(t, h) {
                let mut lhs = zero.clone();
                let mut rhs = zero.clone();
                for b in &covering {
                    if let Some(z) = z_core.get(b) {
                        lhs += z;
                    }
                    if let Some(z) = z_aux.get(&(**b, t, j)) {
                        rhs += z;
                    }
                    if let Some(z) = z_aux.get(&(**b, h, jp)) {
                        rhs += z;
                    }
                }
                if lhs > rhs {
                    return false;
                }
            }
        }
    }
    for v in 0..inst.n() {
        for j in 0..inst.weights.len() {
            let cap = inst.weights.value(j);
            let mut in_sum = zero.clone();
            let mut out_sum = zero.clone();
            for b in laminar {
                if let Some(z) = z_aux.get(&(*b, v, j)) {
                    if b.inner() & (1 << v) != 0 {
                        in_sum += z;
                    } else if b.outer() & (1 << v) == 0 {
                        out_sum += z;
                    }
                }
            }
            if &in_sum > cap || &out_sum > cap {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q_int, q_ratio};

    fn tiny(
        name: &str,
        sense: Objective,
        vars: &[&str],
        obj: &[(usize, i64)],
        rows: Vec<(Vec<(usize, i64)>, Rel, i64)>,
    ) -> LPProblem {
        LPProblem {
            name: name.into(),
            objective_sense: sense,
            var_names: vars.iter().map(|s| s.to_string()).collect(),
            objective: obj.iter().map(|&(v, c)| (v, q_int(c))).collect(),
            rows: rows
                .into_iter()
                .enumerate()
                .map(|(i, (coeffs, rel, rhs))| LpRow {
                    name: format!("r{i}"),
                    coeffs: coeffs.into_iter().map(|(v, c)| (v, q_int(c))).collect(),
                    rel,
                    rhs: q_int(rhs),
                })
                .collect(),
        }
    }

    #[test]
    fn minimize_single_bound() {
        let p = tiny("t", Objective::Minimize, &["x"], &[(0, 1)], vec![(vec![(0, 1)], Rel::Ge, 3)]);
        let s = solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.objective, q_int(3));
        assert_eq!(s.value("x"), q_int(3));
    }

    #[test]
    fn infeasible_pair() {
        let p = tiny(
            "t",
            Objective::Minimize,
            &["x"],
            &[(0, 1)],
            vec![(vec![(0, 1)], Rel::Ge, 1), (vec![(0, -1)], Rel::Ge, 0)],
        );
        assert_eq!(solve(&p).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_direction() {
        let p = tiny("t", Objective::Minimize, &["x"], &[(0, -1)], vec![(vec![(0, 1)], Rel::Ge, 0)]);
        assert_eq!(solve(&p).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn fractional_optimum() {
        // min x+y s.t. 2x+y >= 1, x+2y >= 1 has optimum x = y = 1/3.
        let p = tiny(
            "t",
            Objective::Minimize,
            &["x", "y"],
            &[(0, 1), (1, 1)],
            vec![
                (vec![(0, 2), (1, 1)], Rel::Ge, 1),
                (vec![(0, 1), (1, 2)], Rel::Ge, 1),
            ],
        );
        let s = solve(&p).unwrap();
        assert_eq!(s.objective, q_ratio(2, 3));
        assert_eq!(s.value("x"), q_ratio(1, 3));
    }

    #[test]
    fn maximize_with_le_rows() {
        let p = tiny(
            "t",
            Objective::Maximize,
            &["x", "y"],
            &[(0, 3), (1, 2)],
            vec![
                (vec![(0, 1), (1, 1)], Rel::Le, 4),
                (vec![(0, 1)], Rel::Le, 2),
            ],
        );
        let s = solve(&p).unwrap();
        assert_eq!(s.objective, q_int(10));
    }

    #[test]
    fn beale_cycling_example_terminates() {
        // Classic cycling LP for naive pivot rules; the Bland fallback must
        // terminate at optimum -1/20.
        let p = LPProblem {
            name: "beale".into(),
            objective_sense: Objective::Minimize,
            var_names: ["x1", "x2", "x3", "x4"].iter().map(|s| s.to_string()).collect(),
            objective: vec![
                (0, q_ratio(-3, 4)),
                (1, q_int(150)),
                (2, q_ratio(-1, 50)),
                (3, q_int(6)),
            ],
            rows: vec![
                LpRow {
                    name: "r1".into(),
                    coeffs: vec![
                        (0, q_ratio(1, 4)),
                        (1, q_int(-60)),
                        (2, q_ratio(-1, 25)),
                        (3, q_int(9)),
                    ],
                    rel: Rel::Le,
                    rhs: q_int(0),
                },
                LpRow {
                    name: "r2".into(),
                    coeffs: vec![
                        (0, q_ratio(1, 2)),
                        (1, q_int(-90)),
                        (2, q_ratio(-1, 50)),
                        (3, q_int(3)),
                    ],
                    rel: Rel::Le,
                    rhs: q_int(0),
                },
                LpRow { name: "r3".into(), coeffs: vec![(2, q_int(1))], rel: Rel::Le, rhs: q_int(1) },
            ],
        };
        let s = solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.objective, q_ratio(-1, 20));
    }

    #[test]
    fn duality_on_random_problems() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let n = rng.gen_range(1..5);
            let m = rng.gen_range(1..6);
            let vars: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
            let p = LPProblem {
                name: "rand".into(),
                objective_sense: Objective::Minimize,
                var_names: vars,
                objective: (0..n).map(|i| (i, q_int(rng.gen_range(0..5)))).collect(),
                rows: (0..m)
                    .map(|r| LpRow {
                        name: format!("r{r}"),
                        coeffs: (0..n)
                            .filter_map(|i| {
                                let c = rng.gen_range(-2..4);
                                (c != 0).then(|| (i, q_int(c)))
                            })
                            .collect(),
                        rel: Rel::Ge,
                        rhs: q_int(rng.gen_range(-2..4)),
                    })
                    .collect(),
            };
            let ps = solve(&p).unwrap();
            let ds = solve(&p.dual().unwrap()).unwrap();
            match (ps.status, ds.status) {
                (LpStatus::Optimal, LpStatus::Optimal) => assert_eq!(ps.objective, ds.objective),
                (LpStatus::Infeasible, s) => {
                    assert!(matches!(s, LpStatus::Unbounded | LpStatus::Infeasible))
                }
                (LpStatus::Unbounded, s) => assert_eq!(s, LpStatus::Infeasible),
                _ => {}
            }
            if ps.status == LpStatus::Optimal {
                let fs = solve_float(&p, 1e-9).unwrap();
                assert_eq!(fs.status, LpStatus::Optimal);
                use num::traits::ToPrimitive;
                let exact = ps.objective.to_f64().unwrap();
                let approx = fs.objective.to_f64().unwrap();
                assert!((exact - approx).abs() < 1e-6, "{exact} vs {approx}");
            }
        }
    }
}
