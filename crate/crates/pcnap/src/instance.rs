//! Immutable instance model: weight sets, monotone activation relations,
//! demands with penalties, and the activation semantics.
//!
//! Instances are read from a JSON document (see the README for the schema).
//! Weights and penalties are exact rationals; integers may be written as
//! JSON numbers, other rationals as `"p/q"` strings, and an unbounded
//! penalty as `"inf"`. Activation relations are given as lists of true
//! weight pairs and closed upward by the parser; they are stored as full
//! truth tables over `W x W`.

use crate::connectivity;
use crate::error::{Error, Result};
use crate::rational::{q_from_json, q_to_json, Cost, Q};
use num::traits::{Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Cap on `|W|`; truth tables stay at most 256 bits per edge.
pub const WEIGHT_SET_CAP: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ConnectivityKind {
    Edge,
    Element,
    Node,
}

impl ConnectivityKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ConnectivityKind::Edge => "edge",
            ConnectivityKind::Element => "element",
            ConnectivityKind::Node => "node",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "edge" => Ok(ConnectivityKind::Edge),
            "element" => Ok(ConnectivityKind::Element),
            "node" => Ok(ConnectivityKind::Node),
            other => Err(Error::parse(format!("unknown connectivity kind {other:?}"))),
        }
    }
}

impl fmt::Display for ConnectivityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Sorted set of available node weights; always contains 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightSet {
    values: Vec<Q>,
}

impl WeightSet {
    pub fn new(mut values: Vec<Q>) -> Result<Self> {
        values.sort();
        values.dedup();
        if values.len() > WEIGHT_SET_CAP {
            return Err(Error::validation(format!(
                "weight set larger than the cap of {WEIGHT_SET_CAP}"
            )));
        }
        if values.first().map(|v| !v.is_zero()).unwrap_or(true) {
            return Err(Error::validation("weight set must contain 0"));
        }
        if values.iter().any(|v| v.is_negative()) {
            return Err(Error::validation("weights must be non-negative"));
        }
        Ok(WeightSet { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, idx: usize) -> &Q {
        &self.values[idx]
    }

    pub fn values(&self) -> &[Q] {
        &self.values
    }

    pub fn index_of(&self, q: &Q) -> Option<usize> {
        self.values.binary_search(q).ok()
    }
}

/// Truth table of a monotone activation relation over `W x W`, stored for
/// the edge's canonical orientation (lower node id first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActivationTable {
    dim: usize,
    bits: Vec<bool>,
}

impl ActivationTable {
    /// Build from true pairs (indices into `W`), closing upward.
    pub fn from_pairs(dim: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut bits = vec![false; dim * dim];
        for &(i, j) in pairs {
            if i >= dim || j >= dim {
                return Err(Error::validation("activation pair outside the weight set"));
            }
            for a in i..dim {
                for b in j..dim {
                    bits[a * dim + b] = true;
                }
            }
        }
        Ok(ActivationTable { dim, bits })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn holds(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.dim + j]
    }

    pub fn is_never_active(&self) -> bool {
        self.bits.iter().all(|b| !b)
    }

    /// The antichain of minimal true pairs.
    pub fn minimal_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.dim {
            for j in 0..self.dim {
                if self.holds(i, j)
                    && (i == 0 || !self.holds(i - 1, j))
                    && (j == 0 || !self.holds(i, j - 1))
                {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Exhaustive monotonicity check: every true pair dominates upward.
    pub fn is_monotone(&self) -> bool {
        for i in 0..self.dim {
            for j in 0..self.dim {
                if self.holds(i, j) {
                    if i + 1 < self.dim && !self.holds(i + 1, j) {
                        return false;
                    }
                    if j + 1 < self.dim && !self.holds(i, j + 1) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Candidate edge with its activation relation; `u < v` canonically.
#[derive(Debug, Clone)]
pub struct CandidateEdge {
    pub u: usize,
    pub v: usize,
    pub table: ActivationTable,
}

impl CandidateEdge {
    /// Truth of the relation for the directed view `tail -> head`.
    pub fn holds_directed(&self, tail: usize, head: usize, tail_w: usize, head_w: usize) -> bool {
        if tail == self.u && head == self.v {
            self.table.holds(tail_w, head_w)
        } else {
            debug_assert!(tail == self.v && head == self.u);
            self.table.holds(head_w, tail_w)
        }
    }

    /// True weight pairs `(tail_w, head_w)` of the directed view.
    pub fn directed_pairs(&self, tail: usize, head: usize) -> Vec<(usize, usize)> {
        let dim = self.table.dim();
        let mut out = Vec::new();
        for a in 0..dim {
            for b in 0..dim {
                if self.holds_directed(tail, head, a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct Demand {
    pub s: usize,
    pub t: usize,
    pub requirement: u32,
    pub penalty: Cost,
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub node_names: Vec<String>,
    pub base_edges: Vec<(usize, usize)>,
    pub candidates: Vec<CandidateEdge>,
    pub weights: WeightSet,
    pub demands: Vec<Demand>,
    pub kind: ConnectivityKind,
}

/// Total weight assignment, stored as indices into the weight set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct WeightAssignment {
    pub idx: Vec<usize>,
}

impl WeightAssignment {
    pub fn zero(n: usize) -> Self {
        WeightAssignment { idx: vec![0; n] }
    }

    pub fn total(&self, ws: &WeightSet) -> Q {
        self.idx.iter().map(|&i| ws.value(i).clone()).sum()
    }

    pub fn value<'a>(&self, ws: &'a WeightSet, v: usize) -> &'a Q {
        ws.value(self.idx[v])
    }

    /// Pointwise maximum; sound for accumulating covers because activation
    /// is monotone.
    pub fn max_with(&mut self, other: &WeightAssignment) {
        for (a, b) in self.idx.iter_mut().zip(&other.idx) {
            *a = (*a).max(*b);
        }
    }

    pub fn le(&self, other: &WeightAssignment) -> bool {
        self.idx.iter().zip(&other.idx).all(|(a, b)| a <= b)
    }

    pub fn to_json(&self, inst: &Instance) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for (v, &i) in self.idx.iter().enumerate() {
            if i != 0 {
                map.insert(inst.node_names[v].clone(), q_to_json(inst.weights.value(i)));
            }
        }
        serde_json::Value::Object(map)
    }
}

impl Instance {
    pub fn n(&self) -> usize {
        self.node_names.len()
    }

    pub fn terminals(&self) -> BTreeSet<usize> {
        self.demands.iter().flat_map(|d| [d.s, d.t]).collect()
    }

    pub fn max_requirement(&self) -> u32 {
        self.demands.iter().map(|d| d.requirement).max().unwrap_or(0)
    }

    /// Indices of candidate edges activated by `w`.
    pub fn activated_edges(&self, w: &WeightAssignment) -> Vec<usize> {
        self.candidates
            .iter()
            .enumerate()
            .filter(|(_, e)| e.table.holds(w.idx[e.u], w.idx[e.v]))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn candidate_endpoints(&self, indices: &[usize]) -> Vec<(usize, usize)> {
        indices.iter().map(|&i| (self.candidates[i].u, self.candidates[i].v)).collect()
    }

    /// Base edges plus the endpoints of the given activated candidates.
    pub fn graph_with(&self, activated: &[usize]) -> Vec<(usize, usize)> {
        let mut edges = self.base_edges.clone();
        edges.extend(self.candidate_endpoints(activated));
        edges
    }

    /// Demand indices satisfied in the graph `edges`.
    pub fn satisfied_demands(&self, edges: &[(usize, usize)]) -> Result<BTreeSet<usize>> {
        let terminals = self.terminals();
        let mut out = BTreeSet::new();
        for (i, d) in self.demands.iter().enumerate() {
            let c = connectivity::connectivity(self.kind, self.n(), edges, &terminals, d.s, d.t)?;
            if c >= d.requirement {
                out.insert(i);
            }
        }
        Ok(out)
    }

    /// Total weight plus the penalties of the demands whose requirement is
    /// not met by the activated graph.
    pub fn objective_value(&self, w: &WeightAssignment) -> Result<Cost> {
        let graph = self.graph_with(&self.activated_edges(w));
        let satisfied = self.satisfied_demands(&graph)?;
        let mut obj = Cost::Finite(w.total(&self.weights));
        for (i, d) in self.demands.iter().enumerate() {
            if !satisfied.contains(&i) {
                obj = obj + &d.penalty;
            }
        }
        Ok(obj)
    }

    fn validate(&self) -> Result<()> {
        let n = self.n();
        let mut seen_names = BTreeSet::new();
        for name in &self.node_names {
            if !seen_names.insert(name) {
                return Err(Error::validation(format!("duplicate node name {name:?}")));
            }
        }
        for &(u, v) in &self.base_edges {
            if u >= n || v >= n || u == v {
                return Err(Error::validation("base edge with bad endpoints"));
            }
        }
        let mut seen_pairs = BTreeSet::new();
        for e in &self.candidates {
            if e.u >= n || e.v >= n || e.u == e.v {
                return Err(Error::validation("candidate edge with bad endpoints"));
            }
            if e.u > e.v {
                return Err(Error::invariant("candidate edge not canonically oriented"));
            }
            if !seen_pairs.insert((e.u, e.v)) {
                return Err(Error::validation(format!(
                    "duplicate candidate edge {};{}",
                    self.node_names[e.u], self.node_names[e.v]
                )));
            }
            if e.table.dim() != self.weights.len() {
                return Err(Error::invariant("activation table dimension mismatch"));
            }
            if !e.table.is_monotone() {
                return Err(Error::validation(format!(
                    "non-monotone activation relation on {}-{}",
                    self.node_names[e.u], self.node_names[e.v]
                )));
            }
        }
        for d in &self.demands {
            if d.s >= n || d.t >= n {
                return Err(Error::validation("demand endpoint out of range"));
            }
            if d.s == d.t {
                return Err(Error::validation("demand endpoints must differ"));
            }
            if d.requirement == 0 {
                return Err(Error::validation("demand requirement must be at least 1"));
            }
            if let Cost::Finite(p) = &d.penalty {
                if p.is_negative() {
                    return Err(Error::validation("penalties must be non-negative"));
                }
            }
        }
        Ok(())
    }

    /// Parse and validate an instance document.
    pub fn parse(text: &str) -> Result<Instance> {
        let doc: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::parse(format!("bad JSON: {e}")))?;
        let obj = doc.as_object().ok_or_else(|| Error::parse("expected a JSON object"))?;
        let known = [
            "connectivity",
            "nodes",
            "weights",
            "base_edges",
            "candidate_edges",
            "demands",
        ];
        for key in obj.keys() {
            if !known.contains(&key.as_str()) {
                return Err(Error::parse(format!("unknown field {key:?}")));
            }
        }
        let get = |key: &str| {
            obj.get(key).ok_or_else(|| Error::parse(format!("missing field {key:?}")))
        };

        let kind = ConnectivityKind::parse(
            get("connectivity")?
                .as_str()
                .ok_or_else(|| Error::parse("connectivity must be a string"))?,
        )?;

        let node_names: Vec<String> = get("nodes")?
            .as_array()
            .ok_or_else(|| Error::parse("nodes must be an array"))?
            .iter()
            .map(|v| {
                v.as_str()
                    .map(str::to_owned)
                    .ok_or_else(|| Error::parse("node names must be strings"))
            })
            .collect::<Result<_>>()?;
        let index: BTreeMap<&str, usize> =
            node_names.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let node = |v: &serde_json::Value| -> Result<usize> {
            let name = v.as_str().ok_or_else(|| Error::parse("node reference must be a string"))?;
            index
                .get(name)
                .copied()
                .ok_or_else(|| Error::parse(format!("unknown node {name:?}")))
        };

        let weights = WeightSet::new(
            get("weights")?
                .as_array()
                .ok_or_else(|| Error::parse("weights must be an array"))?
                .iter()
                .map(q_from_json)
                .collect::<Result<Vec<Q>>>()?,
        )?;

        let mut base_edges = Vec::new();
        for e in get("base_edges")?
            .as_array()
            .ok_or_else(|| Error::parse("base_edges must be an array"))?
        {
            let pair = e.as_array().filter(|a| a.len() == 2).ok_or_else(|| {
                Error::parse("each base edge must be a two-element array of node names")
            })?;
            let (u, v) = (node(&pair[0])?, node(&pair[1])?);
            base_edges.push((u.min(v), u.max(v)));
        }
        base_edges.sort();

        let mut candidates = Vec::new();
        for e in get("candidate_edges")?
            .as_array()
            .ok_or_else(|| Error::parse("candidate_edges must be an array"))?
        {
            let eo = e.as_object().ok_or_else(|| Error::parse("candidate edge must be an object"))?;
            let ends = eo
                .get("ends")
                .and_then(|v| v.as_array())
                .filter(|a| a.len() == 2)
                .ok_or_else(|| Error::parse("candidate edge needs a two-element `ends`"))?;
            let (a, b) = (node(&ends[0])?, node(&ends[1])?);
            if a == b {
                return Err(Error::validation("candidate edge is a loop"));
            }
            let mut pairs = Vec::new();
            for p in eo
                .get("activation")
                .and_then(|v| v.as_array())
                .ok_or_else(|| Error::parse("candidate edge needs an `activation` array"))?
            {
                let pv = p.as_array().filter(|x| x.len() == 2).ok_or_else(|| {
                    Error::parse("activation entries must be weight pairs")
                })?;
                let wi = q_from_json(&pv[0])?;
                let wj = q_from_json(&pv[1])?;
                let i = weights
                    .index_of(&wi)
                    .ok_or_else(|| Error::validation("activation weight not in the weight set"))?;
                let j = weights
                    .index_of(&wj)
                    .ok_or_else(|| Error::validation("activation weight not in the weight set"))?;
                // Pairs are given in `ends` order; store in canonical order.
                if a <= b {
                    pairs.push((i, j));
                } else {
                    pairs.push((j, i));
                }
            }
            let (u, v) = (a.min(b), a.max(b));
            candidates.push(CandidateEdge {
                u,
                v,
                table: ActivationTable::from_pairs(weights.len(), &pairs)?,
            });
        }
        candidates.sort_by_key(|e| (e.u, e.v));

        let mut demands = Vec::new();
        for d in get("demands")?
            .as_array()
            .ok_or_else(|| Error::parse("demands must be an array"))?
        {
            let dobj = d.as_object().ok_or_else(|| Error::parse("demand must be an object"))?;
            let s = node(dobj.get("s").ok_or_else(|| Error::parse("demand missing s"))?)?;
            let t = node(dobj.get("t").ok_or_else(|| Error::parse("demand missing t"))?)?;
            let r = dobj
                .get("r")
                .and_then(|v| v.as_u64())
                .ok_or_else(|| Error::parse("demand missing natural r"))? as u32;
            let penalty =
                Cost::from_json(dobj.get("penalty").ok_or_else(|| Error::parse("demand missing penalty"))?)?;
            demands.push(Demand { s, t, requirement: r, penalty });
        }

        let inst = Instance { node_names, base_edges, candidates, weights, demands, kind };
        inst.validate()?;
        Ok(inst)
    }

    /// Canonical serialization; `parse` followed by this function is a
    /// normal form that round-trips bit-exactly.
    pub fn to_canonical_json(&self) -> String {
        let mut root = serde_json::Map::new();
        root.insert("connectivity".into(), self.kind.as_str().into());
        root.insert(
            "nodes".into(),
            self.node_names.iter().map(|s| serde_json::Value::from(s.as_str())).collect(),
        );
        root.insert(
            "weights".into(),
            self.weights.values().iter().map(q_to_json).collect(),
        );
        root.insert(
            "base_edges".into(),
            self.base_edges
                .iter()
                .map(|&(u, v)| {
                    serde_json::Value::from(vec![
                        self.node_names[u].clone(),
                        self.node_names[v].clone(),
                    ])
                })
                .collect(),
        );
        root.insert(
            "candidate_edges".into(),
            self.candidates
                .iter()
                .map(|e| {
                    let mut eo = serde_json::Map::new();
                    eo.insert(
                        "ends".into(),
                        serde_json::Value::from(vec![
                            self.node_names[e.u].clone(),
                            self.node_names[e.v].clone(),
                        ]),
                    );
                    eo.insert(
                        "activation".into(),
                        e.table
                            .minimal_pairs()
                            .iter()
                            .map(|&(i, j)| {
                                serde_json::Value::from(vec![
                                    q_to_json(self.weights.value(i)),
                                    q_to_json(self.weights.value(j)),
                                ])
                            })
                            .collect(),
                    );
                    serde_json::Value::Object(eo)
                })
                .collect(),
        );
        root.insert(
            "demands".into(),
            self.demands
                .iter()
                .map(|d| {
                    let mut dobj = serde_json::Map::new();
                    dobj.insert("s".into(), self.node_names[d.s].as_str().into());
                    dobj.insert("t".into(), self.node_names[d.t].as_str().into());
                    dobj.insert("r".into(), d.requirement.into());
                    dobj.insert("penalty".into(), d.penalty.to_json());
                    serde_json::Value::Object(dobj)
                })
                .collect(),
        );
        let mut text = serde_json::to_string_pretty(&serde_json::Value::Object(root)).unwrap();
        text.push('\n');
        text
    }
}
