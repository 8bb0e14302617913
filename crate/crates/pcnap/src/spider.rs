//! Primal-dual computation of spiders.
//!
//! A spider for a biset family is an edge set splitting into legs that meet
//! only at a head node `h`; leg `i` covers every core above its foot
//! min-core that avoids `h` in its outer-part (all cores above the foot when
//! there is a single leg), and `h` lies outside every foot's outer-part.
//!
//! The algorithm grows one dual variable per active core at unit rate and
//! routes the growth into per-tuple auxiliary variables: for each tuple
//! `(uv, j, j')` the head side `(v, j')` absorbs it until its weight cap is
//! tight, then the shared tail side `(u, j)`. When a tuple is tight on both
//! sides its core has an event: an edge enters the forest with the event
//! core as witness, and either a minimal uncovered core above replaces the
//! event core (case a) or the run terminates (case b). Events simultaneous
//! on the clock are drained one at a time in canonical core order before
//! termination. Dual feasibility is checked at every event boundary.

use crate::biset::{Biset, BisetFamily};
use crate::error::{Error, Result};
use crate::instance::{Instance, WeightAssignment};
use crate::lp::check_dual_feasible;
use crate::rational::{q_to_string, Q};
use num::traits::Zero;
use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

/// Dual variables and bookkeeping of one primal-dual run.
#[derive(Debug, Clone)]
pub struct DualState {
    pub clock: Q,
    pub z_core: BTreeMap<Biset, Q>,
    pub z_aux: BTreeMap<(Biset, usize, usize), Q>,
    pub active: BTreeSet<Biset>,
    pub laminar: Vec<Biset>,
    pub tight_in: BTreeSet<(usize, usize)>,
    pub tight_out: BTreeSet<(usize, usize)>,
}

impl DualState {
    pub fn core_sum(&self) -> Q {
        self.z_core.values().cloned().sum()
    }

    pub fn is_feasible(&self, inst: &Instance) -> bool {
        check_dual_feasible(inst, &self.laminar, &self.z_core, &self.z_aux)
    }
}

/// Directed edge retained in the forest or a spider leg, with the weights
/// assigned when it was added and the core that witnessed it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpiderEdge {
    pub cand: usize,
    pub tail: usize,
    pub head: usize,
    pub tail_w: usize,
    pub head_w: usize,
    pub witness: Biset,
}

#[derive(Debug, Clone)]
pub struct Spider {
    pub head: usize,
    pub feet: Vec<Biset>,
    pub legs: Vec<Vec<SpiderEdge>>,
    pub weights: WeightAssignment,
}

impl Spider {
    pub fn feet_count(&self) -> usize {
        self.feet.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = &SpiderEdge> {
        self.legs.iter().flatten()
    }

    pub fn edge_endpoints(&self) -> Vec<(usize, usize)> {
        self.edges().map(|e| (e.tail, e.head)).collect()
    }

    pub fn candidate_indices(&self) -> BTreeSet<usize> {
        self.edges().map(|e| e.cand).collect()
    }
}

#[derive(Debug, Clone)]
pub struct SpiderOutcome {
    pub spider: Spider,
    pub laminar: Vec<Biset>,
    pub dual: DualState,
}

#[derive(Debug, Clone, Copy)]
struct Tuple {
    cand: usize,
    tail: usize,
    head: usize,
    tail_w: usize,
    head_w: usize,
}

pub enum EventOutcome {
    ContinuedCaseA,
    TerminatedCaseB(usize),
}

struct Pd<'a, 't> {
    inst: &'a Instance,
    family: &'a BisetFamily,
    cores: BisetFamily,
    min_core_count: usize,
    state: DualState,
    used_in: BTreeMap<(usize, usize), Q>,
    used_out: BTreeMap<(usize, usize), Q>,
    tuples: BTreeMap<Biset, Vec<Tuple>>,
    forest: Vec<SpiderEdge>,
    handled: BTreeSet<Biset>,
    case_b_head: Option<usize>,
    trace: Option<&'t mut (dyn Write + 'static)>,
}

impl<'a, 't> Pd<'a, 't> {
    fn new(
        inst: &'a Instance,
        family: &'a BisetFamily,
        trace: Option<&'t mut (dyn Write + 'static)>,
    ) -> Result<Self> {
        if family.is_empty() {
            return Err(Error::validation("cannot compute a spider for an empty family"));
        }
        if !family.is_uncrossable() {
            return Err(Error::validation("spider computation requires an uncrossable family"));
        }
        for b in family.members() {
            if tuples_for(inst, b).is_empty() {
                return Err(Error::infeasible(format!(
                    "biset {} cannot be covered by any activatable edge",
                    b.format(&inst.node_names)
                )));
            }
        }
        let min_cores = family.min_cores();
        for (i, a) in min_cores.members().iter().enumerate() {
            for b in &min_cores.members()[i + 1..] {
                if !a.strongly_disjoint(b) {
                    return Err(Error::invariant("min-cores are not pairwise strongly disjoint"));
                }
            }
        }
        let mut tight_in = BTreeSet::new();
        let mut tight_out = BTreeSet::new();
        for v in 0..inst.n() {
            for j in 0..inst.weights.len() {
                if inst.weights.value(j).is_zero() {
                    tight_in.insert((v, j));
                    tight_out.insert((v, j));
                }
            }
        }
        let laminar: Vec<Biset> = min_cores.members().to_vec();
        let state = DualState {
            clock: <Q as Zero>::zero(),
            z_core: laminar.iter().map(|b| (*b, <Q as Zero>::zero())).collect(),
            z_aux: BTreeMap::new(),
            active: laminar.iter().copied().collect(),
            laminar: laminar.clone(),
            tight_in,
            tight_out,
        };
        let tuples = laminar.iter().map(|b| (*b, tuples_for(inst, b))).collect();
        Ok(Pd {
            inst,
            family,
            cores: family.cores(),
            min_core_count: min_cores.len(),
            state,
            used_in: BTreeMap::new(),
            used_out: BTreeMap::new(),
            tuples,
            forest: Vec::new(),
            handled: BTreeSet::new(),
            case_b_head: None,
            trace,
        })
    }

    fn cap(&self, widx: usize) -> &Q {
        self.inst.weights.value(widx)
    }

    fn tuple_tight(&self, t: &Tuple) -> bool {
        self.state.tight_in.contains(&(t.head, t.head_w))
            && self.state.tight_out.contains(&(t.tail, t.tail_w))
    }

    /// Group `(tail, tail_w)` of `core` is in the tail phase once any member
    /// tuple's head cap is tight.
    fn group_in_tail_phase(&self, core: &Biset, tail: usize, tail_w: usize) -> bool {
        self.tuples[core]
            .iter()
            .filter(|t| t.tail == tail && t.tail_w == tail_w)
            .any(|t| self.state.tight_in.contains(&(t.head, t.head_w)))
    }

    /// Growing auxiliary variables: `(core, node, widx, is_head_side)`.
    fn growing_vars(&self) -> Vec<(Biset, usize, usize, bool)> {
        let mut out = Vec::new();
        for core in &self.state.active {
            let tuples = &self.tuples[core];
            let groups: BTreeSet<(usize, usize)> =
                tuples.iter().map(|t| (t.tail, t.tail_w)).collect();
            let mut heads: BTreeSet<(usize, usize)> = BTreeSet::new();
            for &(u, j) in &groups {
                if self.group_in_tail_phase(core, u, j) {
                    if !self.state.tight_out.contains(&(u, j)) {
                        out.push((*core, u, j, false));
                    }
                } else {
                    for t in tuples.iter().filter(|t| t.tail == u && t.tail_w == j) {
                        if !self.state.tight_in.contains(&(t.head, t.head_w)) {
                            heads.insert((t.head, t.head_w));
                        }
                    }
                }
            }
            for (v, j) in heads {
                out.push((*core, v, j, true));
            }
        }
        out
    }

    /// Advance the clock through cap breakpoints until some active core has
    /// a tight tuple. Errors when nothing can grow.
    fn advance_to_next_event(&mut self) -> Result<()> {
        loop {
            if self.next_event_core().is_some() {
                return Ok(());
            }
            let growing = self.growing_vars();
            if growing.is_empty() {
                return Err(Error::invariant(
                    "dual growth is stuck with no tight tuple; some active core has no usable tuples",
                ));
            }
            // Rate per cap constraint and minimum time to the next cap.
            let mut rate_in: BTreeMap<(usize, usize), u32> = BTreeMap::new();
            let mut rate_out: BTreeMap<(usize, usize), u32> = BTreeMap::new();
            for (_, v, j, is_head) in &growing {
                let key = (*v, *j);
                if *is_head {
                    *rate_in.entry(key).or_insert(0) += 1;
                } else {
                    *rate_out.entry(key).or_insert(0) += 1;
                }
            }
            let zero = <Q as Zero>::zero();
            let mut delta: Option<Q> = None;
            for (sums, rates) in [(&self.used_in, &rate_in), (&self.used_out, &rate_out)] {
                for (key, rate) in rates {
                    let used = sums.get(key).cloned().unwrap_or_else(|| zero.clone());
                    let slack = self.cap(key.1) - &used;
                    let t = slack / Q::from_integer((*rate).into());
                    if delta.as_ref().map(|d| &t < d).unwrap_or(true) {
                        delta = Some(t);
                    }
                }
            }
            let delta = delta.expect("growing vars imply a finite breakpoint");
            debug_assert!(delta >= zero);
            self.state.clock += &delta;
            for core in self.state.active.clone() {
                let z = self.state.z_core.get_mut(&core).expect("active core has z");
                *z += &delta;
            }
            for (core, v, j, is_head) in growing {
                let e = self
                    .state
                    .z_aux
                    .entry((core, v, j))
                    .or_insert_with(<Q as Zero>::zero);
                *e += &delta;
                let sums = if is_head { &mut self.used_in } else { &mut self.used_out };
                let s = sums.entry((v, j)).or_insert_with(<Q as Zero>::zero);
                *s += &delta;
            }
            // Refresh tight cap sets.
            for (&key, used) in &self.used_in {
                if used == self.cap(key.1) {
                    self.state.tight_in.insert(key);
                }
            }
            for (&key, used) in &self.used_out {
                if used == self.cap(key.1) {
                    self.state.tight_out.insert(key);
                }
            }
        }
    }

    /// First unhandled active core (canonical order) with a tight tuple.
    fn next_event_core(&self) -> Option<Biset> {
        self.state
            .active
            .iter()
            .find(|core| {
                !self.handled.contains(core)
                    && self.tuples[core].iter().any(|t| self.tuple_tight(t))
            })
            .copied()
    }

    /// Minimal core of the laminar family covering the directed edge; the
    /// candidates must form a chain.
    fn minimal_witness(&self, tail: usize, head: usize) -> Result<Biset> {
        let mut covering: Vec<&Biset> = self
            .state
            .laminar
            .iter()
            .filter(|b| b.covers_directed(tail, head))
            .collect();
        if covering.is_empty() {
            return Err(Error::invariant("no laminar core covers the event edge"));
        }
        for (i, a) in covering.iter().enumerate() {
            for b in &covering[i + 1..] {
                if !a.comparable(b) {
                    return Err(Error::invariant(format!(
                        "witness candidates {} and {} are incomparable",
                        a.format(&self.inst.node_names),
                        b.format(&self.inst.node_names)
                    )));
                }
            }
        }
        covering.sort_by(|a, b| chain_cmp(a, b));
        Ok(*covering[0])
    }

    fn handle_event(&mut self, event_core: Biset) -> Result<EventOutcome> {
        let tight: Vec<Tuple> = self.tuples[&event_core]
            .iter()
            .filter(|t| self.tuple_tight(t))
            .copied()
            .collect();
        debug_assert!(!tight.is_empty());
        // Deterministic tail choice: lowest node id, then smallest weight.
        let (u, j) = tight
            .iter()
            .map(|t| (t.tail, t.tail_w))
            .min()
            .expect("tight tuple exists");
        let mut group: Vec<(Biset, Tuple)> = tight
            .iter()
            .filter(|t| t.tail == u && t.tail_w == j)
            .map(|t| Ok((self.minimal_witness(t.tail, t.head)?, *t)))
            .collect::<Result<_>>()?;
        for (i, (wa, _)) in group.iter().enumerate() {
            if !wa.is_subset(&event_core) {
                return Err(Error::invariant("tuple witness not below the event core"));
            }
            for (wb, _) in &group[i + 1..] {
                if !wa.comparable(wb) {
                    return Err(Error::invariant("incomparable minimal witnesses in one event"));
                }
            }
        }
        group.sort_by(|(wa, ta), (wb, tb)| {
            chain_cmp(wa, wb).then_with(|| (ta.head, ta.head_w).cmp(&(tb.head, tb.head_w)))
        });
        let (_, first) = group[0];
        let edge = SpiderEdge {
            cand: first.cand,
            tail: u,
            head: first.head,
            tail_w: j,
            head_w: first.head_w,
            witness: event_core,
        };
        self.forest.push(edge.clone());

        let b_count = self.forest.iter().filter(|e| e.tail == u).count();
        let uncovered_above = self.minimal_uncovered_above(&event_core)?;
        let case_a = b_count == 1 && uncovered_above.is_some();
        if let Some(t) = self.trace.as_deref_mut() {
            writeln!(
                t,
                "event clock={} core={} tuple=({}>{},{},{}) case={}",
                q_to_string(&self.state.clock),
                event_core.format(&self.inst.node_names),
                self.inst.node_names[u],
                self.inst.node_names[first.head],
                q_to_string(self.inst.weights.value(j)),
                q_to_string(self.inst.weights.value(first.head_w)),
                if case_a { "a" } else { "b" }
            )?;
        }
        if case_a {
            let z = uncovered_above.expect("checked above");
            self.state.laminar.push(z);
            self.state.z_core.insert(z, <Q as Zero>::zero());
            self.state.active.remove(&event_core);
            self.state.active.insert(z);
            let tz = tuples_for(self.inst, &z);
            if tz.is_empty() {
                return Err(Error::infeasible(format!(
                    "activated core {} has no activatable covering edge",
                    z.format(&self.inst.node_names)
                )));
            }
            self.tuples.insert(z, tz);
            self.assert_active_matches_residual()?;
            Ok(EventOutcome::ContinuedCaseA)
        } else {
            if self.case_b_head.is_none() {
                self.case_b_head = Some(u);
            }
            self.handled.insert(event_core);
            Ok(EventOutcome::TerminatedCaseB(b_count))
        }
    }

    /// Minimal core strictly above `b` not covered by the forest; `None`
    /// when every core above is covered. Uniqueness of the minimum follows
    /// from the ring structure of the residual cores and is asserted.
    fn minimal_uncovered_above(&self, b: &Biset) -> Result<Option<Biset>> {
        let fe: Vec<(usize, usize)> = self.forest.iter().map(|e| (e.tail, e.head)).collect();
        let uncovered: Vec<&Biset> = self
            .cores
            .members()
            .iter()
            .filter(|z| *z != b && b.is_subset(z))
            .filter(|z| !fe.iter().any(|&(x, y)| z.covers_undirected(x, y)))
            .collect();
        if uncovered.is_empty() {
            return Ok(None);
        }
        let minimal: Vec<&&Biset> = uncovered
            .iter()
            .filter(|z| !uncovered.iter().any(|o| *o != **z && o.is_subset(z)))
            .collect();
        if minimal.len() != 1 {
            return Err(Error::invariant(
                "residual cores above the event core do not form a ring family",
            ));
        }
        Ok(Some(**minimal[0]))
    }

    /// The active set must equal the min-cores of the residual family after
    /// each replacement.
    fn assert_active_matches_residual(&self) -> Result<()> {
        let fe: Vec<(usize, usize)> = self.forest.iter().map(|e| (e.tail, e.head)).collect();
        let expect: BTreeSet<Biset> =
            self.family.residual(&fe).min_cores().members().iter().copied().collect();
        if expect != self.state.active {
            return Err(Error::invariant(
                "active cores diverged from the residual family's min-cores",
            ));
        }
        Ok(())
    }

    fn check_feasible(&self) -> Result<()> {
        if !self.state.is_feasible(self.inst) {
            return Err(Error::invariant("dual state became infeasible"));
        }
        Ok(())
    }

    /// Process every event pending at the current clock; returns true when a
    /// case-b event ended the increase phase.
    fn drain_events(&mut self) -> Result<bool> {
        while let Some(core) = self.next_event_core() {
            self.handle_event(core)?;
            self.check_feasible()?;
        }
        Ok(self.case_b_head.is_some())
    }

    fn chain_below(&self, top: &Biset) -> Result<Vec<(Biset, SpiderEdge)>> {
        let mut members: Vec<Biset> = self
            .state
            .laminar
            .iter()
            .filter(|b| b.is_subset(top))
            .copied()
            .collect();
        members.sort_by(|a, b| chain_cmp(a, b));
        for (i, a) in members.iter().enumerate() {
            for b in &members[i + 1..] {
                if !a.is_subset(b) {
                    return Err(Error::invariant("laminar cores below a witness are not a chain"));
                }
            }
        }
        let mut out = Vec::with_capacity(members.len());
        for m in members {
            let edges: Vec<&SpiderEdge> =
                self.forest.iter().filter(|e| e.witness == m).collect();
            if edges.len() != 1 {
                return Err(Error::invariant("each chain core must witness exactly one edge"));
            }
            out.push((m, edges[0].clone()));
        }
        Ok(out)
    }

    fn assemble_spider(mut self) -> Result<SpiderOutcome> {
        let h = self.case_b_head.expect("assemble requires a case-b event");
        let b_edges: Vec<SpiderEdge> =
            self.forest.iter().filter(|e| e.tail == h).cloned().collect();
        debug_assert!(!b_edges.is_empty());
        let mut tops: Vec<Biset> = if b_edges.len() >= 2 {
            b_edges.iter().map(|e| e.witness).collect()
        } else {
            let xw = b_edges[0].witness;
            let inactive: Vec<&Biset> = self
                .state
                .laminar
                .iter()
                .filter(|b| !self.state.active.contains(b))
                .collect();
            let mut tops = vec![xw];
            for b in &inactive {
                if b.comparable(&xw) {
                    continue;
                }
                if !inactive.iter().any(|o| o != b && b.is_subset(o)) {
                    tops.push(**b);
                }
            }
            tops
        };
        tops.sort();
        tops.dedup();

        let min_cores = self.family.min_cores();
        let mut legs: Vec<Vec<SpiderEdge>> = Vec::new();
        let mut feet: Vec<Biset> = Vec::new();
        for top in &tops {
            let chain = self.chain_below(top)?;
            let kept = deletion_phase_records(&chain)?;
            let foot = chain[0].0;
            if !min_cores.contains(&foot) {
                return Err(Error::invariant("chain bottom is not a min-core"));
            }
            // Every chain core must be covered exactly once by the retained
            // edges of its own chain.
            for (m, _) in &chain {
                let cnt = kept
                    .iter()
                    .filter(|e| m.covers_undirected(e.tail, e.head))
                    .count();
                if cnt != 1 {
                    return Err(Error::invariant(
                        "chain core not covered exactly once after deletion",
                    ));
                }
            }
            legs.push(kept);
            feet.push(foot);
        }
        if b_edges.len() == 1 {
            // Single foot: all retained chains merge into one leg.
            let foot = {
                let xw = b_edges[0].witness;
                let chain = self.chain_below(&xw)?;
                chain[0].0
            };
            let mut leg: Vec<SpiderEdge> = legs.into_iter().flatten().collect();
            leg.sort_by_key(|e| (e.tail, e.head, e.tail_w, e.head_w));
            legs = vec![leg];
            feet = vec![foot];
        }

        let mut weights = WeightAssignment::zero(self.inst.n());
        for e in legs.iter().flatten() {
            weights.idx[e.tail] = weights.idx[e.tail].max(e.tail_w);
            weights.idx[e.head] = weights.idx[e.head].max(e.head_w);
        }
        let spider = Spider { head: h, feet, legs, weights };
        verify_spider(self.inst, self.family, &spider)?;

        // Density certificate: w(V)/f(S) <= sum of core duals / #min-cores.
        let total = spider.weights.total(&self.inst.weights);
        let zsum = self.state.core_sum();
        let f = Q::from_integer((spider.feet_count() as i64).into());
        let m = Q::from_integer((self.min_core_count as i64).into());
        if &total / &f > &zsum / &m {
            return Err(Error::invariant("spider density exceeds its dual certificate"));
        }
        // Clock identity: every unit of time raises each of the |M| active
        // duals by one.
        if self.state.clock.clone() * &m != zsum {
            return Err(Error::invariant("clock does not match the dual total"));
        }
        if let Some(t) = self.trace.as_deref_mut() {
            writeln!(
                t,
                "spider head={} feet={} weight={}",
                self.inst.node_names[h],
                spider.feet_count(),
                q_to_string(&total)
            )?;
        }
        Ok(SpiderOutcome { spider, laminar: self.state.laminar.clone(), dual: self.state })
    }
}

/// Inclusion order for members of a chain; falls back to the canonical order
/// for equal bisets.
fn chain_cmp(a: &Biset, b: &Biset) -> std::cmp::Ordering {
    if a == b {
        std::cmp::Ordering::Equal
    } else if a.is_subset(b) {
        std::cmp::Ordering::Less
    } else if b.is_subset(a) {
        std::cmp::Ordering::Greater
    } else {
        a.cmp(b)
    }
}

fn tuples_for(inst: &Instance, b: &Biset) -> Vec<Tuple> {
    let mut out = Vec::new();
    for (ci, e) in inst.candidates.iter().enumerate() {
        for (t, h) in [(e.u, e.v), (e.v, e.u)] {
            if !b.covers_directed(t, h) {
                continue;
            }
            for (j, jp) in e.directed_pairs(t, h) {
                out.push(Tuple { cand: ci, tail: t, head: h, tail_w: j, head_w: jp });
            }
        }
    }
    out
}

/// The deletion step over one witness chain. `chain` lists the cores in
/// inclusion order, each with the directed edge it witnessed; the edge's
/// head must lie in its core's inner-part, its tail outside the outer-part
/// and (except at the top) inside the next core's outer-part. Returns the
/// retained edges.
pub fn deletion_phase(chain: &[(Biset, (usize, usize))]) -> Result<Vec<usize>> {
    let l = chain.len();
    if l == 0 {
        return Err(Error::validation("deletion phase needs a non-empty chain"));
    }
    for (i, (b, (tail, head))) in chain.iter().enumerate() {
        if i + 1 < l && !b.is_subset(&chain[i + 1].0) {
            return Err(Error::validation("chain is not sorted by inclusion"));
        }
        if b.inner() & (1 << head) == 0 || b.outer() & (1 << tail) != 0 {
            return Err(Error::validation("chain edge does not cover its own core"));
        }
        if i + 1 < l && chain[i + 1].0.outer() & (1 << tail) == 0 {
            return Err(Error::validation("chain edge tail escapes the next core"));
        }
    }
    let mut kept: Vec<bool> = vec![true; l];
    let mut p = l; // 1-based
    loop {
        let vp = chain[p - 1].1 .1;
        let q = (1..=p)
            .find(|&q| chain[q - 1].0.inner() & (1 << vp) != 0)
            .expect("edge head lies in its own core");
        for i in q..p {
            kept[i - 1] = false;
        }
        if q > 1 {
            p = q - 1;
        } else {
            break;
        }
    }
    Ok((0..l).filter(|&i| kept[i]).collect())
}

fn deletion_phase_records(chain: &[(Biset, SpiderEdge)]) -> Result<Vec<SpiderEdge>> {
    let view: Vec<(Biset, (usize, usize))> =
        chain.iter().map(|(b, e)| (*b, (e.tail, e.head))).collect();
    let kept = deletion_phase(&view)?;
    Ok(kept.into_iter().map(|i| chain[i].1.clone()).collect())
}

/// Structural verification of a spider against its family.
pub fn verify_spider(inst: &Instance, f: &BisetFamily, s: &Spider) -> Result<()> {
    if s.feet.is_empty() || s.feet.len() != s.legs.len() {
        return Err(Error::invariant("spider must have one leg per foot"));
    }
    let min_cores = f.min_cores();
    let mut seen = BTreeSet::new();
    for foot in &s.feet {
        if !min_cores.contains(foot) {
            return Err(Error::invariant("spider foot is not a min-core"));
        }
        if !seen.insert(*foot) {
            return Err(Error::invariant("duplicate spider foot"));
        }
        if foot.outer() & (1 << s.head) != 0 {
            return Err(Error::invariant("head lies in a foot's outer-part"));
        }
    }
    // Legs are node-disjoint except at the head.
    for (i, a) in s.legs.iter().enumerate() {
        for b in &s.legs[i + 1..] {
            let na: BTreeSet<usize> = a.iter().flat_map(|e| [e.tail, e.head]).collect();
            let nb: BTreeSet<usize> = b.iter().flat_map(|e| [e.tail, e.head]).collect();
            if na.intersection(&nb).any(|&v| v != s.head) {
                return Err(Error::invariant("legs share a node other than the head"));
            }
        }
    }
    // Every leg edge is activated by the spider's weights.
    for e in s.edges() {
        let cand = &inst.candidates[e.cand];
        if !cand.holds_directed(e.tail, e.head, s.weights.idx[e.tail], s.weights.idx[e.head]) {
            return Err(Error::invariant("spider weights do not activate a leg edge"));
        }
    }
    // Coverage of the cores above each foot.
    for (foot, leg) in s.feet.iter().zip(&s.legs) {
        let must_cover = if s.feet.len() == 1 {
            f.cores_above(foot)?
        } else {
            f.cores_above_avoiding(foot, s.head)?
        };
        for b in must_cover.members() {
            if !leg.iter().any(|e| b.covers_undirected(e.tail, e.head)) {
                return Err(Error::invariant(format!(
                    "leg of foot {} misses core {}",
                    foot.format(&inst.node_names),
                    b.format(&inst.node_names)
                )));
            }
        }
        if s.feet.len() == 1 {
            continue;
        }
        // Legs also cover the avoiding family entirely for multi-foot
        // spiders; checked above. The single-foot case covers everything.
    }
    Ok(())
}

/// Run the primal-dual increase phase to completion, returning the spider,
/// the laminar core family in construction order, and the final dual state.
pub fn compute_spider(
    inst: &Instance,
    f: &BisetFamily,
    trace: Option<&mut (dyn Write + 'static)>,
) -> Result<SpiderOutcome> {
    let mut pd = Pd::new(inst, f, trace)?;
    loop {
        if pd.drain_events()? {
            return pd.assemble_spider();
        }
        pd.advance_to_next_event()?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q_int;

    fn doc(nodes: &[&str], weights: &[i64], edges: &[(&str, &str, (i64, i64))]) -> Instance {
        let mut root = serde_json::Map::new();
        root.insert("connectivity".into(), "edge".into());
        root.insert("nodes".into(), nodes.iter().map(|s| serde_json::Value::from(*s)).collect());
        root.insert("weights".into(), weights.iter().map(|&w| serde_json::Value::from(w)).collect());
        root.insert("base_edges".into(), serde_json::Value::Array(vec![]));
        root.insert(
            "candidate_edges".into(),
            edges
                .iter()
                .map(|(u, v, (i, j))| {
                    serde_json::json!({"ends": [u, v], "activation": [[i, j]]})
                })
                .collect(),
        );
        root.insert("demands".into(), serde_json::Value::Array(vec![]));
        Instance::parse(&serde_json::Value::Object(root).to_string()).unwrap()
    }

    fn biset(inner: &[usize], outer: &[usize]) -> Biset {
        let m = |xs: &[usize]| xs.iter().fold(0u32, |a, &i| a | (1 << i));
        Biset::new(m(inner), m(outer)).unwrap()
    }

    #[test]
    fn single_biset_single_edge() {
        // Nodes a=0, b=1; the only member is ({b},{b}); edge a-b activates
        // at (1,1). Head side caps at clock 1, tail side at clock 2.
        let inst = doc(&["a", "b"], &[0, 1], &[("a", "b", (1, 1))]);
        let f = BisetFamily::synthetic(2, vec![biset(&[1], &[1])]);
        let out = compute_spider(&inst, &f, None).unwrap();
        assert_eq!(out.spider.feet_count(), 1);
        assert_eq!(out.spider.head, 0);
        assert_eq!(out.spider.weights.total(&inst.weights), q_int(2));
        assert_eq!(out.dual.clock, q_int(2));
        assert_eq!(out.dual.core_sum(), q_int(2));
        assert!(out.dual.is_feasible(&inst));
    }

    #[test]
    fn two_feet_star() {
        // Two strongly disjoint min-cores ({a},{a}) and ({b},{b}) coverable
        // only from h; a core above ({a},{a}) with h in its boundary forces
        // a case-a step first, so the second event sees two edges leaving h.
        let inst = doc(
            &["h", "a", "b", "c"],
            &[0, 1],
            &[("h", "a", (1, 1)), ("h", "b", (1, 1)), ("b", "c", (1, 1))],
        );
        let fam = BisetFamily::synthetic(
            4,
            vec![biset(&[1], &[1]), biset(&[2], &[2]), biset(&[1, 3], &[0, 1, 3])],
        );
        let out = compute_spider(&inst, &fam, None).unwrap();
        assert_eq!(out.spider.feet_count(), 2);
        assert_eq!(out.spider.head, 0);
        // w(V) = 3 (h, a, b at weight 1); sum of duals 3 over 2 min-cores.
        assert_eq!(out.spider.weights.total(&inst.weights), q_int(3));
        assert_eq!(out.dual.core_sum(), q_int(3));
        assert_eq!(out.dual.clock, crate::rational::q_ratio(3, 2));
    }

    #[test]
    fn nested_chain_absorbed_by_case_a() {
        // Chain ({a},{a}) in ({a,c},{a,c}); the inner member is covered only
        // by c->a, the outer only by h->c. Case (a) extends the chain, then
        // a single-foot spider covers both.
        let inst = doc(&["h", "a", "c"], &[0, 1], &[("a", "c", (1, 1)), ("h", "c", (1, 1))]);
        let fam =
            BisetFamily::synthetic(3, vec![biset(&[1], &[1]), biset(&[1, 2], &[1, 2])]);
        let out = compute_spider(&inst, &fam, None).unwrap();
        assert_eq!(out.spider.feet_count(), 1);
        assert_eq!(out.spider.head, 0);
        assert_eq!(out.laminar.len(), 2);
        // Both chain edges survive: c->a covers the foot, h->c the top.
        assert_eq!(out.spider.legs[0].len(), 2);
        assert!(out.dual.is_feasible(&inst));
    }

    #[test]
    fn deletion_keeps_alternating_edges() {
        // Five nested plain bisets; edge heads as in the worked example:
        // v5 sits in the third core's boundary region, so the top edge only
        // covers cores four and five.
        let y: Vec<Biset> = vec![
            biset(&[0], &[0]),
            biset(&[0, 1], &[0, 1]),
            biset(&[0, 1, 2], &[0, 1, 2, 3]),
            biset(&[0, 1, 2, 3, 4], &[0, 1, 2, 3, 4]),
            biset(&[0, 1, 2, 3, 4, 5], &[0, 1, 2, 3, 4, 5]),
        ];
        // Edges (tail, head) per chain position.
        let edges = [(1, 0), (2, 0), (4, 1), (5, 4), (6, 3)];
        let chain: Vec<(Biset, (usize, usize))> =
            y.into_iter().zip(edges.iter().copied()).collect();
        let kept = deletion_phase(&chain).unwrap();
        assert_eq!(kept, vec![0, 2, 4]);
    }

    #[test]
    fn deletion_trivial_and_two_step() {
        let y1 = biset(&[0], &[0]);
        let y2 = biset(&[0, 1], &[0, 1]);
        // l = 1: nothing to remove.
        assert_eq!(deletion_phase(&[(y1, (2, 0))]).unwrap(), vec![0]);
        // l = 2 with the top edge's head inside the bottom core: drop the
        // bottom edge.
        let chain = vec![(y1, (1, 0)), (y2, (2, 0))];
        assert_eq!(deletion_phase(&chain).unwrap(), vec![1]);
    }

    #[test]
    fn uncoverable_family_is_rejected() {
        let inst = doc(&["a", "b"], &[0, 1], &[("a", "b", (1, 1))]);
        let fam = BisetFamily::synthetic(2, vec![biset(&[0], &[0, 1])]);
        assert!(matches!(
            compute_spider(&inst, &fam, None),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn golden_trace_two_feet() {
        let inst = doc(
            &["h", "a", "b", "c"],
            &[0, 1],
            &[("h", "a", (1, 1)), ("h", "b", (1, 1)), ("b", "c", (1, 1))],
        );
        let fam = BisetFamily::synthetic(
            4,
            vec![biset(&[1], &[1]), biset(&[2], &[2]), biset(&[1, 3], &[0, 1, 3])],
        );
        let mut buf: Vec<u8> = Vec::new();
        compute_spider(&inst, &fam, Some(&mut buf)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let want = "event clock=3/2 core={a|} tuple=(h>a,1,1) case=a\n\
                    event clock=3/2 core={b|} tuple=(h>b,1,1) case=b\n\
                    spider head=h feet=2 weight=3\n";
        assert_eq!(text, want);
    }
}
