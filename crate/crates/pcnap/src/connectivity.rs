//! Max-flow based connectivity queries (edge, node and element variants)
//! and exhaustive minimum-cut biset enumeration.
//!
//! Graphs are undirected edge multisets over nodes `0..n`; parallel edges
//! carry multiplicity. Flows use a plain augmenting-path (Edmonds-Karp)
//! scheme with small integer capacities, which keeps every query exact.

use crate::biset::{full_mask, Biset, FAMILY_NODE_CAP};
use crate::error::{Error, Result};
use crate::instance::ConnectivityKind;
use std::collections::BTreeSet;
use std::collections::VecDeque;

/// Directed flow network with integer capacities; antiparallel arcs allowed.
pub struct FlowNetwork {
    n: usize,
    // arc = (to, cap); arcs stored in pairs with their reverse.
    arcs: Vec<(usize, i64)>,
    adj: Vec<Vec<usize>>,
}

impl FlowNetwork {
    pub fn new(n: usize) -> Self {
        FlowNetwork { n, arcs: Vec::new(), adj: vec![Vec::new(); n] }
    }

    pub fn add_arc(&mut self, from: usize, to: usize, cap: i64) {
        debug_assert!(cap >= 0);
        let id = self.arcs.len();
        self.arcs.push((to, cap));
        self.arcs.push((from, 0));
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
    }

    /// Edmonds-Karp maximum flow from `s` to `t`.
    pub fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut flow = 0;
        loop {
            let mut prev: Vec<Option<usize>> = vec![None; self.n];
            let mut seen = vec![false; self.n];
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            'bfs: while let Some(u) = queue.pop_front() {
                for &aid in &self.adj[u] {
                    let (to, cap) = self.arcs[aid];
                    if cap > 0 && !seen[to] {
                        seen[to] = true;
                        prev[to] = Some(aid);
                        if to == t {
                            break 'bfs;
                        }
                        queue.push_back(to);
                    }
                }
            }
            if !seen[t] {
                return flow;
            }
            let mut bottleneck = i64::MAX;
            let mut v = t;
            while v != s {
                let aid = prev[v].unwrap();
                bottleneck = bottleneck.min(self.arcs[aid].1);
                v = self.arcs[aid ^ 1].0;
            }
            let mut v = t;
            while v != s {
                let aid = prev[v].unwrap();
                self.arcs[aid].1 -= bottleneck;
                self.arcs[aid ^ 1].1 += bottleneck;
                v = self.arcs[aid ^ 1].0;
            }
            flow += bottleneck;
        }
    }
}

fn multiplicities(n: usize, edges: &[(usize, usize)]) -> Vec<((usize, usize), i64)> {
    let mut counts: std::collections::BTreeMap<(usize, usize), i64> = Default::default();
    for &(u, v) in edges {
        debug_assert!(u < n && v < n && u != v);
        let key = (u.min(v), u.max(v));
        *counts.entry(key).or_insert(0) += 1;
    }
    counts.into_iter().collect()
}

/// Maximum number of edge-disjoint s-t paths.
pub fn edge_connectivity(n: usize, edges: &[(usize, usize)], s: usize, t: usize) -> u32 {
    assert_ne!(s, t);
    let mut net = FlowNetwork::new(n);
    for ((u, v), m) in multiplicities(n, edges) {
        net.add_arc(u, v, m);
        net.add_arc(v, u, m);
    }
    net.max_flow(s, t) as u32
}

/// Maximum number of inner-disjoint s-t paths, via node splitting. Every
/// node except `s` and `t` becomes an in/out pair of capacity one; direct
/// s-t edges pass through untouched, so the count follows Menger when the
/// pair is adjacent.
pub fn node_connectivity(n: usize, edges: &[(usize, usize)], s: usize, t: usize) -> u32 {
    split_connectivity(n, edges, &(0..n).filter(|&v| v == s || v == t).collect(), s, t)
}

/// Maximum number of s-t paths disjoint in edges and non-terminal nodes.
/// Only non-terminals are split; `s` and `t` must be terminals.
pub fn element_connectivity(
    n: usize,
    edges: &[(usize, usize)],
    terminals: &BTreeSet<usize>,
    s: usize,
    t: usize,
) -> Result<u32> {
    if !terminals.contains(&s) || !terminals.contains(&t) {
        return Err(Error::validation(
            "element connectivity is defined only between terminals",
        ));
    }
    Ok(split_connectivity(n, edges, terminals, s, t))
}

/// Max flow where nodes outside `unsplit` are split into in/out pairs of
/// capacity one. Node ids: v_in = v, v_out = v + n (only for split nodes).
fn split_connectivity(
    n: usize,
    edges: &[(usize, usize)],
    unsplit: &BTreeSet<usize>,
    s: usize,
    t: usize,
) -> u32 {
    assert_ne!(s, t);
    let mut net = FlowNetwork::new(2 * n);
    let out_of = |v: usize| if unsplit.contains(&v) { v } else { v + n };
    for v in 0..n {
        if !unsplit.contains(&v) {
            net.add_arc(v, v + n, 1);
        }
    }
    for ((u, v), m) in multiplicities(n, edges) {
        net.add_arc(out_of(u), v, m);
        net.add_arc(out_of(v), u, m);
    }
    net.max_flow(out_of(s), t) as u32
}

/// Dispatch on the connectivity kind.
pub fn connectivity(
    kind: ConnectivityKind,
    n: usize,
    edges: &[(usize, usize)],
    terminals: &BTreeSet<usize>,
    s: usize,
    t: usize,
) -> Result<u32> {
    match kind {
        ConnectivityKind::Edge => Ok(edge_connectivity(n, edges, s, t)),
        ConnectivityKind::Node => Ok(node_connectivity(n, edges, s, t)),
        ConnectivityKind::Element => element_connectivity(n, edges, terminals, s, t),
    }
}

fn cut_value(kind: ConnectivityKind, edges: &[(usize, usize)], b: &Biset) -> u32 {
    let crossing = edges.iter().filter(|&&(u, v)| b.covers_undirected(u, v)).count() as u32;
    match kind {
        ConnectivityKind::Edge => crossing,
        ConnectivityKind::Node | ConnectivityKind::Element => crossing + b.boundary_size(),
    }
}

/// All bisets of the matching kind separating `(s, t)` with minimum cut
/// value: crossing edges for the edge kind, crossing edges plus boundary
/// size otherwise; element-kind boundaries avoid terminals. Used by tests to
/// cross-check family enumeration against the flow queries.
pub fn min_cut_bisets(
    kind: ConnectivityKind,
    n: usize,
    edges: &[(usize, usize)],
    terminals: &BTreeSet<usize>,
    s: usize,
    t: usize,
) -> Result<Vec<Biset>> {
    if n > FAMILY_NODE_CAP {
        return Err(Error::cap("cut enumeration supports at most 14 nodes".to_string()));
    }
    let mut best: Option<u32> = None;
    let mut out: Vec<Biset> = Vec::new();
    let mut push = |b: Biset, val: u32| match best {
        Some(v) if val > v => {}
        Some(v) if val == v => out.push(b),
        _ => {
            best = Some(val);
            out.clear();
            out.push(b);
        }
    };
    match kind {
        ConnectivityKind::Edge => {
            for set in 1..full_mask(n) {
                let b = Biset::plain(set);
                if b.separates(s, t) {
                    let val = cut_value(kind, edges, &b);
                    push(b, val);
                }
            }
        }
        ConnectivityKind::Node | ConnectivityKind::Element => {
            let excluded = if kind == ConnectivityKind::Element {
                terminals.iter().fold(0u32, |acc, &v| acc | (1 << v))
            } else {
                0
            };
            for code in 0..3u64.pow(n as u32) {
                let mut inner = 0u32;
                let mut boundary = 0u32;
                let mut c = code;
                for i in 0..n {
                    match c % 3 {
                        1 => inner |= 1 << i,
                        2 => boundary |= 1 << i,
                        _ => {}
                    }
                    c /= 3;
                }
                if inner == 0 || boundary & excluded != 0 {
                    continue;
                }
                let b = Biset::new(inner, inner | boundary).unwrap();
                if b.separates(s, t) {
                    let val = cut_value(kind, edges, &b);
                    push(b, val);
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exhaustive disjoint-path oracle: enumerate simple paths, remove one,
    /// recurse. `forbid_inner` removes inner path nodes outside `keep`.
    fn max_disjoint_paths(
        n: usize,
        edges: &[(usize, usize)],
        s: usize,
        t: usize,
        keep_inner: Option<&BTreeSet<usize>>,
    ) -> u32 {
        fn simple_paths(
            n: usize,
            edges: &[(usize, usize)],
            s: usize,
            t: usize,
        ) -> Vec<Vec<usize>> {
            // Paths as lists of edge indices.
            let mut out = Vec::new();
            let mut stack = vec![(s, Vec::<usize>::new(), 1u32 << s)];
            while let Some((u, path, visited)) = stack.pop() {
                if u == t {
                    out.push(path);
                    continue;
                }
                for (ei, &(a, b)) in edges.iter().enumerate() {
                    if path.contains(&ei) {
                        continue;
                    }
                    let next = if a == u {
                        b
                    } else if b == u {
                        a
                    } else {
                        continue;
                    };
                    if visited & (1 << next) != 0 {
                        continue;
                    }
                    let mut p = path.clone();
                    p.push(ei);
                    stack.push((next, p, visited | (1 << next)));
                }
            }
            let _ = n;
            out
        }
        let mut best = 0;
        for path in simple_paths(n, edges, s, t) {
            // Remove the path's edges; optionally also edges touching its
            // split inner nodes.
            let mut removed_nodes: BTreeSet<usize> = BTreeSet::new();
            if let Some(keep) = keep_inner {
                let mut u = s;
                for &ei in &path {
                    let (a, b) = edges[ei];
                    let next = if a == u { b } else { a };
                    if next != t && !keep.contains(&next) {
                        removed_nodes.insert(next);
                    }
                    u = next;
                }
            }
            let rest: Vec<(usize, usize)> = edges
                .iter()
                .enumerate()
                .filter(|(ei, (a, b))| {
                    !path.contains(ei)
                        && !removed_nodes.contains(a)
                        && !removed_nodes.contains(b)
                })
                .map(|(_, &e)| e)
                .collect();
            best = best.max(1 + max_disjoint_paths(n, &rest, s, t, keep_inner));
        }
        best
    }

    fn k4() -> Vec<(usize, usize)> {
        vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    }

    #[test]
    fn edge_connectivity_basics() {
        assert_eq!(edge_connectivity(2, &[(0, 1), (0, 1)], 0, 1), 2);
        assert_eq!(edge_connectivity(4, &[(0, 1), (2, 3)], 0, 3), 0);
        let oracle = max_disjoint_paths(4, &k4(), 0, 2, None);
        assert_eq!(oracle, 3);
        assert_eq!(edge_connectivity(4, &k4(), 0, 2), 3);
    }

    #[test]
    fn node_connectivity_basics() {
        assert_eq!(node_connectivity(3, &[(0, 1), (1, 2)], 0, 2), 1);
        assert_eq!(node_connectivity(4, &[(0, 1), (2, 3)], 0, 3), 0);
        let all: BTreeSet<usize> = [0, 2].into_iter().collect();
        let oracle = max_disjoint_paths(4, &k4(), 0, 2, Some(&all));
        assert_eq!(oracle, 3);
        assert_eq!(node_connectivity(4, &k4(), 0, 2), 3);
    }

    #[test]
    fn element_connectivity_basics() {
        // s-x-t with x non-terminal plus a direct edge.
        let terms: BTreeSet<usize> = [0, 2].into_iter().collect();
        let g = vec![(0, 1), (1, 2), (0, 2)];
        let oracle = max_disjoint_paths(3, &g, 0, 2, Some(&terms));
        assert_eq!(oracle, 2);
        assert_eq!(element_connectivity(3, &g, &terms, 0, 2).unwrap(), 2);

        // s-x-t with x terminal and doubled edges: not limited by x.
        let terms: BTreeSet<usize> = [0, 1, 2].into_iter().collect();
        let g = vec![(0, 1), (0, 1), (1, 2), (1, 2)];
        let oracle = max_disjoint_paths(3, &g, 0, 2, Some(&terms));
        assert_eq!(oracle, 2);
        assert_eq!(element_connectivity(3, &g, &terms, 0, 2).unwrap(), 2);

        assert_eq!(
            element_connectivity(4, &[(0, 1), (2, 3)], &[0, 3].into_iter().collect(), 0, 3)
                .unwrap(),
            0
        );
        assert!(element_connectivity(3, &g, &[0].into_iter().collect(), 0, 2).is_err());
    }

    #[test]
    fn element_kind_coincidences() {
        // terminals = V: element == edge; terminals = {s,t}, no direct edge:
        // element == node.
        let g = vec![(0, 1), (1, 2), (2, 3), (0, 2), (1, 3)];
        let all: BTreeSet<usize> = (0..4).collect();
        let st: BTreeSet<usize> = [0, 3].into_iter().collect();
        for (s, t) in [(0usize, 3usize), (1, 2)] {
            assert_eq!(
                element_connectivity(4, &g, &all, s, t).unwrap(),
                edge_connectivity(4, &g, s, t)
            );
        }
        assert_eq!(
            element_connectivity(4, &g, &st, 0, 3).unwrap(),
            node_connectivity(4, &g, 0, 3)
        );
    }

    #[test]
    fn min_cut_biset_enumeration() {
        let terms: BTreeSet<usize> = BTreeSet::new();
        // Single edge, edge kind: the two side choices of value 1.
        let cuts =
            min_cut_bisets(ConnectivityKind::Edge, 2, &[(0, 1)], &terms, 0, 1).unwrap();
        assert_eq!(cuts, vec![Biset::plain(0b01), Biset::plain(0b10)]);

        // Path s-x-t, node kind: ({s},{s,x}) must be among the value-1 cuts.
        let cuts =
            min_cut_bisets(ConnectivityKind::Node, 3, &[(0, 1), (1, 2)], &terms, 0, 2).unwrap();
        let want = Biset::new(0b001, 0b011).unwrap();
        assert!(cuts.contains(&want));
        assert_eq!(node_connectivity(3, &[(0, 1), (1, 2)], 0, 2), 1);

        // K3, edge kind: minimum cuts have value 2 = edge connectivity.
        let g = vec![(0, 1), (1, 2), (0, 2)];
        let cuts = min_cut_bisets(ConnectivityKind::Edge, 3, &g, &terms, 0, 1).unwrap();
        for b in &cuts {
            assert_eq!(g.iter().filter(|&&(u, v)| b.covers_undirected(u, v)).count(), 2);
        }
        assert_eq!(edge_connectivity(3, &g, 0, 1), 2);
    }

    #[test]
    fn menger_duality_on_random_small_graphs() {
        // Connectivity equals the minimum enumerated cut value of the kind.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let n = rng.gen_range(3..6);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    for _ in 0..rng.gen_range(0..3) {
                        if rng.gen_bool(0.6) {
                            edges.push((u, v));
                        }
                    }
                }
            }
            let s = 0;
            let t = n - 1;
            let terms: BTreeSet<usize> = [s, t, rng.gen_range(0..n)].into_iter().collect();
            for kind in [ConnectivityKind::Edge, ConnectivityKind::Node, ConnectivityKind::Element]
            {
                let conn = connectivity(kind, n, &edges, &terms, s, t).unwrap();
                let cuts = min_cut_bisets(kind, n, &edges, &terms, s, t).unwrap();
                let min_cut = cuts
                    .first()
                    .map(|b| cut_value(kind, &edges, b))
                    .unwrap_or(u32::MAX);
                assert_eq!(conn, min_cut, "kind {kind:?} n {n} edges {edges:?}");
            }
        }
    }

    #[test]
    fn flow_oracle_agreement_on_random_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..25 {
            let n = rng.gen_range(3..6);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.55) {
                        edges.push((u, v));
                        if rng.gen_bool(0.25) {
                            edges.push((u, v));
                        }
                    }
                }
            }
            let (s, t) = (0, n - 1);
            assert_eq!(
                edge_connectivity(n, &edges, s, t),
                max_disjoint_paths(n, &edges, s, t, None)
            );
            let st: BTreeSet<usize> = [s, t].into_iter().collect();
            assert_eq!(
                node_connectivity(n, &edges, s, t),
                max_disjoint_paths(n, &edges, s, t, Some(&st))
            );
        }
    }
}
