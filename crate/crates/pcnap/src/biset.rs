//! Biset algebra and explicit biset families.
//!
//! A biset is an ordered pair of node sets `(inner, outer)` with
//! `inner ⊆ outer`; the boundary is `outer \ inner`. Families are stored
//! explicitly (node counts are capped at [`FAMILY_NODE_CAP`]) so every
//! structural predicate can be evaluated exhaustively.

use crate::connectivity;
use crate::error::{Error, Result};
use crate::instance::{ConnectivityKind, Instance};
use std::collections::BTreeSet;

/// Node-count cap for explicit family enumeration (3^n partitions).
pub const FAMILY_NODE_CAP: usize = 14;

pub type NodeMask = u32;

pub fn mask_nodes(mask: NodeMask) -> impl Iterator<Item = usize> {
    (0..32).filter(move |i| mask & (1 << i) != 0)
}

pub fn full_mask(n: usize) -> NodeMask {
    if n == 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Biset {
    inner: NodeMask,
    outer: NodeMask,
}

impl Biset {
    pub fn new(inner: NodeMask, outer: NodeMask) -> Result<Self> {
        if inner & !outer != 0 {
            return Err(Error::validation(
                "biset inner-part must be a subset of its outer-part",
            ));
        }
        Ok(Biset { inner, outer })
    }

    /// Biset with equal inner and outer part (empty boundary).
    pub fn plain(set: NodeMask) -> Self {
        Biset { inner: set, outer: set }
    }

    pub fn inner(&self) -> NodeMask {
        self.inner
    }

    pub fn outer(&self) -> NodeMask {
        self.outer
    }

    pub fn boundary(&self) -> NodeMask {
        self.outer & !self.inner
    }

    pub fn boundary_size(&self) -> u32 {
        self.boundary().count_ones()
    }

    pub fn intersect(&self, other: &Biset) -> Biset {
        Biset { inner: self.inner & other.inner, outer: self.outer & other.outer }
    }

    pub fn union(&self, other: &Biset) -> Biset {
        Biset { inner: self.inner | other.inner, outer: self.outer | other.outer }
    }

    /// Componentwise difference: `(X \ Y⁺, X⁺ \ Y)`.
    pub fn subtract(&self, other: &Biset) -> Biset {
        Biset { inner: self.inner & !other.outer, outer: self.outer & !other.inner }
    }

    pub fn is_subset(&self, other: &Biset) -> bool {
        self.inner & !other.inner == 0 && self.outer & !other.outer == 0
    }

    pub fn strongly_disjoint(&self, other: &Biset) -> bool {
        self.inner & other.outer == 0 && self.outer & other.inner == 0
    }

    pub fn comparable(&self, other: &Biset) -> bool {
        self.is_subset(other) || other.is_subset(self)
    }

    /// Undirected cover test: one end-node in the inner-part, the other
    /// outside the outer-part.
    pub fn covers_undirected(&self, u: usize, v: usize) -> bool {
        self.covers_directed(u, v) || self.covers_directed(v, u)
    }

    /// Directed cover test: head in the inner-part, tail outside the
    /// outer-part.
    pub fn covers_directed(&self, tail: usize, head: usize) -> bool {
        self.inner & (1 << head) != 0 && self.outer & (1 << tail) == 0
    }

    /// Does this biset separate the pair `{s, t}`?
    pub fn separates(&self, s: usize, t: usize) -> bool {
        let pair = (1u32 << s) | (1 << t);
        (self.inner & pair).count_ones() == 1 && (pair & !self.outer).count_ones() == 1
    }

    pub fn format(&self, names: &[String]) -> String {
        let join = |m: NodeMask| {
            mask_nodes(m)
                .map(|i| names[i].as_str())
                .collect::<Vec<_>>()
                .join(",")
        };
        format!("{{{}|{}}}", join(self.inner), join(self.boundary()))
    }
}

pub fn strongly_disjoint(a: &Biset, b: &Biset) -> bool {
    a.strongly_disjoint(b)
}

/// Edges of `edges` covering `b` (undirected sense), with multiplicity.
pub fn delta<'a>(edges: &'a [(usize, usize)], b: &'a Biset) -> impl Iterator<Item = (usize, usize)> + 'a {
    edges.iter().copied().filter(move |&(u, v)| b.covers_undirected(u, v))
}

pub fn delta_count(edges: &[(usize, usize)], b: &Biset) -> usize {
    delta(edges, b).count()
}

/// An explicit biset family over `n` nodes. Members are kept sorted by the
/// canonical `(inner, outer)` encoding; `labels[i]` holds the indices of the
/// demands member `i` separates (empty for synthetic families).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BisetFamily {
    n: usize,
    members: Vec<Biset>,
    labels: Vec<BTreeSet<usize>>,
}

impl BisetFamily {
    pub fn new(n: usize, mut entries: Vec<(Biset, BTreeSet<usize>)>) -> Self {
        entries.sort_by_key(|(b, _)| *b);
        let mut members: Vec<Biset> = Vec::with_capacity(entries.len());
        let mut labels: Vec<BTreeSet<usize>> = Vec::with_capacity(entries.len());
        for (b, l) in entries {
            if members.last() == Some(&b) {
                let last = labels.last_mut().unwrap();
                last.extend(l);
            } else {
                members.push(b);
                labels.push(l);
            }
        }
        BisetFamily { n, members, labels }
    }

    pub fn synthetic(n: usize, members: Vec<Biset>) -> Self {
        Self::new(n, members.into_iter().map(|b| (b, BTreeSet::new())).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Biset] {
        &self.members
    }

    pub fn labels(&self) -> &[BTreeSet<usize>] {
        &self.labels
    }

    pub fn contains(&self, b: &Biset) -> bool {
        self.members.binary_search(b).is_ok()
    }

    pub fn label_of(&self, b: &Biset) -> Option<&BTreeSet<usize>> {
        self.members.binary_search(b).ok().map(|i| &self.labels[i])
    }

    /// Members separating demand `i`.
    pub fn members_for_demand(&self, demand: usize) -> Vec<Biset> {
        self.members
            .iter()
            .zip(&self.labels)
            .filter(|(_, l)| l.contains(&demand))
            .map(|(b, _)| *b)
            .collect()
    }

    pub fn demand_indices(&self) -> BTreeSet<usize> {
        self.labels.iter().flatten().copied().collect()
    }

    /// Keep only members separating a demand in `keep`; labels are pruned.
    pub fn restrict_demands(&self, keep: &BTreeSet<usize>) -> BisetFamily {
        let entries = self
            .members
            .iter()
            .zip(&self.labels)
            .filter_map(|(b, l)| {
                let pruned: BTreeSet<usize> = l.intersection(keep).copied().collect();
                if pruned.is_empty() {
                    None
                } else {
                    Some((*b, pruned))
                }
            })
            .collect();
        BisetFamily::new(self.n, entries)
    }

    /// Uncrossable: every pair satisfies (i) both intersection and union are
    /// members, or (ii) both componentwise differences are members.
    pub fn is_uncrossable(&self) -> bool {
        for (i, a) in self.members.iter().enumerate() {
            for b in &self.members[i + 1..] {
                let clause_i = self.contains(&a.intersect(b)) && self.contains(&a.union(b));
                let clause_ii = self.contains(&a.subtract(b)) && self.contains(&b.subtract(a));
                if !clause_i && !clause_ii {
                    return false;
                }
            }
        }
        true
    }

    /// Closed under both intersection and union.
    pub fn is_ring(&self) -> bool {
        for (i, a) in self.members.iter().enumerate() {
            for b in &self.members[i + 1..] {
                if !self.contains(&a.intersect(b)) || !self.contains(&a.union(b)) {
                    return false;
                }
            }
        }
        true
    }

    /// Any two non-strongly-disjoint members are comparable.
    pub fn is_strongly_laminar(&self) -> bool {
        for (i, a) in self.members.iter().enumerate() {
            for b in &self.members[i + 1..] {
                if !a.strongly_disjoint(b) && !a.comparable(b) {
                    return false;
                }
            }
        }
        true
    }

    /// Inclusion-minimal members.
    pub fn min_cores(&self) -> BisetFamily {
        let entries = self
            .members
            .iter()
            .zip(&self.labels)
            .filter(|(b, _)| {
                !self
                    .members
                    .iter()
                    .any(|o| o != *b && o.is_subset(b))
            })
            .map(|(b, l)| (*b, l.clone()))
            .collect();
        BisetFamily::new(self.n, entries)
    }

    fn min_core_count_in(&self, b: &Biset, min_cores: &[Biset]) -> usize {
        min_cores.iter().filter(|m| m.is_subset(b)).count()
    }

    /// Members including exactly one min-core.
    pub fn cores(&self) -> BisetFamily {
        let mc = self.min_cores();
        let entries = self
            .members
            .iter()
            .zip(&self.labels)
            .filter(|(b, _)| self.min_core_count_in(b, mc.members()) == 1)
            .map(|(b, l)| (*b, l.clone()))
            .collect();
        BisetFamily::new(self.n, entries)
    }

    /// Cores including the min-core `c`. Errors when `c` is not a min-core.
    pub fn cores_above(&self, c: &Biset) -> Result<BisetFamily> {
        let mc = self.min_cores();
        if !mc.contains(c) {
            return Err(Error::validation("cores_above requires a min-core"));
        }
        let cores = self.cores();
        let entries = cores
            .members
            .iter()
            .zip(&cores.labels)
            .filter(|(b, _)| c.is_subset(b))
            .map(|(b, l)| (*b, l.clone()))
            .collect();
        Ok(BisetFamily::new(self.n, entries))
    }

    /// Cores above `c` additionally avoiding node `v` in their outer-part.
    pub fn cores_above_avoiding(&self, c: &Biset, v: usize) -> Result<BisetFamily> {
        let above = self.cores_above(c)?;
        let entries = above
            .members
            .iter()
            .zip(&above.labels)
            .filter(|(b, _)| b.outer() & (1 << v) == 0)
            .map(|(b, l)| (*b, l.clone()))
            .collect();
        Ok(BisetFamily::new(self.n, entries))
    }

    /// Members covered by no edge of `edges` (undirected coverage).
    pub fn residual(&self, edges: &[(usize, usize)]) -> BisetFamily {
        let entries = self
            .members
            .iter()
            .zip(&self.labels)
            .filter(|(b, _)| !edges.iter().any(|&(u, v)| b.covers_undirected(u, v)))
            .map(|(b, l)| (*b, l.clone()))
            .collect();
        BisetFamily::new(self.n, entries)
    }

    /// Max boundary size over members (0 for an empty family).
    pub fn gamma(&self) -> u32 {
        self.members.iter().map(|b| b.boundary_size()).max().unwrap_or(0)
    }

    /// One member per line as `inner|boundary|labels`, nodes by name.
    pub fn dump(&self, names: &[String]) -> String {
        let mut out = String::new();
        for (b, l) in self.members.iter().zip(&self.labels) {
            let join = |m: NodeMask| {
                mask_nodes(m)
                    .map(|i| names[i].as_str())
                    .collect::<Vec<_>>()
                    .join(",")
            };
            let labels = l.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",");
            out.push_str(&format!("{}|{}|{}\n", join(b.inner()), join(b.boundary()), labels));
        }
        out
    }
}

/// Test utility for the ring-cover degree lemma: errors when `cover` (a set
/// of directed edges) does not cover the family; otherwise reports whether
/// every node has in-degree and out-degree at most one.
pub fn check_ring_cover_degrees(
    family: &BisetFamily,
    cover: &[(usize, usize)],
) -> Result<bool> {
    for b in family.members() {
        if !cover.iter().any(|&(t, h)| b.covers_directed(t, h)) {
            return Err(Error::validation("edge set does not cover the family"));
        }
    }
    let mut indeg = vec![0usize; family.n()];
    let mut outdeg = vec![0usize; family.n()];
    for &(t, h) in cover {
        outdeg[t] += 1;
        indeg[h] += 1;
    }
    Ok(indeg.iter().all(|&d| d <= 1) && outdeg.iter().all(|&d| d <= 1))
}

fn check_family_precondition(
    inst: &Instance,
    e0: &[(usize, usize)],
    active: &BTreeSet<usize>,
    target_k: u32,
) -> Result<()> {
    if target_k == 0 {
        return Err(Error::validation("target connectivity must be at least 1"));
    }
    for &i in active {
        let d = &inst.demands[i];
        let have = connectivity::connectivity(inst.kind, inst.n(), e0, &inst.terminals(), d.s, d.t)?;
        if have + 1 < target_k {
            return Err(Error::validation(format!(
                "demand {i} has connectivity {have} < {} in the base graph",
                target_k - 1
            )));
        }
    }
    Ok(())
}

/// Enumerate the deficient bisets of the matching kind: cut value exactly
/// `target_k - 1` against `e0`, separating some active demand. Both side
/// orientations are kept. Edge kind members have empty boundaries; element
/// kind members exclude terminals from their boundaries.
pub fn build_family(
    inst: &Instance,
    e0: &[(usize, usize)],
    active: &BTreeSet<usize>,
    target_k: u32,
) -> Result<BisetFamily> {
    let n = inst.n();
    if n > FAMILY_NODE_CAP {
        return Err(Error::cap(format!(
            "family enumeration supports at most {FAMILY_NODE_CAP} nodes, instance has {n}"
        )));
    }
    check_family_precondition(inst, e0, active, target_k)?;
    let deficiency = target_k - 1;
    let demand_pairs: Vec<(usize, usize, usize)> = active
        .iter()
        .map(|&i| (i, inst.demands[i].s, inst.demands[i].t))
        .collect();

    let entries = match inst.kind {
        ConnectivityKind::Edge => enumerate_plain(n, e0, &demand_pairs, deficiency),
        ConnectivityKind::Element => {
            let terminals = inst
                .terminals()
                .iter()
                .fold(0u32, |acc, &v| acc | (1 << v));
            enumerate_bisets(n, e0, &demand_pairs, deficiency, Some(terminals))
        }
        ConnectivityKind::Node => enumerate_bisets(n, e0, &demand_pairs, deficiency, None),
    };
    Ok(BisetFamily::new(n, entries))
}

fn labels_for(b: &Biset, demand_pairs: &[(usize, usize, usize)]) -> BTreeSet<usize> {
    demand_pairs
        .iter()
        .filter(|&&(_, s, t)| b.separates(s, t))
        .map(|&(i, _, _)| i)
        .collect()
}

fn enumerate_plain(
    n: usize,
    e0: &[(usize, usize)],
    demand_pairs: &[(usize, usize, usize)],
    deficiency: u32,
) -> Vec<(Biset, BTreeSet<usize>)> {
    let top = full_mask(n);
    let scan = |set: u32| -> Option<(Biset, BTreeSet<usize>)> {
        if set == 0 || set == top {
            return None;
        }
        let b = Biset::plain(set);
        let labels = labels_for(&b, demand_pairs);
        if labels.is_empty() {
            return None;
        }
        if delta_count(e0, &b) as u32 != deficiency {
            return None;
        }
        Some((b, labels))
    };
    crate::par::map_masks(1u64 << n, |m| scan(m as u32))
}

/// Enumerate (inner, boundary) partitions: each node is inner, boundary, or
/// outside, i.e. 3^n candidates.
fn enumerate_bisets(
    n: usize,
    e0: &[(usize, usize)],
    demand_pairs: &[(usize, usize, usize)],
    deficiency: u32,
    boundary_excluded: Option<NodeMask>,
) -> Vec<(Biset, BTreeSet<usize>)> {
    let total: u64 = 3u64.pow(n as u32);
    let scan = |code: u64| -> Option<(Biset, BTreeSet<usize>)> {
        let mut inner: NodeMask = 0;
        let mut boundary: NodeMask = 0;
        let mut c = code;
        for i in 0..n {
            match c % 3 {
                1 => inner |= 1 << i,
                2 => boundary |= 1 << i,
                _ => {}
            }
            c /= 3;
        }
        if inner == 0 {
            return None;
        }
        if let Some(excluded) = boundary_excluded {
            if boundary & excluded != 0 {
                return None;
            }
        }
        let b = Biset { inner, outer: inner | boundary };
        let labels = labels_for(&b, demand_pairs);
        if labels.is_empty() {
            return None;
        }
        if delta_count(e0, &b) as u32 + boundary.count_ones() != deficiency {
            return None;
        }
        Some((b, labels))
    };
    crate::par::map_masks(total, scan)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(inner: &[usize], outer: &[usize]) -> Biset {
        let m = |xs: &[usize]| xs.iter().fold(0u32, |acc, &i| acc | (1 << i));
        Biset::new(m(inner), m(outer)).unwrap()
    }

    #[test]
    fn algebra_matches_definitions() {
        let a = b(&[1], &[1, 2]);
        let c = b(&[2], &[2, 3]);
        assert_eq!(a.subtract(&c), b(&[1], &[1]));
        assert_eq!(a.intersect(&a), a);
        assert_eq!(b(&[1], &[1]).union(&b(&[2], &[2])), b(&[1, 2], &[1, 2]));
    }

    #[test]
    fn cover_orientation() {
        let a = b(&[1], &[1, 2]);
        assert!(a.covers_undirected(1, 3));
        assert!(!a.covers_undirected(1, 2));
        assert!(a.covers_directed(3, 1));
        assert!(!a.covers_directed(1, 3));
    }

    #[test]
    fn invalid_biset_rejected() {
        assert!(Biset::new(0b11, 0b01).is_err());
    }

    #[test]
    fn min_cores_and_cores_on_chain() {
        let x1 = b(&[0], &[0]);
        let x2 = b(&[0, 1], &[0, 1]);
        let x3 = b(&[0, 1, 2], &[0, 1, 2]);
        let f = BisetFamily::synthetic(4, vec![x1, x2, x3]);
        assert_eq!(f.min_cores().members(), &[x1]);
        assert_eq!(f.cores().len(), 3);
        assert!(f.is_ring());
        assert!(f.is_strongly_laminar());
        assert!(f.is_uncrossable());
    }

    #[test]
    fn two_disjoint_min_cores() {
        let x = b(&[0], &[0]);
        let y = b(&[1], &[1]);
        let f = BisetFamily::synthetic(3, vec![x, y]);
        assert_eq!(f.min_cores().len(), 2);
        assert_eq!(f.cores().len(), 2);
        assert!(strongly_disjoint(&x, &y));
        // Closed under neither union nor intersection, but differences are members.
        assert!(f.is_uncrossable());
        assert!(!f.is_ring());
    }

    #[test]
    fn crossing_pair_is_not_uncrossable() {
        // Two crossing bisets whose four combinations are all absent.
        let x = b(&[0, 1], &[0, 1]);
        let y = b(&[1, 2], &[1, 2]);
        let f = BisetFamily::synthetic(3, vec![x, y]);
        assert!(!f.is_uncrossable());
        assert!(!f.is_ring());
        assert!(!f.is_strongly_laminar());
    }

    #[test]
    fn residual_drops_covered_members() {
        let x = b(&[0], &[0]);
        let y = b(&[1], &[1]);
        let f = BisetFamily::synthetic(3, vec![x, y]);
        assert_eq!(f.residual(&[]).len(), 2);
        // Edge {0,2} covers x only.
        let r = f.residual(&[(0, 2)]);
        assert_eq!(r.members(), &[y]);
        assert_eq!(f.residual(&[(0, 2), (1, 2)]).len(), 0);
    }

    #[test]
    fn ring_cover_degree_checker() {
        let x1 = b(&[0], &[0]);
        let x2 = b(&[0, 1], &[0, 1]);
        let f = BisetFamily::synthetic(3, vec![x1, x2]);
        // Single directed edge 2 -> 0 covers both.
        assert!(check_ring_cover_degrees(&f, &[(2, 0)]).unwrap());
        // Non-minimal cover with two edges into node 0.
        assert!(!check_ring_cover_degrees(&f, &[(2, 0), (1, 0), (2, 1)]).unwrap());
        // Not a cover at all.
        assert!(check_ring_cover_degrees(&f, &[(0, 1)]).is_err());
    }
}
