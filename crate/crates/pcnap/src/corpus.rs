//! Deterministic instance constructions: the integrality-gap star, the
//! shared-boundary family that motivates the potential function, and a
//! seeded random corpus used by the batch tests.

use crate::biset::{Biset, BisetFamily};
use crate::error::{Error, Result};
use crate::instance::Instance;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Star instance whose natural relaxation is worth only `1/m`: one demand
/// across a biset with `m` parallel candidate edges into a hub `u`, each
/// activated by weight 1 on `u` alone. Leaves are pre-connected by a base
/// path, so exactly one biset class separates the demand.
pub fn gap_instance(m: usize) -> Result<Instance> {
    if m < 2 {
        return Err(Error::validation("gap construction needs at least 2 edges"));
    }
    let mut nodes = vec!["u".to_string()];
    for i in 1..=m {
        nodes.push(format!("w{i}"));
    }
    let base: Vec<serde_json::Value> = (1..m)
        .map(|i| serde_json::json!([format!("w{i}"), format!("w{}", i + 1)]))
        .collect();
    let cands: Vec<serde_json::Value> = (1..=m)
        .map(|i| serde_json::json!({"ends": ["u", format!("w{i}")], "activation": [[1, 0]]}))
        .collect();
    let doc = serde_json::json!({
        "connectivity": "edge",
        "nodes": nodes,
        "weights": [0, 1],
        "base_edges": base,
        "candidate_edges": cands,
        "demands": [{"s": "w1", "t": "u", "r": 1, "penalty": "inf"}],
    });
    Instance::parse(&doc.to_string())
}

/// Family of `n` nested pairs whose min-core count does not drop when the
/// first spider is taken: inner members are covered from a head `h` that
/// sits in every outer member's boundary, so `n` new min-cores replace the
/// old ones while the potential still falls.
pub fn potential_demo(n: usize) -> (Instance, BisetFamily) {
    assert!(n >= 1);
    let mut nodes = vec!["h".to_string(), "r".to_string()];
    for i in 1..=n {
        nodes.push(format!("x{i}"));
    }
    let mut cands: Vec<serde_json::Value> = Vec::new();
    for i in 1..=n {
        cands.push(serde_json::json!({"ends": ["h", format!("x{i}")], "activation": [[1, 0]]}));
        cands.push(serde_json::json!({"ends": ["r", format!("x{i}")], "activation": [[1, 1]]}));
    }
    let doc = serde_json::json!({
        "connectivity": "edge",
        "nodes": nodes,
        "weights": [0, 1],
        "base_edges": [],
        "candidate_edges": cands,
        "demands": [],
    });
    let inst = Instance::parse(&doc.to_string()).expect("demo instance is valid");
    let mut members = Vec::new();
    for i in 1..=n {
        let x = 1u32 << (i + 1);
        members.push(Biset::new(x, x).unwrap());
        members.push(Biset::new(x, x | 1).unwrap());
    }
    let fam = BisetFamily::synthetic(inst.n(), members);
    debug_assert!(fam.is_uncrossable());
    (inst, fam)
}

#[derive(Debug, Clone)]
pub struct CorpusParams {
    pub count: usize,
    pub min_nodes: usize,
    pub max_nodes: usize,
    pub max_weight_values: usize,
    pub max_demands: usize,
    pub max_requirement: u32,
    pub allow_infinite_penalties: bool,
}

impl Default for CorpusParams {
    fn default() -> Self {
        CorpusParams {
            count: 10,
            min_nodes: 4,
            max_nodes: 6,
            max_weight_values: 3,
            max_demands: 2,
            max_requirement: 2,
            allow_infinite_penalties: false,
        }
    }
}

impl CorpusParams {
    fn validate(&self) -> Result<()> {
        if self.min_nodes < 2 || self.min_nodes > self.max_nodes || self.max_nodes > 8 {
            return Err(Error::validation("corpus node bounds must satisfy 2 <= min <= max <= 8"));
        }
        if self.max_weight_values < 2 || self.max_weight_values > 3 {
            return Err(Error::validation("corpus weight sets are capped at 2..=3 values"));
        }
        if self.max_requirement == 0 || self.max_requirement > 2 {
            return Err(Error::validation("corpus requirements are capped at 1..=2"));
        }
        if self.max_demands == 0 {
            return Err(Error::validation("corpus needs at least one demand slot"));
        }
        Ok(())
    }
}

/// Seeded pseudo-random instances, alternating edge and element kinds. The
/// same seed and parameters always produce byte-identical documents.
pub fn generate(seed: u64, params: &CorpusParams) -> Result<Vec<Instance>> {
    params.validate()?;
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(params.count);
    for idx in 0..params.count {
        let sub = master.gen::<u64>();
        out.push(generate_one(sub, idx, params)?);
    }
    Ok(out)
}

fn generate_one(seed: u64, idx: usize, params: &CorpusParams) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(params.min_nodes..=params.max_nodes);
    let names: Vec<String> = (0..n).map(|i| format!("{}", (b'a' + i as u8) as char)).collect();
    let wk = rng.gen_range(2..=params.max_weight_values);
    let weights: Vec<i64> = (0..wk as i64).collect();

    // Random spanning tree plus a few extras; every edge is base or
    // candidate.
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.push((u, v));
    }
    for _ in 0..rng.gen_range(0..=n / 2 + 1) {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v {
            edges.push((u.min(v), u.max(v)));
        }
    }
    let mut base: Vec<(usize, usize)> = Vec::new();
    let mut cand_pairs: Vec<(usize, usize)> = Vec::new();
    for &e in &edges {
        if rng.gen_bool(0.25) {
            base.push(e);
        } else if !cand_pairs.contains(&e) {
            cand_pairs.push(e);
        } else {
            base.push(e);
        }
    }
    if cand_pairs.is_empty() {
        cand_pairs.push(edges[0]);
        base.retain(|&e| e != edges[0]);
    }
    cand_pairs.sort();

    let cands: Vec<serde_json::Value> = cand_pairs
        .iter()
        .map(|&(u, v)| {
            let k = rng.gen_range(1..=2);
            let mut pairs: Vec<[i64; 2]> = Vec::new();
            for _ in 0..k {
                let mut i = rng.gen_range(0..wk as i64);
                let mut j = rng.gen_range(0..wk as i64);
                if i == 0 && j == 0 && !rng.gen_bool(0.1) {
                    i = rng.gen_range(1..wk as i64);
                    j = rng.gen_range(0..wk as i64);
                }
                pairs.push([i, j]);
            }
            serde_json::json!({"ends": [names[u], names[v]], "activation": pairs})
        })
        .collect();

    let d = rng.gen_range(1..=params.max_demands);
    let mut demands: Vec<serde_json::Value> = Vec::new();
    let mut seen: Vec<(usize, usize)> = Vec::new();
    for _ in 0..d {
        let s = rng.gen_range(0..n);
        let t = rng.gen_range(0..n);
        if s == t || seen.contains(&(s.min(t), s.max(t))) {
            continue;
        }
        seen.push((s.min(t), s.max(t)));
        let r = rng.gen_range(1..=params.max_requirement);
        let penalty: serde_json::Value =
            if params.allow_infinite_penalties && rng.gen_bool(0.15) {
                "inf".into()
            } else {
                let num = rng.gen_range(0..=8i64);
                if rng.gen_bool(0.3) {
                    format!("{num}/2").into()
                } else {
                    num.into()
                }
            };
        demands.push(serde_json::json!({
            "s": names[s], "t": names[t], "r": r, "penalty": penalty,
        }));
    }
    if demands.is_empty() {
        let s = 0;
        let t = n - 1;
        demands.push(serde_json::json!({
            "s": names[s], "t": names[t], "r": 1, "penalty": 4,
        }));
    }

    let base_json: Vec<serde_json::Value> = {
        let mut b = base.clone();
        b.sort();
        b.iter().map(|&(u, v)| serde_json::json!([names[u], names[v]])).collect()
    };
    let kind = if idx % 2 == 0 { "edge" } else { "element" };
    let doc = serde_json::json!({
        "connectivity": kind,
        "nodes": names,
        "weights": weights,
        "base_edges": base_json,
        "candidate_edges": cands,
        "demands": demands,
    });
    Instance::parse(&doc.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_instance_shape() {
        let inst = gap_instance(5).unwrap();
        assert_eq!(inst.n(), 6);
        assert_eq!(inst.candidates.len(), 5);
        assert_eq!(inst.base_edges.len(), 4);
        assert_eq!(inst.demands.len(), 1);
        assert!(gap_instance(1).is_err());
    }

    #[test]
    fn generation_is_deterministic() {
        let p = CorpusParams { count: 6, ..Default::default() };
        let a = generate(42, &p).unwrap();
        let b = generate(42, &p).unwrap();
        let da: Vec<String> = a.iter().map(|i| i.to_canonical_json()).collect();
        let db: Vec<String> = b.iter().map(|i| i.to_canonical_json()).collect();
        assert_eq!(da, db);
        let c = generate(43, &p).unwrap();
        let dc: Vec<String> = c.iter().map(|i| i.to_canonical_json()).collect();
        assert_ne!(da, dc);
    }

    #[test]
    fn generated_instances_round_trip() {
        let p = CorpusParams { count: 8, allow_infinite_penalties: true, ..Default::default() };
        for inst in generate(7, &p).unwrap() {
            let canon = inst.to_canonical_json();
            let re = Instance::parse(&canon).unwrap();
            assert_eq!(re.to_canonical_json(), canon);
        }
    }

    #[test]
    fn oversize_bounds_rejected() {
        let p = CorpusParams { max_nodes: 9, ..Default::default() };
        assert!(generate(1, &p).is_err());
        let p = CorpusParams { max_weight_values: 4, ..Default::default() };
        assert!(generate(1, &p).is_err());
    }
}
