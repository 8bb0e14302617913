//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured figures. Run with `cargo test -p pcnap --test acceptance`.

use num::traits::{One, Zero};
use pcnap::biset::{build_family, check_ring_cover_degrees, BisetFamily};
use pcnap::corpus::{gap_instance, generate, potential_demo, CorpusParams};
use pcnap::greedy::greedy_cover;
use pcnap::instance::{ConnectivityKind, Instance};
use pcnap::lp;
use pcnap::oracle::{brute_force_pcnap, OracleResult, DEFAULT_ORACLE_CAP};
use pcnap::rational::{q_ratio, Cost, Q};
use pcnap::solver::{audit, solve_pcnap, SolveConfig, Solution};
use pcnap::spider::verify_spider;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::sync::OnceLock;
use std::time::Instant;

const CORPUS_SEED: u64 = 20268;
const CORPUS_SIZE: usize = 200;

fn corpus() -> &'static [Instance] {
    static CORPUS: OnceLock<Vec<Instance>> = OnceLock::new();
    CORPUS.get_or_init(|| {
        let params = CorpusParams { count: CORPUS_SIZE, ..Default::default() };
        generate(CORPUS_SEED, &params).expect("corpus generation")
    })
}

fn solved() -> &'static [(Solution, OracleResult)] {
    static SOLVED: OnceLock<Vec<(Solution, OracleResult)>> = OnceLock::new();
    SOLVED.get_or_init(|| {
        corpus()
            .iter()
            .enumerate()
            .map(|(i, inst)| {
                let sol = solve_pcnap(inst, &SolveConfig::default(), None, None)
                    .unwrap_or_else(|e| panic!("solve failed on corpus instance {i}: {e}"));
                let oracle = brute_force_pcnap(inst, DEFAULT_ORACLE_CAP)
                    .unwrap_or_else(|e| panic!("oracle failed on corpus instance {i}: {e}"));
                (sol, oracle)
            })
            .collect()
    })
}

fn with_kind(inst: &Instance, kind: ConnectivityKind) -> Instance {
    let mut v = inst.clone();
    v.kind = kind;
    v
}

#[test]
fn criterion_01_integrality_gap_reproduction() {
    for m in [2usize, 3, 5] {
        let start = Instant::now();
        let inst = gap_instance(m).unwrap();
        let demands: BTreeSet<usize> = [0].into_iter().collect();
        let family = build_family(&inst, &inst.base_edges, &demands, 1).unwrap();
        let penalties = [(0, Cost::Infinite)].into_iter().collect();
        let natural = lp::solve(&lp::build_natural_lp(&inst, &family, &penalties).unwrap())
            .unwrap()
            .expect_optimal("natural")
            .unwrap();
        let lifted = lp::solve(&lp::build_pclp(&inst, &family, &penalties).unwrap())
            .unwrap()
            .expect_optimal("pclp")
            .unwrap();
        let oracle = brute_force_pcnap(&inst, DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(natural.objective, q_ratio(1, m as i64), "natural optimum at m={m}");
        assert_eq!(lifted.objective, Q::one(), "lifted optimum at m={m}");
        assert_eq!(oracle.optimum, Cost::Finite(Q::one()), "oracle optimum at m={m}");
        let elapsed = start.elapsed();
        assert!(elapsed.as_secs_f64() < 5.0, "m={m} took {elapsed:?}");
        println!(
            "criterion 1 (m={m}): PASS natural=1/{m} lifted=1 oracle=1 in {elapsed:?}"
        );
    }
}

#[test]
fn criterion_02_relaxation_validity() {
    let start = Instant::now();
    let mut checked = 0usize;
    for (i, inst) in corpus().iter().enumerate() {
        let all: BTreeSet<usize> = (0..inst.demands.len()).collect();
        let family = build_family(inst, &inst.base_edges, &all, 1).unwrap();
        let oracle = &solved()[i].1;
        let opt = oracle.optimum.as_finite().expect("finite-penalty corpus");
        if family.is_empty() {
            continue;
        }
        let penalties = inst
            .demands
            .iter()
            .enumerate()
            .map(|(j, d)| (j, d.penalty.clone()))
            .collect();
        let pclp = lp::build_pclp(inst, &family, &penalties).unwrap();
        let sol = lp::solve(&pclp).unwrap().expect_optimal("pclp").unwrap();
        assert!(
            sol.objective <= *opt,
            "instance {i}: relaxation {} exceeds optimum {}",
            sol.objective,
            opt
        );
        checked += 1;
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 600.0, "criterion 2 took {elapsed:?}");
    println!(
        "criterion 2: PASS {} relaxations at or below the optimum over {} instances in {elapsed:?}",
        checked,
        corpus().len()
    );
}

#[test]
fn criterion_03_uncrossability() {
    let mut families = 0usize;
    for inst in corpus() {
        let indices: Vec<usize> = (0..inst.demands.len()).collect();
        let mut subsets: Vec<BTreeSet<usize>> = Vec::new();
        for mask in 1u32..(1 << indices.len().min(5)) {
            subsets.push(
                indices
                    .iter()
                    .filter(|&&i| mask & (1 << i) != 0)
                    .copied()
                    .collect(),
            );
            if subsets.len() >= 32 {
                break;
            }
        }
        for kind in [ConnectivityKind::Edge, ConnectivityKind::Element] {
            let view = with_kind(inst, kind);
            for d in &subsets {
                let f = build_family(&view, &view.base_edges, d, 1).unwrap();
                assert!(f.is_uncrossable(), "kind {kind:?} subset {d:?}");
                families += 1;
                // Also at target 2 when every chosen demand already has the
                // prerequisite connectivity.
                let ok2 = d.iter().all(|&i| {
                    let dm = &view.demands[i];
                    pcnap::connectivity::connectivity(
                        kind,
                        view.n(),
                        &view.base_edges,
                        &view.terminals(),
                        dm.s,
                        dm.t,
                    )
                    .unwrap()
                        >= 1
                });
                if ok2 {
                    let f2 = build_family(&view, &view.base_edges, d, 2).unwrap();
                    assert!(f2.is_uncrossable(), "kind {kind:?} subset {d:?} target 2");
                    families += 1;
                }
            }
        }
    }
    println!("criterion 3: PASS {families} built families all uncrossable");
}

#[test]
fn criterion_04_menger_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED ^ 4);
    let mut pairs_edge = 0usize;
    let mut pairs_ele = 0usize;
    'outer: for round in 0.. {
        for inst in corpus() {
            for kind in [ConnectivityKind::Edge, ConnectivityKind::Element] {
                let view = with_kind(inst, kind);
                let all: BTreeSet<usize> = (0..view.demands.len()).collect();
                let family = build_family(&view, &view.base_edges, &all, 1).unwrap();
                // Random activated subset.
                let chosen: Vec<usize> = (0..view.candidates.len())
                    .filter(|_| rng.gen_bool(0.5))
                    .collect();
                let f_edges = view.candidate_endpoints(&chosen);
                let mut graph = view.base_edges.clone();
                graph.extend(f_edges.iter().copied());
                let terminals = view.terminals();
                for (i, d) in view.demands.iter().enumerate() {
                    let members = family.members_for_demand(i);
                    let covered = members
                        .iter()
                        .all(|b| f_edges.iter().any(|&(u, v)| b.covers_undirected(u, v)));
                    let conn = pcnap::connectivity::connectivity(
                        kind, view.n(), &graph, &terminals, d.s, d.t,
                    )
                    .unwrap();
                    assert_eq!(
                        covered,
                        conn >= 1,
                        "kind {kind:?} demand {i} round {round}"
                    );
                }
                match kind {
                    ConnectivityKind::Edge => pairs_edge += 1,
                    _ => pairs_ele += 1,
                }
            }
            if pairs_edge >= 100 && pairs_ele >= 100 {
                break 'outer;
            }
        }
    }
    println!(
        "criterion 4: PASS menger equivalence on {pairs_edge} edge-kind and {pairs_ele} element-kind pairs"
    );
}

#[test]
fn criterion_05_ring_cover_degrees() {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED ^ 5);
    let mut checked = 0usize;
    'outer: for inst in corpus().iter().cycle() {
        let all: BTreeSet<usize> = (0..inst.demands.len()).collect();
        let family = build_family(inst, &inst.base_edges, &all, 1).unwrap();
        if family.is_empty() {
            continue;
        }
        for mc in family.min_cores().members() {
            let ring = family.cores_above(mc).unwrap();
            if ring.is_empty() {
                continue;
            }
            assert!(ring.is_ring(), "cores above a min-core must form a ring family");
            // All directed candidate views covering some member.
            let mut arcs: Vec<(usize, usize)> = Vec::new();
            for e in &inst.candidates {
                for (t, h) in [(e.u, e.v), (e.v, e.u)] {
                    if ring.members().iter().any(|b| b.covers_directed(t, h)) {
                        arcs.push((t, h));
                    }
                }
            }
            let full_cover = ring
                .members()
                .iter()
                .all(|b| arcs.iter().any(|&(t, h)| b.covers_directed(t, h)));
            if !full_cover {
                continue;
            }
            // Greedy removal in a random order yields an inclusion-minimal
            // cover.
            let mut cover = arcs.clone();
            let mut order: Vec<usize> = (0..cover.len()).collect();
            for i in (1..order.len()).rev() {
                order.swap(i, rng.gen_range(0..=i));
            }
            for &i in &order {
                let without: Vec<(usize, usize)> = cover
                    .iter()
                    .copied()
                    .filter(|&a| a != arcs[i])
                    .collect();
                let still = ring
                    .members()
                    .iter()
                    .all(|b| without.iter().any(|&(t, h)| b.covers_directed(t, h)));
                if still && without.len() < cover.len() {
                    cover = without;
                }
            }
            assert!(
                check_ring_cover_degrees(&ring, &cover).unwrap(),
                "minimal ring cover with a node of degree two"
            );
            checked += 1;
            if checked >= 100 {
                break 'outer;
            }
        }
    }
    println!("criterion 5: PASS {checked} minimal ring covers with in/out degrees <= 1");
}

#[test]
fn criterion_06_spider_soundness() {
    let mut iterations = 0usize;
    for (i, inst) in corpus().iter().enumerate() {
        let sol = &solved()[i].0;
        for round in &sol.rounds {
            for it in &round.iterations {
                let view = &round.view;
                verify_spider(view, &it.family_before, &it.spider)
                    .unwrap_or_else(|e| panic!("instance {i}: {e}"));
                assert!(it.dual.is_feasible(view), "instance {i}: dual infeasible");
                let m = Q::from_integer(
                    (it.family_before.min_cores().len() as i64).into(),
                );
                let f = Q::from_integer((it.spider.feet_count() as i64).into());
                let w = it.spider.weights.total(&view.weights);
                let zsum = it.dual.core_sum();
                assert!(&w / &f <= &zsum / &m, "instance {i}: density above dual total");
                let laminar = BisetFamily::synthetic(view.n(), it.laminar.clone());
                let simple = lp::solve(&lp::build_simplelp(view, &laminar).unwrap())
                    .unwrap()
                    .expect_optimal("simplelp")
                    .unwrap();
                assert!(
                    zsum <= simple.objective,
                    "instance {i}: dual total above the simple relaxation"
                );
                iterations += 1;
            }
        }
    }
    assert!(iterations > 0, "corpus produced no cover iterations");
    println!(
        "criterion 6: PASS {iterations} spider iterations verified (structure, dual feasibility, density chain)"
    );
}

#[test]
fn criterion_07_simplelp_vs_npclp() {
    let two = Q::from_integer(2.into());
    let mut checked = 0usize;
    for (i, inst) in corpus().iter().enumerate() {
        let sol = &solved()[i].0;
        for round in &sol.rounds {
            for it in &round.iterations {
                let view = &round.view;
                let laminar = BisetFamily::synthetic(view.n(), it.laminar.clone());
                let simple = lp::solve(&lp::build_simplelp(view, &laminar).unwrap())
                    .unwrap()
                    .expect_optimal("simplelp")
                    .unwrap();
                let npclp = lp::solve(&lp::build_npclp(view, &it.family_before).unwrap())
                    .unwrap()
                    .expect_optimal("npclp")
                    .unwrap();
                assert!(
                    simple.objective <= &two * &npclp.objective,
                    "instance {i}: simple {} > 2 x {}",
                    simple.objective,
                    npclp.objective
                );
                checked += 1;
            }
        }
    }
    assert!(checked > 0);
    println!("criterion 7: PASS {checked} laminar relaxations within twice the lifted bound");
}

#[test]
fn criterion_08_potential_decrease() {
    // Every pipeline iteration obeys the decrease bounds.
    let mut checked = 0usize;
    for (i, _) in corpus().iter().enumerate() {
        let sol = &solved()[i].0;
        for round in &sol.rounds {
            for it in &round.iterations {
                let p = &it.potential;
                assert!(p.phi_before > p.phi_after, "instance {i}: no decrease");
                let drop = p.phi_before - p.phi_after;
                assert!(drop >= 1);
                if p.spider_feet >= 2 {
                    assert!(
                        2 * drop >= (p.spider_feet as u64 - 1),
                        "instance {i}: drop {drop} below half of feet-1"
                    );
                }
                checked += 1;
            }
        }
    }
    // The shared-boundary family: the min-core count survives the first
    // spider untouched while the potential still falls by at least (n-1)/2.
    for n in [2usize, 3, 4] {
        let (inst, fam) = potential_demo(n);
        let res = greedy_cover(&inst, &fam, None).unwrap();
        let first = &res.iterations[0];
        let before = first.family_before.min_cores().len();
        let after = res.iterations[1].family_before.min_cores().len();
        assert_eq!(before, n);
        assert_eq!(after, n, "min-core count must not drop at n={n}");
        let drop = first.potential.phi_before - first.potential.phi_after;
        assert!(2 * drop >= (n as u64 - 1), "n={n}");
        assert_eq!(first.potential.phi_before, 3 * n as u64);
        assert_eq!(first.potential.phi_after, 2 * n as u64);
    }
    println!(
        "criterion 8: PASS {checked} pipeline iterations plus the shared-boundary families (n=2,3,4)"
    );
}

#[test]
fn criterion_09_end_to_end_bounds() {
    let mut worst: Option<Q> = None;
    let mut audited = 0usize;
    for (i, inst) in corpus().iter().enumerate() {
        let (sol, oracle) = &solved()[i];
        let report = audit(inst, sol, oracle).unwrap();
        assert!(report.ratio_ok, "instance {i}: ratio check failed");
        assert!(report.penalty_ok, "instance {i}: penalty bound violated");
        assert!(report.lp_bound_ok, "instance {i}: LP total above k x optimum");
        if let Some(r) = &report.ratio {
            if worst.as_ref().map(|w| r > w).unwrap_or(true) {
                worst = Some(r.clone());
            }
        }
        audited += 1;
    }
    let worst = worst.map(|q| q.to_string()).unwrap_or_else(|| "n/a".into());
    println!(
        "criterion 9: PASS {audited} audits; empirical worst objective/optimum ratio = {worst}"
    );
}

#[test]
fn criterion_10_determinism() {
    // Corpus generation.
    let params = CorpusParams { count: 12, ..Default::default() };
    let a: Vec<String> = generate(99, &params)
        .unwrap()
        .iter()
        .map(|i| i.to_canonical_json())
        .collect();
    let b: Vec<String> = generate(99, &params)
        .unwrap()
        .iter()
        .map(|i| i.to_canonical_json())
        .collect();
    assert_eq!(a, b);
    // Solve, oracle, and the gap pipeline.
    for inst in corpus().iter().take(6) {
        let s1 = solve_pcnap(inst, &SolveConfig::default(), None, None).unwrap();
        let s2 = solve_pcnap(inst, &SolveConfig::default(), None, None).unwrap();
        assert_eq!(
            serde_json::to_string(&s1.to_json(inst)).unwrap(),
            serde_json::to_string(&s2.to_json(inst)).unwrap()
        );
        let o1 = brute_force_pcnap(inst, DEFAULT_ORACLE_CAP).unwrap();
        let o2 = brute_force_pcnap(inst, DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(o1.optimum, o2.optimum);
        assert_eq!(o1.witness, o2.witness);
    }
    let g1 = {
        let inst = gap_instance(4).unwrap();
        serde_json::to_string(
            &solve_pcnap(&inst, &SolveConfig::default(), None, None)
                .unwrap()
                .to_json(&inst),
        )
        .unwrap()
    };
    let g2 = {
        let inst = gap_instance(4).unwrap();
        serde_json::to_string(
            &solve_pcnap(&inst, &SolveConfig::default(), None, None)
                .unwrap()
                .to_json(&inst),
        )
        .unwrap()
    };
    assert_eq!(g1, g2);
    println!("criterion 10: PASS byte-identical outputs across repeated runs");
}
