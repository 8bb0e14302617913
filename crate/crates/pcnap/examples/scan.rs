use pcnap::corpus::{generate, CorpusParams};
use pcnap::solver::{solve_pcnap, SolveConfig};
use pcnap::oracle::{brute_force_pcnap, DEFAULT_ORACLE_CAP};

fn main() {
    let params = CorpusParams { count: 200, ..Default::default() };
    let corpus = generate(20268, &params).unwrap();
    for (i, inst) in corpus.iter().enumerate() {
        match solve_pcnap(inst, &SolveConfig::default(), None, None) {
            Ok(sol) => {
                if let Err(e) = brute_force_pcnap(inst, DEFAULT_ORACLE_CAP) {
                    println!("instance {i}: oracle error {e}");
                    println!("{}", inst.to_canonical_json());
                    return;
                }
                let _ = sol;
            }
            Err(e) => {
                println!("instance {i}: solve error {e}");
                println!("{}", inst.to_canonical_json());
                return;
            }
        }
    }
    println!("all 200 ok");
}
