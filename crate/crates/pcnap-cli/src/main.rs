//! Command line front end for the pcnap solver library.
//!
//! Exit codes: 0 success, 2 validation or parse error, 3 infeasible,
//! 4 cap exceeded, 1 anything else. All commands are deterministic for a
//! fixed seed and configuration.

use clap::{Parser, Subcommand};
use pcnap::corpus::{self, CorpusParams};
use pcnap::error::Error;
use pcnap::instance::Instance;
use pcnap::oracle::{brute_force_pcnap, DEFAULT_ORACLE_CAP};
use pcnap::rational::{q_to_json, Cost};
use pcnap::solver::{audit, solve_pcnap, SolveConfig};
use pcnap::{biset, lp};
use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "pcnap", about = "Prize-collecting network activation solver", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and validate an instance; write its canonical form.
    Validate {
        #[arg(long)]
        instance: PathBuf,
        /// Write the canonical document here as well as to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the full pipeline and report the solution.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        /// Arithmetic mode: `rational` or `float:<eps>`.
        #[arg(long, default_value = "rational")]
        mode: String,
        /// Dump every round's relaxation in sparse text form.
        #[arg(long)]
        dump_lp: Option<PathBuf>,
        /// Write the primal-dual event trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Skip the oracle-backed audit section.
        #[arg(long)]
        no_audit: bool,
        /// Brute-force cap for the audit oracle.
        #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
        cap: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact brute-force optimum.
    Oracle {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
        cap: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the hub star with the given fan-out and report the optima of
    /// the natural relaxation, the lifted relaxation, and brute force.
    GapDemo {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a seeded corpus of instances, with oracle answers where the
    /// cap allows.
    Corpus {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        count: usize,
        /// Output directory; one JSON document per instance.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 4)]
        min_nodes: usize,
        #[arg(long, default_value_t = 6)]
        max_nodes: usize,
        #[arg(long, default_value_t = 3)]
        max_weights: usize,
        #[arg(long, default_value_t = 2)]
        max_demands: usize,
        #[arg(long, default_value_t = 2)]
        max_requirement: u32,
        #[arg(long)]
        infinite_penalties: bool,
        #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
        cap: u64,
    },
    /// Solve while streaming the primal-dual event trace.
    SpiderTrace {
        #[arg(long)]
        instance: PathBuf,
        /// Trace destination; stdout when omitted.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Solution report destination.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::Validation(_) => 2,
        Error::Infeasible(_) => 3,
        Error::CapExceeded(_) => 4,
        _ => 1,
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Error> {
    print!("{text}");
    if let Some(p) = out {
        fs::write(p, text)?;
    }
    Ok(())
}

fn read_instance(path: &Path) -> Result<Instance, Error> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::validation(format!("cannot read {}: {e}", path.display())))?;
    Instance::parse(&text)
}

fn parse_mode(mode: &str) -> Result<Option<f64>, Error> {
    if mode == "rational" {
        return Ok(None);
    }
    if let Some(eps) = mode.strip_prefix("float:") {
        let eps: f64 = eps
            .parse()
            .map_err(|_| Error::validation(format!("bad epsilon in mode {mode:?}")))?;
        if !(eps > 0.0) {
            return Err(Error::validation("float mode needs a positive epsilon"));
        }
        return Ok(Some(eps));
    }
    Err(Error::validation(format!(
        "unknown mode {mode:?}; expected `rational` or `float:<eps>`"
    )))
}

fn json_text(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn cmd_solve(
    instance: &Path,
    mode: &str,
    dump_lp: Option<&Path>,
    trace: Option<&Path>,
    no_audit: bool,
    cap: u64,
    out: Option<&Path>,
) -> Result<(), Error> {
    let inst = read_instance(instance)?;
    let cfg = SolveConfig { float_eps: parse_mode(mode)?, ..Default::default() };
    let mut trace_file = match trace {
        Some(p) => Some(fs::File::create(p)?),
        None => None,
    };
    let mut dump_file = match dump_lp {
        Some(p) => Some(fs::File::create(p)?),
        None => None,
    };
    let sol = solve_pcnap(
        &inst,
        &cfg,
        trace_file.as_mut().map(|f| f as &mut (dyn std::io::Write + 'static)),
        dump_file.as_mut().map(|f| f as &mut (dyn std::io::Write + 'static)),
    )?;
    let mut report = sol.to_json(&inst);
    let audit_json = if no_audit {
        serde_json::Value::Null
    } else {
        let oracle = brute_force_pcnap(&inst, cap)?;
        let a = audit(&inst, &sol, &oracle)?;
        let mut aj = a.to_json();
        aj["oracle_optimum"] = oracle.optimum.to_json();
        aj
    };
    report["audit"] = audit_json;
    emit(&json_text(&report), out)
}

fn cmd_gap_demo(m: usize, out: Option<&Path>) -> Result<(), Error> {
    let inst = corpus::gap_instance(m)?;
    let demands: BTreeSet<usize> = [0].into_iter().collect();
    let family = biset::build_family(&inst, &inst.base_edges, &demands, 1)?;
    let penalties = [(0, Cost::Infinite)].into_iter().collect();
    let natural = lp::solve(&lp::build_natural_lp(&inst, &family, &penalties)?)?
        .expect_optimal("natural relaxation")?;
    let lifted = lp::solve(&lp::build_pclp(&inst, &family, &penalties)?)?
        .expect_optimal("lifted relaxation")?;
    let oracle = brute_force_pcnap(&inst, DEFAULT_ORACLE_CAP)?;
    let report = serde_json::json!({
        "m": m,
        "natural_lp": q_to_json(&natural.objective),
        "pclp": q_to_json(&lifted.objective),
        "oracle": oracle.optimum.to_json(),
    });
    emit(&json_text(&report), out)
}

fn cmd_corpus(
    seed: u64,
    count: usize,
    out: &Path,
    params: CorpusParams,
    cap: u64,
) -> Result<(), Error> {
    fs::create_dir_all(out)?;
    let instances = corpus::generate(seed, &params)?;
    let mut manifest = Vec::new();
    for (i, inst) in instances.iter().enumerate() {
        let name = format!("instance_{i:03}.json");
        fs::write(out.join(&name), inst.to_canonical_json())?;
        let oracle_name = match brute_force_pcnap(inst, cap) {
            Ok(r) => {
                let oname = format!("instance_{i:03}.oracle.json");
                fs::write(out.join(&oname), json_text(&r.to_json(inst)))?;
                Some(oname)
            }
            Err(Error::CapExceeded(_)) => None,
            Err(e) => return Err(e),
        };
        manifest.push(serde_json::json!({"instance": name, "oracle": oracle_name}));
    }
    let _ = count;
    emit(&json_text(&serde_json::Value::Array(manifest)), None)
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.cmd {
        Cmd::Validate { instance, out } => {
            let inst = read_instance(&instance)?;
            emit(&inst.to_canonical_json(), out.as_deref())
        }
        Cmd::Solve { instance, mode, dump_lp, trace, no_audit, cap, out } => cmd_solve(
            &instance,
            &mode,
            dump_lp.as_deref(),
            trace.as_deref(),
            no_audit,
            cap,
            out.as_deref(),
        ),
        Cmd::Oracle { instance, cap, out } => {
            let inst = read_instance(&instance)?;
            let r = brute_force_pcnap(&inst, cap)?;
            emit(&json_text(&r.to_json(&inst)), out.as_deref())
        }
        Cmd::GapDemo { m, out } => cmd_gap_demo(m, out.as_deref()),
        Cmd::Corpus {
            seed,
            count,
            out,
            min_nodes,
            max_nodes,
            max_weights,
            max_demands,
            max_requirement,
            infinite_penalties,
            cap,
        } => cmd_corpus(
            seed,
            count,
            &out,
            CorpusParams {
                count,
                min_nodes,
                max_nodes,
                max_weight_values: max_weights,
                max_demands,
                max_requirement,
                allow_infinite_penalties: infinite_penalties,
            },
            cap,
        ),
        Cmd::SpiderTrace { instance, trace, out } => {
            let inst = read_instance(&instance)?;
            let cfg = SolveConfig::default();
            let mut sink: Box<dyn std::io::Write> = match &trace {
                Some(p) => Box::new(fs::File::create(p)?),
                None => Box::new(std::io::stdout()),
            };
            let sol = solve_pcnap(&inst, &cfg, Some(&mut *sink), None)?;
            drop(sink);
            if out.is_some() || trace.is_some() {
                let mut report = sol.to_json(&inst);
                report["audit"] = serde_json::Value::Null;
                if trace.is_none() {
                    // Trace went to stdout; only write the report to a file.
                    if let Some(p) = out.as_deref() {
                        fs::write(p, json_text(&report))?;
                    }
                } else {
                    emit(&json_text(&report), out.as_deref())?;
                }
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
