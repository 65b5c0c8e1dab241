//! Command-line frontend: generate instances, run the attack, verify
//! solutions, run the statistical experiments, and self-test.
//!
//! Exit codes: 0 on success, 1 on verification failure or attack failure,
//! 2 on usage or parse errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mce_core::attack::{attack, AttackConfig, AttackError};
use mce_core::canon::{count_sep_classes, Canonicalizer};
use mce_core::conjugacy::Strategy;
use mce_core::instances::{
    charpoly_class_stats, gen_instance, hull_dim_stats, read_instance_file, read_solution_file,
    verify_solution, write_instance_file, write_solution_file, PlantedSolution,
};

#[derive(Parser)]
#[command(
    name = "mce",
    version,
    about = "Hull-based attack toolkit for the matrix code equivalence problem"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Linearized,
    Diagonal,
    Auto,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::Linearized => Strategy::Linearized,
            StrategyArg::Diagonal => Strategy::Diagonal,
            StrategyArg::Auto => Strategy::Auto,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StatKind {
    HullDim,
    CharpolyClasses,
    CountClasses,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a planted equivalence instance.
    Gen(GenArgs),
    /// Run the attack on an instance file.
    Attack(AttackArgs),
    /// Verify a solution against an instance; exits 0 iff it checks out.
    Verify(VerifyArgs),
    /// Hull-dimension and characteristic-polynomial-class statistics.
    Stats(StatsArgs),
    /// Generate, attack and verify a small planted instance.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    q: u64,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Instance output path (the planted solution is not embedded).
    #[arg(long)]
    out: PathBuf,
    /// Also write the planted solution to this path.
    #[arg(long)]
    solution_out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
}

#[derive(Args)]
struct AttackArgs {
    /// Instance file (any embedded solution is ignored).
    #[arg(long)]
    input: PathBuf,
    /// Where to write the recovered (P, Q).
    #[arg(long)]
    solution_out: Option<PathBuf>,
    /// Where to write the run statistics as JSON.
    #[arg(long)]
    stats_out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Dictionary size L (default: derived from the parameters).
    #[arg(long)]
    dict_size: Option<u64>,
    /// Probe budget N, counted in one-dimensional-hull events.
    #[arg(long)]
    probes: Option<u64>,
    #[arg(long, value_enum, default_value_t = StrategyArg::Auto)]
    strategy: StrategyArg,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Force single-threaded sequential sampling (reproducible runs).
    #[arg(long, default_value_t = false)]
    deterministic: bool,
    /// Use the gcd-descent normalizer instead of the brute-force one.
    #[arg(long, default_value_t = false)]
    fast_canonicalizer: bool,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    input: PathBuf,
    /// Solution file; falls back to a solution embedded in the instance.
    #[arg(long)]
    solution: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long, value_enum)]
    kind: StatKind,
    #[arg(long)]
    q: u64,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

/// Failure carrying the exit code and a machine-readable description.
struct CmdError {
    code: u8,
    message: String,
    phase: &'static str,
}

impl CmdError {
    fn usage(message: impl Into<String>) -> CmdError {
        CmdError {
            code: 2,
            message: message.into(),
            phase: "parse",
        }
    }

    fn failure(message: impl Into<String>, phase: &'static str) -> CmdError {
        CmdError {
            code: 1,
            message: message.into(),
            phase,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, format) = match cli.command {
        Command::Gen(args) => {
            let f = args.format;
            (cmd_gen(args), f)
        }
        Command::Attack(args) => {
            let f = args.format;
            (cmd_attack(args), f)
        }
        Command::Verify(args) => {
            let f = args.format;
            (cmd_verify(args), f)
        }
        Command::Stats(args) => {
            let f = args.format;
            (cmd_stats(args), f)
        }
        Command::Selftest(args) => (cmd_selftest(args), Format::Human),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if format == Format::Json {
                eprintln!(
                    "{}",
                    serde_json::json!({ "error": e.message, "phase": e.phase })
                );
            } else {
                eprintln!("error ({}): {}", e.phase, e.message);
            }
            ExitCode::from(e.code)
        }
    }
}

fn cmd_gen(args: GenArgs) -> Result<(), CmdError> {
    let (inst, sol) = gen_instance(args.q, args.m, args.n, args.k, args.seed)
        .map_err(|e| CmdError::usage(e.to_string()))?;
    write_instance_file(&args.out, &inst, None)
        .map_err(|e| CmdError::failure(e.to_string(), "io"))?;
    if let Some(path) = &args.solution_out {
        write_solution_file(path, &sol).map_err(|e| CmdError::failure(e.to_string(), "io"))?;
    }
    match args.format {
        Format::Json => println!(
            "{}",
            serde_json::json!({
                "instance": args.out,
                "solution": args.solution_out,
                "q": args.q, "m": args.m, "n": args.n, "k": args.k,
                "seed": args.seed,
            })
        ),
        _ => println!(
            "wrote instance q={} m={} n={} k={} seed={} to {}",
            args.q,
            args.m,
            args.n,
            args.k,
            args.seed,
            args.out.display()
        ),
    }
    Ok(())
}

fn cmd_attack(args: AttackArgs) -> Result<(), CmdError> {
    let (inst, _embedded) =
        read_instance_file(&args.input).map_err(|e| CmdError::usage(e.to_string()))?;
    let cfg = AttackConfig {
        dict_size: args.dict_size,
        probes: args.probes,
        max_wall_samples: None,
        strategy: args.strategy.into(),
        seed: args.seed,
        threads: if args.deterministic { 1 } else { args.threads },
        deterministic: args.deterministic || args.threads <= 1,
        canonicalizer: if args.fast_canonicalizer {
            Canonicalizer::Fast
        } else {
            Canonicalizer::BruteForce
        },
        use_canon_cache: false,
    };
    match attack(&inst.c, &inst.d, &cfg) {
        Ok(outcome) => {
            if let Some(path) = &args.solution_out {
                let sol = PlantedSolution {
                    p: outcome.p.clone(),
                    q: outcome.q.clone(),
                };
                write_solution_file(path, &sol)
                    .map_err(|e| CmdError::failure(e.to_string(), "io"))?;
            }
            let stats_json = serde_json::to_string_pretty(&outcome.stats)
                .map_err(|e| CmdError::failure(e.to_string(), "io"))?;
            if let Some(path) = &args.stats_out {
                std::fs::write(path, format!("{stats_json}\n"))
                    .map_err(|e| CmdError::failure(e.to_string(), "io"))?;
            }
            match args.format {
                Format::Json => println!("{stats_json}"),
                _ => println!(
                    "success: verified (P, Q) after {} draws, {} dim-1 hulls, {} collisions ({} false)",
                    outcome.stats.draws,
                    outcome.stats.dim1_hulls,
                    outcome.stats.collisions,
                    outcome.stats.false_positives,
                ),
            }
            Ok(())
        }
        Err(fail) => {
            if let Some(path) = &args.stats_out {
                if let Ok(js) = serde_json::to_string_pretty(&fail.stats) {
                    let _ = std::fs::write(path, format!("{js}\n"));
                }
            }
            let phase = match fail.error {
                AttackError::OutOfRange => "preprocess",
                AttackError::Exhausted { .. } => "collision",
                AttackError::NoInvertibleElement => "recover_q",
                _ => "attack",
            };
            let code = if matches!(fail.error, AttackError::OutOfRange) {
                2
            } else {
                1
            };
            Err(CmdError {
                code,
                message: fail.error.to_string(),
                phase,
            })
        }
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<(), CmdError> {
    let (inst, embedded) =
        read_instance_file(&args.input).map_err(|e| CmdError::usage(e.to_string()))?;
    let sol = match &args.solution {
        Some(path) => {
            read_solution_file(path, &inst).map_err(|e| CmdError::usage(e.to_string()))?
        }
        None => embedded.ok_or_else(|| {
            CmdError::usage("no --solution given and none embedded in the instance")
        })?,
    };
    if verify_solution(&inst, &sol.p, &sol.q) {
        if args.format == Format::Json {
            println!("{}", serde_json::json!({ "verified": true }));
        } else {
            println!("verified");
        }
        Ok(())
    } else {
        Err(CmdError::failure("solution does not verify", "verify"))
    }
}

fn cmd_stats(args: StatsArgs) -> Result<(), CmdError> {
    let emit = |payload: String| -> Result<(), CmdError> {
        match &args.out {
            Some(path) => {
                std::fs::write(path, payload).map_err(|e| CmdError::failure(e.to_string(), "io"))
            }
            None => {
                print!("{payload}");
                Ok(())
            }
        }
    };
    match args.kind {
        StatKind::HullDim => {
            let k = args
                .k
                .ok_or_else(|| CmdError::usage("--k is required for hull-dim"))?;
            let stats = hull_dim_stats(args.q, args.m, k, args.samples, args.seed)
                .map_err(|e| CmdError::usage(e.to_string()))?;
            let payload = match args.format {
                Format::Json => format!("{}\n", serde_json::to_string_pretty(&stats).unwrap()),
                _ => stats.to_csv(),
            };
            emit(payload)
        }
        StatKind::CharpolyClasses => {
            let n = args
                .n
                .ok_or_else(|| CmdError::usage("--n is required for charpoly-classes"))?;
            let k = args
                .k
                .ok_or_else(|| CmdError::usage("--k is required for charpoly-classes"))?;
            let stats = charpoly_class_stats(args.q, args.m, n, k, args.samples, args.seed)
                .map_err(|e| CmdError::usage(e.to_string()))?;
            let payload = match args.format {
                Format::Json => format!("{}\n", serde_json::to_string_pretty(&stats).unwrap()),
                _ => stats.to_csv(),
            };
            emit(payload)
        }
        StatKind::CountClasses => {
            let count = count_sep_classes(args.q, args.m)
                .map_err(|e| CmdError::usage(e.to_string()))?;
            let payload = match args.format {
                Format::Json => format!(
                    "{}\n",
                    serde_json::json!({ "q": args.q, "m": args.m, "classes": count })
                ),
                _ => format!("q={} m={} classes={}\n", args.q, args.m, count),
            };
            emit(payload)
        }
    }
}

fn cmd_selftest(args: SelftestArgs) -> Result<(), CmdError> {
    let (inst, _) = gen_instance(11, 4, 4, 12, args.seed)
        .map_err(|e| CmdError::failure(e.to_string(), "selftest"))?;
    let cfg = AttackConfig {
        seed: args.seed,
        ..AttackConfig::default()
    };
    let outcome = attack(&inst.c, &inst.d, &cfg)
        .map_err(|f| CmdError::failure(format!("attack failed: {}", f.error), "selftest"))?;
    if !verify_solution(&inst, &outcome.p, &outcome.q) {
        return Err(CmdError::failure(
            "solution failed verification",
            "selftest",
        ));
    }
    println!(
        "selftest passed: planted q=11 m=4 n=4 k=12 recovered in {} draws",
        outcome.stats.draws
    );
    Ok(())
}
