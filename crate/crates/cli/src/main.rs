//! `mgraph`: generate, solve, verify, trace, render and benchmark
//! motorcycle-graph instances.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use motorcycle_graph::error::Error;
use motorcycle_graph::halving::HalvingMode;
use motorcycle_graph::io::format::{write_instance, write_result, Backend, FileConfig, InstanceFile, Scenario, SpawnKind};
use motorcycle_graph::io::generate::{generate, GenKind};
use motorcycle_graph::io::report::{bench_csv, build_solver, run_bench, run_verify, solve, solver_config, BenchPlan};
use motorcycle_graph::io::svg::{render_result, render_state};
use motorcycle_graph::rayshoot::ShooterKind;
use motorcycle_graph::scalar::{Exact, Scalar, F64};
use motorcycle_graph::solver::{Fault, SolverConfig};

#[derive(Parser)]
#[command(name = "mgraph", version, about = "Motorcycle graphs with tentative tracks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a seeded random instance.
    Generate {
        /// uniform-random | c-oriented | collinear-stress | nested-fig8
        kind: String,
        #[arg(short, long, default_value_t = 16)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Number of directions for c-oriented instances.
        #[arg(long, default_value_t = 3)]
        directions: usize,
        #[arg(long, value_parser = parse_backend)]
        backend: Option<Backend>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compute the graph and print it as TOML.
    Solve(RunArgs),
    /// Compare the solver with the brute-force oracle.
    Verify(RunArgs),
    /// Print one line per processed event.
    Trace(RunArgs),
    /// Draw the graph, or the state after `--until` events, as SVG.
    Render(RunArgs),
    /// Time the solver on uniform-random instances of size 2^k.
    Bench {
        #[arg(long, default_value_t = 8)]
        min_exp: u32,
        #[arg(long, default_value_t = 13)]
        max_exp: u32,
        #[arg(long, value_delimiter = ',', default_value = "float", value_parser = parse_backend)]
        backend: Vec<Backend>,
        #[arg(long, value_delimiter = ',', default_value = "counting", value_parser = parse_halving)]
        halving: Vec<HalvingMode>,
        #[arg(long, value_delimiter = ',', default_value = "grid", value_parser = parse_shooter)]
        shooter: Vec<ShooterKind>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Largest size at which the oracle is timed too.
        #[arg(long, default_value_t = 1 << 13)]
        oracle_up_to: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Instance file (TOML).
    file: PathBuf,
    #[arg(long, value_parser = parse_halving)]
    halving: Option<HalvingMode>,
    #[arg(long, value_parser = parse_shooter)]
    shooter: Option<ShooterKind>,
    #[arg(long, value_parser = parse_backend)]
    backend: Option<Backend>,
    /// Stop after this many events (trace and render).
    #[arg(long)]
    until: Option<usize>,
    /// Allow spawning under any halving mode.
    #[arg(long)]
    unchecked_spawns: bool,
    #[arg(long, hide = true)]
    fault: Option<String>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn parse_backend(s: &str) -> Result<Backend, String> {
    Backend::parse(s).ok_or_else(|| format!("expected exact or float, got `{s}`"))
}

fn parse_halving(s: &str) -> Result<HalvingMode, String> {
    HalvingMode::parse(s).ok_or_else(|| format!("expected counting, midpoint or coriented, got `{s}`"))
}

fn parse_shooter(s: &str) -> Result<ShooterKind, String> {
    ShooterKind::parse(s).ok_or_else(|| format!("expected linear or grid, got `{s}`"))
}

/// Why the tool failed, mapped to the exit status.
enum Failure {
    Mismatch(String),
    Input(String),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_) | Error::Degenerate(_) | Error::Collinear { .. } | Error::OffRay { .. } => {
                Failure::Input(e.to_string())
            }
            _ => Failure::Other(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn emit(output: &Option<PathBuf>, text: &str) -> Outcome {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Other(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Generate {
            kind,
            n,
            seed,
            directions,
            backend,
            output,
        } => cmd_generate(&kind, n, seed, directions, backend.unwrap_or(Backend::Exact), &output),
        Cmd::Solve(a) => dispatch(Verb::Solve, a),
        Cmd::Verify(a) => dispatch(Verb::Verify, a),
        Cmd::Trace(a) => dispatch(Verb::Trace, a),
        Cmd::Render(a) => dispatch(Verb::Render, a),
        Cmd::Bench {
            min_exp,
            max_exp,
            backend,
            halving,
            shooter,
            seed,
            oracle_up_to,
            output,
        } => {
            let plan = BenchPlan {
                exponents: min_exp..=max_exp,
                backends: backend,
                halving,
                shooters: shooter,
                seed,
                oracle_up_to,
            };
            run_bench(&plan)
                .map_err(Failure::from)
                .and_then(|rows| emit(&output, &bench_csv(&rows)))
        }
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Other(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn cmd_generate(kind: &str, n: usize, seed: u64, c: usize, backend: Backend, output: &Option<PathBuf>) -> Outcome {
    let kind = GenKind::parse(kind, c).ok_or_else(|| Failure::Input(format!("unknown instance kind `{kind}`")))?;
    let mut config = FileConfig {
        backend,
        ..FileConfig::default()
    };
    if kind == GenKind::NestedFig8 {
        config.spawn = SpawnKind::VelocitySum;
        config.unchecked_spawns = true;
    }
    let text = match backend {
        Backend::Exact => gen_text::<Exact>(kind, n, seed, config),
        Backend::Float => gen_text::<F64>(kind, n, seed, config),
    };
    emit(output, &text)
}

fn gen_text<S: Scalar>(kind: GenKind, n: usize, seed: u64, mut config: FileConfig) -> String {
    let instance = generate::<S>(kind, n, seed);
    config.bit_width = instance.bit_width;
    write_instance(&Scenario {
        instance,
        polygon: None,
        config,
    })
}

#[derive(Clone, Copy)]
enum Verb {
    Solve,
    Verify,
    Trace,
    Render,
}

fn dispatch(verb: Verb, a: RunArgs) -> Outcome {
    let text = read(&a.file)?;
    let file = InstanceFile::parse(&text)?;
    match a.backend.unwrap_or(file.config.backend) {
        Backend::Exact => run::<Exact>(verb, &file, &a),
        Backend::Float => run::<F64>(verb, &file, &a),
    }
}

fn run<S: Scalar>(verb: Verb, file: &InstanceFile<'_>, a: &RunArgs) -> Outcome {
    let mut sc = file.build::<S>()?;
    if let Some(h) = a.halving {
        sc.config.halving = h;
    }
    if let Some(s) = a.shooter {
        sc.config.shooter = s;
    }
    sc.config.unchecked_spawns |= a.unchecked_spawns;
    let mut cfg: SolverConfig<S> = solver_config(&sc)?;
    cfg.fault = match a.fault.as_deref() {
        None => None,
        Some("skip-blocked-check") => Some(Fault::SkipBlockedCheck),
        Some(f) => return Err(Failure::Input(format!("unknown fault `{f}`"))),
    };
    match verb {
        Verb::Solve => {
            let sol = solve(&sc, cfg)?;
            emit(&a.output, &write_result(&sol.result, &sol.stats))
        }
        Verb::Verify => {
            let rep = run_verify(&sc, cfg)?;
            if rep.passed() {
                emit(&a.output, &format!("{}\n", rep.summary()))
            } else {
                Err(Failure::Mismatch(rep.summary()))
            }
        }
        Verb::Trace => {
            cfg.record_trace = true;
            let mut solver = build_solver(&sc, cfg)?;
            let limit = a.until.unwrap_or(usize::MAX);
            let mut steps = 0;
            while steps < limit && solver.step()? {
                steps += 1;
            }
            let mut out = String::new();
            for rec in solver.trace() {
                out.push_str(&rec.to_string());
                out.push('\n');
            }
            emit(&a.output, &out)
        }
        Verb::Render => match a.until {
            Some(limit) => {
                let mut solver = build_solver(&sc, cfg)?;
                for _ in 0..limit {
                    if !solver.step()? {
                        break;
                    }
                }
                emit(&a.output, &render_state(&solver))
            }
            None => {
                let sol = solve(&sc, cfg)?;
                emit(&a.output, &render_result(&sc.instance, &sol.result))
            }
        },
    }
}
