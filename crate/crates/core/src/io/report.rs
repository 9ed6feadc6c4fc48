//! Running scenarios: solve, verify against the oracle, and benchmark.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::geom::{arrangement_box, prepare, Instance};
use crate::halving::{induced_min_length, HalvingMode};
use crate::induced::InducedSpawn;
use crate::io::format::{FileConfig, Scenario, SpawnKind};
use crate::io::generate::{generate, GenKind};
use crate::oracle::{simulate_with_spawns, MgResult};
use crate::rayshoot::ShooterKind;
use crate::scalar::{parse_rational, Exact, Scalar, F64};
use crate::solver::{Solution, Solver, SolverConfig};
use crate::spawn::{NeverSpawn, SpawnPolicy, VelocitySumSpawn};

/// Solver settings for a scenario.
pub fn solver_config<S: Scalar>(sc: &Scenario<S>) -> Result<SolverConfig<S>> {
    let c = &sc.config;
    let mut cfg = SolverConfig::new(c.halving).with_shooter(c.shooter);
    cfg.unchecked_spawns = c.unchecked_spawns;
    cfg.halving.min_length = match &c.min_length {
        Some(lit) => Some(S::from_rational(&parse_rational(lit).ok_or_else(|| {
            Error::InvalidInput(format!("malformed min_length `{lit}`"))
        })?)),
        // Induced instances need the much finer floor.
        None if sc.polygon.is_some() && c.halving == HalvingMode::Midpoint => {
            Some(induced_min_length(c.bit_width.unwrap_or_else(|| polygon_bits(sc))))
        }
        None => None,
    };
    Ok(cfg)
}

fn polygon_bits<S: Scalar>(sc: &Scenario<S>) -> u32 {
    let poly = sc.polygon.as_ref().expect("polygon scenario");
    poly.rings()
        .flatten()
        .flat_map(|p| [p.x.bit_width(), p.y.bit_width()])
        .map(|b| b.unwrap_or(53) as u32)
        .max()
        .unwrap_or(2)
        .max(2)
}

/// The spawn policy named by the scenario.
pub fn spawn_policy<S: Scalar>(sc: &Scenario<S>) -> Result<Box<dyn SpawnPolicy<S>>> {
    Ok(match sc.config.spawn {
        SpawnKind::None => Box::new(NeverSpawn),
        SpawnKind::VelocitySum => {
            let prepared = prepare(&sc.instance)?;
            let bounds = arrangement_box(&prepared.motorcycles)
                .ok_or_else(|| Error::InvalidInput("velocity-sum spawning needs riders".into()))?;
            Box::new(VelocitySumSpawn { bounds })
        }
        SpawnKind::Induced => match &sc.polygon {
            Some(poly) => Box::new(InducedSpawn::new(poly)),
            None => return Err(Error::InvalidInput("induced spawning needs a polygon".into())),
        },
    })
}

/// A solver for the scenario, ready to step.
pub fn build_solver<S: Scalar>(sc: &Scenario<S>, cfg: SolverConfig<S>) -> Result<Solver<S>> {
    let policy = match sc.config.spawn {
        SpawnKind::None => None,
        _ => Some(spawn_policy(sc)?),
    };
    Solver::new(&sc.instance, cfg, policy)
}

pub fn solve<S: Scalar>(sc: &Scenario<S>, cfg: SolverConfig<S>) -> Result<Solution<S>> {
    build_solver(sc, cfg)?.run()
}

/// The oracle's graph for the scenario.
pub fn oracle<S: Scalar>(sc: &Scenario<S>) -> Result<MgResult<S>> {
    let prepared = prepare(&sc.instance)?;
    simulate_with_spawns(&prepared, spawn_policy(sc)?.as_ref())
}

#[derive(Clone, Debug)]
pub struct VerifyReport<S> {
    pub solution: Solution<S>,
    pub expected: MgResult<S>,
    /// First rider whose result differs, or whose count differs.
    pub first_difference: Option<usize>,
}

impl<S: Scalar> VerifyReport<S> {
    pub fn passed(&self) -> bool {
        self.first_difference.is_none()
    }

    pub fn summary(&self) -> String {
        let n = self.expected.riders.len();
        match self.first_difference {
            None => format!("ok: {n} riders match the oracle"),
            Some(i) => {
                let show = |r: &MgResult<S>| match r.riders.get(i - 1) {
                    Some(x) => {
                        let (px, py) = x.kappa.to_f64();
                        format!("{:?} at ({px:.6}, {py:.6}), t = {:.6}", x.outcome, x.t_final.to_f64())
                    }
                    None => "missing".to_string(),
                };
                format!(
                    "mismatch at rider {i}\n  solver: {}\n  oracle: {}",
                    show(&self.solution.result),
                    show(&self.expected)
                )
            }
        }
    }
}

/// Run the solver and the oracle and compare.
pub fn run_verify<S: Scalar>(sc: &Scenario<S>, cfg: SolverConfig<S>) -> Result<VerifyReport<S>> {
    let solution = solve(sc, cfg)?;
    let expected = oracle(sc)?;
    let first_difference = solution.result.first_difference(&expected);
    Ok(VerifyReport {
        solution,
        expected,
        first_difference,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub backend: &'static str,
    pub halving: HalvingMode,
    pub shooter: ShooterKind,
    pub seconds: f64,
    pub events: u64,
    pub ray_queries: u64,
    pub halving_queries: u64,
    pub oracle_seconds: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct BenchPlan {
    pub exponents: std::ops::RangeInclusive<u32>,
    pub backends: Vec<crate::io::format::Backend>,
    pub halving: Vec<HalvingMode>,
    pub shooters: Vec<ShooterKind>,
    pub seed: u64,
    /// Also time the oracle, up to this size.
    pub oracle_up_to: usize,
}

impl Default for BenchPlan {
    fn default() -> Self {
        BenchPlan {
            exponents: 8..=13,
            backends: vec![crate::io::format::Backend::Float],
            halving: vec![HalvingMode::Counting],
            shooters: vec![ShooterKind::Grid],
            seed: 1,
            oracle_up_to: 1 << 13,
        }
    }
}

fn time<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, Duration)> {
    let start = Instant::now();
    let out = f()?;
    Ok((out, start.elapsed()))
}

fn bench_one<S: Scalar>(plan: &BenchPlan, n: usize, rows: &mut Vec<BenchRow>) -> Result<()> {
    let inst: Instance<S> = generate(GenKind::UniformRandom, n, plan.seed);
    let oracle_seconds = if n <= plan.oracle_up_to {
        let prepared = prepare(&inst)?;
        let (_, d) = time(|| simulate_with_spawns(&prepared, &NeverSpawn))?;
        Some(d.as_secs_f64())
    } else {
        None
    };
    for &halving in &plan.halving {
        for &shooter in &plan.shooters {
            let cfg = SolverConfig::new(halving).with_shooter(shooter);
            let (sol, d) = time(|| Solver::new(&inst, cfg, None)?.run())?;
            rows.push(BenchRow {
                n,
                backend: S::NAME,
                halving,
                shooter,
                seconds: d.as_secs_f64(),
                events: sol.stats.events_processed,
                ray_queries: sol.stats.ray_queries,
                halving_queries: sol.stats.halving_queries,
                oracle_seconds,
            });
        }
    }
    Ok(())
}

/// Size sweep over `n = 2^k` on uniform-random instances.
pub fn run_bench(plan: &BenchPlan) -> Result<Vec<BenchRow>> {
    use crate::io::format::Backend;
    let mut rows = Vec::new();
    for e in plan.exponents.clone() {
        let n = 1usize << e;
        for &b in &plan.backends {
            match b {
                Backend::Exact => bench_one::<Exact>(plan, n, &mut rows)?,
                Backend::Float => bench_one::<F64>(plan, n, &mut rows)?,
            }
        }
    }
    Ok(rows)
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(
        "n,backend,halving,shooter,seconds,events,ray_queries,halving_queries,oracle_seconds\n",
    );
    for r in rows {
        let oracle = r.oracle_seconds.map(|s| format!("{s:.6}")).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{:.6},{},{},{},{}",
            r.n, r.backend, r.halving, r.shooter, r.seconds, r.events, r.ray_queries, r.halving_queries, oracle
        );
    }
    out
}

/// A scenario around a bare instance with default settings.
pub fn scenario<S: Scalar>(instance: Instance<S>) -> Scenario<S> {
    Scenario {
        instance,
        polygon: None,
        config: FileConfig::default(),
    }
}
