use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use ksubmod::algorithms::{
    brute_force_opt, complete_to_total, deterministic_greedy, exact_expectation, query_bound,
    randomized_greedy, AlgorithmConfig, RunReport, TraceRecord,
};
use ksubmod::exact::{approximation_ratio_f64, meets_bound, rational_meets_bound};
use ksubmod::instances::{random_monotone_instance_with_budget, Family, FamilyMix, Instance};
use ksubmod::oracle::DEFAULT_TABLE_BUDGET;
use ksubmod::properties::{verify_all, VerificationReport};
use ksubmod::{KVector, ValueOracle};
use serde::Serialize;

use crate::rows::{parse_rows, BenchRow};
use crate::{Algorithm, BenchArgs, BruteArgs, GenArgs, SolveArgs, VerifyArgs};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Lib(#[from] ksubmod::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) => e.exit_code() as u8,
            CliError::Io { .. } | CliError::Usage(_) => 2,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    text
}

fn load_instance(path: &Path) -> Result<Instance> {
    Ok(Instance::from_json(&read(path)?)?)
}

fn read_order(path: &Path, instance: &Instance) -> Result<Vec<usize>> {
    let names: Vec<String> = serde_json::from_str(&read(path)?)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    names
        .iter()
        .map(|name| {
            instance
                .ground()
                .position(name)
                .ok_or_else(|| CliError::Usage(format!("order names unknown element '{name}'")))
        })
        .collect()
}

fn named(instance: &Instance, x: &KVector) -> BTreeMap<String, u32> {
    instance
        .ground()
        .elements()
        .iter()
        .cloned()
        .zip(x.as_slice().iter().copied())
        .collect()
}

#[derive(Serialize)]
struct InstanceSummary {
    family: &'static str,
    n: usize,
    k: u32,
    integral: bool,
}

impl InstanceSummary {
    fn of(instance: &Instance) -> Self {
        Self {
            family: instance.family().name(),
            n: instance.n(),
            k: instance.k(),
            integral: instance.is_integral(),
        }
    }
}

/// `value / optimum`, taken as 1 when the optimum is 0.
fn ratio(value: f64, optimum: f64) -> f64 {
    if optimum == 0.0 {
        1.0
    } else {
        value / optimum
    }
}

#[derive(Serialize)]
struct SolveReport<'a> {
    version: &'static str,
    command: &'static str,
    config: &'a SolveArgs,
    instance: InstanceSummary,
    algorithm: String,
    solution: BTreeMap<String, u32>,
    value: f64,
    total_queries: u64,
    query_bound: u64,
    support_max: usize,
    bound: f64,
    optimum: Option<f64>,
    optimum_solution: Option<BTreeMap<String, u32>>,
    ratio: Option<f64>,
    expected_value: Option<f64>,
    expected_ratio: Option<f64>,
    pass: Option<bool>,
    min_certificate_margin: Option<f64>,
    trace: Vec<TraceRecord>,
}

pub fn solve(args: &SolveArgs) -> Result<()> {
    let mut instance = load_instance(&args.instance)?;
    if args.algorithm == Algorithm::Randomized && args.seed.is_none() {
        return Err(CliError::Usage("--algorithm rand requires --seed".into()));
    }
    if instance.family() == Family::Table
        && !instance.is_validated()
        && !instance.validate(DEFAULT_TABLE_BUDGET)?
    {
        return Err(CliError::Usage(
            "table instance is not monotone k-submodular".into(),
        ));
    }
    let element_order = match &args.order {
        Some(path) => Some(read_order(path, &instance)?),
        None => None,
    };
    let (n, k) = (instance.n(), instance.k());
    let budget = args.budget as u128;
    let optimum = if instance.ground().lattice_size() <= budget {
        let (x, v) = brute_force_opt(&instance, budget)?;
        Some((x, v))
    } else {
        None
    };

    let mut config = AlgorithmConfig {
        element_order,
        seed: args.seed,
        ..AlgorithmConfig::default()
    };
    let integral = instance.is_integral();
    let mut expected_value = None;
    let mut expected_pass = None;
    let run: RunReport = match args.algorithm {
        Algorithm::Deterministic => {
            if let Some((x, _)) = &optimum {
                config.certify_against = Some(complete_to_total(&instance, x)?);
            }
            deterministic_greedy(&instance, &config)?.report
        }
        Algorithm::Randomized => {
            let run = randomized_greedy(&instance, &config)?;
            if let Some((_, opt)) = &optimum {
                let e = exact_expectation(&instance, &config, budget)?;
                expected_pass = Some(if integral {
                    rational_meets_bound(&e.exact, *opt, k)
                } else {
                    meets_bound(e.value, *opt, k, false)
                });
                expected_value = Some(e.value);
            }
            run
        }
    };

    let pass = optimum.as_ref().map(|(_, opt)| match args.algorithm {
        Algorithm::Deterministic => meets_bound(run.value, *opt, k, integral),
        Algorithm::Randomized => expected_pass.unwrap_or(false),
    });
    let report = SolveReport {
        version: ksubmod::VERSION,
        command: "solve",
        config: args,
        instance: InstanceSummary::of(&instance),
        algorithm: run.algorithm.clone(),
        solution: named(&instance, &run.solution),
        value: run.value,
        total_queries: run.total_queries,
        query_bound: query_bound(n, k),
        support_max: run.support_max(),
        bound: approximation_ratio_f64(k),
        optimum: optimum.as_ref().map(|(_, v)| *v),
        optimum_solution: optimum.as_ref().map(|(x, _)| named(&instance, x)),
        ratio: optimum.as_ref().map(|(_, v)| ratio(run.value, *v)),
        expected_ratio: optimum
            .as_ref()
            .zip(expected_value)
            .map(|((_, v), e)| ratio(e, *v)),
        expected_value,
        pass,
        min_certificate_margin: run.min_certificate_margin(),
        trace: run.trace.clone(),
    };
    if let Some(path) = &args.trace {
        emit(Some(path), &run.trace_jsonl())?;
    }
    emit(args.out.as_deref(), &to_json(&report))
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    version: &'static str,
    command: &'static str,
    config: &'a VerifyArgs,
    instance: InstanceSummary,
    monotone_k_submodular: bool,
    report: VerificationReport,
}

pub fn verify(args: &VerifyArgs) -> Result<()> {
    let instance = load_instance(&args.instance)?;
    let budget = args.budget as u128;
    let table = instance.to_table(budget)?;
    let report = verify_all(&table, budget)?;
    let out = VerifyReport {
        version: ksubmod::VERSION,
        command: "verify",
        config: args,
        instance: InstanceSummary::of(&instance),
        monotone_k_submodular: report.is_monotone_k_submodular(),
        report,
    };
    emit(args.out.as_deref(), &to_json(&out))
}

#[derive(Serialize)]
struct BruteReport<'a> {
    version: &'static str,
    command: &'static str,
    config: &'a BruteArgs,
    instance: InstanceSummary,
    optimum: f64,
    optimum_solution: BTreeMap<String, u32>,
    /// The optimum with unassigned elements given their best part.
    completed_solution: BTreeMap<String, u32>,
    completed_value: f64,
}

pub fn brute(args: &BruteArgs) -> Result<()> {
    let instance = load_instance(&args.instance)?;
    let (x, v) = brute_force_opt(&instance, args.budget as u128)?;
    let total = complete_to_total(&instance, &x)?;
    let out = BruteReport {
        version: ksubmod::VERSION,
        command: "brute",
        config: args,
        instance: InstanceSummary::of(&instance),
        optimum: v,
        optimum_solution: named(&instance, &x),
        completed_value: instance.evaluate(&total),
        completed_solution: named(&instance, &total),
    };
    emit(args.out.as_deref(), &to_json(&out))
}

const BENCH_HEADER: &str =
    "n,k,family,seed,det_value,opt,ratio,queries,query_bound,support_max,pass";

struct BenchResult {
    row: BenchRow,
    value: f64,
    optimum: Option<f64>,
    queries: u64,
    support_max: usize,
    pass: bool,
}

fn bench_row(row: BenchRow, budget: u128) -> Result<BenchResult> {
    let instance = random_monotone_instance_with_budget(
        row.seed,
        row.n,
        row.k,
        FamilyMix::Only(row.family),
        ksubmod::instances::DEFAULT_REJECTION_BUDGET,
    )?;
    let run = deterministic_greedy(&instance, &AlgorithmConfig::default())?.report;
    let optimum = if instance.ground().lattice_size() <= budget {
        Some(brute_force_opt(&instance, budget)?.1)
    } else {
        None
    };
    let within = run.total_queries <= query_bound(row.n, row.k)
        && run.support_max() <= row.n * row.k as usize + 1;
    let bound =
        optimum.is_none_or(|opt| meets_bound(run.value, opt, row.k, instance.is_integral()));
    Ok(BenchResult {
        row,
        value: run.value,
        optimum,
        queries: run.total_queries,
        support_max: run.support_max(),
        pass: within && bound,
    })
}

pub fn bench(args: &BenchArgs) -> Result<()> {
    let rows = parse_rows(&args.rows).map_err(CliError::Usage)?;
    let budget = args.budget as u128;
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let chunk = rows.len().div_ceil(workers);
    let results = std::thread::scope(|scope| {
        let handles: Vec<_> = rows
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    part.iter()
                        .map(|&row| bench_row(row, budget))
                        .collect::<Result<Vec<_>>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("bench worker panicked"))
            .collect::<Result<Vec<_>>>()
    })?
    .into_iter()
    .flatten()
    .collect::<Vec<_>>();

    let mut csv = String::from(BENCH_HEADER);
    csv.push('\n');
    let mut failed = Vec::new();
    for r in &results {
        let opt = r.optimum.map(|v| v.to_string()).unwrap_or_default();
        let ratio = r
            .optimum
            .map(|v| ratio(r.value, v).to_string())
            .unwrap_or_default();
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.row.n,
            r.row.k,
            r.row.family.name(),
            r.row.seed,
            r.value,
            opt,
            ratio,
            r.queries,
            query_bound(r.row.n, r.row.k),
            r.support_max,
            r.pass
        )
        .expect("string write");
        if !r.pass {
            failed.push(format!(
                "{}:{}:{}:{}",
                r.row.n,
                r.row.k,
                r.row.family.name(),
                r.row.seed
            ));
        }
    }
    emit(args.out.as_deref(), &csv)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(ksubmod::Error::Invariant(format!("bench rows failed: {}", failed.join(" "))).into())
    }
}

pub fn gen(args: &GenArgs) -> Result<()> {
    let instance = random_monotone_instance_with_budget(
        args.seed,
        args.n,
        args.k,
        FamilyMix::Only(args.family),
        args.budget,
    )?;
    let mut text = instance.to_json();
    text.push('\n');
    emit(args.out.as_deref(), &text)
}
