use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use auction_lab::dynamics::{read_jsonl, validate_trace, write_csv, write_jsonl};
use auction_lab::experiments::{
    check_average, check_lemmas, check_pointwise, check_safety_report, experiment_names, ExperimentParams, NamedRun,
};
use auction_lab::{compute_opt, parse_scenario, run, run_named_experiment, BoundReport, Error, Value};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

const FIXTURES_ENV: &str = "AUCTION_LAB_FIXTURES";

/// Best-response dynamics in simultaneous second-price item auctions.
#[derive(Parser)]
#[command(name = "auction-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its trace (JSON lines) and summary (CSV).
    Run {
        #[arg(long)]
        scenario: PathBuf,
        /// Trace output; defaults to the scenario's output.trace.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// CSV summary; defaults to output.summary, else the trace path with a .csv extension.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Replay a recorded trace and check a theorem on it.
    Verify {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long, value_enum)]
        theorem: Theorem,
        /// Welfare optimum, for instances too large to enumerate.
        #[arg(long)]
        opt: Option<Value>,
        /// Print the full report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Run a named reproduction.
    Reproduce {
        #[arg(long, required_unless_present = "all", conflicts_with = "all")]
        name: Option<String>,
        /// Run every named experiment.
        #[arg(long)]
        all: bool,
        /// Parameter override `key=value`; repeatable.
        #[arg(long = "param")]
        params: Vec<String>,
        /// Worker threads for --all.
        #[arg(long)]
        jobs: Option<usize>,
        /// Write the experiment's trace here, when it has one.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// List the named experiments.
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum Theorem {
    Pointwise,
    Average,
    Lemmas,
    Safety,
}

/// A failure that maps to an exit code.
enum Failure {
    /// A checked bound or replay failed: exit 1.
    Violation(serde_json::Value),
    /// Bad input or usage: exit 2.
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::TraceCorrupted { step, detail } => Failure::Violation(json!({
                "status": "fail",
                "reason": "trace-corrupted",
                "step": step,
                "detail": detail,
            })),
            Error::NotQualifying(detail) => Failure::Violation(json!({
                "status": "fail",
                "reason": "not-qualifying",
                "detail": detail,
            })),
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { scenario, trace, summary } => cmd_run(&scenario, trace, summary),
        Command::Verify { trace, theorem, opt, json } => cmd_verify(&trace, theorem, opt, json),
        Command::Reproduce { name, all, params, jobs, trace, json } => {
            cmd_reproduce(name, all, &params, jobs, trace, json)
        }
        Command::List => {
            for name in experiment_names() {
                println!("{name}");
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violation(report)) => {
            eprintln!("{report}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("{}", json!({ "status": "error", "error": msg }));
            ExitCode::from(2)
        }
    }
}

fn fixtures_dir() -> PathBuf {
    match std::env::var_os(FIXTURES_ENV) {
        Some(dir) => PathBuf::from(dir),
        None => PathBuf::from("fixtures"),
    }
}

/// The path itself if it exists, else the same name under the fixtures directory.
fn resolve_input(path: &Path) -> PathBuf {
    if path.exists() || path.is_absolute() {
        return path.to_path_buf();
    }
    let candidate = fixtures_dir().join(path);
    if candidate.exists() {
        candidate
    } else {
        path.to_path_buf()
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn cmd_run(scenario: &Path, trace: Option<PathBuf>, summary: Option<PathBuf>) -> Result<(), Failure> {
    let path = resolve_input(scenario);
    let (scenario, instance) = parse_scenario(&path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let trace_path = trace
        .or_else(|| scenario.output.trace.clone())
        .ok_or_else(|| Failure::Usage("no trace path: pass --trace or set output.trace".into()))?;
    let summary_path = summary.or_else(|| scenario.output.summary.clone()).unwrap_or_else(|| trace_path.with_extension("csv"));
    let config = scenario.run_config(&instance)?;
    let recorded = run(&instance, &config)?;
    let label = scenario.name.clone().unwrap_or_else(|| path.display().to_string());
    let mut out = create(&trace_path)?;
    write_jsonl(&recorded, Some(&label), &mut out)?;
    out.flush().map_err(Error::from)?;
    let mut out = create(&summary_path)?;
    write_csv(&recorded, &mut out)?;
    out.flush().map_err(Error::from)?;
    let echoed: serde_json::Value = serde_json::from_str(&scenario.to_json()).expect("scenario JSON");
    let t = recorded.len();
    println!(
        "{}",
        serde_json::to_string_pretty(&json!({
            "status": "ok",
            "scenario": echoed,
            "trace": trace_path,
            "summary": summary_path,
            "steps": t,
            "final_sw": recorded.sw(t),
            "final_dw": recorded.dw(t),
        }))
        .expect("summary JSON")
    );
    Ok(())
}

fn failure_json(report: &BoundReport) -> serde_json::Value {
    let failures: Vec<_> = report.failures().take(20).collect();
    let stats: Vec<_> = report.stats.iter().filter(|s| !s.pass).collect();
    json!({
        "status": "fail",
        "theorem": report.theorem,
        "first_failure": report.first_failure(),
        "failed_checks": report.failures().count(),
        "failures": failures,
        "failed_stats": stats,
    })
}

fn print_report(report: &BoundReport, as_json: bool) {
    if as_json {
        println!("{}", serde_json::to_string_pretty(report).expect("report JSON"));
    } else {
        print!("{}", report.table());
    }
}

fn cmd_verify(path: &Path, theorem: Theorem, opt: Option<Value>, as_json: bool) -> Result<(), Failure> {
    let path = resolve_input(path);
    let file = File::open(&path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let (trace, _) = read_jsonl(BufReader::new(file))?;
    validate_trace(&trace)?;
    let opt = match opt {
        Some(v) => v,
        None if matches!(theorem, Theorem::Safety) => Value::zero(),
        None => compute_opt(&trace.instance)?.value,
    };
    let report = match theorem {
        Theorem::Pointwise => check_pointwise(&trace, &opt)?,
        Theorem::Average => check_average(&trace, &opt)?,
        Theorem::Lemmas => check_lemmas(&trace, &opt)?,
        Theorem::Safety => check_safety_report(&trace),
    };
    print_report(&report, as_json);
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Violation(failure_json(&report)))
    }
}

fn cmd_reproduce(
    name: Option<String>,
    all: bool,
    pairs: &[String],
    jobs: Option<usize>,
    trace: Option<PathBuf>,
    as_json: bool,
) -> Result<(), Failure> {
    let mut params = ExperimentParams::new();
    for pair in pairs {
        params.insert_pair(pair).map_err(|e| Failure::Usage(e.to_string()))?;
    }
    if !all {
        let name = name.expect("clap requires --name without --all");
        let outcome = run_named_experiment(&name, &params).map_err(|e| Failure::Usage(e.to_string()))?;
        if let (Some(path), Some(t)) = (&trace, &outcome.trace) {
            let mut out = create(path)?;
            write_jsonl(t, Some(&name), &mut out)?;
            out.flush().map_err(Error::from)?;
        }
        print_report(&outcome.report, as_json);
        return if outcome.report.passed { Ok(()) } else { Err(Failure::Violation(failure_json(&outcome.report))) };
    }
    if !pairs.is_empty() || trace.is_some() {
        return Err(Failure::Usage("--param and --trace apply to a single --name".into()));
    }
    let names = experiment_names();
    let workers = jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .clamp(1, names.len());
    let results: Mutex<Vec<Option<Result<NamedRun, Error>>>> = Mutex::new((0..names.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= names.len() {
                    break;
                }
                let r = run_named_experiment(names[i], &ExperimentParams::new());
                results.lock().expect("no poisoned workers")[i] = Some(r);
            });
        }
    });
    let mut failed = Vec::new();
    for (name, r) in names.iter().zip(results.into_inner().expect("no poisoned workers")) {
        match r.expect("every job ran") {
            Ok(outcome) => {
                print_report(&outcome.report, as_json);
                if !outcome.report.passed {
                    failed.push(failure_json(&outcome.report));
                }
            }
            Err(e) => failed.push(json!({ "status": "error", "experiment": name, "error": e.to_string() })),
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Violation(json!({ "status": "fail", "experiments": failed })))
    }
}
