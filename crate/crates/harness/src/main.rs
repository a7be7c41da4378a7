use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use learnaug_caching::{adversary_realizable, CachePolicy, Lru, MajorityPredictor, PredictiveCache, ServeMode};
use learnaug_core::{Problem, Rational, RngStream};
use learnaug_harness::{
    emit_report, failing_records, gen, lb_policy, load_jsonl, run_suite, to_csv, to_jsonl, to_summary, ExperimentConfig, HarnessError,
    ReportFormat, SeedRange, SuiteReport, SUITES,
};
use learnaug_loadbalance::lb_adversary;
use learnaug_nonclairvoyant::{three_length_adversary, three_length_bound, IndexOrder, RandomOrder, UnitPolicy};

/// Verification harness for learning-augmented online algorithms.
#[derive(Parser)]
#[command(name = "learnaug", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate one instance with its hypothesis class as JSON.
    Gen(GenArgs),
    /// Run a verification suite and report its checks.
    Run(RunArgs),
    /// Re-check per-run verdicts of a JSON-lines report.
    Check(InputArgs),
    /// Run a lower-bound adversary against a deterministic policy.
    Adversary(AdversaryArgs),
    /// Convert a JSON-lines report to CSV or a summary.
    Report(InputArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    problem: Problem,
    /// caching: realizable | planted; loadbalance: realizable | error-target | disjoint;
    /// sched: realizable | two-length | perms
    #[arg(long, default_value = "realizable")]
    generator: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 4)]
    ell: usize,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 50)]
    horizon: usize,
    #[arg(long, default_value_t = 10)]
    universe: usize,
    #[arg(long, default_value_t = 0)]
    mu: usize,
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value_t = 3)]
    tau: usize,
    #[arg(long, default_value_t = 12)]
    n: usize,
    #[arg(long, default_value = "1/2")]
    lambda: Rational,
    #[arg(long, default_value = "2")]
    alpha: Rational,
    #[arg(long, default_value = "3/2")]
    beta: Rational,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Suite id; see --list.
    #[arg(long, required_unless_present_any = ["list", "config"])]
    suite: Option<String>,
    /// List the available suites and exit.
    #[arg(long)]
    list: bool,
    /// JSON experiment configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    problem: Option<Problem>,
    /// Inclusive range `a..b`.
    #[arg(long)]
    seeds: Option<SeedRange>,
    #[arg(long, value_delimiter = ',')]
    ell: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    m: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    mu: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    lambda: Option<Vec<Rational>>,
    #[arg(long, value_delimiter = ',')]
    delta_speed: Option<Vec<Rational>>,
    #[arg(long)]
    delta_conf: Option<f64>,
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long)]
    universe: Option<usize>,
    #[arg(long)]
    c: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    algo: Option<Vec<String>>,
    #[arg(long)]
    format: Option<ReportFormat>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct InputArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "summary")]
    format: ReportFormat,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct AdversaryArgs {
    #[arg(long)]
    problem: Problem,
    #[arg(long, default_value_t = 2)]
    ell: usize,
    /// Load-balancing makespan target.
    #[arg(long, default_value_t = 8)]
    c: u64,
    /// Caching cache size.
    #[arg(long, default_value_t = 4)]
    k: usize,
    /// Scheduling job count.
    #[arg(long, default_value_t = 8)]
    n: usize,
    /// loadbalance: greedy | anr; caching: majority | lru; sched: index | random
    #[arg(long)]
    algo: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

enum Outcome {
    Ok,
    BoundFailed,
}

fn read(path: &PathBuf) -> Result<String, HarnessError> {
    std::fs::read_to_string(path).map_err(|e| HarnessError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn write_or_print(text: &str, path: Option<&PathBuf>) -> Result<(), HarnessError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| HarnessError::Io {
            path: p.display().to_string(),
            message: e.to_string(),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn gen_cmd(a: GenArgs) -> Result<Outcome, HarnessError> {
    let mut rng = RngStream::new(a.seed, 0);
    let value = match (a.problem, a.generator.as_str()) {
        (Problem::Caching, "realizable") => gen::caching_realizable(&mut rng, a.ell, a.horizon, a.universe, a.k)?.to_json(),
        (Problem::Caching, "planted") => gen::caching_planted(&mut rng, a.ell, a.horizon, a.universe, a.k, a.mu)?.to_json(),
        (Problem::Loadbalance, "realizable") => gen::lb_realizable(&mut rng, a.m, a.tau, a.ell, 1)?.to_json()?,
        (Problem::Loadbalance, "error-target") => gen::lb_error_target(&mut rng, a.m, a.tau, a.ell, a.alpha, a.beta, a.n as u64)?.to_json()?,
        (Problem::Loadbalance, "disjoint") => gen::lb_disjoint(&mut rng, a.m, a.ell, a.n)?.to_json()?,
        (Problem::Sched, "realizable") => gen::sched_realizable(&mut rng, a.ell, a.n)?.to_json(),
        (Problem::Sched, "two-length") => gen::sched_two_length(&mut rng, a.ell, a.n, a.lambda)?.to_json(),
        (Problem::Sched, "perms") => gen::sched_perms(&mut rng, a.ell, a.n, a.mu)?.to_json(),
        (p, g) => return Err(HarnessError::Config(format!("no generator {g:?} for {p}"))),
    };
    let text = serde_json::to_string_pretty(&value).expect("json value serializes") + "\n";
    write_or_print(&text, a.output.as_ref())?;
    Ok(Outcome::Ok)
}

fn run_cmd(a: RunArgs) -> Result<Outcome, HarnessError> {
    if a.list {
        for s in SUITES {
            println!("{:<20} {:<12} {}", s.id, s.problem.to_string(), s.summary);
        }
        return Ok(Outcome::Ok);
    }
    let mut config = match &a.config {
        Some(path) => ExperimentConfig::from_json(&read(path)?)?,
        None => ExperimentConfig::new(""),
    };
    if let Some(s) = a.suite {
        config.suite = s;
    }
    config.problem = a.problem.or(config.problem);
    config.seeds = a.seeds.or(config.seeds);
    let p = &mut config.params;
    macro_rules! over {
        ($($field:ident),*) => { $( if a.$field.is_some() { p.$field = a.$field; } )* };
    }
    over!(ell, k, n, m, mu, lambda, delta_speed, delta_conf, horizon, universe, c, algo);
    if a.output.is_some() {
        config.output = a.output;
    }
    let format = a.format.or(config.format).unwrap_or_default();
    let report: SuiteReport = run_suite(&config)?;
    let text = if report.records.is_empty() {
        to_summary(&report)
    } else {
        emit_report(&report, format, config.output.as_deref())?
    };
    if config.output.is_none() {
        print!("{text}");
    } else if format != ReportFormat::Summary {
        // checks go to stderr so the data file stays machine-readable
        eprint!("{}", to_summary(&report));
    }
    Ok(if report.passed() { Outcome::Ok } else { Outcome::BoundFailed })
}

fn check_cmd(a: InputArgs) -> Result<Outcome, HarnessError> {
    let records = load_jsonl(&read(&a.input)?)?;
    let failed = failing_records(&records);
    println!("{} records, {failed} failing", records.len());
    Ok(if failed == 0 { Outcome::Ok } else { Outcome::BoundFailed })
}

fn report_cmd(a: InputArgs) -> Result<Outcome, HarnessError> {
    let records = load_jsonl(&read(&a.input)?)?;
    let text = match a.format {
        ReportFormat::Csv => to_csv(&records),
        ReportFormat::Jsonl => to_jsonl(&records),
        ReportFormat::Summary => to_summary(&SuiteReport {
            suite: a.input.display().to_string(),
            records,
            ..Default::default()
        }),
    };
    write_or_print(&text, a.output.as_ref())?;
    Ok(Outcome::Ok)
}

fn adversary_cmd(a: AdversaryArgs) -> Result<Outcome, HarnessError> {
    let (measured, bound, detail) = match a.problem {
        Problem::Loadbalance => {
            let mut policy = lb_policy(&a.algo, a.ell, a.c)?;
            let run = lb_adversary(a.ell, a.c, policy.as_mut())?;
            let bound = Rational::from(a.c) * Rational::frac(1, 2) * Rational::from(a.ell.trailing_zeros() as u64);
            let witness = run.witness.verify(&run.types, &run.feed) && run.witness.makespan == Rational::from(a.c);
            (run.target_load, bound, format!("forced load on machine {}; balanced witness makespan {} (valid: {witness})", run.target, run.witness.makespan))
        }
        Problem::Caching => {
            if !matches!(a.algo.as_str(), "lru" | "majority") {
                return Err(HarnessError::Config(format!("unknown caching policy {:?} (majority, lru)", a.algo)));
            }
            let algo = a.algo.clone();
            let out = adversary_realizable(a.k, a.ell, move |class, k| -> Box<dyn CachePolicy> {
                match algo.as_str() {
                    "lru" => Box::new(Lru::new(k)),
                    _ => Box::new(PredictiveCache::new(k, MajorityPredictor::new(class.clone()), ServeMode::Agnostic)),
                }
            })?;
            let bound = Rational::from(a.k as u64) * Rational::frac(1, 2) * Rational::from(a.ell.trailing_zeros() as u64);
            (out.regret, bound, format!("algorithm cost {}, adversary solution {}", out.alg_cost, out.offline_cost))
        }
        Problem::Sched => {
            let mut policy: Box<dyn UnitPolicy> = match a.algo.as_str() {
                "index" => Box::new(IndexOrder),
                "random" => Box::new(RandomOrder::new(a.n, &mut RngStream::new(a.seed, 0))),
                other => return Err(HarnessError::Config(format!("unknown scheduling policy {other:?} (index, random)"))),
            };
            let out = three_length_adversary(a.ell, a.n, policy.as_mut())?;
            let regret = out.regret();
            (regret, three_length_bound(a.ell, a.n), format!("objective {}, OPT {}", out.record.objective, out.record.opt))
        }
    };
    let pass = measured >= bound;
    println!("{} {}: measured {measured} ≥ bound {bound}: {}", a.problem, a.algo, if pass { "PASS" } else { "FAIL" });
    println!("{detail}");
    Ok(if pass { Outcome::Ok } else { Outcome::BoundFailed })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Gen(a) => gen_cmd(a),
        Command::Run(a) => run_cmd(a),
        Command::Check(a) => check_cmd(a),
        Command::Adversary(a) => adversary_cmd(a),
        Command::Report(a) => report_cmd(a),
    };
    match result {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::BoundFailed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
