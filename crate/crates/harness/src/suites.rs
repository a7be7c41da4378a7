//! Experiment suites. Each one generates seeded instances, runs a pipeline
//! on them and evaluates the inequality it is named after.
//!
//! Seeds run in parallel; results are collected in seed order so a report
//! depends only on the configuration.

use learnaug_caching::{
    brute_force_opt, fitf_cost, fitf_on, fitf_schedule, serve_with_prediction, CachePolicy, CachePredictor, CachingInstance, HedgePredictor,
    MajorityPredictor, PredictiveCache, ServeMode,
};
use learnaug_core::{mean_stderr, Problem, Rational, RngStream, RunRecord};
use learnaug_loadbalance::{
    doubling_runner, lb_adversary, robust_runner, ExpPotential, GreedyLoad, LbEvent, LbInstance, LbPolicy, LbPredictor, LbRun, PredictorKind,
    RandomPredictor, RunnerConfig,
};
use learnaug_nonclairvoyant::{
    agnostic_run, mu_weight, predictive_spjf, round_robin, simulate, sjf_opt, speed_split, three_length_adversary, three_length_bound,
    two_length_run, within_switch_bound, FixedOrder, IndexOrder, RandomOrder, SchedInstance, UnitPolicy,
};
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::check::BoundCheck;
use crate::config::{ExperimentConfig, Params};
use crate::error::HarnessError;
use crate::gen::{self, pick, random_pages, LbSample};

pub struct SuiteInfo {
    pub id: &'static str,
    pub problem: Problem,
    pub summary: &'static str,
}

pub const SUITES: &[SuiteInfo] = &[
    SuiteInfo {
        id: "fitf-oracle",
        problem: Problem::Caching,
        summary: "furthest-in-the-future equals the brute-force optimum on every short sequence",
    },
    SuiteInfo {
        id: "fitf-prefix",
        problem: Problem::Caching,
        summary: "the FitF schedule's cost through t equals the optimum of the prefix",
    },
    SuiteInfo {
        id: "caching-realizable",
        problem: Problem::Caching,
        summary: "majority-vote caching regret at most k·floor(log2 ℓ)",
    },
    SuiteInfo {
        id: "caching-agnostic",
        problem: Problem::Caching,
        summary: "HEDGE caching mean regret at most (5+6/k)μ* + (2k+1) ln ℓ",
    },
    SuiteInfo {
        id: "hedge-coupling",
        problem: Problem::Caching,
        summary: "coupled HEDGE sampling: switch rate equals Σ TVD, marginals equal the weights",
    },
    SuiteInfo {
        id: "lb-predictors",
        problem: Problem::Loadbalance,
        summary: "median and random predictor switch counts, median-table coverability",
    },
    SuiteInfo {
        id: "lb-realizable",
        problem: Problem::Loadbalance,
        summary: "doubling pipelines within their competitive-ratio constants",
    },
    SuiteInfo {
        id: "lb-robust",
        problem: Problem::Loadbalance,
        summary: "robust runner within 8·log2 m on maximally wrong classes",
    },
    SuiteInfo {
        id: "lb-adversary",
        problem: Problem::Loadbalance,
        summary: "restricted-assignment adversary forces load (c/2)·log2 ℓ against OPT c",
    },
    SuiteInfo {
        id: "sched-realizable",
        problem: Problem::Sched,
        summary: "predictive shortest-predicted-job-first regret at most σ·sqrt(2·OPT)",
    },
    SuiteInfo {
        id: "sched-inversions",
        problem: Problem::Sched,
        summary: "cost of an order minus OPT equals its inversion weight",
    },
    SuiteInfo {
        id: "sched-two-length",
        problem: Problem::Sched,
        summary: "two-length algorithm mean regret at most log2 ℓ·(1−λ)·n",
    },
    SuiteInfo {
        id: "sched-agnostic",
        problem: Problem::Sched,
        summary: "sampled-pair ordering within its high-probability inversion bound",
    },
    SuiteInfo {
        id: "sched-adversary",
        problem: Problem::Sched,
        summary: "three-length adversary forces regret at least ℓn/16",
    },
    SuiteInfo {
        id: "sched-round-robin",
        problem: Problem::Sched,
        summary: "round robin within 2·OPT, speed split within (2/δ+1)·OPT",
    },
];

pub fn suite_info(id: &str) -> Option<&'static SuiteInfo> {
    SUITES.iter().find(|s| s.id == id)
}

/// Records, evaluated checks and per-seed errors of one suite run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub records: Vec<RunRecord>,
    pub checks: Vec<BoundCheck>,
    /// Module errors, one per failed seed; they do not abort the suite.
    pub errors: Vec<String>,
    /// Measurements reported alongside the checks.
    pub notes: Vec<String>,
}

impl SuiteReport {
    fn new(suite: &str) -> Self {
        SuiteReport {
            suite: suite.to_string(),
            ..Default::default()
        }
    }

    /// Every check passed and no seed failed.
    pub fn passed(&self) -> bool {
        self.errors.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&BoundCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    fn absorb(&mut self, errors: Vec<String>) {
        self.errors.extend(errors);
    }
}

/// Runs the suite named in `config`.
pub fn run_suite(config: &ExperimentConfig) -> Result<SuiteReport, HarnessError> {
    let info = suite_info(&config.suite).ok_or_else(|| HarnessError::UnknownSuite(config.suite.clone()))?;
    if let Some(p) = config.problem {
        if p != info.problem {
            return Err(HarnessError::Config(format!("suite {} belongs to problem {}, not {p}", info.id, info.problem)));
        }
    }
    let ctx = Ctx {
        params: &config.params,
        seeds: config.seeds.map(|r| r.seeds()),
    };
    let mut report = match info.id {
        "fitf-oracle" => fitf_oracle(&ctx)?,
        "fitf-prefix" => fitf_prefix(&ctx)?,
        "caching-realizable" => caching_realizable(&ctx)?,
        "caching-agnostic" => caching_agnostic(&ctx)?,
        "hedge-coupling" => hedge_coupling(&ctx)?,
        "lb-predictors" => lb_predictors(&ctx)?,
        "lb-realizable" => lb_realizable(&ctx)?,
        "lb-robust" => lb_robust(&ctx)?,
        "lb-adversary" => lb_adversary_suite(&ctx)?,
        "sched-realizable" => sched_realizable(&ctx)?,
        "sched-inversions" => sched_inversions(&ctx)?,
        "sched-two-length" => sched_two_length(&ctx)?,
        "sched-agnostic" => sched_agnostic(&ctx)?,
        "sched-adversary" => sched_adversary(&ctx)?,
        "sched-round-robin" => sched_round_robin(&ctx)?,
        other => return Err(HarnessError::UnknownSuite(other.to_string())),
    };
    report.suite = info.id.to_string();
    Ok(report)
}

struct Ctx<'a> {
    params: &'a Params,
    seeds: Option<Vec<u64>>,
}

impl Ctx<'_> {
    fn seeds(&self, default_count: u64) -> Vec<u64> {
        self.seeds.clone().unwrap_or_else(|| (0..default_count).collect())
    }
}

fn list<T: Clone>(v: &Option<Vec<T>>, default: &[T]) -> Vec<T> {
    match v {
        Some(v) if !v.is_empty() => v.clone(),
        _ => default.to_vec(),
    }
}

fn first<T: Clone>(v: &Option<Vec<T>>, default: T) -> T {
    v.as_ref().and_then(|v| v.first().cloned()).unwrap_or(default)
}

fn floor_log2(x: usize) -> u32 {
    usize::BITS - 1 - x.max(1).leading_zeros()
}

fn ceil_log2(x: usize) -> u32 {
    x.max(1).next_power_of_two().trailing_zeros()
}

/// `max(1, log2 x)`.
fn lg(x: usize) -> f64 {
    (x as f64).log2().max(1.0)
}

/// Stream id derived from the suite's parameter combination.
fn stream(parts: &[usize]) -> u64 {
    parts.iter().fold(0u64, |acc, &x| acc.wrapping_mul(1_000_003).wrapping_add(x as u64 + 1))
}

/// Runs `f` for every seed in parallel; results come back in seed order and
/// failures are turned into messages.
fn par_seeds<T, F>(seeds: &[u64], label: &str, f: F) -> (Vec<T>, Vec<String>)
where
    T: Send,
    F: Fn(u64) -> Result<T, HarnessError> + Sync + Send,
{
    let results: Vec<(u64, Result<T, HarnessError>)> = seeds.par_iter().map(|&s| (s, f(s))).collect();
    let mut ok = Vec::with_capacity(results.len());
    let mut errors = Vec::new();
    for (s, r) in results {
        match r {
            Ok(v) => ok.push(v),
            Err(e) => errors.push(format!("{label} seed {s}: {e}")),
        }
    }
    (ok, errors)
}

fn tag(rec: &mut RunRecord, pipeline: &str, ell: Option<usize>, verdict: Option<bool>) {
    rec.set_meta("pipeline", pipeline);
    if let Some(ell) = ell {
        rec.set_meta("ell", ell);
    }
    rec.set_meta(
        "verdict",
        match verdict {
            Some(true) => "pass",
            Some(false) => "fail",
            None => "na",
        },
    );
}

fn max_or_zero(values: impl IntoIterator<Item = Rational>) -> Rational {
    values.into_iter().max().unwrap_or(Rational::ZERO)
}

fn max_f64(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

// ---------------------------------------------------------------- caching

fn fitf_oracle(ctx: &Ctx) -> Result<SuiteReport, HarnessError> {
    let p = ctx.params;
    let ks = list(&p.k, &[1, 2, 3]);
    let universe = p.universe.unwrap_or(4);
    let horizon = p.horizon.unwrap_or(8);
    if universe == 0 || universe > 6 || horizon > 12 {
        return Err(HarnessError::Config("exhaustive oracle needs universe ≤ 6 and horizon ≤ 12".into()));
    }
    let total = (1..=horizon).map(|t| (universe as u64).saturating_pow(t as u32)).sum::<u64>();
    if total > 1 << 22 {
        return Err(HarnessError::Config(format!("{total} sequences is too many to enumerate")));
    }
    let mut report = SuiteReport::new("fitf-oracle");
    for &k in &ks {
        let mut bad = 0u64;
        for t in 1..=horizon {
            let count = (universe as u64).pow(t as u32);
            let outcomes: Vec<Result<(u64, u64), String>> = (0..count)
                .into_par_iter()
                .map(|mut idx| {
                    let mut seq = Vec::with_capacity(t);
                    for _ in 0..t {
                        seq.push((idx % universe as u64) as usize);
                        idx /= universe as u64;
                    }
                    let inst = CachingInstance::new(universe, k, seq.clone()).map_err(|e| format!("{seq:?}: {e}"))?;
                    let brute = brute_force_opt(&inst).map_err(|e| format!("{seq:?}: {e}"))?;
                    Ok((fitf_schedule(&inst).cost, brute))
                })
                .collect();
            let (mut fitf_sum, mut brute_sum, mut mismatches, mut exceptions) = (0u64, 0u64, 0u64, 0u64);
            for o in outcomes {
                match o {
                    Ok((f, b)) => {
                        fitf_sum += f;
                        brute_sum += b;
                        mismatches += (f != b) as u64;
                    }
                    Err(e) => {
                        exceptions += 1;
                        if exceptions == 1 {
                            report.errors.push(format!("k={k} T={t}: {e}"));
                        }
                    }
                }
            }
            bad += mismatches + exceptions;
            let mut rec = RunRecord::new(Problem::Caching, Rational::from(fitf_sum), Rational::from(brute_sum))
                .with_meta("k", k)
                .with_meta("horizon", t)
                .with_meta("sequences", count)
                .with_meta("mismatches", mismatches)
                .with_meta("exceptions", exceptions);
            tag(&mut rec, "fitf-vs-brute-force", None, Some(mismatches + exceptions == 0));
            report.records.push(rec);
        }
        report.checks.push(BoundCheck::exact(
            &format!("FitF cost = brute-force optimum on all sequences over {universe} pages up to length {horizon} [k={k}] (mismatches + exceptions)"),
            "fitf-oracle",
            Rational::from(bad),
            Rational::ZERO,
        ));
    }
    Ok(report)
}

fn fitf_prefix(ctx: &Ctx) -> Result<SuiteReport, HarnessError> {
    let p = ctx.params;
    let k = first(&p.k, 4);
    let horizon = p.horizon.unwrap_or(100);
    let universe = p.universe.unwrap_or(10);
    let seeds = ctx.seeds(1000);
    let (rows, errors) = par_seeds(&seeds, "fitf-prefix", |s| {
        let mut rng = RngStream::new(s, stream(&[2]));
        let seq = random_pages(&mut rng, horizon, universe);
        CachingInstance::new(universe, k, seq.clone())?;
        let full = fitf_on(&seq, k);
        let mismatches = (0..seq.len()).filter(|&t| full.cost_through(t) != fitf_cost(&seq[..=t], k)).count();
        let mut rec = RunRecord::new(Problem::Caching, Rational::from(full.cost), Rational::from(full.cost)).with_meta("mismatched_prefixes", mismatches);
        rec.seed = s;
        tag(&mut rec, "fitf-prefix", None, Some(mismatches == 0));
        Ok((rec, mismatches))
    });
    let mut report = SuiteReport::new("fitf-prefix");
    report.absorb(errors);
    let bad: usize = rows.iter().map(|r| r.1).sum();
    report.checks.push(BoundCheck::exact(
        &format!("FitF cost through t = optimum of the length-t prefix at every t [{} instances, T={horizon}, k={k}] (mismatched prefixes)", rows.len()),
        "fitf-prefix",
        Rational::from(bad),
        Rational::ZERO,
    ));
    report.records = rows.into_iter().map(|r| r.0).collect();
    Ok(report)
}

fn caching_realizable(ctx: &Ctx) -> Result<SuiteReport, HarnessError> {
    let p = ctx.params;
    let horizon = p.horizon.unwrap_or(500);
    let universe = p.universe.unwrap_or(12);
    let seeds = ctx.seeds(50);
    let mut report = SuiteReport::new("caching-realizable");
    for ell in list(&p.ell, &[2, 4, 8, 16]) {
        for k in list(&p.k, &[2, 5, 10]) {
            let bound = Rational::from(k as u64 * floor_log2(ell) as u64);
            let (records, errors) = par_seeds(&seeds, "caching-realizable", |s| {
                let mut rng = RngStream::new(s, stream(&[3, ell, k]));
                let sample = gen::caching_realizable(&mut rng, ell, horizon, universe, k)?;
                let mut rec = serve_with_prediction(&sample.instance, MajorityPredictor::new(sample.class), ServeMode::Realizable, s)?;
                let ok = rec.regret() <= bound;
                tag(&mut rec, "majority-realizable", Some(ell), Some(ok));
                Ok(rec)
            });
            report.absorb(errors);
            report.checks.push(BoundCheck::exact(
                &format!("regret ≤ k·floor(log2 ℓ) per run [ℓ={ell}, k={k}, T={horizon}] (worst regret)"),
                "caching-realizable-regret",
                max_or_zero(records.iter().map(RunRecord::regret)),
                bound,
            ));
            report.records.extend(records);
        }
    }
    Ok(report)
}

fn caching_agnostic(ctx: &Ctx) -> Result<SuiteReport, HarnessError> {
    let p = ctx.params;
    let horizon = p.horizon.unwrap_or(100);
    let universe = p.universe.unwrap_or(10);
    let seeds = ctx.seeds(500);
    let mut report = SuiteReport::new("caching-agnostic");
    for ell in list(&p.ell, &[8]) {
        for k in list(&p.k, &[5]) {
            for mu in list(&p.mu, &[0, 5, 20]) {
                let bound = (5.0 + 6.0 / k as f64) * mu as f64 + (2 * k + 1) as f64 * (ell as f64).ln();
                let (records, errors) = par_seeds(&seeds, "caching-agnostic", |s| {
                    let mut rng = RngStream::new(s, stream(&[4, ell, k, mu]));
                    let sample = gen::caching_planted(&mut rng, ell, horizon, universe, k, mu)?;
                    let mu_star = sample.class.best_mistakes(&sample.instance.requests);
                    let predictor = HedgePredictor::new(sample.class, k, rng.split(1));
                    let mut rec = serve_with_prediction(&sample.instance, predictor, ServeMode::Agnostic, s)?;
                    rec.set_meta("mu_star", mu_star);
                    tag(&mut rec, "hedge-agnostic", Some(ell), None);
                    Ok(rec)
                });
                report.absorb(errors);
                let regrets: Vec<f64> = records.iter().map(|r| r.regret().to_f64()).collect();
                report.checks.push(BoundCheck::mean_at_most(
                    &format!("mean regret ≤ (5+6/k)μ* + (2k+1) ln ℓ [ℓ={ell}, k={k}, μ*={mu}, {} seeds]", regrets.len()),
                    "caching-agnostic-regret",
                    &regrets,
                    bound,
                ));
                report.records.extend(records);
            }
        }
    }
    Ok(report)
}

fn hedge_coupling(ctx: &Ctx) -> Result<SuiteReport, HarnessError> {
    let p = ctx.params;
    let ell = first(&p.ell, 8);
    let k = first(&p.k, 5);
    let mu = first(&p.mu, 2);
    let horizon = p.horizon.unwrap_or(20);
    let universe = p.universe.unwrap_or(10);
    let seeds = ctx.seeds(500);
    let class_seed = seeds.first().copied().unwrap_or(0);
    let sample = gen::caching_planted(&mut RngStream::new(class_seed, stream(&[5])), ell, horizon, universe, k, mu)?;
    let opt = fitf_cost(&sample.instance.requests, k);
    let (rows, errors) = par_seeds(&seeds, "hedge-coupling", |s| {
        let predictor = HedgePredictor::new(sample.class.clone(), k, RngStream::new(s, stream(&[5, 1])));
        let mut alg = PredictiveCache::new(k, predictor, ServeMode::Agnostic);
        for (t, &r) in sample.instance.requests.iter().enumerate() {
            alg.serve(t, r)?;
        }
        let hedge = alg.predictor();
        let stream = hedge.stream();
        let state = hedge.state();
        let xi: Vec<f64> = state.distribution.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
        let mut rec = RunRecord::new(Problem::Caching, Rational::from(alg.cost()), Rational::from(opt))
            .with_meta("tvd_sum", hedge.expected_switches())
            .with_meta("final_index", state.current_index);
        rec.switches = stream.switches() as u64;
        rec.mistakes = Rational::from(stream.mistakes());
        rec.seed = s;
        tag(&mut rec, "hedge-coupling", Some(ell), None);
        Ok((rec, hedge.expected_switches(), state.current_index, xi))
    });
    let mut report = SuiteReport::new("hedge-coupling");
    report.absorb(errors);
    if let Some((_, tvd, _, xi)) = rows.first() {
        let chains = rows.len();
        let switches: Vec<f64> = rows.iter().map(|r| r.0.switches as f64).collect();
        report.checks.push(BoundCheck::mean_near(
            &format!("switches per chain ≈ Σ TVD = {tvd:.4} [{chains} chains × {horizon} steps]"),
            "coupling-switch-rate",
            &switches,
            *tvd,
        ));
        for (i, &x) in xi.iter().enumerate() {
            let freq = rows.iter().filter(|r| r.2 == i).count() as f64 / chains as f64;
            let se = (x * (1.0 - x) / chains as f64).sqrt();
            report.checks.push(BoundCheck::near(
                &format!("final sampled index frequency ≈ ξ_{i} = {x:.4}"),
                "coupling-marginal",
                freq,
                x,
                se,
            ));
        }
    }
    report.records = rows.into_iter().map(|r| r.0).collect();
    Ok(report)
}

// ---------------------------------------------------------- load balancing

fn lb_record(sample: &LbSample, run: &LbRun, pipeline: &str, seed: u64, ell: usize, verdict: Option<bool>) -> Result<RunRecord, HarnessError> {
    let opt = sample
        .opt
        .ok_or_else(|| HarnessError::Infeasible(format!("feed of {} jobs has no exact optimum", sample.feed.len())))?;
    let err = sample.error()?;
    let mut rec = RunRecord::new(Problem::Loadbalance, run.schedule.makespan, opt)
        .with_meta("m", sample.class.machines())
        .with_meta("tau", sample.class.types.len())
        .with_meta("n", sample.feed.len())
        .with_meta("alpha", err.alpha)
        .with_meta("beta", err.beta)
        .with_meta("c_star", run.c_star)
        .with_meta("iterations", run.iterations.len());
    rec.switches = run.switches() as u64;
    rec.seed = seed;
    let valid = run.schedule.verify(&sample.class.types, &sample.feed);
    tag(&mut rec, pipeline, Some(ell), verdict.map(|v| v && valid));
    if !valid {
        rec.set_meta("verdict", "fail");
        rec.set_meta("invalid_schedule", true);
    }
    Ok(rec)
}

fn random_lb_shape(rng: &mut RngStream, ms: &[usize]) -> (usize, usize, u64) {
    let m = ms[pick(rng, ms.len())];
    let tau = 1 + pick(rng, 4);
    // four quarters per hypothesis, so at most 12 jobs
    let scale = 1 + pick(rng, 3) as u64;
    (m, tau, scale)
}

fn lb_predictors(ctx: &Ctx) -> Result<SuiteReport, HarnessError> {
    let p = ctx.params;
    let ms = list(&p.m, &[2, 3]);
    let seeds = ctx.seeds(500);
    let mut report = SuiteReport::new("lb-predictors");
    for ell in list(&p.ell, &[2, 4, 8, 16]) {
        let switch_bound = floor_log2(ell) as usize + 1;
        let (rows, errors) = par_seeds(&seeds, "lb-predictors median", |s| {
            let mut rng = RngStream::new(s, stream(&[6, ell]));
            let (m, tau, scale) = random_lb_shape(&mut rng, &ms);
            let sample = gen::lb_realizable(&mut rng, m, tau, ell, scale)?;
            let run = doubling_runner(&sample.class, &sample.feed, &RunnerConfig::default(), rng.split(1))?;
            let max_switches = run.iterations.iter().map(|i| i.report.switches).max().unwrap_or(0);
            let mut worst_cover = Rational::ZERO;
            let mut covers = 0usize;
            for it in &run.iterations {
                for &(stacked, predicted) in &it.report.covers {
                    let cap = Rational::from(4u64) * it.c * Rational::from(ceil_log2(predicted).max(1) as u64);
                    worst_cover = worst_cover.max(stacked.checked_div(cap)?);
                    covers += 1;
                }
            }
            let ok = max_switches <= switch_bound && worst_cover <= Rational::ONE;
            let mut rec = lb_record(&sample, &run, "median-doubling", s, ell, Some(ok))?;
            rec.set_meta("max_iteration_switches", max_switches);
            rec.set_meta("covers_checked", covers);
            Ok((rec, max_switches, worst_cover, covers))
        });
        report.absorb(errors);
        let covers: usize = rows.iter().map(|r| r.3).sum();
        report.checks.push(BoundCheck::exact(
            &format!("median switches per guess ≤ floor(log2 ℓ)+1 [ℓ={ell}, {} runs] (worst)", rows.len()),
            "lb-median-switches",
            Rational::from(rows.iter().map(|r| r.1).max().unwrap_or(0)),
            Rational::from(switch_bound),
        ));
        report.checks.push(BoundCheck::exact(
            &format!("median-table cover makespan ≤ 4c·max(1, ceil log2 τ') at every switch [ℓ={ell}, {covers} covers] (worst cover/cap)"),
            "lb-median-cover",
            max_or_zero(rows.iter().map(|r| r.2)),
            Rational::ONE,
        ));
        report.records.extend(rows.into_iter().map(|r| r.0));

        // random predictor against the elimination order: counts 1..=ℓ, each
        // arrival rules out the smallest survivor
        let instances: Vec<LbInstance> = (1..=ell as u64).map(|n| LbInstance::new(vec![n])).collect();
        let (rows, errors) = par_seeds(&seeds, "lb-predictors random", |s| {
            let mut pred = RandomPredictor::new(instances.clone(), &[0], RngStream::new(s, stream(&[6, ell, 1])))
                .ok_or_else(|| HarnessError::Infeasible("no consistent instance".into()))?;
            for t in 1..=ell as u64 {
                if pred.on_arrival(0, &[t]) == LbEvent::Err {
                    return Err(HarnessError::Infeasible("random predictor ran out of instances".into()));
                }
            }
            let switches = pred.switches();
            let mut rec = RunRecord::new(Problem::Loadbalance, Rational::from(switches), Rational::ZERO).with_meta("objective_is", "switches");
            rec.switches = switches as u64;
            rec.seed = s;
            tag(&mut rec, "random-predictor", Some(ell), None);
            Ok(rec)
        });
        report.absorb(errors);
        let samples: Vec<f64> = rows.iter().map(|r| r.switches as f64).collect();
        report.checks.push(BoundCheck::mean_at_most(
            &format!("random predictor mean switches ≤ log2 ℓ under elimination order [ℓ={ell}, {} seeds]", samples.len()),
            "lb-random-switches",
            &samples,
            (ell as f64).log2(),
        ));
        report.records.extend(rows);
    }
    Ok(report)
}

fn lb_realizable(ctx: &Ctx) -> Result<SuiteReport, HarnessError> {
    let p = ctx.params;
    let ms = list(&p.m, &[2, 3]);
    let seeds = ctx.seeds(500);
    let mut report = SuiteReport::new("lb-realizable");
    for ell in list(&p.ell, &[2, 4, 8]) {
        let (rows, errors) = par_seeds(&seeds, "lb-realizable", |s| {
            let mut rng = RngStream::new(s, stream(&[7, ell]));
            let (m, tau, scale) = random_lb_shape(&mut rng, &ms);
            let sample = gen::lb_realizable(&mut rng, m, tau, ell, scale)?;
            let opt = sample.opt.ok_or_else(|| HarnessError::Infeasible("no exact optimum".into()))?;
            let det = doubling_runner(&sample.class, &sample.feed, &RunnerConfig::default(), rng.split(1))?;
            let cfg = RunnerConfig {
                predictor: PredictorKind::Random,
                ..Default::default()
            };
            let rnd = doubling_runner(&sample.class, &sample.feed, &cfg, rng.split(2))?;
            let det_bound = 64.0 * lg(ell) * lg(tau);
            let det_ratio = (det.schedule.makespan / opt).to_f64();
            let det_rec = lb_record(&sample, &det, "median-doubling", s, ell, Some(det_ratio <= det_bound))?;
            let rnd_rec = lb_record(&sample, &rnd, "random-doubling", s, ell, None)?;
            Ok((det_rec, rnd_rec, det_ratio / det_bound, (rnd.schedule.makespan / opt).to_f64()))
        });
        report.absorb(errors);
        report.checks.push(BoundCheck::approx(
            &format!("deterministic ratio ≤ 64·max(1,log2 ℓ)·max(1,log2 τ) per run [ℓ={ell}, {} runs] (worst ratio/bound)", rows.len()),
            "lb-deterministic-ratio",
            max_f64(rows.iter().map(|r| r.2)),
            1.0,
        ));
        let rnd: Vec<f64> = rows.iter().map(|r| r.3).collect();
        report.checks.push(BoundCheck::mean_at_most(
            &format!("randomized mean ratio ≤ 32·max(1,log2 ℓ) [ℓ={ell}, {} seeds]", rnd.len()),
            "lb-random-ratio",
            &rnd,
            32.0 * lg(ell),
        ));
        let det: Vec<f64> = rows.iter().map(|r| r.0.ratio().map_or(f64::NAN, Rational::to_f64)).collect();
        report.notes.push(format!(
            "ℓ={ell}: deterministic ratio mean {:.3} max {:.3}; randomized ratio mean {:.3} max {:.3}",
            mean_stderr(&det).0,
            max_f64(det.iter().copied()),
            mean_stderr(&rnd).0,
            max_f64(rnd.iter().copied())
        ));
        for (d, r, _, _) in rows {
            report.records.push(d);
            report.records.push(r);
        }
    }
    Ok(report)
}

fn lb_robust(ctx: &Ctx) -> Result<SuiteReport, HarnessError> {
    let p = ctx.params;
    let seeds = ctx.seeds(100);
    let mut report = SuiteReport::new("lb-robust");
    for m in list(&p.m, &[2, 4]) {
        for ell in list(&p.ell, &[2]) {
            for n in list(&p.n, &[8]) {
                let bound = 8.0 * (m as f64).log2();
                let (rows, errors) = par_seeds(&seeds, "lb-robust", |s| {
                    let mut rng = RngStream::new(s, stream(&[8, m, ell, n]));
                    let sample = gen::lb_disjoint(&mut rng, m, ell, n)?;
                    let opt = sample.opt.ok_or_else(|| HarnessError::Infeasible("no exact optimum".into()))?;
                    let robust = robust_runner(&sample.class, &sample.feed, &RunnerConfig::default(), rng.split(1))?;
                    let plain = doubling_runner(&sample.class, &sample.feed, &RunnerConfig::default(), rng.split(2))?;
                    let ratio = (robust.schedule.makespan / opt).to_f64();
                    let mut rec = lb_record(&sample, &robust, "robust", s, ell, Some(ratio <= bound))?;
                    rec.set_meta("fallback_jobs", robust.fallback_jobs);
                    let mut plain_rec = lb_record(&sample, &plain, "non-robust", s, ell, None)?;
                    plain_rec.set_meta("guard_jobs", plain.guard_jobs);
                    Ok((rec, plain_rec, ratio, (plain.schedule.makespan / opt).to_f64()))
                });
                report.absorb(errors);
                report.checks.push(BoundCheck::approx(
                    &format!("robust ratio ≤ 8·log2 m per run, (α,β) = (n+1,n+1) [m={m}, ℓ={ell}, n={n}, {} runs] (worst ratio)", rows.len()),
                    "lb-robust-ratio",
                    max_f64(rows.iter().map(|r| r.2)),
                    bound,
                ));
                let plain: Vec<f64> = rows.iter().map(|r| r.3).collect();
                let robust: Vec<f64> = rows.iter().map(|r| r.2).collect();
                report.notes.push(format!(
                    "m={m} ℓ={ell} n={n}: robust ratio mean {:.3} max {:.3}; non-robust ratio mean {:.3} max {:.3}; bound {bound:.1}",
                    mean_stderr(&robust).0,
                    max_f64(robust.iter().copied()),
                    mean_stderr(&plain).0,
                    max_f64(plain.iter().copied())
                ));
                for (a, b, _, _) in rows {
                    report.records.push(a);
                    report.records.push(b);
                }
            }
        }
    }
    Ok(report)
}

/// Builds the deterministic policy named `algo` for `m` machines.
pub fn lb_policy(algo: &str, m: usize, c: u64) -> Result<Box<dyn LbPolicy>, HarnessError> {
    match algo {
        "greedy" => Ok(Box::new(GreedyLoad::new(m))),
        "anr" | "anr_online" | "potential" => Ok(Box::new(ExpPotential::new(m, Rational::from(c)))),
        other => Err(HarnessError::Config(format!("unknown load-balancing policy {other:?} (greedy, anr)"))),
    }
}

fn lb_adversary_suite(ctx: &Ctx) -> Result<SuiteReport, HarnessError> {
    let p = ctx.params;
    let c = p.c.unwrap_or(8);
    let algos = list(&p.algo, &["greedy".to_string(), "anr".to_string()]);
    let mut report = SuiteReport::new("lb-adversary");
    for ell in list(&p.ell, &[2, 4]) {
        for algo in &algos {
            let mut policy = lb_policy(algo, ell, c)?;
            let run = match lb_adversary(ell, c, policy.as_mut()) {
                Ok(run) => run,
                Err(e) => {
                    report.errors.push(format!("lb-adversary ℓ={ell} {algo}: {e}"));
                    continue;
                }
            };
            let bound = Rational::from(c) * Rational::frac(1, 2) * Rational::from(floor_log2(ell) as u64);
            let verified = run.witness.verify(&run.types, &run.feed);
            let witness_gap = (run.witness.makespan - Rational::from(c)).abs() + if verified { Rational::ZERO } else { Rational::ONE };
            let mut rec = RunRecord::new(Problem::Loadbalance, run.schedule.makespan, run.witness.makespan)
                .with_meta("algo", algo)
                .with_meta("target_load", run.target_load)
                .with_meta("bound", bound)
                .with_meta("jobs", run.feed.len());
            // the witness only bounds OPT from above; report the true value when it is cheap
            if run.feed.len() <= gen::EXACT_OPT_CAP {
                match learnaug_loadbalance::exact_opt(&run.types, &run.feed) {
                    Ok(opt) => rec.set_meta("exact_opt", opt),
                    Err(e) => report.errors.push(format!("lb-adversary ℓ={ell} {algo}: exact optimum: {e}")),
                }
            }
            tag(&mut rec, &format!("adversary-{algo}"), Some(ell), Some(run.target_load >= bound && witness_gap.is_zero()));
            report.records.push(rec);
            report.checks.push(BoundCheck::exact(
                &format!("forced load ≥ (c/2)·log2 ℓ [ℓ=m={ell}, c={c}, {algo}] (bound ≤ measured)"),
                "lb-adversary-load",
                bound,
                run.target_load,
            ));
            report.checks.push(BoundCheck::exact(
                &format!("balanced witness schedule is valid with makespan c [ℓ=m={ell}, c={c}, {algo}] (|makespan − c| + invalid)"),
                "lb-adversary-witness",
                witness_gap,
                Rational::ZERO,
            ));
        }
    }
    Ok(report)
}

// -------------------------------------------------------------- scheduling

fn sched_realizable(ctx: &Ctx) -> Result<SuiteReport, HarnessError> {
    let p = ctx.params;
    let seeds = ctx.seeds(100);
    let mut report = SuiteReport::new("sched-realizable");
    for ell in list(&p.ell, &[2, 4, 8]) {
        for n in list(&p.n, &[50]) {
            let (rows, errors) = par_seeds(&seeds, "sched-realizable", |s| {
                let mut rng = RngStream::new(s, stream(&[10, ell, n]));
                let sample = gen::sched_realizable(&mut rng, ell, n)?;
                let (mut run, checks) = predictive_spjf(&sample.instance, &sample.class)?;
                let within = within_switch_bound(run.record.regret(), run.switches, run.record.opt);
                run.record.seed = s;
                tag(&mut run.record, "predictive-spjf", Some(ell), Some(within && run.switches <= ell));
                Ok((run.record, within, run.switches, checks.monotone && checks.shortest_first))
            });
            report.absorb(errors);
            report.checks.push(BoundCheck::exact(
                &format!("regret ≤ σ·sqrt(2·OPT) per run [ℓ={ell}, n={n}, {} runs] (violations)", rows.len()),
                "sched-switch-regret",
                Rational::from(rows.iter().filter(|r| !r.1).count()),
                Rational::ZERO,
            ));
            report.checks.push(BoundCheck::exact(
                &format!("σ ≤ ℓ [ℓ={ell}, n={n}] (largest σ)"),
                "sched-switch-count",
                Rational::from(rows.iter().map(|r| r.2).max().unwrap_or(0)),
                Rational::from(ell),
            ));
            let broken = rows.iter().filter(|r| !r.3).count();
            report.notes.push(format!("ℓ={ell} n={n}: {broken} runs broke predictor monotonicity or shortest-first completion"));
            if broken > 0 {
                report.errors.push(format!("sched-realizable ℓ={ell}: {broken} runs broke predictor invariants"));
            }
            report.records.extend(rows.into_iter().map(|r| r.0));
        }
    }
    Ok(report)
}

fn sched_inversions(ctx: &Ctx) -> Result<SuiteReport, HarnessError> {
    let max_n = first(&ctx.params.n, 50);
    let seeds = ctx.seeds(1000);
    let (rows, errors) = par_seeds(&seeds, "sched-inversions", |s| {
        let mut rng = RngStream::new(s, stream(&[11]));
        let n = 1 + pick(&mut rng, max_n.max(1));
        let inst = SchedInstance::new((0..n).map(|_| Rational::frac(1 + pick(&mut rng, 20) as i128, 20)).collect())?;
        let mut order: Vec<usize> = (0..n).collect();
        rng.shuffle(&mut order);
        let sim = simulate(&inst, &mut FixedOrder::new(order.clone()))?;
        let (opt, _) = sjf_opt(&inst);
        let mu = mu_weight(&inst, &order, None);
        let ok = sim.total_completion() - opt == mu;
        let mut rec = RunRecord::new(Problem::Sched, sim.total_completion(), opt).with_meta("n", n);
        rec.mistakes = mu;
        rec.seed = s;
        tag(&mut rec, "fixed-order", None, Some(ok));
        Ok((rec, ok))
    });
    let mut report = SuiteReport::new("sched-inversions");
    report.absorb(errors);
    report.checks.push(BoundCheck::exact(
        &format!("cost(order) − OPT = inversion weight [{} random pairs, n ≤ {max_n}] (mismatches)", rows.len()),
        "sched-inversion-identity",
        Rational::from(rows.iter().filter(|r| !r.1).count()),
        Rational::ZERO,
    ));
    report.records = rows.into_iter().map(|r| r.0).collect();
    Ok(report)
}

fn sched_two_length(ctx: &Ctx) -> Result<SuiteReport, HarnessError> {
    let p = ctx.params;
    let seeds = ctx.seeds(500);
    let mut report = SuiteReport::new("sched-two-length");
    for lambda in list(&p.lambda, &[Rational::frac(1, 4), Rational::frac(1, 2)]) {
        for ell in list(&p.ell, &[2, 8]) {
            for n in list(&p.n, &[60]) {
                let tag_l = (lambda.numer() * 1000 / lambda.denom().max(1)) as usize;
                let (records, errors) = par_seeds(&seeds, "sched-two-length", |s| {
                    let mut rng = RngStream::new(s, stream(&[12, tag_l, ell, n]));
                    let sample = gen::sched_two_length(&mut rng, ell, n, lambda)?;
                    let mut run = two_length_run(&sample.instance, &sample.class, lambda, rng.split(1))?;
                    run.record.seed = s;
                    run.record.set_meta("lambda", lambda);
                    tag(&mut run.record, "two-length", Some(ell), None);
                    Ok(run.record)
                });
                report.absorb(errors);
                let regrets: Vec<f64> = records.iter().map(|r| r.regret().to_f64()).collect();
                report.checks.push(BoundCheck::mean_at_most(
                    &format!("mean regret ≤ log2 ℓ·(1−λ)·n [λ={lambda}, ℓ={ell}, n={n}, {} seeds]", regrets.len()),
                    "sched-two-length-regret",
                    &regrets,
                    (ell as f64).log2() * (1.0 - lambda.to_f64()) * n as f64,
                ));
                report.records.extend(records);
            }
        }
    }
    Ok(report)
}

fn sched_agnostic(ctx: &Ctx) -> Result<SuiteReport, HarnessError> {
    let p = ctx.params;
    let delta_conf = p.delta_conf.unwrap_or(0.1);
    if !(delta_conf > 0.0 && delta_conf < 1.0) {
        return Err(HarnessError::Config(format!("delta_conf {delta_conf} outside (0, 1)")));
    }
    let seeds = ctx.seeds(200);
    let mut report = SuiteReport::new("sched-agnostic");
    for n in list(&p.n, &[30, 60]) {
        for ell in list(&p.ell, &[4, 16]) {
            let (rows, errors) = par_seeds(&seeds, "sched-agnostic", |s| {
                let mut rng = RngStream::new(s, stream(&[13, n, ell]));
                let sample = gen::sched_perms(&mut rng, ell, n, n / 10)?;
                let out = agnostic_run(&sample.instance, &sample.class, delta_conf, rng.split(1))?;
                let bound = out.bound();
                let ok = out.mu_final.to_f64() <= bound;
                let mut rec = out.run.record;
                rec.seed = s;
                rec.set_meta("mu_best", out.mu_best);
                rec.set_meta("bound", bound);
                rec.set_meta("sample_pairs", out.sample.m);
                tag(&mut rec, "sampled-pairs", Some(ell), Some(ok));
                Ok((rec, ok))
            });
            report.absorb(errors);
            let fraction = if rows.is_empty() {
                0.0
            } else {
                rows.iter().filter(|r| r.1).count() as f64 / rows.len() as f64
            };
            report.checks.push(BoundCheck::approx(
                &format!("P[μ(π) ≤ μ(h*) + 2ε·C(n,2) + 2mn] ≥ 1−δ−0.05 [n={n}, ℓ={ell}, δ={delta_conf}, {} seeds] (target ≤ fraction)", rows.len()),
                "sched-agnostic-whp",
                1.0 - delta_conf - 0.05,
                fraction,
            ));
            report.records.extend(rows.into_iter().map(|r| r.0));
        }
    }
    Ok(report)
}

fn sched_adversary(ctx: &Ctx) -> Result<SuiteReport, HarnessError> {
    let p = ctx.params;
    let seeds = ctx.seeds(100);
    let mut report = SuiteReport::new("sched-adversary");
    for ell in list(&p.ell, &[2]) {
        for n in list(&p.n, &[8]) {
            let bound = three_length_bound(ell, n);
            let run = |policy: &mut dyn UnitPolicy, name: &str, seed: u64| -> Result<RunRecord, HarnessError> {
                let out = three_length_adversary(ell, n, policy)?;
                let regret = out.regret();
                let mut rec = out.record;
                rec.seed = seed;
                rec.set_meta("chosen", out.chosen);
                tag(&mut rec, name, Some(ell), Some(regret >= bound));
                Ok(rec)
            };
            let mut index = Vec::new();
            match run(&mut IndexOrder, "adversary-index-order", 0) {
                Ok(r) => index.push(r),
                Err(e) => report.errors.push(format!("sched-adversary index order: {e}")),
            }
            let (random, errors) = par_seeds(&seeds, "sched-adversary", |s| {
                let mut rng = RngStream::new(s, stream(&[14, ell, n]));
                let mut policy = RandomOrder::new(n, &mut rng);
                run(&mut policy, "adversary-random-order", s)
            });
            report.absorb(errors);
            for (name, recs) in [("index order", &index), ("random order", &random)] {
                report.checks.push(BoundCheck::exact(
                    &format!("regret ≥ ℓn/16 [ℓ={ell}, n={n}, {name}, {} runs] (bound ≤ smallest regret)", recs.len()),
                    "sched-adversary-regret",
                    bound,
                    recs.iter().map(RunRecord::regret).min().unwrap_or(Rational::ZERO),
                ));
            }
            report.records.extend(index);
            report.records.extend(random);
        }
    }
    Ok(report)
}

fn sched_round_robin(ctx: &Ctx) -> Result<SuiteReport, HarnessError> {
    let p = ctx.params;
    let max_n = first(&p.n, 8);
    let deltas = list(&p.delta_speed, &[Rational::frac(1, 4), Rational::frac(1, 2)]);
    if deltas.iter().any(|d| !d.is_positive() || *d >= Rational::ONE) {
        return Err(HarnessError::Config("delta_speed must lie in (0, 1)".into()));
    }
    let seeds = ctx.seeds(100);
    let (rows, errors) = par_seeds(&seeds, "sched-round-robin", |s| {
        let mut rng = RngStream::new(s, stream(&[15]));
        let n = 1 + pick(&mut rng, max_n.max(1));
        let inst = SchedInstance::new((0..n).map(|_| Rational::frac(1 + pick(&mut rng, 10) as i128, 10)).collect())?;
        let mut rr = round_robin(&inst)?;
        let rr_ratio = rr.record.ratio().unwrap_or(Rational::ZERO);
        rr.record.seed = s;
        tag(&mut rr.record, "round-robin", None, Some(rr_ratio <= Rational::from(2u64)));
        let mut out = vec![(rr.record, rr_ratio)];
        let (_, mut longest_first) = sjf_opt(&inst);
        longest_first.reverse();
        for &delta in &deltas {
            let mut run = speed_split(&inst, FixedOrder::new(longest_first.clone()), delta)?;
            let ratio = run.record.ratio().unwrap_or(Rational::ZERO);
            let bound = Rational::from(2u64) / delta + Rational::ONE;
            run.record.seed = s;
            run.record.set_meta("delta_speed", delta);
            tag(&mut run.record, "speed-split-longest-first", None, Some(ratio <= bound));
            out.push((run.record, ratio));
        }
        Ok(out)
    });
    let mut report = SuiteReport::new("sched-round-robin");
    report.absorb(errors);
    report.checks.push(BoundCheck::exact(
        &format!("round-robin ratio ≤ 2 per run [{} runs, n ≤ {max_n}] (worst ratio)", rows.len()),
        "rr-ratio",
        max_or_zero(rows.iter().map(|r| r[0].1)),
        Rational::from(2u64),
    ));
    for (i, &delta) in deltas.iter().enumerate() {
        report.checks.push(BoundCheck::exact(
            &format!("speed split with longest-first inner ratio ≤ 2/δ+1 [δ={delta}] (worst ratio)"),
            "speed-split-ratio",
            max_or_zero(rows.iter().map(|r| r[i + 1].1)),
            Rational::from(2u64) / delta + Rational::ONE,
        ));
    }
    report.records = rows.into_iter().flatten().map(|r| r.0).collect();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SeedRange;

    #[test]
    fn helpers() {
        assert_eq!(floor_log2(1), 0);
        assert_eq!(floor_log2(16), 4);
        assert_eq!(floor_log2(17), 4);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(1), 0);
        assert_ne!(stream(&[1, 2]), stream(&[2, 1]));
    }

    #[test]
    fn one_seed_one_record() {
        let mut cfg = ExperimentConfig::new("sched-inversions").with_seeds(SeedRange::new(3, 3).unwrap());
        cfg.params.n = Some(vec![10]);
        let rep = run_suite(&cfg).unwrap();
        assert_eq!(rep.records.len(), 1);
        assert!(rep.passed());
    }

    #[test]
    fn unknown_suite_and_wrong_problem() {
        assert!(matches!(run_suite(&ExperimentConfig::new("nope")), Err(HarnessError::UnknownSuite(_))));
        let mut cfg = ExperimentConfig::new("sched-inversions");
        cfg.problem = Some(Problem::Caching);
        assert!(run_suite(&cfg).is_err());
    }

    #[test]
    fn every_suite_id_dispatches() {
        for s in SUITES {
            // tiny configurations: only checks that each id is wired up
            let mut cfg = ExperimentConfig::new(s.id).with_seeds(SeedRange::new(0, 1).unwrap());
            cfg.params.horizon = Some(if s.id == "fitf-oracle" { 3 } else { 12 });
            cfg.params.ell = Some(vec![2]);
            cfg.params.k = Some(vec![2]);
            cfg.params.n = Some(vec![if s.id == "sched-agnostic" { 12 } else { 8 }]);
            cfg.params.mu = Some(vec![1]);
            cfg.params.m = Some(vec![2]);
            let rep = run_suite(&cfg).unwrap_or_else(|e| panic!("{}: {e}", s.id));
            assert!(!rep.records.is_empty(), "{}", s.id);
            assert!(!rep.checks.is_empty(), "{}", s.id);
            assert!(rep.errors.is_empty(), "{}: {:?}", s.id, rep.errors);
        }
    }
}
