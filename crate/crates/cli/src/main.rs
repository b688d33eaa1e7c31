//! `dasp`: run, check and compare abstract answer set solvers on ground
//! programs.
//!
//! Exit codes: 10 satisfiable, 20 unsatisfiable, 30 inconclusive, 2 when a
//! check finds a problem, 1 on usage or input errors, 0 otherwise.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dasp_core::engine::{
    compare_graphs, explore_single, explore_two_layer, replay, run, Dpt, EngineError, Extension, Outcome, RunOptions,
    RunReport, Solver, SolverConfig, Strategy, TraceStep, Verdict,
};
use dasp_core::oracle::{self, ModelType};
use dasp_core::propagators::PSet;
use dasp_core::random::{random_program, GenParams};
use dasp_core::transforms::{GenKind, TestKind};
use dasp_core::{parse_program, Program};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

const SAT: u8 = 10;
const UNSAT: u8 = 20;
const INCONCLUSIVE: u8 = 30;
const FOUND_PROBLEM: u8 = 2;
const USAGE: u8 = 1;

#[derive(Parser)]
#[command(name = "dasp", version, about = "Abstract solvers for disjunctive answer set programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for one answer set.
    Solve {
        file: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        strategy: StrategyArgs,
        /// Write the run as JSON lines.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Enumerate models by brute force.
    Oracle {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "stable")]
        enumerate: Kind,
        /// Atom cap; 20 by default, 12 for stable models.
        #[arg(long)]
        brute_cap: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Explore a graph exhaustively, or fuzz a solver against the oracle
    /// when no file is given.
    VerifyChecks {
        file: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
        /// Check the plain DPLL graph against the classical models.
        #[arg(long)]
        dp: bool,
        #[arg(long, default_value_t = 2_000_000)]
        max_states: usize,
        #[arg(long, default_value_t = 100)]
        programs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        max_atoms: usize,
        #[arg(long, default_value_t = 12)]
        max_rules: usize,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value_t = oracle::DEFAULT_CAP)]
        brute_cap: usize,
        #[arg(long, default_value_t = 10_000_000)]
        max_steps: u64,
        #[arg(long)]
        json: bool,
    },
    /// Compare the reachable graphs of two generating pairs sharing a witness pair.
    Compare {
        file: PathBuf,
        /// `gen:props`, e.g. `cnfcomp:up`.
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        /// `test:props`, e.g. `cmodelsTest:up`.
        #[arg(long)]
        test: String,
        #[arg(long, default_value_t = 2_000_000)]
        max_states: usize,
        #[arg(long)]
        unsafe_pairs: bool,
        #[arg(long)]
        json: bool,
    },
    /// Re-run a recorded trace and check every step.
    Replay {
        file: PathBuf,
        trace: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, default_value_t = 10_000_000)]
        max_steps: u64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum Kind {
    Classical,
    Supported,
    Stable,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum SolverName {
    Cmodels,
    Gnt,
    Dlv,
    Custom,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, value_enum, default_value = "dlv")]
    solver: SolverName,
    #[arg(long)]
    gen: Option<String>,
    #[arg(long)]
    test: Option<String>,
    #[arg(long)]
    left_props: Option<String>,
    #[arg(long)]
    right_props: Option<String>,
    #[arg(long)]
    early_test: bool,
    #[arg(long)]
    separate_components: bool,
    #[arg(long)]
    learning: bool,
    /// Learnt clauses kept per store before the oldest is dropped.
    #[arg(long)]
    store_cap: Option<usize>,
    /// Accept generating and witness pairs whose declared types do not fit.
    #[arg(long)]
    unsafe_pairs: bool,
}

#[derive(Copy, Clone, ValueEnum)]
enum StrategyName {
    Priority,
    RandomDecide,
    Random,
}

#[derive(Args)]
struct StrategyArgs {
    #[arg(long, value_enum, default_value = "priority")]
    strategy: StrategyName,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10_000_000)]
    max_steps: u64,
}

impl StrategyArgs {
    fn build(&self) -> Strategy {
        match self.strategy {
            StrategyName::Priority => Strategy::Priority,
            StrategyName::RandomDecide => Strategy::random_decide(self.seed),
            StrategyName::Random => Strategy::random(self.seed),
        }
    }
}

/// Input or usage problem, reported with exit code 1.
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Usage {
        Usage(e.to_string())
    }
}

type Res = Result<u8, Usage>;

fn pset(s: &str) -> Result<PSet, Usage> {
    PSet::parse(s).ok_or_else(|| Usage(format!("unknown p-condition set `{s}`")))
}

fn split_pair(s: &str) -> Result<(&str, PSet), Usage> {
    let (name, props) = s
        .split_once(':')
        .ok_or_else(|| Usage(format!("expected `name:props`, got `{s}`")))?;
    Ok((name, pset(props)?))
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig, Usage> {
        let gen = self.gen.as_deref().map(GenKind::parse).transpose()?;
        let test = self.test.as_deref().map(TestKind::parse).transpose()?;
        let left = self.left_props.as_deref().map(pset).transpose()?;
        let right = self.right_props.as_deref().map(pset).transpose()?;
        let mut cfg = match self.solver {
            SolverName::Custom => match (gen, left, test, right) {
                (Some(g), Some(l), Some(t), Some(r)) => SolverConfig::new(g, l, t, r),
                _ => return Err(Usage("--solver custom needs --gen, --test, --left-props and --right-props".into())),
            },
            named => {
                let cfg = match named {
                    SolverName::Cmodels => SolverConfig::cmodels(),
                    SolverName::Gnt => SolverConfig::gnt(),
                    _ => SolverConfig::dlv(),
                };
                let clash = gen.is_some_and(|g| g != cfg.gen)
                    || test.is_some_and(|t| t != cfg.test)
                    || left.is_some_and(|l| l != cfg.left)
                    || right.is_some_and(|r| r != cfg.right);
                if clash {
                    return Err(Usage(format!("pairs given do not match the named solver ({})", cfg.describe())));
                }
                cfg
            }
        };
        let ext: Vec<Extension> = [
            (self.early_test, Extension::EarlyTest),
            (self.separate_components, Extension::SeparateComponents),
            (self.learning, Extension::Learning),
        ]
        .into_iter()
        .filter_map(|(on, e)| on.then_some(e))
        .collect();
        if ext.len() > 1 {
            return Err(Usage("--early-test, --separate-components and --learning exclude each other".into()));
        }
        cfg.extension = ext.first().copied().unwrap_or_default();
        if let Some(cap) = self.store_cap {
            cfg.store_cap = cap;
        }
        cfg.unsafe_pairs = self.unsafe_pairs;
        if self.unsafe_pairs {
            if let Err(e) = cfg.validate() {
                eprintln!("warning: {e}");
            }
        }
        Ok(cfg)
    }
}

fn load(path: &Path) -> Result<Program, Usage> {
    let text = fs::read_to_string(path).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
    parse_program(&text).map_err(|e| Usage(format!("{}:{e}", path.display())))
}

fn model_text(p: &Program, m: &[u32]) -> String {
    let mut names: Vec<&str> = m.iter().map(|&a| p.table().name(a)).collect();
    names.sort_unstable();
    format!("{{{}}}", names.join(", "))
}

fn sorted_names(p: &Program, m: &[u32]) -> Vec<String> {
    let mut names: Vec<String> = m.iter().map(|&a| p.table().name(a).to_string()).collect();
    names.sort_unstable();
    names
}

fn report(p: &Program, rep: &RunReport, json_out: bool) -> u8 {
    let (verdict, code) = match rep.outcome {
        Outcome::Sat(_) => ("SAT", SAT),
        Outcome::Unsat => ("UNSAT", UNSAT),
    };
    if json_out {
        let model = match &rep.outcome {
            Outcome::Sat(m) => json!(sorted_names(p, m)),
            Outcome::Unsat => serde_json::Value::Null,
        };
        println!("{}", json!({"schema": 1, "verdict": verdict, "model": model, "stats": rep.stats}));
    } else {
        match &rep.outcome {
            Outcome::Sat(m) => println!("{}", sorted_names(p, m).join(" ")),
            Outcome::Unsat => println!("UNSATISFIABLE"),
        }
    }
    code
}

fn write_trace(path: &Path, s: &Solver, rep: &RunReport) -> Result<(), Usage> {
    let f = fs::File::create(path).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
    let mut w = BufWriter::new(f);
    writeln!(w, "{}", json!({"schema": 1, "solver": s.config().describe()}))?;
    for step in &rep.trace {
        writeln!(w, "{}", serde_json::to_string(step)?)?;
    }
    writeln!(w, "{}", rep.terminal_json(s.program()))?;
    w.flush()?;
    Ok(())
}

fn solve(file: &Path, sargs: &SolverArgs, strat: &StrategyArgs, trace: Option<&Path>, json_out: bool) -> Res {
    let p = load(file)?;
    let s = Solver::new(p.clone(), sargs.config()?)?;
    let opts = RunOptions {
        max_steps: strat.max_steps,
        record_trace: trace.is_some(),
        ..RunOptions::default()
    };
    let rep = match run(&s, &mut strat.build(), &opts) {
        Ok(r) => r,
        Err(EngineError::StepLimit(n)) => {
            eprintln!("gave up after {n} steps");
            return Ok(INCONCLUSIVE);
        }
        Err(e) => return Err(e.into()),
    };
    if let Some(t) = trace {
        write_trace(t, &s, &rep)?;
    }
    Ok(report(&p, &rep, json_out))
}

fn enumerate(file: &Path, kind: Kind, cap: Option<usize>, json_out: bool) -> Res {
    let p = load(file)?;
    let (w, default_cap) = match kind {
        Kind::Classical => (ModelType::Cla, oracle::DEFAULT_CAP),
        Kind::Supported => (ModelType::Sup, oracle::DEFAULT_CAP),
        Kind::Stable => (ModelType::Sta, 12),
    };
    let models = oracle::models(&p, w, cap.unwrap_or(default_cap))?;
    if json_out {
        let list: Vec<Vec<String>> = models.iter().map(|m| sorted_names(&p, m)).collect();
        println!("{}", json!({"schema": 1, "kind": w.name(), "models": list}));
    } else {
        for m in &models {
            println!("{}", model_text(&p, m));
        }
    }
    Ok(if models.is_empty() { UNSAT } else { SAT })
}

struct Fuzz {
    params: GenParams,
    programs: usize,
    seed: u64,
    jobs: usize,
    cap: usize,
    max_steps: u64,
}

#[derive(Default)]
struct FuzzTally {
    runs: usize,
    skipped: usize,
    mismatches: usize,
    violations: usize,
    failsafe: usize,
    first: Option<String>,
}

impl FuzzTally {
    fn merge(&mut self, o: FuzzTally) {
        self.runs += o.runs;
        self.skipped += o.skipped;
        self.mismatches += o.mismatches;
        self.violations += o.violations;
        self.failsafe += o.failsafe;
        if self.first.is_none() {
            self.first = o.first;
        }
    }
}

fn fuzz_one(cfg: &SolverConfig, p: &Program, f: &Fuzz, seed: u64, t: &mut FuzzTally) {
    let Ok(expected) = oracle::stable_models(p, f.cap) else {
        t.skipped += 1;
        return;
    };
    t.runs += 1;
    let s = match Solver::new(p.clone(), cfg.clone()) {
        Ok(s) => s,
        Err(e) => {
            t.mismatches += 1;
            t.first.get_or_insert(e.to_string());
            return;
        }
    };
    let opts = RunOptions {
        max_steps: f.max_steps,
        ..RunOptions::checked()
    };
    match run(&s, &mut Strategy::random_decide(seed), &opts) {
        Ok(rep) => {
            let ok = match &rep.outcome {
                Outcome::Sat(m) => expected.contains(m),
                Outcome::Unsat => expected.is_empty(),
            };
            if !ok {
                t.mismatches += 1;
                t.first
                    .get_or_insert(format!("{:?} disagrees with the oracle on\n{}", rep.outcome, p.render()));
            }
            let v = rep.measure_violations.len() + rep.invariant_violations.len();
            if v > 0 {
                t.violations += v;
                let first = rep.measure_violations.iter().chain(&rep.invariant_violations).next().unwrap();
                t.first.get_or_insert(format!("{first} on\n{}", p.render()));
            }
        }
        Err(EngineError::StepLimit(_)) => t.failsafe += 1,
        Err(e) => {
            t.mismatches += 1;
            t.first.get_or_insert(format!("{e} on\n{}", p.render()));
        }
    }
}

fn fuzz(cfg: &SolverConfig, f: &Fuzz, json_out: bool) -> Res {
    cfg.validate().or_else(|e| if cfg.unsafe_pairs { Ok(()) } else { Err(e) })?;
    let mut rng = ChaCha8Rng::seed_from_u64(f.seed);
    let programs: Vec<Program> = (0..f.programs).map(|_| random_program(&mut rng, &f.params)).collect();
    let jobs = f.jobs.max(1);
    let mut tally = FuzzTally::default();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..jobs)
            .map(|j| {
                let programs = &programs;
                scope.spawn(move || {
                    let mut t = FuzzTally::default();
                    for (k, p) in programs.iter().enumerate().skip(j).step_by(jobs) {
                        fuzz_one(cfg, p, f, f.seed.wrapping_add(k as u64), &mut t);
                    }
                    t
                })
            })
            .collect();
        for h in handles {
            tally.merge(h.join().expect("worker panicked"));
        }
    });
    let clean = tally.mismatches == 0 && tally.violations == 0;
    if json_out {
        println!(
            "{}",
            json!({
                "schema": 1,
                "solver": cfg.describe(),
                "runs": tally.runs,
                "skipped": tally.skipped,
                "mismatches": tally.mismatches,
                "violations": tally.violations,
                "failsafe": tally.failsafe,
                "first": tally.first,
            })
        );
    } else {
        println!(
            "{} runs of {}: {} mismatches, {} violations, {} hit the step limit, {} skipped",
            tally.runs,
            cfg.describe(),
            tally.mismatches,
            tally.violations,
            tally.failsafe,
            tally.skipped
        );
        if let Some(x) = &tally.first {
            println!("{x}");
        }
    }
    Ok(if !clean {
        FOUND_PROBLEM
    } else if tally.failsafe > 0 {
        INCONCLUSIVE
    } else {
        0
    })
}

fn explore(file: &Path, sargs: &SolverArgs, dp: bool, max_states: usize, cap: usize, json_out: bool) -> Res {
    let p = load(file)?;
    let r = if dp {
        let expected = oracle::classical_models(&p, cap)?;
        explore_single(&Dpt::dp(p.clone()), &expected, max_states)
    } else {
        let expected = oracle::stable_models(&p, cap)?;
        let s = Solver::new(p.clone(), sargs.config()?)?;
        explore_two_layer(&s, &expected, max_states)
    };
    let verdict = match r.verdict {
        Verdict::Pass => "PASS",
        Verdict::Fail => "FAIL",
        Verdict::Inconclusive => "INCONCLUSIVE",
    };
    if json_out {
        let models: Vec<Vec<String>> = r.ok_models.iter().map(|m| sorted_names(&p, m)).collect();
        println!(
            "{}",
            json!({
                "schema": 1,
                "verdict": verdict,
                "states": r.states,
                "edges": r.edges,
                "okModels": models,
                "failReachable": r.fail_reachable,
                "violations": r.violations,
            })
        );
    } else {
        println!("{verdict} ({} states, {} edges)", r.states, r.edges);
        for v in &r.violations {
            println!("{v}");
        }
    }
    Ok(match r.verdict {
        Verdict::Pass => 0,
        Verdict::Fail => FOUND_PROBLEM,
        Verdict::Inconclusive => INCONCLUSIVE,
    })
}

struct CompareArgs<'a> {
    left: &'a str,
    right: &'a str,
    test: &'a str,
    max_states: usize,
    unsafe_pairs: bool,
}

fn compare(file: &Path, c: &CompareArgs, json_out: bool) -> Res {
    let p = load(file)?;
    let (tname, tprops) = split_pair(c.test)?;
    let test = TestKind::parse(tname)?;
    let side = |s: &str| -> Result<SolverConfig, Usage> {
        let (g, props) = split_pair(s)?;
        let mut cfg = SolverConfig::new(GenKind::parse(g)?, props, test, tprops);
        cfg.unsafe_pairs = c.unsafe_pairs;
        Ok(cfg)
    };
    let d = compare_graphs(&p, &side(c.left)?, &side(c.right)?, c.max_states)?;
    let verdict = if d.inconclusive {
        "INCONCLUSIVE"
    } else if d.identical {
        "IDENTICAL"
    } else {
        "DIFFERENT"
    };
    if json_out {
        println!(
            "{}",
            json!({"schema": 1, "verdict": verdict, "states": [d.states.0, d.states.1], "firstDifference": d.first_difference})
        );
    } else {
        println!("{verdict}");
        if let Some(x) = &d.first_difference {
            println!("{x}");
        }
    }
    Ok(if d.inconclusive {
        INCONCLUSIVE
    } else if d.identical {
        0
    } else {
        FOUND_PROBLEM
    })
}

fn replay_file(file: &Path, trace: &Path, sargs: &SolverArgs, max_steps: u64, json_out: bool) -> Res {
    let p = load(file)?;
    let s = Solver::new(p.clone(), sargs.config()?)?;
    let text = fs::read_to_string(trace).map_err(|e| Usage(format!("{}: {e}", trace.display())))?;
    let mut steps = Vec::new();
    let mut terminal = None;
    for (n, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let v: serde_json::Value =
            serde_json::from_str(line).map_err(|e| Usage(format!("{}:{}: {e}", trace.display(), n + 1)))?;
        if v.get("step").is_some() {
            steps.push(
                serde_json::from_value::<TraceStep>(v)
                    .map_err(|e| Usage(format!("{}:{}: {e}", trace.display(), n + 1)))?,
            );
        } else if v.get("terminal").is_some() {
            terminal = Some(v);
        }
    }
    let opts = RunOptions {
        max_steps,
        ..RunOptions::default()
    };
    let rep = match replay(&s, &steps, &opts) {
        Ok(r) => r,
        Err(e @ (EngineError::Diverged { .. } | EngineError::Stuck)) => {
            println!("DIVERGED: {e}");
            return Ok(FOUND_PROBLEM);
        }
        Err(e) => return Err(e.into()),
    };
    if let Some(t) = terminal {
        if t != rep.terminal_json(&p) {
            println!("DIVERGED: terminal state {} differs from {t}", rep.terminal_json(&p));
            return Ok(FOUND_PROBLEM);
        }
    }
    Ok(report(&p, &rep, json_out))
}

fn dispatch(cli: Cli) -> Res {
    match cli.command {
        Command::Solve {
            file,
            solver,
            strategy,
            trace,
            json,
        } => solve(&file, &solver, &strategy, trace.as_deref(), json),
        Command::Oracle {
            file,
            enumerate: kind,
            brute_cap,
            json,
        } => enumerate(&file, kind, brute_cap, json),
        Command::VerifyChecks {
            file,
            solver,
            dp,
            max_states,
            programs,
            seed,
            max_atoms,
            max_rules,
            jobs,
            brute_cap,
            max_steps,
            json,
        } => match file {
            Some(f) => explore(&f, &solver, dp, max_states, brute_cap, json),
            None => {
                let f = Fuzz {
                    params: GenParams::tiny(max_atoms, max_rules),
                    programs,
                    seed,
                    jobs,
                    cap: brute_cap,
                    max_steps,
                };
                fuzz(&solver.config()?, &f, json)
            }
        },
        Command::Compare {
            file,
            left,
            right,
            test,
            max_states,
            unsafe_pairs,
            json,
        } => compare(
            &file,
            &CompareArgs {
                left: &left,
                right: &right,
                test: &test,
                max_states,
                unsafe_pairs,
            },
            json,
        ),
        Command::Replay {
            file,
            trace,
            solver,
            max_steps,
            json,
        } => replay_file(&file, &trace, &solver, max_steps, json),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(USAGE);
        }
        Err(e) => e.exit(),
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Usage(msg)) => {
            eprintln!("dasp: {msg}");
            ExitCode::from(USAGE)
        }
    }
}
