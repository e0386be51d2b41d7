use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use qplan_core::encoder::{assemble, EncodingConfig, MutexMode, PlanKind, QuantMode};
use qplan_core::logic::qdimacs;
use qplan_core::plan::{verify_plan, FailureReason, Plan, VerifyOptions};
use qplan_core::reduction::{qbf_to_planning, ForallExistsQbf};
use qplan_core::solver::{expand_eval, solve, Outcome, SolverConfig};
use qplan_core::workbench::{gen_blocks, gen_rooms, plan_search, run_benchmark, SearchLimits, Suite};
use qplan_core::{parse_domain, ProblemInstance};

const EXIT_TRUE: u8 = 0;
const EXIT_FALSE: u8 = 1;
const EXIT_UNKNOWN: u8 = 2;
const EXIT_USAGE: u8 = 10;
const EXIT_FORMAT: u8 = 11;
const EXIT_IO: u8 = 12;
const EXIT_INTERNAL: u8 = 13;

#[derive(Parser)]
#[command(name = "qplan", version, about = "Conditional planning through quantified Boolean formulae")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a planning problem as a QDIMACS formula
    Encode {
        #[command(flatten)]
        enc: EncodeArgs,
        #[arg(long)]
        tmax: usize,
        #[arg(long, default_value_t = 1)]
        states: usize,
        /// Output file; stdout when absent
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Decide a QDIMACS formula
    Solve {
        file: PathBuf,
        #[arg(long)]
        no_partition: bool,
        #[arg(long)]
        no_failed_literal: bool,
        /// Keep top-level failed literals but skip the inner-block ones
        #[arg(long)]
        no_inner_failed_literal: bool,
        #[arg(long)]
        no_probing: bool,
        /// Evaluate by full expansion instead (small formulae only)
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Give up after this many milliseconds
        #[arg(long)]
        time_cap: Option<u64>,
    },
    /// Search for the smallest plan, growing the horizon and state count
    Plan {
        #[command(flatten)]
        enc: EncodeArgs,
        #[arg(long)]
        max_tmax: usize,
        #[arg(long, default_value_t = 4)]
        max_states: usize,
        /// Per-call solver cap in milliseconds
        #[arg(long)]
        time_cap: Option<u64>,
        /// Solve independent parameter points in parallel
        #[arg(long)]
        concurrent: bool,
        /// Where to write the plan; stdout when absent
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate a plan from every initial state under every choice
    Verify {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        plan: PathBuf,
        /// Defaults to the horizon recorded in the plan file
        #[arg(long)]
        tmax: Option<usize>,
        /// Sample this many scenarios when there are more
        #[arg(long, default_value_t = 1 << 20)]
        cap: usize,
        /// Operators that may not fire together: dep or all
        #[arg(long, default_value = "dep")]
        mutex: MutexMode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Generate a benchmark domain
    Gen {
        #[command(subcommand)]
        family: Family,
        #[arg(short, long, global = true)]
        out: Option<PathBuf>,
    },
    /// Turn a forall-exists QDIMACS formula into a planning domain
    Qbf2cp {
        file: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run a benchmark suite and print one CSV record per solver call
    Bench {
        /// rooms, blocks3, blocks4, example43 or paper-fixtures
        #[arg(long)]
        suite: Suite,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Per-call solver cap in milliseconds
        #[arg(long)]
        time_cap: Option<u64>,
    },
}

#[derive(Subcommand)]
enum Family {
    Rooms { n: usize },
    Blocks { n: usize },
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(long)]
    domain: PathBuf,
    #[arg(long)]
    kind: PlanKind,
    #[arg(long, default_value = "aux")]
    quant: QuantMode,
    /// Add synthesised 2-literal invariants (aux mode only)
    #[arg(long)]
    invariants: bool,
    #[arg(long, default_value = "all")]
    mutex: MutexMode,
}

impl EncodeArgs {
    fn config(&self, t_max: usize, n_states: usize) -> EncodingConfig {
        EncodingConfig::new(self.kind, t_max, n_states)
            .with_quant(self.quant)
            .with_mutex(self.mutex)
            .with_invariants(self.invariants)
    }
}

/// Error carrying the exit status it should produce.
struct Failure {
    code: u8,
    err: anyhow::Error,
}

trait Coded<T> {
    fn code(self, code: u8) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Coded<T> for Result<T, E> {
    fn code(self, code: u8) -> Result<T, Failure> {
        self.map_err(|e| Failure { code, err: e.into() })
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).code(EXIT_IO)
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())).code(EXIT_IO),
        None => io::stdout().write_all(text.as_bytes()).code(EXIT_IO),
    }
}

fn load_domain(path: &Path) -> Result<ProblemInstance, Failure> {
    parse_domain(&read(path)?).with_context(|| path.display().to_string()).code(EXIT_FORMAT)
}

fn cap(ms: Option<u64>) -> Option<Duration> {
    ms.map(Duration::from_millis)
}

fn outcome_code(o: Outcome) -> u8 {
    match o {
        Outcome::True => EXIT_TRUE,
        Outcome::False => EXIT_FALSE,
        Outcome::Unknown => EXIT_UNKNOWN,
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Encode { enc, tmax, states, out } => {
            let inst = load_domain(&enc.domain)?;
            let e = assemble(&inst, &enc.config(tmax, states)).code(EXIT_FORMAT)?;
            write_out(out.as_deref(), &qdimacs::write(&e.qbf))?;
            eprintln!("vars={} clauses={}", e.num_vars(), e.num_clauses());
            Ok(EXIT_TRUE)
        }
        Command::Solve { file, no_partition, no_failed_literal, no_inner_failed_literal, no_probing, oracle, seed, time_cap } => {
            let q = qdimacs::read(&read(&file)?).with_context(|| file.display().to_string()).code(EXIT_FORMAT)?;
            if oracle {
                let value = expand_eval(&q).code(EXIT_USAGE)?;
                println!("result={value}");
                return Ok(if value { EXIT_TRUE } else { EXIT_FALSE });
            }
            let cfg = SolverConfig {
                enable_partitioning: !no_partition,
                enable_failed_literal: !no_failed_literal,
                enable_inner_failed_literal: !no_failed_literal && !no_inner_failed_literal,
                enable_universal_probing: !no_probing,
                seed,
                time_cap: cap(time_cap),
                ..SolverConfig::default()
            };
            let r = solve(&q, &cfg);
            println!("{}", r.stats_line());
            if let Some(w) = r.witness_line() {
                println!("{w}");
            }
            Ok(outcome_code(r.outcome))
        }
        Command::Plan { enc, max_tmax, max_states, time_cap, concurrent, out } => {
            let inst = load_domain(&enc.domain)?;
            let label = enc.domain.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let limits = SearchLimits {
                max_t_max: max_tmax,
                max_states,
                time_cap: cap(time_cap),
                concurrent,
                ..SearchLimits::default()
            };
            let report = plan_search(&inst, &label, &enc.config(1, 1), &SolverConfig::default(), &limits)
                .code(EXIT_INTERNAL)?;
            for r in &report.records {
                let states = r.n_states.map(|s| s.to_string()).unwrap_or_else(|| "-".into());
                eprintln!("tmax={} states={states} clauses={} vars={} ms={} nodes={} {}", r.t_max, r.clauses, r.vars, r.ms, r.nodes, r.value);
            }
            match report.found {
                Some(found) => {
                    eprintln!(
                        "plan at tmax={} states={} verified over {} scenarios",
                        found.t_max, found.n_states, found.verification.scenarios
                    );
                    let mut text = found.plan.to_json(&inst, found.t_max);
                    text.push('\n');
                    write_out(out.as_deref(), &text)?;
                    Ok(EXIT_TRUE)
                }
                None if report.inconclusive() => {
                    eprintln!("no plan found; some calls hit the time cap");
                    Ok(EXIT_UNKNOWN)
                }
                None => {
                    eprintln!("no plan within the limits");
                    Ok(EXIT_FALSE)
                }
            }
        }
        Command::Verify { domain, plan, tmax, cap, mutex, seed } => {
            let inst = load_domain(&domain)?;
            let (p, recorded) = Plan::from_json(&read(&plan)?, &inst).code(EXIT_FORMAT)?;
            let Some(t_max) = tmax.or(recorded) else {
                return Err(Failure { code: EXIT_USAGE, err: anyhow::anyhow!("no --tmax and none recorded in the plan") });
            };
            let opts = VerifyOptions { scenario_cap: cap, seed, mutex };
            let report = verify_plan(&p, &inst, t_max, &opts).code(EXIT_FORMAT)?;
            println!(
                "scenarios={} exhaustive={} failures={}",
                report.scenarios, report.exhaustive, report.failure_count
            );
            for f in &report.failures {
                let why = match &f.reason {
                    FailureReason::GoalNotReached => "goal not reached".to_string(),
                    FailureReason::EffectConflict { t, fact } => format!("conflicting effects on {fact} at t={t}"),
                    FailureReason::Interference { t, first, second } => format!("{first} and {second} fire together at t={t}"),
                };
                println!("  from {}: {why}", f.initial.render(&inst));
            }
            Ok(if report.verified() { EXIT_TRUE } else { EXIT_FALSE })
        }
        Command::Gen { family, out } => {
            let text = match family {
                Family::Rooms { n } => gen_rooms(n),
                Family::Blocks { n } => gen_blocks(n),
            }
            .map_err(anyhow::Error::msg)
            .code(EXIT_USAGE)?;
            write_out(out.as_deref(), &text)?;
            Ok(EXIT_TRUE)
        }
        Command::Qbf2cp { file, out } => {
            let q = qdimacs::read(&read(&file)?).with_context(|| file.display().to_string()).code(EXIT_FORMAT)?;
            let f = ForallExistsQbf::from_qbf(&q).map_err(anyhow::Error::msg).code(EXIT_FORMAT)?;
            write_out(out.as_deref(), &qbf_to_planning(&f).to_domain_text())?;
            Ok(EXIT_TRUE)
        }
        Command::Bench { suite, csv, time_cap } => {
            let solver = SolverConfig { time_cap: cap(time_cap), ..SolverConfig::default() };
            let sink: Box<dyn Write> = match &csv {
                Some(p) => Box::new(fs::File::create(p).with_context(|| format!("creating {}", p.display())).code(EXIT_IO)?),
                None => Box::new(io::stdout()),
            };
            let records = run_benchmark(suite, &solver, sink).code(EXIT_IO)?;
            Ok(if records.iter().any(|r| r.outcome().is_none()) { EXIT_UNKNOWN } else { EXIT_TRUE })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_TRUE });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure { code, err }) => {
            eprintln!("error: {err:#}");
            ExitCode::from(code)
        }
    }
}
