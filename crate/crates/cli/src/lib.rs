//! Command-line front end for the seqteach toolkit.

pub mod http;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use seqteach::logic::{evaluate, parse_atom, parse_program, Outcome, DEFAULT_STACK_LIMIT};
use seqteach::matching::{write_csv, MatchConfig};
use seqteach::mil::{energy_resource, iterative_descent, learn, merge_problem, parse_problem, sort_problem};
use seqteach::robot::{action_builtins, state_to_term, WorldState};
use seqteach::session::{classify_bundle, group_report, Bundle, SessionService};
use seqteach::zoo::{generate_questions, BankSizes, QuestionBank, QuestionKind};

#[derive(Debug, Parser)]
#[command(name = "seqteach", version, about = "Sequential teaching experiment toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GenKind {
    Merge,
    Sort,
    /// A full four-section bank.
    Bank,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Target {
    Merger,
    Sorter,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate questions or a full question bank as JSON.
    GenQuestions {
        #[arg(long, value_enum)]
        kind: GenKind,
        /// Number of questions (ignored for `bank`).
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Learn a program from a preset target or a problem file.
    Learn {
        #[arg(long, value_enum, conflicts_with = "problem")]
        target: Option<Target>,
        #[arg(long, default_value_t = 3)]
        max_clauses: usize,
        /// Learn the sorter without the merger in the background.
        #[arg(long)]
        no_merger: bool,
        #[arg(long)]
        problem: Option<PathBuf>,
        /// Prefer the program with the lowest energy among minimal ones.
        #[arg(long)]
        descent: bool,
    },
    /// Print the execution stack and cognitive cost of a query.
    Cogcost {
        #[arg(long)]
        rules: PathBuf,
        #[arg(long)]
        query: String,
        #[arg(long, default_value_t = DEFAULT_STACK_LIMIT)]
        limit: usize,
        /// Bind a constant in the query to a world state, e.g. `s1=1, 0 | 0 | | |`.
        #[arg(long = "state", value_name = "NAME=LINE")]
        states: Vec<String>,
    },
    /// Classify every sorting response in an exported bundle (CSV).
    Classify {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-group comprehension, effects and bounds for a bundle.
    Report {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the HTTP session service.
    Serve {
        #[arg(long)]
        store: PathBuf,
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        /// Question bank to load into an empty store.
        #[arg(long, conflicts_with = "seed")]
        bank: Option<PathBuf>,
        /// Generate the bank from this seed instead.
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => out.write_all(text.as_bytes()).context("writing output"),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn execute(cmd: Command, out: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::GenQuestions {
            kind,
            count,
            seed,
            out: path,
        } => {
            let json = match kind {
                GenKind::Bank => serde_json::to_string_pretty(&QuestionBank::generate(seed, BankSizes::default())?)?,
                GenKind::Merge => serde_json::to_string_pretty(&generate_questions(QuestionKind::Merge, count, seed)?)?,
                GenKind::Sort => serde_json::to_string_pretty(&generate_questions(QuestionKind::Sort, count, seed)?)?,
            };
            emit(out, path.as_deref(), &(json + "\n"))
        }
        Command::Learn {
            target,
            max_clauses,
            no_merger,
            problem,
            descent,
        } => {
            let problem = match (target, problem) {
                (_, Some(path)) => parse_problem(&read(&path)?)?,
                (Some(Target::Merger), None) => merge_problem(max_clauses)?,
                (Some(Target::Sorter), None) => sort_problem(!no_merger, max_clauses)?,
                (None, None) => bail!("give --target or --problem"),
            };
            let h = if descent {
                iterative_descent(&problem, &energy_resource)?
            } else {
                learn(&problem)?
            };
            write!(out, "{}", h.rules())?;
            writeln!(out, "% clauses {} energy {}", h.textual_size, h.resource_cost)?;
            Ok(())
        }
        Command::Cogcost {
            rules,
            query,
            limit,
            states,
        } => {
            let program = parse_program(&read(&rules)?)?;
            let mut q = parse_atom(&query)?;
            for binding in &states {
                let (name, line) = binding
                    .split_once('=')
                    .ok_or_else(|| anyhow!("--state expects NAME=LINE, got {binding:?}"))?;
                let state = WorldState::parse_line(line)?;
                q = q.replace_constant(name.trim(), &state_to_term(&state));
            }
            let ev = evaluate(&program, &q, limit, &action_builtins())?;
            writeln!(out, "{:>6}  entry", "cost")?;
            for (t, c) in ev.stack.entries.iter().zip(ev.stack.costs()) {
                writeln!(out, "{c:>6}  {t}")?;
            }
            writeln!(out, "total {}", ev.stack.total_cost())?;
            let outcome = match &ev.outcome {
                Outcome::Answer(_) => "answer",
                Outcome::NoAnswer => "no-answer",
                Outcome::BoundReached => "bound-reached",
            };
            writeln!(out, "outcome {outcome}")?;
            Ok(())
        }
        Command::Classify { bundle, out: path } => {
            let bundle = Bundle::read(&bundle)?;
            let records = classify_bundle(&bundle, &MatchConfig::default())?;
            let mut buf = Vec::new();
            write_csv(&records, &mut buf)?;
            emit(out, path.as_deref(), &String::from_utf8(buf)?)
        }
        Command::Report {
            bundle,
            json,
            out: path,
        } => {
            let report = group_report(&Bundle::read(&bundle)?)?;
            let text = if json {
                serde_json::to_string_pretty(&report)? + "\n"
            } else {
                report.to_string()
            };
            emit(out, path.as_deref(), &text)
        }
        Command::Serve {
            store,
            addr,
            bank,
            seed,
        } => {
            let svc = SessionService::open(&store)?;
            if svc.bank().is_none() {
                let bank = match (bank, seed) {
                    (Some(p), _) => serde_json::from_str(&read(&p)?)?,
                    (None, Some(s)) => QuestionBank::generate(s, BankSizes::default())?,
                    (None, None) => bail!("the store has no question bank; pass --bank or --seed"),
                };
                svc.load_bank(bank)?;
            }
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::bind(addr).await?;
                writeln!(out, "listening on {}", listener.local_addr()?)?;
                out.flush()?;
                axum::serve(listener, http::app(Arc::new(svc))).await?;
                Ok(())
            })
        }
    }
}

/// Parses `args` and runs the command. Returns the process exit code:
/// 0 on success, 1 when the operation fails, 2 on a usage error.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return 2;
            }
            let _ = write!(out, "{}", e.render());
            return 0;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            1
        }
    }
}
