//! Command-line front end. Exit codes: 0 success, 1 a negative result
//! (verification fails, a search misses its target, a solve is incomplete
//! or infeasible), 2 bad invocation or unreadable input.

use std::ffi::OsString;
use std::io::Write;
use std::net::{Ipv4Addr, SocketAddr};
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use crate::battle::is_peaceful;
use crate::board::{Board, Topology};
use crate::bounds_nlp::{build_model, export_model, solve, ModelKind, SolverConfig};
use crate::constructions::{ainley, argyle, best_plaid, plaid, PlaidParams};
use crate::exact::exact_value;
use crate::interface::{boardfile, http, svg};
use crate::swap_search::{run, SearchConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "peaceable", version, about = "Peaceable queens workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ConstructionKind {
    Plaid,
    Argyle,
    Ainley,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TopologyArg {
    Grid,
    Torus,
}

impl From<TopologyArg> for Topology {
    fn from(t: TopologyArg) -> Self {
        match t {
            TopologyArg::Grid => Topology::Grid,
            TopologyArg::Torus => Topology::Torus,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelArg {
    OddTorus,
    EvenTorus,
    Regular,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::OddTorus => ModelKind::OddTorus,
            ModelArg::EvenTorus => ModelKind::EvenTorus,
            ModelArg::Regular => ModelKind::Regular,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a known construction and write it as a board file.
    Construct {
        #[arg(long = "type", value_enum)]
        kind: ConstructionKind,
        #[arg(long)]
        n: usize,
        /// Plaid parameter a; with neither a nor b the best plaid is used.
        #[arg(long)]
        a: Option<usize>,
        #[arg(long)]
        b: Option<usize>,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
    /// Check a board file for peace.
    Verify { file: PathBuf },
    /// Local search for a peaceful battle with min(|B|,|W|) at least the target.
    Search {
        #[arg(long, value_enum)]
        topology: TopologyArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        target: usize,
        #[arg(long)]
        seed: u64,
        /// Wall-clock budget in seconds.
        #[arg(long, default_value_t = 60.0)]
        budget: f64,
        #[arg(long)]
        restarts: Option<u64>,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
    /// Exact maximum by branch and bound.
    Exact {
        #[arg(long, value_enum)]
        topology: TopologyArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        node_budget: Option<u64>,
    },
    /// Solve a density-bound program from many starts.
    Bounds {
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long, default_value_t = 200)]
        starts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the model in text form.
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Render a board file as SVG.
    Render {
        file: PathBuf,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
    /// Serve the JSON session API.
    Serve {
        #[arg(long, env = "PEACEABLE_PORT", default_value_t = 8080)]
        port: u16,
    },
}

/// A failed command: exit code plus message for standard error.
struct Failure(i32, String);

fn usage(msg: impl ToString) -> Failure {
    Failure(EXIT_USAGE, msg.to_string())
}

fn read_board(path: &Path) -> Result<crate::battle::Battle, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    boardfile::parse(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// Run with explicit arguments (the first is the program name) and
/// streams. Returns the exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    macro_rules! say {
        ($($t:tt)*) => { let _ = writeln!(out, $($t)*); };
    }
    match command {
        Command::Construct { kind, n, a, b, output } => {
            let (label, battle) = match (kind, a, b) {
                (ConstructionKind::Plaid, None, None) => {
                    let (p, battle) = best_plaid(n).map_err(usage)?;
                    (format!("plaid m={} a={} b={}", p.m, p.a, p.b), battle)
                }
                (ConstructionKind::Plaid, Some(a), Some(b)) => {
                    let p = PlaidParams::new(n, a, b).map_err(usage)?;
                    (format!("plaid m={n} a={a} b={b}"), plaid(p).map_err(usage)?)
                }
                (ConstructionKind::Plaid, _, _) => return Err(usage("plaid needs both --a and --b, or neither")),
                (_, Some(_), _) | (_, _, Some(_)) => return Err(usage("--a and --b apply only to plaid")),
                (ConstructionKind::Argyle, None, None) => (format!("argyle n={n}"), argyle(n).map_err(usage)?),
                (ConstructionKind::Ainley, None, None) => (format!("ainley n={n}"), ainley(n).map_err(usage)?),
            };
            write_file(&output, &boardfile::serialize(&battle))?;
            let c = battle.counts();
            say!("{label}: black={} white={} min={}", c.black, c.white, c.min);
            Ok(EXIT_OK)
        }
        Command::Verify { file } => {
            let battle = read_board(&file)?;
            let verdict = is_peaceful(&battle);
            match verdict.witness {
                None => {
                    say!("peaceful min={}", battle.min_count());
                    Ok(EXIT_OK)
                }
                Some(w) => {
                    say!("not peaceful: {} holds black {} and white {}", w.line, w.black, w.white);
                    Ok(EXIT_FAILURE)
                }
            }
        }
        Command::Search {
            topology,
            n,
            target,
            seed,
            budget,
            restarts,
            output,
        } => {
            if !(budget.is_finite() && budget > 0.0) {
                return Err(usage("--budget must be a positive number of seconds"));
            }
            let board = Board::new(n, topology.into()).map_err(usage)?;
            let mut config = SearchConfig::new(board, target, seed).with_time_budget(Duration::from_secs_f64(budget));
            if let Some(r) = restarts {
                config = config.with_max_restarts(r);
            }
            let outcome = run(&config, &mut |_| {});
            write_file(&output, &boardfile::serialize(&outcome.battle))?;
            let c = outcome.battle.counts();
            let verdict = if outcome.reached_target { "reached" } else { "missed" };
            say!(
                "{verdict} target {target}: black={} white={} min={} restarts={} elapsed={:.3}s",
                c.black,
                c.white,
                c.min,
                outcome.restarts,
                outcome.elapsed.as_secs_f64()
            );
            Ok(if outcome.reached_target { EXIT_OK } else { EXIT_FAILURE })
        }
        Command::Exact { topology, n, node_budget } => {
            let board = Board::new(n, topology.into()).map_err(usage)?;
            let r = exact_value(board, node_budget).map_err(usage)?;
            let status = if r.complete { "optimal" } else { "lower bound (node budget exhausted)" };
            say!(
                "{} {n}: {} {} nodes={} elapsed={:.3}s",
                board.topology(),
                r.value,
                status,
                r.nodes_explored,
                r.elapsed.as_secs_f64()
            );
            let _ = write!(out, "{}", boardfile::serialize(&r.witness));
            Ok(if r.complete { EXIT_OK } else { EXIT_FAILURE })
        }
        Command::Bounds {
            model,
            starts,
            seed,
            export,
        } => {
            let kind: ModelKind = model.into();
            let m = build_model(kind);
            if let Some(path) = export {
                write_file(&path, &export_model(&m))?;
            }
            let config = SolverConfig {
                starts,
                seed,
                ..SolverConfig::default()
            };
            let r = solve(&m, &config).map_err(usage)?;
            say!(
                "{kind}: objective={:.9} violation={:.1e} feasible_starts={}/{} elapsed={:.2}s",
                r.best_objective,
                r.constraint_violation,
                r.converged_starts,
                r.starts,
                r.elapsed.as_secs_f64()
            );
            Ok(if r.converged_starts > 0 { EXIT_OK } else { EXIT_FAILURE })
        }
        Command::Render { file, output } => {
            let battle = read_board(&file)?;
            write_file(&output, &svg::render(&battle))?;
            say!("wrote {}", output.display());
            Ok(EXIT_OK)
        }
        Command::Serve { port } => {
            let addr = SocketAddr::from((Ipv4Addr::UNSPECIFIED, port));
            let rt = tokio::runtime::Runtime::new().map_err(|e| Failure(EXIT_FAILURE, e.to_string()))?;
            say!("listening on {addr}");
            rt.block_on(http::serve(addr))
                .map_err(|e| Failure(EXIT_FAILURE, format!("{addr}: {e}")))?;
            Ok(EXIT_OK)
        }
    }
}
