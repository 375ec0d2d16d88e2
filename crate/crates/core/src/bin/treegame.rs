use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use treegame::error::{Error, VerifyError};
use treegame::game::{default_cap, play, PlayConfig, Revealer, Transcript, ViewMode};
use treegame::offline::{bounds_report, euler_schedule};
use treegame::params::{self, TheoremParams};
use treegame::revealer::{derive_params, FixedTreeRevealer, GadgetMode, LemmaRevealer};
use treegame::sweep::{sweep, to_csv, SweepSpec};
use treegame::tree::RootedTree;
use treegame::verify::{params_from_transcript, verify_lemma_run};
use treegame::ExplorerKind;

#[derive(Parser)]
#[command(name = "treegame", version, about = "Tree exploration game harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum RevealerKind {
    Lemma,
    Fixed,
}

#[derive(Subcommand)]
enum Command {
    /// Play one game and write its transcript.
    Run {
        #[arg(long)]
        explorer: ExplorerKind,
        #[arg(long, value_enum, default_value = "lemma")]
        revealer: RevealerKind,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long = "L")]
        segment: Option<u32>,
        #[arg(long)]
        m: Option<u32>,
        /// Team size; defaults to the team-size bound for the lemma revealer.
        #[arg(long)]
        k: Option<u32>,
        #[arg(long, default_value = "repaired")]
        mode: GadgetMode,
        #[arg(long, default_value = "game")]
        view: ViewMode,
        #[arg(long)]
        cap: Option<u32>,
        /// Rounds `idle_then_sweep` waits; defaults to the first checkpoint.
        #[arg(long)]
        idle_rounds: Option<u32>,
        /// Tree for the fixed revealer (parent-array JSON).
        #[arg(long)]
        tree: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Final tree as `.json` or `.dot`.
        #[arg(long)]
        emit_tree: Option<PathBuf>,
    },
    /// Replay a lemma transcript and check every claim.
    Verify {
        #[arg(long)]
        transcript: PathBuf,
        /// Take n, L, m, k and mode from the transcript header.
        #[arg(long)]
        params_from_transcript: bool,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long = "L")]
        segment: Option<u32>,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        mode: Option<GadgetMode>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Offline bounds for a known tree.
    Offline {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        brute: bool,
        /// Online round count to compare against.
        #[arg(long)]
        online: Option<u32>,
        /// Also write the Euler schedule here.
        #[arg(long)]
        schedule: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parameter choices of one of the four theorems.
    Params {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        thm: u8,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        k: Option<u64>,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long)]
        eps: Option<String>,
        #[arg(long = "D")]
        depth: Option<u32>,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long = "L")]
        segment: Option<u64>,
    },
    /// Run a grid of lemma games and write one CSV row per cell.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Params(_) | Error::Verify(VerifyError::Params(_)) => 2,
        Error::Verify(VerifyError::Integrity(_)) => 3,
        _ => 1,
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), Error> {
    match path {
        Some(p) => fs::write(p, bytes)?,
        None => std::io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

fn read_tree(path: &Path) -> Result<RootedTree, Error> {
    Ok(RootedTree::decode(&fs::read(path)?)?)
}

fn dispatch(cmd: Command) -> Result<ExitCode, Error> {
    match cmd {
        Command::Run {
            explorer,
            revealer,
            n,
            segment,
            m,
            k,
            mode,
            view,
            cap,
            idle_rounds,
            tree,
            out,
            emit_tree,
        } => {
            let (mut rev, k, idle_default, start): (Box<dyn Revealer>, u32, u32, (u64, u32)) = match revealer {
                RevealerKind::Lemma => {
                    let (Some(n), Some(segment), Some(m)) = (n, segment, m) else {
                        return Err(usage("the lemma revealer needs --n, --L and --m"));
                    };
                    let max = treegame::revealer::max_team_size(n, segment, m)?;
                    let k = match k {
                        Some(k) => k,
                        None => u32::try_from(max).map_err(|_| usage("team-size bound exceeds u32; pass --k"))?,
                    };
                    if u64::from(k) > max {
                        eprintln!(
                            "warning: k = {k} exceeds the team-size bound {max}; the vertex budget is not guaranteed"
                        );
                    }
                    let params = derive_params(n, segment, m, k, mode)?;
                    let idle = params.checkpoints.first().copied().unwrap_or(segment);
                    let start = (params.branch_count() * u64::from(segment) + 1, segment);
                    (Box::new(LemmaRevealer::new(params)?), k, idle, start)
                }
                RevealerKind::Fixed => {
                    let path = tree.ok_or_else(|| usage("the fixed revealer needs --tree"))?;
                    let t0 = read_tree(&path)?;
                    let start = (t0.len() as u64, t0.height());
                    (Box::new(FixedTreeRevealer::new(t0)), k.unwrap_or(1), 0, start)
                }
            };
            let cap = cap.unwrap_or_else(|| default_cap(start.0, u64::from(start.1)));
            let mut exp = explorer.build(idle_rounds.unwrap_or(idle_default));
            let run = play(exp.as_mut(), rev.as_mut(), PlayConfig { k, cap, view })?;
            emit(out.as_deref(), &run.transcript.to_json())?;
            if let Some(path) = emit_tree {
                let bytes = match path.extension().and_then(|e| e.to_str()) {
                    Some("dot") => run.state.tree().to_dot().into_bytes(),
                    _ => run.state.tree().encode(),
                };
                fs::write(&path, bytes)?;
            }
            let o = &run.transcript.outcome;
            eprintln!(
                "finished={} final_round={} vertices={} height={}",
                o.finished, o.final_round, o.n, o.height
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            transcript,
            params_from_transcript: from_header,
            n,
            segment,
            m,
            k,
            mode,
            out,
        } => {
            let t = Transcript::from_json(&fs::read(&transcript)?)?;
            let params = if from_header {
                params_from_transcript(&t)?
            } else {
                let (Some(n), Some(segment), Some(m)) = (n, segment, m) else {
                    return Err(usage("pass --params-from-transcript or all of --n, --L, --m"));
                };
                derive_params(n, segment, m, k.unwrap_or(t.params.k), mode.unwrap_or_default())?
            };
            let report = verify_lemma_run(&t, &params)?;
            emit(out.as_deref(), &report.to_json())?;
            eprintln!("passed={} failed={}", report.passed, report.failed);
            Ok(if report.ok() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            })
        }
        Command::Offline {
            tree,
            k,
            brute,
            online,
            schedule,
            out,
        } => {
            if k == 0 {
                return Err(usage("--k must be at least 1"));
            }
            let tree = read_tree(&tree)?;
            let report = bounds_report(&tree, k, online, brute);
            if let Some(path) = schedule {
                fs::write(path, euler_schedule(&tree, k).to_json())?;
            }
            emit(out.as_deref(), &report.to_json())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Params {
            thm,
            n,
            k,
            c,
            eps,
            depth,
            m,
            segment,
        } => {
            let need_n = || n.ok_or_else(|| usage("--n is required"));
            let p: TheoremParams = match thm {
                1 => params::pick_params_thm1(need_n()?, k.ok_or_else(|| usage("--k is required"))?, c, m, segment)?,
                2 => {
                    let eps = eps.ok_or_else(|| usage("--eps is required"))?;
                    params::pick_params_thm2(params::parse_ratio(&eps)?, n, k)?
                }
                3 => params::pick_params_thm3(need_n()?)?,
                _ => params::pick_params_thm4(
                    need_n()?,
                    depth.ok_or_else(|| usage("--D is required"))?,
                    m.ok_or_else(|| usage("--m is required"))?,
                    k,
                )?,
            };
            emit(None, &p.to_json())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep { spec, out } => {
            let spec = SweepSpec::from_json(&fs::read(&spec)?)?;
            let rows = sweep(&spec);
            emit(out.as_deref(), &to_csv(&rows))?;
            let failed = rows.iter().filter(|r| !r.error.is_empty()).count();
            eprintln!("{} cells, {failed} with errors", rows.len());
            Ok(ExitCode::SUCCESS)
        }
    }
}
