//! Command-line front end: parse network or PCP instance files,
//! dispatch the analyses, and print a JSON run report to stdout.
//!
//! Exit codes: 0 success (validates / synchronisable / equal / found),
//! 1 negative result (violations, unequal traces, nothing found),
//! 2 unreadable or malformed input, 10 not synchronisable, 11 topology
//! not a tree, 12 wrong final mode for the requested analysis, 13 state
//! limit exceeded (tune with SYNCHECK_MAX_STATES).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use syncheck::automata::FsaError;
use syncheck::network::{Action, Network};
use syncheck::semantics::{self, Bounds, Semantics};
use syncheck::tree::{self, FailureKind, TreeError, VerdictResult};
use syncheck::{format, pcp};

#[derive(Parser)]
#[command(name = "syncheck", version, about = "Synchronisability analysis for communicating automata")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Pretty-print the JSON report
    #[arg(long, global = true)]
    pretty: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SemanticsArg {
    Sync,
    P2p,
    Mailbox,
}

impl From<SemanticsArg> for Semantics {
    fn from(s: SemanticsArg) -> Semantics {
        match s {
            SemanticsArg::Sync => Semantics::Sync,
            SemanticsArg::P2p => Semantics::P2p,
            SemanticsArg::Mailbox => Semantics::Mailbox,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check the structural well-formedness of a network file
    Validate { file: PathBuf },
    /// Decide synchronisability of a tree-topology network
    DecideTree { file: PathBuf },
    /// Enumerate the bounded trace set under a semantics
    Traces {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "mailbox")]
        semantics: SemanticsArg,
        /// Maximum trace length (number of sends)
        #[arg(long, default_value_t = 4)]
        max_len: usize,
        /// Per-buffer capacity for asynchronous semantics
        #[arg(long, default_value_t = 2)]
        buffer_bound: usize,
    },
    /// Compare synchronous and asynchronous bounded trace sets
    Compare {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "mailbox")]
        semantics: SemanticsArg,
        #[arg(long, default_value_t = 4)]
        max_len: usize,
        #[arg(long, default_value_t = 2)]
        buffer_bound: usize,
    },
    /// Compile a PCP instance file into its mailbox network
    EncodePcp { file: PathBuf },
    /// Search the encoding of a PCP instance for an accepting execution
    PcpSearch {
        file: PathBuf,
        #[arg(long, default_value_t = 40)]
        max_len: usize,
        #[arg(long, default_value_t = 12)]
        buffer_bound: usize,
    },
    /// Print the communication topology
    Topology {
        file: PathBuf,
        /// Emit DOT digraph syntax instead of JSON
        #[arg(long)]
        dot: bool,
    },
}

#[derive(Serialize)]
struct InputDigest {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct RunReport {
    command: &'static str,
    inputs: Vec<InputDigest>,
    result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    bounds: Option<Bounds>,
    #[serde(skip_serializing_if = "Option::is_none")]
    complete: Option<bool>,
    wall_time_ms: u128,
}

fn tokens(actions: &[Action]) -> Vec<String> {
    actions.iter().map(|a| a.to_string()).collect()
}

struct Run {
    started: Instant,
    pretty: bool,
    inputs: Vec<InputDigest>,
}

impl Run {
    fn new(pretty: bool) -> Self {
        Run {
            started: Instant::now(),
            pretty,
            inputs: Vec::new(),
        }
    }

    fn read(&mut self, path: &PathBuf) -> Result<String, ExitCode> {
        match fs::read_to_string(path) {
            Ok(text) => {
                self.inputs.push(InputDigest {
                    path: path.display().to_string(),
                    sha256: hex(&Sha256::digest(text.as_bytes())),
                });
                Ok(text)
            }
            Err(e) => {
                eprintln!("cannot read {}: {e}", path.display());
                Err(ExitCode::from(2))
            }
        }
    }

    fn network(&mut self, path: &PathBuf) -> Result<Network, ExitCode> {
        let text = self.read(path)?;
        format::parse_network(&text).map_err(|e| {
            eprintln!("{}: {e}", path.display());
            ExitCode::from(2)
        })
    }

    fn pcp(&mut self, path: &PathBuf) -> Result<pcp::PcpInstance, ExitCode> {
        let text = self.read(path)?;
        format::parse_pcp(&text).map_err(|e| {
            eprintln!("{}: {e}", path.display());
            ExitCode::from(2)
        })
    }

    fn report(
        self,
        command: &'static str,
        result: Value,
        bounds: Option<Bounds>,
        complete: Option<bool>,
        code: u8,
    ) -> ExitCode {
        let report = RunReport {
            command,
            inputs: self.inputs,
            result,
            bounds,
            complete,
            wall_time_ms: self.started.elapsed().as_millis(),
        };
        let rendered = if self.pretty {
            serde_json::to_string_pretty(&report)
        } else {
            serde_json::to_string(&report)
        }
        .expect("report serialization");
        println!("{rendered}");
        ExitCode::from(code)
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn tree_error_code(e: &TreeError) -> u8 {
    match e {
        TreeError::NotATree(_) => 11,
        TreeError::WrongFinalMode => 12,
        TreeError::Limit(FsaError::StateLimit(_)) => 13,
        TreeError::Limit(_) | TreeError::WitnessNotRealizable { .. } => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut run = Run::new(cli.pretty);
    match cli.command {
        Command::Validate { file } => {
            let n = match run.network(&file) {
                Ok(n) => n,
                Err(code) => return code,
            };
            let violations = n.validate();
            let ok = violations.is_empty();
            let result = json!({
                "well_formed": ok,
                "violations": violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            });
            run.report("validate", result, None, None, u8::from(!ok))
        }
        Command::DecideTree { file } => {
            let n = match run.network(&file) {
                Ok(n) => n,
                Err(code) => return code,
            };
            match tree::decide(&n) {
                Ok(verdict) => {
                    let failures: Vec<Value> = verdict
                        .failures
                        .iter()
                        .map(|f| {
                            // self-validation: drop any lifted trace that
                            // does not replay (none should be dropped)
                            let lifted = f
                                .lifted_trace
                                .as_ref()
                                .filter(|t| tree::realize_trace(&n, t).is_some());
                            let (condition, witness) = match &f.kind {
                                FailureKind::Coverage { witness } => (
                                    "coverage",
                                    witness.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
                                ),
                                FailureKind::ShuffleClosure { witness } => {
                                    ("shuffle-closure", tokens(witness))
                                }
                            };
                            json!({
                                "parent": f.parent,
                                "child": f.child,
                                "condition": condition,
                                "witness": witness,
                                "lifted_trace": lifted.map(|t| tokens(t)),
                            })
                        })
                        .collect();
                    let sync = verdict.result == VerdictResult::Synchronisable;
                    let result = json!({
                        "synchronisable": sync,
                        "failures": failures,
                    });
                    run.report("decide-tree", result, None, None, if sync { 0 } else { 10 })
                }
                Err(e) => {
                    let code = tree_error_code(&e);
                    let result = json!({ "error": e.to_string() });
                    run.report("decide-tree", result, None, None, code)
                }
            }
        }
        Command::Traces {
            file,
            semantics,
            max_len,
            buffer_bound,
        } => {
            let n = match run.network(&file) {
                Ok(n) => n,
                Err(code) => return code,
            };
            let bounds = Bounds::new(max_len, buffer_bound);
            let sem: Semantics = semantics.into();
            let set = semantics::traces(&n, sem, bounds);
            let result = json!({
                "semantics": sem.name(),
                "traces": set.sorted().iter().map(|t| tokens(t)).collect::<Vec<_>>(),
            });
            run.report("traces", result, Some(bounds), Some(set.complete), 0)
        }
        Command::Compare {
            file,
            semantics,
            max_len,
            buffer_bound,
        } => {
            let n = match run.network(&file) {
                Ok(n) => n,
                Err(code) => return code,
            };
            let bounds = Bounds::new(max_len, buffer_bound);
            let sem: Semantics = semantics.into();
            match semantics::bounded_trace_equality(&n, sem, bounds) {
                Ok(cmp) => {
                    let result = json!({
                        "semantics": sem.name(),
                        "equal_up_to_bounds": cmp.equal_up_to_bounds,
                        "witness": cmp.witness.as_ref().map(|t| tokens(t)),
                        "witness_side": cmp.side,
                    });
                    let code = u8::from(!cmp.equal_up_to_bounds);
                    run.report("compare", result, Some(bounds), Some(cmp.complete), code)
                }
                Err(e) => {
                    let result = json!({ "error": e.to_string() });
                    run.report("compare", result, Some(bounds), None, 12)
                }
            }
        }
        Command::EncodePcp { file } => {
            let inst = match run.pcp(&file) {
                Ok(i) => i,
                Err(code) => return code,
            };
            let n = pcp::encode(&inst);
            debug_assert!(n.validate().is_empty());
            println!("{}", format::render_network(&n));
            ExitCode::SUCCESS
        }
        Command::PcpSearch {
            file,
            max_len,
            buffer_bound,
        } => {
            let inst = match run.pcp(&file) {
                Ok(i) => i,
                Err(code) => return code,
            };
            let n = pcp::encode(&inst);
            let bounds = Bounds::new(max_len, buffer_bound);
            let found = pcp::search_accepting_trace(&n, bounds)
                // self-validation: an execution that fails to replay is
                // a bug, not a result
                .filter(|e| semantics::replay(&n, Semantics::Mailbox, &e.steps).is_ok());
            let result = match &found {
                Some(e) => json!({
                    "found": true,
                    "execution": tokens(&e.steps),
                    "trace": tokens(&e.trace()),
                    "indices": pcp::indices_of_execution(e),
                }),
                None => json!({ "found": false }),
            };
            let code = u8::from(found.is_none());
            run.report("pcp-search", result, Some(bounds), None, code)
        }
        Command::Topology { file, dot } => {
            let n = match run.network(&file) {
                Ok(n) => n,
                Err(code) => return code,
            };
            let topo = n.topology();
            if dot {
                print!("{}", topo.to_dot());
                return ExitCode::SUCCESS;
            }
            let classified = topo.classify();
            let result = json!({
                "vertices": topo.vertices,
                "edges": topo.edges.iter().map(|(p, q)| vec![p, q]).collect::<Vec<_>>(),
                "tree": classified.as_ref().ok().map(|t| json!({
                    "root": t.root,
                    "parent": t.parent,
                })),
                "not_tree": classified.as_ref().err().map(|e| e.to_string()),
            });
            run.report("topology", result, None, None, 0)
        }
    }
}
