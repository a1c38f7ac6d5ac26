use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use elenchus_core::base::{load_base, save_base, ContainmentMode, MaterialBase};
use elenchus_core::dialectic::{export_issues, extract_base, NewEvent, Session, SessionDocument};
use elenchus_core::fixtures::{load_groups, verify_provo};
use elenchus_core::formula::parse_sequent;
use elenchus_core::opponent::{
    apply_proposal, validate_proposal, HttpOracle, Oracle, OracleConfig, ScriptedOracle,
};
use elenchus_core::prover::{
    containment_audit, derivable_with, independence_matrix, monotonicity_defeats,
    transitivity_gaps, ProverConfig, Strategy,
};
use elenchus_service::{snapshot, write_atomic, AppState};

#[derive(Parser)]
#[command(name = "elenchus", version, about = "Material-inference prover and Socratic dialogue engine")]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide a sequent against a material base. Exits 0 if derivable, 1 if not.
    Prove {
        #[arg(long)]
        base: PathBuf,
        sequent: String,
        /// Print the proof tree.
        #[arg(long)]
        proof: bool,
        /// Commit to the first principal formula instead of backtracking.
        #[arg(long)]
        focused: bool,
        /// Only shared atoms close a sequent.
        #[arg(long)]
        atomic_containment: bool,
        #[arg(long)]
        no_memo: bool,
    },
    /// Containment audit, transitivity gaps, monotonicity defeats and,
    /// given groups, the cross-group independence matrix.
    Analyze {
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        groups: Option<PathBuf>,
    },
    /// Run every check of the bundled PROV-O case study.
    VerifyProvo,
    /// Rebuild a session's state from its log.
    Replay {
        #[arg(long)]
        session: PathBuf,
        /// Stop after this sequence number.
        #[arg(long)]
        to: Option<u64>,
        /// Write the extracted material base here.
        #[arg(long)]
        export_base: Option<PathBuf>,
    },
    /// Export a session: its material base, or with `--github-issues` one
    /// issue record per proposition, tension and challenge.
    Export {
        #[arg(long)]
        session: PathBuf,
        #[arg(long)]
        github_issues: bool,
    },
    #[command(subcommand)]
    Session(SessionCommand),
    /// Ask the oracle for candidate commitments in a document.
    Extract {
        source: PathBuf,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, env = "ELENCHUS_ADDR", default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        #[arg(long, env = "ELENCHUS_DATA", default_value = "./data")]
        data: PathBuf,
        #[command(flatten)]
        oracle: OracleArgs,
    },
}

#[derive(Subcommand)]
enum SessionCommand {
    /// Create an empty session file.
    New {
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Append one event, given as JSON, e.g.
    /// '{"actor":"respondent","kind":"commit","id":"p1","text":"..."}'.
    Append { session: PathBuf, event: String },
    /// Let the oracle take one turn.
    Step {
        session: PathBuf,
        #[command(flatten)]
        oracle: OracleArgs,
    },
}

#[derive(Args)]
struct OracleArgs {
    /// Scripted oracle (JSON script).
    #[arg(long, conflicts_with = "oracle_config")]
    oracle_script: Option<PathBuf>,
    /// HTTP oracle configuration (JSON). The credential is read from the
    /// environment variable it names, `ELENCHUS_ORACLE_KEY` by default.
    #[arg(long)]
    oracle_config: Option<PathBuf>,
}

impl OracleArgs {
    fn build(&self) -> Result<Option<Arc<dyn Oracle>>> {
        if let Some(path) = &self.oracle_script {
            let o = ScriptedOracle::from_json(&read(path)?)
                .with_context(|| format!("parsing {}", path.display()))?;
            return Ok(Some(Arc::new(o)));
        }
        if let Some(path) = &self.oracle_config {
            let mut cfg: OracleConfig = serde_json::from_slice(&read(path)?)
                .with_context(|| format!("parsing {}", path.display()))?;
            cfg.credential_env.get_or_insert_with(|| "ELENCHUS_ORACLE_KEY".into());
            return Ok(Some(Arc::new(HttpOracle::new(cfg)?)));
        }
        Ok(None)
    }

    fn require(&self) -> Result<Arc<dyn Oracle>> {
        self.build()?
            .context("no oracle configured; pass --oracle-script or --oracle-config")
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("reading {}", path.display()))
}

fn read_base(path: &Path) -> Result<MaterialBase> {
    load_base(&read(path)?).with_context(|| format!("loading {}", path.display()))
}

fn read_session(path: &Path) -> Result<Session> {
    let doc = SessionDocument::from_json(&read(path)?)
        .with_context(|| format!("parsing {}", path.display()))?;
    Ok(Session::from_document(doc)?)
}

fn write_session(path: &Path, session: &Session) -> Result<()> {
    write_atomic(path, session.to_document().to_json().as_bytes())
        .with_context(|| format!("writing {}", path.display()))
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Prove { .. } => "prove",
            Command::Analyze { .. } => "analyze",
            Command::VerifyProvo => "verify-provo",
            Command::Replay { .. } => "replay",
            Command::Export { .. } => "export",
            Command::Session(SessionCommand::New { .. }) => "session new",
            Command::Session(SessionCommand::Append { .. }) => "session append",
            Command::Session(SessionCommand::Step { .. }) => "session step",
            Command::Extract { .. } => "extract",
            Command::Serve { .. } => "serve",
        }
    }
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("values serialize"));
}

/// Every `--json` output is `{"command", "ok", "result"}` or
/// `{"command", "ok": false, "error"}`.
fn emit(cli: &Cli, result: Value) {
    print_json(&json!({"command": cli.command.name(), "ok": true, "result": result}));
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            if cli.json {
                print_json(&json!({
                    "command": cli.command.name(),
                    "ok": false,
                    "error": format!("{e:#}"),
                }));
            } else {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Prove {
            base,
            sequent,
            proof,
            focused,
            atomic_containment,
            no_memo,
        } => {
            let base = read_base(base)?;
            let s = parse_sequent(sequent)?;
            let config = ProverConfig {
                memoize: !no_memo,
                containment: if *atomic_containment {
                    ContainmentMode::AtomicOnly
                } else {
                    ContainmentMode::FormulaLevel
                },
                strategy: if *focused { Strategy::Focused } else { Strategy::Backtracking },
                ..ProverConfig::default()
            };
            let r = derivable_with(&base, &s, config)?;
            if cli.json {
                let mut out = json!({
                    "sequent": s.canonical(),
                    "derivable": r.derivable,
                    "stats": r.stats,
                });
                if let (true, Some(p)) = (*proof, &r.proof) {
                    out["proof"] = p.to_json();
                }
                emit(cli, out);
            } else {
                println!("{}", r.derivable);
                if let (true, Some(p)) = (*proof, &r.proof) {
                    print!("{}", p.to_text());
                }
            }
            Ok(ExitCode::from(if r.derivable { 0 } else { 1 }))
        }

        Command::Analyze { base, groups } => {
            let base = read_base(base)?;
            let audit = containment_audit(&base);
            let gaps = transitivity_gaps(&base);
            let defeats = monotonicity_defeats(&base);
            let independence = match groups {
                Some(path) => {
                    let g = load_groups(&read(path)?)
                        .with_context(|| format!("parsing {}", path.display()))?;
                    Some(independence_matrix(&base, &g)?)
                }
                None => None,
            };
            if cli.json {
                emit(cli, json!({
                    "containmentAudit": audit,
                    "transitivityGaps": gaps,
                    "monotonicityDefeats": defeats,
                    "independence": independence,
                }));
            } else {
                let failing: Vec<_> = audit.iter().filter(|(_, h)| !**h).map(|(a, _)| a).collect();
                println!(
                    "containment: {}/{} atoms",
                    audit.len() - failing.len(),
                    audit.len()
                );
                println!("transitivity gaps: {}", gaps.len());
                for g in &gaps {
                    println!("  {} |- {}, {} |- {}, but not {} |- {}", g.a, g.b, g.b, g.c, g.a, g.c);
                }
                println!("monotonicity defeats: {}", defeats.len());
                if let Some(r) = &independence {
                    println!(
                        "independence: {} cross-group pairs, {} derivable",
                        r.pairs, r.derivable
                    );
                }
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::VerifyProvo => {
            let v = verify_provo();
            if cli.json {
                emit(cli, json!(v));
            } else {
                for o in &v.outcomes {
                    println!(
                        "{} [{}] {}: {}",
                        if o.passed { "PASS" } else { "FAIL" },
                        o.group,
                        o.name,
                        o.detail
                    );
                }
                println!(
                    "{}/{} checks passed in {:.1} ms",
                    v.outcomes.iter().filter(|o| o.passed).count(),
                    v.outcomes.len(),
                    v.elapsed.as_secs_f64() * 1000.0
                );
            }
            Ok(if v.passed() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }

        Command::Replay {
            session,
            to,
            export_base,
        } => {
            let mut doc = SessionDocument::from_json(&read(session)?)
                .with_context(|| format!("parsing {}", session.display()))?;
            if let Some(to) = to {
                doc.events.retain(|e| e.seq <= *to);
            }
            let name = doc.session.clone();
            let s = Session::from_document(doc)?;
            if let Some(out) = export_base {
                let bytes = save_base(&extract_base(s.state()));
                write_atomic(out, &bytes).with_context(|| format!("writing {}", out.display()))?;
            }
            if cli.json {
                emit(cli, snapshot(&name, &s));
            } else {
                let st = s.state();
                let pos = st.position();
                println!("session {name}, {} events", s.events().len());
                println!("commitments: {}", join(&pos.commitments));
                println!("denials: {}", join(&pos.denials));
                println!("open tensions: {}", st.open_tensions().count());
                println!("open challenges: {}", st.open_challenges().count());
                println!("implications:");
                for imp in st.implications().keys() {
                    println!("  {imp}");
                }
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Export {
            session,
            github_issues,
        } => {
            let s = read_session(session)?;
            let out = if *github_issues {
                json!(export_issues(s.events(), s.state()))
            } else {
                extract_base(s.state()).to_document()
            };
            if cli.json {
                emit(cli, out);
            } else {
                println!("{}", serde_json::to_string_pretty(&out)?);
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Session(cmd) => session_command(cli, cmd),

        Command::Extract { source, oracle } => {
            let text = fs::read_to_string(source)
                .with_context(|| format!("reading {}", source.display()))?;
            let records = oracle.require()?.extract_commitments(&text)?;
            if cli.json {
                emit(cli, json!(records));
            } else {
                for r in records {
                    println!("{}: {}", r.id, r.text);
                }
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Serve { addr, data, oracle } => {
            let state = AppState::new(data.clone(), oracle.build()?)
                .with_context(|| format!("opening {}", data.display()))?;
            eprintln!("listening on {addr}");
            tokio::runtime::Runtime::new()?.block_on(elenchus_service::serve(*addr, state))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn join<T: std::fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

fn session_command(cli: &Cli, cmd: &SessionCommand) -> Result<ExitCode> {
    match cmd {
        SessionCommand::New { name, out } => {
            if out.exists() {
                bail!("{} already exists", out.display());
            }
            write_session(out, &Session::new(name.clone()))?;
            if cli.json {
                emit(cli, json!({"session": name, "path": out}));
            }
            Ok(ExitCode::SUCCESS)
        }
        SessionCommand::Append { session, event } => {
            let mut s = read_session(session)?;
            let e: NewEvent = serde_json::from_str(event).context("parsing event")?;
            let applied = match e.timestamp {
                Some(t) => s.append_at(e.actor, e.kind, Some(t))?,
                None => s.append(e.actor, e.kind)?,
            }
            .clone();
            write_session(session, &s)?;
            if cli.json {
                emit(cli, json!(applied));
            } else {
                println!("appended event {}", applied.seq);
            }
            Ok(ExitCode::SUCCESS)
        }
        SessionCommand::Step { session, oracle } => {
            let mut s = read_session(session)?;
            let raw = oracle.require()?.propose(s.state(), s.events())?;
            let proposal = validate_proposal(s.state(), &raw);
            let applied = apply_proposal(&mut s, &proposal)?;
            write_session(session, &s)?;
            if cli.json {
                emit(cli, json!({"proposal": proposal, "applied": applied}));
            } else {
                println!("{} events appended", applied.events.len());
                for e in s.events().iter().filter(|e| applied.events.contains(&e.seq)) {
                    println!("  {} {}", e.seq, e.kind.name());
                }
                for t in &applied.deferred {
                    println!(
                        "  deferred: {{{}}} |- {{{}}} until {} taken up",
                        join(&t.lhs),
                        join(&t.rhs),
                        join(&t.needs)
                    );
                }
                for d in &proposal.discarded {
                    println!("  discarded: {}", d.reason);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
