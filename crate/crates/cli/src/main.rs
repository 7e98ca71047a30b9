//! `sigcode`: registrar administration, code inspection, batch validation,
//! golden vectors, scenarios and the HTTP service.
//!
//! Exit codes: 0 success, 1 a domain outcome (duplicate, exhausted chain, any
//! non-VALID envelope), 2 bad input (arguments, files, CSV, config, hex).

use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use chrono::DateTime;
use clap::{Args, Parser, Subcommand};
use sigcode_core::codegen::vectors::golden_vectors;
use sigcode_core::codegen::{ChainConfig, CodeFormat, SharedSecret, Wordlist};
use sigcode_core::registrar::{Actor, OsNonceSource};
use sigcode_core::simulator::{compare_report, run_baseline, run_scenario, ScenarioConfig};
use sigcode_core::validation::{notification_list, parse_envelope_csv, validate_batch};
use sigcode_core::{Registrar, RegistrarError, RegistrationFields, SystemClock, ValidationConfig};
use sigcode_service::{AppState, ServiceConfig, DEFAULT_CODE_READS_PER_MINUTE, OFFICIAL_TOKEN_ENV};

#[derive(Debug, Parser)]
#[command(name = "sigcode", version, about = "Hash-chain signature codes for mail ballots")]
struct Cli {
    /// Wordlist file (2048 sorted lowercase words); defaults to the bundled English list.
    #[arg(long, global = true)]
    wordlist: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Register a voter or open an election.
    #[command(subcommand)]
    Register(RegisterCommand),
    /// Print a voter's current code.
    Code {
        #[command(flatten)]
        target: VoterElection,
        /// numeric-14, numeric-20, words-4, words-5 or words-6.
        #[arg(long, default_value = "numeric-20")]
        format: CodeFormat,
    },
    /// Advance a voter's chain, expiring every earlier code.
    Advance {
        #[command(flatten)]
        target: VoterElection,
    },
    /// Issue a voter a new secret.
    Rotate {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        voter: String,
    },
    /// Validate a batch of envelopes and print the report.
    Validate {
        #[arg(long)]
        batch: PathBuf,
        #[arg(long)]
        store: PathBuf,
        #[arg(long, default_value_t = 3)]
        window: u32,
        #[arg(long, default_value_t = 8)]
        back_scan: u32,
        /// Also write the report, with the notification list, as JSON.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run a threat-model scenario.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Emit golden-vector lines for one chain.
    Vectors {
        #[arg(long)]
        secret: String,
        #[arg(long)]
        election: String,
        #[arg(long, default_value_t = 64)]
        max_index: u32,
    },
    /// Run the HTTP service.
    Serve(ServeArgs),
}

#[derive(Debug, Subcommand)]
enum RegisterCommand {
    /// Register a voter and print the one-time secret. Creates the store if missing.
    Voter {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        name: String,
        #[arg(long)]
        address: String,
        #[arg(long)]
        dob: String,
    },
    /// Open an election so codes can be generated and validated for it.
    Election {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        election: String,
    },
}

#[derive(Debug, Args)]
struct VoterElection {
    #[arg(long)]
    store: PathBuf,
    #[arg(long)]
    voter: String,
    #[arg(long)]
    election: String,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[arg(long)]
    store: PathBuf,
    #[arg(long, default_value = "127.0.0.1:8080")]
    bind: String,
    #[arg(long, env = OFFICIAL_TOKEN_ENV, hide_env_values = true)]
    official_token: String,
    #[arg(long, default_value_t = 3)]
    window: u32,
    #[arg(long, default_value_t = 8)]
    back_scan: u32,
    #[arg(long, default_value_t = DEFAULT_CODE_READS_PER_MINUTE)]
    code_reads_per_minute: u32,
    /// Where batch reports are archived; defaults to `<store>.batches`.
    #[arg(long)]
    batch_dir: Option<PathBuf>,
}

/// A failure mapped onto the exit-code contract.
enum Failure {
    Domain(String),
    Input(String),
}

impl Failure {
    fn input(context: impl Display, e: impl Display) -> Self {
        Failure::Input(format!("{context}: {e}"))
    }
}

impl From<RegistrarError> for Failure {
    fn from(e: RegistrarError) -> Self {
        use RegistrarError::*;
        match e {
            Io(_) | StoreCorrupt { .. } | WordlistMismatch { .. } | MissingField(_) | Codegen(_) => {
                Failure::Input(e.to_string())
            }
            _ => Failure::Domain(e.to_string()),
        }
    }
}

type Outcome = Result<ExitCode, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(Failure::Domain(msg)) => {
            eprintln!("sigcode: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("sigcode: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Outcome {
    let wordlist = match &cli.wordlist {
        None => Wordlist::english(),
        Some(path) => Arc::new(Wordlist::load(path).map_err(|e| Failure::input(path.display(), e))?),
    };
    match cli.command {
        Command::Register(RegisterCommand::Voter {
            store,
            name,
            address,
            dob,
        }) => {
            let mut r = open_store(&store, &wordlist, true)?;
            let reg = r.register_voter(RegistrationFields::new(name, address, dob))?;
            r.save_store(&store)?;
            println!("voter_id {}", reg.voter_id);
            println!("secret_hex {}", reg.secret.to_hex());
            println!("secret_version {}", reg.secret.version());
            Ok(ExitCode::SUCCESS)
        }
        Command::Register(RegisterCommand::Election { store, election }) => {
            let mut r = open_store(&store, &wordlist, true)?;
            r.open_election(&election)?;
            r.save_store(&store)?;
            println!("election {election} open");
            Ok(ExitCode::SUCCESS)
        }
        Command::Code { target, format } => {
            let r = open_store(&target.store, &wordlist, false)?;
            let code = r.current_code(&target.voter, &target.election, format)?;
            println!("index {}", code.index);
            println!("{} {}", code.format, code.text);
            Ok(ExitCode::SUCCESS)
        }
        Command::Advance { target } => {
            let mut r = open_store(&target.store, &wordlist, false)?;
            let index = r.advance_index(&target.voter, &target.election)?;
            r.save_store(&target.store)?;
            println!("index {index}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Rotate { store, voter } => {
            let mut r = open_store(&store, &wordlist, false)?;
            let secret = r.rotate_secret(&voter, Actor::Official)?;
            r.save_store(&store)?;
            println!("voter_id {voter}");
            println!("secret_hex {}", secret.to_hex());
            println!("secret_version {}", secret.version());
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate {
            batch,
            store,
            window,
            back_scan,
            output,
        } => cmd_validate(&batch, &store, window, back_scan, output.as_deref(), &wordlist),
        Command::Simulate { config } => cmd_simulate(&config),
        Command::Vectors {
            secret,
            election,
            max_index,
        } => cmd_vectors(&secret, &election, max_index, &wordlist),
        Command::Serve(args) => cmd_serve(args, wordlist),
    }
}

fn open_store(path: &Path, wordlist: &Arc<Wordlist>, create: bool) -> Result<Registrar, Failure> {
    let clock = Arc::new(SystemClock);
    if create && !path.exists() {
        return Ok(Registrar::new(
            ChainConfig::default(),
            Box::new(OsNonceSource),
            clock,
            wordlist.clone(),
        ));
    }
    Registrar::load_store(path, Box::new(OsNonceSource), clock, wordlist.clone())
        .map_err(|e| Failure::input(path.display(), e))
}

fn cmd_validate(
    batch: &Path,
    store: &Path,
    window: u32,
    back_scan: u32,
    output: Option<&Path>,
    wordlist: &Arc<Wordlist>,
) -> Outcome {
    let file = fs::File::open(batch).map_err(|e| Failure::input(batch.display(), e))?;
    let envelopes = parse_envelope_csv(file).map_err(|e| Failure::input(batch.display(), e))?;
    let mut registrar = open_store(store, wordlist, false)?;
    let report = validate_batch(&mut registrar, envelopes, &ValidationConfig::new(window, back_scan));
    registrar.save_store(store)?;
    if let Some(path) = output {
        let json = serde_json::json!({
            "results": report.results,
            "summary": report.summary.iter().map(|(d, n)| (d.as_str(), n)).collect::<std::collections::BTreeMap<_, _>>(),
            "notifications": notification_list(&report),
        });
        let text = serde_json::to_string_pretty(&json).expect("report serializes");
        fs::write(path, text + "\n").map_err(|e| Failure::input(path.display(), e))?;
    }
    print!("{}", report.to_text());
    std::io::stdout().flush().map_err(|e| Failure::input("stdout", e))?;
    Ok(if report.all_valid() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_simulate(path: &Path) -> Outcome {
    let text = fs::read_to_string(path).map_err(|e| Failure::input(path.display(), e))?;
    let config = ScenarioConfig::parse(&text).map_err(|e| Failure::input(path.display(), e))?;
    let outcome = run_scenario(&config).map_err(|e| Failure::input(path.display(), e))?;
    print!("{}", outcome.summary_table());
    if let Some((false_accept, false_reject)) = config.baseline() {
        let baseline =
            run_baseline(&config, false_accept, false_reject).map_err(|e| Failure::input(path.display(), e))?;
        let comparison = compare_report(&outcome, &baseline).map_err(|e| Failure::Domain(e.to_string()))?;
        println!();
        print!("{}", comparison.to_text());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_vectors(secret: &str, election: &str, max_index: u32, wordlist: &Wordlist) -> Outcome {
    let secret = SharedSecret::from_hex(secret, DateTime::UNIX_EPOCH).map_err(|e| Failure::input("--secret", e))?;
    let vectors = golden_vectors(&secret, election, max_index, &ChainConfig::default(), wordlist)
        .map_err(|e| Failure::input("--max-index", e))?;
    let mut out = std::io::stdout().lock();
    for v in vectors {
        writeln!(out, "{}", v.to_line()).map_err(|e| Failure::input("stdout", e))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_serve(args: ServeArgs, wordlist: Arc<Wordlist>) -> Outcome {
    if args.official_token.trim().is_empty() {
        return Err(Failure::Input(format!(
            "an official token is required (--official-token or {OFFICIAL_TOKEN_ENV})"
        )));
    }
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .with_writer(std::io::stderr)
        .init();
    let registrar = open_store(&args.store, &wordlist, true)?;
    let batch_dir = args.batch_dir.unwrap_or_else(|| {
        let mut name = args.store.as_os_str().to_owned();
        name.push(".batches");
        PathBuf::from(name)
    });
    let config = ServiceConfig {
        official_token: args.official_token,
        validation: ValidationConfig::new(args.window, args.back_scan),
        code_reads_per_minute: args.code_reads_per_minute,
        store_path: Some(args.store.clone()),
        batch_dir: Some(batch_dir.clone()),
        ..ServiceConfig::default()
    };
    let state = AppState::new(registrar, config).map_err(|e| Failure::input(batch_dir.display(), e))?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::Domain(e.to_string()))?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(&args.bind)
            .await
            .map_err(|e| Failure::input(&args.bind, e))?;
        sigcode_service::serve(listener, state)
            .await
            .map_err(|e| Failure::Domain(e.to_string()))
    })?;
    Ok(ExitCode::SUCCESS)
}
