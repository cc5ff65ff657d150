use std::io::{self, IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use scoutbench_core::analytics::{PlayerFilter, PlayerRoleRow, Range, SortKey, DEFAULT_DECAY};
use scoutbench_core::ingest::{self, IngestOptions};
use scoutbench_core::roles::Role;
use scoutbench_core::Engine;

/// Soccer scouting analytics: ingest event logs, score players, serve the API.
#[derive(Debug, Parser)]
#[command(name = "scoutbench", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a dataset and print the per-source report.
    Ingest(IngestArgs),
    /// Write a deterministic synthetic dataset.
    Fixture(FixtureArgs),
    /// Run the scouting query and print matching (player, role) rows.
    Scout(ScoutArgs),
    /// Start the HTTP API.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
struct IngestArgs {
    /// Directory holding events.jsonl, players.jsonl and matches.jsonl.
    #[arg(long, env = "SCOUTBENCH_DATA_DIR", required_unless_present_all = ["events", "players", "matches"])]
    data_dir: Option<PathBuf>,
    #[arg(long, requires_all = ["players", "matches"])]
    events: Option<PathBuf>,
    #[arg(long, requires_all = ["events", "matches"])]
    players: Option<PathBuf>,
    #[arg(long, requires_all = ["events", "players"])]
    matches: Option<PathBuf>,
    /// Mirror second-half coordinates (sources with absolute pitch sides).
    #[arg(long)]
    flip_second_half: bool,
}

#[derive(Debug, Args)]
struct FixtureArgs {
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    players: usize,
    #[arg(long, default_value_t = 10)]
    matches: usize,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Jsonl,
}

#[derive(Debug, Args)]
struct ScoutArgs {
    #[arg(long, env = "SCOUTBENCH_DATA_DIR")]
    data_dir: PathBuf,
    /// Case-insensitive name substring.
    #[arg(long)]
    name: Option<String>,
    /// Role id or alias; repeatable or comma-separated.
    #[arg(long, value_delimiter = ',')]
    role: Vec<Role>,
    #[arg(long)]
    age_min: Option<f64>,
    #[arg(long)]
    age_max: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    trend_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    trend_max: Option<f64>,
    #[arg(long)]
    min_matches: Option<usize>,
    /// Sort keys as `field[:asc|desc],...`.
    #[arg(long)]
    sort: Option<String>,
    /// Profile id; the built-in default when omitted.
    #[arg(long)]
    profile: Option<String>,
    /// Recency decay for the short-term trend, in (0, 1].
    #[arg(long, default_value_t = DEFAULT_DECAY)]
    lambda: f64,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[arg(long, env = "SCOUTBENCH_BIND", default_value = "127.0.0.1:8080")]
    bind: String,
    #[arg(long, env = "SCOUTBENCH_DATA_DIR")]
    data_dir: PathBuf,
}

#[derive(Debug)]
enum Failure {
    Domain(String),
    Usage(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Domain(_) => 1,
            Failure::Usage(_) => 2,
        }
    }
}

type Outcome = Result<(), Failure>;

fn domain(err: impl std::fmt::Display) -> Failure {
    Failure::Domain(err.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Ingest(args) => cmd_ingest(args),
        Command::Fixture(args) => cmd_fixture(args),
        Command::Scout(args) => cmd_scout(args),
        Command::Serve(args) => cmd_serve(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Domain(msg) | Failure::Usage(msg)) = &f;
            eprintln!("error: {msg}");
            ExitCode::from(f.exit_code())
        }
    }
}

fn cmd_ingest(args: IngestArgs) -> Outcome {
    let options = IngestOptions {
        flip_second_half: args.flip_second_half,
        reference_date: None,
    };
    let loaded = match (&args.events, &args.players, &args.matches) {
        (Some(e), Some(p), Some(m)) => ingest::parse_files(e, p, m, options),
        _ => ingest::load_dir(args.data_dir.as_deref().expect("enforced by clap"), options),
    };
    let (dataset, report) = loaded.map_err(domain)?;
    print!("{report}");
    println!(
        "dataset: {} players, {} matches, {} events, {} rejected",
        dataset.player_count(),
        dataset.match_count(),
        dataset.events().len(),
        report.total_rejects()
    );
    Ok(())
}

fn cmd_fixture(args: FixtureArgs) -> Outcome {
    let dataset =
        ingest::generate_synthetic(args.seed, args.players, args.matches).map_err(|e| match e {
            scoutbench_core::IngestError::InvalidArgument(msg) => Failure::Usage(msg),
            other => domain(other),
        })?;
    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| domain(format!("cannot create {}: {e}", args.out_dir.display())))?;
    ingest::write_dir(&dataset, &args.out_dir).map_err(domain)?;
    println!(
        "wrote {} players, {} matches, {} events to {}",
        dataset.player_count(),
        dataset.match_count(),
        dataset.events().len(),
        args.out_dir.display()
    );
    Ok(())
}

fn load_engine(dir: &Path) -> Result<Engine, Failure> {
    let (engine, report) = Engine::load_dir(dir).map_err(domain)?;
    if report.total_rejects() > 0 {
        tracing::warn!(rejects = report.total_rejects(), "records rejected during load");
    }
    Ok(engine)
}

fn scout_filter(args: &ScoutArgs) -> Result<(PlayerFilter, Vec<SortKey>), Failure> {
    let filter = PlayerFilter {
        name_substring: args.name.clone().filter(|s| !s.is_empty()),
        roles: args.role.clone(),
        age: Range::new(args.age_min, args.age_max),
        trend_percentage: Range::new(args.trend_min, args.trend_max),
        min_matches: args.min_matches,
    };
    filter.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    if !(args.lambda > 0.0 && args.lambda <= 1.0) {
        return Err(Failure::Usage("--lambda must lie in (0, 1]".into()));
    }
    let sort = match &args.sort {
        Some(spec) => SortKey::parse_list(spec).map_err(|e| Failure::Usage(e.to_string()))?,
        None => SortKey::DEFAULT.to_vec(),
    };
    Ok((filter, sort))
}

fn cmd_scout(args: ScoutArgs) -> Outcome {
    let (filter, sort) = scout_filter(&args)?;
    let engine = load_engine(&args.data_dir)?;
    let profile = engine.profile(args.profile.as_deref()).map_err(domain)?;
    let rows = engine
        .query_players(&profile, &filter, &sort, args.lambda)
        .map_err(domain)?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let written = match args.format {
        Format::Jsonl => write_jsonl(&mut out, &rows),
        Format::Table => write_table(&mut out, &rows),
    };
    written.map_err(|e| domain(format!("write failed: {e}")))
}

fn write_jsonl(out: &mut impl Write, rows: &[PlayerRoleRow]) -> io::Result<()> {
    for row in rows {
        serde_json::to_writer(&mut *out, row)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.3}"))
}

fn write_table(out: &mut impl Write, rows: &[PlayerRoleRow]) -> io::Result<()> {
    const HEADER: [&str; 9] = [
        "player_id", "name", "age", "role", "matches", "mean", "trend_pct", "trend_long", "trend_short",
    ];
    let cells: Vec<[String; 9]> = rows
        .iter()
        .map(|r| {
            [
                r.player_id.to_string(),
                r.name.clone(),
                r.age.to_string(),
                r.role.id().to_string(),
                r.n_matches.to_string(),
                format!("{:.3}", r.playerank_mean),
                fmt_opt(r.trend_percentage),
                fmt_opt(r.trend_long),
                fmt_opt(r.trend_short),
            ]
        })
        .collect();
    let mut widths = HEADER.map(str::len);
    for row in &cells {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |out: &mut dyn Write, row: &[&str]| -> io::Result<()> {
        let mut parts = Vec::with_capacity(row.len());
        for (i, (c, w)) in row.iter().zip(widths).enumerate() {
            // Text columns left-aligned, numbers right-aligned.
            if i == 1 || i == 3 {
                parts.push(format!("{c:<w$}"));
            } else {
                parts.push(format!("{c:>w$}"));
            }
        }
        writeln!(out, "{}", parts.join("  ").trim_end())
    };
    line(out, &HEADER)?;
    for row in &cells {
        line(out, &row.each_ref().map(String::as_str))?;
    }
    writeln!(out, "{} rows", rows.len())?;
    out.flush()
}

fn cmd_serve(args: ServeArgs) -> Outcome {
    tracing_subscriber::fmt()
        .with_writer(io::stderr)
        .with_ansi(io::stderr().is_terminal())
        .init();
    let engine = Arc::new(load_engine(&args.data_dir)?);
    let runtime = tokio::runtime::Runtime::new().map_err(domain)?;
    runtime.block_on(async move {
        let listener = scoutbench_api::bind(&args.bind).await.map_err(domain)?;
        scoutbench_api::serve(listener, engine, shutdown_signal())
            .await
            .map_err(domain)
    })
}

async fn shutdown_signal() {
    let ctrl_c = async {
        if let Err(e) = tokio::signal::ctrl_c().await {
            tracing::error!(error = %e, "cannot listen for ctrl-c");
            std::future::pending::<()>().await;
        }
    };
    #[cfg(unix)]
    let terminate = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let terminate = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {}
        _ = terminate => {}
    }
    tracing::info!("shutdown requested");
}
