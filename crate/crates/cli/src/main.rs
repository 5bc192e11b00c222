//! `xxzneg`: tables, figure data, sweeps and acceptance checks as CSV.

mod config;
mod parse;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use xxz_negativity::cache::TextCache;
use xxz_negativity::check::{self, CheckConfig, Status};
use xxz_negativity::entanglement::Method;
use xxz_negativity::reference::{self, TABLE_5};
use xxz_negativity::report::{self, RunOptions, Size, TableForm, DEFAULT_ED_CAP};

use config::{pick, FileConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] xxz_negativity::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use xxz_negativity::Error as E;
        match self {
            CliError::Usage(_) | CliError::Core(E::Domain(_)) => 2,
            CliError::Core(E::Infeasible(_) | E::Capacity { .. } | E::Extrapolation { .. }) => 3,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "xxzneg", version, about = "Nearest-neighbour negativity of the XXZ ring")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output file (default: standard output)
    #[arg(long, global = true)]
    out: Option<String>,
    /// Decimal digits, 6 to 15 (default 12)
    #[arg(long, global = true)]
    precision: Option<String>,
    /// Directory for cached exact-diagonalization and Bethe results
    #[arg(long, global = true)]
    cache: Option<String>,
    /// key = value file; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    jobs: Option<String>,
    /// Largest ring handed to exact diagonalization (default 16)
    #[arg(long = "ed-cap", global = true)]
    ed_cap: Option<String>,
    /// tabulated or consistent (default tabulated)
    #[arg(long = "twist-form", global = true)]
    twist_form: Option<String>,
    /// Comma list of ed, bethe, ff, cft
    #[arg(long, global = true)]
    method: Option<String>,
    /// Comma list of ring sizes; fig 1 also accepts inf
    #[arg(long = "L", global = true)]
    lengths: Option<String>,
    /// a:b:step, a comma list or one value
    #[arg(long, global = true, allow_hyphen_values = true)]
    delta: Option<String>,
    /// Twist angle, e.g. 0.3 or 2pi/3
    #[arg(long, global = true)]
    phi: Option<String>,
    /// Sector indices for fig 2
    #[arg(long, global = true)]
    n: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Reproduce table 1–5
    Table {
        #[arg(long)]
        id: usize,
    },
    /// Figure data: 1 = ε against ∂ε/∂Δ, 2 = sector negativities
    Fig {
        #[arg(long)]
        id: usize,
    },
    /// Ground-state negativity over an (L, Δ) grid
    Sweep,
    /// Run the acceptance checks
    Check,
}

const DEFAULT_DELTAS: &str = "-0.9:0.9:0.1";

struct Settings {
    out: Option<String>,
    precision: usize,
    options: RunOptions,
    methods_given: bool,
    lengths: Option<String>,
    delta: Option<String>,
    phi: f64,
    sectors: Vec<usize>,
}

fn settings(cli: &Cli) -> Result<Settings, CliError> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let get = |flag: &Option<String>, key: &str| pick(flag.clone(), &file, key);
    let precision = match get(&cli.precision, "precision") {
        Some(p) => p.trim().parse::<usize>().map_err(|_| CliError::Usage(format!("bad precision {p}")))?,
        None => 12,
    };
    if !(6..=15).contains(&precision) {
        return Err(CliError::Usage(format!("precision must be within 6..=15, got {precision}")));
    }
    if let Some(j) = get(&cli.jobs, "jobs") {
        let n = j.trim().parse::<usize>().map_err(|_| CliError::Usage(format!("bad job count {j}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let ed_cap = match get(&cli.ed_cap, "ed-cap") {
        Some(c) => c.trim().parse::<usize>().map_err(|_| CliError::Usage(format!("bad ed cap {c}")))?,
        None => DEFAULT_ED_CAP,
    };
    let form = match get(&cli.twist_form, "twist-form") {
        Some(f) => TableForm::parse(f.trim())
            .ok_or_else(|| CliError::Usage(format!("twist form must be tabulated or consistent, got {f}")))?,
        None => TableForm::default(),
    };
    let method = get(&cli.method, "method");
    let methods = match &method {
        Some(m) => parse::methods(m)?,
        None => Method::ALL.to_vec(),
    };
    let cache = match get(&cli.cache, "cache") {
        Some(dir) => Some(TextCache::new(dir)?),
        None => None,
    };
    let phi = match get(&cli.phi, "phi") {
        Some(p) => parse::angle(&p)?,
        None => 0.0,
    };
    let sectors = parse::index_list(&get(&cli.n, "n").unwrap_or_else(|| "0,1,2,3".into()))?;
    Ok(Settings {
        out: get(&cli.out, "out"),
        precision,
        options: RunOptions {
            methods,
            ed_cap,
            form,
            cache,
            ..Default::default()
        },
        methods_given: method.is_some(),
        lengths: get(&cli.lengths, "L"),
        delta: get(&cli.delta, "delta"),
        phi,
        sectors,
    })
}

fn lengths_or(s: &Settings, default: &[usize]) -> Result<Vec<usize>, CliError> {
    match &s.lengths {
        Some(l) => parse::length_list(l),
        None => Ok(default.to_vec()),
    }
}

fn deltas(s: &Settings) -> Result<Vec<f64>, CliError> {
    parse::real_list(s.delta.as_deref().unwrap_or(DEFAULT_DELTAS))
}

/// Returns the text to write and the exit status.
fn execute(cli: &Cli, s: &mut Settings) -> Result<(String, u8), CliError> {
    let p = s.precision;
    match cli.command {
        Command::Table { id } => {
            let default = match id {
                1..=4 => reference::table(id).map(|t| t.lengths()).unwrap_or_default(),
                5 => vec![TABLE_5.length],
                _ => return Err(CliError::Usage(format!("table id must be 1..=5, got {id}"))),
            };
            let lengths = lengths_or(s, &default)?;
            Ok((report::run_table(id, &lengths, &s.options)?.render(p), 0))
        }
        Command::Fig { id } => {
            let sizes = match id {
                1 => parse::size_list(s.lengths.as_deref().unwrap_or("4,8,12,inf"))?,
                2 => parse::size_list(s.lengths.as_deref().unwrap_or("16"))?,
                _ => return Err(CliError::Usage(format!("figure id must be 1 or 2, got {id}"))),
            };
            if id == 2 && sizes.contains(&Size::Infinite) {
                return Err(CliError::Usage("fig 2 needs finite ring sizes".into()));
            }
            let grid = deltas(s)?;
            Ok((report::run_fig(id, &sizes, &grid, &s.sectors, &s.options)?.render(p), 0))
        }
        Command::Sweep => {
            if !s.methods_given {
                s.options.methods = vec![Method::Ed, Method::Cft];
            }
            let lengths = lengths_or(s, &[8])?;
            let grid = deltas(s)?;
            Ok((report::run_sweep(&lengths, &grid, s.phi, &s.options)?.render(p), 0))
        }
        Command::Check => {
            let cfg = CheckConfig {
                ed_cap: s.options.ed_cap,
                cache: s.options.cache.clone(),
            };
            let results = check::run_all(&cfg);
            for r in &results {
                log::info!("{}", r.line());
            }
            let code = match check::overall(&results) {
                Status::Pass => 0,
                Status::Fail => 1,
                Status::Skipped => 3,
            };
            Ok((check::render(&results), code))
        }
    }
}

fn emit(out: &Option<String>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    let mut s = settings(cli)?;
    let (text, code) = execute(cli, &mut s)?;
    emit(&s.out, &text)?;
    Ok(code)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("xxzneg: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
