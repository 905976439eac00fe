//! Argument parsing, configuration merge and report output.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use hslab_core::quadrature::QuadOptions;
use serde::Serialize;
use serde_json::Value;

use crate::commands::{self, Section, Table};
use crate::config::{parse_lambda_grid, Command, Format, RunConfig};
use crate::error::{worst, CliError, EXIT_MATH, EXIT_NONCONVERGENCE, EXIT_OK, EXIT_USAGE};

/// Environment variable naming a directory for relative `--out` paths.
pub const OUT_DIR_ENV: &str = "HSLAB_OUT_DIR";

const MAX_STDERR_PROBLEMS: usize = 10;

#[derive(Debug, Parser)]
#[command(
    name = "hslab",
    version,
    about = "Weighted Hardy-Sobolev inequality laboratory"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Cmd>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Quadrature tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Size of the worker pool.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Comma-separated dilation factors, e.g. "2,4,8,16".
    #[arg(long = "lambda-grid", global = true, value_name = "LIST")]
    pub lambda_grid: Option<String>,
    /// Omit the timestamp so repeated runs are byte-identical.
    #[arg(long, global = true)]
    pub comparison: bool,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Exact identity suites.
    Identity {
        #[arg(long)]
        k_max: Option<usize>,
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
        /// Corrupt one recursion coefficient (self-test of the checker).
        #[arg(long, hide = true)]
        perturb: bool,
    },
    /// Hypothesis verdicts and ratios for the configured cases.
    Check,
    /// Scaling sweeps and the critical and canceling demonstrations.
    Sharpness,
    /// Lower bounds for best constants by derivative-free search.
    Estimate {
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Everything above.
    All,
}

impl Cmd {
    fn kind(&self) -> Command {
        match self {
            Cmd::Identity { .. } => Command::Identity,
            Cmd::Check => Command::Check,
            Cmd::Sharpness => Command::Sharpness,
            Cmd::Estimate { .. } => Command::Estimate,
            Cmd::All => Command::All,
        }
    }
}

/// Resolved settings after merging flags over the config file.
struct Plan {
    command: Command,
    cfg: RunConfig,
    opts: QuadOptions,
    format: Format,
    out: Option<PathBuf>,
    lambda_grid: Option<Vec<f64>>,
    perturb: bool,
}

fn plan(cli: &Cli) -> Result<Plan, CliError> {
    let c = &cli.common;
    let mut cfg = match &c.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let command = match (&cli.command, cfg.command) {
        (Some(cmd), _) => cmd.kind(),
        (None, Some(k)) => k,
        (None, None) => {
            return Err(CliError::Usage(
                "no command given (identity|check|sharpness|estimate|all)".into(),
            ))
        }
    };
    let mut perturb = false;
    match &cli.command {
        Some(Cmd::Identity {
            k_max,
            n_max,
            trials,
            perturb: p,
        }) => {
            if let Some(v) = k_max {
                cfg.identity.k_max = *v;
            }
            if let Some(v) = n_max {
                cfg.identity.n_max = *v;
            }
            if let Some(v) = trials {
                cfg.identity.trials = *v;
            }
            perturb = *p;
        }
        Some(Cmd::Estimate { budget: Some(b) }) => cfg.estimate.space.budget = *b,
        _ => {}
    }
    if let Some(seed) = c.seed {
        cfg.seed = Some(seed);
    }
    if let Some(tol) = c.tol {
        cfg.quadrature.tol = Some(tol);
    }
    if let Some(w) = c.workers {
        cfg.workers = Some(w);
    }
    if c.comparison {
        cfg.comparison = true;
    }
    if cfg.workers == Some(0) {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }
    if cfg.estimate.space.budget == 0 && matches!(command, Command::Estimate | Command::All) {
        return Err(CliError::Usage("estimate budget must be at least 1".into()));
    }
    let lambda_grid = c
        .lambda_grid
        .as_deref()
        .map(parse_lambda_grid)
        .transpose()?;
    let opts = cfg.quadrature.options()?;
    let format = c.format.or(cfg.format).unwrap_or_default();
    let out = c.out.clone().or_else(|| cfg.out.clone()).map(resolve_out);
    Ok(Plan {
        command,
        cfg,
        opts,
        format,
        out,
        lambda_grid,
        perturb,
    })
}

fn resolve_out(p: PathBuf) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if p.is_relative() => Path::new(&dir).join(p),
        _ => p,
    }
}

fn run_sections(plan: &Plan) -> Result<Vec<Section>, CliError> {
    let cfg = &plan.cfg;
    let seed = cfg.seed;
    let opts = &plan.opts;
    let grid = plan.lambda_grid.as_deref();
    match plan.command {
        Command::Identity => Ok(vec![commands::identity(&cfg.identity, seed, plan.perturb)?]),
        Command::Check => Ok(vec![commands::check(&cfg.check, opts)?]),
        Command::Sharpness => Ok(vec![commands::sharpness(&cfg.sharpness, grid, opts)?]),
        Command::Estimate => Ok(vec![commands::estimate(&cfg.estimate, seed, opts)?]),
        Command::All => Ok(vec![
            commands::identity(&cfg.identity, seed, false)?,
            commands::check(&cfg.check, opts)?,
            commands::sharpness(&cfg.sharpness, grid, opts)?,
            commands::estimate(&cfg.estimate, seed, opts)?,
        ]),
    }
}

fn status_name(code: i32) -> &'static str {
    match code {
        EXIT_OK => "ok",
        EXIT_MATH => "assertion-failed",
        EXIT_USAGE => "usage-error",
        EXIT_NONCONVERGENCE => "non-convergence",
        _ => "unknown",
    }
}

#[derive(Serialize)]
struct Envelope<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    generated_unix: Option<u64>,
    status: &'static str,
    exit_code: i32,
    seed: Option<u64>,
    quadrature: &'a QuadOptions,
    problems: Vec<String>,
    result: Value,
}

fn envelope_json(plan: &Plan, sections: &[Section], code: i32) -> String {
    let result = if plan.command == Command::All {
        Value::Object(
            sections
                .iter()
                .map(|s| (s.name.to_string(), s.json.clone()))
                .collect(),
        )
    } else {
        sections[0].json.clone()
    };
    let env = Envelope {
        tool: "hslab",
        version: env!("CARGO_PKG_VERSION"),
        command: plan.command.name(),
        generated_unix: (!plan.cfg.comparison).then(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        }),
        status: status_name(code),
        exit_code: code,
        seed: plan.cfg.seed,
        quadrature: &plan.opts,
        problems: sections
            .iter()
            .flat_map(|s| s.problems.iter().cloned())
            .collect(),
        result,
    };
    let mut text = serde_json::to_string_pretty(&env).expect("report serializes");
    text.push('\n');
    text
}

fn csv_text(plan: &Plan, sections: &[Section]) -> Result<String, CliError> {
    let table = if plan.command == Command::All {
        // long form so that tables with different columns share one file
        let mut t = Table {
            header: ["section", "row", "column", "value"]
                .map(String::from)
                .to_vec(),
            rows: Vec::new(),
        };
        for s in sections {
            for (i, row) in s.table.rows.iter().enumerate() {
                for (col, v) in s.table.header.iter().zip(row) {
                    t.rows.push(vec![
                        s.name.to_string(),
                        i.to_string(),
                        col.clone(),
                        v.clone(),
                    ]);
                }
            }
        }
        t
    } else {
        sections[0].table.clone()
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Usage(format!("csv: {e}"));
    w.write_record(&table.header).map_err(io)?;
    for r in &table.rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Usage(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", dir.display())))?;
    }
    std::fs::write(path, text)
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

fn execute(plan: &Plan, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let sections = match plan.cfg.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(format!("worker pool: {e}")))?
            .install(|| run_sections(plan))?,
        None => run_sections(plan)?,
    };
    let code = sections.iter().fold(EXIT_OK, |acc, s| worst(acc, s.code));
    let json = envelope_json(plan, &sections, code);
    let body = match plan.format {
        Format::Json => json.clone(),
        Format::Csv => csv_text(plan, &sections)?,
    };
    match &plan.out {
        Some(path) => {
            write_file(path, &body)?;
            if plan.format == Format::Csv {
                write_file(&path.with_extension("json"), &json)?;
            }
        }
        None => {
            stdout
                .write_all(body.as_bytes())
                .map_err(|e| CliError::Usage(format!("stdout: {e}")))?;
        }
    }
    for s in &sections {
        for p in s.problems.iter().take(MAX_STDERR_PROBLEMS) {
            eprintln!("hslab {}: {p}", s.name);
        }
        if s.problems.len() > MAX_STDERR_PROBLEMS {
            eprintln!(
                "hslab {}: ... {} more in the report",
                s.name,
                s.problems.len() - MAX_STDERR_PROBLEMS
            );
        }
    }
    Ok(code)
}

/// Runs the tool on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    let result = plan(&cli).and_then(|p| execute(&p, stdout));
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("hslab: {e}");
            e.code()
        }
    }
}
