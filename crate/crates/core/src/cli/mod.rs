//! Command-line surface: subcommands, `key=value` config files, artifact
//! writing and replay.
//!
//! Every run writes `<out-dir>/<command>.json` holding the format version,
//! the argument vector, the resolved arguments and the result, plus a CSV
//! table where the result is tabular. `report --replay <json>` re-executes the
//! stored arguments and compares results.

mod args;
mod commands;

pub use args::{Cli, Command};

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Parser;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;
/// Environment variable naming the default artifact directory.
pub const OUT_DIR_ENV: &str = "CDPERC_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "cdperc-out";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// A tabular result, written as CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: ToString>(header: &[S], rows: Vec<Vec<String>>) -> Self {
        Self { header: header.iter().map(S::to_string).collect(), rows }
    }
}

/// What a subcommand produced.
#[derive(Debug, Clone)]
pub struct Output {
    pub result: Value,
    pub table: Option<Table>,
    /// Text printed on stdout.
    pub summary: String,
    /// A verification failed.
    pub failed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifact {
    pub format_version: u32,
    pub tool_version: String,
    pub command: String,
    pub argv: Vec<String>,
    pub config: Value,
    pub result: Value,
}

/// Options handled outside the subcommand parser.
#[derive(Debug, Default, PartialEq)]
struct Globals {
    threads: Option<usize>,
    out_dir: Option<PathBuf>,
    config: Option<PathBuf>,
    no_artifacts: bool,
}

const GROUPS: [&str; 4] = ["bounds", "curve", "simulate", "explore"];

/// Removes the global options from `argv`, wherever they appear.
fn split_globals(argv: &[String]) -> Result<(Globals, Vec<String>)> {
    let mut g = Globals::default();
    let mut rest = Vec::new();
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        let (name, inline) = match a.split_once('=') {
            Some((n, v)) if n.starts_with("--") => (n, Some(v.to_string())),
            _ => (a.as_str(), None),
        };
        let mut value = |flag: &str| -> Result<String> {
            inline
                .clone()
                .or_else(|| it.next().cloned())
                .ok_or_else(|| Error::Parse(format!("{flag} requires a value")))
        };
        match name {
            "--threads" => {
                let v = value("--threads")?;
                let n: usize = v.parse().map_err(|_| Error::Parse(format!("bad thread count `{v}`")))?;
                if n == 0 {
                    return Err(Error::InvalidParameter("--threads must be at least 1".into()));
                }
                g.threads = Some(n);
            }
            "--out-dir" => g.out_dir = Some(value("--out-dir")?.into()),
            "--config" => g.config = Some(value("--config")?.into()),
            "--no-artifacts" => g.no_artifacts = true,
            _ => rest.push(a.clone()),
        }
    }
    Ok((g, rest))
}

/// Parses a `key=value` file; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("config line {}: expected key=value", i + 1)))?;
        out.insert(k.trim().replace('_', "-"), v.trim().to_string());
    }
    Ok(out)
}

/// Inserts config entries as flags right after the subcommand path, so that
/// flags given on the command line (parsed later) take precedence.
fn splice_config(argv: Vec<String>, config: &BTreeMap<String, String>) -> Vec<String> {
    let depth = match argv.get(1) {
        Some(g) if GROUPS.contains(&g.as_str()) => 3,
        _ => 2,
    };
    let at = depth.min(argv.len());
    let mut flags = Vec::new();
    for (k, v) in config {
        match v.as_str() {
            "true" => flags.push(format!("--{k}")),
            "false" => {}
            _ => {
                flags.push(format!("--{k}"));
                flags.push(v.clone());
            }
        }
    }
    let mut out = argv[..at].to_vec();
    out.extend(flags);
    out.extend_from_slice(&argv[at..]);
    out
}

fn write_table(path: &Path, table: &Table) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(&table.header)?;
    for r in &table.rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}


fn in_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidParameter(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

/// Parses a stripped argument vector and executes it.
fn execute_argv(argv: &[String]) -> Result<Output> {
    let cli = Cli::try_parse_from(argv).map_err(|e| Error::Parse(e.to_string()))?;
    if let Command::Report(_) = cli.command {
        return Err(Error::InvalidParameter("cannot replay a replay".into()));
    }
    commands::execute(&cli.command)
}

/// Runs the tool on a full argument vector (including the program name) and
/// returns the process exit code.
pub fn run(argv: Vec<String>) -> i32 {
    match run_inner(argv) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn run_inner(argv: Vec<String>) -> Result<i32> {
    let (globals, mut argv) = split_globals(&argv)?;
    if let Some(path) = &globals.config {
        let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        argv = splice_config(argv, &parse_config(&text)?);
    }
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return Ok(code);
        }
    };
    if let Command::Report(r) = &cli.command {
        return in_pool(globals.threads, || replay(&r.replay));
    }
    let out = match in_pool(globals.threads, || commands::execute(&cli.command))? {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(EXIT_USAGE);
        }
    };
    print!("{}", out.summary);
    if !globals.no_artifacts {
        let dir = globals
            .out_dir
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
        fs::create_dir_all(&dir)?;
        let name = cli.command.name();
        let artifact = Artifact {
            format_version: FORMAT_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: name.replace('-', " ").to_string(),
            argv: argv.clone(),
            config: serde_json::to_value(&cli.command)?,
            result: out.result.clone(),
        };
        fs::write(dir.join(format!("{name}.json")), serde_json::to_string_pretty(&artifact)? + "\n")?;
        if let Some(t) = &out.table {
            write_table(&dir.join(format!("{name}.csv")), t)?;
        }
    }
    Ok(if out.failed { EXIT_FAIL } else { EXIT_OK })
}

/// Re-executes an artifact's arguments and compares the results.
fn replay(path: &Path) -> i32 {
    let load = || -> Result<Artifact> {
        let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let a: Artifact = serde_json::from_str(&text)?;
        if a.format_version != FORMAT_VERSION {
            return Err(Error::Parse(format!("unsupported artifact format {}", a.format_version)));
        }
        Ok(a)
    };
    let artifact = match load() {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    match execute_argv(&artifact.argv) {
        Ok(out) if out.result == artifact.result => {
            println!("replay of `{}` reproduced identical results", artifact.command);
            EXIT_OK
        }
        Ok(_) => {
            println!("replay of `{}` produced different results", artifact.command);
            EXIT_FAIL
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
