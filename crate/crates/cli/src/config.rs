//! Command-line definition and the JSON config file.
//!
//! A config file is a flat JSON object with the same keys as the long
//! flags (underscores for dashes). Values given on the command line win.
//! Every run archives the settings it used as `config.json`, minus the
//! output directory.

use std::collections::BTreeSet;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::commands::{pdf::PdfArgs, quantum::QuantumArgs, solve::SolveArgs, sweep::SweepArgs, walk::WalkArgs};
use crate::error::{CliError, Result};

#[derive(Parser, Debug)]
#[command(name = "fracdiff", version, about = "Diffusion on fractal space-time fabrics")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(clap::Args, Debug, Clone, Default)]
pub struct GlobalArgs {
    /// Output directory, created if missing [default: out]
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Seed of the random streams [default: 42]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Format of tables [default: csv]
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Also draw SVG plots
    #[arg(long, global = true)]
    pub svg: bool,
    /// JSON file of settings
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Analytic densities and relaxation curves
    Pdf(PdfArgs),
    /// Finite-volume solutions checked against Green's functions
    Solve(SolveArgs),
    /// Monte Carlo walkers, Lévy samples and moment growth
    Walk(WalkArgs),
    /// Scaled Planck relations and the plane-wave check
    Quantum(QuantumArgs),
    /// A check repeated over a grid of fabrics
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Global settings as they appear in a config file.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct FileGlobals {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub svg: bool,
}

/// Resolved global settings.
#[derive(Debug, Clone)]
pub struct Globals {
    pub out: PathBuf,
    pub seed: u64,
    pub format: Format,
    pub svg: bool,
}

pub fn read_config_file(path: Option<&PathBuf>) -> Result<Map<String, Value>> {
    let Some(path) = path else {
        return Ok(Map::new());
    };
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(CliError::Config(format!("{} must hold a JSON object", path.display()))),
        Err(e) => Err(CliError::Config(format!("{}: {e}", path.display()))),
    }
}

fn keys_of<T: Serialize + Default>() -> BTreeSet<String> {
    match serde_json::to_value(T::default()) {
        Ok(Value::Object(map)) => map.keys().cloned().collect(),
        _ => BTreeSet::new(),
    }
}

/// Rejects keys that neither the globals nor command `T` know about.
pub fn check_keys<T: Serialize + Default>(file: &Map<String, Value>, command: &str) -> Result<()> {
    let mut known = keys_of::<FileGlobals>();
    known.extend(keys_of::<T>());
    for key in file.keys() {
        if key == "command" {
            if file[key] != Value::String(command.to_string()) {
                return Err(CliError::Config(format!(
                    "the config file is for command {}, not {command}",
                    file[key]
                )));
            }
        } else if !known.contains(key) {
            return Err(CliError::Config(format!("unknown setting '{key}' for {command}")));
        }
    }
    Ok(())
}

/// Values of `T` from the file, overridden by those set on the command
/// line. Unset flags (`None`, or `false` for switches) leave the file alone.
pub fn merge<T: Serialize + DeserializeOwned + Default>(flags: &T, file: &Map<String, Value>) -> Result<T> {
    let known = keys_of::<T>();
    let mut merged: Map<String, Value> = file
        .iter()
        .filter(|(k, _)| known.contains(*k))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    if let Value::Object(set) = serde_json::to_value(flags).map_err(|e| CliError::Config(e.to_string()))? {
        for (k, v) in set {
            if !(v.is_null() || v == Value::Bool(false)) {
                merged.insert(k, v);
            }
        }
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::Config(e.to_string()))
}

pub fn resolve_globals(flags: &GlobalArgs, file: &Map<String, Value>) -> Result<Globals> {
    let from_file: FileGlobals = merge(&FileGlobals::default(), file)?;
    Ok(Globals {
        out: flags
            .out
            .clone()
            .or(from_file.out)
            .unwrap_or_else(|| PathBuf::from("out")),
        seed: flags.seed.or(from_file.seed).unwrap_or(42),
        format: flags.format.or(from_file.format).unwrap_or(Format::Csv),
        svg: flags.svg || from_file.svg,
    })
}

/// The archived form of a run: command name, globals except the output
/// directory, and the fully resolved command settings.
pub fn archive<T: Serialize>(command: &str, globals: &Globals, args: &T) -> Result<Value> {
    let mut map = match serde_json::to_value(args).map_err(|e| CliError::Config(e.to_string()))? {
        Value::Object(map) => map,
        _ => Map::new(),
    };
    map.insert("command".into(), Value::String(command.into()));
    map.insert("seed".into(), Value::from(globals.seed));
    map.insert(
        "format".into(),
        serde_json::to_value(globals.format).map_err(|e| CliError::Config(e.to_string()))?,
    );
    map.insert("svg".into(), Value::Bool(globals.svg));
    Ok(Value::Object(map))
}

pub fn required<T>(value: Option<T>, command: &'static str, flag: &'static str) -> Result<T> {
    value.ok_or(CliError::Missing { command, flag })
}
