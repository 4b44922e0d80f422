//! Files written by a run. Tables go out as CSV (17 significant digits)
//! or JSON; reports are always JSON.

use std::path::{Path, PathBuf};

use fractal_diffusion::io::columns_to_csv;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Format;
use crate::error::{CliError, Result};
use crate::svg::Plot;

pub struct Output {
    dir: PathBuf,
    format: Format,
    svg: bool,
}

impl Output {
    pub fn create(dir: &Path, format: Format, svg: bool) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        Ok(Self {
            dir: dir.to_path_buf(),
            format,
            svg,
        })
    }

    fn write(&self, name: &str, text: &str) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, text).map_err(|source| CliError::Io { path, source })
    }

    /// Table `stem.csv` or `stem.json`.
    pub fn table(&self, stem: &str, header: &[&str], columns: &[&[f64]]) -> Result<()> {
        match self.format {
            Format::Csv => self.write(&format!("{stem}.csv"), &columns_to_csv(header, columns)?),
            Format::Json => {
                if header.len() != columns.len() {
                    return Err(CliError::Config("one header entry per column is required".into()));
                }
                let value = json!({
                    "schema_version": fractal_diffusion::solver::SCHEMA_VERSION,
                    "columns": header,
                    "data": columns,
                });
                self.json(stem, &value)
            }
        }
    }

    /// Report `stem.json`.
    pub fn json<T: Serialize>(&self, stem: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Config(e.to_string()))?;
        text.push('\n');
        self.write(&format!("{stem}.json"), &text)
    }

    /// Plot `stem.svg`, only when plots were requested.
    pub fn plot(&self, stem: &str, plot: &Plot) -> Result<()> {
        if self.svg {
            self.write(&format!("{stem}.svg"), &plot.render())?;
        }
        Ok(())
    }

    pub fn archive(&self, config: &Value) -> Result<()> {
        self.json("config", config)
    }
}

/// Pretty JSON on stdout.
pub fn print_json<T: Serialize>(value: &T) {
    if let Ok(text) = serde_json::to_string_pretty(value) {
        println!("{text}");
    }
}
