//! CSV tables, JSON sidecars and the run manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};

pub enum Cell {
    Num(f64),
    Text(&'static str),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

/// A CSV table with a one-line header. Numbers carry 15 significant digits.
pub struct Table {
    header: Vec<String>,
    body: String,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), body: String::new() }
    }

    pub fn push(&mut self, row: impl IntoIterator<Item = Cell>) {
        let mut first = true;
        for cell in row {
            if !first {
                self.body.push(',');
            }
            first = false;
            match cell {
                Cell::Num(x) => write!(self.body, "{x:.14e}").expect("writing to a String"),
                Cell::Text(s) => self.body.push_str(s),
            }
        }
        self.body.push('\n');
    }

    pub fn render(&self) -> String {
        format!("{}\n{}", self.header.join(","), self.body)
    }
}

/// Collects output files and writes `manifest.json` next to them.
pub struct Run {
    command: &'static str,
    out_dir: PathBuf,
    parameters: Value,
    grids: serde_json::Map<String, Value>,
    results: serde_json::Map<String, Value>,
    outputs: Vec<String>,
    started: Instant,
}

impl Run {
    pub fn start(command: &'static str, out_dir: &Path, parameters: impl Serialize) -> CliResult<Self> {
        std::fs::create_dir_all(out_dir)
            .map_err(|source| CliError::Output { path: out_dir.display().to_string(), source })?;
        Ok(Self {
            command,
            out_dir: out_dir.to_path_buf(),
            parameters: serde_json::to_value(parameters).expect("parameters serialize"),
            grids: Default::default(),
            results: Default::default(),
            outputs: Vec::new(),
            started: Instant::now(),
        })
    }

    pub fn grid(&mut self, key: &str, value: impl Serialize) {
        self.grids.insert(key.into(), serde_json::to_value(value).expect("grid serializes"));
    }

    pub fn result(&mut self, key: &str, value: impl Serialize) {
        self.results.insert(key.into(), serde_json::to_value(value).expect("result serializes"));
    }

    fn write(&mut self, name: &str, text: &str) -> CliResult<()> {
        let path = self.out_dir.join(name);
        std::fs::write(&path, text).map_err(|source| CliError::Output { path: path.display().to_string(), source })?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    pub fn csv(&mut self, name: &str, table: &Table) -> CliResult<()> {
        self.write(name, &table.render())
    }

    pub fn json(&mut self, name: &str, value: &impl Serialize) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(value).expect("output serializes");
        text.push('\n');
        self.write(name, &text)
    }

    pub fn finish(self) -> CliResult<()> {
        let manifest = serde_json::json!({
            "command": self.command,
            "tool_version": env!("CARGO_PKG_VERSION"),
            "argv": std::env::args().skip(1).collect::<Vec<_>>(),
            "parameters": self.parameters,
            "grids": self.grids,
            "results": self.results,
            "outputs": self.outputs,
            "wall_clock_seconds": self.started.elapsed().as_secs_f64(),
        });
        let path = self.out_dir.join("manifest.json");
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        std::fs::write(&path, text).map_err(|source| CliError::Output { path: path.display().to_string(), source })
    }
}
