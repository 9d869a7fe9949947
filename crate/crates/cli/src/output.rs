//! CSV assembly: a `#`-prefixed header block with the tool version, the
//! full effective configuration and the gate descriptions, then the data
//! rows. Numbers carry 12 significant digits so reruns diff cleanly.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};

use crate::config::RunConfig;

/// 12 significant digits in scientific notation.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.11e}")
    }
}

pub struct CsvDocument {
    lines: Vec<String>,
}

impl CsvDocument {
    pub fn new(subcommand: &str, config: &RunConfig, gates: &[String]) -> Self {
        let mut lines = vec![
            format!("# tracedown v{}", env!("CARGO_PKG_VERSION")),
            format!("# subcommand: {subcommand}"),
        ];
        for (key, value) in config.header_entries() {
            lines.push(format!("# {key} = {value}"));
        }
        for gate in gates {
            lines.push(format!("# gate: {gate}"));
        }
        Self { lines }
    }

    pub fn comment(&mut self, text: &str) {
        self.lines.push(format!("# {text}"));
    }

    pub fn columns(&mut self, names: &[&str]) {
        self.lines.push(names.join(","));
    }

    pub fn row(&mut self, values: &[String]) {
        self.lines.push(values.join(","));
    }

    pub fn render(&self) -> String {
        let mut text = self.lines.join("\n");
        text.push('\n');
        text
    }
}

/// Writes the document to the configured path, or to stdout when no path
/// is set. Returns true when the CSV went to stdout.
pub fn emit(document: &CsvDocument, out: Option<&Path>) -> Result<bool> {
    match out {
        Some(path) => {
            std::fs::write(path, document.render())
                .with_context(|| format!("cannot write {}", path.display()))?;
            Ok(false)
        }
        None => {
            std::io::stdout()
                .write_all(document.render().as_bytes())
                .context("cannot write to stdout")?;
            Ok(true)
        }
    }
}

/// Routes human-readable verdict lines: stderr while the CSV occupies
/// stdout, stdout otherwise.
pub fn emit_verdicts(lines: &[String], csv_on_stdout: bool) {
    for line in lines {
        if csv_on_stdout {
            eprintln!("{line}");
        } else {
            println!("{line}");
        }
    }
}
