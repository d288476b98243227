//! Deterministic CSV and JSON writers.
//!
//! Every data file starts with `#`-prefixed provenance lines (tool name,
//! full physics/statistics configuration, master seed) followed by an
//! RFC-4180-style header row. Floats use Rust's shortest round-trip
//! formatting with a `.` decimal separator, so identical inputs produce
//! identical bytes.

use std::fs;
use std::path::PathBuf;

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::CliError;

pub struct OutputDir {
    root: PathBuf,
    provenance: Vec<String>,
}

impl OutputDir {
    pub fn prepare(config: &ExperimentConfig, command: &str) -> Result<Self, CliError> {
        let root = config.output.directory.clone();
        fs::create_dir_all(&root)
            .map_err(|e| CliError::Io(format!("cannot create {}: {e}", root.display())))?;
        let mut provenance = vec![format!("backaction {command} output")];
        provenance.extend(config.provenance_lines());
        let dir = Self { root, provenance };
        // reloadable copy of the exact configuration this output came from
        let echo = dir.path("config_echo.toml");
        fs::write(&echo, config.echo_toml())
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", echo.display())))?;
        Ok(dir)
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write_csv(&self, name: &str, header: &str, rows: &[String]) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        let mut text = String::new();
        for line in &self.provenance {
            text.push_str("# ");
            text.push_str(line);
            text.push('\n');
        }
        text.push_str(header);
        text.push('\n');
        for row in rows {
            text.push_str(row);
            text.push('\n');
        }
        fs::write(&path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&self, name: &str, report: &T) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        let mut text = serde_json::to_string_pretty(report)
            .map_err(|e| CliError::Io(format!("cannot serialize {name}: {e}")))?;
        text.push('\n');
        fs::write(&path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }

    pub fn write_svg(&self, name: &str, svg: &str) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        fs::write(&path, svg)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }
}

/// Quote a CSV field when it contains a separator, quote, or newline.
pub fn csv_field(value: &str) -> String {
    if value.contains([',', '"', '\n']) {
        format!("\"{}\"", value.replace('"', "\"\""))
    } else {
        value.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }
}
