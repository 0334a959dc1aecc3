//! CSV emission with the reproducibility contract all commands share:
//! first a comment line echoing the subcommand and effective settings
//! (seed included), then the header, then rows. Unix line endings and
//! shortest-round-trip float formatting keep equal configurations
//! byte-identical.

use netepi::config::ConfigMap;
use std::io::Write;
use std::path::Path;

pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(subcommand: &str, cfg: &ConfigMap, header: &str) -> Self {
        Self {
            text: format!("# netepi {subcommand} {}\n{header}\n", cfg.echo()),
        }
    }

    pub fn row(&mut self, fields: &str) {
        self.text.push_str(fields);
        self.text.push('\n');
    }

    /// Writes to `out`, or stdout when absent.
    pub fn finish(self, out: Option<&Path>) -> std::io::Result<()> {
        match out {
            Some(path) => std::fs::write(path, self.text),
            None => std::io::stdout().write_all(self.text.as_bytes()),
        }
    }
}
