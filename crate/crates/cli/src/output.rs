use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::CliError;

/// A CSV file whose leading `#` lines record how it was produced.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(command: &str, hash: &str, seed: Option<u64>, params: &[(&str, String)]) -> Self {
        let mut text = format!("# pisot-ifs {command}\n# config_hash={hash}\n");
        if let Some(s) = seed {
            let _ = writeln!(text, "# seed={s}");
        }
        for (k, v) in params {
            let _ = writeln!(text, "# {k}={v}");
        }
        Self { text }
    }

    pub fn comment(&mut self, line: &str) {
        let _ = writeln!(self.text, "# {line}");
    }

    pub fn header(&mut self, columns: &[&str]) {
        self.text.push_str(&columns.join(","));
        self.text.push('\n');
    }

    pub fn row(&mut self, fields: &[String]) {
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        write_file(path, self.text.as_bytes())
    }
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, bytes)?;
    Ok(())
}

pub fn sha256_file(path: &Path) -> Result<String, CliError> {
    Ok(hex::encode(Sha256::digest(std::fs::read(path)?)))
}
