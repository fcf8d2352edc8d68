use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Search,
    Perturb,
}

/// Everything a run depends on. Missing keys take the defaults below;
/// unknown keys are an error.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Constant term first, leading 1 last.
    pub polynomial: String,
    pub precision_digits: u32,
    pub strategy: Strategy,
    /// Perturbation budget as a fraction of the witness gap.
    pub eps_fraction: f64,
    pub tail_tol: f64,
    pub seed: u64,
    /// Digits per Monte Carlo sample.
    pub depth: usize,
    pub samples: usize,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            polynomial: "1,10,1,1".into(),
            precision_digits: 50,
            strategy: Strategy::Search,
            eps_fraction: 0.25,
            tail_tol: 1e-12,
            seed: 0,
            depth: 40,
            samples: 100_000,
            output_dir: PathBuf::from("out"),
        }
    }
}

/// The fields that determine outputs. The seed is left out: seeded outputs
/// carry it in their file names so that every seed shares one `ifs.json`.
#[derive(Serialize)]
struct Keyed<'a> {
    polynomial: &'a str,
    precision_digits: u32,
    strategy: Strategy,
    eps_fraction: f64,
    tail_tol: f64,
    depth: usize,
    samples: usize,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| CliError::Usage(format!("bad config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Usage(m));
        if let Err(e) = self.polynomial.parse::<pisot_ifs::algebraic::MonicIntPolynomial>() {
            return bad(format!("polynomial: {e}"));
        }
        if !(10..=280).contains(&self.precision_digits) {
            return bad(format!("precision_digits must be in 10..=280, got {}", self.precision_digits));
        }
        if !(self.eps_fraction > 0.0 && self.eps_fraction < 1.0) {
            return bad(format!("eps_fraction must be in (0, 1), got {}", self.eps_fraction));
        }
        if !(self.tail_tol > 0.0 && self.tail_tol <= 1e-3) {
            return bad(format!("tail_tol must be in (0, 1e-3], got {}", self.tail_tol));
        }
        if !(1..=4096).contains(&self.depth) {
            return bad(format!("depth must be in 1..=4096, got {}", self.depth));
        }
        if !(1..=100_000_000).contains(&self.samples) {
            return bad(format!("samples must be in 1..=1e8, got {}", self.samples));
        }
        Ok(())
    }

    /// First 16 hex digits of the SHA-256 of the keyed fields as JSON.
    pub fn hash(&self) -> String {
        let keyed = Keyed {
            polynomial: &self.polynomial,
            precision_digits: self.precision_digits,
            strategy: self.strategy,
            eps_fraction: self.eps_fraction,
            tail_tol: self.tail_tol,
            depth: self.depth,
            samples: self.samples,
        };
        let json = serde_json::to_string(&keyed).expect("plain struct serializes");
        hex::encode(&Sha256::digest(json.as_bytes())[..8])
    }

    pub fn run_dir(&self) -> PathBuf {
        self.output_dir.join(self.hash())
    }
}
