//! Result files. Every file names the manifest of its run; all of them read back
//! into the same values that were written.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{io_err, CliError, CliResult};

pub const MANIFEST: &str = "manifest.json";
pub const RESULTS_JSON: &str = "results.json";
pub const RESULTS_CSV: &str = "results.csv";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Config,
    pub code_version: String,
    pub seed: u64,
    pub started: String,
    pub finished: String,
    pub dry_run: bool,
    pub outputs: Vec<String>,
}

pub fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

/// Output directory of one run. Writes go through here so the manifest lists them.
pub struct RunDir {
    pub root: PathBuf,
    outputs: Vec<String>,
}

impl RunDir {
    /// Create `root`; refuses a directory that already holds a manifest.
    pub fn create(root: &Path) -> CliResult<Self> {
        std::fs::create_dir_all(root).map_err(|e| io_err(root, e))?;
        if root.join(MANIFEST).exists() {
            return Err(CliError::Config(format!("{} already holds a manifest; choose a fresh --out", root.display())));
        }
        Ok(Self { root: root.to_path_buf(), outputs: Vec::new() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> CliResult<PathBuf> {
        let p = self.path(name);
        std::fs::write(&p, text).map_err(|e| io_err(&p, e))?;
        self.outputs.push(name.to_string());
        Ok(p)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<PathBuf> {
        let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Run(e.to_string()))?;
        self.write_text(name, &(text + "\n"))
    }

    /// CSV with a leading `# manifest: ...` comment line.
    pub fn write_csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> CliResult<PathBuf> {
        let p = self.path(name);
        let mut f = File::create(&p).map_err(|e| io_err(&p, e))?;
        writeln!(f, "# manifest: {MANIFEST}").map_err(|e| io_err(&p, e))?;
        let mut w = csv::Writer::from_writer(f);
        for r in rows {
            w.serialize(r).map_err(|e| io_err(&p, e))?;
        }
        w.flush().map_err(|e| io_err(&p, e))?;
        self.outputs.push(name.to_string());
        Ok(p)
    }

    /// Write the manifest last; it is never rewritten.
    pub fn finish(self, command: &str, config: &Config, started: String, dry_run: bool) -> CliResult<RunManifest> {
        let m = RunManifest {
            command: command.to_string(),
            config: config.clone(),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            seed: config.seed,
            started,
            finished: now(),
            dry_run,
            outputs: self.outputs,
        };
        let p = self.root.join(MANIFEST);
        let text = serde_json::to_string_pretty(&m).map_err(|e| CliError::Run(e.to_string()))?;
        let mut f = File::options().write(true).create_new(true).open(&p).map_err(|e| io_err(&p, e))?;
        f.write_all((text + "\n").as_bytes()).map_err(|e| io_err(&p, e))?;
        Ok(m)
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let f = File::open(path).map_err(|e| io_err(path, e))?;
    serde_json::from_reader(BufReader::new(f)).map_err(|e| io_err(path, e))
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> CliResult<Vec<T>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path).map_err(|e| io_err(path, e))?;
    r.deserialize().collect::<Result<Vec<T>, _>>().map_err(|e| io_err(path, e))
}

// ------------------------------------------------------------------ calibrate

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRow {
    pub gate: String,
    pub program: String,
    pub worst_fidelity: f64,
    pub screened: usize,
    pub simulated: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputRow {
    pub gate: String,
    pub input: String,
    pub fidelity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResults {
    pub manifest: String,
    pub table: String,
    pub gates: Vec<CalibrationRow>,
    pub inputs: Vec<InputRow>,
}

// ------------------------------------------------------------------ rb

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RbRow {
    pub squeezing_db: f64,
    pub depth: usize,
    pub mean_fidelity: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub fit_fidelity: f64,
    pub mean_purity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitRow {
    pub squeezing_db: f64,
    pub a: f64,
    pub p: f64,
    pub b: f64,
    pub r: f64,
    pub sigma_r: f64,
    pub free_b: Option<f64>,
    pub free_b_sigma: Option<f64>,
    pub r_low: f64,
    pub r_high: f64,
    pub r_mean: f64,
    /// `(r - r_mean) / sigma_r`.
    pub normalized_residual: f64,
    pub flag: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub squeezing_db: f64,
    pub r_low: f64,
    pub r_high: f64,
    pub r_mean: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub squeezing_db: f64,
    pub depth: usize,
    pub sequence: usize,
    pub fidelity: f64,
    pub purity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RbResults {
    pub manifest: String,
    pub points: Vec<RbRow>,
    pub fits: Vec<FitRow>,
    pub curve: Vec<CurveRow>,
    pub samples: Vec<SampleRow>,
}

// ------------------------------------------------------------------ grover

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroverRow {
    /// `a`, `b`, `c` or `pooled`.
    pub oracle: String,
    pub squeezing_db: f64,
    pub shots: usize,
    pub successes: usize,
    pub success_prob: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub analytic_estimate: f64,
    pub random_line: f64,
    pub classical_line: f64,
    /// Shot-weighted for the pooled row.
    pub depth: f64,
    pub bell_pairs: f64,
    pub magic_pairs: usize,
    pub modes: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShotRow {
    pub oracle: String,
    pub squeezing_db: f64,
    pub shot: usize,
    pub outcome: String,
    pub gadgets: usize,
    pub x_syndromes: usize,
    pub z_syndromes: usize,
    pub discarded_weight: f64,
    pub success: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroverResults {
    pub manifest: String,
    pub rows: Vec<GroverRow>,
    pub shots: Vec<ShotRow>,
}

// ------------------------------------------------------------------ dry runs and demo

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleRow {
    pub label: String,
    pub width: usize,
    pub depth: usize,
    pub bell_pairs: usize,
    pub magic_pairs: usize,
    pub modes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemoResults {
    pub manifest: String,
    pub squeezing_db: f64,
    pub input: String,
    pub program: String,
    pub m_a: f64,
    pub m_b: f64,
    pub s1: f64,
    pub s2: f64,
    pub x_bit: u8,
    pub z_bit: u8,
    pub fidelity_before: f64,
    pub fidelity_after: f64,
}
