//! Output formatting and atomic writes.
//!
//! Every float is printed with 17 significant digits so any consumer can
//! reconstruct the exact f64; identical runs produce byte-identical files.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{CliError, CommonOpts, OutputFormat};

/// 17 significant digits: 1 leading + 16 after the point.
pub fn format_float(value: f64) -> String {
    format!("{value:.16e}")
}

struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W: Write + ?Sized>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

/// Serializes to JSON with the 17-significant-digit float format and a
/// trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut out = Vec::new();
    let mut serializer = serde_json::Serializer::with_formatter(&mut out, SciFormatter);
    value
        .serialize(&mut serializer)
        .map_err(|e| CliError::Other(e.into()))?;
    out.push(b'\n');
    String::from_utf8(out).map_err(|e| CliError::Other(e.into()))
}

/// Simple CSV assembly; all rows must match the header width.
pub struct Csv {
    columns: usize,
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self {
            columns: header.len(),
            text: format!("{}\n", header.join(",")),
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        debug_assert_eq!(cells.len(), self.columns);
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn finish(self) -> String {
        self.text
    }
}

/// Writes to `--out` via temp file + rename, or to stdout.
pub fn write_output(opts: &CommonOpts, content: &str) -> Result<(), CliError> {
    match &opts.out {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(path) => write_atomically(path, content),
    }
}

fn write_atomically(path: &Path, content: &str) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(dir) => tempfile::NamedTempFile::new_in(dir),
        None => tempfile::NamedTempFile::new_in("."),
    }
    .map_err(|e| CliError::Other(e.into()))?;
    tmp.write_all(content.as_bytes())
        .map_err(|e| CliError::Other(e.into()))?;
    tmp.flush().map_err(|e| CliError::Other(e.into()))?;
    tmp.persist(path)
        .map_err(|e| CliError::Other(e.error.into()))?;
    Ok(())
}

pub fn chosen_format(opts: &CommonOpts, default: OutputFormat) -> OutputFormat {
    opts.format.unwrap_or(default)
}

/// One hardness computation or bound, as emitted by `phard` commands.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PhardReport {
    pub command: String,
    pub method: String,
    pub p_hard: Option<f64>,
    pub lower_bound: Option<f64>,
    pub std_error: Option<f64>,
    pub seed: Option<u64>,
    pub samples: Option<u64>,
    pub rng: Option<String>,
    pub n: usize,
    pub n_hard: usize,
    pub epsilon: Option<f64>,
    /// Whether the reported value (estimate or bound) exceeds epsilon.
    pub exceeds_epsilon: Option<bool>,
    /// Set when n_hard > n made the bounded event empty.
    pub empty_event: Option<bool>,
    pub disclaimer: String,
}

impl PhardReport {
    pub fn render(&self, format: OutputFormat) -> Result<String, CliError> {
        match format {
            OutputFormat::Json => to_json_string(self),
            OutputFormat::Csv => {
                let mut csv = Csv::new(&[
                    "command",
                    "method",
                    "p_hard",
                    "lower_bound",
                    "std_error",
                    "seed",
                    "samples",
                    "rng",
                    "n",
                    "n_hard",
                    "epsilon",
                    "exceeds_epsilon",
                    "empty_event",
                    "disclaimer",
                ]);
                csv.row(&[
                    self.command.clone(),
                    self.method.clone(),
                    optional_float(self.p_hard),
                    optional_float(self.lower_bound),
                    optional_float(self.std_error),
                    optional_display(self.seed),
                    optional_display(self.samples),
                    self.rng.clone().unwrap_or_default(),
                    self.n.to_string(),
                    self.n_hard.to_string(),
                    optional_float(self.epsilon),
                    optional_display(self.exceeds_epsilon),
                    optional_display(self.empty_event),
                    self.disclaimer.clone(),
                ]);
                Ok(csv.finish())
            }
        }
    }
}

/// A photon-count distribution, as emitted by `simulate` commands.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DistributionReport {
    pub command: String,
    pub modes: usize,
    pub photons: usize,
    pub counts: Vec<Vec<u32>>,
    pub probabilities: Vec<f64>,
    pub oracle_max_abs_deviation: Option<f64>,
}

impl DistributionReport {
    pub fn from_distribution(
        command: &str,
        photons: usize,
        dist: &specmode::OutputDistribution,
    ) -> Self {
        let counts: Vec<Vec<u32>> = dist
            .configurations()
            .iter()
            .map(|c| c.counts().to_vec())
            .collect();
        Self {
            command: command.to_string(),
            modes: counts.first().map_or(0, Vec::len),
            photons,
            counts,
            probabilities: dist.probabilities().to_vec(),
            oracle_max_abs_deviation: None,
        }
    }

    pub fn render(&self, format: OutputFormat) -> Result<String, CliError> {
        match format {
            OutputFormat::Json => to_json_string(self),
            OutputFormat::Csv => {
                let headers: Vec<String> = (1..=self.modes)
                    .map(|i| format!("n{i}"))
                    .chain(std::iter::once("probability".to_string()))
                    .collect();
                let header_refs: Vec<&str> = headers.iter().map(String::as_str).collect();
                let mut csv = Csv::new(&header_refs);
                for (counts, p) in self.counts.iter().zip(&self.probabilities) {
                    let mut cells: Vec<String> = counts.iter().map(u32::to_string).collect();
                    cells.push(format_float(*p));
                    csv.row(&cells);
                }
                Ok(csv.finish())
            }
        }
    }
}

/// Two-photon beamsplitter coincidence check.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct HomReport {
    pub command: String,
    pub fidelity: f64,
    pub coincidence_probability: f64,
    /// (1 - F) / 2.
    pub reference_value: f64,
}

impl HomReport {
    pub fn render(&self, format: OutputFormat) -> Result<String, CliError> {
        match format {
            OutputFormat::Json => to_json_string(self),
            OutputFormat::Csv => {
                let mut csv = Csv::new(&[
                    "command",
                    "fidelity",
                    "coincidence_probability",
                    "reference_value",
                ]);
                csv.row(&[
                    self.command.clone(),
                    format_float(self.fidelity),
                    format_float(self.coincidence_probability),
                    format_float(self.reference_value),
                ]);
                Ok(csv.finish())
            }
        }
    }
}

fn optional_float(value: Option<f64>) -> String {
    value.map(format_float).unwrap_or_default()
}

fn optional_display<T: ToString>(value: Option<T>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}
