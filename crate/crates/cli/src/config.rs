//! Argument and config-file handling.
//!
//! A config file is flat `key = value` text, one pair per line, `#` comments.
//! Keys are the long option names. File values are injected as trailing
//! flags, so anything given explicitly on the command line wins.

use std::fs;

use clap::{Parser, Subcommand, ValueEnum};

/// Long option names accepted in a config file.
const KNOWN_KEYS: &[&str] = &[
    "dim",
    "grid",
    "length",
    "seed",
    "output-dir",
    "threads",
    "p",
    "q",
    "s",
    "gamma",
    "wiener",
    "window-width",
    "input",
    "out",
    "u0",
    "u1",
    "horizon",
    "nodes",
    "nonlinearity",
    "lambda-re",
    "lambda-im",
    "power-k",
    "tol",
    "max-iter",
    "family-size",
    "lambda-max",
    "t-values",
    "times",
];

#[derive(Debug, Parser)]
#[command(
    name = "platelab",
    version,
    about = "Spectral runs for the vibrating plate equation"
)]
pub struct Cli {
    /// Spatial dimension d (1, 2 or 3).
    #[arg(long, global = true, default_value_t = 1)]
    pub dim: usize,

    /// Grid points per axis N (power of two).
    #[arg(long, global = true, default_value_t = 256)]
    pub grid: usize,

    /// Torus side length L.
    #[arg(long, global = true, default_value_t = 32.0)]
    pub length: f64,

    /// Seed for every randomized family.
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,

    /// Directory for manifests, fields, CSV reports.
    #[arg(long, global = true, default_value = ".")]
    pub output_dir: String,

    /// Flat key = value config file; explicit flags override it.
    #[arg(long, global = true)]
    pub config: Option<String>,

    /// Worker threads (PLATELAB_THREADS is honored when unset).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Inner Lebesgue exponent p (number or 'inf').
    #[arg(long, global = true, default_value = "2")]
    pub p: String,

    /// Outer Lebesgue exponent q (number or 'inf').
    #[arg(long, global = true, default_value = "2")]
    pub q: String,

    /// Frequency weight exponent s.
    #[arg(long, global = true, default_value_t = 0.0)]
    pub s: f64,

    /// Position weight exponent γ (Wiener amalgam norms only).
    #[arg(long, global = true, default_value_t = 0.0)]
    pub gamma: f64,

    /// Evaluate the frequency-first (Wiener amalgam) norm instead of the
    /// modulation norm.
    #[arg(long, global = true, default_value_t = false)]
    pub wiener: bool,

    /// Gaussian analysis window width.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub window_width: f64,

    /// Input VPFIELD file (norm, stft).
    #[arg(long, global = true)]
    pub input: Option<String>,

    /// Output CSV name for stft (under --output-dir).
    #[arg(long, global = true, default_value = "stft.csv")]
    pub out: String,

    /// Initial displacement u0 as a VPFIELD file.
    #[arg(long, global = true)]
    pub u0: Option<String>,

    /// Initial velocity u1 as a VPFIELD file.
    #[arg(long, global = true)]
    pub u1: Option<String>,

    /// Time horizon T.
    #[arg(long, global = true, default_value_t = 0.1)]
    pub horizon: f64,

    /// Number of time nodes M (uniform grid on [0, T]).
    #[arg(long, global = true, default_value_t = 65)]
    pub nodes: usize,

    /// Nonlinearity for solve: zero | powerlaw.
    #[arg(long, global = true, default_value = "zero")]
    pub nonlinearity: String,

    /// Re λ of the power-law coefficient.
    #[arg(long, global = true, default_value_t = 0.0)]
    pub lambda_re: f64,

    /// Im λ of the power-law coefficient.
    #[arg(long, global = true, default_value_t = 0.0)]
    pub lambda_im: f64,

    /// Power-law index k in λ|u|^{2k}u.
    #[arg(long, global = true, default_value_t = 1)]
    pub power_k: u32,

    /// Picard convergence tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,

    /// Picard iteration cap.
    #[arg(long, global = true, default_value_t = 50)]
    pub max_iter: usize,

    /// Number of random family members per experiment.
    #[arg(long, global = true, default_value_t = 8)]
    pub family_size: usize,

    /// Top of the dilation ladder {1, 2, 4, …, λ_max}.
    #[arg(long, global = true, default_value_t = 64.0)]
    pub lambda_max: f64,

    /// Chirp time ladder, comma-separated.
    #[arg(long, global = true, default_value = "1,4,16,64")]
    pub t_values: String,

    /// Growth-study times, comma-separated, in (0, 10].
    #[arg(long, global = true, default_value = "0.1,0.2,0.5,1,2,5,10")]
    pub times: String,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Linear flow of (u0, u1) over the time grid.
    Propagate,
    /// Picard solve of the nonlinear problem over the time grid.
    Solve,
    /// One mixed norm of an input field.
    Norm,
    /// |V_g f| of an input field as CSV.
    Stft,
    /// A scripted study with a Consistent/Inconsistent verdict.
    Experiment {
        #[arg(value_enum)]
        name: ExperimentName,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExperimentName {
    Multiplier,
    Dilation,
    Growth,
    Product,
    Chirp,
}

impl ExperimentName {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentName::Multiplier => "multiplier",
            ExperimentName::Dilation => "dilation",
            ExperimentName::Growth => "growth",
            ExperimentName::Product => "product",
            ExperimentName::Chirp => "chirp",
        }
    }
}

/// Splices config-file values into argv as trailing flags.
pub fn resolve_argv(argv: Vec<String>) -> Result<Vec<String>, String> {
    let Some(path) = find_config_path(&argv) else {
        return Ok(argv);
    };
    let text = fs::read_to_string(&path)
        .map_err(|e| format!("cannot read config file {path}: {e}"))?;
    let mut augmented = argv.clone();
    for (line_no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(format!(
                "{path}:{}: expected 'key = value', got '{line}'",
                line_no + 1
            ));
        };
        let key = key.trim();
        let value = value.trim();
        if !KNOWN_KEYS.contains(&key) {
            return Err(format!(
                "{path}:{}: unknown key '{key}'",
                line_no + 1
            ));
        }
        if flag_present(&argv, key) {
            continue; // command line wins
        }
        if key == "wiener" {
            match value {
                "true" => augmented.push("--wiener".to_string()),
                "false" => {}
                other => {
                    return Err(format!(
                        "{path}:{}: wiener must be true or false, got '{other}'",
                        line_no + 1
                    ))
                }
            }
        } else {
            augmented.push(format!("--{key}"));
            augmented.push(value.to_string());
        }
    }
    Ok(augmented)
}

fn find_config_path(argv: &[String]) -> Option<String> {
    let mut it = argv.iter();
    while let Some(token) = it.next() {
        if token == "--config" {
            return it.next().cloned();
        }
        if let Some(rest) = token.strip_prefix("--config=") {
            return Some(rest.to_string());
        }
    }
    None
}

fn flag_present(argv: &[String], key: &str) -> bool {
    let flag = format!("--{key}");
    let prefix = format!("--{key}=");
    argv.iter().any(|t| t == &flag || t.starts_with(&prefix))
}

pub fn parse(argv: Vec<String>) -> Result<Cli, clap::Error> {
    Cli::try_parse_from(argv)
}
