//! Command line grammar and the run configuration every invocation echoes.

use std::fmt;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::Signed;
use spectra_core::arith::parse_rational;

/// A malformed request: bad flags, bad grammar, bad file keys. Exits 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OutputFormat::Csv => write!(f, "csv"),
            OutputFormat::Json => write!(f, "json"),
        }
    }
}

/// The reproducibility contract: identical RunConfig and inputs give
/// byte-identical output. Defaults < config file < explicit flags.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub tol: BigRational,
    pub level: usize,
    pub seed: u64,
    pub format: OutputFormat,
    pub budget: u64,
    pub exact: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            tol: parse_rational("1e-9").expect("static literal"),
            level: 6,
            seed: 922_337,
            format: OutputFormat::Json,
            budget: 10_000_000,
            exact: false,
        }
    }
}

impl RunConfig {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "tol": self.tol.to_string(),
            "level": self.level,
            "seed": self.seed,
            "format": self.format.to_string(),
            "budget": self.budget,
            "exact": self.exact,
        })
    }

    /// One-line `key=value` rendering used as a CSV comment header.
    pub fn comment_line(&self) -> String {
        format!(
            "# tol={} level={} seed={} format={} budget={} exact={}",
            self.tol, self.level, self.seed, self.format, self.budget, self.exact
        )
    }

    fn set(&mut self, key: &str, value: &str) -> anyhow::Result<()> {
        match key {
            "tol" => {
                let t = parse_rational(value).map_err(|e| usage(e.to_string()))?;
                if !t.is_positive() {
                    return Err(usage(format!("tol must be positive, got {value}")));
                }
                self.tol = t;
            }
            "level" => {
                self.level = value
                    .parse()
                    .map_err(|_| usage(format!("level must be a positive integer, got {value}")))?;
            }
            "seed" => {
                self.seed = value
                    .parse()
                    .map_err(|_| usage(format!("seed must be a 64-bit integer, got {value}")))?;
            }
            "format" => {
                self.format = match value {
                    "csv" => OutputFormat::Csv,
                    "json" => OutputFormat::Json,
                    _ => return Err(usage(format!("format must be csv or json, got {value}"))),
                };
            }
            "budget" => {
                self.budget = value
                    .parse()
                    .map_err(|_| usage(format!("budget must be a positive integer, got {value}")))?;
            }
            "exact" => {
                self.exact = match value {
                    "true" | "1" | "yes" => true,
                    "false" | "0" | "no" => false,
                    _ => return Err(usage(format!("exact must be true or false, got {value}"))),
                };
            }
            _ => return Err(usage(format!("unknown config key {key:?}"))),
        }
        if self.level == 0 {
            return Err(usage("level must be at least 1"));
        }
        if self.budget == 0 {
            return Err(usage("budget must be at least 1"));
        }
        Ok(())
    }

    /// Apply a `key=value` config file (comments with `#`, blank lines ok).
    pub fn apply_file(&mut self, path: &PathBuf) -> anyhow::Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                usage(format!(
                    "config line {} is not key=value: {raw:?}",
                    lineno + 1
                ))
            })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "spectra",
    version,
    about = "Markov and Lagrange spectra, Cantor set dimensions, and counting lemmas in exact arithmetic",
    disable_help_subcommand = true
)]
pub struct Cli {
    /// Enclosure tolerance (rational, decimal, or scientific: 1e-9, 1/512)
    #[arg(long, global = true)]
    pub tol: Option<String>,

    /// Construction level for covers and dimension brackets
    #[arg(long, global = true)]
    pub level: Option<usize>,

    /// Seed for every randomized computation
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output format
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,

    /// Largest sample or pair count the invocation may spend
    #[arg(long, global = true)]
    pub budget: Option<u64>,

    /// Also print exact rational endpoints
    #[arg(long, global = true)]
    pub exact: bool,

    /// Optional key=value config file applied before flags
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

impl Cli {
    /// Resolve the effective RunConfig: defaults, then file, then flags.
    pub fn run_config(&self) -> anyhow::Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        if let Some(t) = &self.tol {
            cfg.set("tol", t)?;
        }
        if let Some(l) = self.level {
            cfg.set("level", &l.to_string())?;
        }
        if let Some(s) = self.seed {
            cfg.set("seed", &s.to_string())?;
        }
        if let Some(f) = self.format {
            cfg.format = f;
        }
        if let Some(b) = self.budget {
            cfg.set("budget", &b.to_string())?;
        }
        if self.exact {
            cfg.exact = true;
        }
        Ok(cfg)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lagrange value of an eventually periodic continued fraction
    Lagrange {
        /// Expansion in the grammar [a0;d1,d2,...,(p1,...,pk)]
        cf: String,
    },
    /// Markov value of a bi-infinite periodic digit word
    MarkovWord {
        /// Digits, comma separated ("2,1,1") or contiguous ("211")
        word: String,
    },
    /// Radius-truncated Markov value of an indefinite binary quadratic form
    Form {
        /// Coefficients a,b,c of a x^2 + b xy + c y^2
        coefficients: String,
        /// Lattice search radius
        #[arg(long, default_value_t = 50)]
        radius: u64,
    },
    /// The Freiman constant and the height mu = log(F/2)
    Constants,
    /// Dimension bracket of a regular Cantor set family
    Dim {
        /// middle_third, gauss:N, or affine:r1,r2,...
        family: String,
    },
    /// Minkowski sum cover of two families, optionally swept over a target
    Sum {
        family_a: String,
        family_b: String,
        /// Target interval lo,hi to verify coverage against
        #[arg(long)]
        check: Option<String>,
        /// Largest tolerated uncovered jump inside the target
        #[arg(long, default_value = "0")]
        slack: String,
    },
    /// Periodic-orbit spectrum of a potential over a subshift
    Spectrum {
        /// full:N, golden_mean, allow:N:a-b,..., or forbid:N:a-b,...
        sft: String,
        /// cfsum:M or cfsum:M:d1,d2,... (digit per symbol)
        potential: String,
        #[arg(long, default_value_t = 5)]
        max_period: usize,
        /// Gap threshold for the run-detection heuristic
        #[arg(long)]
        detect: Option<String>,
    },
    /// Operations on a horseshoe described by a TOML file
    Horseshoe {
        file: PathBuf,
        #[command(subcommand)]
        action: HorseshoeAction,
    },
    /// Counting lemma instruments
    Lemma {
        #[command(subcommand)]
        lemma: LemmaCommand,
    },
    /// Run the acceptance suite and print one pass/fail line per criterion
    Accept,
}

#[derive(Debug, Subcommand)]
pub enum HorseshoeAction {
    /// Dimension estimate (stable + unstable brackets)
    Dim,
    /// Periodic-orbit spectrum of the digit functional
    Spectrum {
        #[arg(long, default_value_t = 5)]
        max_period: usize,
        /// Locality of the truncated two-sided digit functional
        #[arg(long, default_value_t = 8)]
        locality: usize,
        /// Gap threshold for the run-detection heuristic
        #[arg(long)]
        detect: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum LemmaCommand {
    /// Trace lower bounds tr(A^k) >= (n/2)^k on a seeded dense matrix
    Trace {
        #[arg(long)]
        n: usize,
        /// Number of zero entries to scatter (at most n^2/100)
        #[arg(long, default_value_t = 0)]
        zeros: usize,
        #[arg(long, default_value_t = 2)]
        k_min: u32,
        #[arg(long, default_value_t = 5)]
        k_max: u32,
    },
    /// Dense-core extraction with power-entry checks
    Core {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        zeros: usize,
        #[arg(long, default_value_t = 4)]
        k_max: u32,
        /// Sampled core pairs per power beyond the exhaustive k = 2 pass
        #[arg(long, default_value_t = 1000)]
        samples: u64,
    },
    /// Random-injection probability trials against the analytic bound
    Inject {
        #[arg(long)]
        n: u64,
        /// Exponent alpha in (1/4, 1/2), e.g. 2/5
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
    },
    /// Monte Carlo census of prohibited word-pair transitions
    Census {
        /// Alphabet size of the underlying full shift
        #[arg(long)]
        alphabet: usize,
        /// Word length (words are all level-`block` words, in lex order)
        #[arg(long)]
        block: usize,
        /// Indices of the disturbing words (default: every word)
        #[arg(long)]
        disturb: Option<String>,
        #[arg(long, default_value_t = 10000)]
        samples: u64,
        /// Pass when estimate <= scale * ln(N)/sqrt(N)
        #[arg(long, default_value = "1")]
        scale: String,
    },
}
