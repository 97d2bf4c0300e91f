//! `campana`: counts Campana points of bounded height on the built-in
//! models, computes local densities and the predicted leading constants,
//! and checks measured counts against the predicted law.
//!
//! The binary is a thin shell over the library: it resolves a run
//! configuration, builds the requested model, calls one library entry
//! point, and prints the report. All parallelism lives below; reports are
//! byte-identical whatever the thread count.

mod config;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use campana_core::arith::rational_to_f64;
use campana_core::orbifold::{self, ModelKind, Multiplicity, OrbifoldModel, PlaceSet};
use campana_core::report::{fmt_rational, fmt_sig, JsonObject};
use campana_core::{counting, densities, Rational};
use clap::{Args, Parser, Subcommand};

use crate::config::{OutputFormat, RunConfig};

const AFTER_HELP: &str = "\
Configuration file (--config): plain text `key = value`, one per line,
overridden by flags. Keys: model, m, s_places, grid, p_max, s_values,
format, threads, output. Unknown keys are rejected.

Thread count: --threads, else the config file, else the CAMPANA_THREADS
environment variable, else one worker per logical CPU. Reports never
depend on it.

CSV columns:
  count, verify   T,N,predicted,fitted,rel_err
  sweep           model,m,T,N,predicted,ratio

Exit codes: 0 success, 2 invalid input, 3 tolerance exceeded in verify.";

#[derive(Parser)]
#[command(
    name = "campana",
    version,
    about = "Campana point counts and predicted constants for the built-in models",
    after_help = AFTER_HELP
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonOpts {
    /// Plain-text key = value configuration file applied before flags
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Model name: p3-heisenberg, p2-unipotent, or p1-vector
    #[arg(long)]
    model: Option<String>,

    /// Boundary multiplicity: a positive integer or "infinity"
    #[arg(long)]
    m: Option<String>,

    /// Places where the multiplicity condition is waived, e.g. "inf,2"
    #[arg(long)]
    s_places: Option<String>,

    /// Comma-separated height grid
    #[arg(long, value_delimiter = ',', value_name = "T,...")]
    grid: Option<Vec<f64>>,

    /// Largest prime kept in truncated Euler products
    #[arg(long, value_name = "P")]
    p_max: Option<u64>,

    /// Comma-separated evaluation points for density reports
    #[arg(long = "s", value_delimiter = ',', value_name = "S,...")]
    s_values: Option<Vec<f64>>,

    /// Report format: json or csv
    #[arg(long)]
    format: Option<String>,

    /// Worker thread count (reports do not depend on it)
    #[arg(long)]
    threads: Option<usize>,

    /// Write the report to this file instead of standard output
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

impl CommonOpts {
    /// Defaults, then the config file, then flags; the environment
    /// variable only fills a thread count nothing else set.
    fn resolve(&self) -> Result<RunConfig, String> {
        let mut config = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
                RunConfig::parse(&text)?
            }
            None => RunConfig::default(),
        };
        if let Some(v) = &self.model {
            config.set_model(v)?;
        }
        if let Some(v) = &self.m {
            config.set_m(v)?;
        }
        if let Some(v) = &self.s_places {
            config.set_s_places(v)?;
        }
        if let Some(v) = &self.grid {
            config.set_grid(v.clone())?;
        }
        if let Some(v) = self.p_max {
            config.p_max = v;
        }
        if let Some(v) = &self.s_values {
            config.set_s_values(v.clone())?;
        }
        if let Some(v) = &self.format {
            config.format = OutputFormat::parse(v)?;
        }
        if let Some(v) = self.threads {
            config.set_threads(v)?;
        }
        if let Some(v) = &self.output {
            config.output = Some(v.clone());
        }
        if config.threads.is_none() {
            if let Ok(value) = std::env::var("CAMPANA_THREADS") {
                let n = value.trim().parse().map_err(|_| {
                    format!("CAMPANA_THREADS must be a positive integer, got {value:?}")
                })?;
                config.set_threads(n)?;
            }
        }
        Ok(config)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the predicted growth invariants a and b (and b' when the
    /// refined prediction applies)
    Predict(CommonOpts),
    /// Count points over the height grid and fit the counting law
    Count(CommonOpts),
    /// Truncated Euler product per s value, or one closed-form local
    /// factor with --prime
    Densities {
        #[command(flatten)]
        common: CommonOpts,
        /// Dump the local factor at this prime instead of the product
        #[arg(long)]
        prime: Option<u64>,
        /// With --prime: exact coefficients, no floating evaluation
        #[arg(long)]
        formal: bool,
    },
    /// Predicted leading constant with its truncation tail bound
    Constant(CommonOpts),
    /// Count and fit like `count`, then check the fit against the
    /// tolerances; exit code 3 when a tolerance is exceeded
    Verify {
        #[command(flatten)]
        common: CommonOpts,
        /// Largest accepted |fitted exponent - a|
        #[arg(long, default_value_t = 0.15)]
        tol_slope: f64,
        /// Largest accepted relative error of the fitted constant
        #[arg(long, default_value_t = 0.20)]
        tol_constant: f64,
    },
    /// One count line per (m, T) cell of the grid
    Sweep {
        #[command(flatten)]
        common: CommonOpts,
        /// Multiplicities to sweep, e.g. "1,2,infinity"
        #[arg(long, value_delimiter = ',', default_value = "1,2")]
        m_list: Vec<String>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Predict(common) => {
            let config = prepare(&common)?;
            require_json(&config, "predict")?;
            let (model, places) = instantiate(&config)?;
            let invariants = orbifold::predict_invariants(&model, &places).map_err(stringify)?;
            let mut object = JsonObject::new()
                .number("a", rational_to_f64(&invariants.a_bar))
                .integer("b", invariants.b_bar as i64);
            if let Some(bp) = invariants.b_prime {
                object = object.integer("b_prime", bp as i64);
            }
            emit(&config, object.finish())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Count(common) => {
            let config = prepare(&common)?;
            let (model, places) = instantiate(&config)?;
            let report = counting::verify_asymptotic(&model, &places, &config.grid, config.p_max)
                .map_err(stringify)?;
            let body = match config.format {
                OutputFormat::Json => report.to_json(),
                OutputFormat::Csv => report.to_csv(),
            };
            emit(&config, body)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Densities {
            common,
            prime,
            formal,
        } => {
            let config = prepare(&common)?;
            require_json(&config, "densities")?;
            let (model, _) = instantiate(&config)?;
            let body = if formal || prime.is_some() {
                let p = prime.ok_or_else(|| "--formal requires --prime".to_string())?;
                let factor = densities::local_density_closed(&model, p).map_err(stringify)?;
                JsonObject::new()
                    .string("model", &config.model)
                    .string("m", &config.m)
                    .raw("prime", p.to_string())
                    .integer("shift", factor.shift() as i64)
                    .raw("numerator", rational_array(&factor.numerator_coeffs()))
                    .raw("denominator", rational_array(&factor.denominator_coeffs()))
                    .finish()
            } else {
                let mut lines = Vec::new();
                for &s in &config.s_values {
                    let report =
                        densities::euler_product(&model, s, config.p_max).map_err(stringify)?;
                    lines.push(report.to_json());
                }
                lines.join("\n")
            };
            emit(&config, body)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Constant(common) => {
            let config = prepare(&common)?;
            require_json(&config, "constant")?;
            let (model, places) = instantiate(&config)?;
            let constant =
                densities::leading_constant(&model, &places, config.p_max).map_err(stringify)?;
            emit(&config, constant.to_json())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            common,
            tol_slope,
            tol_constant,
        } => {
            let config = prepare(&common)?;
            let (model, places) = instantiate(&config)?;
            let report = counting::verify_asymptotic(&model, &places, &config.grid, config.p_max)
                .map_err(stringify)?;
            let (json, pass) = report.to_json_checked(tol_slope, tol_constant);
            let body = match config.format {
                OutputFormat::Json => json,
                OutputFormat::Csv => report.to_csv(),
            };
            emit(&config, body)?;
            Ok(if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            })
        }
        Command::Sweep { common, m_list } => {
            let config = prepare(&common)?;
            let kind = ModelKind::from_str(&config.model).map_err(stringify)?;
            let places = PlaceSet::parse(&config.s_places).map_err(stringify)?;
            let mut lines = Vec::new();
            if config.format == OutputFormat::Csv {
                lines.push("model,m,T,N,predicted,ratio".to_string());
            }
            for m_raw in &m_list {
                let m = Multiplicity::from_str(m_raw).map_err(stringify)?;
                let model = OrbifoldModel::new(kind, m, None).map_err(stringify)?;
                let constant = densities::leading_constant(&model, &places, config.p_max)
                    .map_err(stringify)?;
                for &t in &config.grid {
                    let n = counting::count_fast(&model, t, &places);
                    let predicted = constant.tauberian
                        * t.powf(constant.a_bar)
                        * t.ln().powi(constant.log_power as i32 - 1);
                    let line = match config.format {
                        OutputFormat::Json => JsonObject::new()
                            .string("model", model.name())
                            .string("m", &m.to_string())
                            .string("s_places", &config.s_places)
                            .number("T", t)
                            .raw("N", n.to_string())
                            .number("predicted", predicted)
                            .number("ratio", n as f64 / predicted)
                            .finish(),
                        OutputFormat::Csv => format!(
                            "{},{},{},{},{},{}",
                            model.name(),
                            m,
                            fmt_sig(t, 12),
                            n,
                            fmt_sig(predicted, 12),
                            fmt_sig(n as f64 / predicted, 12)
                        ),
                    };
                    lines.push(line);
                }
            }
            emit(&config, lines.join("\n"))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn prepare(common: &CommonOpts) -> Result<RunConfig, String> {
    let config = common.resolve()?;
    if let Some(n) = config.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| format!("thread pool: {e}"))?;
    }
    Ok(config)
}

fn stringify(e: campana_core::Error) -> String {
    e.to_string()
}

fn instantiate(config: &RunConfig) -> Result<(OrbifoldModel, PlaceSet), String> {
    let kind = ModelKind::from_str(&config.model).map_err(stringify)?;
    let m = Multiplicity::from_str(&config.m).map_err(stringify)?;
    let model = OrbifoldModel::new(kind, m, None).map_err(stringify)?;
    let places = PlaceSet::parse(&config.s_places).map_err(stringify)?;
    Ok((model, places))
}

fn require_json(config: &RunConfig, subcommand: &str) -> Result<(), String> {
    if config.format == OutputFormat::Csv {
        return Err(format!(
            "csv output is not defined for {subcommand}; use --format json"
        ));
    }
    Ok(())
}

fn rational_array(coeffs: &[Rational]) -> String {
    let items: Vec<String> = coeffs
        .iter()
        .map(|c| format!("\"{}\"", fmt_rational(c)))
        .collect();
    format!("[{}]", items.join(", "))
}

/// Writes the report, newline terminated, to the configured destination.
fn emit(config: &RunConfig, body: String) -> Result<(), String> {
    let mut body = body;
    if !body.ends_with('\n') {
        body.push('\n');
    }
    match &config.output {
        Some(path) => {
            std::fs::write(path, body).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => {
            print!("{body}");
            Ok(())
        }
    }
}
