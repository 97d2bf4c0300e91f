//! Run configuration shared by every subcommand. Sourced from built-in
//! defaults, then an optional plain-text `key = value` file, then command
//! line flags, in that order of precedence. Unknown keys are rejected so
//! a typo cannot silently fall back to a default.

use std::path::PathBuf;

use campana_core::counting::DEFAULT_FIT_GRID;
use campana_core::orbifold::{ModelKind, Multiplicity, PlaceSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Result<Self, String> {
        match s.trim() {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(format!("unknown format {other:?}, expected json or csv")),
        }
    }

    #[cfg(test)]
    pub fn name(self) -> &'static str {
        match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
        }
    }
}

/// All knobs a run can depend on. String-valued fields are stored in
/// canonical spelling so that serializing and re-parsing a config yields
/// the identical value.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub model: String,
    pub m: String,
    pub s_places: String,
    pub grid: Vec<f64>,
    pub p_max: u64,
    pub s_values: Vec<f64>,
    pub format: OutputFormat,
    pub threads: Option<usize>,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: "p3-heisenberg".to_string(),
            m: "2".to_string(),
            s_places: "inf".to_string(),
            grid: DEFAULT_FIT_GRID.to_vec(),
            p_max: 10_000,
            s_values: vec![4.0],
            format: OutputFormat::Json,
            threads: None,
            output: None,
        }
    }
}

impl RunConfig {
    pub fn set_model(&mut self, value: &str) -> Result<(), String> {
        let kind: ModelKind = value.trim().parse().map_err(|e| format!("{e}"))?;
        self.model = kind.name().to_string();
        Ok(())
    }

    pub fn set_m(&mut self, value: &str) -> Result<(), String> {
        let m: Multiplicity = value.trim().parse().map_err(|e| format!("{e}"))?;
        self.m = m.to_string();
        Ok(())
    }

    pub fn set_s_places(&mut self, value: &str) -> Result<(), String> {
        let places = PlaceSet::parse(value).map_err(|e| format!("{e}"))?;
        // Display wraps the set in braces; the config spelling drops them
        self.s_places = places.to_string().trim_matches(['{', '}']).to_string();
        Ok(())
    }

    pub fn set_grid(&mut self, values: Vec<f64>) -> Result<(), String> {
        if values.is_empty() {
            return Err("grid must contain at least one height".to_string());
        }
        if values.iter().any(|t| !t.is_finite() || *t <= 0.0) {
            return Err("grid heights must be positive and finite".to_string());
        }
        self.grid = values;
        Ok(())
    }

    pub fn set_s_values(&mut self, values: Vec<f64>) -> Result<(), String> {
        if values.is_empty() {
            return Err("s_values must contain at least one exponent".to_string());
        }
        if values.iter().any(|s| !s.is_finite()) {
            return Err("s_values must be finite".to_string());
        }
        self.s_values = values;
        Ok(())
    }

    pub fn set_threads(&mut self, n: usize) -> Result<(), String> {
        if n == 0 {
            return Err("threads must be at least 1".to_string());
        }
        self.threads = Some(n);
        Ok(())
    }

    fn apply_line(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "model" => self.set_model(value),
            "m" => self.set_m(value),
            "s_places" => self.set_s_places(value),
            "grid" => self.set_grid(parse_float_list(value, "grid")?),
            "p_max" => {
                self.p_max = value
                    .trim()
                    .parse()
                    .map_err(|_| format!("p_max must be a nonnegative integer, got {value:?}"))?;
                Ok(())
            }
            "s_values" => self.set_s_values(parse_float_list(value, "s_values")?),
            "format" => {
                self.format = OutputFormat::parse(value)?;
                Ok(())
            }
            "threads" => {
                let n = value
                    .trim()
                    .parse()
                    .map_err(|_| format!("threads must be a positive integer, got {value:?}"))?;
                self.set_threads(n)
            }
            "output" => {
                self.output = Some(PathBuf::from(value.trim()));
                Ok(())
            }
            other => Err(format!("unknown config key {other:?}")),
        }
    }

    /// Applies a `key = value` document on top of the current values.
    /// Blank lines and `#` comments are skipped; later keys win.
    pub fn apply_file(&mut self, text: &str) -> Result<(), String> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value, got {line:?}", idx + 1))?;
            self.apply_line(key.trim(), value.trim())
                .map_err(|e| format!("line {}: {e}", idx + 1))?;
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<RunConfig, String> {
        let mut config = RunConfig::default();
        config.apply_file(text)?;
        Ok(config)
    }

    /// Serializes back to the config-file syntax. Parsing the result
    /// reproduces the config exactly; the round trip is pinned by tests.
    #[cfg(test)]
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("model = {}\n", self.model));
        out.push_str(&format!("m = {}\n", self.m));
        out.push_str(&format!("s_places = {}\n", self.s_places));
        out.push_str(&format!("grid = {}\n", fmt_float_list(&self.grid)));
        out.push_str(&format!("p_max = {}\n", self.p_max));
        out.push_str(&format!("s_values = {}\n", fmt_float_list(&self.s_values)));
        out.push_str(&format!("format = {}\n", self.format.name()));
        if let Some(n) = self.threads {
            out.push_str(&format!("threads = {n}\n"));
        }
        if let Some(path) = &self.output {
            out.push_str(&format!("output = {}\n", path.display()));
        }
        out
    }
}

fn parse_float_list(value: &str, key: &str) -> Result<Vec<f64>, String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|part| !part.is_empty())
        .map(|part| {
            part.parse()
                .map_err(|_| format!("{key}: bad number {part:?}"))
        })
        .collect()
}

#[cfg(test)]
fn fmt_float_list(values: &[f64]) -> String {
    values
        .iter()
        .map(|&x| campana_core::report::fmt_sig(x, 12))
        .collect::<Vec<_>>()
        .join(",")
}
