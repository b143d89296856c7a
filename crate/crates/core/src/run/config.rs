use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bspline::GridSpec;
use crate::ci::{StateLabel, DEFAULT_MEMORY_BUDGET};
use crate::error::{Error, Result};

/// Largest orbital angular momentum accepted from a config.
pub const MAX_L: u32 = 12;

/// Output file kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    Svg,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "svg" => Ok(OutputFormat::Svg),
            other => Err(Error::Config(format!("unknown output format `{other}` (csv, json, svg)"))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
            OutputFormat::Svg => "svg",
        })
    }
}

/// Default charges for a critical-charge scan: 2.0 down to 1.05 in steps
/// of 0.05, then 1.02, 1.01, 1.0 and a set of high-Z points.
pub fn default_z_grid() -> Vec<f64> {
    let mut z: Vec<f64> = (0..=19).map(|i| (200 - 5 * i) as f64 / 100.0).collect();
    z.extend([1.02, 1.01, 1.0]);
    z.extend([3.0, 4.0, 5.0, 10.0, 15.0, 25.0, 50.0, 80.0, 100.0]);
    z.sort_by(f64::total_cmp);
    z
}

/// Default box radius: `120/Z` for `Z >= 2`, 300 closer to the critical charge.
pub fn default_box_radius(z: f64) -> f64 {
    if z >= 2.0 {
        120.0 / z
    } else {
        300.0
    }
}

/// Everything a run needs. Optional fields are resolved per charge by
/// [`RunConfig::basis_for`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub z: f64,
    pub state: StateLabel,
    pub l_max: u32,
    pub n_max: u32,
    pub order: usize,
    /// Defaults to `n_max + 5`.
    pub n_splines: Option<usize>,
    /// Defaults to [`default_box_radius`].
    pub r_max: Option<f64>,
    pub grid: GridSpec,
    /// Gauss–Legendre points per interval for the two-electron integrals;
    /// defaults to `order + 5`.
    pub quadrature: Option<usize>,
    pub z_values: Vec<f64>,
    pub scan_states: Vec<StateLabel>,
    /// Axes of a convergence table; empty means `0..=l_max` and
    /// `5, 10, ..., n_max`.
    pub lmax_values: Vec<u32>,
    pub nmax_values: Vec<u32>,
    pub box_escalation: bool,
    pub box_limit: f64,
    pub box_tolerance: f64,
    pub memory_budget: u64,
    pub threads: Option<usize>,
    pub out_dir: PathBuf,
    pub formats: Vec<OutputFormat>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            z: 2.0,
            state: StateLabel::GROUND,
            l_max: 5,
            n_max: 40,
            order: 7,
            n_splines: None,
            r_max: None,
            grid: GridSpec::default(),
            quadrature: None,
            z_values: default_z_grid(),
            scan_states: vec![StateLabel::SINGLET_1S2S, StateLabel::TRIPLET_1S2S],
            lmax_values: Vec::new(),
            nmax_values: Vec::new(),
            box_escalation: true,
            box_limit: 1200.0,
            box_tolerance: 1e-6,
            memory_budget: DEFAULT_MEMORY_BUDGET,
            threads: None,
            out_dir: PathBuf::from("."),
            formats: vec![OutputFormat::Csv],
        }
    }
}

/// Basis parameters with every default filled in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisParams {
    pub z: f64,
    pub l_max: u32,
    pub n_max: u32,
    pub order: usize,
    pub n_splines: usize,
    pub r_max: f64,
    pub grid: GridSpec,
    pub quadrature: usize,
}

impl BasisParams {
    pub fn with_r_max(self, r_max: f64) -> Self {
        BasisParams { r_max, ..self }
    }
}

fn cfg_err(key: &str, value: &str, what: &str) -> Error {
    Error::Config(format!("`{key} = {value}`: {what}"))
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| cfg_err(key, value, "not a valid number"))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| parse_num(key, s))
        .collect()
}

fn parse_optional<T: FromStr>(key: &str, value: &str) -> Result<Option<T>> {
    if value.trim().eq_ignore_ascii_case("auto") {
        Ok(None)
    } else {
        parse_num(key, value).map(Some)
    }
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(cfg_err(key, value, "expected true or false")),
    }
}

impl RunConfig {
    /// Documented config keys, in the order they are echoed.
    pub const KEYS: &'static [&'static str] = &[
        "z",
        "state",
        "lmax",
        "nmax",
        "order",
        "nsplines",
        "rmax",
        "grid",
        "quadrature",
        "zvalues",
        "states",
        "lmax_values",
        "nmax_values",
        "box_escalation",
        "box_limit",
        "box_tolerance",
        "memory_gb",
        "threads",
        "out",
        "format",
    ];

    /// Reads a flat `key = value` file on top of the defaults.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = RunConfig::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`, got `{line}`", ln + 1)))?;
            self.set(k.trim(), v.trim())
                .map_err(|e| Error::Config(format!("line {}: {e}", ln + 1)))?;
        }
        Ok(())
    }

    /// Sets one key. Dashes and underscores are interchangeable.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let k = key.trim().to_ascii_lowercase().replace('-', "_");
        match k.as_str() {
            "z" => self.z = parse_num(key, value)?,
            "state" => self.state = value.parse().map_err(|e: Error| cfg_err(key, value, &e.to_string()))?,
            "lmax" | "l_max" => self.l_max = parse_num(key, value)?,
            "nmax" | "n_max" => self.n_max = parse_num(key, value)?,
            "order" => self.order = parse_num(key, value)?,
            "nsplines" | "n_splines" => self.n_splines = parse_optional(key, value)?,
            "rmax" | "r_max" => self.r_max = parse_optional(key, value)?,
            "grid" => self.grid = value.parse().map_err(|e: Error| cfg_err(key, value, &e.to_string()))?,
            "quadrature" => self.quadrature = parse_optional(key, value)?,
            "zvalues" | "z_values" => self.z_values = parse_list(key, value)?,
            "states" | "scan_states" => {
                self.scan_states = value
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| s.parse().map_err(|e: Error| cfg_err(key, value, &e.to_string())))
                    .collect::<Result<_>>()?
            }
            "lmax_values" => self.lmax_values = parse_list(key, value)?,
            "nmax_values" => self.nmax_values = parse_list(key, value)?,
            "box_escalation" => self.box_escalation = parse_bool(key, value)?,
            "box_limit" => self.box_limit = parse_num(key, value)?,
            "box_tolerance" => self.box_tolerance = parse_num(key, value)?,
            "memory_gb" => {
                let gb: f64 = parse_num(key, value)?;
                if !(gb > 0.0 && gb.is_finite()) {
                    return Err(cfg_err(key, value, "must be positive"));
                }
                self.memory_budget = (gb * (1u64 << 30) as f64) as u64;
            }
            "threads" => self.threads = parse_optional(key, value)?,
            "out" | "out_dir" => self.out_dir = PathBuf::from(value),
            "format" | "formats" => self.formats = parse_list(key, value)?,
            _ => {
                return Err(Error::Config(format!(
                    "unknown key `{key}` (known: {})",
                    Self::KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Checks ranges; called before any work starts.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        let z_ok = |z: f64| z.is_finite() && z >= 1.0;
        if !z_ok(self.z) {
            return bad(format!("z must be >= 1, got {}", self.z));
        }
        if let Some(z) = self.z_values.iter().find(|&&z| !z_ok(z)) {
            return bad(format!("scan charges must be >= 1, got {z}"));
        }
        if self.l_max > MAX_L {
            return bad(format!("lmax must be <= {MAX_L}, got {}", self.l_max));
        }
        if self.n_max <= self.l_max {
            return bad(format!("nmax ({}) must exceed lmax ({})", self.n_max, self.l_max));
        }
        if !(4..=10).contains(&self.order) {
            return bad(format!("order must be in 4..=10, got {}", self.order));
        }
        let n_max = self.max_n();
        if let Some(n) = self.n_splines {
            if n < n_max as usize + 2 || n <= self.order {
                return bad(format!(
                    "nsplines ({n}) must be at least nmax + 2 = {} and exceed the order",
                    n_max + 2
                ));
            }
        }
        if let Some(r) = self.r_max {
            if !(r.is_finite() && r > 0.0) {
                return bad(format!("rmax must be > 0, got {r}"));
            }
        }
        if let Some(p) = self.quadrature {
            if p < self.order {
                return bad(format!("quadrature ({p}) must be at least the order ({})", self.order));
            }
        }
        if let Some(&l) = self.lmax_values.iter().find(|&&l| l > self.l_max) {
            return bad(format!("lmax_values entry {l} exceeds lmax ({})", self.l_max));
        }
        if let Some(&n) = self.nmax_values.iter().find(|&&n| n > self.n_max) {
            return bad(format!("nmax_values entry {n} exceeds nmax ({})", self.n_max));
        }
        let l_top = self.lmax_values.iter().copied().max().unwrap_or(0);
        if let Some(&n) = self.nmax_values.iter().find(|&&n| n <= l_top) {
            return bad(format!("nmax_values entry {n} must exceed every lmax value"));
        }
        if self.scan_states.is_empty() {
            return bad("states must name at least one state".into());
        }
        if !(self.box_limit.is_finite() && self.box_limit > 0.0) {
            return bad(format!("box_limit must be > 0, got {}", self.box_limit));
        }
        if !(self.box_tolerance > 0.0) {
            return bad(format!("box_tolerance must be > 0, got {}", self.box_tolerance));
        }
        if self.threads == Some(0) {
            return bad("threads must be >= 1".into());
        }
        if self.formats.is_empty() {
            return bad("format must name at least one of csv, json, svg".into());
        }
        Ok(())
    }

    fn max_n(&self) -> u32 {
        self.nmax_values.iter().copied().max().unwrap_or(self.n_max).max(self.n_max)
    }

    /// Resolved basis for charge `z`.
    pub fn basis_for(&self, z: f64) -> BasisParams {
        BasisParams {
            z,
            l_max: self.l_max,
            n_max: self.n_max,
            order: self.order,
            n_splines: self.n_splines.unwrap_or(self.n_max as usize + 5),
            r_max: self.r_max.unwrap_or_else(|| default_box_radius(z)),
            grid: self.grid,
            quadrature: self.quadrature.unwrap_or(self.order + 5),
        }
    }

    /// Convergence-table axes with defaults applied.
    pub fn convergence_axes(&self) -> (Vec<u32>, Vec<u32>) {
        let mut ls = if self.lmax_values.is_empty() {
            (0..=self.l_max).collect()
        } else {
            self.lmax_values.clone()
        };
        let mut ns = if self.nmax_values.is_empty() {
            let mut v: Vec<u32> = (1..).map(|i| 5 * i).take_while(|&n| n < self.n_max).collect();
            v.push(self.n_max);
            v
        } else {
            self.nmax_values.clone()
        };
        ls.sort_unstable();
        ls.dedup();
        ns.sort_unstable();
        ns.dedup();
        ns.retain(|&n| n > ls.last().copied().unwrap_or(0));
        (ls, ns)
    }

    pub fn wants(&self, f: OutputFormat) -> bool {
        self.formats.contains(&f)
    }
}
