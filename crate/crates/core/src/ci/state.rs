use std::fmt;
use std::io::Write;
use std::str::FromStr;

use faer::{Mat, MatRef};
use serde::{Deserialize, Serialize};

use super::config::{build_config_list, ConfigList, Configuration, Spin};
use crate::angular::OrbitalLabel;
use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen;

/// Ascending eigenvalues with eigenvectors in the columns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: Mat<f64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Full eigendecomposition; each eigenvector is flipped so that its
/// largest-magnitude component is positive.
pub fn diagonalize(h: MatRef<'_, f64>) -> Result<Spectrum> {
    let eig = symmetric_eigen(h)?;
    let mut vectors = eig.vectors;
    let n = vectors.nrows();
    for j in 0..vectors.ncols() {
        let mut big = 0.0f64;
        let mut sign = 1.0;
        for i in 0..n {
            let v = vectors[(i, j)];
            if v.abs() > big {
                big = v.abs();
                sign = v.signum();
            }
        }
        if sign < 0.0 {
            for i in 0..n {
                vectors[(i, j)] = -vectors[(i, j)];
            }
        }
    }
    Ok(Spectrum {
        values: eig.values,
        vectors,
    })
}

/// Target state `1s ns` with `n` in 1..=3 (`n = 1` is the `1s^2` ground state).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct StateLabel {
    pub outer_n: u32,
    pub spin: Spin,
}

impl StateLabel {
    pub const GROUND: StateLabel = StateLabel { outer_n: 1, spin: Spin::Singlet };
    pub const SINGLET_1S2S: StateLabel = StateLabel { outer_n: 2, spin: Spin::Singlet };
    pub const TRIPLET_1S2S: StateLabel = StateLabel { outer_n: 2, spin: Spin::Triplet };

    pub fn new(outer_n: u32, spin: Spin) -> Result<Self> {
        if !(1..=3).contains(&outer_n) || (outer_n == 1 && spin == Spin::Triplet) {
            return Err(Error::InvalidQuantumNumbers(format!(
                "no target state 1s{outer_n}s with spin {spin}"
            )));
        }
        Ok(StateLabel { outer_n, spin })
    }

    /// The configuration the state is named after.
    pub fn configuration(&self) -> Configuration {
        Configuration::new(OrbitalLabel::new(1, 0), OrbitalLabel::new(self.outer_n, 0))
    }

    /// Position in the energy-ordered spectrum of its symmetry when states
    /// are well separated.
    pub fn energy_rank(&self) -> usize {
        match self.spin {
            Spin::Singlet => (self.outer_n - 1) as usize,
            Spin::Triplet => (self.outer_n - 2) as usize,
        }
    }
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.outer_n == 1 {
            write!(f, "1s2-{}", self.spin)
        } else {
            write!(f, "1s{}s-{}", self.outer_n, self.spin)
        }
    }
}

impl From<StateLabel> for String {
    fn from(s: StateLabel) -> String {
        s.to_string()
    }
}

impl TryFrom<String> for StateLabel {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl FromStr for StateLabel {
    type Err = Error;

    /// Accepts `1s2`, `1s^2`, `ground`, `1s2s-1S`, `1s2s_3S`, `1s3s 1S`, ...
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            what: "state label".into(),
            msg: format!("expected one of 1s2, 1s2s-1S, 1s2s-3S, 1s3s-1S, 1s3s-3S; got `{s}`"),
        };
        let t: String = s
            .trim()
            .chars()
            .filter(|c| !matches!(c, '^' | '_' | '-' | ' ' | ':'))
            .collect::<String>()
            .to_ascii_lowercase();
        let (conf, spin) = if let Some(c) = t.strip_suffix("1s") {
            (c, Some(Spin::Singlet))
        } else if let Some(c) = t.strip_suffix("3s") {
            (c, Some(Spin::Triplet))
        } else {
            (t.as_str(), None)
        };
        let (outer_n, spin) = match (conf, spin) {
            // "1s2-1S" reduces to "1s2" plus a singlet suffix.
            ("ground" | "1s2", None | Some(Spin::Singlet)) => (1, Spin::Singlet),
            ("1s2s", Some(sp)) => (2, sp),
            ("1s3s", Some(sp)) => (3, sp),
            _ => return Err(bad()),
        };
        StateLabel::new(outer_n, spin)
    }
}

/// One selected eigenstate.
#[derive(Debug, Clone, PartialEq)]
pub struct CIState {
    pub label: StateLabel,
    pub energy: f64,
    pub coefficients: Vec<f64>,
    /// Position in the ascending spectrum.
    pub root: usize,
    /// Squared coefficient on the label's own configuration.
    pub target_weight: f64,
    pub dominant: Configuration,
    pub dominant_weight: f64,
    /// Set when no root has at least half its weight on the target
    /// configuration and the energy ordering was used instead.
    pub ambiguous: bool,
}

/// Picks the root with the largest weight on the target configuration; if
/// that weight is below one half, falls back to the energy ordering and
/// marks the state ambiguous.
pub fn select_state(spectrum: &Spectrum, configs: &ConfigList, target: StateLabel) -> Result<CIState> {
    if target.spin != configs.spin() {
        return Err(Error::InconsistentInputs(format!(
            "{target} requested from a {} configuration list",
            configs.spin()
        )));
    }
    if spectrum.vectors.nrows() != configs.len() {
        return Err(Error::InconsistentInputs(format!(
            "spectrum dimension {} vs {} configurations",
            spectrum.vectors.nrows(),
            configs.len()
        )));
    }
    let idx = configs.index_of(&target.configuration()).ok_or_else(|| {
        Error::InconsistentInputs(format!("{} is outside the configuration list", target.configuration()))
    })?;
    let v = &spectrum.vectors;
    let mut best = (0usize, -1.0f64);
    for j in 0..v.ncols() {
        let w = v[(idx, j)].powi(2);
        if w > best.1 {
            best = (j, w);
        }
    }
    let (root, ambiguous) = if best.1 >= 0.5 {
        (best.0, false)
    } else {
        let rank = target.energy_rank();
        if rank >= spectrum.len() {
            return Err(Error::InconsistentInputs(format!("spectrum has fewer than {} roots", rank + 1)));
        }
        (rank, true)
    };
    let coefficients: Vec<f64> = (0..v.nrows()).map(|i| v[(i, root)]).collect();
    let (dom, dominant_weight) = coefficients
        .iter()
        .enumerate()
        .map(|(i, c)| (i, c * c))
        .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    Ok(CIState {
        label: target,
        energy: spectrum.values[root],
        target_weight: coefficients[idx].powi(2),
        root,
        dominant: configs.configs()[dom],
        dominant_weight,
        ambiguous,
        coefficients,
    })
}

/// Writes a state as `key = value` header lines followed by one
/// `n1 l1 n2 l2 coefficient` line per configuration.
pub fn write_state_dump<W: Write>(mut out: W, z: f64, state: &CIState, configs: &ConfigList) -> Result<()> {
    let io = |e| Error::io("state dump", e);
    let d = state.dominant;
    writeln!(out, "# two-electron CI state").map_err(io)?;
    writeln!(out, "z = {z:?}").map_err(io)?;
    writeln!(out, "label = {}", state.label).map_err(io)?;
    writeln!(out, "spin = {}", configs.spin().quantum_number()).map_err(io)?;
    writeln!(out, "l_max = {}", configs.l_max()).map_err(io)?;
    writeln!(out, "n_max = {}", configs.n_max()).map_err(io)?;
    writeln!(out, "energy = {:?}", state.energy).map_err(io)?;
    writeln!(out, "root = {}", state.root).map_err(io)?;
    writeln!(out, "target_weight = {:?}", state.target_weight).map_err(io)?;
    writeln!(out, "dominant = {} {} {} {}", d.a.n, d.a.l, d.b.n, d.b.l).map_err(io)?;
    writeln!(out, "dominant_weight = {:?}", state.dominant_weight).map_err(io)?;
    writeln!(out, "ambiguous = {}", state.ambiguous).map_err(io)?;
    writeln!(out, "dimension = {}", configs.len()).map_err(io)?;
    writeln!(out, "# n1 l1 n2 l2 coefficient").map_err(io)?;
    for (c, x) in configs.iter().zip(&state.coefficients) {
        writeln!(out, "{} {} {} {} {x:?}", c.a.n, c.a.l, c.b.n, c.b.l).map_err(io)?;
    }
    Ok(())
}

/// Parsed state dump: charge, state and its rebuilt configuration list.
#[derive(Debug, Clone)]
pub struct StateDump {
    pub z: f64,
    pub state: CIState,
    pub configs: ConfigList,
}

/// Inverse of [`write_state_dump`].
pub fn parse_state_dump(text: &str) -> Result<StateDump> {
    let err = |msg: String| Error::Parse {
        what: "state dump".into(),
        msg,
    };
    let mut header = std::collections::HashMap::new();
    let mut rows: Vec<(Configuration, f64)> = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some((k, v)) = line.split_once('=') {
            header.insert(k.trim().to_string(), v.trim().to_string());
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 5 {
            return Err(err(format!("line {}: expected 5 fields", ln + 1)));
        }
        let num = |s: &str| s.parse::<u32>().map_err(|e| err(format!("line {}: {e}", ln + 1)));
        let a = OrbitalLabel::new(num(f[0])?, num(f[1])?);
        let b = OrbitalLabel::new(num(f[2])?, num(f[3])?);
        let x: f64 = f[4].parse().map_err(|e| err(format!("line {}: {e}", ln + 1)))?;
        rows.push((Configuration { a, b }, x));
    }
    let get = |k: &str| header.get(k).ok_or_else(|| err(format!("missing `{k}`")));
    fn parse<T: FromStr>(s: &str, k: &str) -> Result<T> {
        s.parse().map_err(|_| Error::Parse {
            what: "state dump".into(),
            msg: format!("bad value for `{k}`: `{s}`"),
        })
    }
    let z: f64 = parse(get("z")?, "z")?;
    let label: StateLabel = get("label")?.parse()?;
    let spin = Spin::from_quantum_number(parse(get("spin")?, "spin")?)?;
    let configs = build_config_list(parse(get("l_max")?, "l_max")?, parse(get("n_max")?, "n_max")?, 0, spin)?;
    let dim: usize = parse(get("dimension")?, "dimension")?;
    if dim != configs.len() || rows.len() != dim {
        return Err(err(format!("dimension {dim} but {} rows for {} configurations", rows.len(), configs.len())));
    }
    for ((c, _), d) in rows.iter().zip(configs.iter()) {
        if c != d {
            return Err(err(format!("configuration {c} out of order (expected {d})")));
        }
    }
    let dom: Vec<u32> = get("dominant")?
        .split_whitespace()
        .map(|s| parse(s, "dominant"))
        .collect::<Result<_>>()?;
    if dom.len() != 4 {
        return Err(err("`dominant` needs four integers".into()));
    }
    let state = CIState {
        label,
        energy: parse(get("energy")?, "energy")?,
        coefficients: rows.into_iter().map(|r| r.1).collect(),
        root: parse(get("root")?, "root")?,
        target_weight: parse(get("target_weight")?, "target_weight")?,
        dominant: Configuration {
            a: OrbitalLabel::new(dom[0], dom[1]),
            b: OrbitalLabel::new(dom[2], dom[3]),
        },
        dominant_weight: parse(get("dominant_weight")?, "dominant_weight")?,
        ambiguous: parse(get("ambiguous")?, "ambiguous")?,
    };
    Ok(StateDump { z, state, configs })
}
