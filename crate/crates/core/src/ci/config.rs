use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::angular::OrbitalLabel;
use crate::error::{Error, Result};

/// Total spin of a two-electron state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spin {
    Singlet,
    Triplet,
}

impl Spin {
    /// Spin quantum number `S`.
    pub fn quantum_number(self) -> u32 {
        match self {
            Spin::Singlet => 0,
            Spin::Triplet => 1,
        }
    }

    /// `+1` for singlets, `-1` for triplets: the sign picked up by the
    /// spatial function under exchange of the two electrons.
    pub fn exchange_sign(self) -> f64 {
        match self {
            Spin::Singlet => 1.0,
            Spin::Triplet => -1.0,
        }
    }

    pub fn from_quantum_number(s: u32) -> Result<Self> {
        match s {
            0 => Ok(Spin::Singlet),
            1 => Ok(Spin::Triplet),
            _ => Err(Error::UnsupportedSymmetry(format!("S={s} is not a two-electron spin"))),
        }
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Spin::Singlet => "1S",
            Spin::Triplet => "3S",
        })
    }
}

const L_LETTERS: &[u8] = b"spdfghiklmnoqrtuv";

/// Spectroscopic letter for `l` (`s p d f g h i k ...`).
pub fn l_letter(l: u32) -> char {
    L_LETTERS.get(l as usize).map_or('?', |&c| c as char)
}

fn l_from_letter(c: char) -> Option<u32> {
    L_LETTERS.iter().position(|&x| x as char == c).map(|p| p as u32)
}

impl fmt::Display for OrbitalLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.n, l_letter(self.l))
    }
}

impl FromStr for OrbitalLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse {
            what: "orbital label".into(),
            msg: format!("expected e.g. `2s` or `3d`, got `{s}`"),
        };
        let letter = s.chars().last().ok_or_else(bad)?;
        let l = l_from_letter(letter).ok_or_else(bad)?;
        let n: u32 = s[..s.len() - letter.len_utf8()].parse().map_err(|_| bad())?;
        if n <= l {
            return Err(bad());
        }
        Ok(OrbitalLabel { n, l })
    }
}

/// An orbital pair, stored with `a <= b` in `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    pub a: OrbitalLabel,
    pub b: OrbitalLabel,
}

impl Configuration {
    /// Canonicalizes the pair order.
    pub fn new(x: OrbitalLabel, y: OrbitalLabel) -> Self {
        if x <= y {
            Configuration { a: x, b: y }
        } else {
            Configuration { a: y, b: x }
        }
    }

    pub fn is_same_orbital(&self) -> bool {
        self.a == self.b
    }

    /// Normalization of the symmetrized pair: `1/2` for `a = b`, else `1/sqrt 2`.
    pub fn pair_norm(&self) -> f64 {
        if self.is_same_orbital() {
            0.5
        } else {
            std::f64::consts::FRAC_1_SQRT_2
        }
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_same_orbital() {
            write!(f, "{}^2", self.a)
        } else {
            write!(f, "{}{}", self.a, self.b)
        }
    }
}

/// All two-electron configurations of one `(L, S)` symmetry inside a
/// `(l_max, n_max)` truncation, ordered by `l`, then `n1`, then `n2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigList {
    configs: Vec<Configuration>,
    blocks: Vec<Range<usize>>,
    l_max: u32,
    n_max: u32,
    big_l: u32,
    spin: Spin,
}

/// Enumerates configurations for `L = 0` (other `L` are rejected).
pub fn build_config_list(l_max: u32, n_max: u32, big_l: u32, spin: Spin) -> Result<ConfigList> {
    if big_l != 0 {
        return Err(Error::UnsupportedSymmetry(format!(
            "only L = 0 states are implemented, got L = {big_l}"
        )));
    }
    if n_max <= l_max {
        return Err(Error::InvalidParameter(format!(
            "n_max ({n_max}) must exceed l_max ({l_max})"
        )));
    }
    let mut configs = Vec::new();
    let mut blocks = Vec::with_capacity(l_max as usize + 1);
    for l in 0..=l_max {
        let start = configs.len();
        for n1 in l + 1..=n_max {
            let first = match spin {
                Spin::Singlet => n1,
                Spin::Triplet => n1 + 1,
            };
            for n2 in first..=n_max {
                configs.push(Configuration {
                    a: OrbitalLabel::new(n1, l),
                    b: OrbitalLabel::new(n2, l),
                });
            }
        }
        blocks.push(start..configs.len());
    }
    Ok(ConfigList {
        configs,
        blocks,
        l_max,
        n_max,
        big_l,
        spin,
    })
}

/// Closed-form size of the `L = 0` list.
pub fn config_count(l_max: u32, n_max: u32, spin: Spin) -> usize {
    (0..=l_max.min(n_max.saturating_sub(1)))
        .map(|l| {
            let m = (n_max - l) as usize;
            match spin {
                Spin::Singlet => m * (m + 1) / 2,
                Spin::Triplet => m * m.saturating_sub(1) / 2,
            }
        })
        .sum()
}

impl ConfigList {
    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn configs(&self) -> &[Configuration] {
        &self.configs
    }

    pub fn get(&self, i: usize) -> Option<&Configuration> {
        self.configs.get(i)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Configuration> {
        self.configs.iter()
    }

    pub fn l_max(&self) -> u32 {
        self.l_max
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn big_l(&self) -> u32 {
        self.big_l
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    /// Index range of the configurations with both electrons in `l`.
    pub fn block(&self, l: u32) -> Range<usize> {
        self.blocks.get(l as usize).cloned().unwrap_or(0..0)
    }

    /// Position of a configuration, found arithmetically from the ordering.
    pub fn index_of(&self, cfg: &Configuration) -> Option<usize> {
        let Configuration { a, b } = *cfg;
        if a.l != b.l || a.l > self.l_max || b.n > self.n_max || a.n <= a.l || a.n > b.n {
            return None;
        }
        let l = a.l;
        let m = (self.n_max - l) as usize;
        let i1 = (a.n - l - 1) as usize;
        let i2 = (b.n - l - 1) as usize;
        let within = match self.spin {
            Spin::Singlet => i1 * m - i1 * i1.saturating_sub(1) / 2 + (i2 - i1),
            Spin::Triplet => {
                if i1 == i2 {
                    return None;
                }
                i1 * (m - 1) - i1 * i1.saturating_sub(1) / 2 + (i2 - i1 - 1)
            }
        };
        let idx = self.blocks[l as usize].start + within;
        debug_assert_eq!(self.configs[idx], *cfg);
        Some(idx)
    }

    /// Positions of this list's configurations inside a larger list built
    /// with the same symmetry.
    pub fn embedding_in(&self, larger: &ConfigList) -> Result<Vec<usize>> {
        if self.spin != larger.spin || self.big_l != larger.big_l {
            return Err(Error::InconsistentInputs("lists differ in symmetry".into()));
        }
        self.configs
            .iter()
            .map(|c| {
                larger.index_of(c).ok_or_else(|| {
                    Error::InconsistentInputs(format!("configuration {c} missing from the larger list"))
                })
            })
            .collect()
    }
}
