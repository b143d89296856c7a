//! One-particle reduced density matrix of a two-electron `L = 0` state and
//! the entropies derived from its spectrum.
//!
//! The spatial wave function is `Σ_l Σ_ab C^l_ab χ_a(1) χ_b(2) [l l]_0`, where
//! `[l l]_0` is the angular pair coupled to zero. Tracing out electron 2
//! leaves `C^l (C^l)^T ⊗ 1/(2l+1)` on each `l` shell, so every eigenvalue of
//! the radial block appears `2l+1` times.

use std::io::Write;

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::ci::{CIState, ConfigList, Spin};
use crate::error::{Error, Result};
use crate::linalg::symmetric_eigenvalues;

/// Eigenvalues below this count as exact zeros in the entropy sums.
pub const ZERO_OCCUPATION: f64 = 1e-14;

/// Per-`l` radial coefficient matrices of the spatial wave function;
/// symmetric for singlets, antisymmetric for triplets.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientBlocks {
    spin: Spin,
    blocks: Vec<Mat<f64>>,
}

impl CoefficientBlocks {
    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn blocks(&self) -> &[Mat<f64>] {
        &self.blocks
    }

    pub fn block(&self, l: u32) -> Option<&Mat<f64>> {
        self.blocks.get(l as usize)
    }

    /// Squared norm `Σ_l ||C^l||_F^2`.
    pub fn norm_sqr(&self) -> f64 {
        self.blocks.iter().map(|b| b.squared_norm_l2()).sum()
    }

    /// Back to CI coefficients over `configs`.
    pub fn to_coefficients(&self, configs: &ConfigList) -> Result<Vec<f64>> {
        check_shape(self, configs)?;
        Ok(configs
            .iter()
            .map(|c| {
                let b = &self.blocks[c.a.l as usize];
                let (i, j) = ((c.a.n - c.a.l - 1) as usize, (c.b.n - c.b.l - 1) as usize);
                if i == j {
                    b[(i, i)]
                } else {
                    b[(i, j)] * std::f64::consts::SQRT_2
                }
            })
            .collect())
    }
}

fn check_shape(blocks: &CoefficientBlocks, configs: &ConfigList) -> Result<()> {
    let ok = blocks.spin == configs.spin()
        && blocks.blocks.len() == configs.l_max() as usize + 1
        && blocks
            .blocks
            .iter()
            .enumerate()
            .all(|(l, b)| b.nrows() == (configs.n_max() as usize - l) && b.ncols() == b.nrows());
    if ok {
        Ok(())
    } else {
        Err(Error::InconsistentInputs("coefficient blocks do not match the configuration list".into()))
    }
}

/// Arranges CI coefficients into [`CoefficientBlocks`]: a pair `(a, b)` with
/// coefficient `x` gives `C_ab = x/√2` and `C_ba = ±x/√2`, a doubly occupied
/// orbital gives `C_aa = x`.
pub fn coefficient_blocks(state: &CIState, configs: &ConfigList) -> Result<CoefficientBlocks> {
    if state.coefficients.len() != configs.len() {
        return Err(Error::InconsistentInputs(format!(
            "state has {} coefficients, configuration list has {}",
            state.coefficients.len(),
            configs.len()
        )));
    }
    if state.label.spin != configs.spin() {
        return Err(Error::InconsistentInputs(format!(
            "{} state with a {} configuration list",
            state.label,
            configs.spin()
        )));
    }
    let spin = configs.spin();
    let sign = spin.exchange_sign();
    let mut blocks: Vec<Mat<f64>> = (0..=configs.l_max())
        .map(|l| {
            let m = (configs.n_max() - l) as usize;
            Mat::zeros(m, m)
        })
        .collect();
    for (c, &x) in configs.iter().zip(&state.coefficients) {
        let b = &mut blocks[c.a.l as usize];
        let (i, j) = ((c.a.n - c.a.l - 1) as usize, (c.b.n - c.b.l - 1) as usize);
        if i == j {
            b[(i, i)] = x;
        } else {
            b[(i, j)] = x * std::f64::consts::FRAC_1_SQRT_2;
            b[(j, i)] = sign * x * std::f64::consts::FRAC_1_SQRT_2;
        }
    }
    Ok(CoefficientBlocks { spin, blocks })
}

/// Radial blocks of the one-particle density matrix; the full operator is
/// `⊕_l ρ^l ⊗ 1_(2l+1)`, with `Σ_l (2l+1) Tr ρ^l = 1`.
#[derive(Debug, Clone)]
pub struct ReducedDensityMatrix {
    blocks: Vec<Mat<f64>>,
    raw_trace: f64,
}

impl ReducedDensityMatrix {
    pub fn blocks(&self) -> &[Mat<f64>] {
        &self.blocks
    }

    /// `Σ_l Tr (M^l M^lT)` before normalization, `M = C ± C^T`; 4 for a
    /// normalized state.
    pub fn raw_trace(&self) -> f64 {
        self.raw_trace
    }

    /// `Σ_l (2l+1) Tr ρ^l`.
    pub fn trace(&self) -> f64 {
        self.blocks
            .iter()
            .enumerate()
            .map(|(l, b)| (2 * l + 1) as f64 * (0..b.nrows()).map(|i| b[(i, i)]).sum::<f64>())
            .sum()
    }
}

/// Builds `ρ^l = M^l M^lT / (2l+1)` with `M^l = C^l ± C^lT`, scaled to unit
/// total trace. Fails if the state was not normalized.
pub fn reduced_density_matrix(blocks: &CoefficientBlocks) -> Result<ReducedDensityMatrix> {
    let sign = blocks.spin.exchange_sign();
    let mut raw = Vec::with_capacity(blocks.blocks.len());
    let mut raw_trace = 0.0;
    for c in &blocks.blocks {
        let m = Mat::from_fn(c.nrows(), c.ncols(), |i, j| c[(i, j)] + sign * c[(j, i)]);
        let mut rho = &m * m.transpose();
        // exact symmetry
        for i in 0..rho.nrows() {
            for j in 0..i {
                let s = 0.5 * (rho[(i, j)] + rho[(j, i)]);
                rho[(i, j)] = s;
                rho[(j, i)] = s;
            }
        }
        raw_trace += (0..rho.nrows()).map(|i| rho[(i, i)]).sum::<f64>();
        raw.push(rho);
    }
    if (raw_trace - 4.0).abs() > 1e-10 {
        return Err(Error::InconsistentInputs(format!(
            "unnormalized state: density-matrix trace {raw_trace} before scaling, expected 4"
        )));
    }
    let blocks = raw
        .into_iter()
        .enumerate()
        .map(|(l, rho)| rho * faer::Scale(1.0 / (raw_trace * (2 * l + 1) as f64)))
        .collect();
    Ok(ReducedDensityMatrix { blocks, raw_trace })
}

/// One occupation eigenvalue with its angular degeneracy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Occupation {
    pub l: u32,
    pub lambda: f64,
    pub g: u32,
}

/// Occupation spectrum, ordered by `l` and then by decreasing `λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct RdmSpectrum {
    entries: Vec<Occupation>,
}

impl RdmSpectrum {
    /// Validates `0 <= λ <= 1` and `g >= 1`.
    pub fn new(entries: Vec<Occupation>) -> Result<Self> {
        for e in &entries {
            if !(0.0..=1.0).contains(&e.lambda) || e.g == 0 {
                return Err(Error::InvalidParameter(format!(
                    "occupation {} with degeneracy {} is invalid",
                    e.lambda, e.g
                )));
            }
        }
        Ok(RdmSpectrum { entries })
    }

    /// Spectrum of nondegenerate eigenvalues (`l = 0`, `g = 1`).
    pub fn from_eigenvalues(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&lambda| Occupation { l: 0, lambda, g: 1 }).collect())
    }

    pub fn entries(&self) -> &[Occupation] {
        &self.entries
    }

    /// `Σ g λ`.
    pub fn total(&self) -> f64 {
        self.entries.iter().map(|e| e.g as f64 * e.lambda).sum()
    }

    /// `Tr ρ² = Σ g λ²`.
    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|e| e.g as f64 * e.lambda * e.lambda).sum()
    }

    /// Largest eigenvalue.
    pub fn largest(&self) -> f64 {
        self.entries.iter().map(|e| e.lambda).fold(0.0, f64::max)
    }

    /// Writes `l,lambda,g` rows with a header.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let to_err = |e: csv::Error| Error::Parse {
            what: "spectrum csv".into(),
            msg: e.to_string(),
        };
        w.write_record(["l", "lambda", "g"]).map_err(to_err)?;
        for e in &self.entries {
            w.write_record([e.l.to_string(), format!("{:e}", e.lambda), e.g.to_string()])
                .map_err(to_err)?;
        }
        w.flush().map_err(|e| Error::io("spectrum csv", e))
    }
}

/// Diagonalizes each block; eigenvalues in `[-1e-10, 0)` are clamped to zero.
pub fn rdm_spectrum(rdm: &ReducedDensityMatrix) -> Result<RdmSpectrum> {
    let mut entries = Vec::new();
    for (l, block) in rdm.blocks.iter().enumerate() {
        let mut values = symmetric_eigenvalues(block.as_ref())?;
        values.sort_by(|a, b| b.total_cmp(a));
        for v in values {
            if v < -1e-10 {
                return Err(Error::NegativeEigenvalue { l, value: v });
            }
            if v > 1.0 + 1e-10 {
                return Err(Error::InconsistentInputs(format!("occupation {v} exceeds 1 in l={l} block")));
            }
            entries.push(Occupation {
                l: l as u32,
                lambda: v.clamp(0.0, 1.0),
                g: 2 * l as u32 + 1,
            });
        }
    }
    Ok(RdmSpectrum { entries })
}

/// `-Σ g λ log2 λ`.
pub fn von_neumann_entropy(spec: &RdmSpectrum) -> f64 {
    spec.entries
        .iter()
        .filter(|e| e.lambda > ZERO_OCCUPATION)
        .fold(0.0, |acc, e| acc - e.g as f64 * e.lambda * e.lambda.log2())
}

/// Same entropy with natural logarithms.
pub fn von_neumann_entropy_nats(spec: &RdmSpectrum) -> f64 {
    von_neumann_entropy(spec) * std::f64::consts::LN_2
}

/// `1 - Σ g λ²`.
pub fn linear_entropy(spec: &RdmSpectrum) -> f64 {
    1.0 - spec.purity()
}

/// Spin projection of the two-electron state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpinProjection {
    /// Triplet with `S_z = ±1`: spins fully aligned, spin purity 1.
    Aligned,
    /// `S_z = 0`, singlet or triplet: spin purity ½.
    Zero,
}

/// `ξ = 1 - 2 Tr(ρ_coord²) Tr(ρ_spin²)` from the coordinate purity.
pub fn spin_weighted_entanglement(purity: f64, projection: SpinProjection) -> Result<f64> {
    if !(purity > 0.0 && purity <= 1.0) {
        return Err(Error::InvalidPurity(purity));
    }
    Ok(match projection {
        SpinProjection::Aligned => 1.0 - 2.0 * purity,
        SpinProjection::Zero => 1.0 - purity,
    })
}

/// Entropies of one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub von_neumann: f64,
    pub von_neumann_nats: f64,
    pub linear: f64,
    pub purity: f64,
    /// `ξ` for the `S_z = 0` component.
    pub xi: f64,
    pub largest_occupation: f64,
    pub total_occupation: f64,
}

impl EntropyReport {
    pub fn from_spectrum(spec: &RdmSpectrum) -> Result<Self> {
        let purity = spec.purity();
        Ok(EntropyReport {
            von_neumann: von_neumann_entropy(spec),
            von_neumann_nats: von_neumann_entropy_nats(spec),
            linear: linear_entropy(spec),
            purity,
            xi: spin_weighted_entanglement(purity, SpinProjection::Zero)?,
            largest_occupation: spec.largest(),
            total_occupation: spec.total(),
        })
    }
}

/// State → blocks → density matrix → spectrum.
pub fn state_spectrum(state: &CIState, configs: &ConfigList) -> Result<RdmSpectrum> {
    rdm_spectrum(&reduced_density_matrix(&coefficient_blocks(state, configs)?)?)
}
