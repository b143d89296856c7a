use std::sync::Arc;

use faer::Mat;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{BasisParams, RunConfig};
use crate::angular::CouplingTable;
use crate::bspline::{make_knots, BSplineBasis};
use crate::ci::{
    assemble_hamiltonian, build_config_list, diagonalize, select_state, CIState, ConfigList, SlaterIntegralTable,
    SlaterQuadrature, Spin, StateLabel,
};
use crate::entanglement::{state_spectrum, EntropyReport, Occupation, RdmSpectrum};
use crate::error::{Error, Result};
use crate::orbitals::RadialOrbitalSet;

/// Allowed deviation of `Σ g λ` from one.
pub const TRACE_TOLERANCE: f64 = 1e-10;

/// Orbitals, Slater integrals and angular factors for one basis.
pub struct Workspace {
    params: BasisParams,
    integrals: SlaterIntegralTable,
    coupling: CouplingTable,
}

impl Workspace {
    pub fn build(params: BasisParams) -> Result<Self> {
        let knots = make_knots(params.r_max, params.n_splines, params.order, params.grid)?;
        let basis = Arc::new(BSplineBasis::new(knots));
        let orbitals = Arc::new(RadialOrbitalSet::build(basis, params.z, params.l_max, params.n_max)?);
        let quad = SlaterQuadrature {
            outer: params.quadrature,
            inner: params.quadrature,
        };
        Ok(Workspace {
            params,
            integrals: SlaterIntegralTable::new(orbitals, quad)?,
            coupling: CouplingTable::new(params.l_max, 0)?,
        })
    }

    pub fn params(&self) -> &BasisParams {
        &self.params
    }

    pub fn orbitals(&self) -> &Arc<RadialOrbitalSet> {
        self.integrals.orbitals()
    }

    pub fn integrals(&self) -> &SlaterIntegralTable {
        &self.integrals
    }

    /// Configuration list and Hamiltonian of one spin over the full basis.
    pub fn hamiltonian(&self, spin: Spin, memory_budget: u64) -> Result<(ConfigList, Mat<f64>)> {
        let configs = build_config_list(self.params.l_max, self.params.n_max, 0, spin)?;
        let h = assemble_hamiltonian(&configs, &self.integrals, &self.coupling, memory_budget)?;
        Ok((configs, h))
    }
}

/// Per-state results of a solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateResult {
    pub state: StateLabel,
    pub energy: f64,
    pub root: usize,
    pub dimension: usize,
    pub target_weight: f64,
    pub dominant: String,
    pub dominant_weight: f64,
    /// Selection fell back to energy ordering.
    pub ambiguous: bool,
    pub entropies: EntropyReport,
    /// Largest occupations, by decreasing `λ`.
    pub leading_occupations: Vec<Occupation>,
    #[serde(skip)]
    pub spectrum: Option<RdmSpectrum>,
}

const LEADING: usize = 8;

/// Entropies of a selected state, after checking `Σ g λ = 1`.
pub fn analyze_state(state: &CIState, configs: &ConfigList) -> Result<StateResult> {
    let spectrum = state_spectrum(state, configs)?;
    let total = spectrum.total();
    if (total - 1.0).abs() > TRACE_TOLERANCE {
        return Err(Error::Numerical(format!(
            "{}: occupations sum to {total}, expected 1",
            state.label
        )));
    }
    let entropies = EntropyReport::from_spectrum(&spectrum)?;
    let mut leading = spectrum.entries().to_vec();
    leading.sort_by(|a, b| b.lambda.total_cmp(&a.lambda).then(a.l.cmp(&b.l)));
    leading.truncate(LEADING);
    Ok(StateResult {
        state: state.label,
        energy: state.energy,
        root: state.root,
        dimension: configs.len(),
        target_weight: state.target_weight,
        dominant: state.dominant.to_string(),
        dominant_weight: state.dominant_weight,
        ambiguous: state.ambiguous,
        entropies,
        leading_occupations: leading,
        spectrum: Some(spectrum),
    })
}

/// Solves every requested state, diagonalizing once per spin.
pub fn solve_states(ws: &Workspace, states: &[StateLabel], memory_budget: u64) -> Result<Vec<StateResult>> {
    let mut out: Vec<Option<StateResult>> = vec![None; states.len()];
    for spin in [Spin::Singlet, Spin::Triplet] {
        let wanted: Vec<usize> = (0..states.len()).filter(|&i| states[i].spin == spin).collect();
        if wanted.is_empty() {
            continue;
        }
        let (configs, h) = ws.hamiltonian(spin, memory_budget)?;
        let spectrum = diagonalize(h.as_ref())?;
        drop(h);
        for i in wanted {
            let st = select_state(&spectrum, &configs, states[i])?;
            out[i] = Some(analyze_state(&st, &configs)?);
        }
    }
    Ok(out.into_iter().map(|r| r.expect("every state has a spin")).collect())
}

/// Report of a single solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub config: RunConfig,
    pub basis: BasisParams,
    pub result: StateResult,
    pub diagnostics: Diagnostics,
}

/// Intermediate quantities worth checking when a result looks off.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// `(label, energy)` of the lowest `s` orbitals against `-Z^2/(2n^2)`.
    pub s_orbitals: Vec<OrbitalCheck>,
    pub slater_integrals_cached: usize,
    pub occupation_total: f64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitalCheck {
    pub orbital: String,
    pub energy: f64,
    pub hydrogenic: f64,
}

fn diagnostics(ws: &Workspace, result: &StateResult) -> Diagnostics {
    let z = ws.params.z;
    let s_orbitals = ws
        .orbitals()
        .orbitals(0)
        .iter()
        .take(3)
        .map(|o| OrbitalCheck {
            orbital: format!("{}s", o.n),
            energy: o.energy,
            hydrogenic: -z * z / (2.0 * (o.n * o.n) as f64),
        })
        .collect();
    let mut warnings = Vec::new();
    if result.ambiguous {
        warnings.push(format!(
            "{}: no root has half its weight on {}; picked root {} by energy order (target weight {:.4})",
            result.state,
            result.state.configuration(),
            result.root,
            result.target_weight
        ));
    }
    Diagnostics {
        s_orbitals,
        slater_integrals_cached: ws.integrals.cached(),
        occupation_total: result.entropies.total_occupation,
        warnings,
    }
}

/// Basis → orbitals → CI → density matrix → entropies for `config.state`.
pub fn run_solve(config: &RunConfig) -> Result<SolveReport> {
    config.validate()?;
    let basis = config.basis_for(config.z);
    let ws = Workspace::build(basis)?;
    let result = solve_states(&ws, &[config.state], config.memory_budget)?.remove(0);
    let diagnostics = diagnostics(&ws, &result);
    Ok(SolveReport {
        config: config.clone(),
        basis,
        result,
        diagnostics,
    })
}

/// One cell of a convergence table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub l_max: u32,
    pub n_max: u32,
    pub state: StateLabel,
    pub dimension: usize,
    pub energy: f64,
    pub s_linear: f64,
    pub s_von_neumann: f64,
    pub ambiguous: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub config: RunConfig,
    pub basis: BasisParams,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn get(&self, l_max: u32, n_max: u32) -> Option<&ConvergenceRow> {
        self.rows.iter().find(|r| r.l_max == l_max && r.n_max == n_max)
    }
}

/// Entropies of `config.state` over a grid of truncations. All cells share
/// one orbital basis (sized for the largest `n_max`) and are cut out of
/// the Hamiltonian of the largest cell.
pub fn run_convergence(config: &RunConfig) -> Result<ConvergenceTable> {
    config.validate()?;
    let (ls, ns) = config.convergence_axes();
    if ls.is_empty() || ns.is_empty() {
        return Err(Error::Config("convergence table has no cells".into()));
    }
    let mut top = config.clone();
    top.l_max = *ls.last().unwrap();
    top.n_max = *ns.last().unwrap();
    let basis = top.basis_for(config.z);
    let ws = Workspace::build(basis)?;
    let spin = config.state.spin;
    let (big, h) = ws.hamiltonian(spin, config.memory_budget)?;
    let cells: Vec<(u32, u32)> = ls.iter().flat_map(|&l| ns.iter().map(move |&n| (l, n))).collect();
    let rows = cells
        .par_iter()
        .map(|&(l, n)| {
            let sub = build_config_list(l, n, 0, spin)?;
            let idx = sub.embedding_in(&big)?;
            let hs = Mat::from_fn(idx.len(), idx.len(), |i, j| h[(idx[i], idx[j])]);
            let spectrum = diagonalize(hs.as_ref())?;
            let st = select_state(&spectrum, &sub, config.state)?;
            let r = analyze_state(&st, &sub)?;
            Ok(ConvergenceRow {
                l_max: l,
                n_max: n,
                state: config.state,
                dimension: sub.len(),
                energy: r.energy,
                s_linear: r.entropies.linear,
                s_von_neumann: r.entropies.von_neumann,
                ambiguous: r.ambiguous,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceTable {
        config: config.clone(),
        basis,
        rows,
    })
}

/// One `(Z, state)` point of a charge scan. Failed points keep their
/// error message and leave the numeric fields empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZScanRow {
    pub z: f64,
    pub inv_z: f64,
    pub state: String,
    pub energy: Option<f64>,
    pub s_linear: Option<f64>,
    pub s_von_neumann: Option<f64>,
    pub target_weight: Option<f64>,
    pub dominant_weight: Option<f64>,
    pub ambiguous: Option<bool>,
    pub r_max: f64,
    pub box_converged: bool,
    pub l_max: u32,
    pub n_max: u32,
    pub order: usize,
    pub n_splines: usize,
    pub grid: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZScanResult {
    pub config: RunConfig,
    pub rows: Vec<ZScanRow>,
}

impl ZScanResult {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| !r.error.is_empty()).count()
    }

    /// Successful rows of one state, ordered by `Z`.
    pub fn series(&self, state: StateLabel) -> Vec<&ZScanRow> {
        let name = state.to_string();
        self.rows
            .iter()
            .filter(|r| r.state == name && r.error.is_empty())
            .collect()
    }
}

/// Solves `states` at charge `z`, doubling the box while the 1s2s energies
/// still move by more than the tolerance. Returns the results, the box
/// radius used and whether the box criterion was met.
pub fn solve_with_box_policy(
    config: &RunConfig,
    z: f64,
    states: &[StateLabel],
) -> Result<(Vec<StateResult>, BasisParams, bool)> {
    let params = config.basis_for(z);
    let solve = |p: BasisParams| -> Result<Vec<StateResult>> {
        let ws = Workspace::build(p)?;
        solve_states(&ws, states, config.memory_budget)
    };
    let mut best = (solve(params)?, params);
    let escalate = config.box_escalation && config.r_max.is_none() && z < 2.0;
    if !escalate {
        return Ok((best.0, best.1, true));
    }
    let watched: Vec<usize> = {
        let excited: Vec<usize> = (0..states.len()).filter(|&i| states[i].outer_n == 2).collect();
        if excited.is_empty() {
            (0..states.len()).collect()
        } else {
            excited
        }
    };
    loop {
        let r = best.1.r_max * 2.0;
        if r > config.box_limit {
            return Ok((best.0, best.1, false));
        }
        let p = best.1.with_r_max(r);
        let next = solve(p)?;
        let shifts: Vec<f64> = watched.iter().map(|&i| next[i].energy - best.0[i].energy).collect();
        if shifts.iter().all(|d| d.abs() < config.box_tolerance) {
            return Ok((next, p, true));
        }
        // The box only adds positive error, so a rise means the radial
        // basis, not the box, limits the accuracy: keep the smaller box.
        if shifts.iter().all(|&d| d > 0.0) {
            return Ok((best.0, best.1, true));
        }
        best = (next, p);
    }
}

fn scan_rows(config: &RunConfig, z: f64) -> Vec<ZScanRow> {
    let states = &config.scan_states;
    let base = config.basis_for(z);
    let row = |state: StateLabel, p: &BasisParams, converged: bool| ZScanRow {
        z,
        inv_z: 1.0 / z,
        state: state.to_string(),
        energy: None,
        s_linear: None,
        s_von_neumann: None,
        target_weight: None,
        dominant_weight: None,
        ambiguous: None,
        r_max: p.r_max,
        box_converged: converged,
        l_max: p.l_max,
        n_max: p.n_max,
        order: p.order,
        n_splines: p.n_splines,
        grid: p.grid.to_string(),
        error: String::new(),
    };
    match solve_with_box_policy(config, z, states) {
        Ok((results, p, converged)) => results
            .iter()
            .map(|r| ZScanRow {
                energy: Some(r.energy),
                s_linear: Some(r.entropies.linear),
                s_von_neumann: Some(r.entropies.von_neumann),
                target_weight: Some(r.target_weight),
                dominant_weight: Some(r.dominant_weight),
                ambiguous: Some(r.ambiguous),
                ..row(r.state, &p, converged)
            })
            .collect(),
        Err(e) => states
            .iter()
            .map(|&s| ZScanRow {
                error: e.to_string(),
                ..row(s, &base, false)
            })
            .collect(),
    }
}

/// Scan over `config.z_values`. Charges run in parallel; a failure is
/// recorded in its rows and the scan goes on.
pub fn run_zscan(config: &RunConfig) -> Result<ZScanResult> {
    config.validate()?;
    let mut zs = config.z_values.clone();
    zs.sort_by(f64::total_cmp);
    zs.dedup();
    let rows: Vec<ZScanRow> = zs.par_iter().map(|&z| scan_rows(config, z)).collect::<Vec<_>>().concat();
    Ok(ZScanResult {
        config: config.clone(),
        rows,
    })
}
