//! Configuration interaction for two-electron `L = 0` states.

mod config;
mod hamiltonian;
mod slater;
mod state;

pub use config::{build_config_list, config_count, l_letter, ConfigList, Configuration, Spin};
pub use hamiltonian::{assemble_hamiltonian, hamiltonian_element, DEFAULT_MEMORY_BUDGET};
pub use slater::{slater_integral, OrbitalGrid, SlaterIntegralTable, SlaterQuadrature, TwoElectronGrid};
pub use state::{
    diagonalize, parse_state_dump, select_state, write_state_dump, CIState, Spectrum, StateDump, StateLabel,
};
