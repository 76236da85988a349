//! Exact Gaussian-state dynamics of the open critical Ising chain with a
//! magnetic impurity, and the tools to compare a subsystem with a thermal
//! ensemble.

pub mod chain;
pub mod config;
pub mod error;
pub mod experiments;
pub mod fermion;
pub mod oracle;
pub mod output;
pub mod state;
pub mod thermal;

pub use chain::{ChainSpec, CouplingMatrix};
pub use error::{Error, Result};
pub use fermion::{diagonalize, single_particle_energies, ModeBasis, Propagator};
pub use state::{CorrelationMatrix, OccupationPattern, ReducedSpectrum};
pub use thermal::{BetaMethod, FidelityResult, ThermalModel};
