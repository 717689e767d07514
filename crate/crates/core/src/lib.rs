//! Heat, work and entropy bookkeeping for one- and two-qubit systems.
//!
//! The crate evolves a qubit that dephases through a dispersive coupling to a
//! second qubit, and a qubit damped by a thermal bath. Along each trajectory
//! it splits the internal-energy change into heat and work in two ways: the
//! Alicki split (`tr(drho H)`, `tr(rho dH)`) and the eigenbasis split, where
//! eigenvalue changes count as heat and eigenprojector changes as work.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod scenario;
pub mod states;
pub mod thermo;
pub mod tolerance;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, C64};
pub use states::{DensityMatrix, SpectralDecomposition};
pub use thermo::{ThermoLedger, ThermoSample};
