//! Desk-scale electrostatics and lumped-element reduction.
//!
//! A 2D finite-difference Laplace solve on the chip plane gives the Maxwell
//! capacitance matrix of a set of pads. Non-dynamical nodes are removed by
//! Schur complement and the remaining island pair yields E_C.

mod capacitance;
mod josephson;
mod layout;
mod poisson;

pub use capacitance::{
    capacitance_for_charging_energy, differential_capacitance, effective_charging_energy, maxwell_capacitance,
    reduce_capacitance, MaxwellCapacitanceMatrix, MAX_ASYMMETRY,
};
pub use josephson::{
    exact_josephson_energy, josephson_energy_series, junction_current, JunctionBranch, REDUCED_FLUX_QUANTUM,
};
pub use layout::{Conductor, ConductorLayout, Rect, DEFAULT_DEPTH_UM, DEFAULT_PERMITTIVITY};
pub use poisson::{laplace_residual, solve_poisson, PotentialGrid, CG_TOLERANCE};
