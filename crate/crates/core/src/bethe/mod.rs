//! Reference energies for arbitrary L: free fermions at Δ = 0 and a Bethe
//! ansatz Newton solver for −1 < Δ < 1.

pub mod free_fermion;
pub mod solver;

pub use free_fermion::{xx_energy_and_derivatives, xx_sector_record, FermiSea};
pub use solver::{
    derivative_delta, solve_ground, solve_pattern, solve_pattern_from, solve_sector, BetheConfig, BetheSolution,
    RootPattern,
};
