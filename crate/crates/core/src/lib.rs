//! Nearest-neighbour entanglement of the critical spin-1/2 XXZ ring.
//!
//! Three independent routes compute the same numbers: exact diagonalization
//! of momentum-resolved sectors, free-fermion / Bethe-ansatz energies fed
//! through Hellmann–Feynman relations, and conformal finite-size formulas.

pub mod bethe;
pub mod cache;
pub mod cft;
pub mod check;
pub mod diff;
pub mod entanglement;
pub mod error;
pub mod exact_diag;
pub mod hk;
pub mod linalg;
pub mod model;
pub mod record;
pub mod reference;
pub mod report;
pub mod thermo;

pub use error::{Error, Result};
pub use model::{Boundary, ModelSpec};
pub use record::EnergyRecord;
