//! Δ = 0 ring as free fermions.
//!
//! After Jordan–Wigner, N particles on a ring with total twist Φ see
//! quantized momenta e^{ikL} = (−1)^{N−1} and single-particle energies
//! −2cos(k − Φ/L). The ground state of the sector fills the N lowest modes.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::record::EnergyRecord;

/// Filled Fermi sea of `particles` fermions on a ring of `length` sites.
#[derive(Debug, Clone, PartialEq)]
pub struct FermiSea {
    pub length: usize,
    pub phi: f64,
    pub momenta: Vec<f64>,
}

impl FermiSea {
    pub fn new(length: usize, particles: usize, phi: f64) -> Result<Self> {
        if length < 2 || particles > length {
            return Err(Error::Domain(format!("{particles} fermions on {length} sites")));
        }
        let l = length as f64;
        let theta = phi / l;
        let offset = if particles.is_multiple_of(2) { PI / l } else { 0.0 };
        // allowed momenta around the band minimum at k = θ
        let centre = ((theta - offset) * l / (2.0 * PI)).round() as i64;
        let half = length as i64;
        let mut modes: Vec<f64> = (centre - half..=centre + half)
            .map(|m| offset + 2.0 * PI * m as f64 / l)
            .collect();
        modes.sort_by(|a, b| (a - theta).abs().total_cmp(&(b - theta).abs()).then(a.total_cmp(b)));
        modes.truncate(particles);
        modes.sort_by(f64::total_cmp);
        Ok(Self {
            length,
            phi,
            momenta: modes,
        })
    }

    fn theta(&self) -> f64 {
        self.phi / self.length as f64
    }

    pub fn energy(&self) -> f64 {
        let t = self.theta();
        self.momenta.iter().map(|k| -2.0 * (k - t).cos()).sum()
    }

    pub fn density(&self) -> f64 {
        self.momenta.len() as f64 / self.length as f64
    }

    /// C₁ = ⟨c†_j c_{j+1}⟩ = (1/L)Σ_occ e^{ik}.
    pub fn hopping(&self) -> Complex64 {
        self.momenta.iter().map(|&k| Complex64::from_polar(1.0, k)).sum::<Complex64>() / self.length as f64
    }

    /// ⟨σᶻ_j σᶻ_{j+1}⟩ by Wick contraction: (2ρ − 1)² − 4|C₁|².
    pub fn g_zz(&self) -> f64 {
        (2.0 * self.density() - 1.0).powi(2) - 4.0 * self.hopping().norm_sqr()
    }

    pub fn denergy_dtheta(&self) -> f64 {
        let t = self.theta();
        self.momenta.iter().map(|k| -2.0 * (k - t).sin()).sum()
    }

    pub fn record(&self) -> EnergyRecord {
        let l = self.length as f64;
        EnergyRecord {
            length: self.length,
            delta: 0.0,
            phi: self.phi,
            energy_density: self.energy() / l,
            d_delta: -0.5 * self.g_zz(),
            d_phi: self.denergy_dtheta() / (l * l),
        }
    }
}

/// ε, ∂ε/∂Δ and ∂ε/∂Φ of the half-filled ring at Δ = 0.
pub fn xx_energy_and_derivatives(length: usize, phi: f64) -> Result<EnergyRecord> {
    if !length.is_multiple_of(2) || !(0.0..2.0 * PI).contains(&phi) {
        return Err(Error::Domain(format!("L = {length}, Φ = {phi}")));
    }
    Ok(FermiSea::new(length, length / 2, phi)?.record())
}

/// Sector n = L/2 − r at Δ = 0 (r fermions ↔ r up spins).
pub fn xx_sector_record(length: usize, n: usize, phi: f64) -> Result<EnergyRecord> {
    if n > length / 2 {
        return Err(Error::Domain(format!("sector n = {n} on L = {length}")));
    }
    Ok(FermiSea::new(length, length / 2 - n, phi)?.record())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_site_ring() {
        let r = xx_energy_and_derivatives(4, 0.0).unwrap();
        assert!((r.energy_density + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((r.g_zz() + 0.5).abs() < 1e-15);
        assert_eq!(r.d_phi, 0.0);
    }

    #[test]
    fn thermodynamic_limit_correlators() {
        let r = xx_energy_and_derivatives(4096, 0.0).unwrap();
        assert!((r.energy_density + 2.0 / PI).abs() < 1e-6);
        assert!((r.g_zz() + 4.0 / (PI * PI)).abs() < 1e-6);
    }

    #[test]
    fn sea_is_symmetric_around_twist() {
        let sea = FermiSea::new(8, 4, 0.0).unwrap();
        let sum: f64 = sea.momenta.iter().sum();
        assert!(sum.abs() < 1e-14);
        assert_eq!(FermiSea::new(8, 3, 0.0).unwrap().momenta.len(), 3);
    }
}
