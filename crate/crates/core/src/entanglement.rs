//! Nearest-neighbour negativity from a density matrix, from correlators, or
//! from energy derivatives.
//!
//! Partial transpose convention: ⟨αβ|ρ^{T_A}|γδ⟩ = ⟨γβ|ρ|αδ⟩, with basis
//! order |↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩. The "raw" functions return the unclipped
//! value −2·λ_min so that sign changes near zero stay visible.

use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exact_diag::CorrelatorSet;
use crate::model::ModelSpec;
use crate::record::EnergyRecord;

const DENSITY_TOLERANCE: f64 = 1e-10;

/// Two-site density matrix with the U(1)-symmetric structure
///
/// ```text
///  ⎡a  0  0  0⎤
///  ⎢0  b  z  0⎥
///  ⎢0  z* b  0⎥
///  ⎣0  0  0  d⎦
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSiteRdm {
    pub a: f64,
    pub b: f64,
    pub d: f64,
    pub z: Complex64,
}

impl TwoSiteRdm {
    /// Reads (a, b, d, z) from a general matrix; b is the mean of the two
    /// middle diagonal entries.
    pub fn from_matrix(m: &Matrix4<Complex64>) -> Self {
        Self {
            a: m[(0, 0)].re,
            b: 0.5 * (m[(1, 1)].re + m[(2, 2)].re),
            d: m[(3, 3)].re,
            z: m[(1, 2)],
        }
    }

    /// z = ⟨σ⁻_i σ⁺_j⟩ = (G_∥ + iG_⊥)/4.
    pub fn from_correlators(c: &CorrelatorSet) -> Self {
        Self {
            a: (1.0 + 2.0 * c.g_z + c.g_zz) / 4.0,
            b: (1.0 - c.g_zz) / 4.0,
            d: (1.0 - 2.0 * c.g_z + c.g_zz) / 4.0,
            z: Complex64::new(c.g_par, c.g_perp) / 4.0,
        }
    }

    pub fn to_matrix(&self) -> Matrix4<Complex64> {
        let mut m = Matrix4::<Complex64>::zeros();
        m[(0, 0)] = self.a.into();
        m[(1, 1)] = self.b.into();
        m[(2, 2)] = self.b.into();
        m[(3, 3)] = self.d.into();
        m[(1, 2)] = self.z;
        m[(2, 1)] = self.z.conj();
        m
    }

    pub fn trace(&self) -> f64 {
        self.a + 2.0 * self.b + self.d
    }

    pub fn validate(&self) -> Result<()> {
        let t = self.trace();
        if (t - 1.0).abs() > DENSITY_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!("trace {t}")));
        }
        let min = self.a.min(self.b).min(self.d);
        if min < -DENSITY_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!("negative diagonal entry {min}")));
        }
        if self.z.norm() > self.b + DENSITY_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!(
                "|z| = {} exceeds b = {}",
                self.z.norm(),
                self.b
            )));
        }
        Ok(())
    }

    /// Eigenvalues of the partial transpose: b, b, (a+d)/2 ± √(((a−d)/2)² + |z|²).
    pub fn partial_transpose_eigenvalues(&self) -> [f64; 4] {
        let mean = 0.5 * (self.a + self.d);
        let r = (0.25 * (self.a - self.d).powi(2) + self.z.norm_sqr()).sqrt();
        [mean - r, self.b, self.b, mean + r]
    }
}

pub fn partial_transpose(m: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    let mut pt = Matrix4::<Complex64>::zeros();
    for alpha in 0..2 {
        for beta in 0..2 {
            for gamma in 0..2 {
                for delta in 0..2 {
                    pt[(2 * alpha + beta, 2 * gamma + delta)] = m[(2 * gamma + beta, 2 * alpha + delta)];
                }
            }
        }
    }
    pt
}

fn hermitian_eigenvalues(m: &Matrix4<Complex64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(*m).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// −2·λ_min(ρ^{T_A}) of a general two-site density matrix, after checking
/// trace, Hermiticity and positivity.
pub fn negativity_raw_from_matrix(m: &Matrix4<Complex64>) -> Result<f64> {
    let trace: Complex64 = (0..4).map(|i| m[(i, i)]).sum();
    if (trace - 1.0).norm() > DENSITY_TOLERANCE {
        return Err(Error::InvalidDensityMatrix(format!("trace {trace}")));
    }
    let herm = (m - m.adjoint()).iter().map(|v| v.norm()).fold(0.0, f64::max);
    if herm > DENSITY_TOLERANCE {
        return Err(Error::InvalidDensityMatrix(format!("non-Hermitian by {herm}")));
    }
    let min = hermitian_eigenvalues(m)[0];
    if min < -DENSITY_TOLERANCE {
        return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {min}")));
    }
    Ok(-2.0 * hermitian_eigenvalues(&partial_transpose(m))[0])
}

pub fn negativity_from_matrix(m: &Matrix4<Complex64>) -> Result<f64> {
    negativity_raw_from_matrix(m).map(|v| v.max(0.0))
}

pub fn negativity_raw_from_rdm(rdm: &TwoSiteRdm) -> Result<f64> {
    rdm.validate()?;
    let ev = rdm.partial_transpose_eigenvalues();
    Ok(-2.0 * ev[0].min(ev[1]))
}

pub fn negativity_from_rdm(rdm: &TwoSiteRdm) -> Result<f64> {
    negativity_raw_from_rdm(rdm).map(|v| v.max(0.0))
}

/// ½(√(4G_z² + G_∥² + G_⊥²) − G_zz − 1), unclipped.
pub fn negativity_raw_xxz(c: &CorrelatorSet) -> f64 {
    0.5 * ((4.0 * c.g_z * c.g_z + c.g_par * c.g_par + c.g_perp * c.g_perp).sqrt() - c.g_zz - 1.0)
}

pub fn negativity_xxz(c: &CorrelatorSet) -> f64 {
    negativity_raw_xxz(c).max(0.0)
}

/// Sector states carry a nonzero magnetization density; the closed form is
/// the same with the G_z term active.
pub fn negativity_sector(c: &CorrelatorSet) -> f64 {
    negativity_xxz(c)
}

/// Negativity of a zero-twist eigenstate with magnetization density `g_z`,
/// its other correlators taken from the Hellmann–Feynman relations.
pub fn negativity_sector_from_energy(record: &EnergyRecord, g_z: f64) -> f64 {
    negativity_sector(&CorrelatorSet {
        g_z,
        g_zz: -2.0 * record.d_delta,
        g_par: -2.0 * (record.energy_density - record.delta * record.d_delta),
        g_perp: 0.0,
    })
}

/// −ε + (Δ+1)·∂ε/∂Δ − ½, unclipped.
pub fn negativity_raw_from_energy(eps: f64, deps_ddelta: f64, delta: f64) -> f64 {
    -eps + (delta + 1.0) * deps_ddelta - 0.5
}

/// Ground-state negativity from the energy density and ∂ε/∂Δ. Logs a
/// warning when the reconstructed correlators leave their physical range.
pub fn negativity_from_energy(eps: f64, deps_ddelta: f64, delta: f64) -> f64 {
    let g_zz = -2.0 * deps_ddelta;
    let g_par = -2.0 * (eps - delta * deps_ddelta);
    if g_zz.abs() > 1.0 || !(0.0..=2.0).contains(&g_par) {
        log::warn!("reconstructed correlators out of range: G_zz = {g_zz}, G_par = {g_par}");
    }
    negativity_raw_from_energy(eps, deps_ddelta, delta).max(0.0)
}

/// How the twist-frame derivative ∂ε̄/∂η is assembled from ε, ∂ε/∂Δ and ∂ε/∂Φ.
///
/// With θ = Φ/L, η = tan θ and Δ̄ = Δ/cos θ the Hamiltonian is cos θ·H̄(η, Δ̄).
/// `Consistent` is the full chain rule and agrees with the density-matrix
/// route. `FixedAnisotropy` drops the Δ̄ dependence on θ. `UnscaledFlux`
/// also treats ∂ε/∂Φ as if it were ∂ε/∂θ; the reference columns
/// for twisted rings follow this form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum TwistForm {
    #[default]
    Consistent,
    FixedAnisotropy,
    UnscaledFlux,
}

impl TwistForm {
    pub fn deta(&self, record: &EnergyRecord) -> f64 {
        let theta = record.phi / record.length as f64;
        let (s, c) = theta.sin_cos();
        let eps = record.energy_density;
        match self {
            TwistForm::Consistent => {
                c * (record.length as f64 * record.d_phi + s / c * eps) - record.delta * s * record.d_delta
            }
            TwistForm::FixedAnisotropy => c * (record.length as f64 * record.d_phi + s / c * eps),
            TwistForm::UnscaledFlux => c * (record.d_phi + s / c * eps),
        }
    }
}

/// Correlators of a zero-magnetization state reconstructed from an energy
/// record via the twist-frame Hellmann–Feynman relations.
pub fn correlators_from_energy(record: &EnergyRecord, form: TwistForm) -> Result<CorrelatorSet> {
    let theta = record.phi / record.length as f64;
    let c = theta.cos();
    if c.abs() < 1e-12 {
        return Err(Error::Domain(format!("cos(Φ/L) vanishes at Φ = {}", record.phi)));
    }
    let eta = theta.tan();
    let eps_bar = record.energy_density / c;
    let delta_bar = record.delta / c;
    let g_zz = -2.0 * record.d_delta;
    let g_perp = 2.0 * form.deta(record);
    let g_par = -2.0 * eps_bar + eta * g_perp - delta_bar * g_zz;
    Ok(CorrelatorSet {
        g_z: 0.0,
        g_zz,
        g_par,
        g_perp,
    })
}

/// Twisted-ring negativity 2·max(0, |z| − a) from an energy record.
pub fn negativity_tbc_from_energy(record: &EnergyRecord, form: TwistForm) -> Result<f64> {
    correlators_from_energy(record, form).map(|c| negativity_xxz(&c))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Ed,
    Bethe,
    FreeFermion,
    Cft,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Ed, Method::Bethe, Method::FreeFermion, Method::Cft];

    pub fn parse(name: &str) -> Option<Method> {
        Method::ALL.into_iter().find(|m| m.name() == name)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Method::Ed => "ed",
            Method::Bethe => "bethe",
            Method::FreeFermion => "ff",
            Method::Cft => "cft",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Provenance {
    Rdm(TwoSiteRdm),
    Energy(EnergyRecord),
    Correlators(CorrelatorSet),
    Asymptotic { negativity_inf: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NegativityReport {
    pub spec: ModelSpec,
    pub method: Method,
    pub value: f64,
    /// Value before clipping at zero.
    pub raw: f64,
    pub provenance: Provenance,
}

impl NegativityReport {
    pub fn new(spec: ModelSpec, method: Method, raw: f64, provenance: Provenance) -> Self {
        Self {
            spec,
            method,
            value: raw.clamp(0.0, 1.0),
            raw,
            provenance,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn singlet() -> TwoSiteRdm {
        TwoSiteRdm {
            a: 0.0,
            b: 0.5,
            d: 0.0,
            z: Complex64::new(-0.5, 0.0),
        }
    }

    #[test]
    fn product_and_singlet() {
        let product = TwoSiteRdm {
            a: 1.0,
            b: 0.0,
            d: 0.0,
            z: Complex64::new(0.0, 0.0),
        };
        assert_eq!(negativity_from_rdm(&product).unwrap(), 0.0);
        assert!((negativity_from_rdm(&singlet()).unwrap() - 1.0).abs() < 1e-15);
        assert!((negativity_from_matrix(&singlet().to_matrix()).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn xx_thermodynamic_correlators() {
        let pi2 = std::f64::consts::PI.powi(2);
        let c = CorrelatorSet {
            g_z: 0.0,
            g_zz: -4.0 / pi2,
            g_par: 4.0 / std::f64::consts::PI,
            g_perp: 0.0,
        };
        assert!((negativity_xxz(&c) - 0.339262139652).abs() < 1e-10);
        let ferro = CorrelatorSet {
            g_z: 1.0,
            g_zz: 1.0,
            g_par: 0.0,
            g_perp: 0.0,
        };
        assert_eq!(negativity_xxz(&ferro), 0.0);
    }

    #[test]
    fn invalid_matrices_rejected() {
        let mut bad = singlet();
        bad.b = 0.6;
        assert!(matches!(negativity_from_rdm(&bad), Err(Error::InvalidDensityMatrix(_))));
        let mut m = singlet().to_matrix();
        m[(1, 2)] = Complex64::new(-0.7, 0.0);
        m[(2, 1)] = Complex64::new(-0.7, 0.0);
        assert!(matches!(negativity_from_matrix(&m), Err(Error::InvalidDensityMatrix(_))));
    }

    #[test]
    fn partial_transpose_is_involution() {
        let m = singlet().to_matrix();
        assert_eq!(partial_transpose(&partial_transpose(&m)), m);
        // |↑↓⟩⟨↓↑| lands on |↓↓⟩⟨↑↑|
        assert_eq!(partial_transpose(&m)[(3, 0)], Complex64::new(-0.5, 0.0));
    }

    #[test]
    fn untwisted_record_reduces_to_ground_formula() {
        let rec = EnergyRecord {
            length: 8,
            delta: -0.3,
            phi: 0.0,
            energy_density: -0.62,
            d_delta: -0.11,
            d_phi: 0.0,
        };
        for form in [TwistForm::Consistent, TwistForm::FixedAnisotropy, TwistForm::UnscaledFlux] {
            let a = negativity_tbc_from_energy(&rec, form).unwrap();
            let b = negativity_from_energy(rec.energy_density, rec.d_delta, rec.delta);
            assert!((a - b).abs() < 1e-15);
        }
    }
}
