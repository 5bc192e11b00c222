//! Conformal finite-size predictions.
//!
//! Ground energy density ε(L) = ε∞ − πcξ/(6L²), tower states add
//! 2πξ(x + j + j′)/L², and a twist lowers c to ĉ(Φ) = 1 − 3Φ²/(2π(π−γ)).
//! The negativity expansions below keep terms through order L⁻².

use std::f64::consts::PI;

use crate::entanglement::{negativity_tbc_from_energy, TwistForm};
use crate::error::{Error, Result};
use crate::model::{gamma_from_delta, xi_of_gamma};
use crate::record::EnergyRecord;
use crate::thermo::ThermoLimit;

/// Conformal data of one tower state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CftContext {
    pub central_charge: f64,
    pub xi: f64,
    pub x_alpha: f64,
    pub j: u32,
    pub j_prime: u32,
    pub degeneracy: usize,
}

impl CftContext {
    pub fn ground(delta: f64) -> Result<Self> {
        Self::twisted(delta, 0.0)
    }

    pub fn twisted(delta: f64, phi: f64) -> Result<Self> {
        let gamma = gamma_from_delta(delta)?;
        Ok(Self {
            central_charge: effective_central_charge(phi, gamma),
            xi: xi_of_gamma(gamma)?,
            x_alpha: 0.0,
            j: 0,
            j_prime: 0,
            degeneracy: 1,
        })
    }

    /// Zero-momentum primary of sector n = L/2 − r.
    pub fn sector(delta: f64, n: usize) -> Result<Self> {
        let gamma = gamma_from_delta(delta)?;
        Ok(Self {
            x_alpha: anomalous_dimension(n, gamma),
            ..Self::ground(delta)?
        })
    }

    /// The n = 0 state with x = 2.
    pub fn marginal(delta: f64) -> Result<Self> {
        Ok(Self {
            x_alpha: 2.0,
            ..Self::ground(delta)?
        })
    }

    pub fn scaling_dimension(&self) -> f64 {
        self.x_alpha + f64::from(self.j + self.j_prime)
    }
}

pub fn energy_fss(eps_inf: f64, ctx: &CftContext, length: usize) -> f64 {
    let l = length as f64;
    eps_inf - PI * ctx.central_charge * ctx.xi / (6.0 * l * l)
}

pub fn tower_energy(eps_fss: f64, ctx: &CftContext, length: usize) -> f64 {
    let l = length as f64;
    eps_fss + 2.0 * PI * ctx.xi * ctx.scaling_dimension() / (l * l)
}

pub fn effective_central_charge(phi: f64, gamma: f64) -> f64 {
    1.0 - 3.0 * phi * phi / (2.0 * PI * (PI - gamma))
}

pub fn anomalous_dimension(n: usize, gamma: f64) -> f64 {
    let n = n as f64;
    n * n * (PI - gamma) / (2.0 * PI)
}

/// N∞ + π²c/(6γL²)·[sin γ + (1+Δ)/γ + Δ√(1+Δ)/√(1−Δ)] with c = 1.
pub fn negativity_cft_ground(delta: f64, length: usize, thermo: &ThermoLimit) -> Result<f64> {
    let gamma = gamma_from_delta(delta)?;
    let l = length as f64;
    let bracket = gamma.sin() + (1.0 + delta) / gamma + delta * ((1.0 + delta) / (1.0 - delta)).sqrt();
    Ok(thermo.negativity_inf + PI * PI / (6.0 * gamma * l * l) * bracket)
}

/// The amplitudes A = πξ/6 and B = 3/(2π(π−γ)) of ε = ε∞ − A(1 − BΦ²)/L²,
/// with their Δ-derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwistAmplitudes {
    pub a: f64,
    pub b: f64,
    pub da: f64,
    pub db: f64,
}

impl TwistAmplitudes {
    pub fn new(delta: f64) -> Result<Self> {
        let gamma = gamma_from_delta(delta)?;
        let (s, c) = gamma.sin_cos();
        let xi = xi_of_gamma(gamma)?;
        let dxi_dg = PI * (gamma * c - s) / (gamma * gamma);
        let dg_dd = 1.0 / s;
        let a = PI * xi / 6.0;
        let b = 3.0 / (2.0 * PI * (PI - gamma));
        Ok(Self {
            a,
            b,
            da: PI / 6.0 * dxi_dg * dg_dd,
            db: 3.0 / (2.0 * PI * (PI - gamma).powi(2)) * dg_dd,
        })
    }

    /// A·ĉ and its Δ-derivative.
    pub fn ac(&self, phi: f64) -> (f64, f64) {
        let p2 = phi * phi;
        (
            self.a * (1.0 - self.b * p2),
            self.da * (1.0 - self.b * p2) - self.a * self.db * p2,
        )
    }
}

/// Energy record implied by the finite-size formula with ĉ(Φ).
pub fn cft_energy_record(delta: f64, phi: f64, length: usize, thermo: &ThermoLimit) -> Result<EnergyRecord> {
    let amp = TwistAmplitudes::new(delta)?;
    let h = 1.0 / (length as f64).powi(2);
    let (ac, dac) = amp.ac(phi);
    Ok(EnergyRecord {
        length,
        delta,
        phi,
        energy_density: thermo.energy_density_inf - ac * h,
        d_delta: thermo.denergy_ddelta_inf - dac * h,
        d_phi: 2.0 * amp.a * amp.b * phi * h,
    })
}

/// Twisted-ring negativity from the finite-size energy record, evaluated
/// without further expansion.
pub fn negativity_cft_tbc_direct(
    delta: f64,
    phi: f64,
    length: usize,
    thermo: &ThermoLimit,
    form: TwistForm,
) -> Result<f64> {
    negativity_tbc_from_energy(&cft_energy_record(delta, phi, length, thermo)?, form)
}

/// Coefficient K of N = N∞ + K/L² + o(L⁻²) for the twisted ring.
///
/// Expanding the twist-frame correlators to order L⁻² gives
/// K = Aĉ − (1+Δ)(Aĉ)′ + (Φ²/2)(G∞ + d)²/G∞ with G∞ = −ε∞ + Δε∞′ and d the
/// O(θ) coefficient of ∂ε̄/∂η.
pub fn tbc_coefficient(delta: f64, phi: f64, thermo: &ThermoLimit, form: TwistForm) -> Result<f64> {
    let amp = TwistAmplitudes::new(delta)?;
    let (ac, dac) = amp.ac(phi);
    let g = thermo.g_inf();
    if g == 0.0 {
        return Err(Error::DegenerateInput("G∞ vanishes".into()));
    }
    let eps = thermo.energy_density_inf;
    let d = match form {
        TwistForm::Consistent => eps + 2.0 * amp.a * amp.b - delta * thermo.denergy_ddelta_inf,
        TwistForm::FixedAnisotropy => eps + 2.0 * amp.a * amp.b,
        TwistForm::UnscaledFlux => eps,
    };
    Ok(ac - (1.0 + delta) * dac + 0.5 * phi * phi * (g + d).powi(2) / g)
}

/// Twisted-ring negativity through order L⁻².
pub fn negativity_cft_tbc(delta: f64, phi: f64, length: usize, thermo: &ThermoLimit, form: TwistForm) -> Result<f64> {
    let l = length as f64;
    Ok(thermo.negativity_inf + tbc_coefficient(delta, phi, thermo, form)? / (l * l))
}

/// Normalization of the magnetization density G_z = κ·n/L entering the
/// sector expansion: κ = 2 for Pauli matrices (⟨σᶻ⟩), κ = 1 for spin
/// operators (⟨Sᶻ⟩), which reproduces the 3γn² term as often printed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Magnetization {
    #[default]
    Pauli,
    Spin,
}

impl Magnetization {
    fn n2_coefficient(&self, gamma: f64) -> f64 {
        match self {
            Magnetization::Pauli => 12.0 * gamma,
            Magnetization::Spin => 3.0 * gamma,
        }
    }
}

/// Sector-n negativity through order L⁻²:
///
/// ```text
/// N_n^∞ + [κ'γn² + π sin γ·G∞·z_n + π(ΔG∞ + |G∞|)(w_n/γ − z_n cot γ)] / (6γL²|G∞|)
/// w_n = π(c − 6n²),  z_n = πc − 6n²(π − γ)
/// ```
pub fn negativity_cft_sector(
    delta: f64,
    n: usize,
    length: usize,
    thermo_n: &ThermoLimit,
    convention: Magnetization,
) -> Result<f64> {
    let gamma = gamma_from_delta(delta)?;
    let g = thermo_n.g_inf();
    if g == 0.0 {
        return Err(Error::DegenerateInput("G∞ vanishes".into()));
    }
    let l = length as f64;
    let c = 1.0;
    let n2 = (n * n) as f64;
    let w = PI * (c - 6.0 * n2);
    let z = PI * c - 6.0 * n2 * (PI - gamma);
    let n_inf = g.abs() + thermo_n.denergy_ddelta_inf - 0.5;
    let bracket = convention.n2_coefficient(gamma) * n2
        + PI * gamma.sin() * g * z
        + PI * (delta * g + g.abs()) * (w / gamma - z / gamma.tan());
    Ok(n_inf + bracket / (6.0 * gamma * l * l * g.abs()))
}

/// M + (2π/L²)·∂_λ[ξ(x + j + j′)]·∂_λM: first-order shift of an
/// entanglement measure along a conformal tower.
pub fn tower_entanglement_shift(m_ground: f64, dm_dlambda: f64, dcoef_dlambda: f64, length: usize) -> f64 {
    let l = length as f64;
    m_ground + 2.0 * PI / (l * l) * dcoef_dlambda * dm_dlambda
}
