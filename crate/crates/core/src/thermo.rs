//! Thermodynamic-limit energy density and its Δ-derivative.
//!
//! Closed form, with Δ = −cos γ:
//!
//! ```text
//! ε∞ = −Δ/2 − sin γ ∫ sinh((π−γ)x) / (sinh(πx) cosh(γx)) dx     (x over ℝ)
//! ```
//!
//! The integrand decays like 2e^{−2γx}, so a finite range and composite
//! Gauss–Legendre panels reach machine precision. The second source fits
//! ε(L) = ε∞ + a/L² + b/L⁴ to Bethe energies at three sizes.

use std::collections::HashMap;
use std::num::NonZeroUsize;
use std::sync::{OnceLock, RwLock};

use gauss_quad::legendre::GaussLegendre;

use crate::bethe::{solve_pattern, BetheConfig, RootPattern};
use crate::error::{Error, Result};
use crate::model::{gamma_from_delta, ModelSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ThermoSource {
    ClosedForm,
    Extrapolated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoLimit {
    pub delta: f64,
    pub energy_density_inf: f64,
    pub denergy_ddelta_inf: f64,
    pub negativity_inf: f64,
    pub source: ThermoSource,
    /// Estimated absolute error of ε∞ and ∂ε∞/∂Δ (zero is not claimed for
    /// the closed form; its quadrature error is below 1e−14).
    pub error_estimate: f64,
}

impl ThermoLimit {
    fn new(delta: f64, eps: f64, deps: f64, source: ThermoSource, error_estimate: f64) -> Self {
        Self {
            delta,
            energy_density_inf: eps,
            denergy_ddelta_inf: deps,
            negativity_inf: -eps + (delta + 1.0) * deps - 0.5,
            source,
            error_estimate,
        }
    }

    /// G∞ = −ε∞ + Δ·∂ε∞/∂Δ, i.e. half the limiting G_∥.
    pub fn g_inf(&self) -> f64 {
        -self.energy_density_inf + self.delta * self.denergy_ddelta_inf
    }
}

fn rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(NonZeroUsize::new(24).unwrap()))
}

/// ∫₀^∞ f over unit-width panels (scaled by 1/γ) up to where 2e^{−2γx}·x drops below 1e−20.
fn half_line<F: Fn(f64) -> f64>(gamma: f64, f: F) -> f64 {
    let width = 1.0 / gamma.min(1.0);
    let end = 26.0 / gamma;
    let panels = (end / width).ceil() as usize;
    (0..panels)
        .map(|k| rule().integrate(k as f64 * width, (k + 1) as f64 * width, &f))
        .sum()
}

/// (ε∞, dε∞/dγ) from the integral representation.
fn closed_form_gamma(gamma: f64) -> (f64, f64) {
    let pi = std::f64::consts::PI;
    let i0 = 2.0
        * half_line(gamma, |x| {
            ((pi - gamma) * x).sinh() / ((pi * x).sinh() * (gamma * x).cosh())
        });
    // ∂/∂γ of the integrand is −x·coth(πx)/cosh²(γx)
    let i1 = -2.0
        * half_line(gamma, |x| {
            let c = (gamma * x).cosh();
            x / (pi * x).tanh() / (c * c)
        });
    let (s, c) = gamma.sin_cos();
    let eps = 0.5 * c - s * i0;
    let deps = -0.5 * s - c * i0 - s * i1;
    (eps, deps)
}

pub fn closed_form(delta: f64) -> Result<ThermoLimit> {
    let gamma = gamma_from_delta(delta)?;
    let (eps, deps_dg) = closed_form_gamma(gamma);
    Ok(ThermoLimit::new(delta, eps, deps_dg / gamma.sin(), ThermoSource::ClosedForm, 1e-14))
}

/// Sizes used by the extrapolated source.
pub const EXTRAPOLATION_SIZES: [usize; 3] = [256, 512, 1024];

/// Acceptance bound on the extrapolation error estimate.
pub const EXTRAPOLATION_BOUND: f64 = 1e-9;

/// ε∞ of the fit y(L) = y∞ + a/L² + b/L⁴ through three points.
fn fit_limit(sizes: [usize; 3], values: [f64; 3]) -> f64 {
    // Neville extrapolation to h = 0 in the variable h = 1/L²
    let h: Vec<f64> = sizes.iter().map(|&l| 1.0 / (l as f64 * l as f64)).collect();
    let mut p = values.to_vec();
    for k in 1..3 {
        for i in 0..3 - k {
            p[i] = (h[i] * p[i + 1] - h[i + k] * p[i]) / (h[i] - h[i + k]);
        }
    }
    p[0]
}

/// Extrapolates a Bethe root pattern (ground state or a sector) to L → ∞.
/// The error estimate compares fits on [256, 512, 1024] and [128, 256, 512]
/// and must stay below `bound`.
pub fn extrapolated_pattern(delta: f64, pattern: RootPattern, cfg: &BetheConfig, bound: f64) -> Result<ThermoLimit> {
    let sizes = [128usize, 256, 512, 1024];
    let mut eps = [0.0; 4];
    let mut deps = [0.0; 4];
    for (k, &l) in sizes.iter().enumerate() {
        let rec = solve_pattern(&ModelSpec::periodic(l, delta)?, pattern, cfg)?.record()?;
        eps[k] = rec.energy_density;
        deps[k] = rec.d_delta;
    }
    let fine = |v: &[f64; 4]| fit_limit(EXTRAPOLATION_SIZES, [v[1], v[2], v[3]]);
    let coarse = |v: &[f64; 4]| fit_limit([128, 256, 512], [v[0], v[1], v[2]]);
    let (e, d) = (fine(&eps), fine(&deps));
    let estimate = (e - coarse(&eps)).abs().max((d - coarse(&deps)).abs());
    if estimate > bound {
        return Err(Error::Extrapolation { estimate, bound });
    }
    Ok(ThermoLimit::new(delta, e, d, ThermoSource::Extrapolated, estimate))
}

pub fn extrapolated(delta: f64, cfg: &BetheConfig) -> Result<ThermoLimit> {
    extrapolated_pattern(delta, RootPattern::Ground, cfg, EXTRAPOLATION_BOUND)
}

fn memo() -> &'static RwLock<HashMap<u64, ThermoLimit>> {
    static MEMO: OnceLock<RwLock<HashMap<u64, ThermoLimit>>> = OnceLock::new();
    MEMO.get_or_init(Default::default)
}

/// Closed-form limit, memoized per Δ.
pub fn thermo_limit(delta: f64) -> Result<ThermoLimit> {
    let key = delta.to_bits();
    if let Some(t) = memo().read().unwrap().get(&key) {
        return Ok(*t);
    }
    let t = closed_form(delta)?;
    memo().write().unwrap().insert(key, t);
    Ok(t)
}

/// Limit for the sector n = L/2 − r. At fixed n the magnetization density
/// vanishes as L → ∞, so the limit coincides with the ground state's; the
/// extrapolated sector energies back this up in the tests.
pub fn thermo_limit_sector(delta: f64, _n: usize) -> Result<ThermoLimit> {
    thermo_limit(delta)
}

/// ∂²ε∞/∂Δ² by differentiating the closed-form first derivative.
pub fn second_derivative_inf(delta: f64) -> Result<f64> {
    gamma_from_delta(delta)?;
    let h = 1e-4_f64.min(0.5 * (1.0 - delta.abs()));
    Ok(crate::diff::derivative(
        |d| closed_form(d).map(|t| t.denergy_ddelta_inf).unwrap_or(f64::NAN),
        delta,
        h,
        2,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn free_fermion_limit() {
        let t = closed_form(0.0).unwrap();
        assert!((t.energy_density_inf + 2.0 / PI).abs() < 1e-14);
        assert!((t.denergy_ddelta_inf - 2.0 / (PI * PI)).abs() < 1e-13);
        assert!((t.negativity_inf - 0.339262139652).abs() < 1e-12);
    }

    #[test]
    fn isotropic_third() {
        let t = closed_form(-0.5).unwrap();
        assert!((t.negativity_inf - 0.375).abs() < 1e-12);
    }

    #[test]
    fn correlator_bound() {
        for k in 0..19 {
            let t = thermo_limit(-0.9 + 0.1 * k as f64).unwrap();
            assert!((2.0 * t.denergy_ddelta_inf).abs() <= 1.0);
        }
    }

    #[test]
    fn derivative_matches_difference() {
        for delta in [-0.7, 0.1, 0.8] {
            let a = closed_form(delta).unwrap().denergy_ddelta_inf;
            let b = crate::diff::derivative(|d| closed_form(d).unwrap().energy_density_inf, delta, 1e-3, 2);
            assert!((a - b).abs() < 1e-11, "Δ={delta}: {a} vs {b}");
        }
    }

    #[test]
    fn neville_is_exact_for_the_model() {
        let f = |l: usize| 0.3 + 2.0 / (l * l) as f64 - 5.0 / (l as f64).powi(4);
        let got = fit_limit([8, 16, 32], [f(8), f(16), f(32)]);
        assert!((got - 0.3).abs() < 1e-14);
    }

    #[test]
    fn domain_checked() {
        assert!(matches!(thermo_limit(1.0), Err(Error::Domain(_))));
    }
}
