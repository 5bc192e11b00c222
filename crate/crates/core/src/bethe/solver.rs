//! Newton solver for the Bethe equations in the trigonometric regime.
//!
//! With Δ = −cos γ the ring maps (sublattice rotation) onto twice the
//! antiferromagnetic chain at anisotropy cos γ. For M magnons with
//! rapidities λ_j the logarithmic equations read
//!
//! ```text
//! F_j = θ₁(λ_j) − (2π I_j + Φ + Σ_{l≠j} θ₂(λ_j − λ_l)) / L = 0,
//! θ_n(λ) = 2 arctan(cot(nγ/2) · tanh λ),
//! ```
//!
//! and ε = −Δ/2 − (2/L) Σ_j sin²γ / (cosh 2λ_j − cos γ).
//!
//! The unknowns are τ_j = tanh λ_j. A rapidity on the line Im λ = π/2 has
//! |τ| > 1 (tanh becomes coth), and a root running off to λ = ∞ passes
//! smoothly through τ = ±1, so both kinds share one real coordinate:
//!
//! ```text
//! θ₁ = 2 arctan(cot(γ/2) τ_j),
//! θ₂ = 2 arctan(cot γ (τ_j − τ_k)/(1 − τ_j τ_k)),
//! cosh 2λ = (1 + τ²)/(1 − τ²).
//! ```

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::{gamma_from_delta, ModelSpec};
use crate::record::EnergyRecord;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetheConfig {
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Largest anisotropy increment in the continuation from Δ = 0.
    pub delta_step: f64,
    /// Two rapidities of the same kind closer than this are a collision.
    pub collision_gap: f64,
}

impl Default for BetheConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_iterations: 60,
            delta_step: 0.05,
            collision_gap: 1e-10,
        }
    }
}

/// Which eigenstate the quantum numbers describe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RootPattern {
    /// M = L/2, symmetric quantum numbers.
    Ground,
    /// M = L/2 − n, symmetric quantum numbers (zero momentum).
    Sector(usize),
    /// M = L/2 with the two outermost quantum numbers pushed out by one;
    /// those two rapidities start on the Im λ = π/2 line.
    Marginal,
}

impl RootPattern {
    pub fn magnons(&self, length: usize) -> Result<usize> {
        match *self {
            RootPattern::Ground | RootPattern::Marginal => Ok(length / 2),
            RootPattern::Sector(n) if n <= length / 2 => Ok(length / 2 - n),
            RootPattern::Sector(n) => Err(Error::Domain(format!("sector n = {n} on L = {length}"))),
        }
    }

    pub fn quantum_numbers(&self, length: usize) -> Result<Vec<f64>> {
        let m = self.magnons(length)?;
        let mut q: Vec<f64> = (0..m).map(|j| j as f64 - (m as f64 - 1.0) / 2.0).collect();
        if *self == RootPattern::Marginal {
            if m < 2 {
                return Err(Error::Domain("marginal state needs at least two magnons".into()));
            }
            q[0] -= 1.0;
            q[m - 1] += 1.0;
        }
        Ok(q)
    }
}

/// 2·arctan(c·t) with its t- and c-derivatives.
#[inline]
fn phase(t: f64, c: f64) -> (f64, f64, f64) {
    let w = 1.0 / (1.0 + c * c * t * t);
    (2.0 * (c * t).atan(), 2.0 * c * w, 2.0 * t * w)
}

/// cot(nγ/2) and its γ-derivative.
fn coupling(n: f64, gamma: f64) -> (f64, f64) {
    let a = 0.5 * n * gamma;
    let s = a.sin();
    (a.cos() / s, -0.5 * n / (s * s))
}

/// Magnon energy −sin²γ/(cosh 2λ − cos γ) in terms of τ, with its τ and γ
/// derivatives.
fn magnon_energy(t: f64, gamma: f64) -> (f64, f64, f64) {
    let (sg, cg) = gamma.sin_cos();
    let u = 1.0 - t * t;
    let v = 1.0 + t * t - cg * u;
    let e = -sg * sg * u / v;
    let du = -2.0 * t;
    let dv = 2.0 * t * (1.0 + cg);
    let de_dt = -sg * sg * (du * v - u * dv) / (v * v);
    let de_dg = -sg * u * (2.0 * cg * v - sg * sg * u) / (v * v);
    (e, de_dt, de_dg)
}

struct Equations<'a> {
    length: usize,
    gamma: f64,
    phi: f64,
    quantum_numbers: &'a [f64],
}

impl Equations<'_> {
    /// Residual vector, Jacobian, and ∂F/∂γ.
    fn evaluate(&self, x: &[f64]) -> (DVector<f64>, DMatrix<f64>, DVector<f64>) {
        let m = x.len();
        let l = self.length as f64;
        let (c1, dc1) = coupling(1.0, self.gamma);
        let (c2, dc2) = coupling(2.0, self.gamma);
        let mut f = DVector::zeros(m);
        let mut jac = DMatrix::zeros(m, m);
        let mut dg = DVector::zeros(m);
        for j in 0..m {
            let (t1, d1, g1) = phase(x[j], c1);
            let mut sum = 0.0;
            let mut dsum_g = 0.0;
            let mut diag = d1;
            for k in 0..m {
                if k == j {
                    continue;
                }
                let den = 1.0 - x[j] * x[k];
                let r = (x[j] - x[k]) / den;
                let (t2, d2, g2) = phase(r, c2);
                sum += t2;
                dsum_g += g2 * dc2;
                diag -= d2 * (1.0 - x[k] * x[k]) / (den * den) / l;
                jac[(j, k)] = -d2 * (x[j] * x[j] - 1.0) / (den * den) / l;
            }
            jac[(j, j)] = diag;
            f[j] = t1 - (2.0 * PI * self.quantum_numbers[j] + self.phi + sum) / l;
            dg[j] = g1 * dc1 - dsum_g / l;
        }
        (f, jac, dg)
    }

    fn residual(&self, x: &[f64]) -> f64 {
        self.evaluate(x).0.amax()
    }
}

/// Free-fermion roots: the exact solution at γ = π/2.
pub fn free_fermion_guess(length: usize, phi: f64, quantum_numbers: &[f64]) -> Vec<f64> {
    let l = length as f64;
    quantum_numbers
        .iter()
        .map(|&i| (0.5 * (2.0 * PI * i + phi) / l).tan())
        .collect()
}

fn newton(eq: &Equations, mut x: Vec<f64>, cfg: &BetheConfig) -> Result<(Vec<f64>, f64)> {
    let (mut f, mut jac, _) = eq.evaluate(&x);
    let mut res = f.amax();
    let mut best = res;
    for _ in 0..cfg.max_iterations {
        if res < cfg.tolerance {
            break;
        }
        let step = jac
            .clone()
            .lu()
            .solve(&(-&f))
            .ok_or(Error::NonConvergence {
                iterations: 0,
                residual: res,
            })?;
        let mut scale = 1.0;
        loop {
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, d)| a + scale * d).collect();
            let r = eq.residual(&trial);
            if r.is_finite() && (r < res || scale < 1e-3) {
                x = trial;
                break;
            }
            if scale < 1e-3 {
                return Err(Error::NonConvergence {
                    iterations: 0,
                    residual: best,
                });
            }
            scale *= 0.5;
        }
        let e = eq.evaluate(&x);
        f = e.0;
        jac = e.1;
        res = f.amax();
        best = best.min(res);
    }
    // NaN residuals count as failures
    if res.is_nan() || res >= cfg.tolerance {
        return Err(Error::NonConvergence {
            iterations: cfg.max_iterations,
            residual: best,
        });
    }
    // one polishing step, kept only if it does not make things worse
    if let Some(step) = jac.lu().solve(&(-&f)) {
        let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, d)| a + d).collect();
        let r = eq.residual(&trial);
        if r <= res {
            return Ok((trial, r));
        }
    }
    Ok((x, res))
}

fn check_collisions(x: &[f64], gap: f64) -> Result<()> {
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            if (x[i] - x[j]).abs() < gap {
                return Err(Error::RootCollision {
                    i,
                    j,
                    gap: (x[i] - x[j]).abs(),
                });
            }
        }
    }
    Ok(())
}

/// A converged root set.
#[derive(Debug, Clone, PartialEq)]
pub struct BetheSolution {
    pub spec: ModelSpec,
    pub pattern: RootPattern,
    pub quantum_numbers: Vec<f64>,
    /// τ_j = tanh λ_j.
    pub roots: Vec<f64>,
    pub gamma: f64,
    pub energy_density: f64,
    pub converged: bool,
    pub residual: f64,
}

impl BetheSolution {
    pub fn n_down(&self) -> usize {
        self.roots.len()
    }

    /// Rapidities λ_j; roots with |τ| > 1 sit on Im λ = π/2.
    pub fn rapidities(&self) -> Vec<num_complex::Complex64> {
        self.roots
            .iter()
            .map(|&t| {
                if t.abs() < 1.0 {
                    t.atanh().into()
                } else {
                    num_complex::Complex64::new((1.0 / t).atanh(), std::f64::consts::FRAC_PI_2)
                }
            })
            .collect()
    }

    fn equations(&self) -> Equations<'_> {
        Equations {
            length: self.spec.length,
            gamma: self.gamma,
            phi: self.spec.phase(),
            quantum_numbers: &self.quantum_numbers,
        }
    }

    /// ε with ∂ε/∂Δ and ∂ε/∂Φ from implicit differentiation of the equations.
    pub fn record(&self) -> Result<EnergyRecord> {
        let l = self.spec.length as f64;
        let eq = self.equations();
        let (_, jac, df_dg) = eq.evaluate(&self.roots);
        let m = self.roots.len();
        let (mut de_dg, mut grad) = (0.0, DVector::zeros(m));
        for j in 0..m {
            let (_, dx, dg) = magnon_energy(self.roots[j], self.gamma);
            de_dg += dg;
            grad[j] = dx;
        }
        let (mut dx_dg, mut dx_dphi) = (DVector::zeros(m), DVector::zeros(m));
        if m > 0 {
            let lu = jac.lu();
            let singular = || Error::DegenerateInput("singular Bethe Jacobian".into());
            dx_dg = lu.solve(&(-df_dg)).ok_or_else(singular)?;
            dx_dphi = lu.solve(&DVector::from_element(m, 1.0 / l)).ok_or_else(singular)?;
        }
        // ε = cos γ / 2 + (2/L) Σ e_j
        let deps_dg = -0.5 * self.gamma.sin() + 2.0 / l * (de_dg + grad.dot(&dx_dg));
        Ok(EnergyRecord {
            length: self.spec.length,
            delta: self.spec.delta,
            phi: self.spec.phase(),
            energy_density: self.energy_density,
            d_delta: deps_dg / self.gamma.sin(),
            d_phi: 2.0 / l * grad.dot(&dx_dphi),
        })
    }
}

fn energy_density(length: usize, gamma: f64, roots: &[f64]) -> f64 {
    let l = length as f64;
    let sum: f64 = roots.iter().map(|&t| magnon_energy(t, gamma).0).sum();
    0.5 * gamma.cos() + 2.0 / l * sum
}

fn validate(spec: &ModelSpec) -> Result<()> {
    let phi = spec.phase();
    if phi >= PI {
        return Err(Error::Domain(format!(
            "Bethe path supports twists Φ < π, got {phi}"
        )));
    }
    Ok(())
}

/// Solves the pattern at `spec`, either from `guess` (roots at a nearby
/// point) or by continuation in Δ from the free-fermion solution.
pub fn solve_pattern_from(
    spec: &ModelSpec,
    pattern: RootPattern,
    guess: Option<&[f64]>,
    cfg: &BetheConfig,
) -> Result<BetheSolution> {
    validate(spec)?;
    let length = spec.length;
    let phi = spec.phase();
    let quantum_numbers = pattern.quantum_numbers(length)?;
    let target = gamma_from_delta(spec.delta)?;
    let mut x = match guess {
        Some(g) if g.len() == quantum_numbers.len() => g.to_vec(),
        _ => {
            let mut x = free_fermion_guess(length, phi, &quantum_numbers);
            let steps = (spec.delta.abs() / cfg.delta_step).ceil() as usize;
            for s in 1..steps {
                let d = spec.delta * s as f64 / steps as f64;
                let eq = Equations {
                    length,
                    gamma: gamma_from_delta(d)?,
                    phi,
                    quantum_numbers: &quantum_numbers,
                };
                x = newton(&eq, x, cfg)?.0;
            }
            x
        }
    };
    let eq = Equations {
        length,
        gamma: target,
        phi,
        quantum_numbers: &quantum_numbers,
    };
    let (roots, residual) = if quantum_numbers.is_empty() {
        (Vec::new(), 0.0)
    } else {
        newton(&eq, std::mem::take(&mut x), cfg)?
    };
    check_collisions(&roots, cfg.collision_gap)?;
    let energy_density = energy_density(length, target, &roots);
    log::debug!("Bethe L={length} Δ={} Φ={phi} {pattern:?}: residual {residual:e}", spec.delta);
    Ok(BetheSolution {
        spec: *spec,
        pattern,
        quantum_numbers,
        roots,
        gamma: target,
        energy_density,
        converged: true,
        residual,
    })
}

pub fn solve_pattern(spec: &ModelSpec, pattern: RootPattern, cfg: &BetheConfig) -> Result<BetheSolution> {
    solve_pattern_from(spec, pattern, None, cfg)
}

pub fn solve_ground(spec: &ModelSpec, cfg: &BetheConfig) -> Result<BetheSolution> {
    solve_pattern(spec, RootPattern::Ground, cfg)
}

/// Zero-momentum minimum of sector n = L/2 − r.
pub fn solve_sector(spec: &ModelSpec, n: usize, cfg: &BetheConfig) -> Result<BetheSolution> {
    let pattern = if n == 0 { RootPattern::Ground } else { RootPattern::Sector(n) };
    solve_pattern(spec, pattern, cfg)
}

/// ∂ε/∂Δ by central differences (h = 1e−6, one Richardson level), each
/// offset solve warm-started from the roots at Δ.
pub fn derivative_delta(spec: &ModelSpec, pattern: RootPattern, cfg: &BetheConfig) -> Result<f64> {
    let base = solve_pattern(spec, pattern, cfg)?;
    let eps_at = |d: f64| -> Result<f64> {
        let s = spec.with_delta(d)?;
        Ok(solve_pattern_from(&s, pattern, Some(&base.roots), cfg)?.energy_density)
    };
    crate::diff::try_derivative(eps_at, spec.delta, 1e-6, 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantum_number_sets() {
        assert_eq!(RootPattern::Ground.quantum_numbers(8).unwrap(), vec![-1.5, -0.5, 0.5, 1.5]);
        assert_eq!(RootPattern::Sector(1).quantum_numbers(8).unwrap(), vec![-1.0, 0.0, 1.0]);
        assert_eq!(RootPattern::Marginal.quantum_numbers(8).unwrap(), vec![-2.5, -0.5, 0.5, 2.5]);
    }

    #[test]
    fn derivatives_match_differences() {
        let h = 1e-6;
        let (t, c) = (1.37, -0.8);
        let (_, dt, dc) = phase(t, c);
        assert!((dt - (phase(t + h, c).0 - phase(t - h, c).0) / (2.0 * h)).abs() < 1e-8);
        assert!((dc - (phase(t, c + h).0 - phase(t, c - h).0) / (2.0 * h)).abs() < 1e-8);
        for t in [0.3, 1.8] {
            let g = 1.1;
            let (_, de_dt, de_dg) = magnon_energy(t, g);
            let nt = (magnon_energy(t + h, g).0 - magnon_energy(t - h, g).0) / (2.0 * h);
            let ng = (magnon_energy(t, g + h).0 - magnon_energy(t, g - h).0) / (2.0 * h);
            assert!((de_dt - nt).abs() < 1e-8 && (de_dg - ng).abs() < 1e-8);
        }
    }

    #[test]
    fn free_fermion_point_is_exact() {
        let spec = ModelSpec::periodic(4, 0.0).unwrap();
        let s = solve_ground(&spec, &BetheConfig::default()).unwrap();
        assert!((s.energy_density + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn large_twist_rejected() {
        let spec = ModelSpec::twisted(8, 0.0, 4.0).unwrap();
        assert!(matches!(solve_ground(&spec, &BetheConfig::default()), Err(Error::Domain(_))));
    }
}
