//! Coupling ↔ expectation duality for H(Δ) = H₀ + Δ·ΣA_i, where
//! A_i = −½σᶻ_iσᶻ_{i+1} and H₀ is the XX part.
//!
//! The map Δ ↦ ⟨A⟩ = ∂ε/∂Δ is one-to-one when [H₀, ΣA_i] ≠ 0 and ε(Δ) is
//! strictly concave. This module checks both at finite size and in the
//! thermodynamic limit, measures how ⟨A⟩ shifts along conformal towers, and
//! builds uniform mixtures over degenerate eigenstates.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix4, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact_diag::{ground_state, lowest_in_sector, sector_minimum, two_site_density_matrix, EdConfig, EigenState};
use crate::model::{build_hamiltonian, gamma_from_delta, xi_of_gamma, ModelSpec, SparseOperator};
use crate::cft::anomalous_dimension;
use crate::thermo::{second_derivative_inf, thermo_limit};

/// Largest ring for which the certificate is built on the full 2^L space.
pub const MAX_CERTIFICATE_LENGTH: usize = 20;

/// ‖[H, D]‖_F for a diagonal D given by its entries.
pub fn commutator_norm(h: &SparseOperator, diag: &[f64]) -> f64 {
    h.rows
        .iter()
        .zip(&h.cols)
        .zip(&h.values)
        .map(|((&r, &c), v)| v.norm_sqr() * (diag[r] - diag[c]).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Σ_i σᶻ_iσᶻ_{i+1} of one configuration on a ring.
pub fn bond_zz(state: u64, length: usize) -> f64 {
    let rotated = crate::model::translate(state, length);
    // equal neighbours contribute +1, unequal −1
    let unequal = (state ^ rotated).count_ones() as f64;
    length as f64 - 2.0 * unequal
}

/// ‖[H₀, Σσᶻσᶻ]‖_F on the full space of an L-site ring. For L ≥ 4 this
/// equals 2·√(L·2^L), so per state it grows like √L.
pub fn uniqueness_certificate(length: usize) -> Result<f64> {
    if length > MAX_CERTIFICATE_LENGTH {
        return Err(Error::Domain(format!(
            "certificate needs L ≤ {MAX_CERTIFICATE_LENGTH}, got {length}"
        )));
    }
    let block = build_hamiltonian(&ModelSpec::periodic(length, 0.0)?)?;
    let diag: Vec<f64> = block.basis.iter().map(|&s| bond_zz(s, length)).collect();
    Ok(commutator_norm(&block.operator, &diag))
}

/// Where the energies of a duality scan come from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DualitySource {
    Finite { length: usize, ed: EdConfig },
    Thermodynamic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualityPoint {
    pub delta: f64,
    pub energy_density: f64,
    /// ⟨A⟩ = ∂ε/∂Δ.
    pub d_delta: f64,
    pub d2_delta: f64,
}

/// Step for differentiating the Hellmann–Feynman derivative once more.
const SECOND_DERIVATIVE_STEP: f64 = 1e-3;

fn finite_point(length: usize, ed: &EdConfig, delta: f64) -> Result<DualityPoint> {
    let spec = ModelSpec::periodic(length, delta)?;
    let rec = ground_state(&spec, ed)?.energy_record();
    let h = SECOND_DERIVATIVE_STEP.min(0.5 * (1.0 - delta.abs()));
    let d2 = crate::diff::try_derivative(
        |d| Ok::<_, Error>(ground_state(&spec.with_delta(d)?, ed)?.energy_record().d_delta),
        delta,
        h,
        1,
    )?;
    Ok(DualityPoint {
        delta,
        energy_density: rec.energy_density,
        d_delta: rec.d_delta,
        d2_delta: d2,
    })
}

fn thermo_point(delta: f64) -> Result<DualityPoint> {
    let t = thermo_limit(delta)?;
    Ok(DualityPoint {
        delta,
        energy_density: t.energy_density_inf,
        d_delta: t.denergy_ddelta_inf,
        d2_delta: second_derivative_inf(delta)?,
    })
}

/// Evaluates (Δ, ε, ∂ε/∂Δ, ∂²ε/∂Δ²) on `grid` (in input order) and checks
/// that ∂ε/∂Δ is strictly decreasing, that ∂²ε/∂Δ² < 0 at every point and
/// that the second differences of ε are negative.
pub fn duality_scan(source: DualitySource, grid: &[f64]) -> Result<Vec<DualityPoint>> {
    for &d in grid {
        gamma_from_delta(d)?;
    }
    let points: Vec<DualityPoint> = grid
        .par_iter()
        .map(|&d| match source {
            DualitySource::Finite { length, ed } => finite_point(length, &ed, d),
            DualitySource::Thermodynamic => thermo_point(d),
        })
        .collect::<Result<_>>()?;
    check_concavity(&points)?;
    Ok(points)
}

fn check_concavity(points: &[DualityPoint]) -> Result<()> {
    for p in points {
        if p.d2_delta.is_nan() || p.d2_delta >= 0.0 {
            return Err(Error::Monotonicity {
                delta: p.delta,
                detail: format!("∂²ε/∂Δ² = {} is not negative", p.d2_delta),
            });
        }
    }
    let mut sorted: Vec<DualityPoint> = points.to_vec();
    sorted.sort_by(|a, b| a.delta.total_cmp(&b.delta));
    sorted.dedup_by(|a, b| a.delta == b.delta);
    for w in sorted.windows(2) {
        if w[1].d_delta >= w[0].d_delta {
            return Err(Error::Monotonicity {
                delta: w[1].delta,
                detail: format!("∂ε/∂Δ rises from {} to {}", w[0].d_delta, w[1].d_delta),
            });
        }
    }
    for w in sorted.windows(3) {
        let left = (w[1].energy_density - w[0].energy_density) / (w[1].delta - w[0].delta);
        let right = (w[2].energy_density - w[1].energy_density) / (w[2].delta - w[1].delta);
        if right >= left {
            return Err(Error::Monotonicity {
                delta: w[1].delta,
                detail: format!("second difference of ε is {}", right - left),
            });
        }
    }
    Ok(())
}

/// ⟨A⟩_n − ⟨A⟩_0 measured on the sector-n minimum against the conformal
/// prediction (2π/L²)·∂_Δ[ξ·x_n].
pub fn tower_density_shift(length: usize, delta: f64, n: usize, ed: &EdConfig) -> Result<(f64, f64)> {
    let spec = ModelSpec::periodic(length, delta)?;
    let a0 = ground_state(&spec, ed)?.energy_record().d_delta;
    let an = sector_minimum(&spec, n, ed)?.energy_record().d_delta;
    let weight = |d: f64| {
        let g = gamma_from_delta(d).unwrap_or(f64::NAN);
        xi_of_gamma(g).unwrap_or(f64::NAN) * anomalous_dimension(n, g)
    };
    let h = 1e-4_f64.min(0.5 * (1.0 - delta.abs()));
    let l = length as f64;
    let predicted = 2.0 * PI / (l * l) * crate::diff::derivative(weight, delta, h, 2);
    Ok((an - a0, predicted))
}

/// Uniform mixture ρ = (1/q)Σ|ψ_i⟩⟨ψ_i| over q degenerate eigenstates of
/// one magnetization sector, stored on the sector's configuration basis.
#[derive(Debug, Clone)]
pub struct DegenerateEnsemble {
    pub length: usize,
    pub energy: f64,
    pub basis: Vec<u64>,
    pub states: Vec<Vec<Complex64>>,
}

const ORTHONORMALITY_TOLERANCE: f64 = 1e-10;

impl DegenerateEnsemble {
    /// Requires a common ring and magnetization, energies within `window`
    /// and orthonormal states.
    pub fn new(states: &[EigenState], window: f64) -> Result<Self> {
        let first = states
            .first()
            .ok_or_else(|| Error::DegenerateInput("empty ensemble".into()))?;
        for s in states {
            if s.spec.length != first.spec.length || s.basis != first.basis {
                return Err(Error::DegenerateInput("states live on different sectors".into()));
            }
            if (s.energy - first.energy).abs() > window {
                return Err(Error::DegenerateInput(format!(
                    "energies {} and {} differ by more than {window}",
                    first.energy, s.energy
                )));
            }
        }
        let ensemble = Self {
            length: first.spec.length,
            energy: first.energy,
            basis: first.basis.clone(),
            states: states.iter().map(|s| s.amplitudes.clone()).collect(),
        };
        ensemble.check_orthonormal()?;
        Ok(ensemble)
    }

    fn check_orthonormal(&self) -> Result<()> {
        let q = self.states.len();
        for i in 0..q {
            for j in 0..q {
                let overlap: Complex64 = self.states[i].iter().zip(&self.states[j]).map(|(a, b)| a.conj() * b).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                if (overlap - target).norm() > ORTHONORMALITY_TOLERANCE {
                    return Err(Error::DegenerateInput(format!("⟨ψ{i}|ψ{j}⟩ = {overlap}")));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Dense ρ on the sector basis; meant for small sectors.
    pub fn density_matrix(&self) -> DMatrix<Complex64> {
        let dim = self.basis.len();
        let q = self.len() as f64;
        let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
        for v in &self.states {
            for r in 0..dim {
                for c in 0..dim {
                    rho[(r, c)] += v[r] * v[c].conj() / q;
                }
            }
        }
        rho
    }

    /// Number of eigenvalues of ρ above `cutoff`.
    pub fn rank(&self, cutoff: f64) -> usize {
        SymmetricEigen::new(self.density_matrix())
            .eigenvalues
            .iter()
            .filter(|&&e| e > cutoff)
            .count()
    }

    /// ⟨A⟩ = −(1/2L)Σ_i⟨σᶻ_iσᶻ_{i+1}⟩ in the mixture.
    pub fn mean_coupling_density(&self) -> f64 {
        let l = self.length;
        let q = self.len() as f64;
        let total: f64 = self
            .states
            .iter()
            .flat_map(|v| self.basis.iter().zip(v))
            .map(|(&s, c)| c.norm_sqr() * bond_zz(s, l))
            .sum();
        -0.5 * total / (q * l as f64)
    }

    /// Two-site density matrix of sites (i, j) in the mixture.
    pub fn two_site_density_matrix(&self, i: usize, j: usize) -> Matrix4<Complex64> {
        let q = self.len() as f64;
        self.states
            .iter()
            .map(|v| two_site_density_matrix(&self.basis, v, i, j))
            .fold(Matrix4::zeros(), |acc, m| acc + m)
            / Complex64::new(q, 0.0)
    }

    /// The ensemble of states ψ′_i = Σ_k U_ik ψ_k; `u` must be unitary.
    pub fn remix(&self, u: &DMatrix<Complex64>) -> Result<Self> {
        let q = self.len();
        if u.nrows() != q || u.ncols() != q {
            return Err(Error::DegenerateInput(format!("{}×{} remix of {q} states", u.nrows(), u.ncols())));
        }
        let defect = (u * u.adjoint() - DMatrix::identity(q, q)).iter().map(|v| v.norm()).fold(0.0, f64::max);
        if defect > ORTHONORMALITY_TOLERANCE {
            return Err(Error::DegenerateInput(format!("remix is not unitary (defect {defect})")));
        }
        let dim = self.basis.len();
        let states = (0..q)
            .map(|i| {
                let mut v = vec![Complex64::new(0.0, 0.0); dim];
                for k in 0..q {
                    for (out, a) in v.iter_mut().zip(&self.states[k]) {
                        *out += u[(i, k)] * a;
                    }
                }
                v
            })
            .collect();
        Ok(Self {
            states,
            ..self.clone()
        })
    }
}

/// Haar-random q×q unitary: QR of a complex Gaussian matrix with the
/// phases of R's diagonal moved into Q.
pub fn random_unitary<R: Rng + ?Sized>(q: usize, rng: &mut R) -> DMatrix<Complex64> {
    let z = DMatrix::from_fn(q, q, |_, _| {
        Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    });
    let qr = z.qr();
    let (mut qm, r) = (qr.q(), qr.r());
    for k in 0..q {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for row in 0..q {
            qm[(row, k)] *= phase;
        }
    }
    qm
}

/// Mixture of the lowest states at momenta p and L − p, degenerate by
/// reflection symmetry of the untwisted ring.
pub fn momentum_pair_ensemble(spec: &ModelSpec, up: usize, p: usize, ed: &EdConfig) -> Result<DegenerateEnsemble> {
    let l = spec.length;
    if p == 0 || 2 * p == l || p >= l {
        return Err(Error::Domain(format!("momentum {p} has no distinct partner on L = {l}")));
    }
    let a = lowest_in_sector(spec, up, p, ed)?;
    let b = lowest_in_sector(spec, up, l - p, ed)?;
    DegenerateEnsemble::new(&[a, b], ed.degeneracy_window)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn certificate_closed_form() {
        for l in [4usize, 6, 8, 10] {
            let got = uniqueness_certificate(l).unwrap();
            let expected = 2.0 * ((l as f64) * 2f64.powi(l as i32)).sqrt();
            assert!((got - expected).abs() < 1e-9 * expected, "L={l}: {got} vs {expected}");
        }
        assert!(uniqueness_certificate(4).unwrap() > 1.0);
    }

    #[test]
    fn commuting_diagonals_give_zero() {
        let dim = 6;
        let h = SparseOperator::from_triplets(dim, (0..dim).map(|i| (i, i, Complex64::new(i as f64 * 0.3, 0.0))).collect());
        let a: Vec<f64> = (0..dim).map(|i| (i * i) as f64).collect();
        assert_eq!(commutator_norm(&h, &a), 0.0);
    }

    #[test]
    fn bond_zz_counts() {
        assert_eq!(bond_zz(0b0000, 4), 4.0);
        assert_eq!(bond_zz(0b0101, 4), -4.0);
        assert_eq!(bond_zz(0b0011, 4), 0.0);
    }

    #[test]
    fn thermodynamic_scan_is_concave() {
        let grid: Vec<f64> = (0..19).map(|k| -0.9 + 0.1 * k as f64).collect();
        let pts = duality_scan(DualitySource::Thermodynamic, &grid).unwrap();
        assert_eq!(pts.len(), 19);
    }

    #[test]
    fn equal_inputs_map_to_equal_expectations() {
        let src = DualitySource::Finite {
            length: 6,
            ed: EdConfig::default(),
        };
        let pts = duality_scan(src, &[0.3, 0.3]).unwrap();
        assert_eq!(pts[0].d_delta, pts[1].d_delta);
    }

    #[test]
    fn convex_data_rejected() {
        let pts = [
            DualityPoint { delta: 0.0, energy_density: 0.0, d_delta: 0.0, d2_delta: -1.0 },
            DualityPoint { delta: 0.1, energy_density: 0.0, d_delta: 0.1, d2_delta: -1.0 },
        ];
        assert!(matches!(check_concavity(&pts), Err(Error::Monotonicity { .. })));
    }

    #[test]
    fn zeroth_sector_has_no_shift() {
        let (m, p) = tower_density_shift(8, 0.2, 0, &EdConfig::default()).unwrap();
        assert_eq!(m, 0.0);
        assert_eq!(p, 0.0);
    }

    #[test]
    fn remix_leaves_the_mixture_alone() {
        let ed = EdConfig::default();
        let spec = ModelSpec::periodic(8, -0.3).unwrap();
        let ens = momentum_pair_ensemble(&spec, 4, 1, &ed).unwrap();
        assert_eq!(ens.rank(1e-10), 2);
        let trace: Complex64 = ens.density_matrix().trace();
        assert!((trace - 1.0).norm() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a0 = ens.mean_coupling_density();
        let r0 = ens.two_site_density_matrix(0, 1);
        for _ in 0..5 {
            let mixed = ens.remix(&random_unitary(2, &mut rng)).unwrap();
            assert!((mixed.mean_coupling_density() - a0).abs() < 1e-12);
            let diff = (mixed.two_site_density_matrix(0, 1) - r0).iter().map(|v| v.norm()).fold(0.0, f64::max);
            assert!(diff < 1e-12);
        }
    }
}
