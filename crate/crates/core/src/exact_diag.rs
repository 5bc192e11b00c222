//! Exact eigenstates in (magnetization, momentum) sectors and the
//! nearest-neighbour correlators extracted from them.
//!
//! Momentum states are built on cyclic orbits of representative bit
//! strings:
//!
//! ```text
//! |a, k⟩ = R_a^{-1/2} Σ_{j < R_a} e^{-ikj} T^j |a⟩,   k = 2πp/L
//! ```
//!
//! so that `T|a, k⟩ = e^{ik}|a, k⟩`. Eigenvectors are expanded back onto the
//! configuration basis of the magnetization sector before any expectation
//! value is taken.

use std::f64::consts::PI;

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{EigenSolverConfig, LowSpectrum};
use crate::model::{
    binomial, configurations, for_each_term, translate, ModelSpec, SparseOperator,
};
use crate::record::EnergyRecord;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdConfig {
    /// Largest momentum-block dimension accepted.
    pub max_sector_dim: usize,
    /// Absolute energy window (on E, not ε) inside which levels count as degenerate.
    pub degeneracy_window: f64,
    pub solver: EigenSolverConfig,
}

impl Default for EdConfig {
    fn default() -> Self {
        Self {
            max_sector_dim: 200_000,
            degeneracy_window: 1e-10,
            solver: EigenSolverConfig::default(),
        }
    }
}

/// Translation-projected basis of one (r, p) sector.
#[derive(Debug, Clone)]
pub struct MomentumBasis {
    pub length: usize,
    pub up: usize,
    pub momentum: usize,
    pub representatives: Vec<u64>,
    pub periods: Vec<usize>,
}

/// Smallest rotation of `state` and the shift `l` with `T^l state = rep`.
pub fn representative(state: u64, length: usize) -> (u64, usize) {
    let mut best = state;
    let mut shift = 0;
    let mut t = state;
    for l in 1..length {
        t = translate(t, length);
        if t < best {
            best = t;
            shift = l;
        }
    }
    (best, shift)
}

fn period(state: u64, length: usize) -> usize {
    let mut t = translate(state, length);
    let mut r = 1;
    while t != state {
        t = translate(t, length);
        r += 1;
    }
    r
}

impl MomentumBasis {
    pub fn new(length: usize, up: usize, momentum: usize) -> Self {
        let mut representatives = Vec::new();
        let mut periods = Vec::new();
        for s in configurations(length, up) {
            if representative(s, length).0 != s {
                continue;
            }
            let r = period(s, length);
            if (momentum * r).is_multiple_of(length) {
                representatives.push(s);
                periods.push(r);
            }
        }
        Self {
            length,
            up,
            momentum,
            representatives,
            periods,
        }
    }

    pub fn dim(&self) -> usize {
        self.representatives.len()
    }

    pub fn index_of(&self, rep: u64) -> Option<usize> {
        self.representatives.binary_search(&rep).ok()
    }

    pub fn wavenumber(&self) -> f64 {
        2.0 * PI * self.momentum as f64 / self.length as f64
    }

    /// Expands momentum-basis coefficients onto the sorted configuration basis.
    pub fn expand(&self, coeffs: &[Complex64]) -> (Vec<u64>, Vec<Complex64>) {
        let configs = configurations(self.length, self.up);
        let mut amps = vec![Complex64::new(0.0, 0.0); configs.len()];
        let k = self.wavenumber();
        for ((&rep, &r), &c) in self.representatives.iter().zip(&self.periods).zip(coeffs) {
            let mut t = rep;
            let scale = c / (r as f64).sqrt();
            for j in 0..r {
                let idx = configs.binary_search(&t).unwrap();
                amps[idx] += scale * Complex64::from_polar(1.0, -k * j as f64);
                t = translate(t, self.length);
            }
        }
        (configs, amps)
    }
}

/// Hamiltonian block in the momentum basis of sector (r, p).
pub fn momentum_block(spec: &ModelSpec, up: usize, momentum: usize) -> (MomentumBasis, SparseOperator) {
    let basis = MomentumBasis::new(spec.length, up, momentum);
    let theta = spec.bond_phase();
    let k = basis.wavenumber();
    let mut triplets = Vec::new();
    for (col, (&a, &ra)) in basis.representatives.iter().zip(&basis.periods).enumerate() {
        for_each_term(spec.length, spec.delta, theta, a, |b, amp| {
            let (rep, shift) = representative(b, spec.length);
            if let Some(row) = basis.index_of(rep) {
                let rb = basis.periods[row];
                let factor = Complex64::from_polar(((ra as f64) / (rb as f64)).sqrt(), -k * shift as f64);
                triplets.push((row, col, amp * factor));
            }
        });
    }
    let op = SparseOperator::from_triplets(basis.dim(), triplets);
    (basis, op)
}

/// A normalized eigenstate expanded on the configuration basis of its
/// magnetization sector.
#[derive(Debug, Clone)]
pub struct EigenState {
    pub spec: ModelSpec,
    pub energy: f64,
    pub energy_density: f64,
    pub momentum: usize,
    pub degeneracy: usize,
    pub basis: Vec<u64>,
    pub amplitudes: Vec<Complex64>,
}

impl EigenState {
    /// A single configuration, e.g. the all-up product state.
    pub fn product(spec: ModelSpec, config: u64) -> Self {
        let up = config.count_ones() as usize;
        let basis = configurations(spec.length, up);
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); basis.len()];
        amplitudes[basis.binary_search(&config).unwrap()] = Complex64::new(1.0, 0.0);
        Self {
            spec,
            energy: f64::NAN,
            energy_density: f64::NAN,
            momentum: 0,
            degeneracy: 1,
            basis,
            amplitudes,
        }
    }

    pub fn up(&self) -> usize {
        self.basis.first().map_or(0, |s| s.count_ones() as usize)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    /// ⟨ψ|T|ψ⟩, equal to e^{2πip/L} for a momentum eigenstate.
    pub fn translation_eigenvalue(&self) -> Complex64 {
        let l = self.spec.length;
        self.basis
            .iter()
            .zip(&self.amplitudes)
            .map(|(&s, &c)| {
                let t = translate(s, l);
                let idx = self.basis.binary_search(&t).unwrap();
                self.amplitudes[idx].conj() * c
            })
            .sum()
    }

    /// Hellmann–Feynman energy derivatives taken from the state's correlators.
    pub fn energy_record(&self) -> EnergyRecord {
        let corr = correlators(self);
        let theta = self.spec.bond_phase();
        let l = self.spec.length as f64;
        EnergyRecord {
            length: self.spec.length,
            delta: self.spec.delta,
            phi: self.spec.phase(),
            energy_density: self.energy_density,
            d_delta: -0.5 * corr.g_zz,
            d_phi: (corr.g_par * theta.sin() + corr.g_perp * theta.cos()) / (2.0 * l),
        }
    }
}

fn fix_phase(v: &mut [Complex64]) {
    if let Some(first) = v.iter().find(|c| c.norm() > 1e-10).copied() {
        let rot = first.conj() / first.norm();
        v.iter_mut().for_each(|c| *c *= rot);
    }
}

fn make_state(
    spec: &ModelSpec,
    basis: &MomentumBasis,
    energy: f64,
    coeffs: &[Complex64],
    degeneracy: usize,
) -> EigenState {
    let (configs, mut amplitudes) = basis.expand(coeffs);
    let n = amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    amplitudes.iter_mut().for_each(|c| *c /= n);
    fix_phase(&mut amplitudes);
    let mut spec = *spec;
    spec.sector = Some(crate::model::Sector {
        up: basis.up,
        momentum: basis.momentum,
    });
    EigenState {
        spec,
        energy,
        energy_density: energy / spec.length as f64,
        momentum: basis.momentum,
        degeneracy,
        basis: configs,
        amplitudes,
    }
}

fn checked_block(
    spec: &ModelSpec,
    up: usize,
    momentum: usize,
    config: &EdConfig,
) -> Result<(MomentumBasis, SparseOperator)> {
    if up > spec.length || momentum >= spec.length {
        return Err(Error::Domain(format!(
            "sector (r = {up}, p = {momentum}) invalid for L = {}",
            spec.length
        )));
    }
    crate::model::check_bit_length(spec.length)?;
    // cheap upper bound before enumerating orbits
    let estimate = binomial(spec.length, up) / spec.length;
    if estimate > config.max_sector_dim {
        return Err(Error::Capacity {
            dim: estimate,
            bound: config.max_sector_dim,
        });
    }
    let (basis, op) = momentum_block(spec, up, momentum);
    if basis.dim() == 0 {
        return Err(Error::EmptySector { r: up, p: momentum });
    }
    if basis.dim() > config.max_sector_dim {
        return Err(Error::Capacity {
            dim: basis.dim(),
            bound: config.max_sector_dim,
        });
    }
    Ok((basis, op))
}

/// Minimum-energy state of sector (r, p), with its degeneracy inside the block.
pub fn lowest_in_sector(spec: &ModelSpec, up: usize, momentum: usize, config: &EdConfig) -> Result<EigenState> {
    let (basis, op) = checked_block(spec, up, momentum, config)?;
    let mut low = LowSpectrum::new(&op, config.solver);
    let degeneracy = low.lowest_multiplicity(config.degeneracy_window)?;
    let s = low.spectrum();
    Ok(make_state(spec, &basis, s.values[0], &s.vectors[0], degeneracy))
}

/// The `count` lowest states of sector (r, p), ascending in energy.
pub fn lowest_states_in_sector(
    spec: &ModelSpec,
    up: usize,
    momentum: usize,
    count: usize,
    config: &EdConfig,
) -> Result<Vec<EigenState>> {
    let (basis, op) = checked_block(spec, up, momentum, config)?;
    let mut low = LowSpectrum::new(&op, config.solver);
    let s = low.take(count + 1)?.clone();
    let window = config.degeneracy_window;
    let n = count.min(s.values.len());
    Ok((0..n)
        .map(|i| {
            let d = s.values.iter().filter(|&&e| (e - s.values[i]).abs() <= window).count();
            make_state(spec, &basis, s.values[i], &s.vectors[i], d)
        })
        .collect())
}

/// Lowest state with `up` up spins over all momenta (ties go to the smaller p).
pub fn lowest_with_magnetization(spec: &ModelSpec, up: usize, config: &EdConfig) -> Result<EigenState> {
    let mut best: Option<EigenState> = None;
    for p in 0..spec.length {
        let state = match lowest_in_sector(spec, up, p, config) {
            Ok(s) => s,
            Err(Error::EmptySector { .. }) => continue,
            Err(e) => return Err(e),
        };
        let better = match &best {
            None => true,
            Some(b) => state.energy < b.energy - config.degeneracy_window,
        };
        if better {
            best = Some(state);
        }
    }
    best.ok_or(Error::EmptySector { r: up, p: 0 })
}

/// Global ground state: the sector from `spec.sector` if given, otherwise
/// the minimum over all momenta at r = L/2.
pub fn ground_state(spec: &ModelSpec, config: &EdConfig) -> Result<EigenState> {
    if let Some(s) = spec.sector {
        return lowest_in_sector(spec, s.up, s.momentum, config);
    }
    lowest_with_magnetization(spec, spec.length / 2, config)
}

/// Minimum-energy state of sector n = L/2 − r.
pub fn sector_minimum(spec: &ModelSpec, n: usize, config: &EdConfig) -> Result<EigenState> {
    if n > spec.length / 2 {
        return Err(Error::Domain(format!("sector n = {n} on L = {}", spec.length)));
    }
    lowest_with_magnetization(spec, spec.length / 2 - n, config)
}

/// Translation-averaged nearest-neighbour correlators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelatorSet {
    /// ⟨σᶻ⟩ per site.
    pub g_z: f64,
    /// ⟨σᶻ_i σᶻ_{i+1}⟩
    pub g_zz: f64,
    /// G_xx + G_yy
    pub g_par: f64,
    /// G_xy − G_yx
    pub g_perp: f64,
}

/// Correlators of the pair (i, j) for a state on a ring of `length` sites.
///
/// Returns (⟨σᶻ_i⟩ + ⟨σᶻ_j⟩)/2, ⟨σᶻ_i σᶻ_j⟩ and z = ⟨σ⁻_i σ⁺_j⟩.
pub fn pair_correlators(
    basis: &[u64],
    amplitudes: &[Complex64],
    i: usize,
    j: usize,
) -> (f64, f64, Complex64) {
    let mut gz = 0.0;
    let mut gzz = 0.0;
    let mut z = Complex64::new(0.0, 0.0);
    let spin = |s: u64, site: usize| if (s >> site) & 1 == 1 { 1.0 } else { -1.0 };
    for (&s, &c) in basis.iter().zip(amplitudes) {
        let w = c.norm_sqr();
        if w == 0.0 {
            continue;
        }
        let (si, sj) = (spin(s, i), spin(s, j));
        gz += 0.5 * w * (si + sj);
        gzz += w * si * sj;
        // σ⁻_i σ⁺_j acts on up at i, down at j
        if si > 0.0 && sj < 0.0 {
            let t = s ^ (1u64 << i) ^ (1u64 << j);
            if let Ok(idx) = basis.binary_search(&t) {
                z += amplitudes[idx].conj() * c;
            }
        }
    }
    (gz, gzz, z)
}

pub fn correlators(state: &EigenState) -> CorrelatorSet {
    let l = state.spec.length;
    let mut acc = (0.0, 0.0, Complex64::new(0.0, 0.0));
    for i in 0..l {
        let (gz, gzz, z) = pair_correlators(&state.basis, &state.amplitudes, i, (i + 1) % l);
        acc.0 += gz;
        acc.1 += gzz;
        acc.2 += z;
    }
    let n = l as f64;
    CorrelatorSet {
        g_z: acc.0 / n,
        g_zz: acc.1 / n,
        g_par: 4.0 * acc.2.re / n,
        g_perp: 4.0 * acc.2.im / n,
    }
}

/// Full two-site reduced density matrix of sites (i, j) in the ordered basis
/// |↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩ (first label site i).
pub fn two_site_density_matrix(basis: &[u64], amplitudes: &[Complex64], i: usize, j: usize) -> Matrix4<Complex64> {
    assert_ne!(i, j, "two-site density matrix needs distinct sites");
    let label = |s: u64| -> usize {
        let a = if (s >> i) & 1 == 1 { 0 } else { 1 };
        let b = if (s >> j) & 1 == 1 { 0 } else { 1 };
        2 * a + b
    };
    let with_label = |rest: u64, l: usize| -> u64 {
        let mut s = rest;
        if l / 2 == 0 {
            s |= 1u64 << i;
        }
        if l.is_multiple_of(2) {
            s |= 1u64 << j;
        }
        s
    };
    let mask = !((1u64 << i) | (1u64 << j));
    let mut rho = Matrix4::<Complex64>::zeros();
    for (&s, &c) in basis.iter().zip(amplitudes) {
        if c.norm_sqr() == 0.0 {
            continue;
        }
        let row = label(s);
        let rest = s & mask;
        for col in 0..4 {
            let t = with_label(rest, col);
            if let Ok(idx) = basis.binary_search(&t) {
                rho[(row, col)] += c * amplitudes[idx].conj();
            }
        }
    }
    rho
}

/// Structured two-site density matrix of the pair (i, j).
pub fn two_site_rdm(state: &EigenState, i: usize, j: usize) -> crate::entanglement::TwoSiteRdm {
    let l = state.spec.length;
    let rho = two_site_density_matrix(&state.basis, &state.amplitudes, i % l, j % l);
    crate::entanglement::TwoSiteRdm::from_matrix(&rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense_hermitian;
    use crate::model::{build_hamiltonian, build_boundary_twist_hamiltonian};

    fn ed() -> EdConfig {
        EdConfig::default()
    }

    fn sorted(mut v: Vec<f64>) -> Vec<f64> {
        v.sort_by(|a, b| a.total_cmp(b));
        v
    }

    #[test]
    fn momentum_blocks_reproduce_full_spectrum() {
        for (l, delta, phi) in [(4, 0.0, 0.0), (6, -0.4, 0.9), (8, 0.3, 2.0)] {
            let spec = ModelSpec::twisted(l, delta, phi).unwrap();
            let full = build_hamiltonian(&spec).unwrap();
            let full_spec = sorted(dense_hermitian(&full.operator.to_dense()).values);
            let mut blocks = Vec::new();
            for r in 0..=l {
                for p in 0..l {
                    let (basis, op) = momentum_block(&spec, r, p);
                    if basis.dim() == 0 {
                        continue;
                    }
                    assert!(op.hermiticity_defect() < 1e-13);
                    blocks.extend(dense_hermitian(&op.to_dense()).values);
                }
            }
            let blocks = sorted(blocks);
            assert_eq!(blocks.len(), full_spec.len());
            for (a, b) in blocks.iter().zip(&full_spec) {
                assert!((a - b).abs() < 1e-12, "L={l}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn twist_gauge_forms_share_spectrum() {
        for l in [4usize, 6, 8] {
            for phi in [0.5, PI / 2.0, 2.0 * PI / 3.0, 4.0] {
                for r in [l / 2 - 1, l / 2] {
                    let spec = ModelSpec::twisted(l, -0.3, phi).unwrap().with_sector(r, 0).unwrap();
                    let a = dense_hermitian(&build_hamiltonian(&spec).unwrap().operator.to_dense()).values;
                    let b = dense_hermitian(
                        &build_boundary_twist_hamiltonian(&spec).unwrap().operator.to_dense(),
                    )
                    .values;
                    for (x, y) in a.iter().zip(&b) {
                        assert!((x - y).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn u1_sector_block_matches_dense_full_space() {
        let spec = ModelSpec::periodic(4, 0.0).unwrap();
        let full = dense_hermitian(&build_hamiltonian(&spec).unwrap().operator.to_dense());
        let block = build_hamiltonian(&spec.with_sector(2, 0).unwrap()).unwrap();
        assert_eq!(block.basis.len(), 6);
        let low = dense_hermitian(&block.operator.to_dense()).values[0];
        // the global minimum of the full space sits in r = L/2
        assert!((low - full.values[0]).abs() < 1e-12);
    }

    #[test]
    fn ground_state_is_normalized_momentum_eigenstate() {
        for (l, delta, phi) in [(8, 0.0, 0.0), (10, -0.5, 0.0), (8, 0.4, PI / 2.0)] {
            let spec = ModelSpec::twisted(l, delta, phi).unwrap();
            let gs = ground_state(&spec, &ed()).unwrap();
            assert!((gs.norm_sqr() - 1.0).abs() < 1e-12);
            let expected = Complex64::from_polar(1.0, 2.0 * PI * gs.momentum as f64 / l as f64);
            assert!((gs.translation_eigenvalue() - expected).norm() < 1e-10);
            assert_eq!(gs.degeneracy, 1);
            let first = gs.amplitudes.iter().find(|c| c.norm() > 1e-10).unwrap();
            assert!(first.im.abs() < 1e-14 && first.re > 0.0);
        }
    }

    #[test]
    fn sector_p0_at_half_filling_is_ground_state() {
        for delta in [-0.8, 0.0, 0.6] {
            let spec = ModelSpec::periodic(8, delta).unwrap();
            let gs = ground_state(&spec, &ed()).unwrap();
            let s = lowest_in_sector(&spec, 4, 0, &ed()).unwrap();
            assert!((gs.energy - s.energy).abs() < 1e-12);
        }
    }

    #[test]
    fn excitations_lie_above_ground() {
        let spec = ModelSpec::periodic(8, 0.0).unwrap();
        let gs = ground_state(&spec, &ed()).unwrap();
        let n1 = lowest_in_sector(&spec, 3, 0, &ed()).unwrap();
        let p1 = lowest_in_sector(&spec, 4, 1, &ed()).unwrap();
        assert!(n1.energy_density > gs.energy_density);
        assert!(p1.energy > gs.energy);
    }

    #[test]
    fn empty_sector_reported() {
        let spec = ModelSpec::periodic(4, 0.0).unwrap();
        assert!(matches!(
            lowest_in_sector(&spec, 0, 1, &ed()),
            Err(Error::EmptySector { r: 0, p: 1 })
        ));
    }

    #[test]
    fn product_state_correlators() {
        let spec = ModelSpec::periodic(6, 0.0).unwrap();
        let up = EigenState::product(spec, 0b111111);
        let c = correlators(&up);
        assert_eq!((c.g_z, c.g_zz, c.g_par, c.g_perp), (1.0, 1.0, 0.0, 0.0));
        let rdm = two_site_rdm(&up, 0, 1);
        assert_eq!((rdm.a, rdm.b, rdm.d), (1.0, 0.0, 0.0));
        assert_eq!(rdm.z, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn singlet_pair_correlators() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let basis = vec![0b01u64, 0b10];
        let amps = vec![Complex64::new(h, 0.0), Complex64::new(-h, 0.0)];
        let (gz, gzz, z) = pair_correlators(&basis, &amps, 0, 1);
        assert_eq!(gz, 0.0);
        assert!((gzz + 1.0).abs() < 1e-15);
        assert!((4.0 * z.re + 2.0).abs() < 1e-15);
    }

    #[test]
    fn capacity_error_for_tiny_bound() {
        let spec = ModelSpec::periodic(12, 0.0).unwrap();
        let cfg = EdConfig {
            max_sector_dim: 10,
            ..EdConfig::default()
        };
        assert!(matches!(ground_state(&spec, &cfg), Err(Error::Capacity { .. })));
    }
}
