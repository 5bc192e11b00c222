//! The XXZ ring, its symmetry sectors and the coupling maps γ(Δ), ξ(γ).
//!
//! Conventions used throughout the crate:
//!
//! ```text
//! H = -1/2 Σ_j [ σˣ_j σˣ_{j+1} + σʸ_j σʸ_{j+1} + Δ σᶻ_j σᶻ_{j+1} ]
//!   = -Σ_j [ e^{-iθ} σ⁺_j σ⁻_{j+1} + e^{iθ} σ⁻_j σ⁺_{j+1} ] - Δ/2 Σ_j σᶻ_j σᶻ_{j+1}
//! ```
//!
//! with θ = Φ/L the twist spread uniformly over the bonds. Basis states are
//! bit strings: bit `i` set means site `i + 1` carries spin up.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default cap on the dimension of a constructed Hamiltonian block.
pub const DEFAULT_MAX_DIM: usize = 1 << 20;

/// Longest ring whose configurations fit a `u64` bit string.
pub const MAX_BIT_LENGTH: usize = 62;

pub(crate) fn check_bit_length(length: usize) -> Result<()> {
    if length > MAX_BIT_LENGTH {
        return Err(Error::Domain(format!(
            "chain length {length} does not fit the bit-string basis"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    Periodic,
    /// Twist phase Φ ∈ [0, 2π) picked up by σ± on going around the ring.
    Twisted(f64),
}

impl Boundary {
    pub fn phase(&self) -> f64 {
        match *self {
            Boundary::Periodic => 0.0,
            Boundary::Twisted(phi) => phi,
        }
    }
}

/// Fixed number of up spins and momentum index `p` (momentum 2πp/L).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Sector {
    pub up: usize,
    pub momentum: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpec {
    pub length: usize,
    pub delta: f64,
    pub boundary: Boundary,
    pub sector: Option<Sector>,
}

impl ModelSpec {
    /// Validated constructor: even `length >= 4`, `-1 < delta < 1`, twist in `[0, 2π)`.
    pub fn new(length: usize, delta: f64, boundary: Boundary) -> Result<Self> {
        if length < 4 || !length.is_multiple_of(2) {
            return Err(Error::Domain(format!(
                "chain length must be even and at least 4, got {length}"
            )));
        }
        check_critical(delta)?;
        if let Boundary::Twisted(phi) = boundary {
            if !(0.0..2.0 * PI).contains(&phi) {
                return Err(Error::Domain(format!("twist phase {phi} outside [0, 2π)")));
            }
        }
        Ok(Self {
            length,
            delta,
            boundary,
            sector: None,
        })
    }

    pub fn periodic(length: usize, delta: f64) -> Result<Self> {
        Self::new(length, delta, Boundary::Periodic)
    }

    pub fn twisted(length: usize, delta: f64, phi: f64) -> Result<Self> {
        Self::new(length, delta, Boundary::Twisted(phi))
    }

    pub fn with_sector(mut self, up: usize, momentum: usize) -> Result<Self> {
        if up > self.length || momentum >= self.length {
            return Err(Error::Domain(format!(
                "sector (r = {up}, p = {momentum}) invalid for L = {}",
                self.length
            )));
        }
        self.sector = Some(Sector { up, momentum });
        Ok(self)
    }

    pub fn with_delta(mut self, delta: f64) -> Result<Self> {
        check_critical(delta)?;
        self.delta = delta;
        Ok(self)
    }

    /// Same model with the twist replaced; `phi = 0` yields the periodic ring.
    pub fn with_phase(mut self, phi: f64) -> Self {
        self.boundary = if phi == 0.0 {
            Boundary::Periodic
        } else {
            Boundary::Twisted(phi)
        };
        self
    }

    pub fn phase(&self) -> f64 {
        self.boundary.phase()
    }

    /// Phase carried by each bond in the distributed-twist frame.
    pub fn bond_phase(&self) -> f64 {
        self.phase() / self.length as f64
    }

    pub fn geometry(&self) -> CouplingGeometry {
        CouplingGeometry::from_delta(self.delta).expect("delta validated on construction")
    }
}

fn check_critical(delta: f64) -> Result<()> {
    if delta.is_finite() && delta > -1.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "anisotropy {delta} outside the critical interval (-1, 1)"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingGeometry {
    pub gamma: f64,
    pub xi: f64,
}

impl CouplingGeometry {
    pub fn from_delta(delta: f64) -> Result<Self> {
        let gamma = gamma_from_delta(delta)?;
        Ok(Self {
            gamma,
            xi: xi_of_gamma(gamma)?,
        })
    }
}

/// γ ∈ (0, π) with Δ = -cos γ.
pub fn gamma_from_delta(delta: f64) -> Result<f64> {
    check_critical(delta)?;
    Ok((-delta).acos())
}

/// ξ = π sin γ / γ.
pub fn xi_of_gamma(gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < PI) {
        return Err(Error::Domain(format!("γ = {gamma} outside (0, π)")));
    }
    Ok(PI * gamma.sin() / gamma)
}

/// dγ/dΔ = 1 / sin γ.
pub fn dgamma_ddelta(gamma: f64) -> f64 {
    1.0 / gamma.sin()
}

/// Cyclic shift moving the spin on site `i` to site `i + 1`.
#[inline]
pub fn translate(state: u64, length: usize) -> u64 {
    let mask = (1u64 << length) - 1;
    ((state << 1) | (state >> (length - 1))) & mask
}

/// All configurations with `up` set bits out of `length`, in ascending order.
pub fn configurations(length: usize, up: usize) -> Vec<u64> {
    if up > length {
        return Vec::new();
    }
    if up == 0 {
        return vec![0];
    }
    let limit = 1u64 << length;
    let mut out = Vec::new();
    let mut s: u64 = (1u64 << up) - 1;
    while s < limit {
        out.push(s);
        // Gosper's hack: next integer with the same popcount.
        let c = s & s.wrapping_neg();
        let r = s + c;
        s = (((r ^ s) >> 2) / c) | r;
    }
    out
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let c = (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128);
    usize::try_from(c).unwrap_or(usize::MAX)
}

/// Emits the column `H|s⟩ = Σ_t H_{ts} |t⟩` of the distributed-twist Hamiltonian.
pub fn for_each_term(
    length: usize,
    delta: f64,
    bond_phase: f64,
    state: u64,
    mut emit: impl FnMut(u64, Complex64),
) {
    let forward = -Complex64::from_polar(1.0, -bond_phase);
    let backward = -Complex64::from_polar(1.0, bond_phase);
    let mut diag = 0.0;
    for j in 0..length {
        let k = (j + 1) % length;
        let bj = (state >> j) & 1;
        let bk = (state >> k) & 1;
        if bj == bk {
            diag -= 0.5 * delta;
        } else {
            diag += 0.5 * delta;
            let flipped = state ^ (1u64 << j) ^ (1u64 << k);
            // bk set: σ⁺_j σ⁻_{j+1}; otherwise σ⁻_j σ⁺_{j+1}
            emit(flipped, if bk == 1 { forward } else { backward });
        }
    }
    emit(state, Complex64::new(diag, 0.0));
}

/// Column of the boundary-twist form: plain bonds everywhere except the
/// closing bond (L, 1), which carries the full phase e^{∓iΦ}.
pub fn for_each_term_boundary_twist(
    length: usize,
    delta: f64,
    phase: f64,
    state: u64,
    mut emit: impl FnMut(u64, Complex64),
) {
    let mut diag = 0.0;
    for j in 0..length {
        let k = (j + 1) % length;
        let theta = if k == 0 { phase } else { 0.0 };
        let bj = (state >> j) & 1;
        let bk = (state >> k) & 1;
        if bj == bk {
            diag -= 0.5 * delta;
        } else {
            diag += 0.5 * delta;
            let flipped = state ^ (1u64 << j) ^ (1u64 << k);
            let amp = if bk == 1 {
                -Complex64::from_polar(1.0, -theta)
            } else {
                -Complex64::from_polar(1.0, theta)
            };
            emit(flipped, amp);
        }
    }
    emit(state, Complex64::new(diag, 0.0));
}

/// Coordinate-list sparse matrix, entries sorted by (row, col) with duplicates merged.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    pub dim: usize,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub values: Vec<Complex64>,
}

impl SparseOperator {
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, Complex64)>) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut rows = Vec::with_capacity(triplets.len());
        let mut cols = Vec::with_capacity(triplets.len());
        let mut values: Vec<Complex64> = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            if let (Some(&lr), Some(&lc)) = (rows.last(), cols.last()) {
                if lr == r && lc == c {
                    *values.last_mut().unwrap() += v;
                    continue;
                }
            }
            rows.push(r);
            cols.push(c);
            values.push(v);
        }
        Self {
            dim,
            rows,
            cols,
            values,
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        y.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for ((&r, &c), &v) in self.rows.iter().zip(&self.cols).zip(&self.values) {
            y[r] += v * x[c];
        }
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<Complex64> {
        let mut m = nalgebra::DMatrix::zeros(self.dim, self.dim);
        for ((&r, &c), &v) in self.rows.iter().zip(&self.cols).zip(&self.values) {
            m[(r, c)] += v;
        }
        m
    }

    /// max |H - H†| over all entries.
    pub fn hermiticity_defect(&self) -> f64 {
        let dense = self.to_dense();
        let mut worst: f64 = 0.0;
        for r in 0..self.dim {
            for c in 0..self.dim {
                worst = worst.max((dense[(r, c)] - dense[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }
}

/// Hamiltonian restricted to a configuration basis.
#[derive(Debug, Clone)]
pub struct HamiltonianBlock {
    pub basis: Vec<u64>,
    pub operator: SparseOperator,
}

/// Builds H in the distributed-twist frame. With a sector the basis is the
/// fixed-magnetization subspace (momentum is resolved by `exact_diag`);
/// without one it is the full 2^L space.
pub fn build_hamiltonian(spec: &ModelSpec) -> Result<HamiltonianBlock> {
    build_hamiltonian_bounded(spec, DEFAULT_MAX_DIM)
}

pub fn build_hamiltonian_bounded(spec: &ModelSpec, max_dim: usize) -> Result<HamiltonianBlock> {
    let theta = spec.bond_phase();
    build_block(spec, max_dim, |s, emit| {
        for_each_term(spec.length, spec.delta, theta, s, emit)
    })
}

/// Boundary-twist form, unitarily equivalent to [`build_hamiltonian`].
pub fn build_boundary_twist_hamiltonian(spec: &ModelSpec) -> Result<HamiltonianBlock> {
    let phi = spec.phase();
    build_block(spec, DEFAULT_MAX_DIM, |s, emit| {
        for_each_term_boundary_twist(spec.length, spec.delta, phi, s, emit)
    })
}

fn build_block(
    spec: &ModelSpec,
    max_dim: usize,
    column: impl Fn(u64, &mut dyn FnMut(u64, Complex64)),
) -> Result<HamiltonianBlock> {
    let length = spec.length;
    check_bit_length(length)?;
    let dim = match spec.sector {
        Some(s) => binomial(length, s.up),
        None => 1usize << length,
    };
    if dim > max_dim {
        return Err(Error::Capacity {
            dim,
            bound: max_dim,
        });
    }
    let basis: Vec<u64> = match spec.sector {
        Some(s) => configurations(length, s.up),
        None => (0..(1u64 << length)).collect(),
    };
    let mut triplets = Vec::with_capacity(basis.len() * (length + 1));
    for (col, &s) in basis.iter().enumerate() {
        column(s, &mut |t, amp| {
            let row = basis.binary_search(&t).expect("U(1) symmetry keeps t in the basis");
            triplets.push((row, col, amp));
        });
    }
    Ok(HamiltonianBlock {
        operator: SparseOperator::from_triplets(basis.len(), triplets),
        basis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_examples() {
        assert!((gamma_from_delta(0.0).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!((gamma_from_delta(-0.5).unwrap() - PI / 3.0).abs() < 1e-15);
        let near = gamma_from_delta(-0.999999).unwrap();
        assert!(near < 0.002);
        assert!(near > gamma_from_delta(-0.9999999).unwrap());
        assert!(gamma_from_delta(1.0).is_err());
        assert!(gamma_from_delta(-1.0).is_err());
    }

    #[test]
    fn xi_examples() {
        assert!((xi_of_gamma(PI / 2.0).unwrap() - 2.0).abs() < 1e-15);
        let expected = 3.0 * 3f64.sqrt() / 2.0;
        assert!((xi_of_gamma(PI / 3.0).unwrap() - expected).abs() < 1e-14);
        assert!((expected - 2.598076211).abs() < 1e-9);
        let tiny = xi_of_gamma(PI - 1e-9).unwrap();
        assert!(tiny > 0.0 && tiny < 1e-8);
        assert!(xi_of_gamma(0.0).is_err());
        assert!(xi_of_gamma(PI).is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(ModelSpec::periodic(6, 0.2).is_ok());
        assert!(ModelSpec::periodic(5, 0.2).is_err());
        assert!(ModelSpec::periodic(2, 0.2).is_err());
        assert!(ModelSpec::periodic(8, 1.0).is_err());
        assert!(ModelSpec::twisted(8, 0.0, 2.0 * PI).is_err());
        assert!(ModelSpec::periodic(8, 0.0).unwrap().with_sector(9, 0).is_err());
    }

    #[test]
    fn gosper_enumeration_counts() {
        for l in [4usize, 6, 8, 10] {
            for r in 0..=l {
                let c = configurations(l, r);
                assert_eq!(c.len(), binomial(l, r));
                assert!(c.windows(2).all(|w| w[0] < w[1]));
                assert!(c.iter().all(|s| s.count_ones() as usize == r));
            }
        }
    }

    #[test]
    fn translation_has_period_dividing_length() {
        let l = 8;
        for s in configurations(l, 3) {
            let mut t = s;
            for _ in 0..l {
                t = translate(t, l);
            }
            assert_eq!(t, s);
        }
        assert_eq!(translate(0b1000_0000, 8), 0b0000_0001);
    }

    #[test]
    fn all_down_block_is_classical() {
        for delta in [-0.7, 0.0, 0.4] {
            let spec = ModelSpec::periodic(4, delta).unwrap().with_sector(0, 0).unwrap();
            let block = build_hamiltonian(&spec).unwrap();
            assert_eq!(block.basis.len(), 1);
            let e = block.operator.to_dense()[(0, 0)];
            assert!((e.re + 0.5 * delta * 4.0).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_twist_matches_periodic() {
        let p = ModelSpec::periodic(4, 0.0).unwrap().with_sector(2, 0).unwrap();
        let t = ModelSpec::twisted(4, 0.0, 0.0).unwrap().with_sector(2, 0).unwrap();
        let hp = build_hamiltonian(&p).unwrap();
        let ht = build_hamiltonian(&t).unwrap();
        assert_eq!(hp.operator, ht.operator);
    }

    #[test]
    fn blocks_are_hermitian() {
        for phi in [0.0, 0.7, 2.5] {
            let spec = ModelSpec::twisted(6, -0.3, phi).unwrap().with_sector(3, 0).unwrap();
            let block = build_hamiltonian(&spec).unwrap();
            assert!(block.operator.hermiticity_defect() < 1e-15);
            let b = build_boundary_twist_hamiltonian(&spec).unwrap();
            assert!(b.operator.hermiticity_defect() < 1e-15);
        }
    }

    #[test]
    fn capacity_bound_enforced() {
        let spec = ModelSpec::periodic(10, 0.0).unwrap().with_sector(5, 0).unwrap();
        assert!(matches!(
            build_hamiltonian_bounded(&spec, 100),
            Err(Error::Capacity { dim: 252, bound: 100 })
        ));
    }
}
