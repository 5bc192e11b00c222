/// Energy density and its first derivatives for one model point.
///
/// `d_phi` is the derivative with respect to the total twist Φ, taken in
/// the distributed-twist frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRecord {
    pub length: usize,
    pub delta: f64,
    pub phi: f64,
    pub energy_density: f64,
    pub d_delta: f64,
    pub d_phi: f64,
}

impl EnergyRecord {
    /// Nearest-neighbour ⟨σᶻσᶻ⟩ implied by the Hellmann–Feynman relation.
    pub fn g_zz(&self) -> f64 {
        -2.0 * self.d_delta
    }
}
