use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use xxz_negativity::cft::{negativity_cft_ground, negativity_cft_tbc};
use xxz_negativity::entanglement::*;
use xxz_negativity::exact_diag::CorrelatorSet;
use xxz_negativity::thermo::thermo_limit;

/// Physical U(1)-symmetric two-site states: diagonal weights on the
/// simplex and a coherence bounded by the middle block.
fn rdm() -> impl Strategy<Value = TwoSiteRdm> {
    (0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64, 0.0..2.0 * PI).prop_map(|(x, y, w, r, t)| {
        let total = x + 2.0 * y + w + 1e-12;
        let (a, b, d) = (x / total, y / total, w / total);
        TwoSiteRdm {
            a,
            b,
            d,
            z: Complex64::from_polar(r * b, t),
        }
    })
}

proptest! {
    #[test]
    fn closed_form_and_matrix_routes_agree(r in rdm()) {
        let from_rdm = negativity_raw_from_rdm(&r).unwrap();
        let from_matrix = negativity_raw_from_matrix(&r.to_matrix()).unwrap();
        prop_assert!((from_rdm - from_matrix).abs() < 1e-12);
    }

    #[test]
    fn negativity_is_a_fraction(r in rdm()) {
        let n = negativity_from_rdm(&r).unwrap();
        prop_assert!((0.0..=1.0).contains(&n));
    }

    #[test]
    fn correlator_route_matches_density_matrix(gz in -0.4..0.4f64, gzz in -0.9..0.1f64, gp in 0.0..0.5f64, gq in -0.2..0.2f64) {
        let c = CorrelatorSet { g_z: gz, g_zz: gzz, g_par: gp, g_perp: gq };
        let r = TwoSiteRdm::from_correlators(&c);
        prop_assume!(r.validate().is_ok());
        prop_assert!((negativity_raw_xxz(&c) - negativity_raw_from_rdm(&r).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn free_fermion_expansion_ignores_the_twist(phi in 0.0..PI, l in 2usize..600) {
        let thermo = thermo_limit(0.0).unwrap();
        let l = 2 * l;
        let twisted = negativity_cft_tbc(0.0, phi, l, &thermo, TwistForm::FixedAnisotropy).unwrap();
        let plain = negativity_cft_ground(0.0, l, &thermo).unwrap();
        prop_assert!((twisted - plain).abs() < 1e-12);
    }
}
