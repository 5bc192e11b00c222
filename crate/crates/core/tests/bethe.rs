use std::f64::consts::PI;

use xxz_negativity::bethe::{
    derivative_delta, solve_ground, solve_pattern, solve_sector, xx_energy_and_derivatives, xx_sector_record,
    BetheConfig, RootPattern,
};
use xxz_negativity::entanglement::{negativity_from_energy, negativity_tbc_from_energy, TwistForm};
use xxz_negativity::exact_diag::{ground_state, lowest_in_sector, EdConfig};
use xxz_negativity::ModelSpec;

#[test]
fn ground_energies_match_exact_diagonalization() {
    let cfg = BetheConfig::default();
    let ed = EdConfig::default();
    let mut worst: f64 = 0.0;
    for l in [4usize, 6, 8, 10, 12, 14] {
        for k in 0..7 {
            let delta = -0.9 + 0.3 * k as f64;
            for phi in [0.0, PI / 2.0] {
                let spec = ModelSpec::twisted(l, delta, phi).unwrap();
                let b = solve_ground(&spec, &cfg).unwrap();
                assert!(b.residual < 1e-12);
                let e = ground_state(&spec, &ed).unwrap();
                let diff = (b.energy_density - e.energy_density).abs();
                worst = worst.max(diff);
                assert!(diff < 1e-10, "L={l} Δ={delta} Φ={phi}: {} vs {}", b.energy_density, e.energy_density);
                let (rb, re) = (b.record().unwrap(), e.energy_record());
                assert!((rb.d_delta - re.d_delta).abs() < 1e-9, "∂Δ L={l} Δ={delta} Φ={phi}");
                assert!((rb.d_phi - re.d_phi).abs() < 1e-9, "∂Φ L={l} Δ={delta} Φ={phi}: {} vs {}", rb.d_phi, re.d_phi);
            }
        }
    }
    eprintln!("worst Bethe/ED energy gap {worst:e}");
}

#[test]
fn sector_energies_match_exact_diagonalization() {
    let cfg = BetheConfig::default();
    let ed = EdConfig::default();
    for (l, delta, n) in [(16usize, 0.0, 1usize), (12, -0.5, 1), (12, 0.6, 2), (10, -0.8, 3)] {
        let spec = ModelSpec::periodic(l, delta).unwrap();
        let b = solve_sector(&spec, n, &cfg).unwrap();
        let e = lowest_in_sector(&spec, l / 2 - n, 0, &ed).unwrap();
        assert!((b.energy_density - e.energy_density).abs() < 1e-10, "L={l} Δ={delta} n={n}");
    }
    let spec = ModelSpec::periodic(8, 0.3).unwrap();
    assert_eq!(solve_sector(&spec, 0, &cfg).unwrap(), solve_ground(&spec, &cfg).unwrap());
}

#[test]
fn free_fermion_path_agrees_with_solver() {
    let cfg = BetheConfig::default();
    for (l, phi) in [(16usize, 0.0), (64, PI / 2.0), (256, 1.0)] {
        let ff = xx_energy_and_derivatives(l, phi).unwrap();
        let b = solve_ground(&ModelSpec::twisted(l, 0.0, phi).unwrap(), &cfg).unwrap().record().unwrap();
        assert!((ff.energy_density - b.energy_density).abs() < 1e-13);
        assert!((ff.d_delta - b.d_delta).abs() < 1e-10);
        assert!((ff.d_phi - b.d_phi).abs() < 1e-12);
        let fd = derivative_delta(&ModelSpec::twisted(l, 0.0, phi).unwrap(), RootPattern::Ground, &cfg).unwrap();
        assert!((fd - ff.d_delta).abs() < 1e-8, "L={l}: {fd} vs {}", ff.d_delta);
    }
    let s = xx_sector_record(16, 1, 0.0).unwrap();
    let b = solve_sector(&ModelSpec::periodic(16, 0.0).unwrap(), 1, &cfg).unwrap();
    assert!((s.energy_density - b.energy_density).abs() < 1e-13);
}

#[test]
fn finite_difference_matches_implicit_derivative() {
    let cfg = BetheConfig::default();
    for (l, delta) in [(8usize, -0.5), (64, 0.4), (128, -0.7)] {
        let spec = ModelSpec::periodic(l, delta).unwrap();
        let a = solve_ground(&spec, &cfg).unwrap().record().unwrap().d_delta;
        let fd = derivative_delta(&spec, RootPattern::Ground, &cfg).unwrap();
        assert!((a - fd).abs() < 1e-8, "L={l} Δ={delta}: {a} vs {fd}");
        assert!((-2.0 * a).abs() <= 1.0);
    }
}

#[test]
fn reference_columns_large_rings() {
    let cfg = BetheConfig::default();
    let pbc = [
        (128usize, -0.5, 0.375101148980),
        (1024, -0.5, 0.375001580150),
        (64, -0.5, 0.375404791436),
    ];
    for (l, delta, expected) in pbc {
        let r = solve_ground(&ModelSpec::periodic(l, delta).unwrap(), &cfg).unwrap().record().unwrap();
        let n = negativity_from_energy(r.energy_density, r.d_delta, delta);
        assert!((n - expected).abs() < 1e-9, "L={l}: {n}");
    }
    let r = xx_energy_and_derivatives(1024, 0.0).unwrap();
    assert!((negativity_from_energy(r.energy_density, r.d_delta, 0.0) - 0.339263774123).abs() < 1e-9);
    let tbc = [(512usize, -0.5, 2.0 * PI / 3.0, 0.375001635654), (8, -0.5, 2.0 * PI / 3.0, 0.381121448251)];
    for (l, delta, phi, expected) in tbc {
        let r = solve_ground(&ModelSpec::twisted(l, delta, phi).unwrap(), &cfg).unwrap().record().unwrap();
        let n = negativity_tbc_from_energy(&r, TwistForm::UnscaledFlux).unwrap();
        assert!((n - expected).abs() < 1e-9, "L={l}: {n}");
    }
    for (l, expected) in [(256usize, 0.339276307427), (1024, 0.339263025109)] {
        let r = xx_energy_and_derivatives(l, PI / 2.0).unwrap();
        let n = negativity_tbc_from_energy(&r, TwistForm::UnscaledFlux).unwrap();
        assert!((n - expected).abs() < 1e-9, "L={l}: {n}");
    }
}

#[test]
fn sector_gap_follows_anomalous_dimension() {
    let cfg = BetheConfig::default();
    let spec = ModelSpec::periodic(256, 0.0).unwrap();
    let e0 = solve_ground(&spec, &cfg).unwrap().energy_density;
    let e1 = solve_sector(&spec, 1, &cfg).unwrap().energy_density;
    let ratio = 256.0f64.powi(2) * (e1 - e0) / (2.0 * PI * 2.0);
    assert!((ratio - 0.25).abs() < 0.0025, "{ratio}");
}

#[test]
fn marginal_state_against_exact_diagonalization() {
    let cfg = BetheConfig::default();
    let ed = EdConfig::default();
    for (l, delta) in [(8usize, 0.0), (12, -0.3), (12, 0.3)] {
        let spec = ModelSpec::periodic(l, delta).unwrap();
        let b = solve_pattern(&spec, RootPattern::Marginal, &cfg).unwrap();
        let states = xxz_negativity::exact_diag::lowest_states_in_sector(&spec, l / 2, 0, 6, &ed).unwrap();
        let hit = states.iter().any(|s| (s.energy_density - b.energy_density).abs() < 1e-10);
        let list: Vec<f64> = states.iter().map(|s| s.energy_density).collect();
        assert!(hit, "L={l} Δ={delta}: {} not in {list:?}", b.energy_density);
    }
}
