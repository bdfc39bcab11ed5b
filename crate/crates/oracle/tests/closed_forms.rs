//! Point comparisons between the closed forms and the Fock-space oracle.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use proptest::prelude::*;
use twinbeam::bell::{homodyne_correlation, no_click_a, no_click_b, no_click_both};
use twinbeam::{
    ips_fock_matrix, ips_single_mode, ips_two_mode, noisy_twb_pair, squeezed_vacuum_form, twb_form,
    ChannelParams, DetectorParams, DisplacementSettings, GaussianSumState, IpsParams, TwbParams,
};
use twinbeam_oracle::measure::{energy, expect_onoff, expect_parity_displaced, wigner};
use twinbeam_oracle::quadrature::{joint_quadrature_density, sign_correlation, QuadratureGrid};
use twinbeam_oracle::states::{annihilate, apply_ips_single, squeezed_vacuum, FockState1};
use twinbeam_oracle::{apply_ips, build_twb, recommended_cutoff, OracleConfig};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn closed_ips(r: f64, t: f64, eps: f64) -> GaussianSumState {
    let pair = noisy_twb_pair(&TwbParams::new(r).unwrap(), &ChannelParams::ideal());
    ips_two_mode(&pair, &IpsParams::new(t, eps).unwrap()).unwrap()
}

fn oracle_ips(r: f64, t: f64, eps: f64) -> (twinbeam::FockState2, f64) {
    let twb = TwbParams::new(r).unwrap();
    let ips = IpsParams::new(t, eps).unwrap();
    let c = recommended_cutoff(&twb, &ips);
    apply_ips(&build_twb(&twb, c, &OracleConfig::default()).unwrap(), &ips)
}

#[test]
fn twin_beam_photon_number_and_purity() {
    let twb = TwbParams::new(0.5).unwrap();
    let rho = build_twb(&twb, 40, &OracleConfig::default()).unwrap();
    let (na, nb) = rho.mean_photons();
    let want = 0.5f64.sinh().powi(2);
    assert!((na - want).abs() < 1e-12 && (nb - want).abs() < 1e-12);
    let m = rho.matrix();
    let purity = (m * m).trace().re;
    assert!((purity - 1.0).abs() < 1e-12);
}

#[test]
fn vacuum_twin_beam_is_vacuum() {
    let rho = build_twb(&TwbParams::new(0.0).unwrap(), 16, &OracleConfig::default()).unwrap();
    assert!((rho.get(0, 0, 0, 0).re - 1.0).abs() < 1e-15);
    assert!((expect_parity_displaced(&rho, c(0.0, 0.0), c(0.0, 0.0)) - 1.0).abs() < 1e-15);
    let t = expect_onoff(&rho, c(0.0, 0.0), c(0.0, 0.0), 1.0, 0.0);
    assert!((t.p_none - 1.0).abs() < 1e-15);
}

#[test]
fn vacuum_never_clicks_after_subtraction() {
    let rho = build_twb(&TwbParams::new(0.0).unwrap(), 16, &OracleConfig::default()).unwrap();
    let (_, p) = apply_ips(&rho, &IpsParams::new(0.5, 1.0).unwrap());
    assert_eq!(p, 0.0);
}

#[test]
fn twin_beam_wigner_at_origin() {
    let twb = TwbParams::new(0.5).unwrap();
    let rho = build_twb(&twb, 40, &OracleConfig::default()).unwrap();
    let closed = twb_form(&twb).wigner(c(0.0, 0.0), c(0.0, 0.0));
    assert!((wigner(&rho, c(0.0, 0.0), c(0.0, 0.0)) - closed).abs() < 1e-6 * closed.max(1.0));
    // parity at the origin is (pi^2 / 4) W(0, 0)
    let parity = expect_parity_displaced(&rho, c(0.0, 0.0), c(0.0, 0.0));
    assert!((parity - PI * PI / 4.0 * closed).abs() < 1e-6);
}

#[test]
fn click_probability_matches_oracle() {
    let pair = noisy_twb_pair(&TwbParams::new(0.5).unwrap(), &ChannelParams::ideal());
    let ips = IpsParams::new(0.9, 1.0).unwrap();
    let p11 = twinbeam::IpsCoefficients::compute(&pair, &ips).unwrap().probability();
    let (_, p) = oracle_ips(0.5, 0.9, 1.0);
    assert!((p11 - p).abs() < 1e-8 * p, "{p11} vs {p}");
}

#[test]
fn subtracted_wigner_and_energy_match_oracle() {
    let s = closed_ips(0.5, 0.9, 1.0);
    let (rho, _) = oracle_ips(0.5, 0.9, 1.0);
    let w = wigner(&rho, c(0.0, 0.0), c(0.0, 0.0));
    assert!((s.wigner(c(0.0, 0.0), c(0.0, 0.0)) - w).abs() < 1e-6);
    for (a, b) in [(c(0.3, -0.1), c(0.2, 0.4)), (c(-0.5, 0.0), c(0.0, 0.7))] {
        assert!((s.wigner(a, b) - wigner(&rho, a, b)).abs() < 1e-6);
    }

    let s = closed_ips(0.3, 0.9, 1.0);
    let (rho, _) = oracle_ips(0.3, 0.9, 1.0);
    assert!((s.energy() - energy(&rho)).abs() < 1e-6);
}

#[test]
fn closed_fock_matrix_equals_beam_splitter_construction() {
    let twb = TwbParams::new(0.5).unwrap();
    let ips = IpsParams::new(0.9, 1.0).unwrap();
    let closed = ips_fock_matrix(&twb, &ips, 30).unwrap();
    assert!((closed.trace() - 1.0).abs() < 1e-10);
    let (oracle, _) = apply_ips(&build_twb(&twb, 30, &OracleConfig::default()).unwrap(), &ips);
    let worst = closed
        .matrix()
        .iter()
        .zip(oracle.matrix().iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    assert!(worst < 1e-8, "{worst}");
}

#[test]
fn on_off_probabilities_match_for_twin_beam() {
    let twb = TwbParams::new(0.74).unwrap();
    let rho = build_twb(&twb, 40, &OracleConfig::default()).unwrap();
    let s = GaussianSumState::from_form(twb_form(&twb));
    let set = DisplacementSettings::onoff(0.16).unwrap();
    for det in [DetectorParams::ideal(), DetectorParams::new(0.7, 0.05).unwrap()] {
        for i in 0..2 {
            for j in 0..2 {
                let (a, b) = (set.alpha[i], set.beta[j]);
                let t = expect_onoff(&rho, a, b, det.eta(), det.dark());
                assert!((t.p_none - no_click_both(&s, a, b, &det)).abs() < 1e-6);
                assert!((t.p_a_silent - no_click_a(&s, a, &det)).abs() < 1e-6);
                assert!((t.p_b_silent - no_click_b(&s, b, &det)).abs() < 1e-6);
            }
        }
    }
}

#[test]
fn subtracted_marginal_no_click_matches_oracle() {
    let s = closed_ips(0.39, 0.9999, 1.0);
    let (rho, _) = oracle_ips(0.39, 0.9999, 1.0);
    let a = c(0.16, 0.0);
    let det = DetectorParams::new(0.8, 0.0).unwrap();
    let t = expect_onoff(&rho, a, c(-0.3, 0.0), det.eta(), 0.0);
    assert!((t.p_a_silent - no_click_a(&s, a, &det)).abs() < 1e-6);
}

#[test]
fn dark_counts_are_an_efficiency_rescaling_in_the_oracle() {
    let (rho, _) = oracle_ips(0.4, 0.9, 0.7);
    let (a, b) = (c(0.16, 0.0), c(-0.16, 0.0));
    let (eta, dark) = (0.8, 0.1);
    let with = expect_onoff(&rho, a, b, eta, dark);
    let without = expect_onoff(&rho, a, b, eta / (1.0 + dark), 0.0);
    let s = 1.0 / (1.0 + dark);
    assert!((with.p_none - s * s * without.p_none).abs() < 1e-12);
    assert!((with.p_a_silent - s * without.p_a_silent).abs() < 1e-12);
}

#[test]
fn single_mode_subtraction_matches_oracle() {
    let r = 0.5;
    let ips = IpsParams::new(0.9, 1.0).unwrap();
    let closed = ips_single_mode(&squeezed_vacuum_form(r).unwrap(), &ips).unwrap();
    let sq = FockState1::pure(&squeezed_vacuum(r, 120));
    let (out, p1) = apply_ips_single(&sq, &ips);
    assert!((closed.norm() - p1).abs() < 1e-8, "{} vs {p1}", closed.norm());
    assert!((closed.energy() - out.energy()).abs() < 1e-8);
    for z in [c(0.0, 0.0), c(0.4, 0.0), c(0.1, -0.6)] {
        assert!((closed.wigner(z) - out.wigner(z)).abs() < 1e-8);
    }
}

#[test]
fn near_unit_transmissivity_gives_squeezed_single_photon() {
    let r = 0.2;
    let psi = squeezed_vacuum(r, 80);
    let (out, _) = apply_ips_single(&FockState1::pure(&psi), &IpsParams::new(0.999, 1.0).unwrap());
    let one = annihilate(&psi);
    let one = &one / Complex64::new(one.norm(), 0.0);
    assert!(out.overlap(&one) > 0.999);
}

#[test]
fn homodyne_correlation_matches_sign_binned_sampling() {
    let (r, t) = (0.5, 0.99);
    let s = closed_ips(r, t, 1.0);
    let (rho, _) = oracle_ips(r, t, 1.0);
    let (theta, phi) = (0.0, -FRAC_PI_4);
    let density = joint_quadrature_density(&rho, theta, phi, QuadratureGrid::default());
    let samples = density.sample(1_000_000, 11);
    for eta_h in [1.0, 0.8] {
        let closed = homodyne_correlation(&s, theta, phi, eta_h).unwrap();
        let mc = sign_correlation(&samples, eta_h, 11);
        assert!((closed - mc).abs() < 3e-3, "eta_h {eta_h}: {closed} vs {mc}");
    }
    let grid = density.expectation(|x, y| x.signum() * y.signum());
    let closed = homodyne_correlation(&s, theta, phi, 1.0).unwrap();
    assert!((closed - grid).abs() < 1e-3, "{closed} vs {grid}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn subtracted_states_are_physical(r in 0.05f64..0.6, t in 0.5f64..0.9999, eps in 0.05f64..1.0) {
        let (rho, p) = oracle_ips(r, t, eps);
        prop_assert!(p > 0.0);
        prop_assert!((rho.trace() - 1.0).abs() < 1e-10);
        prop_assert!(rho.hermiticity_defect() < 1e-12);
        prop_assert!(rho.min_eigenvalue() > -1e-10);
    }

    #[test]
    fn parity_matches_closed_form_off_grid(r in 0.05f64..0.6, t in 0.5f64..0.9999, eps in 0.05f64..1.0,
                                           ar in -0.4f64..0.4, bi in -0.4f64..0.4) {
        let s = closed_ips(r, t, eps);
        let (rho, _) = oracle_ips(r, t, eps);
        let (a, b) = (c(ar, 0.1), c(-0.2, bi));
        prop_assert!((s.displaced_parity(a, b) - expect_parity_displaced(&rho, a, b)).abs() < 1e-6);
    }
}
