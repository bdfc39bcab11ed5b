//! Noisy closed forms against the covariance-matrix route.

use num_complex::Complex64;
use proptest::prelude::*;
use twinbeam::bell::{bell_dp, no_click_a, no_click_both};
use twinbeam::{fidelity_ips, ips_two_mode, noisy_twb_pair, ChannelParams, DetectorParams, IpsParams, TwbParams};
use twinbeam_oracle::phase_space::{subtracted_noisy_twb, PhaseSpaceState};

fn both(r: f64, t: f64, eps: f64, gt: f64, n: f64) -> (twinbeam::GaussianSumState, PhaseSpaceState) {
    let ch = ChannelParams::new(gt, n).unwrap();
    let closed = ips_two_mode(&noisy_twb_pair(&TwbParams::new(r).unwrap(), &ch), &IpsParams::new(t, eps).unwrap()).unwrap();
    (closed, subtracted_noisy_twb(r, gt, n, t, eps))
}

fn complex(range: f64) -> impl Strategy<Value = Complex64> {
    (-range..range, -range..range).prop_map(|(a, b)| Complex64::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn noisy_subtraction_matches(r in 0.05f64..2.0, t in 0.5f64..0.9999, eps in 0.1f64..=1.0,
                                 gt in 0.0f64..1.0, n in 0.0f64..0.5,
                                 a in complex(1.0), b in complex(1.0),
                                 eta in 0.1f64..=1.0, dark in 0.0f64..0.3) {
        let (closed, ps) = both(r, t, eps, gt, n);
        let p = closed.norm();
        prop_assert!(((p - ps.norm()) / p).abs() < 1e-9, "p11 {p} vs {}", ps.norm());
        prop_assert!((closed.energy() - ps.energy()).abs() < 1e-9 * closed.energy().max(1.0));
        prop_assert!((closed.displaced_parity(a, b) - ps.displaced_parity(a, b)).abs() < 1e-9);
        prop_assert!((fidelity_ips(&closed) - ps.fidelity()).abs() < 1e-9);
        let det = DetectorParams::new(eta, dark).unwrap();
        prop_assert!((no_click_both(&closed, a, b, &det) - ps.no_click_both(a, b, eta, dark)).abs() < 1e-9);
        prop_assert!((no_click_a(&closed, a, &det) - ps.no_click_a(a, eta, dark)).abs() < 1e-9);
    }

    #[test]
    fn noisy_twin_beam_matches(r in 0.0f64..3.0, gt in 0.0f64..2.0, n in 0.0f64..1.0, a in complex(1.0), b in complex(1.0)) {
        let form = twinbeam::evolve_twb(&TwbParams::new(r).unwrap(), &ChannelParams::new(gt, n).unwrap());
        let closed = twinbeam::GaussianSumState::from_form(form);
        let ps = PhaseSpaceState::from_covariance(r, gt, n);
        prop_assert!((closed.displaced_parity(a, b) - ps.displaced_parity(a, b)).abs() < 1e-10);
        prop_assert!((twinbeam::fidelity_gaussian(&form) - ps.fidelity()).abs() < 1e-12);
    }
}

#[test]
fn parity_bell_values_in_the_noisy_tail() {
    // deep in the non-violating tail, where extra thermal noise raises B
    let s = twinbeam::DisplacementSettings::parity(1.6e-3).unwrap();
    let independent = |r: f64, n: f64| {
        let (closed, ps) = both(r, 0.9999, 1.0, 0.01, n);
        let b = bell_dp(&closed, 1.6e-3).unwrap().value;
        let p = |i: usize, j: usize| ps.displaced_parity(s.alpha[i], s.beta[j]);
        let want = p(0, 0) + p(0, 1) + p(1, 0) - p(1, 1);
        assert!((b - want).abs() < 1e-10, "r={r} N={n}: {b} vs {want}");
        want
    };
    for (r, n) in [(1.16, 0.0), (0.5, 0.2)] {
        independent(r, n);
    }
    for r in [2.8, 3.0] {
        let (quiet, noisy) = (independent(r, 0.0), independent(r, 0.2));
        assert!(noisy > quiet && quiet < 0.01, "r={r}: {quiet} {noisy}");
    }
}
