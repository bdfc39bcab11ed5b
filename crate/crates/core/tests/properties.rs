//! Randomized invariants of the closed forms.

use num_complex::Complex64;
use proptest::prelude::*;
use twinbeam::bell::{
    bell_dp_with, bell_hd_with, bell_onoff_with, bell_ps_with, ch_inequality, no_click_a, no_click_b,
    no_click_both, AngleSettings, TSIRELSON,
};
use twinbeam::sweep::{Point, StateKind};
use twinbeam::{
    ips_two_mode, noisy_twb_pair, ChannelParams, DetectorParams, DisplacementSettings, GaussianForm2,
    GaussianSumState, IpsCoefficients, IpsParams, TwbParams,
};

fn complex(range: f64) -> impl Strategy<Value = Complex64> {
    (-range..range, -range..range).prop_map(|(a, b)| Complex64::new(a, b))
}

fn settings() -> impl Strategy<Value = DisplacementSettings> {
    (complex(1.0), complex(1.0), complex(1.0), complex(1.0))
        .prop_map(|(a0, a1, b0, b1)| DisplacementSettings { alpha: [a0, a1], beta: [b0, b1] })
}

fn angles() -> impl Strategy<Value = AngleSettings> {
    let a = -std::f64::consts::PI..std::f64::consts::PI;
    (a.clone(), a.clone(), a.clone(), a).prop_map(|(a0, a1, b0, b1)| AngleSettings { a: [a0, a1], b: [b0, b1] })
}

fn point() -> impl Strategy<Value = (Point, StateKind)> {
    (
        0.0f64..3.0,
        0.05f64..0.9999,
        0.05f64..=1.0,
        0.0f64..2.0,
        0.0f64..1.0,
        0.05f64..=1.0,
        0.0f64..0.5,
        0.05f64..=1.0,
        prop_oneof![Just(StateKind::Twb), Just(StateKind::Ips)],
    )
        .prop_map(|(r, t, eps, gamma_t, nth, eta, dark, eta_h, kind)| {
            // subtraction from (almost) vacuum has no clicks
            let r = if kind == StateKind::Ips { r.max(0.01) } else { r };
            (Point { r, t, eps, gamma_t, nth, eta, dark, eta_h, j: 0.16 }, kind)
        })
}

fn ips_state(r: f64, t: f64, eps: f64, ch: &ChannelParams) -> GaussianSumState {
    ips_two_mode(&noisy_twb_pair(&TwbParams::new(r).unwrap(), ch), &IpsParams::new(t, eps).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn no_test_exceeds_tsirelson((p, kind) in point(), s in settings(), a in angles()) {
        let state = p.state(kind).unwrap();
        let det = p.detector().unwrap();
        let values = [
            bell_dp_with(&state, &s).unwrap().value,
            bell_onoff_with(&state, &s, &det).unwrap().value,
            bell_hd_with(&state, &a, p.eta_h).unwrap().value,
            bell_ps_with(&state, &a).unwrap().value,
        ];
        for v in values {
            prop_assert!(v.is_finite() && v.abs() <= TSIRELSON + 1e-9, "{v} at {p:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn vacuum_never_violates_ch(s in settings(), eta in 0.05f64..=1.0, dark in 0.0f64..0.5) {
        let vac = GaussianSumState::from_form(GaussianForm2::new(2.0, 2.0, 0.0).unwrap());
        let rep = ch_inequality(&vac, &s, &DetectorParams::new(eta, dark).unwrap());
        prop_assert!(!rep.violated, "{}", rep.lhs);
    }

    #[test]
    fn ch_form_is_the_bell_parameter((p, kind) in point(), s in settings()) {
        let state = p.state(kind).unwrap();
        let det = p.detector().unwrap();
        let b = bell_onoff_with(&state, &s, &det).unwrap().value;
        let lhs = ch_inequality(&state, &s, &det).lhs;
        prop_assert!((lhs - (b - 2.0) / 4.0).abs() < 1e-12);
    }

    #[test]
    fn coincident_settings_cannot_violate((p, kind) in point(), a in complex(1.0), b in complex(1.0)) {
        let state = p.state(kind).unwrap();
        let s = DisplacementSettings { alpha: [a, a], beta: [b, b] };
        prop_assert!(bell_onoff_with(&state, &s, &p.detector().unwrap()).unwrap().value.abs() <= 2.0 + 1e-12);
        prop_assert!(bell_dp_with(&state, &s).unwrap().value.abs() <= 2.0 + 1e-12);
    }

    #[test]
    fn subtracted_state_is_swap_symmetric(r in 0.01f64..2.0, t in 0.05f64..0.9999, eps in 0.05f64..=1.0,
                                          gt in 0.0f64..1.0, n in 0.0f64..0.5, a in complex(1.5), b in complex(1.5)) {
        let s = ips_state(r, t, eps, &ChannelParams::new(gt, n).unwrap());
        let (w1, w2) = (s.wigner(a, b), s.wigner(b, a));
        prop_assert!((w1 - w2).abs() <= 1e-14 * w1.abs().max(1.0));
    }

    #[test]
    fn normalization_is_self_consistent(r in 0.01f64..2.0, t in 0.05f64..0.9999, eps in 0.05f64..=1.0,
                                        gt in 0.0f64..1.0, n in 0.0f64..0.5) {
        let ch = ChannelParams::new(gt, n).unwrap();
        let ips = IpsParams::new(t, eps).unwrap();
        let coeffs = IpsCoefficients::compute(&noisy_twb_pair(&TwbParams::new(r).unwrap(), &ch), &ips).unwrap();
        let s = coeffs.state().unwrap();
        let p = coeffs.probability();
        prop_assert!(p > 0.0 && p < 1.0);
        prop_assert!(((s.norm() - p) / p).abs() < 1e-12);
        let (sum, scale) = s.terms().fold((0.0, 0.0), |(acc, sc), (c, f)| (acc + c / f.delta(), sc + (c / f.delta()).abs()));
        prop_assert!((sum - p).abs() <= 1e-12 * scale, "{sum} vs {p}");
    }

    #[test]
    fn fidelities_are_probabilities((p, _) in point()) {
        let p = Point { r: p.r.max(0.01), ..p };
        let f_ips = twinbeam::fidelity_ips(&p.state(StateKind::Ips).unwrap());
        let f_twb = twinbeam::fidelity_ips(&p.state(StateKind::Twb).unwrap());
        prop_assert!(f_ips > 0.0 && f_ips <= 1.0);
        prop_assert!(f_twb > 0.0 && f_twb <= 1.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn dark_counts_rescale_efficiency((p, kind) in point(), s in settings()) {
        let state = p.state(kind).unwrap();
        let det = p.detector().unwrap();
        let scale = 1.0 / (1.0 + p.dark);
        let bare = DetectorParams::new(p.eta * scale, 0.0).unwrap();
        let i = |x: usize, y: usize| no_click_both(&state, s.alpha[x], s.beta[y], &bare) * scale * scale;
        let lhs = i(0, 0) + i(0, 1) + i(1, 0) - i(1, 1)
            - (no_click_a(&state, s.alpha[0], &bare) + no_click_b(&state, s.beta[0], &bare)) * scale;
        let b = bell_onoff_with(&state, &s, &det).unwrap().value;
        prop_assert!((b - (2.0 + 4.0 * lhs)).abs() < 1e-12, "{b} vs {}", 2.0 + 4.0 * lhs);
    }
}
