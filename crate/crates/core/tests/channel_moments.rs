//! The damped thermal channel against a direct integration of the moment
//! equations of its master equation.
//!
//! With `(Gamma/2) [(1+N) L[a] + N L[a^dag]]` on each mode,
//! `d<a^dag a>/dt = -Gamma (<a^dag a> - N)` and `d<ab>/dt = -Gamma <ab>`.

use nalgebra::Matrix4;
use twinbeam::channel::evolve_covariance;
use twinbeam::{evolve_twb, twb_form, ChannelParams, GaussianForm2, TwbParams};

fn rk4(n0: f64, m0: f64, gamma_t: f64, nth: f64, steps: usize) -> (f64, f64) {
    let rhs = |n: f64, m: f64| (-(n - nth), -m);
    let h = gamma_t / steps as f64;
    let (mut n, mut m) = (n0, m0);
    for _ in 0..steps {
        let k1 = rhs(n, m);
        let k2 = rhs(n + 0.5 * h * k1.0, m + 0.5 * h * k1.1);
        let k3 = rhs(n + 0.5 * h * k2.0, m + 0.5 * h * k2.1);
        let k4 = rhs(n + h * k3.0, m + h * k3.1);
        n += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        m += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
    }
    (n, m)
}

/// Covariance of `(x_a, p_a, x_b, p_b)` for a twin beam with `<a^dag a> = n`
/// and `<ab> = m` real.
fn covariance(n: f64, m: f64) -> Matrix4<f64> {
    let v = n + 0.5;
    Matrix4::new(
        v, 0.0, m, 0.0, //
        0.0, v, 0.0, -m, //
        m, 0.0, v, 0.0, //
        0.0, -m, 0.0, v,
    )
}

#[test]
fn closed_form_matches_integrated_moments() {
    for (r, gt, nth) in [(0.5, 0.2, 0.1), (1.1, 0.05, 0.0), (0.3, 1.5, 0.4)] {
        let (n, m) = rk4(f64::sinh(r).powi(2), 0.5 * f64::sinh(2.0 * r), gt, nth, 4000);
        let want = covariance(n, m);
        let form = evolve_twb(&TwbParams::new(r).unwrap(), &ChannelParams::new(gt, nth).unwrap());
        let got = form.covariance();
        assert!((got - want).abs().max() < 1e-10, "r={r}: {got} vs {want}");

        let back = GaussianForm2::from_covariance(&want).unwrap();
        assert!((back.f() - form.f()).abs() < 1e-8 && (back.h() - form.h()).abs() < 1e-8);
    }
}

#[test]
fn covariance_evolution_is_a_semigroup() {
    let cov = twb_form(&TwbParams::new(0.8).unwrap()).covariance();
    let (a, b) = (ChannelParams::new(0.3, 0.2).unwrap(), ChannelParams::new(0.45, 0.2).unwrap());
    let direct = evolve_covariance(&cov, &ChannelParams::new(0.75, 0.2).unwrap());
    let composed = evolve_covariance(&evolve_covariance(&cov, &a), &b);
    assert!((direct - composed).abs().max() < 1e-12);

    let twb = TwbParams::new(0.8).unwrap();
    let via_form = evolve_twb(&twb, &ChannelParams::new(0.75, 0.2).unwrap()).covariance();
    assert!((via_form - composed).abs().max() < 1e-12);
}

#[test]
fn entanglement_decreases_and_states_stay_physical() {
    for r in [0.2, 0.7, 1.5] {
        for nth in [0.0, 0.3] {
            let twb = TwbParams::new(r).unwrap();
            let mut last = f64::INFINITY;
            for k in 0..=40 {
                let form = evolve_twb(&twb, &ChannelParams::new(0.05 * k as f64, nth).unwrap());
                let ratio = form.h() / form.f();
                assert!(ratio <= last + 1e-15);
                last = ratio;
                // Heisenberg bound: FG - H^2 <= 4 with equality for pure states
                assert!(form.delta() <= 4.0 + 1e-12);
            }
        }
    }
}

#[test]
fn long_damping_without_noise_reaches_vacuum() {
    let form = evolve_twb(&TwbParams::new(0.9).unwrap(), &ChannelParams::new(80.0, 0.0).unwrap());
    assert!((form.f() - 2.0).abs() < 1e-12 && form.h().abs() < 1e-12);
}
