//! Closed-form results for the internal decay and the tunneling trajectory.
//!
//! Everything here is an explicit function of the dimensionless groups
//! (eta, beta, delta_small, gamma_ratio): the angular factor `h`, the complex
//! overlap factor `d(eta, beta)` controlling the modified decay rates, its
//! companion `a(eta, beta)` in the position dynamics, the Wigner-Weisskopf
//! rates for the two doublet branches, and the mean position `<z(t)>` with
//! its long-time amplitude and phase.
//!
//! The `beta -> 0` limits of `d` and `a` hide severe cancellation in the
//! naive formulas, so small arguments switch to Taylor branches; both routes
//! share the same building blocks which keeps the algebraic identity
//! `a = 4/3 + (4/3) Re d` exact in floating point.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{InitialExternalState, ModelParams};
use crate::si;

/// Doublet branch: decay of |+ e> or |- e>, or post-selection on |+> / |->.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// Long-time tunneling envelope: `<z(t)> -> (b/2) A cos(delta_tunnel t + phi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TunnelingEnvelope {
    /// Relative amplitude, in [1/2, 1].
    pub amplitude: f64,
    /// Phase in (-pi, pi].
    pub phase: f64,
    /// The a(eta, beta) coefficient the envelope was built from.
    pub a_coeff: f64,
}

/// Angular factor h(eta, mu) = sin^2(eta) + 2cos^2(eta) + mu^2 (sin^2(eta) - 2cos^2(eta)).
pub fn angular_h(eta: f64, mu: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&mu) {
        return Err(Error::domain(format!("mu = {mu} outside [-1, 1]")));
    }
    let s = eta.sin().powi(2);
    let c = eta.cos().powi(2);
    Ok(s + 2.0 * c + mu * mu * (s - 2.0 * c))
}

/// Arguments below this use the Taylor branches of the beta kernels.
const BETA_SERIES_THRESHOLD: f64 = 0.05;

/// sin(beta)/beta, stable at small beta.
fn kernel_sym(beta: f64) -> f64 {
    if beta < BETA_SERIES_THRESHOLD {
        let b2 = beta * beta;
        1.0 - b2 / 6.0 + b2 * b2 / 120.0
    } else {
        beta.sin() / beta
    }
}

/// (2 beta cos(beta) + (beta^2 - 2) sin(beta)) / beta^3, stable at small beta.
fn kernel_asym(beta: f64) -> f64 {
    if beta < BETA_SERIES_THRESHOLD {
        let b2 = beta * beta;
        1.0 / 3.0 - b2 / 10.0 + b2 * b2 / 168.0
    } else {
        (2.0 * beta * beta.cos() + (beta * beta - 2.0) * beta.sin()) / beta.powi(3)
    }
}

/// (i/beta)(1 - e^{i beta}); real part is `kernel_sym`.
fn kernel_sym_c(beta: f64) -> Complex64 {
    if beta < BETA_SERIES_THRESHOLD {
        let b2 = beta * beta;
        Complex64::new(
            1.0 - b2 / 6.0 + b2 * b2 / 120.0,
            beta / 2.0 - b2 * beta / 24.0,
        )
    } else {
        Complex64::new(kernel_sym(beta), (1.0 - beta.cos()) / beta)
    }
}

/// (-2i + e^{i beta}(2i + 2 beta - i beta^2)) / beta^3; real part is `kernel_asym`.
fn kernel_asym_c(beta: f64) -> Complex64 {
    if beta < BETA_SERIES_THRESHOLD {
        let b2 = beta * beta;
        Complex64::new(
            1.0 / 3.0 - b2 / 10.0 + b2 * b2 / 168.0,
            beta / 4.0 - b2 * beta / 36.0,
        )
    } else {
        let im = (2.0 * beta * beta.sin() + (2.0 - beta * beta) * beta.cos() - 2.0) / beta.powi(3);
        Complex64::new(kernel_asym(beta), im)
    }
}

fn angular_weights(eta: f64) -> (f64, f64) {
    let s = eta.sin().powi(2);
    let c = eta.cos().powi(2);
    (s + 2.0 * c, s - 2.0 * c)
}

/// Re d(eta, beta): the decay-relevant part of the overlap factor. Equals 1 at
/// beta = 0 and falls off as 1/beta with slight oscillations.
pub fn re_d(eta: f64, beta: f64) -> f64 {
    let (w_sym, w_asym) = angular_weights(eta);
    0.75 * (w_sym * kernel_sym(beta) + w_asym * kernel_asym(beta))
}

/// Complex overlap factor d(eta, beta); the imaginary part feeds line shifts.
pub fn d_complex(eta: f64, beta: f64) -> Complex64 {
    let (w_sym, w_asym) = angular_weights(eta);
    (kernel_sym_c(beta) * w_sym + kernel_asym_c(beta) * w_asym) * 0.75
}

/// Companion coefficient a(eta, beta) of the tunneling trajectory.
/// Satisfies a = 4/3 + (4/3) Re d exactly; limits: a(eta, 0) = 8/3.
pub fn a_coeff(eta: f64, beta: f64) -> f64 {
    let (w_sym, w_asym) = angular_weights(eta);
    w_sym * (1.0 + kernel_sym(beta)) + w_asym * (1.0 / 3.0 + kernel_asym(beta))
}

/// Standard vacuum Wigner-Weisskopf rate in SI units:
/// Gamma = omega0^3 dipole^2 / (3 pi epsilon0 hbar c^3).
pub fn wigner_weisskopf_rate(omega0: f64, dipole: f64) -> f64 {
    omega0.powi(3) * dipole * dipole / (3.0 * std::f64::consts::PI * si::EPSILON0 * si::HBAR * si::C.powi(3))
}

/// Dipole matrix element reproducing a given rate at a given frequency
/// (inverse of [`wigner_weisskopf_rate`]).
pub fn dipole_for_rate(omega0: f64, gamma: f64) -> f64 {
    (3.0 * std::f64::consts::PI * si::EPSILON0 * si::HBAR * si::C.powi(3) * gamma / omega0.powi(3))
        .sqrt()
}

/// Decay rate of the |+- e> branch in units of Gamma(omega0):
/// (1/2)[1 + d(eta, beta) + (1 +- delta)^3 (1 - d(eta, beta(1 +- delta)))].
///
/// The real part drives the probability decay and stays >= 0 on the accepted
/// domain; the imaginary part is a line shift. For delta = 0 or beta = 0 the
/// ratio is exactly 1.
pub fn gamma_pm_ratio(eta: f64, beta: f64, delta_small: f64, branch: Branch) -> Complex64 {
    let shifted = 1.0 + branch.sign() * delta_small;
    let d0 = d_complex(eta, beta);
    let d1 = d_complex(eta, beta * shifted);
    ((Complex64::new(1.0, 0.0) + d0) + (-d1 + 1.0) * shifted.powi(3)) * 0.5
}

/// Mean position `<z(t)>` of the tunneling atom, in the same length units
/// as `params.b`. Valid up to corrections of order delta_small.
pub fn z_analytic(t: f64, params: &ModelParams, init: &InitialExternalState) -> f64 {
    let gamma = params.gamma_rate;
    let delta = params.delta_tunnel;
    let gr = params.gamma_ratio;
    let a = a_coeff(params.eta, params.beta);
    let decay = (-gamma * t).exp();
    let cos = (delta * t).cos();
    let sin = (delta * t).sin();
    let lorentz = (gr / 2.0) / (1.0 + gr * gr / 4.0);
    let braces = a * (1.0 - decay) * cos
        + (8.0 / 3.0 - a) * lorentz * ((1.0 + decay) * sin + (gr / 2.0) * (1.0 - decay) * cos);
    params.b * init.product() * (decay * cos + 0.375 * braces)
}

/// Long-time limit of `<z(t)>` for the representative a = 4/3 case:
/// (b/2)[(1/2 + (gamma^2/8)/(1+gamma^2/4)) cos(Delta t) + ((gamma/4)/(1+gamma^2/4)) sin(Delta t)].
pub fn z_longtime(t: f64, params: &ModelParams) -> f64 {
    let gr = params.gamma_ratio;
    let delta = params.delta_tunnel;
    let denom = 1.0 + gr * gr / 4.0;
    let c = 0.5 + gr * gr / 8.0 / denom;
    let s = gr / 4.0 / denom;
    0.5 * params.b * (c * (delta * t).cos() + s * (delta * t).sin())
}

/// Long-time tunneling amplitude and phase for given angular coefficient `a`:
/// A = (1/4) sqrt((9 a^2 + 16 gamma^2)/(4 + gamma^2)).
pub fn envelope_for_a(a: f64, gamma_ratio: f64) -> TunnelingEnvelope {
    let g2 = gamma_ratio * gamma_ratio;
    let amplitude = 0.25 * ((9.0 * a * a + 16.0 * g2) / (4.0 + g2)).sqrt();
    let c_cos = (1.5 * a + g2) / (4.0 + g2);
    let c_sin = gamma_ratio * (2.0 - 0.75 * a) / (4.0 + g2);
    TunnelingEnvelope {
        amplitude,
        phase: (-c_sin).atan2(c_cos),
        a_coeff: a,
    }
}

/// Long-time tunneling amplitude A(eta, beta, gamma) and phase, using the
/// exact a(eta, beta).
pub fn tunneling_amplitude(eta: f64, beta: f64, gamma_ratio: f64) -> TunnelingEnvelope {
    envelope_for_a(a_coeff(eta, beta), gamma_ratio)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const PI: f64 = std::f64::consts::PI;

    /// Independent oracle: Re d = (3/8) int_-1^1 h(eta, mu) cos(mu beta) dmu.
    pub fn re_d_quadrature(eta: f64, beta: f64) -> f64 {
        0.375
            * quadrature::integrate(64, -1.0, 1.0, |mu| {
                angular_h(eta, mu).unwrap() * (mu * beta).cos()
            })
    }

    /// Independent oracle: a = int_-1^1 h(eta, mu) cos^2(mu beta / 2) dmu.
    pub fn a_quadrature(eta: f64, beta: f64) -> f64 {
        quadrature::integrate(64, -1.0, 1.0, |mu| {
            angular_h(eta, mu).unwrap() * (mu * beta / 2.0).cos().powi(2)
        })
    }

    #[test]
    fn angular_factor_basics() {
        assert_abs_diff_eq!(angular_h(0.0, 0.0).unwrap(), 2.0);
        assert_abs_diff_eq!(angular_h(PI / 2.0, 1.0).unwrap(), 2.0);
        assert!(angular_h(0.3, 1.2).is_err());
        for eta in [0.0, 0.3, PI / 4.0, PI / 2.0, 2.9] {
            let integral = quadrature::integrate(64, -1.0, 1.0, |mu| angular_h(eta, mu).unwrap());
            assert_abs_diff_eq!(integral, 8.0 / 3.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn re_d_limits_and_values() {
        for eta in [0.0, 1.0, PI / 2.0] {
            assert_abs_diff_eq!(re_d(eta, 0.0), 1.0, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(re_d(0.0, PI), 3.0 / (PI * PI), epsilon = 1e-14);
        assert_abs_diff_eq!(re_d(0.0, PI), re_d_quadrature(0.0, PI), epsilon = 1e-12);
        // Frozen from the quadrature oracle.
        assert_abs_diff_eq!(re_d(PI / 2.0, 3.0), -0.102278745851244, epsilon = 1e-13);
        assert_abs_diff_eq!(re_d(PI / 2.0, 3.0), re_d_quadrature(PI / 2.0, 3.0), epsilon = 1e-12);
    }

    #[test]
    fn d_complex_limits_and_consistency() {
        for eta in [0.0, 0.7, PI / 2.0] {
            let d = d_complex(eta, 0.0);
            assert_abs_diff_eq!(d.re, 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(d.im, 0.0, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(d_complex(0.0, PI).re, 3.0 / (PI * PI), epsilon = 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let eta = rng.gen_range(0.0..PI);
            let beta = rng.gen_range(0.0..4.0);
            assert_abs_diff_eq!(d_complex(eta, beta).re, re_d(eta, beta), epsilon = 1e-15);
        }
    }

    #[test]
    fn kernels_match_quadrature_across_series_boundary() {
        // The series/direct switch sits at beta = 0.05; sweep through it.
        for &beta in &[1e-6, 1e-3, 0.01, 0.049, 0.05, 0.051, 0.2, 1.0, 2.5, 4.0] {
            for &eta in &[0.0, PI / 4.0, PI / 2.0] {
                assert_abs_diff_eq!(re_d(eta, beta), re_d_quadrature(eta, beta), epsilon = 1e-11);
                assert_abs_diff_eq!(a_coeff(eta, beta), a_quadrature(eta, beta), epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn a_coeff_values() {
        for eta in [0.0, 0.9, PI / 2.0] {
            assert_abs_diff_eq!(a_coeff(eta, 0.0), 8.0 / 3.0, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(a_coeff(0.0, 3.0), 1.794236666349808, epsilon = 1e-13);
        assert_abs_diff_eq!(a_coeff(PI / 2.0, 3.0), 1.196961672198341, epsilon = 1e-13);
    }

    #[test]
    fn a_identity_with_re_d() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let eta = rng.gen_range(0.0..PI);
            let beta = rng.gen_range(0.0..4.0);
            let lhs = a_coeff(eta, beta);
            let rhs = 4.0 / 3.0 + 4.0 / 3.0 * re_d(eta, beta);
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
        }
    }

    #[test]
    fn ww_rate_scaling_and_identity() {
        let dipole = 2.7e-29;
        let g1 = wigner_weisskopf_rate(1.0e15, dipole);
        let g2 = wigner_weisskopf_rate(2.0e15, dipole);
        assert_relative_eq!(g2 / g1, 8.0, epsilon = 1e-12);

        // Gamma/omega0 = (4/3) alpha (omega0 d / c)^2 with d the dipole length.
        let omega0 = 2.21e15;
        let alpha = si::E_CHARGE * si::E_CHARGE
            / (4.0 * PI * si::EPSILON0 * si::HBAR * si::C);
        let d_len = dipole / si::E_CHARGE;
        let lhs = wigner_weisskopf_rate(omega0, dipole) / omega0;
        let rhs = 4.0 / 3.0 * alpha * (omega0 * d_len / si::C).powi(2);
        assert_relative_eq!(lhs, rhs, epsilon = 1e-12);
        assert!((7.29e-3..7.30e-3).contains(&alpha));
    }

    #[test]
    fn ww_rate_round_trips_cesium_d2() {
        let omega0 = 2.0 * PI * si::C / 852.4e-9;
        let gamma = 2.0 * PI * 5.2e6;
        let dipole = dipole_for_rate(omega0, gamma);
        assert_relative_eq!(wigner_weisskopf_rate(omega0, dipole), gamma, epsilon = 1e-12);
        assert!((1e-29..1e-28).contains(&dipole));
    }

    #[test]
    fn gamma_pm_is_one_without_splitting_or_separation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let eta = rng.gen_range(0.0..PI);
            let beta = rng.gen_range(0.0..4.0);
            for branch in [Branch::Plus, Branch::Minus] {
                let r = gamma_pm_ratio(eta, beta, 0.0, branch);
                assert_abs_diff_eq!(r.re, 1.0, epsilon = 1e-15);
                assert_abs_diff_eq!(r.im, 0.0, epsilon = 1e-15);
            }
        }
        for delta in [0.0, 0.05, 0.1, 0.19] {
            for branch in [Branch::Plus, Branch::Minus] {
                let r = gamma_pm_ratio(1.2, 0.0, delta, branch);
                assert_abs_diff_eq!(r.re, 1.0, epsilon = 1e-12);
                assert_abs_diff_eq!(r.im, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn gamma_pm_two_channel_regime_at_large_beta() {
        // For beta >> 1 the overlap factor is small and the rate approaches
        // the two-independent-channel average (1/2)(1 + (1+delta)^3).
        let r = gamma_pm_ratio(0.0, 10.0, 0.1, Branch::Plus);
        let two_channel = 0.5 * (1.0 + 1.1f64.powi(3));
        assert!((r.re - two_channel).abs() < 1.5 * re_d(0.0, 10.0).abs() + 1e-3);
    }

    #[test]
    fn re_gamma_pm_nonnegative_on_domain() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..2000 {
            let eta = rng.gen_range(0.0..PI);
            let beta = rng.gen_range(0.0..4.0);
            let delta = rng.gen_range(0.0..0.2);
            for branch in [Branch::Plus, Branch::Minus] {
                assert!(gamma_pm_ratio(eta, beta, delta, branch).re >= 0.0);
            }
        }
    }

    fn demo_params(gamma_ratio: f64) -> ModelParams {
        ModelParams::from_dimensionless(1.0, 3.0, 0.005, gamma_ratio, 0.0).unwrap()
    }

    #[test]
    fn z_analytic_initial_value_and_eigenstate_null() {
        let p = demo_params(1.0);
        let right = InitialExternalState::right_well();
        assert_abs_diff_eq!(z_analytic(0.0, &p, &right), p.b / 2.0, epsilon = 1e-15);
        let plus = InitialExternalState::plus();
        for t in [0.0, 13.0, 500.0, 5000.0] {
            assert_eq!(z_analytic(t, &p, &plus), 0.0);
        }
    }

    #[test]
    fn z_analytic_weak_damping_limit() {
        let p = demo_params(1e-9);
        let right = InitialExternalState::right_well();
        for t in [0.0, 100.0, 1000.0, 4000.0] {
            let expected = 0.5 * p.b * (p.delta_tunnel * t).cos();
            assert_abs_diff_eq!(z_analytic(t, &p, &right), expected, epsilon = 1e-6 * p.b);
        }
    }

    #[test]
    fn z_longtime_amplitude_and_limits() {
        for gr in [0.1, 0.5, 1.0, 2.0, 10.0] {
            let p = demo_params(gr);
            let denom = 1.0 + gr * gr / 4.0;
            let c = 0.5 + gr * gr / 8.0 / denom;
            let s = gr / 4.0 / denom;
            let amp = (c * c + s * s).sqrt();
            assert_abs_diff_eq!(amp, ((gr * gr + 1.0) / (gr * gr + 4.0)).sqrt(), epsilon = 1e-14);
            // Reconstruct amplitude from samples over one period.
            let period = 2.0 * PI / p.delta_tunnel;
            let max = (0..2000)
                .map(|i| z_longtime(i as f64 * period / 2000.0, &p).abs())
                .fold(0.0f64, f64::max);
            assert_abs_diff_eq!(max / (0.5 * p.b), amp, epsilon = 1e-5);
        }
        let p = demo_params(1e9);
        assert_abs_diff_eq!(z_longtime(0.0, &p) / (0.5 * p.b), 1.0, epsilon = 1e-9);
        let p = demo_params(1e-12);
        assert_abs_diff_eq!(z_longtime(0.0, &p) / (0.5 * p.b), 0.5, epsilon = 1e-9);
    }

    #[test]
    fn envelope_limits() {
        for gr in [0.0, 0.3, 1.0, 7.0, 1e6] {
            let env = tunneling_amplitude(0.7, 0.0, gr);
            assert_abs_diff_eq!(env.amplitude, 1.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(envelope_for_a(4.0 / 3.0, 0.0).amplitude, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(envelope_for_a(4.0 / 3.0, 1e9).amplitude, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn envelope_amplitude_bounded_on_scan_grid() {
        // A grows monotonically with gamma from 3a/8 to 1, so the sharp
        // bounds are [3a/8, 1]; along the eta = 0 slice a >= 4/3 and the
        // envelope never drops below 1/2.
        for i in 0..50 {
            let eta = PI * i as f64 / 49.0;
            for j in 0..50 {
                let beta = 4.0 * j as f64 / 49.0;
                let floor = 0.375 * a_coeff(eta, beta);
                for k in 0..50 {
                    let gamma = 10f64.powf(-3.0 + 6.0 * k as f64 / 49.0);
                    let a = tunneling_amplitude(eta, beta, gamma).amplitude;
                    assert!(
                        (floor - 1e-12..=1.0 + 1e-12).contains(&a),
                        "A out of range at eta={eta} beta={beta} gamma={gamma}: {a}"
                    );
                    if i == 0 {
                        assert!(a >= 0.5 - 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn longtime_trajectory_matches_envelope_fit() {
        // For t >> 1/Gamma the full trajectory settles to A cos(Delta t + phi):
        // a sinusoid fitted on [10/Gamma, 10/Gamma + 20 pi/Delta] leaves an
        // RMS residual below 1e-6 b and reproduces the analytic envelope.
        for gr in [0.5, 1.0, 3.0] {
            let p = demo_params(gr);
            let env = tunneling_amplitude(p.eta, p.beta, gr);
            let right = InitialExternalState::right_well();
            let t0 = 10.0 / p.gamma_rate;
            let t1 = t0 + 20.0 * PI / p.delta_tunnel;
            let n = 8000;
            let ts: Vec<f64> = (0..=n).map(|i| t0 + (t1 - t0) * i as f64 / n as f64).collect();
            let zs: Vec<f64> = ts.iter().map(|&t| z_analytic(t, &p, &right)).collect();
            let fit = crate::fit::fit_sinusoid(&ts, &zs, p.delta_tunnel).unwrap();
            let rms: f64 = (ts
                .iter()
                .zip(&zs)
                .map(|(&t, &z)| {
                    let model =
                        fit.amplitude * (p.delta_tunnel * t + fit.phase).cos();
                    (z - model).powi(2)
                })
                .sum::<f64>()
                / ts.len() as f64)
                .sqrt();
            assert!(rms < 1e-6 * p.b, "residual {rms} at gamma_ratio={gr}");
            assert_abs_diff_eq!(fit.amplitude / (0.5 * p.b), env.amplitude, epsilon = 1e-4);
            assert_abs_diff_eq!(fit.phase, env.phase, epsilon = 1e-4);
        }
    }
}
