//! Brute-force reference dynamics on a discretized electromagnetic continuum.
//!
//! The 3-D mode continuum is reduced to an (omega, mu = cos theta) grid.
//! Modes sharing (omega, mu) couple to the atom only through the three
//! combinations sum g^2 cos^2(kappa), sum g^2 sin^2(kappa) and
//! sum g^2 sin(kappa) cos(kappa), so lumping the azimuth and polarization
//! degrees of freedom into one effective mode of squared coupling
//!
//! `weight = C omega^3 h(eta, mu) d_omega w_mu`
//!
//! is exact for the amplitude-sector observables computed here (survival
//! probabilities, the photon coherence K(t), <z(t)> and the norm). The
//! calibration constant C is fixed so the golden-rule rate at omega0 equals
//! the requested spontaneous rate:
//! `C = 3 Gamma / (16 pi omega0^3)`.
//!
//! The four coupled amplitude equations are integrated without any
//! Markov/Wigner-Weisskopf approximation by [`integrate`]; see
//! [`integrator`] for the step scheme.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::closed_form::angular_h;
use crate::error::{Error, Result};
use crate::params::{InitialExternalState, ModelParams};
use crate::quadrature::gauss_legendre;

mod integrator;

pub use integrator::{integrate, step_rhs, IntegrationConfig};

/// Modes per parallel work block.
pub(crate) const BLOCK: usize = 8192;

/// One effective (omega, mu) mode of the discretized bath.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathMode {
    /// Mode frequency (scaled units).
    pub omega: f64,
    /// cos(theta) of the propagation direction.
    pub mu: f64,
    /// Aggregated squared coupling of all modes sharing (omega, mu).
    pub weight: f64,
    /// Recoil phase kappa = k_z b / 2 = omega mu beta / (2 omega0).
    pub kappa: f64,
}

/// Discretized (omega, mu) mode continuum with aggregated couplings.
///
/// Frequencies are uniform, `omega_j = j d_omega` for j = 1..=n_omega; the
/// mu axis carries Gauss-Legendre nodes (exact for the quadratic angular
/// factor h). Storage is struct-of-arrays: the integrator consumes
/// `g cos(kappa)` and `g sin(kappa)` directly.
#[derive(Debug, Clone)]
pub struct BathGrid {
    pub omega_max: f64,
    pub n_omega: usize,
    pub n_mu: usize,
    pub d_omega: f64,
    /// Calibration constant C of the coupling density.
    pub coupling_norm: f64,
    pub(crate) omega: Vec<f64>,
    pub(crate) mu: Vec<f64>,
    pub(crate) kappa: Vec<f64>,
    pub(crate) weight: Vec<f64>,
    /// sqrt(weight) cos(kappa)
    pub(crate) gc: Vec<f64>,
    /// sqrt(weight) sin(kappa)
    pub(crate) gs: Vec<f64>,
}

impl BathGrid {
    pub fn len(&self) -> usize {
        self.gc.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gc.is_empty()
    }

    /// View of mode `i`.
    pub fn mode(&self, i: usize) -> BathMode {
        BathMode {
            omega: self.omega[i],
            mu: self.mu[i],
            weight: self.weight[i],
            kappa: self.kappa[i],
        }
    }

    /// Discrete golden-rule estimate 2 pi * (coupling density at omega0),
    /// which the calibration makes equal to the requested rate.
    pub fn golden_rule_rate(&self, params: &ModelParams) -> f64 {
        let (mu, w_mu) = gauss_legendre(self.n_mu);
        let density: f64 = mu
            .iter()
            .zip(&w_mu)
            .map(|(&m, &w)| {
                self.coupling_norm * params.omega0.powi(3) * angular_h(params.eta, m).unwrap() * w
            })
            .sum();
        2.0 * std::f64::consts::PI * density
    }

    /// Copy of the grid with all recoil phases forced to zero; the photon
    /// then carries no which-path information and the external degree of
    /// freedom decouples.
    pub fn with_kappa_zeroed(&self) -> Self {
        let mut g = self.clone();
        for i in 0..g.len() {
            g.kappa[i] = 0.0;
            g.gc[i] = g.weight[i].sqrt();
            g.gs[i] = 0.0;
        }
        g
    }
}

/// Build a calibrated bath grid.
///
/// Gates: `n_omega >= 500`, `n_mu >= 16`, `omega_max >= 3 omega0`, and the
/// frequency spacing must resolve the emission line, `d_omega <= Gamma/10`.
pub fn build_grid(
    params: &ModelParams,
    omega_max: f64,
    n_omega: usize,
    n_mu: usize,
) -> Result<BathGrid> {
    if n_omega < 500 {
        return Err(Error::validation(format!(
            "n_omega = {n_omega} too small (need >= 500)"
        )));
    }
    if n_mu < 16 {
        return Err(Error::validation(format!("n_mu = {n_mu} too small (need >= 16)")));
    }
    if omega_max < 3.0 * params.omega0 {
        return Err(Error::validation(format!(
            "omega_max = {omega_max} must be >= 3 omega0 to cover the resonance tails"
        )));
    }
    let d_omega = omega_max / n_omega as f64;
    if d_omega > params.gamma_rate / 10.0 {
        return Err(Error::validation(format!(
            "d_omega = {d_omega:.3e} cannot resolve the line (need <= Gamma/10 = {:.3e})",
            params.gamma_rate / 10.0
        )));
    }

    let coupling_norm = 3.0 * params.gamma_rate
        / (16.0 * std::f64::consts::PI * params.omega0.powi(3));
    let (mu_nodes, mu_weights) = gauss_legendre(n_mu);

    let n = n_omega * n_mu;
    let mut grid = BathGrid {
        omega_max,
        n_omega,
        n_mu,
        d_omega,
        coupling_norm,
        omega: Vec::with_capacity(n),
        mu: Vec::with_capacity(n),
        kappa: Vec::with_capacity(n),
        weight: Vec::with_capacity(n),
        gc: Vec::with_capacity(n),
        gs: Vec::with_capacity(n),
    };
    for j in 1..=n_omega {
        let omega = j as f64 * d_omega;
        let w_omega = coupling_norm * omega.powi(3) * d_omega;
        for (&m, &wm) in mu_nodes.iter().zip(&mu_weights) {
            let weight = w_omega * angular_h(params.eta, m)? * wm;
            let kappa = omega * m * params.beta / (2.0 * params.omega0);
            let g = weight.sqrt();
            grid.omega.push(omega);
            grid.mu.push(m);
            grid.kappa.push(kappa);
            grid.weight.push(weight);
            grid.gc.push(g * kappa.cos());
            grid.gs.push(g * kappa.sin());
        }
    }

    let rate = grid.golden_rule_rate(params);
    if (rate / params.gamma_rate - 1.0).abs() > 1e-3 {
        return Err(Error::validation(format!(
            "golden-rule calibration off: {rate} vs {}",
            params.gamma_rate
        )));
    }
    Ok(grid)
}

/// Full state of the joint atom-field amplitude vector at time `t`.
#[derive(Debug, Clone)]
pub struct AmplitudeState {
    /// Amplitude on |0, +, e>.
    pub c_plus_e: Complex64,
    /// Amplitude on |0, -, e>.
    pub c_minus_e: Complex64,
    /// Per-mode amplitudes on |1_k, -, g>.
    pub photon_minus: Vec<Complex64>,
    /// Per-mode amplitudes on |1_k, +, g>.
    pub photon_plus: Vec<Complex64>,
    pub t: f64,
}

impl AmplitudeState {
    pub fn initial(grid: &BathGrid, init: &InitialExternalState) -> Self {
        AmplitudeState {
            c_plus_e: Complex64::new(init.c_plus, 0.0),
            c_minus_e: Complex64::new(init.c_minus, 0.0),
            photon_minus: vec![Complex64::default(); grid.len()],
            photon_plus: vec![Complex64::default(); grid.len()],
            t: 0.0,
        }
    }

    /// Total norm |c+e|^2 + |c-e|^2 + sum_k (|c_k-|^2 + |c_k+|^2).
    pub fn norm(&self) -> f64 {
        self.c_plus_e.norm_sqr()
            + self.c_minus_e.norm_sqr()
            + self
                .photon_minus
                .iter()
                .zip(&self.photon_plus)
                .map(|(a, b)| a.norm_sqr() + b.norm_sqr())
                .sum::<f64>()
    }
}

/// Time series of the observables the rest of the crate consumes. Snapshots
/// are taken every `snapshot_stride` integrator steps; the full photon-sector
/// state is kept only for the final time when requested.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub c_plus: Vec<Complex64>,
    pub c_minus: Vec<Complex64>,
    pub norm: Vec<f64>,
    /// K(t) = sum_k conj(c_k-)(t) c_k+(t).
    pub k_corr: Vec<Complex64>,
    pub final_state: Option<AmplitudeState>,
}

/// Survival probabilities (|c+e|^2, |c-e|^2) along a trajectory.
pub fn survival(traj: &Trajectory) -> (Vec<f64>, Vec<f64>) {
    (
        traj.c_plus.iter().map(|c| c.norm_sqr()).collect(),
        traj.c_minus.iter().map(|c| c.norm_sqr()).collect(),
    )
}

/// Photon-sector coherence K(t) along a trajectory.
pub fn k_correlator(traj: &Trajectory) -> &[Complex64] {
    &traj.k_corr
}

/// Mean position in units of b/2:
/// `<z>/(b/2) = 2 Re[(c+e conj(c-e) + K) e^{-i Delta t}]`.
pub fn z_over_b2(traj: &Trajectory, params: &ModelParams) -> Vec<f64> {
    traj.t
        .iter()
        .zip(traj.c_plus.iter().zip(&traj.c_minus))
        .zip(&traj.k_corr)
        .map(|((&t, (cp, cm)), k)| {
            let rho = cp * cm.conj() + k;
            let phase = Complex64::from_polar(1.0, -params.delta_tunnel * t);
            2.0 * (rho * phase).re
        })
        .collect()
}

/// Mean position <z(t)> in the length units of `params.b`.
pub fn z_numeric(traj: &Trajectory, params: &ModelParams) -> Vec<f64> {
    z_over_b2(traj, params)
        .into_iter()
        .map(|z| z * params.b / 2.0)
        .collect()
}

/// Finite-time closed form of the photon amplitudes for mode `i`, obtained by
/// integrating the mode equations with exponentially decaying excited-state
/// amplitudes at the common rate `Gamma`:
/// returns (c_k-(t), c_k+(t)).
pub fn photon_amp_closedform(
    grid: &BathGrid,
    i: usize,
    t: f64,
    params: &ModelParams,
    init: &InitialExternalState,
) -> (Complex64, Complex64) {
    let nu = grid.omega[i] - params.omega0;
    let delta = params.delta_tunnel;
    let half_gamma = params.gamma_rate / 2.0;
    let g = grid.weight[i].sqrt();
    let ck = grid.kappa[i].cos();
    let sk = grid.kappa[i].sin();
    let lorentz = |x: f64| -> Complex64 {
        let num = Complex64::new(1.0, 0.0)
            - (Complex64::new(-half_gamma, x) * t).exp();
        num / Complex64::new(x, half_gamma)
    };
    let minus = (lorentz(nu) * (init.c_minus * ck)
        - Complex64::i() * lorentz(nu - delta) * (init.c_plus * sk))
        * g;
    let plus = (lorentz(nu) * (init.c_plus * ck)
        - Complex64::i() * lorentz(nu + delta) * (init.c_minus * sk))
        * g;
    (minus, plus)
}

/// K(t) computed from the per-mode closed forms (used as a cross-check of
/// the integrator at matched times).
pub fn k_closedform(grid: &BathGrid, t: f64, params: &ModelParams, init: &InitialExternalState) -> Complex64 {
    (0..grid.len())
        .into_par_iter()
        .with_min_len(BLOCK)
        .map(|i| {
            let (m, p) = photon_amp_closedform(grid, i, t, params, init);
            m.conj() * p
        })
        .reduce(Complex64::default, |a, b| a + b)
}
