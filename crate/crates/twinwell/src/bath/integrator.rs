//! Fixed-step 4th-order integration of the coupled amplitude equations.
//!
//! In the interaction picture the state is two excited-atom amplitudes
//! x = (c-e, c+e) and two photon amplitudes per mode, y_k = (c_k-, c_k+),
//! with
//!
//! ```text
//! dx-/dt = -i sum_k u_k(t) [gc_k y_k- + i gs_k e^{-i Delta t} y_k+]
//! dx+/dt = -i sum_k u_k(t) [gc_k y_k+ + i gs_k e^{+i Delta t} y_k-]
//! dy_k-/dt = -i conj(u_k(t)) [gc_k x- - i gs_k e^{-i Delta t} x+]
//! dy_k+/dt = -i conj(u_k(t)) [gc_k x+ - i gs_k e^{+i Delta t} x-]
//! ```
//!
//! where `u_k(t) = e^{i(omega0-omega_k)t}`, `gc = g cos(kappa)`,
//! `gs = g sin(kappa)`. The system is linear, so one classical RK4 step can
//! be evaluated with a single pass over the modes: the only mode sums the
//! stage algebra needs beyond the three weighted sums of y itself are
//! `sum gc^2`, `sum gs^2`, `sum gc gs` and the same three weighted by the
//! half-step rotation `r_k = e^{i(omega0-omega_k)h/2}` - all constants of
//! the run. Each step then costs one fused sweep that applies the y-update
//! and accumulates the three weighted sums for the next step, with no
//! per-mode trigonometry (the resonance phases advance by multiplication
//! with r_k).
//!
//! Mode blocks are processed in parallel; partial sums are reduced in fixed
//! block order so results do not depend on the thread schedule.

use num_complex::Complex64;
use rayon::prelude::*;

use super::{AmplitudeState, BathGrid, Trajectory, BLOCK};
use crate::error::{Error, Result};
use crate::params::{InitialExternalState, ModelParams};

/// Controls for [`integrate`].
#[derive(Debug, Clone)]
pub struct IntegrationConfig {
    pub t_end: f64,
    /// Step size; default and maximum is `0.05 / omega_max`.
    pub dt: Option<f64>,
    /// Steps between snapshots; default aims at about 2000 snapshots.
    pub snapshot_stride: Option<usize>,
    /// Keep the full photon-sector state at `t_end`.
    pub capture_final_state: bool,
}

impl IntegrationConfig {
    pub fn new(t_end: f64) -> Self {
        IntegrationConfig {
            t_end,
            dt: None,
            snapshot_stride: None,
            capture_final_state: false,
        }
    }
}

/// Exact right-hand side of the amplitude equations at `state.t`.
///
/// Reference implementation used by tests and kept deliberately direct; the
/// production stepper reproduces it to round-off (see the module tests).
/// The returned structure holds d(state)/dt, with `t` set to 1.
pub fn step_rhs(state: &AmplitudeState, grid: &BathGrid, params: &ModelParams) -> AmplitudeState {
    assert_eq!(state.photon_minus.len(), grid.len(), "state arrays sized to grid");
    assert_eq!(state.photon_plus.len(), grid.len());
    let em = Complex64::from_polar(1.0, -params.delta_tunnel * state.t);
    let ep = em.conj();
    let i_ = Complex64::i();
    let xm = state.c_minus_e;
    let xp = state.c_plus_e;

    let mut d_xm = Complex64::default();
    let mut d_xp = Complex64::default();
    let mut d_ym = vec![Complex64::default(); grid.len()];
    let mut d_yp = vec![Complex64::default(); grid.len()];
    for k in 0..grid.len() {
        let u = Complex64::from_polar(1.0, (params.omega0 - grid.omega[k]) * state.t);
        let gc = grid.gc[k];
        let gs = grid.gs[k];
        let ym = state.photon_minus[k];
        let yp = state.photon_plus[k];
        d_xm += -i_ * u * (ym * gc + i_ * em * yp * gs);
        d_xp += -i_ * u * (yp * gc + i_ * ep * ym * gs);
        d_ym[k] = -i_ * u.conj() * (xm * gc - i_ * em * xp * gs);
        d_yp[k] = -i_ * u.conj() * (xp * gc - i_ * ep * xm * gs);
    }
    AmplitudeState {
        c_plus_e: d_xp,
        c_minus_e: d_xm,
        photon_minus: d_ym,
        photon_plus: d_yp,
        t: 1.0,
    }
}

#[derive(Clone, Copy, Default)]
struct StageSums {
    /// sum u gc y-
    a: Complex64,
    /// sum u gs y+
    b: Complex64,
    /// sum u gc y+
    c: Complex64,
    /// sum u gs y-
    d: Complex64,
}

#[derive(Clone, Copy, Default)]
struct Sums {
    s0: StageSums,
    sh: StageSums,
    s1: StageSums,
}

fn fold_sums(parts: &[[f64; 24]]) -> Sums {
    let mut acc = [0.0f64; 24];
    for p in parts {
        for (a, v) in acc.iter_mut().zip(p) {
            *a += v;
        }
    }
    let g = |o: usize| StageSums {
        a: Complex64::new(acc[o], acc[o + 1]),
        b: Complex64::new(acc[o + 2], acc[o + 3]),
        c: Complex64::new(acc[o + 4], acc[o + 5]),
        d: Complex64::new(acc[o + 6], acc[o + 7]),
    };
    Sums { s0: g(0), sh: g(8), s1: g(16) }
}

/// Broadcast coefficients of one RK4 step: y- gains
/// conj(u) (gc G0 + gs H0) + conj(uh)(gc Gh + gs Hh) + conj(u1)(gc G1 + gs H1),
/// and likewise y+ with the `p` set.
struct StepConsts {
    m: [Complex64; 6],
    p: [Complex64; 6],
}

struct Block {
    gc: Vec<f64>,
    gs: Vec<f64>,
    rr: Vec<f64>,
    ri: Vec<f64>,
    ym_re: Vec<f64>,
    ym_im: Vec<f64>,
    yp_re: Vec<f64>,
    yp_im: Vec<f64>,
    u_re: Vec<f64>,
    u_im: Vec<f64>,
}

impl Block {
    fn new(grid: &BathGrid, range: std::ops::Range<usize>, half_dt: f64, omega0: f64) -> Self {
        let n = range.len();
        let mut b = Block {
            gc: grid.gc[range.clone()].to_vec(),
            gs: grid.gs[range.clone()].to_vec(),
            rr: Vec::with_capacity(n),
            ri: Vec::with_capacity(n),
            ym_re: vec![0.0; n],
            ym_im: vec![0.0; n],
            yp_re: vec![0.0; n],
            yp_im: vec![0.0; n],
            u_re: vec![1.0; n],
            u_im: vec![0.0; n],
        };
        for k in range {
            let phase = (omega0 - grid.omega[k]) * half_dt;
            b.rr.push(phase.cos());
            b.ri.push(phase.sin());
        }
        b
    }

    /// Weighted sums of the current y at u, u r, u r^2 (bootstrap pass).
    fn stage_sums(&self) -> [f64; 24] {
        let n = self.gc.len();
        let mut acc = [0.0f64; 24];
        for i in 0..n {
            let (ur, ui) = (self.u_re[i], self.u_im[i]);
            let (rr, ri) = (self.rr[i], self.ri[i]);
            let uhr = ur * rr - ui * ri;
            let uhi = ur * ri + ui * rr;
            let u1r = uhr * rr - uhi * ri;
            let u1i = uhr * ri + uhi * rr;
            let (ymr, ymi) = (self.ym_re[i], self.ym_im[i]);
            let (ypr, ypi) = (self.yp_re[i], self.yp_im[i]);
            let (gc, gs) = (self.gc[i], self.gs[i]);
            accumulate(&mut acc, 0, ur, ui, gc, gs, ymr, ymi, ypr, ypi);
            accumulate(&mut acc, 8, uhr, uhi, gc, gs, ymr, ymi, ypr, ypi);
            accumulate(&mut acc, 16, u1r, u1i, gc, gs, ymr, ymi, ypr, ypi);
        }
        acc
    }

    /// Apply the y-update of the current step and return the weighted sums
    /// for the next step (whose stage points are u r^2, u r^3, u r^4).
    fn fused_step(&mut self, c: &StepConsts) -> [f64; 24] {
        let n = self.gc.len();
        let mut acc = [0.0f64; 24];
        let (gm0, gmh, gm1) = (c.m[0], c.m[2], c.m[4]);
        let (hm0, hmh, hm1) = (c.m[1], c.m[3], c.m[5]);
        let (gp0, gph, gp1) = (c.p[0], c.p[2], c.p[4]);
        let (hp0, hph, hp1) = (c.p[1], c.p[3], c.p[5]);
        for i in 0..n {
            let (ur, ui) = (self.u_re[i], self.u_im[i]);
            let (rr, ri) = (self.rr[i], self.ri[i]);
            let uhr = ur * rr - ui * ri;
            let uhi = ur * ri + ui * rr;
            let u1r = uhr * rr - uhi * ri;
            let u1i = uhr * ri + uhi * rr;
            let (gc, gs) = (self.gc[i], self.gs[i]);

            // y- update: three conj(u)-weighted broadcast terms.
            let t0r = gc * gm0.re + gs * hm0.re;
            let t0i = gc * gm0.im + gs * hm0.im;
            let thr = gc * gmh.re + gs * hmh.re;
            let thi = gc * gmh.im + gs * hmh.im;
            let t1r = gc * gm1.re + gs * hm1.re;
            let t1i = gc * gm1.im + gs * hm1.im;
            let mut ymr = self.ym_re[i];
            let mut ymi = self.ym_im[i];
            ymr += ur * t0r + ui * t0i + uhr * thr + uhi * thi + u1r * t1r + u1i * t1i;
            ymi += ur * t0i - ui * t0r + uhr * thi - uhi * thr + u1r * t1i - u1i * t1r;
            self.ym_re[i] = ymr;
            self.ym_im[i] = ymi;

            let s0r = gc * gp0.re + gs * hp0.re;
            let s0i = gc * gp0.im + gs * hp0.im;
            let shr = gc * gph.re + gs * hph.re;
            let shi = gc * gph.im + gs * hph.im;
            let s1r = gc * gp1.re + gs * hp1.re;
            let s1i = gc * gp1.im + gs * hp1.im;
            let mut ypr = self.yp_re[i];
            let mut ypi = self.yp_im[i];
            ypr += ur * s0r + ui * s0i + uhr * shr + uhi * shi + u1r * s1r + u1i * s1i;
            ypi += ur * s0i - ui * s0r + uhr * shi - uhi * shr + u1r * s1i - u1i * s1r;
            self.yp_re[i] = ypr;
            self.yp_im[i] = ypi;

            // Next step's stage points.
            let nhr = u1r * rr - u1i * ri;
            let nhi = u1r * ri + u1i * rr;
            let n1r = nhr * rr - nhi * ri;
            let n1i = nhr * ri + nhi * rr;
            self.u_re[i] = u1r;
            self.u_im[i] = u1i;

            accumulate(&mut acc, 0, u1r, u1i, gc, gs, ymr, ymi, ypr, ypi);
            accumulate(&mut acc, 8, nhr, nhi, gc, gs, ymr, ymi, ypr, ypi);
            accumulate(&mut acc, 16, n1r, n1i, gc, gs, ymr, ymi, ypr, ypi);
        }
        acc
    }

    /// (Re K, Im K, photon norm) over this block.
    fn k_and_norm(&self) -> (f64, f64, f64) {
        let n = self.gc.len();
        let (mut kr, mut ki, mut nn) = (0.0, 0.0, 0.0);
        for i in 0..n {
            let (ymr, ymi) = (self.ym_re[i], self.ym_im[i]);
            let (ypr, ypi) = (self.yp_re[i], self.yp_im[i]);
            kr += ymr * ypr + ymi * ypi;
            ki += ymr * ypi - ymi * ypr;
            nn += ymr * ymr + ymi * ymi + ypr * ypr + ypi * ypi;
        }
        (kr, ki, nn)
    }
}

#[allow(clippy::too_many_arguments)]
#[inline(always)]
fn accumulate(
    acc: &mut [f64; 24],
    o: usize,
    ur: f64,
    ui: f64,
    gc: f64,
    gs: f64,
    ymr: f64,
    ymi: f64,
    ypr: f64,
    ypi: f64,
) {
    let amr = gc * ymr;
    let ami = gc * ymi;
    let bpr = gs * ypr;
    let bpi = gs * ypi;
    let cpr = gc * ypr;
    let cpi = gc * ypi;
    let dmr = gs * ymr;
    let dmi = gs * ymi;
    acc[o] += ur * amr - ui * ami;
    acc[o + 1] += ur * ami + ui * amr;
    acc[o + 2] += ur * bpr - ui * bpi;
    acc[o + 3] += ur * bpi + ui * bpr;
    acc[o + 4] += ur * cpr - ui * cpi;
    acc[o + 5] += ur * cpi + ui * cpr;
    acc[o + 6] += ur * dmr - ui * dmi;
    acc[o + 7] += ur * dmi + ui * dmr;
}

/// Integrate the amplitude equations from the photon vacuum.
///
/// Fails if the step cannot resolve the fastest interaction-picture phase
/// (`dt > 0.05/omega_max`) or if the window exceeds the grid recurrence time
/// (`t_end > 2 pi / d_omega`). Norm is conserved to integrator accuracy;
/// no renormalization is applied.
pub fn integrate(
    grid: &BathGrid,
    params: &ModelParams,
    init: &InitialExternalState,
    cfg: &IntegrationConfig,
) -> Result<Trajectory> {
    let dt_max = 0.05 / grid.omega_max;
    let dt = cfg.dt.unwrap_or(dt_max);
    if dt > dt_max * (1.0 + 1e-12) {
        return Err(Error::validation(format!(
            "dt = {dt:.3e} too coarse for the fastest phase (need <= 0.05/omega_max = {dt_max:.3e})"
        )));
    }
    if cfg.t_end <= 0.0 {
        return Err(Error::validation("t_end must be positive"));
    }
    let recurrence = 2.0 * std::f64::consts::PI / grid.d_omega;
    if cfg.t_end > recurrence {
        return Err(Error::validation(format!(
            "t_end = {} exceeds the grid recurrence time 2 pi / d_omega = {recurrence:.1}",
            cfg.t_end
        )));
    }
    let n_steps = (cfg.t_end / dt).ceil() as usize;
    let h = cfg.t_end / n_steps as f64;
    let stride = cfg.snapshot_stride.unwrap_or((n_steps / 2048).max(1));

    let mut blocks: Vec<Block> = (0..grid.len())
        .step_by(BLOCK)
        .map(|start| Block::new(grid, start..(start + BLOCK).min(grid.len()), 0.5 * h, params.omega0))
        .collect();

    let mut xm = Complex64::new(init.c_minus, 0.0);
    let mut xp = Complex64::new(init.c_plus, 0.0);

    // Constants of the run: plain and half-step-rotated coupling moments.
    let (mut p0, mut q0, mut r0) = (0.0, 0.0, 0.0);
    let mut pr = Complex64::default();
    let mut qr = Complex64::default();
    let mut rr_ = Complex64::default();
    for b in &blocks {
        for i in 0..b.gc.len() {
            let (gc, gs) = (b.gc[i], b.gs[i]);
            let r = Complex64::new(b.rr[i], b.ri[i]);
            p0 += gc * gc;
            q0 += gs * gs;
            r0 += gc * gs;
            pr += r * (gc * gc);
            qr += r * (gs * gs);
            rr_ += r * (gc * gs);
        }
    }

    let mut traj = Trajectory {
        t: Vec::new(),
        c_plus: Vec::new(),
        c_minus: Vec::new(),
        norm: Vec::new(),
        k_corr: Vec::new(),
        final_state: None,
    };
    let snapshot = |blocks: &[Block], xm: Complex64, xp: Complex64, t: f64, traj: &mut Trajectory| {
        let parts: Vec<(f64, f64, f64)> = blocks.par_iter().map(Block::k_and_norm).collect();
        let (mut kr, mut ki, mut nn) = (0.0, 0.0, 0.0);
        for (a, b, c) in parts {
            kr += a;
            ki += b;
            nn += c;
        }
        traj.t.push(t);
        traj.c_plus.push(xp);
        traj.c_minus.push(xm);
        traj.k_corr.push(Complex64::new(kr, ki));
        traj.norm.push(nn + xm.norm_sqr() + xp.norm_sqr());
    };
    snapshot(&blocks, xm, xp, 0.0, &mut traj);

    let sum_parts: Vec<[f64; 24]> = blocks.par_iter().map(Block::stage_sums).collect();
    let mut sums = fold_sums(&sum_parts);

    let i_ = Complex64::i();
    let delta = params.delta_tunnel;
    for step in 0..n_steps {
        let t = step as f64 * h;
        let em0 = Complex64::from_polar(1.0, -delta * t);
        let emh = Complex64::from_polar(1.0, -delta * (t + 0.5 * h));
        let em1 = Complex64::from_polar(1.0, -delta * (t + h));

        let k1m = -i_ * sums.s0.a + em0 * sums.s0.b;
        let k1p = -i_ * sums.s0.c + em0.conj() * sums.s0.d;
        let x2m = xm + 0.5 * h * k1m;
        let x2p = xp + 0.5 * h * k1p;

        let a2 = sums.sh.a + 0.5 * h * (-i_ * xm * pr - em0 * xp * rr_);
        let b2 = sums.sh.b + 0.5 * h * (-i_ * xp * rr_ - em0.conj() * xm * qr);
        let c2 = sums.sh.c + 0.5 * h * (-i_ * xp * pr - em0.conj() * xm * rr_);
        let d2 = sums.sh.d + 0.5 * h * (-i_ * xm * rr_ - em0 * xp * qr);
        let k2m = -i_ * a2 + emh * b2;
        let k2p = -i_ * c2 + emh.conj() * d2;
        let x3m = xm + 0.5 * h * k2m;
        let x3p = xp + 0.5 * h * k2p;

        let a3 = sums.sh.a + 0.5 * h * (-i_ * x2m * p0 - emh * x2p * r0);
        let b3 = sums.sh.b + 0.5 * h * (-i_ * x2p * r0 - emh.conj() * x2m * q0);
        let c3 = sums.sh.c + 0.5 * h * (-i_ * x2p * p0 - emh.conj() * x2m * r0);
        let d3 = sums.sh.d + 0.5 * h * (-i_ * x2m * r0 - emh * x2p * q0);
        let k3m = -i_ * a3 + emh * b3;
        let k3p = -i_ * c3 + emh.conj() * d3;
        let x4m = xm + h * k3m;
        let x4p = xp + h * k3p;

        let a4 = sums.s1.a + h * (-i_ * x3m * pr - emh * x3p * rr_);
        let b4 = sums.s1.b + h * (-i_ * x3p * rr_ - emh.conj() * x3m * qr);
        let c4 = sums.s1.c + h * (-i_ * x3p * pr - emh.conj() * x3m * rr_);
        let d4 = sums.s1.d + h * (-i_ * x3m * rr_ - emh * x3p * qr);
        let k4m = -i_ * a4 + em1 * b4;
        let k4p = -i_ * c4 + em1.conj() * d4;

        let f = h / 6.0;
        let consts = StepConsts {
            m: [
                -i_ * f * xm,
                -f * em0 * xp,
                -i_ * f * 2.0 * (x2m + x3m),
                -f * emh * 2.0 * (x2p + x3p),
                -i_ * f * x4m,
                -f * em1 * x4p,
            ],
            p: [
                -i_ * f * xp,
                -f * em0.conj() * xm,
                -i_ * f * 2.0 * (x2p + x3p),
                -f * emh.conj() * 2.0 * (x2m + x3m),
                -i_ * f * x4p,
                -f * em1.conj() * x4m,
            ],
        };

        xm += f * (k1m + 2.0 * (k2m + k3m) + k4m);
        xp += f * (k1p + 2.0 * (k2p + k3p) + k4p);

        let parts: Vec<[f64; 24]> = blocks.par_iter_mut().map(|b| b.fused_step(&consts)).collect();
        sums = fold_sums(&parts);

        if (step + 1) % stride == 0 || step + 1 == n_steps {
            snapshot(&blocks, xm, xp, (step + 1) as f64 * h, &mut traj);
        }
    }

    if cfg.capture_final_state {
        let mut state = AmplitudeState {
            c_plus_e: xp,
            c_minus_e: xm,
            photon_minus: Vec::with_capacity(grid.len()),
            photon_plus: Vec::with_capacity(grid.len()),
            t: cfg.t_end,
        };
        for b in &blocks {
            for i in 0..b.gc.len() {
                state.photon_minus.push(Complex64::new(b.ym_re[i], b.ym_im[i]));
                state.photon_plus.push(Complex64::new(b.yp_re[i], b.yp_im[i]));
            }
        }
        traj.final_state = Some(state);
    }
    Ok(traj)
}
