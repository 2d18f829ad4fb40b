//! Least-squares extraction of decay rates and tunneling envelopes from
//! sampled trajectories.

use crate::error::{Error, Result};

/// Result of an exponential fit y = amplitude * exp(-rate * t).
#[derive(Debug, Clone, Copy)]
pub struct ExponentialFit {
    pub rate: f64,
    pub amplitude: f64,
    /// RMS residual relative to the largest sample.
    pub residual: f64,
}

/// Result of fitting z(t) = (c1 cos + c2 sin) e^{-Gamma t} + c3 cos + c4 sin
/// with cos/sin at the known tunnel frequency. The non-decaying pair gives
/// the persistent envelope.
#[derive(Debug, Clone, Copy)]
pub struct TunnelingFit {
    pub amplitude: f64,
    pub phase: f64,
    pub coeffs: [f64; 4],
    pub residual: f64,
}

/// Fit `ys = A exp(-rate t)`: log-linear least squares followed by one
/// Gauss-Newton refinement in the original variables.
pub fn fit_exponential(ts: &[f64], ys: &[f64]) -> Result<ExponentialFit> {
    if ts.len() != ys.len() || ts.len() < 3 {
        return Err(Error::validation("exponential fit needs >= 3 samples"));
    }
    if ys.iter().any(|&y| y <= 0.0) {
        return Err(Error::validation("exponential fit needs positive samples"));
    }
    let n = ts.len() as f64;
    let (mut st, mut sl, mut stt, mut stl) = (0.0, 0.0, 0.0, 0.0);
    for (&t, &y) in ts.iter().zip(ys) {
        let l = y.ln();
        st += t;
        sl += l;
        stt += t * t;
        stl += t * l;
    }
    let det = n * stt - st * st;
    if det.abs() < f64::EPSILON * n * stt.max(1.0) {
        return Err(Error::validation("degenerate time grid"));
    }
    let slope = (n * stl - st * sl) / det;
    let intercept = (sl - slope * st) / n;
    let mut rate = -slope;
    let mut amp = intercept.exp();

    // One Gauss-Newton step on (amp, rate) to undo the log-space weighting.
    for _ in 0..4 {
        let (mut j11, mut j12, mut j22, mut r1, mut r2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (&t, &y) in ts.iter().zip(ys) {
            let e = (-rate * t).exp();
            let f = amp * e - y;
            let da = e;
            let dr = -amp * t * e;
            j11 += da * da;
            j12 += da * dr;
            j22 += dr * dr;
            r1 += da * f;
            r2 += dr * f;
        }
        let det = j11 * j22 - j12 * j12;
        if det.abs() < 1e-300 {
            break;
        }
        amp -= (j22 * r1 - j12 * r2) / det;
        rate -= (j11 * r2 - j12 * r1) / det;
    }
    if !rate.is_finite() || !amp.is_finite() {
        return Err(Error::FitDiverged { residual: f64::NAN });
    }

    let scale = ys.iter().fold(0.0f64, |m, &y| m.max(y.abs()));
    let ss: f64 = ts
        .iter()
        .zip(ys)
        .map(|(&t, &y)| (amp * (-rate * t).exp() - y).powi(2))
        .sum();
    Ok(ExponentialFit {
        rate,
        amplitude: amp,
        residual: (ss / ts.len() as f64).sqrt() / scale,
    })
}

/// Fit a pure sinusoid `A cos(delta t + phi)` at known frequency.
pub fn fit_sinusoid(ts: &[f64], ys: &[f64], delta: f64) -> Result<TunnelingFit> {
    fit_damped_tunneling(ts, ys, 0.0, delta)
}

/// Fit the damped-plus-persistent tunneling model at known (gamma, delta):
/// z = c1 e^{-g t} cos + c2 e^{-g t} sin + c3 cos + c4 sin.
///
/// With gamma == 0 the damped and persistent basis vectors coincide, so the
/// model degrades gracefully to the 2-basis sinusoid fit.
pub fn fit_damped_tunneling(ts: &[f64], ys: &[f64], gamma: f64, delta: f64) -> Result<TunnelingFit> {
    if ts.len() != ys.len() || ts.len() < 8 {
        return Err(Error::validation("tunneling fit needs >= 8 samples"));
    }
    let span = ts[ts.len() - 1] - ts[0];
    if span * delta < 2.0 * std::f64::consts::PI {
        return Err(Error::validation(
            "tunneling fit window must cover at least one tunnel period",
        ));
    }
    let use_damped = gamma > 0.0;
    let nb = if use_damped { 4 } else { 2 };
    let mut ata = [[0.0f64; 4]; 4];
    let mut atb = [0.0f64; 4];
    let mut basis = [0.0f64; 4];
    for (&t, &y) in ts.iter().zip(ys) {
        let c = (delta * t).cos();
        let s = (delta * t).sin();
        if use_damped {
            let e = (-gamma * t).exp();
            basis = [e * c, e * s, c, s];
        } else {
            basis = [c, s, 0.0, 0.0];
        }
        for i in 0..nb {
            for j in i..nb {
                ata[i][j] += basis[i] * basis[j];
            }
            atb[i] += basis[i] * y;
        }
    }
    for i in 0..nb {
        for j in 0..i {
            ata[i][j] = ata[j][i];
        }
    }
    let sol = solve_small(&mut ata, &mut atb, nb)?;
    let (c3, c4) = if use_damped { (sol[2], sol[3]) } else { (sol[0], sol[1]) };
    let amplitude = c3.hypot(c4);
    let phase = (-c4).atan2(c3);

    let scale = ys.iter().fold(1e-300f64, |m, &y| m.max(y.abs()));
    let mut ss = 0.0;
    for (&t, &y) in ts.iter().zip(ys) {
        let c = (delta * t).cos();
        let s = (delta * t).sin();
        let model = if use_damped {
            let e = (-gamma * t).exp();
            sol[0] * e * c + sol[1] * e * s + sol[2] * c + sol[3] * s
        } else {
            sol[0] * c + sol[1] * s
        };
        ss += (model - y).powi(2);
    }
    let mut coeffs = [0.0; 4];
    coeffs[..nb].copy_from_slice(&sol[..nb]);
    Ok(TunnelingFit {
        amplitude,
        phase,
        coeffs,
        residual: (ss / ts.len() as f64).sqrt() / scale,
    })
}

/// Gaussian elimination with partial pivoting for n <= 4.
fn solve_small(a: &mut [[f64; 4]; 4], b: &mut [f64; 4], n: usize) -> Result<[f64; 4]> {
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot][col].abs() < 1e-300 {
            return Err(Error::FitDiverged { residual: f64::NAN });
        }
        if pivot != col {
            a.swap(pivot, col);
            b.swap(pivot, col);
        }
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0f64; 4];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn exponential_self_fit() {
        let ts: Vec<f64> = (0..500).map(|i| i as f64).collect();
        let ys: Vec<f64> = ts.iter().map(|&t| (-0.02 * t).exp()).collect();
        let fit = fit_exponential(&ts, &ys).unwrap();
        assert_abs_diff_eq!(fit.rate, 0.02, epsilon = 1e-6);
        assert_abs_diff_eq!(fit.amplitude, 1.0, epsilon = 1e-6);
        assert!(fit.residual < 1e-10);
    }

    #[test]
    fn sinusoid_self_fit() {
        let delta = 0.005;
        let ts: Vec<f64> = (0..3000).map(|i| i as f64).collect();
        let ys: Vec<f64> = ts.iter().map(|&t| 0.75 * (delta * t + 0.3).cos()).collect();
        let fit = fit_sinusoid(&ts, &ys, delta).unwrap();
        assert_abs_diff_eq!(fit.amplitude, 0.75, epsilon = 1e-6);
        assert_abs_diff_eq!(fit.phase, 0.3, epsilon = 1e-6);
    }

    #[test]
    fn damped_model_self_fit() {
        let delta = 0.01;
        let gamma = 0.004;
        let ts: Vec<f64> = (0..40000).map(|i| i as f64 * 0.25).collect();
        let ys: Vec<f64> = ts
            .iter()
            .map(|&t| {
                let e = (-gamma * t).exp();
                0.4 * e * (delta * t).cos() - 0.1 * e * (delta * t).sin()
                    + 0.55 * (delta * t).cos() + 0.2 * (delta * t).sin()
            })
            .collect();
        let fit = fit_damped_tunneling(&ts, &ys, gamma, delta).unwrap();
        assert_abs_diff_eq!(fit.coeffs[0], 0.4, epsilon = 1e-8);
        assert_abs_diff_eq!(fit.coeffs[1], -0.1, epsilon = 1e-8);
        assert_abs_diff_eq!(fit.amplitude, (0.55f64 * 0.55 + 0.2 * 0.2).sqrt(), epsilon = 1e-8);
    }

    #[test]
    fn window_too_short_is_rejected() {
        let ts: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let ys = vec![1.0; 100];
        assert!(fit_sinusoid(&ts, &ys, 0.001).is_err());
    }
}
