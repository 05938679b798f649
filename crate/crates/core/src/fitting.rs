//! Frequency extraction by nonlinear least squares.
//!
//! A real sinusoid A·sin(ωt + φ) + c is fitted to one signal, or a sum of
//! complex exponentials Σ a_k·exp(−iω_k t) to a planar signal x + iy. Time is
//! centred on the record midpoint during the fit to decorrelate frequency
//! and phase; reported phases and amplitudes refer to t = 0.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum samples per period accepted by the fitters.
pub const MIN_SAMPLES_PER_PERIOD: f64 = 8.0;
/// Minimum record length in periods.
pub const MIN_PERIODS: f64 = 3.0;
/// A fit is rejected when its RMS residual exceeds this fraction of the amplitude.
pub const RESIDUAL_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SinusoidFit {
    pub omega: f64,
    pub amplitude: f64,
    pub phase: f64,
    pub offset: f64,
    pub residual: f64,
}

impl SinusoidFit {
    pub fn eval(&self, t: f64) -> f64 {
        self.amplitude * (self.omega * t + self.phase).sin() + self.offset
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeFit {
    pub omegas: Vec<f64>,
    pub amplitudes: Vec<Complex64>,
    pub residual: f64,
}

impl ModeFit {
    pub fn eval(&self, t: f64) -> Complex64 {
        self.omegas
            .iter()
            .zip(&self.amplitudes)
            .map(|(&w, &a)| a * Complex64::from_polar(1.0, -w * t))
            .sum()
    }
}

/// Returns the common spacing of `t`, rejecting non-uniform grids.
pub fn uniform_step(t: &[f64]) -> Result<f64> {
    if t.len() < 4 {
        return Err(Error::InsufficientSampling(format!(
            "{} samples; at least 4 required",
            t.len()
        )));
    }
    let dt = (t[t.len() - 1] - t[0]) / (t.len() - 1) as f64;
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter("sample times must increase".into()));
    }
    let tol = 1e-9 * dt + 1e-12 * t[t.len() - 1].abs();
    for (i, w) in t.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(Error::InvalidParameter(format!(
                "sample times not strictly increasing at index {}",
                i + 1
            )));
        }
        if ((t[i + 1] - t[0]) - (i + 1) as f64 * dt).abs() > tol.max(1e-12) * (i + 2) as f64 {
            return Err(Error::InvalidParameter(format!(
                "sample times not uniformly spaced at index {}",
                i + 1
            )));
        }
    }
    Ok(dt)
}

fn check_sampling(omega: f64, dt: f64, span: f64) -> Result<()> {
    let period = 2.0 * PI / omega.abs();
    if period / dt < MIN_SAMPLES_PER_PERIOD {
        return Err(Error::InsufficientSampling(format!(
            "{:.2} samples per period at omega = {omega}; need {MIN_SAMPLES_PER_PERIOD}",
            period / dt
        )));
    }
    if span / period < MIN_PERIODS {
        return Err(Error::InsufficientSampling(format!(
            "record spans {:.2} periods at omega = {omega}; need {MIN_PERIODS}",
            span / period
        )));
    }
    Ok(())
}

/// Peak of the zero-padded power spectrum, as an angular frequency.
///
/// For complex input the sign of the frequency follows exp(−iωt).
fn periodogram_peak(signal: &[Complex64], dt: f64, min_omega: f64) -> (f64, f64) {
    let n = signal.len();
    let m = (8 * n).next_power_of_two();
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    buf[..n].copy_from_slice(signal);
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let bin = 2.0 * PI / (m as f64 * dt);
    let mut best = (0.0, -1.0);
    for (k, c) in buf.iter().enumerate() {
        // forward FFT uses exp(−2πi·jk/m), which matches exp(−iωt) at ω = k·bin
        let kk = if k <= m / 2 { k as f64 } else { k as f64 - m as f64 };
        let omega = kk * bin;
        if omega.abs() < min_omega {
            continue;
        }
        let p = c.norm_sqr();
        if p > best.1 {
            best = (omega, p);
        }
    }
    (best.0, bin)
}

/// Linear least squares for the amplitudes of fixed complex exponentials.
fn mode_amplitudes(tc: &[f64], w: &[Complex64], omegas: &[f64]) -> Option<(Vec<Complex64>, f64)> {
    let n = tc.len();
    let k = omegas.len();
    let phi = DMatrix::from_fn(n, k, |i, j| Complex64::from_polar(1.0, -omegas[j] * tc[i]));
    let rhs = DVector::from_column_slice(w);
    let lhs = phi.adjoint() * &phi;
    let b = phi.adjoint() * &rhs;
    let a = lhs.lu().solve(&b)?;
    let r = rhs - phi * &a;
    let rss: f64 = r.iter().map(|c| c.norm_sqr()).sum();
    Some((a.iter().copied().collect(), rss))
}

fn sinusoid_rss(tc: &[f64], y: &[f64], omega: f64) -> f64 {
    let n = tc.len();
    let phi = DMatrix::from_fn(n, 3, |i, j| match j {
        0 => (omega * tc[i]).sin(),
        1 => (omega * tc[i]).cos(),
        _ => 1.0,
    });
    let rhs = DVector::from_column_slice(y);
    let lhs = phi.transpose() * &phi;
    match lhs.lu().solve(&(phi.transpose() * &rhs)) {
        Some(c) => (rhs - phi * c).norm_squared(),
        None => f64::INFINITY,
    }
}

fn golden_min(mut a: f64, mut b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
        if (b - a).abs() <= 1e-14 * (a.abs() + b.abs()) {
            break;
        }
    }
    0.5 * (a + b)
}

/// Damped Gauss–Newton (Levenberg–Marquardt) on a residual vector.
fn levenberg_marquardt(
    x0: DVector<f64>,
    model: impl Fn(&DVector<f64>) -> (DVector<f64>, DMatrix<f64>),
) -> Result<(DVector<f64>, f64)> {
    let mut x = x0;
    let (mut r, mut j) = model(&x);
    let mut cost = r.norm_squared();
    let mut lambda = 1e-3;
    for _ in 0..200 {
        let jt = j.transpose();
        let jtj = &jt * &j;
        let g = &jt * &r;
        let mut accepted = false;
        for _ in 0..30 {
            let mut a = jtj.clone();
            for i in 0..a.nrows() {
                a[(i, i)] += lambda * jtj[(i, i)].max(1e-300);
            }
            let Some(step) = a.cholesky().map(|c| c.solve(&g)) else {
                lambda *= 10.0;
                continue;
            };
            let trial = &x - &step;
            let (rt, jtn) = model(&trial);
            let ct = rt.norm_squared();
            if ct.is_finite() && ct <= cost {
                let small = step
                    .iter()
                    .zip(trial.iter())
                    .all(|(s, v)| s.abs() <= 1e-15 * v.abs().max(1e-12));
                let flat = cost - ct <= 1e-28 * cost.max(1e-300);
                x = trial;
                r = rt;
                j = jtn;
                cost = ct;
                lambda = (lambda / 10.0).max(1e-15);
                accepted = true;
                if small || flat {
                    return Ok((x, cost));
                }
                break;
            }
            lambda *= 10.0;
        }
        if !accepted {
            // no downhill step at any damping: at a minimum to working precision
            return Ok((x, cost));
        }
    }
    if cost.is_finite() {
        Ok((x, cost))
    } else {
        Err(Error::FitDiverged("non-finite residual".into()))
    }
}

fn wrap_phase(p: f64) -> f64 {
    let w = (p + PI).rem_euclid(2.0 * PI) - PI;
    if w <= -PI {
        w + 2.0 * PI
    } else {
        w
    }
}

/// Fits y ≈ A·sin(ωt + φ) + c with A ≥ 0.
///
/// Errors with `InsufficientSampling` when the record has fewer than 8
/// samples per fitted period or spans fewer than 3 periods, and with
/// `FitFailure` when the RMS residual exceeds 1% of A.
pub fn fit_sinusoid(t: &[f64], y: &[f64]) -> Result<SinusoidFit> {
    if t.len() != y.len() {
        return Err(Error::InvalidParameter("time and value lengths differ".into()));
    }
    let dt = uniform_step(t)?;
    let n = t.len();
    let span = t[n - 1] - t[0];
    let t_mid = 0.5 * (t[0] + t[n - 1]);
    let tc: Vec<f64> = t.iter().map(|x| x - t_mid).collect();

    let mean = y.iter().sum::<f64>() / n as f64;
    let centred: Vec<Complex64> = y.iter().map(|v| Complex64::new(v - mean, 0.0)).collect();
    let (peak, bin) = periodogram_peak(&centred, dt, 0.5 * 2.0 * PI / span);
    let peak = peak.abs();
    if peak == 0.0 {
        return Err(Error::FitFailure {
            residual: 0.0,
            amplitude: 0.0,
        });
    }
    let omega0 = golden_min((peak - bin).max(0.5 * peak), peak + bin, |w| sinusoid_rss(&tc, y, w));

    let phi0 = DMatrix::from_fn(n, 3, |i, j| match j {
        0 => (omega0 * tc[i]).sin(),
        1 => (omega0 * tc[i]).cos(),
        _ => 1.0,
    });
    let lin = (phi0.transpose() * &phi0)
        .lu()
        .solve(&(phi0.transpose() * DVector::from_column_slice(y)))
        .ok_or_else(|| Error::FitDiverged("singular linear stage".into()))?;

    let x0 = DVector::from_vec(vec![omega0, lin[0], lin[1], lin[2]]);
    let model = |p: &DVector<f64>| {
        let (w, a, b, c) = (p[0], p[1], p[2], p[3]);
        let mut r = DVector::zeros(n);
        let mut j = DMatrix::zeros(n, 4);
        for i in 0..n {
            let (s, co) = (w * tc[i]).sin_cos();
            r[i] = a * s + b * co + c - y[i];
            j[(i, 0)] = tc[i] * (a * co - b * s);
            j[(i, 1)] = s;
            j[(i, 2)] = co;
            j[(i, 3)] = 1.0;
        }
        (r, j)
    };
    let (p, cost) = levenberg_marquardt(x0, model)?;
    let (omega, a, b, c) = (p[0], p[1], p[2], p[3]);
    let (omega, a, b) = if omega < 0.0 { (-omega, -a, b) } else { (omega, a, b) };
    let amplitude = a.hypot(b);
    let phase = wrap_phase(b.atan2(a) - omega * t_mid);
    let residual = (cost / n as f64).sqrt();

    check_sampling(omega, dt, span)?;
    if residual > RESIDUAL_TOLERANCE * amplitude {
        return Err(Error::FitFailure { residual, amplitude });
    }
    Ok(SinusoidFit {
        omega,
        amplitude,
        phase,
        offset: c,
        residual,
    })
}

/// Fits w ≈ Σ a_k·exp(−iω_k t), starting from the given frequencies.
///
/// Frequencies are signed; the amplitudes refer to t = 0. No residual
/// threshold is applied: the caller judges `residual` (RMS of |misfit|).
pub fn fit_complex_modes(t: &[f64], w: &[Complex64], omega_init: &[f64]) -> Result<ModeFit> {
    if t.len() != w.len() {
        return Err(Error::InvalidParameter("time and value lengths differ".into()));
    }
    if omega_init.is_empty() {
        return Err(Error::InvalidParameter("at least one mode required".into()));
    }
    let dt = uniform_step(t)?;
    let n = t.len();
    let span = t[n - 1] - t[0];
    for &om in omega_init {
        if om != 0.0 {
            check_sampling(om, dt, span)?;
        }
    }
    let t_mid = 0.5 * (t[0] + t[n - 1]);
    let tc: Vec<f64> = t.iter().map(|x| x - t_mid).collect();
    let k = omega_init.len();

    let (a0, _) = mode_amplitudes(&tc, w, omega_init)
        .ok_or_else(|| Error::FitDiverged("singular linear stage".into()))?;
    let mut x0 = Vec::with_capacity(3 * k);
    x0.extend_from_slice(omega_init);
    for a in &a0 {
        x0.push(a.re);
        x0.push(a.im);
    }

    let model = |p: &DVector<f64>| {
        let mut r = DVector::zeros(2 * n);
        let mut j = DMatrix::zeros(2 * n, 3 * k);
        for i in 0..n {
            let mut acc = -w[i];
            for m in 0..k {
                let a = Complex64::new(p[k + 2 * m], p[k + 2 * m + 1]);
                let e = Complex64::from_polar(1.0, -p[m] * tc[i]);
                let term = a * e;
                acc += term;
                let dw = term * Complex64::new(0.0, -tc[i]);
                j[(2 * i, m)] = dw.re;
                j[(2 * i + 1, m)] = dw.im;
                j[(2 * i, k + 2 * m)] = e.re;
                j[(2 * i + 1, k + 2 * m)] = e.im;
                j[(2 * i, k + 2 * m + 1)] = -e.im;
                j[(2 * i + 1, k + 2 * m + 1)] = e.re;
            }
            r[2 * i] = acc.re;
            r[2 * i + 1] = acc.im;
        }
        (r, j)
    };
    let (p, cost) = levenberg_marquardt(DVector::from_vec(x0), model)?;
    let omegas: Vec<f64> = p.iter().take(k).copied().collect();
    let amplitudes = (0..k)
        .map(|m| {
            Complex64::new(p[k + 2 * m], p[k + 2 * m + 1]) * Complex64::from_polar(1.0, omegas[m] * t_mid)
        })
        .collect();
    Ok(ModeFit {
        omegas,
        amplitudes,
        residual: (cost / n as f64).sqrt(),
    })
}
