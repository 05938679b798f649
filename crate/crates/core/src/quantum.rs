//! Expectation values of the localized packet: the shifted Zbw circle, its
//! amplitude integrals, the magnetic moment and the classical reading of spin.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dirac_packet::{
    build_spinor_unreduced, k_factors, packet_spinor, EnergySign, solve_packet_coefficients, weak_field_frequencies, GaussianProfile,
    HAmplitudes, MomentumPoint,
};
use crate::error::{Error, Result};
use crate::fitting::{fit_sinusoid, SinusoidFit};
use crate::quadrature::{periodic_trapezoid, GridSize, SphericalGrid};
use crate::units::{Charge, DimensionlessParams, Spin, OMEGA_ZBW};

/// Default sampling step: 1/100 of a Zbw period.
pub const DEFAULT_DT: f64 = 2.0 * PI / (100.0 * OMEGA_ZBW);
/// Default record length: 100 Zbw periods.
pub const DEFAULT_T_MAX: f64 = 100.0 * 2.0 * PI / OMEGA_ZBW;

/// ±1 selecting the upper or lower sign of the shift formulas: +1 for the
/// spin-up electron and the spin-down positron.
fn shift_sign(params: &DimensionlessParams) -> f64 {
    params.spin.sign() * params.charge.conjugation_sign()
}

/// Angular frequency of the planar Zbw circle.
///
/// The positive-energy component of the initial spin beats against the
/// negative-energy component of the opposite spin (the roles of the two
/// branches swap for the positron), so ω = r₊ − r₋ with the phase rates of
/// [`weak_field_frequencies`]. This gives ω_zbw ± ω_c.
pub fn zbw_frequency(params: &DimensionlessParams) -> f64 {
    let (main, partner) = match params.charge {
        Charge::Electron => (params.spin, params.spin.flipped()),
        Charge::Positron => (params.spin.flipped(), params.spin),
    };
    let (pos, _) = weak_field_frequencies(params.epsilon, main);
    let (_, neg) = weak_field_frequencies(params.epsilon, partner);
    pos - neg
}

/// Δω = ω − ω_zbw.
pub fn frequency_shift(params: &DimensionlessParams) -> f64 {
    zbw_frequency(params) - OMEGA_ZBW
}

/// One Fourier contribution amplitude·sin(ωt + phase) to ⟨r⟩.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorTerm {
    pub amplitude: [f64; 3],
    pub omega: f64,
    pub phase: f64,
}

impl OscillatorTerm {
    pub fn contribution(&self, t: f64) -> [f64; 3] {
        let s = (self.omega * t + self.phase).sin();
        self.amplitude.map(|a| a * s)
    }
}

/// The two planar terms of the fixed-φ₀ component:
/// x = ½ sin(ωt ± φ₀), y = −½ cos(ωt ± φ₀), upper sign for spin up.
pub fn oscillator_terms(params: &DimensionlessParams) -> [OscillatorTerm; 2] {
    let omega = zbw_frequency(params);
    let phase = params.spin.sign() * params.phi0;
    [
        OscillatorTerm {
            amplitude: [0.5, 0.0, 0.0],
            omega,
            phase,
        },
        OscillatorTerm {
            amplitude: [0.0, 0.5, 0.0],
            omega,
            phase: phase - 0.5 * PI,
        },
    ]
}

/// ⟨r⟩ of the Fourier component at φ₀, in units of λ_c.
pub fn position_expectation(params: &DimensionlessParams, t: f64) -> [f64; 3] {
    let mut r = [0.0; 3];
    for term in oscillator_terms(params) {
        for (ri, ci) in r.iter_mut().zip(term.contribution(t)) {
            *ri += ci;
        }
    }
    r
}

/// Mean over φ₀ ∈ [0, 2π) of the planar position, on `n_phi` uniform nodes.
pub fn azimuthal_average(params: &DimensionlessParams, t: f64, n_phi: usize) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (c, o) in out.iter_mut().enumerate() {
        *o = periodic_trapezoid(n_phi, |phi| {
            position_expectation(&params.with_phi0(phi), t)[c]
        }) / (2.0 * PI);
    }
    out
}

/// Uniformly sampled ⟨r⟩(t).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub positions: Vec<[f64; 3]>,
    pub meta: DimensionlessParams,
}

impl Trajectory {
    /// Samples t = 0, dt, …, t_max.
    pub fn sample(params: &DimensionlessParams, t_max: f64, dt: f64) -> Result<Self> {
        params.validate()?;
        if !(dt > 0.0 && dt.is_finite()) || !(t_max > 0.0 && t_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "need positive finite dt and t_max (got {dt}, {t_max})"
            )));
        }
        let n = (t_max / dt + 1e-9).floor() as usize;
        let times: Vec<f64> = (0..=n).map(|i| i as f64 * dt).collect();
        let positions = times.iter().map(|&t| position_expectation(params, t)).collect();
        Ok(Self {
            times,
            positions,
            meta: *params,
        })
    }

    /// Default sampling: dt = 2π/(100·ω_zbw) over 100 periods.
    pub fn sample_default(params: &DimensionlessParams) -> Result<Self> {
        Self::sample(params, DEFAULT_T_MAX, DEFAULT_DT)
    }

    pub fn component(&self, c: usize) -> Vec<f64> {
        self.positions.iter().map(|p| p[c]).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.times.len() != self.positions.len() {
            return Err(Error::InvalidParameter("times and positions differ in length".into()));
        }
        crate::fitting::uniform_step(&self.times).map(|_| ())
    }
}

/// Result of fitting the planar components of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyEstimate {
    pub omega: f64,
    pub amplitude: f64,
    pub phase: f64,
    pub residual: f64,
    pub x: SinusoidFit,
    pub y: SinusoidFit,
}

/// Fits A·sin(ωt + φ) to x(t) and y(t) separately.
///
/// `omega` and `amplitude` are the means of the two fits, `phase` is the x
/// phase, `residual` the larger RMS misfit.
pub fn extract_frequency(traj: &Trajectory) -> Result<FrequencyEstimate> {
    traj.validate()?;
    let x = fit_sinusoid(&traj.times, &traj.component(0))?;
    let y = fit_sinusoid(&traj.times, &traj.component(1))?;
    Ok(FrequencyEstimate {
        omega: 0.5 * (x.omega + y.omega),
        amplitude: 0.5 * (x.amplitude + y.amplitude),
        phase: x.phase,
        residual: x.residual.max(y.residual),
        x,
        y,
    })
}

/// Weights and phases of the oscillatory integrand of ⟨r⟩ at one node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BilinearFactors {
    pub l1: [f64; 3],
    pub l2: [f64; 3],
    pub phase: [f64; 3],
}

/// l₁ₓ = l₁ᵧ = −f²π sinθ/2, l₂z = −f²π cosθ/2, phases (φ, φ + π/2, 0).
///
/// l₁ weighs the positive/negative-energy cross term with opposite spins,
/// l₂ the one with equal spins. Phases are fixed modulo π only.
pub fn bilinear_factors(p: &MomentumPoint, g: &GaussianProfile) -> BilinearFactors {
    let f = g.value(p.pi);
    let (st, ct) = p.theta.sin_cos();
    let l1 = -f * f * p.pi * st / 2.0;
    BilinearFactors {
        l1: [l1, l1, 0.0],
        l2: [0.0, 0.0, -f * f * p.pi * ct / 2.0],
        phase: [p.phi, p.phi + 0.5 * PI, 0.0],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AmplitudeKind {
    Planar,
    Axial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeCoefficient {
    pub value: f64,
    pub spin: Spin,
    pub kind: AmplitudeKind,
}

/// (1 − Δω/ω_zbw): 1 − ω_c/ω_zbw for the spin-up electron.
fn planar_factor(params: &DimensionlessParams) -> f64 {
    1.0 - frequency_shift(params) / OMEGA_ZBW
}

/// Closed forms I = −(8π̄)^{−1/2}(λ_c/r_o)(1 ∓ ω_c/ω_zbw) and J = 0.
pub fn amplitude_coefficients(
    params: &DimensionlessParams,
) -> Result<(AmplitudeCoefficient, AmplitudeCoefficient)> {
    params.validate()?;
    let i = -(8.0 * PI).powf(-0.5) / params.r0_over_lambda * planar_factor(params);
    Ok((
        AmplitudeCoefficient {
            value: i,
            spin: params.spin,
            kind: AmplitudeKind::Planar,
        },
        AmplitudeCoefficient {
            value: 0.0,
            spin: params.spin,
            kind: AmplitudeKind::Axial,
        },
    ))
}

/// The defining double integrals of I and J evaluated by Gauss–Legendre:
/// I = −2(1 ∓ ω_c/ω_zbw)∫∫ (f²/2)π³sin²θ dθ dπ, J = −π̄∫∫ (f²/2)π³ sin2θ dθ dπ.
pub fn amplitude_coefficients_quadrature(
    params: &DimensionlessParams,
    size: GridSize,
) -> Result<(AmplitudeCoefficient, AmplitudeCoefficient)> {
    params.validate()?;
    let g = GaussianProfile::from_params(params);
    let grid = SphericalGrid::new(g.pi0, size);
    let planar = grid.integrate_radial_polar(|pi, th| {
        let f = g.value(pi);
        0.5 * f * f * pi.powi(3) * th.sin().powi(2)
    });
    let axial = grid.integrate_radial_polar(|pi, th| {
        let f = g.value(pi);
        0.5 * f * f * pi.powi(3) * (2.0 * th).sin()
    });
    Ok((
        AmplitudeCoefficient {
            value: -2.0 * planar_factor(params) * planar,
            spin: params.spin,
            kind: AmplitudeKind::Planar,
        },
        AmplitudeCoefficient {
            value: -PI * axial,
            spin: params.spin,
            kind: AmplitudeKind::Axial,
        },
    ))
}

/// ∫ f² d³π.
pub fn profile_norm(params: &DimensionlessParams, size: GridSize) -> Result<f64> {
    params.validate()?;
    let g = GaussianProfile::from_params(params);
    let grid = SphericalGrid::new(g.pi0, size);
    Ok(grid.integrate(|p| g.value(p.pi).powi(2)))
}

/// Normalization integrals of the four-column packet at t = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizationReport {
    /// ∫ |Σ weight·column|² d³π.
    pub coherent: f64,
    /// ∫ Σ |weight·column|² d³π, the column-by-column sum.
    pub column_sum: f64,
    /// Column-by-column sum using the rough weights 𝓐 = f, 𝓒 = −Kπ_z f, 𝓓 = −Kπ₊f.
    pub rough_column_sum: f64,
}

/// Evaluates the packet normalization with weights solved at every node.
pub fn joint_normalization(params: &DimensionlessParams, size: GridSize) -> Result<NormalizationReport> {
    let k = k_factors(params)?;
    let g = GaussianProfile::from_params(params);
    let grid = SphericalGrid::new(g.pi0, size);
    let h = HAmplitudes::default();
    let failure = std::cell::RefCell::new(None);
    let pieces = |p: &MomentumPoint| -> [f64; 3] {
        let f = g.value(p.pi);
        let co = match solve_packet_coefficients(p, &k, &h, f) {
            Ok(co) => co,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                return [0.0; 3];
            }
        };
        let coherent: f64 = packet_spinor(p, &k, &co).iter().map(|c| c.norm_sqr()).sum();
        let cols = [
            (Spin::Up, EnergySign::Positive),
            (Spin::Down, EnergySign::Positive),
            (Spin::Up, EnergySign::Negative),
            (Spin::Down, EnergySign::Negative),
        ]
        .map(|(s, e)| build_spinor_unreduced(p, s, e, &k).norm_sqr());
        let column_sum = co.a.norm_sqr() * cols[0]
            + co.b.norm_sqr() * cols[1]
            + co.c.norm_sqr() * cols[2]
            + co.d.norm_sqr() * cols[3];
        let kp2 = (k.k * p.pi).powi(2);
        let rough = f * f * (1.0 + kp2) * (1.0 + kp2);
        [coherent, column_sum, rough]
    };
    let mut acc = [0.0; 3];
    for (c, a) in acc.iter_mut().enumerate() {
        *a = grid.integrate(|p| pieces(p)[c]);
    }
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(NormalizationReport {
        coherent: acc[0],
        column_sum: acc[1],
        rough_column_sum: acc[2],
    })
}

/// Coefficient of the term linear in t in ⟨r⟩: V = 2K∫f²π d³π.
pub fn drift_velocity(params: &DimensionlessParams, size: GridSize) -> Result<[f64; 3]> {
    let k = k_factors(params)?;
    let g = GaussianProfile::from_params(params);
    let grid = SphericalGrid::new(g.pi0, size);
    let mut v = [0.0; 3];
    for (c, vc) in v.iter_mut().enumerate() {
        *vc = 2.0 * k.k * grid.integrate(|p| g.value(p.pi).powi(2) * p.cartesian()[c]);
    }
    Ok(v)
}

/// ⟨μ⟩ in units of |e|λ_c: μ_x = μ_y = 0,
/// μ_z = ∓½[1 − cos(ωt)] (upper sign spin-up electron).
pub fn magnetic_moment_expectation(params: &DimensionlessParams, t: f64) -> [f64; 3] {
    let omega = zbw_frequency(params);
    [0.0, 0.0, -shift_sign(params) * 0.5 * (1.0 - (omega * t).cos())]
}

/// Mean of μ_z over one oscillation period on `n` uniform samples.
pub fn magnetic_moment_period_average(params: &DimensionlessParams, n: usize) -> f64 {
    let period = 2.0 * PI / zbw_frequency(params);
    let h = period / n as f64;
    (0..n)
        .map(|i| magnetic_moment_expectation(params, i as f64 * h)[2])
        .sum::<f64>()
        / n as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpinMode {
    VariableSpin,
    FixedSpin,
}

/// Classical reading of the shifted Zbw circle (units λ_c, c, ħ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinInterpretation {
    pub r_zbw: f64,
    pub v_zbw: f64,
    pub s_zbw: f64,
    pub g: f64,
    /// v_zbw/c; fixed at 1 ∓ ε/2 when the spin is held at ħ/2.
    pub zeta: f64,
}

/// variable_spin: r = (1 ± ε)/2, v = r·ω_zbw(1 ∓ ε) = 1 − ε², s = (1 ± ε)/2,
/// g = 2(1 ∓ ε). fixed_spin: ζ = 1 ∓ ε/2, v = ζ, r = (1 ± ε/2)/2, s = 1/2,
/// g = 2.
pub fn spin_interpretation(params: &DimensionlessParams, mode: SpinMode) -> Result<SpinInterpretation> {
    params.validate()?;
    let eps = params.epsilon;
    let s = shift_sign(params);
    Ok(match mode {
        SpinMode::VariableSpin => {
            let r = 0.5 * (1.0 + s * eps);
            let omega = OMEGA_ZBW * (1.0 - s * eps);
            let v = r * omega;
            SpinInterpretation {
                r_zbw: r,
                v_zbw: v,
                s_zbw: 0.5 * (1.0 + s * eps),
                g: 2.0 * (1.0 - s * eps),
                zeta: v,
            }
        }
        SpinMode::FixedSpin => {
            let zeta = 1.0 - s * eps / 2.0;
            SpinInterpretation {
                r_zbw: 0.5 * (1.0 + s * eps / 2.0),
                v_zbw: zeta,
                s_zbw: 0.5,
                g: 2.0,
                zeta,
            }
        }
    })
}
