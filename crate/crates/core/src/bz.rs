//! Barut–Zanghi classical spinning particle in a uniform magnetic field.
//!
//! Metric signature (+,−,−,−), m = 1, −α = ħ = 1. The electron has e = −1
//! and the field is chosen so that eB = 2ε; the characteristic cubic is then
//! ω³ − 4(1 − 3eB·s_z)ω + 4eB = 0 with s_z ≡ S¹².

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{DimensionlessParams, OMEGA_ZBW};

pub const ELECTRON_CHARGE: f64 = -1.0;

const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];
const INSTABILITY_BOUND: f64 = 1e6;

fn lower(v: &[f64; 4]) -> [f64; 4] {
    [v[0], -v[1], -v[2], -v[3]]
}

/// Minkowski product a·b.
pub fn dot(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    (0..4).map(|i| METRIC[i] * a[i] * b[i]).sum()
}

/// Phase point (x^μ, π^μ, v^μ, S^{μν}).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BZState {
    pub x: [f64; 4],
    pub pi: [f64; 4],
    pub v: [f64; 4],
    pub s: [[f64; 4]; 4],
}

const STATE_LEN: usize = 28;

impl BZState {
    fn to_array(self) -> [f64; STATE_LEN] {
        let mut out = [0.0; STATE_LEN];
        out[0..4].copy_from_slice(&self.x);
        out[4..8].copy_from_slice(&self.pi);
        out[8..12].copy_from_slice(&self.v);
        for (i, row) in self.s.iter().enumerate() {
            out[12 + 4 * i..16 + 4 * i].copy_from_slice(row);
        }
        out
    }

    fn from_array(a: &[f64; STATE_LEN]) -> Self {
        let mut s = Self::default();
        s.x.copy_from_slice(&a[0..4]);
        s.pi.copy_from_slice(&a[4..8]);
        s.v.copy_from_slice(&a[8..12]);
        for i in 0..4 {
            s.s[i].copy_from_slice(&a[12 + 4 * i..16 + 4 * i]);
        }
        s
    }

    /// Sets S^{μν} and S^{νμ} = −S^{μν} together.
    pub fn set_spin(&mut self, mu: usize, nu: usize, value: f64) {
        self.s[mu][nu] = value;
        self.s[nu][mu] = -value;
    }

    /// max |S^{μν} + S^{νμ}|.
    pub fn antisymmetry_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.s[i][j] + self.s[j][i]).abs());
            }
        }
        worst
    }

    /// H = π·v, conserved by the dynamics.
    pub fn energy(&self) -> f64 {
        dot(&self.pi, &self.v)
    }

    /// π² + 2eB·S¹², conserved in a uniform field along z.
    pub fn mass_shell(&self, field: &FieldTensor, e: f64) -> f64 {
        dot(&self.pi, &self.pi) + 2.0 * e * field.b() * self.s[1][2]
    }

    fn max_abs(&self) -> f64 {
        self.to_array().iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Electromagnetic tensor F^{μν} of a uniform field along z.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldTensor {
    pub f: [[f64; 4]; 4],
}

impl FieldTensor {
    /// F^{21} = −F^{12} = B, all other components zero.
    pub fn uniform_z(b: f64) -> Self {
        let mut f = [[0.0; 4]; 4];
        f[2][1] = b;
        f[1][2] = -b;
        Self { f }
    }

    /// The field for which an electron sees eB = 2ε.
    pub fn from_params(params: &DimensionlessParams) -> Self {
        Self::uniform_z(2.0 * params.epsilon / ELECTRON_CHARGE)
    }

    pub fn b(&self) -> f64 {
        self.f[2][1]
    }
}

/// τ-derivative of the state:
/// π̇^μ = eF^{μν}v_ν, ẋ^μ = v^μ, v̇^μ = 4S^{μν}π_ν, Ṡ^{μν} = v^νπ^μ − v^μπ^ν.
pub fn bz_rhs(state: &BZState, field: &FieldTensor, e: f64) -> BZState {
    let v_low = lower(&state.v);
    let pi_low = lower(&state.pi);
    let mut d = BZState {
        x: state.v,
        ..BZState::default()
    };
    for mu in 0..4 {
        d.pi[mu] = e * (0..4).map(|nu| field.f[mu][nu] * v_low[nu]).sum::<f64>();
        d.v[mu] = 4.0 * (0..4).map(|nu| state.s[mu][nu] * pi_low[nu]).sum::<f64>();
        for nu in 0..4 {
            d.s[mu][nu] = state.v[nu] * state.pi[mu] - state.v[mu] * state.pi[nu];
        }
    }
    d
}

fn rk4_step<const N: usize>(y: &[f64; N], h: f64, f: &impl Fn(&[f64; N]) -> [f64; N]) -> [f64; N] {
    let axpy = |a: &[f64; N], k: &[f64; N], s: f64| -> [f64; N] {
        let mut out = *a;
        for (o, ki) in out.iter_mut().zip(k) {
            *o += s * ki;
        }
        out
    };
    let k1 = f(y);
    let k2 = f(&axpy(y, &k1, 0.5 * h));
    let k3 = f(&axpy(y, &k2, 0.5 * h));
    let k4 = f(&axpy(y, &k3, h));
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// One recorded point of a classical trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalSample {
    pub tau: f64,
    pub x: [f64; 3],
    pub v: [f64; 3],
    pub s12: f64,
}

impl ClassicalSample {
    fn of(tau: f64, s: &BZState) -> Self {
        Self {
            tau,
            x: [s.x[1], s.x[2], s.x[3]],
            v: [s.v[1], s.v[2], s.v[3]],
            s12: s.s[1][2],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalTrajectory {
    pub samples: Vec<ClassicalSample>,
    pub final_state: BZState,
    pub max_antisymmetry_defect: f64,
}

impl ClassicalTrajectory {
    pub fn taus(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.tau).collect()
    }

    /// v_x + i·v_y per sample.
    pub fn planar_velocity(&self) -> Vec<Complex64> {
        self.samples
            .iter()
            .map(|s| Complex64::new(s.v[0], s.v[1]))
            .collect()
    }
}

/// Largest step accepted: 1/50 of a Zbw period.
pub const MAX_STEP: f64 = 2.0 * PI / (50.0 * OMEGA_ZBW);
/// Shortest span accepted: 20 Zbw periods.
pub const MIN_SPAN: f64 = 20.0 * 2.0 * PI / OMEGA_ZBW;

fn check_step(tau_max: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0 && dt <= MAX_STEP * (1.0 + 1e-12)) {
        return Err(Error::InvalidParameter(format!(
            "dt = {dt} must lie in (0, {MAX_STEP}]"
        )));
    }
    if !(tau_max.is_finite() && tau_max >= MIN_SPAN * (1.0 - 1e-12)) {
        return Err(Error::InvalidParameter(format!(
            "tau_max = {tau_max} must cover at least {MIN_SPAN} (20 periods)"
        )));
    }
    Ok((tau_max / dt).round() as usize)
}

/// Fixed-step RK4 integration of [`bz_rhs`], recording every step.
pub fn integrate(
    state0: &BZState,
    field: &FieldTensor,
    e: f64,
    tau_max: f64,
    dt: f64,
) -> Result<ClassicalTrajectory> {
    integrate_sampled(state0, field, e, tau_max, dt, 1)
}

/// As [`integrate`], recording every `stride`-th step.
pub fn integrate_sampled(
    state0: &BZState,
    field: &FieldTensor,
    e: f64,
    tau_max: f64,
    dt: f64,
    stride: usize,
) -> Result<ClassicalTrajectory> {
    let steps = check_step(tau_max, dt)?;
    let stride = stride.max(1);
    let rhs = |y: &[f64; STATE_LEN]| bz_rhs(&BZState::from_array(y), field, e).to_array();
    let mut y = state0.to_array();
    let mut samples = Vec::with_capacity(steps / stride + 1);
    samples.push(ClassicalSample::of(0.0, state0));
    let mut defect = state0.antisymmetry_defect();
    for n in 1..=steps {
        y = rk4_step(&y, dt, &rhs);
        let tau = n as f64 * dt;
        let state = BZState::from_array(&y);
        let magnitude = state.max_abs();
        if !(magnitude <= INSTABILITY_BOUND) {
            return Err(Error::Instability { tau, magnitude });
        }
        defect = defect.max(state.antisymmetry_defect());
        if n % stride == 0 {
            samples.push(ClassicalSample::of(tau, &state));
        }
    }
    Ok(ClassicalTrajectory {
        samples,
        final_state: BZState::from_array(&y),
        max_antisymmetry_defect: defect,
    })
}

/// Free-particle velocity v(τ) = p + [v(0) − p]cos(2τ) + [v̇(0)/2]sin(2τ).
///
/// Valid for initial data with p² = 1 and p·v(0) = 1.
pub fn free_solution(v0: &[f64; 4], a0: &[f64; 4], p: &[f64; 4], tau: f64) -> [f64; 4] {
    let (s, c) = (OMEGA_ZBW * tau).sin_cos();
    let mut out = [0.0; 4];
    for i in 0..4 {
        out[i] = p[i] + (v0[i] - p[i]) * c + a0[i] / OMEGA_ZBW * s;
    }
    out
}

/// Which form a set of cubic coefficients was computed from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawCubic {
    pub m: f64,
    pub e: f64,
    pub b: f64,
    pub s_z: f64,
    pub c1: f64,
    pub c0: f64,
}

/// c3·ω³ + c1·ω + c0 = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicCoefficients {
    pub c3: f64,
    pub c1: f64,
    pub c0: f64,
    pub raw: RawCubic,
}

impl CubicCoefficients {
    pub fn eval(&self, w: f64) -> f64 {
        (self.c3 * w * w + self.c1) * w + self.c0
    }

    /// Largest difference between the dimensionless and raw coefficients.
    pub fn cross_form_deviation(&self) -> f64 {
        (self.c1 - self.raw.c1).abs().max((self.c0 - self.raw.c0).abs())
    }
}

/// Coefficients from ε (c1 = −ω_zbw²(1 ∓ 3ε), c0 = ε·ω_zbw³, upper sign spin
/// up) and from (m, e, B, s_z) (c1 = −4(m² − 3e·s_z·B), c0 = 4meB).
///
/// The cubic describes the electron; antiparticle frequencies are read off
/// its negative root.
pub fn characteristic_cubic(params: &DimensionlessParams) -> Result<CubicCoefficients> {
    params.validate()?;
    let eps = params.epsilon;
    let sigma = params.spin.sign();
    let w = OMEGA_ZBW;
    let c1 = -w * w * (1.0 - 3.0 * sigma * eps);
    let c0 = eps * w * w * w;

    let (m, e) = (1.0, ELECTRON_CHARGE);
    let b = FieldTensor::from_params(params).b();
    let s_z = params.spin.s_z();
    let raw = RawCubic {
        m,
        e,
        b,
        s_z,
        c1: -4.0 * (m * m - 3.0 * e * s_z * b),
        c0: 4.0 * m * e * b,
    };
    let out = CubicCoefficients {
        c3: 1.0,
        c1,
        c0,
        raw,
    };
    debug_assert!(out.cross_form_deviation() <= 1e-12);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RootMethod {
    Exact,
    Rough,
    Accurate,
}

/// The three rotation frequencies: ω₁ the small (cyclotron-like) root, ω₂
/// the positive and ω₃ the negative Zbw-like root.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootSet {
    pub omega1: f64,
    pub omega2: f64,
    pub omega3: f64,
    pub method: RootMethod,
}

impl RootSet {
    pub fn as_array(&self) -> [f64; 3] {
        [self.omega1, self.omega2, self.omega3]
    }

    pub fn sorted_by_magnitude(&self) -> [f64; 3] {
        let mut r = self.as_array();
        r.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
        r
    }

    /// (ω₁+ω₂+ω₃, ω₁ω₂+ω₁ω₃+ω₂ω₃, ω₁ω₂ω₃).
    pub fn vieta(&self) -> (f64, f64, f64) {
        let [a, b, c] = self.as_array();
        (a + b + c, a * b + a * c + b * c, a * b * c)
    }
}

/// Trigonometric solution of the depressed cubic, each root polished by a
/// Newton step.
pub fn solve_cubic_exact(c: &CubicCoefficients) -> Result<RootSet> {
    if c.c3 == 0.0 || !c.c3.is_finite() {
        return Err(Error::InvalidParameter("leading coefficient must be nonzero".into()));
    }
    let p = c.c1 / c.c3;
    let q = c.c0 / c.c3;
    let disc = -(4.0 * p * p * p + 27.0 * q * q);
    if !(disc > 0.0) {
        return Err(Error::ComplexRoots(disc));
    }
    let m = 2.0 * (-p / 3.0).sqrt();
    let arg = ((3.0 * q / (2.0 * p)) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
    let theta = arg.acos() / 3.0;
    let mut roots = [0.0; 3];
    for (k, r) in roots.iter_mut().enumerate() {
        let t = m * (theta - 2.0 * PI * k as f64 / 3.0).cos();
        let d = 3.0 * t * t + p;
        *r = if d != 0.0 { t - (t * t * t + p * t + q) / d } else { t };
    }
    roots.sort_by(|a, b| a.total_cmp(b));
    let [lo, mid, hi] = roots;
    Ok(RootSet {
        omega1: mid,
        omega2: hi,
        omega3: lo,
        method: RootMethod::Exact,
    })
}

/// First-order (rough) or improved (accurate) closed-form roots.
///
/// rough: ω₁ = ω_c(1 ± 3ε), ω₂ = −ω₃ = ω_zbw(1 ∓ 3ε/2);
/// accurate: ω₂ = ω_zbw(1 − 2ε | 1 + ε), ω₃ = −ω_zbw(1 − ε | 1 + 2ε),
/// ω₁ taken from the exact solver. Upper/left entries are spin up.
pub fn perturbative_roots(params: &DimensionlessParams, scheme: RootMethod) -> Result<RootSet> {
    params.validate()?;
    let eps = params.epsilon;
    let sigma = params.spin.sign();
    let w = OMEGA_ZBW;
    match scheme {
        RootMethod::Exact => solve_cubic_exact(&characteristic_cubic(params)?),
        RootMethod::Rough => Ok(RootSet {
            omega1: params.omega_c() * (1.0 + 3.0 * sigma * eps),
            omega2: w * (1.0 - 1.5 * sigma * eps),
            omega3: -w * (1.0 - 1.5 * sigma * eps),
            method: RootMethod::Rough,
        }),
        RootMethod::Accurate => {
            let exact = solve_cubic_exact(&characteristic_cubic(params)?)?;
            let (f2, f3) = match params.spin {
                crate::units::Spin::Up => (1.0 - 2.0 * eps, 1.0 - eps),
                crate::units::Spin::Down => (1.0 + eps, 1.0 + 2.0 * eps),
            };
            Ok(RootSet {
                omega1: exact.omega1,
                omega2: w * f2,
                omega3: -w * f3,
                method: RootMethod::Accurate,
            })
        }
    }
}

/// State vector (v_x, v_y, v̇_x, v̇_y, v̈_x, v̈_y) of the reduced system.
pub type ReducedState = [f64; 6];

/// v⃛_x = c1·v̇_x − c0·(−v_y), v⃛_y = c1·v̇_y − c0·v_x, i.e.
/// v⃛_x + 4(m² − 3e·s_z·B)v̇_x − 4meB·v_y = 0 and its y partner.
pub fn reduced_third_order_rhs(state: &ReducedState, c: &CubicCoefficients) -> ReducedState {
    let [vx, vy, ax, ay, jx, jy] = *state;
    let (c1, c0) = (c.c1 / c.c3, c.c0 / c.c3);
    [ax, ay, jx, jy, c1 * ax + c0 * vy, c1 * ay - c0 * vx]
}

/// RK4 integration of the reduced system; returns (τ, state) every `stride` steps.
pub fn integrate_reduced(
    init: &ReducedState,
    c: &CubicCoefficients,
    tau_max: f64,
    dt: f64,
    stride: usize,
) -> Result<Vec<(f64, ReducedState)>> {
    let steps = check_step(tau_max, dt)?;
    let stride = stride.max(1);
    let rhs = |y: &ReducedState| reduced_third_order_rhs(y, c);
    let mut y = *init;
    let mut out = Vec::with_capacity(steps / stride + 1);
    out.push((0.0, y));
    for n in 1..=steps {
        y = rk4_step(&y, dt, &rhs);
        let tau = n as f64 * dt;
        if let Some(m) = y.iter().map(|x| x.abs()).reduce(f64::max) {
            if !(m <= INSTABILITY_BOUND) {
                return Err(Error::Instability { tau, magnitude: m });
            }
        }
        if n % stride == 0 {
            out.push((tau, y));
        }
    }
    Ok(out)
}

/// Reduced-system initial data matching a full state: v, v̇ = 4Sπ and
/// v̈ = 4Hπ − 4(C − 3eB·S¹²)v in the plane.
pub fn reduced_state_of(state: &BZState, field: &FieldTensor, e: f64) -> ReducedState {
    let d = bz_rhs(state, field, e);
    let h = state.energy();
    let k = state.mass_shell(field, e) - 3.0 * e * field.b() * state.s[1][2];
    let jx = 4.0 * h * state.pi[1] - 4.0 * k * state.v[1];
    let jy = 4.0 * h * state.pi[2] - 4.0 * k * state.v[2];
    [state.v[1], state.v[2], d.v[1], d.v[2], jx, jy]
}

/// Completes a planar state: given spatial v, v̇, π and S¹², fixes π⁰, v⁰ so
/// that π·v = 1 and π² + 2eB·S¹² = 1, and S^{10}, S^{20} so that
/// v̇ = 4Sπ holds in the plane.
fn complete_planar_state(
    w: Complex64,
    w_dot: Complex64,
    p: Complex64,
    s12: f64,
    field: &FieldTensor,
    e: f64,
) -> Result<BZState> {
    let eb = e * field.b();
    let pi0_sq = 1.0 + p.norm_sqr() - 2.0 * eb * s12;
    if pi0_sq <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "no timelike momentum for these amplitudes (pi0^2 = {pi0_sq})"
        )));
    }
    let pi0 = pi0_sq.sqrt();
    let v0 = (1.0 + p.re * w.re + p.im * w.im) / pi0;
    let mut st = BZState {
        x: [0.0; 4],
        pi: [pi0, p.re, p.im, 0.0],
        v: [v0, w.re, w.im, 0.0],
        s: [[0.0; 4]; 4],
    };
    st.set_spin(1, 2, s12);
    // v̇¹ = 4(S¹⁰π⁰ − S¹²π²), v̇² = 4(S²⁰π⁰ + S¹²π¹)
    st.set_spin(1, 0, (w_dot.re / 4.0 + s12 * p.im) / pi0);
    st.set_spin(2, 0, (w_dot.im / 4.0 - s12 * p.re) / pi0);
    Ok(st)
}

/// Electron at rest on average: v_x = 1, v_y = v_z = 0, spatial π = 0,
/// S¹² = s_z, S^{0i} = 0, with π⁰ and v⁰ fixed by π·v = 1 and
/// π² + 2eB·S¹² = 1.
pub fn rest_initial_state(params: &DimensionlessParams) -> Result<BZState> {
    params.validate()?;
    let field = FieldTensor::from_params(params);
    complete_planar_state(
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        params.spin.s_z(),
        &field,
        ELECTRON_CHARGE,
    )
}

/// Ratio eB/ω relating the momentum and velocity of a circular mode,
/// continued to 1 for the small root at zero field.
fn momentum_ratio(eb: f64, omega: f64) -> f64 {
    if omega.abs() < 1e-300 {
        1.0
    } else {
        eb / omega
    }
}

/// Superposition of the three circular modes w = Σ a_k·exp(−iω_kτ) of the
/// reduced system (w = v_x + i·v_y), with the matching momentum
/// π_x + iπ_y = Σ (eB/ω_k)·a_k·exp(−iω_kτ).
///
/// `s12` overrides the initial S¹² (defaults to s_z). A single mode keeps
/// S¹² exactly constant.
pub fn mode_initial_state(
    params: &DimensionlessParams,
    amplitudes: [Complex64; 3],
    s12: Option<f64>,
) -> Result<BZState> {
    let roots = solve_cubic_exact(&characteristic_cubic(params)?)?;
    let field = FieldTensor::from_params(params);
    let eb = ELECTRON_CHARGE * field.b();
    let minus_i = Complex64::new(0.0, -1.0);
    let mut w = Complex64::new(0.0, 0.0);
    let mut w_dot = Complex64::new(0.0, 0.0);
    let mut p = Complex64::new(0.0, 0.0);
    for (a, om) in amplitudes.iter().zip(roots.as_array()) {
        w += a;
        w_dot += minus_i * om * a;
        p += a * momentum_ratio(eb, om);
    }
    complete_planar_state(
        w,
        w_dot,
        p,
        s12.unwrap_or(params.spin.s_z()),
        &field,
        ELECTRON_CHARGE,
    )
}

/// Time average of S¹² over the linear mode solution started at S¹²(0) = 0.
///
/// Ṡ¹² = −Im(w̄·P); subtracting this from s_z makes the mean S¹² equal s_z.
pub fn mode_spin_offset(params: &DimensionlessParams, amplitudes: [Complex64; 3]) -> Result<f64> {
    let roots = solve_cubic_exact(&characteristic_cubic(params)?)?;
    let eb = ELECTRON_CHARGE * FieldTensor::from_params(params).b();
    let om = roots.as_array();
    // S¹²(τ) − S¹²(0) = −Σ_{j≠k} Im[ā_j a_k r_k (e^{i(ω_j−ω_k)τ} − 1)/(i(ω_j−ω_k))]
    let mut offset = 0.0;
    for j in 0..3 {
        for k in 0..3 {
            if j == k {
                continue;
            }
            let dw = om[j] - om[k];
            let coef = amplitudes[j].conj() * amplitudes[k] * momentum_ratio(eb, om[k]);
            // mean of (e^{iΔτ} − 1)/(iΔ) is −1/(iΔ) = i/Δ
            let mean = coef * Complex64::new(0.0, 1.0 / dw);
            offset -= mean.im;
        }
    }
    Ok(offset)
}
