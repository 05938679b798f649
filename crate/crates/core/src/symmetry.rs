//! Frequency-shift tables over (charge × spin), CP antisymmetry checks and
//! the quantum-versus-classical discrepancy report.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bz::{
    characteristic_cubic, integrate_sampled, mode_initial_state, mode_spin_offset,
    perturbative_roots, solve_cubic_exact, FieldTensor, RootMethod, RootSet, ELECTRON_CHARGE,
    MIN_SPAN,
};
use crate::error::{Error, Result};
use crate::fitting::{fit_complex_modes, ModeFit};
use crate::quantum::{extract_frequency, zbw_frequency, Trajectory, DEFAULT_DT, DEFAULT_T_MAX};
use crate::units::{Charge, DimensionlessParams, Spin, OMEGA_ZBW};

/// Relative tolerance for antisymmetry verdicts on formula values.
pub const FORMULA_TOLERANCE: f64 = 1e-9;
/// Relative tolerance for antisymmetry verdicts on fitted values.
pub const FITTED_TOLERANCE: f64 = 1e-4;

/// Cell order used by every table: e⁻↑, e⁻↓, e⁺↑, e⁺↓.
pub const CELLS: [(Charge, Spin); 4] = [
    (Charge::Electron, Spin::Up),
    (Charge::Electron, Spin::Down),
    (Charge::Positron, Spin::Up),
    (Charge::Positron, Spin::Down),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Approach {
    Quantum,
    ClassicalAccurate,
    ClassicalRough,
    /// Shifts read off the exact roots of the cubic.
    ClassicalExact,
}

impl Approach {
    pub const ALL: [Approach; 4] = [
        Approach::Quantum,
        Approach::ClassicalAccurate,
        Approach::ClassicalRough,
        Approach::ClassicalExact,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Approach::Quantum => "quantum",
            Approach::ClassicalAccurate => "classical_accurate",
            Approach::ClassicalRough => "classical_rough",
            Approach::ClassicalExact => "classical_exact",
        }
    }
}

impl std::fmt::Display for Approach {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Approach {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Approach::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown approach '{s}'")))
    }
}

/// Whether table values come from closed forms or from fitted trajectories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftSource {
    Formula,
    Fitted,
}

impl ShiftSource {
    pub fn tolerance(self) -> f64 {
        match self {
            ShiftSource::Formula => FORMULA_TOLERANCE,
            ShiftSource::Fitted => FITTED_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftEntry {
    pub charge: Charge,
    pub spin: Spin,
    /// ω_measured − ω_reference with reference +ω_zbw for particles and
    /// −ω_zbw for classical antiparticles.
    pub delta_omega: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftTable {
    pub approach: Approach,
    pub epsilon: f64,
    pub source: ShiftSource,
    pub entries: [ShiftEntry; 4],
}

impl ShiftTable {
    fn from_fn(
        approach: Approach,
        epsilon: f64,
        source: ShiftSource,
        mut f: impl FnMut(Charge, Spin) -> Result<f64>,
    ) -> Result<Self> {
        let mut entries = [ShiftEntry {
            charge: Charge::Electron,
            spin: Spin::Up,
            delta_omega: 0.0,
        }; 4];
        for (e, (charge, spin)) in entries.iter_mut().zip(CELLS) {
            *e = ShiftEntry {
                charge,
                spin,
                delta_omega: f(charge, spin)?,
            };
        }
        Ok(Self {
            approach,
            epsilon,
            source,
            entries,
        })
    }

    pub fn get(&self, charge: Charge, spin: Spin) -> f64 {
        self.entries
            .iter()
            .find(|e| e.charge == charge && e.spin == spin)
            .map(|e| e.delta_omega)
            .unwrap_or(f64::NAN)
    }
}

/// Classical shift of one cell from a root set of the electron cubic for
/// that spin: ω₂ − ω_zbw for particles, ω₃ + ω_zbw for antiparticles.
fn classical_cell(roots: &RootSet, charge: Charge) -> f64 {
    match charge {
        Charge::Electron => roots.omega2 - OMEGA_ZBW,
        Charge::Positron => roots.omega3 + OMEGA_ZBW,
    }
}

/// The shift table of one approach from closed forms (or exact roots).
pub fn shift_table(approach: Approach, params: &DimensionlessParams) -> Result<ShiftTable> {
    params.validate()?;
    let base = DimensionlessParams::with_epsilon(params.epsilon);
    ShiftTable::from_fn(approach, params.epsilon, ShiftSource::Formula, |charge, spin| {
        let cell = base.with_charge(charge).with_spin(spin);
        let method = match approach {
            Approach::Quantum => return Ok(zbw_frequency(&cell) - OMEGA_ZBW),
            Approach::ClassicalAccurate => RootMethod::Accurate,
            Approach::ClassicalRough => RootMethod::Rough,
            Approach::ClassicalExact => RootMethod::Exact,
        };
        let roots = perturbative_roots(&base.with_spin(spin), method)?;
        Ok(classical_cell(&roots, charge))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    CpRespected,
    CpViolated,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::CpRespected => "cp_respected",
            Verdict::CpViolated => "cp_violated",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CPReport {
    pub spin_flip_antisymmetric: bool,
    pub charge_conjugation_antisymmetric: bool,
    /// |Δω(↑)|/|Δω(↓)| for particles.
    pub asymmetry_ratio: f64,
    /// The same ratio for antiparticles.
    pub antiparticle_asymmetry_ratio: f64,
    pub verdict: Verdict,
}

fn antisymmetric(a: f64, b: f64, tol: f64) -> bool {
    (a + b).abs() <= tol * a.abs().max(b.abs())
}

fn ratio(up: f64, down: f64) -> f64 {
    if up == 0.0 && down == 0.0 {
        1.0
    } else {
        up.abs() / down.abs()
    }
}

/// Checks Δω(c,↑) = −Δω(c,↓) and Δω(e⁻,s) = −Δω(e⁺,s) at the tolerance of
/// the table's source.
pub fn cp_check(table: &ShiftTable) -> CPReport {
    let tol = table.source.tolerance();
    let g = |c, s| table.get(c, s);
    let spin_flip = [Charge::Electron, Charge::Positron]
        .into_iter()
        .all(|c| antisymmetric(g(c, Spin::Up), g(c, Spin::Down), tol));
    let conjugation = [Spin::Up, Spin::Down]
        .into_iter()
        .all(|s| antisymmetric(g(Charge::Electron, s), g(Charge::Positron, s), tol));
    CPReport {
        spin_flip_antisymmetric: spin_flip,
        charge_conjugation_antisymmetric: conjugation,
        asymmetry_ratio: ratio(g(Charge::Electron, Spin::Up), g(Charge::Electron, Spin::Down)),
        antiparticle_asymmetry_ratio: ratio(
            g(Charge::Positron, Spin::Up),
            g(Charge::Positron, Spin::Down),
        ),
        verdict: if spin_flip && conjugation {
            Verdict::CpRespected
        } else {
            Verdict::CpViolated
        },
    }
}

/// Serialized form of a table and its verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftReport {
    pub epsilon: f64,
    pub approach: Approach,
    pub cells: Vec<ReportCell>,
    pub cp: CpSummary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportCell {
    pub charge: Charge,
    pub spin: Spin,
    pub delta_omega: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CpSummary {
    pub verdict: Verdict,
    pub asymmetry_ratio: f64,
}

impl ShiftReport {
    pub fn new(table: &ShiftTable, cp: &CPReport) -> Self {
        Self {
            epsilon: table.epsilon,
            approach: table.approach,
            cells: table
                .entries
                .iter()
                .map(|e| ReportCell {
                    charge: e.charge,
                    spin: e.spin,
                    delta_omega: e.delta_omega,
                })
                .collect(),
            cp: CpSummary {
                verdict: cp.verdict,
                asymmetry_ratio: cp.asymmetry_ratio,
            },
        }
    }
}

/// Settings for fitting the spectrum of an integrated BZ trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalFitSettings {
    pub dt: f64,
    /// Record length; `None` means ten periods of the slow root (at least
    /// the minimum span).
    pub tau_max: Option<f64>,
    /// Spacing of recorded samples.
    pub sample_every: f64,
    /// Initial amplitudes of the (ω₁, ω₂, ω₃) modes of v_x + iv_y.
    pub amplitudes: [f64; 3],
    /// Fit the slow root; otherwise a single near-zero mode absorbs the
    /// slow drift and only ω₂, ω₃ are resolved.
    pub resolve_slow_mode: bool,
}

impl Default for ClassicalFitSettings {
    fn default() -> Self {
        Self {
            dt: PI / 100.0,
            tau_max: None,
            sample_every: 0.25,
            amplitudes: [0.02, 0.5, 0.5],
            resolve_slow_mode: true,
        }
    }
}

impl ClassicalFitSettings {
    /// Short record with a fine step, for the ω₂/ω₃ splitting at weak field.
    pub fn fast_modes() -> Self {
        Self {
            dt: PI / 400.0,
            tau_max: Some(2000.0),
            sample_every: 0.25,
            amplitudes: [0.0, 0.5, 0.5],
            resolve_slow_mode: false,
        }
    }
}

/// Integrates the BZ equations from a mode superposition with mean S¹²
/// equal to s_z and fits the planar velocity spectrum.
///
/// The returned frequencies are ordered like [`RootSet::as_array`]
/// (ω₁, ω₂, ω₃); with `resolve_slow_mode` off the first is the fitted
/// near-zero mode.
pub fn fit_classical_modes(params: &DimensionlessParams, settings: &ClassicalFitSettings) -> Result<ModeFit> {
    let roots = solve_cubic_exact(&characteristic_cubic(params)?)?;
    let amps = settings.amplitudes.map(|a| Complex64::new(a, 0.0));
    let offset = mode_spin_offset(params, amps)?;
    let state = mode_initial_state(params, amps, Some(params.spin.s_z() - offset))?;
    let field = FieldTensor::from_params(params);
    let tau_max = settings.tau_max.unwrap_or_else(|| {
        if roots.omega1 == 0.0 {
            MIN_SPAN
        } else {
            (10.0 * 2.0 * PI / roots.omega1.abs()).max(MIN_SPAN)
        }
    });
    let stride = ((settings.sample_every / settings.dt).floor() as usize).max(1);
    let traj = integrate_sampled(&state, &field, ELECTRON_CHARGE, tau_max, settings.dt, stride)?;
    let init = if settings.resolve_slow_mode && roots.omega1 != 0.0 {
        roots.as_array()
    } else {
        [0.0, roots.omega2, roots.omega3]
    };
    fit_complex_modes(&traj.taus(), &traj.planar_velocity(), &init)
}

/// Shift table with every cell measured by a fit.
///
/// Quantum cells come from sinusoid fits of sampled ⟨r⟩(t); classical cells
/// from fits of integrated BZ trajectories (one run per spin yields both the
/// particle and antiparticle cell).
pub fn fitted_shift_table(
    approach: Approach,
    params: &DimensionlessParams,
    settings: &ClassicalFitSettings,
) -> Result<ShiftTable> {
    params.validate()?;
    let base = DimensionlessParams::with_epsilon(params.epsilon);
    match approach {
        Approach::Quantum => ShiftTable::from_fn(approach, params.epsilon, ShiftSource::Fitted, |c, s| {
            let traj = Trajectory::sample(&base.with_charge(c).with_spin(s), DEFAULT_T_MAX, DEFAULT_DT)?;
            Ok(extract_frequency(&traj)?.omega - OMEGA_ZBW)
        }),
        _ => {
            let mut fits = Vec::with_capacity(2);
            for spin in [Spin::Up, Spin::Down] {
                fits.push(fit_classical_modes(&base.with_spin(spin), settings)?);
            }
            ShiftTable::from_fn(approach, params.epsilon, ShiftSource::Fitted, |c, s| {
                let fit = &fits[if s == Spin::Up { 0 } else { 1 }];
                Ok(match c {
                    Charge::Electron => fit.omegas[1] - OMEGA_ZBW,
                    Charge::Positron => fit.omegas[2] + OMEGA_ZBW,
                })
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyCell {
    pub charge: Charge,
    pub spin: Spin,
    pub quantum: f64,
    pub classical: f64,
    pub absolute: f64,
    /// |classical − quantum|/|quantum| (0 when both vanish).
    pub relative: f64,
    /// The same comparison on frequency magnitudes, |ω| − ω_zbw, which
    /// flips the sign of the classical antiparticle shifts.
    pub magnitude_relative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyReport {
    pub epsilon: f64,
    /// Quantum closed forms against exact cubic roots.
    pub formula: Vec<DiscrepancyCell>,
    /// Fitted trajectories from both engines, when requested.
    pub end_to_end: Option<Vec<DiscrepancyCell>>,
}

fn relative(diff: f64, reference: f64) -> f64 {
    if diff == 0.0 {
        0.0
    } else {
        diff / reference.abs()
    }
}

fn compare(quantum: &ShiftTable, classical: &ShiftTable) -> Vec<DiscrepancyCell> {
    CELLS
        .iter()
        .map(|&(charge, spin)| {
            let q = quantum.get(charge, spin);
            let c = classical.get(charge, spin);
            let c_mag = match charge {
                Charge::Electron => c,
                Charge::Positron => -c,
            };
            DiscrepancyCell {
                charge,
                spin,
                quantum: q,
                classical: c,
                absolute: (c - q).abs(),
                relative: relative((c - q).abs(), q),
                magnitude_relative: relative((c_mag - q).abs(), q),
            }
        })
        .collect()
}

/// Formula-level comparison of the quantum and exact classical shifts.
pub fn discrepancy_report(params: &DimensionlessParams) -> Result<DiscrepancyReport> {
    let q = shift_table(Approach::Quantum, params)?;
    let c = shift_table(Approach::ClassicalExact, params)?;
    Ok(DiscrepancyReport {
        epsilon: params.epsilon,
        formula: compare(&q, &c),
        end_to_end: None,
    })
}

/// As [`discrepancy_report`], adding the comparison of fitted trajectories.
pub fn discrepancy_report_end_to_end(
    params: &DimensionlessParams,
    settings: &ClassicalFitSettings,
) -> Result<DiscrepancyReport> {
    let mut report = discrepancy_report(params)?;
    let q = fitted_shift_table(Approach::Quantum, params, settings)?;
    let c = fitted_shift_table(Approach::ClassicalExact, params, settings)?;
    report.end_to_end = Some(compare(&q, &c));
    Ok(report)
}
