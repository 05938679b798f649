//! End-to-end acceptance checks. Runs without the libtest harness so each
//! criterion prints exactly one PASS/FAIL line; exits nonzero on any failure.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use zbw_core::bz::{
    bz_rhs, characteristic_cubic, free_solution, integrate, integrate_reduced, integrate_sampled,
    mode_initial_state, perturbative_roots, reduced_state_of, rest_initial_state, solve_cubic_exact,
    BZState, FieldTensor, RootMethod, ELECTRON_CHARGE, MIN_SPAN,
};
use zbw_core::dirac_packet::{exact_packet_coefficients, GaussianProfile, HAmplitudes, KFactors, MomentumPoint, PacketCoefficients};
use zbw_core::fitting::{fit_complex_modes, fit_sinusoid};
use zbw_core::quadrature::GridSize;
use zbw_core::quantum::{
    amplitude_coefficients, amplitude_coefficients_quadrature, extract_frequency,
    magnetic_moment_expectation, magnetic_moment_period_average, spin_interpretation, SpinMode,
    Trajectory, DEFAULT_DT, DEFAULT_T_MAX,
};
use zbw_core::symmetry::{
    cp_check, fit_classical_modes, fitted_shift_table, shift_table, Approach, ClassicalFitSettings,
    Verdict, CELLS,
};
use zbw_core::{Charge, DimensionlessParams, Result, Spin};

const EPSILONS: [f64; 3] = [-1e-2, -1e-3, -1e-4];
const OMEGA_ZBW: f64 = 2.0;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn cell(eps: f64, charge: Charge, spin: Spin) -> DimensionlessParams {
    DimensionlessParams::with_epsilon(eps).with_charge(charge).with_spin(spin)
}

/// ω_zbw ± ω_c with the sign of each (charge, spin) cell.
fn expected_quantum_frequency(eps: f64, charge: Charge, spin: Spin) -> f64 {
    let omega_c = -eps * OMEGA_ZBW;
    let sign = match (charge, spin) {
        (Charge::Electron, Spin::Up) | (Charge::Positron, Spin::Down) => 1.0,
        _ => -1.0,
    };
    OMEGA_ZBW + sign * omega_c
}

fn quantum_shifts() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut slowest = Duration::ZERO;
    for eps in EPSILONS {
        for (charge, spin) in CELLS {
            let start = Instant::now();
            let traj = Trajectory::sample(&cell(eps, charge, spin), DEFAULT_T_MAX, DEFAULT_DT)?;
            let est = extract_frequency(&traj)?;
            slowest = slowest.max(start.elapsed());
            worst = worst.max(rel(est.omega, expected_quantum_frequency(eps, charge, spin)));
        }
    }
    Ok(outcome(
        worst <= 1e-6 && slowest < Duration::from_secs(5),
        format!("max relative error {worst:.2e}, slowest case {slowest:.2?}"),
    ))
}

fn amplitude_integrals() -> Result<Outcome> {
    let mut worst_i = 0.0f64;
    let mut worst_j = 0.0f64;
    for r0 in [10.0, 100.0, 1000.0] {
        for spin in [Spin::Up, Spin::Down] {
            let p = DimensionlessParams::with_epsilon(-1e-3).with_spin(spin).with_r0(r0);
            let (i, j) = amplitude_coefficients(&p)?;
            let (iq, jq) = amplitude_coefficients_quadrature(&p, GridSize::default())?;
            let sign = if spin == Spin::Up { -1.0 } else { 1.0 };
            let oracle = -(8.0 * PI).powf(-0.5) / r0 * (1.0 + sign * 1e-3);
            worst_i = worst_i.max(rel(iq.value, i.value)).max(rel(i.value, oracle));
            worst_j = worst_j.max(j.value.abs()).max(jq.value.abs());
        }
    }
    Ok(outcome(
        worst_i <= 1e-6 && worst_j <= 1e-10,
        format!("I closed form vs quadrature {worst_i:.2e}, |J| {worst_j:.2e}"),
    ))
}

fn magnetic_moment() -> Result<Outcome> {
    let mut worst_avg = 0.0f64;
    let mut worst_freq = 0.0f64;
    for eps in EPSILONS {
        for spin in [Spin::Up, Spin::Down] {
            let p = cell(eps, Charge::Electron, spin);
            let avg = magnetic_moment_period_average(&p, 4096);
            worst_avg = worst_avg.max((avg + spin.sign() * 0.5).abs());
            let n = (DEFAULT_T_MAX / DEFAULT_DT).round() as usize;
            let t: Vec<f64> = (0..=n).map(|i| i as f64 * DEFAULT_DT).collect();
            let mu: Vec<f64> = t.iter().map(|&x| magnetic_moment_expectation(&p, x)[2]).collect();
            let fit = fit_sinusoid(&t, &mu)?;
            let want = expected_quantum_frequency(eps, Charge::Electron, spin);
            worst_freq = worst_freq.max(rel(fit.omega, want));
        }
    }
    Ok(outcome(
        worst_avg <= 1e-8 && worst_freq <= 1e-6,
        format!("period average error {worst_avg:.2e}, frequency error {worst_freq:.2e}"),
    ))
}

fn cubic_roots() -> Result<Outcome> {
    let start = Instant::now();
    let mut vieta = 0.0f64;
    let mut accurate = 0.0f64;
    let mut rough_lo = f64::INFINITY;
    let mut rough_hi = 0.0f64;
    for eps in EPSILONS {
        for spin in [Spin::Up, Spin::Down] {
            let p = DimensionlessParams::with_epsilon(eps).with_spin(spin);
            let c = characteristic_cubic(&p)?;
            let exact = solve_cubic_exact(&c)?;
            let (sum, pairs, product) = exact.vieta();
            // ω³ + c1ω + c0: Σω = 0, Σωᵢωⱼ = c1, ω₁ω₂ω₃ = −c0
            vieta = vieta
                .max(sum.abs() / c.c1.abs())
                .max(rel(pairs, c.c1 / c.c3))
                .max(rel(product, -c.c0 / c.c3));
            let acc = perturbative_roots(&p, RootMethod::Accurate)?;
            let bound = 5.0 * eps * eps * OMEGA_ZBW;
            accurate = accurate.max(
                (acc.omega2 - exact.omega2).abs().max((acc.omega3 - exact.omega3).abs()) / bound,
            );
            let rough = perturbative_roots(&p, RootMethod::Rough)?;
            let r = (rough.omega2 - exact.omega2).abs() / (eps.abs() * OMEGA_ZBW);
            rough_lo = rough_lo.min(r);
            rough_hi = rough_hi.max(r);
        }
    }
    let elapsed = start.elapsed();
    Ok(outcome(
        vieta <= 1e-10
            && accurate <= 1.0
            && rough_lo >= 0.45
            && rough_hi <= 0.55
            && elapsed < Duration::from_secs(1),
        format!(
            "Vieta {vieta:.1e}, accurate/bound {accurate:.3}, rough/(|eps|w) in [{rough_lo:.4}, {rough_hi:.4}], {elapsed:.2?}"
        ),
    ))
}

fn free_particle_error() -> Result<f64> {
    let mut s = BZState {
        x: [0.0; 4],
        pi: [1.0, 0.0, 0.0, 0.0],
        v: [1.0, 0.3, -0.1, 0.2],
        s: [[0.0; 4]; 4],
    };
    s.set_spin(1, 2, 0.5);
    s.set_spin(1, 0, 0.05);
    s.set_spin(3, 0, -0.02);
    let field = FieldTensor::uniform_z(0.0);
    let a0 = bz_rhs(&s, &field, ELECTRON_CHARGE).v;
    let traj = integrate(&s, &field, ELECTRON_CHARGE, MIN_SPAN, PI / 1000.0)?;
    let mut worst = 0.0f64;
    for sample in &traj.samples {
        let v = free_solution(&s.v, &a0, &s.pi, sample.tau);
        for k in 0..3 {
            worst = worst.max((sample.v[k] - v[k + 1]).abs());
        }
    }
    Ok(worst)
}

/// Largest relative error of the fitted (ω₁, ω₂, ω₃) against the exact roots.
fn spectral_error(p: &DimensionlessParams, rest: bool) -> Result<f64> {
    let roots = solve_cubic_exact(&characteristic_cubic(p)?)?;
    let fit = if rest {
        let settings = ClassicalFitSettings::default();
        let state = rest_initial_state(p)?;
        let tau_max = (10.0 * 2.0 * PI / roots.omega1.abs()).max(MIN_SPAN);
        let stride = (settings.sample_every / settings.dt).floor() as usize;
        let field = FieldTensor::from_params(p);
        let traj = integrate_sampled(&state, &field, ELECTRON_CHARGE, tau_max, settings.dt, stride)?;
        fit_complex_modes(&traj.taus(), &traj.planar_velocity(), &roots.as_array())?
    } else {
        fit_classical_modes(p, &ClassicalFitSettings::default())?
    };
    Ok(fit
        .omegas
        .iter()
        .zip(roots.as_array())
        .map(|(&w, r)| rel(w, r))
        .fold(0.0, f64::max))
}

/// Largest |v_x| mismatch between the full and reduced systems over ten
/// Zbw periods.
fn reduced_mismatch(p: &DimensionlessParams, state: &BZState) -> Result<f64> {
    let field = FieldTensor::from_params(p);
    let c = characteristic_cubic(p)?;
    let dt = PI / 400.0;
    let full = integrate_sampled(state, &field, ELECTRON_CHARGE, MIN_SPAN, dt, 4)?;
    let reduced = integrate_reduced(&reduced_state_of(state, &field, ELECTRON_CHARGE), &c, MIN_SPAN, dt, 4)?;
    let horizon = 10.0 * PI;
    Ok(full
        .samples
        .iter()
        .zip(&reduced)
        .take_while(|(s, _)| s.tau <= horizon + 1e-9)
        .map(|(s, (_, y))| (s.v[0] - y[0]).abs())
        .fold(0.0, f64::max))
}

fn classical_consistency() -> Result<Outcome> {
    let free = free_particle_error()?;

    let mut spectral = 0.0f64;
    for spin in [Spin::Up, Spin::Down] {
        spectral = spectral
            .max(spectral_error(&DimensionlessParams::with_epsilon(-1e-2).with_spin(spin), false)?)
            .max(spectral_error(&DimensionlessParams::with_epsilon(-1e-3).with_spin(spin), false)?)
            .max(spectral_error(&DimensionlessParams::with_epsilon(-1e-3).with_spin(spin), true)?);
    }

    let mut mismatch = 0.0f64;
    let zero = Complex64::new(0.0, 0.0);
    for spin in [Spin::Up, Spin::Down] {
        let rest = DimensionlessParams::with_epsilon(-1e-4).with_spin(spin);
        mismatch = mismatch.max(reduced_mismatch(&rest, &rest_initial_state(&rest)?)?);
        for eps in EPSILONS {
            let p = DimensionlessParams::with_epsilon(eps).with_spin(spin);
            for amps in [
                [Complex64::new(0.1, 0.0), zero, zero],
                [zero, Complex64::new(0.8, 0.0), zero],
                [zero, zero, Complex64::new(0.6, 0.0)],
            ] {
                mismatch = mismatch.max(reduced_mismatch(&p, &mode_initial_state(&p, amps, None)?)?);
            }
        }
    }
    Ok(outcome(
        free <= 1e-8 && spectral <= 1e-4 && mismatch <= 1e-6,
        format!("free {free:.2e}, spectral {spectral:.2e}, full vs reduced {mismatch:.2e}"),
    ))
}

fn cp_verdicts() -> Result<Outcome> {
    let mut quantum_ok = true;
    let mut quantum_ratio = 0.0f64;
    for eps in EPSILONS {
        let p = DimensionlessParams::with_epsilon(eps);
        let fitted = cp_check(&fitted_shift_table(Approach::Quantum, &p, &ClassicalFitSettings::default())?);
        let formula = cp_check(&shift_table(Approach::Quantum, &p)?);
        for cp in [fitted, formula] {
            quantum_ok &= cp.verdict == Verdict::CpRespected;
            quantum_ratio = quantum_ratio.max((cp.asymmetry_ratio - 1.0).abs());
        }
    }
    let p = DimensionlessParams::with_epsilon(-1e-4);
    let fitted = cp_check(&fitted_shift_table(
        Approach::ClassicalExact,
        &p,
        &ClassicalFitSettings::fast_modes(),
    )?);
    let formula = cp_check(&shift_table(Approach::ClassicalAccurate, &p)?);
    let classical_ok = fitted.verdict == Verdict::CpViolated
        && formula.verdict == Verdict::CpViolated
        && (fitted.asymmetry_ratio - 2.0).abs() <= 1e-3
        && (formula.asymmetry_ratio - 2.0).abs() <= 1e-6;
    Ok(outcome(
        quantum_ok && quantum_ratio <= 1e-6 && classical_ok,
        format!(
            "quantum ratio dev {quantum_ratio:.1e}; classical fitted ratio {:.6} ({}), formula {:.6}",
            fitted.asymmetry_ratio,
            fitted.verdict.as_str(),
            formula.asymmetry_ratio
        ),
    ))
}

fn spin_identities() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for eps in [-1e-2, -1e-3, -1e-4, -0.05, 0.0] {
        for spin in [Spin::Up, Spin::Down] {
            let p = cell(eps, Charge::Electron, spin);
            let pm = spin.sign();
            let v = spin_interpretation(&p, SpinMode::VariableSpin)?;
            let f = spin_interpretation(&p, SpinMode::FixedSpin)?;
            worst = worst
                .max((v.v_zbw - (1.0 - eps * eps)).abs())
                .max((v.s_zbw - 0.5 * (1.0 + pm * eps)).abs())
                .max((f.zeta - (1.0 - pm * eps / 2.0)).abs())
                .max((f.s_zbw - 0.5).abs());
        }
    }
    Ok(outcome(worst <= 1e-12, format!("max deviation {worst:.1e}")))
}

fn free_limit() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for (charge, spin) in CELLS {
        let p = cell(0.0, charge, spin);
        let est = extract_frequency(&Trajectory::sample_default(&p)?)?;
        worst = worst.max((est.omega - 2.0).abs()).max((est.amplitude - 0.5).abs());
        worst = worst.max((magnetic_moment_period_average(&p, 4096) + charge.conjugation_sign() * spin.sign() * 0.5).abs());
    }
    let roots = solve_cubic_exact(&characteristic_cubic(&DimensionlessParams::default())?)?;
    worst = worst
        .max(roots.omega1.abs())
        .max((roots.omega2 - 2.0).abs())
        .max((roots.omega3 + 2.0).abs());
    for approach in Approach::ALL {
        let t = shift_table(approach, &DimensionlessParams::default())?;
        worst = worst.max(t.entries.iter().map(|e| e.delta_omega.abs()).fold(0.0, f64::max));
    }
    let settings = ClassicalFitSettings {
        dt: PI / 800.0,
        ..ClassicalFitSettings::fast_modes()
    };
    let fit = fit_classical_modes(&DimensionlessParams::default(), &settings)?;
    worst = worst
        .max((fit.omegas[1] - 2.0).abs())
        .max((fit.omegas[2] + 2.0).abs());
    Ok(outcome(worst <= 1e-9, format!("max deviation from free values {worst:.2e}")))
}

fn field_departure(p: &MomentumPoint, eps: f64, f: f64) -> Result<f64> {
    let params = DimensionlessParams::with_epsilon(eps);
    let k = zbw_core::dirac_packet::k_factors(&params)?;
    let h = HAmplitudes::default();
    let at_field = exact_packet_coefficients(p, &k, &h, f)?;
    let free: PacketCoefficients = exact_packet_coefficients(p, &KFactors::uniform(0.5), &h, f)?;
    Ok(at_field.max_deviation(&free))
}

fn appendix_scaling() -> Result<Outcome> {
    let g = GaussianProfile::new(0.2);
    let points = [
        MomentumPoint::new(0.2, 0.7, 1.1),
        MomentumPoint::new(0.4, 2.1, 4.0),
        MomentumPoint::new(0.1, 1.4, 0.3),
    ];
    let eps: [f64; 5] = [-1e-4, -3e-4, -1e-3, -3e-3, -1e-2];
    let mut slopes = Vec::new();
    for p in &points {
        let f = g.value(p.pi);
        let xs: Vec<f64> = eps.iter().map(|e| e.abs().ln()).collect();
        let ys: Vec<f64> = eps
            .iter()
            .map(|&e| field_departure(p, e, f).map(f64::ln))
            .collect::<Result<_>>()?;
        let n = xs.len() as f64;
        let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        slopes.push(sxy / sxx);
    }
    // at zero field the exact weights approach the rough ones as π → 0
    let h = HAmplitudes::default();
    let k = KFactors::uniform(0.5);
    let small = MomentumPoint::new(1e-3, 0.9, 0.4);
    let f = g.value(small.pi);
    let rough_gap = exact_packet_coefficients(&small, &k, &h, f)?
        .max_deviation(&PacketCoefficients::rough(&small, 0.5, &h, f))
        / f;
    let pass = slopes.iter().all(|s| (s - 1.0).abs() <= 0.1) && rough_gap < 1e-5;
    Ok(outcome(
        pass,
        format!(
            "log-log slopes {:?}, zero-field gap to rough forms at pi=1e-3: {rough_gap:.1e}",
            slopes.iter().map(|s| format!("{s:.4}")).collect::<Vec<_>>()
        ),
    ))
}

type Criterion = (&'static str, fn() -> Result<Outcome>);

fn main() {
    let criteria: [Criterion; 9] = [
        ("quantum frequency shifts", quantum_shifts),
        ("amplitude coefficients", amplitude_integrals),
        ("magnetic moment", magnetic_moment),
        ("cubic roots", cubic_roots),
        ("classical dynamics consistency", classical_consistency),
        ("CP verdicts", cp_verdicts),
        ("spin interpretation identities", spin_identities),
        ("zero-field limits", free_limit),
        ("packet coefficient scaling", appendix_scaling),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let label = format!("criterion {}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str()) || label == *f || *f == (i + 1).to_string()) {
            continue;
        }
        let start = Instant::now();
        let (pass, detail) = match run() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "{label} {}: {name}: {detail} [{:.1?}]",
            if pass { "PASS" } else { "FAIL" },
            start.elapsed()
        );
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
