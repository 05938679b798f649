//! The `zbw` command-line tool.
//!
//! Each subcommand validates its flags into core parameter types, runs one
//! computation and writes CSV, JSON or SVG. Identical invocations produce
//! byte-identical output.

pub mod args;
pub mod error;
pub mod svg;

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};

use num_complex::Complex64;
use serde::Serialize;
use zbw_core::bz::{
    characteristic_cubic, integrate_sampled, perturbative_roots, rest_initial_state,
    solve_cubic_exact, FieldTensor, RootMethod, ELECTRON_CHARGE,
};
use zbw_core::dirac_packet::{landau_energy, LandauLevel};
use zbw_core::fitting::{fit_complex_modes, fit_sinusoid, ModeFit};
use zbw_core::io::{
    read_classical_csv, read_trajectory_csv, write_classical_csv, write_report_json,
    write_trajectory_csv, TrajectoryTable, CLASSICAL_HEADER, TRAJECTORY_HEADER,
};
use zbw_core::quantum::{
    amplitude_coefficients, extract_frequency, zbw_frequency, FrequencyEstimate, Trajectory,
};
use zbw_core::symmetry::{
    cp_check, discrepancy_report, discrepancy_report_end_to_end, fit_classical_modes, shift_table,
    Approach, ClassicalFitSettings, DiscrepancyReport, ShiftReport, CELLS,
};
use zbw_core::units::{epsilon_from_tesla, SIField};
use zbw_core::{Charge, DimensionlessParams, Spin};

pub use args::Cli;
use args::{
    ClassicalArgs, Command, CompareArgs, FieldArgs, FitArgs, Format, InitArg, LandauArgs,
    OutputArgs, QuantumArgs, RootsArgs, SweepArgs,
};
pub use error::{error_line, report_error, CliError};

type CliResult<T> = std::result::Result<T, CliError>;

pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Quantum(a) => quantum(a),
        Command::Classical(a) => classical(a),
        Command::Roots(a) => roots(a),
        Command::Landau(a) => landau(a),
        Command::Compare(a) => compare(a),
        Command::Sweep(a) => sweep(a),
        Command::Fit(a) => fit(a),
    }
}

/// ε from `--epsilon` or `--tesla` (zero when neither is given).
pub fn resolve_epsilon(field: &FieldArgs) -> CliResult<f64> {
    match (field.epsilon, field.tesla) {
        (Some(_), Some(_)) => Err(CliError::Config("give --epsilon or --tesla, not both".into())),
        (Some(e), None) => Ok(e),
        (None, Some(b)) => Ok(epsilon_from_tesla(SIField::new(b))?),
        (None, None) => Ok(0.0),
    }
}

fn require_positive(name: &str, v: f64) -> CliResult<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("--{name} must be positive and finite (got {v})")))
    }
}

fn format_or(output: &OutputArgs, default: Format, allowed: &[Format]) -> CliResult<Format> {
    let f = output.format.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(CliError::Config(format!(
            "format {f:?} is not available for this command"
        )))
    }
}

/// Writes through a buffered file or stdout.
fn emit(output: &OutputArgs, write: impl FnOnce(&mut dyn Write) -> CliResult<()>) -> CliResult<()> {
    match &output.out {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| CliError::Config(format!("cannot create {}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            write(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            write(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn emit_json<T: Serialize>(output: &OutputArgs, value: &T) -> CliResult<()> {
    emit(output, |w| Ok(write_report_json(value, w)?))
}

fn emit_text(output: &OutputArgs, text: &str) -> CliResult<()> {
    emit(output, |w| Ok(w.write_all(text.as_bytes())?))
}

#[derive(Serialize)]
struct QuantumSummary {
    params: DimensionlessParams,
    samples: usize,
    expected_omega: f64,
    fit: FrequencyEstimate,
    planar_amplitude_coefficient: f64,
}

fn quantum(a: &QuantumArgs) -> CliResult<()> {
    let params = DimensionlessParams::new(
        resolve_epsilon(&a.field)?,
        a.spin.into(),
        a.charge.into(),
        a.r0,
        a.phi0,
    )?;
    require_positive("dt", a.dt)?;
    require_positive("t-max", a.t_max)?;
    let format = format_or(&a.output, Format::Csv, &[Format::Csv, Format::Json, Format::Svg])?;
    let traj = Trajectory::sample(&params, a.t_max, a.dt)?;
    match format {
        Format::Csv => emit(&a.output, |w| Ok(write_trajectory_csv(&TrajectoryTable::from(&traj), w)?)),
        Format::Json => {
            let (i, _) = amplitude_coefficients(&params)?;
            emit_json(
                &a.output,
                &QuantumSummary {
                    params,
                    samples: traj.times.len(),
                    expected_omega: zbw_frequency(&params),
                    fit: extract_frequency(&traj)?,
                    planar_amplitude_coefficient: i.value,
                },
            )
        }
        Format::Svg => {
            let series = ["x", "y"]
                .iter()
                .enumerate()
                .map(|(c, name)| svg::Series {
                    label: format!("<{name}>"),
                    points: traj.times.iter().zip(&traj.positions).map(|(&t, p)| (t, p[c])).collect(),
                })
                .collect::<Vec<_>>();
            let title = format!(
                "{} spin {}, epsilon = {}",
                params.charge, params.spin, params.epsilon
            );
            emit_text(&a.output, &svg::line_chart(&title, "t", "position / lambda_c", &series))
        }
    }
}

#[derive(Serialize)]
struct ClassicalSummary {
    epsilon: f64,
    spin: Spin,
    exact_roots: [f64; 3],
    fitted_roots: Vec<f64>,
    amplitudes: Vec<[f64; 2]>,
    residual: f64,
}

fn classical(a: &ClassicalArgs) -> CliResult<()> {
    let params = DimensionlessParams::with_epsilon(resolve_epsilon(&a.field)?).with_spin(a.spin.into());
    params.validate()?;
    require_positive("dt", a.dt)?;
    require_positive("sample-every", a.sample_every)?;
    if let Some(t) = a.t_max {
        require_positive("t-max", t)?;
    }
    let format = format_or(&a.output, Format::Csv, &[Format::Csv, Format::Json, Format::Svg])?;
    let settings = ClassicalFitSettings {
        dt: a.dt,
        tau_max: a.t_max,
        sample_every: a.sample_every,
        ..ClassicalFitSettings::default()
    };
    let roots = solve_cubic_exact(&characteristic_cubic(&params)?)?;

    if format == Format::Json && a.init == InitArg::Modes {
        let fit = fit_classical_modes(&params, &settings)?;
        return emit_json(&a.output, &classical_summary(&params, roots.as_array(), &fit));
    }

    let state = match a.init {
        InitArg::Rest => rest_initial_state(&params)?,
        InitArg::Modes => {
            let amps = settings.amplitudes.map(|x| Complex64::new(x, 0.0));
            let offset = zbw_core::bz::mode_spin_offset(&params, amps)?;
            zbw_core::bz::mode_initial_state(&params, amps, Some(params.spin.s_z() - offset))?
        }
    };
    let tau_max = a.t_max.unwrap_or_else(|| {
        if roots.omega1 == 0.0 {
            zbw_core::bz::MIN_SPAN
        } else {
            (10.0 * 2.0 * PI / roots.omega1.abs()).max(zbw_core::bz::MIN_SPAN)
        }
    });
    let stride = ((a.sample_every / a.dt).floor() as usize).max(1);
    let field = FieldTensor::from_params(&params);
    let traj = integrate_sampled(&state, &field, ELECTRON_CHARGE, tau_max, a.dt, stride)?;
    match format {
        Format::Csv => emit(&a.output, |w| Ok(write_classical_csv(&traj.samples, w)?)),
        Format::Json => {
            let fit = fit_complex_modes(&traj.taus(), &traj.planar_velocity(), &roots.as_array())?;
            emit_json(&a.output, &classical_summary(&params, roots.as_array(), &fit))
        }
        Format::Svg => {
            let series = ["vx", "vy"]
                .iter()
                .enumerate()
                .map(|(c, name)| svg::Series {
                    label: name.to_string(),
                    points: traj.samples.iter().map(|s| (s.tau, s.v[c])).collect(),
                })
                .collect::<Vec<_>>();
            let title = format!("classical spin {}, epsilon = {}", params.spin, params.epsilon);
            emit_text(&a.output, &svg::line_chart(&title, "tau", "velocity / c", &series))
        }
    }
}

fn classical_summary(params: &DimensionlessParams, exact: [f64; 3], fit: &ModeFit) -> ClassicalSummary {
    ClassicalSummary {
        epsilon: params.epsilon,
        spin: params.spin,
        exact_roots: exact,
        fitted_roots: fit.omegas.clone(),
        amplitudes: fit.amplitudes.iter().map(|c| [c.re, c.im]).collect(),
        residual: fit.residual,
    }
}

#[derive(Serialize)]
struct Vieta {
    sum: f64,
    pairwise: f64,
    product: f64,
}

#[derive(Serialize)]
struct RootsReport {
    epsilon: f64,
    spin: Spin,
    method: &'static str,
    c1: f64,
    c0: f64,
    roots: [f64; 3],
    vieta: Vieta,
}

fn roots(a: &RootsArgs) -> CliResult<()> {
    let params = DimensionlessParams::with_epsilon(resolve_epsilon(&a.field)?).with_spin(a.spin.into());
    let format = format_or(&a.output, Format::Json, &[Format::Json, Format::Csv])?;
    let method: RootMethod = a.method.into();
    let r = perturbative_roots(&params, method)?;
    let c = characteristic_cubic(&params)?;
    let (sum, pairwise, product) = r.vieta();
    let name = match a.method {
        args::MethodArg::Exact => "exact",
        args::MethodArg::Rough => "rough",
        args::MethodArg::Accurate => "accurate",
    };
    let report = RootsReport {
        epsilon: params.epsilon,
        spin: params.spin,
        method: name,
        c1: c.c1 / c.c3,
        c0: c.c0 / c.c3,
        roots: r.as_array(),
        vieta: Vieta { sum, pairwise, product },
    };
    match format {
        Format::Json => emit_json(&a.output, &report),
        _ => emit(&a.output, |w| {
            let mut csv = csv::Writer::from_writer(w);
            csv.write_record(["epsilon", "spin", "method", "omega1", "omega2", "omega3"])?;
            let [w1, w2, w3] = report.roots;
            csv.write_record([
                params.epsilon.to_string(),
                params.spin.to_string(),
                name.to_string(),
                w1.to_string(),
                w2.to_string(),
                w3.to_string(),
            ])?;
            csv.flush()?;
            Ok(())
        }),
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

#[derive(Serialize)]
struct LandauReport {
    level: LandauLevel,
    energy: f64,
}

fn landau(a: &LandauArgs) -> CliResult<()> {
    let params = DimensionlessParams::with_epsilon(resolve_epsilon(&a.field)?);
    params.validate()?;
    let format = format_or(&a.output, Format::Json, &[Format::Json, Format::Csv])?;
    let spin: Spin = a.spin.into();
    let level = LandauLevel {
        n: a.n,
        l: a.l,
        p_z: a.pz,
        s_z: spin.s_z(),
        ce_b: params.omega_c(),
    };
    let energy = landau_energy(&level)?;
    match format {
        Format::Json => emit_json(&a.output, &LandauReport { level, energy }),
        _ => emit(&a.output, |w| {
            let mut csv = csv::Writer::from_writer(w);
            csv.write_record(["n", "l", "pz", "s_z", "ceB", "energy"])?;
            csv.write_record([
                level.n.to_string(),
                level.l.to_string(),
                level.p_z.to_string(),
                level.s_z.to_string(),
                level.ce_b.to_string(),
                energy.to_string(),
            ])?;
            csv.flush()?;
            Ok(())
        }),
    }
}

#[derive(Serialize)]
struct CompareReport {
    epsilon: f64,
    verdicts: std::collections::BTreeMap<String, String>,
    reports: Vec<ShiftReport>,
    discrepancy: DiscrepancyReport,
}

fn build_compare(params: &DimensionlessParams, with_fit: bool) -> CliResult<CompareReport> {
    let mut verdicts = std::collections::BTreeMap::new();
    let mut reports = Vec::new();
    for approach in Approach::ALL {
        let table = shift_table(approach, params)?;
        let cp = cp_check(&table);
        verdicts.insert(approach.to_string(), cp.verdict.as_str().to_string());
        reports.push(ShiftReport::new(&table, &cp));
    }
    let discrepancy = if with_fit {
        discrepancy_report_end_to_end(params, &ClassicalFitSettings::default())?
    } else {
        discrepancy_report(params)?
    };
    Ok(CompareReport {
        epsilon: params.epsilon,
        verdicts,
        reports,
        discrepancy,
    })
}

fn cell_label(charge: Charge, spin: Spin) -> String {
    let c = if charge == Charge::Electron { "e-" } else { "e+" };
    format!("{c} {spin}")
}

fn compare(a: &CompareArgs) -> CliResult<()> {
    let params = DimensionlessParams::with_epsilon(resolve_epsilon(&a.field)?);
    params.validate()?;
    let format = format_or(&a.output, Format::Json, &[Format::Json, Format::Csv, Format::Svg])?;
    let report = build_compare(&params, a.fit)?;
    match format {
        Format::Json => emit_json(&a.output, &report),
        Format::Csv => emit(&a.output, |w| write_rows(w, &rows_for(0, &report.reports))),
        Format::Svg => {
            let categories: Vec<String> = CELLS.iter().map(|&(c, s)| cell_label(c, s)).collect();
            let groups: Vec<(String, Vec<f64>)> = report
                .reports
                .iter()
                .map(|r| (r.approach.to_string(), r.cells.iter().map(|c| c.delta_omega).collect()))
                .collect();
            let title = format!("frequency shifts, epsilon = {}", params.epsilon);
            emit_text(&a.output, &svg::bar_chart(&title, "delta omega", &categories, &groups))
        }
    }
}

/// One row of a sweep table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    #[serde(skip)]
    order: (usize, Approach, usize),
    pub epsilon: f64,
    pub charge: Charge,
    pub spin: Spin,
    pub approach: Approach,
    pub delta_omega: f64,
}

fn rows_for(index: usize, reports: &[ShiftReport]) -> Vec<SweepRow> {
    reports
        .iter()
        .flat_map(|r| {
            r.cells.iter().enumerate().map(move |(k, c)| SweepRow {
                order: (index, r.approach, k),
                epsilon: r.epsilon,
                charge: c.charge,
                spin: c.spin,
                approach: r.approach,
                delta_omega: c.delta_omega,
            })
        })
        .collect()
}

fn write_rows(w: &mut dyn Write, rows: &[SweepRow]) -> CliResult<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["epsilon", "charge", "spin", "approach", "delta_omega"])?;
    for r in rows {
        csv.write_record([
            r.epsilon.to_string(),
            r.charge.to_string(),
            r.spin.to_string(),
            r.approach.to_string(),
            r.delta_omega.to_string(),
        ])?;
    }
    csv.flush()?;
    Ok(())
}

/// Shift rows for every (ε, approach, cell), computed on `jobs` threads and
/// ordered by (position in `epsilons`, approach, cell).
pub fn sweep_rows(epsilons: &[f64], approaches: &[Approach], jobs: Option<usize>) -> CliResult<Vec<SweepRow>> {
    use rayon::prelude::*;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        if n == 0 {
            return Err(CliError::Config("--jobs must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))?;
    let tasks: Vec<(usize, f64, Approach)> = epsilons
        .iter()
        .enumerate()
        .flat_map(|(i, &e)| approaches.iter().map(move |&a| (i, e, a)))
        .collect();
    let results: Vec<CliResult<Vec<SweepRow>>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(i, eps, approach)| {
                let table = shift_table(approach, &DimensionlessParams::with_epsilon(eps))?;
                let report = ShiftReport::new(&table, &cp_check(&table));
                Ok(rows_for(i, &[report]))
            })
            .collect()
    });
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    rows.sort_by_key(|r| r.order);
    Ok(rows)
}

fn sweep(a: &SweepArgs) -> CliResult<()> {
    let approaches = if a.approaches.is_empty() {
        Approach::ALL.to_vec()
    } else {
        a.approaches
            .iter()
            .map(|s| s.parse::<Approach>().map_err(CliError::from))
            .collect::<CliResult<Vec<_>>>()?
    };
    let format = format_or(&a.output, Format::Csv, &[Format::Csv, Format::Json])?;
    let rows = sweep_rows(&a.epsilons, &approaches, a.jobs)?;
    match format {
        Format::Json => emit_json(&a.output, &rows),
        _ => emit(&a.output, |w| write_rows(w, &rows)),
    }
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum FitReport {
    Quantum {
        samples: usize,
        fit: FrequencyEstimate,
    },
    Classical {
        samples: usize,
        omegas: Vec<f64>,
        residual: f64,
    },
}

fn fit(a: &FitArgs) -> CliResult<()> {
    let text = std::fs::read_to_string(&a.input)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", a.input.display())))?;
    format_or(&a.output, Format::Json, &[Format::Json])?;
    let header = text.lines().next().unwrap_or("").trim();
    let report = if header == TRAJECTORY_HEADER.join(",") {
        let table = read_trajectory_csv(text.as_bytes())?;
        let traj = Trajectory {
            times: table.times,
            positions: table.positions,
            meta: DimensionlessParams::default(),
        };
        FitReport::Quantum {
            samples: traj.times.len(),
            fit: extract_frequency(&traj)?,
        }
    } else if header == CLASSICAL_HEADER.join(",") {
        let samples = read_classical_csv(text.as_bytes())?;
        let t: Vec<f64> = samples.iter().map(|s| s.tau).collect();
        let (omegas, residual) = match a.epsilon {
            Some(eps) => {
                let params = DimensionlessParams::with_epsilon(eps).with_spin(a.spin.into());
                params.validate()?;
                let roots = solve_cubic_exact(&characteristic_cubic(&params)?)?;
                let w: Vec<Complex64> = samples.iter().map(|s| Complex64::new(s.v[0], s.v[1])).collect();
                let fit = fit_complex_modes(&t, &w, &roots.as_array())?;
                (fit.omegas, fit.residual)
            }
            None => {
                let vx: Vec<f64> = samples.iter().map(|s| s.v[0]).collect();
                let fit = fit_sinusoid(&t, &vx)?;
                (vec![fit.omega], fit.residual)
            }
        };
        FitReport::Classical {
            samples: t.len(),
            omegas,
            residual,
        }
    } else {
        return Err(CliError::Config(format!("unrecognised CSV header `{header}`")));
    };
    emit_json(&a.output, &report)
}
