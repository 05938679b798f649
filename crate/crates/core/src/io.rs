//! CSV and JSON interchange formats.
//!
//! Numbers are written in Rust's shortest round-trip form, so a written file
//! parses back to bit-identical values.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::bz::ClassicalSample;
use crate::error::{Error, Result};
use crate::quantum::Trajectory;
use crate::symmetry::ShiftReport;

pub const TRAJECTORY_HEADER: [&str; 4] = ["t", "x", "y", "z"];
pub const CLASSICAL_HEADER: [&str; 8] = ["tau", "x", "y", "z", "vx", "vy", "vz", "S12"];

/// Rows of a trajectory CSV.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrajectoryTable {
    pub times: Vec<f64>,
    pub positions: Vec<[f64; 3]>,
}

impl From<&Trajectory> for TrajectoryTable {
    fn from(t: &Trajectory) -> Self {
        Self {
            times: t.times.clone(),
            positions: t.positions.clone(),
        }
    }
}

fn check_header(found: &csv::StringRecord, expected: &[&str]) -> Result<()> {
    if found.iter().map(str::trim).eq(expected.iter().copied()) {
        Ok(())
    } else {
        Err(Error::Parse(format!(
            "expected header `{}`, found `{}`",
            expected.join(","),
            found.iter().collect::<Vec<_>>().join(",")
        )))
    }
}

fn parse_row<const N: usize>(record: &csv::StringRecord, line: usize) -> Result<[f64; N]> {
    if record.len() != N {
        return Err(Error::Parse(format!(
            "line {line}: expected {N} fields, found {}",
            record.len()
        )));
    }
    let mut out = [0.0; N];
    for (o, field) in out.iter_mut().zip(record.iter()) {
        let v: f64 = field
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("line {line}: `{field}` is not a number")))?;
        if !v.is_finite() {
            return Err(Error::Parse(format!("line {line}: non-finite value `{field}`")));
        }
        *o = v;
    }
    Ok(out)
}

fn read_rows<const N: usize, R: Read>(reader: R, header: &[&str]) -> Result<Vec<[f64; N]>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    check_header(rdr.headers()?, header)?;
    let mut rows = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for (i, rec) in rdr.records().enumerate() {
        let row: [f64; N] = parse_row(&rec?, i + 2)?;
        if row[0] <= last {
            return Err(Error::Parse(format!(
                "line {}: time {} does not increase",
                i + 2,
                row[0]
            )));
        }
        last = row[0];
        rows.push(row);
    }
    Ok(rows)
}

pub fn write_trajectory_csv<W: Write>(table: &TrajectoryTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRAJECTORY_HEADER)?;
    for (t, p) in table.times.iter().zip(&table.positions) {
        w.write_record([t, &p[0], &p[1], &p[2]].map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Parses `t,x,y,z` rows with strictly increasing t.
pub fn read_trajectory_csv<R: Read>(input: R) -> Result<TrajectoryTable> {
    let rows: Vec<[f64; 4]> = read_rows(input, &TRAJECTORY_HEADER)?;
    Ok(TrajectoryTable {
        times: rows.iter().map(|r| r[0]).collect(),
        positions: rows.iter().map(|r| [r[1], r[2], r[3]]).collect(),
    })
}

pub fn write_classical_csv<W: Write>(samples: &[ClassicalSample], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CLASSICAL_HEADER)?;
    for s in samples {
        let row = [s.tau, s.x[0], s.x[1], s.x[2], s.v[0], s.v[1], s.v[2], s.s12];
        w.write_record(row.map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Parses `tau,x,y,z,vx,vy,vz,S12` rows with strictly increasing tau.
pub fn read_classical_csv<R: Read>(input: R) -> Result<Vec<ClassicalSample>> {
    let rows: Vec<[f64; 8]> = read_rows(input, &CLASSICAL_HEADER)?;
    Ok(rows
        .into_iter()
        .map(|r| ClassicalSample {
            tau: r[0],
            x: [r[1], r[2], r[3]],
            v: [r[4], r[5], r[6]],
            s12: r[7],
        })
        .collect())
}

pub fn write_report_json<W: Write, T: Serialize>(report: &T, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, report)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Parses a shift report, requiring one cell per (charge, spin).
pub fn parse_report_json(text: &str) -> Result<ShiftReport> {
    let report: ShiftReport = serde_json::from_str(text)?;
    if report.cells.len() != 4 {
        return Err(Error::Parse(format!("expected 4 cells, found {}", report.cells.len())));
    }
    for (i, a) in report.cells.iter().enumerate() {
        if report.cells[..i]
            .iter()
            .any(|b| a.charge == b.charge && a.spin == b.spin)
        {
            return Err(Error::Parse(format!("duplicate cell {} {}", a.charge, a.spin)));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetry::{cp_check, shift_table, Approach};
    use crate::DimensionlessParams;

    #[test]
    fn trajectory_round_trip_is_exact() {
        let p = DimensionlessParams::with_epsilon(-1e-3).with_phi0(0.3);
        let traj = Trajectory::sample(&p, 10.0, 0.1).unwrap();
        let table = TrajectoryTable::from(&traj);
        let mut buf = Vec::new();
        write_trajectory_csv(&table, &mut buf).unwrap();
        assert!(buf.starts_with(b"t,x,y,z\n"));
        assert_eq!(read_trajectory_csv(buf.as_slice()).unwrap(), table);
    }

    #[test]
    fn classical_round_trip_is_exact() {
        let samples = vec![
            ClassicalSample { tau: 0.0, x: [0.0, 0.1, -0.2], v: [1.0, 0.0, 0.0], s12: 0.5 },
            ClassicalSample { tau: 0.25, x: [1e-17, 3.0, 2.5e300], v: [-0.3, 0.7, 0.0], s12: 0.4999 },
        ];
        let mut buf = Vec::new();
        write_classical_csv(&samples, &mut buf).unwrap();
        assert!(buf.starts_with(b"tau,x,y,z,vx,vy,vz,S12\n"));
        assert_eq!(read_classical_csv(buf.as_slice()).unwrap(), samples);
    }

    #[test]
    fn rejects_malformed_csv() {
        for bad in [
            "",
            "t,x,y\n0,0,0\n",
            "t,x,y,z\n0,0,0\n",
            "t,x,y,z\n0,0,0,abc\n",
            "t,x,y,z\n0,0,0,NaN\n",
            "t,x,y,z\n1,0,0,0\n1,0,0,0\n",
        ] {
            assert!(read_trajectory_csv(bad.as_bytes()).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn report_schema() {
        let p = DimensionlessParams::with_epsilon(-1e-3);
        let t = shift_table(Approach::ClassicalAccurate, &p).unwrap();
        let report = ShiftReport::new(&t, &cp_check(&t));
        let mut buf = Vec::new();
        write_report_json(&report, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["approach"], "classical_accurate");
        assert_eq!(v["cells"][0]["charge"], "electron");
        assert_eq!(v["cells"][0]["spin"], "up");
        assert_eq!(v["cp"]["verdict"], "cp_violated");
        assert_eq!(parse_report_json(&text).unwrap(), report);
    }

    #[test]
    fn rejects_incomplete_report() {
        let text = r#"{"epsilon":0,"approach":"quantum","cells":[],"cp":{"verdict":"cp_respected","asymmetry_ratio":1}}"#;
        assert!(parse_report_json(text).is_err());
    }
}
