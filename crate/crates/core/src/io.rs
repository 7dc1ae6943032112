//! File formats: VPFIELD fields, trajectory exports, experiment CSVs.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{PlateError, Result};
use crate::experiments::ExperimentReport;
use crate::lattice::{Field, Lattice};
use crate::plate_solver::Trajectory;

/// 17 significant digits; round-trips any f64.
pub fn fmt_g17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes the "VPFIELD v1" text format: header `VPFIELD 1 <d> <N> <L>`, then
/// N^d lines of `<re> <im>` in row-major grid order.
pub fn write_field(field: &Field, mut out: impl Write) -> Result<()> {
    let lat = field.lattice();
    writeln!(
        out,
        "VPFIELD 1 {} {} {}",
        lat.dim(),
        lat.points_per_axis(),
        fmt_g17(lat.side_length())
    )?;
    for z in field.samples() {
        writeln!(out, "{} {}", fmt_g17(z.re), fmt_g17(z.im))?;
    }
    Ok(())
}

pub fn save_field(field: &Field, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_field(field, &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

pub fn read_field(reader: impl BufRead, path: &str) -> Result<Field> {
    let mut lines = reader.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| PlateError::FileFormat {
        path: path.to_string(),
        line: 1,
        reason: "empty file".to_string(),
    })?;
    let header = header?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 5 || parts[0] != "VPFIELD" || parts[1] != "1" {
        return Err(PlateError::FileFormat {
            path: path.to_string(),
            line: 1,
            reason: format!("expected header 'VPFIELD 1 <d> <N> <L>', got '{header}'"),
        });
    }
    let dim: usize = parts[2].parse().map_err(|_| PlateError::FileFormat {
        path: path.to_string(),
        line: 1,
        reason: format!("cannot parse dimension '{}'", parts[2]),
    })?;
    let n: usize = parts[3].parse().map_err(|_| PlateError::FileFormat {
        path: path.to_string(),
        line: 1,
        reason: format!("cannot parse grid size '{}'", parts[3]),
    })?;
    let l: f64 = parts[4].parse().map_err(|_| PlateError::FileFormat {
        path: path.to_string(),
        line: 1,
        reason: format!("cannot parse side length '{}'", parts[4]),
    })?;
    let lattice = Lattice::new(dim, n, l)?;
    let mut samples = Vec::with_capacity(lattice.num_points());
    for (idx, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let re: f64 = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| PlateError::FileFormat {
                path: path.to_string(),
                line: idx + 1,
                reason: "cannot parse real part".to_string(),
            })?;
        let im: f64 = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| PlateError::FileFormat {
                path: path.to_string(),
                line: idx + 1,
                reason: "cannot parse imaginary part".to_string(),
            })?;
        samples.push(Complex64::new(re, im));
    }
    if samples.len() != lattice.num_points() {
        return Err(PlateError::FileFormat {
            path: path.to_string(),
            line: samples.len() + 1,
            reason: format!(
                "expected {} samples, found {}",
                lattice.num_points(),
                samples.len()
            ),
        });
    }
    Field::new(lattice, samples)
}

pub fn load_field(path: &Path) -> Result<Field> {
    let file = fs::File::open(path).map_err(|e| {
        PlateError::InvalidParameter(format!("cannot open field file {}: {e}", path.display()))
    })?;
    read_field(BufReader::new(file), &path.display().to_string())
}

/// Writes one VPFIELD file per node plus `trajectory.csv` with lines
/// `node,t,file`, and the convergence history as `convergence.csv`
/// (`iteration,increment`).
pub fn export_trajectory(trajectory: &Trajectory, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut manifest = String::from("node,t,file\n");
    for (m, state) in trajectory.states.iter().enumerate() {
        let file = format!("node_{m:04}.vpf");
        save_field(state, &dir.join(&file))?;
        manifest.push_str(&format!(
            "{m},{},{file}\n",
            fmt_g17(trajectory.config.node_time(m))
        ));
    }
    fs::write(dir.join("trajectory.csv"), manifest)?;
    let mut conv = String::from("iteration,increment\n");
    for (i, inc) in trajectory.increments.iter().enumerate() {
        conv.push_str(&format!("{},{}\n", i + 1, fmt_g17(*inc)));
    }
    fs::write(dir.join("convergence.csv"), conv)?;
    Ok(())
}

/// Writes `<name>.csv` and `<name>.verdict.txt` into `dir`.
pub fn write_report(report: &ExperimentReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(format!("{}.csv", report.name)), report.csv())?;
    fs::write(
        dir.join(format!("{}.verdict.txt", report.name)),
        report.verdict_text(),
    )?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Field;
    use num_complex::Complex64;

    #[test]
    fn field_round_trips_bitwise() {
        let lat = Lattice::new(2, 8, 5.5).unwrap();
        let f = Field::from_fn(lat, |x| Complex64::new(x[0] * 0.1 - x[1], x[1] / 3.0)).unwrap();
        let mut buf = Vec::new();
        write_field(&f, &mut buf).unwrap();
        let back = read_field(buf.as_slice(), "mem").unwrap();
        assert_eq!(back.lattice(), f.lattice());
        assert_eq!(back.samples(), f.samples());
    }

    #[test]
    fn header_is_validated() {
        let bad = "VPFIELD 2 1 8 4.0\n";
        assert!(read_field(bad.as_bytes(), "mem").is_err());
        let short = "VPFIELD 1 1 8 4.0\n0.0 0.0\n";
        let err = read_field(short.as_bytes(), "mem").unwrap_err();
        assert!(err.to_string().contains("expected 8 samples"));
    }

    #[test]
    fn g17_formatting_round_trips() {
        for &x in &[0.1, 1.0 / 3.0, 6.02e23, -1.6e-35, 0.0] {
            let s = fmt_g17(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, x, "{s}");
        }
    }
}
