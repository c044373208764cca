//! CSV emission. Every file starts with the resolved configuration as
//! `# key = value` lines, followed by a header row.

use std::io::Write;

use crate::dynamics::{Observables, Trajectory};
use crate::error::{Error, Result};

use super::run::{DeviationRow, SweepRow};
use super::Scenario;

/// Nine significant digits in scientific notation.
pub fn format_float(x: f64) -> String {
    format!("{x:.8e}")
}

fn io_err(e: std::io::Error) -> Error {
    Error::io("<output>", e)
}

pub fn write_provenance(w: &mut impl Write, s: &Scenario) -> Result<()> {
    for (k, v) in s.to_config_lines() {
        writeln!(w, "# {k} = {v}").map_err(io_err)?;
    }
    Ok(())
}

fn write_row(w: &mut impl Write, fields: &[String]) -> Result<()> {
    writeln!(w, "{}", fields.join(",")).map_err(io_err)
}

pub fn write_time_series_csv(w: &mut impl Write, s: &Scenario, traj: &Trajectory) -> Result<()> {
    write_provenance(w, s)?;
    writeln!(w, "{}", Observables::COLUMNS.join(",")).map_err(io_err)?;
    for row in &traj.rows {
        write_row(w, &row.values().map(format_float))?;
    }
    Ok(())
}

fn unique_field(unique: Option<bool>) -> String {
    match unique {
        Some(true) => "true".into(),
        Some(false) => "false".into(),
        None => "failed".into(),
    }
}

pub fn write_sweep_csv(w: &mut impl Write, s: &Scenario, rows: &[SweepRow]) -> Result<()> {
    write_provenance(w, s)?;
    writeln!(w, "gamma,kappa,C,fidelity,residual,unique").map_err(io_err)?;
    for r in rows {
        write_row(
            w,
            &[
                format_float(r.gamma),
                format_float(r.kappa),
                r.cooperativity.map(format_float).unwrap_or_default(),
                format_float(r.fidelity),
                format_float(r.residual),
                unique_field(r.unique),
            ],
        )?;
    }
    Ok(())
}

pub fn write_deviation_csv(w: &mut impl Write, s: &Scenario, rows: &[DeviationRow]) -> Result<()> {
    write_provenance(w, s)?;
    writeln!(w, "delta_over_Delta,fidelity,residual,unique").map_err(io_err)?;
    for r in rows {
        write_row(
            w,
            &[
                format_float(r.delta_over_delta),
                format_float(r.fidelity),
                format_float(r.residual),
                unique_field(r.unique),
            ],
        )?;
    }
    Ok(())
}

/// Recovers the configuration from a CSV provenance block.
pub fn provenance_config(csv: &str) -> String {
    csv.lines().map_while(|l| l.strip_prefix("# ")).map(|l| format!("{l}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{parse_config, ScenarioId};

    #[test]
    fn float_format() {
        assert_eq!(format_float(0.98), "9.80000000e-1");
        assert_eq!(format_float(0.0), "0.00000000e0");
        assert_eq!(format_float(-12345.6789), "-1.23456789e4");
        assert_eq!(format_float(f64::NAN), "NaN");
    }

    #[test]
    fn provenance_round_trip() {
        let mut s = crate::scenario::Scenario::defaults(ScenarioId::Fig3);
        s.params.fock_cutoff = 3;
        let mut buf = Vec::new();
        write_time_series_csv(&mut buf, &s, &Trajectory::default()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("# fock_cutoff = 3\n"));
        assert!(text.ends_with("t,purity,fidelity_S,p_gg,p_T,p_S,p_ee,p_rr,n_photon\n"));
        assert!(!text.contains('\r'));
        assert_eq!(parse_config(&provenance_config(&text)).unwrap(), s);
    }

    #[test]
    fn sweep_rows() {
        let s = crate::scenario::Scenario::defaults(ScenarioId::Fig4a);
        let rows = [
            SweepRow {
                gamma: 0.2,
                kappa: 0.0,
                cooperativity: None,
                fidelity: 0.5,
                residual: 1e-15,
                unique: Some(true),
            },
            SweepRow {
                gamma: 0.2,
                kappa: 0.1,
                cooperativity: Some(50.0),
                fidelity: f64::NAN,
                residual: f64::NAN,
                unique: None,
            },
        ];
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &s, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(body[0], "gamma,kappa,C,fidelity,residual,unique");
        assert_eq!(body[1], "2.00000000e-1,0.00000000e0,,5.00000000e-1,1.00000000e-15,true");
        assert_eq!(body[2], "2.00000000e-1,1.00000000e-1,5.00000000e1,NaN,NaN,failed");
    }
}
