//! CSV and JSON emission of trajectories and geodesic samples.
//!
//! Floats are printed with 17 significant digits, which round-trips every
//! `f64` exactly.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::FlowTrajectory;
use crate::metric::GeodesicSample;
use crate::simplex::{SimplexPoint, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// `x` with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn header(n: usize, extra: &[&str]) -> String {
    let mut h = String::from("t");
    for k in 0..n {
        let _ = write!(h, ",p_{k}");
    }
    for e in extra {
        h.push(',');
        h.push_str(e);
    }
    h
}

/// `t,p_0,…,p_{N-1},objective,gap`, one row per sample.
pub fn trajectory_csv(traj: &FlowTrajectory) -> Result<String> {
    if traj.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot emit an empty trajectory".into(),
        ));
    }
    let mut out = header(traj.dimension(), &["objective", "gap"]);
    out.push('\n');
    for i in 0..traj.len() {
        out.push_str(&fmt_f64(traj.times[i]));
        for w in traj.states[i].weights() {
            out.push(',');
            out.push_str(&fmt_f64(*w));
        }
        let _ = writeln!(
            out,
            ",{},{}",
            fmt_f64(traj.objective[i]),
            fmt_f64(traj.gap[i])
        );
    }
    Ok(out)
}

#[derive(Debug, Serialize, Deserialize)]
struct TrajectoryRow {
    t: f64,
    p: Vec<f64>,
    objective: f64,
    gap: f64,
}

/// JSON array of `{"t", "p", "objective", "gap"}` rows.
pub fn trajectory_json(traj: &FlowTrajectory) -> Result<String> {
    if traj.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot emit an empty trajectory".into(),
        ));
    }
    let rows: Vec<TrajectoryRow> = (0..traj.len())
        .map(|i| TrajectoryRow {
            t: traj.times[i],
            p: traj.states[i].weights().to_vec(),
            objective: traj.objective[i],
            gap: traj.gap[i],
        })
        .collect();
    Ok(serde_json::to_string_pretty(&rows)? + "\n")
}

/// Renders `traj` in `format`.
pub fn render_trajectory(traj: &FlowTrajectory, format: Format) -> Result<String> {
    match format {
        Format::Csv => trajectory_csv(traj),
        Format::Json => trajectory_json(traj),
    }
}

/// Writes `traj` to `path`, then reads the file back and checks that its gap
/// column is non-increasing.
pub fn emit_trajectory(traj: &FlowTrajectory, format: Format, path: &Path) -> Result<()> {
    let text = render_trajectory(traj, format)?;
    let mut file = std::fs::File::create(path)?;
    file.write_all(text.as_bytes())?;
    file.sync_all()?;
    check_emitted_gap(&std::fs::read_to_string(path)?, format)
}

/// Verifies that the gap column of an emitted trajectory never increases by
/// more than `tol_ode`.
pub fn check_emitted_gap(text: &str, format: Format) -> Result<()> {
    let gaps: Vec<f64> = match format {
        Format::Csv => parse_trajectory_csv(text)?.gap,
        Format::Json => serde_json::from_str::<Vec<TrajectoryRow>>(text)?
            .into_iter()
            .map(|r| r.gap)
            .collect(),
    };
    let slack = Tolerances::default().tol_ode;
    match gaps.windows(2).position(|w| w[1] > w[0] + slack) {
        Some(i) => Err(Error::InvalidArgument(format!(
            "gap increases at row {}",
            i + 1
        ))),
        None => Ok(()),
    }
}

fn parse_f64(field: &str, line: usize) -> Result<f64> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("line {line}: bad number {field:?}")))
}

/// Inverse of [`trajectory_csv`].
pub fn parse_trajectory_csv(text: &str) -> Result<FlowTrajectory> {
    let mut lines = text.lines();
    let head = lines
        .next()
        .ok_or_else(|| Error::Parse("missing header".into()))?;
    let cols: Vec<&str> = head.split(',').collect();
    if cols.len() < 5 || cols[0] != "t" || cols[cols.len() - 2..] != ["objective", "gap"] {
        return Err(Error::Parse(format!("unexpected header {head:?}")));
    }
    let n = cols.len() - 3;
    if head != header(n, &["objective", "gap"]) {
        return Err(Error::Parse(format!("unexpected header {head:?}")));
    }
    let tol = Tolerances::default();
    let mut traj = FlowTrajectory {
        times: Vec::new(),
        states: Vec::new(),
        objective: Vec::new(),
        gap: Vec::new(),
    };
    for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != n + 3 {
            return Err(Error::Parse(format!(
                "line {}: expected {} fields",
                i + 2,
                n + 3
            )));
        }
        let vals = fields
            .iter()
            .map(|f| parse_f64(f, i + 2))
            .collect::<Result<Vec<f64>>>()?;
        traj.times.push(vals[0]);
        traj.states
            .push(SimplexPoint::new(vals[1..=n].to_vec(), &tol)?);
        traj.objective.push(vals[n + 1]);
        traj.gap.push(vals[n + 2]);
    }
    if traj.is_empty() {
        return Err(Error::Parse("no rows".into()));
    }
    Ok(traj)
}

/// `t,p_0,…,p_{N-1}` rows of a sampled geodesic.
pub fn geodesic_csv(samples: &[GeodesicSample]) -> Result<String> {
    let first = samples.first().ok_or(Error::TooFewPoints)?;
    let mut out = header(first.weights.len(), &[]);
    out.push('\n');
    for s in samples {
        out.push_str(&fmt_f64(s.t));
        for w in &s.weights {
            out.push(',');
            out.push_str(&fmt_f64(*w));
        }
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::closed_form_trajectory;
    use crate::simplex::random_simplex;

    fn sample() -> FlowTrajectory {
        let p0 = random_simplex(3, 1, 1.0).unwrap();
        closed_form_trajectory(&p0, &[1.0, 0.4, 0.1], &[0.0, 0.5, 1.0, 2.0]).unwrap()
    }

    #[test]
    fn one_row_csv() {
        let p0 = SimplexPoint::uniform(2).unwrap();
        let traj = closed_form_trajectory(&p0, &[1.0, 0.0], &[0.0]).unwrap();
        let csv = trajectory_csv(&traj).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], "t,p_0,p_1,objective,gap");
        assert_eq!(
            lines[1],
            "0.0000000000000000e0,5.0000000000000000e-1,5.0000000000000000e-1,5.0000000000000000e-1,5.0000000000000000e-1"
        );
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let traj = sample();
        let back = parse_trajectory_csv(&trajectory_csv(&traj).unwrap()).unwrap();
        assert_eq!(back, traj);
    }

    #[test]
    fn json_mirrors_csv_fields() {
        let traj = sample();
        let v: serde_json::Value = serde_json::from_str(&trajectory_json(&traj).unwrap()).unwrap();
        let rows = v.as_array().unwrap();
        assert_eq!(rows.len(), traj.len());
        assert_eq!(rows[2]["t"], 1.0);
        assert_eq!(rows[2]["gap"].as_f64().unwrap(), traj.gap[2]);
        assert_eq!(rows[3]["p"].as_array().unwrap().len(), 3);
    }

    #[test]
    fn rejects_malformed_csv() {
        assert!(parse_trajectory_csv("").is_err());
        assert!(parse_trajectory_csv("t,p_0,p_1,objective\n").is_err());
        assert!(parse_trajectory_csv("t,p_0,p_1,objective,gap\n0,0.5,x,1,0\n").is_err());
    }

    #[test]
    fn emitted_gap_is_checked() {
        let bad = "t,p_0,p_1,objective,gap\n0,0.5,0.5,0.5,0.1\n1,0.5,0.5,0.5,0.2\n";
        assert!(check_emitted_gap(bad, Format::Csv).is_err());
        let json = trajectory_json(&sample()).unwrap();
        assert!(check_emitted_gap(&json, Format::Json).is_ok());
    }

    #[test]
    fn writes_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("traj.csv");
        emit_trajectory(&sample(), Format::Csv, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(parse_trajectory_csv(&text).unwrap(), sample());
    }
}
