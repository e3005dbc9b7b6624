//! Trajectory CSV files and episode summaries.
//!
//! Trajectory files hold one row per integration step with the columns of
//! [`COLUMNS`], in that order. Floats are written in shortest round-trip
//! form, so identical episodes give byte-identical files.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;
use crate::simulation::{EpisodeSample, EpisodeSummary};

pub const COLUMNS: [&str; 10] = [
    "t",
    "s",
    "x",
    "y",
    "theta",
    "v",
    "omega",
    "delta_F",
    "pred_radius",
    "margin",
];

/// One CSV row. `delta_f` is the safety distance of the prediction set,
/// `pred_radius` its largest distance from the current path point, and
/// `margin` the free-space margin of the robot position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub s: f64,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub v: f64,
    pub omega: f64,
    #[serde(rename = "delta_F")]
    pub delta_f: f64,
    pub pred_radius: f64,
    pub margin: f64,
}

impl TrajectoryRow {
    pub fn from_sample<T: Scalar>(s: &EpisodeSample<T>) -> Self {
        let u = &s.state.unicycle;
        Self {
            t: s.t.as_f64(),
            s: s.state.s.as_f64(),
            x: u.position.x.as_f64(),
            y: u.position.y.as_f64(),
            theta: u.orientation.as_f64(),
            v: s.control.linear.as_f64(),
            omega: s.control.angular.as_f64(),
            delta_f: s.safety_distance.as_f64(),
            pred_radius: s.prediction_radius.as_f64(),
            margin: s.margin.as_f64(),
        }
    }

    fn values(&self) -> [f64; 10] {
        [
            self.t,
            self.s,
            self.x,
            self.y,
            self.theta,
            self.v,
            self.omega,
            self.delta_f,
            self.pred_radius,
            self.margin,
        ]
    }

    fn from_values(v: [f64; 10]) -> Self {
        let [t, s, x, y, theta, v_, omega, delta_f, pred_radius, margin] = v;
        Self {
            t,
            s,
            x,
            y,
            theta,
            v: v_,
            omega,
            delta_f,
            pred_radius,
            margin,
        }
    }
}

#[derive(Debug, Error)]
pub enum OutputError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("header mismatch in column {column}: expected `{expected}`, found `{found}`")]
    Header {
        column: usize,
        expected: &'static str,
        found: String,
    },
    #[error("row {row}: expected {expected} columns, found {found}")]
    Width { row: usize, expected: usize, found: usize },
    #[error("row {row}, column `{column}`: cannot parse `{value}` as a number")]
    Value {
        row: usize,
        column: &'static str,
        value: String,
    },
    #[error(transparent)]
    Summary(#[from] toml::ser::Error),
}

pub fn write_trajectory_csv<W: Write>(w: W, rows: &[TrajectoryRow]) -> Result<(), OutputError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(COLUMNS)?;
    for r in rows {
        out.write_record(r.values().iter().map(|v| v.to_string()))?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_samples_csv<T: Scalar, W: Write>(w: W, samples: &[EpisodeSample<T>]) -> Result<(), OutputError> {
    let rows: Vec<_> = samples.iter().map(TrajectoryRow::from_sample).collect();
    write_trajectory_csv(w, &rows)
}

/// Reads a trajectory CSV. Rows are numbered from 1 after the header.
pub fn read_trajectory_csv<R: Read>(r: R) -> Result<Vec<TrajectoryRow>, OutputError> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(r);
    let header = reader.headers()?.clone();
    for (column, expected) in COLUMNS.iter().enumerate() {
        let found = header.get(column).unwrap_or("");
        if found.trim() != *expected {
            return Err(OutputError::Header {
                column: column + 1,
                expected,
                found: found.to_string(),
            });
        }
    }
    if header.len() != COLUMNS.len() {
        return Err(OutputError::Width {
            row: 0,
            expected: COLUMNS.len(),
            found: header.len(),
        });
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = i + 1;
        if record.len() != COLUMNS.len() {
            return Err(OutputError::Width {
                row,
                expected: COLUMNS.len(),
                found: record.len(),
            });
        }
        let mut values = [0.0; 10];
        for (k, field) in record.iter().enumerate() {
            values[k] = field.trim().parse().map_err(|_| OutputError::Value {
                row,
                column: COLUMNS[k],
                value: field.to_string(),
            })?;
        }
        rows.push(TrajectoryRow::from_values(values));
    }
    Ok(rows)
}

/// Summary file contents: the episode summary as a TOML table.
pub fn summary_toml(summary: &EpisodeSummary) -> Result<String, OutputError> {
    Ok(toml::to_string(summary)?)
}

/// Several summaries as a TOML array of `[[episode]]` tables.
pub fn summaries_toml(summaries: &[EpisodeSummary]) -> Result<String, OutputError> {
    #[derive(Serialize)]
    struct Doc<'a> {
        episode: &'a [EpisodeSummary],
    }
    Ok(toml::to_string(&Doc { episode: summaries })?)
}

/// Fixed-width text table of the quantities compared across methods.
pub fn comparison_table(summaries: &[EpisodeSummary]) -> String {
    let mut out = format!(
        "{:<12} {:>6} {:>10} {:>11} {:>11} {:>10} {:>14} {:>9}\n",
        "method", "eps", "converged", "travel_s", "avg_speed", "min_margin", "eval_cost_us", "collision"
    );
    for s in summaries {
        out.push_str(&format!(
            "{:<12} {:>6.3} {:>10} {:>11.3} {:>11.4} {:>10.4} {:>14.3} {:>9}\n",
            s.method,
            s.headway_coeff,
            s.converged,
            s.travel_time,
            s.avg_speed,
            s.min_margin,
            s.governor_eval_cost * 1e6,
            s.collision
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(t: f64) -> TrajectoryRow {
        TrajectoryRow::from_values([t, 0.5 * t, 1.0, -2.0, 0.1, 0.2, -0.3, 0.4, 0.5, 0.6])
    }

    #[test]
    fn csv_round_trip_and_header() {
        let rows = vec![row(0.0), row(0.005), row(1.0 / 3.0)];
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("t,s,x,y,theta,v,omega,delta_F,pred_radius,margin\n"));
        assert_eq!(read_trajectory_csv(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn diagnostics_name_row_and_column() {
        let text = "t,s,x,y,theta,v,omega,delta_F,pred_radius,margin\n0,0,0,0,0,0,0,0,0,0\n1,0,0,abc,0,0,0,0,0,0\n";
        match read_trajectory_csv(text.as_bytes()) {
            Err(OutputError::Value { row, column, .. }) => assert_eq!((row, column), (2, "y")),
            other => panic!("unexpected {other:?}"),
        }
        let text = "t,s,x,y,theta,v,omega,delta,pred_radius,margin\n";
        assert!(matches!(
            read_trajectory_csv(text.as_bytes()),
            Err(OutputError::Header { column: 8, .. })
        ));
        let text = "t,s,x,y,theta,v,omega,delta_F,pred_radius,margin\n0,0,0\n";
        assert!(matches!(
            read_trajectory_csv(text.as_bytes()),
            Err(OutputError::Width { row: 1, found: 3, .. })
        ));
    }
}
