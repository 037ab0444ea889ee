//! CSV and JSON export of trajectories, optimization results, sweep tables
//! and combined cost reports.
//!
//! Numeric cells use Rust's shortest round-trip float formatting, so a
//! re-read reproduces the exact values and repeated runs of a deterministic
//! pipeline produce byte-identical files.

use super::sweep::{CombinedCostReport, SweepTable};
use super::ScenarioSpec;
use crate::error::{Error, Result};
use crate::opt::OptimizationResult;
use crate::sim::{EventKind, Trajectory};
use serde::Serialize;
use std::io::Write;
use std::path::Path;

/// Where the longitudinal quantities live in a recorded state vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateLayout {
    /// [u, w, q, theta, z]
    Longitudinal,
    /// Full rigid-body state (12 or more components; extras ignored).
    SixDof,
}

impl StateLayout {
    fn indices(&self) -> [usize; 5] {
        match self {
            StateLayout::Longitudinal => [0, 1, 2, 3, 4],
            StateLayout::SixDof => [0, 2, 4, 7, 11],
        }
    }
}

fn create(path: &Path) -> Result<std::io::BufWriter<std::fs::File>> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| Error::Io {
                path: parent.display().to_string(),
                source: e,
            })?;
        }
    }
    let file = std::fs::File::create(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    Ok(std::io::BufWriter::new(file))
}

fn finish(mut writer: std::io::BufWriter<std::fs::File>, path: &Path) -> Result<()> {
    writer.flush().map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

macro_rules! w {
    ($writer:expr, $path:expr, $($arg:tt)*) => {
        write!($writer, $($arg)*).map_err(|e| Error::Io {
            path: $path.display().to_string(),
            source: e,
        })?
    };
}

/// Trajectory CSV with the fixed column schema
/// `t,u,w,q,theta_deg,z,altitude,T,theta_T_deg,event`.
pub fn write_trajectory_csv(
    trajectory: &Trajectory,
    layout: StateLayout,
    path: &Path,
) -> Result<()> {
    let mut writer = create(path)?;
    w!(writer, path, "t,u,w,q,theta_deg,z,altitude,T,theta_T_deg,event\n");
    let [iu, iw, iq, itheta, iz] = layout.indices();
    for (row, time) in trajectory.times.iter().enumerate() {
        let state = &trajectory.states[row];
        let control = &trajectory.controls[row];
        let thrust = control.first().copied().unwrap_or(0.0);
        let deflection = control.get(1).copied().unwrap_or(0.0);
        let event = trajectory
            .events
            .iter()
            .find(|e| (e.time - time).abs() < 1e-12 && row + 1 == trajectory.times.len())
            .map(|e| match e.kind {
                EventKind::SurfaceCrossing => "surface_crossing",
                EventKind::FinalTime => "final_time",
            })
            .unwrap_or("");
        w!(
            writer,
            path,
            "{},{},{},{},{},{},{},{},{},{}\n",
            time,
            state[iu],
            state[iw],
            state[iq],
            state[itheta].to_degrees(),
            state[iz],
            -state[iz],
            thrust,
            deflection.to_degrees(),
            event
        );
    }
    finish(writer, path)
}

/// JSON document for one optimization result.
#[derive(Debug, Serialize)]
struct ResultDocument<'a> {
    scenario: &'a str,
    status: String,
    cost: f64,
    max_residual: f64,
    residuals: Vec<(String, f64)>,
    free_scalars: Vec<(String, f64)>,
    iterations: usize,
    outer_iterations: usize,
    objective_evaluations: usize,
    dt: f64,
    thrust: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    deflection_deg: Option<Vec<f64>>,
}

/// Serialize an optimization result (cost, status, residuals, control
/// samples, free scalars, iteration counts) as a single JSON document.
pub fn write_result_json(
    spec: &ScenarioSpec,
    result: &OptimizationResult,
    path: &Path,
) -> Result<()> {
    let thrust = result.program.channel(0);
    let deflection_deg = (result.program.channels > 1).then(|| {
        result
            .program
            .channel(1)
            .iter()
            .map(|d| d.to_degrees())
            .collect()
    });
    let document = ResultDocument {
        scenario: &spec.name,
        status: result.status.to_string(),
        cost: result.cost,
        max_residual: result.max_residual,
        residuals: result.residuals.clone(),
        free_scalars: result
            .free_scalars
            .iter()
            .map(|(label, value)| (label.clone(), spec.display_free_scalar(label, *value)))
            .collect(),
        iterations: result.iterations,
        outer_iterations: result.outer_iterations,
        objective_evaluations: result.objective_evaluations,
        dt: result.program.dt,
        thrust,
        deflection_deg,
    };
    let mut writer = create(path)?;
    serde_json::to_writer_pretty(&mut writer, &document).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: std::io::Error::new(std::io::ErrorKind::Other, e),
    })?;
    w!(writer, path, "\n");
    finish(writer, path)
}

/// Sweep table CSV: one row per point, header first, columns in declaration
/// order (`<parameter>,cost,status,max_residual[,<free scalars>...]`).
pub fn write_sweep_csv(table: &SweepTable, path: &Path) -> Result<()> {
    let mut writer = create(path)?;
    w!(writer, path, "{},cost,status,max_residual", table.parameter);
    let free_labels: Vec<String> = table
        .rows
        .iter()
        .find(|r| !r.free_scalars.is_empty())
        .map(|r| r.free_scalars.iter().map(|(l, _)| l.clone()).collect())
        .unwrap_or_default();
    for label in &free_labels {
        w!(writer, path, ",{label}");
    }
    w!(writer, path, "\n");
    for row in &table.rows {
        w!(
            writer,
            path,
            "{},{},{},{}",
            row.value,
            row.cost,
            row.status,
            row.max_residual
        );
        for label in &free_labels {
            let value = row
                .free_scalars
                .iter()
                .find(|(l, _)| l == label)
                .map(|(_, v)| *v)
                .unwrap_or(f64::NAN);
            w!(writer, path, ",{value}");
        }
        w!(writer, path, "\n");
    }
    finish(writer, path)
}

/// Combined launch+boost cost report CSV.
pub fn write_combined_csv(report: &CombinedCostReport, path: &Path) -> Result<()> {
    let mut writer = create(path)?;
    w!(
        writer,
        path,
        "label,theta_exit_deg,launch_cost,boost_cost,total_cost,launch_status,boost_status,is_minimum\n"
    );
    for (i, row) in report.rows.iter().enumerate() {
        w!(
            writer,
            path,
            "{},{},{},{},{},{},{},{}\n",
            row.label,
            row.theta_exit_deg,
            row.launch_cost,
            row.boost_cost,
            row.total_cost,
            row.launch_status,
            row.boost_status,
            report.minimum_index == Some(i)
        );
    }
    finish(writer, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{Event, EventKind};

    fn sample_trajectory() -> Trajectory {
        Trajectory {
            times: vec![0.0, 0.1, 0.2],
            states: vec![
                vec![10.0, 0.0, 0.0, 0.0, 100.0],
                vec![10.5, 0.1, 0.01, 0.005, 99.0],
                vec![11.0, 0.2, 0.02, 0.01, 98.0],
            ],
            controls: vec![vec![1000.0], vec![1100.0], vec![1200.0]],
            events: vec![Event {
                time: 0.2,
                kind: EventKind::FinalTime,
            }],
        }
    }

    #[test]
    fn trajectory_csv_schema_and_event_flag() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("traj.csv");
        write_trajectory_csv(&sample_trajectory(), StateLayout::Longitudinal, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,u,w,q,theta_deg,z,altitude,T,theta_T_deg,event"
        );
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), 3);
        assert!(rows[0].ends_with(',') || rows[0].ends_with(",,") == false);
        assert!(rows[2].ends_with("final_time"));
        // altitude column is -z
        let fields: Vec<&str> = rows[0].split(',').collect();
        assert_eq!(fields[5], "100");
        assert_eq!(fields[6], "-100");
    }

    #[test]
    fn csv_round_trip_preserves_values_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("traj.csv");
        let traj = sample_trajectory();
        write_trajectory_csv(&traj, StateLayout::Longitudinal, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        for (line, time) in text.lines().skip(1).zip(&traj.times) {
            let first: f64 = line.split(',').next().unwrap().parse().unwrap();
            assert_eq!(first, *time);
        }
    }

    #[test]
    fn empty_trajectory_writes_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.csv");
        let traj = Trajectory {
            times: vec![],
            states: vec![],
            controls: vec![],
            events: vec![],
        };
        write_trajectory_csv(&traj, StateLayout::Longitudinal, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 1);
    }

    #[test]
    fn unwritable_path_is_an_io_error_with_the_path() {
        // A path component that is a regular file cannot become a directory.
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("blocker");
        std::fs::write(&blocker, "x").unwrap();
        let traj = sample_trajectory();
        let err = write_trajectory_csv(
            &traj,
            StateLayout::Longitudinal,
            &blocker.join("deep/traj.csv"),
        )
        .unwrap_err();
        assert!(err.to_string().contains("blocker"), "{err}");
    }
}
