//! Batch sweep execution and the combined launch+boost cost analysis.

use super::{PhaseKind, ScenarioSpec};
use crate::error::{Error, Result};
use crate::exec::{par_map, Parallelism};
use crate::opt::{
    constant_thrust_baseline, solve, OptimizationResult, SolverStatus, TerminalComponent,
};
use serde::Serialize;

/// Which scenario field a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    /// Water-exit pitch angle [deg]: launch terminal attitude, boost initial
    /// attitude, or both for combined missions.
    ThetaExit,
    /// Launch depth z0 [m].
    InitialDepth,
    /// Final time [s].
    FinalTime,
    /// Terminal forward velocity [m/s].
    TerminalForwardVelocity,
    /// Boost terminal altitude [m].
    TerminalAltitude,
}

impl SweepParameter {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepParameter::ThetaExit => "theta_exit",
            SweepParameter::InitialDepth => "z0",
            SweepParameter::FinalTime => "tf",
            SweepParameter::TerminalForwardVelocity => "uf",
            SweepParameter::TerminalAltitude => "altitude_f",
        }
    }
}

/// A parsed sweep: base scenario, swept parameter and the value list.
#[derive(Debug)]
pub struct SweepSpec {
    pub base: ScenarioSpec,
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

impl SweepSpec {
    /// The base scenario with the swept parameter applied.
    pub fn scenario_for(&self, value: f64) -> Result<ScenarioSpec> {
        let mut spec = self.base.clone();
        spec.name = format!("{}_{}{}", self.base.name, self.parameter.as_str(), value);
        match (self.parameter, spec.phase) {
            (SweepParameter::ThetaExit, PhaseKind::Launch) => {
                spec.terminal[3] = TerminalComponent::Fixed(value.to_radians());
            }
            (SweepParameter::ThetaExit, PhaseKind::Boost) => {
                spec.initial[3] = value.to_radians();
            }
            (SweepParameter::ThetaExit, PhaseKind::Combined) => {
                spec.combined.as_mut().expect("combined fields").theta_exit_deg = value;
            }
            (SweepParameter::InitialDepth, PhaseKind::Launch) => {
                spec.initial[4] = value;
            }
            (SweepParameter::FinalTime, PhaseKind::Launch | PhaseKind::Boost) => {
                let ratio = value / spec.dt;
                if (ratio - ratio.round()).abs() > 1e-9 {
                    return Err(Error::parameter(format!(
                        "swept t_f {value} is not a multiple of dt {}",
                        spec.dt
                    )));
                }
                spec.t_f = value;
            }
            (SweepParameter::TerminalForwardVelocity, PhaseKind::Launch | PhaseKind::Boost) => {
                spec.terminal[0] = TerminalComponent::Fixed(value);
            }
            (SweepParameter::TerminalAltitude, PhaseKind::Boost) => {
                spec.terminal[4] = TerminalComponent::Fixed(-value);
            }
            (parameter, _) => {
                return Err(Error::parameter(format!(
                    "sweep parameter '{}' does not apply to this scenario phase",
                    parameter.as_str()
                )));
            }
        }
        if spec.phase != PhaseKind::Combined {
            spec.build_problem()?;
        }
        Ok(spec)
    }
}

/// One solved sweep point.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub value: f64,
    /// Effort cost; NaN when the row failed outright.
    pub cost: f64,
    pub status: String,
    pub max_residual: f64,
    /// Optimized free scalars in display units.
    pub free_scalars: Vec<(String, f64)>,
}

/// Sweep output: one row per requested value, in input order.
#[derive(Debug, Clone, Serialize)]
pub struct SweepTable {
    pub parameter: String,
    pub rows: Vec<SweepRow>,
}

fn solve_row(spec: &ScenarioSpec) -> Result<(OptimizationResult, Vec<(String, f64)>)> {
    let problem = spec.build_problem()?;
    let result = solve(&problem, &spec.solver)?;

    // Optimality oracle: a fully feasible constant-thrust program bounds
    // the optimum from above.
    if result.status == SolverStatus::Converged {
        if let Ok(baseline) =
            constant_thrust_baseline(&problem, 0, spec.solver.eps_constraint)
        {
            if baseline.feasible && result.cost > baseline.cost * 1.01 {
                return Err(Error::parameter(format!(
                    "optimal cost {:.6e} exceeds the feasible constant-thrust baseline {:.6e}",
                    result.cost, baseline.cost
                )));
            }
        }
    }

    let display = result
        .free_scalars
        .iter()
        .map(|(label, value)| (label.clone(), spec.display_free_scalar(label, *value)))
        .collect();
    Ok((result, display))
}

/// Run one solve per sweep value. Rows are independent; with a parallel
/// mode they run concurrently and are still reported in input order.
/// Per-row failures land in the row's status column without aborting the
/// sweep.
pub fn run_sweep(sweep: &SweepSpec, mode: Parallelism) -> SweepTable {
    let rows = par_map(mode, &sweep.values, |&value| match sweep.scenario_for(value) {
        Ok(spec) => match solve_row(&spec) {
            Ok((result, free_scalars)) => SweepRow {
                value,
                cost: result.cost,
                status: result.status.to_string(),
                max_residual: result.max_residual,
                free_scalars,
            },
            Err(err) => SweepRow {
                value,
                cost: f64::NAN,
                status: format!("error: {err}"),
                max_residual: f64::NAN,
                free_scalars: Vec::new(),
            },
        },
        Err(err) => SweepRow {
            value,
            cost: f64::NAN,
            status: format!("error: {err}"),
            max_residual: f64::NAN,
            free_scalars: Vec::new(),
        },
    });
    SweepTable {
        parameter: sweep.parameter.as_str().to_string(),
        rows,
    }
}

/// One angle of the combined launch+boost analysis.
#[derive(Debug, Clone, Serialize)]
pub struct CombinedRow {
    pub label: String,
    pub theta_exit_deg: f64,
    pub launch_cost: f64,
    pub boost_cost: f64,
    pub total_cost: f64,
    pub launch_status: String,
    pub boost_status: String,
}

/// Launch and boost costs per water-exit angle with their total; the
/// minimum-total row is flagged, and a vertical-launch comparison row may
/// be appended.
#[derive(Debug, Clone, Serialize)]
pub struct CombinedCostReport {
    pub rows: Vec<CombinedRow>,
    /// Index of the minimum-total row among converged rows.
    pub minimum_index: Option<usize>,
}

impl CombinedCostReport {
    fn recompute_minimum(&mut self) {
        self.minimum_index = self
            .rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.launch_status == "converged" && r.boost_status == "converged")
            .min_by(|(_, a), (_, b)| a.total_cost.total_cmp(&b.total_cost))
            .map(|(i, _)| i);
    }
}

/// Combine per-angle launch and boost costs into the total-cost report.
/// The two angle sets must align exactly.
pub fn combined_cost(
    launch: &[(f64, f64, SolverStatus)],
    boost: &[(f64, f64, SolverStatus)],
) -> Result<CombinedCostReport> {
    if launch.len() != boost.len() || launch.is_empty() {
        return Err(Error::Alignment(format!(
            "launch rows ({}) and boost rows ({}) do not align",
            launch.len(),
            boost.len()
        )));
    }
    let mut rows = Vec::with_capacity(launch.len());
    for ((angle_l, cost_l, status_l), (angle_b, cost_b, status_b)) in
        launch.iter().zip(boost.iter())
    {
        if (angle_l - angle_b).abs() > 1e-9 {
            return Err(Error::Alignment(format!(
                "water-exit angles differ: {angle_l} vs {angle_b}"
            )));
        }
        rows.push(CombinedRow {
            label: "horizontal".into(),
            theta_exit_deg: *angle_l,
            launch_cost: *cost_l,
            boost_cost: *cost_b,
            total_cost: cost_l + cost_b,
            launch_status: status_l.to_string(),
            boost_status: status_b.to_string(),
        });
    }
    let mut report = CombinedCostReport {
        rows,
        minimum_index: None,
    };
    report.recompute_minimum();
    Ok(report)
}

/// Run a combined-mission sweep: per angle, solve the launch and boost legs
/// and total their costs; optionally append the vertical-launch comparison
/// row (vertical leg + 90 degree boost leg).
pub fn run_combined_sweep(sweep: &SweepSpec, mode: Parallelism) -> Result<CombinedCostReport> {
    if sweep.base.phase != PhaseKind::Combined {
        return Err(Error::parameter(
            "combined sweep requires a combined-phase base scenario",
        ));
    }
    if sweep.parameter != SweepParameter::ThetaExit {
        return Err(Error::parameter(
            "combined sweeps vary theta_exit; other parameters apply to single phases",
        ));
    }

    let leg_costs = |spec: ScenarioSpec| -> (f64, SolverStatus) {
        match spec
            .build_problem()
            .and_then(|problem| solve(&problem, &spec.solver))
        {
            Ok(result) => (result.cost, result.status),
            Err(_) => (f64::NAN, SolverStatus::Infeasible),
        }
    };

    let per_angle: Vec<((f64, f64, SolverStatus), (f64, f64, SolverStatus))> =
        par_map(mode, &sweep.values, |&angle| {
            let launch = sweep
                .base
                .launch_leg(angle)
                .map(&leg_costs)
                .unwrap_or((f64::NAN, SolverStatus::Infeasible));
            let boost = sweep
                .base
                .boost_leg(angle)
                .map(&leg_costs)
                .unwrap_or((f64::NAN, SolverStatus::Infeasible));
            (
                (angle, launch.0, launch.1),
                (angle, boost.0, boost.1),
            )
        });
    let launch_rows: Vec<_> = per_angle.iter().map(|(l, _)| *l).collect();
    let boost_rows: Vec<_> = per_angle.iter().map(|(_, b)| *b).collect();
    let mut report = combined_cost(&launch_rows, &boost_rows)?;

    let combined = sweep.base.combined.as_ref().expect("combined checked");
    if combined.vertical_comparison {
        let vertical = leg_costs(sweep.base.vertical_leg()?);
        let boost_90 = leg_costs(sweep.base.boost_leg(90.0)?);
        report.rows.push(CombinedRow {
            label: "vertical".into(),
            theta_exit_deg: 90.0,
            launch_cost: vertical.0,
            boost_cost: boost_90.0,
            total_cost: vertical.0 + boost_90.0,
            launch_status: vertical.1.to_string(),
            boost_status: boost_90.1.to_string(),
        });
        report.recompute_minimum();
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn status(s: SolverStatus) -> SolverStatus {
        s
    }

    #[test]
    fn combined_totals_are_componentwise_sums() {
        let launch = vec![
            (45.0, 1.0, status(SolverStatus::Converged)),
            (55.0, 2.0, status(SolverStatus::Converged)),
        ];
        let boost = vec![
            (45.0, 10.0, status(SolverStatus::Converged)),
            (55.0, 5.0, status(SolverStatus::Converged)),
        ];
        let report = combined_cost(&launch, &boost).unwrap();
        assert_eq!(report.rows[0].total_cost, 11.0);
        assert_eq!(report.rows[1].total_cost, 7.0);
        assert_eq!(report.minimum_index, Some(1));
    }

    #[test]
    fn mismatched_angle_sets_are_rejected() {
        let launch = vec![(45.0, 1.0, status(SolverStatus::Converged))];
        let boost = vec![(55.0, 1.0, status(SolverStatus::Converged))];
        assert!(combined_cost(&launch, &boost).is_err());
        assert!(combined_cost(&launch, &[]).is_err());
    }

    #[test]
    fn non_converged_rows_do_not_win_the_minimum() {
        let launch = vec![
            (45.0, 0.1, status(SolverStatus::Infeasible)),
            (55.0, 2.0, status(SolverStatus::Converged)),
        ];
        let boost = vec![
            (45.0, 0.1, status(SolverStatus::Converged)),
            (55.0, 5.0, status(SolverStatus::Converged)),
        ];
        let report = combined_cost(&launch, &boost).unwrap();
        assert_eq!(report.minimum_index, Some(1));
    }
}
