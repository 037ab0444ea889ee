//! Fixed-step trajectory propagation with sampled control programs,
//! surface-crossing event detection, and the closed-loop pitch autopilot
//! verification for the boost phase.

pub mod autopilot;

pub use autopilot::{
    closed_loop_boost, synthesize_pitch_autopilot, BoostTrim, LqWeights, PitchAutopilot,
};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A differential system dx/dt = f(t, x, u).
pub trait Dynamics {
    fn state_dim(&self) -> usize;
    fn control_dim(&self) -> usize;
    fn derivative(&self, t: f64, x: &[f64], u: &[f64], out: &mut [f64]) -> Result<()>;
}

/// Supplies the control vector applied at time `t` in state `x`.
pub trait ControlSource {
    fn control_dim(&self) -> usize;
    fn eval(&self, t: f64, x: &[f64], out: &mut [f64]);
}

/// How sampled controls are reconstructed between grid points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ControlHold {
    /// Linear interpolation between neighboring samples.
    #[default]
    PiecewiseLinear,
    /// Hold the left sample over each interval.
    ZeroOrder,
}

/// Time-indexed control samples on a uniform grid of spacing `dt`.
/// Stored time-major: sample k holds `channels` values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlProgram {
    pub dt: f64,
    pub channels: usize,
    samples: Vec<f64>,
}

impl ControlProgram {
    pub fn new(dt: f64, channels: usize, samples: Vec<f64>) -> Result<Self> {
        if dt <= 0.0 || channels == 0 {
            return Err(Error::parameter("control program needs dt > 0 and channels > 0"));
        }
        if samples.is_empty() || samples.len() % channels != 0 {
            return Err(Error::parameter(format!(
                "sample buffer length {} is not a multiple of {channels} channels",
                samples.len()
            )));
        }
        Ok(ControlProgram { dt, channels, samples })
    }

    /// Constant program over `n_samples` grid points.
    pub fn constant(dt: f64, values: &[f64], n_samples: usize) -> Result<Self> {
        let mut samples = Vec::with_capacity(values.len() * n_samples);
        for _ in 0..n_samples {
            samples.extend_from_slice(values);
        }
        ControlProgram::new(dt, values.len(), samples)
    }

    pub fn sample_count(&self) -> usize {
        self.samples.len() / self.channels
    }

    pub fn duration(&self) -> f64 {
        (self.sample_count() - 1) as f64 * self.dt
    }

    pub fn sample(&self, k: usize) -> &[f64] {
        &self.samples[k * self.channels..(k + 1) * self.channels]
    }

    /// Samples of one channel in time order.
    pub fn channel(&self, c: usize) -> Vec<f64> {
        (0..self.sample_count())
            .map(|k| self.samples[k * self.channels + c])
            .collect()
    }

    /// Control value at time `t`, clamped to the program's time span.
    pub fn value_at(&self, t: f64, hold: ControlHold, out: &mut [f64]) {
        let n = self.sample_count();
        if n == 1 {
            out.copy_from_slice(self.sample(0));
            return;
        }
        let pos = (t / self.dt).clamp(0.0, (n - 1) as f64);
        let k = (pos.floor() as usize).min(n - 2);
        match hold {
            ControlHold::ZeroOrder => out.copy_from_slice(self.sample(k)),
            ControlHold::PiecewiseLinear => {
                let frac = pos - k as f64;
                let a = self.sample(k);
                let b = self.sample(k + 1);
                for i in 0..self.channels {
                    out[i] = a[i] + frac * (b[i] - a[i]);
                }
            }
        }
    }
}

/// [`ControlSource`] backed by a sampled program.
pub struct ProgramSource<'a> {
    pub program: &'a ControlProgram,
    pub hold: ControlHold,
}

impl ControlSource for ProgramSource<'_> {
    fn control_dim(&self) -> usize {
        self.program.channels
    }
    fn eval(&self, t: f64, _x: &[f64], out: &mut [f64]) {
        self.program.value_at(t, self.hold, out);
    }
}

/// Control source for systems without inputs.
pub struct NoControl;

impl ControlSource for NoControl {
    fn control_dim(&self) -> usize {
        0
    }
    fn eval(&self, _t: f64, _x: &[f64], _out: &mut [f64]) {}
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    /// Fixed step size [s]. Must divide the control grid spacing.
    pub step: f64,
    pub hold: ControlHold,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            step: 0.02,
            hold: ControlHold::PiecewiseLinear,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    SurfaceCrossing,
    FinalTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub time: f64,
    pub kind: EventKind,
}

/// Propagated trajectory: a uniform time grid (plus an optional event
/// endpoint), the state at each time, the applied control at each time, and
/// the recorded events.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub controls: Vec<Vec<f64>>,
    pub events: Vec<Event>,
}

impl Trajectory {
    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("trajectory is never empty")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory is never empty")
    }
}

/// Classical fourth-order Runge-Kutta stepper with preallocated stage
/// buffers.
struct Rk4Stepper {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    x_stage: Vec<f64>,
    u: Vec<f64>,
}

impl Rk4Stepper {
    fn new(state_dim: usize, control_dim: usize) -> Self {
        Rk4Stepper {
            k1: vec![0.0; state_dim],
            k2: vec![0.0; state_dim],
            k3: vec![0.0; state_dim],
            k4: vec![0.0; state_dim],
            x_stage: vec![0.0; state_dim],
            u: vec![0.0; control_dim],
        }
    }

    fn step(
        &mut self,
        dynamics: &dyn Dynamics,
        source: &dyn ControlSource,
        t: f64,
        h: f64,
        x: &mut [f64],
    ) -> Result<()> {
        let n = x.len();
        let wrap = |t_stage: f64| {
            move |e: Error| Error::Propagation {
                time: t_stage,
                reason: e.to_string(),
            }
        };

        source.eval(t, x, &mut self.u);
        dynamics
            .derivative(t, x, &self.u, &mut self.k1)
            .map_err(wrap(t))?;

        let t_mid = t + 0.5 * h;
        for i in 0..n {
            self.x_stage[i] = x[i] + 0.5 * h * self.k1[i];
        }
        source.eval(t_mid, &self.x_stage, &mut self.u);
        dynamics
            .derivative(t_mid, &self.x_stage, &self.u, &mut self.k2)
            .map_err(wrap(t_mid))?;

        for i in 0..n {
            self.x_stage[i] = x[i] + 0.5 * h * self.k2[i];
        }
        source.eval(t_mid, &self.x_stage, &mut self.u);
        dynamics
            .derivative(t_mid, &self.x_stage, &self.u, &mut self.k3)
            .map_err(wrap(t_mid))?;

        let t_end = t + h;
        for i in 0..n {
            self.x_stage[i] = x[i] + h * self.k3[i];
        }
        source.eval(t_end, &self.x_stage, &mut self.u);
        dynamics
            .derivative(t_end, &self.x_stage, &self.u, &mut self.k4)
            .map_err(wrap(t_end))?;

        for i in 0..n {
            x[i] += h / 6.0 * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
        Ok(())
    }
}

fn step_count(t_f: f64, step: f64) -> Result<usize> {
    if step <= 0.0 {
        return Err(Error::parameter("integrator step must be positive"));
    }
    let n = (t_f / step).round();
    if n < 0.0 || (n * step - t_f).abs() > 1e-9 * t_f.abs().max(1.0) {
        return Err(Error::parameter(format!(
            "final time {t_f} s is not a multiple of the integrator step {step} s"
        )));
    }
    Ok(n as usize)
}

/// Propagate `dynamics` from `x0` to `t_f`, recording every step.
pub fn integrate(
    dynamics: &dyn Dynamics,
    x0: &[f64],
    source: &dyn ControlSource,
    t_f: f64,
    config: &IntegratorConfig,
) -> Result<Trajectory> {
    let n_steps = step_count(t_f, config.step)?;
    let mut stepper = Rk4Stepper::new(dynamics.state_dim(), source.control_dim());
    let mut x = x0.to_vec();
    let mut traj = Trajectory {
        times: Vec::with_capacity(n_steps + 1),
        states: Vec::with_capacity(n_steps + 1),
        controls: Vec::with_capacity(n_steps + 1),
        events: Vec::new(),
    };
    let record =
        |traj: &mut Trajectory, stepper: &mut Rk4Stepper, t: f64, x: &[f64]| {
            source.eval(t, x, &mut stepper.u);
            traj.times.push(t);
            traj.states.push(x.to_vec());
            traj.controls.push(stepper.u.clone());
        };

    record(&mut traj, &mut stepper, 0.0, &x);
    for k in 0..n_steps {
        let t = k as f64 * config.step;
        stepper.step(dynamics, source, t, config.step, &mut x)?;
        record(&mut traj, &mut stepper, (k + 1) as f64 * config.step, &x);
    }
    traj.events.push(Event {
        time: t_f,
        kind: EventKind::FinalTime,
    });
    Ok(traj)
}

/// Propagate and return only the state at `t_f` (no recording). This is the
/// hot path of the shooting evaluations.
pub fn propagate_terminal(
    dynamics: &dyn Dynamics,
    x0: &[f64],
    source: &dyn ControlSource,
    t_f: f64,
    config: &IntegratorConfig,
) -> Result<Vec<f64>> {
    let n_steps = step_count(t_f, config.step)?;
    let mut stepper = Rk4Stepper::new(dynamics.state_dim(), source.control_dim());
    let mut x = x0.to_vec();
    for k in 0..n_steps {
        let t = k as f64 * config.step;
        stepper.step(dynamics, source, t, config.step, &mut x)?;
    }
    Ok(x)
}

/// Propagate until the state component `depth_index` crosses zero from
/// above, or until `t_max`. The crossing time is located by linear
/// interpolation inside the step and appended as a `SurfaceCrossing` event
/// endpoint.
pub fn simulate_to_surface(
    dynamics: &dyn Dynamics,
    x0: &[f64],
    source: &dyn ControlSource,
    t_max: f64,
    config: &IntegratorConfig,
    depth_index: usize,
) -> Result<Trajectory> {
    let n_steps = step_count(t_max, config.step)?;
    let mut stepper = Rk4Stepper::new(dynamics.state_dim(), source.control_dim());
    let mut x = x0.to_vec();
    let mut traj = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        controls: Vec::new(),
        events: Vec::new(),
    };
    let record =
        |traj: &mut Trajectory, stepper: &mut Rk4Stepper, t: f64, x: &[f64]| {
            source.eval(t, x, &mut stepper.u);
            traj.times.push(t);
            traj.states.push(x.to_vec());
            traj.controls.push(stepper.u.clone());
        };

    record(&mut traj, &mut stepper, 0.0, &x);
    if x[depth_index] <= 0.0 {
        traj.events.push(Event {
            time: 0.0,
            kind: EventKind::SurfaceCrossing,
        });
        return Ok(traj);
    }

    for k in 0..n_steps {
        let t = k as f64 * config.step;
        let prev = x.clone();
        stepper.step(dynamics, source, t, config.step, &mut x)?;
        let t_next = (k + 1) as f64 * config.step;
        let (z_prev, z_next) = (prev[depth_index], x[depth_index]);
        if z_prev > 0.0 && z_next <= 0.0 {
            let frac = z_prev / (z_prev - z_next);
            let t_cross = t + frac * config.step;
            let crossing: Vec<f64> = prev
                .iter()
                .zip(x.iter())
                .map(|(a, b)| a + frac * (b - a))
                .collect();
            record(&mut traj, &mut stepper, t_cross, &crossing);
            traj.events.push(Event {
                time: t_cross,
                kind: EventKind::SurfaceCrossing,
            });
            return Ok(traj);
        }
        record(&mut traj, &mut stepper, t_next, &x);
    }
    traj.events.push(Event {
        time: t_max,
        kind: EventKind::FinalTime,
    });
    Ok(traj)
}
