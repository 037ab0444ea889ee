//! Parsers for the scenario and sweep file formats.

use super::sweep::{SweepParameter, SweepSpec};
use super::{
    CoefficientSource, CombinedSpec, FreeParamDecl, FreeParamName, LaunchMode, PhaseKind,
    ScenarioSpec,
};
use crate::error::{Error, Result};
use crate::opt::{ControlBounds, SolverConfig, TerminalComponent};
use crate::vehicle::coefficients::FallbackCoefficients;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// One `key = value` occurrence with its line number.
type Entry = (usize, String);

/// Sections in file order: section name -> key -> (line, value).
struct RawFile {
    path: String,
    sections: BTreeMap<String, BTreeMap<String, Entry>>,
}

impl RawFile {
    fn parse(text: &str, path: &str) -> Result<RawFile> {
        let mut sections: BTreeMap<String, BTreeMap<String, Entry>> = BTreeMap::new();
        let mut current = String::new(); // top level
        sections.insert(String::new(), BTreeMap::new());
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('[') {
                if !line.ends_with(']') {
                    return Err(Error::Parse {
                        path: path.into(),
                        line: line_no,
                        msg: format!("malformed section header '{line}'"),
                    });
                }
                current = line[1..line.len() - 1].trim().to_string();
                sections.entry(current.clone()).or_default();
                continue;
            }
            let Some(eq) = line.find('=') else {
                return Err(Error::Parse {
                    path: path.into(),
                    line: line_no,
                    msg: format!("expected 'key = value', got '{line}'"),
                });
            };
            let key = line[..eq].trim().to_string();
            let value = line[eq + 1..].trim().to_string();
            if key.is_empty() || value.is_empty() {
                return Err(Error::Parse {
                    path: path.into(),
                    line: line_no,
                    msg: format!("expected 'key = value', got '{line}'"),
                });
            }
            let section = sections.get_mut(&current).expect("section inserted");
            if section.insert(key.clone(), (line_no, value)).is_some() {
                return Err(Error::Parse {
                    path: path.into(),
                    line: line_no,
                    msg: format!("duplicate key '{key}'"),
                });
            }
        }
        Ok(RawFile {
            path: path.into(),
            sections,
        })
    }

    fn section(&mut self, name: &str) -> Section {
        Section {
            path: self.path.clone(),
            name: name.to_string(),
            entries: self.sections.remove(name).unwrap_or_default(),
        }
    }

    /// Error on any section this format does not define.
    fn finish(self, known: &[&str]) -> Result<()> {
        for (name, entries) in &self.sections {
            if name.is_empty() || known.contains(&name.as_str()) {
                continue;
            }
            let line = entries.values().map(|(l, _)| *l).min().unwrap_or(1);
            return Err(Error::Parse {
                path: self.path.clone(),
                line,
                msg: format!("unknown section '[{name}]'"),
            });
        }
        Ok(())
    }
}

/// A consumed-key view of one section; leftover keys are parse errors.
struct Section {
    path: String,
    name: String,
    entries: BTreeMap<String, Entry>,
}

impl Section {
    fn error(&self, line: usize, msg: String) -> Error {
        Error::Parse {
            path: self.path.clone(),
            line,
            msg,
        }
    }

    fn take(&mut self, key: &str) -> Option<Entry> {
        self.entries.remove(key)
    }

    fn take_str(&mut self, key: &str) -> Option<String> {
        self.take(key).map(|(_, v)| v)
    }

    fn take_f64(&mut self, key: &str) -> Result<Option<f64>> {
        match self.take(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse::<f64>()
                .map(Some)
                .map_err(|_| self.error(line, format!("invalid number '{v}' for '{key}'"))),
        }
    }

    fn take_bool(&mut self, key: &str) -> Result<Option<bool>> {
        match self.take(key) {
            None => Ok(None),
            Some((line, v)) => match v.as_str() {
                "true" | "yes" => Ok(Some(true)),
                "false" | "no" => Ok(Some(false)),
                _ => Err(self.error(line, format!("invalid boolean '{v}' for '{key}'"))),
            },
        }
    }

    fn require_f64(&mut self, key: &str) -> Result<f64> {
        self.take_f64(key)?.ok_or_else(|| {
            self.error(
                1,
                format!("missing required key '{key}' in section '[{}]'", self.name),
            )
        })
    }

    /// `Fixed(value)` or `Free`; angles handled by the caller.
    fn take_terminal(&mut self, key: &str) -> Result<Option<TerminalComponent>> {
        match self.take(key) {
            None => Ok(None),
            Some((line, v)) => {
                if v == "free" {
                    Ok(Some(TerminalComponent::Free))
                } else {
                    v.parse::<f64>()
                        .map(|x| Some(TerminalComponent::Fixed(x)))
                        .map_err(|_| {
                            self.error(line, format!("expected a number or 'free' for '{key}'"))
                        })
                }
            }
        }
    }

    /// Reject leftover keys.
    fn finish(self) -> Result<()> {
        if let Some((key, (line, _))) = self.entries.into_iter().next() {
            return Err(Error::Parse {
                path: self.path,
                line,
                msg: format!("unknown key '{key}' in section '[{}]'", self.name),
            });
        }
        Ok(())
    }
}

/// Down-positive z from a section that may give either `z` or `altitude`.
fn take_z(section: &mut Section) -> Result<Option<f64>> {
    let z = section.take_f64("z")?;
    let altitude = section.take_f64("altitude")?;
    match (z, altitude) {
        (Some(_), Some(_)) => Err(section.error(
            1,
            format!("section '[{}]' gives both 'z' and 'altitude'", section.name),
        )),
        (Some(z), None) => Ok(Some(z)),
        (None, Some(alt)) => Ok(Some(-alt)),
        (None, None) => Ok(None),
    }
}

fn take_terminal_z(section: &mut Section) -> Result<Option<TerminalComponent>> {
    let z = section.take_terminal("z")?;
    let altitude = section.take_terminal("altitude")?;
    match (z, altitude) {
        (Some(_), Some(_)) => Err(section.error(
            1,
            format!("section '[{}]' gives both 'z' and 'altitude'", section.name),
        )),
        (Some(z), None) => Ok(Some(z)),
        (None, Some(TerminalComponent::Fixed(alt))) => {
            Ok(Some(TerminalComponent::Fixed(-alt)))
        }
        (None, Some(TerminalComponent::Free)) => Ok(Some(TerminalComponent::Free)),
        (None, None) => Ok(None),
    }
}

fn parse_state_section(mut section: Section) -> Result<[f64; 5]> {
    let u = section.require_f64("u")?;
    let w = section.require_f64("w")?;
    let q = section.require_f64("q")?;
    let theta = section.require_f64("theta_deg")?.to_radians();
    let z = take_z(&mut section)?.ok_or_else(|| {
        section.error(
            1,
            format!("section '[{}]' needs 'z' or 'altitude'", section.name),
        )
    })?;
    section.finish()?;
    Ok([u, w, q, theta, z])
}

fn parse_terminal_section(mut section: Section) -> Result<[TerminalComponent; 5]> {
    use TerminalComponent::*;
    let u = section.take_terminal("u")?.unwrap_or(Free);
    let w = section.take_terminal("w")?.unwrap_or(Free);
    let q = section.take_terminal("q")?.unwrap_or(Free);
    let theta = match section.take_terminal("theta_deg")?.unwrap_or(Free) {
        Fixed(deg) => Fixed(deg.to_radians()),
        Free => Free,
    };
    let z = take_terminal_z(&mut section)?.unwrap_or(Free);
    section.finish()?;
    Ok([u, w, q, theta, z])
}

fn parse_vehicle_section(mut section: Section) -> Result<VehicleOverride> {
    let mut vehicle = crate::vehicle::VehicleParams::default();
    if let Some(v) = section.take_f64("mass")? {
        vehicle.mass = v;
    }
    if let Some(v) = section.take_f64("length")? {
        vehicle.length = v;
    }
    if let Some(v) = section.take_f64("diameter")? {
        vehicle.diameter = v;
    }
    if let Some(v) = section.take_f64("reference_area")? {
        vehicle.reference_area = v;
    }
    if let Some(v) = section.take_f64("volume")? {
        vehicle.volume = v;
    }
    if let Some(v) = section.take_f64("ix")? {
        vehicle.inertia[0] = v;
    }
    if let Some(v) = section.take_f64("iy")? {
        vehicle.inertia[1] = v;
    }
    if let Some(v) = section.take_f64("iz")? {
        vehicle.inertia[2] = v;
    }
    if let Some(v) = section.take_f64("x_cg")? {
        vehicle.cg_position[0] = v;
    }
    if let Some(v) = section.take_f64("x_cb")? {
        vehicle.cb_position[0] = v;
    }
    if let Some(v) = section.take_f64("thrust_arm")? {
        vehicle.thrust_arm = v;
    }
    if let Some(v) = section.take_f64("nose_length")? {
        vehicle.nose_length = v;
    }
    section.finish()?;
    Ok(vehicle)
}
type VehicleOverride = crate::vehicle::VehicleParams;

fn parse_environment_section(mut section: Section) -> Result<crate::environment::EnvironmentModel> {
    let mut env = crate::environment::EnvironmentModel::default();
    if let Some(v) = section.take_f64("water_density")? {
        env.water_density = v;
    }
    if let Some(v) = section.take_f64("gravity")? {
        env.gravity = v;
    }
    section.finish()?;
    Ok(env)
}

fn parse_coefficients_section(
    mut section: Section,
    scenario_dir: &Path,
) -> Result<CoefficientSource> {
    let mode = section.take_str("mode").unwrap_or_else(|| "fallback".into());
    let source = match mode.as_str() {
        "fallback" => {
            let mut fb = FallbackCoefficients::default();
            if let Some(v) = section.take_f64("cx0")? {
                fb.axial = v;
            }
            if let Some(v) = section.take_f64("cz_alpha")? {
                fb.normal_slope = v;
            }
            if let Some(v) = section.take_f64("cm_alpha")? {
                fb.moment_slope = v;
            }
            if let Some(v) = section.take_f64("cmq")? {
                fb.pitch_damping = v;
            }
            CoefficientSource::Fallback(fb)
        }
        "table" => {
            let (line, rel) = section.take("table").ok_or_else(|| {
                section.error(1, "mode = table requires a 'table' path".into())
            })?;
            let path = scenario_dir.join(&rel);
            if !path.is_file() {
                return Err(section.error(line, format!("coefficient table '{rel}' not found")));
            }
            CoefficientSource::Table(path)
        }
        other => {
            return Err(section.error(
                1,
                format!("unknown coefficient mode '{other}' (fallback | table)"),
            ))
        }
    };
    section.finish()?;
    Ok(source)
}

fn parse_solver_section(mut section: Section) -> Result<(SolverConfig, f64)> {
    let mut config = SolverConfig::default();
    if let Some(v) = section.take_f64("eps_constraint")? {
        config.eps_constraint = v;
    }
    if let Some(v) = section.take_f64("eps_gradient")? {
        config.eps_gradient = v;
    }
    if let Some(v) = section.take_f64("penalty_initial")? {
        config.penalty_initial = v;
    }
    if let Some(v) = section.take_f64("penalty_growth")? {
        config.penalty_growth = v;
    }
    if let Some(v) = section.take_f64("penalty_cap")? {
        config.penalty_cap = v;
    }
    if let Some(v) = section.take_f64("outer_max")? {
        config.outer_max = v as usize;
    }
    if let Some(v) = section.take_f64("inner_max")? {
        config.inner_max = v as usize;
    }
    if let Some(v) = section.take_f64("fd_step")? {
        config.fd_step = v;
    }
    let step = section.take_f64("step")?.unwrap_or(0.05);
    section.finish()?;
    Ok((config, step))
}

fn parse_free_section(mut section: Section) -> Result<Vec<FreeParamDecl>> {
    let mut decls = Vec::new();
    for (key, name) in [
        ("z0", FreeParamName::InitialDepth),
        ("uf", FreeParamName::TerminalForwardVelocity),
        ("altitude_f", FreeParamName::TerminalAltitude),
    ] {
        if let Some((line, value)) = section.take(key) {
            let parts: Vec<&str> = value.split(',').map(|s| s.trim()).collect();
            if parts.len() != 2 {
                return Err(
                    section.error(line, format!("'{key}' needs 'lower, upper', got '{value}'"))
                );
            }
            let lower: f64 = parts[0]
                .parse()
                .map_err(|_| section.error(line, format!("invalid number '{}'", parts[0])))?;
            let upper: f64 = parts[1]
                .parse()
                .map_err(|_| section.error(line, format!("invalid number '{}'", parts[1])))?;
            if !(lower <= upper) || !lower.is_finite() || !upper.is_finite() {
                return Err(section.error(line, format!("'{key}' box [{lower}, {upper}] invalid")));
            }
            decls.push(FreeParamDecl { name, lower, upper });
        }
    }
    section.finish()?;
    Ok(decls)
}

const SCENARIO_SECTIONS: [&str; 10] = [
    "initial",
    "terminal",
    "boost_terminal",
    "bounds",
    "free",
    "vehicle",
    "coefficients",
    "environment",
    "solver",
    "control",
];

/// Parse and validate a scenario file.
pub fn parse_scenario(path: &Path) -> Result<ScenarioSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    parse_scenario_text(&text, path)
}

pub fn parse_scenario_text(text: &str, path: &Path) -> Result<ScenarioSpec> {
    let path_str = path.display().to_string();
    let dir = path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let mut raw = RawFile::parse(text, &path_str)?;

    let mut top = raw.section("");
    let name = top.take_str("name").unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "scenario".into())
    });
    let phase = match top
        .take_str("phase")
        .unwrap_or_else(|| "launch".into())
        .as_str()
    {
        "launch" => PhaseKind::Launch,
        "boost" => PhaseKind::Boost,
        "combined" => PhaseKind::Combined,
        other => {
            return Err(Error::Parse {
                path: path_str,
                line: 1,
                msg: format!("unknown phase '{other}' (launch | boost | combined)"),
            })
        }
    };
    let launch_mode = match top
        .take_str("launch_mode")
        .unwrap_or_else(|| "horizontal".into())
        .as_str()
    {
        "horizontal" => LaunchMode::Horizontal,
        "vertical" => LaunchMode::Vertical,
        other => {
            return Err(Error::Parse {
                path: path_str,
                line: 1,
                msg: format!("unknown launch_mode '{other}' (horizontal | vertical)"),
            })
        }
    };
    let dt = top.take_f64("dt")?.unwrap_or(0.2);

    // Combined-mission top-level fields.
    let (t_f, combined_top) = if phase == PhaseKind::Combined {
        let exit_velocity = top.take_f64("exit_velocity")?.unwrap_or(35.0);
        let theta_exit_deg = top.take_f64("theta_exit_deg")?.unwrap_or(45.0);
        let launch_t_f = top.require_f64("launch_t_f")?;
        let boost_t_f = top.require_f64("boost_t_f")?;
        let vertical_comparison = top.take_bool("vertical_comparison")?.unwrap_or(false);
        let vertical_t_f = top.take_f64("vertical_t_f")?.unwrap_or(launch_t_f);
        let vertical_z0 = top.take_f64("vertical_z0")?.unwrap_or(100.0);
        (
            launch_t_f,
            Some((
                exit_velocity,
                theta_exit_deg,
                launch_t_f,
                boost_t_f,
                vertical_comparison,
                vertical_t_f,
                vertical_z0,
            )),
        )
    } else {
        (top.require_f64("t_f")?, None)
    };
    top.finish()?;

    for (label, value) in [("t_f", t_f), ("dt", dt)] {
        if !(value > 0.0) {
            return Err(Error::Parse {
                path: path_str,
                line: 1,
                msg: format!("{label} must be positive, got {value}"),
            });
        }
    }
    let check_multiple = |label: &str, value: f64| -> Result<()> {
        let ratio = value / dt;
        if (ratio - ratio.round()).abs() > 1e-9 {
            return Err(Error::Parse {
                path: path_str.clone(),
                line: 1,
                msg: format!("{label} must be a multiple of dt ({value} vs {dt})"),
            });
        }
        Ok(())
    };
    check_multiple("t_f", t_f)?;

    let initial = parse_state_section(raw.section("initial"))?;
    let terminal_section = raw.section("terminal");
    let mut terminal = parse_terminal_section(terminal_section)?;
    // Launch scenarios end at the surface unless told otherwise.
    if phase == PhaseKind::Launch && matches!(terminal[4], TerminalComponent::Free) {
        terminal[4] = TerminalComponent::Fixed(0.0);
    }

    let mut bounds_section = raw.section("bounds");
    let mut bounds = ControlBounds::default();
    if let Some(v) = bounds_section.take_f64("thrust_min")? {
        bounds.thrust.0 = v;
    }
    if let Some(v) = bounds_section.take_f64("thrust_max")? {
        bounds.thrust.1 = v;
    }
    if let Some(v) = bounds_section.take_f64("deflection_max_deg")? {
        bounds.deflection = v.to_radians();
    }
    bounds_section.finish()?;
    bounds.validate()?;

    let free_params = parse_free_section(raw.section("free"))?;
    let vehicle = parse_vehicle_section(raw.section("vehicle"))?;
    vehicle.validate()?;
    let environment = parse_environment_section(raw.section("environment"))?;
    let coefficients = parse_coefficients_section(raw.section("coefficients"), &dir)?;
    let (solver, integrator_step) = parse_solver_section(raw.section("solver"))?;

    let mut control_section = raw.section("control");
    let constant_thrust = control_section.take_f64("thrust")?;
    let constant_deflection = control_section
        .take_f64("deflection_deg")?
        .map(|d| d.to_radians());
    control_section.finish()?;
    let constant_control = constant_thrust.map(|t| (t, constant_deflection.unwrap_or(0.0)));

    let combined = if let Some((
        exit_velocity,
        theta_exit_deg,
        launch_t_f,
        boost_t_f,
        vertical_comparison,
        vertical_t_f,
        vertical_z0,
    )) = combined_top
    {
        check_multiple("launch_t_f", launch_t_f)?;
        check_multiple("boost_t_f", boost_t_f)?;
        check_multiple("vertical_t_f", vertical_t_f)?;
        let boost_terminal = parse_terminal_section(raw.section("boost_terminal"))?;
        Some(CombinedSpec {
            exit_velocity,
            theta_exit_deg,
            launch_t_f,
            boost_t_f,
            boost_terminal,
            vertical_comparison,
            vertical_t_f,
            vertical_z0,
        })
    } else {
        None
    };

    raw.finish(&SCENARIO_SECTIONS)?;

    // Integrator step must subdivide the control grid.
    let ratio = dt / integrator_step;
    if integrator_step <= 0.0 || (ratio - ratio.round()).abs() > 1e-9 {
        return Err(Error::Parse {
            path: path_str,
            line: 1,
            msg: format!("solver step {integrator_step} must divide dt {dt}"),
        });
    }

    let spec = ScenarioSpec {
        name,
        phase,
        launch_mode,
        initial,
        terminal,
        t_f,
        dt,
        bounds,
        free_params,
        vehicle,
        environment,
        coefficients,
        solver,
        integrator_step,
        constant_control,
        combined,
    };
    // Single-phase scenarios must transcribe cleanly; surface problems now,
    // at parse time, not mid-sweep.
    if spec.phase != PhaseKind::Combined {
        spec.build_problem()?;
    } else {
        spec.launch_leg(spec.combined.as_ref().unwrap().theta_exit_deg)?
            .build_problem()?;
        spec.boost_leg(spec.combined.as_ref().unwrap().theta_exit_deg)?
            .build_problem()?;
    }
    Ok(spec)
}

/// Parse a sweep file and its base scenario.
pub fn parse_sweep(path: &Path) -> Result<SweepSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let path_str = path.display().to_string();
    let dir = path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let mut raw = RawFile::parse(&text, &path_str)?;
    let mut top = raw.section("");

    let (base_line, base_rel) = top.take("base").ok_or_else(|| Error::Parse {
        path: path_str.clone(),
        line: 1,
        msg: "missing required key 'base'".into(),
    })?;
    let base_path: PathBuf = dir.join(&base_rel);
    if !base_path.is_file() {
        return Err(Error::Parse {
            path: path_str,
            line: base_line,
            msg: format!("base scenario '{base_rel}' not found"),
        });
    }

    let (param_line, parameter) = top.take("parameter").ok_or_else(|| Error::Parse {
        path: path_str.clone(),
        line: 1,
        msg: "missing required key 'parameter'".into(),
    })?;
    let parameter = match parameter.as_str() {
        "theta_exit" => SweepParameter::ThetaExit,
        "z0" => SweepParameter::InitialDepth,
        "tf" => SweepParameter::FinalTime,
        "uf" => SweepParameter::TerminalForwardVelocity,
        "altitude_f" => SweepParameter::TerminalAltitude,
        other => {
            return Err(Error::Parse {
                path: path_str,
                line: param_line,
                msg: format!(
                    "unknown sweep parameter '{other}' \
                     (theta_exit | z0 | tf | uf | altitude_f)"
                ),
            })
        }
    };

    let (values_line, values_text) = top.take("values").ok_or_else(|| Error::Parse {
        path: path_str.clone(),
        line: 1,
        msg: "missing required key 'values'".into(),
    })?;
    let mut values = Vec::new();
    for token in values_text.split(',') {
        let token = token.trim();
        let value: f64 = token.parse().map_err(|_| Error::Parse {
            path: path_str.clone(),
            line: values_line,
            msg: format!("invalid sweep value '{token}'"),
        })?;
        if !value.is_finite() {
            return Err(Error::Parse {
                path: path_str.clone(),
                line: values_line,
                msg: format!("non-finite sweep value '{token}'"),
            });
        }
        values.push(value);
    }
    if values.is_empty() {
        return Err(Error::Parse {
            path: path_str,
            line: values_line,
            msg: "sweep needs at least one value".into(),
        });
    }
    top.finish()?;
    raw.finish(&[])?;

    let base = parse_scenario(&base_path)?;
    let sweep = SweepSpec {
        base,
        parameter,
        values,
    };
    // Every row must produce a well-formed scenario.
    for value in &sweep.values {
        sweep.scenario_for(*value)?;
    }
    Ok(sweep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(content: &str) -> (tempfile::TempDir, PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("case.scn");
        let mut file = std::fs::File::create(&path).unwrap();
        file.write_all(content.as_bytes()).unwrap();
        (dir, path)
    }

    const MINIMAL: &str = "\
phase = launch
t_f = 15.0

[initial]
u = 10.0
w = 0.0
q = 0.0
theta_deg = 0.0
z = 100.0

[terminal]
theta_deg = 45.0
";

    #[test]
    fn minimal_launch_file_fills_documented_defaults() {
        let (_dir, path) = write_temp(MINIMAL);
        let spec = parse_scenario(&path).unwrap();
        assert_eq!(spec.dt, 0.2);
        assert_eq!(spec.bounds.thrust, (0.0, 30_000.0));
        assert_eq!(spec.vehicle.mass, 1513.0);
        assert!(matches!(spec.terminal[0], TerminalComponent::Free));
        assert!(matches!(spec.terminal[4], TerminalComponent::Fixed(z) if z == 0.0));
        assert!(
            matches!(spec.terminal[3], TerminalComponent::Fixed(t) if (t - 0.7853981633974483).abs() < 1e-12)
        );
        assert_eq!(spec.name, "case");
    }

    #[test]
    fn non_integral_final_time_is_rejected_with_the_documented_message() {
        let bad = MINIMAL.replace("t_f = 15.0", "t_f = 15.1");
        let (_dir, path) = write_temp(&bad);
        let err = parse_scenario(&path).unwrap_err();
        assert!(
            err.to_string().contains("t_f must be a multiple of dt"),
            "{err}"
        );
    }

    #[test]
    fn unknown_keys_are_rejected_with_line_numbers() {
        let bad = format!("{MINIMAL}\nwarp_drive = 9\n");
        let (_dir, path) = write_temp(&bad);
        let err = parse_scenario(&path).unwrap_err();
        let text = err.to_string();
        assert!(text.contains("unknown key 'warp_drive'"), "{text}");
    }

    #[test]
    fn missing_coefficient_table_is_a_parse_error() {
        let bad = format!("{MINIMAL}\n[coefficients]\nmode = table\ntable = nope.csv\n");
        let (_dir, path) = write_temp(&bad);
        let err = parse_scenario(&path).unwrap_err();
        assert!(err.to_string().contains("not found"), "{err}");
    }

    #[test]
    fn bundled_style_launch_file_round_trips() {
        let full = "\
name = launch_45deg
phase = launch
launch_mode = horizontal
t_f = 15.0
dt = 0.2

[initial]
u = 10.0
w = 0.0
q = 0.0
theta_deg = 0.0
z = 100.0

[terminal]
u = 35.0
w = free
q = free
theta_deg = 45.0
z = 0.0

[coefficients]
mode = fallback
cx0 = -0.10
";
        let (_dir, path) = write_temp(full);
        let spec = parse_scenario(&path).unwrap();
        assert_eq!(spec.initial, [10.0, 0.0, 0.0, 0.0, 100.0]);
        assert!(matches!(spec.terminal[0], TerminalComponent::Fixed(u) if u == 35.0));
        assert!(matches!(spec.terminal[1], TerminalComponent::Free));
        assert_eq!(spec.intervals(), 75);
        match spec.coefficients {
            CoefficientSource::Fallback(fb) => assert_eq!(fb.axial, -0.10),
            _ => panic!("expected fallback"),
        }
    }

    #[test]
    fn free_parameter_boxes_parse() {
        let full = format!("{MINIMAL}\n[free]\nuf = 35.0, 60.0\n");
        let (_dir, path) = write_temp(&full);
        let spec = parse_scenario(&path).unwrap();
        assert_eq!(spec.free_params.len(), 1);
        assert_eq!(spec.free_params[0].name, FreeParamName::TerminalForwardVelocity);
        assert_eq!(spec.free_params[0].lower, 35.0);
        assert_eq!(spec.free_params[0].upper, 60.0);
    }

    #[test]
    fn sweep_file_parses_and_checks_rows() {
        let dir = tempfile::tempdir().unwrap();
        let scn = dir.path().join("base.scn");
        std::fs::write(&scn, MINIMAL).unwrap();
        let swp = dir.path().join("angles.swp");
        std::fs::write(
            &swp,
            "base = base.scn\nparameter = theta_exit\nvalues = 20, 45, 90\n",
        )
        .unwrap();
        let sweep = parse_sweep(&swp).unwrap();
        assert_eq!(sweep.values, vec![20.0, 45.0, 90.0]);
        let row = sweep.scenario_for(90.0).unwrap();
        assert!(
            matches!(row.terminal[3], TerminalComponent::Fixed(t) if (t - std::f64::consts::FRAC_PI_2).abs() < 1e-12)
        );
    }

    #[test]
    fn missing_base_scenario_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let swp = dir.path().join("angles.swp");
        std::fs::write(
            &swp,
            "base = gone.scn\nparameter = theta_exit\nvalues = 45\n",
        )
        .unwrap();
        let err = parse_sweep(&swp).unwrap_err();
        assert!(err.to_string().contains("not found"), "{err}");
    }
}
