//! Aerodynamic / hydrodynamic force and moment coefficients.
//!
//! Coefficients are either interpolated from a user-supplied table indexed by
//! (angle of attack, sideslip, Mach), or produced by a small analytic
//! fallback for a statically stable slender body when no table is available.

use crate::error::{Error, Result};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};

/// Indices into the coefficient arrays, following the axis order
/// x, y, z, l, m, n.
pub const CX: usize = 0;
pub const CY: usize = 1;
pub const CZ: usize = 2;
pub const CL: usize = 3;
pub const CM: usize = 4;
pub const CN: usize = 5;

/// One evaluated coefficient set: statics `c0` plus the dynamic derivatives
/// with respect to the normalized rates p, q, r.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CoefficientSet {
    pub c0: [f64; 6],
    pub cp: [f64; 6],
    pub cq: [f64; 6],
    pub cr: [f64; 6],
}

/// Analytic fallback constants. At zero incidence the normal force and the
/// static pitch moment vanish (symmetric body); the slopes make the body
/// statically stable. These are placeholders exposed as configuration, not
/// measured data for any particular airframe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FallbackCoefficients {
    /// Axial force coefficient C_x0 (drag is negative along body x).
    pub axial: f64,
    /// Normal force slope dC_z/dalpha [1/rad].
    pub normal_slope: f64,
    /// Static pitch moment slope dC_m/dalpha [1/rad].
    pub moment_slope: f64,
    /// Pitch damping derivative C_mq [1/rad].
    pub pitch_damping: f64,
}

impl Default for FallbackCoefficients {
    fn default() -> Self {
        FallbackCoefficients {
            axial: -0.30,
            normal_slope: -2.0,
            moment_slope: -0.5,
            pitch_damping: -200.0,
        }
    }
}

/// Names of the coefficient columns accepted in table files, in the
/// canonical order: statics, then p, q, r derivatives.
const COLUMN_NAMES: [&str; 24] = [
    "cx0", "cy0", "cz0", "cl0", "cm0", "cn0", //
    "cxp", "cyp", "czp", "clp", "cmp", "cnp", //
    "cxq", "cyq", "czq", "clq", "cmq", "cnq", //
    "cxr", "cyr", "czr", "clr", "cmr", "cnr",
];

/// Tabulated coefficients on a full Cartesian (alpha, beta, Mach) grid with
/// multilinear interpolation. Out-of-grid queries clamp to the boundary and
/// bump `clamp_events`.
#[derive(Debug)]
pub struct CoefficientTable {
    alpha_deg: Vec<f64>,
    beta_deg: Vec<f64>,
    mach: Vec<f64>,
    /// Row-major over (alpha, beta, mach), 24 values per grid point.
    values: Vec<[f64; 24]>,
    clamp_events: AtomicU64,
}

#[derive(Debug)]
pub enum CoefficientProvider {
    Fallback(FallbackCoefficients),
    Table(CoefficientTable),
}

impl CoefficientProvider {
    pub fn fallback() -> Self {
        CoefficientProvider::Fallback(FallbackCoefficients::default())
    }

    pub fn from_table_file(path: &Path) -> Result<Self> {
        Ok(CoefficientProvider::Table(CoefficientTable::load(path)?))
    }

    /// Evaluate at an angle of attack and sideslip in radians and a Mach
    /// number. Returns the coefficient set and whether any query axis was
    /// clamped to the grid boundary.
    pub fn evaluate(&self, alpha: f64, beta: f64, mach: f64) -> (CoefficientSet, bool) {
        match self {
            CoefficientProvider::Fallback(fb) => {
                let mut set = CoefficientSet::default();
                set.c0[CX] = fb.axial;
                set.c0[CZ] = fb.normal_slope * alpha;
                set.c0[CM] = fb.moment_slope * alpha;
                set.cq[CM] = fb.pitch_damping;
                let _ = beta;
                let _ = mach;
                (set, false)
            }
            CoefficientProvider::Table(table) => {
                table.interpolate(alpha.to_degrees(), beta.to_degrees(), mach)
            }
        }
    }

    /// Number of queries that fell outside the table and were clamped.
    /// Always zero for the analytic fallback.
    pub fn clamp_count(&self) -> u64 {
        match self {
            CoefficientProvider::Fallback(_) => 0,
            CoefficientProvider::Table(t) => t.clamp_events.load(Ordering::Relaxed),
        }
    }
}

/// Locate `x` on the grid `axis`: returns (left index, fraction, clamped).
fn locate(axis: &[f64], x: f64) -> (usize, f64, bool) {
    let n = axis.len();
    if n == 1 {
        return (0, 0.0, false);
    }
    if x <= axis[0] {
        return (0, 0.0, x < axis[0]);
    }
    if x >= axis[n - 1] {
        return (n - 2, 1.0, x > axis[n - 1]);
    }
    let mut lo = 0;
    while lo + 2 < n && axis[lo + 1] <= x {
        lo += 1;
    }
    let frac = (x - axis[lo]) / (axis[lo + 1] - axis[lo]);
    (lo, frac, false)
}

impl CoefficientTable {
    fn index(&self, ia: usize, ib: usize, im: usize) -> usize {
        (ia * self.beta_deg.len() + ib) * self.mach.len() + im
    }

    fn interpolate(&self, alpha_deg: f64, beta_deg: f64, mach: f64) -> (CoefficientSet, bool) {
        let (ia, fa, ca) = locate(&self.alpha_deg, alpha_deg);
        let (ib, fb, cb) = locate(&self.beta_deg, beta_deg);
        let (im, fm, cm) = locate(&self.mach, mach);
        let clamped = ca || cb || cm;
        if clamped {
            self.clamp_events.fetch_add(1, Ordering::Relaxed);
        }

        let mut acc = [0.0f64; 24];
        for (da, wa) in [(0usize, 1.0 - fa), (1, fa)] {
            if wa == 0.0 {
                continue;
            }
            let ja = (ia + da).min(self.alpha_deg.len() - 1);
            for (db, wb) in [(0usize, 1.0 - fb), (1, fb)] {
                if wb == 0.0 {
                    continue;
                }
                let jb = (ib + db).min(self.beta_deg.len() - 1);
                for (dm, wm) in [(0usize, 1.0 - fm), (1, fm)] {
                    if wm == 0.0 {
                        continue;
                    }
                    let jm = (im + dm).min(self.mach.len() - 1);
                    let w = wa * wb * wm;
                    let row = &self.values[self.index(ja, jb, jm)];
                    for (a, v) in acc.iter_mut().zip(row.iter()) {
                        *a += w * v;
                    }
                }
            }
        }

        let mut set = CoefficientSet::default();
        for i in 0..6 {
            set.c0[i] = acc[i];
            set.cp[i] = acc[6 + i];
            set.cq[i] = acc[12 + i];
            set.cr[i] = acc[18 + i];
        }
        (set, clamped)
    }

    /// Load a delimited text table. The header row names the three axis
    /// columns (`alpha_deg`, `beta_deg`, `mach`) and any subset of the 24
    /// coefficient columns; omitted coefficients are zero. Rows must form a
    /// full Cartesian product of the axis values.
    pub fn load(path: &Path) -> Result<CoefficientTable> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, path: &str) -> Result<CoefficientTable> {
        let err = |line: usize, msg: String| Error::Parse {
            path: path.to_string(),
            line,
            msg,
        };
        let split = |s: &str| -> Vec<String> {
            s.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| t.to_string())
                .collect()
        };

        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let (header_line, header) = lines
            .next()
            .ok_or_else(|| err(1, "empty coefficient table".into()))?;
        let columns = split(header);
        let mut axis_cols = [usize::MAX; 3];
        let mut coeff_cols: Vec<(usize, usize)> = Vec::new(); // (column, slot)
        for (pos, name) in columns.iter().enumerate() {
            match name.as_str() {
                "alpha_deg" => axis_cols[0] = pos,
                "beta_deg" => axis_cols[1] = pos,
                "mach" => axis_cols[2] = pos,
                other => {
                    let slot = COLUMN_NAMES
                        .iter()
                        .position(|c| *c == other)
                        .ok_or_else(|| {
                            err(header_line, format!("unknown coefficient column '{other}'"))
                        })?;
                    coeff_cols.push((pos, slot));
                }
            }
        }
        for (i, name) in ["alpha_deg", "beta_deg", "mach"].iter().enumerate() {
            if axis_cols[i] == usize::MAX {
                return Err(err(header_line, format!("missing axis column '{name}'")));
            }
        }

        struct Row {
            axes: [f64; 3],
            coeffs: [f64; 24],
        }
        let mut rows: Vec<(usize, Row)> = Vec::new();
        for (line_no, line) in lines {
            let fields = split(line);
            if fields.len() != columns.len() {
                return Err(err(
                    line_no,
                    format!("expected {} fields, found {}", columns.len(), fields.len()),
                ));
            }
            let parse_field = |pos: usize| -> Result<f64> {
                fields[pos]
                    .parse::<f64>()
                    .map_err(|_| err(line_no, format!("invalid number '{}'", fields[pos])))
            };
            let mut row = Row {
                axes: [0.0; 3],
                coeffs: [0.0; 24],
            };
            for i in 0..3 {
                row.axes[i] = parse_field(axis_cols[i])?;
            }
            for &(pos, slot) in &coeff_cols {
                row.coeffs[slot] = parse_field(pos)?;
            }
            rows.push((line_no, row));
        }
        if rows.is_empty() {
            return Err(err(header_line, "table has no data rows".into()));
        }

        let mut axes: [Vec<f64>; 3] = [Vec::new(), Vec::new(), Vec::new()];
        for (_, row) in &rows {
            for i in 0..3 {
                if !axes[i].iter().any(|v| *v == row.axes[i]) {
                    axes[i].push(row.axes[i]);
                }
            }
        }
        for axis in axes.iter_mut() {
            axis.sort_by(|a, b| a.partial_cmp(b).unwrap());
        }
        let [alpha_deg, beta_deg, mach] = axes;
        let expected = alpha_deg.len() * beta_deg.len() * mach.len();
        if rows.len() != expected {
            return Err(err(
                header_line,
                format!(
                    "grid is not a full Cartesian product: {} rows for {} x {} x {} axis values",
                    rows.len(),
                    alpha_deg.len(),
                    beta_deg.len(),
                    mach.len()
                ),
            ));
        }

        let mut values = vec![None; expected];
        let find = |axis: &[f64], v: f64| axis.iter().position(|a| *a == v).unwrap();
        for (line_no, row) in rows {
            let ia = find(&alpha_deg, row.axes[0]);
            let ib = find(&beta_deg, row.axes[1]);
            let im = find(&mach, row.axes[2]);
            let idx = (ia * beta_deg.len() + ib) * mach.len() + im;
            if values[idx].is_some() {
                return Err(err(
                    line_no,
                    format!(
                        "duplicate grid point (alpha={}, beta={}, mach={})",
                        row.axes[0], row.axes[1], row.axes[2]
                    ),
                ));
            }
            values[idx] = Some(row.coeffs);
        }
        let values = values
            .into_iter()
            .map(|v| v.expect("cardinality checked above"))
            .collect();

        Ok(CoefficientTable {
            alpha_deg,
            beta_deg,
            mach,
            values,
            clamp_events: AtomicU64::new(0),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn fallback_is_symmetric_at_zero_incidence() {
        let provider = CoefficientProvider::fallback();
        let (set, clamped) = provider.evaluate(0.0, 0.0, 0.1);
        assert!(!clamped);
        assert_eq!(set.c0[CZ], 0.0);
        assert_eq!(set.c0[CM], 0.0);
        assert_eq!(set.c0[CX], -0.30);
        assert_eq!(set.cq[CM], -200.0);
    }

    #[test]
    fn fallback_slopes_scale_with_alpha() {
        let provider = CoefficientProvider::fallback();
        let (set, _) = provider.evaluate(0.1, 0.0, 0.0);
        assert_relative_eq!(set.c0[CZ], -0.2, max_relative = 1e-12);
        assert_relative_eq!(set.c0[CM], -0.05, max_relative = 1e-12);
    }

    const TWO_POINT: &str = "\
alpha_deg, beta_deg, mach, cx0, cz0, cm0, cmq
0.0,  0.0, 0.0, -0.10, 0.0, 0.0, -150.0
10.0, 0.0, 0.0, -0.20, -0.4, -0.1, -250.0
";

    #[test]
    fn table_midpoint_is_arithmetic_mean() {
        let table = CoefficientTable::parse(TWO_POINT, "inline").unwrap();
        let provider = CoefficientProvider::Table(table);
        let (set, clamped) = provider.evaluate(5.0f64.to_radians(), 0.0, 0.0);
        assert!(!clamped);
        assert_relative_eq!(set.c0[CX], -0.15, max_relative = 1e-12);
        assert_relative_eq!(set.c0[CZ], -0.2, max_relative = 1e-12);
        assert_relative_eq!(set.cq[CM], -200.0, max_relative = 1e-12);
    }

    #[test]
    fn out_of_grid_queries_clamp_and_are_recorded() {
        let provider =
            CoefficientProvider::Table(CoefficientTable::parse(TWO_POINT, "inline").unwrap());
        let (set, clamped) = provider.evaluate(20.0f64.to_radians(), 0.0, 0.0);
        assert!(clamped);
        assert_relative_eq!(set.c0[CX], -0.20, max_relative = 1e-12);
        assert_eq!(provider.clamp_count(), 1);
        provider.evaluate(5.0f64.to_radians(), 0.0, 0.0);
        assert_eq!(provider.clamp_count(), 1);
    }

    #[test]
    fn malformed_tables_are_rejected_with_location() {
        let missing_axis = "alpha_deg, mach, cx0\n0, 0, -0.1\n";
        let e = CoefficientTable::parse(missing_axis, "t.csv").unwrap_err();
        assert!(e.to_string().contains("beta_deg"), "{e}");

        let unknown = "alpha_deg, beta_deg, mach, bogus\n0,0,0,1\n";
        let e = CoefficientTable::parse(unknown, "t.csv").unwrap_err();
        assert!(e.to_string().contains("bogus"), "{e}");

        let not_product = "\
alpha_deg, beta_deg, mach, cx0
0, 0, 0, -0.1
10, 0, 0, -0.2
10, 5, 0, -0.2
";
        let e = CoefficientTable::parse(not_product, "t.csv").unwrap_err();
        assert!(e.to_string().contains("Cartesian"), "{e}");
    }

    #[test]
    fn trilinear_interpolation_on_a_cube() {
        // 2x1x2 grid; value linear in alpha and mach so interpolation is exact.
        let text = "\
alpha_deg beta_deg mach cz0
0  0 0.0  0.0
0  0 1.0  1.0
10 0 0.0  2.0
10 0 1.0  3.0
";
        let t = CoefficientTable::parse(text, "inline").unwrap();
        let (set, clamped) = t.interpolate(2.5, 0.0, 0.25);
        assert!(!clamped);
        assert_relative_eq!(set.c0[CZ], 0.75, max_relative = 1e-12);
    }
}
