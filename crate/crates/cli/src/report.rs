//! Machine-readable report and the matching human tables.

use hamsym_core::dynamics::{Drift, TrajectoryStatus};
use hamsym_core::geometry::{GeometryReport, Matrix};
use serde::Serialize;

use crate::manifest::Manifest;

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub manifest: Option<Manifest>,
    pub conventions: Conventions,
    pub geometry: Vec<GeometryBlock>,
    pub symmetry: SymmetrySection,
    pub trajectories: Vec<TrajectoryBlock>,
    pub verdicts: Vec<VerdictSummary>,
}

impl Report {
    pub fn new(manifest: Option<Manifest>, seed: u64, tol_scale: f64) -> Report {
        Report {
            manifest,
            conventions: Conventions::new(seed, tol_scale),
            geometry: Vec::new(),
            symmetry: SymmetrySection::default(),
            trajectories: Vec::new(),
            verdicts: Vec::new(),
        }
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn to_json(&self) -> String {
        let mut value = serde_json::to_value(self).expect("report serializes");
        clear_negative_zeros(&mut value);
        let mut s = serde_json::to_string_pretty(&value).expect("report serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Conventions {
    pub coordinates: &'static str,
    pub slots: &'static str,
    pub poisson_bracket: &'static str,
    pub hamiltonian_field: &'static str,
    pub symplectic_form: &'static str,
    pub connection: &'static str,
    pub curvature: &'static str,
    pub complete_lift_sign: &'static str,
    pub complete_lift: &'static str,
    pub seed: u64,
    pub tolerance_scale: f64,
}

impl Conventions {
    fn new(seed: u64, tolerance_scale: f64) -> Conventions {
        Conventions {
            coordinates: "(x1..xn, p1..pn)",
            slots: "zero-based; x_i -> i, p_i -> n+i; tensors indexed [i][j][k] in that order",
            poisson_bracket: "{f,H} = df/dp_i dH/dx^i - dH/dp_i df/dx^i",
            hamiltonian_field: "rho_H = dH/dp_i d/dx^i - dH/dx^i d/dp_i",
            symplectic_form: "omega = dp_i ^ dx^i, theta = p_i dx^i",
            connection: "N_ij = 1/2({g_ij,H} - g_ik d2H/dp_k dx^j - g_jk d2H/dp_k dx^i)",
            curvature: "R_ijk = delta_i N_jk - delta_j N_ik, delta_i = d/dx^i + N_ij d/dp_j",
            complete_lift_sign: "minus",
            complete_lift: "X^i(x) d/dx^i - p_j dX^j/dx^i d/dp_i",
            seed,
            tolerance_scale,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GeometryBlock {
    pub point: String,
    pub report: GeometryReport,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SymmetrySection {
    pub fields: Vec<FieldBlock>,
    pub lifts: Vec<LiftBlock>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FieldBlock {
    pub field: String,
    pub kind: &'static str,
    pub sample_count: usize,
    pub checks: Vec<Check>,
}

/// One notion judged over the sample set.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub notion: &'static str,
    pub residual: &'static str,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Sample point with the largest residual.
    pub worst_point: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LiftBlock {
    pub field: String,
    pub point: String,
    pub lift: &'static str,
    /// `(X^1..X^n, Y_1..Y_n)`.
    pub components: Vec<f64>,
    pub momentum_map: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryBlock {
    pub run: String,
    pub start: String,
    pub dt: f64,
    pub steps: usize,
    pub steps_taken: usize,
    pub status: TrajectoryStatus,
    pub final_state: Vec<f64>,
    pub drift: Vec<Drift>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictSummary {
    pub subject: String,
    pub check: String,
    pub pass: bool,
    pub tolerance: Option<f64>,
    pub detail: String,
}

fn clear_negative_zeros(value: &mut serde_json::Value) {
    match value {
        serde_json::Value::Number(n) if n.as_f64() == Some(0.0) && n.is_f64() => {
            *value = serde_json::json!(0.0);
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(clear_negative_zeros),
        serde_json::Value::Object(map) => map.values_mut().for_each(clear_negative_zeros),
        _ => {}
    }
}

/// Shortest round-trip text, without negative zeros.
pub fn num(x: f64) -> String {
    let x = x + 0.0;
    if x == 0.0 || !x.is_finite() || (1e-5..1e16).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn pass_fail(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn format_vector(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|&x| num(x)).collect();
    format!("[{}]", items.join(", "))
}

pub fn format_matrix(m: &Matrix) -> String {
    let rows: Vec<String> = m.iter().map(|r| format_vector(r)).collect();
    format!("[{}]", rows.join(", "))
}

pub fn geometry_table(block: &GeometryBlock) -> String {
    let r = &block.report;
    let mut out = String::new();
    let mut line = |label: &str, value: String| out.push_str(&format!("  {label:<24} {value}\n"));
    line("point", format_vector(&r.point.coords()));
    line("H", num(r.hamiltonian));
    line("g^ij", format_matrix(&r.g_upper));
    line("g_ij", format_matrix(&r.g_lower));
    line("metric rcond", format!("{:e}", r.metric_rcond));
    line("xi", format_vector(&r.xi));
    line("chi", format_vector(&r.chi));
    line("N", format_matrix(&r.connection));
    for (i, plane) in r.curvature.iter().enumerate() {
        line(&format!("R[{i}]"), format_matrix(plane));
    }
    line("Jacobi", format_matrix(&r.jacobi));
    line(
        "Jacobi (contraction)",
        format_matrix(&r.jacobi_via_curvature),
    );
    line("nabla_h", format_matrix(&r.nabla_h));
    line("nabla_v", format_matrix(&r.nabla_v));
    for (name, t) in [
        ("Berwald HH", &r.berwald.hh),
        ("Berwald HV", &r.berwald.hv),
        ("Berwald VH", &r.berwald.vh),
        ("Berwald VV", &r.berwald.vv),
    ] {
        for (i, plane) in t.iter().enumerate() {
            line(&format!("{name}[{i}]"), format_matrix(plane));
        }
    }
    line(
        "horizontal",
        format!(
            "{} (residual {:e}, tolerance {:e})",
            r.horizontal.horizontal,
            hamsym_core::geometry::max_abs(&r.horizontal.residual),
            r.horizontal.tolerance
        ),
    );
    line("nabla J residual", format_matrix(&r.nabla_j_residual));
    line("nabla g residual", format_matrix(&r.nabla_metric_residual));
    format!("geometry at `{}`\n{out}", block.point)
}

pub fn field_table(block: &FieldBlock) -> String {
    let mut out = format!(
        "field `{}` ({}, {} sample points)\n",
        block.field, block.kind, block.sample_count
    );
    for c in &block.checks {
        out.push_str(&format!(
            "  {:<24} {} ({} max = {:e}, tolerance {:e})\n",
            format!("{}:", c.notion),
            pass_fail(c.pass),
            c.residual,
            c.max_residual,
            c.tolerance
        ));
    }
    out
}

pub fn lift_table(block: &LiftBlock) -> String {
    let mut out = format!(
        "{} of `{}` at `{}`\n  components {}\n",
        block.lift,
        block.field,
        block.point,
        format_vector(&block.components)
    );
    if let Some(m) = block.momentum_map {
        out.push_str(&format!("  momentum map {}\n", num(m)));
    }
    out
}

pub fn trajectory_table(block: &TrajectoryBlock) -> String {
    let status = match &block.status {
        TrajectoryStatus::Completed => "completed".to_string(),
        TrajectoryStatus::DomainError { step, message } => {
            format!("domain error at step {step}: {message}")
        }
        TrajectoryStatus::BlowUp { step } => format!("blow-up at step {step}"),
    };
    let mut out = format!(
        "run `{}` from `{}`: dt = {}, {} of {} steps, {status}\n  final state {}\n  {:<12} {:<24} {}\n",
        block.run,
        block.start,
        num(block.dt),
        block.steps_taken,
        block.steps,
        format_vector(&block.final_state),
        "quantity",
        "initial",
        "max drift"
    );
    for d in &block.drift {
        out.push_str(&format!(
            "  {:<12} {:<24} {:e}\n",
            d.name,
            num(d.initial),
            d.max_drift
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_in_both_outputs() {
        let v = [0.1 + 0.2, -2.0, 1e-300, 2.5];
        let text = format_vector(&v);
        assert_eq!(text, "[0.30000000000000004, -2, 1e-300, 2.5]");
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(json, "[0.30000000000000004,-2.0,1e-300,2.5]");
        let back: Vec<f64> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn negative_zeros_are_cleared() {
        assert_eq!(format_vector(&[-0.0, 0.0]), "[0, 0]");
        let mut v = serde_json::json!({"a": [-0.0, 1.5], "b": -0.0});
        clear_negative_zeros(&mut v);
        assert_eq!(v.to_string(), r#"{"a":[0.0,1.5],"b":0.0}"#);
    }
}
