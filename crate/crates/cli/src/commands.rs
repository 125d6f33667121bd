//! Subcommand implementations. Each returns a filled [`Report`], the human
//! text and the exit code.

use hamsym_core::dynamics::{drift_report, integrate_rk4, TrajectoryStatus};
use hamsym_core::fields::PhaseField;
use hamsym_core::geometry::{max_abs, LocalGeometry};
use hamsym_core::sampling::sample_points;
use hamsym_core::symmetry::{
    complete_lift, invariant_equation_residual, invariant_vector_field_check, lie_derivative_theta,
    momentum_map, natural_symmetry_residual, newtonoid_invariant_residual, newtonoid_lift,
    newtonoid_residual, noether_residual, symmetry_residual,
};
use hamsym_core::PhasePoint;

use crate::manifest::{Field, Model, Tolerances};
use crate::report::{
    field_table, geometry_table, lift_table, pass_fail, trajectory_table, Check, FieldBlock,
    GeometryBlock, LiftBlock, Report, TrajectoryBlock, VerdictSummary,
};
use crate::{CliError, EXIT_CHECK_FAILED, EXIT_PASS};

/// Everything a command needs besides its own arguments.
#[derive(Debug, Clone)]
pub struct Context {
    pub model: Model,
    pub seed: u64,
    pub tol_scale: f64,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub text: String,
    pub exit_code: u8,
}

impl Context {
    pub fn new(model: Model, seed: Option<u64>, tol_scale: f64) -> Result<Context, CliError> {
        if !(tol_scale.is_finite() && tol_scale > 0.0) {
            return Err(CliError::Manifest(format!(
                "--tol-scale must be positive, got {tol_scale}"
            )));
        }
        let seed = seed.unwrap_or(model.manifest.sampling.seed);
        Ok(Context {
            model,
            seed,
            tol_scale,
        })
    }

    pub fn tolerances(&self) -> Tolerances {
        self.model.manifest.tolerances.scaled(self.tol_scale)
    }

    pub fn samples(&self) -> Vec<PhasePoint> {
        sample_points(
            &self.model.sample_box,
            self.model.manifest.sampling.count,
            self.seed,
        )
    }

    fn empty_report(&self) -> Report {
        Report::new(Some(self.model.manifest.clone()), self.seed, self.tol_scale)
    }
}

fn finish(report: Report, text: String) -> Outcome {
    let exit_code = if report.all_pass() {
        EXIT_PASS
    } else {
        EXIT_CHECK_FAILED
    };
    Outcome {
        report,
        text,
        exit_code,
    }
}

/// Geometry at one named point, or at every declared point.
pub fn report(ctx: &Context, point: Option<&str>) -> Result<Outcome, CliError> {
    let names: Vec<String> = match point {
        Some(name) => {
            ctx.model.point(name)?;
            vec![name.to_string()]
        }
        None => ctx.model.points.iter().map(|(n, _)| n.clone()).collect(),
    };
    let tol = ctx.tolerances();
    let mut report = ctx.empty_report();
    let mut text = String::new();
    for name in names {
        let p = ctx.model.point(&name)?;
        let g = LocalGeometry::new(&ctx.model.hamiltonian, p)
            .map_err(|e| CliError::from_core(&format!("point `{name}`"), e))?;
        let block = GeometryBlock {
            point: name.clone(),
            report: g.report(tol.horizontal),
        };
        text.push_str(&geometry_table(&block));
        report.geometry.push(block);
    }
    Ok(finish(report, text))
}

/// Largest residual over the sample set and where it occurs.
fn sweep(
    points: &[PhasePoint],
    what: &str,
    mut residual: impl FnMut(&PhasePoint) -> hamsym_core::Result<f64>,
) -> Result<(f64, Vec<f64>), CliError> {
    let mut worst = (f64::NEG_INFINITY, Vec::new());
    for p in points {
        let r = residual(p)
            .map_err(|e| CliError::from_core(&format!("{what} at {:?}", p.coords()), e))?;
        // NaN counts as the worst case
        if r.is_nan() || r > worst.0 || worst.1.is_empty() {
            worst = (r, p.coords());
            if r.is_nan() {
                break;
            }
        }
    }
    Ok(worst)
}

fn kind_name(field: &Field) -> &'static str {
    match field {
        Field::Full(_) => "full",
        Field::Base(_) => "base",
        Field::Hamiltonian => "hamiltonian",
        Field::Newtonoid(_) => "newtonoid",
    }
}

/// Every symmetry notion for one field over the sample set.
pub fn field_block(
    ctx: &Context,
    name: &str,
    points: &[PhasePoint],
) -> Result<FieldBlock, CliError> {
    let model = &ctx.model;
    let h = &model.hamiltonian;
    let field = model.field(name)?;
    let x = model.phase_field(field);
    let x: &dyn PhaseField = x.as_ref();
    let tol = ctx.tolerances();
    let mut checks = Vec::new();
    let mut check = |notion: &'static str,
                     residual: &'static str,
                     tolerance: f64,
                     f: &mut dyn FnMut(&PhasePoint) -> hamsym_core::Result<f64>|
     -> Result<(), CliError> {
        let (max_residual, worst_point) = sweep(points, &format!("field `{name}`, {notion}"), f)?;
        checks.push(Check {
            notion,
            residual,
            max_residual,
            tolerance,
            pass: max_residual <= tolerance,
            worst_point,
        });
        Ok(())
    };
    check(
        "infinitesimal symmetry",
        "|[rho_H, X]|",
        tol.symmetry,
        &mut |p| Ok(max_abs(&symmetry_residual(h, x, p)?)),
    )?;
    check("Newtonoid", "|J[rho_H, X]|", tol.newtonoid, &mut |p| {
        Ok(max_abs(&newtonoid_residual(h, x, p)?))
    })?;
    check(
        "Newtonoid (nabla form)",
        "|v(X) - J(nabla X)|",
        tol.newtonoid,
        &mut |p| Ok(max_abs(&newtonoid_invariant_residual(h, x, p)?)),
    )?;
    check(
        "Noether",
        "L_X omega max |entry|, |X(H)|",
        tol.noether,
        &mut |p| {
            let r = noether_residual(h, x, p)?;
            Ok(r.max_entry().max(r.x_of_h.abs()))
        },
    )?;
    check(
        "invariant equation",
        "|nabla^2(g X) + Phi X|",
        tol.invariant_equation,
        &mut |p| Ok(max_abs(&invariant_equation_residual(h, x, p)?)),
    )?;
    if let Field::Base(base) = field {
        check(
            "natural symmetry",
            "|[rho_H, X^C*]|",
            tol.symmetry,
            &mut |p| Ok(max_abs(&natural_symmetry_residual(h, base, p)?)),
        )?;
        check(
            "invariant vector field",
            "|X^C*(H)|",
            tol.invariant_vector_field,
            &mut |p| invariant_vector_field_check(h, base, p).map(f64::abs),
        )?;
        let lift = complete_lift(base);
        check(
            "lift preserves theta",
            "|L_X theta|",
            tol.lie_theta,
            &mut |p| Ok(max_abs(&lie_derivative_theta(&lift, p)?)),
        )?;
    }
    Ok(FieldBlock {
        field: name.to_string(),
        kind: kind_name(field),
        sample_count: points.len(),
        checks,
    })
}

fn summarize(block: &FieldBlock) -> Vec<VerdictSummary> {
    block
        .checks
        .iter()
        .map(|c| VerdictSummary {
            subject: format!("field `{}`", block.field),
            check: c.notion.to_string(),
            pass: c.pass,
            tolerance: Some(c.tolerance),
            detail: format!("{} max = {:e}", c.residual, c.max_residual),
        })
        .collect()
}

/// Symmetry verdicts for one named field, or for every declared field.
pub fn symmetry(ctx: &Context, field: Option<&str>) -> Result<Outcome, CliError> {
    let names: Vec<String> = match field {
        Some(name) => {
            ctx.model.field(name)?;
            vec![name.to_string()]
        }
        None => ctx.model.fields.iter().map(|(n, _)| n.clone()).collect(),
    };
    let points = ctx.samples();
    let mut report = ctx.empty_report();
    let mut text = String::new();
    for name in names {
        let block = field_block(ctx, &name, &points)?;
        text.push_str(&field_table(&block));
        report.verdicts.extend(summarize(&block));
        report.symmetry.fields.push(block);
    }
    Ok(finish(report, text))
}

/// Complete lift of a base field or Newtonoid lift of a position field at a point.
pub fn lift(ctx: &Context, field: &str, point: &str) -> Result<Outcome, CliError> {
    let model = &ctx.model;
    let p = model.point(point)?;
    let context = format!("lift of `{field}` at `{point}`");
    let block = match model.field(field)? {
        Field::Base(base) => LiftBlock {
            field: field.to_string(),
            point: point.to_string(),
            lift: "complete lift",
            components: complete_lift(base)
                .values(p)
                .map_err(|e| CliError::from_core(&context, e))?,
            momentum_map: Some(
                momentum_map(base, p).map_err(|e| CliError::from_core(&context, e))?,
            ),
        },
        Field::Newtonoid(x) => LiftBlock {
            field: field.to_string(),
            point: point.to_string(),
            lift: "Newtonoid lift",
            components: newtonoid_lift(&model.hamiltonian, x, p)
                .map_err(|e| CliError::from_core(&context, e))?,
            momentum_map: None,
        },
        _ => {
            return Err(CliError::Manifest(format!(
                "field `{field}` is neither a base field nor a Newtonoid field"
            )))
        }
    };
    let mut report = ctx.empty_report();
    let text = lift_table(&block);
    report.symmetry.lifts.push(block);
    Ok(finish(report, text))
}

/// Integrates one named run, or every declared run.
pub fn integrate(ctx: &Context, run: Option<&str>) -> Result<Outcome, CliError> {
    let model = &ctx.model;
    let runs: Vec<_> = match run {
        Some(name) => vec![model.run(name)?],
        None => model.runs.iter().collect(),
    };
    let mut report = ctx.empty_report();
    let mut text = String::new();
    for run in runs {
        let context = format!("run `{}`", run.name);
        let traj = integrate_rk4(
            &model.hamiltonian,
            &run.start,
            run.dt,
            run.steps,
            &run.watch,
        )
        .map_err(|e| CliError::from_core(&context, e))?;
        let block = TrajectoryBlock {
            run: run.name.clone(),
            start: run.start_name.clone(),
            dt: run.dt,
            steps: run.steps,
            steps_taken: traj.states.len() - 1,
            status: traj.status.clone(),
            final_state: traj.states.last().expect("start state").coords(),
            drift: drift_report(&traj),
        };
        text.push_str(&trajectory_table(&block));
        let completed = block.status == TrajectoryStatus::Completed;
        report.verdicts.push(VerdictSummary {
            subject: context,
            check: "integration completed".to_string(),
            pass: completed,
            tolerance: None,
            detail: format!("{} of {} steps", block.steps_taken, block.steps),
        });
        report.trajectories.push(block);
    }
    Ok(finish(report, text))
}

/// Human line for one verdict.
pub fn verdict_line(v: &VerdictSummary) -> String {
    format!(
        "{}: {} {} ({})",
        v.subject,
        v.check,
        pass_fail(v.pass),
        v.detail
    )
}
