//! Acceptance criteria run against the built-in manifests.

use hamsym_core::dynamics::{berwald_vs_nabla, drift_report, geodesic_residual, integrate_rk4};
use hamsym_core::expr::{evaluate, parse, HamiltonianSpec};
use hamsym_core::fields::{HamiltonianField, PhaseField};
use hamsym_core::geometry::{max_abs, max_abs_matrix, LocalGeometry, Matrix};
use hamsym_core::jets::{fd_oracle, jet_lift};
use hamsym_core::sampling::sample_points;
use hamsym_core::symmetry::{
    invariant_equation_residual, lie_derivative_theta, momentum_map, noether_from_conservation,
    noether_residual, symmetry_residual, BaseVectorFieldSpec, CompleteLift, LiftSign,
    VectorFieldSpec,
};
use hamsym_core::PhasePoint;
use serde::Serialize;

use crate::commands::{field_block, Context, Outcome};
use crate::manifest::{Field, Manifest, Model};
use crate::report::{pass_fail, Report, VerdictSummary};
use crate::{EXIT_CHECK_FAILED, EXIT_PASS};

const REFERENCE_H: &str = "0.5*(p1^2+(p1*x1+p2)^2)";

pub const TITLES: [&str; 12] = [
    "closed-form connection and curvature",
    "metric and its inverse",
    "horizontality and geodesics",
    "Jacobi endomorphism, two routes",
    "nabla J vanishes; affine sensitivity",
    "Berwald derivative along rho equals nabla",
    "symmetry suite",
    "conservation, momentum map and RK4 drift",
    "complete lift preserves theta",
    "free particle is flat and translation invariant",
    "jets agree with finite differences",
    "control Hamiltonian builder",
];

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub seed: Option<u64>,
    /// Sign convention of the complete lift under test.
    pub lift_sign: LiftSign,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            seed: None,
            lift_sign: LiftSign::Minus,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {}: {} ({})",
            self.id,
            pass_fail(self.pass),
            self.title,
            self.detail
        )
    }
}

struct Setup {
    ctx: Context,
    points: Vec<PhasePoint>,
}

fn setup(name: &str, opts: &Options) -> Setup {
    let model = Model::new(Manifest::builtin(name).expect("built-in"))
        .expect("built-in manifests validate");
    let ctx = Context::new(model, opts.seed, 1.0).expect("unit scale");
    let points = ctx.samples();
    Setup { ctx, points }
}

fn close(a: f64, b: f64, rel: f64, abs: f64) -> bool {
    (a - b).abs() <= (rel * b.abs()).max(abs)
}

type Check = Result<(bool, String), String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

pub fn run(id: usize, opts: &Options) -> CriterionResult {
    let outcome = match id {
        1 => criterion_1(opts),
        2 => criterion_2(opts),
        3 => criterion_3(opts),
        4 => criterion_4(opts),
        5 => criterion_5(opts),
        6 => criterion_6(opts),
        7 => criterion_7(opts),
        8 => criterion_8(opts),
        9 => criterion_9(opts),
        10 => criterion_10(opts),
        11 => criterion_11(opts),
        12 => criterion_12(opts),
        _ => Err(format!("no criterion {id}")),
    };
    let (pass, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    CriterionResult {
        id,
        title: TITLES.get(id.wrapping_sub(1)).copied().unwrap_or("unknown"),
        pass,
        detail,
    }
}

pub fn run_all(opts: &Options) -> Vec<CriterionResult> {
    (1..=12).map(|id| run(id, opts)).collect()
}

pub fn selftest(opts: &Options) -> Outcome {
    let results = run_all(opts);
    let seed = opts.seed.unwrap_or(
        Manifest::builtin("paper-example")
            .expect("built-in")
            .sampling
            .seed,
    );
    let mut report = Report::new(None, seed, 1.0);
    let mut text = String::new();
    for r in &results {
        text.push_str(&r.line());
        text.push('\n');
        report.verdicts.push(VerdictSummary {
            subject: format!("criterion {}", r.id),
            check: r.title.to_string(),
            pass: r.pass,
            tolerance: None,
            detail: r.detail.clone(),
        });
    }
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

fn geometry(h: &HamiltonianSpec, p: &PhasePoint) -> Result<LocalGeometry, String> {
    LocalGeometry::new(h, p).map_err(err)
}

fn criterion_1(opts: &Options) -> Check {
    let s = setup("paper-example", opts);
    let h = &s.ctx.model.hamiltonian;
    let mut worst_n = 0.0f64;
    let mut connection_ok = true;
    let mut curvature_bad = 0usize;
    let mut example = String::new();
    for p in &s.points {
        let g = geometry(h, p)?;
        let (x1, p1, p2) = (p.x()[0], p.p()[0], p.p()[1]);
        let u = p1 * x1 + p2;
        let closed_n = [
            [-u, x1 * u],
            [x1 * u, -x1 * (p1 * (1.0 + x1 * x1) + p2 * x1)],
        ];
        let n = g.connection();
        for i in 0..2 {
            for j in 0..2 {
                let (a, b) = (n[i][j], closed_n[i][j]);
                worst_n = worst_n.max((a - b).abs() / b.abs().max(1e-3));
                connection_ok &= close(a, b, 1e-9, 1e-12);
            }
        }
        let mut closed_r = [[[0.0; 2]; 2]; 2];
        closed_r[0][1][0] = 2.0 * p1 * x1 + p2;
        closed_r[1][0][1] = p1 + 2.0 * p1 * x1 * x1 + p2 * x1;
        let r = g.curvature();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    let (a, b) = (r[i][j][k], closed_r[i][j][k]);
                    if !close(a, b, 1e-9, 1e-12) {
                        curvature_bad += 1;
                        if example.is_empty() {
                            example = format!(
                                "; first mismatch at {:?}: R[{i}][{j}][{k}] computed {a}, closed form {b}",
                                p.coords()
                            );
                        }
                    }
                }
            }
        }
    }
    let total = 8 * s.points.len();
    Ok((
        connection_ok && curvature_bad == 0,
        format!(
            "connection {} (max rel err {worst_n:e}); curvature {} of {total} entries match the closed forms{example}",
            pass_fail(connection_ok),
            total - curvature_bad
        ),
    ))
}

fn criterion_2(opts: &Options) -> Check {
    let s = setup("paper-example", opts);
    let h = &s.ctx.model.hamiltonian;
    let mut closed_ok = true;
    let mut identity_err = 0.0f64;
    for p in &s.points {
        let g = geometry(h, p)?;
        let x1 = p.x()[0];
        let closed = [[1.0 + x1 * x1, x1], [x1, 1.0]];
        let (up, low) = g.metric();
        for i in 0..2 {
            for j in 0..2 {
                closed_ok &= close(up[i][j], closed[i][j], 1e-12, 1e-12);
                let prod: f64 = (0..2).map(|k| up[i][k] * low[k][j]).sum();
                identity_err = identity_err.max((prod - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
    }
    Ok((
        closed_ok && identity_err <= 1e-12,
        format!(
            "closed-form Hessian {}; max |g^ik g_kj - I| = {identity_err:e}",
            pass_fail(closed_ok)
        ),
    ))
}

fn criterion_3(opts: &Options) -> Check {
    let s = setup("paper-example", opts);
    let h = &s.ctx.model.hamiltonian;
    let (mut horiz, mut geo) = (0.0f64, 0.0f64);
    for p in &s.points {
        horiz = horiz.max(max_abs(&geometry(h, p)?.horizontal_residual()));
        geo = geo.max(max_abs(&geodesic_residual(h, p).map_err(err)?));
    }
    Ok((
        horiz < 1e-10 && geo < 1e-8,
        format!("horizontal residual {horiz:e}, geodesic residual {geo:e}"),
    ))
}

fn criterion_4(opts: &Options) -> Check {
    let s = setup("paper-example", opts);
    let h = &s.ctx.model.hamiltonian;
    let mut diff = 0.0f64;
    for p in &s.points {
        let g = geometry(h, p)?;
        let (a, b) = (g.jacobi_endomorphism(), g.jacobi_via_curvature());
        for i in 0..2 {
            for j in 0..2 {
                diff = diff.max((a[i][j] - b[i][j]).abs());
            }
        }
    }
    Ok((diff < 1e-8, format!("max route difference {diff:e}")))
}

fn criterion_5(opts: &Options) -> Check {
    let s = setup("paper-example", opts);
    let h = &s.ctx.model.hamiltonian;
    let (mut canonical, mut affine) = (0.0f64, 0.0f64);
    for p in &s.points {
        let g = geometry(h, p)?;
        let n = g.connection();
        canonical = canonical.max(max_abs_matrix(&g.nabla_j_residual(&n).map_err(err)?));
        let shifted: Matrix = (0..2)
            .map(|i| {
                (0..2)
                    .map(|j| n[i][j] + if i == j { 0.1 } else { 0.0 })
                    .collect()
            })
            .collect();
        let r = g.nabla_j_residual(&shifted).map_err(err)?;
        for i in 0..2 {
            for j in 0..2 {
                affine = affine.max((r[i][j] - if i == j { 0.2 } else { 0.0 }).abs());
            }
        }
    }
    Ok((
        canonical < 1e-9 && affine <= 1e-12,
        format!("canonical residual {canonical:e}; perturbed residual minus 0.2 I {affine:e}"),
    ))
}

fn criterion_6(opts: &Options) -> Check {
    let s = setup("paper-example", opts);
    let h = &s.ctx.model.hamiltonian;
    let fields: Vec<Box<dyn PhaseField>> = vec![
        Box::new(VectorFieldSpec::parse(2, &["0", "0"], &["1", "0"]).map_err(err)?),
        Box::new(VectorFieldSpec::parse(2, &["0", "0"], &["0", "1"]).map_err(err)?),
        Box::new(VectorFieldSpec::parse(2, &["1", "0"], &["0", "0"]).map_err(err)?),
        Box::new(HamiltonianField { hamiltonian: h }),
    ];
    let mut worst = 0.0f64;
    for p in &s.points {
        for f in &fields {
            worst = worst.max(max_abs(&berwald_vs_nabla(h, f.as_ref(), p).map_err(err)?));
        }
    }
    Ok((
        worst < 1e-8,
        format!("max |D_rho Y - nabla Y| = {worst:e} over 4 fields"),
    ))
}

fn criterion_7(opts: &Options) -> Check {
    let s = setup("paper-example", opts);
    let h = &s.ctx.model.hamiltonian;
    let x = VectorFieldSpec::parse(2, &["0", "p2"], &["0", "0"]).map_err(err)?;
    let rho = HamiltonianField { hamiltonian: h };
    let (mut sym, mut noether, mut inv) = (0.0f64, 0.0f64, 0.0f64);
    for p in &s.points {
        sym = sym.max(max_abs(&symmetry_residual(h, &x, p).map_err(err)?));
        let r = noether_residual(h, &rho, p).map_err(err)?;
        noether = noether.max(r.max_entry()).max(r.x_of_h.abs());
        inv = inv.max(max_abs(
            &invariant_equation_residual(h, &x, p).map_err(err)?,
        ));
    }
    Ok((
        sym < 1e-12 && noether <= 1e-10 && inv < 1e-8,
        format!("[rho, p2 d/dx2] {sym:e}; Noether of rho {noether:e}; invariant equation {inv:e}"),
    ))
}

fn criterion_8(opts: &Options) -> Check {
    let s = setup("paper-example", opts);
    let model = &s.ctx.model;
    let h = &model.hamiltonian;
    let f = parse("p2", 2).map_err(err)?;
    let shift = BaseVectorFieldSpec::parse(2, &["0", "1"]).map_err(err)?;
    let mut noether_ok = true;
    let mut momentum_ok = true;
    for p in &s.points {
        let r = noether_from_conservation(&f, h, p).map_err(err)?;
        noether_ok &= r.field == [0.0, 1.0, 0.0, 0.0]
            && r.noether.max_entry() == 0.0
            && r.noether.x_of_h == 0.0
            && r.rho_f == 0.0
            && r.exactness_residual == 0.0;
        momentum_ok &= momentum_map(&shift, p).map_err(err)? == p.p()[1];
    }
    let run = model.run("default").map_err(err)?;
    let drifts = |dt: f64, steps: usize| -> Result<(f64, f64), String> {
        let t = integrate_rk4(h, &run.start, dt, steps, &run.watch).map_err(err)?;
        if !t.completed() {
            return Err(format!("run stopped: {:?}", t.status));
        }
        let d = drift_report(&t);
        let p2 = d
            .iter()
            .find(|d| d.name == "p2")
            .ok_or("run does not watch p2")?;
        Ok((d[0].max_drift, p2.max_drift))
    };
    let (h_drift, p2_drift) = drifts(run.dt, run.steps)?;
    let (h_fine, _) = drifts(run.dt / 2.0, run.steps * 2)?;
    let ratio = h_drift / h_fine;
    let integration_ok = p2_drift <= 1e-12 && h_drift <= 1e-8 && (12.0..=20.0).contains(&ratio);
    Ok((
        noether_ok && momentum_ok && integration_ok,
        format!(
            "Noether from p2 {}; momentum map {}; p2 drift {p2_drift:e}, H drift {h_drift:e}, halving ratio {ratio}",
            pass_fail(noether_ok),
            pass_fail(momentum_ok)
        ),
    ))
}

pub const POLYNOMIAL_BASE_FIELDS: [[&str; 2]; 10] = [
    ["1", "0"],
    ["0", "1"],
    ["x1", "0"],
    ["x2", "x1"],
    ["x1^2", "0"],
    ["x1*x2", "x2^2"],
    ["x2^3", "-x1"],
    ["x1^2*x2", "x1-x2"],
    ["1+x1+x2", "x1^3"],
    ["x1^4-x2", "2*x1*x2^2"],
];

fn criterion_9(opts: &Options) -> Check {
    let s = setup("paper-example", opts);
    let b = &s.ctx.model.sample_box;
    let points = sample_points(b, 50, s.ctx.seed);
    let mut worst = 0.0f64;
    for comps in POLYNOMIAL_BASE_FIELDS {
        let lift = CompleteLift {
            base: BaseVectorFieldSpec::parse(2, &comps).map_err(err)?,
            sign: opts.lift_sign,
        };
        for p in &points {
            worst = worst.max(max_abs(&lie_derivative_theta(&lift, p).map_err(err)?));
        }
    }
    let sign = match opts.lift_sign {
        LiftSign::Minus => "minus",
        LiftSign::Plus => "plus",
    };
    Ok((
        worst < 1e-10,
        format!("max |L_X theta| = {worst:e} with the {sign} sign"),
    ))
}

fn criterion_10(opts: &Options) -> Check {
    let s = setup("free-particle", opts);
    let model = &s.ctx.model;
    let h = &model.hamiltonian;
    let mut flat = true;
    for p in &s.points {
        let g = geometry(h, p)?;
        let (nh, nv) = g.nabla_coefficients();
        let b = g.berwald_coefficients();
        let mut all: Vec<f64> = g.connection().concat();
        all.extend(g.curvature().concat().concat());
        all.extend(g.jacobi_endomorphism().concat());
        all.extend(g.jacobi_via_curvature().concat());
        all.extend(nh.concat());
        all.extend(nv.concat());
        for t in [&b.hh, &b.hv, &b.vh, &b.vv] {
            all.extend(t.concat().concat());
        }
        flat &= all.iter().all(|v| *v == 0.0);
    }
    let mut failing = Vec::new();
    let mut constants = 0;
    for (name, field) in &model.fields {
        let Field::Base(base) = field else { continue };
        if base
            .components()
            .iter()
            .any(|c| !c.free_variables().is_empty())
        {
            continue;
        }
        constants += 1;
        let block = field_block(&s.ctx, name, &s.points).map_err(err)?;
        for c in block.checks.iter().filter(|c| !c.pass) {
            failing.push(format!("{name}: {}", c.notion));
        }
    }
    let detail = if failing.is_empty() {
        format!(
            "all tensors exactly zero: {flat}; {constants} constant base fields pass every notion"
        )
    } else {
        format!(
            "all tensors exactly zero: {flat}; failing {}",
            failing.join(", ")
        )
    };
    Ok((flat && failing.is_empty() && constants > 0, detail))
}

fn criterion_11(opts: &Options) -> Check {
    let s = setup("paper-example", opts);
    let h = &s.ctx.model.hamiltonian;
    let points = sample_points(&s.ctx.model.sample_box, 50, s.ctx.seed);
    let mut indices: Vec<Vec<usize>> = vec![vec![]];
    for a in 0..4 {
        indices.push(vec![a]);
        for b in a..4 {
            indices.push(vec![a, b]);
            for c in b..4 {
                indices.push(vec![a, b, c]);
            }
        }
    }
    let mut worst = 0.0f64;
    let mut ok = true;
    for p in &points {
        let jet = jet_lift(&h.expr, p, 3).map_err(err)?;
        for m in &indices {
            let exact = jet.partial(m).map_err(err)?;
            let fd = fd_oracle(&h.expr, p, m).map_err(err)?;
            ok &= close(exact, fd, 1e-5, 1e-7);
            worst = worst.max((exact - fd).abs());
        }
    }
    Ok((
        ok,
        format!(
            "{} partials at {} points; max abs difference {worst:e}",
            indices.len(),
            points.len()
        ),
    ))
}

fn criterion_12(opts: &Options) -> Check {
    let s = setup("paper-example", opts);
    let built = &s.ctx.model.hamiltonian;
    let reference = parse(REFERENCE_H, 2).map_err(err)?;
    let mut worst = 0.0f64;
    let mut ok = true;
    for p in &s.points {
        let a = evaluate(&built.expr, p).map_err(err)?;
        let b = evaluate(&reference, p).map_err(err)?;
        ok &= close(a, b, 1e-12, 1e-12);
        worst = worst.max((a - b).abs());
    }
    Ok((ok, format!("max |H_built - H_reference| = {worst:e}")))
}
