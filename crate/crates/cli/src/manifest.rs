//! Manifest schema, built-in manifests and validation into a [`Model`].

use std::collections::HashSet;
use std::path::Path;

use hamsym_core::expr::{parse, pmp_hamiltonian, ControlAffineSystem, Expr, HamiltonianSpec};
use hamsym_core::fields::{HamiltonianField, PhaseField};
use hamsym_core::sampling::SampleBox;
use hamsym_core::symmetry::{complete_lift, BaseVectorFieldSpec, NewtonoidLift, VectorFieldSpec};
use hamsym_core::PhasePoint;
use serde::{Deserialize, Serialize};

use crate::CliError;

const PAPER_EXAMPLE: &str = include_str!("manifests/paper-example.json");
const FREE_PARTICLE: &str = include_str!("manifests/free-particle.json");

pub const BUILTINS: [&str; 2] = ["paper-example", "free-particle"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub name: String,
    pub dim: usize,
    pub hamiltonian: HamiltonianSource,
    #[serde(default)]
    pub fields: Vec<FieldDecl>,
    #[serde(default)]
    pub points: Vec<PointDecl>,
    #[serde(default)]
    pub runs: Vec<RunDecl>,
    #[serde(default)]
    pub sampling: Sampling,
    #[serde(default)]
    pub tolerances: Tolerances,
}

/// Either an expression or the generators of a driftless control-affine
/// system, whose quadratic-cost Hamiltonian is built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum HamiltonianSource {
    Expr(String),
    Control(Vec<Vec<String>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldDecl {
    /// `X^i ∂/∂x^i + Y_i ∂/∂p_i`.
    Full {
        name: String,
        x: Vec<String>,
        p: Vec<String>,
    },
    /// A base field, used through its complete lift.
    Base {
        name: String,
        components: Vec<String>,
    },
    /// The Hamiltonian field `ρ_H`.
    Hamiltonian { name: String },
    /// The Newtonoid field with the given position components.
    Newtonoid { name: String, x: Vec<String> },
}

impl FieldDecl {
    pub fn name(&self) -> &str {
        match self {
            FieldDecl::Full { name, .. }
            | FieldDecl::Base { name, .. }
            | FieldDecl::Hamiltonian { name }
            | FieldDecl::Newtonoid { name, .. } => name,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointDecl {
    pub name: String,
    pub x: Vec<f64>,
    pub p: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunDecl {
    pub name: String,
    /// Name of a declared point.
    pub start: String,
    pub dt: f64,
    pub steps: usize,
    #[serde(default)]
    pub watch: Vec<WatchDecl>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WatchDecl {
    pub name: String,
    pub expr: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sampling {
    /// Range of every position coordinate.
    pub x: [f64; 2],
    /// Range of every momentum coordinate.
    pub p: [f64; 2],
    pub count: usize,
    pub seed: u64,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling {
            x: [-2.0, 2.0],
            p: [0.2, 2.0],
            count: 100,
            seed: 11,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub symmetry: f64,
    pub newtonoid: f64,
    pub noether: f64,
    pub invariant_equation: f64,
    pub invariant_vector_field: f64,
    pub lie_theta: f64,
    pub horizontal: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            symmetry: 1e-10,
            newtonoid: 1e-9,
            noether: 1e-10,
            invariant_equation: 1e-8,
            invariant_vector_field: 1e-10,
            lie_theta: 1e-10,
            horizontal: 1e-10,
        }
    }
}

impl Tolerances {
    pub fn scaled(&self, factor: f64) -> Tolerances {
        Tolerances {
            symmetry: self.symmetry * factor,
            newtonoid: self.newtonoid * factor,
            noether: self.noether * factor,
            invariant_equation: self.invariant_equation * factor,
            invariant_vector_field: self.invariant_vector_field * factor,
            lie_theta: self.lie_theta * factor,
            horizontal: self.horizontal * factor,
        }
    }
}

impl Manifest {
    pub fn builtin(name: &str) -> Option<Manifest> {
        let text = match name {
            "paper-example" => PAPER_EXAMPLE,
            "free-particle" => FREE_PARTICLE,
            _ => return None,
        };
        Some(serde_json::from_str(text).expect("built-in manifests are valid"))
    }

    pub fn from_json(text: &str) -> Result<Manifest, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Manifest(e.to_string()))
    }

    /// A file path, or the name of a built-in manifest when no such file exists.
    pub fn load(source: &str) -> Result<Manifest, CliError> {
        let path = Path::new(source);
        if !path.exists() {
            if let Some(m) = Manifest::builtin(source) {
                return Ok(m);
            }
        }
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Manifest(format!("cannot read {source}: {e}")))?;
        Manifest::from_json(&text)
    }
}

#[derive(Debug, Clone)]
pub enum Field {
    Full(VectorFieldSpec),
    Base(BaseVectorFieldSpec),
    Hamiltonian,
    Newtonoid(Vec<Expr>),
}

#[derive(Debug, Clone)]
pub struct Run {
    pub name: String,
    pub start: PhasePoint,
    pub start_name: String,
    pub dt: f64,
    pub steps: usize,
    pub watch: Vec<(String, Expr)>,
}

/// A validated manifest.
#[derive(Debug, Clone)]
pub struct Model {
    pub manifest: Manifest,
    pub hamiltonian: HamiltonianSpec,
    pub fields: Vec<(String, Field)>,
    pub points: Vec<(String, PhasePoint)>,
    pub runs: Vec<Run>,
    pub sample_box: SampleBox,
}

fn manifest_err(msg: impl Into<String>) -> CliError {
    CliError::Manifest(msg.into())
}

fn parse_all(texts: &[String], dim: usize, what: &str) -> Result<Vec<Expr>, CliError> {
    if texts.len() != dim {
        return Err(manifest_err(format!(
            "{what}: expected {dim} components, found {}",
            texts.len()
        )));
    }
    texts
        .iter()
        .map(|t| parse(t, dim).map_err(|e| manifest_err(format!("{what}: {e}"))))
        .collect()
}

fn check_unique<'a>(names: impl Iterator<Item = &'a str>, what: &str) -> Result<(), CliError> {
    let mut seen = HashSet::new();
    for n in names {
        if n.is_empty() {
            return Err(manifest_err(format!("empty {what} name")));
        }
        if !seen.insert(n) {
            return Err(manifest_err(format!("duplicate {what} name `{n}`")));
        }
    }
    Ok(())
}

impl Model {
    pub fn new(manifest: Manifest) -> Result<Model, CliError> {
        let n = manifest.dim;
        if n == 0 {
            return Err(manifest_err("dim must be positive"));
        }
        check_unique(manifest.fields.iter().map(FieldDecl::name), "field")?;
        check_unique(manifest.points.iter().map(|p| p.name.as_str()), "point")?;
        check_unique(manifest.runs.iter().map(|r| r.name.as_str()), "run")?;

        let hamiltonian = match &manifest.hamiltonian {
            HamiltonianSource::Expr(text) => HamiltonianSpec::parse(manifest.name.clone(), n, text)
                .map_err(|e| manifest_err(format!("hamiltonian: {e}")))?,
            HamiltonianSource::Control(gens) => {
                let generators = gens
                    .iter()
                    .enumerate()
                    .map(|(k, g)| parse_all(g, n, &format!("control generator {k}")))
                    .collect::<Result<_, _>>()?;
                let mut h = pmp_hamiltonian(&ControlAffineSystem { dim: n, generators })
                    .map_err(|e| manifest_err(format!("hamiltonian: {e}")))?;
                h.name = manifest.name.clone();
                h
            }
        };

        let mut fields = Vec::new();
        for decl in &manifest.fields {
            let what = format!("field `{}`", decl.name());
            let field = match decl {
                FieldDecl::Full { x, p, .. } => Field::Full(
                    VectorFieldSpec::new(n, parse_all(x, n, &what)?, parse_all(p, n, &what)?)
                        .map_err(|e| manifest_err(format!("{what}: {e}")))?,
                ),
                FieldDecl::Base { components, .. } => Field::Base(
                    BaseVectorFieldSpec::new(n, parse_all(components, n, &what)?)
                        .map_err(|e| manifest_err(format!("{what}: {e}")))?,
                ),
                FieldDecl::Hamiltonian { .. } => Field::Hamiltonian,
                FieldDecl::Newtonoid { x, .. } => Field::Newtonoid(parse_all(x, n, &what)?),
            };
            fields.push((decl.name().to_string(), field));
        }

        let mut points = Vec::new();
        for decl in &manifest.points {
            if decl.x.len() != n || decl.p.len() != n {
                return Err(manifest_err(format!(
                    "point `{}`: expected {n} positions and {n} momenta",
                    decl.name
                )));
            }
            let point = PhasePoint::new(decl.x.clone(), decl.p.clone())
                .map_err(|e| manifest_err(format!("point `{}`: {e}", decl.name)))?;
            points.push((decl.name.clone(), point));
        }

        let mut runs = Vec::new();
        for decl in &manifest.runs {
            let start = points
                .iter()
                .find(|(name, _)| *name == decl.start)
                .map(|(_, p)| p.clone())
                .ok_or_else(|| {
                    manifest_err(format!(
                        "run `{}`: unknown start point `{}`",
                        decl.name, decl.start
                    ))
                })?;
            check_unique(decl.watch.iter().map(|w| w.name.as_str()), "watch")?;
            let watch = decl
                .watch
                .iter()
                .map(|w| {
                    parse(&w.expr, n).map(|e| (w.name.clone(), e)).map_err(|e| {
                        manifest_err(format!("run `{}` watch `{}`: {e}", decl.name, w.name))
                    })
                })
                .collect::<Result<_, _>>()?;
            runs.push(Run {
                name: decl.name.clone(),
                start,
                start_name: decl.start.clone(),
                dt: decl.dt,
                steps: decl.steps,
                watch,
            });
        }

        let s = &manifest.sampling;
        let sample_box = SampleBox::uniform(n, (s.x[0], s.x[1]), (s.p[0], s.p[1]))
            .map_err(|e| manifest_err(format!("sampling: {e}")))?;
        if s.count == 0 {
            return Err(manifest_err("sampling: count must be positive"));
        }
        let t = &manifest.tolerances;
        let tols = [
            t.symmetry,
            t.newtonoid,
            t.noether,
            t.invariant_equation,
            t.invariant_vector_field,
            t.lie_theta,
            t.horizontal,
        ];
        if tols.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(manifest_err("tolerances must be positive"));
        }

        Ok(Model {
            manifest,
            hamiltonian,
            fields,
            points,
            runs,
            sample_box,
        })
    }

    pub fn field(&self, name: &str) -> Result<&Field, CliError> {
        self.fields
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, f)| f)
            .ok_or_else(|| manifest_err(format!("unknown field `{name}`")))
    }

    pub fn point(&self, name: &str) -> Result<&PhasePoint, CliError> {
        self.points
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, p)| p)
            .ok_or_else(|| manifest_err(format!("unknown point `{name}`")))
    }

    pub fn run(&self, name: &str) -> Result<&Run, CliError> {
        self.runs
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| manifest_err(format!("unknown run `{name}`")))
    }

    /// The phase-space field a declaration stands for; base fields become
    /// their complete lifts.
    pub fn phase_field<'a>(&'a self, field: &'a Field) -> Box<dyn PhaseField + 'a> {
        match field {
            Field::Full(v) => Box::new(v.clone()),
            Field::Base(b) => Box::new(complete_lift(b)),
            Field::Hamiltonian => Box::new(HamiltonianField {
                hamiltonian: &self.hamiltonian,
            }),
            Field::Newtonoid(x) => Box::new(NewtonoidLift {
                hamiltonian: &self.hamiltonian,
                x_components: x.clone(),
            }),
        }
    }
}
