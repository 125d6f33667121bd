//! Integration of Hamilton's equations and geodesic diagnostics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{evaluate, Expr, HamiltonianSpec};
use crate::fields::{HamiltonianField, PhaseField};
use crate::geometry::{max_abs, LocalGeometry};
use crate::PhasePoint;

/// States whose largest coordinate exceeds this are treated as a blow-up.
pub const BLOW_UP: f64 = 1e12;

/// `(∂H/∂p, −∂H/∂x)` at `state`.
pub fn hamilton_rhs(h: &HamiltonianSpec, state: &PhasePoint) -> Result<Vec<f64>> {
    HamiltonianField { hamiltonian: h }.values(state)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrajectoryStatus {
    Completed,
    /// Evaluation failed while taking step `step` (one-based).
    DomainError {
        step: usize,
        message: String,
    },
    /// The state after step `step` left the finite range.
    BlowUp {
        step: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub dt: f64,
    pub times: Vec<f64>,
    pub states: Vec<PhasePoint>,
    /// `H` first, then the watched functions in the order given.
    pub samples: Vec<Series>,
    pub status: TrajectoryStatus,
}

impl Trajectory {
    pub fn completed(&self) -> bool {
        self.status == TrajectoryStatus::Completed
    }
}

/// Classical RK4 with compensated summation of the state updates.
///
/// A failed evaluation or a blow-up ends the run early; the states reached so
/// far are kept and the reason is recorded in [`Trajectory::status`].
pub fn integrate_rk4(
    h: &HamiltonianSpec,
    start: &PhasePoint,
    dt: f64,
    steps: usize,
    watch: &[(String, Expr)],
) -> Result<Trajectory> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "dt must be positive, got {dt}"
        )));
    }
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be positive".to_string()));
    }
    if start.dim() != h.dim {
        return Err(Error::DimensionMismatch {
            what: "initial state".to_string(),
            expected: h.dim,
            found: start.dim(),
        });
    }
    LocalGeometry::new(h, start)?;

    let mut samples: Vec<Series> = std::iter::once(("H".to_string(), &h.expr))
        .chain(watch.iter().map(|(name, e)| (name.clone(), e)))
        .map(|(name, _)| Series {
            name,
            values: Vec::new(),
        })
        .collect();
    let exprs: Vec<&Expr> = std::iter::once(&h.expr)
        .chain(watch.iter().map(|(_, e)| e))
        .collect();
    let record = |samples: &mut Vec<Series>, s: &PhasePoint| -> Result<()> {
        let vals = exprs
            .iter()
            .map(|e| evaluate(e, s))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        for (series, v) in samples.iter_mut().zip(vals) {
            series.values.push(v);
        }
        Ok(())
    };

    let mut times = vec![0.0];
    let mut states = vec![start.clone()];
    record(&mut samples, start)?;

    let mut y = start.coords();
    let mut comp = vec![0.0; y.len()];
    let mut status = TrajectoryStatus::Completed;
    for step in 1..=steps {
        let inc = match rk4_increment(h, &y, dt) {
            Ok(inc) => inc,
            Err(e) => {
                status = TrajectoryStatus::DomainError {
                    step,
                    message: e.to_string(),
                };
                break;
            }
        };
        let mut next = y.clone();
        let mut next_comp = comp.clone();
        for k in 0..y.len() {
            let t = inc[k] - next_comp[k];
            let s = y[k] + t;
            next_comp[k] = (s - y[k]) - t;
            next[k] = s;
        }
        if next.iter().any(|v| !v.is_finite() || v.abs() > BLOW_UP) {
            status = TrajectoryStatus::BlowUp { step };
            break;
        }
        let state = PhasePoint::from_coords(&next)?;
        if let Err(e) = record(&mut samples, &state) {
            status = TrajectoryStatus::DomainError {
                step,
                message: e.to_string(),
            };
            break;
        }
        y = next;
        comp = next_comp;
        times.push(step as f64 * dt);
        states.push(state);
    }
    Ok(Trajectory {
        dt,
        times,
        states,
        samples,
        status,
    })
}

fn rk4_increment(h: &HamiltonianSpec, y: &[f64], dt: f64) -> Result<Vec<f64>> {
    let f = |z: &[f64]| -> Result<Vec<f64>> {
        let point = PhasePoint::from_coords(z)?;
        hamilton_rhs(h, &point)
    };
    let shifted =
        |k: &[f64], c: f64| -> Vec<f64> { y.iter().zip(k).map(|(a, b)| a + c * b).collect() };
    let k1 = f(y)?;
    let k2 = f(&shifted(&k1, dt / 2.0))?;
    let k3 = f(&shifted(&k2, dt / 2.0))?;
    let k4 = f(&shifted(&k3, dt))?;
    Ok((0..y.len())
        .map(|i| dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Drift {
    pub name: String,
    pub initial: f64,
    /// `max_t |f(t) − f(0)|`.
    pub max_drift: f64,
}

pub fn drift_report(traj: &Trajectory) -> Vec<Drift> {
    traj.samples
        .iter()
        .map(|s| {
            let initial = s.values[0];
            let max_drift = s
                .values
                .iter()
                .map(|v| (v - initial).abs())
                .fold(0.0, f64::max);
            Drift {
                name: s.name.clone(),
                initial,
                max_drift,
            }
        })
        .collect()
}

/// `∇ρ_H`; zero on the whole phase space.
pub fn geodesic_residual(h: &HamiltonianSpec, point: &PhasePoint) -> Result<Vec<f64>> {
    let g = LocalGeometry::new(h, point)?;
    Ok(g.dynamical_derivative(g.rho_jets()))
}

/// Horizontal residual accepted by [`berwald_vs_nabla`].
pub const BERWALD_HORIZONTAL_TOL: f64 = 1e-8;

/// `𝒟_{ρ_H} Y − ∇Y`; requires `ρ_H` horizontal at `point`.
pub fn berwald_vs_nabla(
    h: &HamiltonianSpec,
    y: &dyn PhaseField,
    point: &PhasePoint,
) -> Result<Vec<f64>> {
    let g = LocalGeometry::new(h, point)?;
    let residual = max_abs(&g.horizontal_residual());
    if residual >= BERWALD_HORIZONTAL_TOL {
        return Err(Error::NotHorizontal {
            residual,
            tol: BERWALD_HORIZONTAL_TOL,
        });
    }
    let jets = y.jets(point, 1)?;
    let d = g.berwald_along_rho(&jets);
    let nabla = g.dynamical_derivative(&jets);
    Ok(d.iter().zip(&nabla).map(|(a, b)| a - b).collect())
}
