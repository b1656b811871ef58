//! Equation of motion `xⁱ₀₀ = γ₀ⁱ₀` and its integration in the coordinate time x⁰.

use nalgebra::SVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fields::SpacetimeModel;
use crate::ode::{self, Method, Termination as OdeTermination};
use crate::phase::{PhaseGeometry, PhasePoint};
use crate::{Error, Result, Vec3, Vec4};

/// `xⁱ₀₀ = −δ̄ⁱ_τ K_ρ^τ_σ δ̄^ρ₀ δ̄^σ₀ + (q/m)(cα⁰)⁻¹ ḡ⊥^{ik} F_{kρ} δ̄^ρ₀`.
pub fn eom_rhs(model: &SpacetimeModel, p: &PhasePoint) -> Result<Vec3> {
    let geo = PhaseGeometry::new(model, p)?;
    let a = geo.chr.contract(&geo.dbar0, &geo.dbar0);
    let mut out = -(geo.dbar * a);
    if geo.has_em {
        // (q/m) F = (ħ/m) F̂
        let fd = geo.f_hat * geo.dbar0;
        let k = 1.0 / (geo.m_over_hbar * geo.c_alpha());
        let fs = Vec3::new(fd[1], fd[2], fd[3]);
        out += geo.gbar_perp * fs * k;
    }
    Ok(out)
}

/// Integration method and range options.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase", deny_unknown_fields)]
pub enum IntegratorOptions {
    Rk4 {
        step: f64,
    },
    Rkf45 {
        atol: f64,
        rtol: f64,
        #[serde(default = "default_initial_step")]
        initial_step: f64,
        #[serde(default = "default_max_steps")]
        max_steps: usize,
    },
}

fn default_initial_step() -> f64 {
    1e-3
}

fn default_max_steps() -> usize {
    10_000_000
}

impl IntegratorOptions {
    pub fn rkf45(atol: f64, rtol: f64) -> Self {
        IntegratorOptions::Rkf45 { atol, rtol, initial_step: default_initial_step(), max_steps: default_max_steps() }
    }

    fn method(&self) -> Method {
        match *self {
            IntegratorOptions::Rk4 { step } => Method::Rk4 { step },
            IntegratorOptions::Rkf45 { atol, rtol, initial_step, max_steps } => {
                Method::Rkf45 { atol, rtol, initial_step, max_steps }
            }
        }
    }
}

/// Why a trajectory stopped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Termination {
    RangeEnd,
    TimelikeLost { x0: f64 },
    ChartExit { x0: f64 },
}

/// Sampled worldline in phase space.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub points: Vec<PhasePoint>,
    pub termination: Termination,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl Trajectory {
    pub fn last(&self) -> &PhasePoint {
        self.points.last().expect("trajectory has at least the initial point")
    }

    /// The event as an error, if the trajectory ended early.
    pub fn event_error(&self) -> Option<Error> {
        match self.termination {
            Termination::RangeEnd => None,
            Termination::TimelikeLost { x0 } => Some(Error::TimelikeLost { x0 }),
            Termination::ChartExit { x0 } => Some(Error::ChartExit { x0 }),
        }
    }
}

type S6 = SVector<f64, 6>;

fn to_point(t: f64, y: &S6) -> PhasePoint {
    PhasePoint::raw(Vec4::new(t, y[0], y[1], y[2]), Vec3::new(y[3], y[4], y[5]))
}

/// Integrates the equation of motion from `p0` over `x⁰ ∈ [p0.x⁰, x0_end]`.
///
/// Loss of timelikeness and leaving the chart end the trajectory at the
/// located event (to 1e-10 in x⁰) and are reported in `termination`.
pub fn integrate(model: &SpacetimeModel, p0: &PhasePoint, x0_end: f64, opts: &IntegratorOptions) -> Result<Trajectory> {
    let p0 = PhasePoint::new(model, p0.x, p0.v)?;
    let y0 = S6::new(p0.x[1], p0.x[2], p0.x[3], p0.v[0], p0.v[1], p0.v[2]);
    let rhs = |t: f64, y: &S6| -> Result<S6> {
        let p = to_point(t, y);
        let a = eom_rhs(model, &p)?;
        Ok(S6::new(y[3], y[4], y[5], a[0], a[1], a[2]))
    };
    let chart = |t: f64, y: &S6| model.metric.chart_margin(&Vec4::new(t, y[0], y[1], y[2]));
    let timelike = |t: f64, y: &S6| {
        let p = to_point(t, y);
        match model.metric_at(&p.x) {
            Ok(g) => {
                let d = p.dbar0();
                -(d.transpose() * g * d)[0] - crate::phase::TIMELIKE_MARGIN
            }
            Err(_) => f64::NAN,
        }
    };
    let events: [&dyn Fn(f64, &S6) -> f64; 2] = [&chart, &timelike];
    let sol = ode::solve(rhs, &events, p0.x[0], y0, x0_end, opts.method()).map_err(|e| match e {
        Error::StepFailure { .. } | Error::InvalidArgument(_) => e,
        other => Error::StepFailure { x0: p0.x[0], reason: other.to_string() },
    })?;
    let termination = match sol.termination {
        OdeTermination::Completed => Termination::RangeEnd,
        OdeTermination::Event { t, event: Some(0), .. } => Termination::ChartExit { x0: t },
        OdeTermination::Event { t, event: Some(_), .. } => Termination::TimelikeLost { x0: t },
        OdeTermination::Event { t, event: None, cause } => match cause {
            Some(Error::ChartDomain { .. }) | Some(Error::SingularMetric { .. }) => Termination::ChartExit { x0: t },
            Some(Error::NotTimelike { .. }) => Termination::TimelikeLost { x0: t },
            Some(e) => return Err(Error::StepFailure { x0: t, reason: e.to_string() }),
            None => return Err(Error::StepFailure { x0: t, reason: "non-finite state".into() }),
        },
    };
    let points = sol.ts.iter().zip(sol.ys.iter()).map(|(t, y)| to_point(*t, y)).collect();
    Ok(Trajectory { points, termination, accepted_steps: sol.accepted, rejected_steps: sol.rejected })
}

/// Integrates several initial points in parallel; results keep the input order.
pub fn integrate_many(
    model: &SpacetimeModel,
    initial: &[PhasePoint],
    x0_end: f64,
    opts: &IntegratorOptions,
) -> Vec<Result<Trajectory>> {
    initial.par_iter().map(|p| integrate(model, p, x0_end, opts)).collect()
}
