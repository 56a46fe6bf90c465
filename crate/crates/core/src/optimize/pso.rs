//! Bound-constrained particle swarm maximization in the plane.
//!
//! Velocity: `δ ← w δ + c1 r1 (p_best − l) + c2 r2 (g_best − l)`, position:
//! `l ← l + δ`. Positions leaving the bounds are clamped onto them and the
//! velocity component along the clamped axis is zeroed. The global best used
//! in an iteration is the one known at its start (synchronous update).

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{PlacementResult, Strategy};
use crate::error::{invalid, Result};
use crate::geometry::{Point2D, Region};

/// How the random factors `r1`, `r2` are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomCoefficients {
    /// Fresh draws per particle, per dimension, per iteration.
    #[default]
    PerDimension,
    /// One `r1` and one `r2` per particle per iteration, shared by both axes.
    Scalar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PsoParams {
    pub particles: usize,
    pub iterations: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    /// Search domain; supplied by the caller, not read from configs.
    #[serde(skip)]
    pub bounds: Region,
    /// Initial velocities are uniform in `± fraction × span` per axis.
    pub velocity_init_fraction: f64,
    pub coefficients: RandomCoefficients,
}

impl Default for PsoParams {
    fn default() -> Self {
        Self {
            particles: 20,
            iterations: 20,
            inertia: 0.5,
            cognitive: 1.5,
            social: 2.0,
            bounds: Region::new(1.0, 4.0, 1.0, 4.0).expect("valid window"),
            velocity_init_fraction: 0.1,
            coefficients: RandomCoefficients::PerDimension,
        }
    }
}

impl PsoParams {
    pub fn validate(&self) -> Result<()> {
        if self.particles == 0 || self.iterations == 0 {
            return Err(invalid("pso needs at least one particle and one iteration"));
        }
        if !(self.inertia > 0.0 && self.inertia <= 1.0) {
            return Err(invalid(format!("inertia {} outside (0, 1]", self.inertia)));
        }
        if !(self.cognitive >= 0.0) || !(self.social >= 0.0) {
            return Err(invalid("cognitive and social coefficients must be non-negative"));
        }
        if !(self.velocity_init_fraction >= 0.0) {
            return Err(invalid("velocity_init_fraction must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub position: Point2D,
    pub velocity: Point2D,
    pub best_position: Point2D,
    pub best_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwarmState {
    pub particles: Vec<Particle>,
    pub global_best: Point2D,
    pub global_best_value: f64,
    pub iteration: usize,
    pub evaluations: usize,
    /// Global best value after initialization and after each step.
    pub trace: Vec<f64>,
}

impl SwarmState {
    /// Uniform positions in the bounds, small uniform velocities, one
    /// evaluation per particle.
    pub fn initialize<F, R>(params: &PsoParams, objective: &F, rng: &mut R) -> Self
    where
        F: Fn(Point2D) -> f64,
        R: Rng + ?Sized,
    {
        let b = params.bounds;
        let vx = params.velocity_init_fraction * b.width();
        let vy = params.velocity_init_fraction * b.height();
        let particles: Vec<Particle> = (0..params.particles)
            .map(|_| {
                let position = b.sample_uniform(rng);
                let u: f64 = rng.random();
                let v: f64 = rng.random();
                let velocity = Point2D::new((2.0 * u - 1.0) * vx, (2.0 * v - 1.0) * vy);
                let value = objective(position);
                Particle { position, velocity, best_position: position, best_value: value }
            })
            .collect();
        let mut state = SwarmState {
            global_best: particles[0].best_position,
            global_best_value: particles[0].best_value,
            particles,
            iteration: 0,
            evaluations: params.particles,
            trace: Vec::with_capacity(params.iterations + 1),
        };
        state.refresh_global_best();
        state.trace.push(state.global_best_value);
        state
    }

    fn refresh_global_best(&mut self) {
        for p in &self.particles {
            if p.best_value > self.global_best_value {
                self.global_best_value = p.best_value;
                self.global_best = p.best_position;
            }
        }
    }

    /// One synchronous swarm iteration.
    pub fn step<F, R>(&mut self, params: &PsoParams, objective: &F, rng: &mut R)
    where
        F: Fn(Point2D) -> f64,
        R: Rng + ?Sized,
    {
        let b = params.bounds;
        let g = self.global_best;
        for p in &mut self.particles {
            let (r1x, r1y, r2x, r2y) = match params.coefficients {
                RandomCoefficients::PerDimension => (rng.random(), rng.random(), rng.random(), rng.random()),
                RandomCoefficients::Scalar => {
                    let r1: f64 = rng.random();
                    let r2: f64 = rng.random();
                    (r1, r1, r2, r2)
                }
            };
            let l = p.position;
            let mut vx = params.inertia * p.velocity.x
                + params.cognitive * r1x * (p.best_position.x - l.x)
                + params.social * r2x * (g.x - l.x);
            let mut vy = params.inertia * p.velocity.y
                + params.cognitive * r1y * (p.best_position.y - l.y)
                + params.social * r2y * (g.y - l.y);
            let mut x = l.x + vx;
            let mut y = l.y + vy;
            if x < b.x_min() || x > b.x_max() {
                x = x.clamp(b.x_min(), b.x_max());
                vx = 0.0;
            }
            if y < b.y_min() || y > b.y_max() {
                y = y.clamp(b.y_min(), b.y_max());
                vy = 0.0;
            }
            p.position = Point2D::new(x, y);
            p.velocity = Point2D::new(vx, vy);
            let value = objective(p.position);
            if value > p.best_value {
                p.best_value = value;
                p.best_position = p.position;
            }
        }
        self.refresh_global_best();
        self.iteration += 1;
        self.evaluations += self.particles.len();
        self.trace.push(self.global_best_value);
    }
}

/// Functional form of [`SwarmState::step`].
pub fn pso_step<F, R>(mut state: SwarmState, params: &PsoParams, objective: &F, rng: &mut R) -> SwarmState
where
    F: Fn(Point2D) -> f64,
    R: Rng + ?Sized,
{
    state.step(params, objective, rng);
    state
}

/// Runs `params.iterations` swarm steps and returns the global best.
/// Uses exactly `particles × (iterations + 1)` objective evaluations.
pub fn pso_optimize<F, R>(objective: F, params: &PsoParams, rng: &mut R) -> Result<PlacementResult>
where
    F: Fn(Point2D) -> f64,
    R: Rng + ?Sized,
{
    params.validate()?;
    let mut state = SwarmState::initialize(params, &objective, rng);
    for _ in 0..params.iterations {
        state.step(params, &objective, rng);
    }
    Ok(PlacementResult {
        strategy: Strategy::Pso,
        location: state.global_best,
        value: state.global_best_value,
        trace: state.trace,
        evaluations: state.evaluations,
    })
}
