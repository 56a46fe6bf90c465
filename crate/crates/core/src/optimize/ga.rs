//! Real-coded generational genetic algorithm used as a placement baseline:
//! tournament selection, BLX-α blend crossover, Gaussian mutation and
//! elitism.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{PlacementResult, Strategy};
use crate::error::{invalid, Result};
use crate::geometry::{Point2D, Region};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaParams {
    pub population: usize,
    pub generations: usize,
    pub tournament_size: usize,
    /// BLX-α extension of the parents' interval on each side.
    pub blend_alpha: f64,
    /// Per-gene mutation probability.
    pub mutation_rate: f64,
    /// Mutation standard deviation as a fraction of the bounds' span.
    pub mutation_sigma_fraction: f64,
    pub elitism: usize,
    /// Search domain; supplied by the caller, not read from configs.
    #[serde(skip)]
    pub bounds: Region,
}

impl Default for GaParams {
    fn default() -> Self {
        Self {
            population: 20,
            generations: 20,
            tournament_size: 2,
            blend_alpha: 0.5,
            mutation_rate: 0.2,
            mutation_sigma_fraction: 0.05,
            elitism: 1,
            bounds: Region::new(1.0, 4.0, 1.0, 4.0).expect("valid window"),
        }
    }
}

impl GaParams {
    pub fn validate(&self) -> Result<()> {
        if self.population == 0 || self.generations == 0 || self.tournament_size == 0 {
            return Err(invalid("ga population, generations and tournament size must be positive"));
        }
        if self.elitism >= self.population {
            return Err(invalid("elitism must leave room for offspring"));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(invalid("mutation rate must be a probability"));
        }
        if !(self.blend_alpha >= 0.0) || !(self.mutation_sigma_fraction >= 0.0) {
            return Err(invalid("blend alpha and mutation sigma must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
struct Individual {
    genes: Point2D,
    fitness: f64,
}

fn tournament<R: Rng + ?Sized>(pop: &[Individual], k: usize, rng: &mut R) -> Individual {
    let mut best = pop[rng.random_range(0..pop.len())];
    for _ in 1..k {
        let c = pop[rng.random_range(0..pop.len())];
        if c.fitness > best.fitness {
            best = c;
        }
    }
    best
}

fn blend<R: Rng + ?Sized>(a: f64, b: f64, alpha: f64, rng: &mut R) -> f64 {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let d = hi - lo;
    let u: f64 = rng.random();
    lo - alpha * d + u * (d + 2.0 * alpha * d)
}

/// Maximizes `objective` within `params.bounds`. Uses
/// `population + generations × (population − elitism)` evaluations.
pub fn ga_optimize<F, R>(objective: F, params: &GaParams, rng: &mut R) -> Result<PlacementResult>
where
    F: Fn(Point2D) -> f64,
    R: Rng + ?Sized,
{
    params.validate()?;
    let b = params.bounds;
    let sx = Normal::new(0.0, params.mutation_sigma_fraction * b.width()).map_err(|e| invalid(e.to_string()))?;
    let sy = Normal::new(0.0, params.mutation_sigma_fraction * b.height()).map_err(|e| invalid(e.to_string()))?;

    let mut evaluations = 0;
    let mut pop: Vec<Individual> = (0..params.population)
        .map(|_| {
            let genes = b.sample_uniform(rng);
            evaluations += 1;
            Individual { genes, fitness: objective(genes) }
        })
        .collect();
    let mut best = pop[0];
    for ind in &pop {
        if ind.fitness > best.fitness {
            best = *ind;
        }
    }
    let mut trace = vec![best.fitness];

    for _ in 0..params.generations {
        pop.sort_by(|x, y| y.fitness.partial_cmp(&x.fitness).unwrap_or(std::cmp::Ordering::Equal));
        let mut next: Vec<Individual> = pop[..params.elitism].to_vec();
        while next.len() < params.population {
            let pa = tournament(&pop, params.tournament_size, rng);
            let pb = tournament(&pop, params.tournament_size, rng);
            let mut x = blend(pa.genes.x, pb.genes.x, params.blend_alpha, rng);
            let mut y = blend(pa.genes.y, pb.genes.y, params.blend_alpha, rng);
            if rng.random::<f64>() < params.mutation_rate {
                x += sx.sample(rng);
            }
            if rng.random::<f64>() < params.mutation_rate {
                y += sy.sample(rng);
            }
            let genes = b.clamp(Point2D::new(x, y));
            evaluations += 1;
            let child = Individual { genes, fitness: objective(genes) };
            if child.fitness > best.fitness {
                best = child;
            }
            next.push(child);
        }
        pop = next;
        trace.push(best.fitness);
    }

    Ok(PlacementResult {
        strategy: Strategy::Ga,
        location: best.genes,
        value: best.fitness,
        trace,
        evaluations,
    })
}
