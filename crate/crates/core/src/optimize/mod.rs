//! SH placement strategies over a bounded 2-D objective.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::geometry::Point2D;

pub mod ga;
pub mod grid;
pub mod heuristics;
pub mod pso;

pub use ga::{ga_optimize, GaParams};
pub use grid::grid_search;
pub use heuristics::{heuristic_placements, HeuristicPlacements};
pub use pso::{pso_optimize, Particle, PsoParams, RandomCoefficients, SwarmState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Pso,
    Ga,
    Busiest,
    Hotspot,
    Random,
    Grid,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::Pso,
        Strategy::Ga,
        Strategy::Busiest,
        Strategy::Hotspot,
        Strategy::Random,
        Strategy::Grid,
    ];

    /// The strategies compared in every trial, proposed method first.
    pub const COMPARED: [Strategy; 5] =
        [Strategy::Pso, Strategy::Ga, Strategy::Busiest, Strategy::Hotspot, Strategy::Random];

    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Pso => "pso",
            Strategy::Ga => "ga",
            Strategy::Busiest => "busiest",
            Strategy::Hotspot => "hotspot",
            Strategy::Random => "random",
            Strategy::Grid => "grid",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Strategy::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| {
            Error::Usage(format!("unknown strategy '{s}' (pso|ga|busiest|hotspot|random|grid)"))
        })
    }
}

/// Outcome of one placement strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementResult {
    pub strategy: Strategy,
    pub location: Point2D,
    /// Objective re-evaluated at `location`.
    pub value: f64,
    /// Best-so-far value after initialization and after every iteration.
    pub trace: Vec<f64>,
    pub evaluations: usize,
}

impl PlacementResult {
    /// A single fixed location, scored once.
    pub fn fixed<F: Fn(Point2D) -> f64>(strategy: Strategy, location: Point2D, objective: F) -> Self {
        let value = objective(location);
        Self { strategy, location, value, trace: vec![value], evaluations: 1 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategy_names_round_trip() {
        for s in Strategy::ALL {
            assert_eq!(s.name().parse::<Strategy>().unwrap(), s);
            assert_eq!(serde_json::to_string(&s).unwrap(), format!("\"{s}\""));
        }
        assert!("anneal".parse::<Strategy>().is_err());
    }
}
