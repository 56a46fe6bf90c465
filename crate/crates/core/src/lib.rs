//! Placement of a cache-enabled smart helper (SH) in a fog radio access
//! network.
//!
//! The pipeline samples a network scene (eRRHs and clustered users),
//! associates users to eRRHs by maximum SIR, estimates the user-density field
//! from per-eRRH loads with linear radial basis functions, and maximizes the
//! expected number of users covered by the SH with particle swarm
//! optimization.
//!
//! Coordinates are kilometres throughout; densities are users per km².

// `!(x > 0.0)` is used deliberately so NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod channel;
pub mod density;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod hit_rate;
pub mod optimize;
pub mod rng;
pub mod scene;

pub use channel::{AssociationMode, AssociationResult, ChannelParams, InterfererPolicy};
pub use density::{Estimator, LoadObservation, RbfModel};
pub use error::{Error, Result};
pub use geometry::{DensityField, GridSpec, Point2D, Region};
pub use hit_rate::{CoverageObjective, HitRateSurface};
pub use optimize::{PlacementResult, Strategy};
pub use scene::{ClusterSpec, Scene, SceneParams};
pub use experiment::{ExperimentConfig, FigureKind};
