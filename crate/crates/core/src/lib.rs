//! Warm-started steepest descent for L/L♮-convex minimization, with
//! matching, matroid-intersection and energy-minimization instantiations
//! and an online learner for initial points.

pub mod descent;
pub mod energy;
pub mod error;
pub mod learning;
pub mod lnat;
pub mod matching;
pub mod matroid;
pub mod value;

pub use descent::{
    linf_pm_distance, linf_pm_norm, round_ties_down, steepest_descent, Convexity, DescentOptions, DescentTrace,
    Direction, IntVector, LocalOracle, LongStep, NeighborhoodMode, Objective, Sign, StepKind, StepRule, UnitStep,
};
pub use error::{Error, Result};
pub use lnat::LNatSystem;
pub use value::ExtValue;
