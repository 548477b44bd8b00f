//! Many-objective gait generation for modular legged robots.
//!
//! Gait parameters (per-leg stride and swing speed, a shared swing height and duty factor)
//! are optimized with NSGA-III against locomotion speed, static stability and joint load.
//! Candidates are scored by a quasi-static locomotion evaluator over flat, sloped and
//! stepped terrain, and the resulting Pareto fronts can be analyzed with multiple linear
//! regression.
//!
//! The main entry points:
//!
//! - [`nsga3`]: the optimizer (reference points, sorting, variation, niching).
//! - [`robot`]: leg kinematics, Jacobians and mass properties.
//! - [`gait`]: phase schedules and foot trajectories.
//! - [`terrain`]: height-field environments.
//! - [`evaluator`]: support polygons, static force distribution and the simulator.
//! - [`objectives`]: speed, stability and load scores.
//! - [`analysis`]: Pareto archives, regression and protocol comparison.
//! - [`config`] and [`cli`]: file formats and the command implementations behind the binary.

pub mod analysis;
pub mod cli;
pub mod config;
pub mod error;
pub mod evaluator;
pub mod gait;
pub mod nsga3;
pub mod objectives;
pub mod problem;
pub mod robot;
pub mod terrain;

pub use error::{Error, Result};
