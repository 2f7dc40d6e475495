//! Online time-smoothed gradient descent for streaming quantile forecasting.
//!
//! The crate compares three online update rules on replayable forecasting
//! streams: plain SGD, a window-averaged rule that re-differentiates the last
//! `w` losses at the current iterate on every step, and an exponentially
//! smoothed rule that reuses each loss's gradient at the iterate it was
//! originally taken at. Around them sit pinball losses, small
//! hand-differentiated forecast models, two local-regret metrics, a synthetic
//! seasonal stream, and an experiment harness that measures accuracy
//! stability and per-update gradient cost.
//!
//! Entry points:
//!
//! * [`harness::run_experiment`] replays one configured stream.
//! * [`harness::compare_methods`] sweeps the method x learning-rate x seed grid.
//! * [`models::grad_check`] verifies the hand-written backprop against
//!   central differences.

pub mod error;
pub mod harness;
pub mod losses;
pub mod models;
pub mod numeric;
pub mod objective;
pub mod optim;
pub mod regret;
pub mod stream;
pub mod testsupport;

pub use error::{Error, Result};
pub use losses::{QuantileForecast, QuantileSet};
pub use models::{FeatureMatrix, LossContext, ModelKind, ModelObjective, ModelSpec, ParamVector};
pub use numeric::{Rng, Vector};
pub use objective::Objective;
pub use optim::{GradientBuffer, Method, OnlineOptimizer, OptimizerConfig, Schedule, StepReceipt};
pub use regret::{RegretReport, Trajectory};
pub use stream::{Chunk, SeriesPoint, SynthParams};
