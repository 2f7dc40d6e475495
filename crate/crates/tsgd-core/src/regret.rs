//! Local-regret metrics over a logged trajectory.
//!
//! Two accumulated squared-gradient-norm metrics are computed from the same
//! log; the structural difference between them is the point:
//!
//! * the window-averaged metric re-differentiates each of the last `w`
//!   losses at the step's own iterate `x_t` (fresh evaluations, `min(w, t)`
//!   per step), while
//! * the exponentially smoothed metric only combines gradients that were
//!   already taken at their own historical iterates (zero fresh evaluations).
//!
//! Steps `t <= 0` contribute zero while the divisor stays the full window
//! normalizer.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::Vector;
use crate::objective::Objective;

/// One logged step: the iterate, the loss it faced, and the gradient of that
/// loss at that iterate.
#[derive(Clone, Debug)]
pub struct TrajectoryEntry<O> {
    pub step: u64,
    pub params: Vector,
    pub objective: O,
    pub grad_at_own_iterate: Vector,
}

/// Ordered log of steps `1..=T` with constant parameter dimension.
#[derive(Clone, Debug, Default)]
pub struct Trajectory<O> {
    entries: Vec<TrajectoryEntry<O>>,
}

impl<O> Trajectory<O> {
    pub fn new() -> Self {
        Trajectory {
            entries: Vec::new(),
        }
    }

    /// Append the next step; the step index is assigned consecutively.
    pub fn push(&mut self, params: Vector, objective: O, grad: Vector) -> Result<()> {
        if let Some(first) = self.entries.first() {
            if grad.len() != first.grad_at_own_iterate.len() {
                return Err(Error::Dimension {
                    what: "trajectory gradient",
                    expected: first.grad_at_own_iterate.len(),
                    got: grad.len(),
                });
            }
        }
        let step = self.entries.len() as u64 + 1;
        self.entries.push(TrajectoryEntry {
            step,
            params,
            objective,
            grad_at_own_iterate: grad,
        });
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[TrajectoryEntry<O>] {
        &self.entries
    }
}

/// One regret metric: total, its per-step terms, and the number of fresh
/// gradient evaluations the computation performed.
#[derive(Clone, Debug, Serialize)]
pub struct RegretSeries {
    pub total: f64,
    pub per_step: Vec<f64>,
    pub grad_evals: u64,
}

fn check_window(w: usize) -> Result<()> {
    if w < 1 {
        return Err(Error::Domain("regret window must be >= 1".into()));
    }
    Ok(())
}

/// Window-averaged local regret: per step, the squared norm of the mean of
/// the last `w` loss gradients, all re-evaluated at that step's iterate.
pub fn hazan_regret<O: Objective>(traj: &Trajectory<O>, w: usize) -> Result<RegretSeries> {
    check_window(w)?;
    let mut per_step = Vec::with_capacity(traj.len());
    let mut evals = 0u64;
    for (idx, entry) in traj.entries.iter().enumerate() {
        let t = idx + 1;
        let mut acc = Vector::zeros(entry.grad_at_own_iterate.len());
        for i in 0..w.min(t) {
            let past = &traj.entries[t - 1 - i];
            let (_, grad) = past.objective.loss_and_grad(&entry.params);
            acc.axpy(&grad, 1.0);
            evals += 1;
        }
        acc.scale(1.0 / w as f64);
        per_step.push(acc.norm_sq());
    }
    Ok(RegretSeries {
        total: per_step.iter().sum(),
        per_step,
        grad_evals: evals,
    })
}

/// Exponentially smoothed local regret: per step, the squared norm of the
/// `alpha`-weighted average of logged own-iterate gradients over the window.
/// Uses only logged gradients; performs no new evaluations.
pub fn proposed_regret<O>(traj: &Trajectory<O>, w: usize, alpha: f64) -> Result<RegretSeries> {
    check_window(w)?;
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    let w_norm: f64 = (0..w).map(|i| alpha.powi(i as i32)).sum();
    let mut per_step = Vec::with_capacity(traj.len());
    for (idx, entry) in traj.entries.iter().enumerate() {
        let t = idx + 1;
        let mut acc = Vector::zeros(entry.grad_at_own_iterate.len());
        for i in 0..w.min(t) {
            let past = &traj.entries[t - 1 - i];
            acc.axpy(&past.grad_at_own_iterate, alpha.powi(i as i32));
        }
        acc.scale(1.0 / w_norm);
        per_step.push(acc.norm_sq());
    }
    Ok(RegretSeries {
        total: per_step.iter().sum(),
        per_step,
        grad_evals: 0,
    })
}

/// Both regret metrics over one trajectory, ready for serialization.
#[derive(Clone, Debug, Serialize)]
pub struct RegretReport {
    pub steps: u64,
    pub window: usize,
    pub alpha: f64,
    pub hazan_total: f64,
    pub proposed_total: f64,
    pub hazan_per_step: Vec<f64>,
    pub proposed_per_step: Vec<f64>,
}

pub fn regret_report<O: Objective>(
    traj: &Trajectory<O>,
    w: usize,
    alpha: f64,
) -> Result<RegretReport> {
    let hazan = hazan_regret(traj, w)?;
    let proposed = proposed_regret(traj, w, alpha)?;
    Ok(RegretReport {
        steps: traj.len() as u64,
        window: w,
        alpha,
        hazan_total: hazan.total,
        proposed_total: proposed.total,
        hazan_per_step: hazan.per_step,
        proposed_per_step: proposed.per_step,
    })
}
