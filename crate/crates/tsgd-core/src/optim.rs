//! Online update rules: plain SGD, window-averaged HTS, and exponentially
//! time-smoothed PTS, with their buffers and gradient-evaluation accounting.
//!
//! The two smoothed rules differ in *where* old gradients are taken:
//!
//! * `hts` keeps the last `w` loss contexts and re-differentiates every one
//!   of them at the current iterate on each step (`min(w, t)` evaluations).
//! * `pts` keeps the last `w` gradients, each taken at the iterate that was
//!   current when its loss arrived, and only ever computes one new gradient
//!   per step.
//!
//! Both divide by their full-window normalizer (`w`, resp. `W = sum alpha^i`)
//! even while the buffer is still filling; absent steps contribute zero.

use std::collections::VecDeque;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::Vector;
use crate::objective::Objective;

/// Which update rule to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Sgd,
    Hts,
    Pts,
}

/// Learning-rate schedule applied on top of the base rate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    Constant,
    #[default]
    InverseSqrt,
}

/// Optimizer hyperparameters. `window` and `alpha` are ignored by `sgd`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    pub method: Method,
    /// Base learning rate eta.
    pub eta: f64,
    /// Smoothing window size w.
    #[serde(default = "default_window")]
    pub window: usize,
    /// Exponential smoothing factor; 1.0 recovers uniform weights.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub schedule: Schedule,
}

fn default_window() -> usize {
    1
}

fn default_alpha() -> f64 {
    0.99
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        // eta = 0 is allowed as a degenerate frozen-parameter run.
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return Err(Error::Domain(format!(
                "eta must be finite and >= 0, got {}",
                self.eta
            )));
        }
        if self.window < 1 {
            return Err(Error::Domain("window must be >= 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::Domain(format!(
                "alpha must lie in (0, 1], got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// Learning rate at 1-based step `t`.
pub fn lr_at(eta: f64, t: u64, schedule: Schedule) -> Result<f64> {
    if t < 1 {
        return Err(Error::Domain("schedule step t must be >= 1".into()));
    }
    Ok(match schedule {
        Schedule::Constant => eta,
        Schedule::InverseSqrt => eta / (t as f64).sqrt(),
    })
}

/// Accounting record emitted by every optimizer step.
#[derive(Clone, Debug, Serialize)]
pub struct StepReceipt {
    pub step_index: u64,
    pub eta_t: f64,
    /// Loss-gradient evaluations performed by this step.
    pub grad_evals: u64,
    /// Squared norm of the (smoothed) update direction.
    pub smoothed_grad_norm_sq: f64,
    pub wall_time_s: f64,
    /// False when the gradient or the updated iterate is non-finite. The
    /// update is still recorded; runs continue and report the divergence.
    pub finite: bool,
}

fn apply_update(x: &Vector, direction: &Vector, eta_t: f64) -> Vector {
    x.add_scaled(direction, -eta_t)
        .expect("direction length matches iterate")
}

/// What a step produces: the new iterate, its accounting record, and the
/// gradient of this step's loss at the pre-update iterate. Every rule
/// computes that gradient anyway; surfacing it lets the harness log
/// trajectories without spending extra evaluations.
#[derive(Clone, Debug)]
pub struct StepOutcome {
    pub params: Vector,
    pub receipt: StepReceipt,
    pub own_gradient: Vector,
}

/// One plain SGD step: `x' = x - eta_t * grad f_t(x)`.
pub fn sgd_step<O: Objective>(x: &Vector, obj: &O, eta_t: f64, step_index: u64) -> StepOutcome {
    let start = Instant::now();
    let (_, grad) = obj.loss_and_grad(x);
    let next = apply_update(x, &grad, eta_t);
    let receipt = StepReceipt {
        step_index,
        eta_t,
        grad_evals: 1,
        smoothed_grad_norm_sq: grad.norm_sq(),
        wall_time_s: start.elapsed().as_secs_f64(),
        finite: grad.is_finite() && next.is_finite(),
    };
    StepOutcome {
        params: next,
        receipt,
        own_gradient: grad,
    }
}

/// Ring of the last `w` loss contexts, kept so HTS can re-differentiate them
/// at the current iterate.
#[derive(Clone, Debug)]
pub struct ContextBuffer<O> {
    capacity: usize,
    entries: VecDeque<(u64, O)>,
}

impl<O> ContextBuffer<O> {
    pub fn new(capacity: usize) -> Result<Self> {
        if capacity < 1 {
            return Err(Error::Domain("buffer capacity must be >= 1".into()));
        }
        Ok(ContextBuffer {
            capacity,
            entries: VecDeque::with_capacity(capacity),
        })
    }

    /// Append the context for `step`; steps must arrive consecutively.
    pub fn push(&mut self, step: u64, obj: O) -> Result<()> {
        if let Some(&(last, _)) = self.entries.back() {
            if step != last + 1 {
                return Err(Error::Sequencing {
                    expected: last + 1,
                    got: step,
                });
            }
        }
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back((step, obj));
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn latest_step(&self) -> Option<u64> {
        self.entries.back().map(|&(s, _)| s)
    }

    pub fn contains_step(&self, step: u64) -> bool {
        self.entries.iter().any(|&(s, _)| s == step)
    }
}

/// One HTS step: average the gradients of all buffered contexts, every one
/// evaluated at the *current* iterate, with the full divisor `w`.
pub fn hts_step<O: Objective>(
    x: &Vector,
    buffer: &ContextBuffer<O>,
    eta_t: f64,
) -> Result<StepOutcome> {
    let start = Instant::now();
    let step_index = buffer
        .latest_step()
        .ok_or_else(|| Error::State("hts_step on an empty context buffer".into()))?;
    let mut acc = Vector::zeros(x.len());
    let mut own_gradient = Vector::zeros(x.len());
    for &(s, ref obj) in &buffer.entries {
        let (_, grad) = obj.loss_and_grad(x);
        acc.axpy(&grad, 1.0);
        if s == step_index {
            own_gradient = grad;
        }
    }
    acc.scale(1.0 / buffer.capacity as f64);
    let next = apply_update(x, &acc, eta_t);
    let receipt = StepReceipt {
        step_index,
        eta_t,
        grad_evals: buffer.len() as u64,
        smoothed_grad_norm_sq: acc.norm_sq(),
        wall_time_s: start.elapsed().as_secs_f64(),
        finite: acc.is_finite() && next.is_finite(),
    };
    Ok(StepOutcome {
        params: next,
        receipt,
        own_gradient,
    })
}

/// Ring of the last `w` gradients, each taken at its own historical iterate
/// (PTS state). Weight of the gradient from `i` steps ago is `alpha^i`.
#[derive(Clone, Debug)]
pub struct GradientBuffer {
    capacity: usize,
    alpha: f64,
    entries: VecDeque<(u64, Vector)>,
}

impl GradientBuffer {
    pub fn new(capacity: usize, alpha: f64) -> Result<Self> {
        if capacity < 1 {
            return Err(Error::Domain("buffer capacity must be >= 1".into()));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Domain(format!("alpha must lie in (0, 1], got {alpha}")));
        }
        Ok(GradientBuffer {
            capacity,
            alpha,
            entries: VecDeque::with_capacity(capacity),
        })
    }

    /// Full-window normalizer `W = sum_{i=0}^{w-1} alpha^i`.
    pub fn w_norm(&self) -> f64 {
        (0..self.capacity).map(|i| self.alpha.powi(i as i32)).sum()
    }

    pub fn push(&mut self, step: u64, grad: Vector) -> Result<()> {
        if let Some(&(last, _)) = self.entries.back() {
            if step != last + 1 {
                return Err(Error::Sequencing {
                    expected: last + 1,
                    got: step,
                });
            }
        }
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back((step, grad));
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `(1/W) * sum_i alpha^i * g_{t-i}` over stored entries; absent old
    /// steps contribute zero while the divisor stays the full `W`.
    pub fn smoothed(&self) -> Option<Vector> {
        let &(last, ref g_last) = self.entries.back()?;
        let mut acc = Vector::zeros(g_last.len());
        for (s, g) in &self.entries {
            acc.axpy(g, self.alpha.powi((last - s) as i32));
        }
        acc.scale(1.0 / self.w_norm());
        Some(acc)
    }
}

/// One PTS step: evaluate exactly one new gradient at the current iterate,
/// push it, and descend along the exponentially weighted buffer average.
pub fn pts_step<O: Objective>(
    x: &Vector,
    obj: &O,
    step_index: u64,
    buffer: &mut GradientBuffer,
    eta_t: f64,
) -> Result<StepOutcome> {
    let start = Instant::now();
    let (_, grad) = obj.loss_and_grad(x);
    buffer.push(step_index, grad.clone())?;
    let smoothed = buffer.smoothed().expect("buffer cannot be empty after push");
    let next = apply_update(x, &smoothed, eta_t);
    let receipt = StepReceipt {
        step_index,
        eta_t,
        grad_evals: 1,
        smoothed_grad_norm_sq: smoothed.norm_sq(),
        wall_time_s: start.elapsed().as_secs_f64(),
        finite: smoothed.is_finite() && next.is_finite(),
    };
    Ok(StepOutcome {
        params: next,
        receipt,
        own_gradient: grad,
    })
}

/// Single-owner optimizer state machine: owns the buffers and the global
/// step counter, applies the schedule, and dispatches on the method.
#[derive(Clone, Debug)]
pub struct OnlineOptimizer<O> {
    config: OptimizerConfig,
    step: u64,
    ctx_buffer: ContextBuffer<O>,
    grad_buffer: GradientBuffer,
}

impl<O: Objective> OnlineOptimizer<O> {
    pub fn new(config: OptimizerConfig) -> Result<Self> {
        config.validate()?;
        let ctx_buffer = ContextBuffer::new(config.window)?;
        let grad_buffer = GradientBuffer::new(config.window, config.alpha)?;
        Ok(OnlineOptimizer {
            config,
            step: 0,
            ctx_buffer,
            grad_buffer,
        })
    }

    pub fn config(&self) -> &OptimizerConfig {
        &self.config
    }

    pub fn steps_taken(&self) -> u64 {
        self.step
    }

    /// Consume the next loss context and produce the updated iterate.
    pub fn step(&mut self, x: &Vector, obj: O) -> Result<StepOutcome> {
        let t = self.step + 1;
        let eta_t = lr_at(self.config.eta, t, self.config.schedule)?;
        let out = match self.config.method {
            Method::Sgd => sgd_step(x, &obj, eta_t, t),
            Method::Hts => {
                self.ctx_buffer.push(t, obj)?;
                hts_step(x, &self.ctx_buffer, eta_t)?
            }
            Method::Pts => pts_step(x, &obj, t, &mut self.grad_buffer, eta_t)?,
        };
        self.step = t;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Rng;
    use crate::testsupport::{ConstGrad, QuadraticLoss};

    fn quad(center: Vec<f64>) -> QuadraticLoss {
        QuadraticLoss::new(Vector::new(center))
    }

    #[test]
    fn lr_schedule_values() {
        assert_eq!(lr_at(9.0, 1, Schedule::InverseSqrt).unwrap(), 9.0);
        assert_eq!(lr_at(9.0, 4, Schedule::InverseSqrt).unwrap(), 4.5);
        assert_eq!(lr_at(3.0, 100, Schedule::Constant).unwrap(), 3.0);
        assert!(matches!(
            lr_at(1.0, 0, Schedule::Constant),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn sgd_toy_quadratic() {
        // f(x) = (x - 2)^2 / 2, grad at 0 is -2.
        let x = Vector::new(vec![0.0]);
        let out = sgd_step(&x, &quad(vec![2.0]), 1.0, 1);
        assert_eq!(out.params.as_slice(), &[2.0]);
        assert_eq!(out.own_gradient.as_slice(), &[-2.0]);
        assert_eq!(out.receipt.grad_evals, 1);
        assert!(out.receipt.finite);
        assert!((out.receipt.smoothed_grad_norm_sq - 4.0).abs() < 1e-15);
    }

    #[test]
    fn sgd_stationary_and_zero_rate() {
        let x = Vector::new(vec![1.5, -2.0]);
        let out = sgd_step(&x, &quad(vec![1.5, -2.0]), 0.7, 1);
        assert_eq!(out.params, x); // zero gradient
        let out = sgd_step(&x, &quad(vec![0.0, 0.0]), 0.0, 1);
        assert_eq!(out.params, x); // zero step size
    }

    #[test]
    fn sgd_flags_non_finite_but_records_update() {
        let x = Vector::new(vec![0.0]);
        let out = sgd_step(&x, &ConstGrad::new(Vector::new(vec![f64::NAN])), 1.0, 1);
        assert!(!out.receipt.finite);
        assert!(out.params[0].is_nan());
    }

    #[test]
    fn hts_window_collapse_equals_sgd() {
        let x = Vector::new(vec![0.3, -0.7]);
        let obj = quad(vec![1.0, 2.0]);
        let sgd_out = sgd_step(&x, &obj, 0.9, 1);
        let mut buf = ContextBuffer::new(1).unwrap();
        buf.push(1, obj).unwrap();
        let hts_out = hts_step(&x, &buf, 0.9).unwrap();
        assert_eq!(hts_out.params, sgd_out.params);
        assert_eq!(hts_out.receipt.grad_evals, 1);
    }

    #[test]
    fn hts_hand_example() {
        // f_i(x) = (x - c_i)^2 / 2 with c = (0, 2); at x = 1 the window
        // gradients cancel, so the iterate does not move.
        let x = Vector::new(vec![1.0]);
        let mut buf = ContextBuffer::new(2).unwrap();
        buf.push(1, quad(vec![0.0])).unwrap();
        buf.push(2, quad(vec![2.0])).unwrap();
        let out = hts_step(&x, &buf, 2.0).unwrap();
        assert_eq!(out.params.as_slice(), &[1.0]);
        assert_eq!(out.receipt.grad_evals, 2);
        assert_eq!(out.receipt.smoothed_grad_norm_sq, 0.0);
        assert_eq!(out.own_gradient.as_slice(), &[-1.0]); // grad of f_2 at x=1
    }

    #[test]
    fn hts_zero_pads_missing_history() {
        // Single stored context with window 3: divisor stays 3.
        let x = Vector::new(vec![0.0]);
        let mut buf = ContextBuffer::new(3).unwrap();
        buf.push(1, quad(vec![3.0])).unwrap(); // grad -3
        let out = hts_step(&x, &buf, 1.0).unwrap();
        assert!((out.params[0] - 1.0).abs() < 1e-15); // 0 - 1.0 * (-3 / 3)
        assert_eq!(out.receipt.grad_evals, 1);
    }

    #[test]
    fn hts_empty_buffer_is_state_error() {
        let buf: ContextBuffer<QuadraticLoss> = ContextBuffer::new(2).unwrap();
        let x = Vector::new(vec![0.0]);
        assert!(matches!(hts_step(&x, &buf, 1.0), Err(Error::State(_))));
    }

    #[test]
    fn pts_window_collapse_equals_sgd() {
        for alpha in [0.5, 0.99, 1.0] {
            let x = Vector::new(vec![0.3, -0.7]);
            let obj = quad(vec![1.0, 2.0]);
            let sgd_out = sgd_step(&x, &obj, 0.9, 1);
            let mut buf = GradientBuffer::new(1, alpha).unwrap();
            let pts_out = pts_step(&x, &obj, 1, &mut buf, 0.9).unwrap();
            assert_eq!(pts_out.params, sgd_out.params, "alpha={alpha}");
            assert_eq!(pts_out.receipt.grad_evals, 1);
        }
    }

    #[test]
    fn pts_hand_example() {
        // w=2, alpha=0.9, g_{t-1}=2, g_t=1, x=0, eta=1.9:
        // x' = -(1.9/1.9) * (1*1 + 0.9*2) = -2.8
        let mut buf = GradientBuffer::new(2, 0.9).unwrap();
        buf.push(1, Vector::new(vec![2.0])).unwrap();
        let x = Vector::new(vec![0.0]);
        let out =
            pts_step(&x, &ConstGrad::new(Vector::new(vec![1.0])), 2, &mut buf, 1.9).unwrap();
        assert!((out.params[0] - -2.8).abs() < 1e-12, "got {}", out.params[0]);
        assert_eq!(out.receipt.grad_evals, 1);
        assert_eq!(out.own_gradient.as_slice(), &[1.0]);
        assert!((buf.w_norm() - 1.9).abs() < 1e-15);
    }

    #[test]
    fn pts_zero_pads_missing_history() {
        // First step with w=2: divisor is the full W = 1.9.
        let mut buf = GradientBuffer::new(2, 0.9).unwrap();
        let x = Vector::new(vec![0.0]);
        let out =
            pts_step(&x, &ConstGrad::new(Vector::new(vec![1.0])), 1, &mut buf, 1.0).unwrap();
        assert!((out.params[0] - (-1.0 / 1.9)).abs() < 1e-15);
    }

    #[test]
    fn buffers_enforce_sequencing_and_capacity() {
        let mut buf = GradientBuffer::new(2, 0.9).unwrap();
        buf.push(1, Vector::zeros(1)).unwrap();
        assert!(matches!(
            buf.push(3, Vector::zeros(1)),
            Err(Error::Sequencing { expected: 2, got: 3 })
        ));
        buf.push(2, Vector::zeros(1)).unwrap();
        buf.push(3, Vector::zeros(1)).unwrap();
        assert_eq!(buf.len(), 2);

        let mut cbuf = ContextBuffer::new(2).unwrap();
        cbuf.push(5, quad(vec![0.0])).unwrap();
        assert_eq!(cbuf.len(), 1);
        cbuf.push(6, quad(vec![0.0])).unwrap();
        cbuf.push(7, quad(vec![0.0])).unwrap();
        assert_eq!(cbuf.len(), 2);
        assert!(!cbuf.contains_step(5));
        assert!(cbuf.contains_step(7));
        assert!(matches!(
            cbuf.push(9, quad(vec![0.0])),
            Err(Error::Sequencing { .. })
        ));
    }

    #[test]
    fn w_norm_matches_closed_form() {
        for (w, alpha) in [(1, 0.5), (5, 0.9), (50, 0.99), (10, 1.0)] {
            let buf = GradientBuffer::new(w, alpha).unwrap();
            let closed = if alpha == 1.0 {
                w as f64
            } else {
                (1.0 - alpha.powi(w as i32)) / (1.0 - alpha)
            };
            assert!((buf.w_norm() - closed).abs() < 1e-12, "w={w} alpha={alpha}");
        }
    }

    #[test]
    fn collapse_property_randomized() {
        let mut rng = Rng::new(2024);
        for _ in 0..50 {
            let d = 1 + (rng.next_u64() % 6) as usize;
            let x = Vector::new((0..d).map(|_| rng.uniform(-2.0, 2.0)).collect());
            let center: Vec<f64> = (0..d).map(|_| rng.uniform(-2.0, 2.0)).collect();
            let eta = rng.uniform(0.01, 2.0);
            let obj = quad(center);
            let sgd_out = sgd_step(&x, &obj, eta, 1);

            let mut gbuf = GradientBuffer::new(1, 0.99).unwrap();
            let pts_out = pts_step(&x, &obj, 1, &mut gbuf, eta).unwrap();
            let mut cbuf = ContextBuffer::new(1).unwrap();
            cbuf.push(1, obj).unwrap();
            let hts_out = hts_step(&x, &cbuf, eta).unwrap();
            for j in 0..d {
                assert!((pts_out.params[j] - sgd_out.params[j]).abs() < 1e-12);
                assert!((hts_out.params[j] - sgd_out.params[j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn alpha_one_gives_uniform_mean() {
        let mut buf = GradientBuffer::new(3, 1.0).unwrap();
        buf.push(1, Vector::new(vec![3.0])).unwrap();
        buf.push(2, Vector::new(vec![6.0])).unwrap();
        buf.push(3, Vector::new(vec![0.0])).unwrap();
        let s = buf.smoothed().unwrap();
        assert!((s[0] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn steady_state_recovers_constant_gradient() {
        let mut buf = GradientBuffer::new(8, 0.9).unwrap();
        for t in 1..=8 {
            buf.push(t, Vector::new(vec![1.75, -0.5])).unwrap();
        }
        let s = buf.smoothed().unwrap();
        // FP summation order costs a few ulps relative to exact algebra.
        assert!((s[0] - 1.75).abs() < 1e-14);
        assert!((s[1] - -0.5).abs() < 1e-14);
    }

    #[test]
    fn partial_buffer_shrinks_step_by_partial_weight_ratio() {
        let g = Vector::new(vec![2.0]);
        let full_w = 6;
        let alpha = 0.8;
        let mut partial = GradientBuffer::new(full_w, alpha).unwrap();
        let mut full = GradientBuffer::new(full_w, alpha).unwrap();
        for t in 1..=full_w as u64 {
            full.push(t, g.clone()).unwrap();
        }
        for t_filled in 1..full_w as u64 {
            partial.push(t_filled, g.clone()).unwrap();
            let ratio_expected: f64 = (0..t_filled as i32).map(|i| alpha.powi(i)).sum::<f64>()
                / full.w_norm();
            let ratio = partial.smoothed().unwrap()[0] / full.smoothed().unwrap()[0];
            assert!(ratio_expected < 1.0);
            assert!((ratio - ratio_expected).abs() < 1e-12);
        }
    }

    #[test]
    fn state_machine_counts_grad_evals() {
        let mut opt = OnlineOptimizer::new(OptimizerConfig {
            method: Method::Hts,
            eta: 0.1,
            window: 4,
            alpha: 0.99,
            schedule: Schedule::InverseSqrt,
        })
        .unwrap();
        let mut x = Vector::new(vec![0.0]);
        for t in 1..=10u64 {
            let out = opt.step(&x, quad(vec![1.0])).unwrap();
            assert_eq!(out.receipt.grad_evals, t.min(4));
            assert_eq!(out.receipt.step_index, t);
            x = out.params;
        }

        let mut opt = OnlineOptimizer::new(OptimizerConfig {
            method: Method::Pts,
            eta: 0.1,
            window: 4,
            alpha: 0.99,
            schedule: Schedule::InverseSqrt,
        })
        .unwrap();
        let mut x = Vector::new(vec![0.0]);
        for _ in 0..10 {
            let out = opt.step(&x, quad(vec![1.0])).unwrap();
            assert_eq!(out.receipt.grad_evals, 1);
            x = out.params;
        }
    }

    #[test]
    fn steps_are_pure_given_identical_inputs() {
        let x = Vector::new(vec![0.5, 0.5]);
        let obj = quad(vec![1.0, -1.0]);
        let a = sgd_step(&x, &obj, 0.3, 1);
        let b = sgd_step(&x, &obj, 0.3, 1);
        assert_eq!(a.params, b.params);
        assert_eq!(
            a.receipt.smoothed_grad_norm_sq,
            b.receipt.smoothed_grad_norm_sq
        );
        assert_eq!(x.as_slice(), &[0.5, 0.5]); // inputs untouched
    }

    #[test]
    fn config_validation() {
        let bad = OptimizerConfig {
            method: Method::Pts,
            eta: -1.0,
            window: 1,
            alpha: 0.5,
            schedule: Schedule::Constant,
        };
        assert!(bad.validate().is_err());
        // eta = 0 is the degenerate frozen run and stays valid.
        assert!(OptimizerConfig { eta: 0.0, ..bad.clone() }.validate().is_ok());
        let bad_alpha = OptimizerConfig {
            alpha: 1.5,
            eta: 1.0,
            ..bad
        };
        assert!(bad_alpha.validate().is_err());
    }
}
