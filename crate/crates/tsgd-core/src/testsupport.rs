//! Tiny objectives for tests and benchmarks.

use std::cell::Cell;

use crate::numeric::Vector;
use crate::objective::Objective;

/// `f(x) = 0.5 * ||x - center||^2`, gradient `x - center`.
#[derive(Clone, Debug)]
pub struct QuadraticLoss {
    center: Vector,
}

impl QuadraticLoss {
    pub fn new(center: Vector) -> Self {
        QuadraticLoss { center }
    }
}

impl Objective for QuadraticLoss {
    fn loss_and_grad(&self, x: &Vector) -> (f64, Vector) {
        let grad = x
            .add_scaled(&self.center, -1.0)
            .expect("center length matches iterate");
        (0.5 * grad.norm_sq(), grad)
    }
}

/// Returns a fixed gradient regardless of the iterate; loss is zero.
#[derive(Clone, Debug)]
pub struct ConstGrad {
    grad: Vector,
}

impl ConstGrad {
    pub fn new(grad: Vector) -> Self {
        ConstGrad { grad }
    }
}

impl Objective for ConstGrad {
    fn loss_and_grad(&self, _x: &Vector) -> (f64, Vector) {
        (0.0, self.grad.clone())
    }
}

/// Wraps an objective and counts how often its gradient is evaluated.
#[derive(Clone, Debug)]
pub struct CountingObjective<O> {
    inner: O,
    calls: Cell<u64>,
}

impl<O> CountingObjective<O> {
    pub fn new(inner: O) -> Self {
        CountingObjective {
            inner,
            calls: Cell::new(0),
        }
    }

    pub fn calls(&self) -> u64 {
        self.calls.get()
    }
}

impl<O: Objective> Objective for CountingObjective<O> {
    fn loss_and_grad(&self, x: &Vector) -> (f64, Vector) {
        self.calls.set(self.calls.get() + 1);
        self.inner.loss_and_grad(x)
    }
}
