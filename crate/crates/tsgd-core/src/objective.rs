//! The differentiable-loss contract shared by optimizers and regret metrics.

use crate::numeric::Vector;

/// A loss function over a flat parameter vector, evaluable at any point.
///
/// Implementations must be pure: the same `x` always yields the same value
/// and gradient. Non-finite values propagate to the output instead of
/// erroring, so divergence stays observable by the caller.
pub trait Objective {
    /// Loss value and gradient at `x`.
    fn loss_and_grad(&self, x: &Vector) -> (f64, Vector);

    /// Loss value only.
    fn loss(&self, x: &Vector) -> f64 {
        self.loss_and_grad(x).0
    }
}
