//! Hand-differentiated forecasting models over a flat parameter vector.
//!
//! Three kinds are provided: a linear quantile regressor, a one-hidden-layer
//! MLP (tanh), and a single-layer LSTM. Each kind has one linear head per
//! (quantile, horizon) cell; heads do not share weights and every head reads
//! the same trunk output, so the trunk gradient sums over all heads.
//!
//! # Parameter layout
//!
//! All kinds flatten their weights into one `Vector` in a fixed block order.
//! With `W = input_window`, `F = feature_dim`, `H = hidden_dim`,
//! `K = horizons`, `Q = quantile_count`, and `n_in = W * F`:
//!
//! * `linear` — for each quantile `qi` then horizon `k`: `[w (n_in), b (1)]`.
//!   Total `Q*K*(n_in + 1)`.
//! * `mlp` — `[W1 (H x n_in, row-major), b1 (H)]`, then heads
//!   `[v (H), c (1)]` per `(qi, k)`. Total `H*(n_in+1) + Q*K*(H+1)`.
//! * `lstm` — `[W_ih (4H x F, row-major), W_hh (4H x H, row-major), b (4H)]`,
//!   then heads `[v (H), c (1)]` per `(qi, k)` applied to the final hidden
//!   state. Gate row order within the `4H` dimension: input, forget,
//!   candidate, output. Total `4H*(F+H+1) + Q*K*(H+1)`.
//!
//! The loss of a model on one context is the summed pinball loss over the
//! horizon x quantile grid; its gradient is exact reverse-mode backprop
//! (through time for the LSTM) under the tie-at-zero subgradient convention.

mod linear;
mod lstm;
mod mlp;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::losses::{quantile_loss, quantile_loss_subgrad, QuantileForecast, QuantileSet};
use crate::numeric::{rel_err, Rng, Vector};
use crate::objective::Objective;

/// Which forecasting architecture a spec describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Linear,
    Mlp,
    Lstm,
}

/// Architecture hyperparameters; the parameter count is a pure function of these.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub kind: ModelKind,
    /// Lookback length in time steps.
    pub input_window: usize,
    /// Features per time step.
    pub feature_dim: usize,
    /// Hidden units; ignored by `linear`.
    #[serde(default = "default_hidden")]
    pub hidden_dim: usize,
    /// Number of forecast steps emitted jointly.
    pub horizons: usize,
    /// Number of quantile heads; must match the quantile set in use.
    pub quantile_count: usize,
}

fn default_hidden() -> usize {
    1
}

impl ModelSpec {
    /// Flat parameter count for this architecture.
    pub fn param_count(&self) -> usize {
        match self.kind {
            ModelKind::Linear => linear::param_count(self),
            ModelKind::Mlp => mlp::param_count(self),
            ModelKind::Lstm => lstm::param_count(self),
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let needs_hidden = !matches!(self.kind, ModelKind::Linear);
        let dims = [
            ("input_window", self.input_window),
            ("feature_dim", self.feature_dim),
            ("horizons", self.horizons),
            ("quantile_count", self.quantile_count),
            ("hidden_dim", if needs_hidden { self.hidden_dim } else { 1 }),
        ];
        for (name, v) in dims {
            if v == 0 {
                return Err(Error::Domain(format!("model {name} must be >= 1")));
            }
        }
        Ok(())
    }

    fn n_in(&self) -> usize {
        self.input_window * self.feature_dim
    }
}

/// Row-major matrix of input features, `rows x cols`.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension {
                what: "feature matrix",
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(FeatureMatrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// The whole matrix flattened row-major.
    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }
}

/// One step's batch of data: enough to re-evaluate that step's loss at any
/// parameter vector.
#[derive(Clone, Debug)]
pub struct LossContext {
    pub features: FeatureMatrix,
    /// True value at 1-based horizon `k` is `targets[k-1]`.
    pub targets: Vec<f64>,
    pub quantiles: QuantileSet,
    pub step_index: u64,
}

/// A flat parameter vector tied to the layout that interprets it.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamVector {
    pub layout: ModelSpec,
    pub data: Vector,
}

impl ParamVector {
    pub fn new(layout: ModelSpec, data: Vector) -> Result<Self> {
        let d = layout.param_count();
        if data.len() != d {
            return Err(Error::Dimension {
                what: "parameter vector",
                expected: d,
                got: data.len(),
            });
        }
        Ok(ParamVector { layout, data })
    }
}

/// Draw initial parameters: weights uniform in `[-scale, scale]`, biases zero
/// except the LSTM forget gate, which starts at 1.0.
pub fn init_params(spec: &ModelSpec, rng: &mut Rng, scale: f64) -> Result<ParamVector> {
    spec.validate()?;
    if !(scale >= 0.0 && scale.is_finite()) {
        return Err(Error::Domain(format!("init scale must be finite and >= 0, got {scale}")));
    }
    let d = spec.param_count();
    let mut data: Vec<f64> = (0..d).map(|_| rng.uniform(-scale, scale)).collect();
    match spec.kind {
        ModelKind::Linear => linear::reset_biases(spec, &mut data),
        ModelKind::Mlp => mlp::reset_biases(spec, &mut data),
        ModelKind::Lstm => lstm::reset_biases(spec, &mut data),
    }
    ParamVector::new(spec.clone(), Vector::new(data))
}

fn check_ctx(spec: &ModelSpec, ctx: &LossContext) -> Result<()> {
    if ctx.features.rows() != spec.input_window || ctx.features.cols() != spec.feature_dim {
        return Err(Error::Dimension {
            what: "context features",
            expected: spec.input_window * spec.feature_dim,
            got: ctx.features.rows() * ctx.features.cols(),
        });
    }
    if ctx.targets.len() != spec.horizons {
        return Err(Error::Dimension {
            what: "context targets",
            expected: spec.horizons,
            got: ctx.targets.len(),
        });
    }
    if ctx.quantiles.len() != spec.quantile_count {
        return Err(Error::Dimension {
            what: "context quantiles",
            expected: spec.quantile_count,
            got: ctx.quantiles.len(),
        });
    }
    Ok(())
}

fn forward_grid(spec: &ModelSpec, params: &[f64], ctx: &LossContext) -> Vec<f64> {
    match spec.kind {
        ModelKind::Linear => linear::forward(spec, params, ctx),
        ModelKind::Mlp => mlp::forward(spec, params, ctx),
        ModelKind::Lstm => lstm::forward(spec, params, ctx),
    }
}

/// Predict the quantile grid for one context.
pub fn forward(params: &ParamVector, ctx: &LossContext) -> Result<QuantileForecast> {
    let spec = &params.layout;
    spec.validate()?;
    check_ctx(spec, ctx)?;
    let grid = forward_grid(spec, params.data.as_slice(), ctx);
    QuantileForecast::new(spec.horizons, ctx.quantiles.clone(), grid)
}

/// Summed pinball loss over the grid plus per-cell subgradients.
fn grid_loss_and_subgrads(grid: &[f64], ctx: &LossContext) -> (f64, Vec<f64>) {
    let qs = ctx.quantiles.as_slice();
    let q_count = qs.len();
    let mut loss = 0.0;
    let mut subgrads = vec![0.0; grid.len()];
    for (k, &y) in ctx.targets.iter().enumerate() {
        for (qi, &q) in qs.iter().enumerate() {
            let y_hat = grid[k * q_count + qi];
            // Quantiles were validated at QuantileSet construction.
            loss += quantile_loss(y, y_hat, q).expect("validated quantile");
            subgrads[k * q_count + qi] =
                quantile_loss_subgrad(y, y_hat, q).expect("validated quantile");
        }
    }
    (loss, subgrads)
}

/// Raw loss-and-gradient path used by optimizers: NaN/inf propagate instead
/// of erroring. Shapes must already be consistent (see [`ModelObjective::new`]).
pub fn loss_and_grad_raw(spec: &ModelSpec, x: &Vector, ctx: &LossContext) -> (f64, Vector) {
    assert_eq!(
        x.len(),
        spec.param_count(),
        "parameter vector length does not match model layout"
    );
    let params = x.as_slice();
    let (loss, grad) = match spec.kind {
        ModelKind::Linear => linear::loss_and_grad(spec, params, ctx),
        ModelKind::Mlp => mlp::loss_and_grad(spec, params, ctx),
        ModelKind::Lstm => lstm::loss_and_grad(spec, params, ctx),
    };
    (loss, Vector::new(grad))
}

/// Loss and exact gradient for one context, with a finiteness check.
pub fn loss_and_grad(params: &ParamVector, ctx: &LossContext) -> Result<(f64, Vector)> {
    let spec = &params.layout;
    spec.validate()?;
    check_ctx(spec, ctx)?;
    let (loss, grad) = loss_and_grad_raw(spec, &params.data, ctx);
    if !loss.is_finite() || !grad.is_finite() {
        return Err(Error::Numeric(format!(
            "loss or gradient non-finite at step {}",
            ctx.step_index
        )));
    }
    Ok((loss, grad))
}

/// A model layout bound to one step's data; the production [`Objective`].
#[derive(Clone, Debug)]
pub struct ModelObjective {
    layout: ModelSpec,
    ctx: LossContext,
}

impl ModelObjective {
    pub fn new(layout: ModelSpec, ctx: LossContext) -> Result<Self> {
        layout.validate()?;
        check_ctx(&layout, &ctx)?;
        Ok(ModelObjective { layout, ctx })
    }

    pub fn step_index(&self) -> u64 {
        self.ctx.step_index
    }

    pub fn context(&self) -> &LossContext {
        &self.ctx
    }
}

impl Objective for ModelObjective {
    fn loss_and_grad(&self, x: &Vector) -> (f64, Vector) {
        loss_and_grad_raw(&self.layout, x, &self.ctx)
    }
}

/// Coordinates whose pinball residual sits this close to the kink are skipped
/// by the gradient check; the subgradient there is valid but not
/// finite-difference-matchable.
const KINK_TOL: f64 = 1e-4;

/// Compare backprop gradients against central differences on random
/// instances; returns the worst relative error over all checked coordinates.
pub fn grad_check(spec: &ModelSpec, trials: usize, rng: &mut Rng) -> Result<f64> {
    if trials < 1 {
        return Err(Error::Domain("grad_check needs at least one trial".into()));
    }
    spec.validate()?;
    let h = 1e-5;
    let d = spec.param_count();
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let params = init_params(spec, rng, 0.5)?;
        let ctx = random_context(spec, rng);
        let (_, grad) = loss_and_grad_raw(spec, &params.data, &ctx);
        let base_grid = forward_grid(spec, params.data.as_slice(), &ctx);
        let mut probe = params.data.clone();
        for j in 0..d {
            probe[j] = params.data[j] + h;
            let grid_plus = forward_grid(spec, probe.as_slice(), &ctx);
            probe[j] = params.data[j] - h;
            let grid_minus = forward_grid(spec, probe.as_slice(), &ctx);
            probe[j] = params.data[j];
            if near_kink(&base_grid, &grid_plus, &grid_minus, &ctx) {
                continue;
            }
            let (loss_plus, _) = grid_loss_and_subgrads(&grid_plus, &ctx);
            let (loss_minus, _) = grid_loss_and_subgrads(&grid_minus, &ctx);
            let numeric = (loss_plus - loss_minus) / (2.0 * h);
            worst = worst.max(rel_err(grad[j], numeric));
        }
    }
    Ok(worst)
}

/// A coordinate is kink-adjacent if any grid cell's residual is close to, or
/// crosses, zero across the three probe points.
fn near_kink(base: &[f64], plus: &[f64], minus: &[f64], ctx: &LossContext) -> bool {
    let q_count = ctx.quantiles.len();
    for (k, &y) in ctx.targets.iter().enumerate() {
        for qi in 0..q_count {
            let idx = k * q_count + qi;
            let r0 = base[idx] - y;
            let rp = plus[idx] - y;
            let rm = minus[idx] - y;
            if r0.abs() < KINK_TOL || rp.abs() < KINK_TOL || rm.abs() < KINK_TOL {
                return true;
            }
            if r0.signum() != rp.signum() || r0.signum() != rm.signum() {
                return true;
            }
        }
    }
    false
}

/// Random context for gradient checking: features and targets of order one,
/// evenly spaced quantiles matching the spec's head count.
pub fn random_context(spec: &ModelSpec, rng: &mut Rng) -> LossContext {
    let n = spec.input_window * spec.feature_dim;
    let features = FeatureMatrix::new(
        spec.input_window,
        spec.feature_dim,
        (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect(),
    )
    .expect("sized by construction");
    let targets = (0..spec.horizons).map(|_| rng.uniform(-1.0, 1.0)).collect();
    let qc = spec.quantile_count;
    let quantiles = QuantileSet::new(
        (1..=qc)
            .map(|i| i as f64 / (qc + 1) as f64)
            .collect::<Vec<_>>(),
    )
    .expect("evenly spaced quantiles are valid");
    LossContext {
        features,
        targets,
        quantiles,
        step_index: 0,
    }
}

/// Shared head arithmetic: each `(qi, k)` block `[v (len_in), c]` maps the
/// trunk output to `grid[k*Q + qi]`.
fn heads_forward(heads: &[f64], input: &[f64], q_count: usize, horizons: usize) -> Vec<f64> {
    let len_in = input.len();
    let mut grid = vec![0.0; q_count * horizons];
    for qi in 0..q_count {
        for k in 0..horizons {
            let off = (qi * horizons + k) * (len_in + 1);
            let w = &heads[off..off + len_in];
            let b = heads[off + len_in];
            let dot: f64 = w.iter().zip(input).map(|(a, x)| a * x).sum();
            grid[k * q_count + qi] = dot + b;
        }
    }
    grid
}

/// Backward pass through the heads: fills the head block gradients and, when
/// requested, accumulates the gradient with respect to the trunk input.
fn heads_backward(
    heads: &[f64],
    input: &[f64],
    subgrads: &[f64],
    q_count: usize,
    horizons: usize,
    grad_heads: &mut [f64],
    mut grad_input: Option<&mut [f64]>,
) {
    let len_in = input.len();
    for qi in 0..q_count {
        for k in 0..horizons {
            let s = subgrads[k * q_count + qi];
            let off = (qi * horizons + k) * (len_in + 1);
            for j in 0..len_in {
                grad_heads[off + j] += s * input[j];
            }
            grad_heads[off + len_in] += s;
            if let Some(gi) = grad_input.as_deref_mut() {
                let w = &heads[off..off + len_in];
                for j in 0..len_in {
                    gi[j] += s * w[j];
                }
            }
        }
    }
}
