//! Linear quantile regressor: one affine head per (quantile, horizon) cell
//! over the flattened feature window.

use super::{grid_loss_and_subgrads, heads_backward, heads_forward, LossContext, ModelSpec};

pub(super) fn param_count(spec: &ModelSpec) -> usize {
    spec.quantile_count * spec.horizons * (spec.n_in() + 1)
}

pub(super) fn reset_biases(spec: &ModelSpec, data: &mut [f64]) {
    let n_in = spec.n_in();
    for blk in 0..spec.quantile_count * spec.horizons {
        data[blk * (n_in + 1) + n_in] = 0.0;
    }
}

pub(super) fn forward(spec: &ModelSpec, params: &[f64], ctx: &LossContext) -> Vec<f64> {
    heads_forward(
        params,
        ctx.features.as_flat(),
        spec.quantile_count,
        spec.horizons,
    )
}

pub(super) fn loss_and_grad(
    spec: &ModelSpec,
    params: &[f64],
    ctx: &LossContext,
) -> (f64, Vec<f64>) {
    let grid = forward(spec, params, ctx);
    let (loss, subgrads) = grid_loss_and_subgrads(&grid, ctx);
    let mut grad = vec![0.0; params.len()];
    heads_backward(
        params,
        ctx.features.as_flat(),
        &subgrads,
        spec.quantile_count,
        spec.horizons,
        &mut grad,
        None,
    );
    (loss, grad)
}
