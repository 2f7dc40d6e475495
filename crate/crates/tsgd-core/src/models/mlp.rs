//! One-hidden-layer perceptron with tanh activation and per-quantile heads.

use super::{grid_loss_and_subgrads, heads_backward, heads_forward, LossContext, ModelSpec};

pub(super) fn param_count(spec: &ModelSpec) -> usize {
    let n_in = spec.n_in();
    let h = spec.hidden_dim;
    h * (n_in + 1) + spec.quantile_count * spec.horizons * (h + 1)
}

fn heads_offset(spec: &ModelSpec) -> usize {
    spec.hidden_dim * (spec.n_in() + 1)
}

pub(super) fn reset_biases(spec: &ModelSpec, data: &mut [f64]) {
    let n_in = spec.n_in();
    let h = spec.hidden_dim;
    for b in &mut data[h * n_in..h * (n_in + 1)] {
        *b = 0.0;
    }
    let base = heads_offset(spec);
    for blk in 0..spec.quantile_count * spec.horizons {
        data[base + blk * (h + 1) + h] = 0.0;
    }
}

fn hidden(spec: &ModelSpec, params: &[f64], ctx: &LossContext) -> Vec<f64> {
    let n_in = spec.n_in();
    let h = spec.hidden_dim;
    let x = ctx.features.as_flat();
    let b1 = &params[h * n_in..h * (n_in + 1)];
    (0..h)
        .map(|r| {
            let row = &params[r * n_in..(r + 1) * n_in];
            let pre: f64 = row.iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>() + b1[r];
            pre.tanh()
        })
        .collect()
}

pub(super) fn forward(spec: &ModelSpec, params: &[f64], ctx: &LossContext) -> Vec<f64> {
    let hid = hidden(spec, params, ctx);
    heads_forward(
        &params[heads_offset(spec)..],
        &hid,
        spec.quantile_count,
        spec.horizons,
    )
}

pub(super) fn loss_and_grad(
    spec: &ModelSpec,
    params: &[f64],
    ctx: &LossContext,
) -> (f64, Vec<f64>) {
    let n_in = spec.n_in();
    let h = spec.hidden_dim;
    let base = heads_offset(spec);
    let x = ctx.features.as_flat();

    let hid = hidden(spec, params, ctx);
    let grid = heads_forward(&params[base..], &hid, spec.quantile_count, spec.horizons);
    let (loss, subgrads) = grid_loss_and_subgrads(&grid, ctx);

    let mut grad = vec![0.0; params.len()];
    let mut d_hid = vec![0.0; h];
    let (trunk_grad, head_grad) = grad.split_at_mut(base);
    heads_backward(
        &params[base..],
        &hid,
        &subgrads,
        spec.quantile_count,
        spec.horizons,
        head_grad,
        Some(&mut d_hid),
    );

    // tanh' = 1 - tanh^2
    for r in 0..h {
        let d_pre = d_hid[r] * (1.0 - hid[r] * hid[r]);
        for j in 0..n_in {
            trunk_grad[r * n_in + j] += d_pre * x[j];
        }
        trunk_grad[h * n_in + r] += d_pre;
    }
    (loss, grad)
}
