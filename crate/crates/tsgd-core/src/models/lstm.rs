//! Single-layer LSTM trunk with per-quantile heads on the final hidden state.
//!
//! Standard cell equations with input/forget/candidate/output gates:
//!
//! ```text
//! z   = W_ih x_t + W_hh h_{t-1} + b          (4H pre-activations)
//! i   = sigmoid(z[0..H])      f = sigmoid(z[H..2H])
//! g   = tanh(z[2H..3H])       o = sigmoid(z[3H..4H])
//! c_t = f .* c_{t-1} + i .* g
//! h_t = o .* tanh(c_t)
//! ```
//!
//! One bias vector is used per gate stack (not separate input/hidden biases).
//! The gradient runs full backpropagation through time from the final hidden
//! state; earlier states feed the loss only through the recurrence.

use super::{grid_loss_and_subgrads, heads_backward, heads_forward, LossContext, ModelSpec};

pub(super) fn param_count(spec: &ModelSpec) -> usize {
    let h = spec.hidden_dim;
    let f = spec.feature_dim;
    4 * h * (f + h + 1) + spec.quantile_count * spec.horizons * (h + 1)
}

struct Layout {
    h: usize,
    f: usize,
    w_hh: usize,
    bias: usize,
    heads: usize,
}

fn layout(spec: &ModelSpec) -> Layout {
    let h = spec.hidden_dim;
    let f = spec.feature_dim;
    Layout {
        h,
        f,
        w_hh: 4 * h * f,
        bias: 4 * h * (f + h),
        heads: 4 * h * (f + h + 1),
    }
}

pub(super) fn reset_biases(spec: &ModelSpec, data: &mut [f64]) {
    let lay = layout(spec);
    let h = lay.h;
    for b in &mut data[lay.bias..lay.bias + 4 * h] {
        *b = 0.0;
    }
    // Forget gate opens at init so early cell state survives.
    for b in &mut data[lay.bias + h..lay.bias + 2 * h] {
        *b = 1.0;
    }
    for blk in 0..spec.quantile_count * spec.horizons {
        data[lay.heads + blk * (h + 1) + h] = 0.0;
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Per-timestep activations retained for the backward pass.
struct StepTrace {
    i: Vec<f64>,
    f: Vec<f64>,
    g: Vec<f64>,
    o: Vec<f64>,
    c_prev: Vec<f64>,
    tanh_c: Vec<f64>,
    h_prev: Vec<f64>,
}

fn run_cell(spec: &ModelSpec, params: &[f64], ctx: &LossContext) -> (Vec<f64>, Vec<StepTrace>) {
    let lay = layout(spec);
    let h_dim = lay.h;
    let mut h_state = vec![0.0; h_dim];
    let mut c_state = vec![0.0; h_dim];
    let mut traces = Vec::with_capacity(spec.input_window);

    for t in 0..spec.input_window {
        let x_t = ctx.features.row(t);
        let mut i = vec![0.0; h_dim];
        let mut f = vec![0.0; h_dim];
        let mut g = vec![0.0; h_dim];
        let mut o = vec![0.0; h_dim];
        for r in 0..4 * h_dim {
            let w_ih = &params[r * lay.f..(r + 1) * lay.f];
            let w_hh = &params[lay.w_hh + r * h_dim..lay.w_hh + (r + 1) * h_dim];
            let mut z = params[lay.bias + r];
            for (w, x) in w_ih.iter().zip(x_t) {
                z += w * x;
            }
            for (w, hp) in w_hh.iter().zip(&h_state) {
                z += w * hp;
            }
            match r / h_dim {
                0 => i[r % h_dim] = sigmoid(z),
                1 => f[r % h_dim] = sigmoid(z),
                2 => g[r % h_dim] = z.tanh(),
                _ => o[r % h_dim] = sigmoid(z),
            }
        }
        let c_prev = c_state.clone();
        let h_prev = h_state.clone();
        let mut tanh_c = vec![0.0; h_dim];
        for r in 0..h_dim {
            c_state[r] = f[r] * c_prev[r] + i[r] * g[r];
            tanh_c[r] = c_state[r].tanh();
            h_state[r] = o[r] * tanh_c[r];
        }
        traces.push(StepTrace {
            i,
            f,
            g,
            o,
            c_prev,
            tanh_c,
            h_prev,
        });
    }
    (h_state, traces)
}

pub(super) fn forward(spec: &ModelSpec, params: &[f64], ctx: &LossContext) -> Vec<f64> {
    let lay = layout(spec);
    let (h_final, _) = run_cell(spec, params, ctx);
    heads_forward(
        &params[lay.heads..],
        &h_final,
        spec.quantile_count,
        spec.horizons,
    )
}

pub(super) fn loss_and_grad(
    spec: &ModelSpec,
    params: &[f64],
    ctx: &LossContext,
) -> (f64, Vec<f64>) {
    let lay = layout(spec);
    let h_dim = lay.h;
    let (h_final, traces) = run_cell(spec, params, ctx);
    let grid = heads_forward(
        &params[lay.heads..],
        &h_final,
        spec.quantile_count,
        spec.horizons,
    );
    let (loss, subgrads) = grid_loss_and_subgrads(&grid, ctx);

    let mut grad = vec![0.0; params.len()];
    let mut d_h = vec![0.0; h_dim];
    let (trunk_grad, head_grad) = grad.split_at_mut(lay.heads);
    heads_backward(
        &params[lay.heads..],
        &h_final,
        &subgrads,
        spec.quantile_count,
        spec.horizons,
        head_grad,
        Some(&mut d_h),
    );

    // Backpropagation through time from the final state.
    let mut d_c = vec![0.0; h_dim];
    for t in (0..spec.input_window).rev() {
        let tr = &traces[t];
        let x_t = ctx.features.row(t);
        let mut d_raw = vec![0.0; 4 * h_dim];
        for r in 0..h_dim {
            let dc_total = d_h[r] * tr.o[r] * (1.0 - tr.tanh_c[r] * tr.tanh_c[r]) + d_c[r];
            d_raw[r] = dc_total * tr.g[r] * tr.i[r] * (1.0 - tr.i[r]);
            d_raw[h_dim + r] = dc_total * tr.c_prev[r] * tr.f[r] * (1.0 - tr.f[r]);
            d_raw[2 * h_dim + r] = dc_total * tr.i[r] * (1.0 - tr.g[r] * tr.g[r]);
            d_raw[3 * h_dim + r] = d_h[r] * tr.tanh_c[r] * tr.o[r] * (1.0 - tr.o[r]);
            d_c[r] = dc_total * tr.f[r];
        }
        for r in 0..4 * h_dim {
            let dr = d_raw[r];
            for (slot, x) in trunk_grad[r * lay.f..(r + 1) * lay.f].iter_mut().zip(x_t) {
                *slot += dr * x;
            }
            let hh = lay.w_hh + r * h_dim;
            for (slot, hp) in trunk_grad[hh..hh + h_dim].iter_mut().zip(&tr.h_prev) {
                *slot += dr * hp;
            }
            trunk_grad[lay.bias + r] += dr;
        }
        // d_h for the previous timestep comes only through W_hh.
        for k in 0..h_dim {
            let mut acc = 0.0;
            for r in 0..4 * h_dim {
                acc += params[lay.w_hh + r * h_dim + k] * d_raw[r];
            }
            d_h[k] = acc;
        }
    }
    (loss, grad)
}
