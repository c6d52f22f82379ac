"""Shared oracles and the central finite-difference gradient checker."""

import numpy as np
import torch


def finite_diff_check(build_loss, params, n_points=24, step=1e-5, tol=1e-4, seed=0):
    """Compare autograd gradients against central finite differences.

    `build_loss()` must rebuild the scalar loss from the live parameter
    tensors. Checks `n_points` randomly chosen parameter coordinates;
    relative error uses max(|analytic|, |numeric|, 1e-6) as denominator.
    """
    params = [p for p in params if p.requires_grad]
    assert params, "no trainable parameters to check"
    for p in params:
        assert p.dtype == torch.float64, "gradient checks require float64"
        p.grad = None
    loss = build_loss()
    loss.backward()
    grads = [p.grad.detach().clone() if p.grad is not None else torch.zeros_like(p)
             for p in params]

    rng = np.random.default_rng(seed)
    sizes = np.array([p.numel() for p in params])
    flat_total = sizes.sum()
    coords = rng.choice(flat_total, size=min(n_points, flat_total), replace=False)
    worst = 0.0
    for flat_idx in coords:
        which = int(np.searchsorted(np.cumsum(sizes), flat_idx, side="right"))
        local = int(flat_idx - (np.cumsum(sizes)[which] - sizes[which]))
        p = params[which]
        orig = p.detach().view(-1)[local].item()
        with torch.no_grad():
            p.view(-1)[local] = orig + step
        up = float(build_loss().detach())
        with torch.no_grad():
            p.view(-1)[local] = orig - step
        down = float(build_loss().detach())
        with torch.no_grad():
            p.view(-1)[local] = orig
        numeric = (up - down) / (2.0 * step)
        analytic = grads[which].view(-1)[local].item()
        rel = abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1e-6)
        worst = max(worst, rel)
        assert rel < tol, (
            f"grad mismatch at param {which} coord {local}: "
            f"analytic={analytic:.8g} numeric={numeric:.8g} rel={rel:.3g}"
        )
    return worst


def sgc_oracle(x: np.ndarray, layer) -> np.ndarray:
    """Dense loop re-implementation of the adaptive graph convolution.

    x: (N, C_in) single frame or (T, N, C_in); returns same leading
    shape with C_out channels.
    """
    single = x.ndim == 2
    xt = x[None] if single else x  # (T, N, C)
    t, n, _ = xt.shape
    pooled = xt.mean(axis=0)
    global_graph = layer.global_graph.detach().numpy()
    theta = layer.theta.detach().numpy()
    embed_a = layer.embed_a.detach().numpy()
    embed_b = layer.embed_b.detach().numpy()
    alpha = float(layer.alpha.detach())
    dinv = layer.dinv_sqrt.detach().numpy()

    out = np.zeros((t, n, theta.shape[2]))
    for p in range(3):
        ea = pooled @ embed_a[p]
        eb = pooled @ embed_b[p]
        logits = ea @ eb.T
        c_p = np.zeros((n, n))
        for i in range(n):
            row = logits[i] - logits[i].max()
            e = np.exp(row)
            c_p[i] = e / e.sum()
        graph = np.zeros((n, n))
        for i in range(n):
            for j in range(n):
                graph[i, j] = dinv[p, i] * (global_graph[p, i, j] + alpha * c_p[i, j]) * dinv[p, j]
        for ti in range(t):
            pre = graph @ xt[ti] @ theta[p]
            out[ti] += np.maximum(pre, 0.0)
    return out[0] if single else out


def tgc_oracle(x: np.ndarray, layer) -> np.ndarray:
    """Direct-summation temporal convolution with zero padding."""
    weight = layer.weight.detach().numpy()  # (C_out, C_in, k)
    bias = layer.bias.detach().numpy()
    t, n, c_in = x.shape
    c_out, _, k = weight.shape
    half = k // 2
    out = np.zeros((t, n, c_out))
    for ti in range(t):
        for ni in range(n):
            for co in range(c_out):
                acc = bias[co]
                for tap in range(k):
                    src = ti + tap - half
                    if 0 <= src < t:
                        for ci in range(c_in):
                            acc += weight[co, ci, tap] * x[src, ni, ci]
                out[ti, ni, co] = acc
    return out


def gru_unrolled_oracle(x: np.ndarray, gru) -> np.ndarray:
    """Step-by-step numpy recurrence matching a torch bidirectional GRU.

    x: (T, input_dim); returns (T, 2 * hidden) concatenated direction
    states of the last layer.
    """
    from mgclr.temporal import gru_cell_reference

    t = x.shape[0]
    hidden = gru.hidden_size
    layer_in = x
    for layer in range(gru.num_layers):
        outputs = np.zeros((t, 2 * hidden))
        for direction, suffix in ((0, ""), (1, "_reverse")):
            w_ih = getattr(gru, f"weight_ih_l{layer}{suffix}").detach().numpy()
            w_hh = getattr(gru, f"weight_hh_l{layer}{suffix}").detach().numpy()
            b_ih = getattr(gru, f"bias_ih_l{layer}{suffix}").detach().numpy()
            b_hh = getattr(gru, f"bias_hh_l{layer}{suffix}").detach().numpy()
            h = np.zeros(hidden)
            steps = range(t) if direction == 0 else range(t - 1, -1, -1)
            for step in steps:
                h = gru_cell_reference(layer_in[step], h, w_ih, w_hh, b_ih, b_hh)
                outputs[step, direction * hidden : (direction + 1) * hidden] = h
        layer_in = outputs
    return layer_in
