"""Independent scalar-loop reference for the encoder-decoder network.

Pure Python lists and math only; deliberately shares no code with the
package so it can serve as an oracle for the vectorized implementation.
Parameters arrive as nested lists (kernel[n_in][4u], recurrent[u][4u],
bias[4u]); gate order is (i, f, g, o).
"""

import math


def _sigmoid(z):
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return ez / (1.0 + ez)


def cell_step(x, h, c, kernel, recurrent, bias):
    units = len(h)
    z = []
    for col in range(4 * units):
        acc = bias[col]
        for row, xv in enumerate(x):
            acc += xv * kernel[row][col]
        for row, hv in enumerate(h):
            acc += hv * recurrent[row][col]
        z.append(acc)
    h_new, c_new = [], []
    for k in range(units):
        i = _sigmoid(z[k])
        f = _sigmoid(z[units + k])
        g = math.tanh(z[2 * units + k])
        o = _sigmoid(z[3 * units + k])
        c2 = f * c[k] + i * g
        c_new.append(c2)
        h_new.append(o * math.tanh(c2))
    return h_new, c_new


def run_lstm(seq, params):
    units = len(params["recurrent"])
    h = [0.0] * units
    c = [0.0] * units
    outputs = []
    for x in seq:
        h, c = cell_step(x, h, c, params["kernel"], params["recurrent"], params["bias"])
        outputs.append(list(h))
    return outputs, h, c


def run_bilstm(seq, fwd, bwd):
    out_f, h_f, c_f = run_lstm(seq, fwd)
    out_b, h_b, c_b = run_lstm(list(reversed(seq)), bwd)
    out_b.reverse()
    outputs = [f + b for f, b in zip(out_f, out_b)]
    return outputs, h_f, c_f, h_b, c_b


def dense(x, weight, bias):
    return [
        bias[col] + sum(x[row] * weight[row][col] for row in range(len(x)))
        for col in range(len(bias))
    ]


def forward(x_vp, x_rp, x_rf, params, future_steps):
    """Whole-model reference: returns future_steps x q_v nested lists."""
    past_in = [v + r for v, r in zip(x_vp, x_rp)]
    _, h_f, c_f, h_b, c_b = run_bilstm(past_in, params["past_fwd"], params["past_bwd"])
    h_p = h_f + h_b
    c_p = c_f + c_b

    _, h_f, c_f, h_b, c_b = run_bilstm(x_rf, params["future_fwd"], params["future_bwd"])
    h_pf = h_p + h_f + h_b
    c_pf = c_p + c_f + c_b

    h_d = dense(
        dense(h_pf, params["fuse_hidden_1"]["weight"], params["fuse_hidden_1"]["bias"]),
        params["fuse_hidden_2"]["weight"],
        params["fuse_hidden_2"]["bias"],
    )
    c_d = dense(
        dense(c_pf, params["fuse_cell_1"]["weight"], params["fuse_cell_1"]["bias"]),
        params["fuse_cell_2"]["weight"],
        params["fuse_cell_2"]["bias"],
    )

    h, c = list(h_d), list(c_d)
    x = list(h_d)
    dec = []
    for _ in range(future_steps):
        h, c = cell_step(
            x, h, c,
            params["decoder"]["kernel"],
            params["decoder"]["recurrent"],
            params["decoder"]["bias"],
        )
        dec.append(list(h))
        x = list(h)

    out, *_ = run_bilstm(dec, params["out_fwd"], params["out_bwd"])
    return [dense(row, params["head"]["weight"], params["head"]["bias"]) for row in out]
