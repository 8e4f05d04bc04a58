"""Differentiable layers: dense, LSTM/BiLSTM, and their initializers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .autograd import Tensor, concat, sigmoid, tanh


def init_uniform(rng: np.random.Generator, shape, scale: float) -> Tensor:
    return Tensor(rng.uniform(-scale, scale, size=shape), requires_grad=True)


def init_dense(rng: np.random.Generator, n_in: int, n_out: int) -> tuple[Tensor, Tensor]:
    """Weight uniform(+-1/sqrt(fan_in)), bias zero."""
    w = init_uniform(rng, (n_in, n_out), 1.0 / np.sqrt(n_in))
    b = Tensor(np.zeros(n_out), requires_grad=True)
    return w, b


def dense(x: Tensor, w: Tensor, b: Tensor) -> Tensor:
    """Row-wise affine map: (N, in) -> (N, out)."""
    if x.shape[-1] != w.shape[0]:
        raise ValueError(f"dense shape mismatch: {x.shape} @ {w.shape}")
    return x @ w + b


@dataclass
class LstmParams:
    wx: Tensor  # (n_in, 4H), gate order i, f, o, g
    wh: Tensor  # (H, 4H)
    b: Tensor   # (4H,)

    @property
    def hidden(self) -> int:
        return self.wh.shape[0]

    def tensors(self) -> dict[str, Tensor]:
        return {"wx": self.wx, "wh": self.wh, "b": self.b}


def init_lstm(rng: np.random.Generator, n_in: int, hidden: int) -> LstmParams:
    """Uniform(+-1/sqrt(fan_in)) weights, zero bias with forget gate at +1."""
    wx = init_uniform(rng, (n_in, 4 * hidden), 1.0 / np.sqrt(n_in))
    wh = init_uniform(rng, (hidden, 4 * hidden), 1.0 / np.sqrt(hidden))
    b_data = np.zeros(4 * hidden)
    b_data[hidden : 2 * hidden] = 1.0
    return LstmParams(wx, wh, Tensor(b_data, requires_grad=True))


def lstm(x: Tensor, p: LstmParams, reverse: bool = False) -> Tensor:
    """Unidirectional gated recurrence over rows of x: (N, in) -> (N, H)."""
    n = x.shape[0]
    h_dim = p.hidden
    h = Tensor(np.zeros((1, h_dim)))
    c = Tensor(np.zeros((1, h_dim)))
    outs: list[Tensor] = [None] * n  # type: ignore[list-item]
    steps = range(n - 1, -1, -1) if reverse else range(n)
    for t in steps:
        z = x[t : t + 1] @ p.wx + h @ p.wh + p.b
        i = sigmoid(z[:, 0:h_dim])
        f = sigmoid(z[:, h_dim : 2 * h_dim])
        o = sigmoid(z[:, 2 * h_dim : 3 * h_dim])
        g = tanh(z[:, 3 * h_dim : 4 * h_dim])
        c = f * c + i * g
        h = o * tanh(c)
        outs[t] = h
    return concat(outs, axis=0)


@dataclass
class BiLstmParams:
    fwd: LstmParams
    bwd: LstmParams

    def tensors(self) -> dict[str, Tensor]:
        out = {f"fwd.{k}": v for k, v in self.fwd.tensors().items()}
        out.update({f"bwd.{k}": v for k, v in self.bwd.tensors().items()})
        return out


def init_bilstm(rng: np.random.Generator, n_in: int, hidden: int) -> BiLstmParams:
    return BiLstmParams(init_lstm(rng, n_in, hidden), init_lstm(rng, n_in, hidden))


def bilstm(x: Tensor, p: BiLstmParams) -> Tensor:
    """Concatenated forward and backward passes: (N, in) -> (N, 2H)."""
    if x.shape[0] < 1:
        raise ValueError("bilstm needs at least one row")
    return concat([lstm(x, p.fwd), lstm(x, p.bwd, reverse=True)], axis=1)


EMBED_INIT_SCALE = 0.1


def init_embedding(rng: np.random.Generator, vocab_size: int, dim: int) -> Tensor:
    return init_uniform(rng, (vocab_size, dim), EMBED_INIT_SCALE)


def embedding(table: Tensor, ids: np.ndarray) -> Tensor:
    """Row lookup; duplicate ids accumulate gradient into the same row."""
    return table[np.asarray(ids, dtype=np.intp)]
