"""Central-difference gradient checking against the analytic backward pass."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .autograd import Tensor
from .optim import ParamStore


@dataclass
class GradCheckReport:
    tol: float
    h: float
    per_param: dict[str, float] = field(default_factory=dict)  # max rel. error
    worst_param: str = ""
    max_rel_error: float = 0.0

    @property
    def passed(self) -> bool:
        return self.max_rel_error < self.tol

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"grad check {status}: max rel. error {self.max_rel_error:.3e} "
            f"at {self.worst_param or '-'} (tol {self.tol:.1e}, h {self.h:.1e})"
        )


# Relative-error floor: central differences on O(1) losses carry ~1e-9
# absolute noise, which must not read as failure for near-zero gradients.
_DENOM_FLOOR = 1e-3


def _rel_error(analytic: float, numeric: float) -> float:
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), _DENOM_FLOOR)


def grad_check(
    loss_fn: Callable[[], Tensor],
    params: ParamStore | dict[str, Tensor],
    h: float = 1e-5,
    tol: float = 1e-4,
    max_coords: int = 8,
    rng: np.random.Generator | None = None,
) -> GradCheckReport:
    """Compare analytic gradients of ``loss_fn`` with central differences.

    ``loss_fn`` must re-run the forward pass from current parameter values
    and return a scalar Tensor. Tensors larger than ``max_coords`` are
    subsampled coordinate-wise.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    named = (
        list(params.named_tensors())
        if isinstance(params, ParamStore)
        else list(params.items())
    )
    for _, t in named:
        t.grad = None
    loss = loss_fn()
    loss.backward()
    analytic = {
        name: (t.grad.copy() if t.grad is not None else np.zeros_like(t.data))
        for name, t in named
    }

    report = GradCheckReport(tol=tol, h=h)
    for name, t in named:
        flat = t.data.reshape(-1)
        n = flat.size
        coords = (
            np.arange(n)
            if n <= max_coords
            else np.sort(rng.choice(n, size=max_coords, replace=False))
        )
        worst = 0.0
        for c in coords:
            saved = flat[c]
            flat[c] = saved + h
            up = loss_fn().item()
            flat[c] = saved - h
            down = loss_fn().item()
            flat[c] = saved
            numeric = (up - down) / (2.0 * h)
            worst = max(worst, _rel_error(analytic[name].reshape(-1)[c], numeric))
        report.per_param[name] = worst
        if worst >= report.max_rel_error:
            report.max_rel_error = worst
            report.worst_param = name
    for _, t in named:
        t.grad = None
    return report
