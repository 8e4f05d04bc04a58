"""Named parameter groups and an AdamW optimizer with per-group rates."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .autograd import Tensor


@dataclass
class ParamGroup:
    lr: float
    frozen: bool = False
    params: dict[str, Tensor] = field(default_factory=dict)


class ParamStore:
    """Parameter tensors grouped by model component.

    Group/parameter insertion order is stable, so initialization and
    checkpoints are reproducible. Frozen groups receive no updates.
    """

    def __init__(self):
        self.groups: dict[str, ParamGroup] = {}

    def add_group(self, name: str, lr: float, frozen: bool = False) -> ParamGroup:
        if name in self.groups:
            raise ValueError(f"duplicate group {name!r}")
        group = ParamGroup(lr=lr, frozen=frozen)
        self.groups[name] = group
        return group

    def add(self, group: str, name: str, tensor: Tensor) -> Tensor:
        g = self.groups[group]
        if name in g.params:
            raise ValueError(f"duplicate parameter {group}.{name}")
        tensor.requires_grad = True
        g.params[name] = tensor
        return tensor

    def named_tensors(self):
        """Yield (full_name, tensor) across all groups, insertion order."""
        for gname, group in self.groups.items():
            for pname, t in group.params.items():
                yield f"{gname}.{pname}", t

    def get(self, full_name: str) -> Tensor:
        gname, _, pname = full_name.partition(".")
        return self.groups[gname].params[pname]

    def set_frozen(self, group: str, frozen: bool) -> None:
        self.groups[group].frozen = frozen

    def zero_grad(self) -> None:
        for _, t in self.named_tensors():
            t.grad = None

    def snapshot(self) -> dict[str, np.ndarray]:
        return {name: t.data.copy() for name, t in self.named_tensors()}

    def restore(self, snap: dict[str, np.ndarray]) -> None:
        for name, t in self.named_tensors():
            t.data = snap[name].copy()


class AdamW:
    """Adaptive moments with decoupled weight decay.

    Update per unfrozen parameter:
        m <- b1 m + (1-b1) g;  v <- b2 v + (1-b2) g^2
        theta <- theta - lr * (m_hat / (sqrt(v_hat) + eps) + wd * theta)
    Frozen groups are skipped entirely; all gradients are cleared afterwards.
    """

    def __init__(
        self,
        store: ParamStore,
        betas: tuple[float, float] = (0.9, 0.999),
        eps: float = 1e-8,
        weight_decay: float = 0.0,
        grad_clip: float = 0.0,
    ):
        self.store = store
        self.b1, self.b2 = betas
        self.eps = eps
        self.weight_decay = weight_decay
        self.grad_clip = grad_clip
        self._m: dict[str, np.ndarray] = {}
        self._v: dict[str, np.ndarray] = {}
        self._t: dict[str, int] = {}

    def _global_grad_norm(self) -> float:
        total = 0.0
        for gname, group in self.store.groups.items():
            if group.frozen:
                continue
            for t in group.params.values():
                if t.grad is not None:
                    total += float((t.grad**2).sum())
        return np.sqrt(total)

    def step(self) -> None:
        scale = 1.0
        if self.grad_clip > 0.0:
            norm = self._global_grad_norm()
            if norm > self.grad_clip:
                scale = self.grad_clip / norm
        for gname, group in self.store.groups.items():
            if group.frozen:
                continue
            for pname, p in group.params.items():
                if p.grad is None:
                    continue
                g = p.grad * scale
                key = f"{gname}.{pname}"
                t = self._t.get(key, 0) + 1
                self._t[key] = t
                m = self._m.setdefault(key, np.zeros_like(p.data))
                v = self._v.setdefault(key, np.zeros_like(p.data))
                m *= self.b1
                m += (1.0 - self.b1) * g
                v *= self.b2
                v += (1.0 - self.b2) * g * g
                m_hat = m / (1.0 - self.b1**t)
                v_hat = v / (1.0 - self.b2**t)
                p.data -= group.lr * (
                    m_hat / (np.sqrt(v_hat) + self.eps) + self.weight_decay * p.data
                )
        self.store.zero_grad()
