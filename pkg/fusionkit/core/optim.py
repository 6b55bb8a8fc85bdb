"""
Adam optimizer and global-norm gradient clipping
"""

from typing import List, Optional, Sequence

import numpy as np

from fusionkit.core.graph import Node


class Adam:
    """
    Adam adaptive moment estimation

    m = b1*m + (1-b1)*g
    v = b2*v + (1-b2)*g^2
    theta -= lr * m_hat / (sqrt(v_hat) + eps), with bias-corrected m_hat, v_hat
    """

    def __init__(self, params: Sequence[Node], lr: float = 1e-3, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8):
        self.params = list(params)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p.value) for p in self.params]
        self.v = [np.zeros_like(p.value) for p in self.params]

    def step(self) -> None:
        self.t += 1
        for i, p in enumerate(self.params):
            self.m[i] = self.beta1 * self.m[i] + (1 - self.beta1) * p.grad
            self.v[i] = self.beta2 * self.v[i] + (1 - self.beta2) * p.grad ** 2
            m_hat = self.m[i] / (1 - self.beta1 ** self.t)
            v_hat = self.v[i] / (1 - self.beta2 ** self.t)
            p.value -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)

    def zero_grad(self) -> None:
        for p in self.params:
            p.zero_grad()


def global_norm(params: Sequence[Node]) -> float:
    return float(np.sqrt(sum(float((p.grad ** 2).sum()) for p in params)))


def clip_grad_norm(params: Sequence[Node], max_norm: Optional[float]) -> float:
    """Rescale all gradients so their joint norm is at most max_norm; returns the norm before clipping"""
    norm = global_norm(params)
    if max_norm is not None and norm > max_norm:
        factor = max_norm / norm
        for p in params:
            p.grad *= factor
    return norm
