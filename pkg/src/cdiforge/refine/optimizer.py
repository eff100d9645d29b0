"""Adam (adaptive moment estimation) over a list of float arrays.

Parameters are updated in place. Complex parameters are optimized through
their float views, so real and imaginary parts get independent moments.
"""

import numpy as np


class Adam:
    """Bias-corrected Adam.

    m_t = b1 m + (1 - b1) g
    v_t = b2 v + (1 - b2) g^2
    theta -= lr * m_hat / (sqrt(v_hat) + eps)
    """

    def __init__(
        self,
        params: list[np.ndarray],
        lr: float = 1e-3,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ) -> None:
        self.params = params
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]

    def step(self, grads: list[np.ndarray]) -> None:
        if len(grads) != len(self.params):
            raise ValueError(f"Adam got {len(grads)} gradients for {len(self.params)} parameters")
        self.t += 1
        correction1 = 1.0 - self.beta1**self.t
        correction2 = 1.0 - self.beta2**self.t
        for i, (p, g) in enumerate(zip(self.params, grads, strict=True)):
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g
            m_hat = self.m[i] / correction1
            v_hat = self.v[i] / correction2
            p -= (self.lr * m_hat / (np.sqrt(v_hat) + self.eps)).astype(p.dtype)

    def __repr__(self) -> str:
        return f"Adam(lr={self.lr}, t={self.t}, params={len(self.params)})"
