"""Adam optimizer over lists of numpy arrays."""

from dataclasses import dataclass, field

import numpy as np


@dataclass
class Adam:
    """Bias-corrected Adam; parameters are updated in place."""

    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: list = field(default_factory=list)
    v: list = field(default_factory=list)

    def step(self, params, grads):
        if len(params) != len(grads):
            raise ValueError(f"{len(params)} parameters but {len(grads)} gradients")
        for p, g in zip(params, grads):
            if np.shape(p) != np.shape(g):
                raise ValueError(f"gradient shape {np.shape(g)} != parameter shape {np.shape(p)}")
            if not np.all(np.isfinite(g)):
                raise FloatingPointError("non-finite gradient passed to Adam")
        if not self.m:
            self.m = [np.zeros_like(p) for p in params]
            self.v = [np.zeros_like(p) for p in params]
        self.t += 1
        bc1 = 1.0 - self.beta1**self.t
        bc2 = 1.0 - self.beta2**self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * (g * g)
            p -= (self.lr / bc1) * m / (np.sqrt(v / bc2) + self.eps)


def softplus(x):
    return np.logaddexp(0.0, x)


def softplus_inv(y):
    if y <= 0:
        raise ValueError(f"softplus inverse needs a positive value, got {y}")
    return y + np.log(-np.expm1(-y))


def sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))
