"""Small ReLU MLP with a hand-written backward pass.

Weights are stored ``(out, in)``; a batch of inputs is ``(P, in)``.
"""

import numpy as np


def mlp_forward(features, weights, biases):
    """Affine layers with ReLU between them and a linear output layer.

    Returns the ``(P, out)`` output and a cache of layer inputs and
    pre-activations for :func:`mlp_backward`.
    """
    a = np.atleast_2d(np.asarray(features, dtype=np.float64))
    if a.shape[1] != weights[0].shape[1]:
        raise ValueError(f"feature width {a.shape[1]} != MLP input width {weights[0].shape[1]}")
    inputs, pre = [], []
    last = len(weights) - 1
    for i, (w, b) in enumerate(zip(weights, biases)):
        inputs.append(a)
        h = a @ w.T + b
        pre.append(h)
        a = h if i == last else np.maximum(h, 0.0)
    return a, (inputs, pre)


def mlp_backward(cache, grad_out, weights):
    """Reverse pass of :func:`mlp_forward`.

    The ReLU subgradient at exactly zero is taken as zero.

    Returns
    -------
    grad_w, grad_b : list of ndarray
        Gradients matching ``weights`` and ``biases``.
    grad_features : ndarray
        Gradient with respect to the input features, ``(P, in)``.
    """
    inputs, pre = cache
    g = np.atleast_2d(np.asarray(grad_out, dtype=np.float64))
    n = len(weights)
    grad_w, grad_b = [None] * n, [None] * n
    for i in reversed(range(n)):
        if i != n - 1:
            g = g * (pre[i] > 0)
        grad_w[i] = g.T @ inputs[i]
        grad_b[i] = g.sum(axis=0)
        g = g @ weights[i]
    return grad_w, grad_b, g
