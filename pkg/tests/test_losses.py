import numpy as np
import pytest

from conftest import crandn
from inrrecon.acquisition import AcquisitionModel, apply_E, gen_mask
from inrrecon.unroll import loss_dc, loss_tv, total_loss


def fd_check(f, x, grad, rng, n=12, h=1e-6):
    """Worst relative error of ``grad`` against central differences at random entries."""
    worst = 0.0
    for _ in range(n):
        idx = tuple(rng.integers(0, s) for s in x.shape)
        for unit in (1, 1j):
            d = np.zeros_like(x)
            d[idx] = h * unit
            fd = (f(x + d) - f(x - d)) / (2 * h)
            an = grad[idx].real if unit == 1 else grad[idx].imag
            worst = max(worst, abs(fd - an) / max(abs(fd), 1e-2))
    return worst


def test_dc_zero_when_equal(rng):
    y = crandn(rng, 2, 4, 4)
    value, grad = loss_dc(y, y)
    assert value == 0.0 and not np.any(grad)


def test_dc_closed_form(rng):
    y = np.zeros((1, 2, 2), complex)
    y[0, 0, 0] = 3
    y[0, 1, 1] = 4j
    # y_hat = 0: both terms equal 1
    assert loss_dc(y, np.zeros_like(y))[0] == pytest.approx(2.0, abs=1e-15)


def test_dc_scale_invariant(rng):
    y, y_hat = crandn(rng, 2, 4, 4), crandn(rng, 2, 4, 4)
    assert loss_dc(7 * y, 7 * y_hat)[0] == pytest.approx(loss_dc(y, y_hat)[0], rel=1e-14)


def test_dc_gradient(rng):
    y, y_hat = crandn(rng, 2, 6, 6), crandn(rng, 2, 6, 6)
    _, grad = loss_dc(y, y_hat)
    assert fd_check(lambda v: loss_dc(y, v)[0], y_hat, grad, rng) < 1e-6


def test_dc_rejects_zero_measurement():
    with pytest.raises(ValueError):
        loss_dc(np.zeros((1, 2, 2)), np.ones((1, 2, 2)))


def test_tv_examples():
    assert loss_tv(np.full((5, 4), 2.5 - 1j))[0] == 0.0
    assert loss_tv(np.array([[0.0, 1.0], [0.0, 1.0]]))[0] == 2.0


def test_tv_gradient(rng):
    x = crandn(rng, 8, 8)
    _, grad = loss_tv(x)
    assert fd_check(lambda v: loss_tv(v)[0], x, grad, rng) < 1e-6


def _model(rng, n=8):
    return AcquisitionModel(crandn(rng, 2, n, n), gen_mask("random-lines", n, n, 2, 2, rng))


def test_total_loss_parts(rng):
    model = _model(rng)
    x, y = crandn(rng, 8, 8), apply_E(crandn(rng, 8, 8), model)
    value, _, g_lams, parts = total_loss(y, x, model, 0.0)
    assert value == parts["dc"] == loss_dc(y, apply_E(x, model))[0]
    value, _, g_lams, parts = total_loss(y, x, model, 0.3)
    assert g_lams == parts["tv"] == loss_tv(x)[0]
    assert value == pytest.approx(parts["dc"] + 0.3 * parts["tv"], rel=1e-15)


def test_total_loss_zero_for_consistent_constant(rng):
    model = _model(rng)
    x = np.full((8, 8), 0.5 + 0.25j)
    assert total_loss(apply_E(x, model), x, model, 0.5)[0] == 0.0


@pytest.mark.parametrize("tv_weight", [1.0, 1 / 64])
def test_total_loss_gradients(rng, tv_weight):
    model = _model(rng)
    x, y = crandn(rng, 8, 8), apply_E(crandn(rng, 8, 8), model)
    lam_s = 0.4
    _, grad, g_lams, _ = total_loss(y, x, model, lam_s, tv_weight)
    assert fd_check(lambda v: total_loss(y, v, model, lam_s, tv_weight)[0], x, grad, rng) < 1e-5
    h = 1e-6
    fd = (total_loss(y, x, model, lam_s + h, tv_weight)[0]
          - total_loss(y, x, model, lam_s - h, tv_weight)[0]) / (2 * h)
    assert abs(fd - g_lams) <= 1e-6 * abs(fd)
