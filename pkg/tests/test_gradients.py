"""Hand-derived gradients against the finite-difference oracle."""

import numpy as np

from myerson_airnet.network import MonotoneNetParams, grad, loss


def relative_error(got, want):
    scale = max(np.abs(want).max(), 1e-8)
    return np.abs(got - want).max() / scale


def test_gradient_matches_finite_differences(fd_grad, nontie_sampler):
    """Central differences at points away from every selection boundary."""
    rng = np.random.default_rng(101)
    shapes = [(2, 1, 1), (3, 2, 2), (5, 5, 3), (2, 3, 1), (4, 1, 4)]
    for trial in range(15):
        shape = shapes[trial % len(shapes)]
        kappa = rng.uniform(2.0, 8.0)
        params, values = nontie_sampler(rng, shape, kappa)
        dtheta, dbeta = grad(params, values, kappa)
        fd_theta, fd_beta = fd_grad(params, values, kappa)
        assert relative_error(dtheta, fd_theta) < 1e-4
        assert relative_error(dbeta, fd_beta) < 1e-4


def test_gradient_zero_at_saturated_no_sale():
    """Deep no-sale region: the loss is flat at 0, the gradient exactly 0.

    With both transformed bids far below the no-sale slot and kappa
    large, the bidder softmax terms underflow to exact zeros, so no
    parameter sees any gradient.
    """
    params = MonotoneNetParams.affine(2, 1.0, -2.0, kappa=1000.0)
    batch = np.array([[0.8, 0.6], [0.3, 0.9], [0.5, 0.5]])
    assert loss(params, batch, 1000.0) == 0.0
    dtheta, dbeta = grad(params, batch, 1000.0)
    assert not dtheta.any()
    assert not dbeta.any()


def test_inactive_unit_gets_zero_gradient():
    """A piece never selected by min (forward) or max (inverse) stays untouched."""
    # unit 1 (offset -10) always wins the forward min and the inverse max
    theta = np.zeros((2, 1, 2))
    beta = np.array([[[0.0, -10.0]], [[0.0, -10.0]]])
    params = MonotoneNetParams(theta, beta, 5.0)
    rng = np.random.default_rng(103)
    batch = rng.uniform(0.0, 1.0, (32, 2))
    dtheta, dbeta = grad(params, batch, 5.0)
    assert not dtheta[:, :, 0].any()
    assert not dbeta[:, :, 0].any()
    assert dbeta[:, :, 1].any()


def test_gradient_deterministic_and_shaped():
    rng = np.random.default_rng(107)
    params = MonotoneNetParams(rng.normal(0.0, 0.5, (3, 2, 2)),
                               rng.normal(0.0, 0.5, (3, 2, 2)), 10.0)
    batch = rng.uniform(0.0, 1.0, (16, 3))
    first = grad(params, batch, 10.0)
    second = grad(params, batch, 10.0)
    assert first[0].shape == params.theta.shape
    assert first[1].shape == params.beta.shape
    assert np.array_equal(first[0], second[0])
    assert np.array_equal(first[1], second[1])
