"""Shared fixtures: distributions, big Monte-Carlo oracles, trained nets.

The expensive artifacts (100k-profile revenue oracles, trained
parameters) are session scoped so the revenue and truthfulness tests
share one computation.
"""

from pathlib import Path

import numpy as np
import pytest

from myerson_airnet.auction import (ValuationDistribution, ValuationProfile, myerson_clear,
                                    spa_clear)
from myerson_airnet.network import NetConfig, loss, train


@pytest.fixture(scope="session")
def datadir():
    return Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def u01():
    return ValuationDistribution(0.0, 1.0)


@pytest.fixture(scope="session")
def u051():
    return ValuationDistribution(0.5, 1.0)


@pytest.fixture(scope="session")
def big_test_profiles(u01):
    """100,000 fresh five-bidder profiles for the revenue comparisons."""
    rng = np.random.default_rng(20260814)
    return u01.sample(rng, (100_000, 5))


@pytest.fixture(scope="session")
def big_test_revenues(big_test_profiles, u01):
    """(spa, myerson) per-profile revenue oracles on the shared test set."""
    n = len(big_test_profiles)
    spa = np.fromiter((spa_clear(row).revenue for row in big_test_profiles), float, n)
    mye = np.fromiter((myerson_clear(ValuationProfile(row, u01)).revenue
                       for row in big_test_profiles), float, n)
    return spa, mye


@pytest.fixture(scope="session")
def trained_u01(u01):
    """Default-budget training run reused by the learned-mechanism tests."""
    return train(NetConfig(seed=0), u01)


@pytest.fixture(scope="session")
def fd_grad():
    """Central finite differences of the loss, the gradient oracle."""

    def differentiate(params, values, kappa, h=1e-5):
        dtheta = np.zeros_like(params.theta)
        dbeta = np.zeros_like(params.beta)
        for array, out in ((params.theta, dtheta), (params.beta, dbeta)):
            it = np.nditer(array, flags=["multi_index"])
            for _ in it:
                idx = it.multi_index
                keep = array[idx]
                array[idx] = keep + h
                up = loss(params, values, kappa)
                array[idx] = keep - h
                down = loss(params, values, kappa)
                array[idx] = keep
                out[idx] = (up - down) / (2.0 * h)
        return dtheta, dbeta

    return differentiate


@pytest.fixture(scope="session")
def nontie_sampler():
    """Draw (params, batch) pairs away from every non-smooth point.

    Finite differences are only a valid oracle where the active max/min
    pieces, the rival argmax, and the ReLU gate stay fixed under an h
    perturbation, so candidates are resampled until all selection
    margins clear a safety threshold.
    """
    from myerson_airnet.network import MonotoneNetParams

    def margins_ok(params, values, kappa, margin=1e-3):
        w = np.exp(params.theta)
        pieces = w[None] * values[:, :, None, None] + params.beta[None]
        srt = np.sort(pieces, axis=3)
        if pieces.shape[3] > 1 and (srt[..., 1] - srt[..., 0]).min() < margin:
            return False
        min_j = pieces.min(axis=3)
        srt = np.sort(min_j, axis=2)
        if min_j.shape[2] > 1 and (srt[..., -1] - srt[..., -2]).min() < margin:
            return False
        tbar = min_j.max(axis=2)
        n_samples, n_bidders = tbar.shape
        rivals = np.broadcast_to(tbar[:, None, :], (n_samples, n_bidders, n_bidders)).copy()
        diag = np.arange(n_bidders)
        rivals[:, diag, diag] = -np.inf
        rmax = rivals.max(axis=2)
        if np.abs(rmax).min() < margin:  # ReLU gate must not sit near 0
            return False
        top2 = np.sort(rivals, axis=2)
        if n_bidders > 2 and (top2[..., -1] - top2[..., -2]).min() < margin:
            return False
        r = np.maximum(rmax, 0.0)
        inv = (r[:, :, None, None] - params.beta[None]) / w[None]
        srt = np.sort(inv, axis=3)
        if inv.shape[3] > 1 and (srt[..., -1] - srt[..., -2]).min() < margin:
            return False
        max_j = inv.max(axis=3)
        srt = np.sort(max_j, axis=2)
        if max_j.shape[2] > 1 and (srt[..., 1] - srt[..., 0]).min() < margin:
            return False
        return True

    def sample(rng, shape, kappa, batch=8):
        n, k, j = shape
        while True:
            params = MonotoneNetParams(rng.normal(0.0, 0.6, (n, k, j)),
                                       rng.normal(-0.2, 0.5, (n, k, j)), kappa)
            values = rng.uniform(0.05, 1.0, (batch, n))
            if margins_ok(params, values, kappa):
                return params, values

    return sample


@pytest.fixture(scope="session")
def deviation_suite():
    """Dominant-strategy deviation harness shared by the truthfulness tests.

    Returns (violations, trials, worst gain) for unilateral misreports
    drawn from the support; a violation is a deviation utility exceeding
    the truthful utility by more than float noise.
    """

    def run(clear, profiles, dist, deviations, rng, tol=1e-12):
        violations = 0
        trials = 0
        worst = 0.0
        for values in profiles:
            truthful = clear(values)
            bidder = int(rng.integers(values.size))
            value = values[bidder]
            base = (value - truthful.payment) if truthful.winner == bidder else 0.0
            for _ in range(deviations):
                report = values.copy()
                report[bidder] = rng.uniform(dist.lower, dist.upper)
                outcome = clear(report)
                utility = (value - outcome.payment) if outcome.winner == bidder else 0.0
                gain = utility - base
                trials += 1
                if gain > tol:
                    violations += 1
                    worst = max(worst, gain)
        return violations, trials, worst

    return run
