"""Learned single-item auction built from monotone bid transforms.

Each bidder owns a piecewise-linear max-min network: ``K`` groups of
``J`` increasing affine pieces, combined as ``max over groups of min
over pieces``.  Slopes are parameterized as ``exp(theta)`` so every
piece is strictly increasing, which makes the transform invertible in
closed form (``min over groups of max over pieces`` of the inverted
affine maps).  Transformed bids compete in a softmax with temperature
``kappa`` against a fixed no-sale slot pinned at 0, and a bidder's
conditional payment is the inverse transform of the rectified highest
rival transformed bid.

Training minimizes the negative expected revenue of truthful play by
plain gradient descent.  Gradients are assembled by hand: argmax/argmin
selections route subgradients through the active piece only (ties to
the lowest index, matching the forward tie-break), the softmax and ReLU
use their standard derivatives, and ``exp`` reparameterization turns
weight gradients into ``w * dL/dw``.

Parameter arrays ``theta`` and ``beta`` have shape
``(n_bidders, groups, linear_units)`` throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .auction import AuctionOutcome, ValuationDistribution, _no_sale, _one_hot_outcome
from .errors import InputError, TrainingDivergedError

DEFAULT_KAPPA = 100.0


@dataclass
class MonotoneNetParams:
    """Per-bidder log-slopes and offsets, plus the softmax temperature."""

    theta: np.ndarray
    beta: np.ndarray
    kappa: float = DEFAULT_KAPPA

    def __post_init__(self):
        theta = np.array(self.theta, dtype=float)
        beta = np.array(self.beta, dtype=float)
        if theta.ndim != 3 or theta.shape != beta.shape:
            raise InputError("theta and beta must share shape (n_bidders, groups, linear_units)")
        if min(theta.shape) < 1:
            raise InputError("every parameter dimension must be at least 1")
        if not (np.all(np.isfinite(theta)) and np.all(np.isfinite(beta))):
            raise InputError("parameters must be finite")
        kappa = float(self.kappa)
        if not np.isfinite(kappa) or kappa <= 0.0:
            raise InputError("kappa must be finite and positive")
        self.theta = theta
        self.beta = beta
        self.kappa = kappa

    @property
    def n_bidders(self) -> int:
        return self.theta.shape[0]

    @property
    def groups(self) -> int:
        return self.theta.shape[1]

    @property
    def linear_units(self) -> int:
        return self.theta.shape[2]

    def weights(self) -> np.ndarray:
        return np.exp(self.theta)

    def copy(self) -> "MonotoneNetParams":
        return MonotoneNetParams(self.theta.copy(), self.beta.copy(), self.kappa)

    @classmethod
    def affine(cls, n_bidders: int, weight: float, offset: float,
               kappa: float = DEFAULT_KAPPA) -> "MonotoneNetParams":
        """Single-piece network ``weight * b + offset`` shared by all bidders."""
        if weight <= 0.0:
            raise InputError("affine weight must be positive")
        theta = np.full((n_bidders, 1, 1), np.log(weight))
        beta = np.full((n_bidders, 1, 1), float(offset))
        return cls(theta, beta, kappa)


@dataclass(frozen=True)
class NetConfig:
    """Architecture and training hyperparameters."""

    n_bidders: int = 5
    groups: int = 5
    linear_units: int = 3
    kappa: float = DEFAULT_KAPPA
    learning_rate: float = 0.35
    batch_size: int = 768
    iterations: int = 500
    seed: int = 0
    convergence_tol: float = 0.0

    def __post_init__(self):
        if self.n_bidders < 2:
            raise InputError("need at least two bidders")
        if self.groups < 1 or self.linear_units < 1:
            raise InputError("groups and linear_units must be at least 1")
        if not np.isfinite(self.kappa) or self.kappa <= 0.0:
            raise InputError("kappa must be finite and positive")
        if not np.isfinite(self.learning_rate) or self.learning_rate <= 0.0:
            raise InputError("learning_rate must be finite and positive")
        if self.batch_size < 1:
            raise InputError("batch_size must be at least 1")
        if self.iterations < 1:
            raise InputError("iterations must be at least 1")
        if self.seed < 0:
            raise InputError("seed must be a non-negative integer")
        if not np.isfinite(self.convergence_tol) or self.convergence_tol < 0.0:
            raise InputError("convergence_tol must be non-negative")


@dataclass(frozen=True)
class TrainingTrace:
    """Per-iteration losses plus where (if anywhere) early stopping fired."""

    losses: np.ndarray
    final_loss: float
    converged_at: int | None


def init_params(config: NetConfig, rng: np.random.Generator) -> MonotoneNetParams:
    """Near-identity start: slopes around 1, offsets drawn from [-0.5, 0)."""
    shape = (config.n_bidders, config.groups, config.linear_units)
    theta = rng.normal(0.0, 0.1, shape)
    beta = rng.uniform(-0.5, 0.0, shape)
    return MonotoneNetParams(theta, beta, config.kappa)


def _check_bidder(params: MonotoneNetParams, bidder: int) -> None:
    if not 0 <= bidder < params.n_bidders:
        raise InputError(f"bidder index {bidder} out of range for {params.n_bidders} bidders")


def transform(params: MonotoneNetParams, bidder: int, bid: float) -> float:
    """Strictly increasing max-min transform of one bidder's bid."""
    _check_bidder(params, bidder)
    bid = float(bid)
    if not np.isfinite(bid):
        raise InputError("bid must be finite")
    pieces = np.exp(params.theta[bidder]) * bid + params.beta[bidder]
    return float(pieces.min(axis=1).max())


def transform_inverse(params: MonotoneNetParams, bidder: int, y: float) -> float:
    """Exact inverse of :func:`transform`: min over groups of max over pieces."""
    _check_bidder(params, bidder)
    y = float(y)
    if not np.isfinite(y):
        raise InputError("transformed bid must be finite")
    pieces = (y - params.beta[bidder]) * np.exp(-params.theta[bidder])
    return float(pieces.max(axis=1).min())


def transform_profile(params: MonotoneNetParams, bids) -> np.ndarray:
    """Apply every bidder's transform to the matching entry of ``bids``."""
    b = np.asarray(bids, dtype=float)
    if b.ndim != 1 or b.size != params.n_bidders:
        raise InputError(f"expected {params.n_bidders} bids, got shape {b.shape}")
    if not np.all(np.isfinite(b)):
        raise InputError("bids must be finite")
    pieces = np.exp(params.theta) * b[:, None, None] + params.beta
    return pieces.min(axis=2).max(axis=1)


def allocate_soft(transformed_bids, kappa: float) -> np.ndarray:
    """Softmax win probabilities against a no-sale slot pinned at 0.

    Returns the bidder entries only; the no-sale slot keeps the leftover
    mass so the full vector sums to one.
    """
    tb = np.asarray(transformed_bids, dtype=float)
    if tb.ndim != 1 or tb.size < 1:
        raise InputError("need at least one transformed bid")
    if not np.all(np.isfinite(tb)):
        raise InputError("transformed bids must be finite")
    if not np.isfinite(kappa) or kappa <= 0.0:
        raise InputError("kappa must be finite and positive")
    z = kappa * np.append(tb, 0.0)
    z -= z.max()
    ez = np.exp(z)
    return (ez / ez.sum())[:-1]


def payment_soft(params: MonotoneNetParams, transformed_bids, bidder: int) -> float:
    """Conditional payment: inverse transform of the rectified top rival bid."""
    tb = np.asarray(transformed_bids, dtype=float)
    if tb.ndim != 1 or tb.size != params.n_bidders:
        raise InputError(f"expected {params.n_bidders} transformed bids, got shape {tb.shape}")
    if tb.size < 2:
        raise InputError("payments need at least two bidders")
    _check_bidder(params, bidder)
    rival = float(np.max(np.delete(tb, bidder)))
    return transform_inverse(params, bidder, max(rival, 0.0))


def clear_hard(params: MonotoneNetParams, bids) -> AuctionOutcome:
    """Deterministic clearing: highest positive transformed bid wins.

    The winner pays :func:`payment_soft`, which is independent of its own
    bid, so truthful reporting is a dominant strategy.
    """
    b = np.asarray(bids, dtype=float)
    if b.size < 2:
        raise InputError("clearing needs at least two bids")
    tb = transform_profile(params, b)
    winner = int(np.argmax(tb))
    if not tb[winner] > 0.0:
        return _no_sale(b.size)
    payment = payment_soft(params, tb, winner)
    return _one_hot_outcome(winner, payment, b.size)


def _batch_values(params: MonotoneNetParams, batch) -> np.ndarray:
    """Accept an (S, N) array or an iterable of ValuationProfile."""
    if isinstance(batch, np.ndarray):
        values = np.asarray(batch, dtype=float)
        if values.ndim == 1:
            values = values[None, :]
    else:
        profiles = list(batch)
        if not profiles:
            raise InputError("batch must not be empty")
        values = np.stack([np.asarray(p.values, dtype=float) for p in profiles])
    if values.ndim != 2 or values.shape[0] < 1:
        raise InputError("batch must be a non-empty matrix of valuations")
    if values.shape[1] != params.n_bidders:
        raise InputError(f"batch has {values.shape[1]} bidders, params expect {params.n_bidders}")
    if not np.all(np.isfinite(values)):
        raise InputError("batch values must be finite")
    return values


def _forward(params: MonotoneNetParams, values: np.ndarray, kappa: float):
    """Shared batch forward pass; keeps the active-piece indices for backprop."""
    w = np.exp(params.theta)
    beta = params.beta
    n_samples, n_bidders = values.shape

    pieces = w[None] * values[:, :, None, None] + beta[None]
    jmin = pieces.argmin(axis=3)
    min_over_j = np.take_along_axis(pieces, jmin[..., None], axis=3)[..., 0]
    kmax = min_over_j.argmax(axis=2)
    tbar = np.take_along_axis(min_over_j, kmax[..., None], axis=2)[..., 0]
    jsel_fwd = np.take_along_axis(jmin, kmax[..., None], axis=2)[..., 0]

    z = kappa * np.concatenate([tbar, np.zeros((n_samples, 1))], axis=1)
    z -= z.max(axis=1, keepdims=True)
    ez = np.exp(z)
    soft = ez / ez.sum(axis=1, keepdims=True)
    g = soft[:, :-1]

    rivals = np.broadcast_to(tbar[:, None, :], (n_samples, n_bidders, n_bidders)).copy()
    diag = np.arange(n_bidders)
    rivals[:, diag, diag] = -np.inf
    rarg = rivals.argmax(axis=2)
    rmax = np.take_along_axis(rivals, rarg[..., None], axis=2)[..., 0]
    r = np.maximum(rmax, 0.0)

    inv_pieces = (r[:, :, None, None] - beta[None]) / w[None]
    jmax_inv = inv_pieces.argmax(axis=3)
    max_over_j = np.take_along_axis(inv_pieces, jmax_inv[..., None], axis=3)[..., 0]
    kmin_inv = max_over_j.argmin(axis=2)
    p = np.take_along_axis(max_over_j, kmin_inv[..., None], axis=2)[..., 0]
    jsel_inv = np.take_along_axis(jmax_inv, kmin_inv[..., None], axis=2)[..., 0]

    return w, tbar, kmax, jsel_fwd, soft, g, rarg, rmax, p, kmin_inv, jsel_inv


def loss(params: MonotoneNetParams, batch, kappa: float) -> float:
    """Mean negative expected revenue of truthful play over the batch."""
    values = _batch_values(params, batch)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        _, _, _, _, _, g, _, _, p, _, _ = _forward(params, values, kappa)
        return float(-(g * p).sum(axis=1).mean())


def grad(params: MonotoneNetParams, batch, kappa: float) -> tuple[np.ndarray, np.ndarray]:
    """Hand-assembled ``(dL/dtheta, dL/dbeta)`` for :func:`loss`."""
    values = _batch_values(params, batch)
    _, dtheta, dbeta = _loss_and_grad(params, values, kappa)
    return dtheta, dbeta


def _loss_and_grad(params: MonotoneNetParams, values: np.ndarray, kappa: float):
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        w, tbar, kmax, jsel_fwd, soft, g, rarg, rmax, p, kmin_inv, jsel_inv = _forward(
            params, values, kappa)
        n_samples, n_bidders = values.shape
        loss_value = float(-(g * p).sum(axis=1).mean())

        scale = 1.0 / n_samples
        dp = -g * scale
        dg = -p * scale

        # Softmax backward over the N+1 slots; the no-sale slot carries no
        # parameters, so only the bidder columns feed back into tbar.
        dg_full = np.concatenate([dg, np.zeros((n_samples, 1))], axis=1)
        inner = (dg_full * soft).sum(axis=1, keepdims=True)
        dz = kappa * soft * (dg_full - inner)
        dtbar = dz[:, :-1].copy()

        # Payment backward through the active inverse piece:
        #   p = (r - beta) / w  =>  dp/dr = 1/w, dp/dbeta = -1/w, dp/dtheta = -p.
        rows = np.broadcast_to(np.arange(n_bidders)[None, :], (n_samples, n_bidders))
        w_inv = w[rows, kmin_inv, jsel_inv]
        dr = dp / w_inv
        dtheta_inv = dp * (-p)
        dbeta_inv = dp * (-1.0 / w_inv)

        # ReLU gate, then route the rival maximum to the bidder that set it.
        drmax = np.where(rmax > 0.0, dr, 0.0)
        cols = np.broadcast_to(np.arange(n_samples)[:, None], (n_samples, n_bidders))
        np.add.at(dtbar, (cols.ravel(), rarg.ravel()), drmax.ravel())

        # Forward transform backward through the active forward piece:
        #   tbar = w * v + beta  =>  d/dbeta = 1, d/dtheta = w * v.
        w_fwd = w[rows, kmax, jsel_fwd]
        dtheta_fwd = dtbar * w_fwd * values
        dbeta_fwd = dtbar

        dtheta = np.zeros_like(params.theta)
        dbeta = np.zeros_like(params.beta)
        np.add.at(dtheta, (rows.ravel(), kmax.ravel(), jsel_fwd.ravel()), dtheta_fwd.ravel())
        np.add.at(dbeta, (rows.ravel(), kmax.ravel(), jsel_fwd.ravel()), dbeta_fwd.ravel())
        np.add.at(dtheta, (rows.ravel(), kmin_inv.ravel(), jsel_inv.ravel()), dtheta_inv.ravel())
        np.add.at(dbeta, (rows.ravel(), kmin_inv.ravel(), jsel_inv.ravel()), dbeta_inv.ravel())

        return loss_value, dtheta, dbeta


def train(config: NetConfig,
          dist: ValuationDistribution) -> tuple[MonotoneNetParams, TrainingTrace]:
    """Gradient descent on fresh i.i.d. truthful batches.

    Deterministic for a given config: one RNG stream drives both the
    parameter init and every batch.  Stops early once the loss range over
    a trailing 20-iteration window drops below ``convergence_tol``.
    """
    rng = np.random.default_rng(config.seed)
    params = init_params(config, rng)
    losses: list[float] = []
    converged_at = None
    for iteration in range(config.iterations):
        batch = dist.sample(rng, (config.batch_size, config.n_bidders))
        value, dtheta, dbeta = _loss_and_grad(params, batch, config.kappa)
        if not np.isfinite(value):
            raise TrainingDivergedError(f"non-finite loss at iteration {iteration}")
        params.theta -= config.learning_rate * dtheta
        params.beta -= config.learning_rate * dbeta
        losses.append(value)
        if config.convergence_tol > 0.0 and len(losses) >= 20:
            window = losses[-20:]
            if max(window) - min(window) < config.convergence_tol:
                converged_at = iteration
                break
    trace = TrainingTrace(np.asarray(losses), losses[-1], converged_at)
    return params, trace
