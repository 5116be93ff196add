"""Core model interface: bivariate Markov chains observed through one component.

A model here is a Markov chain ``Z_k = (X_k, Y_k)`` on a product space,
specified by a one-step transition log-density with respect to a fixed
product dominating measure, together with samplers. Only the ``Y``
component is observable; observations are indexed from 1, the initial
state ``Z_0`` from an arbitrary initial distribution is never seen.

States and observations are either real vectors (continuous families) or
small non-negative integers (finite-alphabet families). All densities are
handled in the log domain; ``-inf`` encodes zero density.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import rng as rngmod

Z = tuple  # a state-observation pair (x, y)


class NoStationarySamplerError(ValueError):
    """Stationary initialization requested from a model without one."""


class UnsupportedInitError(ValueError):
    """The chosen evaluator cannot handle this initial distribution."""


class DegeneratePosteriorError(ArithmeticError):
    """Every candidate parameter received zero posterior mass."""


# ---------------------------------------------------------------------------
# Initial distributions on the full state-observation space
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Stationary:
    """Start the chain from its stationary law (when available)."""


@dataclass(frozen=True)
class PointMass:
    """Start exactly at ``z = (x, y)``."""

    x: np.ndarray
    y: np.ndarray

    def __init__(self, x, y):
        object.__setattr__(self, "x", np.atleast_1d(np.asarray(x)))
        object.__setattr__(self, "y", np.atleast_1d(np.asarray(y)))


@dataclass(frozen=True)
class GaussianOnZ:
    """Gaussian initial law on the stacked vector ``(x, y)``."""

    mean: np.ndarray
    cov: np.ndarray

    def __init__(self, mean, cov):
        mean = np.atleast_1d(np.asarray(mean, dtype=float))
        cov = np.atleast_2d(np.asarray(cov, dtype=float))
        if cov.shape != (mean.size, mean.size):
            raise ValueError(f"cov shape {cov.shape} does not match mean size {mean.size}")
        if not np.allclose(cov, cov.T, atol=1e-12):
            raise ValueError("cov must be symmetric")
        # Positive semi-definite is enough: a point mass is cov = 0.
        eigmin = float(np.linalg.eigvalsh(cov).min()) if mean.size else 0.0
        if eigmin < -1e-10:
            raise ValueError("cov must be positive semi-definite")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)


@dataclass(frozen=True)
class CustomInit:
    """User-supplied sampler and (optional) log-density on z = (x, y)."""

    sampler: Callable[[np.random.Generator], Z]
    logpdf: Optional[Callable[[Z], float]] = None


InitialDist = object  # Stationary | PointMass | GaussianOnZ | CustomInit


# ---------------------------------------------------------------------------
# Model specification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HmmFactorization:
    """Factorized transition ``q(z, z') = qx(x, x') * g(x', y')``.

    ``qx`` is the hidden-chain transition density on X x X and ``g`` the
    emission density on X x Y; both in the log domain. Batch variants act
    on arrays of states and are required by the particle filter.
    """

    qx_logpdf: Callable[[float, float], float]
    qx_sample: Callable[[float, np.random.Generator], float]
    g_logpdf: Callable[[float, float], float]
    g_sample: Optional[Callable[[float, np.random.Generator], float]] = None
    qx_sample_many: Optional[Callable[[np.ndarray, np.random.Generator], np.ndarray]] = None
    g_logpdf_many: Optional[Callable[[np.ndarray, object], np.ndarray]] = None
    stationary_x_sample_many: Optional[Callable[[int, np.random.Generator], np.ndarray]] = None


@dataclass(frozen=True)
class ModelSpec:
    """A fully dominated partially observed Markov model, parameters bound.

    The transition log-density, sampler and (when available in closed
    form) stationary sampler fully determine the model. Concrete families
    attach their structured parameters (``glm``, ``ssm``, ``sv``,
    ``finite``) so that exact evaluators can use them; generic code must
    only rely on the callables.
    """

    state_dim: int
    obs_dim: int
    trans_logpdf: Callable[[Z, Z], float]
    sample_step: Callable[[Z, np.random.Generator], Z]
    sample_stationary: Optional[Callable[[np.random.Generator], Z]] = None
    sample_stationary_many: Optional[Callable[[int, np.random.Generator], tuple]] = None
    hmm: Optional[HmmFactorization] = None
    glm: Optional[object] = None
    ssm: Optional[object] = None
    sv: Optional[object] = None
    finite: Optional[object] = None
    label: str = ""


@dataclass(frozen=True)
class Trajectory:
    """A complete path ``z_0, ..., z_n`` of the bivariate chain.

    ``x`` has shape (n+1, state_dim) and ``y`` shape (n+1, obs_dim);
    finite-alphabet models store integer codes.
    """

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        if len(self.x) != len(self.y):
            raise ValueError("x and y must have the same length")
        if len(self.x) < 1:
            raise ValueError("a trajectory holds at least z_0")

    def __len__(self) -> int:
        return len(self.x)


# ---------------------------------------------------------------------------
# Parameter space
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ParamSpace:
    """A box-constrained parameter space with the Euclidean metric."""

    dims: int
    lower: np.ndarray
    upper: np.ndarray

    def __init__(self, dims: int, lower=None, upper=None):
        if dims < 1:
            raise ValueError("dims must be positive")
        lo = np.full(dims, -np.inf) if lower is None else np.asarray(lower, dtype=float)
        hi = np.full(dims, np.inf) if upper is None else np.asarray(upper, dtype=float)
        if lo.shape != (dims,) or hi.shape != (dims,):
            raise ValueError("bounds must have one entry per dimension")
        if np.any(lo > hi):
            raise ValueError("lower bounds must not exceed upper bounds")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    def contains(self, theta) -> bool:
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.dims,):
            return False
        return bool(np.all(np.isfinite(theta)) and np.all(theta >= self.lower) and np.all(theta <= self.upper))


def param_distance(space: ParamSpace, a, b) -> float:
    """Euclidean distance between two parameter points of ``space``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != (space.dims,) or b.shape != (space.dims,):
        raise ValueError(f"points must have dimension {space.dims}, got {a.shape} and {b.shape}")
    return float(np.linalg.norm(a - b))


# ---------------------------------------------------------------------------
# Simulation
# ---------------------------------------------------------------------------


def _draw_initial(spec: ModelSpec, init: InitialDist, rng: np.random.Generator) -> Z:
    if isinstance(init, Stationary):
        if spec.sample_stationary is None:
            raise NoStationarySamplerError(
                "no stationary sampler: this model does not expose its stationary law"
            )
        return spec.sample_stationary(rng)
    if isinstance(init, PointMass):
        return (init.x.copy(), init.y.copy())
    if isinstance(init, GaussianOnZ):
        d = spec.state_dim + spec.obs_dim
        if init.mean.size != d:
            raise ValueError(f"GaussianOnZ dimension {init.mean.size} does not match model z-dim {d}")
        z = init.mean + _chol_psd(init.cov) @ rng.standard_normal(d)
        return (z[: spec.state_dim], z[spec.state_dim :])
    if isinstance(init, CustomInit):
        return init.sampler(rng)
    raise TypeError(f"unknown initial distribution {init!r}")


def _chol_psd(cov: np.ndarray) -> np.ndarray:
    """Cholesky-like factor for a positive semi-definite matrix."""
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        w, v = np.linalg.eigh(cov)
        return v @ np.diag(np.sqrt(np.clip(w, 0.0, None)))


def simulate_complete(spec: ModelSpec, init: InitialDist, n: int, seed: int, stream: int = 0) -> Trajectory:
    """Simulate ``z_0, ..., z_n`` with ``z_0 ~ init`` and one-step kernel moves.

    Deterministic given ``(seed, stream)``.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = rngmod.substream(seed, rngmod.SIMULATE, stream)
    z = _draw_initial(spec, init, rng)
    xs = [np.atleast_1d(np.asarray(z[0]))]
    ys = [np.atleast_1d(np.asarray(z[1]))]
    for _ in range(n):
        z = spec.sample_step(z, rng)
        xs.append(np.atleast_1d(np.asarray(z[0])))
        ys.append(np.atleast_1d(np.asarray(z[1])))
    return Trajectory(x=np.stack(xs), y=np.stack(ys))


def project_observations(traj: Trajectory) -> np.ndarray:
    """Return ``(y_1, ..., y_n)``, dropping the unobserved ``z_0`` entirely."""
    if len(traj) < 2:
        raise ValueError("cannot project observations from a length-1 trajectory: no y_1 exists")
    return traj.y[1:].copy()
