"""Expected Kullback-Leibler divergence functionals between model members.

Two functionals are provided. The transition-level divergence averages,
over the stationary law of the reference member, the KLD between the two
one-step transition kernels started at the same point. The emission-level
variant (HMMs only) averages the KLD between the two emission densities
against the product of the two stationary hidden-state marginals; the
two coincide with the plain emission KLD in the i.i.d. specialization.

Closed forms exist for the linear Gaussian and stochastic volatility
families and are cross-checked by a Monte Carlo estimator that only
touches the generic model callables.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import rng as rngmod
from .core import ModelSpec
from .models import FiniteHmmParams, GlmParams, SvParams, finite_hmm_stationary, glm_stationary_cov

_LOG2PI = np.log(2.0 * np.pi)


@dataclass(frozen=True)
class KldEstimate:
    """A divergence value; ``se`` present only for Monte Carlo estimates."""

    value: float
    method: str
    se: Optional[float] = None
    flags: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.se is None:
            if self.value < -1e-12:
                raise ValueError(f"closed-form divergence must be non-negative, got {self.value}")
        elif np.isfinite(self.value) and self.value < -3.0 * self.se:
            raise ValueError("Monte Carlo divergence estimate is negative beyond noise allowance")


def gaussian_kl(m0: np.ndarray, S0: np.ndarray, m1: np.ndarray, S1: np.ndarray) -> float:
    """KL(N(m0, S0) || N(m1, S1)) for full-rank covariances."""
    m0 = np.atleast_1d(np.asarray(m0, dtype=float))
    m1 = np.atleast_1d(np.asarray(m1, dtype=float))
    S0 = np.atleast_2d(np.asarray(S0, dtype=float))
    S1 = np.atleast_2d(np.asarray(S1, dtype=float))
    d = m0.size
    sol = np.linalg.solve(S1, S0)
    dev = m1 - m0
    quad = float(dev @ np.linalg.solve(S1, dev))
    logdet = float(np.linalg.slogdet(S1)[1] - np.linalg.slogdet(S0)[1])
    return 0.5 * (float(np.trace(sol)) - d + logdet + quad)


# ---------------------------------------------------------------------------
# Monte Carlo estimator over the generic model interface
# ---------------------------------------------------------------------------


def step_kld_mc(
    spec_star: ModelSpec,
    spec_other: ModelSpec,
    draws: int = 100_000,
    seed: int = 0,
    inner: str = "auto",
) -> KldEstimate:
    """Monte Carlo estimate of the expected transition KLD.

    The outer loop draws ``z_0`` from the stationary law of ``spec_star``.
    When both transition kernels are Gaussian the inner KLD is evaluated
    in closed form; otherwise (or with ``inner="logratio"``) the estimate
    averages the log density ratio at ``z_1`` drawn from the reference
    kernel. Both routes return a standard error.
    """
    if inner not in ("auto", "closed", "logratio"):
        raise ValueError(f"unknown inner mode {inner!r}")
    if spec_star.sample_stationary is None:
        raise ValueError("the reference model must expose its stationary law")
    both_glm = spec_star.glm is not None and spec_other.glm is not None
    if both_glm and inner in ("auto", "closed"):
        return _glm_inner_closed(spec_star.glm, spec_other.glm, draws, seed)
    if both_glm:
        return _glm_inner_logratio(spec_star.glm, spec_other.glm, draws, seed)
    if spec_star.sv is not None and spec_other.sv is not None:
        return _sv_logratio(spec_star.sv, spec_other.sv, draws, seed)
    return _generic_logratio(spec_star, spec_other, draws, seed)


def _finish_mc(samples: np.ndarray, method: str) -> KldEstimate:
    if np.any(np.isposinf(samples)):
        return KldEstimate(np.inf, method, se=0.0, flags=("support_mismatch",))
    mean = float(samples.mean())
    se = float(samples.std(ddof=1) / np.sqrt(len(samples)))
    return KldEstimate(mean, method, se=se)


def _glm_inner_closed(star: GlmParams, other: GlmParams, draws: int, seed: int) -> KldEstimate:
    rng = rngmod.substream(seed, rngmod.KLD_OUTER)
    gamma = glm_stationary_cov(star)
    z = rng.standard_normal((draws, star.p + star.q)) @ np.linalg.cholesky(gamma).T
    dphi = other.Phi - star.Phi
    const = gaussian_kl(np.zeros(star.p + star.q), star.R, np.zeros(star.p + star.q), other.R)
    dev = z @ dphi.T
    quad = 0.5 * np.einsum("ni,ij,nj->n", dev, np.linalg.inv(other.R), dev)
    return _finish_mc(const + quad, "mc")


def _glm_inner_logratio(star: GlmParams, other: GlmParams, draws: int, seed: int) -> KldEstimate:
    rng = rngmod.substream(seed, rngmod.KLD_OUTER)
    d = star.p + star.q
    z0 = rng.standard_normal((draws, d)) @ np.linalg.cholesky(glm_stationary_cov(star)).T
    eps = rng.standard_normal((draws, d)) @ np.linalg.cholesky(star.R).T
    z1 = z0 @ star.Phi.T + eps

    def logpdf(params, dev):
        u = np.linalg.solve(np.linalg.cholesky(params.R), dev.T)
        logdet = float(np.linalg.slogdet(params.R)[1])
        return -0.5 * (d * _LOG2PI + logdet + np.sum(u * u, axis=0))

    lr = logpdf(star, z1 - z0 @ star.Phi.T) - logpdf(other, z1 - z0 @ other.Phi.T)
    return _finish_mc(lr, "mc")


def _sv_logratio(star: SvParams, other: SvParams, draws: int, seed: int) -> KldEstimate:
    rng = rngmod.substream(seed, rngmod.KLD_OUTER)
    x0 = np.sqrt(star.x_var) * rng.standard_normal(draws)
    x1 = star.phi * x0 + star.sigma * rng.standard_normal(draws)
    y1 = star.beta * np.exp(x1 / 2.0) * rng.standard_normal(draws)

    def logq(params, x0, x1, y1):
        lqx = -0.5 * (_LOG2PI + np.log(params.sigma**2) + (x1 - params.phi * x0) ** 2 / params.sigma**2)
        lg = -0.5 * (_LOG2PI + np.log(params.beta**2) + x1 + y1**2 * np.exp(-x1) / params.beta**2)
        return lqx + lg

    lr = logq(star, x0, x1, y1) - logq(other, x0, x1, y1)
    return _finish_mc(lr, "mc")


def _generic_logratio(spec_star: ModelSpec, spec_other: ModelSpec, draws: int, seed: int) -> KldEstimate:
    rng = rngmod.substream(seed, rngmod.KLD_OUTER)
    samples = np.empty(draws)
    for i in range(draws):
        z0 = spec_star.sample_stationary(rng)
        z1 = spec_star.sample_step(z0, rng)
        num = spec_star.trans_logpdf(z0, z1)
        den = spec_other.trans_logpdf(z0, z1)
        samples[i] = np.inf if den == -np.inf and num > -np.inf else num - den
    return _finish_mc(samples, "mc")


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------


def delta_glm_closed(star: GlmParams, other: GlmParams) -> KldEstimate:
    """Exact expected transition KLD for the linear Gaussian family.

    Equals ``1/2 [ tr(R^{-1}(R* - R)) - log det(R^{-1} R*)
    + tr(dPhi^T R^{-1} dPhi Gamma*) ]`` with ``dPhi = Phi - Phi*`` and
    ``Gamma*`` the stationary covariance of the reference chain. The
    quadratic term carries ``R^{-1}`` between the two ``dPhi`` factors
    (the Monte Carlo estimator confirms this arrangement).
    """
    if star.p != other.p or star.q != other.q:
        raise ValueError("parameter dimensions differ")
    gamma = glm_stationary_cov(star)
    dphi = other.Phi - star.Phi
    trace_term = float(np.trace(np.linalg.solve(other.R, star.R - other.R)))
    logdet_term = float(np.linalg.slogdet(star.R)[1] - np.linalg.slogdet(other.R)[1])
    quad_term = float(np.trace(dphi.T @ np.linalg.solve(other.R, dphi @ gamma)))
    return KldEstimate(0.5 * (trace_term - logdet_term + quad_term), "closed_form")


def delta_sv_closed(star: SvParams, other: SvParams) -> KldEstimate:
    """Exact expected transition KLD for the stochastic volatility family.

    All five terms of the divergence have closed-form stationary moments:
    ``E[X0^2] = E[X1^2] = sigma*^2/(1-phi*^2)``,
    ``E[X0 X1] = phi* sigma*^2/(1-phi*^2)`` and
    ``E[Y1^2 e^{-X1}] = beta*^2`` (the observation is a scale-mixture
    Gaussian with multiplier independent of the state).
    """
    ex2 = star.x_var
    ex0x1 = star.phi * star.x_var
    ey2emx = star.beta**2
    value = (
        np.log((other.sigma * other.beta) / (star.sigma * star.beta))
        + 0.5 * ex2 * (other.sigma**-2 - star.sigma**-2)
        + ex0x1 * (star.phi / star.sigma**2 - other.phi / other.sigma**2)
        + 0.5 * ex2 * (other.phi**2 / other.sigma**2 - star.phi**2 / star.sigma**2)
        + 0.5 * ey2emx * (other.beta**-2 - star.beta**-2)
    )
    return KldEstimate(float(value), "closed_form")


# ---------------------------------------------------------------------------
# Emission-level divergence for HMMs
# ---------------------------------------------------------------------------


def _finite_row_kl(gstar: np.ndarray, gother: np.ndarray) -> float:
    mask = gstar > 0.0
    if np.any(gother[mask] == 0.0):
        return np.inf
    return float(np.sum(gstar[mask] * (np.log(gstar[mask]) - np.log(gother[mask]))))


def delta_bar_finite_exact(star: FiniteHmmParams, other: FiniteHmmParams) -> KldEstimate:
    """Exact emission-level divergence of two finite HMMs by double sum."""
    pi_star = finite_hmm_stationary(star)
    pi_other = finite_hmm_stationary(other)
    total = 0.0
    for i, ws in enumerate(pi_star):
        for j, wo in enumerate(pi_other):
            if ws * wo == 0.0:
                continue
            kl = _finite_row_kl(star.G[i], other.G[j])
            if kl == np.inf:
                return KldEstimate(np.inf, "closed_form", flags=("support_mismatch",))
            total += ws * wo * kl
    return KldEstimate(total, "closed_form")


def delta_bar_hmm(
    spec_star: ModelSpec,
    spec_other: ModelSpec,
    draws: int = 100_000,
    seed: int = 0,
    emission_kl: Optional[Callable[[float, float], float]] = None,
) -> KldEstimate:
    """Emission-level divergence, integrating the two stationary x-marginals.

    Finite pairs are summed exactly. Stochastic volatility pairs use the
    closed-form KLD between the two conditional Gaussian emissions. Any
    other HMM pair is estimated by Monte Carlo: pairs ``(x, x')`` are
    drawn from the product of stationary marginals and the inner emission
    KLD uses ``emission_kl`` when supplied, else a single-draw log ratio.
    """
    if spec_star.hmm is None or spec_other.hmm is None:
        raise ValueError("the emission-level divergence needs HMM factorizations on both sides")
    if spec_star.finite is not None and spec_other.finite is not None:
        return delta_bar_finite_exact(spec_star.finite, spec_other.finite)
    rng = rngmod.substream(seed, rngmod.KLD_OUTER, 1)
    if spec_star.sv is not None and spec_other.sv is not None:
        sv_s, sv_o = spec_star.sv, spec_other.sv
        x = np.sqrt(sv_s.x_var) * rng.standard_normal(draws)
        xo = np.sqrt(sv_o.x_var) * rng.standard_normal(draws)
        ratio = (sv_s.beta**2 / sv_o.beta**2) * np.exp(x - xo)
        samples = 0.5 * (ratio - 1.0 - np.log(ratio))
        return _finish_mc(samples, "mc")
    star_h, other_h = spec_star.hmm, spec_other.hmm
    if star_h.stationary_x_sample_many is None or other_h.stationary_x_sample_many is None:
        raise ValueError("both models must expose stationary hidden-state samplers")
    xs = np.asarray(star_h.stationary_x_sample_many(draws, rng))
    xo = np.asarray(other_h.stationary_x_sample_many(draws, rng))
    samples = np.empty(draws)
    if emission_kl is not None:
        for i in range(draws):
            samples[i] = emission_kl(xs[i], xo[i])
    else:
        if star_h.g_sample is None:
            raise ValueError("inner Monte Carlo needs an emission sampler on the reference model")
        for i in range(draws):
            y = star_h.g_sample(xs[i], rng)
            num = star_h.g_logpdf(xs[i], y)
            den = other_h.g_logpdf(xo[i], y)
            samples[i] = np.inf if den == -np.inf and num > -np.inf else num - den
    return _finish_mc(samples, "mc")


# ---------------------------------------------------------------------------
# Information denseness of a prior around the reference parameter
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DensenessRow:
    delta: float
    prior_mass: float
    flag: str  # "" or "zero_mass"


def information_denseness_profile(
    grid,
    divergences: np.ndarray,
    deltas: Sequence[float],
) -> list[DensenessRow]:
    """Prior mass of ``{theta : divergence(theta) <= delta}`` per threshold.

    ``divergences`` holds one (estimated or exact) divergence per grid
    point; rows with zero mass are flagged, since a vanishing mass at
    some positive threshold is exactly what breaks the prior-denseness
    requirement for posterior concentration.
    """
    divergences = np.asarray(divergences, dtype=float)
    weights = np.asarray(grid.prior_weight, dtype=float)
    if divergences.shape != weights.shape:
        raise ValueError("one divergence value per grid point is required")
    total = weights.sum()
    rows = []
    for delta in deltas:
        mass = float(weights[divergences <= delta].sum() / total)
        rows.append(DensenessRow(float(delta), mass, "" if mass > 0.0 else "zero_mass"))
    return rows


def write_denseness_csv(rows: Sequence[DensenessRow], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("delta,prior_mass,flag\n")
        for r in rows:
            fh.write(f"{r.delta:.17g},{r.prior_mass:.17g},{r.flag}\n")
