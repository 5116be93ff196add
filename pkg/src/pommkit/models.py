"""Concrete model families.

Four families are provided:

* ``glm_spec`` -- the partially observed Gaussian linear Markov model
  ``Z_{k+1} = Phi Z_k + eps_{k+1}`` with ``eps ~ N(0, R)`` on
  ``R^p x R^q``; the noise may correlate the state and observation
  components, so this family is not an HMM in general.
* ``ssm_spec`` -- the linear Gaussian state-space model
  ``X_{k+1} = A X_k + zeta``, ``Y_k = B X_k + xi``, which embeds into the
  linear family via ``ssm_embed`` and, having independent noises, also
  factorizes as an HMM.
* ``sv_spec`` -- the stochastic volatility model: a Gaussian AR(1)
  log-volatility ``X`` with observation ``Y = beta * exp(X/2) * U``.
* ``finite_hmm_spec`` -- a finite state/alphabet HMM given by stochastic
  matrices; everything about it can be computed by exact enumeration, so
  it serves as the brute-force oracle for the continuous families.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import HmmFactorization, ModelSpec

_LOG2PI = np.log(2.0 * np.pi)


# ---------------------------------------------------------------------------
# Parameter records
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GlmParams:
    """Transition matrix and innovation covariance of the linear family.

    ``Phi`` is (p+q) x (p+q) with spectral radius < 1 and ``R`` is
    symmetric positive definite; ``p`` and ``q`` are the state and
    observation dimensions.
    """

    Phi: np.ndarray
    R: np.ndarray
    p: int
    q: int

    def __init__(self, Phi, R, p: int, q: int):
        Phi = np.asarray(Phi, dtype=float)
        R = np.asarray(R, dtype=float)
        d = p + q
        if p < 1 or q < 1:
            raise ValueError("state and observation dimensions must be positive")
        if Phi.shape != (d, d) or R.shape != (d, d):
            raise ValueError(f"Phi and R must be {d}x{d}")
        rho = spectral_radius(Phi)
        if rho >= 1.0:
            raise ValueError(f"spectral radius of Phi must be < 1, got {rho:.6g}")
        if not np.allclose(R, R.T, atol=1e-10):
            raise ValueError("R must be symmetric")
        if np.linalg.eigvalsh(R).min() <= 0.0:
            raise ValueError("R must be positive definite")
        object.__setattr__(self, "Phi", Phi)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)


@dataclass(frozen=True)
class SsmParams:
    """Linear Gaussian state-space model ``X' = AX + zeta``, ``Y = BX + xi``."""

    A: np.ndarray
    B: np.ndarray
    Qzeta: np.ndarray
    Qxi: np.ndarray

    def __init__(self, A, B, Qzeta, Qxi):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        B = np.atleast_2d(np.asarray(B, dtype=float))
        Qzeta = np.atleast_2d(np.asarray(Qzeta, dtype=float))
        Qxi = np.atleast_2d(np.asarray(Qxi, dtype=float))
        p = A.shape[0]
        q = B.shape[0]
        if A.shape != (p, p):
            raise ValueError("A must be square")
        if B.shape != (q, p):
            raise ValueError(f"B must be {q}x{p}")
        if Qzeta.shape != (p, p) or Qxi.shape != (q, q):
            raise ValueError("noise covariances have inconsistent shapes")
        if spectral_radius(A) >= 1.0:
            raise ValueError("spectral radius of A must be < 1")
        for name, M in (("Qzeta", Qzeta), ("Qxi", Qxi)):
            if not np.allclose(M, M.T, atol=1e-10) or np.linalg.eigvalsh(M).min() <= 0.0:
                raise ValueError(f"{name} must be symmetric positive definite")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "Qzeta", Qzeta)
        object.__setattr__(self, "Qxi", Qxi)

    @property
    def p(self) -> int:
        return self.A.shape[0]

    @property
    def q(self) -> int:
        return self.B.shape[0]


@dataclass(frozen=True)
class SvParams:
    """Stochastic volatility parameters ``(beta, sigma, phi)``.

    ``beta`` and ``sigma`` must be strictly positive and ``|phi| < 1``.
    """

    beta: float
    sigma: float
    phi: float

    def __post_init__(self):
        if not (self.beta > 0.0 and np.isfinite(self.beta)):
            raise ValueError(f"beta must be positive, got {self.beta}")
        if not (self.sigma > 0.0 and np.isfinite(self.sigma)):
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not abs(self.phi) < 1.0:
            raise ValueError(f"|phi| must be < 1, got {self.phi}")

    @property
    def x_var(self) -> float:
        """Stationary variance of the log-volatility chain."""
        return self.sigma**2 / (1.0 - self.phi**2)


@dataclass(frozen=True)
class FiniteHmmParams:
    """Row-stochastic transition matrix ``P`` (KxK) and emissions ``G`` (KxL)."""

    P: np.ndarray
    G: np.ndarray

    def __init__(self, P, G):
        P = np.asarray(P, dtype=float)
        G = np.asarray(G, dtype=float)
        if P.ndim != 2 or P.shape[0] != P.shape[1]:
            raise ValueError("P must be square")
        if G.ndim != 2 or G.shape[0] != P.shape[0]:
            raise ValueError("G must have one row per state")
        for name, M in (("P", P), ("G", G)):
            if np.any(M < 0.0):
                raise ValueError(f"{name} must be non-negative")
            if np.max(np.abs(M.sum(axis=1) - 1.0)) > 1e-12:
                raise ValueError(f"rows of {name} must sum to 1 within 1e-12")
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "G", G)

    @property
    def n_states(self) -> int:
        return self.P.shape[0]

    @property
    def n_symbols(self) -> int:
        return self.G.shape[1]


def spectral_radius(M: np.ndarray) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(np.atleast_2d(M)))))


# ---------------------------------------------------------------------------
# Stationary covariance of the linear family
# ---------------------------------------------------------------------------


def glm_stationary_cov(params: GlmParams, tol: float = 1e-12, max_terms: int = 200_000) -> np.ndarray:
    """Stationary covariance ``Gamma = sum_k Phi^k R (Phi^T)^k``.

    The series is summed until a term falls below ``tol`` in Frobenius
    norm; the result then satisfies ``Gamma = Phi Gamma Phi^T + R`` to
    within a few multiples of ``tol``.
    """
    Phi, R = params.Phi, params.R
    gamma = R.copy()
    term = R.copy()
    for _ in range(max_terms):
        term = Phi @ term @ Phi.T
        gamma += term
        if np.linalg.norm(term) < tol:
            return 0.5 * (gamma + gamma.T)
    raise RuntimeError(f"stationary covariance series did not converge in {max_terms} terms")


# ---------------------------------------------------------------------------
# Gaussian linear family
# ---------------------------------------------------------------------------


def _mvn_logpdf_factory(cov: np.ndarray):
    chol = np.linalg.cholesky(cov)
    logdet = 2.0 * np.sum(np.log(np.diag(chol)))
    d = cov.shape[0]

    def logpdf(dev: np.ndarray) -> float:
        u = np.linalg.solve(chol, dev)
        return float(-0.5 * (d * _LOG2PI + logdet + u @ u))

    return logpdf, chol, logdet


def glm_spec(params: GlmParams) -> ModelSpec:
    """Model with transition law ``z' ~ N(Phi z, R)`` and stationary law ``N(0, Gamma)``."""
    Phi, R, p, q = params.Phi, params.R, params.p, params.q
    d = p + q
    logpdf, chol_r, _ = _mvn_logpdf_factory(R)
    gamma = glm_stationary_cov(params)
    chol_g = np.linalg.cholesky(gamma)

    def _stack(z):
        return np.concatenate([np.atleast_1d(np.asarray(z[0], dtype=float)),
                               np.atleast_1d(np.asarray(z[1], dtype=float))])

    def trans_logpdf(z, z_next) -> float:
        dev = _stack(z_next) - Phi @ _stack(z)
        return logpdf(dev)

    def sample_step(z, rng):
        znew = Phi @ _stack(z) + chol_r @ rng.standard_normal(d)
        return (znew[:p], znew[p:])

    def sample_stationary(rng):
        z0 = chol_g @ rng.standard_normal(d)
        return (z0[:p], z0[p:])

    def sample_stationary_many(n, rng):
        z0 = rng.standard_normal((n, d)) @ chol_g.T
        return (z0[:, :p], z0[:, p:])

    return ModelSpec(
        state_dim=p,
        obs_dim=q,
        trans_logpdf=trans_logpdf,
        sample_step=sample_step,
        sample_stationary=sample_stationary,
        sample_stationary_many=sample_stationary_many,
        glm=params,
        label="glm",
    )


def ssm_embed(params: SsmParams) -> GlmParams:
    """Embed the state-space model into the linear family.

    With ``eps_k = (zeta_k, B zeta_k + xi_k)`` the joint chain
    ``Z_k = (X_k, Y_k)`` has transition matrix ``[[A, 0], [BA, 0]]`` and
    innovation covariance assembled from ``Cov(zeta, B zeta + xi)``.
    """
    A, B, Qz, Qx = params.A, params.B, params.Qzeta, params.Qxi
    p, q = params.p, params.q
    Phi = np.block([[A, np.zeros((p, q))], [B @ A, np.zeros((q, q))]])
    R = np.block([[Qz, Qz @ B.T], [B @ Qz, B @ Qz @ B.T + Qx]])
    return GlmParams(Phi=Phi, R=R, p=p, q=q)


def ssm_spec(params: SsmParams) -> ModelSpec:
    """State-space model as a ModelSpec, with both views attached.

    The returned spec carries the embedded linear parameters (for the
    exact Kalman evaluator) and the HMM factorization
    ``qx = N(Ax, Qzeta)``, ``g = N(Bx, Qxi)`` (for particle filtering).
    """
    glm = ssm_embed(params)
    spec = glm_spec(glm)
    A, B, Qz, Qx = params.A, params.B, params.Qzeta, params.Qxi
    p, q = params.p, params.q
    chol_qz = np.linalg.cholesky(Qz)
    chol_qx = np.linalg.cholesky(Qx)
    logdet_qx = 2.0 * np.sum(np.log(np.diag(chol_qx)))
    # stationary x-marginal covariance: same series as the embedded chain
    gx = Qz.copy()
    term = Qz.copy()
    while np.linalg.norm(term) >= 1e-14:
        term = A @ term @ A.T
        gx += term
    chol_gx = np.linalg.cholesky(0.5 * (gx + gx.T))

    def qx_logpdf(x, x_next) -> float:
        dev = np.atleast_1d(x_next) - A @ np.atleast_1d(x)
        u = np.linalg.solve(chol_qz, dev)
        return float(-0.5 * (p * _LOG2PI + 2.0 * np.sum(np.log(np.diag(chol_qz))) + u @ u))

    def qx_sample(x, rng):
        return A @ np.atleast_1d(x) + chol_qz @ rng.standard_normal(p)

    def g_logpdf(x, y) -> float:
        dev = np.atleast_1d(y) - B @ np.atleast_1d(x)
        u = np.linalg.solve(chol_qx, dev)
        return float(-0.5 * (q * _LOG2PI + logdet_qx + u @ u))

    def g_sample(x, rng):
        return B @ np.atleast_1d(x) + chol_qx @ rng.standard_normal(q)

    a11 = float(A[0, 0])
    b11 = float(B[0, 0])
    qz11 = float(Qz[0, 0])
    qx11 = float(Qx[0, 0])

    def qx_sample_many(xs, rng):
        xs = np.asarray(xs, dtype=float)
        if p == 1 and xs.ndim == 1:
            return a11 * xs + np.sqrt(qz11) * rng.standard_normal(xs.shape)
        return xs.reshape(len(xs), p) @ A.T + rng.standard_normal((len(xs), p)) @ chol_qz.T

    def g_logpdf_many(xs, y):
        xs = np.asarray(xs, dtype=float)
        if p == 1 and q == 1 and xs.ndim == 1:
            dev = float(np.atleast_1d(y)[0]) - b11 * xs
            return -0.5 * (_LOG2PI + np.log(qx11) + dev * dev / qx11)
        dev = np.atleast_1d(y)[None, :] - xs.reshape(len(xs), p) @ B.T
        u = np.linalg.solve(chol_qx, dev.T)
        return -0.5 * (q * _LOG2PI + logdet_qx + np.sum(u * u, axis=0))

    def stationary_x_sample_many(n, rng):
        draws = rng.standard_normal((n, p)) @ chol_gx.T
        return draws[:, 0] if p == 1 else draws

    hmm = HmmFactorization(
        qx_logpdf=qx_logpdf,
        qx_sample=qx_sample,
        g_logpdf=g_logpdf,
        g_sample=g_sample,
        qx_sample_many=qx_sample_many,
        g_logpdf_many=g_logpdf_many,
        stationary_x_sample_many=stationary_x_sample_many,
    )
    return ModelSpec(
        state_dim=p,
        obs_dim=q,
        trans_logpdf=spec.trans_logpdf,
        sample_step=spec.sample_step,
        sample_stationary=spec.sample_stationary,
        sample_stationary_many=spec.sample_stationary_many,
        hmm=hmm,
        glm=glm,
        ssm=params,
        label="ssm",
    )


def scalar_ssm(a: float, b: float = 1.0, q_state: float = 1.0, q_obs: float = 0.2) -> ModelSpec:
    """Convenience constructor for the one-dimensional state-space model."""
    return ssm_spec(SsmParams(A=[[a]], B=[[b]], Qzeta=[[q_state]], Qxi=[[q_obs]]))


# ---------------------------------------------------------------------------
# Stochastic volatility family
# ---------------------------------------------------------------------------


def sv_spec(params: SvParams) -> ModelSpec:
    """Stochastic volatility model as an HMM.

    Log-volatility transition ``x' ~ N(phi x, sigma^2)``; given ``x`` the
    observation is ``y = beta exp(x/2) u`` with ``u`` standard normal, so
    the emission density is ``N(0, beta^2 e^x)``. The stationary law is
    sampled exactly: ``X ~ N(0, sigma^2 / (1 - phi^2))``.
    """
    beta, sigma, phi = params.beta, params.sigma, params.phi
    sig2 = sigma**2
    b2 = beta**2
    x_sd = np.sqrt(params.x_var)

    def qx_logpdf(x, x_next) -> float:
        return float(-0.5 * (_LOG2PI + np.log(sig2) + (x_next - phi * x) ** 2 / sig2))

    def qx_sample(x, rng):
        return phi * x + sigma * rng.standard_normal()

    def g_logpdf(x, y) -> float:
        # N(0, beta^2 e^x) density at y
        return float(-0.5 * (_LOG2PI + np.log(b2) + x + y * y * np.exp(-x) / b2))

    def g_sample(x, rng):
        return beta * np.exp(x / 2.0) * rng.standard_normal()

    def qx_sample_many(xs, rng):
        return phi * np.asarray(xs) + sigma * rng.standard_normal(np.shape(xs))

    def g_logpdf_many(xs, y):
        xs = np.asarray(xs)
        return -0.5 * (_LOG2PI + np.log(b2) + xs + float(y) ** 2 * np.exp(-xs) / b2)

    def stationary_x_sample_many(n, rng):
        return x_sd * rng.standard_normal(n)

    def trans_logpdf(z, z_next) -> float:
        x = float(np.atleast_1d(z[0])[0])
        x1 = float(np.atleast_1d(z_next[0])[0])
        y1 = float(np.atleast_1d(z_next[1])[0])
        return qx_logpdf(x, x1) + g_logpdf(x1, y1)

    def sample_step(z, rng):
        x = float(np.atleast_1d(z[0])[0])
        x1 = qx_sample(x, rng)
        return (np.array([x1]), np.array([g_sample(x1, rng)]))

    def sample_stationary(rng):
        x = x_sd * rng.standard_normal()
        return (np.array([x]), np.array([g_sample(x, rng)]))

    def sample_stationary_many(n, rng):
        xs = x_sd * rng.standard_normal(n)
        ys = beta * np.exp(xs / 2.0) * rng.standard_normal(n)
        return (xs[:, None], ys[:, None])

    hmm = HmmFactorization(
        qx_logpdf=qx_logpdf,
        qx_sample=qx_sample,
        g_logpdf=g_logpdf,
        g_sample=g_sample,
        qx_sample_many=qx_sample_many,
        g_logpdf_many=g_logpdf_many,
        stationary_x_sample_many=stationary_x_sample_many,
    )
    return ModelSpec(
        state_dim=1,
        obs_dim=1,
        trans_logpdf=trans_logpdf,
        sample_step=sample_step,
        sample_stationary=sample_stationary,
        sample_stationary_many=sample_stationary_many,
        hmm=hmm,
        sv=params,
        label="sv",
    )


# ---------------------------------------------------------------------------
# Finite-state oracle family
# ---------------------------------------------------------------------------


def finite_hmm_stationary(params: FiniteHmmParams, tol: float = 1e-9) -> np.ndarray:
    """Stationary vector ``pi`` of ``P`` with ``pi P = pi``.

    Raises if the unit eigenvalue is not simple (reducible chain) or if
    another eigenvalue sits on the unit circle (periodic chain).
    """
    P = params.P
    w, v = np.linalg.eig(P.T)
    on_circle = np.abs(np.abs(w) - 1.0) < tol
    unit = np.abs(w - 1.0) < tol
    if unit.sum() != 1 or on_circle.sum() != 1:
        raise ValueError("transition matrix has no unique stationary vector (reducible or periodic)")
    pi = np.real(v[:, np.argmax(unit)])
    pi = pi / pi.sum()
    if np.any(pi < -1e-12):
        raise ValueError("stationary eigenvector has negative entries")
    return np.clip(pi, 0.0, None) / np.clip(pi, 0.0, None).sum()


def finite_hmm_spec(params: FiniteHmmParams) -> ModelSpec:
    """Finite HMM with exact stationary law ``pi(x, y) = piX(x) G[x, y]``."""
    P, G = params.P, params.G
    K, L = params.n_states, params.n_symbols
    pi_x = finite_hmm_stationary(params)
    with np.errstate(divide="ignore"):
        logP = np.log(P)
        logG = np.log(G)
    cumP = np.cumsum(P, axis=1)
    cum_pi = np.cumsum(pi_x)
    cumG = np.cumsum(G, axis=1)

    def _xy(z):
        x = int(np.atleast_1d(z[0])[0])
        y = int(np.atleast_1d(z[1])[0])
        return x, y

    def trans_logpdf(z, z_next) -> float:
        x, _ = _xy(z)
        x1, y1 = _xy(z_next)
        return float(logP[x, x1] + logG[x1, y1])

    def qx_logpdf(x, x_next) -> float:
        return float(logP[int(x), int(x_next)])

    def g_logpdf(x, y) -> float:
        return float(logG[int(x), int(y)])

    def qx_sample(x, rng):
        return int(np.searchsorted(cumP[int(x)], rng.random(), side="right"))

    def g_sample(x, rng):
        return int(np.searchsorted(cumG[int(x)], rng.random(), side="right"))

    def qx_sample_many(xs, rng):
        xs = np.asarray(xs, dtype=int)
        u = rng.random(xs.shape[0])
        return (u[:, None] > cumP[xs]).sum(axis=1)

    def g_logpdf_many(xs, y):
        return logG[np.asarray(xs, dtype=int), int(y)]

    def stationary_x_sample_many(n, rng):
        return (rng.random(n)[:, None] > cum_pi[None, :]).sum(axis=1)

    def sample_step(z, rng):
        x, _ = _xy(z)
        x1 = qx_sample(x, rng)
        return (np.array([x1]), np.array([g_sample(x1, rng)]))

    def sample_stationary(rng):
        x = int(np.searchsorted(cum_pi, rng.random(), side="right"))
        return (np.array([x]), np.array([g_sample(x, rng)]))

    hmm = HmmFactorization(
        qx_logpdf=qx_logpdf,
        qx_sample=qx_sample,
        g_logpdf=g_logpdf,
        g_sample=g_sample,
        qx_sample_many=qx_sample_many,
        g_logpdf_many=g_logpdf_many,
        stationary_x_sample_many=stationary_x_sample_many,
    )
    return ModelSpec(
        state_dim=1,
        obs_dim=1,
        trans_logpdf=trans_logpdf,
        sample_step=sample_step,
        sample_stationary=sample_stationary,
        hmm=hmm,
        finite=params,
        label="finite_hmm",
    )


# ---------------------------------------------------------------------------
# An i.i.d. specialization used by the divergence identities
# ---------------------------------------------------------------------------


def iid_gaussian_spec(mu: float, sd: float) -> ModelSpec:
    """HMM whose emission ignores the state: observations i.i.d. N(mu, sd^2).

    The hidden chain regenerates from N(0, 1) at every step, so the
    transition does not depend on the current state at all.
    """
    if sd <= 0.0:
        raise ValueError("sd must be positive")
    var = sd * sd

    def qx_logpdf(x, x_next) -> float:
        return float(-0.5 * (_LOG2PI + x_next * x_next))

    def qx_sample(x, rng):
        return float(rng.standard_normal())

    def g_logpdf(x, y) -> float:
        return float(-0.5 * (_LOG2PI + np.log(var) + (y - mu) ** 2 / var))

    def g_sample(x, rng):
        return float(mu + sd * rng.standard_normal())

    def trans_logpdf(z, z_next) -> float:
        x1 = float(np.atleast_1d(z_next[0])[0])
        y1 = float(np.atleast_1d(z_next[1])[0])
        return qx_logpdf(0.0, x1) + g_logpdf(x1, y1)

    def sample_step(z, rng):
        x1 = qx_sample(0.0, rng)
        return (np.array([x1]), np.array([g_sample(x1, rng)]))

    def stationary_x_sample_many(n, rng):
        return rng.standard_normal(n)

    def sample_stationary(rng):
        # one kernel step from anywhere is already stationary
        return sample_step((np.zeros(1), np.zeros(1)), rng)

    hmm = HmmFactorization(
        qx_logpdf=qx_logpdf,
        qx_sample=qx_sample,
        g_logpdf=g_logpdf,
        g_sample=g_sample,
        stationary_x_sample_many=stationary_x_sample_many,
    )
    return ModelSpec(
        state_dim=1,
        obs_dim=1,
        trans_logpdf=trans_logpdf,
        sample_step=sample_step,
        sample_stationary=sample_stationary,
        hmm=hmm,
        label="iid_gaussian",
    )
