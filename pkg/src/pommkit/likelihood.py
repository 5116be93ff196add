"""Exact and approximate evaluation of the observed-data likelihood.

All evaluators return the log density of ``y_{1:n}`` under the model and
a chosen initial distribution for ``z_0``. Exact methods (Kalman for the
linear families, the forward recursion for finite alphabets) also expose
their per-observation increments ``log p(y_k | y_{1:k-1})``, whose sum is
the log likelihood by the chain rule; posterior sweeps reuse the
increments to get every prefix likelihood from a single pass.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import rng as rngmod
from .core import GaussianOnZ, ModelSpec, PointMass, Stationary, UnsupportedInitError
from .models import glm_stationary_cov

_LOG2PI = np.log(2.0 * np.pi)


@dataclass(frozen=True)
class LogLik:
    """A log-likelihood value with its provenance.

    ``se`` is only populated by the particle filter (a delta-method
    standard error of the log estimate); ``value`` is ``-inf`` exactly
    when the model assigns zero density to the data.
    """

    value: float
    n: int
    method: str
    se: Optional[float] = None
    flags: tuple = field(default_factory=tuple)


def _obs_column(obs: np.ndarray, obs_dim: int) -> np.ndarray:
    """Normalize observations to shape (n, obs_dim)."""
    obs = np.asarray(obs)
    if obs.ndim == 1:
        obs = obs[:, None]
    if obs.ndim != 2 or obs.shape[1] != obs_dim:
        raise ValueError(f"observations must have shape (n, {obs_dim}), got {obs.shape}")
    return obs


# ---------------------------------------------------------------------------
# Kalman recursion on the joint chain (linear Gaussian families)
# ---------------------------------------------------------------------------


def _gaussian_init_moments(spec: ModelSpec, init) -> tuple[np.ndarray, np.ndarray]:
    d = spec.state_dim + spec.obs_dim
    if isinstance(init, Stationary):
        return np.zeros(d), glm_stationary_cov(spec.glm)
    if isinstance(init, PointMass):
        z = np.concatenate([np.atleast_1d(init.x).astype(float), np.atleast_1d(init.y).astype(float)])
        if z.size != d:
            raise ValueError(f"point mass has dimension {z.size}, expected {d}")
        return z, np.zeros((d, d))
    if isinstance(init, GaussianOnZ):
        if init.mean.size != d:
            raise ValueError(f"Gaussian init has dimension {init.mean.size}, expected {d}")
        return init.mean.copy(), init.cov.copy()
    raise UnsupportedInitError(
        f"the Kalman evaluator needs a Gaussian-type initial distribution, got {type(init).__name__}"
    )


def kalman_increments(spec: ModelSpec, obs: np.ndarray, init) -> np.ndarray:
    """Per-observation predictive log densities from the exact filter.

    The filter runs on the full joint vector ``z = (x, y)``; the
    observation at each step is the (noiselessly observed) ``y`` block of
    the predicted Gaussian, so the innovation covariance is the ``yy``
    block of the predicted covariance.
    """
    if spec.glm is None:
        raise ValueError("kalman evaluation needs a linear Gaussian model")
    params = spec.glm
    p, q = params.p, params.q
    ys = _obs_column(obs, q)
    Phi, R = params.Phi, params.R
    m, P = _gaussian_init_moments(spec, init)
    yi = slice(p, p + q)
    out = np.empty(len(ys))
    for k, y in enumerate(ys):
        m = Phi @ m
        P = Phi @ P @ Phi.T + R
        S = P[yi, yi]
        chol = np.linalg.cholesky(S)
        innov = y - m[yi]
        u = np.linalg.solve(chol, innov)
        out[k] = -0.5 * (q * _LOG2PI + 2.0 * np.sum(np.log(np.diag(chol))) + u @ u)
        gain = np.linalg.solve(S, P[yi, :]).T  # P[:, yi] S^{-1}
        m = m + gain @ innov
        P = P - gain @ P[yi, :]
        P = 0.5 * (P + P.T)
    return out


def kalman_loglik(spec: ModelSpec, obs: np.ndarray, init) -> LogLik:
    """Exact log likelihood of a linear Gaussian model."""
    obs = _obs_column(obs, spec.obs_dim)
    if len(obs) == 0:
        return LogLik(0.0, 0, "kalman")
    inc = kalman_increments(spec, obs, init)
    return LogLik(float(inc.sum()), len(inc), "kalman")


def _ssm_scalar_increments(ssm, ys: np.ndarray, init) -> np.ndarray:
    """Plain-float filter for p = q = 1; orders of magnitude faster."""
    a = float(ssm.A[0, 0])
    b = float(ssm.B[0, 0])
    qz = float(ssm.Qzeta[0, 0])
    qx = float(ssm.Qxi[0, 0])
    if isinstance(init, Stationary):
        m, pv = 0.0, qz / (1.0 - a * a)
    elif isinstance(init, PointMass):
        m, pv = float(np.atleast_1d(init.x)[0]), 0.0
    elif isinstance(init, GaussianOnZ):
        m, pv = float(init.mean[0]), float(init.cov[0, 0])
    else:
        raise UnsupportedInitError(
            f"the Kalman evaluator needs a Gaussian-type initial distribution, got {type(init).__name__}"
        )
    log2pi = float(_LOG2PI)
    out = np.empty(len(ys))
    yflat = ys[:, 0]
    log = np.log
    for k in range(len(yflat)):
        m = a * m
        pv = a * a * pv + qz
        s = b * b * pv + qx
        innov = yflat[k] - b * m
        out[k] = -0.5 * (log2pi + log(s) + innov * innov / s)
        gain = pv * b / s
        m = m + gain * innov
        pv = pv - gain * b * pv
    return out


def ssm_kalman_increments(ssm, obs: np.ndarray, init) -> np.ndarray:
    """Predictive log densities from the filter on the hidden state only.

    Independent of :func:`kalman_increments`: this version filters the
    p-dimensional hidden state with the measurement equation
    ``y = Bx + xi``, instead of filtering the joint (p+q)-vector. The two
    must agree to floating-point accuracy on the same data.
    """
    A, B, Qz, Qx = ssm.A, ssm.B, ssm.Qzeta, ssm.Qxi
    p, q = ssm.p, ssm.q
    ys = _obs_column(obs, q)
    if p == 1 and q == 1:
        return _ssm_scalar_increments(ssm, ys, init)
    if isinstance(init, Stationary):
        m = np.zeros(p)
        P = Qz.copy()
        term = Qz.copy()
        while np.linalg.norm(term) >= 1e-14:
            term = A @ term @ A.T
            P += term
    elif isinstance(init, PointMass):
        m = np.atleast_1d(init.x).astype(float)
        P = np.zeros((p, p))
    elif isinstance(init, GaussianOnZ):
        m = init.mean[:p].copy()
        P = init.cov[:p, :p].copy()
    else:
        raise UnsupportedInitError(
            f"the Kalman evaluator needs a Gaussian-type initial distribution, got {type(init).__name__}"
        )
    out = np.empty(len(ys))
    for k, y in enumerate(ys):
        m = A @ m
        P = A @ P @ A.T + Qz
        S = B @ P @ B.T + Qx
        chol = np.linalg.cholesky(S)
        innov = y - B @ m
        u = np.linalg.solve(chol, innov)
        out[k] = -0.5 * (q * _LOG2PI + 2.0 * np.sum(np.log(np.diag(chol))) + u @ u)
        gain = np.linalg.solve(S, B @ P).T
        m = m + gain @ innov
        P = P - gain @ (B @ P)
        P = 0.5 * (P + P.T)
    return out


def ssm_kalman_loglik(ssm, obs: np.ndarray, init) -> LogLik:
    obs = np.asarray(obs)
    if len(obs) == 0:
        return LogLik(0.0, 0, "kalman")
    inc = ssm_kalman_increments(ssm, obs, init)
    return LogLik(float(inc.sum()), len(inc), "kalman")


# ---------------------------------------------------------------------------
# Forward recursion and path enumeration (finite alphabets)
# ---------------------------------------------------------------------------


def _finite_x0_dist(spec: ModelSpec, init) -> np.ndarray:
    K = spec.finite.n_states
    if isinstance(init, Stationary):
        from .models import finite_hmm_stationary

        return finite_hmm_stationary(spec.finite)
    if isinstance(init, PointMass):
        x0 = int(np.atleast_1d(init.x)[0])
        if not 0 <= x0 < K:
            raise ValueError(f"point-mass state {x0} outside 0..{K - 1}")
        dist = np.zeros(K)
        dist[x0] = 1.0
        return dist
    if isinstance(init, np.ndarray):
        dist = np.asarray(init, dtype=float)
        if dist.shape != (K,) or np.any(dist < 0) or abs(dist.sum() - 1.0) > 1e-10:
            raise ValueError("initial state distribution must be a probability vector over states")
        return dist
    raise UnsupportedInitError(
        f"finite models take Stationary, PointMass or an explicit state distribution, got {type(init).__name__}"
    )


def _check_symbols(obs: np.ndarray, n_symbols: int) -> np.ndarray:
    ys = np.asarray(obs).reshape(-1)
    ys_int = ys.astype(int)
    if np.any(ys_int != ys) or np.any(ys_int < 0) or np.any(ys_int >= n_symbols):
        raise ValueError(f"observation symbols must lie in 0..{n_symbols - 1}")
    return ys_int


def forward_increments(spec: ModelSpec, obs: np.ndarray, init) -> np.ndarray:
    """Scaled forward recursion; returns log p(y_k | y_{1:k-1}) per step."""
    if spec.finite is None:
        raise ValueError("forward evaluation needs a finite-alphabet model")
    P, G = spec.finite.P, spec.finite.G
    ys = _check_symbols(obs, spec.finite.n_symbols)
    alpha = _finite_x0_dist(spec, init)
    out = np.empty(len(ys))
    for k, y in enumerate(ys):
        alpha = (alpha @ P) * G[:, y]
        c = alpha.sum()
        if c <= 0.0:
            out[k:] = -np.inf
            return out
        out[k] = np.log(c)
        alpha = alpha / c
    return out


def forward_loglik(spec: ModelSpec, obs: np.ndarray, init) -> LogLik:
    """Exact log likelihood of a finite HMM by the forward algorithm."""
    ys = np.asarray(obs).reshape(-1)
    if len(ys) == 0:
        return LogLik(0.0, 0, "forward")
    inc = forward_increments(spec, obs, init)
    return LogLik(float(inc.sum()), len(inc), "forward")


def enumeration_loglik(spec: ModelSpec, obs: np.ndarray, init, cap: int = 1 << 22) -> float:
    """Brute-force log p(y_{1:n}) as a sum over all hidden paths.

    Exponential in n; this exists purely as an oracle for the forward
    recursion and the posterior machinery.
    """
    if spec.finite is None:
        raise ValueError("enumeration needs a finite-alphabet model")
    P, G = spec.finite.P, spec.finite.G
    K = spec.finite.n_states
    ys = _check_symbols(obs, spec.finite.n_symbols)
    n = len(ys)
    if K**n > cap:
        raise ValueError(f"enumeration over {K}^{n} paths exceeds the cap")
    x0_dist = _finite_x0_dist(spec, init)
    total = 0.0
    for path in itertools.product(range(K), repeat=n):
        prob = sum(x0_dist[x0] * P[x0, path[0]] for x0 in range(K)) * G[path[0], ys[0]]
        for k in range(1, n):
            prob *= P[path[k - 1], path[k]] * G[path[k], ys[k]]
        total += prob
    return float(np.log(total)) if total > 0.0 else -np.inf


# ---------------------------------------------------------------------------
# Bootstrap particle filter
# ---------------------------------------------------------------------------


def _bpf_initial_particles(spec: ModelSpec, init, n_particles: int, rng: np.random.Generator):
    hmm = spec.hmm
    if isinstance(init, Stationary):
        if hmm.stationary_x_sample_many is None:
            raise UnsupportedInitError("model has no stationary state sampler")
        return np.asarray(hmm.stationary_x_sample_many(n_particles, rng))
    if isinstance(init, PointMass):
        x0 = np.atleast_1d(init.x)
        if x0.size == 1:
            return np.full(n_particles, float(x0[0])) if spec.finite is None else np.full(
                n_particles, int(x0[0]), dtype=int
            )
        return np.tile(x0.astype(float), (n_particles, 1))
    if isinstance(init, GaussianOnZ):
        p = spec.state_dim
        mean = init.mean[:p]
        cov = init.cov[:p, :p]
        try:
            chol = np.linalg.cholesky(cov)
        except np.linalg.LinAlgError:
            w, v = np.linalg.eigh(cov)
            chol = v @ np.diag(np.sqrt(np.clip(w, 0.0, None)))
        draws = rng.standard_normal((n_particles, p)) @ chol.T + mean
        return draws[:, 0] if p == 1 else draws
    raise UnsupportedInitError(f"unsupported initial distribution for the particle filter: {type(init).__name__}")


def _systematic_resample(weights: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    n = len(weights)
    positions = (rng.random() + np.arange(n)) / n
    return np.searchsorted(np.cumsum(weights), positions, side="right").clip(max=n - 1)


def bpf_loglik(spec: ModelSpec, obs: np.ndarray, init, particles: int, seed: int, stream: int = 0) -> LogLik:
    """Bootstrap particle filter estimate of the log likelihood.

    Systematic resampling happens at every step, which keeps the
    estimator of the likelihood (on the natural scale) unbiased. ``se``
    is a delta-method standard error of the log estimate assembled from
    the within-run weight variances; it carries no replicate information.
    ``init`` is a law on the full (x, y) pair, but under the factorized
    transition only its hidden-state marginal affects the likelihood.
    """
    if spec.hmm is None:
        raise ValueError("the particle filter needs an HMM factorization")
    if particles < 2:
        raise ValueError("particles must be >= 2")
    hmm = spec.hmm
    if hmm.qx_sample_many is None or hmm.g_logpdf_many is None:
        raise ValueError("the particle filter needs batch transition/emission hooks")
    ys = _obs_column(obs, spec.obs_dim)
    rng = rngmod.substream(seed, rngmod.BPF, stream)
    x = _bpf_initial_particles(spec, init, particles, rng)
    loglik = 0.0
    var_log = 0.0
    flags = []
    for y in ys:
        x = np.asarray(hmm.qx_sample_many(x, rng))
        logw = np.asarray(hmm.g_logpdf_many(x, y if y.size > 1 else float(y[0])))
        m = logw.max()
        if not np.isfinite(m):
            return LogLik(-np.inf, len(ys), "bpf", flags=("zero_weights",))
        w = np.exp(logw - m)
        wmean = w.mean()
        loglik += m + np.log(wmean)
        var_log += w.var() / (particles * wmean**2)
        idx = _systematic_resample(w / w.sum(), rng)
        x = x[idx]
    return LogLik(float(loglik), len(ys), "bpf", se=float(np.sqrt(var_log)), flags=tuple(flags))


# ---------------------------------------------------------------------------
# Grid quadrature oracle (scalar hidden state)
# ---------------------------------------------------------------------------


def _trapezoid_weights(grid: np.ndarray) -> np.ndarray:
    h = grid[1] - grid[0]
    w = np.full(len(grid), h)
    w[0] = w[-1] = h / 2.0
    return w


def _x_marginal_sd(spec: ModelSpec) -> float:
    if spec.sv is not None:
        return float(np.sqrt(spec.sv.x_var))
    if spec.glm is not None:
        return float(np.sqrt(glm_stationary_cov(spec.glm)[0, 0]))
    raise ValueError("cannot infer a state grid for this model; quadrature supports the built-in families")


def quadrature_loglik(spec: ModelSpec, obs: np.ndarray, init, nodes: int = 2001, span: float = 8.0) -> LogLik:
    """Tensor-grid quadrature of the likelihood integral, scalar state only.

    The hidden-state axis is discretized on ``nodes`` trapezoid points
    spanning ``span`` stationary standard deviations (widened to cover a
    displaced initial condition), and the n-fold integral is accumulated
    one factor at a time in the log domain, which evaluates the full
    tensor-product rule without materializing the n-dimensional grid.
    For factorized models only the hidden-state marginal of ``init``
    matters; the general linear path integrates the full initial pair.
    """
    if spec.state_dim != 1:
        raise ValueError("quadrature supports one-dimensional hidden states only")
    ys = _obs_column(obs, spec.obs_dim)
    n = len(ys)
    if n == 0:
        return LogLik(0.0, 0, "quadrature")
    if n > 8:
        raise ValueError("quadrature is an oracle for short sequences (n <= 8)")
    sd = _x_marginal_sd(spec)
    center = 0.0
    extra = 0.0
    if isinstance(init, PointMass):
        center = float(np.atleast_1d(init.x)[0])
        extra = abs(center)
    elif isinstance(init, GaussianOnZ):
        center = float(init.mean[0])
        extra = abs(center) + float(np.sqrt(max(init.cov[0, 0], 0.0)))
    lo = min(0.0, center) - span * sd - extra
    hi = max(0.0, center) + span * sd + extra
    grid = np.linspace(lo, hi, nodes)
    logw = np.log(_trapezoid_weights(grid))

    if spec.hmm is not None:
        return _quadrature_hmm(spec, ys, init, grid, logw)
    if spec.glm is not None:
        return _quadrature_glm(spec, ys, init, grid, logw)
    raise ValueError("quadrature needs either an HMM factorization or linear-family parameters")


def _logsumexp(v: np.ndarray) -> float:
    m = v.max()
    if not np.isfinite(m):
        return -np.inf
    return float(m + np.log(np.exp(v - m).sum()))


def _gh_nodes(mean: float, sd: float, n: int = 80) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Hermite nodes/weights for integrating against N(mean, sd^2)."""
    t, w = np.polynomial.hermite.hermgauss(n)
    return mean + np.sqrt(2.0) * sd * t, w / np.sqrt(np.pi)


def _qx_log_matrix(spec: ModelSpec, x_from: np.ndarray, x_to: np.ndarray) -> np.ndarray:
    """log qx evaluated on the product grid, shape (from, to)."""
    if spec.sv is not None:
        sv = spec.sv
        dev = x_to[None, :] - sv.phi * x_from[:, None]
        return -0.5 * (_LOG2PI + np.log(sv.sigma**2) + dev**2 / sv.sigma**2)
    if spec.ssm is not None:
        a = float(spec.ssm.A[0, 0])
        qz = float(spec.ssm.Qzeta[0, 0])
        dev = x_to[None, :] - a * x_from[:, None]
        return -0.5 * (_LOG2PI + np.log(qz) + dev**2 / qz)
    hmm = spec.hmm
    return np.array([[hmm.qx_logpdf(xf, xt) for xt in x_to] for xf in x_from])


def _g_log_vector(spec: ModelSpec, x: np.ndarray, y) -> np.ndarray:
    hmm = spec.hmm
    if hmm.g_logpdf_many is not None:
        return np.asarray(hmm.g_logpdf_many(x, y))
    return np.array([hmm.g_logpdf(xx, y) for xx in x])


def _quadrature_hmm(spec: ModelSpec, ys: np.ndarray, init, grid: np.ndarray, logw: np.ndarray) -> LogLik:
    yvals = [float(y[0]) if y.size == 1 else y for y in ys]
    # first factor: integrate z0's state component against the initial law
    if isinstance(init, PointMass):
        x0 = float(np.atleast_1d(init.x)[0])
        la = _qx_log_matrix(spec, np.array([x0]), grid)[0]
    else:
        if isinstance(init, Stationary):
            mean, sd = 0.0, _x_marginal_sd(spec)
        elif isinstance(init, GaussianOnZ):
            mean, sd = float(init.mean[0]), float(np.sqrt(max(init.cov[0, 0], 0.0)))
        else:
            raise UnsupportedInitError(f"unsupported initial distribution for quadrature: {type(init).__name__}")
        if sd == 0.0:
            la = _qx_log_matrix(spec, np.array([mean]), grid)[0]
        else:
            x0n, w0 = _gh_nodes(mean, sd)
            logm = _qx_log_matrix(spec, x0n, grid) + np.log(w0)[:, None]
            mcol = logm.max(axis=0)
            la = mcol + np.log(np.exp(logm - mcol[None, :]).sum(axis=0))
    la = la + _g_log_vector(spec, grid, yvals[0])
    for y in yvals[1:]:
        m = la.max()
        alpha = np.exp(la + logw - m)
        trans = np.exp(_qx_log_matrix(spec, grid, grid))
        v = alpha @ trans
        with np.errstate(divide="ignore"):
            la = m + np.log(v) + _g_log_vector(spec, grid, y)
    total = _logsumexp(la + logw)
    return LogLik(total, len(yvals), "quadrature")


def _quadrature_glm(spec: ModelSpec, ys: np.ndarray, init, grid: np.ndarray, logw: np.ndarray) -> LogLik:
    """General scalar linear model: the transition may depend on the past y."""
    params = spec.glm
    if params.p != 1 or params.q != 1:
        raise ValueError("quadrature for the linear family is implemented for p = q = 1")
    Phi, R = params.Phi, params.R
    Rinv = np.linalg.inv(R)
    logdet = float(np.linalg.slogdet(R)[1])

    def log_q(z0: np.ndarray, z1: np.ndarray) -> np.ndarray:
        # z0: (m, 2), z1: (k, 2) -> (m, k)
        mean = z0 @ Phi.T
        dev = z1[None, :, :] - mean[:, None, :]
        quad = np.einsum("mki,ij,mkj->mk", dev, Rinv, dev)
        return -0.5 * (2.0 * _LOG2PI + logdet + quad)

    yvals = ys[:, 0]
    z1_grid = np.column_stack([grid, np.full(len(grid), yvals[0])])
    if isinstance(init, PointMass):
        z0 = np.concatenate([np.atleast_1d(init.x), np.atleast_1d(init.y)]).astype(float)[None, :]
        la = log_q(z0, z1_grid)[0]
    elif isinstance(init, (Stationary, GaussianOnZ)):
        if isinstance(init, Stationary):
            mean, cov = np.zeros(2), glm_stationary_cov(params)
        else:
            mean, cov = init.mean, init.cov
        # tensor Gauss-Hermite on the two z0 coordinates via the Cholesky map
        t, w = np.polynomial.hermite.hermgauss(64)
        tt0, tt1 = np.meshgrid(t, t, indexing="ij")
        u = np.column_stack([tt0.ravel(), tt1.ravel()]) * np.sqrt(2.0)
        try:
            chol = np.linalg.cholesky(cov)
        except np.linalg.LinAlgError:
            wv, vv = np.linalg.eigh(cov)
            chol = vv @ np.diag(np.sqrt(np.clip(wv, 0.0, None)))
        z0 = u @ chol.T + mean
        lw0 = np.log(np.outer(w, w).ravel() / np.pi)
        logm = log_q(z0, z1_grid) + lw0[:, None]
        mcol = logm.max(axis=0)
        la = mcol + np.log(np.exp(logm - mcol[None, :]).sum(axis=0))
    else:
        raise UnsupportedInitError(f"unsupported initial distribution for quadrature: {type(init).__name__}")

    for k in range(1, len(yvals)):
        z_prev = np.column_stack([grid, np.full(len(grid), yvals[k - 1])])
        z_next = np.column_stack([grid, np.full(len(grid), yvals[k])])
        m = la.max()
        alpha = np.exp(la + logw - m)
        trans = np.exp(log_q(z_prev, z_next))
        with np.errstate(divide="ignore"):
            la = m + np.log(alpha @ trans)
    return LogLik(_logsumexp(la + logw), len(yvals), "quadrature")


# ---------------------------------------------------------------------------
# Exact conditional entropy sequence (finite models)
# ---------------------------------------------------------------------------


def conditional_entropy_sequence(spec: ModelSpec, nmax: int, cap: int = 1 << 20) -> np.ndarray:
    """Expected predictive log densities E[log p(Y_n | Y_{1:n-1})], n = 1..nmax.

    Computed exactly, under the stationary law, by enumerating every
    observation string: the value at n equals H(Y_{1:n-1}) - H(Y_{1:n})
    in Shannon entropies of the string distributions. For a stationary
    chain the sequence is non-decreasing in n.
    """
    if spec.finite is None:
        raise ValueError("the entropy sequence is computed exactly on finite models only")
    P, G = spec.finite.P, spec.finite.G
    K, L = spec.finite.n_states, spec.finite.n_symbols
    if L**nmax > cap:
        raise ValueError(f"enumeration over {L}^{nmax} strings exceeds the cap")
    from .models import finite_hmm_stationary

    alpha = finite_hmm_stationary(spec.finite)[None, :]  # (strings, states), unnormalized
    entropies = [0.0]
    for _ in range(nmax):
        pred = alpha @ P  # (B, K)
        alpha = (pred[:, None, :] * G.T[None, :, :]).reshape(-1, K)  # expand by symbol
        probs = alpha.sum(axis=1)
        nz = probs > 0.0
        entropies.append(float(-(probs[nz] * np.log(probs[nz])).sum()))
    ent = np.array(entropies)
    return ent[:-1] - ent[1:]
