"""The expected Kullback-Leibler divergence between model members.

The transition-level divergence drives how informative the data are
about a wrong parameter; its closed forms are checked here against a
Monte Carlo estimator that only uses simulation and density evaluation.
"""
import numpy as np

from pommkit import (
    GlmParams,
    SvParams,
    delta_bar_hmm,
    delta_glm_closed,
    delta_sv_closed,
    gaussian_kl,
    glm_spec,
    iid_gaussian_spec,
    information_denseness_profile,
    step_kld_mc,
    sv_spec,
    uniform_grid_1d,
)

# ---------------------------------------------------------------------------
# Linear Gaussian family: a worked value
# ---------------------------------------------------------------------------
star = GlmParams(np.zeros((2, 2)), np.eye(2), p=1, q=1)
wide = GlmParams(np.zeros((2, 2)), 2 * np.eye(2), p=1, q=1)
print("doubling the innovation covariance:")
print("  closed form:", delta_glm_closed(star, wide).value)
print("  exact value: (log 4 - 1)/2 =", 0.5 * (np.log(4) - 1))

est = step_kld_mc(glm_spec(star), glm_spec(wide), draws=200_000, seed=1)
print("  Monte Carlo:", round(est.value, 6), "+-", round(est.se, 6))

# ---------------------------------------------------------------------------
# Stochastic volatility: all five terms have closed-form moments
# ---------------------------------------------------------------------------
sv_star = SvParams(beta=1.0, sigma=0.5, phi=0.9)
sv_wide = SvParams(beta=2.0, sigma=0.5, phi=0.9)
print("\ndoubling the volatility scale:")
print("  closed form:", delta_sv_closed(sv_star, sv_wide).value)
print("  exact value: log 2 - 3/8 =", np.log(2) - 0.375)
est = step_kld_mc(sv_spec(sv_star), sv_spec(sv_wide), draws=200_000, seed=2)
print("  Monte Carlo:", round(est.value, 6), "+-", round(est.se, 6))

# ---------------------------------------------------------------------------
# The i.i.d. specialization collapses everything to the plain emission KLD
# ---------------------------------------------------------------------------
a = iid_gaussian_spec(0.0, 1.0)
b = iid_gaussian_spec(0.5, 1.3)
kl = gaussian_kl([0.0], [[1.0]], [0.5], [[1.69]])
print("\ni.i.d. specialization, exact KL:", round(kl, 6))
print("  transition functional:", round(step_kld_mc(a, b, draws=30_000, seed=3).value, 6))
print("  emission functional:  ", round(delta_bar_hmm(a, b, draws=30_000, seed=4).value, 6))

# ---------------------------------------------------------------------------
# Information denseness: prior mass near the reference parameter
# ---------------------------------------------------------------------------
grid = uniform_grid_1d(-0.9, 0.9, 181)
a_star = float(grid.points[140, 0])
ref = GlmParams(np.array([[a_star, 0.0], [a_star, 0.0]]), np.array([[1.0, 1.0], [1.0, 1.2]]), 1, 1)
divs = np.array(
    [delta_glm_closed(ref, GlmParams(np.array([[x, 0.0], [x, 0.0]]), ref.R, 1, 1)).value
     for x in grid.points[:, 0]]
)
print("\nprior mass within divergence thresholds (uniform prior, 181 cells):")
for row in information_denseness_profile(grid, divs, [1e-1, 1e-2, 1e-3, 0.0]):
    print(f"  delta={row.delta:>6g}: mass {row.prior_mass:.4f} {row.flag}")
