"""Acceptance criteria for the whole artifact.

Every criterion is exercised at its stated tolerance and prints one
pass/fail line (visible with ``pytest -s`` or on failure). Monte Carlo
comparisons use three standard errors plus a 1e-12 float-noise guard;
seeds are pinned so the suite is deterministic.
"""

from dataclasses import replace

import numpy as np
import pytest

from pommkit import (
    FiniteHmmParams,
    GlmParams,
    PointMass,
    Stationary,
    SvParams,
    SvThetaBox,
    bpf_loglik,
    b6_entropy_floor_sv,
    b6_jensen_floor_sv,
    delta_bar_hmm,
    delta_glm_closed,
    delta_sv_closed,
    enumeration_loglik,
    envelope_validity_audit,
    finite_hmm_spec,
    finite_w_source,
    forward_loglik,
    gaussian_kl,
    glm_spec,
    grid_posterior,
    iid_gaussian_spec,
    image_density_check,
    kalman_loglik,
    kingman_check,
    merging_curve,
    project_observations,
    quadrature_loglik,
    remoteness_rate,
    scalar_ssm,
    simulate_complete,
    step_kld_mc,
    sv_spec,
    tightness_audit_sv,
    uniform_grid_1d,
)
from pommkit.experiment import reference_config, run_experiment
from pommkit.posterior import ParamGrid, _normalize_log_mass

SEED = 20260808
SV_STAR = SvParams(beta=1.0, sigma=0.3, phi=0.9)
SV_BOX = SvThetaBox(beta_lo=0.1, sigma_lo=0.1, phi_hi=0.95, sigma_hi=2.5)


def report(num: int, ok: bool, text: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {num:2d}: {text}")
    assert ok, f"criterion {num}: {text}"


def within_3se(value, estimate, atol=1e-12):
    return abs(value - estimate.value) <= 3.0 * (estimate.se or 0.0) + atol


def random_finite(rng, K=2, L=2):
    return FiniteHmmParams(rng.dirichlet(np.ones(K), size=K), rng.dirichlet(np.ones(L), size=K))


@pytest.fixture(scope="module")
def reference_run():
    return run_experiment(reference_config())


@pytest.fixture(scope="module")
def long_observations():
    star = scalar_ssm(0.5, 1.0, 1.0, 0.2)
    obs = project_observations(simulate_complete(star, Stationary(), 2000, seed=SEED))
    return star, obs


def test_criterion_01_likelihood_oracle_equivalence():
    spec = scalar_ssm(0.5, 1.0, 1.0, 0.2)
    worst_kalman = 0.0
    for seed, n in ((1, 3), (2, 5), (3, 5)):
        ys = project_observations(simulate_complete(spec, Stationary(), n, seed=seed))
        k = kalman_loglik(spec, ys, Stationary()).value
        q = quadrature_loglik(spec, ys, Stationary(), nodes=2001).value
        worst_kalman = max(worst_kalman, abs(k - q))
    rng = np.random.default_rng(4)
    worst_forward = 0.0
    for _ in range(5):
        params = random_finite(rng, K=int(rng.integers(2, 4)), L=int(rng.integers(2, 4)))
        fspec = finite_hmm_spec(params)
        ys = rng.integers(0, params.n_symbols, size=10)
        f = forward_loglik(fspec, ys, Stationary()).value
        e = enumeration_loglik(fspec, ys, Stationary())
        worst_forward = max(worst_forward, abs(f - e))
    report(
        1,
        worst_kalman < 1e-6 and worst_forward < 1e-12,
        f"kalman=quadrature to {worst_kalman:.2e} (tol 1e-6); forward=enumeration to {worst_forward:.2e} (tol 1e-12)",
    )


def test_criterion_02_particle_filter_unbiasedness():
    spec = scalar_ssm(0.5, 1.0, 1.0, 0.2)
    ys = project_observations(simulate_complete(spec, Stationary(), 20, seed=SEED))
    exact = kalman_loglik(spec, ys, Stationary()).value
    ratios = np.array(
        [np.exp(bpf_loglik(spec, ys, Stationary(), particles=512, seed=SEED, stream=r).value - exact)
         for r in range(200)]
    )
    se = ratios.std(ddof=1) / np.sqrt(len(ratios))
    ok = abs(ratios.mean() - 1.0) <= 3.0 * se
    report(2, ok, f"mean likelihood ratio {ratios.mean():.4f} within 3 se ({se:.4f}) of 1")


def test_criterion_03_kld_closed_forms_match_monte_carlo():
    from tests.test_models import random_stable_glm

    rng = np.random.default_rng(5)
    ok_glm = True
    for i in range(20):
        star, other = random_stable_glm(rng), random_stable_glm(rng)
        est = step_kld_mc(glm_spec(star), glm_spec(other), draws=150_000, seed=1000 + i)
        ok_glm &= within_3se(delta_glm_closed(star, other).value, est)
    ok_sv = True
    for i in range(20):
        star = SvParams(rng.uniform(0.5, 2), rng.uniform(0.2, 1), rng.uniform(-0.9, 0.9))
        other = SvParams(rng.uniform(0.5, 2), rng.uniform(0.2, 1), rng.uniform(-0.9, 0.9))
        est = step_kld_mc(sv_spec(star), sv_spec(other), draws=150_000, seed=2000 + i)
        ok_sv &= within_3se(delta_sv_closed(star, other).value, est)
    glm0 = random_stable_glm(rng)
    sv0 = SvParams(1.3, 0.5, -0.4)
    ok_zero = delta_glm_closed(glm0, glm0).value == 0.0 and delta_sv_closed(sv0, sv0).value == 0.0
    worked = delta_glm_closed(
        GlmParams(np.zeros((2, 2)), np.eye(2), 1, 1), GlmParams(np.zeros((2, 2)), 2 * np.eye(2), 1, 1)
    ).value
    ok_worked = abs(worked - 0.5 * (np.log(4.0) - 1.0)) < 1e-12
    report(
        3,
        ok_glm and ok_sv and ok_zero and ok_worked,
        f"20+20 closed-vs-MC agreements (3 se); identity exact; worked value {worked:.5f}",
    )


def test_criterion_04_iid_collapse():
    star = iid_gaussian_spec(0.0, 1.0)
    other = iid_gaussian_spec(0.5, 1.3)
    exact = gaussian_kl([0.0], [[1.0]], [0.5], [[1.69]])
    full = step_kld_mc(star, other, draws=30_000, seed=6)
    emission = delta_bar_hmm(star, other, draws=30_000, seed=7)
    ok = within_3se(exact, full) and within_3se(exact, emission)
    report(4, ok, f"transition {full.value:.4f} and emission {emission.value:.4f} match KL {exact:.4f} (3 se)")


def _mass_outside(result, p=5):
    return [row.mass_outside for row in result.concentration if row.p == p]


def test_criterion_05_posterior_concentration(reference_run):
    masses = _mass_outside(reference_run)
    ok = masses[0] > masses[1] > masses[2] and masses[2] < 0.05
    report(5, ok, "mass outside radius 0.2 over n=100,400,1600: " + ", ".join(f"{m:.5f}" for m in masses))


def test_criterion_06_non_stationary_initialization(reference_run):
    cfg = replace(reference_config(), init_true="pointmass 4.0 4.0")
    shifted = run_experiment(cfg)
    m_ref = _mass_outside(reference_run)[-1]
    m_pm = _mass_outside(shifted)[-1]
    masses = _mass_outside(shifted)
    ok = abs(m_ref - m_pm) < 0.02 and masses[0] > masses[1] > masses[2]
    report(6, ok, f"final masses: stationary {m_ref:.2e} vs displaced start {m_pm:.2e} (tol 0.02)")


def test_criterion_07_merging_of_initial_laws(long_observations):
    star, obs = long_observations
    curve = merging_curve(star, obs, PointMass(4.0, 4.0))
    ok = abs(curve[-1]) <= 0.01
    report(7, ok, f"normalized log ratio at n=2000: {curve[-1]:+.5f} (tol 0.01)")


def test_criterion_08_remoteness_rates(long_observations):
    star, obs = long_observations
    grid = uniform_grid_1d(-0.9, 0.9, 181)
    specs = [scalar_ssm(float(a), 1.0, 1.0, 0.2) for a in grid.points[:, 0]]
    mask_far = np.abs(grid.points[:, 0] - 0.5) >= 0.5
    ns = list(range(100, 2001, 100))
    far = remoteness_rate(specs, grid, mask_far, obs, Stationary(), star, ns)
    deltas = np.array([delta_glm_closed(star.glm, s.glm).value for s in specs])
    threshold = -0.5 * deltas[mask_far].min()
    whole = remoteness_rate(specs, grid, np.ones(len(grid), bool), obs, Stationary(), star, ns)
    ok = far.slope < 0.0 and far.slope <= threshold and whole.slope >= -0.01
    report(
        8,
        ok,
        f"far-set slope {far.slope:.4f} <= {threshold:.4f}; set containing the truth: {whole.slope:+.5f} >= -0.01",
    )


def test_criterion_09_likelihood_ratio_identity():
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(20):
        star = finite_hmm_spec(random_finite(rng))
        other = finite_hmm_spec(random_finite(rng))
        worst = max(worst, image_density_check(star, other, Stationary(), n=3))
    report(9, worst < 1e-12, f"max identity residual over 20 random pairs: {worst:.2e} (tol 1e-12)")


def test_criterion_10_kingman_subadditivity():
    rng = np.random.default_rng(9)
    family = [random_finite(rng) for _ in range(5)]
    spec = finite_hmm_spec(family[0])
    obs = project_observations(simulate_complete(spec, Stationary(), 40, seed=SEED)).reshape(-1)
    w = finite_w_source(family)
    triples = []
    while len(triples) < 100:
        r, s, t = sorted(rng.integers(0, 41, size=3))
        triples.append((int(r), int(s), int(t)))
    rep = kingman_check(w, obs, triples)
    report(10, rep.status == "pass", f"worst relative violation over 100 triples: {rep.statistic:.2e} (tol 1e-12)")


def test_criterion_11_entropy_rate_monotonicity():
    from pommkit import conditional_entropy_sequence

    rng = np.random.default_rng(10)
    worst = np.inf
    for _ in range(20):
        spec = finite_hmm_spec(random_finite(rng, K=int(rng.integers(2, 4)), L=2))
        seq = conditional_entropy_sequence(spec, 10)
        worst = min(worst, np.diff(seq).min())
    report(11, worst >= -1e-12, f"smallest predictive-entropy increment over 20 models: {worst:.2e}")


def test_criterion_12_sv_tightness_and_entropy_floor():
    conv, logmom = tightness_audit_sv(SV_STAR, SV_BOX, [10.0, 100.0, 1000.0], sims=100_000, seed=SEED)
    ok_conv = conv.statistic < 1e-6
    floor_rep = b6_entropy_floor_sv(SV_STAR, draws=100_000, seed=SEED)
    floor, joint_line = b6_jensen_floor_sv(SV_STAR)
    se = (floor_rep.ci_hi - floor_rep.ci_lo) / (2 * 1.96)
    ok_floor = floor_rep.statistic >= floor - 3 * se and np.isfinite(logmom.statistic)
    env = envelope_validity_audit(SV_BOX, draws=10_000, seed=SEED)
    ok_env = env.status == "pass" and env.statistic <= 1e-9
    report(
        12,
        ok_conv and ok_floor and ok_env,
        f"psup envelope max {conv.statistic:.2e} at m=1000 (tol 1e-6); "
        f"E[log p(Y1)] {floor_rep.statistic:.4f} >= Jensen floor {floor:.4f} - 3 se "
        f"(stated small-variance line {joint_line:.4f}); envelope excess {env.statistic:.2e} (tol 1e-9)",
    )


def test_criterion_13_posterior_structural_invariances():
    rng = np.random.default_rng(11)
    params = [random_finite(rng, K=2, L=2) for _ in range(3)]
    specs = [finite_hmm_spec(p) for p in params]
    grid = ParamGrid(np.arange(3.0)[:, None], np.array([0.2, 0.5, 0.3]))
    ys = rng.integers(0, 2, size=6)
    post = grid_posterior(specs, grid, ys, Stationary(), "forward")
    ok_norm = abs(post.masses().sum() - 1.0) < 1e-10

    scaled = ParamGrid(grid.points, 7.0 * grid.prior_weight, grid.cell_volume)
    post_scaled = grid_posterior(specs, scaled, ys, Stationary(), "forward")
    ok_rescale = np.max(np.abs(post.log_mass - post_scaled.log_mass)) < 1e-12

    with np.errstate(divide="ignore"):
        log_prior = np.log(grid.prior_weight)
    lls = np.array([forward_loglik(s, ys, Stationary()).value for s in specs])
    shifted = _normalize_log_mass(log_prior + (lls + 777.0), len(ys), grid)
    ok_shift = np.max(np.abs(post.log_mass - shifted.log_mass)) < 1e-12

    liks = np.array([np.exp(enumeration_loglik(s, ys, Stationary())) for s in specs])
    brute = grid.prior_weight * liks
    brute /= brute.sum()
    ok_brute = np.max(np.abs(post.masses() - brute)) < 1e-12
    report(
        13,
        ok_norm and ok_rescale and ok_shift and ok_brute,
        "normalization 1e-10; rescaling and shift invariance 1e-12; brute-force Bayes 1e-12",
    )
