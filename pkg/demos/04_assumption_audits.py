"""Numerically auditing the assumptions behind posterior consistency.

The stochastic volatility model has an unbounded parameter space, so the
posterior-tightness conditions need analytic envelopes; this script runs
every auditor and prints the resulting reports.
"""
import numpy as np

from pommkit import (
    FiniteHmmParams,
    Stationary,
    SvParams,
    SvThetaBox,
    b6_audit_sv,
    b6_jensen_floor_sv,
    conditional_entropy_sequence,
    envelope_validity_audit,
    finite_hmm_spec,
    finite_w_source,
    image_density_check,
    kingman_check,
    positivity_audit,
    project_observations,
    simulate_complete,
    sv_spec,
    tightness_audit_sv,
)
from pommkit.audit import b6_sufficient_integral_sv

STAR = SvParams(beta=1.0, sigma=0.3, phi=0.9)
BOX = SvThetaBox(beta_lo=0.1, sigma_lo=0.1, phi_hi=0.95, sigma_hi=2.5)
SEED = 20260808


def show(report):
    ci = "" if report.ci_lo is None else f"  ci [{report.ci_lo:.4f}, {report.ci_hi:.4f}]"
    print(f"  {report.assumption:<12} {report.status:<9} statistic {report.statistic:.6g}{ci}")
    print(f"      {report.detail}")


# ---------------------------------------------------------------------------
# Tightness over the non-compact parameter box
# ---------------------------------------------------------------------------
print("tightness audit (growing compact exhaustion):")
conv, logmom = tightness_audit_sv(STAR, BOX, m_list=[10.0, 100.0, 1000.0], sims=100_000, seed=SEED)
show(conv)
show(logmom)

print("\nenvelope validity (quadrature never exceeds the analytic bound):")
show(envelope_validity_audit(BOX, draws=2_000, seed=SEED))

# ---------------------------------------------------------------------------
# Prior integrability and the one-step entropy floor
# ---------------------------------------------------------------------------
print("\nprior-side conditions (proper prior):")
for rep in b6_audit_sv(STAR, BOX, proper_prior=True, draws=50_000, seed=SEED):
    show(rep)
floor, line = b6_jensen_floor_sv(STAR)
print(f"  Jensen floor {floor:.4f}; small-variance line {line:.4f}")

print("\nan improper flat prior on the box fails the integrability check:")
show(b6_sufficient_integral_sv(BOX, proper=False))

# ---------------------------------------------------------------------------
# Positivity of densities
# ---------------------------------------------------------------------------
print("\npositivity of the transition and emission densities:")
for rep in positivity_audit(sv_spec(STAR), seed=SEED):
    show(rep)

# ---------------------------------------------------------------------------
# Exact checks on the finite oracle family
# ---------------------------------------------------------------------------
rng = np.random.default_rng(5)
family = [FiniteHmmParams(rng.dirichlet(np.ones(2), size=2), rng.dirichlet(np.ones(2), size=2))
          for _ in range(5)]
spec = finite_hmm_spec(family[0])
obs = project_observations(simulate_complete(spec, Stationary(), 40, seed=SEED)).reshape(-1)

triples = []
while len(triples) < 100:
    r, s, t = sorted(rng.integers(0, 41, size=3))
    triples.append((int(r), int(s), int(t)))
print("\nsubadditivity of the sup-integrated blocks (exact on finite models):")
show(kingman_check(finite_w_source(family), obs, triples))

print("\npredictive entropy increments are non-decreasing (n = 1..10):")
seq = conditional_entropy_sequence(spec, 10)
print("  ", np.array2string(seq, precision=5))

print("\nconditional-expectation identity for likelihood ratios (n = 3):")
other = finite_hmm_spec(family[1])
print("  max residual over all observation strings:",
      f"{image_density_check(spec, other, Stationary(), n=3):.2e}")
