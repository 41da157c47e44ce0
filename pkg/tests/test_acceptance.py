"""Acceptance suite: one check per criterion, each with its stated tolerance.

Every test prints a PASS/FAIL line into the terminal summary (see conftest).
"""

import math
import time

import numpy as np
import pytest

import condmtp.simkit as sk
from condmtp import _kernels
from condmtp.conditional import cbp_adjusted_p, conditionalize
from condmtp.criteria import (
    IntegralCriterionParams,
    binom_inv_expect,
    exact_bivariate_fwer,
    integral_criterion,
    region_grid,
)
from condmtp.numkit import std_normal_cdf, std_normal_quantile
from condmtp.procedures import (
    ProcedureSpec,
    adjusted_pvalues,
    bonferroni,
    fgs_plugin,
    sidak,
    step_procedure,
)
from condmtp.simkit import (
    CorrelationModel,
    SimulationScenario,
    binomial_sf,
    estimate_rate,
    gen_nonneg_corr_matrix,
    run_scenario,
    scenario_fig1,
    scenario_pairwise,
)

from conftest import acceptance_lines


def _report(num: int, description: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    suffix = f"  [{detail}]" if detail else ""
    acceptance_lines.append(f"{status}  criterion {num}: {description}{suffix}")
    assert ok, f"criterion {num}: {description} {suffix}"


def test_criterion_1_counterexample_rate():
    start = time.perf_counter()
    scn = SimulationScenario(
        m=2, noncentralities=[0.0, 0.0], n=1,
        correlation=CorrelationModel.antithetic_pair(),
        truth_mask=[True, True],
        procedures=(ProcedureSpec("bonferroni", 0.10, 0.75),),
        replications=200_000, master_seed=20_260_401)
    est = estimate_rate(scn, scn.procedures[0], "fwer")
    elapsed = time.perf_counter() - start
    ok = abs(est.estimate - 0.15) <= 0.004 and elapsed < 5.0
    _report(1, "antithetic pair FWER equals 2*lambda*alpha", ok,
            f"estimate {est.estimate:.5f} vs 0.15, {elapsed:.2f}s")


def test_criterion_2_reported_adjusted_pvalues():
    values = np.concatenate([[0.000243], np.linspace(0.01, 0.5, 279),
                             np.linspace(0.51, 0.999, 3003 - 280)])
    assert int((values <= 0.5).sum()) == 280
    cbp = float(cbp_adjusted_p(values, 0.5).min())
    bonf = float(adjusted_pvalues(values, "bonferroni").min())
    ok = (cbp == pytest.approx(0.000243 * 280 / 0.5, rel=1e-12)
          and round(cbp, 2) == 0.14
          and bonf == pytest.approx(0.000243 * 3003, rel=1e-12)
          and round(bonf, 2) == 0.73)
    _report(2, "survey-example adjusted p-values (0.14 CBP, 0.73 Bonferroni)",
            ok, f"cbp {cbp:.4f}, bonferroni {bonf:.4f}")


def test_criterion_3_integral_criterion_boundary():
    start = time.perf_counter()
    rhos = [0.05 * i for i in range(20)]          # 0 .. 0.95
    lams = [0.05 * i for i in range(1, 21)]       # 0.05 .. 1.0
    holds_everywhere = True
    worst = -math.inf
    for rho in rhos:
        for lam in lams:
            value, holds = integral_criterion(
                IntegralCriterionParams(0.368, lam, rho))
            worst = max(worst, value - 1.0 / lam)
            holds_everywhere = holds_everywhere and holds
    _, violated = integral_criterion(IntegralCriterionParams(0.7, 0.9, 0.2))
    elapsed = time.perf_counter() - start
    ok = holds_everywhere and not violated and elapsed < 10.0
    _report(3, "integral criterion holds at alpha=0.368, violated at "
               "(0.7, 0.9, 0.2)", ok,
            f"worst margin {worst:.2e}, {elapsed:.2f}s")


def test_criterion_4_exact_bivariate_fwer():
    worst = -math.inf
    for rho in (0.0, 0.25, 0.5, 0.75, 0.95):
        for lam in (0.6, 0.75, 0.9):
            for alpha in (0.05, 0.1):
                worst = max(worst,
                            exact_bivariate_fwer(alpha, lam, rho) - alpha)
    grid_ok = worst <= 1e-8

    rng = np.random.default_rng(909)
    mc_ok = True
    max_z = 0.0
    for trial in range(10):
        alpha = float(rng.uniform(0.02, 0.3))
        lam = float(rng.uniform(0.3, 0.95))
        rho = float(rng.uniform(0.0, 0.9))
        exact = exact_bivariate_fwer(alpha, lam, rho)
        model = (CorrelationModel.equicorrelated(rho) if rho > 0
                 else CorrelationModel.independent())
        scn = SimulationScenario(
            m=2, noncentralities=[0.0, 0.0], n=1, correlation=model,
            truth_mask=[True, True],
            procedures=(ProcedureSpec("bonferroni", alpha, lam),),
            replications=200_000, master_seed=20_260_404 + trial)
        est = estimate_rate(scn, scn.procedures[0], "fwer")
        se = max(est.std_error,
                 math.sqrt(exact * (1 - exact) / est.replications))
        z = abs(est.estimate - exact) / se
        max_z = max(max_z, z)
        mc_ok = mc_ok and z <= 3.0
    _report(4, "exact bivariate FWER <= alpha on the rho >= 0 grid and "
               "matches Monte Carlo", grid_ok and mc_ok,
            f"worst grid margin {worst:.2e}, max |z| {max_z:.2f}")


def test_criterion_5_inverse_binomial_identity():
    start = time.perf_counter()
    ps = [0.01] + [0.1 * k for k in range(1, 10)] + [0.99]
    worst = 0.0
    for n in range(0, 51):
        for p in ps:
            brute = sum(math.comb(n, k) * p ** k * (1 - p) ** (n - k) / (k + 1)
                        for k in range(n + 1))
            worst = max(worst, abs(binom_inv_expect(n, p) - brute))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-12 and elapsed < 1.0
    _report(5, "closed-form inverse-binomial mean equals brute-force sum",
            ok, f"worst abs diff {worst:.2e}, {elapsed:.2f}s")


def test_criterion_6_fwer_grid_no_significant_exceedance():
    start = time.perf_counter()
    alphas = np.array([0.05, 0.5, 0.95])
    lams = np.array([0.1, 0.5, 0.9])
    backend = _kernels.get_backend()
    reps = 10_000
    flagged = []
    for m in (2, 5, 10, 25):
        for mat_seed in range(20):
            corr = gen_nonneg_corr_matrix(m, 1000 * m + mat_seed)
            scn = SimulationScenario(
                m=m, noncentralities=np.zeros(m), n=1,
                correlation=CorrelationModel.explicit(corr),
                truth_mask=np.ones(m, dtype=bool),
                procedures=(ProcedureSpec("bonferroni", 0.05, 0.5),),
                replications=reps,
                master_seed=777_000 + 100 * m + mat_seed)
            x = sk._sample_block(scn, 0, reps)
            p = sk._pvalues_from_stats(scn, x)
            counts = backend["cbp_grid_counts"](p, scn.truth_mask, alphas, lams)
            for ai, alpha in enumerate(alphas):
                for li, lam in enumerate(lams):
                    tail = binomial_sf(int(counts[ai, li]), reps, float(alpha))
                    if tail <= 0.05:
                        flagged.append((m, mat_seed, float(alpha), float(lam)))
    elapsed = time.perf_counter() - start
    ok = not flagged and elapsed < 300.0
    _report(6, "CBP FWER grid over generated nonnegative correlation "
               "matrices shows no significant exceedance", ok,
            f"720 cells, flagged {flagged}, {elapsed:.1f}s")


def test_criterion_7_power_study_ordering():
    start = time.perf_counter()
    results = {}
    for m_true in (5, 50, 200):
        scn = scenario_fig1(m_true, replications=10_000,
                            master_seed=20_260_101)
        results[m_true] = {s.label(): e for s, e in
                           run_scenario(scn, rate_kinds=["power"])}

    decreasing = all(
        results[5][b].estimate > results[50][b].estimate >
        results[200][b].estimate
        for b in ("bonferroni", "sidak", "fgs"))

    gains_ok = True
    for b in ("bonferroni", "sidak", "fgs"):
        cond, plain = results[200]["cond:" + b], results[200][b]
        combined = math.hypot(cond.std_error, plain.std_error)
        gains_ok = gains_ok and (cond.estimate - plain.estimate > 5 * combined)

    cond_at_200 = {b: results[200]["cond:" + b].estimate
                   for b in ("bonferroni", "sidak", "fgs")}
    fgs_highest = cond_at_200["fgs"] == max(cond_at_200.values())

    elapsed = time.perf_counter() - start
    ok = decreasing and gains_ok and fgs_highest
    _report(7, "power-versus-true-count ordering: plain decays, "
               "conditional gains > 5 SE, conditional plug-in highest", ok,
            f"cond at 200: {({k: round(v, 4) for k, v in cond_at_200.items()})}, "
            f"{elapsed:.1f}s")


def test_criterion_8_pairwise_null_point():
    scn = scenario_pairwise(5, 0.0, replications=10_000,
                            master_seed=20_260_103)
    rows = run_scenario(scn, rate_kinds=["fwer"])
    details = []
    ok = True
    for spec, est in rows:
        limit = 0.05 + 3 * max(est.std_error,
                               math.sqrt(0.05 * 0.95 / est.replications))
        ok = ok and est.estimate <= limit
        details.append(f"{spec.label()}={est.estimate:.4f}")
    _report(8, "all four pairwise procedures keep FWER below alpha at "
               "delta = 0", ok, ", ".join(details))


def test_criterion_9_property_bundle_under_time_budget():
    start = time.perf_counter()
    rng = np.random.default_rng(99)
    procs = [
        lambda p, a: bonferroni(p, a),
        lambda p, a: sidak(p, a),
        lambda p, a: fgs_plugin(p, a, 0.5),
        lambda p, a: step_procedure(p, a, "holm"),
        lambda p, a: step_procedure(p, a, "hochberg"),
        lambda p, a: step_procedure(p, a, "hommel"),
        lambda p, a: step_procedure(p, a, "bh"),
    ]

    # permutation equivariance and monotonicity
    for _ in range(40):
        m = int(rng.integers(1, 9))
        p = rng.uniform(0, 1, m)
        perm = rng.permutation(m)
        i = int(rng.integers(0, m))
        q = p.copy()
        q[i] = rng.uniform(0, p[i])
        for proc in procs:
            base = proc(p, 0.1).decisions
            assert np.array_equal(proc(p[perm], 0.1).decisions, base[perm])
            assert not (base & ~proc(q, 0.1).decisions).any()

    # lambda = 1 reduction
    for _ in range(20):
        p = rng.uniform(0, 1, 6)
        for base_name, direct in (("bonferroni", bonferroni(p, 0.05)),
                                  ("sidak", sidak(p, 0.05)),
                                  ("hommel", step_procedure(p, 0.05, "hommel"))):
            spec = ProcedureSpec(base_name, 0.05)
            res = conditionalize(spec, p, 1.0)
            assert np.array_equal(res.decisions.decisions, direct.decisions)

    # determinism under chunked execution
    scn = SimulationScenario(
        m=5, noncentralities=[-1, -1, 0.5, 0.5, 0.5], n=1,
        correlation=CorrelationModel.equicorrelated(0.3),
        truth_mask=[False, False, True, True, True],
        procedures=(ProcedureSpec("holm", 0.05, 0.5),),
        replications=2000, master_seed=99)
    ref = estimate_rate(scn, scn.procedures[0], "fwer")
    original = sk._chunk_size
    try:
        sk._chunk_size = lambda m: 111
        assert estimate_rate(scn, scn.procedures[0], "fwer") == ref
    finally:
        sk._chunk_size = original

    # normal CDF and quantile round-trip
    for p in np.linspace(1e-8, 1 - 1e-8, 1001):
        x = std_normal_quantile(float(p))
        assert abs(std_normal_cdf(x) - p) <= 1e-9

    # region coverage grid
    assert all(cell["covered"] for cell in region_grid(50))

    elapsed = time.perf_counter() - start
    ok = elapsed < 60.0
    _report(9, "property bundle (equivariance, monotonicity, reductions, "
               "determinism, round-trip, region coverage)", ok,
            f"{elapsed:.1f}s")
