"""Conditionalization wrapper, CBP adjusted p-values, oracle rule."""

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from condmtp.conditional import (
    apply_procedure,
    cbp_adjusted_p,
    conditional_adjusted_p,
    conditionalize,
    oracle_cbp,
)
from condmtp.errors import DomainError
from condmtp.procedures import (
    ProcedureSpec,
    adjusted_pvalues,
    bonferroni,
    fgs_plugin,
    fisher_global,
    lr_chibar_global,
    sidak,
    step_procedure,
)
from condmtp.numkit import norm_ppf_vec

pvec_strategy = st.lists(
    st.floats(min_value=0.0, max_value=1.0, allow_nan=False), min_size=1,
    max_size=10).map(np.array)

_ALL_BASES = ("bonferroni", "sidak", "holm", "hochberg", "hommel", "bh",
              "fgs", "fisher", "lr")


def _spec(base, alpha=0.05):
    return ProcedureSpec(base, alpha)


class TestConditionalize:
    def test_hand_worked_example(self):
        res = conditionalize(_spec("bonferroni"), [0.01, 0.3, 0.6, 0.9], 0.5)
        assert list(res.decisions.decisions) == [True, False, False, False]
        assert list(res.kept_indices) == [0, 1]
        assert res.r_count == 2
        assert np.allclose(res.rescaled, [0.02, 0.6])

    def test_lambda_domain(self):
        with pytest.raises(DomainError):
            conditionalize(_spec("bonferroni"), [0.1], 0.0)
        with pytest.raises(DomainError):
            conditionalize(_spec("bonferroni"), [0.1], 1.5)

    def test_empty_kept_set_retains(self):
        res = conditionalize(_spec("bonferroni"), [0.7, 0.8, 0.9], 0.5)
        assert not res.decisions.decisions.any()
        assert res.r_count == 0

    def test_empty_kept_global_retains(self):
        res = conditionalize(_spec("fisher"), [0.7, 0.9], 0.5)
        assert res.global_result is not None
        assert not res.global_result.reject
        assert res.global_result.p_value == 1.0

    def test_tie_at_lambda_is_kept(self):
        res = conditionalize(_spec("bonferroni"), [0.5, 0.9], 0.5)
        assert list(res.kept_indices) == [0]

    @pytest.mark.parametrize("base", _ALL_BASES)
    def test_lambda_one_equals_base(self, base):
        rng = np.random.default_rng(hash(base) % 2**32)
        for _ in range(20):
            p = rng.uniform(0, 1, rng.integers(1, 9))
            res = conditionalize(_spec(base), p, 1.0)
            if base == "fisher":
                direct = fisher_global(p, 0.05)
                assert res.global_result.reject == direct.reject
                assert res.global_result.p_value == pytest.approx(
                    direct.p_value, rel=1e-9)
            elif base == "lr":
                z = norm_ppf_vec(np.clip(p, 1e-300, 1.0 - 1e-16))
                direct = lr_chibar_global(np.minimum(z, 0.0), 0.05)
                assert res.global_result.reject == direct.reject
            else:
                if base == "bonferroni":
                    direct = bonferroni(p, 0.05)
                elif base == "sidak":
                    direct = sidak(p, 0.05)
                elif base == "fgs":
                    direct = fgs_plugin(p, 0.05, 0.5)
                else:
                    direct = step_procedure(p, 0.05, base)
                assert np.array_equal(res.decisions.decisions,
                                      direct.decisions)

    def test_scale_identity(self):
        # decisions depend on discarded p-values only through their count
        rng = np.random.default_rng(77)
        for base in ("bonferroni", "holm", "fgs", "fisher"):
            p = np.array([0.01, 0.04, 0.3, 0.7, 0.95])
            q = p.copy()
            q[3], q[4] = 0.81, 0.66  # both still above lambda
            a = conditionalize(_spec(base), p, 0.5)
            b = conditionalize(_spec(base), q, 0.5)
            assert np.array_equal(a.decisions.decisions, b.decisions.decisions)
            if base == "fisher":
                assert a.global_result.reject == b.global_result.reject

    def test_containment(self):
        rng = np.random.default_rng(78)
        for _ in range(50):
            p = rng.uniform(0, 1, 8)
            lam = float(rng.uniform(0.2, 1.0))
            res = conditionalize(_spec("bonferroni"), p, lam)
            assert np.all(p[res.decisions.decisions] <= lam)

    def test_cbp_subset_of_bonferroni_when_all_kept(self):
        rng = np.random.default_rng(79)
        for _ in range(50):
            lam = float(rng.uniform(0.3, 0.9))
            p = rng.uniform(0, lam, 6)
            cbp = conditionalize(_spec("bonferroni"), p, lam).decisions.decisions
            bon = bonferroni(p, 0.05).decisions
            assert not (cbp & ~bon).any()

    def test_apply_procedure_dispatch(self):
        p = [0.001, 0.2, 0.9]
        plain = apply_procedure(ProcedureSpec("bonferroni", 0.05), p)
        cond = apply_procedure(ProcedureSpec("bonferroni", 0.05, 0.5), p)
        assert np.array_equal(plain.decisions.decisions,
                              bonferroni(p, 0.05).decisions)
        assert cond.r_count == 2


class TestCbpAdjustedP:
    def test_reported_survey_example(self):
        # m = 3003 values, 280 at or below 0.5, smallest 0.000243
        p = np.concatenate([[0.000243], np.linspace(0.01, 0.5, 279),
                            np.linspace(0.51, 0.999, 3003 - 280)])
        adj = cbp_adjusted_p(p, 0.5)
        assert adj[0] == pytest.approx(0.000243 * 280 / 0.5)
        assert round(float(adj[0]), 2) == 0.14
        bon = adjusted_pvalues(p, "bonferroni")
        assert round(float(bon[0]), 2) == 0.73

    def test_lambda_one_is_bonferroni(self):
        p = np.array([0.001, 0.2, 0.31])
        assert np.allclose(cbp_adjusted_p(p, 1.0), np.minimum(p * 3, 1.0))

    def test_direct_evaluation(self):
        assert np.allclose(cbp_adjusted_p([0.2, 0.8], 0.5), [0.4, 1.0])

    def test_discarded_get_one(self):
        adj = cbp_adjusted_p([0.1, 0.51], 0.5)
        assert adj[1] == 1.0

    @given(pvec_strategy, st.floats(min_value=0.05, max_value=1.0),
           st.floats(min_value=0.01, max_value=0.5))
    @settings(max_examples=80, deadline=None)
    def test_consistency_with_decisions(self, p, lam, alpha):
        adj = cbp_adjusted_p(p, lam)
        dec = conditionalize(ProcedureSpec("bonferroni", alpha), p,
                             lam).decisions.decisions
        kept = p <= lam
        r = max(int(kept.sum()), 1)
        # ignore knife-edge inputs where float rounding of p*r/lam vs
        # alpha*lam/r could legitimately differ
        assume(np.all(np.abs(p * r / lam - alpha) > 1e-9))
        assert np.array_equal(adj < alpha, dec)

    def test_adjusted_in_unit_interval(self):
        rng = np.random.default_rng(80)
        for _ in range(30):
            p = rng.uniform(0, 1, 12)
            adj = cbp_adjusted_p(p, float(rng.uniform(0.1, 1.0)))
            assert adj.min() >= 0.0 and adj.max() <= 1.0

    def test_conditional_adjusted_other_bases(self):
        p = np.array([0.003, 0.2, 0.6, 0.9])
        adj = conditional_adjusted_p(p, "holm", 0.5)
        kept_adj = adjusted_pvalues(p[:2] / 0.5, "holm")
        assert np.allclose(adj[:2], kept_adj)
        assert adj[2] == adj[3] == 1.0


class TestOracleCbp:
    def test_reduces_to_bonferroni(self):
        p = np.array([0.004, 0.012, 0.4])
        got = oracle_cbp(p, 1.0, 3.0, 0.05).decisions
        want = p <= 0.05 / 3
        assert np.array_equal(got, want)

    def test_direct_example(self):
        dec = oracle_cbp([0.001, 0.3], 0.5, 1.2, 0.05)
        assert list(dec.decisions) == [True, False]

    def test_uniform_null_expectation(self):
        # E R = m * lam under uniformity recovers the alpha/m threshold
        m, lam = 8, 0.4
        p = np.linspace(0.001, 0.9, m)
        got = oracle_cbp(p, lam, m * lam, 0.05).decisions
        assert np.array_equal(got, p <= 0.05 / m)

    def test_domain(self):
        with pytest.raises(DomainError):
            oracle_cbp([0.1], 0.5, 0.0, 0.05)
        with pytest.raises(DomainError):
            oracle_cbp([0.1], 0.5, -1.0, 0.05)
