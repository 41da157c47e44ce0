"""The conditionalization wrapper, CBP adjusted p-values, and the oracle rule.

Conditionalizing at threshold lam means: hypotheses with p_i > lam are
retained outright, the survivors are rescaled to p_i / lam, and the base
procedure runs on that sub-vector at the same alpha.  Ties p_i == lam are
kept.  lam = 1 reduces every conditionalized procedure to its base.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .numkit import norm_ppf_vec
from .procedures import (
    DecisionVector,
    GlobalTestResult,
    ProcedureSpec,
    STEP_KINDS,
    adjusted_pvalues,
    bonferroni,
    fgs_plugin,
    fisher_global,
    lr_chibar_global,
    sidak,
    step_procedure,
    _check_alpha,
    _values,
)


@dataclass(frozen=True)
class ConditionalizedResult:
    """Outcome of running a conditionalized procedure.

    ``decisions`` is aligned with the input vector; indices not kept are
    always retained.  For global bases the per-hypothesis decisions are all
    retain and ``global_result`` carries the intersection decision computed
    on the kept rescaled sub-vector (empty sub-vector: retain).
    """

    decisions: DecisionVector
    kept_indices: np.ndarray
    r_count: int
    rescaled: np.ndarray
    global_result: GlobalTestResult | None = None


def _check_lambda(lam: float) -> None:
    if not (0.0 < lam <= 1.0):
        raise DomainError(f"lambda must be in (0,1], got {lam!r}")


def conditionalize(base: ProcedureSpec, p, lam: float) -> ConditionalizedResult:
    """Run the conditionalized version of ``base`` on ``p`` at threshold lam."""
    v = _values(p)
    _check_lambda(lam)
    kept = np.flatnonzero(v <= lam)
    rescaled = v[kept] / lam
    decisions = np.zeros(v.size, dtype=bool)

    if base.is_global:
        if kept.size == 0:
            gres = GlobalTestResult(0.0, 1.0, False)
        elif base.base == "fisher":
            gres = fisher_global(rescaled, base.alpha)
        else:
            # the LR statistic needs z-scale statistics; map the rescaled
            # p-values back through the normal quantile (p' = 1 keeps z at
            # +inf, which contributes nothing to the statistic)
            z = np.full(kept.size, np.inf)
            z[rescaled == 0.0] = -np.inf
            inner = (rescaled > 0.0) & (rescaled < 1.0)
            if inner.any():
                z[inner] = norm_ppf_vec(rescaled[inner])
            gres = lr_chibar_global(np.minimum(z, 0.0), base.alpha)
        return ConditionalizedResult(DecisionVector(decisions), kept, kept.size,
                                     rescaled, gres)

    if kept.size:
        sub = _apply_per_hypothesis(base, rescaled)
        decisions[kept] = sub.decisions
    return ConditionalizedResult(DecisionVector(decisions), kept, kept.size,
                                 rescaled, None)


def _apply_per_hypothesis(spec: ProcedureSpec, values: np.ndarray) -> DecisionVector:
    if spec.base == "bonferroni":
        return bonferroni(values, spec.alpha)
    if spec.base == "sidak":
        return sidak(values, spec.alpha)
    if spec.base == "fgs":
        return fgs_plugin(values, spec.alpha, spec.lambda0)
    if spec.base in STEP_KINDS:
        return step_procedure(values, spec.alpha, spec.base)
    raise DomainError(f"not a per-hypothesis procedure: {spec.base!r}")


def apply_procedure(spec: ProcedureSpec, p) -> ConditionalizedResult:
    """Dispatch a ProcedureSpec, conditionalized when spec.lam is set.

    Plain procedures are routed through conditionalize at lam = 1, which is
    an exact no-op rescale, so there is a single code path.
    """
    lam = 1.0 if spec.lam is None else spec.lam
    return conditionalize(spec, p, lam)


def cbp_adjusted_p(p, lam: float) -> np.ndarray:
    """Adjusted p-values of the conditionalized Bonferroni procedure.

    Kept indices get min(1, p_i * (R or 1) / lam); discarded ones get 1.
    Rejection at level alpha is exactly ``adjusted < alpha``.
    """
    v = _values(p)
    _check_lambda(lam)
    kept = v <= lam
    r = max(int(kept.sum()), 1)
    out = np.ones_like(v)
    out[kept] = np.minimum(v[kept] * r / lam, 1.0)
    return out


def conditional_adjusted_p(p, base: str, lam: float,
                           lambda0: float = 0.5) -> np.ndarray:
    """Adjusted p-values of any conditionalized per-hypothesis procedure.

    The base adjustment runs on the rescaled kept sub-vector and is scattered
    back; discarded hypotheses get adjusted p = 1.
    """
    v = _values(p)
    _check_lambda(lam)
    kept = np.flatnonzero(v <= lam)
    out = np.ones_like(v)
    if kept.size:
        out[kept] = adjusted_pvalues(v[kept] / lam, base, lambda0)
    return out


def oracle_cbp(p, lam: float, expected_r: float, alpha: float) -> DecisionVector:
    """Oracle variant: reject H_i iff p_i <= lam * alpha / E[R(lam)]."""
    v = _values(p)
    _check_lambda(lam)
    _check_alpha(alpha)
    if not expected_r > 0.0:
        raise DomainError(f"expected_r must be positive, got {expected_r!r}")
    return DecisionVector(v <= lam * alpha / expected_r)
