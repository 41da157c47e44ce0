"""Base multiple testing procedures and global (intersection) tests.

Per-hypothesis procedures map a p-value vector to reject/retain decisions;
global tests return a single decision about the intersection null.  Threshold
procedures (Bonferroni, Sidak, FGS plug-in) reject on strict ``<``; step
procedures use the conventional ``<=`` on sorted comparisons, implemented via
adjusted p-values so that ``decision == (adjusted <= alpha)`` holds exactly.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .numkit import chi_square_sf

PER_HYPOTHESIS_BASES = ("bonferroni", "sidak", "holm", "hochberg", "hommel",
                        "bh", "fgs")
GLOBAL_BASES = ("fisher", "lr")
STEP_KINDS = ("holm", "hochberg", "hommel", "bh")

_ALIASES = {
    "bonferroni": "bonferroni", "sidak": "sidak", "holm": "holm",
    "hochberg": "hochberg", "hommel": "hommel", "bh": "bh",
    "benjamini-hochberg": "bh", "fgs": "fgs", "fgsplugin": "fgs",
    "fgs_plugin": "fgs", "fisher": "fisher", "fisherglobal": "fisher",
    "fisher_global": "fisher", "lr": "lr", "lrchibar": "lr",
    "lr_chibar": "lr", "lrchibarglobal": "lr", "chibar": "lr",
}


def canonical_base(name: str) -> str:
    key = name.strip().lower()
    if key not in _ALIASES:
        raise DomainError(f"unknown procedure {name!r}")
    return _ALIASES[key]


# ----------------------------------------------------------------------
# Domain types
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class PValueVector:
    """Ordered p-values with an optional truth mask.

    ``truth_mask[i]`` is True when the i-th null hypothesis is true.
    """

    values: np.ndarray
    truth_mask: np.ndarray | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1:
            raise DomainError("p-values must form a one-dimensional vector")
        if v.size and (np.isnan(v).any() or v.min() < 0.0 or v.max() > 1.0):
            raise DomainError("p-values must lie in [0, 1]")
        object.__setattr__(self, "values", v)
        if self.truth_mask is not None:
            t = np.asarray(self.truth_mask, dtype=bool)
            if t.shape != v.shape:
                raise DomainError("truth mask length must match values length")
            object.__setattr__(self, "truth_mask", t)

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class DecisionVector:
    """Per-hypothesis decisions aligned with the input vector (True = reject)."""

    decisions: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "decisions",
                           np.asarray(self.decisions, dtype=bool))

    def __len__(self) -> int:
        return self.decisions.size

    def n_rejected(self) -> int:
        return int(self.decisions.sum())


@dataclass(frozen=True)
class GlobalTestResult:
    """Outcome of an intersection test; reject iff p_value <= alpha."""

    statistic: float
    p_value: float
    reject: bool


@dataclass(frozen=True)
class ProcedureSpec:
    """A base procedure plus its parameters.

    ``lam`` set means the conditionalized variant (discard p > lam, rescale
    by 1/lam, run the base on the survivors); ``lam=None`` is the plain
    procedure.  ``lambda0`` only matters for the FGS plug-in.
    """

    base: str
    alpha: float
    lam: float | None = None
    lambda0: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "base", canonical_base(self.base))
        if not (0.0 < self.alpha < 1.0):
            raise DomainError(f"alpha must be in (0,1), got {self.alpha!r}")
        if self.lam is not None and not (0.0 < self.lam <= 1.0):
            raise DomainError(f"lambda must be in (0,1], got {self.lam!r}")
        if not (0.0 < self.lambda0 < 1.0):
            raise DomainError(f"lambda0 must be in (0,1), got {self.lambda0!r}")

    @property
    def is_global(self) -> bool:
        return self.base in GLOBAL_BASES

    def label(self) -> str:
        return self.base if self.lam is None else f"cond:{self.base}"


def _values(p) -> np.ndarray:
    if not isinstance(p, PValueVector):
        p = PValueVector(np.asarray(p, dtype=np.float64))
    if len(p) == 0:
        raise DomainError("empty p-value vector")
    return p.values


def _check_alpha(alpha: float) -> None:
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must be in (0,1), got {alpha!r}")


# ----------------------------------------------------------------------
# Threshold procedures (strict <)
# ----------------------------------------------------------------------

def bonferroni(p, alpha: float) -> DecisionVector:
    """Reject H_i iff p_i < alpha / m."""
    v = _values(p)
    _check_alpha(alpha)
    return DecisionVector(v < alpha / v.size)


def sidak(p, alpha: float) -> DecisionVector:
    """Reject H_i iff p_i < 1 - (1-alpha)^(1/m)."""
    v = _values(p)
    _check_alpha(alpha)
    thr = -math.expm1(math.log1p(-alpha) / v.size)
    return DecisionVector(v < thr)


def fgs_estimate_m0(v: np.ndarray, lambda0: float) -> float:
    """Plug-in null-count estimate (m - #{p <= lambda0} + 1) / (1 - lambda0)."""
    return (v.size - int((v <= lambda0).sum()) + 1) / (1.0 - lambda0)


def fgs_plugin(p, alpha: float, lambda0: float = 0.5) -> DecisionVector:
    """Bonferroni plug-in: reject H_i iff p_i < alpha / m0_hat."""
    v = _values(p)
    _check_alpha(alpha)
    if not (0.0 < lambda0 < 1.0):
        raise DomainError(f"lambda0 must be in (0,1), got {lambda0!r}")
    m0 = fgs_estimate_m0(v, lambda0)
    return DecisionVector(v < alpha / m0)


# ----------------------------------------------------------------------
# Step procedures via adjusted p-values (decisions: adjusted <= alpha)
# ----------------------------------------------------------------------

def _holm_adj_sorted(ps: np.ndarray) -> np.ndarray:
    m = ps.size
    vals = (m - np.arange(m)) * ps
    return np.minimum(np.maximum.accumulate(vals), 1.0)


def _hochberg_adj_sorted(ps: np.ndarray) -> np.ndarray:
    m = ps.size
    vals = (m - np.arange(m)) * ps
    return np.minimum(np.minimum.accumulate(vals[::-1])[::-1], 1.0)


def _bh_adj_sorted(ps: np.ndarray) -> np.ndarray:
    m = ps.size
    vals = m * ps / np.arange(1, m + 1)
    return np.minimum(np.minimum.accumulate(vals[::-1])[::-1], 1.0)


def _hommel_adj_sorted(ps: np.ndarray) -> np.ndarray:
    # Closed-testing shortcut with Simes local tests (quadratic time).
    m = ps.size
    if m == 1:
        return ps.copy()
    q = np.full(m, np.min(m * ps / np.arange(1, m + 1)))
    pa = q.copy()
    for mm in range(m - 1, 1, -1):
        cut = m - mm + 1
        q1 = np.min(mm * ps[cut:] / np.arange(2, mm + 1))
        q[:cut] = np.minimum(mm * ps[:cut], q1)
        q[cut:] = q[cut - 1]
        pa = np.maximum(pa, q)
    return np.minimum(np.maximum(pa, ps), 1.0)


_ADJ_SORTED = {
    "holm": _holm_adj_sorted,
    "hochberg": _hochberg_adj_sorted,
    "bh": _bh_adj_sorted,
    "hommel": _hommel_adj_sorted,
}


def step_adjusted(p, kind: str) -> np.ndarray:
    """Adjusted p-values for a step procedure, in the input order."""
    v = _values(p)
    kind = canonical_base(kind)
    if kind not in STEP_KINDS:
        raise DomainError(f"not a step procedure: {kind!r}")
    order = np.argsort(v, kind="stable")
    adj_sorted = _ADJ_SORTED[kind](v[order])
    out = np.empty_like(v)
    out[order] = adj_sorted
    return out


def step_procedure(p, alpha: float, kind: str) -> DecisionVector:
    """Holm / Hochberg / Hommel / Benjamini-Hochberg decisions at level alpha."""
    _check_alpha(alpha)
    return DecisionVector(step_adjusted(p, kind) <= alpha)


def adjusted_pvalues(p, base: str, lambda0: float = 0.5) -> np.ndarray:
    """Adjusted p-values for any per-hypothesis base procedure.

    Threshold procedures reject at level alpha iff adjusted < alpha; step
    procedures iff adjusted <= alpha.
    """
    v = _values(p)
    base = canonical_base(base)
    if base == "bonferroni":
        return np.minimum(v * v.size, 1.0)
    if base == "sidak":
        return -np.expm1(np.log1p(-v) * v.size)
    if base == "fgs":
        return np.minimum(v * fgs_estimate_m0(v, lambda0), 1.0)
    if base in STEP_KINDS:
        return step_adjusted(v, base)
    raise DomainError(f"no per-hypothesis adjustment for {base!r}")


# ----------------------------------------------------------------------
# Global tests
# ----------------------------------------------------------------------

def fisher_global(p, alpha: float) -> GlobalTestResult:
    """Fisher combination: F = -2 sum log p_i against ChiSq(2m).

    A zero p-value saturates the statistic to +inf (p-value 0, reject);
    this is documented behaviour, not an error.
    """
    v = _values(p)
    _check_alpha(alpha)
    if (v == 0.0).any():
        return GlobalTestResult(math.inf, 0.0, True)
    stat = -2.0 * float(np.log(v).sum())
    pv = chi_square_sf(stat, 2 * v.size)
    return GlobalTestResult(stat, pv, pv <= alpha)


def chi_square_sf_ladder(t: float, max_df: int) -> np.ndarray:
    """Q(t; df) for every integer df in 0..max_df via the upward recurrence."""
    out = np.empty(max_df + 1)
    out[0] = 1.0 if t <= 0.0 else 0.0
    h = 0.5 * t
    eh = math.exp(-h)
    if max_df >= 1:
        out[1] = math.erfc(math.sqrt(h))
    if max_df >= 2:
        out[2] = eh
    term_odd = 2.0 * math.sqrt(h) * eh / math.sqrt(math.pi)  # bridges df 1 -> 3
    term_even = h * eh                                        # bridges df 2 -> 4
    for k in range(3, max_df + 1):
        if k % 2:
            out[k] = out[k - 2] + term_odd
            term_odd *= h / (0.5 * (k - 2) + 1.0)
        else:
            out[k] = out[k - 2] + term_even
            term_even *= h / (0.5 * (k - 2) + 1.0)
    return np.clip(out, 0.0, 1.0)


def chi_bar_sf(t: float, m: int) -> float:
    """Survival function of the chi-bar-square mix sum_k C(m,k) 2^-m ChiSq_k."""
    if m < 1:
        raise DomainError("chi-bar mixture needs m >= 1")
    if t < 0.0:
        return 1.0
    ladder = chi_square_sf_ladder(t, m)
    w = 0.5 ** m
    total = w * ladder[0]
    for k in range(1, m + 1):
        w *= (m - k + 1) / k
        total += w * ladder[k]
    return min(1.0, max(0.0, total))


def lr_chibar_global(z, alpha: float) -> GlobalTestResult:
    """Order-restricted LR test of the intersection of H_i: mu_i >= 0.

    Takes the underlying unit-variance statistics, not p-values:
    T = sum_i min(z_i, 0)^2, referred to the chi-bar-square distribution
    with binomial(m, 1/2) weights.
    """
    z = np.asarray(z, dtype=np.float64)
    if z.ndim != 1 or z.size == 0:
        raise DomainError("z statistics must form a nonempty vector")
    _check_alpha(alpha)
    m = z.size
    neg = np.minimum(z, 0.0)
    stat = float((neg * neg).sum())
    if math.isinf(stat):
        return GlobalTestResult(math.inf, 0.0, True)
    pv = chi_bar_sf(stat, m)
    return GlobalTestResult(stat, pv, pv <= alpha)
