"""Numerical evaluation of the FWER-control criteria for the CBP.

Covers the supra-uniformity check, the expectation criterion, the
one-dimensional integral criterion for equicorrelated normals, the bivariate
region certificates, the exact bivariate FWER, the inverse-binomial identity,
and the asymptotic indicator-correlation bound.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .numkit import (
    QuadratureSettings,
    bivariate_normal_quadrant,
    integrate_real_line,
    std_normal_cdf,
    std_normal_log_cdf,
    std_normal_pdf,
    std_normal_quantile,
)

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def _check_level(alpha: float) -> None:
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must be in (0,1), got {alpha!r}")


# ----------------------------------------------------------------------
# Supra-uniformity on a CDF grid
# ----------------------------------------------------------------------

def check_supra_uniform(cdf_grid) -> bool:
    """Direct check of P(p < gamma | p <= lam) <= gamma/lam on a grid.

    ``cdf_grid`` is a sequence of (x, F(x)) pairs with strictly increasing x.
    Returns True iff F(gamma) * lam <= gamma * F(lam) (up to 1e-12) for every
    grid pair gamma <= lam; pairs with F(lam) = 0 are vacuous.
    """
    grid = np.asarray(cdf_grid, dtype=np.float64)
    if grid.ndim != 2 or grid.shape[1] != 2 or grid.shape[0] == 0:
        raise DomainError("cdf grid must be a nonempty sequence of (x, F) pairs")
    x, f = grid[:, 0], grid[:, 1]
    if np.any(np.diff(x) <= 0.0):
        raise DomainError("grid x values must be strictly increasing")
    if np.any(np.diff(f) < 0.0):
        raise DomainError("grid F values must be nondecreasing")
    if x.min() < 0.0 or x.max() > 1.0 or f.min() < 0.0 or f.max() > 1.0:
        raise DomainError("grid values must lie in [0, 1]")
    # cross-multiplied form F_j * x_k <= x_j * F_k for all j <= k
    lhs = np.outer(f, x)
    rhs = np.outer(x, f)
    j, k = np.triu_indices(x.size)
    return bool(np.all(lhs[j, k] - rhs[j, k] <= 1e-12))


# ----------------------------------------------------------------------
# Inverse-binomial identity (Lemma used by the integral criterion)
# ----------------------------------------------------------------------

def _inv_mean_one_plus_binom(n: int, prob: float) -> float:
    # E(X+1)^-1 for X ~ Binomial(n, prob); stable at both endpoints
    if prob <= 0.0:
        return 1.0
    if prob >= 1.0:
        return 1.0 / (n + 1)
    return -math.expm1((n + 1) * math.log1p(-prob)) / ((n + 1) * prob)


def binom_inv_expect(n: int, prob: float) -> float:
    """E(X+1)^-1 = (1 - (1-p)^(n+1)) / ((n+1) p) for X ~ Binomial(n, p).

    prob = 0 makes X degenerate at zero; the limit value 1 is returned with
    a RuntimeWarning flag.
    """
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 0:
        raise DomainError(f"n must be a nonnegative integer, got {n!r}")
    if math.isnan(prob) or prob < 0.0 or prob > 1.0:
        raise DomainError(f"prob must be in [0,1], got {prob!r}")
    if prob == 0.0:
        warnings.warn("binom_inv_expect at prob=0: X is degenerate at 0, "
                      "returning the limit value 1", RuntimeWarning,
                      stacklevel=2)
        return 1.0
    return _inv_mean_one_plus_binom(n, prob)


# ----------------------------------------------------------------------
# Expectation criterion (sum_i P(p_i <= lam*alpha) E(R^-1 | p_i = lam*alpha))
# ----------------------------------------------------------------------

class IndependentUniformNulls:
    """Provider for m independent standard-uniform null p-values."""

    def __init__(self, m: int):
        if m < 1:
            raise DomainError("m must be >= 1")
        self.m = m

    def prob_kept(self, i: int, threshold: float) -> float:
        return threshold

    def mean_inverse_r(self, i: int, at: float, lam: float) -> float:
        # p_i = at <= lam is itself counted, so R = 1 + Binomial(m-1, lam)
        return _inv_mean_one_plus_binom(self.m - 1, lam)


class ComonotoneUniformNulls:
    """Provider for the fully dependent case p_1 = ... = p_m (uniform)."""

    def __init__(self, m: int):
        if m < 1:
            raise DomainError("m must be >= 1")
        self.m = m

    def prob_kept(self, i: int, threshold: float) -> float:
        return threshold

    def mean_inverse_r(self, i: int, at: float, lam: float) -> float:
        return 1.0 / self.m


class EquicorrelatedNormalNulls:
    """Provider for p_i = Phi(Z_i) with equicorrelated normal Z (rho >= 0).

    The conditional expectation uses the single-factor representation
    Z_i = sqrt(rho) Theta + sqrt(1-rho) eps_i: given p_i = at, the latent
    standardised factor is standard normal and the remaining m-1 indicator
    variables are conditionally iid Bernoulli(Phi(mu(at) - sqrt(rho) s)),
    so E(R^-1) reduces to a one-dimensional integral of the closed-form
    inverse-binomial mean.
    """

    def __init__(self, m: int, rho: float,
                 settings: QuadratureSettings | None = None):
        if m < 1:
            raise DomainError("m must be >= 1")
        if not (0.0 <= rho < 1.0):
            raise DomainError(f"rho must be in [0,1), got {rho!r}")
        self.m = m
        self.rho = rho
        self.settings = settings or QuadratureSettings()

    def prob_kept(self, i: int, threshold: float) -> float:
        return threshold

    def mean_inverse_r(self, i: int, at: float, lam: float) -> float:
        if not (0.0 < at <= lam):
            raise DomainError("conditioning point must satisfy 0 < at <= lam")
        if self.rho == 0.0:
            return _inv_mean_one_plus_binom(self.m - 1, lam)
        sr = math.sqrt(self.rho)
        onem = math.sqrt(1.0 - self.rho)
        mu = std_normal_quantile(lam) / onem - std_normal_quantile(at) * self.rho / onem
        n = self.m - 1

        def f(s: float) -> float:
            q = std_normal_cdf(mu - sr * s)
            return _inv_mean_one_plus_binom(n, q) * std_normal_pdf(s)

        return integrate_real_line(f, self.settings, split_points=(mu / sr,))


def expectation_criterion_lhs(dist, alpha: float, lam: float, m: int) -> float:
    """Numeric left-hand side of the expectation criterion.

    The criterion certifies FWER control only together with the conditional
    monotonicity hypothesis on P(R <= k | p_i = x), which is not machine
    checkable in general; this returns the numeric sum only.  Control is
    suggested when the result is <= alpha.
    """
    _check_level(alpha)
    if not (0.0 < lam <= 1.0):
        raise DomainError(f"lambda must be in (0,1], got {lam!r}")
    if m < 1 or m != getattr(dist, "m", m):
        raise DomainError("m must match the provider's dimension and be >= 1")
    t = lam * alpha
    total = 0.0
    for i in range(m):
        total += dist.prob_kept(i, t) * dist.mean_inverse_r(i, t, lam)
    return total


# ----------------------------------------------------------------------
# Integral criterion (equicorrelated normal case)
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class IntegralCriterionParams:
    """Parameters of the one-dimensional integral bound.

    ``mu`` is derived: Phi^-1(lam)(1-rho)^-1/2 - Phi^-1(lam*alpha) rho (1-rho)^-1/2
    (infinite when lam = 1, where the criterion holds with value 1).
    """

    alpha: float
    lam: float
    rho: float
    mu: float = field(init=False)

    def __post_init__(self):
        _check_level(self.alpha)
        if not (0.0 < self.lam <= 1.0):
            raise DomainError(f"lambda must be in (0,1], got {self.lam!r}")
        if not (0.0 <= self.rho < 1.0):
            raise DomainError(f"rho must be in [0,1), got {self.rho!r}")
        if self.lam == 1.0:
            mu = math.inf
        else:
            onem = math.sqrt(1.0 - self.rho)
            mu = (std_normal_quantile(self.lam) / onem
                  - std_normal_quantile(self.lam * self.alpha) * self.rho / onem)
        object.__setattr__(self, "mu", mu)


def integral_criterion(params: IntegralCriterionParams,
                       settings: QuadratureSettings | None = None
                       ) -> tuple[float, bool]:
    """Evaluate integral of phi(x) / Phi(mu - sqrt(rho) x) over the line.

    Returns (value, holds) with holds <=> value <= 1/lam up to quadrature
    tolerance (the rho = 0 case attains equality exactly).
    """
    if settings is None:
        settings = QuadratureSettings()
    lam = params.lam
    if lam == 1.0 or params.rho == 0.0:
        # denominator is constant: Phi(inf) = 1, or Phi(Phi^-1(lam)) = lam
        value = 1.0 / lam
        return value, True
    sr = math.sqrt(params.rho)
    mu = params.mu

    def f(x: float) -> float:
        y = mu - sr * x
        if y >= -37.0:
            return std_normal_pdf(x) / std_normal_cdf(y)
        # far tail: assemble exp(log phi(x) - log Phi(y)) to dodge 0/0
        lg = -0.5 * x * x - _LOG_SQRT_2PI - std_normal_log_cdf(y)
        return math.exp(lg)

    value = integrate_real_line(f, settings, split_points=(mu / sr,))
    slack = max(settings.abs_tol, settings.rel_tol / lam)
    return value, value <= 1.0 / lam + slack


# ----------------------------------------------------------------------
# Bivariate region certificates
# ----------------------------------------------------------------------

def bivariate_pqd_bound(alpha: float, lam: float) -> tuple[float, bool]:
    """FWER bound 1 - (1 - lam*alpha/2)^2 + 2(1-lam) lam*alpha under PQD.

    Holds (certifies FWER <= alpha for positive quadrant dependent pairs)
    iff the bound is <= alpha.
    """
    _check_level(alpha)
    if not (0.0 < lam < 1.0):
        raise DomainError(f"lambda must be in (0,1), got {lam!r}")
    la = lam * alpha
    bound = 1.0 - (1.0 - 0.5 * la) ** 2 + 2.0 * (1.0 - lam) * la
    return bound, bound <= alpha


@dataclass(frozen=True)
class BivariateRegion:
    """z-space corners of the bivariate CBP rejection regions.

    z0 = Phi^-1(1-lam), z1 = Phi^-1(1-lam*alpha), z2 = Phi^-1(1-lam*alpha/2).
    """

    alpha: float
    lam: float
    z0: float = field(init=False)
    z1: float = field(init=False)
    z2: float = field(init=False)

    def __post_init__(self):
        _check_level(self.alpha)
        if not (0.0 < self.lam < 1.0):
            raise DomainError(f"lambda must be in (0,1), got {self.lam!r}")
        la = self.lam * self.alpha
        object.__setattr__(self, "z0", std_normal_quantile(1.0 - self.lam))
        object.__setattr__(self, "z1", std_normal_quantile(1.0 - la))
        object.__setattr__(self, "z2", std_normal_quantile(1.0 - 0.5 * la))


def h_rho(rho: float, region: BivariateRegion) -> float:
    """Monotone certificate function; h(rho) >= 2 certifies d FWER/d rho <= 0."""
    if not (0.0 <= rho < 1.0):
        raise DomainError(f"rho must be in [0,1), got {rho!r}")
    z0, z1, z2 = region.z0, region.z1, region.z2
    first = math.exp(-(z2 - rho * z2) ** 2 + (z0 - rho * z2) ** 2)
    second = 2.0 * math.exp(-(z1 - rho * z0) ** 2 + (z2 - rho * z0) ** 2)
    return first + second


def exact_bivariate_fwer(alpha: float, lam: float, rho: float,
                         settings: QuadratureSettings | None = None) -> float:
    """FWER of the CBP for m = 2 uniform nulls from correlation-rho normals.

    Assembled by inclusion-exclusion from bivariate normal rectangle
    probabilities: FWER = 1 - P(A) + 2[P(B) - P(C)] where, in z-space with
    z_i = Phi^-1(1 - p_i),
    A = both p above lam*alpha/2, B = p1 above lam and p2 below lam*alpha,
    C = p1 above lam and p2 below lam*alpha/2.
    """
    _check_level(alpha)
    if not (0.0 < lam <= 1.0):
        raise DomainError(f"lambda must be in (0,1], got {lam!r}")
    if not abs(rho) < 1.0:
        raise DomainError(f"rho must satisfy |rho| < 1, got {rho!r}")
    la = lam * alpha
    z0 = -math.inf if lam == 1.0 else std_normal_quantile(1.0 - lam)
    z1 = std_normal_quantile(1.0 - la)
    z2 = std_normal_quantile(1.0 - 0.5 * la)
    p_a = bivariate_normal_quadrant(z2, z2, rho, settings)
    # P(X1 <= z0, X2 >= z) = Phi(z0) - P(X1 <= z0, X2 <= z)
    phi_z0 = 0.0 if z0 == -math.inf else std_normal_cdf(z0)
    p_b = phi_z0 - bivariate_normal_quadrant(z0, z1, rho, settings)
    p_c = phi_z0 - bivariate_normal_quadrant(z0, z2, rho, settings)
    fwer = 1.0 - p_a + 2.0 * (p_b - p_c)
    return min(1.0, max(0.0, fwer))


# Fig. 4 style certification: which analytic results cover a given (alpha, lam)
_CERTIFICATES = ("lambda-le-half", "pqd-bound", "product-le-two-thirds", "gap")


def certify_pair(alpha: float, lam: float) -> tuple[str, ...]:
    """Names of the analytic certificates covering (alpha, lam), rho >= 0.

    lambda <= 1/2 makes the CBP dominated by plain Bonferroni; the PQD bound,
    the lam*alpha <= 2/3 condition, and the gap condition
    (2/3 <= lam*alpha <= 0.69 with the bound inequality reversed) cover the
    rest of the unit square between them.
    """
    _check_level(alpha)
    if not (0.0 < lam < 1.0):
        raise DomainError(f"lambda must be in (0,1), got {lam!r}")
    la = lam * alpha
    bound, bound_holds = bivariate_pqd_bound(alpha, lam)
    certs = []
    if lam <= 0.5:
        certs.append("lambda-le-half")
    if bound_holds:
        certs.append("pqd-bound")
    if la <= 2.0 / 3.0:
        certs.append("product-le-two-thirds")
    if 2.0 / 3.0 <= la <= 0.69 and bound >= alpha:
        certs.append("gap")
    return tuple(certs)


def region_grid(n: int = 50) -> list[dict]:
    """Scan an n x n midpoint grid of (alpha, lam) in (0,1)^2.

    Each cell reports its certificates; the union of the four is expected to
    cover every cell.
    """
    if n < 1:
        raise DomainError("grid size must be >= 1")
    rows = []
    for i in range(n):
        alpha = (i + 0.5) / n
        for j in range(n):
            lam = (j + 0.5) / n
            certs = certify_pair(alpha, lam)
            bound, _ = bivariate_pqd_bound(alpha, lam)
            rows.append({
                "alpha": alpha,
                "lam": lam,
                "bound": bound,
                "certificates": certs,
                "covered": bool(certs),
            })
    return rows


# ----------------------------------------------------------------------
# Asymptotic indicator-correlation summary
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class AsymptoticSummary:
    """Average positive indicator correlation and the var(R/m) bound."""

    rho_bar: float
    variance_bound: float
    eta_hat: float | None = None
    empirical_var: float | None = None


def avg_pos_indicator_corr(indicator_corr,
                           indicator_sample=None) -> AsymptoticSummary:
    """Summarise corr(1[p_i <= lam], 1[p_j <= lam]) for the asymptotic bound.

    ``indicator_corr`` is the m x m correlation matrix of the keep-indicators;
    only positive parts of the off-diagonal entries enter rho_bar.  An
    optional boolean sample (replications x m) of the indicators yields
    eta_hat = mean(R/m) and the empirical var(R/m) for comparison against
    the bound (1/m + rho_bar)/4.
    """
    c = np.asarray(indicator_corr, dtype=np.float64)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise DomainError("indicator correlation matrix must be square")
    m = c.shape[0]
    if m < 2:
        raise DomainError("need m >= 2")
    if not np.allclose(c, c.T, atol=1e-10):
        raise DomainError("indicator correlation matrix must be symmetric")
    if not np.allclose(np.diag(c), 1.0, atol=1e-10):
        raise DomainError("indicator correlation matrix must have unit diagonal")
    iu = np.triu_indices(m, k=1)
    rho_bar = float(np.maximum(c[iu], 0.0).sum() * 2.0 / (m * (m - 1)))
    bound = (1.0 / m + rho_bar) / 4.0
    eta_hat = None
    emp_var = None
    if indicator_sample is not None:
        s = np.asarray(indicator_sample)
        if s.ndim != 2 or s.shape[1] != m:
            raise DomainError("indicator sample must be (replications, m)")
        ratio = s.astype(np.float64).mean(axis=1)
        eta_hat = float(ratio.mean())
        emp_var = float(ratio.var())
    return AsymptoticSummary(rho_bar=rho_bar, variance_bound=bound,
                             eta_hat=eta_hat, empirical_var=emp_var)
