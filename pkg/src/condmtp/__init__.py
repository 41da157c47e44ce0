"""Conditionalized multiple testing procedures and their FWER machinery.

Discard p-values above a pre-chosen threshold, rescale the survivors by the
threshold, and run a base multiple testing procedure on what is left.  The
package implements the base procedures, the conditionalization wrapper and
its adjusted p-values, numerical evaluators for the FWER-control criteria,
and a seeded Monte Carlo harness with a CLI.
"""

__version__ = "0.1.0"

from .errors import AccuracyError, DataError, DomainError
from .numkit import (
    QuadratureSettings,
    bivariate_normal_quadrant,
    chi_square_sf,
    integrate_real_line,
    std_normal_cdf,
    std_normal_quantile,
)
from .procedures import (
    DecisionVector,
    GlobalTestResult,
    ProcedureSpec,
    PValueVector,
    adjusted_pvalues,
    bonferroni,
    chi_bar_sf,
    fgs_plugin,
    fisher_global,
    lr_chibar_global,
    sidak,
    step_procedure,
)
from .conditional import (
    ConditionalizedResult,
    apply_procedure,
    cbp_adjusted_p,
    conditional_adjusted_p,
    conditionalize,
    oracle_cbp,
)
from .criteria import (
    AsymptoticSummary,
    BivariateRegion,
    EquicorrelatedNormalNulls,
    IndependentUniformNulls,
    IntegralCriterionParams,
    avg_pos_indicator_corr,
    binom_inv_expect,
    bivariate_pqd_bound,
    certify_pair,
    check_supra_uniform,
    exact_bivariate_fwer,
    expectation_criterion_lhs,
    h_rho,
    integral_criterion,
    region_grid,
)
from .simkit import (
    CorrelationModel,
    MixtureComponent,
    MonteCarloEstimate,
    SimulationScenario,
    estimate_rate,
    exceedance_test,
    gen_nonneg_corr_matrix,
    run_scenario,
    sample_statistics,
    scenario_fig1,
    scenario_fig2,
    scenario_pairwise,
)
from ._kernels import active_backend_name, get_backend
