"""Fréchet p-means of continuous distributions and skewness diagnostics."""

from .distributions import (Distribution, DistributionSpec, Support, closed_form_pmean, custom,
                            dist, make_distribution, mirrored, mode, moment_domain)
from .dominance import (build_tail_pair, cdf_dominance, decreasing_pdf, dominance_report,
                        log_concavity, single_crossing)
from .errors import *  # noqa: F401,F403
from .pmean import (PMeanCurve, PMeanPoint, balance_residual, dnu_dp_general, dnu_dp_interior,
                    pmean_curve, solve_pmean)
from .skewness import (classify, gamma_iff_nu4, magnitude_ell, pearson_coefficients,
                       van_zwet)
from .tailbone import (SampleSet, TailboneTrajectory, direction_zeta, frechet_pmean_nd,
                       tailbone_trajectory)

__version__ = "0.1.0"
