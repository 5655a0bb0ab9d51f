"""Kernel selection: the compiled extension when it imports, else numpy.

Set ``FRECHET_SKEW_PURE=1`` to force the numpy path.
"""

import os

BACKEND = "python"
if os.environ.get("FRECHET_SKEW_PURE", "") not in ("1", "true", "yes"):
    try:
        from ._kernels import log_objective, pmean_terms  # noqa: F401
        BACKEND = "cython"
    except ImportError:  # extension not built
        pass
if BACKEND == "python":
    from ._kernels_py import log_objective, pmean_terms  # noqa: F401
