"""Numerical kernels with a compiled fast path and a numpy reference path.

The compiled module (`mfswipt._kernels._fast`, Cython) and the reference
module (`mfswipt._kernels._ref`, pure numpy) implement the same two
entry points with identical semantics:

    fresnel_cs(x)     -> (C(x), S(x)) elementwise Fresnel integrals
    barrier_solve(..) -> log-barrier interior-point solve of one convex
                         power-allocation subproblem (scaled form)

Selection happens once at import. Set MFSWIPT_KERNELS=ref|fast|auto to
override (default auto: compiled if available, else reference).
"""

import os

_requested = os.environ.get("MFSWIPT_KERNELS", "auto").lower()

if _requested not in ("auto", "fast", "ref"):
    raise ImportError(f"MFSWIPT_KERNELS must be auto, fast or ref, got {_requested!r}")

if _requested == "ref":
    from . import _ref as _impl

    BACKEND = "ref"
else:
    try:
        from . import _fast as _impl

        BACKEND = "fast"
    except ImportError:
        if _requested == "fast":
            raise
        from . import _ref as _impl

        BACKEND = "ref"

fresnel_cs = _impl.fresnel_cs
barrier_solve = _impl.barrier_solve

__all__ = ["BACKEND", "fresnel_cs", "barrier_solve"]
