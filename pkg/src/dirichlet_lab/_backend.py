"""Select the compiled kernels when available, else the pure-Python twins."""

import os

BACKEND = "python"

if os.environ.get("DIRICHLET_LAB_PURE", "") not in ("", "0"):
    from . import _fallback as kernels
else:
    try:
        from . import _kernels as kernels

        BACKEND = "cython"
    except ImportError:  # extension not built
        from . import _fallback as kernels

partial_sums = kernels.partial_sums
uniforms = kernels.uniforms
wos_walks = kernels.wos_walks

__all__ = ["BACKEND", "partial_sums", "uniforms", "wos_walks"]
