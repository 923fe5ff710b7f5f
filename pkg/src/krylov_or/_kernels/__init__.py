"""Hot kernels, compiled when available.

The Cython extension ``_compiled`` is preferred; the NumPy fallback is used
when it is missing or when ``KRYLOV_OR_PURE_PYTHON`` is set to a true value.
Both modules are importable directly so tests and benchmarks can compare them.
"""

import os

from . import _fallback

BACKEND = "python"
kernels = _fallback

if os.environ.get("KRYLOV_OR_PURE_PYTHON", "").lower() not in ("1", "true", "yes"):
    try:
        from . import _compiled
    except ImportError:  # extension not built
        _compiled = None
    else:
        kernels = _compiled
        BACKEND = "cython"
else:
    _compiled = None


def available_backends():
    """Return ``{name: module}`` for every importable kernel implementation."""
    out = {"python": _fallback}
    try:
        from . import _compiled as compiled
    except ImportError:
        return out
    out["cython"] = compiled
    return out


tridiag_eigh = kernels.tridiag_eigh
jacobi_eigh = kernels.jacobi_eigh
ldl_column = kernels.ldl_column
banded_ldl = kernels.banded_ldl
banded_ldl_solve = kernels.banded_ldl_solve
