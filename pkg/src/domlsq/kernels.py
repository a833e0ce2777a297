"""Kernel backend selection.

Prefers the compiled extension ``domlsq._fastkern`` and falls back to the
pure-numpy implementations in ``domlsq._kernels_py``.  Set the environment
variable ``DOMLSQ_PURE_PYTHON=1`` before import to force the fallback (used
by the backend-agreement tests and the kernel benchmark).
"""
import os

if os.environ.get("DOMLSQ_PURE_PYTHON", "").strip() not in ("", "0"):
    from . import _kernels_py as _impl

    HAVE_COMPILED = False
else:
    try:
        from . import _fastkern as _impl

        HAVE_COMPILED = True
    except ImportError:
        from . import _kernels_py as _impl

        HAVE_COMPILED = False

mandelbrot_inside = _impl.mandelbrot_inside
monomial_fill = _impl.monomial_fill
alias_tables = _impl.alias_tables


def backend_name():
    return "compiled" if HAVE_COMPILED else "numpy"
