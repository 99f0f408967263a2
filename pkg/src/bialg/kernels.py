"""Kernel dispatch: the compiled extension when it imports, the NumPy fallback otherwise.

Set ``BIALG_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import os

from . import _pykernels

BACKEND = "python"
if os.environ.get("BIALG_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
else:
    _impl = _pykernels

wp_batch = _impl.wp_batch
monomial_matrix = _impl.monomial_matrix
torus_cells = _impl.torus_cells
